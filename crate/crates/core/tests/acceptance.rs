//! Acceptance suite: one test per release criterion, each printing a
//! `criterion N: PASS — ...` line (the assertion fires first on failure).
//! Tolerances are pinned in code; run with `--nocapture` to see the lines.

use std::time::Instant;

use hytrans_core::boundary::{GasEquilibriumSpec, HerSpec, Insulation};
use hytrans_core::config::{parse_config, presets, FormulationConfig, RunConfig};
use hytrans_core::constants::{AVOGADRO, EV_PER_MOL, GAS_CONSTANT};
use hytrans_core::fem::{
    build_boundary_layer_mesh, build_interval_mesh, transfer_field, DofMap, FieldSpec,
};
use hytrans_core::mechanics::{BoundaryLayerLoad, RecoveredFields, StressSource};
use hytrans_core::runner::execute;
use hytrans_core::sim::{Simulation, Transport};
use hytrans_core::solver::StepController;
use hytrans_core::tds::{run_tds, Spectrum, TdsConfig};
use hytrans_core::transport::{
    BcKind, ClProblem, DensityLaw, KineticOption, LatticeParams, OccupancyVariant,
    ThermalSchedule, TransportBc, TrapKinetics, TrapSpec,
};

// ---------------------------------------------------------------- helpers

fn preset_config(name: &str) -> RunConfig {
    parse_config(presets::preset(name).unwrap()).unwrap()
}

/// Parsed crack-plane line cut: (r, c_l, sigma_h, eps_p).
struct CrackCut {
    r: Vec<f64>,
    c_l: Vec<f64>,
    eps_p: Vec<f64>,
}

fn parse_linecut(csv: &str, n_traps: usize) -> CrackCut {
    let mut r = Vec::new();
    let mut c_l = Vec::new();
    let mut eps_p = Vec::new();
    for line in csv.lines().skip(1) {
        let cols: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        r.push(cols[0]);
        c_l.push(cols[1]);
        eps_p.push(cols[2 + n_traps + 1]);
    }
    CrackCut { r, c_l, eps_p }
}

fn crack_cut(config: &RunConfig) -> (CrackCut, hytrans_core::solver::SolveStats) {
    let artifacts = execute(config).unwrap();
    let cut_csv = artifacts
        .files
        .iter()
        .find(|(name, _)| name.starts_with("linecut0"))
        .map(|(_, c)| c.clone())
        .unwrap();
    // stats parsed only for the newton count criterion
    let stats_csv = artifacts
        .files
        .iter()
        .find(|(name, _)| name == "stats.csv")
        .map(|(_, c)| c.clone())
        .unwrap_or_default();
    let mut stats = hytrans_core::solver::SolveStats::default();
    for line in stats_csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        stats.record_step(
            cols[1].parse().unwrap(),
            cols[2].parse().unwrap(),
            cols[3].parse().unwrap(),
            cols[5].parse().unwrap(),
            cols[6].parse().unwrap(),
        );
    }
    (parse_linecut(&cut_csv, config.traps.len()), stats)
}

fn peak(values: &[f64]) -> f64 {
    values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

const TABLE2_CENV: f64 = 2.084e21 / AVOGADRO;

fn legrand_kinetic_trap(kappa0: f64, lambda0: f64) -> TrapSpec {
    TrapSpec {
        label: "trap-1".into(),
        kinetics: TrapKinetics::McNabbFoster {
            kappa0,
            lambda0,
            e_t: 0.2 * EV_PER_MOL,
            e_d: 0.6 * EV_PER_MOL,
            option: KineticOption::OptionTwo,
        },
        e_b: 0.4 * EV_PER_MOL,
        ratio: kappa0 / lambda0,
        density: DensityLaw::Constant { n_t: 2.0 },
        multiplicity: 1.0,
        mobile: false,
    }
}

fn legrand_oriani_trap(ratio: f64) -> TrapSpec {
    TrapSpec {
        ratio,
        ..TrapSpec::oriani("trap-1", 0.4 * EV_PER_MOL, DensityLaw::Constant { n_t: 2.0 })
    }
}

/// Independent brute-force reference for the TDS benchmark: uniform-grid
/// finite differences, fixed-step BDF1, Oriani trapping evaluated
/// node-wise, Thomas solves. Returns `(time, average total H)` samples at
/// every step.
fn tds_fd_oracle(
    half_thickness: f64,
    n_elements: usize,
    n_steps: usize,
    t0: f64,
    phi: f64,
    t_end_temp: f64,
    c0: f64,
    n_l: f64,
    d0: f64,
    e_l: f64,
    n_t: f64,
    e_b: f64,
    ratio: f64,
) -> (Vec<f64>, Vec<f64>) {
    let n = n_elements + 1;
    let h = half_thickness / n_elements as f64;
    let t_total = (t_end_temp - t0) / phi;
    let dt = t_total / n_steps as f64;

    let ct_of = |c: f64, temp: f64| -> f64 {
        if c <= 0.0 {
            return 0.0;
        }
        let z = ratio.ln() + e_b / (GAS_CONSTANT * temp) + (c / n_l).ln();
        n_t / (1.0 + (-z.min(700.0)).min(700.0).exp())
    };
    let dct_of = |c: f64, temp: f64| -> f64 {
        let ln_kt = ratio.ln() + e_b / (GAS_CONSTANT * temp);
        if c <= 0.0 {
            return (n_t / n_l) * ln_kt.min(700.0).exp();
        }
        let z = ln_kt + (c / n_l).ln();
        let softplus = if z > 36.0 { z } else { z.exp().ln_1p() };
        (n_t / n_l) * (ln_kt - 2.0 * softplus).min(700.0).exp()
    };

    let mut c = vec![c0; n];
    c[n - 1] = 0.0; // desorbing surface
    let temp0 = t0;
    let mut ct_old: Vec<f64> = c.iter().map(|&ci| ct_of(ci, temp0)).collect();
    let mut times = vec![0.0];
    let average = |c: &[f64], ct: &[f64]| -> f64 {
        let mut sum = 0.0;
        for i in 0..n {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            sum += w * (c[i] + ct[i]);
        }
        sum * h / half_thickness
    };
    let mut totals = vec![average(&c, &ct_old)];

    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];

    for step in 1..=n_steps {
        let t_new = step as f64 * dt;
        let temp = t0 + phi * t_new;
        let d = d0 * (-e_l / (GAS_CONSTANT * temp)).exp();
        let c_old = c.clone();
        // Newton on the BDF1 system
        for _ in 0..30 {
            for i in 0..n {
                let lap_coeff = d / (h * h);
                if i == n - 1 {
                    // Dirichlet surface node
                    lower[i] = 0.0;
                    diag[i] = 1.0;
                    upper[i] = 0.0;
                    rhs[i] = -(c[i]);
                    continue;
                }
                let ct_new = ct_of(c[i], temp);
                let mut res = (c[i] - c_old[i]) / dt + (ct_new - ct_old[i]) / dt;
                let mut dl = 0.0;
                let mut du = 0.0;
                let mut dd = (1.0 + dct_of(c[i], temp)) / dt;
                if i == 0 {
                    // symmetry: ghost node mirrors c[1]
                    res -= lap_coeff * (2.0 * c[1] - 2.0 * c[0]);
                    dd += 2.0 * lap_coeff;
                    du = -2.0 * lap_coeff;
                } else {
                    res -= lap_coeff * (c[i + 1] - 2.0 * c[i] + c[i - 1]);
                    dd += 2.0 * lap_coeff;
                    dl = -lap_coeff;
                    du = -lap_coeff;
                }
                lower[i] = dl;
                diag[i] = dd;
                upper[i] = du;
                rhs[i] = -res;
            }
            // Thomas solve
            for i in 1..n {
                let m = lower[i] / diag[i - 1];
                diag[i] -= m * upper[i - 1];
                rhs[i] -= m * rhs[i - 1];
            }
            let mut delta = vec![0.0; n];
            delta[n - 1] = rhs[n - 1] / diag[n - 1];
            for i in (0..n - 1).rev() {
                delta[i] = (rhs[i] - upper[i] * delta[i + 1]) / diag[i];
            }
            let mut max_d = 0.0f64;
            for i in 0..n {
                c[i] += delta[i];
                max_d = max_d.max(delta[i].abs());
            }
            if max_d < 1e-12 * c0 {
                break;
            }
        }
        for i in 0..n {
            ct_old[i] = ct_of(c[i], temp);
        }
        times.push(t_new);
        totals.push(average(&c, &ct_old));
    }
    (times, totals)
}

fn interp_series(times: &[f64], values: &[f64], t: f64) -> f64 {
    match times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
        Ok(i) => values[i],
        Err(i) => {
            if i == 0 {
                values[0]
            } else if i >= times.len() {
                *values.last().unwrap()
            } else {
                let f = (t - times[i - 1]) / (times[i] - times[i - 1]);
                values[i - 1] + f * (values[i] - values[i - 1])
            }
        }
    }
}

// ------------------------------------------------------------- criteria

#[test]
fn criterion_01_tds_legrand_benchmark() {
    let start = Instant::now();
    let make = |traps: Vec<TrapSpec>| {
        let mut cfg = TdsConfig::legrand_like(traps);
        cfg.t_end = 800.0;
        cfg
    };
    let t_run = Instant::now();
    let mf = run_tds(&make(vec![legrand_kinetic_trap(1e13, 1e8)])).unwrap();
    let mf_runtime = t_run.elapsed().as_secs_f64();
    let t_run = Instant::now();
    let oriani = run_tds(&make(vec![legrand_oriani_trap(1e5)])).unwrap();
    let or_runtime = t_run.elapsed().as_secs_f64();

    let initial_total = mf.total[0];
    assert!((initial_total - 3.0).abs() < 1e-6, "initial inventory should be 3 mol/m³");

    // (a) the two trapping descriptions agree within 1 % of initial H
    let mut max_ab = 0.0f64;
    for i in 0..mf.total.len().min(oriani.total.len()) {
        max_ab = max_ab.max((mf.total[i] - oriani.total[i]).abs());
    }
    assert!(
        max_ab <= 0.01 * initial_total,
        "Oriani vs McNabb-Foster deviation {:.3e} exceeds 1% of initial H",
        max_ab / initial_total
    );

    // (b) both agree with the independent fine-grid BDF1 reference
    let (ot, ototals) = tds_fd_oracle(
        2e-3, 10_000, 120_000, 10.0, 50.0 / 60.0, 800.0, 1.0, 2.1e5, 2.74e-6,
        0.2 * EV_PER_MOL, 2.0, 0.4 * EV_PER_MOL, 1e5,
    );
    let mut max_mf = 0.0f64;
    let mut max_or = 0.0f64;
    for i in 0..mf.time.len() {
        let oracle = interp_series(&ot, &ototals, mf.time[i]);
        max_mf = max_mf.max((mf.total[i] - oracle).abs());
        max_or = max_or.max((oriani.total[i] - oracle).abs());
    }
    assert!(
        max_mf <= 0.01 * initial_total && max_or <= 0.01 * initial_total,
        "deviation from the BDF1 reference: MF {:.3e}, Oriani {:.3e} (limit 1%)",
        max_mf / initial_total,
        max_or / initial_total
    );
    assert!(
        mf_runtime < 120.0 && or_runtime < 120.0,
        "runtime target exceeded: {mf_runtime:.0}s / {or_runtime:.0}s"
    );
    println!(
        "criterion 1: PASS — TDS benchmark: MF-vs-Oriani {:.2}%, vs reference {:.2}%/{:.2}% \
         (limit 1%), runtimes {:.0}s/{:.0}s (total {:.0}s)",
        100.0 * max_ab / initial_total,
        100.0 * max_mf / initial_total,
        100.0 * max_or / initial_total,
        mf_runtime,
        or_runtime,
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_02_frequency_convergence() {
    let make = |traps: Vec<TrapSpec>| {
        let mut cfg = TdsConfig::legrand_like(traps);
        cfg.t_end = 800.0;
        cfg
    };
    let oriani = run_tds(&make(vec![legrand_oriani_trap(1.0)])).unwrap();
    let peak_rate = peak(&oriani.desorption_rate);

    let freqs = [1e2, 1e5, 1e8, 1e13];
    let mut deviations = Vec::new();
    let mut spectra: Vec<Spectrum> = Vec::new();
    for &f in &freqs {
        let s = run_tds(&make(vec![legrand_kinetic_trap(f, f)])).unwrap();
        let mut dev = 0.0f64;
        for i in 0..s.desorption_rate.len().min(oriani.desorption_rate.len()) {
            dev = dev.max((s.desorption_rate[i] - oriani.desorption_rate[i]).abs());
        }
        deviations.push(dev / peak_rate);
        spectra.push(s);
    }
    for w in deviations.windows(2) {
        assert!(
            w[1] <= w[0] * (1.0 + 1e-9),
            "deviation must fall monotonically with frequency: {deviations:?}"
        );
    }
    assert!(
        deviations[3] < 0.02,
        "kinetic spectrum at 1e13 deviates {:.3}% from Oriani (limit 2%)",
        100.0 * deviations[3]
    );
    let peak_low = spectra[0].trap_peak_temperature(0);
    let peak_high = spectra[3].trap_peak_temperature(0);
    assert!(
        peak_low > peak_high,
        "slow kinetics must delay the trap peak: {peak_low} K vs {peak_high} K"
    );
    println!(
        "criterion 2: PASS — frequency sweep deviations {:?} (monotone, <2% at 1e13); \
         trap peak {peak_low:.0} K (1e2) > {peak_high:.0} K (1e13)",
        deviations.iter().map(|d| format!("{:.4}", d)).collect::<Vec<_>>()
    );
}

#[test]
fn criterion_03_stress_equilibrium_analytical() {
    let start = Instant::now();
    let mesh = build_boundary_layer_mesh(0.15, 10e-6, 1).unwrap();
    let dofs = DofMap::new(
        &mesh,
        &[FieldSpec::scalar("sigma_h", 2), FieldSpec::scalar("c", 2)],
    )
    .unwrap();
    let c_env = TABLE2_CENV;
    let lattice = LatticeParams::new(1.27e-8, 2e-6, 5.1e29 / AVOGADRO, 300.0);
    let bcs = vec![
        TransportBc {
            tag: "crack-wall".into(),
            kind: BcKind::Dirichlet(GasEquilibriumSpec::constant(c_env)),
        },
        TransportBc { tag: "crack-tip".into(), kind: BcKind::Insulated(Insulation::Consistent) },
        TransportBc { tag: "symmetry".into(), kind: BcKind::Insulated(Insulation::Consistent) },
        TransportBc { tag: "remote".into(), kind: BcKind::Insulated(Insulation::Consistent) },
    ];
    let problem = ClProblem {
        mesh: &mesh,
        dofs: &dofs,
        field: 1,
        mech_field: 0,
        lattice,
        thermal: ThermalSchedule::Isothermal,
        traps: vec![],
        variant: OccupancyVariant::KtMinusOne,
        krom: false,
        dct_dt_term: true,
        option1_strain_term: false,
        dislocation: None,
        bcs,
        source: None,
        newton_tol: 1e-8,
        max_newton: 25,
    };
    let controller = StepController {
        dt_init: 1e3,
        dt_max: 1e7,
        rel_tol: 1e-5,
        ..Default::default()
    };
    let mut sim = Simulation::new(
        &mesh,
        &dofs,
        None,
        StressSource::AnalyticalKField { nu: 0.3 },
        BoundaryLayerLoad { k_max: 30e6, t_load: 1e-6 },
        Transport::Cl(problem),
        controller,
        false,
        c_env,
        true,
    )
    .unwrap();
    sim.run_to(5e7, &[], |_, _| Ok(())).unwrap();

    let conc_layout = dofs.field(1);
    let mech_layout = dofs.field(0);
    let sh = transfer_field(&mesh, mech_layout, &sim.mech_fields[0].sigma_h, conc_layout);
    let c = sim.cl_nodal();
    let tip_el = 0.8e-6;
    let mut worst = 0.0f64;
    let mut checked = 0;
    for i in 0..conc_layout.n_nodes() {
        let p = conc_layout.coords[i];
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt() - 5e-6;
        if r < 2.0 * tip_el {
            continue;
        }
        let expect = c_env * (lattice.v_h * sh[i] / lattice.rt()).exp();
        worst = worst.max((c[i] - expect).abs() / expect);
        checked += 1;
    }
    let runtime = start.elapsed().as_secs_f64();
    assert!(checked > 500, "too few nodes checked");
    assert!(
        worst < 5e-3,
        "equilibrium ratio deviates {:.4}% (limit 0.5%)",
        100.0 * worst
    );
    assert!(runtime < 60.0, "runtime {runtime:.0}s exceeds 1 min");
    println!(
        "criterion 3: PASS — C_L/C_env matches exp(V_H sigma_h/RT) within {:.3}% \
         at {checked} nodes beyond 2 tip elements ({runtime:.0}s)",
        100.0 * worst
    );
}

#[test]
fn criterion_04_mass_conservation_insulated() {
    let mesh = build_boundary_layer_mesh(0.15, 10e-6, 1).unwrap();
    let dofs = DofMap::new(
        &mesh,
        &[FieldSpec::scalar("sigma_h", 1), FieldSpec::scalar("c", 1)],
    )
    .unwrap();
    let c_env = TABLE2_CENV;
    let lattice = LatticeParams::new(1.27e-8, 2e-6, 5.1e29 / AVOGADRO, 300.0);
    let bcs = ["crack-tip", "crack-wall", "symmetry", "remote"]
        .iter()
        .map(|tag| TransportBc {
            tag: tag.to_string(),
            kind: BcKind::Insulated(Insulation::Consistent),
        })
        .collect();
    let problem = ClProblem {
        mesh: &mesh,
        dofs: &dofs,
        field: 1,
        mech_field: 0,
        lattice,
        thermal: ThermalSchedule::Isothermal,
        traps: vec![TrapSpec::oriani(
            "traps",
            40e3,
            DensityLaw::Constant { n_t: 1e-3 },
        )],
        variant: OccupancyVariant::KtMinusOne,
        krom: false,
        dct_dt_term: true,
        option1_strain_term: false,
        dislocation: None,
        bcs,
        source: None,
        newton_tol: 1e-9,
        max_newton: 25,
    };
    // evolving frozen stress: the K-field amplitude ramps over half the run
    let controller = StepController { dt_init: 50.0, dt_max: 2e4, ..Default::default() };
    let mut sim = Simulation::new(
        &mesh,
        &dofs,
        None,
        StressSource::AnalyticalKField { nu: 0.3 },
        BoundaryLayerLoad { k_max: 40e6, t_load: 1e5 },
        Transport::Cl(problem),
        controller,
        false,
        c_env,
        true,
    )
    .unwrap();

    let inventory = |s: &Simulation| -> f64 {
        match &s.transport {
            Transport::Cl(p) => {
                let (total, _, _) =
                    p.hydrogen_inventory(s.state.conc.current(), &[], &s.mech_fields[0].eps_p, s.t);
                total
            }
            _ => unreachable!(),
        }
    };
    let m0 = inventory(&sim);
    let mut prev = m0;
    let mut worst_step = 0.0f64;
    sim.run_to(2e5, &[], |s, _| {
        let m = inventory(s);
        worst_step = worst_step.max((m - prev).abs() / m0);
        prev = m;
        Ok(())
    })
    .unwrap();
    let total_drift = (prev - m0).abs() / m0;
    assert!(
        worst_step < 1e-6,
        "per-step mass drift {worst_step:.3e} exceeds 1e-6"
    );
    assert!(total_drift < 1e-4, "total mass drift {total_drift:.3e} exceeds 1e-4");
    println!(
        "criterion 4: PASS — insulated inventory drift {worst_step:.2e} per step, \
         {total_drift:.2e} over the run (limits 1e-6 / 1e-4)"
    );
}

#[test]
fn criterion_05_manufactured_solution_orders() {
    // transient diffusion-convection with a fitted source under a frozen
    // linear stress profile; L2 orders must land within 0.2 of p+1
    let lattice = LatticeParams::new(1.27e-8, 2e-6, 5.1e29 / AVOGADRO, 300.0);
    let l = 1e-3;
    let tau = 10.0;
    let c0 = 1e-3;
    let grad_sh = 1e9;
    let v = lattice.d_l * lattice.v_h / lattice.rt() * grad_sh;
    let d = lattice.d_l;
    let pi = std::f64::consts::PI;
    let exact = move |x: f64, t: f64| c0 * (2.0 + (pi * x / l).cos() * (-t / tau).exp());

    let run = |n_el: usize, order: u8, dt: f64, t_end: f64| -> f64 {
        let mesh = build_interval_mesh(l, n_el, 1.0).unwrap();
        let dofs = DofMap::new(
            &mesh,
            &[FieldSpec::scalar("c", order), FieldSpec::scalar("sh", 1)],
        )
        .unwrap();
        let mut problem = ClProblem {
            mesh: &mesh,
            dofs: &dofs,
            field: 0,
            mech_field: 1,
            lattice,
            thermal: ThermalSchedule::Isothermal,
            traps: vec![],
            variant: OccupancyVariant::KtMinusOne,
            krom: false,
            dct_dt_term: true,
            option1_strain_term: false,
            dislocation: None,
            bcs: vec![],
            source: None,
            newton_tol: 1e-12,
            max_newton: 30,
        };
        problem.source = Some(Box::new(move |x, _y, t| {
            let e = (-t / tau).exp();
            let dcdt = -c0 / tau * (pi * x / l).cos() * e;
            let cx = -c0 * pi / l * (pi * x / l).sin() * e;
            let cxx = -c0 * (pi / l).powi(2) * (pi * x / l).cos() * e;
            dcdt - d * cxx + v * cx
        }));
        let layout = dofs.field(0);
        let sh_layout = dofs.field(1);
        let mech = RecoveredFields {
            sigma_h: sh_layout.coords.iter().map(|p| grad_sh * p[0]).collect(),
            eps_p: vec![0.0; sh_layout.n_nodes()],
            eps_p_rate: vec![0.0; sh_layout.n_nodes()],
        };
        let zero_rate = vec![0.0; sh_layout.n_nodes()];
        let n = layout.n_nodes();
        let mut state = hytrans_core::transport::TransportState {
            conc: hytrans_core::solver::TimeHistory::new(nalgebra::DVector::from_fn(n, |i, _| {
                exact(layout.coords[i][0], 0.0)
            })),
            trap_fields: vec![],
        };
        let mut t = 0.0;
        while t < t_end - 1e-12 {
            let tw = state.conc.weights(dt, 2);
            let mech_hist = vec![mech.clone(); tw.hist.len()];
            let t_hist: Vec<f64> = (0..tw.hist.len()).map(|k| t - dt * k as f64).collect();
            let inputs = hytrans_core::transport::StepInputs {
                t_new: t + dt,
                weights: &tw,
                mech_now: &mech,
                mech_hist: &mech_hist,
                t_hist: &t_hist,
                sigma_h_rate: &zero_rate,
            };
            let mut c = state.conc.current().clone();
            for _ in 0..30 {
                let (mut sys, _) = problem.assemble(&c, &state, &inputs).unwrap();
                for tag in ["symmetry", "surface"] {
                    for &node in dofs.boundary_field_nodes(&mesh, 0, tag).unwrap().iter() {
                        let x = layout.coords[node as usize][0];
                        sys.set_dirichlet(node as usize, exact(x, t + dt) - c[node as usize]);
                    }
                }
                let dc = sys.solve().unwrap().clone();
                let done = dc.amax() <= 1e-12 * c0;
                c += &dc;
                if done {
                    break;
                }
            }
            state.conc.push(c, dt);
            t += dt;
        }
        let c = state.conc.current();
        let mut err2 = 0.0;
        for e in 0..mesh.n_elements() {
            let fam = layout.family(mesh.elements[e].shape);
            let ev = hytrans_core::fem::ElemEval::new(&mesh, e, fam.quadrature());
            let basis = ev.basis(order);
            for q in 0..ev.quad.len() {
                let mut ch = 0.0;
                for (i, &node) in layout.elem_nodes[e].iter().enumerate() {
                    ch += basis.phi[q][i] * c[node as usize];
                }
                err2 += ev.wdetj[q] * (ch - exact(ev.points[q][0], t)).powi(2);
            }
        }
        err2.sqrt()
    };

    let mut observed = Vec::new();
    for (order, expected) in [(1u8, 2.0f64), (2, 3.0)] {
        let dt = if order == 1 { 0.02 } else { 0.005 };
        let e1 = run(8, order, dt, 2.0);
        let e2 = run(16, order, dt, 2.0);
        let obs = (e1 / e2).log2();
        assert!(
            (obs - expected).abs() < 0.2,
            "p{order}: observed L2 order {obs:.3}, expected {expected} +- 0.2"
        );
        observed.push((order, obs));
    }
    println!(
        "criterion 5: PASS — manufactured-solution L2 orders {:?} (targets p+1 within 0.2)",
        observed.iter().map(|(p, o)| format!("p{p}: {o:.2}")).collect::<Vec<_>>()
    );
}

#[test]
fn criterion_06_krom_strain_rate_trend() {
    // (a) the trap-creation term lowers the crack-tip C_L peak
    let with_krom = preset_config("krom1999");
    let without = preset_config("sofronis1989");
    let (cut_krom, _) = crack_cut(&with_krom);
    let (cut_none, _) = crack_cut(&without);
    let peak_krom = peak(&cut_krom.c_l);
    let peak_none = peak(&cut_none.c_l);
    assert!(
        peak_krom < peak_none,
        "strain-rate term must lower the peak: {peak_krom:.4e} vs {peak_none:.4e}"
    );

    // (b) fast loading depletes the lattice throughout the plastic zone
    let fast = preset_config("krom1999-fast");
    let (cut_fast, _) = crack_cut(&fast);
    let c_env = TABLE2_CENV;
    let mut depleted_everywhere = true;
    let mut zone_nodes = 0;
    for i in 0..cut_fast.r.len() {
        if cut_fast.eps_p[i] > 1e-3 {
            zone_nodes += 1;
            if cut_fast.c_l[i] >= c_env {
                depleted_everywhere = false;
            }
        }
    }
    assert!(zone_nodes > 5, "plastic zone not resolved on the cut");
    assert!(
        depleted_everywhere,
        "fast loading must deplete C_L below C_env in the plastic zone"
    );
    println!(
        "criterion 6: PASS — peak C_L/C_env {:.3} (strain-rate on) < {:.3} (off); \
         1.3 s load depletes all {zone_nodes} plastic-zone samples below C_env",
        peak_krom / c_env,
        peak_none / c_env
    );
}

#[test]
fn criterion_07_kinetic_option_equivalence() {
    let base = preset_config("mcnabb-paneda2020");
    // Option 2 variant: same trap, concentration arrangement
    let mut opt2 = base.clone();
    if let TrapKinetics::McNabbFoster { option, .. } = &mut opt2.traps[0].spec.kinetics {
        *option = KineticOption::OptionTwo;
    }
    opt2.name = "mcnabb-option2".into();
    let (cut1, _) = crack_cut(&base);
    let (cut2, _) = crack_cut(&opt2);
    let c_env = TABLE2_CENV;
    let mut worst = 0.0f64;
    for i in 0..cut1.c_l.len() {
        let scale = cut1.c_l[i].abs().max(cut2.c_l[i].abs()).max(0.1 * c_env);
        worst = worst.max((cut1.c_l[i] - cut2.c_l[i]).abs() / scale);
    }
    assert!(
        worst <= 0.01,
        "Option 1 (with strain term) vs Option 2 differ by {:.3}% (limit 1%)",
        100.0 * worst
    );

    // initial trap state direction: equilibrium raises the peak
    let mut eq = base.clone();
    eq.transport.traps_in_equilibrium = true;
    eq.name = "mcnabb-eq-init".into();
    let (cut_eq, _) = crack_cut(&eq);
    let peak_empty = peak(&cut1.c_l);
    let peak_eq = peak(&cut_eq.c_l);
    assert!(
        peak_eq > peak_empty,
        "equilibrium initial traps must raise the C_L peak: {peak_eq:.4e} vs {peak_empty:.4e}"
    );

    // regression: dropping the explicit strain-rate term over-predicts C_L
    let mut no_strain = base.clone();
    no_strain.transport.option1_strain_term = false;
    no_strain.name = "mcnabb-no-strain".into();
    let (cut_ns, _) = crack_cut(&no_strain);
    let peak_ns = peak(&cut_ns.c_l);
    assert!(
        peak_ns > peak(&cut1.c_l),
        "Option 1 without the strain term must over-predict: {peak_ns:.4e}"
    );
    println!(
        "criterion 7: PASS — Option1/Option2 agree within {:.2}% (limit 1%); \
         equilibrium init raises the peak ({:.3} vs {:.3} C_env); \
         dropping the strain term over-predicts ({:.3} C_env)",
        100.0 * worst,
        peak_eq / c_env,
        peak_empty / c_env,
        peak_ns / c_env
    );
}

#[test]
fn criterion_08_multitrap_robustness() {
    // clamped run: order-1 concentration, lower limit active
    let config = preset_config("dadfarnia2011-multitrap");
    let artifacts = execute(&config).unwrap();
    let fields = artifacts
        .files
        .iter()
        .find(|(n, _)| n.starts_with("fields"))
        .map(|(_, c)| c.clone())
        .unwrap();
    let mut min_c = f64::INFINITY;
    for line in fields.lines().skip(1) {
        let c: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        min_c = min_c.min(c);
    }
    assert!(min_c >= 0.0, "clamped run produced a negative node: {min_c:.3e}");

    // failure-mode regression: empty start without the clamp undershoots
    let mut raw = config.clone();
    raw.transport.clamp = false;
    raw.transport.initial = hytrans_core::config::InitialConc::Value(0.0);
    raw.name = "dadfarnia-noclamp".into();
    // run through the core API so every accepted step is inspected
    let min_seen = run_min_tracking(&raw);
    assert!(
        min_seen < 0.0,
        "expected negative undershoots without the clamp, min = {min_seen:.3e}"
    );
    println!(
        "criterion 8: PASS — clamped p1 run stays non-negative (min {min_c:.2e}); \
         unclamped empty start undershoots to {min_seen:.2e} mol/m³"
    );
}

/// Runs a crack config through the core driver, returning the minimum
/// lattice concentration seen across all accepted steps.
fn run_min_tracking(config: &RunConfig) -> f64 {
    use hytrans_core::config::GeometryConfig;
    let GeometryConfig::BoundaryLayer { outer_radius, tip_opening, refinement } = config.geometry
    else {
        panic!("crack config expected");
    };
    let mesh = build_boundary_layer_mesh(outer_radius, tip_opening, refinement).unwrap();
    let m = config.material.as_ref().unwrap();
    let dofs = DofMap::new(
        &mesh,
        &[
            FieldSpec::vector("u", m.displacement_order, 2),
            FieldSpec::scalar("sigma_h", 1),
            FieldSpec::scalar("c", config.transport.concentration_order),
        ],
    )
    .unwrap();
    let loading = config.loading.as_ref().unwrap();
    let load = BoundaryLayerLoad { k_max: loading.k_max, t_load: loading.t_load };
    let model = hytrans_core::mechanics::MechModel {
        mesh: &mesh,
        dofs: &dofs,
        u_field: 0,
        params: m.params,
        bbar: m.bbar,
        load,
        remote_tag: "remote".into(),
        symmetry_tag: "symmetry".into(),
        newton_tol: config.solver.controller.newton_tol,
        max_newton: config.solver.controller.max_newton,
    };
    let lattice = LatticeParams::new(
        config.lattice.d_l,
        config.lattice.v_h,
        config.lattice.n_l,
        config.lattice.temperature,
    );
    let bcs = config
        .boundaries
        .iter()
        .map(|b| TransportBc {
            tag: b.tag.clone(),
            kind: match &b.kind {
                hytrans_core::config::BoundaryKindConfig::Dirichlet(s) => BcKind::Dirichlet(*s),
                hytrans_core::config::BoundaryKindConfig::Her(s) => BcKind::Her(*s),
                hytrans_core::config::BoundaryKindConfig::Insulated(i) => BcKind::Insulated(*i),
            },
        })
        .collect();
    let problem = ClProblem {
        mesh: &mesh,
        dofs: &dofs,
        field: 2,
        mech_field: 1,
        lattice,
        thermal: ThermalSchedule::Isothermal,
        traps: config.traps.iter().map(|t| t.spec.clone()).collect(),
        variant: config.transport.variant,
        krom: config.transport.krom,
        dct_dt_term: true,
        option1_strain_term: config.transport.option1_strain_term,
        dislocation: config.transport.dislocation,
        bcs,
        source: None,
        newton_tol: config.solver.controller.newton_tol,
        max_newton: config.solver.controller.max_newton,
    };
    let mut sim = Simulation::new(
        &mesh,
        &dofs,
        Some(model),
        StressSource::FeSolve,
        load,
        Transport::Cl(problem),
        config.solver.controller.clone(),
        config.transport.clamp,
        config.initial_concentration(),
        config.transport.traps_in_equilibrium,
    )
    .unwrap();
    let mut min_seen = f64::INFINITY;
    sim.run_to(loading.t_end, &[], |s, _| {
        let m = s.state.conc.current().min();
        min_seen = min_seen.min(m);
        Ok(())
    })
    .unwrap();
    min_seen
}

#[test]
fn criterion_09_formulation_cross_check() {
    // slow loading: the two primal variables agree pointwise within 2%
    let cl_cfg = preset_config("dileo-anand");
    let mut mu_cfg = cl_cfg.clone();
    mu_cfg.transport.formulation = FormulationConfig::Mu;
    mu_cfg.name = "dileo-anand-mu".into();
    let (cut_cl, _) = crack_cut(&cl_cfg);
    let (cut_mu, _) = crack_cut(&mu_cfg);
    let c_env = TABLE2_CENV;
    let mut worst = 0.0f64;
    for i in 0..cut_cl.c_l.len() {
        let scale = cut_cl.c_l[i].abs().max(cut_mu.c_l[i].abs()).max(0.1 * c_env);
        worst = worst.max((cut_cl.c_l[i] - cut_mu.c_l[i]).abs() / scale);
    }
    assert!(
        worst <= 0.02,
        "C_L-form vs mu_L-form deviate {:.3}% along the crack plane (limit 2%)",
        100.0 * worst
    );

    // fast loading: the potential form converges in fewer Newton iterations
    let mut cl_fast = cl_cfg.clone();
    cl_fast.loading.as_mut().unwrap().t_load = 1.3;
    cl_fast.loading.as_mut().unwrap().t_end = 1.3;
    cl_fast.output.times = vec![1.3];
    cl_fast.solver.controller.dt_init = 1e-4;
    cl_fast.solver.controller.dt_max = 0.2;
    cl_fast.name = "dileo-fast-cl".into();
    let mut mu_fast = cl_fast.clone();
    mu_fast.transport.formulation = FormulationConfig::Mu;
    mu_fast.name = "dileo-fast-mu".into();
    let (_, stats_cl) = crack_cut(&cl_fast);
    let (_, stats_mu) = crack_cut(&mu_fast);
    let (n_cl, n_mu) = (stats_cl.newton_total(), stats_mu.newton_total());
    assert!(
        n_mu < n_cl,
        "mu_L form must need fewer cumulative Newton iterations: {n_mu} vs {n_cl}"
    );
    println!(
        "criterion 9: PASS — formulations agree within {:.2}% (limit 2%); \
         fast-load Newton totals: mu {n_mu} < C_L {n_cl}",
        100.0 * worst
    );
}

#[test]
fn criterion_10_her_boundary_behaviour() {
    // 1D charging against the crack-tip HER constants: the surface settles
    // at the zero-flux concentration of the absorption/adsorption balance
    let her = HerSpec { k_abs: 1.18e5, k_des: 8.9e9, k_c: 5e-6, k_r_chem: 22.0, k_r_elec: 0.0 };
    let n_l = 5.1e29 / AVOGADRO;
    let c_eq = her.equilibrium_concentration(1.0, n_l);
    let surface_conc = |spec: HerSpec, t_end: f64| -> f64 {
        let mesh = build_interval_mesh(1e-3, 60, 0.2).unwrap();
        let dofs = DofMap::new(
            &mesh,
            &[FieldSpec::scalar("sigma_h", 1), FieldSpec::scalar("c", 1)],
        )
        .unwrap();
        let problem = ClProblem {
            mesh: &mesh,
            dofs: &dofs,
            field: 1,
            mech_field: 0,
            lattice: LatticeParams::new(1.27e-8, 2e-6, n_l, 300.0),
            thermal: ThermalSchedule::Isothermal,
            traps: vec![],
            variant: OccupancyVariant::KtMinusOne,
            krom: false,
            dct_dt_term: true,
            option1_strain_term: false,
            dislocation: None,
            bcs: vec![
                TransportBc { tag: "surface".into(), kind: BcKind::Her(spec) },
                TransportBc {
                    tag: "symmetry".into(),
                    kind: BcKind::Insulated(Insulation::Consistent),
                },
            ],
            source: None,
            newton_tol: 1e-9,
            max_newton: 30,
        };
        let controller = StepController { dt_init: 1e-2, dt_max: t_end / 10.0, ..Default::default() };
        let mut sim = Simulation::new(
            &mesh,
            &dofs,
            None,
            StressSource::AnalyticalKField { nu: 0.3 },
            BoundaryLayerLoad { k_max: 0.0, t_load: 1.0 },
            Transport::Cl(problem),
            controller,
            false,
            1e-4 * c_eq,
            true,
        )
        .unwrap();
        sim.run_to(t_end, &[], |_, _| Ok(())).unwrap();
        // surface node is the last mesh vertex (x = length)
        let layout = dofs.field(1);
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (i, p) in layout.coords.iter().enumerate() {
            if p[0] > best.0 {
                best = (p[0], i);
            }
        }
        sim.cl_nodal()[best.1]
    };
    let c_surf = surface_conc(her, 2000.0);
    let err = (c_surf - c_eq).abs() / c_eq;
    assert!(
        err < 0.02,
        "surface concentration {c_surf:.4e} vs equilibrium {c_eq:.4e} ({:.2}% > 2%)",
        100.0 * err
    );

    // Dirichlet consistency: scaling all rate constants up by 1e3 at fixed
    // ratios pins the surface at the same equilibrium value much earlier
    let scaled = HerSpec {
        k_abs: her.k_abs * 1e3,
        k_des: her.k_des * 1e3,
        k_c: her.k_c * 1e3,
        k_r_chem: her.k_r_chem * 1e3,
        k_r_elec: 0.0,
    };
    let c_eq_scaled = scaled.equilibrium_concentration(1.0, n_l);
    let c_surf_fast = surface_conc(scaled, 100.0);
    let err_fast = (c_surf_fast - c_eq_scaled).abs() / c_eq_scaled;
    assert!(
        err_fast < 0.02,
        "large-constant limit misses the Dirichlet value by {:.2}%",
        100.0 * err_fast
    );
    println!(
        "criterion 10: PASS — HER surface reaches the zero-flux concentration within \
         {:.2}% (limit 2%); large-constant limit within {:.2}%",
        100.0 * err,
        100.0 * err_fast
    );
}

#[test]
fn criterion_11_softening_trend() {
    let base = preset_config("kotake-softening");
    let run_with_xi = |xi: f64, coupling: hytrans_core::solver::Coupling, name: &str| {
        let mut cfg = base.clone();
        cfg.material.as_mut().unwrap().params.zeta = 1.0 + xi;
        cfg.solver.controller.coupling = coupling;
        cfg.name = name.into();
        crack_cut(&cfg).0
    };
    use hytrans_core::solver::Coupling;
    let cut_0 = run_with_xi(0.0, Coupling::StaggeredMulti, "kotake-xi0");
    let cut_5k = run_with_xi(-5000.0, Coupling::StaggeredMulti, "kotake-xi5k");
    let cut_20k = run_with_xi(-20000.0, Coupling::StaggeredMulti, "kotake-xi20k");
    let (p0, p5, p20) = (peak(&cut_0.c_l), peak(&cut_5k.c_l), peak(&cut_20k.c_l));
    assert!(
        p0 > p5 && p5 > p20,
        "peak C_L must fall monotonically with stronger softening: {p0:.5e}, {p5:.5e}, {p20:.5e}"
    );

    // near-tip oscillation: single-pass staggering vs multi-pass at the
    // strongest softening, measured by the second-difference energy of the
    // concentration over the first decade of the cut
    let cut_single = run_with_xi(-20000.0, Coupling::StaggeredSingle, "kotake-xi20k-single");
    let oscillation = |cut: &CrackCut| -> f64 {
        let n = cut
            .r
            .iter()
            .position(|&r| r > 10.0 * 1e-5)
            .unwrap_or(cut.r.len())
            .min(cut.r.len());
        let mut sum = 0.0;
        for i in 1..n.saturating_sub(1) {
            sum += (cut.c_l[i + 1] - 2.0 * cut.c_l[i] + cut.c_l[i - 1]).abs();
        }
        sum
    };
    let osc_single = oscillation(&cut_single);
    let osc_multi = oscillation(&cut_20k);
    assert!(
        osc_multi <= osc_single,
        "multi-pass must not oscillate more than single-pass: {osc_multi:.3e} vs {osc_single:.3e}"
    );
    let c_env = TABLE2_CENV;
    println!(
        "criterion 11: PASS — peaks fall monotonically with softening \
         ({:.4}, {:.4}, {:.4} C_env for xi = 0/-5000/-20000); near-tip \
         second-difference energy: single-pass {osc_single:.3e} >= multi-pass {osc_multi:.3e}",
        p0 / c_env,
        p5 / c_env,
        p20 / c_env
    );
}
