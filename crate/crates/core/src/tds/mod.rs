//! Thermal desorption spectroscopy: a 1D half-slab desorbing through one
//! face while the temperature ramps linearly, with Arrhenius lattice
//! diffusivity and trap kinetics. Reuses the transport kernels through the
//! coupled driver with a zero stress field.

use crate::boundary::{GasEquilibriumSpec, Insulation};
use crate::fem::{build_interval_mesh, DofMap, FieldSpec};
use crate::mechanics::{BoundaryLayerLoad, StressSource};
use crate::sim::{Simulation, Transport};
use crate::solver::StepController;
use crate::transport::{
    BcKind, ClProblem, LatticeParams, OccupancyVariant, ThermalSchedule, TransportBc, TrapSpec,
};
use crate::Result;

/// Arrhenius coefficient `x0 exp(-e / (R T))`.
pub fn arrhenius(temperature: f64, pre_exponential: f64, activation_energy: f64) -> f64 {
    pre_exponential * (-activation_energy / (crate::constants::GAS_CONSTANT * temperature)).exp()
}

/// A thermal desorption run definition. All energies in J/mol (converted
/// from eV on ingestion), concentrations in mol/m³.
#[derive(Debug, Clone)]
pub struct TdsConfig {
    /// Full slab thickness `d` \[m\]; half is simulated with symmetry.
    pub thickness: f64,
    pub n_elements: usize,
    /// Element-size ratio last/first; < 1 refines toward the desorbing
    /// surface.
    pub grading: f64,
    /// Interpolation order of the concentration (and auxiliary) fields.
    pub conc_order: u8,
    /// Start temperature \[K\].
    pub t0: f64,
    /// Heating rate \[K/s\].
    pub phi: f64,
    /// End temperature \[K\].
    pub t_end: f64,
    /// Uniform initial lattice concentration \[mol/m³\].
    pub c_l0: f64,
    /// Pre-exponential lattice diffusivity \[m²/s\] and activation energy.
    pub d_l0: f64,
    pub e_l: f64,
    pub n_l: f64,
    pub traps: Vec<TrapSpec>,
    /// Initialise traps in equilibrium with `c_l0` at `t0` (otherwise empty).
    pub traps_in_equilibrium: bool,
    /// Include the detrapping source from `dK_T/dT` in Oriani mode.
    pub dct_dt_term: bool,
    pub controller: StepController,
    /// Temperature interval between spectrum samples \[K\].
    pub sample_dt: f64,
}

impl TdsConfig {
    pub fn legrand_like(traps: Vec<TrapSpec>) -> Self {
        TdsConfig {
            thickness: 4e-3,
            n_elements: 1000,
            grading: 0.02,
            conc_order: 2,
            t0: 10.0,
            phi: 50.0 / 60.0,
            t_end: 800.0,
            c_l0: 1.0,
            d_l0: 2.74e-6,
            e_l: 0.2 * crate::constants::EV_PER_MOL,
            n_l: 2.1e5,
            traps,
            traps_in_equilibrium: true,
            dct_dt_term: true,
            controller: StepController {
                order: 2,
                dt_init: 1e-2,
                dt_min: 1e-10,
                dt_max: 10.0,
                rel_tol: 1e-4,
                ..Default::default()
            },
            sample_dt: 1.0,
        }
    }
}

/// Sampled desorption history at uniform temperature intervals.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub temperature: Vec<f64>,
    pub time: Vec<f64>,
    /// Domain-average total hydrogen \[mol/m³\].
    pub total: Vec<f64>,
    pub lattice: Vec<f64>,
    /// Per-trap domain averages, one series per trap.
    pub per_trap: Vec<Vec<f64>>,
    /// Desorption rate `-d(total)/dt` \[mol/m³/s\].
    pub desorption_rate: Vec<f64>,
}

impl Spectrum {
    /// Temperature of the maximum desorption rate above `t_min`.
    pub fn peak_temperature(&self, t_min: f64) -> f64 {
        let mut best = (f64::NEG_INFINITY, self.temperature[0]);
        for i in 0..self.temperature.len() {
            if self.temperature[i] >= t_min && self.desorption_rate[i] > best.0 {
                best = (self.desorption_rate[i], self.temperature[i]);
            }
        }
        best.1
    }

    /// Temperature of the maximum release rate of one trap.
    pub fn trap_peak_temperature(&self, trap: usize) -> f64 {
        let series = &self.per_trap[trap];
        let mut best = (f64::NEG_INFINITY, self.temperature[0]);
        for i in 1..series.len() {
            let dt = self.time[i] - self.time[i - 1];
            let rate = -(series[i] - series[i - 1]) / dt;
            if rate > best.0 {
                best = (rate, self.temperature[i]);
            }
        }
        best.1
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("T_K,t_s,c_total_mol_per_m3,c_lattice_mol_per_m3");
        for k in 0..self.per_trap.len() {
            s.push_str(&format!(",c_trap{}_mol_per_m3", k + 1));
        }
        s.push_str(",desorption_rate_mol_per_m3_s\n");
        for i in 0..self.temperature.len() {
            s.push_str(&format!(
                "{:.6e},{:.6e},{:.12e},{:.12e}",
                self.temperature[i], self.time[i], self.total[i], self.lattice[i]
            ));
            for series in &self.per_trap {
                s.push_str(&format!(",{:.12e}", series[i]));
            }
            s.push_str(&format!(",{:.12e}\n", self.desorption_rate[i]));
        }
        s
    }
}

/// Runs one TDS simulation and samples the spectrum every
/// `config.sample_dt` kelvin.
pub fn run_tds(config: &TdsConfig) -> Result<Spectrum> {
    let mesh = build_interval_mesh(config.thickness / 2.0, config.n_elements, config.grading)?;
    let dofs = DofMap::new(
        &mesh,
        &[
            FieldSpec::scalar("c", config.conc_order),
            FieldSpec::scalar("sigma_h", 1),
        ],
    )?;
    let lattice = LatticeParams::new(config.d_l0, 0.0, config.n_l, config.t0);
    let thermal = ThermalSchedule::Ramp {
        t0: config.t0,
        phi: config.phi,
        d0: config.d_l0,
        e_l: config.e_l,
    };
    let bcs = vec![
        TransportBc {
            tag: "surface".into(),
            kind: BcKind::Dirichlet(GasEquilibriumSpec::constant(0.0)),
        },
        TransportBc {
            tag: "symmetry".into(),
            kind: BcKind::Insulated(Insulation::Consistent),
        },
    ];
    let problem = ClProblem {
        mesh: &mesh,
        dofs: &dofs,
        field: 0,
        mech_field: 1,
        lattice,
        thermal,
        traps: config.traps.clone(),
        variant: OccupancyVariant::Kt,
        krom: false,
        dct_dt_term: config.dct_dt_term,
        option1_strain_term: false,
        dislocation: None,
        bcs,
        source: None,
        newton_tol: 1e-8,
        max_newton: 25,
    };

    let mut sim = Simulation::new(
        &mesh,
        &dofs,
        None,
        StressSource::AnalyticalKField { nu: 0.3 },
        BoundaryLayerLoad { k_max: 0.0, t_load: 1.0 },
        Transport::Cl(problem),
        config.controller.clone(),
        false,
        config.c_l0,
        config.traps_in_equilibrium,
    )?;

    let t_total = (config.t_end - config.t0) / config.phi;
    let n_samples = ((config.t_end - config.t0) / config.sample_dt).floor() as usize;
    let sample_times: Vec<f64> = (1..=n_samples)
        .map(|k| k as f64 * config.sample_dt / config.phi)
        .collect();

    let mut temperature = vec![config.t0];
    let mut time = vec![0.0];
    let (mut total, mut lattice_series, mut per_trap) = sample_inventory(&sim);
    let mut totals = vec![total];
    let mut lattices = vec![lattice_series];
    let mut traps_series: Vec<Vec<f64>> = per_trap.iter().map(|&v| vec![v]).collect();

    sim.run_to(t_total, &sample_times, |s, is_output| {
        if is_output {
            temperature.push(config.t0 + config.phi * s.t);
            time.push(s.t);
            let (tot, lat, traps) = sample_inventory(s);
            totals.push(tot);
            lattices.push(lat);
            for (series, v) in traps_series.iter_mut().zip(&traps) {
                series.push(*v);
            }
            total = tot;
            lattice_series = lat;
            per_trap = traps;
        }
        Ok(())
    })?;

    // desorption rate by central differences on the sampled series
    let n = totals.len();
    let mut rate = vec![0.0; n];
    for i in 0..n {
        let (i0, i1) = if i == 0 {
            (0, 1.min(n - 1))
        } else if i == n - 1 {
            (n - 2, n - 1)
        } else {
            (i - 1, i + 1)
        };
        let dt = time[i1] - time[i0];
        if dt > 0.0 {
            rate[i] = -(totals[i1] - totals[i0]) / dt;
        }
    }

    Ok(Spectrum {
        temperature,
        time,
        total: totals,
        lattice: lattices,
        per_trap: traps_series,
        desorption_rate: rate,
    })
}

/// Domain-average inventory `(total, lattice, per trap)`.
fn sample_inventory(sim: &Simulation) -> (f64, f64, Vec<f64>) {
    match &sim.transport {
        Transport::Cl(p) => {
            let kin = p.kinetic_traps();
            let trap_now: Vec<nalgebra::DVector<f64>> = sim
                .state
                .trap_fields
                .iter()
                .map(|h| h.current().clone())
                .collect();
            // inventory expects only kinetic aux fields, ordered by slot
            let _ = &kin;
            let (tot, lat, per) = p.hydrogen_inventory(
                sim.state.conc.current(),
                &trap_now,
                &sim.mech_fields[0].eps_p,
                sim.t,
            );
            let vol = p.volume();
            (
                tot / vol,
                lat / vol,
                per.iter().map(|v| v / vol).collect(),
            )
        }
        Transport::Mu(_) => unreachable!("TDS runs use the concentration form"),
    }
}
