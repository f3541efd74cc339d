//! Executes a validated [`RunConfig`]: builds the mesh, dof map and
//! problems, runs the simulation (or the TDS driver) and collects the
//! output artifacts as named CSV documents.

use crate::config::{
    BoundaryKindConfig, FormulationConfig, GeometryConfig, LineCutConfig, RunConfig,
    StressSourceConfig, TdsBlockConfig,
};
use crate::fem::{build_boundary_layer_mesh, build_interval_mesh, DofMap, FieldSpec, Mesh};
use crate::mechanics::{BoundaryLayerLoad, MechModel, ScatteredTable, StressSource};
use crate::output::{extract_linecut, snapshot_csv, CutPath};
use crate::sim::{Simulation, Transport};
use crate::tds::{run_tds, TdsConfig};
use crate::transport::{
    BcKind, ClProblem, LatticeParams, MuProblem, ThermalSchedule, TransportBc,
};
use crate::{Error, Result};

/// Named output documents produced by a run.
#[derive(Debug, Default)]
pub struct RunArtifacts {
    pub files: Vec<(String, String)>,
    /// Final-state summary line for the terminal.
    pub summary: String,
}

pub fn execute(config: &RunConfig) -> Result<RunArtifacts> {
    if config.tds.is_some() {
        execute_tds(config)
    } else {
        execute_crack(config)
    }
}

fn build_mesh(config: &RunConfig) -> Result<Mesh> {
    match &config.geometry {
        GeometryConfig::BoundaryLayer { outer_radius, tip_opening, refinement } => {
            build_boundary_layer_mesh(*outer_radius, *tip_opening, *refinement)
        }
        GeometryConfig::Interval { length, elements, grading } => {
            build_interval_mesh(*length, *elements, *grading)
        }
        GeometryConfig::Import { path } => Mesh::read_file(std::path::Path::new(path)),
    }
}

fn execute_tds(config: &RunConfig) -> Result<RunArtifacts> {
    let tds_block: &TdsBlockConfig = config.tds.as_ref().unwrap();
    let GeometryConfig::Interval { length, elements, grading } = &config.geometry else {
        return Err(Error::Config(vec![
            "[tds] runs require interval geometry".to_string()
        ]));
    };
    let tds = TdsConfig {
        thickness: 2.0 * length,
        n_elements: *elements,
        grading: *grading,
        conc_order: config.transport.concentration_order,
        t0: tds_block.t0,
        phi: tds_block.phi,
        t_end: tds_block.t_end,
        c_l0: tds_block.c_l0,
        d_l0: tds_block.d_l0,
        e_l: tds_block.e_l,
        n_l: config.lattice.n_l,
        traps: config.traps.iter().map(|t| t.spec.clone()).collect(),
        traps_in_equilibrium: config.transport.traps_in_equilibrium,
        dct_dt_term: true,
        controller: config.solver.controller.clone(),
        sample_dt: tds_block.sample_dt,
    };
    let spectrum = run_tds(&tds)?;
    let summary = format!(
        "TDS run `{}`: {} samples, final total H {:.4e} mol/m³",
        config.name,
        spectrum.temperature.len(),
        spectrum.total.last().unwrap()
    );
    Ok(RunArtifacts {
        files: vec![("spectrum.csv".to_string(), spectrum.to_csv())],
        summary,
    })
}

fn execute_crack(config: &RunConfig) -> Result<RunArtifacts> {
    let mesh = build_mesh(config)?;
    let loading = config.loading.as_ref().ok_or_else(|| {
        Error::Config(vec!["[loading] block required for crack runs".to_string()])
    })?;

    let use_fe = loading.stress_source == StressSourceConfig::Fe;
    // recovered-stress field: linear alongside FE displacements (stable
    // combination), matching the concentration order for frozen sources
    let sh_order = if use_fe { 1 } else { config.transport.concentration_order };

    let mut fields = Vec::new();
    if use_fe {
        let m = config.material.as_ref().unwrap();
        fields.push(FieldSpec::vector("u", m.displacement_order, 2));
    }
    fields.push(FieldSpec::scalar("sigma_h", sh_order));
    fields.push(FieldSpec::scalar("c", config.transport.concentration_order));
    let dofs = DofMap::new(&mesh, &fields)?;
    let (u_field, mech_field, conc_field) = if use_fe { (0, 1, 2) } else { (0, 0, 1) };

    let load = BoundaryLayerLoad { k_max: loading.k_max, t_load: loading.t_load };

    let mech_model = if use_fe {
        let m = config.material.as_ref().unwrap();
        Some(MechModel {
            mesh: &mesh,
            dofs: &dofs,
            u_field,
            params: m.params,
            bbar: m.bbar,
            load,
            remote_tag: "remote".into(),
            symmetry_tag: "symmetry".into(),
            newton_tol: config.solver.controller.newton_tol,
            max_newton: config.solver.controller.max_newton,
        })
    } else {
        None
    };

    let stress_source = match &loading.stress_source {
        StressSourceConfig::Fe => StressSource::FeSolve,
        StressSourceConfig::Analytical => StressSource::AnalyticalKField {
            nu: config.material.as_ref().map(|m| m.params.nu).unwrap_or(0.3),
        },
        StressSourceConfig::Table { path } => {
            let text = std::fs::read_to_string(path)?;
            StressSource::Imported(ScatteredTable::parse(&text)?)
        }
    };

    let lattice = LatticeParams::new(
        config.lattice.d_l,
        config.lattice.v_h,
        config.lattice.n_l,
        config.lattice.temperature,
    );
    let bcs: Vec<TransportBc> = config
        .boundaries
        .iter()
        .map(|b| TransportBc {
            tag: b.tag.clone(),
            kind: match &b.kind {
                BoundaryKindConfig::Dirichlet(s) => BcKind::Dirichlet(*s),
                BoundaryKindConfig::Her(s) => BcKind::Her(*s),
                BoundaryKindConfig::Insulated(i) => BcKind::Insulated(*i),
            },
        })
        .collect();
    // untagged boundaries default to consistent insulation (natural BC)
    let traps: Vec<_> = config.traps.iter().map(|t| t.spec.clone()).collect();

    let transport = match config.transport.formulation {
        FormulationConfig::Cl => Transport::Cl(ClProblem {
            mesh: &mesh,
            dofs: &dofs,
            field: conc_field,
            mech_field,
            lattice,
            thermal: ThermalSchedule::Isothermal,
            traps,
            variant: config.transport.variant,
            krom: config.transport.krom,
            dct_dt_term: true,
            option1_strain_term: config.transport.option1_strain_term,
            dislocation: config.transport.dislocation,
            bcs,
            source: None,
            newton_tol: config.solver.controller.newton_tol,
            max_newton: config.solver.controller.max_newton,
        }),
        FormulationConfig::Mu => Transport::Mu(MuProblem {
            mesh: &mesh,
            dofs: &dofs,
            field: conc_field,
            mech_field,
            lattice,
            thermal: ThermalSchedule::Isothermal,
            traps,
            variant: config.transport.variant,
            krom: config.transport.krom,
            option1_strain_term: config.transport.option1_strain_term,
            bcs,
            newton_tol: config.solver.controller.newton_tol,
            max_newton: config.solver.controller.max_newton,
        }),
    };

    let c0 = config.initial_concentration();
    let mut sim = Simulation::new(
        &mesh,
        &dofs,
        mech_model,
        stress_source,
        load,
        transport,
        config.solver.controller.clone(),
        config.transport.clamp,
        c0,
        config.transport.traps_in_equilibrium,
    )?;

    let mut artifacts = RunArtifacts::default();
    let tip_radius = match &config.geometry {
        GeometryConfig::BoundaryLayer { tip_opening, .. } => tip_opening / 2.0,
        _ => 0.0,
    };
    let outer_radius = match &config.geometry {
        GeometryConfig::BoundaryLayer { outer_radius, .. } => *outer_radius,
        _ => 0.0,
    };
    let c_env_for_norm = c0.max(1e-300);

    let mut files: Vec<(String, String)> = Vec::new();
    {
        let write_fields = config.output.fields;
        let linecuts = config.output.linecuts.clone();
        let trap_labels: Vec<String> =
            config.traps.iter().map(|t| t.spec.label.clone()).collect();
        sim.run_to(loading.t_end, &config.output.times, |s, is_output| {
            if !is_output {
                return Ok(());
            }
            let snap = s.snapshot();
            let tag = format!("{:.6e}", snap.t);
            if write_fields {
                let csv = snapshot_csv(
                    s.mesh,
                    &snap,
                    s.dofs.field(conc_field),
                    s.dofs.field(mech_field),
                    if use_fe { Some(s.dofs.field(u_field)) } else { None },
                    &trap_labels,
                );
                files.push((format!("fields_t{tag}.csv"), csv));
            }
            for (k, cut) in linecuts.iter().enumerate() {
                let (path, normalize) = match cut {
                    LineCutConfig::CrackPlane { samples, normalize } => (
                        CutPath::CrackPlane {
                            tip_radius,
                            outer_radius,
                            samples: *samples,
                        },
                        *normalize,
                    ),
                    LineCutConfig::Segment { from, to, samples, normalize } => (
                        CutPath::Segment { from: *from, to: *to, samples: *samples },
                        *normalize,
                    ),
                };
                // current tip opening for the normalisation
                let b = current_tip_opening(s, tip_radius, u_field, use_fe);
                let conc_layout = s.dofs.field(conc_field);
                let mech_layout = s.dofs.field(mech_field);
                let mut field_list: Vec<(&str, &crate::fem::FieldLayout, &[f64])> = Vec::new();
                let cl = snap.c_l.clone();
                field_list.push(("c_l_mol_per_m3", conc_layout, &cl));
                for (ti, trap) in snap.c_t.iter().enumerate() {
                    // leak per-trap labels through indices to keep borrows simple
                    let _ = ti;
                    field_list.push(("c_t_mol_per_m3", conc_layout, trap));
                }
                field_list.push(("sigma_h_Pa", mech_layout, &snap.sigma_h));
                field_list.push(("eps_p", mech_layout, &snap.eps_p));
                let norm = normalize.then_some((b, c_env_for_norm));
                let csv = extract_linecut(s.mesh, &field_list, &path, norm)?;
                files.push((format!("linecut{k}_t{tag}.csv"), csv));
            }
            Ok(())
        })?;
    }

    if config.output.stats {
        files.push(("stats.csv".to_string(), sim.stats.to_csv()));
    }
    artifacts.summary = format!(
        "run `{}`: {} accepted / {} rejected steps, {} Newton iterations, clamped mass {:.3e}",
        config.name,
        sim.stats.accepted_steps,
        sim.stats.rejected_steps,
        sim.stats.newton_total(),
        sim.stats.total_clamped_mass(),
    );
    artifacts.files = files;
    Ok(artifacts)
}

/// Current crack-tip opening `b = b0 + 2 u_y` at the notch crown.
fn current_tip_opening(sim: &Simulation, tip_radius: f64, u_field: usize, use_fe: bool) -> f64 {
    let b0 = 2.0 * tip_radius;
    if !use_fe || tip_radius <= 0.0 {
        return b0.max(1e-300);
    }
    let layout = sim.dofs.field(u_field);
    // nearest displacement node to the notch crown (0, r0)
    let mut best = (f64::INFINITY, 0usize);
    for (i, p) in layout.coords.iter().enumerate() {
        let d = (p[0]).powi(2) + (p[1] - tip_radius).powi(2);
        if d < best.0 {
            best = (d, i);
        }
    }
    let uy = sim.u[2 * best.1 + 1];
    (b0 + 2.0 * uy).max(b0 * 0.1)
}
