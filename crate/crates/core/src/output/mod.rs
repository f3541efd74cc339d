//! CSV output: field snapshots, line-cut extraction along the crack plane
//! or arbitrary segments, and solver statistics. All writers use fixed
//! float formatting so identical runs produce byte-identical files.

use std::fmt::Write as _;

use crate::fem::{sample, transfer_field, FieldLayout, Mesh};
use crate::sim::Snapshot;
use crate::Result;

/// Sample points of a line cut.
#[derive(Debug, Clone)]
pub enum CutPath {
    /// Along the ligament ahead of the notch, log-spaced from the tip
    /// surface to the outer radius.
    CrackPlane { tip_radius: f64, outer_radius: f64, samples: usize },
    Segment { from: [f64; 2], to: [f64; 2], samples: usize },
}

impl CutPath {
    pub fn points(&self) -> Vec<[f64; 2]> {
        match *self {
            CutPath::CrackPlane { tip_radius, outer_radius, samples } => {
                let r0 = tip_radius * (1.0 + 1e-9);
                let r1 = outer_radius * (1.0 - 1e-9);
                let log0 = r0.ln();
                let log1 = r1.ln();
                (0..samples)
                    .map(|i| {
                        let f = i as f64 / (samples - 1) as f64;
                        [(log0 + (log1 - log0) * f).exp(), 0.0]
                    })
                    .collect()
            }
            CutPath::Segment { from, to, samples } => (0..samples)
                .map(|i| {
                    let f = i as f64 / (samples - 1) as f64;
                    [from[0] + (to[0] - from[0]) * f, from[1] + (to[1] - from[1]) * f]
                })
                .collect(),
        }
    }

    /// Distance of each sample from the path origin (the tip surface for
    /// crack-plane cuts).
    pub fn arc_coordinates(&self, points: &[[f64; 2]]) -> Vec<f64> {
        match *self {
            CutPath::CrackPlane { tip_radius, .. } => {
                points.iter().map(|p| p[0] - tip_radius).collect()
            }
            CutPath::Segment { from, .. } => points
                .iter()
                .map(|p| ((p[0] - from[0]).powi(2) + (p[1] - from[1]).powi(2)).sqrt())
                .collect(),
        }
    }
}

/// Samples named nodal fields along a path; returns a CSV table with one
/// distance column and one column per field. Optional normalisation divides
/// the distance by `length_scale` and concentrations by `c_scale`, appended
/// as extra columns.
#[allow(clippy::too_many_arguments)]
pub fn extract_linecut(
    mesh: &Mesh,
    fields: &[(&str, &FieldLayout, &[f64])],
    path: &CutPath,
    normalize: Option<(f64, f64)>,
) -> Result<String> {
    let points = path.points();
    let arc = path.arc_coordinates(&points);
    let mut csv = String::from("r_m");
    for (name, _, _) in fields {
        write!(csv, ",{name}").unwrap();
    }
    if normalize.is_some() {
        csv.push_str(",r_over_b,c_over_cenv");
    }
    csv.push('\n');
    for (k, &p) in points.iter().enumerate() {
        write!(csv, "{:.12e}", arc[k]).unwrap();
        let mut first_val = 0.0;
        for (i, (_, layout, values)) in fields.iter().enumerate() {
            let v = sample(mesh, layout, values, p)?;
            if i == 0 {
                first_val = v;
            }
            write!(csv, ",{v:.12e}").unwrap();
        }
        if let Some((b, c_env)) = normalize {
            write!(csv, ",{:.12e},{:.12e}", arc[k] / b, first_val / c_env).unwrap();
        }
        csv.push('\n');
    }
    Ok(csv)
}

/// Field snapshot on the transport nodes: coordinates, lattice and trapped
/// concentrations, recovered stress and plastic strain, and displacements
/// where available.
pub fn snapshot_csv(
    mesh: &Mesh,
    snap: &Snapshot,
    conc_layout: &FieldLayout,
    mech_layout: &FieldLayout,
    u_layout: Option<&FieldLayout>,
    trap_labels: &[String],
) -> String {
    let sigma = transfer_field(mesh, mech_layout, &snap.sigma_h, conc_layout);
    let eps = transfer_field(mesh, mech_layout, &snap.eps_p, conc_layout);
    let u_cols = match (&snap.u, u_layout) {
        (Some(u), Some(ul)) => {
            let n = ul.n_nodes();
            let ux: Vec<f64> = (0..n).map(|i| u[2 * i]).collect();
            let uy: Vec<f64> = (0..n).map(|i| u[2 * i + 1]).collect();
            Some((
                transfer_field(mesh, ul, &ux, conc_layout),
                transfer_field(mesh, ul, &uy, conc_layout),
            ))
        }
        _ => None,
    };
    let mut csv = String::from("node,x_m,y_m,c_l_mol_per_m3");
    for label in trap_labels {
        write!(csv, ",c_t_{label}_mol_per_m3").unwrap();
    }
    csv.push_str(",sigma_h_Pa,eps_p");
    if u_cols.is_some() {
        csv.push_str(",u_x_m,u_y_m");
    }
    csv.push('\n');
    for i in 0..conc_layout.n_nodes() {
        let p = conc_layout.coords[i];
        write!(csv, "{},{:.12e},{:.12e},{:.12e}", i, p[0], p[1], snap.c_l[i]).unwrap();
        for trap in &snap.c_t {
            write!(csv, ",{:.12e}", trap[i]).unwrap();
        }
        write!(csv, ",{:.12e},{:.12e}", sigma[i], eps[i]).unwrap();
        if let Some((ux, uy)) = &u_cols {
            write!(csv, ",{:.12e},{:.12e}", ux[i], uy[i]).unwrap();
        }
        csv.push('\n');
    }
    csv
}
