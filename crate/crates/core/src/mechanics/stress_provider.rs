//! Sources of the mechanical fields seen by transport: a full FE solve, the
//! analytical plane-strain K-field, or a table of scattered points
//! interpolated piecewise-linearly over a Delaunay triangulation.

use super::boundary_layer::k_field_hydrostatic;
use crate::{Error, Result};

/// Where the transport problem gets `sigma_h`, `eps_p` and `eps_p_rate`.
#[derive(Debug, Clone)]
pub enum StressSource {
    /// Solve the FE mechanics problem every step.
    FeSolve,
    /// Frozen elastic K-field, `eps_p = 0`; `K_I` follows the load ramp.
    AnalyticalKField { nu: f64 },
    /// Scattered-table interpolation, fields frozen in time.
    Imported(ScatteredTable),
}

/// Scattered point data `(x, y) -> (sigma_h, eps_p, eps_p_rate)` with
/// linear interpolation on a Delaunay triangulation of the points.
#[derive(Debug, Clone)]
pub struct ScatteredTable {
    points: Vec<[f64; 2]>,
    values: Vec<[f64; 3]>,
    triangles: Vec<[usize; 3]>,
}

impl ScatteredTable {
    /// Parses whitespace-separated columns `x y sigma_h eps_p [eps_p_rate]`.
    /// Lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        let mut values = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<f64> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| Error::Mesh(format!("stress table line {}: bad number `{t}`", ln + 1)))
                })
                .collect::<Result<_>>()?;
            if cols.len() < 4 {
                return Err(Error::Mesh(format!(
                    "stress table line {}: need at least 4 columns (x y sigma_h eps_p)",
                    ln + 1
                )));
            }
            points.push([cols[0], cols[1]]);
            values.push([cols[2], cols[3], cols.get(4).copied().unwrap_or(0.0)]);
        }
        if points.len() < 3 {
            return Err(Error::Mesh("stress table needs at least 3 points".into()));
        }
        let triangles = delaunay(&points)?;
        Ok(ScatteredTable { points, values, triangles })
    }

    /// Bounding box of the table points.
    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for p in &self.points {
            for d in 0..2 {
                min[d] = min[d].min(p[d]);
                max[d] = max[d].max(p[d]);
            }
        }
        (min, max)
    }

    /// Linear interpolation at a point; errors outside the triangulated hull.
    pub fn interpolate(&self, x: [f64; 2]) -> Result<[f64; 3]> {
        let tol = {
            let (min, max) = self.bounding_box();
            1e-10 * ((max[0] - min[0]).abs() + (max[1] - min[1]).abs() + 1e-300)
        };
        for tri in &self.triangles {
            let [a, b, c] = [self.points[tri[0]], self.points[tri[1]], self.points[tri[2]]];
            let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
            if det.abs() < 1e-300 {
                continue;
            }
            let l1 = ((x[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (x[1] - a[1])) / det;
            let l2 = ((b[0] - a[0]) * (x[1] - a[1]) - (x[0] - a[0]) * (b[1] - a[1])) / det;
            let l0 = 1.0 - l1 - l2;
            if l0 >= -tol && l1 >= -tol && l2 >= -tol {
                let mut out = [0.0; 3];
                for k in 0..3 {
                    out[k] = l0 * self.values[tri[0]][k]
                        + l1 * self.values[tri[1]][k]
                        + l2 * self.values[tri[2]][k];
                }
                return Ok(out);
            }
        }
        Err(Error::OutsideHull { x: x[0], y: x[1] })
    }
}

impl StressSource {
    /// Evaluates the frozen-field providers at a point; `k_i` is the current
    /// stress intensity factor (ignored by the imported table).
    pub fn evaluate(&self, x: [f64; 2], k_i: f64) -> Result<[f64; 3]> {
        match self {
            StressSource::FeSolve => Err(Error::Mesh(
                "FE stress source must be evaluated through the mechanics solve".into(),
            )),
            StressSource::AnalyticalKField { nu } => {
                let r = (x[0] * x[0] + x[1] * x[1]).sqrt().max(1e-300);
                let theta = x[1].atan2(x[0]).clamp(0.0, std::f64::consts::PI);
                Ok([k_field_hydrostatic(k_i, r, theta, *nu), 0.0, 0.0])
            }
            StressSource::Imported(table) => table.interpolate(x),
        }
    }
}

/// Bowyer-Watson Delaunay triangulation. O(n²), adequate for imported
/// tables of up to a few thousand points.
fn delaunay(points: &[[f64; 2]]) -> Result<Vec<[usize; 3]>> {
    let n = points.len();
    let (mut min, mut max) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for d in 0..2 {
            min[d] = min[d].min(p[d]);
            max[d] = max[d].max(p[d]);
        }
    }
    let span = (max[0] - min[0]).max(max[1] - min[1]).max(1e-300);
    let mid = [(min[0] + max[0]) / 2.0, (min[1] + max[1]) / 2.0];

    // super-triangle large enough to contain everything
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.push([mid[0] - 30.0 * span, mid[1] - span]);
    pts.push([mid[0] + 30.0 * span, mid[1] - span]);
    pts.push([mid[0], mid[1] + 30.0 * span]);
    let (s0, s1, s2) = (n, n + 1, n + 2);

    let mut tris: Vec<[usize; 3]> = vec![[s0, s1, s2]];
    for (i, &p) in pts.iter().take(n).enumerate() {
        // triangles whose circumcircle contains p
        let mut bad = Vec::new();
        for (t, tri) in tris.iter().enumerate() {
            if in_circumcircle(&pts, *tri, p) {
                bad.push(t);
            }
        }
        // boundary of the cavity: edges appearing exactly once
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for &t in &bad {
            let tri = tris[t];
            for k in 0..3 {
                let e = (tri[k], tri[(k + 1) % 3]);
                let rev = (e.1, e.0);
                if let Some(pos) = edges.iter().position(|&x| x == rev || x == e) {
                    edges.remove(pos);
                } else {
                    edges.push(e);
                }
            }
        }
        for &t in bad.iter().rev() {
            tris.swap_remove(t);
        }
        for (a, b) in edges {
            tris.push([a, b, i]);
        }
    }
    let mut out: Vec<[usize; 3]> = tris
        .into_iter()
        .filter(|t| t.iter().all(|&v| v < n))
        .collect();
    // normalise orientation (CCW)
    for t in &mut out {
        let [a, b, c] = [pts[t[0]], pts[t[1]], pts[t[2]]];
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        if det < 0.0 {
            t.swap(1, 2);
        }
    }
    if out.is_empty() {
        return Err(Error::Mesh("degenerate stress table (collinear points?)".into()));
    }
    Ok(out)
}

fn in_circumcircle(pts: &[[f64; 2]], tri: [usize; 3], p: [f64; 2]) -> bool {
    let [a, b, c] = [pts[tri[0]], pts[tri[1]], pts[tri[2]]];
    // orientation-corrected incircle determinant
    let orient = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    let (ax, ay) = (a[0] - p[0], a[1] - p[1]);
    let (bx, by) = (b[0] - p[0], b[1] - p[1]);
    let (cx, cy) = (c[0] - p[0], c[1] - p[1]);
    let det = (ax * ax + ay * ay) * (bx * cy - cx * by)
        - (bx * bx + by * by) * (ax * cy - cx * ay)
        + (cx * cx + cy * cy) * (ax * by - bx * ay);
    if orient >= 0.0 {
        det > 0.0
    } else {
        det < 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn analytical_field_decays_and_matches_formula() {
        let src = StressSource::AnalyticalKField { nu: 0.3 };
        let k = 40e6;
        let near = src.evaluate([1e-3, 0.0], k).unwrap()[0];
        let far = src.evaluate([0.5, 0.0], k).unwrap()[0];
        assert!(near > far && far > 0.0);
        let r: f64 = 0.01;
        let expect = 2.0 * 1.3 / 3.0 * k / (2.0 * std::f64::consts::PI * r).sqrt();
        assert_relative_eq!(src.evaluate([r, 0.0], k).unwrap()[0], expect, max_relative = 1e-13);
    }

    #[test]
    fn table_reproduces_constants() {
        let mut text = String::from("# x y sh ep\n");
        for j in 0..5 {
            for i in 0..5 {
                text += &format!("{} {} 7.5 0.01\n", i as f64 * 0.25, j as f64 * 0.25);
            }
        }
        let table = ScatteredTable::parse(&text).unwrap();
        for &p in &[[0.1, 0.1], [0.5, 0.77], [0.99, 0.01], [0.33, 0.66]] {
            let v = table.interpolate(p).unwrap();
            assert_abs_diff_eq!(v[0], 7.5, epsilon = 1e-12);
            assert_abs_diff_eq!(v[1], 0.01, epsilon = 1e-12);
        }
    }

    #[test]
    fn table_reproduces_linear_fields() {
        // linear data is reproduced exactly by piecewise-linear interpolation
        let mut text = String::new();
        // irregular scattered points
        let pts = [
            [0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.31, 0.42],
            [0.75, 0.2], [0.2, 0.8], [0.6, 0.66], [0.9, 0.85], [0.45, 0.1],
        ];
        let f = |p: [f64; 2]| 2.0 * p[0] - 3.0 * p[1] + 0.5;
        for p in pts {
            text += &format!("{} {} {} 0\n", p[0], p[1], f(p));
        }
        let table = ScatteredTable::parse(&text).unwrap();
        for &p in &[[0.5, 0.5], [0.25, 0.3], [0.8, 0.6]] {
            assert_relative_eq!(table.interpolate(p).unwrap()[0], f(p), max_relative = 1e-10);
        }
    }

    #[test]
    fn query_outside_hull_errors() {
        let text = "0 0 1 0\n1 0 1 0\n0 1 1 0\n";
        let table = ScatteredTable::parse(text).unwrap();
        assert!(matches!(
            table.interpolate([2.0, 2.0]),
            Err(Error::OutsideHull { .. })
        ));
    }
}
