//! Straight-sided geometry mapping between reference and physical elements.

use super::element::ElementShape;
use super::mesh::Mesh;

/// Geometry of one mesh element (corner nodes only).
#[derive(Debug, Clone, Copy)]
pub struct Geometry {
    pub shape: ElementShape,
    corners: [[f64; 2]; 4],
}

impl Geometry {
    pub fn of(mesh: &Mesh, elem: usize) -> Self {
        Geometry {
            shape: mesh.elements[elem].shape,
            corners: mesh.corners(elem),
        }
    }

    /// Physical coordinates of a reference point.
    pub fn map(&self, xi: [f64; 2]) -> [f64; 2] {
        let n = geom_shape(self.shape, xi);
        let mut x = [0.0; 2];
        for (k, nk) in n.iter().enumerate() {
            x[0] += nk * self.corners[k][0];
            x[1] += nk * self.corners[k][1];
        }
        x
    }

    /// Jacobian determinant (length scale in 1D, area scale in 2D).
    pub fn det_jacobian(&self, xi: [f64; 2]) -> f64 {
        match self.shape {
            ElementShape::Interval => (self.corners[1][0] - self.corners[0][0]) / 2.0,
            _ => {
                let j = self.jacobian(xi);
                j[0][0] * j[1][1] - j[0][1] * j[1][0]
            }
        }
    }

    /// 2x2 Jacobian dx/dxi (2D shapes only).
    pub fn jacobian(&self, xi: [f64; 2]) -> [[f64; 2]; 2] {
        let dn = geom_grad(self.shape, xi);
        let mut j = [[0.0; 2]; 2];
        for (k, d) in dn.iter().enumerate() {
            j[0][0] += self.corners[k][0] * d[0];
            j[0][1] += self.corners[k][0] * d[1];
            j[1][0] += self.corners[k][1] * d[0];
            j[1][1] += self.corners[k][1] * d[1];
        }
        j
    }

    /// Transforms reference gradients to physical gradients in place.
    pub fn push_gradients(&self, xi: [f64; 2], ref_grads: &[[f64; 2]], out: &mut Vec<[f64; 2]>) {
        out.clear();
        match self.shape {
            ElementShape::Interval => {
                let jinv = 2.0 / (self.corners[1][0] - self.corners[0][0]);
                out.extend(ref_grads.iter().map(|g| [g[0] * jinv, 0.0]));
            }
            _ => {
                let j = self.jacobian(xi);
                let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                let inv = [
                    [j[1][1] / det, -j[0][1] / det],
                    [-j[1][0] / det, j[0][0] / det],
                ];
                // dphi/dx = J^-T dphi/dxi
                out.extend(ref_grads.iter().map(|g| {
                    [
                        inv[0][0] * g[0] + inv[1][0] * g[1],
                        inv[0][1] * g[0] + inv[1][1] * g[1],
                    ]
                }));
            }
        }
    }

    /// Inverse map: reference coordinates of a physical point, or None when
    /// the point lies outside the element (with a small tolerance).
    pub fn invert(&self, x: [f64; 2], tol: f64) -> Option<[f64; 2]> {
        match self.shape {
            ElementShape::Interval => {
                let (x0, x1) = (self.corners[0][0], self.corners[1][0]);
                let xi = 2.0 * (x[0] - x0) / (x1 - x0) - 1.0;
                ((-1.0 - tol)..=(1.0 + tol)).contains(&xi).then_some([xi.clamp(-1.0, 1.0), 0.0])
            }
            ElementShape::Triangle => {
                let [p0, p1, p2] = [self.corners[0], self.corners[1], self.corners[2]];
                let det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
                let l1 = ((x[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (x[1] - p0[1])) / det;
                let l2 = ((p1[0] - p0[0]) * (x[1] - p0[1]) - (x[0] - p0[0]) * (p1[1] - p0[1])) / det;
                let inside =
                    l1 >= -tol && l2 >= -tol && l1 + l2 <= 1.0 + tol;
                inside.then_some([l1.clamp(0.0, 1.0), l2.clamp(0.0, 1.0)])
            }
            ElementShape::Quad => {
                // Newton on the bilinear map
                let mut xi = [0.0, 0.0];
                for _ in 0..30 {
                    let f = self.map(xi);
                    let r = [f[0] - x[0], f[1] - x[1]];
                    if r[0].abs() + r[1].abs() < 1e-13 * self.scale() {
                        break;
                    }
                    let j = self.jacobian(xi);
                    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                    xi[0] -= (j[1][1] * r[0] - j[0][1] * r[1]) / det;
                    xi[1] -= (-j[1][0] * r[0] + j[0][0] * r[1]) / det;
                }
                let inside = xi[0].abs() <= 1.0 + tol && xi[1].abs() <= 1.0 + tol;
                inside.then_some([xi[0].clamp(-1.0, 1.0), xi[1].clamp(-1.0, 1.0)])
            }
        }
    }

    fn scale(&self) -> f64 {
        let c = &self.corners;
        ((c[2][0] - c[0][0]).abs() + (c[2][1] - c[0][1]).abs()).max(1e-300)
    }

    /// Length of a (straight) edge.
    pub fn edge_length(&self, edge: usize) -> f64 {
        let (a, b) = self.shape.edges()[edge];
        let pa = self.corners[a];
        let pb = self.corners[b];
        ((pa[0] - pb[0]).powi(2) + (pa[1] - pb[1]).powi(2)).sqrt()
    }

    /// Outward-ish tangent points along the edge from its first corner to
    /// its second; reference coordinates of the edge point at parameter
    /// `t in [-1, 1]`.
    pub fn edge_ref_point(&self, edge: usize, t: f64) -> [f64; 2] {
        let (a, b) = self.shape.edges()[edge];
        let corners = self.shape.corner_ref_positions();
        let pa = corners[a];
        let pb = corners[b];
        let s = 0.5 * (t + 1.0);
        [pa[0] + (pb[0] - pa[0]) * s, pa[1] + (pb[1] - pa[1]) * s]
    }

    /// Unit outward normal of a boundary edge (2D; assumes CCW elements).
    pub fn edge_normal(&self, edge: usize) -> [f64; 2] {
        let (a, b) = self.shape.edges()[edge];
        let pa = self.corners[a];
        let pb = self.corners[b];
        let tx = pb[0] - pa[0];
        let ty = pb[1] - pa[1];
        let len = (tx * tx + ty * ty).sqrt();
        [ty / len, -tx / len]
    }
}

fn geom_shape(shape: ElementShape, xi: [f64; 2]) -> Vec<f64> {
    match shape {
        ElementShape::Interval => vec![(1.0 - xi[0]) / 2.0, (1.0 + xi[0]) / 2.0],
        ElementShape::Triangle => vec![1.0 - xi[0] - xi[1], xi[0], xi[1]],
        ElementShape::Quad => {
            let (x, y) = (xi[0], xi[1]);
            vec![
                (1.0 - x) * (1.0 - y) / 4.0,
                (1.0 + x) * (1.0 - y) / 4.0,
                (1.0 + x) * (1.0 + y) / 4.0,
                (1.0 - x) * (1.0 + y) / 4.0,
            ]
        }
    }
}

fn geom_grad(shape: ElementShape, xi: [f64; 2]) -> Vec<[f64; 2]> {
    match shape {
        ElementShape::Interval => vec![[-0.5, 0.0], [0.5, 0.0]],
        ElementShape::Triangle => vec![[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]],
        ElementShape::Quad => {
            let (x, y) = (xi[0], xi[1]);
            vec![
                [-(1.0 - y) / 4.0, -(1.0 - x) / 4.0],
                [(1.0 - y) / 4.0, -(1.0 + x) / 4.0],
                [(1.0 + y) / 4.0, (1.0 + x) / 4.0],
                [-(1.0 + y) / 4.0, (1.0 - x) / 4.0],
            ]
        }
    }
}
