//! Reference elements: Lagrange shape functions, quadrature rules and the
//! local node layout shared by the mesh and the dof map.
//!
//! Node layout convention for a family of order `p`:
//! corners first, then `p - 1` interior nodes per edge (in edge order,
//! oriented from the edge's first corner to its second), then cell-interior
//! nodes. Reference domains: interval `[-1, 1]`, unit triangle
//! `(0,0)-(1,0)-(0,1)`, quadrilateral `[-1, 1]²`.

use crate::{Error, Result};

/// Geometric shape of an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementShape {
    Interval,
    Triangle,
    Quad,
}

impl ElementShape {
    pub fn dim(self) -> usize {
        match self {
            ElementShape::Interval => 1,
            ElementShape::Triangle | ElementShape::Quad => 2,
        }
    }

    pub fn corner_count(self) -> usize {
        match self {
            ElementShape::Interval => 2,
            ElementShape::Triangle => 3,
            ElementShape::Quad => 4,
        }
    }

    /// Edges as pairs of local corner indices. For intervals the "edges"
    /// degenerate to the two endpoints.
    pub fn edges(self) -> &'static [(usize, usize)] {
        match self {
            ElementShape::Interval => &[(0, 0), (1, 1)],
            ElementShape::Triangle => &[(0, 1), (1, 2), (2, 0)],
            ElementShape::Quad => &[(0, 1), (1, 2), (2, 3), (3, 0)],
        }
    }

    pub fn corner_ref_positions(self) -> &'static [[f64; 2]] {
        match self {
            ElementShape::Interval => &[[-1.0, 0.0], [1.0, 0.0]],
            ElementShape::Triangle => &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            ElementShape::Quad => &[[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementShape::Interval => "interval",
            ElementShape::Triangle => "triangle",
            ElementShape::Quad => "quad",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "interval" => Ok(ElementShape::Interval),
            "triangle" => Ok(ElementShape::Triangle),
            "quad" | "quadrilateral" => Ok(ElementShape::Quad),
            other => Err(Error::Mesh(format!("unknown element shape `{other}`"))),
        }
    }
}

/// A Lagrange interpolation space on a reference shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ElementFamily {
    pub shape: ElementShape,
    pub order: u8,
}

impl ElementFamily {
    pub fn new(shape: ElementShape, order: u8) -> Result<Self> {
        if !(1..=3).contains(&order) {
            return Err(Error::Mesh(format!(
                "unsupported interpolation order {order} (supported: 1, 2, 3)"
            )));
        }
        Ok(ElementFamily { shape, order })
    }

    pub fn node_count(&self) -> usize {
        let p = self.order as usize;
        match self.shape {
            ElementShape::Interval => p + 1,
            ElementShape::Triangle => (p + 1) * (p + 2) / 2,
            ElementShape::Quad => (p + 1) * (p + 1),
        }
    }

    pub fn interior_node_count(&self) -> usize {
        let p = self.order as usize;
        match self.shape {
            ElementShape::Interval => p - 1,
            ElementShape::Triangle => {
                if p == 3 {
                    1
                } else {
                    0
                }
            }
            ElementShape::Quad => (p - 1) * (p - 1),
        }
    }

    /// Local indices of the nodes on edge `edge`, ordered from the edge's
    /// first corner to its second (corners included).
    pub fn edge_local_nodes(&self, edge: usize) -> Vec<usize> {
        let (a, b) = self.shape.edges()[edge];
        if self.shape == ElementShape::Interval {
            return vec![a];
        }
        let p = self.order as usize;
        let nc = self.shape.corner_count();
        let mut nodes = Vec::with_capacity(p + 1);
        nodes.push(a);
        for k in 0..p - 1 {
            nodes.push(nc + edge * (p - 1) + k);
        }
        nodes.push(b);
        nodes
    }

    /// Reference positions of all local nodes in layout order.
    pub fn ref_nodes(&self) -> Vec<[f64; 2]> {
        let p = self.order as usize;
        let corners = self.shape.corner_ref_positions();
        let mut nodes: Vec<[f64; 2]> = corners.to_vec();
        if self.shape == ElementShape::Interval {
            for k in 1..p {
                let t = -1.0 + 2.0 * k as f64 / p as f64;
                nodes.push([t, 0.0]);
            }
            return nodes;
        }
        // Edge interior nodes.
        for &(a, b) in self.shape.edges() {
            let pa = corners[a];
            let pb = corners[b];
            for k in 1..p {
                let t = k as f64 / p as f64;
                nodes.push([pa[0] + (pb[0] - pa[0]) * t, pa[1] + (pb[1] - pa[1]) * t]);
            }
        }
        // Cell interior nodes.
        match self.shape {
            ElementShape::Triangle => {
                if p == 3 {
                    nodes.push([1.0 / 3.0, 1.0 / 3.0]);
                }
            }
            ElementShape::Quad => {
                let line = interval_nodes_1d(p);
                for j in 1..p {
                    for i in 1..p {
                        nodes.push([line[i], line[j]]);
                    }
                }
            }
            ElementShape::Interval => unreachable!(),
        }
        nodes
    }

    /// Shape function values at a reference point, in node layout order.
    pub fn shape_at(&self, xi: [f64; 2]) -> Vec<f64> {
        match self.shape {
            ElementShape::Interval => {
                let pts = interval_nodes_for_layout(self.order as usize);
                pts.iter()
                    .enumerate()
                    .map(|(i, _)| lagrange_1d(&pts, i, xi[0]))
                    .collect()
            }
            ElementShape::Quad => {
                let line = interval_nodes_1d(self.order as usize);
                self.ref_nodes()
                    .iter()
                    .map(|n| {
                        let a = index_in(&line, n[0]);
                        let b = index_in(&line, n[1]);
                        lagrange_1d(&line, a, xi[0]) * lagrange_1d(&line, b, xi[1])
                    })
                    .collect()
            }
            ElementShape::Triangle => triangle_shape(self.order, xi).0,
        }
    }

    /// Reference-space gradients at a reference point, node layout order.
    pub fn grad_at(&self, xi: [f64; 2]) -> Vec<[f64; 2]> {
        match self.shape {
            ElementShape::Interval => {
                let pts = interval_nodes_for_layout(self.order as usize);
                pts.iter()
                    .enumerate()
                    .map(|(i, _)| [lagrange_1d_deriv(&pts, i, xi[0]), 0.0])
                    .collect()
            }
            ElementShape::Quad => {
                let line = interval_nodes_1d(self.order as usize);
                self.ref_nodes()
                    .iter()
                    .map(|n| {
                        let a = index_in(&line, n[0]);
                        let b = index_in(&line, n[1]);
                        [
                            lagrange_1d_deriv(&line, a, xi[0]) * lagrange_1d(&line, b, xi[1]),
                            lagrange_1d(&line, a, xi[0]) * lagrange_1d_deriv(&line, b, xi[1]),
                        ]
                    })
                    .collect()
            }
            ElementShape::Triangle => triangle_shape(self.order, xi).1,
        }
    }

    /// Quadrature rule for this family: 2/3/4-point Gauss-Legendre per
    /// direction for orders 1/2/3 (tensorised on quads), matching-degree
    /// symmetric rules on triangles. Degree is at least twice the
    /// interpolation order in every case.
    pub fn quadrature(&self) -> Quadrature {
        quadrature_for(self.shape, self.order)
    }
}

/// A quadrature rule on the reference element.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Gauss-Legendre points/weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    match n {
        1 => (vec![0.0], vec![2.0]),
        2 => {
            let a = 1.0 / 3f64.sqrt();
            (vec![-a, a], vec![1.0, 1.0])
        }
        3 => {
            let a = (3.0 / 5.0f64).sqrt();
            (vec![-a, 0.0, a], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
        }
        4 => {
            let a = 0.3399810435848563;
            let b = 0.8611363115940526;
            let wa = 0.6521451548625461;
            let wb = 0.3478548451374538;
            (vec![-b, -a, a, b], vec![wb, wa, wa, wb])
        }
        _ => panic!("gauss_legendre supports 1..=4 points"),
    }
}

pub fn quadrature_for(shape: ElementShape, order: u8) -> Quadrature {
    let n = order as usize + 1; // 2, 3, 4 points per direction
    match shape {
        ElementShape::Interval => {
            let (x, w) = gauss_legendre(n);
            Quadrature {
                points: x.iter().map(|&xi| [xi, 0.0]).collect(),
                weights: w,
            }
        }
        ElementShape::Quad => {
            let (x, w) = gauss_legendre(n);
            let mut points = Vec::with_capacity(n * n);
            let mut weights = Vec::with_capacity(n * n);
            for j in 0..n {
                for i in 0..n {
                    points.push([x[i], x[j]]);
                    weights.push(w[i] * w[j]);
                }
            }
            Quadrature { points, weights }
        }
        ElementShape::Triangle => triangle_quadrature(order),
    }
}

/// Symmetric triangle rules of degree 2, 4 and 6 for interpolation orders
/// 1, 2 and 3. Weights sum to the reference area 1/2.
fn triangle_quadrature(order: u8) -> Quadrature {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    fn orbit3(points: &mut Vec<[f64; 2]>, weights: &mut Vec<f64>, a: f64, w: f64) {
        // permutations of barycentric (1-2a, a, a)
        let c = 1.0 - 2.0 * a;
        points.push([a, a]);
        points.push([c, a]);
        points.push([a, c]);
        for _ in 0..3 {
            weights.push(w * 0.5);
        }
    }
    fn orbit6(points: &mut Vec<[f64; 2]>, weights: &mut Vec<f64>, a: f64, b: f64, w: f64) {
        let c = 1.0 - a - b;
        for (x, y) in [(a, b), (b, a), (a, c), (c, a), (b, c), (c, b)] {
            points.push([x, y]);
            weights.push(w * 0.5);
        }
    }
    match order {
         1 => {
            // degree 2, 3 points
            orbit3(&mut points, &mut weights, 1.0 / 6.0, 1.0 / 3.0);
        }
        2 => {
            // degree 4, 6 points (Dunavant)
            orbit3(&mut points, &mut weights, 0.445948490915965, 0.223381589678011);
            orbit3(&mut points, &mut weights, 0.091576213509771, 0.109951743655322);
        }
        3 => {
            // degree 6, 12 points (Dunavant)
            orbit3(&mut points, &mut weights, 0.063089014491502, 0.050844906370207);
            orbit3(&mut points, &mut weights, 0.249286745170910, 0.116786275726379);
            orbit6(
                &mut points,
                &mut weights,
                0.310352451033785,
                0.053145049844816,
                0.082851075618374,
            );
        }
        _ => panic!("triangle quadrature supports orders 1..=3"),
    }
    Quadrature { points, weights }
}

/// 1D node set `{-1 .. 1}` in coordinate order, used for quad tensor bases.
fn interval_nodes_1d(p: usize) -> Vec<f64> {
    (0..=p).map(|k| -1.0 + 2.0 * k as f64 / p as f64).collect()
}

/// 1D node set in layout order (corners first, then interiors).
fn interval_nodes_for_layout(p: usize) -> Vec<f64> {
    let mut pts = vec![-1.0, 1.0];
    for k in 1..p {
        pts.push(-1.0 + 2.0 * k as f64 / p as f64);
    }
    pts
}

fn index_in(set: &[f64], x: f64) -> usize {
    set.iter()
        .position(|&s| (s - x).abs() < 1e-12)
        .expect("node coordinate not on the tensor grid")
}

fn lagrange_1d(nodes: &[f64], i: usize, x: f64) -> f64 {
    let mut v = 1.0;
    for (j, &xj) in nodes.iter().enumerate() {
        if j != i {
            v *= (x - xj) / (nodes[i] - xj);
        }
    }
    v
}

fn lagrange_1d_deriv(nodes: &[f64], i: usize, x: f64) -> f64 {
    let mut sum = 0.0;
    for (k, &xk) in nodes.iter().enumerate() {
        if k == i {
            continue;
        }
        let mut term = 1.0 / (nodes[i] - xk);
        for (j, &xj) in nodes.iter().enumerate() {
            if j != i && j != k {
                term *= (x - xj) / (nodes[i] - xj);
            }
        }
        sum += term;
    }
    sum
}

/// Values and gradients of triangle Lagrange bases of order 1..=3 in
/// barycentric form. Node layout: corners, edge nodes, centroid.
fn triangle_shape(order: u8, xi: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
    let (x, y) = (xi[0], xi[1]);
    let l = [1.0 - x - y, x, y];
    let dl = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
    match order {
        1 => (l.to_vec(), dl.to_vec()),
        2 => {
            let mut v = Vec::with_capacity(6);
            let mut g = Vec::with_capacity(6);
            for i in 0..3 {
                v.push(l[i] * (2.0 * l[i] - 1.0));
                g.push([
                    dl[i][0] * (4.0 * l[i] - 1.0),
                    dl[i][1] * (4.0 * l[i] - 1.0),
                ]);
            }
            for &(a, b) in ElementShape::Triangle.edges() {
                v.push(4.0 * l[a] * l[b]);
                g.push([
                    4.0 * (dl[a][0] * l[b] + l[a] * dl[b][0]),
                    4.0 * (dl[a][1] * l[b] + l[a] * dl[b][1]),
                ]);
            }
            (v, g)
        }
        3 => {
            let mut v = Vec::with_capacity(10);
            let mut g = Vec::with_capacity(10);
            for i in 0..3 {
                let li = l[i];
                v.push(0.5 * li * (3.0 * li - 1.0) * (3.0 * li - 2.0));
                let d = 0.5 * (27.0 * li * li - 18.0 * li + 2.0);
                g.push([dl[i][0] * d, dl[i][1] * d]);
            }
            for &(a, b) in ElementShape::Triangle.edges() {
                // node at 1/3 from a, then at 2/3 from a
                let (la, lb) = (l[a], l[b]);
                v.push(4.5 * la * lb * (3.0 * la - 1.0));
                g.push([
                    4.5 * (dl[a][0] * lb * (3.0 * la - 1.0)
                        + la * dl[b][0] * (3.0 * la - 1.0)
                        + la * lb * 3.0 * dl[a][0]),
                    4.5 * (dl[a][1] * lb * (3.0 * la - 1.0)
                        + la * dl[b][1] * (3.0 * la - 1.0)
                        + la * lb * 3.0 * dl[a][1]),
                ]);
                v.push(4.5 * la * lb * (3.0 * lb - 1.0));
                g.push([
                    4.5 * (dl[a][0] * lb * (3.0 * lb - 1.0)
                        + la * dl[b][0] * (3.0 * lb - 1.0)
                        + la * lb * 3.0 * dl[b][0]),
                    4.5 * (dl[a][1] * lb * (3.0 * lb - 1.0)
                        + la * dl[b][1] * (3.0 * lb - 1.0)
                        + la * lb * 3.0 * dl[b][1]),
                ]);
            }
            let (l1, l2, l3) = (l[0], l[1], l[2]);
            v.push(27.0 * l1 * l2 * l3);
            g.push([
                27.0 * (dl[0][0] * l2 * l3 + l1 * dl[1][0] * l3 + l1 * l2 * dl[2][0]),
                27.0 * (dl[0][1] * l2 * l3 + l1 * dl[1][1] * l3 + l1 * l2 * dl[2][1]),
            ]);
            (v, g)
        }
        _ => panic!("triangle order 1..=3"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn families() -> Vec<ElementFamily> {
        let mut out = Vec::new();
        for shape in [ElementShape::Interval, ElementShape::Triangle, ElementShape::Quad] {
            for order in 1..=3u8 {
                out.push(ElementFamily::new(shape, order).unwrap());
            }
        }
        out
    }

    fn interior_point(shape: ElementShape, s: f64, t: f64) -> [f64; 2] {
        // map (s, t) in (0,1)² to a point inside the reference element
        match shape {
            ElementShape::Interval => [2.0 * s - 1.0, 0.0],
            ElementShape::Quad => [2.0 * s - 1.0, 2.0 * t - 1.0],
            ElementShape::Triangle => {
                let (x, y) = (s * 0.9, t * 0.9);
                if x + y > 1.0 {
                    [x / 2.0, y / 2.0]
                } else {
                    [x, y]
                }
            }
        }
    }

    #[test]
    fn partition_of_unity_and_zero_gradient_sum() {
        for fam in families() {
            for (i, j) in [(1, 1), (3, 7), (9, 2), (5, 5)] {
                let p = interior_point(fam.shape, i as f64 / 10.0, j as f64 / 10.0);
                let v = fam.shape_at(p);
                let g = fam.grad_at(p);
                let sum: f64 = v.iter().sum();
                assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-14);
                let gx: f64 = g.iter().map(|d| d[0]).sum();
                let gy: f64 = g.iter().map(|d| d[1]).sum();
                assert_abs_diff_eq!(gx, 0.0, epsilon = 1e-12);
                assert_abs_diff_eq!(gy, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn kronecker_delta_at_nodes() {
        for fam in families() {
            let nodes = fam.ref_nodes();
            assert_eq!(nodes.len(), fam.node_count());
            for (i, n) in nodes.iter().enumerate() {
                let v = fam.shape_at(*n);
                for (j, &vj) in v.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(vj, expect, epsilon = 1e-11);
                }
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let h = 1e-6;
        for fam in families() {
            let p = interior_point(fam.shape, 0.37, 0.29);
            let g = fam.grad_at(p);
            let vx1 = fam.shape_at([p[0] + h, p[1]]);
            let vx0 = fam.shape_at([p[0] - h, p[1]]);
            for (i, gi) in g.iter().enumerate() {
                assert_abs_diff_eq!(gi[0], (vx1[i] - vx0[i]) / (2.0 * h), epsilon = 1e-7);
            }
            if fam.shape.dim() == 2 {
                let vy1 = fam.shape_at([p[0], p[1] + h]);
                let vy0 = fam.shape_at([p[0], p[1] - h]);
                for (i, gi) in g.iter().enumerate() {
                    assert_abs_diff_eq!(gi[1], (vy1[i] - vy0[i]) / (2.0 * h), epsilon = 1e-7);
                }
            }
        }
    }

    #[test]
    fn quadrature_integrates_polynomials_exactly() {
        // every rule has degree >= 2 * order
        for fam in families() {
            let q = fam.quadrature();
            let deg = 2 * fam.order as usize;
            match fam.shape {
                ElementShape::Interval => {
                    for d in 0..=deg {
                        let num: f64 = q
                            .points
                            .iter()
                            .zip(&q.weights)
                            .map(|(p, w)| w * p[0].powi(d as i32))
                            .sum();
                        let exact = if d % 2 == 0 { 2.0 / (d as f64 + 1.0) } else { 0.0 };
                        assert_abs_diff_eq!(num, exact, epsilon = 1e-13);
                    }
                }
                ElementShape::Quad => {
                    for dx in 0..=deg {
                        for dy in 0..=deg {
                            let num: f64 = q
                                .points
                                .iter()
                                .zip(&q.weights)
                                .map(|(p, w)| w * p[0].powi(dx as i32) * p[1].powi(dy as i32))
                                .sum();
                            let e1 = if dx % 2 == 0 { 2.0 / (dx as f64 + 1.0) } else { 0.0 };
                            let e2 = if dy % 2 == 0 { 2.0 / (dy as f64 + 1.0) } else { 0.0 };
                            assert_abs_diff_eq!(num, e1 * e2, epsilon = 1e-13);
                        }
                    }
                }
                ElementShape::Triangle => {
                    // exact integral of x^a y^b over the unit triangle
                    fn factorial(n: usize) -> f64 {
                        (1..=n).map(|k| k as f64).product()
                    }
                    for a in 0..=deg {
                        for b in 0..=(deg - a) {
                            let num: f64 = q
                                .points
                                .iter()
                                .zip(&q.weights)
                                .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                                .sum();
                            let exact = factorial(a) * factorial(b) / factorial(a + b + 2);
                            assert_abs_diff_eq!(num, exact, epsilon = 1e-13);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn edge_nodes_lie_on_edges() {
        for fam in families() {
            if fam.shape == ElementShape::Interval {
                continue;
            }
            let nodes = fam.ref_nodes();
            let corners = fam.shape.corner_ref_positions();
            for (e, &(a, b)) in fam.shape.edges().iter().enumerate() {
                let locals = fam.edge_local_nodes(e);
                assert_eq!(locals.len(), fam.order as usize + 1);
                assert_eq!(locals[0], a);
                assert_eq!(*locals.last().unwrap(), b);
                // interior edge nodes are colinear with the corners
                for (k, &li) in locals.iter().enumerate().skip(1).take(fam.order as usize - 1) {
                    let t = k as f64 / fam.order as f64;
                    let ex = corners[a][0] + (corners[b][0] - corners[a][0]) * t;
                    let ey = corners[a][1] + (corners[b][1] - corners[a][1]) * t;
                    assert_abs_diff_eq!(nodes[li][0], ex, epsilon = 1e-14);
                    assert_abs_diff_eq!(nodes[li][1], ey, epsilon = 1e-14);
                }
            }
        }
    }
}
