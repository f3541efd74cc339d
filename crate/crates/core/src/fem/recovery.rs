//! Gauss-point to node transfer by lumped L2 projection, and point-wise
//! field sampling / transfer between differently-ordered fields.

use super::assembly::ElemEval;
use super::dofmap::FieldLayout;
use super::element::Quadrature;
use super::geometry::Geometry;
use super::mesh::Mesh;
use crate::{Error, Result};

/// Projects per-quadrature-point values onto the nodes of `layout` by a
/// mass-lumped least-squares fit:
/// `v_i = (sum_q w|J| phi_i g_q) / (sum_q w|J| phi_i)`.
/// Reproduces any field that is constant over each node's element patch.
///
/// `gauss_values[e][q]` must match the quadrature rule `quad` on every
/// element.
pub fn recover_nodal_field(
    mesh: &Mesh,
    layout: &FieldLayout,
    quad_for: impl Fn(usize) -> Quadrature,
    gauss_values: &[Vec<f64>],
) -> Result<Vec<f64>> {
    if gauss_values.len() != mesh.n_elements() {
        return Err(Error::Assembly(format!(
            "recovery: {} value rows for {} elements",
            gauss_values.len(),
            mesh.n_elements()
        )));
    }
    let n = layout.n_nodes();
    let mut num = vec![0.0; n];
    let mut den = vec![0.0; n];
    for e in 0..mesh.n_elements() {
        let ev = ElemEval::new(mesh, e, quad_for(e));
        if gauss_values[e].len() != ev.quad.len() {
            return Err(Error::Assembly(format!(
                "recovery: element {e} has {} values for {} quadrature points",
                gauss_values[e].len(),
                ev.quad.len()
            )));
        }
        let basis = ev.basis(layout.spec.order);
        let nodes = &layout.elem_nodes[e];
        for q in 0..ev.quad.len() {
            let w = ev.wdetj[q];
            let g = gauss_values[e][q];
            for (i, &node) in nodes.iter().enumerate() {
                num[node as usize] += w * basis.phi[q][i] * g;
                den[node as usize] += w * basis.phi[q][i];
            }
        }
    }
    Ok(num
        .iter()
        .zip(&den)
        .map(|(&n, &d)| if d.abs() > 0.0 { n / d } else { 0.0 })
        .collect())
}

/// Locates the element and reference coordinates containing a physical
/// point. Brute force with a bounding-box prefilter; adequate for line cuts
/// and table sampling.
pub fn locate(mesh: &Mesh, x: [f64; 2]) -> Result<(usize, [f64; 2])> {
    let tol = 1e-9;
    for e in 0..mesh.n_elements() {
        let el = &mesh.elements[e];
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for &n in &el.nodes {
            let p = mesh.nodes[n as usize];
            for d in 0..2 {
                min[d] = min[d].min(p[d]);
                max[d] = max[d].max(p[d]);
            }
        }
        let pad = tol * (1.0 + (max[0] - min[0]).abs() + (max[1] - min[1]).abs());
        if x[0] < min[0] - pad || x[0] > max[0] + pad {
            continue;
        }
        if mesh.dim == 2 && (x[1] < min[1] - pad || x[1] > max[1] + pad) {
            continue;
        }
        let geo = Geometry::of(mesh, e);
        if let Some(xi) = geo.invert(x, 1e-8) {
            return Ok((e, xi));
        }
    }
    Err(Error::OutsideMesh { x: x[0], y: x[1] })
}

/// Samples a nodal field at a physical point by element-local interpolation.
pub fn sample(
    mesh: &Mesh,
    layout: &FieldLayout,
    nodal: &[f64],
    x: [f64; 2],
) -> Result<f64> {
    let (e, xi) = locate(mesh, x)?;
    Ok(sample_in(mesh, layout, nodal, e, xi))
}

/// Samples a nodal field at known element/reference coordinates.
pub fn sample_in(
    mesh: &Mesh,
    layout: &FieldLayout,
    nodal: &[f64],
    elem: usize,
    xi: [f64; 2],
) -> f64 {
    let fam = layout.family(mesh.elements[elem].shape);
    let phi = fam.shape_at(xi);
    layout.elem_nodes[elem]
        .iter()
        .zip(&phi)
        .map(|(&n, &p)| nodal[n as usize] * p)
        .sum()
}

/// Evaluates the nodal values of field `from` at the node positions of field
/// `to` (both on the same mesh). Used to feed recovered mechanics fields to
/// a concentration field of a different interpolation order.
pub fn transfer_field(
    mesh: &Mesh,
    from: &FieldLayout,
    values: &[f64],
    to: &FieldLayout,
) -> Vec<f64> {
    let mut out = vec![0.0; to.n_nodes()];
    let mut seen = vec![false; to.n_nodes()];
    for e in 0..mesh.n_elements() {
        let to_fam = to.family(mesh.elements[e].shape);
        let ref_nodes = to_fam.ref_nodes();
        for (local, &node) in to.elem_nodes[e].iter().enumerate() {
            if !seen[node as usize] {
                out[node as usize] = sample_in(mesh, from, values, e, ref_nodes[local]);
                seen[node as usize] = true;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::dofmap::{DofMap, FieldSpec};
    use crate::fem::element::ElementFamily;
    use crate::fem::mesh::build_interval_mesh;
    use approx::assert_abs_diff_eq;

    fn quad_of(mesh: &Mesh, order: u8) -> impl Fn(usize) -> Quadrature + '_ {
        move |e| ElementFamily { shape: mesh.elements[e].shape, order }.quadrature()
    }

    #[test]
    fn constant_gauss_field_reproduced() {
        let mesh = crate::fem::mesh::build_boundary_layer_mesh(0.15, 1e-4, 1).unwrap();
        let dofs = DofMap::new(&mesh, &[FieldSpec::scalar("s", 1)]).unwrap();
        let layout = dofs.field(0);
        let gauss: Vec<Vec<f64>> = (0..mesh.n_elements())
            .map(|e| {
                let q = quad_of(&mesh, 1)(e);
                vec![4.25; q.len()]
            })
            .collect();
        let nodal = recover_nodal_field(&mesh, layout, quad_of(&mesh, 1), &gauss).unwrap();
        for v in nodal {
            assert_abs_diff_eq!(v, 4.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn linear_field_exact_at_interior_nodes_of_uniform_mesh() {
        // on symmetric node patches the lumped projection is exact for
        // linear fields; boundary nodes carry an O(h) extrapolation offset
        let mesh = build_interval_mesh(1.0, 10, 1.0).unwrap();
        let dofs = DofMap::new(&mesh, &[FieldSpec::scalar("s", 1)]).unwrap();
        let layout = dofs.field(0);
        let f = |x: f64| 3.0 * x - 0.5;
        let gauss: Vec<Vec<f64>> = (0..mesh.n_elements())
            .map(|e| {
                let ev = ElemEval::new(&mesh, e, quad_of(&mesh, 1)(e));
                ev.points.iter().map(|p| f(p[0])).collect()
            })
            .collect();
        let nodal = recover_nodal_field(&mesh, layout, quad_of(&mesh, 1), &gauss).unwrap();
        for (i, v) in nodal.iter().enumerate() {
            let x = layout.coords[i][0];
            if x > 1e-9 && x < 1.0 - 1e-9 {
                assert_abs_diff_eq!(*v, f(x), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn checkerboard_cancels_at_interior_nodes() {
        let mesh = build_interval_mesh(1.0, 4, 1.0).unwrap();
        let dofs = DofMap::new(&mesh, &[FieldSpec::scalar("s", 1)]).unwrap();
        let layout = dofs.field(0);
        let gauss: Vec<Vec<f64>> = (0..4)
            .map(|e| {
                let q = quad_of(&mesh, 1)(e);
                vec![if e % 2 == 0 { 1.0 } else { -1.0 }; q.len()]
            })
            .collect();
        let nodal = recover_nodal_field(&mesh, layout, quad_of(&mesh, 1), &gauss).unwrap();
        // hand evaluation on 4 uniform elements: interior nodes average the
        // two adjacent element values -> 0; ends keep their element's value
        assert_abs_diff_eq!(nodal[1], 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(nodal[2], 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(nodal[3], 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(nodal[0], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(nodal[4], -1.0, epsilon = 1e-13);
    }

    #[test]
    fn sample_and_transfer_roundtrip() {
        let mesh = crate::fem::mesh::build_boundary_layer_mesh(0.15, 1e-4, 1).unwrap();
        let dofs = DofMap::new(
            &mesh,
            &[FieldSpec::scalar("a", 1), FieldSpec::scalar("b", 2)],
        )
        .unwrap();
        let a = dofs.field(0);
        let b = dofs.field(1);
        let f = |p: [f64; 2]| 2.0 * p[0] - 3.0 * p[1] + 0.25;
        let a_vals: Vec<f64> = a.coords.iter().map(|&p| f(p)).collect();
        // a is linear so transferring to the quadratic field is exact
        let b_vals = transfer_field(&mesh, a, &a_vals, b);
        for (i, v) in b_vals.iter().enumerate() {
            assert_abs_diff_eq!(*v, f(b.coords[i]), epsilon = 1e-10);
        }
        // sampling at an arbitrary interior point
        let x = [0.07, 0.02];
        let s = sample(&mesh, b, &b_vals, x).unwrap();
        assert_abs_diff_eq!(s, f(x), epsilon = 1e-10);
    }
}
