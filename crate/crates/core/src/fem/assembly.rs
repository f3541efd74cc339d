//! Sparse system assembly from element kernels, Dirichlet row elimination
//! and the direct linear solve.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use nalgebra::{DMatrix, DVector};

use super::dofmap::DofMap;
use super::element::{ElementFamily, Quadrature};
use super::geometry::Geometry;
use super::mesh::Mesh;
use crate::{Error, Result};

/// A square sparse system `A x = b` under assembly. Entries are collected as
/// triplets in a fixed order so repeated assembly of the same problem is
/// bitwise reproducible.
pub struct SparseSystem {
    dim: usize,
    triplets: Vec<Triplet<usize, usize, f64>>,
    pub rhs: DVector<f64>,
    pub solution: DVector<f64>,
    dirichlet: Vec<(usize, f64)>,
}

impl SparseSystem {
    pub fn new(dim: usize) -> Self {
        SparseSystem {
            dim,
            triplets: Vec::new(),
            rhs: DVector::zeros(dim),
            solution: DVector::zeros(dim),
            dirichlet: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.dim && col < self.dim);
        if value != 0.0 {
            self.triplets.push(Triplet::new(row, col, value));
        }
    }

    pub fn add_rhs(&mut self, row: usize, value: f64) {
        self.rhs[row] += value;
    }

    /// Adds a dense local block. `dofs` maps local to global indices.
    pub fn add_block(&mut self, dofs: &[usize], k: &DMatrix<f64>, f: &DVector<f64>) {
        for (i, &gi) in dofs.iter().enumerate() {
            self.rhs[gi] += f[i];
            for (j, &gj) in dofs.iter().enumerate() {
                self.add(gi, gj, k[(i, j)]);
            }
        }
    }

    /// Constrains `row` to the value `v` by row elimination: the row is
    /// replaced by the identity and the right-hand side by `v`.
    pub fn set_dirichlet(&mut self, row: usize, value: f64) {
        self.dirichlet.push((row, value));
    }

    /// Materialises the CSC matrix with constraints applied.
    fn build_matrix(&self) -> Result<(SparseColMat<usize, f64>, DVector<f64>)> {
        let mut constrained = vec![false; self.dim];
        for &(r, _) in &self.dirichlet {
            constrained[r] = true;
        }
        let mut trips: Vec<Triplet<usize, usize, f64>> = self
            .triplets
            .iter()
            .filter(|t| !constrained[t.row])
            .copied()
            .collect();
        let mut rhs = self.rhs.clone();
        for &(r, v) in &self.dirichlet {
            trips.push(Triplet::new(r, r, 1.0));
            rhs[r] = v;
        }
        let mat = SparseColMat::try_new_from_triplets(self.dim, self.dim, &trips)
            .map_err(|e| Error::LinearSolve(format!("matrix creation failed: {e:?}")))?;
        Ok((mat, rhs))
    }

    /// Direct sparse LU solve; the solution is stored and returned.
    pub fn solve(&mut self) -> Result<&DVector<f64>> {
        let (mat, rhs) = self.build_matrix()?;
        let lu = mat
            .sp_lu()
            .map_err(|e| Error::LinearSolve(format!("sparse LU failed: {e:?}")))?;
        let mut b = faer::Mat::<f64>::zeros(self.dim, 1);
        for i in 0..self.dim {
            b[(i, 0)] = rhs[i];
        }
        let x = lu.solve(&b);
        for i in 0..self.dim {
            self.solution[i] = x[(i, 0)];
        }
        if self.solution.iter().any(|v| !v.is_finite()) {
            return Err(Error::LinearSolve("singular or ill-posed system".into()));
        }
        Ok(&self.solution)
    }

    /// Dense copy of the (constrained) matrix, for small verification work.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        let (mat, _) = self.build_matrix()?;
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            for (i, v) in mat.row_idx_of_col(j).zip(mat.val_of_col(j)) {
                out[(i, j)] += v;
            }
        }
        Ok(out)
    }

    /// Residual vector without constraints applied (raw assembled rhs).
    pub fn raw_rhs(&self) -> &DVector<f64> {
        &self.rhs
    }
}

/// Evaluated basis data of one field on one element at a quadrature rule:
/// shape values, physical gradients and `w·|J|` per point.
pub struct ElemBasis {
    pub family: ElementFamily,
    /// `phi[q][i]`
    pub phi: Vec<Vec<f64>>,
    /// `grad[q][i]` physical gradients
    pub grad: Vec<Vec<[f64; 2]>>,
}

/// Per-element evaluation context shared by all kernels: geometry, the
/// quadrature rule in use and `w·|J|` weights.
pub struct ElemEval {
    pub elem: usize,
    pub geo: Geometry,
    pub quad: Quadrature,
    pub wdetj: Vec<f64>,
    pub points: Vec<[f64; 2]>,
}

impl ElemEval {
    pub fn new(mesh: &Mesh, elem: usize, quad: Quadrature) -> Self {
        let geo = Geometry::of(mesh, elem);
        let wdetj: Vec<f64> = quad
            .points
            .iter()
            .zip(&quad.weights)
            .map(|(&p, &w)| w * geo.det_jacobian(p))
            .collect();
        let points = quad.points.iter().map(|&p| geo.map(p)).collect();
        ElemEval { elem, geo, quad, wdetj, points }
    }

    /// Basis data of a field of the given order on this element.
    pub fn basis(&self, order: u8) -> ElemBasis {
        let family = ElementFamily { shape: self.geo.shape, order };
        let mut phi = Vec::with_capacity(self.quad.len());
        let mut grad = Vec::with_capacity(self.quad.len());
        let mut scratch = Vec::new();
        for &p in &self.quad.points {
            phi.push(family.shape_at(p));
            let ref_g = family.grad_at(p);
            self.geo.push_gradients(p, &ref_g, &mut scratch);
            grad.push(scratch.clone());
        }
        ElemBasis { family, phi, grad }
    }
}

/// Interpolates nodal values of a field at one quadrature point.
pub fn interp(basis: &ElemBasis, q: usize, nodal: &[f64], elem_nodes: &[u32]) -> f64 {
    basis.phi[q]
        .iter()
        .zip(elem_nodes)
        .map(|(&p, &n)| p * nodal[n as usize])
        .sum()
}

/// Interpolates the gradient of a nodal field at one quadrature point.
pub fn interp_grad(basis: &ElemBasis, q: usize, nodal: &[f64], elem_nodes: &[u32]) -> [f64; 2] {
    let mut g = [0.0; 2];
    for (d, &n) in basis.grad[q].iter().zip(elem_nodes) {
        g[0] += d[0] * nodal[n as usize];
        g[1] += d[1] * nodal[n as usize];
    }
    g
}

/// Contribution of one element produced by a kernel: global dof indices and
/// the local matrix/vector pair.
pub struct LocalSystem {
    pub dofs: Vec<usize>,
    pub matrix: DMatrix<f64>,
    pub vector: DVector<f64>,
}

impl LocalSystem {
    pub fn new(dofs: Vec<usize>) -> Self {
        let n = dofs.len();
        LocalSystem {
            dofs,
            matrix: DMatrix::zeros(n, n),
            vector: DVector::zeros(n),
        }
    }
}

/// Assembles a global sparse system from a per-element kernel. The kernel
/// receives the element index and returns its local contribution; the global
/// system is the sum over elements, visited in index order.
pub fn assemble<F>(mesh: &Mesh, dofs: &DofMap, mut kernel: F) -> Result<SparseSystem>
where
    F: FnMut(usize) -> Result<LocalSystem>,
{
    let mut sys = SparseSystem::new(dofs.n_dofs());
    for e in 0..mesh.n_elements() {
        let local = kernel(e)?;
        let n = local.dofs.len();
        if local.matrix.nrows() != n || local.matrix.ncols() != n || local.vector.len() != n {
            return Err(Error::Assembly(format!(
                "element {e}: kernel returned {}x{} matrix / {} vector for {} dofs",
                local.matrix.nrows(),
                local.matrix.ncols(),
                local.vector.len(),
                n
            )));
        }
        for &g in &local.dofs {
            if g >= dofs.n_dofs() {
                return Err(Error::Assembly(format!(
                    "element {e}: dof {g} out of range {}",
                    dofs.n_dofs()
                )));
            }
        }
        sys.add_block(&local.dofs, &local.matrix, &local.vector);
    }
    Ok(sys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::dofmap::FieldSpec;
    use crate::fem::mesh::{build_interval_mesh, Mesh, MeshElement};
    use crate::fem::element::ElementShape;
    use approx::assert_abs_diff_eq;
    use nalgebra::dvector;

    fn unit_square(nx: usize) -> Mesh {
        let mut nodes = Vec::new();
        for j in 0..=nx {
            for i in 0..=nx {
                nodes.push([i as f64 / nx as f64, j as f64 / nx as f64]);
            }
        }
        let id = |i: usize, j: usize| (j * (nx + 1) + i) as u32;
        let mut elements = Vec::new();
        for j in 0..nx {
            for i in 0..nx {
                elements.push(MeshElement {
                    shape: ElementShape::Quad,
                    nodes: vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)],
                });
            }
        }
        Mesh { dim: 2, nodes, elements, boundary: Default::default() }
    }

    fn diffusion_kernel<'a>(
        mesh: &'a Mesh,
        dofs: &'a DofMap,
        d: f64,
        source: f64,
    ) -> impl FnMut(usize) -> crate::Result<LocalSystem> + 'a {
        move |e| {
            let layout = dofs.field(0);
            let ev = ElemEval::new(mesh, e, layout.family(mesh.elements[e].shape).quadrature());
            let basis = ev.basis(layout.spec.order);
            let nodes = &layout.elem_nodes[e];
            let gdofs: Vec<usize> = nodes.iter().map(|&n| layout.dof(n as usize, 0)).collect();
            let mut local = LocalSystem::new(gdofs);
            for q in 0..ev.quad.len() {
                let w = ev.wdetj[q];
                for i in 0..nodes.len() {
                    local.vector[i] += w * source * basis.phi[q][i];
                    for j in 0..nodes.len() {
                        let gg = basis.grad[q][i][0] * basis.grad[q][j][0]
                            + basis.grad[q][i][1] * basis.grad[q][j][1];
                        local.matrix[(i, j)] += w * d * gg;
                    }
                }
            }
            Ok(local)
        }
    }

    #[test]
    fn laplace_interior_row_sums_vanish() {
        let mesh = unit_square(4);
        let dofs = DofMap::new(&mesh, &[FieldSpec::scalar("c", 1)]).unwrap();
        let sys = assemble(&mesh, &dofs, diffusion_kernel(&mesh, &dofs, 1.0, 1.0)).unwrap();
        let dense = sys.to_dense().unwrap();
        // partition of unity: stiffness row sums vanish everywhere for the
        // pure Laplace operator (constants are in the kernel's null space)
        for i in 0..dofs.n_dofs() {
            let row_sum: f64 = (0..dofs.n_dofs()).map(|j| dense[(i, j)]).sum();
            assert_abs_diff_eq!(row_sum, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn one_dimensional_two_element_stencil() {
        // D = 1 on [0, 1] with two linear elements: tridiag(-2; 2, 4, 2; -2)
        let mesh = build_interval_mesh(1.0, 2, 1.0).unwrap();
        let dofs = DofMap::new(&mesh, &[FieldSpec::scalar("c", 1)]).unwrap();
        let sys = assemble(&mesh, &dofs, diffusion_kernel(&mesh, &dofs, 1.0, 0.0)).unwrap();
        let dense = sys.to_dense().unwrap();
        let expect = nalgebra::dmatrix![
            2.0, -2.0, 0.0;
            -2.0, 4.0, -2.0;
            0.0, -2.0, 2.0
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(dense[(i, j)], expect[(i, j)], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn empty_kernel_gives_zero_matrix() {
        let mesh = build_interval_mesh(1.0, 3, 1.0).unwrap();
        let dofs = DofMap::new(&mesh, &[FieldSpec::scalar("c", 1)]).unwrap();
        let sys = assemble(&mesh, &dofs, |e| {
            let layout = dofs.field(0);
            let gdofs: Vec<usize> = layout.elem_nodes[e]
                .iter()
                .map(|&n| layout.dof(n as usize, 0))
                .collect();
            Ok(LocalSystem::new(gdofs))
        })
        .unwrap();
        let dense = sys.to_dense().unwrap();
        assert_eq!(dense.amax(), 0.0);
    }

    #[test]
    fn assembly_is_linear_in_the_kernel() {
        let mesh = unit_square(3);
        let dofs = DofMap::new(&mesh, &[FieldSpec::scalar("c", 2)]).unwrap();
        let d1 = assemble(&mesh, &dofs, diffusion_kernel(&mesh, &dofs, 1.3, 0.7))
            .unwrap()
            .to_dense()
            .unwrap();
        let d2 = assemble(&mesh, &dofs, diffusion_kernel(&mesh, &dofs, 0.4, 0.1))
            .unwrap()
            .to_dense()
            .unwrap();
        let sum = assemble(&mesh, &dofs, diffusion_kernel(&mesh, &dofs, 1.7, 0.8))
            .unwrap()
            .to_dense()
            .unwrap();
        let diff = (&d1 + &d2 - &sum).amax();
        let scale = sum.amax();
        assert!(diff <= 1e-13 * scale, "linearity violated: {diff:.3e}");
    }

    #[test]
    fn dirichlet_rows_and_solve() {
        // -u'' = 0, u(0) = 1, u(1) = 3 -> linear profile
        let mesh = build_interval_mesh(1.0, 8, 1.0).unwrap();
        let dofs = DofMap::new(&mesh, &[FieldSpec::scalar("c", 1)]).unwrap();
        let mut sys = assemble(&mesh, &dofs, diffusion_kernel(&mesh, &dofs, 1.0, 0.0)).unwrap();
        sys.set_dirichlet(0, 1.0);
        sys.set_dirichlet(8, 3.0);
        let x = sys.solve().unwrap();
        for (i, xi) in x.iter().enumerate() {
            let coord = dofs.field(0).coords[i][0];
            assert_abs_diff_eq!(*xi, 1.0 + 2.0 * coord, epsilon = 1e-12);
        }
        let _ = dvector![0.0];
    }

    #[test]
    fn isoparametric_consistency() {
        // interpolating nodal coordinates reproduces quadrature-point coords
        let mesh = crate::fem::mesh::build_boundary_layer_mesh(0.15, 10e-6, 1).unwrap();
        for order in 1..=3u8 {
            let dofs = DofMap::new(&mesh, &[FieldSpec::scalar("c", order)]).unwrap();
            let layout = dofs.field(0);
            for e in (0..mesh.n_elements()).step_by(97) {
                let fam = layout.family(mesh.elements[e].shape);
                let ev = ElemEval::new(&mesh, e, fam.quadrature());
                let basis = ev.basis(order);
                let nodes = &layout.elem_nodes[e];
                for q in 0..ev.quad.len() {
                    let mut x = [0.0; 2];
                    for (i, &n) in nodes.iter().enumerate() {
                        x[0] += basis.phi[q][i] * layout.coords[n as usize][0];
                        x[1] += basis.phi[q][i] * layout.coords[n as usize][1];
                    }
                    assert_abs_diff_eq!(x[0], ev.points[q][0], epsilon = 1e-12 * 0.15);
                    assert_abs_diff_eq!(x[1], ev.points[q][1], epsilon = 1e-12 * 0.15);
                }
            }
        }
    }
}
