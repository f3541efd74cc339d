//! Plane-strain finite-element mechanics: internal forces, consistent
//! stiffness, B-bar treatment for order-1 displacements and the per-step
//! Newton solve under boundary-layer Dirichlet loading.

use nalgebra::{DMatrix, DVector};

use super::boundary_layer::{boundary_layer_displacement, BoundaryLayerLoad};
use super::material::{radial_return, ElastoplasticParams, GaussState};
use crate::fem::{
    recover_nodal_field, sample_in, DofMap, ElemEval, FieldLayout, Mesh, SparseSystem,
};
use crate::{Error, Result};

/// Voigt rows used in plane strain: xx, yy, zz, xy.
const VOIGT: [usize; 4] = [0, 1, 2, 3];

/// FE mechanics model over one mesh. Gauss-point history is owned by the
/// caller (the stepper) and passed in for each solve.
pub struct MechModel<'a> {
    pub mesh: &'a Mesh,
    pub dofs: &'a DofMap,
    /// Index of the displacement field in the dof map.
    pub u_field: usize,
    pub params: ElastoplasticParams,
    /// Selective volumetric averaging for order-1 displacements.
    pub bbar: bool,
    pub load: BoundaryLayerLoad,
    /// Tags constrained by the remote K-field and by symmetry.
    pub remote_tag: String,
    pub symmetry_tag: String,
    pub newton_tol: f64,
    pub max_newton: usize,
}

/// Gauss-point states for the whole mesh.
#[derive(Debug, Clone, Default)]
pub struct MechState {
    pub gauss: Vec<Vec<GaussState>>,
}

impl MechState {
    pub fn new(mesh: &Mesh, dofs: &DofMap, u_field: usize) -> Self {
        let layout = dofs.field(u_field);
        let gauss = (0..mesh.n_elements())
            .map(|e| {
                let fam = layout.family(mesh.elements[e].shape);
                vec![GaussState::default(); fam.quadrature().len()]
            })
            .collect();
        MechState { gauss }
    }
}

/// Output of one mechanics solve: converged displacements and trial states.
pub struct MechSolution {
    pub u: DVector<f64>,
    pub state: MechState,
    pub newton_iterations: usize,
}

impl<'a> MechModel<'a> {
    fn layout(&self) -> &FieldLayout {
        self.dofs.field(self.u_field)
    }

    /// Equation index within the mechanics system (u-field dofs only).
    pub fn udof(&self, node: usize, comp: usize) -> usize {
        2 * node + comp
    }

    pub fn n_udofs(&self) -> usize {
        self.layout().n_dofs()
    }

    /// Dirichlet constraints at time `t`: K-field displacements on the
    /// remote arc, zero normal displacement on the symmetry plane. Indices
    /// are mechanics-local (see [`Self::udof`]).
    pub fn dirichlet(&self, t: f64) -> Result<Vec<(usize, f64)>> {
        let layout = self.layout();
        let k = self.load.k_at(t);
        let mut out = Vec::new();
        if !self.remote_tag.is_empty() {
            for &node in &self
                .dofs
                .boundary_field_nodes(self.mesh, self.u_field, &self.remote_tag)?
            {
                let p = layout.coords[node as usize];
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                let theta = p[1].atan2(p[0]).clamp(0.0, std::f64::consts::PI);
                let (ux, uy) =
                    boundary_layer_displacement(k, r, theta, self.params.e, self.params.nu);
                out.push((self.udof(node as usize, 0), ux));
                out.push((self.udof(node as usize, 1), uy));
            }
        }
        if !self.symmetry_tag.is_empty() {
            for &node in &self
                .dofs
                .boundary_field_nodes(self.mesh, self.u_field, &self.symmetry_tag)?
            {
                out.push((self.udof(node as usize, 1), 0.0));
            }
        }
        out.sort_unstable_by_key(|&(d, _)| d);
        out.dedup_by_key(|&mut (d, _)| d);
        Ok(out)
    }

    /// Assembles the tangent system and residual at displacement iterate `u`
    /// and returns the trial Gauss states. `conc` optionally supplies the
    /// hydrogen concentration (atoms per lattice site) entering softening.
    pub fn assemble(
        &self,
        u: &DVector<f64>,
        state_n: &MechState,
        conc: Option<(&FieldLayout, &[f64])>,
        dt: f64,
    ) -> Result<(SparseSystem, MechState)> {
        let layout = self.layout();
        let mut sys = SparseSystem::new(self.n_udofs());
        let mut trial = MechState { gauss: Vec::with_capacity(self.mesh.n_elements()) };

        for e in 0..self.mesh.n_elements() {
            let fam = layout.family(self.mesh.elements[e].shape);
            let ev = ElemEval::new(self.mesh, e, fam.quadrature());
            let basis = ev.basis(layout.spec.order);
            let nodes = &layout.elem_nodes[e];
            let n_nodes = nodes.len();
            let n_dofs = 2 * n_nodes;

            // element displacement vector
            let mut ue = DVector::zeros(n_dofs);
            for (i, &node) in nodes.iter().enumerate() {
                ue[2 * i] = u[self.udof(node as usize, 0)];
                ue[2 * i + 1] = u[self.udof(node as usize, 1)];
            }

            // B matrices (4 x n_dofs) per quadrature point
            let mut b_all: Vec<DMatrix<f64>> = Vec::with_capacity(ev.quad.len());
            for q in 0..ev.quad.len() {
                let mut b = DMatrix::zeros(4, n_dofs);
                for i in 0..n_nodes {
                    let g = basis.grad[q][i];
                    b[(0, 2 * i)] = g[0];
                    b[(1, 2 * i + 1)] = g[1];
                    b[(3, 2 * i)] = g[1];
                    b[(3, 2 * i + 1)] = g[0];
                }
                b_all.push(b);
            }

            // B-bar: replace the volumetric part by its element average
            if self.bbar && layout.spec.order == 1 {
                let vol: f64 = ev.wdetj.iter().sum();
                let mut div_mean = DVector::zeros(n_dofs);
                for q in 0..ev.quad.len() {
                    for i in 0..n_nodes {
                        let g = basis.grad[q][i];
                        div_mean[2 * i] += ev.wdetj[q] * g[0];
                        div_mean[2 * i + 1] += ev.wdetj[q] * g[1];
                    }
                }
                div_mean /= vol;
                for (q, b) in b_all.iter_mut().enumerate() {
                    for i in 0..n_nodes {
                        let g = basis.grad[q][i];
                        let dx = (div_mean[2 * i] - g[0]) / 3.0;
                        let dy = (div_mean[2 * i + 1] - g[1]) / 3.0;
                        for row in 0..3 {
                            b[(row, 2 * i)] += dx;
                            b[(row, 2 * i + 1)] += dy;
                        }
                    }
                }
            }

            let mut ke = DMatrix::zeros(n_dofs, n_dofs);
            let mut fe = DVector::zeros(n_dofs);
            let mut states = Vec::with_capacity(ev.quad.len());

            for q in 0..ev.quad.len() {
                let b = &b_all[q];
                let eps4 = b * &ue;
                let mut strain = [0.0; 6];
                for (k, &row) in VOIGT.iter().enumerate() {
                    strain[row] = eps4[k];
                }
                let c = match conc {
                    Some((clayout, cvals)) => {
                        sample_in(self.mesh, clayout, cvals, e, ev.quad.points[q]).max(0.0)
                    }
                    None => 0.0,
                };
                let up = radial_return(&state_n.gauss[e][q], strain, &self.params, c, dt)?;
                let mut sig4 = DVector::zeros(4);
                let mut d4 = DMatrix::zeros(4, 4);
                for (k, &row) in VOIGT.iter().enumerate() {
                    sig4[k] = up.state.stress[row];
                    for (l, &col) in VOIGT.iter().enumerate() {
                        d4[(k, l)] = up.tangent[row][col];
                    }
                }
                let w = ev.wdetj[q];
                fe += w * b.transpose() * &sig4;
                ke += w * b.transpose() * &d4 * b;
                states.push(up.state);
            }
            trial.gauss.push(states);

            let gdofs: Vec<usize> = nodes
                .iter()
                .flat_map(|&n| [self.udof(n as usize, 0), self.udof(n as usize, 1)])
                .collect();
            // residual = -f_int (no external volume loads)
            sys.add_block(&gdofs, &ke, &(-fe));
        }
        Ok((sys, trial))
    }

    /// Newton solve at time `t` starting from `u0`. Loading enters through
    /// the Dirichlet constraints, so the reference residual for relative
    /// convergence is taken after the first boundary push.
    pub fn solve_step(
        &self,
        t: f64,
        u0: &DVector<f64>,
        state_n: &MechState,
        conc: Option<(&FieldLayout, &[f64])>,
        dt: f64,
    ) -> Result<MechSolution> {
        let mut u = u0.clone();
        let constraints = self.dirichlet(t)?;
        let mut is_constrained = vec![false; self.n_udofs()];
        for &(d, _) in &constraints {
            is_constrained[d] = true;
        }
        let free_norm = |v: &DVector<f64>| {
            v.iter()
                .enumerate()
                .filter(|(i, _)| !is_constrained[*i])
                .map(|(_, x)| x.abs())
                .fold(0.0f64, f64::max)
        };

        let mut ref_res = 0.0f64;
        let mut last_res = f64::NAN;
        for it in 0..self.max_newton {
            let (mut sys, trial) = self.assemble(&u, state_n, conc, dt)?;
            let res_norm = free_norm(sys.raw_rhs());
            last_res = res_norm;
            if it == 1 {
                ref_res = res_norm;
            }
            if it >= 1 {
                let res_ok = res_norm <= self.newton_tol * ref_res.max(1e-300)
                    || res_norm <= 1e-14 * self.params.e;
                if res_ok {
                    return Ok(MechSolution { u, state: trial, newton_iterations: it });
                }
            }
            for &(dof, target) in &constraints {
                sys.set_dirichlet(dof, target - u[dof]);
            }
            let du = sys.solve()?.clone();
            let du_norm = du.amax();
            u += &du;
            let u_scale = u.amax().max(1e-300);
            if it >= 1 && du_norm <= 1e-12 * u_scale {
                let (_, final_states) = self.assemble(&u, state_n, conc, dt)?;
                return Ok(MechSolution { u, state: final_states, newton_iterations: it + 1 });
            }
        }
        Err(Error::NewtonDiverged { iterations: self.max_newton, residual: last_res })
    }

    /// Recovers nodal hydrostatic stress, equivalent plastic strain and its
    /// rate from Gauss states onto `target` (typically the sigma_h field).
    pub fn recover_fields(
        &self,
        state: &MechState,
        target: &FieldLayout,
    ) -> Result<RecoveredFields> {
        let layout = self.layout();
        let quad = |e: usize| layout.family(self.mesh.elements[e].shape).quadrature();
        let collect = |f: &dyn Fn(&GaussState) -> f64| -> Vec<Vec<f64>> {
            state
                .gauss
                .iter()
                .map(|el| el.iter().map(|g| f(g)).collect())
                .collect()
        };
        let sh = recover_nodal_field(self.mesh, target, quad, &collect(&|g| g.hydrostatic_stress()))?;
        let ep = recover_nodal_field(self.mesh, target, quad, &collect(&|g| g.eps_p))?;
        let ep_rate = recover_nodal_field(self.mesh, target, quad, &collect(&|g| g.eps_p_rate))?;
        Ok(RecoveredFields { sigma_h: sh, eps_p: ep, eps_p_rate: ep_rate })
    }
}

/// Nodal mechanics fields handed to the transport problem.
#[derive(Debug, Clone, Default)]
pub struct RecoveredFields {
    pub sigma_h: Vec<f64>,
    pub eps_p: Vec<f64>,
    pub eps_p_rate: Vec<f64>,
}
