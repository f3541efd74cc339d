//! The hydrogen mass balance with the lattice concentration as the primal
//! unknown:
//!
//! `dC_L/dt + div(-D_L grad C_L + v C_L) = R_T`
//!
//! with drift `v = (D_L V_H / RT) grad sigma_h` (+ dislocation transport),
//! equilibrium trap sinks assembled in time-difference form (so that the
//! discrete total hydrogen is conserved exactly on insulated domains), and
//! kinetic traps eliminated node-locally inside the Newton loop.

use nalgebra::DVector;

use crate::boundary::{GasEquilibriumSpec, HerSpec, Insulation};
use crate::fem::{transfer_field, DofMap, ElemEval, FieldLayout, Mesh, SparseSystem};
use crate::mechanics::RecoveredFields;
use crate::solver::{TimeHistory, TimeWeights};
use crate::transport::kinetics::{option1_dcl, option1_update, option2_dcl, option2_update};
use crate::transport::oriani::{dct_dcl, oriani_ct_ln, oriani_theta_t, OccupancyVariant};
use crate::transport::{
    DislocationTransportSpec, KineticOption, LatticeParams, TrapKinetics, TrapSpec,
};
use crate::{Error, Result};

/// Temperature schedule: isothermal runs use the lattice temperature; ramps
/// make both `T` and `D_L` time-dependent (thermal desorption).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThermalSchedule {
    Isothermal,
    /// `T(t) = t0 + phi t`, `D_L(T) = d0 exp(-e_l/(R T))`.
    Ramp { t0: f64, phi: f64, d0: f64, e_l: f64 },
}

impl ThermalSchedule {
    pub fn temperature(&self, base: f64, t: f64) -> f64 {
        match *self {
            ThermalSchedule::Isothermal => base,
            ThermalSchedule::Ramp { t0, phi, .. } => t0 + phi * t,
        }
    }

    pub fn diffusivity(&self, d_l: f64, temperature: f64) -> f64 {
        match *self {
            ThermalSchedule::Isothermal => d_l,
            ThermalSchedule::Ramp { d0, e_l, .. } => {
                d0 * (-e_l / (crate::constants::GAS_CONSTANT * temperature)).exp()
            }
        }
    }
}

/// A boundary condition bound to a mesh tag.
#[derive(Debug, Clone)]
pub struct TransportBc {
    pub tag: String,
    pub kind: BcKind,
}

#[derive(Debug, Clone)]
pub enum BcKind {
    Dirichlet(GasEquilibriumSpec),
    Her(HerSpec),
    Insulated(Insulation),
}

/// Evolving fields owned by the stepper: the concentration history and one
/// nodal auxiliary field per kinetic trap (occupancy for Option 1, trapped
/// concentration for Option 2).
#[derive(Debug, Clone)]
pub struct TransportState {
    pub conc: TimeHistory,
    pub trap_fields: Vec<TimeHistory>,
}

/// Time-level inputs for one assembly: current trial time, BDF weights and
/// the mechanics fields at the new time and at the history levels.
/// `sigma_h_rate` is the backward difference of the recovered nodal
/// hydrostatic stress, used only by the chemical-potential form.
pub struct StepInputs<'b> {
    pub t_new: f64,
    pub weights: &'b TimeWeights,
    pub mech_now: &'b RecoveredFields,
    pub mech_hist: &'b [RecoveredFields],
    pub t_hist: &'b [f64],
    pub sigma_h_rate: &'b [f64],
}

/// The transport problem in lattice-concentration form.
pub struct ClProblem<'a> {
    pub mesh: &'a Mesh,
    pub dofs: &'a DofMap,
    /// Concentration field index in the dof map.
    pub field: usize,
    /// Field carrying the recovered mechanics nodal data.
    pub mech_field: usize,
    pub lattice: LatticeParams,
    pub thermal: ThermalSchedule,
    pub traps: Vec<TrapSpec>,
    pub variant: OccupancyVariant,
    /// Include the trap-creation (strain-rate) sink for strain-dependent
    /// trap densities.
    pub krom: bool,
    /// Include the detrapping source from the temperature dependence of
    /// `K_T` during thermal ramps (consistent choice).
    pub dct_dt_term: bool,
    /// Explicit strain-rate term in the Option-1 kinetic reaction.
    pub option1_strain_term: bool,
    pub dislocation: Option<DislocationTransportSpec>,
    pub bcs: Vec<TransportBc>,
    /// Optional volumetric source `f(x, y, t)` (manufactured solutions).
    pub source: Option<Box<dyn Fn(f64, f64, f64) -> f64 + 'a>>,
    pub newton_tol: f64,
    pub max_newton: usize,
}

impl<'a> ClProblem<'a> {
    pub fn layout(&self) -> &FieldLayout {
        self.dofs.field(self.field)
    }

    fn mech_layout(&self) -> &FieldLayout {
        self.dofs.field(self.mech_field)
    }

    pub fn n_unknowns(&self) -> usize {
        self.layout().n_nodes()
    }

    /// Kinetic traps in declaration order.
    pub fn kinetic_traps(&self) -> Vec<usize> {
        self.traps
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_kinetic())
            .map(|(i, _)| i)
            .collect()
    }

    /// Initial state with uniform concentration `c0` and traps either in
    /// equilibrium with `c0` or empty.
    pub fn initial_state(&self, c0: f64, traps_in_equilibrium: bool) -> TransportState {
        let n = self.n_unknowns();
        let conc = TimeHistory::new(DVector::from_element(n, c0));
        let t0 = self.thermal.temperature(self.lattice.temperature, 0.0);
        let mut trap_fields = Vec::new();
        for &ti in &self.kinetic_traps() {
            let tr = &self.traps[ti];
            let option = kinetic_option(tr);
            let value = if traps_in_equilibrium {
                let theta = oriani_theta_t(tr.ln_kt(t0), c0, self.lattice.n_l);
                match option {
                    KineticOption::OptionOne => theta.min(1.0 - 1e-12),
                    KineticOption::OptionTwo => tr.n_t(0.0) * theta.min(1.0 - 1e-12),
                }
            } else {
                0.0
            };
            trap_fields.push(TimeHistory::new(DVector::from_element(n, value)));
        }
        TransportState { conc, trap_fields }
    }

    /// Dirichlet targets `(local node, value)` at time `t`, using the
    /// recovered hydrostatic stress at the boundary nodes.
    pub fn dirichlet_targets(
        &self,
        t: f64,
        mech_now: &RecoveredFields,
    ) -> Result<Vec<(usize, f64)>> {
        let temperature = self.thermal.temperature(self.lattice.temperature, t);
        let rt = self.lattice.gas_constant * temperature;
        let sh_on_conc = transfer_field(
            self.mesh,
            self.mech_layout(),
            &mech_now.sigma_h,
            self.layout(),
        );
        let mut out = Vec::new();
        for bc in &self.bcs {
            if let BcKind::Dirichlet(spec) = &bc.kind {
                for &node in &self
                    .dofs
                    .boundary_field_nodes(self.mesh, self.field, &bc.tag)?
                {
                    let value = spec.dirichlet_value(
                        sh_on_conc[node as usize],
                        t,
                        self.lattice.v_h,
                        rt,
                    );
                    out.push((node as usize, value));
                }
            }
        }
        out.sort_unstable_by_key(|&(n, _)| n);
        out.dedup_by_key(|&mut (n, _)| n);
        Ok(out)
    }

    /// Updated kinetic trap nodal fields for a given concentration iterate,
    /// with the rate and its concentration sensitivity at each node.
    #[allow(clippy::type_complexity)]
    fn kinetic_update(
        &self,
        c_new: &DVector<f64>,
        state: &TransportState,
        inputs: &StepInputs,
        eps_p_on_conc: &[f64],
        eps_p_rate_on_conc: &[f64],
    ) -> (Vec<DVector<f64>>, Vec<f64>, Vec<f64>) {
        let n = self.n_unknowns();
        let tw = inputs.weights;
        let t_new = self.thermal.temperature(self.lattice.temperature, inputs.t_new);
        let kin = self.kinetic_traps();
        let mut fields = Vec::with_capacity(kin.len());
        // combined nodal reaction rate (dC_T/dt summed over kinetic traps)
        let mut rate = vec![0.0; n];
        let mut drate = vec![0.0; n];
        for (slot, &ti) in kin.iter().enumerate() {
            let tr = &self.traps[ti];
            let (kappa, lambda) = tr.frequencies(t_new).expect("kinetic trap");
            let option = kinetic_option(tr);
            let hist = &state.trap_fields[slot];
            let mut new_field = DVector::zeros(n);
            for i in 0..n {
                let h = hist.dof_history(i, tw.hist.len());
                let hsum = tw.history_sum(&h);
                let n_t = tr.n_t(eps_p_on_conc[i]);
                match option {
                    KineticOption::OptionOne => {
                        let theta =
                            option1_update(tw.c0, hsum, c_new[i], kappa, lambda, self.lattice.n_l);
                        let dtheta =
                            option1_dcl(tw.c0, hsum, c_new[i], kappa, lambda, self.lattice.n_l);
                        new_field[i] = theta;
                        let theta_rate = tw.c0 * theta + hsum;
                        rate[i] += n_t * theta_rate;
                        drate[i] += n_t * tw.c0 * dtheta;
                        if self.option1_strain_term {
                            let creation =
                                theta * tr.dn_dep(eps_p_on_conc[i]) * eps_p_rate_on_conc[i];
                            rate[i] += creation;
                            drate[i] +=
                                dtheta * tr.dn_dep(eps_p_on_conc[i]) * eps_p_rate_on_conc[i];
                        }
                    }
                    KineticOption::OptionTwo => {
                        let ct = option2_update(
                            tw.c0, hsum, c_new[i], n_t, kappa, lambda, self.lattice.n_l,
                        );
                        let dct = option2_dcl(
                            tw.c0, hsum, c_new[i], n_t, kappa, lambda, self.lattice.n_l,
                        );
                        new_field[i] = ct;
                        rate[i] += tw.c0 * ct + hsum;
                        drate[i] += tw.c0 * dct;
                    }
                }
            }
            fields.push(new_field);
        }
        (fields, rate, drate)
    }

    /// Assembles the residual and Jacobian at the concentration iterate
    /// `c_new`. Returns the system together with the updated kinetic trap
    /// fields for this iterate.
    pub fn assemble(
        &self,
        c_new: &DVector<f64>,
        state: &TransportState,
        inputs: &StepInputs,
    ) -> Result<(SparseSystem, Vec<DVector<f64>>)> {
        let layout = self.layout();
        let mech_layout = self.mech_layout();
        let tw = inputs.weights;
        let n_hist = tw.hist.len();
        if inputs.mech_hist.len() < n_hist || inputs.t_hist.len() < n_hist {
            return Err(Error::Assembly(
                "transport assembly: mechanics history shorter than the BDF stencil".into(),
            ));
        }
        let temperature = self.thermal.temperature(self.lattice.temperature, inputs.t_new);
        let d_l = self.thermal.diffusivity(self.lattice.d_l, temperature);
        let rt = self.lattice.gas_constant * temperature;
        let n_l = self.lattice.n_l;

        // nodal mechanics data transferred to concentration nodes (kinetic
        // traps and Dirichlet stress factors live on conc nodes)
        let eps_p_on_conc = transfer_field(self.mesh, mech_layout, &inputs.mech_now.eps_p, layout);
        let eps_p_rate_on_conc =
            transfer_field(self.mesh, mech_layout, &inputs.mech_now.eps_p_rate, layout);

        let (trap_fields, kin_rate, kin_drate) =
            self.kinetic_update(c_new, state, inputs, &eps_p_on_conc, &eps_p_rate_on_conc);

        let mobile_trap = self
            .traps
            .iter()
            .find(|t| t.mobile)
            .filter(|_| self.dislocation.is_some());

        let mut sys = SparseSystem::new(self.n_unknowns());

        for e in 0..self.mesh.n_elements() {
            let fam = layout.family(self.mesh.elements[e].shape);
            let ev = ElemEval::new(self.mesh, e, fam.quadrature());
            let basis = ev.basis(layout.spec.order);
            let mech_basis = ev.basis(mech_layout.spec.order);
            let nodes = &layout.elem_nodes[e];
            let mech_nodes = &mech_layout.elem_nodes[e];
            let nn = nodes.len();
            let mut ke = nalgebra::DMatrix::zeros(nn, nn);
            let mut fe = DVector::zeros(nn);

            for q in 0..ev.quad.len() {
                let w = ev.wdetj[q];
                let phi = &basis.phi[q];
                let grad = &basis.grad[q];

                // interpolated concentration, now and at history levels
                let mut c = 0.0;
                let mut grad_c = [0.0; 2];
                for (i, &node) in nodes.iter().enumerate() {
                    c += phi[i] * c_new[node as usize];
                    grad_c[0] += grad[i][0] * c_new[node as usize];
                    grad_c[1] += grad[i][1] * c_new[node as usize];
                }
                let mut c_hist = [0.0f64; 4];
                for k in 0..n_hist {
                    let lvl = &state.conc.levels[k];
                    for (i, &node) in nodes.iter().enumerate() {
                        c_hist[k] += phi[i] * lvl[node as usize];
                    }
                }

                // mechanics fields at the quadrature point
                let mut sigma_grad = [0.0; 2];
                let mut eps_p = 0.0;
                let mut eps_p_rate = 0.0;
                for (i, &mn) in mech_nodes.iter().enumerate() {
                    let g = mech_basis.grad[q][i];
                    sigma_grad[0] += g[0] * inputs.mech_now.sigma_h[mn as usize];
                    sigma_grad[1] += g[1] * inputs.mech_now.sigma_h[mn as usize];
                    eps_p += mech_basis.phi[q][i] * inputs.mech_now.eps_p[mn as usize];
                    eps_p_rate += mech_basis.phi[q][i] * inputs.mech_now.eps_p_rate[mn as usize];
                }
                let mut eps_p_hist = [0.0f64; 4];
                for k in 0..n_hist {
                    for (i, &mn) in mech_nodes.iter().enumerate() {
                        eps_p_hist[k] +=
                            mech_basis.phi[q][i] * inputs.mech_hist[k].eps_p[mn as usize];
                    }
                }

                // lattice rate
                let cdot = tw.c0 * c + (0..n_hist).map(|k| tw.hist[k] * c_hist[k]).sum::<f64>();

                // equilibrium trap rates in time-difference form
                let mut trap_rate = 0.0;
                let mut trap_drate = 0.0;
                for tr in self.traps.iter().filter(|t| !t.is_kinetic()) {
                    let ln_kt_new = tr.ln_kt(temperature);
                    let n_t_new = tr.n_t(eps_p);
                    let ct_new = oriani_ct_ln(c, n_t_new, ln_kt_new, n_l);
                    let mut r = tw.c0 * ct_new;
                    for k in 0..n_hist {
                        let ep_k = if self.krom { eps_p_hist[k] } else { eps_p };
                        let t_k = if self.dct_dt_term {
                            self.thermal.temperature(self.lattice.temperature, inputs.t_hist[k])
                        } else {
                            temperature
                        };
                        let ct_k = oriani_ct_ln(c_hist[k], tr.n_t(ep_k), tr.ln_kt(t_k), n_l);
                        r += tw.hist[k] * ct_k;
                    }
                    trap_rate += r;
                    trap_drate += tw.c0 * dct_dcl(c, n_t_new, ln_kt_new, n_l, self.variant);
                }

                // kinetic trap rates interpolated from the nodal elimination
                let mut kin_rate_q = 0.0;
                for (i, &node) in nodes.iter().enumerate() {
                    kin_rate_q += phi[i] * kin_rate[node as usize];
                }

                // convection velocity
                let mut v = [
                    d_l * self.lattice.v_h / rt * sigma_grad[0],
                    d_l * self.lattice.v_h / rt * sigma_grad[1],
                ];
                let mut dv = [0.0; 2];
                if let (Some(spec), Some(trap)) = (&self.dislocation, mobile_trap) {
                    let (vd, dvd) = spec.velocity(trap, c, eps_p_rate, temperature, n_l);
                    v[0] += vd[0];
                    v[1] += vd[1];
                    dv = dvd;
                }

                let source = self
                    .source
                    .as_ref()
                    .map(|f| f(ev.points[q][0], ev.points[q][1], inputs.t_new))
                    .unwrap_or(0.0);

                for i in 0..nn {
                    // residual: mass + trap rates + diffusion - convection - source
                    fe[i] += w * phi[i] * (cdot + trap_rate - source);
                    fe[i] += w
                        * (grad[i][0] * (d_l * grad_c[0] - v[0] * c)
                            + grad[i][1] * (d_l * grad_c[1] - v[1] * c));
                    for j in 0..nn {
                        let mut kij = phi[i] * phi[j] * (tw.c0 + trap_drate);
                        kij += grad[i][0] * d_l * grad[j][0] + grad[i][1] * d_l * grad[j][1];
                        // conservative convection with C_L-dependent velocity
                        kij -= (grad[i][0] * (v[0] + dv[0] * c)
                            + grad[i][1] * (v[1] + dv[1] * c))
                            * phi[j];
                        ke[(i, j)] += w * kij;
                    }
                }
                // kinetic reaction: nodal rates interpolated by phi_j
                for i in 0..nn {
                    fe[i] += w * phi[i] * kin_rate_q;
                    for (j, &node_j) in nodes.iter().enumerate() {
                        ke[(i, j)] += w * phi[i] * basis.phi[q][j] * kin_drate[node_j as usize];
                    }
                }
            }

            let gdofs: Vec<usize> = nodes.iter().map(|&n| n as usize).collect();
            sys.add_block(&gdofs, &ke, &(-fe));
        }

        self.assemble_boundary_terms(&mut sys, c_new, inputs, temperature, d_l)?;
        Ok((sys, trap_fields))
    }

    /// HER fluxes and the diffusive-only insulation correction.
    fn assemble_boundary_terms(
        &self,
        sys: &mut SparseSystem,
        c_new: &DVector<f64>,
        inputs: &StepInputs,
        temperature: f64,
        d_l: f64,
    ) -> Result<()> {
        let mech_layout = self.mech_layout();
        let rt = self.lattice.gas_constant * temperature;
        for bc in &self.bcs {
            match &bc.kind {
                BcKind::Dirichlet(_) => {}
                BcKind::Insulated(Insulation::Consistent) => {}
                BcKind::Her(spec) => {
                    let n_l = self.lattice.n_l;
                    let v_h = self.lattice.v_h;
                    self.facet_integral(
                        &bc.tag,
                        |c, sh| {
                            let factor = (v_h * sh / rt).exp();
                            spec.flux(c, factor, n_l)
                        },
                        sys,
                        c_new,
                        inputs.mech_now,
                        mech_layout,
                    )?;
                }
                BcKind::Insulated(Insulation::DiffusiveOnly) => {
                    // re-add the convective boundary term (v . n) C_L
                    self.facet_convective_leak(&bc.tag, sys, c_new, inputs, temperature, d_l)?;
                }
            }
        }
        Ok(())
    }

    /// Integrates an inward-flux law `J_in(C_L, sigma_h)` over the facets of
    /// `tag`: residual -= phi J_in, jacobian -= phi phi dJ/dC.
    fn facet_integral<F>(
        &self,
        tag: &str,
        mut flux: F,
        sys: &mut SparseSystem,
        c_new: &DVector<f64>,
        mech_now: &RecoveredFields,
        mech_layout: &FieldLayout,
    ) -> Result<()>
    where
        F: FnMut(f64, f64) -> Result<(f64, f64)>,
    {
        let layout = self.layout();
        for facet in self.mesh.facets(tag)? {
            let e = facet.element as usize;
            let fam = layout.family(self.mesh.elements[e].shape);
            let mech_fam = mech_layout.family(self.mesh.elements[e].shape);
            let geo = crate::fem::Geometry::of(self.mesh, e);
            let nodes = &layout.elem_nodes[e];
            let mech_nodes = &mech_layout.elem_nodes[e];
            // 1D facets are endpoints (weight 1); 2D facets use edge Gauss
            let rule: Vec<(f64, f64)> = if self.mesh.dim == 1 {
                vec![(0.0, 1.0)]
            } else {
                let half_len = geo.edge_length(facet.edge as usize) / 2.0;
                let (gp, gw) = crate::fem::element::gauss_legendre(layout.spec.order as usize + 1);
                gp.iter().zip(&gw).map(|(&t, &w)| (t, w * half_len)).collect()
            };
            for (t, w) in rule {
                let xi = geo.edge_ref_point(facet.edge as usize, t);
                let phi = fam.shape_at(xi);
                let mphi = mech_fam.shape_at(xi);
                let c: f64 = nodes.iter().zip(&phi).map(|(&n, &p)| p * c_new[n as usize]).sum();
                let sh: f64 = mech_nodes
                    .iter()
                    .zip(&mphi)
                    .map(|(&n, &p)| p * mech_now.sigma_h[n as usize])
                    .sum();
                let (j_in, dj) = flux(c, sh)?;
                for (i, &ni) in nodes.iter().enumerate() {
                    sys.add_rhs(ni as usize, w * phi[i] * j_in);
                    for (j, &nj) in nodes.iter().enumerate() {
                        sys.add(ni as usize, nj as usize, -w * phi[i] * phi[j] * dj);
                    }
                }
            }
        }
        Ok(())
    }

    /// Adds `+ int w (v.n) C_L` over the facets of `tag` (diffusive-only
    /// insulation keeps the drift leaking through the surface).
    fn facet_convective_leak(
        &self,
        tag: &str,
        sys: &mut SparseSystem,
        c_new: &DVector<f64>,
        inputs: &StepInputs,
        temperature: f64,
        d_l: f64,
    ) -> Result<()> {
        let layout = self.layout();
        let mech_layout = self.mech_layout();
        let rt = self.lattice.gas_constant * temperature;
        for facet in self.mesh.facets(tag)? {
            let e = facet.element as usize;
            if self.mesh.dim == 1 {
                continue; // 1D runs carry no drift in this crate
            }
            let fam = layout.family(self.mesh.elements[e].shape);
            let geo = crate::fem::Geometry::of(self.mesh, e);
            let nodes = &layout.elem_nodes[e];
            let mech_nodes = &mech_layout.elem_nodes[e];
            let normal = geo.edge_normal(facet.edge as usize);
            let half_len = geo.edge_length(facet.edge as usize) / 2.0;
            let (gp, gw) = crate::fem::element::gauss_legendre(layout.spec.order as usize + 1);
            for (&t, &wq) in gp.iter().zip(&gw) {
                let xi = geo.edge_ref_point(facet.edge as usize, t);
                let phi = fam.shape_at(xi);
                let mech_fam = mech_layout.family(self.mesh.elements[e].shape);
                let mgrad_ref = mech_fam.grad_at(xi);
                let mut mgrad = Vec::new();
                geo.push_gradients(xi, &mgrad_ref, &mut mgrad);
                let mut sigma_grad = [0.0; 2];
                for (i, &mn) in mech_nodes.iter().enumerate() {
                    sigma_grad[0] += mgrad[i][0] * inputs.mech_now.sigma_h[mn as usize];
                    sigma_grad[1] += mgrad[i][1] * inputs.mech_now.sigma_h[mn as usize];
                }
                let v = [
                    d_l * self.lattice.v_h / rt * sigma_grad[0],
                    d_l * self.lattice.v_h / rt * sigma_grad[1],
                ];
                let vn = v[0] * normal[0] + v[1] * normal[1];
                let c: f64 = nodes.iter().zip(&phi).map(|(&n, &p)| p * c_new[n as usize]).sum();
                let w = wq * half_len;
                for (i, &ni) in nodes.iter().enumerate() {
                    // residual += w phi (v.n) c ; the sign convention matches
                    // moving the boundary term back into the weak form
                    sys.add_rhs(ni as usize, -w * phi[i] * vn * c);
                    for (j, &nj) in nodes.iter().enumerate() {
                        sys.add(ni as usize, nj as usize, w * phi[i] * phi[j] * vn);
                    }
                }
            }
        }
        Ok(())
    }

    /// One implicit solve: scaled Newton on the assembled system. Returns
    /// the converged concentration, kinetic trap fields and iteration count.
    pub fn solve_step(
        &self,
        state: &TransportState,
        inputs: &StepInputs,
        scale: f64,
    ) -> Result<(DVector<f64>, Vec<DVector<f64>>, usize)> {
        let mut c = state.conc.current().clone();
        let targets = self.dirichlet_targets(inputs.t_new, inputs.mech_now)?;
        let mut ref_res = 0.0f64;
        for it in 0..self.max_newton {
            let (mut sys, _) = self.assemble(&c, state, inputs)?;
            let res_norm = rms(sys.raw_rhs());
            if it == 0 {
                ref_res = res_norm.max(1e-300);
            }
            for &(node, value) in &targets {
                sys.set_dirichlet(node, value - c[node]);
            }
            let dc = sys.solve()?.clone();
            let dc_norm = rms(&dc) / scale.max(1e-30);
            c += &dc;
            let res_ok = res_norm <= self.newton_tol * ref_res || res_norm == 0.0;
            if dc_norm <= self.newton_tol && (res_ok || it >= 1) {
                // refresh trap fields at the accepted iterate
                let (_, traps) = self.assemble(&c, state, inputs)?;
                return Ok((c, traps, it + 1));
            }
        }
        Err(Error::NewtonDiverged { iterations: self.max_newton, residual: ref_res })
    }

    /// Total hydrogen `int (C_L + sum C_T) dV` measured with the assembly
    /// quadrature, plus the per-population breakdown
    /// `(total, lattice, per-trap)` as domain integrals.
    pub fn hydrogen_inventory(
        &self,
        c: &DVector<f64>,
        trap_fields: &[DVector<f64>],
        eps_p: &[f64],
        t: f64,
    ) -> (f64, f64, Vec<f64>) {
        let layout = self.layout();
        let mech_layout = self.mech_layout();
        let temperature = self.thermal.temperature(self.lattice.temperature, t);
        let kin = self.kinetic_traps();
        let mut lattice = 0.0;
        let mut per_trap = vec![0.0; self.traps.len()];
        for e in 0..self.mesh.n_elements() {
            let fam = layout.family(self.mesh.elements[e].shape);
            let ev = ElemEval::new(self.mesh, e, fam.quadrature());
            let basis = ev.basis(layout.spec.order);
            let mech_basis = ev.basis(mech_layout.spec.order);
            let nodes = &layout.elem_nodes[e];
            let mech_nodes = &mech_layout.elem_nodes[e];
            for q in 0..ev.quad.len() {
                let w = ev.wdetj[q];
                let mut cq = 0.0;
                for (i, &node) in nodes.iter().enumerate() {
                    cq += basis.phi[q][i] * c[node as usize];
                }
                lattice += w * cq;
                let mut ep = 0.0;
                for (i, &mn) in mech_nodes.iter().enumerate() {
                    ep += mech_basis.phi[q][i] * eps_p[mn as usize];
                }
                for (ti, tr) in self.traps.iter().enumerate() {
                    if tr.is_kinetic() {
                        let slot = kin.iter().position(|&k| k == ti).unwrap();
                        let mut aux = 0.0;
                        for (i, &node) in nodes.iter().enumerate() {
                            aux += basis.phi[q][i] * trap_fields[slot][node as usize];
                        }
                        let ct = match kinetic_option(tr) {
                            KineticOption::OptionOne => tr.n_t(ep) * aux,
                            KineticOption::OptionTwo => aux,
                        };
                        per_trap[ti] += w * ct;
                    } else {
                        per_trap[ti] +=
                            w * oriani_ct_ln(cq, tr.n_t(ep), tr.ln_kt(temperature), self.lattice.n_l);
                    }
                }
            }
        }
        let total = lattice + per_trap.iter().sum::<f64>();
        (total, lattice, per_trap)
    }

    /// Domain volume (length in 1D).
    pub fn volume(&self) -> f64 {
        let layout = self.layout();
        (0..self.mesh.n_elements())
            .map(|e| {
                let fam = layout.family(self.mesh.elements[e].shape);
                ElemEval::new(self.mesh, e, fam.quadrature()).wdetj.iter().sum::<f64>()
            })
            .sum()
    }

    /// Verifies kinetic trap bounds after a step; occupancies must stay in
    /// `[0, 1]` and trapped concentrations in `[0, N_T]`.
    pub fn check_trap_bounds(
        &self,
        trap_fields: &[DVector<f64>],
        eps_p_on_conc: &[f64],
    ) -> Result<()> {
        let tol = 1e-9;
        for (slot, &ti) in self.kinetic_traps().iter().enumerate() {
            let tr = &self.traps[ti];
            for (i, &v) in trap_fields[slot].iter().enumerate() {
                let theta = match kinetic_option(tr) {
                    KineticOption::OptionOne => v,
                    KineticOption::OptionTwo => {
                        let n_t = tr.n_t(eps_p_on_conc[i]);
                        if n_t > 0.0 {
                            v / n_t
                        } else {
                            0.0
                        }
                    }
                };
                if !(-tol..=1.0 + tol).contains(&theta) {
                    return Err(Error::OccupancyOutOfRange { theta });
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn kinetic_option(trap: &TrapSpec) -> KineticOption {
    match trap.kinetics {
        TrapKinetics::McNabbFoster { option, .. } => option,
        TrapKinetics::Oriani => KineticOption::OptionTwo,
    }
}

pub(crate) fn rms(v: &DVector<f64>) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len().max(1) as f64).sqrt()
}
