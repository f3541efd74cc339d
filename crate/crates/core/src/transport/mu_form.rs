//! The hydrogen mass balance with the lattice chemical potential as the
//! primal unknown:
//!
//! `d_a dmu/dt - div(c_d grad mu) = f`
//!
//! with `d_a = D_bar C_L/RT`, `c_d = D_L C_L/RT` and
//! `f = -D_bar (C_L/RT) V_H dsigma_h/dt - sum theta_T dN_T/deps_p deps_p/dt`
//! (kinetic traps contribute `-dC_T/dt` to `f`). The lattice concentration
//! is reconstructed as `C_L = N_L exp((mu - mu0 + V_H sigma_h)/RT)`, which
//! makes stress-dependent uptake a plain constant-potential Dirichlet
//! condition and removes the hydrostatic stress gradient from the equation.

use nalgebra::DVector;

use crate::fem::{transfer_field, DofMap, ElemEval, FieldLayout, Mesh, SparseSystem};
use crate::mechanics::RecoveredFields;
use crate::solver::TimeHistory;
use crate::transport::cl_form::{kinetic_option, rms, BcKind, StepInputs, ThermalSchedule, TransportBc, TransportState};
use crate::transport::kinetics::{option1_dcl, option1_update, option2_dcl, option2_update};
use crate::transport::oriani::{d2ct_dcl2, dct_dcl, oriani_theta_t, OccupancyVariant};
use crate::transport::{KineticOption, LatticeParams, TrapSpec};
use crate::{Error, Result};

/// The transport problem in chemical-potential form.
pub struct MuProblem<'a> {
    pub mesh: &'a Mesh,
    pub dofs: &'a DofMap,
    pub field: usize,
    pub mech_field: usize,
    pub lattice: LatticeParams,
    pub thermal: ThermalSchedule,
    pub traps: Vec<TrapSpec>,
    pub variant: OccupancyVariant,
    pub krom: bool,
    pub option1_strain_term: bool,
    pub bcs: Vec<TransportBc>,
    pub newton_tol: f64,
    pub max_newton: usize,
}

impl<'a> MuProblem<'a> {
    pub fn layout(&self) -> &FieldLayout {
        self.dofs.field(self.field)
    }

    fn mech_layout(&self) -> &FieldLayout {
        self.dofs.field(self.mech_field)
    }

    pub fn n_unknowns(&self) -> usize {
        self.layout().n_nodes()
    }

    pub fn kinetic_traps(&self) -> Vec<usize> {
        self.traps
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_kinetic())
            .map(|(i, _)| i)
            .collect()
    }

    /// Initial state from a uniform lattice concentration `c0` at the
    /// initial stress field (usually zero).
    pub fn initial_state(&self, c0: f64, sigma_h0: &[f64]) -> Result<TransportState> {
        if c0 <= 0.0 {
            return Err(Error::ModellingRange(
                "the chemical-potential form needs a positive initial concentration".into(),
            ));
        }
        let n = self.n_unknowns();
        let t0 = self.thermal.temperature(self.lattice.temperature, 0.0);
        let sh = transfer_field(self.mesh, self.mech_layout(), sigma_h0, self.layout());
        let mu0 = DVector::from_fn(n, |i, _| self.lattice.mu_from_cl(c0, sh[i], t0));
        let mut trap_fields = Vec::new();
        for &ti in &self.kinetic_traps() {
            let tr = &self.traps[ti];
            let theta = oriani_theta_t(tr.ln_kt(t0), c0, self.lattice.n_l).min(1.0 - 1e-12);
            let value = match kinetic_option(tr) {
                KineticOption::OptionOne => theta,
                KineticOption::OptionTwo => tr.n_t(0.0) * theta,
            };
            trap_fields.push(TimeHistory::new(DVector::from_element(n, value)));
        }
        Ok(TransportState { conc: TimeHistory::new(mu0), trap_fields })
    }

    /// Constant-potential Dirichlet targets: `mu_env` from the environmental
    /// concentration (ramped if configured), independent of stress.
    pub fn dirichlet_targets(&self, t: f64) -> Result<Vec<(usize, f64)>> {
        let temperature = self.thermal.temperature(self.lattice.temperature, t);
        let mut out = Vec::new();
        for bc in &self.bcs {
            if let BcKind::Dirichlet(spec) = &bc.kind {
                let c_env = spec.c_env * spec.ramp.factor(t, spec.t_load);
                let mu_env = self.lattice.mu_from_cl(c_env.max(1e-300), 0.0, temperature);
                for &node in &self
                    .dofs
                    .boundary_field_nodes(self.mesh, self.field, &bc.tag)?
                {
                    out.push((node as usize, mu_env));
                }
            }
        }
        out.sort_unstable_by_key(|&(n, _)| n);
        out.dedup_by_key(|&mut (n, _)| n);
        Ok(out)
    }

    /// Nodal lattice concentration reconstructed from a potential iterate.
    pub fn cl_nodal(&self, mu: &DVector<f64>, mech_now: &RecoveredFields, t: f64) -> Vec<f64> {
        let temperature = self.thermal.temperature(self.lattice.temperature, t);
        let sh = transfer_field(self.mesh, self.mech_layout(), &mech_now.sigma_h, self.layout());
        (0..self.n_unknowns())
            .map(|i| self.lattice.cl_from_mu(mu[i], sh[i], temperature))
            .collect()
    }

    /// Assembles residual and Jacobian at the potential iterate `mu_new`.
    pub fn assemble(
        &self,
        mu_new: &DVector<f64>,
        state: &TransportState,
        inputs: &StepInputs,
    ) -> Result<(SparseSystem, Vec<DVector<f64>>)> {
        let layout = self.layout();
        let mech_layout = self.mech_layout();
        let tw = inputs.weights;
        let n_hist = tw.hist.len();
        let temperature = self.thermal.temperature(self.lattice.temperature, inputs.t_new);
        let d_l = self.thermal.diffusivity(self.lattice.d_l, temperature);
        let rt = self.lattice.gas_constant * temperature;
        let n_l = self.lattice.n_l;
        if inputs.sigma_h_rate.len() != mech_layout.n_nodes() {
            return Err(Error::Assembly(
                "chemical-potential form requires the nodal sigma_h rate".into(),
            ));
        }

        // node-local quantities for kinetic traps
        let sh_on_conc =
            transfer_field(self.mesh, mech_layout, &inputs.mech_now.sigma_h, layout);
        let eps_p_on_conc =
            transfer_field(self.mesh, mech_layout, &inputs.mech_now.eps_p, layout);
        let eps_p_rate_on_conc =
            transfer_field(self.mesh, mech_layout, &inputs.mech_now.eps_p_rate, layout);

        let n = self.n_unknowns();
        let kin = self.kinetic_traps();
        let mut trap_fields = Vec::with_capacity(kin.len());
        let mut kin_rate = vec![0.0; n];
        let mut kin_drate_dmu = vec![0.0; n];
        for (slot, &ti) in kin.iter().enumerate() {
            let tr = &self.traps[ti];
            let (kappa, lambda) = tr.frequencies(temperature).expect("kinetic trap");
            let option = kinetic_option(tr);
            let hist = &state.trap_fields[slot];
            let mut new_field = DVector::zeros(n);
            for i in 0..n {
                let c_l = self.lattice.cl_from_mu(mu_new[i], sh_on_conc[i], temperature);
                let dcl_dmu = c_l / rt;
                let h = hist.dof_history(i, tw.hist.len());
                let hsum = tw.history_sum(&h);
                let n_t = tr.n_t(eps_p_on_conc[i]);
                match option {
                    KineticOption::OptionOne => {
                        let theta = option1_update(tw.c0, hsum, c_l, kappa, lambda, n_l);
                        let dtheta = option1_dcl(tw.c0, hsum, c_l, kappa, lambda, n_l) * dcl_dmu;
                        new_field[i] = theta;
                        kin_rate[i] += n_t * (tw.c0 * theta + hsum);
                        kin_drate_dmu[i] += n_t * tw.c0 * dtheta;
                        if self.option1_strain_term {
                            kin_rate[i] += theta * tr.dn_dep(eps_p_on_conc[i]) * eps_p_rate_on_conc[i];
                            kin_drate_dmu[i] +=
                                dtheta * tr.dn_dep(eps_p_on_conc[i]) * eps_p_rate_on_conc[i];
                        }
                    }
                    KineticOption::OptionTwo => {
                        let ct = option2_update(tw.c0, hsum, c_l, n_t, kappa, lambda, n_l);
                        let dct = option2_dcl(tw.c0, hsum, c_l, n_t, kappa, lambda, n_l) * dcl_dmu;
                        new_field[i] = ct;
                        kin_rate[i] += tw.c0 * ct + hsum;
                        kin_drate_dmu[i] += tw.c0 * dct;
                    }
                }
            }
            trap_fields.push(new_field);
        }

        let oriani_traps: Vec<&TrapSpec> = self.traps.iter().filter(|t| !t.is_kinetic()).collect();

        let mut sys = SparseSystem::new(n);
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

                let mut mu = 0.0;
                let mut grad_mu = [0.0; 2];
                for (i, &node) in nodes.iter().enumerate() {
                    mu += phi[i] * mu_new[node as usize];
                    grad_mu[0] += grad[i][0] * mu_new[node as usize];
                    grad_mu[1] += grad[i][1] * mu_new[node as usize];
                }
                let mut mu_hist = [0.0f64; 4];
                for k in 0..n_hist {
                    let lvl = &state.conc.levels[k];
                    for (i, &node) in nodes.iter().enumerate() {
                        mu_hist[k] += phi[i] * lvl[node as usize];
                    }
                }
                let mudot = tw.c0 * mu + (0..n_hist).map(|k| tw.hist[k] * mu_hist[k]).sum::<f64>();

                let mut sigma_h = 0.0;
                let mut sigma_rate = 0.0;
                let mut eps_p = 0.0;
                let mut eps_p_rate = 0.0;
                for (i, &mn) in mech_nodes.iter().enumerate() {
                    let p = mech_basis.phi[q][i];
                    sigma_h += p * inputs.mech_now.sigma_h[mn as usize];
                    sigma_rate += p * inputs.sigma_h_rate[mn as usize];
                    eps_p += p * inputs.mech_now.eps_p[mn as usize];
                    eps_p_rate += p * inputs.mech_now.eps_p_rate[mn as usize];
                }

                let c_l = self.lattice.cl_from_mu(mu, sigma_h, temperature);
                let dcl_dmu = c_l / rt;

                // D_bar and its concentration sensitivity
                let mut dbar = 1.0;
                let mut ddbar_dcl = 0.0;
                let mut krom_sink = 0.0;
                let mut dkrom_dcl = 0.0;
                for tr in &oriani_traps {
                    let ln_kt = tr.ln_kt(temperature);
                    let n_t = tr.n_t(eps_p);
                    let first = dct_dcl(c_l, n_t, ln_kt, n_l, self.variant);
                    dbar += first;
                    ddbar_dcl += d2ct_dcl2(c_l, n_t, ln_kt, n_l, self.variant);
                    if self.krom && tr.density.strain_dependent() {
                        let theta = oriani_theta_t(ln_kt, c_l, n_l);
                        krom_sink += theta * tr.dn_dep(eps_p) * eps_p_rate;
                        dkrom_dcl += (first / n_t.max(1e-300)) * tr.dn_dep(eps_p) * eps_p_rate;
                    }
                }

                let d_a = dbar * c_l / rt;
                let dd_a_dcl = (dbar + c_l * ddbar_dcl) / rt;
                let c_d = d_l * c_l / rt;
                let dc_d_dcl = d_l / rt;
                // source f = -d_a V_H sigma_rate - krom - kinetic
                let mut kin_rate_q = 0.0;
                for (i, &node) in nodes.iter().enumerate() {
                    kin_rate_q += phi[i] * kin_rate[node as usize];
                }
                let f_src = -d_a * self.lattice.v_h * sigma_rate - krom_sink - kin_rate_q;
                let df_dcl =
                    -dd_a_dcl * self.lattice.v_h * sigma_rate - dkrom_dcl;

                for i in 0..nn {
                    fe[i] += w * phi[i] * (d_a * mudot - f_src);
                    fe[i] += w * (grad[i][0] * c_d * grad_mu[0] + grad[i][1] * c_d * grad_mu[1]);
                    for j in 0..nn {
                        let dcl_j = dcl_dmu * phi[j];
                        let mut kij = phi[i]
                            * (d_a * tw.c0 * phi[j] + dd_a_dcl * dcl_j * mudot - df_dcl * dcl_j);
                        kij += grad[i][0] * (c_d * grad[j][0] + dc_d_dcl * dcl_j * grad_mu[0])
                            + grad[i][1] * (c_d * grad[j][1] + dc_d_dcl * dcl_j * grad_mu[1]);
                        ke[(i, j)] += w * kij;
                    }
                }
                // kinetic reaction sensitivity (nodal elimination)
                for i in 0..nn {
                    for (j, &node_j) in nodes.iter().enumerate() {
                        ke[(i, j)] += w * phi[i] * basis.phi[q][j] * kin_drate_dmu[node_j as usize];
                    }
                }
            }
            let gdofs: Vec<usize> = nodes.iter().map(|&n| n as usize).collect();
            sys.add_block(&gdofs, &ke, &(-fe));
        }
        Ok((sys, trap_fields))
    }

    /// One implicit solve (scaled Newton).
    pub fn solve_step(
        &self,
        state: &TransportState,
        inputs: &StepInputs,
        scale: f64,
    ) -> Result<(DVector<f64>, Vec<DVector<f64>>, usize)> {
        let mut mu = state.conc.current().clone();
        let targets = self.dirichlet_targets(inputs.t_new)?;
        let mut ref_res = 0.0f64;
        for it in 0..self.max_newton {
            let (mut sys, _) = self.assemble(&mu, state, inputs)?;
            let res_norm = rms(sys.raw_rhs());
            if it == 0 {
                ref_res = res_norm.max(1e-300);
            }
            for &(node, value) in &targets {
                sys.set_dirichlet(node, value - mu[node]);
            }
            let dmu = sys.solve()?.clone();
            let dmu_norm = rms(&dmu) / scale.max(1e-30);
            mu += &dmu;
            let res_ok = res_norm <= self.newton_tol * ref_res || res_norm == 0.0;
            if dmu_norm <= self.newton_tol && (res_ok || it >= 1) {
                let (_, traps) = self.assemble(&mu, state, inputs)?;
                return Ok((mu, traps, it + 1));
            }
        }
        Err(Error::NewtonDiverged { iterations: self.max_newton, residual: ref_res })
    }
}
