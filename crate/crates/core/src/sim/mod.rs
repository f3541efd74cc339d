//! The coupled crack-tip simulation driver: adaptive BDF stepping over the
//! mechanics and transport solves with monolithic or staggered coupling,
//! post-acceptance concentration clamping, and snapshot access for output.

use nalgebra::DVector;

use crate::fem::{transfer_field, DofMap, ElemEval, FieldLayout, Mesh};
use crate::mechanics::{BoundaryLayerLoad, MechModel, MechState, RecoveredFields, StressSource};
use crate::solver::{estimate_local_error, Coupling, SolveStats, StepController};
use crate::transport::cl_form::kinetic_option;
use crate::transport::{ClProblem, KineticOption, MuProblem, StepInputs, TransportState};
use crate::{Error, Result};

/// Which primal variable the transport solve uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Formulation {
    #[default]
    Cl,
    Mu,
}

/// Transport problem of either formulation.
pub enum Transport<'a> {
    Cl(ClProblem<'a>),
    Mu(MuProblem<'a>),
}

impl<'a> Transport<'a> {
    pub fn traps(&self) -> &[crate::transport::TrapSpec] {
        match self {
            Transport::Cl(p) => &p.traps,
            Transport::Mu(p) => &p.traps,
        }
    }

    pub fn layout(&self) -> &FieldLayout {
        match self {
            Transport::Cl(p) => p.layout(),
            Transport::Mu(p) => p.layout(),
        }
    }

    pub fn mech_field(&self) -> usize {
        match self {
            Transport::Cl(p) => p.mech_field,
            Transport::Mu(p) => p.mech_field,
        }
    }

    fn lattice(&self) -> &crate::transport::LatticeParams {
        match self {
            Transport::Cl(p) => &p.lattice,
            Transport::Mu(p) => &p.lattice,
        }
    }

    fn temperature_at(&self, t: f64) -> f64 {
        let base = self.lattice().temperature;
        match self {
            Transport::Cl(p) => p.thermal.temperature(base, t),
            Transport::Mu(p) => p.thermal.temperature(base, t),
        }
    }
}

/// One accepted time level of the coupled state.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    /// Lattice concentration on the transport field nodes \[mol/m³\].
    pub c_l: Vec<f64>,
    /// Per-trap trapped concentration on the transport field nodes.
    pub c_t: Vec<Vec<f64>>,
    pub sigma_h: Vec<f64>,
    pub eps_p: Vec<f64>,
    pub u: Option<DVector<f64>>,
}

/// The coupled simulation. Owns all evolving state; borrows the mesh, dof
/// map and problem definitions.
pub struct Simulation<'a> {
    pub mesh: &'a Mesh,
    pub dofs: &'a DofMap,
    pub mech: Option<MechModel<'a>>,
    pub stress_source: StressSource,
    pub load: BoundaryLayerLoad,
    pub transport: Transport<'a>,
    pub controller: StepController,
    /// Post-acceptance lower clamp on the lattice concentration.
    pub clamp: bool,
    /// Feed the total hydrogen concentration into the yield softening law.
    pub softening_coupled: bool,

    pub t: f64,
    pub dt: f64,
    pub u: DVector<f64>,
    pub mech_gauss: MechState,
    /// Recovered mechanics fields, newest first (aligned with the transport
    /// history levels).
    pub mech_fields: Vec<RecoveredFields>,
    pub time_levels: Vec<f64>,
    pub state: TransportState,
    pub stats: SolveStats,
    conc_scale: f64,
    node_volumes: Vec<f64>,
}

/// Outcome of one attempted step.
#[derive(Debug, Clone, Copy)]
pub struct StepOutcome {
    pub accepted: bool,
    pub t: f64,
    pub dt_used: f64,
    pub error_estimate: f64,
}

impl<'a> Simulation<'a> {
    /// Builds the simulation at `t = 0` from an initial uniform
    /// concentration. `traps_in_equilibrium` controls the kinetic trap
    /// initial state.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mesh: &'a Mesh,
        dofs: &'a DofMap,
        mech: Option<MechModel<'a>>,
        stress_source: StressSource,
        load: BoundaryLayerLoad,
        transport: Transport<'a>,
        controller: StepController,
        clamp: bool,
        c0: f64,
        traps_in_equilibrium: bool,
    ) -> Result<Self> {
        let sh_layout = dofs.field(transport.mech_field());

        // initial mechanics fields
        let (u, mech_gauss, mech0) = if let Some(model) = &mech {
            let state = MechState::new(mesh, dofs, model.u_field);
            let u = DVector::zeros(model.n_udofs());
            let fields = model.recover_fields(&state, sh_layout)?;
            (u, state, fields)
        } else {
            let fields = frozen_fields(&stress_source, sh_layout, load.k_at(0.0))?;
            (DVector::zeros(0), MechState::default(), fields)
        };

        let state = match &transport {
            Transport::Cl(p) => p.initial_state(c0, traps_in_equilibrium),
            Transport::Mu(p) => p.initial_state(c0, &mech0.sigma_h)?,
        };

        let conc_scale = match &transport {
            Transport::Cl(_) => c0.abs().max(1e-30),
            Transport::Mu(_) => state.conc.current().amax().max(1e-30),
        };

        let node_volumes = lumped_volumes(mesh, transport.layout());
        let softening_coupled = mech.as_ref().map(|m| m.params.zeta != 1.0).unwrap_or(false);

        Ok(Simulation {
            mesh,
            dofs,
            mech,
            stress_source,
            load,
            transport,
            controller: controller.clone(),
            clamp,
            softening_coupled,
            t: 0.0,
            dt: controller.dt_init,
            u,
            mech_gauss,
            mech_fields: vec![mech0],
            time_levels: vec![0.0],
            state,
            stats: SolveStats::default(),
            conc_scale,
            node_volumes,
        })
    }

    /// Lattice concentration on the transport nodes at the current state.
    pub fn cl_nodal(&self) -> Vec<f64> {
        match &self.transport {
            Transport::Cl(_) => self.state.conc.current().iter().cloned().collect(),
            Transport::Mu(p) => {
                p.cl_nodal(self.state.conc.current(), &self.mech_fields[0], self.t)
            }
        }
    }

    /// Per-trap trapped concentration on the transport nodes.
    pub fn ct_nodal(&self) -> Vec<Vec<f64>> {
        let layout = self.transport.layout();
        let lattice = self.transport.lattice();
        let temperature = self.transport.temperature_at(self.t);
        let eps_p = transfer_field(
            self.mesh,
            self.dofs.field(self.transport.mech_field()),
            &self.mech_fields[0].eps_p,
            layout,
        );
        let c_l = self.cl_nodal();
        let traps = self.transport.traps();
        let kinetic: Vec<usize> = traps
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_kinetic())
            .map(|(i, _)| i)
            .collect();
        let mut out = Vec::with_capacity(traps.len());
        for (ti, tr) in traps.iter().enumerate() {
            if tr.is_kinetic() {
                let slot = kinetic.iter().position(|&k| k == ti).unwrap();
                let aux = self.state.trap_fields[slot].current();
                let vals: Vec<f64> = (0..layout.n_nodes())
                    .map(|i| match kinetic_option(tr) {
                        KineticOption::OptionOne => tr.n_t(eps_p[i]) * aux[i],
                        KineticOption::OptionTwo => aux[i],
                    })
                    .collect();
                out.push(vals);
            } else {
                let vals: Vec<f64> = (0..layout.n_nodes())
                    .map(|i| {
                        crate::transport::oriani_ct_ln(
                            c_l[i].max(0.0),
                            tr.n_t(eps_p[i]),
                            tr.ln_kt(temperature),
                            lattice.n_l,
                        )
                    })
                    .collect();
                out.push(vals);
            }
        }
        out
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            t: self.t,
            c_l: self.cl_nodal(),
            c_t: self.ct_nodal(),
            sigma_h: self.mech_fields[0].sigma_h.clone(),
            eps_p: self.mech_fields[0].eps_p.clone(),
            u: if self.mech.is_some() { Some(self.u.clone()) } else { None },
        }
    }

    /// Total hydrogen per transport node in atoms per lattice site.
    fn softening_concentration(
        &self,
        c_l: &[f64],
        trap_fields: &[DVector<f64>],
        eps_p_field: &[f64],
    ) -> Vec<f64> {
        let layout = self.transport.layout();
        let lattice = self.transport.lattice();
        let temperature = lattice.temperature;
        let eps_p = transfer_field(
            self.mesh,
            self.dofs.field(self.transport.mech_field()),
            eps_p_field,
            layout,
        );
        let traps = self.transport.traps();
        let kinetic: Vec<usize> = traps
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_kinetic())
            .map(|(i, _)| i)
            .collect();
        (0..layout.n_nodes())
            .map(|i| {
                let mut total = c_l[i].max(0.0);
                for (ti, tr) in traps.iter().enumerate() {
                    if tr.is_kinetic() {
                        let slot = kinetic.iter().position(|&k| k == ti).unwrap();
                        total += match kinetic_option(tr) {
                            KineticOption::OptionOne => tr.n_t(eps_p[i]) * trap_fields[slot][i],
                            KineticOption::OptionTwo => trap_fields[slot][i],
                        };
                    } else {
                        total += crate::transport::oriani_ct_ln(
                            c_l[i].max(0.0),
                            tr.n_t(eps_p[i]),
                            tr.ln_kt(temperature),
                            lattice.n_l,
                        );
                    }
                }
                total / lattice.n_l
            })
            .collect()
    }

    /// Mechanics fields at trial time, given a softening concentration
    /// iterate (atoms per site) on the transport layout.
    fn mech_at(
        &self,
        t_try: f64,
        dt: f64,
        soft_c: Option<&[f64]>,
    ) -> Result<(DVector<f64>, MechState, RecoveredFields, usize)> {
        let sh_layout = self.dofs.field(self.transport.mech_field());
        if let Some(model) = &self.mech {
            let conc = soft_c.map(|c| (self.transport.layout(), c));
            let sol = model.solve_step(t_try, &self.u, &self.mech_gauss, conc, dt)?;
            let fields = model.recover_fields(&sol.state, sh_layout)?;
            Ok((sol.u, sol.state, fields, sol.newton_iterations))
        } else {
            let fields = frozen_fields(&self.stress_source, sh_layout, self.load.k_at(t_try))?;
            Ok((DVector::zeros(0), MechState::default(), fields, 0))
        }
    }

    /// One coupled solve at trial time; returns the new fields and the
    /// iteration/pass counts.
    #[allow(clippy::type_complexity)]
    fn coupled_solve(
        &self,
        t_try: f64,
        dt: f64,
    ) -> Result<(
        DVector<f64>,
        Vec<DVector<f64>>,
        DVector<f64>,
        MechState,
        RecoveredFields,
        usize,
        usize,
    )> {
        let (n_passes, pass_tol) = match self.controller.coupling {
            Coupling::StaggeredSingle => (1, f64::INFINITY),
            Coupling::StaggeredMulti => {
                (self.controller.max_passes, self.controller.multipass_tol)
            }
            Coupling::Monolithic => (self.controller.max_newton, self.controller.newton_tol),
        };

        let mut soft_c: Option<Vec<f64>> = if self.softening_coupled {
            let trap_now: Vec<DVector<f64>> = self
                .state
                .trap_fields
                .iter()
                .map(|h| h.current().clone())
                .collect();
            Some(self.softening_concentration(
                &self.cl_nodal(),
                &trap_now,
                &self.mech_fields[0].eps_p,
            ))
        } else {
            None
        };

        let mut newton_total = 0usize;
        let mut last: Option<(
            DVector<f64>,
            Vec<DVector<f64>>,
            DVector<f64>,
            MechState,
            RecoveredFields,
        )> = None;
        let mut passes_done = 0usize;
        for pass in 0..n_passes {
            passes_done = pass + 1;
            let (u_new, gauss, fields, mech_iters) = self.mech_at(t_try, dt, soft_c.as_deref())?;
            newton_total += mech_iters;

            let tw = self.state.conc.weights(dt, self.controller.order);
            let n_hist = tw.hist.len();
            if self.mech_fields.len() < n_hist || self.time_levels.len() < n_hist {
                return Err(Error::Assembly("history shorter than the BDF stencil".into()));
            }
            let sigma_rate: Vec<f64> = fields
                .sigma_h
                .iter()
                .zip(&self.mech_fields[0].sigma_h)
                .map(|(&now, &prev)| (now - prev) / dt)
                .collect();
            let inputs = StepInputs {
                t_new: t_try,
                weights: &tw,
                mech_now: &fields,
                mech_hist: &self.mech_fields,
                t_hist: &self.time_levels,
                sigma_h_rate: &sigma_rate,
            };
            let (conc, trap_fields, iters) = match &self.transport {
                Transport::Cl(p) => p.solve_step(&self.state, &inputs, self.conc_scale)?,
                Transport::Mu(p) => p.solve_step(&self.state, &inputs, self.conc_scale)?,
            };
            newton_total += iters;

            let converged = if let Some((prev_conc, ..)) = &last {
                (&conc - prev_conc).amax() <= pass_tol * self.conc_scale
            } else {
                n_passes == 1
            };
            let fields_for_next = fields.clone();
            last = Some((conc, trap_fields, u_new, gauss, fields));
            if converged {
                break;
            }
            // a second pass only changes anything when transport feeds back
            if !self.softening_coupled {
                break;
            }
            if pass + 1 == n_passes {
                return Err(Error::MultiPassDiverged { passes: n_passes });
            }
            let (conc, trap_fields, ..) = last.as_ref().unwrap();
            let c_l: Vec<f64> = match &self.transport {
                Transport::Cl(_) => conc.iter().cloned().collect(),
                Transport::Mu(p) => p.cl_nodal(conc, &fields_for_next, t_try),
            };
            soft_c = Some(self.softening_concentration(&c_l, trap_fields, &fields_for_next.eps_p));
        }
        let (conc, trap_fields, u_new, gauss, fields) = last.unwrap();
        Ok((conc, trap_fields, u_new, gauss, fields, newton_total, passes_done))
    }

    fn effective_order(&self) -> u8 {
        if self.controller.order >= 2 && self.state.conc.levels.len() >= 2 {
            2
        } else {
            1
        }
    }

    /// Attempts one adaptive step; on acceptance the state advances.
    pub fn advance(&mut self) -> Result<StepOutcome> {
        let dt = self.dt;
        let t_try = self.t + dt;
        match self.try_step(t_try, dt) {
            Ok((true, est)) => {
                self.dt = self.controller.next_dt(dt, est, self.effective_order());
                Ok(StepOutcome { accepted: true, t: self.t, dt_used: dt, error_estimate: est })
            }
            Ok((false, est)) => {
                self.stats.rejected_steps += 1;
                self.dt = self
                    .controller
                    .next_dt(dt, est, self.effective_order())
                    .min(dt * 0.5);
                if self.dt <= self.controller.dt_min {
                    return Err(Error::StepSizeUnderflow {
                        t: self.t,
                        dt: self.dt,
                        dt_min: self.controller.dt_min,
                    });
                }
                Ok(StepOutcome { accepted: false, t: self.t, dt_used: dt, error_estimate: est })
            }
            Err(
                Error::NewtonDiverged { .. }
                | Error::MultiPassDiverged { .. }
                | Error::OccupancyOutOfRange { .. },
            ) => {
                self.stats.rejected_steps += 1;
                self.dt = dt * 0.5;
                if self.dt <= self.controller.dt_min {
                    return Err(Error::StepSizeUnderflow {
                        t: self.t,
                        dt: self.dt,
                        dt_min: self.controller.dt_min,
                    });
                }
                Ok(StepOutcome {
                    accepted: false,
                    t: self.t,
                    dt_used: dt,
                    error_estimate: f64::NAN,
                })
            }
            Err(e) => Err(e),
        }
    }

    /// Runs one trial step; `Ok((true, err))` means accepted.
    fn try_step(&mut self, t_try: f64, dt: f64) -> Result<(bool, f64)> {
        let (mut conc, trap_fields, u_new, gauss, fields, newton, passes) =
            self.coupled_solve(t_try, dt)?;

        // local error estimate on the primal transport field
        let scales = DVector::from_element(conc.len(), self.conc_scale);
        let est =
            estimate_local_error(&conc, &self.state.conc, dt, self.effective_order(), &scales)
                .unwrap_or(0.0);
        if !self.controller.accept(est) {
            return Ok((false, est));
        }

        // trap bounds gate
        if let Transport::Cl(p) = &self.transport {
            let eps_on_conc = transfer_field(
                self.mesh,
                self.dofs.field(p.mech_field),
                &fields.eps_p,
                p.layout(),
            );
            p.check_trap_bounds(&trap_fields, &eps_on_conc)?;
        }

        // accept: clamp, push history, bookkeeping
        let mut clamped_mass = 0.0;
        if self.clamp {
            if let Transport::Cl(_) = &self.transport {
                for i in 0..conc.len() {
                    if conc[i] < 0.0 {
                        clamped_mass += -conc[i] * self.node_volumes[i];
                        conc[i] = 0.0;
                    }
                }
            }
        }

        self.state.conc.push(conc, dt);
        for (hist, f) in self.state.trap_fields.iter_mut().zip(trap_fields) {
            hist.push(f, dt);
        }
        self.u = u_new;
        self.mech_gauss = gauss;
        self.mech_fields.insert(0, fields);
        self.mech_fields.truncate(4);
        self.t = t_try;
        self.time_levels.insert(0, t_try);
        self.time_levels.truncate(4);
        self.stats.record_step(t_try, dt, newton, passes, clamped_mass);
        Ok((true, est))
    }

    /// Advances to `t_end`, clipping steps to land exactly on every output
    /// time; invokes the callback after each accepted step with a flag
    /// marking output times.
    pub fn run_to<F>(&mut self, t_end: f64, output_times: &[f64], mut on_step: F) -> Result<()>
    where
        F: FnMut(&Simulation, bool) -> Result<()>,
    {
        let mut outputs: Vec<f64> = output_times
            .iter()
            .cloned()
            .filter(|&t| t > self.t && t < t_end * (1.0 - 1e-12))
            .collect();
        outputs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        while self.t < t_end * (1.0 - 1e-12) {
            let next_stop = outputs.first().cloned().unwrap_or(t_end).min(t_end);
            let dt_saved = self.dt;
            if self.t + self.dt > next_stop {
                self.dt = next_stop - self.t;
            }
            let clipped = self.dt < dt_saved;
            let out = self.advance()?;
            if out.accepted {
                // restore the controller's proposal after a clipped step
                if clipped {
                    self.dt = self.dt.max(dt_saved);
                }
                let mut is_output = false;
                if let Some(&t0) = outputs.first() {
                    if (self.t - t0).abs() <= 1e-9 * t0.abs().max(1.0) {
                        outputs.remove(0);
                        is_output = true;
                    }
                }
                if (self.t - t_end).abs() <= 1e-9 * t_end.abs().max(1.0) {
                    is_output = true;
                }
                on_step(self, is_output)?;
            }
        }
        Ok(())
    }
}

/// Frozen-field evaluation on a field layout.
fn frozen_fields(
    source: &StressSource,
    layout: &FieldLayout,
    k_i: f64,
) -> Result<RecoveredFields> {
    let n = layout.n_nodes();
    let mut sigma_h = vec![0.0; n];
    let mut eps_p = vec![0.0; n];
    let mut eps_p_rate = vec![0.0; n];
    for i in 0..n {
        let v = source.evaluate(layout.coords[i], k_i)?;
        sigma_h[i] = v[0];
        eps_p[i] = v[1];
        eps_p_rate[i] = v[2];
    }
    Ok(RecoveredFields { sigma_h, eps_p, eps_p_rate })
}

/// Lumped nodal volumes `int phi_i dV` used for clamped-mass accounting.
fn lumped_volumes(mesh: &Mesh, layout: &FieldLayout) -> Vec<f64> {
    let mut vol = vec![0.0; layout.n_nodes()];
    for e in 0..mesh.n_elements() {
        let fam = layout.family(mesh.elements[e].shape);
        let ev = ElemEval::new(mesh, e, fam.quadrature());
        let basis = ev.basis(layout.spec.order);
        for q in 0..ev.quad.len() {
            for (i, &node) in layout.elem_nodes[e].iter().enumerate() {
                vol[node as usize] += ev.wdetj[q] * basis.phi[q][i];
            }
        }
    }
    vol
}
