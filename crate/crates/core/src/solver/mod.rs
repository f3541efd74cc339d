//! Time integration and nonlinear solution control: variable-step BDF1/BDF2
//! weights, local error estimation, the adaptive step controller, solution
//! scaling and solve statistics.

pub mod bdf;

pub use bdf::{estimate_local_error, TimeHistory, TimeWeights};

/// Mechanics/transport coupling scheme for one time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coupling {
    /// One Newton loop over the concatenated unknowns.
    Monolithic,
    /// Mechanics then transport, once per step.
    #[default]
    StaggeredSingle,
    /// Mechanics/transport passes iterated to cross-field convergence.
    StaggeredMulti,
}

/// Adaptive step controller settings and state.
#[derive(Debug, Clone)]
pub struct StepController {
    /// BDF order, 1 or 2.
    pub order: u8,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Relative tolerance on the scaled local error.
    pub rel_tol: f64,
    /// Safety factor in the step-size update.
    pub safety: f64,
    pub max_newton: usize,
    pub newton_tol: f64,
    pub coupling: Coupling,
    pub multipass_tol: f64,
    pub max_passes: usize,
}

impl Default for StepController {
    fn default() -> Self {
        StepController {
            order: 2,
            dt_init: 1e-3,
            dt_min: 1e-12,
            dt_max: f64::INFINITY,
            rel_tol: 1e-4,
            safety: 0.9,
            max_newton: 25,
            newton_tol: 1e-6,
            coupling: Coupling::StaggeredSingle,
            multipass_tol: 1e-4,
            max_passes: 10,
        }
    }
}

impl StepController {
    /// Next step size after a step with scaled error `err`
    /// (`dt * clip(safety * (tol/err)^(1/(order+1)), 0.2, 2.5)`).
    pub fn next_dt(&self, dt: f64, err: f64, order: u8) -> f64 {
        let factor = if err <= 0.0 {
            2.5
        } else {
            (self.safety * (self.rel_tol / err).powf(1.0 / (order as f64 + 1.0))).clamp(0.2, 2.5)
        };
        (dt * factor).clamp(self.dt_min, self.dt_max)
    }

    pub fn accept(&self, err: f64) -> bool {
        err <= self.rel_tol
    }
}

/// Per-run solve accounting, streamed to CSV by the run drivers. One entry
/// per accepted step in the parallel vectors.
#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub times: Vec<f64>,
    pub dt_history: Vec<f64>,
    pub newton_per_step: Vec<usize>,
    pub passes: Vec<usize>,
    pub clamped_mass: Vec<f64>,
    pub wall_time: f64,
}

impl SolveStats {
    pub fn attempted(&self) -> usize {
        self.accepted_steps + self.rejected_steps
    }

    pub fn newton_total(&self) -> usize {
        self.newton_per_step.iter().sum()
    }

    pub fn total_clamped_mass(&self) -> f64 {
        self.clamped_mass.iter().sum()
    }

    pub fn record_step(&mut self, t: f64, dt: f64, newton: usize, passes: usize, clamped: f64) {
        self.accepted_steps += 1;
        self.times.push(t);
        self.dt_history.push(dt);
        self.newton_per_step.push(newton);
        self.passes.push(passes);
        self.clamped_mass.push(clamped);
    }

    /// One CSV row per accepted step.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,t,dt,newton_iterations,newton_cumulative,passes,clamped_mass\n");
        let mut cumulative = 0usize;
        for i in 0..self.times.len() {
            cumulative += self.newton_per_step[i];
            s.push_str(&format!(
                "{},{:.12e},{:.12e},{},{},{},{:.12e}\n",
                i,
                self.times[i],
                self.dt_history[i],
                self.newton_per_step[i],
                cumulative,
                self.passes[i],
                self.clamped_mass[i]
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn controller_clips_growth_and_shrink() {
        let c = StepController { rel_tol: 1e-4, safety: 1.0, ..Default::default() };
        // tiny error: growth capped at 2.5
        assert_eq!(c.next_dt(1.0, 1e-12, 2), 2.5);
        // huge error: shrink floored at 0.2
        assert_eq!(c.next_dt(1.0, 1.0, 2), 0.2);
        // err == tol: factor 1 (radius safety = 1)
        assert!((c.next_dt(1.0, 1e-4, 2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn acceptance_threshold() {
        let c = StepController { rel_tol: 1e-4, ..Default::default() };
        assert!(c.accept(0.9e-4));
        assert!(!c.accept(1.1e-4));
    }
}
