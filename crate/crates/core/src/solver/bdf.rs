//! Variable-step BDF1/BDF2 time-derivative stencils and the local error
//! estimate used by the adaptive controller.

use nalgebra::DVector;

/// Weights of the implicit time-derivative stencil
/// `dy/dt ~ c0 * y_new + sum_k hist[k] * y_(n-k)`.
#[derive(Debug, Clone)]
pub struct TimeWeights {
    pub c0: f64,
    pub hist: Vec<f64>,
    pub dt: f64,
    /// Effective order of this stencil (1 or 2).
    pub order: u8,
}

impl TimeWeights {
    pub fn bdf1(dt: f64) -> Self {
        TimeWeights { c0: 1.0 / dt, hist: vec![-1.0 / dt], dt, order: 1 }
    }

    /// Variable-step BDF2 with current step `dt` and previous step `dt_prev`.
    pub fn bdf2(dt: f64, dt_prev: f64) -> Self {
        let rho = dt / dt_prev;
        let c0 = (1.0 + 2.0 * rho) / ((1.0 + rho) * dt);
        let w1 = -(1.0 + rho) / dt;
        let w2 = rho * rho / ((1.0 + rho) * dt);
        TimeWeights { c0, hist: vec![w1, w2], dt, order: 2 }
    }

    /// Weighted history sum for a scalar trajectory `[y_n, y_(n-1), ...]`.
    pub fn history_sum(&self, history: &[f64]) -> f64 {
        self.hist
            .iter()
            .zip(history)
            .map(|(&w, &y)| w * y)
            .sum()
    }

    /// Discrete rate of a scalar quantity.
    pub fn rate(&self, y_new: f64, history: &[f64]) -> f64 {
        self.c0 * y_new + self.history_sum(history)
    }
}

/// Rolling solution history for one unknown vector.
#[derive(Debug, Clone)]
pub struct TimeHistory {
    /// `levels[0]` is `y_n`, `levels[1]` is `y_(n-1)`, ...
    pub levels: Vec<DVector<f64>>,
    pub dts: Vec<f64>,
    capacity: usize,
}

impl TimeHistory {
    pub fn new(y0: DVector<f64>) -> Self {
        TimeHistory { levels: vec![y0], dts: Vec::new(), capacity: 4 }
    }

    pub fn current(&self) -> &DVector<f64> {
        &self.levels[0]
    }

    /// Weights for the next implicit step of the requested order, degraded
    /// to BDF1 while the history is short.
    pub fn weights(&self, dt: f64, order: u8) -> TimeWeights {
        if order >= 2 && self.levels.len() >= 2 && !self.dts.is_empty() {
            TimeWeights::bdf2(dt, self.dts[0])
        } else {
            TimeWeights::bdf1(dt)
        }
    }

    /// History values `[y_n[i], y_(n-1)[i], ...]` for one dof.
    pub fn dof_history(&self, i: usize, n: usize) -> Vec<f64> {
        self.levels.iter().take(n).map(|l| l[i]).collect()
    }

    pub fn push(&mut self, y: DVector<f64>, dt: f64) {
        self.levels.insert(0, y);
        self.dts.insert(0, dt);
        self.levels.truncate(self.capacity);
        self.dts.truncate(self.capacity);
    }
}

/// Scaled WRMS local-error estimate comparing the implicit solution with an
/// explicit polynomial predictor of matching order. Returns `None` while the
/// history is too short to form the predictor.
pub fn estimate_local_error(
    y_new: &DVector<f64>,
    history: &TimeHistory,
    dt: f64,
    order: u8,
    scales: &DVector<f64>,
) -> Option<f64> {
    let n = y_new.len();
    let wrms = |e: &DVector<f64>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            let w = e[i] / scales[i];
            s += w * w;
        }
        (s / n as f64).sqrt()
    };
    if order <= 1 {
        // linear extrapolation through (y_n, y_(n-1))
        if history.levels.len() < 2 {
            return None;
        }
        let rho = dt / history.dts[0];
        let y_pred = &history.levels[0] + (&history.levels[0] - &history.levels[1]) * rho;
        Some(wrms(&(y_new - y_pred)) / 2.0)
    } else {
        // quadratic extrapolation through the last three levels
        if history.levels.len() < 3 || history.dts.len() < 2 {
            return estimate_local_error(y_new, history, dt, 1, scales);
        }
        let (h1, h2) = (history.dts[0], history.dts[1]);
        let d1 = (&history.levels[0] - &history.levels[1]) / h1;
        let d2 = (&history.levels[1] - &history.levels[2]) / h2;
        let dd = (&d1 - &d2) / (h1 + h2);
        let y_pred = &history.levels[0] + d1 * dt + dd * (dt * (dt + h1));
        Some(wrms(&(y_new - y_pred)) / 3.0)
    }
}
