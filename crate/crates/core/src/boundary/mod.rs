//! Concentration and flux boundary conditions: constant and ramped
//! Dirichlet values, the stress-dependent (Sieverts) surface equilibrium,
//! the generalised HER flux with its local coverage solve, and consistent
//! versus diffusive-only insulation.

use crate::{Error, Result};

/// Time ramp applied to the environmental concentration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ramp {
    #[default]
    None,
    /// `sqrt(t/t_load)` up to `t_load` (Sieverts response to a pressure ramp).
    Sqrt,
    /// `t/t_load` up to `t_load`.
    Linear,
}

impl Ramp {
    pub fn factor(&self, t: f64, t_load: f64) -> f64 {
        match self {
            Ramp::None => 1.0,
            Ramp::Sqrt => (t / t_load).clamp(0.0, 1.0).sqrt(),
            Ramp::Linear => (t / t_load).clamp(0.0, 1.0),
        }
    }
}

/// Surface equilibrium with a hydrogen environment. The base concentration
/// is either given directly or derived from solubility and pressure
/// (`C_env = K sqrt(p)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasEquilibriumSpec {
    /// Equilibrium concentration at zero stress \[mol/m³\].
    pub c_env: f64,
    pub ramp: Ramp,
    pub t_load: f64,
    /// Multiply by `exp(V_H sigma_h / RT)` at the boundary.
    pub stress_dependent: bool,
}

impl GasEquilibriumSpec {
    pub fn constant(c_env: f64) -> Self {
        GasEquilibriumSpec { c_env, ramp: Ramp::None, t_load: 1.0, stress_dependent: false }
    }

    pub fn from_sieverts(solubility: f64, pressure: f64) -> f64 {
        solubility * pressure.sqrt()
    }

    /// Dirichlet value at a boundary node with recovered hydrostatic stress
    /// `sigma_h`: `C = C_env * ramp(t) * exp(V_H sigma_h / RT)`.
    pub fn dirichlet_value(&self, sigma_h: f64, t: f64, v_h: f64, rt: f64) -> f64 {
        let base = self.c_env * self.ramp.factor(t, self.t_load);
        if self.stress_dependent {
            base * (v_h * sigma_h / rt).exp()
        } else {
            base
        }
    }
}

/// HER (hydrogen evolution reaction) surface constants, velocity-unit
/// absorption form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HerSpec {
    /// Absorption constant `k*_abs` \[m/s\].
    pub k_abs: f64,
    /// Desorption constant \[m/s\].
    pub k_des: f64,
    /// Volmer charging constant \[mol/m²/s\].
    pub k_c: f64,
    /// Tafel (chemical) recombination constant \[mol/m²/s\].
    pub k_r_chem: f64,
    /// Heyrovsky (electrochemical) recombination constant \[mol/m²/s\].
    pub k_r_elec: f64,
}

impl HerSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k_abs < 0.0
            || self.k_des < 0.0
            || self.k_c < 0.0
            || self.k_r_chem < 0.0
            || self.k_r_elec < 0.0
        {
            return Err(Error::ModellingRange("HER constants must be non-negative".into()));
        }
        if self.k_c > 0.0 && self.k_r_chem + self.k_r_elec <= 0.0 {
            return Err(Error::ModellingRange(
                "charging requires a recombination path (k_r,chem + k_r,elec > 0)".into(),
            ));
        }
        Ok(())
    }

    /// Solves the adsorbed coverage from the absorption/adsorption balance,
    /// the positive root of
    /// `k_r,chem th^2 + (k*_abs N_L e^s + k_des C_L + k_c + k_r,elec) th
    ///  - (k_c + k_des C_L) = 0`
    /// which always lies in [0, 1] for non-negative constants.
    pub fn solve_coverage(&self, c_l: f64, stress_factor: f64, n_l: f64) -> Result<f64> {
        let a = self.k_r_chem;
        let b = self.k_abs * n_l * stress_factor + self.k_des * c_l.max(0.0)
            + self.k_c
            + self.k_r_elec;
        let c = self.k_c + self.k_des * c_l.max(0.0);
        // rationalised root: avoids cancellation when 4ac << b²
        let theta = if b <= 0.0 && c <= 0.0 {
            0.0
        } else {
            2.0 * c / (b + (b * b + 4.0 * a * c).sqrt())
        };
        if !(0.0..=1.0 + 1e-12).contains(&theta) || !theta.is_finite() {
            return Err(Error::CoverageRoot);
        }
        Ok(theta.min(1.0))
    }

    /// Derivative of the coverage root with respect to `C_L` (implicit
    /// differentiation of the quadratic).
    pub fn coverage_dcl(&self, theta: f64, c_l: f64, stress_factor: f64, n_l: f64) -> f64 {
        let a = self.k_r_chem;
        let b = self.k_abs * n_l * stress_factor + self.k_des * c_l.max(0.0)
            + self.k_c
            + self.k_r_elec;
        // d/dC of (a th^2 + b th - c) = 0 with db/dC = k_des, dc/dC = k_des
        let num = self.k_des * (1.0 - theta);
        let den = 2.0 * a * theta + b;
        if den <= 0.0 {
            0.0
        } else {
            num / den
        }
    }

    /// Inward surface flux
    /// `J_in = k*_abs N_L e^s theta - k_des C_L (1 - theta)` \[mol/m²/s\]
    /// and its derivative with respect to `C_L` (coverage sensitivity
    /// included).
    pub fn flux(&self, c_l: f64, stress_factor: f64, n_l: f64) -> Result<(f64, f64)> {
        let theta = self.solve_coverage(c_l, stress_factor, n_l)?;
        let dtheta = self.coverage_dcl(theta, c_l, stress_factor, n_l);
        let j = self.k_abs * n_l * stress_factor * theta - self.k_des * c_l.max(0.0) * (1.0 - theta);
        let dj = self.k_abs * n_l * stress_factor * dtheta - self.k_des * (1.0 - theta)
            + self.k_des * c_l.max(0.0) * dtheta;
        Ok((j, dj))
    }

    /// Equilibrium coverage at zero net adsorption flux:
    /// `k_c (1 - th) = k_r,chem th^2 + k_r,elec th`.
    pub fn equilibrium_coverage(&self) -> f64 {
        let a = self.k_r_chem;
        let b = self.k_c + self.k_r_elec;
        let c = self.k_c;
        if b <= 0.0 && c <= 0.0 {
            0.0
        } else {
            2.0 * c / (b + (b * b + 4.0 * a * c).sqrt())
        }
    }

    /// Surface concentration at the zero-flux fixed point,
    /// `C = (k*_abs N_L / k_des) th_e/(1 - th_e) * e^s`.
    pub fn equilibrium_concentration(&self, stress_factor: f64, n_l: f64) -> f64 {
        let th = self.equilibrium_coverage();
        self.k_abs * n_l / self.k_des * th / (1.0 - th) * stress_factor
    }
}

/// How a tagged surface treats the total flux when no Dirichlet condition
/// applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Insulation {
    /// `(-D grad C + v C) . n = 0`: nothing to assemble (natural condition
    /// of the conservative form).
    #[default]
    Consistent,
    /// Only the diffusive part vanishes; the drift `v C . n` keeps leaking
    /// through the surface. Reproduces the classical inconsistent no-flux
    /// choice and its spurious surface accumulation.
    DiffusiveOnly,
}
