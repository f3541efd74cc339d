//! Small-strain J2 plasticity with power-law isotropic hardening and
//! hydrogen-induced softening of the yield stress. The stress update is the
//! classical radial return in 6-component Voigt form
//! `[xx, yy, zz, xy, yz, zx]` (engineering shear strains).

use crate::{Error, Result};

/// Elastic-plastic constants. The yield stress is
/// `sigma_y = sigma_y0 * f_s(c) * (1 + E*eps_p/sigma_y0)^n_hard`
/// with the softening multiplier `f_s(c) = (zeta - 1) * c + 1` driven by the
/// local hydrogen concentration `c` in atoms per lattice-site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElastoplasticParams {
    /// Young's modulus \[Pa\].
    pub e: f64,
    /// Poisson's ratio.
    pub nu: f64,
    /// Initial yield stress \[Pa\].
    pub sigma_y0: f64,
    /// Hardening exponent in \[0, 1\].
    pub n_hard: f64,
    /// Softening coefficient; 1 disables softening.
    pub zeta: f64,
}

impl ElastoplasticParams {
    pub fn validate(&self) -> Result<()> {
        if self.e <= 0.0 {
            return Err(Error::Material("E must be positive".into()));
        }
        if !(0.0..0.5).contains(&self.nu) {
            return Err(Error::Material("nu must lie in [0, 0.5)".into()));
        }
        if self.sigma_y0 <= 0.0 {
            return Err(Error::Material("sigma_y0 must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.n_hard) {
            return Err(Error::Material("hardening exponent must lie in [0, 1]".into()));
        }
        if self.zeta > 1.0 {
            return Err(Error::Material("softening coefficient must be <= 1".into()));
        }
        Ok(())
    }

    pub fn shear_modulus(&self) -> f64 {
        self.e / (2.0 * (1.0 + self.nu))
    }

    pub fn bulk_modulus(&self) -> f64 {
        self.e / (3.0 * (1.0 - 2.0 * self.nu))
    }

    /// Flow-stress multiplier `(1 + E*eps_p/sigma_y0)^N`.
    pub fn hardening(&self, eps_p: f64) -> f64 {
        debug_assert!(eps_p >= 0.0);
        if self.n_hard == 0.0 {
            return 1.0;
        }
        (1.0 + self.e * eps_p / self.sigma_y0).powf(self.n_hard)
    }

    /// Derivative of [`Self::hardening`] with respect to `eps_p`.
    pub fn hardening_slope(&self, eps_p: f64) -> f64 {
        if self.n_hard == 0.0 {
            return 0.0;
        }
        self.n_hard * (self.e / self.sigma_y0)
            * (1.0 + self.e * eps_p / self.sigma_y0).powf(self.n_hard - 1.0)
    }

    /// Yield-stress multiplier from the local hydrogen content.
    pub fn softening(&self, c: f64) -> Result<f64> {
        let f = softening_multiplier(c, self.zeta);
        if f <= 0.0 {
            return Err(Error::ModellingRange(format!(
                "softening multiplier f_s = {f:.3e} <= 0 at c = {c:.3e}"
            )));
        }
        Ok(f)
    }

    pub fn yield_stress(&self, eps_p: f64, c: f64) -> Result<f64> {
        Ok(self.sigma_y0 * self.softening(c)? * self.hardening(eps_p))
    }

    fn yield_slope(&self, eps_p: f64, c: f64) -> Result<f64> {
        Ok(self.sigma_y0 * self.softening(c)? * self.hardening_slope(eps_p))
    }
}

/// `f_s(c) = (zeta - 1) c + 1`; `zeta = 1` leaves the yield stress unchanged.
pub fn softening_multiplier(c: f64, zeta: f64) -> f64 {
    (zeta - 1.0) * c + 1.0
}

/// State of one Gauss point. Strain vectors carry engineering shear.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GaussState {
    pub strain: [f64; 6],
    pub plastic_strain: [f64; 6],
    /// Equivalent plastic strain (non-decreasing).
    pub eps_p: f64,
    /// Equivalent plastic strain rate over the last step \[1/s\].
    pub eps_p_rate: f64,
    pub stress: [f64; 6],
}

impl GaussState {
    pub fn hydrostatic_stress(&self) -> f64 {
        (self.stress[0] + self.stress[1] + self.stress[2]) / 3.0
    }

    pub fn von_mises(&self) -> f64 {
        let s = deviator(&self.stress);
        von_mises_of_dev(&s)
    }
}

fn deviator(v: &[f64; 6]) -> [f64; 6] {
    let p = (v[0] + v[1] + v[2]) / 3.0;
    [v[0] - p, v[1] - p, v[2] - p, v[3], v[4], v[5]]
}

fn von_mises_of_dev(s: &[f64; 6]) -> f64 {
    let sq = s[0] * s[0] + s[1] * s[1] + s[2] * s[2]
        + 2.0 * (s[3] * s[3] + s[4] * s[4] + s[5] * s[5]);
    (1.5 * sq).sqrt()
}

const RETURN_TOL: f64 = 1e-10;
const RETURN_MAX_ITER: usize = 50;

/// Result of a stress update: the new state and the consistent algorithmic
/// tangent mapping engineering strain increments to stress increments.
pub struct StressUpdate {
    pub state: GaussState,
    pub tangent: [[f64; 6]; 6],
}

/// Radial-return stress update. `strain_new` is the total strain at the end
/// of the step; `c` the local hydrogen concentration entering the softening
/// law; `dt` the step length used for the plastic strain rate.
pub fn radial_return(
    state_n: &GaussState,
    strain_new: [f64; 6],
    params: &ElastoplasticParams,
    c: f64,
    dt: f64,
) -> Result<StressUpdate> {
    let mu = params.shear_modulus();
    let kappa = params.bulk_modulus();
    let lambda = kappa - 2.0 / 3.0 * mu;

    // elastic trial: sigma_tr = C : (strain_new - eps_p_n)
    let mut eel = [0.0; 6];
    for i in 0..6 {
        eel[i] = strain_new[i] - state_n.plastic_strain[i];
    }
    let tr = eel[0] + eel[1] + eel[2];
    let mut sigma_tr = [0.0; 6];
    for i in 0..3 {
        sigma_tr[i] = lambda * tr + 2.0 * mu * eel[i];
    }
    for i in 3..6 {
        sigma_tr[i] = mu * eel[i]; // engineering shear
    }

    let s_tr = deviator(&sigma_tr);
    let q_tr = von_mises_of_dev(&s_tr);
    let sy_n = params.yield_stress(state_n.eps_p, c)?;

    if q_tr <= sy_n * (1.0 + RETURN_TOL) {
        // elastic step
        let state = GaussState {
            strain: strain_new,
            plastic_strain: state_n.plastic_strain,
            eps_p: state_n.eps_p,
            eps_p_rate: 0.0,
            stress: sigma_tr,
        };
        return Ok(StressUpdate { state, tangent: elastic_tangent(lambda, mu) });
    }

    // scalar Newton for the plastic multiplier:
    // g(dg) = q_tr - 3 mu dg - sigma_y(eps_p + dg, c) = 0
    let mut dg = (q_tr - sy_n) / (3.0 * mu + params.yield_slope(state_n.eps_p, c)?.max(0.0));
    let mut converged = false;
    for _ in 0..RETURN_MAX_ITER {
        let ep = state_n.eps_p + dg;
        let g = q_tr - 3.0 * mu * dg - params.yield_stress(ep, c)?;
        let dgdx = -3.0 * mu - params.yield_slope(ep, c)?;
        let step = g / dgdx;
        dg -= step;
        if dg < 0.0 {
            dg = 1e-16;
        }
        if step.abs() <= RETURN_TOL * dg.abs().max(1e-16) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Material(format!(
            "radial return did not converge (q_tr = {q_tr:.3e}, sy = {sy_n:.3e})"
        )));
    }

    let eps_p_new = state_n.eps_p + dg;
    let factor = 1.0 - 3.0 * mu * dg / q_tr;
    let p_tr = (sigma_tr[0] + sigma_tr[1] + sigma_tr[2]) / 3.0;
    let mut stress = [0.0; 6];
    for i in 0..3 {
        stress[i] = p_tr + factor * s_tr[i];
    }
    for i in 3..6 {
        stress[i] = factor * s_tr[i];
    }

    // plastic flow: d eps_p = dg * 3/2 s_tr/q_tr (engineering shear doubled)
    let mut plastic = state_n.plastic_strain;
    for i in 0..3 {
        plastic[i] += dg * 1.5 * s_tr[i] / q_tr;
    }
    for i in 3..6 {
        plastic[i] += dg * 3.0 * s_tr[i] / q_tr;
    }

    let state = GaussState {
        strain: strain_new,
        plastic_strain: plastic,
        eps_p: eps_p_new,
        eps_p_rate: if dt > 0.0 { dg / dt } else { 0.0 },
        stress,
    };

    // consistent tangent (radial return with isotropic hardening)
    let h = params.yield_slope(eps_p_new, c)?;
    let theta = factor;
    let theta_bar = 3.0 * mu / (3.0 * mu + h) - (1.0 - theta);
    let norm = (s_tr[0] * s_tr[0] + s_tr[1] * s_tr[1] + s_tr[2] * s_tr[2]
        + 2.0 * (s_tr[3] * s_tr[3] + s_tr[4] * s_tr[4] + s_tr[5] * s_tr[5]))
        .sqrt();
    let n_hat: Vec<f64> = s_tr.iter().map(|v| v / norm).collect();

    let mut d = [[0.0; 6]; 6];
    // volumetric part
    for i in 0..3 {
        for j in 0..3 {
            d[i][j] += kappa;
        }
    }
    // deviatoric identity (engineering-strain convention)
    for i in 0..3 {
        d[i][i] += 2.0 * mu * theta * (2.0 / 3.0);
        for j in 0..3 {
            if i != j {
                d[i][j] += 2.0 * mu * theta * (-1.0 / 3.0);
            }
        }
    }
    for i in 3..6 {
        d[i][i] += mu * theta;
    }
    // flow-direction rank-one update
    for i in 0..6 {
        for j in 0..6 {
            d[i][j] -= 2.0 * mu * theta_bar * n_hat[i] * n_hat[j];
        }
    }

    Ok(StressUpdate { state, tangent: d })
}

pub fn elastic_tangent(lambda: f64, mu: f64) -> [[f64; 6]; 6] {
    let mut d = [[0.0; 6]; 6];
    for i in 0..3 {
        for j in 0..3 {
            d[i][j] = lambda;
        }
        d[i][i] += 2.0 * mu;
    }
    for i in 3..6 {
        d[i][i] = mu;
    }
    d
}
