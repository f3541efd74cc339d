//! Equilibrium (Oriani) trapping: the trap equilibrium constant, trapped
//! concentration, reaction rate and the operational diffusivity ratio.
//! Strong traps at low temperature push `K_T` past the f64 range, so the
//! internal arithmetic works with `ln K_T` throughout.

use crate::constants::{EXP_GUARD, GAS_CONSTANT};
use crate::transport::TrapSpec;

/// `ln K_T = ln(kappa0/lambda0) + E_B/(R T)`.
pub fn ln_equilibrium_constant(e_b: f64, temperature: f64, ratio: f64) -> f64 {
    ratio.ln() + e_b / (GAS_CONSTANT * temperature)
}

/// Trap equilibrium constant `K_T = (kappa0/lambda0) exp(E_B/RT)`. Evaluated
/// in log space; saturates at `f64::MAX` once the exponent passes the
/// representable range.
pub fn equilibrium_constant(e_b: f64, temperature: f64, ratio: f64) -> f64 {
    let z = ln_equilibrium_constant(e_b, temperature, ratio);
    if z > EXP_GUARD {
        f64::MAX
    } else {
        z.exp()
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 36.0 {
        z
    } else {
        z.exp().ln_1p()
    }
}

fn exp_capped(z: f64) -> f64 {
    z.min(EXP_GUARD).exp()
}

/// Trap occupancy `theta_T = K_T theta_L / (1 + K_T theta_L)`, computed as a
/// logistic in `ln(K_T theta_L)` so saturated traps evaluate cleanly.
pub fn oriani_theta_t(ln_kt: f64, c_l: f64, n_l: f64) -> f64 {
    if c_l <= 0.0 {
        return 0.0;
    }
    let z = ln_kt + (c_l / n_l).ln();
    1.0 / (1.0 + exp_capped(-z))
}

/// Trapped concentration in equilibrium, `C_T = N_T theta_T` \[mol/m³\].
pub fn oriani_ct(c_l: f64, n_t: f64, k_t: f64, n_l: f64) -> f64 {
    oriani_ct_ln(c_l, n_t, k_t.ln(), n_l)
}

pub fn oriani_ct_ln(c_l: f64, n_t: f64, ln_kt: f64, n_l: f64) -> f64 {
    n_t * oriani_theta_t(ln_kt, c_l, n_l)
}

/// Which denominator enters the occupancy derivative and the operational
/// diffusivity: the exact `(K_T - 1)` form or the low-occupancy `K_T` form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OccupancyVariant {
    /// `(1 + (K_T - 1) C_L/N_L)^-2` (exact, default).
    #[default]
    KtMinusOne,
    /// `(1 + K_T C_L/N_L)^-2` (low lattice occupancy).
    Kt,
}

/// `dC_T/dC_L = K_T N_T/N_L / (1 + K C_L/N_L)^2` with `K` per the variant.
pub fn dct_dcl(c_l: f64, n_t: f64, ln_kt: f64, n_l: f64, variant: OccupancyVariant) -> f64 {
    let c = c_l.max(0.0);
    let ln_den = match variant {
        OccupancyVariant::Kt => {
            if c == 0.0 {
                0.0
            } else {
                softplus(ln_kt + (c / n_l).ln())
            }
        }
        OccupancyVariant::KtMinusOne => {
            // 1 + (K-1) c/N_L = 1 + K c/N_L - c/N_L; for K >> 1 the two
            // variants coincide, so branch only at modest K
            let kt = exp_capped(ln_kt);
            if kt < 1e10 {
                (1.0 + (kt - 1.0) * c / n_l).max(1e-300).ln()
            } else if c == 0.0 {
                0.0
            } else {
                softplus(ln_kt + (c / n_l).ln())
            }
        }
    };
    (n_t / n_l) * exp_capped(ln_kt - 2.0 * ln_den)
}

/// Second derivative `d²C_T/dC_L²`, needed by the chemical-potential-form
/// Jacobian: `-2 K_eff/N_L * dC_T/dC_L / (1 + K_eff C_L/N_L)` with `K_eff`
/// per the variant.
pub fn d2ct_dcl2(c_l: f64, n_t: f64, ln_kt: f64, n_l: f64, variant: OccupancyVariant) -> f64 {
    let first = dct_dcl(c_l, n_t, ln_kt, n_l, variant);
    let c = c_l.max(0.0);
    let kt = exp_capped(ln_kt);
    let k_eff = match variant {
        OccupancyVariant::Kt => kt,
        OccupancyVariant::KtMinusOne => kt - 1.0,
    };
    let den = 1.0 + k_eff * c / n_l;
    if !den.is_finite() {
        return 0.0;
    }
    -2.0 * (k_eff / n_l) * first / den
}

/// Non-dimensional operational diffusivity
/// `D_bar = D_L/D_eff = 1 + sum_i dC_T^i/dC_L >= 1`.
pub fn effective_diffusivity_ratio(
    c_l: f64,
    traps: &[TrapSpec],
    eps_p: f64,
    temperature: f64,
    n_l: f64,
    variant: OccupancyVariant,
) -> f64 {
    1.0 + traps
        .iter()
        .map(|tr| dct_dcl(c_l, tr.n_t(eps_p), tr.ln_kt(temperature), n_l, variant))
        .sum::<f64>()
}

/// Oriani reaction rate entering the mass balance as `R_T`:
/// `R_T = -sum_i dC_T^i/dC_L * dC_L/dt - sum_i theta_T^i dN_T^i/deps_p * deps_p/dt`.
/// The strain-rate (trap creation) sink applies only to traps with a
/// strain-dependent density and only when `krom` is enabled.
#[allow(clippy::too_many_arguments)]
pub fn oriani_reaction(
    c_l: f64,
    dcl_dt: f64,
    eps_p: f64,
    eps_p_rate: f64,
    traps: &[TrapSpec],
    temperature: f64,
    n_l: f64,
    variant: OccupancyVariant,
    krom: bool,
) -> f64 {
    let mut r = 0.0;
    for tr in traps {
        let ln_kt = tr.ln_kt(temperature);
        r -= dct_dcl(c_l, tr.n_t(eps_p), ln_kt, n_l, variant) * dcl_dt;
        if krom && tr.density.strain_dependent() {
            let theta = oriani_theta_t(ln_kt, c_l, n_l);
            r -= theta * tr.dn_dep(eps_p) * eps_p_rate;
        }
    }
    r
}

/// Reaction rate for thermal desorption at temperature ramp `phi`:
/// the isothermal Oriani sink plus the detrapping source from the
/// temperature dependence of `K_T`,
/// `+ C_T (1 - theta_T) E_B/(R T^2) * phi` per trap.
pub fn oriani_tds_reaction(
    c_l: f64,
    dcl_dt: f64,
    traps: &[TrapSpec],
    temperature: f64,
    phi: f64,
    n_l: f64,
) -> f64 {
    let mut r = 0.0;
    for tr in traps {
        let ln_kt = tr.ln_kt(temperature);
        let n_t = tr.n_t(0.0);
        // C_T (1 - theta_T) / C_L in the division-free arrangement
        let prefactor = dct_dcl(c_l, n_t, ln_kt, n_l, OccupancyVariant::Kt);
        r -= prefactor * dcl_dt;
        r += prefactor * c_l * tr.e_b / (GAS_CONSTANT * temperature * temperature) * phi;
    }
    r
}

/// Equilibrium initial trap content
/// `C_T0 = N_T0 K_T C_L0 / (K_T C_L0 + N_L)`.
pub fn initial_trap_state(c_l0: f64, n_t0: f64, k_t: f64, n_l: f64) -> f64 {
    if c_l0 <= 0.0 {
        return 0.0;
    }
    // N_T * K c/N_L / (1 + K c/N_L), same saturation-stable form
    oriani_ct_ln(c_l0, n_t0, k_t.ln(), n_l)
}
