//! McNabb-Foster trapping kinetics: the exchange rate and the two published
//! implicit arrangements of the auxiliary trap equation. Both are pointwise
//! node updates; the trap variable carries no spatial flux.

/// Which arrangement of the kinetic trap equation is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KineticOption {
    /// Occupancy unknown, `d theta_T/dt = kappa theta_L (1 - theta_T)
    /// - lambda theta_T`; the trap-creation (strain-rate) sink must be added
    /// to the transport reaction explicitly.
    OptionOne,
    /// Trapped concentration unknown,
    /// `dC_T/dt + (kappa theta_L + lambda) C_T = kappa theta_L N_T`;
    /// trap creation enters through `N_T(eps_p)` implicitly.
    #[default]
    OptionTwo,
}

/// McNabb-Foster exchange rate `dC_T/dt` \[mol/m³/s\].
/// `simplified_release` drops the `(1 - theta_L)` factor on the release
/// term, the usual low-lattice-occupancy form.
pub fn mf_rate(
    c_l: f64,
    c_t: f64,
    n_t: f64,
    kappa: f64,
    lambda: f64,
    n_l: f64,
    simplified_release: bool,
) -> f64 {
    let theta_l = c_l / n_l;
    let theta_t = if n_t > 0.0 { c_t / n_t } else { 0.0 };
    let release = if simplified_release {
        lambda * c_t
    } else {
        lambda * c_t * (1.0 - theta_l)
    };
    kappa * theta_l * n_t * (1.0 - theta_t) - release
}

/// Implicit (BDF) update of the occupancy equation at one node. The time
/// stencil is `d theta/dt = c0 * theta_new + hist` with `hist` the weighted
/// history sum. Returns the new occupancy; contractive toward the fixed
/// point for any positive `c0`.
pub fn option1_update(c0: f64, hist: f64, c_l: f64, kappa: f64, lambda: f64, n_l: f64) -> f64 {
    let k_theta = kappa * (c_l.max(0.0) / n_l);
    (k_theta - hist) / (c0 + k_theta + lambda)
}

/// Implicit (BDF) update of the trapped-concentration equation at one node:
/// `dC_T/dt + (kappa theta_L + lambda) C_T = kappa theta_L N_T`, with
/// `N_T` at the current plastic strain.
pub fn option2_update(
    c0: f64,
    hist: f64,
    c_l: f64,
    n_t: f64,
    kappa: f64,
    lambda: f64,
    n_l: f64,
) -> f64 {
    let k_theta = kappa * (c_l.max(0.0) / n_l);
    (k_theta * n_t - hist) / (c0 + k_theta + lambda)
}

/// Derivative of [`option1_update`] with respect to `c_l`.
pub fn option1_dcl(c0: f64, hist: f64, c_l: f64, kappa: f64, lambda: f64, n_l: f64) -> f64 {
    let k_theta = kappa * (c_l.max(0.0) / n_l);
    let dk = kappa / n_l;
    let den = c0 + k_theta + lambda;
    dk / den - (k_theta - hist) * dk / (den * den)
}

/// Derivative of [`option2_update`] with respect to `c_l`.
pub fn option2_dcl(
    c0: f64,
    hist: f64,
    c_l: f64,
    n_t: f64,
    kappa: f64,
    lambda: f64,
    n_l: f64,
) -> f64 {
    let k_theta = kappa * (c_l.max(0.0) / n_l);
    let dk = kappa / n_l;
    let den = c0 + k_theta + lambda;
    dk * n_t / den - (k_theta * n_t - hist) * dk / (den * den)
}
