//! Mode-I boundary-layer loading: the plane-strain K-field displacements
//! imposed on the remote arc, the load ramp, and the elastic K-field
//! hydrostatic stress used by the analytical stress provider.

/// Mode-I boundary-layer load: `K_I(t) = K_max * min(t / t_load, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryLayerLoad {
    /// Peak stress intensity factor \[Pa sqrt(m)\].
    pub k_max: f64,
    /// Ramp duration \[s\].
    pub t_load: f64,
}

impl BoundaryLayerLoad {
    pub fn k_at(&self, t: f64) -> f64 {
        if self.t_load <= 0.0 {
            return self.k_max;
        }
        self.k_max * (t / self.t_load).clamp(0.0, 1.0)
    }
}

/// Plane-strain K-field displacement at radius `r` and angle `theta` from
/// the crack plane:
///
/// `u_x = K (1+nu)/E sqrt(r/2pi) cos(th/2) [2 - 4 nu + 2 sin^2(th/2)]`
/// `u_y = K (1+nu)/E sqrt(r/2pi) sin(th/2) [4 - 4 nu - 2 cos^2(th/2)]`
pub fn boundary_layer_displacement(k_i: f64, r: f64, theta: f64, e: f64, nu: f64) -> (f64, f64) {
    let amp = k_i * (1.0 + nu) / e * (r / (2.0 * std::f64::consts::PI)).sqrt();
    let (s, c) = (0.5 * theta).sin_cos();
    let ux = amp * c * (2.0 - 4.0 * nu + 2.0 * s * s);
    let uy = amp * s * (4.0 - 4.0 * nu - 2.0 * c * c);
    (ux, uy)
}

/// Hydrostatic stress of the plane-strain elastic K-field:
/// `sigma_h = 2 (1+nu) K_I cos(th/2) / (3 sqrt(2 pi r))`.
pub fn k_field_hydrostatic(k_i: f64, r: f64, theta: f64, nu: f64) -> f64 {
    2.0 * (1.0 + nu) * k_i * (0.5 * theta).cos() / (3.0 * (2.0 * std::f64::consts::PI * r).sqrt())
}
