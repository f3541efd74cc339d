//! Hydrogen transport by mobile dislocations, rearranged as a convective
//! velocity acting on the lattice concentration.

use crate::transport::TrapSpec;

/// Geometry and mobility of the dislocation flux term
/// `J_d = C_L K_T/(K_T C_L + N_L) n_d (gamma/(b_v a)) deps_p/dt n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DislocationTransportSpec {
    /// Geometric factor: sqrt(2) for bcc, sqrt(3) for fcc.
    pub gamma: f64,
    /// Burgers vector \[m\].
    pub burgers: f64,
    /// Lattice parameter \[m\].
    pub lattice_param: f64,
    /// Dislocation-velocity multiplier.
    pub n_d: f64,
    /// Transport direction (unit vector).
    pub direction: [f64; 2],
}

impl DislocationTransportSpec {
    pub fn bcc(burgers: f64, lattice_param: f64, n_d: f64, direction: [f64; 2]) -> Self {
        DislocationTransportSpec {
            gamma: 2f64.sqrt(),
            burgers,
            lattice_param,
            n_d,
            direction,
        }
    }

    /// Strain-rate kinematic factor `n_d * gamma/(b_v a) * deps_p/dt`
    /// \[1/(m² s)\] before the concentration prefactor.
    pub fn kinematic_factor(&self, eps_p_rate: f64) -> f64 {
        self.n_d * self.gamma / (self.burgers * self.lattice_param) * eps_p_rate
    }

    /// Convective velocity contribution \[m/s\] for the mobile trap `trap`
    /// at lattice concentration `c_l`, together with its derivative with
    /// respect to `c_l` (needed by the transport Jacobian).
    pub fn velocity(
        &self,
        trap: &TrapSpec,
        c_l: f64,
        eps_p_rate: f64,
        temperature: f64,
        n_l: f64,
    ) -> ([f64; 2], [f64; 2]) {
        let k_t = crate::transport::equilibrium_constant(trap.e_b, temperature, trap.ratio);
        // K/(K c + N_L), stable when K is huge: 1/(c + N_L/K)
        let den = c_l.max(0.0) + n_l / k_t;
        let pref = 1.0 / den;
        let dpref = -1.0 / (den * den);
        let kin = self.kinematic_factor(eps_p_rate);
        let v = [
            pref * kin * self.direction[0],
            pref * kin * self.direction[1],
        ];
        let dv = [
            dpref * kin * self.direction[0],
            dpref * kin * self.direction[1],
        ];
        (v, dv)
    }
}
