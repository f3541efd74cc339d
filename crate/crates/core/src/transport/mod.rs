//! Hydrogen transport: lattice parameters, trap families and the mass
//! balance in lattice-concentration and chemical-potential form.

pub mod cl_form;
pub mod dislocation;
pub mod kinetics;
pub mod mu_form;
pub mod oriani;

pub use cl_form::{
    BcKind, ClProblem, StepInputs, ThermalSchedule, TransportBc, TransportState,
};
pub use dislocation::DislocationTransportSpec;
pub use kinetics::{mf_rate, option1_update, option2_update, KineticOption};
pub use mu_form::MuProblem;
pub use oriani::{
    d2ct_dcl2, dct_dcl, effective_diffusivity_ratio, equilibrium_constant, initial_trap_state,
    ln_equilibrium_constant, oriani_ct, oriani_ct_ln, oriani_reaction, oriani_tds_reaction,
    oriani_theta_t, OccupancyVariant,
};

use crate::constants::GAS_CONSTANT;

/// Lattice diffusion constants (SI, concentrations in mol/m³).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    /// Lattice diffusivity \[m²/s\] (pre-exponential when an Arrhenius law
    /// is active, see [`crate::tds`]).
    pub d_l: f64,
    /// Partial molar volume of hydrogen \[m³/mol\].
    pub v_h: f64,
    /// Lattice site density \[mol/m³\].
    pub n_l: f64,
    /// Temperature \[K\].
    pub temperature: f64,
    /// Gas constant \[J/(mol K)\].
    pub gas_constant: f64,
    /// Reference chemical potential \[J/mol\].
    pub mu0: f64,
}

impl LatticeParams {
    pub fn new(d_l: f64, v_h: f64, n_l: f64, temperature: f64) -> Self {
        LatticeParams {
            d_l,
            v_h,
            n_l,
            temperature,
            gas_constant: GAS_CONSTANT,
            mu0: 0.0,
        }
    }

    pub fn rt(&self) -> f64 {
        self.gas_constant * self.temperature
    }

    /// Lattice concentration from chemical potential at hydrostatic stress
    /// `sigma_h`: `C_L = N_L exp((mu - mu0 + V_H sigma_h)/RT)`.
    pub fn cl_from_mu(&self, mu: f64, sigma_h: f64, temperature: f64) -> f64 {
        let rt = self.gas_constant * temperature;
        self.n_l * ((mu - self.mu0 + self.v_h * sigma_h) / rt).exp()
    }

    /// Chemical potential from lattice concentration (low occupancy).
    pub fn mu_from_cl(&self, c_l: f64, sigma_h: f64, temperature: f64) -> f64 {
        let rt = self.gas_constant * temperature;
        self.mu0 + rt * (c_l / self.n_l).ln() - self.v_h * sigma_h
    }
}

/// How trap occupancy follows the lattice population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrapKinetics {
    /// Instantaneous equilibrium.
    Oriani,
    /// Finite capture/release frequencies. `kappa(T) = kappa0 exp(-e_t/RT)`,
    /// `lambda(T) = lambda0 exp(-e_d/RT)`; zero activation energies give
    /// temperature-independent constants.
    McNabbFoster {
        kappa0: f64,
        lambda0: f64,
        e_t: f64,
        e_d: f64,
        option: KineticOption,
    },
}

/// Trap-site density law, returning densities in mol/m³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityLaw {
    Constant {
        n_t: f64,
    },
    /// `log10 N_T = 23.26 - 2.33 exp(-5.5 eps_p)` \[sites/m³\].
    Kumnick,
    /// `N_T = sqrt(2) rho(eps_p) / a` with the dislocation density
    /// `rho = rho0 + 2 gamma eps_p` capped at `rho0 + gamma` from
    /// `eps_p = 0.5` on.
    Dislocation {
        rho0: f64,
        gamma: f64,
        lattice_param: f64,
    },
}

impl DensityLaw {
    /// Trap density \[mol/m³\] at equivalent plastic strain `eps_p`.
    pub fn n_t(&self, eps_p: f64) -> f64 {
        match *self {
            DensityLaw::Constant { n_t } => n_t,
            DensityLaw::Kumnick => kumnick_nt(eps_p) / crate::constants::AVOGADRO,
            DensityLaw::Dislocation { rho0, gamma, lattice_param } => {
                let rho = dislocation_density(eps_p, rho0, gamma);
                (2.0f64).sqrt() * rho / lattice_param / crate::constants::AVOGADRO
            }
        }
    }

    /// `dN_T/deps_p` \[mol/m³\].
    pub fn dn_dep(&self, eps_p: f64) -> f64 {
        match *self {
            DensityLaw::Constant { .. } => 0.0,
            DensityLaw::Kumnick => kumnick_dnt_dep(eps_p) / crate::constants::AVOGADRO,
            DensityLaw::Dislocation { rho0: _, gamma, lattice_param } => {
                if eps_p <= 0.5 {
                    (2.0f64).sqrt() * 2.0 * gamma / lattice_param / crate::constants::AVOGADRO
                } else {
                    0.0
                }
            }
        }
    }

    pub fn strain_dependent(&self) -> bool {
        !matches!(self, DensityLaw::Constant { .. })
    }
}

/// Kumnick & Johnson dislocation-trap density \[sites/m³\].
pub fn kumnick_nt(eps_p: f64) -> f64 {
    10f64.powf(23.26 - 2.33 * (-5.5 * eps_p).exp())
}

/// Analytical derivative of [`kumnick_nt`] \[sites/m³\].
pub fn kumnick_dnt_dep(eps_p: f64) -> f64 {
    let exp_term = (-5.5 * eps_p).exp();
    kumnick_nt(eps_p) * std::f64::consts::LN_10 * 2.33 * 5.5 * exp_term
}

/// Piecewise-linear dislocation density evolution \[1/m²\].
pub fn dislocation_density(eps_p: f64, rho0: f64, gamma: f64) -> f64 {
    if eps_p <= 0.5 {
        rho0 + 2.0 * gamma * eps_p
    } else {
        rho0 + gamma
    }
}

/// One trap family with resolved parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapSpec {
    pub label: String,
    pub kinetics: TrapKinetics,
    /// Binding energy \[J/mol\]; for kinetic traps `e_b = e_d - e_t`.
    pub e_b: f64,
    /// Pre-exponential ratio `kappa0/lambda0` entering the equilibrium
    /// constant (1 unless stated otherwise).
    pub ratio: f64,
    pub density: DensityLaw,
    /// Hydrogen atoms accommodated per trap site.
    pub multiplicity: f64,
    /// Whether this trap's hydrogen rides on mobile dislocations.
    pub mobile: bool,
}

impl TrapSpec {
    pub fn oriani(label: &str, e_b: f64, density: DensityLaw) -> Self {
        TrapSpec {
            label: label.to_string(),
            kinetics: TrapKinetics::Oriani,
            e_b,
            ratio: 1.0,
            density,
            multiplicity: 1.0,
            mobile: false,
        }
    }

    /// Effective trap density including multiplicity \[mol/m³\].
    pub fn n_t(&self, eps_p: f64) -> f64 {
        self.multiplicity * self.density.n_t(eps_p)
    }

    pub fn dn_dep(&self, eps_p: f64) -> f64 {
        self.multiplicity * self.density.dn_dep(eps_p)
    }

    /// `ln K_T` at temperature `t`.
    pub fn ln_kt(&self, t: f64) -> f64 {
        ln_equilibrium_constant(self.e_b, t, self.ratio)
    }

    /// Capture/release frequencies at temperature `t` (kinetic traps).
    pub fn frequencies(&self, t: f64) -> Option<(f64, f64)> {
        match self.kinetics {
            TrapKinetics::Oriani => None,
            TrapKinetics::McNabbFoster { kappa0, lambda0, e_t, e_d, .. } => {
                let rt = GAS_CONSTANT * t;
                Some((kappa0 * (-e_t / rt).exp(), lambda0 * (-e_d / rt).exp()))
            }
        }
    }

    pub fn is_kinetic(&self) -> bool {
        matches!(self.kinetics, TrapKinetics::McNabbFoster { .. })
    }
}
