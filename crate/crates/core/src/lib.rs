//! Finite-element simulation of hydrogen transport in elastoplastic metals.
//!
//! The library couples small-strain J2 plasticity with a multi-mechanism
//! hydrogen mass balance: stress-driven drift, equilibrium and kinetic
//! trapping at several defect families, dislocation-assisted convection,
//! stress-dependent and electrochemical (HER) surface conditions, and
//! hydrogen-induced softening. A 1D thermal desorption driver reuses the
//! same transport kernels with a temperature ramp.
//!
//! The crate is organised around the physics:
//!
//! * [`fem`] — meshes, Lagrange elements, quadrature, sparse assembly,
//!   linear solves and Gauss-point-to-node recovery
//! * [`mechanics`] — J2 elastoplasticity, boundary-layer loading and
//!   hydrostatic stress supply
//! * [`transport`] — the hydrogen mass balance in lattice-concentration and
//!   chemical-potential form, with trapping and convection terms
//! * [`boundary`] — concentration and flux boundary conditions
//! * [`solver`] — adaptive BDF time integration, scaled Newton solves and
//!   the mechanics/transport coupling schemes
//! * [`sim`] — the coupled crack-tip simulation driver
//! * [`tds`] — thermal desorption spectroscopy runs
//! * [`config`] / [`output`] — run configuration, presets and CSV writers

pub mod boundary;
pub mod config;
pub mod constants;
pub mod fem;
pub mod mechanics;
pub mod output;
pub mod runner;
pub mod sim;
pub mod solver;
pub mod tds;
pub mod transport;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
