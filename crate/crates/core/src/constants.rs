//! Physical constants used across the crate (SI units).

/// Universal gas constant \[J/(mol·K)\].
pub const GAS_CONSTANT: f64 = 8.314462618;

/// Avogadro constant \[1/mol\]. Site and atom densities given per m³ are
/// divided by this on ingestion so all concentrations are mol/m³ internally.
pub const AVOGADRO: f64 = 6.02214076e23;

/// 1 eV expressed per mole \[J/mol\].
pub const EV_PER_MOL: f64 = 96485.332;

/// Exponent magnitude beyond which Arrhenius factors are evaluated in log
/// space to avoid overflow.
pub const EXP_GUARD: f64 = 700.0;
