//! Small-strain J2 elastoplasticity, boundary-layer loading and the supply
//! of hydrostatic stress and plastic strain (rate) fields to transport.

pub mod boundary_layer;
pub mod material;
pub mod model;
pub mod stress_provider;

pub use boundary_layer::{boundary_layer_displacement, k_field_hydrostatic, BoundaryLayerLoad};
pub use material::{
    elastic_tangent, radial_return, softening_multiplier, ElastoplasticParams, GaussState,
    StressUpdate,
};
pub use model::{MechModel, MechSolution, MechState, RecoveredFields};
pub use stress_provider::{ScatteredTable, StressSource};
