//! Finite-element infrastructure: meshes, Lagrange elements, quadrature,
//! sparse assembly, direct solves and nodal recovery.

pub mod assembly;
pub mod dofmap;
pub mod element;
pub mod geometry;
pub mod mesh;
pub mod recovery;

pub use assembly::{assemble, ElemBasis, ElemEval, LocalSystem, SparseSystem};
pub use dofmap::{DofMap, FieldLayout, FieldSpec};
pub use element::{ElementFamily, ElementShape, Quadrature};
pub use geometry::Geometry;
pub use mesh::{build_boundary_layer_mesh, build_interval_mesh, Facet, Mesh, MeshElement};
pub use recovery::{locate, recover_nodal_field, sample, sample_in, transfer_field};
