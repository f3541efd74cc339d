use thiserror::Error;

/// Errors produced by meshing, assembly, material updates and solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("dof map error: {0}")]
    DofMap(String),

    #[error("assembly dimension mismatch: {0}")]
    Assembly(String),

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("material update failed: {0}")]
    Material(String),

    #[error("newton iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("step size {dt:.3e} fell below the minimum {dt_min:.3e} at t = {t:.6e}")]
    StepSizeUnderflow { t: f64, dt: f64, dt_min: f64 },

    #[error("multi-pass coupling did not converge within {passes} passes")]
    MultiPassDiverged { passes: usize },

    #[error("trap occupancy left [0, 1] by more than tolerance (theta = {theta:.6e})")]
    OccupancyOutOfRange { theta: f64 },

    #[error("surface coverage equation has no root in [0, 1]")]
    CoverageRoot,

    #[error("modelling range violation: {0}")]
    ModellingRange(String),

    #[error("interpolation query outside the table hull at ({x:.6e}, {y:.6e})")]
    OutsideHull { x: f64, y: f64 },

    #[error("point ({x:.6e}, {y:.6e}) lies outside the mesh")]
    OutsideMesh { x: f64, y: f64 },

    #[error("configuration invalid:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(errors: Vec<String>) -> Self {
        Error::Config(errors)
    }
}
