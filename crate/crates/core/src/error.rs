//! Error type shared by all solver modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch between operands in {op}")]
    GridMismatch { op: &'static str },

    #[error("non-finite values in {context}")]
    NonFinite { context: &'static str },

    #[error("exterior derivative undefined for degree-{degree} forms")]
    ExteriorDegree { degree: u8 },

    #[error("interior product undefined for degree-{degree} forms")]
    InteriorDegree { degree: u8 },

    #[error("wedge of degrees {a} and {b} exceeds the top degree 3")]
    WedgeDegree { a: u8, b: u8 },

    #[error("non-positive density (min {min:.3e}) in {context}")]
    NonPositiveDensity { min: f64, context: &'static str },

    #[error("non-finite state after Runge-Kutta stage {stage}")]
    NanAtStage { stage: usize },

    #[error("hierarchy order {requested} exceeds the configured maximum {max}")]
    HierarchyOrder { requested: usize, max: usize },

    #[error("pressure iteration stalled at residual {residual:.3e} after {iterations} sweeps")]
    PressureDiverged { residual: f64, iterations: usize },

    #[error("invariant series needs at least {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
