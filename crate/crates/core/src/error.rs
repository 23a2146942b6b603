use std::path::PathBuf;

use thiserror::Error;

/// Errors produced while building meshes, assembling or solving the discrete system.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid resolution: {0}")]
    InvalidResolution(String),

    #[error("quadrature needs at least one point per axis")]
    EmptyQuadrature,

    #[error("malformed mesh file: {0}")]
    MalformedMesh(String),

    #[error("element {element}, face {face}: references missing vertex {vertex}")]
    MissingVertex {
        element: usize,
        face: usize,
        vertex: usize,
    },

    #[error("element {element}, face {face}: face is not planar (deviation {deviation:e})")]
    NonPlanarFace {
        element: usize,
        face: usize,
        deviation: f64,
    },

    #[error("element {element} is inverted or degenerate (signed volume {volume:e})")]
    InvertedElement { element: usize, volume: f64 },

    #[error("face {face} is shared by more than two elements")]
    NonManifoldFace { face: usize },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("zero vector has no tangential basis")]
    ZeroNormal,

    #[error("non-finite value in problem data: {0}")]
    NonFiniteData(String),

    #[error("{0}")]
    InvalidInput(String),

    #[error("evaluation on the singular axis r = 0 at ({x}, {y}, {z})")]
    SingularAxis { x: f64, y: f64, z: f64 },

    #[error("dof map does not match mesh: {0}")]
    DofMismatch(String),

    #[error("matrix is singular near unknown {index} ({context})")]
    Singular { index: usize, context: String },

    #[error("iterative solver stopped after {iterations} iterations with relative residual {residual:e}")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("no reference row for {0}")]
    MissingReference(String),

    #[error("refinement n = {n}: {source}")]
    Refinement {
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
