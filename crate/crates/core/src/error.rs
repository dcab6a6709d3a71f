use thiserror::Error;

/// Failures raised while evaluating a map or its derivative.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The half-plane identification is undefined on the z-axis.
    #[error("point lies on the z-axis")]
    OnAxisInput,
    /// The input hit a puncture of the domain. `stage` is the index of the
    /// failing map inside a composition (0 for a single map).
    #[error("input is a puncture of stage {stage}")]
    PunctureInput { stage: usize },
    /// An intermediate value landed on an inversion center, i.e. the map
    /// has a pole at the input.
    #[error("pole reached at stage {stage}")]
    PoleOverflow { stage: usize },
    #[error("point is not a smooth point of the map")]
    NonsmoothPoint,
    #[error("degenerate jacobian (det = {0})")]
    DegenerateJacobian(f64),
    #[error("map acts on {expected}-dimensional points")]
    DimensionMismatch { expected: usize },
}

/// Failures raised by the analysis probes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbeError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("winding refinement exhausted at {samples} samples")]
    RefinementExhausted { samples: usize },
    #[error("a probe sample maps exactly onto the base image")]
    ValueCollision,
    #[error("no analytic preimage solver for map `{0}`")]
    NoSolver(String),
    #[error("no jacobian available for map `{0}`")]
    NoJacobian(String),
    #[error("too few smooth samples on sphere of radius {radius}: {kept} of {total}")]
    InsufficientSmoothSamples {
        radius: f64,
        kept: usize,
        total: usize,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
