use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("singular matrix: |det| = {0:e}")]
    SingularMatrix(f64),
    #[error("the identity fixes every point")]
    IdentityHasAllFixedPoints,
    #[error("elementary group: lambda is zero")]
    ElementaryGroup,
    #[error("element is not parabolic (trace^2 = {0})")]
    NotParabolic(String),
    #[error("degenerate axis: endpoints coincide")]
    DegenerateAxis,
    #[error("map does not carry the first side onto the second (defect {0:e})")]
    NotPaired(f64),
    #[error("generators share a fixed point")]
    SharedFixedPoint,
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("degenerate point: {0}")]
    DegeneratePoint(String),
    #[error("lambda fails the NSDC criterion (margin {0:e})")]
    NotNSDC(f64),
    #[error("lambda fails the classical criterion (margin {0:e})")]
    NotClassical(f64),
    #[error("lambda fails the marked LP criterion (margin {0:e})")]
    NotMarkedLP(f64),
    #[error("lambda fails the equal-circle chain condition")]
    NotGammaChain,
    #[error("lambda is not in the non-classical T-Schottky region")]
    NotNonClassical,
    #[error("witness search failed: {0}")]
    WitnessSearchFailed(String),
    #[error("malformed configuration: {0}")]
    MalformedConfig(String),
    #[error("configuration did not pass verification")]
    UnverifiedConfig,
    #[error("generator is not one of the configuration's pairings")]
    GeneratorNotPaired,
    #[error("empty window: {0}")]
    EmptyWindow(String),
    #[error("cannot parse {0:?} as a complex number")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
