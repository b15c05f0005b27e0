use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vertices cannot be 2-coloured into primal and dual graphs: {0}")]
    NonBipartite(String),
    #[error("conformal parameters of an edge and its dual do not multiply to one (quad {quad}: {product})")]
    BadDual { quad: usize, product: f64 },
    #[error("edge {0} bounds more than two quadrilaterals")]
    NonManifold(usize),
    #[error("edge {0} is traversed twice in the same direction")]
    InconsistentOrientation(usize),
    #[error("complex is not connected")]
    Disconnected,
    #[error("missing conformal parameter for quad {0}")]
    MissingRho(usize),
    #[error("conformal parameter must be positive and finite (quad {quad}: {value})")]
    BadRho { quad: usize, value: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("boundary of a 0-chain is undefined")]
    GradeZero,
    #[error("coboundary of a 2-cochain is undefined")]
    GradeTwo,
    #[error("wedge product degree {0} exceeds 2")]
    GradeOverflow(u8),
    #[error("operation needs a cochain on the double, found one on the quad-graph")]
    CarrierDiamond,
    #[error("operation needs a cochain on the quad-graph")]
    CarrierLambda,
    #[error("grade mismatch: expected {expected}, found {found}")]
    GradeMismatch { expected: u8, found: u8 },
    #[error("operation requires a closed surface")]
    NotClosedSurface,
    #[error("vertex {0} lies on the boundary")]
    BoundaryVertex(usize),

    #[error("holonomies on the graph and its dual differ (mismatch {0:e})")]
    HolonomyMismatch(f64),
    #[error("form is not closed (residual {0:e})")]
    NotClosed(f64),
    #[error("intersection form is degenerate")]
    DegeneratePairing,
    #[error("conjugate gradient did not converge: relative residual {residual:e} after {iterations} iterations")]
    SolverFail { residual: f64, iterations: usize },
    #[error("matrix C is singular")]
    SingularC,

    #[error("rhombus criticality violated: {0}")]
    NotCritical(String),
    #[error("angle must lie in (0, pi/2)")]
    BadTheta,
    #[error("|lambda| * delta = 2: parameter on the singular circle")]
    OnSingularCircle,
    #[error("domain is not simply connected")]
    NotSimplyConnected,
    #[error("input function is not holomorphic (residual {0:e})")]
    NotHolomorphic(f64),
    #[error("image polygon passes through the origin")]
    PassesThroughOrigin,

    #[error("no electrical move of this kind applies at site {0}")]
    BadConfiguration(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
