use thiserror::Error;

/// Errors raised by the numerical kernels, deformation engine and optimizer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degree {0} exceeds the supported maximum of {max}", max = crate::bernstein::MAX_DEGREE)]
    DegreeTooLarge(u32),

    #[error("parameter {0} lies outside [0, 1]")]
    ParameterOutOfRange(f64),

    #[error("basis index {index} out of range for degree {degree}")]
    IndexOutOfRange { index: i64, degree: u32 },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("support is not admissible: {0}")]
    InadmissibleSupport(String),

    #[error("invalid target: {0}")]
    InvalidTarget(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is numerically singular (pivot {pivot:e} at row {row}); use a regularized solve")]
    IllConditioned { row: usize, pivot: f64 },

    #[error("matrix is singular; condition number is infinite")]
    Singular,

    #[error("least-squares system is rank deficient: degenerate support")]
    DegenerateSupport,

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("lattice bounds differ from the bounds used to embed the mesh")]
    BoundsMismatch,

    #[error("freeze specification leaves no free control points")]
    NothingFree,

    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),

    #[error("objective is not finite at the starting point")]
    NonFiniteStart,

    #[error("surface target is empty or degenerate")]
    EmptyTarget,

    #[error("mesh has no surface-tagged vertices")]
    NoSurfaceTag,

    #[error("OBJ parse error at line {line}: {msg}")]
    ObjParse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
