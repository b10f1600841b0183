use thiserror::Error;

/// Failure modes shared across the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("non-finite entry in {context}")]
    NonFinite { context: String },

    #[error("{what} did not converge")]
    NoConvergence { what: String },

    #[error("{context}: matrix is {rows}x{cols}, expected square")]
    NotSquare {
        context: String,
        rows: usize,
        cols: usize,
    },

    #[error("invalid tolerance policy: {0}")]
    InvalidPolicy(String),

    #[error("generator {index} is not skew-symmetric (residual {residual:.3e})")]
    NotSkew { index: usize, residual: f64 },

    #[error("generators are linearly dependent: rank {rank} of {count}")]
    DependentGenerators { rank: usize, count: usize },

    #[error("discrete element {index} is not orthogonal (residual {residual:.3e})")]
    NotOrthogonal { index: usize, residual: f64 },

    #[error("bracket [X_{i}, X_{j}] leaves the span of the generators (residual {residual:.3e})")]
    NotClosed { i: usize, j: usize, residual: f64 },

    #[error("precondition failed: {what} (residual {residual:.3e})")]
    Precondition { what: String, residual: f64 },

    #[error("anchor point is not contained in the section (residual {residual:.3e})")]
    AnchorNotInSection { residual: f64 },

    #[error("point context is not certified regular")]
    NotRegular,

    #[error("vector is not normal to the orbit (residual {residual:.3e})")]
    NotNormal { residual: f64 },

    #[error("orbit tangent space does not split as D + E: dimension deficit {deficit} (residual {residual:.3e})")]
    Decomposition { deficit: usize, residual: f64 },

    #[error("involution matrix does not square to the identity (residual {residual:.3e})")]
    NotInvolution { residual: f64 },

    #[error("involution is not a bracket automorphism (residual {residual:.3e})")]
    NotAutomorphism { residual: f64 },

    #[error("Cartan grading violated: {which} (residual {residual:.3e})")]
    BadGrading { which: String, residual: f64 },

    #[error("inner product is not ad-invariant or not positive definite (residual {residual:.3e})")]
    NotInvariant { residual: f64 },

    #[error("subspace is not a Lie triple system (residual {residual:.3e})")]
    NotTriple { residual: f64 },

    #[error("(ad_X)^2 Y = -c Y with c > 0 does not hold (residual {residual:.3e})")]
    EigenRelationFails { residual: f64 },

    #[error("matrix is not an element of the group (residual {residual:.3e})")]
    NotInGroup { residual: f64 },

    #[error("subspace is not a subalgebra: {which} (residual {residual:.3e})")]
    NotSubalgebra { which: String, residual: f64 },

    #[error("no positive-definite invariant metric found (best minimum eigenvalue {best_min_eig:.3e})")]
    InfeasibleNumerically { best_min_eig: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
