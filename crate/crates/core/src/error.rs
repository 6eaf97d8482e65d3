use crate::context::ContextId;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("matrix is not square or has non-finite entries")]
    MalformedMatrix,
    #[error("operators do not commute")]
    NonCommuting,
    #[error("generating operators do not commute pairwise")]
    NonCommutingGenerators,
    #[error("not an orthogonal projection: {0}")]
    NotAProjection(String),
    #[error("not a density matrix: {0}")]
    NotADensityMatrix(String),
    #[error("malformed Borel selection: [{lo}, {hi}]")]
    MalformedInterval { lo: f64, hi: f64 },
    #[error("atoms do not form a partition of unity: {0}")]
    NotAPartition(String),
    #[error("context {sub:?} is not included in {sup:?}")]
    NotIncluded { sub: ContextId, sup: ContextId },
    #[error("no atom of the target context dominates the given atom")]
    NoDominatingAtom,
    #[error("unknown context: {0}")]
    UnknownContext(String),
    #[error("selector is not idempotent at {0:?}")]
    SelectorNotIdempotent(ContextId),
    #[error("selector image of {0:?} lies outside the poset")]
    SelectorImageOutsidePoset(ContextId),
    #[error("selector violates its axioms: {0}")]
    InvalidSelector(String),
    #[error("sieves have different bases ({0:?} vs {1:?})")]
    BaseMismatch(ContextId, ContextId),
    #[error("not a sieve on {0:?}: {1}")]
    NotASieve(ContextId, String),
    #[error("restriction maps are not functorial: {0}")]
    NotFunctorial(String),
    #[error("not a subpresheaf: {0}")]
    NotASubpresheaf(String),
    #[error("enumeration of size {size} exceeds the configured bound {bound}")]
    EnumerationTooLarge { size: usize, bound: usize },
    #[error("family of sieves is not a global element: {0}")]
    NotGlobalElement(String),
    #[error("clopen subobject is not a j-sheaf: {0}")]
    NotJSheaf(String),
    #[error("valuation does not land in Ω_j at {0:?}")]
    ResultNotInOmegaJ(ContextId),
    #[error("sieve is not in Ω_j: {0}")]
    NotInOmegaJ(String),
    #[error("naturality violated: {0}")]
    NaturalityViolation(String),
    #[error("malformed step function: {0}")]
    MalformedStep(String),
    #[error("probability level {0} outside [0,1]")]
    InvalidLevel(f64),
}
