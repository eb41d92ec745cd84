//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FoldError {
    #[error("polynomial degree {0} is not supported")]
    UnsupportedDegree(usize),
    #[error("derivative order {0} is not supported (max 4)")]
    UnsupportedDerivativeOrder(usize),
    #[error("point {point:?} lies outside element {element}")]
    PointOutsideElement { point: [f64; 2], element: usize },
    #[error("point {0:?} lies outside the mesh")]
    PointOutsideMesh([f64; 2]),
    #[error("fold is not resolvable on the requested grid: {0}")]
    FoldNotResolvable(String),
    #[error("fold endpoint {0:?} does not lie on the domain boundary")]
    FoldEndpointOffBoundary([f64; 2]),
    #[error("degenerate triangle produced while fitting the fold (area {0:.3e})")]
    DegenerateTriangle(f64),
    #[error("crease midpoint projection failed near {0:?}")]
    ProjectionFailure([f64; 2]),
    #[error("invalid edge id {0}")]
    InvalidEdge(usize),
    #[error("invalid triangle id {0}")]
    InvalidTriangle(usize),
    #[error("penalty parameters must be strictly positive (got gamma0={0}, gamma1={1})")]
    NonPositivePenalty(f64, f64),
    #[error("space and mesh are inconsistent: {0}")]
    SpaceMeshMismatch(String),
    #[error("matrix is not positive definite (penalty too small?)")]
    IndefiniteMatrix,
    #[error("iterative solver exceeded its budget of {0} iterations")]
    IterationBudgetExceeded(usize),
    #[error("solver tolerance {0} outside (0, 1e-4]")]
    InvalidTolerance(f64),
    #[error("exact solution is not available for this problem")]
    MissingExactSolution,
    #[error("boundary data are incompatible: |∇g - Φ| = {0:.3e} at {1:?}")]
    IncompatibleBoundaryData(f64, [f64; 2]),
    #[error("refinement fraction must lie in (0, 1], got {0}")]
    InvalidFraction(f64),
    #[error("cannot mark from an empty indicator list")]
    EmptyIndicators,
    #[error("degenerate bubble patch: {0}")]
    DegeneratePatch(String),
    #[error("solver failure at level {level}: {source}")]
    AdaptiveLevel {
        level: usize,
        #[source]
        source: Box<FoldError>,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
