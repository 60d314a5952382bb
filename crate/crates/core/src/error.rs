use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("form degree {degree} cannot be differentiated on a rank {rank} algebroid")]
    DegreeOverflow { degree: usize, rank: usize },
    #[error("structure constants are not antisymmetric at ({alpha}, {beta}, {gamma})")]
    NotAntisymmetric {
        alpha: usize,
        beta: usize,
        gamma: usize,
    },
    #[error("step count must be at least 1")]
    ZeroSteps,
    #[error("non-finite value encountered at step {step}")]
    NonFinite { step: usize },
    #[error("grid axis {axis} has {extent} nodes, at least 3 are needed for the stencil")]
    GridTooSmall { axis: usize, extent: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("node {node} is out of range for a grid of {len} nodes")]
    NodeOutOfRange { node: usize, len: usize },
    #[error("section is not vertical: base component {component} is {value}")]
    NotVertical { component: usize, value: f64 },
    #[error("the base algebroid is not the coordinate tangent bundle at this node")]
    NonCoordinateBase,
    #[error("Hessian is singular or ill-conditioned (condition estimate {condition:e})")]
    SingularHessian { condition: f64 },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("projection onto the algebra basis failed: residual {residual:e}")]
    ProjectionFailed { residual: f64 },
    #[error("invariant metric check failed: {0}")]
    InvalidMetric(&'static str),
    #[error("C_abc is not totally antisymmetric (defect {defect:e})")]
    NotAdInvariant { defect: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            got,
        })
    }
}
