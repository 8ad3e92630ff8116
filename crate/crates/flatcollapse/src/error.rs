use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not orthogonal for the Gram form")]
    NotGramOrthogonal,
    #[error("translation classes violate the cocycle identity: {0}")]
    CocycleViolation(String),
    #[error("point group exceeds the bound {0}")]
    PointGroupBoundExceeded(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("matrix is not an element of the point group")]
    ElementNotInPointGroup,
    #[error("subspace is not invariant under the point group")]
    NotInvariant,
    #[error("operation needs rational input")]
    IrrationalInput,
    #[error("group has torsion")]
    NotBieberbach,
    #[error("number field mismatch")]
    FieldMismatch,
    #[error("polynomial degree {deg} exceeds cap {cap}")]
    DegreeCapExceeded { deg: usize, cap: usize },
    #[error("no proper invariant subspace exists")]
    NoProperInvariantSubspace,
    #[error("probe budget {0} exhausted")]
    BudgetLimited(usize),
    #[error("enumeration radius too small")]
    RadiusTooSmall,
    #[error("validation failed: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
