use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("division by zero in Q(√3,√11)")]
    DivisionByZero,
    #[error("collinear overlapping segments")]
    CollinearOverlap,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("embedding violation ({kind}) between vertices {u} and {v}")]
    Embedding { kind: &'static str, u: usize, v: usize },
    #[error("LP is infeasible")]
    Infeasible,
    #[error("LP is unbounded")]
    Unbounded,
    #[error("{count}+ maximal independent sets exceed the cap of {cap}; use the weight LP with cutting planes")]
    RowCap { count: usize, cap: usize },
    #[error("integer weight scaling overflowed")]
    WeightOverflow,
    #[error("graph has no lattice metadata")]
    NotLattice,
    #[error("unclassifiable tile with corners {corners:?}")]
    Unclassifiable { corners: Vec<(i64, i64)> },
    #[error("tiling invariant failed: {0}")]
    Tiling(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
