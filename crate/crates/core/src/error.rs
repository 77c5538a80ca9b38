use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty point set")]
    EmptySet,
    #[error("need at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("slices overlap in x or are given right-to-left")]
    InvalidSliceOrder,
    #[error("convex hulls intersect or touch")]
    HullsNotDisjoint,
    #[error("invalid configuration: {0}")]
    ConfigError(String),
    #[error("query orientation does not match the index orientation")]
    WrongIndex,
    #[error("input is not sorted by x")]
    NotSorted,
    #[error("oracle refused instance of size {n} (limit {limit})")]
    OracleTooLarge { n: usize, limit: usize },
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
