use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid vertex subset: {0}")]
    InvalidSubset(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("graph too large: n = {n} exceeds the limit of {limit} vertices")]
    GraphTooLarge { n: usize, limit: usize },

    #[error("parameter error: {0}")]
    Parameter(String),

    /// The requested bound only holds inside the admissible region.
    #[error("(p, q) = ({p}, {q}) lies outside the admissible region")]
    Region { p: f64, q: f64 },

    #[error("bound requires r <= d (got d = {d}, r = {r}); swap the roles of the two graphs and use the mirrored parameters (q, p)")]
    Symmetry { d: usize, r: usize },

    #[error("scale guard exceeded: {required} map pairs > guard {guard}")]
    ScaleGuard { required: u128, guard: u128 },

    #[error("malformed edge graph: {0}")]
    Structural(String),

    #[error("n = {0} is too small for the threshold equation")]
    NTooSmall(f64),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("node budget of {nodes} exhausted; partial count {partial}")]
    BudgetExceeded { partial: BigUint, nodes: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
