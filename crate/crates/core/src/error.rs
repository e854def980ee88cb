use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid instance: {0}")]
    Instance(String),

    #[error("degenerate scenario: no bidder has any available channel")]
    DegenerateScenario,

    #[error("cannot realize won channel counts as a feasible assignment (bidder {bidder} short by {missing})")]
    Infeasible { bidder: usize, missing: u32 },

    #[error("search space of {size} exceeds enumeration limit {limit}")]
    TooLarge { size: u128, limit: u128 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
