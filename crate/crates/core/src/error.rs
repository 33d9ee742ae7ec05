use crate::mechanism::AgentId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("vectors must have at least one coordinate")]
    ZeroDimension,

    #[error("dimension index {index} out of range for k = {dim}")]
    DimensionIndex { index: usize, dim: usize },

    #[error("the reference point set of an empty vector set is undefined")]
    EmptySet,

    #[error("member {index} is not strictly positive in every coordinate")]
    NotStrictlyPositive { index: usize },

    #[error("work estimate {needed} exceeds the configured budget of {budget}")]
    Budget { needed: u128, budget: u128 },

    #[error("argument must be strictly positive, got {0}")]
    Domain(String),

    #[error("no bids remain after removing identical vectors")]
    EmptyMarket,

    #[error("only one bid remains after removing identical vectors; payments need competition")]
    SingleAgent,

    #[error("no valuation supplied for agent {0}")]
    MissingValuation(AgentId),

    #[error("agent id {0} appears more than once")]
    DuplicateAgent(AgentId),

    #[error("precondition violated: {0}")]
    Precondition(String),
}
