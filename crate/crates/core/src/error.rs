use thiserror::Error;

use crate::model::AgentId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("malformed valuation{}: {reason}", agent_suffix(.agent))]
    MalformedValuation { agent: Option<AgentId>, reason: String },

    #[error("unsupported valuation class for agent {agent}: {kind}")]
    UnsupportedValuation { agent: AgentId, kind: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("oracle for agent {agent} violated binary submodularity: {detail}")]
    OracleViolation { agent: AgentId, detail: String },

    #[error("decomposition failure for agent {agent}: {clause}")]
    Decomposition { agent: AgentId, clause: String },

    /// An internal invariant failed. Firing means a bug or an input that
    /// only claims to be order-neutral submodular.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("enumeration budget exceeded: {required} allocations needed, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

fn agent_suffix(agent: &Option<AgentId>) -> String {
    match agent {
        Some(a) => format!(" (agent {a})"),
        None => String::new(),
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
