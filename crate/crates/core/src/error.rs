use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CloError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("arity error at byte {pos}: {msg}")]
    Arity { pos: usize, msg: String },

    #[error("invalid address: {0}")]
    InvalidAddress(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("guard exceeded: {0}")]
    Guard(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("term contains an infinite node ({0}); finite expansion impossible")]
    InfiniteNode(&'static str),

    #[error("invalid context: {0}")]
    InvalidContext(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),
}

pub type Result<T> = std::result::Result<T, CloError>;
