use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Operand shapes do not fit the operation.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A value lies outside an operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The node set cannot be bipartitioned into a valid cut.
    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    /// Network text could not be parsed.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Exhaustive cut enumeration would exceed the supported size.
    #[error(
        "network has {relays} relay nodes; exhaustive cut enumeration supports at most {limit}"
    )]
    TooLarge { relays: usize, limit: usize },

    /// The topology is not layered.
    #[error("network is not layered: {reason}")]
    NotLayered {
        edge: Option<(String, String)>,
        reason: String,
    },
}
