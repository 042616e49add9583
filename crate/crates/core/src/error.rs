//! Error types shared across the crate.

use core::fmt;

/// Rejection raised when a configuration value violates its invariant or a
/// required value is absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    /// A field failed validation. `field` is the schema name (e.g. `M`),
    /// `what` the human description (e.g. `mass`).
    Invalid {
        field: &'static str,
        what: &'static str,
        reason: &'static str,
    },
    /// A field that must be set for the requested operation is missing.
    Missing {
        field: &'static str,
        what: &'static str,
    },
    /// The document could not be parsed at all.
    Parse,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Invalid {
                field,
                what,
                reason,
            } => write!(f, "config field `{field}` ({what}): {reason}"),
            ConfigError::Missing { field, what } => {
                write!(f, "config field `{field}` ({what}) is required but unset")
            }
            ConfigError::Parse => write!(f, "config document failed to parse"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ConfigError {}

/// Errors from the Markov-chain layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MarkovError {
    /// MT is output-only and cannot be discretized as an input.
    OutputOnlyBoundary,
    /// The trajectory handed in does not meet the operation's precondition
    /// (e.g. side classification of a non-traversing trial).
    NotATraversal,
    /// The two histograms have constant values so the correlation
    /// coefficient is undefined.
    ZeroVariance,
    /// A histogram is empty.
    EmptyHistogram,
}

impl fmt::Display for MarkovError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarkovError::OutputOnlyBoundary => {
                write!(f, "boundary MT is output-only and has no input bins")
            }
            MarkovError::NotATraversal => {
                write!(f, "operation requires a successful traversal trajectory")
            }
            MarkovError::ZeroVariance => {
                write!(f, "correlation coefficient undefined: zero variance input")
            }
            MarkovError::EmptyHistogram => write!(f, "histogram has no entries"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for MarkovError {}
