use thiserror::Error;

/// Errors produced while constructing or evaluating expressions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    /// A primitive was evaluated outside its declared domain.
    ///
    /// `log` declares `(0, inf)` and `sqrt` declares `[0, inf)`; feeding them
    /// anything else is an error, never a NaN.
    #[error("domain error: {primitive}({input}) is outside the declared domain")]
    Domain { primitive: &'static str, input: f64 },

    /// Mismatched dimensions (point length vs arity, weight/child counts,
    /// composition arities, network layer shapes).
    #[error("dimension error in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },
}

/// Parse failure for the textual expression format.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at byte {position} near {token:?}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub token: String,
    pub message: String,
}
