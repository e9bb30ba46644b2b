use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SubdiffError {
    #[error(transparent)]
    Expr(#[from] tame_expr::ExprError),

    #[error("invalid kink policy for {primitive}: {value} is outside the hull of one-sided derivatives")]
    InvalidPolicy { primitive: &'static str, value: f64 },

    #[error("min-norm point did not reach tolerance {tol} within {cap} iterations (gap {gap})")]
    IterationCap { cap: usize, tol: f64, gap: f64 },

    #[error("subgradient hull needs at least one generator")]
    EmptyHull,

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("malformed hull record at line {line}: {message}")]
    Record { line: usize, message: String },
}
