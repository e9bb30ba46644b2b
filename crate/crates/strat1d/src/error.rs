use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Strat1dError {
    /// Two distinct root enclosures still overlap after refinement to 1e-14;
    /// their order cannot be certified.
    #[error("ambiguous enclosure comparison: [{a_lo}, {a_hi}] vs [{b_lo}, {b_hi}] after refinement")]
    Ambiguity {
        a_lo: f64,
        a_hi: f64,
        b_lo: f64,
        b_hi: f64,
    },

    /// Non-finite coefficients (overflowed input).
    #[error("degenerate polynomial input: coefficient {value} is not finite")]
    Degenerate { value: f64 },

    /// The function is identically undefined on every one-sided
    /// neighborhood of the limit point.
    #[error("undefined limit: denominator vanishes identically on the approach side")]
    Undefined,

    /// Asymptotics of the zero function are undefined.
    #[error("function is eventually zero; no asymptotic exponent")]
    EventuallyZero,

    #[error("interval is empty or reversed: ({lo}, {hi})")]
    EmptyInterval { lo: f64, hi: f64 },

    #[error("malformed set literal near {token:?}: {message}")]
    SetParse { token: String, message: String },
}
