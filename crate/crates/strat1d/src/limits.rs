//! One-sided limits and asymptotic exponents of piecewise-rational
//! functions, by exact leading-coefficient analysis.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::Strat1dError;
use crate::piecewise::PiecewisePoly;
use crate::poly::Poly;

/// Value in the extended reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInf,
    NegInf,
}

impl std::fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInf => f.write_str("+inf"),
            ExtendedReal::NegInf => f.write_str("-inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Where the limit is taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitPoint {
    Finite(f64),
    PosInf,
    NegInf,
}

fn rat_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Lowest nonzero coefficient of the Taylor expansion at the approach point,
/// `(order, coefficient)`; `None` for the zero polynomial.
fn local_order(p: &Poly, c: f64) -> Result<Option<(usize, BigRational)>, Strat1dError> {
    let rp = p.to_rational()?;
    if rp.is_zero() {
        return Ok(None);
    }
    let cr = BigRational::from_float(c).ok_or(Strat1dError::Degenerate { value: c })?;
    let shifted = rp.shift(&cr);
    for (k, coef) in shifted.coeffs.iter().enumerate() {
        if !coef.is_zero() {
            return Ok(Some((k, coef.clone())));
        }
    }
    Ok(None)
}

/// One-sided limit of `num(x)/den(x)` as `x -> c` from `side` (or `x -> ±inf`
/// where the side is implied). Pieces of the piecewise operands are selected
/// on the approach side.
///
/// Errors with [`Strat1dError::Undefined`] when the denominator vanishes
/// identically on the approach side.
pub fn one_sided_limit(
    num: &PiecewisePoly,
    den: &PiecewisePoly,
    at: LimitPoint,
    side: Side,
) -> Result<ExtendedReal, Strat1dError> {
    match at {
        LimitPoint::PosInf => limit_at_infinity(num, den, true),
        LimitPoint::NegInf => limit_at_infinity(num, den, false),
        LimitPoint::Finite(c) => {
            let (np, dp) = match side {
                Side::Right => (
                    &num.pieces[num.piece_index(c)],
                    &den.pieces[den.piece_index(c)],
                ),
                Side::Left => (
                    &num.pieces[num.piece_index_left(c)],
                    &den.pieces[den.piece_index_left(c)],
                ),
            };
            let d = match local_order(dp, c)? {
                None => return Err(Strat1dError::Undefined),
                Some(d) => d,
            };
            let n = match local_order(np, c)? {
                None => return Ok(ExtendedReal::Finite(0.0)),
                Some(n) => n,
            };
            let (a, ca) = n;
            let (b, cb) = d;
            if a > b {
                return Ok(ExtendedReal::Finite(0.0));
            }
            let ratio = ca / cb;
            if a == b {
                return Ok(ExtendedReal::Finite(rat_to_f64(&ratio)));
            }
            // Pole of order b - a: sign from the ratio and the side parity.
            let mut positive = ratio.is_positive();
            if side == Side::Left && (b - a) % 2 == 1 {
                positive = !positive;
            }
            Ok(if positive {
                ExtendedReal::PosInf
            } else {
                ExtendedReal::NegInf
            })
        }
    }
}

fn limit_at_infinity(
    num: &PiecewisePoly,
    den: &PiecewisePoly,
    positive: bool,
) -> Result<ExtendedReal, Strat1dError> {
    let np = if positive {
        num.pieces.last().unwrap()
    } else {
        num.pieces.first().unwrap()
    };
    let dp = if positive {
        den.pieces.last().unwrap()
    } else {
        den.pieces.first().unwrap()
    };
    let nr = np.to_rational()?;
    let dr = dp.to_rational()?;
    if dr.is_zero() {
        return Err(Strat1dError::Undefined);
    }
    if nr.is_zero() {
        return Ok(ExtendedReal::Finite(0.0));
    }
    let (dn, dd) = (nr.degree(), dr.degree());
    let ratio = nr.leading() / dr.leading();
    if dn < dd {
        return Ok(ExtendedReal::Finite(0.0));
    }
    if dn == dd {
        return Ok(ExtendedReal::Finite(rat_to_f64(&ratio)));
    }
    let mut pos = ratio.is_positive();
    if !positive && (dn - dd) % 2 == 1 {
        pos = !pos;
    }
    Ok(if pos {
        ExtendedReal::PosInf
    } else {
        ExtendedReal::NegInf
    })
}

/// The unique `(c != 0, q)` with `f(t) / (c t^q) -> 1` as `t -> +inf`, for
/// the rational function `num/den`. For rational functions the exponent is
/// the integer `deg(num) - deg(den)`.
pub fn asymptotic_exponent(num: &Poly, den: &Poly) -> Result<(f64, i64), Strat1dError> {
    let nr = num.to_rational()?;
    let dr = den.to_rational()?;
    if nr.is_zero() {
        return Err(Strat1dError::EventuallyZero);
    }
    if dr.is_zero() {
        return Err(Strat1dError::Undefined);
    }
    let q = nr.degree() as i64 - dr.degree() as i64;
    let c = nr.leading() / dr.leading();
    Ok((rat_to_f64(&c), q))
}
