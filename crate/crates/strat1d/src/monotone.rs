//! Monotonicity decomposition of piecewise polynomials.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::Strat1dError;
use crate::piecewise::PiecewisePoly;
use crate::poly::Poly;
use crate::solve::isolate_root_structs;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotoneLabel {
    Constant,
    StrictlyIncreasing,
    StrictlyDecreasing,
}

impl MonotoneLabel {
    pub fn name(&self) -> &'static str {
        match self {
            MonotoneLabel::Constant => "constant",
            MonotoneLabel::StrictlyIncreasing => "increasing",
            MonotoneLabel::StrictlyDecreasing => "decreasing",
        }
    }
}

/// Cut points `a < a_1 < ... < a_k < b` and per-open-interval labels.
#[derive(Debug, Clone)]
pub struct MonotoneDecomposition {
    pub lo: f64,
    pub hi: f64,
    pub cuts: Vec<f64>,
    pub labels: Vec<MonotoneLabel>,
}

impl MonotoneDecomposition {
    pub fn intervals(&self) -> Vec<(f64, f64, MonotoneLabel)> {
        let mut ends = vec![self.lo];
        ends.extend_from_slice(&self.cuts);
        ends.push(self.hi);
        ends.windows(2)
            .zip(&self.labels)
            .map(|(w, l)| (w[0], w[1], *l))
            .collect()
    }
}

/// Decompose `f` on `(lo, hi)` into maximal constant / strictly monotone
/// open pieces.
///
/// Cuts sit at breakpoints of `f` and at sign changes of each piece's
/// derivative; cuts where the label does not change are dropped when `f` is
/// continuous there. `hi` may be `f64::INFINITY` (half-infinite interval);
/// labels at infinite ends come from the leading coefficient.
pub fn monotonicity_decomposition(
    f: &PiecewisePoly,
    lo: f64,
    hi: f64,
) -> Result<MonotoneDecomposition, Strat1dError> {
    if !(lo < hi) || lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
        return Err(Strat1dError::EmptyInterval { lo, hi });
    }

    // Candidate cuts: breakpoints inside (lo, hi), marked with whether f is
    // continuous there, plus derivative sign-change roots inside each piece.
    struct Cut {
        at: f64,
        breakpoint: Option<usize>,
    }
    let mut cuts: Vec<Cut> = Vec::new();
    for (k, b) in f.breakpoints.iter().enumerate() {
        if lo < *b && *b < hi {
            cuts.push(Cut {
                at: *b,
                breakpoint: Some(k),
            });
        }
    }
    for (i, piece) in f.pieces.iter().enumerate() {
        let piece_lo = if i == 0 { f64::NEG_INFINITY } else { f.breakpoints[i - 1] };
        let piece_hi = if i == f.breakpoints.len() {
            f64::INFINITY
        } else {
            f.breakpoints[i]
        };
        let d = piece.derivative();
        if d.is_zero() {
            continue;
        }
        for root in isolate_root_structs(&d)? {
            // A cut only where the derivative changes sign (odd multiplicity
            // in the square-free sense: sample both sides).
            let rl = root.lo();
            let rh = root.hi();
            let drat = d.to_rational()?;
            let eps = BigRational::new(1.into(), num_bigint::BigInt::from(10u64).pow(9));
            let sl = drat.sign_at(&(rl.clone() - eps.clone()));
            let sr = drat.sign_at(&(rh.clone() + eps));
            if sl == sr {
                continue;
            }
            let mid = 0.5 * (bound_f64(&rl) + bound_f64(&rh));
            if mid > piece_lo && mid < piece_hi && mid > lo && mid < hi {
                cuts.push(Cut {
                    at: mid,
                    breakpoint: None,
                });
            }
        }
    }
    cuts.sort_by(|a, b| a.at.total_cmp(&b.at));
    cuts.dedup_by(|a, b| a.at == b.at);

    // Label each open subinterval by the derivative sign at an interior
    // sample (exact rational sign; constant iff the ruling derivative piece
    // is the zero polynomial).
    let mut cut_points: Vec<f64> = Vec::new();
    let mut labels: Vec<MonotoneLabel> = Vec::new();
    let mut ends = vec![lo];
    ends.extend(cuts.iter().map(|c| c.at));
    ends.push(hi);
    for w in ends.windows(2) {
        labels.push(label_on(f, w[0], w[1])?);
    }

    // Drop cuts that separate equal labels across a continuous junction.
    let mut final_cuts = Vec::new();
    let mut final_labels = vec![labels[0]];
    for (i, cut) in cuts.iter().enumerate() {
        let left = *final_labels.last().unwrap();
        let right = labels[i + 1];
        let continuous = match cut.breakpoint {
            Some(k) => f.is_continuous_at(k),
            None => true,
        };
        if continuous && left == right {
            continue;
        }
        final_cuts.push(cut.at);
        final_labels.push(right);
    }
    cut_points.extend(final_cuts);

    Ok(MonotoneDecomposition {
        lo,
        hi,
        cuts: cut_points,
        labels: final_labels,
    })
}

fn bound_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

fn label_on(f: &PiecewisePoly, a: f64, b: f64) -> Result<MonotoneLabel, Strat1dError> {
    // Interior sample; for infinite ends, step outward from the finite one.
    let sample = if a == f64::NEG_INFINITY && b == f64::INFINITY {
        0.0
    } else if a == f64::NEG_INFINITY {
        b - 1.0
    } else if b == f64::INFINITY {
        a + 1.0
    } else {
        0.5 * (a + b)
    };
    let piece = &f.pieces[f.piece_index(sample)];
    let d = piece.derivative();
    if d.is_zero() {
        return Ok(MonotoneLabel::Constant);
    }
    let dr = d.to_rational()?;
    let sr = BigRational::from_float(sample).ok_or(Strat1dError::Degenerate { value: sample })?;
    let v = dr.eval(&sr);
    Ok(if v.is_zero() {
        // Sample hit a root of the derivative between cuts; perturb.
        let sr2 = sr + BigRational::new(1.into(), num_bigint::BigInt::from(10u64).pow(7));
        if dr.eval(&sr2).is_positive() {
            MonotoneLabel::StrictlyIncreasing
        } else {
            MonotoneLabel::StrictlyDecreasing
        }
    } else if v.is_positive() {
        MonotoneLabel::StrictlyIncreasing
    } else {
        MonotoneLabel::StrictlyDecreasing
    })
}

/// Convenience for plain polynomials.
pub fn monotonicity_decomposition_poly(
    p: &Poly,
    lo: f64,
    hi: f64,
) -> Result<MonotoneDecomposition, Strat1dError> {
    monotonicity_decomposition(&PiecewisePoly::from_poly(p.clone()), lo, hi)
}
