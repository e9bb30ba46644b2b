//! Exact solution sets of univariate polynomial inequalities.

use crate::error::Strat1dError;
use crate::poly::Poly;
use crate::saset::{Bound, Extended, SetComponent, UnivariateSASet};
use crate::sturm::{default_width, isolate_roots, sign_at_infinity, sign_between, IsolatedRoot};

/// Relation against zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Less,
    Equal,
    Greater,
}

/// Solve `p(x) <relation> 0` exactly.
///
/// Roots are isolated by Sturm sequences and refined by bisection to width
/// 1e-12; endpoints are stored as certified enclosures (or exact values when
/// a bisection midpoint hits the root). The zero polynomial yields the whole
/// line for `=` and the empty set otherwise.
pub fn solve_poly_inequality(
    p: &Poly,
    relation: Relation,
) -> Result<UnivariateSASet, Strat1dError> {
    let rp = p.to_rational()?;
    if rp.is_zero() {
        return Ok(match relation {
            Relation::Equal => UnivariateSASet::all(),
            _ => UnivariateSASet::empty(),
        });
    }
    if rp.degree() == 0 {
        let s = if rp.leading() > num_rational::BigRational::from_integer(0.into()) {
            1
        } else {
            -1
        };
        let satisfied = match relation {
            Relation::Less => s < 0,
            Relation::Equal => false,
            Relation::Greater => s > 0,
        };
        return Ok(if satisfied {
            UnivariateSASet::all()
        } else {
            UnivariateSASet::empty()
        });
    }

    let roots = isolate_roots(&rp, &default_width());
    let bounds: Vec<Bound> = roots.iter().map(Bound::from_root).collect();

    if relation == Relation::Equal {
        return UnivariateSASet::from_components(
            bounds.into_iter().map(SetComponent::Point).collect(),
        );
    }

    // Sign of p on each open interval between consecutive roots; the
    // original polynomial (with multiplicities) decides the sign, sampled
    // exactly at rational interior points.
    let want: i8 = if relation == Relation::Less { -1 } else { 1 };
    let mut components = Vec::new();

    let left_sign = sign_at_infinity(&rp, false);
    if left_sign == want {
        let hi = match bounds.first() {
            Some(b) => Extended::Fin(b.clone()),
            None => Extended::PosInf,
        };
        components.push(SetComponent::Interval(Extended::NegInf, hi));
    }
    for i in 0..roots.len() {
        let hi_prev = roots[i].hi();
        let lo_next = match roots.get(i + 1) {
            Some(r) => r.lo(),
            None => break,
        };
        let s = sign_between(&rp, &hi_prev, &lo_next);
        if s == want {
            components.push(SetComponent::Interval(
                Extended::Fin(bounds[i].clone()),
                Extended::Fin(bounds[i + 1].clone()),
            ));
        }
    }
    if !roots.is_empty() {
        let right_sign = sign_at_infinity(&rp, true);
        if right_sign == want {
            components.push(SetComponent::Interval(
                Extended::Fin(bounds[roots.len() - 1].clone()),
                Extended::PosInf,
            ));
        }
    }

    // Even-multiplicity roots do not flip the sign; the interval on each
    // side enters separately and the root point itself stays excluded, which
    // is exactly the normal form.
    UnivariateSASet::from_components(components)
}

/// Root enclosures of `p` as `(lo, hi)` pairs in floating point, refined to
/// width 1e-12 (exact hits collapse to zero width).
pub fn isolate_real_roots(p: &Poly) -> Result<Vec<(f64, f64)>, Strat1dError> {
    let rp = p.to_rational()?;
    if rp.is_zero() || rp.degree() == 0 {
        return Ok(Vec::new());
    }
    Ok(isolate_roots(&rp, &default_width())
        .iter()
        .map(|r| {
            let b = Bound::from_root(r);
            (b.lo_f64(), b.hi_f64())
        })
        .collect())
}

/// Midpoints of the refined root enclosures, one per distinct real root.
pub fn real_roots_approx(p: &Poly) -> Result<Vec<f64>, Strat1dError> {
    Ok(isolate_real_roots(p)?
        .into_iter()
        .map(|(lo, hi)| 0.5 * (lo + hi))
        .collect())
}

/// Keep the isolated-root structures (used by monotonicity cuts).
pub fn isolate_root_structs(p: &Poly) -> Result<Vec<IsolatedRoot>, Strat1dError> {
    let rp = p.to_rational()?;
    if rp.is_zero() || rp.degree() == 0 {
        return Ok(Vec::new());
    }
    Ok(isolate_roots(&rp, &default_width()))
}
