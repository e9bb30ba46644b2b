//! Sturm-sequence real root isolation with certified rational enclosures.

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::poly::RatPoly;

/// A real root of a square-free polynomial, either hit exactly during
/// bisection or bracketed by a sign-changing rational interval.
#[derive(Debug, Clone)]
pub enum IsolatedRoot {
    Exact(BigRational),
    Bracket {
        poly: Arc<RatPoly>,
        lo: BigRational,
        hi: BigRational,
    },
}

impl IsolatedRoot {
    pub fn lo(&self) -> BigRational {
        match self {
            IsolatedRoot::Exact(v) => v.clone(),
            IsolatedRoot::Bracket { lo, .. } => lo.clone(),
        }
    }

    pub fn hi(&self) -> BigRational {
        match self {
            IsolatedRoot::Exact(v) => v.clone(),
            IsolatedRoot::Bracket { hi, .. } => hi.clone(),
        }
    }

    /// Shrink a bracket below `width` by sign-preserving bisection.
    pub fn refine(&mut self, width: &BigRational) {
        if let IsolatedRoot::Bracket { poly, lo, hi } = self {
            let mut slo = poly.sign_at(lo);
            debug_assert!(slo != 0);
            let two = BigRational::from_integer(2.into());
            while &(hi.clone() - lo.clone()) > width {
                let mid = (lo.clone() + hi.clone()) / two.clone();
                let sm = poly.sign_at(&mid);
                if sm == 0 {
                    *self = IsolatedRoot::Exact(mid);
                    return;
                }
                if sm == slo {
                    *lo = mid;
                    slo = sm;
                } else {
                    *hi = mid;
                }
            }
            // Snap to the simplest dyadic in the bracket when it is a root
            // (rational roots of float polynomials usually are dyadic).
            let cand = simplest_dyadic(lo, hi);
            if poly.sign_at(&cand) == 0 {
                *self = IsolatedRoot::Exact(cand);
            }
        }
    }
}

/// The dyadic rational `k / 2^m` with smallest `m` inside `[lo, hi]`.
fn simplest_dyadic(lo: &BigRational, hi: &BigRational) -> BigRational {
    let two = BigRational::from_integer(2.into());
    let mut scale = BigRational::one();
    loop {
        let cand = (lo * scale.clone()).ceil() / scale.clone();
        if cand <= *hi {
            return cand;
        }
        scale *= two.clone();
    }
}

/// Sturm chain of the square-free part of `p`.
pub struct SturmChain {
    pub chain: Vec<RatPoly>,
}

impl SturmChain {
    pub fn new(square_free: &RatPoly) -> SturmChain {
        let mut chain = vec![square_free.clone()];
        if square_free.degree() >= 1 {
            chain.push(square_free.derivative());
            loop {
                let k = chain.len();
                let r = chain[k - 2].rem(&chain[k - 1]);
                if r.is_zero() {
                    break;
                }
                chain.push(RatPoly::new(r.coeffs.into_iter().map(|c| -c).collect()));
            }
        }
        SturmChain { chain }
    }

    /// Sign variations of the chain at `x`.
    pub fn variations_at(&self, x: &BigRational) -> usize {
        let mut count = 0;
        let mut prev = 0i8;
        for p in &self.chain {
            let s = p.sign_at(x);
            if s != 0 {
                if prev != 0 && s != prev {
                    count += 1;
                }
                prev = s;
            }
        }
        count
    }

    /// Number of distinct roots in `(a, b]`.
    pub fn roots_in(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations_at(a).saturating_sub(self.variations_at(b))
    }
}

/// Isolate all real roots of `p` (distinct roots of its square-free part)
/// into pairwise disjoint enclosures, each refined below `width`.
pub fn isolate_roots(p: &RatPoly, width: &BigRational) -> Vec<IsolatedRoot> {
    if p.is_zero() || p.degree() == 0 {
        return Vec::new();
    }
    let sf = Arc::new(p.square_free());
    let chain = SturmChain::new(&sf);
    let bound = sf.root_bound();
    let lo = -bound.clone();
    let hi = bound;
    let va = chain.variations_at(&lo);
    let vb = chain.variations_at(&hi);
    let mut roots = Vec::new();
    isolate_rec(&sf, &chain, lo, hi, va, vb, &mut roots);
    for r in &mut roots {
        r.refine(width);
    }
    roots.sort_by(|x, y| x.lo().cmp(&y.lo()));
    roots
}

fn isolate_rec(
    sf: &Arc<RatPoly>,
    chain: &SturmChain,
    lo: BigRational,
    hi: BigRational,
    vlo: usize,
    vhi: usize,
    out: &mut Vec<IsolatedRoot>,
) {
    // Counts follow the (lo, hi] convention of V(lo) - V(hi).
    let count = vlo.saturating_sub(vhi);
    if count == 0 {
        return;
    }
    let two = BigRational::from_integer(2.into());
    let quarter = (hi.clone() - lo.clone()) / BigRational::from_integer(4.into());

    // Root exactly at hi: peel it off, then shrink the interval below it.
    if sf.sign_at(&hi) == 0 {
        out.push(IsolatedRoot::Exact(hi.clone()));
        let mut delta = quarter;
        loop {
            let hi2 = hi.clone() - delta.clone();
            // (hi2, hi] must contain the peeled root alone.
            if hi2 > lo && chain.roots_in(&hi2, &hi) == 1 {
                let v2 = chain.variations_at(&hi2);
                isolate_rec(sf, chain, lo, hi2, vlo, v2, out);
                return;
            }
            delta /= two.clone();
        }
    }

    // Root exactly at lo: not counted in (lo, hi]; step strictly inside.
    if sf.sign_at(&lo) == 0 {
        let mut delta = quarter;
        loop {
            let lo2 = lo.clone() + delta.clone();
            if lo2 < hi && chain.roots_in(&lo, &lo2) == 0 && sf.sign_at(&lo2) != 0 {
                let v2 = chain.variations_at(&lo2);
                isolate_rec(sf, chain, lo2, hi, v2, vhi, out);
                return;
            }
            delta /= two.clone();
        }
    }

    if count == 1 {
        // Single simple root strictly inside: a sign-changing bracket.
        debug_assert!(sf.sign_at(&lo) != sf.sign_at(&hi));
        out.push(IsolatedRoot::Bracket {
            poly: sf.clone(),
            lo,
            hi,
        });
        return;
    }

    let mid = (lo.clone() + hi.clone()) / two;
    let vm = chain.variations_at(&mid);
    isolate_rec(sf, chain, lo, mid.clone(), vlo, vm, out);
    isolate_rec(sf, chain, mid, hi, vm, vhi, out);
}

/// Exact sign of `p` on the open interval between two consecutive root
/// enclosures, sampled at a rational interior point.
pub fn sign_between(p: &RatPoly, left: &BigRational, right: &BigRational) -> i8 {
    let two = BigRational::from_integer(2.into());
    let mid = (left.clone() + right.clone()) / two;
    p.sign_at(&mid)
}

/// Sign of `p(x)` as `x -> +inf` or `-inf`.
pub fn sign_at_infinity(p: &RatPoly, positive: bool) -> i8 {
    if p.is_zero() {
        return 0;
    }
    let lead = p.leading();
    let s = if lead.is_positive() { 1 } else { -1 };
    if positive || p.degree() % 2 == 0 {
        s
    } else {
        -s
    }
}

/// Convenience: the default enclosure width 1e-12 as a rational.
pub fn default_width() -> BigRational {
    BigRational::new(One::one(), num_bigint::BigInt::from(10u64).pow(12))
}

/// The refinement floor 1e-14 used before declaring comparisons ambiguous.
pub fn refine_floor() -> BigRational {
    BigRational::new(One::one(), num_bigint::BigInt::from(10u64).pow(14))
}
