//! Univariate semialgebraic sets in normal form: sorted disjoint points and
//! open intervals.
//!
//! Endpoints are either exact binary64 values or certified root enclosures
//! carrying their defining polynomial. Comparisons between enclosures refine
//! by bisection (with an exact gcd-based equality test) before giving up
//! with an ambiguity error; endpoint arithmetic on exact values never errs.

use std::cmp::Ordering;
use std::sync::Arc;

use num_rational::BigRational;


use crate::error::Strat1dError;
use crate::poly::RatPoly;
use crate::sturm::{refine_floor, IsolatedRoot, SturmChain};

/// A certified enclosure of a real algebraic number.
#[derive(Debug, Clone)]
pub struct RootHandle {
    pub poly: Arc<RatPoly>,
    pub lo: BigRational,
    pub hi: BigRational,
}

/// Endpoint value: exact or a root enclosure.
#[derive(Debug, Clone)]
pub enum Bound {
    Exact(f64),
    Enclosure { lo: f64, hi: f64, root: RootHandle },
}

fn next_down(x: f64) -> f64 {
    if x.is_nan() || x == f64::NEG_INFINITY {
        return x;
    }
    if x == 0.0 {
        return -5e-324;
    }
    let bits = x.to_bits();
    f64::from_bits(if x > 0.0 { bits - 1 } else { bits + 1 })
}

fn next_up(x: f64) -> f64 {
    -next_down(-x)
}

fn rat_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

fn f64_le_rat(x: f64, r: &BigRational) -> bool {
    match BigRational::from_float(x) {
        Some(xr) => xr <= *r,
        None => x == f64::NEG_INFINITY,
    }
}

fn f64_ge_rat(x: f64, r: &BigRational) -> bool {
    match BigRational::from_float(x) {
        Some(xr) => xr >= *r,
        None => x == f64::INFINITY,
    }
}

impl Bound {
    /// Certified floating lower bound.
    pub fn lo_f64(&self) -> f64 {
        match self {
            Bound::Exact(v) => *v,
            Bound::Enclosure { lo, .. } => *lo,
        }
    }

    /// Certified floating upper bound.
    pub fn hi_f64(&self) -> f64 {
        match self {
            Bound::Exact(v) => *v,
            Bound::Enclosure { hi, .. } => *hi,
        }
    }

    /// Midpoint for display.
    pub fn approx(&self) -> f64 {
        match self {
            Bound::Exact(v) => *v,
            Bound::Enclosure { lo, hi, .. } => 0.5 * (lo + hi),
        }
    }

    pub fn from_root(root: &IsolatedRoot) -> Bound {
        match root {
            IsolatedRoot::Exact(v) => {
                let f = rat_to_f64(v);
                // Dyadic bisection midpoints within f64 range convert
                // exactly; otherwise store a zero-width-enclosure fallback.
                match BigRational::from_float(f) {
                    Some(ref fr) if fr == v => Bound::Exact(f),
                    _ => Bound::Enclosure {
                        lo: next_down(f),
                        hi: next_up(f),
                        root: RootHandle {
                            poly: Arc::new(RatPoly::zero()),
                            lo: v.clone(),
                            hi: v.clone(),
                        },
                    },
                }
            }
            IsolatedRoot::Bracket { poly, lo, hi } => {
                let mut lo_f = rat_to_f64(lo);
                if !f64_le_rat(lo_f, lo) {
                    lo_f = next_down(lo_f);
                }
                let mut hi_f = rat_to_f64(hi);
                if !f64_ge_rat(hi_f, hi) {
                    hi_f = next_up(hi_f);
                }
                Bound::Enclosure {
                    lo: lo_f,
                    hi: hi_f,
                    root: RootHandle {
                        poly: poly.clone(),
                        lo: lo.clone(),
                        hi: hi.clone(),
                    },
                }
            }
        }
    }

}

/// Refine a rational sign-changing bracket below `width`.
fn refine_bracket(
    poly: &RatPoly,
    lo: &mut BigRational,
    hi: &mut BigRational,
    width: &BigRational,
) {
    if poly.is_zero() {
        return;
    }
    let two = BigRational::from_integer(2.into());
    let mut slo = poly.sign_at(lo);
    if slo == 0 {
        *hi = lo.clone();
        return;
    }
    while &(hi.clone() - lo.clone()) > width {
        let mid = (lo.clone() + hi.clone()) / two.clone();
        let sm = poly.sign_at(&mid);
        if sm == 0 {
            *lo = mid.clone();
            *hi = mid;
            return;
        }
        if sm == slo {
            *lo = mid;
            slo = sm;
        } else {
            *hi = mid;
        }
    }
}

/// Total order on bound values, refining enclosures as needed.
pub fn cmp_bounds(a: &Bound, b: &Bound) -> Result<Ordering, Strat1dError> {
    // Fast path on certified floating brackets.
    if a.hi_f64() < b.lo_f64() {
        return Ok(Ordering::Less);
    }
    if b.hi_f64() < a.lo_f64() {
        return Ok(Ordering::Greater);
    }
    match (a, b) {
        (Bound::Exact(x), Bound::Exact(y)) => Ok(x.total_cmp(y)),
        (Bound::Exact(x), Bound::Enclosure { root, .. }) => {
            Ok(cmp_exact_vs_root(*x, root)?)
        }
        (Bound::Enclosure { root, .. }, Bound::Exact(y)) => {
            Ok(cmp_exact_vs_root(*y, root)?.reverse())
        }
        (Bound::Enclosure { root: ra, .. }, Bound::Enclosure { root: rb, .. }) => {
            cmp_roots(ra, rb)
        }
    }
}

/// Compare an exact rational value against a root enclosure. Decidable: the
/// exact sign test settles membership, and a non-root value separates from
/// the bracket after finitely many bisections.
fn cmp_exact_vs_root(x: f64, root: &RootHandle) -> Result<Ordering, Strat1dError> {
    let xr = match BigRational::from_float(x) {
        Some(r) => r,
        None => {
            return Ok(if x == f64::NEG_INFINITY {
                Ordering::Less
            } else {
                Ordering::Greater
            })
        }
    };
    let (mut lo, mut hi) = (root.lo.clone(), root.hi.clone());
    if xr < lo {
        return Ok(Ordering::Less);
    }
    if xr > hi {
        return Ok(Ordering::Greater);
    }
    if root.poly.is_zero() {
        // Degenerate zero-width handle.
        return Ok(xr.cmp(&lo));
    }
    if root.poly.sign_at(&xr) == 0 {
        return Ok(Ordering::Equal);
    }
    // x is not the root; bisect until the bracket excludes it.
    let two = BigRational::from_integer(2.into());
    let mut slo = root.poly.sign_at(&lo);
    loop {
        if xr < lo {
            return Ok(Ordering::Less);
        }
        if xr > hi {
            return Ok(Ordering::Greater);
        }
        let mid = (lo.clone() + hi.clone()) / two.clone();
        let sm = root.poly.sign_at(&mid);
        if sm == 0 {
            // Root exactly at mid; x differs from it.
            return Ok(xr.cmp(&mid));
        }
        if sm == slo {
            lo = mid;
            slo = sm;
        } else {
            hi = mid;
        }
    }
}

/// Compare two root enclosures; equal algebraic numbers are recognized via
/// the gcd of the defining polynomials.
fn cmp_roots(a: &RootHandle, b: &RootHandle) -> Result<Ordering, Strat1dError> {
    let (mut alo, mut ahi) = (a.lo.clone(), a.hi.clone());
    let (mut blo, mut bhi) = (b.lo.clone(), b.hi.clone());
    let floor = refine_floor();
    refine_bracket(&a.poly, &mut alo, &mut ahi, &floor);
    refine_bracket(&b.poly, &mut blo, &mut bhi, &floor);
    if ahi < blo {
        return Ok(Ordering::Less);
    }
    if bhi < alo {
        return Ok(Ordering::Greater);
    }
    if alo == blo && ahi == bhi && alo == ahi {
        return Ok(Ordering::Equal);
    }
    // Brackets still overlap at the refinement floor: decide equality
    // exactly through the common factor.
    if !a.poly.is_zero() && !b.poly.is_zero() {
        let g = a.poly.gcd(&b.poly);
        if g.degree() >= 1 {
            let ilo = if alo > blo { alo.clone() } else { blo.clone() };
            let ihi = if ahi < bhi { ahi.clone() } else { bhi.clone() };
            let chain = SturmChain::new(&g.square_free());
            if ilo <= ihi && chain.roots_in(&ilo, &ihi) >= 1 {
                // A common root inside both brackets, and each bracket holds
                // exactly one root: they are the same number.
                return Ok(Ordering::Equal);
            }
        }
        // Distinct algebraic numbers: one more deep refinement pass.
        let deep = floor.clone() * floor.clone();
        refine_bracket(&a.poly, &mut alo, &mut ahi, &deep);
        refine_bracket(&b.poly, &mut blo, &mut bhi, &deep);
        if ahi < blo {
            return Ok(Ordering::Less);
        }
        if bhi < alo {
            return Ok(Ordering::Greater);
        }
    }
    Err(Strat1dError::Ambiguity {
        a_lo: rat_to_f64(&alo),
        a_hi: rat_to_f64(&ahi),
        b_lo: rat_to_f64(&blo),
        b_hi: rat_to_f64(&bhi),
    })
}

/// Extended endpoint.
#[derive(Debug, Clone)]
pub enum Extended {
    NegInf,
    Fin(Bound),
    PosInf,
}

pub fn cmp_extended(a: &Extended, b: &Extended) -> Result<Ordering, Strat1dError> {
    Ok(match (a, b) {
        (Extended::NegInf, Extended::NegInf) => Ordering::Equal,
        (Extended::NegInf, _) => Ordering::Less,
        (_, Extended::NegInf) => Ordering::Greater,
        (Extended::PosInf, Extended::PosInf) => Ordering::Equal,
        (Extended::PosInf, _) => Ordering::Greater,
        (_, Extended::PosInf) => Ordering::Less,
        (Extended::Fin(x), Extended::Fin(y)) => cmp_bounds(x, y)?,
    })
}

/// One normal-form component.
#[derive(Debug, Clone)]
pub enum SetComponent {
    Point(Bound),
    /// Open interval with `left < right`.
    Interval(Extended, Extended),
}

/// Finite union of points and open intervals, sorted, pairwise disjoint,
/// with no mergeable adjacency.
#[derive(Debug, Clone, Default)]
pub struct UnivariateSASet {
    components: Vec<SetComponent>,
}

/// Internal sweep item: an interval with endpoint inclusion flags.
#[derive(Debug, Clone)]
struct Run {
    lo: Extended,
    lo_closed: bool,
    hi: Extended,
    hi_closed: bool,
}

impl UnivariateSASet {
    pub fn empty() -> UnivariateSASet {
        UnivariateSASet { components: vec![] }
    }

    pub fn all() -> UnivariateSASet {
        UnivariateSASet {
            components: vec![SetComponent::Interval(Extended::NegInf, Extended::PosInf)],
        }
    }

    pub fn point(v: f64) -> UnivariateSASet {
        UnivariateSASet {
            components: vec![SetComponent::Point(Bound::Exact(v))],
        }
    }

    /// Open interval; `lo`/`hi` may be infinite.
    pub fn open_interval(lo: f64, hi: f64) -> Result<UnivariateSASet, Strat1dError> {
        if !(lo < hi) {
            return Err(Strat1dError::EmptyInterval { lo, hi });
        }
        let l = if lo == f64::NEG_INFINITY {
            Extended::NegInf
        } else {
            Extended::Fin(Bound::Exact(lo))
        };
        let h = if hi == f64::INFINITY {
            Extended::PosInf
        } else {
            Extended::Fin(Bound::Exact(hi))
        };
        Ok(UnivariateSASet {
            components: vec![SetComponent::Interval(l, h)],
        })
    }

    pub fn components(&self) -> &[SetComponent] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Assemble from components (used by the solver); normalizes.
    pub fn from_components(components: Vec<SetComponent>) -> Result<UnivariateSASet, Strat1dError> {
        let runs = components.into_iter().map(component_to_run).collect();
        normalize(runs)
    }

    pub fn union(&self, other: &UnivariateSASet) -> Result<UnivariateSASet, Strat1dError> {
        let mut runs: Vec<Run> = self.components.iter().cloned().map(component_to_run).collect();
        runs.extend(other.components.iter().cloned().map(component_to_run));
        normalize(runs)
    }

    pub fn intersect(&self, other: &UnivariateSASet) -> Result<UnivariateSASet, Strat1dError> {
        let mut out = Vec::new();
        for a in &self.components {
            for b in &other.components {
                if let Some(r) = intersect_runs(
                    &component_to_run(a.clone()),
                    &component_to_run(b.clone()),
                )? {
                    out.push(r);
                }
            }
        }
        normalize(out)
    }

    pub fn complement(&self) -> Result<UnivariateSASet, Strat1dError> {
        // Components are sorted and disjoint; walk gaps.
        let mut gaps = Vec::new();
        let mut cursor = Extended::NegInf;
        let mut cursor_closed = false; // whether the cursor point itself is in the gap
        for c in &self.components {
            let run = component_to_run(c.clone());
            // Gap from cursor to run.lo.
            push_gap(&mut gaps, &cursor, cursor_closed, &run.lo, !run.lo_closed)?;
            cursor = run.hi.clone();
            cursor_closed = !run.hi_closed;
        }
        push_gap(&mut gaps, &cursor, cursor_closed, &Extended::PosInf, false)?;
        normalize(gaps)
    }

    /// Set equality (normal forms are canonical up to bound comparison).
    pub fn set_eq(&self, other: &UnivariateSASet) -> Result<bool, Strat1dError> {
        if self.components.len() != other.components.len() {
            return Ok(false);
        }
        for (a, b) in self.components.iter().zip(&other.components) {
            let same = match (a, b) {
                (SetComponent::Point(x), SetComponent::Point(y)) => {
                    cmp_bounds(x, y)? == Ordering::Equal
                }
                (SetComponent::Interval(al, ah), SetComponent::Interval(bl, bh)) => {
                    cmp_extended(al, bl)? == Ordering::Equal
                        && cmp_extended(ah, bh)? == Ordering::Equal
                }
                _ => false,
            };
            if !same {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Structural check of the normal-form invariants: well-formed
    /// components, sorted and pairwise disjoint, and no
    /// interval-point-interval triple that should have merged into one open
    /// interval.
    pub fn is_normal_form(&self) -> Result<bool, Strat1dError> {
        for c in &self.components {
            if let SetComponent::Interval(l, h) = c {
                if cmp_extended(l, h)? != Ordering::Less {
                    return Ok(false);
                }
            }
        }
        for w in self.components.windows(2) {
            let a = component_to_run(w[0].clone());
            let b = component_to_run(w[1].clone());
            match cmp_extended(&a.hi, &b.lo)? {
                Ordering::Less => {}
                // Touching is fine unless both sides contain the endpoint.
                Ordering::Equal => {
                    if a.hi_closed && b.lo_closed {
                        return Ok(false);
                    }
                }
                Ordering::Greater => return Ok(false),
            }
        }
        for w in self.components.windows(3) {
            if let (
                SetComponent::Interval(_, a_hi),
                SetComponent::Point(p),
                SetComponent::Interval(b_lo, _),
            ) = (&w[0], &w[1], &w[2])
            {
                let pe = Extended::Fin(p.clone());
                if cmp_extended(a_hi, &pe)? == Ordering::Equal
                    && cmp_extended(&pe, b_lo)? == Ordering::Equal
                {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Membership test for exact values.
    pub fn contains(&self, x: f64) -> Result<bool, Strat1dError> {
        let bx = Bound::Exact(x);
        for c in &self.components {
            match c {
                SetComponent::Point(p) => {
                    if cmp_bounds(p, &bx)? == Ordering::Equal {
                        return Ok(true);
                    }
                }
                SetComponent::Interval(l, h) => {
                    let after_lo = match l {
                        Extended::NegInf => true,
                        Extended::PosInf => false,
                        Extended::Fin(b) => cmp_bounds(b, &bx)? == Ordering::Less,
                    };
                    let before_hi = match h {
                        Extended::PosInf => true,
                        Extended::NegInf => false,
                        Extended::Fin(b) => cmp_bounds(&bx, b)? == Ordering::Less,
                    };
                    if after_lo && before_hi {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }
}

fn component_to_run(c: SetComponent) -> Run {
    match c {
        SetComponent::Point(b) => Run {
            lo: Extended::Fin(b.clone()),
            lo_closed: true,
            hi: Extended::Fin(b),
            hi_closed: true,
        },
        SetComponent::Interval(l, h) => Run {
            lo: l,
            lo_closed: false,
            hi: h,
            hi_closed: false,
        },
    }
}

fn push_gap(
    gaps: &mut Vec<Run>,
    lo: &Extended,
    lo_closed: bool,
    hi: &Extended,
    hi_closed: bool,
) -> Result<(), Strat1dError> {
    match cmp_extended(lo, hi)? {
        Ordering::Less => gaps.push(Run {
            lo: lo.clone(),
            lo_closed,
            hi: hi.clone(),
            hi_closed,
        }),
        Ordering::Equal => {
            if lo_closed && hi_closed {
                if let Extended::Fin(b) = lo {
                    gaps.push(Run {
                        lo: Extended::Fin(b.clone()),
                        lo_closed: true,
                        hi: Extended::Fin(b.clone()),
                        hi_closed: true,
                    });
                }
            }
        }
        Ordering::Greater => {}
    }
    Ok(())
}

fn intersect_runs(a: &Run, b: &Run) -> Result<Option<Run>, Strat1dError> {
    let (lo, lo_closed) = match cmp_extended(&a.lo, &b.lo)? {
        Ordering::Less => (b.lo.clone(), b.lo_closed),
        Ordering::Greater => (a.lo.clone(), a.lo_closed),
        Ordering::Equal => (a.lo.clone(), a.lo_closed && b.lo_closed),
    };
    let (hi, hi_closed) = match cmp_extended(&a.hi, &b.hi)? {
        Ordering::Less => (a.hi.clone(), a.hi_closed),
        Ordering::Greater => (b.hi.clone(), b.hi_closed),
        Ordering::Equal => (a.hi.clone(), a.hi_closed && b.hi_closed),
    };
    match cmp_extended(&lo, &hi)? {
        Ordering::Less => Ok(Some(Run { lo, lo_closed, hi, hi_closed })),
        Ordering::Equal if lo_closed && hi_closed => Ok(Some(Run { lo, lo_closed, hi, hi_closed })),
        _ => Ok(None),
    }
}

fn normalize(mut runs: Vec<Run>) -> Result<UnivariateSASet, Strat1dError> {
    // Insertion sort by (lo, closedness): closed endpoints first.
    let mut sorted: Vec<Run> = Vec::with_capacity(runs.len());
    for r in runs.drain(..) {
        let mut idx = sorted.len();
        for (i, s) in sorted.iter().enumerate() {
            let ord = cmp_extended(&r.lo, &s.lo)?;
            if ord == Ordering::Less || (ord == Ordering::Equal && r.lo_closed && !s.lo_closed) {
                idx = i;
                break;
            }
        }
        sorted.insert(idx, r);
    }
    // Merge connected runs.
    let mut merged: Vec<Run> = Vec::new();
    for r in sorted {
        match merged.last_mut() {
            None => merged.push(r),
            Some(cur) => {
                let connects = match cmp_extended(&r.lo, &cur.hi)? {
                    Ordering::Less => true,
                    Ordering::Equal => cur.hi_closed || r.lo_closed,
                    Ordering::Greater => false,
                };
                if !connects {
                    merged.push(r);
                } else {
                    match cmp_extended(&r.hi, &cur.hi)? {
                        Ordering::Greater => {
                            cur.hi = r.hi;
                            cur.hi_closed = r.hi_closed;
                        }
                        Ordering::Equal => cur.hi_closed |= r.hi_closed,
                        Ordering::Less => {}
                    }
                }
            }
        }
    }
    // Emit canonical components per merged run.
    let mut components = Vec::new();
    for run in merged {
        if cmp_extended(&run.lo, &run.hi)? == Ordering::Equal {
            if let Extended::Fin(b) = run.lo {
                components.push(SetComponent::Point(b));
            }
            continue;
        }
        if run.lo_closed {
            if let Extended::Fin(b) = &run.lo {
                components.push(SetComponent::Point(b.clone()));
            }
        }
        components.push(SetComponent::Interval(run.lo.clone(), run.hi.clone()));
        if run.hi_closed {
            if let Extended::Fin(b) = &run.hi {
                components.push(SetComponent::Point(b.clone()));
            }
        }
    }
    Ok(UnivariateSASet { components })
}

impl std::fmt::Display for UnivariateSASet {
    /// `{0} | (1,2) | (3,+inf)`; the empty set prints as `empty`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.components.is_empty() {
            return f.write_str("empty");
        }
        let ext = |e: &Extended| match e {
            Extended::NegInf => "-inf".to_string(),
            Extended::PosInf => "+inf".to_string(),
            Extended::Fin(b) => format!("{}", b.approx()),
        };
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|c| match c {
                SetComponent::Point(b) => format!("{{{}}}", b.approx()),
                SetComponent::Interval(l, h) => format!("({},{})", ext(l), ext(h)),
            })
            .collect();
        f.write_str(&parts.join(" | "))
    }
}

/// Parse the textual form emitted by `Display`. Only exact (literal)
/// endpoints are representable in text.
pub fn parse_saset(text: &str) -> Result<UnivariateSASet, Strat1dError> {
    let text = text.trim();
    if text.is_empty() || text == "empty" {
        return Ok(UnivariateSASet::empty());
    }
    let mut runs = Vec::new();
    for part in text.split('|') {
        let part = part.trim();
        let err = |message: &str| Strat1dError::SetParse {
            token: part.to_string(),
            message: message.to_string(),
        };
        if let Some(inner) = part.strip_prefix('{').and_then(|p| p.strip_suffix('}')) {
            let v: f64 = inner
                .trim()
                .parse()
                .map_err(|_| err("bad point literal"))?;
            runs.push(component_to_run(SetComponent::Point(Bound::Exact(v))));
        } else if let Some(inner) = part.strip_prefix('(').and_then(|p| p.strip_suffix(')')) {
            let mut halves = inner.splitn(2, ',');
            let lo = halves.next().ok_or_else(|| err("missing left endpoint"))?.trim();
            let hi = halves.next().ok_or_else(|| err("missing right endpoint"))?.trim();
            let parse_ext = |s: &str, neg_default: bool| -> Result<Extended, Strat1dError> {
                match s {
                    "-inf" | "-oo" => Ok(Extended::NegInf),
                    "+inf" | "inf" | "+oo" => Ok(Extended::PosInf),
                    _ => s
                        .parse::<f64>()
                        .map(|v| Extended::Fin(Bound::Exact(v)))
                        .map_err(|_| Strat1dError::SetParse {
                            token: s.to_string(),
                            message: if neg_default {
                                "bad left endpoint".into()
                            } else {
                                "bad right endpoint".into()
                            },
                        }),
                }
            };
            let l = parse_ext(lo, true)?;
            let h = parse_ext(hi, false)?;
            runs.push(Run {
                lo: l,
                lo_closed: false,
                hi: h,
                hi_closed: false,
            });
        } else {
            return Err(err("expected {point} or (lo,hi)"));
        }
    }
    normalize(runs)
}
