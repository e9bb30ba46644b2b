//! Univariate o-minimal machinery: semialgebraic set algebra, Sturm-based
//! root isolation, monotonicity decomposition, one-sided limits, and
//! asymptotic exponents.
//!
//! Everything that decides a sign or an ordering does so in exact rational
//! arithmetic (binary64 inputs convert exactly); floating point appears only
//! in reported values and certified enclosure endpoints.

mod error;
mod limits;
mod monotone;
mod piecewise;
mod poly;
mod saset;
mod solve;
mod sturm;

pub use error::Strat1dError;
pub use limits::{asymptotic_exponent, one_sided_limit, ExtendedReal, LimitPoint, Side};
pub use monotone::{
    monotonicity_decomposition, monotonicity_decomposition_poly, MonotoneDecomposition,
    MonotoneLabel,
};
pub use piecewise::PiecewisePoly;
pub use poly::{Poly, RatPoly};
pub use saset::{
    cmp_bounds, parse_saset, Bound, Extended, SetComponent, UnivariateSASet,
};
pub use solve::{
    isolate_real_roots, real_roots_approx, solve_poly_inequality, Relation,
};
pub use sturm::{isolate_roots, IsolatedRoot, SturmChain};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_example() {
        // complement({0} U (1,2)) = (-inf,0) U (0,1) U {1} U {2} U (2,inf)
        let s = UnivariateSASet::point(0.0)
            .union(&UnivariateSASet::open_interval(1.0, 2.0).unwrap())
            .unwrap();
        let c = s.complement().unwrap();
        assert_eq!(format!("{c}"), "(-inf,0) | (0,1) | {1} | {2} | (2,+inf)");
        // S (intersect) complement(S) = empty.
        assert!(s.intersect(&c).unwrap().is_empty());
        // Double complement is the identity.
        assert!(c.complement().unwrap().set_eq(&s).unwrap());
    }

    #[test]
    fn merge_rule() {
        // (0,2) U {2} U (2,3) normalizes to (0,3).
        let s = UnivariateSASet::open_interval(0.0, 2.0)
            .unwrap()
            .union(&UnivariateSASet::point(2.0))
            .unwrap()
            .union(&UnivariateSASet::open_interval(2.0, 3.0).unwrap())
            .unwrap();
        assert_eq!(format!("{s}"), "(0,3)");
    }

    #[test]
    fn saset_text_round_trip() {
        for text in ["{0} | (1,2) | (3,+inf)", "empty", "(-inf,+inf)", "{-1.5}"] {
            let s = parse_saset(text).unwrap();
            let s2 = parse_saset(&format!("{s}")).unwrap();
            assert!(s.set_eq(&s2).unwrap(), "{text}");
        }
    }

    #[test]
    fn solve_quadratic_inequality() {
        // x^2 - 2 < 0 on (-sqrt2, sqrt2), endpoints enclosed to 1e-12.
        let p = Poly::new(vec![-2.0, 0.0, 1.0]);
        let s = solve_poly_inequality(&p, Relation::Less).unwrap();
        let comps = s.components();
        assert_eq!(comps.len(), 1);
        match &comps[0] {
            SetComponent::Interval(Extended::Fin(lo), Extended::Fin(hi)) => {
                let r2 = 2.0_f64.sqrt();
                assert!((lo.approx() + r2).abs() < 1e-11);
                assert!((hi.approx() - r2).abs() < 1e-11);
                assert!(lo.hi_f64() - lo.lo_f64() <= 2e-12);
            }
            other => panic!("unexpected component {other:?}"),
        }

        // x^2 >= 0 is all of R: complement of the empty solution of < 0.
        let sq = Poly::new(vec![0.0, 0.0, 1.0]);
        let lt = solve_poly_inequality(&sq, Relation::Less).unwrap();
        assert!(lt.is_empty());
        let ge = lt.complement().unwrap();
        assert!(ge.set_eq(&UnivariateSASet::all()).unwrap());

        // x(x-1)(x-2) = 0 -> {0} U {1} U {2}.
        let cubic = Poly::new(vec![0.0, 2.0, -3.0, 1.0]);
        let eq = solve_poly_inequality(&cubic, Relation::Equal).unwrap();
        assert_eq!(format!("{eq}"), "{0} | {1} | {2}");
    }

    #[test]
    fn solve_zero_polynomial() {
        let z = Poly::zero();
        assert!(solve_poly_inequality(&z, Relation::Equal)
            .unwrap()
            .set_eq(&UnivariateSASet::all())
            .unwrap());
        assert!(solve_poly_inequality(&z, Relation::Less).unwrap().is_empty());
        let bad = Poly::new(vec![f64::INFINITY]);
        assert!(matches!(
            solve_poly_inequality(&bad, Relation::Less),
            Err(Strat1dError::Degenerate { .. })
        ));
    }

    /// Solution sets agree with dense sign evaluation away from enclosures.
    #[test]
    fn solve_agrees_with_sign_scan() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let deg = rng.gen_range(1..=6);
            let p = Poly::new((0..=deg).map(|_| rng.gen_range(-2.0..2.0)).collect());
            if p.is_zero() {
                continue;
            }
            let lt = solve_poly_inequality(&p, Relation::Less).unwrap();
            let enclosures = isolate_real_roots(&p).unwrap();
            'grid: for k in 0..10_000 {
                let x = -5.0 + 10.0 * k as f64 / 9_999.0;
                for (lo, hi) in &enclosures {
                    if x >= lo - 1e-9 && x <= hi + 1e-9 {
                        continue 'grid;
                    }
                }
                let v = p.eval(x);
                if v.abs() < 1e-9 {
                    continue;
                }
                assert_eq!(
                    lt.contains(x).unwrap(),
                    v < 0.0,
                    "sign disagreement at {x} (p(x) = {v})"
                );
            }
        }
    }

    /// Boolean-algebra laws on randomized normal forms.
    #[test]
    fn boolean_laws_randomized() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let random_set = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut s = UnivariateSASet::empty();
            for _ in 0..rng.gen_range(0..6) {
                let a = (rng.gen_range(-40..40) as f64) / 4.0;
                let piece = if rng.gen_bool(0.3) {
                    UnivariateSASet::point(a)
                } else {
                    let b = a + (rng.gen_range(1..12) as f64) / 4.0;
                    UnivariateSASet::open_interval(a, b).unwrap()
                };
                s = s.union(&piece).unwrap();
            }
            s
        };
        for _ in 0..300 {
            let s = random_set(&mut rng);
            let t = random_set(&mut rng);
            assert!(s.is_normal_form().unwrap());
            assert!(t.is_normal_form().unwrap());
            // Commutativity.
            assert!(s.union(&t).unwrap().set_eq(&t.union(&s).unwrap()).unwrap());
            assert!(s
                .intersect(&t)
                .unwrap()
                .set_eq(&t.intersect(&s).unwrap())
                .unwrap());
            // De Morgan.
            let lhs = s.union(&t).unwrap().complement().unwrap();
            let rhs = s
                .complement()
                .unwrap()
                .intersect(&t.complement().unwrap())
                .unwrap();
            assert!(lhs.set_eq(&rhs).unwrap());
            // Double complement.
            assert!(s.complement().unwrap().complement().unwrap().set_eq(&s).unwrap());
            // S intersect complement(S) = empty; union = R.
            let c = s.complement().unwrap();
            assert!(s.intersect(&c).unwrap().is_empty());
            assert!(s.union(&c).unwrap().set_eq(&UnivariateSASet::all()).unwrap());
            // Closure: outputs are normal forms.
            assert!(lhs.is_normal_form().unwrap());
            assert!(s.union(&t).unwrap().is_normal_form().unwrap());
            assert!(s.intersect(&t).unwrap().is_normal_form().unwrap());
        }
    }

    #[test]
    fn enclosure_comparisons() {
        // Roots of x^2 - 2 and of (x^2 - 2)(x^2 - 3): sqrt2 appears in both
        // and compares equal through the gcd route.
        let p1 = Poly::new(vec![-2.0, 0.0, 1.0]);
        let p2 = Poly::new(vec![6.0, 0.0, -5.0, 0.0, 1.0]);
        let r1 = isolate_real_roots(&p1).unwrap();
        let r2 = isolate_real_roots(&p2).unwrap();
        assert_eq!(r1.len(), 2);
        assert_eq!(r2.len(), 4);
        let s1 = solve_poly_inequality(&p1, Relation::Equal).unwrap();
        let s2 = solve_poly_inequality(&p2, Relation::Equal).unwrap();
        // sqrt2 and sqrt3 both lie in s2; s1 (intersect) s2 = s1.
        let both = s1.intersect(&s2).unwrap();
        assert!(both.set_eq(&s1).unwrap());
    }

    #[test]
    fn monotone_examples() {
        // x^3 - 3x on (-3,3): cuts at -1, 1; inc, dec, inc.
        let p = Poly::new(vec![0.0, -3.0, 0.0, 1.0]);
        let d = monotonicity_decomposition_poly(&p, -3.0, 3.0).unwrap();
        assert_eq!(d.cuts.len(), 2);
        assert!((d.cuts[0] + 1.0).abs() < 1e-9 && (d.cuts[1] - 1.0).abs() < 1e-9);
        assert_eq!(
            d.labels,
            vec![
                MonotoneLabel::StrictlyIncreasing,
                MonotoneLabel::StrictlyDecreasing,
                MonotoneLabel::StrictlyIncreasing
            ]
        );

        // relu on (-1,1): cut at 0; constant then increasing.
        let d = monotonicity_decomposition(&PiecewisePoly::relu(), -1.0, 1.0).unwrap();
        assert_eq!(d.cuts, vec![0.0]);
        assert_eq!(
            d.labels,
            vec![MonotoneLabel::Constant, MonotoneLabel::StrictlyIncreasing]
        );

        // Constant 5 on (0,1): no cuts.
        let d = monotonicity_decomposition_poly(&Poly::constant(5.0), 0.0, 1.0).unwrap();
        assert!(d.cuts.is_empty());
        assert_eq!(d.labels, vec![MonotoneLabel::Constant]);

        // x^3 has a stationary point but no monotonicity change: no cut.
        let d =
            monotonicity_decomposition_poly(&Poly::new(vec![0.0, 0.0, 0.0, 1.0]), -1.0, 1.0)
                .unwrap();
        assert!(d.cuts.is_empty());
        assert_eq!(d.labels, vec![MonotoneLabel::StrictlyIncreasing]);
    }

    /// Labels verified by strict sampling, as the decomposition contract
    /// requires.
    #[test]
    fn monotone_labels_verified_by_sampling() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..40 {
            let deg = rng.gen_range(1..=5);
            let p = Poly::new((0..=deg).map(|_| rng.gen_range(-1.0..1.0)).collect());
            if p.is_zero() || p.degree() == 0 {
                continue;
            }
            let d = monotonicity_decomposition_poly(&p, -3.0, 3.0).unwrap();
            for (a, b, label) in d.intervals() {
                for _ in 0..100 {
                    let s = rng.gen_range(a..b);
                    let t = rng.gen_range(a..b);
                    let (s, t) = if s < t { (s, t) } else { (t, s) };
                    if s == t {
                        continue;
                    }
                    match label {
                        MonotoneLabel::StrictlyIncreasing => {
                            assert!(p.eval(s) < p.eval(t), "inc fails on [{a},{b}] at {s},{t}")
                        }
                        MonotoneLabel::StrictlyDecreasing => {
                            assert!(p.eval(s) > p.eval(t), "dec fails on [{a},{b}] at {s},{t}")
                        }
                        MonotoneLabel::Constant => {
                            assert!((p.eval(s) - p.eval(t)).abs() <= 1e-12)
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn one_sided_limit_examples() {
        let one = PiecewisePoly::from_poly(Poly::constant(1.0));
        let x = PiecewisePoly::from_poly(Poly::new(vec![0.0, 1.0]));
        // 1/x as x -> 0+ is +inf.
        assert_eq!(
            one_sided_limit(&one, &x, LimitPoint::Finite(0.0), Side::Right).unwrap(),
            ExtendedReal::PosInf
        );
        // ... and -inf from the left.
        assert_eq!(
            one_sided_limit(&one, &x, LimitPoint::Finite(0.0), Side::Left).unwrap(),
            ExtendedReal::NegInf
        );

        // (x^2 - 1)/(x - 1) -> 2 as x -> 1+ (removable singularity).
        let num = PiecewisePoly::from_poly(Poly::new(vec![-1.0, 0.0, 1.0]));
        let den = PiecewisePoly::from_poly(Poly::new(vec![-1.0, 1.0]));
        assert_eq!(
            one_sided_limit(&num, &den, LimitPoint::Finite(1.0), Side::Right).unwrap(),
            ExtendedReal::Finite(2.0)
        );

        // relu(x)/x -> 1 as x -> 0+ (right piece is x/x), and 0 from the left.
        let relu = PiecewisePoly::relu();
        assert_eq!(
            one_sided_limit(&relu, &x, LimitPoint::Finite(0.0), Side::Right).unwrap(),
            ExtendedReal::Finite(1.0)
        );
        assert_eq!(
            one_sided_limit(&relu, &x, LimitPoint::Finite(0.0), Side::Left).unwrap(),
            ExtendedReal::Finite(0.0)
        );

        // Denominator identically zero: undefined.
        let zero = PiecewisePoly::from_poly(Poly::zero());
        assert!(matches!(
            one_sided_limit(&one, &zero, LimitPoint::Finite(0.0), Side::Right),
            Err(Strat1dError::Undefined)
        ));
    }

    /// Finite limits agree with Richardson-extrapolated samples.
    #[test]
    fn one_sided_limit_matches_sampling() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..40 {
            let dn = rng.gen_range(0..=3);
            let dd = rng.gen_range(0..=3);
            let num = Poly::new((0..=dn).map(|_| rng.gen_range(-2.0..2.0)).collect());
            let mut den = Poly::new((0..=dd).map(|_| rng.gen_range(-2.0..2.0)).collect());
            if den.is_zero() {
                den = Poly::constant(1.0);
            }
            let c = rng.gen_range(-1.0..1.0);
            let pn = PiecewisePoly::from_poly(num.clone());
            let pd = PiecewisePoly::from_poly(den.clone());
            if let Ok(ExtendedReal::Finite(l)) =
                one_sided_limit(&pn, &pd, LimitPoint::Finite(c), Side::Right)
            {
                // Richardson extrapolation of f(c + 10^-k).
                let f = |t: f64| num.eval(t) / den.eval(t);
                let f1 = f(c + 1e-5);
                let f2 = f(c + 1e-6);
                let extrapolated = f2 + (f2 - f1) / 9.0;
                if f1.is_finite() && f2.is_finite() {
                    assert!(
                        (extrapolated - l).abs() <= 1e-6 * (1.0 + l.abs()),
                        "limit {l} vs extrapolated {extrapolated}"
                    );
                }
            }
        }
    }

    #[test]
    fn asymptotic_exponent_examples() {
        // (3t^3 + 1)/(t + 2) ~ 3 t^2.
        let num = Poly::new(vec![1.0, 0.0, 0.0, 3.0]);
        let den = Poly::new(vec![2.0, 1.0]);
        assert_eq!(asymptotic_exponent(&num, &den).unwrap(), (3.0, 2));

        // 1/t^2 ~ 1 * t^-2.
        let one = Poly::constant(1.0);
        let t2 = Poly::new(vec![0.0, 0.0, 1.0]);
        assert_eq!(asymptotic_exponent(&one, &t2).unwrap(), (1.0, -2));

        // Constant 7 ~ 7 t^0.
        assert_eq!(
            asymptotic_exponent(&Poly::constant(7.0), &one).unwrap(),
            (7.0, 0)
        );

        // Zero numerator has no asymptotic exponent.
        assert!(matches!(
            asymptotic_exponent(&Poly::zero(), &one),
            Err(Strat1dError::EventuallyZero)
        ));
    }

    /// f(t)/(c t^q) is within 1e-6 of 1 at t = 1e8.
    #[test]
    fn asymptotic_exponent_matches_far_samples() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        for _ in 0..60 {
            let dn = rng.gen_range(0..=6);
            let dd = rng.gen_range(0..=6);
            let mut num = Poly::new((0..=dn).map(|_| rng.gen_range(-3.0..3.0)).collect());
            let mut den = Poly::new((0..=dd).map(|_| rng.gen_range(-3.0..3.0)).collect());
            if num.is_zero() {
                num = Poly::constant(1.0);
            }
            if den.is_zero() {
                den = Poly::constant(1.0);
            }
            let (c, q) = asymptotic_exponent(&num, &den).unwrap();
            let t = 1e8;
            let f = num.eval(t) / den.eval(t);
            let model = c * t.powi(q as i32);
            assert!(
                (f / model - 1.0).abs() <= 1e-6,
                "f/ct^q = {} for c={c}, q={q}",
                f / model
            );
        }
    }

    #[test]
    fn sturm_chain_counts() {
        // x^2 - 2 has 2 real roots.
        let p = Poly::new(vec![-2.0, 0.0, 1.0]).to_rational().unwrap();
        let chain = SturmChain::new(&p.square_free());
        let lo = num_rational::BigRational::from_integer((-10).into());
        let hi = num_rational::BigRational::from_integer(10.into());
        assert_eq!(chain.roots_in(&lo, &hi), 2);

        // Repeated roots count once: (x-1)^2.
        let p = Poly::new(vec![1.0, -2.0, 1.0]);
        let roots = isolate_real_roots(&p).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((0.5 * (roots[0].0 + roots[0].1) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn piecewise_breakpoint_semantics() {
        let relu = PiecewisePoly::relu();
        // Evaluation at the breakpoint uses the right piece.
        assert_eq!(relu.eval(0.0), 0.0);
        assert_eq!(relu.piece_index(0.0), 1);
        assert_eq!(relu.piece_index_left(0.0), 0);
        assert!(relu.is_continuous_at(0));

        // Discontinuous step.
        let step = PiecewisePoly::new(
            vec![0.0],
            vec![Poly::constant(0.0), Poly::constant(1.0)],
        )
        .unwrap();
        assert!(!step.is_continuous_at(0));
        assert_eq!(step.eval(0.0), 1.0);
    }
}
