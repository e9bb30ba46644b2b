//! Selection-based automatic differentiation and a Clarke subdifferential
//! oracle for expressions from `tame-expr`.
//!
//! All operations are pure given `(expression, inputs, seed)`; sampling uses
//! counter-based RNG streams keyed by sample index, so results are
//! reproducible from one seed regardless of evaluation order.

mod ad;
mod clarke;
mod criticality;
mod error;
mod lasso;
mod minnorm;
mod onesided;
mod policy;

pub use ad::ad_derivative;
pub use clarke::{
    clarke_generators, clarke_generators_default, default_radii, is_piecewise_polynomial_expr,
    HullWarning, SubgradientHull, DEDUP_TOL, DEFAULT_SAMPLES_PER_RADIUS, STABILIZE_TOL,
};
pub use criticality::{chain_rule_residual, is_clarke_critical, Curve};
pub use error::SubdiffError;
pub use lasso::{
    lasso_clarke_generators, lasso_smooth_gradient, riemannian_grad_lasso, StratumModel,
};
pub use minnorm::{certificate_violation, min_norm_element, min_norm_point, MIN_NORM_CAP, MIN_NORM_TOL};
pub use onesided::{left_derivative, right_derivative, value_and_directional};
pub use policy::{KinkPolicy, KinkRule};

#[cfg(test)]
mod tests {
    use super::*;
    use tame_expr::{parse_expr, Expr, Primitive};

    /// x+ - (1/2)(-x)+ : relu(x) - 0.5*relu(-x)
    fn pathology_one() -> Expr {
        Expr::sum(vec![
            Expr::relu(Expr::var(0)),
            Expr::scale(-0.5, Expr::relu(Expr::scale(-1.0, Expr::var(0)))),
        ])
    }

    /// ((-x)+ + x) - x+ : the zero function with a spurious AD derivative.
    fn pathology_two() -> Expr {
        Expr::sum(vec![
            Expr::relu(Expr::scale(-1.0, Expr::var(0))),
            Expr::var(0),
            Expr::scale(-1.0, Expr::relu(Expr::var(0))),
        ])
    }

    #[test]
    fn ad_pathologies_match_reported_values() {
        let policy = KinkPolicy::default();
        let d1 = ad_derivative(&pathology_one(), &[0.0], &policy).unwrap();
        assert_eq!(d1, vec![0.0]);
        let d2 = ad_derivative(&pathology_two(), &[0.0], &policy).unwrap();
        assert_eq!(d2, vec![1.0]);
        // Smooth case.
        let sq = Expr::square(Expr::var(0));
        assert_eq!(ad_derivative(&sq, &[3.0], &policy).unwrap(), vec![6.0]);
    }

    #[test]
    fn ad_respects_alternate_policies() {
        let e = Expr::relu(Expr::var(0));
        let mut policy = KinkPolicy::default();
        policy.relu = KinkRule::Second;
        assert_eq!(ad_derivative(&e, &[0.0], &policy).unwrap(), vec![1.0]);
        policy.relu = KinkRule::Fixed(0.25);
        assert_eq!(ad_derivative(&e, &[0.0], &policy).unwrap(), vec![0.25]);
        policy.relu = KinkRule::Fixed(2.0);
        assert!(matches!(
            ad_derivative(&e, &[0.0], &policy),
            Err(SubdiffError::InvalidPolicy { .. })
        ));
    }

    #[test]
    fn ad_matches_finite_differences_at_smooth_points() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let smooth = [
            Primitive::Tanh,
            Primitive::Logistic,
            Primitive::Square,
            Primitive::Softplus,
            Primitive::Gelu,
            Primitive::Arctan,
            Primitive::Erf,
            Primitive::Swish(1.3),
        ];
        for _ in 0..60 {
            let n = rng.gen_range(1..=6);
            // Random depth <= 5 tower over a random affine bottom layer.
            let mut e = Expr::affine(
                (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect(),
                rng.gen_range(-0.5..0.5),
                (0..n).map(Expr::var).collect(),
            )
            .unwrap();
            for _ in 0..rng.gen_range(1..=4) {
                e = match rng.gen_range(0..3) {
                    0 => Expr::prim(smooth[rng.gen_range(0..smooth.len())], vec![e]).unwrap(),
                    1 => Expr::sum(vec![e, Expr::square(Expr::var(rng.gen_range(0..n)))]),
                    _ => Expr::prod(e, Expr::constant(rng.gen_range(0.5..1.5))),
                };
            }
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let grad = ad_derivative(&e, &x, &KinkPolicy::default()).unwrap();
            let h = 1e-6;
            for j in 0..n {
                let mut xp = x.clone();
                xp[j] += h;
                let mut xm = x.clone();
                xm[j] -= h;
                let fd = (e.eval(&xp).unwrap() - e.eval(&xm).unwrap()) / (2.0 * h);
                let scale = 1.0 + fd.abs();
                assert!(
                    (grad[j] - fd).abs() <= 1e-5 * scale,
                    "grad {} vs fd {}",
                    grad[j],
                    fd
                );
            }
        }
    }

    #[test]
    fn one_sided_limits_on_compositions() {
        // relu(relu(x) - x/2) has right slope 1/2 and left slope 1/2 at 0.
        let inner = Expr::sum(vec![
            Expr::relu(Expr::var(0)),
            Expr::scale(-0.5, Expr::var(0)),
        ]);
        let f = Expr::relu(inner);
        assert_eq!(right_derivative(&f, 0.0).unwrap(), 0.5);
        assert_eq!(left_derivative(&f, 0.0).unwrap(), -0.5);

        // |x| at 0.
        let a = Expr::abs(Expr::var(0));
        assert_eq!(right_derivative(&a, 0.0).unwrap(), 1.0);
        assert_eq!(left_derivative(&a, 0.0).unwrap(), -1.0);

        // relu(x^2) is differentiable at 0 with derivative 0.
        let r = Expr::relu(Expr::square(Expr::var(0)));
        assert_eq!(right_derivative(&r, 0.0).unwrap(), 0.0);
        assert_eq!(left_derivative(&r, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn clarke_exact_hulls() {
        // |x| at 0: generators {-1, +1}, exact.
        let a = Expr::abs(Expr::var(0));
        let hull = clarke_generators_default(&a, &[0.0], 7).unwrap();
        assert!(hull.exact);
        assert_eq!(hull.generators, vec![vec![-1.0], vec![1.0]]);

        // x+ - (1/2)(-x)+ at 0: hull [1/2, 1].
        let hull = clarke_generators_default(&pathology_one(), &[0.0], 7).unwrap();
        assert!(hull.exact);
        let mut gens: Vec<f64> = hull.generators.iter().map(|g| g[0]).collect();
        gens.sort_by(f64::total_cmp);
        assert_eq!(gens, vec![0.5, 1.0]);

        // x^2 at 1: single generator {2}.
        let sq = Expr::square(Expr::var(0));
        let hull = clarke_generators_default(&sq, &[1.0], 7).unwrap();
        assert!(hull.exact);
        assert_eq!(hull.generators, vec![vec![2.0]]);
    }

    #[test]
    fn clarke_sampled_hull_straddles_kink() {
        // f(x1, x2) = |x1| + x2 at the origin: sampled hull spans
        // [-1, 1] x {1}.
        let f = Expr::sum(vec![Expr::abs(Expr::var(0)), Expr::var(1)]);
        let hull = clarke_generators_default(&f, &[0.0, 0.0], 13).unwrap();
        assert!(!hull.exact);
        assert_eq!(hull.stabilized, Some(true));
        let g1s: Vec<f64> = hull.generators.iter().map(|g| g[0]).collect();
        assert!(g1s.iter().any(|&g| (g - 1.0).abs() < 1e-9));
        assert!(g1s.iter().any(|&g| (g + 1.0).abs() < 1e-9));
        for g in &hull.generators {
            assert!((g[1] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn clarke_warns_near_log_boundary() {
        let f = Expr::prim(Primitive::Log, vec![Expr::var(0)]).unwrap();
        let hull = clarke_generators_default(&f, &[1e-4], 7).unwrap();
        assert!(hull
            .warnings
            .iter()
            .any(|w| matches!(w, HullWarning::NonLipschitz { primitive: "log", .. })));
        // Far from the boundary: no warning.
        let hull = clarke_generators_default(&f, &[1.0], 7).unwrap();
        assert!(hull.warnings.is_empty());
    }

    #[test]
    fn min_norm_examples() {
        let h = SubgradientHull::from_generators(vec![0.0], vec![vec![-1.0], vec![1.0]]);
        let (v, d) = min_norm_element(&h).unwrap();
        assert!(v[0].abs() <= 1e-12 && d <= 1e-12);

        let h = SubgradientHull::from_generators(vec![0.0], vec![vec![0.5], vec![1.0]]);
        let (v, d) = min_norm_element(&h).unwrap();
        assert!((v[0] - 0.5).abs() <= 1e-10);
        assert!((d - 0.5).abs() <= 1e-10);

        let h = SubgradientHull::from_generators(vec![0.0; 2], vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let (v, d) = min_norm_element(&h).unwrap();
        assert!((v[0] - 0.5).abs() <= 1e-10 && (v[1] - 0.5).abs() <= 1e-10);
        assert!((d - 0.5_f64.sqrt()).abs() <= 1e-10);
    }

    #[test]
    fn min_norm_certificate_and_homogeneity() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let n = rng.gen_range(1..=4);
            let m = rng.gen_range(1..=8);
            let gens: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect();
            let (v, d) = min_norm_point(&gens).unwrap();
            // Variational inequality.
            assert!(certificate_violation(&gens, &v) <= 1e-9 * (1.0 + d * d));
            // Positive homogeneity.
            let c = rng.gen_range(0.1..5.0);
            let scaled: Vec<Vec<f64>> =
                gens.iter().map(|g| g.iter().map(|x| c * x).collect()).collect();
            let (vc, dc) = min_norm_point(&scaled).unwrap();
            assert!((dc - c * d).abs() <= 1e-8 * (1.0 + c * d));
            for (a, b) in vc.iter().zip(&v) {
                assert!((a - c * b).abs() <= 1e-7 * (1.0 + c * b.abs()));
            }
        }
    }

    /// d* = 0 iff 0 is in the hull, cross-checked against an independent
    /// geometric membership oracle in 1-D and 2-D.
    #[test]
    fn min_norm_zero_iff_origin_in_hull() {
        use rand::prelude::*;

        // 2-D membership test: 0 in conv(points) iff no strict separating
        // direction exists among the edge normals (brute force over pairs).
        fn origin_in_hull_2d(points: &[Vec<f64>]) -> bool {
            // Check whether some half-plane through the origin excludes all
            // points: scan directions from point pairs and coordinates.
            let mut dirs: Vec<[f64; 2]> = Vec::new();
            for p in points {
                dirs.push([p[0], p[1]]);
                dirs.push([-p[1], p[0]]);
            }
            for a in points {
                for b in points {
                    dirs.push([-(b[1] - a[1]), b[0] - a[0]]);
                }
            }
            // Origin is outside iff some direction has all points strictly
            // on the positive side.
            let strictly_separating = dirs.iter().any(|d| {
                let norm = (d[0] * d[0] + d[1] * d[1]).sqrt();
                norm > 1e-12
                    && points
                        .iter()
                        .all(|p| (p[0] * d[0] + p[1] * d[1]) / norm > 1e-9)
            });
            !strictly_separating
        }

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        for _ in 0..200 {
            let m = rng.gen_range(1..=6);
            let gens: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let (_, d) = min_norm_point(&gens).unwrap();
            let inside = origin_in_hull_2d(&gens);
            if inside {
                assert!(d <= 1e-4, "origin inside but d* = {d}");
            } else {
                assert!(d > 1e-9, "origin outside but d* = {d}");
            }
        }

        // 1-D: interval membership.
        for _ in 0..100 {
            let m = rng.gen_range(1..=5);
            let gens: Vec<Vec<f64>> = (0..m).map(|_| vec![rng.gen_range(-1.0..1.0)]).collect();
            let lo = gens.iter().map(|g| g[0]).fold(f64::INFINITY, f64::min);
            let hi = gens.iter().map(|g| g[0]).fold(f64::NEG_INFINITY, f64::max);
            let (_, d) = min_norm_point(&gens).unwrap();
            if lo <= 0.0 && hi >= 0.0 {
                assert!(d <= 1e-10);
            } else {
                assert!((d - lo.abs().min(hi.abs())).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn criticality_examples() {
        let abs = Expr::abs(Expr::var(0));
        assert!(is_clarke_critical(&abs, &[0.0], 1e-8, 7).unwrap());

        // -|x| at 0: a Clarke-critical local maximum.
        let neg_abs = Expr::scale(-1.0, Expr::abs(Expr::var(0)));
        assert!(is_clarke_critical(&neg_abs, &[0.0], 1e-8, 7).unwrap());

        let sq = Expr::square(Expr::var(0));
        assert!(!is_clarke_critical(&sq, &[1.0], 1e-8, 7).unwrap());
    }

    /// AD output lies in the exact one-sided hull at kinks (conservative
    /// containment), for univariate piecewise-polynomial expressions.
    #[test]
    fn ad_output_contained_in_exact_hull() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..80 {
            // Random piecewise-affine tower evaluated exactly at a kink.
            let mut e = Expr::relu(Expr::var(0));
            for _ in 0..rng.gen_range(0..4) {
                e = match rng.gen_range(0..4) {
                    0 => Expr::relu(Expr::affine(vec![rng.gen_range(-2.0..2.0)], 0.0, vec![e]).unwrap()),
                    1 => Expr::abs(e),
                    2 => Expr::sum(vec![e, Expr::scale(rng.gen_range(-1.0..1.0), Expr::var(0))]),
                    _ => Expr::max2(e, Expr::scale(rng.gen_range(-1.0..1.0), Expr::var(0))),
                };
            }
            let hull = clarke_generators_default(&e, &[0.0], 7).unwrap();
            assert!(hull.exact);
            let lo = hull.generators.iter().map(|g| g[0]).fold(f64::INFINITY, f64::min);
            let hi = hull
                .generators
                .iter()
                .map(|g| g[0])
                .fold(f64::NEG_INFINITY, f64::max);
            let ad = ad_derivative(&e, &[0.0], &KinkPolicy::default()).unwrap()[0];
            assert!(
                ad >= lo - 1e-6 && ad <= hi + 1e-6,
                "ad {ad} outside [{lo}, {hi}]"
            );
        }
    }

    #[test]
    fn chain_rule_residual_examples() {
        // Smooth: f = x^2 along x(t) = t at t0 = 1, v = 2.
        let f = Expr::square(Expr::var(0));
        let curve = Curve::new(vec![Expr::var(0)]).unwrap();
        let r = chain_rule_residual(&f, &curve, 1.0, &[2.0], 1e-4).unwrap();
        assert!(r <= 1e-7, "residual {r}");

        // f = |x| along x(t) = t + 1 at t0 = 0 stays in the stratum x > 0.
        let f = Expr::abs(Expr::var(0));
        let curve = Curve::new(vec![Expr::affine(vec![1.0], 1.0, vec![Expr::var(0)]).unwrap()]).unwrap();
        let r = chain_rule_residual(&f, &curve, 0.0, &[1.0], 1e-4).unwrap();
        assert!(r <= 1e-7, "residual {r}");

        // f = |x1| + x2 along x(t) = (0, t): any v = (v1, 1) with v1 in
        // [-1, 1] gives the same inner product.
        let f = Expr::sum(vec![Expr::abs(Expr::var(0)), Expr::var(1)]);
        let curve = Curve::new(vec![Expr::constant(0.0), Expr::var(0)]).unwrap();
        for v1 in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            let r = chain_rule_residual(&f, &curve, 0.0, &[v1, 1.0], 1e-4).unwrap();
            assert!(r <= 1e-7, "residual {r} for v1 = {v1}");
        }
    }

    /// Residual decays at the O(h^2) central-difference rate on smooth
    /// stratum-respecting instances.
    #[test]
    fn chain_rule_residual_rate() {
        let f = Expr::sum(vec![
            Expr::square(Expr::var(0)),
            Expr::prim(Primitive::Tanh, vec![Expr::var(0)]).unwrap(),
        ]);
        let curve = Curve::new(vec![Expr::polynomial(
            vec![
                tame_expr::PolyTerm { coef: 1.0, powers: vec![3] },
                tame_expr::PolyTerm { coef: 0.5, powers: vec![1] },
            ],
            vec![Expr::var(0)],
        )
        .unwrap()])
        .unwrap();
        let x0 = curve.at(0.7).unwrap();
        let g = ad_derivative(&f, &x0, &KinkPolicy::default()).unwrap();
        let mut prev = f64::INFINITY;
        for h in [1e-2, 1e-3, 1e-4] {
            let r = chain_rule_residual(&f, &curve, 0.7, &g, h).unwrap();
            // Each decade of h buys about two decades of residual.
            assert!(r <= prev.max(1e-12), "rate violated: {r} after {prev}");
            assert!(r <= 10.0 * h * h, "residual {r} too big for h = {h}");
            prev = r / 50.0;
        }
    }

    #[test]
    fn riemannian_grad_examples() {
        // A = I2, b = (0, 1), lambda = 0.5, point (0, 1).
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let b = vec![0.0, 1.0];
        let g = riemannian_grad_lasso(&a, &b, 0.5, &[0.0, 1.0]).unwrap();
        assert_eq!(g, vec![0.0, 0.5]);

        // Point with no zeros: equals the full smooth gradient.
        let p = [0.3, -0.8];
        let g = riemannian_grad_lasso(&a, &b, 0.5, &p).unwrap();
        let full = lasso_smooth_gradient(&a, &b, 0.5, &p).unwrap();
        assert_eq!(g, full);

        // Projector is idempotent and fixes points of the stratum.
        let s = StratumModel::of_point(&[0.0, 1.0]);
        let v = vec![3.0, -2.0];
        let pv = s.project_tangent(&v);
        assert_eq!(s.project_tangent(&pv), pv);
        assert_eq!(s.project_tangent(&[0.0, 1.0]), vec![0.0, 1.0]);
    }

    /// Corollary of the projection formula: when the Riemannian gradient is
    /// a hull element, its norm equals the min-norm distance of the hull.
    #[test]
    fn riemannian_grad_matches_min_norm_distance() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.3, 0.4]];
        let b = vec![0.1, 1.0, 0.5];
        let lambda = 0.5;
        // A point on the stratum x1 = 0 where the dual condition
        // |g_1| <= lambda holds, so grad lies in the subdifferential.
        let x = [0.0, 0.9];
        let rg = riemannian_grad_lasso(&a, &b, lambda, &x).unwrap();
        let rg_norm = rg.iter().map(|v| v * v).sum::<f64>().sqrt();

        // Exact hull from the separable structure.
        let hull = lasso_clarke_generators(&a, &b, lambda, &x).unwrap();
        let (_, d) = min_norm_element(&hull).unwrap();
        assert!(
            (rg_norm - d).abs() <= 1e-8 * (1.0 + d),
            "|grad| {rg_norm} vs min-norm distance {d}"
        );

        // The sampled oracle agrees up to its radius resolution (gradients
        // are evaluated on spheres of radius up to 1e-2).
        let f = lasso_expr(&a, &b, lambda);
        let sampled = clarke_generators_default(&f, &x, 17).unwrap();
        let (_, ds) = min_norm_element(&sampled).unwrap();
        assert!(
            (rg_norm - ds).abs() <= 5e-2 * (1.0 + ds),
            "|grad| {rg_norm} vs sampled min-norm distance {ds}"
        );
    }

    /// ||Ax-b||^2 + lambda*||x||_1 as an expression.
    fn lasso_expr(a: &[Vec<f64>], b: &[f64], lambda: f64) -> Expr {
        let n = a[0].len();
        let vars: Vec<Expr> = (0..n).map(Expr::var).collect();
        let mut terms: Vec<Expr> = a
            .iter()
            .zip(b)
            .map(|(row, bi)| {
                Expr::square(Expr::affine(row.clone(), -bi, vars.clone()).unwrap())
            })
            .collect();
        for v in vars {
            terms.push(Expr::scale(lambda, Expr::abs(v)));
        }
        Expr::sum(terms)
    }

    #[test]
    fn hull_record_round_trip() {
        let f = Expr::sum(vec![Expr::abs(Expr::var(0)), Expr::var(1)]);
        let hull = clarke_generators_default(&f, &[0.0, 0.0], 99).unwrap();
        let rec = hull.to_record();
        let back = SubgradientHull::from_record(&rec).unwrap();
        assert_eq!(back.point, hull.point);
        assert_eq!(back.generators, hull.generators);
        assert_eq!(back.seed, hull.seed);
        assert_eq!(back.exact, hull.exact);
        assert_eq!(back.radii, hull.radii);
    }

    #[test]
    fn sampling_is_reproducible_from_seed() {
        let f = Expr::sum(vec![Expr::abs(Expr::var(0)), Expr::square(Expr::var(1))]);
        let h1 = clarke_generators_default(&f, &[0.0, 0.3], 41).unwrap();
        let h2 = clarke_generators_default(&f, &[0.0, 0.3], 41).unwrap();
        assert_eq!(h1.generators, h2.generators);
        let h3 = clarke_generators_default(&f, &[0.0, 0.3], 42).unwrap();
        assert!(h1.generators != h3.generators);
    }

    #[test]
    fn parse_and_differentiate() {
        let e = parse_expr("(sum (relu (var 0)) (scale -0.5 (relu (scale -1 (var 0)))))").unwrap();
        let d = ad_derivative(&e, &[0.0], &KinkPolicy::default()).unwrap();
        assert_eq!(d, vec![0.0]);
    }
}
