//! Minimum-norm point of a finite convex hull.
//!
//! Away-step Frank-Wolfe with exact line search on `min ||x||^2` over the
//! generator polytope. The Frank-Wolfe gap is exactly the violation of the
//! optimality certificate `<v, g - v> >= 0 for all generators g`, so the
//! stopping test doubles as the certificate.

use crate::clarke::SubgradientHull;
use crate::error::SubdiffError;

pub const MIN_NORM_TOL: f64 = 1e-10;
pub const MIN_NORM_CAP: usize = 10_000;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `argmin { ||v|| : v in conv(generators) }` and its norm.
///
/// The certificate `<v, g - v> >= -tol * scale` holds for every generator on
/// return; exceeding the iteration cap is an error.
pub fn min_norm_element(hull: &SubgradientHull) -> Result<(Vec<f64>, f64), SubdiffError> {
    min_norm_point(&hull.generators)
}

/// Min-norm point over an explicit generator list.
pub fn min_norm_point(generators: &[Vec<f64>]) -> Result<(Vec<f64>, f64), SubdiffError> {
    let m = generators.len();
    if m == 0 {
        return Err(SubdiffError::EmptyHull);
    }
    let n = generators[0].len();
    for g in generators {
        if g.len() != n {
            return Err(SubdiffError::Dimension {
                context: "min_norm_point generators",
                expected: n,
                found: g.len(),
            });
        }
    }

    // Scale-invariant tolerance.
    let scale = generators
        .iter()
        .map(|g| dot(g, g))
        .fold(0.0_f64, f64::max)
        .max(1e-300);

    // Start from the generator of smallest norm.
    let start = (0..m)
        .min_by(|&i, &j| {
            dot(&generators[i], &generators[i])
                .total_cmp(&dot(&generators[j], &generators[j]))
        })
        .unwrap();
    let mut weights = vec![0.0; m];
    weights[start] = 1.0;
    let mut x = generators[start].clone();

    for _ in 0..MIN_NORM_CAP {
        let xx = dot(&x, &x);
        // Frank-Wolfe vertex: most descent-aligned generator.
        let (mut fw, mut fw_val) = (0, f64::INFINITY);
        for (i, g) in generators.iter().enumerate() {
            let v = dot(&x, g);
            if v < fw_val {
                fw = i;
                fw_val = v;
            }
        }
        let fw_gap = xx - fw_val;
        if fw_gap <= MIN_NORM_TOL * scale {
            return Ok((x, xx.max(0.0).sqrt()));
        }
        // Away vertex: worst active generator.
        let (mut aw, mut aw_val) = (usize::MAX, f64::NEG_INFINITY);
        for (i, g) in generators.iter().enumerate() {
            if weights[i] > 0.0 {
                let v = dot(&x, g);
                if v > aw_val {
                    aw = i;
                    aw_val = v;
                }
            }
        }
        let aw_gap = aw_val - xx;

        if fw_gap >= aw_gap || aw == usize::MAX || weights[aw] >= 1.0 {
            // Frank-Wolfe step along g_fw - x.
            let d: Vec<f64> = generators[fw].iter().zip(&x).map(|(g, xi)| g - xi).collect();
            let dd = dot(&d, &d);
            if dd == 0.0 {
                return Ok((x, xx.max(0.0).sqrt()));
            }
            let gamma = (-dot(&x, &d) / dd).clamp(0.0, 1.0);
            for (xi, di) in x.iter_mut().zip(&d) {
                *xi += gamma * di;
            }
            for w in weights.iter_mut() {
                *w *= 1.0 - gamma;
            }
            weights[fw] += gamma;
        } else {
            // Away step along x - g_aw, capped by feasibility of the weights.
            let d: Vec<f64> = x.iter().zip(&generators[aw]).map(|(xi, g)| xi - g).collect();
            let dd = dot(&d, &d);
            if dd == 0.0 {
                return Ok((x, xx.max(0.0).sqrt()));
            }
            let gamma_max = weights[aw] / (1.0 - weights[aw]);
            let gamma = (-dot(&x, &d) / dd).clamp(0.0, gamma_max);
            for (xi, di) in x.iter_mut().zip(&d) {
                *xi += gamma * di;
            }
            for w in weights.iter_mut() {
                *w *= 1.0 + gamma;
            }
            weights[aw] -= gamma;
            if weights[aw] < 1e-15 {
                weights[aw] = 0.0;
            }
        }
    }

    let xx = dot(&x, &x);
    let fw_val = generators
        .iter()
        .map(|g| dot(&x, g))
        .fold(f64::INFINITY, f64::min);
    Err(SubdiffError::IterationCap {
        cap: MIN_NORM_CAP,
        tol: MIN_NORM_TOL,
        gap: xx - fw_val,
    })
}

/// Largest violation of the variational inequality `<v, g - v> >= 0`.
pub fn certificate_violation(generators: &[Vec<f64>], v: &[f64]) -> f64 {
    let vv = dot(v, v);
    generators
        .iter()
        .map(|g| vv - dot(v, g))
        .fold(0.0_f64, f64::max)
}
