//! Sign-pattern strata of LASSO-type objectives and their Riemannian
//! gradients.
//!
//! For `F(x) = ||Ax - b||^2 + lambda ||x||_1` the active manifold through a
//! point is the sign-pattern set `M_s = { x : sign(x_i) = s_i }`. On `M_s`
//! the objective restricts to a smooth function, and its Riemannian gradient
//! is the tangent projection of the smooth representative's gradient.

use crate::clarke::SubgradientHull;
use crate::error::SubdiffError;

/// Sign pattern `s in {-1, 0, +1}^n` and the associated tangent projector
/// (zero out the coordinates pinned to zero).
#[derive(Debug, Clone, PartialEq)]
pub struct StratumModel {
    pub signs: Vec<i8>,
}

impl StratumModel {
    /// Stratum containing `point`, by exact zero test.
    pub fn of_point(point: &[f64]) -> StratumModel {
        StratumModel {
            signs: point
                .iter()
                .map(|&x| {
                    if x == 0.0 {
                        0
                    } else if x > 0.0 {
                        1
                    } else {
                        -1
                    }
                })
                .collect(),
        }
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.signs.len()
            && point.iter().zip(&self.signs).all(|(&x, &s)| match s {
                0 => x == 0.0,
                1 => x > 0.0,
                _ => x < 0.0,
            })
    }

    /// Orthogonal projection onto the tangent space of `M_s`.
    pub fn project_tangent(&self, v: &[f64]) -> Vec<f64> {
        v.iter()
            .zip(&self.signs)
            .map(|(&vi, &s)| if s == 0 { 0.0 } else { vi })
            .collect()
    }
}

/// Residual `Ax - b` for a row-major `A`.
fn residual(a: &[Vec<f64>], b: &[f64], x: &[f64]) -> Result<Vec<f64>, SubdiffError> {
    if a.len() != b.len() {
        return Err(SubdiffError::Dimension {
            context: "lasso rows vs b",
            expected: a.len(),
            found: b.len(),
        });
    }
    a.iter()
        .zip(b)
        .map(|(row, bi)| {
            if row.len() != x.len() {
                return Err(SubdiffError::Dimension {
                    context: "lasso columns vs x",
                    expected: x.len(),
                    found: row.len(),
                });
            }
            Ok(row.iter().zip(x).map(|(aij, xj)| aij * xj).sum::<f64>() - bi)
        })
        .collect()
}

/// Full Euclidean gradient of the smooth representative `||Ax-b||^2 +
/// lambda * s.x` on the stratum of `point` (only meaningful on the active
/// coordinates).
pub fn lasso_smooth_gradient(
    a: &[Vec<f64>],
    b: &[f64],
    lambda: f64,
    point: &[f64],
) -> Result<Vec<f64>, SubdiffError> {
    let r = residual(a, b, point)?;
    let n = point.len();
    let mut g = vec![0.0; n];
    for (row, ri) in a.iter().zip(&r) {
        for (j, aij) in row.iter().enumerate() {
            g[j] += 2.0 * aij * ri;
        }
    }
    for (gj, &xj) in g.iter_mut().zip(point) {
        if xj != 0.0 {
            *gj += lambda * xj.signum();
        }
    }
    Ok(g)
}

/// Riemannian gradient of `F|_{M_s}` at `point`, the tangent projection of
/// `2 A^T (Ax - b) + lambda s` (zeroed coordinates projected out).
pub fn riemannian_grad_lasso(
    a: &[Vec<f64>],
    b: &[f64],
    lambda: f64,
    point: &[f64],
) -> Result<Vec<f64>, SubdiffError> {
    let stratum = StratumModel::of_point(point);
    let g = lasso_smooth_gradient(a, b, lambda, point)?;
    Ok(stratum.project_tangent(&g))
}

/// Exact Clarke subdifferential of the LASSO objective at `point`.
///
/// The l1 term is separable, so the subdifferential is the smooth gradient
/// plus `lambda` times the product of `{sign(x_i)}` on active coordinates and
/// `[-1, 1]` on zero coordinates; the generators are its `2^z` vertices
/// (`z` = number of exact zeros, capped to keep the hull finite-sized).
pub fn lasso_clarke_generators(
    a: &[Vec<f64>],
    b: &[f64],
    lambda: f64,
    point: &[f64],
) -> Result<SubgradientHull, SubdiffError> {
    let smooth = {
        let r = residual(a, b, point)?;
        let mut g = vec![0.0; point.len()];
        for (row, ri) in a.iter().zip(&r) {
            for (j, aij) in row.iter().enumerate() {
                g[j] += 2.0 * aij * ri;
            }
        }
        g
    };
    let zeros: Vec<usize> = (0..point.len()).filter(|&i| point[i] == 0.0).collect();
    if zeros.len() > 20 {
        return Err(SubdiffError::Dimension {
            context: "lasso exact hull zero coordinates",
            expected: 20,
            found: zeros.len(),
        });
    }
    let mut generators = Vec::with_capacity(1 << zeros.len());
    for mask in 0..(1u32 << zeros.len()) {
        let mut g = smooth.clone();
        for (j, gj) in g.iter_mut().enumerate() {
            if point[j] != 0.0 {
                *gj += lambda * point[j].signum();
            }
        }
        for (k, &j) in zeros.iter().enumerate() {
            let s = if mask & (1 << k) != 0 { 1.0 } else { -1.0 };
            g[j] += lambda * s;
        }
        generators.push(g);
    }
    Ok(SubgradientHull::from_generators(point.to_vec(), generators))
}
