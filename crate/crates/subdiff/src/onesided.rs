//! One-sided directional derivatives by a forward dual sweep.
//!
//! At a kink the sweep takes the branch selected by the sign of the incoming
//! perturbation (the directional derivative of the primitive), so the result
//! is the exact limit of difference quotients from that side. Over univariate
//! piecewise-polynomial compositions these limits coincide with the one-sided
//! gradient limits that generate the Clarke subdifferential.

use std::collections::HashMap;

use tame_expr::{Expr, ExprKind};

use crate::error::SubdiffError;

/// `(f(x), lim_{s->0+} (f(x + s*dir) - f(x)) / s)`.
pub fn value_and_directional(
    expr: &Expr,
    point: &[f64],
    dir: &[f64],
) -> Result<(f64, f64), SubdiffError> {
    if point.len() != expr.arity() || dir.len() != expr.arity() {
        return Err(SubdiffError::Dimension {
            context: "directional derivative point",
            expected: expr.arity(),
            found: point.len().min(dir.len()),
        });
    }
    let mut memo = HashMap::new();
    dual_eval(expr, point, dir, &mut memo)
}

/// Right derivative limit of a univariate expression at `t`.
pub fn right_derivative(expr: &Expr, t: f64) -> Result<f64, SubdiffError> {
    Ok(value_and_directional(expr, &[t], &[1.0])?.1)
}

/// Left derivative limit of a univariate expression at `t`.
pub fn left_derivative(expr: &Expr, t: f64) -> Result<f64, SubdiffError> {
    Ok(-value_and_directional(expr, &[t], &[-1.0])?.1)
}

fn dual_eval(
    expr: &Expr,
    point: &[f64],
    dir: &[f64],
    memo: &mut HashMap<usize, (f64, f64)>,
) -> Result<(f64, f64), SubdiffError> {
    if let Some(v) = memo.get(&expr.node_id()) {
        return Ok(*v);
    }
    let out = match expr.kind() {
        ExprKind::Const(c) => (*c, 0.0),
        ExprKind::Var(i) => (point[*i], dir[*i]),
        ExprKind::Affine { weights, bias, args } => {
            let mut v = *bias;
            let mut d = 0.0;
            for (w, c) in weights.iter().zip(args) {
                let (cv, cd) = dual_eval(c, point, dir, memo)?;
                v += w * cv;
                d += w * cd;
            }
            (v, d)
        }
        ExprKind::Poly { terms, args } => {
            let duals = args
                .iter()
                .map(|c| dual_eval(c, point, dir, memo))
                .collect::<Result<Vec<_>, _>>()?;
            let mut v = 0.0;
            let mut d = 0.0;
            for t in terms {
                let mut tv = t.coef;
                for ((x, _), p) in duals.iter().zip(&t.powers) {
                    tv *= x.powi(*p as i32);
                }
                v += tv;
                for (j, ((_, dj), pj)) in duals.iter().zip(&t.powers).enumerate() {
                    if *pj == 0 || *dj == 0.0 {
                        continue;
                    }
                    let mut m = t.coef * *pj as f64 * dj;
                    for (k, ((xk, _), pk)) in duals.iter().zip(&t.powers).enumerate() {
                        let e = if k == j { *pk as i32 - 1 } else { *pk as i32 };
                        m *= xk.powi(e);
                    }
                    d += m;
                }
            }
            (v, d)
        }
        ExprKind::Prim { prim, args } => {
            let duals = args
                .iter()
                .map(|c| dual_eval(c, point, dir, memo))
                .collect::<Result<Vec<_>, _>>()?;
            let xs: Vec<f64> = duals.iter().map(|(v, _)| *v).collect();
            let ds: Vec<f64> = duals.iter().map(|(_, d)| *d).collect();
            (prim.eval(&xs)?, prim.directional(&xs, &ds)?)
        }
        ExprKind::Sum(args) => {
            let mut v = 0.0;
            let mut d = 0.0;
            for c in args {
                let (cv, cd) = dual_eval(c, point, dir, memo)?;
                v += cv;
                d += cd;
            }
            (v, d)
        }
        ExprKind::Prod(a, b) => {
            let (av, ad) = dual_eval(a, point, dir, memo)?;
            let (bv, bd) = dual_eval(b, point, dir, memo)?;
            (av * bv, av * bd + bv * ad)
        }
        ExprKind::Scale(c, e) => {
            let (v, d) = dual_eval(e, point, dir, memo)?;
            (c * v, c * d)
        }
        ExprKind::Compose { f, args } => {
            let duals = args
                .iter()
                .map(|c| dual_eval(c, point, dir, memo))
                .collect::<Result<Vec<_>, _>>()?;
            let xs: Vec<f64> = duals.iter().map(|(v, _)| *v).collect();
            let ds: Vec<f64> = duals.iter().map(|(_, d)| *d).collect();
            let mut inner = HashMap::new();
            dual_eval(f, &xs[..f.arity()], &ds[..f.arity()], &mut inner)?
        }
    };
    memo.insert(expr.node_id(), out);
    Ok(out)
}
