//! Reverse-mode selection derivative over the expression DAG.

use std::collections::HashMap;

use tame_expr::{Expr, ExprKind, PrimDeriv};

use crate::error::SubdiffError;
use crate::policy::KinkPolicy;

/// Reverse-sweep chain-rule product. Each primitive contributes its true
/// derivative where differentiable at its local input, and the policy value
/// when sitting exactly on a kink. Deterministic given the policy; equal to
/// the gradient whenever no kink is hit on the evaluation path.
pub fn ad_derivative(
    expr: &Expr,
    point: &[f64],
    policy: &KinkPolicy,
) -> Result<Vec<f64>, SubdiffError> {
    if point.len() != expr.arity() {
        return Err(SubdiffError::Dimension {
            context: "ad_derivative point",
            expected: expr.arity(),
            found: point.len(),
        });
    }
    policy.validate()?;
    let mut grad = vec![0.0; expr.arity()];
    grad_into(expr, point, policy, 1.0, &mut grad)?;
    Ok(grad)
}

/// Accumulate `seed * d(expr)/d(point)` into `grad`.
fn grad_into(
    expr: &Expr,
    point: &[f64],
    policy: &KinkPolicy,
    seed: f64,
    grad: &mut [f64],
) -> Result<(), SubdiffError> {
    let order = expr.topo_order();
    // Forward values.
    let mut vals: HashMap<usize, f64> = HashMap::with_capacity(order.len());
    for node in &order {
        let v = match node.kind() {
            ExprKind::Const(c) => *c,
            ExprKind::Var(i) => point[*i],
            ExprKind::Affine { weights, bias, args } => {
                let mut acc = *bias;
                for (w, a) in weights.iter().zip(args) {
                    acc += w * vals[&a.node_id()];
                }
                acc
            }
            ExprKind::Poly { terms, args } => {
                let xs: Vec<f64> = args.iter().map(|a| vals[&a.node_id()]).collect();
                terms
                    .iter()
                    .map(|t| {
                        t.coef
                            * t.powers
                                .iter()
                                .zip(&xs)
                                .map(|(p, x)| x.powi(*p as i32))
                                .product::<f64>()
                    })
                    .sum()
            }
            ExprKind::Prim { prim, args } => {
                let xs: Vec<f64> = args.iter().map(|a| vals[&a.node_id()]).collect();
                prim.eval(&xs)?
            }
            ExprKind::Sum(args) => args.iter().map(|a| vals[&a.node_id()]).sum(),
            ExprKind::Prod(a, b) => vals[&a.node_id()] * vals[&b.node_id()],
            ExprKind::Scale(c, e) => c * vals[&e.node_id()],
            ExprKind::Compose { f, args } => {
                let xs: Vec<f64> = args.iter().map(|a| vals[&a.node_id()]).collect();
                f.eval(&xs[..f.arity()])?
            }
        };
        vals.insert(node.node_id(), v);
    }

    // Backward adjoints, parents before children.
    let mut adj: HashMap<usize, f64> = HashMap::with_capacity(order.len());
    adj.insert(expr.node_id(), seed);
    for node in order.iter().rev() {
        let a = match adj.get(&node.node_id()) {
            Some(a) => *a,
            None => continue,
        };
        match node.kind() {
            ExprKind::Const(_) => {}
            ExprKind::Var(i) => grad[*i] += a,
            ExprKind::Affine { weights, args, .. } => {
                for (w, c) in weights.iter().zip(args) {
                    *adj.entry(c.node_id()).or_insert(0.0) += a * w;
                }
            }
            ExprKind::Poly { terms, args } => {
                let xs: Vec<f64> = args.iter().map(|c| vals[&c.node_id()]).collect();
                for (j, c) in args.iter().enumerate() {
                    let mut dj = 0.0;
                    for t in terms {
                        let pj = t.powers[j];
                        if pj == 0 {
                            continue;
                        }
                        let mut m = t.coef * pj as f64;
                        for (k, (p, x)) in t.powers.iter().zip(&xs).enumerate() {
                            let e = if k == j { *p as i32 - 1 } else { *p as i32 };
                            m *= x.powi(e);
                        }
                        dj += m;
                    }
                    *adj.entry(c.node_id()).or_insert(0.0) += a * dj;
                }
            }
            ExprKind::Prim { prim, args } => {
                let xs: Vec<f64> = args.iter().map(|c| vals[&c.node_id()]).collect();
                let d = match prim.derivatives(&xs)? {
                    PrimDeriv::Smooth(d) => d,
                    PrimDeriv::Kink => policy
                        .value_for(prim, &xs)
                        .expect("kink reported for primitive without branch data"),
                };
                for (dk, c) in d.iter().zip(args) {
                    *adj.entry(c.node_id()).or_insert(0.0) += a * dk;
                }
            }
            ExprKind::Sum(args) => {
                for c in args {
                    *adj.entry(c.node_id()).or_insert(0.0) += a;
                }
            }
            ExprKind::Prod(x, y) => {
                *adj.entry(x.node_id()).or_insert(0.0) += a * vals[&y.node_id()];
                *adj.entry(y.node_id()).or_insert(0.0) += a * vals[&x.node_id()];
            }
            ExprKind::Scale(c, e) => {
                *adj.entry(e.node_id()).or_insert(0.0) += a * c;
            }
            ExprKind::Compose { f, args } => {
                let xs: Vec<f64> = args.iter().map(|c| vals[&c.node_id()]).collect();
                let inner = ad_derivative(f, &xs[..f.arity()], policy)?;
                for (dk, c) in inner.iter().zip(args) {
                    *adj.entry(c.node_id()).or_insert(0.0) += a * dk;
                }
            }
        }
    }
    Ok(())
}
