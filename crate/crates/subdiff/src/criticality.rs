//! Criticality tests and the chain-rule residual diagnostic.

use tame_expr::Expr;

use crate::ad::ad_derivative;
use crate::clarke::clarke_generators_default;
use crate::error::SubdiffError;
use crate::minnorm::min_norm_element;
use crate::policy::KinkPolicy;

/// Fermat test: `0 in conv(clarke_generators(expr, point))` up to `tol`.
pub fn is_clarke_critical(
    expr: &Expr,
    point: &[f64],
    tol: f64,
    seed: u64,
) -> Result<bool, SubdiffError> {
    let hull = clarke_generators_default(expr, point, seed)?;
    let (_, dist) = min_norm_element(&hull)?;
    Ok(dist <= tol)
}

/// A parametrized curve `t -> x(t)` with components given as univariate
/// expressions.
#[derive(Debug, Clone)]
pub struct Curve {
    pub components: Vec<Expr>,
}

impl Curve {
    pub fn new(components: Vec<Expr>) -> Result<Curve, SubdiffError> {
        for c in &components {
            if c.arity() > 1 {
                return Err(SubdiffError::Dimension {
                    context: "curve component arity",
                    expected: 1,
                    found: c.arity(),
                });
            }
        }
        Ok(Curve {
            components: components
                .into_iter()
                .map(|c| c.with_arity(1).expect("arity <= 1 checked"))
                .collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn at(&self, t: f64) -> Result<Vec<f64>, SubdiffError> {
        self.components
            .iter()
            .map(|c| c.eval(&[t]).map_err(SubdiffError::from))
            .collect()
    }

    /// Velocity by the default selection derivative (curves are smooth at
    /// the probe times in every use here).
    pub fn velocity(&self, t: f64) -> Result<Vec<f64>, SubdiffError> {
        let policy = KinkPolicy::default();
        self.components
            .iter()
            .map(|c| ad_derivative(c, &[t], &policy).map(|g| g[0]))
            .collect()
    }

    /// Does any component sit exactly on a kink at time `t`?
    fn kink_at(&self, t: f64) -> Result<bool, SubdiffError> {
        for c in &self.components {
            if c.eval_tracking_kinks(&[t])?.1 {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// `|FD_h(f . x)(t0) - <v, x'(t0)>|`: the finite-difference residual of the
/// chain rule along the curve, for a hull element `v`.
///
/// Central differences by default; one-sided (forward) differences when a
/// curve component sits exactly on a kink at `t0` or either probe time.
pub fn chain_rule_residual(
    expr: &Expr,
    curve: &Curve,
    t0: f64,
    v: &[f64],
    h: f64,
) -> Result<f64, SubdiffError> {
    if curve.dim() != expr.arity() {
        return Err(SubdiffError::Dimension {
            context: "chain_rule_residual curve dimension",
            expected: expr.arity(),
            found: curve.dim(),
        });
    }
    if v.len() != expr.arity() {
        return Err(SubdiffError::Dimension {
            context: "chain_rule_residual hull element",
            expected: expr.arity(),
            found: v.len(),
        });
    }
    let one_sided = curve.kink_at(t0)? || curve.kink_at(t0 - h)? || curve.kink_at(t0 + h)?;
    let fd = if one_sided {
        let f0 = expr.eval(&curve.at(t0)?)?;
        let fp = expr.eval(&curve.at(t0 + h)?)?;
        (fp - f0) / h
    } else {
        let fm = expr.eval(&curve.at(t0 - h)?)?;
        let fp = expr.eval(&curve.at(t0 + h)?)?;
        (fp - fm) / (2.0 * h)
    };
    let xdot = curve.velocity(t0)?;
    let inner: f64 = v.iter().zip(&xdot).map(|(a, b)| a * b).sum();
    Ok((fd - inner).abs())
}
