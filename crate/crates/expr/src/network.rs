//! Feedforward network and empirical-risk builders.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::ExprError;
use crate::expr::Expr;
use crate::primitive::Primitive;

/// Which activation a layer applies coordinate-wise.
///
/// Serialized by name; `swish`/`huber` carry their parameter inline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Softsign,
    Logistic,
    Tanh,
    Softplus,
    Swish { beta: f64 },
    Mish,
    Elu,
    Gelu,
    Arctan,
    Identity,
}

impl Activation {
    pub fn primitive(&self) -> Option<Primitive> {
        Some(match self {
            Activation::Relu => Primitive::Relu,
            Activation::Softsign => Primitive::Softsign,
            Activation::Logistic => Primitive::Logistic,
            Activation::Tanh => Primitive::Tanh,
            Activation::Softplus => Primitive::Softplus,
            Activation::Swish { beta } => Primitive::Swish(*beta),
            Activation::Mish => Primitive::Mish,
            Activation::Elu => Primitive::Elu,
            Activation::Gelu => Primitive::Gelu,
            Activation::Arctan => Primitive::Arctan,
            Activation::Identity => return None,
        })
    }

    pub fn apply(&self, t: f64) -> Result<f64, ExprError> {
        match self.primitive() {
            Some(p) => p.eval(&[t]),
            None => Ok(t),
        }
    }
}

/// One linear layer: `rows x cols` weight matrix plus activation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Layer {
    /// Row-major weights; `weights[j]` feeds output coordinate `j`.
    pub weights: Vec<Vec<f64>>,
    pub activation: Activation,
}

/// A depth-`L` feedforward network `a_0 = x`, `a_i = rho_i(V_i a_{i-1})`.
///
/// Depth 0 (no layers) is the identity map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub input_dim: usize,
    pub layers: Vec<Layer>,
}

impl NetworkSpec {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(self.input_dim, |l| l.weights.len())
    }

    /// Check that matrix shapes chain: `cols(V_i) = width_{i-1}`.
    pub fn validate(&self) -> Result<(), ExprError> {
        let mut prev = self.input_dim;
        for layer in &self.layers {
            if layer.weights.is_empty() {
                return Err(ExprError::Dimension {
                    context: "network layer width",
                    expected: 1,
                    found: 0,
                });
            }
            for row in &layer.weights {
                if row.len() != prev {
                    return Err(ExprError::Dimension {
                        context: "network layer shape",
                        expected: prev,
                        found: row.len(),
                    });
                }
            }
            prev = layer.weights.len();
        }
        Ok(())
    }

    /// Forward pass; the reference loop `a_i = rho_i(V_i a_{i-1})`.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, ExprError> {
        self.validate()?;
        if x.len() != self.input_dim {
            return Err(ExprError::Dimension {
                context: "network input dimension",
                expected: self.input_dim,
                found: x.len(),
            });
        }
        let mut a = x.to_vec();
        for layer in &self.layers {
            let mut next = Vec::with_capacity(layer.weights.len());
            for row in &layer.weights {
                let z: f64 = row.iter().zip(&a).map(|(w, v)| w * v).sum();
                next.push(layer.activation.apply(z)?);
            }
            a = next;
        }
        Ok(a)
    }

    pub fn load_json(text: &str) -> Result<NetworkSpec, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Supervised dataset of `(x_i, y_i)` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset {
    pub xs: Vec<Vec<f64>>,
    pub ys: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(xs: Vec<Vec<f64>>, ys: Vec<Vec<f64>>) -> Result<Dataset, ExprError> {
        let d = Dataset { xs, ys };
        d.validate()?;
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.xs.first().map_or(0, Vec::len)
    }

    pub fn output_dim(&self) -> usize {
        self.ys.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<(), ExprError> {
        if self.xs.is_empty() || self.xs.len() != self.ys.len() {
            return Err(ExprError::Dimension {
                context: "dataset size",
                expected: self.xs.len().max(1),
                found: self.ys.len(),
            });
        }
        let p = self.xs[0].len();
        let q = self.ys[0].len();
        for x in &self.xs {
            if x.len() != p {
                return Err(ExprError::Dimension {
                    context: "dataset x dimension",
                    expected: p,
                    found: x.len(),
                });
            }
        }
        for y in &self.ys {
            if y.len() != q {
                return Err(ExprError::Dimension {
                    context: "dataset y dimension",
                    expected: q,
                    found: y.len(),
                });
            }
        }
        Ok(())
    }

    pub fn load_json(text: &str) -> Result<Dataset, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Build the expressions computing `f_theta(x) = a_L`, one per output
/// coordinate, with the concrete weights of `spec` baked in. Shared layers
/// appear once in the DAG.
pub fn build_mlp(spec: &NetworkSpec) -> Result<Vec<Expr>, ExprError> {
    spec.validate()?;
    let mut a: Vec<Expr> = (0..spec.input_dim).map(Expr::var).collect();
    for layer in &spec.layers {
        let mut next = Vec::with_capacity(layer.weights.len());
        for row in &layer.weights {
            let pre = Expr::affine(row.clone(), 0.0, a.clone())?;
            next.push(match layer.activation.primitive() {
                Some(p) => Expr::prim(p, vec![pre])?,
                None => pre,
            });
        }
        a = next;
    }
    // Every output lives on the full input space even if it ignores some
    // coordinates (depth 0, or zero-width pathways).
    a.iter().map(|e| e.with_arity(spec.input_dim)).collect()
}

/// Build the empirical risk `(1/N) sum_i loss(f_theta(x_i), y_i)` as an
/// expression in `theta` alone.
///
/// `net` maps `(theta, x)` to `R^q`: its variables `0..theta_dim` are the
/// parameters, `theta_dim..theta_dim+p` the data point. `loss` takes `2q`
/// variables, prediction coordinates first, then target coordinates.
pub fn build_empirical_risk(
    net: &[Expr],
    theta_dim: usize,
    data: &Dataset,
    loss: &Expr,
) -> Result<Expr, ExprError> {
    data.validate()?;
    let q = net.len();
    if data.output_dim() != q {
        return Err(ExprError::Dimension {
            context: "network output vs dataset y dimension",
            expected: q,
            found: data.output_dim(),
        });
    }
    if loss.arity() > 2 * q {
        return Err(ExprError::Dimension {
            context: "loss arity",
            expected: 2 * q,
            found: loss.arity(),
        });
    }
    let loss = loss.with_arity(2 * q)?;
    let p = data.input_dim();
    let terms = risk_terms(net, theta_dim, p, data, &loss)?;
    // The risk is a function of theta alone, whether or not every parameter
    // survives into the bound terms.
    Expr::scale(1.0 / data.len() as f64, Expr::sum(terms)).with_arity(theta_dim)
}

/// The individual summands `loss(f_theta(x_i), y_i)`, used by minibatch noise.
pub fn risk_terms(
    net: &[Expr],
    theta_dim: usize,
    input_dim: usize,
    data: &Dataset,
    loss: &Expr,
) -> Result<Vec<Expr>, ExprError> {
    let mut terms = Vec::with_capacity(data.len());
    for (x, y) in data.xs.iter().zip(&data.ys) {
        if x.len() != input_dim {
            return Err(ExprError::Dimension {
                context: "risk term x dimension",
                expected: input_dim,
                found: x.len(),
            });
        }
        let bindings: HashMap<usize, f64> =
            x.iter().enumerate().map(|(j, v)| (theta_dim + j, *v)).collect();
        let mut args: Vec<Expr> = net.iter().map(|e| e.substitute(&bindings)).collect();
        for v in y {
            args.push(Expr::constant(*v));
        }
        terms.push(Expr::compose(loss.clone(), args)?);
    }
    Ok(terms)
}

/// Table-style loss builders over `2q` variables (prediction first, target
/// second). For `q = 1` the prediction is `var 0` and the target `var 1`.
pub mod losses {
    use super::*;

    /// `(y - z)^2`
    pub fn squared_error() -> Expr {
        Expr::square(Expr::affine(vec![-1.0, 1.0], 0.0, vec![Expr::var(0), Expr::var(1)]).unwrap())
    }

    /// `|y - z|`
    pub fn absolute_deviation() -> Expr {
        Expr::abs(Expr::affine(vec![-1.0, 1.0], 0.0, vec![Expr::var(0), Expr::var(1)]).unwrap())
    }

    /// `max(0, 1 - y*z)`
    pub fn hinge() -> Expr {
        Expr::prim(Primitive::Hinge, vec![Expr::var(0), Expr::var(1)]).unwrap()
    }

    /// Huber loss of the residual `y - z`.
    pub fn huber(beta: f64) -> Expr {
        Expr::prim(
            Primitive::Huber(beta),
            vec![Expr::affine(vec![-1.0, 1.0], 0.0, vec![Expr::var(0), Expr::var(1)]).unwrap()],
        )
        .unwrap()
    }

    /// `log(1 + e^{-y*z})`, written as softplus of the negated margin.
    pub fn logistic() -> Expr {
        Expr::prim(
            Primitive::Softplus,
            vec![Expr::scale(-1.0, Expr::prod(Expr::var(0), Expr::var(1)))],
        )
        .unwrap()
    }

    /// Binary cross entropy `-(y log z + (1-y) log(1-z))` with prediction
    /// `z = var 0` in `(0,1)` and label `y = var 1`.
    pub fn binary_cross_entropy() -> Expr {
        let z = Expr::var(0);
        let y = Expr::var(1);
        let log_z = Expr::prim(Primitive::Log, vec![z.clone()]).unwrap();
        let one_minus_z = Expr::affine(vec![-1.0], 1.0, vec![z]).unwrap();
        let log_1mz = Expr::prim(Primitive::Log, vec![one_minus_z]).unwrap();
        let one_minus_y = Expr::affine(vec![-1.0], 1.0, vec![y.clone()]).unwrap();
        Expr::scale(
            -1.0,
            Expr::sum(vec![
                Expr::prod(y, log_z),
                Expr::prod(one_minus_y, log_1mz),
            ]),
        )
    }
}
