//! Scalar primitives: the activation and loss building blocks, their exact
//! formulas, derivatives, kink data, and structure tags.

use crate::error::ExprError;
use crate::structure::StructureTag;

const FRAC_2_SQRT_PI: f64 = 1.128_379_167_095_512_6; // 2/sqrt(pi)
const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7; // 1/sqrt(2*pi)

/// A scalar primitive function of one or two arguments.
///
/// `Swish` and `Huber` carry their shape parameter, fixed at construction.
/// `Sin` is deliberately not definable in any o-minimal structure; it exists
/// so that `classify_structure` has something to report as untamed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    Relu,
    Abs,
    Max2,
    Min2,
    Softsign,
    Logistic,
    Tanh,
    Softplus,
    Swish(f64),
    Mish,
    Elu,
    Gelu,
    Arctan,
    Exp,
    Log,
    Erf,
    Sqrt,
    Huber(f64),
    Hinge,
    Square,
    Sin,
}

/// Result of differentiating a primitive at a concrete input.
pub enum PrimDeriv {
    /// Differentiable here; partial derivatives w.r.t. each argument.
    Smooth(Vec<f64>),
    /// The input sits exactly on a kink of the primitive.
    Kink,
}

fn logistic(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

fn softplus(t: f64) -> f64 {
    // log(1 + e^t), overflow-safe
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

impl Primitive {
    /// Number of scalar arguments.
    pub fn arg_count(&self) -> usize {
        match self {
            Primitive::Max2 | Primitive::Min2 | Primitive::Hinge => 2,
            _ => 1,
        }
    }

    /// Name used by the textual format.
    pub fn name(&self) -> &'static str {
        match self {
            Primitive::Relu => "relu",
            Primitive::Abs => "abs",
            Primitive::Max2 => "max2",
            Primitive::Min2 => "min2",
            Primitive::Softsign => "softsign",
            Primitive::Logistic => "logistic",
            Primitive::Tanh => "tanh",
            Primitive::Softplus => "softplus",
            Primitive::Swish(_) => "swish",
            Primitive::Mish => "mish",
            Primitive::Elu => "elu",
            Primitive::Gelu => "gelu",
            Primitive::Arctan => "arctan",
            Primitive::Exp => "exp",
            Primitive::Log => "log",
            Primitive::Erf => "erf",
            Primitive::Sqrt => "sqrt",
            Primitive::Huber(_) => "huber",
            Primitive::Hinge => "hinge",
            Primitive::Square => "square",
            Primitive::Sin => "sin",
        }
    }

    /// Smallest listed o-minimal structure containing the primitive.
    pub fn tag(&self) -> StructureTag {
        use Primitive::*;
        match self {
            Relu | Abs | Max2 | Min2 | Softsign | Square | Hinge | Huber(_) | Sqrt => {
                StructureTag::RAlg
            }
            Logistic | Tanh | Softplus | Swish(_) | Mish | Elu | Exp | Log => StructureTag::RExp,
            Gelu | Erf | Arctan => StructureTag::RPfaff,
            Sin => StructureTag::Untamed,
        }
    }

    /// True for primitives whose graph is piecewise polynomial; exact
    /// univariate kink analysis is only attempted over these.
    pub fn is_piecewise_polynomial(&self) -> bool {
        matches!(
            self,
            Primitive::Relu
                | Primitive::Abs
                | Primitive::Max2
                | Primitive::Min2
                | Primitive::Huber(_)
                | Primitive::Hinge
                | Primitive::Square
        )
    }

    /// Evaluate at `args` (length must equal `arg_count`).
    pub fn eval(&self, args: &[f64]) -> Result<f64, ExprError> {
        debug_assert_eq!(args.len(), self.arg_count());
        let t = args[0];
        Ok(match self {
            Primitive::Relu => t.max(0.0),
            Primitive::Abs => t.abs(),
            Primitive::Max2 => t.max(args[1]),
            Primitive::Min2 => t.min(args[1]),
            Primitive::Softsign => t / (t.abs() + 1.0),
            Primitive::Logistic => logistic(t),
            Primitive::Tanh => t.tanh(),
            Primitive::Softplus => softplus(t),
            Primitive::Swish(beta) => t / (1.0 + (-beta * t).exp()),
            Primitive::Mish => t * softplus(t).tanh(),
            Primitive::Elu => {
                if t <= 0.0 {
                    t.exp() - 1.0
                } else {
                    t
                }
            }
            Primitive::Gelu => 0.5 * t * (1.0 + libm::erf(t * FRAC_1_SQRT_2)),
            Primitive::Arctan => t.atan(),
            Primitive::Exp => t.exp(),
            Primitive::Log => {
                if t > 0.0 {
                    t.ln()
                } else {
                    return Err(ExprError::Domain {
                        primitive: "log",
                        input: t,
                    });
                }
            }
            Primitive::Erf => libm::erf(t),
            Primitive::Sqrt => {
                if t >= 0.0 {
                    t.sqrt()
                } else {
                    return Err(ExprError::Domain {
                        primitive: "sqrt",
                        input: t,
                    });
                }
            }
            Primitive::Huber(beta) => {
                if t.abs() <= *beta {
                    0.5 * t * t
                } else {
                    beta * (t.abs() - 0.5 * beta)
                }
            }
            Primitive::Hinge => (1.0 - t * args[1]).max(0.0),
            Primitive::Square => t * t,
            Primitive::Sin => t.sin(),
        })
    }

    /// True when `args` lie exactly on a nondifferentiability point.
    ///
    /// Detection is by exact floating equality with the breakpoint (relu
    /// input == 0.0, max/min tie, hinge margin == 0.0), matching the kink
    /// semantics of the relu-activity experiment. Signed zero counts.
    pub fn at_kink(&self, args: &[f64]) -> bool {
        match self {
            Primitive::Relu | Primitive::Abs => args[0] == 0.0,
            Primitive::Max2 | Primitive::Min2 => args[0] == args[1],
            Primitive::Hinge => 1.0 - args[0] * args[1] == 0.0,
            _ => false,
        }
    }

    /// Partial derivatives at `args`, or `Kink` when sitting on one.
    ///
    /// `elu` and `huber` are C1 at their breakpoints and report the shared
    /// one-sided value. `sqrt` at 0 and `log` at the boundary have unbounded
    /// slope and are domain errors for differentiation.
    pub fn derivatives(&self, args: &[f64]) -> Result<PrimDeriv, ExprError> {
        let t = args[0];
        let d = match self {
            Primitive::Relu | Primitive::Abs | Primitive::Max2 | Primitive::Min2
            | Primitive::Hinge => {
                if self.at_kink(args) {
                    return Ok(PrimDeriv::Kink);
                }
                match self {
                    Primitive::Relu => vec![if t > 0.0 { 1.0 } else { 0.0 }],
                    Primitive::Abs => vec![t.signum()],
                    Primitive::Max2 => {
                        if t > args[1] {
                            vec![1.0, 0.0]
                        } else {
                            vec![0.0, 1.0]
                        }
                    }
                    Primitive::Min2 => {
                        if t < args[1] {
                            vec![1.0, 0.0]
                        } else {
                            vec![0.0, 1.0]
                        }
                    }
                    Primitive::Hinge => {
                        if 1.0 - t * args[1] > 0.0 {
                            vec![-args[1], -t]
                        } else {
                            vec![0.0, 0.0]
                        }
                    }
                    _ => unreachable!(),
                }
            }
            Primitive::Softsign => {
                let a = t.abs() + 1.0;
                vec![1.0 / (a * a)]
            }
            Primitive::Logistic => {
                let s = logistic(t);
                vec![s * (1.0 - s)]
            }
            Primitive::Tanh => vec![1.0 - t.tanh() * t.tanh()],
            Primitive::Softplus => vec![logistic(t)],
            Primitive::Swish(beta) => {
                let s = logistic(beta * t);
                vec![s + beta * t * s * (1.0 - s)]
            }
            Primitive::Mish => {
                let sp = softplus(t);
                let th = sp.tanh();
                vec![th + t * (1.0 - th * th) * logistic(t)]
            }
            Primitive::Elu => vec![if t < 0.0 { t.exp() } else { 1.0 }],
            Primitive::Gelu => {
                let phi = 0.5 * (1.0 + libm::erf(t * FRAC_1_SQRT_2));
                vec![phi + t * INV_SQRT_2PI * (-0.5 * t * t).exp()]
            }
            Primitive::Arctan => vec![1.0 / (1.0 + t * t)],
            Primitive::Exp => vec![t.exp()],
            Primitive::Log => {
                if t > 0.0 {
                    vec![1.0 / t]
                } else {
                    return Err(ExprError::Domain {
                        primitive: "log",
                        input: t,
                    });
                }
            }
            Primitive::Erf => vec![FRAC_2_SQRT_PI * (-t * t).exp()],
            Primitive::Sqrt => {
                if t > 0.0 {
                    vec![0.5 / t.sqrt()]
                } else {
                    return Err(ExprError::Domain {
                        primitive: "sqrt'",
                        input: t,
                    });
                }
            }
            Primitive::Huber(beta) => {
                vec![if t.abs() <= *beta { t } else { beta * t.signum() }]
            }
            Primitive::Square => vec![2.0 * t],
            Primitive::Sin => vec![t.cos()],
        };
        Ok(PrimDeriv::Smooth(d))
    }

    /// The two limiting branch gradients at a kink, `(first, second)`.
    ///
    /// Unary kinks report the left and right derivative limits. `max2`/`min2`
    /// report the first-argument and second-argument branches. `hinge`
    /// reports the flat branch first, then the active branch.
    pub fn branch_derivatives(&self, args: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
        if !self.at_kink(args) {
            return None;
        }
        Some(match self {
            Primitive::Relu => (vec![0.0], vec![1.0]),
            Primitive::Abs => (vec![-1.0], vec![1.0]),
            Primitive::Max2 | Primitive::Min2 => (vec![1.0, 0.0], vec![0.0, 1.0]),
            Primitive::Hinge => (vec![0.0, 0.0], vec![-args[1], -args[0]]),
            _ => unreachable!("at_kink is false for smooth primitives"),
        })
    }

    /// One-sided directional derivative `lim_{s->0+} (p(args + s*dargs) - p(args))/s`.
    ///
    /// Every primitive here is directionally differentiable; at kinks the
    /// formula is the directional selection (max/min/abs of the perturbation)
    /// rather than any policy value.
    pub fn directional(&self, args: &[f64], dargs: &[f64]) -> Result<f64, ExprError> {
        if self.at_kink(args) {
            return Ok(match self {
                Primitive::Relu => dargs[0].max(0.0),
                Primitive::Abs => dargs[0].abs(),
                Primitive::Max2 => dargs[0].max(dargs[1]),
                Primitive::Min2 => dargs[0].min(dargs[1]),
                Primitive::Hinge => (-(args[0] * dargs[1] + args[1] * dargs[0])).max(0.0),
                _ => unreachable!(),
            });
        }
        match self.derivatives(args)? {
            PrimDeriv::Smooth(d) => Ok(d.iter().zip(dargs).map(|(a, b)| a * b).sum()),
            PrimDeriv::Kink => unreachable!(),
        }
    }

    /// Parse a primitive name (without parameters).
    pub fn from_name(name: &str) -> Option<&'static str> {
        // Only used to validate names; construction with parameters happens
        // in the parser.
        let known = [
            "relu", "abs", "max2", "min2", "softsign", "logistic", "tanh", "softplus", "swish",
            "mish", "elu", "gelu", "arctan", "exp", "log", "erf", "sqrt", "huber", "hinge",
            "square", "sin",
        ];
        known.iter().find(|k| **k == name).copied()
    }
}
