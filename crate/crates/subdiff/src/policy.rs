//! Derivative selection rules at nondifferentiable points.

use tame_expr::Primitive;

use crate::error::SubdiffError;

/// Which derivative value a primitive reports when evaluated exactly at a
/// kink.
///
/// `First`/`Second` pick a limiting branch (left/right for unary primitives,
/// first/second argument for `max2`/`min2`, flat/active for `hinge`).
/// `Fixed(v)` must lie in the convex hull of the branch values: a scalar
/// derivative for unary primitives, a convex weight on the first branch for
/// binary ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KinkRule {
    First,
    Second,
    Zero,
    Fixed(f64),
}

/// Per-primitive kink rules.
///
/// The default is the table the selection-AD engine documents: relu reports
/// derivative 0 at 0, abs reports 0 at 0, max2/min2 take the first argument
/// on ties, hinge takes its flat branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinkPolicy {
    pub relu: KinkRule,
    pub abs: KinkRule,
    pub max2: KinkRule,
    pub min2: KinkRule,
    pub hinge: KinkRule,
}

impl Default for KinkPolicy {
    fn default() -> Self {
        KinkPolicy {
            relu: KinkRule::Zero,
            abs: KinkRule::Zero,
            max2: KinkRule::First,
            min2: KinkRule::First,
            hinge: KinkRule::Zero,
        }
    }
}

impl KinkPolicy {
    /// Check every rule lies in the convex hull of its one-sided limits.
    pub fn validate(&self) -> Result<(), SubdiffError> {
        let unary = |rule: KinkRule, lo: f64, hi: f64, primitive: &'static str| match rule {
            KinkRule::Fixed(v) if !(lo..=hi).contains(&v) => {
                Err(SubdiffError::InvalidPolicy { primitive, value: v })
            }
            _ => Ok(()),
        };
        unary(self.relu, 0.0, 1.0, "relu")?;
        unary(self.abs, -1.0, 1.0, "abs")?;
        let binary = |rule: KinkRule, primitive: &'static str| match rule {
            KinkRule::Zero => Err(SubdiffError::InvalidPolicy {
                primitive,
                value: 0.0,
            }),
            KinkRule::Fixed(l) if !(0.0..=1.0).contains(&l) => {
                Err(SubdiffError::InvalidPolicy { primitive, value: l })
            }
            _ => Ok(()),
        };
        binary(self.max2, "max2")?;
        binary(self.min2, "min2")?;
        // hinge's flat branch is the zero vector, so Zero is a valid alias.
        if let KinkRule::Fixed(l) = self.hinge {
            if !(0.0..=1.0).contains(&l) {
                return Err(SubdiffError::InvalidPolicy {
                    primitive: "hinge",
                    value: l,
                });
            }
        }
        Ok(())
    }

    /// The policy's derivative vector for `prim` at a kink with child values
    /// `args`. Returns `None` when not at a kink.
    pub fn value_for(&self, prim: &Primitive, args: &[f64]) -> Option<Vec<f64>> {
        let (first, second) = prim.branch_derivatives(args)?;
        let rule = match prim {
            Primitive::Relu => self.relu,
            Primitive::Abs => self.abs,
            Primitive::Max2 => self.max2,
            Primitive::Min2 => self.min2,
            Primitive::Hinge => self.hinge,
            _ => return None,
        };
        Some(match rule {
            KinkRule::First => first,
            KinkRule::Second => second,
            KinkRule::Zero => vec![0.0; first.len()],
            KinkRule::Fixed(v) => match prim {
                // Scalar derivative value for unary kinks.
                Primitive::Relu | Primitive::Abs => vec![v],
                // Convex weight on the first branch for binary kinks.
                _ => first
                    .iter()
                    .zip(&second)
                    .map(|(a, b)| v * a + (1.0 - v) * b)
                    .collect(),
            },
        })
    }
}
