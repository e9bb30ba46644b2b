//! The expression DAG for definable functions.
//!
//! Expressions are immutable after construction and shared through [`std::sync::Arc`],
//! so network builders produce DAGs rather than exponentially large trees.
//! Evaluation is reentrant; all state lives in per-call memo tables.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::error::ExprError;
use crate::primitive::Primitive;

/// One monomial of a polynomial node: `coef * prod_i arg_i^powers[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyTerm {
    pub coef: f64,
    pub powers: Vec<u32>,
}

/// Node kinds of the expression language.
#[derive(Debug, Clone)]
pub enum ExprKind {
    /// Real constant.
    Const(f64),
    /// Coordinate of the input vector.
    Var(usize),
    /// Scalar affine combination `sum_i weights[i]*args[i] + bias`.
    Affine {
        weights: Vec<f64>,
        bias: f64,
        args: Vec<Expr>,
    },
    /// Multivariate polynomial in the values of `args`.
    Poly { terms: Vec<PolyTerm>, args: Vec<Expr> },
    /// Primitive applied to child values.
    Prim { prim: Primitive, args: Vec<Expr> },
    /// Sum of children.
    Sum(Vec<Expr>),
    /// Product of exactly two children.
    Prod(Expr, Expr),
    /// Scalar multiple.
    Scale(f64, Expr),
    /// `f` composed with `args`: `f(args[0](x), ..., args[m-1](x))`.
    Compose { f: Expr, args: Vec<Expr> },
}

#[derive(Debug)]
struct Node {
    kind: ExprKind,
    arity: usize,
}

/// A definable scalar function of `arity()` real variables.
#[derive(Debug, Clone)]
pub struct Expr {
    node: Arc<Node>,
}

fn implied_arity(kind: &ExprKind) -> usize {
    match kind {
        ExprKind::Const(_) => 0,
        ExprKind::Var(i) => i + 1,
        ExprKind::Affine { args, .. } | ExprKind::Poly { args, .. } | ExprKind::Prim { args, .. } => {
            args.iter().map(|e| e.arity()).max().unwrap_or(0)
        }
        ExprKind::Sum(args) => args.iter().map(|e| e.arity()).max().unwrap_or(0),
        ExprKind::Prod(a, b) => a.arity().max(b.arity()),
        ExprKind::Scale(_, e) => e.arity(),
        ExprKind::Compose { args, .. } => args.iter().map(|e| e.arity()).max().unwrap_or(0),
    }
}

impl Expr {
    fn new(kind: ExprKind) -> Expr {
        let arity = implied_arity(&kind);
        Expr {
            node: Arc::new(Node { kind, arity }),
        }
    }

    pub fn constant(c: f64) -> Expr {
        Expr::new(ExprKind::Const(c))
    }

    pub fn var(i: usize) -> Expr {
        Expr::new(ExprKind::Var(i))
    }

    /// `sum_i weights[i]*args[i] + bias`; weight and child counts must match.
    pub fn affine(weights: Vec<f64>, bias: f64, args: Vec<Expr>) -> Result<Expr, ExprError> {
        if weights.len() != args.len() {
            return Err(ExprError::Dimension {
                context: "affine weights vs children",
                expected: weights.len(),
                found: args.len(),
            });
        }
        Ok(Expr::new(ExprKind::Affine { weights, bias, args }))
    }

    /// Polynomial in the child values; every term must list one power per child.
    pub fn polynomial(terms: Vec<PolyTerm>, args: Vec<Expr>) -> Result<Expr, ExprError> {
        for t in &terms {
            if t.powers.len() != args.len() {
                return Err(ExprError::Dimension {
                    context: "polynomial term powers vs children",
                    expected: args.len(),
                    found: t.powers.len(),
                });
            }
        }
        Ok(Expr::new(ExprKind::Poly { terms, args }))
    }

    pub fn prim(prim: Primitive, args: Vec<Expr>) -> Result<Expr, ExprError> {
        if args.len() != prim.arg_count() {
            return Err(ExprError::Dimension {
                context: "primitive argument count",
                expected: prim.arg_count(),
                found: args.len(),
            });
        }
        Ok(Expr::new(ExprKind::Prim { prim, args }))
    }

    pub fn relu(e: Expr) -> Expr {
        Expr::prim(Primitive::Relu, vec![e]).unwrap()
    }

    pub fn abs(e: Expr) -> Expr {
        Expr::prim(Primitive::Abs, vec![e]).unwrap()
    }

    pub fn square(e: Expr) -> Expr {
        Expr::prim(Primitive::Square, vec![e]).unwrap()
    }

    pub fn max2(a: Expr, b: Expr) -> Expr {
        Expr::prim(Primitive::Max2, vec![a, b]).unwrap()
    }

    pub fn min2(a: Expr, b: Expr) -> Expr {
        Expr::prim(Primitive::Min2, vec![a, b]).unwrap()
    }

    pub fn sum(args: Vec<Expr>) -> Expr {
        Expr::new(ExprKind::Sum(args))
    }

    pub fn prod(a: Expr, b: Expr) -> Expr {
        Expr::new(ExprKind::Prod(a, b))
    }

    pub fn scale(c: f64, e: Expr) -> Expr {
        Expr::new(ExprKind::Scale(c, e))
    }

    /// Compose `f` (of arity `args.len()`) with the given argument expressions.
    pub fn compose(f: Expr, args: Vec<Expr>) -> Result<Expr, ExprError> {
        if f.arity() > args.len() {
            return Err(ExprError::Dimension {
                context: "compose argument count",
                expected: f.arity(),
                found: args.len(),
            });
        }
        Ok(Expr::new(ExprKind::Compose { f, args }))
    }

    /// Input dimension. Computed as the smallest dimension consistent with
    /// the tree; widen with [`Expr::with_arity`].
    pub fn arity(&self) -> usize {
        self.node.arity
    }

    /// Same function viewed on a larger ambient space.
    pub fn with_arity(&self, arity: usize) -> Result<Expr, ExprError> {
        if arity < self.node.arity {
            return Err(ExprError::Dimension {
                context: "with_arity below implied arity",
                expected: self.node.arity,
                found: arity,
            });
        }
        Ok(Expr {
            node: Arc::new(Node {
                kind: self.node.kind.clone(),
                arity,
            }),
        })
    }

    pub fn kind(&self) -> &ExprKind {
        &self.node.kind
    }

    /// Stable per-node identity for memo tables (valid while the DAG lives).
    pub fn node_id(&self) -> usize {
        Arc::as_ptr(&self.node) as usize
    }

    /// Evaluate at `point`; `point.len()` must equal `arity()`.
    pub fn eval(&self, point: &[f64]) -> Result<f64, ExprError> {
        if point.len() != self.arity() {
            return Err(ExprError::Dimension {
                context: "eval point dimension",
                expected: self.arity(),
                found: point.len(),
            });
        }
        let mut memo = HashMap::new();
        self.eval_inner(point, &mut memo, &mut false)
    }

    /// Evaluate and report whether any primitive on the evaluation path was
    /// hit exactly at a kink (exact floating equality with its breakpoint).
    pub fn eval_tracking_kinks(&self, point: &[f64]) -> Result<(f64, bool), ExprError> {
        if point.len() != self.arity() {
            return Err(ExprError::Dimension {
                context: "eval point dimension",
                expected: self.arity(),
                found: point.len(),
            });
        }
        let mut memo = HashMap::new();
        let mut hit = false;
        let v = self.eval_inner(point, &mut memo, &mut hit)?;
        Ok((v, hit))
    }

    fn eval_inner(
        &self,
        point: &[f64],
        memo: &mut HashMap<usize, f64>,
        kink_hit: &mut bool,
    ) -> Result<f64, ExprError> {
        if let Some(v) = memo.get(&self.node_id()) {
            return Ok(*v);
        }
        let v = match &self.node.kind {
            ExprKind::Const(c) => *c,
            ExprKind::Var(i) => point[*i],
            ExprKind::Affine { weights, bias, args } => {
                let mut acc = *bias;
                for (w, a) in weights.iter().zip(args) {
                    acc += w * a.eval_inner(point, memo, kink_hit)?;
                }
                acc
            }
            ExprKind::Poly { terms, args } => {
                let vals = args
                    .iter()
                    .map(|a| a.eval_inner(point, memo, kink_hit))
                    .collect::<Result<Vec<_>, _>>()?;
                terms
                    .iter()
                    .map(|t| {
                        t.coef
                            * t.powers
                                .iter()
                                .zip(&vals)
                                .map(|(p, v)| v.powi(*p as i32))
                                .product::<f64>()
                    })
                    .sum()
            }
            ExprKind::Prim { prim, args } => {
                let vals = args
                    .iter()
                    .map(|a| a.eval_inner(point, memo, kink_hit))
                    .collect::<Result<Vec<_>, _>>()?;
                if prim.at_kink(&vals) {
                    *kink_hit = true;
                }
                prim.eval(&vals)?
            }
            ExprKind::Sum(args) => {
                let mut acc = 0.0;
                for a in args {
                    acc += a.eval_inner(point, memo, kink_hit)?;
                }
                acc
            }
            ExprKind::Prod(a, b) => {
                a.eval_inner(point, memo, kink_hit)? * b.eval_inner(point, memo, kink_hit)?
            }
            ExprKind::Scale(c, e) => c * e.eval_inner(point, memo, kink_hit)?,
            ExprKind::Compose { f, args } => {
                let vals = args
                    .iter()
                    .map(|a| a.eval_inner(point, memo, kink_hit))
                    .collect::<Result<Vec<_>, _>>()?;
                // Inner function evaluated at a different point: fresh memo.
                let mut inner = HashMap::new();
                f.eval_inner(&vals[..f.arity()], &mut inner, kink_hit)?
            }
        };
        memo.insert(self.node_id(), v);
        Ok(v)
    }

    /// Visit each distinct node of the DAG once (children first not guaranteed).
    pub fn visit(&self, f: &mut impl FnMut(&ExprKind)) {
        let mut seen = HashSet::new();
        self.visit_inner(f, &mut seen);
    }

    fn visit_inner(&self, f: &mut impl FnMut(&ExprKind), seen: &mut HashSet<usize>) {
        if !seen.insert(self.node_id()) {
            return;
        }
        f(&self.node.kind);
        match &self.node.kind {
            ExprKind::Const(_) | ExprKind::Var(_) => {}
            ExprKind::Affine { args, .. }
            | ExprKind::Poly { args, .. }
            | ExprKind::Prim { args, .. }
            | ExprKind::Sum(args) => {
                for a in args {
                    a.visit_inner(f, seen);
                }
            }
            ExprKind::Prod(a, b) => {
                a.visit_inner(f, seen);
                b.visit_inner(f, seen);
            }
            ExprKind::Scale(_, e) => e.visit_inner(f, seen),
            ExprKind::Compose { f: g, args } => {
                g.visit_inner(f, seen);
                for a in args {
                    a.visit_inner(f, seen);
                }
            }
        }
    }

    /// Distinct nodes in child-before-parent order.
    pub fn topo_order(&self) -> Vec<Expr> {
        let mut order = Vec::new();
        let mut seen = HashSet::new();
        self.topo_inner(&mut order, &mut seen);
        order
    }

    fn topo_inner(&self, order: &mut Vec<Expr>, seen: &mut HashSet<usize>) {
        if !seen.insert(self.node_id()) {
            return;
        }
        match &self.node.kind {
            ExprKind::Const(_) | ExprKind::Var(_) => {}
            ExprKind::Affine { args, .. }
            | ExprKind::Poly { args, .. }
            | ExprKind::Prim { args, .. }
            | ExprKind::Sum(args) => {
                for a in args {
                    a.topo_inner(order, seen);
                }
            }
            ExprKind::Prod(a, b) => {
                a.topo_inner(order, seen);
                b.topo_inner(order, seen);
            }
            ExprKind::Scale(_, e) => e.topo_inner(order, seen),
            ExprKind::Compose { args, .. } => {
                // The inner function is differentiated at its own point; it
                // is not part of this DAG's value flow.
                for a in args {
                    a.topo_inner(order, seen);
                }
            }
        }
        order.push(self.clone());
    }

    /// Bind some variables to constants. Remaining variable indices are kept.
    pub fn substitute(&self, bindings: &HashMap<usize, f64>) -> Expr {
        let mut memo: HashMap<usize, Expr> = HashMap::new();
        self.substitute_inner(bindings, &mut memo)
    }

    fn substitute_inner(
        &self,
        bindings: &HashMap<usize, f64>,
        memo: &mut HashMap<usize, Expr>,
    ) -> Expr {
        if let Some(e) = memo.get(&self.node_id()) {
            return e.clone();
        }
        let rebuilt = match &self.node.kind {
            ExprKind::Const(c) => Expr::constant(*c),
            ExprKind::Var(i) => match bindings.get(i) {
                Some(c) => Expr::constant(*c),
                None => Expr::var(*i),
            },
            ExprKind::Affine { weights, bias, args } => Expr::new(ExprKind::Affine {
                weights: weights.clone(),
                bias: *bias,
                args: args
                    .iter()
                    .map(|a| a.substitute_inner(bindings, memo))
                    .collect(),
            }),
            ExprKind::Poly { terms, args } => Expr::new(ExprKind::Poly {
                terms: terms.clone(),
                args: args
                    .iter()
                    .map(|a| a.substitute_inner(bindings, memo))
                    .collect(),
            }),
            ExprKind::Prim { prim, args } => Expr::new(ExprKind::Prim {
                prim: *prim,
                args: args
                    .iter()
                    .map(|a| a.substitute_inner(bindings, memo))
                    .collect(),
            }),
            ExprKind::Sum(args) => Expr::new(ExprKind::Sum(
                args.iter()
                    .map(|a| a.substitute_inner(bindings, memo))
                    .collect(),
            )),
            ExprKind::Prod(a, b) => Expr::new(ExprKind::Prod(
                a.substitute_inner(bindings, memo),
                b.substitute_inner(bindings, memo),
            )),
            ExprKind::Scale(c, e) => {
                Expr::new(ExprKind::Scale(*c, e.substitute_inner(bindings, memo)))
            }
            ExprKind::Compose { f, args } => Expr::new(ExprKind::Compose {
                // Inner function has its own variable space; only the outer
                // arguments see the bindings.
                f: f.clone(),
                args: args
                    .iter()
                    .map(|a| a.substitute_inner(bindings, memo))
                    .collect(),
            }),
        };
        memo.insert(self.node_id(), rebuilt.clone());
        rebuilt
    }
}

impl PartialEq for Expr {
    /// Structural equality, DAG-aware (shared subtrees compared once).
    fn eq(&self, other: &Expr) -> bool {
        let mut seen = HashSet::new();
        eq_inner(self, other, &mut seen)
    }
}

fn eq_inner(a: &Expr, b: &Expr, seen: &mut HashSet<(usize, usize)>) -> bool {
    if Arc::ptr_eq(&a.node, &b.node) {
        return true;
    }
    if !seen.insert((a.node_id(), b.node_id())) {
        return true; // already being compared on this path; assume equal
    }
    match (&a.node.kind, &b.node.kind) {
        (ExprKind::Const(x), ExprKind::Const(y)) => x == y,
        (ExprKind::Var(i), ExprKind::Var(j)) => i == j,
        (
            ExprKind::Affine { weights: w1, bias: b1, args: a1 },
            ExprKind::Affine { weights: w2, bias: b2, args: a2 },
        ) => w1 == w2 && b1 == b2 && eq_children(a1, a2, seen),
        (ExprKind::Poly { terms: t1, args: a1 }, ExprKind::Poly { terms: t2, args: a2 }) => {
            t1 == t2 && eq_children(a1, a2, seen)
        }
        (ExprKind::Prim { prim: p1, args: a1 }, ExprKind::Prim { prim: p2, args: a2 }) => {
            p1 == p2 && eq_children(a1, a2, seen)
        }
        (ExprKind::Sum(a1), ExprKind::Sum(a2)) => eq_children(a1, a2, seen),
        (ExprKind::Prod(x1, y1), ExprKind::Prod(x2, y2)) => {
            eq_inner(x1, x2, seen) && eq_inner(y1, y2, seen)
        }
        (ExprKind::Scale(c1, e1), ExprKind::Scale(c2, e2)) => c1 == c2 && eq_inner(e1, e2, seen),
        (ExprKind::Compose { f: f1, args: a1 }, ExprKind::Compose { f: f2, args: a2 }) => {
            eq_inner(f1, f2, seen) && eq_children(a1, a2, seen)
        }
        _ => false,
    }
}

fn eq_children(a: &[Expr], b: &[Expr], seen: &mut HashSet<(usize, usize)>) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| eq_inner(x, y, seen))
}
