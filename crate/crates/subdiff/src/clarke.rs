//! Clarke subdifferential oracle.
//!
//! The subdifferential of a locally Lipschitz function is the convex hull of
//! gradient limits over differentiable points approaching the base point.
//! That limit construction has no finite procedure in general, so the oracle
//! has two routes:
//!
//! * exact, for univariate compositions of piecewise-polynomial primitives,
//!   where the two one-sided derivative limits generate the hull;
//! * sampled, elsewhere: gradients at random points on shrinking spheres
//!   around the base point, deduplicated, flagged `sampled` with a
//!   stabilization heuristic, never `exact`.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tame_expr::{Expr, ExprKind, Primitive};

use crate::ad::ad_derivative;
use crate::error::SubdiffError;
use crate::onesided::{left_derivative, right_derivative};
use crate::policy::KinkPolicy;

/// Default radius schedule: five decades from 1e-2 down to 1e-6.
pub fn default_radii() -> Vec<f64> {
    vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
}

/// Default samples per radius.
pub const DEFAULT_SAMPLES_PER_RADIUS: usize = 64;

/// Generators deduplicated at this distance.
pub const DEDUP_TOL: f64 = 1e-6;

/// Successive per-radius hulls within this Hausdorff distance count as
/// stabilized.
pub const STABILIZE_TOL: f64 = 1e-4;

/// Finite generator set whose convex hull approximates (or, when exact,
/// equals) the Clarke subdifferential at `point`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgradientHull {
    pub point: Vec<f64>,
    pub generators: Vec<Vec<f64>>,
    /// Radius schedule used; empty for exact hulls.
    pub radii: Vec<f64>,
    /// RNG seed used; 0 for exact hulls.
    pub seed: u64,
    pub exact: bool,
    /// Sampled hulls only: whether hulls at successive radii agreed to
    /// `STABILIZE_TOL` in Hausdorff distance.
    pub stabilized: Option<bool>,
    pub warnings: Vec<HullWarning>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum HullWarning {
    /// A primitive with unbounded local slope sits near the base point; the
    /// function is not locally Lipschitz there and the hull is unreliable.
    NonLipschitz { primitive: &'static str, input: f64 },
    /// Samples were discarded (domain errors or exact kink hits).
    SamplesSkipped { count: usize },
}

impl SubgradientHull {
    /// Build an exact hull from explicit generators (used by tests and the
    /// min-norm examples).
    pub fn from_generators(point: Vec<f64>, generators: Vec<Vec<f64>>) -> SubgradientHull {
        SubgradientHull {
            point,
            generators,
            radii: Vec::new(),
            seed: 0,
            exact: true,
            stabilized: None,
            warnings: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.point.len()
    }

    /// Structured text record (one `key value...` pair per line).
    pub fn to_record(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let fmt_vec = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(out, "point {}", fmt_vec(&self.point)).unwrap();
        writeln!(out, "kind {}", if self.exact { "exact" } else { "sampled" }).unwrap();
        writeln!(out, "seed {}", self.seed).unwrap();
        writeln!(out, "radii {}", fmt_vec(&self.radii)).unwrap();
        for g in &self.generators {
            writeln!(out, "generator {}", fmt_vec(g)).unwrap();
        }
        out
    }

    /// Parse the record format emitted by [`SubgradientHull::to_record`].
    pub fn from_record(text: &str) -> Result<SubgradientHull, SubdiffError> {
        let mut point = None;
        let mut exact = None;
        let mut seed = 0u64;
        let mut radii = Vec::new();
        let mut generators = Vec::new();
        let parse_floats = |rest: &str, line: usize| -> Result<Vec<f64>, SubdiffError> {
            rest.split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map_err(|_| SubdiffError::Record {
                        line,
                        message: format!("bad number {tok:?}"),
                    })
                })
                .collect()
        };
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            match key {
                "point" => point = Some(parse_floats(rest, line_no)?),
                "kind" => {
                    exact = Some(match rest.trim() {
                        "exact" => true,
                        "sampled" => false,
                        other => {
                            return Err(SubdiffError::Record {
                                line: line_no,
                                message: format!("unknown kind {other:?}"),
                            })
                        }
                    })
                }
                "seed" => {
                    seed = rest.trim().parse().map_err(|_| SubdiffError::Record {
                        line: line_no,
                        message: format!("bad seed {rest:?}"),
                    })?
                }
                "radii" => radii = parse_floats(rest, line_no)?,
                "generator" => generators.push(parse_floats(rest, line_no)?),
                other => {
                    return Err(SubdiffError::Record {
                        line: line_no,
                        message: format!("unknown key {other:?}"),
                    })
                }
            }
        }
        let point = point.ok_or(SubdiffError::Record {
            line: 0,
            message: "missing point".into(),
        })?;
        if generators.is_empty() {
            return Err(SubdiffError::EmptyHull);
        }
        let exact = exact.unwrap_or(false);
        Ok(SubgradientHull {
            point,
            generators,
            radii,
            seed,
            exact,
            stabilized: None,
            warnings: Vec::new(),
        })
    }
}

/// True when the expression is a composition of piecewise-polynomial
/// primitives and structural nodes, the class with exact univariate kink
/// analysis.
pub fn is_piecewise_polynomial_expr(expr: &Expr) -> bool {
    let mut ok = true;
    expr.visit(&mut |kind| {
        if let ExprKind::Prim { prim, .. } = kind {
            if !prim.is_piecewise_polynomial() {
                ok = false;
            }
        }
    });
    ok
}

/// Scan for primitives with unbounded local slope (log, sqrt) whose inputs
/// come within `radius` of their domain boundary at `point`.
fn non_lipschitz_warnings(expr: &Expr, point: &[f64], radius: f64) -> Vec<HullWarning> {
    let mut warnings = Vec::new();
    // topo_order stays in the outer variable space (inner compose bodies are
    // differentiated at their own points and are not scanned here).
    for node in expr.topo_order() {
        if let ExprKind::Prim { prim, args } = node.kind() {
            if matches!(prim, Primitive::Log | Primitive::Sqrt) {
                if let Ok(v) = args[0].with_arity(point.len()).and_then(|a| a.eval(point)) {
                    if v.abs() <= radius {
                        warnings.push(HullWarning::NonLipschitz {
                            primitive: prim.name(),
                            input: v,
                        });
                    }
                }
            }
        }
    }
    warnings
}

fn dedup(generators: &mut Vec<Vec<f64>>, tol: f64) {
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for g in generators.drain(..) {
        let dup = kept.iter().any(|k| {
            k.iter()
                .zip(&g)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
                <= tol
        });
        if !dup {
            kept.push(g);
        }
    }
    *generators = kept;
}

fn hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let dist = |p: &[f64], q: &[f64]| {
        p.iter()
            .zip(q)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let one_sided = |xs: &[Vec<f64>], ys: &[Vec<f64>]| {
        xs.iter()
            .map(|x| ys.iter().map(|y| dist(x, y)).fold(f64::INFINITY, f64::min))
            .fold(0.0_f64, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}

/// Approximate (or exactly compute) the Clarke subdifferential at `point`.
///
/// Exact route: univariate piecewise-polynomial expressions, generators are
/// the two one-sided derivative limits. Sampled route: `ad_derivative` at
/// `samples_per_radius` uniform sphere points per radius, kink hits and
/// domain errors skipped, generators deduplicated at `1e-6`.
pub fn clarke_generators(
    expr: &Expr,
    point: &[f64],
    radii: &[f64],
    samples_per_radius: usize,
    seed: u64,
) -> Result<SubgradientHull, SubdiffError> {
    if point.len() != expr.arity() {
        return Err(SubdiffError::Dimension {
            context: "clarke_generators point",
            expected: expr.arity(),
            found: point.len(),
        });
    }
    // Reject evaluation at an infeasible base point outright.
    expr.eval(point)?;

    let max_radius = radii.iter().copied().fold(0.0_f64, f64::max);
    let mut warnings = non_lipschitz_warnings(expr, point, max_radius);

    if expr.arity() == 1 && is_piecewise_polynomial_expr(expr) {
        let t = point[0];
        let dm = left_derivative(expr, t)?;
        let dp = right_derivative(expr, t)?;
        let mut generators = vec![vec![dm]];
        if (dp - dm).abs() > 0.0 {
            generators.push(vec![dp]);
        }
        return Ok(SubgradientHull {
            point: point.to_vec(),
            generators,
            radii: Vec::new(),
            seed: 0,
            exact: true,
            stabilized: None,
            warnings,
        });
    }

    let policy = KinkPolicy::default();
    let n = expr.arity();
    let mut per_radius: Vec<Vec<Vec<f64>>> = Vec::with_capacity(radii.len());
    let mut skipped = 0usize;
    for (ri, &r) in radii.iter().enumerate() {
        let mut gens = Vec::new();
        for si in 0..samples_per_radius {
            // Counter-based stream per (radius, sample) index: parallel or
            // sequential evaluation orders agree.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((ri * samples_per_radius + si) as u64);
            let mut u: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
            for (ui, xi) in u.iter_mut().zip(point) {
                *ui = xi + r * (*ui / norm);
            }
            match expr.eval_tracking_kinks(&u) {
                Ok((_, true)) | Err(_) => {
                    skipped += 1;
                    continue;
                }
                Ok((_, false)) => {}
            }
            match ad_derivative(expr, &u, &policy) {
                Ok(g) => gens.push(g),
                Err(_) => skipped += 1,
            }
        }
        dedup(&mut gens, DEDUP_TOL);
        per_radius.push(gens);
    }
    if skipped > 0 {
        warnings.push(HullWarning::SamplesSkipped { count: skipped });
    }

    let stabilized = per_radius
        .windows(2)
        .all(|w| !w[0].is_empty() && !w[1].is_empty() && hausdorff(&w[0], &w[1]) <= STABILIZE_TOL);

    let mut generators: Vec<Vec<f64>> = per_radius.into_iter().flatten().collect();
    dedup(&mut generators, DEDUP_TOL);
    if generators.is_empty() {
        return Err(SubdiffError::EmptyHull);
    }
    Ok(SubgradientHull {
        point: point.to_vec(),
        generators,
        radii: radii.to_vec(),
        seed,
        exact: false,
        stabilized: Some(stabilized),
        warnings,
    })
}

/// Clarke oracle with the default radius schedule and sample count.
pub fn clarke_generators_default(
    expr: &Expr,
    point: &[f64],
    seed: u64,
) -> Result<SubgradientHull, SubdiffError> {
    clarke_generators(expr, point, &default_radii(), DEFAULT_SAMPLES_PER_RADIUS, seed)
}
