//! O-minimal structure tags and expression classification.

use crate::expr::{Expr, ExprKind};

/// The o-minimal structures tracked per expression, ordered by inclusion.
///
/// A composite's tag is the join (maximum) of its children's tags and its own
/// primitive's tag. The tag never proves non-definability; it only reports
/// the smallest listed structure whose primitive set covers the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum StructureTag {
    /// Semialgebraic.
    RAlg,
    /// Generated by the real exponential.
    RExp,
    /// Pfaffian closure of the semialgebraic sets.
    RPfaff,
    /// Contains an explicitly untamed primitive (unrestricted sine).
    Untamed,
}

impl StructureTag {
    /// Join in the tag semilattice.
    pub fn join(self, other: StructureTag) -> StructureTag {
        self.max(other)
    }

    pub fn name(&self) -> &'static str {
        match self {
            StructureTag::RAlg => "R_alg",
            StructureTag::RExp => "R_exp",
            StructureTag::RPfaff => "R_Pfaff",
            StructureTag::Untamed => "untamed",
        }
    }
}

impl std::fmt::Display for StructureTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Tag of the whole expression: join over all nodes.
///
/// Structural nodes (constants, variables, affine maps, polynomials, sums,
/// products, scalings, composition) are semialgebraic.
pub fn classify_structure(expr: &Expr) -> StructureTag {
    let mut tag = StructureTag::RAlg;
    expr.visit(&mut |kind| {
        if let ExprKind::Prim { prim, .. } = kind {
            tag = tag.join(prim.tag());
        }
    });
    tag
}
