//! Dense univariate polynomials, in floating and exact rational arithmetic.
//!
//! Floating coefficients convert to rationals exactly (every finite binary64
//! is rational), so sign determination and Sturm sequences run in exact
//! arithmetic regardless of how the polynomial was built.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Strat1dError;

/// Polynomial with `f64` coefficients, ascending degree, trailing zeros
/// trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Poly {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Poly {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: f64) -> Poly {
        Poly::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports degree 0 by convention here.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap_or(&0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| (i + 1) as f64 * c)
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(0.0)
                        + other.coeffs.get(i).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Exact rational mirror; errors on non-finite coefficients.
    pub fn to_rational(&self) -> Result<RatPoly, Strat1dError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&c| {
                BigRational::from_float(c).ok_or(Strat1dError::Degenerate { value: c })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RatPoly::new(coeffs))
    }
}

/// Polynomial over exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct RatPoly {
    pub coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> RatPoly {
        while coeffs.last().map_or(false, Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> RatPoly {
        RatPoly { coeffs: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Exact sign at a rational point: -1, 0, or +1.
    pub fn sign_at(&self, x: &BigRational) -> i8 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn derivative(&self) -> RatPoly {
        if self.coeffs.len() <= 1 {
            return RatPoly::zero();
        }
        RatPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| BigRational::from_integer(BigInt::from(i + 1)) * c)
                .collect(),
        )
    }

    /// Euclidean remainder of `self` by `div` over the rational field.
    pub fn rem(&self, div: &RatPoly) -> RatPoly {
        assert!(!div.is_zero(), "division by the zero polynomial");
        let mut r = self.coeffs.clone();
        let d = div.degree();
        let lead = div.leading();
        while r.len() > d && !r.is_empty() {
            let k = r.len() - 1;
            let q = r[k].clone() / lead.clone();
            if q.is_zero() {
                r.pop();
                continue;
            }
            for (i, c) in div.coeffs.iter().enumerate() {
                let idx = k - d + i;
                let sub = q.clone() * c;
                r[idx] -= sub;
            }
            // Leading term cancels exactly.
            r.pop();
            while r.last().map_or(false, Zero::is_zero) {
                r.pop();
            }
        }
        RatPoly { coeffs: r }
    }

    /// Monic gcd by the Euclidean algorithm.
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.leading();
        RatPoly::new(a.coeffs.into_iter().map(|c| c / lead.clone()).collect())
    }

    /// Square-free part `p / gcd(p, p')`.
    pub fn square_free(&self) -> RatPoly {
        if self.degree() == 0 || self.is_zero() {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            return self.clone();
        }
        self.div_exact(&g)
    }

    /// Exact quotient when `div` divides `self`.
    pub fn div_exact(&self, div: &RatPoly) -> RatPoly {
        assert!(!div.is_zero());
        let mut r = self.coeffs.clone();
        let d = div.degree();
        let lead = div.leading();
        let mut q = vec![BigRational::zero(); self.coeffs.len().saturating_sub(d)];
        while r.len() > d {
            let k = r.len() - 1;
            let c = r[k].clone() / lead.clone();
            q[k - d] = c.clone();
            for (i, dc) in div.coeffs.iter().enumerate() {
                let idx = k - d + i;
                let sub = c.clone() * dc;
                r[idx] -= sub;
            }
            r.pop();
            while r.last().map_or(false, Zero::is_zero) {
                r.pop();
            }
        }
        RatPoly::new(q)
    }

    /// Coefficients of `p(c + t)` as a polynomial in `t` (exact Taylor shift).
    pub fn shift(&self, c: &BigRational) -> RatPoly {
        // Horner-style synthetic shift.
        let mut out = vec![BigRational::zero(); self.coeffs.len()];
        for coef in self.coeffs.iter().rev() {
            // out = out * (c + t) + coef, maintained in t-coordinates.
            let mut next = vec![BigRational::zero(); out.len()];
            for i in (1..out.len()).rev() {
                next[i] = out[i - 1].clone() + out[i].clone() * c;
            }
            if !out.is_empty() {
                next[0] = out[0].clone() * c + coef;
            }
            out = next;
        }
        RatPoly::new(out)
    }

    /// Cauchy root bound: all real roots lie in `[-M, M]`.
    pub fn root_bound(&self) -> BigRational {
        if self.coeffs.len() <= 1 {
            return BigRational::one();
        }
        let lead = self.leading().abs();
        let max = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs() / lead.clone())
            .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
        max + BigRational::one()
    }
}
