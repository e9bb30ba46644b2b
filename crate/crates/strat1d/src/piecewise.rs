//! Piecewise polynomials with designated right-side evaluation at
//! breakpoints.

use num_rational::BigRational;

use crate::error::Strat1dError;
use crate::poly::Poly;

/// Breakpoints `b_1 < ... < b_k` and `k + 1` polynomial pieces covering the
/// line; piece `i` rules on `(b_i, b_{i+1})`, and evaluation at a breakpoint
/// uses the right piece.
#[derive(Debug, Clone)]
pub struct PiecewisePoly {
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Poly>,
    /// Left limit equals right value at each breakpoint, decided exactly.
    pub continuity: Vec<bool>,
}

impl PiecewisePoly {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Poly>) -> Result<PiecewisePoly, Strat1dError> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Strat1dError::EmptyInterval {
                lo: breakpoints.len() as f64,
                hi: pieces.len() as f64,
            });
        }
        for w in breakpoints.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Strat1dError::EmptyInterval { lo: w[0], hi: w[1] });
            }
        }
        let mut continuity = Vec::with_capacity(breakpoints.len());
        for (i, b) in breakpoints.iter().enumerate() {
            let br = BigRational::from_float(*b).ok_or(Strat1dError::Degenerate { value: *b })?;
            let left = pieces[i].to_rational()?.eval(&br);
            let right = pieces[i + 1].to_rational()?.eval(&br);
            continuity.push(left == right);
        }
        Ok(PiecewisePoly {
            breakpoints,
            pieces,
            continuity,
        })
    }

    /// Single polynomial on the whole line.
    pub fn from_poly(p: Poly) -> PiecewisePoly {
        PiecewisePoly {
            breakpoints: vec![],
            pieces: vec![p],
            continuity: vec![],
        }
    }

    /// `relu`: 0 on the left of 0, identity on the right.
    pub fn relu() -> PiecewisePoly {
        PiecewisePoly::new(vec![0.0], vec![Poly::zero(), Poly::new(vec![0.0, 1.0])])
            .expect("static shape")
    }

    /// `|x|`.
    pub fn abs() -> PiecewisePoly {
        PiecewisePoly::new(
            vec![0.0],
            vec![Poly::new(vec![0.0, -1.0]), Poly::new(vec![0.0, 1.0])],
        )
        .expect("static shape")
    }

    /// Index of the piece ruling at `x` (right piece at breakpoints).
    pub fn piece_index(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|b| *b <= x)
    }

    /// Index of the piece ruling immediately left of `x`.
    pub fn piece_index_left(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|b| *b < x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.pieces[self.piece_index(x)].eval(x)
    }

    pub fn derivative(&self) -> PiecewisePoly {
        PiecewisePoly {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(Poly::derivative).collect(),
            // Derivative continuity is not tracked; recompute if needed.
            continuity: vec![false; self.breakpoints.len()],
        }
    }

    pub fn is_continuous_at(&self, k: usize) -> bool {
        self.continuity[k]
    }
}
