//! Dense polynomials in the monomial basis.

use std::fmt;

use crate::real::{Precision, Real};

/// `coeffs[i]` is the coefficient of `x^i`. Trailing zeros are always
/// stripped, so the zero polynomial has no coefficients at all.
#[derive(Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Real>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Real) -> Self {
        Self::new(vec![c])
    }

    pub fn one(prec: Precision) -> Self {
        Self::constant(Real::one(prec))
    }

    /// `x`.
    pub fn x(prec: Precision) -> Self {
        Self::new(vec![Real::zero(prec), Real::one(prec)])
    }

    /// `x^k`.
    pub fn monomial(k: usize, prec: Precision) -> Self {
        let mut c = vec![Real::zero(prec); k + 1];
        c[k] = Real::one(prec);
        Self::new(c)
    }

    pub fn new(mut coeffs: Vec<Real>) -> Self {
        while coeffs.last().is_some_and(Real::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Builds from small rationals `(num, den)`; handy in tests.
    pub fn from_ratios(c: &[(i64, i64)], prec: Precision) -> Self {
        Self::new(c.iter().map(|&(n, d)| Real::ratio(n, d, prec)).collect())
    }

    pub fn coeffs(&self) -> &[Real] {
        &self.coeffs
    }

    /// Coefficient of `x^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize, prec: Precision) -> Real {
        self.coeffs.get(i).cloned().unwrap_or_else(|| Real::zero(prec))
    }

    /// `None` for the zero polynomial (degree −∞).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&Real> {
        self.coeffs.last()
    }

    /// Horner evaluation. The zero polynomial evaluates to zero at the
    /// precision of `x`.
    pub fn eval(&self, x: &Real) -> Real {
        let mut acc = Real::zero(x.prec());
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// k-th formal derivative, as `k` successive first derivatives so that
    /// composing derivatives reproduces the same rounding bit for bit.
    pub fn derivative(&self, k: usize) -> Poly {
        (0..k).fold(self.clone(), |p, _| p.first_derivative())
    }

    fn first_derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            (1..self.coeffs.len())
                .map(|i| &self.coeffs[i] * i as i64)
                .collect(),
        )
    }

    pub fn scale(&self, c: &Real) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = long.coeffs.clone();
        for (o, s) in out.iter_mut().zip(&short.coeffs) {
            *o += s;
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-Real::one(other.precision_hint())))
    }

    /// `c·p + q`.
    pub fn axpy(c: &Real, p: &Poly, q: &Poly) -> Poly {
        let n = p.coeffs.len().max(q.coeffs.len());
        let out = (0..n)
            .map(|i| match (p.coeffs.get(i), q.coeffs.get(i)) {
                (Some(a), Some(b)) => c * a + b,
                (Some(a), None) => c * a,
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Poly::new(out)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let prec = self.precision_hint().max(other.precision_hint());
        let mut out = vec![Real::zero(prec); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// `(x - a)·p`.
    pub fn shift_mul(&self, a: &Real) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(-(a * &self.coeffs[0]));
        for i in 1..self.coeffs.len() {
            out.push(&self.coeffs[i - 1] - a * &self.coeffs[i]);
        }
        out.push(self.coeffs[self.coeffs.len() - 1].clone());
        Poly::new(out)
    }

    /// `(x - a)^2·p`.
    pub fn shift_square(&self, a: &Real) -> Poly {
        self.shift_mul(a).shift_mul(a)
    }

    /// Max absolute coefficient, zero for the zero polynomial.
    pub fn max_abs_coeff(&self, prec: Precision) -> Real {
        self.coeffs
            .iter()
            .map(Real::abs)
            .fold(Real::zero(prec), Real::max)
    }

    /// Largest coefficient precision, or the default for the zero polynomial.
    pub fn precision_hint(&self) -> Precision {
        self.coeffs
            .iter()
            .map(Real::prec)
            .max()
            .unwrap_or(Precision::DEFAULT)
    }
}

/// `max_i |p_i - q_i| / max(max_i |q_i|, 1)`: coefficientwise distance
/// scaled by the size of the reference.
pub fn coeff_rel_error(p: &Poly, q: &Poly) -> Real {
    let prec = p.precision_hint().max(q.precision_hint());
    let diff = p.sub(q).max_abs_coeff(prec);
    let scale = q.max_abs_coeff(prec).max(Real::one(prec));
    diff / scale
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}
