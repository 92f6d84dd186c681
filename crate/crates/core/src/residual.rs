//! Pointwise residuals of polynomial identities.
//!
//! An identity `lhs = rhs` is checked at Chebyshev-spaced points of
//! `[-1, 1]`; the residual is `max |lhs(x) - rhs(x)| / (1 + |lhs(x)|)`.

use crate::poly::Poly;
use crate::real::{Precision, Real};

/// `cos((2i+1)π / (2·count))`, `i = 0..count`, in increasing order.
pub fn chebyshev_points(count: usize, prec: Precision) -> Vec<Real> {
    let pi = Real::pi(prec);
    let mut pts: Vec<Real> = (0..count)
        .map(|i| {
            (&pi * (2 * i as i64 + 1) / (2 * count as i64)).cos()
        })
        .collect();
    pts.sort_by(|a: &Real, b: &Real| a.cmp_total(b));
    pts
}

/// Residual of two scalar functions over `points`.
pub fn residual_fn(
    points: &[Real],
    lhs: impl Fn(&Real) -> Real,
    rhs: impl Fn(&Real) -> Real,
) -> Real {
    let prec = points.first().map(Real::prec).unwrap_or_default();
    points.iter().fold(Real::zero(prec), |worst, x| {
        let l = lhs(x);
        let r = rhs(x);
        let res = (&l - &r).abs() / (l.abs() + 1);
        worst.max(res)
    })
}

/// Residual of `lhs = rhs` for two polynomials at `count` Chebyshev points.
pub fn poly_residual(lhs: &Poly, rhs: &Poly, count: usize, prec: Precision) -> Real {
    residual_fn(&chebyshev_points(count, prec), |x| lhs.eval(x), |x| rhs.eval(x))
}

/// `Σ c_k p_k` for a coefficient list and a basis.
pub fn combine(coeffs: &[Real], basis: &[Poly]) -> Poly {
    coeffs
        .iter()
        .zip(basis)
        .fold(Poly::zero(), |acc, (c, p)| Poly::axpy(c, p, &acc))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::DEFAULT
    }

    #[test]
    fn chebyshev_points_are_sorted_and_symmetric() {
        let pts = chebyshev_points(11, p());
        assert_eq!(pts.len(), 11);
        for w in pts.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(pts[5].abs() < Real::one(p()).mul_pow2(-250));
        let tol = Real::one(p()).mul_pow2(-250);
        for i in 0..11 {
            assert!((&pts[i] + &pts[10 - i]).abs() < tol);
        }
    }

    #[test]
    fn residual_of_equal_and_unequal_polys() {
        let a = Poly::from_ratios(&[(1, 1), (2, 1), (1, 1)], p());
        let b = Poly::one(p()).shift_square(&Real::from_i64(-1, p()));
        assert!(poly_residual(&a, &b, 11, p()).is_zero());
        let c = Poly::from_ratios(&[(1, 1), (2, 1)], p());
        assert!(poly_residual(&a, &c, 11, p()) > Real::ratio(1, 10, p()));
    }
}
