//! Arbitrary-precision orthogonal polynomial toolkit.
//!
//! The crate is organised bottom-up:
//!
//! * [`real`] and [`poly`]: MPFR-backed reals and dense monomial polynomials.
//! * [`opsys`]: monic orthogonal systems given by their three-term recurrence,
//!   Gauss rules, measure inner products and a Gram–Schmidt oracle.
//! * [`jacobi`]: closed-form Jacobi data (recurrence, norms, endpoint values
//!   and derivatives of the scaled family at `x = -1`).
//! * [`geronimus`]: the double Geronimus transform `(x-a)^2 dμ_gg = dμ` and
//!   its recurrences and connection formulas.
//! * [`sobolev`]: Sobolev-type orthogonal polynomials for
//!   `<p,q>_S = ∫pq dμ + M p(a)q(a) + N p'(a)q'(a)`.
//! * [`asymptotics`]: convergence scans for the Jacobi endpoint limits.
//! * [`residual`]: pointwise identity residuals used by the verification suites.

pub mod asymptotics;
pub mod geronimus;
pub mod jacobi;
pub mod opsys;
pub mod poly;
pub mod real;
pub mod residual;
pub mod sobolev;

pub use poly::Poly;
pub use real::{Precision, Real};
