//! The double Geronimus transform.
//!
//! Given a base measure `μ` and a point `a` outside its support, the
//! transformed measure `μ_gg` satisfies `(x-a)² dμ_gg = dμ`, i.e.
//! `<(x-a)² p, q>_gg = <p, q>_μ`. Its monic orthogonal polynomials are
//!
//! `P_n^gg = P_n + B_n P_{n-1} + C_n P_{n-2}`,
//!
//! and the module provides their three-term and five-term recurrences, the
//! norm relation `‖P_n^gg‖²_gg = C_n ‖P_{n-2}‖²_μ` and the connection
//! `(x-a)² P_n = P_{n+2}^gg + σ_{n+1,n+1} P_{n+1}^gg + σ_{n+1,n} P_n^gg`.
//!
//! The closed forms reference `‖P_{n-3}‖` or `‖P_{n-4}‖` and divide by
//! `C_{n-1}` or `C_{n-2}`, so they only hold from some degree on. Below that
//! the coefficients are obtained by projection onto the gg basis with Gauss
//! quadrature for `μ_gg`, and every result carries a [`Provenance`] tag.

use std::fmt;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::jacobi::{gg_expansion_coeffs, jacobi_system, JacobiError, JacobiParams};
use crate::opsys::{OpsysError, OrthoSystem};
use crate::poly::Poly;
use crate::real::{Precision, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeronimusError {
    #[error(transparent)]
    Jacobi(#[from] JacobiError),
    #[error(transparent)]
    Opsys(#[from] OpsysError),
    #[error("the point a = {0} lies inside the support of the base measure")]
    PointInSupport(String),
    #[error("singular system for the expansion coefficients at degree {0}")]
    Singular(usize),
}

/// Whether a coefficient came from a closed form or from projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    ClosedForm,
    Projection,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::ClosedForm => "closed_form",
            Provenance::Projection => "projection",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `P_{n+1}^gg = (x - a - σ_{n,n}) P_n^gg - σ_{n,n-1} P_{n-1}^gg`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeTerm {
    pub sigma_nn: Real,
    pub sigma_nm1: Real,
    pub provenance: Provenance,
}

/// `(x-a)² P_n^gg = P_{n+2}^gg + a_pp1 P_{n+1}^gg + a_p0 P_n^gg + a_m1 P_{n-1}^gg + a_m2 P_{n-2}^gg`.
/// Terms with negative index are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FiveTerm {
    pub a_pp1: Real,
    pub a_p0: Real,
    pub a_m1: Real,
    pub a_m2: Real,
    pub provenance: Provenance,
}

/// `(x-a)² P_n = P_{n+2}^gg + s_pp1 P_{n+1}^gg + s_p0 P_n^gg`.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    pub s_pp1: Real,
    pub s_p0: Real,
    pub provenance: Provenance,
}

enum Source {
    Jacobi(JacobiParams),
    Generic(Mutex<Vec<(Real, Real)>>),
}

/// A base system, its double Geronimus transform at `a`, and the expansion
/// coefficients `B_n`, `C_n` linking the two.
#[derive(Clone)]
pub struct GGSystem {
    base: OrthoSystem,
    gg: OrthoSystem,
    a: Real,
    source: Arc<Source>,
}

impl fmt::Debug for GGSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GGSystem")
            .field("base", &self.base.label())
            .field("gg", &self.gg.label())
            .field("a", &self.a)
            .finish()
    }
}

impl GGSystem {
    /// Jacobi weight `(1-x)^α (1+x)^β` at `a = -1`; the transformed weight is
    /// `(1-x)^α (1+x)^{β-2}`, so `β > 1` is required.
    pub fn jacobi(p: &JacobiParams) -> Result<Self, GeronimusError> {
        let shifted = p.gg_shift()?;
        Ok(GGSystem {
            base: jacobi_system(p),
            gg: jacobi_system(&shifted),
            a: Real::from_i64(-1, p.prec()),
            source: Arc::new(Source::Jacobi(p.clone())),
        })
    }

    /// Arbitrary pair of systems with `(x-a)² dμ_gg = dμ`. `B_n` and `C_n`
    /// are derived from the gg-orthogonality of `P_n + B_n P_{n-1} + C_n P_{n-2}`
    /// against `1` and `x-a`; they are computed eagerly up to `n_max` so a
    /// singular system is reported here rather than later.
    pub fn generic(
        base: OrthoSystem,
        gg: OrthoSystem,
        a: Real,
        n_max: usize,
    ) -> Result<Self, GeronimusError> {
        if let Some((lo, hi)) = base.support() {
            if &a > lo && &a < hi {
                return Err(GeronimusError::PointInSupport(a.to_decimal(20)));
            }
        }
        let sys = GGSystem {
            base,
            gg,
            a,
            source: Arc::new(Source::Generic(Mutex::new(Vec::new()))),
        };
        sys.generic_coeffs(n_max)?;
        Ok(sys)
    }

    pub fn base(&self) -> &OrthoSystem {
        &self.base
    }

    pub fn gg(&self) -> &OrthoSystem {
        &self.gg
    }

    pub fn a(&self) -> &Real {
        &self.a
    }

    pub fn prec(&self) -> Precision {
        self.base.prec()
    }

    pub fn jacobi_params(&self) -> Option<&JacobiParams> {
        match &*self.source {
            Source::Jacobi(p) => Some(p),
            Source::Generic(_) => None,
        }
    }

    /// `(B_n, C_n)`, with `B_0 = C_0 = C_1 = 0`.
    pub fn expansion_coeffs(&self, n: usize) -> (Real, Real) {
        match &*self.source {
            Source::Jacobi(p) => gg_expansion_coeffs(p, n).expect("parameters checked at construction"),
            Source::Generic(_) => self
                .generic_coeffs(n)
                .expect("expansion coefficients of a positive-definite pair"),
        }
    }

    fn generic_coeffs(&self, n: usize) -> Result<(Real, Real), GeronimusError> {
        let Source::Generic(cache) = &*self.source else {
            unreachable!("generic coefficients requested for a closed-form system")
        };
        let mut cache = cache.lock().unwrap();
        let prec = self.prec();
        while cache.len() <= n {
            let k = cache.len();
            let zero = Real::zero(prec);
            let entry = match k {
                0 => (zero.clone(), zero),
                1 => {
                    let p = self.base.monic_polys(1);
                    let den = self.gg.integrate(&p[0]);
                    (-self.gg.integrate(&p[1]) / den, zero)
                }
                _ => {
                    let p = self.base.monic_polys(k);
                    let lin = Poly::one(prec).shift_mul(&self.a);
                    let m0 = |q: &Poly| self.gg.integrate(q);
                    let m1 = |q: &Poly| self.gg.integrate(&q.mul(&lin));
                    let (a11, a12, r1) = (m0(&p[k - 1]), m0(&p[k - 2]), -m0(&p[k]));
                    let (a21, a22, r2) = (m1(&p[k - 1]), m1(&p[k - 2]), -m1(&p[k]));
                    let det = &a11 * &a22 - &a12 * &a21;
                    if det.is_zero() {
                        return Err(GeronimusError::Singular(k));
                    }
                    let b = (&r1 * &a22 - &a12 * &r2) / &det;
                    let c = (&a11 * &r2 - &r1 * &a21) / &det;
                    (b, c)
                }
            };
            cache.push(entry);
        }
        Ok(cache[n].clone())
    }

    fn h(&self, k: usize) -> Real {
        self.base.norm_sq(k)
    }

    /// `P_n + B_n P_{n-1} + C_n P_{n-2}`.
    pub fn gg_poly(&self, n: usize) -> Poly {
        let (b, c) = self.expansion_coeffs(n);
        let mut out = self.base.monic_poly(n);
        if n >= 1 {
            out = Poly::axpy(&b, &self.base.monic_poly(n - 1), &out);
        }
        if n >= 2 {
            out = Poly::axpy(&c, &self.base.monic_poly(n - 2), &out);
        }
        out
    }

    /// `‖P_n^gg‖²_gg`: `C_n ‖P_{n-2}‖²_μ` for `n ≥ 2`, the gg zeroth moment at
    /// `n = 0`, and quadrature at `n = 1`.
    pub fn gg_norm_sq(&self, n: usize) -> (Real, Provenance) {
        match n {
            0 => (self.gg.mu0(), Provenance::ClosedForm),
            1 => (self.gg_norm_sq_quadrature(1), Provenance::Projection),
            _ => (self.expansion_coeffs(n).1 * self.h(n - 2), Provenance::ClosedForm),
        }
    }

    /// `<P_n^gg, P_n^gg>_gg` by Gauss quadrature for `μ_gg`.
    pub fn gg_norm_sq_quadrature(&self, n: usize) -> Real {
        let p = self.gg_poly(n);
        self.gg.inner(&p, &p)
    }

    /// Coefficients of `p` in the basis `P_0^gg, …, P_deg^gg`, each obtained
    /// as `<p, P_k^gg>_gg / <P_k^gg, P_k^gg>_gg` by quadrature.
    pub fn project(&self, p: &Poly) -> Vec<Real> {
        let Some(deg) = p.degree() else {
            return Vec::new();
        };
        (0..=deg)
            .map(|k| {
                let g = self.gg_poly(k);
                self.gg.inner(p, &g) / self.gg.inner(&g, &g)
            })
            .collect()
    }

    /// `σ_{n,n} = B_n - B_{n+1} + β_n - a` and
    /// `σ_{n,n-1} = C_n ‖P_{n-2}‖² / (C_{n-1} ‖P_{n-3}‖²)` for `n ≥ 3`.
    pub fn three_term(&self, n: usize) -> ThreeTerm {
        let (b_n, c_n) = self.expansion_coeffs(n);
        let (b_next, _) = self.expansion_coeffs(n + 1);
        let sigma_nn = &b_n - &b_next + self.base.beta(n) - &self.a;
        let (sigma_nm1, provenance) = match n {
            0 => (Real::zero(self.prec()), Provenance::ClosedForm),
            1 | 2 => (
                self.gg_norm_sq_quadrature(n) / self.gg_norm_sq_quadrature(n - 1),
                Provenance::Projection,
            ),
            _ => {
                let c_prev = self.expansion_coeffs(n - 1).1;
                (
                    c_n * self.h(n - 2) / (c_prev * self.h(n - 3)),
                    Provenance::ClosedForm,
                )
            }
        };
        ThreeTerm {
            sigma_nn,
            sigma_nm1,
            provenance,
        }
    }

    /// Five-term recurrence coefficients of `(x-a)² P_n^gg`; closed forms
    /// for `n ≥ 4`, projection below.
    pub fn five_term(&self, n: usize) -> FiveTerm {
        if n < 4 {
            return self.five_term_projection(n);
        }
        let (b_n, c_n) = self.expansion_coeffs(n);
        let (b_p, c_p) = self.expansion_coeffs(n + 1);
        let (b_m, c_m) = self.expansion_coeffs(n - 1);
        let c_mm = self.expansion_coeffs(n - 2).1;
        let (h0, h1, h2, h3, h4) = (self.h(n), self.h(n - 1), self.h(n - 2), self.h(n - 3), self.h(n - 4));
        let a_pp1 = (&c_p * &b_n * &h1 + &b_p * &h0) / (&c_p * &h1);
        let a_p0 = (&h0 + b_n.square() * &h1 + c_n.square() * &h2) / (&c_n * &h2);
        let a_m1 = (&b_n * &h1 + &b_m * &c_n * &h2) / (&c_m * &h3);
        let a_m2 = &c_n * &h2 / (c_mm * h4);
        FiveTerm {
            a_pp1,
            a_p0,
            a_m1,
            a_m2,
            provenance: Provenance::ClosedForm,
        }
    }

    /// Five-term coefficients of `(x-a)² P_n^gg` by projection, for any `n`.
    pub fn five_term_projection(&self, n: usize) -> FiveTerm {
        let c = self.project(&self.gg_poly(n).shift_square(&self.a));
        let at = |k: isize| -> Real {
            if k < 0 {
                Real::zero(self.prec())
            } else {
                c[k as usize].clone()
            }
        };
        let n = n as isize;
        FiveTerm {
            a_pp1: at(n + 1),
            a_p0: at(n),
            a_m1: at(n - 1),
            a_m2: at(n - 2),
            provenance: Provenance::Projection,
        }
    }

    /// `σ_{n+1,n+1} = B_{n+1} ‖P_n‖² / (C_{n+1} ‖P_{n-1}‖²)`,
    /// `σ_{n+1,n} = ‖P_n‖² / (C_n ‖P_{n-2}‖²)` for `n ≥ 2`. Below that the
    /// Jacobi instance uses its closed-form specialization and the generic
    /// instance projects.
    pub fn base_to_gg(&self, n: usize) -> Connection {
        if n >= 2 {
            let (b_p, c_p) = self.expansion_coeffs(n + 1);
            let c_n = self.expansion_coeffs(n).1;
            let h0 = self.h(n);
            return Connection {
                s_pp1: b_p * &h0 / (c_p * self.h(n - 1)),
                s_p0: &h0 / (c_n * self.h(n - 2)),
                provenance: Provenance::ClosedForm,
            };
        }
        match &*self.source {
            Source::Jacobi(p) => {
                let (s_pp1, s_p0) = jacobi_connection(p, n);
                Connection {
                    s_pp1,
                    s_p0,
                    provenance: Provenance::ClosedForm,
                }
            }
            Source::Generic(_) => self.base_to_gg_projection(n),
        }
    }

    /// Connection coefficients of `(x-a)² P_n` by projection, for any `n`.
    pub fn base_to_gg_projection(&self, n: usize) -> Connection {
        let c = self.project(&self.base.monic_poly(n).shift_square(&self.a));
        Connection {
            s_pp1: c[n + 1].clone(),
            s_p0: c[n].clone(),
            provenance: Provenance::Projection,
        }
    }
}

/// Jacobi specialization at `a = -1`, valid for all `n ≥ 0`:
/// `σ_{n+1,n+1} = 4(n+β)(n+α+β) / ((2n+α+β)(2n+α+β+2))`,
/// `σ_{n+1,n} = 4(n+β-1)(n+β)(n+α+β-1)(n+α+β) / ((2n+α+β-1)(2n+α+β)²(2n+α+β+1))`.
pub fn jacobi_connection(p: &JacobiParams, n: usize) -> (Real, Real) {
    let (a, b) = (p.alpha(), p.beta());
    let ab = a + b;
    let ni = n as i64;
    let s = &ab + 2 * ni;
    let s_pp1 = (b + ni) * (&ab + ni) * 4 / (&s * (&s + 2));
    let s_p0 = (b + (ni - 1)) * (b + ni) * (&ab + (ni - 1)) * (&ab + ni) * 4
        / ((&s - 1) * s.square() * (&s + 1));
    (s_pp1, s_p0)
}
