//! Sobolev-type orthogonal polynomials for
//!
//! `<p, q>_S = ∫ p q dμ + M p(a) q(a) + N p'(a) q'(a)`, `M, N ≥ 0`.
//!
//! The monic `Q_n` are built from the Christoffel–Darboux kernel
//! `K_{n-1}(x, y) = Σ_{i<n} P_i(x) P_i(y) / ‖P_i‖²`:
//!
//! `Q_n(x) = P_n(x) - M Q_n(a) K_{n-1}(x, a) - N Q_n'(a) K_{n-1}^{(0,1)}(x, a)`,
//!
//! where `Q_n(a)` and `Q_n'(a)` solve a 2×2 system written out with Cramer's
//! rule. The scalar formulas are exposed as free functions so the asymptotic
//! scans can feed them closed-form endpoint data without building polynomials.

use thiserror::Error;

use crate::geronimus::{GGSystem, Provenance};
use crate::opsys::Family;
use crate::poly::Poly;
use crate::real::{Precision, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SobolevError {
    #[error("{name} must be non-negative, got {value}")]
    NegativeMass { name: &'static str, value: String },
    #[error("the point a = {0} lies inside the support of the measure")]
    PointInSupport(String),
    #[error("the Sobolev determinant at degree {n} is not positive ({value}); precision exhausted or invalid masses")]
    NonPositiveDeterminant { n: usize, value: String },
    #[error("K^(0,1)(a,a) and K^(1,0)(a,a) differ at degree {n}")]
    AsymmetricKernel { n: usize },
}

/// Masses `M` (on values) and `N` (on derivatives) at the point `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolevParams {
    mass: Real,
    deriv_mass: Real,
    a: Real,
}

impl SobolevParams {
    pub fn new(mass: Real, deriv_mass: Real, a: Real) -> Result<Self, SobolevError> {
        for (name, v) in [("M", &mass), ("N", &deriv_mass)] {
            if v.is_negative() {
                return Err(SobolevError::NegativeMass {
                    name,
                    value: v.to_decimal(20),
                });
            }
        }
        Ok(SobolevParams { mass, deriv_mass, a })
    }

    /// `M`.
    pub fn mass(&self) -> &Real {
        &self.mass
    }

    /// `N`.
    pub fn deriv_mass(&self) -> &Real {
        &self.deriv_mass
    }

    pub fn a(&self) -> &Real {
        &self.a
    }

    pub fn with_prec(&self, prec: Precision) -> Self {
        SobolevParams {
            mass: self.mass.with_prec(prec),
            deriv_mass: self.deriv_mass.with_prec(prec),
            a: self.a.with_prec(prec),
        }
    }
}

/// `K_{n-1}^{(k,s)}(a, a)` for `k, s ∈ {0, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelAtA {
    pub k00: Real,
    pub k01: Real,
    pub k10: Real,
    pub k11: Real,
}

impl KernelAtA {
    pub fn zero(prec: Precision) -> Self {
        let z = Real::zero(prec);
        KernelAtA {
            k00: z.clone(),
            k01: z.clone(),
            k10: z.clone(),
            k11: z,
        }
    }
}

/// `Q_n(a)`, `Q_n'(a)` and the determinant
/// `D = (1 + M K00)(1 + N K11) - M N K01 K10`.
#[derive(Debug, Clone, PartialEq)]
pub struct QEndpointData {
    pub q_at_a: Real,
    pub dq_at_a: Real,
    pub denom: Real,
}

/// Cramer solution of
///
/// ```text
/// (1 + M K00) q  +  N K01 q' = P(a)
///  M K10 q  + (1 + N K11) q' = P'(a)
/// ```
///
/// `n` is only used in error reports.
pub fn solve_endpoint(
    sp: &SobolevParams,
    kern: &KernelAtA,
    p_a: &Real,
    dp_a: &Real,
    n: usize,
) -> Result<QEndpointData, SobolevError> {
    if kern.k01 != kern.k10 {
        return Err(SobolevError::AsymmetricKernel { n });
    }
    let (m, nn) = (&sp.mass, &sp.deriv_mass);
    let d00 = m * &kern.k00 + 1;
    let d11 = nn * &kern.k11 + 1;
    let denom = &d00 * &d11 - m * nn * &kern.k01 * &kern.k10;
    if !denom.is_positive() {
        return Err(SobolevError::NonPositiveDeterminant {
            n,
            value: denom.to_decimal(20),
        });
    }
    let q_at_a = (p_a * &d11 - nn * &kern.k01 * dp_a) / &denom;
    let dq_at_a = (&d00 * dp_a - m * &kern.k10 * p_a) / &denom;
    Ok(QEndpointData {
        q_at_a,
        dq_at_a,
        denom,
    })
}

/// `Q^{(j)}(a) = P^{(j)}(a) - M Q(a) K^{(0,j)}(a,a) - N Q'(a) K^{(1,j)}(a,a)`.
pub fn q_deriv_from(sp: &SobolevParams, q: &QEndpointData, p_j: &Real, k0j: &Real, k1j: &Real) -> Real {
    p_j - &sp.mass * &q.q_at_a * k0j - &sp.deriv_mass * &q.dq_at_a * k1j
}

/// `‖Q‖²_S = ‖P‖²_μ + M Q(a) P(a) + N Q'(a) P'(a)`.
pub fn q_norm_from(sp: &SobolevParams, norm_p: &Real, p_a: &Real, dp_a: &Real, q: &QEndpointData) -> Real {
    norm_p + &sp.mass * &q.q_at_a * p_a + &sp.deriv_mass * &q.dq_at_a * dp_a
}

/// Coefficients of `(x-a)² Q_n` on `P_{n+2}^gg … P_{n-2}^gg`.
#[derive(Debug, Clone, PartialEq)]
pub struct QQConnection {
    pub a_pp1: Real,
    pub a_p0: Real,
    pub a_m1: Real,
    pub a_m2: Real,
    pub provenance: Provenance,
}

/// The Sobolev inner product over a family `F` of orthogonal polynomials
/// for `μ`. Results are always reported for the monic `Q_n`, whatever the
/// normalization of `F`.
pub struct SobolevSystem<F> {
    family: F,
    params: SobolevParams,
}

impl<F: Family> SobolevSystem<F> {
    /// Rejects `a` strictly inside the support interval of the measure.
    /// Endpoints of the support are allowed.
    pub fn new(family: F, params: SobolevParams) -> Result<Self, SobolevError> {
        if let Some((lo, hi)) = family.system().support() {
            if params.a() > lo && params.a() < hi {
                return Err(SobolevError::PointInSupport(params.a().to_decimal(20)));
            }
        }
        let params = params.with_prec(family.prec());
        Ok(SobolevSystem { family, params })
    }

    pub fn family(&self) -> &F {
        &self.family
    }

    pub fn params(&self) -> &SobolevParams {
        &self.params
    }

    pub fn prec(&self) -> Precision {
        self.family.prec()
    }

    fn a(&self) -> &Real {
        &self.params.a
    }

    /// `K_order^{(k,s)}(x, y) = Σ_{i ≤ order} P_i^{(k)}(x) P_i^{(s)}(y) / ‖P_i‖²`.
    pub fn kernel_deriv(&self, order: usize, k: usize, s: usize, x: &Real, y: &Real) -> Real {
        (0..=order).fold(Real::zero(self.prec()), |acc, i| {
            acc + self.family.deriv_at(i, k, x) * self.family.deriv_at(i, s, y) / self.family.norm_sq(i)
        })
    }

    /// `K_{n-1}^{(k,s)}(a, a)` for `k, s ≤ 1`, zero when `n = 0`.
    pub fn kernel_at_a(&self, n: usize) -> KernelAtA {
        let mut kern = KernelAtA::zero(self.prec());
        for i in 0..n {
            let v = self.family.deriv_at(i, 0, self.a());
            let d = self.family.deriv_at(i, 1, self.a());
            let h = self.family.norm_sq(i);
            kern.k00 += &v * &v / &h;
            kern.k01 += &v * &d / &h;
            kern.k10 += &d * &v / &h;
            kern.k11 += &d * &d / &h;
        }
        kern
    }

    /// `K_{n-1}^{(j,0)}(a,a)` and `K_{n-1}^{(j,1)}(a,a)`.
    fn kernel_column(&self, n: usize, j: usize) -> (Real, Real) {
        let z = Real::zero(self.prec());
        (0..n).fold((z.clone(), z), |(k0, k1), i| {
            let pj = self.family.deriv_at(i, j, self.a());
            let h = self.family.norm_sq(i);
            let v = self.family.deriv_at(i, 0, self.a());
            let d = self.family.deriv_at(i, 1, self.a());
            (k0 + &pj * v / &h, k1 + pj * d / h)
        })
    }

    /// `x ↦ K_order^{(0,s)}(x, y)` as a polynomial.
    pub fn kernel_poly(&self, order: usize, s: usize, y: &Real) -> Poly {
        (0..=order).fold(Poly::zero(), |acc, i| {
            let c = self.family.deriv_at(i, s, y) / self.family.norm_sq(i);
            Poly::axpy(&c, &self.family.member(i), &acc)
        })
    }

    fn kernel_poly_below(&self, n: usize, s: usize) -> Poly {
        if n == 0 {
            Poly::zero()
        } else {
            self.kernel_poly(n - 1, s, self.a())
        }
    }

    /// `(P̂(a), P̂'(a))` in the family's normalization, and the scale `c_n`.
    fn family_endpoint(&self, n: usize) -> (Real, Real, Real) {
        (
            self.family.deriv_at(n, 0, self.a()),
            self.family.deriv_at(n, 1, self.a()),
            self.family.leading(n),
        )
    }

    /// `Q_n(a)`, `Q_n'(a)` and the determinant for the monic `Q_n`.
    pub fn q_endpoint(&self, n: usize) -> Result<QEndpointData, SobolevError> {
        let (pa, dpa, c) = self.family_endpoint(n);
        let q = solve_endpoint(&self.params, &self.kernel_at_a(n), &pa, &dpa, n)?;
        Ok(QEndpointData {
            q_at_a: q.q_at_a / &c,
            dq_at_a: q.dq_at_a / &c,
            denom: q.denom,
        })
    }

    /// Monic `Q_n` from the kernel representation.
    pub fn q_poly(&self, n: usize) -> Result<Poly, SobolevError> {
        let q = self.q_endpoint(n)?;
        let p = self.family.system().monic_poly(n);
        let k0 = self.kernel_poly_below(n, 0);
        let k1 = self.kernel_poly_below(n, 1);
        let out = Poly::axpy(&-(&self.params.mass * &q.q_at_a), &k0, &p);
        Ok(Poly::axpy(&-(&self.params.deriv_mass * &q.dq_at_a), &k1, &out))
    }

    /// Monic `Q_n` as the 3×3 determinant
    ///
    /// ```text
    /// | P_n(x)   M K(x,a)   N K^(0,1)(x,a) |
    /// | P_n(a)   1 + M K00  N K01          |  /  D
    /// | P_n'(a)  M K10      1 + N K11      |
    /// ```
    ///
    /// expanded by cofactors along the first row.
    pub fn q_poly_determinant(&self, n: usize) -> Result<Poly, SobolevError> {
        let (m, nn) = (&self.params.mass, &self.params.deriv_mass);
        let kern = self.kernel_at_a(n);
        let (pa, dpa, c) = self.family_endpoint(n);
        let r2 = [pa, m * &kern.k00 + 1, nn * &kern.k01];
        let r3 = [dpa, m * &kern.k10, nn * &kern.k11 + 1];
        let minor = |i: usize, j: usize| &r2[i] * &r3[j] - &r2[j] * &r3[i];
        let (c11, c12, c13) = (minor(1, 2), minor(0, 2), minor(0, 1));
        if !c11.is_positive() {
            return Err(SobolevError::NonPositiveDeterminant {
                n,
                value: c11.to_decimal(20),
            });
        }
        let row1 = [
            self.family.member(n),
            self.kernel_poly_below(n, 0).scale(m),
            self.kernel_poly_below(n, 1).scale(nn),
        ];
        let det = row1[0].scale(&c11);
        let det = Poly::axpy(&-c12, &row1[1], &det);
        let det = Poly::axpy(&c13, &row1[2], &det);
        Ok(det.scale(&(c11 * c).recip()))
    }

    /// `Q_n^{(j)}(a)` from endpoint data only.
    pub fn q_deriv_at_a(&self, n: usize, j: usize) -> Result<Real, SobolevError> {
        let (pa, dpa, c) = self.family_endpoint(n);
        let q = solve_endpoint(&self.params, &self.kernel_at_a(n), &pa, &dpa, n)?;
        let pj = self.family.deriv_at(n, j, self.a());
        let (k0j, k1j) = self.kernel_column(n, j);
        Ok(q_deriv_from(&self.params, &q, &pj, &k0j, &k1j) / c)
    }

    /// `<p, q>_μ + M p(a) q(a) + N p'(a) q'(a)`.
    pub fn inner(&self, p: &Poly, q: &Poly) -> Real {
        let a = self.a();
        let (dp, dq) = (p.derivative(1), q.derivative(1));
        self.family.system().inner(p, q)
            + &self.params.mass * p.eval(a) * q.eval(a)
            + &self.params.deriv_mass * dp.eval(a) * dq.eval(a)
    }

    /// `‖Q_n‖²_S` for the monic `Q_n`, from endpoint data only.
    pub fn q_norm_sq(&self, n: usize) -> Result<Real, SobolevError> {
        let (pa, dpa, c) = self.family_endpoint(n);
        let q = solve_endpoint(&self.params, &self.kernel_at_a(n), &pa, &dpa, n)?;
        let norm = q_norm_from(&self.params, &self.family.norm_sq(n), &pa, &dpa, &q);
        Ok(norm / c.square())
    }

    /// Monic `P_k(a)` and `P_k'(a)`; zero for negative `k`.
    fn monic_at_a(&self, k: isize) -> (Real, Real) {
        if k < 0 {
            let z = Real::zero(self.prec());
            return (z.clone(), z);
        }
        let (v, d, c) = self.family_endpoint(k as usize);
        (v / &c, d / c)
    }

    /// `P_k^gg(a)` and its derivative, through the expansion in the base.
    fn gg_at_a(&self, gg: &GGSystem, k: usize) -> (Real, Real) {
        let (b, c) = gg.expansion_coeffs(k);
        let k = k as isize;
        let (v0, d0) = self.monic_at_a(k);
        let (v1, d1) = self.monic_at_a(k - 1);
        let (v2, d2) = self.monic_at_a(k - 2);
        (v0 + &b * v1 + &c * v2, d0 + b * d1 + c * d2)
    }

    /// `<Q_n, P_k^gg>_μ = -M Q_n(a) P_k^gg(a) - N Q_n'(a) P_k^gg'(a)` for `k < n`.
    fn mass_term(&self, q: &QEndpointData, v: &Real, d: &Real) -> Real {
        -(&self.params.mass * &q.q_at_a * v) - &self.params.deriv_mass * &q.dq_at_a * d
    }

    /// Leading coefficients of `(x-a)² Q_n` in the gg basis: closed forms
    /// for `n ≥ 4`, projection below. The family's measure must be the base
    /// measure of `gg`.
    ///
    /// When `M` or `N` is nonzero the expansion does not stop at `P_{n-2}^gg`;
    /// the remaining coefficients are given by [`SobolevSystem::qq_tail`].
    pub fn qq_connection(&self, gg: &GGSystem, n: usize) -> Result<QQConnection, SobolevError> {
        if n < 4 {
            return self.qq_projection(gg, n);
        }
        let q = self.q_endpoint(n)?;
        let h = |k: usize| gg.base().norm_sq(k);
        let (b_n, c_n) = gg.expansion_coeffs(n);
        let (b_p, c_p) = gg.expansion_coeffs(n + 1);
        let c_m = gg.expansion_coeffs(n - 1).1;
        let c_mm = gg.expansion_coeffs(n - 2).1;
        let n_i = n as isize;
        let (v1, d1) = self.monic_at_a(n_i - 1);
        let (v2, d2) = self.monic_at_a(n_i - 2);
        // <Q_n, P_{n-1}>_μ and <Q_n, P_{n-2}>_μ
        let t1 = self.mass_term(&q, &v1, &d1);
        let t2 = self.mass_term(&q, &v2, &d2);
        let a_pp1 = (&b_p * h(n) + &c_p * &t1) / (&c_p * h(n - 1));
        let a_p0 = (h(n) + &t1 * &b_n + &t2 * &c_n) / (&c_n * h(n - 2));
        let (g1, gd1) = self.gg_at_a(gg, n - 1);
        let (g2, gd2) = self.gg_at_a(gg, n - 2);
        let a_m1 = self.mass_term(&q, &g1, &gd1) / (c_m * h(n - 3));
        let a_m2 = self.mass_term(&q, &g2, &gd2) / (c_mm * h(n - 4));
        Ok(QQConnection {
            a_pp1,
            a_p0,
            a_m1,
            a_m2,
            provenance: Provenance::ClosedForm,
        })
    }

    /// The same coefficients by projecting `(x-a)² Q_n` onto the gg basis.
    pub fn qq_projection(&self, gg: &GGSystem, n: usize) -> Result<QQConnection, SobolevError> {
        let c = gg.project(&self.q_poly(n)?.shift_square(self.a()));
        let at = |k: isize| {
            if k < 0 {
                Real::zero(self.prec())
            } else {
                c[k as usize].clone()
            }
        };
        let n = n as isize;
        Ok(QQConnection {
            a_pp1: at(n + 1),
            a_p0: at(n),
            a_m1: at(n - 1),
            a_m2: at(n - 2),
            provenance: Provenance::Projection,
        })
    }

    /// Coefficients of `P_k^gg`, `k = 0..=n-3`, in `(x-a)² Q_n`:
    /// `(-M Q_n(a) P_k^gg(a) - N Q_n'(a) P_k^gg'(a)) / ‖P_k^gg‖²_gg`.
    pub fn qq_tail(&self, gg: &GGSystem, n: usize) -> Result<Vec<Real>, SobolevError> {
        if n < 3 {
            return Ok(Vec::new());
        }
        let q = self.q_endpoint(n)?;
        Ok((0..=n - 3)
            .map(|k| {
                let (v, d) = self.gg_at_a(gg, k);
                self.mass_term(&q, &v, &d) / gg.gg_norm_sq(k).0
            })
            .collect())
    }
}
