//! Closed-form data for the Jacobi weight `(1-x)^α (1+x)^β` on `[-1, 1]`.
//!
//! Two normalizations appear: the monic polynomials `P_n` produced by
//! [`jacobi_system`], and the scaled family
//! `P̃_n = (n+α+β+1)_n / (2^n (α+1)_n) · P_n`, for which `P̃_n(1) = 1`.
//! Endpoint values, derivatives and norms of the scaled family are computed
//! from Gamma-function closed forms and never by evaluating high-degree
//! polynomials, so scans can run to very large `n`.

use thiserror::Error;

use crate::opsys::{Family, OrthoSystem};
use crate::poly::Poly;
use crate::real::{Precision, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JacobiError {
    #[error("Jacobi parameters require alpha > -1 and beta > -1 (got alpha={alpha}, beta={beta})")]
    Domain { alpha: String, beta: String },
    #[error("the double Geronimus transform requires beta > 1 and alpha > -1 (got beta={0})")]
    GgDomain(String),
    #[error("Gamma function pole at {0}")]
    GammaPole(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobiParams {
    alpha: Real,
    beta: Real,
}

impl JacobiParams {
    pub fn new(alpha: Real, beta: Real) -> Result<Self, JacobiError> {
        if !(alpha > -1 && beta > -1) {
            return Err(JacobiError::Domain {
                alpha: alpha.to_decimal(20),
                beta: beta.to_decimal(20),
            });
        }
        let prec = alpha.prec().max(beta.prec());
        Ok(JacobiParams {
            alpha: alpha.with_prec(prec),
            beta: beta.with_prec(prec),
        })
    }

    /// `(α, β) = (an/ad, bn/bd)`.
    pub fn from_ratios(a: (i64, i64), b: (i64, i64), prec: Precision) -> Result<Self, JacobiError> {
        Self::new(Real::ratio(a.0, a.1, prec), Real::ratio(b.0, b.1, prec))
    }

    pub fn alpha(&self) -> &Real {
        &self.alpha
    }

    pub fn beta(&self) -> &Real {
        &self.beta
    }

    pub fn prec(&self) -> Precision {
        self.alpha.prec()
    }

    pub fn with_prec(&self, prec: Precision) -> Self {
        JacobiParams {
            alpha: self.alpha.with_prec(prec),
            beta: self.beta.with_prec(prec),
        }
    }

    /// Checks `β > 1`, needed for `(1+x)^{β-2}` to be integrable.
    pub fn require_gg(&self) -> Result<(), JacobiError> {
        if self.beta > 1 {
            Ok(())
        } else {
            Err(JacobiError::GgDomain(self.beta.to_decimal(20)))
        }
    }

    /// `(α, β-2)`: the parameters of the double Geronimus measure at `a = -1`.
    pub fn gg_shift(&self) -> Result<Self, JacobiError> {
        self.require_gg()?;
        Self::new(self.alpha.clone(), &self.beta - 2)
    }

    /// `(α+k, β+k)`.
    pub fn raised(&self, k: usize) -> Self {
        let k = k as i64;
        JacobiParams {
            alpha: &self.alpha + k,
            beta: &self.beta + k,
        }
    }

    fn ab(&self) -> Real {
        &self.alpha + &self.beta
    }
}

/// Monic recurrence coefficient `β_n = (β²-α²) / ((2n+α+β)(2n+α+β+2))`.
pub fn recurrence_beta(p: &JacobiParams, n: usize) -> Real {
    let (a, b, ab) = (&p.alpha, &p.beta, p.ab());
    if n == 0 {
        // (β²-α²)/((α+β)(α+β+2)) with the α+β factor cancelled.
        return (b - a) / (&ab + 2);
    }
    let s = &ab + (2 * n) as i64;
    (b.square() - a.square()) / (&s * (&s + 2))
}

/// Monic recurrence coefficient
/// `γ_n = 4n(n+α)(n+β)(n+α+β) / ((2n+α+β-1)(2n+α+β)²(2n+α+β+1))`, `n ≥ 1`.
pub fn recurrence_gamma(p: &JacobiParams, n: usize) -> Real {
    assert!(n >= 1, "gamma_n is defined for n >= 1");
    let (a, b, ab) = (&p.alpha, &p.beta, p.ab());
    let ni = n as i64;
    let s = &ab + 2 * ni;
    if n == 1 {
        // The (n+α+β) factor cancels against (2n+α+β-1) at n = 1.
        return (a + 1) * (b + 1) * 4 / (s.square() * (&s + 1));
    }
    let num = (a + ni) * (b + ni) * (&ab + ni) * (4 * ni);
    let den = (&s - 1) * s.square() * (&s + 1);
    num / den
}

/// `μ₀ = 2^{α+β+1} Γ(α+1) Γ(β+1) / Γ(α+β+2)`.
pub fn zeroth_moment(p: &JacobiParams) -> Real {
    let ab = p.ab();
    let two = Real::from_i64(2, p.prec());
    two.powr(&(&ab + 1)) * (&p.alpha + 1).gamma() * (&p.beta + 1).gamma() / (&ab + 2).gamma()
}

/// Monic Jacobi system on `[-1, 1]`.
pub fn jacobi_system(p: &JacobiParams) -> OrthoSystem {
    let prec = p.prec();
    let (pb, pg) = (p.clone(), p.clone());
    let label = format!(
        "jacobi(alpha={}, beta={})",
        p.alpha.to_decimal(12),
        p.beta.to_decimal(12)
    );
    OrthoSystem::new(
        label,
        prec,
        zeroth_moment(p),
        move |n| recurrence_beta(&pb, n),
        move |n| recurrence_gamma(&pg, n),
    )
    .expect("Jacobi zeroth moment is positive for alpha, beta > -1")
    .with_support(Real::from_i64(-1, prec), Real::one(prec))
}

/// Γ(x), rejecting the poles at non-positive integers.
pub fn gamma_fn(x: &Real) -> Result<Real, JacobiError> {
    if x.is_integer() && !x.is_positive() {
        return Err(JacobiError::GammaPole(x.to_decimal(20)));
    }
    Ok(x.gamma())
}

/// Rising factorial `(x)_n = x(x+1)⋯(x+n-1)`, `(x)_0 = 1`.
pub fn pochhammer(x: &Real, n: usize) -> Real {
    if n > 64 && x.is_positive() {
        return (x + n as i64).gamma() / x.gamma();
    }
    (0..n).fold(Real::one(x.prec()), |acc, i| acc * (x + i as i64))
}

/// `n(n-1)⋯(n-k+1)`, zero when `k > n`.
fn falling(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    ((n - k + 1)..=n).map(|t| t as i64).product()
}

/// Normalization constant `(n+α+β+1)_n / (2^n (α+1)_n)` of the scaled family.
pub fn scaled_factor(p: &JacobiParams, n: usize) -> Real {
    let top = pochhammer(&(p.ab() + (n as i64 + 1)), n);
    let bottom = pochhammer(&(&p.alpha + 1), n);
    (top / bottom).mul_pow2(-(n as i32))
}

/// Gamma values shared by every endpoint quantity of degree `n`.
struct EndpointGammas {
    /// Γ(n+β+1)/Γ(n+α+1)
    beta_over_alpha: Real,
    /// Γ(n+1)Γ(n+β+1) / (Γ(n+α+1)Γ(n+α+β+1)), or `None` at n = 0 where the
    /// closed form is replaced by μ₀.
    norm_ratio: Option<Real>,
}

impl EndpointGammas {
    fn new(p: &JacobiParams, n: usize, with_norm: bool) -> Self {
        let ni = n as i64;
        let ga = (&p.alpha + (ni + 1)).gamma();
        let gb = (&p.beta + (ni + 1)).gamma();
        let norm_ratio = (with_norm && n > 0).then(|| {
            let g1 = Real::from_i64(ni + 1, p.prec()).gamma();
            let gab = (p.ab() + (ni + 1)).gamma();
            &g1 * &gb / (&ga * gab)
        });
        EndpointGammas {
            beta_over_alpha: gb / ga,
            norm_ratio,
        }
    }
}

fn derivative_from(p: &JacobiParams, n: usize, k: usize, g: &EndpointGammas) -> Real {
    if k > n {
        return Real::zero(p.prec());
    }
    // n!/(α+1)_n · (n+α+β+1)_k / 2^k · (-1)^{n-k} C(n+β, n-k), with the
    // factorials collapsed into Γ(n+β+1)/Γ(n+α+1) and n!/(n-k)!.
    let lead = (&p.alpha + 1).gamma() / (&p.beta + (k as i64 + 1)).gamma();
    let rising = pochhammer(&(p.ab() + (n as i64 + 1)), k);
    let v = lead * rising * falling(n, k) * &g.beta_over_alpha;
    let v = v.mul_pow2(-(k as i32));
    if (n - k) % 2 == 1 {
        -v
    } else {
        v
    }
}

fn norm_from(p: &JacobiParams, n: usize, g: &EndpointGammas) -> Real {
    match &g.norm_ratio {
        None => zeroth_moment(p),
        Some(r) => {
            let two = Real::from_i64(2, p.prec());
            let ab = p.ab();
            two.powr(&(&ab + 1)) * (&p.alpha + 1).gamma().square() * r / (ab + (2 * n as i64 + 1))
        }
    }
}

/// `P̃_n(-1) = n!/(α+1)_n · (-1)^n C(n+β, n)`.
pub fn scaled_value_minus1(p: &JacobiParams, n: usize) -> Real {
    scaled_derivative_minus1(p, n, 0)
}

/// k-th derivative of `P̃_n` at `-1`:
/// `n!/(α+1)_n · Γ(α+β+n+1+k)/(2^k Γ(α+β+n+1)) · (-1)^{n-k} C(n+β, n-k)`.
pub fn scaled_derivative_minus1(p: &JacobiParams, n: usize, k: usize) -> Real {
    derivative_from(p, n, k, &EndpointGammas::new(p, n, false))
}

/// `‖P̃_n‖²_μ`.
pub fn scaled_norm_sq(p: &JacobiParams, n: usize) -> Real {
    norm_from(p, n, &EndpointGammas::new(p, n, true))
}

/// Endpoint data of `P̃_n` at `-1`: derivatives of orders `0..=kmax` and the
/// squared norm, sharing one set of Gamma evaluations.
#[derive(Debug, Clone)]
pub struct EndpointRow {
    pub derivs: Vec<Real>,
    pub norm_sq: Real,
}

pub fn endpoint_row(p: &JacobiParams, n: usize, kmax: usize) -> EndpointRow {
    let g = EndpointGammas::new(p, n, true);
    EndpointRow {
        derivs: (0..=kmax).map(|k| derivative_from(p, n, k, &g)).collect(),
        norm_sq: norm_from(p, n, &g),
    }
}

/// Coefficients of `P_n^{(α,β-2)} = P_n^{(α,β)} + B_n P_{n-1}^{(α,β)} + C_n P_{n-2}^{(α,β)}`:
///
/// `B_n = 4n(α+n) / ((2n+α+β-2)(2n+α+β))`,
/// `C_n = 4n(n-1)(α+n)(α+n-1) / ((2n+α+β-3)(2n+α+β-2)²(2n+α+β-1))`.
pub fn gg_expansion_coeffs(p: &JacobiParams, n: usize) -> Result<(Real, Real), JacobiError> {
    p.require_gg()?;
    let prec = p.prec();
    let ni = n as i64;
    let s = p.ab() + 2 * ni;
    let b = if n >= 1 {
        (&p.alpha + ni) * (4 * ni) / ((&s - 2) * &s)
    } else {
        Real::zero(prec)
    };
    let c = if n >= 2 {
        (&p.alpha + ni) * (&p.alpha + (ni - 1)) * (4 * ni * (ni - 1))
            / ((&s - 3) * (&s - 2).square() * (&s - 1))
    } else {
        Real::zero(prec)
    };
    Ok((b, c))
}

/// `∫ x^k (1-x)^α (1+x)^β dx` from Beta integrals, via `x = (1+x) - 1`.
/// Independent of the recurrence; used to validate quadrature.
pub fn exact_moment(p: &JacobiParams, k: usize) -> Real {
    let prec = p.prec();
    let two = Real::from_i64(2, prec);
    let mut acc = Real::zero(prec);
    let mut binom = Real::one(prec);
    for j in 0..=k {
        if j > 0 {
            binom = binom * (k - j + 1) as i64 / j as i64;
        }
        let bj = &p.beta + j as i64;
        // 2^{α+β+j+1} B(α+1, β+j+1)
        let beta_int = two.powr(&(&p.alpha + &bj + 1)) * (&p.alpha + 1).gamma() * (&bj + 1).gamma()
            / (&p.alpha + &bj + 2).gamma();
        let term = &binom * beta_int;
        if (k - j) % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    acc
}

/// The scaled family `P̃_n` as a [`Family`], with closed-form derivatives at `-1`.
#[derive(Debug, Clone)]
pub struct JacobiBasis {
    params: JacobiParams,
    system: OrthoSystem,
}

impl JacobiBasis {
    pub fn new(params: &JacobiParams) -> Self {
        JacobiBasis {
            params: params.clone(),
            system: jacobi_system(params),
        }
    }

    pub fn params(&self) -> &JacobiParams {
        &self.params
    }
}

impl Family for JacobiBasis {
    fn system(&self) -> &OrthoSystem {
        &self.system
    }

    fn leading(&self, n: usize) -> Real {
        scaled_factor(&self.params, n)
    }

    fn norm_sq(&self, n: usize) -> Real {
        scaled_norm_sq(&self.params, n)
    }

    fn deriv_at(&self, n: usize, k: usize, x: &Real) -> Real {
        if *x == -1 {
            scaled_derivative_minus1(&self.params, n, k)
        } else {
            self.member(n).derivative(k).eval(x)
        }
    }

    fn member(&self, n: usize) -> Poly {
        self.system.monic_poly(n).scale(&self.leading(n))
    }
}
