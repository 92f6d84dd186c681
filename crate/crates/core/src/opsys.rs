//! Monic orthogonal polynomial systems defined by a three-term recurrence
//!
//! `x P_n = P_{n+1} + β_n P_n + γ_n P_{n-1}`, `P_0 = 1`, `P_{-1} = 0`.
//!
//! Besides the polynomials themselves this module provides the squared
//! norms `‖P_n‖² = μ₀ γ_1 ⋯ γ_n`, Gauss rules computed at working precision
//! (Sturm bisection followed by Newton polishing of the zeros of `P_m`,
//! weights from the Christoffel function), measure inner products and a
//! brute-force Gram–Schmidt oracle that works for any bilinear form.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::poly::Poly;
use crate::real::{Precision, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpsysError {
    #[error("zeroth moment must be positive, got {0:?}")]
    NonPositiveMoment(Real),
    #[error("recurrence coefficient gamma_{n} = {value:?} is not positive")]
    NonPositiveGamma { n: usize, value: Real },
    #[error("Gram-Schmidt produced a non-positive squared norm at degree {degree}")]
    NonPositiveNorm { degree: usize },
    #[error("Gauss rule needs at least one node")]
    EmptyRule,
}

pub type CoeffFn = dyn Fn(usize) -> Real + Send + Sync;

struct SystemData {
    label: String,
    prec: Precision,
    mu0: Real,
    beta: Box<CoeffFn>,
    gamma: Box<CoeffFn>,
    polys: Mutex<Vec<Poly>>,
    rules: Mutex<BTreeMap<usize, Arc<QuadratureRule>>>,
}

/// A positive-definite measure described by its recurrence coefficients.
///
/// Cloning is cheap; clones share the cached polynomials and Gauss rules.
#[derive(Clone)]
pub struct OrthoSystem {
    data: Arc<SystemData>,
    support: Option<(Real, Real)>,
}

impl std::fmt::Debug for OrthoSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OrthoSystem")
            .field("label", &self.data.label)
            .field("prec", &self.data.prec)
            .field("mu0", &self.data.mu0)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<Real>,
    pub weights: Vec<Real>,
}

impl QuadratureRule {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate(&self, f: impl Fn(&Real) -> Real) -> Real {
        let mut acc = Real::zero(self.weights[0].prec());
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(x);
        }
        acc
    }
}

impl OrthoSystem {
    /// `beta(n)` is queried for `n ≥ 0`, `gamma(n)` for `n ≥ 1`.
    pub fn new(
        label: impl Into<String>,
        prec: Precision,
        mu0: Real,
        beta: impl Fn(usize) -> Real + Send + Sync + 'static,
        gamma: impl Fn(usize) -> Real + Send + Sync + 'static,
    ) -> Result<Self, OpsysError> {
        if !mu0.is_positive() {
            return Err(OpsysError::NonPositiveMoment(mu0));
        }
        Ok(OrthoSystem {
            data: Arc::new(SystemData {
                label: label.into(),
                prec,
                mu0: mu0.with_prec(prec),
                beta: Box::new(beta),
                gamma: Box::new(gamma),
                polys: Mutex::new(vec![Poly::one(prec)]),
                rules: Mutex::new(BTreeMap::new()),
            }),
            support: None,
        })
    }

    /// Recurrence of the discrete measure `Σ w_i δ(x - x_i)` by the Stieltjes
    /// procedure, truncated to degrees `0..len`. Coefficients past the table
    /// are not available and querying them panics.
    pub fn from_discrete(
        label: impl Into<String>,
        nodes: &[Real],
        weights: &[Real],
        len: usize,
    ) -> Result<Self, OpsysError> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(OpsysError::EmptyRule);
        }
        let prec = weights[0].prec();
        let len = len.min(nodes.len());
        let mut betas = Vec::with_capacity(len);
        let mut gammas = vec![Real::zero(prec)];
        let mut cur = vec![Real::one(prec); nodes.len()];
        let mut prev = vec![Real::zero(prec); nodes.len()];
        let mut norm_prev = Real::one(prec);
        for n in 0..len {
            let norm = weights
                .iter()
                .zip(&cur)
                .fold(Real::zero(prec), |acc, (w, p)| acc + w * p.square());
            if !norm.is_positive() {
                return Err(OpsysError::NonPositiveNorm { degree: n });
            }
            let first = weights
                .iter()
                .zip(&cur)
                .zip(nodes)
                .fold(Real::zero(prec), |acc, ((w, p), x)| acc + w * p.square() * x);
            let b = first / &norm;
            let g = if n == 0 { Real::zero(prec) } else { &norm / &norm_prev };
            if n > 0 {
                gammas.push(g.clone());
            }
            let next: Vec<Real> = nodes
                .iter()
                .zip(cur.iter().zip(&prev))
                .map(|(x, (p, q))| (x - &b) * p - &g * q)
                .collect();
            betas.push(b);
            prev = std::mem::replace(&mut cur, next);
            norm_prev = norm;
        }
        let mu0 = weights.iter().fold(Real::zero(prec), |acc, w| acc + w);
        Self::new(
            label,
            prec,
            mu0,
            move |n| betas[n].clone(),
            move |n| gammas[n].clone(),
        )
    }

    /// Records the support interval of the measure. Only used for domain
    /// checks on points that must lie outside it.
    pub fn with_support(mut self, lo: Real, hi: Real) -> Self {
        self.support = Some((lo, hi));
        self
    }

    pub fn label(&self) -> &str {
        &self.data.label
    }

    pub fn prec(&self) -> Precision {
        self.data.prec
    }

    pub fn mu0(&self) -> Real {
        self.data.mu0.clone()
    }

    pub fn support(&self) -> Option<&(Real, Real)> {
        self.support.as_ref()
    }

    pub fn beta(&self, n: usize) -> Real {
        (self.data.beta)(n)
    }

    /// `γ_n` for `n ≥ 1`; `γ_0 = 0` by convention.
    pub fn gamma(&self, n: usize) -> Real {
        if n == 0 {
            Real::zero(self.prec())
        } else {
            (self.data.gamma)(n)
        }
    }

    /// Monic `P_n` from the forward recurrence.
    pub fn monic_poly(&self, n: usize) -> Poly {
        self.extend_polys(n);
        self.data.polys.lock().unwrap()[n].clone()
    }

    /// `P_0, …, P_n`.
    pub fn monic_polys(&self, n: usize) -> Vec<Poly> {
        self.extend_polys(n);
        self.data.polys.lock().unwrap()[..=n].to_vec()
    }

    fn extend_polys(&self, n: usize) {
        let mut polys = self.data.polys.lock().unwrap();
        while polys.len() <= n {
            let k = polys.len() - 1;
            let pk = &polys[k];
            let mut next = pk.shift_mul(&self.beta(k));
            if k > 0 {
                next = Poly::axpy(&-self.gamma(k), &polys[k - 1], &next);
            }
            polys.push(next);
        }
    }

    /// `‖P_n‖² = μ₀ γ_1 ⋯ γ_n`.
    pub fn norm_sq(&self, n: usize) -> Real {
        (1..=n).fold(self.mu0(), |acc, k| acc * self.gamma(k))
    }

    /// Values `P_0(x), …, P_n(x)` by the recurrence.
    pub fn eval_all(&self, n: usize, x: &Real) -> Vec<Real> {
        let mut vals = Vec::with_capacity(n + 1);
        vals.push(Real::one(self.prec()));
        if n == 0 {
            return vals;
        }
        vals.push(x - self.beta(0));
        for k in 1..n {
            let next = (x - self.beta(k)) * &vals[k] - self.gamma(k) * &vals[k - 1];
            vals.push(next);
        }
        vals
    }

    /// m-point Gauss rule for the measure. Cached per `m`.
    pub fn gauss_rule(&self, m: usize) -> Result<Arc<QuadratureRule>, OpsysError> {
        if m == 0 {
            return Err(OpsysError::EmptyRule);
        }
        if let Some(rule) = self.data.rules.lock().unwrap().get(&m) {
            return Ok(rule.clone());
        }
        let rule = Arc::new(self.build_gauss_rule(m)?);
        self.data.rules.lock().unwrap().insert(m, rule.clone());
        Ok(rule)
    }

    fn build_gauss_rule(&self, m: usize) -> Result<QuadratureRule, OpsysError> {
        let prec = self.prec();
        let betas: Vec<Real> = (0..m).map(|k| self.beta(k)).collect();
        let gammas: Vec<Real> = (0..m).map(|k| self.gamma(k)).collect();
        for (k, g) in gammas.iter().enumerate().skip(1) {
            if !g.is_positive() {
                return Err(OpsysError::NonPositiveGamma {
                    n: k,
                    value: g.clone(),
                });
            }
        }
        let offdiag: Vec<Real> = gammas.iter().map(Real::sqrt).collect();

        // Gershgorin enclosure of the spectrum of the Jacobi matrix.
        let zero = Real::zero(prec);
        let mut lo: Option<Real> = None;
        let mut hi: Option<Real> = None;
        for k in 0..m {
            let left = if k > 0 { offdiag[k].clone() } else { zero.clone() };
            let right = if k + 1 < m {
                offdiag[k + 1].clone()
            } else {
                zero.clone()
            };
            let r = left + right;
            let l = &betas[k] - &r;
            let h = &betas[k] + &r;
            lo = Some(match lo {
                Some(v) if v < l => v,
                _ => l,
            });
            hi = Some(match hi {
                Some(v) if v > h => v,
                _ => h,
            });
        }
        let (lo, hi) = (lo.unwrap() - 1, hi.unwrap() + 1);

        // Number of eigenvalues strictly below x (Sturm count on the LDLᵀ pivots).
        let tiny = Real::one(prec).mul_pow2(-(prec.bits() as i32) * 4);
        let count_below = |x: &Real| -> usize {
            let mut above = 0usize;
            let mut q = x - &betas[0];
            if q.is_zero() {
                q = tiny.clone();
            }
            if q.is_negative() {
                above += 1;
            }
            for k in 1..m {
                q = x - &betas[k] - &gammas[k] / &q;
                if q.is_zero() {
                    q = tiny.clone();
                }
                if q.is_negative() {
                    above += 1;
                }
            }
            m - above
        };

        let eps = Real::one(prec).mul_pow2(-(prec.bits() as i32 - 3));
        let mut nodes = Vec::with_capacity(m);
        for idx in 0..m {
            // Bracket the idx-th eigenvalue: count_below(a) ≤ idx < count_below(b).
            let mut a = lo.clone();
            let mut b = hi.clone();
            for _ in 0..60 {
                let mid = (&a + &b).mul_pow2(-1);
                if count_below(&mid) > idx {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            // Newton on P_m. The root may sit on a bracket end, so iterates are
            // accepted within one bracket width of it.
            let width = &b - &a;
            let (a, b) = (&a - &width, &b + &width);
            let mut x = (&a + &b).mul_pow2(-1);
            for _ in 0..64 {
                let (p, dp) = self.value_and_derivative(m, &x, &betas, &gammas);
                if dp.is_zero() {
                    break;
                }
                let step = p / dp;
                let mut next = &x - &step;
                if next < a || next > b {
                    next = (&a + &b).mul_pow2(-1);
                }
                let done = step.abs() <= &eps * x.abs().max(Real::one(prec));
                x = next;
                if done {
                    break;
                }
            }
            nodes.push(x);
        }

        let norms: Vec<Real> = (0..m).map(|k| self.norm_sq(k)).collect();
        let weights = nodes
            .iter()
            .map(|x| {
                let vals = self.eval_all(m - 1, x);
                let christoffel = vals
                    .iter()
                    .zip(&norms)
                    .fold(Real::zero(prec), |acc, (v, h)| acc + v.square() / h);
                christoffel.recip()
            })
            .collect();
        Ok(QuadratureRule { nodes, weights })
    }

    fn value_and_derivative(
        &self,
        m: usize,
        x: &Real,
        betas: &[Real],
        gammas: &[Real],
    ) -> (Real, Real) {
        let prec = self.prec();
        let (mut p_prev, mut p) = (Real::zero(prec), Real::one(prec));
        let (mut d_prev, mut d) = (Real::zero(prec), Real::zero(prec));
        for k in 0..m {
            let shift = x - &betas[k];
            let p_next = &shift * &p - &gammas[k] * &p_prev;
            let d_next = &p + &shift * &d - &gammas[k] * &d_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            d_prev = std::mem::replace(&mut d, d_next);
        }
        (p, d)
    }

    /// `∫ f dμ` for a polynomial `f`, exact up to rounding.
    pub fn integrate(&self, f: &Poly) -> Real {
        match f.degree() {
            None => Real::zero(self.prec()),
            Some(d) => {
                let rule = self
                    .gauss_rule(d / 2 + 1)
                    .expect("gauss rule for a positive-definite system");
                rule.integrate(|x| f.eval(x))
            }
        }
    }

    /// `<p, q>_μ = ∫ p q dμ` with a Gauss rule of size `⌈(deg p + deg q + 1)/2⌉`.
    pub fn inner(&self, p: &Poly, q: &Poly) -> Real {
        match (p.degree(), q.degree()) {
            (Some(dp), Some(dq)) => {
                let rule = self
                    .gauss_rule((dp + dq) / 2 + 1)
                    .expect("gauss rule for a positive-definite system");
                rule.integrate(|x| p.eval(x) * q.eval(x))
            }
            _ => Real::zero(self.prec()),
        }
    }

    /// `∫ x^k dμ`.
    pub fn moment(&self, k: usize) -> Real {
        self.integrate(&Poly::monomial(k, self.prec()))
    }
}

/// Monic orthogonal polynomials of degrees `0..=n` by modified Gram–Schmidt
/// on the monomials, for an arbitrary symmetric bilinear form.
pub fn gram_schmidt_oracle<F>(inner: F, n: usize, prec: Precision) -> Result<Vec<Poly>, OpsysError>
where
    F: Fn(&Poly, &Poly) -> Real,
{
    let mut basis: Vec<Poly> = Vec::with_capacity(n + 1);
    let mut norms: Vec<Real> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut v = Poly::monomial(k, prec);
        for (e, h) in basis.iter().zip(&norms) {
            let c = inner(&v, e) / h;
            v = Poly::axpy(&-c, e, &v);
        }
        let h = inner(&v, &v);
        if !h.is_positive() {
            return Err(OpsysError::NonPositiveNorm { degree: k });
        }
        basis.push(v);
        norms.push(h);
    }
    Ok(basis)
}

/// A family `c_k P_k` of orthogonal polynomials over an [`OrthoSystem`],
/// with a per-degree normalization and (optionally) closed-form derivative
/// values at special points.
pub trait Family: Send + Sync {
    fn system(&self) -> &OrthoSystem;

    /// Leading coefficient `c_n` of the n-th member.
    fn leading(&self, n: usize) -> Real;

    fn member(&self, n: usize) -> Poly {
        self.system().monic_poly(n).scale(&self.leading(n))
    }

    fn norm_sq(&self, n: usize) -> Real {
        self.system().norm_sq(n) * self.leading(n).square()
    }

    /// k-th derivative of the n-th member at `x`.
    fn deriv_at(&self, n: usize, k: usize, x: &Real) -> Real {
        self.member(n).derivative(k).eval(x)
    }

    fn prec(&self) -> Precision {
        self.system().prec()
    }
}

impl Family for OrthoSystem {
    fn system(&self) -> &OrthoSystem {
        self
    }

    fn leading(&self, _n: usize) -> Real {
        Real::one(self.prec())
    }

    fn member(&self, n: usize) -> Poly {
        self.monic_poly(n)
    }

    fn norm_sq(&self, n: usize) -> Real {
        OrthoSystem::norm_sq(self, n)
    }
}

/// `c_k P_k` for an arbitrary nonzero scale sequence.
pub struct Rescaled<F> {
    inner: F,
    scale: Box<CoeffFn>,
}

impl<F: Family> Rescaled<F> {
    pub fn new(inner: F, scale: impl Fn(usize) -> Real + Send + Sync + 'static) -> Self {
        Rescaled {
            inner,
            scale: Box::new(scale),
        }
    }
}

impl<F: Family> Family for Rescaled<F> {
    fn system(&self) -> &OrthoSystem {
        self.inner.system()
    }

    fn leading(&self, n: usize) -> Real {
        self.inner.leading(n) * (self.scale)(n)
    }

    fn deriv_at(&self, n: usize, k: usize, x: &Real) -> Real {
        self.inner.deriv_at(n, k, x) * (self.scale)(n)
    }
}
