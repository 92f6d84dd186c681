//! Identity and orthogonality checks behind `opq verify`.
//!
//! Each check returns a list of [`Check`]s, one residual per case. The
//! residual conventions are:
//! - polynomial identities: pointwise `|lhs - rhs| / (1 + |lhs|)` at 11
//!   Chebyshev points;
//! - polynomial agreements: [`coeff_rel_error`];
//! - scalars: `|x - y| / max(|y|, 1)`.

use std::fmt;
use std::str::FromStr;

use opq_core::geronimus::GGSystem;
use opq_core::jacobi::{JacobiBasis, JacobiParams};
use opq_core::opsys::{gram_schmidt_oracle, Family};
use opq_core::poly::coeff_rel_error;
use opq_core::residual::{combine, poly_residual};
use opq_core::sobolev::{SobolevParams, SobolevSystem};
use opq_core::{Poly, Precision, Real};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::OpqError;
use crate::report::VerificationReport;

pub const SAMPLE_POINTS: usize = 11;
/// Largest degree for the Gram–Schmidt oracle comparisons.
pub const ORACLE_MAX: usize = 15;
/// Largest degree for the determinant comparison.
pub const DETERMINANT_MAX: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: String,
    pub residual: Real,
}

impl Check {
    fn new(id: impl Into<String>, residual: Real) -> Self {
        Check {
            id: id.into(),
            residual,
        }
    }
}

/// Largest residual in a list, `None` when empty.
pub fn worst(checks: &[Check]) -> Option<&Check> {
    checks.iter().reduce(|a, b| if b.residual > a.residual { b } else { a })
}

fn scalar_residual(x: &Real, y: &Real) -> Real {
    let prec = x.prec().max(y.prec());
    (x - y).abs() / y.abs().max(Real::one(prec))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Geronimus,
    Sobolev,
    Qq,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Geronimus => "geronimus",
            Suite::Sobolev => "sobolev",
            Suite::Qq => "qq",
        }
    }

    fn needs_gg(self) -> bool {
        self != Suite::Sobolev
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Suite::All, Suite::Geronimus, Suite::Sobolev, Suite::Qq]
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown suite {s:?} (expected all, geronimus, sobolev or qq)"))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything a suite needs, built once from the run configuration.
pub struct Context {
    pub prec: Precision,
    pub jacobi: JacobiParams,
    pub sobolev: SobolevParams,
    pub n_max: usize,
    pub seed: u64,
}

impl Context {
    pub fn gg(&self) -> Result<GGSystem, OpqError> {
        if *self.sobolev.a() != -1 {
            return Err(OpqError::Domain(format!(
                "the double Geronimus suites are defined at a = -1 (got a = {})",
                self.sobolev.a().to_decimal(20)
            )));
        }
        Ok(GGSystem::jacobi(&self.jacobi)?)
    }

    pub fn sobolev_system(&self) -> Result<SobolevSystem<JacobiBasis>, OpqError> {
        Ok(SobolevSystem::new(JacobiBasis::new(&self.jacobi), self.sobolev.clone())?)
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Runs `suite` and folds the residuals against `2^-(bits/2)`.
pub fn run(ctx: &Context, suite: Suite) -> Result<VerificationReport, OpqError> {
    let gg = if suite.needs_gg() { Some(ctx.gg()?) } else { None };
    let mut checks = Vec::new();
    if let (Some(g), Suite::All | Suite::Geronimus) = (&gg, suite) {
        checks.extend(three_term(g, ctx.n_max));
        checks.extend(five_term(g, ctx.n_max));
        checks.extend(connection(g, ctx.n_max));
        checks.extend(norm_relation(g, ctx.n_max));
        checks.extend(gg_poly_agreement(g, ctx.n_max));
        checks.extend(measure_identity(g, &mut ctx.rng(1), 20, 15));
        checks.extend(oracle_base(g, ctx.n_max.min(ORACLE_MAX))?);
        checks.extend(oracle_gg(g, ctx.n_max.min(ORACLE_MAX))?);
    }
    if matches!(suite, Suite::All | Suite::Sobolev | Suite::Qq) {
        let s = ctx.sobolev_system()?;
        if suite != Suite::Qq {
            checks.extend(s_orthogonality(&s, ctx.n_max)?);
            checks.extend(determinant_agreement(&s, ctx.n_max.min(DETERMINANT_MAX))?);
            checks.extend(oracle_sobolev(&s, ctx.n_max.min(ORACLE_MAX))?);
            checks.extend(kernel_reproducing(&s, ctx.n_max, &mut ctx.rng(2)));
        }
        if let Some(g) = &gg {
            checks.extend(qq_identity(&s, g, ctx.n_max)?);
            checks.extend(qq_closed_vs_projection(&s, g, ctx.n_max)?);
        }
    }
    Ok(VerificationReport::from_checks(suite.as_str(), &checks, &ctx.prec.half_eps()))
}

fn gg_basis(g: &GGSystem, n: usize) -> Vec<Poly> {
    (0..=n).map(|k| g.gg_poly(k)).collect()
}

/// `P_{n+1}^gg = (x - a - σ_nn) P_n^gg - σ_{n,n-1} P_{n-1}^gg`.
pub fn three_term(g: &GGSystem, n_max: usize) -> Vec<Check> {
    let prec = g.prec();
    let basis = gg_basis(g, n_max + 1);
    (0..=n_max)
        .map(|n| {
            let t = g.three_term(n);
            let mut rhs = basis[n].shift_mul(&(g.a() + &t.sigma_nn));
            if n > 0 {
                rhs = Poly::axpy(&-t.sigma_nm1, &basis[n - 1], &rhs);
            }
            Check::new(
                format!("three_term:n={n}"),
                poly_residual(&basis[n + 1], &rhs, SAMPLE_POINTS, prec),
            )
        })
        .collect()
}

/// `(x-a)² P_n^gg = P_{n+2}^gg + a_{+1} P_{n+1}^gg + … + a_{-2} P_{n-2}^gg`.
pub fn five_term(g: &GGSystem, n_max: usize) -> Vec<Check> {
    let prec = g.prec();
    let basis = gg_basis(g, n_max + 2);
    (0..=n_max)
        .map(|n| {
            let f = g.five_term(n);
            let mut rhs = basis[n + 2].clone();
            rhs = Poly::axpy(&f.a_pp1, &basis[n + 1], &rhs);
            rhs = Poly::axpy(&f.a_p0, &basis[n], &rhs);
            if n >= 1 {
                rhs = Poly::axpy(&f.a_m1, &basis[n - 1], &rhs);
            }
            if n >= 2 {
                rhs = Poly::axpy(&f.a_m2, &basis[n - 2], &rhs);
            }
            let lhs = basis[n].shift_square(g.a());
            Check::new(format!("five_term:n={n}"), poly_residual(&lhs, &rhs, SAMPLE_POINTS, prec))
        })
        .collect()
}

/// `(x-a)² P_n = P_{n+2}^gg + σ_{n+1} P_{n+1}^gg + σ_n P_n^gg`.
pub fn connection(g: &GGSystem, n_max: usize) -> Vec<Check> {
    let prec = g.prec();
    let basis = gg_basis(g, n_max + 2);
    let base = g.base().monic_polys(n_max);
    (0..=n_max)
        .map(|n| {
            let c = g.base_to_gg(n);
            let mut rhs = basis[n + 2].clone();
            rhs = Poly::axpy(&c.s_pp1, &basis[n + 1], &rhs);
            rhs = Poly::axpy(&c.s_p0, &basis[n], &rhs);
            let lhs = base[n].shift_square(g.a());
            Check::new(format!("connection:n={n}"), poly_residual(&lhs, &rhs, SAMPLE_POINTS, prec))
        })
        .collect()
}

/// Closed-form `‖P_n^gg‖²_gg` against quadrature, `2 ≤ n ≤ n_max`.
pub fn norm_relation(g: &GGSystem, n_max: usize) -> Vec<Check> {
    (2..=n_max)
        .map(|n| {
            let (closed, _) = g.gg_norm_sq(n);
            let quad = g.gg_norm_sq_quadrature(n);
            Check::new(format!("norm_relation:n={n}"), scalar_residual(&closed, &quad))
        })
        .collect()
}

/// Expansion-built `P_n^gg` against the recurrence of the gg measure.
pub fn gg_poly_agreement(g: &GGSystem, n_max: usize) -> Vec<Check> {
    (0..=n_max)
        .map(|n| {
            Check::new(
                format!("gg_poly:n={n}"),
                coeff_rel_error(&g.gg_poly(n), &g.gg().monic_poly(n)),
            )
        })
        .collect()
}

fn random_poly(rng: &mut impl Rng, max_degree: usize, prec: Precision) -> Poly {
    let deg = rng.gen_range(0..=max_degree);
    let coeffs = (0..=deg)
        .map(|_| {
            let num: i64 = rng.gen_range(-9..=9);
            let den: i64 = rng.gen_range(1..=9);
            Real::ratio(num, den, prec)
        })
        .collect();
    Poly::new(coeffs)
}

/// `<(x-a)² p, q>_gg = <p, q>_μ` for random pairs, scaled by `‖p‖ ‖q‖`.
pub fn measure_identity(g: &GGSystem, rng: &mut impl Rng, pairs: usize, max_degree: usize) -> Vec<Check> {
    let prec = g.prec();
    (0..pairs)
        .map(|i| {
            let p = random_poly(rng, max_degree, prec);
            let q = random_poly(rng, max_degree, prec);
            let lhs = g.gg().inner(&p.shift_square(g.a()), &q);
            let rhs = g.base().inner(&p, &q);
            let scale = (g.base().inner(&p, &p) * g.base().inner(&q, &q)).sqrt().max(Real::ratio(1, 1 << 40, prec));
            Check::new(format!("measure_identity:pair={i}"), (lhs - rhs).abs() / scale)
        })
        .collect()
}

fn oracle_checks(name: &str, oracle: &[Poly], built: impl Fn(usize) -> Result<Poly, OpqError>) -> Result<Vec<Check>, OpqError> {
    oracle
        .iter()
        .enumerate()
        .map(|(n, o)| Ok(Check::new(format!("{name}:n={n}"), coeff_rel_error(&built(n)?, o))))
        .collect()
}

fn gram_schmidt(inner: impl Fn(&Poly, &Poly) -> Real, n: usize, prec: Precision) -> Result<Vec<Poly>, OpqError> {
    gram_schmidt_oracle(inner, n, prec).map_err(|e| OpqError::Domain(e.to_string()))
}

/// Gram–Schmidt under `<·,·>_μ` against the recurrence polynomials.
pub fn oracle_base(g: &GGSystem, n: usize) -> Result<Vec<Check>, OpqError> {
    let oracle = gram_schmidt(|p, q| g.base().inner(p, q), n, g.prec())?;
    oracle_checks("oracle_mu", &oracle, |k| Ok(g.base().monic_poly(k)))
}

/// Gram–Schmidt under `<·,·>_gg` against the expansion-built `P_n^gg`.
pub fn oracle_gg(g: &GGSystem, n: usize) -> Result<Vec<Check>, OpqError> {
    let oracle = gram_schmidt(|p, q| g.gg().inner(p, q), n, g.prec())?;
    oracle_checks("oracle_gg", &oracle, |k| Ok(g.gg_poly(k)))
}

/// Gram–Schmidt under `<·,·>_S` against the kernel-built `Q_n`.
pub fn oracle_sobolev<F: Family>(s: &SobolevSystem<F>, n: usize) -> Result<Vec<Check>, OpqError> {
    let oracle = gram_schmidt(|p, q| s.inner(p, q), n, s.prec())?;
    oracle_checks("oracle_sobolev", &oracle, |k| Ok(s.q_poly(k)?))
}

/// `max_{m<n} |<Q_n, x^m>_S| / (‖Q_n‖_S ‖x^m‖_S)` per `n`, plus the
/// monicity of `Q_n`.
pub fn s_orthogonality<F: Family>(s: &SobolevSystem<F>, n_max: usize) -> Result<Vec<Check>, OpqError> {
    let prec = s.prec();
    let monomials: Vec<Poly> = (0..=n_max).map(|m| Poly::monomial(m, prec)).collect();
    let mono_norms: Vec<Real> = monomials.iter().map(|x| s.inner(x, x).sqrt()).collect();
    let mut out = Vec::new();
    for n in 1..=n_max {
        let q = s.q_poly(n)?;
        let qn = s.q_norm_sq(n)?.sqrt();
        let worst = (0..n).fold(Real::zero(prec), |acc, m| {
            acc.max(s.inner(&q, &monomials[m]).abs() / (&qn * &mono_norms[m]))
        });
        out.push(Check::new(format!("s_orthogonality:n={n}"), worst));
        let lead = q.leading().cloned().unwrap_or_else(|| Real::zero(prec));
        out.push(Check::new(format!("monic:n={n}"), (lead - 1).abs()));
    }
    Ok(out)
}

/// Cofactor expansion of the 3×3 determinant against the kernel form.
pub fn determinant_agreement<F: Family>(s: &SobolevSystem<F>, n_max: usize) -> Result<Vec<Check>, OpqError> {
    (0..=n_max)
        .map(|n| {
            Ok(Check::new(
                format!("determinant:n={n}"),
                coeff_rel_error(&s.q_poly_determinant(n)?, &s.q_poly(n)?),
            ))
        })
        .collect()
}

/// `<K_n(·,a), p>_μ = p(a)` and `<K_n^{(0,1)}(·,a), p>_μ = p'(a)` for random
/// `p` of degree `≤ n`.
pub fn kernel_reproducing<F: Family>(s: &SobolevSystem<F>, n_max: usize, rng: &mut impl Rng) -> Vec<Check> {
    let prec = s.prec();
    let a = s.params().a().clone();
    let mut degrees = vec![1, n_max.div_ceil(2), n_max];
    degrees.dedup();
    let mut out = Vec::new();
    for n in degrees {
        let p = random_poly(rng, n, prec);
        for order in 0..=1 {
            let k = s.kernel_poly(n, order, &a);
            let lhs = s.family().system().inner(&k, &p);
            let rhs = p.derivative(order).eval(&a);
            out.push(Check::new(
                format!("kernel_reproducing:n={n}:s={order}"),
                (&lhs - &rhs).abs() / (rhs.abs() + 1),
            ));
        }
    }
    out
}

/// The gg-basis expansion of `(x-a)² Q_n`: the closed-form leading
/// coefficients plus the lower coefficients from [`SobolevSystem::qq_tail`].
pub fn qq_identity<F: Family>(s: &SobolevSystem<F>, g: &GGSystem, n_max: usize) -> Result<Vec<Check>, OpqError> {
    qq_residuals(s, g, n_max, true, "qq_expansion")
}

/// The five-term expansion of `(x-a)² Q_n` alone, without lower terms.
/// This holds only when `M = N = 0`.
pub fn qq_five_term<F: Family>(s: &SobolevSystem<F>, g: &GGSystem, n_max: usize) -> Result<Vec<Check>, OpqError> {
    qq_residuals(s, g, n_max, false, "qq_five_term")
}

fn qq_residuals<F: Family>(
    s: &SobolevSystem<F>,
    g: &GGSystem,
    n_max: usize,
    with_tail: bool,
    name: &str,
) -> Result<Vec<Check>, OpqError> {
    let prec = g.prec();
    let basis = gg_basis(g, n_max + 2);
    (0..=n_max)
        .map(|n| {
            let c = s.qq_connection(g, n)?;
            let mut rhs = basis[n + 2].clone();
            rhs = Poly::axpy(&c.a_pp1, &basis[n + 1], &rhs);
            rhs = Poly::axpy(&c.a_p0, &basis[n], &rhs);
            if n >= 1 {
                rhs = Poly::axpy(&c.a_m1, &basis[n - 1], &rhs);
            }
            if n >= 2 {
                rhs = Poly::axpy(&c.a_m2, &basis[n - 2], &rhs);
            }
            if with_tail {
                let tail = s.qq_tail(g, n)?;
                rhs = rhs.add(&combine(&tail, &basis[..tail.len()]));
            }
            let lhs = s.q_poly(n)?.shift_square(g.a());
            Ok(Check::new(format!("{name}:n={n}"), poly_residual(&lhs, &rhs, SAMPLE_POINTS, prec)))
        })
        .collect()
}

/// Closed-form leading coefficients of `(x-a)² Q_n` against projection,
/// `4 ≤ n ≤ n_max`.
pub fn qq_closed_vs_projection<F: Family>(
    s: &SobolevSystem<F>,
    g: &GGSystem,
    n_max: usize,
) -> Result<Vec<Check>, OpqError> {
    (4..=n_max)
        .map(|n| {
            let c = s.qq_connection(g, n)?;
            let o = s.qq_projection(g, n)?;
            let worst = [(&c.a_pp1, &o.a_pp1), (&c.a_p0, &o.a_p0), (&c.a_m1, &o.a_m1), (&c.a_m2, &o.a_m2)]
                .into_iter()
                .map(|(x, y)| scalar_residual(x, y))
                .reduce(Real::max)
                .expect("four coefficients");
            Ok(Check::new(format!("qq_closed_form:n={n}"), worst))
        })
        .collect()
}
