//! Convergence scans for the Jacobi endpoint limits at `x = -1`.
//!
//! Every scan produces a [`ConvergenceTable`] of `(n, value, limit, |value-limit|)`
//! rows on a caller-supplied grid of degrees, together with an empirical
//! decay exponent. Endpoint data come from the closed forms in
//! [`crate::jacobi`], and kernel sums are accumulated once over `i` in
//! increasing order, so a scan to `n = 4096` costs `O(n)` Gamma evaluations.

use std::fmt;

use thiserror::Error;

use crate::jacobi::{endpoint_row, JacobiParams};
use crate::real::{Precision, Real};
use crate::sobolev::{q_deriv_from, q_norm_from, solve_endpoint, KernelAtA, SobolevError, SobolevParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error("limit not covered for these masses: the ratio limits need M > 0 and N > 0 (got M={m}, N={n})")]
    MassNotCovered { m: String, n: String },
    #[error("ratio scans are defined at a = -1 only (got a={0})")]
    PointNotEndpoint(String),
    #[error("decay fit needs at least 4 rows with nonzero error, got {0}")]
    TooFewRows(usize),
    #[error("degree grid must be non-empty, strictly increasing and start at n >= 1")]
    BadGrid,
    #[error("the derivative ratio of order {j} is undefined at n = {n} < {j}")]
    DegreeBelowOrder { n: usize, j: usize },
    #[error(transparent)]
    Sobolev(#[from] SobolevError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScanKind {
    Gamma,
    Endpoint,
    NormLimit,
    Kernel,
    DerivRatio,
    NormRatio,
}

impl ScanKind {
    pub const ALL: [ScanKind; 6] = [
        ScanKind::Gamma,
        ScanKind::Endpoint,
        ScanKind::NormLimit,
        ScanKind::Kernel,
        ScanKind::DerivRatio,
        ScanKind::NormRatio,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScanKind::Gamma => "gamma",
            ScanKind::Endpoint => "endpoint",
            ScanKind::NormLimit => "norm_limit",
            ScanKind::Kernel => "kernel",
            ScanKind::DerivRatio => "deriv_ratio",
            ScanKind::NormRatio => "norm_ratio",
        }
    }

    pub fn parse(s: &str) -> Option<ScanKind> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

impl fmt::Display for ScanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub n: usize,
    pub value: Real,
    pub limit: Real,
    pub abs_error: Real,
}

impl Row {
    pub fn new(n: usize, value: Real, limit: Real) -> Self {
        let abs_error = (&value - &limit).abs();
        Row {
            n,
            value,
            limit,
            abs_error,
        }
    }
}

/// Fitted slope of `log|error|` against `log n`, or exact convergence when
/// every error vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    Exponent(f64),
    Exact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub kind: ScanKind,
    /// Scan parameters as `(name, decimal value)`, in a fixed order.
    pub params: Vec<(String, String)>,
    pub rows: Vec<Row>,
    /// `None` when too few rows carry a nonzero error to fit a slope.
    pub decay: Option<Decay>,
}

impl ConvergenceTable {
    fn new(kind: ScanKind, params: Vec<(String, String)>, rows: Vec<Row>) -> Self {
        let decay = fit_decay(&rows).ok();
        ConvergenceTable {
            kind,
            params,
            rows,
            decay,
        }
    }

    pub fn limit(&self) -> Option<&Real> {
        self.rows.first().map(|r| &r.limit)
    }

    pub fn last(&self) -> Option<&Row> {
        self.rows.last()
    }

    pub fn row_at(&self, n: usize) -> Option<&Row> {
        self.rows.iter().find(|r| r.n == n)
    }

    /// Whether `abs_error` strictly decreases along rows with `n ≥ n0`.
    pub fn errors_decreasing_from(&self, n0: usize) -> bool {
        let tail: Vec<&Row> = self.rows.iter().filter(|r| r.n >= n0).collect();
        tail.windows(2).all(|w| w[1].abs_error < w[0].abs_error)
    }

    pub fn max_abs_error(&self) -> Option<Real> {
        self.rows.iter().map(|r| r.abs_error.clone()).reduce(Real::max)
    }
}

/// `n_i = ⌈n0 · r^i⌉` up to `max`, deduplicated; `max` itself is included
/// whenever the progression lands on it.
pub fn geometric_grid(n0: usize, ratio: f64, max: usize) -> Vec<usize> {
    assert!(n0 >= 1 && ratio > 1.0);
    let mut out: Vec<usize> = Vec::new();
    for i in 0.. {
        // Guard against r^i landing a hair above an integer.
        let n = ((n0 as f64) * ratio.powi(i) - 1e-9).ceil() as usize;
        if n > max {
            break;
        }
        if out.last() != Some(&n) {
            out.push(n);
        }
    }
    out
}

/// The default grid: `n0 = 16`, `r = √2`, up to `max`.
pub fn default_grid(max: usize) -> Vec<usize> {
    geometric_grid(16, std::f64::consts::SQRT_2, max)
}

fn check_grid(ns: &[usize]) -> Result<(), AsymptoticsError> {
    if ns.is_empty() || ns[0] == 0 || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AsymptoticsError::BadGrid);
    }
    Ok(())
}

/// Least-squares slope of `log|error|` vs `log n` over the trailing half of
/// the rows.
pub fn fit_decay(rows: &[Row]) -> Result<Decay, AsymptoticsError> {
    if !rows.is_empty() && rows.iter().all(|r| r.abs_error.is_zero()) {
        return Ok(Decay::Exact);
    }
    let tail = &rows[rows.len() / 2..];
    let pts: Vec<(f64, f64)> = tail
        .iter()
        .filter(|r| !r.abs_error.is_zero())
        .map(|r| ((r.n as f64).ln(), r.abs_error.ln().to_f64()))
        .collect();
    if pts.len() < 4 {
        return Err(AsymptoticsError::TooFewRows(pts.len()));
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    Ok(Decay::Exponent(sxy / sxx))
}

/// Limit estimate from the last four rows: the cubic in `h = 1/n` through
/// them, evaluated at `h = 0`.
pub fn richardson(rows: &[Row]) -> Option<Real> {
    if rows.len() < 4 {
        return None;
    }
    let last = &rows[rows.len() - 4..];
    let prec = last[0].value.prec();
    let h: Vec<Real> = last.iter().map(|r| Real::ratio(1, r.n as i64, prec)).collect();
    let mut acc = Real::zero(prec);
    for (i, r) in last.iter().enumerate() {
        let mut w = Real::one(prec);
        for (j, hj) in h.iter().enumerate() {
            if j != i {
                w = w * hj / (hj - &h[i]);
            }
        }
        acc += w * &r.value;
    }
    Some(acc)
}

fn n_real(n: usize, prec: Precision) -> Real {
    Real::from_i64(n as i64, prec)
}

fn dec(x: &Real) -> String {
    x.to_decimal(20)
}

/// `n^{k-l} Γ(n+l) / Γ(n+k) → 1`.
pub fn gamma_ratio_scan(k: usize, l: usize, ns: &[usize], prec: Precision) -> Result<ConvergenceTable, AsymptoticsError> {
    check_grid(ns)?;
    let one = Real::one(prec);
    let rows = ns
        .iter()
        .map(|&n| {
            let nr = n_real(n, prec);
            let value = if k == l {
                one.clone()
            } else {
                nr.powi(k as i32 - l as i32) * (&nr + l as i64).gamma() / (&nr + k as i64).gamma()
            };
            Row::new(n, value, one.clone())
        })
        .collect();
    let params = vec![("k".into(), k.to_string()), ("l".into(), l.to_string())];
    Ok(ConvergenceTable::new(ScanKind::Gamma, params, rows))
}

fn jacobi_meta(p: &JacobiParams) -> Vec<(String, String)> {
    vec![("alpha".into(), dec(p.alpha())), ("beta".into(), dec(p.beta()))]
}

/// `(-1)^n P̃_n^{(k)}(-1) / n^{β-α+2k} → Γ(α+1) / ((-2)^k Γ(β+k+1))`.
pub fn endpoint_limit_scan(p: &JacobiParams, k: usize, ns: &[usize]) -> Result<ConvergenceTable, AsymptoticsError> {
    check_grid(ns)?;
    let prec = p.prec();
    let ki = k as i64;
    let limit = (p.alpha() + 1).gamma() / ((p.beta() + (ki + 1)).gamma() * Real::from_i64(-2, prec).powi(k as i32));
    let expo = p.beta() - p.alpha() + 2 * ki;
    let rows = ns
        .iter()
        .map(|&n| {
            let d = endpoint_row(p, n, k).derivs.swap_remove(k);
            let signed = if n % 2 == 1 { -d } else { d };
            Row::new(n, signed / n_real(n, prec).powr(&expo), limit.clone())
        })
        .collect();
    let mut params = jacobi_meta(p);
    params.push(("k".into(), k.to_string()));
    Ok(ConvergenceTable::new(ScanKind::Endpoint, params, rows))
}

/// `n^{2α+1} ‖P̃_n‖² → 2^{α+β} Γ(α+1)²`.
pub fn norm_limit_scan(p: &JacobiParams, ns: &[usize]) -> Result<ConvergenceTable, AsymptoticsError> {
    check_grid(ns)?;
    let prec = p.prec();
    let two = Real::from_i64(2, prec);
    let limit = two.powr(&(p.alpha() + p.beta())) * (p.alpha() + 1).gamma().square();
    let expo = p.alpha() * 2 + 1;
    let rows = ns
        .iter()
        .map(|&n| {
            let h = endpoint_row(p, n, 0).norm_sq;
            Row::new(n, n_real(n, prec).powr(&expo) * h, limit.clone())
        })
        .collect();
    Ok(ConvergenceTable::new(ScanKind::NormLimit, jacobi_meta(p), rows))
}

/// Running sums `K_{n-1}^{(k,s)}(-1,-1)` over the scaled family, for all
/// `k, s ≤ kmax`. Rows are produced in increasing `n`.
struct KernelAccumulator<'a> {
    p: &'a JacobiParams,
    kmax: usize,
    next: usize,
    sums: Vec<Vec<Real>>,
}

impl<'a> KernelAccumulator<'a> {
    fn new(p: &'a JacobiParams, kmax: usize) -> Self {
        let z = Real::zero(p.prec());
        KernelAccumulator {
            p,
            kmax,
            next: 0,
            sums: vec![vec![z; kmax + 1]; kmax + 1],
        }
    }

    /// Advances to `K_{n-1}`, i.e. sums over `i < n`.
    fn advance_to(&mut self, n: usize) {
        while self.next < n {
            let row = endpoint_row(self.p, self.next, self.kmax);
            for k in 0..=self.kmax {
                for s in 0..=self.kmax {
                    let term = &row.derivs[k] * &row.derivs[s] / &row.norm_sq;
                    self.sums[k][s] += term;
                }
            }
            self.next += 1;
        }
    }

    fn get(&self, k: usize, s: usize) -> &Real {
        &self.sums[k][s]
    }
}

/// `K_{n-1}^{(k,s)}(-1,-1) / n^{2β+2k+2s+2}
///   → (-1)^{k+s} / (2^{α+β+k+s+1} (β+k+s+1) Γ(β+k+1) Γ(β+s+1))`.
pub fn kernel_limit_scan(p: &JacobiParams, k: usize, s: usize, ns: &[usize]) -> Result<ConvergenceTable, AsymptoticsError> {
    check_grid(ns)?;
    let prec = p.prec();
    let (b, ks) = (p.beta(), (k + s) as i64);
    let two = Real::from_i64(2, prec);
    // Canonical factor order keeps scan(k, s) and scan(s, k) bitwise equal.
    let (lo, hi) = (k.min(s) as i64, k.max(s) as i64);
    let den = two.powr(&(p.alpha() + b + (ks + 1)))
        * (b + (ks + 1))
        * (b + (lo + 1)).gamma()
        * (b + (hi + 1)).gamma();
    let limit = if ks % 2 == 1 { -den.recip() } else { den.recip() };
    let expo = b * 2 + (2 * ks + 2);
    let mut acc = KernelAccumulator::new(p, k.max(s));
    let rows = ns
        .iter()
        .map(|&n| {
            acc.advance_to(n);
            Row::new(n, acc.get(k, s) / n_real(n, prec).powr(&expo), limit.clone())
        })
        .collect();
    let mut params = jacobi_meta(p);
    params.push(("k".into(), k.to_string()));
    params.push(("s".into(), s.to_string()));
    Ok(ConvergenceTable::new(ScanKind::Kernel, params, rows))
}

fn sobolev_meta(p: &JacobiParams, sp: &SobolevParams) -> Vec<(String, String)> {
    let mut m = jacobi_meta(p);
    m.push(("M".into(), dec(sp.mass())));
    m.push(("N".into(), dec(sp.deriv_mass())));
    m.push(("a".into(), dec(sp.a())));
    m
}

fn require_endpoint(sp: &SobolevParams) -> Result<(), AsymptoticsError> {
    if *sp.a() != -1 {
        return Err(AsymptoticsError::PointNotEndpoint(dec(sp.a())));
    }
    Ok(())
}

fn mass_not_covered(sp: &SobolevParams) -> AsymptoticsError {
    AsymptoticsError::MassNotCovered {
        m: dec(sp.mass()),
        n: dec(sp.deriv_mass()),
    }
}

/// `Q_n^{(j)}(-1) / P̃_n^{(j)}(-1) → j(j-1) / ((β+j+1)(β+j+2))`, with both
/// polynomials in the scaled normalization. Needs `M > 0` and `N > 0`.
pub fn derivative_ratio_scan(
    p: &JacobiParams,
    sp: &SobolevParams,
    j: usize,
    ns: &[usize],
) -> Result<ConvergenceTable, AsymptoticsError> {
    check_grid(ns)?;
    require_endpoint(sp)?;
    if !(sp.mass().is_positive() && sp.deriv_mass().is_positive()) {
        return Err(mass_not_covered(sp));
    }
    if ns[0] < j {
        return Err(AsymptoticsError::DegreeBelowOrder { n: ns[0], j });
    }
    let prec = p.prec();
    let sp = sp.with_prec(prec);
    let ji = j as i64;
    let b = p.beta();
    let limit = Real::from_i64(ji * (ji - 1), prec) / ((b + (ji + 1)) * (b + (ji + 2)));
    let kmax = j.max(1);
    let mut acc = KernelAccumulator::new(p, kmax);
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        acc.advance_to(n);
        let row = endpoint_row(p, n, kmax);
        let kern = KernelAtA {
            k00: acc.get(0, 0).clone(),
            k01: acc.get(0, 1).clone(),
            k10: acc.get(1, 0).clone(),
            k11: acc.get(1, 1).clone(),
        };
        let q = solve_endpoint(&sp, &kern, &row.derivs[0], &row.derivs[1], n)?;
        let qj = q_deriv_from(&sp, &q, &row.derivs[j], acc.get(0, j), acc.get(1, j));
        rows.push(Row::new(n, qj / &row.derivs[j], limit.clone()));
    }
    let mut params = sobolev_meta(p, &sp);
    params.push(("j".into(), j.to_string()));
    Ok(ConvergenceTable::new(ScanKind::DerivRatio, params, rows))
}

/// `‖Q_n‖_S / ‖P̃_n‖_μ → 1`. Needs `M > 0` and `N > 0`, except that
/// `M = N = 0` is accepted as a baseline where the ratio is identically 1.
pub fn norm_ratio_scan(p: &JacobiParams, sp: &SobolevParams, ns: &[usize]) -> Result<ConvergenceTable, AsymptoticsError> {
    check_grid(ns)?;
    require_endpoint(sp)?;
    let (m_pos, n_pos) = (sp.mass().is_positive(), sp.deriv_mass().is_positive());
    if m_pos != n_pos {
        return Err(mass_not_covered(sp));
    }
    let prec = p.prec();
    let sp = sp.with_prec(prec);
    let one = Real::one(prec);
    let mut acc = KernelAccumulator::new(p, 1);
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        acc.advance_to(n);
        let row = endpoint_row(p, n, 1);
        let kern = KernelAtA {
            k00: acc.get(0, 0).clone(),
            k01: acc.get(0, 1).clone(),
            k10: acc.get(1, 0).clone(),
            k11: acc.get(1, 1).clone(),
        };
        let q = solve_endpoint(&sp, &kern, &row.derivs[0], &row.derivs[1], n)?;
        let s_norm = q_norm_from(&sp, &row.norm_sq, &row.derivs[0], &row.derivs[1], &q);
        rows.push(Row::new(n, (s_norm / &row.norm_sq).sqrt(), one.clone()));
    }
    Ok(ConvergenceTable::new(ScanKind::NormRatio, sobolev_meta(p, &sp), rows))
}
