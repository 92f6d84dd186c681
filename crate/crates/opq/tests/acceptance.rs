//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so that every line is printed whether
//! or not it passes. The process exits nonzero when any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use opq::suites::{self, worst, Check, Context};
use opq_core::asymptotics::{
    default_grid, derivative_ratio_scan, endpoint_limit_scan, gamma_ratio_scan, kernel_limit_scan, norm_limit_scan,
    norm_ratio_scan, richardson, ConvergenceTable, Decay,
};
use opq_core::geronimus::GGSystem;
use opq_core::jacobi::{gg_expansion_coeffs, JacobiParams};
use opq_core::poly::coeff_rel_error;
use opq_core::residual::combine;
use opq_core::sobolev::SobolevParams;
use opq_core::{Poly, Precision, Real};

const BITS: u32 = 256;
const IDENTITY_N: usize = 40;
const IDENTITY_TOL: f64 = 1e-30;
const IDENTITY_SECONDS: u64 = 30;
/// "Exactly, to working precision" at 256 bits.
const ANCHOR_TOL_LOG2: i32 = -240;
const ORACLE_N: usize = 15;
const ORACLE_TOL: f64 = 1e-25;
const S_ORTH_N: usize = 30;
const S_ORTH_TOL: f64 = 1e-30;
const SCAN_MAX: usize = 4096;
const GAMMA_TOL: f64 = 1e-3;
const GAMMA_SLOPE: (f64, f64) = (-1.1, -0.9);
const ENDPOINT_REL_TOL: f64 = 1e-2;
const MONOTONE_FROM: usize = 64;
const KERNEL_REL_TOL: f64 = 2e-2;
const RATIO_LIMIT: f64 = 0.1;
const RATIO_TOL: f64 = 2e-2;
const RATIO_MONOTONE_FROM: usize = 128;
const RICHARDSON_TOL: f64 = 5e-3;
const NORM_RATIO_TOL: f64 = 1e-2;
const NORM_RATIO_SLOPE: (f64, f64) = (-1.3, -0.7);
const MASS_SPREAD_FACTOR: i64 = 3;
const STABILITY_N: usize = 200;
const STABILITY_TOL: f64 = 1e-30;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn prec() -> Precision {
    Precision::new(BITS).unwrap()
}

fn real(x: f64) -> Real {
    Real::from_f64(x, prec())
}

fn sci(x: &Real) -> String {
    x.to_decimal(3)
}

fn jp(a: (i64, i64), b: (i64, i64), prec: Precision) -> JacobiParams {
    JacobiParams::from_ratios(a, b, prec).unwrap()
}

fn masses(m: (i64, i64), n: (i64, i64), prec: Precision) -> SobolevParams {
    SobolevParams::new(Real::ratio(m.0, m.1, prec), Real::ratio(n.0, n.1, prec), Real::from_i64(-1, prec)).unwrap()
}

fn suite_context(n_max: usize) -> Context {
    Context {
        prec: prec(),
        jacobi: jp((1, 2), (5, 2), prec()),
        sobolev: masses((1, 1), (1, 1), prec()),
        n_max,
        seed: 0,
    }
}

fn family_line(name: &str, checks: &[Check], tol: &Real) -> (bool, String) {
    let w = worst(checks).expect("non-empty check list");
    let ok = w.residual <= *tol;
    (ok, format!("{name} {} at {}{}", sci(&w.residual), w.id, if ok { "" } else { " FAIL" }))
}

fn identity_suites() -> Outcome {
    let start = Instant::now();
    let ctx = suite_context(IDENTITY_N);
    let g = ctx.gg().unwrap();
    let s = ctx.sobolev_system().unwrap();
    let tol = real(IDENTITY_TOL);
    let families = [
        ("three_term", suites::three_term(&g, IDENTITY_N)),
        ("five_term", suites::five_term(&g, IDENTITY_N)),
        ("connection", suites::connection(&g, IDENTITY_N)),
        ("qq_five_term", suites::qq_five_term(&s, &g, IDENTITY_N).unwrap()),
        ("norm_relation", suites::norm_relation(&g, IDENTITY_N)),
    ];
    let elapsed = start.elapsed();
    let mut pass = elapsed < Duration::from_secs(IDENTITY_SECONDS);
    let mut parts = Vec::new();
    for (name, checks) in &families {
        let (ok, line) = family_line(name, checks, &tol);
        pass &= ok;
        parts.push(line);
    }
    // Not part of the criterion: the same expansion with its lower-order terms.
    let full = suites::qq_identity(&s, &g, IDENTITY_N).unwrap();
    parts.push(format!(
        "[info: qq expansion with lower terms {}]",
        sci(&worst(&full).unwrap().residual)
    ));
    parts.push(format!("{:.1}s", elapsed.as_secs_f64()));
    Outcome::new(pass, parts.join("; "))
}

fn anchors() -> Outcome {
    let p = prec();
    let tol = Real::one(p).mul_pow2(ANCHOR_TOL_LOG2);
    let params = jp((0, 1), (2, 1), p);
    let (b2, c2) = gg_expansion_coeffs(&params, 2).unwrap();
    let g = GGSystem::jacobi(&params).unwrap();
    let (h2, _) = g.gg_norm_sq(2);
    let quad = g.gg_norm_sq_quadrature(2);
    let rhs = combine(
        &[Real::ratio(4, 3, p), Real::from_i64(2, p), Real::one(p)],
        &[g.gg_poly(0), g.gg_poly(1), g.gg_poly(2)],
    );
    let lhs = Poly::one(p).shift_square(&Real::from_i64(-1, p));
    let errs = [
        ("B_2-2/3", (b2 - Real::ratio(2, 3, p)).abs()),
        ("C_2-1/15", (c2 - Real::ratio(1, 15, p)).abs()),
        ("|P2gg|^2-8/45", (&h2 - Real::ratio(8, 45, p)).abs()),
        ("quadrature |P2gg|^2-8/45", (quad - Real::ratio(8, 45, p)).abs()),
        ("(1+x)^2 expansion", coeff_rel_error(&rhs, &lhs)),
    ];
    let pass = errs.iter().all(|(_, e)| *e <= tol);
    let detail = errs.iter().map(|(n, e)| format!("{n} {}", sci(e))).collect::<Vec<_>>().join("; ");
    Outcome::new(pass, detail)
}

fn oracle_equivalence() -> Outcome {
    let ctx = suite_context(ORACLE_N);
    let g = ctx.gg().unwrap();
    let s = ctx.sobolev_system().unwrap();
    let tol = real(ORACLE_TOL);
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, checks) in [
        ("mu", suites::oracle_base(&g, ORACLE_N).unwrap()),
        ("gg", suites::oracle_gg(&g, ORACLE_N).unwrap()),
        ("sobolev", suites::oracle_sobolev(&s, ORACLE_N).unwrap()),
    ] {
        let (ok, line) = family_line(name, &checks, &tol);
        pass &= ok;
        parts.push(line);
    }
    Outcome::new(pass, parts.join("; "))
}

fn s_orthogonality() -> Outcome {
    let ctx = suite_context(S_ORTH_N);
    let s = ctx.sobolev_system().unwrap();
    let checks: Vec<Check> = suites::s_orthogonality(&s, S_ORTH_N)
        .unwrap()
        .into_iter()
        .filter(|c| c.id.starts_with("s_orthogonality"))
        .collect();
    let (pass, line) = family_line("max normalized <Q_n,x^m>_S", &checks, &real(S_ORTH_TOL));
    Outcome::new(pass, line)
}

fn grid() -> Vec<usize> {
    default_grid(SCAN_MAX)
}

fn final_row(t: &ConvergenceTable) -> &opq_core::asymptotics::Row {
    let last = t.last().unwrap();
    assert_eq!(last.n, SCAN_MAX);
    last
}

fn slope(t: &ConvergenceTable) -> Option<f64> {
    match t.decay {
        Some(Decay::Exponent(e)) => Some(e),
        _ => None,
    }
}

fn in_range(x: Option<f64>, (lo, hi): (f64, f64)) -> bool {
    x.is_some_and(|x| lo <= x && x <= hi)
}

fn gamma_ratio() -> Outcome {
    let t = gamma_ratio_scan(2, 0, &grid(), prec()).unwrap();
    let err = &final_row(&t).abs_error;
    let s = slope(&t);
    let pass = *err <= real(GAMMA_TOL) && in_range(s, GAMMA_SLOPE);
    Outcome::new(pass, format!("|value-1| at n={SCAN_MAX} {}; decay exponent {s:?}", sci(err)))
}

fn endpoint_and_norm_limits() -> Outcome {
    let p = prec();
    let e = endpoint_limit_scan(&jp((0, 1), (1, 1), p), 1, &grid()).unwrap();
    let nl = norm_limit_scan(&jp((0, 1), (0, 1), p), &grid()).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, t, expect) in [("endpoint", &e, Real::ratio(-1, 4, p)), ("norm", &nl, Real::one(p))] {
        let limit_ok = (t.limit().unwrap() - &expect).abs() <= p.half_eps();
        let err = &final_row(t).abs_error;
        let err_ok = *err <= real(ENDPOINT_REL_TOL) * expect.abs();
        let mono = t.errors_decreasing_from(MONOTONE_FROM);
        pass &= limit_ok && err_ok && mono;
        parts.push(format!(
            "{name}: limit {} ({}), abs_error {}, monotone from {MONOTONE_FROM} {mono}",
            sci(t.limit().unwrap()),
            if limit_ok { "as expected" } else { "UNEXPECTED" },
            sci(err)
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn kernel_limit() -> Outcome {
    let params = jp((0, 1), (1, 1), prec());
    let ks = kernel_limit_scan(&params, 1, 0, &grid()).unwrap();
    let sk = kernel_limit_scan(&params, 0, 1, &grid()).unwrap();
    let last = final_row(&ks);
    let rel = &last.abs_error / last.limit.abs();
    let symmetric = ks.rows == sk.rows;
    let pass = rel <= real(KERNEL_REL_TOL) && symmetric;
    Outcome::new(
        pass,
        format!(
            "limit {}; relative error at n={SCAN_MAX} {}; (1,0)/(0,1) rows identical {symmetric}",
            sci(&last.limit),
            sci(&rel)
        ),
    )
}

fn fig1a_scan(m: (i64, i64), n: (i64, i64), p: Precision) -> ConvergenceTable {
    derivative_ratio_scan(&jp((0, 1), (1, 1), p), &masses(m, n, p), 2, &grid()).unwrap()
}

fn derivative_ratio() -> Outcome {
    let t = fig1a_scan((1, 1), (1, 1), prec());
    let target = Real::ratio(1, 10, prec());
    let limit_ok = (t.limit().unwrap() - &target).abs() <= prec().half_eps();
    let err = (&final_row(&t).value - &target).abs();
    let mono = t.errors_decreasing_from(RATIO_MONOTONE_FROM);
    let rich = richardson(&t.rows).unwrap();
    let rich_err = (&rich - &target).abs();
    let pass = limit_ok && err <= real(RATIO_TOL) && mono && rich_err <= real(RICHARDSON_TOL);
    Outcome::new(
        pass,
        format!(
            "limit {} (expected {RATIO_LIMIT}); |value-0.1| at n={SCAN_MAX} {}; decreasing from {RATIO_MONOTONE_FROM} {mono}; Richardson {} (off by {})",
            sci(t.limit().unwrap()),
            sci(&err),
            sci(&rich),
            sci(&rich_err)
        ),
    )
}

fn norm_ratio() -> Outcome {
    let p = prec();
    let t = norm_ratio_scan(&jp((0, 1), (1, 1), p), &masses((1, 1), (1, 1), p), &grid()).unwrap();
    let err = (&final_row(&t).value - Real::one(p)).abs();
    let s = slope(&t);
    let pass = err <= real(NORM_RATIO_TOL) && in_range(s, NORM_RATIO_SLOPE);
    Outcome::new(pass, format!("|value-1| at n={SCAN_MAX} {}; decay exponent {s:?}", sci(&err)))
}

fn mass_independence() -> Outcome {
    let p = prec();
    let tables = [
        fig1a_scan((1, 1), (1, 1), p),
        fig1a_scan((10, 1), (1, 10), p),
        fig1a_scan((1, 2), (5, 1), p),
    ];
    let finals: Vec<&Real> = tables.iter().map(|t| &final_row(t).value).collect();
    let max_err = tables.iter().map(|t| final_row(t).abs_error.clone()).reduce(Real::max).unwrap();
    let bound = &max_err * MASS_SPREAD_FACTOR;
    let mut spread = Real::zero(p);
    for i in 0..finals.len() {
        for j in i + 1..finals.len() {
            spread = spread.max((finals[i] - finals[j]).abs());
        }
    }
    let pass = spread <= bound;
    Outcome::new(
        pass,
        format!(
            "final values {}; max pairwise gap {} vs 3 x max final abs_error {}",
            finals.iter().map(|v| v.to_decimal(8)).collect::<Vec<_>>().join(", "),
            sci(&spread),
            sci(&bound)
        ),
    )
}

fn all_scans(p: Precision, ns: &[usize]) -> Vec<ConvergenceTable> {
    vec![
        gamma_ratio_scan(2, 0, ns, p).unwrap(),
        endpoint_limit_scan(&jp((0, 1), (1, 1), p), 1, ns).unwrap(),
        norm_limit_scan(&jp((0, 1), (0, 1), p), ns).unwrap(),
        kernel_limit_scan(&jp((0, 1), (1, 1), p), 1, 0, ns).unwrap(),
        derivative_ratio_scan(&jp((0, 1), (1, 1), p), &masses((1, 1), (1, 1), p), 2, ns).unwrap(),
        norm_ratio_scan(&jp((0, 1), (1, 1), p), &masses((1, 1), (1, 1), p), ns).unwrap(),
        derivative_ratio_scan(&jp((1, 2), (5, 2), p), &masses((10, 1), (1, 10), p), 3, ns).unwrap(),
    ]
}

fn precision_stability() -> Outcome {
    let ns = default_grid(STABILITY_N);
    let lo = all_scans(prec(), &ns);
    let hi = all_scans(prec().doubled(), &ns);
    let mut worst = Real::zero(prec().doubled());
    let mut at = String::new();
    for (a, b) in lo.iter().zip(&hi) {
        for (x, y) in a.rows.iter().zip(&b.rows) {
            let rel = (&x.value - &y.value).abs() / y.value.abs();
            if rel > worst {
                worst = rel;
                at = format!("{} n={}", a.kind, x.n);
            }
        }
    }
    let pass = worst <= real(STABILITY_TOL);
    Outcome::new(
        pass,
        format!("{} scans on n <= {STABILITY_N}; worst relative gap 256 vs 512 bits {} {at}", lo.len(), sci(&worst)),
    )
}

fn run_figure(dir: &Path, which: &str) -> (Vec<u8>, Vec<u8>, bool) {
    let status = Command::new(env!("CARGO_BIN_EXE_opq"))
        .args(["figure", "--which", which])
        .current_dir(dir)
        .output()
        .expect("opq runs");
    let csv = std::fs::read(dir.join(format!("{which}.csv"))).unwrap_or_default();
    let meta = std::fs::read(dir.join(format!("{which}.csv.meta.json"))).unwrap_or_default();
    (csv, meta, status.status.success())
}

fn cli_contract() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for which in ["fig1a", "fig1b"] {
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let (csv1, meta1, ok1) = run_figure(d1.path(), which);
        let (csv2, meta2, ok2) = run_figure(d2.path(), which);
        let header = csv1.split(|&b| b == b'\n').next() == Some(b"n,value,limit,abs_error".as_slice());
        let identical = csv1 == csv2 && meta1 == meta2 && !csv1.is_empty();
        let ok = ok1 && ok2 && header && identical;
        pass &= ok;
        parts.push(format!("{which}: exit 0 {}, header {header}, rerun byte-identical {identical}", ok1 && ok2));
    }
    Outcome::new(pass, parts.join("; "))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("identity suites", identity_suites),
        ("algebraic anchors", anchors),
        ("oracle equivalence", oracle_equivalence),
        ("S-orthogonality", s_orthogonality),
        ("gamma ratio scan", gamma_ratio),
        ("endpoint and norm limits", endpoint_and_norm_limits),
        ("kernel limit", kernel_limit),
        ("derivative ratio (fig1a)", derivative_ratio),
        ("norm ratio (fig1b)", norm_ratio),
        ("limit independent of M, N", mass_independence),
        ("precision stability", precision_stability),
        ("CLI figure contract", cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::new(false, format!("panicked: {msg}"))
        });
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name:<26} {} [{:.1}s]",
            i + 1,
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
