//! The four subcommands as library calls. Nothing here touches the process
//! exit code; `main` maps results onto it.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use opq_core::asymptotics::{
    default_grid, derivative_ratio_scan, endpoint_limit_scan, gamma_ratio_scan, kernel_limit_scan, norm_limit_scan,
    norm_ratio_scan, ConvergenceTable, ScanKind,
};
use opq_core::geronimus::GGSystem;
use opq_core::jacobi::{recurrence_beta, recurrence_gamma, JacobiBasis};
use opq_core::sobolev::SobolevSystem;
use opq_core::Real;

use crate::config::{ConfigLayer, Format, RunConfig};
use crate::error::OpqError;
use crate::output::{emit, meta_path, scan_csv, scan_json, scan_meta, CoeffTable};
use crate::report::VerificationReport;
use crate::suites::{self, Context, Suite};

fn context(cfg: &RunConfig) -> Result<Context, OpqError> {
    Ok(Context {
        prec: cfg.prec()?,
        jacobi: cfg.jacobi()?,
        sobolev: cfg.sobolev()?,
        n_max: cfg.n_max,
        seed: cfg.seed,
    })
}

pub fn cmd_verify(cfg: &RunConfig, suite: Suite) -> Result<VerificationReport, OpqError> {
    suites::run(&context(cfg)?, suite)
}

pub fn render_report(cfg: &RunConfig, report: &VerificationReport) -> String {
    match cfg.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    }
}

/// Degrees for a scan: the default geometric grid up to `n_max`, or every
/// degree when `n_max` is below the grid start. Degrees below `n_min` are
/// dropped.
pub fn scan_grid(n_max: usize, n_min: usize) -> Vec<usize> {
    let mut ns = default_grid(n_max);
    if ns.is_empty() {
        ns = (1..=n_max).collect();
    }
    ns.retain(|&n| n >= n_min.max(1));
    ns
}

/// The scan-specific parameters each kind reads, with their defaults.
pub fn scan_defaults(kind: ScanKind) -> ConfigLayer {
    let mut d = ConfigLayer::default();
    match kind {
        ScanKind::Gamma => (d.k, d.l) = (Some(2), Some(0)),
        ScanKind::Endpoint => d.k = Some(1),
        ScanKind::Kernel => (d.k, d.s) = (Some(1), Some(0)),
        ScanKind::DerivRatio => d.j = Some(2),
        ScanKind::NormLimit | ScanKind::NormRatio => {}
    }
    d
}

pub fn cmd_scan(cfg: &RunConfig, kind: ScanKind) -> Result<ConvergenceTable, OpqError> {
    let prec = cfg.prec()?;
    let table = match kind {
        ScanKind::Gamma => gamma_ratio_scan(cfg.k.unwrap_or(2), cfg.l.unwrap_or(0), &scan_grid(cfg.n_max, 1), prec)?,
        ScanKind::Endpoint => {
            let k = cfg.k.unwrap_or(1);
            endpoint_limit_scan(&cfg.jacobi()?, k, &scan_grid(cfg.n_max, k))?
        }
        ScanKind::NormLimit => norm_limit_scan(&cfg.jacobi()?, &scan_grid(cfg.n_max, 1))?,
        ScanKind::Kernel => {
            let (k, s) = (cfg.k.unwrap_or(1), cfg.s.unwrap_or(0));
            kernel_limit_scan(&cfg.jacobi()?, k, s, &scan_grid(cfg.n_max, 1))?
        }
        ScanKind::DerivRatio => {
            let j = cfg.j.unwrap_or(2);
            derivative_ratio_scan(&cfg.jacobi()?, &cfg.sobolev()?, j, &scan_grid(cfg.n_max, j))?
        }
        ScanKind::NormRatio => norm_ratio_scan(&cfg.jacobi()?, &cfg.sobolev()?, &scan_grid(cfg.n_max, 1))?,
    };
    Ok(table)
}

pub fn render_scan(cfg: &RunConfig, t: &ConvergenceTable) -> String {
    match cfg.format {
        Format::Csv => scan_csv(t),
        Format::Json => scan_json(t),
    }
}

/// Writes a scan to `cfg.out` (with its sidecar) or to stdout.
pub fn write_scan(cfg: &RunConfig, t: &ConvergenceTable, figure: Option<&str>) -> Result<(), OpqError> {
    emit(cfg.out.as_deref(), &render_scan(cfg, t))?;
    if let Some(out) = &cfg.out {
        std::fs::write(meta_path(out), scan_meta(t, cfg.precision_bits, figure))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig1a,
    Fig1b,
}

impl Figure {
    pub fn as_str(self) -> &'static str {
        match self {
            Figure::Fig1a => "fig1a",
            Figure::Fig1b => "fig1b",
        }
    }

    pub fn kind(self) -> ScanKind {
        match self {
            Figure::Fig1a => ScanKind::DerivRatio,
            Figure::Fig1b => ScanKind::NormRatio,
        }
    }

    /// The figure's fixed parameters `α = 0`, `β = 1`, `j = 2` over `cfg`.
    /// Masses, precision, degree range and output settings come from `cfg`.
    pub fn config(self, cfg: &RunConfig) -> RunConfig {
        let mut c = cfg.clone();
        c.alpha = "0".into();
        c.beta = "1".into();
        c.j = Some(2);
        if c.out.is_none() {
            c.out = Some(PathBuf::from(format!("{}.{}", self.as_str(), c.format.extension())));
        }
        c
    }
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fig1a" => Ok(Figure::Fig1a),
            "fig1b" => Ok(Figure::Fig1b),
            other => Err(format!("unknown figure {other:?} (expected fig1a or fig1b)")),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Runs the figure's scan and writes the data file and its sidecar.
/// Returns the data path.
pub fn cmd_figure(cfg: &RunConfig, which: Figure) -> Result<(ConvergenceTable, PathBuf), OpqError> {
    let c = which.config(cfg);
    let t = cmd_scan(&c, which.kind())?;
    write_scan(&c, &t, Some(which.as_str()))?;
    Ok((t, c.out.expect("figure config always sets an output path")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Recurrence,
    GgExpansion,
    Connection,
    QqConnection,
    GgRecurrence,
    GgFiveTerm,
}

impl TableKind {
    pub const ALL: [TableKind; 6] = [
        TableKind::Recurrence,
        TableKind::GgExpansion,
        TableKind::Connection,
        TableKind::QqConnection,
        TableKind::GgRecurrence,
        TableKind::GgFiveTerm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TableKind::Recurrence => "recurrence",
            TableKind::GgExpansion => "gg_expansion",
            TableKind::Connection => "connection",
            TableKind::QqConnection => "qq_connection",
            TableKind::GgRecurrence => "gg_recurrence",
            TableKind::GgFiveTerm => "gg_five_term",
        }
    }
}

impl FromStr for TableKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown table {s:?}"))
    }
}

impl fmt::Display for TableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn d(x: &Real) -> String {
    x.to_decimal_full()
}

pub fn cmd_table(cfg: &RunConfig, what: TableKind) -> Result<CoeffTable, OpqError> {
    let p = cfg.jacobi()?;
    let n_max = cfg.n_max;
    let closed = "closed_form".to_string();
    let gg = || -> Result<GGSystem, OpqError> { context(cfg)?.gg() };
    let mut t;
    match what {
        TableKind::Recurrence => {
            t = CoeffTable::new(what.as_str(), &["n", "beta", "gamma", "provenance"]);
            for n in 0..=n_max {
                let g = if n == 0 { Real::zero(p.prec()) } else { recurrence_gamma(&p, n) };
                t.push(vec![n.to_string(), d(&recurrence_beta(&p, n)), d(&g), closed.clone()]);
            }
        }
        TableKind::GgExpansion => {
            let g = gg()?;
            t = CoeffTable::new(what.as_str(), &["n", "B", "C", "provenance"]);
            for n in 0..=n_max {
                let (b, c) = g.expansion_coeffs(n);
                t.push(vec![n.to_string(), d(&b), d(&c), closed.clone()]);
            }
        }
        TableKind::Connection => {
            let g = gg()?;
            t = CoeffTable::new(what.as_str(), &["n", "sigma_np1", "sigma_n", "provenance"]);
            for n in 0..=n_max {
                let c = g.base_to_gg(n);
                t.push(vec![n.to_string(), d(&c.s_pp1), d(&c.s_p0), c.provenance.to_string()]);
            }
        }
        TableKind::GgRecurrence => {
            let g = gg()?;
            t = CoeffTable::new(what.as_str(), &["n", "sigma_nn", "sigma_nnm1", "provenance"]);
            for n in 0..=n_max {
                let c = g.three_term(n);
                t.push(vec![n.to_string(), d(&c.sigma_nn), d(&c.sigma_nm1), c.provenance.to_string()]);
            }
        }
        TableKind::GgFiveTerm => {
            let g = gg()?;
            t = CoeffTable::new(what.as_str(), &["n", "a_np2", "a_np1", "a_n", "a_nm1", "a_nm2", "provenance"]);
            for n in 0..=n_max {
                let c = g.five_term(n);
                let one = Real::one(g.prec());
                t.push(vec![
                    n.to_string(),
                    d(&one),
                    d(&c.a_pp1),
                    d(&c.a_p0),
                    d(&c.a_m1),
                    d(&c.a_m2),
                    c.provenance.to_string(),
                ]);
            }
        }
        TableKind::QqConnection => {
            let g = gg()?;
            let s = SobolevSystem::new(JacobiBasis::new(&p), cfg.sobolev()?)?;
            t = CoeffTable::new(what.as_str(), &["n", "a_np2", "a_np1", "a_n", "a_nm1", "a_nm2", "provenance"]);
            for n in 0..=n_max {
                let c = s.qq_connection(&g, n)?;
                t.push(vec![
                    n.to_string(),
                    d(&Real::one(g.prec())),
                    d(&c.a_pp1),
                    d(&c.a_p0),
                    d(&c.a_m1),
                    d(&c.a_m2),
                    c.provenance.to_string(),
                ]);
            }
        }
    }
    Ok(t)
}

pub fn render_table(cfg: &RunConfig, t: &CoeffTable) -> String {
    match cfg.format {
        Format::Csv => t.to_csv(),
        Format::Json => t.to_json(),
    }
}
