use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use opq::commands::{
    cmd_figure, cmd_scan, cmd_table, cmd_verify, render_report, render_table, scan_defaults, write_scan, Figure,
    TableKind,
};
use opq::output::emit;
use opq::suites::Suite;
use opq::{CommandKind, ConfigLayer, Format, OpqError, RunConfig};
use opq_core::asymptotics::ScanKind;

#[derive(Parser)]
#[command(name = "opq", version, about = "Double Geronimus and Sobolev-type orthogonal polynomials: identity checks, endpoint asymptotics, figure data")]
struct Cli {
    /// TOML file with any of the flag values; flags take priority.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    dump_config: bool,
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Point mass on values at `a`.
    #[arg(long = "M", global = true, allow_hyphen_values = true)]
    m: Option<String>,
    /// Point mass on derivatives at `a`.
    #[arg(long = "N", global = true, allow_hyphen_values = true)]
    n: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, global = true)]
    n_max: Option<usize>,
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
    #[arg(long, global = true)]
    format: Option<Format>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the random-pair checks.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the identity and orthogonality suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
    },
    /// Convergence scan of an endpoint limit.
    Scan {
        #[arg(long, value_parser = parse_kind)]
        kind: ScanKind,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        l: Option<usize>,
        #[arg(long)]
        j: Option<usize>,
    },
    /// Data for the convergence figures, with a `.meta.json` sidecar.
    Figure {
        #[arg(long)]
        which: Figure,
    },
    /// Coefficient tables.
    Table {
        #[arg(long)]
        what: TableKind,
    },
}

fn parse_kind(s: &str) -> Result<ScanKind, String> {
    ScanKind::parse(s).ok_or_else(|| {
        let all: Vec<&str> = ScanKind::ALL.iter().map(|k| k.as_str()).collect();
        format!("unknown scan kind {s:?} (expected one of {})", all.join(", "))
    })
}

impl Cli {
    fn layer(&self) -> ConfigLayer {
        let c = &self.common;
        let (k, s, l, j) = match &self.cmd {
            Cmd::Scan { k, s, l, j, .. } => (*k, *s, *l, *j),
            _ => (None, None, None, None),
        };
        ConfigLayer {
            precision_bits: c.precision_bits,
            alpha: c.alpha.clone(),
            beta: c.beta.clone(),
            m: c.m.clone(),
            n: c.n.clone(),
            a: c.a.clone(),
            n_max: c.n_max,
            format: c.format,
            out: c.out.clone(),
            seed: c.seed,
            k,
            s,
            l,
            j,
        }
    }

    fn kind(&self) -> CommandKind {
        match self.cmd {
            Cmd::Verify { .. } => CommandKind::Verify,
            Cmd::Scan { .. } => CommandKind::Scan,
            Cmd::Figure { .. } => CommandKind::Figure,
            Cmd::Table { .. } => CommandKind::Table,
        }
    }
}

fn run(cli: &Cli) -> Result<bool, OpqError> {
    let mut file = cli.config.as_deref().map(ConfigLayer::load).transpose()?.unwrap_or_default();
    if let Cmd::Scan { kind, .. } = &cli.cmd {
        file = file.over(scan_defaults(*kind));
    }
    let mut cfg = RunConfig::resolve(cli.kind(), cli.layer(), Some(file))?;
    if let Cmd::Figure { which } = &cli.cmd {
        cfg = which.config(&cfg);
    }
    if cli.dump_config {
        emit(None, &cfg.to_toml())?;
        return Ok(true);
    }
    match &cli.cmd {
        Cmd::Verify { suite } => {
            let report = cmd_verify(&cfg, *suite)?;
            emit(cfg.out.as_deref(), &render_report(&cfg, &report))?;
            let failed = report.failures().count();
            eprintln!("verify {}: {} cases, {} failed", report.suite, report.cases.len(), failed);
            for c in report.failures() {
                eprintln!("  FAIL {} residual {} > {}", c.case_id, c.residual, c.tolerance);
            }
            Ok(report.overall_pass)
        }
        Cmd::Scan { kind, .. } => {
            let t = cmd_scan(&cfg, *kind)?;
            write_scan(&cfg, &t, None)?;
            Ok(true)
        }
        Cmd::Figure { which } => {
            let (_, path) = cmd_figure(&cfg, *which)?;
            eprintln!("wrote {}", path.display());
            Ok(true)
        }
        Cmd::Table { what } => {
            let t = cmd_table(&cfg, *what)?;
            emit(cfg.out.as_deref(), &render_table(&cfg, &t))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("opq: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
