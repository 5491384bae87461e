use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rncurves_cli::commands::{self, CurveSource, FamilyArgs};
use rncurves_cli::config::{Format, RunConfig};
use rncurves_cli::output::{emit, render};
use rncurves_cli::parse;
use rncurves_cli::suites::SuiteParams;
use rncurves_cli::Failure;
use rncurves_core::crit::Family;
use rncurves_core::Cx64;

#[derive(Parser)]
#[command(name = "rncurves", version, about = "Real-normalized differentials, KdV Hamiltonians and Boutroux curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Branch points, coefficients and discriminant of a curve.
    CurveInfo {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        common: Common,
    },
    /// KdV Hamiltonians from the real-normalized quasimomentum.
    Kdv {
        #[command(flatten)]
        curve: CurveArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Solves the Boutroux condition for real g3 in one family, or scans all.
    Boutroux {
        #[command(flatten)]
        family: FamilyFlags,
        /// Run every family and rank them against the reference h.
        #[arg(long)]
        scan: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Runs a verification suite: triple-consistency, gradient or obstruction.
    Verify {
        suite: String,
        #[arg(long)]
        g2: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        g3: Option<f64>,
        #[arg(long)]
        family: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Boutroux residuals over a grid of g3 values.
    Sweep {
        #[command(flatten)]
        family: FamilyFlags,
        /// Number of grid points.
        #[arg(long, default_value_t = 33)]
        points: usize,
        /// Output format, overriding the configuration.
        #[arg(long, value_parser = ["json", "csv"])]
        format: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// JSON configuration file (falls back to $RNCURVES_CONFIG).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the machine-readable result here instead of standard output.
    #[arg(long)]
    json_out: Option<PathBuf>,
    /// Quadrature tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Series order.
    #[arg(long)]
    order: Option<usize>,
}

impl Common {
    fn config(&self) -> Result<RunConfig, Failure> {
        let mut cfg = RunConfig::load(self.config.as_deref())?;
        if let Some(tol) = self.tol {
            cfg.tol = tol;
        }
        if let Some(order) = self.order {
            cfg.order = order;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Comma-separated complex values held as one argument.
#[derive(Clone)]
struct ComplexList(Vec<Cx64>);

fn complex_list(s: &str) -> Result<ComplexList, String> {
    parse::complex_list(s).map(ComplexList)
}

#[derive(Args)]
struct CurveArgs {
    /// Lower coefficients s1,s2,s3 (or five for genus 2) of the monic polynomial.
    #[arg(long, value_parser = complex_list, allow_hyphen_values = true, conflicts_with_all = ["roots", "family"])]
    coeffs: Option<ComplexList>,
    /// Branch points (three or five).
    #[arg(long, value_parser = complex_list, allow_hyphen_values = true, conflicts_with = "family")]
    roots: Option<ComplexList>,
    /// Convention family, used with --g2 and --g3.
    #[arg(long, requires_all = ["g2", "g3"])]
    family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    g2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    g3: Option<f64>,
}

impl CurveArgs {
    fn source(&self) -> Result<CurveSource, Failure> {
        match (&self.coeffs, &self.roots, &self.family) {
            (Some(c), _, _) => Ok(CurveSource::Coeffs(c.0.clone())),
            (_, Some(r), _) => Ok(CurveSource::Roots(r.0.clone())),
            (_, _, Some(f)) => Ok(CurveSource::Family {
                family: family(f)?,
                g2: self.g2.expect("clap enforces --g2"),
                g3: self.g3.expect("clap enforces --g3"),
            }),
            _ => Err(Failure::Input("give --coeffs, --roots or --family with --g2 and --g3".into())),
        }
    }
}

#[derive(Args)]
struct FamilyFlags {
    /// Convention family: i, ii, iii, iv or the full tag.
    #[arg(long, default_value = "iv")]
    family: String,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    g2: f64,
    /// Search interval for g3.
    #[arg(long, value_parser = parse::bracket, allow_hyphen_values = true)]
    bracket: Option<(f64, f64)>,
}

impl FamilyFlags {
    fn resolve(&self) -> Result<FamilyArgs, Failure> {
        Ok(FamilyArgs { family: family(&self.family)?, g2: self.g2, bracket: self.bracket })
    }
}

fn family(tag: &str) -> Result<Family, Failure> {
    Family::from_tag(tag).ok_or_else(|| {
        let known: Vec<&str> = Family::ALL.iter().map(|f| f.tag()).collect();
        Failure::Input(format!("unknown family {tag:?}; expected one of {}", known.join(", ")))
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::CurveInfo { curve, common } => {
            common.config()?;
            emit(&commands::curve_info(&curve.source()?)?, common.json_out.as_deref())
        }
        Command::Kdv { curve, common } => {
            let cfg = common.config()?;
            emit(&commands::kdv(&curve.source()?, &cfg)?, common.json_out.as_deref())
        }
        Command::Boutroux { family, scan, common } => {
            let cfg = common.config()?;
            let text = if scan {
                if family.bracket.is_some() {
                    return Err(Failure::Input("--bracket applies to a single family; set per-family brackets in the config for --scan".into()));
                }
                commands::boutroux_scan(family.g2, &cfg)?
            } else {
                commands::boutroux(family.resolve()?, &cfg)?
            };
            emit(&text, common.json_out.as_deref())
        }
        Command::Verify { suite, g2, g3, family: fam, common } => {
            let cfg = common.config()?;
            let params = SuiteParams { g2, g3, family: fam.as_deref().map(family).transpose()? };
            let report = commands::verify(&suite, params, &cfg)?;
            print!("{}", report.text());
            if let Some(path) = common.json_out.as_deref() {
                emit(&render(&report.json()), Some(path))?;
            }
            match report.failed() {
                0 => Ok(()),
                failed => Err(Failure::ChecksFailed { failed, total: report.checks.len() }),
            }
        }
        Command::Sweep { family, points, format, common } => {
            let cfg = common.config()?;
            let format = match format.as_deref() {
                Some("csv") => Format::Csv,
                Some(_) => Format::Json,
                None => cfg.format,
            };
            emit(&commands::sweep(family.resolve()?, points, format, &cfg)?, common.json_out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rncurves: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
