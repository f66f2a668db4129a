use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use conelab::checks::{self, VerifyOptions};
use conelab::report::{Metadata, Report, REPORT_VERSION};
use conelab::scan::{self, Format, ScanConfig};
use conelab::slope::DEFAULT_THRESHOLD;
use conelab::{LabError, LabResult};
use conelab_core::operators::{l2_opnorm, l2_opnorm_dense, PowerIteration, DENSE_LIMIT};
use conelab_core::subspace::predicted_max_dim;
use conelab_core::{max_subspace_in_cone, ConeOperator, FieldElement, FieldSpec, Space};
use serde_json::json;

#[derive(Parser)]
#[command(name = "conelab", version, about = "Restricted averaging over finite-field cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named check (or `all`) and print a report.
    Verify {
        #[arg(long)]
        check: String,
        /// Characteristic; with --e selects a single field.
        #[arg(long)]
        p: Option<u32>,
        #[arg(long, default_value_t = 1)]
        e: u32,
        #[arg(long)]
        d: usize,
        /// Comma-separated field orders; overrides --p/--e.
        #[arg(long, value_delimiter = ',')]
        qs: Option<Vec<u32>>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutFormat,
    },
    /// Run an exponent scan from a key=value config file.
    Scan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<OutFormat>,
    },
    /// Search for a largest subspace inside the cone.
    Subspace {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        e: u32,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = checks::SUBSPACE_BUDGET)]
        budget: u64,
    },
    /// Estimate the L^2 -> L^2(sigma) norm of the averaging operator.
    Opnorm {
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        e: u32,
        #[arg(long)]
        d: usize,
    },
}

fn field(p: u32, e: u32) -> LabResult<FieldSpec> {
    Ok(FieldSpec::new(p as u64, e)?)
}

fn emit(report: &Report, out: Option<&PathBuf>, format: Format) -> LabResult<()> {
    let w: Box<dyn Write> = match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    };
    match format {
        Format::Csv => report.write_csv(w),
        Format::Json => report.write_json(w),
    }
}

fn to_format(f: OutFormat) -> Format {
    match f {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
    }
}

fn run(cli: Cli) -> LabResult<bool> {
    match cli.command {
        Command::Verify {
            check,
            p,
            e,
            d,
            qs,
            seed,
            threshold,
            out,
            format,
        } => {
            if !(threshold.is_finite() && threshold > 0.0) {
                return Err(LabError::Config(format!("bad threshold {threshold}")));
            }
            let qs = match (qs, p) {
                (Some(qs), _) => Some(qs),
                (None, Some(p)) => Some(vec![field(p, e)?.q()]),
                (None, None) => None,
            };
            let ids: Vec<&str> = if check == "all" {
                checks::checks_for(d)
            } else {
                vec![check.as_str()]
            };
            let opts = VerifyOptions {
                seed,
                threshold,
                ..VerifyOptions::default()
            };
            let rows = checks::verify_suite(&ids, d, qs.as_deref(), &opts)?;
            let mut used: Vec<u32> = rows.iter().filter_map(|r| r.q).collect();
            used.sort_unstable();
            used.dedup();
            let report = Report {
                metadata: Metadata {
                    version: REPORT_VERSION.into(),
                    seed,
                    threshold,
                    fields: scan::field_info(&used)?,
                    notes: vec![format!("verify {check} d={d}")],
                },
                rows,
            };
            emit(&report, out.as_ref(), to_format(format))?;
            Ok(!report.has_failure())
        }
        Command::Scan {
            config,
            out,
            format,
        } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg = ScanConfig::parse(&text)?;
            if let Some(out) = out {
                cfg.out = Some(out);
            }
            if let Some(f) = format {
                cfg.format = to_format(f);
            }
            let report = scan::run_scan(&cfg)?;
            emit(&report, cfg.out.as_ref(), cfg.format)?;
            Ok(!report.has_failure())
        }
        Command::Subspace { p, e, d, budget } => {
            let f = field(p, e)?;
            let space = Space::new(f.clone(), d)?;
            let found = max_subspace_in_cone(&space, budget)?;
            let basis: Vec<Vec<u32>> = found
                .subspace
                .basis()
                .iter()
                .map(|v| v.coords().iter().map(|c| c.index()).collect())
                .collect();
            let value = json!({
                "p": p,
                "e": e,
                "d": d,
                "eta_minus_one": f.eta(f.neg(FieldElement::ONE)),
                "predicted_max_dim": predicted_max_dim(&f, d),
                "found_dim": found.subspace.dim(),
                "basis": basis,
                "exhaustive": found.exhaustive,
            });
            println!("{}", serde_json::to_string_pretty(&value)?);
            Ok(found.subspace.dim() == found.predicted_max_dim)
        }
        Command::Opnorm { p, e, d } => {
            let space = Space::new(field(p, e)?, d)?;
            let op = ConeOperator::new(&space)?;
            let power = l2_opnorm(&op, PowerIteration::default())?;
            let dense = if space.len() <= DENSE_LIMIT {
                Some(l2_opnorm_dense(&op)?)
            } else {
                None
            };
            let value = json!({
                "q": space.q(),
                "d": d,
                "cone_size": op.cone().cardinality(),
                "power_iteration": power,
                "dense": dense,
            });
            println!("{}", serde_json::to_string_pretty(&value)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
