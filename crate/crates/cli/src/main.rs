//! gridups: validate grid diagrams, compute the Upsilon invariant and its
//! homology decomposition, audit move invariance, and emit preset diagrams.
//!
//! Exit codes: 0 success, 1 domain error (or a failed audit), 2 I/O error,
//! 3 state-count guard refusal.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gridups_core::grid::{preset_torus, preset_unknot, GridDiagram};
use gridups_core::poly::RationalT;
use gridups_core::upsilon::{
    decomposition_at, invariance_audit, upsilon_at_with, upsilon_profile_with, AuditConfig,
};
use gridups_core::{Error, EvalOptions, DEFAULT_STATE_GUARD};

#[derive(Parser)]
#[command(name = "gridups", version, about = "Grid-diagram Upsilon calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a grid file and report its component count
    Validate { path: PathBuf },
    /// Evaluate Upsilon at chosen t values, or sample a whole profile
    Upsilon {
        path: PathBuf,
        /// Rational t = P/Q in [0, 2]; repeatable
        #[arg(long = "t", value_name = "P/Q")]
        t: Vec<String>,
        /// Sample Upsilon at k/N for k = 0..2N (default 4 when no --t given)
        #[arg(long, value_name = "N", conflicts_with = "t")]
        samples: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Truncation depth override for the reduction engine
        #[arg(long, value_name = "D")]
        truncation: Option<u32>,
        /// Write the report here instead of standard output
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Tower decomposition of the homology at one t
    Homology {
        path: PathBuf,
        #[arg(long = "t", value_name = "P/Q")]
        t: String,
        #[arg(long, value_name = "D")]
        truncation: Option<u32>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Seeded move-invariance audit with a full move log
    Audit {
        path: PathBuf,
        #[arg(long, value_name = "M", default_value_t = 10)]
        moves: usize,
        #[arg(long, value_name = "S", default_value_t = 0)]
        seed: u64,
        /// Cap on grid growth during the move walk
        #[arg(long = "max-n", value_name = "N", default_value_t = 7)]
        max_n: usize,
        /// Rational t = P/Q; repeatable (default 1/2)
        #[arg(long = "t", value_name = "P/Q")]
        t: Vec<String>,
        /// Also compare W-normalized tower multisets along the sequence
        #[arg(long)]
        compare_towers: bool,
        #[arg(long, value_name = "D")]
        truncation: Option<u32>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Write a preset grid file: unknot:<n> or torus:<p>,<q>
    Preset {
        spec: String,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 2,
        Error::GuardExceeded { .. } => 3,
        _ => 1,
    }
}

fn env_u64(name: &str) -> Option<u64> {
    std::env::var(name).ok().and_then(|v| v.parse().ok())
}

fn options(truncation_flag: Option<u32>) -> EvalOptions {
    EvalOptions {
        state_guard: env_u64("GRIDUPS_GUARD").unwrap_or(DEFAULT_STATE_GUARD),
        truncation: truncation_flag.or_else(|| env_u64("GRIDUPS_TRUNCATION").map(|v| v as u32)),
        ..EvalOptions::default()
    }
}

fn load_grid(path: &Path) -> Result<GridDiagram, Error> {
    let text = fs::read_to_string(path)?;
    GridDiagram::parse(&text)
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn parse_t_list(raw: &[String]) -> Result<Vec<RationalT>, Error> {
    raw.iter().map(|s| RationalT::parse(s)).collect()
}

#[derive(Serialize)]
struct PointJson {
    t: String,
    upsilon: String,
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Validate { path } => {
            let d = load_grid(&path)?;
            println!("valid, n={}, components={}", d.n(), d.component_count());
            Ok(0)
        }
        Command::Upsilon { path, t, samples, format, truncation, out } => {
            let d = load_grid(&path)?;
            let opts = options(truncation);
            let content = if t.is_empty() {
                let n = samples.unwrap_or(4);
                let profile = upsilon_profile_with(&d, n, &opts)?;
                match format {
                    Format::Csv => profile.to_csv(),
                    Format::Json => format!("{}\n", profile.to_json()),
                }
            } else {
                let ts = parse_t_list(&t)?;
                let mut points = Vec::with_capacity(ts.len());
                for tv in ts {
                    points.push((tv, upsilon_at_with(&d, tv, &opts)?));
                }
                match format {
                    Format::Csv => {
                        let mut s = String::from("t,upsilon\n");
                        for (tv, v) in &points {
                            s.push_str(&format!("{tv},{v}\n"));
                        }
                        s
                    }
                    Format::Json => {
                        let rows: Vec<PointJson> = points
                            .iter()
                            .map(|(tv, v)| PointJson { t: tv.to_string(), upsilon: v.to_string() })
                            .collect();
                        format!("{}\n", serde_json::to_string(&rows).expect("serialize"))
                    }
                }
            };
            emit(&out, &content)?;
            Ok(0)
        }
        Command::Homology { path, t, truncation, out } => {
            let d = load_grid(&path)?;
            let opts = options(truncation);
            let tv = RationalT::parse(&t)?;
            let dec = decomposition_at(&d, tv, &opts)?;
            emit(&out, &format!("{}\n", dec.report_json()))?;
            Ok(0)
        }
        Command::Audit { path, moves, seed, max_n, t, compare_towers, truncation, out } => {
            let d = load_grid(&path)?;
            let opts = options(truncation);
            let t_values = if t.is_empty() {
                vec![RationalT::new(1, 2).expect("1/2 is valid")]
            } else {
                parse_t_list(&t)?
            };
            let cfg = AuditConfig { seed, moves, max_n, t_values, compare_towers };
            let report = invariance_audit(&d, &cfg, &opts)?;
            emit(&out, &format!("{}\n", report.to_json()))?;
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::Preset { spec, out } => {
            let d = parse_preset(&spec)?;
            emit(&out, &format!("{}\n", d.to_canonical_json()))?;
            Ok(0)
        }
    }
}

fn parse_preset(spec: &str) -> Result<GridDiagram, Error> {
    let bad = || Error::BadPreset(format!("expected unknot:<n> or torus:<p>,<q>, got `{spec}`"));
    let (kind, args) = spec.split_once(':').ok_or_else(bad)?;
    match kind {
        "unknot" => {
            let n: usize = args.trim().parse().map_err(|_| bad())?;
            preset_unknot(n)
        }
        "torus" => {
            let (p, q) = args.split_once(',').ok_or_else(bad)?;
            let p: usize = p.trim().parse().map_err(|_| bad())?;
            let q: usize = q.trim().parse().map_err(|_| bad())?;
            preset_torus(p, q)
        }
        _ => Err(bad()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
