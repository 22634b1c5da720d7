use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use noctest::oracle::{compare, OracleError, OracleLimits};
use noctest::report::{gantt_svg, oracle_csv, schedule_csv};
use noctest::scheduler::{plan, PlanError, PlanOptions};
use noctest::sweep::{run_cell, sweep_csv, SweepSpec};
use noctest::synthetic::{generate_synthetic, SyntheticSpec};
use noctest::sysdesc::{load_system, SystemDescription};
use noctest::PowerFraction;

const EXIT_VALIDATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

/// Plan core tests of a NoC-based SoC, reusing embedded processors as test
/// sources and sinks under a power budget.
#[derive(Parser)]
#[command(name = "noctest", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a system description and print a summary.
    Validate { path: PathBuf },
    /// Produce a greedy test schedule.
    Plan {
        path: PathBuf,
        #[command(flatten)]
        opts: PlanArgs,
        /// Write the schedule CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write an SVG Gantt chart (one lane per port or processor) here.
        #[arg(long)]
        gantt: Option<PathBuf>,
    },
    /// Compare the greedy schedule with the exhaustive optimum (small systems only).
    Compare {
        path: PathBuf,
        #[command(flatten)]
        opts: PlanArgs,
        /// Write the optimal schedule CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Search-node budget for the exhaustive search.
        #[arg(long, default_value_t = 10_000_000)]
        max_nodes: u64,
    },
    /// Makespan over reused-processor counts and power limits.
    Sweep {
        path: PathBuf,
        /// Processor counts: a list such as `0,2,4,6`, ranges such as `0..6` (inclusive), or both.
        #[arg(long, value_parser = parse_counts)]
        processors: Counts,
        /// Power limits as ratios of the summed module test power, or `none`.
        #[arg(long, value_delimiter = ',', value_parser = parse_fraction, default_value = "none")]
        power_fractions: Vec<Option<PowerFraction>>,
        /// Let sessions share NoC links.
        #[arg(long)]
        no_exclusive_links: bool,
        /// Write the sweep CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a seeded synthetic system description.
    Gen {
        #[arg(long)]
        seed: u64,
        /// Grid size as ROWSxCOLS.
        #[arg(long, value_parser = parse_grid)]
        grid: (u32, u32),
        #[arg(long)]
        cores: usize,
        #[arg(long)]
        processors: usize,
        /// Write the description here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct PlanArgs {
    /// Reuse the first K processors (by id) as test endpoints. Defaults to all.
    #[arg(long, value_name = "K")]
    processors: Option<usize>,
    /// Power limit as a ratio of the summed module test power (0.5 means half), or `none`.
    #[arg(long, value_parser = parse_limit, default_value = "none")]
    power_fraction: Limit,
    /// Let concurrent sessions share NoC links.
    #[arg(long)]
    no_exclusive_links: bool,
    /// Order processor self-tests by position like cores instead of first.
    #[arg(long)]
    processor_last: bool,
    /// Recompute priorities as processors become available (not supported).
    #[arg(long, hide = true)]
    dynamic_priority: bool,
}

impl PlanArgs {
    fn options(&self, sys: &SystemDescription) -> Result<PlanOptions, Failure> {
        if self.dynamic_priority {
            return Err(Failure::usage("--dynamic-priority is not supported"));
        }
        Ok(PlanOptions {
            power_fraction: self.power_fraction.0,
            processors_reused: self.processors.unwrap_or(sys.processors.len()),
            exclusive_links: !self.no_exclusive_links,
            processor_first: !self.processor_last,
        })
    }
}

#[derive(Clone, Debug)]
struct Counts(Vec<usize>);

fn parse_counts(s: &str) -> Result<Counts, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.parse().map_err(|_| format!("bad range `{part}`"))?;
            let b: usize = b.parse().map_err(|_| format!("bad range `{part}`"))?;
            if a > b {
                return Err(format!("empty range `{part}`"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("bad processor count `{part}`"))?);
        }
    }
    if out.is_empty() {
        return Err("the processor count list is empty".into());
    }
    Ok(Counts(out))
}

fn parse_fraction(s: &str) -> Result<Option<PowerFraction>, String> {
    if s.trim().eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|e: noctest::fraction::ParseFractionError| e.to_string())
}

/// `none` or a fraction; wrapped so clap does not treat the option as optional.
#[derive(Clone, Copy, Debug)]
struct Limit(Option<PowerFraction>);

fn parse_limit(s: &str) -> Result<Limit, String> {
    parse_fraction(s).map(Limit)
}

fn parse_grid(s: &str) -> Result<(u32, u32), String> {
    let (r, c) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected ROWSxCOLS, got `{s}`"))?;
    let r = r.parse().map_err(|_| format!("bad row count in `{s}`"))?;
    let c = c.parse().map_err(|_| format!("bad column count in `{s}`"))?;
    Ok((r, c))
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn validation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }
}

impl From<PlanError> for Failure {
    fn from(e: PlanError) -> Self {
        match e {
            PlanError::TooManyProcessors { .. } => Failure::usage(e.to_string()),
            PlanError::Infeasible { .. } => Failure {
                code: EXIT_INFEASIBLE,
                message: e.to_string(),
            },
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<SystemDescription, Failure> {
    let doc = read(path)?;
    load_system(&doc).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match out {
        Some(p) => write(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { path } => {
            let sys = load(&path)?;
            println!(
                "valid: {} cores, {} processors, {} io ports on a {}x{} grid",
                sys.cores.len(),
                sys.processors.len(),
                sys.io_ports.len(),
                sys.noc.rows,
                sys.noc.cols
            );
        }
        Command::Plan {
            path,
            opts,
            out,
            gantt,
        } => {
            let sys = load(&path)?;
            let opts = opts.options(&sys)?;
            let sched = plan(&sys, &opts)?;
            if let Some(out) = out {
                write(&out, &schedule_csv(&sched))?;
            }
            if let Some(gantt) = gantt {
                write(&gantt, &gantt_svg(&sys, &sched))?;
            }
            println!("makespan={} peak_power={}", sched.makespan, sched.peak_power());
        }
        Command::Compare {
            path,
            opts,
            out,
            max_nodes,
        } => {
            let sys = load(&path)?;
            let opts = opts.options(&sys)?;
            let limits = OracleLimits {
                max_nodes,
                ..OracleLimits::default()
            };
            let cmp = compare(&sys, &opts, limits).map_err(|e| match e {
                OracleError::Plan(p) => p.into(),
                OracleError::Infeasible => Failure {
                    code: EXIT_INFEASIBLE,
                    message: e.to_string(),
                },
                other => Failure::usage(other.to_string()),
            })?;
            if let Some(out) = out {
                write(&out, &oracle_csv(&cmp.optimal.schedule, cmp.optimal.exact))?;
            }
            println!(
                "greedy={} optimal={} gap={:.4} exact={}",
                cmp.greedy.makespan, cmp.optimal.schedule.makespan, cmp.gap, cmp.optimal.exact
            );
        }
        Command::Sweep {
            path,
            processors,
            power_fractions,
            no_exclusive_links,
            out,
        } => {
            let sys = load(&path)?;
            let spec = SweepSpec {
                processor_counts: processors.0,
                power_fractions,
                base: PlanOptions::default().with_exclusive_links(!no_exclusive_links),
            };
            let cells = spec.cells(&sys).map_err(|e| Failure::usage(e.to_string()))?;
            let rows: Vec<_> = cells.par_iter().map(|o| run_cell(&sys, o)).collect();
            emit(out.as_deref(), &sweep_csv(&rows))?;
        }
        Command::Gen {
            seed,
            grid: (rows, cols),
            cores,
            processors,
            out,
        } => {
            let sys = generate_synthetic(seed, &SyntheticSpec::new(rows, cols, cores, processors))
                .map_err(|e| Failure::validation(e.to_string()))?;
            emit(out.as_deref(), &sys.to_json())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
