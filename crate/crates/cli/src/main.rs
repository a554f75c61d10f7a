//! Command-line front end: verification suites and parameter sweeps with
//! deterministic table, CSV, and JSON output.
//!
//! Exit codes: 0 on success with all verifications passing, 1 when any
//! verification reports a failure, 2 on usage errors.

mod commands;
mod emit;
mod suites;

use clap::{Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "blspec", version, about = "Exact spectral verification for the two-urn chain")]
struct Cli {
    /// Output encoding.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Significant digits for floating-point columns.
    #[arg(long, global = true, default_value_t = 12)]
    digits: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variant {
    V1,
    V2,
    Gelfand,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolVersion {
    V1,
    V2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Lemmas,
    Spectral,
    Solutions,
    Concentration,
    Gelfand,
    Bounds,
    All,
}

impl From<SuiteArg> for suites::Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Lemmas => suites::Suite::Lemmas,
            SuiteArg::Spectral => suites::Suite::Spectral,
            SuiteArg::Solutions => suites::Suite::Solutions,
            SuiteArg::Concentration => suites::Suite::Concentration,
            SuiteArg::Gelfand => suites::Suite::Gelfand,
            SuiteArg::Bounds => suites::Suite::Bounds,
            SuiteArg::All => suites::Suite::All,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact spectral measure: probabilities, statistic values, eigenvalues.
    Spectrum {
        #[arg(long)]
        n: u64,
    },
    /// Kolmogorov distance to Exp(1) per chain size.
    Kolmogorov {
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<u64>,
    },
    /// Tail discrepancy at t_n = 2 + 2/sqrt(n) for even square sizes.
    Sharpness {
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<u64>,
    },
    /// Transition rates of one kernel plus its detailed-balance status.
    Kernels {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = Variant::V1)]
        variant: Variant,
        /// Subset size for the induced chain (defaults to n/2).
        #[arg(long)]
        k: Option<u64>,
    },
    /// Exact conditional moments of D = W' - W per state.
    Moments {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = Variant::V1)]
        variant: Variant,
    },
    /// Term-by-term bound evaluation at one or more t values.
    Bounds {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        t: Option<f64>,
        /// Uniform grid "start:end:count"; points exclude start, include end.
        #[arg(long)]
        t_grid: Option<String>,
        #[arg(long, value_enum, default_value_t = Variant::V1)]
        variant: Variant,
        /// Tail mode: exact, tool1, tool2 (v1) or exact, tool1, tool3 (v2).
        #[arg(long)]
        tail: Option<String>,
        /// Overrides the recipe lambda (rational, e.g. "1/8" or "0.04").
        #[arg(long)]
        lambda: Option<String>,
        /// Tool-1 truncation level (rational).
        #[arg(long)]
        c: Option<String>,
        /// Tool-3 kappa (rational).
        #[arg(long)]
        kappa: Option<String>,
        /// Tool-2 constants (rationals); default is the stock recipe.
        #[arg(long)]
        k1: Option<String>,
        #[arg(long)]
        k2: Option<String>,
        #[arg(long)]
        big_k1_sq: Option<String>,
        #[arg(long)]
        big_k2: Option<String>,
        #[arg(long)]
        big_k3: Option<String>,
    },
    /// Stein-equation solution audits: residuals and derivative bounds.
    Solutions {
        #[arg(long, value_enum, default_value_t = SolVersion::V1)]
        version: SolVersion,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,1,2,5")]
        t_list: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        grid_size: usize,
    },
    /// Spherical-function checks: recurrence, orthogonality, walks, moments.
    Gelfand {
        #[arg(long)]
        n: u64,
        /// Largest subset size to check (defaults to n/2).
        #[arg(long)]
        k_max: Option<u64>,
        #[arg(long, default_value_t = 4)]
        steps: usize,
    },
    /// Verification suites; exit code 1 if anything fails.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 64)]
        n_max: u64,
        /// Corrupt one kernel first; the run must then fail (self-test).
        #[arg(long, default_value_t = false)]
        inject_failure: bool,
    },
    /// Soundness scan of every bound mode over a t grid.
    Scan {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "0:5:50")]
        t_grid: String,
    },
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid '{spec}' is not start:end:count"));
    }
    let start: f64 = parts[0].parse().map_err(|_| format!("bad grid start '{}'", parts[0]))?;
    let end: f64 = parts[1].parse().map_err(|_| format!("bad grid end '{}'", parts[1]))?;
    let count: usize = parts[2].parse().map_err(|_| format!("bad grid count '{}'", parts[2]))?;
    if count == 0 || !(end > start) {
        return Err(format!("grid '{spec}' needs end > start and count > 0"));
    }
    Ok((1..=count)
        .map(|j| start + (end - start) * j as f64 / count as f64)
        .collect())
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

fn run(cli: Cli) -> i32 {
    let result = dispatch(&cli.command);
    let (table, failures) = match result {
        Ok(pair) => pair,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let emitted = match &cli.output {
        Some(path) => std::fs::File::create(path)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))
            .and_then(|mut f| write_table(&table, cli.format, cli.digits, &mut f)),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_table(&table, cli.format, cli.digits, &mut lock)
        }
    };
    if let Err(e) = emitted {
        eprintln!("error: {e}");
        return 2;
    }
    if failures.is_empty() {
        0
    } else {
        for f in &failures {
            eprintln!("FAIL: {f}");
        }
        1
    }
}

fn write_table(
    table: &emit::Table,
    format: Format,
    digits: usize,
    out: &mut dyn Write,
) -> Result<(), String> {
    let r = match format {
        Format::Table => table.write_text(digits, out),
        Format::Csv => table.write_csv(digits, out),
        Format::Json => table.write_json(digits, out),
    };
    r.map_err(|e| e.to_string())
}

fn dispatch(cmd: &Command) -> blspec::Result<(emit::Table, Vec<String>)> {
    match cmd {
        Command::Spectrum { n } => Ok((commands::spectrum(*n)?, vec![])),
        Command::Kolmogorov { n_list } => Ok((commands::kolmogorov(n_list)?, vec![])),
        Command::Sharpness { n_list } => Ok((commands::sharpness(n_list)?, vec![])),
        Command::Kernels { n, variant, k } => {
            let choice = match variant {
                Variant::V1 => commands::KernelChoice::V1,
                Variant::V2 => commands::KernelChoice::V2,
                Variant::Gelfand => commands::KernelChoice::Gelfand {
                    k: k.unwrap_or(n / 2),
                },
            };
            commands::kernels(*n, &choice)
        }
        Command::Moments { n, variant } => {
            let v2 = match variant {
                Variant::V1 => false,
                Variant::V2 => true,
                Variant::Gelfand => {
                    return Err(blspec::Error::Param(
                        "moments supports v1 and v2 (the induced chain coincides with v2 at k=n/2)"
                            .into(),
                    ))
                }
            };
            Ok((commands::moments(*n, v2)?, vec![]))
        }
        Command::Bounds {
            n,
            t,
            t_grid,
            variant,
            tail,
            lambda,
            c,
            kappa,
            k1,
            k2,
            big_k1_sq,
            big_k2,
            big_k3,
        } => {
            let ts = match (t, t_grid) {
                (Some(t), None) => vec![*t],
                (None, Some(spec)) => parse_grid(spec).map_err(blspec::Error::Param)?,
                _ => {
                    return Err(blspec::Error::Param(
                        "bounds needs exactly one of --t or --t-grid".into(),
                    ))
                }
            };
            let v2 = match variant {
                Variant::V1 => false,
                Variant::V2 => true,
                Variant::Gelfand => {
                    return Err(blspec::Error::Param(
                        "bounds supports variants v1 and v2".into(),
                    ))
                }
            };
            let cfg = commands::BoundsConfig {
                v2,
                tail: tail.clone(),
                lambda: lambda.clone(),
                c: c.clone(),
                kappa: kappa.clone(),
                k1: k1.clone(),
                k2: k2.clone(),
                big_k1_sq: big_k1_sq.clone(),
                big_k2: big_k2.clone(),
                big_k3: big_k3.clone(),
            };
            commands::bounds(*n, &ts, &cfg)
        }
        Command::Solutions {
            version,
            t_list,
            grid_size,
        } => commands::solutions(*version == SolVersion::V2, t_list, *grid_size),
        Command::Gelfand { n, k_max, steps } => {
            commands::gelfand(*n, k_max.unwrap_or(n / 2), *steps)
        }
        Command::Verify {
            suite,
            n_max,
            inject_failure,
        } => {
            let outcome = suites::run((*suite).into(), *n_max, *inject_failure)?;
            Ok((outcome.table, outcome.failures))
        }
        Command::Scan { n, t_grid } => {
            let grid = parse_grid(t_grid).map_err(blspec::Error::Param)?;
            commands::scan(*n, &grid)
        }
    }
}
