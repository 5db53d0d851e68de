//! Thin command-line front end over the library: load bundle files or
//! catalog examples, run the computations and verification suites, and emit
//! reports.
//!
//! Exit codes: 0 all checks pass; 1 input or validation failure; 2 internal
//! verification failure (an algebraic identity the engine guarantees came
//! out false, which indicates a bug).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tcech::error::Error;
use tcech::field::FieldId;
use tcech::report::{self, InvariantOptions, RunReport, SuiteConfig};

#[derive(Parser)]
#[command(
    name = "tcech",
    version,
    about = "Exact Cech cocycle invariants of transition-function presentations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Coefficient field for inline examples: `q` or `prime:P`.
    #[arg(long, global = true, default_value = "q")]
    field: String,
    /// Emit the report as JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a bundle file: structure, determinants, flag shape, cocycle
    /// condition.
    Check {
        /// Bundle JSON file or `example:NAME(ARGS)`.
        bundle: String,
    },
    /// Compute the degree-k invariant cochain.
    Invariant {
        bundle: String,
        #[arg(short, long)]
        k: usize,
        /// Certify d-closedness (k = 1 always; k >= 2 needs a flag
        /// presentation).
        #[arg(long)]
        refined: bool,
        /// Require the presentation to be flagged.
        #[arg(long)]
        flag: bool,
        /// Cross-check the fast path (dlog chain or flag split) against the
        /// permutation sum.
        #[arg(long)]
        fast_path_crosscheck: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct and verify the gauge coboundary witness.
    Witness {
        bundle: String,
        /// Gauge JSON file; optional when the bundle file embeds one.
        gauge: Option<PathBuf>,
        #[arg(short, long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cup product of two serialized cochains.
    Cup {
        a: PathBuf,
        b: PathBuf,
        /// Bundle supplying the cover when the cochain files carry none.
        #[arg(long)]
        bundle: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree of a line bundle (or sum) on the canonical projective-line
    /// cover.
    Degree { bundle: String },
    /// Formal character assembly up to a maximal degree.
    Chern {
        bundle: String,
        #[arg(long, default_value_t = 3)]
        max_k: usize,
        /// Use the rank instead of 1 in degree zero.
        #[arg(long)]
        rank_degree_zero: bool,
    },
    /// Write a catalog example as a bundle file.
    Examples {
        /// Catalog reference, e.g. `o_d_cp1(3)` or `o_d_cpn(2,1)`.
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized verification suite over synthetic covers.
    Suite {
        #[arg(long, default_value_t = 3)]
        max_k: usize,
        #[arg(long, default_value_t = 3)]
        max_rank: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        cocycle_instances: usize,
        #[arg(long, default_value_t = 30)]
        witness_instances: usize,
        #[arg(long, default_value_t = 100)]
        kernel_checks: usize,
        /// Directory for counterexample artifacts.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Exploratory comparisons that are reported, never asserted.
    Experiment {
        #[command(subcommand)]
        which: ExperimentCommand,
    },
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Additivity/product behaviour of the invariants on a direct sum of
    /// line bundles over the projective plane.
    Whitney {
        #[arg(long, default_value_t = 1)]
        d1: i64,
        #[arg(long, default_value_t = 1)]
        d2: i64,
    },
    /// Whether the refined invariants see the flag ordering.
    FlagDependence {
        #[arg(long, default_value_t = 1)]
        a: i64,
        #[arg(long, default_value_t = 2)]
        b: i64,
    },
}

fn parse_field(spec: &str) -> Result<FieldId, Error> {
    match spec {
        "q" | "Q" => Ok(FieldId::Rational),
        other => match other.strip_prefix("prime:") {
            Some(p) => {
                let p: u64 = p
                    .parse()
                    .map_err(|_| Error::InvalidParameters(format!("bad prime `{p}`")))?;
                FieldId::prime(p)
            }
            None => Err(Error::InvalidParameters(format!(
                "unknown field `{other}`; use `q` or `prime:P`"
            ))),
        },
    }
}

fn run(cli: &Cli) -> Result<RunReport, Error> {
    let field = parse_field(&cli.field)?;
    match &cli.command {
        Command::Check { bundle } => report::cmd_check(bundle, field),
        Command::Invariant {
            bundle,
            k,
            refined,
            flag,
            fast_path_crosscheck,
            out,
        } => report::cmd_invariant(
            bundle,
            field,
            &InvariantOptions {
                k: *k,
                refined: *refined,
                flag: *flag,
                fast_path_crosscheck: *fast_path_crosscheck,
                out: out.clone(),
            },
        ),
        Command::Witness {
            bundle,
            gauge,
            k,
            out,
        } => report::cmd_witness(bundle, gauge.as_deref(), field, *k, out.as_deref()),
        Command::Cup { a, b, bundle, out } => {
            report::cmd_cup(a, b, bundle.as_deref(), field, out.as_deref())
        }
        Command::Degree { bundle } => report::cmd_degree(bundle, field),
        Command::Chern {
            bundle,
            max_k,
            rank_degree_zero,
        } => report::cmd_chern(bundle, field, *max_k, *rank_degree_zero),
        Command::Examples { name, out } => report::cmd_examples(name, field, out.as_deref()),
        Command::Suite {
            max_k,
            max_rank,
            seed,
            cocycle_instances,
            witness_instances,
            kernel_checks,
            out_dir,
        } => report::run_suite(&SuiteConfig {
            field,
            max_k: *max_k,
            max_rank: *max_rank,
            seed: *seed,
            cocycle_instances: *cocycle_instances,
            witness_instances: *witness_instances,
            kernel_checks: *kernel_checks,
            out_dir: out_dir.clone(),
        }),
        Command::Experiment { which } => match which {
            ExperimentCommand::Whitney { d1, d2 } => report::experiment_whitney(*d1, *d2, field),
            ExperimentCommand::FlagDependence { a, b } => {
                report::experiment_flag_dependence(*a, *b, field)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", report.render_json());
            } else {
                print!("{}", report.render_text());
            }
            eprintln!("elapsed: {} ms", report.elapsed_ms);
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::WitnessVerificationFailed | Error::DClosedCheckFailed(_) => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
