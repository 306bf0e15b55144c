use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cubesplit::report::{self, Algorithm, ConfigFile, RunConfig};
use cubesplit::{AreaResource, Error, GridParams, OracleSpec};

/// Recognize monotone binary functions on multi-valued grids.
#[derive(Parser)]
#[command(name = "cubesplit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one recognition and print its report.
    Run(RunArgs),
    /// Run several algorithms on the same oracle and check they agree.
    Compare(RunArgs),
    /// Print query bounds for a grid.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u32,
    },
    /// Print the worked examples on E_5^3.
    WorkedExamples,
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<u32>,
    /// Inline oracle spec (e.g. `explicit:4,3,2;3,3,3`) or a TOML file.
    #[arg(long)]
    oracle: Option<String>,
    /// alg1 | alg2 | complement | brute
    #[arg(long)]
    algorithm: Option<Algorithm>,
    /// Comma-separated list for `compare`.
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<Algorithm>>,
    /// area-brute | two-level | recursive:<depth>
    #[arg(long)]
    resource: Option<AreaResource>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_) | Error::DimensionMismatch { .. } => 2,
        Error::Contradiction { .. } | Error::CubeContradiction { .. } => 3,
        Error::Capacity(_) => 4,
        Error::Inconsistent(_) => 5,
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn load_oracle(arg: &str) -> cubesplit::Result<OracleSpec> {
    let path = Path::new(arg);
    if path.is_file() {
        let text =
            fs::read_to_string(path).map_err(|e| usage(format!("cannot read {arg}: {e}")))?;
        toml::from_str(&text).map_err(|e| usage(format!("bad oracle file {arg}: {e}")))
    } else {
        OracleSpec::parse_inline(arg)
    }
}

struct Resolved {
    config: RunConfig,
    algorithms: Option<Vec<Algorithm>>,
}

fn resolve(args: &RunArgs) -> cubesplit::Result<Resolved> {
    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            ConfigFile::parse(&text)?
        }
        None => ConfigFile::default(),
    };
    let n = args.n.or(file.n).ok_or_else(|| usage("missing --n"))?;
    let m = args.m.or(file.m).ok_or_else(|| usage("missing --m"))?;
    let params = GridParams::new(n, m)?;
    let oracle = match &args.oracle {
        Some(arg) => load_oracle(arg)?,
        None => file.oracle.ok_or_else(|| usage("missing --oracle"))?,
    };
    let resource = match (args.resource, &file.resource) {
        (Some(r), _) => Some(r),
        (None, Some(s)) => Some(s.parse()?),
        (None, None) => None,
    };
    let config = RunConfig {
        params,
        oracle,
        algorithm: args.algorithm.or(file.algorithm).unwrap_or(Algorithm::Alg1),
        resource,
        workers: args.workers.or(file.workers).unwrap_or(1),
        seed: args.seed.or(file.seed).unwrap_or(0),
    };
    Ok(Resolved {
        config,
        algorithms: args.algorithms.clone().or(file.algorithms),
    })
}

fn emit(out: Option<&Path>, text: &str) -> cubesplit::Result<()> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n"))
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(usage(format!("stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

fn execute(cli: Cli) -> cubesplit::Result<()> {
    match cli.command {
        Command::Run(args) => {
            let resolved = resolve(&args)?;
            let report = report::run(&resolved.config)?;
            emit(args.out.as_deref(), &report.to_json())
        }
        Command::Compare(args) => {
            let resolved = resolve(&args)?;
            let algorithms = resolved
                .algorithms
                .ok_or_else(|| usage("missing --algorithms"))?;
            let report = report::compare(&resolved.config, &algorithms)?;
            eprint!("{}", report.summary_table());
            emit(args.out.as_deref(), &report.to_json())
        }
        Command::Bounds { n, m } => {
            let b = report::bounds(GridParams::new(n, m)?);
            emit(
                None,
                &serde_json::to_string_pretty(&b).expect("bounds serialize"),
            )
        }
        Command::WorkedExamples => {
            let v = report::worked_examples()?;
            emit(
                None,
                &serde_json::to_string_pretty(&v).expect("examples serialize"),
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
