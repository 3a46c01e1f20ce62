use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use prime_running::bias::{self, BiasVector};
use prime_running::cli::checkpoint::{self, Checkpoint};
use prime_running::cli::config::{build_checkpoints, parse_direction_map, parse_q_spec, parse_x};
use prime_running::cli::output;
use prime_running::cramer::{self, CramerModel, ExpectationMode};
use prime_running::error::{Error, Result};
use prime_running::running::{self, DirectionMap, PathMode, RunningScan};

#[derive(Parser)]
#[command(name = "prime-running", version, about = "Prime running functions, races, and sieved random-prime model bias constants")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Auto,
    Brute,
    Recursion,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WalkMode {
    Walk,
    Run,
}

#[derive(Subcommand)]
enum Command {
    /// Compute running function values (and rescaled bias) at checkpoints.
    Run {
        /// Upper bound x, e.g. 1e8.
        #[arg(long, value_parser = parse_x)]
        x: u64,
        /// Modulus d.
        #[arg(long)]
        d: u64,
        /// Comma-separated checkpoint x values (scientific notation ok).
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<String>,
        /// Add a log-spaced grid of this many checkpoints up to x.
        #[arg(long)]
        grid: Option<u64>,
        /// Compute the reversed running function instead.
        #[arg(long)]
        reversed: bool,
        /// Output file for the running-table CSV/JSON (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write rescaled bias per reduced class to this CSV.
        #[arg(long)]
        bias_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Checkpoint file to write/resume.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Pause once every n <= this bound is processed (needs --checkpoint).
        #[arg(long, value_parser = parse_x)]
        pause_at: Option<u64>,
    },
    /// Emit a prime walk or prime run lattice path as CSV.
    Walk {
        #[arg(long, value_parser = parse_x)]
        n: u64,
        #[arg(long, value_enum, default_value = "walk")]
        mode: WalkMode,
        #[arg(long, default_value = "5")]
        d: u64,
        /// Direction map, e.g. `1:down,2:left,3:up,4:right` (the default).
        #[arg(long)]
        map: Option<String>,
        #[arg(long, default_value = "1")]
        stride: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact model bias constants R_Q(d;a) for all reduced classes.
    Bias {
        #[arg(long)]
        d: u64,
        /// Sieve modulus: integer, `<T>#`, or `<m>*<T>#`.
        #[arg(long = "Q", visible_alias = "q")]
        q: String,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Decimal places in rendered values (round-half-even).
        #[arg(long, default_value = "4")]
        places: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo trials of the random running function.
    Simulate {
        #[arg(long, value_parser = parse_x)]
        x: u64,
        #[arg(long = "Q", visible_alias = "q")]
        q: String,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        a: u64,
        #[arg(long, default_value = "500")]
        trials: u64,
        #[arg(long, default_value = "42")]
        seed: u64,
        /// JSON stats output (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional per-trial CSV.
        #[arg(long)]
        trials_out: Option<PathBuf>,
    },
    /// Running race phi(x;d,a) - phi(x;d,b).
    Race {
        #[arg(long, value_parser = parse_x)]
        x: u64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&PathBuf>, contents: &str) -> Result<()> {
    match out {
        Some(path) => output::write_file(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn cmd_run(
    x: u64,
    d: u64,
    checkpoints: Vec<String>,
    grid: Option<u64>,
    reversed: bool,
    out: Option<PathBuf>,
    bias_out: Option<PathBuf>,
    format: Format,
    checkpoint_path: Option<PathBuf>,
    pause_at: Option<u64>,
) -> Result<()> {
    let explicit: Vec<u64> = checkpoints
        .iter()
        .map(|s| parse_x(s))
        .collect::<Result<_>>()?;
    let points = build_checkpoints(x, &explicit, grid)?;
    let canonical = format!("run x={x} d={d} checkpoints={points:?} reversed={reversed}");
    let hash = checkpoint::config_hash(&canonical);

    let mut scan = match &checkpoint_path {
        Some(path) if path.exists() => checkpoint::load(path, "run", &hash)?.scan,
        _ => RunningScan::new(d, points, reversed)?,
    };

    if let Some(pause) = pause_at {
        scan.run_until(pause);
        if !scan.is_done() {
            let path = checkpoint_path.as_ref().ok_or_else(|| {
                Error::Argument("--pause-at requires --checkpoint".into())
            })?;
            checkpoint::save(
                path,
                &Checkpoint {
                    schema_version: checkpoint::SCHEMA_VERSION,
                    command: "run".into(),
                    config_hash: hash,
                    last_processed_n: scan.processed_up_to(),
                    scan,
                },
            )?;
            eprintln!("paused; resume by re-running with the same --checkpoint");
            return Ok(());
        }
    } else {
        scan.run();
    }

    let table = scan.into_table()?;
    match format {
        Format::Csv => emit(out.as_ref(), &output::running_table_csv(&table))?,
        Format::Json => emit(out.as_ref(), &output::running_table_json(&table))?,
    }
    if let Some(path) = bias_out {
        output::write_file(&path, &output::rescaled_bias_csv(&table)?)?;
    }
    Ok(())
}

fn cmd_walk(
    n: u64,
    mode: WalkMode,
    d: u64,
    map: Option<String>,
    stride: u64,
    out: Option<PathBuf>,
) -> Result<()> {
    let map = match map {
        Some(spec) => parse_direction_map(d, &spec)?,
        None if d == 5 => DirectionMap::mod5_default(),
        None => {
            return Err(Error::Argument(
                "a --map is required for moduli other than 5".into(),
            ))
        }
    };
    let mode = match mode {
        WalkMode::Walk => PathMode::Walk,
        WalkMode::Run => PathMode::Run,
    };
    let path = running::lattice_path(n, &map, stride, mode)?;
    emit(out.as_ref(), &output::path_csv(&path))
}

fn cmd_bias(
    d: u64,
    q_spec: &str,
    method: Method,
    format: Format,
    places: u32,
    out: Option<PathBuf>,
) -> Result<()> {
    let q = parse_q_spec(q_spec)?;
    let vector = match method {
        Method::Brute => BiasVector::brute(q, d)?,
        Method::Recursion => BiasVector::recursion(&q, d)?,
        Method::Auto => bias::bias_vector_auto(&q, d)?,
    };
    let rendered = match format {
        Format::Json => output::bias_vector_json(&vector, q_spec, places),
        Format::Csv => output::bias_vector_csv(&vector, places),
    };
    emit(out.as_ref(), &rendered)
}

fn cmd_simulate(
    x: u64,
    q_spec: &str,
    d: u64,
    a: u64,
    trials: u64,
    seed: u64,
    out: Option<PathBuf>,
    trials_out: Option<PathBuf>,
) -> Result<()> {
    let q = parse_q_spec(q_spec)?
        .to_u64()
        .ok_or_else(|| Error::Argument("sieve modulus too large to simulate".into()))?;
    let model = CramerModel::new(q)?;
    let stats = cramer::monte_carlo_stats(x, &model, d, a, trials, seed)?;
    if stats.variance.is_none() {
        eprintln!("note: variance omitted (single trial)");
    }
    let expected = cramer::expected_phi_tilde(x, &model, d, a, ExpectationMode::Series)?;
    emit(
        out.as_ref(),
        &output::trial_stats_json(&stats, x, q, d, a, seed, expected),
    )?;
    if let Some(path) = trials_out {
        output::write_file(&path, &output::trials_csv(&stats))?;
    }
    Ok(())
}

fn cmd_race(x: u64, d: u64, a: u64, b: u64, out: Option<PathBuf>) -> Result<()> {
    let value = running::race(x, d, a, b)?;
    let doc = serde_json::json!({ "x": x, "d": d, "a": a, "b": b, "race": value });
    emit(out.as_ref(), &format!("{}\n", serde_json::to_string_pretty(&doc)?))
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        // ignore the error if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Run {
            x,
            d,
            checkpoints,
            grid,
            reversed,
            out,
            bias_out,
            format,
            checkpoint,
            pause_at,
        } => cmd_run(
            x, d, checkpoints, grid, reversed, out, bias_out, format, checkpoint, pause_at,
        ),
        Command::Walk {
            n,
            mode,
            d,
            map,
            stride,
            out,
        } => cmd_walk(n, mode, d, map, stride, out),
        Command::Bias {
            d,
            q,
            method,
            format,
            places,
            out,
        } => cmd_bias(d, &q, method, format, places, out),
        Command::Simulate {
            x,
            q,
            d,
            a,
            trials,
            seed,
            out,
            trials_out,
        } => cmd_simulate(x, &q, d, a, trials, seed, out, trials_out),
        Command::Race { x, d, a, b, out } => cmd_race(x, d, a, b, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
