//! Command-line front end: transforms, DAG sums, covering designs, the
//! parameter optimizers, a benchmark harness and seeded input generators.

pub mod bench;
pub mod gen;

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use multisubset::analysis::{gamma_search, optimize_columns, optimize_rows_columns, OmegaBound, OmegaTable};
use multisubset::cover::greedy_cover;
use multisubset::dag::{robinson_count, sum_acyclic_digraphs};
use multisubset::io::{family_from_json, setfn_to_json, weights_from_json};
use multisubset::{counting_wrap, Backend, Float64, MstAlgorithm, PrimeField, Ring, RingId};
use serde_json::{json, Value};

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or malformed input: exit code 2.
    Validation(String),
    /// Unreadable or unwritable files: exit code 3.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<multisubset::Error> for CliError {
    fn from(e: multisubset::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "multisubset", version, about = "Multi-subset transforms and weighted DAG sums")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Multi-subset transform of a family of set functions.
    Mst(MstArgs),
    /// Weighted sum over acyclic digraphs.
    DagSum(DagSumArgs),
    /// Number of labelled acyclic digraphs on n nodes.
    DagCount {
        #[arg(long)]
        n: usize,
    },
    /// Greedy covering design.
    Cover {
        #[arg(long)]
        v: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Optimal algorithm parameters and the resulting exponential base.
    Optimize(OptimizeArgs),
    /// Operation counts and wall time over a range of sizes, as CSV.
    Bench(bench::BenchArgs),
    /// Seeded random inputs.
    Gen(gen::GenArgs),
}

#[derive(Debug, Args)]
pub struct AlgoArgs {
    #[arg(long, default_value = "columns")]
    pub algo: MstAlgorithm,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, default_value = "classical")]
    pub backend: Backend,
    #[arg(long, default_value = "modp")]
    pub ring: RingId,
}

impl AlgoArgs {
    fn algorithm(&self) -> MstAlgorithm {
        self.algo.with_params(self.sigma, self.tau)
    }
}

#[derive(Debug, Args)]
pub struct MstArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub algo: AlgoArgs,
    /// Report additions, multiplications and direct pair iterations.
    #[arg(long)]
    pub count_ops: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DagSumArgs {
    #[arg(long)]
    pub weights: PathBuf,
    #[command(flatten)]
    pub algo: AlgoArgs,
    /// Evaluate the naive transform only at the entries each round reads.
    #[arg(long)]
    pub targets_only: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// columns, rows-columns or gamma
    #[arg(long)]
    pub target: String,
    /// paper, table or convex; defaults to paper for the threshold
    /// optimizers and table for gamma
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long, default_value_t = 1e-3)]
    pub resolution: f64,
    #[arg(long)]
    pub omega_table: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Write to `path`, or stdout when absent.
pub fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            writeln!(out, "{text}").map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

/// `<output>.ops.json` next to the output file.
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".ops.json");
    PathBuf::from(name)
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Mst(args) => match args.algo.ring {
            RingId::ModP(p) => run_mst(PrimeField::new(p)?, &args),
            RingId::F64 => run_mst(Float64, &args),
        },
        Command::DagSum(args) => match args.algo.ring {
            RingId::ModP(p) => run_dag_sum(PrimeField::new(p)?, &args),
            RingId::F64 => run_dag_sum(Float64, &args),
        },
        Command::DagCount { n } => write_output(None, &robinson_count(n).to_string()),
        Command::Cover { v, k, s, output } => {
            let design = greedy_cover(v, k, s)?;
            write_output(output.as_deref(), &pretty(&serde_json::to_value(&design)?))
        }
        Command::Optimize(args) => run_optimize(&args),
        Command::Bench(args) => bench::run(&args),
        Command::Gen(args) => gen::run(&args),
    }
}

fn run_mst<R: Ring>(ring: R, args: &MstArgs) -> CliResult<()> {
    let ring = counting_wrap(ring);
    let fam = family_from_json(&ring, &read_json(&args.input)?)?;
    let t = args.algo.algorithm().run(&ring, &fam, args.algo.backend)?;
    write_output(args.output.as_deref(), &pretty(&setfn_to_json(&ring, &t.g)))?;
    if args.count_ops {
        let c = ring.counts();
        let ops = json!({ "adds": c.adds, "muls": c.muls, "pair_iterations": t.trace.pair_iterations });
        match &args.output {
            Some(out) => write_output(Some(&sidecar_path(out)), &pretty(&ops))?,
            None => eprintln!("{ops}"),
        }
    }
    Ok(())
}

fn run_dag_sum<R: Ring>(ring: R, args: &DagSumArgs) -> CliResult<()> {
    let w = weights_from_json(&ring, &read_json(&args.weights)?)?;
    let r = sum_acyclic_digraphs(&ring, &w, args.algo.algorithm(), args.algo.backend, args.targets_only)?;
    let a: Vec<Value> = r.a.values().iter().map(|&v| ring.to_json(v)).collect();
    let out = json!({ "n": w.n(), "total": ring.to_json(r.total()), "a": a });
    write_output(args.output.as_deref(), &pretty(&out))
}

fn run_optimize(args: &OptimizeArgs) -> CliResult<()> {
    let table: Option<OmegaTable> = match &args.omega_table {
        Some(p) => Some(serde_json::from_value(read_json(p)?)?),
        None => None,
    };
    let default_mode = if args.target == "gamma" { "table" } else { "paper" };
    let bound = OmegaBound::from_mode(args.mode.as_deref().unwrap_or(default_mode), table)?;
    let report = match args.target.as_str() {
        "columns" => optimize_columns(&bound)?,
        "rows-columns" => optimize_rows_columns(&bound)?,
        "gamma" => gamma_search(&bound, args.resolution)?,
        other => {
            return Err(CliError::Validation(format!(
                "unknown target '{other}' (expected columns, rows-columns or gamma)"
            )))
        }
    };
    write_output(args.output.as_deref(), &pretty(&serde_json::to_value(&report)?))
}
