//! Benchmark harness: one CSV row per `(algorithm, n, seed)` with measured
//! ring operations, direct pair iterations and the closed-form pair count.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use multisubset::bits::binomial;
use multisubset::mst::size_threshold;
use multisubset::{counting_wrap, Backend, Float64, MstAlgorithm, PrimeField, Ring, RingId};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gen::random_family;
use crate::{CliError, CliResult};

pub const MAX_BENCH_N: usize = 16;
pub const MAX_NAIVE_BENCH_N: usize = 14;

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 2)]
    pub min_n: usize,
    #[arg(long, default_value_t = 12)]
    pub max_n: usize,
    /// Comma-separated list of algorithms.
    #[arg(long, value_delimiter = ',', default_value = "naive,columns,rows-columns,cover")]
    pub algos: Vec<MstAlgorithm>,
    /// Number of seeds per size, starting from 0.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, default_value = "modp")]
    pub ring: RingId,
    #[arg(long, default_value = "classical")]
    pub backend: Backend,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub algo: String,
    pub n: usize,
    pub seed: u64,
    pub sigma: Option<f64>,
    pub tau: Option<f64>,
    pub backend: String,
    pub ring: String,
    pub adds: u64,
    pub muls: u64,
    pub pair_iterations: u64,
    pub predicted_pairs: u64,
    pub wall_ms: f64,
}

/// Pairs `S ⊆ T` an algorithm visits outside the backend, in closed form.
pub fn predicted_pairs(algo: &MstAlgorithm, n: usize) -> u64 {
    let large_columns = |s0: usize| -> u64 { (s0 + 1..=n).map(|s| binomial(n, s) << (n - s)).sum() };
    match *algo {
        MstAlgorithm::Naive => 3u64.pow(n as u32),
        MstAlgorithm::Columns { sigma } => large_columns(size_threshold(sigma, n)),
        MstAlgorithm::RowsColumns { sigma, tau } => {
            let s0 = size_threshold(sigma, n);
            let (h1, h2) = (n.div_ceil(2), n / 2);
            let cut = size_threshold(tau, h1);
            let mut short_rows = 0;
            for a in 0..=h1 {
                for b in 0..=h2 {
                    if a <= cut || b <= cut {
                        let small: u64 = (0..=s0).map(|s| binomial(a + b, s)).sum();
                        short_rows += binomial(h1, a) * binomial(h2, b) * small;
                    }
                }
            }
            large_columns(s0) + short_rows
        }
        MstAlgorithm::Cover => 0,
    }
}

fn measure<R: Ring>(ring: R, algo: MstAlgorithm, n: usize, seed: u64, args: &BenchArgs) -> CliResult<BenchRow> {
    let ring = counting_wrap(ring);
    let fam = random_family(&ring, n, seed)?;
    ring.reset();
    let start = Instant::now();
    let t = algo.run(&ring, &fam, args.backend)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let c = ring.counts();
    Ok(BenchRow {
        algo: algo.id().into(),
        n,
        seed,
        sigma: algo.sigma(),
        tau: algo.tau(),
        backend: args.backend.to_string(),
        ring: args.ring.to_string(),
        adds: c.adds,
        muls: c.muls,
        pair_iterations: t.trace.pair_iterations,
        predicted_pairs: predicted_pairs(&algo, n),
        wall_ms,
    })
}

pub fn bench_rows(args: &BenchArgs) -> CliResult<Vec<BenchRow>> {
    if args.min_n > args.max_n || args.max_n > MAX_BENCH_N {
        return Err(CliError::Validation(format!(
            "need min-n <= max-n <= {MAX_BENCH_N}, got {}..{}",
            args.min_n, args.max_n
        )));
    }
    if args.algos.contains(&MstAlgorithm::Naive) && args.max_n > MAX_NAIVE_BENCH_N {
        return Err(CliError::Validation(format!("naive is limited to n <= {MAX_NAIVE_BENCH_N}")));
    }
    let ring = match args.ring {
        RingId::ModP(p) => Some(PrimeField::new(p)?),
        RingId::F64 => None,
    };
    let jobs: Vec<(MstAlgorithm, usize, u64)> = args
        .algos
        .iter()
        .map(|a| a.with_params(args.sigma, args.tau))
        .flat_map(|a| (args.min_n..=args.max_n).flat_map(move |n| (0..args.seeds).map(move |s| (a, n, s))))
        .collect();
    let mut rows = jobs
        .into_par_iter()
        .map(|(algo, n, seed)| match ring {
            Some(field) => measure(field, algo, n, seed, args),
            None => measure(Float64, algo, n, seed, args),
        })
        .collect::<CliResult<Vec<_>>>()?;
    rows.sort_by(|a, b| (&a.algo, a.n, a.seed).cmp(&(&b.algo, b.n, b.seed)));
    Ok(rows)
}

pub fn run(args: &BenchArgs) -> CliResult<()> {
    let rows = bench_rows(args)?;
    let sink: Box<dyn std::io::Write> = match &args.output {
        Some(p) => Box::new(
            std::fs::File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
        ),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use multisubset::mst::mst_naive;

    #[test]
    fn naive_pairs_are_three_to_the_n() {
        for n in 0..=6 {
            let ring = PrimeField::default();
            let fam = random_family(&ring, n, 1).unwrap();
            assert_eq!(mst_naive(&ring, &fam).trace.pair_iterations, predicted_pairs(&MstAlgorithm::Naive, n));
        }
    }

    #[test]
    fn predictions_match_traces() {
        let ring = PrimeField::default();
        for n in 2..=9 {
            let fam = random_family(&ring, n, n as u64).unwrap();
            for algo in [MstAlgorithm::columns(), MstAlgorithm::rows_columns()] {
                let t = algo.run(&ring, &fam, Backend::Classical).unwrap();
                assert_eq!(t.trace.pair_iterations, predicted_pairs(&algo, n), "{algo} n={n}");
            }
        }
    }
}
