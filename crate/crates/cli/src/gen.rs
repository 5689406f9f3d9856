//! Seeded random families and weight systems in the shared JSON layouts.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use multisubset::dag::WeightSystem;
use multisubset::io::{family_to_json, weights_to_json};
use multisubset::{Family, Float64, PrimeField, Ring, RingId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{write_output, CliError, CliResult};

pub const MAX_GEN_N: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Family,
    Weights,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "modp")]
    pub ring: RingId,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// `n` functions with independent uniform values, in mask order.
pub fn random_family<R: Ring>(ring: &R, n: usize, seed: u64) -> multisubset::Result<Family<R::Elem>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Family::from_fn(n, |_, _| ring.random(&mut rng))
}

/// Random weights; entries where a node would be its own parent stay zero.
pub fn random_weights<R: Ring>(ring: &R, n: usize, seed: u64) -> multisubset::Result<WeightSystem<R::Elem>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    WeightSystem::from_fn(ring, n, |_, _| ring.random(&mut rng))
}

pub fn run(args: &GenArgs) -> CliResult<()> {
    if args.n > MAX_GEN_N {
        return Err(CliError::Validation(format!("n = {} exceeds {MAX_GEN_N}", args.n)));
    }
    match args.ring {
        RingId::ModP(p) => emit(&PrimeField::new(p)?, args),
        RingId::F64 => emit(&Float64, args),
    }
}

fn emit<R: Ring>(ring: &R, args: &GenArgs) -> CliResult<()> {
    let value = match args.kind {
        Kind::Family => family_to_json(ring, &random_family(ring, args.n, args.seed)?),
        Kind::Weights => weights_to_json(ring, &random_weights(ring, args.n, args.seed)?),
    };
    let text = serde_json::to_string_pretty(&value)?;
    write_output(args.output.as_deref(), &text)
}
