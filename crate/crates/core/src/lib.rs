//! The multi-subset transform of a family of set functions,
//! `g(T) = sum over S ⊆ T of prod over i in T of f_i(S)`, its reductions to
//! rectangular matrix multiplication, and its use for summing modular weights
//! over acyclic digraphs.

pub mod analysis;
pub mod bits;
pub mod cover;
pub mod dag;
pub mod error;
pub mod io;
pub mod mst;
pub mod ring;
pub mod setfn;

pub use error::{Error, Result};
pub use mst::{Backend, MstAlgorithm, Transform};
pub use ring::{counting_wrap, Counting, Float64, OpCounts, PrimeField, Ring, RingId};
pub use setfn::{Family, SetFunction};
