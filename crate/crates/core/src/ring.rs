//! Commutative rings the set-function transforms are generic over.
//!
//! A [`Ring`] is a value-level description of the arithmetic (it may carry a
//! runtime modulus or shared counters); elements are plain `Copy` values.
//! Two instantiations are provided, [`PrimeField`] for exact arithmetic and
//! [`Float64`] for real weights, plus the [`Counting`] wrapper that tallies
//! every addition-class and multiplication operation of an inner ring.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::Rng as _;
use rand::RngCore;
use serde_json::Value;

use crate::error::{Error, Result};

/// The Mersenne prime `2^61 - 1`, the default modulus.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// Arithmetic contract shared by every transform in this crate.
///
/// `neg` and `sub` are addition-class operations; constants produced by
/// `zero`, `one` and `from_i64` are free.
#[allow(clippy::wrong_self_convention)]
pub trait Ring: Clone + Send + Sync {
    type Elem: Copy + PartialEq + fmt::Debug + Send + Sync;

    /// Short identifier, e.g. `modp:2305843009213693951` or `f64`.
    fn id(&self) -> String;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    /// Whether `==` on elements is exact equality of ring values.
    fn is_exact(&self) -> bool;
    /// Uniform element: `[0, p)` for prime fields, `[0, 1)` for floats.
    fn random(&self, rng: &mut dyn RngCore) -> Self::Elem;
    fn to_json(&self, a: Self::Elem) -> Value;
    fn from_json(&self, v: &Value) -> Result<Self::Elem>;

    fn add_assign(&self, acc: &mut Self::Elem, b: Self::Elem) {
        *acc = self.add(*acc, b);
    }
}

/// Integers modulo a prime `p < 2^63`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
    mersenne61: bool,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 63 {
            return Err(Error::Invalid(format!("modulus {p} must be below 2^63")));
        }
        if !is_prime(p) {
            return Err(Error::Invalid(format!("modulus {p} is not prime")));
        }
        Ok(Self { p, mersenne61: p == MERSENNE_61 })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    fn reduce_wide(&self, x: u128) -> u64 {
        if self.mersenne61 {
            let p = MERSENNE_61 as u128;
            let mut s = ((x & p) + (x >> 61)) as u64;
            while s >= MERSENNE_61 {
                s -= MERSENNE_61;
            }
            s
        } else {
            (x % self.p as u128) as u64
        }
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        Self { p: MERSENNE_61, mersenne61: true }
    }
}

impl Ring for PrimeField {
    type Elem = u64;

    fn id(&self) -> String {
        format!("modp:{}", self.p)
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + (self.p - b)
        }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        self.reduce_wide(a as u128 * b as u128)
    }

    fn from_i64(&self, v: i64) -> u64 {
        (v as i128).rem_euclid(self.p as i128) as u64
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn random(&self, rng: &mut dyn RngCore) -> u64 {
        rng.gen_range(0..self.p)
    }

    fn to_json(&self, a: u64) -> Value {
        Value::String(a.to_string())
    }

    fn from_json(&self, v: &Value) -> Result<u64> {
        let parsed = match v {
            Value::String(s) => s.trim().parse::<u64>().ok(),
            Value::Number(n) => n.as_u64(),
            _ => None,
        };
        match parsed {
            Some(x) if x < self.p => Ok(x),
            Some(x) => Err(Error::Invalid(format!("value {x} is not reduced modulo {}", self.p))),
            None => Err(Error::Invalid(format!("expected a decimal integer string, got {v}"))),
        }
    }
}

/// IEEE double precision, for real-valued weights.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Float64;

impl Ring for Float64 {
    type Elem = f64;

    fn id(&self) -> String {
        "f64".to_string()
    }

    fn zero(&self) -> f64 {
        0.0
    }

    fn one(&self) -> f64 {
        1.0
    }

    #[inline]
    fn add(&self, a: f64, b: f64) -> f64 {
        a + b
    }

    #[inline]
    fn neg(&self, a: f64) -> f64 {
        -a
    }

    #[inline]
    fn sub(&self, a: f64, b: f64) -> f64 {
        a - b
    }

    #[inline]
    fn mul(&self, a: f64, b: f64) -> f64 {
        a * b
    }

    fn from_i64(&self, v: i64) -> f64 {
        v as f64
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn random(&self, rng: &mut dyn RngCore) -> f64 {
        rng.gen::<f64>()
    }

    fn to_json(&self, a: f64) -> Value {
        serde_json::Number::from_f64(a).map_or(Value::Null, Value::Number)
    }

    fn from_json(&self, v: &Value) -> Result<f64> {
        v.as_f64()
            .ok_or_else(|| Error::Invalid(format!("expected a number, got {v}")))
    }
}

/// Snapshot of a [`Counting`] ring's tallies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub adds: u64,
    pub muls: u64,
}

/// Instrumented ring: delegates values to `inner` and counts operations.
///
/// Clones share the same counters, so a pipeline that clones the ring
/// (including across threads) reports one exact total.
#[derive(Clone, Debug)]
pub struct Counting<R> {
    inner: R,
    adds: Arc<AtomicU64>,
    muls: Arc<AtomicU64>,
}

pub fn counting_wrap<R: Ring>(inner: R) -> Counting<R> {
    Counting {
        inner,
        adds: Arc::new(AtomicU64::new(0)),
        muls: Arc::new(AtomicU64::new(0)),
    }
}

impl<R: Ring> Counting<R> {
    pub fn counts(&self) -> OpCounts {
        OpCounts {
            adds: self.adds.load(Ordering::Relaxed),
            muls: self.muls.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        self.adds.store(0, Ordering::Relaxed);
        self.muls.store(0, Ordering::Relaxed);
    }

    pub fn inner(&self) -> &R {
        &self.inner
    }

    #[inline]
    fn tick_add(&self) {
        self.adds.fetch_add(1, Ordering::Relaxed);
    }
}

impl<R: Ring> Ring for Counting<R> {
    type Elem = R::Elem;

    fn id(&self) -> String {
        self.inner.id()
    }

    fn zero(&self) -> R::Elem {
        self.inner.zero()
    }

    fn one(&self) -> R::Elem {
        self.inner.one()
    }

    fn add(&self, a: R::Elem, b: R::Elem) -> R::Elem {
        self.tick_add();
        self.inner.add(a, b)
    }

    fn neg(&self, a: R::Elem) -> R::Elem {
        self.tick_add();
        self.inner.neg(a)
    }

    fn sub(&self, a: R::Elem, b: R::Elem) -> R::Elem {
        self.tick_add();
        self.inner.sub(a, b)
    }

    fn mul(&self, a: R::Elem, b: R::Elem) -> R::Elem {
        self.muls.fetch_add(1, Ordering::Relaxed);
        self.inner.mul(a, b)
    }

    fn from_i64(&self, v: i64) -> R::Elem {
        self.inner.from_i64(v)
    }

    fn is_exact(&self) -> bool {
        self.inner.is_exact()
    }

    fn random(&self, rng: &mut dyn RngCore) -> R::Elem {
        self.inner.random(rng)
    }

    fn to_json(&self, a: R::Elem) -> Value {
        self.inner.to_json(a)
    }

    fn from_json(&self, v: &Value) -> Result<R::Elem> {
        self.inner.from_json(v)
    }
}

/// Ring selector as accepted on the command line: `modp`, `modp:<p>` or `f64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingId {
    ModP(u64),
    F64,
}

impl FromStr for RingId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f64" => Ok(RingId::F64),
            "modp" => Ok(RingId::ModP(MERSENNE_61)),
            _ => {
                let p = s
                    .strip_prefix("modp:")
                    .and_then(|p| p.parse::<u64>().ok())
                    .ok_or_else(|| Error::Invalid(format!("unknown ring '{s}' (expected modp, modp:<p> or f64)")))?;
                PrimeField::new(p)?;
                Ok(RingId::ModP(p))
            }
        }
    }
}

impl fmt::Display for RingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingId::ModP(p) if *p == MERSENNE_61 => write!(f, "modp"),
            RingId::ModP(p) => write!(f, "modp:{p}"),
            RingId::F64 => write!(f, "f64"),
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
