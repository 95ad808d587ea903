//! Projective volumes `vol(V_n^0(Q))` by counting zeros over `Z/p^k`.
//!
//! With `S_k` the number of primitive `v mod p^k` with `Q(v) = 0 mod p^k`,
//! the measure of `{v : max|v_i| = 1, |Q(v)| <= q^-k}` is `S_k p^(-4k)`;
//! projective volumes divide by `vol(R^x) = 1 - 1/q`.

mod finite_field;
mod hensel;
mod naive;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::forms::QuadraticForm;
use crate::localfield::LocalField;

pub use finite_field::{count_fq, unit_square_shell_volume, FqMethod};
pub use hensel::count_hensel;
pub use naive::{count_naive, default_budget, DEFAULT_BUDGET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    Naive,
    Hensel,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Naive => "naive",
            Engine::Hensel => "hensel",
        })
    }
}

impl std::str::FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Engine::Naive),
            "hensel" => Ok(Engine::Hensel),
            other => Err(Error::Parse(format!("unknown engine `{other}`"))),
        }
    }
}

/// Number of primitive zeros of `Q` modulo `p^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountResult {
    pub k: u32,
    pub count: u128,
    pub engine: Engine,
}

/// Counts primitive zeros mod `p^k` with the chosen engine.
pub fn count(q: &QuadraticForm, k: u32, field: &LocalField, engine: Engine) -> Result<CountResult> {
    let count = match engine {
        Engine::Naive => count_naive(q, k, field, default_budget())?,
        Engine::Hensel => count_hensel(q, k, field)?,
    };
    Ok(CountResult { k, count, engine })
}

fn q_pow(q: u64, e: u32) -> BigInt {
    BigInt::from(q).pow(e)
}

/// `vol(V^0) = 1 + 1/q + 1/q^2 + 1/q^3`.
pub fn vol_v0(field: &LocalField) -> BigRational {
    let q = field.q();
    (0..4)
        .map(|i| BigRational::new(BigInt::one(), q_pow(q, i)))
        .sum()
}

fn vol_from_count(s: u128, n: u32, field: &LocalField) -> BigRational {
    let q = field.q();
    // S p^(-4n) / (1 - 1/q) = S q / (p^(4n) (q - 1))
    BigRational::new(
        BigInt::from(s) * BigInt::from(q),
        q_pow(q, 4 * n) * BigInt::from(q - 1),
    )
}

/// Projective volume of `{v : |Q(v)| <= q^-n}`.
pub fn vol_leq(
    q: &QuadraticForm,
    n: u32,
    field: &LocalField,
    engine: Engine,
) -> Result<BigRational> {
    if n == 0 {
        return Ok(vol_v0(field));
    }
    let s = count(q, n, field, engine)?.count;
    Ok(vol_from_count(s, n, field))
}

/// Projective volume of `V_n^0(Q) = {v : |Q(v)| = q^-n}`.
pub fn vol_vn(
    q: &QuadraticForm,
    n: u32,
    field: &LocalField,
    engine: Engine,
) -> Result<BigRational> {
    Ok(vol_leq(q, n, field, engine)? - vol_leq(q, n + 1, field, engine)?)
}

/// Tail behaviour of a volume sequence beyond the computed range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tail {
    Undetected,
    /// All terms past the stored ones vanish.
    Finite,
    /// `values[n] = coefficient * rho^n` for all `n >= from`.
    Geometric {
        rho: BigRational,
        from: usize,
        coefficient: BigRational,
    },
}

/// `vol(V_n^0)` for `n = 0..values.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VolumeSequence {
    pub q: u64,
    pub values: Vec<BigRational>,
    pub tail: Tail,
}

/// Computes `vol(V_n^0)` for `n = 0..=n_max` (needs level `n_max + 1`).
pub fn volume_sequence(
    q: &QuadraticForm,
    n_max: u32,
    field: &LocalField,
    engine: Engine,
) -> Result<VolumeSequence> {
    field.check_level(n_max + 1)?;
    let leq = match engine {
        Engine::Hensel => {
            let mut counter = hensel::HenselCounter::new(field.p(), n_max + 1)?;
            let mut out = vec![vol_v0(field)];
            for n in 1..=n_max + 1 {
                let s = hensel::count_with(&mut counter, q, n, field)?;
                out.push(vol_from_count(s, n, field));
            }
            out
        }
        Engine::Naive => (0..=n_max + 1)
            .map(|n| vol_leq(q, n, field, engine))
            .collect::<Result<Vec<_>>>()?,
    };
    let values = leq.windows(2).map(|w| &w[0] - &w[1]).collect();
    Ok(VolumeSequence {
        q: field.q(),
        values,
        tail: Tail::Undetected,
    })
}

impl VolumeSequence {
    pub fn partial_sum(&self, n: usize) -> BigRational {
        self.values
            .iter()
            .take(n)
            .fold(BigRational::zero(), |acc, v| acc + v)
    }
}

/// One level compared across both engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineComparison {
    pub k: u32,
    pub naive: u128,
    pub hensel: u128,
}

impl EngineComparison {
    pub fn agrees(&self) -> bool {
        self.naive == self.hensel
    }
}

/// Compares the engines on levels `1..=k_max` that fit in the naive budget;
/// larger levels are skipped.
pub fn cross_check(
    q: &QuadraticForm,
    k_max: u32,
    field: &LocalField,
    budget: u64,
) -> Result<Vec<EngineComparison>> {
    let mut out = Vec::new();
    for k in 1..=k_max {
        let naive = match count_naive(q, k, field, budget) {
            Ok(n) => n,
            Err(Error::Budget { .. }) => break,
            Err(e) => return Err(e),
        };
        out.push(EngineComparison {
            k,
            naive,
            hensel: count_hensel(q, k, field)?,
        });
    }
    Ok(out)
}
