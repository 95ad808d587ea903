use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forms::QuadraticForm;
use crate::localfield::{reduce, LocalField};

/// Default number of points the naive engine may enumerate.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Point budget for the naive engine, overridable with `PADIC_BUDGET`.
pub fn default_budget() -> u64 {
    std::env::var("PADIC_BUDGET")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

/// Counts primitive `v in (Z/p^k)^4` with `Q(v) = 0 mod p^k` by enumeration.
pub fn count_naive(q: &QuadraticForm, k: u32, field: &LocalField, budget: u64) -> Result<u128> {
    if k == 0 {
        return Err(Error::InvalidParameters(
            "level k must be at least 1".into(),
        ));
    }
    field.check_level(k)?;
    let p = field.p();
    let m = (p as u128)
        .checked_pow(k)
        .filter(|m| *m <= u32::MAX as u128)
        .ok_or(Error::Budget {
            points: u128::MAX,
            budget,
        })?;
    let points = m.checked_pow(4).unwrap_or(u128::MAX);
    if points > budget as u128 {
        return Err(Error::Budget { points, budget });
    }
    let m = m as u64;
    // Q = A(x, y, z) + B(x, y, z) t + C t^2, all reduced mod m.
    let c = q.dense().map(|a| reduce(a, m));
    let [xx, xy, xz, xt, yy, yz, yt, zz, zt, tt, lx, ly, lz, lt, _] = c;
    let mm = m as u128;
    let total: u128 = (0..m)
        .into_par_iter()
        .map(|x| {
            let mut count = 0u128;
            let x_unit = x % p != 0;
            for y in 0..m {
                let xy_unit = x_unit || y % p != 0;
                let a_xy = (xx as u128 * x as u128 % mm * x as u128
                    + xy as u128 * x as u128 % mm * y as u128
                    + yy as u128 * y as u128 % mm * y as u128
                    + lx as u128 * x as u128
                    + ly as u128 * y as u128)
                    % mm;
                let b_xy = (xt as u128 * x as u128 + yt as u128 * y as u128 + lt as u128) % mm;
                for z in 0..m {
                    let prim_xyz = xy_unit || z % p != 0;
                    let a = ((a_xy
                        + xz as u128 * x as u128 % mm * z as u128
                        + yz as u128 * y as u128 % mm * z as u128
                        + zz as u128 * z as u128 % mm * z as u128
                        + lz as u128 * z as u128)
                        % mm) as u64;
                    let b = ((b_xy + zt as u128 * z as u128) % mm) as u64;
                    count += count_t(a, b, tt, m, p, prim_xyz) as u128;
                }
            }
            count
        })
        .sum();
    Ok(total)
}

/// Counts `t mod m` with `a + b t + c t^2 = 0 mod m`, restricted to `p ∤ t`
/// unless `(x, y, z)` is already primitive.
#[inline]
fn count_t(a: u64, b: u64, c: u64, m: u64, p: u64, primitive: bool) -> u64 {
    // value(t) and its forward difference b + c(2t + 1), maintained mod m.
    let mut value = a;
    let mut delta = (b + c) % m;
    let step = (2 * c) % m;
    let mut count = 0;
    let mut residue = 0u64;
    for _ in 0..m {
        if value == 0 && (primitive || residue != 0) {
            count += 1;
        }
        value += delta;
        if value >= m {
            value -= m;
        }
        delta += step;
        if delta >= m {
            delta -= m;
        }
        residue += 1;
        if residue == p {
            residue = 0;
        }
    }
    count
}
