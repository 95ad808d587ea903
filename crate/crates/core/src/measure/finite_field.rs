use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::localfield::{is_prime, legendre, reduce, LocalField};

/// How `count_fq` obtains its answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FqMethod {
    /// Closed formula for an odd number of variables.
    Formula,
    BruteForce,
}

/// Number of solutions in `F_q^n` of `sum a_i x_i^2 = b` for a nondegenerate diagonal form.
pub fn count_fq(coeffs: &[i64], b: i64, q: u64, method: FqMethod) -> Result<u64> {
    if q % 2 == 0 || !is_prime(q) {
        return Err(Error::InvalidField(format!("q = {q} must be an odd prime")));
    }
    if coeffs.is_empty() || coeffs.iter().any(|&a| reduce(a as i128, q) == 0) {
        return Err(Error::DegenerateInput(
            "diagonal form is degenerate over F_q".into(),
        ));
    }
    let n = coeffs.len() as u32;
    match method {
        FqMethod::Formula => {
            if n % 2 == 0 {
                return Err(Error::InvalidParameters(
                    "closed formula needs an odd number of variables".into(),
                ));
            }
            let det: i128 = coeffs.iter().fold(1i128, |acc, &a| {
                acc * reduce(a as i128, q) as i128 % q as i128
            });
            let sign = if ((n - 1) / 2) % 2 == 1 { -1 } else { 1 };
            let e = legendre(sign * b as i128 * det, q) as i128;
            let main = (q as i128).pow(n - 1);
            let corr = (q as i128).pow((n - 1) / 2) * e;
            Ok((main + corr) as u64)
        }
        FqMethod::BruteForce => {
            let total = (q as u128)
                .checked_pow(n)
                .filter(|t| *t <= 100_000_000)
                .ok_or(Error::Budget {
                    points: u128::MAX,
                    budget: 100_000_000,
                })?;
            let mut count = 0u64;
            let target = reduce(b as i128, q);
            for idx in 0..total as u64 {
                let mut rest = idx;
                let mut acc = 0u64;
                for &a in coeffs {
                    let x = rest % q;
                    rest /= q;
                    acc = (acc + reduce(a as i128, q) * (x * x % q)) % q;
                }
                if acc == target {
                    count += 1;
                }
            }
            Ok(count)
        }
    }
}

/// Volume of `{x in R : |c - x^2| = q^-n}` for a unit square `c`.
///
/// Each square root of `c` mod p has a unique lift mod p^(n+1); the points
/// of the set mod p^(n+1) are the lifts of the roots mod p^n that are not
/// roots mod p^(n+1).
pub fn unit_square_shell_volume(c: i64, n: u32, field: &LocalField) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::InvalidParameters("n must be at least 1".into()));
    }
    let p = field.p();
    if legendre(c as i128, p) != 1 {
        return Err(Error::InvalidParameters(format!(
            "c = {c} is not a unit square mod {p}"
        )));
    }
    field.check_level(n + 1)?;
    let m = (p as u128).pow(n + 1);
    let mn = (p as u128).pow(n);
    let cm = reduce(c as i128, m as u64) as u128;
    let mut count = 0u64;
    for r0 in 1..p {
        if (r0 * r0) % p != reduce(c as i128, p) {
            continue;
        }
        let r = hensel_root(r0, cm, p, n + 1);
        let base = r % mn;
        for j in 0..p as u128 {
            let x = (base + j * mn) % m;
            if (x * x) % m != cm {
                count += 1;
            }
        }
    }
    Ok(BigRational::new(BigInt::from(count), BigInt::from(m)))
}

/// Lifts a simple root `r0` of `x^2 = c` mod p to a root mod p^k.
fn hensel_root(r0: u64, c: u128, p: u64, k: u32) -> u128 {
    let mut r = r0 as u128;
    let mut mk = p as u128;
    for _ in 1..k {
        mk *= p as u128;
        let f = (r * r % mk + mk - c % mk) % mk;
        let inv = mod_inverse((2 * r % mk) as u64, mk as u64) as u128;
        r = (r + mk - f * inv % mk) % mk;
    }
    r
}

fn mod_inverse(a: u64, m: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    old_s.rem_euclid(m as i128) as u64
}
