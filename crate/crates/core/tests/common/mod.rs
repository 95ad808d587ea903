//! Independent oracles shared by the integration tests. Everything here is
//! deliberately naive: direct enumeration and textbook formulas.

#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use twistchar::forms::QuadraticForm;
use twistchar::localfield::{LocalField, SquareClass};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn q_inv(q: u64, n: u32) -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(q).pow(n))
}

/// Legendre symbol by exhaustive squaring.
pub fn is_square_mod(a: i64, p: u64) -> bool {
    let a = a.rem_euclid(p as i64) as u64;
    (0..p).any(|x| x * x % p == a)
}

/// Primitive zeros of `q` modulo `p^k` by evaluating every vector.
pub fn brute_count(q: &QuadraticForm, p: u64, k: u32) -> u128 {
    let m = p.pow(k) as i128;
    let mut count = 0;
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                for t in 0..m {
                    let primitive = [x, y, z, t].iter().any(|c| c % p as i128 != 0);
                    if primitive && q.eval([x, y, z, t]).rem_euclid(m) == 0 {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// `vol_leq(n)` from a raw count: `S_n q / (p^(4n) (q - 1))`.
pub fn vol_from_count(s: u128, p: u64, n: u32) -> BigRational {
    BigRational::new(
        BigInt::from(s) * BigInt::from(p),
        BigInt::from(p).pow(4 * n) * BigInt::from(p - 1),
    )
}

/// The Hilbert symbol `(a, b)_p` for odd p via the explicit formula.
pub fn hilbert(a: i64, b: i64, p: u64) -> i8 {
    let split = |mut x: i64| {
        let mut v = 0;
        while x % p as i64 == 0 {
            x /= p as i64;
            v += 1;
        }
        (v, x)
    };
    let (alpha, u) = split(a);
    let (beta, v) = split(b);
    let leg = |x: i64| if is_square_mod(x, p) { 1i8 } else { -1 };
    let eps = if (p % 4 == 3) && alpha % 2 == 1 && beta % 2 == 1 {
        -1
    } else {
        1
    };
    let mut s = eps;
    if beta % 2 == 1 {
        s *= leg(u);
    }
    if alpha % 2 == 1 {
        s *= leg(v);
    }
    s
}

/// Square class of a nonzero integer known modulo `p^prec`, or `None` if it
/// vanishes at that precision.
pub fn class_mod(x: i128, p: u64, prec: u32) -> Option<SquareClass> {
    let m = (p as i128).pow(prec);
    let mut x = x.rem_euclid(m);
    if x == 0 {
        return None;
    }
    let mut v = 0;
    while x % p as i128 == 0 {
        x /= p as i128;
        v += 1;
    }
    Some(match (is_square_mod(x as i64, p), v % 2 == 1) {
        (true, false) => SquareClass::One,
        (false, false) => SquareClass::U,
        (true, true) => SquareClass::Pi,
        (false, true) => SquareClass::UPi,
    })
}

/// Square classes of the values `x^2 - D y^2` with `x, y` mod `p^3`.
pub fn norm_classes(d: i64, p: u64) -> BTreeSet<SquareClass> {
    let m = (p as i128).pow(3);
    let mut out = BTreeSet::new();
    for x in 0..m {
        for y in 0..m {
            let n = x * x - d as i128 * y * y;
            // Only values of valuation <= 1 have a class readable mod p^3.
            if let Some(c) = class_mod(n, p, 2) {
                out.insert(c);
            }
        }
    }
    out
}

/// Solutions of `sum a_i x_i^2 = b` over `F_p` by enumeration.
pub fn fq_brute(coeffs: &[i64], b: i64, p: u64) -> u64 {
    let n = coeffs.len() as u32;
    let mut count = 0;
    for idx in 0..p.pow(n) {
        let mut rest = idx;
        let mut acc = 0i64;
        for &a in coeffs {
            let x = (rest % p) as i64;
            rest /= p;
            acc += a * x * x;
        }
        if (acc - b).rem_euclid(p as i64) == 0 {
            count += 1;
        }
    }
    count
}

/// Measure of `{x in Z_p : v(c - x^2) = n}` by enumerating `x mod p^(n+1)`.
pub fn unit_square_enum(c: i64, n: u32, p: u64) -> BigRational {
    let m = (p as i128).pow(n + 1);
    let pn = (p as i128).pow(n);
    let count = (0..m)
        .filter(|x| {
            let r = (c as i128 - x * x).rem_euclid(m);
            r % pn == 0 && r != 0
        })
        .count();
    BigRational::new(BigInt::from(count), BigInt::from(m))
}

/// The 4x4 integer matrix product `a * b`.
pub fn mat_mul(a: &[[i128; 4]; 4], b: &[[i128; 4]; 4]) -> [[i128; 4]; 4] {
    let mut out = [[0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// `w^T m w`.
pub fn quad_value(m: &[[i128; 4]; 4], w: [i128; 4]) -> i128 {
    (0..4)
        .map(|i| (0..4).map(|j| w[i] * m[i][j] * w[j]).sum::<i128>())
        .sum()
}

/// A random matrix with small entries that is invertible mod p.
pub fn random_unimodular(rng: &mut impl Rng, p: u64) -> [[i64; 4]; 4] {
    loop {
        let mut m = [[0i64; 4]; 4];
        for row in m.iter_mut() {
            for e in row.iter_mut() {
                *e = rng.gen_range(-2..=2);
            }
        }
        if det_mod(&m, p) != 0 {
            return m;
        }
    }
}

/// Determinant mod p by Laplace expansion over permutations.
pub fn det_mod(m: &[[i64; 4]; 4], p: u64) -> i64 {
    let perms = permutations4();
    let det: i64 = perms
        .iter()
        .map(|(perm, sign)| sign * (0..4).map(|i| m[i][perm[i]]).product::<i64>())
        .sum();
    det.rem_euclid(p as i64)
}

fn permutations4() -> Vec<([usize; 4], i64)> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let perm = [a, b, c, d];
                    let mut seen = [false; 4];
                    if perm.iter().all(|&i| !std::mem::replace(&mut seen[i], true)) {
                        let inversions = (0..4)
                            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
                            .filter(|&(i, j)| perm[i] > perm[j])
                            .count();
                        out.push((perm, if inversions % 2 == 0 { 1 } else { -1 }));
                    }
                }
            }
        }
    }
    out
}

pub fn fields() -> Vec<LocalField> {
    [3u64, 5, 7]
        .iter()
        .map(|&p| LocalField::new(p).unwrap())
        .collect()
}
