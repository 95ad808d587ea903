use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::forms::QuadraticForm;
use crate::localfield::{reduce, LocalField};

/// Index of the coefficient of `x_i x_j` (i <= j) in the dense layout.
const fn qidx(i: usize, j: usize) -> usize {
    const ROW: [usize; 4] = [0, 4, 7, 9];
    ROW[i] + (j - i)
}

const LIN: usize = 10;
const CONST: usize = 14;

type Coeffs = [u64; 15];

fn valuation_u64(mut x: u64, p: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    while x % p == 0 && v < cap {
        x /= p;
        v += 1;
    }
    v
}

/// Counts solutions of polynomial congruences by lifting residues one digit at a time.
pub(crate) struct HenselCounter {
    p: u64,
    pow: Vec<u128>,
    memo: HashMap<(Coeffs, u32), u128>,
}

impl HenselCounter {
    pub(crate) fn new(p: u64, k_max: u32) -> Result<Self> {
        let mut pow = vec![1u128];
        for i in 1..=(4 * k_max) {
            let next = pow[i as usize - 1]
                .checked_mul(p as u128)
                .filter(|v| *v < (1u128 << 126))
                .ok_or(Error::Overflow { p, k: k_max })?;
            pow.push(next);
        }
        if pow[k_max as usize] > u64::MAX as u128 / p as u128 {
            return Err(Error::Overflow { p, k: k_max });
        }
        Ok(HenselCounter {
            p,
            pow,
            memo: HashMap::new(),
        })
    }

    fn modulus(&self, k: u32) -> u64 {
        self.pow[k as usize] as u64
    }

    fn content(&self, f: &Coeffs, k: u32) -> u32 {
        f.iter()
            .map(|&c| valuation_u64(c, self.p, k))
            .min()
            .unwrap_or(k)
    }

    fn divide(&self, f: &Coeffs, e: u32, k: u32) -> Coeffs {
        let d = self.pow[e as usize] as u64;
        let m = self.modulus(k - e);
        f.map(|c| (c / d) % m)
    }

    fn eval_mod_p(&self, f: &Coeffs, v: [u64; 4]) -> u64 {
        let p = self.p;
        let mut acc = f[CONST] % p;
        for i in 0..4 {
            acc += (f[LIN + i] % p) * v[i];
            for j in i..4 {
                acc += (f[qidx(i, j)] % p) * (v[i] * v[j] % p);
            }
            acc %= p;
        }
        acc
    }

    /// Partial derivatives at `v` as integers (not reduced).
    fn gradient(&self, f: &Coeffs, v: [u64; 4], m: u64) -> [u64; 4] {
        let mm = m as u128;
        let mut g = [0u64; 4];
        for (i, gi) in g.iter_mut().enumerate() {
            let mut acc = f[LIN + i] as u128;
            for j in 0..4 {
                let c = if i == j {
                    2 * f[qidx(i, i)] as u128 % mm
                } else {
                    f[qidx(i.min(j), i.max(j))] as u128
                };
                acc += c * v[j] as u128 % mm;
            }
            *gi = (acc % mm) as u64;
        }
        g
    }

    fn eval_mod(&self, f: &Coeffs, v: [u64; 4], m: u64) -> u64 {
        let mm = m as u128;
        let mut acc = f[CONST] as u128 % mm;
        for i in 0..4 {
            acc += f[LIN + i] as u128 * v[i] as u128 % mm;
            for j in i..4 {
                acc += f[qidx(i, j)] as u128 * (v[i] as u128 * v[j] as u128 % mm) % mm;
            }
            acc %= mm;
        }
        acc as u64
    }

    /// `g(w) = f(v0 + p w)` reduced mod `p^k`.
    fn shift(&self, f: &Coeffs, v0: [u64; 4], k: u32) -> Coeffs {
        let m = self.modulus(k);
        let mm = m as u128;
        let p = self.p as u128;
        let mut g = [0u64; 15];
        for i in 0..4 {
            for j in i..4 {
                g[qidx(i, j)] = (f[qidx(i, j)] as u128 * (p * p % mm) % mm) as u64;
            }
        }
        let grad = self.gradient(f, v0, m);
        for i in 0..4 {
            g[LIN + i] = (grad[i] as u128 * p % mm) as u64;
        }
        g[CONST] = self.eval_mod(f, v0, m);
        g
    }

    fn residues(&self) -> impl Iterator<Item = [u64; 4]> {
        let p = self.p;
        (0..p * p * p * p).map(move |i| [i % p, (i / p) % p, (i / (p * p)) % p, i / (p * p * p)])
    }

    /// Number of `w mod p^(k-1)` with `g(w) = 0 mod p^k`, where `g` has positive content.
    fn fiber(&mut self, g: &Coeffs, k: u32) -> u128 {
        let e = self.content(g, k);
        debug_assert!(e >= 1);
        if e >= k {
            return self.pow[4 * (k as usize - 1)];
        }
        let h = self.divide(g, e, k);
        self.pow[4 * (e as usize - 1)] * self.count_all(&h, k - e)
    }

    /// Number of `v mod p^k` (not necessarily primitive) with `f(v) = 0 mod p^k`.
    fn count_all(&mut self, f: &Coeffs, k: u32) -> u128 {
        if k == 0 {
            return 1;
        }
        let c = self.content(f, k);
        if c >= k {
            return self.pow[4 * k as usize];
        }
        if c > 0 {
            let h = self.divide(f, c, k);
            return self.pow[4 * c as usize] * self.count_all(&h, k - c);
        }
        if let Some(&hit) = self.memo.get(&(*f, k)) {
            return hit;
        }
        let total = self.count_over_residues(f, k, false);
        self.memo.insert((*f, k), total);
        total
    }

    /// Sums the lifts over residues `v0 mod p` of the zeros of a content-free `f`.
    fn count_over_residues(&mut self, f: &Coeffs, k: u32, primitive: bool) -> u128 {
        let p = self.p;
        let mut total = 0u128;
        let residues: Vec<[u64; 4]> = self.residues().collect();
        for v0 in residues {
            if primitive && v0 == [0; 4] {
                continue;
            }
            if self.eval_mod_p(f, v0) != 0 {
                continue;
            }
            let grad = self.gradient(f, v0, p);
            if grad.iter().any(|&g| g != 0) {
                total += self.pow[3 * (k as usize - 1)];
            } else if k == 1 {
                total += 1;
            } else {
                let g = self.shift(f, v0, k);
                total += self.fiber(&g, k);
            }
        }
        total
    }

    /// Number of primitive `v mod p^k` with `f(v) = 0 mod p^k`, for homogeneous `f`.
    pub(crate) fn count_primitive(&mut self, f: &Coeffs, k: u32) -> u128 {
        let c = self.content(f, k);
        if c >= k {
            return self.pow[4 * k as usize] - self.pow[4 * (k as usize - 1)];
        }
        if c > 0 {
            let h = self.divide(f, c, k);
            return self.pow[4 * c as usize] * self.count_primitive(&h, k - c);
        }
        self.count_over_residues(f, k, true)
    }
}

/// Counts primitive `v in (Z/p^k)^4` with `Q(v) = 0 mod p^k` by Hensel lifting.
pub fn count_hensel(q: &QuadraticForm, k: u32, field: &LocalField) -> Result<u128> {
    let mut counter = HenselCounter::new(field.p(), k)?;
    count_with(&mut counter, q, k, field)
}

pub(crate) fn count_with(
    counter: &mut HenselCounter,
    q: &QuadraticForm,
    k: u32,
    field: &LocalField,
) -> Result<u128> {
    if k == 0 {
        return Err(Error::InvalidParameters(
            "level k must be at least 1".into(),
        ));
    }
    field.check_level(k)?;
    let m = counter.modulus(k);
    let coeffs = q.dense().map(|c| reduce(c, m));
    Ok(counter.count_primitive(&coeffs, k))
}
