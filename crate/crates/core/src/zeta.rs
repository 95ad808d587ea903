//! Local zeta sums `I(X) = sum_n vol(V_n^0) X^n` with `X = q^-m`, `m = 2(s - 1)`.
//!
//! The sums are assembled as exact rational functions of X from a finite
//! volume sequence plus its detected tail, then continued to `s = 0`,
//! i.e. `X = q^2`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::measure::{Tail, VolumeSequence};

/// Polynomial in X with rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::new(vec![c])
    }

    /// `c X^n`.
    pub fn monomial(c: BigRational, n: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); n + 1];
        coeffs[n] = c;
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Quotient and remainder of division by a nonzero polynomial.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRational::zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let c = &rem[top] / &lead;
            for (j, dc) in d.coeffs.iter().enumerate() {
                let v = &c * dc;
                rem[top - dd + j] -= v;
            }
            quot[top - dd] = c;
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        match a.degree() {
            None => Poly::zero(),
            Some(d) => {
                let lead = a.coeffs[d].clone();
                a.scale(&(BigRational::one() / lead))
            }
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            let body = match i {
                0 => mag.to_string(),
                _ => {
                    let x = if i == 1 {
                        "X".to_string()
                    } else {
                        format!("X^{i}")
                    };
                    if mag.is_one() {
                        x
                    } else {
                        format!("{mag}*{x}")
                    }
                }
            };
            match (first, c.is_negative()) {
                (true, true) => write!(f, "-{body}")?,
                (true, false) => write!(f, "{body}")?,
                (false, true) => write!(f, " - {body}")?,
                (false, false) => write!(f, " + {body}")?,
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.parse().map_err(|_| bad())?;
            let b: BigInt = b.parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl std::str::FromStr for Poly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, ch) in s.char_indices() {
            if (ch == '+' || ch == '-') && i > start {
                terms.push(&s[start..i]);
                start = i;
            }
        }
        terms.push(&s[start..]);
        let mut acc = Poly::zero();
        for term in terms {
            let (sign, body) = match term.as_bytes()[0] {
                b'-' => (-1, &term[1..]),
                b'+' => (1, &term[1..]),
                _ => (1, term),
            };
            let (coef, power) = match body.find('X') {
                None => (parse_rational(body)?, 0),
                Some(pos) => {
                    let coef = match &body[..pos] {
                        "" => BigRational::one(),
                        c => parse_rational(
                            c.strip_suffix('*')
                                .ok_or_else(|| Error::Parse(format!("bad term `{term}`")))?,
                        )?,
                    };
                    let power = match &body[pos + 1..] {
                        "" => 1,
                        e => e
                            .strip_prefix('^')
                            .and_then(|e| e.parse::<usize>().ok())
                            .ok_or_else(|| Error::Parse(format!("bad exponent in `{term}`")))?,
                    };
                    (coef, power)
                }
            };
            acc = acc.add(&Poly::monomial(coef * BigInt::from(sign), power));
        }
        Ok(acc)
    }
}

/// Reduced quotient of polynomials in X.
///
/// Canonical normalization: the denominator has constant term 1 when that
/// term is nonzero, and is monic otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DegenerateInput("zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(RationalFunction {
                num,
                den: Poly::constant(BigRational::one()),
            });
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lead = if den.coeff(0).is_zero() {
            den.coeff(den.degree().expect("nonzero"))
        } else {
            den.coeff(0)
        };
        let inv = BigRational::one() / lead;
        Ok(RationalFunction {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFunction {
            num: p,
            den: Poly::constant(BigRational::one()),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn mul(&self, other: &RationalFunction) -> Result<Self> {
        Self::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn add(&self, other: &RationalFunction) -> Result<Self> {
        Self::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn eval(&self, x: &BigRational) -> Result<BigRational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return Err(Error::Pole(x.to_string()));
        }
        Ok(self.num.eval(x) / d)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.num, self.den)
    }
}

impl std::str::FromStr for RationalFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let inner = s
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("expected `(num)/(den)`, got `{s}`")))?;
        let (num, den) = inner
            .split_once(")/(")
            .ok_or_else(|| Error::Parse(format!("expected `(num)/(den)`, got `{s}`")))?;
        Self::new(num.parse()?, den.parse()?)
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn q_power(q: u64, e: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(q));
    if e >= 0 {
        base.pow(e as i32)
    } else {
        BigRational::one() / base.pow((-e) as i32)
    }
}

/// Classifies the tail of a volume sequence.
///
/// Finite when the last three terms vanish; geometric with ratio `1/q` from
/// the least index `n0` such that every later consecutive ratio is exactly
/// `1/q` (at least three ratios are required).
pub fn detect_tail(vs: &VolumeSequence) -> Result<VolumeSequence> {
    let v = &vs.values;
    if v.len() < 5 {
        return Err(Error::InvalidParameters(format!(
            "need at least 5 values, got {}",
            v.len()
        )));
    }
    let mut out = vs.clone();
    let n = v.len();
    if v[n - 3..].iter().all(|x| x.is_zero()) {
        out.tail = Tail::Finite;
        return Ok(out);
    }
    let rho = rat(1, vs.q as i64);
    let mut n0 = n - 1;
    while n0 > 0 && !v[n0 - 1].is_zero() && v[n0] == &v[n0 - 1] * &rho {
        n0 -= 1;
    }
    if n - 1 - n0 < 3 || v[n0].is_zero() {
        return Err(Error::TailUndetected(format!(
            "the last values are neither zero nor in ratio 1/{} over three steps",
            vs.q
        )));
    }
    let coefficient = &v[n0] * q_power(vs.q, n0 as i64);
    out.tail = Tail::Geometric {
        rho,
        from: n0,
        coefficient,
    };
    Ok(out)
}

/// Sums `vol(V_n^0) X^n` in closed form using the detected tail.
pub fn assemble_zeta(vs: &VolumeSequence) -> Result<RationalFunction> {
    match &vs.tail {
        Tail::Undetected => Err(Error::TailUndetected("run detect_tail first".into())),
        Tail::Finite => Ok(RationalFunction::from_poly(Poly::new(vs.values.clone()))),
        Tail::Geometric { rho, from, .. } => {
            let head = Poly::new(vs.values[..*from].to_vec());
            let one_minus = Poly::new(vec![BigRational::one(), -rho.clone()]);
            let tail = Poly::monomial(vs.values[*from].clone(), *from);
            RationalFunction::new(head.mul(&one_minus).add(&tail), one_minus)
        }
    }
}

/// The point `X = q^2` corresponding to `s = 0`.
pub fn x_at_s0(q: u64) -> BigRational {
    q_power(q, 2)
}

/// Value of the analytic continuation at `s = 0`.
pub fn evaluate_at_s0(rf: &RationalFunction, q: u64) -> Result<BigRational> {
    rf.eval(&x_at_s0(q))
}

/// `(1 - q^(-2(s+1))) / (1 - q^(1-2s))`, the integral of `|x|` over `V^0` for the linear form `x`.
pub fn normalizer(s: i64, q: u64) -> Result<BigRational> {
    let num = BigRational::one() - q_power(q, -2 * (s + 1));
    let den = BigRational::one() - q_power(q, 1 - 2 * s);
    if den.is_zero() {
        return Err(Error::Pole(format!("s = {s}")));
    }
    Ok(num / den)
}

/// The normalizer as a function of X: `(1 - X q^-4) / (1 - X q^-1)`.
pub fn normalizer_rf(q: u64) -> RationalFunction {
    let num = Poly::new(vec![BigRational::one(), -q_power(q, -4)]);
    let den = Poly::new(vec![BigRational::one(), -q_power(q, -1)]);
    RationalFunction::new(num, den).expect("nonzero denominator")
}

/// Assembled zeta sum of a volume sequence and its value at `s = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaResult {
    pub rf: RationalFunction,
    pub value_at_s0: BigRational,
    pub convergence_note: String,
}

pub fn zeta(vs: &VolumeSequence) -> Result<ZetaResult> {
    let vs = detect_tail(vs)?;
    let rf = assemble_zeta(&vs)?;
    let value_at_s0 = evaluate_at_s0(&rf, vs.q)?;
    let convergence_note = match vs.tail {
        Tail::Finite => "polynomial in X: entire, no continuation needed".to_string(),
        _ => format!(
            "series converges for |X| < {q}; value at X = {q}^2 by continuation",
            q = vs.q
        ),
    };
    Ok(ZetaResult {
        rf,
        value_at_s0,
        convergence_note,
    })
}
