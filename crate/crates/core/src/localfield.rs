//! Arithmetic of the local field `Q_p` (p odd) and of its quadratic extensions.
//!
//! Everything here works with integer representatives: a square class is
//! identified by one of `1, u, p, u*p` where `u` is the least positive
//! quadratic nonresidue mod p, and elements of a quadratic extension
//! `Q_p(sqrt A)` are pairs of integers `a + b*sqrt(A)`.

use std::fmt;

use num_integer::Roots;

use crate::error::{Error, Result};

/// Default number of p-adic digits available to the counting engines.
pub const DEFAULT_PRECISION: u32 = 8;

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut b = (base % m) as u128;
    let mut acc = 1u128 % m128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Reduces a signed integer into `[0, m)`.
pub(crate) fn reduce(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

/// Legendre symbol of `a` modulo the odd prime `p`; 0 when `p | a`.
pub(crate) fn legendre(a: i128, p: u64) -> i8 {
    let r = reduce(a, p);
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Splits a nonzero integer as `p^v * w` with `p` not dividing `w`.
pub(crate) fn split_valuation(mut x: i128, p: u64) -> (u32, i128) {
    debug_assert!(x != 0);
    let p = p as i128;
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    (v, x)
}

/// The nonarchimedean local field `Q_p` with a fixed set of representatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalField {
    p: u64,
    u: u64,
    d: Option<u64>,
    precision_cap: u32,
}

impl LocalField {
    pub fn new(p: u64) -> Result<Self> {
        Self::with_precision(p, DEFAULT_PRECISION)
    }

    pub fn with_precision(p: u64, precision_cap: u32) -> Result<Self> {
        if p == 2 {
            return Err(Error::InvalidField(
                "residue characteristic 2 is not supported".into(),
            ));
        }
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if p > 1 << 20 {
            return Err(Error::InvalidField(format!("prime {p} is too large")));
        }
        if precision_cap == 0 {
            return Err(Error::InvalidField("precision cap must be positive".into()));
        }
        let u = (2..p)
            .find(|&a| legendre(a as i128, p) == -1)
            .expect("odd prime has a nonresidue");
        let d = if p % 4 == 3 {
            (1..p).find(|&d| legendre((d * d + 1) as i128, p) == -1)
        } else {
            None
        };
        Ok(LocalField {
            p,
            u,
            d,
            precision_cap,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Size of the residue field.
    pub fn q(&self) -> u64 {
        self.p
    }

    /// Least positive quadratic nonresidue mod p.
    pub fn u(&self) -> u64 {
        self.u
    }

    /// Least positive `d` with `d^2 + 1` a nonresidue; defined only when `p = 3 mod 4`.
    pub fn d(&self) -> Option<u64> {
        self.d
    }

    pub fn precision_cap(&self) -> u32 {
        self.precision_cap
    }

    /// Whether -1 is a square in `Q_p`.
    pub fn minus_one_is_square(&self) -> bool {
        self.p % 4 == 1
    }

    pub(crate) fn check_level(&self, k: u32) -> Result<()> {
        if k > self.precision_cap {
            Err(Error::Precision {
                needed: k,
                cap: self.precision_cap,
            })
        } else {
            Ok(())
        }
    }

    /// Integer representative of a square class.
    pub fn rep(&self, c: SquareClass) -> i64 {
        let (u, p) = (self.u as i64, self.p as i64);
        match c {
            SquareClass::One => 1,
            SquareClass::U => u,
            SquareClass::Pi => p,
            SquareClass::UPi => u * p,
        }
    }

    /// Parses `1`, `u`, `pi`, `u*pi`, optionally negated (`-pi` is the class of `-p`).
    pub fn parse_class(&self, s: &str) -> Result<SquareClass> {
        let s = s.trim();
        match s.strip_prefix('-') {
            Some(rest) => {
                let c: SquareClass = rest.trim().parse()?;
                Ok(c.mul(self.minus_one()))
            }
            None => s.parse(),
        }
    }

    /// Square class of -1.
    pub fn minus_one(&self) -> SquareClass {
        if self.minus_one_is_square() {
            SquareClass::One
        } else {
            SquareClass::U
        }
    }
}

/// The four classes of `Q_p^x / (Q_p^x)^2` for odd p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SquareClass {
    One,
    U,
    Pi,
    UPi,
}

impl SquareClass {
    pub const ALL: [SquareClass; 4] = [
        SquareClass::One,
        SquareClass::U,
        SquareClass::Pi,
        SquareClass::UPi,
    ];

    fn bits(self) -> (u8, u8) {
        match self {
            SquareClass::One => (0, 0),
            SquareClass::U => (1, 0),
            SquareClass::Pi => (0, 1),
            SquareClass::UPi => (1, 1),
        }
    }

    fn from_bits(unit: u8, val: u8) -> Self {
        match (unit & 1, val & 1) {
            (0, 0) => SquareClass::One,
            (1, 0) => SquareClass::U,
            (0, 1) => SquareClass::Pi,
            _ => SquareClass::UPi,
        }
    }

    pub fn mul(self, other: SquareClass) -> SquareClass {
        let (a, b) = self.bits();
        let (c, d) = other.bits();
        Self::from_bits(a ^ c, b ^ d)
    }

    /// Parity of the valuation of any element in the class.
    pub fn valuation_parity(self) -> u32 {
        self.bits().1 as u32
    }

    /// Whether the unit part is a nonresidue.
    pub fn unit_nonsquare(self) -> bool {
        self.bits().0 == 1
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SquareClass::One => "1",
            SquareClass::U => "u",
            SquareClass::Pi => "pi",
            SquareClass::UPi => "u*pi",
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SquareClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().replace(' ', "").as_str() {
            "1" => Ok(SquareClass::One),
            "u" => Ok(SquareClass::U),
            "pi" => Ok(SquareClass::Pi),
            "u*pi" | "pi*u" => Ok(SquareClass::UPi),
            other => Err(Error::Parse(format!("unknown square class `{other}`"))),
        }
    }
}

/// Square class of a nonzero integer.
pub fn square_class_of(x: i128, field: &LocalField) -> Result<SquareClass> {
    if x == 0 {
        return Err(Error::DegenerateInput("zero has no square class".into()));
    }
    let (v, w) = split_valuation(x, field.p);
    if v > field.precision_cap {
        return Err(Error::Precision {
            needed: v,
            cap: field.precision_cap,
        });
    }
    let unit = if legendre(w, field.p) == 1 { 0 } else { 1 };
    Ok(SquareClass::from_bits(unit, (v % 2) as u8))
}

/// Quadratic character of the residue field of size `q` (q = p or p^2).
///
/// Integers are read as elements of the prime field, so for `q = p^2` every
/// nonzero input is a square.
pub fn eta(a: i128, q: u64) -> Result<i8> {
    if q % 2 == 0 {
        return Err(Error::InvalidField(format!(
            "residue field size {q} is even"
        )));
    }
    if is_prime(q) {
        return Ok(legendre(a, q));
    }
    let r = q.sqrt();
    if r * r == q && is_prime(r) {
        return Ok(if reduce(a, r) == 0 { 0 } else { 1 });
    }
    Err(Error::InvalidField(format!(
        "{q} is not p or p^2 for an odd prime p"
    )))
}

/// The quadratic extension `F(sqrt D)` of `F = Q_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadExtension {
    pub disc: SquareClass,
    pub ramified: bool,
    pub residue_size: u64,
}

impl QuadExtension {
    pub fn new(disc: SquareClass, field: &LocalField) -> Result<Self> {
        if disc == SquareClass::One {
            return Err(Error::NotAnExtension("D is a square".into()));
        }
        let ramified = disc.valuation_parity() == 1;
        let residue_size = if ramified {
            field.q()
        } else {
            field.q() * field.q()
        };
        Ok(QuadExtension {
            disc,
            ramified,
            residue_size,
        })
    }
}

/// Whether `r` is a norm from `F(sqrt D)`.
///
/// Unramified `D`: norms are exactly the elements of even valuation.
/// Ramified `D`: the norm group is generated by `-D` and the unit squares.
pub fn is_norm(r: SquareClass, d: SquareClass, field: &LocalField) -> Result<bool> {
    let ext = QuadExtension::new(d, field)?;
    if ext.ramified {
        let minus_d = field.minus_one().mul(d);
        Ok(r == SquareClass::One || r == minus_d)
    } else {
        Ok(r.valuation_parity() == 0)
    }
}

/// The quadratic character of `F^x` attached to `F(sqrt D)`.
pub fn kappa(r: SquareClass, d: SquareClass, field: &LocalField) -> Result<i8> {
    Ok(if is_norm(r, d, field)? { 1 } else { -1 })
}

/// The quadratic extension `E3 = Q_p(sqrt A)` used by type III/IV classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaseExtension {
    pub a: i64,
    pub ramified: bool,
}

impl BaseExtension {
    pub fn new(a: i64, field: &LocalField) -> Result<Self> {
        let class = square_class_of(a as i128, field)?;
        if class == SquareClass::One {
            return Err(Error::NotAnExtension(format!("A = {a} is a square")));
        }
        let (v, _) = split_valuation(a as i128, field.p());
        if v > 1 {
            return Err(Error::InvalidParameters(format!(
                "A = {a} must have valuation 0 or 1"
            )));
        }
        Ok(BaseExtension {
            a,
            ramified: v == 1,
        })
    }

    fn unit_part(&self, field: &LocalField) -> i128 {
        if self.ramified {
            self.a as i128 / field.p() as i128
        } else {
            self.a as i128
        }
    }
}

/// An element `a + b*sqrt(A)` of `E3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct E3Elem {
    pub a: i128,
    pub b: i128,
}

impl E3Elem {
    pub fn new(a: i128, b: i128) -> Self {
        E3Elem { a, b }
    }

    pub fn from_int(a: i128) -> Self {
        E3Elem { a, b: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn mul(&self, other: &E3Elem, base: &BaseExtension) -> E3Elem {
        let big_a = base.a as i128;
        E3Elem {
            a: self.a * other.a + self.b * other.b * big_a,
            b: self.a * other.b + self.b * other.a,
        }
    }

    pub fn conj(&self) -> E3Elem {
        E3Elem {
            a: self.a,
            b: -self.b,
        }
    }

    /// `N_{E3/F}`.
    pub fn norm(&self, base: &BaseExtension) -> i128 {
        self.a * self.a - base.a as i128 * self.b * self.b
    }
}

/// Element of the residue field of `E3`: `c0 + c1*sqrt(A)` when unramified, `c0` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Residue {
    c0: u64,
    c1: u64,
}

struct ResidueField {
    p: u64,
    /// `A mod p` when `E3` is unramified, `None` when the residue field is `F_p`.
    nonres: Option<u64>,
}

impl ResidueField {
    fn mul(&self, x: Residue, y: Residue) -> Residue {
        let p = self.p as u128;
        match self.nonres {
            None => Residue {
                c0: ((x.c0 as u128 * y.c0 as u128) % p) as u64,
                c1: 0,
            },
            Some(a) => {
                let c0 = (x.c0 as u128 * y.c0 as u128
                    + (x.c1 as u128 * y.c1 as u128 % p) * a as u128)
                    % p;
                let c1 = (x.c0 as u128 * y.c1 as u128 + x.c1 as u128 * y.c0 as u128) % p;
                Residue {
                    c0: c0 as u64,
                    c1: c1 as u64,
                }
            }
        }
    }

    fn norm(&self, x: Residue) -> u64 {
        match self.nonres {
            None => x.c0,
            Some(a) => {
                let p = self.p as i128;
                let n = x.c0 as i128 * x.c0 as i128 - a as i128 * (x.c1 as i128 * x.c1 as i128 % p);
                reduce(n, self.p)
            }
        }
    }

    fn inv(&self, x: Residue) -> Residue {
        let n = self.norm(x);
        let n_inv = pow_mod(n, self.p - 2, self.p);
        match self.nonres {
            None => Residue { c0: n_inv, c1: 0 },
            Some(_) => {
                let conj = Residue {
                    c0: x.c0,
                    c1: (self.p - x.c1) % self.p,
                };
                self.mul(conj, Residue { c0: n_inv, c1: 0 })
            }
        }
    }

    fn pow(&self, x: Residue, e: i64) -> Residue {
        let base = if e < 0 { self.inv(x) } else { x };
        let mut acc = Residue { c0: 1, c1: 0 };
        for _ in 0..e.unsigned_abs() {
            acc = self.mul(acc, base);
        }
        acc
    }

    /// Quadratic character of the residue field.
    fn eta(&self, x: Residue) -> i8 {
        legendre(self.norm(x) as i128, self.p)
    }
}

/// Normalized valuation on `E3` and the residue of `x / Pi^v`.
fn e3_valuation(x: &E3Elem, base: &BaseExtension, field: &LocalField) -> Result<(i64, Residue)> {
    if x.is_zero() {
        return Err(Error::DegenerateInput("zero element of E3".into()));
    }
    let p = field.p();
    let va = if x.a == 0 {
        None
    } else {
        Some(split_valuation(x.a, p))
    };
    let vb = if x.b == 0 {
        None
    } else {
        Some(split_valuation(x.b, p))
    };
    if !base.ramified {
        let v = match (va, vb) {
            (Some((v1, _)), Some((v2, _))) => v1.min(v2),
            (Some((v1, _)), None) => v1,
            (None, Some((v2, _))) => v2,
            (None, None) => unreachable!(),
        };
        let scale = (p as i128).pow(v);
        let c0 = reduce(x.a / scale, p);
        let c1 = reduce(x.b / scale, p);
        return Ok((v as i64, Residue { c0, c1 }));
    }
    // Ramified: Pi = sqrt(A), v(a) = 2 v_p(a), v(b sqrt A) = 2 v_p(b) + 1.
    let wa = va.map(|(v, w)| (2 * v as i64, v, w));
    let wb = vb.map(|(v, w)| (2 * v as i64 + 1, v, w));
    let unit_a = base.unit_part(field);
    let (v, k, w) = match (wa, wb) {
        (Some(x), Some(y)) => {
            if x.0 < y.0 {
                x
            } else {
                y
            }
        }
        (Some(x), None) => x,
        (None, Some(y)) => y,
        (None, None) => unreachable!(),
    };
    // x / (A^k) or x / (A^k sqrt A): the residue is w / (A/p)^k.
    let denom = pow_mod(reduce(unit_a, p), k as u64, p);
    let c0 = (reduce(w, p) as u128 * pow_mod(denom, p - 2, p) as u128 % p as u128) as u64;
    Ok((v, Residue { c0, c1: 0 }))
}

/// The extension `E = E3(sqrt D)` over `E3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelExtension {
    pub base: BaseExtension,
    pub disc: E3Elem,
}

impl RelExtension {
    pub fn new(base: BaseExtension, disc: E3Elem, field: &LocalField) -> Result<Self> {
        let (v, eps) = e3_valuation(&disc, &base, field)?;
        let rf = residue_field(&base, field);
        if v % 2 == 0 && rf.eta(eps) == 1 {
            return Err(Error::NotAnExtension("D is a square in E3".into()));
        }
        Ok(RelExtension { base, disc })
    }
}

fn residue_field(base: &BaseExtension, field: &LocalField) -> ResidueField {
    ResidueField {
        p: field.p(),
        nonres: if base.ramified {
            None
        } else {
            Some(reduce(base.a as i128, field.p()))
        },
    }
}

/// The quadratic character of `E3^x` attached to `E3(sqrt D)`, via the tame symbol.
pub fn kappa_rel(r: &E3Elem, ext: &RelExtension, field: &LocalField) -> Result<i8> {
    let rf = residue_field(&ext.base, field);
    let (vr, er) = e3_valuation(r, &ext.base, field)?;
    let (vd, ed) = e3_valuation(&ext.disc, &ext.base, field)?;
    let mut sym = rf.mul(rf.pow(er, vd), rf.pow(ed, -vr));
    if (vr * vd) % 2 != 0 {
        sym = rf.mul(
            sym,
            Residue {
                c0: field.p() - 1,
                c1: 0,
            },
        );
    }
    Ok(rf.eta(sym))
}

/// Whether an element of `E3` is a square.
pub fn is_square_e3(x: &E3Elem, base: &BaseExtension, field: &LocalField) -> Result<bool> {
    let (v, eps) = e3_valuation(x, base, field)?;
    Ok(v % 2 == 0 && residue_field(base, field).eta(eps) == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representatives() {
        let f3 = LocalField::new(3).unwrap();
        assert_eq!((f3.u(), f3.d()), (2, Some(1)));
        let f5 = LocalField::new(5).unwrap();
        assert_eq!((f5.u(), f5.d()), (2, None));
        let f7 = LocalField::new(7).unwrap();
        assert_eq!(f7.u(), 3);
        // d^2 + 1 must be a nonresidue mod 7: 1+1 = 2 is a residue, 4+1 = 5 is not.
        assert_eq!(f7.d(), Some(2));
        let f11 = LocalField::new(11).unwrap();
        assert_eq!(f11.u(), 2);
    }

    #[test]
    fn rejects_bad_primes() {
        assert!(matches!(LocalField::new(2), Err(Error::InvalidField(_))));
        assert!(matches!(LocalField::new(9), Err(Error::InvalidField(_))));
        assert!(matches!(LocalField::new(1), Err(Error::InvalidField(_))));
    }

    #[test]
    fn eta_values() {
        assert_eq!(eta(2, 3).unwrap(), -1);
        assert_eq!(eta(4, 5).unwrap(), 1);
        assert_eq!(eta(0, 7).unwrap(), 0);
        assert_eq!(eta(3, 9).unwrap(), 0);
        assert_eq!(eta(2, 9).unwrap(), 1);
        assert!(eta(2, 4).is_err());
        assert!(eta(2, 15).is_err());
    }

    #[test]
    fn square_classes() {
        let f = LocalField::new(3).unwrap();
        assert_eq!(square_class_of(-1, &f).unwrap(), SquareClass::U);
        assert_eq!(square_class_of(-3, &f).unwrap(), SquareClass::UPi);
        assert_eq!(square_class_of(18, &f).unwrap(), SquareClass::U);
        assert!(square_class_of(0, &f).is_err());
        assert_eq!(f.parse_class("-pi").unwrap(), SquareClass::UPi);
        assert_eq!(f.parse_class("u*pi").unwrap(), SquareClass::UPi);
        let f5 = LocalField::new(5).unwrap();
        assert_eq!(f5.parse_class("-pi").unwrap(), SquareClass::Pi);
    }

    #[test]
    fn unramified_norms_have_even_valuation() {
        let f = LocalField::new(5).unwrap();
        for r in SquareClass::ALL {
            assert_eq!(
                is_norm(r, SquareClass::U, &f).unwrap(),
                r.valuation_parity() == 0
            );
        }
        assert!(matches!(
            is_norm(SquareClass::U, SquareClass::One, &f),
            Err(Error::NotAnExtension(_))
        ));
    }

    #[test]
    fn sqrt_minus_one_is_a_norm_when_a_is_minus_one() {
        let f = LocalField::new(3).unwrap();
        let base = BaseExtension::new(-1, &f).unwrap();
        let ext = RelExtension::new(base, E3Elem::from_int(3), &f).unwrap();
        assert_eq!(kappa_rel(&E3Elem::new(0, 1), &ext, &f).unwrap(), 1);
    }
}
