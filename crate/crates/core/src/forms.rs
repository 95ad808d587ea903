//! Homogeneous forms in the variables (x, y, z, t), the catalog of normal
//! forms, isotropy, and the reductions of the twisted classes to that catalog.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::localfield::{is_norm, legendre, LocalField, SquareClass};

pub const VARS: [char; 4] = ['x', 'y', 'z', 't'];

/// Exponent vector of a monomial in (x, y, z, t).
pub type Monomial = [u8; 4];

type Poly = BTreeMap<Monomial, i128>;

/// A homogeneous form of degree 1 or 2 with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticForm {
    degree: u8,
    terms: BTreeMap<Monomial, i128>,
}

fn mono_degree(m: &Monomial) -> u8 {
    m.iter().sum()
}

/// Monomial `x_i * x_j`.
pub fn quad_mono(i: usize, j: usize) -> Monomial {
    let mut m = [0u8; 4];
    m[i] += 1;
    m[j] += 1;
    m
}

fn var_mono(i: usize) -> Monomial {
    let mut m = [0u8; 4];
    m[i] = 1;
    m
}

impl QuadraticForm {
    /// Builds a form from `(monomial, coefficient)` pairs; repeated monomials are summed.
    pub fn new(terms: impl IntoIterator<Item = (Monomial, i128)>) -> Result<Self> {
        let mut poly = Poly::new();
        for (m, c) in terms {
            *poly.entry(m).or_insert(0) += c;
        }
        Self::from_poly(poly)
    }

    fn from_poly(mut poly: Poly) -> Result<Self> {
        poly.retain(|_, c| *c != 0);
        let mut degrees = poly.keys().map(mono_degree);
        let degree = degrees
            .next()
            .ok_or_else(|| Error::DegenerateInput("the zero form".into()))?;
        if degrees.any(|d| d != degree) {
            return Err(Error::DegenerateInput("form is not homogeneous".into()));
        }
        if degree != 1 && degree != 2 {
            return Err(Error::DegenerateInput(format!(
                "degree {degree} forms are not supported"
            )));
        }
        Ok(QuadraticForm {
            degree,
            terms: poly,
        })
    }

    /// Diagonal form `sum c_i v_i^2`.
    pub fn diagonal(c: [i128; 4]) -> Result<Self> {
        Self::new((0..4).map(|i| (quad_mono(i, i), c[i])))
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &i128)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> i128 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Coefficient of `x_i x_j` (degree 2 forms).
    pub fn quad_coeff(&self, i: usize, j: usize) -> i128 {
        if self.degree != 2 {
            return 0;
        }
        self.coeff(&quad_mono(i, j))
    }

    /// Coefficient of `x_i` (degree 1 forms).
    pub fn linear_coeff(&self, i: usize) -> i128 {
        if self.degree != 1 {
            return 0;
        }
        self.coeff(&var_mono(i))
    }

    pub fn eval(&self, v: [i128; 4]) -> i128 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut acc = *c;
                for i in 0..4 {
                    for _ in 0..m[i] {
                        acc *= v[i];
                    }
                }
                acc
            })
            .sum()
    }

    pub fn scale(&self, c: i128) -> Result<Self> {
        Self::new(self.terms.iter().map(|(m, a)| (*m, a * c)))
    }

    /// Coefficients in the fixed order: ten quadratic monomials `x_i x_j` (i <= j),
    /// four linear monomials, one constant.
    pub fn dense(&self) -> [i128; 15] {
        let mut out = [0i128; 15];
        let mut idx = 0;
        for i in 0..4 {
            for j in i..4 {
                out[idx] = self.quad_coeff(i, j);
                idx += 1;
            }
        }
        for i in 0..4 {
            out[10 + i] = self.linear_coeff(i);
        }
        out
    }

    /// Twice the Gram matrix, so that `Q(v) = v^T G v / 2` with integral `G`.
    pub fn gram2(&self) -> [[i128; 4]; 4] {
        let mut g = [[0i128; 4]; 4];
        for i in 0..4 {
            for j in i..4 {
                let c = self.quad_coeff(i, j);
                if i == j {
                    g[i][i] = 2 * c;
                } else {
                    g[i][j] = c;
                    g[j][i] = c;
                }
            }
        }
        g
    }

    /// Returns `Q(M v)`.
    pub fn change_of_variables(&self, m: &[[i64; 4]; 4], field: &LocalField) -> Result<Self> {
        let det = det4(m);
        if legendre(det, field.p()) == 0 {
            return Err(Error::NonUnimodular(det.to_string()));
        }
        // Substitute v_i -> sum_j m[i][j] v_j.
        let images: Vec<Poly> = (0..4)
            .map(|i| {
                (0..4)
                    .filter(|&j| m[i][j] != 0)
                    .map(|j| (var_mono(j), m[i][j] as i128))
                    .collect()
            })
            .collect();
        let mut out = Poly::new();
        for (mono, c) in &self.terms {
            let mut acc: Poly = [([0u8; 4], *c)].into_iter().collect();
            for i in 0..4 {
                for _ in 0..mono[i] {
                    acc = poly_mul(&acc, &images[i]);
                }
            }
            poly_add_into(&mut out, &acc, 1);
        }
        Self::from_poly(out)
    }

    /// Canonical text, e.g. `x^2 - u*y^2 - pi*z^2 + u*pi*t^2`.
    pub fn render(&self, field: &LocalField) -> String {
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let body = render_term(m, c.unsigned_abs(), field);
            match (i, *c < 0) {
                (0, true) => {
                    out.push('-');
                    out.push_str(&body);
                }
                (0, false) => out.push_str(&body),
                (_, true) => {
                    out.push_str(" - ");
                    out.push_str(&body);
                }
                (_, false) => {
                    out.push_str(" + ");
                    out.push_str(&body);
                }
            }
        }
        out
    }

    /// Parses the rendering grammar (`+ - * ^`, parentheses, integers and the
    /// symbols `u`, `pi`, `d`) with `u`, `pi = p`, `d` taken from `field`.
    pub fn parse(expr: &str, field: &LocalField) -> Result<Self> {
        let tokens = tokenize(expr)?;
        let mut parser = Parser {
            tokens,
            pos: 0,
            field,
        };
        let poly = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(Error::Parse(format!(
                "unexpected trailing input in `{expr}`"
            )));
        }
        Self::from_poly(poly)
    }

    /// Whether `Q` has a nontrivial zero over `Q_p`.
    pub fn is_isotropic(&self, field: &LocalField) -> Result<bool> {
        if self.degree != 2 {
            return Err(Error::DegenerateInput(
                "isotropy is defined for quadratic forms".into(),
            ));
        }
        let diag = diagonalize(&self.gram2())?;
        let p = field.p();
        let classes: Vec<(u32, i8)> = diag.iter().map(|a| rational_class(a, p)).collect();
        let disc_val: u32 = classes.iter().map(|c| c.0).sum();
        let disc_unit: i8 = classes.iter().map(|c| c.1).product();
        if disc_val % 2 == 1 || disc_unit == -1 {
            return Ok(true);
        }
        let mut eps = 1i8;
        for i in 0..4 {
            for j in (i + 1)..4 {
                eps *= hilbert(classes[i], classes[j], p);
            }
        }
        // Anisotropic iff the discriminant is a square and the Hasse invariant is -(-1,-1) = -1.
        Ok(eps != -1)
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let sign = if *c < 0 { "-" } else { "+" };
            if i == 0 {
                if *c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.unsigned_abs();
            let mono = render_mono(m);
            if a == 1 {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{a}*{mono}")?;
            }
        }
        Ok(())
    }
}

fn render_mono(m: &Monomial) -> String {
    let mut parts = Vec::new();
    for i in 0..4 {
        match m[i] {
            0 => {}
            1 => parts.push(VARS[i].to_string()),
            e => parts.push(format!("{}^{e}", VARS[i])),
        }
    }
    parts.join("*")
}

/// Cross terms never use the symbol `u`: their coefficients carry factors of 2
/// (as in `2*z*t`) which would be ambiguous when `u = 2`.
fn render_term(m: &Monomial, mut a: u128, field: &LocalField) -> String {
    let p = field.p() as u128;
    let mut k = 0;
    while a % p == 0 {
        a /= p;
        k += 1;
    }
    let mut parts = Vec::new();
    let cross = m.iter().all(|&e| e <= 1) && mono_degree(m) == 2;
    if a == field.u() as u128 && !cross {
        parts.push("u".to_string());
    } else if a != 1 {
        parts.push(a.to_string());
    }
    match k {
        0 => {}
        1 => parts.push("pi".into()),
        _ => parts.push(format!("pi^{k}")),
    }
    parts.push(render_mono(m));
    parts.join("*")
}

fn det4(m: &[[i64; 4]; 4]) -> i128 {
    fn minor(m: &[[i64; 4]; 4], rows: &[usize], cols: &[usize]) -> i128 {
        if rows.len() == 1 {
            return m[rows[0]][cols[0]] as i128;
        }
        let mut acc = 0i128;
        for (k, &c) in cols.iter().enumerate() {
            let sub: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = m[rows[0]][c] as i128 * minor(m, &rows[1..], &sub);
            acc += if k % 2 == 0 { term } else { -term };
        }
        acc
    }
    minor(m, &[0, 1, 2, 3], &[0, 1, 2, 3])
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m = [ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2], ma[3] + mb[3]];
            *out.entry(m).or_insert(0) += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn poly_add_into(out: &mut Poly, a: &Poly, sign: i128) {
    for (m, c) in a {
        *out.entry(*m).or_insert(0) += sign * c;
    }
    out.retain(|_, c| *c != 0);
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(i128),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1
            }
            '-' | '\u{2212}' => {
                out.push(Token::Minus);
                i += 1
            }
            '*' => {
                out.push(Token::Star);
                i += 1
            }
            '^' => {
                out.push(Token::Caret);
                i += 1
            }
            '(' => {
                out.push(Token::LParen);
                i += 1
            }
            ')' => {
                out.push(Token::RParen);
                i += 1
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let n = text
                    .parse()
                    .map_err(|_| Error::Parse(format!("integer `{text}` out of range")))?;
                out.push(Token::Num(n));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphabetic() {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    field: &'a LocalField,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = Poly::new();
        let mut sign = 1;
        if let Some(Token::Minus) = self.peek() {
            self.pos += 1;
            sign = -1;
        } else if let Some(Token::Plus) = self.peek() {
            self.pos += 1;
        }
        loop {
            let t = self.term()?;
            poly_add_into(&mut acc, &t, sign);
            match self.peek() {
                Some(Token::Plus) => sign = 1,
                Some(Token::Minus) => sign = -1,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        while let Some(Token::Star) = self.peek() {
            self.pos += 1;
            let f = self.power()?;
            acc = poly_mul(&acc, &f);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if let Some(Token::Caret) = self.peek() {
            self.pos += 1;
            let e = match self.tokens.get(self.pos) {
                Some(Token::Num(n)) if (0..=8).contains(n) => *n as u32,
                _ => return Err(Error::Parse("expected a small exponent after `^`".into())),
            };
            self.pos += 1;
            let mut acc: Poly = [([0u8; 4], 1)].into_iter().collect();
            for _ in 0..e {
                acc = poly_mul(&acc, &base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        let constant = |c: i128| -> Poly { [([0u8; 4], c)].into_iter().collect() };
        match tok {
            Token::Num(n) => Ok(constant(n)),
            Token::Minus => {
                let inner = self.power()?;
                Ok(inner.into_iter().map(|(m, c)| (m, -c)).collect())
            }
            Token::LParen => {
                let inner = self.expr()?;
                match self.peek() {
                    Some(Token::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(Error::Parse("missing `)`".into())),
                }
            }
            Token::Ident(name) => match name.as_str() {
                "x" => Ok([(var_mono(0), 1)].into_iter().collect()),
                "y" => Ok([(var_mono(1), 1)].into_iter().collect()),
                "z" => Ok([(var_mono(2), 1)].into_iter().collect()),
                "t" => Ok([(var_mono(3), 1)].into_iter().collect()),
                "u" => Ok(constant(self.field.u() as i128)),
                "pi" | "p" => Ok(constant(self.field.p() as i128)),
                "d" => match self.field.d() {
                    Some(d) => Ok(constant(d as i128)),
                    None => Err(Error::Parse(format!(
                        "d is undefined for p = {}",
                        self.field.p()
                    ))),
                },
                other => Err(Error::Parse(format!("unknown symbol `{other}`"))),
            },
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

/// Diagonalizes a symmetric matrix by congruence over Q.
fn diagonalize(g: &[[i128; 4]; 4]) -> Result<Vec<BigRational>> {
    let mut a: Vec<Vec<BigRational>> = g
        .iter()
        .map(|row| {
            row.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect();
    let n = 4;
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // Replace e_k by e_k + e_j: the new diagonal entry is 2 a[k][j].
                for c in 0..n {
                    let v = a[j][c].clone();
                    a[k][c] += v;
                }
                for r in 0..n {
                    let v = a[r][j].clone();
                    a[r][k] += v;
                }
            } else {
                return Err(Error::DegenerateInput("form is degenerate".into()));
            }
        }
        let pivot = a[k][k].clone();
        for r in (k + 1)..n {
            if a[r][k].is_zero() {
                continue;
            }
            let f = &a[r][k] / &pivot;
            for c in k..n {
                let v = &f * &a[k][c];
                a[r][c] -= v;
            }
            for rr in k..n {
                let v = &f * &a[rr][k];
                a[rr][r] -= v;
            }
        }
        diag.push(pivot);
    }
    Ok(diag)
}

/// `(valuation parity, Legendre symbol of the unit part)` of a nonzero rational.
fn rational_class(a: &BigRational, p: u64) -> (u32, i8) {
    let n = a.numer() * a.denom();
    let p_big = BigInt::from(p);
    let mut v = 0u32;
    let mut w = n;
    while (&w % &p_big).is_zero() {
        w /= &p_big;
        v += 1;
    }
    let r = (&w % &p_big + &p_big) % &p_big;
    (v % 2, legendre(r.to_i128().expect("residue fits"), p))
}

/// Hilbert symbol `(a, b)_p` for odd p from `(valuation, Legendre of unit)` data.
fn hilbert(a: (u32, i8), b: (u32, i8), p: u64) -> i8 {
    let (alpha, ua) = a;
    let (beta, ub) = b;
    let mut s = 1i8;
    if alpha % 2 == 1 && beta % 2 == 1 && (p % 4 == 3) {
        s = -s;
    }
    if beta % 2 == 1 {
        s *= ua;
    }
    if alpha % 2 == 1 {
        s *= ub;
    }
    s
}

/// Labels of the catalog of normal forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseLabel {
    IAniso,
    I1,
    I2,
    I3,
    II1,
    II2,
    II3a,
    II3b,
    II4,
    II5,
    IIINorm,
    IIISqrtA,
    IIIDPlusI,
    IVPi,
    IVU,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 15] = [
        CaseLabel::IAniso,
        CaseLabel::I1,
        CaseLabel::I2,
        CaseLabel::I3,
        CaseLabel::II1,
        CaseLabel::II2,
        CaseLabel::II3a,
        CaseLabel::II3b,
        CaseLabel::II4,
        CaseLabel::II5,
        CaseLabel::IIINorm,
        CaseLabel::IIISqrtA,
        CaseLabel::IIIDPlusI,
        CaseLabel::IVPi,
        CaseLabel::IVU,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::IAniso => "I-aniso",
            CaseLabel::I1 => "I.1",
            CaseLabel::I2 => "I.2",
            CaseLabel::I3 => "I.3",
            CaseLabel::II1 => "II.1",
            CaseLabel::II2 => "II.2",
            CaseLabel::II3a => "II.3a",
            CaseLabel::II3b => "II.3b",
            CaseLabel::II4 => "II.4",
            CaseLabel::II5 => "II.5",
            CaseLabel::IIINorm => "III-norm",
            CaseLabel::IIISqrtA => "III-sqrtA",
            CaseLabel::IIIDPlusI => "III-d+i",
            CaseLabel::IVPi => "IV-pi",
            CaseLabel::IVU => "IV-u",
        }
    }

    /// Whether the case is defined over `field`.
    pub fn available(self, field: &LocalField) -> bool {
        self != CaseLabel::IIIDPlusI || field.d().is_some()
    }

    /// All labels available over `field`.
    pub fn available_for(field: &LocalField) -> Vec<CaseLabel> {
        Self::ALL
            .into_iter()
            .filter(|c| c.available(field))
            .collect()
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CaseLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CaseLabel::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown case label `{s}`")))
    }
}

/// A catalog label together with the field it is instantiated over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormCase {
    pub label: CaseLabel,
    pub field: LocalField,
}

impl FormCase {
    pub fn new(label: CaseLabel, field: LocalField) -> Result<Self> {
        if !label.available(&field) {
            return Err(unavailable(label, &field));
        }
        Ok(FormCase { label, field })
    }
}

fn unavailable(label: CaseLabel, field: &LocalField) -> Error {
    Error::UnavailableCase {
        case: label.to_string(),
        reason: format!("requires p = 3 mod 4, got p = {}", field.p()),
    }
}

/// The normal form attached to a catalog label.
pub fn normal_form(case: &FormCase) -> Result<QuadraticForm> {
    let f = &case.field;
    let u = f.u() as i128;
    let p = f.p() as i128;
    let diag = |c: [i128; 4]| QuadraticForm::diagonal(c);
    match case.label {
        CaseLabel::IAniso => diag([1, -u, -p, u * p]),
        CaseLabel::I1 => diag([1, -1, -p, p]),
        CaseLabel::I2 => diag([1, p, -p, -p * p]),
        CaseLabel::I3 => diag([1, -1, -u, u]),
        CaseLabel::II1 => diag([1, -1, -u * p, p]),
        CaseLabel::II2 => diag([1, -u, -u * p, u * p]),
        CaseLabel::II3a => diag([1, -1, -u, p]),
        CaseLabel::II3b => diag([1, -1, -u * p, u]),
        CaseLabel::II4 => diag([1, -p, -u * p, u * p]),
        CaseLabel::II5 => diag([1, -u, -u, u * p]),
        // zt - D xy with A = u, D = pi.
        CaseLabel::IIINorm => QuadraticForm::new([(quad_mono(2, 3), 1), (quad_mono(0, 1), -p)]),
        // t^2 + A z^2 - D y^2 - AD x^2 with A = pi, D = u.
        CaseLabel::IIISqrtA => diag([-u * p, -u, p, 1]),
        // t^2 - z^2 - D y^2 + D x^2 + 2d(zt - D xy) with A = -1, D = pi.
        CaseLabel::IIIDPlusI => {
            let d = f.d().ok_or_else(|| unavailable(case.label, f))? as i128;
            QuadraticForm::new([
                (quad_mono(0, 0), p),
                (quad_mono(0, 1), -2 * d * p),
                (quad_mono(1, 1), -p),
                (quad_mono(2, 2), -1),
                (quad_mono(2, 3), 2 * d),
                (quad_mono(3, 3), 1),
            ])
        }
        CaseLabel::IVPi => QuadraticForm::new([
            (quad_mono(0, 0), 1),
            (quad_mono(1, 1), p),
            (quad_mono(2, 3), -2),
        ]),
        CaseLabel::IVU => QuadraticForm::new([
            (quad_mono(0, 0), 1),
            (quad_mono(1, 1), -u),
            (quad_mono(2, 3), -2),
        ]),
    }
}

/// Outcome of reducing a twisted class to the catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalization {
    pub label: CaseLabel,
    /// Twist class actually used by the normal form.
    pub r: SquareClass,
    pub substitution: String,
}

/// Reduces `x^2 - r y^2 - D z^2 + r D t^2` to a catalog case.
///
/// `r` only matters modulo norms from `F(sqrt D)`, so it is first replaced by a
/// representative of valuation 0 or 1.
pub fn normalize_type_i(
    d: SquareClass,
    r: SquareClass,
    field: &LocalField,
) -> Result<Normalization> {
    let norm = is_norm(r, d, field)?;
    if d.valuation_parity() == 0 {
        return Ok(if norm {
            Normalization {
                label: CaseLabel::I3,
                r: SquareClass::One,
                substitution: format!(
                    "r = {r} replaced by 1 (same norm class); unimodular isometry"
                ),
            }
        } else {
            Normalization {
                label: CaseLabel::IAniso,
                r: SquareClass::Pi,
                substitution: format!("r = {r} replaced by pi (same norm class); swap y <-> z"),
            }
        });
    }
    let uniformizer = if d == SquareClass::UPi {
        "; uniformizer u*pi"
    } else {
        ""
    };
    let minus_d = field.minus_one().mul(d);
    Ok(if r == SquareClass::One {
        Normalization {
            label: CaseLabel::I1,
            r,
            substitution: format!("none{uniformizer}"),
        }
    } else if r == minus_d {
        Normalization {
            label: CaseLabel::I2,
            r,
            substitution: format!("r = -D{uniformizer}"),
        }
    } else {
        Normalization {
            label: CaseLabel::IAniso,
            r: SquareClass::U,
            substitution: format!("r = {r} replaced by u (same norm class){uniformizer}"),
        }
    })
}

/// Reduces `x^2 - r y^2 - AD z^2 + r D t^2` to one of the six type II forms.
pub fn normalize_type_ii(
    d: SquareClass,
    a: SquareClass,
    r: SquareClass,
    field: &LocalField,
) -> Result<Normalization> {
    if d == SquareClass::One || a == SquareClass::One || a == d {
        return Err(Error::InvalidParameters(format!(
            "D = {d}, A = {a}: D, A and AD must be the three nontrivial square classes"
        )));
    }
    let norm = is_norm(r, d, field)?;
    if d == SquareClass::U {
        return Ok(if norm {
            Normalization {
                label: CaseLabel::II3b,
                r: SquareClass::One,
                substitution: "r -> 1".into(),
            }
        } else {
            Normalization {
                label: CaseLabel::II4,
                r: SquareClass::Pi,
                substitution: "r -> pi".into(),
            }
        });
    }
    let uniformizer = if d == SquareClass::UPi {
        "; uniformizer u*pi"
    } else {
        ""
    };
    let r_norm = if norm {
        SquareClass::One
    } else {
        SquareClass::U
    };
    let label = match (a == SquareClass::U, norm) {
        (true, true) => CaseLabel::II1,
        (true, false) => CaseLabel::II2,
        (false, true) => CaseLabel::II3a,
        (false, false) => CaseLabel::II5,
    };
    Ok(Normalization {
        label,
        r: r_norm,
        substitution: format!("r -> {r_norm}{uniformizer}"),
    })
}

/// The scalar `c` with `b = c * a`, if the two forms are proportional.
pub fn proportional(a: &QuadraticForm, b: &QuadraticForm) -> Option<BigRational> {
    let (m, ca) = a.terms.iter().next()?;
    let cb = b.coeff(m);
    if cb == 0 {
        return None;
    }
    let ratio = BigRational::new(BigInt::from(cb), BigInt::from(*ca));
    let same_support = a.terms.len() == b.terms.len();
    let all = a.terms.iter().all(|(m, c)| {
        BigRational::from_integer(BigInt::from(b.coeff(m))) == &ratio * BigInt::from(*c)
    });
    if same_support && all && !ratio.is_zero() {
        Some(ratio)
    } else {
        None
    }
}
