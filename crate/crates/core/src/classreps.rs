//! Representatives of the four types of twisted conjugacy classes, the
//! quadratic form `v^T g J v` they produce, and the measure factors that
//! multiply its integral.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::forms::{quad_mono, QuadraticForm};
use crate::localfield::{
    split_valuation, square_class_of, BaseExtension, E3Elem, LocalField, SquareClass,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassType {
    I,
    II,
    III,
    IV,
}

impl fmt::Display for ClassType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassType::I => "I",
            ClassType::II => "II",
            ClassType::III => "III",
            ClassType::IV => "IV",
        })
    }
}

impl std::str::FromStr for ClassType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "I" | "1" => Ok(ClassType::I),
            "II" | "2" => Ok(ClassType::II),
            "III" | "3" => Ok(ClassType::III),
            "IV" | "4" => Ok(ClassType::IV),
            other => Err(Error::Parse(format!("unknown class type `{other}`"))),
        }
    }
}

/// `g = diag(a, b) diag(r, s, s, r)` with `a = a1 + a2 sqrt D`, `b = b1 + b2 sqrt D`.
///
/// `rtw` and `stw` are integer representatives of the twist classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypeIParams {
    pub a: (i64, i64),
    pub b: (i64, i64),
    pub d: SquareClass,
    pub rtw: i64,
    pub stw: i64,
}

/// As type I with `a` in `F(sqrt D)` and `b = b1 + b2 sqrt(AD)` in `F(sqrt AD)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypeIIParams {
    pub a: (i64, i64),
    pub b: (i64, i64),
    pub d: SquareClass,
    pub big_a: SquareClass,
    pub rtw: i64,
    pub stw: i64,
}

/// `a`, `b`, `r` in `E3 = F(sqrt A)`, with `E = E3(sqrt D)` and `D` in `F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypeIIIParams {
    pub a: (i64, i64),
    pub b: (i64, i64),
    pub r: (i64, i64),
    pub big_a: i64,
    pub big_d: i64,
}

/// As type III with `D = d1 + d2 sqrt A` an element of `E3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypeIVParams {
    pub a: (i64, i64),
    pub b: (i64, i64),
    pub r: (i64, i64),
    pub big_a: i64,
    pub d: (i64, i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassParams {
    I(TypeIParams),
    II(TypeIIParams),
    III(TypeIIIParams),
    IV(TypeIVParams),
}

impl ClassParams {
    pub fn class_type(&self) -> ClassType {
        match self {
            ClassParams::I(_) => ClassType::I,
            ClassParams::II(_) => ClassType::II,
            ClassParams::III(_) => ClassType::III,
            ClassParams::IV(_) => ClassType::IV,
        }
    }
}

/// A 4x4 representative matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rep {
    pub class_type: ClassType,
    pub entries: [[i128; 4]; 4],
}

/// The antidiagonal matrix of the twisting involution.
pub const J: [[i128; 4]; 4] = [[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]];

fn e3(x: (i64, i64)) -> E3Elem {
    E3Elem::new(x.0 as i128, x.1 as i128)
}

/// Matrix of multiplication by `x` on `E3` in the basis `(1, sqrt A)`.
fn regular(x: &E3Elem, big_a: i128) -> [[i128; 2]; 2] {
    [[x.a, x.b * big_a], [x.b, x.a]]
}

fn block(
    tl: [[i128; 2]; 2],
    tr: [[i128; 2]; 2],
    bl: [[i128; 2]; 2],
    br: [[i128; 2]; 2],
) -> [[i128; 4]; 4] {
    let mut m = [[0i128; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = tl[i][j];
            m[i][j + 2] = tr[i][j];
            m[i + 2][j] = bl[i][j];
            m[i + 2][j + 2] = br[i][j];
        }
    }
    m
}

pub(crate) fn det4(m: &[[i128; 4]; 4]) -> BigInt {
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect();
    let mut det = BigRational::one();
    for k in 0..4 {
        let Some(piv) = (k..4).find(|&i| a[i][k] != BigRational::from_integer(BigInt::from(0)))
        else {
            return BigInt::from(0);
        };
        if piv != k {
            a.swap(piv, k);
            det = -det;
        }
        det *= a[k][k].clone();
        for i in (k + 1)..4 {
            let f = &a[i][k] / &a[k][k];
            for j in k..4 {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
    }
    det.to_integer()
}

fn nonzero_e3(x: &E3Elem, what: &str) -> Result<()> {
    if x.is_zero() {
        Err(Error::InvalidParameters(format!("{what} must be nonzero")))
    } else {
        Ok(())
    }
}

fn require_nonsquare_class(c: SquareClass, what: &str) -> Result<()> {
    if c == SquareClass::One {
        Err(Error::NotAnExtension(format!("{what} is a square")))
    } else {
        Ok(())
    }
}

/// Builds the representative matrix of a twisted conjugacy class.
pub fn build_rep(params: &ClassParams, field: &LocalField) -> Result<Rep> {
    let entries = match params {
        ClassParams::I(t) => {
            require_nonsquare_class(t.d, "D")?;
            if t.a.1 == 0 || t.b.1 == 0 {
                return Err(Error::Irregular("a2 and b2 must be nonzero".into()));
            }
            if t.rtw == 0 || t.stw == 0 {
                return Err(Error::InvalidParameters("twists must be nonzero".into()));
            }
            let d = field.rep(t.d) as i128;
            type_i_matrix(t.a, t.b, d, d, t.rtw as i128, t.stw as i128)
        }
        ClassParams::II(t) => {
            require_nonsquare_class(t.d, "D")?;
            require_nonsquare_class(t.big_a, "A")?;
            if t.d == t.big_a {
                return Err(Error::InvalidParameters(
                    "A and D must generate distinct extensions".into(),
                ));
            }
            if t.a.1 == 0 || t.b.1 == 0 {
                return Err(Error::Irregular("a2 and b2 must be nonzero".into()));
            }
            if t.rtw == 0 || t.stw == 0 {
                return Err(Error::InvalidParameters("twists must be nonzero".into()));
            }
            let d = field.rep(t.d) as i128;
            let ad = field.rep(t.big_a.mul(t.d)) as i128;
            type_i_matrix(t.a, t.b, d, ad, t.rtw as i128, t.stw as i128)
        }
        ClassParams::III(t) => {
            let base = BaseExtension::new(t.big_a, field)?;
            let d_class = square_class_of(t.big_d as i128, field)?;
            require_nonsquare_class(d_class, "D")?;
            if square_class_of(t.big_a as i128, field)? == d_class {
                return Err(Error::InvalidParameters(
                    "A and D must generate distinct extensions".into(),
                ));
            }
            let (a, b, r) = (e3(t.a), e3(t.b), e3(t.r));
            nonzero_e3(&r, "r")?;
            if b.is_zero() {
                return Err(Error::Irregular("b must be nonzero".into()));
            }
            let big_a = t.big_a as i128;
            let ar = a.mul(&r, &base);
            let br = b.mul(&r, &base);
            let brd = br.mul(&E3Elem::from_int(t.big_d as i128), &base);
            block(
                regular(&ar, big_a),
                regular(&brd, big_a),
                regular(&br, big_a),
                regular(&ar, big_a),
            )
        }
        ClassParams::IV(t) => {
            let base = BaseExtension::new(t.big_a, field)?;
            let d = e3(t.d);
            nonzero_e3(&d, "D")?;
            if crate::localfield::is_square_e3(&d, &base, field)? {
                return Err(Error::NotAnExtension("D is a square in E3".into()));
            }
            let (a, b, r) = (e3(t.a), e3(t.b), e3(t.r));
            nonzero_e3(&r, "r")?;
            if b.is_zero() {
                return Err(Error::Irregular("b must be nonzero".into()));
            }
            let big_a = t.big_a as i128;
            let ar = a.mul(&r, &base);
            let br = b.mul(&r, &base);
            let bdr = br.mul(&d, &base);
            block(
                regular(&ar, big_a),
                regular(&bdr, big_a),
                regular(&br, big_a),
                regular(&ar, big_a),
            )
        }
    };
    if det4(&entries) == BigInt::from(0) {
        return Err(Error::DegenerateInput("representative is singular".into()));
    }
    Ok(Rep {
        class_type: params.class_type(),
        entries,
    })
}

/// Rows `(a1 r, 0, 0, a2 D r), (0, b1 s, b2 E s, 0), (0, b2 s, b1 s, 0), (a2 r, 0, 0, a1 r)`.
fn type_i_matrix(
    a: (i64, i64),
    b: (i64, i64),
    d: i128,
    e: i128,
    r: i128,
    s: i128,
) -> [[i128; 4]; 4] {
    let (a1, a2, b1, b2) = (a.0 as i128, a.1 as i128, b.0 as i128, b.1 as i128);
    [
        [a1 * r, 0, 0, a2 * d * r],
        [0, b1 * s, b2 * e * s, 0],
        [0, b2 * s, b1 * s, 0],
        [a2 * r, 0, 0, a1 * r],
    ]
}

/// Position of each variable of `(x, y, z, t)` in the vector multiplying `gJ`.
///
/// Types I and II pair the vector as `(t, z, x, y)`; types III and IV as `(x, y, z, t)`.
pub fn vector_layout(class_type: ClassType) -> [usize; 4] {
    match class_type {
        ClassType::I | ClassType::II => [3, 2, 0, 1],
        ClassType::III | ClassType::IV => [0, 1, 2, 3],
    }
}

/// The quadratic form `v^T g J v` in the variables `(x, y, z, t)`.
pub fn twisted_form(rep: &Rep) -> Result<QuadraticForm> {
    let layout = vector_layout(rep.class_type);
    let mut gj = [[0i128; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            gj[i][j] = (0..4).map(|k| rep.entries[i][k] * J[k][j]).sum();
        }
    }
    let mut terms = Vec::new();
    for i in 0..4 {
        for j in 0..4 {
            terms.push((quad_mono(layout[i], layout[j]), gj[i][j]));
        }
    }
    QuadraticForm::new(terms)
}

/// Characteristic data `X^2 - trace X + det` of one component of the norm map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Component {
    pub trace: i128,
    pub det: i128,
}

/// Image of the norm map as two `2x2` conjugacy data over F.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormImage {
    pub components: [Component; 2],
}

/// Element `c0 + c1 sqrt A + c2 sqrt D + c3 sqrt(AD)` of `E = F(sqrt A, sqrt D)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Biquad {
    c: [i128; 4],
}

impl Biquad {
    fn mul(&self, o: &Biquad, a: i128, d: i128) -> Biquad {
        let [x0, x1, x2, x3] = self.c;
        let [y0, y1, y2, y3] = o.c;
        Biquad {
            c: [
                x0 * y0 + a * x1 * y1 + d * x2 * y2 + a * d * x3 * y3,
                x0 * y1 + x1 * y0 + d * (x2 * y3 + x3 * y2),
                x0 * y2 + x2 * y0 + a * (x1 * y3 + x3 * y1),
                x0 * y3 + x3 * y0 + x1 * y2 + x2 * y1,
            ],
        }
    }

    /// `sqrt D -> -sqrt D`.
    fn sigma(&self) -> Biquad {
        let [c0, c1, c2, c3] = self.c;
        Biquad {
            c: [c0, c1, -c2, -c3],
        }
    }

    /// `sqrt A -> -sqrt A`.
    fn tau(&self) -> Biquad {
        let [c0, c1, c2, c3] = self.c;
        Biquad {
            c: [c0, -c1, c2, -c3],
        }
    }

    fn add(&self, o: &Biquad) -> Biquad {
        Biquad {
            c: [
                self.c[0] + o.c[0],
                self.c[1] + o.c[1],
                self.c[2] + o.c[2],
                self.c[3] + o.c[3],
            ],
        }
    }

    fn rational(&self) -> Result<i128> {
        if self.c[1..].iter().all(|&c| c == 0) {
            Ok(self.c[0])
        } else {
            Err(Error::InvalidParameters(
                "norm-map datum is not defined over F".into(),
            ))
        }
    }
}

fn component(x: &Biquad, a: i128, d: i128) -> Result<Component> {
    let sx = x.sigma();
    Ok(Component {
        trace: x.add(&sx).rational()?,
        det: x.mul(&sx, a, d).rational()?,
    })
}

/// The norm map on type I and III classes.
///
/// Type I: `(diag(ab, sigma(ab)), diag(a sigma(b), b sigma(a)))`.
/// Type III with `alpha = a + b sqrt D`: `(diag(alpha tau(alpha), ...), diag(alpha sigma tau(alpha), ...))`.
pub fn norm_map(params: &ClassParams, field: &LocalField) -> Result<NormImage> {
    match params {
        ClassParams::I(t) => {
            let d = field.rep(t.d) as i128;
            let a = Biquad {
                c: [t.a.0 as i128, 0, t.a.1 as i128, 0],
            };
            let b = Biquad {
                c: [t.b.0 as i128, 0, t.b.1 as i128, 0],
            };
            let ab = a.mul(&b, 0, d);
            let a_sb = a.mul(&b.sigma(), 0, d);
            Ok(NormImage {
                components: [component(&ab, 0, d)?, component(&a_sb, 0, d)?],
            })
        }
        ClassParams::III(t) => {
            let (a_, d) = (t.big_a as i128, t.big_d as i128);
            let alpha = Biquad {
                c: [t.a.0 as i128, t.a.1 as i128, t.b.0 as i128, t.b.1 as i128],
            };
            let x1 = alpha.mul(&alpha.tau(), a_, d);
            let x2 = alpha.mul(&alpha.tau().sigma(), a_, d);
            Ok(NormImage {
                components: [component(&x1, a_, d)?, component(&x2, a_, d)?],
            })
        }
        other => Err(Error::NoNormMap(other.class_type().to_string())),
    }
}

fn val(x: i128, field: &LocalField, what: &str) -> Result<i64> {
    if x == 0 {
        return Err(Error::Irregular(format!("{what} vanishes")));
    }
    Ok(split_valuation(x, field.p()).0 as i64)
}

/// Exponent `e` with `Delta(g theta) / Delta_C(N g) = q^(e/2)`.
///
/// Half-integral powers of q occur, e.g. type I with `D = pi`, `a = sqrt D`, `b = 1 + sqrt D`.
///
/// Type I: `|(2 a2 sqrt D)^2 / N(a) * (2 b2 sqrt D)^2 / N(b)|^(1/2)`.
/// Type III: `|(4 b tau(b) D)^2 / ((a^2 - b^2 D)(tau(a)^2 - tau(b)^2 D))|^(1/2)`.
pub fn jacobian_ratio(params: &ClassParams, field: &LocalField) -> Result<i64> {
    let twice = match params {
        ClassParams::I(t) => {
            let d = field.rep(t.d) as i128;
            let na = t.a.0 as i128 * t.a.0 as i128 - d * t.a.1 as i128 * t.a.1 as i128;
            let nb = t.b.0 as i128 * t.b.0 as i128 - d * t.b.1 as i128 * t.b.1 as i128;
            let vd = val(d, field, "D")?;
            2 * val(t.a.1 as i128, field, "a2")? + vd - val(na, field, "N(a)")?
                + 2 * val(t.b.1 as i128, field, "b2")?
                + vd
                - val(nb, field, "N(b)")?
        }
        ClassParams::III(t) => {
            let base = BaseExtension::new(t.big_a, field)?;
            let (a, b) = (e3(t.a), e3(t.b));
            let d = E3Elem::from_int(t.big_d as i128);
            let b2d = b.mul(&b, &base).mul(&d, &base);
            let a2 = a.mul(&a, &base);
            let diff = E3Elem::new(a2.a - b2d.a, a2.b - b2d.b);
            2 * (val(b.norm(&base), field, "b")? + val(t.big_d as i128, field, "D")?)
                - val(diff.norm(&base), field, "a^2 - b^2 D")?
        }
        other => return Err(Error::NoNormMap(other.class_type().to_string())),
    };
    Ok(-twice)
}

fn q_pow_neg(q: u64, v: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(q));
    if v >= 0 {
        BigRational::one() / base.pow(v as i32)
    } else {
        base.pow((-v) as i32)
    }
}

/// The measure factor multiplying the integral of the normalized form at `s = 0`.
///
/// Type I: `|4 D r'|` with `r' = -a2 r / (b2 s)` the twist of the form after
/// dividing by `b2 s`. Type III: `|b r tau(b r) D|`. Types II and IV: 1.
pub fn prefactor(params: &ClassParams, field: &LocalField) -> Result<BigRational> {
    let q = field.q();
    match params {
        ClassParams::I(t) => {
            let vd = split_valuation(field.rep(t.d) as i128, field.p()).0 as i64;
            let vr = val(t.a.1 as i128, field, "a2")? + val(t.rtw as i128, field, "r")?
                - val(t.b.1 as i128, field, "b2")?
                - val(t.stw as i128, field, "s")?;
            Ok(q_pow_neg(q, vd + vr))
        }
        ClassParams::III(t) => {
            let base = BaseExtension::new(t.big_a, field)?;
            let br = e3(t.b).mul(&e3(t.r), &base);
            let v = val(br.norm(&base), field, "br")? + val(t.big_d as i128, field, "D")?;
            Ok(q_pow_neg(q, v))
        }
        ClassParams::II(_) | ClassParams::IV(_) => Ok(BigRational::one()),
    }
}

/// `|det g|^(1/2)` times the Jacobian ratio, i.e. the full factor at `s = 0`.
pub fn full_factor_s0(params: &ClassParams, field: &LocalField) -> Result<BigRational> {
    let rep = build_rep(params, field)?;
    let det = det4(&rep.entries);
    let mut v = 0i64;
    let p = BigInt::from(field.p());
    let mut x = det;
    while (&x % &p) == BigInt::from(0) {
        x /= &p;
        v += 1;
    }
    let total = v - jacobian_ratio(params, field)?;
    if total % 2 != 0 {
        return Err(Error::Irregular(
            "full factor is not an integral power of q".into(),
        ));
    }
    Ok(q_pow_neg(field.q(), total / 2))
}

/// Presets reproducing a normal form exactly: `a = b = sqrt D` and `r = -r0`, `s = 1`.
pub fn type_i_preset(d: SquareClass, r: SquareClass, field: &LocalField) -> TypeIParams {
    TypeIParams {
        a: (0, 1),
        b: (0, 1),
        d,
        rtw: -field.rep(r),
        stw: 1,
    }
}

pub fn type_ii_preset(
    d: SquareClass,
    big_a: SquareClass,
    r: SquareClass,
    field: &LocalField,
) -> TypeIIParams {
    TypeIIParams {
        a: (0, 1),
        b: (0, 1),
        d,
        big_a,
        rtw: -field.rep(r),
        stw: 1,
    }
}
