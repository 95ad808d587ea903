//! Twisted character values at `s = 0`.
//!
//! Types I and III: `prefactor * I(X = q^2) / normalizer(0)`, expected `2 kappa(r)`.
//! Types II and IV: the raw value `I(X = q^2)`, expected 0.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::classreps::{self, build_rep, twisted_form, ClassParams, ClassType, TypeIIIParams};
use crate::error::{Error, Result};
use crate::forms::{
    normal_form, normalize_type_i, normalize_type_ii, CaseLabel, FormCase, QuadraticForm,
};
use crate::localfield::{
    kappa, kappa_rel, split_valuation, BaseExtension, E3Elem, LocalField, RelExtension, SquareClass,
};
use crate::measure::{volume_sequence, Engine, VolumeSequence};
use crate::zeta::{normalizer, zeta, ZetaResult};

/// The three choices of `b r` for type III classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BrChoice {
    One,
    SqrtA,
    DPlusI,
}

impl BrChoice {
    pub fn as_str(self) -> &'static str {
        match self {
            BrChoice::One => "1",
            BrChoice::SqrtA => "sqrtA",
            BrChoice::DPlusI => "d+i",
        }
    }

    /// The element `b r` of `E3`.
    pub fn element(self, field: &LocalField) -> Result<(i64, i64)> {
        match self {
            BrChoice::One => Ok((1, 0)),
            BrChoice::SqrtA => Ok((0, 1)),
            BrChoice::DPlusI => {
                field
                    .d()
                    .map(|d| (d as i64, 1))
                    .ok_or_else(|| Error::UnavailableCase {
                        case: "III-d+i".into(),
                        reason: format!("requires p = 3 mod 4, got p = {}", field.p()),
                    })
            }
        }
    }
}

impl fmt::Display for BrChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BrChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(BrChoice::One),
            "sqrtA" | "sqrt(A)" => Ok(BrChoice::SqrtA),
            "d+i" => Ok(BrChoice::DPlusI),
            other => Err(Error::Parse(format!(
                "unknown br choice `{other}` (expected 1, sqrtA or d+i)"
            ))),
        }
    }
}

/// A twisted class to evaluate, in the parametrization of its type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharacterCase {
    TypeI {
        d: SquareClass,
        r: SquareClass,
    },
    TypeII {
        d: SquareClass,
        a: SquareClass,
        r: SquareClass,
    },
    /// `E3 = F(sqrt A)`, `E = E3(sqrt D)`, twist `b r = br.0 + br.1 sqrt A`.
    TypeIII {
        big_a: i64,
        big_d: i64,
        br: (i64, i64),
    },
    /// The form `r * Q` for `Q` one of `IV-pi`, `IV-u`.
    TypeIV {
        label: CaseLabel,
        r: SquareClass,
    },
}

impl CharacterCase {
    pub fn class_type(&self) -> ClassType {
        match self {
            CharacterCase::TypeI { .. } => ClassType::I,
            CharacterCase::TypeII { .. } => ClassType::II,
            CharacterCase::TypeIII { .. } => ClassType::III,
            CharacterCase::TypeIV { .. } => ClassType::IV,
        }
    }

    /// Type III case from one of the named twists; `d+i` forces `A = -1`.
    pub fn type_iii(
        big_a: SquareClass,
        big_d: SquareClass,
        br: BrChoice,
        field: &LocalField,
    ) -> Result<Self> {
        let elem = br.element(field)?;
        let a = if br == BrChoice::DPlusI {
            -1
        } else {
            field.rep(big_a)
        };
        Ok(CharacterCase::TypeIII {
            big_a: a,
            big_d: field.rep(big_d),
            br: elem,
        })
    }

    /// The catalog case whose normal form is `label`.
    pub fn from_label(label: CaseLabel, field: &LocalField) -> Result<Self> {
        use SquareClass::*;
        let minus_pi = field.minus_one().mul(Pi);
        Ok(match label {
            CaseLabel::IAniso => CharacterCase::TypeI { d: U, r: Pi },
            CaseLabel::I1 => CharacterCase::TypeI { d: Pi, r: One },
            CaseLabel::I2 => CharacterCase::TypeI { d: Pi, r: minus_pi },
            CaseLabel::I3 => CharacterCase::TypeI { d: U, r: One },
            CaseLabel::II1 => CharacterCase::TypeII {
                d: Pi,
                a: U,
                r: One,
            },
            CaseLabel::II2 => CharacterCase::TypeII { d: Pi, a: U, r: U },
            CaseLabel::II3a => CharacterCase::TypeII {
                d: Pi,
                a: UPi,
                r: One,
            },
            CaseLabel::II3b => CharacterCase::TypeII {
                d: U,
                a: Pi,
                r: One,
            },
            CaseLabel::II4 => CharacterCase::TypeII { d: U, a: Pi, r: Pi },
            CaseLabel::II5 => CharacterCase::TypeII {
                d: Pi,
                a: UPi,
                r: U,
            },
            CaseLabel::IIINorm => Self::type_iii(U, Pi, BrChoice::One, field)?,
            CaseLabel::IIISqrtA => Self::type_iii(Pi, U, BrChoice::SqrtA, field)?,
            CaseLabel::IIIDPlusI => Self::type_iii(U, Pi, BrChoice::DPlusI, field)?,
            CaseLabel::IVPi | CaseLabel::IVU => CharacterCase::TypeIV { label, r: One },
        })
    }

    /// Parameters of the representative whose twisted form is evaluated.
    pub fn params(&self, field: &LocalField) -> Result<ClassParams> {
        match *self {
            CharacterCase::TypeI { d, r } => {
                let norm = normalize_type_i(d, r, field)?;
                Ok(ClassParams::I(classreps::type_i_preset(d, norm.r, field)))
            }
            CharacterCase::TypeII { d, a, r } => {
                Ok(ClassParams::II(classreps::type_ii_preset(d, a, r, field)))
            }
            CharacterCase::TypeIII { big_a, big_d, br } => Ok(ClassParams::III(TypeIIIParams {
                a: (1, 0),
                b: (1, 0),
                r: br,
                big_a,
                big_d,
            })),
            CharacterCase::TypeIV { label, .. } => Err(Error::UnavailableCase {
                case: label.to_string(),
                reason: "type IV values are computed from the catalog form, not a representative"
                    .into(),
            }),
        }
    }

    pub fn describe(&self, field: &LocalField) -> String {
        match self {
            CharacterCase::TypeI { d, r } => format!("I D={d} r={r}"),
            CharacterCase::TypeII { d, a, r } => format!("II D={d} A={a} r={r}"),
            CharacterCase::TypeIII { big_a, big_d, br } => {
                let name = match *br {
                    (1, 0) => "1".to_string(),
                    (0, 1) => "sqrtA".to_string(),
                    (d, 1) if Some(d as u64) == field.d() && *big_a == -1 => "d+i".to_string(),
                    (x, y) => format!("{x}+{y}*sqrtA"),
                };
                format!(
                    "III A={} D={} br={name}",
                    int_name(*big_a, field),
                    int_name(*big_d, field)
                )
            }
            CharacterCase::TypeIV { label, r } => format!("IV {label} r={r}"),
        }
    }
}

/// Case selection by strings, as taken by the command line and the bindings.
#[derive(Debug, Clone, Default)]
pub struct CaseSelector<'a> {
    pub class_type: Option<&'a str>,
    pub case: Option<&'a str>,
    pub d: Option<&'a str>,
    pub a: Option<&'a str>,
    pub r: Option<&'a str>,
    pub br: Option<&'a str>,
}

impl CaseSelector<'_> {
    /// A catalog label wins over the parameters, except that `r` twists a type IV form.
    pub fn resolve(&self, field: &LocalField) -> Result<CharacterCase> {
        let opt_class = |s: Option<&str>| s.map(|s| field.parse_class(s)).transpose();
        let class = |s: Option<&str>, name: &str| {
            opt_class(s)?.ok_or_else(|| Error::InvalidParameters(format!("{name} is required")))
        };
        let class_type: Option<ClassType> = self.class_type.map(str::parse).transpose()?;
        if let Some(label) = self.case {
            let label: CaseLabel = label.parse()?;
            let mut case = CharacterCase::from_label(label, field)?;
            if let (CharacterCase::TypeIV { r, .. }, Some(twist)) = (&mut case, opt_class(self.r)?)
            {
                *r = twist;
            }
            if let Some(t) = class_type.filter(|t| *t != case.class_type()) {
                return Err(Error::InvalidParameters(format!(
                    "{label} is not of type {t}"
                )));
            }
            return Ok(case);
        }
        let class_type = class_type
            .ok_or_else(|| Error::InvalidParameters("give a class type or a case label".into()))?;
        let r = opt_class(self.r)?.unwrap_or(SquareClass::One);
        match class_type {
            ClassType::I => Ok(CharacterCase::TypeI {
                d: class(self.d, "D")?,
                r,
            }),
            ClassType::II => Ok(CharacterCase::TypeII {
                d: class(self.d, "D")?,
                a: class(self.a, "A")?,
                r,
            }),
            ClassType::III => {
                let br: BrChoice = self.br.unwrap_or("1").parse()?;
                let a = match br {
                    BrChoice::DPlusI => opt_class(self.a)?.unwrap_or(field.minus_one()),
                    _ => class(self.a, "A")?,
                };
                CharacterCase::type_iii(a, class(self.d, "D")?, br, field)
            }
            ClassType::IV => Err(Error::InvalidParameters(
                "type IV needs the case label IV-pi or IV-u".into(),
            )),
        }
    }
}

fn int_name(x: i64, field: &LocalField) -> String {
    if x == -1 {
        return "-1".into();
    }
    SquareClass::ALL
        .into_iter()
        .find(|c| field.rep(*c) == x)
        .map(|c| c.to_string())
        .unwrap_or_else(|| x.to_string())
}

/// Everything computed for one twisted class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterEvaluation {
    pub case: CharacterCase,
    pub label: Option<CaseLabel>,
    pub form: QuadraticForm,
    pub volumes: VolumeSequence,
    pub zeta: ZetaResult,
    pub prefactor: BigRational,
    pub value: BigRational,
    pub expected: BigRational,
}

fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn q_pow(q: u64, e: u32) -> BigRational {
    int(q as i64).pow(e as i32)
}

/// Divides out the largest power of p dividing every coefficient.
fn strip_content(q: &QuadraticForm, field: &LocalField) -> Result<(QuadraticForm, u32)> {
    let v = q
        .terms()
        .map(|(_, c)| split_valuation(*c, field.p()).0)
        .min()
        .unwrap_or(0);
    let scale = (field.p() as i128).pow(v);
    Ok((
        QuadraticForm::new(q.terms().map(|(m, c)| (*m, c / scale)))?,
        v,
    ))
}

fn sequence_for(
    q: &QuadraticForm,
    n_max: u32,
    field: &LocalField,
    engine: Engine,
) -> Result<(VolumeSequence, ZetaResult)> {
    let vs = volume_sequence(q, n_max + 1, field, engine)?;
    let z = zeta(&vs)?;
    Ok((vs, z))
}

/// Evaluates the character at `s = 0` from volumes up to level `n_max + 2`.
pub fn character_value(
    case: &CharacterCase,
    field: &LocalField,
    n_max: u32,
    engine: Engine,
) -> Result<CharacterEvaluation> {
    let q = field.q();
    match *case {
        CharacterCase::TypeI { d, r } => {
            let norm = normalize_type_i(d, r, field)?;
            let form = normal_form(&FormCase::new(norm.label, *field)?)?;
            let (volumes, z) = sequence_for(&form, n_max, field, engine)?;
            let params = ClassParams::I(classreps::type_i_preset(d, norm.r, field));
            let prefactor = classreps::prefactor(&params, field)?;
            let value = &prefactor * &z.value_at_s0 / normalizer(0, q)?;
            let expected = expected_for(case, field)?;
            Ok(CharacterEvaluation {
                case: *case,
                label: Some(norm.label),
                form,
                volumes,
                zeta: z,
                prefactor,
                value,
                expected,
            })
        }
        CharacterCase::TypeII { d, a, r } => {
            let norm = normalize_type_ii(d, a, r, field)?;
            let form = normal_form(&FormCase::new(norm.label, *field)?)?;
            let (volumes, z) = sequence_for(&form, n_max, field, engine)?;
            let value = z.value_at_s0.clone();
            Ok(CharacterEvaluation {
                case: *case,
                label: Some(norm.label),
                form,
                volumes,
                zeta: z,
                prefactor: BigRational::one(),
                value,
                expected: BigRational::zero(),
            })
        }
        CharacterCase::TypeIII { big_a, big_d, br } => {
            let params = case.params(field)?;
            let rep = build_rep(&params, field)?;
            let (form, v) = strip_content(&twisted_form(&rep)?, field)?;
            let (volumes, z) = sequence_for(&form, n_max, field, engine)?;
            let prefactor = classreps::prefactor(&params, field)? * q_pow(q, 2 * v);
            let value = &prefactor * &z.value_at_s0 / normalizer(0, q)?;
            Ok(CharacterEvaluation {
                case: *case,
                label: type_iii_label(big_a, big_d, br, field),
                form,
                volumes,
                zeta: z,
                prefactor,
                value,
                expected: expected_for(case, field)?,
            })
        }
        CharacterCase::TypeIV { label, r } => {
            if !matches!(label, CaseLabel::IVPi | CaseLabel::IVU) {
                return Err(Error::InvalidParameters(format!(
                    "{label} is not a type IV form"
                )));
            }
            let form = normal_form(&FormCase::new(label, *field)?)?.scale(field.rep(r) as i128)?;
            let (volumes, z) = sequence_for(&form, n_max, field, engine)?;
            let value = z.value_at_s0.clone();
            Ok(CharacterEvaluation {
                case: *case,
                label: Some(label),
                form,
                volumes,
                zeta: z,
                prefactor: BigRational::one(),
                value,
                expected: BigRational::zero(),
            })
        }
    }
}

/// Catalog label of the three named type III shapes.
fn type_iii_label(big_a: i64, big_d: i64, br: (i64, i64), field: &LocalField) -> Option<CaseLabel> {
    let (u, p) = (field.u() as i64, field.p() as i64);
    match (big_a, big_d, br) {
        (a, d, (1, 0)) if a == u && d == p => Some(CaseLabel::IIINorm),
        (a, d, (0, 1)) if a == p && d == u => Some(CaseLabel::IIISqrtA),
        (-1, d, (x, 1)) if d == p && Some(x as u64) == field.d() => Some(CaseLabel::IIIDPlusI),
        _ => None,
    }
}

/// Outcome of one check in `verify_all`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterVerdict {
    pub class_type: ClassType,
    pub case: String,
    pub label: Option<CaseLabel>,
    pub form: String,
    /// `None` when the evaluation itself failed; see `diagnostic`.
    pub computed: Option<BigRational>,
    pub expected: BigRational,
    /// Where `expected` comes from: `2*kappa` or `0`.
    pub expected_rule: &'static str,
    pub matched: bool,
    /// `normalized` for types I and III, `raw` for II and IV.
    pub convention: &'static str,
    pub diagnostic: Option<String>,
}

fn convention(t: ClassType) -> (&'static str, &'static str) {
    match t {
        ClassType::I | ClassType::III => ("normalized", "2*kappa"),
        ClassType::II | ClassType::IV => ("raw", "0"),
    }
}

impl CharacterVerdict {
    pub fn from_eval(eval: &CharacterEvaluation, field: &LocalField) -> Self {
        let class_type = eval.case.class_type();
        let matched = eval.value == eval.expected;
        let (convention, expected_rule) = convention(class_type);
        CharacterVerdict {
            class_type,
            case: eval.case.describe(field),
            label: eval.label,
            form: eval.form.render(field),
            computed: Some(eval.value.clone()),
            expected: eval.expected.clone(),
            expected_rule,
            matched,
            convention,
            diagnostic: (!matched).then(|| {
                format!(
                    "zeta = {}, volumes = [{}]",
                    eval.zeta.rf,
                    join(&eval.volumes.values)
                )
            }),
        }
    }

    /// An unmatched verdict for a case whose evaluation failed.
    pub fn failed(case: &CharacterCase, field: &LocalField, err: &Error) -> Self {
        let class_type = case.class_type();
        let (convention, expected_rule) = convention(class_type);
        CharacterVerdict {
            class_type,
            case: case.describe(field),
            label: None,
            form: String::new(),
            computed: None,
            expected: expected_for(case, field).unwrap_or_else(|_| BigRational::zero()),
            expected_rule,
            matched: false,
            convention,
            diagnostic: Some(err.to_string()),
        }
    }
}

/// The value the evaluation should produce, without computing any volumes.
pub fn expected_for(case: &CharacterCase, field: &LocalField) -> Result<BigRational> {
    match *case {
        CharacterCase::TypeI { d, r } => Ok(int(2 * kappa(r, d, field)? as i64)),
        CharacterCase::TypeIII { big_a, big_d, br } => {
            let base = BaseExtension::new(big_a, field)?;
            let ext = RelExtension::new(base, E3Elem::from_int(big_d as i128), field)?;
            Ok(int(2
                * kappa_rel(&E3Elem::new(br.0 as i128, br.1 as i128), &ext, field)?
                    as i64))
        }
        CharacterCase::TypeII { .. } | CharacterCase::TypeIV { .. } => Ok(BigRational::zero()),
    }
}

fn join(values: &[BigRational]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// The catalog of checks run by `verify_all`.
pub fn catalog_cases(field: &LocalField) -> Result<Vec<CharacterCase>> {
    use SquareClass::*;
    let minus_pi = field.minus_one().mul(Pi);
    let mut cases = vec![
        CharacterCase::TypeI { d: U, r: One },
        CharacterCase::TypeI { d: U, r: Pi },
        CharacterCase::TypeI { d: Pi, r: One },
        CharacterCase::TypeI { d: Pi, r: minus_pi },
        CharacterCase::TypeI {
            d: Pi,
            r: if minus_pi == UPi { U } else { UPi },
        },
        CharacterCase::TypeII {
            d: U,
            a: Pi,
            r: One,
        },
        CharacterCase::TypeII { d: U, a: Pi, r: Pi },
        CharacterCase::TypeII {
            d: Pi,
            a: U,
            r: One,
        },
        CharacterCase::TypeII {
            d: Pi,
            a: UPi,
            r: One,
        },
        CharacterCase::TypeII { d: Pi, a: U, r: U },
        CharacterCase::TypeII {
            d: Pi,
            a: UPi,
            r: U,
        },
        CharacterCase::type_iii(U, Pi, BrChoice::One, field)?,
        CharacterCase::type_iii(Pi, U, BrChoice::One, field)?,
        CharacterCase::type_iii(Pi, U, BrChoice::SqrtA, field)?,
    ];
    if field.d().is_some() {
        cases.push(CharacterCase::type_iii(U, Pi, BrChoice::DPlusI, field)?);
    } else {
        cases.push(CharacterCase::type_iii(U, Pi, BrChoice::SqrtA, field)?);
    }
    cases.extend([
        CharacterCase::TypeIV {
            label: CaseLabel::IVPi,
            r: One,
        },
        CharacterCase::TypeIV {
            label: CaseLabel::IVPi,
            r: U,
        },
        CharacterCase::TypeIV {
            label: CaseLabel::IVU,
            r: One,
        },
        CharacterCase::TypeIV {
            label: CaseLabel::IVU,
            r: Pi,
        },
    ]);
    Ok(cases)
}

/// Evaluates every catalog case and compares with `2 kappa` (I, III) or 0 (II, IV).
/// Evaluation failures become unmatched verdicts carrying the error text.
pub fn verify_all(field: &LocalField, n_max: u32, engine: Engine) -> Result<Vec<CharacterVerdict>> {
    Ok(catalog_cases(field)?
        .par_iter()
        .map(|case| match character_value(case, field, n_max, engine) {
            Ok(eval) => CharacterVerdict::from_eval(&eval, field),
            Err(e) => CharacterVerdict::failed(case, field, &e),
        })
        .collect())
}

/// Values of one stable class across its twists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstabilityRow {
    pub class_type: ClassType,
    pub stable_class: String,
    pub twists: Vec<(String, BigRational)>,
    pub passed: bool,
}

/// Checks that twists by norms and non-norms give opposite values on types I
/// and III, and that types II and IV vanish for every twist.
pub fn instability_report(
    field: &LocalField,
    n_max: u32,
    engine: Engine,
) -> Result<Vec<InstabilityRow>> {
    use SquareClass::*;
    let mut rows = Vec::new();
    let value = |c: &CharacterCase| character_value(c, field, n_max, engine).map(|e| e.value);
    for d in [U, Pi] {
        let mut twists = Vec::new();
        let mut ok = true;
        let base = value(&CharacterCase::TypeI { d, r: One })?;
        for r in SquareClass::ALL {
            let v = value(&CharacterCase::TypeI { d, r })?;
            let sign = kappa(r, d, field)?;
            ok &= v == &base * int(sign as i64) && !v.is_zero();
            twists.push((r.to_string(), v));
        }
        rows.push(InstabilityRow {
            class_type: ClassType::I,
            stable_class: format!("D={d}"),
            twists,
            passed: ok,
        });
    }
    let non_norm_br = if field.d().is_some() {
        BrChoice::DPlusI
    } else {
        BrChoice::SqrtA
    };
    for (a, d, other) in [(U, Pi, non_norm_br), (Pi, U, BrChoice::SqrtA)] {
        let one = CharacterCase::type_iii(a, d, BrChoice::One, field)?;
        let twisted = CharacterCase::type_iii(a, d, other, field)?;
        let v1 = value(&one)?;
        let v2 = value(&twisted)?;
        let passed = !v1.is_zero() && v2 == -v1.clone();
        rows.push(InstabilityRow {
            class_type: ClassType::III,
            stable_class: format!("A={a} D={d}"),
            twists: vec![("1".into(), v1), (other.to_string(), v2)],
            passed,
        });
    }
    for (d, a) in [(U, Pi), (U, UPi), (Pi, U), (Pi, UPi), (UPi, U), (UPi, Pi)] {
        let mut twists = Vec::new();
        for r in SquareClass::ALL {
            twists.push((r.to_string(), value(&CharacterCase::TypeII { d, a, r })?));
        }
        let passed = twists.iter().all(|(_, v)| v.is_zero());
        rows.push(InstabilityRow {
            class_type: ClassType::II,
            stable_class: format!("D={d} A={a}"),
            twists,
            passed,
        });
    }
    for label in [CaseLabel::IVPi, CaseLabel::IVU] {
        let mut twists = Vec::new();
        for r in SquareClass::ALL {
            twists.push((r.to_string(), value(&CharacterCase::TypeIV { label, r })?));
        }
        let passed = twists.iter().all(|(_, v)| v.is_zero());
        rows.push(InstabilityRow {
            class_type: ClassType::IV,
            stable_class: label.to_string(),
            twists,
            passed,
        });
    }
    Ok(rows)
}
