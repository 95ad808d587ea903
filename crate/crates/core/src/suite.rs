//! The full battery of exact checks behind `twistchar verify`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::character::{instability_report, verify_all};
use crate::closed_forms::closed_form_volume;
use crate::error::Result;
use crate::forms::{normal_form, CaseLabel, FormCase, QuadraticForm};
use crate::localfield::LocalField;
use crate::measure::{
    count_fq, cross_check, default_budget, unit_square_shell_volume, volume_sequence, Engine,
    FqMethod,
};
use crate::zeta::{normalizer, normalizer_rf, zeta};

/// A single named pass/fail check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub group: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(
        group: &'static str,
        name: impl Into<String>,
        passed: bool,
        detail: impl Into<String>,
    ) -> Self {
        Check {
            group,
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Options for `run_suite`.
#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub n_max: u32,
    pub engine: Engine,
    /// Compare naive and Hensel counts on every level the naive budget allows.
    pub cross_check: bool,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Runs every check for one prime. The field must allow level `n_max + 2`.
pub fn run_suite(field: &LocalField, opts: SuiteOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let q = field.q();
    let labels = CaseLabel::available_for(field);

    for &label in &labels {
        let form = normal_form(&FormCase::new(label, *field)?)?;
        let vs = volume_sequence(&form, opts.n_max, field, opts.engine)?;
        let bad: Vec<String> = vs
            .values
            .iter()
            .enumerate()
            .filter(|(n, v)| **v != closed_form_volume(label, *n as u32, q))
            .map(|(n, v)| format!("n={n}: {v}"))
            .collect();
        checks.push(Check::new(
            "volumes",
            format!("{label} n<={}", opts.n_max),
            bad.is_empty(),
            bad.join("; "),
        ));
        if opts.cross_check {
            let cmp = cross_check(&form, opts.n_max + 1, field, default_budget())?;
            let bad: Vec<String> = cmp
                .iter()
                .filter(|c| !c.agrees())
                .map(|c| format!("k={}: naive {} hensel {}", c.k, c.naive, c.hensel))
                .collect();
            let levels = cmp.last().map_or(0, |c| c.k);
            checks.push(Check::new(
                "engines",
                format!("{label} k<={levels}"),
                bad.is_empty(),
                bad.join("; "),
            ));
        }
    }

    for v in verify_all(field, opts.n_max, opts.engine)? {
        let detail = match &v.computed {
            Some(c) => format!("computed {c}, expected {}", v.expected),
            None => v.diagnostic.clone().unwrap_or_default(),
        };
        checks.push(Check::new("character", v.case, v.matched, detail));
    }

    for row in instability_report(field, opts.n_max, opts.engine)? {
        let detail = row
            .twists
            .iter()
            .map(|(r, v)| format!("{r}: {v}"))
            .collect::<Vec<_>>()
            .join(", ");
        checks.push(Check::new(
            "instability",
            format!("{} {}", row.class_type, row.stable_class),
            row.passed,
            detail,
        ));
    }

    for c in [1i64, 4] {
        for n in 1..=4u32.min(field.precision_cap() - 1) {
            let got = unit_square_shell_volume(c, n, field)?;
            let want = rat(2, 1) / BigRational::from_integer(BigInt::from(q).pow(n))
                * (BigRational::one() - rat(1, q as i64));
            checks.push(Check::new(
                "unit-square",
                format!("c={c} n={n}"),
                got == want,
                format!("{got}"),
            ));
        }
    }

    let u = field.u() as i64;
    let mut choices = vec![1i64, u, 2];
    choices.dedup();
    for &a in &choices {
        for &b in &choices {
            for &c in &choices {
                let f = [a, b, c];
                let bad: Vec<String> = (0..q as i64)
                    .filter_map(|rhs| {
                        let formula = count_fq(&f, rhs, q, FqMethod::Formula);
                        let brute = count_fq(&f, rhs, q, FqMethod::BruteForce);
                        (formula != brute).then(|| format!("b={rhs}: {formula:?} vs {brute:?}"))
                    })
                    .collect();
                checks.push(Check::new(
                    "finite-field",
                    format!("{a}x^2+{b}y^2+{c}z^2"),
                    bad.is_empty(),
                    bad.join("; "),
                ));
            }
        }
    }

    let x = QuadraticForm::parse("x", field)?;
    let z = zeta(&volume_sequence(&x, opts.n_max, field, opts.engine)?)?;
    let passed = z.rf == normalizer_rf(q) && z.value_at_s0 == normalizer(0, q)?;
    checks.push(Check::new(
        "normalizer",
        "degree-1 form x",
        passed,
        format!("{} -> {}", z.rf, z.value_at_s0),
    ));

    Ok(checks)
}
