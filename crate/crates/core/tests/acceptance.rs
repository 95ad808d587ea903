//! Acceptance criteria, one pass/fail line each. Run with
//! `cargo test -p twistchar --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::SeedableRng;

use twistchar::character::{character_value, instability_report, BrChoice, CharacterCase};
use twistchar::closed_forms::closed_form_volume;
use twistchar::forms::{normal_form, CaseLabel, FormCase, QuadraticForm};
use twistchar::localfield::{eta, kappa, LocalField, SquareClass};
use twistchar::measure::{
    count_fq, count_hensel, count_naive, default_budget, unit_square_shell_volume, vol_leq, vol_v0,
    volume_sequence, Engine, FqMethod,
};
use twistchar::zeta::{evaluate_at_s0, normalizer, normalizer_rf, zeta, RationalFunction};

use common::*;

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn catalog(field: &LocalField) -> Vec<(CaseLabel, QuadraticForm)> {
    CaseLabel::available_for(field)
        .into_iter()
        .map(|l| (l, normal_form(&FormCase::new(l, *field).unwrap()).unwrap()))
        .collect()
}

fn catalog_volumes() -> Outcome {
    for field in fields() {
        for (label, form) in catalog(&field) {
            let vs =
                volume_sequence(&form, 6, &field, Engine::Hensel).map_err(|e| e.to_string())?;
            for (n, v) in vs.values.iter().enumerate() {
                let want = closed_form_volume(label, n as u32, field.q());
                ensure(*v == want, || {
                    format!("{label} p={} n={n}: {v} != {want}", field.p())
                })?;
            }
        }
    }
    Ok(())
}

fn engine_equivalence() -> Outcome {
    for (p, k_max) in [(3u64, 4u32), (5, 3)] {
        let field = LocalField::new(p).unwrap();
        let forms = catalog(&field);
        if p == 3 {
            ensure(forms.len() == 15, || {
                format!("expected 15 catalog forms at p = 3, got {}", forms.len())
            })?;
        }
        for (label, form) in forms {
            for k in 1..=k_max {
                let naive =
                    count_naive(&form, k, &field, default_budget()).map_err(|e| e.to_string())?;
                let hensel = count_hensel(&form, k, &field).map_err(|e| e.to_string())?;
                ensure(naive == hensel, || {
                    format!("{label} p={p} k={k}: naive {naive} hensel {hensel}")
                })?;
            }
        }
    }
    Ok(())
}

fn check_value(case: CharacterCase, field: &LocalField, want: i64) -> Outcome {
    let eval =
        character_value(&case, field, 6, Engine::Hensel).map_err(|e| format!("{case:?}: {e}"))?;
    ensure(
        eval.value == int(want) && eval.expected == int(want),
        || {
            format!(
                "{} at p={}: computed {}, expected {}, wanted {want}",
                case.describe(field),
                field.p(),
                eval.value,
                eval.expected
            )
        },
    )
}

fn type_i_values() -> Outcome {
    use SquareClass::*;
    for field in fields() {
        let minus_pi = field.parse_class("-pi").unwrap();
        check_value(CharacterCase::TypeI { d: U, r: One }, &field, 2)?;
        check_value(CharacterCase::TypeI { d: U, r: Pi }, &field, -2)?;
        check_value(CharacterCase::TypeI { d: Pi, r: One }, &field, 2)?;
        check_value(CharacterCase::TypeI { d: Pi, r: minus_pi }, &field, 2)?;
        check_value(CharacterCase::TypeI { d: Pi, r: U }, &field, -2)?;
        for r in SquareClass::ALL {
            for d in [U, Pi, UPi] {
                let k = kappa(r, d, &field).unwrap() as i64;
                check_value(CharacterCase::TypeI { d, r }, &field, 2 * k)?;
            }
        }
    }
    Ok(())
}

fn type_ii_values() -> Outcome {
    let labels = [
        CaseLabel::II1,
        CaseLabel::II2,
        CaseLabel::II3a,
        CaseLabel::II3b,
        CaseLabel::II4,
        CaseLabel::II5,
    ];
    for field in fields() {
        for label in labels {
            let case = CharacterCase::from_label(label, &field).unwrap();
            let eval = character_value(&case, &field, 6, Engine::Hensel)
                .map_err(|e| format!("{label}: {e}"))?;
            ensure(eval.label == Some(label), || {
                format!("{label} normalized to {:?}", eval.label)
            })?;
            let direct = evaluate_at_s0(&eval.zeta.rf, field.q()).map_err(|e| e.to_string())?;
            ensure(eval.value.is_zero() && direct.is_zero(), || {
                format!("{label} p={}: {}", field.p(), eval.value)
            })?;
        }
    }
    Ok(())
}

fn type_iii_values() -> Outcome {
    use SquareClass::*;
    for field in fields() {
        let case = |a, d, br| CharacterCase::type_iii(a, d, br, &field).unwrap();
        check_value(case(U, Pi, BrChoice::One), &field, 2)?;
        check_value(case(Pi, U, BrChoice::One), &field, 2)?;
        check_value(case(Pi, U, BrChoice::SqrtA), &field, -2)?;
        if field.d().is_some() {
            check_value(case(U, Pi, BrChoice::DPlusI), &field, -2)?;
        } else {
            ensure(BrChoice::DPlusI.element(&field).is_err(), || {
                "d+i must be unavailable for p = 1 mod 4".into()
            })?;
        }
    }
    Ok(())
}

fn type_iv_values() -> Outcome {
    for field in fields() {
        for label in [CaseLabel::IVPi, CaseLabel::IVU] {
            let eval = character_value(
                &CharacterCase::TypeIV {
                    label,
                    r: SquareClass::One,
                },
                &field,
                6,
                Engine::Hensel,
            )
            .map_err(|e| e.to_string())?;
            ensure(eval.value.is_zero(), || {
                format!("{label} p={}: {}", field.p(), eval.value)
            })?;
        }
    }
    Ok(())
}

fn normalizer_closed_loop() -> Outcome {
    for field in fields() {
        let q = field.q();
        let x = QuadraticForm::parse("x", &field).unwrap();
        let z = zeta(&volume_sequence(&x, 6, &field, Engine::Hensel).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let want: RationalFunction = format!("(1 - 1/{}*X)/(1 - 1/{q}*X)", q.pow(4))
            .parse()
            .unwrap();
        ensure(z.rf == want && z.rf == normalizer_rf(q), || {
            format!("p={q}: {}", z.rf)
        })?;
        let value = -q_inv(q, 1) * (BigRational::one() + q_inv(q, 1));
        ensure(
            z.value_at_s0 == value && normalizer(0, q).unwrap() == value,
            || format!("p={q}: {}", z.value_at_s0),
        )?;
    }
    Ok(())
}

fn unit_square_integral() -> Outcome {
    for field in fields() {
        let q = field.q();
        for c in [1i64, 4] {
            for n in 1..=4 {
                let got = unit_square_shell_volume(c, n, &field).map_err(|e| e.to_string())?;
                let enumerated = unit_square_enum(c, n, q);
                let formula = int(2) * q_inv(q, n) * (BigRational::one() - q_inv(q, 1));
                ensure(got == enumerated && got == formula, || {
                    format!("c={c} n={n} p={q}: {got}, {enumerated}, {formula}")
                })?;
            }
        }
    }
    Ok(())
}

fn finite_field_counts() -> Outcome {
    for field in fields() {
        let p = field.p();
        let choices = [1i64, field.u() as i64, 2];
        for a in choices {
            for b in choices {
                for c in choices {
                    for rhs in 0..p as i64 {
                        let f = [a, b, c];
                        let formula =
                            count_fq(&f, rhs, p, FqMethod::Formula).map_err(|e| e.to_string())?;
                        let brute = fq_brute(&f, rhs, p);
                        ensure(formula == brute, || {
                            format!("{f:?} = {rhs} over F_{p}: {formula} vs {brute}")
                        })?;
                    }
                }
            }
        }
        let sphere = count_fq(&[1, 1, 1], 0, p, FqMethod::Formula).unwrap();
        ensure(sphere == p * p, || {
            format!("x^2+y^2+z^2 = 0 over F_{p}: {sphere}")
        })?;
    }
    Ok(())
}

fn property_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for field in fields() {
        let (p, q) = (field.p(), field.q());
        let v0 = vol_v0(&field);
        for (label, form) in catalog(&field) {
            let base = volume_sequence(&form, 5, &field, Engine::Hensel)
                .unwrap()
                .values;
            let scaled = volume_sequence(
                &form.scale(field.u() as i128).unwrap(),
                5,
                &field,
                Engine::Hensel,
            )
            .unwrap()
            .values;
            ensure(scaled == base, || format!("{label} p={p}: unit scaling"))?;
            let shifted =
                volume_sequence(&form.scale(p as i128).unwrap(), 5, &field, Engine::Hensel)
                    .unwrap()
                    .values;
            ensure(shifted[0].is_zero() && shifted[1..] == base[..5], || {
                format!("{label} p={p}: uniformizer shift")
            })?;
            for n in 0..=5u32 {
                let tail = &v0
                    - base[..n as usize]
                        .iter()
                        .fold(BigRational::zero(), |a, b| a + b);
                let leq = vol_leq(&form, n, &field, Engine::Hensel).unwrap();
                ensure(tail == leq, || format!("{label} p={p} N={n}: completeness"))?;
            }
            if p == 3 {
                for _ in 0..50 {
                    let m = random_unimodular(&mut rng, p);
                    let moved = form.change_of_variables(&m, &field).unwrap();
                    let vs = volume_sequence(&moved, 5, &field, Engine::Hensel)
                        .unwrap()
                        .values;
                    ensure(vs == base, || format!("{label}: unimodular change {m:?}"))?;
                }
            }
        }
        for a in 1..q as i128 {
            for b in 1..q as i128 {
                let prod = eta(a * b, q).unwrap();
                ensure(prod == eta(a, q).unwrap() * eta(b, q).unwrap(), || {
                    format!("eta({a}*{b}) mod {q}")
                })?;
            }
        }
        for d in [SquareClass::U, SquareClass::Pi, SquareClass::UPi] {
            for r in SquareClass::ALL {
                for s in SquareClass::ALL {
                    let lhs = kappa(r.mul(s), d, &field).unwrap();
                    ensure(
                        lhs == kappa(r, d, &field).unwrap() * kappa(s, d, &field).unwrap(),
                        || format!("kappa({r}*{s}, {d})"),
                    )?;
                }
            }
        }
    }
    Ok(())
}

fn instability() -> Outcome {
    for field in fields() {
        let rows = instability_report(&field, 6, Engine::Hensel).map_err(|e| e.to_string())?;
        ensure(rows.len() >= 12, || {
            format!("only {} rows at p = {}", rows.len(), field.p())
        })?;
        for row in rows {
            ensure(row.passed, || {
                format!(
                    "p={} {} {}: {:?}",
                    field.p(),
                    row.class_type,
                    row.stable_class,
                    row.twists
                )
            })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("volume closed forms, p in {3,5,7}, n <= 6", catalog_volumes),
        (
            "naive and Hensel counts agree, p=3 k<=4 and p=5 k<=3",
            engine_equivalence,
        ),
        ("type I values equal 2 kappa_E(r)", type_i_values),
        ("type II values vanish at s=0", type_ii_values),
        ("type III values equal 2 kappa_E/E3(br)", type_iii_values),
        ("type IV values vanish at s=0", type_iv_values),
        (
            "zeta sum of the linear form x is the normalizer",
            normalizer_closed_loop,
        ),
        ("integral over |c - x^2| = q^-n", unit_square_integral),
        (
            "finite-field solution counts: formula vs enumeration",
            finite_field_counts,
        ),
        (
            "volume invariants: scaling, shift, unimodular change, completeness, multiplicativity",
            property_suite,
        ),
        (
            "twists within a stable class: opposite values or all zero",
            instability,
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match check() {
            Ok(()) => println!("PASS  {:>2}  {name}  ({:.1?})", i + 1, start.elapsed()),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {:>2}  {name}: {msg}", i + 1);
            }
        }
    }
    println!(
        "{}/{} acceptance criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
