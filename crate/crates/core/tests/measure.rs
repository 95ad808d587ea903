mod common;

use proptest::prelude::*;

use twistchar::closed_forms::closed_form_volume;
use twistchar::forms::{normal_form, CaseLabel, FormCase, QuadraticForm};
use twistchar::localfield::LocalField;
use twistchar::measure::{
    count, count_fq, count_hensel, count_naive, cross_check, unit_square_shell_volume, vol_leq,
    vol_v0, vol_vn, volume_sequence, Engine, FqMethod,
};
use twistchar::Error;

use common::*;

fn form(label: CaseLabel, field: &LocalField) -> QuadraticForm {
    normal_form(&FormCase::new(label, *field).unwrap()).unwrap()
}

#[test]
fn count_examples() {
    let f = LocalField::new(3).unwrap();
    let x2 = QuadraticForm::parse("x^2", &f).unwrap();
    assert_eq!(count_naive(&x2, 1, &f, 1_000).unwrap(), 26);
    assert_eq!(count_hensel(&x2, 1, &f).unwrap(), 26);
    for f in fields() {
        let aniso = form(CaseLabel::IAniso, &f);
        assert_eq!(count(&aniso, 2, &f, Engine::Hensel).unwrap().count, 0);
    }
}

#[test]
fn volume_examples() {
    let f = LocalField::new(3).unwrap();
    assert_eq!(vol_v0(&f), rat(40, 27));
    let q = form(CaseLabel::I1, &f);
    assert_eq!(vol_leq(&q, 0, &f, Engine::Hensel).unwrap(), rat(40, 27));
    // S_1 = number of primitive zeros of x^2 - y^2 mod 3 with z, t free.
    let s1 = brute_count(&q, 3, 1);
    assert_eq!(
        vol_leq(&q, 1, &f, Engine::Hensel).unwrap(),
        vol_from_count(s1, 3, 1)
    );
    for f in fields() {
        let q = f.q();
        let i2 = form(CaseLabel::I2, &f);
        assert_eq!(
            vol_vn(&i2, 2, &f, Engine::Hensel).unwrap(),
            closed_form_volume(CaseLabel::I2, 2, q)
        );
        let iv = form(CaseLabel::IVU, &f);
        assert_eq!(
            vol_vn(&iv, 3, &f, Engine::Hensel).unwrap(),
            closed_form_volume(CaseLabel::IVU, 3, q)
        );
    }
}

#[test]
fn closed_forms_match_enumeration() {
    // Independent of both engines: direct enumeration at p = 3 up to level 3.
    let f = LocalField::new(3).unwrap();
    for label in CaseLabel::available_for(&f) {
        let q = form(label, &f);
        let leq: Vec<_> = (0..=3)
            .map(|n| {
                if n == 0 {
                    vol_v0(&f)
                } else {
                    vol_from_count(brute_count(&q, 3, n), 3, n)
                }
            })
            .collect();
        for n in 0..3 {
            assert_eq!(
                &leq[n] - &leq[n + 1],
                closed_form_volume(label, n as u32, 3),
                "{label} n={n}"
            );
        }
    }
}

#[test]
fn closed_forms_match_hensel() {
    for f in fields() {
        for label in CaseLabel::available_for(&f) {
            let vs = volume_sequence(&form(label, &f), 5, &f, Engine::Hensel).unwrap();
            for (n, v) in vs.values.iter().enumerate() {
                assert_eq!(
                    v,
                    &closed_form_volume(label, n as u32, f.q()),
                    "{label} p={} n={n}",
                    f.p()
                );
            }
        }
    }
}

#[test]
fn volumes_sum_to_total() {
    // Volumes are nonnegative and the partial sums never exceed vol(V^0).
    for f in fields() {
        for label in CaseLabel::available_for(&f) {
            let vs = volume_sequence(&form(label, &f), 5, &f, Engine::Hensel).unwrap();
            assert!(vs.values.iter().all(|v| *v >= int(0)));
            assert!(vs.partial_sum(6) <= vol_v0(&f));
        }
    }
}

#[test]
fn engines_agree_on_catalog() {
    for f in fields() {
        let k_max = if f.p() == 3 { 4 } else { 2 };
        for label in CaseLabel::available_for(&f) {
            let rows = cross_check(&form(label, &f), k_max, &f, 50_000_000).unwrap();
            assert!(!rows.is_empty());
            assert!(
                rows.iter().all(|r| r.agrees()),
                "{label} p={} {rows:?}",
                f.p()
            );
        }
    }
}

#[test]
fn unit_square_examples() {
    for f in fields() {
        let p = f.p();
        for c in [1i64, 4] {
            for n in 1..=4 {
                let want = int(2) * q_inv(p, n) * (int(1) - q_inv(p, 1));
                let got = unit_square_shell_volume(c, n, &f).unwrap();
                assert_eq!(got, want, "p={p} c={c} n={n}");
                if n <= 3 {
                    assert_eq!(got, unit_square_enum(c, n, p));
                }
            }
        }
        assert!(unit_square_shell_volume(f.u() as i64, 1, &f).is_err());
        assert!(unit_square_shell_volume(1, 0, &f).is_err());
    }
}

#[test]
fn finite_field_examples() {
    assert_eq!(
        count_fq(&[1, 1, 1], 1, 3, FqMethod::Formula).unwrap(),
        fq_brute(&[1, 1, 1], 1, 3)
    );
    assert_eq!(count_fq(&[1], 1, 5, FqMethod::Formula).unwrap(), 2);
    assert_eq!(count_fq(&[1], 2, 5, FqMethod::Formula).unwrap(), 0);
    for p in [3u64, 5, 7] {
        let u = LocalField::new(p).unwrap().u() as i64;
        for coeffs in [
            vec![1],
            vec![u],
            vec![1, u, 2],
            vec![1, 1, u, u, 2],
            vec![2, 2, 2],
        ] {
            for b in 0..p as i64 {
                let want = fq_brute(&coeffs, b, p);
                assert_eq!(
                    count_fq(&coeffs, b, p, FqMethod::Formula).unwrap(),
                    want,
                    "{coeffs:?} b={b} p={p}"
                );
                assert_eq!(count_fq(&coeffs, b, p, FqMethod::BruteForce).unwrap(), want);
            }
        }
    }
    assert!(count_fq(&[1, 1], 1, 3, FqMethod::Formula).is_err());
    assert!(count_fq(&[1, 3], 1, 3, FqMethod::BruteForce).is_err());
    assert!(count_fq(&[1], 1, 9, FqMethod::BruteForce).is_err());
}

#[test]
fn budget_and_precision_errors() {
    let f = LocalField::new(5).unwrap();
    let q = form(CaseLabel::I1, &f);
    assert!(matches!(
        count_naive(&q, 2, &f, 1_000),
        Err(Error::Budget { .. })
    ));
    assert!(matches!(
        count_naive(&q, 0, &f, 1_000),
        Err(Error::InvalidParameters(_))
    ));
    let rows = cross_check(&q, 4, &f, 1_000_000).unwrap();
    assert_eq!(rows.len(), 2);
    let small = LocalField::with_precision(5, 3).unwrap();
    assert!(matches!(
        count_hensel(&q, 4, &small),
        Err(Error::Precision { .. })
    ));
    assert!(matches!(
        volume_sequence(&q, 3, &small, Engine::Hensel),
        Err(Error::Precision { .. })
    ));
    assert!(volume_sequence(&q, 2, &small, Engine::Hensel).is_ok());
}

fn small_form() -> impl Strategy<Value = (u64, [i128; 10])> {
    (
        prop::sample::select(vec![3u64, 5]),
        prop::array::uniform10(-9i128..=9),
    )
        .prop_filter("nonzero", |(_, c)| c.iter().any(|x| *x != 0))
}

fn build(c: &[i128; 10]) -> QuadraticForm {
    let mut terms = Vec::new();
    let mut idx = 0;
    for i in 0..4 {
        for j in i..4 {
            terms.push((twistchar::forms::quad_mono(i, j), c[idx]));
            idx += 1;
        }
    }
    QuadraticForm::new(terms).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn engines_match_enumeration((p, c) in small_form()) {
        let f = LocalField::new(p).unwrap();
        let q = build(&c);
        let k_max = if p == 3 { 2 } else { 1 };
        for k in 1..=k_max {
            let want = brute_count(&q, p, k);
            prop_assert_eq!(count_hensel(&q, k, &f).unwrap(), want);
            prop_assert_eq!(count_naive(&q, k, &f, u64::MAX).unwrap(), want);
        }
    }

    #[test]
    fn counts_grow_by_at_most_p4((p, c) in small_form()) {
        let f = LocalField::new(p).unwrap();
        let q = build(&c);
        let p4 = (p as u128).pow(4);
        let mut prev = count_hensel(&q, 1, &f).unwrap();
        for k in 2..=4 {
            let next = count_hensel(&q, k, &f).unwrap();
            prop_assert!(next <= p4 * prev);
            prev = next;
        }
    }
}
