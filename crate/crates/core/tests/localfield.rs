mod common;

use proptest::prelude::*;

use twistchar::localfield::{
    eta, is_norm, kappa, kappa_rel, square_class_of, BaseExtension, E3Elem, LocalField,
    RelExtension, SquareClass,
};
use twistchar::Error;

use common::*;

#[test]
fn eta_examples() {
    assert_eq!(eta(1, 7).unwrap(), 1);
    assert_eq!(eta(0, 5).unwrap(), 0);
    assert_eq!(eta(5, 7).unwrap(), -1);
}

#[test]
fn eta_is_multiplicative_and_balanced() {
    for p in [3u64, 5, 7, 11] {
        let plus = (1..p as i128).filter(|&a| eta(a, p).unwrap() == 1).count();
        assert_eq!(plus as u64, (p - 1) / 2);
        for a in 1..p as i128 {
            assert_eq!(eta(a, p).unwrap() == 1, is_square_mod(a as i64, p));
            for b in 1..p as i128 {
                assert_eq!(
                    eta(a * b, p).unwrap(),
                    eta(a, p).unwrap() * eta(b, p).unwrap()
                );
            }
        }
    }
}

#[test]
fn square_class_examples() {
    let f5 = LocalField::new(5).unwrap();
    assert_eq!(square_class_of(9, &f5).unwrap(), SquareClass::One);
    for f in fields() {
        assert_eq!(square_class_of(f.p() as i128, &f).unwrap(), SquareClass::Pi);
    }
    let f3 = LocalField::new(3).unwrap();
    assert_eq!(square_class_of(6, &f3).unwrap(), SquareClass::UPi);
    assert!(matches!(
        square_class_of(0, &f3),
        Err(Error::DegenerateInput(_))
    ));
}

#[test]
fn field_constants() {
    let expect = [
        (3u64, 2u64, Some(1u64)),
        (5, 2, None),
        (7, 3, Some(2)),
        (11, 2, Some(1)),
        (13, 2, None),
    ];
    for (p, u, d) in expect {
        let f = LocalField::new(p).unwrap();
        assert_eq!((f.p(), f.q(), f.u(), f.d()), (p, p, u, d));
        assert!(!is_square_mod(u as i64, p));
        if let Some(d) = d {
            assert!(!is_square_mod((d * d + 1) as i64, p));
        }
    }
    for bad in [2u64, 4, 9, 1, 0] {
        assert!(LocalField::new(bad).is_err(), "p = {bad}");
    }
}

#[test]
fn valuations_beyond_the_cap_are_refused() {
    let f = LocalField::with_precision(3, 4).unwrap();
    assert_eq!(square_class_of(81, &f).unwrap(), SquareClass::One);
    assert!(matches!(
        square_class_of(243, &f),
        Err(Error::Precision { needed: 5, cap: 4 })
    ));
}

#[test]
fn tags_are_distinct() {
    for f in fields() {
        for a in SquareClass::ALL {
            for b in SquareClass::ALL {
                let prod = a.mul(b);
                assert_eq!(prod == SquareClass::One, a == b);
                assert_eq!(
                    square_class_of(f.rep(a) as i128 * f.rep(b) as i128, &f).unwrap(),
                    prod
                );
            }
        }
    }
}

#[test]
fn norm_examples() {
    use SquareClass::*;
    for f in fields() {
        for d in [U, Pi, UPi] {
            assert!(is_norm(One, d, &f).unwrap());
        }
        assert!(!is_norm(Pi, U, &f).unwrap());
        let minus_p = square_class_of(-(f.p() as i128), &f).unwrap();
        assert!(is_norm(minus_p, Pi, &f).unwrap());
        assert_eq!(kappa(One, Pi, &f).unwrap(), 1);
        assert_eq!(kappa(U, Pi, &f).unwrap(), -1);
        assert_eq!(kappa(Pi, U, &f).unwrap() * kappa(Pi, U, &f).unwrap(), 1);
        assert!(matches!(is_norm(U, One, &f), Err(Error::NotAnExtension(_))));
    }
}

#[test]
fn kappa_is_a_nontrivial_character_on_classes() {
    for f in fields() {
        for d in [SquareClass::U, SquareClass::Pi, SquareClass::UPi] {
            let minus = SquareClass::ALL
                .iter()
                .filter(|r| kappa(**r, d, &f).unwrap() == -1)
                .count();
            assert_eq!(minus, 2);
        }
    }
}

#[test]
fn norms_match_enumeration() {
    for p in [3u64, 5, 7] {
        let f = LocalField::new(p).unwrap();
        for d in [SquareClass::U, SquareClass::Pi, SquareClass::UPi] {
            let found = norm_classes(f.rep(d), p);
            for r in SquareClass::ALL {
                assert_eq!(
                    is_norm(r, d, &f).unwrap(),
                    found.contains(&r),
                    "p={p} D={d} r={r}"
                );
            }
        }
    }
}

#[test]
fn relative_kappa_examples() {
    for f in fields() {
        let base = BaseExtension::new(f.p() as i64, &f).unwrap();
        let ext = RelExtension::new(base, E3Elem::from_int(f.u() as i128), &f).unwrap();
        assert_eq!(kappa_rel(&E3Elem::from_int(1), &ext, &f).unwrap(), 1);
        assert_eq!(kappa_rel(&E3Elem::new(0, 1), &ext, &f).unwrap(), -1);
        if let Some(d) = f.d() {
            let base = BaseExtension::new(-1, &f).unwrap();
            let ext = RelExtension::new(base, E3Elem::from_int(f.p() as i128), &f).unwrap();
            assert_eq!(kappa_rel(&E3Elem::new(d as i128, 1), &ext, &f).unwrap(), -1);
        }
    }
}

/// Whether `x^2 - D y^2 = r (1 + m)` with `v(m) > 0` has a solution with
/// `x, y` in `O_E3` mod p^2, where `D` is a unit or a uniformizer of `E3`.
fn rel_norm_by_search(r: (i64, i64), big_a: i64, big_d: i64, p: u64) -> bool {
    let ramified = big_a % p as i64 == 0;
    let m = (p * p) as i128;
    let (a, d) = (big_a as i128, big_d as i128);
    let val = |x: i128, y: i128| -> u32 {
        // valuation in E3, normalized so a uniformizer of E3 has valuation 1
        let vp = |z: i128| {
            if z == 0 {
                100
            } else {
                (0..).find(|k| z % (p as i128).pow(k + 1) != 0).unwrap()
            }
        };
        if ramified {
            (2 * vp(x)).min(2 * vp(y) + 1)
        } else {
            vp(x).min(vp(y))
        }
    };
    let target = val(r.0 as i128, r.1 as i128) + 1;
    for x0 in 0..m {
        for x1 in 0..m {
            let xx = (x0 * x0 + a * x1 * x1, 2 * x0 * x1);
            for y0 in 0..m {
                for y1 in 0..m {
                    let yy = (y0 * y0 + a * y1 * y1, 2 * y0 * y1);
                    let diff = (xx.0 - d * yy.0 - r.0 as i128, xx.1 - d * yy.1 - r.1 as i128);
                    if val(diff.0, diff.1) >= target {
                        return true;
                    }
                }
            }
        }
    }
    false
}

#[test]
fn relative_kappa_matches_norm_search() {
    for p in [3u64, 5] {
        let f = LocalField::new(p).unwrap();
        let (u, pp) = (f.u() as i64, p as i64);
        let mut shapes = vec![(u, pp), (pp, u)];
        if f.d().is_some() {
            shapes.push((-1, pp));
        }
        for (big_a, big_d) in shapes {
            let base = BaseExtension::new(big_a, &f).unwrap();
            let ext = RelExtension::new(base, E3Elem::from_int(big_d as i128), &f).unwrap();
            for r in [(1i64, 0i64), (0, 1), (1, 1), (2, 1), (1, 2), (u, 0)] {
                let k = kappa_rel(&E3Elem::new(r.0 as i128, r.1 as i128), &ext, &f).unwrap();
                let searched = rel_norm_by_search(r, big_a, big_d, p);
                assert_eq!(k == 1, searched, "p={p} A={big_a} D={big_d} r={r:?}");
            }
        }
    }
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7, 11, 13])
}

fn nonzero_small() -> impl Strategy<Value = i64> {
    (-60i64..=60).prop_filter("nonzero", |x| *x != 0)
}

proptest! {
    #[test]
    fn kappa_is_the_hilbert_symbol(p in prime(), r in 0usize..4, d in 1usize..4) {
        let f = LocalField::new(p).unwrap();
        let (r, d) = (SquareClass::ALL[r], SquareClass::ALL[d]);
        prop_assert_eq!(kappa(r, d, &f).unwrap(), hilbert(f.rep(r), f.rep(d), p));
    }

    #[test]
    fn square_class_ignores_squares(p in prime(), x in nonzero_small(), y in nonzero_small()) {
        let f = LocalField::with_precision(p, 32).unwrap();
        let lhs = square_class_of(x as i128 * (y as i128).pow(2), &f).unwrap();
        prop_assert_eq!(lhs, square_class_of(x as i128, &f).unwrap());
    }

    #[test]
    fn relative_kappa_is_multiplicative_and_descends(
        p in prime(),
        shape in 0usize..3,
        r in (-9i64..=9, -9i64..=9),
        s in (-9i64..=9, -9i64..=9),
    ) {
        let f = LocalField::new(p).unwrap();
        let (u, pp) = (f.u() as i64, p as i64);
        let (big_a, big_d) = [(u, pp), (pp, u), (pp, u * pp)][shape];
        prop_assume!(r != (0, 0) && s != (0, 0));
        let base = BaseExtension::new(big_a, &f).unwrap();
        let ext = RelExtension::new(base, E3Elem::from_int(big_d as i128), &f).unwrap();
        let (re, se) = (E3Elem::new(r.0 as i128, r.1 as i128), E3Elem::new(s.0 as i128, s.1 as i128));
        let k = |x: &E3Elem| kappa_rel(x, &ext, &f).unwrap();
        prop_assert_eq!(k(&re.mul(&se, &base)), k(&re) * k(&se));
        // Local class field theory: (r, D)_E3 = (N r, D)_F for D in F.
        let n = re.norm(&base) as i64;
        prop_assert_eq!(k(&re), hilbert(n, big_d, p));
    }
}
