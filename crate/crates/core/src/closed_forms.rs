//! Closed forms of `vol(V_n^0)` for the catalog cases, as functions of q.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::forms::CaseLabel;

fn inv_pow(q: u64, n: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(q).pow(n))
}

fn int(a: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(a))
}

/// The closed form of `vol(V_n^0)` for `label` over a residue field of size `q`.
pub fn closed_form_volume(label: CaseLabel, n: u32, q: u64) -> BigRational {
    let one = BigRational::one();
    let iq = inv_pow(q, 1);
    let iq2 = inv_pow(q, 2);
    let iq3 = inv_pow(q, 3);
    let qn = inv_pow(q, n);
    let two = int(2);
    match label {
        CaseLabel::IAniso | CaseLabel::IIISqrtA | CaseLabel::IIIDPlusI => match n {
            0 => &one + &iq,
            1 => &iq2 + &iq3,
            _ => BigRational::zero(),
        },
        CaseLabel::I1 | CaseLabel::IIINorm => match n {
            0 => &one - &iq,
            1 => &iq * (&one - &iq) * (&two + &iq),
            _ => &two * &qn * (&one - &iq) * (&one + &iq),
        },
        CaseLabel::I2 => match n {
            0 => one,
            1 => &iq * (&one - &iq),
            2 => &iq2 * (&two - &iq - &two * &iq2),
            _ => &two * &qn * (&one - &iq) * (&one + &iq),
        },
        CaseLabel::I3 => match n {
            0 => &one - &iq2,
            _ => &qn * (&one - &iq) * (&one + &two * &iq + &iq2),
        },
        CaseLabel::II1 => match n {
            0 => &one - &iq,
            1 => &two * &iq - &iq2 + &iq3,
            _ => &two * &qn * (&one - &iq),
        },
        CaseLabel::II2 => match n {
            0 => &one + &iq,
            1 => &iq2 * (&one - &iq),
            _ => &two * inv_pow(q, n + 1) * (&one - &iq),
        },
        CaseLabel::II3a | CaseLabel::II3b | CaseLabel::II4 | CaseLabel::II5 | CaseLabel::IVPi => {
            match n {
                0 => one,
                1 => iq,
                _ => &qn * (&one - &iq2),
            }
        }
        CaseLabel::IVU => match n {
            0 => &one + &iq2,
            _ => &qn * (&one - &iq) * (&one + &iq2),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_exhaust_v0() {
        // The volumes sum to vol(V^0); the first 60 terms leave a tail below q^-55.
        for q in [3u64, 5, 7] {
            let total: BigRational = (0..4).map(|i| inv_pow(q, i)).sum();
            for label in CaseLabel::ALL {
                let partial: BigRational = (0..60).map(|n| closed_form_volume(label, n, q)).sum();
                let gap = &total - &partial;
                assert!(
                    gap >= BigRational::zero() && gap < inv_pow(q, 55),
                    "{label} q = {q}"
                );
            }
        }
    }
}
