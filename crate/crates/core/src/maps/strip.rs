//! The invertible strip family on `[0, oo) x {0, ..., k}`.
//!
//! `g_k` doubles the real coordinate away from ray 0 and cycles all `k + 1`
//! labels; `f_k` acts as `g_{k-1}` on the first `k` rays and doubles the
//! `k`-th ray in place. Both are bijections. Closed iterate forms exist for
//! every power; label arithmetic is normalized into `{0, ..., modulus-1}`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::exact::pow2_rational;

/// Map identifier within the strip family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StripMap {
    /// `f_k`, `k >= 1`.
    F { k: u32 },
    /// `g_k`, `k >= 0`.
    G { k: u32 },
    FInv { k: u32 },
    GInv { k: u32 },
}

impl StripMap {
    pub fn k(&self) -> u32 {
        match self {
            StripMap::F { k } | StripMap::G { k } | StripMap::FInv { k } | StripMap::GInv { k } => {
                *k
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            StripMap::F { k } | StripMap::FInv { k } if *k == 0 => {
                Err(Error::Domain("f_k needs k >= 1".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn id_fragment(&self) -> String {
        let k = self.k();
        match self {
            StripMap::F { .. } => format!("f?k={k}"),
            StripMap::G { .. } => format!("g?k={k}"),
            StripMap::FInv { .. } => format!("finv?k={k}"),
            StripMap::GInv { .. } => format!("ginv?k={k}"),
        }
    }
}

/// Which closed iterate formula to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StripPowForm {
    /// Piecewise form valid for `1 <= n <= k`.
    SmallN,
    /// The full-cycle form at `n = k + 1`.
    KPlusOne,
    /// Exponent form `2^(n - ceil((n-j)/(k+1)))`, valid for every `n >= 1`.
    General,
}

fn check_label(label: i64, k: u32) -> Result<()> {
    if label < 0 || label > k as i64 {
        return Err(Error::LabelOutOfRange {
            label,
            space: format!("strip?k={k}"),
        });
    }
    Ok(())
}

fn scale(r: &BigRational, exp: i64) -> BigRational {
    r * pow2_rational(exp as i32)
}

fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    (a + b - 1).div_euclid(b)
}

/// One application of a strip map.
pub fn strip_eval(map: &StripMap, r: &BigRational, label: i64) -> Result<(BigRational, i64)> {
    map.validate()?;
    let k = map.k() as i64;
    check_label(label, map.k())?;
    Ok(match map {
        StripMap::G { .. } => {
            let modulus = k + 1;
            (scale(r, label.min(1)), (label - 1).rem_euclid(modulus))
        }
        StripMap::F { .. } => {
            if label == k {
                (scale(r, 1), k)
            } else {
                (scale(r, label.min(1)), (label - 1).rem_euclid(k))
            }
        }
        StripMap::GInv { .. } => {
            let modulus = k + 1;
            let source = (label + 1).rem_euclid(modulus);
            (scale(r, -source.min(1)), source)
        }
        StripMap::FInv { .. } => {
            if label == k {
                (scale(r, -1), k)
            } else {
                let source = (label + 1).rem_euclid(k);
                (scale(r, -source.min(1)), source)
            }
        }
    })
}

/// The exponent `n - ceil((n - j) / (k + 1))` of the general `g_k^n` form.
pub fn g_pow_exponent(k: u32, n: u32, label: i64) -> i64 {
    let modulus = k as i64 + 1;
    n as i64 - ceil_div(n as i64 - label, modulus)
}

fn g_pow_general(k: u32, n: u32, r: &BigRational, label: i64) -> (BigRational, i64) {
    let modulus = k as i64 + 1;
    let exp = g_pow_exponent(k, n, label);
    (scale(r, exp), (label - n as i64).rem_euclid(modulus))
}

fn f_pow_general(k: u32, n: u32, r: &BigRational, label: i64) -> (BigRational, i64) {
    if label == k as i64 {
        (scale(r, n as i64), label)
    } else {
        g_pow_general(k - 1, n, r, label)
    }
}

/// Closed form for `f_k^n` or `g_k^n` at a strip point.
///
/// `SmallN` requires `n <= k` and `KPlusOne` requires `n = k + 1`;
/// requesting a form outside its range is an error. All forms agree with
/// brute-force iteration wherever they apply.
pub fn strip_pow_closed(
    map: &StripMap,
    form: StripPowForm,
    n: u32,
    r: &BigRational,
    label: i64,
) -> Result<(BigRational, i64)> {
    map.validate()?;
    if n == 0 {
        return Err(Error::Domain("power must be >= 1".into()));
    }
    let k = map.k();
    check_label(label, k)?;
    let j = label;
    match (map, form) {
        (StripMap::FInv { .. } | StripMap::GInv { .. }, _) => Err(Error::Domain(
            "closed iterate forms exist for the forward maps only".into(),
        )),
        (StripMap::G { .. }, StripPowForm::General) => Ok(g_pow_general(k, n, r, j)),
        (StripMap::F { .. }, StripPowForm::General) => Ok(f_pow_general(k, n, r, j)),
        (StripMap::G { .. }, StripPowForm::SmallN) => {
            if n > k {
                return Err(Error::Domain(format!(
                    "the piecewise form of g_{k}^n needs n <= {k}, got {n}"
                )));
            }
            let modulus = k as i64 + 1;
            let exp = if j < n as i64 { n as i64 - 1 } else { n as i64 };
            Ok((scale(r, exp), (j - n as i64).rem_euclid(modulus)))
        }
        (StripMap::F { .. }, StripPowForm::SmallN) => {
            if n > k {
                return Err(Error::Domain(format!(
                    "the piecewise form of f_{k}^n needs n <= {k}, got {n}"
                )));
            }
            if j == k as i64 {
                Ok((scale(r, n as i64), j))
            } else {
                let exp = if j < n as i64 { n as i64 - 1 } else { n as i64 };
                Ok((scale(r, exp), (j - n as i64).rem_euclid(k as i64)))
            }
        }
        (StripMap::G { .. }, StripPowForm::KPlusOne) => {
            if n != k + 1 {
                return Err(Error::Domain(format!(
                    "the full-cycle form of g_{k} needs n = {}, got {n}",
                    k + 1
                )));
            }
            Ok((scale(r, k as i64), j))
        }
        (StripMap::F { .. }, StripPowForm::KPlusOne) => {
            if n != k + 1 {
                return Err(Error::Domain(format!(
                    "the full-cycle form of f_{k} needs n = {}, got {n}",
                    k + 1
                )));
            }
            if j == k as i64 {
                Ok((scale(r, k as i64 + 1), j))
            } else {
                Ok((scale(r, k as i64 - 1 + j.min(1)), (j - 1).rem_euclid(k as i64)))
            }
        }
    }
}

/// First-coordinate multiplier of `f_k^n` on ray `j`, as an exact integer
/// power of two.
pub fn f_pow_multiplier(k: u32, n: u32, label: i64) -> BigInt {
    let exp = if label == k as i64 {
        n as i64
    } else {
        g_pow_exponent(k - 1, n, label)
    };
    BigInt::from(1) << exp as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_rational;

    fn rat(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn iterate(map: &StripMap, n: u32, r: &BigRational, label: i64) -> (BigRational, i64) {
        let mut cur = (r.clone(), label);
        for _ in 0..n {
            cur = strip_eval(map, &cur.0, cur.1).unwrap();
        }
        cur
    }

    #[test]
    fn g1_cycles_labels_and_doubles_upper_ray() {
        let g1 = StripMap::G { k: 1 };
        assert_eq!(strip_eval(&g1, &rat("5"), 0).unwrap(), (rat("5"), 1));
        assert_eq!(strip_eval(&g1, &rat("5"), 1).unwrap(), (rat("10"), 0));
    }

    #[test]
    fn f1_fixes_ray_zero_and_doubles_ray_one() {
        let f1 = StripMap::F { k: 1 };
        assert_eq!(strip_eval(&f1, &rat("5"), 0).unwrap(), (rat("5"), 0));
        assert_eq!(strip_eval(&f1, &rat("5"), 1).unwrap(), (rat("10"), 1));
    }

    #[test]
    fn origin_rays_stay_at_zero() {
        for k in 0..=4u32 {
            let g = StripMap::G { k };
            for j in 0..=k as i64 {
                let (r, l) = strip_eval(&g, &rat("0"), j).unwrap();
                assert_eq!(r, rat("0"));
                assert_eq!(l, (j - 1).rem_euclid(k as i64 + 1));
            }
        }
    }

    #[test]
    fn inverses_cancel() {
        for k in 1..=4u32 {
            let f = StripMap::F { k };
            let finv = StripMap::FInv { k };
            let g = StripMap::G { k };
            let ginv = StripMap::GInv { k };
            for j in 0..=k as i64 {
                let p = (rat("7/3"), j);
                let fwd = strip_eval(&f, &p.0, p.1).unwrap();
                assert_eq!(strip_eval(&finv, &fwd.0, fwd.1).unwrap(), p);
                let bwd = strip_eval(&finv, &p.0, p.1).unwrap();
                assert_eq!(strip_eval(&f, &bwd.0, bwd.1).unwrap(), p);
                let fwd = strip_eval(&g, &p.0, p.1).unwrap();
                assert_eq!(strip_eval(&ginv, &fwd.0, fwd.1).unwrap(), p);
                let bwd = strip_eval(&ginv, &p.0, p.1).unwrap();
                assert_eq!(strip_eval(&g, &bwd.0, bwd.1).unwrap(), p);
            }
        }
    }

    #[test]
    fn full_cycle_forms_at_k_equals_one() {
        // g_1^2 multiplies by 2 and fixes labels.
        for j in 0..=1 {
            let v = strip_pow_closed(&StripMap::G { k: 1 }, StripPowForm::KPlusOne, 2, &rat("3"), j)
                .unwrap();
            assert_eq!(v, (rat("6"), j));
        }
        // f_1^2: ray 0 fixed, ray 1 multiplied by 4.
        let v = strip_pow_closed(&StripMap::F { k: 1 }, StripPowForm::KPlusOne, 2, &rat("3"), 0)
            .unwrap();
        assert_eq!(v, (rat("3"), 0));
        let v = strip_pow_closed(&StripMap::F { k: 1 }, StripPowForm::KPlusOne, 2, &rat("3"), 1)
            .unwrap();
        assert_eq!(v, (rat("12"), 1));
    }

    #[test]
    fn general_form_matches_full_cycle_form() {
        for k in 1..=6u32 {
            for j in 0..=k as i64 {
                let a = strip_pow_closed(&StripMap::G { k }, StripPowForm::General, k + 1, &rat("1"), j)
                    .unwrap();
                let b =
                    strip_pow_closed(&StripMap::G { k }, StripPowForm::KPlusOne, k + 1, &rat("1"), j)
                        .unwrap();
                assert_eq!(a, b, "g_{k}^{} at ray {j}", k + 1);
            }
        }
    }

    #[test]
    fn closed_forms_match_iteration() {
        for k in 1..=4u32 {
            for n in 1..=10u32 {
                for j in 0..=k as i64 {
                    let r = rat("3/4");
                    let brute_f = iterate(&StripMap::F { k }, n, &r, j);
                    let brute_g = iterate(&StripMap::G { k }, n, &r, j);
                    let gen_f =
                        strip_pow_closed(&StripMap::F { k }, StripPowForm::General, n, &r, j)
                            .unwrap();
                    let gen_g =
                        strip_pow_closed(&StripMap::G { k }, StripPowForm::General, n, &r, j)
                            .unwrap();
                    assert_eq!(gen_f, brute_f, "f_{k}^{n} ray {j}");
                    assert_eq!(gen_g, brute_g, "g_{k}^{n} ray {j}");
                    if n <= k {
                        let small_f =
                            strip_pow_closed(&StripMap::F { k }, StripPowForm::SmallN, n, &r, j)
                                .unwrap();
                        let small_g =
                            strip_pow_closed(&StripMap::G { k }, StripPowForm::SmallN, n, &r, j)
                                .unwrap();
                        assert_eq!(small_f, brute_f);
                        assert_eq!(small_g, brute_g);
                    }
                }
            }
        }
    }

    #[test]
    fn forms_reject_out_of_range_powers() {
        let g2 = StripMap::G { k: 2 };
        assert!(strip_pow_closed(&g2, StripPowForm::SmallN, 3, &rat("1"), 0).is_err());
        assert!(strip_pow_closed(&g2, StripPowForm::KPlusOne, 2, &rat("1"), 0).is_err());
        assert!(strip_pow_closed(&g2, StripPowForm::General, 0, &rat("1"), 0).is_err());
    }

    #[test]
    fn labels_out_of_range_error() {
        assert!(strip_eval(&StripMap::G { k: 2 }, &rat("1"), 3).is_err());
        assert!(strip_eval(&StripMap::G { k: 2 }, &rat("1"), -1).is_err());
    }

    #[test]
    fn corollary_multiplier_on_ray_zero() {
        // f_k^{l(k+1)}(r, 0) scales by 2^(l(k+1) - ceil(l(k+1)/k)).
        for k in 2..=4u32 {
            for l in 1..=3u32 {
                let n = l * (k + 1);
                let expected_exp = n as i64 - ceil_div(n as i64, k as i64);
                let (r, label) =
                    strip_pow_closed(&StripMap::F { k }, StripPowForm::General, n, &rat("1"), 0)
                        .unwrap();
                assert_eq!(r, pow2_rational(expected_exp as i32));
                assert_eq!(label, (-(l as i64)).rem_euclid(k as i64));
            }
        }
    }
}
