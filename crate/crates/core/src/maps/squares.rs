//! The halfline family on `[1, oo)`: the squaring map `g`, the lattice
//! projections `phi_k`, and the compositions `f_k = g . phi_k`.
//!
//! Everything is evaluated in the certified-root family, so ceilings are
//! exact and image values carry their lattice-membership certificates.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exact::ExactReal;

/// Map identifier within the squares family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SquaresMap {
    /// `g(x) = x^2`.
    G,
    /// `f_k(x) = ceil(x^(2^k))^(2^(-k+1))`, `k >= 1`.
    F { k: u32 },
    /// `phi_k(x) = ceil(x^(2^k))^(2^-k)`: retraction of the halfline onto
    /// the lattice `X_k`; the identity on `X_k` itself.
    Phi { k: u32 },
}

impl SquaresMap {
    pub fn validate(&self) -> Result<()> {
        match self {
            SquaresMap::G => Ok(()),
            SquaresMap::F { k } | SquaresMap::Phi { k } => {
                if *k >= 1 {
                    Ok(())
                } else {
                    Err(Error::Domain("squares family needs k >= 1".into()))
                }
            }
        }
    }

    pub fn id_fragment(&self) -> String {
        match self {
            SquaresMap::G => "g".into(),
            SquaresMap::F { k } => format!("f?k={k}"),
            SquaresMap::Phi { k } => format!("phi?k={k}"),
        }
    }
}

fn check_domain(x: &ExactReal) -> Result<()> {
    if x.cmp_exact(&ExactReal::one()) == std::cmp::Ordering::Less {
        return Err(Error::Domain(format!("{x} < 1 is outside the halfline")));
    }
    Ok(())
}

/// `ceil(x^(2^k))` as a positive integer.
fn ceil_pow2k(x: &ExactReal, k: u32) -> Result<BigUint> {
    let y = x.pow2k(k as i32)?;
    let m = y.ceil_int()?;
    m.to_biguint()
        .ok_or_else(|| Error::Domain("ceiling of a halfline power must be positive".into()))
}

/// Evaluate one map of the family at `x >= 1`.
pub fn squares_eval(map: &SquaresMap, x: &ExactReal) -> Result<ExactReal> {
    map.validate()?;
    check_domain(x)?;
    match map {
        SquaresMap::G => x.pow2k(1),
        SquaresMap::Phi { k } => {
            let m = ceil_pow2k(x, *k)?;
            ExactReal::root(m, -(*k as i32))
        }
        SquaresMap::F { k } => {
            let m = ceil_pow2k(x, *k)?;
            ExactReal::root(m, -(*k as i32) + 1)
        }
    }
}

/// Closed form for `f_k^n(x) = ceil(x^(2^k))^(2^(n-k))`, `n >= 1`.
pub fn squares_pow(k: u32, n: u32, x: &ExactReal) -> Result<ExactReal> {
    SquaresMap::F { k }.validate()?;
    if n == 0 {
        return Err(Error::Domain("power must be >= 1".into()));
    }
    check_domain(x)?;
    let m = ceil_pow2k(x, k)?;
    ExactReal::root(m, n as i32 - k as i32)
}

/// Is `v` in the lattice `X_k = { m^(2^-k) : m in N, m >= 1 }`?
///
/// Decided through the integer certificate, never through floating point:
/// `v^(2^k)` is computed in the certified family and checked for
/// integrality.
pub fn xk_membership(k: i32, v: &ExactReal) -> bool {
    match v.pow2k(k) {
        Ok(y) => match y.as_rational() {
            Some(q) => q.is_integer() && *q >= BigRational::one(),
            // A canonical root is irrational, hence not a positive integer.
            None => false,
        },
        // The power left the certified family, so it cannot be an integer.
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_rational;

    fn x(s: &str) -> ExactReal {
        ExactReal::from_rational(parse_rational(s).unwrap())
    }

    #[test]
    fn f1_at_three_halves() {
        // ceil((3/2)^2) = ceil(9/4) = 3, exponent 2^0: value 3.
        let v = squares_eval(&SquaresMap::F { k: 1 }, &x("3/2")).unwrap();
        assert_eq!(v, x("3"));
    }

    #[test]
    fn g_squares_exactly() {
        let v = squares_eval(&SquaresMap::G, &x("3/2")).unwrap();
        assert_eq!(v, x("9/4"));
    }

    #[test]
    fn phi_is_identity_on_its_lattice() {
        for k in 1..=3u32 {
            for m in 2..=20u32 {
                let p = ExactReal::root(BigUint::from(m), -(k as i32)).unwrap();
                let v = squares_eval(&SquaresMap::Phi { k }, &p).unwrap();
                assert_eq!(v, p, "phi_{k} must fix {p}");
            }
        }
    }

    #[test]
    fn pow_matches_iterated_eval() {
        let f1 = SquaresMap::F { k: 1 };
        let once = squares_eval(&f1, &x("3/2")).unwrap();
        let twice = squares_eval(&f1, &once).unwrap();
        let closed = squares_pow(1, 2, &x("3/2")).unwrap();
        assert_eq!(closed, twice);
        assert_eq!(closed, x("9")); // (3, 2-1) = 3^2
    }

    #[test]
    fn pow_at_n_equals_one_is_eval() {
        for k in 1..=4u32 {
            let via_pow = squares_pow(k, 1, &x("7/3")).unwrap();
            let via_eval = squares_eval(&SquaresMap::F { k }, &x("7/3")).unwrap();
            assert_eq!(via_pow, via_eval);
        }
    }

    #[test]
    fn pow_at_n_equals_k_lands_in_integers() {
        for k in 1..=4u32 {
            let v = squares_pow(k, k, &x("5/4")).unwrap();
            assert!(v.is_integer(), "f_{k}^{k} image {v} should be an integer");
            assert!(xk_membership(0, &v));
        }
    }

    #[test]
    fn membership_examples() {
        assert!(xk_membership(-1, &x("9"))); // 9 = 3^2
        assert!(!xk_membership(-1, &x("8")));
        assert!(xk_membership(0, &x("2")));
        assert!(!xk_membership(0, &x("3/2")));
        let root = ExactReal::root(BigUint::from(5u32), -2).unwrap(); // 5^(1/4)
        assert!(xk_membership(2, &root));
        assert!(!xk_membership(1, &root));
    }

    #[test]
    fn domain_errors() {
        assert!(squares_eval(&SquaresMap::G, &x("1/2")).is_err());
        assert!(squares_pow(1, 0, &x("2")).is_err());
        assert!(squares_eval(&SquaresMap::F { k: 0 }, &x("2")).is_err());
    }
}
