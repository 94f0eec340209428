//! Exact real values closed under the operations the map families need.
//!
//! Every number handled by the library is either a big rational or a
//! certified root `base^(2^exp)` with integer `base`. The certified form is
//! what makes lattice membership (`value^(2^k)` integral?) decidable without
//! floating point: the integer certificate travels with the value. Numeric
//! materialization happens only at report time, through outward-rounded
//! dyadic enclosures.

use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default mantissa bits for outward-rounded materialization.
pub const DEFAULT_PRECISION_BITS: u32 = 128;

/// Smallest accepted materialization precision.
pub const MIN_PRECISION_BITS: u32 = 64;

static PRECISION_BITS: AtomicU32 = AtomicU32::new(DEFAULT_PRECISION_BITS);

/// Process-wide materialization precision for certified roots. Values are
/// immutable and operations pure, so this only affects the width of the
/// outward enclosures in reports.
pub fn precision_bits() -> u32 {
    PRECISION_BITS.load(AtomicOrdering::Relaxed)
}

/// Set the materialization precision; values below
/// [`MIN_PRECISION_BITS`] are rejected.
pub fn set_precision_bits(bits: u32) -> Result<()> {
    if bits < MIN_PRECISION_BITS {
        return Err(Error::Domain(format!(
            "precision must be >= {MIN_PRECISION_BITS} bits, got {bits}"
        )));
    }
    PRECISION_BITS.store(bits, AtomicOrdering::Relaxed);
    Ok(())
}

/// Largest supported root degree exponent: roots are `2^j`-th with `j <= 16`.
const MAX_ROOT_LOG2: u32 = 16;

/// Cap on the bit size of shifted integers fed to `nth_root`.
const MAX_SHIFT_BITS: u64 = 1 << 22;

/// An exact nonnegative-or-rational real value.
///
/// `Root { base, exp }` denotes `base^(2^exp)`. The constructor keeps values
/// canonical: nonnegative exponents are materialized into `Rational`, and a
/// perfect-square base is reduced (`(s^2)^(2^e) = s^(2^(e+1))`). A canonical
/// `Root` therefore always denotes an irrational number, which is what makes
/// exact comparison decidable.
#[derive(Clone, Debug)]
pub enum ExactReal {
    Rational(BigRational),
    Root { base: BigUint, exp: i32 },
}

impl ExactReal {
    pub fn zero() -> Self {
        ExactReal::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactReal::Rational(BigRational::one())
    }

    pub fn from_u64(n: u64) -> Self {
        ExactReal::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        ExactReal::Rational(BigRational::from_integer(n))
    }

    pub fn from_rational(q: BigRational) -> Self {
        ExactReal::Rational(q)
    }

    /// Canonical certified root `base^(2^exp)`.
    pub fn root(base: BigUint, exp: i32) -> Result<Self> {
        if base.is_zero() {
            return Ok(ExactReal::zero());
        }
        if base.is_one() {
            return Ok(ExactReal::one());
        }
        let mut base = base;
        let mut exp = exp;
        if exp >= 0 {
            // Materialize: the value is an integer.
            let int = pow2k_uint(&base, exp as u32)?;
            return Ok(ExactReal::Rational(BigRational::from_integer(
                BigInt::from(int),
            )));
        }
        while exp < 0 {
            let r = base.sqrt();
            if &r * &r == base {
                base = r;
                exp += 1;
            } else {
                break;
            }
        }
        if exp == 0 || base.is_one() {
            return Ok(ExactReal::Rational(BigRational::from_integer(BigInt::from(
                base,
            ))));
        }
        if exp.unsigned_abs() > MAX_ROOT_LOG2 {
            return Err(Error::Precision(format!(
                "root degree 2^{} exceeds the supported limit",
                exp.unsigned_abs()
            )));
        }
        Ok(ExactReal::Root { base, exp })
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactReal::Rational(q) => Some(q),
            ExactReal::Root { .. } => None,
        }
    }

    /// Integer certificate `(m, e)` with value `m^(2^e)`, when one exists.
    pub fn certificate(&self) -> Option<(BigUint, i32)> {
        match self {
            ExactReal::Rational(q) => {
                if q.is_integer() && !q.is_negative() {
                    Some((q.to_integer().to_biguint()?, 0))
                } else {
                    None
                }
            }
            ExactReal::Root { base, exp } => Some((base.clone(), *exp)),
        }
    }

    pub fn is_integer(&self) -> bool {
        matches!(self, ExactReal::Rational(q) if q.is_integer())
    }

    /// `value^(2^k)`; `k` may be negative (root extraction).
    pub fn pow2k(&self, k: i32) -> Result<Self> {
        match self {
            ExactReal::Rational(q) => {
                if k >= 0 {
                    Ok(ExactReal::Rational(pow2k_rational(q, k as u32)?))
                } else {
                    if q.is_negative() {
                        return Err(Error::Domain(
                            "cannot take an even-order root of a negative value".into(),
                        ));
                    }
                    let j = k.unsigned_abs();
                    if j > MAX_ROOT_LOG2 {
                        return Err(Error::Precision(format!(
                            "root degree 2^{j} exceeds the supported limit"
                        )));
                    }
                    let numer = q.numer().to_biguint().expect("nonnegative");
                    let denom = q.denom().to_biguint().expect("positive");
                    let (rn, exact_n) = int_root_pow2(&numer, j);
                    if denom.is_one() {
                        if exact_n {
                            return Ok(ExactReal::Rational(BigRational::from_integer(
                                BigInt::from(rn),
                            )));
                        }
                        return ExactReal::root(numer, k);
                    }
                    let (rd, exact_d) = int_root_pow2(&denom, j);
                    if exact_n && exact_d {
                        return Ok(ExactReal::Rational(BigRational::new(
                            BigInt::from(rn),
                            BigInt::from(rd),
                        )));
                    }
                    Err(Error::Precision(format!(
                        "2^{j}-th root of {q} is not in the certified family"
                    )))
                }
            }
            ExactReal::Root { base, exp } => {
                let new_exp = exp.checked_add(k).ok_or_else(|| {
                    Error::Precision("root exponent overflow".into())
                })?;
                ExactReal::root(base.clone(), new_exp)
            }
        }
    }

    /// The value squared.
    pub fn square(&self) -> Self {
        self.pow2k(1).expect("squaring stays in the family")
    }

    /// Exact ceiling, using integer roots for certified values.
    pub fn ceil_int(&self) -> Result<BigInt> {
        match self {
            ExactReal::Rational(q) => Ok(q.ceil().to_integer()),
            ExactReal::Root { base, exp } => {
                let j = exp.unsigned_abs();
                let (r, exact) = int_root_pow2(base, j);
                let r = BigInt::from(r);
                Ok(if exact { r } else { r + 1 })
            }
        }
    }

    /// Total exact ordering. Decidable because canonical roots are
    /// irrational: equality across representations reduces to integer
    /// identities, and strict comparison to raising both sides to a common
    /// `2^j`-th power.
    pub fn cmp_exact(&self, other: &ExactReal) -> Ordering {
        match (self, other) {
            (ExactReal::Rational(a), ExactReal::Rational(b)) => a.cmp(b),
            (ExactReal::Rational(q), ExactReal::Root { base, exp }) => {
                cmp_rational_root(q, base, exp.unsigned_abs())
            }
            (ExactReal::Root { base, exp }, ExactReal::Rational(q)) => {
                cmp_rational_root(q, base, exp.unsigned_abs()).reverse()
            }
            (
                ExactReal::Root { base: b1, exp: e1 },
                ExactReal::Root { base: b2, exp: e2 },
            ) => {
                if b1 == b2 && e1 == e2 {
                    return Ordering::Equal;
                }
                let j = e1.unsigned_abs().max(e2.unsigned_abs());
                let p1 = pow2k_uint(b1, j - e1.unsigned_abs()).expect("bounded degree");
                let p2 = pow2k_uint(b2, j - e2.unsigned_abs()).expect("bounded degree");
                p1.cmp(&p2)
            }
        }
    }

    /// Outward-rounded dyadic enclosure with absolute width `<= 2^-bits`
    /// (exact for rationals).
    pub fn enclosure(&self, bits: u32) -> Enclosure {
        match self {
            ExactReal::Rational(q) => Enclosure::exact(q.clone()),
            ExactReal::Root { base, exp } => {
                let j = exp.unsigned_abs();
                let degree: u64 = 1u64 << j;
                let bits = effective_bits(bits, degree);
                // (base << (bits * 2^j))^(1/2^j) = base^(1/2^j) * 2^bits
                let shifted = base << (bits as u64 * degree) as usize;
                let floor_scaled = shifted.nth_root(degree as u32);
                let denom = BigInt::from(BigUint::one() << bits as usize);
                let lo = BigRational::new(BigInt::from(floor_scaled.clone()), denom.clone());
                let hi = BigRational::new(BigInt::from(floor_scaled + 1u32), denom);
                Enclosure::new(lo, hi)
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.enclosure(64).approx()
    }

    /// Outward enclosure of `|self - other|`.
    pub fn abs_diff(&self, other: &ExactReal, bits: u32) -> Enclosure {
        match (self, other) {
            (ExactReal::Rational(a), ExactReal::Rational(b)) => {
                Enclosure::exact((a - b).abs())
            }
            _ => {
                let a = self.enclosure(bits);
                let b = other.enclosure(bits);
                a.sub(&b).abs()
            }
        }
    }
}

impl PartialEq for ExactReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_exact(other) == Ordering::Equal
    }
}

impl Eq for ExactReal {}

impl PartialOrd for ExactReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_exact(other)
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactReal::Rational(q) => write!(f, "{}", rational_to_string(q)),
            ExactReal::Root { base, exp } => {
                write!(f, "{}^(1/{})", base, 1u64 << exp.unsigned_abs())
            }
        }
    }
}

fn cmp_rational_root(q: &BigRational, base: &BigUint, j: u32) -> Ordering {
    // Canonical roots denote values > 1.
    if q.is_negative() || q.is_zero() {
        return Ordering::Less;
    }
    // Equality is impossible here: q^(2^j) == base would make the root
    // rational, which the canonical form excludes.
    let powed = pow2k_rational(q, j).expect("bounded degree");
    let base_rat = BigRational::from_integer(BigInt::from(base.clone()));
    powed.cmp(&base_rat)
}

fn effective_bits(bits: u32, degree: u64) -> u32 {
    let max = (MAX_SHIFT_BITS / degree).max(8) as u32;
    bits.min(max)
}

/// `base^(2^k)` by repeated squaring.
pub fn pow2k_uint(base: &BigUint, k: u32) -> Result<BigUint> {
    if k > MAX_ROOT_LOG2 {
        return Err(Error::Precision(format!(
            "power degree 2^{k} exceeds the supported limit"
        )));
    }
    let mut v = base.clone();
    for _ in 0..k {
        v = &v * &v;
    }
    Ok(v)
}

/// `q^(2^k)` by repeated squaring.
pub fn pow2k_rational(q: &BigRational, k: u32) -> Result<BigRational> {
    if k > MAX_ROOT_LOG2 {
        return Err(Error::Precision(format!(
            "power degree 2^{k} exceeds the supported limit"
        )));
    }
    let mut v = q.clone();
    for _ in 0..k {
        v = &v * &v;
    }
    Ok(v)
}

/// Floor of the `2^j`-th root together with an exactness flag.
fn int_root_pow2(m: &BigUint, j: u32) -> (BigUint, bool) {
    if j == 0 {
        return (m.clone(), true);
    }
    let degree = 1u32 << j.min(MAX_ROOT_LOG2);
    let r = m.nth_root(degree);
    let back = pow2k_uint(&r, j.min(MAX_ROOT_LOG2)).expect("bounded degree");
    let exact = &back == m;
    (r, exact)
}

/// A signed outward enclosure `[lo, hi]`; `lo == hi` means the value is
/// exact. Arithmetic rounds outward, so derived bounds stay conservative.
#[derive(Clone, Debug, PartialEq)]
pub struct Enclosure {
    lo: BigRational,
    hi: BigRational,
}

impl Enclosure {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        Enclosure { lo, hi }
    }

    pub fn exact(q: BigRational) -> Self {
        Enclosure {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn zero() -> Self {
        Enclosure::exact(BigRational::zero())
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo + &other.lo, &self.hi + &other.hi)
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        Enclosure::new(&self.lo - &other.hi, &self.hi - &other.lo)
    }

    pub fn abs(&self) -> Enclosure {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            Enclosure::new(-self.hi.clone(), -self.lo.clone())
        } else {
            let hi = self.hi.clone().max(-self.lo.clone());
            Enclosure::new(BigRational::zero(), hi)
        }
    }

    pub fn max_with(&self, other: &Enclosure) -> Enclosure {
        Enclosure::new(
            self.lo.clone().max(other.lo.clone()),
            self.hi.clone().max(other.hi.clone()),
        )
    }

    /// Certified `value <= q`.
    pub fn le_rational(&self, q: &BigRational) -> bool {
        self.hi <= *q
    }

    /// Certified `value > q`.
    pub fn gt_rational(&self, q: &BigRational) -> bool {
        self.lo > *q
    }

    /// Certified `value >= q`.
    pub fn ge_rational(&self, q: &BigRational) -> bool {
        self.lo >= *q
    }

    /// Deterministic ordering key used to pick suprema: by upper bound,
    /// then lower bound.
    pub fn sup_key_cmp(&self, other: &Enclosure) -> Ordering {
        self.hi
            .cmp(&other.hi)
            .then_with(|| self.lo.cmp(&other.lo))
    }

    pub fn approx(&self) -> f64 {
        let mid = (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2));
        mid.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", rational_to_string(&self.lo))
        } else {
            write!(
                f,
                "[{}, {}]",
                rational_to_string(&self.lo),
                rational_to_string(&self.hi)
            )
        }
    }
}

/// Render a rational as `p` or `p/q`.
pub fn rational_to_string(q: &BigRational) -> String {
    if q.is_integer() {
        q.to_integer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parse `p`, `p/q`, or a plain decimal like `1.25` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let err = || Error::Parse {
        kind: "rational",
        input: s.to_string(),
    };
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| err())?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let numer: BigInt = frac.parse().map_err(|_| err())?;
        let denom = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = BigRational::new(numer, denom);
        let int_part = BigRational::from_integer(int);
        return Ok(if negative {
            int_part - frac_part
        } else {
            int_part + frac_part
        });
    }
    let n: BigInt = s.parse().map_err(|_| err())?;
    Ok(BigRational::from_integer(n))
}

/// `2^k` as a rational; `k` may be negative.
pub fn pow2_rational(k: i32) -> BigRational {
    let one = BigInt::one();
    if k >= 0 {
        BigRational::from_integer(one << k as usize)
    } else {
        BigRational::new(one.clone(), one << k.unsigned_abs() as usize)
    }
}
