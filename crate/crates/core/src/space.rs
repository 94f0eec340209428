//! The five space families, their points, and the coarse-density toolkit.
//!
//! All spaces sit inside R, R^2, or R^3 with the maximum norm; distances on
//! rational coordinates are exact rationals, and halfline points carrying
//! certified roots fall back to outward enclosures.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{precision_bits, rational_to_string, Enclosure, ExactReal};
use crate::maps::squares::xk_membership;

/// Identifier of one of the space families.
///
/// * `SquaresHalfline`: `[1, oo)`.
/// * `XkLattice { k }`: the lattice `{ m^(2^-k) : m >= 1 }` inside the
///   halfline (`k` may be negative, giving `{ m^(2^|k|) }`).
/// * `Strip { k }`: `[0, oo) x {0, ..., k}`.
/// * `GridX`: `{ (n^2, r, k) : n >= 1, r >= 0, 1 <= k <= 2n+1 }`.
/// * `GridY`: same with `1 <= k <= 2n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Space {
    SquaresHalfline,
    XkLattice { k: i32 },
    Strip { k: u32 },
    GridX,
    GridY,
}

impl Space {
    pub fn id_string(&self) -> String {
        match self {
            Space::SquaresHalfline => "halfline".into(),
            Space::XkLattice { k } => format!("xk?k={k}"),
            Space::Strip { k } => format!("strip?k={k}"),
            Space::GridX => "gridx".into(),
            Space::GridY => "gridy".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Space> {
        let err = || Error::Parse {
            kind: "space",
            input: s.to_string(),
        };
        match s {
            "halfline" => Ok(Space::SquaresHalfline),
            "gridx" => Ok(Space::GridX),
            "gridy" => Ok(Space::GridY),
            _ => {
                if let Some(rest) = s.strip_prefix("xk?k=") {
                    return Ok(Space::XkLattice {
                        k: rest.parse().map_err(|_| err())?,
                    });
                }
                if let Some(rest) = s.strip_prefix("strip?k=") {
                    return Ok(Space::Strip {
                        k: rest.parse().map_err(|_| err())?,
                    });
                }
                Err(err())
            }
        }
    }

    /// Largest grid label allowed over the thick halfline with index `n`.
    pub fn grid_label_max(&self, n: u64) -> Option<u64> {
        match self {
            Space::GridX => Some(2 * n + 1),
            Space::GridY => Some(2 * n),
            _ => None,
        }
    }

    /// Exact membership test.
    pub fn contains(&self, p: &Point) -> bool {
        match (self, p) {
            (Space::SquaresHalfline, Point::Halfline(v)) => {
                v.cmp_exact(&ExactReal::one()) != Ordering::Less
            }
            (Space::XkLattice { k }, Point::Halfline(v)) => {
                v.cmp_exact(&ExactReal::one()) != Ordering::Less && xk_membership(*k, v)
            }
            (Space::Strip { k }, Point::Strip { r, label }) => {
                !r.is_negative() && *label >= 0 && *label <= *k as i64
            }
            (Space::GridX | Space::GridY, Point::Grid { nsq, r, label }) => {
                let Some(n) = exact_sqrt_u64(*nsq) else {
                    return false;
                };
                if n == 0 || r.is_negative() {
                    return false;
                }
                let max = self.grid_label_max(n).expect("grid space");
                *label >= 1 && u64::from(*label) <= max
            }
            _ => false,
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id_string())
    }
}

fn exact_sqrt_u64(nsq: u64) -> Option<u64> {
    let n = nsq.sqrt();
    (n * n == nsq).then_some(n)
}

/// A point of one of the space families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Point {
    Halfline(ExactReal),
    Strip { r: BigRational, label: i64 },
    Grid { nsq: u64, r: BigRational, label: u32 },
}

impl Point {
    pub fn halfline(v: ExactReal) -> Point {
        Point::Halfline(v)
    }

    pub fn strip(r: BigRational, label: i64) -> Point {
        Point::Strip { r, label }
    }

    /// Grid point addressed by the halfline index `n` (first coordinate `n^2`).
    pub fn grid(n: u64, r: BigRational, label: u32) -> Point {
        Point::Grid {
            nsq: n * n,
            r,
            label,
        }
    }

    pub fn grid_index(&self) -> Option<u64> {
        match self {
            Point::Grid { nsq, .. } => exact_sqrt_u64(*nsq),
            _ => None,
        }
    }

    fn variant_rank(&self) -> u8 {
        match self {
            Point::Halfline(_) => 0,
            Point::Strip { .. } => 1,
            Point::Grid { .. } => 2,
        }
    }
}

impl PartialOrd for Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic point order; used for deterministic section choices and
/// tie-breaking.
impl Ord for Point {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Point::Halfline(a), Point::Halfline(b)) => a.cmp_exact(b),
            (Point::Strip { r: r1, label: l1 }, Point::Strip { r: r2, label: l2 }) => {
                r1.cmp(r2).then(l1.cmp(l2))
            }
            (
                Point::Grid {
                    nsq: n1,
                    r: r1,
                    label: l1,
                },
                Point::Grid {
                    nsq: n2,
                    r: r2,
                    label: l2,
                },
            ) => n1.cmp(n2).then_with(|| r1.cmp(r2)).then(l1.cmp(l2)),
            _ => self.variant_rank().cmp(&other.variant_rank()),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Halfline(v) => write!(f, "{v}"),
            Point::Strip { r, label } => write!(f, "({}, {})", rational_to_string(r), label),
            Point::Grid { nsq, r, label } => {
                write!(f, "({}, {}, {})", nsq, rational_to_string(r), label)
            }
        }
    }
}

fn check_in_space(p: &Point, space: &Space) -> Result<()> {
    if space.contains(p) {
        Ok(())
    } else {
        Err(Error::NotInSpace {
            point: p.to_string(),
            space: space.to_string(),
        })
    }
}

/// Maximum-norm distance between two points of `space`.
///
/// Exact whenever both points have rational coordinates; halfline points
/// with certified roots produce an outward enclosure.
pub fn dist(p: &Point, q: &Point, space: &Space) -> Result<Enclosure> {
    check_in_space(p, space)?;
    check_in_space(q, space)?;
    dist_unchecked(p, q)
}

pub(crate) fn dist_unchecked(p: &Point, q: &Point) -> Result<Enclosure> {
    match (p, q) {
        (Point::Halfline(a), Point::Halfline(b)) => {
            Ok(a.abs_diff(b, precision_bits()))
        }
        (Point::Strip { r: r1, label: l1 }, Point::Strip { r: r2, label: l2 }) => {
            let dr = (r1 - r2).abs();
            let dl = BigRational::from_integer(BigInt::from((l1 - l2).abs()));
            Ok(Enclosure::exact(dr.max(dl)))
        }
        (
            Point::Grid {
                nsq: n1,
                r: r1,
                label: l1,
            },
            Point::Grid {
                nsq: n2,
                r: r2,
                label: l2,
            },
        ) => {
            let dn = BigRational::from_integer(BigInt::from(n1.abs_diff(*n2)));
            let dr = (r1 - r2).abs();
            let dl = BigRational::from_integer(BigInt::from(l1.abs_diff(*l2)));
            Ok(Enclosure::exact(dn.max(dr).max(dl)))
        }
        _ => Err(Error::VariantMismatch(format!("{p} vs {q}"))),
    }
}

/// A chain `p = y_0, ..., y_n = q` with unit steps, `n = ceil(dist(p, q))`.
///
/// The real coordinate is interpolated affinely and integer labels by
/// floored interpolation. Defined within one strip space or one thick
/// halfline of a grid space (fixed first coordinate).
pub fn unit_chain(p: &Point, q: &Point, space: &Space) -> Result<Vec<Point>> {
    check_in_space(p, space)?;
    check_in_space(q, space)?;
    let d = dist_unchecked(p, q)?;
    if !d.is_exact() {
        return Err(Error::Precision(
            "unit chains need rational coordinates".into(),
        ));
    }
    let n = d.hi().ceil().to_integer();
    let n = n.to_usize().ok_or_else(|| {
        Error::InvalidWindow("chain length does not fit in usize".into())
    })?;
    if n == 0 {
        return Ok(vec![p.clone()]);
    }
    let nq = BigRational::from_integer(BigInt::from(n));
    let interp = |a: &BigRational, b: &BigRational, i: usize| -> BigRational {
        let i = BigRational::from_integer(BigInt::from(i));
        (a * (&nq - &i) + b * &i) / &nq
    };
    match (p, q) {
        (Point::Strip { r: r1, label: l1 }, Point::Strip { r: r2, label: l2 }) => {
            let mut chain = Vec::with_capacity(n + 1);
            for i in 0..=n {
                let r = interp(r1, r2, i);
                let l = interp(
                    &BigRational::from_integer(BigInt::from(*l1)),
                    &BigRational::from_integer(BigInt::from(*l2)),
                    i,
                )
                .floor()
                .to_integer()
                .to_i64()
                .expect("label fits");
                chain.push(Point::strip(r, l));
            }
            Ok(chain)
        }
        (
            Point::Grid {
                nsq: n1,
                r: r1,
                label: l1,
            },
            Point::Grid {
                nsq: n2,
                r: r2,
                label: l2,
            },
        ) => {
            if n1 != n2 {
                return Err(Error::Disconnected(format!(
                    "grid points on different thick halflines: {n1} vs {n2}"
                )));
            }
            let mut chain = Vec::with_capacity(n + 1);
            for i in 0..=n {
                let r = interp(r1, r2, i);
                let l = interp(
                    &BigRational::from_integer(BigInt::from(*l1)),
                    &BigRational::from_integer(BigInt::from(*l2)),
                    i,
                )
                .floor()
                .to_integer()
                .to_u32()
                .expect("label fits");
                chain.push(Point::Grid {
                    nsq: *n1,
                    r,
                    label: l,
                });
            }
            Ok(chain)
        }
        _ => Err(Error::VariantMismatch(format!(
            "unit chains are defined on strips and thick halflines, got {p} vs {q}"
        ))),
    }
}

/// A finite sampling window: closed rational boxes with a rational step
/// that divides the interval lengths exactly.
#[derive(Clone, Debug, PartialEq)]
pub enum Window {
    Halfline {
        lo: BigRational,
        hi: BigRational,
        step: BigRational,
    },
    Strip {
        r_lo: BigRational,
        r_hi: BigRational,
        step: BigRational,
        /// Optional clamp on the labels, intersected with the space range.
        labels: Option<(i64, i64)>,
    },
    Grid {
        n_lo: u64,
        n_hi: u64,
        r_lo: BigRational,
        r_hi: BigRational,
        step: BigRational,
        labels: Option<(u64, u64)>,
    },
}

/// Upper bound on lattice enumerations inside one window.
const LATTICE_SAMPLE_LIMIT: u64 = 1 << 20;

impl Window {
    pub fn halfline(lo: BigRational, hi: BigRational, step: BigRational) -> Result<Window> {
        let w = Window::Halfline { lo, hi, step };
        w.validate()?;
        Ok(w)
    }

    pub fn strip(r_hi: BigRational, step: BigRational) -> Result<Window> {
        let w = Window::Strip {
            r_lo: BigRational::zero(),
            r_hi,
            step,
            labels: None,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn grid(n_lo: u64, n_hi: u64, r_hi: BigRational, step: BigRational) -> Result<Window> {
        let w = Window::Grid {
            n_lo,
            n_hi,
            r_lo: BigRational::zero(),
            r_hi,
            step,
            labels: None,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let check_interval =
            |lo: &BigRational, hi: &BigRational, step: &BigRational| -> Result<()> {
                if lo > hi {
                    return Err(Error::InvalidWindow(format!(
                        "lower bound {} exceeds upper bound {}",
                        rational_to_string(lo),
                        rational_to_string(hi)
                    )));
                }
                if !step.is_positive() {
                    return Err(Error::InvalidWindow("step must be positive".into()));
                }
                if !((hi - lo) / step).is_integer() {
                    return Err(Error::InvalidWindow(format!(
                        "step {} does not divide the interval [{}, {}]",
                        rational_to_string(step),
                        rational_to_string(lo),
                        rational_to_string(hi)
                    )));
                }
                Ok(())
            };
        match self {
            Window::Halfline { lo, hi, step } => check_interval(lo, hi, step),
            Window::Strip {
                r_lo, r_hi, step, ..
            } => check_interval(r_lo, r_hi, step),
            Window::Grid {
                n_lo,
                n_hi,
                r_lo,
                r_hi,
                step,
                ..
            } => {
                if n_lo > n_hi || *n_lo == 0 {
                    return Err(Error::InvalidWindow(format!(
                        "grid index range [{n_lo}, {n_hi}] is empty or starts at 0"
                    )));
                }
                check_interval(r_lo, r_hi, step)
            }
        }
    }

    /// Radius used when reporting closeness trends. For grid windows this
    /// is the real-coordinate extent: nesting grows that coordinate while
    /// the index range stays fixed.
    pub fn radius(&self) -> BigRational {
        match self {
            Window::Halfline { hi, .. } => hi.clone(),
            Window::Strip { r_hi, .. } => r_hi.clone(),
            Window::Grid { r_hi, .. } => r_hi.clone(),
        }
    }

    /// Same window with the real-coordinate range extended to contain
    /// `target` (snapped up to the step grid).
    pub fn covering_r(&self, target: &BigRational) -> Result<Window> {
        let stretch = |lo: &BigRational, hi: &BigRational, step: &BigRational| {
            if target <= hi {
                hi.clone()
            } else {
                let steps = ((target - lo) / step).ceil();
                lo + steps * step
            }
        };
        let w = match self {
            Window::Halfline { lo, hi, step } => Window::Halfline {
                lo: lo.clone(),
                hi: stretch(lo, hi, step),
                step: step.clone(),
            },
            Window::Strip {
                r_lo,
                r_hi,
                step,
                labels,
            } => Window::Strip {
                r_lo: r_lo.clone(),
                r_hi: stretch(r_lo, r_hi, step),
                step: step.clone(),
                labels: *labels,
            },
            Window::Grid {
                n_lo,
                n_hi,
                r_lo,
                r_hi,
                step,
                labels,
            } => Window::Grid {
                n_lo: *n_lo,
                n_hi: *n_hi,
                r_lo: r_lo.clone(),
                r_hi: stretch(r_lo, r_hi, step),
                step: step.clone(),
                labels: *labels,
            },
        };
        w.validate()?;
        Ok(w)
    }

    /// Same window with the real-coordinate range scaled by `num/den`,
    /// snapped down to a multiple of the step.
    pub fn with_scaled_radius(&self, num: u32, den: u32) -> Result<Window> {
        let scale = BigRational::new(BigInt::from(num), BigInt::from(den));
        let snap = |lo: &BigRational, hi: &BigRational, step: &BigRational| {
            let span = (hi - lo) * &scale;
            let steps = (&span / step).floor();
            lo + steps * step
        };
        let w = match self {
            Window::Halfline { lo, hi, step } => Window::Halfline {
                lo: lo.clone(),
                hi: snap(lo, hi, step).max(lo + step),
                step: step.clone(),
            },
            Window::Strip {
                r_lo,
                r_hi,
                step,
                labels,
            } => Window::Strip {
                r_lo: r_lo.clone(),
                r_hi: snap(r_lo, r_hi, step).max(r_lo + step),
                step: step.clone(),
                labels: *labels,
            },
            Window::Grid {
                n_lo,
                n_hi,
                r_lo,
                r_hi,
                step,
                labels,
            } => Window::Grid {
                n_lo: *n_lo,
                n_hi: *n_hi,
                r_lo: r_lo.clone(),
                r_hi: snap(r_lo, r_hi, step).max(r_lo + step),
                step: step.clone(),
                labels: *labels,
            },
        };
        w.validate()?;
        Ok(w)
    }

    /// `count` windows with geometrically growing radii, the last being
    /// `self`. Fails when the window is too small for that many strictly
    /// nested sample grids.
    pub fn nested(&self, count: u32) -> Result<Vec<Window>> {
        let mut out: Vec<Window> = Vec::new();
        for i in (0..count).rev() {
            let den = 1u32 << i;
            let w = self.with_scaled_radius(1, den)?;
            if let Some(prev) = out.last() {
                if prev.radius() >= w.radius() {
                    return Err(Error::InvalidWindow(format!(
                        "window {} is too small to nest {count} times",
                        self.describe()
                    )));
                }
            }
            out.push(w);
        }
        Ok(out)
    }

    pub fn describe(&self) -> String {
        match self {
            Window::Halfline { lo, hi, step } => format!(
                "x:[{},{}]:{}",
                rational_to_string(lo),
                rational_to_string(hi),
                rational_to_string(step)
            ),
            Window::Strip {
                r_lo,
                r_hi,
                step,
                labels,
            } => {
                let l = labels
                    .map(|(a, b)| format!(";j:[{a},{b}]"))
                    .unwrap_or_default();
                format!(
                    "r:[{},{}]:{}{}",
                    rational_to_string(r_lo),
                    rational_to_string(r_hi),
                    rational_to_string(step),
                    l
                )
            }
            Window::Grid {
                n_lo,
                n_hi,
                r_lo,
                r_hi,
                step,
                labels,
            } => {
                let l = labels
                    .map(|(a, b)| format!(";k:[{a},{b}]"))
                    .unwrap_or_default();
                format!(
                    "n:[{n_lo},{n_hi}];r:[{},{}]:{}{}",
                    rational_to_string(r_lo),
                    rational_to_string(r_hi),
                    rational_to_string(step),
                    l
                )
            }
        }
    }

    fn real_samples(lo: &BigRational, hi: &BigRational, step: &BigRational) -> Vec<BigRational> {
        let count = ((hi - lo) / step)
            .to_integer()
            .to_u64()
            .expect("validated window");
        (0..=count)
            .map(|i| lo + step * BigRational::from_integer(BigInt::from(i)))
            .collect()
    }

    /// The deterministic sample set of this window inside `space`.
    pub fn samples(&self, space: &Space) -> Result<Vec<Point>> {
        self.validate()?;
        match (self, space) {
            (Window::Halfline { lo, hi, step }, Space::SquaresHalfline) => {
                Ok(Self::real_samples(lo, hi, step)
                    .into_iter()
                    .map(|q| Point::halfline(ExactReal::from_rational(q)))
                    .collect())
            }
            (Window::Halfline { lo, hi, .. }, Space::XkLattice { k }) => {
                lattice_samples(*k, lo, hi)
            }
            (
                Window::Strip {
                    r_lo,
                    r_hi,
                    step,
                    labels,
                },
                Space::Strip { k },
            ) => {
                let (l_lo, l_hi) = match labels {
                    Some((a, b)) => ((*a).max(0), (*b).min(*k as i64)),
                    None => (0, *k as i64),
                };
                let mut out = Vec::new();
                for r in Self::real_samples(r_lo, r_hi, step) {
                    for l in l_lo..=l_hi {
                        out.push(Point::strip(r.clone(), l));
                    }
                }
                Ok(out)
            }
            (
                Window::Grid {
                    n_lo,
                    n_hi,
                    r_lo,
                    r_hi,
                    step,
                    labels,
                },
                Space::GridX | Space::GridY,
            ) => {
                let rs = Self::real_samples(r_lo, r_hi, step);
                let mut out = Vec::new();
                for n in *n_lo..=*n_hi {
                    let max = space.grid_label_max(n).expect("grid space");
                    let (l_lo, l_hi) = match labels {
                        Some((a, b)) => ((*a).max(1), (*b).min(max)),
                        None => (1, max),
                    };
                    for r in &rs {
                        for l in l_lo..=l_hi {
                            out.push(Point::Grid {
                                nsq: n * n,
                                r: r.clone(),
                                label: l as u32,
                            });
                        }
                    }
                }
                Ok(out)
            }
            _ => Err(Error::SpaceMismatch(format!(
                "window {} cannot sample {}",
                self.describe(),
                space
            ))),
        }
    }
}

/// Enumerate the lattice `{ m^(2^-k) }` inside `[lo, hi]`.
fn lattice_samples(k: i32, lo: &BigRational, hi: &BigRational) -> Result<Vec<Point>> {
    if hi < lo {
        return Err(Error::InvalidWindow("empty lattice window".into()));
    }
    if k <= 0 {
        // Values are m^(2^|k|): enumerate m from the root of the lower
        // bound while the power stays <= hi.
        let j = k.unsigned_abs();
        let mut out = Vec::new();
        let lo_int = lo.floor().to_integer().max(BigInt::one());
        let mut m = lo_int
            .to_biguint()
            .expect("positive")
            .nth_root(1u32 << j.min(16))
            .max(BigUint::one());
        let mut iterations = 0u64;
        loop {
            let v = ExactReal::root(m.clone(), j as i32)?;
            let q = v.as_rational().expect("integer power");
            if q > hi {
                break;
            }
            if q >= lo {
                out.push(Point::halfline(v));
            }
            m += BigUint::one();
            iterations += 1;
            if iterations > LATTICE_SAMPLE_LIMIT {
                return Err(Error::InvalidWindow(
                    "lattice window produces too many samples".into(),
                ));
            }
        }
        Ok(out)
    } else {
        // Values are m^(2^-k) for m in [lo^(2^k), hi^(2^k)].
        let lo_m = crate::exact::pow2k_rational(lo, k as u32)?.ceil().to_integer();
        let hi_m = crate::exact::pow2k_rational(hi, k as u32)?.floor().to_integer();
        let lo_m = lo_m.max(BigInt::one());
        let count = (&hi_m - &lo_m).to_u64().unwrap_or(0);
        if count > LATTICE_SAMPLE_LIMIT {
            return Err(Error::InvalidWindow(
                "lattice window produces too many samples".into(),
            ));
        }
        let mut out = Vec::new();
        let mut m = lo_m;
        while m <= hi_m {
            let v = ExactReal::root(m.to_biguint().expect("positive"), -k)?;
            out.push(Point::halfline(v));
            m += 1;
        }
        Ok(out)
    }
}

/// Search a one-dimensional window for a point farther than `c` from every
/// element of `a`; `None` means the `c`-neighborhood of `a` covers the
/// window. Comparisons are exact rational arithmetic.
///
/// The witness is deterministic: the midpoint of the leftmost uncovered gap.
pub fn density_witness(
    a: &[ExactReal],
    window: &Window,
    c: &BigRational,
) -> Result<Option<Point>> {
    let Window::Halfline { lo, hi, .. } = window else {
        return Err(Error::InvalidWindow(
            "density witnesses need a one-dimensional window".into(),
        ));
    };
    if lo > hi {
        return Err(Error::InvalidWindow("empty window".into()));
    }
    if c.is_negative() {
        return Err(Error::Domain("neighborhood radius must be >= 0".into()));
    }
    let mut values: Vec<BigRational> = Vec::with_capacity(a.len());
    for v in a {
        match v.as_rational() {
            Some(q) => values.push(q.clone()),
            None => {
                return Err(Error::Precision(format!(
                    "density check needs rational lattice points, got {v}"
                )))
            }
        }
    }
    values.sort();
    values.dedup();
    let two = BigRational::from_integer(BigInt::from(2));
    let witness = |q: BigRational| Some(Point::halfline(ExactReal::from_rational(q)));
    // Sweep the closed covering intervals [v - c, v + c] left to right;
    // `covered_to` is the supremum of the merged coverage seen so far.
    // Uncovered gaps are open at covered endpoints, so midpoints keep the
    // strict distance > c.
    let mut covered_to: Option<BigRational> = None;
    for v in &values {
        let start = v - c;
        let end = v + c;
        let gap_lo = covered_to.clone().unwrap_or_else(|| lo.clone()).max(lo.clone());
        if start > gap_lo {
            let gap_hi = start.min(hi.clone());
            if gap_hi > gap_lo || (covered_to.is_none() && gap_hi == gap_lo) {
                return Ok(witness((gap_lo + gap_hi) / &two));
            }
        }
        covered_to = Some(match covered_to {
            Some(cur) => cur.max(end),
            None => end,
        });
        if covered_to.as_ref().expect("just set") >= hi {
            return Ok(None);
        }
    }
    match covered_to {
        None => Ok(witness((lo + hi) / &two)),
        Some(cur) if cur < *hi => Ok(witness((cur.max(lo.clone()) + hi) / &two)),
        Some(_) => Ok(None),
    }
}

/// Result of a neighborhood covering check.
#[derive(Clone, Debug)]
pub struct CoverCheck {
    pub covered: bool,
    /// First target point (in input order) farther than `b` from `a`.
    pub first_failing: Option<Point>,
    /// Target point at maximal distance from `a` (the farthest witness).
    pub witness: Option<Point>,
    pub witness_distance: Option<Enclosure>,
}

/// Nearest-point index over a homogeneous point set: points are grouped by
/// their discrete coordinates and the real coordinate is kept sorted, so a
/// min-distance query expands outward from the target label instead of
/// scanning the whole set.
/// Sorted labels of one thick halfline, each with its sorted real values.
type LabelBlocks = Vec<(i64, Vec<BigRational>)>;

enum NearestIndex {
    Halfline(Vec<ExactReal>),
    /// Per first coordinate: sorted labels with their sorted real values.
    Grouped(Vec<(u64, LabelBlocks)>),
}

impl NearestIndex {
    fn build(points: &[Point]) -> Result<NearestIndex> {
        match points.first() {
            None => Err(Error::Domain("covering set is empty".into())),
            Some(Point::Halfline(_)) => {
                let mut values = Vec::with_capacity(points.len());
                for p in points {
                    let Point::Halfline(v) = p else {
                        return Err(Error::VariantMismatch(p.to_string()));
                    };
                    values.push(v.clone());
                }
                values.sort_by(|x, y| x.cmp_exact(y));
                Ok(NearestIndex::Halfline(values))
            }
            Some(_) => {
                let mut groups: std::collections::BTreeMap<(u64, i64), Vec<BigRational>> =
                    std::collections::BTreeMap::new();
                for p in points {
                    let (key, r) = match p {
                        Point::Strip { r, label } => ((0u64, *label), r.clone()),
                        Point::Grid { nsq, r, label } => ((*nsq, *label as i64), r.clone()),
                        Point::Halfline(_) => {
                            return Err(Error::VariantMismatch(p.to_string()))
                        }
                    };
                    groups.entry(key).or_default().push(r);
                }
                let mut blocks: Vec<(u64, LabelBlocks)> = Vec::new();
                for ((nsq, label), mut rs) in groups {
                    rs.sort();
                    match blocks.last_mut() {
                        Some((cur, labels)) if *cur == nsq => labels.push((label, rs)),
                        _ => blocks.push((nsq, vec![(label, rs)])),
                    }
                }
                Ok(NearestIndex::Grouped(blocks))
            }
        }
    }

    /// Smallest `|r - v|` over a sorted slice.
    fn nearest_in_sorted(rs: &[BigRational], r: &BigRational) -> BigRational {
        let idx = rs.partition_point(|v| v < r);
        let mut best: Option<BigRational> = None;
        if idx < rs.len() {
            best = Some((&rs[idx] - r).abs());
        }
        if idx > 0 {
            let d = (r - &rs[idx - 1]).abs();
            best = Some(match best {
                None => d,
                Some(cur) => cur.min(d),
            });
        }
        best.expect("nonempty group")
    }

    fn min_distance(&self, t: &Point) -> Result<Enclosure> {
        match (self, t) {
            (NearestIndex::Halfline(values), Point::Halfline(v)) => {
                let idx = values.partition_point(|x| x.cmp_exact(v) == Ordering::Less);
                let mut best: Option<Enclosure> = None;
                for cand in [idx.checked_sub(1), Some(idx)].into_iter().flatten() {
                    if let Some(x) = values.get(cand) {
                        let d = x.abs_diff(v, crate::exact::precision_bits());
                        let better = match &best {
                            None => true,
                            Some(cur) => d.sup_key_cmp(cur) == Ordering::Less,
                        };
                        if better {
                            best = Some(d);
                        }
                    }
                }
                Ok(best.expect("nonempty index"))
            }
            (NearestIndex::Grouped(blocks), _) => {
                let (tn, tl, tr) = match t {
                    Point::Strip { r, label } => (0u64, *label, r),
                    Point::Grid { nsq, r, label } => (*nsq, *label as i64, r),
                    Point::Halfline(_) => {
                        return Err(Error::VariantMismatch(t.to_string()))
                    }
                };
                let mut best: Option<BigRational> = None;
                // Ceiling of the current best: integer bases at or above it
                // cannot improve the minimum.
                let mut best_ceil = u64::MAX;
                for (gn, labels) in blocks {
                    let dn = gn.abs_diff(tn);
                    if dn >= best_ceil {
                        continue;
                    }
                    // Expand outward from the target label; the nearer side
                    // is always visited first, so once its base distance
                    // reaches the current best both sides are exhausted.
                    let idx = labels.partition_point(|(l, _)| *l < tl);
                    let mut left = idx as isize - 1;
                    let mut right = idx;
                    loop {
                        let dl_left =
                            (left >= 0).then(|| (tl - labels[left as usize].0).unsigned_abs());
                        let dl_right = (right < labels.len())
                            .then(|| (labels[right].0 - tl).unsigned_abs());
                        let (i, dl, from_left) = match (dl_left, dl_right) {
                            (None, None) => break,
                            (Some(dl), None) => (left as usize, dl, true),
                            (None, Some(dr)) => (right, dr, false),
                            (Some(dl), Some(dr)) => {
                                if dl <= dr {
                                    (left as usize, dl, true)
                                } else {
                                    (right, dr, false)
                                }
                            }
                        };
                        let base = dn.max(dl);
                        if base >= best_ceil {
                            break;
                        }
                        let dr = Self::nearest_in_sorted(&labels[i].1, tr);
                        let base_rat = BigRational::from_integer(BigInt::from(base));
                        let d = base_rat.max(dr);
                        let improves = match &best {
                            None => true,
                            Some(cur) => &d < cur,
                        };
                        if improves {
                            best_ceil = d.ceil().to_integer().to_u64().unwrap_or(u64::MAX);
                            best = Some(d);
                        }
                        if from_left {
                            left -= 1;
                        } else {
                            right += 1;
                        }
                    }
                }
                Ok(Enclosure::exact(best.expect("nonempty index")))
            }
            _ => Err(Error::VariantMismatch(t.to_string())),
        }
    }
}

/// Does the `b`-neighborhood of `a` contain every point of `target`?
pub fn neighborhood_cover_check(
    a: &[Point],
    target: &[Point],
    b: &BigRational,
    space: &Space,
) -> Result<CoverCheck> {
    if b.is_negative() {
        return Err(Error::Domain("neighborhood radius must be >= 0".into()));
    }
    for p in a.iter().chain(target.iter()) {
        check_in_space(p, space)?;
    }
    let index = NearestIndex::build(a)?;
    let mut first_failing = None;
    let mut witness: Option<(Point, Enclosure)> = None;
    for t in target {
        let best = index.min_distance(t)?;
        if !best.le_rational(b) {
            if !best.gt_rational(b) {
                return Err(Error::Precision(format!(
                    "cannot decide covering at {t}: distance enclosure {best} straddles {}",
                    rational_to_string(b)
                )));
            }
            if first_failing.is_none() {
                first_failing = Some(t.clone());
            }
        }
        let update = match &witness {
            None => true,
            Some((_, cur)) => best.sup_key_cmp(cur) == Ordering::Greater,
        };
        if update {
            witness = Some((t.clone(), best));
        }
    }
    let covered = first_failing.is_none();
    let (witness, witness_distance) = match witness {
        Some((p, d)) => (Some(p), Some(d)),
        None => (None, None),
    };
    Ok(CoverCheck {
        covered,
        first_failing,
        witness,
        witness_distance,
    })
}
