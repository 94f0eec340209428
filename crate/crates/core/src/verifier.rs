//! Theorem-level scenarios: each binds the map constructions to the coarse
//! checks and emits a machine-readable report with one verdict per claim.
//!
//! Non-conjugacy statements quantify over all coarse equivalences and are
//! not desk-checkable as stated; scenarios instead verify every premise the
//! corresponding proof consumes (premise certificates), exactly.

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::coarse::{coarse_inverse_check, non_controlled_witness, sup_distance};
use crate::error::{Error, Result};
use crate::exact::{pow2_rational, pow2k_rational, rational_to_string, Enclosure, ExactReal};
use crate::maps::squares::{squares_eval, squares_pow, xk_membership, SquaresMap};
use crate::maps::strip::{g_pow_exponent, strip_pow_closed, StripMap, StripPowForm};
use crate::maps::CoarseMapSpec;
use crate::report::{enclosure_json, point_json, rational_json};
use crate::space::{density_witness, neighborhood_cover_check, Point, Space, Window};

/// Claim anchors: stable labels tying each verdict to the statement it
/// checks.
pub mod anchors {
    pub const SQUARES_THM: &str = "thm:squares";
    pub const SQUARES_CLOSENESS: &str = "eq:closeness-ceil";
    pub const SQUARES_IMAGE: &str = "eq:imageF";
    pub const SQUARES_DENSITY: &str = "eq:imageF2";
    pub const SQUARES_INTERTWINE: &str = "rem:intertwining";
    pub const STRIPS_THM: &str = "thm:invertible";
    pub const STRIPS_CYCLE: &str = "eq:x";
    pub const STRIPS_CYCLE_F: &str = "eq:y";
    pub const STRIPS_MORE: &str = "cor:moreNonConjugacies";
    pub const STRIPS_ALL_N: &str = "thm:asdf";
    pub const QWERTY: &str = "prop:qwerty";
    pub const QWERTY_UPPER: &str = "eq:contradiction-part-1a";
    pub const QWERTY_LOWER: &str = "eq:contradiction-part-2a";
    pub const GRID_HYPOTHESIS: &str = "lem:hypothesis";
    pub const SECTION: &str = "prop:surjective-conjecture";
    pub const SPLIT: &str = "lem:lemma-split";
    pub const INCREASING: &str = "lem:increasing-lemma";
    pub const NON_DECREASING: &str = "lem:non-decreasing-lemma";
    pub const DISJOINT: &str = "thm:disjointTheorem";
}

/// Registered scenario identifiers with their primary anchors.
pub fn scenario_catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        ("squares", "thm (thm:squares)"),
        ("strips", "thm (invertible), thm (asdf)"),
        ("qwerty", "Proposition (qwerty)"),
        ("grid", "Lemma (hypothesis)"),
        ("decompose", "Theorem (disjointTheorem), Lemma (lemma-split)"),
        ("section", "Proposition (surjective-conjecture), Theorem A"),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        }
    }
}

/// One checked claim inside a scenario report.
#[derive(Clone, Debug)]
pub struct Claim {
    pub id: String,
    pub anchor: String,
    pub verdict: Verdict,
    pub witness: Option<Value>,
    pub bound: Option<f64>,
}

impl Claim {
    pub fn pass(id: &str, anchor: &str) -> Claim {
        Claim {
            id: id.into(),
            anchor: anchor.into(),
            verdict: Verdict::Pass,
            witness: None,
            bound: None,
        }
    }

    /// Failures always carry a concrete witness.
    pub fn fail(id: &str, anchor: &str, witness: Value) -> Claim {
        Claim {
            id: id.into(),
            anchor: anchor.into(),
            verdict: Verdict::Fail,
            witness: Some(witness),
            bound: None,
        }
    }

    pub fn with_bound(mut self, bound: f64) -> Claim {
        self.bound = Some(bound);
        self
    }

    pub fn with_witness(mut self, witness: Value) -> Claim {
        self.witness = Some(witness);
        self
    }

    pub fn of(id: &str, anchor: &str, ok: bool, witness: Value) -> Claim {
        if ok {
            Claim::pass(id, anchor)
        } else {
            Claim::fail(id, anchor, witness)
        }
    }
}

/// Machine-readable outcome of one scenario run.
#[derive(Clone, Debug)]
pub struct ScenarioReport {
    pub scenario: String,
    pub params: Value,
    pub claims: Vec<Claim>,
    pub runtime_ms: u64,
}

impl ScenarioReport {
    fn new(scenario: &str, params: Value) -> ScenarioReport {
        ScenarioReport {
            scenario: scenario.into(),
            params,
            claims: Vec::new(),
            runtime_ms: 0,
        }
    }

    fn finish(mut self, start: Instant) -> ScenarioReport {
        self.runtime_ms = start.elapsed().as_millis() as u64;
        self
    }

    pub fn all_pass(&self) -> bool {
        self.claims.iter().all(|c| c.verdict == Verdict::Pass)
    }
}

fn scaled_pow2(n: i32) -> f64 {
    pow2_rational(n).to_f64().unwrap_or(f64::NAN)
}

/// Closeness and image structure of the halfline family.
///
/// For `n <= k` the iterates stay within `2^(n-k)` of the pure squaring
/// iterate at every sample; for `n > k` every image carries a lattice
/// certificate and the lattice has arbitrarily deep density gaps.
pub fn scenario_squares(k: u32, n: u32, window: &Window) -> Result<ScenarioReport> {
    let start = Instant::now();
    if k < 1 || n < 1 {
        return Err(Error::Domain("squares scenario needs k >= 1 and n >= 1".into()));
    }
    let params = json!({
        "k": k,
        "n": n,
        "window": window.describe(),
        "norm": "max",
    });
    let mut report = ScenarioReport::new("squares", params);
    let samples = window.samples(&Space::SquaresHalfline)?;
    if n <= k {
        let bound = pow2_rational(n as i32 - k as i32);
        let tolerance = &bound + pow2_rational(-64);
        let mut lower_failure: Option<Value> = None;
        let mut upper_failure: Option<Value> = None;
        let mut sup = Enclosure::zero();
        let mut sup_witness: Option<Point> = None;
        for p in &samples {
            let Point::Halfline(x) = p else { unreachable!() };
            let fx = squares_pow(k, n, x)?;
            let gx = ExactReal::from_rational(pow2k_rational(
                x.as_rational().expect("rational samples"),
                n,
            )?);
            if lower_failure.is_none() && fx.cmp_exact(&gx) == std::cmp::Ordering::Less {
                lower_failure = Some(json!({
                    "x": point_json(p),
                    "f": fx.to_string(),
                    "g": gx.to_string(),
                }));
            }
            let limit = ExactReal::from_rational(gx.as_rational().expect("rational") + &tolerance);
            if upper_failure.is_none() && fx.cmp_exact(&limit) == std::cmp::Ordering::Greater {
                upper_failure = Some(json!({
                    "x": point_json(p),
                    "f": fx.to_string(),
                    "allowed": limit.to_string(),
                }));
            }
            let diff = fx.abs_diff(&gx, crate::exact::precision_bits());
            if sup_witness.is_none()
                || diff.sup_key_cmp(&sup) == std::cmp::Ordering::Greater
            {
                sup = diff;
                sup_witness = Some(p.clone());
            }
        }
        report.claims.push(
            Claim::of(
                "closeness-lower",
                anchors::SQUARES_THM,
                lower_failure.is_none(),
                lower_failure.unwrap_or(Value::Null),
            )
            .with_bound(0.0),
        );
        let sup_json = json!({
            "sup": enclosure_json(&sup),
            "argmax": sup_witness.as_ref().map(point_json),
        });
        report.claims.push(
            Claim::of(
                "closeness-upper",
                anchors::SQUARES_CLOSENESS,
                upper_failure.is_none(),
                upper_failure.unwrap_or(Value::Null),
            )
            .with_bound(scaled_pow2(n as i32 - k as i32))
            .with_witness(sup_json),
        );
        // The lattice retraction intertwines the iterates exactly.
        let mut intertwine_failure: Option<Value> = None;
        for p in &samples {
            let Point::Halfline(x) = p else { unreachable!() };
            let fx = squares_pow(k, n, x)?;
            let lhs = squares_eval(&SquaresMap::Phi { k }, &fx)?;
            let proj = squares_eval(&SquaresMap::Phi { k }, x)?;
            let rhs = proj.pow2k(n as i32)?;
            if lhs != rhs {
                intertwine_failure = Some(json!({
                    "x": point_json(p),
                    "lhs": lhs.to_string(),
                    "rhs": rhs.to_string(),
                }));
                break;
            }
        }
        report.claims.push(Claim::of(
            "conjugation-identity",
            anchors::SQUARES_INTERTWINE,
            intertwine_failure.is_none(),
            intertwine_failure.unwrap_or(Value::Null),
        ));
    } else {
        // Image certificates: every sampled image lies in the lattice.
        let lattice_k = k as i32 - n as i32;
        let mut membership_failure: Option<Value> = None;
        let mut max_image = BigRational::one();
        for p in &samples {
            let Point::Halfline(x) = p else { unreachable!() };
            let fx = squares_pow(k, n, x)?;
            if !xk_membership(lattice_k, &fx) {
                membership_failure = Some(json!({
                    "x": point_json(p),
                    "image": fx.to_string(),
                }));
                break;
            }
            if let Some(q) = fx.as_rational() {
                if q > &max_image {
                    max_image = q.clone();
                }
            }
        }
        report.claims.push(Claim::of(
            "image-lattice",
            anchors::SQUARES_IMAGE,
            membership_failure.is_none(),
            membership_failure.unwrap_or(Value::Null),
        ));
        // Density gaps: the image lattice misses points of the halfline by
        // more than C, for every C in the schedule. The lattice gaps grow
        // without bound, so the search window is extended (if necessary)
        // until it contains a gap wider than 2 * C_max.
        let (Window::Halfline { lo, hi, .. },) = (window,) else {
            unreachable!("samples() accepted the window")
        };
        let c_max = 10u32;
        let gap_target = BigRational::from_integer(BigInt::from(2 * c_max + 1));
        let mut search_hi = hi.ceil();
        loop {
            let lattice_window = Window::halfline(
                BigRational::one(),
                search_hi.clone(),
                BigRational::one(),
            )?;
            let points = lattice_window.samples(&Space::XkLattice { k: lattice_k })?;
            let widest = points
                .windows(2)
                .filter_map(|w| match (&w[0], &w[1]) {
                    (Point::Halfline(a), Point::Halfline(b)) => {
                        Some(b.as_rational()? - a.as_rational()?)
                    }
                    _ => None,
                })
                .max();
            if widest.map(|g| g > gap_target).unwrap_or(false) {
                break;
            }
            search_hi *= BigRational::from_integer(BigInt::from(2));
        }
        let span = &search_hi - lo;
        let search_step = if span.is_zero() { BigRational::one() } else { span };
        let search_window = Window::halfline(lo.clone(), search_hi.clone(), search_step)?;
        let lattice_window = Window::halfline(
            BigRational::one(),
            &search_hi + BigRational::from_integer(BigInt::from(c_max + 1)),
            BigRational::one(),
        )?;
        let lattice_points = lattice_window.samples(&Space::XkLattice { k: lattice_k })?;
        let lattice_values: Vec<ExactReal> = lattice_points
            .iter()
            .map(|p| match p {
                Point::Halfline(v) => v.clone(),
                _ => unreachable!(),
            })
            .collect();
        for c in 1..=c_max {
            let c_rat = BigRational::from_integer(BigInt::from(c));
            let witness = density_witness(&lattice_values, &search_window, &c_rat)?;
            let ok = match &witness {
                Some(Point::Halfline(w)) => {
                    let within = w
                        .as_rational()
                        .map(|q| q >= lo && q <= &search_hi)
                        .unwrap_or(false);
                    within
                        && lattice_values
                            .iter()
                            .all(|v| w.abs_diff(v, crate::exact::precision_bits()).gt_rational(&c_rat))
                }
                _ => false,
            };
            report.claims.push(
                Claim::of(
                    &format!("density-gap-c{c}"),
                    anchors::SQUARES_DENSITY,
                    ok,
                    json!({ "c": c, "witness": witness.as_ref().map(point_json) }),
                )
                .with_bound(c as f64)
                .with_witness(json!({
                    "witness": witness.as_ref().map(point_json),
                    "search_window": search_window.describe(),
                })),
            );
        }
    }
    Ok(report.finish(start))
}

/// Closed forms, closeness, and non-conjugacy premises for the strip family.
pub fn scenario_strips(k: u32, n: u32, window: &Window) -> Result<ScenarioReport> {
    let start = Instant::now();
    if k < 1 || n < 1 {
        return Err(Error::Domain("strips scenario needs k >= 1 and n >= 1".into()));
    }
    let params = json!({
        "k": k,
        "n": n,
        "window": window.describe(),
        "norm": "max",
    });
    let mut report = ScenarioReport::new("strips", params);
    let space = Space::Strip { k };
    let f = CoarseMapSpec::strip(StripMap::F { k })?;
    let g = CoarseMapSpec::strip(StripMap::G { k })?;
    let fn_spec = f.iterate(n)?;
    let gn_spec = g.iterate(n)?;
    let samples = window.samples(&space)?;

    // Closed forms agree with brute iteration on every sample.
    let mut closed_failure: Option<Value> = None;
    'outer: for p in &samples {
        let Point::Strip { r, label } = p else { unreachable!() };
        for (map, map_id) in [(StripMap::F { k }, "f"), (StripMap::G { k }, "g")] {
            let mut brute = (r.clone(), *label);
            let spec = CoarseMapSpec::strip(map.clone())?;
            for _ in 0..n {
                let next = spec.eval(&Point::strip(brute.0.clone(), brute.1))?;
                let Point::Strip { r, label } = next else { unreachable!() };
                brute = (r, label);
            }
            let general = strip_pow_closed(&map, StripPowForm::General, n, r, *label)?;
            let mut agree = general == brute;
            if n <= k {
                let small = strip_pow_closed(&map, StripPowForm::SmallN, n, r, *label)?;
                agree = agree && small == brute;
            }
            if n == k + 1 {
                let cycle = strip_pow_closed(&map, StripPowForm::KPlusOne, n, r, *label)?;
                agree = agree && cycle == brute;
            }
            if !agree {
                closed_failure = Some(json!({
                    "map": map_id,
                    "point": point_json(p),
                    "closed": format!("({}, {})", rational_to_string(&general.0), general.1),
                    "brute": format!("({}, {})", rational_to_string(&brute.0), brute.1),
                }));
                break 'outer;
            }
        }
    }
    report.claims.push(Claim::of(
        "closed-forms-match",
        anchors::STRIPS_THM,
        closed_failure.is_none(),
        closed_failure.unwrap_or(Value::Null),
    ));

    // Bijectivity: inverse . map = map . inverse = id, exactly.
    let mut bijection_failure: Option<Value> = None;
    for p in &samples {
        for spec in [&f, &g] {
            let inv = spec.inverse().expect("strip maps are invertible");
            let fwd = spec.eval(p)?;
            let back = inv.eval(&fwd)?;
            let there = inv.eval(p)?;
            let again = spec.eval(&there)?;
            if back != *p || again != *p {
                bijection_failure = Some(json!({
                    "map": spec.id(),
                    "point": point_json(p),
                }));
                break;
            }
        }
        if bijection_failure.is_some() {
            break;
        }
    }
    report.claims.push(Claim::of(
        "bijectivity",
        anchors::STRIPS_THM,
        bijection_failure.is_none(),
        bijection_failure.unwrap_or(Value::Null),
    ));

    if n <= k {
        // f_k^n and g_k^n differ only in the label: equal first coordinates
        // and sup distance <= k.
        let mut coord_failure: Option<Value> = None;
        for p in &samples {
            let a = fn_spec.eval(p)?;
            let b = gn_spec.eval(p)?;
            let (Point::Strip { r: ra, .. }, Point::Strip { r: rb, .. }) = (&a, &b) else {
                unreachable!()
            };
            if ra != rb {
                coord_failure = Some(json!({
                    "point": point_json(p),
                    "f_image": point_json(&a),
                    "g_image": point_json(&b),
                }));
                break;
            }
        }
        report.claims.push(Claim::of(
            "first-coordinates-equal",
            anchors::STRIPS_THM,
            coord_failure.is_none(),
            coord_failure.unwrap_or(Value::Null),
        ));
        let sup = sup_distance(&fn_spec, &gn_spec, window)?;
        let k_rat = BigRational::from_integer(BigInt::from(k));
        report.claims.push(
            Claim::of(
                "sup-distance-le-k",
                anchors::STRIPS_THM,
                sup.value.le_rational(&k_rat),
                json!({ "sup": enclosure_json(&sup.value), "argmax": point_json(&sup.witness) }),
            )
            .with_bound(k as f64)
            .with_witness(json!({
                "sup": enclosure_json(&sup.value),
                "argmax": point_json(&sup.witness),
            })),
        );
    } else {
        // Premises of the growth-gap argument, all exact.
        // (a) g_k^n scales every ray by at most 2^(n-1).
        let mut exponent_failure: Option<Value> = None;
        for j in 0..=k as i64 {
            let e = g_pow_exponent(k, n, j);
            if e > n as i64 - 1 {
                exponent_failure = Some(json!({ "ray": j, "exponent": e }));
            }
        }
        report.claims.push(
            Claim::of(
                "g-multiplier-bound",
                anchors::STRIPS_ALL_N,
                exponent_failure.is_none(),
                exponent_failure.unwrap_or(Value::Null),
            )
            .with_bound(scaled_pow2(n as i32 - 1)),
        );
        // Sample-level restatement: first coordinate of g^n is <= 2^(n-1) r.
        let g_rate = pow2_rational(n as i32 - 1);
        let mut scaling_failure: Option<Value> = None;
        for p in &samples {
            let image = gn_spec.eval(p)?;
            let (Point::Strip { r, .. }, Point::Strip { r: ri, .. }) = (p, &image) else {
                unreachable!()
            };
            if ri > &(r * &g_rate) {
                scaling_failure = Some(json!({
                    "point": point_json(p),
                    "image": point_json(&image),
                }));
                break;
            }
        }
        report.claims.push(Claim::of(
            "g-scaling-premise",
            anchors::QWERTY,
            scaling_failure.is_none(),
            scaling_failure.unwrap_or(Value::Null),
        ));
        // (b) f_k^n doubles the top ray n times: f_k^n(r, k) = (2^n r, k).
        let f_rate = pow2_rational(n as i32);
        let mut top_ray_failure: Option<Value> = None;
        for p in &samples {
            let Point::Strip { r, label } = p else { unreachable!() };
            if *label != k as i64 {
                continue;
            }
            let image = fn_spec.eval(p)?;
            let expected = Point::strip(r * &f_rate, k as i64);
            if image != expected {
                top_ray_failure = Some(json!({
                    "point": point_json(p),
                    "image": point_json(&image),
                    "expected": point_json(&expected),
                }));
                break;
            }
        }
        report.claims.push(
            Claim::of(
                "f-top-ray-scaling",
                anchors::STRIPS_CYCLE_F,
                top_ray_failure.is_none(),
                top_ray_failure.unwrap_or(Value::Null),
            )
            .with_bound(scaled_pow2(n as i32)),
        );
        // (c) Orbit growth from x0 = (1, k): the m-th visit scales the
        // first coordinate to exactly (2^n)^m >= F^m.
        let mut orbit_failure: Option<Value> = None;
        let mut expected = BigRational::one();
        for m in 1..=6u32 {
            expected *= &f_rate;
            let image = fn_spec
                .iterate(m)?
                .eval(&Point::strip(BigRational::one(), k as i64))?;
            let Point::Strip { r, .. } = &image else { unreachable!() };
            if r < &expected {
                orbit_failure = Some(json!({ "m": m, "r": rational_to_string(r) }));
                break;
            }
        }
        report.claims.push(Claim::of(
            "orbit-growth",
            anchors::QWERTY,
            orbit_failure.is_none(),
            orbit_failure.unwrap_or(Value::Null),
        ));
        // Summary premise certificate: F = 2^n > G = 2^(n-1) > 1.
        let premises_ok = report.claims.iter().all(|c| c.verdict == Verdict::Pass);
        report.claims.push(
            Claim::of(
                "non-conjugacy-premises",
                anchors::STRIPS_ALL_N,
                premises_ok,
                json!("a premise claim above failed"),
            )
            .with_witness(json!({
                "F": rational_json(&f_rate),
                "G": rational_json(&g_rate),
                "x0": point_json(&Point::strip(BigRational::one(), k as i64)),
            })),
        );
        if n % (k + 1) == 0 {
            // On full cycles g_k^n is a uniform scaling (hence controlled)
            // while f_k^n tears the strip apart: witness pairs.
            let uniform = (0..=k as i64)
                .map(|j| g_pow_exponent(k, n, j))
                .collect::<Vec<_>>();
            let all_equal = uniform.windows(2).all(|w| w[0] == w[1]);
            report.claims.push(Claim::of(
                "g-uniform-scaling",
                anchors::STRIPS_CYCLE,
                all_equal,
                json!({ "exponents": uniform }),
            ));
            let pairs = (0..=20u32).map(|i| {
                let m = BigRational::from_integer(BigInt::from(1u64 << i));
                (Point::strip(m.clone(), 0), Point::strip(m, k as i64))
            });
            let thresholds: Vec<BigRational> = (0..=10)
                .map(|i| BigRational::from_integer(BigInt::from(1u64) << (2 * i)))
                .collect();
            let witness = non_controlled_witness(&fn_spec, pairs, &thresholds)?;
            let mut ok = witness.is_some();
            if let (Some(w), true) = (&witness, n == k + 1) {
                // Image distances are exactly max(3 * 2^(k-1) m, 1).
                for (pair, d) in w.pairs.iter().zip(&w.image_distances) {
                    let Point::Strip { r, .. } = &pair.0 else { unreachable!() };
                    let expected = (BigRational::from_integer(BigInt::from(3))
                        * pow2_rational(k as i32 - 1)
                        * r)
                        .max(BigRational::one());
                    if d != &Enclosure::exact(expected) {
                        ok = false;
                        break;
                    }
                }
            }
            report.claims.push(
                Claim::of(
                    "f-non-controlled-witness",
                    if n == k + 1 {
                        anchors::STRIPS_THM
                    } else {
                        anchors::STRIPS_MORE
                    },
                    ok,
                    json!("no witness family found"),
                )
                .with_witness(json!({
                    "pairs": witness.as_ref().map(|w| w
                        .pairs
                        .iter()
                        .map(|(a, b)| json!([point_json(a), point_json(b)]))
                        .collect::<Vec<_>>()),
                    "image_distances": witness.as_ref().map(|w| w
                        .image_distances
                        .iter()
                        .map(enclosure_json)
                        .collect::<Vec<_>>()),
                    "input_bound": witness.as_ref().map(|w| rational_json(&w.input_bound)),
                })),
            );
        }
    }
    Ok(report.finish(start))
}

/// Premises of the exponential-gap contradiction.
#[derive(Clone, Debug)]
pub struct QwertyPremises {
    /// Lower growth rate of the orbit of `x0` under `f` (`F` in the
    /// contradiction).
    pub orbit_rate: BigRational,
    /// Upper scaling rate of `g` (`G < F`).
    pub scaling_rate: BigRational,
    /// Base point of the orbit.
    pub x0: Point,
    /// Closeness constant between the intertwined compositions.
    pub closeness: BigRational,
    /// First coordinate of the image of `x0`.
    pub start: BigRational,
    /// Multiplicative constant of the QI lower bound.
    pub qi_c: BigRational,
    /// Additive constant of the QI lower bound.
    pub qi_a: BigRational,
}

impl QwertyPremises {
    pub fn validate(&self) -> Result<()> {
        if self.scaling_rate <= BigRational::one() {
            return Err(Error::RecurrencePole(rational_to_string(&self.scaling_rate)));
        }
        if self.orbit_rate <= self.scaling_rate {
            return Err(Error::Domain(format!(
                "the orbit rate F = {} must exceed the scaling rate G = {}",
                rational_to_string(&self.orbit_rate),
                rational_to_string(&self.scaling_rate)
            )));
        }
        if self.closeness.is_negative() || self.start.is_negative() || self.qi_a.is_negative() {
            return Err(Error::Domain("D, s, A must be nonnegative".into()));
        }
        if !self.qi_c.is_positive() {
            return Err(Error::Domain("C must be positive".into()));
        }
        Ok(())
    }
}

/// The geometric recurrence bound and its crossover against the
/// exponential lower curve.
#[derive(Clone, Debug)]
pub struct RecurrenceBound {
    /// `c = G max(D, s) / (G - 1)`.
    pub c: BigRational,
    /// `a = -max(D, s) / (G - 1)`.
    pub a: BigRational,
    /// Worst-case trace `s_0, ..., s_N` of `s_{i+1} = G s_i + D`.
    pub trace: Vec<BigRational>,
    /// `s_n <= c G^n + a` held at every step (exact).
    pub holds: bool,
    /// The bound was attained with equality at every step.
    pub tight: bool,
    /// Least `n` with `F^n / C - A > c G^n + a`, when found.
    pub crossover: Option<u32>,
}

/// Simulate the worst-case recurrence `s_{n+1} = G s_n + D` and verify the
/// closed geometric bound; also locate where the exponential lower curve
/// `F^n / C - A` overtakes the upper bound.
pub fn qwerty_recurrence(premises: &QwertyPremises, n_max: u32) -> Result<RecurrenceBound> {
    premises.validate()?;
    let g = &premises.scaling_rate;
    let d = &premises.closeness;
    let s0 = &premises.start;
    let max_ds = d.clone().max(s0.clone());
    let g_minus_one = g - BigRational::one();
    let c = g * &max_ds / &g_minus_one;
    let a = -&max_ds / &g_minus_one;
    let mut trace = Vec::with_capacity(n_max as usize + 1);
    trace.push(s0.clone());
    let mut cur = s0.clone();
    let mut g_pow = BigRational::one();
    let mut holds = true;
    let mut tight = true;
    for _ in 0..n_max {
        // check s_n <= c G^n + a for the current n before stepping
        let bound = &c * &g_pow + &a;
        if cur > bound {
            holds = false;
        }
        if cur != bound {
            tight = false;
        }
        cur = g * &cur + d;
        g_pow *= g;
        trace.push(cur.clone());
    }
    let final_bound = &c * &g_pow + &a;
    if cur > final_bound {
        holds = false;
    }
    if cur != final_bound {
        tight = false;
    }
    // Crossover search.
    let f = &premises.orbit_rate;
    let mut crossover = None;
    if f > g {
        let mut f_pow = BigRational::one();
        let mut g_pow = BigRational::one();
        const CROSSOVER_CAP: u32 = 10_000;
        for i in 0..=CROSSOVER_CAP.max(n_max) {
            let lower = &f_pow / &premises.qi_c - &premises.qi_a;
            let upper = &c * &g_pow + &a;
            if lower > upper {
                crossover = Some(i);
                break;
            }
            f_pow *= f;
            g_pow *= g;
        }
    }
    Ok(RecurrenceBound {
        c,
        a,
        trace,
        holds,
        tight,
        crossover,
    })
}

pub fn scenario_qwerty(premises: &QwertyPremises, n_max: u32) -> Result<ScenarioReport> {
    let start = Instant::now();
    let params = json!({
        "F": rational_json(&premises.orbit_rate),
        "G": rational_json(&premises.scaling_rate),
        "D": rational_json(&premises.closeness),
        "s": rational_json(&premises.start),
        "C": rational_json(&premises.qi_c),
        "A": rational_json(&premises.qi_a),
        "x0": point_json(&premises.x0),
        "n_max": n_max,
        "norm": "max",
    });
    let mut report = ScenarioReport::new("qwerty", params);
    let bound = qwerty_recurrence(premises, n_max)?;
    report.claims.push(
        Claim::of(
            "recurrence-upper-bound",
            anchors::QWERTY_UPPER,
            bound.holds,
            json!({ "trace": bound.trace.iter().map(rational_json).collect::<Vec<_>>() }),
        )
        .with_witness(json!({
            "c": rational_json(&bound.c),
            "a": rational_json(&bound.a),
        })),
    );
    if premises.closeness == premises.start {
        report.claims.push(Claim::of(
            "recurrence-tight",
            anchors::QWERTY_UPPER,
            bound.tight,
            json!({ "trace": bound.trace.iter().map(rational_json).collect::<Vec<_>>() }),
        ));
    }
    if premises.orbit_rate > premises.scaling_rate {
        let claim = match bound.crossover {
            Some(i) => Claim::pass("crossover-found", anchors::QWERTY_LOWER)
                .with_bound(i as f64)
                .with_witness(json!({ "n_star": i })),
            None => Claim::fail(
                "crossover-found",
                anchors::QWERTY_LOWER,
                json!("no crossover within the search cap"),
            ),
        };
        report.claims.push(claim);
    }
    Ok(report.finish(start))
}

/// Exact checks of the grid example's hypothesis: both conjugating maps are
/// coarse equivalences, and both intertwinings hold exactly.
pub fn grid_hypothesis_check(n_max: u64, r_hi: BigRational, step: BigRational) -> Result<ScenarioReport> {
    let start = Instant::now();
    let window = Window::grid(1, n_max, r_hi, step)?;
    let params = json!({
        "window": window.describe(),
        "norm": "max",
    });
    let mut report = ScenarioReport::new("grid", params);
    let f = CoarseMapSpec::grid(crate::maps::grid::GridMap::F);
    let g = CoarseMapSpec::grid(crate::maps::grid::GridMap::G);
    let phi = CoarseMapSpec::grid(crate::maps::grid::GridMap::Phi);
    let psi = CoarseMapSpec::grid(crate::maps::grid::GridMap::Psi);
    let cap_phi = CoarseMapSpec::grid(crate::maps::grid::GridMap::PhiInv);
    let cap_psi = CoarseMapSpec::grid(crate::maps::grid::GridMap::PsiInv);

    let exact_equal = |a: &CoarseMapSpec, b: &CoarseMapSpec, space: &Space| -> Result<Option<Value>> {
        for p in window.samples(space)? {
            let va = a.eval(&p)?;
            let vb = b.eval(&p)?;
            if va != vb {
                return Ok(Some(json!({
                    "point": point_json(&p),
                    "left": point_json(&va),
                    "right": point_json(&vb),
                })));
            }
        }
        Ok(None)
    };

    let phi_f = CoarseMapSpec::compose(&phi, &f)?;
    let g_phi = CoarseMapSpec::compose(&g, &phi)?;
    let fail = exact_equal(&phi_f, &g_phi, &Space::GridX)?;
    report.claims.push(Claim::of(
        "phi-intertwines-exactly",
        anchors::GRID_HYPOTHESIS,
        fail.is_none(),
        fail.unwrap_or(Value::Null),
    ));

    let psi_g = CoarseMapSpec::compose(&psi, &g)?;
    let f_psi = CoarseMapSpec::compose(&f, &psi)?;
    let fail = exact_equal(&psi_g, &f_psi, &Space::GridY)?;
    report.claims.push(Claim::of(
        "psi-intertwines-exactly",
        anchors::GRID_HYPOTHESIS,
        fail.is_none(),
        fail.unwrap_or(Value::Null),
    ));

    let cap_psi_phi = CoarseMapSpec::compose(&cap_psi, &phi)?;
    let fail = exact_equal(&cap_psi_phi, &CoarseMapSpec::identity(Space::GridX), &Space::GridX)?;
    report.claims.push(Claim::of(
        "retraction-identity-x",
        anchors::GRID_HYPOTHESIS,
        fail.is_none(),
        fail.unwrap_or(Value::Null),
    ));

    let cap_phi_psi = CoarseMapSpec::compose(&cap_phi, &psi)?;
    let fail = exact_equal(&cap_phi_psi, &CoarseMapSpec::identity(Space::GridY), &Space::GridY)?;
    report.claims.push(Claim::of(
        "retraction-identity-y",
        anchors::GRID_HYPOTHESIS,
        fail.is_none(),
        fail.unwrap_or(Value::Null),
    ));

    // sup d(phi . PsiInv, id_Y) = 3, attained on the first thick halfline.
    let phi_cap_psi = CoarseMapSpec::compose(&phi, &cap_psi)?;
    let sup = sup_distance(&phi_cap_psi, &CoarseMapSpec::identity(Space::GridY), &window)?;
    let three = BigRational::from_integer(BigInt::from(3));
    report.claims.push(
        Claim::of(
            "phi-pair-bound",
            anchors::GRID_HYPOTHESIS,
            sup.value == Enclosure::exact(three),
            json!({ "sup": enclosure_json(&sup.value), "argmax": point_json(&sup.witness) }),
        )
        .with_bound(3.0)
        .with_witness(json!({
            "sup": enclosure_json(&sup.value),
            "argmax": point_json(&sup.witness),
        })),
    );

    // sup d(psi . PhiInv, id_X) <= 1.
    let psi_cap_phi = CoarseMapSpec::compose(&psi, &cap_phi)?;
    let sup = sup_distance(&psi_cap_phi, &CoarseMapSpec::identity(Space::GridX), &window)?;
    report.claims.push(
        Claim::of(
            "psi-pair-bound",
            anchors::GRID_HYPOTHESIS,
            sup.value.le_rational(&BigRational::one()),
            json!({ "sup": enclosure_json(&sup.value), "argmax": point_json(&sup.witness) }),
        )
        .with_bound(1.0)
        .with_witness(json!({
            "sup": enclosure_json(&sup.value),
            "argmax": point_json(&sup.witness),
        })),
    );
    Ok(report.finish(start))
}

/// The bijection between thick-halfline indices induced by a coarse
/// equivalence of the grid spaces.
#[derive(Clone, Debug)]
pub struct HalflineBijection {
    pub forward: String,
    pub backward: String,
    /// Neighborhood radius realizing the equalities.
    pub b: u32,
    /// Pairs `(n^2, m^2)`: the domain halfline index maps to the codomain
    /// one.
    pub pairs: Vec<(u64, u64)>,
}

impl HalflineBijection {
    pub fn domain_indices(&self) -> Vec<u64> {
        self.pairs.iter().map(|(n, _)| *n).collect()
    }

    pub fn codomain_indices(&self) -> Vec<u64> {
        self.pairs.iter().map(|(_, m)| *m).collect()
    }

    pub fn image_of(&self, nsq: u64) -> Option<u64> {
        self.pairs.iter().find(|(n, _)| *n == nsq).map(|(_, m)| *m)
    }

    /// Construct directly from index pairs (used for hypothetical
    /// candidates in the contradiction check).
    pub fn from_pairs(name: &str, b: u32, pairs: Vec<(u64, u64)>) -> HalflineBijection {
        HalflineBijection {
            forward: name.into(),
            backward: String::new(),
            b,
            pairs,
        }
    }
}

/// Why a decomposition attempt failed.
#[derive(Clone, Debug)]
pub enum DecompositionResult {
    Bijection(HalflineBijection),
    Failed {
        /// Offending domain index `n^2`.
        index: u64,
        reason: String,
    },
}

fn thick_halfline_window(n: u64, r_hi: &BigRational, step: &BigRational) -> Result<Window> {
    Window::grid(n, n, r_hi.clone(), step.clone())
}

/// Decompose a coarse equivalence of the grid spaces into a bijection of
/// thick-halfline indices: for each `n` in the index window, find the
/// unique `m` with `N_B(Phi(H_n)) = H'_m` on samples, both directions.
pub fn halfline_decomposition(
    phi: &CoarseMapSpec,
    psi: &CoarseMapSpec,
    index_range: (u64, u64),
    b_range: (u32, u32),
    r_hi: &BigRational,
    step: &BigRational,
) -> Result<DecompositionResult> {
    let (n_lo, n_hi) = index_range;
    if n_lo < 1 || n_lo > n_hi {
        return Err(Error::InvalidWindow(format!(
            "index range [{n_lo}, {n_hi}] is empty or starts at 0"
        )));
    }
    let domain = phi.domain();
    let codomain = phi.codomain();
    if !matches!(domain, Space::GridX | Space::GridY) || psi.domain() != codomain {
        return Err(Error::SpaceMismatch(
            "decomposition needs a grid-space pair and its coarse inverse".into(),
        ));
    }
    // Precondition: the pair passes the coarse-inverse check.
    let pair_windows = Window::grid(1, n_hi.min(12), r_hi.clone(), step.clone())?.nested(3)?;
    let pair = coarse_inverse_check(phi, psi, &pair_windows)?;
    if !pair.ok {
        return Err(Error::NotCoarseInversePair(format!(
            "{} / {}",
            phi.id(),
            psi.id()
        )));
    }
    let measured_b = pair
        .bound
        .hi()
        .ceil()
        .to_integer()
        .to_u32()
        .unwrap_or(u32::MAX);
    let (b_lo, b_hi) = b_range;
    let b_start = measured_b.max(b_lo);
    let mut last_failure: Option<DecompositionResult> = None;
    'b_search: for b in b_start..=b_hi.max(b_start) {
        let b_rat = BigRational::from_integer(BigInt::from(b));
        let mut pairs: Vec<(u64, u64)> = Vec::new();
        let mut seen: BTreeMap<u64, u64> = BTreeMap::new();
        for n in n_lo..=n_hi {
            let h_n = thick_halfline_window(n, r_hi, step)?.samples(&domain)?;
            let mut images = Vec::with_capacity(h_n.len());
            for p in &h_n {
                images.push(phi.eval(p)?);
            }
            // (1) images must stay inside one thick halfline
            let mut m_index: Option<u64> = None;
            for img in &images {
                let idx = img.grid_index().expect("grid image");
                match m_index {
                    None => m_index = Some(idx),
                    Some(m) if m != idx => {
                        last_failure = Some(DecompositionResult::Failed {
                            index: n * n,
                            reason: format!(
                                "images split across halflines {} and {}",
                                m * m,
                                idx * idx
                            ),
                        });
                        continue 'b_search;
                    }
                    _ => {}
                }
            }
            let m = m_index.expect("nonempty halfline window");
            // (2) neighbor halflines must stay out of reach of B
            let gap_ok = (2 * m).saturating_sub(1) > b as u64;
            if !gap_ok {
                last_failure = Some(DecompositionResult::Failed {
                    index: n * n,
                    reason: format!("halfline {} too close to its neighbors for B = {b}", m * m),
                });
                continue 'b_search;
            }
            // (3) N_B(Phi(H_n)) must cover H'_m on samples
            let h_m = thick_halfline_window(m, r_hi, step)?.samples(&codomain)?;
            let cover = neighborhood_cover_check(&images, &h_m, &b_rat, &codomain)?;
            if !cover.covered {
                last_failure = Some(DecompositionResult::Failed {
                    index: n * n,
                    reason: format!(
                        "H'_{} not covered within B = {b}; first uncovered point {}",
                        m * m,
                        cover.first_failing.map(|p| p.to_string()).unwrap_or_default()
                    ),
                });
                continue 'b_search;
            }
            // (4) the reverse direction: N_B(Psi(H'_m)) = H_n
            let mut back_images = Vec::with_capacity(h_m.len());
            for p in &h_m {
                back_images.push(psi.eval(p)?);
            }
            for img in &back_images {
                let idx = img.grid_index().expect("grid image");
                if idx != n {
                    last_failure = Some(DecompositionResult::Failed {
                        index: n * n,
                        reason: format!(
                            "reverse images land on halfline {} instead of {}",
                            idx * idx,
                            n * n
                        ),
                    });
                    continue 'b_search;
                }
            }
            let cover = neighborhood_cover_check(&back_images, &h_n, &b_rat, &domain)?;
            if !cover.covered {
                last_failure = Some(DecompositionResult::Failed {
                    index: n * n,
                    reason: format!("H_{} not covered by the reverse images within B = {b}", n * n),
                });
                continue 'b_search;
            }
            // (5) injectivity across n
            if let Some(other) = seen.insert(m, n) {
                last_failure = Some(DecompositionResult::Failed {
                    index: n * n,
                    reason: format!(
                        "halfline {} already claimed by index {}",
                        m * m,
                        other * other
                    ),
                });
                continue 'b_search;
            }
            pairs.push((n * n, m * m));
        }
        return Ok(DecompositionResult::Bijection(HalflineBijection {
            forward: phi.id(),
            backward: psi.id(),
            b,
            pairs,
        }));
    }
    Ok(last_failure.unwrap_or(DecompositionResult::Failed {
        index: n_lo * n_lo,
        reason: "no B in the search range worked".into(),
    }))
}

/// Verdict of the monotonicity contradiction check.
#[derive(Clone, Debug)]
pub struct MonotonicityReport {
    /// `F(n^2) >= (n+1)^2` held for every tested index.
    pub increasing_ok: bool,
    pub increasing_witness: Option<(u64, u64)>,
    /// `G(m^2) >= m^2` held for every tested index.
    pub nondecreasing_ok: bool,
    pub nondecreasing_witness: Option<(u64, u64)>,
    /// Both held: were the maps mutually inverse (as the decomposition
    /// forces for a genuine conjugacy), `G(F(n^2)) >= (n+1)^2 > n^2` would
    /// contradict `G . F = id`.
    pub contradiction: bool,
    /// Example chain `(n^2, F(n^2), G(F(n^2)))` exhibiting the squeeze.
    pub chain: Option<(u64, u64, u64)>,
}

/// Check both monotonicity lemmas on a candidate index bijection and its
/// claimed inverse, and emit the contradiction when both hold.
pub fn monotonicity_contradiction(
    fmap: &HalflineBijection,
    gmap: &HalflineBijection,
) -> Result<MonotonicityReport> {
    // Structural compatibility: g must be defined on f's image wherever the
    // index windows overlap.
    let overlap: Vec<(u64, u64)> = fmap
        .pairs
        .iter()
        .filter(|(_, m)| gmap.image_of(*m).is_some())
        .cloned()
        .collect();
    if overlap.is_empty() {
        return Err(Error::NonInverseInputs(
            "the codomain indices of F never meet the domain of G".into(),
        ));
    }
    let isqrt = |v: u64| -> u64 { num_integer::Roots::sqrt(&v) };
    let mut increasing_ok = true;
    let mut increasing_witness = None;
    for (nsq, msq) in &fmap.pairs {
        let n = isqrt(*nsq);
        if *msq < (n + 1) * (n + 1) {
            increasing_ok = false;
            increasing_witness = Some((*nsq, *msq));
            break;
        }
    }
    let mut nondecreasing_ok = true;
    let mut nondecreasing_witness = None;
    for (msq, lsq) in &gmap.pairs {
        if lsq < msq {
            nondecreasing_ok = false;
            nondecreasing_witness = Some((*msq, *lsq));
            break;
        }
    }
    let contradiction = increasing_ok && nondecreasing_ok;
    let chain = if contradiction {
        overlap.first().map(|(nsq, msq)| {
            let g_of = gmap.image_of(*msq).expect("overlap filtered");
            (*nsq, *msq, g_of)
        })
    } else {
        None
    };
    Ok(MonotonicityReport {
        increasing_ok,
        increasing_witness,
        nondecreasing_ok,
        nondecreasing_witness,
        contradiction,
        chain,
    })
}

/// Full decomposition pipeline: decompose both conjugating pairs, check
/// the monotonicity lemmas, and emit the contradiction certificate.
pub fn scenario_decompose(
    index_range: (u64, u64),
    b_range: (u32, u32),
    r_hi: BigRational,
    step: BigRational,
) -> Result<ScenarioReport> {
    let start = Instant::now();
    let params = json!({
        "n_lo": index_range.0,
        "n_hi": index_range.1,
        "b_lo": b_range.0,
        "b_hi": b_range.1,
        "r_hi": rational_json(&r_hi),
        "step": rational_json(&step),
        "norm": "max",
    });
    let mut report = ScenarioReport::new("decompose", params);
    let phi = CoarseMapSpec::grid(crate::maps::grid::GridMap::Phi);
    let cap_psi = CoarseMapSpec::grid(crate::maps::grid::GridMap::PsiInv);
    let psi = CoarseMapSpec::grid(crate::maps::grid::GridMap::Psi);
    let cap_phi = CoarseMapSpec::grid(crate::maps::grid::GridMap::PhiInv);

    let forward = halfline_decomposition(&phi, &cap_psi, index_range, b_range, &r_hi, &step)?;
    let forward_bijection = match forward {
        DecompositionResult::Bijection(b) => {
            let shift_ok = b.pairs.iter().all(|(nsq, msq)| {
                let n = num_integer::Roots::sqrt(nsq);
                *msq == (n + 1) * (n + 1)
            });
            report.claims.push(
                Claim::of(
                    "phi-side-shift-by-one",
                    anchors::SPLIT,
                    shift_ok,
                    json!({ "pairs": b.pairs }),
                )
                .with_bound(b.b as f64)
                .with_witness(json!({ "pairs": b.pairs, "B": b.b })),
            );
            Some(b)
        }
        DecompositionResult::Failed { index, reason } => {
            report.claims.push(Claim::fail(
                "phi-side-shift-by-one",
                anchors::SPLIT,
                json!({ "index": index, "reason": reason }),
            ));
            None
        }
    };

    let backward = halfline_decomposition(&psi, &cap_phi, index_range, b_range, &r_hi, &step)?;
    let backward_bijection = match backward {
        DecompositionResult::Bijection(b) => {
            let identity_ok = b.pairs.iter().all(|(msq, lsq)| msq == lsq);
            report.claims.push(
                Claim::of(
                    "psi-side-identity",
                    anchors::SPLIT,
                    identity_ok,
                    json!({ "pairs": b.pairs }),
                )
                .with_bound(b.b as f64)
                .with_witness(json!({ "pairs": b.pairs, "B": b.b })),
            );
            Some(b)
        }
        DecompositionResult::Failed { index, reason } => {
            report.claims.push(Claim::fail(
                "psi-side-identity",
                anchors::SPLIT,
                json!({ "index": index, "reason": reason }),
            ));
            None
        }
    };

    if let (Some(f), Some(g)) = (forward_bijection, backward_bijection) {
        let mono = monotonicity_contradiction(&f, &g)?;
        report.claims.push(Claim::of(
            "increasing-condition",
            anchors::INCREASING,
            mono.increasing_ok,
            json!({ "witness": mono.increasing_witness }),
        ));
        report.claims.push(Claim::of(
            "non-decreasing-condition",
            anchors::NON_DECREASING,
            mono.nondecreasing_ok,
            json!({ "witness": mono.nondecreasing_witness }),
        ));
        report.claims.push(
            Claim::of(
                "contradiction-emitted",
                anchors::DISJOINT,
                mono.contradiction,
                json!("monotonicity conditions did not both hold"),
            )
            .with_witness(json!({
                "chain": mono.chain.map(|(a, b, c)| json!({
                    "n_sq": a,
                    "F_of_n_sq": b,
                    "G_of_F": c,
                })),
                "verdict": if mono.contradiction { "CONTRADICTION" } else { "NO-CONTRADICTION" },
            })),
        );
    }
    Ok(report.finish(start))
}

/// Which surjection the section scenario extracts a right inverse for.
#[derive(Clone, Debug)]
pub enum SectionTarget {
    /// The label-clamping surjection of the grid spaces.
    Grid,
    /// The synthetic label-collapsing strip surjection, `k >= 2`.
    Collapse { k: u32 },
}

pub fn scenario_section(target: &SectionTarget, window: &Window) -> Result<ScenarioReport> {
    let start = Instant::now();
    let (phi, f, g, name): (CoarseMapSpec, CoarseMapSpec, CoarseMapSpec, &str) = match target {
        SectionTarget::Grid => (
            CoarseMapSpec::grid(crate::maps::grid::GridMap::PhiInv),
            CoarseMapSpec::grid(crate::maps::grid::GridMap::F),
            CoarseMapSpec::grid(crate::maps::grid::GridMap::G),
            "grid",
        ),
        SectionTarget::Collapse { k } => {
            if *k < 2 {
                return Err(Error::Domain("collapse target needs k >= 2".into()));
            }
            (
                CoarseMapSpec::strip_collapse(*k)?,
                CoarseMapSpec::strip(StripMap::G { k: *k })?,
                CoarseMapSpec::strip(StripMap::G { k: *k - 1 })?,
                "collapse",
            )
        }
    };
    let params = json!({
        "target": name,
        "surjection": phi.id(),
        "window": window.describe(),
        "norm": "max",
    });
    let mut report = ScenarioReport::new("section", params);
    let section = crate::coarse::section_of_surjection(&phi, &f, &g, window)?;
    report.claims.push(Claim::of(
        "right-inverse-exact",
        anchors::SECTION,
        section.right_identity_exact,
        json!("phi . section differed from the identity on a sample"),
    ));
    let measured = section.measured_sup.clone();
    let predicted = section.predicted_bound.clone();
    report.claims.push(
        Claim::of(
            "section-intertwines-within-bound",
            anchors::SECTION,
            measured.le_rational(&predicted),
            json!({
                "measured": enclosure_json(&measured),
                "predicted": rational_json(&predicted),
            }),
        )
        .with_bound(predicted.to_f64().unwrap_or(f64::NAN))
        .with_witness(json!({
            "measured": enclosure_json(&measured),
            "predicted": rational_json(&predicted),
            "intertwining_defect": enclosure_json(&section.intertwining_defect),
        })),
    );
    if matches!(target, SectionTarget::Grid) {
        // For the grid surjection the recovered section is the inclusion
        // and the intertwining is exact.
        report.claims.push(Claim::of(
            "section-intertwines-exactly",
            anchors::SECTION,
            measured == Enclosure::zero(),
            json!({ "measured": enclosure_json(&measured) }),
        ));
    }
    let trend_bounded = section.closeness.verdict.is_bounded();
    report.claims.push(Claim::of(
        "section-closeness-bounded",
        anchors::SECTION,
        trend_bounded,
        json!({ "verdict": section.closeness.verdict.label() }),
    ));
    Ok(report.finish(start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_rational;

    fn rat(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn squares_scenario_small_n_passes() {
        let w = Window::halfline(rat("1"), rat("100"), rat("1/8")).unwrap();
        let report = scenario_squares(2, 1, &w).unwrap();
        assert!(report.all_pass(), "{:?}", report.claims);
        let upper = report
            .claims
            .iter()
            .find(|c| c.id == "closeness-upper")
            .unwrap();
        assert_eq!(upper.bound, Some(0.5));
    }

    #[test]
    fn squares_scenario_at_n_equals_k() {
        let w = Window::halfline(rat("1"), rat("50"), rat("1/4")).unwrap();
        let report = scenario_squares(3, 3, &w).unwrap();
        assert!(report.all_pass(), "{:?}", report.claims);
        let upper = report
            .claims
            .iter()
            .find(|c| c.id == "closeness-upper")
            .unwrap();
        assert_eq!(upper.bound, Some(1.0));
    }

    #[test]
    fn squares_scenario_beyond_k_finds_density_gaps() {
        let w = Window::halfline(rat("1"), rat("36"), rat("1")).unwrap();
        let report = scenario_squares(1, 2, &w).unwrap();
        assert!(report.all_pass(), "{:?}", report.claims);
        // With C = 5 on [1, 36] the first sufficient gap is (25, 36),
        // witnessed by its midpoint.
        let c5 = report
            .claims
            .iter()
            .find(|c| c.id == "density-gap-c5")
            .unwrap();
        let w = c5.witness.as_ref().unwrap();
        assert_eq!(w["witness"]["value"]["exact"], json!("61/2"));
    }

    #[test]
    fn strips_scenario_small_n() {
        let w = Window::strip(rat("16"), rat("1/2")).unwrap();
        let report = scenario_strips(1, 1, &w).unwrap();
        assert!(report.all_pass(), "{:?}", report.claims);
        let sup = report
            .claims
            .iter()
            .find(|c| c.id == "sup-distance-le-k")
            .unwrap();
        let v = sup.witness.as_ref().unwrap();
        assert_eq!(v["sup"]["exact"], json!("1"));
    }

    #[test]
    fn strips_scenario_beyond_k_certifies_premises() {
        let w = Window::strip(rat("16"), rat("1/2")).unwrap();
        let report = scenario_strips(1, 2, &w).unwrap();
        assert!(report.all_pass(), "{:?}", report.claims);
        let premises = report
            .claims
            .iter()
            .find(|c| c.id == "non-conjugacy-premises")
            .unwrap();
        let v = premises.witness.as_ref().unwrap();
        assert_eq!(v["F"]["exact"], json!("4"));
        assert_eq!(v["G"]["exact"], json!("2"));
        assert!(report
            .claims
            .iter()
            .any(|c| c.id == "f-non-controlled-witness"));
    }

    #[test]
    fn strips_scenario_mixed_cycle_multiplier() {
        // k = 2, n = 6 = 3 (k+1): ray 0 scales by 2^(6 - ceil(6/2)) = 2^3.
        assert_eq!(g_pow_exponent(1, 6, 0), 3);
        let w = Window::strip(rat("8"), rat("1/2")).unwrap();
        let report = scenario_strips(2, 6, &w).unwrap();
        assert!(report.all_pass(), "{:?}", report.claims);
        assert!(report.claims.iter().any(|c| c.id == "g-uniform-scaling"));
    }

    #[test]
    fn qwerty_recurrence_matches_hand_values() {
        let premises = QwertyPremises {
            orbit_rate: rat("4"),
            scaling_rate: rat("2"),
            x0: Point::strip(rat("1"), 1),
            closeness: rat("1"),
            start: rat("1"),
            qi_c: rat("1"),
            qi_a: rat("0"),
        };
        let bound = qwerty_recurrence(&premises, 12).unwrap();
        // s_n = 2^(n+1) - 1 with c = 2, a = -1: tight.
        assert!(bound.holds);
        assert!(bound.tight);
        assert_eq!(bound.c, rat("2"));
        assert_eq!(bound.a, rat("-1"));
        assert_eq!(bound.trace[3], rat("15"));
        // Crossover: least n with 4^n > 2^(n+1) - 1 is n = 1 (4 > 3).
        assert_eq!(bound.crossover, Some(1));
    }

    #[test]
    fn qwerty_zero_data_is_degenerate() {
        let premises = QwertyPremises {
            orbit_rate: rat("4"),
            scaling_rate: rat("2"),
            x0: Point::strip(rat("0"), 0),
            closeness: rat("0"),
            start: rat("0"),
            qi_c: rat("1"),
            qi_a: rat("0"),
        };
        let bound = qwerty_recurrence(&premises, 10).unwrap();
        assert!(bound.holds);
        assert!(bound.trace.iter().all(|s| s.is_zero()));
        assert!(bound.tight);
    }

    #[test]
    fn qwerty_rejects_pole() {
        let premises = QwertyPremises {
            orbit_rate: rat("4"),
            scaling_rate: rat("1"),
            x0: Point::strip(rat("0"), 0),
            closeness: rat("1"),
            start: rat("1"),
            qi_c: rat("1"),
            qi_a: rat("0"),
        };
        assert!(matches!(
            qwerty_recurrence(&premises, 10),
            Err(Error::RecurrencePole(_))
        ));
    }

    #[test]
    fn grid_hypothesis_scenario_passes() {
        let report = grid_hypothesis_check(8, rat("8"), rat("1/2")).unwrap();
        assert!(report.all_pass(), "{:?}", report.claims);
    }

    #[test]
    fn decomposition_of_phi_shifts_by_one() {
        let phi = CoarseMapSpec::grid(crate::maps::grid::GridMap::Phi);
        let cap_psi = CoarseMapSpec::grid(crate::maps::grid::GridMap::PsiInv);
        let result =
            halfline_decomposition(&phi, &cap_psi, (2, 10), (0, 8), &rat("8"), &rat("1/2"))
                .unwrap();
        let DecompositionResult::Bijection(b) = result else {
            panic!("expected a bijection, got {result:?}");
        };
        for (nsq, msq) in &b.pairs {
            let n = num_integer::Roots::sqrt(nsq);
            assert_eq!(*msq, (n + 1) * (n + 1));
        }
    }

    #[test]
    fn decomposition_of_psi_is_identity() {
        let psi = CoarseMapSpec::grid(crate::maps::grid::GridMap::Psi);
        let cap_phi = CoarseMapSpec::grid(crate::maps::grid::GridMap::PhiInv);
        let result =
            halfline_decomposition(&psi, &cap_phi, (2, 10), (0, 8), &rat("8"), &rat("1/2"))
                .unwrap();
        let DecompositionResult::Bijection(b) = result else {
            panic!("expected a bijection, got {result:?}");
        };
        for (msq, lsq) in &b.pairs {
            assert_eq!(msq, lsq);
        }
    }

    #[test]
    fn identity_pair_decomposes_to_identity() {
        let id = CoarseMapSpec::identity(Space::GridX);
        let result = halfline_decomposition(&id, &id, (2, 8), (0, 4), &rat("4"), &rat("1/2"))
            .unwrap();
        let DecompositionResult::Bijection(b) = result else {
            panic!("{result:?}");
        };
        assert!(b.pairs.iter().all(|(n, m)| n == m));
    }

    #[test]
    fn monotonicity_contradiction_cases() {
        // Candidate from the decomposition: F(n^2) = (n+1)^2, G = identity.
        let f = HalflineBijection::from_pairs(
            "F",
            3,
            (2..=10u64).map(|n| (n * n, (n + 1) * (n + 1))).collect(),
        );
        let g = HalflineBijection::from_pairs(
            "G",
            1,
            (2..=12u64).map(|m| (m * m, m * m)).collect(),
        );
        let r = monotonicity_contradiction(&f, &g).unwrap();
        assert!(r.increasing_ok);
        assert!(r.nondecreasing_ok);
        assert!(r.contradiction);
        assert!(r.chain.is_some());

        // Identity on both sides: the increasing condition fails, no
        // contradiction.
        let id = HalflineBijection::from_pairs(
            "id",
            0,
            (2..=10u64).map(|n| (n * n, n * n)).collect(),
        );
        let r = monotonicity_contradiction(&id, &id).unwrap();
        assert!(!r.increasing_ok);
        assert!(!r.contradiction);

        // F(n^2) = (n+2)^2 with its true inverse: the non-decreasing
        // condition fails on the inverse.
        let f2 = HalflineBijection::from_pairs(
            "F",
            3,
            (2..=10u64).map(|n| (n * n, (n + 2) * (n + 2))).collect(),
        );
        let g2 = HalflineBijection::from_pairs(
            "G",
            3,
            (4..=12u64).map(|m| (m * m, (m - 2) * (m - 2))).collect(),
        );
        let r = monotonicity_contradiction(&f2, &g2).unwrap();
        assert!(r.increasing_ok);
        assert!(!r.nondecreasing_ok);
        assert!(!r.contradiction);
    }

    #[test]
    fn monotonicity_rejects_disjoint_index_sets() {
        let f = HalflineBijection::from_pairs("F", 0, vec![(4, 9)]);
        let g = HalflineBijection::from_pairs("G", 0, vec![(100, 100)]);
        assert!(matches!(
            monotonicity_contradiction(&f, &g),
            Err(Error::NonInverseInputs(_))
        ));
    }

    #[test]
    fn decompose_scenario_emits_contradiction() {
        let report = scenario_decompose((2, 10), (0, 8), rat("8"), rat("1/2")).unwrap();
        assert!(report.all_pass(), "{:?}", report.claims);
        let c = report
            .claims
            .iter()
            .find(|c| c.id == "contradiction-emitted")
            .unwrap();
        assert_eq!(c.witness.as_ref().unwrap()["verdict"], json!("CONTRADICTION"));
    }

    #[test]
    fn section_scenario_grid_exact() {
        let w = Window::grid(1, 8, rat("8"), rat("1/2")).unwrap();
        let report = scenario_section(&SectionTarget::Grid, &w).unwrap();
        assert!(report.all_pass(), "{:?}", report.claims);
    }

    #[test]
    fn section_scenario_collapse_within_bound() {
        let w = Window::strip(rat("16"), rat("1/2")).unwrap();
        let report = scenario_section(&SectionTarget::Collapse { k: 3 }, &w).unwrap();
        assert!(report.all_pass(), "{:?}", report.claims);
    }
}
