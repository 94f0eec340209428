//! Coarse-category checks: control profiles, closeness with witnesses,
//! coarse-inverse certification, quasi-isometry lower bounds,
//! non-controlledness witnesses, and section extraction for surjective
//! equivalences.
//!
//! Suprema are taken over finite sample grids, so a `BoundedClose` verdict
//! is a desk-scale certificate rather than a proof over the continuum;
//! reports always state the grid. A failure to observe divergence is
//! likewise one-sided, which is why the trend verdict keeps an
//! `Indeterminate` arm.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{pow2_rational, rational_to_string, Enclosure};
use crate::maps::{CoarseMapSpec, TableMap};
use crate::space::{dist, Point, Window};
#[cfg(test)]
use crate::space::Space;

/// Stabilization tolerance for declaring a sup sequence constant.
fn stabilization_tolerance() -> BigRational {
    pow2_rational(-40)
}

/// Divergence threshold: growth factor per window doubling.
fn divergence_factor() -> BigRational {
    BigRational::new(BigInt::from(3), BigInt::from(2))
}

/// Guard against accidentally quadratic pair sweeps on huge windows.
const PAIR_SWEEP_LIMIT: u64 = 40_000_000;

/// `n`-fold composition of an endomorphism; closed iterate forms are used
/// where the family provides one.
pub fn iterate(map: &CoarseMapSpec, n: u32) -> Result<CoarseMapSpec> {
    map.iterate(n)
}

/// Supremum of `d(a(x), b(x))` over the window's sample grid.
#[derive(Clone, Debug)]
pub struct SupDistance {
    pub value: Enclosure,
    /// Sample point attaining the supremum (first one, in sample order).
    pub witness: Point,
    pub samples: usize,
}

pub fn sup_distance(
    a: &CoarseMapSpec,
    b: &CoarseMapSpec,
    window: &Window,
) -> Result<SupDistance> {
    if a.domain() != b.domain() {
        return Err(Error::SpaceMismatch(format!(
            "{} and {} have different domains",
            a.id(),
            b.id()
        )));
    }
    if a.codomain() != b.codomain() {
        return Err(Error::SpaceMismatch(format!(
            "{} and {} have different codomains",
            a.id(),
            b.id()
        )));
    }
    let codomain = a.codomain();
    let samples = window.samples(&a.domain())?;
    if samples.is_empty() {
        return Err(Error::InvalidWindow("window has no samples".into()));
    }
    let mut best: Option<(Enclosure, Point)> = None;
    for x in &samples {
        let ya = a.eval(x)?;
        let yb = b.eval(x)?;
        let d = dist(&ya, &yb, &codomain)?;
        let better = match &best {
            None => true,
            Some((cur, _)) => d.sup_key_cmp(cur) == Ordering::Greater,
        };
        if better {
            best = Some((d, x.clone()));
        }
    }
    let (value, witness) = best.expect("nonempty samples");
    Ok(SupDistance {
        value,
        witness,
        samples: samples.len(),
    })
}

/// Verdict of a closeness trend over nested windows.
#[derive(Clone, Debug, PartialEq)]
pub enum ClosenessVerdict {
    /// The sup sequence stabilized; the maps are `bound`-close on the grid.
    BoundedClose { bound: Enclosure },
    /// The sup grew by a factor >= 3/2 across each of the last two window
    /// steps.
    Diverging { growth_exponent: f64 },
    /// Neither stabilized nor certifiably growing on the tested windows.
    Indeterminate,
}

impl ClosenessVerdict {
    pub fn is_bounded(&self) -> bool {
        matches!(self, ClosenessVerdict::BoundedClose { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            ClosenessVerdict::BoundedClose { .. } => "bounded-close",
            ClosenessVerdict::Diverging { .. } => "diverging",
            ClosenessVerdict::Indeterminate => "indeterminate",
        }
    }
}

/// Sup distances of two maps across an increasing family of windows.
#[derive(Clone, Debug)]
pub struct ClosenessReport {
    pub left: String,
    pub right: String,
    pub windows: Vec<String>,
    pub radii: Vec<BigRational>,
    pub sup_values: Vec<Enclosure>,
    pub witnesses: Vec<Point>,
    pub verdict: ClosenessVerdict,
}

pub fn closeness_trend(
    a: &CoarseMapSpec,
    b: &CoarseMapSpec,
    windows: &[Window],
) -> Result<ClosenessReport> {
    if windows.len() < 3 {
        return Err(Error::TooFewWindows(windows.len()));
    }
    let mut radii = Vec::new();
    let mut sups = Vec::new();
    let mut witnesses = Vec::new();
    let mut descriptions = Vec::new();
    for w in windows {
        let radius = w.radius();
        if let Some(prev) = radii.last() {
            if *prev >= radius {
                return Err(Error::InvalidWindow(
                    "closeness windows must have strictly increasing radii".into(),
                ));
            }
        }
        let sup = sup_distance(a, b, w)?;
        descriptions.push(w.describe());
        radii.push(radius);
        sups.push(sup.value);
        witnesses.push(sup.witness);
    }
    let verdict = trend_verdict(&radii, &sups);
    Ok(ClosenessReport {
        left: a.id(),
        right: b.id(),
        windows: descriptions,
        radii,
        sup_values: sups,
        witnesses,
        verdict,
    })
}

fn trend_verdict(radii: &[BigRational], sups: &[Enclosure]) -> ClosenessVerdict {
    let n = sups.len();
    let last = &sups[n - 1];
    let prev = &sups[n - 2];
    let third = &sups[n - 3];
    let tol = stabilization_tolerance();
    let diff = last.sub(prev).abs();
    if diff.le_rational(&tol) {
        return ClosenessVerdict::BoundedClose {
            bound: last.clone(),
        };
    }
    let factor = divergence_factor();
    let grew = |a: &Enclosure, b: &Enclosure| -> bool {
        // certified b >= 3/2 * a
        b.lo() >= &(a.hi() * &factor)
    };
    if !third.hi().is_zero() && grew(third, prev) && grew(prev, last) {
        let s1 = prev.approx();
        let s2 = last.approx();
        let r1 = radii[n - 2].to_f64().unwrap_or(f64::NAN);
        let r2 = radii[n - 1].to_f64().unwrap_or(f64::NAN);
        let growth_exponent = ((s2 / s1).ln() / (r2 / r1).ln()).abs();
        return ClosenessVerdict::Diverging { growth_exponent };
    }
    if third.hi().is_zero() && prev.hi().is_zero() && !last.hi().is_zero() {
        // A late jump from zero cannot be classified.
        return ClosenessVerdict::Indeterminate;
    }
    ClosenessVerdict::Indeterminate
}

/// Empirical control function of one map on one window.
#[derive(Clone, Debug)]
pub struct BucketStat {
    /// Input distances up to this value fall in the bucket.
    pub upper: BigRational,
    /// Largest observed image distance (after monotone closure).
    pub rho_hat: Option<Enclosure>,
    pub witness: Option<(Point, Point)>,
}

/// Empirical expansion data: how far apart images must drift once inputs
/// separate.
#[derive(Clone, Debug)]
pub struct ExpansionStat {
    /// Pairs at input distance >= this value are considered.
    pub lower: BigRational,
    /// Smallest observed image distance among them.
    pub s_hat: Option<Enclosure>,
    pub witness: Option<(Point, Point)>,
}

#[derive(Clone, Debug)]
pub struct ControlProfile {
    pub map: String,
    pub window: String,
    pub buckets: Vec<BucketStat>,
    pub expansion: Vec<ExpansionStat>,
    pub pairs_examined: usize,
}

impl ControlProfile {
    /// Monotone-closed `rho_hat` at input distance `d`: the value of the
    /// smallest bucket whose upper bound is >= `d`.
    pub fn rho_at(&self, d: &BigRational) -> Option<&Enclosure> {
        self.buckets
            .iter()
            .find(|b| &b.upper >= d)
            .and_then(|b| b.rho_hat.as_ref())
    }

    pub fn rho_at_one(&self) -> Option<&Enclosure> {
        self.rho_at(&BigRational::one())
    }
}

/// Default bucket edges `1, 2, 4, ...` extended to cover `max_needed`.
pub fn default_buckets(max_needed: &BigRational) -> Vec<BigRational> {
    let mut edges = Vec::new();
    let mut edge = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    loop {
        edges.push(edge.clone());
        if &edge >= max_needed || edges.len() > 64 {
            break;
        }
        edge *= &two;
    }
    edges
}

pub fn control_profile(
    f: &CoarseMapSpec,
    window: &Window,
    bucket_uppers: &[BigRational],
) -> Result<ControlProfile> {
    if bucket_uppers.is_empty() {
        return Err(Error::Domain("at least one bucket edge is required".into()));
    }
    for pair in bucket_uppers.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::Domain("bucket edges must be strictly increasing".into()));
        }
    }
    let domain = f.domain();
    let codomain = f.codomain();
    let mut samples = window.samples(&domain)?;
    // Profiles are quadratic in the sample count; stride down large windows
    // deterministically.
    const PROFILE_SAMPLE_CAP: usize = 600;
    if samples.len() > PROFILE_SAMPLE_CAP {
        let stride = samples.len().div_ceil(PROFILE_SAMPLE_CAP);
        samples = samples.into_iter().step_by(stride).collect();
    }
    let images: Vec<Point> = samples
        .iter()
        .map(|p| f.eval(p))
        .collect::<Result<_>>()?;
    let mut buckets: Vec<BucketStat> = bucket_uppers
        .iter()
        .map(|u| BucketStat {
            upper: u.clone(),
            rho_hat: None,
            witness: None,
        })
        .collect();
    let mut expansion: Vec<ExpansionStat> = bucket_uppers
        .iter()
        .map(|u| ExpansionStat {
            lower: u.clone(),
            s_hat: None,
            witness: None,
        })
        .collect();
    let mut pairs = 0usize;
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            let d_in = dist(&samples[i], &samples[j], &domain)?;
            let d_out = dist(&images[i], &images[j], &codomain)?;
            pairs += 1;
            if let Some(b) = buckets.iter_mut().find(|b| d_in.le_rational(&b.upper)) {
                let better = match &b.rho_hat {
                    None => true,
                    Some(cur) => d_out.sup_key_cmp(cur) == Ordering::Greater,
                };
                if better {
                    b.rho_hat = Some(d_out.clone());
                    b.witness = Some((samples[i].clone(), samples[j].clone()));
                }
            }
            for e in expansion.iter_mut() {
                if d_in.ge_rational(&e.lower) {
                    let better = match &e.s_hat {
                        None => true,
                        Some(cur) => d_out.sup_key_cmp(cur) == Ordering::Less,
                    };
                    if better {
                        e.s_hat = Some(d_out.clone());
                        e.witness = Some((samples[i].clone(), samples[j].clone()));
                    }
                } else {
                    break;
                }
            }
        }
    }
    // Monotone closure: rho_hat may only grow with the bucket edge.
    let mut running: Option<(Enclosure, Option<(Point, Point)>)> = None;
    for b in buckets.iter_mut() {
        if let Some(cur) = &b.rho_hat {
            let keep = match &running {
                None => true,
                Some((r, _)) => cur.sup_key_cmp(r) == Ordering::Greater,
            };
            if keep {
                running = Some((cur.clone(), b.witness.clone()));
            }
        }
        if let Some((r, w)) = &running {
            b.rho_hat = Some(r.clone());
            b.witness = w.clone();
        }
    }
    Ok(ControlProfile {
        map: f.id(),
        window: window.describe(),
        buckets,
        expansion,
        pairs_examined: pairs,
    })
}

/// A certificate that a map family expands some bounded-distance pairs
/// beyond every tested threshold.
#[derive(Clone, Debug)]
pub struct NonControlledWitness {
    /// Largest input distance among the recorded pairs.
    pub input_bound: BigRational,
    pub pairs: Vec<(Point, Point)>,
    /// Strictly increasing image distances, one per recorded pair.
    pub image_distances: Vec<Enclosure>,
    pub thresholds: Vec<BigRational>,
}

/// Walk a pair family, recording pairs whose image distances climb past
/// every threshold. Returns `None` when the family is exhausted first.
pub fn non_controlled_witness<I>(
    f: &CoarseMapSpec,
    pair_family: I,
    thresholds: &[BigRational],
) -> Result<Option<NonControlledWitness>>
where
    I: IntoIterator<Item = (Point, Point)>,
{
    if thresholds.is_empty() {
        return Err(Error::Domain("a threshold schedule is required".into()));
    }
    for pair in thresholds.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::Domain("thresholds must be strictly increasing".into()));
        }
    }
    let domain = f.domain();
    let codomain = f.codomain();
    let mut recorded: Vec<(Point, Point)> = Vec::new();
    let mut distances: Vec<Enclosure> = Vec::new();
    let mut input_bound = BigRational::zero();
    let mut next = 0usize;
    for (x, y) in pair_family {
        let d_in = dist(&x, &y, &domain)?;
        if d_in.hi() > &input_bound {
            input_bound = d_in.hi().clone();
        }
        let d_out = dist(&f.eval(&x)?, &f.eval(&y)?, &codomain)?;
        let beats_threshold = d_out.gt_rational(&thresholds[next]);
        let strictly_grows = match distances.last() {
            None => true,
            Some(last) => d_out.lo() > last.hi(),
        };
        if beats_threshold && strictly_grows {
            recorded.push((x, y));
            distances.push(d_out.clone());
            while next < thresholds.len() && d_out.gt_rational(&thresholds[next]) {
                next += 1;
            }
            if next == thresholds.len() {
                return Ok(Some(NonControlledWitness {
                    input_bound,
                    pairs: recorded,
                    image_distances: distances,
                    thresholds: thresholds.to_vec(),
                }));
            }
        }
    }
    Ok(None)
}

/// Certified coarse-inverse data for a pair of maps.
#[derive(Clone, Debug)]
pub struct EquivalencePair {
    pub forward: String,
    pub backward: String,
    /// Max of the two composition sup distances on the largest window.
    pub bound: Enclosure,
    /// Both composition trends came back `BoundedClose`.
    pub ok: bool,
    /// `backward . forward` vs the identity on the domain.
    pub backward_forward: ClosenessReport,
    /// `forward . backward` vs the identity on the codomain.
    pub forward_backward: ClosenessReport,
    pub forward_profile: ControlProfile,
    pub backward_profile: ControlProfile,
}

/// Check that `phi` and `psi` are coarse inverses on the tested windows.
///
/// The same window family is sampled in both spaces. A `Diverging` or
/// `Indeterminate` composition trend is reported through `ok = false`, not
/// as an error.
pub fn coarse_inverse_check(
    phi: &CoarseMapSpec,
    psi: &CoarseMapSpec,
    windows: &[Window],
) -> Result<EquivalencePair> {
    if phi.domain() != psi.codomain() || phi.codomain() != psi.domain() {
        return Err(Error::SpaceMismatch(format!(
            "{} and {} do not connect the same pair of spaces",
            phi.id(),
            psi.id()
        )));
    }
    let x = phi.domain();
    let y = phi.codomain();
    let psi_phi = CoarseMapSpec::compose(psi, phi)?;
    let phi_psi = CoarseMapSpec::compose(phi, psi)?;
    let id_x = CoarseMapSpec::identity(x);
    let id_y = CoarseMapSpec::identity(y);
    let backward_forward = closeness_trend(&psi_phi, &id_x, windows)?;
    let forward_backward = closeness_trend(&phi_psi, &id_y, windows)?;
    let bound = backward_forward
        .sup_values
        .last()
        .expect("trend nonempty")
        .max_with(forward_backward.sup_values.last().expect("trend nonempty"));
    let profile_window = windows.first().expect("trend checked arity");
    let buckets = default_buckets(&BigRational::from_integer(BigInt::from(16)));
    let forward_profile = control_profile(phi, profile_window, &buckets)?;
    let backward_profile = control_profile(psi, profile_window, &buckets)?;
    let ok = backward_forward.verdict.is_bounded()
        && forward_backward.verdict.is_bounded()
        && forward_profile.rho_at_one().is_some()
        && backward_profile.rho_at_one().is_some();
    Ok(EquivalencePair {
        forward: phi.id(),
        backward: psi.id(),
        bound,
        ok,
        backward_forward,
        forward_backward,
        forward_profile,
        backward_profile,
    })
}

/// Result of the quasi-isometry lower-bound sweep.
#[derive(Clone, Debug)]
pub struct QiLowerBound {
    pub holds: bool,
    /// Pair minimizing `d(phi x, phi x') - (d(x, x')/rho1 - 1 - 2B/rho1)`.
    pub worst_pair: Option<(Point, Point)>,
    pub worst_slack: Option<Enclosure>,
    pub pairs_examined: usize,
}

/// Verify `d(phi x, phi x') >= d(x, x') / rho1 - 1 - 2 B / rho1` on all
/// sampled pairs.
pub fn qi_lower_bound_check(
    phi: &CoarseMapSpec,
    rho1: &BigRational,
    b: &BigRational,
    window: &Window,
) -> Result<QiLowerBound> {
    if !rho1.is_positive() {
        return Err(Error::ZeroRho);
    }
    let domain = phi.domain();
    let codomain = phi.codomain();
    let samples = window.samples(&domain)?;
    let n = samples.len() as u64;
    if n * (n - 1) / 2 > PAIR_SWEEP_LIMIT {
        return Err(Error::InvalidWindow(format!(
            "window yields {n} samples; the pair sweep would be too large"
        )));
    }
    let images: Vec<Point> = samples
        .iter()
        .map(|p| phi.eval(p))
        .collect::<Result<_>>()?;
    let offset = BigRational::one() + BigRational::from_integer(BigInt::from(2)) * b / rho1;
    let mut worst: Option<(Enclosure, (Point, Point))> = None;
    let mut pairs = 0usize;
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            pairs += 1;
            let d_in = dist(&samples[i], &samples[j], &domain)?;
            let d_out = dist(&images[i], &images[j], &codomain)?;
            let required = Enclosure::new(d_in.lo() / rho1 - &offset, d_in.hi() / rho1 - &offset);
            let slack = d_out.sub(&required);
            let update = match &worst {
                None => true,
                Some((cur, _)) => slack.sup_key_cmp(cur) == Ordering::Less,
            };
            if update {
                worst = Some((slack, (samples[i].clone(), samples[j].clone())));
            }
        }
    }
    let (worst_slack, worst_pair) = match worst {
        Some((s, p)) => (Some(s), Some(p)),
        None => (None, None),
    };
    let holds = match &worst_slack {
        None => true,
        Some(s) => !s.lo().is_negative(),
    };
    Ok(QiLowerBound {
        holds,
        worst_pair,
        worst_slack,
        pairs_examined: pairs,
    })
}

/// Output of [`section_of_surjection`].
#[derive(Clone, Debug)]
pub struct SectionReport {
    /// The extracted section as a tabulated map.
    pub section: CoarseMapSpec,
    /// `phi . section = id` held exactly on every sampled point.
    pub right_identity_exact: bool,
    /// Trend of `section . g` vs `f . section`.
    pub closeness: ClosenessReport,
    /// Sup of `d(section . g, f . section)` on the largest window.
    pub measured_sup: Enclosure,
    /// `rho_section(E) + B` from the composition-stability chain, where
    /// `E = sup d(phi . f, g . phi)` and `B = sup d(section . phi, id)`.
    pub predicted_bound: BigRational,
    pub intertwining_defect: Enclosure,
}

/// Extract a section `psi` of a surjective `phi` (deterministically: the
/// lexicographically minimal preimage) and certify the closeness of
/// `psi . g` and `f . psi`.
pub fn section_of_surjection(
    phi: &CoarseMapSpec,
    f: &CoarseMapSpec,
    g: &CoarseMapSpec,
    window: &Window,
) -> Result<SectionReport> {
    let x_space = phi.domain();
    let y_space = phi.codomain();
    if f.domain() != x_space || f.codomain() != x_space {
        return Err(Error::SpaceMismatch(format!(
            "{} must be an endomorphism of {}",
            f.id(),
            x_space
        )));
    }
    if g.domain() != y_space || g.codomain() != y_space {
        return Err(Error::SpaceMismatch(format!(
            "{} must be an endomorphism of {}",
            g.id(),
            y_space
        )));
    }
    // The section must also cover g(window), so collect every needed y.
    let y_window_samples = window.samples(&y_space)?;
    let mut needed: Vec<Point> = Vec::new();
    for y in &y_window_samples {
        needed.push(y.clone());
        needed.push(g.eval(y)?);
    }
    needed.sort();
    needed.dedup();
    let needed_r = needed
        .iter()
        .filter_map(|p| match p {
            Point::Strip { r, .. } | Point::Grid { r, .. } => Some(r.clone()),
            Point::Halfline(v) => v.as_rational().cloned(),
        })
        .max()
        .unwrap_or_else(BigRational::zero);
    // Build the preimage table from an X pool large enough to reach every
    // needed y; enlarge the pool geometrically if the first guess misses.
    let base_pool = window.covering_r(&needed_r)?;
    let mut table: Option<BTreeMap<Point, Point>> = None;
    let mut missing: Option<Point> = None;
    for attempt in 0..4u32 {
        let pool_window = base_pool.with_scaled_radius(1 << attempt, 1)?;
        let mut pool = pool_window.samples(&x_space)?;
        pool.sort();
        let mut image_to_min: BTreeMap<Point, Point> = BTreeMap::new();
        for x in pool {
            let y = phi.eval(&x)?;
            image_to_min.entry(y).or_insert(x);
        }
        missing = needed
            .iter()
            .find(|y| !image_to_min.contains_key(*y))
            .cloned();
        if missing.is_none() {
            let entries: BTreeMap<Point, Point> = needed
                .iter()
                .map(|y| (y.clone(), image_to_min[y].clone()))
                .collect();
            table = Some(entries);
            break;
        }
    }
    let Some(entries) = table else {
        return Err(Error::NotSurjective(
            missing.map(|p| p.to_string()).unwrap_or_default(),
        ));
    };
    let section = CoarseMapSpec::table(TableMap {
        name: format!("section({})", phi.id()),
        domain: y_space.clone(),
        codomain: x_space.clone(),
        entries: entries.clone(),
    });
    // phi . section = id, exactly, on every tabulated point.
    let mut right_identity_exact = true;
    for (y, x) in &entries {
        if &phi.eval(x)? != y {
            right_identity_exact = false;
            break;
        }
    }
    // Closeness of section . g vs f . section over nested windows.
    let psi_g = CoarseMapSpec::compose(&section, g)?;
    let f_psi = CoarseMapSpec::compose(f, &section)?;
    let nested = window.nested(3)?;
    let closeness = closeness_trend(&psi_g, &f_psi, &nested)?;
    let measured_sup = closeness
        .sup_values
        .last()
        .expect("trend nonempty")
        .clone();
    // Predicted bound from the composition-stability chain.
    let phi_f = CoarseMapSpec::compose(phi, f)?;
    let g_phi = CoarseMapSpec::compose(g, phi)?;
    let intertwining = sup_distance(&phi_f, &g_phi, window)?;
    let sec_phi = CoarseMapSpec::compose(&section, phi)?;
    let id_x = CoarseMapSpec::identity(x_space.clone());
    let retraction = sup_distance(&sec_phi, &id_x, window)?;
    let defect_hi = intertwining.value.hi().clone();
    let buckets = default_buckets(&defect_hi.clone().max(BigRational::one()));
    let profile = control_profile(&section, window, &buckets)?;
    let rho_of_defect = if defect_hi.is_zero() {
        BigRational::zero()
    } else {
        profile
            .rho_at(&defect_hi)
            .map(|e| e.hi().clone())
            .unwrap_or_else(BigRational::zero)
    };
    let predicted_bound = rho_of_defect + retraction.value.hi();
    Ok(SectionReport {
        section,
        right_identity_exact,
        closeness,
        measured_sup,
        predicted_bound,
        intertwining_defect: intertwining.value,
    })
}

/// Human-readable constants block for JSON reports.
pub fn constants_json(pairs: &[(&str, &BigRational)]) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for (name, value) in pairs {
        map.insert(
            (*name).to_string(),
            serde_json::json!({
                "exact": rational_to_string(value),
                "approx": value.to_f64().unwrap_or(f64::NAN),
            }),
        );
    }
    serde_json::Value::Object(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_rational;
    use crate::maps::halfline_point;

    fn rat(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    fn strip_window(r_hi: &str, step: &str) -> Window {
        Window::strip(rat(r_hi), rat(step)).unwrap()
    }

    #[test]
    fn sup_distance_of_identical_maps_is_zero() {
        let f = CoarseMapSpec::parse("strip.f?k=2").unwrap();
        let w = strip_window("8", "1/2");
        let sup = sup_distance(&f, &f, &w).unwrap();
        assert_eq!(sup.value, Enclosure::exact(rat("0")));
    }

    #[test]
    fn sup_distance_f1_vs_g1_is_one() {
        let f = CoarseMapSpec::parse("strip.f?k=1").unwrap();
        let g = CoarseMapSpec::parse("strip.g?k=1").unwrap();
        let w = strip_window("16", "1/2");
        let sup = sup_distance(&f, &g, &w).unwrap();
        assert_eq!(sup.value, Enclosure::exact(rat("1")));
    }

    #[test]
    fn squares_f2_vs_g_is_within_half() {
        let f = CoarseMapSpec::parse("squares.f?k=2").unwrap();
        let g = CoarseMapSpec::parse("squares.g").unwrap();
        let w = Window::halfline(rat("1"), rat("100"), rat("1/8")).unwrap();
        let sup = sup_distance(&f, &g, &w).unwrap();
        assert!(sup.value.le_rational(&rat("1/2")));
    }

    #[test]
    fn trend_bounded_for_close_maps_diverging_for_far_ones() {
        let f = CoarseMapSpec::parse("squares.f?k=2").unwrap();
        let g = CoarseMapSpec::parse("squares.g").unwrap();
        let base = Window::halfline(rat("1"), rat("129"), rat("1/8")).unwrap();
        let windows = base.nested(4).unwrap();
        let report = closeness_trend(&f, &g, &windows).unwrap();
        match &report.verdict {
            ClosenessVerdict::BoundedClose { bound } => {
                // k = 2, n = 1: within 2^(n-k) = 1/2.
                assert!(bound.le_rational(&rat("1/2")), "bound {bound}");
            }
            other => panic!("expected bounded verdict, got {other:?}"),
        }
        // Nested windows sample supersets, so the sups never decrease.
        for pair in report.sup_values.windows(2) {
            assert!(pair[0].hi() <= pair[1].hi());
        }

        // f_1^2 vs g^2 diverges quadratically.
        let f2 = CoarseMapSpec::parse("pow(squares.f?k=1,2)").unwrap();
        let g2 = CoarseMapSpec::parse("pow(squares.g,2)").unwrap();
        let report = closeness_trend(&f2, &g2, &windows).unwrap();
        match &report.verdict {
            ClosenessVerdict::Diverging { growth_exponent } => {
                assert!(*growth_exponent > 1.5, "exponent {growth_exponent}");
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn trend_identical_maps_bounded_by_zero() {
        let g = CoarseMapSpec::parse("strip.g?k=2").unwrap();
        let windows = strip_window("32", "1/2").nested(3).unwrap();
        let report = closeness_trend(&g, &g, &windows).unwrap();
        match &report.verdict {
            ClosenessVerdict::BoundedClose { bound } => {
                assert_eq!(bound, &Enclosure::exact(rat("0")))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn control_profile_of_identity_tracks_input_distance() {
        let id = CoarseMapSpec::identity(Space::Strip { k: 2 });
        let w = strip_window("8", "1/2");
        let buckets = [rat("1"), rat("2"), rat("4"), rat("8")];
        let profile = control_profile(&id, &w, &buckets).unwrap();
        for b in &profile.buckets {
            let rho = b.rho_hat.as_ref().unwrap();
            assert!(rho.le_rational(&b.upper));
            assert!(rho.ge_rational(&(&b.upper - rat("1")).max(rat("0"))));
        }
    }

    #[test]
    fn control_profile_of_strip_g_records_every_bucket() {
        // g_k doubles the upper rays, so image distances inside one bucket
        // can exceed the input distance; the profile records whatever the
        // window realizes, monotone in the bucket edge.
        let g = CoarseMapSpec::parse("strip.g?k=2").unwrap();
        let w = strip_window("16", "1/2");
        let buckets = [rat("1"), rat("2"), rat("4"), rat("8")];
        let profile = control_profile(&g, &w, &buckets).unwrap();
        assert!(profile.rho_at_one().is_some());
        let mut prev: Option<BigRational> = None;
        for b in &profile.buckets {
            let rho = b.rho_hat.as_ref().expect("every bucket is populated");
            assert!(b.witness.is_some());
            if let Some(p) = &prev {
                assert!(rho.hi() >= p);
            }
            prev = Some(rho.hi().clone());
        }
    }

    #[test]
    fn control_profile_expansion_tracks_identity() {
        let id = CoarseMapSpec::identity(Space::Strip { k: 1 });
        let w = strip_window("8", "1");
        let buckets = [rat("1"), rat("2"), rat("4")];
        let profile = control_profile(&id, &w, &buckets).unwrap();
        for e in &profile.expansion {
            let s = e.s_hat.as_ref().unwrap();
            assert!(s.ge_rational(&e.lower));
        }
    }

    #[test]
    fn grid_phi_profile_tracks_the_index_shift() {
        let phi = CoarseMapSpec::parse("grid.phi").unwrap();
        let w = Window::grid(1, 6, rat("8"), rat("1")).unwrap();
        let buckets = [rat("1"), rat("2"), rat("4"), rat("8"), rat("16"), rat("32")];
        let profile = control_profile(&phi, &w, &buckets).unwrap();
        for b in &profile.buckets {
            if let Some(rho) = &b.rho_hat {
                // Index gaps d = (n - m)(n + m) blow up to (n - m)(n + m + 2),
                // a factor of at most (n + m + 2)/(n + m) <= 5/3; pairs
                // within one halfline are moved isometrically. For
                // adjacent-halfline distances (d <= 7) this is within d + 2.
                assert!(
                    rho.le_rational(&(&b.upper * rat("5/3"))),
                    "rho({}) = {rho}",
                    b.upper
                );
                if b.upper <= rat("7") {
                    assert!(
                        rho.le_rational(&(&b.upper + rat("3"))),
                        "rho({}) = {rho}",
                        b.upper
                    );
                }
            }
        }
    }

    #[test]
    fn non_controlled_witness_for_strip_f_full_cycle() {
        for k in 1..=3u32 {
            let f = CoarseMapSpec::parse(&format!("strip.f?k={k}"))
                .unwrap()
                .iterate(k + 1)
                .unwrap();
            let pairs = (0..=20u32).map(|i| {
                let m = rat(&(1u64 << i).to_string());
                (Point::strip(m.clone(), 0), Point::strip(m, k as i64))
            });
            let thresholds: Vec<BigRational> =
                (0..10).map(|i| rat(&(1u64 << (2 * i)).to_string())).collect();
            let w = non_controlled_witness(&f, pairs, &thresholds)
                .unwrap()
                .expect("witness must exist");
            assert_eq!(w.input_bound, rat(&k.to_string()));
            // Image distances are exactly max(3 * 2^(k-1) * m, 1).
            for (pair, d) in w.pairs.iter().zip(&w.image_distances) {
                let Point::Strip { r, .. } = &pair.0 else { panic!() };
                let expected = (rat("3") * pow2_rational(k as i32 - 1) * r).max(rat("1"));
                assert_eq!(d, &Enclosure::exact(expected));
            }
        }
    }

    #[test]
    fn no_witness_for_controlled_iterates() {
        for k in 1..=3u32 {
            let g = CoarseMapSpec::parse(&format!("strip.g?k={k}"))
                .unwrap()
                .iterate(k + 1)
                .unwrap();
            let pairs = (0..=20u32).map(|i| {
                let m = rat(&(1u64 << i).to_string());
                (Point::strip(m.clone(), 0), Point::strip(m, k as i64))
            });
            let thresholds: Vec<BigRational> =
                (0..6).map(|i| rat(&(1u64 << (2 * i + 4)).to_string())).collect();
            assert!(non_controlled_witness(&g, pairs, &thresholds)
                .unwrap()
                .is_none());
        }
        let id = CoarseMapSpec::identity(Space::Strip { k: 1 });
        let pairs = (0..=10u32).map(|i| {
            let m = rat(&(1u64 << i).to_string());
            (Point::strip(m.clone(), 0), Point::strip(m, 1))
        });
        let thresholds = [rat("4")];
        assert!(non_controlled_witness(&id, pairs, &thresholds)
            .unwrap()
            .is_none());
    }

    #[test]
    fn grid_pair_bounds() {
        let windows = Window::grid(1, 12, rat("16"), rat("1"))
            .unwrap()
            .nested(3)
            .unwrap();
        let phi = CoarseMapSpec::parse("grid.phi").unwrap();
        let cap_psi = CoarseMapSpec::parse("grid.PsiInv").unwrap();
        let pair = coarse_inverse_check(&phi, &cap_psi, &windows).unwrap();
        assert!(pair.ok);
        assert_eq!(pair.bound, Enclosure::exact(rat("3")));

        let psi = CoarseMapSpec::parse("grid.psi").unwrap();
        let cap_phi = CoarseMapSpec::parse("grid.PhiInv").unwrap();
        let pair = coarse_inverse_check(&psi, &cap_phi, &windows).unwrap();
        assert!(pair.ok);
        assert_eq!(pair.bound, Enclosure::exact(rat("1")));
    }

    #[test]
    fn identity_pair_has_zero_bound() {
        let id = CoarseMapSpec::identity(Space::Strip { k: 1 });
        let windows = strip_window("16", "1").nested(3).unwrap();
        let pair = coarse_inverse_check(&id, &id, &windows).unwrap();
        assert!(pair.ok);
        assert_eq!(pair.bound, Enclosure::exact(rat("0")));
    }

    #[test]
    fn qi_lower_bound_for_identity_and_violation_for_strip_power() {
        let id = CoarseMapSpec::identity(Space::Strip { k: 1 });
        let w = strip_window("12", "1");
        let r = qi_lower_bound_check(&id, &rat("1"), &rat("0"), &w).unwrap();
        assert!(r.holds);

        // f_k^{k+1} contracts some distant pairs down to bounded image
        // distance: pairs ((r,0), (r/4,k)) share the image first coordinate.
        let k = 2u32;
        let f = CoarseMapSpec::parse("strip.f?k=2").unwrap().iterate(k + 1).unwrap();
        let w = strip_window("64", "1");
        let r = qi_lower_bound_check(&f, &rat("1"), &rat("2"), &w).unwrap();
        assert!(!r.holds, "worst slack {:?}", r.worst_slack);
        assert!(r.worst_pair.is_some());
    }

    #[test]
    fn certified_pairs_satisfy_the_qi_lower_bound() {
        // When the pair check certifies B and the backward map has profile
        // rho, the forward map obeys d(phi x, phi x') >= d/rho(1) - 1 -
        // 2B/rho(1) on the tested window.
        let windows = Window::grid(1, 10, rat("8"), rat("1"))
            .unwrap()
            .nested(3)
            .unwrap();
        for (fwd, bwd) in [("grid.phi", "grid.PsiInv"), ("grid.psi", "grid.PhiInv")] {
            let phi = CoarseMapSpec::parse(fwd).unwrap();
            let psi = CoarseMapSpec::parse(bwd).unwrap();
            let pair = coarse_inverse_check(&phi, &psi, &windows).unwrap();
            assert!(pair.ok);
            let rho1 = pair
                .backward_profile
                .rho_at_one()
                .expect("profile has a unit bucket")
                .hi()
                .clone();
            let r = qi_lower_bound_check(&phi, &rho1, pair.bound.hi(), windows.last().unwrap())
                .unwrap();
            assert!(r.holds, "{fwd}: worst slack {:?}", r.worst_slack);
        }
    }

    #[test]
    fn qi_lower_bound_rejects_zero_rho() {
        let id = CoarseMapSpec::identity(Space::Strip { k: 1 });
        let w = strip_window("4", "1");
        assert!(matches!(
            qi_lower_bound_check(&id, &rat("0"), &rat("0"), &w),
            Err(Error::ZeroRho)
        ));
    }

    #[test]
    fn section_of_grid_phiinv_recovers_the_inclusion() {
        let cap_phi = CoarseMapSpec::parse("grid.PhiInv").unwrap();
        let f = CoarseMapSpec::parse("grid.f").unwrap();
        let g = CoarseMapSpec::parse("grid.g").unwrap();
        let w = Window::grid(1, 8, rat("8"), rat("1/2")).unwrap();
        let report = section_of_surjection(&cap_phi, &f, &g, &w).unwrap();
        assert!(report.right_identity_exact);
        assert_eq!(report.measured_sup, Enclosure::exact(rat("0")));
        // The minimal preimage under PhiInv is the point itself.
        let y = Point::grid(3, rat("5/2"), 4);
        assert_eq!(report.section.eval(&y).unwrap(), y);
    }

    #[test]
    fn section_of_identity_is_identity() {
        let id = CoarseMapSpec::identity(Space::Strip { k: 1 });
        let w = strip_window("8", "1/2");
        let report = section_of_surjection(&id, &id, &id, &w).unwrap();
        assert!(report.right_identity_exact);
        assert_eq!(report.measured_sup, Enclosure::exact(rat("0")));
        assert!(report.closeness.verdict.is_bounded());
    }

    #[test]
    fn section_of_label_collapse_stays_under_predicted_bound() {
        let k = 3u32;
        let collapse = CoarseMapSpec::strip_collapse(k).unwrap();
        let f = CoarseMapSpec::parse(&format!("strip.g?k={k}")).unwrap();
        let g = CoarseMapSpec::parse(&format!("strip.g?k={}", k - 1)).unwrap();
        let w = strip_window("16", "1/2");
        let report = section_of_surjection(&collapse, &f, &g, &w).unwrap();
        assert!(report.right_identity_exact);
        assert!(report.measured_sup.le_rational(&report.predicted_bound));
        assert_eq!(report.measured_sup, Enclosure::exact(rat("1")));
    }

    #[test]
    fn non_surjective_map_is_rejected() {
        // phi: X -> Y shifts the index up and never reaches n = 1.
        let phi = CoarseMapSpec::parse("grid.phi").unwrap();
        let f = CoarseMapSpec::parse("grid.f").unwrap();
        let g = CoarseMapSpec::parse("grid.g").unwrap();
        let w = Window::grid(1, 4, rat("4"), rat("1")).unwrap();
        assert!(matches!(
            section_of_surjection(&phi, &f, &g, &w),
            Err(Error::NotSurjective(_))
        ));
    }

    #[test]
    fn closeness_is_symmetric_and_triangular_on_samples() {
        let f = CoarseMapSpec::parse("strip.f?k=2").unwrap();
        let g = CoarseMapSpec::parse("strip.g?k=2").unwrap();
        let h = CoarseMapSpec::parse("strip.ginv?k=2").unwrap();
        let w = strip_window("8", "1/2");
        let ab = sup_distance(&f, &g, &w).unwrap().value;
        let ba = sup_distance(&g, &f, &w).unwrap().value;
        assert_eq!(ab, ba);
        let ac = sup_distance(&f, &h, &w).unwrap().value;
        let bc = sup_distance(&g, &h, &w).unwrap().value;
        assert!(ac.hi() <= &(ab.hi() + bc.hi()));
    }

    #[test]
    fn sup_distance_rejects_mismatched_spaces() {
        let f = CoarseMapSpec::parse("strip.f?k=1").unwrap();
        let g = CoarseMapSpec::parse("strip.g?k=2").unwrap();
        let w = strip_window("4", "1");
        assert!(matches!(
            sup_distance(&f, &g, &w),
            Err(Error::SpaceMismatch(_))
        ));
    }

    #[test]
    fn closeness_trend_needs_three_windows() {
        let g = CoarseMapSpec::parse("strip.g?k=1").unwrap();
        let windows = strip_window("8", "1").nested(2).unwrap();
        assert!(matches!(
            closeness_trend(&g, &g, &windows),
            Err(Error::TooFewWindows(2))
        ));
    }

    #[test]
    fn diverging_pair_is_reported_not_thrown() {
        // f_1^2 stretches ray 1 by 4, so pairing it with the identity
        // cannot be a coarse inverse pair; the verdict says so.
        let f2 = CoarseMapSpec::parse("pow(strip.f?k=1,2)").unwrap();
        let id = CoarseMapSpec::identity(Space::Strip { k: 1 });
        let windows = strip_window("64", "1").nested(4).unwrap();
        let pair = coarse_inverse_check(&f2, &id, &windows).unwrap();
        assert!(!pair.ok);
        assert!(matches!(
            pair.backward_forward.verdict,
            ClosenessVerdict::Diverging { .. }
        ));
    }

    #[test]
    fn table_misses_are_errors() {
        let cap_phi = CoarseMapSpec::parse("grid.PhiInv").unwrap();
        let f = CoarseMapSpec::parse("grid.f").unwrap();
        let g = CoarseMapSpec::parse("grid.g").unwrap();
        let w = Window::grid(1, 3, rat("4"), rat("1")).unwrap();
        let section = section_of_surjection(&cap_phi, &f, &g, &w).unwrap().section;
        let outside = Point::grid(30, rat("1"), 1);
        assert!(matches!(
            section.eval(&outside),
            Err(Error::TableMiss(_))
        ));
    }

    #[test]
    fn witness_search_validates_thresholds() {
        let id = CoarseMapSpec::identity(Space::Strip { k: 1 });
        let pairs = vec![(Point::strip(rat("0"), 0), Point::strip(rat("0"), 1))];
        assert!(non_controlled_witness(&id, pairs.clone(), &[]).is_err());
        let bad = [rat("4"), rat("2")];
        assert!(non_controlled_witness(&id, pairs, &bad).is_err());
    }

    #[test]
    fn iterate_checks_endomorphism() {
        let phi = CoarseMapSpec::parse("grid.phi").unwrap();
        assert!(matches!(iterate(&phi, 2), Err(Error::NotEndomorphism(_))));
        let x = halfline_point(rat("3/2"));
        let g3 = iterate(&CoarseMapSpec::parse("squares.g").unwrap(), 3).unwrap();
        assert_eq!(g3.eval(&x).unwrap(), halfline_point(rat("6561/256")));
    }
}
