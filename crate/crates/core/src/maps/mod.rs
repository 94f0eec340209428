//! Named total maps with evaluation, optional exact inverses, and optional
//! closed-form iterates.
//!
//! A [`CoarseMapSpec`] wraps one map of the three families (or an identity,
//! a composition, a power, a synthetic label-collapsing surjection, or a
//! tabulated section) behind a stable string identifier such as
//! `squares.f?k=2`, `strip.g?k=3`, `grid.PsiInv`, or `pow(strip.f?k=2,3)`.
//! The identifiers appear in CLI configuration and in reports.

pub mod grid;
pub mod squares;
pub mod strip;

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::exact::ExactReal;
use crate::space::{Point, Space};

use grid::{grid_eval, grid_pow, GridMap};
use squares::{squares_eval, squares_pow, SquaresMap};
use strip::{strip_eval, strip_pow_closed, StripMap, StripPowForm};

/// A finite, explicitly tabulated map (used for extracted sections).
#[derive(Clone, Debug)]
pub struct TableMap {
    pub name: String,
    pub domain: Space,
    pub codomain: Space,
    pub entries: BTreeMap<Point, Point>,
}

#[derive(Clone, Debug)]
pub enum MapKind {
    Squares(SquaresMap),
    Strip(StripMap),
    Grid(GridMap),
    Identity(Space),
    /// Label-collapsing surjection `strip(k) -> strip(k-1)`,
    /// `(r, j) -> (r, min(j, k-1))`.
    StripCollapse { k: u32 },
    Table(TableMap),
    Pow { inner: Box<MapKind>, n: u32 },
    Compose { outer: Box<MapKind>, inner: Box<MapKind> },
}

/// A named total map between two of the library's spaces.
#[derive(Clone, Debug)]
pub struct CoarseMapSpec {
    kind: MapKind,
}

impl CoarseMapSpec {
    pub fn new(kind: MapKind) -> Result<Self> {
        validate_kind(&kind)?;
        Ok(CoarseMapSpec { kind })
    }

    pub fn identity(space: Space) -> Self {
        CoarseMapSpec {
            kind: MapKind::Identity(space),
        }
    }

    pub fn squares(map: SquaresMap) -> Result<Self> {
        map.validate()?;
        Ok(CoarseMapSpec {
            kind: MapKind::Squares(map),
        })
    }

    pub fn strip(map: StripMap) -> Result<Self> {
        map.validate()?;
        Ok(CoarseMapSpec {
            kind: MapKind::Strip(map),
        })
    }

    pub fn grid(map: GridMap) -> Self {
        CoarseMapSpec {
            kind: MapKind::Grid(map),
        }
    }

    pub fn strip_collapse(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("label collapse needs k >= 1".into()));
        }
        Ok(CoarseMapSpec {
            kind: MapKind::StripCollapse { k },
        })
    }

    pub fn table(table: TableMap) -> Self {
        CoarseMapSpec {
            kind: MapKind::Table(table),
        }
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn id(&self) -> String {
        kind_id(&self.kind)
    }

    pub fn domain(&self) -> Space {
        kind_domain(&self.kind)
    }

    pub fn codomain(&self) -> Space {
        kind_codomain(&self.kind)
    }

    /// `n`-fold composition; closed iterate forms are used on evaluation
    /// when the family provides one.
    pub fn iterate(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("iterate needs n >= 1".into()));
        }
        if self.domain() != self.codomain() {
            return Err(Error::NotEndomorphism(self.id()));
        }
        if n == 1 {
            return Ok(self.clone());
        }
        let kind = match &self.kind {
            MapKind::Pow { inner, n: m } => MapKind::Pow {
                inner: inner.clone(),
                n: m.checked_mul(n).ok_or_else(|| {
                    Error::Domain("iterate power overflow".into())
                })?,
            },
            other => MapKind::Pow {
                inner: Box::new(other.clone()),
                n,
            },
        };
        Ok(CoarseMapSpec { kind })
    }

    /// `outer . inner`.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        if inner.codomain() != outer.domain() {
            return Err(Error::NotComposable(format!(
                "{} maps into {}, but {} starts from {}",
                inner.id(),
                inner.codomain(),
                outer.id(),
                outer.domain()
            )));
        }
        Ok(CoarseMapSpec {
            kind: MapKind::Compose {
                outer: Box::new(outer.kind.clone()),
                inner: Box::new(inner.kind.clone()),
            },
        })
    }

    /// The exact inverse, for the bijective families.
    pub fn inverse(&self) -> Option<Self> {
        let kind = kind_inverse(&self.kind)?;
        Some(CoarseMapSpec { kind })
    }

    pub fn eval(&self, p: &Point) -> Result<Point> {
        if !self.domain().contains(p) {
            return Err(Error::NotInSpace {
                point: p.to_string(),
                space: self.domain().to_string(),
            });
        }
        eval_kind(&self.kind, p)
    }

    pub fn parse(s: &str) -> Result<Self> {
        let kind = parse_kind(s.trim())?;
        CoarseMapSpec::new(kind)
    }
}

fn validate_kind(kind: &MapKind) -> Result<()> {
    match kind {
        MapKind::Squares(m) => m.validate(),
        MapKind::Strip(m) => m.validate(),
        MapKind::StripCollapse { k } if *k == 0 => {
            Err(Error::Domain("label collapse needs k >= 1".into()))
        }
        MapKind::Pow { inner, n } => {
            if *n == 0 {
                return Err(Error::Domain("iterate needs n >= 1".into()));
            }
            validate_kind(inner)?;
            if kind_domain(inner) != kind_codomain(inner) {
                return Err(Error::NotEndomorphism(kind_id(inner)));
            }
            Ok(())
        }
        MapKind::Compose { outer, inner } => {
            validate_kind(outer)?;
            validate_kind(inner)?;
            if kind_codomain(inner) != kind_domain(outer) {
                return Err(Error::NotComposable(format!(
                    "{} then {}",
                    kind_id(inner),
                    kind_id(outer)
                )));
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

fn kind_id(kind: &MapKind) -> String {
    match kind {
        MapKind::Squares(m) => format!("squares.{}", m.id_fragment()),
        MapKind::Strip(m) => format!("strip.{}", m.id_fragment()),
        MapKind::Grid(m) => format!("grid.{}", m.name()),
        MapKind::Identity(space) => format!("id.{}", space.id_string()),
        MapKind::StripCollapse { k } => format!("strip.collapse?k={k}"),
        MapKind::Table(t) => t.name.clone(),
        MapKind::Pow { inner, n } => format!("pow({},{n})", kind_id(inner)),
        MapKind::Compose { outer, inner } => {
            format!("compose({},{})", kind_id(outer), kind_id(inner))
        }
    }
}

fn kind_domain(kind: &MapKind) -> Space {
    match kind {
        MapKind::Squares(_) => Space::SquaresHalfline,
        MapKind::Strip(m) => Space::Strip { k: m.k() },
        MapKind::Grid(m) => m.domain(),
        MapKind::Identity(space) => space.clone(),
        MapKind::StripCollapse { k } => Space::Strip { k: *k },
        MapKind::Table(t) => t.domain.clone(),
        MapKind::Pow { inner, .. } => kind_domain(inner),
        MapKind::Compose { inner, .. } => kind_domain(inner),
    }
}

fn kind_codomain(kind: &MapKind) -> Space {
    match kind {
        MapKind::Squares(_) => Space::SquaresHalfline,
        MapKind::Strip(m) => Space::Strip { k: m.k() },
        MapKind::Grid(m) => m.codomain(),
        MapKind::Identity(space) => space.clone(),
        MapKind::StripCollapse { k } => Space::Strip { k: *k - 1 },
        MapKind::Table(t) => t.codomain.clone(),
        MapKind::Pow { inner, .. } => kind_codomain(inner),
        MapKind::Compose { outer, .. } => kind_codomain(outer),
    }
}

fn kind_inverse(kind: &MapKind) -> Option<MapKind> {
    match kind {
        MapKind::Strip(StripMap::F { k }) => Some(MapKind::Strip(StripMap::FInv { k: *k })),
        MapKind::Strip(StripMap::FInv { k }) => Some(MapKind::Strip(StripMap::F { k: *k })),
        MapKind::Strip(StripMap::G { k }) => Some(MapKind::Strip(StripMap::GInv { k: *k })),
        MapKind::Strip(StripMap::GInv { k }) => Some(MapKind::Strip(StripMap::G { k: *k })),
        MapKind::Grid(GridMap::F) => Some(MapKind::Grid(GridMap::FInv)),
        MapKind::Grid(GridMap::FInv) => Some(MapKind::Grid(GridMap::F)),
        MapKind::Grid(GridMap::G) => Some(MapKind::Grid(GridMap::GInv)),
        MapKind::Grid(GridMap::GInv) => Some(MapKind::Grid(GridMap::G)),
        MapKind::Identity(space) => Some(MapKind::Identity(space.clone())),
        MapKind::Pow { inner, n } => Some(MapKind::Pow {
            inner: Box::new(kind_inverse(inner)?),
            n: *n,
        }),
        MapKind::Compose { outer, inner } => Some(MapKind::Compose {
            outer: Box::new(kind_inverse(inner)?),
            inner: Box::new(kind_inverse(outer)?),
        }),
        _ => None,
    }
}

fn eval_kind(kind: &MapKind, p: &Point) -> Result<Point> {
    match kind {
        MapKind::Squares(m) => {
            let Point::Halfline(x) = p else {
                return Err(Error::VariantMismatch(p.to_string()));
            };
            Ok(Point::Halfline(squares_eval(m, x)?))
        }
        MapKind::Strip(m) => {
            let Point::Strip { r, label } = p else {
                return Err(Error::VariantMismatch(p.to_string()));
            };
            let (r, label) = strip_eval(m, r, *label)?;
            Ok(Point::strip(r, label))
        }
        MapKind::Grid(m) => {
            let Point::Grid { r, label, .. } = p else {
                return Err(Error::VariantMismatch(p.to_string()));
            };
            let n = p.grid_index().expect("valid grid point");
            let (n, r, label) = grid_eval(*m, n, r, *label)?;
            Ok(Point::grid(n, r, label))
        }
        MapKind::Identity(_) => Ok(p.clone()),
        MapKind::StripCollapse { k } => {
            let Point::Strip { r, label } = p else {
                return Err(Error::VariantMismatch(p.to_string()));
            };
            Ok(Point::strip(r.clone(), (*label).min(*k as i64 - 1)))
        }
        MapKind::Table(t) => t
            .entries
            .get(p)
            .cloned()
            .ok_or_else(|| Error::TableMiss(p.to_string())),
        MapKind::Pow { inner, n } => eval_pow(inner, *n, p),
        MapKind::Compose { outer, inner } => {
            let mid = eval_kind(inner, p)?;
            eval_kind(outer, &mid)
        }
    }
}

/// Iterate `inner` `n` times, dispatching to a closed form when one exists.
fn eval_pow(inner: &MapKind, n: u32, p: &Point) -> Result<Point> {
    match inner {
        MapKind::Squares(SquaresMap::G) => {
            let Point::Halfline(x) = p else {
                return Err(Error::VariantMismatch(p.to_string()));
            };
            Ok(Point::Halfline(x.pow2k(n as i32)?))
        }
        MapKind::Squares(SquaresMap::F { k }) => {
            let Point::Halfline(x) = p else {
                return Err(Error::VariantMismatch(p.to_string()));
            };
            Ok(Point::Halfline(squares_pow(*k, n, x)?))
        }
        MapKind::Squares(SquaresMap::Phi { k }) => {
            // phi is a retraction: phi^n = phi.
            let Point::Halfline(x) = p else {
                return Err(Error::VariantMismatch(p.to_string()));
            };
            Ok(Point::Halfline(squares_eval(&SquaresMap::Phi { k: *k }, x)?))
        }
        MapKind::Strip(m @ (StripMap::F { .. } | StripMap::G { .. })) => {
            let Point::Strip { r, label } = p else {
                return Err(Error::VariantMismatch(p.to_string()));
            };
            let (r, label) = strip_pow_closed(m, StripPowForm::General, n, r, *label)?;
            Ok(Point::strip(r, label))
        }
        MapKind::Grid(m @ (GridMap::F | GridMap::G | GridMap::FInv | GridMap::GInv)) => {
            let Point::Grid { r, label, .. } = p else {
                return Err(Error::VariantMismatch(p.to_string()));
            };
            let idx = p.grid_index().expect("valid grid point");
            let (idx, r, label) = grid_pow(*m, n, idx, r, *label)?;
            Ok(Point::grid(idx, r, label))
        }
        MapKind::Identity(_) => Ok(p.clone()),
        other => {
            let mut cur = p.clone();
            for _ in 0..n {
                cur = eval_kind(other, &cur)?;
            }
            Ok(cur)
        }
    }
}

fn parse_kind(s: &str) -> Result<MapKind> {
    let err = || Error::Parse {
        kind: "map id",
        input: s.to_string(),
    };
    if let Some(body) = s.strip_prefix("pow(").and_then(|b| b.strip_suffix(')')) {
        let comma = top_level_comma(body).ok_or_else(err)?;
        let inner = parse_kind(body[..comma].trim())?;
        let n: u32 = body[comma + 1..].trim().parse().map_err(|_| err())?;
        return Ok(MapKind::Pow {
            inner: Box::new(inner),
            n,
        });
    }
    if let Some(body) = s.strip_prefix("compose(").and_then(|b| b.strip_suffix(')')) {
        let comma = top_level_comma(body).ok_or_else(err)?;
        let outer = parse_kind(body[..comma].trim())?;
        let inner = parse_kind(body[comma + 1..].trim())?;
        return Ok(MapKind::Compose {
            outer: Box::new(outer),
            inner: Box::new(inner),
        });
    }
    if let Some(rest) = s.strip_prefix("id.") {
        return Ok(MapKind::Identity(Space::parse(rest)?));
    }
    if let Some(rest) = s.strip_prefix("squares.") {
        if rest == "g" {
            return Ok(MapKind::Squares(SquaresMap::G));
        }
        if let Some(k) = rest.strip_prefix("f?k=") {
            return Ok(MapKind::Squares(SquaresMap::F {
                k: k.parse().map_err(|_| err())?,
            }));
        }
        if let Some(k) = rest.strip_prefix("phi?k=") {
            return Ok(MapKind::Squares(SquaresMap::Phi {
                k: k.parse().map_err(|_| err())?,
            }));
        }
        return Err(err());
    }
    if let Some(rest) = s.strip_prefix("strip.") {
        let parse_k = |r: &str| -> Result<u32> { r.parse().map_err(|_| err()) };
        if let Some(k) = rest.strip_prefix("f?k=") {
            return Ok(MapKind::Strip(StripMap::F { k: parse_k(k)? }));
        }
        if let Some(k) = rest.strip_prefix("g?k=") {
            return Ok(MapKind::Strip(StripMap::G { k: parse_k(k)? }));
        }
        if let Some(k) = rest.strip_prefix("finv?k=") {
            return Ok(MapKind::Strip(StripMap::FInv { k: parse_k(k)? }));
        }
        if let Some(k) = rest.strip_prefix("ginv?k=") {
            return Ok(MapKind::Strip(StripMap::GInv { k: parse_k(k)? }));
        }
        if let Some(k) = rest.strip_prefix("collapse?k=") {
            return Ok(MapKind::StripCollapse { k: parse_k(k)? });
        }
        return Err(err());
    }
    if let Some(rest) = s.strip_prefix("grid.") {
        return Ok(MapKind::Grid(GridMap::parse(rest)?));
    }
    Err(err())
}

fn top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

/// Convenience constructor for halfline points.
pub fn halfline_point(q: BigRational) -> Point {
    Point::Halfline(ExactReal::from_rational(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_rational;

    fn rat(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn ids_round_trip() {
        for id in [
            "squares.g",
            "squares.f?k=2",
            "squares.phi?k=3",
            "strip.f?k=3",
            "strip.g?k=3",
            "strip.finv?k=1",
            "strip.ginv?k=0",
            "strip.collapse?k=2",
            "grid.f",
            "grid.phi",
            "grid.PsiInv",
            "grid.PhiInv",
            "id.strip?k=2",
            "id.gridx",
            "pow(strip.f?k=2,3)",
            "compose(grid.phi,grid.f)",
            "pow(compose(grid.g,grid.g),2)",
        ] {
            let spec = CoarseMapSpec::parse(id).unwrap_or_else(|e| panic!("{id}: {e}"));
            assert_eq!(spec.id(), id);
        }
        assert!(CoarseMapSpec::parse("strip.h?k=1").is_err());
        assert!(CoarseMapSpec::parse("pow(grid.phi,2)").is_err()); // not an endomorphism
    }

    #[test]
    fn iterate_uses_closed_forms_consistently() {
        let g = CoarseMapSpec::parse("strip.g?k=1").unwrap();
        let g2 = g.iterate(2).unwrap();
        let p = Point::strip(rat("3"), 0);
        assert_eq!(g2.eval(&p).unwrap(), Point::strip(rat("6"), 0));

        let sq = CoarseMapSpec::parse("squares.g").unwrap();
        let sq3 = sq.iterate(3).unwrap();
        let x = halfline_point(rat("3/2"));
        assert_eq!(sq3.eval(&x).unwrap(), halfline_point(rat("6561/256")));
    }

    #[test]
    fn iterate_once_is_the_map_itself() {
        let f = CoarseMapSpec::parse("strip.f?k=2").unwrap();
        let f1 = f.iterate(1).unwrap();
        assert_eq!(f1.id(), f.id());
        let p = Point::strip(rat("1/2"), 2);
        assert_eq!(f1.eval(&p).unwrap(), f.eval(&p).unwrap());
    }

    #[test]
    fn nested_iterates_flatten() {
        let f = CoarseMapSpec::parse("strip.f?k=2").unwrap();
        let f6 = f.iterate(2).unwrap().iterate(3).unwrap();
        assert_eq!(f6.id(), "pow(strip.f?k=2,6)");
    }

    #[test]
    fn composition_checks_spaces() {
        let phi = CoarseMapSpec::parse("grid.phi").unwrap();
        let f = CoarseMapSpec::parse("grid.f").unwrap();
        let g = CoarseMapSpec::parse("grid.g").unwrap();
        assert!(CoarseMapSpec::compose(&phi, &f).is_ok()); // phi . f : X -> Y
        assert!(CoarseMapSpec::compose(&f, &phi).is_err()); // phi lands in Y
        assert!(CoarseMapSpec::compose(&g, &phi).is_ok());
    }

    #[test]
    fn eval_rejects_points_outside_the_domain() {
        let g = CoarseMapSpec::parse("grid.g").unwrap();
        // label 2n+1 = 3 is in X but not Y
        let p = Point::grid(1, rat("0"), 3);
        assert!(g.eval(&p).is_err());
        let f = CoarseMapSpec::parse("grid.f").unwrap();
        assert!(f.eval(&p).is_ok());
    }

    #[test]
    fn inverse_of_composition_reverses_order() {
        let f = CoarseMapSpec::parse("strip.f?k=2").unwrap();
        let g = CoarseMapSpec::parse("strip.g?k=2").unwrap();
        let fg = CoarseMapSpec::compose(&f, &g).unwrap();
        let inv = fg.inverse().unwrap();
        let p = Point::strip(rat("5/8"), 1);
        let there = fg.eval(&p).unwrap();
        assert_eq!(inv.eval(&there).unwrap(), p);
    }

    #[test]
    fn brute_force_pow_for_maps_without_closed_forms() {
        let c = CoarseMapSpec::parse("pow(compose(strip.g?k=2,strip.g?k=2),3)").unwrap();
        let direct = CoarseMapSpec::parse("pow(strip.g?k=2,6)").unwrap();
        let p = Point::strip(rat("7/8"), 2);
        assert_eq!(c.eval(&p).unwrap(), direct.eval(&p).unwrap());
    }
}
