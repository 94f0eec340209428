//! The R^3 grid family.
//!
//! `X` stacks thick halflines `{n^2} x [0,oo) x {1..2n+1}` and `Y` the
//! thinner ones `{n^2} x [0,oo) x {1..2n}`. The dynamics `f` multiplies the
//! real coordinate by the label; `g` is its restriction to `Y`. Four
//! conjugating maps move between the spaces: the index shift `phi`, the
//! inclusion `psi`, and their label-clamping coarse inverses.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::space::Space;

/// Map identifier within the grid family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridMap {
    /// `f(n^2, r, k) = (n^2, k r, k)` on `X`.
    F,
    FInv,
    /// The restriction of `f` to `Y`.
    G,
    GInv,
    /// `phi(n^2, r, k) = ((n+1)^2, r, k)`: X -> Y, shifts the index up.
    Phi,
    /// `psi(n^2, r, k) = (n^2, r, k)`: Y -> X, the inclusion.
    Psi,
    /// `(n^2, r, k) -> (n^2, r, min(k, 2n))`: X -> Y, coarse inverse of `psi`.
    PhiInv,
    /// `(n^2, r, k) -> (max(1, n-1)^2, r, min(k, 2 max(1, n-1) + 1))`:
    /// Y -> X, coarse inverse of `phi`.
    PsiInv,
}

impl GridMap {
    pub fn domain(&self) -> Space {
        match self {
            GridMap::F | GridMap::FInv | GridMap::Phi | GridMap::PhiInv => Space::GridX,
            GridMap::G | GridMap::GInv | GridMap::Psi | GridMap::PsiInv => Space::GridY,
        }
    }

    pub fn codomain(&self) -> Space {
        match self {
            GridMap::F | GridMap::FInv | GridMap::Psi | GridMap::PsiInv => Space::GridX,
            GridMap::G | GridMap::GInv | GridMap::Phi | GridMap::PhiInv => Space::GridY,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GridMap::F => "f",
            GridMap::FInv => "finv",
            GridMap::G => "g",
            GridMap::GInv => "ginv",
            GridMap::Phi => "phi",
            GridMap::Psi => "psi",
            GridMap::PhiInv => "PhiInv",
            GridMap::PsiInv => "PsiInv",
        }
    }

    pub fn parse(s: &str) -> Result<GridMap> {
        Ok(match s {
            "f" => GridMap::F,
            "finv" => GridMap::FInv,
            "g" => GridMap::G,
            "ginv" => GridMap::GInv,
            "phi" => GridMap::Phi,
            "psi" => GridMap::Psi,
            "PhiInv" => GridMap::PhiInv,
            "PsiInv" => GridMap::PsiInv,
            _ => {
                return Err(Error::Parse {
                    kind: "grid map",
                    input: s.to_string(),
                })
            }
        })
    }
}

/// Evaluate a grid map on `(n^2, r, label)`; `n` is the halfline index.
pub fn grid_eval(
    map: GridMap,
    n: u64,
    r: &BigRational,
    label: u32,
) -> Result<(u64, BigRational, u32)> {
    let in_domain = match map.domain() {
        Space::GridX => u64::from(label) <= 2 * n + 1,
        Space::GridY => u64::from(label) <= 2 * n,
        _ => unreachable!(),
    };
    if n == 0 || label == 0 || !in_domain {
        return Err(Error::LabelOutOfRange {
            label: label as i64,
            space: map.domain().to_string(),
        });
    }
    Ok(match map {
        GridMap::F | GridMap::G => (n, r * BigRational::from_integer(BigInt::from(label)), label),
        GridMap::FInv | GridMap::GInv => {
            (n, r / BigRational::from_integer(BigInt::from(label)), label)
        }
        GridMap::Phi => (n + 1, r.clone(), label),
        GridMap::Psi => (n, r.clone(), label),
        GridMap::PhiInv => (n, r.clone(), label.min(2 * n as u32)),
        GridMap::PsiInv => {
            let m = n.max(2) - 1; // max(1, n - 1)
            (m, r.clone(), label.min(2 * m as u32 + 1))
        }
    })
}

/// Closed form for iterating `f` or `g`: the `n`-th power multiplies the
/// real coordinate by `label^n`.
pub fn grid_pow(
    map: GridMap,
    power: u32,
    n: u64,
    r: &BigRational,
    label: u32,
) -> Result<(u64, BigRational, u32)> {
    match map {
        GridMap::F | GridMap::G | GridMap::FInv | GridMap::GInv => {}
        _ => {
            return Err(Error::NotEndomorphism(format!("grid.{}", map.name())));
        }
    }
    grid_eval(map, n, r, label)?; // domain check
    let factor = BigRational::from_integer(BigInt::from(label)).pow(power as i32);
    let r = match map {
        GridMap::F | GridMap::G => r * factor,
        _ => r / factor,
    };
    Ok((n, r, label))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_rational;

    fn rat(s: &str) -> BigRational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn f_scales_by_label() {
        // f(4, 5/2, 3) = (4, 15/2, 3)
        let (n, r, l) = grid_eval(GridMap::F, 2, &rat("5/2"), 3).unwrap();
        assert_eq!((n, l), (2, 3));
        assert_eq!(r, rat("15/2"));
    }

    #[test]
    fn g_rejects_the_extra_ray() {
        // k = 2n + 1 is in X but not in Y.
        assert!(grid_eval(GridMap::G, 2, &rat("1"), 5).is_err());
        assert!(grid_eval(GridMap::F, 2, &rat("1"), 5).is_ok());
    }

    #[test]
    fn psiinv_undoes_phi() {
        for n in 1..=6u64 {
            for label in 1..=(2 * n + 1) as u32 {
                let (pn, pr, pl) = grid_eval(GridMap::Phi, n, &rat("7/4"), label).unwrap();
                let (bn, br, bl) = grid_eval(GridMap::PsiInv, pn, &pr, pl).unwrap();
                assert_eq!((bn, bl), (n, label));
                assert_eq!(br, rat("7/4"));
            }
        }
    }

    #[test]
    fn phiinv_undoes_psi() {
        for n in 1..=6u64 {
            for label in 1..=(2 * n) as u32 {
                let (pn, pr, pl) = grid_eval(GridMap::Psi, n, &rat("7/4"), label).unwrap();
                let (bn, br, bl) = grid_eval(GridMap::PhiInv, pn, &pr, pl).unwrap();
                assert_eq!((bn, bl), (n, label));
                assert_eq!(br, rat("7/4"));
            }
        }
    }

    #[test]
    fn phi_intertwines_f_and_g() {
        // phi . f = g . phi = ((n+1)^2, k r, k)
        for n in 1..=5u64 {
            for label in 1..=(2 * n + 1) as u32 {
                let f = grid_eval(GridMap::F, n, &rat("3/2"), label).unwrap();
                let lhs = grid_eval(GridMap::Phi, f.0, &f.1, f.2).unwrap();
                let p = grid_eval(GridMap::Phi, n, &rat("3/2"), label).unwrap();
                let rhs = grid_eval(GridMap::G, p.0, &p.1, p.2).unwrap();
                assert_eq!(lhs, rhs);
                assert_eq!(lhs.0, n + 1);
            }
        }
    }

    #[test]
    fn f_bijects() {
        for n in 1..=5u64 {
            for label in 1..=(2 * n + 1) as u32 {
                let fwd = grid_eval(GridMap::F, n, &rat("9/7"), label).unwrap();
                let back = grid_eval(GridMap::FInv, fwd.0, &fwd.1, fwd.2).unwrap();
                assert_eq!(back, (n, rat("9/7"), label));
            }
        }
    }

    #[test]
    fn pow_closed_form_matches_iteration() {
        let mut cur = (3u64, rat("5/4"), 4u32);
        for _ in 0..5 {
            cur = grid_eval(GridMap::F, cur.0, &cur.1, cur.2).unwrap();
        }
        let closed = grid_pow(GridMap::F, 5, 3, &rat("5/4"), 4).unwrap();
        assert_eq!(closed, cur);
    }
}
