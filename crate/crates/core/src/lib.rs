//! Exact verification toolkit for coarse-geometric dynamics.
//!
//! The crate implements three families of metric spaces with dynamics on
//! them — a halfline with squaring-type maps, invertible strip shifts, and
//! an R^3 grid example — together with the coarse-category machinery needed
//! to certify, at desk scale, how the iterates of these maps relate: control
//! profiles, closeness reports with witnesses, coarse-inverse checks,
//! non-controlledness witnesses, coarse-density gaps, and theorem-level
//! scenario verdicts.
//!
//! All arithmetic is exact big-rational or certified-root arithmetic;
//! floating point appears only in reports, as outward-rounded
//! approximations of exact values.

pub mod coarse;
pub mod error;
pub mod exact;
pub mod maps;
pub mod report;
pub mod space;
pub mod verifier;

pub use coarse::{
    closeness_trend, coarse_inverse_check, control_profile, iterate, non_controlled_witness,
    qi_lower_bound_check, section_of_surjection, sup_distance, ClosenessReport,
    ClosenessVerdict, ControlProfile, EquivalencePair, NonControlledWitness, QiLowerBound,
    SectionReport, SupDistance,
};
pub use error::{Error, Result};
pub use exact::{parse_rational, rational_to_string, Enclosure, ExactReal, DEFAULT_PRECISION_BITS};
pub use maps::{grid::GridMap, squares::SquaresMap, strip::StripMap, CoarseMapSpec, MapKind};
pub use space::{
    density_witness, dist, neighborhood_cover_check, unit_chain, CoverCheck, Point, Space, Window,
};
pub use verifier::{
    grid_hypothesis_check, halfline_decomposition, monotonicity_contradiction, qwerty_recurrence,
    scenario_decompose, scenario_qwerty, scenario_section, scenario_squares, scenario_strips,
    Claim, DecompositionResult, HalflineBijection, MonotonicityReport, QwertyPremises,
    RecurrenceBound, ScenarioReport, SectionTarget, Verdict,
};
