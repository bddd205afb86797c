//! The polarization partial order around a center, its single-crossing
//! test, and the numerical polarization index.

mod cleavage;
mod dominance;
mod index;

pub use cleavage::{cleavage_point, cleavage_point_with, CenterChange, Cleavage};
pub use dominance::{
    dominance_region, dominates_at, oracle_dominates_at, DominanceVerdict, Relation, DOMINANCE_TOL,
};
pub use index::{
    default_centers, index, index_profile, index_profile_with, index_with, integral_above,
    integral_below, pct_change, IndexConvention, PolarizationIndex,
};
