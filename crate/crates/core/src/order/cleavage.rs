use serde::Serialize;

use super::index::{index_with, pct_change, IndexConvention};
use crate::distribution::WeightedDistribution;
use crate::error::{Error, Result};

const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CenterChange {
    pub center: f64,
    pub before: f64,
    pub after: f64,
    pub pct_change: f64,
}

/// The center around which polarization grew the most between two waves.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cleavage {
    pub center: f64,
    pub pct_change: f64,
    pub profile: Vec<CenterChange>,
}

pub fn cleavage_point(
    before: &WeightedDistribution,
    after: &WeightedDistribution,
    centers: &[f64],
) -> Result<Cleavage> {
    cleavage_point_with(before, after, centers, IndexConvention::StepIntegral)
}

/// Maximizes the percentage change of the index over `centers`. Ties go to
/// the center nearest the scale midpoint, then to the smaller center.
pub fn cleavage_point_with(
    before: &WeightedDistribution,
    after: &WeightedDistribution,
    centers: &[f64],
    convention: IndexConvention,
) -> Result<Cleavage> {
    before.scale().check_bounds(after.scale())?;
    let profile = centers
        .iter()
        .map(|&c| {
            let b = index_with(before, c, convention)?;
            let a = index_with(after, c, convention)?;
            Ok(CenterChange {
                center: c,
                before: b.value,
                after: a.value,
                pct_change: pct_change(b, a)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mid = before.scale().midpoint();
    let best = profile
        .iter()
        .copied()
        .reduce(|best, cand| {
            let diff = cand.pct_change - best.pct_change;
            if diff > TIE_TOL {
                return cand;
            }
            if diff < -TIE_TOL {
                return best;
            }
            let (db, dc) = ((best.center - mid).abs(), (cand.center - mid).abs());
            if dc < db || (dc == db && cand.center < best.center) {
                cand
            } else {
                best
            }
        })
        .ok_or(Error::NoCenters)?;

    Ok(Cleavage {
        center: best.center,
        pct_change: best.pct_change,
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::PolicyScale;

    #[test]
    fn identical_waves_pick_midpoint() {
        let d = WeightedDistribution::uniform(PolicyScale::integer(0, 10).unwrap());
        let centers: Vec<f64> = (1..=9).map(f64::from).collect();
        let c = cleavage_point(&d, &d, &centers).unwrap();
        assert_eq!(c.center, 5.0);
        assert_eq!(c.pct_change, 0.0);
        assert_eq!(c.profile.len(), 9);
    }

    #[test]
    fn tie_prefers_smaller_center_at_equal_distance() {
        let d = WeightedDistribution::uniform(PolicyScale::integer(1, 6).unwrap());
        let c = cleavage_point(&d, &d, &[2.0, 3.0, 4.0, 5.0]).unwrap();
        // Midpoint 3.5: 3 and 4 are equally close.
        assert_eq!(c.center, 3.0);
    }

    #[test]
    fn zero_baseline_is_an_error() {
        let scale = PolicyScale::integer(0, 10).unwrap();
        let before = WeightedDistribution::point_mass(scale.clone(), 5.0).unwrap();
        let after = WeightedDistribution::uniform(scale);
        assert!(matches!(
            cleavage_point(&before, &after, &[4.0, 5.0]),
            Err(Error::ZeroBaseline { center }) if center == 5.0
        ));
    }

    #[test]
    fn picks_largest_increase() {
        let scale = PolicyScale::integer(0, 10).unwrap();
        let before = WeightedDistribution::uniform(scale.clone());
        let mut w = vec![1.0; 11];
        w[3] = 0.2;
        w[0] = 1.8;
        let after = WeightedDistribution::from_grid_weights(scale, w).unwrap();
        let c = cleavage_point(&before, &after, &[2.0, 5.0, 8.0]).unwrap();
        let best = c
            .profile
            .iter()
            .map(|p| p.pct_change)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(c.pct_change, best);
        assert!(c.pct_change > 0.0);
    }
}
