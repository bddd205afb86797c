use serde::{Deserialize, Serialize};

use crate::distribution::{PolicyScale, WeightedDistribution};
use crate::error::{Error, Result};

const ENDPOINT_TOL: f64 = 1e-12;

/// How the areas under the distribution function are evaluated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexConvention {
    /// Exact areas under the step CDF over `[min, x*)` and `[x*, max]`.
    #[default]
    StepIntegral,
    /// Counting sums over the instrument grid: `Σ_{g ≤ x*} F(g)` and
    /// `Σ_{g > x*} F(g)`, normalized by the same widths. This is the
    /// tabulation that the published survey profiles follow; it is not
    /// bounded by `[0, 1]`.
    GridSum,
}

/// Degree of polarization of a distribution around `center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarizationIndex {
    pub value: f64,
    pub center: f64,
}

/// Area under the step CDF on `[min, xstar)`.
pub fn integral_below(dist: &WeightedDistribution, xstar: f64) -> Result<f64> {
    dist.scale().check_interior(xstar)?;
    Ok(step_areas(dist, xstar).0)
}

/// Area under the step CDF on `[xstar, max]`.
pub fn integral_above(dist: &WeightedDistribution, xstar: f64) -> Result<f64> {
    dist.scale().check_interior(xstar)?;
    Ok(step_areas(dist, xstar).1)
}

// F is constant on [g_i, g_{i+1}) with value cumulative[i], zero on
// [min, g_0), and the last value extends to max.
fn step_areas(dist: &WeightedDistribution, xstar: f64) -> (f64, f64) {
    let grid = dist.scale().grid();
    let max = dist.scale().max();
    let mut below = 0.0;
    let mut above = 0.0;
    for (i, (&start, &value)) in grid.iter().zip(dist.cumulative()).enumerate() {
        let end = grid.get(i + 1).copied().unwrap_or(max);
        if value == 0.0 {
            continue;
        }
        let left = xstar.min(end) - start;
        if left > 0.0 {
            below += value * left;
        }
        let right = end - xstar.max(start);
        if right > 0.0 {
            above += value * right;
        }
    }
    (below, above)
}

fn grid_sums(dist: &WeightedDistribution, xstar: f64) -> (f64, f64) {
    let grid = dist.scale().grid();
    grid.iter()
        .zip(dist.cumulative())
        .fold((0.0, 0.0), |(below, above), (&g, &value)| {
            if g <= xstar {
                (below + value, above)
            } else {
                (below, above + value)
            }
        })
}

pub fn index(dist: &WeightedDistribution, xstar: f64) -> Result<PolarizationIndex> {
    index_with(dist, xstar, IndexConvention::StepIntegral)
}

pub fn index_with(
    dist: &WeightedDistribution,
    xstar: f64,
    convention: IndexConvention,
) -> Result<PolarizationIndex> {
    let scale = dist.scale();
    scale.check_interior(xstar)?;
    let (below, above) = match convention {
        IndexConvention::StepIntegral => step_areas(dist, xstar),
        IndexConvention::GridSum => grid_sums(dist, xstar),
    };
    let raw = below / (xstar - scale.min()) - above / (scale.max() - xstar) + 1.0;
    let value = match convention {
        // The exact value is in [0, 1]; only rounding can leave it or miss
        // the endpoints.
        IndexConvention::StepIntegral => match raw.clamp(0.0, 1.0) {
            v if v < ENDPOINT_TOL => 0.0,
            v if v > 1.0 - ENDPOINT_TOL => 1.0,
            v => v,
        },
        IndexConvention::GridSum => raw,
    };
    Ok(PolarizationIndex {
        value,
        center: xstar,
    })
}

pub fn index_profile(
    dist: &WeightedDistribution,
    centers: &[f64],
) -> Result<Vec<PolarizationIndex>> {
    index_profile_with(dist, centers, IndexConvention::StepIntegral)
}

pub fn index_profile_with(
    dist: &WeightedDistribution,
    centers: &[f64],
    convention: IndexConvention,
) -> Result<Vec<PolarizationIndex>> {
    centers
        .iter()
        .map(|&c| index_with(dist, c, convention))
        .collect()
}

/// Percentage change `100 (after − before) / before` at a shared center.
pub fn pct_change(before: PolarizationIndex, after: PolarizationIndex) -> Result<f64> {
    if before.center != after.center {
        return Err(Error::CenterMismatch(before.center, after.center));
    }
    if before.value <= 0.0 {
        return Err(Error::ZeroBaseline {
            center: before.center,
        });
    }
    Ok(100.0 * (after.value - before.value) / before.value)
}

/// Integer points strictly inside the scale bounds.
pub fn default_centers(scale: &PolicyScale) -> Vec<f64> {
    let first = scale.min().floor() as i64 + 1;
    let last = scale.max().ceil() as i64 - 1;
    (first..=last)
        .map(|c| c as f64)
        .filter(|&c| scale.is_interior(c))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lr() -> PolicyScale {
        PolicyScale::integer(0, 10).unwrap()
    }

    fn shares(pairs: &[(f64, f64)]) -> WeightedDistribution {
        WeightedDistribution::from_shares(lr(), pairs).unwrap()
    }

    #[test]
    fn point_mass_integrals() {
        let d = shares(&[(5.0, 1.0)]);
        assert_eq!(integral_below(&d, 5.0).unwrap(), 0.0);
        assert_eq!(integral_above(&d, 5.0).unwrap(), 5.0);
        assert_eq!(index(&d, 5.0).unwrap().value, 0.0);
    }

    #[test]
    fn extreme_split_integrals() {
        let d = shares(&[(0.0, 1.0), (10.0, 1.0)]);
        assert_eq!(integral_below(&d, 5.0).unwrap(), 2.5);
        assert_eq!(integral_above(&d, 5.0).unwrap(), 2.5);
        assert_eq!(index(&d, 5.0).unwrap().value, 1.0);
    }

    #[test]
    fn uneven_extreme_split_is_one_everywhere() {
        let d = shares(&[(0.0, 0.3), (10.0, 0.7)]);
        for c in [0.5, 1.0, 3.3, 5.0, 9.99] {
            assert!((index(&d, c).unwrap().value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_index_against_unit_interval_sum() {
        // Oracle: F = (k+1)/11 on [k, k+1), summed over unit intervals.
        let f = |k: usize| (k + 1) as f64 / 11.0;
        let below: f64 = (0..5).map(f).sum();
        let above: f64 = (5..10).map(f).sum();
        let expected = below / 5.0 - above / 5.0 + 1.0;
        assert!((expected - 6.0 / 11.0).abs() < 1e-15);
        let d = WeightedDistribution::uniform(lr());
        assert!((index(&d, 5.0).unwrap().value - 0.545_454_545_454_545_5).abs() < 1e-12);
    }

    #[test]
    fn non_grid_center_clips_intervals() {
        let d = shares(&[(2.0, 1.0), (8.0, 1.0)]);
        // F = 0.5 on [2, 8), 1 on [8, 10].
        assert!((integral_below(&d, 4.5).unwrap() - 1.25).abs() < 1e-15);
        assert!((integral_above(&d, 4.5).unwrap() - (0.5 * 3.5 + 2.0)).abs() < 1e-15);
    }

    #[test]
    fn boundary_centers_rejected() {
        let d = WeightedDistribution::uniform(lr());
        for c in [0.0, 10.0, -1.0, 11.0] {
            assert!(matches!(index(&d, c), Err(Error::CenterOnBoundary { .. })));
            assert!(integral_below(&d, c).is_err());
        }
    }

    #[test]
    fn grid_sum_convention() {
        let d = WeightedDistribution::uniform(lr());
        // Σ_{k≤5} (k+1)/11 = 21/11, Σ_{k>5} (k+1)/11 = 45/11.
        let expected = (21.0 / 11.0) / 5.0 - (45.0 / 11.0) / 5.0 + 1.0;
        let got = index_with(&d, 5.0, IndexConvention::GridSum).unwrap();
        assert!((got.value - expected).abs() < 1e-14);
    }

    #[test]
    fn pct_change_cases() {
        let at = |value| PolarizationIndex { value, center: 4.0 };
        assert!((pct_change(at(0.5), at(0.6)).unwrap() - 20.0).abs() < 1e-12);
        assert_eq!(pct_change(at(0.4), at(0.4)).unwrap(), 0.0);
        assert!(matches!(
            pct_change(at(0.0), at(0.4)),
            Err(Error::ZeroBaseline { .. })
        ));
        let other = PolarizationIndex {
            value: 0.5,
            center: 5.0,
        };
        assert!(matches!(
            pct_change(at(0.5), other),
            Err(Error::CenterMismatch(..))
        ));
    }

    #[test]
    fn default_center_grids() {
        assert_eq!(
            default_centers(&lr()),
            (1..=9).map(f64::from).collect::<Vec<_>>()
        );
        assert_eq!(
            default_centers(&PolicyScale::integer(1, 7).unwrap()),
            vec![2.0, 3.0, 4.0, 5.0, 6.0]
        );
    }

    #[test]
    fn profile_keeps_order() {
        let d = shares(&[(5.0, 1.0)]);
        let p = index_profile(&d, &[6.0, 5.0, 4.0]).unwrap();
        assert_eq!(
            p.iter().map(|i| i.center).collect::<Vec<_>>(),
            vec![6.0, 5.0, 4.0]
        );
        assert_eq!(p[1].value, 0.0);
        assert!(p[0].value > 0.0 && p[2].value > 0.0);
    }
}
