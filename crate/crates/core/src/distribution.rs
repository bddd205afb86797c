//! Policy scales and weighted discrete distributions of voter positions.
//!
//! A [`WeightedDistribution`] stores one weight per point of its
//! [`PolicyScale`] grid (zero weights allowed), normalized to sum to one.
//! Its distribution function is the right-continuous step function
//! `F(x) = Σ { w_i : p_i ≤ x }`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Positions closer than this are treated as the same grid point when
/// matching user-supplied positions against a grid.
pub const GRID_EPS: f64 = 1e-9;

/// A bounded policy interval `[min, max]` with an ordered finite support grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyScale {
    min: f64,
    max: f64,
    grid: Vec<f64>,
}

impl PolicyScale {
    pub fn new(min: f64, max: f64, grid: Vec<f64>) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min >= max {
            return Err(Error::InvalidScale(format!(
                "bounds must satisfy min < max, got [{min}, {max}]"
            )));
        }
        if grid.is_empty() {
            return Err(Error::InvalidScale("grid is empty".into()));
        }
        if let Some(w) = grid.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidScale(format!(
                "grid is not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        if let Some(&p) = grid.iter().find(|&&p| !(min..=max).contains(&p)) {
            return Err(Error::InvalidScale(format!(
                "grid point {p} lies outside [{min}, {max}]"
            )));
        }
        Ok(Self { min, max, grid })
    }

    /// Integer instrument scale `{min, min+1, …, max}`.
    pub fn integer(min: i32, max: i32) -> Result<Self> {
        Self::new(
            f64::from(min),
            f64::from(max),
            (min..=max).map(f64::from).collect(),
        )
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.min + self.max)
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.min..=self.max).contains(&x)
    }

    pub fn is_interior(&self, x: f64) -> bool {
        self.min < x && x < self.max
    }

    /// Index of the grid point within [`GRID_EPS`] of `x`.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let i = self.grid.partition_point(|&g| g < x - GRID_EPS);
        (i < self.grid.len() && (self.grid[i] - x).abs() <= GRID_EPS).then_some(i)
    }

    pub fn same_bounds(&self, other: &PolicyScale) -> bool {
        (self.min - other.min).abs() <= GRID_EPS && (self.max - other.max).abs() <= GRID_EPS
    }

    pub(crate) fn check_bounds(&self, other: &PolicyScale) -> Result<()> {
        if self.same_bounds(other) {
            Ok(())
        } else {
            Err(Error::ScaleMismatch(
                self.min, self.max, other.min, other.max,
            ))
        }
    }

    pub(crate) fn check_contains(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutOfScale {
                x,
                min: self.min,
                max: self.max,
            })
        }
    }

    pub(crate) fn check_interior(&self, center: f64) -> Result<()> {
        if self.is_interior(center) {
            Ok(())
        } else {
            Err(Error::CenterOnBoundary {
                center,
                min: self.min,
                max: self.max,
            })
        }
    }
}

/// Which side of a cutoff a group of voters sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Below,
    Above,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Below => f.write_str("strictly below"),
            Side::Above => f.write_str("strictly above"),
        }
    }
}

/// Normalized masses on the points of a [`PolicyScale`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedDistribution {
    scale: PolicyScale,
    weights: Vec<f64>,
    #[serde(skip)]
    cumulative: Vec<f64>,
    raw_total: f64,
}

impl WeightedDistribution {
    /// Builds a distribution from `(position, share)` pairs. Shares are
    /// renormalized to sum to one; repeated positions are accumulated.
    pub fn from_shares(scale: PolicyScale, shares: &[(f64, f64)]) -> Result<Self> {
        let mut weights = vec![0.0; scale.grid.len()];
        for &(position, share) in shares {
            check_share(position, share)?;
            let i = scale
                .index_of(position)
                .ok_or(Error::PositionOffGrid(position))?;
            weights[i] += share;
        }
        Self::from_grid_weights(scale, weights)
    }

    /// Builds a distribution from one weight per grid point.
    pub fn from_grid_weights(scale: PolicyScale, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != scale.grid.len() {
            return Err(Error::InvalidScale(format!(
                "{} weights for a grid of {} points",
                weights.len(),
                scale.grid.len()
            )));
        }
        for (&position, &share) in scale.grid.iter().zip(&weights) {
            check_share(position, share)?;
        }
        let raw_total: f64 = weights.iter().sum();
        if raw_total <= 0.0 {
            return Err(Error::EmptyDistribution);
        }
        let weights: Vec<f64> = weights.iter().map(|w| w / raw_total).collect();
        let cumulative = cumulate(&weights);
        Ok(Self {
            scale,
            weights,
            cumulative,
            raw_total,
        })
    }

    pub fn point_mass(scale: PolicyScale, position: f64) -> Result<Self> {
        Self::from_shares(scale, &[(position, 1.0)])
    }

    /// Equal mass on every grid point.
    pub fn uniform(scale: PolicyScale) -> Self {
        let n = scale.grid.len();
        Self::from_grid_weights(scale, vec![1.0; n]).expect("non-empty grid")
    }

    pub fn scale(&self) -> &PolicyScale {
        &self.scale
    }

    /// Weights aligned with `scale().grid()`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Sum of the shares before normalization.
    pub fn raw_total(&self) -> f64 {
        self.raw_total
    }

    /// `(position, weight)` for every grid point with positive weight.
    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.scale
            .grid
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
            .filter(|&(_, w)| w > 0.0)
    }

    /// Right-continuous distribution function at `x`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.scale.check_contains(x)?;
        Ok(self.cdf_at(x))
    }

    /// As [`cdf`](Self::cdf) but defined on the whole real line.
    pub(crate) fn cdf_at(&self, x: f64) -> f64 {
        let k = self.scale.grid.partition_point(|&g| g <= x);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// Cumulative mass at each grid point.
    pub(crate) fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn step_cdf(&self) -> StepCdf {
        let (breakpoints, values) = self
            .scale
            .grid
            .iter()
            .zip(&self.weights)
            .zip(&self.cumulative)
            .filter(|((_, &w), _)| w > 0.0)
            .map(|((&p, _), &c)| (p, c))
            .unzip();
        StepCdf {
            breakpoints,
            values,
        }
    }

    pub fn mean(&self) -> f64 {
        self.atoms().map(|(p, w)| p * w).sum()
    }

    /// Population variance `Σ w (p − μ)²`.
    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.atoms().map(|(p, w)| w * (p - mu) * (p - mu)).sum()
    }

    /// Total weight on the closed interval `[lo, hi]`.
    pub fn interval_mass(&self, lo: f64, hi: f64) -> Result<f64> {
        if lo > hi {
            return Err(Error::InvertedInterval { lo, hi });
        }
        self.scale.check_contains(lo)?;
        self.scale.check_contains(hi)?;
        Ok(self.closed_mass(lo, hi))
    }

    /// Direct atom summation over `[lo, hi]` with no range checks.
    pub(crate) fn closed_mass(&self, lo: f64, hi: f64) -> f64 {
        self.atoms()
            .filter(|&(p, _)| lo <= p && p <= hi)
            .map(|(_, w)| w)
            .sum()
    }

    /// Mean position of the voters strictly below or strictly above `cutoff`.
    pub fn conditional_mean(&self, side: Side, cutoff: f64) -> Result<f64> {
        let in_group = |p: f64| match side {
            Side::Below => p < cutoff,
            Side::Above => p > cutoff,
        };
        let (mass, moment) = self
            .atoms()
            .filter(|&(p, _)| in_group(p))
            .fold((0.0, 0.0), |(m, s), (p, w)| (m + w, s + p * w));
        if mass <= 0.0 {
            return Err(Error::EmptyGroup { side, cutoff });
        }
        Ok(moment / mass)
    }
}

fn check_share(position: f64, share: f64) -> Result<()> {
    if !share.is_finite() || !position.is_finite() {
        return Err(Error::InvalidShare { position });
    }
    if share < 0.0 {
        return Err(Error::NegativeShare { position, share });
    }
    Ok(())
}

fn cumulate(weights: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cumulative: Vec<f64> = weights
        .iter()
        .map(|w| {
            acc += w;
            acc.min(1.0)
        })
        .collect();
    // F is exactly 1 from the last atom onward.
    if let Some(last) = weights.iter().rposition(|&w| w > 0.0) {
        for c in &mut cumulative[last..] {
            *c = 1.0;
        }
    }
    cumulative
}

/// Explicit step representation of a distribution function: `values[i]`
/// holds on `[breakpoints[i], breakpoints[i + 1])`, and the function is zero
/// left of the first breakpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepCdf {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

impl StepCdf {
    pub fn eval(&self, x: f64) -> f64 {
        match self.breakpoints.partition_point(|&b| b <= x) {
            0 => 0.0,
            k => self.values[k - 1],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lr() -> PolicyScale {
        PolicyScale::integer(0, 10).unwrap()
    }

    #[test]
    fn scale_validation() {
        assert!(PolicyScale::new(1.0, 1.0, vec![1.0]).is_err());
        assert!(PolicyScale::new(0.0, 1.0, vec![]).is_err());
        assert!(PolicyScale::new(0.0, 1.0, vec![0.5, 0.5]).is_err());
        assert!(PolicyScale::new(0.0, 1.0, vec![0.5, 1.5]).is_err());
        let s = PolicyScale::new(0.0, 10.0, vec![2.0, 5.0]).unwrap();
        assert_eq!(s.index_of(5.0 + 1e-12), Some(1));
        assert_eq!(s.index_of(4.0), None);
    }

    #[test]
    fn single_entry_is_point_mass() {
        let d = WeightedDistribution::from_shares(lr(), &[(5.0, 0.37)]).unwrap();
        assert_eq!(d.atoms().collect::<Vec<_>>(), vec![(5.0, 1.0)]);
        assert_eq!(d.raw_total(), 0.37);
    }

    #[test]
    fn symmetric_pair_normalizes_to_halves() {
        let d = WeightedDistribution::from_shares(lr(), &[(0.0, 2.0), (10.0, 2.0)]).unwrap();
        assert_eq!(d.atoms().collect::<Vec<_>>(), vec![(0.0, 0.5), (10.0, 0.5)]);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            WeightedDistribution::from_shares(lr(), &[(3.0, -1.0)]),
            Err(Error::NegativeShare { .. })
        ));
        assert!(matches!(
            WeightedDistribution::from_shares(lr(), &[(3.0, 0.0)]),
            Err(Error::EmptyDistribution)
        ));
        assert!(matches!(
            WeightedDistribution::from_shares(lr(), &[]),
            Err(Error::EmptyDistribution)
        ));
        assert!(matches!(
            WeightedDistribution::from_shares(lr(), &[(3.5, 1.0)]),
            Err(Error::PositionOffGrid(_))
        ));
        assert!(matches!(
            WeightedDistribution::from_shares(lr(), &[(3.0, f64::NAN)]),
            Err(Error::InvalidShare { .. })
        ));
    }

    #[test]
    fn point_mass_step() {
        let d = WeightedDistribution::point_mass(lr(), 5.0).unwrap();
        assert_eq!(d.cdf(4.9).unwrap(), 0.0);
        assert_eq!(d.cdf(5.0).unwrap(), 1.0);
        assert_eq!(d.mean(), 5.0);
        assert_eq!(d.variance(), 0.0);
        assert!(matches!(d.cdf(10.5), Err(Error::OutOfScale { .. })));
    }

    #[test]
    fn uniform_cdf_counts_points() {
        let d = WeightedDistribution::uniform(lr());
        assert!((d.cdf(5.0).unwrap() - 6.0 / 11.0).abs() < 1e-15);
        assert_eq!(d.cdf(10.0).unwrap(), 1.0);
    }

    #[test]
    fn point_mass_at_seven() {
        let d = WeightedDistribution::point_mass(lr(), 7.0).unwrap();
        assert_eq!(d.mean(), 7.0);
        assert_eq!(d.variance(), 0.0);
    }

    #[test]
    fn interval_mass_is_closed() {
        let d = WeightedDistribution::uniform(lr());
        assert!((d.interval_mass(4.0, 6.0).unwrap() - 3.0 / 11.0).abs() < 1e-15);
        assert!((d.interval_mass(0.0, 10.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            d.interval_mass(6.0, 4.0),
            Err(Error::InvertedInterval { .. })
        ));
    }

    #[test]
    fn conditional_means() {
        let d = WeightedDistribution::from_shares(lr(), &[(0.0, 0.5), (10.0, 0.5)]).unwrap();
        assert_eq!(d.conditional_mean(Side::Below, 5.0).unwrap(), 0.0);
        assert_eq!(d.conditional_mean(Side::Above, 5.0).unwrap(), 10.0);
        let p = WeightedDistribution::point_mass(lr(), 5.0).unwrap();
        assert!(matches!(
            p.conditional_mean(Side::Below, 5.0),
            Err(Error::EmptyGroup {
                side: Side::Below,
                ..
            })
        ));
    }

    #[test]
    fn step_cdf_matches_cdf() {
        let d =
            WeightedDistribution::from_shares(lr(), &[(2.0, 1.0), (3.0, 0.0), (7.0, 3.0)]).unwrap();
        let s = d.step_cdf();
        assert_eq!(s.breakpoints, vec![2.0, 7.0]);
        for x in [0.0, 1.9, 2.0, 2.5, 6.99, 7.0, 10.0] {
            assert_eq!(s.eval(x), d.cdf(x).unwrap());
        }
    }
}
