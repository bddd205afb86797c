//! Affective polarization between the groups on either side of a cutoff.
//!
//! Voters strictly left of the cutoff form group L and voters strictly right
//! of it form group R. Each voter feels animosity `g(|x − m_j|)` toward the
//! mean position `m_j` of the opposing group; the aggregate is the average
//! animosity over the voters that belong to a group.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::distribution::{Side, WeightedDistribution};
use crate::error::{Error, Result};

const MONOTONE_SAMPLES: usize = 1000;

/// Increasing map from ideological distance to animosity.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum AnimosityFunction {
    Identity,
    Power(f64),
    /// Linear interpolation between `(distance, value)` knots, flat outside.
    PiecewiseLinear(Vec<(f64, f64)>),
}

impl AnimosityFunction {
    pub fn power(exponent: f64) -> Result<Self> {
        if !(exponent.is_finite() && exponent >= 1.0) {
            return Err(Error::InvalidAnimosity(format!(
                "power exponent must be at least 1, got {exponent}"
            )));
        }
        Ok(Self::Power(exponent))
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidAnimosity("no knots".into()));
        }
        if knots.iter().any(|(x, y)| !(x.is_finite() && y.is_finite())) {
            return Err(Error::InvalidAnimosity("non-finite knot".into()));
        }
        if knots.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::InvalidAnimosity(
                "knot distances must be strictly increasing".into(),
            ));
        }
        Ok(Self::PiecewiseLinear(knots))
    }

    pub fn eval(&self, distance: f64) -> f64 {
        match self {
            Self::Identity => distance,
            Self::Power(p) => distance.powf(*p),
            Self::PiecewiseLinear(knots) => {
                let k = knots.partition_point(|&(x, _)| x <= distance);
                if k == 0 {
                    knots[0].1
                } else if k == knots.len() {
                    knots[k - 1].1
                } else {
                    let (x0, y0) = knots[k - 1];
                    let (x1, y1) = knots[k];
                    y0 + (y1 - y0) * (distance - x0) / (x1 - x0)
                }
            }
        }
    }

    /// Checks `g(a) ≤ g(b)` on consecutive points of a dense grid over
    /// `[0, max_distance]`.
    pub fn validate(&self, max_distance: f64) -> Result<()> {
        let step = max_distance / MONOTONE_SAMPLES as f64;
        let mut prev = (0.0, self.eval(0.0));
        for i in 1..=MONOTONE_SAMPLES {
            let x = step * i as f64;
            let y = self.eval(x);
            if !(y >= prev.1) {
                return Err(Error::NonMonotoneG { lo: prev.0, hi: x });
            }
            prev = (x, y);
        }
        Ok(())
    }
}

impl FromStr for AnimosityFunction {
    type Err = Error;

    /// Parses `identity` or `power:<exponent>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "identity" => Ok(Self::Identity),
            Some(("power", p)) => {
                let p = p
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidAnimosity(format!("bad exponent {p:?}")))?;
                Self::power(p)
            }
            _ => Err(Error::InvalidAnimosity(format!("unrecognized {s:?}"))),
        }
    }
}

/// What happens to voters located exactly at the cutoff.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    /// Dropped from both groups; the average runs over the remaining mass.
    #[default]
    Exclude,
    AssignLeft,
    AssignRight,
    /// Half of the mass joins each group.
    Split,
}

impl FromStr for TiePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exclude" => Ok(Self::Exclude),
            "left" | "assign-left" => Ok(Self::AssignLeft),
            "right" | "assign-right" => Ok(Self::AssignRight),
            "split" => Ok(Self::Split),
            _ => Err(Error::InvalidAnimosity(format!("unknown tie policy {s:?}"))),
        }
    }
}

impl fmt::Display for TiePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exclude => "exclude",
            Self::AssignLeft => "assign-left",
            Self::AssignRight => "assign-right",
            Self::Split => "split",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffectiveModel {
    pub cutoff: f64,
    pub g: AnimosityFunction,
    pub tie_policy: TiePolicy,
}

impl AffectiveModel {
    pub fn new(cutoff: f64, g: AnimosityFunction) -> Self {
        Self {
            cutoff,
            g,
            tie_policy: TiePolicy::default(),
        }
    }

    pub fn with_ties(mut self, tie_policy: TiePolicy) -> Self {
        self.tie_policy = tie_policy;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffectiveReport {
    pub mean_left: f64,
    pub mean_right: f64,
    pub level: f64,
    pub excluded_mass: f64,
}

pub fn affective_level(
    dist: &WeightedDistribution,
    model: &AffectiveModel,
) -> Result<AffectiveReport> {
    let cutoff = model.cutoff;
    dist.scale().check_interior(cutoff)?;
    model.g.validate(dist.scale().width())?;

    let mut left = Vec::new();
    let mut right = Vec::new();
    let mut tied = 0.0;
    for (p, w) in dist.atoms() {
        if p < cutoff {
            left.push((p, w));
        } else if p > cutoff {
            right.push((p, w));
        } else {
            tied += w;
        }
    }
    let mut excluded_mass = 0.0;
    if tied > 0.0 {
        match model.tie_policy {
            TiePolicy::Exclude => excluded_mass = tied,
            TiePolicy::AssignLeft => left.push((cutoff, tied)),
            TiePolicy::AssignRight => right.push((cutoff, tied)),
            TiePolicy::Split => {
                left.push((cutoff, 0.5 * tied));
                right.push((cutoff, 0.5 * tied));
            }
        }
    }

    let mean_left = group_mean(&left).ok_or(Error::EmptyGroup {
        side: Side::Below,
        cutoff,
    })?;
    let mean_right = group_mean(&right).ok_or(Error::EmptyGroup {
        side: Side::Above,
        cutoff,
    })?;

    let toward_right: f64 = left
        .iter()
        .map(|&(p, w)| w * model.g.eval((mean_right - p).abs()))
        .sum();
    let toward_left: f64 = right
        .iter()
        .map(|&(p, w)| w * model.g.eval((p - mean_left).abs()))
        .sum();
    let level = (toward_right + toward_left) / (1.0 - excluded_mass);

    Ok(AffectiveReport {
        mean_left,
        mean_right,
        level,
        excluded_mass,
    })
}

fn group_mean(atoms: &[(f64, f64)]) -> Option<f64> {
    let mass: f64 = atoms.iter().map(|a| a.1).sum();
    (mass > 0.0).then(|| atoms.iter().map(|&(p, w)| p * w).sum::<f64>() / mass)
}

/// Moves `amount` of mass one grid step away from `xstar`, starting with the
/// atom at `xstar` (split evenly between its neighbours) and continuing with
/// the atoms nearest to `xstar` on either side. No mass crosses `xstar`, so
/// the result dominates `dist` in polarization around `xstar`.
pub fn spread_outward(
    dist: &WeightedDistribution,
    xstar: f64,
    amount: f64,
) -> Result<WeightedDistribution> {
    let scale = dist.scale();
    scale.check_interior(xstar)?;
    if !(amount >= 0.0) {
        return Err(Error::NegativeShare {
            position: xstar,
            share: amount,
        });
    }
    let grid = scale.grid();
    let n = grid.len();
    let original = dist.weights();
    let center = scale.index_of(xstar);

    let mut sources: Vec<(usize, usize)> = (0..n)
        .filter(|&i| Some(i) != center)
        .filter_map(|i| {
            if grid[i] < xstar && i > 0 {
                Some((i, i - 1))
            } else if grid[i] > xstar && i + 1 < n {
                Some((i, i + 1))
            } else {
                None
            }
        })
        .collect();
    sources.sort_by(|a, b| {
        (grid[a.0] - xstar)
            .abs()
            .total_cmp(&(grid[b.0] - xstar).abs())
            .then(grid[a.0].total_cmp(&grid[b.0]))
    });

    let center_targets: Vec<usize> = center
        .map(|c| {
            [c.checked_sub(1), (c + 1 < n).then_some(c + 1)]
                .into_iter()
                .flatten()
                .collect()
        })
        .unwrap_or_default();
    let available: f64 = sources.iter().map(|&(i, _)| original[i]).sum::<f64>()
        + match center {
            Some(c) if !center_targets.is_empty() => original[c],
            _ => 0.0,
        };
    if amount > available + 1e-12 {
        return Err(Error::InsufficientInteriorMass {
            requested: amount,
            available,
        });
    }

    let mut weights = original.to_vec();
    let mut remaining = amount.min(available);
    if let Some(c) = center.filter(|_| !center_targets.is_empty()) {
        let moved = original[c].min(remaining);
        weights[c] -= moved;
        let share = moved / center_targets.len() as f64;
        for &t in &center_targets {
            weights[t] += share;
        }
        remaining -= moved;
    }
    for (from, to) in sources {
        if remaining <= 0.0 {
            break;
        }
        let moved = original[from].min(remaining);
        weights[from] = (weights[from] - moved).max(0.0);
        weights[to] += moved;
        remaining -= moved;
    }
    WeightedDistribution::from_grid_weights(scale.clone(), weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::PolicyScale;
    use crate::order::{dominates_at, Relation};

    fn lr() -> PolicyScale {
        PolicyScale::integer(0, 10).unwrap()
    }

    fn shares(pairs: &[(f64, f64)]) -> WeightedDistribution {
        WeightedDistribution::from_shares(lr(), pairs).unwrap()
    }

    #[test]
    fn symmetric_two_point() {
        let d = shares(&[(0.0, 0.5), (10.0, 0.5)]);
        let r =
            affective_level(&d, &AffectiveModel::new(5.0, AnimosityFunction::Identity)).unwrap();
        assert_eq!((r.mean_left, r.mean_right), (0.0, 10.0));
        assert_eq!(r.level, 10.0);
        assert_eq!(r.excluded_mass, 0.0);
    }

    #[test]
    fn near_center_pair() {
        let d = shares(&[(4.0, 0.5), (6.0, 0.5)]);
        let r =
            affective_level(&d, &AffectiveModel::new(5.0, AnimosityFunction::Identity)).unwrap();
        assert_eq!(r.level, 2.0);
    }

    #[test]
    fn tie_policies() {
        let d = shares(&[(2.0, 0.25), (5.0, 0.5), (8.0, 0.25)]);
        let g = AnimosityFunction::Identity;
        let run = |t| affective_level(&d, &AffectiveModel::new(5.0, g.clone()).with_ties(t));

        let ex = run(TiePolicy::Exclude).unwrap();
        assert_eq!(ex.excluded_mass, 0.5);
        assert_eq!((ex.mean_left, ex.mean_right), (2.0, 8.0));
        // (0.25·6 + 0.25·6) / 0.5
        assert!((ex.level - 6.0).abs() < 1e-12);

        let left = run(TiePolicy::AssignLeft).unwrap();
        assert!((left.mean_left - 4.0).abs() < 1e-12);
        // 0.25·|8−2| + 0.5·|8−5| + 0.25·|8−4|
        assert!((left.level - 4.0).abs() < 1e-12);

        let split = run(TiePolicy::Split).unwrap();
        assert!((split.mean_left - 3.5).abs() < 1e-12);
        assert!((split.mean_right - 6.5).abs() < 1e-12);
        // 0.25·4.5 + 0.25·1.5 + 0.25·1.5 + 0.25·4.5
        assert!((split.level - 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_group_errors() {
        let d = shares(&[(5.0, 1.0), (8.0, 1.0)]);
        let model = AffectiveModel::new(5.0, AnimosityFunction::Identity);
        assert!(matches!(
            affective_level(&d, &model),
            Err(Error::EmptyGroup {
                side: Side::Below,
                ..
            })
        ));
        let model = model.with_ties(TiePolicy::AssignLeft);
        assert!(affective_level(&d, &model).is_ok());
    }

    #[test]
    fn non_monotone_g_rejected() {
        let d = shares(&[(0.0, 1.0), (10.0, 1.0)]);
        let g =
            AnimosityFunction::piecewise_linear(vec![(0.0, 0.0), (3.0, 2.0), (6.0, 1.0)]).unwrap();
        assert!(matches!(
            affective_level(&d, &AffectiveModel::new(5.0, g)),
            Err(Error::NonMonotoneG { .. })
        ));
    }

    #[test]
    fn animosity_parsing_and_eval() {
        assert_eq!(
            "identity".parse::<AnimosityFunction>().unwrap(),
            AnimosityFunction::Identity
        );
        let p: AnimosityFunction = "power:2".parse().unwrap();
        assert_eq!(p.eval(3.0), 9.0);
        assert!("power:0.5".parse::<AnimosityFunction>().is_err());
        assert!("cubic".parse::<AnimosityFunction>().is_err());
        let plf = AnimosityFunction::piecewise_linear(vec![(1.0, 0.0), (3.0, 4.0)]).unwrap();
        assert_eq!(plf.eval(0.0), 0.0);
        assert_eq!(plf.eval(2.0), 2.0);
        assert_eq!(plf.eval(9.0), 4.0);
        assert!(AnimosityFunction::piecewise_linear(vec![(1.0, 0.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn spread_from_center_atom() {
        let base = shares(&[(4.0, 1.0), (5.0, 1.0), (6.0, 1.0)]);
        let hat = spread_outward(&base, 5.0, 0.1).unwrap();
        let w = hat.weights();
        assert!((w[4] - (1.0 / 3.0 + 0.05)).abs() < 1e-15);
        assert!((w[5] - (1.0 / 3.0 - 0.1)).abs() < 1e-15);
        assert!((w[6] - (1.0 / 3.0 + 0.05)).abs() < 1e-15);
        assert_eq!(
            dominates_at(&base, &hat, 5.0).unwrap().relation,
            Relation::HatDominates
        );
    }

    #[test]
    fn zero_amount_is_equivalent() {
        let base = shares(&[(4.0, 1.0), (5.0, 1.0), (6.0, 1.0)]);
        let hat = spread_outward(&base, 5.0, 0.0).unwrap();
        assert_eq!(
            dominates_at(&base, &hat, 5.0).unwrap().relation,
            Relation::Equivalent
        );
    }

    #[test]
    fn spread_continues_past_center_and_off_grid() {
        let base = shares(&[(3.0, 1.0), (7.0, 1.0)]);
        let hat = spread_outward(&base, 4.5, 0.8).unwrap();
        // 3 is nearer to 4.5 than 7, so it is emptied first.
        assert!((hat.weights()[2] - 0.5).abs() < 1e-12);
        assert_eq!(hat.weights()[3], 0.0);
        assert!((hat.weights()[7] - 0.2).abs() < 1e-12);
        assert!((hat.weights()[8] - 0.3).abs() < 1e-12);
        assert_eq!(
            dominates_at(&base, &hat, 4.5).unwrap().relation,
            Relation::HatDominates
        );
    }

    #[test]
    fn insufficient_mass() {
        let base = shares(&[(0.0, 1.0), (10.0, 1.0)]);
        assert!(matches!(
            spread_outward(&base, 5.0, 0.1),
            Err(Error::InsufficientInteriorMass { .. })
        ));
        let base = shares(&[(1.0, 1.0), (10.0, 3.0)]);
        assert!(spread_outward(&base, 5.0, 0.25).is_ok());
        assert!(spread_outward(&base, 5.0, 0.3).is_err());
    }
}
