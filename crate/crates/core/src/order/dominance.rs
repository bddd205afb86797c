use serde::Serialize;

use crate::distribution::WeightedDistribution;
use crate::error::Result;

/// Tolerance on the sign of CDF differences and interval-mass comparisons.
pub const DOMINANCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// The hat distribution is more polarized around the center.
    HatDominates,
    /// The base distribution is more polarized around the center.
    BaseDominates,
    /// Both conditions hold, i.e. the distribution functions coincide.
    Equivalent,
    Incomparable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominanceVerdict {
    pub relation: Relation,
    pub center: f64,
    /// First point at which the hat-dominance condition fails.
    pub witness: Option<f64>,
}

impl DominanceVerdict {
    /// True when the hat distribution weakly dominates, identical
    /// distributions included.
    pub fn hat_weakly_dominates(&self) -> bool {
        matches!(self.relation, Relation::HatDominates | Relation::Equivalent)
    }
}

fn union_grid(a: &WeightedDistribution, b: &WeightedDistribution) -> Vec<f64> {
    let mut points: Vec<f64> = a
        .scale()
        .grid()
        .iter()
        .chain(b.scale().grid())
        .copied()
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
}

/// Single-crossing test: the hat distribution dominates at `xstar` iff
/// `F̂ − F ≥ 0` left of `xstar` and `F̂ − F ≤ 0` from `xstar` on.
pub fn dominates_at(
    base: &WeightedDistribution,
    hat: &WeightedDistribution,
    xstar: f64,
) -> Result<DominanceVerdict> {
    base.scale().check_bounds(hat.scale())?;
    base.scale().check_interior(xstar)?;
    Ok(verdict_on(base, hat, xstar, &union_grid(base, hat)))
}

// Both step functions are constant between consecutive union points, so
// checking the union grid plus the center itself covers every x.
fn verdict_on(
    base: &WeightedDistribution,
    hat: &WeightedDistribution,
    xstar: f64,
    points: &[f64],
) -> DominanceVerdict {
    let mut hat_witness = None;
    let mut base_ok = true;
    let split = points.partition_point(|&p| p < xstar);
    let left = points[..split].iter().map(|&p| (p, true));
    let right = std::iter::once(xstar)
        .chain(points[split..].iter().copied())
        .map(|p| (p, false));
    for (x, is_left) in left.chain(right) {
        let delta = hat.cdf_at(x) - base.cdf_at(x);
        let (hat_ok_here, base_ok_here) = if is_left {
            (delta >= -DOMINANCE_TOL, delta <= DOMINANCE_TOL)
        } else {
            (delta <= DOMINANCE_TOL, delta >= -DOMINANCE_TOL)
        };
        if !hat_ok_here && hat_witness.is_none() {
            hat_witness = Some(x);
        }
        base_ok &= base_ok_here;
    }
    let relation = match (hat_witness.is_none(), base_ok) {
        (true, true) => Relation::Equivalent,
        (true, false) => Relation::HatDominates,
        (false, true) => Relation::BaseDominates,
        (false, false) => Relation::Incomparable,
    };
    DominanceVerdict {
        relation,
        center: xstar,
        witness: hat_witness,
    }
}

/// Interval-enumeration check: true iff every closed interval containing
/// `xstar` carries weakly less mass under `hat` than under `base`.
///
/// Candidate endpoints are the scale bounds, every grid point of either
/// distribution, the midpoints between adjacent grid points, and `xstar`.
pub fn oracle_dominates_at(
    base: &WeightedDistribution,
    hat: &WeightedDistribution,
    xstar: f64,
) -> Result<bool> {
    base.scale().check_bounds(hat.scale())?;
    base.scale().check_interior(xstar)?;
    let scale = base.scale();
    let atoms = union_grid(base, hat);
    let mut endpoints = vec![scale.min(), scale.max(), xstar];
    endpoints.extend(&atoms);
    endpoints.extend(atoms.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    endpoints.sort_by(f64::total_cmp);
    endpoints.dedup();

    let lows: Vec<f64> = endpoints.iter().copied().filter(|&e| e <= xstar).collect();
    let highs: Vec<f64> = endpoints.iter().copied().filter(|&e| e >= xstar).collect();
    Ok(lows.iter().all(|&lo| {
        highs
            .iter()
            .all(|&hi| hat.closed_mass(lo, hi) <= base.closed_mass(lo, hi) + DOMINANCE_TOL)
    }))
}

/// Interior grid points at which `hat` strictly dominates `base`.
pub fn dominance_region(
    base: &WeightedDistribution,
    hat: &WeightedDistribution,
) -> Result<Vec<f64>> {
    base.scale().check_bounds(hat.scale())?;
    let points = union_grid(base, hat);
    Ok(points
        .iter()
        .copied()
        .filter(|&c| base.scale().is_interior(c))
        .filter(|&c| verdict_on(base, hat, c, &points).relation == Relation::HatDominates)
        .collect())
}
