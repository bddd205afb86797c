//! Positions formed as a salience-weighted blend of a common-value issue and
//! a divisive issue: `x = (1 − α) c + α d` with `c ~ G_c`, `d ~ G_d`
//! independent.

use serde::Serialize;

use crate::distribution::{PolicyScale, WeightedDistribution, GRID_EPS};
use crate::error::{Error, Result};
use crate::order::{
    dominance_region, dominates_at, index, DominanceVerdict, PolarizationIndex, Relation,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SalienceModel {
    common: WeightedDistribution,
    divisive: WeightedDistribution,
    alpha: f64,
}

impl SalienceModel {
    /// `common` must have its support inside the bounds of `divisive`'s
    /// scale, which defines the policy space.
    pub fn new(
        common: WeightedDistribution,
        divisive: WeightedDistribution,
        alpha: f64,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        let (lo, hi) = support_range(&common);
        if !(divisive.scale().contains(lo) && divisive.scale().contains(hi)) {
            return Err(Error::CommonSupportOutsideScale { lo, hi });
        }
        Ok(Self {
            common,
            divisive,
            alpha,
        })
    }

    pub fn common(&self) -> &WeightedDistribution {
        &self.common
    }

    pub fn divisive(&self) -> &WeightedDistribution {
        &self.divisive
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            alpha,
            ..self.clone()
        })
    }

    /// `[c_lo, c_hi]`, the range of the common-value support.
    pub fn common_band(&self) -> (f64, f64) {
        support_range(&self.common)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

fn support_range(dist: &WeightedDistribution) -> (f64, f64) {
    let mut atoms = dist.atoms().map(|(p, _)| p);
    let first = atoms.next().expect("normalized distribution has an atom");
    atoms.fold((first, first), |(lo, hi), p| (lo.min(p), hi.max(p)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InducedDistribution {
    pub dist: WeightedDistribution,
    pub alpha: f64,
    pub support_note: String,
}

/// Exact discrete convolution of the two components over the product of
/// their supports; points within [`GRID_EPS`] are merged.
pub fn induce(model: &SalienceModel) -> Result<InducedDistribution> {
    let alpha = model.alpha;
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (c, wc) in model.common.atoms() {
        for (d, wd) in model.divisive.atoms() {
            points.push(((1.0 - alpha) * c + alpha * d, wc * wd));
        }
    }
    let products = points.len();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for (x, w) in points {
        match merged.last_mut() {
            Some(last) if x - last.0 <= GRID_EPS => last.1 += w,
            _ => merged.push((x, w)),
        }
    }
    let bounds = model.divisive.scale();
    let (grid, weights): (Vec<f64>, Vec<f64>) = merged
        .into_iter()
        .map(|(x, w)| (x.clamp(bounds.min(), bounds.max()), w))
        .unzip();
    let support = grid.len();
    let scale = PolicyScale::new(bounds.min(), bounds.max(), grid)?;
    Ok(InducedDistribution {
        dist: WeightedDistribution::from_grid_weights(scale, weights)?,
        alpha,
        support_note: format!(
            "{products} products of common and divisive atoms merged into {support} points"
        ),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SalienceOutcome {
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    /// Verdict of `F_{alpha_hi}` against `F_{alpha_lo}` at the crossing, or
    /// at the middle of the common band when there is no crossing.
    pub verdict: DominanceVerdict,
    pub crossing: Option<f64>,
    /// Every center at which the higher salience dominates.
    pub region: Vec<f64>,
    /// Whether the crossing lies in the common band widened by one grid step
    /// on each side.
    pub crossing_in_band: bool,
}

pub fn salience_dominance(
    model: &SalienceModel,
    alpha_lo: f64,
    alpha_hi: f64,
) -> Result<SalienceOutcome> {
    if !(alpha_lo > 0.0 && alpha_lo < alpha_hi && alpha_hi <= 1.0) {
        return Err(Error::DegenerateAlpha {
            lo: alpha_lo,
            hi: alpha_hi,
        });
    }
    let low = induce(&model.with_alpha(alpha_lo)?)?.dist;
    let high = induce(&model.with_alpha(alpha_hi)?)?.dist;
    let region = dominance_region(&low, &high)?;

    let (c_lo, c_hi) = model.common_band();
    let band_mid = 0.5 * (c_lo + c_hi);
    let crossing = region
        .iter()
        .copied()
        .min_by(|a, b| (a - band_mid).abs().total_cmp(&(b - band_mid).abs()));

    let verdict = match crossing {
        Some(x) => dominates_at(&low, &high, x)?,
        None if low.scale().is_interior(band_mid) => dominates_at(&low, &high, band_mid)?,
        None => DominanceVerdict {
            relation: Relation::Incomparable,
            center: band_mid,
            witness: None,
        },
    };

    let crossing_in_band = crossing.is_some_and(|x| {
        let mut points: Vec<f64> = low
            .scale()
            .grid()
            .iter()
            .chain(high.scale().grid())
            .copied()
            .collect();
        points.sort_by(f64::total_cmp);
        let below = points
            .iter()
            .rev()
            .find(|&&p| p < c_lo - GRID_EPS)
            .copied()
            .unwrap_or(c_lo);
        let above = points
            .iter()
            .find(|&&p| p > c_hi + GRID_EPS)
            .copied()
            .unwrap_or(c_hi);
        below <= x && x <= above
    });

    Ok(SalienceOutcome {
        alpha_lo,
        alpha_hi,
        verdict,
        crossing,
        region,
        crossing_in_band,
    })
}

/// Index of `F_α` at each center, one row per α in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SalienceSurface {
    pub alphas: Vec<f64>,
    pub centers: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

pub fn salience_sweep(
    model: &SalienceModel,
    alphas: &[f64],
    centers: &[f64],
) -> Result<SalienceSurface> {
    let mut alphas = alphas.to_vec();
    alphas.sort_by(f64::total_cmp);
    let values = alphas
        .iter()
        .map(|&a| {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::AlphaOutOfRange(a));
            }
            let induced = induce(&model.with_alpha(a)?)?;
            centers
                .iter()
                .map(|&c| index(&induced.dist, c).map(|p: PolarizationIndex| p.value))
                .collect()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(SalienceSurface {
        alphas,
        centers: centers.to_vec(),
        values,
    })
}
