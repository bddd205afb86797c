//! Seeded Monte Carlo checks of the structural properties of the order,
//! the index, the affective aggregate and the salience construction.
//!
//! Trial `i` draws from its own ChaCha8 stream seeded from the master seed
//! and `i`, so results do not depend on how trials are scheduled.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::affective::{affective_level, spread_outward, AffectiveModel, AnimosityFunction};
use crate::distribution::{PolicyScale, WeightedDistribution};
use crate::error::{Error, Result};
use crate::order::{dominates_at, index, oracle_dominates_at, Relation};
use crate::salience::{induce, SalienceModel};

/// Outcome of one property over many seeded trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyOutcome {
    pub property: String,
    pub seed: u64,
    pub trials: usize,
    pub failures: usize,
    /// Trials that exercised the non-trivial branch of the property (for
    /// instance, pairs where dominance actually held).
    pub informative: usize,
    pub first_failure: Option<String>,
}

impl PropertyOutcome {
    fn new(property: &str, seed: u64, trials: usize) -> Self {
        Self {
            property: property.to_string(),
            seed,
            trials,
            failures: 0,
            informative: 0,
            first_failure: None,
        }
    }

    fn fail(&mut self, detail: impl FnOnce() -> String) {
        self.failures += 1;
        if self.first_failure.is_none() {
            self.first_failure = Some(detail());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    OracleEquivalence,
    IndexBounds,
    IndexOrder,
    Affective,
    SalienceMoments,
}

impl Property {
    pub const ALL: [Property; 5] = [
        Property::OracleEquivalence,
        Property::IndexBounds,
        Property::IndexOrder,
        Property::Affective,
        Property::SalienceMoments,
    ];

    pub fn run(self, seed: u64, trials: usize) -> PropertyOutcome {
        match self {
            Property::OracleEquivalence => check_oracle_equivalence(seed, trials),
            Property::IndexBounds => check_index_bounds(seed, trials),
            Property::IndexOrder => check_index_order(seed, trials),
            Property::Affective => check_affective(seed, trials),
            Property::SalienceMoments => check_salience_moments(seed, trials),
        }
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Property::OracleEquivalence),
            "bounds" => Ok(Property::IndexBounds),
            "order" => Ok(Property::IndexOrder),
            "affective" => Ok(Property::Affective),
            "salience" => Ok(Property::SalienceMoments),
            _ => Err(Error::UnknownSelector(s.to_string())),
        }
    }
}

/// Independent RNG stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut z = seed ^ trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

/// Random scale with 2 to `max_points` grid points: either the integers
/// `0..n` or sorted reals in `[0, 10]`.
pub fn random_scale<R: Rng>(rng: &mut R, max_points: usize) -> PolicyScale {
    let n = rng.gen_range(2..=max_points.max(2));
    if rng.gen_bool(0.6) {
        PolicyScale::integer(0, n as i32 - 1).expect("integer scale")
    } else {
        let mut grid: Vec<f64> = (0..n)
            .map(|_| (rng.gen_range(0.0..10.0_f64) * 100.0).round() / 100.0)
            .collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        PolicyScale::new(0.0, 10.0, grid).expect("sorted grid in bounds")
    }
}

/// Random weights on `scale`: about a third of the points are empty, and
/// half the time weights are coarse multiples of 0.1 so that equal CDF
/// values occur.
pub fn random_weights<R: Rng>(rng: &mut R, scale: &PolicyScale) -> WeightedDistribution {
    let coarse = rng.gen_bool(0.5);
    let n = scale.grid().len();
    let mut weights: Vec<f64> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.3) {
                0.0
            } else if coarse {
                f64::from(rng.gen_range(1..=10_u8)) / 10.0
            } else {
                rng.gen_range(0.01..1.0)
            }
        })
        .collect();
    if weights.iter().all(|&w| w == 0.0) {
        weights[rng.gen_range(0..n)] = 1.0;
    }
    WeightedDistribution::from_grid_weights(scale.clone(), weights).expect("positive weights")
}

/// A grid point strictly inside the bounds, or a uniform interior point.
pub fn random_center<R: Rng>(rng: &mut R, scale: &PolicyScale) -> f64 {
    let interior: Vec<f64> = scale
        .grid()
        .iter()
        .copied()
        .filter(|&g| scale.is_interior(g))
        .collect();
    match interior.choose(rng) {
        Some(&g) if rng.gen_bool(0.5) => g,
        _ => loop {
            let x = rng.gen_range(scale.min()..scale.max());
            if scale.is_interior(x) {
                break x;
            }
        },
    }
}

pub fn random_animosity<R: Rng>(rng: &mut R, max_distance: f64) -> AnimosityFunction {
    match rng.gen_range(0..3) {
        0 => AnimosityFunction::Identity,
        1 => AnimosityFunction::Power(rng.gen_range(1.0..4.0)),
        _ => {
            let k = rng.gen_range(2..6);
            let mut x = 0.0;
            let mut y = rng.gen_range(0.0..1.0);
            let mut knots = vec![(x, y)];
            for _ in 1..k {
                x += rng.gen_range(0.1..max_distance.max(0.2) / 2.0);
                // Flat pieces are allowed: g only needs to be non-decreasing.
                if rng.gen_bool(0.7) {
                    y += rng.gen_range(0.0..3.0);
                }
                knots.push((x, y));
            }
            AnimosityFunction::piecewise_linear(knots).expect("increasing knots")
        }
    }
}

fn movable_mass(dist: &WeightedDistribution, xstar: f64) -> f64 {
    match spread_outward(dist, xstar, f64::MAX) {
        Err(Error::InsufficientInteriorMass { available, .. }) => available,
        _ => 0.0,
    }
}

/// `dominates_at` reports weak hat dominance exactly when interval
/// enumeration does.
pub fn check_oracle_equivalence(seed: u64, trials: usize) -> PropertyOutcome {
    let mut out = PropertyOutcome::new("oracle-equivalence", seed, trials);
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let scale = random_scale(&mut rng, 12);
        let base = random_weights(&mut rng, &scale);
        let center = random_center(&mut rng, &scale);
        let hat = match rng.gen_range(0..10) {
            0 => base.clone(),
            1..=3 => random_weights(&mut rng, &scale),
            mode => {
                let spread_center = if mode == 9 {
                    random_center(&mut rng, &scale)
                } else {
                    center
                };
                let cap = movable_mass(&base, spread_center);
                let spread = spread_outward(&base, spread_center, cap * rng.gen_range(0.0..=1.0))
                    .expect("amount within capacity");
                if mode >= 7 {
                    perturb(&mut rng, &spread)
                } else {
                    spread
                }
            }
        };
        let verdict = dominates_at(&base, &hat, center).expect("same scale");
        let oracle = oracle_dominates_at(&base, &hat, center).expect("same scale");
        if verdict.relation == Relation::HatDominates {
            out.informative += 1;
        }
        if verdict.hat_weakly_dominates() != oracle {
            out.fail(|| {
                format!(
                    "trial {t}: center {center}, verdict {:?}, oracle {oracle}, base {:?}, hat {:?}",
                    verdict.relation,
                    base.weights(),
                    hat.weights()
                )
            });
        }
    }
    out
}

fn perturb<R: Rng>(rng: &mut R, dist: &WeightedDistribution) -> WeightedDistribution {
    let mut weights = dist.weights().to_vec();
    let i = rng.gen_range(0..weights.len());
    weights[i] += rng.gen_range(0.01..0.05);
    WeightedDistribution::from_grid_weights(dist.scale().clone(), weights).expect("positive")
}

const ZERO_TOL: f64 = 1e-12;

/// `0 ≤ P ≤ 1`; `P = 0` only for a point mass at the center; `P = 1` for
/// every split between the two bounds.
pub fn check_index_bounds(seed: u64, trials: usize) -> PropertyOutcome {
    let mut out = PropertyOutcome::new("index-bounds", seed, trials);
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let scale = random_scale(&mut rng, 12);
        let dist = random_weights(&mut rng, &scale);
        let center = random_center(&mut rng, &scale);
        let p = index(&dist, center).expect("interior center").value;
        let atoms: Vec<(f64, f64)> = dist.atoms().collect();
        let point_at_center = atoms.len() == 1 && atoms[0].0 == center;
        if !(0.0..=1.0).contains(&p) || (p <= ZERO_TOL) != point_at_center {
            out.fail(|| format!("trial {t}: P = {p} at {center} for {atoms:?}"));
        }

        if let Some(i) = scale.index_of(center) {
            out.informative += 1;
            let point = WeightedDistribution::point_mass(scale.clone(), scale.grid()[i])
                .expect("grid point");
            let p = index(&point, center).expect("interior").value;
            if p > ZERO_TOL {
                out.fail(|| format!("trial {t}: point mass at {center} has P = {p}"));
            }
        }

        let ends = PolicyScale::integer(0, rng.gen_range(2..12)).expect("scale");
        let alpha = rng.gen_range(0.0..=1.0);
        let split = WeightedDistribution::from_shares(
            ends.clone(),
            &[(ends.min(), alpha), (ends.max(), 1.0 - alpha)],
        )
        .expect("split");
        let c = random_center(&mut rng, &ends);
        let p = index(&split, c).expect("interior").value;
        if (p - 1.0).abs() > 1e-12 {
            out.fail(|| format!("trial {t}: split {alpha} has P = {p} at {c}"));
        }
    }
    out
}

/// Non-equivalent dominance built by spreading mass outward strictly raises
/// the index.
pub fn check_index_order(seed: u64, trials: usize) -> PropertyOutcome {
    let mut out = PropertyOutcome::new("index-order", seed, trials);
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let (base, center, cap) = loop {
            let scale = random_scale(&mut rng, 12);
            let base = random_weights(&mut rng, &scale);
            let center = random_center(&mut rng, &scale);
            let cap = movable_mass(&base, center);
            if cap > 1e-3 {
                break (base, center, cap);
            }
        };
        let hat = spread_outward(&base, center, cap * rng.gen_range(0.05..=1.0))
            .expect("within capacity");
        let verdict = dominates_at(&base, &hat, center).expect("same scale");
        if verdict.relation != Relation::HatDominates {
            out.fail(|| format!("trial {t}: spread gave {:?}", verdict.relation));
            continue;
        }
        out.informative += 1;
        let before = index(&base, center).expect("interior").value;
        let after = index(&hat, center).expect("interior").value;
        if after <= before {
            out.fail(|| format!("trial {t}: P {before} -> {after} at {center}"));
        }
    }
    out
}

/// Affective polarization weakly rises under outward spreads, and the group
/// means move weakly apart. Centers carry no mass.
pub fn check_affective(seed: u64, trials: usize) -> PropertyOutcome {
    let mut out = PropertyOutcome::new("affective", seed, trials);
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let (base, center) = loop {
            let scale = random_scale(&mut rng, 12);
            let base = random_weights(&mut rng, &scale);
            let center = random_center(&mut rng, &scale);
            let at_center = base.atoms().any(|(p, _)| p == center);
            let left = base.atoms().any(|(p, _)| p < center);
            let right = base.atoms().any(|(p, _)| p > center);
            if left && right && !at_center {
                break (base, center);
            }
        };
        let cap = movable_mass(&base, center);
        let hat =
            spread_outward(&base, center, cap * rng.gen_range(0.0..=1.0)).expect("within capacity");
        let g = random_animosity(&mut rng, base.scale().width());
        let model = AffectiveModel::new(center, g);
        let a = affective_level(&base, &model).expect("both groups non-empty");
        let b = affective_level(&hat, &model).expect("groups keep their mass");
        if cap > 0.0 {
            out.informative += 1;
        }
        let tol = 1e-12 * (1.0 + a.level.abs());
        let ok = b.level >= a.level - tol
            && b.mean_left <= a.mean_left + 1e-12
            && b.mean_right >= a.mean_right - 1e-12;
        if !ok {
            out.fail(|| format!("trial {t}: {a:?} -> {b:?} with {:?}", model.g));
        }
    }
    out
}

/// The induced distribution keeps unit mass and its mean is the
/// salience-weighted blend of the component means.
pub fn check_salience_moments(seed: u64, trials: usize) -> PropertyOutcome {
    let mut out = PropertyOutcome::new("salience-moments", seed, trials);
    let x = PolicyScale::integer(0, 10).expect("scale");
    for t in 0..trials {
        let mut rng = trial_rng(seed, t as u64);
        let lo = rng.gen_range(0.0..9.0_f64);
        let width = rng.gen_range(0.0..1.0);
        let k = rng.gen_range(1..5);
        let mut points: Vec<f64> = (0..k).map(|i| lo + width * i as f64 / k as f64).collect();
        points.dedup();
        let common = random_weights(
            &mut rng,
            &PolicyScale::new(0.0, 10.0, points).expect("grid"),
        );
        let divisive = random_weights(&mut rng, &x);
        let alpha = rng.gen_range(0.0..=1.0);
        let model = SalienceModel::new(common.clone(), divisive.clone(), alpha).expect("valid");
        let induced = induce(&model).expect("induced").dist;
        let mass: f64 = induced.weights().iter().sum();
        let expected = (1.0 - alpha) * common.mean() + alpha * divisive.mean();
        out.informative += 1;
        if (mass - 1.0).abs() > 1e-9 || (induced.mean() - expected).abs() > 1e-12 {
            out.fail(|| {
                format!(
                    "trial {t}: mass {mass}, mean {} vs {expected}",
                    induced.mean()
                )
            });
        }
    }
    out
}
