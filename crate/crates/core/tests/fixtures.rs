use polar_core::affective::{affective_level, AffectiveModel, AnimosityFunction};
use polar_core::distribution::{Side, WeightedDistribution};
use polar_core::order::{dominance_region, dominates_at, oracle_dominates_at};
use polar_core::survey::{fixture, Axis, Wave, FIXTURE_CSV};
use sha2::{Digest, Sha256};

fn dist(axis: Axis, wave: Wave) -> WeightedDistribution {
    fixture(axis, wave).unwrap().distribution().unwrap()
}

fn lr(year: u16) -> WeightedDistribution {
    dist(Axis::LeftRight0to10, Wave::year(year))
}

#[test]
fn embedded_tables_are_unchanged() {
    let digest: String = Sha256::digest(FIXTURE_CSV.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    assert_eq!(
        digest,
        "e9a9011eacabed1abdb6c2e906a94813c9835ba364c279899d5e3b5099ebce27"
    );
    assert!(FIXTURE_CSV.contains("lr,2004,0,1.169\n"));
}

#[test]
fn cdf_of_2004_left_right() {
    assert!((lr(2004).cdf(4.0).unwrap() - 0.218562).abs() < 1e-6);
}

#[test]
fn central_mass_2008_and_2012() {
    assert!((lr(2008).interval_mass(4.0, 6.0).unwrap() - 0.48409).abs() < 1e-4);
    assert!((lr(2012).interval_mass(4.0, 6.0).unwrap() - 0.50359).abs() < 1e-4);
}

#[test]
fn conditional_mean_2004_lib_con() {
    let d = dist(Axis::LibCon1to7, Wave::year(2004));
    let m = d.conditional_mean(Side::Above, 4.0).unwrap();
    assert!((m - 5.715078).abs() < 1e-6, "{m}");
}

#[test]
fn affective_2020_lib_con_regression() {
    let d = dist(Axis::LibCon1to7, Wave::year(2020));
    let r = affective_level(&d, &AffectiveModel::new(4.0, AnimosityFunction::Identity)).unwrap();
    assert!((r.mean_left - 2.214590).abs() < 1e-6);
    assert!((r.mean_right - 5.857214).abs() < 1e-6);
    assert!((r.excluded_mass - 0.270327).abs() < 1e-6);
    assert!((r.level - 3.642625).abs() < 1e-6, "{r:?}");
}

#[test]
fn dominance_verdicts_agree_with_the_oracle_on_survey_pairs() {
    for (a, b) in [
        (2004, 2008),
        (2008, 2012),
        (2012, 2016),
        (2016, 2020),
        (2012, 2020),
    ] {
        for c in 1..=9 {
            let c = f64::from(c);
            let v = dominates_at(&lr(a), &lr(b), c).unwrap();
            assert_eq!(
                v.hat_weakly_dominates(),
                oracle_dominates_at(&lr(a), &lr(b), c).unwrap(),
                "{a}→{b} at {c}"
            );
        }
    }
}

#[test]
fn election_region_is_within_the_interior() {
    let pre = dist(Axis::LibCon1to7, Wave::pre(2004));
    let post = dist(Axis::LibCon1to7, Wave::post(2004));
    let region = dominance_region(&pre, &post).unwrap();
    for c in &region {
        assert!(*c > 1.0 && *c < 7.0);
        assert!(oracle_dominates_at(&pre, &post, *c).unwrap());
    }
}
