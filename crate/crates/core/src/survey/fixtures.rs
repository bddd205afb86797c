//! Survey shares as printed in the published tables, kept as decimal text
//! and parsed once.

use std::sync::OnceLock;

use serde::Serialize;

use super::{parse_csv, Axis, Schema, ShareUnit, SurveyTable, Wave};

/// Long-format CSV of every embedded table (shares in percent).
pub const FIXTURE_CSV: &str = include_str!("fixtures.csv");

const MOMENTS_CSV: &str = include_str!("reported_moments.csv");

/// 5 left-right waves (2004–2020), 5 pre-election liberal-conservative
/// waves labelled by year, and the liberal-conservative pre/post pairs for
/// 2004 and 2016.
pub fn fixtures() -> &'static [SurveyTable] {
    static TABLES: OnceLock<Vec<SurveyTable>> = OnceLock::new();
    TABLES.get_or_init(|| {
        parse_csv(
            FIXTURE_CSV.as_bytes(),
            Schema::Long,
            Some(ShareUnit::Percent),
        )
        .expect("embedded fixtures parse")
    })
}

pub fn fixture(axis: Axis, wave: Wave) -> Option<&'static SurveyTable> {
    fixtures().iter().find(|t| t.axis == axis && t.wave == wave)
}

/// Mean and variance printed beneath each table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportedMoments {
    pub mean: f64,
    pub variance: f64,
}

pub fn reported_moments(axis: Axis, wave: Wave) -> Option<ReportedMoments> {
    MOMENTS_CSV.lines().skip(1).find_map(|line| {
        let cells: Vec<&str> = line.split(',').collect();
        let [a, w, mean, variance] = cells.as_slice() else {
            return None;
        };
        (a.parse::<Axis>().ok()? == axis && w.parse::<Wave>().ok()? == wave).then(|| {
            ReportedMoments {
                mean: mean.parse().expect("numeric mean"),
                variance: variance.parse().expect("numeric variance"),
            }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn share(axis: Axis, wave: Wave, position: f64) -> f64 {
        fixture(axis, wave)
            .unwrap()
            .rows
            .iter()
            .find(|r| r.0 == position)
            .unwrap()
            .1
    }

    #[test]
    fn table_counts() {
        let all = fixtures();
        assert_eq!(all.len(), 14);
        let lr = all
            .iter()
            .filter(|t| t.axis == Axis::LeftRight0to10)
            .count();
        assert_eq!(lr, 5);
        assert!(all
            .iter()
            .filter(|t| t.axis == Axis::LeftRight0to10)
            .all(|t| t.rows.len() == 11));
        assert!(all
            .iter()
            .filter(|t| t.axis == Axis::LibCon1to7)
            .all(|t| t.rows.len() == 7));
    }

    #[test]
    fn printed_values() {
        assert_eq!(share(Axis::LeftRight0to10, Wave::year(2020), 10.0), 12.511);
        assert_eq!(share(Axis::LibCon1to7, Wave::post(2016), 4.0), 29.11);
        assert_eq!(share(Axis::LibCon1to7, Wave::year(2008), 1.0), 3.68);
    }

    #[test]
    fn pre_election_columns_repeat() {
        for year in [2004, 2016] {
            assert_eq!(
                fixture(Axis::LibCon1to7, Wave::year(year)).unwrap().rows,
                fixture(Axis::LibCon1to7, Wave::pre(year)).unwrap().rows
            );
        }
    }

    #[test]
    fn moments_lookup() {
        let m = reported_moments(Axis::LeftRight0to10, Wave::year(2004)).unwrap();
        assert_eq!((m.mean, m.variance), (5.875, 5.336));
        let m = reported_moments(Axis::LibCon1to7, Wave::post(2016)).unwrap();
        assert_eq!((m.mean, m.variance), (4.153, 2.375));
        assert!(reported_moments(Axis::LibCon1to7, Wave::year(1999)).is_none());
    }
}
