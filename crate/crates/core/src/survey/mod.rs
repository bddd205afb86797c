//! Survey tables: shares of respondents by self-reported position, one
//! table per instrument axis and wave.

mod csv_io;
mod fixtures;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use csv_io::{emit_csv, load_csv, parse_csv, Schema};
pub use fixtures::{fixture, fixtures, reported_moments, ReportedMoments, FIXTURE_CSV};

use crate::distribution::{PolicyScale, WeightedDistribution};
use crate::error::{Error, Result};

/// Survey instrument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Axis {
    /// 0 (left) to 10 (right).
    #[serde(rename = "lr")]
    LeftRight0to10,
    /// 1 (extremely liberal) to 7 (extremely conservative).
    #[serde(rename = "lc")]
    LibCon1to7,
}

impl Axis {
    pub fn scale(self) -> PolicyScale {
        match self {
            Axis::LeftRight0to10 => PolicyScale::integer(0, 10),
            Axis::LibCon1to7 => PolicyScale::integer(1, 7),
        }
        .expect("instrument scales are valid")
    }

    pub fn code(self) -> &'static str {
        match self {
            Axis::LeftRight0to10 => "lr",
            Axis::LibCon1to7 => "lc",
        }
    }

    /// The axis whose instrument grid is exactly the set of positions, or
    /// failing that the first whose grid contains every position.
    pub fn infer(positions: &[f64]) -> Result<Self> {
        let axes = [Axis::LeftRight0to10, Axis::LibCon1to7];
        let covers = |axis: &Axis| {
            let scale = axis.scale();
            positions.iter().all(|&p| scale.index_of(p).is_some())
        };
        let exact = |axis: &Axis| {
            let scale = axis.scale();
            scale.grid().iter().all(|&g| {
                positions
                    .iter()
                    .any(|&p| scale.index_of(p) == scale.index_of(g))
            })
        };
        axes.iter()
            .find(|a| covers(a) && exact(a))
            .or_else(|| axes.iter().find(|a| covers(a)))
            .copied()
            .ok_or_else(|| Error::UnknownAxis(positions.to_vec()))
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lr" | "left-right" => Ok(Axis::LeftRight0to10),
            "lc" | "lib-con" => Ok(Axis::LibCon1to7),
            _ => Err(Error::UnknownSelector(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Pre,
    Post,
}

/// One survey administration: a year, optionally marked as taken before or
/// after the election.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Wave {
    pub year: u16,
    pub phase: Option<Phase>,
}

impl Wave {
    pub fn year(year: u16) -> Self {
        Self { year, phase: None }
    }

    pub fn pre(year: u16) -> Self {
        Self {
            year,
            phase: Some(Phase::Pre),
        }
    }

    pub fn post(year: u16) -> Self {
        Self {
            year,
            phase: Some(Phase::Post),
        }
    }
}

impl fmt::Display for Wave {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase {
            None => write!(f, "{}", self.year),
            Some(Phase::Pre) => write!(f, "{}-pre", self.year),
            Some(Phase::Post) => write!(f, "{}-post", self.year),
        }
    }
}

impl FromStr for Wave {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (year, phase) = match s.split_once('-') {
            None => (s, None),
            Some((y, "pre")) => (y, Some(Phase::Pre)),
            Some((y, "post")) => (y, Some(Phase::Post)),
            Some(_) => return Err(Error::UnknownSelector(s.to_string())),
        };
        let year = year
            .parse()
            .map_err(|_| Error::UnknownSelector(s.to_string()))?;
        Ok(Wave { year, phase })
    }
}

impl Serialize for Wave {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShareUnit {
    Percent,
    Proportion,
}

impl ShareUnit {
    /// Percent if the total is within 2% of 100, proportion if within 2%
    /// of 1.
    pub fn detect(total: f64) -> Option<Self> {
        if (total - 100.0).abs() <= 2.0 {
            Some(ShareUnit::Percent)
        } else if (total - 1.0).abs() <= 0.02 {
            Some(ShareUnit::Proportion)
        } else {
            None
        }
    }
}

impl FromStr for ShareUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "percent" => Ok(ShareUnit::Percent),
            "proportion" => Ok(ShareUnit::Proportion),
            _ => Err(Error::UnknownSelector(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurveyTable {
    pub axis: Axis,
    pub wave: Wave,
    /// `(position, share)` in file order.
    pub rows: Vec<(f64, f64)>,
    pub unit: ShareUnit,
}

impl SurveyTable {
    pub fn total(&self) -> f64 {
        self.rows.iter().map(|r| r.1).sum()
    }

    pub fn distribution(&self) -> Result<WeightedDistribution> {
        WeightedDistribution::from_shares(self.axis.scale(), &self.rows)
    }

    pub fn label(&self) -> String {
        format!("{}:{}", self.axis, self.wave)
    }
}

/// Picks tables by `axis`, `axis:wave`, or `axis:*`.
pub fn select<'a>(tables: &'a [SurveyTable], selector: &str) -> Result<Vec<&'a SurveyTable>> {
    let unknown = || Error::UnknownSelector(selector.to_string());
    let (axis, wave) = match selector.split_once(':') {
        None => (selector, None),
        Some((a, "*")) => (a, None),
        Some((a, w)) => (a, Some(w.parse::<Wave>().map_err(|_| unknown())?)),
    };
    let axis: Axis = axis.parse().map_err(|_| unknown())?;
    let picked: Vec<&SurveyTable> = tables
        .iter()
        .filter(|t| t.axis == axis && wave.is_none_or(|w| t.wave == w))
        .collect();
    if picked.is_empty() {
        Err(unknown())
    } else {
        Ok(picked)
    }
}

/// Like [`select`] but requires exactly one table.
pub fn select_one<'a>(tables: &'a [SurveyTable], selector: &str) -> Result<&'a SurveyTable> {
    match select(tables, selector)?.as_slice() {
        [one] => Ok(one),
        _ => Err(Error::UnknownSelector(format!(
            "{selector} (matches several tables; name a wave)"
        ))),
    }
}
