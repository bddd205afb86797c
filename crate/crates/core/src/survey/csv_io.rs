use std::fs::File;
use std::io::Read;
use std::path::Path;

use super::{Axis, ShareUnit, SurveyTable, Wave};
use crate::error::{Error, Result};

/// Column layout of a survey CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    /// `axis,wave,position,share`, one row per share.
    Long,
    /// `position,<wave>,<wave>,…`, one column per wave of a single axis.
    Wide,
}

impl Schema {
    /// Long if the first header cell is `axis`, wide otherwise.
    pub fn detect(first_line: &str) -> Schema {
        match first_line.split(',').next().map(str::trim) {
            Some(cell) if cell.eq_ignore_ascii_case("axis") => Schema::Long,
            _ => Schema::Wide,
        }
    }
}

type Group = (Axis, Wave, Vec<(f64, f64)>);

pub fn load_csv(
    path: impl AsRef<Path>,
    schema: Schema,
    unit: Option<ShareUnit>,
) -> Result<Vec<SurveyTable>> {
    parse_csv(File::open(path)?, schema, unit)
}

/// Parses survey tables. Units are detected per table from the share total
/// unless `unit` overrides them.
pub fn parse_csv<R: Read>(
    reader: R,
    schema: Schema,
    unit: Option<ShareUnit>,
) -> Result<Vec<SurveyTable>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut groups: Vec<Group> = Vec::new();
    match schema {
        Schema::Long => {
            let expected = ["axis", "wave", "position", "share"];
            if headers.len() != 4
                || !headers
                    .iter()
                    .zip(expected)
                    .all(|(h, e)| h.eq_ignore_ascii_case(e))
            {
                return Err(Error::MalformedHeader(format!(
                    "expected {:?}, found {:?}",
                    expected, headers
                )));
            }
            for record in rdr.records() {
                let record = record?;
                let line = line_of(&record);
                let axis: Axis = record[0].parse()?;
                let wave: Wave = record[1].parse()?;
                let position = number(&record[2], line, "position")?;
                let share = number(&record[3], line, "share")?;
                check_row(axis, position, share)?;
                match groups.iter_mut().find(|g| g.0 == axis && g.1 == wave) {
                    Some(g) => g.2.push((position, share)),
                    None => groups.push((axis, wave, vec![(position, share)])),
                }
            }
        }
        Schema::Wide => {
            if headers.len() < 2 || !headers[0].eq_ignore_ascii_case("position") {
                return Err(Error::MalformedHeader(format!(
                    "expected position followed by wave columns, found {:?}",
                    headers
                )));
            }
            let waves = headers[1..]
                .iter()
                .map(|h| {
                    h.parse::<Wave>()
                        .map_err(|_| Error::MalformedHeader(format!("bad wave column {h:?}")))
                })
                .collect::<Result<Vec<Wave>>>()?;
            let mut columns: Vec<Vec<(f64, f64)>> = vec![Vec::new(); waves.len()];
            for record in rdr.records() {
                let record = record?;
                let line = line_of(&record);
                let position = number(&record[0], line, "position")?;
                for (j, column) in columns.iter_mut().enumerate() {
                    let share = number(&record[j + 1], line, &headers[j + 1])?;
                    if share < 0.0 {
                        return Err(Error::NegativeShare { position, share });
                    }
                    column.push((position, share));
                }
            }
            let positions: Vec<f64> = columns
                .first()
                .map(|c| c.iter().map(|r| r.0).collect())
                .unwrap_or_default();
            let axis = Axis::infer(&positions)?;
            groups.extend(waves.into_iter().zip(columns).map(|(w, c)| (axis, w, c)));
        }
    }

    groups
        .into_iter()
        .map(|(axis, wave, rows)| {
            let total: f64 = rows.iter().map(|r| r.1).sum();
            let unit = match unit {
                Some(u) => u,
                None => ShareUnit::detect(total).ok_or_else(|| Error::AmbiguousTotal {
                    wave: format!("{axis}:{wave}"),
                    total,
                })?,
            };
            Ok(SurveyTable {
                axis,
                wave,
                rows,
                unit,
            })
        })
        .collect()
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn number(cell: &str, line: u64, column: &str) -> Result<f64> {
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::NonNumericCell {
            line,
            column: column.to_string(),
            value: cell.to_string(),
        })
}

fn check_row(axis: Axis, position: f64, share: f64) -> Result<()> {
    if share < 0.0 {
        return Err(Error::NegativeShare { position, share });
    }
    if axis.scale().index_of(position).is_none() {
        return Err(Error::PositionOffGrid(position));
    }
    Ok(())
}

/// Writes tables in the given schema. Numbers use the shortest decimal text
/// that parses back to the same `f64`.
pub fn emit_csv(tables: &[SurveyTable], schema: Schema) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    match schema {
        Schema::Long => {
            wtr.write_record(["axis", "wave", "position", "share"])?;
            for t in tables {
                for &(p, s) in &t.rows {
                    wtr.write_record([
                        t.axis.to_string(),
                        t.wave.to_string(),
                        p.to_string(),
                        s.to_string(),
                    ])?;
                }
            }
        }
        Schema::Wide => {
            let first = tables
                .first()
                .ok_or_else(|| Error::MalformedHeader("no tables to write".into()))?;
            let positions: Vec<f64> = first.rows.iter().map(|r| r.0).collect();
            for t in tables {
                let same_positions = t.rows.iter().map(|r| r.0).eq(positions.iter().copied());
                if t.axis != first.axis || !same_positions {
                    return Err(Error::MalformedHeader(format!(
                        "{} does not share the positions of {}",
                        t.label(),
                        first.label()
                    )));
                }
            }
            let mut header = vec!["position".to_string()];
            header.extend(tables.iter().map(|t| t.wave.to_string()));
            wtr.write_record(&header)?;
            for (i, p) in positions.iter().enumerate() {
                let mut row = vec![p.to_string()];
                row.extend(tables.iter().map(|t| t.rows[i].1.to_string()));
                wtr.write_record(&row)?;
            }
        }
    }
    let bytes = wtr.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn long_errors() {
        let bad_header = "axis,year,position,share\nlr,2004,0,1\n";
        assert!(matches!(
            parse_csv(bad_header.as_bytes(), Schema::Long, None),
            Err(Error::MalformedHeader(_))
        ));
        let negative = "axis,wave,position,share\nlr,2004,0,-1\nlr,2004,1,101\n";
        assert!(matches!(
            parse_csv(negative.as_bytes(), Schema::Long, None),
            Err(Error::NegativeShare { .. })
        ));
        let text = "axis,wave,position,share\nlr,2004,0,abc\n";
        assert!(matches!(
            parse_csv(text.as_bytes(), Schema::Long, None),
            Err(Error::NonNumericCell { line: 2, .. })
        ));
        let ambiguous = "axis,wave,position,share\nlr,2004,0,30\nlr,2004,1,20\n";
        assert!(matches!(
            parse_csv(ambiguous.as_bytes(), Schema::Long, None),
            Err(Error::AmbiguousTotal { .. })
        ));
        let off = "axis,wave,position,share\nlc,2004,0,100\n";
        assert!(matches!(
            parse_csv(off.as_bytes(), Schema::Long, None),
            Err(Error::PositionOffGrid(_))
        ));
    }

    #[test]
    fn proportions_with_rounding_residue() {
        let text = "position,2030\n4,0.33333\n5,0.33333\n6,0.33333\n";
        let tables = parse_csv(text.as_bytes(), Schema::Wide, None).unwrap();
        assert_eq!(tables.len(), 1);
        assert_eq!(tables[0].unit, ShareUnit::Proportion);
        assert_eq!(tables[0].axis, Axis::LeftRight0to10);
        let d = tables[0].distribution().unwrap();
        assert!((d.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn override_skips_detection() {
        let text = "axis,wave,position,share\nlr,2004,0,30\nlr,2004,1,20\n";
        let t = parse_csv(text.as_bytes(), Schema::Long, Some(ShareUnit::Percent)).unwrap();
        assert_eq!(t[0].unit, ShareUnit::Percent);
    }

    #[test]
    fn wide_header_validation() {
        let text = "pos,2004\n0,100\n";
        assert!(matches!(
            parse_csv(text.as_bytes(), Schema::Wide, None),
            Err(Error::MalformedHeader(_))
        ));
        let text = "position,someday\n0,100\n";
        assert!(matches!(
            parse_csv(text.as_bytes(), Schema::Wide, None),
            Err(Error::MalformedHeader(_))
        ));
    }

    #[test]
    fn schema_detection() {
        assert_eq!(Schema::detect("axis,wave,position,share"), Schema::Long);
        assert_eq!(Schema::detect("position,2004"), Schema::Wide);
    }

    #[test]
    fn wide_emit_rejects_mixed_axes() {
        let all = super::super::fixtures();
        let mixed = [all[0].clone(), all[5].clone()];
        assert!(emit_csv(&mixed, Schema::Wide).is_err());
    }
}
