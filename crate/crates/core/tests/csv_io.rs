use std::io::Write;

use polar_core::survey::{emit_csv, load_csv, parse_csv, Axis, Schema, ShareUnit, Wave};
use polar_core::Error;

#[test]
fn long_file_round_trip() {
    let text =
        "axis,wave,position,share\nlc,2016-pre,1,0.25\nlc,2016-pre,4,0.5\nlc,2016-pre,7,0.25\n";
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(text.as_bytes()).unwrap();
    let tables = load_csv(file.path(), Schema::Long, None).unwrap();
    assert_eq!(tables.len(), 1);
    assert_eq!(tables[0].axis, Axis::LibCon1to7);
    assert_eq!(tables[0].wave, Wave::pre(2016));
    assert_eq!(tables[0].unit, ShareUnit::Proportion);
    assert_eq!(emit_csv(&tables, Schema::Long).unwrap(), text);
}

#[test]
fn wide_round_trip_keeps_digits() {
    let text = "position,2004,2008\n0,10.1,0.3333333333333333\n5,80,33.33333333333333\n10,9.9,66.33333333333334\n";
    let tables = parse_csv(text.as_bytes(), Schema::Wide, None).unwrap();
    assert_eq!(tables.len(), 2);
    assert_eq!(tables[0].axis, Axis::LeftRight0to10);
    assert_eq!(emit_csv(&tables, Schema::Wide).unwrap(), text);
}

#[test]
fn schema_detection() {
    assert_eq!(Schema::detect("axis,wave,position,share"), Schema::Long);
    assert_eq!(Schema::detect("position,2004"), Schema::Wide);
}

#[test]
fn malformed_inputs_are_reported() {
    let bad_cell = "axis,wave,position,share\nlr,2004,5,abc\n";
    match parse_csv(bad_cell.as_bytes(), Schema::Long, None) {
        Err(Error::NonNumericCell { line, column, .. }) => {
            assert_eq!(line, 2);
            assert_eq!(column, "share");
        }
        other => panic!("{other:?}"),
    }
    let negative = "axis,wave,position,share\nlr,2004,5,-1\nlr,2004,6,101\n";
    assert!(matches!(
        parse_csv(negative.as_bytes(), Schema::Long, None),
        Err(Error::NegativeShare { .. })
    ));
    let off_grid = "axis,wave,position,share\nlr,2004,5.5,100\n";
    assert!(matches!(
        parse_csv(off_grid.as_bytes(), Schema::Long, None),
        Err(Error::PositionOffGrid(_))
    ));
    let ambiguous = "axis,wave,position,share\nlr,2004,5,40\n";
    assert!(matches!(
        parse_csv(ambiguous.as_bytes(), Schema::Long, None),
        Err(Error::AmbiguousTotal { .. })
    ));
    let header = "axis,wave,share\nlr,2004,5\n";
    assert!(matches!(
        parse_csv(header.as_bytes(), Schema::Long, None),
        Err(Error::MalformedHeader(_))
    ));
}
