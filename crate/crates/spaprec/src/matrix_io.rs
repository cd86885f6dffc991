//! Plain CSV matrices: one row per line, comma separated, no header.
//!
//! Values are written with 17 significant digits, so reading a written
//! matrix back reproduces it bit for bit.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{CliError, Result};

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_matrix(file, path)
}

/// Parses CSV text; `origin` is only used in diagnostics.
pub fn parse_matrix<R: Read>(input: R, origin: &Path) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut data = Vec::new();
    let mut ncols = None;
    let mut nrows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(e, origin))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match ncols {
            None => ncols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(CliError::Parse {
                    path: origin.to_path_buf(),
                    line,
                    column: record.len().min(c) + 1,
                    msg: format!("expected {c} fields, found {}", record.len()),
                })
            }
            _ => {}
        }
        for (j, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| CliError::Parse {
                path: origin.to_path_buf(),
                line,
                column: j + 1,
                msg: format!("not a number: {field:?}"),
            })?;
            data.push(v);
        }
        nrows += 1;
    }
    let ncols = ncols.ok_or_else(|| CliError::Parse {
        path: origin.to_path_buf(),
        line: 1,
        column: 1,
        msg: "empty matrix".into(),
    })?;
    Ok(DMatrix::from_row_slice(nrows, ncols, &data))
}

fn csv_error(e: csv::Error, origin: &Path) -> CliError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(origin, io),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => CliError::Parse {
            path: origin.to_path_buf(),
            line,
            column: (len.min(expected_len) + 1) as usize,
            msg: format!("expected {expected_len} fields, found {len}"),
        },
        other => CliError::Parse {
            path: origin.to_path_buf(),
            line,
            column: 1,
            msg: format!("{other:?}"),
        },
    }
}

pub fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    format_matrix(&mut out, m).map_err(|e| CliError::io(path, e))?;
    out.flush().map_err(|e| CliError::io(path, e))
}

pub fn format_matrix<W: Write>(out: &mut W, m: &DMatrix<f64>) -> std::io::Result<()> {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.16e}", m[(i, j)])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<DMatrix<f64>> {
        parse_matrix(s.as_bytes(), Path::new("mem.csv"))
    }

    #[test]
    fn parses_rows() {
        let m = parse("1, 2,3\n4,5,6e-1\n").unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 0.6]));
    }

    #[test]
    fn reports_bad_field_position() {
        match parse("1,2\n3,x\n") {
            Err(CliError::Parse { line, column, .. }) => assert_eq!((line, column), (2, 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reports_ragged_rows() {
        match parse("1,2\n3\n") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(parse("").is_err());
    }

    #[test]
    fn text_round_trip_is_exact() {
        let m = DMatrix::from_row_slice(2, 2, &[0.1, 1.0 / 3.0, -2.5e-300, 12345.678901234567]);
        let mut buf = Vec::new();
        format_matrix(&mut buf, &m).unwrap();
        assert_eq!(parse(std::str::from_utf8(&buf).unwrap()).unwrap(), m);
    }
}
