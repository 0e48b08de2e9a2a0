//! Grid-data CSV format: header `x,value` (interval) or `x,y,value`
//! (rectangle), one interior grid point per row in grid layout.

use std::io::{BufRead, Write};

use crate::domain::Coord;
use crate::error::{AmpError, Result};
use crate::real::Real;

/// Write coordinates and values as CSV.
pub fn write_grid_csv<R: Real, W: Write>(
    out: &mut W,
    coords: &[Coord<R>],
    values: &[R],
) -> std::io::Result<()> {
    let two_d = matches!(coords.first(), Some(Coord::XY(..)));
    writeln!(out, "{}", if two_d { "x,y,value" } else { "x,value" })?;
    for (c, v) in coords.iter().zip(values) {
        match c {
            Coord::X(x) => writeln!(out, "{x},{v}")?,
            Coord::XY(x, y) => writeln!(out, "{x},{y},{v}")?,
        }
    }
    Ok(())
}

/// Read the CSV written by [`write_grid_csv`].
pub fn read_grid_csv<R: Real, B: BufRead>(input: B) -> Result<(Vec<Coord<R>>, Vec<R>)> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| AmpError::InvalidParam("empty grid CSV".into()))?
        .map_err(|e| AmpError::InvalidParam(format!("cannot read grid CSV: {e}")))?;
    let columns = match header.trim() {
        "x,value" => 2,
        "x,y,value" => 3,
        other => {
            return Err(AmpError::InvalidParam(format!(
                "unexpected grid CSV header {other:?}"
            )))
        }
    };
    let mut coords = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line =
            line.map_err(|e| AmpError::InvalidParam(format!("cannot read grid CSV: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| AmpError::InvalidParam(format!("row {}: {e}", lineno + 2)))
            })
            .collect::<Result<_>>()?;
        if fields.len() != columns {
            return Err(AmpError::InvalidParam(format!(
                "row {}: expected {columns} columns, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        match columns {
            2 => {
                coords.push(Coord::X(R::of(fields[0])));
                values.push(R::of(fields[1]));
            }
            _ => {
                coords.push(Coord::XY(R::of(fields[0]), R::of(fields[1])));
                values.push(R::of(fields[2]));
            }
        }
    }
    Ok((coords, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Domain, Grid};

    #[test]
    fn grid_csv_round_trip() {
        let g = Grid::new(Domain::unit_interval(), 4).unwrap();
        let coords = g.coords();
        let values: Vec<f64> = coords.iter().map(|c| c.x() * 2.0).collect();
        let mut buf = Vec::new();
        write_grid_csv(&mut buf, &coords, &values).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x,value\n"));
        let (c2, v2) = read_grid_csv::<f64, _>(buf.as_slice()).unwrap();
        assert_eq!(c2, coords);
        assert_eq!(v2, values);
    }

    #[test]
    fn grid_csv_round_trip_2d() {
        let g = Grid::new(Domain::rectangle(1.0, 2.0).unwrap(), 3).unwrap();
        let coords = g.coords();
        let values: Vec<f64> = coords.iter().map(|c| c.x() + c.y().unwrap()).collect();
        let mut buf = Vec::new();
        write_grid_csv(&mut buf, &coords, &values).unwrap();
        let (c2, v2) = read_grid_csv::<f64, _>(buf.as_slice()).unwrap();
        assert_eq!(c2, coords);
        assert_eq!(v2, values);
    }

    #[test]
    fn grid_csv_rejects_bad_header_and_rows() {
        assert!(read_grid_csv::<f64, _>("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_grid_csv::<f64, _>("x,value\n1,2,3\n".as_bytes()).is_err());
        assert!(read_grid_csv::<f64, _>("x,value\n1,oops\n".as_bytes()).is_err());
    }
}
