//! Plain-text matrix interchange.
//!
//! The first line holds `rows cols`; the entries follow in row-major order as
//! whitespace-separated `re im` pairs. Line breaks after the header are not
//! significant. The writer puts one matrix row per line.

use std::fmt::Write as _;

use super::{ComplexMatrix, Ket, C64};
use crate::error::{Error, Result};

pub fn write_matrix(m: &ComplexMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|j| format!("{} {}", m[(i, j)].re + 0.0, m[(i, j)].im + 0.0))
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty input".into(),
    })?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(Error::Parse {
            line: header_line + 1,
            message: format!("expected \"rows cols\", got {header:?}"),
        });
    }
    let parse_dim = |s: &str| {
        s.parse::<usize>().map_err(|e| Error::Parse {
            line: header_line + 1,
            message: format!("bad dimension {s:?}: {e}"),
        })
    };
    let rows = parse_dim(dims[0])?;
    let cols = parse_dim(dims[1])?;

    let mut values = Vec::with_capacity(2 * rows * cols);
    for (n, line) in lines {
        for tok in line.split_whitespace() {
            let v = tok.parse::<f64>().map_err(|e| Error::Parse {
                line: n + 1,
                message: format!("bad number {tok:?}: {e}"),
            })?;
            values.push(v);
        }
    }
    if values.len() != 2 * rows * cols {
        return Err(Error::Parse {
            line: 0,
            message: format!(
                "{rows}x{cols} matrix needs {} numbers, found {}",
                2 * rows * cols,
                values.len()
            ),
        });
    }
    let entries = values.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
    ComplexMatrix::from_rows(rows, cols, entries)
}

/// Writes kets as the rows of a matrix.
pub fn write_kets(kets: &[Ket]) -> String {
    let cols = kets.first().map_or(0, Ket::dim);
    let entries = kets.iter().flat_map(|k| k.amplitudes().iter().copied()).collect();
    write_matrix(&ComplexMatrix::from_rows(kets.len(), cols, entries).expect("kets of equal dimension"))
}

/// Reads kets stored as matrix rows.
pub fn parse_kets(text: &str) -> Result<Vec<Ket>> {
    let m = parse_matrix(text)?;
    Ok((0..m.rows()).map(|i| m.row(i)).collect())
}
