//! CSV import/export and atomic file writes.
//!
//! Floats are written with 17 significant digits so they round-trip exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

/// `x` with 17 significant digits, e.g. `1.2563000000000000e-3`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Reads numeric rows from a header-less CSV. Blank lines and lines whose
/// first field starts with `#` are skipped.
pub fn read_numeric_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        match record.get(0) {
            None => continue,
            Some(first) if first.starts_with('#') => continue,
            Some("") if record.len() == 1 => continue,
            _ => {}
        }
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|e| Error::Parse {
                    path: path.display().to_string(),
                    line,
                    msg: format!("'{field}': {e}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// One value per line.
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let rows = read_numeric_rows(path)?;
    rows.into_iter()
        .enumerate()
        .map(|(i, r)| match r.as_slice() {
            [x] => Ok(*x),
            _ => Err(Error::Parse {
                path: path.display().to_string(),
                line: i + 1,
                msg: format!("expected one value per line, found {}", r.len()),
            }),
        })
        .collect()
}

pub fn vector_to_csv(values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 24);
    for &x in values {
        out.push_str(&fmt_f64(x));
        out.push('\n');
    }
    out
}

/// Row-major dense matrix, comma separated.
pub fn matrix_to_csv(m: &Array2<f64>) -> String {
    let mut out = String::with_capacity(m.len() * 24);
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Writes `contents` to a temporary file next to `path` and renames it into
/// place, so readers never observe a partially written file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, std::f64::consts::PI] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn reads_csv_with_comment_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        fs::write(&p, "# x,y\n1, 2\n\n3,4.5\n").unwrap();
        assert_eq!(read_numeric_rows(&p).unwrap(), vec![vec![1.0, 2.0], vec![3.0, 4.5]]);
        fs::write(&p, "1,2\n3,oops\n").unwrap();
        let err = read_numeric_rows(&p).unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("oops"), "{err}");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, b"first").unwrap();
        write_atomic(&p, b"second").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "second");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
