use std::fs::File;
use std::path::Path;

use crate::error::{Error, Result};
use crate::inequalities::{bootstrap_verify, gronwall_verify, BootstrapReport, GronwallReport};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERDICT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// `Ok(true)` → 0, `Ok(false)` → 1, any error → 2.
pub fn exit_code<E>(outcome: &std::result::Result<bool, E>) -> i32 {
    match outcome {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_VERDICT_FAILURE,
        Err(_) => EXIT_USAGE,
    }
}

/// Reads the named columns of a headed CSV file as `f64`.
pub fn read_columns(path: &Path, names: &[&str]) -> Result<Vec<Vec<f64>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers = rdr.headers()?.clone();
    let idx: Vec<usize> = names
        .iter()
        .map(|n| {
            headers
                .iter()
                .position(|h| h == *n)
                .ok_or_else(|| Error::Config(format!("{} has no column {n:?}", path.display())))
        })
        .collect::<Result<_>>()?;
    let mut cols = vec![Vec::new(); names.len()];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for (c, &i) in idx.iter().enumerate() {
            let cell = rec.get(i).unwrap_or("");
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: row + 2,
                column: i + 1,
                message: format!("not a number: {cell:?}"),
            })?;
            cols[c].push(v);
        }
    }
    Ok(cols)
}

/// Grönwall check on a CSV with columns `t,f,g,h`.
pub fn check_gronwall_csv(path: &Path, c: f64, beta: f64) -> Result<GronwallReport> {
    let cols = read_columns(path, &["t", "f", "g", "h"])?;
    gronwall_verify(&cols[0], &cols[1], &cols[2], &cols[3], c, beta)
}

/// Bootstrap check on a CSV with columns `t,X`.
pub fn check_bootstrap_csv(path: &Path, a: f64, b: f64, theta: f64) -> Result<BootstrapReport> {
    let cols = read_columns(path, &["t", "X"])?;
    if cols[0].windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("bootstrap samples must have increasing t".into()));
    }
    bootstrap_verify(&cols[1], a, b, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn columns_by_name_and_bad_cells() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "X, t\n1.0, 0\n1.1, 0.5").unwrap();
        let cols = read_columns(f.path(), &["t", "X"]).unwrap();
        assert_eq!(cols, vec![vec![0.0, 0.5], vec![1.0, 1.1]]);
        let r = check_bootstrap_csv(f.path(), 1.0, 0.2, 2.0).unwrap();
        assert!(r.smallness_ok && r.conclusion_ok);
        let mut g = tempfile::NamedTempFile::new().unwrap();
        writeln!(g, "t,X\n0,abc").unwrap();
        assert!(matches!(read_columns(g.path(), &["t", "X"]), Err(Error::Parse { line: 2, .. })));
        assert!(read_columns(g.path(), &["t", "Y"]).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code::<()>(&Ok(true)), 0);
        assert_eq!(exit_code::<()>(&Ok(false)), 1);
        assert_eq!(exit_code(&Err(())), 2);
    }
}
