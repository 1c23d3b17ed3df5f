//! Plain-text persistence: matrices and vectors as CSV, QUBOs as dense CSV plus JSON
//! metadata or as a sparse `i j value` listing.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so reading a file
//! back yields the same bits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sparse_qubo::{Matrix, QuboProblem};

use crate::error::{HarnessError, Result};

/// Row-major CSV, one matrix row per line, no header.
pub fn matrix_to_csv(m: &Matrix) -> String {
    let mut s = String::new();
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|v| v.to_string()).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

/// One value per line.
pub fn vector_to_csv(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}\n")).collect()
}

pub fn parse_matrix_csv(text: &str, path: &Path) -> Result<Matrix> {
    let parse_err = |message: String| HarnessError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| HarnessError::csv(path, e))?;
        let row = record
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| parse_err(format!("line {}: {f:?}: {e}", line + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Matrix::from_rows(&rows).map_err(|e| parse_err(e.to_string()))
}

/// Accepts one value per line or a single row.
pub fn parse_vector_csv(text: &str, path: &Path) -> Result<Vec<f64>> {
    let m = parse_matrix_csv(text, path)?;
    if m.rows() > 1 && m.cols() > 1 {
        return Err(HarnessError::Parse {
            path: path.to_path_buf(),
            message: format!(
                "expected a vector, found a {}x{} matrix",
                m.rows(),
                m.cols()
            ),
        });
    }
    Ok(m.as_slice().to_vec())
}

pub fn write_matrix_csv(path: &Path, m: &Matrix) -> Result<()> {
    write_file(path, matrix_to_csv(m))
}

pub fn write_vector_csv(path: &Path, v: &[f64]) -> Result<()> {
    write_file(path, vector_to_csv(v))
}

pub fn read_matrix_csv(path: &Path) -> Result<Matrix> {
    parse_matrix_csv(&read_file(path)?, path)
}

pub fn read_vector_csv(path: &Path) -> Result<Vec<f64>> {
    parse_vector_csv(&read_file(path)?, path)
}

/// Sidecar for a dense QUBO CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboMetadata {
    pub h: f64,
    pub n_spins: usize,
    pub n_ancilla: usize,
}

impl QuboMetadata {
    pub fn of(problem: &QuboProblem) -> Self {
        QuboMetadata {
            h: problem.offset(),
            n_spins: problem.dim(),
            n_ancilla: problem.n_ancilla(),
        }
    }
}

/// Writes `<stem>.csv` (symmetric `W`) and `<stem>.json` (metadata) into `dir`.
pub fn write_qubo_dense(dir: &Path, stem: &str, problem: &QuboProblem) -> Result<()> {
    write_file(
        &dir.join(format!("{stem}.csv")),
        matrix_to_csv(problem.matrix()),
    )?;
    let meta =
        serde_json::to_string_pretty(&QuboMetadata::of(problem)).expect("metadata serializes");
    write_file(&dir.join(format!("{stem}.json")), meta + "\n")
}

/// A QUBO in upper-triangular coordinate form: energy `Σ c q_i q_j + offset` over the
/// entries, `i ≤ j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CooQubo {
    pub n_spins: usize,
    pub n_ancilla: usize,
    pub offset: f64,
    pub entries: Vec<(usize, usize, f64)>,
}

impl CooQubo {
    pub fn of(problem: &QuboProblem) -> Self {
        CooQubo {
            n_spins: problem.dim(),
            n_ancilla: problem.n_ancilla(),
            offset: problem.offset(),
            entries: problem.upper_triangular(),
        }
    }

    /// Symmetric matrix with off-diagonal coefficients split in half.
    pub fn to_matrix(&self) -> Matrix {
        let mut w = Matrix::zeros(self.n_spins, self.n_spins);
        for &(i, j, c) in &self.entries {
            if i == j {
                w[(i, i)] += c;
            } else {
                w[(i, j)] += c / 2.0;
                w[(j, i)] += c / 2.0;
            }
        }
        w
    }

    pub fn energy(&self, q: &[u8]) -> f64 {
        self.entries
            .iter()
            .filter(|&&(i, j, _)| q[i] != 0 && q[j] != 0)
            .map(|&(_, _, c)| c)
            .sum::<f64>()
            + self.offset
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# n_spins {}", self.n_spins);
        let _ = writeln!(s, "# n_ancilla {}", self.n_ancilla);
        let _ = writeln!(s, "# offset {}", self.offset);
        for (i, j, c) in &self.entries {
            let _ = writeln!(s, "{i} {j} {c}");
        }
        s
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, message: String| HarnessError::Parse {
            path: path.to_path_buf(),
            message: format!("line {line}: {message}"),
        };
        let (mut n_spins, mut n_ancilla, mut offset) = (None, 0usize, 0.0f64);
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(header) = line.strip_prefix('#') {
                let mut parts = header.split_whitespace();
                let (Some(key), Some(value)) = (parts.next(), parts.next()) else {
                    continue;
                };
                match key {
                    "n_spins" => {
                        n_spins = Some(
                            value
                                .parse()
                                .map_err(|e| err(line_no, format!("n_spins: {e}")))?,
                        )
                    }
                    "n_ancilla" => {
                        n_ancilla = value
                            .parse()
                            .map_err(|e| err(line_no, format!("n_ancilla: {e}")))?
                    }
                    "offset" => {
                        offset = value
                            .parse()
                            .map_err(|e| err(line_no, format!("offset: {e}")))?
                    }
                    _ => {}
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(err(
                    line_no,
                    format!("expected `i j value`, found {line:?}"),
                ));
            }
            let i: usize = fields[0]
                .parse()
                .map_err(|e| err(line_no, format!("{e}")))?;
            let j: usize = fields[1]
                .parse()
                .map_err(|e| err(line_no, format!("{e}")))?;
            let c: f64 = fields[2]
                .parse()
                .map_err(|e| err(line_no, format!("{e}")))?;
            entries.push((i.min(j), i.max(j), c));
        }
        let max_index = entries.iter().map(|&(_, j, _)| j + 1).max().unwrap_or(0);
        let n_spins = n_spins.unwrap_or(max_index);
        if max_index > n_spins {
            return Err(err(
                0,
                format!("index {} out of range for {n_spins} spins", max_index - 1),
            ));
        }
        if n_ancilla > n_spins {
            return Err(err(
                0,
                format!("{n_ancilla} ancillas exceed {n_spins} spins"),
            ));
        }
        Ok(CooQubo {
            n_spins,
            n_ancilla,
            offset,
            entries,
        })
    }
}

pub fn write_qubo_coo(path: &Path, problem: &QuboProblem) -> Result<()> {
    write_file(path, CooQubo::of(problem).to_text())
}

pub fn read_qubo_coo(path: &Path) -> Result<CooQubo> {
    CooQubo::parse(&read_file(path)?, path)
}

pub(crate) fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use sparse_qubo::{build_l0_qubo, FixedPointFormat};

    #[test]
    fn matrix_round_trip_is_exact() {
        let m = Matrix::from_fn(3, 2, |i, j| (i as f64 + 0.1) / (j as f64 + 3.0) - 1e-17);
        let back = parse_matrix_csv(&matrix_to_csv(&m), Path::new("m.csv")).unwrap();
        assert_eq!(back, m);
        let v = vec![0.1, -2.5e-300, 7.0];
        assert_eq!(
            parse_vector_csv(&vector_to_csv(&v), Path::new("v.csv")).unwrap(),
            v
        );
    }

    #[test]
    fn ragged_csv_is_rejected() {
        assert!(parse_matrix_csv("1,2\n3\n", Path::new("x")).is_err());
        let e = parse_matrix_csv("1,a\n", Path::new("bad.csv")).unwrap_err();
        assert!(e.to_string().contains("bad.csv"));
    }

    #[test]
    fn coo_round_trip_preserves_energy() {
        let format = FixedPointFormat::uniform(2, -3.0, 1.0, 3).unwrap();
        let problem = build_l0_qubo(&format).unwrap();
        let coo = CooQubo::parse(&CooQubo::of(&problem).to_text(), Path::new("q.txt")).unwrap();
        assert_eq!(coo.n_spins, problem.dim());
        assert_eq!(coo.n_ancilla, 2);
        assert_eq!(&coo.to_matrix(), problem.matrix());
        for mask in 0u32..1 << problem.dim() {
            let q: Vec<u8> = (0..problem.dim()).map(|b| (mask >> b & 1) as u8).collect();
            assert_eq!(coo.energy(&q), problem.energy(&q));
        }
    }

    #[test]
    fn coo_rejects_garbage() {
        assert!(CooQubo::parse("0 1\n", Path::new("q")).is_err());
        assert!(CooQubo::parse("# n_spins 2\n0 5 1.0\n", Path::new("q")).is_err());
    }
}
