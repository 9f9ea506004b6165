//! CSV ingestion: tabular data with a header row, one output column, and
//! empirical (or declared) input marginals.

use crate::config::MarginalDecl;
use crate::error::{CliError, Result};
use icegsa_core::{InputSpace, Marginal};
use ndarray::{Array1, Array2};
use std::path::Path;

/// Parsed dataset plus the inferred input space.
pub struct Dataset {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub space: InputSpace,
    pub input_names: Vec<String>,
    /// Declared-marginal violations: values observed outside a declared
    /// support, reported as warnings rather than errors.
    pub warnings: Vec<String>,
}

pub fn load_csv(
    path: &Path,
    output_column: &str,
    input_columns: Option<&[String]>,
    declared: &[(String, MarginalDecl)],
) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Ingestion(format!("cannot open {}: {e}", path.display())))?;

    let headers: Vec<String> =
        reader.headers().map_err(|e| CliError::Ingestion(e.to_string()))?.iter()
            .map(|h| h.to_string())
            .collect();
    for (i, h) in headers.iter().enumerate() {
        if headers[..i].contains(h) {
            return Err(CliError::Ingestion(format!("duplicate header '{h}'")));
        }
    }
    let out_idx = headers
        .iter()
        .position(|h| h == output_column)
        .ok_or_else(|| {
            CliError::Ingestion(format!("missing output column '{output_column}'"))
        })?;

    let input_idx: Vec<usize> = match input_columns {
        Some(cols) => cols
            .iter()
            .map(|c| {
                headers.iter().position(|h| h == c).ok_or_else(|| {
                    CliError::Ingestion(format!("missing input column '{c}'"))
                })
            })
            .collect::<Result<_>>()?,
        None => (0..headers.len()).filter(|i| *i != out_idx).collect(),
    };
    if input_idx.contains(&out_idx) {
        return Err(CliError::Ingestion(format!(
            "output column '{output_column}' also listed as an input"
        )));
    }
    if input_idx.is_empty() {
        return Err(CliError::Ingestion("no input columns".into()));
    }
    let input_names: Vec<String> = input_idx.iter().map(|i| headers[*i].clone()).collect();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut y = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Ingestion(e.to_string()))?;
        let parse = |col: usize| -> Result<f64> {
            let cell = record.get(col).unwrap_or("");
            if cell.is_empty() {
                return Err(CliError::Ingestion(format!(
                    "empty cell at row {}, column '{}'",
                    r + 2,
                    headers[col]
                )));
            }
            cell.parse::<f64>().map_err(|_| {
                CliError::Ingestion(format!(
                    "non-numeric cell '{cell}' at row {}, column '{}'",
                    r + 2,
                    headers[col]
                ))
            })
        };
        let mut row = Vec::with_capacity(input_idx.len());
        for &c in &input_idx {
            row.push(parse(c)?);
        }
        y.push(parse(out_idx)?);
        rows.push(row);
    }

    let m = input_idx.len();
    let n = rows.len();
    if n < m + 2 {
        return Err(CliError::Ingestion(format!(
            "need at least m + 2 = {} rows, got {n}",
            m + 2
        )));
    }

    let mut x = Array2::zeros((n, m));
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            x[[i, j]] = *v;
        }
    }

    // Build marginals: declared when present, otherwise empirical from the
    // observed column.
    let mut warnings = Vec::new();
    let mut marginals = Vec::with_capacity(m);
    for (j, name) in input_names.iter().enumerate() {
        let col: Vec<f64> = x.column(j).to_vec();
        let decl = declared.iter().find(|(n, _)| n == name).map(|(_, d)| d);
        let marg = match decl {
            Some(MarginalDecl::Uniform { lo, hi }) => {
                let viol: Vec<usize> = col
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v < *lo || **v > *hi)
                    .map(|(i, _)| i + 2)
                    .collect();
                if !viol.is_empty() {
                    warnings.push(format!(
                        "column '{name}': {} values outside declared uniform({lo}, {hi}) \
                         support (rows {:?}{})",
                        viol.len(),
                        &viol[..viol.len().min(5)],
                        if viol.len() > 5 { ", ..." } else { "" }
                    ));
                }
                Marginal::uniform(name.clone(), *lo, *hi)
                    .map_err(|e| CliError::Ingestion(e.to_string()))?
            }
            Some(MarginalDecl::Gaussian { mean, std }) => {
                Marginal::gaussian(name.clone(), *mean, *std)
                    .map_err(|e| CliError::Ingestion(e.to_string()))?
            }
            Some(MarginalDecl::Empirical) | None => Marginal::empirical(name.clone(), col)
                .map_err(|e| CliError::Ingestion(e.to_string()))?,
        };
        marginals.push(marg);
    }
    for (name, _) in declared {
        if !input_names.contains(name) {
            return Err(CliError::Ingestion(format!(
                "declared marginal for unknown column '{name}'"
            )));
        }
    }

    let space = InputSpace::new(marginals).map_err(|e| CliError::Ingestion(e.to_string()))?;
    Ok(Dataset { x, y: Array1::from_vec(y), space, input_names, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn three_column_file() {
        let f = write_temp(
            "x1,x2,y\n0.1,0.5,1.0\n0.2,0.1,2.0\n0.9,0.8,3.0\n0.4,0.3,4.0\n0.6,0.2,5.0\n",
        );
        let ds = load_csv(f.path(), "y", None, &[]).unwrap();
        assert_eq!(ds.x.nrows(), 5);
        assert_eq!(ds.x.ncols(), 2);
        assert_eq!(ds.space.dim(), 2);
        assert_eq!(ds.input_names, vec!["x1", "x2"]);
        assert!(ds.warnings.is_empty());
    }

    #[test]
    fn blank_cell_names_row_and_column() {
        let f = write_temp("x1,x2,y\n0.1,,1.0\n0.2,0.1,2.0\n0.3,0.3,3.0\n0.4,0.4,4.0\n");
        let err = load_csv(f.path(), "y", None, &[]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 2") && msg.contains("x2"), "{msg}");
    }

    #[test]
    fn non_numeric_cell_reported() {
        let f = write_temp("x1,y\n0.1,1.0\nabc,2.0\n0.3,3.0\n0.4,4.0\n");
        let err = load_csv(f.path(), "y", None, &[]).unwrap_err();
        assert!(err.to_string().contains("'abc'"));
        assert!(matches!(err, CliError::Ingestion(_)));
    }

    #[test]
    fn duplicate_header_rejected() {
        let f = write_temp("x1,x1,y\n1,2,3\n4,5,6\n7,8,9\n1,2,3\n");
        let err = load_csv(f.path(), "y", None, &[]).unwrap_err();
        assert!(err.to_string().contains("duplicate header"));
    }

    #[test]
    fn missing_output_column() {
        let f = write_temp("x1,x2\n1,2\n3,4\n5,6\n7,8\n");
        let err = load_csv(f.path(), "y", None, &[]).unwrap_err();
        assert!(err.to_string().contains("missing output column"));
    }

    #[test]
    fn too_few_rows() {
        let f = write_temp("x1,x2,y\n1,2,3\n4,5,6\n");
        let err = load_csv(f.path(), "y", None, &[]).unwrap_err();
        assert!(err.to_string().contains("at least"));
    }

    #[test]
    fn declared_support_violation_warns() {
        let f = write_temp("x1,y\n0.1,1.0\n1.2,2.0\n0.3,3.0\n0.4,4.0\n");
        let ds = load_csv(
            f.path(),
            "y",
            None,
            &[("x1".to_string(), MarginalDecl::Uniform { lo: 0.0, hi: 1.0 })],
        )
        .unwrap();
        assert_eq!(ds.warnings.len(), 1);
        assert!(ds.warnings[0].contains("x1"));
    }

    #[test]
    fn explicit_input_selection() {
        let f = write_temp("a,b,c,y\n1,2,9,3\n4,5,9,6\n7,8,9,9\n2,3,9,4\n5,6,9,7\n");
        let ds = load_csv(f.path(), "y", Some(&["a".into(), "b".into()]), &[]).unwrap();
        assert_eq!(ds.input_names, vec!["a", "b"]);
        assert_eq!(ds.x.ncols(), 2);
    }
}
