//! CSV ingestion and weighted sampling.

use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub rows: Vec<Vec<f64>>,
    pub weights: Option<Vec<f64>>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    /// Unweighted dataset over the given vectors, with generated feature names.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let dim = rows.first().map_or(0, Vec::len);
        Dataset { rows, weights: None, feature_names: (0..dim).map(|d| format!("x{d}")).collect() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn select(&self, idx: &[usize]) -> Dataset {
        Dataset {
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            weights: self.weights.as_ref().map(|w| idx.iter().map(|&i| w[i]).collect()),
            feature_names: self.feature_names.clone(),
        }
    }
}

pub fn load_csv(path: &Path, features: Option<&[String]>, weight: Option<&str>) -> Result<Dataset> {
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_csv(file, features, weight).with_context(|| format!("reading {}", path.display()))
}

/// Parses a headed CSV. Selected columns (all but the weight column when
/// `features` is `None`) must be numeric or take exactly two distinct values,
/// which are encoded 0/1 in sorted order. Features are z-scored; a constant
/// feature becomes all zeros.
pub fn read_csv<R: Read>(input: R, features: Option<&[String]>, weight: Option<&str>) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let column = |name: &str| -> Result<usize> {
        header.iter().position(|h| h == name).with_context(|| format!("missing column {name:?}"))
    };
    let weight_col = weight.map(column).transpose()?;
    let feature_cols: Vec<usize> = match features {
        Some(names) => names.iter().map(|n| column(n)).collect::<Result<_>>()?,
        None => (0..header.len()).filter(|&c| Some(c) != weight_col).collect(),
    };
    let records: Vec<csv::StringRecord> = reader.records().collect::<std::result::Result<_, _>>()?;

    let mut columns = Vec::with_capacity(feature_cols.len());
    for &c in &feature_cols {
        columns.push(encode_column(&records, c, &header[c])?);
    }
    for col in &mut columns {
        standardize(col);
    }
    let rows = (0..records.len()).map(|r| columns.iter().map(|col| col[r]).collect()).collect();

    let weights = match weight_col {
        None => None,
        Some(c) => {
            let mut w = Vec::with_capacity(records.len());
            for (r, rec) in records.iter().enumerate() {
                let v = numeric(rec, r, c, &header[c])?;
                if v < 0.0 {
                    bail!("row {}, column {:?}: negative weight {v}", r + 1, header[c]);
                }
                w.push(v);
            }
            if !records.is_empty() && w.iter().sum::<f64>() <= 0.0 {
                bail!("weights in column {:?} sum to zero", header[c]);
            }
            Some(w)
        }
    };
    Ok(Dataset { rows, weights, feature_names: feature_cols.iter().map(|&c| header[c].clone()).collect() })
}

fn numeric(rec: &csv::StringRecord, r: usize, c: usize, name: &str) -> Result<f64> {
    let cell = rec.get(c).unwrap_or("");
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => bail!("row {}, column {name:?}: non-numeric value {cell:?}", r + 1),
    }
}

fn encode_column(records: &[csv::StringRecord], c: usize, name: &str) -> Result<Vec<f64>> {
    let cells: Vec<&str> = records.iter().map(|rec| rec.get(c).unwrap_or("")).collect();
    if cells.iter().all(|s| s.parse::<f64>().is_ok_and(f64::is_finite)) {
        return Ok(cells.iter().map(|s| s.parse().expect("checked")).collect());
    }
    let mut distinct: Vec<&str> = cells.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() == 2 {
        return Ok(cells.iter().map(|&s| if s == distinct[0] { 0.0 } else { 1.0 }).collect());
    }
    let r = cells.iter().position(|s| s.parse::<f64>().is_err()).unwrap_or(0);
    bail!("row {}, column {name:?}: non-numeric value {:?}", r + 1, cells[r])
}

fn standardize(col: &mut [f64]) {
    let n = col.len() as f64;
    let mean = col.iter().sum::<f64>() / n;
    let sd = (col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    for x in col.iter_mut() {
        *x = if sd > 0.0 { (*x - mean) / sd } else { 0.0 };
    }
}

/// Indices of `m` distinct rows drawn one at a time with probability
/// proportional to weight among the rows not yet drawn, in ascending order.
/// Zero-weight rows are only drawn once every positive weight is used up.
pub fn weighted_sample_indices(ds: &Dataset, m: usize, seed: u64) -> Result<Vec<usize>> {
    let n = ds.len();
    if m > n {
        bail!("cannot sample {m} rows from a dataset of {n}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = ds.weights.clone().unwrap_or_else(|| vec![1.0; n]);
    let mut taken = vec![false; n];
    let mut picked = Vec::with_capacity(m);
    for _ in 0..m {
        let total: f64 = weights.iter().sum();
        let i = if total > 0.0 {
            let mut u = rng.gen_range(0.0..total);
            let mut chosen = None;
            for (i, &w) in weights.iter().enumerate() {
                if w > 0.0 {
                    chosen = Some(i);
                    if u < w {
                        break;
                    }
                    u -= w;
                }
            }
            chosen.expect("a positive weight remains")
        } else {
            let rest: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();
            rest[rng.gen_range(0..rest.len())]
        };
        taken[i] = true;
        weights[i] = 0.0;
        picked.push(i);
    }
    picked.sort_unstable();
    Ok(picked)
}

pub fn weighted_sample(ds: &Dataset, m: usize, seed: u64) -> Result<Dataset> {
    Ok(ds.select(&weighted_sample_indices(ds, m, seed)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, weight: Option<&str>) -> Result<Dataset> {
        read_csv(text.as_bytes(), None, weight)
    }

    #[test]
    fn three_rows_two_columns() {
        let ds = parse("a,b\n1,2\n2,4\n3,6\n", None).unwrap();
        assert_eq!(ds.rows.len(), 3);
        assert!(ds.rows.iter().all(|r| r.len() == 2));
        assert_eq!(ds.feature_names, ["a", "b"]);
        let a: Vec<f64> = ds.rows.iter().map(|r| r[0]).collect();
        assert!((a.iter().sum::<f64>()).abs() < 1e-12);
        assert!((a.iter().map(|x| x * x).sum::<f64>() / 3.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_column_becomes_zero() {
        let ds = parse("a,b\n5,1\n5,2\n", None).unwrap();
        assert_eq!(ds.rows[0][0], 0.0);
        assert_eq!(ds.rows[1][0], 0.0);
    }

    #[test]
    fn weight_column_is_extracted() {
        let ds = parse("a,w\n1,10\n3,30\n", Some("w")).unwrap();
        assert_eq!(ds.weights, Some(vec![10.0, 30.0]));
        assert_eq!(ds.feature_names, ["a"]);
        assert_eq!(ds.rows, vec![vec![-1.0], vec![1.0]]);
    }

    #[test]
    fn binary_categories_are_encoded() {
        let ds = parse("sex,a\nMale,1\nFemale,1\nMale,1\n", None).unwrap();
        let sex: Vec<f64> = ds.rows.iter().map(|r| r[0]).collect();
        assert!(sex[0] > 0.0 && sex[1] < 0.0 && sex[0] == sex[2]);
    }

    #[test]
    fn errors_name_row_and_column() {
        let err = parse("a,b\n1,2\n3,x\n4,y\n5,z\n", None).unwrap_err().to_string();
        assert!(err.contains("row 2") && err.contains("\"b\""), "{err}");
        let err = read_csv("a\n1\n".as_bytes(), Some(&["c".to_string()]), None).unwrap_err().to_string();
        assert!(err.contains("missing column"), "{err}");
        assert!(parse("a,w\n1,0\n2,0\n", Some("w")).is_err());
    }

    #[test]
    fn sampling() {
        let ds = Dataset { weights: Some(vec![1.0, 0.0, 0.0, 0.0]), ..Dataset::from_rows(vec![vec![0.0]; 4]) };
        assert_eq!(weighted_sample_indices(&ds, 1, 7).unwrap(), vec![0]);
        assert_eq!(weighted_sample_indices(&ds, 4, 7).unwrap(), vec![0, 1, 2, 3]);
        let ds = Dataset::from_rows((0..30).map(|i| vec![i as f64]).collect());
        let a = weighted_sample(&ds, 10, 3).unwrap();
        assert_eq!(a, weighted_sample(&ds, 10, 3).unwrap());
        assert_ne!(a, weighted_sample(&ds, 10, 4).unwrap());
        assert!(weighted_sample(&ds, 31, 3).is_err());
    }
}
