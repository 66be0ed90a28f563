//! CSV formats shared by the command-line tools and external trainers.
//!
//! Reals are written with Rust's shortest round-trip formatting, so values
//! survive a write/read cycle bit for bit.

use std::collections::HashMap;
use std::io::{Read, Write};

use crate::analysis::CorrelationReport;
use crate::bbob::BbobFeatureRow;
use crate::clustering::Embedding;
use crate::design_space::{DesignSpace, EvaluatedDoe};
use crate::ela::{LandscapeFeatures, FEATURE_NAMES};
use crate::error::{Error, Result};

pub const ACCURACY_COLUMN: &str = "accuracy";
pub const CPU_TIME_COLUMN: &str = "cpu_time";
pub const DATASET_COLUMN: &str = "dataset";

/// Label prefix of rows that come from the BBOB suite.
pub const BBOB_PREFIX: &str = "bbob";

pub fn format_real(v: f64) -> String {
    format!("{v}")
}

fn schema(row: Option<usize>, column: Option<&str>, message: impl Into<String>) -> Error {
    Error::Schema {
        row,
        column: column.map(str::to_string),
        message: message.into(),
    }
}

fn parse_real(cell: &str, row: usize, column: &str) -> Result<f64> {
    let v: f64 = cell
        .trim()
        .parse()
        .map_err(|_| schema(Some(row), Some(column), format!("{cell:?} is not a number")))?;
    if !v.is_finite() {
        return Err(schema(Some(row), Some(column), format!("{cell:?} is not finite")));
    }
    Ok(v)
}

/// Maps header names to positions, rejecting duplicates and unknown columns.
fn header_index(
    header: &csv::StringRecord,
    allowed: &dyn Fn(&str) -> bool,
) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::new();
    for (i, name) in header.iter().enumerate() {
        let name = name.trim();
        if !allowed(name) {
            return Err(schema(None, Some(name), "unexpected column"));
        }
        if index.insert(name.to_string(), i).is_some() {
            return Err(schema(None, Some(name), "duplicate column"));
        }
    }
    Ok(index)
}

fn require(index: &HashMap<String, usize>, name: &str) -> Result<usize> {
    index
        .get(name)
        .copied()
        .ok_or_else(|| schema(None, Some(name), "missing required column"))
}

/// Writes a design with one column per parameter.
pub fn write_design_csv<W: Write>(out: W, space: &DesignSpace, rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(space.names())?;
    for row in rows {
        w.write_record(row.iter().map(|v| format_real(*v)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_design_csv<R: Read>(input: R, space: &DesignSpace) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_reader(input);
    let names = space.names();
    let index = header_index(r.headers()?, &|n| names.contains(&n))?;
    let columns = names.iter().map(|n| require(&index, n)).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = columns
            .iter()
            .zip(&names)
            .map(|(&c, n)| parse_real(&rec[c], i, n))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    space.check_rows(&rows)?;
    Ok(rows)
}

/// Reads evaluated designs: the parameter columns, `accuracy`, and the
/// optional `cpu_time` and `dataset` columns. Rows are grouped by dataset in
/// order of first appearance; without a dataset column every row belongs to
/// `default_dataset`.
pub fn read_evaluated_doe<R: Read>(
    input: R,
    space: &DesignSpace,
    default_dataset: &str,
) -> Result<Vec<EvaluatedDoe>> {
    let mut r = csv::Reader::from_reader(input);
    let names = space.names();
    let allowed = |n: &str| {
        names.contains(&n) || n == ACCURACY_COLUMN || n == CPU_TIME_COLUMN || n == DATASET_COLUMN
    };
    let index = header_index(r.headers()?, &allowed)?;
    let columns = names.iter().map(|n| require(&index, n)).collect::<Result<Vec<_>>>()?;
    let acc_col = require(&index, ACCURACY_COLUMN)?;
    let time_col = index.get(CPU_TIME_COLUMN).copied();
    let dataset_col = index.get(DATASET_COLUMN).copied();

    struct Group {
        name: String,
        x: Vec<Vec<f64>>,
        accuracy: Vec<f64>,
        cpu_time: Vec<f64>,
        first_row: Vec<usize>,
    }
    let mut groups: Vec<Group> = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let x = columns
            .iter()
            .zip(&names)
            .map(|(&c, n)| parse_real(&rec[c], i, n))
            .collect::<Result<Vec<_>>>()?;
        let accuracy = parse_real(&rec[acc_col], i, ACCURACY_COLUMN)?;
        if !(0.0..=1.0).contains(&accuracy) {
            return Err(schema(Some(i), Some(ACCURACY_COLUMN), format!("{accuracy} outside [0, 1]")));
        }
        let time = match time_col {
            Some(c) => {
                let t = parse_real(&rec[c], i, CPU_TIME_COLUMN)?;
                if t < 0.0 {
                    return Err(schema(Some(i), Some(CPU_TIME_COLUMN), format!("{t} is negative")));
                }
                Some(t)
            }
            None => None,
        };
        let name = match dataset_col {
            Some(c) if !rec[c].trim().is_empty() => rec[c].trim().to_string(),
            Some(_) => return Err(schema(Some(i), Some(DATASET_COLUMN), "empty dataset name")),
            None => default_dataset.to_string(),
        };
        let pos = match groups.iter().position(|g| g.name == name) {
            Some(p) => p,
            None => {
                groups.push(Group {
                    name,
                    x: Vec::new(),
                    accuracy: Vec::new(),
                    cpu_time: Vec::new(),
                    first_row: Vec::new(),
                });
                groups.len() - 1
            }
        };
        let g = &mut groups[pos];
        g.x.push(x);
        g.accuracy.push(accuracy);
        g.cpu_time.extend(time);
        g.first_row.push(i);
    }
    if groups.is_empty() {
        return Err(schema(None, None, "no data rows"));
    }
    groups
        .into_iter()
        .map(|g| {
            if let Err(e) = space.check_rows(&g.x) {
                return Err(match e {
                    Error::OutOfBounds { row, column, name, value, lo, hi } => Error::OutOfBounds {
                        row: g.first_row[row],
                        column,
                        name,
                        value,
                        lo,
                        hi,
                    },
                    other => other,
                });
            }
            let times = time_col.map(|_| g.cpu_time);
            EvaluatedDoe::new(g.x, g.accuracy, times, g.name)
        })
        .collect()
}

/// Writes evaluated designs; the cpu_time column appears when every input
/// carries times.
pub fn write_evaluated_doe<W: Write>(
    out: W,
    space: &DesignSpace,
    does: &[EvaluatedDoe],
) -> Result<()> {
    let with_time = !does.is_empty() && does.iter().all(|d| d.cpu_time.is_some());
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = space.names();
    header.push(ACCURACY_COLUMN);
    if with_time {
        header.push(CPU_TIME_COLUMN);
    }
    header.push(DATASET_COLUMN);
    w.write_record(&header)?;
    for doe in does {
        for (i, row) in doe.x.iter().enumerate() {
            let mut rec: Vec<String> = row.iter().map(|v| format_real(*v)).collect();
            rec.push(format_real(doe.accuracy[i]));
            if with_time {
                rec.push(format_real(doe.cpu_time.as_ref().expect("checked")[i]));
            }
            rec.push(doe.dataset.clone());
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Feature vector of one dataset, either the full sample (replicate 0) or a
/// bootstrap replicate (1 and up).
#[derive(Debug, Clone, PartialEq)]
pub struct NasFeatureRow {
    pub dataset: String,
    pub replicate: usize,
    pub features: LandscapeFeatures,
}

pub fn write_nas_features<W: Write>(out: W, rows: &[NasFeatureRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["dataset", "replicate"];
    header.extend(FEATURE_NAMES);
    w.write_record(&header)?;
    for row in rows {
        let mut rec = vec![row.dataset.clone(), row.replicate.to_string()];
        rec.extend(row.features.to_array().iter().map(|v| format_real(*v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_bbob_features<W: Write>(out: W, rows: &[BbobFeatureRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["fid", "instance"];
    header.extend(FEATURE_NAMES);
    w.write_record(&header)?;
    for row in rows {
        let mut rec = vec![row.fid.to_string(), row.instance.to_string()];
        rec.extend(row.features.to_array().iter().map(|v| format_real(*v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per parameter; undefined coefficients are empty cells.
pub fn write_correlations<W: Write>(out: W, report: &CorrelationReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["parameter", ACCURACY_COLUMN, CPU_TIME_COLUMN])?;
    let cell = |v: Option<f64>| v.map(format_real).unwrap_or_default();
    for row in &report.rows {
        w.write_record([row.parameter.clone(), cell(row.accuracy), cell(row.cpu_time)])?;
    }
    w.flush()?;
    Ok(())
}

/// Embedding coordinates as `label,mds_1,..,mds_k,<response_name>`.
pub fn write_embedding<W: Write>(
    out: W,
    labels: &[String],
    embedding: &Embedding,
    response_name: &str,
    response: &[f64],
) -> Result<()> {
    let n = embedding.coordinates.len();
    if labels.len() != n || response.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: labels.len().min(response.len()) });
    }
    let k = embedding.eigenvalues.len();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["label".to_string()];
    header.extend((1..=k).map(|i| format!("mds_{i}")));
    header.push(response_name.to_string());
    w.write_record(&header)?;
    for ((label, coords), y) in labels.iter().zip(&embedding.coordinates).zip(response) {
        let mut rec = vec![label.clone()];
        rec.extend(coords.iter().map(|v| format_real(*v)));
        rec.push(format_real(*y));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Flat cluster assignment as `id,group,cluster`.
pub fn write_cluster_labels<W: Write>(out: W, table: &FeatureTable, clusters: &[usize]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "group", "cluster"])?;
    for (r, c) in table.records.iter().zip(clusters) {
        w.write_record([r.id.as_str(), r.group.as_str(), &c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// One feature vector with the labels used for grouping and display.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    /// `dataset` for NAS rows, `bbob-f<fid>` for BBOB rows.
    pub group: String,
    /// Unique row label.
    pub id: String,
    pub features: LandscapeFeatures,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureTable {
    pub records: Vec<FeatureRecord>,
}

impl FeatureTable {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn extend(&mut self, other: FeatureTable) {
        self.records.extend(other.records);
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.records.iter().map(|r| r.features.to_array().to_vec()).collect()
    }

    pub fn groups(&self) -> Vec<String> {
        self.records.iter().map(|r| r.group.clone()).collect()
    }

    pub fn ids(&self) -> Vec<String> {
        self.records.iter().map(|r| r.id.clone()).collect()
    }

    pub fn from_nas(rows: &[NasFeatureRow]) -> Self {
        FeatureTable {
            records: rows
                .iter()
                .map(|r| FeatureRecord {
                    group: r.dataset.clone(),
                    id: format!("{}-r{}", r.dataset, r.replicate),
                    features: r.features,
                })
                .collect(),
        }
    }

    pub fn from_bbob(rows: &[BbobFeatureRow]) -> Self {
        FeatureTable {
            records: rows
                .iter()
                .map(|r| FeatureRecord {
                    group: format!("{BBOB_PREFIX}-f{}", r.fid),
                    id: r.label(),
                    features: r.features,
                })
                .collect(),
        }
    }
}

/// Reads either feature CSV layout, telling them apart by the two key
/// columns.
pub fn read_feature_table<R: Read>(input: R) -> Result<FeatureTable> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let keys: Vec<&str> = header.iter().take(2).map(str::trim).collect();
    let bbob = match keys.as_slice() {
        ["dataset", "replicate"] => false,
        ["fid", "instance"] => true,
        _ => {
            return Err(schema(
                None,
                header.get(0),
                "feature table must start with dataset,replicate or fid,instance",
            ))
        }
    };
    let names: Vec<&str> = header.iter().skip(2).map(str::trim).collect();
    if names != FEATURE_NAMES {
        let column = names
            .iter()
            .zip(FEATURE_NAMES)
            .find(|(a, b)| *a != b)
            .map(|(a, _)| a.to_string());
        return Err(Error::Schema {
            row: None,
            column,
            message: format!(
                "feature columns must be the {} feature names in order",
                FEATURE_NAMES.len()
            ),
        });
    }
    let mut records = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let mut values = [0.0; 20];
        for (k, name) in FEATURE_NAMES.iter().enumerate() {
            values[k] = parse_real(&rec[k + 2], i, name)?;
        }
        let features = LandscapeFeatures::from_array(values);
        let (group, id) = if bbob {
            let fid: u32 = rec[0]
                .trim()
                .parse()
                .map_err(|_| schema(Some(i), Some("fid"), "not an integer"))?;
            let inst: u32 = rec[1]
                .trim()
                .parse()
                .map_err(|_| schema(Some(i), Some("instance"), "not an integer"))?;
            (format!("{BBOB_PREFIX}-f{fid}"), format!("{BBOB_PREFIX}-f{fid}-i{inst}"))
        } else {
            let dataset = rec[0].trim().to_string();
            if dataset.is_empty() {
                return Err(schema(Some(i), Some("dataset"), "empty dataset name"));
            }
            let rep: usize = rec[1]
                .trim()
                .parse()
                .map_err(|_| schema(Some(i), Some("replicate"), "not an integer"))?;
            (dataset.clone(), format!("{dataset}-r{rep}"))
        };
        records.push(FeatureRecord { group, id, features });
    }
    Ok(FeatureTable { records })
}
