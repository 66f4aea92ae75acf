//! CSV datasets: a header row, numeric feature columns, and integer labels in a
//! `label` column or several `label_*` columns (multilabel).

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use al_core::{FeatureMatrix, Targets};
use ndarray::Array2;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub label_names: Vec<String>,
    pub x: FeatureMatrix,
    pub y: Targets,
}

impl Dataset {
    pub fn rows(&self) -> usize {
        self.x.rows()
    }

    pub fn is_multilabel(&self) -> bool {
        matches!(self.y, Targets::Multilabel(_))
    }
}

fn is_label_column(name: &str) -> bool {
    name == "label" || name.starts_with("label_")
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_csv(file).map_err(|e| match e {
        BenchError::Data(msg) => BenchError::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_csv(reader: impl Read) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| BenchError::Data(format!("unreadable header: {e}")))?
        .clone();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(BenchError::Data("empty file".into()));
    }

    let label_cols: Vec<usize> = (0..headers.len()).filter(|&i| is_label_column(&headers[i])).collect();
    let feature_cols: Vec<usize> = (0..headers.len()).filter(|&i| !is_label_column(&headers[i])).collect();
    let plain = label_cols.iter().filter(|&&i| &headers[i] == "label").count();
    if label_cols.is_empty() {
        return Err(BenchError::Data("no `label` or `label_*` column in header".into()));
    }
    if plain > 0 && label_cols.len() > 1 {
        return Err(BenchError::Data("mix of `label` and `label_*` columns".into()));
    }
    let multilabel = label_cols.len() > 1;

    let mut features = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    let mut rows = 0;
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            BenchError::Data(format!("line {line}: malformed row: {e}"))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        for &c in &feature_cols {
            let v: f64 = record[c].parse().map_err(|_| {
                BenchError::Data(format!(
                    "line {line}: non-numeric value {:?} in feature column `{}`",
                    &record[c], &headers[c]
                ))
            })?;
            if !v.is_finite() {
                return Err(BenchError::Data(format!("line {line}: non-finite feature `{}`", &headers[c])));
            }
            features.push(v);
        }
        for &c in &label_cols {
            let v: usize = record[c].parse().map_err(|_| {
                BenchError::Data(format!(
                    "line {line}: label {:?} in `{}` is not a non-negative integer",
                    &record[c], &headers[c]
                ))
            })?;
            if multilabel && v > 1 {
                return Err(BenchError::Data(format!("line {line}: multilabel entry must be 0 or 1")));
            }
            labels.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(BenchError::Data("no data rows".into()));
    }

    let x = FeatureMatrix::new(
        Array2::from_shape_vec((rows, feature_cols.len()), features).expect("row-major feature buffer"),
    )?;
    let y = if multilabel {
        let m = labels.iter().map(|&v| v as u8).collect();
        Targets::Multilabel(Array2::from_shape_vec((rows, label_cols.len()), m).expect("row-major label buffer"))
    } else {
        Targets::Classes(labels)
    };
    Ok(Dataset {
        feature_names: feature_cols.iter().map(|&i| headers[i].to_string()).collect(),
        label_names: label_cols.iter().map(|&i| headers[i].to_string()).collect(),
        x,
        y,
    })
}

pub fn write_csv(dataset: &Dataset, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let data_err = |e: csv::Error| BenchError::Data(format!("write failed: {e}"));
    let header: Vec<&str> = dataset
        .feature_names
        .iter()
        .chain(&dataset.label_names)
        .map(String::as_str)
        .collect();
    w.write_record(&header).map_err(data_err)?;
    for i in 0..dataset.rows() {
        let mut rec: Vec<String> = dataset.x.row(i).iter().map(|v| v.to_string()).collect();
        match &dataset.y {
            Targets::Classes(c) => rec.push(c[i].to_string()),
            Targets::Multilabel(m) => rec.extend(m.row(i).iter().map(|v| v.to_string())),
            Targets::Continuous(_) => {
                return Err(BenchError::Usage("continuous targets cannot be written as labels".into()))
            }
        }
        w.write_record(&rec).map_err(data_err)?;
    }
    w.flush().map_err(|source| BenchError::Io {
        path: "<output>".into(),
        source,
    })
}

pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })?;
    write_csv(dataset, file)
}
