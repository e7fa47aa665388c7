//! CSV ingestion and export of [`Dataset`]s.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::dataset::{Column, ColumnData, Dataset};
use crate::error::{Error, Result};

/// Reads a headed CSV. A column is numeric iff every entry parses as a float;
/// otherwise it is categorical. `response_name`, if given, is split out as
/// the response and must be numeric.
pub fn load_dataset(path: impl AsRef<Path>, response_name: Option<&str>) -> Result<Dataset> {
    load_dataset_with(path, response_name, &[])
}

/// As [`load_dataset`], additionally forcing the named columns categorical.
pub fn load_dataset_with(
    path: impl AsRef<Path>,
    response_name: Option<&str>,
    categorical: &[&str],
) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_dataset(file, response_name, categorical)
}

pub(crate) fn read_dataset(
    reader: impl Read,
    response_name: Option<&str>,
    categorical: &[&str],
) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut cells: Vec<Vec<String>> = vec![Vec::new(); header.len()];
    for record in rdr.records() {
        let record = record.map_err(|e| match e.kind() {
            csv::ErrorKind::UnequalLengths { .. } => {
                Error::InvalidDataset(format!("ragged rows: {e}"))
            }
            _ => Error::Csv(e),
        })?;
        for (j, field) in record.iter().enumerate() {
            cells[j].push(field.to_string());
        }
    }
    for c in categorical {
        if !header.iter().any(|h| h == c) {
            return Err(Error::InvalidDataset(format!("no column named `{c}`")));
        }
    }
    if let Some(r) = response_name {
        if !header.iter().any(|h| h == r) {
            return Err(Error::InvalidDataset(format!(
                "response column `{r}` not found in header"
            )));
        }
    }

    let mut columns = Vec::new();
    let mut response = None;
    for (name, raw) in header.into_iter().zip(cells) {
        if raw.iter().any(String::is_empty) {
            return Err(Error::InvalidDataset(format!("column `{name}` has empty entries")));
        }
        let parsed: Option<Vec<f64>> = raw.iter().map(|s| s.parse::<f64>().ok()).collect();
        if Some(name.as_str()) == response_name {
            response = Some(parsed.ok_or_else(|| {
                Error::InvalidDataset(format!("response column `{name}` is not numeric"))
            })?);
            continue;
        }
        let data = match parsed {
            Some(v) if !categorical.contains(&name.as_str()) => ColumnData::Numeric(v),
            _ => ColumnData::categorical_from_labels(&raw),
        };
        columns.push(Column { name, data });
    }
    Dataset::new(columns, response)
}

/// Writes `data` as CSV with the response (if any) as the last column `y`.
pub fn write_dataset(data: &Dataset, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = data.names().iter().map(|s| s.to_string()).collect();
    if data.response().is_some() {
        header.push(crate::dataset::RESPONSE_NAME.to_string());
    }
    w.write_record(&header)?;
    let mut record = Vec::with_capacity(header.len());
    for i in 0..data.n() {
        record.clear();
        for c in data.columns() {
            record.push(match &c.data {
                ColumnData::Numeric(v) => v[i].to_string(),
                ColumnData::Categorical { levels, codes } => levels[codes[i] as usize].clone(),
            });
        }
        if let Some(y) = data.response() {
            record.push(y[i].to_string());
        }
        w.write_record(&record)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<output>".into(),
        source,
    })?;
    Ok(())
}
