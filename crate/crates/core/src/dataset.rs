//! In-memory tabular data: named numeric or categorical predictor columns
//! plus an optional numeric response.
//!
//! Categorical cells are stored as level codes into a sorted level table.
//! When a row is handed to a model the code is passed as an `f64`, so every
//! model sees a plain numeric matrix; the subprocess adapter maps codes back
//! to level text.

use std::collections::HashSet;

use ndarray::Array2;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    Categorical { levels: Vec<String>, codes: Vec<u32> },
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Builds a categorical column from raw labels. Levels are sorted so the
    /// coding does not depend on row order.
    pub fn categorical_from_labels<S: AsRef<str>>(labels: &[S]) -> Self {
        let mut levels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        levels.sort();
        levels.dedup();
        let codes = labels
            .iter()
            .map(|s| levels.binary_search_by(|l| l.as_str().cmp(s.as_ref())).unwrap() as u32)
            .collect();
        ColumnData::Categorical { levels, codes }
    }

    /// Cell value as the model sees it (level code for categoricals).
    #[inline]
    pub fn value(&self, i: usize) -> f64 {
        match self {
            ColumnData::Numeric(v) => v[i],
            ColumnData::Categorical { codes, .. } => codes[i] as f64,
        }
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self, ColumnData::Categorical { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub data: ColumnData,
}

impl Column {
    pub fn numeric(name: impl Into<String>, values: Vec<f64>) -> Self {
        Column {
            name: name.into(),
            data: ColumnData::Numeric(values),
        }
    }

    pub fn categorical<S: AsRef<str>>(name: impl Into<String>, labels: &[S]) -> Self {
        Column {
            name: name.into(),
            data: ColumnData::categorical_from_labels(labels),
        }
    }
}

/// Predictor table with `n >= 2` rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Column>,
    response: Option<Vec<f64>>,
    n: usize,
}

pub const RESPONSE_NAME: &str = "y";

impl Dataset {
    pub fn new(columns: Vec<Column>, response: Option<Vec<f64>>) -> Result<Self> {
        let first = columns
            .first()
            .ok_or_else(|| Error::InvalidDataset("no predictor columns".into()))?;
        let n = first.data.len();
        if n < 2 {
            return Err(Error::InvalidDataset(format!(
                "need at least 2 observations, got {n}"
            )));
        }
        let mut names = HashSet::new();
        for c in &columns {
            if c.name.is_empty() {
                return Err(Error::InvalidDataset("empty column name".into()));
            }
            if !names.insert(c.name.as_str()) {
                return Err(Error::InvalidDataset(format!(
                    "duplicate column name `{}`",
                    c.name
                )));
            }
            if c.data.len() != n {
                return Err(Error::InvalidDataset(format!(
                    "column `{}` has {} entries, expected {n}",
                    c.name,
                    c.data.len()
                )));
            }
            match &c.data {
                ColumnData::Numeric(v) => {
                    if v.iter().any(|x| !x.is_finite()) {
                        return Err(Error::InvalidDataset(format!(
                            "column `{}` contains non-finite values",
                            c.name
                        )));
                    }
                }
                ColumnData::Categorical { levels, codes } => {
                    if levels.len() < 2 {
                        return Err(Error::InvalidDataset(format!(
                            "categorical column `{}` needs at least 2 levels",
                            c.name
                        )));
                    }
                    if codes.iter().any(|&c| c as usize >= levels.len()) {
                        return Err(Error::InvalidDataset(format!(
                            "column `{}` has a level code out of range",
                            c.name
                        )));
                    }
                }
            }
        }
        if let Some(y) = &response {
            if y.len() != n {
                return Err(Error::InvalidDataset(format!(
                    "response has {} entries, expected {n}",
                    y.len()
                )));
            }
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidDataset("response contains non-finite values".into()));
            }
        }
        Ok(Dataset {
            columns,
            response,
            n,
        })
    }

    /// All-numeric dataset from row-major data; columns are named `x1..xd`.
    pub fn from_rows(rows: &[Vec<f64>], response: Option<Vec<f64>>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidDataset("ragged rows".into()));
        }
        let columns = (0..d)
            .map(|j| Column::numeric(format!("x{}", j + 1), rows.iter().map(|r| r[j]).collect()))
            .collect();
        Dataset::new(columns, response)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &Column {
        &self.columns[j]
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn response(&self) -> Option<&[f64]> {
        self.response.as_deref()
    }

    pub fn with_response(mut self, y: Vec<f64>) -> Result<Self> {
        self.response = None;
        Dataset::new(self.columns, Some(y))
    }

    /// Numeric values of column `j`, or `None` for a categorical column.
    pub fn numeric(&self, j: usize) -> Option<&[f64]> {
        match &self.columns[j].data {
            ColumnData::Numeric(v) => Some(v),
            ColumnData::Categorical { .. } => None,
        }
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.columns[j].data.value(i)
    }

    /// The `n x d` matrix a model consumes.
    pub fn design_matrix(&self) -> Array2<f64> {
        Array2::from_shape_fn((self.n, self.d()), |(i, j)| self.value(i, j))
    }

    /// Rows `rows` (in that order) as a new dataset.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let columns = self
            .columns
            .iter()
            .map(|c| Column {
                name: c.name.clone(),
                data: match &c.data {
                    ColumnData::Numeric(v) => ColumnData::Numeric(rows.iter().map(|&i| v[i]).collect()),
                    ColumnData::Categorical { levels, codes } => ColumnData::Categorical {
                        levels: levels.clone(),
                        codes: rows.iter().map(|&i| codes[i]).collect(),
                    },
                },
            })
            .collect();
        let response = self
            .response
            .as_ref()
            .map(|y| rows.iter().map(|&i| y[i]).collect());
        Dataset::new(columns, response)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_and_duplicate_columns() {
        let err = Dataset::new(
            vec![Column::numeric("a", vec![1.0, 2.0]), Column::numeric("b", vec![1.0])],
            None,
        );
        assert!(err.is_err());
        let err = Dataset::new(
            vec![Column::numeric("a", vec![1.0, 2.0]), Column::numeric("a", vec![1.0, 2.0])],
            None,
        );
        assert!(err.is_err());
        let err = Dataset::new(vec![Column::numeric("", vec![1.0, 2.0])], None);
        assert!(err.is_err());
    }

    #[test]
    fn needs_two_rows_and_two_levels() {
        assert!(Dataset::new(vec![Column::numeric("a", vec![1.0])], None).is_err());
        assert!(Dataset::new(vec![Column::categorical("c", &["u", "u", "u"])], None).is_err());
    }

    #[test]
    fn categorical_levels_are_sorted() {
        let c = ColumnData::categorical_from_labels(&["b", "a", "b"]);
        match c {
            ColumnData::Categorical { levels, codes } => {
                assert_eq!(levels, vec!["a", "b"]);
                assert_eq!(codes, vec![1, 0, 1]);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn design_matrix_uses_codes() {
        let d = Dataset::new(
            vec![
                Column::numeric("x", vec![0.5, 1.5, 2.5]),
                Column::categorical("c", &["q", "p", "q"]),
            ],
            None,
        )
        .unwrap();
        let m = d.design_matrix();
        assert_eq!(m.row(0).to_vec(), vec![0.5, 1.0]);
        assert_eq!(m.row(1).to_vec(), vec![1.5, 0.0]);
    }
}
