//! External models reached through a one-shot process per batch.
//!
//! The process gets a CSV on stdin (header of predictor names, then one line
//! per query row) and must print exactly one decimal prediction per row on
//! stdout and exit with status 0.

use std::fmt::Write as _;
use std::io::Write;
use std::process::{Command, Stdio};
use std::sync::Mutex;
use std::thread;

use ndarray::ArrayView2;

use super::{ColumnKind, Model, ModelHandle, Schema};
use crate::error::{Error, Result};

pub struct SubprocessModel {
    command: String,
    schema: Schema,
    lock: Mutex<()>,
}

impl SubprocessModel {
    pub fn new(command: impl Into<String>, schema: Schema) -> Self {
        SubprocessModel {
            command: command.into(),
            schema,
            lock: Mutex::new(()),
        }
    }
}

/// The exact bytes written to the model's standard input for `rows`.
pub fn render_protocol_input(schema: &Schema, rows: ArrayView2<'_, f64>) -> String {
    let mut out = String::with_capacity(rows.len() * 12 + 64);
    let header: Vec<&str> = schema.0.iter().map(|c| c.name.as_str()).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows.rows() {
        for (j, (v, spec)) in row.iter().zip(&schema.0).enumerate() {
            if j > 0 {
                out.push(',');
            }
            match &spec.kind {
                ColumnKind::Numeric => {
                    // Display for f64 is the shortest string that round-trips
                    write!(out, "{v}").unwrap();
                }
                ColumnKind::Categorical(levels) => out.push_str(&levels[*v as usize]),
            }
        }
        out.push('\n');
    }
    out
}

fn parse_predictions(stdout: &str, expected: usize) -> Result<Vec<f64>> {
    let mut lines: Vec<&str> = stdout.split('\n').collect();
    if lines.last() == Some(&"") {
        lines.pop();
    }
    if lines.len() != expected {
        return Err(Error::PredictionCount {
            expected,
            got: lines.len(),
        });
    }
    lines
        .iter()
        .enumerate()
        .map(|(i, line)| {
            let text = line.strip_suffix('\r').unwrap_or(line).trim();
            text.parse::<f64>().map_err(|_| Error::PredictionParse {
                line: i + 1,
                text: text.to_string(),
            })
        })
        .collect()
}

impl Model for SubprocessModel {
    fn predict(&self, rows: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        let input = render_protocol_input(&self.schema, rows);
        let _guard = self.lock.lock().unwrap_or_else(|e| e.into_inner());

        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(Error::ProcessSpawn)?;

        let mut stdin = child.stdin.take().expect("stdin is piped");
        let writer = thread::spawn(move || {
            // a model that exits early closes the pipe; the exit status reports that
            let _ = stdin.write_all(input.as_bytes());
        });
        let output = child.wait_with_output().map_err(Error::ProcessSpawn)?;
        let _ = writer.join();

        match output.status.code() {
            Some(0) => {}
            Some(code) => return Err(Error::ProcessFailed(code)),
            None => return Err(Error::ProcessKilled),
        }
        let stdout = String::from_utf8_lossy(&output.stdout);
        parse_predictions(&stdout, rows.nrows())
    }
}

/// Handle for an external command implementing the batch protocol.
pub fn spawn_subprocess_model(command: &str, schema: Schema) -> Result<ModelHandle> {
    if command.trim().is_empty() {
        return Err(Error::InvalidArgument("empty model command".into()));
    }
    let name = format!("cmd:{command}");
    Ok(ModelHandle::new(
        name,
        schema.clone(),
        SubprocessModel::new(command, schema),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ColumnSpec;
    use ndarray::array;

    fn schema2() -> Schema {
        Schema(vec![
            ColumnSpec {
                name: "a".into(),
                kind: ColumnKind::Numeric,
            },
            ColumnSpec {
                name: "c".into(),
                kind: ColumnKind::Categorical(vec!["lo".into(), "hi".into()]),
            },
        ])
    }

    #[test]
    fn protocol_rendering() {
        let rows = array![[0.1, 1.0], [2.0, 0.0], [-1e-7, 1.0]];
        let text = render_protocol_input(&schema2(), rows.view());
        assert_eq!(text, "a,c\n0.1,hi\n2,lo\n-0.0000001,hi\n");
    }

    #[test]
    fn prediction_parsing() {
        assert_eq!(parse_predictions("1\n2.5\n", 2).unwrap(), vec![1.0, 2.5]);
        assert_eq!(parse_predictions("1\n2.5", 2).unwrap(), vec![1.0, 2.5]);
        assert!(matches!(
            parse_predictions("1\n", 2),
            Err(Error::PredictionCount { expected: 2, got: 1 })
        ));
        match parse_predictions("1\nabc\n", 2) {
            Err(Error::PredictionParse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_predictions("1\n\n", 2).is_err());
    }
}
