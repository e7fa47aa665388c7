use std::fmt::Write as _;
use std::path::Path;

use anyhow::Context;
use ndarray::Array2;

use palevim_core::ale::{AleCurve, AleSurface, Axis, AxisKind};

/// Curves, path bundles and surfaces to export, keyed by column names.
#[derive(Default)]
pub struct PlotData {
    pub curves: Vec<(String, AleCurve)>,
    pub paths: Vec<(String, Array2<f64>, Axis)>,
    pub surfaces: Vec<(String, String, AleSurface)>,
}

impl PlotData {
    pub fn is_empty(&self) -> bool {
        self.curves.is_empty() && self.paths.is_empty() && self.surfaces.is_empty()
    }
}

fn point_label(axis: &Axis, k: usize) -> String {
    match &axis.kind {
        AxisKind::Categorical { labels, .. } => csv_field(&labels[k]),
        AxisKind::Numeric => format!("{}", axis.points[k]),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

pub fn curve_csv(c: &AleCurve) -> String {
    let mut out = String::from("z,f_hat\n");
    for (k, v) in c.centered.iter().enumerate() {
        writeln!(out, "{},{v}", point_label(&c.axis, k)).unwrap();
    }
    out
}

pub fn paths_csv(paths: &Array2<f64>, axis: &Axis) -> String {
    let mut out = String::from("k,z,path_id,value\n");
    for ((k, l), v) in paths.indexed_iter() {
        writeln!(out, "{k},{},{},{v}", point_label(axis, k), l + 1).unwrap();
    }
    out
}

/// One row per cell, located at its upper corner.
pub fn surface_csv(s: &AleSurface) -> String {
    let mut out = String::from("z_j,z_l,value,count\n");
    for ((a, b), v) in s.cells.indexed_iter() {
        writeln!(
            out,
            "{},{},{v},{}",
            s.axes.0.points[a + 1],
            s.axes.1.points[b + 1],
            s.counts[[a, b]]
        )
        .unwrap();
    }
    out
}

/// Writes every file after all results exist; nothing is created when
/// `data` is empty.
pub fn write_plot_files(dir: &Path, data: &PlotData) -> anyhow::Result<()> {
    if data.is_empty() {
        return Ok(());
    }
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let write = |name: String, body: String| {
        let path = dir.join(name);
        std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
    };
    for (col, c) in &data.curves {
        write(format!("ale_main_{}.csv", file_stem(col)), curve_csv(c))?;
    }
    for (col, p, axis) in &data.paths {
        write(format!("pale_paths_{}.csv", file_stem(col)), paths_csv(p, axis))?;
    }
    for (a, b, s) in &data.surfaces {
        write(
            format!("ale_second_{}_{}.csv", file_stem(a), file_stem(b)),
            surface_csv(s),
        )?;
    }
    Ok(())
}
