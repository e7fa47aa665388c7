use clap::{Args, ValueEnum};
use serde::Serialize;

use palevim_core::baselines::{oracle_linear3, OracleEntry, OracleVims};

use crate::{CliResult, Failure};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// Coefficients `b1,b2,b3`.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_hyphen_values = true)]
    pub beta: Vec<f64>,
    /// Correlation of X1 and X2.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "rho_grid")]
    pub rho: Option<f64>,
    /// `start:stop:step`, inclusive of `stop`.
    #[arg(long, allow_hyphen_values = true)]
    pub rho_grid: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Grid values from `start` to `stop` inclusive, robust to rounding in `step`.
pub fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>();
    let (start, stop, step) = match (parts.len(), nums) {
        (3, Ok(v)) => (v[0], v[1], v[2]),
        _ => return Err(Failure::usage(format!("--rho-grid must be start:stop:step, got `{text}`"))),
    };
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Failure::usage("--rho-grid needs start <= stop and a positive step"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

const METHODS: [&str; 7] = [
    "gs_total",
    "gs_main",
    "shapley_conditional",
    "shapley_marginal",
    "permutation_marginal",
    "permutation_conditional",
    "ale",
];

fn values(e: &OracleEntry) -> [f64; 7] {
    [
        e.gs_total,
        e.gs_main,
        e.shapley_conditional,
        e.shapley_marginal,
        e.permutation_marginal,
        e.permutation_conditional,
        e.ale,
    ]
}

#[derive(Serialize)]
struct JsonRow {
    rho: f64,
    beta: [f64; 3],
    predictors: Vec<JsonEntry>,
}

#[derive(Serialize)]
struct JsonEntry {
    name: String,
    gs_total: f64,
    gs_main: f64,
    shapley_conditional: f64,
    shapley_marginal: f64,
    permutation_marginal: f64,
    permutation_conditional: f64,
    ale: f64,
}

pub fn render_csv(rows: &[OracleVims]) -> String {
    let mut header = vec!["rho".to_string()];
    for j in 1..=3 {
        header.extend(METHODS.iter().map(|m| format!("{m}_x{j}")));
    }
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let mut cells = vec![r.rho.to_string()];
        for e in &r.entries {
            cells.extend(values(e).iter().map(f64::to_string));
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn render_json(rows: &[OracleVims]) -> String {
    let rows: Vec<JsonRow> = rows
        .iter()
        .map(|r| JsonRow {
            rho: r.rho,
            beta: r.beta,
            predictors: r
                .entries
                .iter()
                .enumerate()
                .map(|(j, e)| JsonEntry {
                    name: format!("x{}", j + 1),
                    gs_total: e.gs_total,
                    gs_main: e.gs_main,
                    shapley_conditional: e.shapley_conditional,
                    shapley_marginal: e.shapley_marginal,
                    permutation_marginal: e.permutation_marginal,
                    permutation_conditional: e.permutation_conditional,
                    ale: e.ale,
                })
                .collect(),
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn run(args: OracleArgs) -> CliResult<()> {
    let beta: [f64; 3] = args
        .beta
        .as_slice()
        .try_into()
        .map_err(|_| Failure::usage("--beta needs exactly three values b1,b2,b3"))?;
    let rhos = match (args.rho, &args.rho_grid) {
        (Some(r), None) => vec![r],
        (None, Some(g)) => parse_grid(g)?,
        _ => return Err(Failure::usage("pass one of --rho or --rho-grid")),
    };
    let rows = rhos
        .into_iter()
        .map(|rho| oracle_linear3(beta, rho))
        .collect::<palevim_core::Result<Vec<_>>>()?;
    match args.format {
        Format::Csv => print!("{}", render_csv(&rows)),
        Format::Json => print!("{}", render_json(&rows)),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts() {
        assert_eq!(parse_grid("-0.95:0.95:0.05").unwrap().len(), 39);
        assert_eq!(parse_grid("0:1:0.5").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("0.3:0.3:0.1").unwrap(), vec![0.3]);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn csv_shape() {
        let rows = vec![oracle_linear3([1.0, 1.0, 0.5], 0.0).unwrap()];
        let text = render_csv(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].split(',').count(), 22);
        assert_eq!(lines[1].split(',').count(), 22);
    }
}
