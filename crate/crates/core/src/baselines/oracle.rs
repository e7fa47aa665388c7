use crate::error::{Error, Result};

/// Population importance values of one predictor under the linear model
/// `b1 X1 + b2 X2 + b3 X3` with `corr(X1, X2) = rho` and independent `X3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEntry {
    pub gs_total: f64,
    pub gs_main: f64,
    pub shapley_conditional: f64,
    pub shapley_marginal: f64,
    pub permutation_marginal: f64,
    pub permutation_conditional: f64,
    pub ale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleVims {
    pub beta: [f64; 3],
    pub rho: f64,
    pub entries: [OracleEntry; 3],
}

fn correlated(own: f64, other: f64, rho: f64) -> OracleEntry {
    let r2 = rho * rho;
    let lead = own + rho * other / 2.0;
    OracleEntry {
        gs_total: own * own * (1.0 - r2),
        gs_main: (own + rho * other).powi(2),
        shapley_conditional: lead * lead + (rho * own / 2.0).powi(2) - r2 * own * lead,
        shapley_marginal: own * own,
        permutation_marginal: 2.0 * own * own,
        permutation_conditional: 2.0 * own * own * (1.0 - r2),
        ale: own * own,
    }
}

pub fn oracle_linear3(beta: [f64; 3], rho: f64) -> Result<OracleVims> {
    if !(rho.abs() < 1.0) {
        return Err(Error::InvalidArgument(format!("|rho| must be below 1, got {rho}")));
    }
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::InvalidArgument("coefficients must be finite".into()));
    }
    let b3 = beta[2] * beta[2];
    let third = OracleEntry {
        gs_total: b3,
        gs_main: b3,
        shapley_conditional: b3,
        shapley_marginal: b3,
        permutation_marginal: 2.0 * b3,
        permutation_conditional: 2.0 * b3,
        ale: b3,
    };
    Ok(OracleVims {
        beta,
        rho,
        entries: [
            correlated(beta[0], beta[1], rho),
            correlated(beta[1], beta[0], rho),
            third,
        ],
    })
}
