use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VimReport {
    pub meta: Meta,
    pub predictors: Vec<PredictorReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r2_ale2: Option<Statistic>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub n: usize,
    pub d: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "K_pair")]
    pub k_pair: usize,
    pub seed: u64,
    pub model: String,
    pub convention: String,
    pub methods: Vec<String>,
    pub evaluations: Evaluations,
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Evaluations {
    /// Local effects shared by ale_main, qpale and cpale.
    pub local_effects: u64,
    pub ale_second: u64,
    pub mp: u64,
    pub shm: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorReport {
    pub name: String,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ale_main: Option<MethodValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ale_second: Option<MethodValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qpale: Option<MethodValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpale: Option<MethodValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mp: Option<MethodValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shm: Option<MethodValue>,
}

impl PredictorReport {
    pub fn new(name: &str) -> Self {
        PredictorReport {
            name: name.to_string(),
            k: None,
            l: None,
            ale_main: None,
            ale_second: None,
            qpale: None,
            cpale: None,
            mp: None,
            shm: None,
        }
    }

    pub fn slot(&mut self, method: Method) -> &mut Option<MethodValue> {
        match method {
            Method::AleMain => &mut self.ale_main,
            Method::AleSecond => &mut self.ale_second,
            Method::Qpale => &mut self.qpale,
            Method::Cpale => &mut self.cpale,
            Method::Mp => &mut self.mp,
            Method::Shm => &mut self.shm,
        }
    }
}

/// A VIM and its square root, or nulls with the reason it is unavailable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodValue {
    pub value: Option<f64>,
    pub sqrt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl MethodValue {
    pub fn of(value: f64) -> Self {
        // rounding can leave a tiny negative for an exact zero
        let v = value.max(0.0);
        MethodValue {
            value: Some(v),
            sqrt: Some(v.sqrt()),
            reason: None,
        }
    }

    pub fn missing(reason: impl Into<String>) -> Self {
        MethodValue {
            value: None,
            sqrt: None,
            reason: Some(reason.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statistic {
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    AleMain,
    AleSecond,
    Qpale,
    Cpale,
    Mp,
    Shm,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::AleMain,
        Method::AleSecond,
        Method::Qpale,
        Method::Cpale,
        Method::Mp,
        Method::Shm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::AleMain => "ale_main",
            Method::AleSecond => "ale_second",
            Method::Qpale => "qpale",
            Method::Cpale => "cpale",
            Method::Mp => "mp",
            Method::Shm => "shm",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == s)
    }
}
