use thiserror::Error;

/// Failures surfaced by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} lies outside {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: String,
    },
    #[error("radius {radius} is infeasible: target {target} exceeds attainable {attainable}")]
    InfeasibleRadius { radius: f64, target: f64, attainable: f64 },
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("root not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    NotBracketed { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("{source_name}{}: {message}", line.map(|l| format!(" line {l}")).unwrap_or_default())]
    Data {
        source_name: String,
        line: Option<u64>,
        message: String,
    },
}

pub type Result<V> = std::result::Result<V, Error>;

impl Error {
    pub(crate) fn domain(what: &'static str, value: impl Into<f64>, domain: impl Into<String>) -> Self {
        Error::Domain {
            what,
            value: value.into(),
            domain: domain.into(),
        }
    }
}
