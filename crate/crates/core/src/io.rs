//! State files, JSON exports and the frozen CSV formats.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::canonical::FilterResult;
use crate::error::{Error, Result};
use crate::linalg::{c, Mat2, Mat4};
use crate::state::TwoQubitState;
use crate::states;

/// Complex matrix element as it appears in state files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// `{"matrix": [[{"re":..,"im":..}; 4]; 4]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub matrix: [[Entry; 4]; 4],
}

impl MatrixSpec {
    pub fn from_state(state: &TwoQubitState) -> Self {
        let m = state.matrix();
        Self {
            matrix: std::array::from_fn(|i| {
                std::array::from_fn(|j| Entry {
                    re: m[(i, j)].re,
                    im: m[(i, j)].im,
                })
            }),
        }
    }

    pub fn to_state(&self) -> Result<TwoQubitState> {
        let m = Mat4::from_fn(|i, j| c(self.matrix[i][j].re, self.matrix[i][j].im));
        TwoQubitState::new(m)
    }
}

/// `{"factory": "werner", "p": ..}` and friends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "factory", rename_all = "snake_case", deny_unknown_fields)]
pub enum FactorySpec {
    Werner { p: f64 },
    BellDiagonal { lambdas: [f64; 4] },
    Random { seed: u64, ancilla_dim: usize },
}

impl FactorySpec {
    pub fn to_state(&self) -> Result<TwoQubitState> {
        match *self {
            FactorySpec::Werner { p } => states::werner(p),
            FactorySpec::BellDiagonal { lambdas } => states::bell_diagonal(lambdas),
            FactorySpec::Random { seed, ancilla_dim } => {
                if !(1..=4).contains(&ancilla_dim) {
                    return Err(Error::StateFile(format!(
                        "ancilla_dim {ancilla_dim} outside 1..=4"
                    )));
                }
                Ok(states::random_state(seed, ancilla_dim))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    Matrix(Box<MatrixSpec>),
    Factory(FactorySpec),
}

impl StateSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::StateFile(format!("invalid JSON: {e}")))?;
        let spec = if value.get("factory").is_some() {
            serde_json::from_value(value).map(StateSpec::Factory)
        } else if value.get("matrix").is_some() {
            serde_json::from_value(value).map(StateSpec::Matrix)
        } else {
            return Err(Error::StateFile(
                "expected a \"matrix\" or \"factory\" key".into(),
            ));
        };
        spec.map_err(|e| Error::StateFile(e.to_string()))
    }

    pub fn to_state(&self) -> Result<TwoQubitState> {
        match self {
            StateSpec::Matrix(m) => m.to_state(),
            StateSpec::Factory(f) => f.to_state(),
        }
    }
}

pub fn load_state(path: &Path) -> Result<TwoQubitState> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::StateFile(format!("{}: {e}", path.display())))?;
    StateSpec::parse(&text)?.to_state()
}

/// A float with 17 significant digits.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn mat2_rows(m: &Mat2) -> [[[f64; 2]; 2]; 2] {
    std::array::from_fn(|i| std::array::from_fn(|j| [m[(i, j)].re, m[(i, j)].im]))
}

/// JSON view of a [`FilterResult`]; complex entries are `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterExport {
    pub filter_signal: [[[f64; 2]; 2]; 2],
    pub filter_meter: [[[f64; 2]; 2]; 2],
    pub success_probability: f64,
    pub iterations: usize,
    pub b_max_in: f64,
    pub b_max_out: f64,
    pub deviations: Vec<f64>,
    pub state_out: MatrixSpec,
}

impl From<&FilterResult> for FilterExport {
    fn from(r: &FilterResult) -> Self {
        Self {
            filter_signal: mat2_rows(&r.filter_signal),
            filter_meter: mat2_rows(&r.filter_meter),
            success_probability: r.success_probability,
            iterations: r.iterations,
            b_max_in: r.b_max_in,
            b_max_out: r.b_max_out,
            deviations: r.deviations.clone(),
            state_out: MatrixSpec::from_state(&r.state_out),
        }
    }
}

pub const SWEEP_HEADER: &str = "theta_deg,K_hat,P_hat,dK_hat,dK_theory";
pub const SURFACE_HEADER: &str = "theta_deg,theta_prime_deg,dK2,dKp2,sum,bound";

/// CSV text with the given header, one row per slice, LF line endings.
pub fn csv<const N: usize>(header: &str, rows: impl IntoIterator<Item = [f64; N]>) -> String {
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    for row in rows {
        for (i, x) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", sig17(*x));
        }
        out.push('\n');
    }
    out
}
