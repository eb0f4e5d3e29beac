//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A vector centered to (near-)zero and cannot be normalized onto the
    /// pre-shape sphere. Constant feature vectors always end up here.
    #[error("degenerate vector: norm {norm:.3e} is at or below {eps:.1e} after centering")]
    DegenerateVector { norm: f64, eps: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Geodesic endpoints are too close (or too close to antipodal) for the
    /// sin-theta division in the interpolation formulas to be trustworthy.
    #[error("degenerate geodesic: angle {theta:.6e} rad outside [{min:.1e}, pi - {min:.1e}]")]
    DegenerateCurve { theta: f64, min: f64 },

    #[error("parameter {value} outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("endpoint initialization failed after {attempts} perturbation attempts")]
    InitFailure { attempts: usize },

    #[error("non-finite loss at epoch {epoch} (sim {sim:.3e}, diverg {diverg:.3e})")]
    NonFiniteLoss { epoch: usize, sim: f64, diverg: f64 },

    #[error("no fitted curve for label {label:?}")]
    MissingCurve { label: String },

    #[error("class {label:?} has {count} samples, need at least {need}")]
    TooFewSamples {
        label: String,
        count: usize,
        need: usize,
    },

    #[error("empty training set")]
    EmptyTrainSet,

    #[error("label sets disagree: {detail}")]
    LabelMismatch { detail: String },

    #[error("class {label:?} is empty")]
    EmptyClass { label: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{count} class fit(s) failed: {summary}")]
    ClassFailures {
        count: usize,
        summary: String,
        failures: Vec<(String, String)>,
    },

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },
}

impl Error {
    pub fn class_failures(mut failures: Vec<(String, Error)>) -> Error {
        failures.sort_by(|a, b| a.0.cmp(&b.0));
        let summary = failures
            .iter()
            .map(|(label, err)| format!("{label}: {err}"))
            .collect::<Vec<_>>()
            .join("; ");
        Error::ClassFailures {
            count: failures.len(),
            summary,
            failures: failures
                .into_iter()
                .map(|(l, e)| (l, e.to_string()))
                .collect(),
        }
    }
}
