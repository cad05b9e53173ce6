use thiserror::Error;

use crate::report::ConditionReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("data length {len} does not match {rows}x{cols}")]
    DataLength { rows: usize, cols: usize, len: usize },

    #[error("matrix is singular to tolerance (pivot {pivot:e} at step {step})")]
    Singular { step: usize, pivot: f64 },

    #[error("rank recursion exceeded depth {depth}; tolerance produced inconsistent rank decisions")]
    RecursionDepth { depth: usize },

    #[error("matrix has no group inverse: index {index} > 1")]
    NoGroupInverse { index: usize },

    #[error("hypotheses of {theorem} violated: {report}")]
    Hypothesis { theorem: String, report: ConditionReport },

    #[error("generator recipe is infeasible: {0}")]
    Infeasible(String),

    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
}
