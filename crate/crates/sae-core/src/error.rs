use thiserror::Error;

use crate::cells::CellKind;

/// Errors produced by the emulator, the analysis engine, and the file codecs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("operand {name}={value} outside [{min}, {max}]")]
    OperandOutOfRange {
        name: &'static str,
        value: i64,
        min: i64,
        max: i64,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("no truth table for cell kind {0:?}")]
    InvalidCellKind(CellKind),

    #[error("protocol infeasible: {0}")]
    ProtocolInfeasible(String),

    #[error("not a binary PGM file (missing P5 magic)")]
    PgmBadMagic,

    #[error("unsupported PGM maxval {0}, only 255 is supported")]
    PgmUnsupportedMaxval(u32),

    #[error("malformed PGM header: {0}")]
    PgmHeader(String),

    #[error("PGM payload truncated: expected {expected} bytes, found {found}")]
    PgmTruncated { expected: usize, found: usize },

    #[error("ragged CSV matrix: row {row} has {found} columns, expected {expected}")]
    CsvRagged {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("invalid integer {token:?} in CSV at row {row}, column {col}")]
    CsvBadToken {
        row: usize,
        col: usize,
        token: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
