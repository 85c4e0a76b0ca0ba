use std::path::PathBuf;

use thiserror::Error;

use crate::cohort::{Dimension, Role};

/// Domain errors raised by the base diversity indices.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndexError {
    #[error("empty community")]
    EmptyCommunity,
    #[error("richness must be at least 1")]
    ZeroRichness,
    #[error("reference richness below observed richness ({reference} < {observed})")]
    ReferenceBelowObserved { reference: usize, observed: usize },
    #[error("Simpson undefined below two individuals (N = {0})")]
    SimpsonTooSmall(f64),
    #[error("Simpson requires integer counts")]
    NonIntegerCounts,
    #[error("disparity matrix side {matrix} does not match {categories} categories")]
    DimensionMismatch { matrix: usize, categories: usize },
    #[error("{categories} category labels but {counts} counts")]
    LengthMismatch { categories: usize, counts: usize },
    #[error("invalid count {0}")]
    InvalidCount(f64),
    #[error("duplicate category label `{0}`")]
    DuplicateCategory(String),
    #[error("disparity row {row} has length {len}, expected {side}")]
    NotSquare { row: usize, len: usize, side: usize },
    #[error("invalid disparity d[{i}][{j}] = {value}")]
    InvalidDisparity { i: usize, j: usize, value: f64 },
    #[error("{name} = {value} outside its valid range")]
    OutOfRange { name: &'static str, value: f64 },
}

/// Errors from conference-level aggregation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AggregateError {
    #[error("{role} community: {source}")]
    Community {
        role: Role,
        #[source]
        source: IndexError,
    },
    #[error("weights must be non-negative and sum to 1 (got {k}, {a}, {o})")]
    InvalidWeights { k: f64, a: f64, o: f64 },
    #[error("expected a {expected} breakdown, got {found}")]
    WrongDimension { expected: Dimension, found: Dimension },
    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),
    #[error(transparent)]
    Index(#[from] IndexError),
}

impl AggregateError {
    /// The community that failed, when the error is attributable to one.
    pub fn role(&self) -> Option<Role> {
        match self {
            AggregateError::Community { role, .. } => Some(*role),
            _ => None,
        }
    }
}

/// Errors from the participant data model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CohortError {
    #[error("edition has no records")]
    EmptyEdition,
    #[error("record for {found_conference} {found_year} does not belong to edition {conference} {year}")]
    MixedEdition {
        conference: String,
        year: i32,
        found_conference: String,
        found_year: i32,
    },
    #[error("sample fraction {0} outside (0, 1]")]
    InvalidFraction(f64),
}

/// Fatal errors while reading input files.
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("empty file")]
    EmptyFile,
    #[error("file has a header but no data rows")]
    NoRows,
    #[error("schema error: missing column `{column}`")]
    MissingColumn { column: String },
    #[error("schema error: unexpected column `{column}`")]
    UnexpectedColumn { column: String },
    #[error("schema error: column `{column}` expected at position {position}")]
    MisplacedColumn { column: String, position: usize },
    #[error("{table} line {line}: {message}")]
    Table {
        table: &'static str,
        line: u64,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
}

impl IngestError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IngestError::Io { path: path.into(), source }
    }
}
