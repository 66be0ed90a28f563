use std::fmt;

use thiserror::Error;

/// Feature family a failure originated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureFamily {
    Dispersion,
    Distribution,
    InformationContent,
    MetaModel,
    NearestBetter,
}

impl fmt::Display for FeatureFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FeatureFamily::Dispersion => "disp",
            FeatureFamily::Distribution => "distr",
            FeatureFamily::InformationContent => "ic",
            FeatureFamily::MetaModel => "meta_model",
            FeatureFamily::NearestBetter => "nbc",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("value {value} at row {row}, column {column} ({name}) lies outside ({lo}, {hi}]")]
    OutOfBounds {
        row: usize,
        column: usize,
        name: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("singular fit: {0}")]
    SingularFit(String),

    #[error("unknown BBOB function id {0} (expected 1..=24)")]
    UnknownFunction(u32),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite input: {0}")]
    NonFiniteInput(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid design space: {0}")]
    InvalidSpace(String),

    #[error("schema violation{}: {message}", location(*.row, .column.as_deref()))]
    Schema {
        row: Option<usize>,
        column: Option<String>,
        message: String,
    },

    #[error("{family} features: {source}")]
    Feature {
        family: FeatureFamily,
        #[source]
        source: Box<Error>,
    },

    #[error("{}", join_errors(.0))]
    Multiple(Vec<Error>),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn location(row: Option<usize>, column: Option<&str>) -> String {
    match (row, column) {
        (Some(r), Some(c)) => format!(" at row {r}, column {c}"),
        (Some(r), None) => format!(" at row {r}"),
        (None, Some(c)) => format!(" in column {c}"),
        (None, None) => String::new(),
    }
}

fn join_errors(errors: &[Error]) -> String {
    errors
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub fn in_family(self, family: FeatureFamily) -> Self {
        Error::Feature {
            family,
            source: Box::new(self),
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Short machine-readable name of the error kind, looking through
    /// family and context wrappers.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OutOfBounds { .. } => "OutOfBounds",
            Error::InsufficientData(_) => "InsufficientData",
            Error::DegenerateSample(_) => "DegenerateSample",
            Error::SingularFit(_) => "SingularFit",
            Error::UnknownFunction(_) => "UnknownFunction",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NonFiniteInput(_) => "NonFiniteInput",
            Error::InvalidInput(_) => "InvalidInput",
            Error::InvalidSpace(_) => "InvalidSpace",
            Error::Schema { .. } => "Schema",
            Error::Feature { source, .. } => source.kind(),
            Error::Multiple(_) => "Multiple",
            Error::Context { source, .. } => source.kind(),
            Error::Io(_) => "Io",
            Error::Csv(_) => "Csv",
            Error::Json(_) => "Json",
        }
    }

    /// Row and column an input error points at, if any.
    pub fn location(&self) -> (Option<usize>, Option<String>) {
        match self {
            Error::OutOfBounds { row, name, .. } => (Some(*row), Some(name.clone())),
            Error::Schema { row, column, .. } => (*row, column.clone()),
            Error::Feature { source, .. } | Error::Context { source, .. } => source.location(),
            _ => (None, None),
        }
    }

    /// Families that failed, for errors produced by feature computation.
    pub fn failed_families(&self) -> Vec<FeatureFamily> {
        match self {
            Error::Feature { family, .. } => vec![*family],
            Error::Multiple(errors) => errors.iter().flat_map(Error::failed_families).collect(),
            Error::Context { source, .. } => source.failed_families(),
            _ => Vec::new(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
