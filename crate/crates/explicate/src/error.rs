use std::path::PathBuf;

/// Errors raised by the std layer: IO, file formats, configuration and the
/// language-model client, plus everything the core can return.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] explicate_core::Error),
    #[error("cannot read {path}: {source}")]
    FileUnreadable { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    FileUnwritable { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    InFile { path: PathBuf, source: Box<Error> },
    #[error("record {index}: {source}")]
    AtRecord { index: usize, source: Box<Error> },
    #[error("malformed csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("model file version {found:?} is not supported (expected {expected:?})")]
    VersionMismatch { found: String, expected: String },
    #[error("corrupt model file: {0}")]
    CorruptModel(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("language-model endpoint rejected the credentials (HTTP {status})")]
    AuthFailure { status: u16 },
    #[error("language-model request failed: {0}")]
    Llm(String),
    #[error("cannot bind {addr}: {source}")]
    BindFailure { addr: String, source: std::io::Error },
    #[error("server error: {0}")]
    Server(std::io::Error),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn in_file(path: impl Into<PathBuf>, err: Error) -> Self {
        Error::InFile { path: path.into(), source: Box::new(err) }
    }

    fn root(&self) -> &Error {
        match self {
            Error::InFile { source, .. } | Error::AtRecord { source, .. } => source.root(),
            e => e,
        }
    }

    /// Stable machine-readable code used in API and CLI error documents.
    pub fn code(&self) -> &'static str {
        use explicate_core::Error as C;
        match self.root() {
            Error::Core(c) => match c {
                C::NoLabelColumn => "no_label_column",
                C::NoTextColumn => "no_text_column",
                C::UnknownLabel(_) => "unknown_label",
                C::TooFewRecords(_) => "too_few_records",
                C::EmptyVocabulary => "empty_vocabulary",
                C::DimensionMismatch { .. } => "dimension_mismatch",
                C::IndexOutOfRange { .. } => "index_out_of_range",
                C::SingleClassData => "single_class_data",
                C::NonFiniteLoss { .. } => "non_finite_loss",
                C::EmptyText | C::EmptyInput => "empty_input",
                C::TooManyFeatures { .. } => "too_many_features",
                C::EmptyMatrix => "empty_matrix",
                C::NoWords => "no_words",
                C::AllUnparseable => "all_unparseable",
                C::InvalidConfig(_) => "invalid_config",
            },
            Error::FileUnreadable { .. } => "file_unreadable",
            Error::FileUnwritable { .. } => "file_unwritable",
            Error::InFile { .. } | Error::AtRecord { .. } => unreachable!(),
            Error::Csv(_) => "malformed_csv",
            Error::VersionMismatch { .. } => "version_mismatch",
            Error::CorruptModel(_) => "corrupt_model",
            Error::Config(_) => "invalid_config",
            Error::AuthFailure { .. } => "auth_failure",
            Error::Llm(_) => "llm_failure",
            Error::BindFailure { .. } => "bind_failure",
            Error::Server(_) => "server_error",
            Error::Usage(_) => "usage",
        }
    }

    /// Process exit code: 2 for usage, configuration and input-data problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use explicate_core::Error as C;
        match self.root() {
            Error::Usage(_)
            | Error::Config(_)
            | Error::VersionMismatch { .. }
            | Error::CorruptModel(_)
            | Error::FileUnreadable { .. } => 2,
            Error::Core(
                C::SingleClassData
                | C::NoLabelColumn
                | C::NoTextColumn
                | C::TooFewRecords(_)
                | C::EmptyText
                | C::EmptyInput
                | C::InvalidConfig(_),
            ) => 2,
            _ => 1,
        }
    }
}
