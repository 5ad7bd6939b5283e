use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("no label column could be detected")]
    NoLabelColumn,
    #[error("no text column could be detected")]
    NoTextColumn,
    #[error("unknown label value {0:?}")]
    UnknownLabel(String),
    #[error("too few records: {0}")]
    TooFewRecords(String),
    #[error("no term reaches the minimum document frequency")]
    EmptyVocabulary,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("feature index {index} out of range for dimension {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("training data contains a single class")]
    SingleClassData,
    #[error("training loss became non-finite at epoch {epoch}; reduce the learning rate")]
    NonFiniteLoss { epoch: usize },
    #[error("text contains no tokens")]
    EmptyText,
    #[error("brute-force Shapley supports at most {max} features, got {found}")]
    TooManyFeatures { found: usize, max: usize },
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("text contains no words")]
    NoWords,
    #[error("every explanation was unparseable")]
    AllUnparseable,
    #[error("input is empty")]
    EmptyInput,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
