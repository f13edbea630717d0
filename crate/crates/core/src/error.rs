use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library. The CLI maps every variant to the
/// "data error" exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate post id `{0}`")]
    DuplicateId(String),

    #[error("post `{0}` has no label")]
    Unlabeled(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot build {k} folds: smallest class has only {smallest} posts")]
    TooManyFolds { k: usize, smallest: usize },

    #[error("invalid cue `{name}`: {message}")]
    InvalidCue { name: String, message: String },

    #[error("annotation references unknown post `{0}`")]
    UnknownPost(String),

    #[error("post `{post_id}` has {found} judgments, rule expects {expected}")]
    JudgmentCount {
        post_id: String,
        found: usize,
        expected: usize,
    },

    #[error("annotator `{annotator}` judged post `{post_id}` more than once")]
    DuplicateJudgment { post_id: String, annotator: String },

    #[error("quota of {quota} for source `{source_name}` exceeds pool size {available}")]
    QuotaExceeded {
        source_name: String,
        quota: usize,
        available: usize,
    },

    #[error("embedding table: {0}")]
    Embedding(String),

    #[error("training data must contain both classes")]
    SingleClass,

    #[error("empty training set")]
    EmptyTrainingSet,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
