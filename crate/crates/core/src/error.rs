use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("corpus is empty after filtering documents shorter than {min_tokens} tokens")]
    EmptyCorpus { min_tokens: usize },

    #[error(
        "cannot hold out {requested} of {documents} documents while keeping all {locations} locations in training"
    )]
    SplitTooLarge { requested: usize, documents: usize, locations: usize },

    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparameters(String),

    #[error("unknown location {location} (model has {locations})")]
    UnknownLocation { location: usize, locations: usize },

    #[error("locality score undefined: global generation mass is zero")]
    ZeroGlobalMass,

    #[error("metric undefined: {0}")]
    Metric(String),

    #[error("k-means needs {clusters} distinct location vectors but only {distinct} exist")]
    TooFewDistinctVectors { clusters: usize, distinct: usize },

    #[error("vocabulary mismatch: model {model}, corpus {corpus}")]
    VocabularyMismatch { model: String, corpus: String },

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("model artifact: {0}")]
    Artifact(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
