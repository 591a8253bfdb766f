//! Versioned model artifact.
//!
//! A single JSON object:
//!
//! ```text
//! {
//!   "format": "lglda-model",
//!   "version": 1,
//!   "scalar": "f64",              // or "f32"
//!   "kind": "lglda",              // lda | local_lda | tfidf_kmeans
//!   "hyperparameters": { ... },
//!   "vocabulary_hash": "<hex sha256 of the newline-terminated words>",
//!   "vocabulary": ["...", ...],
//!   "locations": ["...", ...],
//!   "model": { "type": "lglda" | "baseline", "estimate": { ... } }
//! }
//! ```
//!
//! Floats are written in shortest round-trip form and parsed exactly, so a
//! save/load cycle reproduces every value bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{fingerprint_words, Corpus};
use crate::error::{Error, Result};
use crate::lglda::Hyperparameters;
use crate::model::{Model, ModelKind};
use crate::scalar::Real;

pub const FORMAT: &str = "lglda-model";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct ModelArtifact<F> {
    pub format: String,
    pub version: u32,
    pub scalar: String,
    pub kind: ModelKind,
    pub hyperparameters: Hyperparameters,
    pub vocabulary_hash: String,
    pub vocabulary: Vec<String>,
    pub locations: Vec<String>,
    pub model: Model<F>,
}

impl<F: Real> ModelArtifact<F> {
    pub fn new(model: Model<F>, hyperparameters: Hyperparameters, corpus: &Corpus) -> Self {
        Self {
            format: FORMAT.to_string(),
            version: VERSION,
            scalar: F::NAME.to_string(),
            kind: model.kind(),
            hyperparameters,
            vocabulary_hash: corpus.vocabulary().fingerprint(),
            vocabulary: corpus.vocabulary().words().to_vec(),
            locations: corpus.location_names().to_vec(),
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let artifact: Self = serde_json::from_str(text)?;
        artifact.check()?;
        Ok(artifact)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()? + "\n").map_err(|source| Error::Io { path: path.to_path_buf(), source })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    fn check(&self) -> Result<()> {
        if self.format != FORMAT {
            return Err(Error::Artifact(format!("unexpected format {:?}", self.format)));
        }
        if self.version != VERSION {
            return Err(Error::Artifact(format!("unsupported version {}", self.version)));
        }
        if self.scalar != F::NAME {
            return Err(Error::Artifact(format!("artifact holds {} values, loaded as {}", self.scalar, F::NAME)));
        }
        if self.kind != self.model.kind() {
            return Err(Error::Artifact("kind tag disagrees with the stored model".into()));
        }
        if fingerprint_words(&self.vocabulary) != self.vocabulary_hash {
            return Err(Error::Artifact("vocabulary does not match its hash".into()));
        }
        Ok(())
    }

    /// Fails unless `corpus` was indexed with this artifact's vocabulary.
    pub fn check_vocabulary(&self, corpus: &Corpus) -> Result<()> {
        let corpus_hash = corpus.vocabulary().fingerprint();
        if corpus_hash != self.vocabulary_hash {
            return Err(Error::VocabularyMismatch { model: self.vocabulary_hash.clone(), corpus: corpus_hash });
        }
        Ok(())
    }
}
