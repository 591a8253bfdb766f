use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::BaselineEstimate;
use crate::lglda::ModelEstimate;
use crate::scalar::Real;

/// Common view of every trained model, as consumed by the metrics.
pub trait TopicModel<F: Real> {
    fn num_topics(&self) -> usize;

    fn num_words(&self) -> usize;

    /// `location_topics[l][k]`.
    fn location_topics(&self) -> &[Vec<F>];

    /// `topic_words[k][w]`.
    fn topic_words(&self) -> &[Vec<F>];

    /// `p(w | d)` for each token of a document at `location`. Every token id
    /// must be below [`num_words`](Self::num_words).
    fn token_probabilities(&self, location: usize, tokens: &[u32]) -> Vec<F>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Lglda,
    Lda,
    LocalLda,
    TfidfKmeans,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Lglda, ModelKind::Lda, ModelKind::LocalLda, ModelKind::TfidfKmeans];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Lglda => "lglda",
            ModelKind::Lda => "lda",
            ModelKind::LocalLda => "local_lda",
            ModelKind::TfidfKmeans => "tfidf_kmeans",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown model kind {s:?} (expected lglda, lda, local_lda or tfidf_kmeans)"))
    }
}

/// Any trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real", rename_all = "snake_case", tag = "type", content = "estimate")]
pub enum Model<F> {
    Lglda(ModelEstimate<F>),
    Baseline(BaselineEstimate<F>),
}

impl<F: Real> Model<F> {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Lglda(_) => ModelKind::Lglda,
            Model::Baseline(b) => b.kind,
        }
    }

    fn inner(&self) -> &dyn TopicModel<F> {
        match self {
            Model::Lglda(m) => m,
            Model::Baseline(m) => m,
        }
    }
}

impl<F: Real> TopicModel<F> for Model<F> {
    fn num_topics(&self) -> usize {
        self.inner().num_topics()
    }

    fn num_words(&self) -> usize {
        self.inner().num_words()
    }

    fn location_topics(&self) -> &[Vec<F>] {
        self.inner().location_topics()
    }

    fn topic_words(&self) -> &[Vec<F>] {
        self.inner().topic_words()
    }

    fn token_probabilities(&self, location: usize, tokens: &[u32]) -> Vec<F> {
        self.inner().token_probabilities(location, tokens)
    }
}
