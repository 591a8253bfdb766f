//! Comparison methods: LDA with location aggregation, LocalLDA, and TF-IDF
//! with K-means over location vectors.

mod lda;
mod tfidf;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::Result;
use crate::lglda::Hyperparameters;
use crate::model::{ModelKind, TopicModel};
use crate::scalar::Real;

pub use lda::{GroupedLdaState, Grouping};
pub use tfidf::{kmeans, tfidf_location_vectors, KMeansResult};

/// Location-topic and topic-word distributions of a baseline, in the same
/// shape the local-global model exposes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct BaselineEstimate<F> {
    pub kind: ModelKind,
    pub location_topics: Vec<Vec<F>>,
    pub topic_words: Vec<Vec<F>>,
}

impl<F: Real> TopicModel<F> for BaselineEstimate<F> {
    fn num_topics(&self) -> usize {
        self.topic_words.len()
    }

    fn num_words(&self) -> usize {
        self.topic_words.first().map_or(0, Vec::len)
    }

    fn location_topics(&self) -> &[Vec<F>] {
        &self.location_topics
    }

    fn topic_words(&self) -> &[Vec<F>] {
        &self.topic_words
    }

    fn token_probabilities(&self, location: usize, tokens: &[u32]) -> Vec<F> {
        let theta = &self.location_topics[location];
        tokens.iter().map(|&w| theta.iter().zip(&self.topic_words).map(|(&t, row)| t * row[w as usize]).sum()).collect()
    }
}

/// Standard LDA over documents; a location's topics are the mean of its
/// documents' smoothed topic distributions `(n_dk + alpha) / (N_d + K alpha)`.
///
/// Uses `topics`, `alpha_local` (as alpha), `beta`, `iterations` and `seed`.
pub fn train_lda<F: Real>(corpus: &Corpus, hp: &Hyperparameters) -> Result<BaselineEstimate<F>> {
    let mut state = GroupedLdaState::init(corpus, hp, Grouping::Document)?;
    for _ in 0..hp.iterations {
        state.sweep::<F>();
    }
    let doc_topics = state.group_topics::<F>();
    let k = hp.topics;
    let mut location_topics = vec![vec![F::zero(); k]; corpus.num_locations()];
    let mut docs_at = vec![0usize; corpus.num_locations()];
    for (doc, theta) in corpus.documents().iter().zip(&doc_topics) {
        docs_at[doc.location] += 1;
        for (acc, &p) in location_topics[doc.location].iter_mut().zip(theta) {
            *acc = *acc + p;
        }
    }
    for (row, &n) in location_topics.iter_mut().zip(&docs_at) {
        if n == 0 {
            row.fill(F::one() / F::from_len(k));
        } else {
            let n = F::from_len(n);
            row.iter_mut().for_each(|x| *x = *x / n);
        }
    }
    Ok(BaselineEstimate { kind: ModelKind::Lda, location_topics, topic_words: state.topic_words() })
}

/// LDA whose "documents" are locations: one topic distribution per location,
/// no locality flag and no document factor.
pub fn train_local_lda<F: Real>(corpus: &Corpus, hp: &Hyperparameters) -> Result<BaselineEstimate<F>> {
    let mut state = GroupedLdaState::init(corpus, hp, Grouping::Location)?;
    for _ in 0..hp.iterations {
        state.sweep::<F>();
    }
    Ok(BaselineEstimate {
        kind: ModelKind::LocalLda,
        location_topics: state.group_topics(),
        topic_words: state.topic_words(),
    })
}

pub use tfidf::train_tfidf_kmeans;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_records;

    fn corpus(text: &str) -> Corpus {
        Corpus::from_records(parse_records(text.as_bytes()).unwrap(), 1).unwrap().0
    }

    fn hp(k: usize, iterations: usize) -> Hyperparameters {
        Hyperparameters { topics: k, iterations, seed: 11, ..Default::default() }
    }

    #[test]
    fn single_document_location_equals_its_theta() {
        let c = corpus("a\td\tx y y z\n");
        let hp = hp(3, 5);
        let est = train_lda::<f64>(&c, &hp).unwrap();
        let mut state = GroupedLdaState::init(&c, &hp, Grouping::Document).unwrap();
        for _ in 0..5 {
            state.sweep::<f64>();
        }
        assert_eq!(est.location_topics[0], state.group_topics::<f64>()[0]);
    }

    #[test]
    fn rows_sum_to_one() {
        let c = corpus("a\td1\tx y y z\nb\td2\tz z q\nb\td3\tx q\n");
        for est in [train_lda::<f64>(&c, &hp(3, 20)).unwrap(), train_local_lda::<f64>(&c, &hp(3, 20)).unwrap()] {
            for row in est.location_topics.iter().chain(&est.topic_words) {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn lda_separates_disjoint_vocabularies() {
        let mut text = String::new();
        for i in 0..30 {
            text.push_str(&format!("a\tda{i:02}\tapple banana cherry apple banana cherry\n"));
            text.push_str(&format!("b\tdb{i:02}\tx1 x2 x3 x1 x2 x3\n"));
        }
        let c = corpus(&text);
        let est = train_lda::<f64>(&c, &hp(2, 200)).unwrap();
        let fruit: Vec<u32> = ["apple", "banana", "cherry"].iter().map(|w| c.vocabulary().id(w).unwrap()).collect();
        let mut halves = Vec::new();
        for row in &est.topic_words {
            let mut ids: Vec<u32> = (0..row.len() as u32).collect();
            ids.sort_by(|&a, &b| row[b as usize].total_cmp(&row[a as usize]));
            let top: Vec<u32> = ids[..3].to_vec();
            let is_fruit = top.iter().all(|w| fruit.contains(w));
            let is_x = top.iter().all(|w| !fruit.contains(w));
            assert!(is_fruit || is_x, "mixed topic {top:?}");
            halves.push(is_fruit);
        }
        assert_ne!(halves[0], halves[1]);
    }

    #[test]
    fn local_lda_is_deterministic() {
        let c = corpus("a\td1\tx y y z\nb\td2\tz z q\nb\td3\tx q\n");
        assert_eq!(train_local_lda::<f64>(&c, &hp(2, 30)).unwrap(), train_local_lda::<f64>(&c, &hp(2, 30)).unwrap());
    }

    #[test]
    fn baseline_token_probabilities() {
        let est = BaselineEstimate {
            kind: ModelKind::LocalLda,
            location_topics: vec![vec![0.25, 0.75]],
            topic_words: vec![vec![1.0, 0.0], vec![0.5, 0.5]],
        };
        assert_eq!(est.token_probabilities(0, &[0, 1]), vec![0.625, 0.375]);
    }
}
