//! Evaluation metrics: perplexity, topic and location entropies, mean
//! pairwise symmetric KL divergence between topics, and top words.
//!
//! All logarithms are natural, so entropies and divergences are in nats.

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::model::TopicModel;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct Perplexity<F> {
    pub value: F,
    /// Tokens that entered the average.
    pub tokens: usize,
    /// Tokens skipped as out of vocabulary.
    pub oov: usize,
}

/// `exp(-sum_d log p(w_d) / sum_d N_d)` over `eval`.
///
/// Tokens whose id is outside the model's vocabulary, or for which `known`
/// is false, are skipped and counted as OOV. A token with zero probability
/// makes the result infinite.
pub fn perplexity<F: Real, M: TopicModel<F> + ?Sized>(
    model: &M,
    eval: &Corpus,
    known: Option<&[bool]>,
) -> Result<Perplexity<F>> {
    let w = model.num_words();
    let mut log_sum = F::zero();
    let mut tokens = 0usize;
    let mut oov = 0usize;
    let mut kept = Vec::new();
    for doc in eval.documents() {
        kept.clear();
        for &t in &doc.tokens {
            let ok = (t as usize) < w && known.is_none_or(|k| k.get(t as usize).copied().unwrap_or(false));
            if ok {
                kept.push(t);
            } else {
                oov += 1;
            }
        }
        if kept.is_empty() {
            continue;
        }
        for p in model.token_probabilities(doc.location, &kept) {
            log_sum = log_sum + p.ln();
        }
        tokens += kept.len();
    }
    if tokens == 0 {
        return Err(Error::Metric("evaluation corpus has no in-vocabulary tokens".into()));
    }
    Ok(Perplexity { value: (-log_sum / F::from_len(tokens)).exp(), tokens, oov })
}

/// Shannon entropy `-sum p ln p`, with `0 ln 0 = 0`.
pub fn entropy<F: Real>(p: &[F]) -> F {
    p.iter().filter(|&&x| x > F::zero()).map(|&x| -x * x.ln()).sum()
}

/// Mean entropy of the per-location topic distributions.
pub fn topic_entropy<F: Real>(location_topics: &[Vec<F>]) -> F {
    if location_topics.is_empty() {
        return F::zero();
    }
    location_topics.iter().map(|row| entropy(row)).sum::<F>() / F::from_len(location_topics.len())
}

/// Mean over topics of the entropy of each topic's distribution over
/// locations, obtained by normalizing the topic's column of
/// `location_topics`.
pub fn location_entropy<F: Real>(location_topics: &[Vec<F>]) -> Result<F> {
    let k = location_topics.first().map_or(0, Vec::len);
    if k == 0 {
        return Err(Error::Metric("no topics".into()));
    }
    let mut total = F::zero();
    let mut column = vec![F::zero(); location_topics.len()];
    for t in 0..k {
        for (c, row) in column.iter_mut().zip(location_topics) {
            *c = row[t];
        }
        let mass: F = column.iter().copied().sum();
        if mass <= F::zero() {
            return Err(Error::Metric(format!("topic {t} has zero mass over locations")));
        }
        column.iter_mut().for_each(|c| *c = *c / mass);
        total = total + entropy(&column);
    }
    Ok(total / F::from_len(k))
}

/// `KL(p || q)`; infinite if `q` is zero where `p` is not.
pub fn kl_divergence<F: Real>(p: &[F], q: &[F]) -> F {
    p.iter()
        .zip(q)
        .filter(|(&a, _)| a > F::zero())
        .map(|(&a, &b)| if b > F::zero() { a * (a / b).ln() } else { F::infinity() })
        .sum()
}

pub fn symmetric_kl<F: Real>(p: &[F], q: &[F]) -> F {
    (kl_divergence(p, q) + kl_divergence(q, p)) / F::lit(2.0)
}

/// Mean symmetric KL over all unordered pairs of topics.
pub fn mean_pairwise_kl<F: Real>(topic_words: &[Vec<F>]) -> Result<F> {
    let k = topic_words.len();
    if k < 2 {
        return Err(Error::Metric(format!("need at least 2 topics, got {k}")));
    }
    let mut total = F::zero();
    for i in 0..k {
        for j in i + 1..k {
            total = total + symmetric_kl(&topic_words[i], &topic_words[j]);
        }
    }
    Ok(total / F::from_len(k * (k - 1) / 2))
}

/// The `n` highest-weight word ids of each topic, ties broken by ascending
/// id. `n` is truncated to the vocabulary size.
pub fn top_words<F: Real>(topic_words: &[Vec<F>], n: usize) -> Vec<Vec<(u32, F)>> {
    topic_words
        .iter()
        .map(|row| {
            let mut ids: Vec<u32> = (0..row.len() as u32).collect();
            ids.sort_by(|&a, &b| {
                row[b as usize].partial_cmp(&row[a as usize]).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
            });
            ids.truncate(n);
            ids.into_iter().map(|w| (w, row[w as usize])).collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct MetricsReport<F> {
    pub perplexity: F,
    pub tokens: usize,
    pub oov: usize,
    pub topic_entropy: F,
    pub location_entropy: F,
    pub mean_pairwise_kl: F,
    pub top_words: Vec<Vec<(String, F)>>,
}

/// All four metrics plus the top `top_n` words per topic. `words` maps ids
/// to strings for the top-word lists.
pub fn evaluate<F: Real, M: TopicModel<F> + ?Sized>(
    model: &M,
    eval: &Corpus,
    known: Option<&[bool]>,
    words: &[String],
    top_n: usize,
) -> Result<MetricsReport<F>> {
    let ppl = perplexity(model, eval, known)?;
    Ok(MetricsReport {
        perplexity: ppl.value,
        tokens: ppl.tokens,
        oov: ppl.oov,
        topic_entropy: topic_entropy(model.location_topics()),
        location_entropy: location_entropy(model.location_topics())?,
        mean_pairwise_kl: mean_pairwise_kl(model.topic_words())?,
        top_words: top_words(model.topic_words(), top_n)
            .into_iter()
            .map(|list| list.into_iter().map(|(w, p)| (words[w as usize].clone(), p)).collect())
            .collect(),
    })
}

impl<F: Real> MetricsReport<F> {
    /// Flat `key=value` lines.
    pub fn to_key_values(&self) -> String {
        format!(
            "perplexity={}\ntokens={}\noov={}\ntopic_entropy={}\nlocation_entropy={}\nmean_pairwise_kl={}\n",
            self.perplexity, self.tokens, self.oov, self.topic_entropy, self.location_entropy, self.mean_pairwise_kl
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::BaselineEstimate;
    use crate::corpus::parse_records;
    use crate::model::ModelKind;

    fn ln(x: f64) -> f64 {
        x.ln()
    }

    fn corpus(text: &str) -> Corpus {
        Corpus::from_records(parse_records(text.as_bytes()).unwrap(), 1).unwrap().0
    }

    fn fixed(location_topics: Vec<Vec<f64>>, topic_words: Vec<Vec<f64>>) -> BaselineEstimate<f64> {
        BaselineEstimate { kind: ModelKind::LocalLda, location_topics, topic_words }
    }

    #[test]
    fn uniform_model_perplexity_is_vocabulary_size() {
        let c = corpus("a\td1\tw0 w1 w2 w3\nb\td2\tw4 w4 w0\n");
        let w = c.num_words();
        let m = fixed(vec![vec![0.5, 0.5]; 2], vec![vec![1.0 / w as f64; w]; 2]);
        let p = perplexity(&m, &c, None).unwrap();
        assert!((p.value - w as f64).abs() < 1e-9);
        assert_eq!((p.tokens, p.oov), (7, 0));
    }

    #[test]
    fn perfect_model_perplexity_is_one() {
        let c = corpus("a\td1\tx x x\n");
        let m = fixed(vec![vec![1.0, 0.0]], vec![vec![1.0], vec![1.0]]);
        assert_eq!(perplexity(&m, &c, None).unwrap().value, 1.0);
    }

    #[test]
    fn two_token_perplexity_by_hand() {
        // p(x) = 0.5, p(y) = 0.125 under a single topic over {x, y, z}.
        let c = corpus("a\td\tx y\nb\td2\tz\n");
        let row = vec![0.5, 0.125, 0.375];
        let m = fixed(vec![vec![1.0, 0.0]; 2], vec![row.clone(), row]);
        let first =
            Corpus::from_parts(c.vocabulary().clone(), c.location_names().to_vec(), c.documents()[..1].to_vec());
        let p = perplexity(&m, &first, None).unwrap().value;
        let expected = (-(ln(0.5) + ln(0.125)) / 2.0).exp();
        assert!((p - expected).abs() < 1e-12);
        // geometric mean of 1/p: (2 * 8)^(1/2)
        assert!((p - 4.0).abs() < 1e-12);
    }

    #[test]
    fn oov_tokens_are_skipped() {
        let c = corpus("a\td\tx y y\n");
        let m = fixed(vec![vec![1.0, 0.0]], vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        let known = [true, false];
        let p = perplexity(&m, &c, Some(&known)).unwrap();
        assert_eq!((p.tokens, p.oov), (1, 2));
        assert!(perplexity(&m, &c, Some(&[false, false])).is_err());
    }

    #[test]
    fn entropies_of_uniform_and_one_hot_rows() {
        let k = 20;
        let uniform = vec![vec![1.0 / k as f64; k]; 5];
        assert!((topic_entropy(&uniform) - (k as f64).ln()).abs() < 1e-9);
        let one_hot: Vec<Vec<f64>> = (0..4).map(|l| (0..4).map(|t| if t == l { 1.0 } else { 0.0 }).collect()).collect();
        assert_eq!(topic_entropy(&one_hot), 0.0);
        assert_eq!(location_entropy(&one_hot).unwrap(), 0.0);
        assert!((location_entropy(&uniform).unwrap() - 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn topic_entropy_hand_average() {
        let rows = vec![vec![1.0, 0.0], vec![0.5, 0.5]];
        assert!((topic_entropy(&rows) - 2f64.ln() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn location_entropy_of_skewed_topic() {
        // Topic 0 has mass (0.75, 0.25); topic 1 is concentrated.
        let rows = vec![vec![0.6, 0.4], vec![0.2, 0.0]];
        let h0 = -(0.75 * ln(0.75) + 0.25 * ln(0.25));
        assert!((h0 - 0.5623).abs() < 1e-4);
        assert!((location_entropy(&rows).unwrap() - h0 / 2.0).abs() < 1e-12);
        assert!(location_entropy(&[vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn symmetric_kl_values() {
        let same = vec![vec![0.3, 0.7]; 3];
        assert_eq!(mean_pairwise_kl(&same).unwrap(), 0.0);
        let pair = vec![vec![0.9, 0.1], vec![0.1, 0.9]];
        let v = mean_pairwise_kl(&pair).unwrap();
        assert!((v - 0.8 * 9f64.ln()).abs() < 1e-9);
        assert!((v - 1.7578).abs() < 1e-4);
        assert!(mean_pairwise_kl(&pair[..1]).is_err());
    }

    #[test]
    fn duplicate_pair_pulls_mean_below_max() {
        let rows: Vec<Vec<f64>> = vec![vec![0.9, 0.1], vec![0.9, 0.1], vec![0.1, 0.9]];
        let max = symmetric_kl(&rows[0], &rows[2]);
        let mean = mean_pairwise_kl(&rows).unwrap();
        assert!((mean - 2.0 * max / 3.0).abs() < 1e-12);
        assert!(mean > 0.0 && mean < max);
    }

    #[test]
    fn zero_support_makes_kl_infinite() {
        assert!(kl_divergence::<f64>(&[0.5, 0.5], &[1.0, 0.0]).is_infinite());
        assert_eq!(kl_divergence(&[1.0, 0.0], &[0.5, 0.5]), 2f64.ln());
    }

    #[test]
    fn top_words_ordering() {
        let rows = vec![vec![0.0, 1.0, 0.0, 0.0], vec![0.1, 0.4, 0.1, 0.4]];
        let top = top_words(&rows, 3);
        assert_eq!(top[0].iter().map(|p| p.0).collect::<Vec<_>>(), vec![1, 0, 2]);
        assert_eq!(top[1].iter().map(|p| p.0).collect::<Vec<_>>(), vec![1, 3, 0]);
        assert_eq!(top_words(&rows, 10)[0].len(), 4);
    }

    #[test]
    fn crafted_ranking() {
        let row = vec![0.05, 0.3, 0.15, 0.2, 0.1, 0.2];
        // independent ranking: repeatedly take the max, lowest id first
        let mut remaining: Vec<usize> = (0..row.len()).collect();
        let mut expected = Vec::new();
        while !remaining.is_empty() {
            let mut best = remaining[0];
            for &i in &remaining {
                if row[i] > row[best] {
                    best = i;
                }
            }
            expected.push(best as u32);
            remaining.retain(|&i| i != best);
        }
        let got: Vec<u32> = top_words(&[row], 6)[0].iter().map(|p| p.0).collect();
        assert_eq!(got, expected);
    }
}
