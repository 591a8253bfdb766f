//! Forward sampler for the local-global generative story, used as a
//! recovery oracle and as demo data.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Record};
use crate::error::{Error, Result};
use crate::lglda::Locality;
use crate::sampling::{derive_seed, sample_index};

/// Ground-truth parameters of a synthetic corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub topics: usize,
    pub words: usize,
    pub locations: usize,
    pub docs_per_location: usize,
    pub tokens_per_doc: usize,
    /// Expected ratio of local to global tokens the spec was built for.
    pub lambda: f64,
    pub seed: u64,
    pub theta_local: Vec<Vec<f64>>,
    pub theta_global: Vec<f64>,
    pub phi: Vec<Vec<f64>>,
    /// Probability that a token of document `d` is local; documents are
    /// numbered location-major.
    pub doc_locality: Vec<f64>,
}

/// Latent assignments behind a generated corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    /// `topics[d][i]` and `localities[d][i]` for token `i` of document `d`,
    /// in corpus document order.
    pub topics: Vec<Vec<usize>>,
    pub localities: Vec<Vec<Locality>>,
    /// Spec word id of each corpus vocabulary id (the corpus vocabulary holds
    /// only words that were generated).
    pub word_ids: Vec<usize>,
}

fn sample_dirichlet(rng: &mut ChaCha8Rng, alpha: f64, n: usize) -> Vec<f64> {
    let gamma = Gamma::new(alpha, 1.0).expect("positive shape");
    loop {
        let draws: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 {
            return draws.into_iter().map(|x| x / total).collect();
        }
    }
}

fn pad(n: usize) -> usize {
    n.saturating_sub(1).to_string().len()
}

/// Default oracle spec: 6 topics over 600 words, 12 locations with 80
/// twelve-token documents each.
///
/// Topics 0..4 are local: location `l` puts 0.7 of its local mass on topic
/// `l % 4` and spreads the rest with a Dirichlet(0.3) draw. Topics 4 and 5
/// are global with weights 0.85 and 0.15. Topic-word rows are
/// Dirichlet(0.05). Each document's local rate is drawn from the binomial
/// prior `Beta(gamma_l, gamma_g) = Beta(0.5, 0.5)`, whose mean 0.5 matches
/// `lambda = 1`.
pub fn default_spec(seed: u64) -> SyntheticSpec {
    const K: usize = 6;
    const LOCAL: usize = 4;
    const L: usize = 12;
    const W: usize = 600;
    const DOCS: usize = 80;
    let lambda = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let phi = (0..K).map(|_| sample_dirichlet(&mut rng, 0.05, W)).collect();
    let theta_local = (0..L)
        .map(|l| {
            let spread = sample_dirichlet(&mut rng, 0.3, LOCAL);
            let mut row = vec![0.0; K];
            for (k, s) in spread.into_iter().enumerate() {
                row[k] = 0.3 * s;
            }
            row[l % LOCAL] += 0.7;
            row
        })
        .collect();
    // Corpus-wide global tokens are i.i.d. draws from one mixture, so its split
    // into topics cannot be identified from data. One dominant background
    // topic keeps the recoverable structure close to the generating one.
    let mut theta_global = vec![0.0; K];
    theta_global[LOCAL] = 0.85;
    theta_global[LOCAL + 1] = 0.15;
    let prior = Beta::new(lambda / (lambda + 1.0), 1.0 / (lambda + 1.0)).expect("valid beta");
    let doc_locality = (0..L * DOCS).map(|_| prior.sample(&mut rng)).collect();

    SyntheticSpec {
        topics: K,
        words: W,
        locations: L,
        docs_per_location: DOCS,
        tokens_per_doc: 12,
        lambda,
        seed,
        theta_local,
        theta_global,
        phi,
        doc_locality,
    }
}

impl SyntheticSpec {
    pub fn num_documents(&self) -> usize {
        self.locations * self.docs_per_location
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if [self.topics, self.words, self.locations, self.docs_per_location, self.tokens_per_doc].contains(&0) {
            return bad("all dimensions must be >= 1".into());
        }
        let check_row = |name: &str, row: &[f64], len: usize| -> Result<()> {
            if row.len() != len {
                return Err(Error::InvalidSpec(format!("{name} has length {} (expected {len})", row.len())));
            }
            if row.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
                return Err(Error::InvalidSpec(format!("{name} has a negative or non-finite entry")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidSpec(format!("{name} sums to {s}")));
            }
            Ok(())
        };
        if self.theta_local.len() != self.locations {
            return bad("theta_local needs one row per location".into());
        }
        for (l, row) in self.theta_local.iter().enumerate() {
            check_row(&format!("theta_local[{l}]"), row, self.topics)?;
        }
        check_row("theta_global", &self.theta_global, self.topics)?;
        if self.phi.len() != self.topics {
            return bad("phi needs one row per topic".into());
        }
        for (k, row) in self.phi.iter().enumerate() {
            check_row(&format!("phi[{k}]"), row, self.words)?;
        }
        if self.doc_locality.len() != self.num_documents() {
            return bad(format!(
                "doc_locality has {} entries for {} documents",
                self.doc_locality.len(),
                self.num_documents()
            ));
        }
        if self.doc_locality.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return bad("doc_locality entries must lie in [0, 1]".into());
        }
        Ok(())
    }

    pub fn word_name(&self, w: usize) -> String {
        format!("w{w:0width$}", width = pad(self.words))
    }

    pub fn location_name(&self, l: usize) -> String {
        format!("loc{l:0width$}", width = pad(self.locations))
    }

    pub fn doc_name(&self, d: usize) -> String {
        format!("d{d:0width$}", width = pad(self.num_documents()))
    }
}

/// Samples a corpus. For each token: `e ~ Bernoulli(doc_locality[d])`, then
/// `z` from `theta_local[l]` or `theta_global`, then `w ~ phi[z]`. Each
/// document draws from its own stream derived from `(seed, d)`.
pub fn generate(spec: &SyntheticSpec) -> Result<(Corpus, GroundTruth)> {
    spec.validate()?;
    let mut records = Vec::with_capacity(spec.num_documents());
    let mut topics = Vec::with_capacity(spec.num_documents());
    let mut localities = Vec::with_capacity(spec.num_documents());
    for l in 0..spec.locations {
        for j in 0..spec.docs_per_location {
            let d = l * spec.docs_per_location + j;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, d as u64));
            let mut words = Vec::with_capacity(spec.tokens_per_doc);
            let mut zs = Vec::with_capacity(spec.tokens_per_doc);
            let mut es = Vec::with_capacity(spec.tokens_per_doc);
            for _ in 0..spec.tokens_per_doc {
                let e = if rng.random::<f64>() < spec.doc_locality[d] { Locality::Local } else { Locality::Global };
                let theta = match e {
                    Locality::Local => &spec.theta_local[l],
                    Locality::Global => &spec.theta_global,
                };
                let z = sample_index(theta, rng.random::<f64>());
                let w = sample_index(&spec.phi[z], rng.random::<f64>());
                words.push(spec.word_name(w));
                zs.push(z);
                es.push(e);
            }
            records.push(Record { location: spec.location_name(l), doc_id: spec.doc_name(d), tokens: words });
            topics.push(zs);
            localities.push(es);
        }
    }
    let (corpus, _) = Corpus::from_records(records, 1)?;
    let word_ids = corpus
        .vocabulary()
        .words()
        .iter()
        .map(|w| w[1..].parse::<usize>().expect("generated word names are numeric"))
        .collect();
    Ok((corpus, GroundTruth { topics, localities, word_ids }))
}

impl GroundTruth {
    /// One line per token: `doc_index TAB token_index TAB z TAB e`, where
    /// `e` is 1 for local and 0 for global.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (d, (zs, es)) in self.topics.iter().zip(&self.localities).enumerate() {
            for (i, (z, e)) in zs.iter().zip(es).enumerate() {
                let flag = u8::from(*e == Locality::Local);
                writeln!(out, "{d}\t{i}\t{z}\t{flag}")?;
            }
        }
        Ok(())
    }

    /// Ground-truth `phi` re-indexed to the corpus vocabulary.
    pub fn phi_in_corpus_vocabulary(&self, spec: &SyntheticSpec) -> Vec<Vec<f64>> {
        spec.phi.iter().map(|row| self.word_ids.iter().map(|&w| row[w]).collect()).collect()
    }
}

/// Cosine similarity between two vectors.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Greedy one-to-one matching of `estimated` rows to `truth` rows by cosine
/// similarity: repeatedly take the best remaining pair. Returns the mean
/// cosine over the matched truth rows and the matching `truth -> estimated`.
pub fn greedy_alignment(truth: &[Vec<f64>], estimated: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, t) in truth.iter().enumerate() {
        for (j, e) in estimated.iter().enumerate() {
            pairs.push((cosine(t, e), i, j));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut matched = vec![usize::MAX; truth.len()];
    let mut used = vec![false; estimated.len()];
    let mut total = 0.0;
    for (c, i, j) in pairs {
        if matched[i] == usize::MAX && !used[j] {
            matched[i] = j;
            used[j] = true;
            total += c;
        }
    }
    let n = matched.iter().filter(|&&m| m != usize::MAX).count().max(1);
    (total / n as f64, matched)
}
