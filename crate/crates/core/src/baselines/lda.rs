use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::lglda::Hyperparameters;
use crate::sampling::sample_index;
use crate::scalar::Real;

/// What plays the role of the "document" whose topic mixture is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grouping {
    Document,
    Location,
}

/// Collapsed Gibbs state of plain LDA where each token's topic is drawn from
/// its group's topic distribution. With [`Grouping::Location`] this is
/// LocalLDA.
#[derive(Debug, Clone)]
pub struct GroupedLdaState {
    topics: usize,
    words: usize,
    alpha: f64,
    beta: f64,
    token_word: Vec<u32>,
    token_group: Vec<u32>,
    topic: Vec<u32>,
    group_counts: Vec<u32>,
    group_totals: Vec<u32>,
    word_counts: Vec<u32>,
    word_totals: Vec<u32>,
    rng: ChaCha8Rng,
}

impl GroupedLdaState {
    pub fn init(corpus: &Corpus, hp: &Hyperparameters, grouping: Grouping) -> Result<Self> {
        hp.validate()?;
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus { min_tokens: 1 });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
        let topics: Vec<usize> = (0..corpus.token_count()).map(|_| rng.random_range(0..hp.topics)).collect();
        let mut state = Self::empty(corpus, hp, grouping, rng);
        for (i, &k) in topics.iter().enumerate() {
            state.assign(i, k);
        }
        Ok(state)
    }

    pub fn from_assignments(
        corpus: &Corpus,
        hp: &Hyperparameters,
        grouping: Grouping,
        topics: &[usize],
    ) -> Result<Self> {
        hp.validate()?;
        if topics.len() != corpus.token_count() || topics.iter().any(|&k| k >= hp.topics) {
            return Err(Error::InvalidHyperparameters("assignments do not match corpus".into()));
        }
        let mut state = Self::empty(corpus, hp, grouping, ChaCha8Rng::seed_from_u64(hp.seed));
        for (i, &k) in topics.iter().enumerate() {
            state.assign(i, k);
        }
        Ok(state)
    }

    fn empty(corpus: &Corpus, hp: &Hyperparameters, grouping: Grouping, rng: ChaCha8Rng) -> Self {
        let groups = match grouping {
            Grouping::Document => corpus.documents().len(),
            Grouping::Location => corpus.num_locations(),
        };
        let mut token_word = Vec::new();
        let mut token_group = Vec::new();
        for (di, doc) in corpus.documents().iter().enumerate() {
            let g = match grouping {
                Grouping::Document => di,
                Grouping::Location => doc.location,
            };
            token_word.extend_from_slice(&doc.tokens);
            token_group.extend(std::iter::repeat_n(g as u32, doc.len()));
        }
        let (k, w) = (hp.topics, corpus.num_words());
        Self {
            topics: k,
            words: w,
            alpha: hp.alpha_local,
            beta: hp.beta,
            topic: vec![0; token_word.len()],
            token_word,
            token_group,
            group_counts: vec![0; groups * k],
            group_totals: vec![0; groups],
            word_counts: vec![0; w * k],
            word_totals: vec![0; k],
            rng,
        }
    }

    pub fn num_tokens(&self) -> usize {
        self.token_word.len()
    }

    pub fn topics(&self) -> &[u32] {
        &self.topic
    }

    fn update(&mut self, token: usize, k: usize, add: bool) {
        let g = self.token_group[token] as usize;
        let w = self.token_word[token] as usize;
        let kk = self.topics;
        for c in [
            &mut self.group_counts[g * kk + k],
            &mut self.group_totals[g],
            &mut self.word_counts[w * kk + k],
            &mut self.word_totals[k],
        ] {
            if add {
                *c += 1;
            } else {
                *c = c.checked_sub(1).expect("count underflow: token was not assigned");
            }
        }
    }

    pub fn unassign(&mut self, token: usize) {
        let k = self.topic[token] as usize;
        self.update(token, k, false);
    }

    pub fn assign(&mut self, token: usize, k: usize) {
        self.topic[token] = k as u32;
        self.update(token, k, true);
    }

    /// Unnormalized `p(z_i = k | rest)`; `token` must be unassigned.
    pub fn conditional<F: Real>(&self, token: usize, out: &mut [F]) {
        let kk = self.topics;
        let g = self.token_group[token] as usize;
        let w = self.token_word[token] as usize;
        let alpha = F::lit(self.alpha);
        let beta = F::lit(self.beta);
        let w_beta = F::lit(self.beta * self.words as f64);
        let group = &self.group_counts[g * kk..(g + 1) * kk];
        let word = &self.word_counts[w * kk..(w + 1) * kk];
        let group_denom = F::count(self.group_totals[g]) + F::from_len(kk) * alpha;
        for k in 0..kk {
            out[k] = (F::count(group[k]) + alpha) / group_denom * (F::count(word[k]) + beta)
                / (F::count(self.word_totals[k]) + w_beta);
        }
    }

    pub fn conditional_excluding<F: Real>(&mut self, token: usize) -> Vec<F> {
        let k = self.topic[token] as usize;
        self.unassign(token);
        let mut out = vec![F::zero(); self.topics];
        self.conditional(token, &mut out);
        self.assign(token, k);
        out
    }

    pub fn sweep<F: Real>(&mut self) {
        let mut weights = vec![F::zero(); self.topics];
        for i in 0..self.num_tokens() {
            self.unassign(i);
            self.conditional(i, &mut weights);
            let u = F::lit(self.rng.random::<f64>());
            let k = sample_index(&weights, u);
            self.assign(i, k);
        }
    }

    /// `(n_gk + alpha) / (n_g + K alpha)` per group.
    pub fn group_topics<F: Real>(&self) -> Vec<Vec<F>> {
        let kk = self.topics;
        let alpha = F::lit(self.alpha);
        self.group_totals
            .iter()
            .enumerate()
            .map(|(g, &total)| {
                let denom = F::count(total) + F::from_len(kk) * alpha;
                self.group_counts[g * kk..(g + 1) * kk].iter().map(|&c| (F::count(c) + alpha) / denom).collect()
            })
            .collect()
    }

    /// `(n_wk + beta) / (n_k + W beta)`, indexed `[k][w]`.
    pub fn topic_words<F: Real>(&self) -> Vec<Vec<F>> {
        let kk = self.topics;
        let beta = F::lit(self.beta);
        let w_beta = F::lit(self.beta * self.words as f64);
        (0..kk)
            .map(|k| {
                let denom = F::count(self.word_totals[k]) + w_beta;
                (0..self.words).map(|w| (F::count(self.word_counts[w * kk + k]) + beta) / denom).collect()
            })
            .collect()
    }

    /// Sum of each count family: `(groups, words)`.
    pub fn family_totals(&self) -> (u64, u64) {
        let sum = |v: &[u32]| v.iter().map(|&c| c as u64).sum::<u64>();
        (sum(&self.group_counts), sum(&self.word_counts))
    }
}
