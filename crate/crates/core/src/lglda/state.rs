use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{block_weight, GlobalCounts, Hyperparameters, Locality, LocalityMode, ModelEstimate, PhiMode};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::sampling::sample_index;
use crate::scalar::Real;

/// Sampler state: per-token assignments plus every count matrix the
/// collapsed conditional reads.
///
/// All matrices are flat, row-major:
///
/// * `doc_counts[d][e][k]`, with `doc_topic_totals[d][k]` summed over `e`
/// * `local_counts[l][k]`, `local_totals[l]`
/// * `global_counts[g][k]`, `global_totals[g]` (`g` ranges over one group or
///   over locations, per [`GlobalCounts`])
/// * `word_counts[p][w][k]`, `word_totals[p][k]` (`p` ranges over one shared
///   group or over both localities, per [`PhiMode`])
#[derive(Debug, Clone)]
pub struct LgldaState {
    hp: Hyperparameters,
    topics: usize,
    words: usize,
    locations: usize,

    token_word: Vec<u32>,
    token_doc: Vec<u32>,
    doc_location: Vec<u32>,

    topic: Vec<u32>,
    locality: Vec<Locality>,

    doc_counts: Vec<u32>,
    doc_topic_totals: Vec<u32>,
    local_counts: Vec<u32>,
    local_totals: Vec<u32>,
    global_counts: Vec<u32>,
    global_totals: Vec<u32>,
    word_counts: Vec<u32>,
    word_totals: Vec<u32>,

    rng: ChaCha8Rng,
}

impl LgldaState {
    /// Assigns every token a uniformly random `(e, z)` drawn from `hp.seed`.
    pub fn init(corpus: &Corpus, hp: &Hyperparameters) -> Result<Self> {
        hp.validate()?;
        if corpus.is_empty() {
            return Err(Error::EmptyCorpus { min_tokens: 1 });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
        let n = corpus.token_count();
        let mut topics = Vec::with_capacity(n);
        let mut localities = Vec::with_capacity(n);
        for _ in 0..n {
            let e = match hp.locality {
                LocalityMode::AllLocal => Locality::Local,
                LocalityMode::Sampled => {
                    if rng.random::<bool>() {
                        Locality::Local
                    } else {
                        Locality::Global
                    }
                }
            };
            localities.push(e);
            topics.push(rng.random_range(0..hp.topics) as u32);
        }
        let mut state = Self::empty(corpus, hp, rng);
        for i in 0..n {
            state.assign(i, localities[i], topics[i] as usize);
        }
        Ok(state)
    }

    /// Builds a state with the given per-token assignments, in corpus token
    /// order. The RNG is seeded from `hp.seed`.
    pub fn from_assignments(
        corpus: &Corpus,
        hp: &Hyperparameters,
        localities: &[Locality],
        topics: &[usize],
    ) -> Result<Self> {
        hp.validate()?;
        let n = corpus.token_count();
        if localities.len() != n || topics.len() != n {
            return Err(Error::InvalidHyperparameters(format!(
                "expected {n} assignments, got {} localities and {} topics",
                localities.len(),
                topics.len()
            )));
        }
        if let Some(&k) = topics.iter().find(|&&k| k >= hp.topics) {
            return Err(Error::InvalidHyperparameters(format!("topic {k} out of range")));
        }
        let mut state = Self::empty(corpus, hp, ChaCha8Rng::seed_from_u64(hp.seed));
        for i in 0..n {
            state.assign(i, localities[i], topics[i]);
        }
        Ok(state)
    }

    fn empty(corpus: &Corpus, hp: &Hyperparameters, rng: ChaCha8Rng) -> Self {
        let k = hp.topics;
        let w = corpus.num_words();
        let l = corpus.num_locations();
        let d = corpus.documents().len();
        let n = corpus.token_count();
        let mut token_word = Vec::with_capacity(n);
        let mut token_doc = Vec::with_capacity(n);
        for (di, doc) in corpus.documents().iter().enumerate() {
            token_word.extend_from_slice(&doc.tokens);
            token_doc.extend(std::iter::repeat_n(di as u32, doc.len()));
        }
        let doc_location = corpus.documents().iter().map(|d| d.location as u32).collect();
        let global_groups = match hp.global_counts {
            GlobalCounts::CorpusWide => 1,
            GlobalCounts::PerLocation => l,
        };
        let phi_groups = match hp.phi_mode {
            PhiMode::Shared => 1,
            PhiMode::Split => 2,
        };
        Self {
            hp: hp.clone(),
            topics: k,
            words: w,
            locations: l,
            token_word,
            token_doc,
            doc_location,
            topic: vec![0; n],
            locality: vec![Locality::Local; n],
            doc_counts: vec![0; d * 2 * k],
            doc_topic_totals: vec![0; d * k],
            local_counts: vec![0; l * k],
            local_totals: vec![0; l],
            global_counts: vec![0; global_groups * k],
            global_totals: vec![0; global_groups],
            word_counts: vec![0; phi_groups * w * k],
            word_totals: vec![0; phi_groups * k],
            rng,
        }
    }

    pub fn hyperparameters(&self) -> &Hyperparameters {
        &self.hp
    }

    pub fn num_tokens(&self) -> usize {
        self.token_word.len()
    }

    pub fn num_topics(&self) -> usize {
        self.topics
    }

    pub fn num_words(&self) -> usize {
        self.words
    }

    pub fn num_locations(&self) -> usize {
        self.locations
    }

    pub fn num_documents(&self) -> usize {
        self.doc_location.len()
    }

    pub fn assignment(&self, token: usize) -> (Locality, usize) {
        (self.locality[token], self.topic[token] as usize)
    }

    pub fn localities(&self) -> &[Locality] {
        &self.locality
    }

    pub fn topics(&self) -> &[u32] {
        &self.topic
    }

    /// `n_doc[d][e][k]`.
    pub fn doc_count(&self, doc: usize, e: Locality, k: usize) -> u32 {
        self.doc_counts[(doc * 2 + e.index()) * self.topics + k]
    }

    pub fn local_count(&self, location: usize, k: usize) -> u32 {
        self.local_counts[location * self.topics + k]
    }

    /// Global topic count for group `g` (always 0 in corpus-wide mode).
    pub fn global_count(&self, g: usize, k: usize) -> u32 {
        self.global_counts[g * self.topics + k]
    }

    fn global_group(&self, location: usize) -> usize {
        match self.hp.global_counts {
            GlobalCounts::CorpusWide => 0,
            GlobalCounts::PerLocation => location,
        }
    }

    fn phi_group(&self, e: Locality) -> usize {
        match self.hp.phi_mode {
            PhiMode::Shared => 0,
            PhiMode::Split => e.index(),
        }
    }

    fn update(&mut self, token: usize, e: Locality, k: usize, add: bool) {
        let kk = self.topics;
        let d = self.token_doc[token] as usize;
        let l = self.doc_location[d] as usize;
        let w = self.token_word[token] as usize;
        let (topic_counts, topic_totals, group) = match e {
            Locality::Local => (&mut self.local_counts, &mut self.local_totals, l),
            Locality::Global => {
                let g = match self.hp.global_counts {
                    GlobalCounts::CorpusWide => 0,
                    GlobalCounts::PerLocation => l,
                };
                (&mut self.global_counts, &mut self.global_totals, g)
            }
        };
        let p = match self.hp.phi_mode {
            PhiMode::Shared => 0,
            PhiMode::Split => e.index(),
        };
        let cells = [
            &mut self.doc_counts[(d * 2 + e.index()) * kk + k],
            &mut self.doc_topic_totals[d * kk + k],
            &mut topic_counts[group * kk + k],
            &mut topic_totals[group],
            &mut self.word_counts[(p * self.words + w) * kk + k],
            &mut self.word_totals[p * kk + k],
        ];
        for c in cells {
            if add {
                *c += 1;
            } else {
                *c = c.checked_sub(1).expect("count underflow: token was not assigned");
            }
        }
    }

    /// Removes token `token`'s current assignment from every count.
    pub fn unassign(&mut self, token: usize) {
        let (e, k) = self.assignment(token);
        self.update(token, e, k, false);
    }

    /// Records assignment `(e, k)` for a token whose previous assignment has
    /// already been removed (or that was never counted).
    pub fn assign(&mut self, token: usize, e: Locality, k: usize) {
        self.locality[token] = e;
        self.topic[token] = k as u32;
        self.update(token, e, k, true);
    }

    /// Unnormalized conditional over `(e, k)` for `token`, written into
    /// `out[e.index() * K + k]`.
    ///
    /// The caller must have removed the token from the counts with
    /// [`unassign`](Self::unassign) first.
    pub fn conditional<F: Real>(&self, token: usize, out: &mut [F]) {
        let kk = self.topics;
        debug_assert_eq!(out.len(), 2 * kk);
        let d = self.token_doc[token] as usize;
        let l = self.doc_location[d] as usize;
        let w = self.token_word[token] as usize;
        let hp = &self.hp;
        let beta = F::lit(hp.beta);
        let w_beta = F::lit(hp.beta * self.words as f64);
        let gamma_sum = F::lit(hp.gamma_local + hp.gamma_global);

        for e in Locality::BOTH {
            let block = &mut out[e.index() * kk..(e.index() + 1) * kk];
            if e == Locality::Global && hp.locality == LocalityMode::AllLocal {
                block.fill(F::zero());
                continue;
            }
            let (alpha, gamma) = match e {
                Locality::Local => (hp.alpha_local, hp.gamma_local),
                Locality::Global => (hp.alpha_global, hp.gamma_global),
            };
            let (counts, total) = match e {
                Locality::Local => (&self.local_counts[l * kk..(l + 1) * kk], self.local_totals[l]),
                Locality::Global => {
                    let g = self.global_group(l);
                    (&self.global_counts[g * kk..(g + 1) * kk], self.global_totals[g])
                }
            };
            let p = self.phi_group(e);
            let word_row = &self.word_counts[(p * self.words + w) * kk..(p * self.words + w + 1) * kk];
            let word_totals = &self.word_totals[p * kk..(p + 1) * kk];
            let doc_row = &self.doc_counts[(d * 2 + e.index()) * kk..(d * 2 + e.index() + 1) * kk];
            let doc_totals = &self.doc_topic_totals[d * kk..(d + 1) * kk];

            let lam = F::lit(block_weight(hp.lambda, e));
            let alpha = F::lit(alpha);
            let gamma = F::lit(gamma);
            let topic_denom = F::count(total) + F::from_len(kk) * alpha;
            let scale = lam / topic_denom;
            for k in 0..kk {
                let topic = F::count(counts[k]) + alpha;
                let word = (F::count(word_row[k]) + beta) / (F::count(word_totals[k]) + w_beta);
                let mut weight = scale * topic * word;
                if hp.doc_factor {
                    weight = weight * (F::count(doc_row[k]) + gamma) / (F::count(doc_totals[k]) + gamma_sum);
                }
                block[k] = weight;
            }
        }
    }

    /// Conditional for `token` given all other assignments; leaves the state
    /// unchanged.
    pub fn conditional_excluding<F: Real>(&mut self, token: usize) -> Vec<F> {
        let (e, k) = self.assignment(token);
        self.unassign(token);
        let mut out = vec![F::zero(); 2 * self.topics];
        self.conditional(token, &mut out);
        self.assign(token, e, k);
        out
    }

    /// Resamples every token once, in document order.
    pub fn sweep<F: Real>(&mut self) {
        let mut weights = vec![F::zero(); 2 * self.topics];
        for i in 0..self.num_tokens() {
            self.unassign(i);
            self.conditional(i, &mut weights);
            let u = F::lit(self.rng.random::<f64>());
            let j = sample_index(&weights, u);
            self.assign(i, Locality::from_index(j / self.topics), j % self.topics);
        }
    }

    /// Point estimates from the current counts.
    pub fn estimate<F: Real>(&self) -> ModelEstimate<F> {
        let kk = self.topics;
        let hp = &self.hp;
        let smooth = |counts: &[u32], total: u32, prior: f64| -> Vec<F> {
            let prior = F::lit(prior);
            let denom = F::count(total) + F::from_len(kk) * prior;
            counts.iter().map(|&c| (F::count(c) + prior) / denom).collect()
        };
        let theta_local = (0..self.locations)
            .map(|l| smooth(&self.local_counts[l * kk..(l + 1) * kk], self.local_totals[l], hp.alpha_local))
            .collect();

        let groups = self.global_totals.len();
        let mut pooled = vec![0u32; kk];
        for g in 0..groups {
            for (k, p) in pooled.iter_mut().enumerate() {
                *p += self.global_counts[g * kk + k];
            }
        }
        let theta_global = smooth(&pooled, self.global_totals.iter().sum(), hp.alpha_global);
        let theta_global_by_location = match hp.global_counts {
            GlobalCounts::CorpusWide => None,
            GlobalCounts::PerLocation => Some(
                (0..groups)
                    .map(|g| smooth(&self.global_counts[g * kk..(g + 1) * kk], self.global_totals[g], hp.alpha_global))
                    .collect(),
            ),
        };

        let phi_for = |p: usize| -> Vec<Vec<F>> {
            let beta = F::lit(hp.beta);
            let w_beta = F::lit(hp.beta * self.words as f64);
            (0..kk)
                .map(|k| {
                    let denom = F::count(self.word_totals[p * kk + k]) + w_beta;
                    (0..self.words)
                        .map(|w| (F::count(self.word_counts[(p * self.words + w) * kk + k]) + beta) / denom)
                        .collect()
                })
                .collect()
        };
        let phi = phi_for(0);
        let phi_global = match hp.phi_mode {
            PhiMode::Shared => None,
            PhiMode::Split => Some(phi_for(1)),
        };

        ModelEstimate {
            lambda: hp.lambda,
            gamma_local: hp.gamma_local,
            gamma_global: hp.gamma_global,
            theta_local,
            theta_global,
            theta_global_by_location,
            phi,
            phi_global,
        }
    }

    /// Sum of each count family: `(documents, topics (local + global), words)`.
    pub fn family_totals(&self) -> (u64, u64, u64) {
        let sum = |v: &[u32]| v.iter().map(|&c| c as u64).sum::<u64>();
        (sum(&self.doc_counts), sum(&self.local_counts) + sum(&self.global_counts), sum(&self.word_counts))
    }

    /// Recomputes all counts from the assignments and compares them with the
    /// maintained matrices.
    pub fn verify(&self) -> std::result::Result<(), String> {
        let mut fresh = Self::empty_like(self);
        for i in 0..self.num_tokens() {
            let (e, k) = self.assignment(i);
            fresh.assign(i, e, k);
        }
        let checks: [(&str, &[u32], &[u32]); 8] = [
            ("doc_counts", &self.doc_counts, &fresh.doc_counts),
            ("doc_topic_totals", &self.doc_topic_totals, &fresh.doc_topic_totals),
            ("local_counts", &self.local_counts, &fresh.local_counts),
            ("local_totals", &self.local_totals, &fresh.local_totals),
            ("global_counts", &self.global_counts, &fresh.global_counts),
            ("global_totals", &self.global_totals, &fresh.global_totals),
            ("word_counts", &self.word_counts, &fresh.word_counts),
            ("word_totals", &self.word_totals, &fresh.word_totals),
        ];
        for (name, have, want) in checks {
            if have != want {
                return Err(format!("{name} out of sync with assignments"));
            }
        }
        let n = self.num_tokens() as u64;
        let (docs, topics, words) = self.family_totals();
        if (docs, topics, words) != (n, n, n) {
            return Err(format!("family totals {docs}/{topics}/{words} differ from token count {n}"));
        }
        Ok(())
    }

    fn empty_like(other: &Self) -> Self {
        let mut s = other.clone();
        for v in [
            &mut s.doc_counts,
            &mut s.doc_topic_totals,
            &mut s.local_counts,
            &mut s.local_totals,
            &mut s.global_counts,
            &mut s.global_totals,
            &mut s.word_counts,
            &mut s.word_totals,
        ] {
            v.fill(0);
        }
        s
    }

    /// Per-document local/global token counts.
    pub fn doc_locality_counts(&self, doc: usize) -> [u32; 2] {
        let kk = self.topics;
        let mut out = [0u32; 2];
        for e in Locality::BOTH {
            let row = &self.doc_counts[(doc * 2 + e.index()) * kk..(doc * 2 + e.index() + 1) * kk];
            out[e.index()] = row.iter().sum();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_records;

    fn corpus(text: &str) -> Corpus {
        Corpus::from_records(parse_records(text.as_bytes()).unwrap(), 1).unwrap().0
    }

    fn toy_hp(k: usize) -> Hyperparameters {
        Hyperparameters {
            topics: k,
            alpha_local: 0.5,
            alpha_global: 0.5,
            beta: 0.5,
            gamma_local: 0.5,
            gamma_global: 0.5,
            lambda: 1.0,
            iterations: 10,
            seed: 3,
            ..Default::default()
        }
    }

    #[test]
    fn single_token_bookkeeping() {
        let c = corpus("a\td\tw\n");
        let s = LgldaState::init(&c, &toy_hp(2)).unwrap();
        let (e, k) = s.assignment(0);
        assert_eq!(s.doc_count(0, e, k), 1);
        assert_eq!(s.family_totals(), (1, 1, 1));
        let ones = |v: &[u32]| v.iter().filter(|&&c| c == 1).count();
        assert_eq!(ones(&s.doc_counts), 1);
        assert_eq!(ones(&s.local_counts) + ones(&s.global_counts), 1);
        assert_eq!(ones(&s.word_counts), 1);
        assert_eq!(s.doc_counts.iter().sum::<u32>(), 1);
        s.verify().unwrap();
    }

    #[test]
    fn init_is_seeded() {
        let c = corpus("a\td1\tx y z x\nb\td2\ty y z\n");
        let s1 = LgldaState::init(&c, &toy_hp(3)).unwrap();
        let s2 = LgldaState::init(&c, &toy_hp(3)).unwrap();
        assert_eq!(s1.topics(), s2.topics());
        assert_eq!(s1.localities(), s2.localities());
        assert_eq!(s1.family_totals(), (7, 7, 7));
    }

    #[test]
    fn single_token_conditional_is_uniform_at_lambda_one() {
        let c = corpus("a\td\tw\n");
        let mut s = LgldaState::init(&c, &toy_hp(3)).unwrap();
        let w = s.conditional_excluding::<f64>(0);
        for x in &w {
            assert!((x - w[0]).abs() < 1e-15);
        }
    }

    #[test]
    fn single_token_conditional_scales_with_lambda() {
        let c = corpus("a\td\tw\n");
        let hp = Hyperparameters { lambda: 3.0, ..toy_hp(2) };
        let mut s = LgldaState::init(&c, &hp).unwrap();
        let w = s.conditional_excluding::<f64>(0);
        let total: f64 = w.iter().sum();
        for k in 0..2 {
            assert!((w[k] / total - 3.0 / 8.0).abs() < 1e-15);
            assert!((w[2 + k] / total - 1.0 / 8.0).abs() < 1e-15);
        }
    }

    #[test]
    fn sweeps_preserve_counts_in_every_mode() {
        let c = corpus("a\td1\tx y z x\nb\td2\ty y z\nb\td3\tq x\n");
        for gc in [GlobalCounts::CorpusWide, GlobalCounts::PerLocation] {
            for pm in [PhiMode::Shared, PhiMode::Split] {
                for lm in [LocalityMode::Sampled, LocalityMode::AllLocal] {
                    for doc_factor in [true, false] {
                        let hp =
                            Hyperparameters { global_counts: gc, phi_mode: pm, locality: lm, doc_factor, ..toy_hp(3) };
                        let mut s = LgldaState::init(&c, &hp).unwrap();
                        for _ in 0..20 {
                            s.sweep::<f64>();
                            s.verify().unwrap();
                        }
                        if lm == LocalityMode::AllLocal {
                            assert!(s.localities().iter().all(|&e| e == Locality::Local));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn f32_and_f64_conditionals_agree() {
        let c = corpus("a\td1\tx y z x\nb\td2\ty y z\n");
        let mut s = LgldaState::init(&c, &toy_hp(3)).unwrap();
        for i in 0..s.num_tokens() {
            let a = s.conditional_excluding::<f64>(i);
            let b = s.conditional_excluding::<f32>(i);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - *y as f64).abs() <= 1e-6 * x.abs().max(1e-3));
            }
        }
    }

    #[test]
    fn from_assignments_rejects_wrong_lengths() {
        let c = corpus("a\td\tx y\n");
        let hp = toy_hp(2);
        assert!(LgldaState::from_assignments(&c, &hp, &[Locality::Local], &[0]).is_err());
        assert!(LgldaState::from_assignments(&c, &hp, &[Locality::Local; 2], &[0, 2]).is_err());
        let s = LgldaState::from_assignments(&c, &hp, &[Locality::Local, Locality::Global], &[0, 1]).unwrap();
        assert_eq!(s.doc_locality_counts(0), [1, 1]);
    }
}
