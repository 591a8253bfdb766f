//! Brute-force posterior oracles shared by the integration tests.
//!
//! The joints are written from the generative model with every Dirichlet and
//! Beta integrated out, using rising factorials instead of the samplers'
//! count-ratio conditionals, so agreement is a real cross-check.

#![allow(dead_code)]

use lglda::corpus::{parse_records, Corpus};
use lglda::lglda::{GlobalCounts, Hyperparameters, Locality, LocalityMode, PhiMode};

pub fn corpus(text: &str) -> Corpus {
    Corpus::from_records(parse_records(text.as_bytes()).unwrap(), 1).unwrap().0
}

/// `ln(a (a+1) ... (a+n-1))`.
fn ln_rising(a: f64, n: u32) -> f64 {
    (0..n).map(|j| (a + j as f64).ln()).sum()
}

/// Log Dirichlet-multinomial marginal of one count vector (ordered draws).
fn ln_dm(counts: &[u32], prior: f64) -> f64 {
    let total: u32 = counts.iter().sum();
    counts.iter().map(|&c| ln_rising(prior, c)).sum::<f64>() - ln_rising(prior * counts.len() as f64, total)
}

struct Token {
    doc: usize,
    location: usize,
    word: usize,
}

fn tokens(corpus: &Corpus) -> Vec<Token> {
    corpus
        .documents()
        .iter()
        .enumerate()
        .flat_map(|(d, doc)| {
            doc.tokens.iter().map(move |&w| Token { doc: d, location: doc.location, word: w as usize })
        })
        .collect()
}

/// Log joint `p(e, z, w)` of the local-global model, up to a constant that
/// does not depend on the assignments.
pub fn lglda_log_joint(corpus: &Corpus, hp: &Hyperparameters, e: &[Locality], z: &[usize]) -> f64 {
    let k = hp.topics;
    let w = corpus.num_words();
    let l = corpus.num_locations();
    let d = corpus.documents().len();
    let toks = tokens(corpus);
    let lam_local = hp.lambda / (hp.lambda + 1.0);

    let mut doc = vec![[vec![0u32; k], vec![0u32; k]]; d];
    let mut local = vec![vec![0u32; k]; l];
    let global_groups = if hp.global_counts == GlobalCounts::PerLocation { l } else { 1 };
    let mut global = vec![vec![0u32; k]; global_groups];
    let phi_groups = if hp.phi_mode == PhiMode::Split { 2 } else { 1 };
    let mut words = vec![vec![vec![0u32; w]; k]; phi_groups];
    let mut lp = 0.0;
    for (i, t) in toks.iter().enumerate() {
        let local_token = e[i] == Locality::Local;
        if hp.locality == LocalityMode::AllLocal && !local_token {
            return f64::NEG_INFINITY;
        }
        lp += if local_token { lam_local.ln() } else { (1.0 - lam_local).ln() };
        doc[t.doc][usize::from(!local_token)][z[i]] += 1;
        if local_token {
            local[t.location][z[i]] += 1;
        } else {
            let g = if global_groups == 1 { 0 } else { t.location };
            global[g][z[i]] += 1;
        }
        let p = if phi_groups == 2 && !local_token { 1 } else { 0 };
        words[p][z[i]][t.word] += 1;
    }
    if hp.doc_factor {
        for row in &doc {
            for (&a, &b) in row[0].iter().zip(&row[1]) {
                lp += ln_rising(hp.gamma_local, a) + ln_rising(hp.gamma_global, b)
                    - ln_rising(hp.gamma_local + hp.gamma_global, a + b);
            }
        }
    }
    lp += local.iter().map(|c| ln_dm(c, hp.alpha_local)).sum::<f64>();
    lp += global.iter().map(|c| ln_dm(c, hp.alpha_global)).sum::<f64>();
    lp += words.iter().flatten().map(|c| ln_dm(c, hp.beta)).sum::<f64>();
    lp
}

/// Log joint `p(z, w)` of LDA with one topic mixture per location.
pub fn local_lda_log_joint(corpus: &Corpus, hp: &Hyperparameters, z: &[usize]) -> f64 {
    let k = hp.topics;
    let mut local = vec![vec![0u32; k]; corpus.num_locations()];
    let mut words = vec![vec![0u32; corpus.num_words()]; k];
    for (i, t) in tokens(corpus).iter().enumerate() {
        local[t.location][z[i]] += 1;
        words[z[i]][t.word] += 1;
    }
    local.iter().map(|c| ln_dm(c, hp.alpha_local)).sum::<f64>() + words.iter().map(|c| ln_dm(c, hp.beta)).sum::<f64>()
}

/// Decodes configuration `index` into per-token `(e, z)` with `2K` states
/// per token, token 0 least significant.
pub fn decode(index: usize, n: usize, k: usize) -> (Vec<Locality>, Vec<usize>) {
    let mut e = Vec::with_capacity(n);
    let mut z = Vec::with_capacity(n);
    let mut rest = index;
    for _ in 0..n {
        let s = rest % (2 * k);
        rest /= 2 * k;
        e.push(Locality::from_index(s / k));
        z.push(s % k);
    }
    (e, z)
}

pub fn encode(e: &[Locality], z: &[u32], k: usize) -> usize {
    e.iter().zip(z).rev().fold(0, |acc, (e, &z)| acc * 2 * k + e.index() * k + z as usize)
}

fn normalize_logs(logs: Vec<f64>) -> Vec<f64> {
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|&v| (v - max).exp()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Exact posterior over every `(e, z)` configuration, indexed as [`encode`].
pub fn lglda_posterior(corpus: &Corpus, hp: &Hyperparameters) -> Vec<f64> {
    let n = corpus.token_count();
    let states = (2 * hp.topics).pow(n as u32);
    normalize_logs(
        (0..states)
            .map(|c| {
                let (e, z) = decode(c, n, hp.topics);
                lglda_log_joint(corpus, hp, &e, &z)
            })
            .collect(),
    )
}

/// Exact LocalLDA posterior over topic configurations, token 0 least
/// significant in base `K`.
pub fn local_lda_posterior(corpus: &Corpus, hp: &Hyperparameters) -> Vec<f64> {
    let n = corpus.token_count();
    let k = hp.topics;
    normalize_logs(
        (0..k.pow(n as u32))
            .map(|c| {
                let z: Vec<usize> = (0..n).map(|i| c / k.pow(i as u32) % k).collect();
                local_lda_log_joint(corpus, hp, &z)
            })
            .collect(),
    )
}

/// Full conditional of token `i` from the oracle joint, as a normalized `2K`
/// vector (local block first).
pub fn lglda_conditional(corpus: &Corpus, hp: &Hyperparameters, e: &[Locality], z: &[usize], i: usize) -> Vec<f64> {
    let k = hp.topics;
    let mut e = e.to_vec();
    let mut z = z.to_vec();
    normalize_logs(
        (0..2 * k)
            .map(|s| {
                e[i] = Locality::from_index(s / k);
                z[i] = s % k;
                lglda_log_joint(corpus, hp, &e, &z)
            })
            .collect(),
    )
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

pub fn normalized(v: &[f64]) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.iter().map(|x| x / s).collect()
}

/// The toy corpora the stationary-distribution checks run on: each has at
/// most six tokens, two locations and three words.
pub fn toy_corpora() -> Vec<(&'static str, Corpus)> {
    vec![
        ("two docs, one location", corpus("a\td1\tx y x\na\td2\ty z\n")),
        ("two locations", corpus("a\td1\tx x y\nb\td2\tz z\n")),
        ("three docs, six tokens", corpus("a\td1\tx y\na\td2\tx z\nb\td3\tz y\n")),
    ]
}

/// Moderate priors so short chains mix well.
pub fn toy_hyperparameters(seed: u64) -> Hyperparameters {
    Hyperparameters {
        topics: 2,
        alpha_local: 0.5,
        alpha_global: 0.5,
        beta: 0.5,
        gamma_local: 0.5,
        gamma_global: 0.5,
        lambda: 0.6,
        iterations: 1,
        seed,
        ..Default::default()
    }
}
