mod compare;
mod generate;
mod inspect;
mod locality;
mod sweep;
mod train;

use std::path::Path;

use anyhow::{Context, Result};
use lglda::baselines::{train_lda, train_local_lda, train_tfidf_kmeans};
use lglda::corpus::Corpus;
use lglda::lglda::{train as train_lglda, Hyperparameters};
use lglda::metrics::{evaluate, MetricsReport};
use lglda::model::{Model, ModelKind};

pub use compare::{compare, CompareArgs};
pub use generate::{generate, GenerateArgs};
pub use inspect::{ingest_check, rerun, topwords, IngestCheckArgs, RerunArgs, TopwordsArgs};
pub use locality::{locality, LocalityArgs};
pub use sweep::{default_grid, sweep_lambda, SweepArgs};
pub use train::{train, TrainArgs};

use crate::options::EvalOptions;
use crate::Command;

pub const CSV_HEADER: &str =
    "model,lambda,K,perplexity,topic_entropy,location_entropy,mean_pairwise_kl,seed,iterations";

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_config(dir: &Path, command: Command) -> Result<()> {
    write(&dir.join("config.json"), serde_json::to_string_pretty(&command)? + "\n")
}

fn ingest(path: &Path, min_tokens: usize) -> Result<Corpus> {
    lglda::corpus::ingest(path, min_tokens).with_context(|| format!("ingesting {}", path.display()))
}

pub fn fit(kind: ModelKind, corpus: &Corpus, hp: &Hyperparameters) -> Result<Model<f64>> {
    Ok(match kind {
        ModelKind::Lglda => Model::Lglda(train_lglda(corpus, hp)?.1),
        ModelKind::Lda => Model::Baseline(train_lda(corpus, hp)?),
        ModelKind::LocalLda => Model::Baseline(train_local_lda(corpus, hp)?),
        ModelKind::TfidfKmeans => Model::Baseline(train_tfidf_kmeans(corpus, hp.topics, hp.seed)?),
    })
}

/// A trained model, the corpus it was trained on, and its metrics.
pub struct Run {
    pub model: Model<f64>,
    pub training: Corpus,
    pub report: MetricsReport<f64>,
}

/// Trains `kind` and evaluates it on the training corpus, or on a held-out
/// split when `eval.held_out > 0`.
pub fn fit_and_evaluate(kind: ModelKind, corpus: &Corpus, hp: &Hyperparameters, eval: &EvalOptions) -> Result<Run> {
    let (training, held_out) = if eval.held_out > 0.0 {
        let (a, b) = corpus.split(eval.held_out, hp.seed)?;
        (a, Some(b))
    } else {
        (corpus.clone(), None)
    };
    let model = fit(kind, &training, hp)?;
    let words = training.vocabulary().words();
    let report = match &held_out {
        Some(test) => {
            let mut known = vec![false; training.num_words()];
            for doc in training.documents() {
                for &t in &doc.tokens {
                    known[t as usize] = true;
                }
            }
            evaluate(&model, test, Some(&known), words, eval.top_n)?
        }
        None => evaluate(&model, &training, None, words, eval.top_n)?,
    };
    Ok(Run { model, training, report })
}

pub fn csv_row(kind: ModelKind, hp: &Hyperparameters, report: &MetricsReport<f64>) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        kind,
        lambda_cell(kind, hp),
        hp.topics,
        report.perplexity,
        report.topic_entropy,
        report.location_entropy,
        report.mean_pairwise_kl,
        hp.seed,
        hp.iterations
    )
}

pub fn error_row(kind: ModelKind, hp: &Hyperparameters) -> String {
    format!("{},{},{},error,error,error,error,{},{}", kind, lambda_cell(kind, hp), hp.topics, hp.seed, hp.iterations)
}

/// Only the local-global model uses lambda.
fn lambda_cell(kind: ModelKind, hp: &Hyperparameters) -> String {
    if kind == ModelKind::Lglda {
        hp.lambda.to_string()
    } else {
        String::new()
    }
}

fn top_words_tsv(report: &MetricsReport<f64>) -> String {
    let mut out = String::from("topic\trank\tword\tweight\n");
    for (k, list) in report.top_words.iter().enumerate() {
        for (r, (w, p)) in list.iter().enumerate() {
            out.push_str(&format!("{k}\t{}\t{w}\t{p}\n", r + 1));
        }
    }
    out
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}
