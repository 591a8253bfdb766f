use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{ArgAction, Args};
use lglda::lglda::{GlobalCounts, Hyperparameters, LocalityMode, PhiMode};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Parses a kebab-case enum value through its serde representation.
fn kebab<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

/// Sampler settings shared by every model. The defaults are the published
/// experimental settings.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ModelOptions {
    /// Number of topics (also the cluster count for tfidf_kmeans)
    #[arg(short = 'k', long, default_value_t = 20)]
    pub topics: usize,
    #[arg(long, default_value_t = 0.1)]
    pub alpha_local: f64,
    #[arg(long, default_value_t = 0.1)]
    pub alpha_global: f64,
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma_local: f64,
    #[arg(long, default_value_t = 0.5)]
    pub gamma_global: f64,
    /// Local-global weight ratio
    #[arg(long, default_value_t = 0.6)]
    pub lambda: f64,
    /// Gibbs sweeps
    #[arg(long, default_value_t = 500)]
    pub iterations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// corpus-wide | per-location
    #[arg(long, default_value = "corpus-wide", value_parser = kebab::<GlobalCounts>)]
    pub global_counts: GlobalCounts,
    /// shared | split
    #[arg(long, default_value = "shared", value_parser = kebab::<PhiMode>)]
    pub phi_mode: PhiMode,
    /// Include the per-document locality factor
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub doc_factor: bool,
    /// sampled | all-local
    #[arg(long, default_value = "sampled", value_parser = kebab::<LocalityMode>)]
    pub locality: LocalityMode,
    /// Average the estimates of the last N sweeps (0: final sweep only)
    #[arg(long, default_value_t = 0)]
    pub average_last: usize,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self::from(&Hyperparameters::default())
    }
}

impl From<&Hyperparameters> for ModelOptions {
    fn from(hp: &Hyperparameters) -> Self {
        Self {
            topics: hp.topics,
            alpha_local: hp.alpha_local,
            alpha_global: hp.alpha_global,
            beta: hp.beta,
            gamma_local: hp.gamma_local,
            gamma_global: hp.gamma_global,
            lambda: hp.lambda,
            iterations: hp.iterations,
            seed: hp.seed,
            global_counts: hp.global_counts,
            phi_mode: hp.phi_mode,
            doc_factor: hp.doc_factor,
            locality: hp.locality,
            average_last: hp.average_last,
        }
    }
}

impl ModelOptions {
    pub fn hyperparameters(&self) -> Hyperparameters {
        Hyperparameters {
            topics: self.topics,
            alpha_local: self.alpha_local,
            alpha_global: self.alpha_global,
            beta: self.beta,
            gamma_local: self.gamma_local,
            gamma_global: self.gamma_global,
            lambda: self.lambda,
            iterations: self.iterations,
            seed: self.seed,
            global_counts: self.global_counts,
            phi_mode: self.phi_mode,
            doc_factor: self.doc_factor,
            locality: self.locality,
            average_last: self.average_last,
        }
    }
}

/// How a trained model is evaluated.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Fraction of documents held out for perplexity (0: evaluate on the
    /// training corpus)
    #[arg(long, default_value_t = 0.0)]
    pub held_out: f64,
    /// Top words listed per topic
    #[arg(long, default_value_t = 10)]
    pub top_n: usize,
    /// Drop documents with fewer tokens at ingest
    #[arg(long, default_value_t = lglda::corpus::DEFAULT_MIN_TOKENS)]
    pub min_tokens: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { held_out: 0.0, top_n: 10, min_tokens: lglda::corpus::DEFAULT_MIN_TOKENS }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct OutputOptions {
    /// Output directory
    #[arg(long = "out", env = "LGLDA_OUTPUT_DIR", default_value = "lglda-out")]
    pub dir: PathBuf,
}

impl OutputOptions {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn resolved(&self) -> Result<Self> {
        Ok(Self { dir: resolve(&self.dir)? })
    }

    /// Creates the directory and returns it.
    pub fn prepare(&self) -> Result<&Path> {
        std::fs::create_dir_all(&self.dir).with_context(|| format!("creating {}", self.dir.display()))?;
        Ok(&self.dir)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Args, Serialize, Deserialize)]
pub struct JobOptions {
    /// Parallel training runs (0: one per core)
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

/// Makes a path absolute so a saved config works from any directory.
pub fn resolve(path: &Path) -> Result<PathBuf> {
    std::path::absolute(path).with_context(|| format!("resolving {}", path.display()))
}
