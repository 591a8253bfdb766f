use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use lglda::lglda::Hyperparameters;
use lglda::model::ModelKind;
use lglda::sampling::derive_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{csv_row, fit_and_evaluate, ingest, thread_pool, write, write_config, CSV_HEADER};
use crate::options::{resolve, EvalOptions, JobOptions, ModelOptions, OutputOptions};
use crate::Command;

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    pub corpus: PathBuf,
    /// Explicit comma-separated lambda values (overrides the log grid)
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.1)]
    pub grid_min: f64,
    #[arg(long, default_value_t = 20.0)]
    pub grid_max: f64,
    #[arg(long, default_value_t = 10)]
    pub grid_points: usize,
    #[command(flatten)]
    pub model: ModelOptions,
    #[command(flatten)]
    pub eval: EvalOptions,
    #[command(flatten)]
    pub jobs: JobOptions,
    #[command(flatten)]
    pub output: OutputOptions,
}

/// `points` log-spaced values from `min` to `max` inclusive.
pub fn default_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![min],
        _ => (0..points).map(|i| min * (max / min).powf(i as f64 / (points - 1) as f64)).collect(),
    }
}

impl SweepArgs {
    pub fn lambdas(&self) -> Vec<f64> {
        let mut grid =
            self.grid.clone().unwrap_or_else(|| default_grid(self.grid_min, self.grid_max, self.grid_points));
        grid.sort_by(f64::total_cmp);
        grid
    }
}

/// One local-global training per lambda, seeded with
/// `derive_seed(seed, index)`, written to `sweep.csv` sorted by lambda. If any
/// run fails the rows that did finish are still written before the error is
/// returned.
pub fn sweep_lambda(args: &SweepArgs) -> Result<()> {
    let args = SweepArgs { corpus: resolve(&args.corpus)?, output: args.output.resolved()?, ..args.clone() };
    let grid = args.lambdas();
    if grid.is_empty() {
        bail!("lambda grid is empty");
    }
    if let Some(bad) = grid.iter().find(|&&l| !(l.is_finite() && l > 0.0)) {
        bail!("lambda values must be finite and > 0, got {bad}");
    }
    let dir = args.output.prepare()?;
    let corpus = ingest(&args.corpus, args.eval.min_tokens)?;
    let base = args.model.hyperparameters();

    let results: Vec<(f64, Result<String>)> = thread_pool(args.jobs.jobs)?.install(|| {
        grid.par_iter()
            .enumerate()
            .map(|(i, &lambda)| {
                let hp = Hyperparameters { lambda, seed: derive_seed(base.seed, i as u64), ..base.clone() };
                let row = hp
                    .validate()
                    .map_err(anyhow::Error::from)
                    .and_then(|_| fit_and_evaluate(ModelKind::Lglda, &corpus, &hp, &args.eval))
                    .map(|run| csv_row(ModelKind::Lglda, &hp, &run.report));
                (lambda, row)
            })
            .collect()
    });

    let mut csv = format!("{CSV_HEADER}\n");
    let mut failures = Vec::new();
    for (lambda, row) in results {
        match row {
            Ok(row) => {
                csv.push_str(&row);
                csv.push('\n');
            }
            Err(e) => failures.push(format!("lambda {lambda}: {e:#}")),
        }
    }
    write(&dir.join("sweep.csv"), &csv)?;
    write_config(dir, Command::SweepLambda(args.clone()))?;
    if !failures.is_empty() {
        bail!("{} of {} runs failed:\n{}", failures.len(), grid.len(), failures.join("\n"));
    }
    print!("{csv}");
    Ok(())
}
