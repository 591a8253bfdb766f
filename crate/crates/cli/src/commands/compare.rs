use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use lglda::model::ModelKind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{csv_row, error_row, fit_and_evaluate, ingest, thread_pool, write, write_config, CSV_HEADER};
use crate::options::{resolve, EvalOptions, JobOptions, ModelOptions, OutputOptions};
use crate::Command;

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CompareArgs {
    pub corpus: PathBuf,
    /// Comma-separated model kinds
    #[arg(long = "models", value_delimiter = ',', default_value = "lda,local_lda,lglda")]
    pub kinds: Vec<ModelKind>,
    #[command(flatten)]
    pub model: ModelOptions,
    #[command(flatten)]
    pub eval: EvalOptions,
    #[command(flatten)]
    pub jobs: JobOptions,
    #[command(flatten)]
    pub output: OutputOptions,
}

/// Trains every requested kind with the same settings and writes one row per
/// kind to `compare.csv`, in request order. A failing model becomes an error
/// row rather than aborting the others.
pub fn compare(args: &CompareArgs) -> Result<()> {
    let args = CompareArgs { corpus: resolve(&args.corpus)?, output: args.output.resolved()?, ..args.clone() };
    let dir = args.output.prepare()?;
    let corpus = ingest(&args.corpus, args.eval.min_tokens)?;
    let hp = args.model.hyperparameters();
    hp.validate()?;

    let rows: Vec<String> = thread_pool(args.jobs.jobs)?.install(|| {
        args.kinds
            .par_iter()
            .map(|&kind| match fit_and_evaluate(kind, &corpus, &hp, &args.eval) {
                Ok(run) => csv_row(kind, &hp, &run.report),
                Err(e) => {
                    eprintln!("{kind}: {e:#}");
                    error_row(kind, &hp)
                }
            })
            .collect()
    });
    let mut csv = format!("{CSV_HEADER}\n");
    for row in &rows {
        csv.push_str(row);
        csv.push('\n');
    }
    write(&dir.join("compare.csv"), &csv)?;
    write_config(dir, Command::Compare(args.clone()))?;
    print!("{csv}");
    Ok(())
}
