use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use lglda::model::ModelKind;
use lglda::ModelArtifact;
use serde::{Deserialize, Serialize};

use super::{csv_row, fit_and_evaluate, ingest, top_words_tsv, write, write_config, CSV_HEADER};
use crate::options::{resolve, EvalOptions, ModelOptions, OutputOptions};
use crate::Command;

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct TrainArgs {
    /// Corpus file: `location TAB doc_id TAB space-separated tokens`
    pub corpus: PathBuf,
    /// lglda | lda | local_lda | tfidf_kmeans
    #[arg(long = "model", default_value = "lglda")]
    pub kind: ModelKind,
    #[command(flatten)]
    pub model: ModelOptions,
    #[command(flatten)]
    pub eval: EvalOptions,
    #[command(flatten)]
    pub output: OutputOptions,
}

/// Writes `model.json`, `metrics.csv`, `metrics.txt`, `topwords.tsv` and
/// `config.json`.
pub fn train(args: &TrainArgs) -> Result<()> {
    let args = TrainArgs { corpus: resolve(&args.corpus)?, output: args.output.resolved()?, ..args.clone() };
    let dir = args.output.prepare()?;
    let corpus = ingest(&args.corpus, args.eval.min_tokens)?;
    let hp = args.model.hyperparameters();
    hp.validate()?;
    let run = fit_and_evaluate(args.kind, &corpus, &hp, &args.eval)?;

    ModelArtifact::new(run.model, hp.clone(), &run.training).save(dir.join("model.json"))?;
    write(&dir.join("metrics.csv"), format!("{CSV_HEADER}\n{}\n", csv_row(args.kind, &hp, &run.report)))?;
    let kv = format!("model={}\n{}", args.kind, run.report.to_key_values());
    write(&dir.join("metrics.txt"), &kv)?;
    write(&dir.join("topwords.tsv"), top_words_tsv(&run.report))?;
    write_config(dir, Command::Train(args.clone()))?;
    print!("{kv}");
    Ok(())
}
