use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use lglda::corpus::ingest_with_stats;
use lglda::metrics::top_words;
use lglda::model::TopicModel;
use lglda::ModelArtifact;
use serde::{Deserialize, Serialize};

use super::{write, write_config};
use crate::options::{resolve, OutputOptions};
use crate::Command;

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct IngestCheckArgs {
    pub corpus: PathBuf,
    #[arg(long, default_value_t = lglda::corpus::DEFAULT_MIN_TOKENS)]
    pub min_tokens: usize,
    #[command(flatten)]
    pub output: OutputOptions,
}

/// Writes `ingest.txt` as `key=value` lines.
pub fn ingest_check(args: &IngestCheckArgs) -> Result<()> {
    let args = IngestCheckArgs { corpus: resolve(&args.corpus)?, output: args.output.resolved()?, ..args.clone() };
    let dir = args.output.prepare()?;
    let (corpus, stats) = ingest_with_stats(&args.corpus, args.min_tokens)
        .with_context(|| format!("ingesting {}", args.corpus.display()))?;
    let report = format!(
        "lines={}\ndocuments={}\ndropped_documents={}\ndropped_tokens={}\ntokens={}\nvocabulary={}\nlocations={}\nvocabulary_hash={}\n",
        stats.lines,
        corpus.documents().len(),
        stats.dropped_documents,
        stats.dropped_tokens,
        corpus.token_count(),
        corpus.num_words(),
        corpus.num_locations(),
        corpus.vocabulary().fingerprint()
    );
    write(&dir.join("ingest.txt"), &report)?;
    write_config(dir, Command::IngestCheck(args.clone()))?;
    print!("{report}");
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct TopwordsArgs {
    pub model: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub top_n: usize,
    #[command(flatten)]
    pub output: OutputOptions,
}

/// Writes `topwords.tsv` (`topic TAB rank TAB word TAB weight`).
pub fn topwords(args: &TopwordsArgs) -> Result<()> {
    let args = TopwordsArgs { model: resolve(&args.model)?, output: args.output.resolved()?, ..args.clone() };
    let dir = args.output.prepare()?;
    let artifact = ModelArtifact::load(&args.model).with_context(|| format!("loading {}", args.model.display()))?;
    let mut tsv = String::from("topic\trank\tword\tweight\n");
    for (k, list) in top_words(artifact.model.topic_words(), args.top_n).into_iter().enumerate() {
        for (r, (w, p)) in list.into_iter().enumerate() {
            tsv.push_str(&format!("{k}\t{}\t{}\t{p}\n", r + 1, artifact.vocabulary[w as usize]));
        }
    }
    write(&dir.join("topwords.tsv"), &tsv)?;
    write_config(dir, Command::Topwords(args.clone()))?;
    print!("{tsv}");
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RerunArgs {
    /// A config.json written by an earlier run
    pub config: PathBuf,
    /// Write to this directory instead of the recorded one
    #[arg(long = "out")]
    pub out: Option<PathBuf>,
}

pub fn rerun(args: &RerunArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    let mut command: Command =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", args.config.display()))?;
    let Some(output) = command.output_mut() else {
        bail!("{} records a rerun, not a runnable command", args.config.display());
    };
    if let Some(out) = &args.out {
        output.dir = out.clone();
    }
    crate::run(command)
}
