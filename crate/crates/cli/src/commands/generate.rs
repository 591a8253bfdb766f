use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use lglda::synthgen::{default_spec, generate as sample, SyntheticSpec};
use serde::{Deserialize, Serialize};

use super::{write, write_config};
use crate::options::{resolve, OutputOptions};
use crate::Command;

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    /// Seed of the default spec (ignored with --spec)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON spec to use instead of the default one
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputOptions,
}

/// Writes `corpus.txt`, `truth.tsv` (`doc_index TAB token_index TAB z TAB e`,
/// `e = 1` for local), `synthetic_spec.json` and `config.json`.
pub fn generate(args: &GenerateArgs) -> Result<()> {
    let args = GenerateArgs {
        spec: args.spec.as_deref().map(resolve).transpose()?,
        output: args.output.resolved()?,
        ..args.clone()
    };
    let dir = args.output.prepare()?;
    let spec: SyntheticSpec = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => default_spec(args.seed),
    };
    let (corpus, truth) = sample(&spec)?;
    write(&dir.join("corpus.txt"), corpus.to_canonical_string())?;
    let mut tsv = Vec::new();
    truth.write_tsv(&mut tsv)?;
    write(&dir.join("truth.tsv"), tsv)?;
    write(&dir.join("synthetic_spec.json"), serde_json::to_string_pretty(&spec)? + "\n")?;
    write_config(dir, Command::Generate(args.clone()))?;
    println!(
        "{} documents, {} tokens, {} words, {} locations",
        corpus.documents().len(),
        corpus.token_count(),
        corpus.num_words(),
        corpus.num_locations()
    );
    Ok(())
}
