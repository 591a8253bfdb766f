use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use anyhow::{anyhow, Context, Result};
use clap::Args;
use lglda::corpus::{fingerprint_words, read_records, Vocabulary};
use lglda::model::Model;
use lglda::{Error, ModelArtifact};
use serde::{Deserialize, Serialize};

use super::{write, write_config};
use crate::options::{resolve, OutputOptions};
use crate::Command;

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LocalityArgs {
    /// A local-global model written by `train`
    pub model: PathBuf,
    /// Documents to score; every word must be in the model's vocabulary
    pub corpus: PathBuf,
    #[command(flatten)]
    pub output: OutputOptions,
}

/// Writes `locality.tsv` (`doc_id TAB location TAB score`), highest score
/// first; ties keep location then document id order.
pub fn locality(args: &LocalityArgs) -> Result<()> {
    let args =
        LocalityArgs { model: resolve(&args.model)?, corpus: resolve(&args.corpus)?, output: args.output.resolved()? };
    let dir = args.output.prepare()?;
    let artifact = ModelArtifact::load(&args.model).with_context(|| format!("loading {}", args.model.display()))?;
    let Model::Lglda(estimate) = &artifact.model else {
        return Err(anyhow!("locality scores need an lglda model, {} holds {}", args.model.display(), artifact.kind));
    };
    let records = read_records(&args.corpus)?;

    let vocabulary = Vocabulary::from_words(artifact.vocabulary.iter().cloned());
    let unknown = records.iter().flat_map(|r| &r.tokens).any(|t| vocabulary.id(t).is_none());
    if unknown {
        let words: BTreeSet<&String> = records.iter().flat_map(|r| &r.tokens).collect();
        let words: Vec<String> = words.into_iter().cloned().collect();
        return Err(Error::VocabularyMismatch {
            model: artifact.vocabulary_hash.clone(),
            corpus: fingerprint_words(&words),
        }
        .into());
    }
    let locations: HashMap<&str, usize> =
        artifact.locations.iter().enumerate().map(|(i, name)| (name.as_str(), i)).collect();

    let mut rows = Vec::with_capacity(records.len());
    for r in &records {
        let l = *locations
            .get(r.location.as_str())
            .ok_or_else(|| anyhow!("location {:?} is not known to the model", r.location))?;
        let tokens: Vec<u32> = r.tokens.iter().map(|t| vocabulary.id(t).expect("checked above")).collect();
        let score = estimate.locality_score(l, &tokens)?;
        rows.push((score, &r.location, &r.doc_id));
    }
    rows.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| (a.1, a.2).cmp(&(b.1, b.2))));

    let mut tsv = String::from("doc_id\tlocation\tscore\n");
    for (score, location, doc_id) in rows {
        tsv.push_str(&format!("{doc_id}\t{location}\t{score}\n"));
    }
    write(&dir.join("locality.tsv"), tsv)?;
    write_config(dir, Command::Locality(args.clone()))
}
