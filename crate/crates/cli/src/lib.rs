//! Command implementations behind the `lglda` binary.
//!
//! Every command writes its outputs plus a `config.json` holding the fully
//! resolved arguments into one output directory; `rerun` replays such a file.

pub mod commands;
pub mod options;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use commands::{
    CompareArgs, GenerateArgs, IngestCheckArgs, LocalityArgs, RerunArgs, SweepArgs, TopwordsArgs, TrainArgs,
};
use options::OutputOptions;

#[derive(Debug, Parser)]
#[command(name = "lglda", version, about = "Local-global topic models for location-tagged short texts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Parse and filter a corpus, reporting what survives
    IngestCheck(IngestCheckArgs),
    /// Train one model and write it with its metrics and top words
    Train(TrainArgs),
    /// Train several models with shared settings into one CSV
    Compare(CompareArgs),
    /// Train the local-global model over a grid of lambda values
    SweepLambda(SweepArgs),
    /// Rank documents by locality score under a trained model
    Locality(LocalityArgs),
    /// List the top words of a trained model
    Topwords(TopwordsArgs),
    /// Write a synthetic corpus with its ground truth
    Generate(GenerateArgs),
    /// Replay a saved config.json
    Rerun(RerunArgs),
}

impl Command {
    pub fn output_mut(&mut self) -> Option<&mut OutputOptions> {
        match self {
            Command::IngestCheck(a) => Some(&mut a.output),
            Command::Train(a) => Some(&mut a.output),
            Command::Compare(a) => Some(&mut a.output),
            Command::SweepLambda(a) => Some(&mut a.output),
            Command::Locality(a) => Some(&mut a.output),
            Command::Topwords(a) => Some(&mut a.output),
            Command::Generate(a) => Some(&mut a.output),
            Command::Rerun(_) => None,
        }
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::IngestCheck(a) => commands::ingest_check(&a),
        Command::Train(a) => commands::train(&a),
        Command::Compare(a) => commands::compare(&a),
        Command::SweepLambda(a) => commands::sweep_lambda(&a),
        Command::Locality(a) => commands::locality(&a),
        Command::Topwords(a) => commands::topwords(&a),
        Command::Generate(a) => commands::generate(&a),
        Command::Rerun(a) => commands::rerun(&a),
    }
}
