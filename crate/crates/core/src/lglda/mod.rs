//! Local-global LDA.
//!
//! Every token carries a topic `z` and a locality flag `e`. Local tokens draw
//! their topic from the per-location distribution `theta_local[l]`, global
//! tokens from the shared `theta_global`. The two blocks are mixed with the
//! fixed weights `lambda / (lambda + 1)` and `1 / (lambda + 1)`, and
//! inference is collapsed Gibbs sampling over `(e, z)` jointly.

mod estimate;
mod state;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub use estimate::{concat_distribution, ModelEstimate};
pub use state::LgldaState;

/// Locality flag of a token. `Local` means the token came from its location's own topic mix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Locality {
    Local,
    Global,
}

impl Locality {
    pub const BOTH: [Locality; 2] = [Locality::Local, Locality::Global];

    /// Position of this block in a `2K` weight vector: local first.
    pub fn index(self) -> usize {
        match self {
            Locality::Local => 0,
            Locality::Global => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Locality::Local
        } else {
            Locality::Global
        }
    }
}

/// Scope of the global topic counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GlobalCounts {
    /// One global topic distribution shared by every location.
    #[default]
    CorpusWide,
    /// A separate "global" distribution per location, indexing the topic
    /// factor by the token's location for both blocks.
    PerLocation,
}

/// Whether local and global tokens share one set of topic-word counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiMode {
    #[default]
    Shared,
    Split,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalityMode {
    /// `e` is sampled with `z`.
    #[default]
    Sampled,
    /// Every token is clamped to local; the global block gets zero weight.
    AllLocal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub topics: usize,
    pub alpha_local: f64,
    pub alpha_global: f64,
    pub beta: f64,
    pub gamma_local: f64,
    pub gamma_global: f64,
    /// Local-global weight ratio.
    pub lambda: f64,
    pub iterations: usize,
    pub seed: u64,
    pub global_counts: GlobalCounts,
    pub phi_mode: PhiMode,
    /// Include the per-document locality factor in the conditional.
    pub doc_factor: bool,
    pub locality: LocalityMode,
    /// Average the estimates of the last N sweeps; 0 or 1 uses the final
    /// sweep only.
    pub average_last: usize,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            topics: 20,
            alpha_local: 0.1,
            alpha_global: 0.1,
            beta: 0.1,
            gamma_local: 0.5,
            gamma_global: 0.5,
            lambda: 0.6,
            iterations: 500,
            seed: 0,
            global_counts: GlobalCounts::CorpusWide,
            phi_mode: PhiMode::Shared,
            doc_factor: true,
            locality: LocalityMode::Sampled,
            average_last: 0,
        }
    }
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidHyperparameters(msg));
        if self.topics < 2 {
            return bad(format!("topics must be >= 2, got {}", self.topics));
        }
        if self.topics > u32::MAX as usize {
            return bad("too many topics".into());
        }
        for (name, v) in [
            ("alpha_local", self.alpha_local),
            ("alpha_global", self.alpha_global),
            ("beta", self.beta),
            ("gamma_local", self.gamma_local),
            ("gamma_global", self.gamma_global),
            ("lambda", self.lambda),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be finite and > 0, got {v}"));
            }
        }
        if self.iterations < 1 {
            return bad("iterations must be >= 1".into());
        }
        if self.average_last > self.iterations {
            return bad(format!("average_last ({}) exceeds iterations ({})", self.average_last, self.iterations));
        }
        Ok(())
    }

    /// Block weight `lambda/(lambda+1)` for local, `1/(lambda+1)` for global.
    pub fn block_weight(&self, locality: Locality) -> f64 {
        block_weight(self.lambda, locality)
    }
}

pub(crate) fn block_weight(lambda: f64, locality: Locality) -> f64 {
    match locality {
        Locality::Local => lambda / (lambda + 1.0),
        Locality::Global => 1.0 / (lambda + 1.0),
    }
}

/// Runs `hp.iterations` Gibbs sweeps from a seeded random start.
pub fn train<F: Real>(corpus: &Corpus, hp: &Hyperparameters) -> Result<(LgldaState, ModelEstimate<F>)> {
    let mut state = LgldaState::init(corpus, hp)?;
    let averaged = hp.average_last.max(1);
    let mut sum: Option<ModelEstimate<F>> = None;
    for it in 0..hp.iterations {
        state.sweep::<F>();
        if it + averaged >= hp.iterations && averaged > 1 {
            let est = state.estimate::<F>();
            match sum.as_mut() {
                None => sum = Some(est),
                Some(acc) => acc.accumulate(&est),
            }
        }
    }
    let estimate = match sum {
        Some(mut acc) => {
            acc.scale(F::one() / F::from_len(averaged));
            acc
        }
        None => state.estimate(),
    };
    Ok((state, estimate))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reported_settings() {
        let hp = Hyperparameters::default();
        assert_eq!(hp.topics, 20);
        assert_eq!((hp.alpha_local, hp.alpha_global, hp.beta), (0.1, 0.1, 0.1));
        assert_eq!((hp.gamma_local, hp.gamma_global), (0.5, 0.5));
        assert_eq!(hp.lambda, 0.6);
        assert_eq!(hp.iterations, 500);
        hp.validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let cases = [
            Hyperparameters { topics: 1, ..Default::default() },
            Hyperparameters { lambda: 0.0, ..Default::default() },
            Hyperparameters { beta: -1.0, ..Default::default() },
            Hyperparameters { gamma_global: f64::NAN, ..Default::default() },
            Hyperparameters { iterations: 0, ..Default::default() },
            Hyperparameters { iterations: 5, average_last: 6, ..Default::default() },
        ];
        for hp in cases {
            assert!(hp.validate().is_err(), "{hp:?}");
        }
    }

    #[test]
    fn block_weights() {
        let hp = Hyperparameters { lambda: 3.0, ..Default::default() };
        assert_eq!(hp.block_weight(Locality::Local), 0.75);
        assert_eq!(hp.block_weight(Locality::Global), 0.25);
    }
}
