use serde::{Deserialize, Serialize};

use super::{block_weight, Locality};
use crate::error::{Error, Result};
use crate::model::TopicModel;
use crate::scalar::{normalize, Real};

/// Point estimates of a trained local-global model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct ModelEstimate<F> {
    pub lambda: f64,
    pub gamma_local: f64,
    pub gamma_global: f64,
    /// `theta_local[l][k]`.
    pub theta_local: Vec<Vec<F>>,
    /// Global topic distribution, pooled over locations in per-location mode.
    pub theta_global: Vec<F>,
    /// Per-location global distributions (per-location counts mode only).
    pub theta_global_by_location: Option<Vec<Vec<F>>>,
    /// `phi[k][w]`; the local topic-word distributions in split mode.
    pub phi: Vec<Vec<F>>,
    /// Global topic-word distributions (split mode only).
    pub phi_global: Option<Vec<Vec<F>>>,
}

/// The `2K` concatenated topic distribution: the local block
/// `lambda/(lambda+1) * theta_local[k] * evidence[0]` followed by the global
/// block `1/(lambda+1) * theta_global[k] * evidence[1]`, renormalized.
///
/// Inputs need not be normalized; any non-negative weights work.
pub fn concat_distribution<F: Real>(theta_local: &[F], theta_global: &[F], evidence: [F; 2], lambda: f64) -> Vec<F> {
    let local = F::lit(block_weight(lambda, Locality::Local)) * evidence[0];
    let global = F::lit(block_weight(lambda, Locality::Global)) * evidence[1];
    let mut out: Vec<F> =
        theta_local.iter().map(|&p| local * p).chain(theta_global.iter().map(|&p| global * p)).collect();
    normalize(&mut out);
    out
}

impl<F: Real> ModelEstimate<F> {
    pub fn num_topics(&self) -> usize {
        self.theta_global.len()
    }

    pub fn num_locations(&self) -> usize {
        self.theta_local.len()
    }

    pub fn num_words(&self) -> usize {
        self.phi.first().map_or(0, Vec::len)
    }

    /// `theta_local[location]`.
    pub fn location_topics(&self, location: usize) -> Result<&[F]> {
        self.theta_local
            .get(location)
            .map(Vec::as_slice)
            .ok_or(Error::UnknownLocation { location, locations: self.num_locations() })
    }

    /// The global topic distribution that applies at `location`.
    pub fn global_topics(&self, location: usize) -> &[F] {
        match &self.theta_global_by_location {
            Some(rows) => &rows[location],
            None => &self.theta_global,
        }
    }

    pub fn topic_words_for(&self, e: Locality) -> &[Vec<F>] {
        match (e, &self.phi_global) {
            (Locality::Global, Some(phi)) => phi,
            _ => &self.phi,
        }
    }

    /// `sum_k theta_e[k] * phi_e[k][w]` for both blocks at a location.
    fn block_word_mass(&self, location: usize, word: usize) -> [F; 2] {
        let mut out = [F::zero(); 2];
        for e in Locality::BOTH {
            let theta = match e {
                Locality::Local => &self.theta_local[location][..],
                Locality::Global => self.global_topics(location),
            };
            let phi = self.topic_words_for(e);
            out[e.index()] = theta.iter().zip(phi).map(|(&t, row)| t * row[word]).sum();
        }
        out
    }

    /// Ratio of the summed local to summed global generation probability of
    /// the document's words. Each word's local and global probabilities are
    /// the two block masses of its concatenated distribution, weighted by
    /// `phi[k][w]`, so they add to one per word.
    pub fn locality_score(&self, location: usize, tokens: &[u32]) -> Result<F> {
        self.location_topics(location)?;
        let k = self.num_topics();
        let (mut local, mut global) = (F::zero(), F::zero());
        let mut theta_l = vec![F::zero(); k];
        let mut theta_g = vec![F::zero(); k];
        for &w in tokens {
            let w = w as usize;
            for e in Locality::BOTH {
                let (theta, buf) = match e {
                    Locality::Local => (&self.theta_local[location][..], &mut theta_l),
                    Locality::Global => (self.global_topics(location), &mut theta_g),
                };
                for ((b, &t), row) in buf.iter_mut().zip(theta).zip(self.topic_words_for(e)) {
                    *b = t * row[w];
                }
            }
            let pi = concat_distribution(&theta_l, &theta_g, [F::one(); 2], self.lambda);
            local = local + pi[..k].iter().copied().sum::<F>();
            global = global + pi[k..].iter().copied().sum::<F>();
        }
        if global <= F::zero() {
            return Err(Error::ZeroGlobalMass);
        }
        Ok(local / global)
    }

    /// Folds in a document's local/global proportions with the topic and
    /// word distributions held fixed.
    ///
    /// Fixed-point iteration of `omega_e = (r_e + gamma_e) / (N + gamma_l +
    /// gamma_g)`, where `r_e` sums each token's responsibility for block `e`
    /// under weights `lambda_e * omega_e * sum_k theta_e[k] phi_e[k][w]`.
    pub fn document_locality(&self, location: usize, tokens: &[u32]) -> [F; 2] {
        let gl = F::lit(self.gamma_local);
        let gg = F::lit(self.gamma_global);
        let denom = F::from_len(tokens.len()) + gl + gg;
        let lam_l = F::lit(block_weight(self.lambda, Locality::Local));
        let lam_g = F::lit(block_weight(self.lambda, Locality::Global));
        let mass: Vec<[F; 2]> = tokens.iter().map(|&w| self.block_word_mass(location, w as usize)).collect();
        let mut omega = [gl / (gl + gg), gg / (gl + gg)];
        let tol = F::epsilon() * F::lit(16.0);
        for _ in 0..500 {
            let mut r_local = F::zero();
            for m in &mass {
                let a = lam_l * omega[0] * m[0];
                let b = lam_g * omega[1] * m[1];
                if a + b > F::zero() {
                    r_local = r_local + a / (a + b);
                }
            }
            let r_global = F::from_len(tokens.len()) - r_local;
            let next = [(r_local + gl) / denom, (r_global + gg) / denom];
            let delta = (next[0] - omega[0]).abs();
            omega = next;
            if delta <= tol {
                break;
            }
        }
        omega
    }

    /// The document's concatenated topic distribution, with its folded-in
    /// locality proportions as the block evidence.
    pub fn document_mixture(&self, location: usize, tokens: &[u32]) -> Vec<F> {
        let omega = self.document_locality(location, tokens);
        concat_distribution(&self.theta_local[location], self.global_topics(location), omega, self.lambda)
    }

    pub(crate) fn accumulate(&mut self, other: &Self) {
        fn add<F: Real>(a: &mut [Vec<F>], b: &[Vec<F>]) {
            for (ra, rb) in a.iter_mut().zip(b) {
                for (x, &y) in ra.iter_mut().zip(rb) {
                    *x = *x + y;
                }
            }
        }
        add(&mut self.theta_local, &other.theta_local);
        add(std::slice::from_mut(&mut self.theta_global), std::slice::from_ref(&other.theta_global));
        if let (Some(a), Some(b)) = (&mut self.theta_global_by_location, &other.theta_global_by_location) {
            add(a, b);
        }
        add(&mut self.phi, &other.phi);
        if let (Some(a), Some(b)) = (&mut self.phi_global, &other.phi_global) {
            add(a, b);
        }
    }

    pub(crate) fn scale(&mut self, factor: F) {
        let rows = self
            .theta_local
            .iter_mut()
            .chain(std::iter::once(&mut self.theta_global))
            .chain(self.theta_global_by_location.iter_mut().flatten())
            .chain(self.phi.iter_mut())
            .chain(self.phi_global.iter_mut().flatten());
        for row in rows {
            for x in row.iter_mut() {
                *x = *x * factor;
            }
        }
    }
}

impl<F: Real> TopicModel<F> for ModelEstimate<F> {
    fn num_topics(&self) -> usize {
        self.theta_global.len()
    }

    fn num_words(&self) -> usize {
        ModelEstimate::num_words(self)
    }

    fn location_topics(&self) -> &[Vec<F>] {
        &self.theta_local
    }

    fn topic_words(&self) -> &[Vec<F>] {
        &self.phi
    }

    fn token_probabilities(&self, location: usize, tokens: &[u32]) -> Vec<F> {
        let k = self.num_topics();
        let pi = self.document_mixture(location, tokens);
        let phi_l = self.topic_words_for(Locality::Local);
        let phi_g = self.topic_words_for(Locality::Global);
        tokens
            .iter()
            .map(|&w| {
                let w = w as usize;
                (0..k).map(|t| pi[t] * phi_l[t][w] + pi[k + t] * phi_g[t][w]).sum()
            })
            .collect()
    }
}
