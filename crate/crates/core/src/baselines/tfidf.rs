use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::BaselineEstimate;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::model::ModelKind;
use crate::sampling::sample_index;
use crate::scalar::Real;

const MAX_LLOYD_ITERATIONS: usize = 300;

/// Per-location sums of document tf-idf vectors, with raw term counts as tf
/// and `ln(D / df_w)` as idf.
pub fn tfidf_location_vectors<F: Real>(corpus: &Corpus) -> Vec<Vec<F>> {
    let w = corpus.num_words();
    let mut df = vec![0usize; w];
    for doc in corpus.documents() {
        let uniq: HashSet<u32> = doc.tokens.iter().copied().collect();
        for t in uniq {
            df[t as usize] += 1;
        }
    }
    let d = F::from_len(corpus.documents().len());
    let idf: Vec<F> = df.iter().map(|&n| if n == 0 { F::zero() } else { (d / F::from_len(n)).ln() }).collect();
    let mut out = vec![vec![F::zero(); w]; corpus.num_locations()];
    for doc in corpus.documents() {
        let row = &mut out[doc.location];
        for &t in &doc.tokens {
            row[t as usize] = row[t as usize] + idf[t as usize];
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult<F> {
    pub assignments: Vec<usize>,
    pub centers: Vec<Vec<F>>,
    /// Within-cluster sum of squares after each Lloyd iteration.
    pub objective: Vec<F>,
}

fn sq_dist<F: Real>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

fn nearest<F: Real>(point: &[F], centers: &[Vec<F>]) -> (usize, F) {
    let mut best = (0, F::infinity());
    for (c, center) in centers.iter().enumerate() {
        let d = sq_dist(point, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Lloyd's algorithm with k-means++ seeding and Euclidean distance. An
/// emptied cluster is reseeded with the point farthest from its center.
pub fn kmeans<F: Real>(points: &[Vec<F>], k: usize, seed: u64) -> Result<KMeansResult<F>> {
    let distinct = {
        let mut seen: Vec<&Vec<F>> = Vec::new();
        for p in points {
            if !seen.contains(&p) {
                seen.push(p);
            }
        }
        seen.len()
    };
    if k == 0 || distinct < k {
        return Err(Error::TooFewDistinctVectors { clusters: k, distinct });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut centers: Vec<Vec<F>> = vec![points[rng.random_range(0..points.len())].clone()];
    while centers.len() < k {
        let d2: Vec<F> = points.iter().map(|p| nearest(p, &centers).1).collect();
        let u = F::lit(rng.random::<f64>());
        let next = sample_index(&d2, u);
        centers.push(points[next].clone());
    }

    let dims = points[0].len();
    let mut assignments: Vec<usize> = vec![usize::MAX; points.len()];
    let mut objective = Vec::new();
    for _ in 0..MAX_LLOYD_ITERATIONS {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let (c, _) = nearest(p, &centers);
            if assignments[i] != c {
                assignments[i] = c;
                changed = true;
            }
        }
        loop {
            let mut sizes = vec![0usize; k];
            for &a in &assignments {
                sizes[a] += 1;
            }
            let Some(empty) = sizes.iter().position(|&s| s == 0) else {
                break;
            };
            // Farthest point among clusters that can spare one.
            let (far, _) = points
                .iter()
                .enumerate()
                .filter(|&(i, _)| sizes[assignments[i]] > 1)
                .map(|(i, p)| (i, sq_dist(p, &centers[assignments[i]])))
                .fold((usize::MAX, F::neg_infinity()), |best, cur| if cur.1 > best.1 { cur } else { best });
            assignments[far] = empty;
            centers[empty] = points[far].clone();
            changed = true;
        }

        let mut sums = vec![vec![F::zero(); dims]; k];
        let mut sizes = vec![0usize; k];
        for (p, &a) in points.iter().zip(&assignments) {
            sizes[a] += 1;
            for (s, &x) in sums[a].iter_mut().zip(p) {
                *s = *s + x;
            }
        }
        for ((center, sum), &n) in centers.iter_mut().zip(sums).zip(&sizes) {
            let n = F::from_len(n);
            *center = sum.into_iter().map(|s| s / n).collect();
        }
        objective.push(points.iter().zip(&assignments).map(|(p, &a)| sq_dist(p, &centers[a])).sum());
        if !changed {
            break;
        }
    }
    Ok(KMeansResult { assignments, centers, objective })
}

/// Clusters tf-idf location vectors into `k_clusters` topics. Topic-word
/// rows are the cluster centers clamped at zero and L1-normalized (uniform if
/// a center is all zero); each location is one-hot on its cluster.
pub fn train_tfidf_kmeans<F: Real>(corpus: &Corpus, k_clusters: usize, seed: u64) -> Result<BaselineEstimate<F>> {
    let vectors = tfidf_location_vectors::<F>(corpus);
    let result = kmeans(&vectors, k_clusters, seed)?;
    let w = corpus.num_words();
    let topic_words = result
        .centers
        .into_iter()
        .map(|c| {
            let mut row: Vec<F> = c.into_iter().map(|x| x.max(F::zero())).collect();
            if crate::scalar::normalize(&mut row) <= F::zero() {
                row.fill(F::one() / F::from_len(w));
            }
            row
        })
        .collect();
    let location_topics = result
        .assignments
        .iter()
        .map(|&a| {
            let mut row = vec![F::zero(); k_clusters];
            row[a] = F::one();
            row
        })
        .collect();
    Ok(BaselineEstimate { kind: ModelKind::TfidfKmeans, location_topics, topic_words })
}
