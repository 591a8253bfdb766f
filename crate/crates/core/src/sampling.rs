use crate::scalar::Real;

/// Index drawn from unnormalized, non-negative `weights` given a uniform
/// variate `u` in `[0, 1)`.
///
/// Normalization is exact: the target `u * sum(weights)` is located by a
/// linear scan of the cumulative sums. Rounding at the top end falls back to
/// the last index with positive weight.
pub fn sample_index<F: Real>(weights: &[F], u: F) -> usize {
    let total: F = weights.iter().copied().sum();
    debug_assert!(total > F::zero(), "weights must have positive mass");
    let target = u * total;
    let mut acc = F::zero();
    for (i, &w) in weights.iter().enumerate() {
        acc = acc + w;
        if target < acc {
            return i;
        }
    }
    weights.iter().rposition(|&w| w > F::zero()).unwrap_or(weights.len() - 1)
}

/// Deterministic per-run seed for run `index` of a batch started from
/// `base` (splitmix64 finalizer).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_by_cumulative_mass() {
        let w = [1.0f64, 0.0, 3.0];
        assert_eq!(sample_index(&w, 0.0), 0);
        assert_eq!(sample_index(&w, 0.24), 0);
        assert_eq!(sample_index(&w, 0.25), 2);
        assert_eq!(sample_index(&w, 0.999_999), 2);
    }

    #[test]
    fn top_end_skips_trailing_zeros() {
        let w = [0.5f32, 0.5, 0.0];
        assert_eq!(sample_index(&w, 1.0), 1);
    }

    #[test]
    fn derived_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..100).map(|i| derive_seed(42, i)).collect();
        assert_eq!(seeds.len(), 100);
        assert_eq!(derive_seed(42, 3), derive_seed(42, 3));
    }
}
