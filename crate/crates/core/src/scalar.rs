//! Floating-point scalar abstraction shared by estimates, samplers and metrics.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar type used for probabilities and sampling weights (`f32` or `f64`).
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Short name written into serialized artifacts.
    const NAME: &'static str;

    /// Converts an `f64` literal or hyperparameter into this scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Real type")
    }

    fn count(n: u32) -> Self {
        Self::from_u32(n).expect("count is representable")
    }

    fn from_len(n: usize) -> Self {
        Self::from_usize(n).expect("length is representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl Real for f32 {
    const NAME: &'static str = "f32";
}

impl Real for f64 {
    const NAME: &'static str = "f64";
}

/// Normalizes `v` in place so it sums to one. Returns the original sum.
pub fn normalize<F: Real>(v: &mut [F]) -> F {
    let total: F = v.iter().copied().sum();
    if total > F::zero() {
        for x in v.iter_mut() {
            *x = *x / total;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_sums_to_one() {
        let mut v = vec![1.0f32, 3.0];
        assert_eq!(normalize(&mut v), 4.0);
        assert_eq!(v, vec![0.25, 0.75]);
    }

    #[test]
    fn normalize_leaves_zero_vector() {
        let mut v = vec![0.0f64; 3];
        assert_eq!(normalize(&mut v), 0.0);
        assert!(v.iter().all(|&x| x == 0.0));
    }
}
