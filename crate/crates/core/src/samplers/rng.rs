use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// A reproducible random stream: the same `(seed, stream)` always yields the
/// same sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RngHandle {
    pub seed: u64,
    pub stream: u64,
}

impl RngHandle {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngHandle { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Stream `i` under the same seed. Batches use one stream per chunk of
    /// work, so results do not depend on the number of worker threads.
    pub fn with_stream(&self, stream: u64) -> Self {
        RngHandle { seed: self.seed, stream }
    }
}

/// Limits for rejection samplers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampleBudget {
    pub max_attempts: u64,
    /// Accept any size `ℓ` with `|ℓ - n| ≤ size_window · n` instead of only `ℓ = n`.
    pub size_window: Option<f64>,
}

impl SampleBudget {
    pub fn new(max_attempts: u64) -> Result<Self> {
        if max_attempts == 0 {
            return Err(Error::OutOfRange("max_attempts must be at least 1".into()));
        }
        Ok(SampleBudget { max_attempts, size_window: None })
    }

    pub fn with_window(self, eps: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps < 1.0) {
            return Err(Error::OutOfRange(format!("size window must lie in [0, 1), got {eps}")));
        }
        Ok(SampleBudget { size_window: Some(eps), ..self })
    }

    /// Inclusive range of accepted sizes for target `n`.
    pub fn accepted_sizes(&self, n: usize) -> (usize, usize) {
        match self.size_window {
            None => (n, n),
            Some(eps) => {
                let slack = (eps * n as f64).floor() as usize;
                (n.saturating_sub(slack).max(1), n + slack)
            }
        }
    }
}

impl Default for SampleBudget {
    fn default() -> Self {
        SampleBudget { max_attempts: 100_000_000, size_window: None }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_handle_same_stream() {
        let h = RngHandle::new(7, 3);
        let a: Vec<u64> = h.rng().random_iter().take(8).collect();
        let b: Vec<u64> = h.rng().random_iter().take(8).collect();
        assert_eq!(a, b);
        let c: Vec<u64> = h.with_stream(4).rng().random_iter().take(8).collect();
        assert_ne!(a, c);
    }

    #[test]
    fn budget_bounds() {
        assert!(SampleBudget::new(0).is_err());
        let b = SampleBudget::new(10).unwrap();
        assert_eq!(b.accepted_sizes(100), (100, 100));
        let w = b.with_window(0.1).unwrap();
        assert_eq!(w.accepted_sizes(100), (90, 110));
        assert!(b.with_window(1.5).is_err());
    }
}
