//! Uniform random cographs.

use rand::Rng;

use super::boltzmann::{sample_unlabelled_cotree, BoltzmannSampler};
use super::gw::{sample_labelled_cotree, EtaSampler};
use super::rng::SampleBudget;
use super::Sampled;
use crate::bijection::cotree_to_cograph;
use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::trees::Cotree;

/// A sampled cograph together with the cotree it came from.
#[derive(Clone, Debug)]
pub struct CographSample {
    pub graph: LabeledGraph,
    pub cotree: Cotree,
}

fn check_size(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::OutOfRange(format!("cograph samplers need n ≥ 3, got {n}")));
    }
    Ok(())
}

/// Uniform labelled cograph on `1..=n`.
pub fn sample_labelled_cograph<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    eta: &EtaSampler,
    budget: &SampleBudget,
) -> Result<Sampled<CographSample>> {
    check_size(n)?;
    let s = sample_labelled_cotree(n, rng, eta, budget)?;
    let graph = cotree_to_cograph(&s.value)?;
    debug_assert!(crate::bijection::is_cograph(&graph), "sampled graph contains an induced P4");
    Ok(Sampled { value: CographSample { graph, cotree: s.value }, attempts: s.attempts, leaves: s.leaves })
}

/// Uniform unlabelled cograph on `n` vertices, returned as the graph of its
/// canonically labelled cotree.
pub fn sample_unlabelled_cograph<R: Rng + Clone>(
    n: usize,
    rng: &mut R,
    sampler: &BoltzmannSampler,
    budget: &SampleBudget,
) -> Result<Sampled<CographSample>> {
    check_size(n)?;
    let s = sample_unlabelled_cotree(n, rng, sampler, budget)?;
    let graph = cotree_to_cograph(&s.value)?;
    debug_assert!(crate::bijection::is_cograph(&graph), "sampled graph contains an induced P4");
    Ok(Sampled { value: CographSample { graph, cotree: s.value }, attempts: s.attempts, leaves: s.leaves })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bijection::{cograph_to_cotree, is_cograph};
    use crate::samplers::RngHandle;
    use crate::trees::Canonical;

    #[test]
    fn outputs_are_cographs_and_round_trip() {
        let mut rng = RngHandle::new(8, 0).rng();
        let eta = EtaSampler::new();
        let b = BoltzmannSampler::at_rho();
        let budget = SampleBudget::default();
        for n in [3, 4, 9, 30] {
            let l = sample_labelled_cograph(n, &mut rng, &eta, &budget).unwrap().value;
            assert!(is_cograph(&l.graph));
            assert_eq!(cograph_to_cotree(&l.graph).unwrap(), l.cotree.canonicalize());
            let u = sample_unlabelled_cograph(n, &mut rng, b, &budget).unwrap().value;
            assert!(is_cograph(&u.graph));
            assert_eq!(cograph_to_cotree(&u.graph).unwrap(), u.cotree.canonicalize());
        }
        assert!(sample_labelled_cograph(2, &mut rng, &eta, &budget).is_err());
        assert!(sample_unlabelled_cograph(2, &mut rng, b, &budget).is_err());
    }
}
