//! Random generators and exhaustive oracles.

mod boltzmann;
mod cographs;
mod exact;
mod gw;
mod ktree;
mod rng;

pub use boltzmann::{sample_unlabelled_cotree, sample_unlabelled_tree, BoltzmannSampler, BoltzmannTree, MAX_EXPONENT};
pub use cographs::{sample_labelled_cograph, sample_unlabelled_cograph, CographSample};
pub use exact::{enumerate_labelled_cotrees, enumerate_unlabelled_trees, MAX_LABELLED_LEAVES, MAX_UNLABELLED_LEAVES};
pub use gw::{
    eta_leaf_count, sample_conditioned_eta_tree, sample_eta_gw_tree, sample_eta_gw_tree_capped,
    sample_labelled_cotree, sample_two_type_tree, two_type_leaf_count, two_type_leaf_count_sampled, EtaSampler,
};
pub use ktree::{enumerate_proper_k_trees, proper_k_tree_count, sample_hkp, sample_proper_k_tree, MAX_ENUMERATED_K};
pub use rng::{RngHandle, SampleBudget};

/// A value from a rejection sampler with the number of attempts it took
/// and its actual size.
#[derive(Clone, Debug)]
pub struct Sampled<T> {
    pub value: T,
    pub attempts: u64,
    pub leaves: usize,
}
