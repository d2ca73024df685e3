//! Galton–Watson trees: the critical `η` tree behind labelled cographs and
//! the two-type tree driven by a `(ξ, ζ)` law.

use rand::seq::SliceRandom;
use rand::Rng;

use super::rng::SampleBudget;
use super::Sampled;
use crate::enumeration::{eta_law, LawSampler};
use crate::error::{Error, Result};
use crate::trees::{Color, Cotree, Sign, TwoTypeNode, TwoTypeTree, UnorderedTree};

/// Inverse-CDF sampler for `η`. Almost all mass sits on `0` and `2`, so a
/// linear scan beats a binary search.
#[derive(Clone, Debug)]
pub struct EtaSampler {
    cdf: Vec<f64>,
}

impl EtaSampler {
    pub fn new() -> Self {
        let law = eta_law();
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = law
            .xi_marginal()
            .into_iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        // absorb the truncated tail into the last outcome
        *cdf.last_mut().expect("non-empty law") = f64::INFINITY;
        EtaSampler { cdf }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf.iter().position(|&c| u < c).expect("last entry is infinite")
    }
}

impl Default for EtaSampler {
    fn default() -> Self {
        EtaSampler::new()
    }
}

/// Outdegrees of a GW tree in breadth-first order. Gives up with `None` as
/// soon as the tree is certain to have more than `cap` leaves: every node
/// still waiting to be expanded contributes at least one leaf.
fn outdegrees<R: Rng + ?Sized>(
    rng: &mut R,
    cap: usize,
    mut draw: impl FnMut(&mut R) -> usize,
) -> Option<(Vec<usize>, usize)> {
    let mut degrees = Vec::new();
    let mut pending = 1usize;
    let mut leaves = 0usize;
    while pending > 0 {
        let d = draw(rng);
        degrees.push(d);
        pending -= 1;
        if d == 0 {
            leaves += 1;
        } else {
            pending += d;
        }
        if leaves + pending > cap {
            return None;
        }
    }
    Some((degrees, leaves))
}

fn tree_from_outdegrees(degrees: &[usize]) -> UnorderedTree {
    let mut children = Vec::with_capacity(degrees.len());
    let mut next = 1;
    for &d in degrees {
        children.push((next..next + d).collect());
        next += d;
    }
    UnorderedTree::new_unchecked(0, children)
}

/// Unconditioned `η` tree. Critical, so finite almost surely, but its size
/// has infinite mean; prefer [`sample_eta_gw_tree_capped`] in loops.
pub fn sample_eta_gw_tree<R: Rng + ?Sized>(rng: &mut R, eta: &EtaSampler) -> UnorderedTree {
    sample_eta_gw_tree_capped(rng, eta, usize::MAX).expect("uncapped")
}

/// The `η` tree, or `None` if it would have more than `cap` leaves.
pub fn sample_eta_gw_tree_capped<R: Rng + ?Sized>(
    rng: &mut R,
    eta: &EtaSampler,
    cap: usize,
) -> Option<UnorderedTree> {
    let (degrees, _) = outdegrees(rng, cap, |r| eta.sample(r))?;
    Some(tree_from_outdegrees(&degrees))
}

/// Leaf count of the `η` tree without building it; `None` above `cap`.
pub fn eta_leaf_count<R: Rng + ?Sized>(rng: &mut R, eta: &EtaSampler, cap: usize) -> Option<usize> {
    let mut pending = 1usize;
    let mut leaves = 0usize;
    while pending > 0 {
        let d = eta.sample(rng);
        pending -= 1;
        if d == 0 {
            leaves += 1;
        } else {
            pending += d;
        }
        if leaves + pending > cap {
            return None;
        }
    }
    Some(leaves)
}

/// The `η` tree conditioned on its leaf count, by rejection. With a size
/// window in the budget any count inside the window is accepted.
pub fn sample_conditioned_eta_tree<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    eta: &EtaSampler,
    budget: &SampleBudget,
) -> Result<Sampled<UnorderedTree>> {
    if n == 0 {
        return Err(Error::OutOfRange("trees have at least one leaf".into()));
    }
    let (lo, hi) = budget.accepted_sizes(n);
    for attempt in 1..=budget.max_attempts {
        if let Some((degrees, leaves)) = outdegrees(rng, hi, |r| eta.sample(r)) {
            if leaves >= lo {
                return Ok(Sampled { value: tree_from_outdegrees(&degrees), attempts: attempt, leaves });
            }
        }
    }
    Err(Error::BudgetExhausted { attempts: budget.max_attempts })
}

/// Uniform labelled cotree with `n` leaves (with a size window: uniform
/// given its leaf count): a conditioned `η` tree with uniformly shuffled
/// labels, a fair root sign and signs alternating by height.
pub fn sample_labelled_cotree<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    eta: &EtaSampler,
    budget: &SampleBudget,
) -> Result<Sampled<Cotree>> {
    let s = sample_conditioned_eta_tree(n, rng, eta, budget)?;
    let mut labels: Vec<usize> = (1..=s.leaves).collect();
    labels.shuffle(rng);
    let sign = if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
    let cotree = s.value.to_cotree(sign, Some(&labels))?;
    Ok(Sampled { value: cotree, attempts: s.attempts, leaves: s.leaves })
}

/// Two-type tree with offspring law `(ξ, ζ)`: every blue node has `ξ` blue
/// and `ζ` green children, greens are infertile. Green children are listed
/// after the blue ones. `None` once the leaf count would exceed `cap`.
pub fn sample_two_type_tree<R: Rng + ?Sized>(
    rng: &mut R,
    law: &LawSampler,
    cap: usize,
) -> Option<TwoTypeTree> {
    // (blue, green) offspring in breadth-first order over blue nodes
    let mut offspring = Vec::new();
    let mut pending = 1usize;
    let mut leaves = 0usize;
    while pending > 0 {
        let (a, b) = law.sample(rng);
        offspring.push((a, b));
        pending -= 1;
        pending += a;
        leaves += b + usize::from(a == 0 && b == 0);
        if leaves + pending > cap {
            return None;
        }
    }
    let blue_count = offspring.len();
    let mut nodes: Vec<TwoTypeNode> =
        (0..blue_count).map(|_| TwoTypeNode { color: Color::Blue, children: Vec::new() }).collect();
    let mut next_blue = 1;
    for (v, &(a, b)) in offspring.iter().enumerate() {
        let mut ch: Vec<usize> = (next_blue..next_blue + a).collect();
        next_blue += a;
        for _ in 0..b {
            ch.push(nodes.len());
            nodes.push(TwoTypeNode { color: Color::Green, children: Vec::new() });
        }
        nodes[v].children = ch;
    }
    Some(TwoTypeTree::new_unchecked(0, nodes))
}

/// Leaves of a two-type tree: green nodes and childless blue nodes.
pub fn two_type_leaf_count(t: &TwoTypeTree) -> usize {
    t.nodes().iter().filter(|n| n.children.is_empty()).count()
}

/// Leaf count of the two-type tree without building it; `None` above `cap`.
pub fn two_type_leaf_count_sampled<R: Rng + ?Sized>(rng: &mut R, law: &LawSampler, cap: usize) -> Option<usize> {
    let mut pending = 1usize;
    let mut leaves = 0usize;
    while pending > 0 {
        let (a, b) = law.sample(rng);
        pending -= 1;
        pending += a;
        leaves += b + usize::from(a == 0 && b == 0);
        if leaves + pending > cap {
            return None;
        }
    }
    Some(leaves)
}
