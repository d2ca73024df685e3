//! Proper k-trees and the random graphs `H_k^p` built from them.

use rand::Rng;

use crate::bijection::gen_cotree_to_graph;
use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::trees::{NodeId, PlaneNode, ProperKTree, Sign};

pub const MAX_ENUMERATED_K: usize = 6;

/// Number of proper k-trees, `2^{k-1} · 1 · 3 ⋯ (2k-3)`.
pub fn proper_k_tree_count(k: usize) -> u128 {
    (1..k).map(|i| 2 * (2 * i as u128 - 1)).product()
}

/// Arena for leaf insertion. Node 0 is the planted root, node 1 leaf 1.
#[derive(Clone)]
struct Growing {
    nodes: Vec<PlaneNode>,
    parent: Vec<NodeId>,
}

impl Growing {
    fn start() -> Self {
        Growing {
            nodes: vec![
                PlaneNode { children: vec![1], label: None },
                PlaneNode { children: Vec::new(), label: Some(1) },
            ],
            parent: vec![usize::MAX, 0],
        }
    }

    /// Subdivides the edge above `below` and hangs leaf `label` from the new
    /// vertex, on the left or the right.
    fn insert(&mut self, below: NodeId, label: usize, leaf_left: bool) {
        let above = self.parent[below];
        let mid = self.nodes.len();
        let leaf = mid + 1;
        let slot = self.nodes[above].children.iter().position(|&c| c == below).expect("edge exists");
        self.nodes[above].children[slot] = mid;
        let children = if leaf_left { vec![leaf, below] } else { vec![below, leaf] };
        self.nodes.push(PlaneNode { children, label: None });
        self.nodes.push(PlaneNode { children: Vec::new(), label: Some(label) });
        self.parent[below] = mid;
        self.parent.push(above);
        self.parent.push(mid);
    }

    fn finish(self) -> ProperKTree {
        ProperKTree::new_unchecked(0, self.nodes)
    }
}

/// Uniform proper k-tree: leaf `j + 1` subdivides one of the `2j - 1` edges
/// uniformly and goes to its left or right with equal probability. Every
/// tree arises from exactly one sequence of choices.
pub fn sample_proper_k_tree<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<ProperKTree> {
    if k == 0 {
        return Err(Error::OutOfRange("k must be at least 1".into()));
    }
    let mut g = Growing::start();
    for label in 2..=k {
        // edges are named by their lower endpoint, nodes 1..len
        let below = rng.random_range(1..g.nodes.len());
        g.insert(below, label, rng.random());
    }
    Ok(g.finish())
}

/// Every proper k-tree, each exactly once, for `1 ≤ k ≤ MAX_ENUMERATED_K`.
pub fn enumerate_proper_k_trees(k: usize) -> Result<Vec<ProperKTree>> {
    if k == 0 || k > MAX_ENUMERATED_K {
        return Err(Error::OutOfRange(format!("enumeration needs 1 ≤ k ≤ {MAX_ENUMERATED_K}, got {k}")));
    }
    let mut level = vec![Growing::start()];
    for label in 2..=k {
        let mut next = Vec::with_capacity(level.len() * 2 * (2 * label - 3));
        for g in &level {
            for below in 1..g.nodes.len() {
                for left in [true, false] {
                    let mut h = g.clone();
                    h.insert(below, label, left);
                    next.push(h);
                }
            }
        }
        level = next;
    }
    Ok(level.into_iter().map(Growing::finish).collect())
}

fn check_probability(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRange(format!("p must lie in (0, 1), got {p}")));
    }
    Ok(())
}

/// `H_k^p`: a uniform proper k-tree with its root edge removed and each
/// branch vertex independently `⊕` with probability `p`, read as a graph on
/// `1..=k` through lowest common ancestors.
pub fn sample_hkp<R: Rng + ?Sized>(k: usize, p: f64, rng: &mut R) -> Result<LabeledGraph> {
    check_probability(p)?;
    let tree = sample_proper_k_tree(k, rng)?;
    let signs: Vec<Sign> = (0..k - 1).map(|_| if rng.random::<f64>() < p { Sign::Plus } else { Sign::Minus }).collect();
    let graph = gen_cotree_to_graph(&tree.to_generalized_cotree(&signs)?)?;
    debug_assert!(crate::bijection::is_cograph(&graph), "sampled graph contains an induced P4");
    Ok(graph)
}
