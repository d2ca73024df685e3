//! The subtree spanned by the root and `k` leaves, reduced to its essential
//! vertices, and the limit densities it is compared against.

mod experiments;
mod llt;

pub use experiments::{
    distance_report, experiment_density, experiment_distance, experiment_parity, experiment_shape, parity_report,
    sample_skeletons, shape_report, ExperimentConfig, ExperimentReport, Model, SkeletonBatch, CSV_HEADER,
    EDGE_DENSITY_TOL, KS_THRESHOLD, P_THRESHOLD, TRIANGLE_DENSITY_TOL, TV_THRESHOLD,
};
pub use llt::{convolution_power, experiment_stable_llt, LltConfig, LltRow, LLT_THRESHOLD};

use std::collections::HashMap;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::trees::{Ancestry, NodeId, PlaneNode, ProperKTree, RootedTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(x: usize) -> Parity {
        if x % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Reduced tree on the essential vertices (the root, the chosen leaves and
/// their pairwise lowest common ancestors) with the lengths of the paths it
/// stands for.
#[derive(Clone, Debug, PartialEq)]
pub struct SkeletonSummary {
    pub k: usize,
    /// The reduced tree when it is a proper k-tree, with chosen leaf `i`
    /// labelled `i + 1`.
    pub shape: Option<ProperKTree>,
    /// Plane code of the reduced tree below the root. Proper shapes use
    /// [`ProperKTree::code`]; other shapes are written `!` followed by the
    /// code of the whole reduced tree, root included.
    pub code: String,
    /// Path length of every reduced edge, in preorder of lower endpoints.
    pub distances: Vec<usize>,
    /// Parities of `distances`.
    pub distance_parities: Vec<Parity>,
    /// Parities of the heights of the essential non-root vertices, in the
    /// same order.
    pub height_parities: Vec<Parity>,
}

impl SkeletonSummary {
    pub fn is_proper(&self) -> bool {
        self.shape.is_some()
    }

    pub fn total_length(&self) -> usize {
        self.distances.iter().sum()
    }

    /// Parity vector as a bitmask, bit `i` set when entry `i` is odd.
    pub fn parity_index(parities: &[Parity]) -> usize {
        parities.iter().enumerate().filter(|(_, &p)| p == Parity::Odd).fold(0, |m, (i, _)| m | 1 << i)
    }
}

/// Skeleton of `t` spanned by the root and `leaves`, children kept in the
/// stored order of `t`.
pub fn spanned_skeleton<T: RootedTree + ?Sized>(t: &T, leaves: &[NodeId]) -> Result<SkeletonSummary> {
    skeleton_with(t, &Ancestry::new(t), leaves, &mut || false)
}

/// As [`spanned_skeleton`], but each essential branch vertex puts its reduced
/// children in a uniformly random order. For trees without a meaningful
/// plane order this makes every plane version of the reduced shape equally
/// likely, so uniformity over proper k-trees can be tested.
pub fn spanned_skeleton_oriented<T: RootedTree + ?Sized, R: Rng + ?Sized>(
    t: &T,
    anc: &Ancestry,
    leaves: &[NodeId],
    rng: &mut R,
) -> Result<SkeletonSummary> {
    skeleton_with(t, anc, leaves, &mut || rng.random())
}

fn skeleton_with<T: RootedTree + ?Sized>(
    t: &T,
    anc: &Ancestry,
    leaves: &[NodeId],
    flip: &mut dyn FnMut() -> bool,
) -> Result<SkeletonSummary> {
    let k = leaves.len();
    if k == 0 {
        return Err(Error::OutOfRange("select at least one leaf".into()));
    }
    for (i, &v) in leaves.iter().enumerate() {
        if v >= t.node_count() {
            return Err(Error::NodeNotInTree(v));
        }
        if !t.is_leaf(v) {
            return Err(Error::OutOfRange(format!("node {v} is not a leaf")));
        }
        if leaves[..i].contains(&v) {
            return Err(Error::OutOfRange(format!("leaf {v} selected twice")));
        }
    }
    let root = t.root();
    if leaves == [root] {
        // one-vertex tree: a degenerate edge of length zero
        return Ok(SkeletonSummary {
            k,
            shape: None,
            code: "!1".into(),
            distances: vec![0],
            distance_parities: vec![Parity::Even],
            height_parities: vec![Parity::Even],
        });
    }
    let mut essential = vec![root];
    essential.extend_from_slice(leaves);
    for i in 0..k {
        for j in i + 1..k {
            essential.push(anc.lca(leaves[i], leaves[j])?);
        }
    }
    essential.sort_unstable_by_key(|&v| (anc.depth(v), v));
    essential.dedup();
    // reduced parent: the deepest essential proper ancestor
    let mut children: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    for (idx, &v) in essential.iter().enumerate().skip(1) {
        let parent = essential[..idx]
            .iter()
            .rev()
            .find(|&&a| a != v && anc.is_ancestor(a, v))
            .copied()
            .expect("the root is an ancestor");
        children.entry(parent).or_default().push(v);
    }
    // order reduced children by the child of the parent leading to them
    let position = |parent: NodeId, v: NodeId| -> usize {
        let mut x = v;
        while anc.parent(x) != Some(parent) {
            x = anc.parent(x).expect("below parent");
        }
        t.children(parent).iter().position(|&c| c == x).expect("child of parent")
    };
    for (&p, ch) in children.iter_mut() {
        ch.sort_by_key(|&v| position(p, v));
    }
    // the same random decisions in the same (depth, id) order every time
    for v in &essential {
        if let Some(ch) = children.get_mut(v) {
            if ch.len() >= 2 && flip() {
                ch.reverse();
            }
        }
    }
    let label_of: HashMap<NodeId, usize> = leaves.iter().enumerate().map(|(i, &v)| (v, i + 1)).collect();

    let mut order = Vec::new();
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        order.push(v);
        if let Some(ch) = children.get(&v) {
            stack.extend(ch.iter().rev());
        }
    }
    let parent_of: HashMap<NodeId, NodeId> =
        children.iter().flat_map(|(&p, ch)| ch.iter().map(move |&c| (c, p))).collect();
    let below: Vec<NodeId> = order[1..].to_vec();
    let distances: Vec<usize> = below.iter().map(|&v| anc.depth(v) - anc.depth(parent_of[&v])).collect();
    let distance_parities = distances.iter().map(|&d| Parity::of(d)).collect();
    let height_parities = below.iter().map(|&v| Parity::of(anc.depth(v))).collect();

    let outdeg = |v: NodeId| children.get(&v).map_or(0, Vec::len);
    let proper = !label_of.contains_key(&root)
        && outdeg(root) == 1
        && below.iter().all(|&v| matches!(outdeg(v), 0 | 2))
        && below.iter().filter(|&&v| outdeg(v) == 0).count() == k;
    let shape = proper.then(|| {
        let index: HashMap<NodeId, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let nodes = order
            .iter()
            .map(|&v| PlaneNode {
                children: children.get(&v).map_or_else(Vec::new, |ch| ch.iter().map(|c| index[c]).collect()),
                label: label_of.get(&v).copied(),
            })
            .collect();
        ProperKTree::new_unchecked(0, nodes)
    });
    let code = match &shape {
        Some(s) => s.code(),
        None => format!("!{}", plane_code(root, &children, &label_of)),
    };
    Ok(SkeletonSummary { k, shape, code, distances, distance_parities, height_parities })
}

fn plane_code(v: NodeId, children: &HashMap<NodeId, Vec<NodeId>>, label_of: &HashMap<NodeId, usize>) -> String {
    match children.get(&v) {
        None => label_of.get(&v).map_or_else(|| "o".to_string(), usize::to_string),
        Some(ch) => {
            let parts: Vec<String> = ch.iter().map(|&c| plane_code(c, children, label_of)).collect();
            let own = label_of.get(&v).map_or(String::new(), usize::to_string);
            format!("{own}({})", parts.join(","))
        }
    }
}

/// `1 · 3 ⋯ (2k - 3)`, the normalizing constant of `h`.
fn odd_double_factorial(k: usize) -> f64 {
    (1..k).map(|i| (2 * i - 1) as f64).product()
}

/// Limit density of the `2k - 1` rescaled skeleton path lengths:
/// `1·3⋯(2k-3) · S · exp(-S²/2)` with `S = Σ x_i`.
pub fn h_density(x: &[f64], k: usize) -> Result<f64> {
    if k == 0 || x.len() != 2 * k - 1 {
        return Err(Error::OutOfRange(format!("h needs 2k - 1 = {} coordinates, got {}", 2 * k.max(1) - 1, x.len())));
    }
    if let Some(bad) = x.iter().find(|&&v| !(v > 0.0)) {
        return Err(Error::OutOfRange(format!("coordinates must be positive, got {bad}")));
    }
    let s: f64 = x.iter().sum();
    Ok(odd_double_factorial(k) * s * (-s * s / 2.0).exp())
}

/// Density of the positive 1/2-stable law, `(2π)^{-1/2} x^{-3/2} e^{-1/(2x)}`.
pub fn stable_density(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::OutOfRange(format!("stable density needs x > 0, got {x}")));
    }
    Ok(stable_density_unchecked(x))
}

pub(crate) fn stable_density_unchecked(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (2.0 * std::f64::consts::PI).sqrt().recip() * x.powf(-1.5) * (-0.5 / x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::{parse_unordered, UnorderedTree};

    fn leaves_of(t: &UnorderedTree) -> Vec<NodeId> {
        t.leaves()
    }

    #[test]
    fn single_leaf_distance_is_depth() {
        let t = parse_unordered("(*,(*,(*,*)))").unwrap();
        let anc = Ancestry::new(&t);
        for v in leaves_of(&t) {
            let s = spanned_skeleton(&t, &[v]).unwrap();
            assert_eq!(s.distances, vec![anc.depth(v)]);
            assert!(s.is_proper());
            assert_eq!(s.code, "1");
        }
    }

    #[test]
    fn caterpillar_pair_is_proper() {
        // leaves at depth 2 and 3 below a common internal vertex
        let t = parse_unordered("(*,(*,(*,*)))").unwrap();
        let l = leaves_of(&t);
        // leaves in preorder: depth 1, 2, 3, 3
        let s = spanned_skeleton(&t, &[l[1], l[2]]).unwrap();
        assert!(s.is_proper());
        assert_eq!(s.distances, vec![1, 1, 2]);
        assert_eq!(s.code, "(1,2)");
        assert_eq!(s.distance_parities, vec![Parity::Odd, Parity::Odd, Parity::Even]);
        assert_eq!(s.height_parities, vec![Parity::Odd, Parity::Even, Parity::Odd]);
        assert!(s.total_length() <= t.node_count() - 1);
    }

    #[test]
    fn root_lca_is_not_proper() {
        let t = parse_unordered("(*,*)").unwrap();
        let l = leaves_of(&t);
        let s = spanned_skeleton(&t, &[l[0], l[1]]).unwrap();
        assert!(!s.is_proper());
        assert_eq!(s.code, "!(1,2)");
        assert_eq!(s.distances, vec![1, 1]);
    }

    #[test]
    fn bad_selections() {
        let t = parse_unordered("(*,(*,*))").unwrap();
        let l = leaves_of(&t);
        assert!(spanned_skeleton(&t, &[t.root()]).is_err());
        assert!(spanned_skeleton(&t, &[l[0], l[0]]).is_err());
        assert!(spanned_skeleton(&t, &[99]).is_err());
        assert!(spanned_skeleton(&t, &[]).is_err());
    }

    #[test]
    fn density_values() {
        assert!((h_density(&[1.0], 1).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        let a = h_density(&[0.1, 0.2, 0.3], 2).unwrap();
        let b = h_density(&[0.3, 0.1, 0.2], 2).unwrap();
        assert_eq!(a, b);
        assert!(h_density(&[1.0, 0.0, 1.0], 2).is_err());
        assert!(h_density(&[1.0, 1.0], 2).is_err());
        let g1 = 1.0 / (2.0 * std::f64::consts::PI).sqrt() * (-0.5f64).exp();
        assert!((stable_density(1.0).unwrap() - g1).abs() < 1e-15);
        assert!(stable_density(0.0).is_err());
    }

    #[test]
    fn parity_index_bits() {
        assert_eq!(SkeletonSummary::parity_index(&[Parity::Odd, Parity::Even, Parity::Odd]), 0b101);
    }
}
