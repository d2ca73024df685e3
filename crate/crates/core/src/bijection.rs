//! Cographs and their cotrees.
//!
//! A `-` node is the disjoint union of its branches and a `+` node their
//! join, so two leaves are adjacent exactly when their lowest common
//! ancestor is a `+` node.

use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::trees::{Ancestry, Canonical, Cotree, GeneralizedCotree, RootedTree, Sign, SignedNode, SignedTree};

/// Evaluates a signed tree bottom-up as unions and joins of its branches.
fn evaluate(t: &SignedTree) -> Result<LabeledGraph> {
    let n = t.leaf_count();
    let mut g = LabeledGraph::empty(n);
    if !t.is_labelled() {
        return Err(Error::UnlabelledLeaves);
    }
    let mut below: Vec<Vec<usize>> = vec![Vec::new(); t.node_count()];
    for v in t.preorder().into_iter().rev() {
        if let Some(l) = t.label(v) {
            below[v].push(l);
            continue;
        }
        let mut acc: Vec<usize> = Vec::new();
        for &c in t.children(v) {
            let part = std::mem::take(&mut below[c]);
            if t.sign(v) == Some(Sign::Plus) {
                for &a in &acc {
                    for &b in &part {
                        g.add_edge(a, b);
                    }
                }
            }
            acc.extend(part);
        }
        below[v] = acc;
    }
    Ok(g)
}

/// The cograph encoded by a labelled cotree, on vertices 1..n.
pub fn cotree_to_cograph(t: &Cotree) -> Result<LabeledGraph> {
    evaluate(t.as_tree())
}

/// The graph of a generalized cotree: `u ~ v` iff the lowest common ancestor
/// of leaves `u` and `v` is a `+` node.
pub fn gen_cotree_to_graph(d: &GeneralizedCotree) -> Result<LabeledGraph> {
    evaluate(d.as_tree())
}

/// Pairwise lowest-common-ancestor evaluation; quadratic in the leaf count
/// times the height. Used as an independent check of the bottom-up map.
pub fn adjacency_by_lca(t: &SignedTree) -> Result<LabeledGraph> {
    let leaf = t.leaves_by_label()?;
    let anc = Ancestry::new(t);
    let n = leaf.len();
    let mut g = LabeledGraph::empty(n);
    for u in 1..=n {
        for v in u + 1..=n {
            if t.sign(anc.lca(leaf[u - 1], leaf[v - 1])?) == Some(Sign::Plus) {
                g.add_edge(u, v);
            }
        }
    }
    Ok(g)
}

/// Recovers the canonical cotree of a cograph by splitting on connected
/// components of the graph and of its complement.
pub fn cograph_to_cotree(g: &LabeledGraph) -> Result<Cotree> {
    let n = g.n();
    if n == 0 {
        return Err(Error::InvalidGraph("the empty graph has no cotree".into()));
    }
    let mut nodes: Vec<SignedNode> = Vec::with_capacity(2 * n);
    // (vertex subset, arena slot to fill)
    let mut work: Vec<(Vec<usize>, usize)> = vec![((0..n).collect(), 0)];
    nodes.push(SignedNode::leaf(None));
    while let Some((set, slot)) = work.pop() {
        if set.len() == 1 {
            nodes[slot] = SignedNode::leaf(Some(set[0] + 1));
            continue;
        }
        let (sign, parts) = {
            let comps = g.components0(&set);
            if comps.len() > 1 {
                (Sign::Minus, comps)
            } else {
                let co = g.co_components0(&set);
                if co.len() == 1 {
                    return Err(Error::NotACograph(set.iter().map(|v| v + 1).collect()));
                }
                (Sign::Plus, co)
            }
        };
        let mut children = Vec::with_capacity(parts.len());
        for part in parts {
            let id = nodes.len();
            nodes.push(SignedNode::leaf(None));
            children.push(id);
            work.push((part, id));
        }
        nodes[slot] = SignedNode::internal(sign, children);
    }
    let t = Cotree::new(SignedTree::new(0, nodes)?)?;
    Ok(t.canonicalize())
}

pub fn is_cograph(g: &LabeledGraph) -> bool {
    match cograph_to_cotree(g) {
        Ok(_) => true,
        Err(Error::NotACograph(_)) => false,
        Err(_) => g.n() == 0,
    }
}

/// Exhaustive search for an induced path on four vertices, O(n^4).
pub fn find_induced_p4(g: &LabeledGraph) -> Option<[usize; 4]> {
    let n = g.n();
    for b in 1..=n {
        for c in 1..=n {
            if b == c || !g.has_edge(b, c) {
                continue;
            }
            for a in 1..=n {
                if a == b || a == c || !g.has_edge(a, b) || g.has_edge(a, c) {
                    continue;
                }
                for d in 1..=n {
                    if d != a && d != b && d != c && g.is_induced_p4([a, b, c, d]) {
                        return Some([a, b, c, d]);
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::parse_cotree;

    fn graph(text: &str) -> LabeledGraph {
        cotree_to_cograph(&parse_cotree(text).unwrap().into_cotree().unwrap()).unwrap()
    }

    #[test]
    fn small_cotrees() {
        assert_eq!(graph("+(1,2)").edges(), vec![(1, 2)]);
        assert_eq!(graph("-(1,2)").edge_count(), 0);
        assert_eq!(graph("-(1,+(2,-(3,4)))").edges(), vec![(2, 3), (2, 4)]);
        assert_eq!(graph("1").n(), 1);
    }

    #[test]
    fn generalized_trees() {
        let d = parse_cotree("+(1,+(2,3))").unwrap().into_generalized();
        assert_eq!(gen_cotree_to_graph(&d).unwrap(), LabeledGraph::complete(3));
        let d = parse_cotree("+(1,-(2,3))").unwrap().into_generalized();
        assert_eq!(gen_cotree_to_graph(&d).unwrap().edges(), vec![(1, 2), (1, 3)]);
    }

    #[test]
    fn inverse_map() {
        let k2 = LabeledGraph::complete(2);
        assert_eq!(cograph_to_cotree(&k2).unwrap().canonical_string(), "+(1,2)");
        assert_eq!(cograph_to_cotree(&LabeledGraph::path(4)), Err(Error::NotACograph(vec![1, 2, 3, 4])));
        assert!(!is_cograph(&LabeledGraph::cycle(5)));
        assert!(is_cograph(&LabeledGraph::cycle(4)));
    }

    #[test]
    fn unlabelled_tree_has_no_graph() {
        let t = parse_cotree("+(*,*)").unwrap().into_cotree().unwrap();
        assert_eq!(cotree_to_cograph(&t), Err(Error::UnlabelledLeaves));
    }

    #[test]
    fn p4_search() {
        assert!(find_induced_p4(&LabeledGraph::path(4)).is_some());
        assert!(find_induced_p4(&LabeledGraph::cycle(5)).is_some());
        assert!(find_induced_p4(&LabeledGraph::cycle(4)).is_none());
    }
}
