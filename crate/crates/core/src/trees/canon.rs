use super::{Cotree, GeneralizedCotree, NodeId, RootedTree, SignedNode, SignedTree, UnorderedTree};

/// Trees whose children can be put into canonical order.
///
/// The canonical order sorts the children of every node by the byte-wise
/// lexicographic order of their canonical serializations, so two trees are
/// isomorphic as unordered trees (preserving signs and labels) iff their
/// canonical strings agree.
pub trait Canonical: Sized {
    fn canonical_string(&self) -> String;
    fn canonicalize(&self) -> Self;
}

pub fn canonicalize<T: Canonical>(t: &T) -> T {
    t.canonicalize()
}

pub fn canonical_string<T: Canonical>(t: &T) -> String {
    t.canonical_string()
}

/// Canonical serialization of every fringe subtree, indexed by node.
pub fn canonical_strings<T: RootedTree + ?Sized>(
    t: &T,
    leaf: impl Fn(NodeId) -> String,
    prefix: impl Fn(NodeId) -> &'static str,
) -> Vec<String> {
    let mut out = vec![String::new(); t.node_count()];
    for v in t.preorder().into_iter().rev() {
        if t.is_leaf(v) {
            out[v] = leaf(v);
            continue;
        }
        let mut parts: Vec<&str> = t.children(v).iter().map(|&c| out[c].as_str()).collect();
        parts.sort_unstable();
        let mut s = String::with_capacity(parts.iter().map(|p| p.len() + 1).sum::<usize>() + 3);
        s.push_str(prefix(v));
        s.push('(');
        for (i, p) in parts.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(p);
        }
        s.push(')');
        out[v] = s;
    }
    out
}

/// Preorder relabelling with children sorted by `keys`. Returns the old id of
/// each new node and the new child lists.
fn reorder<T: RootedTree + ?Sized>(t: &T, keys: &[String]) -> (Vec<NodeId>, Vec<Vec<NodeId>>) {
    let mut old_of = Vec::with_capacity(t.node_count());
    let mut new_of = vec![usize::MAX; t.node_count()];
    let mut stack = vec![t.root()];
    let mut sorted_children: Vec<Vec<NodeId>> = vec![Vec::new(); t.node_count()];
    while let Some(v) = stack.pop() {
        new_of[v] = old_of.len();
        old_of.push(v);
        let mut ch = t.children(v).to_vec();
        ch.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        stack.extend(ch.iter().rev().copied());
        sorted_children[v] = ch;
    }
    let children = old_of
        .iter()
        .map(|&v| sorted_children[v].iter().map(|&c| new_of[c]).collect())
        .collect();
    (old_of, children)
}

fn signed_strings(t: &SignedTree) -> Vec<String> {
    canonical_strings(
        t,
        |v| match t.label(v) {
            Some(l) => l.to_string(),
            None => "*".to_string(),
        },
        |v| match t.sign(v) {
            Some(super::Sign::Plus) => "+",
            Some(super::Sign::Minus) => "-",
            None => "",
        },
    )
}

impl Canonical for SignedTree {
    fn canonical_string(&self) -> String {
        signed_strings(self).swap_remove(self.root())
    }

    fn canonicalize(&self) -> Self {
        let keys = signed_strings(self);
        let (old_of, children) = reorder(self, &keys);
        let nodes = old_of
            .iter()
            .zip(children)
            .map(|(&v, ch)| SignedNode { sign: self.sign(v), label: self.label(v), children: ch })
            .collect();
        SignedTree::new_unchecked(0, nodes)
    }
}

impl Canonical for Cotree {
    fn canonical_string(&self) -> String {
        self.as_tree().canonical_string()
    }
    fn canonicalize(&self) -> Self {
        Cotree::new_unchecked(self.as_tree().canonicalize())
    }
}

impl Canonical for GeneralizedCotree {
    fn canonical_string(&self) -> String {
        self.as_tree().canonical_string()
    }
    fn canonicalize(&self) -> Self {
        GeneralizedCotree::new(self.as_tree().canonicalize())
    }
}

fn unordered_strings(t: &UnorderedTree) -> Vec<String> {
    canonical_strings(t, |_| "*".to_string(), |_| "")
}

impl Canonical for UnorderedTree {
    fn canonical_string(&self) -> String {
        unordered_strings(self).swap_remove(self.root())
    }

    fn canonicalize(&self) -> Self {
        let keys = unordered_strings(self);
        let (_, children) = reorder(self, &keys);
        UnorderedTree::new_unchecked(0, children)
    }
}
