use super::{NodeId, RootedTree};
use crate::error::{Error, Result};

/// Parent pointers and depths, for repeated ancestor queries on one tree.
#[derive(Clone, Debug)]
pub struct Ancestry {
    parent: Vec<Option<NodeId>>,
    depth: Vec<usize>,
}

impl Ancestry {
    pub fn new<T: RootedTree + ?Sized>(t: &T) -> Self {
        Ancestry { parent: t.parents(), depth: t.depths() }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v]
    }

    pub fn depth(&self, v: NodeId) -> usize {
        self.depth[v]
    }

    /// Deepest common ancestor of `u` and `v`; walks parent pointers, so the
    /// cost is linear in the depth.
    pub fn lca(&self, u: NodeId, v: NodeId) -> Result<NodeId> {
        if u >= self.len() {
            return Err(Error::NodeNotInTree(u));
        }
        if v >= self.len() {
            return Err(Error::NodeNotInTree(v));
        }
        let (mut a, mut b) = (u, v);
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].expect("non-root has a parent");
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("non-root has a parent");
        }
        while a != b {
            a = self.parent[a].expect("non-root has a parent");
            b = self.parent[b].expect("non-root has a parent");
        }
        Ok(a)
    }

    /// Whether `a` is an ancestor of `v` (every node is its own ancestor).
    pub fn is_ancestor(&self, a: NodeId, mut v: NodeId) -> bool {
        while self.depth[v] > self.depth[a] {
            v = self.parent[v].expect("non-root has a parent");
        }
        v == a
    }
}

/// Lowest common ancestor of two nodes of `t`.
pub fn lca<T: RootedTree + ?Sized>(t: &T, u: NodeId, v: NodeId) -> Result<NodeId> {
    Ancestry::new(t).lca(u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::parse_cotree;

    #[test]
    fn lca_in_small_cotree() {
        let t = parse_cotree("-(1,+(2,3))").unwrap().tree;
        let leaf = t.leaves_by_label().unwrap();
        let plus = lca(&t, leaf[1], leaf[2]).unwrap();
        assert_eq!(t.sign(plus), Some(crate::trees::Sign::Plus));
        assert_eq!(lca(&t, leaf[0], leaf[1]).unwrap(), t.root());
        assert_eq!(lca(&t, leaf[2], leaf[2]).unwrap(), leaf[2]);
        assert_eq!(lca(&t, 0, 99), Err(Error::NodeNotInTree(99)));
    }

    #[test]
    fn ancestor_relation() {
        let t = parse_cotree("-(1,+(2,3))").unwrap().tree;
        let a = Ancestry::new(&t);
        let leaf = t.leaves_by_label().unwrap();
        assert!(a.is_ancestor(t.root(), leaf[2]));
        assert!(!a.is_ancestor(leaf[0], leaf[2]));
    }
}
