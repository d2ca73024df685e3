//! Rooted trees used throughout the crate.
//!
//! All trees are stored as index arenas: node `i` lives at `nodes[i]` and
//! refers to its children by index. Trees built by the parsers and by
//! [`canonicalize`](canon::canonicalize) number their nodes in preorder with
//! the root at index 0; trees built elsewhere only guarantee a valid arena.

mod canon;
mod lca;
mod text;

pub use canon::{canonical_string, canonical_strings, canonicalize, Canonical};
pub use lca::{lca, Ancestry};
pub use text::{
    parse_cotree, parse_cotree_json, parse_unordered, serialize_cotree, serialize_unordered,
    to_json, ParsedCotree,
};

use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Read-only access shared by every tree flavour.
pub trait RootedTree {
    fn root(&self) -> NodeId;
    fn node_count(&self) -> usize;
    fn children(&self, v: NodeId) -> &[NodeId];

    fn is_leaf(&self, v: NodeId) -> bool {
        self.children(v).is_empty()
    }

    /// Nodes in depth-first preorder, children visited in stored order.
    fn preorder(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.node_count());
        let mut stack = vec![self.root()];
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(self.children(v).iter().rev().copied());
        }
        order
    }

    /// Leaves in left-to-right order.
    fn leaves(&self) -> Vec<NodeId> {
        self.preorder().into_iter().filter(|&v| self.is_leaf(v)).collect()
    }

    fn leaf_count(&self) -> usize {
        (0..self.node_count()).filter(|&v| self.is_leaf(v)).count()
    }

    fn parents(&self) -> Vec<Option<NodeId>> {
        let mut parent = vec![None; self.node_count()];
        for v in 0..self.node_count() {
            for &c in self.children(v) {
                parent[c] = Some(v);
            }
        }
        parent
    }

    fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.node_count()];
        for v in self.preorder() {
            for &c in self.children(v) {
                depth[c] = depth[v] + 1;
            }
        }
        depth
    }

    fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0)
    }
}

/// Checks that `children` describes a single tree rooted at `root` that
/// covers every arena slot exactly once.
fn check_arena(root: NodeId, len: usize, children: impl Fn(NodeId) -> Vec<NodeId>) -> Result<()> {
    if root >= len {
        return Err(Error::InvalidTree(format!("root {root} outside arena of {len}")));
    }
    let mut seen = vec![false; len];
    let mut stack = vec![root];
    seen[root] = true;
    let mut visited = 0;
    while let Some(v) = stack.pop() {
        visited += 1;
        for c in children(v) {
            if c >= len {
                return Err(Error::InvalidTree(format!("child {c} outside arena of {len}")));
            }
            if seen[c] {
                return Err(Error::InvalidTree(format!("node {c} reached twice")));
            }
            seen[c] = true;
            stack.push(c);
        }
    }
    if visited != len {
        return Err(Error::InvalidTree(format!("{} nodes unreachable from the root", len - visited)));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Signed trees: cotrees and generalized cotrees

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// One node of a signed tree. Leaves have `sign == None` and no children;
/// internal nodes carry a sign and at least two children.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedNode {
    pub sign: Option<Sign>,
    pub label: Option<usize>,
    pub children: Vec<NodeId>,
}

impl SignedNode {
    pub fn leaf(label: Option<usize>) -> Self {
        SignedNode { sign: None, label, children: Vec::new() }
    }

    pub fn internal(sign: Sign, children: Vec<NodeId>) -> Self {
        SignedNode { sign: Some(sign), label: None, children }
    }
}

/// A rooted unordered tree whose internal nodes carry signs and whose leaves
/// are either all labelled `1..=n` or all unlabelled.
///
/// This is the common representation behind [`Cotree`] (signs alternate on
/// every root-to-leaf path) and [`GeneralizedCotree`] (no alternation).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedTree {
    root: NodeId,
    nodes: Vec<SignedNode>,
}

impl SignedTree {
    pub fn new(root: NodeId, nodes: Vec<SignedNode>) -> Result<Self> {
        check_arena(root, nodes.len(), |v| nodes[v].children.clone())?;
        let mut labels = Vec::new();
        let mut unlabelled = 0usize;
        for (i, node) in nodes.iter().enumerate() {
            match (node.children.len(), node.sign) {
                (0, None) => match node.label {
                    Some(l) => labels.push(l),
                    None => unlabelled += 1,
                },
                (0, Some(_)) => {
                    return Err(Error::InvalidTree(format!("leaf {i} carries a sign")));
                }
                (1, _) => {
                    return Err(Error::InvalidTree(format!("internal node {i} has outdegree 1")));
                }
                (_, None) => {
                    return Err(Error::InvalidTree(format!("internal node {i} has no sign")));
                }
                (_, Some(_)) => {
                    if node.label.is_some() {
                        return Err(Error::InvalidTree(format!("internal node {i} carries a label")));
                    }
                }
            }
        }
        if !labels.is_empty() {
            if unlabelled > 0 {
                return Err(Error::InvalidTree("mix of labelled and unlabelled leaves".into()));
            }
            let n = labels.len();
            let mut seen = vec![false; n + 1];
            for l in labels {
                if l == 0 || l > n || seen[l] {
                    return Err(Error::InvalidTree(format!(
                        "leaf labels are not a permutation of 1..={n}"
                    )));
                }
                seen[l] = true;
            }
        }
        Ok(SignedTree { root, nodes })
    }

    pub(crate) fn new_unchecked(root: NodeId, nodes: Vec<SignedNode>) -> Self {
        debug_assert!(SignedTree::new(root, nodes.clone()).is_ok());
        SignedTree { root, nodes }
    }

    pub fn single_leaf(label: Option<usize>) -> Self {
        SignedTree { root: 0, nodes: vec![SignedNode::leaf(label)] }
    }

    pub fn nodes(&self) -> &[SignedNode] {
        &self.nodes
    }

    pub fn node(&self, v: NodeId) -> &SignedNode {
        &self.nodes[v]
    }

    pub fn sign(&self, v: NodeId) -> Option<Sign> {
        self.nodes[v].sign
    }

    pub fn label(&self, v: NodeId) -> Option<usize> {
        self.nodes[v].label
    }

    pub fn is_labelled(&self) -> bool {
        self.nodes.iter().any(|n| n.label.is_some())
    }

    /// True when every internal child has the opposite sign of its parent.
    pub fn is_alternating(&self) -> bool {
        self.nodes.iter().all(|node| match node.sign {
            None => true,
            Some(s) => node.children.iter().all(|&c| self.nodes[c].sign != Some(s)),
        })
    }

    /// `leaf_of[l - 1]` is the node carrying label `l`.
    pub fn leaves_by_label(&self) -> Result<Vec<NodeId>> {
        if !self.is_labelled() {
            return Err(Error::UnlabelledLeaves);
        }
        let mut out = vec![0; self.leaf_count()];
        for (v, node) in self.nodes.iter().enumerate() {
            if let Some(l) = node.label {
                out[l - 1] = v;
            }
        }
        Ok(out)
    }

    /// Replaces every label `l` by `perm[l - 1]`; `perm` must be a
    /// permutation of `1..=n`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let mut nodes = self.nodes.clone();
        for node in nodes.iter_mut() {
            if let Some(l) = node.label {
                node.label = Some(*perm.get(l - 1).ok_or_else(|| {
                    Error::InvalidTree("relabelling permutation too short".into())
                })?);
            }
        }
        SignedTree::new(self.root, nodes)
    }

    /// Labels the leaves `1..=n` in left-to-right order, discarding old labels.
    pub fn label_leaves_in_order(&self) -> Self {
        let mut nodes = self.nodes.clone();
        for (i, v) in self.leaves().into_iter().enumerate() {
            nodes[v].label = Some(i + 1);
        }
        SignedTree { root: self.root, nodes }
    }

    pub fn without_labels(&self) -> Self {
        let mut nodes = self.nodes.clone();
        for node in nodes.iter_mut() {
            node.label = None;
        }
        SignedTree { root: self.root, nodes }
    }

    /// Flips every sign.
    pub fn complement(&self) -> Self {
        let mut nodes = self.nodes.clone();
        for node in nodes.iter_mut() {
            node.sign = node.sign.map(Sign::flip);
        }
        SignedTree { root: self.root, nodes }
    }

    /// Forgets signs and labels.
    pub fn shape(&self) -> UnorderedTree {
        UnorderedTree {
            root: self.root,
            children: self.nodes.iter().map(|n| n.children.clone()).collect(),
        }
    }
}

impl RootedTree for SignedTree {
    fn root(&self) -> NodeId {
        self.root
    }
    fn node_count(&self) -> usize {
        self.nodes.len()
    }
    fn children(&self, v: NodeId) -> &[NodeId] {
        &self.nodes[v].children
    }
}

/// A signed tree whose signs alternate along every root-to-leaf path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cotree(SignedTree);

impl Cotree {
    pub fn new(tree: SignedTree) -> Result<Self> {
        if !tree.is_alternating() {
            return Err(Error::InvalidTree("signs do not alternate".into()));
        }
        Ok(Cotree(tree))
    }

    pub(crate) fn new_unchecked(tree: SignedTree) -> Self {
        debug_assert!(tree.is_alternating());
        Cotree(tree)
    }

    pub fn into_inner(self) -> SignedTree {
        self.0
    }

    pub fn as_tree(&self) -> &SignedTree {
        &self.0
    }

    pub fn to_generalized(&self) -> GeneralizedCotree {
        GeneralizedCotree(self.0.clone())
    }
}

impl Deref for Cotree {
    type Target = SignedTree;
    fn deref(&self) -> &SignedTree {
        &self.0
    }
}

/// A signed tree without the alternation requirement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedCotree(SignedTree);

impl GeneralizedCotree {
    pub fn new(tree: SignedTree) -> Self {
        GeneralizedCotree(tree)
    }

    pub fn into_inner(self) -> SignedTree {
        self.0
    }

    pub fn as_tree(&self) -> &SignedTree {
        &self.0
    }
}

impl Deref for GeneralizedCotree {
    type Target = SignedTree;
    fn deref(&self) -> &SignedTree {
        &self.0
    }
}

impl RootedTree for Cotree {
    fn root(&self) -> NodeId {
        self.0.root
    }
    fn node_count(&self) -> usize {
        self.0.nodes.len()
    }
    fn children(&self, v: NodeId) -> &[NodeId] {
        &self.0.nodes[v].children
    }
}

impl RootedTree for GeneralizedCotree {
    fn root(&self) -> NodeId {
        self.0.root
    }
    fn node_count(&self) -> usize {
        self.0.nodes.len()
    }
    fn children(&self, v: NodeId) -> &[NodeId] {
        &self.0.nodes[v].children
    }
}

// ---------------------------------------------------------------------------
// Unsigned shapes

/// Rooted unordered tree in which every internal node has at least two
/// children. Leaves are the nodes without children.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UnorderedTree {
    root: NodeId,
    children: Vec<Vec<NodeId>>,
}

impl UnorderedTree {
    pub fn new(root: NodeId, children: Vec<Vec<NodeId>>) -> Result<Self> {
        check_arena(root, children.len(), |v| children[v].clone())?;
        if let Some(v) = children.iter().position(|c| c.len() == 1) {
            return Err(Error::InvalidTree(format!("node {v} has outdegree 1")));
        }
        Ok(UnorderedTree { root, children })
    }

    pub(crate) fn new_unchecked(root: NodeId, children: Vec<Vec<NodeId>>) -> Self {
        debug_assert!(UnorderedTree::new(root, children.clone()).is_ok());
        UnorderedTree { root, children }
    }

    pub fn single_leaf() -> Self {
        UnorderedTree { root: 0, children: vec![Vec::new()] }
    }

    /// Signs the tree by a root sign and height parity, producing a cotree.
    /// `labels`, when given, assigns labels to the leaves in left-to-right order.
    pub fn to_cotree(&self, root_sign: Sign, labels: Option<&[usize]>) -> Result<Cotree> {
        let depth = self.depths();
        let mut nodes: Vec<SignedNode> = self
            .children
            .iter()
            .enumerate()
            .map(|(v, ch)| {
                if ch.is_empty() {
                    SignedNode::leaf(None)
                } else {
                    let s = if depth[v] % 2 == 0 { root_sign } else { root_sign.flip() };
                    SignedNode::internal(s, ch.clone())
                }
            })
            .collect();
        if let Some(labels) = labels {
            let leaves = self.leaves();
            if labels.len() != leaves.len() {
                return Err(Error::InvalidTree(format!(
                    "{} labels supplied for {} leaves",
                    labels.len(),
                    leaves.len()
                )));
            }
            for (&v, &l) in leaves.iter().zip(labels) {
                nodes[v].label = Some(l);
            }
        }
        Ok(Cotree(SignedTree::new(self.root, nodes)?))
    }
}

impl RootedTree for UnorderedTree {
    fn root(&self) -> NodeId {
        self.root
    }
    fn node_count(&self) -> usize {
        self.children.len()
    }
    fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Color {
    Blue,
    Green,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoTypeNode {
    pub color: Color,
    pub children: Vec<NodeId>,
}

/// Two-type branching tree: blue nodes reproduce, green nodes are infertile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoTypeTree {
    root: NodeId,
    nodes: Vec<TwoTypeNode>,
}

impl TwoTypeTree {
    pub fn new(root: NodeId, nodes: Vec<TwoTypeNode>) -> Result<Self> {
        check_arena(root, nodes.len(), |v| nodes[v].children.clone())?;
        if nodes[root].color != Color::Blue {
            return Err(Error::InvalidTree("root must be blue".into()));
        }
        if nodes.iter().any(|n| n.color == Color::Green && !n.children.is_empty()) {
            return Err(Error::InvalidTree("green nodes are infertile".into()));
        }
        Ok(TwoTypeTree { root, nodes })
    }

    pub(crate) fn new_unchecked(root: NodeId, nodes: Vec<TwoTypeNode>) -> Self {
        debug_assert!(TwoTypeTree::new(root, nodes.clone()).is_ok());
        TwoTypeTree { root, nodes }
    }

    pub fn nodes(&self) -> &[TwoTypeNode] {
        &self.nodes
    }

    pub fn color(&self, v: NodeId) -> Color {
        self.nodes[v].color
    }

    /// Blue and green child counts of `v`.
    pub fn offspring(&self, v: NodeId) -> (usize, usize) {
        let blue = self.nodes[v].children.iter().filter(|&&c| self.nodes[c].color == Color::Blue).count();
        (blue, self.nodes[v].children.len() - blue)
    }
}

impl RootedTree for TwoTypeTree {
    fn root(&self) -> NodeId {
        self.root
    }
    fn node_count(&self) -> usize {
        self.nodes.len()
    }
    fn children(&self, v: NodeId) -> &[NodeId] {
        &self.nodes[v].children
    }
}

// ---------------------------------------------------------------------------
// Proper k-trees

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlaneNode {
    pub children: Vec<NodeId>,
    pub label: Option<usize>,
}

/// Planted plane tree with `k` leaves labelled `1..=k`: the root has
/// outdegree 1 and every other internal node has outdegree 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProperKTree {
    root: NodeId,
    nodes: Vec<PlaneNode>,
}

impl ProperKTree {
    pub fn new(root: NodeId, nodes: Vec<PlaneNode>) -> Result<Self> {
        check_arena(root, nodes.len(), |v| nodes[v].children.clone())?;
        if nodes[root].children.len() != 1 {
            return Err(Error::InvalidTree("root must have outdegree 1".into()));
        }
        let mut labels = Vec::new();
        for (v, node) in nodes.iter().enumerate() {
            if v == root {
                continue;
            }
            match node.children.len() {
                0 => labels.push(node.label.ok_or_else(|| {
                    Error::InvalidTree(format!("leaf {v} is unlabelled"))
                })?),
                2 if node.label.is_none() => {}
                d => {
                    return Err(Error::InvalidTree(format!("node {v} has outdegree {d}")));
                }
            }
        }
        let k = labels.len();
        labels.sort_unstable();
        if labels.iter().enumerate().any(|(i, &l)| l != i + 1) {
            return Err(Error::InvalidTree(format!("leaf labels are not 1..={k}")));
        }
        Ok(ProperKTree { root, nodes })
    }

    pub(crate) fn new_unchecked(root: NodeId, nodes: Vec<PlaneNode>) -> Self {
        debug_assert!(ProperKTree::new(root, nodes.clone()).is_ok());
        ProperKTree { root, nodes }
    }

    pub fn nodes(&self) -> &[PlaneNode] {
        &self.nodes
    }

    pub fn k(&self) -> usize {
        (self.nodes.len() + 1) / 2
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn label(&self, v: NodeId) -> Option<usize> {
        self.nodes[v].label
    }

    /// Edges in canonical order, each identified by its lower endpoint:
    /// depth-first from the root, children left to right.
    pub fn canonical_edges(&self) -> Vec<NodeId> {
        self.preorder().into_iter().skip(1).collect()
    }

    /// Internal vertices other than the root, in preorder.
    pub fn branch_vertices(&self) -> Vec<NodeId> {
        self.preorder().into_iter().skip(1).filter(|&v| !self.is_leaf(v)).collect()
    }

    /// Plane code of the tree below the root: a leaf is its label and a
    /// branch vertex is `(left,right)`. The code determines the tree.
    pub fn code(&self) -> String {
        let mut out = String::new();
        let mut stack: Vec<Result<NodeId, char>> = vec![Ok(self.nodes[self.root].children[0])];
        while let Some(item) = stack.pop() {
            match item {
                Err(c) => out.push(c),
                Ok(v) => match self.nodes[v].label {
                    Some(l) => out.push_str(&l.to_string()),
                    None => {
                        let ch = &self.nodes[v].children;
                        out.push('(');
                        stack.push(Err(')'));
                        stack.push(Ok(ch[1]));
                        stack.push(Err(','));
                        stack.push(Ok(ch[0]));
                    }
                },
            }
        }
        out
    }

    /// Snips the root edge and signs the branch vertices, in the order of
    /// [`branch_vertices`](Self::branch_vertices).
    pub fn to_generalized_cotree(&self, signs: &[Sign]) -> Result<GeneralizedCotree> {
        let branches = self.branch_vertices();
        if signs.len() != branches.len() {
            return Err(Error::InvalidTree(format!(
                "{} signs supplied for {} branch vertices",
                signs.len(),
                branches.len()
            )));
        }
        let mut sign_of = vec![None; self.nodes.len()];
        for (&v, &s) in branches.iter().zip(signs) {
            sign_of[v] = Some(s);
        }
        // reindex without the planted root
        let top = self.nodes[self.root].children[0];
        let order = {
            let mut order = Vec::new();
            let mut stack = vec![top];
            while let Some(v) = stack.pop() {
                order.push(v);
                stack.extend(self.nodes[v].children.iter().rev().copied());
            }
            order
        };
        let mut index = vec![usize::MAX; self.nodes.len()];
        for (i, &v) in order.iter().enumerate() {
            index[v] = i;
        }
        let nodes = order
            .iter()
            .map(|&v| SignedNode {
                sign: sign_of[v],
                label: self.nodes[v].label,
                children: self.nodes[v].children.iter().map(|&c| index[c]).collect(),
            })
            .collect();
        Ok(GeneralizedCotree(SignedTree::new(0, nodes)?))
    }
}

impl RootedTree for ProperKTree {
    fn root(&self) -> NodeId {
        self.root
    }
    fn node_count(&self) -> usize {
        self.nodes.len()
    }
    fn children(&self, v: NodeId) -> &[NodeId] {
        &self.nodes[v].children
    }
}
