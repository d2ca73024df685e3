//! Finite simple graphs on the vertex set 1..n.
//!
//! Adjacency is stored as one bitset row per vertex, which keeps the
//! quadratic cograph recursion and induced-pattern lookups cheap at the
//! sizes used here (a few thousand vertices).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};

/// Parsers refuse graphs with more vertices than this.
pub const MAX_VERTICES: usize = 1 << 14;

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LabeledGraph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl std::fmt::Debug for LabeledGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LabeledGraph(n={}, {})", self.n, self.pattern_key())
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl LabeledGraph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(WORD);
        LabeledGraph { n, words, rows: vec![0; n * words] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 1..=n {
            for v in u + 1..=n {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// Path 1-2-...-n.
    pub fn path(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 1..n {
            g.add_edge(u, u + 1);
        }
        g
    }

    /// Cycle 1-2-...-n-1 (n ≥ 3).
    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        if n >= 3 {
            g.add_edge(1, n);
        }
        g
    }

    /// Builds a graph from 1-based edges. Rejects loops, out-of-range
    /// endpoints and repeated edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::InvalidGraph(format!("{n} vertices exceeds the limit of {MAX_VERTICES}")));
        }
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at vertex {u}")));
            }
            if u == 0 || v == 0 || u > n || v > n {
                return Err(Error::InvalidGraph(format!("edge {{{u},{v}}} outside 1..{n}")));
            }
            if g.has_edge(u, v) {
                return Err(Error::InvalidGraph(format!("repeated edge {{{u},{v}}}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn bit(&self, u0: usize, v0: usize) -> bool {
        self.rows[u0 * self.words + v0 / WORD] >> (v0 % WORD) & 1 == 1
    }

    #[inline]
    fn set(&mut self, u0: usize, v0: usize, on: bool) {
        let w = &mut self.rows[u0 * self.words + v0 / WORD];
        if on {
            *w |= 1 << (v0 % WORD);
        } else {
            *w &= !(1 << (v0 % WORD));
        }
    }

    /// Adjacency test with 1-based vertices.
    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.bit(u - 1, v - 1)
    }

    /// Adjacency test with 0-based vertices.
    #[inline]
    pub fn adjacent0(&self, u0: usize, v0: usize) -> bool {
        self.bit(u0, v0)
    }

    /// Panics on a loop or an out-of-range vertex.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v && u >= 1 && v >= 1 && u <= self.n && v <= self.n, "bad edge {{{u},{v}}}");
        self.set(u - 1, v - 1, true);
        self.set(v - 1, u - 1, true);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.set(u - 1, v - 1, false);
        self.set(v - 1, u - 1, false);
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in self.neighbors0(u) {
                if v > u {
                    out.push((u + 1, v + 1));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u - 1).iter().map(|w| w.count_ones() as usize).sum()
    }

    fn row(&self, u0: usize) -> &[u64] {
        &self.rows[u0 * self.words..(u0 + 1) * self.words]
    }

    /// 0-based neighbours of the 0-based vertex `u0`, increasing.
    pub fn neighbors0(&self, u0: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(u0).iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * WORD + b)
            })
        })
    }

    pub fn complement(&self) -> Self {
        let mut g = Self::empty(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.bit(u, v) {
                    g.set(u, v, true);
                    g.set(v, u, true);
                }
            }
        }
        g
    }

    /// Induced subgraph on the given 1-based vertices; the i-th listed vertex
    /// becomes vertex i + 1.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let mut g = Self::empty(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.set(i, j, true);
                    g.set(j, i, true);
                }
            }
        }
        g
    }

    /// Renames vertex `v` to `perm[v - 1]`; `perm` must be a permutation of 1..n.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        let mut g = Self::empty(self.n);
        for (u, v) in self.edges() {
            g.add_edge(perm[u - 1], perm[v - 1]);
        }
        Ok(g)
    }

    /// Connected components as sorted lists of 0-based vertices drawn from
    /// `subset`, computed in the graph induced on `subset`.
    pub fn components0(&self, subset: &[usize]) -> Vec<Vec<usize>> {
        let mut inside = vec![false; self.n];
        for &v in subset {
            inside[v] = true;
        }
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for &s in subset {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for v in self.neighbors0(u) {
                    if inside[v] && !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Components of the complement restricted to `subset`, without building
    /// the complement: BFS over the set of still-unvisited vertices.
    pub fn co_components0(&self, subset: &[usize]) -> Vec<Vec<usize>> {
        let mut unvisited: Vec<usize> = subset.to_vec();
        let mut out = Vec::new();
        while let Some(s) = unvisited.pop() {
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                let mut keep = Vec::with_capacity(unvisited.len());
                for &v in &unvisited {
                    if self.bit(u, v) {
                        keep.push(v);
                    } else {
                        comp.push(v);
                    }
                }
                unvisited = keep;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Index of the pair `{i, j}` (1-based, `i < j ≤ k`) in the lexicographic
    /// order of pairs; used for pattern masks.
    pub fn pair_index(i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i < j && j <= k);
        let (i0, j0) = (i - 1, j - 1);
        i0 * (2 * k - i0 - 1) / 2 + (j0 - i0 - 1)
    }

    /// Edge set as a bitmask over lexicographically ordered pairs. Only for
    /// n ≤ 11 (55 pairs).
    pub fn pattern_mask(&self) -> u64 {
        assert!(self.n <= 11, "pattern masks need n <= 11");
        let mut m = 0u64;
        for (u, v) in self.edges() {
            m |= 1 << Self::pair_index(u, v, self.n);
        }
        m
    }

    pub fn from_pattern_mask(k: usize, mask: u64) -> Self {
        let mut g = Self::empty(k);
        for i in 1..=k {
            for j in i + 1..=k {
                if mask >> Self::pair_index(i, j, k) & 1 == 1 {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Sorted edge list as text, e.g. `{1-2,1-3}`; `{}` when edgeless. This is
    /// the key for labelled patterns.
    pub fn pattern_key(&self) -> String {
        let mut s = String::from("{");
        for (i, (u, v)) in self.edges().into_iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{u}-{v}");
        }
        s.push('}');
        s
    }

    /// Isomorphism-invariant key for small graphs (n ≤ 8): the least pattern
    /// mask over all vertex orderings.
    pub fn iso_key(&self) -> u64 {
        assert!(self.n <= 8, "iso_key enumerates permutations; n <= 8 only");
        let k = self.n;
        let mut best = u64::MAX;
        let mut perm: Vec<usize> = (0..k).collect();
        loop {
            let mut m = 0u64;
            for i in 0..k {
                for j in i + 1..k {
                    if self.bit(perm[i], perm[j]) {
                        m |= 1 << Self::pair_index(i + 1, j + 1, k);
                    }
                }
            }
            best = best.min(m);
            if !next_permutation(&mut perm) {
                return best;
            }
        }
    }

    /// Whether the 1-based vertices `a-b-c-d` induce a path in that order.
    pub fn is_induced_p4(&self, q: [usize; 4]) -> bool {
        let [a, b, c, d] = q.map(|x| x - 1);
        self.bit(a, b) && self.bit(b, c) && self.bit(c, d) && !self.bit(a, c) && !self.bit(a, d) && !self.bit(b, d)
    }

    /// Dense 0/1 adjacency matrix in vertex order 1..n.
    pub fn adjacency_matrix(&self) -> Vec<Vec<u8>> {
        (0..self.n).map(|u| (0..self.n).map(|v| self.bit(u, v) as u8).collect()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GraphJson { n: self.n, edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect() })
            .expect("graph serializes")
    }

    /// Reads `{"n": int, "edges": [[u, v], ...]}` with `1 ≤ u < v ≤ n`.
    pub fn from_json(text: &str) -> Result<Self> {
        let g: GraphJson = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
        let mut edges = Vec::with_capacity(g.edges.len());
        for [u, v] in g.edges {
            if u >= v {
                return Err(ParseError::Schema(format!("edge [{u},{v}] must have u < v")).into());
            }
            edges.push((u, v));
        }
        Self::from_edges(g.n, &edges).map_err(schema)
    }

    /// Edge-list text: a header line `n=<int>` then one `u v` pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("n={}\n", self.n);
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    /// Reads the edge-list format. Blank lines and lines starting with `#`
    /// are skipped; edges may be given in either orientation.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let line_err = |line: usize, msg: String| Error::Parse(ParseError::Line { line, msg });
        let (hl, header) = lines.next().ok_or(ParseError::UnexpectedEnd)?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|x| x.trim().parse().ok())
            .ok_or_else(|| line_err(hl, "expected header n=<int>".into()))?;
        if n > MAX_VERTICES {
            return Err(line_err(hl, format!("{n} vertices exceeds the limit of {MAX_VERTICES}")));
        }
        let mut g = Self::empty(n);
        for (ln, line) in lines {
            let mut it = line.split_whitespace();
            let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                return Err(line_err(ln, "expected two vertices".into()));
            };
            let (Ok(u), Ok(v)) = (a.parse::<usize>(), b.parse::<usize>()) else {
                return Err(line_err(ln, "vertices must be positive integers".into()));
            };
            if u == v || u == 0 || v == 0 || u > n || v > n {
                return Err(line_err(ln, format!("invalid edge {u} {v}")));
            }
            if g.has_edge(u, v) {
                return Err(line_err(ln, format!("repeated edge {u} {v}")));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }
}

fn schema(e: Error) -> Error {
    match e {
        Error::InvalidGraph(m) => Error::Parse(ParseError::Schema(m)),
        other => other,
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::OutOfRange(format!("permutation has length {}, expected {n}", perm.len())));
    }
    let mut seen = vec![false; n + 1];
    for &p in perm {
        if p == 0 || p > n || seen[p] {
            return Err(Error::OutOfRange(format!("not a permutation of 1..{n}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Lexicographic successor; false once the last permutation is reached.
pub(crate) fn next_permutation<T: Ord>(a: &mut [T]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}
