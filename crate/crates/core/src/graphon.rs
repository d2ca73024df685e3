//! Induced subgraph densities and the exact law of `H_k^p`, whose table of
//! probabilities identifies the limit graphon.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::enumeration::ratio_to_f64;
use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::samplers::{enumerate_proper_k_trees, proper_k_tree_count};
use crate::trees::{Ancestry, RootedTree};

pub const MAX_EXACT_K: usize = 5;
pub const MAX_FINGERPRINT_K: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub value: f64,
    pub stderr: f64,
    pub method: Method,
    pub reps: u64,
}

/// Pattern mask of the ordered tuple `vs` (0-based vertices) in `g`.
pub fn tuple_mask(g: &LabeledGraph, vs: &[usize]) -> u64 {
    let k = vs.len();
    let mut m = 0u64;
    for i in 0..k {
        for j in i + 1..k {
            if g.adjacent0(vs[i], vs[j]) {
                m |= 1 << LabeledGraph::pair_index(i + 1, j + 1, k);
            }
        }
    }
    m
}

fn check_sizes(h: &LabeledGraph, g: &LabeledGraph) -> Result<()> {
    if h.n() == 0 || h.n() > g.n() {
        return Err(Error::OutOfRange(format!("pattern on {} vertices does not fit a graph on {}", h.n(), g.n())));
    }
    Ok(())
}

/// Probability that a uniform ordered `k`-tuple of distinct vertices of `g`
/// induces exactly `h` (with `v_i` playing vertex `i`).
pub fn t_ind_exact(h: &LabeledGraph, g: &LabeledGraph) -> Result<DensityEstimate> {
    check_sizes(h, g)?;
    let k = h.n();
    if k > MAX_EXACT_K {
        return Err(Error::OutOfRange(format!("exact densities need k ≤ {MAX_EXACT_K}, got {k}")));
    }
    let mut tuple = Vec::with_capacity(k);
    let hits = extend_matching(h, g, &mut tuple);
    let total: f64 = (0..k).map(|i| (g.n() - i) as f64).product();
    Ok(DensityEstimate { value: hits as f64 / total, stderr: 0.0, method: Method::Exact, reps: 0 })
}

/// Counts ordered extensions of `tuple` that induce `h`, checking each new
/// vertex against the earlier ones as it is placed.
fn extend_matching(h: &LabeledGraph, g: &LabeledGraph, tuple: &mut Vec<usize>) -> u64 {
    let j = tuple.len();
    if j == h.n() {
        return 1;
    }
    let mut hits = 0;
    for v in 0..g.n() {
        if tuple.contains(&v) {
            continue;
        }
        if tuple.iter().enumerate().all(|(i, &u)| g.adjacent0(u, v) == h.adjacent0(i, j)) {
            tuple.push(v);
            hits += extend_matching(h, g, tuple);
            tuple.pop();
        }
    }
    hits
}

/// Pattern of a uniform ordered `k`-tuple of distinct vertices.
pub fn sample_pattern<R: Rng + ?Sized>(g: &LabeledGraph, k: usize, rng: &mut R) -> u64 {
    let vs = index::sample(rng, g.n(), k).into_vec();
    tuple_mask(g, &vs)
}

fn binomial_estimate(hits: u64, reps: u64) -> DensityEstimate {
    let p = hits as f64 / reps as f64;
    DensityEstimate { value: p, stderr: (p * (1.0 - p) / reps as f64).sqrt(), method: Method::MonteCarlo, reps }
}

/// Monte Carlo version of [`t_ind_exact`] with binomial standard error.
pub fn t_ind_mc<R: Rng + ?Sized>(h: &LabeledGraph, g: &LabeledGraph, reps: u64, rng: &mut R) -> Result<DensityEstimate> {
    check_sizes(h, g)?;
    if reps == 0 {
        return Err(Error::OutOfRange("need at least one repetition".into()));
    }
    let target = h.pattern_mask();
    let hits = (0..reps).filter(|_| sample_pattern(g, h.n(), rng) == target).count() as u64;
    Ok(binomial_estimate(hits, reps))
}

/// Density of `h` in the step graphon of `g`: `k` vertices drawn
/// independently with replacement, a repeated vertex counting as
/// non-adjacent to itself. Differs from [`t_ind_exact`] by `O(k²/n)`.
pub fn t_ind_graphon_mc<R: Rng + ?Sized>(
    h: &LabeledGraph,
    g: &LabeledGraph,
    reps: u64,
    rng: &mut R,
) -> Result<DensityEstimate> {
    check_sizes(h, g)?;
    if reps == 0 {
        return Err(Error::OutOfRange("need at least one repetition".into()));
    }
    let target = h.pattern_mask();
    let mut vs = vec![0; h.n()];
    let mut hits = 0;
    for _ in 0..reps {
        for v in vs.iter_mut() {
            *v = rng.random_range(0..g.n());
        }
        let mut m = 0u64;
        let k = vs.len();
        for i in 0..k {
            for j in i + 1..k {
                if vs[i] != vs[j] && g.adjacent0(vs[i], vs[j]) {
                    m |= 1 << LabeledGraph::pair_index(i + 1, j + 1, k);
                }
            }
        }
        hits += u64::from(m == target);
    }
    Ok(binomial_estimate(hits, reps))
}

// ---------------------------------------------------------------------------
// Exact law of H_k^p

/// Law of `H_k^p` as exact rationals keyed by labelled pattern mask.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitFingerprint {
    pub k: usize,
    pub p: BigRational,
    pub table: BTreeMap<u64, BigRational>,
}

impl LimitFingerprint {
    pub fn prob(&self, mask: u64) -> BigRational {
        self.table.get(&mask).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total(&self) -> BigRational {
        self.table.values().fold(BigRational::zero(), |acc, q| acc + q)
    }

    /// Number of labelled graphs on `k` vertices, i.e. of pattern masks.
    pub fn pattern_count(&self) -> usize {
        1 << (self.k * (self.k - 1) / 2)
    }

    /// Probabilities of all `2^{k(k-1)/2}` patterns, indexed by mask.
    pub fn to_f64_vec(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.pattern_count()];
        for (&m, q) in &self.table {
            v[m as usize] = ratio_to_f64(q);
        }
        v
    }

    /// Probabilities summed over isomorphism classes, keyed by
    /// [`LabeledGraph::iso_key`].
    pub fn by_isomorphism(&self) -> BTreeMap<u64, BigRational> {
        let mut out: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (&m, q) in &self.table {
            *out.entry(LabeledGraph::from_pattern_mask(self.k, m).iso_key()).or_insert_with(BigRational::zero) += q;
        }
        out
    }

    /// `{"k", "p", "table": {"{1-2,...}": "num/den"}}` with only the nonzero
    /// entries.
    pub fn to_json(&self) -> Value {
        let table: serde_json::Map<String, Value> = self
            .table
            .iter()
            .map(|(&m, q)| (LabeledGraph::from_pattern_mask(self.k, m).pattern_key(), Value::String(fraction(q))))
            .collect();
        json!({ "k": self.k, "p": fraction(&self.p), "table": table })
    }
}

/// `num/den`, also for integers.
pub fn fraction(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn check_fingerprint_args(k: usize, p: &BigRational) -> Result<()> {
    if !(2..=MAX_FINGERPRINT_K).contains(&k) {
        return Err(Error::OutOfRange(format!("exact law needs 2 ≤ k ≤ {MAX_FINGERPRINT_K}, got {k}")));
    }
    if *p <= BigRational::zero() || *p >= BigRational::one() {
        return Err(Error::OutOfRange(format!("p must lie in (0, 1), got {p}")));
    }
    Ok(())
}

/// Exact law of `H_k^p`: every proper k-tree, every sign pattern of its
/// `k - 1` branch vertices, weighted `p^{#⊕} (1-p)^{#⊖}`.
///
/// For each tree the branch vertex at the LCA of every leaf pair is found
/// once; sign patterns are then bitmasks, and only the number of patterns
/// per (graph, #⊕) is accumulated before the final rational sum.
pub fn q_exact(k: usize, p: &BigRational) -> Result<LimitFingerprint> {
    check_fingerprint_args(k, p)?;
    let trees = enumerate_proper_k_trees(k)?;
    let branches = k - 1;
    let mut tally: HashMap<(u64, u32), u64> = HashMap::new();
    for t in &trees {
        let anc = Ancestry::new(t);
        let branch_index: HashMap<usize, usize> =
            t.branch_vertices().into_iter().enumerate().map(|(i, v)| (v, i)).collect();
        let leaf_of = {
            let mut leaf_of = vec![0; k + 1];
            for v in t.leaves() {
                leaf_of[t.label(v).expect("labelled leaf")] = v;
            }
            leaf_of
        };
        // pair bit -> branch vertex deciding it
        let mut decider = Vec::with_capacity(k * (k - 1) / 2);
        for i in 1..=k {
            for j in i + 1..=k {
                let w = anc.lca(leaf_of[i], leaf_of[j])?;
                decider.push((LabeledGraph::pair_index(i, j, k), branch_index[&w]));
            }
        }
        for signs in 0u32..(1 << branches) {
            let mask = decider.iter().filter(|&&(_, b)| signs >> b & 1 == 1).fold(0u64, |m, &(bit, _)| m | 1 << bit);
            *tally.entry((mask, signs.count_ones())).or_insert(0) += 1;
        }
    }
    let one_minus = BigRational::one() - p;
    let powers = |x: &BigRational| -> Vec<BigRational> {
        let mut v = vec![BigRational::one()];
        for _ in 0..branches {
            let next = v.last().expect("non-empty") * x;
            v.push(next);
        }
        v
    };
    let (pp, qp) = (powers(p), powers(&one_minus));
    let n_trees = BigRational::from_integer(BigInt::from(trees.len()));
    let mut table: BTreeMap<u64, BigRational> = BTreeMap::new();
    for ((mask, plus), count) in tally {
        let w = &pp[plus as usize] * &qp[branches - plus as usize] * BigRational::from_integer(count.into()) / &n_trees;
        *table.entry(mask).or_insert_with(BigRational::zero) += w;
    }
    Ok(LimitFingerprint { k, p: p.clone(), table })
}

/// Second derivation of the same law from the top split alone. In a uniform
/// proper k-tree the branch vertex below the root sends the labels `L` left
/// and the rest right with probability `c(|L|) c(k - |L|) / c(k)`, where
/// `c(m)` counts proper m-trees, and the two sides are independent uniform
/// trees. Its sign joins `L` to its complement completely (⊕) or not at all.
pub fn q_by_splitting(k: usize, p: &BigRational) -> Result<LimitFingerprint> {
    check_fingerprint_args(k, p)?;
    let mut memo = HashMap::new();
    let law = split_law((1u32 << k) - 1, k, p, &mut memo);
    let table = law.into_iter().filter(|(_, q)| !q.is_zero()).collect();
    Ok(LimitFingerprint { k, p: p.clone(), table })
}

fn split_law(
    set: u32,
    k: usize,
    p: &BigRational,
    memo: &mut HashMap<u32, BTreeMap<u64, BigRational>>,
) -> BTreeMap<u64, BigRational> {
    if set.count_ones() == 1 {
        return BTreeMap::from([(0, BigRational::one())]);
    }
    if let Some(v) = memo.get(&set) {
        return v.clone();
    }
    let count = |m: u32| BigRational::from_integer(BigInt::from(proper_k_tree_count(m as usize)));
    let total = count(set.count_ones());
    let one_minus = BigRational::one() - p;
    let mut out: BTreeMap<u64, BigRational> = BTreeMap::new();
    // nonempty proper subsets `left` of `set`
    let mut left = (set - 1) & set;
    while left != 0 {
        let right = set & !left;
        let weight = count(left.count_ones()) * count(right.count_ones()) / &total;
        let mut cross = 0u64;
        for i in 0..k {
            for j in i + 1..k {
                let (a, b) = (1u32 << i, 1u32 << j);
                if (left & a != 0 && right & b != 0) || (left & b != 0 && right & a != 0) {
                    cross |= 1 << LabeledGraph::pair_index(i + 1, j + 1, k);
                }
            }
        }
        let (ll, rl) = (split_law(left, k, p, memo), split_law(right, k, p, memo));
        for (ml, ql) in &ll {
            for (mr, qr) in &rl {
                let base = &weight * ql * qr;
                *out.entry(ml | mr | cross).or_insert_with(BigRational::zero) += &base * p;
                *out.entry(ml | mr).or_insert_with(BigRational::zero) += &base * &one_minus;
            }
        }
        left = (left - 1) & set;
    }
    memo.insert(set, out.clone());
    out
}

/// Exact rational from a float probability (binary expansion, so `0.5` is
/// exactly `1/2`).
pub fn rational_from_f64(p: f64) -> Result<BigRational> {
    BigRational::from_float(p).ok_or_else(|| Error::OutOfRange(format!("{p} is not finite")))
}

/// Parses `num/den`, an integer, or a decimal float.
pub fn parse_probability(text: &str) -> Result<BigRational> {
    let text = text.trim();
    if let Ok(q) = text.parse::<BigRational>() {
        return Ok(q);
    }
    let f: f64 = text.parse().map_err(|_| Error::OutOfRange(format!("cannot read probability {text:?}")))?;
    rational_from_f64(f)
}

// ---------------------------------------------------------------------------
// Step graphon export

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexOrder {
    /// Vertices `1..n` as labelled.
    Input,
    /// Decreasing degree, ties by label.
    Degree,
}

/// The 0/1 matrix of the step function `W_G` in a declared vertex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepMatrix {
    pub order: Vec<usize>,
    pub cells: Vec<Vec<u8>>,
}

pub fn step_graphon_matrix(g: &LabeledGraph, order: VertexOrder) -> StepMatrix {
    let mut vs: Vec<usize> = (1..=g.n()).collect();
    if order == VertexOrder::Degree {
        vs.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    }
    let cells = vs.iter().map(|&u| vs.iter().map(|&v| u8::from(u != v && g.has_edge(u, v))).collect()).collect();
    StepMatrix { order: vs, cells }
}

impl StepMatrix {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for row in &self.cells {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }

    /// Plain PGM with maxval 1; edges are black (0), non-edges white (1).
    pub fn to_pgm(&self) -> String {
        let n = self.cells.len();
        let mut s = format!("P2\n{n} {n}\n1\n");
        for row in &self.cells {
            let line: Vec<&str> = row.iter().map(|&c| if c == 1 { "0" } else { "1" }).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }
}

/// Edge density `2|E| / (n(n-1))`, the density of `K_2`.
pub fn edge_density(g: &LabeledGraph) -> f64 {
    let n = g.n() as f64;
    if g.n() < 2 {
        return 0.0;
    }
    2.0 * g.edge_count() as f64 / (n * (n - 1.0))
}

/// Exact rational value as `f64`, for reports.
pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| ratio_to_f64(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::RngHandle;

    fn half() -> BigRational {
        BigRational::new(1.into(), 2.into())
    }

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn exact_density_examples() {
        let k2 = LabeledGraph::complete(2);
        assert_eq!(t_ind_exact(&k2, &LabeledGraph::complete(3)).unwrap().value, 1.0);
        let p3 = LabeledGraph::path(3);
        assert!((t_ind_exact(&k2, &p3).unwrap().value - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(t_ind_exact(&LabeledGraph::empty(1), &p3).unwrap().value, 1.0);
        assert!(t_ind_exact(&LabeledGraph::empty(6), &LabeledGraph::empty(8)).is_err());
    }

    #[test]
    fn mc_needs_reps() {
        let mut rng = RngHandle::new(1, 0).rng();
        let g = LabeledGraph::path(5);
        assert!(t_ind_mc(&LabeledGraph::complete(2), &g, 0, &mut rng).is_err());
    }

    #[test]
    fn fingerprint_small_cases() {
        let p = r(1, 3);
        let q2 = q_exact(2, &p).unwrap();
        assert_eq!(q2.prob(1), p);
        assert_eq!(q2.prob(0), r(2, 3));
        let q3 = q_exact(3, &half()).unwrap();
        assert_eq!(q3.prob(0b111), r(1, 4));
        // only edge {1,2}
        let m12 = 1 << LabeledGraph::pair_index(1, 2, 3);
        assert_eq!(q3.prob(m12), r(1, 12));
        assert_eq!(q3.total(), BigRational::one());
        assert!(q_exact(1, &half()).is_err());
        assert!(q_exact(3, &BigRational::one()).is_err());
    }

    #[test]
    fn two_derivations_agree() {
        for k in 2..=5 {
            for p in [half(), r(1, 3)] {
                assert_eq!(q_exact(k, &p).unwrap(), q_by_splitting(k, &p).unwrap(), "k={k}");
            }
        }
    }

    #[test]
    fn fingerprint_json_keys() {
        let v = q_exact(2, &half()).unwrap().to_json();
        assert_eq!(v["table"]["{1-2}"], "1/2");
        assert_eq!(v["table"]["{}"], "1/2");
        assert_eq!(v["p"], "1/2");
    }

    #[test]
    fn step_matrix_exports() {
        let m = step_graphon_matrix(&LabeledGraph::complete(2), VertexOrder::Input);
        assert_eq!(m.cells, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(m.to_csv(), "0,1\n1,0\n");
        assert_eq!(m.to_pgm(), "P2\n2 2\n1\n1 0\n0 1\n");
        let z = step_graphon_matrix(&LabeledGraph::empty(3), VertexOrder::Degree);
        assert!(z.cells.iter().flatten().all(|&c| c == 0));
        let star = LabeledGraph::from_edges(3, &[(1, 3), (2, 3)]).unwrap();
        assert_eq!(step_graphon_matrix(&star, VertexOrder::Degree).order, vec![3, 1, 2]);
    }

    #[test]
    fn probability_parsing() {
        assert_eq!(parse_probability("1/2").unwrap(), half());
        assert_eq!(parse_probability("0.5").unwrap(), half());
        assert!(parse_probability("x").is_err());
    }
}
