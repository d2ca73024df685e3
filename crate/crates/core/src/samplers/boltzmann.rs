//! Boltzmann sampler for unlabelled trees with internal outdegree ≥ 2.
//!
//! A call at parameter `y` returns a leaf with probability `y/A(y)`.
//! Otherwise it draws the multiset of branches the Pólya way: for every
//! `i ≥ 1` a Poisson number of branches with mean `A(y^i)/i`, each produced
//! by a call at `y^i` and repeated `i` times. The counts are redrawn until
//! the multiset has at least two elements.
//!
//! Calls at `y = x^m` are indexed by the exponent `m`. Nodes produced at
//! `m = 1` are blue, everything inside a repeated branch is green.

use std::sync::OnceLock;

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand::distr::Distribution;

use super::rng::SampleBudget;
use super::Sampled;
use crate::enumeration::{default_constants, scaled_unlabelled, Constants, Fixed};
use crate::error::{Error, Result};
use crate::trees::{Canonical, Color, Cotree, NodeId, RootedTree, Sign, TwoTypeNode, TwoTypeTree, UnorderedTree};

/// Largest exponent tracked. A call at `x^m` with `m > MAX_EXPONENT` is
/// treated as a leaf; for `x ≤ ρ` this changes probabilities by less than
/// `ρ^MAX_EXPONENT < 10^-70`.
pub const MAX_EXPONENT: usize = 128;

/// Poisson law with mean `lambda` conditioned on being at least `min`,
/// sampled by inversion. Means here are below 1, so the scan is short.
#[derive(Clone, Debug)]
struct TruncatedPoisson {
    lambda: f64,
    min: usize,
    /// `P(X = min | X ≥ min)`.
    first: f64,
}

impl TruncatedPoisson {
    fn new(lambda: f64, min: usize) -> Self {
        let first = Self::term(lambda, min) / Self::tail(lambda, min);
        TruncatedPoisson { lambda, min, first }
    }

    /// `λ^min / min!`, i.e. `e^λ P(X = min)`.
    fn term(lambda: f64, min: usize) -> f64 {
        (1..=min).fold(1.0, |t, k| t * lambda / k as f64)
    }

    /// `e^λ P(X ≥ min)`, summed upwards so nothing cancels for tiny `λ`.
    fn tail(lambda: f64, min: usize) -> f64 {
        let mut term = Self::term(lambda, min);
        let mut tail = 0.0;
        let mut k = min;
        while term > tail * 1e-18 {
            tail += term;
            k += 1;
            term *= lambda / k as f64;
        }
        tail
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut u: f64 = rng.random();
        let mut k = self.min;
        let mut p = self.first;
        while u >= p && p > 0.0 {
            u -= p;
            k += 1;
            p *= self.lambda / k as f64;
        }
        k
    }
}

/// Offspring of a non-leaf node at one exponent. The multiset has fewer
/// than two elements only when it has no repeated branch and at most one
/// plain branch, so conditioning splits into two exact cases.
#[derive(Clone, Debug)]
struct Level {
    leaf_prob: f64,
    /// Probability of the case "some repeated branch"; otherwise there are
    /// none and at least two plain branches.
    with_repeated: f64,
    /// Plain branches: Poisson with mean `A(y)`, unconditioned and `≥ 2`.
    plain: TruncatedPoisson,
    plain_at_least_two: TruncatedPoisson,
    /// Repeated branches: Poisson with mean `Σ_{i≥2} A(y^i)/i`, `≥ 1`.
    repeated: Option<TruncatedPoisson>,
    /// Repetition order `i` of a repeated branch, by weight `A(y^i)/i`.
    orders: Option<(Vec<usize>, WeightedIndex<f64>)>,
}

/// Boltzmann sampler at a fixed parameter `0 < x ≤ ρ`.
#[derive(Clone, Debug)]
pub struct BoltzmannSampler {
    x: f64,
    a_x: f64,
    levels: Vec<Level>,
}

impl BoltzmannSampler {
    pub fn new(x: f64, consts: &Constants) -> Result<Self> {
        let rho = consts.rho_f64();
        if !(x > 0.0 && x <= rho) {
            return Err(Error::OutOfRange(format!("Boltzmann parameter {x} outside (0, ρ = {rho}]")));
        }
        let at_rho = (x - rho).abs() <= 4.0 * f64::EPSILON * rho;
        // a[m] = A(x^m)
        let mut a = vec![f64::NAN; MAX_EXPONENT + 1];
        if at_rho {
            a = consts.a_at_powers(MAX_EXPONENT);
        } else {
            a[1] = a_below_rho(x)?;
            let ps = consts.phi_series();
            let xf = Fixed::from_f64(x);
            let mut y = &xf * &xf;
            for slot in a.iter_mut().skip(2) {
                *slot = ps.a_at(&y).to_f64();
                y = &y * &xf;
            }
        }
        let mut levels = Vec::with_capacity(MAX_EXPONENT + 1);
        let mut y = 1.0f64;
        for m in 0..=MAX_EXPONENT {
            if m == 0 {
                // placeholder so that levels[m] is exponent m
                levels.push(Level {
                    leaf_prob: 1.0,
                    with_repeated: 0.0,
                    plain: TruncatedPoisson::new(1.0, 0),
                    plain_at_least_two: TruncatedPoisson::new(1.0, 2),
                    repeated: None,
                    orders: None,
                });
                continue;
            }
            y *= x;
            let orders: Vec<usize> = (2..=MAX_EXPONENT / m).collect();
            let weights: Vec<f64> = orders.iter().map(|&i| a[m * i] / i as f64).collect();
            let total: f64 = weights.iter().sum();
            // P(some repeated) = 1 - e^{-total},
            // P(none repeated, ≥ 2 plain) = e^{-total} e^{-A} Σ_{k≥2} A^k/k!
            let p_rep = -(-total).exp_m1();
            let p_plain = (-total).exp() * (-a[m]).exp() * TruncatedPoisson::tail(a[m], 2);
            let (repeated, orders) = if total > 0.0 {
                (
                    Some(TruncatedPoisson::new(total, 1)),
                    Some((orders, WeightedIndex::new(&weights).expect("positive weights"))),
                )
            } else {
                (None, None)
            };
            levels.push(Level {
                leaf_prob: (y / a[m]).min(1.0),
                with_repeated: p_rep / (p_rep + p_plain),
                plain: TruncatedPoisson::new(a[m], 0),
                plain_at_least_two: TruncatedPoisson::new(a[m], 2),
                repeated,
                orders,
            });
        }
        Ok(BoltzmannSampler { x, a_x: a[1], levels })
    }

    /// The sampler at `x = ρ` for the default constants, built once.
    pub fn at_rho() -> &'static BoltzmannSampler {
        static CELL: OnceLock<BoltzmannSampler> = OnceLock::new();
        CELL.get_or_init(|| {
            let c = default_constants();
            BoltzmannSampler::new(c.rho_f64(), c).expect("ρ is a valid parameter")
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    /// `A(x)`, the normalizing constant.
    pub fn a_x(&self) -> f64 {
        self.a_x
    }

    /// One node at exponent `m`: `None` for a leaf, otherwise the number of
    /// unrepeated branches, with the orders of the repeated ones in `repeated`.
    fn draw<R: Rng + ?Sized>(&self, m: usize, rng: &mut R, repeated: &mut Vec<usize>) -> Option<usize> {
        repeated.clear();
        let level = self.levels.get(m)?;
        if rng.random::<f64>() < level.leaf_prob {
            return None;
        }
        match (&level.repeated, &level.orders) {
            (Some(count), Some((orders, index))) if rng.random::<f64>() < level.with_repeated => {
                for _ in 0..count.sample(rng) {
                    repeated.push(orders[index.sample(rng)]);
                }
                Some(level.plain.sample(rng))
            }
            _ => Some(level.plain_at_least_two.sample(rng)),
        }
    }

    /// Leaf count of the subtree grown at exponent `m`, consuming randomness
    /// exactly like [`Builder::grow`]. Nodes waiting at the same exponent are
    /// interchangeable, so a counter replaces the stack.
    fn count<R: Rng + ?Sized>(
        &self,
        m: usize,
        outside: usize,
        rng: &mut R,
        cap: usize,
        leaves: &mut usize,
        bufs: &mut Vec<Vec<usize>>,
        depth: usize,
    ) -> Option<usize> {
        if bufs.len() <= depth {
            bufs.push(Vec::new());
        }
        let start = *leaves;
        let mut pending = 1usize;
        while pending > 0 {
            pending -= 1;
            let mut repeated = std::mem::take(&mut bufs[depth]);
            match self.draw(m, rng, &mut repeated) {
                None => *leaves += 1,
                Some(same) => {
                    pending += same;
                    for (j, &i) in repeated.iter().enumerate() {
                        let waiting = outside + pending + (repeated.len() - j - 1);
                        let sub = self.count(m * i, waiting, rng, cap, leaves, bufs, depth + 1)?;
                        *leaves += (i - 1) * sub;
                    }
                }
            }
            bufs[depth] = repeated;
            if leaves.saturating_add(pending).saturating_add(outside) > cap {
                return None;
            }
        }
        Some(*leaves - start)
    }

    /// One Boltzmann tree, or `None` once it is certain to have more than
    /// `cap` leaves. Runs a counting pass first and only builds the tree from
    /// a saved copy of the generator when the count fits, leaving `rng` in
    /// the same state either way.
    pub fn sample_capped<R: Rng + Clone>(&self, rng: &mut R, cap: usize) -> Option<BoltzmannTree> {
        let mut replay = rng.clone();
        let leaves = self.sample_leaf_count(rng, cap)?;
        Some(self.build(&mut replay, leaves))
    }

    fn build<R: Rng + ?Sized>(&self, rng: &mut R, expected_leaves: usize) -> BoltzmannTree {
        let mut b = Builder { sampler: self, rng, children: Vec::new(), colors: Vec::new(), leaves: 0 };
        b.grow(1);
        debug_assert_eq!(b.leaves, expected_leaves, "replay diverged from the counting pass");
        BoltzmannTree { tree: UnorderedTree::new_unchecked(0, b.children), colors: b.colors }
    }

    /// One Boltzmann tree. For `x = ρ` the size has infinite mean, so loops
    /// should use [`sample_capped`](Self::sample_capped).
    pub fn sample<R: Rng + Clone>(&self, rng: &mut R) -> BoltzmannTree {
        self.sample_capped(rng, usize::MAX).expect("uncapped")
    }

    /// Leaf count of a Boltzmann tree without building it, `None` above `cap`.
    pub fn sample_leaf_count<R: Rng + ?Sized>(&self, rng: &mut R, cap: usize) -> Option<usize> {
        let mut leaves = 0;
        self.count(1, 0, rng, cap, &mut leaves, &mut Vec::new(), 0)
    }
}

/// `A(x)` for `x < ρ` by summing the series until the terms are negligible.
fn a_below_rho(x: f64) -> Result<f64> {
    let mut order = 256;
    while order <= 16_384 {
        let terms = scaled_unlabelled(order, x);
        let sum: f64 = terms.iter().sum();
        // the terms decay at least geometrically past the peak
        if terms[order] * order as f64 <= 1e-17 * sum {
            return Ok(sum);
        }
        order *= 2;
    }
    Err(Error::OutOfRange(format!("parameter {x} too close to ρ for series evaluation; use ρ itself")))
}

struct Builder<'a, R: ?Sized> {
    sampler: &'a BoltzmannSampler,
    rng: &'a mut R,
    children: Vec<Vec<NodeId>>,
    colors: Vec<Color>,
    leaves: usize,
}

impl<R: Rng + ?Sized> Builder<'_, R> {
    fn node(&mut self, color: Color) -> NodeId {
        self.children.push(Vec::new());
        self.colors.push(color);
        self.children.len() - 1
    }

    /// Grows a tree at exponent `m`. Branches at the same exponent are kept on
    /// an explicit stack; only repeated branches recurse, and their exponent
    /// at least doubles, so the recursion depth is below log2(MAX_EXPONENT).
    fn grow(&mut self, m: usize) -> NodeId {
        let color = if m == 1 { Color::Blue } else { Color::Green };
        let root = self.node(color);
        let mut stack = vec![root];
        let mut repeated = Vec::new();
        while let Some(v) = stack.pop() {
            match self.sampler.draw(m, self.rng, &mut repeated) {
                None => self.leaves += 1,
                Some(same) => {
                    for _ in 0..same {
                        let c = self.node(color);
                        self.children[v].push(c);
                        stack.push(c);
                    }
                    for &i in &repeated.clone() {
                        let c = self.grow(m * i);
                        self.children[v].push(c);
                        for _ in 1..i {
                            let copy = self.copy(c);
                            self.children[v].push(copy);
                        }
                    }
                }
            }
        }
        root
    }

    fn copy(&mut self, src: NodeId) -> NodeId {
        let top = self.node(self.colors[src]);
        let mut stack = vec![(src, top)];
        while let Some((s, d)) = stack.pop() {
            if self.children[s].is_empty() {
                self.leaves += 1;
            }
            for k in 0..self.children[s].len() {
                let sc = self.children[s][k];
                let dc = self.node(self.colors[sc]);
                self.children[d].push(dc);
                stack.push((sc, dc));
            }
        }
        top
    }
}

/// Output of the Boltzmann sampler: the tree and the colour of every node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoltzmannTree {
    pub tree: UnorderedTree,
    pub colors: Vec<Color>,
}

impl BoltzmannTree {
    /// Collapses every maximal green subtree hanging off a blue node into
    /// its leaves, giving the two-type tree with `ζ` = number of green
    /// leaves below each blue node.
    pub fn to_two_type(&self) -> TwoTypeTree {
        let t = &self.tree;
        let green_leaves = {
            let mut count = vec![0usize; t.node_count()];
            for v in t.preorder().into_iter().rev() {
                count[v] = if t.is_leaf(v) { 1 } else { t.children(v).iter().map(|&c| count[c]).sum() };
            }
            count
        };
        let mut nodes = Vec::new();
        let mut stack = vec![(t.root(), None::<usize>)];
        while let Some((v, parent)) = stack.pop() {
            let id = nodes.len();
            nodes.push(TwoTypeNode { color: Color::Blue, children: Vec::new() });
            if let Some(p) = parent {
                nodes[p].children.push(id);
            }
            for &c in t.children(v).iter().rev() {
                if self.colors[c] == Color::Blue {
                    stack.push((c, Some(id)));
                }
            }
            let greens: usize =
                t.children(v).iter().filter(|&&c| self.colors[c] == Color::Green).map(|&c| green_leaves[c]).sum();
            for _ in 0..greens {
                let g = nodes.len();
                nodes.push(TwoTypeNode { color: Color::Green, children: Vec::new() });
                nodes[id].children.push(g);
            }
        }
        TwoTypeTree::new_unchecked(0, nodes)
    }
}

/// Boltzmann tree at `ρ` conditioned on its leaf count, by rejection. The
/// conditioned law is uniform over unlabelled trees of that size.
pub fn sample_unlabelled_tree<R: Rng + Clone>(
    n: usize,
    rng: &mut R,
    sampler: &BoltzmannSampler,
    budget: &SampleBudget,
) -> Result<Sampled<BoltzmannTree>> {
    if n == 0 {
        return Err(Error::OutOfRange("trees have at least one leaf".into()));
    }
    let (lo, hi) = budget.accepted_sizes(n);
    for attempt in 1..=budget.max_attempts {
        let mut replay = rng.clone();
        if let Some(leaves) = sampler.sample_leaf_count(rng, hi) {
            if leaves >= lo {
                let value = sampler.build(&mut replay, leaves);
                return Ok(Sampled { value, attempts: attempt, leaves });
            }
        }
    }
    Err(Error::BudgetExhausted { attempts: budget.max_attempts })
}

/// Cotree of a uniform unlabelled cograph: the canonical form of a
/// conditioned Boltzmann tree, signed by a fair root coin and height
/// parity, leaves labelled `1..=n` in canonical order.
pub fn sample_unlabelled_cotree<R: Rng + Clone>(
    n: usize,
    rng: &mut R,
    sampler: &BoltzmannSampler,
    budget: &SampleBudget,
) -> Result<Sampled<Cotree>> {
    let s = sample_unlabelled_tree(n, rng, sampler, budget)?;
    let canon = s.value.tree.canonicalize();
    let sign = if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
    let labels: Vec<usize> = (1..=s.leaves).collect();
    let cotree = canon.to_cotree(sign, Some(&labels))?;
    Ok(Sampled { value: cotree, attempts: s.attempts, leaves: s.leaves })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samplers::RngHandle;

    #[test]
    fn leaf_probability_matches_series() {
        let c = default_constants();
        for x in [c.rho_f64(), c.rho_f64() / 2.0] {
            let s = BoltzmannSampler::new(x, c).unwrap();
            let mut rng = RngHandle::new(11, 0).rng();
            let reps = 200_000;
            let hits = (0..reps).filter(|_| s.sample_leaf_count(&mut rng, 1) == Some(1)).count();
            let p = x / s.a_x();
            let sd = (p * (1.0 - p) / reps as f64).sqrt();
            assert!((hits as f64 / reps as f64 - p).abs() < 4.0 * sd, "x={x}");
        }
    }

    #[test]
    fn half_rho_series_value() {
        let c = default_constants();
        let x = c.rho_f64() / 2.0;
        let want = c.phi_series().a_at(&Fixed::from_f64(x)).to_f64();
        assert!((a_below_rho(x).unwrap() / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_parameter() {
        let c = default_constants();
        assert!(BoltzmannSampler::new(0.0, c).is_err());
        assert!(BoltzmannSampler::new(0.5, c).is_err());
    }

    #[test]
    fn two_type_collapse_preserves_leaves() {
        let s = BoltzmannSampler::at_rho();
        let mut rng = RngHandle::new(12, 0).rng();
        let mut greens = 0;
        for _ in 0..3000 {
            if let Some(t) = s.sample_capped(&mut rng, 200) {
                let tt = t.to_two_type();
                assert_eq!(crate::samplers::two_type_leaf_count(&tt), t.tree.leaf_count());
                assert!(t.tree.children(t.tree.root()).len() != 1);
                greens += tt.nodes().iter().filter(|n| n.color == Color::Green).count();
            }
        }
        assert!(greens > 0);
    }
}
