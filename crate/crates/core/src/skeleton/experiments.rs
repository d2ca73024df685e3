//! Monte Carlo checks of the skeleton limits and of the induced-pattern law.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_rational::BigRational;
use rand::seq::index;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::{spanned_skeleton_oriented, SkeletonSummary};
use crate::enumeration::{default_constants, eta_closed_form};
use crate::error::{Error, Result};
use crate::graph::LabeledGraph;
use crate::graphon::{edge_density, q_exact, sample_pattern, MAX_EXACT_K};
use crate::samplers::{
    enumerate_proper_k_trees, proper_k_tree_count, sample_conditioned_eta_tree, sample_labelled_cograph,
    sample_unlabelled_cograph, sample_unlabelled_tree, BoltzmannSampler, EtaSampler, RngHandle, SampleBudget,
    MAX_ENUMERATED_K,
};
use crate::stats::{chi_even_cdf, chi_squared_test, ks_p_value, ks_statistic, mean_stderr, total_variation};
use crate::trees::{Ancestry, RootedTree, UnorderedTree};

pub const P_THRESHOLD: f64 = 0.001;
pub const KS_THRESHOLD: f64 = 0.05;
pub const TV_THRESHOLD: f64 = 0.05;
pub const EDGE_DENSITY_TOL: f64 = 0.02;
pub const TRIANGLE_DENSITY_TOL: f64 = 0.03;

/// Repetitions per random stream. Each chunk gets its own stream, so the
/// output does not depend on how chunks are spread over threads.
const CHUNK: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Labelled,
    Unlabelled,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Labelled => "labelled",
            Model::Unlabelled => "unlabelled",
        })
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "labelled" | "labeled" => Ok(Model::Labelled),
            "unlabelled" | "unlabeled" => Ok(Model::Unlabelled),
            _ => Err(Error::OutOfRange(format!("unknown model {s:?}, expected labelled or unlabelled"))),
        }
    }
}

impl Model {
    /// Factor `c` with `c · (path length) / √n` converging to the limit
    /// lengths. Labelled: `√P(η=0) · σ_η`. Unlabelled: `Var ξ / σ`.
    pub fn distance_scale(self) -> f64 {
        match self {
            Model::Labelled => {
                let (p0, _, var) = eta_closed_form();
                (p0.to_f64() * var.to_f64()).sqrt()
            }
            Model::Unlabelled => {
                let c = default_constants();
                c.var_xi.to_f64() / c.sigma.to_f64()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub model: Model,
    pub n: usize,
    pub k: usize,
    pub reps: usize,
    pub seed: u64,
    pub budget: SampleBudget,
    /// Print progress to standard error.
    #[serde(skip)]
    pub progress: bool,
}

impl ExperimentConfig {
    pub fn new(model: Model, n: usize, k: usize, reps: usize, seed: u64) -> Self {
        ExperimentConfig { model, n, k, reps, seed, budget: SampleBudget::default(), progress: false }
    }

    pub fn with_window(mut self, eps: f64) -> Result<Self> {
        self.budget = self.budget.with_window(eps)?;
        Ok(self)
    }

    fn check(&self) -> Result<()> {
        if self.k == 0 || self.k > self.n {
            return Err(Error::OutOfRange(format!("need 1 ≤ k ≤ n, got k = {} and n = {}", self.k, self.n)));
        }
        if self.reps == 0 {
            return Err(Error::OutOfRange("need at least one repetition".into()));
        }
        Ok(())
    }
}

/// One pass/fail line of a Monte Carlo check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub test: String,
    pub model: Option<Model>,
    pub n: usize,
    pub k: usize,
    pub reps: usize,
    /// Samples entering the statistic.
    pub accepted: usize,
    pub non_proper_fraction: Option<f64>,
    pub statistic_name: String,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub threshold: String,
    pub pass: bool,
    pub seed: u64,
    pub size_window: Option<f64>,
    pub details: Value,
}

pub const CSV_HEADER: &str =
    "test,model,n,k,reps,accepted,non_proper_fraction,statistic_name,statistic,p_value,threshold,pass,seed,size_window";

fn opt<T: fmt::Display>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl ExperimentReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// One CSV row matching [`CSV_HEADER`].
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},\"{}\",{},{},{}",
            self.test,
            opt(self.model),
            self.n,
            self.k,
            self.reps,
            self.accepted,
            opt(self.non_proper_fraction),
            self.statistic_name,
            self.statistic,
            opt(self.p_value),
            self.threshold,
            self.pass,
            self.seed,
            opt(self.size_window)
        )
    }

    /// `lo,hi,count` rows of the histogram stored in `details`, if any.
    pub fn histogram_csv(&self) -> Option<String> {
        let bins = self.details.get("histogram")?.as_array()?;
        let mut out = String::from("lo,hi,count\n");
        for b in bins {
            out.push_str(&format!("{},{},{}\n", b["lo"], b["hi"], b["count"]));
        }
        Some(out)
    }

    /// `name: PASS|FAIL (statistic ...)`.
    pub fn summary_line(&self) -> String {
        let p = self.p_value.map(|p| format!(", p = {p:.4}")).unwrap_or_default();
        format!(
            "{}: {} ({} = {:.5}{p}, threshold {}, {} samples)",
            self.test,
            if self.pass { "PASS" } else { "FAIL" },
            self.statistic_name,
            self.statistic,
            self.threshold,
            self.accepted
        )
    }
}

/// Runs `f` on `reps` items split into fixed chunks, one random stream per
/// chunk, and concatenates the results in chunk order.
fn run_chunks<T, F>(seed: u64, reps: usize, progress: Option<&str>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> Result<Vec<T>> + Sync,
{
    let chunks = reps.div_ceil(CHUNK);
    let done = AtomicUsize::new(0);
    let parts: Vec<Result<Vec<T>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = RngHandle::new(seed, c as u64).rng();
            let size = CHUNK.min(reps - c * CHUNK);
            let out = f(&mut rng, size);
            if let Some(name) = progress {
                let d = done.fetch_add(1, Ordering::Relaxed) + 1;
                if d * 10 / chunks != (d - 1) * 10 / chunks || d == chunks {
                    eprintln!("[{name}] {}/{reps}", (d * CHUNK).min(reps));
                }
            }
            out
        })
        .collect();
    let mut out = Vec::with_capacity(reps);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// A conditioned tree of the model and its leaf count.
fn sample_tree(model: Model, n: usize, rng: &mut ChaCha8Rng, budget: &SampleBudget) -> Result<(UnorderedTree, usize)> {
    match model {
        Model::Labelled => {
            let s = sample_conditioned_eta_tree(n, rng, &EtaSampler::new(), budget)?;
            Ok((s.value, s.leaves))
        }
        Model::Unlabelled => {
            let s = sample_unlabelled_tree(n, rng, BoltzmannSampler::at_rho(), budget)?;
            Ok((s.value.tree, s.leaves))
        }
    }
}

/// Skeletons of `reps` independent conditioned trees, each spanned by `k`
/// distinct uniform leaves with random plane orientation.
#[derive(Clone, Debug)]
pub struct SkeletonBatch {
    pub summaries: Vec<SkeletonSummary>,
    /// Leaf count of the tree behind each summary.
    pub sizes: Vec<usize>,
}

impl SkeletonBatch {
    pub fn proper(&self) -> impl Iterator<Item = (&SkeletonSummary, usize)> {
        self.summaries.iter().zip(self.sizes.iter().copied()).filter(|(s, _)| s.is_proper())
    }

    pub fn non_proper_fraction(&self) -> f64 {
        let bad = self.summaries.iter().filter(|s| !s.is_proper()).count();
        bad as f64 / self.summaries.len().max(1) as f64
    }
}

pub fn sample_skeletons(cfg: &ExperimentConfig, name: &str) -> Result<SkeletonBatch> {
    cfg.check()?;
    let progress = cfg.progress.then_some(name);
    let rows = run_chunks(cfg.seed, cfg.reps, progress, |rng, count| {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let (tree, leaves) = sample_tree(cfg.model, cfg.n, rng, &cfg.budget)?;
            let all = tree.leaves();
            let chosen: Vec<usize> = index::sample(rng, all.len(), cfg.k).into_iter().map(|i| all[i]).collect();
            let anc = Ancestry::new(&tree);
            out.push((spanned_skeleton_oriented(&tree, &anc, &chosen, rng)?, leaves));
        }
        Ok(out)
    })?;
    let (summaries, sizes) = rows.into_iter().unzip();
    Ok(SkeletonBatch { summaries, sizes })
}

fn base_report(cfg: &ExperimentConfig, test: &str, batch: &SkeletonBatch) -> ExperimentReport {
    ExperimentReport {
        test: test.to_string(),
        model: Some(cfg.model),
        n: cfg.n,
        k: cfg.k,
        reps: cfg.reps,
        accepted: batch.proper().count(),
        non_proper_fraction: Some(batch.non_proper_fraction()),
        statistic_name: String::new(),
        statistic: 0.0,
        p_value: None,
        threshold: String::new(),
        pass: false,
        seed: cfg.seed,
        size_window: cfg.budget.size_window,
        details: Value::Null,
    }
}

fn require_proper(batch: &SkeletonBatch) -> Result<()> {
    let accepted = batch.proper().count();
    if accepted < 2 {
        return Err(Error::InsufficientSamples { accepted, required: 2 });
    }
    Ok(())
}

/// Frequencies of the reduced plane shape among proper outcomes against the
/// uniform law on the `2^{k-1} (2k-3)!!` proper k-trees.
pub fn experiment_shape(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if cfg.k > MAX_ENUMERATED_K {
        return Err(Error::OutOfRange(format!("shape test supports k ≤ {MAX_ENUMERATED_K}")));
    }
    let batch = sample_skeletons(cfg, "shape")?;
    shape_report(cfg, &batch)
}

pub fn shape_report(cfg: &ExperimentConfig, batch: &SkeletonBatch) -> Result<ExperimentReport> {
    require_proper(batch)?;
    let mut counts: BTreeMap<String, u64> =
        enumerate_proper_k_trees(cfg.k)?.iter().map(|t| (t.code(), 0)).collect();
    for (s, _) in batch.proper() {
        *counts.get_mut(&s.code).expect("proper shapes are enumerated") += 1;
    }
    let mut r = base_report(cfg, "shape", batch);
    r.threshold = format!("p > {P_THRESHOLD}");
    r.statistic_name = "chi2".into();
    r.details = json!({ "shapes": proper_k_tree_count(cfg.k) as u64, "counts": counts });
    if counts.len() == 1 {
        r.p_value = Some(1.0);
        r.pass = true;
        return Ok(r);
    }
    let obs: Vec<u64> = counts.values().copied().collect();
    let test = chi_squared_test(&obs, &vec![1.0; obs.len()])?;
    r.statistic = test.statistic;
    r.p_value = Some(test.p_value);
    r.pass = test.p_value > P_THRESHOLD;
    r.details["df"] = json!(test.df);
    Ok(r)
}

/// Parities of the `2k - 1` path lengths, and of the heights of the
/// essential non-root vertices, each against `2k - 1` fair coins. Passes
/// when both do.
pub fn experiment_parity(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let batch = sample_skeletons(cfg, "parity")?;
    parity_report(cfg, &batch)
}

pub fn parity_report(cfg: &ExperimentConfig, batch: &SkeletonBatch) -> Result<ExperimentReport> {
    require_proper(batch)?;
    let cells = 1usize << (2 * cfg.k - 1);
    let mut by_length = vec![0u64; cells];
    let mut by_height = vec![0u64; cells];
    for (s, _) in batch.proper() {
        by_length[SkeletonSummary::parity_index(&s.distance_parities)] += 1;
        by_height[SkeletonSummary::parity_index(&s.height_parities)] += 1;
    }
    let uniform = vec![1.0; cells];
    let lengths = chi_squared_test(&by_length, &uniform)?;
    let heights = chi_squared_test(&by_height, &uniform)?;
    let mut r = base_report(cfg, "parity", batch);
    r.statistic_name = "chi2".into();
    r.statistic = lengths.statistic;
    r.p_value = Some(lengths.p_value);
    r.threshold = format!("p > {P_THRESHOLD} for path lengths and for heights");
    r.pass = lengths.p_value > P_THRESHOLD && heights.p_value > P_THRESHOLD;
    r.details = json!({
        "path_lengths": { "counts": by_length, "chi2": lengths },
        "heights": { "counts": by_height, "chi2": heights },
    });
    Ok(r)
}

/// Total skeleton length rescaled by the model constant and the actual leaf
/// count, against the chi distribution with `2k` degrees of freedom (the
/// law of `Σ s_i` under `h`).
pub fn experiment_distance(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let batch = sample_skeletons(cfg, "distance")?;
    distance_report(cfg, &batch)
}

pub fn distance_report(cfg: &ExperimentConfig, batch: &SkeletonBatch) -> Result<ExperimentReport> {
    require_proper(batch)?;
    let c = cfg.model.distance_scale();
    let totals: Vec<f64> = batch.proper().map(|(s, l)| c * s.total_length() as f64 / (l as f64).sqrt()).collect();
    let k = cfg.k;
    let d = ks_statistic(&totals, |s| chi_even_cdf(s, k));
    let (mean, stderr) = mean_stderr(&totals);
    let mut r = base_report(cfg, "distance", batch);
    r.statistic_name = "ks".into();
    r.statistic = d;
    r.p_value = Some(ks_p_value(d, totals.len()));
    r.threshold = format!("ks < {KS_THRESHOLD}");
    r.pass = d < KS_THRESHOLD;
    r.details = json!({
        "scale": c,
        "mean": mean,
        "stderr": stderr,
        "limit_mean": chi_mean(k),
        "histogram": histogram(&totals, 0.0, 6.0, 30),
    });
    Ok(r)
}

/// Mean of the chi distribution with `2k` degrees of freedom,
/// `√2 Γ(k + 1/2) / Γ(k)`.
fn chi_mean(k: usize) -> f64 {
    std::f64::consts::SQRT_2 * (libm::lgamma(k as f64 + 0.5) - libm::lgamma(k as f64)).exp()
}

fn histogram(xs: &[f64], lo: f64, hi: f64, bins: usize) -> Value {
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &x in xs {
        let b = ((x - lo) / width).floor();
        if b >= 0.0 && (b as usize) < bins {
            counts[b as usize] += 1;
        }
    }
    Value::Array(
        counts
            .iter()
            .enumerate()
            .map(|(i, &c)| json!({ "lo": lo + i as f64 * width, "hi": lo + (i + 1) as f64 * width, "count": c }))
            .collect(),
    )
}

/// Induced patterns of uniform `k`-tuples, pooled over `reps` sampled
/// cographs with `per_graph` tuples each, against the exact law of
/// `H_k^{1/2}`. Also reports the mean edge density and, for `k = 3`, the
/// triangle frequency. `cfg.n` is the graph size.
pub fn experiment_density(cfg: &ExperimentConfig, per_graph: usize) -> Result<ExperimentReport> {
    cfg.check()?;
    if !(2..=MAX_EXACT_K).contains(&cfg.k) {
        return Err(Error::OutOfRange(format!("density experiment supports 2 ≤ k ≤ {MAX_EXACT_K}")));
    }
    if per_graph == 0 {
        return Err(Error::OutOfRange("need at least one tuple per graph".into()));
    }
    let k = cfg.k;
    let progress = cfg.progress.then_some("density");
    let rows = run_chunks(cfg.seed, cfg.reps, progress, |rng, count| {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let g: LabeledGraph = match cfg.model {
                Model::Labelled => sample_labelled_cograph(cfg.n, rng, &EtaSampler::new(), &cfg.budget)?.value.graph,
                Model::Unlabelled => {
                    sample_unlabelled_cograph(cfg.n, rng, BoltzmannSampler::at_rho(), &cfg.budget)?.value.graph
                }
            };
            let patterns: Vec<u64> = (0..per_graph).map(|_| sample_pattern(&g, k, rng)).collect();
            out.push((edge_density(&g), patterns));
        }
        Ok(out)
    })?;
    let half = BigRational::new(1.into(), 2.into());
    let exact = q_exact(k, &half)?.to_f64_vec();
    let mut counts = vec![0u64; exact.len()];
    for (_, ps) in &rows {
        for &m in ps {
            counts[m as usize] += 1;
        }
    }
    let total = (rows.len() * per_graph) as f64;
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
    let tv = total_variation(&empirical, &exact);
    let densities: Vec<f64> = rows.iter().map(|(d, _)| *d).collect();
    let (edge_mean, edge_stderr) = mean_stderr(&densities);
    let full = exact.len() - 1;
    let triangle = (k == 3).then(|| empirical[full]);
    let mut pass = tv < TV_THRESHOLD && (edge_mean - 0.5).abs() < EDGE_DENSITY_TOL;
    if let Some(t) = triangle {
        pass &= (t - 0.25).abs() < TRIANGLE_DENSITY_TOL;
    }
    let table: BTreeMap<String, (f64, f64)> = (0..exact.len())
        .filter(|&m| exact[m] > 0.0 || counts[m] > 0)
        .map(|m| (LabeledGraph::from_pattern_mask(k, m as u64).pattern_key(), (empirical[m], exact[m])))
        .collect();
    Ok(ExperimentReport {
        test: "density".into(),
        model: Some(cfg.model),
        n: cfg.n,
        k,
        reps: cfg.reps,
        accepted: rows.len() * per_graph,
        non_proper_fraction: None,
        statistic_name: "tv".into(),
        statistic: tv,
        p_value: None,
        threshold: format!(
            "tv < {TV_THRESHOLD}, |edge density - 1/2| < {EDGE_DENSITY_TOL}, |triangle density - 1/4| < {TRIANGLE_DENSITY_TOL}"
        ),
        pass,
        seed: cfg.seed,
        size_window: cfg.budget.size_window,
        details: json!({
            "graphs": rows.len(),
            "tuples_per_graph": per_graph,
            "edge_density": { "mean": edge_mean, "stderr": edge_stderr },
            "triangle_density": triangle,
            "patterns": table,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scales_are_positive_and_finite() {
        for m in [Model::Labelled, Model::Unlabelled] {
            let c = m.distance_scale();
            assert!(c.is_finite() && c > 0.0, "{m}: {c}");
        }
        // √((2 - 1/ln 2) · 2 ln 2) = √(4 ln 2 - 2)
        let want = (4.0 * std::f64::consts::LN_2 - 2.0).sqrt();
        assert!((Model::Labelled.distance_scale() - want).abs() < 1e-12);
    }

    #[test]
    fn chi_mean_values() {
        // Rayleigh mean √(π/2)
        assert!((chi_mean(1) - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn results_do_not_depend_on_thread_count() {
        let cfg = ExperimentConfig::new(Model::Labelled, 40, 2, 100, 5).with_window(0.2).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| experiment_parity(&cfg)).unwrap();
        let b = four.install(|| experiment_parity(&cfg)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn small_n_reports_without_asserting() {
        let cfg = ExperimentConfig::new(Model::Unlabelled, 10, 2, 200, 9);
        let r = experiment_parity(&cfg).unwrap();
        assert_eq!(r.reps, 200);
        assert!(r.p_value.is_some());
        let row = r.to_csv_row();
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count(), "{row}");
    }

    #[test]
    fn k_one_shape_is_trivial() {
        let cfg = ExperimentConfig::new(Model::Labelled, 30, 1, 40, 1);
        let r = experiment_shape(&cfg).unwrap();
        assert!(r.pass);
        assert_eq!(r.non_proper_fraction, Some(0.0));
    }

    #[test]
    fn model_names() {
        assert_eq!("labeled".parse::<Model>().unwrap(), Model::Labelled);
        assert!("limit".parse::<Model>().is_err());
        assert_eq!(Model::Unlabelled.to_string(), "unlabelled");
    }

    #[test]
    fn bad_configs() {
        assert!(experiment_shape(&ExperimentConfig::new(Model::Labelled, 5, 0, 10, 1)).is_err());
        assert!(experiment_shape(&ExperimentConfig::new(Model::Labelled, 5, 2, 0, 1)).is_err());
        assert!(experiment_density(&ExperimentConfig::new(Model::Labelled, 10, 6, 3, 1), 5).is_err());
    }

    #[test]
    fn density_report_on_small_graphs() {
        let cfg = ExperimentConfig::new(Model::Labelled, 30, 2, 20, 3);
        let r = experiment_density(&cfg, 50).unwrap();
        assert_eq!(r.accepted, 1000);
        let e = r.details["edge_density"]["mean"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&e));
    }
}
