//! One pass/fail line per acceptance criterion, with pinned tolerances and
//! fixed seeds.

use std::collections::{BTreeSet, HashMap};
use std::process::ExitCode;
use std::time::Instant;

use cographon::bijection::{cotree_to_cograph, find_induced_p4, is_cograph};
use cographon::enumeration::{
    default_constants, eta_closed_form, labelled_cograph_count, labelled_counts, leafcount_series,
    unlabelled_cograph_count, unlabelled_counts, xi_zeta_law, Fixed,
};
use cographon::graphon::{parse_probability, q_exact, t_ind_exact, to_f64, MAX_EXACT_K};
use cographon::samplers::{
    enumerate_labelled_cotrees, enumerate_unlabelled_trees, sample_hkp, sample_labelled_cograph,
    sample_unlabelled_cograph, sample_unlabelled_tree, BoltzmannSampler, EtaSampler, RngHandle, SampleBudget,
};
use cographon::skeleton::{
    experiment_density, experiment_distance, experiment_parity, experiment_shape, experiment_stable_llt,
    ExperimentConfig, ExperimentReport, LltConfig, LltRow, Model,
};
use cographon::stats::{chi_squared_test, total_variation};
use cographon::trees::Canonical;
use cographon::LabeledGraph;

struct Verdict {
    pass: bool,
    detail: String,
    /// Set when the failure is the documented one and no other.
    known_failure: Option<&'static str>,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into(), known_failure: None }
}

fn exact_enumeration() -> Verdict {
    let labelled = labelled_counts(7).unwrap();
    let mut notes = Vec::new();
    let mut pass = true;
    for n in 1..=7 {
        let brute = enumerate_labelled_cotrees(n).unwrap().len();
        pass &= labelled_cograph_count(&labelled, n).unwrap() == brute.into();
        notes.push(brute.to_string());
    }
    let unlabelled = unlabelled_counts(10).unwrap();
    let mut trees = Vec::new();
    for n in 1..=10 {
        let brute = enumerate_unlabelled_trees(n).unwrap().len();
        pass &= unlabelled.count(n).unwrap() == brute.into();
        trees.push(brute.to_string());
    }
    verdict(pass, format!("labelled cotrees n<=7: {}; unlabelled trees n<=10: {}", notes.join(","), trees.join(",")))
}

fn cograph_census() -> Verdict {
    let mut classes = BTreeSet::new();
    let mut cograph_classes = BTreeSet::new();
    let mut labelled3 = 0;
    for mask in 0..64u64 {
        let g = LabeledGraph::from_pattern_mask(4, mask);
        classes.insert(g.iso_key());
        if is_cograph(&g) {
            cograph_classes.insert(g.iso_key());
        }
    }
    for mask in 0..8u64 {
        labelled3 += is_cograph(&LabeledGraph::from_pattern_mask(3, mask)) as usize;
    }
    let u4 = unlabelled_cograph_count(&unlabelled_counts(4).unwrap(), 4).unwrap();
    let l3 = labelled_cograph_count(&labelled_counts(3).unwrap(), 3).unwrap();
    let pass = u4 == 10.into()
        && classes.len() == 11
        && cograph_classes.len() == 10
        && l3 == 8.into()
        && labelled3 == 8;
    verdict(
        pass,
        format!(
            "unlabelled n=4: series {u4}, brute {} of {} classes; labelled n=3: series {l3}, brute {labelled3}",
            cograph_classes.len(),
            classes.len()
        ),
    )
}

fn constants() -> Verdict {
    let c = default_constants();
    let rho = c.rho_f64();
    let residual = c.residual_ey.to_f64();
    let (p0, mean, var) = eta_closed_form();
    let mean_err = (&mean - &Fixed::one()).abs().to_f64();
    let var_err = (&var - &Fixed::ln2().mul_int(2)).abs().to_f64();
    let law = xi_zeta_law(c).unwrap();
    let mean_xi = law.mean_xi();
    let gcd = law.support_gcd();
    let pass = residual < 1e-10
        && rho > 0.0
        && rho < 1.0
        && mean_err < 1e-60
        && var_err < 1e-12
        && (mean_xi - 1.0).abs() < 1e-8
        && gcd == 1
        && p0.to_f64() > 0.0;
    verdict(
        pass,
        format!(
            "rho = {rho:.12}, |E_y - 1| = {}, |E eta - 1| = {}, |Var eta - 2 ln 2| = {}, |E xi - 1| = {:.1e}, gcd = {gcd}",
            small(residual),
            small(mean_err),
            small(var_err),
            (mean_xi - 1.0).abs()
        ),
    )
}

/// Fixed-point errors below `2^-64` convert to zero.
fn small(x: f64) -> String {
    if x == 0.0 {
        "< 6e-20".into()
    } else {
        format!("{x:.1e}")
    }
}

fn asymptotics() -> Verdict {
    let c = default_constants();
    let table = unlabelled_counts(200).unwrap();
    let n = 200f64;
    let ratio_a = table.coeff_f64(200) * c.rho_f64().powi(200) * n.powf(1.5) / c.c_a.to_f64();
    let z = leafcount_series(400, &xi_zeta_law(c).unwrap()).unwrap().to_f64();
    let ratio_z = 400f64.powf(1.5) * z[400] / c.c_z.to_f64();
    let pass = (0.95..=1.05).contains(&ratio_a) && (0.9..=1.1).contains(&ratio_z);
    verdict(pass, format!("A_200 n^1.5 rho^n / c_A = {ratio_a:.5} in [0.95, 1.05]; n^1.5 [z^400]Z / c_Z = {ratio_z:.5} in [0.9, 1.1]"))
}

fn uniformity() -> Verdict {
    let reps = 100_000;
    let budget = SampleBudget::default();
    let eta = EtaSampler::new();
    let mut rng = RngHandle::new(101, 0).rng();
    let mut graphs: HashMap<Vec<(usize, usize)>, u64> = HashMap::new();
    for t in enumerate_labelled_cotrees(3).unwrap() {
        graphs.insert(cotree_to_cograph(&t).unwrap().edges(), 0);
    }
    for _ in 0..reps {
        let g = sample_labelled_cograph(3, &mut rng, &eta, &budget).unwrap().value.graph;
        *graphs.get_mut(&g.edges()).expect("known graph") += 1;
    }
    let obs: Vec<u64> = graphs.values().copied().collect();
    let p_labelled = chi_squared_test(&obs, &vec![1.0; obs.len()]).unwrap().p_value;

    let mut trees: HashMap<String, u64> =
        enumerate_unlabelled_trees(6).unwrap().iter().map(|t| (t.canonical_string(), 0)).collect();
    let mut rng = RngHandle::new(102, 0).rng();
    for _ in 0..reps {
        let t = sample_unlabelled_tree(6, &mut rng, BoltzmannSampler::at_rho(), &budget).unwrap();
        *trees.get_mut(&t.value.tree.canonical_string()).expect("known tree") += 1;
    }
    let obs: Vec<u64> = trees.values().copied().collect();
    let p_unlabelled = chi_squared_test(&obs, &vec![1.0; obs.len()]).unwrap().p_value;
    let pass = graphs.len() == 8 && trees.len() == 33 && p_labelled > 0.001 && p_unlabelled > 0.001;
    verdict(
        pass,
        format!(
            "labelled n=3 over {} graphs: p = {p_labelled:.4}; unlabelled n=6 over {} trees: p = {p_unlabelled:.4}; {reps} samples each",
            graphs.len(),
            trees.len()
        ),
    )
}

fn fingerprint() -> Verdict {
    let mut pass = true;
    let mut notes = Vec::new();
    for model in [Model::Labelled, Model::Unlabelled] {
        let cfg = ExperimentConfig::new(model, 2000, 3, 100, 14);
        let r = experiment_density(&cfg, 100).unwrap();
        pass &= r.pass;
        notes.push(format!(
            "{model}: tv = {:.4}, edge density = {:.4}, triangle density = {:.4}",
            r.statistic,
            r.details["edge_density"]["mean"].as_f64().unwrap(),
            r.details["triangle_density"].as_f64().unwrap()
        ));
    }
    verdict(pass, format!("{} (100 graphs, n = 2000, 10^4 triples)", notes.join("; ")))
}

fn p4_exclusion() -> Verdict {
    let budget = SampleBudget::default();
    let eta = EtaSampler::new();
    let mut rng = RngHandle::new(103, 0).rng();
    let p4 = LabeledGraph::path(4);
    let mut checked = 0;
    let mut pass = true;
    let mut check = |g: &LabeledGraph| {
        checked += 1;
        pass &= is_cograph(g) && find_induced_p4(g).is_none();
        if g.n() >= 4 && g.n() <= 24 {
            pass &= t_ind_exact(&p4, g).unwrap().value == 0.0;
        }
    };
    for n in 3..=60 {
        for _ in 0..4 {
            check(&sample_labelled_cograph(n, &mut rng, &eta, &budget).unwrap().value.graph);
            check(&sample_unlabelled_cograph(n, &mut rng, BoltzmannSampler::at_rho(), &budget).unwrap().value.graph);
        }
    }
    for k in 4..=8 {
        for _ in 0..2000 {
            check(&sample_hkp(k, 0.5, &mut rng).unwrap());
        }
    }
    let asserted = cfg!(debug_assertions);
    verdict(
        pass && asserted,
        format!("{checked} fresh graphs P4-free; in-sampler assertion active for every other graph in this run: {asserted}"),
    )
}

fn skeleton_limits() -> Verdict {
    let mut pass = true;
    let mut notes = Vec::new();
    let mut record = |r: ExperimentReport| {
        pass &= r.pass;
        notes.push(format!(
            "{} {} k={} n={}: {} = {:.4}{}",
            r.test,
            r.model.unwrap(),
            r.k,
            r.n,
            r.statistic_name,
            r.statistic,
            r.p_value.filter(|_| r.statistic_name != "ks").map(|p| format!(" p = {p:.4}")).unwrap_or_default()
        ));
    };
    for model in [Model::Labelled, Model::Unlabelled] {
        for k in [2, 3] {
            let cfg = ExperimentConfig::new(model, 2000, k, 2000, 11).with_window(0.1).unwrap();
            record(experiment_shape(&cfg).unwrap());
        }
        let cfg = ExperimentConfig::new(model, 5000, 2, 20_000, 13).with_window(0.1).unwrap();
        record(experiment_parity(&cfg).unwrap());
        for k in [1, 2] {
            let cfg = ExperimentConfig::new(model, 2000, k, 2000, 12).with_window(0.1).unwrap();
            record(experiment_distance(&cfg).unwrap());
        }
    }
    verdict(pass, format!("{} (sizes within 10% of n)", notes.join("; ")))
}

/// The n = 50 threshold is below the exact discrepancy of the true law of
/// `S_50`, so this criterion is expected to fail; see the decisions ledger.
fn local_limit() -> Verdict {
    let r = experiment_stable_llt(&LltConfig::default()).unwrap();
    let rows: Vec<LltRow> = serde_json::from_value(r.details["rows"].clone()).unwrap();
    let list: Vec<String> = rows.iter().map(|row| format!("n={}: {:.4}", row.n, row.discrepancy)).collect();
    let decreasing = rows.windows(2).all(|w| w[1].discrepancy < w[0].discrepancy);
    let at_50 = rows.iter().find(|row| row.n == 50).map_or(f64::NAN, |row| row.discrepancy);
    let mut v = verdict(
        r.pass,
        format!("exact convolution, max_r discrepancy {} (decreasing: {decreasing}; need < 0.05 at n=50)", list.join(", ")),
    );
    if !r.pass && decreasing && (0.085..0.095).contains(&at_50) {
        v.known_failure = Some("the exact law of S_50 is 0.091 away from the limit density, about 4.5/n");
    }
    v
}

fn limit_law() -> Verdict {
    let mut pass = true;
    let mut notes = Vec::new();
    let mut rng = RngHandle::new(104, 0).rng();
    let half = parse_probability("1/2").unwrap();
    for k in [3, 4] {
        let exact = q_exact(k, &half).unwrap().to_f64_vec();
        let mut counts = vec![0u64; exact.len()];
        let reps = 100_000;
        for _ in 0..reps {
            counts[sample_hkp(k, 0.5, &mut rng).unwrap().pattern_mask() as usize] += 1;
        }
        let emp: Vec<f64> = counts.iter().map(|&c| c as f64 / reps as f64).collect();
        let tv = total_variation(&emp, &exact);
        pass &= tv < 0.02;
        notes.push(format!("k={k}: tv = {tv:.4}"));
    }
    let mut symmetric = true;
    for k in 2..=MAX_EXACT_K {
        for p in ["1/2", "1/3", "2/7"] {
            let p = parse_probability(p).unwrap();
            let q = q_exact(k, &p).unwrap();
            let flipped = q_exact(k, &(parse_probability("1").unwrap() - &p)).unwrap();
            let full = (1u64 << (k * (k - 1) / 2)) - 1;
            symmetric &= q.table.len() == flipped.table.len()
                && q.table.iter().all(|(&m, v)| flipped.prob(full ^ m) == *v);
            symmetric &= to_f64(&q.total()) == 1.0;
        }
    }
    pass &= symmetric;
    verdict(pass, format!("{} (10^5 samples each); complement symmetry exact for k <= 5: {symmetric}", notes.join(", ")))
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, fn() -> Verdict)> = vec![
        ("exact enumeration", exact_enumeration),
        ("cograph census", cograph_census),
        ("constants", constants),
        ("asymptotics", asymptotics),
        ("sampler uniformity", uniformity),
        ("graphon fingerprint", fingerprint),
        ("P4 exclusion", p4_exclusion),
        ("skeleton limits", skeleton_limits),
        ("local limit theorem", local_limit),
        ("limit-law oracle", limit_law),
    ];
    let mut unexpected = 0;
    let mut passed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        let start = Instant::now();
        let v = f();
        let secs = start.elapsed().as_secs_f64();
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {id} ({name}): {status} [{secs:.1} s] {}", v.detail);
        if v.pass {
            passed += 1;
        } else if let Some(why) = v.known_failure {
            println!("    known unattainable: {why}");
        } else {
            unexpected += 1;
        }
    }
    println!("acceptance: {passed}/{} criteria pass, {unexpected} unexpected failures", criteria.len());
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
