use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cographon::bijection::{cograph_to_cotree, is_cograph};
use cographon::enumeration::{
    find_constants_with_order, labelled_cograph_count, labelled_counts, unlabelled_cograph_count, unlabelled_counts,
    SeriesTable, DEFAULT_ORDER,
};
use cographon::graphon::{fraction, parse_probability, q_by_splitting, q_exact, t_ind_exact, t_ind_mc, MAX_EXACT_K};
use cographon::samplers::{
    enumerate_labelled_cotrees, enumerate_unlabelled_trees, sample_hkp, sample_labelled_cograph,
    sample_unlabelled_cograph, BoltzmannSampler, EtaSampler, RngHandle, SampleBudget,
};
use cographon::skeleton::{
    experiment_density, experiment_distance, experiment_parity, experiment_shape, experiment_stable_llt,
    ExperimentConfig, ExperimentReport, LltConfig, Model, CSV_HEADER,
};
use cographon::trees::Canonical;
use cographon::{Error, LabeledGraph};
use rayon::prelude::*;
use serde_json::{json, Value};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Random cographs, their cotrees and their graphon limits.
#[derive(Parser, Debug)]
#[command(name = "cographon", version)]
struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true, env = "COGRAPHON_SEED", default_value_t = 1)]
    seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write data here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact tree and cograph counts as CSV.
    Count {
        kind: Kind,
        #[arg(long)]
        max: usize,
    },
    /// Singularity constants as JSON; fails when a residual exceeds the tolerance.
    Constants {
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
    },
    /// Random graphs as JSON lines or edge lists.
    Sample(SampleArgs),
    /// Induced density of a pattern in a graph, or the exact limit law.
    Density(DensityArgs),
    /// Monte Carlo checks of the limit theorems.
    Experiment(ExperimentArgs),
    /// Brute-force cross-checks of the exact computations.
    Oracle,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Labelled,
    Unlabelled,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum SampleModel {
    Labelled,
    Unlabelled,
    Limit,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Edges,
}

#[derive(Args, Debug)]
struct SampleArgs {
    model: SampleModel,
    /// Number of vertices (labelled and unlabelled models).
    #[arg(short)]
    n: Option<usize>,
    /// Number of vertices of the limit sample.
    #[arg(short)]
    k: Option<usize>,
    /// Join probability of the limit sample, in (0, 1).
    #[arg(short, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Accept any size within n(1 ± window).
    #[arg(long)]
    window: Option<f64>,
    #[arg(long, default_value_t = 100_000_000)]
    max_attempts: u64,
}

#[derive(Args, Debug)]
struct DensityArgs {
    /// Host graph (JSON or edge list).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Pattern graph on k ≤ 8 vertices (JSON or edge list).
    #[arg(long)]
    pattern: Option<PathBuf>,
    /// Monte Carlo repetitions instead of the exact count.
    #[arg(long)]
    reps: Option<u64>,
    /// Print the exact law of the k-vertex limit sample instead.
    #[arg(long)]
    limit: bool,
    #[arg(short, default_value_t = 3)]
    k: usize,
    /// Join probability as a fraction or decimal.
    #[arg(short, default_value = "1/2")]
    p: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExperimentName {
    Shape,
    Parity,
    Distance,
    Density,
    Llt,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    name: ExperimentName,
    #[arg(long, value_enum, default_value_t = Kind::Labelled)]
    model: Kind,
    #[arg(short, default_value_t = 2000)]
    n: usize,
    #[arg(short, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 2000)]
    reps: usize,
    /// Accept tree sizes within n(1 ± window).
    #[arg(long)]
    window: Option<f64>,
    /// Tuples per graph in the density experiment.
    #[arg(long, default_value_t = 100)]
    per_graph: usize,
    /// Sizes for the local limit check.
    #[arg(long, value_delimiter = ',', default_values_t = [20, 50, 80])]
    n_list: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

/// A failed command: usage errors exit with 2, runtime errors with 3.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfRange(m) => Failure::Usage(m),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

/// Data produced by a command and whether its checks passed.
struct Outcome {
    data: String,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().expect("thread pool set once");
    }
    let result = run(&cli).and_then(|out| {
        match &cli.output {
            Some(path) => fs::write(path, &out.data)?,
            None => io::stdout().lock().write_all(out.data.as_bytes())?,
        }
        Ok(out.ok)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

fn meta(cli: &Cli, config: Value) -> Value {
    json!({ "seed": cli.seed, "version": VERSION, "config": config })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Count { kind, max } => count(cli, *kind, *max),
        Command::Constants { tol, order } => constants(cli, *tol, *order),
        Command::Sample(a) => sample(cli, a),
        Command::Density(a) => density(cli, a),
        Command::Experiment(a) => experiment(cli, a),
        Command::Oracle => oracle(cli),
    }
}

fn count(cli: &Cli, kind: Kind, max: usize) -> Result<Outcome, Failure> {
    if max == 0 {
        return Err(Failure::Usage("--max must be at least 1".into()));
    }
    let (table, cographs): (SeriesTable, fn(&SeriesTable, usize) -> Option<_>) = match kind {
        Kind::Labelled => (labelled_counts(max)?, labelled_cograph_count),
        Kind::Unlabelled => (unlabelled_counts(max)?, unlabelled_cograph_count),
    };
    let mut data = format!("# {}\nn,coefficient,trees,cographs\n", meta(cli, json!({ "kind": format!("{kind:?}").to_lowercase(), "max": max })));
    for n in 1..=max {
        let coeff = table.exact(n).expect("exact table");
        let trees = table.count(n).expect("counting series");
        let graphs = cographs(&table, n).expect("counting series");
        data.push_str(&format!("{n},{coeff},{trees},{graphs}\n"));
    }
    Ok(Outcome { data, ok: true })
}

fn constants(cli: &Cli, tol: f64, order: usize) -> Result<Outcome, Failure> {
    let c = find_constants_with_order(order, tol)?;
    let report = c.report();
    let rho = report.rho.value;
    let ok = report.residual_ey < tol && rho > 0.0 && rho < 1.0;
    let doc = json!({ "meta": meta(cli, json!({ "tol": tol, "order": order })), "constants": report, "pass": ok });
    Ok(Outcome { data: format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")), ok })
}

fn sample(cli: &Cli, a: &SampleArgs) -> Result<Outcome, Failure> {
    if a.count == 0 {
        return Err(Failure::Usage("--count must be at least 1".into()));
    }
    if a.format == Format::Csv {
        return Err(Failure::Usage("samples are written as json or edges".into()));
    }
    let mut budget = SampleBudget::new(a.max_attempts)?;
    if let Some(w) = a.window {
        budget = budget.with_window(w)?;
    }
    let size = match a.model {
        SampleModel::Limit => {
            let k = a.k.ok_or_else(|| Failure::Usage("the limit model needs -k".into()))?;
            if k == 0 {
                return Err(Failure::Usage("-k must be at least 1".into()));
            }
            if !(a.p > 0.0 && a.p < 1.0) {
                return Err(Failure::Usage(format!("-p must lie in (0, 1), got {}", a.p)));
            }
            k
        }
        _ => {
            let n = a.n.ok_or_else(|| Failure::Usage("this model needs -n".into()))?;
            if n < 3 {
                return Err(Failure::Usage(format!("cograph samplers need n ≥ 3, got {n}")));
            }
            n
        }
    };
    let eta = EtaSampler::new();
    let handle = RngHandle::new(cli.seed, 0);
    // sample i always uses stream i
    let rows: Vec<Result<(LabeledGraph, Value), Error>> = (0..a.count)
        .into_par_iter()
        .map(|i| {
            let mut rng = handle.with_stream(i as u64).rng();
            match a.model {
                SampleModel::Limit => Ok((sample_hkp(size, a.p, &mut rng)?, json!({}))),
                SampleModel::Labelled => {
                    let s = sample_labelled_cograph(size, &mut rng, &eta, &budget)?;
                    let extra = json!({ "cotree": s.value.cotree.canonical_string(), "attempts": s.attempts, "n": s.leaves });
                    Ok((s.value.graph, extra))
                }
                SampleModel::Unlabelled => {
                    let s = sample_unlabelled_cograph(size, &mut rng, BoltzmannSampler::at_rho(), &budget)?;
                    let extra = json!({ "cotree": s.value.cotree.canonical_string(), "attempts": s.attempts, "n": s.leaves });
                    Ok((s.value.graph, extra))
                }
            }
        })
        .collect();
    let config = json!({
        "command": "sample",
        "model": format!("{:?}", a.model).to_lowercase(),
        "n": a.n, "k": a.k, "p": a.p, "count": a.count,
        "size_window": a.window, "max_attempts": a.max_attempts,
    });
    let header = meta(cli, config);
    let mut data = match a.format {
        Format::Edges => format!("# {header}\n"),
        _ => format!("{}\n", json!({ "meta": header })),
    };
    let mut ok = true;
    for (i, row) in rows.into_iter().enumerate() {
        let (g, extra) = row?;
        // every produced graph must be P4-free
        let cograph = is_cograph(&g);
        ok &= cograph;
        if !cograph {
            eprintln!("sample {i} is not a cograph");
        }
        match a.format {
            Format::Edges => data.push_str(&format!("# sample {i}\n{}\n", g.to_edge_list())),
            _ => {
                let mut line = json!({ "index": i, "graph": g.to_json() });
                if let (Some(obj), Some(extra)) = (line.as_object_mut(), extra.as_object()) {
                    obj.extend(extra.clone());
                }
                data.push_str(&format!("{line}\n"));
            }
        }
    }
    Ok(Outcome { data, ok })
}

fn read_graph(path: &PathBuf) -> Result<LabeledGraph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let parsed = if text.trim_start().starts_with('{') {
        LabeledGraph::from_json(&text)
    } else {
        LabeledGraph::from_edge_list(&text)
    };
    parsed.map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn density(cli: &Cli, a: &DensityArgs) -> Result<Outcome, Failure> {
    if a.limit {
        if a.k > MAX_EXACT_K {
            return Err(Failure::Usage(format!("exact limit law supports k ≤ {MAX_EXACT_K}")));
        }
        let p = parse_probability(&a.p)?;
        let q = q_exact(a.k, &p)?;
        let total_ok = q.total() == num_one();
        let doc = json!({ "meta": meta(cli, json!({ "command": "density", "limit": true, "k": a.k, "p": fraction(&p) })), "law": q.to_json() });
        return Ok(Outcome { data: format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")), ok: total_ok });
    }
    let (Some(gp), Some(hp)) = (&a.graph, &a.pattern) else {
        return Err(Failure::Usage("give --graph and --pattern, or --limit".into()));
    };
    let g = read_graph(gp)?;
    let h = read_graph(hp)?;
    let est = match a.reps {
        Some(r) => t_ind_mc(&h, &g, r, &mut RngHandle::new(cli.seed, 0).rng())?,
        None => t_ind_exact(&h, &g)?,
    };
    let doc = json!({
        "meta": meta(cli, json!({ "command": "density", "graph": gp, "pattern": hp, "reps": a.reps })),
        "value": est.value, "stderr": est.stderr, "method": format!("{:?}", est.method).to_lowercase(), "reps": est.reps,
    });
    Ok(Outcome { data: format!("{doc}\n"), ok: true })
}

fn num_one() -> num_rational::BigRational {
    num_rational::BigRational::from_integer(1.into())
}

fn experiment(cli: &Cli, a: &ExperimentArgs) -> Result<Outcome, Failure> {
    let model = match a.model {
        Kind::Labelled => Model::Labelled,
        Kind::Unlabelled => Model::Unlabelled,
    };
    let mut cfg = ExperimentConfig::new(model, a.n, a.k, a.reps, cli.seed);
    if let Some(w) = a.window {
        cfg = cfg.with_window(w)?;
    }
    cfg.progress = true;
    let report: ExperimentReport = match a.name {
        ExperimentName::Shape => experiment_shape(&cfg)?,
        ExperimentName::Parity => experiment_parity(&cfg)?,
        ExperimentName::Distance => experiment_distance(&cfg)?,
        ExperimentName::Density => experiment_density(&cfg, a.per_graph)?,
        ExperimentName::Llt => experiment_stable_llt(&LltConfig { n_list: a.n_list.clone(), ..LltConfig::default() })?,
    };
    eprintln!("{}", report.summary_line());
    let header = meta(cli, serde_json::to_value(&cfg).expect("config serializes"));
    let data = match a.format {
        Format::Csv => format!("# {header}\n{CSV_HEADER}\n{}\n", report.to_csv_row()),
        Format::Edges => return Err(Failure::Usage("reports are written as json or csv".into())),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&json!({ "meta": header, "report": report })).expect("json")),
    };
    Ok(Outcome { data, ok: report.pass })
}

/// Exhaustive checks that need no randomness.
fn oracle(cli: &Cli) -> Result<Outcome, Failure> {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut check = |name: String, pass: bool| {
        ok &= pass;
        lines.push(json!({ "check": name, "pass": pass }));
    };
    let labelled = labelled_counts(7)?;
    for n in 1..=7 {
        let brute = enumerate_labelled_cotrees(n)?.len();
        let series = labelled_cograph_count(&labelled, n).expect("count");
        check(format!("labelled cotrees n={n}: enumeration {brute} vs series {series}"), series == brute.into());
    }
    let unlabelled = unlabelled_counts(10)?;
    for n in 1..=10 {
        let brute = enumerate_unlabelled_trees(n)?.len();
        let series = unlabelled.count(n).expect("count");
        check(format!("unlabelled trees n={n}: enumeration {brute} vs series {series}"), series == brute.into());
    }
    // every graph on 4 vertices, up to isomorphism, minus the induced path
    let mut classes = std::collections::BTreeSet::new();
    let mut cographs = std::collections::BTreeSet::new();
    for mask in 0..64u64 {
        let g = LabeledGraph::from_pattern_mask(4, mask);
        classes.insert(g.iso_key());
        if is_cograph(&g) {
            let canon = cograph_to_cotree(&g)?.as_tree().without_labels().canonical_string();
            cographs.insert(canon);
        }
    }
    let series4 = unlabelled_cograph_count(&unlabelled, 4).expect("count");
    check(
        format!("unlabelled cographs n=4: {} classes, {} cotree shapes, series {series4}", classes.len(), cographs.len()),
        classes.len() == 11 && series4 == (classes.len() - 1).into() && cographs.len() == classes.len() - 1,
    );
    for k in 2..=MAX_EXACT_K {
        for p in ["1/2", "1/3"] {
            let p = parse_probability(p)?;
            let a = q_exact(k, &p)?;
            let b = q_by_splitting(k, &p)?;
            check(format!("limit law k={k} p={}: tree sum vs splitting", fraction(&p)), a == b && a.total() == num_one());
            let q = num_one() - &p;
            let c = q_exact(k, &q)?;
            let full = (1u64 << (k * (k - 1) / 2)) - 1;
            let sym = a.table.iter().all(|(&m, v)| c.prob(full ^ m) == *v) && a.table.len() == c.table.len();
            check(format!("complement symmetry k={k} p={}", fraction(&p)), sym);
        }
    }
    let mut data = format!("{}\n", json!({ "meta": meta(cli, json!({ "command": "oracle" })) }));
    for l in lines {
        data.push_str(&format!("{l}\n"));
    }
    Ok(Outcome { data, ok })
}
