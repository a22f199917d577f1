//! Command-line front end: fitting, assortment optimization, simulation,
//! figure-data emission, holdout evaluation, and hard-instance generation.
//!
//! The driver is single-threaded; parallelism lives inside the library calls
//! under their deterministic contracts, so every seeded command produces
//! byte-identical primary outputs regardless of thread count.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::assortment::{
    brute_force_optimal, build_partition_instance_large_alpha,
    build_partition_instance_small_alpha, fptas_gmnl, fptas_lowrank, has_equal_split, FptasConfig,
    Method, OptimizationResult,
};
use crate::error::{ModelError, Result};
use crate::estimation::{estimate_gmnl, estimate_mnl, roc_auc, EstimationConfig};
use crate::gmnl::GmnlModel;
use crate::io::{
    format_dataset, format_prices, read_choice_dataset, read_features, read_params,
    read_prices, write_atomic, write_manifest, write_params, ParamsFile, RunManifest,
};
use crate::simulate::{generate_dataset, generate_dataset_gmnl, no_purchase_curve,
    star_graph_experiment, AssortmentSampler};

#[derive(Parser, Debug)]
#[command(name = "gmchoice", version, about = "Markov-chain choice modelling toolkit")]
pub struct Cli {
    /// Worker threads for parallel sections (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FitModel {
    Mnl,
    Gmnl,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OptMethod {
    Brute,
    Fptas,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FigureName {
    NoPurchase,
    Star,
    Convergence,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Regime {
    Small,
    Large,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fit model parameters to a choice dataset by maximum likelihood.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long, value_enum, default_value_t = FitModel::Gmnl)]
        model: FitModel,
        #[arg(long)]
        out: PathBuf,
        /// Upper bound for the saturation parameter search.
        #[arg(long, default_value_t = 50.0)]
        alpha_max: f64,
        /// Maximum outer alternating iterations.
        #[arg(long, default_value_t = 100)]
        max_iters: usize,
        /// Drop observations that record several choices instead of rejecting.
        #[arg(long, default_value_t = false)]
        drop_multi_click: bool,
    },
    /// Find a revenue-maximizing assortment.
    Optimize {
        #[arg(long)]
        params: PathBuf,
        /// Feature CSV; required when the params carry no explicit weights.
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        prices: PathBuf,
        #[arg(long, value_enum, default_value_t = OptMethod::Brute)]
        method: OptMethod,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Revenue-target file produced by gen-instance; adds a target-met flag.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic choice dataset from a model.
    Simulate {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        features: Option<PathBuf>,
        /// Number of observations to draw.
        #[arg(long, short = 't')]
        num_obs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample assortments of this exact size instead of uniform nonempty.
        #[arg(long)]
        fixed_size: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit whitespace-separated data files for the standard figures.
    Figure {
        #[arg(value_enum)]
        name: FigureName,
        #[arg(long, default_value_t = 15)]
        n: usize,
        /// Saturation levels, one output column each (no-purchase figure).
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 2.0, 10.0])]
        alphas: Vec<f64>,
        /// Largest assortment size (defaults to n).
        #[arg(long)]
        kmax: Option<usize>,
        /// Central product price (star figure).
        #[arg(long, default_value_t = 0.9)]
        center_price: f64,
        /// Leaf product price (star figure).
        #[arg(long, default_value_t = 1.0)]
        leaf_price: f64,
        /// Upper end of the saturation sweep (star figure).
        #[arg(long, default_value_t = 12.0)]
        alpha_max: f64,
        /// Training data (convergence figure).
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        max_iters: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare fitted models on a holdout dataset by ranking quality (AUC).
    Evaluate {
        /// One or more parameter files to score.
        #[arg(long = "params", required = true, num_args = 1..)]
        params: Vec<PathBuf>,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a hard optimization instance from an integer vector.
    GenInstance {
        /// Comma-separated positive integers.
        #[arg(long, value_delimiter = ',', required = true)]
        c: Vec<u64>,
        #[arg(long, value_enum, default_value_t = Regime::Small)]
        regime: Regime,
        /// Saturation level (defaults to 1 for small, 3 for large).
        #[arg(long)]
        alpha: Option<f64>,
        /// Output stem; writes <out>.params.json, <out>.prices.csv, <out>.target.json.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Assortment-optimization result as written to disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub assortment: Vec<usize>,
    pub revenue: f64,
    pub method: String,
    pub guesses_evaluated: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_revenue: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_met: Option<bool>,
}

/// Revenue target emitted by gen-instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TargetFile {
    pub target_revenue: f64,
    pub equal_split_exists: bool,
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::BruteForce => "brute",
        Method::FptasRank1 => "fptas-rank1",
        Method::FptasRankK => "fptas-rankk",
    }
}

fn exit_code(err: &ModelError) -> i32 {
    match err {
        ModelError::InvalidInput(_)
        | ModelError::InvalidModel(_)
        | ModelError::IndexOutOfRange { .. } => 2,
        ModelError::SpectralRadiusViolation { .. }
        | ModelError::SingularSystem(_)
        | ModelError::NonTermination(_) => 3,
        ModelError::ResourceGuard(_) => 4,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| ModelError::InvalidInput(format!("serializing output: {e}")))?;
    text.push('\n');
    write_atomic(path, &text)
}

fn path_str(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

/// Parse `argv` and run; returns the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Clap renders help/version on stdout with success status.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    let start = Instant::now();
    match command {
        Command::Fit { data, features, model, out, alpha_max, max_iters, drop_multi_click } => {
            cmd_fit(&data, &features, model, &out, alpha_max, max_iters, drop_multi_click, start)
        }
        Command::Optimize { params, features, prices, method, epsilon, target, out } => {
            cmd_optimize(&params, features.as_deref(), &prices, method, epsilon,
                target.as_deref(), &out, start)
        }
        Command::Simulate { params, features, num_obs, seed, fixed_size, out } => {
            cmd_simulate(&params, features.as_deref(), num_obs, seed, fixed_size, &out, start)
        }
        Command::Figure {
            name, n, alphas, kmax, center_price, leaf_price, alpha_max, data, features,
            max_iters, out,
        } => cmd_figure(
            name, n, &alphas, kmax, center_price, leaf_price, alpha_max, data.as_deref(),
            features.as_deref(), max_iters, &out, start,
        ),
        Command::Evaluate { params, data, features, out } => {
            cmd_evaluate(&params, &data, &features, out.as_deref(), start)
        }
        Command::GenInstance { c, regime, alpha, out } => {
            cmd_gen_instance(&c, regime, alpha, &out, start)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_fit(
    data_path: &Path,
    features_path: &Path,
    model: FitModel,
    out: &Path,
    alpha_max: f64,
    max_iters: usize,
    drop_multi_click: bool,
    start: Instant,
) -> Result<()> {
    let dataset = read_choice_dataset(data_path, features_path, drop_multi_click)?;
    let n = dataset.features().num_products();
    let (params_file, ll, iters) = match model {
        FitModel::Mnl => {
            let beta = estimate_mnl(&dataset);
            let p = crate::estimation::GmnlParams { beta, alpha: 0.0 };
            let ll = crate::estimation::log_likelihood(&dataset, &p);
            (ParamsFile::from_fit("mnl", n, &p), ll, 1)
        }
        FitModel::Gmnl => {
            let config = EstimationConfig { max_iters, alpha_max, ..Default::default() };
            let (p, trace) = estimate_gmnl(&dataset, &config)?;
            let ll = *trace.log_likelihoods.last().unwrap();
            (ParamsFile::from_fit("gmnl", n, &p), ll, trace.log_likelihoods.len())
        }
    };
    write_params(out, &params_file)?;
    write_manifest(out, &RunManifest {
        command: "fit".into(),
        inputs: vec![path_str(data_path), path_str(features_path)],
        seed: None,
        config: serde_json::json!({
            "model": params_file.model, "alpha_max": alpha_max, "max_iters": max_iters,
            "drop_multi_click": drop_multi_click,
        }),
        outputs: vec![path_str(out)],
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })?;
    println!("log-likelihood {ll} after {iters} iterations");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_optimize(
    params_path: &Path,
    features_path: Option<&Path>,
    prices_path: &Path,
    method: OptMethod,
    epsilon: f64,
    target_path: Option<&Path>,
    out: &Path,
    start: Instant,
) -> Result<()> {
    let params = read_params(params_path)?;
    let prices = read_prices(prices_path, params.n)?;
    let result: OptimizationResult = if params.model == "lowrank" {
        let model = params.to_lowrank()?;
        match method {
            OptMethod::Brute => {
                brute_force_optimal(params.n, |s| model.expected_revenue(s, &prices))?
            }
            OptMethod::Fptas => fptas_lowrank(&model, &prices, &FptasConfig::new(epsilon)?)?,
        }
    } else {
        let features = features_path.map(read_features).transpose()?;
        let model = params.to_gmnl(features.as_ref())?;
        match method {
            OptMethod::Brute => {
                brute_force_optimal(params.n, |s| model.expected_revenue(s, &prices))?
            }
            OptMethod::Fptas => fptas_gmnl(&model, &prices, &FptasConfig::new(epsilon)?)?,
        }
    };
    let mut report = OptimizeReport {
        assortment: result.assortment.members().to_vec(),
        revenue: result.revenue,
        method: method_name(result.method).into(),
        guesses_evaluated: result.guesses_evaluated,
        target_revenue: None,
        target_met: None,
    };
    if let Some(tp) = target_path {
        let text = std::fs::read_to_string(tp)
            .map_err(|e| ModelError::InvalidInput(format!("reading {}: {e}", tp.display())))?;
        let target: TargetFile = serde_json::from_str(&text)
            .map_err(|e| ModelError::InvalidInput(format!("parsing {}: {e}", tp.display())))?;
        report.target_revenue = Some(target.target_revenue);
        report.target_met = Some(report.revenue >= target.target_revenue - 1e-9);
    }
    write_json(out, &report)?;
    let mut inputs = vec![path_str(params_path), path_str(prices_path)];
    if let Some(f) = features_path {
        inputs.push(path_str(f));
    }
    if let Some(t) = target_path {
        inputs.push(path_str(t));
    }
    write_manifest(out, &RunManifest {
        command: "optimize".into(),
        inputs,
        seed: None,
        config: serde_json::json!({
            "method": report.method, "epsilon": epsilon,
        }),
        outputs: vec![path_str(out)],
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })?;
    println!(
        "assortment {:?} revenue {} ({}, {} guesses)",
        report.assortment, report.revenue, report.method, report.guesses_evaluated
    );
    if let (Some(t), Some(met)) = (report.target_revenue, report.target_met) {
        println!("target {t} met: {met}");
    }
    Ok(())
}

fn cmd_simulate(
    params_path: &Path,
    features_path: Option<&Path>,
    num_obs: usize,
    seed: u64,
    fixed_size: Option<usize>,
    out: &Path,
    start: Instant,
) -> Result<()> {
    let params = read_params(params_path)?;
    let sampler = match fixed_size {
        Some(k) => AssortmentSampler::FixedSize(k),
        None => AssortmentSampler::UniformNonempty,
    };
    let observations = if params.model == "lowrank" {
        let chain = params.to_lowrank()?.to_chain()?;
        generate_dataset(&chain, sampler, num_obs, seed)?
    } else {
        let features = features_path.map(read_features).transpose()?;
        let model = params.to_gmnl(features.as_ref())?;
        generate_dataset_gmnl(&model, sampler, num_obs, seed)?
    };
    write_atomic(out, &format_dataset(&observations))?;
    let mut inputs = vec![path_str(params_path)];
    if let Some(f) = features_path {
        inputs.push(path_str(f));
    }
    write_manifest(out, &RunManifest {
        command: "simulate".into(),
        inputs,
        seed: Some(seed),
        config: serde_json::json!({ "num_obs": num_obs, "fixed_size": fixed_size }),
        outputs: vec![path_str(out)],
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })?;
    println!("wrote {} observations to {}", observations.len(), out.display());
    Ok(())
}

fn format_table(header: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(" ");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

fn figure_header(cols: usize) -> Vec<String> {
    let mut h = vec!["x".to_string()];
    for i in 1..=cols {
        h.push(format!("a{i}"));
    }
    h
}

#[allow(clippy::too_many_arguments)]
fn cmd_figure(
    name: FigureName,
    n: usize,
    alphas: &[f64],
    kmax: Option<usize>,
    center_price: f64,
    leaf_price: f64,
    alpha_max: f64,
    data: Option<&Path>,
    features: Option<&Path>,
    max_iters: usize,
    out: &Path,
    start: Instant,
) -> Result<()> {
    let mut inputs = Vec::new();
    let (header, rows) = match name {
        FigureName::NoPurchase => {
            let curve = no_purchase_curve(n, alphas, kmax.unwrap_or(n))?;
            let rows = curve
                .into_iter()
                .map(|(k, vals)| {
                    let mut row = vec![k as f64];
                    row.extend(vals);
                    row
                })
                .collect();
            (figure_header(alphas.len()), rows)
        }
        FigureName::Star => {
            // Sweep the saturation level; columns are optimal revenue and a
            // 0/1 indicator that only the cheap central product is offered.
            let steps = (alpha_max / 0.5).floor() as usize;
            let mut rows = Vec::with_capacity(steps + 1);
            for i in 0..=steps {
                let alpha = i as f64 * 0.5;
                let res = star_graph_experiment(n, center_price, leaf_price, alpha)?;
                let center_only = res.assortment.members() == [1];
                rows.push(vec![alpha, res.revenue, if center_only { 1.0 } else { 0.0 }]);
            }
            (figure_header(2), rows)
        }
        FigureName::Convergence => {
            let data = data.ok_or_else(|| {
                ModelError::InvalidInput("convergence figure requires --data".into())
            })?;
            let features = features.ok_or_else(|| {
                ModelError::InvalidInput("convergence figure requires --features".into())
            })?;
            inputs = vec![path_str(data), path_str(features)];
            let dataset = read_choice_dataset(data, features, false)?;
            let config = EstimationConfig { max_iters, ..Default::default() };
            let (_, trace) = estimate_gmnl(&dataset, &config)?;
            let rows = trace
                .log_likelihoods
                .iter()
                .zip(&trace.alphas)
                .enumerate()
                .map(|(i, (ll, a))| vec![(i + 1) as f64, *ll, *a])
                .collect();
            (figure_header(2), rows)
        }
    };
    write_atomic(out, &format_table(&header, &rows))?;
    write_manifest(out, &RunManifest {
        command: "figure".into(),
        inputs,
        seed: None,
        config: serde_json::json!({
            "name": format!("{name:?}"), "n": n, "alphas": alphas,
        }),
        outputs: vec![path_str(out)],
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(())
}

fn cmd_evaluate(
    params_paths: &[PathBuf],
    data_path: &Path,
    features_path: &Path,
    out: Option<&Path>,
    start: Instant,
) -> Result<()> {
    let features = read_features(features_path)?;
    let observations =
        crate::io::read_dataset(data_path, features.num_products(), false)?;
    let mut report = String::from("model auc\n");
    for pp in params_paths {
        let params = read_params(pp)?;
        let model: GmnlModel = params.to_gmnl(Some(&features))?;
        let mut scores = Vec::new();
        let mut labels = Vec::new();
        for obs in &observations {
            let pi = model.choice_probabilities(&obs.assortment);
            for &i in obs.assortment.members() {
                scores.push(pi.prob(i));
                labels.push(i == obs.choice);
            }
        }
        let auc = roc_auc(&scores, &labels)?;
        println!("{} auc {auc}", pp.display());
        report.push_str(&format!("{} {auc}\n", pp.display()));
    }
    if let Some(out) = out {
        write_atomic(out, &report)?;
        let mut inputs: Vec<String> = params_paths.iter().map(|p| path_str(p)).collect();
        inputs.push(path_str(data_path));
        inputs.push(path_str(features_path));
        write_manifest(out, &RunManifest {
            command: "evaluate".into(),
            inputs,
            seed: None,
            config: serde_json::json!({ "metric": "auc" }),
            outputs: vec![path_str(out)],
            wall_clock_seconds: start.elapsed().as_secs_f64(),
        })?;
    }
    Ok(())
}

fn cmd_gen_instance(
    c: &[u64],
    regime: Regime,
    alpha: Option<f64>,
    out: &Path,
    start: Instant,
) -> Result<()> {
    let (model, prices, target) = match regime {
        Regime::Small => build_partition_instance_small_alpha(c, alpha.unwrap_or(1.0))?,
        Regime::Large => build_partition_instance_large_alpha(c, alpha.unwrap_or(3.0))?,
    };
    let n = model.num_products();
    let params = ParamsFile {
        model: "gmnl".into(),
        n,
        d: 0,
        beta: vec![],
        alpha: model.alpha(),
        u: None,
        v: Some(model.weights().iter().map(|&w| vec![w]).collect()),
        lambda: None,
    };
    let stem = path_str(out);
    let params_path = PathBuf::from(format!("{stem}.params.json"));
    let prices_path = PathBuf::from(format!("{stem}.prices.csv"));
    let target_path = PathBuf::from(format!("{stem}.target.json"));
    write_params(&params_path, &params)?;
    write_atomic(&prices_path, &format_prices(&prices))?;
    let equal_split = has_equal_split(c);
    write_json(&target_path, &TargetFile { target_revenue: target, equal_split_exists: equal_split })?;
    write_manifest(&params_path, &RunManifest {
        command: "gen-instance".into(),
        inputs: vec![],
        seed: None,
        config: serde_json::json!({ "c": c, "regime": format!("{regime:?}") }),
        outputs: vec![path_str(&params_path), path_str(&prices_path), path_str(&target_path)],
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })?;
    println!(
        "instance with {n} products, target revenue {target}, equal split exists: {equal_split}"
    );
    Ok(())
}
