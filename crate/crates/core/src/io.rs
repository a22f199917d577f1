//! Flat-file formats: choice datasets and feature matrices as CSV, fitted
//! parameters as JSON, price lists, and per-run manifests. All writes go
//! through a temp-file-plus-rename so readers never observe partial output.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::chain::Assortment;
use crate::error::{ModelError, Result};
use crate::estimation::{ChoiceDataset, GmnlParams, Observation};
use crate::features::FeatureMatrix;
use crate::gmnl::GmnlModel;
use crate::lowrank::LowRankModel;

fn invalid(msg: String) -> ModelError {
    ModelError::InvalidInput(msg)
}

/// Write `contents` to `path` atomically (temp file in the same directory,
/// then rename).
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let file_name = path
        .file_name()
        .ok_or_else(|| invalid(format!("cannot write to {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp-{}", file_name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents)
        .map_err(|e| invalid(format!("writing {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| invalid(format!("renaming to {}: {e}", path.display())))?;
    Ok(())
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| invalid(format!("reading {}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// Dataset CSV: header `t,assortment,choice`; assortment is a
// semicolon-separated list of 1-based product ids; choice 0 = no purchase.
// ---------------------------------------------------------------------------

/// Parse dataset rows against a catalogue of `n` products.
///
/// With `drop_multi_click` set, rows whose choice field lists several
/// products are silently dropped instead of rejected; this is the cleaning
/// step for click logs where one impression received multiple clicks.
pub fn parse_dataset(text: &str, n: usize, drop_multi_click: bool) -> Result<Vec<Observation>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "t,assortment,choice" => {}
        _ => return Err(invalid("dataset line 1: expected header `t,assortment,choice`".into())),
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(invalid(format!(
                "dataset line {lineno}: expected 3 comma-separated fields, got {}",
                fields.len()
            )));
        }
        let members = parse_id_list(fields[1], n)
            .map_err(|e| invalid(format!("dataset line {lineno}: {e}")))?;
        if members.is_empty() {
            return Err(invalid(format!("dataset line {lineno}: empty assortment")));
        }
        let choices = parse_choice_list(fields[2], n)
            .map_err(|e| invalid(format!("dataset line {lineno}: {e}")))?;
        if choices.len() > 1 {
            if drop_multi_click {
                continue;
            }
            return Err(invalid(format!(
                "dataset line {lineno}: {} choices recorded for one observation",
                choices.len()
            )));
        }
        let choice = choices[0];
        let assortment = Assortment::new(members, n)
            .map_err(|e| invalid(format!("dataset line {lineno}: {e}")))?;
        if choice != 0 && !assortment.contains(choice) {
            return Err(invalid(format!(
                "dataset line {lineno}: choice {choice} is not in the assortment"
            )));
        }
        out.push(Observation { assortment, choice });
    }
    if out.is_empty() {
        return Err(invalid("dataset contains no usable observations".into()));
    }
    Ok(out)
}

fn parse_id_list(field: &str, n: usize) -> std::result::Result<Vec<usize>, String> {
    field
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let id: usize =
                s.trim().parse().map_err(|_| format!("bad product id `{}`", s.trim()))?;
            if id == 0 || id > n {
                return Err(format!("product id {id} outside 1..={n}"));
            }
            Ok(id)
        })
        .collect()
}

fn parse_choice_list(field: &str, n: usize) -> std::result::Result<Vec<usize>, String> {
    let ids: Vec<usize> = field
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let id: usize = s.trim().parse().map_err(|_| format!("bad choice `{}`", s.trim()))?;
            if id > n {
                return Err(format!("choice {id} outside 0..={n}"));
            }
            Ok(id)
        })
        .collect::<std::result::Result<_, _>>()?;
    if ids.is_empty() {
        return Err("missing choice field".into());
    }
    Ok(ids)
}

/// Render observations in the dataset CSV format.
pub fn format_dataset(observations: &[Observation]) -> String {
    let mut out = String::from("t,assortment,choice\n");
    for (t, obs) in observations.iter().enumerate() {
        let ids: Vec<String> = obs.assortment.members().iter().map(|i| i.to_string()).collect();
        out.push_str(&format!("{t},{},{}\n", ids.join(";"), obs.choice));
    }
    out
}

pub fn read_dataset(path: &Path, n: usize, drop_multi_click: bool) -> Result<Vec<Observation>> {
    parse_dataset(&read_file(path)?, n, drop_multi_click)
}

// ---------------------------------------------------------------------------
// Features CSV: header `id,f1..fd`; one row per state, id 0 required.
// ---------------------------------------------------------------------------

/// Parse the feature CSV into a matrix ordered by state id 0..n. Every id in
/// 0..n must appear exactly once.
pub fn parse_features(text: &str) -> Result<FeatureMatrix> {
    let mut lines = text.lines().enumerate();
    let d = match lines.next() {
        Some((_, h)) => {
            let cols: Vec<&str> = h.trim().split(',').collect();
            if cols.first() != Some(&"id") || cols.len() < 2 {
                return Err(invalid("features line 1: expected header `id,f1,...`".into()));
            }
            cols.len() - 1
        }
        None => return Err(invalid("features file is empty".into())),
    };
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 1 {
            return Err(invalid(format!(
                "features line {lineno}: expected {} fields, got {}",
                d + 1,
                fields.len()
            )));
        }
        let id: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| invalid(format!("features line {lineno}: bad id `{}`", fields[0])))?;
        let vals: Vec<f64> = fields[1..]
            .iter()
            .map(|s| {
                s.trim().parse::<f64>().map_err(|_| {
                    invalid(format!("features line {lineno}: bad number `{}`", s.trim()))
                })
            })
            .collect::<Result<_>>()?;
        rows.push((id, vals));
    }
    rows.sort_by_key(|(id, _)| *id);
    for (expected, (id, _)) in rows.iter().enumerate() {
        if *id != expected {
            return Err(invalid(format!(
                "features: state ids must cover 0..n exactly; missing or duplicate id near {id}"
            )));
        }
    }
    if rows.is_empty() || rows[0].0 != 0 {
        return Err(invalid("features: row for state id 0 is required".into()));
    }
    FeatureMatrix::new(rows.into_iter().map(|(_, v)| v).collect())
}

pub fn read_features(path: &Path) -> Result<FeatureMatrix> {
    parse_features(&read_file(path)?)
}

/// Render a feature matrix in the features CSV format.
pub fn format_features(features: &FeatureMatrix) -> String {
    let d = features.dim();
    let mut out = String::from("id");
    for k in 1..=d {
        out.push_str(&format!(",f{k}"));
    }
    out.push('\n');
    for state in 0..features.num_states() {
        out.push_str(&state.to_string());
        for x in features.row(state) {
            out.push_str(&format!(",{x}"));
        }
        out.push('\n');
    }
    out
}

/// Assemble a dataset file pair into a validated [`ChoiceDataset`].
pub fn read_choice_dataset(
    data_path: &Path,
    features_path: &Path,
    drop_multi_click: bool,
) -> Result<ChoiceDataset> {
    let features = read_features(features_path)?;
    let observations = read_dataset(data_path, features.num_products(), drop_multi_click)?;
    ChoiceDataset::new(observations, features)
}

// ---------------------------------------------------------------------------
// Params JSON.
// ---------------------------------------------------------------------------

/// Fitted or hand-written model parameters. `beta`/`alpha` cover the
/// feature-parameterized models; `U`/`V`/`lambda` carry explicit low-rank
/// factors, and `V` alone carries explicit rank-1 weights (state 0 first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsFile {
    pub model: String,
    pub n: usize,
    pub d: usize,
    pub beta: Vec<f64>,
    pub alpha: f64,
    #[serde(rename = "U", default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<Vec<f64>>>,
    #[serde(rename = "V", default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
}

impl ParamsFile {
    pub fn from_fit(model: &str, n: usize, params: &GmnlParams) -> Self {
        Self {
            model: model.to_string(),
            n,
            d: params.beta.len(),
            beta: params.beta.clone(),
            alpha: params.alpha,
            u: None,
            v: None,
            lambda: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.model.as_str() {
            "mnl" | "gmnl" | "lowrank" => {}
            other => return Err(invalid(format!("unknown model kind `{other}`"))),
        }
        if self.model != "lowrank" && self.beta.len() != self.d {
            return Err(invalid(format!(
                "beta has {} entries but d = {}",
                self.beta.len(),
                self.d
            )));
        }
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(invalid(format!("alpha = {} is not admissible", self.alpha)));
        }
        Ok(())
    }

    /// Rank-1 attraction weights `[v_0, v_1, ..., v_n]`, either stored
    /// explicitly or derived from features via `v_j = exp(beta . x_j)`.
    pub fn gmnl_weights(&self, features: Option<&FeatureMatrix>) -> Result<Vec<f64>> {
        if let Some(v) = &self.v {
            let flat: Vec<f64> = v.iter().flatten().copied().collect();
            if flat.len() != self.n + 1 {
                return Err(invalid(format!(
                    "explicit weights must have {} entries, got {}",
                    self.n + 1,
                    flat.len()
                )));
            }
            return Ok(flat);
        }
        let features = features.ok_or_else(|| {
            invalid("params carry no explicit weights; a features file is required".into())
        })?;
        if features.num_products() != self.n || features.dim() != self.d {
            return Err(invalid(format!(
                "features are {}x{} but params expect n = {}, d = {}",
                features.num_products(),
                features.dim(),
                self.n,
                self.d
            )));
        }
        Ok((0..=self.n)
            .map(|j| crate::math::dot(&self.beta, features.row(j)).exp())
            .collect())
    }

    /// Canonical rank-1 model. Unnormalized weights `w` with saturation `a`
    /// describe the same choice probabilities as normalized `w / T` with
    /// `a * T` (T = total weight), so we rescale rather than reject.
    pub fn to_gmnl(&self, features: Option<&FeatureMatrix>) -> Result<GmnlModel> {
        let alpha = if self.model == "mnl" { 0.0 } else { self.alpha };
        let w = self.gmnl_weights(features)?;
        let total: f64 = w.iter().sum();
        GmnlModel::new(w.iter().map(|x| x / total).collect(), alpha * total)
    }

    pub fn to_lowrank(&self) -> Result<LowRankModel> {
        let u = self
            .u
            .as_ref()
            .ok_or_else(|| invalid("lowrank params require the U factor".into()))?;
        let v = self
            .v
            .as_ref()
            .ok_or_else(|| invalid("lowrank params require the V factor".into()))?;
        let lambda = self
            .lambda
            .clone()
            .ok_or_else(|| invalid("lowrank params require lambda".into()))?;
        let k = u.first().map(|r| r.len()).unwrap_or(0);
        if u.len() != self.n || u.iter().any(|r| r.len() != k) {
            return Err(invalid(format!("U must be {} rows of equal length", self.n)));
        }
        if v.len() != self.n + 1 || v.iter().any(|r| r.len() != k) {
            return Err(invalid(format!("V must be {} rows of rank {k}", self.n + 1)));
        }
        LowRankModel::new(
            self.n,
            k,
            u.iter().flatten().copied().collect(),
            v.iter().flatten().copied().collect(),
            lambda,
            self.alpha,
        )
    }
}

pub fn read_params(path: &Path) -> Result<ParamsFile> {
    let params: ParamsFile = serde_json::from_str(&read_file(path)?)
        .map_err(|e| invalid(format!("parsing {}: {e}", path.display())))?;
    params.validate()?;
    Ok(params)
}

pub fn write_params(path: &Path, params: &ParamsFile) -> Result<()> {
    params.validate()?;
    let mut text = serde_json::to_string_pretty(params)
        .map_err(|e| invalid(format!("serializing params: {e}")))?;
    text.push('\n');
    write_atomic(path, &text)
}

// ---------------------------------------------------------------------------
// Prices CSV: header `id,price`, ids 1..n.
// ---------------------------------------------------------------------------

pub fn parse_prices(text: &str, n: usize) -> Result<Vec<f64>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "id,price" => {}
        _ => return Err(invalid("prices line 1: expected header `id,price`".into())),
    }
    let mut prices = vec![f64::NAN; n];
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(invalid(format!("prices line {lineno}: expected `id,price`")));
        }
        let id: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| invalid(format!("prices line {lineno}: bad id `{}`", fields[0])))?;
        if id == 0 || id > n {
            return Err(invalid(format!("prices line {lineno}: id {id} outside 1..={n}")));
        }
        let p: f64 = fields[1]
            .trim()
            .parse()
            .map_err(|_| invalid(format!("prices line {lineno}: bad price `{}`", fields[1])))?;
        prices[id - 1] = p;
    }
    if let Some(i) = prices.iter().position(|p| p.is_nan()) {
        return Err(invalid(format!("prices: missing price for product {}", i + 1)));
    }
    Ok(prices)
}

pub fn read_prices(path: &Path, n: usize) -> Result<Vec<f64>> {
    parse_prices(&read_file(path)?, n)
}

pub fn format_prices(prices: &[f64]) -> String {
    let mut out = String::from("id,price\n");
    for (i, p) in prices.iter().enumerate() {
        out.push_str(&format!("{},{p}\n", i + 1));
    }
    out
}

// ---------------------------------------------------------------------------
// Run manifest.
// ---------------------------------------------------------------------------

/// Provenance record written next to every command output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
}

/// Manifest path for a given primary output.
pub fn manifest_path(out_path: &Path) -> PathBuf {
    let mut name = out_path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    name.push_str(".manifest.json");
    out_path.with_file_name(name)
}

pub fn write_manifest(out_path: &Path, manifest: &RunManifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(manifest)
        .map_err(|e| invalid(format!("serializing manifest: {e}")))?;
    text.push('\n');
    write_atomic(&manifest_path(out_path), &text)
}
