//! Config files, experiment dispatch and result persistence.
//!
//! Config documents are flat `key = value` lines; `#` starts a comment.
//! Lists are written `[a, b, c]` (brackets optional) or as a range
//! `start:step:stop`. Absent keys fall back to the reference defaults.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::experiments::{
    self, AccuracyMetric, CrMatchSpec, Estimator, RocCurve, TargetSpec,
};
use crate::linalg::C64;
use crate::model::{uniform_grid, ClutterModel, RadarConfig};
use crate::pipeline::Scenario;

/// Version tag written into every CSV header.
pub const CSV_SCHEMA_VERSION: &str = "1";
/// Version of the manifest layout in `schema/manifest.schema.json`.
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// `git describe`-style version of this build.
pub fn build_version() -> &'static str {
    env!("CSP_MIMO_VERSION")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Roc,
    Estimate,
    Mismatch,
    Resolvability,
    CrMatch,
    SingleRun,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::Roc,
        ExperimentKind::Estimate,
        ExperimentKind::Mismatch,
        ExperimentKind::Resolvability,
        ExperimentKind::CrMatch,
        ExperimentKind::SingleRun,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Roc => "roc",
            ExperimentKind::Estimate => "estimate",
            ExperimentKind::Mismatch => "mismatch",
            ExperimentKind::Resolvability => "resolvability",
            ExperimentKind::CrMatch => "cr-match",
            ExperimentKind::SingleRun => "single-run",
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            ExperimentKind::Roc => 10_000,
            ExperimentKind::Estimate | ExperimentKind::Mismatch => 2_000,
            ExperimentKind::Resolvability => 1_000,
            ExperimentKind::CrMatch => 20_000,
            ExperimentKind::SingleRun => 1,
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment kind `{s}`")))
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Experiment-specific settings. `None` means "use the default for the kind".
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Overrides {
    pub pfa_grid: Option<Vec<f64>>,
    pub fixed_cell: Option<bool>,
    pub pfa: Option<f64>,
    pub q_grid: Option<Vec<usize>>,
    pub mismatch: Option<Vec<f64>>,
    pub jitter_deg: Option<f64>,
    pub min_separation: Option<usize>,
    pub clutter_guard_deg: Option<f64>,
    pub estimators: Option<Vec<Estimator>>,
    pub noiseless: Option<bool>,
    pub cr1_grid: Option<Vec<f64>>,
    pub delta_grid: Option<Vec<f64>>,
    pub metric: Option<AccuracyMetric>,
    pub tolerance: Option<f64>,
    pub cell: Option<usize>,
    pub alpha_re: Option<f64>,
    pub alpha_im: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub config: RadarConfig,
    pub overrides: Overrides,
    pub out: PathBuf,
    pub trials: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, config: RadarConfig) -> Self {
        Self { kind, config, overrides: Overrides::default(), out: PathBuf::from("results"), trials: None }
    }

    pub fn trials(&self) -> usize {
        self.trials.unwrap_or_else(|| self.kind.default_trials())
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        if self.trials == Some(0) {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        let o = &self.overrides;
        let prob = |p: f64| p > 0.0 && p <= 1.0;
        if let Some(g) = &o.pfa_grid {
            if g.is_empty() || !g.iter().all(|&p| prob(p)) {
                return Err(Error::Config("pfa_grid entries must lie in (0, 1]".into()));
            }
        }
        if let Some(p) = o.pfa {
            if !prob(p) {
                return Err(Error::Config("pfa must lie in (0, 1]".into()));
            }
        }
        if let Some(q) = &o.q_grid {
            if q.is_empty() || q.contains(&0) {
                return Err(Error::Config("q_grid entries must be >= 1".into()));
            }
        }
        if let Some(c) = o.cell {
            if c >= self.config.grid_len() {
                return Err(Error::Config(format!("cell must be < L = {}", self.config.grid_len())));
            }
        }
        if let Some(t) = o.tolerance {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Config("tolerance must be finite and >= 0".into()));
            }
        }
        if let Some(j) = o.jitter_deg {
            if !(j >= 0.0 && j.is_finite()) {
                return Err(Error::Config("jitter_deg must be finite and >= 0".into()));
            }
        }
        Ok(())
    }
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(head, _)| head).trim()
}

fn unquote(v: &str) -> &str {
    let v = v.trim();
    if v.len() >= 2 && ((v.starts_with('"') && v.ends_with('"')) || (v.starts_with('\'') && v.ends_with('\''))) {
        &v[1..v.len() - 1]
    } else {
        v
    }
}

fn parse_scalar<T: FromStr>(key: &str, v: &str) -> Result<T> {
    unquote(v)
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse value `{v}` for key `{key}`")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match unquote(v) {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("key `{key}` expects true or false, got `{v}`"))),
    }
}

fn list_items(v: &str) -> Vec<&str> {
    let v = v.trim();
    let v = v.strip_prefix('[').and_then(|s| s.strip_suffix(']')).unwrap_or(v);
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    list_items(v).into_iter().map(|item| parse_scalar(key, item)).collect()
}

fn parse_real_list(key: &str, v: &str) -> Result<Vec<f64>> {
    let t = v.trim();
    if !t.starts_with('[') && t.matches(':').count() == 2 {
        let parts: Vec<f64> = t.split(':').map(|p| parse_scalar(key, p)).collect::<Result<_>>()?;
        let (start, step, stop) = (parts[0], parts[1], parts[2]);
        if !(step > 0.0 && stop >= start && step.is_finite() && start.is_finite() && stop.is_finite()) {
            return Err(Error::Config(format!("range `{v}` for key `{key}` needs step > 0 and stop >= start")));
        }
        return Ok(uniform_grid(start, step, stop));
    }
    parse_list(key, v)
}

fn parse_count_list(key: &str, v: &str) -> Result<Vec<usize>> {
    let t = v.trim();
    if !t.starts_with('[') && t.matches(':').count() == 2 {
        let parts: Vec<usize> = t.split(':').map(|p| parse_scalar(key, p)).collect::<Result<_>>()?;
        if parts[1] == 0 || parts[2] < parts[0] {
            return Err(Error::Config(format!("range `{v}` for key `{key}` needs step > 0 and stop >= start")));
        }
        return Ok((parts[0]..=parts[2]).step_by(parts[1]).collect());
    }
    parse_list(key, v)
}

fn parse_estimator(key: &str, v: &str) -> Result<Estimator> {
    match unquote(v) {
        "csp" => Ok(Estimator::Csp),
        "omp" => Ok(Estimator::Omp),
        _ => Err(Error::Config(format!("key `{key}` expects csp or omp, got `{v}`"))),
    }
}

fn parse_clutter(v: &str) -> Result<ClutterModel> {
    match unquote(v) {
        "grid" => Ok(ClutterModel::Grid),
        "none" => Ok(ClutterModel::Patches(Vec::new())),
        other => Ok(ClutterModel::Patches(parse_list("clutter", other)?)),
    }
}

/// Parses a config document. Unknown keys and invariant violations are errors.
pub fn parse_config_str(text: &str) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::new(ExperimentKind::Roc, RadarConfig::default());
    let mut seen = BTreeSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if !seen.insert(key.to_string()) {
            return Err(Error::Config(format!("key `{key}` given twice")));
        }
        let c = &mut spec.config;
        let o = &mut spec.overrides;
        match key {
            "transmitters" => c.transmitters = parse_scalar(key, value)?,
            "receivers" => c.receivers = parse_scalar(key, value)?,
            "samples" => c.samples = parse_scalar(key, value)?,
            "grid" => c.grid_deg = parse_real_list(key, value)?,
            "cr1" => c.cr1 = parse_scalar(key, value)?,
            "cr2" => c.cr2 = parse_scalar(key, value)?,
            "snr_db" => c.snr_db = parse_scalar(key, value)?,
            "cnr_db" => c.cnr_db = parse_scalar(key, value)?,
            "sigma_alpha_sq" => c.sigma_alpha_sq = parse_scalar(key, value)?,
            "clutter" => c.clutter = parse_clutter(value)?,
            "seed" => c.seed = parse_scalar(key, value)?,
            "kind" => spec.kind = unquote(value).parse()?,
            "trials" => spec.trials = Some(parse_scalar(key, value)?),
            "out" => spec.out = PathBuf::from(unquote(value)),
            "pfa_grid" => o.pfa_grid = Some(parse_real_list(key, value)?),
            "fixed_cell" => o.fixed_cell = Some(parse_bool(key, value)?),
            "pfa" => o.pfa = Some(parse_scalar(key, value)?),
            "q_grid" => o.q_grid = Some(parse_count_list(key, value)?),
            "mismatch" => o.mismatch = Some(parse_real_list(key, value)?),
            "jitter_deg" => o.jitter_deg = Some(parse_scalar(key, value)?),
            "min_separation" => o.min_separation = Some(parse_scalar(key, value)?),
            "clutter_guard_deg" => o.clutter_guard_deg = Some(parse_scalar(key, value)?),
            "estimators" => {
                o.estimators = Some(list_items(value).into_iter().map(|e| parse_estimator(key, e)).collect::<Result<_>>()?)
            }
            "noiseless" => o.noiseless = Some(parse_bool(key, value)?),
            "cr1_grid" => o.cr1_grid = Some(parse_real_list(key, value)?),
            "delta_grid" => o.delta_grid = Some(parse_real_list(key, value)?),
            "metric" => {
                o.metric = Some(match unquote(value) {
                    "std" => AccuracyMetric::Std,
                    "rmse" => AccuracyMetric::Rmse,
                    _ => return Err(Error::Config(format!("key `metric` expects std or rmse, got `{value}`"))),
                })
            }
            "tolerance" => o.tolerance = Some(parse_scalar(key, value)?),
            "cell" => o.cell = Some(parse_scalar(key, value)?),
            "alpha_re" => o.alpha_re = Some(parse_scalar(key, value)?),
            "alpha_im" => o.alpha_im = Some(parse_scalar(key, value)?),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
    }
    spec.validate()?;
    Ok(spec)
}

/// Reads and parses a config file.
pub fn parse_config(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text)
}

fn join<T: ToString>(items: &[T]) -> String {
    format!("[{}]", items.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
}

fn emit_real_list(v: &[f64]) -> String {
    if v.len() >= 2 {
        let (start, step, stop) = (v[0], v[1] - v[0], v[v.len() - 1]);
        if step > 0.0 && uniform_grid(start, step, stop) == v {
            return format!("{start}:{step}:{stop}");
        }
    }
    join(v)
}

/// Serializes a spec so that [`parse_config_str`] reproduces it exactly.
pub fn emit_config(spec: &ExperimentSpec) -> String {
    let c = &spec.config;
    let o = &spec.overrides;
    let mut s = String::new();
    let mut line = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    line("kind", spec.kind.name().into());
    line("transmitters", c.transmitters.to_string());
    line("receivers", c.receivers.to_string());
    line("samples", c.samples.to_string());
    line("grid", emit_real_list(&c.grid_deg));
    line("cr1", c.cr1.to_string());
    line("cr2", c.cr2.to_string());
    line("snr_db", c.snr_db.to_string());
    line("cnr_db", c.cnr_db.to_string());
    line("sigma_alpha_sq", c.sigma_alpha_sq.to_string());
    line(
        "clutter",
        match &c.clutter {
            ClutterModel::Grid => "grid".into(),
            ClutterModel::Patches(p) if p.is_empty() => "none".into(),
            ClutterModel::Patches(p) => join(p),
        },
    );
    line("seed", c.seed.to_string());
    line("out", format!("\"{}\"", spec.out.display()));
    if let Some(t) = spec.trials {
        line("trials", t.to_string());
    }
    if let Some(v) = &o.pfa_grid {
        line("pfa_grid", join(v));
    }
    if let Some(v) = o.fixed_cell {
        line("fixed_cell", v.to_string());
    }
    if let Some(v) = o.pfa {
        line("pfa", v.to_string());
    }
    if let Some(v) = &o.q_grid {
        line("q_grid", join(v));
    }
    if let Some(v) = &o.mismatch {
        line("mismatch", join(v));
    }
    if let Some(v) = o.jitter_deg {
        line("jitter_deg", v.to_string());
    }
    if let Some(v) = o.min_separation {
        line("min_separation", v.to_string());
    }
    if let Some(v) = o.clutter_guard_deg {
        line("clutter_guard_deg", v.to_string());
    }
    if let Some(v) = &o.estimators {
        let names: Vec<&str> = v.iter().map(|e| if *e == Estimator::Csp { "csp" } else { "omp" }).collect();
        line("estimators", join(&names));
    }
    if let Some(v) = o.noiseless {
        line("noiseless", v.to_string());
    }
    if let Some(v) = &o.cr1_grid {
        line("cr1_grid", join(v));
    }
    if let Some(v) = &o.delta_grid {
        line("delta_grid", join(v));
    }
    if let Some(v) = o.metric {
        line("metric", if v == AccuracyMetric::Std { "std" } else { "rmse" }.into());
    }
    if let Some(v) = o.tolerance {
        line("tolerance", v.to_string());
    }
    if let Some(v) = o.cell {
        line("cell", v.to_string());
    }
    if let Some(v) = o.alpha_re {
        line("alpha_re", v.to_string());
    }
    if let Some(v) = o.alpha_im {
        line("alpha_im", v.to_string());
    }
    s
}

/// Plain decimal with 9 significant digits; independent of locale.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci.split_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    let decimals = (8 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// One CSV table; every file starts with the seed and schema comment.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Self { name, columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn render(&self, seed: u64) -> String {
        let mut s = format!("# seed={seed} schema={CSV_SCHEMA_VERSION}\n{}\n", self.columns.join(","));
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }
}

fn num(x: f64) -> String {
    format_number(x)
}

fn roc_table(curve: &RocCurve) -> Table {
    let mut t = Table::new("roc", &["pfa", "pd_emp", "pd_theory", "stderr"]);
    for k in 0..curve.pfa_grid.len() {
        t.rows.push(vec![
            num(curve.pfa_grid[k]),
            num(curve.pd_empirical[k]),
            num(curve.pd_theoretical[k]),
            num(curve.pd_stderr[k]),
        ]);
    }
    t
}

fn estimate_row(t: &mut Table, stats: &experiments::EstimationStats) {
    t.rows.push(vec![stats.scenario.clone(), num(stats.bias_deg), num(stats.std_deg), stats.trials.to_string()]);
}

/// Runs the experiment and returns its tables without touching the disk.
pub fn execute(spec: &ExperimentSpec) -> Result<Vec<Table>> {
    spec.validate()?;
    let config = &spec.config;
    let o = &spec.overrides;
    let trials = spec.trials();
    let estimate_columns = ["scenario", "bias_deg", "std_deg", "trials"];
    let target_spec = |q: usize, mismatch: f64, estimator: Estimator| TargetSpec {
        count: q,
        mismatch_deg: mismatch,
        jitter_deg: o.jitter_deg.unwrap_or(0.0),
        min_separation_cells: o.min_separation.unwrap_or(1),
        clutter_guard_deg: o.clutter_guard_deg.unwrap_or(0.0),
        pfa: o.pfa,
        estimator,
        refit: Default::default(),
        noiseless: o.noiseless.unwrap_or(false),
    };
    let tables = match spec.kind {
        ExperimentKind::Roc => {
            let grid = o.pfa_grid.clone().unwrap_or_else(experiments::default_pfa_grid);
            vec![roc_table(&experiments::run_roc(config, &grid, trials, o.fixed_cell.unwrap_or(true))?)]
        }
        ExperimentKind::Estimate | ExperimentKind::Mismatch => {
            let sc = Scenario::build(config)?;
            let default_mismatch = if spec.kind == ExperimentKind::Mismatch { vec![0.1, 0.5, 1.0] } else { vec![0.0] };
            let mut t = Table::new("estimate", &estimate_columns);
            for &m in o.mismatch.as_deref().unwrap_or(&default_mismatch) {
                for &q in o.q_grid.as_deref().unwrap_or(&[1]) {
                    for &e in o.estimators.as_deref().unwrap_or(&[Estimator::Csp]) {
                        estimate_row(&mut t, &experiments::run_estimation_on(&sc, &target_spec(q, m, e), trials)?);
                    }
                }
            }
            vec![t]
        }
        ExperimentKind::Resolvability => {
            let cr1s = o.cr1_grid.clone().unwrap_or_else(|| vec![config.cr1]);
            let deltas = o.delta_grid.clone().unwrap_or_else(|| uniform_grid(2.0, 2.0, 20.0));
            let mut t = Table::new("resolvability", &["delta_deg", "cr1", "p_ce", "stderr"]);
            for cr1 in cr1s {
                let cfg = RadarConfig { cr1, ..config.clone() };
                let sc = Scenario::build(&cfg)?;
                for p in experiments::run_resolvability_on(&sc, &deltas, trials, o.noiseless.unwrap_or(false))? {
                    t.rows.push(vec![num(p.delta_deg), num(p.cr1), num(p.p_ce), num(p.stderr)]);
                }
            }
            vec![t]
        }
        ExperimentKind::CrMatch => {
            let cr1s = o.cr1_grid.clone().unwrap_or_else(|| vec![1.0, 2.0, 4.0, 8.0, 16.0]);
            let cm = CrMatchSpec {
                targets: TargetSpec {
                    jitter_deg: o.jitter_deg.unwrap_or(config.grid_step() / 2.0),
                    ..target_spec(o.q_grid.as_ref().and_then(|q| q.first().copied()).unwrap_or(1), 0.0, Estimator::Csp)
                },
                metric: o.metric.unwrap_or(AccuracyMetric::Std),
                trials,
                tolerance: o.tolerance.unwrap_or(0.05),
            };
            let mut t = Table::new("cr_match", &["cr1", "cr2_matched"]);
            for p in experiments::run_cr_match(config, &cr1s, &cm)? {
                t.rows.push(vec![num(p.cr1), num(p.cr2_matched)]);
            }
            vec![t]
        }
        ExperimentKind::SingleRun => {
            let cell = o.cell.unwrap_or(config.grid_len() / 2);
            let alpha = C64::new(o.alpha_re.unwrap_or(1.0), o.alpha_im.unwrap_or(0.0));
            let r = experiments::run_single(config, cell, alpha, o.pfa.unwrap_or(1e-3), o.noiseless.unwrap_or(false))?;
            let mut t =
                Table::new("single_run", &["detected", "t_hat", "angle_deg", "statistic", "eta", "true_cell"]);
            t.rows.push(vec![
                r.detected.to_string(),
                r.t_hat.to_string(),
                num(r.angle_deg),
                num(r.statistic),
                num(r.eta),
                r.true_cell.to_string(),
            ]);
            vec![t]
        }
    };
    Ok(tables)
}

/// Files written by [`run`].
#[derive(Clone, Debug)]
pub struct RunReport {
    pub csv_files: Vec<PathBuf>,
    pub manifest: PathBuf,
}

/// Executes the spec, writes one CSV per table and `manifest.json` into
/// `spec.out`.
pub fn run(spec: &ExperimentSpec, threads: Option<usize>) -> Result<RunReport> {
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let clock = Instant::now();
    let tables = execute(spec)?;
    let elapsed = clock.elapsed().as_secs_f64();
    std::fs::create_dir_all(&spec.out).map_err(|e| Error::io(&spec.out, e))?;
    let mut csv_files = Vec::new();
    for t in &tables {
        let path = spec.out.join(t.file_name());
        std::fs::write(&path, t.render(spec.config.seed)).map_err(|e| Error::io(&path, e))?;
        csv_files.push(path);
    }
    let manifest = json!({
        "manifest_version": MANIFEST_SCHEMA_VERSION,
        "kind": spec.kind.name(),
        "seed": spec.config.seed,
        "version": build_version(),
        "trials": spec.trials(),
        "threads": threads.unwrap_or_else(rayon::current_num_threads),
        "started_unix_s": started,
        "wall_clock_s": elapsed,
        "config": emit_config(spec),
        "radar": spec.config,
        "outputs": tables.iter().map(|t| t.file_name()).collect::<Vec<_>>(),
    });
    let path = spec.out.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(RunReport { csv_files, manifest: path })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let spec = parse_config_str("").unwrap();
        let c = &spec.config;
        assert_eq!((c.receivers, c.transmitters, c.samples), (8, 10, 20));
        assert_eq!((c.cr1, c.cr2, c.cnr_db), (4.0, 2.0, 30.0));
        assert_eq!(c.grid_deg, uniform_grid(-50.0, 2.0, 50.0));
    }

    #[test]
    fn cr1_zero_is_rejected() {
        let err = parse_config_str("cr1 = 0").unwrap_err().to_string();
        assert!(err.contains("cr1"), "{err}");
    }

    #[test]
    fn unknown_key_is_named() {
        let err = parse_config_str("snr = 3").unwrap_err().to_string();
        assert!(err.contains("`snr`"), "{err}");
    }

    #[test]
    fn round_trip() {
        let text = "kind = cr-match\nreceivers = 16\ngrid = [-10, -3.5, 7.25]\nsnr_db = inf\nclutter = grid\n\
                    pfa_grid = 0.01, 0.1\nq_grid = [1, 2]\nestimators = [csp, omp]\nmetric = rmse\n\
                    alpha_im = -0.3\nout = \"x y\"\ntrials = 17\nfixed_cell = false # comment\n";
        let spec = parse_config_str(text).unwrap();
        let again = parse_config_str(&emit_config(&spec)).unwrap();
        assert_eq!(spec, again);
        let default = parse_config_str("").unwrap();
        assert_eq!(parse_config_str(&emit_config(&default)).unwrap(), default);
    }

    #[test]
    fn ranges_expand() {
        let spec = parse_config_str("grid = -10:0.5:10").unwrap();
        assert_eq!(spec.config.grid_len(), 41);
        assert!(emit_config(&spec).contains("grid = -10:0.5:10"));
        let spec = parse_config_str("q_grid = 1:2:7").unwrap();
        assert_eq!(spec.overrides.q_grid, Some(vec![1, 3, 5, 7]));
        assert!(parse_config_str("q_grid = 3:0:7").is_err());
    }

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.5), "0.500000000");
        assert_eq!(format_number(123.456), "123.456000");
        assert_eq!(format_number(-1e-3), "-0.00100000000");
        assert_eq!(format_number(9.9999999999), "10.0000000");
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(1e10), "10000000000");
        assert_eq!(format_number(f64::INFINITY), "inf");
    }

    #[test]
    fn roc_table_schema() {
        let mut spec = parse_config_str("kind = roc\ntrials = 100\npfa_grid = [0.01, 0.1]").unwrap();
        spec.config.seed = 5;
        let t = &execute(&spec).unwrap()[0];
        let csv = t.render(5);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("# seed=5 schema=1"));
        assert_eq!(lines.next(), Some("pfa,pd_emp,pd_theory,stderr"));
        assert_eq!(lines.count(), 2);
    }
}
