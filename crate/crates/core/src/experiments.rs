//! Seeded Monte Carlo studies: ROC, angle-estimation accuracy, two-target
//! resolvability and the second-compression match against an uncompressed
//! baseline.
//!
//! Trial `i` of a study draws from its own random stream, so results do not
//! depend on the number of worker threads. Aggregation always runs in trial
//! order.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::detector::{argmax, detect_single, scan_cells, theoretical_roc, threshold};
use crate::error::{Error, Result};
use crate::linalg::{CVec, RMat, C64};
use crate::model::{ClutterModel, RadarConfig, Target};
use crate::multitarget::{deflation_detect, deflation_detect_with, omp_baseline, Refit};
use crate::pipeline::Scenario;
use crate::rng::{self, complex_normal};

/// 20 log-spaced false-alarm rates from 1e-3 up to (not including) 1.
pub fn default_pfa_grid() -> Vec<f64> {
    (0..20).map(|k| 10f64.powf(-3.0 + 3.0 * k as f64 / 20.0)).collect()
}

/// Binomial standard error of an empirical probability.
pub fn binomial_stderr(p: f64, n: usize) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

fn draw_amplitude<R: Rng + ?Sized>(sigma_alpha_sq: f64, rng: &mut R) -> C64 {
    complex_normal(rng) * sigma_alpha_sq.sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RocCurve {
    pub pfa_grid: Vec<f64>,
    pub pd_empirical: Vec<f64>,
    pub pd_theoretical: Vec<f64>,
    /// Empirical false-alarm rate of the same test under H0.
    pub pfa_empirical: Vec<f64>,
    pub pd_stderr: Vec<f64>,
    pub trials: usize,
}

struct RocTrial {
    h0_stat: f64,
    h0_d: f64,
    h1_stat: f64,
    h1_d: f64,
    true_d: f64,
}

/// Empirical and theoretical ROC.
///
/// Each trial draws a noise-only and a target-present snapshot; the target
/// sits on a uniformly chosen grid cell with `alpha ~ CN(0, sigma_alpha^2)`.
/// With `fixed_cell` the statistic is read at the true cell (what the closed
/// form describes); otherwise the GLRT argmax cell is used. The theoretical
/// curve averages the closed-form ROC over the drawn cells.
pub fn run_roc(config: &RadarConfig, pfa_grid: &[f64], trials: usize, fixed_cell: bool) -> Result<RocCurve> {
    let sc = Scenario::build(config)?;
    run_roc_on(&sc, pfa_grid, trials, fixed_cell)
}

pub fn run_roc_on(sc: &Scenario, pfa_grid: &[f64], trials: usize, fixed_cell: bool) -> Result<RocCurve> {
    if trials == 0 {
        return Err(Error::invalid("ROC needs at least one trial"));
    }
    if pfa_grid.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
        return Err(Error::invalid("every Pfa must lie in (0, 1]"));
    }
    let config = &sc.config;
    let s = config.sigma_alpha_sq;
    let bm = &sc.beamformed;
    let pick = |z: &CVec, t: usize| -> Result<(f64, f64)> {
        let stats = scan_cells(z, bm, s)?;
        let cell = if fixed_cell { t } else { argmax(&stats.log_lrt) };
        Ok((stats.e[cell].norm(), stats.d[cell]))
    };
    let outcomes: Vec<RocTrial> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(config.seed, "roc", i);
            let t = rng.random_range(0..sc.grid_len());
            let alpha = draw_amplitude(s, &mut rng);
            let z0 = sc.draw_noise(&mut rng);
            let z1 = sc.observe(&[Target { angle_deg: config.grid_deg[t], amplitude: alpha }], &mut rng)?;
            let (h0_stat, h0_d) = pick(&z0, t)?;
            let (h1_stat, h1_d) = pick(&z1, t)?;
            Ok(RocTrial { h0_stat, h0_d, h1_stat, h1_d, true_d: bm.d()[t] })
        })
        .collect::<Result<_>>()?;
    let n = trials as f64;
    let mut curve = RocCurve {
        pfa_grid: pfa_grid.to_vec(),
        pd_empirical: Vec::new(),
        pd_theoretical: Vec::new(),
        pfa_empirical: Vec::new(),
        pd_stderr: Vec::new(),
        trials,
    };
    for &pfa in pfa_grid {
        let hits = outcomes.iter().filter(|o| o.h1_stat > threshold(o.h1_d, pfa)).count();
        let alarms = outcomes.iter().filter(|o| o.h0_stat > threshold(o.h0_d, pfa)).count();
        let theory = outcomes.iter().map(|o| theoretical_roc(o.true_d, s, pfa)).sum::<f64>() / n;
        let pd = hits as f64 / n;
        curve.pd_empirical.push(pd);
        curve.pfa_empirical.push(alarms as f64 / n);
        curve.pd_theoretical.push(theory);
        curve.pd_stderr.push(binomial_stderr(pd, trials));
    }
    Ok(curve)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Estimator {
    /// Compressed-domain GLRT with deflation.
    Csp,
    /// OMP on the compressed dictionary.
    Omp,
}

/// Target layout and estimator settings for the estimation studies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TargetSpec {
    pub count: usize,
    /// Offset added to every target's grid angle, degrees.
    pub mismatch_deg: f64,
    /// Draw an extra offset uniformly in `[-jitter_deg, jitter_deg]` per target.
    pub jitter_deg: f64,
    /// Minimum gap between target cells.
    pub min_separation_cells: usize,
    /// Keep targets at least this far (degrees) from every clutter patch.
    pub clutter_guard_deg: f64,
    /// Detection threshold. `None` means the target count is known and the
    /// estimator runs exactly `count` iterations.
    pub pfa: Option<f64>,
    pub estimator: Estimator,
    pub refit: Refit,
    pub noiseless: bool,
}

impl Default for TargetSpec {
    fn default() -> Self {
        Self {
            count: 1,
            mismatch_deg: 0.0,
            jitter_deg: 0.0,
            min_separation_cells: 1,
            clutter_guard_deg: 0.0,
            pfa: None,
            estimator: Estimator::Csp,
            refit: Refit::default(),
            noiseless: false,
        }
    }
}

impl TargetSpec {
    pub fn describe(&self) -> String {
        let method = match self.estimator {
            Estimator::Csp => "csp",
            Estimator::Omp => "omp",
        };
        let mut s = format!("{method} q={} mismatch={}", self.count, self.mismatch_deg);
        if self.jitter_deg > 0.0 {
            s.push_str(&format!(" jitter={}", self.jitter_deg));
        }
        if let Some(p) = self.pfa {
            s.push_str(&format!(" pfa={p}"));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimationStats {
    pub scenario: String,
    pub bias_deg: f64,
    pub std_deg: f64,
    pub rmse_deg: f64,
    /// Detection-positive trials that contributed errors.
    pub trials: usize,
    /// Matched target/estimate pairs.
    pub pairs: usize,
    /// No trial produced an estimate.
    pub empty: bool,
}

/// Draws `count` cells at least `min_sep` apart, uniformly over all such
/// layouts, in random order.
fn draw_cells<R: Rng + ?Sized>(l: usize, count: usize, min_sep: usize, rng: &mut R) -> Result<Vec<usize>> {
    let min_sep = min_sep.max(1);
    if count == 0 || (count - 1) * min_sep >= l {
        return Err(Error::invalid(format!("cannot place {count} targets {min_sep} cells apart on {l} cells")));
    }
    // choose `count` of the compressed slots, then re-expand the gaps
    let slots = l - (count - 1) * (min_sep - 1);
    let mut picked = rand::seq::index::sample(rng, slots, count).into_vec();
    let order = picked.clone();
    picked.sort_unstable();
    let rank = |c: usize| picked.binary_search(&c).unwrap_or(0);
    Ok(order.into_iter().map(|c| c + rank(c) * (min_sep - 1)).collect())
}

/// Cells outside the clutter guard band.
fn guarded(config: &RadarConfig, guard_deg: f64) -> Vec<bool> {
    let patches: &[f64] = match &config.clutter {
        ClutterModel::Patches(p) if guard_deg > 0.0 => p,
        _ => &[],
    };
    config.grid_deg.iter().map(|g| patches.iter().all(|p| (g - p).abs() >= guard_deg)).collect()
}

fn draw_guarded_cells<R: Rng + ?Sized>(config: &RadarConfig, spec: &TargetSpec, rng: &mut R) -> Result<Vec<usize>> {
    let l = config.grid_len();
    let allowed = guarded(config, spec.clutter_guard_deg);
    for _ in 0..10_000 {
        let cells = draw_cells(l, spec.count, spec.min_separation_cells, rng)?;
        if cells.iter().all(|&c| allowed[c]) {
            return Ok(cells);
        }
    }
    Err(Error::invalid("clutter guard leaves no room for the requested targets"))
}

/// Signed angle errors after optimal assignment of estimates to truths.
pub fn matched_errors(estimates: &[f64], truths: &[f64]) -> Vec<f64> {
    if estimates.is_empty() || truths.is_empty() {
        return Vec::new();
    }
    let (rows, cols, flip) = if estimates.len() <= truths.len() {
        (estimates, truths, false)
    } else {
        (truths, estimates, true)
    };
    let cost: Vec<Vec<f64>> = rows.iter().map(|r| cols.iter().map(|c| (r - c).abs()).collect()).collect();
    let assign = min_cost_assignment(&cost);
    assign
        .iter()
        .enumerate()
        .map(|(i, &j)| if flip { cols[j] - rows[i] } else { rows[i] - cols[j] })
        .collect()
}

/// Minimum-cost assignment of every row to a distinct column (rows <= cols),
/// by the shortest augmenting path form of the Hungarian method.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let m = cost[0].len();
    assert!(n <= m && cost.iter().all(|r| r.len() == m), "need a rectangular cost matrix with rows <= cols");
    // 1-based potentials; column 0 is a virtual source
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assign = vec![0; n];
    for j in 1..=m {
        if owner[j] != 0 {
            assign[owner[j] - 1] = j - 1;
        }
    }
    assign
}

fn summarize(scenario: String, per_trial: &[Vec<f64>]) -> EstimationStats {
    let errors: Vec<f64> = per_trial.iter().flatten().copied().collect();
    let trials = per_trial.iter().filter(|e| !e.is_empty()).count();
    if errors.is_empty() {
        return EstimationStats {
            scenario,
            bias_deg: f64::NAN,
            std_deg: f64::NAN,
            rmse_deg: f64::NAN,
            trials: 0,
            pairs: 0,
            empty: true,
        };
    }
    let n = errors.len() as f64;
    let bias = errors.iter().sum::<f64>() / n;
    let var = errors.iter().map(|e| (e - bias).powi(2)).sum::<f64>() / n;
    let ms = errors.iter().map(|e| e * e).sum::<f64>() / n;
    EstimationStats {
        scenario,
        bias_deg: bias,
        std_deg: var.sqrt(),
        rmse_deg: ms.sqrt(),
        trials,
        pairs: errors.len(),
        empty: false,
    }
}

fn estimate_cells(sc: &Scenario, z: &CVec, spec: &TargetSpec) -> Result<Vec<usize>> {
    let bm = &sc.beamformed;
    let s = sc.config.sigma_alpha_sq;
    Ok(match spec.estimator {
        Estimator::Csp => {
            if spec.count == 1 {
                let stats = scan_cells(z, bm, s)?;
                let out = detect_single(&stats, spec.pfa.unwrap_or(1.0))?;
                if out.detected || spec.pfa.is_none() {
                    vec![out.t_hat]
                } else {
                    Vec::new()
                }
            } else {
                deflation_detect_with(z, bm, s, spec.pfa.unwrap_or(1.0), spec.count, spec.refit)?.cells
            }
        }
        Estimator::Omp => omp_baseline(z, bm.compressed_dictionary(), spec.count)?.cells,
    })
}

/// Per-trial signed errors for a fixed scenario; trial `i` uses stream `i` of
/// the `tag` family, so different scenarios can share random numbers.
pub fn estimation_errors(sc: &Scenario, spec: &TargetSpec, trials: usize, tag: &str) -> Result<Vec<Vec<f64>>> {
    let config = &sc.config;
    let grid = &config.grid_deg;
    (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(config.seed, tag, i);
            let cells = draw_guarded_cells(config, spec, &mut rng)?;
            let mut targets = Vec::with_capacity(cells.len());
            for &c in &cells {
                let jitter = if spec.jitter_deg > 0.0 {
                    rng.random_range(-spec.jitter_deg..=spec.jitter_deg)
                } else {
                    0.0
                };
                targets.push(Target {
                    angle_deg: grid[c] + spec.mismatch_deg + jitter,
                    amplitude: draw_amplitude(config.sigma_alpha_sq, &mut rng),
                });
            }
            let z = if spec.noiseless {
                sc.observe_noiseless(&targets)?
            } else {
                sc.observe(&targets, &mut rng)?
            };
            let est: Vec<f64> = estimate_cells(sc, &z, spec)?.iter().map(|&c| grid[c]).collect();
            let truth: Vec<f64> = targets.iter().map(|t| t.angle_deg).collect();
            Ok(matched_errors(&est, &truth))
        })
        .collect()
}

/// Bias and standard deviation of the angle estimate over detection-positive
/// trials.
pub fn run_estimation(config: &RadarConfig, spec: &TargetSpec, trials: usize) -> Result<EstimationStats> {
    let sc = Scenario::build(config)?;
    run_estimation_on(&sc, spec, trials)
}

pub fn run_estimation_on(sc: &Scenario, spec: &TargetSpec, trials: usize) -> Result<EstimationStats> {
    if trials == 0 {
        return Err(Error::invalid("estimation needs at least one trial"));
    }
    let errors = estimation_errors(sc, spec, trials, "estimate")?;
    Ok(summarize(spec.describe(), &errors))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolvabilityPoint {
    pub delta_deg: f64,
    pub cr1: f64,
    pub p_ce: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// Fraction of two-target trials in which both cells are recovered exactly,
/// per angular gap. The second target sits `round(delta / step)` cells after
/// the first; the target count is known to the estimator.
pub fn run_resolvability(config: &RadarConfig, delta_grid_deg: &[f64], trials: usize) -> Result<Vec<ResolvabilityPoint>> {
    let sc = Scenario::build(config)?;
    run_resolvability_on(&sc, delta_grid_deg, trials, false)
}

pub fn run_resolvability_on(
    sc: &Scenario,
    delta_grid_deg: &[f64],
    trials: usize,
    noiseless: bool,
) -> Result<Vec<ResolvabilityPoint>> {
    if trials == 0 {
        return Err(Error::invalid("resolvability needs at least one trial"));
    }
    let config = &sc.config;
    let l = config.grid_len();
    let step = config.grid_step();
    let bm = &sc.beamformed;
    delta_grid_deg
        .iter()
        .enumerate()
        .map(|(k, &delta)| {
            let gap = (delta / step).round();
            if !(gap >= 1.0 && (gap as usize) < l) {
                return Err(Error::invalid(format!("gap {delta} deg does not fit on the grid")));
            }
            let gap = gap as usize;
            let hits: Vec<bool> = (0..trials as u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = rng::stream(rng::derive_seed(config.seed, "resolve", k as u64), "resolve", i);
                    let t1 = rng.random_range(0..l - gap);
                    let t2 = t1 + gap;
                    let targets = [
                        Target { angle_deg: config.grid_deg[t1], amplitude: draw_amplitude(config.sigma_alpha_sq, &mut rng) },
                        Target { angle_deg: config.grid_deg[t2], amplitude: draw_amplitude(config.sigma_alpha_sq, &mut rng) },
                    ];
                    let z = if noiseless { sc.observe_noiseless(&targets)? } else { sc.observe(&targets, &mut rng)? };
                    let mut cells = deflation_detect(&z, bm, config.sigma_alpha_sq, 1.0, 2)?.cells;
                    cells.sort_unstable();
                    Ok(cells == [t1, t2])
                })
                .collect::<Result<_>>()?;
            let p = hits.iter().filter(|&&h| h).count() as f64 / trials as f64;
            Ok(ResolvabilityPoint {
                delta_deg: gap as f64 * step,
                cr1: config.cr1,
                p_ce: p,
                stderr: binomial_stderr(p, trials),
                trials,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AccuracyMetric {
    Std,
    Rmse,
}

impl AccuracyMetric {
    fn of(self, stats: &EstimationStats) -> f64 {
        match self {
            AccuracyMetric::Std => stats.std_deg,
            AccuracyMetric::Rmse => stats.rmse_deg,
        }
    }
}

/// Settings of the second-compression match study.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrMatchSpec {
    pub targets: TargetSpec,
    pub metric: AccuracyMetric,
    pub trials: usize,
    /// Allowed relative degradation against the baseline.
    pub tolerance: f64,
}

impl Default for CrMatchSpec {
    fn default() -> Self {
        Self {
            targets: TargetSpec { jitter_deg: 1.0, ..TargetSpec::default() },
            metric: AccuracyMetric::Std,
            trials: 20_000,
            tolerance: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrMatchPoint {
    pub cr1: f64,
    pub cr2_matched: f64,
    pub m2: usize,
    pub baseline: f64,
    pub matched: f64,
}

/// For each first compression ratio, the largest second compression ratio
/// whose accuracy stays within `tolerance` of the same chain without second
/// compression (`Phi2 = I`).
///
/// Candidate `Phi2` matrices are the leading rows of one fixed `L x L`
/// Gaussian draw and every candidate sees the same trials, so the search over
/// `M2` is a bisection on a (nearly) monotone curve.
pub fn run_cr_match(config: &RadarConfig, cr1_grid: &[f64], spec: &CrMatchSpec) -> Result<Vec<CrMatchPoint>> {
    let l = config.grid_len();
    let nested = crate::compression::draw_compression_matrix(l, l, &mut rng::stream(config.seed, "phi2-nested", 0))?;
    cr1_grid
        .iter()
        .map(|&cr1| {
            let cfg = RadarConfig { cr1, cr2: 1.0, ..config.clone() };
            cfg.validate()?;
            let base = Scenario::build(&cfg)?.with_phi2(&RMat::identity(l, l))?;
            let evaluate = |sc: &Scenario| -> Result<f64> {
                let errors = estimation_errors(sc, &spec.targets, spec.trials, "cr-match")?;
                Ok(spec.metric.of(&summarize(String::new(), &errors)))
            };
            let baseline = evaluate(&base)?;
            let limit = baseline * (1.0 + spec.tolerance);
            let at = |m2: usize| -> Result<f64> { evaluate(&base.with_phi2(&nested.rows(0, m2).into_owned())?) };
            let (mut lo, mut hi) = (1usize, l);
            let mut matched = baseline;
            while lo < hi {
                let mid = (lo + hi) / 2;
                let v = at(mid)?;
                if v <= limit {
                    hi = mid;
                    matched = v;
                } else {
                    lo = mid + 1;
                }
            }
            if hi == l {
                matched = at(l)?;
            }
            Ok(CrMatchPoint { cr1, cr2_matched: l as f64 / lo as f64, m2: lo, baseline, matched })
        })
        .collect()
}

/// Result of one noise-free or noisy pass through the pipeline.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingleRun {
    pub true_cell: usize,
    pub true_angle_deg: f64,
    pub detected: bool,
    pub t_hat: usize,
    pub angle_deg: f64,
    pub statistic: f64,
    pub eta: f64,
}

/// One target on grid cell `cell` with amplitude `alpha`, optionally noiseless.
pub fn run_single(config: &RadarConfig, cell: usize, alpha: C64, pfa: f64, noiseless: bool) -> Result<SingleRun> {
    let sc = Scenario::build(config)?;
    let grid = &config.grid_deg;
    if cell >= grid.len() {
        return Err(Error::invalid(format!("cell {cell} out of range")));
    }
    let target = [Target { angle_deg: grid[cell], amplitude: alpha }];
    let z = if noiseless {
        sc.observe_noiseless(&target)?
    } else {
        sc.observe(&target, &mut rng::stream(config.seed, "single", 0))?
    };
    let stats = scan_cells(&z, &sc.beamformed, config.sigma_alpha_sq)?;
    let out = detect_single(&stats, pfa)?;
    Ok(SingleRun {
        true_cell: cell,
        true_angle_deg: grid[cell],
        detected: out.detected,
        t_hat: out.t_hat,
        angle_deg: grid[out.t_hat],
        statistic: out.statistic,
        eta: out.eta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pfa_grid_shape() {
        let g = default_pfa_grid();
        assert_eq!(g.len(), 20);
        assert!((g[0] - 1e-3).abs() < 1e-15);
        assert!(*g.last().unwrap() < 1.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn matching_pairs_nearest() {
        let e = matched_errors(&[10.0, -4.0], &[-5.0, 11.0, 30.0]);
        assert_eq!(e, vec![-1.0, 1.0]);
        let e = matched_errors(&[0.0, 2.0, 40.0], &[1.0]);
        assert_eq!(e.len(), 1);
        assert!((e[0].abs() - 1.0).abs() < 1e-12);
    }

    fn brute_force(cost: &[Vec<f64>]) -> f64 {
        fn go(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
            if row == cost.len() {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for j in 0..used.len() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(cost[row][j] + go(cost, row + 1, used));
                    used[j] = false;
                }
            }
            best
        }
        go(cost, 0, &mut vec![false; cost[0].len()])
    }

    proptest::proptest! {
        #[test]
        fn assignment_is_optimal(n in 1usize..5, extra in 0usize..3, seed in 0u64..1000) {
            let mut rng = rng::stream(seed, "assign", 0);
            let cost: Vec<Vec<f64>> = (0..n).map(|_| (0..n + extra).map(|_| rng.random_range(0.0..10.0)).collect()).collect();
            let a = min_cost_assignment(&cost);
            let mut seen = a.clone();
            seen.sort_unstable();
            seen.dedup();
            proptest::prop_assert_eq!(seen.len(), n);
            let total: f64 = a.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
            proptest::prop_assert!((total - brute_force(&cost)).abs() < 1e-9);
        }
    }

    #[test]
    fn cells_respect_separation() {
        let mut rng = rng::stream(0, "cells", 0);
        for _ in 0..200 {
            let cells = draw_cells(51, 3, 3, &mut rng).unwrap();
            for i in 0..3 {
                for j in (i + 1)..3 {
                    assert!(cells[i].abs_diff(cells[j]) >= 3);
                }
            }
        }
        assert!(draw_cells(5, 3, 3, &mut rng).is_err());
    }

    #[test]
    fn summary_of_empty_run_is_flagged() {
        let s = summarize("x".into(), &[vec![], vec![]]);
        assert!(s.empty);
        assert_eq!(s.trials, 0);
    }

    #[test]
    fn noiseless_on_grid_estimation_is_exact() {
        // high SNR keeps d * sigma^2 >> 1 on every cell, where the statistic is
        // the normalized matched filter
        let config = RadarConfig { snr_db: 40.0, ..RadarConfig::default() };
        let spec = TargetSpec { noiseless: true, ..TargetSpec::default() };
        let stats = run_estimation(&config, &spec, 200).unwrap();
        assert_eq!(stats.bias_deg, 0.0);
        assert_eq!(stats.std_deg, 0.0);
        assert_eq!(stats.trials, 200);
    }

    #[test]
    fn single_run_finds_noiseless_target() {
        let config = RadarConfig { snr_db: 40.0, ..RadarConfig::default() };
        let run = run_single(&config, 30, C64::new(20.0, 5.0), 1e-3, true).unwrap();
        assert!(run.detected);
        assert_eq!(run.t_hat, 30);
    }

    #[test]
    fn noiseless_wide_pairs_are_resolved() {
        let config = RadarConfig { receivers: 20, snr_db: 20.0, ..RadarConfig::default() };
        let sc = Scenario::build(&config).unwrap();
        let points = run_resolvability_on(&sc, &[4.0, 20.0], 400, true).unwrap();
        assert!(points[1].p_ce >= 0.995, "{:?}", points[1]);
        assert!(points[0].p_ce <= points[1].p_ce);
    }
}
