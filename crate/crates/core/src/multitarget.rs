//! Multi-target detection by deflation, and an OMP baseline.

use log::warn;

use crate::beamformer::BeamformedModel;
use crate::detector::{argmax, scan_cells, threshold};
use crate::error::{Error, Result};
use crate::linalg::{least_squares, CMat, CVec, HermitianFactor, C64};

/// Relative singular-value cutoff for the amplitude refit.
pub const RANK_TOL: f64 = 1e-10;

/// Metric of the joint amplitude refit inside [`deflation_detect_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub enum Refit {
    /// Plain least squares on `Phi2 Theta[A]`.
    Euclidean,
    /// Least squares after whitening by `A`, so the residual carries no
    /// statistic at accepted cells.
    #[default]
    Whitened,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiTargetResult {
    /// Detected cells in detection order.
    pub cells: Vec<usize>,
    /// Amplitudes aligned with `cells`.
    pub amplitudes: Vec<C64>,
    pub beta_hat: CVec,
    /// The loop stopped because it picked a cell it had already accepted.
    pub stalled: bool,
    /// The refit sub-dictionary was rank deficient at some iteration.
    pub rank_deficient: bool,
    /// Residual norm after each accepted iteration, in the refit metric.
    pub residual_norms: Vec<f64>,
}

impl MultiTargetResult {
    fn empty(l: usize) -> Self {
        Self {
            cells: Vec::new(),
            amplitudes: Vec::new(),
            beta_hat: CVec::zeros(l),
            stalled: false,
            rank_deficient: false,
            residual_norms: Vec::new(),
        }
    }

    pub fn count(&self) -> usize {
        self.cells.len()
    }

    fn refit(&mut self, dict: &CMat, z: &CVec) -> CVec {
        self.refit_in(dict, z, None)
    }

    fn refit_in(&mut self, dict: &CMat, z: &CVec, metric: Option<&HermitianFactor>) -> CVec {
        let sub = dict.select_columns(&self.cells);
        let (amps, rank) = match metric {
            None => least_squares(&sub, z, RANK_TOL),
            Some(f) => least_squares(&f.whiten(&sub), &f.whiten_vec(z), RANK_TOL),
        };
        if rank < self.cells.len() {
            self.rank_deficient = true;
        }
        self.amplitudes = amps.iter().copied().collect();
        self.beta_hat.fill(C64::new(0.0, 0.0));
        for (&cell, &a) in self.cells.iter().zip(&self.amplitudes) {
            self.beta_hat[cell] = a;
        }
        let residual = z - sub * amps;
        self.residual_norms.push(match metric {
            None => residual.norm(),
            Some(f) => f.whiten_vec(&residual).norm(),
        });
        residual
    }
}

/// Detect-and-subtract: each pass runs the single-target GLRT on the residual,
/// accepts the cell if `|e| > eta(d, pfa)`, jointly refits every accepted
/// amplitude by least squares and recomputes the residual.
///
/// Stops on a rejected test, after `max_iters` acceptances, or when the
/// argmax lands on an already accepted cell (`stalled`). Uses the whitened
/// refit.
pub fn deflation_detect(
    z: &CVec,
    bm: &BeamformedModel,
    sigma_alpha_sq: f64,
    pfa: f64,
    max_iters: usize,
) -> Result<MultiTargetResult> {
    deflation_detect_with(z, bm, sigma_alpha_sq, pfa, max_iters, Refit::default())
}

pub fn deflation_detect_with(
    z: &CVec,
    bm: &BeamformedModel,
    sigma_alpha_sq: f64,
    pfa: f64,
    max_iters: usize,
    refit: Refit,
) -> Result<MultiTargetResult> {
    if max_iters == 0 {
        return Err(Error::invalid("deflation needs max_iters >= 1"));
    }
    if !(pfa > 0.0 && pfa <= 1.0) {
        return Err(Error::invalid(format!("false-alarm probability {pfa} is outside (0, 1]")));
    }
    let dict = bm.compressed_dictionary();
    let mut out = MultiTargetResult::empty(bm.grid_len());
    let mut residual = z.clone();
    while out.cells.len() < max_iters {
        let stats = scan_cells(&residual, bm, sigma_alpha_sq)?;
        let t_hat = argmax(&stats.log_lrt);
        let eta = threshold(stats.d[t_hat], pfa);
        if stats.e[t_hat].norm() <= eta {
            break;
        }
        if out.cells.contains(&t_hat) {
            out.stalled = true;
            break;
        }
        out.cells.push(t_hat);
        let metric = (refit == Refit::Whitened).then(|| bm.a_factor());
        residual = out.refit_in(dict, z, metric);
    }
    Ok(out)
}

/// Orthogonal matching pursuit with a known sparsity `q`: select the column
/// with the largest normalized correlation to the residual, refit, repeat.
pub fn omp_baseline(z: &CVec, dict: &CMat, q: usize) -> Result<MultiTargetResult> {
    let l = dict.ncols();
    if q == 0 || q > l {
        return Err(Error::invalid(format!("sparsity {q} must lie in 1..={l}")));
    }
    if z.len() != dict.nrows() {
        return Err(Error::dims(format!("z has {} entries, dictionary has {} rows", z.len(), dict.nrows())));
    }
    let norms: Vec<f64> = dict.column_iter().map(|c| c.norm()).collect();
    let mut out = MultiTargetResult::empty(l);
    let mut residual = z.clone();
    for _ in 0..q {
        let scores: Vec<f64> = dict
            .column_iter()
            .zip(&norms)
            .enumerate()
            .map(|(i, (col, &n))| {
                if n == 0.0 || out.cells.contains(&i) {
                    f64::NEG_INFINITY
                } else {
                    col.dotc(&residual).norm() / n
                }
            })
            .collect();
        out.cells.push(argmax(&scores));
        residual = out.refit(dict, z);
    }
    if out.rank_deficient {
        warn!("OMP support {:?} is rank deficient; amplitudes come from the pseudo-inverse", out.cells);
    }
    Ok(out)
}
