//! Browser bindings for the compressed-domain radar pipeline.
//!
//! A [`Demo`] holds one scenario (waveforms, compression matrices and Capon
//! weights) and exposes three operations to JavaScript: a per-cell detection
//! spectrum for a random scene, an empirical-vs-theoretical ROC, and the
//! angular response of a Capon beam next to a matched-filter beam.

use csp_mimo::beamformer::matched_weights;
use csp_mimo::detector::scan_cells;
use csp_mimo::experiments::run_roc_on;
use csp_mimo::linalg::{to_complex, CVec};
use csp_mimo::multitarget::deflation_detect;
use csp_mimo::pipeline::Scenario;
use csp_mimo::rng::{complex_normal, stream};
use csp_mimo::{RadarConfig, Target};
use wasm_bindgen::prelude::*;

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

#[wasm_bindgen]
pub struct Demo {
    sc: Scenario,
}

/// Result of [`Demo::spectrum`].
#[wasm_bindgen(getter_with_clone)]
pub struct Spectrum {
    pub grid_deg: Vec<f64>,
    pub log_lrt: Vec<f64>,
    pub true_cells: Vec<u32>,
    pub detected_cells: Vec<u32>,
}

/// Result of [`Demo::roc`].
#[wasm_bindgen(getter_with_clone)]
pub struct Roc {
    pub pfa: Vec<f64>,
    pub pd_empirical: Vec<f64>,
    pub pd_theoretical: Vec<f64>,
}

/// Result of [`Demo::beampattern`], gains in dB.
#[wasm_bindgen(getter_with_clone)]
pub struct Beampattern {
    pub angle_deg: Vec<f64>,
    pub capon_db: Vec<f64>,
    pub matched_db: Vec<f64>,
}

#[wasm_bindgen]
impl Demo {
    /// Builds a scenario on the default 2-degree grid over [-50, 50].
    #[wasm_bindgen(constructor)]
    pub fn new(receivers: u32, cr1: f64, cr2: f64, snr_db: f64, cnr_db: f64, seed: u64) -> Result<Demo, JsValue> {
        let config = RadarConfig {
            receivers: receivers as usize,
            cr1,
            cr2,
            snr_db,
            cnr_db,
            seed,
            ..RadarConfig::default()
        };
        Ok(Demo { sc: Scenario::build(&config).map_err(js_err)? })
    }

    pub fn m1(&self) -> u32 {
        self.sc.compressed.m1() as u32
    }

    pub fn m2(&self) -> u32 {
        self.sc.beamformed.m2() as u32
    }

    /// Draws `targets` Swerling targets on distinct random cells, observes one
    /// noisy snapshot and returns the log-LRT of every cell together with the
    /// cells picked by deflation at the given false-alarm rate.
    pub fn spectrum(&self, targets: u32, pfa: f64, draw: u64) -> Result<Spectrum, JsValue> {
        let l = self.sc.grid_len();
        let q = (targets as usize).min(l);
        let config = &self.sc.config;
        let mut rng = stream(config.seed, "web-spectrum", draw);
        let cells = rand::seq::index::sample(&mut rng, l, q).into_vec();
        let scene: Vec<Target> = cells
            .iter()
            .map(|&c| Target {
                angle_deg: config.grid_deg[c],
                amplitude: complex_normal(&mut rng) * config.sigma_alpha_sq.sqrt(),
            })
            .collect();
        let z = self.sc.observe(&scene, &mut rng).map_err(js_err)?;
        let bm = &self.sc.beamformed;
        let stats = scan_cells(&z, bm, config.sigma_alpha_sq).map_err(js_err)?;
        let found = deflation_detect(&z, bm, config.sigma_alpha_sq, pfa, l).map_err(js_err)?;
        Ok(Spectrum {
            grid_deg: config.grid_deg.clone(),
            log_lrt: stats.log_lrt,
            true_cells: cells.iter().map(|&c| c as u32).collect(),
            detected_cells: found.cells.iter().map(|&c| c as u32).collect(),
        })
    }

    /// Fixed-cell ROC over `points` log-spaced false-alarm rates in [1e-3, 1].
    pub fn roc(&self, points: u32, trials: u32) -> Result<Roc, JsValue> {
        let n = points.max(2) as usize;
        let grid: Vec<f64> = (0..n).map(|k| 10f64.powf(-3.0 + 3.0 * k as f64 / (n - 1) as f64)).collect();
        let curve = run_roc_on(&self.sc, &grid, trials as usize, true).map_err(js_err)?;
        Ok(Roc { pfa: curve.pfa_grid, pd_empirical: curve.pd_empirical, pd_theoretical: curve.pd_theoretical })
    }

    /// Output power of the beam steered at grid cell `cell` for a unit source
    /// at each of `points` angles in [-90, 90], normalized to the look direction.
    pub fn beampattern(&self, cell: u32, points: u32) -> Result<Beampattern, JsValue> {
        let cell = cell as usize;
        if cell >= self.sc.grid_len() {
            return Err(js_err(format!("cell {cell} out of range")));
        }
        let phi1 = to_complex(&self.sc.compressed.phi1);
        let capon = self.sc.beamformed.w.column(cell).into_owned();
        let matched = matched_weights(&self.sc.compressed.lambda).column(cell).into_owned();
        let n = points.max(2) as usize;
        let mut out = Beampattern { angle_deg: Vec::with_capacity(n), capon_db: Vec::new(), matched_db: Vec::new() };
        for k in 0..n {
            let angle = -90.0 + 180.0 * k as f64 / (n - 1) as f64;
            let a = self.sc.model.signature(angle).map_err(js_err)?;
            let a: CVec = &phi1 * a;
            out.angle_deg.push(angle);
            out.capon_db.push(gain_db(&capon, &a));
            out.matched_db.push(gain_db(&matched, &a));
        }
        Ok(out)
    }
}

fn gain_db(w: &CVec, a: &CVec) -> f64 {
    10.0 * w.dotc(a).norm_sqr().max(1e-30).log10()
}
