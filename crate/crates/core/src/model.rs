//! Physical scene: steering vectors, transmit waveforms, the stacked
//! measurement dictionary and the clutter-plus-noise covariance.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitize, CMat, CVec, HermitianFactor, C64};
use crate::rng::{self, complex_normal};

/// Where the clutter power sits in angle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ClutterModel {
    /// Equal clutter power at every grid angle.
    Grid,
    /// Discrete clutter patches at the listed angles (degrees), equal power each.
    Patches(Vec<f64>),
}

impl ClutterModel {
    /// Four patches placed midway between grid angles of the default 2 degree grid.
    pub fn default_patches() -> Self {
        ClutterModel::Patches(vec![-35.0, -13.0, 11.0, 37.0])
    }
}

/// Scenario parameters. Defaults follow the reference simulation table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadarConfig {
    pub transmitters: usize,
    pub receivers: usize,
    pub samples: usize,
    /// Grid angles in degrees, strictly increasing.
    pub grid_deg: Vec<f64>,
    /// First compression ratio `RN / M1`.
    pub cr1: f64,
    /// Second compression ratio `L / M2`.
    pub cr2: f64,
    pub snr_db: f64,
    pub cnr_db: f64,
    pub sigma_alpha_sq: f64,
    pub clutter: ClutterModel,
    pub seed: u64,
}

impl Default for RadarConfig {
    fn default() -> Self {
        Self {
            transmitters: 10,
            receivers: 8,
            samples: 20,
            grid_deg: uniform_grid(-50.0, 2.0, 50.0),
            cr1: 4.0,
            cr2: 2.0,
            snr_db: 0.0,
            cnr_db: 30.0,
            sigma_alpha_sq: 1.0,
            clutter: ClutterModel::default_patches(),
            seed: 1,
        }
    }
}

/// `start:step:stop`, inclusive of `stop` when it lands on the lattice.
pub fn uniform_grid(start: f64, step: f64, stop: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|k| start + step * k as f64).collect()
}

fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

impl RadarConfig {
    pub fn grid_len(&self) -> usize {
        self.grid_deg.len()
    }

    /// Length of the stacked snapshot, `R * N`.
    pub fn stacked_len(&self) -> usize {
        self.receivers * self.samples
    }

    pub fn m1(&self) -> usize {
        round_half_up(self.stacked_len() as f64 / self.cr1)
    }

    pub fn m2(&self) -> usize {
        round_half_up(self.grid_len() as f64 / self.cr2)
    }

    /// Total transmit power `P`; unit-modulus waveforms give one per element.
    pub fn transmit_power(&self) -> f64 {
        self.transmitters as f64
    }

    /// Per-element noise variance implied by `SNR = sigma_alpha^2 P / sigma_n^2`.
    pub fn noise_variance(&self) -> f64 {
        self.sigma_alpha_sq * self.transmit_power() / 10f64.powf(self.snr_db / 10.0)
    }

    /// Mean spacing of the grid.
    pub fn grid_step(&self) -> f64 {
        let l = self.grid_len();
        (self.grid_deg[l - 1] - self.grid_deg[0]) / (l - 1) as f64
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.transmitters < 1 || self.receivers < 1 || self.samples < 1 {
            return bad("I >= 1, R >= 1 and N >= 1 are required".into());
        }
        if self.grid_len() < 2 {
            return bad("the grid needs at least L >= 2 angles".into());
        }
        if self.grid_deg.iter().any(|a| !a.is_finite()) {
            return bad("grid angles must be finite".into());
        }
        if self.grid_deg.windows(2).any(|w| w[1] <= w[0]) {
            return bad("grid must be strictly increasing".into());
        }
        if !(self.cr1.is_finite() && self.cr1 >= 1.0) {
            return bad(format!("cr1 must be a finite ratio >= 1 (got {})", self.cr1));
        }
        if !(self.cr2.is_finite() && self.cr2 >= 1.0) {
            return bad(format!("cr2 must be a finite ratio >= 1 (got {})", self.cr2));
        }
        let (rn, l) = (self.stacked_len(), self.grid_len());
        if !(1..=rn).contains(&self.m1()) {
            return bad(format!("M1 = round(RN/cr1) must satisfy 1 <= M1 <= RN = {rn}"));
        }
        if !(1..=l).contains(&self.m2()) {
            return bad(format!("M2 = round(L/cr2) must satisfy 1 <= M2 <= L = {l}"));
        }
        if !(self.sigma_alpha_sq.is_finite() && self.sigma_alpha_sq > 0.0) {
            return bad("sigma_alpha_sq must be finite and > 0".into());
        }
        if self.snr_db.is_nan() || self.snr_db == f64::NEG_INFINITY {
            return bad("snr_db must be a number or +inf".into());
        }
        if self.cnr_db.is_nan() || self.cnr_db == f64::INFINITY {
            return bad("cnr_db must be finite or -inf".into());
        }
        if let ClutterModel::Patches(angles) = &self.clutter {
            if angles.iter().any(|a| !a.is_finite()) {
                return bad("clutter patch angles must be finite".into());
            }
        }
        Ok(())
    }
}

/// A point target; `angle_deg` may be off the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Target {
    pub angle_deg: f64,
    pub amplitude: C64,
}

/// Half-wavelength ULA response toward `angle_deg`, measured from broadside.
pub fn steering_vector(angle_deg: f64, count: usize) -> Result<CVec> {
    if !angle_deg.is_finite() {
        return Err(Error::invalid(format!("steering angle {angle_deg} is not finite")));
    }
    if count == 0 {
        return Err(Error::invalid("steering vector needs at least one element"));
    }
    let phase = PI * angle_deg.to_radians().sin();
    Ok(CVec::from_fn(count, |k, _| C64::from_polar(1.0, phase * k as f64)))
}

/// Unit-modulus waveforms with i.i.d. uniform phases, `I x N`.
pub fn draw_waveforms<R: Rng + ?Sized>(transmitters: usize, samples: usize, rng: &mut R) -> CMat {
    CMat::from_fn(transmitters, samples, |_, _| {
        C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI))
    })
}

#[derive(Clone, Debug)]
pub struct MeasurementModel {
    /// Stacked dictionary, `RN x L`; rows are `N` blocks of `R`.
    pub psi: CMat,
    /// Transmit waveforms `s_i(n)`, `I x N`.
    pub waveforms: CMat,
    /// Clutter-plus-noise covariance of the stacked snapshot.
    pub rn_cov: CMat,
    pub sigma_n_sq: f64,
    pub receivers: usize,
    pub grid_deg: Vec<f64>,
    noise_factor: Option<CMat>,
}

impl MeasurementModel {
    pub fn stacked_len(&self) -> usize {
        self.psi.nrows()
    }

    pub fn grid_len(&self) -> usize {
        self.psi.ncols()
    }

    /// Stacked response `b(theta) a^H(theta) s(n)` over all samples.
    pub fn signature(&self, angle_deg: f64) -> Result<CVec> {
        signature(angle_deg, self.receivers, &self.waveforms)
    }

    /// Noise-free part of a snapshot.
    pub fn signal(&self, targets: &[Target]) -> Result<CVec> {
        let lo = self.grid_deg[0];
        let hi = self.grid_deg[self.grid_len() - 1];
        let step = (hi - lo) / (self.grid_len() - 1) as f64;
        let mut x = CVec::zeros(self.stacked_len());
        for t in targets {
            if !(t.angle_deg >= lo - step && t.angle_deg <= hi + step) {
                return Err(Error::invalid(format!(
                    "target angle {} lies outside the grid span [{}, {}] plus one step",
                    t.angle_deg, lo, hi
                )));
            }
            x.axpy(t.amplitude, &self.signature(t.angle_deg)?, C64::new(1.0, 0.0));
        }
        Ok(x)
    }

    /// Lower Cholesky factor of `rn_cov`, or `None` for a noiseless scene.
    pub fn noise_factor(&self) -> Option<&CMat> {
        self.noise_factor.as_ref()
    }

    /// One draw of the clutter-plus-noise term.
    pub fn draw_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> CVec {
        let n = self.stacked_len();
        match &self.noise_factor {
            Some(l) => {
                let w = CVec::from_fn(n, |_, _| complex_normal(rng));
                l * w
            }
            None => CVec::zeros(n),
        }
    }
}

fn signature(angle_deg: f64, receivers: usize, waveforms: &CMat) -> Result<CVec> {
    let b = steering_vector(angle_deg, receivers)?;
    let a = steering_vector(angle_deg, waveforms.nrows())?;
    // a^H s(n) for every sample n
    let gains = waveforms.tr_mul(&a.conjugate()).transpose();
    let n = waveforms.ncols();
    Ok(CVec::from_fn(receivers * n, |row, _| b[row % receivers] * gains[row / receivers]))
}

/// Builds the model with waveforms drawn from the configuration seed.
pub fn build_measurement_model(config: &RadarConfig) -> Result<MeasurementModel> {
    config.validate()?;
    let mut rng = rng::stream(config.seed, "waveforms", 0);
    let waveforms = draw_waveforms(config.transmitters, config.samples, &mut rng);
    build_with_waveforms(config, waveforms)
}

/// Builds the model around caller-supplied waveforms (`I x N`).
pub fn build_with_waveforms(config: &RadarConfig, waveforms: CMat) -> Result<MeasurementModel> {
    config.validate()?;
    if waveforms.nrows() != config.transmitters || waveforms.ncols() != config.samples {
        return Err(Error::dims(format!(
            "waveforms are {}x{}, expected {}x{}",
            waveforms.nrows(),
            waveforms.ncols(),
            config.transmitters,
            config.samples
        )));
    }
    let rn = config.stacked_len();
    let mut psi = CMat::zeros(rn, config.grid_len());
    for (l, &angle) in config.grid_deg.iter().enumerate() {
        psi.set_column(l, &signature(angle, config.receivers, &waveforms)?);
    }
    let clutter_dict = match &config.clutter {
        ClutterModel::Grid => psi.clone(),
        ClutterModel::Patches(angles) => {
            let mut d = CMat::zeros(rn, angles.len());
            for (k, &angle) in angles.iter().enumerate() {
                d.set_column(k, &signature(angle, config.receivers, &waveforms)?);
            }
            d
        }
    };
    let rn_cov = clutter_covariance(config, &clutter_dict);
    let sigma_n_sq = config.noise_variance();
    let noise_factor = if sigma_n_sq > 0.0 {
        Some(HermitianFactor::exact(&rn_cov)?.lower())
    } else {
        None
    };
    Ok(MeasurementModel {
        psi,
        waveforms,
        rn_cov,
        sigma_n_sq,
        receivers: config.receivers,
        grid_deg: config.grid_deg.clone(),
        noise_factor,
    })
}

/// `sigma_c^2 * sum_k c_k c_k^H + sigma_n^2 I`, with `sigma_c^2` set so the
/// clutter-to-noise trace ratio equals `10^(cnr_db/10)`.
///
/// `clutter_dict` holds one stacked signature per clutter direction; with
/// [`ClutterModel::Grid`] it is the measurement dictionary itself.
pub fn clutter_covariance(config: &RadarConfig, clutter_dict: &CMat) -> CMat {
    let rn = clutter_dict.nrows();
    let sigma_n_sq = config.noise_variance();
    let mut cov = CMat::identity(rn, rn) * C64::new(sigma_n_sq, 0.0);
    let cnr = 10f64.powf(config.cnr_db / 10.0);
    let dict_power: f64 = clutter_dict.iter().map(|v| v.norm_sqr()).sum();
    if cnr > 0.0 && dict_power > 0.0 && sigma_n_sq > 0.0 {
        let sigma_c_sq = cnr * sigma_n_sq * rn as f64 / dict_power;
        let gram = clutter_dict * clutter_dict.adjoint();
        cov += gram * C64::new(sigma_c_sq, 0.0);
    }
    hermitize(&mut cov);
    cov
}

/// `x = sum_q alpha_q psi(theta_q) + eps`, `eps ~ CN(0, rn_cov)`.
pub fn synthesize_snapshot<R: Rng + ?Sized>(
    model: &MeasurementModel,
    targets: &[Target],
    rng: &mut R,
) -> Result<CVec> {
    Ok(model.signal(targets)? + model.draw_noise(rng))
}
