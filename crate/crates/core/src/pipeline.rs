//! A scenario with all static matrices built once, and a fast per-trial path
//! from target scene to the detector's data vector.

use rand::Rng;

use crate::beamformer::{capon_weights, suppress_and_compress, BeamformedModel};
use crate::compression::{compress_stage1, draw_compression_matrix, CompressedModel};
use crate::error::{Error, Result};
use crate::linalg::{to_complex, CMat, CVec, RMat};
use crate::model::{build_measurement_model, MeasurementModel, RadarConfig, Target};
use crate::rng::{self, complex_normal};

/// Static part of one simulated scenario. Compression matrices are drawn once
/// from the configuration seed and shared by every trial.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: RadarConfig,
    pub model: MeasurementModel,
    pub compressed: CompressedModel,
    pub beamformed: BeamformedModel,
    /// `Phi2 W^H Phi1`, maps a stacked snapshot to `z`.
    transfer: CMat,
    /// `transfer * chol(R_N)`, maps white noise to the noise part of `z`.
    colored: Option<CMat>,
}

impl Scenario {
    pub fn build(config: &RadarConfig) -> Result<Self> {
        let model = build_measurement_model(config)?;
        let phi1 = draw_compression_matrix(config.m1(), config.stacked_len(), &mut rng::stream(config.seed, "phi1", 0))?;
        let phi2 = draw_compression_matrix(config.m2(), config.grid_len(), &mut rng::stream(config.seed, "phi2", 0))?;
        Self::from_parts(config, model, &phi1, &phi2)
    }

    pub fn from_parts(config: &RadarConfig, model: MeasurementModel, phi1: &RMat, phi2: &RMat) -> Result<Self> {
        let compressed = compress_stage1(&model, &CVec::zeros(model.stacked_len()), phi1)?;
        let w = capon_weights(&compressed.rc, &compressed.lambda)?;
        Self::assemble(config.clone(), model, compressed, &w, phi2)
    }

    /// Same scene, first compression and Capon weights; new second compression.
    pub fn with_phi2(&self, phi2: &RMat) -> Result<Self> {
        let mut config = self.config.clone();
        config.cr2 = self.config.grid_len() as f64 / phi2.nrows() as f64;
        Self::assemble(config, self.model.clone(), self.compressed.clone(), &self.beamformed.w, phi2)
    }

    fn assemble(
        config: RadarConfig,
        model: MeasurementModel,
        compressed: CompressedModel,
        w: &CMat,
        phi2: &RMat,
    ) -> Result<Self> {
        let beamformed = suppress_and_compress(&compressed, w, phi2)?;
        let transfer = to_complex(phi2) * w.adjoint() * to_complex(&compressed.phi1);
        let colored = model.noise_factor().map(|l| &transfer * l);
        Ok(Self { config, model, compressed, beamformed, transfer, colored })
    }

    pub fn grid_len(&self) -> usize {
        self.config.grid_len()
    }

    /// Noise-free data vector for the given targets.
    pub fn observe_noiseless(&self, targets: &[Target]) -> Result<CVec> {
        Ok(&self.transfer * self.model.signal(targets)?)
    }

    /// Noise (clutter plus thermal) part of `z`.
    pub fn draw_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> CVec {
        match &self.colored {
            Some(c) => {
                let w = CVec::from_fn(c.ncols(), |_, _| complex_normal(rng));
                c * w
            }
            None => CVec::zeros(self.beamformed.m2()),
        }
    }

    /// Full data vector: signal plus a fresh noise draw.
    pub fn observe<R: Rng + ?Sized>(&self, targets: &[Target], rng: &mut R) -> Result<CVec> {
        Ok(self.observe_noiseless(targets)? + self.draw_noise(rng))
    }

    /// Runs a stacked snapshot through every stage function explicitly. Slower
    /// than [`Scenario::observe`]; used to cross-check the fast path.
    pub fn process_snapshot(&self, x: &CVec) -> Result<BeamformedModel> {
        if x.len() != self.model.stacked_len() {
            return Err(Error::dims("snapshot length does not match the scenario"));
        }
        let cm = compress_stage1(&self.model, x, &self.compressed.phi1)?;
        suppress_and_compress(&cm, &self.beamformed.w, &self.beamformed.phi2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::model::synthesize_snapshot;

    #[test]
    fn fast_path_matches_stage_functions() {
        let config = RadarConfig { snr_db: 5.0, ..RadarConfig::default() };
        let sc = Scenario::build(&config).unwrap();
        let targets = [Target { angle_deg: 13.4, amplitude: C64::new(0.4, -0.9) }];
        let z_fast = sc.observe(&targets, &mut rng::stream(1, "p", 0)).unwrap();
        let x = synthesize_snapshot(&sc.model, &targets, &mut rng::stream(1, "p", 0)).unwrap();
        let z_slow = sc.process_snapshot(&x).unwrap().z;
        assert!((&z_fast - &z_slow).norm() <= 1e-9 * z_slow.norm());
    }

    #[test]
    fn on_grid_signal_is_dictionary_column() {
        let sc = Scenario::build(&RadarConfig::default()).unwrap();
        let alpha = C64::new(1.5, 0.5);
        let z = sc.observe_noiseless(&[Target { angle_deg: 20.0, amplitude: alpha }]).unwrap();
        let expect = sc.beamformed.compressed_dictionary().column(35) * alpha;
        assert!((z - &expect).norm() <= 1e-9 * expect.norm());
    }
}
