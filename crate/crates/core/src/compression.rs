//! Random Gaussian compression and the first-stage compressed model.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{real_congruence, to_complex, CMat, CVec, RMat};
use crate::model::MeasurementModel;

/// `rows x cols` matrix of i.i.d. `N(0, 1)` entries.
pub fn draw_compression_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Result<RMat> {
    if rows == 0 || rows > cols {
        return Err(Error::invalid(format!(
            "compression must map {cols} samples to between 1 and {cols} measurements, got {rows}"
        )));
    }
    // column-major fill order is part of the reproducibility contract
    Ok(RMat::from_fn(rows, cols, |_, _| rng.sample(StandardNormal)))
}

/// First-stage compressed model: `xbar = Phi1 x`, `Lambda = Phi1 Psi`,
/// `R_C = Phi1 R_N Phi1^T`.
#[derive(Clone, Debug)]
pub struct CompressedModel {
    pub phi1: RMat,
    pub lambda: CMat,
    pub rc: CMat,
    pub xbar: CVec,
}

impl CompressedModel {
    pub fn m1(&self) -> usize {
        self.phi1.nrows()
    }

    /// Replaces the compressed snapshot, keeping the model matrices.
    pub fn with_snapshot(&self, x: &CVec) -> Result<Self> {
        if x.len() != self.phi1.ncols() {
            return Err(Error::dims(format!(
                "snapshot has {} samples, compression expects {}",
                x.len(),
                self.phi1.ncols()
            )));
        }
        Ok(Self { xbar: to_complex(&self.phi1) * x, ..self.clone() })
    }
}

pub fn compress_stage1(model: &MeasurementModel, x: &CVec, phi1: &RMat) -> Result<CompressedModel> {
    let rn = model.stacked_len();
    if phi1.ncols() != rn {
        return Err(Error::dims(format!(
            "Phi1 has {} columns but the stacked snapshot has {rn} samples",
            phi1.ncols()
        )));
    }
    if x.len() != rn {
        return Err(Error::dims(format!("snapshot has {} samples, expected {rn}", x.len())));
    }
    let phi_c = to_complex(phi1);
    Ok(CompressedModel {
        phi1: phi1.clone(),
        lambda: &phi_c * &model.psi,
        rc: real_congruence(phi1, &model.rn_cov),
        xbar: &phi_c * x,
    })
}
