//! Capon (MVDR) clutter suppression per angle cell followed by the second
//! compression stage.

use log::warn;

use crate::compression::CompressedModel;
use crate::error::{Error, Result};
use crate::linalg::{hermitize, real_congruence, to_complex, CMat, CVec, HermitianFactor, RMat};

/// Capon weights, one column per angle cell:
/// `w_l = R_C^{-1} lambda_l / (lambda_l^H R_C^{-1} lambda_l)`.
///
/// `rc` is diagonally loaded first when its condition number exceeds
/// [`crate::linalg::COND_LIMIT`].
pub fn capon_weights(rc: &CMat, lambda: &CMat) -> Result<CMat> {
    if rc.nrows() != lambda.nrows() {
        return Err(Error::dims(format!(
            "R_C is {}x{} but Lambda has {} rows",
            rc.nrows(),
            rc.ncols(),
            lambda.nrows()
        )));
    }
    let factor = HermitianFactor::loaded(rc)?;
    let mut w = factor.solve(lambda);
    for l in 0..lambda.ncols() {
        let col = lambda.column(l);
        if col.norm() == 0.0 {
            return Err(Error::DegenerateCell { cell: l });
        }
        let denom = col.dotc(&w.column(l)).re;
        if !denom.is_finite() || denom <= 0.0 {
            return Err(Error::DegenerateCell { cell: l });
        }
        w.column_mut(l).unscale_mut(denom);
    }
    Ok(w)
}

/// Output of clutter suppression and second-stage compression.
#[derive(Clone, Debug)]
pub struct BeamformedModel {
    /// Capon weights `W`, `M1 x L`.
    pub w: CMat,
    /// Dictionary after suppression, `Theta = W^H Lambda`, `L x L`.
    pub theta: CMat,
    /// Residual clutter-plus-noise covariance `R_T = W^H R_C W`.
    pub rt: CMat,
    pub phi2: RMat,
    /// Detector noise covariance `A = Phi2 R_T Phi2^T` before loading.
    pub a_cov: CMat,
    pub z: CVec,
    a_factor: HermitianFactor,
    /// `Phi2 Theta`, `M2 x L`.
    dict: CMat,
    /// `A^{-1} Phi2 Theta`.
    whitened: CMat,
    /// `d_t = theta_t^H Phi2^T A^{-1} Phi2 theta_t`.
    d: Vec<f64>,
}

impl BeamformedModel {
    pub fn m2(&self) -> usize {
        self.phi2.nrows()
    }

    pub fn grid_len(&self) -> usize {
        self.theta.ncols()
    }

    /// Factorization of the (possibly loaded) detector covariance.
    pub fn a_factor(&self) -> &HermitianFactor {
        &self.a_factor
    }

    /// Compressed dictionary `Phi2 Theta`, one column per cell.
    pub fn compressed_dictionary(&self) -> &CMat {
        &self.dict
    }

    /// `A^{-1} Phi2 Theta`; column `t` correlated with `z` gives `e_t`.
    pub fn whitened_dictionary(&self) -> &CMat {
        &self.whitened
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    /// Same model with a different data vector.
    pub fn with_data(&self, z: CVec) -> Result<Self> {
        if z.len() != self.m2() {
            return Err(Error::dims(format!("z has {} entries, expected {}", z.len(), self.m2())));
        }
        Ok(Self { z, ..self.clone() })
    }
}

/// Applies `W`, compresses with `Phi2`, and factors the detector covariance.
pub fn suppress_and_compress(cm: &CompressedModel, w: &CMat, phi2: &RMat) -> Result<BeamformedModel> {
    let (m1, l) = (cm.lambda.nrows(), cm.lambda.ncols());
    if w.nrows() != m1 || w.ncols() != l {
        return Err(Error::dims(format!("W is {}x{}, expected {m1}x{l}", w.nrows(), w.ncols())));
    }
    if phi2.ncols() != l || phi2.nrows() == 0 || phi2.nrows() > l {
        return Err(Error::dims(format!(
            "Phi2 is {}x{}, expected M2 x {l} with 1 <= M2 <= {l}",
            phi2.nrows(),
            phi2.ncols()
        )));
    }
    let m2 = phi2.nrows();
    if m2 > m1 {
        warn!("M2 = {m2} exceeds rank(R_T) <= M1 = {m1}; the detector covariance will be loaded");
    }
    let wh = w.adjoint();
    let y = &wh * &cm.xbar;
    let theta = &wh * &cm.lambda;
    let mut rt = &wh * &cm.rc * w;
    hermitize(&mut rt);
    let phi2_c = to_complex(phi2);
    let z = &phi2_c * y;
    let a_cov = real_congruence(phi2, &rt);
    let a_factor = HermitianFactor::loaded(&a_cov).map_err(|e| {
        Error::Config(format!(
            "detector covariance is singular even after loading ({e}); use a smaller M2 (larger cr2)"
        ))
    })?;
    let dict = &phi2_c * &theta;
    let whitened = a_factor.solve(&dict);
    let d = (0..l).map(|t| dict.column(t).dotc(&whitened.column(t)).re.max(0.0)).collect();
    Ok(BeamformedModel { w: w.clone(), theta, rt, phi2: phi2.clone(), a_cov, z, a_factor, dict, whitened, d })
}

/// Matched-filter weights normalized to the same unit-gain constraint; the
/// reference Capon is compared against.
pub fn matched_weights(lambda: &CMat) -> CMat {
    let mut w = lambda.clone();
    for mut col in w.column_iter_mut() {
        let p = col.norm_squared();
        if p > 0.0 {
            col.unscale_mut(p);
        }
    }
    w
}
