//! Single-target GLRT in the compressed domain and its closed-form
//! performance: threshold, ROC and SNCR.

use std::f64::consts::PI;

use crate::beamformer::BeamformedModel;
use crate::error::{Error, Result};
use crate::linalg::{trace_re, CVec, C64};
use crate::model::{MeasurementModel, RadarConfig};

/// Per-cell sufficient statistics of the likelihood ratio.
#[derive(Clone, Debug, PartialEq)]
pub struct CellStatistics {
    pub d: Vec<f64>,
    pub e: Vec<C64>,
    pub log_lrt: Vec<f64>,
}

/// `ln L(z|t) = |e|^2 s / (d s + 1) - ln(d s + 1)` with `s = sigma_alpha^2`.
pub fn log_likelihood_ratio(d: f64, e: C64, sigma_alpha_sq: f64) -> f64 {
    let g = d * sigma_alpha_sq + 1.0;
    e.norm_sqr() * sigma_alpha_sq / g - g.ln()
}

/// Computes `d_t`, `e_t` and the log likelihood ratio for every cell.
pub fn scan_cells(z: &CVec, bm: &BeamformedModel, sigma_alpha_sq: f64) -> Result<CellStatistics> {
    if z.len() != bm.m2() {
        return Err(Error::dims(format!("z has {} entries, expected {}", z.len(), bm.m2())));
    }
    let e: Vec<C64> = bm.whitened_dictionary().column_iter().map(|col| col.dotc(z)).collect();
    let d = bm.d().to_vec();
    let log_lrt = d.iter().zip(&e).map(|(&d, &e)| log_likelihood_ratio(d, e, sigma_alpha_sq)).collect();
    Ok(CellStatistics { d, e, log_lrt })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectionOutcome {
    pub detected: bool,
    pub t_hat: usize,
    /// `|e_{t_hat}|`.
    pub statistic: f64,
    pub eta: f64,
}

/// `eta = sqrt(-d ln Pfa)`.
pub fn threshold(d: f64, pfa: f64) -> f64 {
    (-d * pfa.ln()).max(0.0).sqrt()
}

fn check_pfa(pfa: f64) -> Result<()> {
    if pfa > 0.0 && pfa <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("false-alarm probability {pfa} is outside (0, 1]")))
    }
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// GLRT: pick the cell maximizing the likelihood ratio, then compare `|e|`
/// against the threshold computed from that cell's `d`.
pub fn detect_single(stats: &CellStatistics, pfa: f64) -> Result<DetectionOutcome> {
    check_pfa(pfa)?;
    if stats.log_lrt.is_empty() {
        return Err(Error::invalid("no cells to scan"));
    }
    let t_hat = argmax(&stats.log_lrt);
    let statistic = stats.e[t_hat].norm();
    let eta = threshold(stats.d[t_hat], pfa);
    Ok(DetectionOutcome { detected: statistic > eta, t_hat, statistic, eta })
}

/// Exact `(ln f(z|H0), ln f(z|H1, t))` with the target amplitude marginalized.
///
/// Computed from a fresh solve against the detector covariance rather than the
/// cached whitened dictionary.
pub fn evaluate_pdfs(z: &CVec, bm: &BeamformedModel, sigma_alpha_sq: f64, t: usize) -> Result<(f64, f64)> {
    let m2 = bm.m2();
    if z.len() != m2 {
        return Err(Error::dims(format!("z has {} entries, expected {m2}", z.len())));
    }
    if t >= bm.grid_len() {
        return Err(Error::invalid(format!("cell {t} out of range")));
    }
    if sigma_alpha_sq < 0.0 {
        return Err(Error::invalid("sigma_alpha_sq must be >= 0"));
    }
    let factor = bm.a_factor();
    let ainv_z = factor.solve_vec(z);
    let quad = z.dotc(&ainv_z).re;
    let log_f0 = -(m2 as f64) * PI.ln() - factor.ln_det() - quad;
    let c = bm.compressed_dictionary().column(t).into_owned();
    let ainv_c = factor.solve_vec(&c);
    let d = c.dotc(&ainv_c).re;
    let e = ainv_c.dotc(z);
    let g = sigma_alpha_sq * d + 1.0;
    let log_f1 = log_f0 - g.ln() + e.norm_sqr() * sigma_alpha_sq / g;
    Ok((log_f0, log_f1))
}

/// `Pd = Pfa^(1 / (1 + d sigma_alpha^2))`.
pub fn theoretical_roc(d: f64, sigma_alpha_sq: f64, pfa: f64) -> f64 {
    pfa.powf(1.0 / (1.0 + d * sigma_alpha_sq))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sncr {
    /// `sigma_alpha^2 R N P / tr(R_N)`.
    pub input: f64,
    /// `2 sigma_alpha^2 d_t`.
    pub output: f64,
    /// `2 (ln Pfa / ln Pd - 1)`; `+inf` at `Pd = 1`.
    pub output_from_roc: f64,
}

/// Output SNCR implied by an operating point on the ROC.
pub fn sncr_from_roc(pfa: f64, pd: f64) -> Result<f64> {
    if !(pfa > 0.0 && pfa < 1.0) || !(pd > 0.0 && pd <= 1.0) || pd < pfa {
        return Err(Error::invalid(format!("need 0 < Pfa <= Pd <= 1 with Pfa < 1, got ({pfa}, {pd})")));
    }
    if pd == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(2.0 * (pfa.ln() / pd.ln() - 1.0))
}

pub fn sncr(
    config: &RadarConfig,
    model: &MeasurementModel,
    stats: &CellStatistics,
    t: usize,
    pfa: f64,
    pd: f64,
) -> Result<Sncr> {
    let d = *stats.d.get(t).ok_or_else(|| Error::invalid(format!("cell {t} out of range")))?;
    let s = config.sigma_alpha_sq;
    let input = s * model.stacked_len() as f64 * config.transmit_power() / trace_re(&model.rn_cov);
    Ok(Sncr { input, output: 2.0 * s * d, output_from_roc: sncr_from_roc(pfa, pd)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamformer::suppress_and_compress;
    use crate::compression::CompressedModel;
    use crate::linalg::{CMat, HermitianFactor, RMat};
    use crate::rng::{complex_normal, stream};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Toy model with W = I so that Theta = Lambda and A = Phi2 R_C Phi2^T.
    pub(crate) fn toy_model(l: usize, m2: usize, seed: u64) -> BeamformedModel {
        let mut rng = stream(seed, "toy", 0);
        let lambda = CMat::from_fn(l, l, |_, _| complex_normal(&mut rng));
        let g = CMat::from_fn(l, l + 3, |_, _| complex_normal(&mut rng));
        let rc = &g * g.adjoint() / c(l as f64, 0.0) + CMat::identity(l, l) * c(0.05, 0.0);
        let cm = CompressedModel { phi1: RMat::identity(l, l), lambda, rc, xbar: CVec::zeros(l) };
        let phi2 = if m2 == l {
            RMat::identity(l, l)
        } else {
            crate::compression::draw_compression_matrix(m2, l, &mut rng).unwrap()
        };
        suppress_and_compress(&cm, &CMat::identity(l, l), &phi2).unwrap()
    }

    #[test]
    fn zero_input_gives_negative_lrt() {
        let bm = toy_model(6, 4, 1);
        let stats = scan_cells(&CVec::zeros(4), &bm, 0.7).unwrap();
        for t in 0..6 {
            assert_eq!(stats.e[t], c(0.0, 0.0));
            let expect = -(stats.d[t] * 0.7 + 1.0).ln();
            assert!((stats.log_lrt[t] - expect).abs() < 1e-15);
            assert!(stats.log_lrt[t] < 0.0);
        }
    }

    #[test]
    fn identity_reduction() {
        let mut rng = stream(2, "id", 0);
        let theta = CMat::from_fn(3, 3, |_, _| complex_normal(&mut rng));
        let cm = CompressedModel {
            phi1: RMat::identity(3, 3),
            lambda: theta.clone(),
            rc: CMat::identity(3, 3),
            xbar: CVec::zeros(3),
        };
        let bm = suppress_and_compress(&cm, &CMat::identity(3, 3), &RMat::identity(3, 3)).unwrap();
        let z = CVec::from_fn(3, |_, _| complex_normal(&mut rng));
        let stats = scan_cells(&z, &bm, 1.0).unwrap();
        for t in 0..3 {
            assert!((stats.d[t] - theta.column(t).norm_squared()).abs() < 1e-12);
            assert!((stats.e[t] - theta.column(t).dotc(&z)).norm() < 1e-12);
        }
    }

    #[test]
    fn matches_explicit_inverse_oracle() {
        let bm = toy_model(6, 6, 3);
        let mut rng = stream(3, "z", 0);
        let z = CVec::from_fn(6, |_, _| complex_normal(&mut rng));
        let stats = scan_cells(&z, &bm, 1.3).unwrap();
        let ainv = bm.a_cov.clone().try_inverse().unwrap();
        let phi2 = crate::linalg::to_complex(&bm.phi2);
        for t in 0..6 {
            let col = &phi2 * bm.theta.column(t);
            let d = (col.adjoint() * &ainv * &col)[(0, 0)];
            let e = (col.adjoint() * &ainv * &z)[(0, 0)];
            assert!((d.re - stats.d[t]).abs() <= 1e-9 * d.re);
            assert!(d.im.abs() <= 1e-10 * d.re);
            assert!((e - stats.e[t]).norm() <= 1e-9 * e.norm().max(1e-300));
        }
    }

    #[test]
    fn threshold_arithmetic() {
        assert_eq!(threshold(3.0, 1.0), 0.0);
        assert!((threshold(1.0, (-1.0f64).exp()) - 1.0).abs() < 1e-15);
        let stats = CellStatistics { d: vec![1.0], e: vec![c(1e-6, 0.0)], log_lrt: vec![0.0] };
        assert!(detect_single(&stats, 1.0).unwrap().detected);
        assert!(detect_single(&stats, 0.0).is_err());
        assert!(detect_single(&stats, 1.5).is_err());
    }

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0, 2.0]), 1);
    }

    #[test]
    fn noiseless_strong_target_is_found() {
        let bm = toy_model(8, 6, 4);
        for t in 0..8 {
            let z = bm.compressed_dictionary().column(t) * c(40.0, 30.0);
            let stats = scan_cells(&z, &bm, 1.0).unwrap();
            // exhaustive evaluation of the likelihood ratio over all cells
            let lrt: Vec<f64> = (0..8)
                .map(|u| {
                    let (f0, f1) = evaluate_pdfs(&z, &bm, 1.0, u).unwrap();
                    f1 - f0
                })
                .collect();
            let out = detect_single(&stats, 1e-3).unwrap();
            assert_eq!(out.t_hat, argmax(&lrt));
            assert_eq!(out.t_hat, t);
            assert!(out.detected);
        }
    }

    #[test]
    fn zero_power_target_collapses_h1_to_h0() {
        let bm = toy_model(5, 4, 5);
        let mut rng = stream(5, "z", 0);
        let z = CVec::from_fn(4, |_, _| complex_normal(&mut rng));
        for t in 0..5 {
            let (f0, f1) = evaluate_pdfs(&z, &bm, 0.0, t).unwrap();
            assert_eq!(f0, f1);
        }
    }

    #[test]
    fn h1_density_equals_rank_one_gaussian() {
        // z | H1, t ~ CN(0, A + s c c^H)
        let bm = toy_model(6, 5, 6);
        let mut rng = stream(6, "z", 0);
        let s = 0.8;
        for t in 0..6 {
            let z = CVec::from_fn(5, |_, _| complex_normal(&mut rng));
            let cvec = bm.compressed_dictionary().column(t).into_owned();
            let cov = &bm.a_cov + &cvec * cvec.adjoint() * c(s, 0.0);
            let f = HermitianFactor::exact(&cov).unwrap();
            let expect = -5.0 * PI.ln() - f.ln_det() - z.dotc(&f.solve_vec(&z)).re;
            let (_, f1) = evaluate_pdfs(&z, &bm, s, t).unwrap();
            assert!((f1 - expect).abs() < 1e-9 * expect.abs());
        }
    }

    #[test]
    fn roc_arithmetic() {
        assert_eq!(theoretical_roc(5.0, 0.0, 0.2), 0.2);
        assert!((theoretical_roc(1.0, 1.0, 0.25) - 0.5).abs() < 1e-15);
        assert!((theoretical_roc(9.0, 1.0, 0.1) - 0.794_328_234_724_281_5).abs() < 1e-12);
    }

    #[test]
    fn sncr_arithmetic() {
        assert!((sncr_from_roc(0.01, 0.1).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(sncr_from_roc(0.3, 0.3).unwrap(), 0.0);
        assert_eq!(sncr_from_roc(0.3, 1.0).unwrap(), f64::INFINITY);
        let pd = theoretical_roc(3.0, 1.0, 0.1);
        assert!((sncr_from_roc(0.1, pd).unwrap() - 6.0).abs() < 1e-9);
        assert!(sncr_from_roc(0.3, 0.2).is_err());
    }

    proptest::proptest! {
        #[test]
        fn roc_is_monotone(d in 0.0..50.0f64, s in 0.0..5.0f64, pfa in 1e-6..0.999f64, dd in 0.0..5.0f64) {
            let base = theoretical_roc(d, s, pfa);
            proptest::prop_assert!(theoretical_roc(d + dd, s, pfa) >= base);
            proptest::prop_assert!(theoretical_roc(d, s + dd, pfa) >= base);
            proptest::prop_assert!(base >= pfa && base <= 1.0);
        }

        #[test]
        fn lrt_identity_holds(seed in 0u64..200, t in 0usize..8, s in 0.05..4.0f64) {
            let bm = toy_model(8, 6, 100 + seed % 7);
            let mut rng = stream(seed, "lrt", 0);
            let z = CVec::from_fn(6, |_, _| complex_normal(&mut rng) * c(3.0, 0.0));
            let stats = scan_cells(&z, &bm, s).unwrap();
            let (f0, f1) = evaluate_pdfs(&z, &bm, s, t).unwrap();
            let lrt = stats.log_lrt[t];
            proptest::prop_assert!(((f1 - f0) - lrt).abs() <= 1e-9 * lrt.abs().max(1.0));
        }
    }
}
