//! Dense complex linear algebra shared by the pipeline stages.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;

/// Condition number above which a Hermitian matrix gets diagonal loading.
pub const COND_LIMIT: f64 = 1e12;
/// Loading level relative to the mean diagonal power.
pub const LOADING_FACTOR: f64 = 1e-8;

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|v| C64::new(v, 0.0))
}

/// `Phi * H * Phi^T` for real `Phi`, with the result forced exactly Hermitian.
pub fn real_congruence(phi: &RMat, h: &CMat) -> CMat {
    let phi_c = to_complex(phi);
    let mut out = &phi_c * h * phi_c.transpose();
    hermitize(&mut out);
    out
}

/// Replaces `m` by `(m + m^H) / 2`.
pub fn hermitize(m: &mut CMat) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Ratio of extreme eigenvalues; infinite when the matrix is not PD.
pub fn condition_number(m: &CMat) -> f64 {
    let ev = hermitian_eigenvalues(m);
    match (ev.first(), ev.last()) {
        (Some(&lo), Some(&hi)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.norm()))
}

pub fn trace_re(m: &CMat) -> f64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)].re).sum()
}

/// Cholesky factorization of a Hermitian positive definite matrix, optionally
/// after diagonal loading.
#[derive(Clone, Debug)]
pub struct HermitianFactor {
    chol: Cholesky<C64, Dyn>,
    loading: f64,
}

impl HermitianFactor {
    /// Factors `m` as given.
    pub fn exact(m: &CMat) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::dims(format!(
                "cannot factor a {}x{} matrix",
                m.nrows(),
                m.ncols()
            )));
        }
        let chol = Cholesky::new(m.clone())
            .ok_or_else(|| Error::Factorization("matrix is not positive definite".into()))?;
        Ok(Self { chol, loading: 0.0 })
    }

    /// Factors `m`, first adding `LOADING_FACTOR * trace/dim` to the diagonal
    /// when its condition number exceeds `COND_LIMIT`.
    pub fn loaded(m: &CMat) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::dims(format!(
                "cannot factor a {}x{} matrix",
                m.nrows(),
                m.ncols()
            )));
        }
        let cond = condition_number(m);
        if cond <= COND_LIMIT {
            if let Ok(f) = Self::exact(m) {
                return Ok(f);
            }
        }
        let n = m.nrows();
        let loading = LOADING_FACTOR * trace_re(m).abs() / n as f64;
        if loading <= 0.0 || !loading.is_finite() {
            return Err(Error::Factorization("matrix has no power to load against".into()));
        }
        let mut loaded = m.clone();
        for i in 0..n {
            loaded[(i, i)] += C64::new(loading, 0.0);
        }
        let chol = Cholesky::new(loaded).ok_or_else(|| {
            Error::Factorization("matrix is not positive definite after loading".into())
        })?;
        Ok(Self { chol, loading })
    }

    pub fn dim(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    /// Diagonal loading that was applied (zero if none).
    pub fn loading(&self) -> f64 {
        self.loading
    }

    pub fn solve(&self, b: &CMat) -> CMat {
        self.chol.solve(b)
    }

    pub fn solve_vec(&self, b: &CVec) -> CVec {
        self.chol.solve(b)
    }

    /// `L^-1 b`, which maps `CN(0, M)` noise to white noise.
    pub fn whiten(&self, b: &CMat) -> CMat {
        self.chol
            .l_dirty()
            .solve_lower_triangular(b)
            .expect("Cholesky factor has a positive diagonal")
    }

    pub fn whiten_vec(&self, b: &CVec) -> CVec {
        self.chol
            .l_dirty()
            .solve_lower_triangular(b)
            .expect("Cholesky factor has a positive diagonal")
    }

    /// Lower-triangular factor `L` with `L L^H` equal to the (loaded) matrix.
    pub fn lower(&self) -> CMat {
        self.chol.l()
    }

    /// Natural log of the determinant of the (loaded) matrix.
    pub fn ln_det(&self) -> f64 {
        let l = self.chol.l_dirty();
        2.0 * (0..l.nrows()).map(|i| l[(i, i)].re.ln()).sum::<f64>()
    }
}

/// Least-squares solution `G^+ b` through the SVD, treating singular values
/// below `rel_tol * sigma_max` as zero. Returns the solution and the rank used.
pub fn least_squares(g: &CMat, b: &CVec, rel_tol: f64) -> (CVec, usize) {
    let svd = g.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0_f64, |a, &s| a.max(s));
    let eps = rel_tol * smax;
    let rank = svd.singular_values.iter().filter(|&&s| s > eps).count();
    let x = svd
        .solve(b, eps.max(f64::MIN_POSITIVE))
        .unwrap_or_else(|_| CVec::zeros(g.ncols()));
    (x, rank)
}
