//! Sandwich covariance estimators for the exponential and Gaussian criteria.
//!
//! With X1 = ∂ε/√h and X2 = ∂h/h, the exponential-criterion matrices are
//! Σ̂ = (1/n) Σ w (g0·X1X1′ + X2X2′/8) and
//! Ω̂ = (1/n) Σ w² (X1X1′ + (Eη² − 1)/4 · X2X2′),
//! and the sampling covariance is ¼ Σ̂⁻¹ Ω̂ Σ̂⁻¹ / n.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{add_outer, sandwich};
use crate::model::{filter, FilterOutput, ParamVector, SeriesData};

pub(crate) fn scaled_rows(out: &FilterOutput, t: usize, x1: &mut [f64], x2: &mut [f64]) {
    let sh = out.h[t].sqrt();
    for (dst, d) in x1.iter_mut().zip(out.deps_row(t)) {
        *dst = d / sh;
    }
    for (dst, d) in x2.iter_mut().zip(out.dh_row(t)) {
        *dst = d / out.h[t];
    }
}

fn check_weights(data: &SeriesData, weights: &[f64]) -> Result<()> {
    if weights.len() != data.len() {
        return Err(Error::domain(format!(
            "weights have length {} but the series has {}",
            weights.len(),
            data.len()
        )));
    }
    Ok(())
}

fn check_g0_eta2(g0: f64, eta2: f64) -> Result<()> {
    if !(g0 > 0.0 && g0.is_finite()) {
        return Err(Error::domain(format!("g(0) = {g0} must be positive")));
    }
    if !(eta2 >= 1.0 && eta2.is_finite()) {
        return Err(Error::domain(format!("E eta^2 = {eta2} must be at least 1")));
    }
    Ok(())
}

/// Information-type matrix Σ̂ (averaged over t).
pub fn qmele_information(theta: &ParamVector, data: &SeriesData, weights: &[f64], g0: f64) -> Result<DMatrix<f64>> {
    check_weights(data, weights)?;
    check_g0_eta2(g0, 1.0)?;
    let out = filter(theta, data)?;
    Ok(qmele_matrices(&out, weights, g0, 1.0).0)
}

/// Score-variance matrix Ω̂ (averaged over t).
pub fn qmele_score_variance(
    theta: &ParamVector,
    data: &SeriesData,
    weights: &[f64],
    eta2: f64,
) -> Result<DMatrix<f64>> {
    check_weights(data, weights)?;
    check_g0_eta2(1.0, eta2)?;
    let out = filter(theta, data)?;
    Ok(qmele_matrices(&out, weights, 1.0, eta2).1)
}

fn qmele_matrices(out: &FilterOutput, weights: &[f64], g0: f64, eta2: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let m = out.dim();
    let n = out.len();
    let mut sigma = DMatrix::zeros(m, m);
    let mut omega = DMatrix::zeros(m, m);
    let mut x1 = vec![0.0; m];
    let mut x2 = vec![0.0; m];
    for t in 0..n {
        let w = weights[t];
        scaled_rows(out, t, &mut x1, &mut x2);
        add_outer(&mut sigma, &x1, w * g0);
        add_outer(&mut sigma, &x2, w / 8.0);
        add_outer(&mut omega, &x1, w * w);
        add_outer(&mut omega, &x2, w * w * (eta2 - 1.0) / 4.0);
    }
    let scale = 1.0 / n as f64;
    (sigma * scale, omega * scale)
}

/// Sampling covariance of the self-weighted QMELE.
pub fn covariance_self_weighted(
    theta: &ParamVector,
    data: &SeriesData,
    weights: &[f64],
    g0: f64,
    eta2: f64,
) -> Result<DMatrix<f64>> {
    check_weights(data, weights)?;
    check_g0_eta2(g0, eta2)?;
    let out = filter(theta, data)?;
    let (sigma, omega) = qmele_matrices(&out, weights, g0, eta2);
    sandwich(&sigma, &omega, 0.25 / data.len() as f64)
}

/// Sampling covariance of the local (unweighted) QMELE.
pub fn covariance_local(theta: &ParamVector, data: &SeriesData, g0: f64, eta2: f64) -> Result<DMatrix<f64>> {
    covariance_self_weighted(theta, data, &vec![1.0; data.len()], g0, eta2)
}

/// Sampling covariance of the self-weighted Gaussian QMLE.
///
/// `kurtosis_factor` is m₄/m₂² − 1 of the standardized residuals, i.e. Var(η²)
/// for unit-variance innovations.
pub fn covariance_qmle_self_weighted(
    theta: &ParamVector,
    data: &SeriesData,
    weights: &[f64],
    kurtosis_factor: f64,
) -> Result<DMatrix<f64>> {
    check_weights(data, weights)?;
    if !(kurtosis_factor >= 0.0 && kurtosis_factor.is_finite()) {
        return Err(Error::domain(format!("kurtosis factor {kurtosis_factor} must be finite and nonnegative")));
    }
    let out = filter(theta, data)?;
    let m = out.dim();
    let n = out.len();
    let mut hess = DMatrix::zeros(m, m);
    let mut omega = DMatrix::zeros(m, m);
    let mut x1 = vec![0.0; m];
    let mut x2 = vec![0.0; m];
    for t in 0..n {
        let w = weights[t];
        scaled_rows(&out, t, &mut x1, &mut x2);
        add_outer(&mut hess, &x1, 2.0 * w);
        add_outer(&mut hess, &x2, w);
        add_outer(&mut omega, &x1, 4.0 * w * w);
        add_outer(&mut omega, &x2, kurtosis_factor * w * w);
    }
    let scale = 1.0 / n as f64;
    sandwich(&(hess * scale), &(omega * scale), 1.0 / n as f64)
}

/// Sampling covariance of the local (unweighted) Gaussian QMLE.
pub fn covariance_qmle_local(theta: &ParamVector, data: &SeriesData, kurtosis_factor: f64) -> Result<DMatrix<f64>> {
    covariance_qmle_self_weighted(theta, data, &vec![1.0; data.len()], kurtosis_factor)
}
