//! One-step local estimators started from a √n-consistent initializer.

use nalgebra::{DMatrix, DVector};

use super::covariance::{covariance_local, covariance_qmle_local, scaled_rows};
use super::density::{estimate_eta2, excess_kurtosis_factor, ETA2_FLOOR};
use super::fit::{Criterion, EstimatorKind, FitResult};
use super::objective::objective;
use crate::error::{Error, Result};
use crate::linalg::{add_outer, spd_solve};
use crate::model::{filter, filter_levels, ParamVector, SeriesData};

/// Maximum number of step halvings used to pull an update back into the parameter space.
pub const MAX_STEP_HALVINGS: usize = 30;

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Sign-and-scale score Σ_t [X1·sign(η) + ½ X2 (1 − |η|)].
///
/// Equals n times the gradient of the unweighted exponential objective at
/// points where no residual is exactly zero.
pub fn t_star(theta: &ParamVector, data: &SeriesData) -> Result<Vec<f64>> {
    let out = filter(theta, data)?;
    let m = out.dim();
    let mut total = vec![0.0; m];
    let mut x1 = vec![0.0; m];
    let mut x2 = vec![0.0; m];
    for t in 0..out.len() {
        scaled_rows(&out, t, &mut x1, &mut x2);
        let eta = out.eps[t] / out.h[t].sqrt();
        let (a, b) = (sign(eta), 0.5 * (1.0 - eta.abs()));
        for k in 0..m {
            total[k] += a * x1[k] + b * x2[k];
        }
    }
    Ok(total)
}

/// Σ_t [g0·X1X1′ + X2X2′/8], the curvature matrix of the one-step update.
pub fn sigma_star(theta: &ParamVector, data: &SeriesData, g0: f64) -> Result<DMatrix<f64>> {
    if !(g0 > 0.0 && g0.is_finite()) {
        return Err(Error::domain(format!("g(0) = {g0} must be positive")));
    }
    let out = filter(theta, data)?;
    let m = out.dim();
    let mut acc = DMatrix::zeros(m, m);
    let mut x1 = vec![0.0; m];
    let mut x2 = vec![0.0; m];
    for t in 0..out.len() {
        scaled_rows(&out, t, &mut x1, &mut x2);
        add_outer(&mut acc, &x1, g0);
        add_outer(&mut acc, &x2, 0.125);
    }
    Ok(acc)
}

/// Gaussian score Σ_t [X2 (1 − η²) + 2η X1], n times the QMLE gradient.
pub fn qmle_score_star(theta: &ParamVector, data: &SeriesData) -> Result<Vec<f64>> {
    let out = filter(theta, data)?;
    let m = out.dim();
    let mut total = vec![0.0; m];
    let mut x1 = vec![0.0; m];
    let mut x2 = vec![0.0; m];
    for t in 0..out.len() {
        scaled_rows(&out, t, &mut x1, &mut x2);
        let eta = out.eps[t] / out.h[t].sqrt();
        for k in 0..m {
            total[k] += x2[k] * (1.0 - eta * eta) + 2.0 * eta * x1[k];
        }
    }
    Ok(total)
}

/// Σ_t [2 X1X1′ + X2X2′], the expected Gaussian Hessian summed over t.
pub fn qmle_information_star(theta: &ParamVector, data: &SeriesData) -> Result<DMatrix<f64>> {
    let out = filter(theta, data)?;
    let m = out.dim();
    let mut acc = DMatrix::zeros(m, m);
    let mut x1 = vec![0.0; m];
    let mut x2 = vec![0.0; m];
    for t in 0..out.len() {
        scaled_rows(&out, t, &mut x1, &mut x2);
        add_outer(&mut acc, &x1, 2.0);
        add_outer(&mut acc, &x2, 1.0);
    }
    Ok(acc)
}

/// Moves from `theta` by −step, halving until the result is admissible and filters without overflow.
fn damped_update(theta: &ParamVector, data: &SeriesData, step: &DVector<f64>) -> Result<(ParamVector, usize)> {
    let mut scale = 1.0;
    for halvings in 0..=MAX_STEP_HALVINGS {
        let values: Vec<f64> = theta.as_slice().iter().zip(step.iter()).map(|(v, s)| v - scale * s).collect();
        if let Ok(candidate) = ParamVector::from_flat(theta.orders(), values) {
            if filter_levels(&candidate, data).is_ok() {
                return Ok((candidate, halvings));
            }
        }
        scale *= 0.5;
    }
    Err(Error::NonConvergence(format!(
        "one-step update stayed infeasible after {MAX_STEP_HALVINGS} halvings"
    )))
}

fn standardized(theta: &ParamVector, data: &SeriesData) -> Result<Vec<f64>> {
    let (eps, h) = filter_levels(theta, data)?;
    Ok(eps.iter().zip(&h).map(|(e, h)| e / h.sqrt()).collect())
}

fn require_converged(init: &FitResult) -> Result<()> {
    if init.converged {
        Ok(())
    } else {
        Err(Error::NonConvergence("the initial estimate did not converge".into()))
    }
}

/// One-step local QMELE: θ̂ = θ̃ − (2Σ*)⁻¹T* evaluated at the initializer θ̃.
///
/// Eη² for the covariance comes from the initializer's standardized residuals.
pub fn local_qmele_step(init: &FitResult, data: &SeriesData, g0: f64) -> Result<FitResult> {
    require_converged(init)?;
    let theta0 = &init.theta_hat;
    let score = DVector::from_vec(t_star(theta0, data)?);
    let curvature = sigma_star(theta0, data, g0)? * 2.0;
    let step = spd_solve(&curvature, &score)?;
    let (theta_hat, halvings) = damped_update(theta0, data, &step)?;
    let eta2 = estimate_eta2(&standardized(theta0, data)?)?.max(ETA2_FLOOR);
    let covariance = covariance_local(&theta_hat, data, g0, eta2)?;
    let ones = vec![1.0; data.len()];
    let m = theta_hat.dim();
    let result = FitResult {
        objective_value: objective(Criterion::Qmele, &theta_hat, data, &ones)?,
        covariance: DMatrix::zeros(m, m),
        std_errors: Vec::new(),
        converged: true,
        iterations: 1,
        estimator_kind: EstimatorKind::LocalQmele,
        g0: Some(g0),
        eta2: Some(eta2),
        kurtosis_factor: None,
        step_halvings: halvings,
        n_obs: data.len(),
        theta_hat,
    };
    Ok(result.with_covariance(covariance))
}

/// One-step local Gaussian QMLE (scoring step with the expected Hessian).
pub fn local_qmle_step(init: &FitResult, data: &SeriesData) -> Result<FitResult> {
    require_converged(init)?;
    let theta0 = &init.theta_hat;
    let score = DVector::from_vec(qmle_score_star(theta0, data)?);
    let info = qmle_information_star(theta0, data)?;
    let step = spd_solve(&info, &score)?;
    let (theta_hat, halvings) = damped_update(theta0, data, &step)?;
    let kappa = excess_kurtosis_factor(&standardized(theta0, data)?)?;
    let covariance = covariance_qmle_local(&theta_hat, data, kappa)?;
    let ones = vec![1.0; data.len()];
    let m = theta_hat.dim();
    let result = FitResult {
        objective_value: objective(Criterion::Qmle, &theta_hat, data, &ones)?,
        covariance: DMatrix::zeros(m, m),
        std_errors: Vec::new(),
        converged: true,
        iterations: 1,
        estimator_kind: EstimatorKind::LocalQmle,
        g0: None,
        eta2: None,
        kurtosis_factor: Some(kappa),
        step_halvings: halvings,
        n_obs: data.len(),
        theta_hat,
    };
    Ok(result.with_covariance(covariance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelOrders;

    fn constant_case() -> (ParamVector, SeriesData) {
        let theta = ParamVector::from_flat(ModelOrders::new(0, 0, 0, 0), vec![0.0, 1.0]).unwrap();
        (theta, SeriesData::new(vec![2.0, -2.0]).unwrap())
    }

    #[test]
    fn t_star_hand_values() {
        let (theta, data) = constant_case();
        let t = t_star(&theta, &data).unwrap();
        assert_eq!(t[0], 0.0);
        assert!((t[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn sigma_star_hand_values() {
        let (theta, data) = constant_case();
        let s = sigma_star(&theta, &data, 0.5).unwrap();
        assert!((s[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((s[(1, 1)] - 0.25).abs() < 1e-15);
        assert_eq!(s[(0, 1)], 0.0);
        assert!(sigma_star(&theta, &data, 0.0).is_err());
    }

    #[test]
    fn sigma_star_linear_in_g0() {
        let (theta, data) = constant_case();
        let a = sigma_star(&theta, &data, 0.5).unwrap();
        let b = sigma_star(&theta, &data, 1.0).unwrap();
        assert!(((b - &a)[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_residual_contributes_no_sign() {
        let theta = ParamVector::from_flat(ModelOrders::new(0, 0, 0, 0), vec![1.0, 1.0]).unwrap();
        let data = SeriesData::new(vec![1.0, 2.0, 0.0]).unwrap();
        let t = t_star(&theta, &data).unwrap();
        // residuals 0, 1, −1: signs 0, +1, −1
        assert_eq!(t[0], 0.0);
        assert!((t[1] - 0.5 * (1.0 + 0.0 + 0.0)).abs() < 1e-15);
    }
}
