//! Residual diagnostics and asymptotic-efficiency comparison.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::FitResult;
use crate::model::{filter_levels, InnovationDist, MixtureMomentConvention, SeriesData, Standardization};

/// η̂_t = ε̃_t / √h̃_t at the fitted parameter.
pub fn standardized_residuals(fit: &FitResult, data: &SeriesData) -> Result<Vec<f64>> {
    if !fit.converged {
        return Err(Error::NonConvergence("residuals requested from a non-converged fit".into()));
    }
    let (eps, h) = filter_levels(&fit.theta_hat, data)?;
    Ok(eps.iter().zip(&h).map(|(e, h)| e / h.sqrt()).collect())
}

/// Sample autocorrelations (or partial autocorrelations) with the white-noise band.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcfReport {
    pub lags: Vec<usize>,
    pub values: Vec<f64>,
    /// Two asymptotic standard errors, 2/√n.
    pub band: f64,
}

impl AcfReport {
    /// Lags ≥ 1 whose value lies outside ±band.
    pub fn exceedances(&self) -> Vec<usize> {
        self.lags
            .iter()
            .zip(&self.values)
            .filter(|(l, v)| **l > 0 && v.abs() > self.band)
            .map(|(l, _)| *l)
            .collect()
    }
}

fn check_acf_input(values: &[f64], max_lag: usize) -> Result<()> {
    if max_lag < 1 || values.len() <= max_lag {
        return Err(Error::domain(format!(
            "max_lag must satisfy 1 <= max_lag < n (got max_lag = {max_lag}, n = {})",
            values.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("series contains non-finite values"));
    }
    Ok(())
}

/// Sample ACF with divisor n at lags 0…max_lag.
pub fn acf(values: &[f64], max_lag: usize) -> Result<AcfReport> {
    check_acf_input(values, max_lag)?;
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let gamma0 = centered.iter().map(|c| c * c).sum::<f64>();
    let scale = centered.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if !(gamma0 > 0.0) || gamma0 <= 1e-28 * scale * scale * n as f64 {
        return Err(Error::DegenerateSample("series has zero variance".into()));
    }
    let mut out = vec![1.0];
    for k in 1..=max_lag {
        let gk: f64 = centered[k..].iter().zip(&centered[..n - k]).map(|(a, b)| a * b).sum();
        out.push(gk / gamma0);
    }
    Ok(AcfReport { lags: (0..=max_lag).collect(), values: out, band: 2.0 / (n as f64).sqrt() })
}

/// Sample PACF via the Durbin–Levinson recursion on the sample ACF; lag 0 is 1 by convention.
pub fn pacf(values: &[f64], max_lag: usize) -> Result<AcfReport> {
    let rho = acf(values, max_lag)?;
    let r = &rho.values;
    let mut out = vec![1.0];
    let mut phi: Vec<f64> = Vec::with_capacity(max_lag);
    let mut v = 1.0;
    for k in 1..=max_lag {
        let num = r[k] - phi.iter().enumerate().map(|(j, p)| p * r[k - 1 - j]).sum::<f64>();
        let a = if v > 0.0 { num / v } else { 0.0 };
        let prev = phi.clone();
        for j in 0..prev.len() {
            phi[j] = prev[j] - a * prev[prev.len() - 1 - j];
        }
        phi.push(a);
        v *= 1.0 - a * a;
        out.push(a);
    }
    Ok(AcfReport { lags: rho.lags, values: out, band: rho.band })
}

/// Estimator with the smaller asymptotic variance factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preferred {
    Qmele,
    Qmle,
    Tie,
}

/// Variance factors of the Gaussian (κ₁) and exponential (κ₂) quasi-likelihoods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyReport {
    /// Eη⁴/(Eη²)² − 1; +∞ when the fourth moment diverges.
    pub kappa1: f64,
    /// 4(Eη² − 1).
    pub kappa2: f64,
    pub eta2: f64,
    /// Eη⁴; +∞ when it diverges (see `eta4_infinite`).
    pub eta4: f64,
    pub eta4_infinite: bool,
    pub preferred: Preferred,
}

/// Compares the estimators under the law `dist` rescaled to E|η| = 1.
///
/// For the normal mixture this uses the published fourth-moment expression;
/// see [`efficiency_compare_with`] for the exact one.
pub fn efficiency_compare(dist: &InnovationDist) -> EfficiencyReport {
    efficiency_compare_with(dist, MixtureMomentConvention::Published)
}

pub fn efficiency_compare_with(dist: &InnovationDist, convention: MixtureMomentConvention) -> EfficiencyReport {
    let d = dist.with_standardization(Standardization::AbsMeanOne);
    let eta2 = d.second_moment();
    let eta4 = d.fourth_moment_with(convention);
    let eta4_infinite = !eta4.is_finite();
    let kappa1 = if eta4_infinite { f64::INFINITY } else { eta4 / (eta2 * eta2) - 1.0 };
    let kappa2 = 4.0 * (eta2 - 1.0);
    let preferred = if eta4_infinite || kappa2 < kappa1 {
        Preferred::Qmele
    } else if kappa1 < kappa2 {
        Preferred::Qmle
    } else {
        Preferred::Tie
    };
    EfficiencyReport {
        kappa1,
        kappa2,
        eta2,
        eta4: if eta4_infinite { f64::INFINITY } else { eta4 },
        eta4_infinite,
        preferred,
    }
}
