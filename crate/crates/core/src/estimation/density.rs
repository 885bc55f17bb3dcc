use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower bound applied to the Eη² estimate in the score-variance matrix.
pub const ETA2_FLOOR: f64 = 1.0 + 1e-6;

/// How g(0), the innovation density at zero, is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "kebab-case")]
pub enum G0Mode {
    /// Gaussian-kernel density estimate at zero from standardized residuals.
    KernelAtZero,
    /// A known value, e.g. from the simulation design.
    KnownDensity(f64),
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Estimates g(0).
///
/// The kernel estimate uses the rule-of-thumb bandwidth 1.06·σ̂·n^{−1/5} with
/// σ̂ = min(sample SD, IQR/1.349).
pub fn estimate_g0(residuals: &[f64], mode: G0Mode) -> Result<f64> {
    match mode {
        G0Mode::KnownDensity(g0) => {
            if g0 > 0.0 && g0.is_finite() {
                Ok(g0)
            } else {
                Err(Error::domain(format!("g(0) = {g0} must be positive")))
            }
        }
        G0Mode::KernelAtZero => {
            let n = residuals.len();
            if n < 2 {
                return Err(Error::domain("kernel density at zero needs at least 2 residuals"));
            }
            let mean = residuals.iter().sum::<f64>() / n as f64;
            let var = residuals.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let mut sorted = residuals.to_vec();
            sorted.sort_by(f64::total_cmp);
            let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
            let spread = if iqr > 0.0 { var.sqrt().min(iqr / 1.349) } else { var.sqrt() };
            if !(spread > 0.0) {
                return Err(Error::DegenerateSample("residuals have zero spread".into()));
            }
            let bw = 1.06 * spread * (n as f64).powf(-0.2);
            let norm = 1.0 / ((2.0 * PI).sqrt() * bw * n as f64);
            Ok(norm * residuals.iter().map(|r| (-0.5 * (r / bw).powi(2)).exp()).sum::<f64>())
        }
    }
}

/// Mean of squared residuals, the estimate of Eη².
pub fn estimate_eta2(residuals: &[f64]) -> Result<f64> {
    if residuals.is_empty() {
        return Err(Error::domain("Eη² estimate needs at least one residual"));
    }
    Ok(residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64)
}

/// Scale-free fourth-moment factor m₄/m₂² − 1 of the residuals.
pub fn excess_kurtosis_factor(residuals: &[f64]) -> Result<f64> {
    let m2 = estimate_eta2(residuals)?;
    if m2 <= 0.0 {
        return Err(Error::DegenerateSample("residuals are identically zero".into()));
    }
    let m4 = residuals.iter().map(|r| r.powi(4)).sum::<f64>() / residuals.len() as f64;
    Ok(m4 / (m2 * m2) - 1.0)
}
