//! Self-weighting functions w_t of the strict past.
//!
//! All variants share the form
//! w_t = (max{1, C⁻¹ Σ_k k^{−a} |y_{t−k}| I(|y_{t−k}| > C)})^{−4},
//! differing in the exponent `a` and the lag range. Presample observations
//! are zero, so the infinite sums stop at lag t−1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelOrders, SeriesData};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightVariant {
    /// Lags 1…t−1 with exponent 9; suited to E|ε_t| < ∞.
    InfiniteK9,
    /// Lags 1…p+r with exponent 9; pure AR–ARCH models.
    FiniteLag,
    /// Lags 1…t−1 with exponent 1 + 8/ι; for ι ∈ (0, ½) with MA or GARCH terms.
    InfiniteIotaScaled,
    /// w_t ≡ 1 (the unweighted global QMELE).
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub variant: WeightVariant,
    /// Fractional moment parameter ι, used by [`WeightVariant::InfiniteIotaScaled`].
    pub iota: f64,
    /// Quantile level for the threshold C.
    pub c_quantile: f64,
}

impl Default for WeightSpec {
    fn default() -> Self {
        Self { variant: WeightVariant::InfiniteK9, iota: 0.5, c_quantile: 0.90 }
    }
}

impl WeightSpec {
    pub fn unit() -> Self {
        Self { variant: WeightVariant::Unit, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.c_quantile > 0.0 && self.c_quantile < 1.0) {
            return Err(Error::domain(format!("quantile level {} outside (0, 1)", self.c_quantile)));
        }
        if self.variant == WeightVariant::InfiniteIotaScaled && !(self.iota > 0.0 && self.iota.is_finite()) {
            return Err(Error::domain(format!("iota = {} must be positive", self.iota)));
        }
        Ok(())
    }

    fn exponent(&self) -> f64 {
        match self.variant {
            WeightVariant::InfiniteIotaScaled => 1.0 + 8.0 / self.iota,
            _ => 9.0,
        }
    }

    fn max_lag(&self, orders: ModelOrders) -> Option<usize> {
        match self.variant {
            WeightVariant::FiniteLag => Some(orders.p + orders.r),
            _ => None,
        }
    }
}

/// Nearest-rank empirical quantile of |y_t|.
pub fn abs_quantile(values: &[f64], prob: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::domain("quantile of an empty sample"));
    }
    if !(prob > 0.0 && prob <= 1.0) {
        return Err(Error::domain(format!("quantile level {prob} outside (0, 1]")));
    }
    let mut abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let rank = (prob * abs.len() as f64).ceil() as usize;
    Ok(abs[rank.clamp(1, abs.len()) - 1])
}

/// Weights w₁…w_n with zero pre-history.
pub fn compute_weights(data: &SeriesData, spec: &WeightSpec, orders: ModelOrders) -> Result<Vec<f64>> {
    compute_weights_with_history(data, &[], spec, orders, None)
}

/// Weights with an explicit pre-history `history` = (…, y_{−1}, y₀), oldest first.
///
/// `threshold` overrides C; by default C is the `c_quantile` quantile of |y₁|…|y_n|
/// (the pre-history never enters C).
pub fn compute_weights_with_history(
    data: &SeriesData,
    history: &[f64],
    spec: &WeightSpec,
    orders: ModelOrders,
    threshold: Option<f64>,
) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = data.len();
    if spec.variant == WeightVariant::Unit {
        return Ok(vec![1.0; n]);
    }
    let c = match threshold {
        Some(c) => c,
        None => abs_quantile(data.values(), spec.c_quantile)?,
    };
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::domain(format!("weight threshold {c} is invalid")));
    }

    // Full timeline: history followed by the sample; sample index t sits at offset + t.
    let offset = history.len();
    let timeline: Vec<f64> = history.iter().chain(data.values()).copied().collect();
    let exceed: Vec<usize> = timeline
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > c)
        .map(|(i, _)| i)
        .collect();
    if c == 0.0 && !exceed.is_empty() {
        return Err(Error::DegenerateSample(
            "weight threshold C is zero but some observations are nonzero".into(),
        ));
    }

    let a = spec.exponent();
    let max_lag = spec.max_lag(orders);
    let mut weights = Vec::with_capacity(n);
    for t in 0..n {
        let now = offset + t;
        let mut sum = 0.0;
        // Exceedances strictly before `now`, nearest lags first.
        let end = exceed.partition_point(|&i| i < now);
        for &i in exceed[..end].iter().rev() {
            let k = now - i;
            if max_lag.is_some_and(|l| k > l) {
                break;
            }
            sum += (k as f64).powf(-a) * timeline[i].abs();
        }
        let base = f64::max(1.0, sum / c.max(f64::MIN_POSITIVE));
        weights.push(base.powi(-4).max(f64::MIN_POSITIVE));
    }
    Ok(weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orders() -> ModelOrders {
        ModelOrders::new(1, 0, 1, 1)
    }

    #[test]
    fn nearest_rank_quantile() {
        let v: Vec<f64> = (1..=10).map(|i| -(i as f64)).collect();
        assert_eq!(abs_quantile(&v, 0.9).unwrap(), 9.0);
        assert_eq!(abs_quantile(&v, 0.95).unwrap(), 10.0);
        assert_eq!(abs_quantile(&[4.0], 0.9).unwrap(), 4.0);
    }

    #[test]
    fn no_exceedance_gives_unit_weights() {
        let data = SeriesData::new(vec![0.5, -1.0, 0.7, 1.0]).unwrap();
        let w = compute_weights_with_history(&data, &[], &WeightSpec::default(), orders(), Some(1.0)).unwrap();
        assert_eq!(w, vec![1.0; 4]);
    }

    #[test]
    fn single_exceedance_at_lag_one() {
        // y₁ = 2C, everything else below C: w₂ = (max{1, 2})⁻⁴.
        let data = SeriesData::new(vec![2.0, 0.1, 0.1]).unwrap();
        let w = compute_weights_with_history(&data, &[], &WeightSpec::default(), orders(), Some(1.0)).unwrap();
        assert_eq!(w[0], 1.0);
        assert_eq!(w[1], 1.0 / 16.0);
        // Lag two: 2·2⁻⁹ < 1.
        assert_eq!(w[2], 1.0);
    }

    #[test]
    fn finite_lag_window() {
        let data = SeriesData::new(vec![10.0, 0.0, 0.0, 0.0]).unwrap();
        let spec = WeightSpec { variant: WeightVariant::FiniteLag, ..WeightSpec::default() };
        let w = compute_weights_with_history(&data, &[], &spec, orders(), Some(1.0)).unwrap();
        // p + r = 2: the exceedance counts at lags 1 and 2 only.
        assert_eq!(w[1], 1e-4);
        assert_eq!(w[2], 1.0);
        assert_eq!(w[3], 1.0);
    }

    #[test]
    fn iota_scaled_exponent() {
        let data = SeriesData::new(vec![10.0, 0.0, 0.0]).unwrap();
        let spec = WeightSpec { variant: WeightVariant::InfiniteIotaScaled, iota: 8.0, c_quantile: 0.9 };
        let w = compute_weights_with_history(&data, &[], &spec, orders(), Some(1.0)).unwrap();
        // a = 2: lag 2 contributes 10/4 = 2.5.
        assert!((w[2] - 2.5f64.powi(-4)).abs() < 1e-15);
        let bad = WeightSpec { iota: 0.0, ..spec };
        assert!(compute_weights(&data, &bad, orders()).is_err());
    }

    #[test]
    fn history_enters_only_through_lags() {
        let data = SeriesData::new(vec![0.0, 0.0]).unwrap();
        let w = compute_weights_with_history(&data, &[5.0], &WeightSpec::default(), orders(), Some(1.0)).unwrap();
        assert_eq!(w[0], 5f64.powi(-4));
        assert!((w[1] - (5.0 / 512.0f64).max(1.0).powi(-4)).abs() < 1e-15);
    }

    #[test]
    fn first_weight_is_one() {
        let data = SeriesData::new(vec![100.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        let w = compute_weights(&data, &WeightSpec::default(), orders()).unwrap();
        assert_eq!(w[0], 1.0);
    }
}
