use crate::error::{Error, Result};

/// Observed series y₁…y_n. Presample values y_i, ε_i for i ≤ 0 are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesData {
    values: Vec<f64>,
}

impl SeriesData {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("series is empty"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("observation {} is not finite", i + 1)));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }
}

impl AsRef<[f64]> for SeriesData {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// 100 times the log-return: y_t = 100·(log p_t − log p_{t−1}).
pub fn log_return_transform(prices: &[f64]) -> Result<SeriesData> {
    if prices.len() < 2 {
        return Err(Error::domain(format!("need at least 2 prices, got {}", prices.len())));
    }
    if let Some(i) = prices.iter().position(|p| !(*p > 0.0) || !p.is_finite()) {
        return Err(Error::domain(format!("price {} = {} is not strictly positive", i + 1, prices[i])));
    }
    let returns = prices.windows(2).map(|w| 100.0 * (w[1].ln() - w[0].ln())).collect();
    SeriesData::new(returns)
}
