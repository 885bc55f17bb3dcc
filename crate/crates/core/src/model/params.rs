use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Orders of the ARMA(p, q)–GARCH(r, s) model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelOrders {
    /// AR order.
    pub p: usize,
    /// MA order.
    pub q: usize,
    /// ARCH order.
    pub r: usize,
    /// GARCH order.
    pub s: usize,
}

impl ModelOrders {
    pub const fn new(p: usize, q: usize, r: usize, s: usize) -> Self {
        Self { p, q, r, s }
    }

    /// Length of γ = (μ, φ₁…φ_p, ψ₁…ψ_q).
    pub fn gamma_len(&self) -> usize {
        self.p + self.q + 1
    }

    /// Length of δ = (α₀, α₁…α_r, β₁…β_s).
    pub fn delta_len(&self) -> usize {
        self.r + self.s + 1
    }

    /// Total parameter dimension m = p + q + r + s + 2.
    pub fn dim(&self) -> usize {
        self.gamma_len() + self.delta_len()
    }

    pub fn is_constant(&self) -> bool {
        self.p + self.q + self.r + self.s == 0
    }

    /// Coordinate names in θ order, e.g. `mu, phi1, alpha0, alpha1, beta1`.
    pub fn param_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.dim());
        names.push("mu".to_string());
        names.extend((1..=self.p).map(|i| format!("phi{i}")));
        names.extend((1..=self.q).map(|i| format!("psi{i}")));
        names.push("alpha0".to_string());
        names.extend((1..=self.r).map(|i| format!("alpha{i}")));
        names.extend((1..=self.s).map(|i| format!("beta{i}")));
        names
    }
}

impl std::fmt::Display for ModelOrders {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ARMA({},{})-GARCH({},{})", self.p, self.q, self.r, self.s)
    }
}

/// Parameter vector θ = (γ′, δ′)′ stored flat in θ order.
///
/// Layout: `[μ, φ₁…φ_p, ψ₁…ψ_q, α₀, α₁…α_r, β₁…β_s]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector {
    orders: ModelOrders,
    values: Vec<f64>,
}

impl ParamVector {
    /// Builds θ from its γ and δ blocks and checks the constraints.
    pub fn new(orders: ModelOrders, gamma: &[f64], delta: &[f64]) -> Result<Self> {
        if gamma.len() != orders.gamma_len() || delta.len() != orders.delta_len() {
            return Err(Error::domain(format!(
                "parameter blocks have lengths ({}, {}), expected ({}, {}) for {orders}",
                gamma.len(),
                delta.len(),
                orders.gamma_len(),
                orders.delta_len()
            )));
        }
        let mut values = gamma.to_vec();
        values.extend_from_slice(delta);
        Self::from_flat(orders, values)
    }

    pub fn from_flat(orders: ModelOrders, values: Vec<f64>) -> Result<Self> {
        let theta = Self::from_flat_unchecked(orders, values)?;
        theta.validate()?;
        Ok(theta)
    }

    /// Builds θ checking only its length; used for points that may sit
    /// outside the constraint region (e.g. candidate Newton steps).
    pub fn from_flat_unchecked(orders: ModelOrders, values: Vec<f64>) -> Result<Self> {
        if values.len() != orders.dim() {
            return Err(Error::domain(format!(
                "parameter vector has length {}, expected {} for {orders}",
                values.len(),
                orders.dim()
            )));
        }
        Ok(Self { orders, values })
    }

    /// Checks α₀ > 0, α_i ≥ 0, β_j ≥ 0, Σβ_j < 1 and finiteness.
    pub fn validate(&self) -> Result<()> {
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!("parameter {i} is not finite")));
        }
        if self.alpha0() <= 0.0 {
            return Err(Error::domain(format!("alpha0 = {} must be positive", self.alpha0())));
        }
        if let Some(a) = self.alpha().iter().find(|a| **a < 0.0) {
            return Err(Error::domain(format!("ARCH coefficient {a} is negative")));
        }
        if let Some(b) = self.beta().iter().find(|b| **b < 0.0) {
            return Err(Error::domain(format!("GARCH coefficient {b} is negative")));
        }
        let beta_sum = self.beta_sum();
        if beta_sum >= 1.0 {
            return Err(Error::domain(format!("sum of GARCH coefficients {beta_sum} must be < 1")));
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn orders(&self) -> ModelOrders {
        self.orders
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn gamma(&self) -> &[f64] {
        &self.values[..self.orders.gamma_len()]
    }

    pub fn delta(&self) -> &[f64] {
        &self.values[self.orders.gamma_len()..]
    }

    pub fn mu(&self) -> f64 {
        self.values[0]
    }

    pub fn phi(&self) -> &[f64] {
        &self.values[1..1 + self.orders.p]
    }

    pub fn psi(&self) -> &[f64] {
        let start = 1 + self.orders.p;
        &self.values[start..start + self.orders.q]
    }

    pub fn alpha0(&self) -> f64 {
        self.values[self.orders.gamma_len()]
    }

    /// ARCH coefficients α₁…α_r.
    pub fn alpha(&self) -> &[f64] {
        let start = self.orders.gamma_len() + 1;
        &self.values[start..start + self.orders.r]
    }

    /// GARCH coefficients β₁…β_s.
    pub fn beta(&self) -> &[f64] {
        let start = self.orders.gamma_len() + 1 + self.orders.r;
        &self.values[start..]
    }

    pub fn beta_sum(&self) -> f64 {
        self.beta().iter().sum()
    }

    /// Presample volatility α₀/(1−Σβ_j), the fixed point of the h-recursion under zero innovations.
    pub fn presample_h(&self) -> f64 {
        self.alpha0() / (1.0 - self.beta_sum())
    }

    /// Eη²·Σα_i + Σβ_j; below one means finite variance, one is the IGARCH boundary.
    pub fn persistence(&self, eta2: f64) -> f64 {
        eta2 * self.alpha().iter().sum::<f64>() + self.beta_sum()
    }
}

impl std::ops::Index<usize> for ParamVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_accessors() {
        let o = ModelOrders::new(2, 1, 1, 2);
        let theta = ParamVector::new(o, &[0.1, 0.2, 0.3, 0.4], &[1.0, 0.2, 0.3, 0.1]).unwrap();
        assert_eq!(theta.dim(), 8);
        assert_eq!(theta.mu(), 0.1);
        assert_eq!(theta.phi(), &[0.2, 0.3]);
        assert_eq!(theta.psi(), &[0.4]);
        assert_eq!(theta.alpha0(), 1.0);
        assert_eq!(theta.alpha(), &[0.2]);
        assert_eq!(theta.beta(), &[0.3, 0.1]);
        assert_eq!(o.param_names(), ["mu", "phi1", "phi2", "psi1", "alpha0", "alpha1", "beta1", "beta2"]);
    }

    #[test]
    fn constraint_violations() {
        let o = ModelOrders::new(0, 0, 1, 1);
        assert!(ParamVector::from_flat(o, vec![0.0, 0.0, 0.1, 0.1]).is_err());
        assert!(ParamVector::from_flat(o, vec![0.0, 1.0, -0.1, 0.1]).is_err());
        assert!(ParamVector::from_flat(o, vec![0.0, 1.0, 0.1, 1.0]).is_err());
        assert!(ParamVector::from_flat(o, vec![0.0, 1.0, 0.1]).is_err());
        assert!(ParamVector::from_flat(o, vec![f64::NAN, 1.0, 0.1, 0.1]).is_err());
        // IGARCH-type persistence is allowed; only Σβ < 1 is required.
        assert!(ParamVector::from_flat(o, vec![0.0, 1.0, 0.9, 0.4]).is_ok());
    }
}
