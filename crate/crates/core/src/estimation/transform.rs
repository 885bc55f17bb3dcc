//! Unconstrained reparameterization used by the simplex search.
//!
//! γ is left as is; α₀ = e^{u₀}; α_i = e^{u_i}; β_j = e^{z_j}/(1 + Σ_k e^{z_k}),
//! which keeps every β_j positive and Σβ_j < 1.

use crate::error::Result;
use crate::model::{ModelOrders, ParamVector};

/// Floor used when mapping a zero ARCH/GARCH coefficient into log space.
const COEFFICIENT_FLOOR: f64 = 1e-6;
/// Transformed coordinates are clamped to this magnitude before exponentiation.
const CLAMP: f64 = 40.0;

pub fn to_unconstrained(theta: &ParamVector) -> Vec<f64> {
    let orders = theta.orders();
    let mut x = theta.gamma().to_vec();
    x.push(theta.alpha0().ln());
    x.extend(theta.alpha().iter().map(|a| a.max(COEFFICIENT_FLOOR).ln()));
    let beta: Vec<f64> = theta.beta().iter().map(|b| b.max(COEFFICIENT_FLOOR)).collect();
    let rest = (1.0 - beta.iter().sum::<f64>()).max(COEFFICIENT_FLOOR);
    x.extend(beta.iter().map(|b| (b / rest).ln()));
    debug_assert_eq!(x.len(), orders.dim());
    x
}

pub fn from_unconstrained(orders: ModelOrders, x: &[f64]) -> Result<ParamVector> {
    let g = orders.gamma_len();
    let mut values = x[..g].to_vec();
    let exp = |v: f64| v.clamp(-CLAMP, CLAMP).exp();
    values.push(exp(x[g]));
    values.extend(x[g + 1..g + 1 + orders.r].iter().map(|v| exp(*v)));
    let z: Vec<f64> = x[g + 1 + orders.r..].iter().map(|v| exp(*v)).collect();
    let denom = 1.0 + z.iter().sum::<f64>();
    values.extend(z.iter().map(|v| v / denom));
    ParamVector::from_flat(orders, values)
}
