use super::{ParamVector, SeriesData};
use crate::error::{Error, Result};

/// Filtering aborts once a conditional variance exceeds this bound.
pub const H_OVERFLOW_LIMIT: f64 = 1e300;

/// Residuals, volatilities and their first derivatives with respect to θ.
///
/// Derivative matrices are n×m, row-major: row t holds ∂ε̃_t/∂θ′ (or ∂h̃_t/∂θ′).
#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutput {
    pub eps: Vec<f64>,
    pub h: Vec<f64>,
    pub deps: Vec<f64>,
    pub dh: Vec<f64>,
    dim: usize,
}

impl FilterOutput {
    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }

    /// Parameter dimension m.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// ∂ε̃_t/∂θ for 0-based `t`.
    pub fn deps_row(&self, t: usize) -> &[f64] {
        &self.deps[t * self.dim..(t + 1) * self.dim]
    }

    /// ∂h̃_t/∂θ for 0-based `t`.
    pub fn dh_row(&self, t: usize) -> &[f64] {
        &self.dh[t * self.dim..(t + 1) * self.dim]
    }

    /// Standardized residuals η_t(θ) = ε̃_t/√h̃_t.
    pub fn eta(&self) -> Vec<f64> {
        self.eps.iter().zip(&self.h).map(|(e, h)| e / h.sqrt()).collect()
    }
}

fn check(value: f64, quantity: &'static str, t: usize) -> Result<()> {
    if value.is_finite() && value.abs() <= H_OVERFLOW_LIMIT {
        Ok(())
    } else {
        Err(Error::NumericOverflow { quantity, t: t + 1 })
    }
}

/// Residual and volatility recursions without derivatives.
///
/// Presample y and ε are zero; presample h is α₀/(1−Σβ_j).
pub fn filter_levels(theta: &ParamVector, data: &SeriesData) -> Result<(Vec<f64>, Vec<f64>)> {
    theta.validate()?;
    let y = data.values();
    let n = y.len();
    let (mu, phi, psi) = (theta.mu(), theta.phi(), theta.psi());
    let (alpha0, alpha, beta) = (theta.alpha0(), theta.alpha(), theta.beta());
    let h_pre = theta.presample_h();

    let mut eps = vec![0.0; n];
    let mut h = vec![0.0; n];
    for t in 0..n {
        let mut e = y[t] - mu;
        for (i, p) in phi.iter().enumerate() {
            if t > i {
                e -= p * y[t - i - 1];
            }
        }
        for (j, m) in psi.iter().enumerate() {
            if t > j {
                e -= m * eps[t - j - 1];
            }
        }
        check(e, "residual", t)?;
        eps[t] = e;

        let mut v = alpha0;
        for (i, a) in alpha.iter().enumerate() {
            if t > i {
                v += a * eps[t - i - 1] * eps[t - i - 1];
            }
        }
        for (j, b) in beta.iter().enumerate() {
            v += b * if t > j { h[t - j - 1] } else { h_pre };
        }
        check(v, "volatility", t)?;
        h[t] = v;
    }
    Ok((eps, h))
}

/// Full filter: residuals, volatilities and analytic first derivatives.
pub fn filter(theta: &ParamVector, data: &SeriesData) -> Result<FilterOutput> {
    let (eps, h) = filter_levels(theta, data)?;
    let orders = theta.orders();
    let y = data.values();
    let n = y.len();
    let m = orders.dim();
    let g = orders.gamma_len();
    let (p, q, r) = (orders.p, orders.q, orders.r);
    let (psi, alpha, beta) = (theta.psi(), theta.alpha(), theta.beta());

    let one_minus_b = 1.0 - theta.beta_sum();
    let h_pre = theta.presample_h();
    // Derivative of the presample constant α₀/(1−Σβ); zero in γ and α_i.
    let mut dh_pre = vec![0.0; m];
    dh_pre[g] = 1.0 / one_minus_b;
    for j in 0..orders.s {
        dh_pre[g + 1 + r + j] = h_pre / one_minus_b;
    }

    let mut deps = vec![0.0; n * m];
    let mut dh = vec![0.0; n * m];
    for t in 0..n {
        let row = t * m;
        // ∂ε_t/∂γ: direct term minus the MA feedback.
        deps[row] = -1.0;
        for i in 0..p {
            if t > i {
                deps[row + 1 + i] = -y[t - i - 1];
            }
        }
        for i in 0..q {
            if t > i {
                deps[row + 1 + p + i] = -eps[t - i - 1];
            }
        }
        for (j, m_j) in psi.iter().enumerate() {
            if t > j {
                let prev = (t - j - 1) * m;
                for k in 0..g {
                    deps[row + k] -= m_j * deps[prev + k];
                }
            }
        }

        // ∂h_t/∂θ: direct terms, ARCH feedback through ε, GARCH feedback through h.
        dh[row + g] = 1.0;
        for i in 0..r {
            if t > i {
                let e = eps[t - i - 1];
                dh[row + g + 1 + i] = e * e;
                let prev = (t - i - 1) * m;
                let c = 2.0 * alpha[i] * e;
                for k in 0..g {
                    dh[row + k] += c * deps[prev + k];
                }
            }
        }
        let (past, current) = dh.split_at_mut(row);
        let current = &mut current[..m];
        for (j, b) in beta.iter().enumerate() {
            let (h_lag, dh_lag) = if t > j {
                let prev = (t - j - 1) * m;
                (h[t - j - 1], &past[prev..prev + m])
            } else {
                (h_pre, dh_pre.as_slice())
            };
            current[g + 1 + r + j] += h_lag;
            for (c, d) in current.iter_mut().zip(dh_lag) {
                *c += b * d;
            }
        }
        for k in 0..m {
            check(deps[row + k], "residual derivative", t)?;
            check(dh[row + k], "volatility derivative", t)?;
        }
    }
    Ok(FilterOutput { eps, h, deps, dh, dim: m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelOrders;

    #[test]
    fn constant_model_collapses() {
        let theta = ParamVector::from_flat(ModelOrders::new(0, 0, 0, 0), vec![0.0, 1.0]).unwrap();
        let data = SeriesData::new(vec![3.0, -2.0]).unwrap();
        let out = filter(&theta, &data).unwrap();
        assert_eq!(out.eps, vec![3.0, -2.0]);
        assert_eq!(out.h, vec![1.0, 1.0]);
        assert_eq!(out.deps_row(0), &[-1.0, 0.0]);
        assert_eq!(out.dh_row(1), &[0.0, 1.0]);
    }

    #[test]
    fn hand_recursion_ar1_garch11() {
        let theta =
            ParamVector::from_flat(ModelOrders::new(1, 0, 1, 1), vec![0.0, 0.5, 1.0, 0.2, 0.3]).unwrap();
        let data = SeriesData::new(vec![1.0, 2.0]).unwrap();
        let out = filter(&theta, &data).unwrap();
        assert_eq!(out.eps, vec![1.0, 1.5]);
        let h_pre = 1.0 / 0.7;
        let h1 = 1.0 + 0.3 * h_pre;
        let h2 = 1.0 + 0.2 + 0.3 * h1;
        assert!((out.h[0] - h1).abs() < 1e-15 && (h1 - 1.428571).abs() < 1e-6);
        assert!((out.h[1] - h2).abs() < 1e-15 && (h2 - 1.628571).abs() < 1e-6);
    }

    #[test]
    fn zero_input_converges_to_fixed_point() {
        let theta =
            ParamVector::from_flat(ModelOrders::new(1, 1, 1, 1), vec![0.0, 0.3, 0.2, 0.5, 0.2, 0.6]).unwrap();
        let data = SeriesData::new(vec![0.0; 50]).unwrap();
        let out = filter(&theta, &data).unwrap();
        assert!(out.eps.iter().all(|e| *e == 0.0));
        let fixed = 0.5 / 0.4;
        assert!(out.h.iter().all(|h| (h - fixed).abs() < 1e-12));
    }

    #[test]
    fn explosive_path_reports_time() {
        let theta = ParamVector::from_flat(ModelOrders::new(0, 0, 1, 0), vec![0.0, 1.0, 1e200]).unwrap();
        let data = SeriesData::new(vec![1e60; 5]).unwrap();
        match filter_levels(&theta, &data) {
            Err(Error::NumericOverflow { t, .. }) => assert_eq!(t, 2),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn invalid_theta_is_domain_error() {
        let theta = ParamVector::from_flat_unchecked(ModelOrders::new(0, 0, 0, 0), vec![0.0, -1.0]).unwrap();
        let data = SeriesData::new(vec![1.0]).unwrap();
        assert!(matches!(filter(&theta, &data), Err(Error::Domain(_))));
    }
}
