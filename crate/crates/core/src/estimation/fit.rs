use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::covariance::{covariance_qmle_self_weighted, covariance_self_weighted};
use super::density::{estimate_eta2, estimate_g0, excess_kurtosis_factor, G0Mode, ETA2_FLOOR};
use super::nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadResult};
use super::objective::objective;
use super::transform::{from_unconstrained, to_unconstrained};
use crate::error::{Error, Result};
use crate::linalg::ols;
use crate::model::{filter_levels, ModelOrders, ParamVector, SeriesData};
use crate::weights::{compute_weights, WeightSpec};

/// Per-observation loss being minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// Exponential (Laplace) quasi-likelihood.
    Qmele,
    /// Gaussian quasi-likelihood.
    Qmle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EstimatorKind {
    #[serde(rename = "sw-qmele")]
    SelfWeightedQmele,
    #[serde(rename = "local-qmele")]
    LocalQmele,
    #[serde(rename = "sw-qmle")]
    SelfWeightedQmle,
    #[serde(rename = "local-qmle")]
    LocalQmle,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 4] = [
        EstimatorKind::SelfWeightedQmele,
        EstimatorKind::LocalQmele,
        EstimatorKind::SelfWeightedQmle,
        EstimatorKind::LocalQmle,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            EstimatorKind::SelfWeightedQmele => "sw-qmele",
            EstimatorKind::LocalQmele => "local-qmele",
            EstimatorKind::SelfWeightedQmle => "sw-qmle",
            EstimatorKind::LocalQmle => "local-qmle",
        }
    }

    pub fn criterion(&self) -> Criterion {
        match self {
            EstimatorKind::SelfWeightedQmele | EstimatorKind::LocalQmele => Criterion::Qmele,
            EstimatorKind::SelfWeightedQmle | EstimatorKind::LocalQmle => Criterion::Qmle,
        }
    }

    pub fn is_local(&self) -> bool {
        matches!(self, EstimatorKind::LocalQmele | EstimatorKind::LocalQmle)
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::domain(format!("unknown estimator `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Iteration budget of each simplex run.
    pub max_iter: usize,
    /// Perturbed restarts in addition to the run from the initializer.
    pub restarts: usize,
    pub simplex_tolerance: f64,
    /// Search on log/logistic-transformed coordinates; otherwise on θ directly.
    pub parameter_transform: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { max_iter: 5000, restarts: 5, simplex_tolerance: 1e-10, parameter_transform: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub weight_spec: WeightSpec,
    pub optimizer: OptimizerConfig,
    pub g0_mode: G0Mode,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            weight_spec: WeightSpec::default(),
            optimizer: OptimizerConfig::default(),
            g0_mode: G0Mode::KernelAtZero,
            seed: 0,
        }
    }
}

/// An estimate with its estimated sampling covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub theta_hat: ParamVector,
    pub objective_value: f64,
    /// Estimated sampling covariance of θ̂ (already divided by n).
    pub covariance: DMatrix<f64>,
    pub std_errors: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub estimator_kind: EstimatorKind,
    /// g(0) used in the information matrix (QMELE family).
    pub g0: Option<f64>,
    /// Eη² used in the score variance (QMELE family, floored).
    pub eta2: Option<f64>,
    /// m₄/m₂² − 1 of the residuals (QMLE family).
    pub kurtosis_factor: Option<f64>,
    /// Step halvings applied by a local one-step update.
    pub step_halvings: usize,
    pub n_obs: usize,
}

impl FitResult {
    pub(crate) fn with_covariance(mut self, covariance: DMatrix<f64>) -> Self {
        self.std_errors = (0..covariance.nrows()).map(|i| covariance[(i, i)].max(0.0).sqrt()).collect();
        self.covariance = covariance;
        self
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn std_dev(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

/// Scales Σ|c| into the open unit ball so the AR/MA polynomial stays well inside the stationary region.
fn shrink_polynomial(coefs: &mut [f64]) {
    let total: f64 = coefs.iter().map(|c| c.abs()).sum();
    if total >= 0.95 {
        coefs.iter_mut().for_each(|c| *c *= 0.9 / total);
    }
}

fn lagged_design(y: &[f64], resid: &[f64], p: usize, q: usize, start: usize) -> (DMatrix<f64>, DVector<f64>) {
    let rows = y.len() - start;
    let cols = 1 + p + q;
    let mut x = DMatrix::zeros(rows, cols);
    let mut target = DVector::zeros(rows);
    for (row, t) in (start..y.len()).enumerate() {
        x[(row, 0)] = 1.0;
        for i in 0..p {
            x[(row, 1 + i)] = y[t - i - 1];
        }
        for j in 0..q {
            x[(row, 1 + p + j)] = resid[t - j - 1];
        }
        target[row] = y[t];
    }
    (x, target)
}

/// Least-squares ARMA initializer for γ (Hannan–Rissanen when q > 0).
fn initial_gamma(y: &[f64], p: usize, q: usize) -> Vec<f64> {
    let n = y.len();
    let fallback = || {
        let mut g = vec![0.0; 1 + p + q];
        g[0] = mean(y);
        g
    };
    if p + q == 0 {
        return fallback();
    }
    let residuals = if q > 0 {
        let long = (p + q).max((n / 20).min(10));
        if n <= 2 * long + 2 {
            return fallback();
        }
        let (x, target) = lagged_design(y, &[], long, 0, long);
        let Some(coef) = ols(&x, &target) else { return fallback() };
        let mut resid = vec![0.0; n];
        for t in long..n {
            let fitted: f64 = coef[0] + (0..long).map(|i| coef[1 + i] * y[t - i - 1]).sum::<f64>();
            resid[t] = y[t] - fitted;
        }
        resid
    } else {
        Vec::new()
    };
    let start = if q > 0 { (p + q).max((n / 20).min(10)) + q } else { p };
    if n <= start + 1 + p + q {
        return fallback();
    }
    let (x, target) = lagged_design(y, &residuals, p, q, start);
    let Some(coef) = ols(&x, &target) else { return fallback() };
    let mut gamma: Vec<f64> = coef.iter().copied().collect();
    shrink_polynomial(&mut gamma[1..1 + p]);
    shrink_polynomial(&mut gamma[1 + p..]);
    gamma
}

/// Moment-based starting point inside the constraint region.
pub fn initial_estimate(data: &SeriesData, orders: ModelOrders, criterion: Criterion) -> Result<ParamVector> {
    let y = data.values();
    let gamma = initial_gamma(y, orders.p, orders.q);
    let probe_delta: Vec<f64> = std::iter::once(1.0).chain(std::iter::repeat_n(0.0, orders.r + orders.s)).collect();
    let probe = ParamVector::new(orders, &gamma, &probe_delta)?;
    let (eps, _) = filter_levels(&probe, data)?;
    let proxy = match criterion {
        Criterion::Qmele => mean(&eps.iter().map(|e| e.abs()).collect::<Vec<_>>()).powi(2),
        Criterion::Qmle => mean(&eps.iter().map(|e| e * e).collect::<Vec<_>>()),
    };
    let mut delta = vec![(0.5 * proxy).max(1e-12)];
    delta.extend(std::iter::repeat_n(0.05, orders.r));
    delta.extend(std::iter::repeat_n(0.5 / orders.s.max(1) as f64, orders.s));
    ParamVector::new(orders, &gamma, &delta)
}

/// Search space: either transformed or raw θ coordinates.
struct SearchSpace {
    orders: ModelOrders,
    transform: bool,
}

impl SearchSpace {
    fn encode(&self, theta: &ParamVector) -> Vec<f64> {
        if self.transform {
            to_unconstrained(theta)
        } else {
            theta.as_slice().to_vec()
        }
    }

    fn decode(&self, x: &[f64]) -> Result<ParamVector> {
        if self.transform {
            from_unconstrained(self.orders, x)
        } else {
            ParamVector::from_flat(self.orders, x.to_vec())
        }
    }
}

/// Global self-weighted QMELE (or QMLE) with its sandwich covariance.
pub fn fit_self_weighted(
    data: &SeriesData,
    orders: ModelOrders,
    config: &FitConfig,
    criterion: Criterion,
) -> Result<FitResult> {
    let m = orders.dim();
    let n = data.len();
    if n < 10 * m {
        return Err(Error::InsufficientData { n, required: 10 * m });
    }
    if config.optimizer.max_iter == 0 || !(config.optimizer.simplex_tolerance > 0.0) {
        return Err(Error::domain("optimizer needs max_iter >= 1 and a positive tolerance"));
    }
    let weights = compute_weights(data, &config.weight_spec, orders)?;
    let init = initial_estimate(data, orders, criterion)?;
    let space = SearchSpace { orders, transform: config.optimizer.parameter_transform };

    let f = |x: &[f64]| match space.decode(x) {
        Ok(theta) => objective(criterion, &theta, data, &weights).unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    };

    let y_scale = 0.1 * std_dev(data.values()).max(1e-8);
    let x0 = space.encode(&init);
    let steps: Vec<f64> = x0
        .iter()
        .enumerate()
        .map(|(i, x)| if i == 0 { 0.1 * x.abs() + y_scale } else { 0.1 * x.abs().max(1.0) })
        .collect();
    let options = NelderMeadOptions {
        max_iter: config.optimizer.max_iter,
        ftol: config.optimizer.simplex_tolerance,
        xtol: config.optimizer.simplex_tolerance.sqrt().max(1e-8),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<NelderMeadResult> = None;
    let mut iterations = 0;
    for run in 0..=config.optimizer.restarts {
        let start: Vec<f64> = if run == 0 {
            x0.clone()
        } else {
            x0.iter()
                .zip(&steps)
                .map(|(x, s)| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    x + 2.0 * s * z
                })
                .collect()
        };
        let mut result = nelder_mead(f, &start, &steps, &options);
        iterations += result.iterations;
        // Re-seed the simplex at the optimum until it stops moving.
        for _ in 0..3 {
            if !result.fx.is_finite() {
                break;
            }
            let polished = nelder_mead(f, &result.x, &steps, &options);
            iterations += polished.iterations;
            let gain = result.fx - polished.fx;
            let done = gain <= options.ftol * (1.0 + result.fx.abs());
            if polished.fx <= result.fx {
                result = NelderMeadResult { converged: polished.converged, ..polished };
            }
            if done {
                break;
            }
        }
        if best.as_ref().is_none_or(|b| result.fx < b.fx) {
            best = Some(result);
        }
    }
    let best = best.expect("at least one optimizer run");
    let theta_hat = space.decode(&best.x)?;
    let kind = match criterion {
        Criterion::Qmele => EstimatorKind::SelfWeightedQmele,
        Criterion::Qmle => EstimatorKind::SelfWeightedQmle,
    };
    let mut result = FitResult {
        objective_value: best.fx,
        covariance: DMatrix::from_element(m, m, f64::NAN),
        std_errors: vec![f64::NAN; m],
        converged: best.converged && best.fx.is_finite(),
        iterations,
        estimator_kind: kind,
        g0: None,
        eta2: None,
        kurtosis_factor: None,
        step_halvings: 0,
        n_obs: n,
        theta_hat,
    };
    if !result.converged {
        return Ok(result);
    }

    let (eps, h) = filter_levels(&result.theta_hat, data)?;
    let eta: Vec<f64> = eps.iter().zip(&h).map(|(e, h)| e / h.sqrt()).collect();
    let covariance = match criterion {
        Criterion::Qmele => {
            let g0 = estimate_g0(&eta, config.g0_mode)?;
            let eta2 = estimate_eta2(&eta)?.max(ETA2_FLOOR);
            result.g0 = Some(g0);
            result.eta2 = Some(eta2);
            covariance_self_weighted(&result.theta_hat, data, &weights, g0, eta2)?
        }
        Criterion::Qmle => {
            let kappa = excess_kurtosis_factor(&eta)?;
            result.kurtosis_factor = Some(kappa);
            covariance_qmle_self_weighted(&result.theta_hat, data, &weights, kappa)?
        }
    };
    Ok(result.with_covariance(covariance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{simulate, InnovationDist};

    #[test]
    fn too_short_series() {
        let data = SeriesData::new(vec![0.1, -0.2, 0.3, 0.1, 0.0]).unwrap();
        let err = fit_self_weighted(&data, ModelOrders::new(1, 0, 1, 1), &FitConfig::default(), Criterion::Qmele)
            .unwrap_err();
        assert_eq!(err, Error::InsufficientData { n: 5, required: 50 });
    }

    #[test]
    fn initializer_is_feasible_and_close_for_ar1() {
        let orders = ModelOrders::new(1, 0, 1, 1);
        let theta = ParamVector::from_flat(orders, vec![0.0, 0.5, 0.1, 0.18, 0.4]).unwrap();
        let y = simulate(&theta, &InnovationDist::laplace(), 2000, 500, 4).unwrap();
        let init = initial_estimate(&y, orders, Criterion::Qmele).unwrap();
        assert!(init.is_valid());
        assert!((init.phi()[0] - 0.5).abs() < 0.1);
    }

    #[test]
    fn hannan_rissanen_arma11() {
        let orders = ModelOrders::new(1, 1, 0, 0);
        let theta = ParamVector::from_flat(orders, vec![0.2, 0.6, 0.3, 1.0]).unwrap();
        let y = simulate(&theta, &InnovationDist::laplace(), 4000, 500, 8).unwrap();
        let g = initial_gamma(y.values(), 1, 1);
        assert!((g[1] - 0.6).abs() < 0.1 && (g[2] - 0.3).abs() < 0.1, "{g:?}");
    }

    #[test]
    fn estimator_labels_round_trip() {
        for kind in EstimatorKind::ALL {
            assert_eq!(kind.label().parse::<EstimatorKind>().unwrap(), kind);
        }
        assert!("bogus".parse::<EstimatorKind>().is_err());
    }
}
