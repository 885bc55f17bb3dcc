//! Hill tail-index estimation and GARCH(1,1) stationarity / moment regions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::InnovationDist;

/// Default number of Monte Carlo draws for the region checks.
pub const DEFAULT_MC_DRAWS: usize = 1_000_000;
/// Default seed for the region checks.
pub const DEFAULT_MC_SEED: u64 = 20_110_101;

/// Hill estimates over a range of k.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub k_values: Vec<usize>,
    /// `None` where the top k+1 order statistics are all equal.
    pub alpha_hat: Vec<Option<f64>>,
    /// Nonpositive values removed before ordering.
    pub dropped: usize,
}

fn positive_sorted(values: &[f64]) -> (Vec<f64>, usize) {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| *x > 0.0 && x.is_finite()).collect();
    let dropped = values.len() - v.len();
    v.sort_by(f64::total_cmp);
    (v, dropped)
}

fn hill_sorted(sorted: &[f64], k: usize) -> Result<f64> {
    let n = sorted.len();
    if k == 0 {
        return Err(Error::domain("Hill estimator needs k >= 1"));
    }
    if k >= n {
        return Err(Error::domain(format!("Hill estimator needs k < n, got k = {k}, n = {n}")));
    }
    let threshold = sorted[n - k - 1];
    let spacing: f64 = sorted[n - k..].iter().map(|v| (v / threshold).ln()).sum();
    if spacing <= 0.0 {
        return Err(Error::DegenerateSample(format!("top {} order statistics are equal", k + 1)));
    }
    Ok(k as f64 / spacing)
}

/// Hill estimate α̂(k) = k / Σ_{j=1}^{k} log(v_(n−j+1) / v_(n−k)) from the k largest values.
///
/// Nonpositive values are dropped first.
pub fn hill_estimator(values: &[f64], k: usize) -> Result<f64> {
    let (sorted, _) = positive_sorted(values);
    hill_sorted(&sorted, k)
}

/// Hill estimates for k = 1…k_max.
pub fn hill_sweep(values: &[f64], k_max: usize) -> Result<TailReport> {
    let (sorted, dropped) = positive_sorted(values);
    if k_max == 0 || k_max >= sorted.len() {
        return Err(Error::domain(format!(
            "Hill sweep needs 1 <= k_max < n, got k_max = {k_max}, n = {}",
            sorted.len()
        )));
    }
    let mut alpha_hat = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        alpha_hat.push(match hill_sorted(&sorted, k) {
            Ok(a) => Some(a),
            Err(Error::DegenerateSample(_)) => None,
            Err(e) => return Err(e),
        });
    }
    Ok(TailReport { k_values: (1..=k_max).collect(), alpha_hat, dropped })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationarityDecision {
    /// Estimate of the Lyapunov exponent E log(α₁η² + β₁).
    pub lyapunov_estimate: f64,
    pub std_error: f64,
    pub is_stationary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentDecision {
    /// Estimate of E[(α₁η² + β₁)^ι].
    pub moment_estimate: f64,
    pub std_error: f64,
    pub holds: bool,
}

/// Squared innovations drawn once and reused across a parameter grid.
#[derive(Debug, Clone)]
pub struct RegionSampler {
    eta2: Vec<f64>,
}

impl RegionSampler {
    pub fn new(dist: &InnovationDist, draws: usize, seed: u64) -> Result<Self> {
        if draws == 0 {
            return Err(Error::domain("Monte Carlo checks need at least one draw"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut eta = vec![0.0; draws];
        dist.fill(&mut rng, &mut eta);
        Ok(Self { eta2: eta.into_iter().map(|e| e * e).collect() })
    }

    /// Mean and standard error of f(η²).
    fn mean_se(&self, f: impl Fn(f64) -> f64) -> (f64, f64) {
        let n = self.eta2.len() as f64;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for &e in &self.eta2 {
            let v = f(e);
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / n;
        let var = if n > 1.0 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        (mean, (var / n).sqrt())
    }

    pub fn stationarity(&self, alpha1: f64, beta1: f64) -> Result<StationarityDecision> {
        check_coefficients(alpha1, beta1)?;
        let (est, se) = if alpha1 == 0.0 {
            (beta1.ln(), 0.0)
        } else {
            self.mean_se(|e2| (alpha1 * e2 + beta1).ln())
        };
        Ok(StationarityDecision { lyapunov_estimate: est, std_error: se, is_stationary: est + 3.0 * se < 0.0 })
    }

    pub fn moment(&self, alpha1: f64, beta1: f64, iota: f64) -> Result<MomentDecision> {
        check_coefficients(alpha1, beta1)?;
        if !(iota > 0.0 && iota.is_finite()) {
            return Err(Error::domain(format!("iota = {iota} must be positive")));
        }
        let (est, se) = if alpha1 == 0.0 {
            (beta1.powf(iota), 0.0)
        } else if iota == 1.0 {
            self.mean_se(|e2| alpha1 * e2 + beta1)
        } else {
            self.mean_se(|e2| (alpha1 * e2 + beta1).powf(iota))
        };
        Ok(MomentDecision { moment_estimate: est, std_error: se, holds: est + 3.0 * se < 1.0 })
    }
}

fn check_coefficients(alpha1: f64, beta1: f64) -> Result<()> {
    if !(alpha1 >= 0.0 && beta1 >= 0.0 && alpha1.is_finite() && beta1.is_finite()) {
        return Err(Error::domain(format!("coefficients must be nonnegative, got alpha1 = {alpha1}, beta1 = {beta1}")));
    }
    Ok(())
}

fn single_coefficient(values: &[f64], name: &str) -> Result<f64> {
    match values {
        [] => Ok(0.0),
        [v] => Ok(*v),
        _ => Err(Error::UnsupportedOrder(format!(
            "the stationarity criterion covers GARCH(1,1) only, got {} {name} coefficients",
            values.len()
        ))),
    }
}

/// Monte Carlo check of E log(α₁η² + β₁) < 0 for GARCH(1,1).
///
/// The decision is conservative: the estimate plus three standard errors must be negative.
pub fn strict_stationarity_check(
    alpha: &[f64],
    beta: &[f64],
    dist: &InnovationDist,
    mc_draws: usize,
    seed: u64,
) -> Result<StationarityDecision> {
    let alpha1 = single_coefficient(alpha, "ARCH")?;
    let beta1 = single_coefficient(beta, "GARCH")?;
    check_coefficients(alpha1, beta1)?;
    if alpha1 == 0.0 {
        let est = beta1.ln();
        return Ok(StationarityDecision { lyapunov_estimate: est, std_error: 0.0, is_stationary: est < 0.0 });
    }
    RegionSampler::new(dist, mc_draws, seed)?.stationarity(alpha1, beta1)
}

/// Monte Carlo check of E[(α₁η² + β₁)^ι] < 1, the condition for E|ε_t|^{2ι} < ∞ in GARCH(1,1).
pub fn moment_condition_check(
    alpha1: f64,
    beta1: f64,
    iota: f64,
    dist: &InnovationDist,
    mc_draws: usize,
    seed: u64,
) -> Result<MomentDecision> {
    if alpha1 == 0.0 {
        check_coefficients(alpha1, beta1)?;
        if !(iota > 0.0 && iota.is_finite()) {
            return Err(Error::domain(format!("iota = {iota} must be positive")));
        }
        let est = beta1.powf(iota);
        return Ok(MomentDecision { moment_estimate: est, std_error: 0.0, holds: est < 1.0 });
    }
    RegionSampler::new(dist, mc_draws, seed)?.moment(alpha1, beta1, iota)
}

/// Which region a scan classifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionCriterion {
    /// E|ε_t|^{2ι} < ∞.
    Moment { iota_bits: u64 },
    StrictStationarity,
}

impl RegionCriterion {
    pub fn moment(iota: f64) -> Self {
        RegionCriterion::Moment { iota_bits: iota.to_bits() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionCell {
    pub alpha1: f64,
    pub beta1: f64,
    pub holds: bool,
}

/// Evaluates the criterion on the grid `alphas × betas` with common random numbers.
pub fn region_scan(
    alphas: &[f64],
    betas: &[f64],
    criterion: RegionCriterion,
    dist: &InnovationDist,
    mc_draws: usize,
    seed: u64,
) -> Result<Vec<RegionCell>> {
    let sampler = RegionSampler::new(dist, mc_draws, seed)?;
    let mut cells = Vec::with_capacity(alphas.len() * betas.len());
    for &alpha1 in alphas {
        for &beta1 in betas {
            let holds = match criterion {
                RegionCriterion::Moment { iota_bits } => {
                    sampler.moment(alpha1, beta1, f64::from_bits(iota_bits))?.holds
                }
                RegionCriterion::StrictStationarity => sampler.stationarity(alpha1, beta1)?.is_stationary,
            };
            cells.push(RegionCell { alpha1, beta1, holds });
        }
    }
    Ok(cells)
}
