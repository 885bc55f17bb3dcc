//! Monte Carlo tables, scenario configuration and report formatting.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{
    estimate_g0, fit_self_weighted, local_qmele_step, local_qmle_step, Criterion, EstimatorKind, FitConfig,
    FitResult, G0Mode, OptimizerConfig,
};
use crate::model::{
    simulate, InnovationDist, InnovationKind, ModelOrders, ParamVector, SeriesData, Standardization,
    DEFAULT_BURN_IN,
};
use crate::weights::WeightSpec;

/// Where the density-at-zero value for the exponential-criterion covariances comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum G0Source {
    /// Kernel estimate from the standardized residuals of each fit.
    #[default]
    Kernel,
    /// The exact density at zero of the simulated innovation law.
    Design,
}

fn default_burn_in() -> usize {
    DEFAULT_BURN_IN
}
fn default_replications() -> usize {
    200
}
fn default_qmele_std() -> Standardization {
    Standardization::AbsMeanOne
}
fn default_qmle_std() -> Standardization {
    Standardization::VarOne
}

/// One simulation design of the Monte Carlo study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    pub orders: ModelOrders,
    pub theta0: Vec<f64>,
    pub innovation: InnovationKind,
    /// Standardization of the innovations for the exponential-criterion estimators.
    #[serde(default = "default_qmele_std")]
    pub standardization: Standardization,
    /// Standardization of the innovations for the Gaussian-criterion estimators.
    #[serde(default = "default_qmle_std")]
    pub qmle_standardization: Standardization,
    pub n: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    pub estimators: Vec<EstimatorKind>,
    #[serde(default)]
    pub weight_spec: WeightSpec,
    #[serde(default)]
    pub g0_source: G0Source,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::domain(format!("scenario config: {}", e.message().trim())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::domain(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Domain(msg) => Error::Domain(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario config is always representable in TOML")
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::domain("field `replications` must be at least 1"));
        }
        if self.estimators.is_empty() {
            return Err(Error::domain("field `estimators` must not be empty"));
        }
        if self.n == 0 {
            return Err(Error::domain("field `n` must be at least 1"));
        }
        self.true_theta().map_err(|e| Error::domain(format!("field `theta0`: {e}")))?;
        self.dist(Criterion::Qmele)?;
        Ok(())
    }

    pub fn true_theta(&self) -> Result<ParamVector> {
        ParamVector::from_flat(self.orders, self.theta0.clone())
    }

    pub fn dist(&self, criterion: Criterion) -> Result<InnovationDist> {
        let standardization = match criterion {
            Criterion::Qmele => self.standardization,
            Criterion::Qmle => self.qmle_standardization,
        };
        InnovationDist::new(self.innovation, standardization)
    }

    fn fit_config(&self, seed: u64, g0_mode: G0Mode) -> FitConfig {
        FitConfig { weight_spec: self.weight_spec, optimizer: self.optimizer, g0_mode, seed }
    }
}

/// Outcome of one estimator on one replication.
#[derive(Debug, Clone, PartialEq)]
pub enum EstimateOutcome {
    Ok { theta: Vec<f64>, std_errors: Vec<f64> },
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    pub index: usize,
    pub seed: u64,
    pub outcomes: BTreeMap<EstimatorKind, EstimateOutcome>,
}

/// Summary statistics of one parameter under one estimator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSummary {
    pub name: String,
    pub true_value: f64,
    pub mean: f64,
    pub bias: f64,
    /// Sample SD (divisor n−1); `None` with fewer than two successes.
    pub sd: Option<f64>,
    /// Mean of the estimated asymptotic standard errors.
    pub ad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorSummary {
    pub estimator: EstimatorKind,
    pub successes: usize,
    pub failures: usize,
    pub params: Vec<ParamSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McTable {
    pub scenario: String,
    pub replications: usize,
    pub n: usize,
    pub estimators: Vec<EstimatorSummary>,
}

impl McTable {
    pub fn get(&self, kind: EstimatorKind) -> Option<&EstimatorSummary> {
        self.estimators.iter().find(|e| e.estimator == kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McRun {
    pub config: ScenarioConfig,
    pub records: Vec<ReplicationRecord>,
    pub table: McTable,
}

fn outcome(result: Result<FitResult>) -> EstimateOutcome {
    match result {
        Ok(fit) if !fit.converged => EstimateOutcome::Failed("optimizer did not converge".into()),
        Ok(fit) if fit.std_errors.iter().any(|s| !s.is_finite()) => {
            EstimateOutcome::Failed("non-finite standard error".into())
        }
        Ok(fit) => EstimateOutcome::Ok { theta: fit.theta_hat.as_slice().to_vec(), std_errors: fit.std_errors },
        Err(e) => EstimateOutcome::Failed(e.to_string()),
    }
}

fn g0_mode(config: &ScenarioConfig, dist: &InnovationDist) -> G0Mode {
    match config.g0_source {
        G0Source::Kernel => G0Mode::KernelAtZero,
        G0Source::Design => G0Mode::KnownDensity(dist.density_at_zero()),
    }
}

/// Fits every requested estimator of one family on one path.
fn run_family(
    config: &ScenarioConfig,
    criterion: Criterion,
    seed: u64,
    outcomes: &mut BTreeMap<EstimatorKind, EstimateOutcome>,
) {
    let wanted: Vec<EstimatorKind> =
        config.estimators.iter().copied().filter(|k| k.criterion() == criterion).collect();
    if wanted.is_empty() {
        return;
    }
    let fail_all = |outcomes: &mut BTreeMap<EstimatorKind, EstimateOutcome>, msg: String| {
        for k in &wanted {
            outcomes.insert(*k, EstimateOutcome::Failed(msg.clone()));
        }
    };
    let prepared = config
        .dist(criterion)
        .and_then(|dist| Ok((dist, simulate(&config.true_theta()?, &dist, config.n, config.burn_in, seed)?)));
    let (dist, data) = match prepared {
        Ok(v) => v,
        Err(e) => return fail_all(outcomes, e.to_string()),
    };
    let mode = g0_mode(config, &dist);
    let initial = fit_self_weighted(&data, config.orders, &config.fit_config(seed, mode), criterion);
    let (sw_kind, local_kind) = match criterion {
        Criterion::Qmele => (EstimatorKind::SelfWeightedQmele, EstimatorKind::LocalQmele),
        Criterion::Qmle => (EstimatorKind::SelfWeightedQmle, EstimatorKind::LocalQmle),
    };
    if wanted.contains(&local_kind) {
        let local = initial.clone().and_then(|init| local_step(&init, &data, criterion, mode));
        outcomes.insert(local_kind, outcome(local));
    }
    if wanted.contains(&sw_kind) {
        outcomes.insert(sw_kind, outcome(initial));
    }
}

/// Local one-step update from a self-weighted fit.
///
/// For the exponential criterion g(0) is `mode` evaluated on the initializer's standardized residuals.
pub fn local_step(init: &FitResult, data: &SeriesData, criterion: Criterion, mode: G0Mode) -> Result<FitResult> {
    match criterion {
        Criterion::Qmele => {
            let g0 = match (mode, init.g0) {
                (G0Mode::KnownDensity(v), _) => v,
                (G0Mode::KernelAtZero, Some(v)) => v,
                (G0Mode::KernelAtZero, None) => {
                    estimate_g0(&crate::diagnostics::standardized_residuals(init, data)?, mode)?
                }
            };
            local_qmele_step(init, data, g0)
        }
        Criterion::Qmle => local_qmle_step(init, data),
    }
}

/// Runs one replication; the path seed is `config.seed + index`.
pub fn run_replication(config: &ScenarioConfig, index: usize) -> ReplicationRecord {
    let seed = config.seed.wrapping_add(index as u64);
    let mut outcomes = BTreeMap::new();
    run_family(config, Criterion::Qmele, seed, &mut outcomes);
    run_family(config, Criterion::Qmle, seed, &mut outcomes);
    ReplicationRecord { index, seed, outcomes }
}

/// Runs the full study. `parallel` only affects scheduling; results are identical either way.
pub fn run_mc_table(config: &ScenarioConfig, parallel: bool) -> Result<McRun> {
    config.validate()?;
    let records: Vec<ReplicationRecord> = if parallel {
        (0..config.replications).into_par_iter().map(|i| run_replication(config, i)).collect()
    } else {
        (0..config.replications).map(|i| run_replication(config, i)).collect()
    };
    let table = aggregate(config, &records)?;
    Ok(McRun { config: config.clone(), records, table })
}

/// Folds replication records in index order into bias/SD/AD summaries.
pub fn aggregate(config: &ScenarioConfig, records: &[ReplicationRecord]) -> Result<McTable> {
    let theta0 = config.true_theta()?;
    let names = config.orders.param_names();
    let m = names.len();
    let mut kinds = config.estimators.clone();
    kinds.sort();
    kinds.dedup();
    let mut estimators = Vec::new();
    for kind in kinds {
        let ok: Vec<(&Vec<f64>, &Vec<f64>)> = records
            .iter()
            .filter_map(|r| match r.outcomes.get(&kind) {
                Some(EstimateOutcome::Ok { theta, std_errors }) => Some((theta, std_errors)),
                _ => None,
            })
            .collect();
        let k = ok.len();
        let params = (0..m)
            .map(|j| {
                let (mean, sd, ad) = if k == 0 {
                    (f64::NAN, None, f64::NAN)
                } else {
                    let mean = ok.iter().map(|(t, _)| t[j]).sum::<f64>() / k as f64;
                    let sd = (k > 1).then(|| {
                        (ok.iter().map(|(t, _)| (t[j] - mean).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt()
                    });
                    let ad = ok.iter().map(|(_, s)| s[j]).sum::<f64>() / k as f64;
                    (mean, sd, ad)
                };
                ParamSummary { name: names[j].clone(), true_value: theta0[j], mean, bias: mean - theta0[j], sd, ad }
            })
            .collect();
        estimators.push(EstimatorSummary { estimator: kind, successes: k, failures: records.len() - k, params });
    }
    Ok(McTable { scenario: config.name.clone(), replications: records.len(), n: config.n, estimators })
}

/// `%g`-style formatting with `digits` significant digits; NaN prints as `NA`.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NA".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt_sig(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), |v| fmt_sig(v, 6))
}

/// Summary table as CSV.
pub fn table_csv(table: &McTable) -> String {
    let mut out = String::from("estimator,parameter,true,mean,bias,sd,ad,successes,failures\n");
    for e in &table.estimators {
        for p in &e.params {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                e.estimator.label(),
                p.name,
                fmt_sig(p.true_value, 6),
                fmt_sig(p.mean, 6),
                fmt_sig(p.bias, 6),
                opt_sig(p.sd),
                fmt_sig(p.ad, 6),
                e.successes,
                e.failures
            );
        }
    }
    out
}

/// Summary table as aligned text with one block of Bias/SD/AD rows per estimator.
pub fn table_text(table: &McTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario: {}  n = {}  replications = {}", table.scenario, table.n, table.replications);
    for e in &table.estimators {
        let _ = writeln!(out, "\n{} (successes {}, failures {})", e.estimator.label(), e.successes, e.failures);
        let _ = write!(out, "{:<6}", "");
        for p in &e.params {
            let _ = write!(out, "{:>12}", p.name);
        }
        out.push('\n');
        let rows: [(&str, Box<dyn Fn(&ParamSummary) -> String>); 4] = [
            ("true", Box::new(|p| fmt_sig(p.true_value, 4))),
            ("bias", Box::new(|p| fmt_sig(p.bias, 4))),
            ("SD", Box::new(|p| p.sd.map_or("NA".into(), |v| fmt_sig(v, 4)))),
            ("AD", Box::new(|p| fmt_sig(p.ad, 4))),
        ];
        for (label, cell) in rows.iter() {
            let _ = write!(out, "{label:<6}");
            for p in &e.params {
                let _ = write!(out, "{:>12}", cell(p));
            }
            out.push('\n');
        }
    }
    out
}

/// Per-replication estimates as CSV, one row per replication and estimator.
pub fn replications_csv(config: &ScenarioConfig, records: &[ReplicationRecord]) -> String {
    let names = config.orders.param_names();
    let mut out = String::from("replication,seed,estimator,status");
    for n in &names {
        let _ = write!(out, ",est_{n}");
    }
    for n in &names {
        let _ = write!(out, ",se_{n}");
    }
    out.push('\n');
    for r in records {
        for (kind, o) in &r.outcomes {
            let _ = write!(out, "{},{},{}", r.index, r.seed, kind.label());
            match o {
                EstimateOutcome::Ok { theta, std_errors } => {
                    out.push_str(",ok");
                    for v in theta.iter().chain(std_errors) {
                        let _ = write!(out, ",{}", fmt_sig(*v, 6));
                    }
                }
                EstimateOutcome::Failed(msg) => {
                    let _ = write!(out, ",failed: {}", msg.replace([',', '\n'], ";"));
                    for _ in 0..2 * names.len() {
                        out.push_str(",NA");
                    }
                }
            }
            out.push('\n');
        }
    }
    out
}

/// Flat, serializable view of a fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub estimator: EstimatorKind,
    pub model: String,
    pub n_obs: usize,
    pub parameters: Vec<String>,
    pub estimates: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
    pub step_halvings: usize,
    pub g0: Option<f64>,
    pub eta2: Option<f64>,
    pub kurtosis_factor: Option<f64>,
}

impl FitReport {
    pub fn from_fit(fit: &FitResult) -> Self {
        let orders = fit.theta_hat.orders();
        Self {
            estimator: fit.estimator_kind,
            model: orders.to_string(),
            n_obs: fit.n_obs,
            parameters: orders.param_names(),
            estimates: fit.theta_hat.as_slice().to_vec(),
            std_errors: fit.std_errors.clone(),
            objective: fit.objective_value,
            converged: fit.converged,
            iterations: fit.iterations,
            step_halvings: fit.step_halvings,
            g0: fit.g0,
            eta2: fit.eta2,
            kurtosis_factor: fit.kurtosis_factor,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Estimates with standard errors in parentheses, then metadata.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} fit of {} (n = {})", self.estimator.label(), self.model, self.n_obs);
        let width = self.parameters.iter().map(|p| p.len()).max().unwrap_or(0);
        for ((name, est), se) in self.parameters.iter().zip(&self.estimates).zip(&self.std_errors) {
            let _ = writeln!(out, "  {name:<width$}  {:>12} ({})", fmt_sig(*est, 6), fmt_sig(*se, 4));
        }
        let _ = writeln!(out, "  objective       {}", fmt_sig(self.objective, 8));
        let _ = writeln!(out, "  converged       {}", self.converged);
        let _ = writeln!(out, "  iterations      {}", self.iterations);
        let _ = writeln!(out, "  step halvings   {}", self.step_halvings);
        if let Some(g0) = self.g0 {
            let _ = writeln!(out, "  g(0)            {}", fmt_sig(g0, 6));
        }
        if let Some(e) = self.eta2 {
            let _ = writeln!(out, "  E eta^2         {}", fmt_sig(e, 6));
        }
        if let Some(k) = self.kurtosis_factor {
            let _ = writeln!(out, "  kurtosis factor {}", fmt_sig(k, 6));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(0.0317, 6), "0.0317");
        assert_eq!(fmt_sig(1.0 / 3.0, 6), "0.333333");
        assert_eq!(fmt_sig(123456.7, 6), "123457");
        assert_eq!(fmt_sig(1234567.0, 6), "1.23457e+06");
        assert_eq!(fmt_sig(-2.5e-7, 6), "-2.5e-07");
        assert_eq!(fmt_sig(999999.6, 6), "1e+06");
        assert_eq!(fmt_sig(0.5, 6), "0.5");
        assert_eq!(fmt_sig(f64::NAN, 6), "NA");
        assert_eq!(fmt_sig(-3.0, 6), "-3");
    }

    const SMALL: &str = r#"
name = "tiny"
theta0 = [0.0, 0.5, 0.1, 0.18, 0.4]
n = 300
replications = 3
seed = 9
estimators = ["sw-qmele", "local-qmele"]
g0_source = "design"

[orders]
p = 1
q = 0
r = 1
s = 1

[innovation]
kind = "laplace"

[optimizer]
max_iter = 2000
restarts = 1
simplex_tolerance = 1e-9
parameter_transform = true
"#;

    #[test]
    fn config_parses_and_rejects_unknown_fields() {
        let cfg = ScenarioConfig::from_toml_str(SMALL).unwrap();
        assert_eq!(cfg.burn_in, DEFAULT_BURN_IN);
        assert_eq!(cfg.standardization, Standardization::AbsMeanOne);
        let round = ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(round, cfg);
        let top = SMALL.replace("n = 300", "n = 300\nbogus = 1");
        assert!(ScenarioConfig::from_toml_str(&top).unwrap_err().to_string().contains("bogus"));
        let nested = format!("{SMALL}bogus_nested = 1\n");
        assert!(ScenarioConfig::from_toml_str(&nested).unwrap_err().to_string().contains("bogus_nested"));
        let zero = SMALL.replace("replications = 3", "replications = 0");
        assert!(ScenarioConfig::from_toml_str(&zero).unwrap_err().to_string().contains("replications"));
    }

    #[test]
    fn single_replication_has_no_sd() {
        let mut cfg = ScenarioConfig::from_toml_str(SMALL).unwrap();
        cfg.replications = 1;
        let run = run_mc_table(&cfg, false).unwrap();
        let sw = run.table.get(EstimatorKind::SelfWeightedQmele).unwrap();
        assert_eq!(sw.successes + sw.failures, 1);
        assert!(sw.params.iter().all(|p| p.sd.is_none()));
        assert!(table_csv(&run.table).contains(",NA,"));
    }
}
