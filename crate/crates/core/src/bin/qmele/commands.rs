use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use qmele::diagnostics::{acf, efficiency_compare_with, pacf, standardized_residuals, AcfReport};
use qmele::estimation::{fit_self_weighted, Criterion, FitConfig, G0Mode};
use qmele::experiments::{
    fmt_sig, local_step, replications_csv, run_mc_table, table_csv, table_text, FitReport, ScenarioConfig,
};
use qmele::model::{
    filter_levels, log_return_transform, simulate, InnovationDist, InnovationKind, MixtureMomentConvention,
    ModelOrders, ParamVector, SeriesData, Standardization, DEFAULT_BURN_IN,
};
use qmele::tails::{hill_sweep, region_scan, RegionCriterion};
use qmele::weights::{WeightSpec, WeightVariant};

use crate::input::{read_column, write_file};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "qmele", version, about = "Robust QMELE estimation for ARMA-GARCH/IGARCH models")]
pub struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Random seed (overrides any seed in --config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for output files.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// TOML configuration file (a fit configuration for `fit`, a scenario for `simulate` and `mc-table`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Input CSV has no header row.
    #[arg(long, global = true)]
    no_header: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit the self-weighted and local QMELE and write reports and residual diagnostics.
    Fit(FitArgs),
    /// Simulate a path from an ARMA-GARCH model.
    Simulate(SimulateArgs),
    /// Run a Monte Carlo study from a scenario file.
    McTable(McArgs),
    /// Hill tail-index sweep.
    Hill(HillArgs),
    /// Classify a grid of (alpha1, beta1) by a moment or stationarity condition.
    RegionScan(RegionArgs),
    /// Sample ACF and PACF with the 2/sqrt(n) band.
    Acf(AcfArgs),
    /// Asymptotic efficiency factors of the Gaussian and exponential criteria.
    Efficiency(DistArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input CSV file.
    #[arg(long)]
    input: PathBuf,
    /// Column name, or 0-based index.
    #[arg(long)]
    column: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DistName {
    Laplace,
    Normal,
    T3,
    Mixture,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StdName {
    AbsMeanOne,
    VarOne,
    Raw,
}

impl From<StdName> for Standardization {
    fn from(s: StdName) -> Self {
        match s {
            StdName::AbsMeanOne => Standardization::AbsMeanOne,
            StdName::VarOne => Standardization::VarOne,
            StdName::Raw => Standardization::Raw,
        }
    }
}

#[derive(Debug, Args)]
struct DistArgs {
    #[arg(long, value_enum, default_value = "laplace")]
    dist: DistName,
    /// Mixture weight of the scaled component.
    #[arg(long, default_value_t = 0.0)]
    mix_eps: f64,
    /// Scale of the second mixture component.
    #[arg(long, default_value_t = 1.0)]
    mix_tau: f64,
    #[arg(long, value_enum, default_value = "abs-mean-one")]
    standardization: StdName,
    /// Fourth-moment convention for the normal mixture.
    #[arg(long, value_enum, default_value = "published")]
    convention: ConventionName,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConventionName {
    Published,
    Exact,
}

impl DistArgs {
    fn dist(&self) -> Result<InnovationDist, CliError> {
        let kind = match self.dist {
            DistName::Laplace => InnovationKind::Laplace,
            DistName::Normal => InnovationKind::Normal,
            DistName::T3 => InnovationKind::StudentT3,
            DistName::Mixture => InnovationKind::NormalMixture { eps: self.mix_eps, tau: self.mix_tau },
        };
        Ok(InnovationDist::new(kind, self.standardization.into())?)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WeightName {
    K9,
    FiniteLag,
    IotaScaled,
    Unit,
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Model orders p,q,r,s of ARMA(p,q)-GARCH(r,s).
    #[arg(long, default_value = "1,0,1,1")]
    orders: String,
    /// Treat the column as prices and fit 100 x log returns.
    #[arg(long = "log-returns-x100")]
    log_returns: bool,
    #[arg(long, value_enum)]
    weights: Option<WeightName>,
    #[arg(long)]
    iota: Option<f64>,
    /// Known g(0); the default is a kernel estimate from the residuals.
    #[arg(long)]
    g0: Option<f64>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Largest lag of the residual ACF/PACF.
    #[arg(long, default_value_t = 20)]
    max_lag: usize,
    /// Largest k of the Hill sweep on squared residuals (default n/10).
    #[arg(long)]
    hill_k_max: Option<usize>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, default_value = "1,0,1,1")]
    orders: String,
    /// Comma-separated parameter vector (ignored with --config).
    #[arg(long, default_value = "0,0.5,0.1,0.18,0.4")]
    theta: String,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn_in: usize,
    #[command(flatten)]
    dist: DistArgs,
    /// Output file name inside --out-dir.
    #[arg(long, default_value = "simulated.csv")]
    output: String,
}

#[derive(Debug, Args)]
struct McArgs {
    #[arg(long)]
    replications: Option<usize>,
    /// Run replications on one thread (results are identical).
    #[arg(long)]
    serial: bool,
}

#[derive(Debug, Args)]
struct HillArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    k_max: usize,
    /// Use absolute values.
    #[arg(long)]
    abs: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RegionName {
    Moment,
    Stationarity,
}

#[derive(Debug, Args)]
struct RegionArgs {
    #[arg(long, value_enum, default_value = "moment")]
    criterion: RegionName,
    #[arg(long, default_value_t = 1.0)]
    iota: f64,
    /// alpha1 grid as start:stop:points.
    #[arg(long, default_value = "0:1:41")]
    alpha: String,
    /// beta1 grid as start:stop:points.
    #[arg(long, default_value = "0:0.99:41")]
    beta: String,
    #[arg(long, default_value_t = 100_000)]
    draws: usize,
    #[command(flatten)]
    dist: DistArgs,
}

#[derive(Debug, Args)]
struct AcfArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 20)]
    max_lag: usize,
    /// Use squared values.
    #[arg(long)]
    squared: bool,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let common = &cli.common;
    match &cli.command {
        Command::Fit(a) => cmd_fit(common, a),
        Command::Simulate(a) => cmd_simulate(common, a),
        Command::McTable(a) => cmd_mc_table(common, a),
        Command::Hill(a) => cmd_hill(common, a),
        Command::RegionScan(a) => cmd_region_scan(common, a),
        Command::Acf(a) => cmd_acf(common, a),
        Command::Efficiency(a) => cmd_efficiency(common, a),
    }
}

fn out_dir(common: &Common) -> PathBuf {
    common.out_dir.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn parse_orders(text: &str) -> Result<ModelOrders, CliError> {
    let v: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("--orders `{text}` must be four integers p,q,r,s")))?;
    match v[..] {
        [p, q, r, s] => Ok(ModelOrders::new(p, q, r, s)),
        _ => Err(CliError::Usage(format!("--orders `{text}` must be four integers p,q,r,s"))),
    }
}

fn parse_list(text: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("{flag} `{text}` must be comma-separated numbers")))
}

fn parse_grid(text: &str, flag: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("{flag} `{text}` must be start:stop:points"));
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b, k] = parts[..] else { return Err(bad()) };
    let (a, b): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    let k: usize = k.parse().map_err(|_| bad())?;
    match k {
        0 => Err(bad()),
        1 => Ok(vec![a]),
        _ => Ok((0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()),
    }
}

fn acf_csv(report: &AcfReport) -> String {
    let mut out = String::from("lag,value,band\n");
    for (lag, v) in report.lags.iter().zip(&report.values) {
        let _ = writeln!(out, "{lag},{},{}", fmt_sig(*v, 6), fmt_sig(report.band, 6));
    }
    out
}

fn cmd_fit(common: &Common, a: &FitArgs) -> Result<(), CliError> {
    let orders = parse_orders(&a.orders)?;
    let raw = read_column(&a.input.input, a.input.column.as_deref(), common.no_header)?;
    let data = if a.log_returns {
        log_return_transform(&raw).map_err(|e| CliError::Data(format!("{}: {e}", a.input.input.display())))?
    } else {
        SeriesData::new(raw).map_err(|e| CliError::Data(format!("{}: {e}", a.input.input.display())))?
    };

    let mut config = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            toml::from_str::<FitConfig>(&text)
                .map_err(|e| CliError::Usage(format!("{}: {}", path.display(), e.message().trim())))?
        }
        None => FitConfig::default(),
    };
    if let Some(w) = a.weights {
        config.weight_spec = WeightSpec {
            variant: match w {
                WeightName::K9 => WeightVariant::InfiniteK9,
                WeightName::FiniteLag => WeightVariant::FiniteLag,
                WeightName::IotaScaled => WeightVariant::InfiniteIotaScaled,
                WeightName::Unit => WeightVariant::Unit,
            },
            ..config.weight_spec
        };
    }
    if let Some(iota) = a.iota {
        config.weight_spec.iota = iota;
    }
    if let Some(g0) = a.g0 {
        config.g0_mode = G0Mode::KnownDensity(g0);
    }
    if let Some(r) = a.restarts {
        config.optimizer.restarts = r;
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }

    let initial = fit_self_weighted(&data, orders, &config, Criterion::Qmele)?;
    if !initial.converged {
        return Err(CliError::Numeric("self-weighted QMELE did not converge".into()));
    }
    let local = local_step(&initial, &data, Criterion::Qmele, config.g0_mode)?;
    let reports = [FitReport::from_fit(&initial), FitReport::from_fit(&local)];
    let dir = out_dir(common);
    let text: String = reports.iter().map(|r| r.to_text()).collect::<Vec<_>>().join("\n");
    write_file(&dir, "fit_report.txt", &text)?;
    let json = serde_json::to_string_pretty(&reports).expect("reports serialize");
    write_file(&dir, "fit_report.json", &(json + "\n"))?;

    let eta = standardized_residuals(&local, &data)?;
    let (eps, h) = filter_levels(&local.theta_hat, &data)?;
    let mut resid = String::from("t,y,eps,h,eta\n");
    for t in 0..data.len() {
        let _ = writeln!(
            resid,
            "{},{},{},{},{}",
            t + 1,
            fmt_sig(data.values()[t], 6),
            fmt_sig(eps[t], 6),
            fmt_sig(h[t], 6),
            fmt_sig(eta[t], 6)
        );
    }
    write_file(&dir, "residuals.csv", &resid)?;

    let eta2: Vec<f64> = eta.iter().map(|e| e * e).collect();
    let max_lag = a.max_lag.min(data.len().saturating_sub(1)).max(1);
    write_file(&dir, "acf_eta.csv", &acf_csv(&acf(&eta, max_lag)?))?;
    write_file(&dir, "pacf_eta.csv", &acf_csv(&pacf(&eta, max_lag)?))?;
    write_file(&dir, "acf_eta2.csv", &acf_csv(&acf(&eta2, max_lag)?))?;
    write_file(&dir, "pacf_eta2.csv", &acf_csv(&pacf(&eta2, max_lag)?))?;
    let k_max = a.hill_k_max.unwrap_or((data.len() / 10).max(1));
    write_file(&dir, "hill_eta2.csv", &hill_csv(&eta2, k_max)?)?;

    print!("{text}");
    Ok(())
}

fn hill_csv(values: &[f64], k_max: usize) -> Result<String, CliError> {
    let report = hill_sweep(values, k_max)?;
    let mut out = String::from("k,alpha_hat\n");
    for (k, a) in report.k_values.iter().zip(&report.alpha_hat) {
        let _ = writeln!(out, "{k},{}", a.map_or_else(|| "NA".into(), |v| fmt_sig(v, 6)));
    }
    Ok(out)
}

fn cmd_simulate(common: &Common, a: &SimulateArgs) -> Result<(), CliError> {
    let (theta, dist, n, burn_in, seed, label) = match &common.config {
        Some(path) => {
            let cfg = ScenarioConfig::from_file(path)?;
            let theta = cfg.true_theta()?;
            let dist = cfg.dist(Criterion::Qmele)?;
            let label = if cfg.name.is_empty() { path.display().to_string() } else { cfg.name.clone() };
            (theta, dist, cfg.n, cfg.burn_in, common.seed.unwrap_or(cfg.seed), label)
        }
        None => {
            let orders = parse_orders(&a.orders)?;
            let theta = ParamVector::from_flat(orders, parse_list(&a.theta, "--theta")?)?;
            let dist = a.dist.dist()?;
            let label = format!("{orders} theta = [{}] {}", a.theta, dist.label());
            (theta, dist, a.n, a.burn_in, common.seed.unwrap_or(0), label)
        }
    };
    let data = simulate(&theta, &dist, n, burn_in, seed).map_err(|e| match e {
        qmele::Error::NumericOverflow { .. } => CliError::Numeric(format!("{e} (scenario: {label}, seed {seed})")),
        other => other.into(),
    })?;
    let mut out = String::new();
    if !common.no_header {
        out.push_str("y\n");
    }
    for v in data.values() {
        // Shortest round-trip representation, so refitting the file reproduces the in-memory series.
        let _ = writeln!(out, "{v}");
    }
    let path = write_file(&out_dir(common), &a.output, &out)?;
    println!("wrote {} observations to {}", data.len(), path.display());
    Ok(())
}

fn cmd_mc_table(common: &Common, a: &McArgs) -> Result<(), CliError> {
    let path = common.config.as_ref().ok_or_else(|| CliError::Usage("mc-table needs --config".into()))?;
    let mut cfg = ScenarioConfig::from_file(path)?;
    if let Some(r) = a.replications {
        cfg.replications = r;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    let run = run_mc_table(&cfg, !a.serial)?;
    let dir = out_dir(common);
    let text = table_text(&run.table);
    write_file(&dir, "mc_table.csv", &table_csv(&run.table))?;
    write_file(&dir, "mc_table.txt", &text)?;
    write_file(&dir, "replications.csv", &replications_csv(&cfg, &run.records))?;
    print!("{text}");
    Ok(())
}

fn cmd_hill(common: &Common, a: &HillArgs) -> Result<(), CliError> {
    let mut values = read_column(&a.input.input, a.input.column.as_deref(), common.no_header)?;
    if a.abs {
        values.iter_mut().for_each(|v| *v = v.abs());
    }
    let csv = hill_csv(&values, a.k_max)?;
    write_file(&out_dir(common), "hill.csv", &csv)?;
    print!("{csv}");
    Ok(())
}

fn cmd_region_scan(common: &Common, a: &RegionArgs) -> Result<(), CliError> {
    let alphas = parse_grid(&a.alpha, "--alpha")?;
    let betas = parse_grid(&a.beta, "--beta")?;
    let criterion = match a.criterion {
        RegionName::Moment => RegionCriterion::moment(a.iota),
        RegionName::Stationarity => RegionCriterion::StrictStationarity,
    };
    let seed = common.seed.unwrap_or(qmele::tails::DEFAULT_MC_SEED);
    let cells = region_scan(&alphas, &betas, criterion, &a.dist.dist()?, a.draws, seed)?;
    let mut out = String::from("alpha1,beta1,holds\n");
    for c in &cells {
        let _ = writeln!(out, "{},{},{}", fmt_sig(c.alpha1, 6), fmt_sig(c.beta1, 6), u8::from(c.holds));
    }
    let path = write_file(&out_dir(common), "region.csv", &out)?;
    println!("wrote {} cells to {}", cells.len(), path.display());
    Ok(())
}

fn cmd_acf(common: &Common, a: &AcfArgs) -> Result<(), CliError> {
    let mut values = read_column(&a.input.input, a.input.column.as_deref(), common.no_header)?;
    if a.squared {
        values.iter_mut().for_each(|v| *v *= *v);
    }
    let r = acf(&values, a.max_lag)?;
    let p = pacf(&values, a.max_lag)?;
    let dir = out_dir(common);
    write_file(&dir, "acf.csv", &acf_csv(&r))?;
    write_file(&dir, "pacf.csv", &acf_csv(&p))?;
    println!("band = {}", fmt_sig(r.band, 6));
    println!("acf exceedances: {:?}", r.exceedances());
    println!("pacf exceedances: {:?}", p.exceedances());
    Ok(())
}

fn cmd_efficiency(common: &Common, a: &DistArgs) -> Result<(), CliError> {
    let convention = match a.convention {
        ConventionName::Published => MixtureMomentConvention::Published,
        ConventionName::Exact => MixtureMomentConvention::Exact,
    };
    let r = efficiency_compare_with(&a.dist()?, convention);
    let mut out = String::new();
    let _ = writeln!(out, "distribution = {}", a.dist()?.with_standardization(Standardization::AbsMeanOne).label());
    let _ = writeln!(out, "eta2 = {}", fmt_sig(r.eta2, 10));
    let _ = writeln!(out, "eta4 = {}", fmt_sig(r.eta4, 10));
    let _ = writeln!(out, "eta4_infinite = {}", r.eta4_infinite);
    let _ = writeln!(out, "kappa1 = {}", fmt_sig(r.kappa1, 10));
    let _ = writeln!(out, "kappa2 = {}", fmt_sig(r.kappa2, 10));
    let _ = writeln!(out, "preferred = {}", serde_json::to_value(r.preferred).expect("enum serializes").as_str().unwrap_or("?"));
    if let Some(dir) = &common.out_dir {
        write_file(Path::new(dir), "efficiency.txt", &out)?;
    }
    print!("{out}");
    Ok(())
}
