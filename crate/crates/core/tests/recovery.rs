//! Monte Carlo recovery and comparison studies at desk scale.
//!
//! Seeds and thresholds are fixed up front.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qmele::diagnostics::{efficiency_compare_with, standardized_residuals};
use qmele::estimation::{fit_self_weighted, Criterion, EstimatorKind, FitConfig, OptimizerConfig};
use qmele::experiments::{run_mc_table, EstimateOutcome, McRun, ScenarioConfig};
use qmele::model::{
    filter_levels, simulate, InnovationDist, InnovationKind, MixtureMomentConvention, ModelOrders, ParamVector,
    Standardization,
};
use qmele::weights::{compute_weights, WeightSpec};

const SEED: u64 = 2024;
const DESIGN: [f64; 5] = [0.0, 0.5, 0.1, 0.18, 0.4];
const IGARCH_DESIGN: [f64; 5] = [0.0, 0.5, 0.1, 0.3, 0.4];

fn orders() -> ModelOrders {
    ModelOrders::new(1, 0, 1, 1)
}

fn scenario(innovation: &str, estimators: &str) -> ScenarioConfig {
    ScenarioConfig::from_toml_str(&format!(
        r#"
name = "recovery"
theta0 = {DESIGN:?}
n = 1000
replications = 200
seed = {SEED}
estimators = {estimators}

[orders]
p = 1
q = 0
r = 1
s = 1

[innovation]
kind = "{innovation}"
"#
    ))
    .unwrap()
}

fn ok_pairs(run: &McRun, a: EstimatorKind, b: EstimatorKind) -> Vec<(Vec<f64>, Vec<f64>)> {
    run.records
        .iter()
        .filter_map(|r| match (&r.outcomes[&a], &r.outcomes[&b]) {
            (EstimateOutcome::Ok { theta: x, .. }, EstimateOutcome::Ok { theta: y, .. }) => Some((x.clone(), y.clone())),
            _ => None,
        })
        .collect()
}

#[test]
fn laplace_design_coverage_and_local_step_gain() {
    let run = run_mc_table(&scenario("laplace", r#"["sw-qmele", "local-qmele"]"#), true).unwrap();

    // Five-standard-error recovery on at least 95% of seeds.
    let mut covered = 0;
    for r in &run.records {
        if let EstimateOutcome::Ok { theta, std_errors } = &r.outcomes[&EstimatorKind::SelfWeightedQmele] {
            if theta.iter().zip(std_errors).zip(DESIGN).all(|((t, s), t0)| (t - t0).abs() < 5.0 * s) {
                covered += 1;
            }
        }
    }
    assert!(covered as f64 >= 0.95 * run.records.len() as f64, "covered {covered} of {}", run.records.len());

    // The one-step update does not lose accuracy on the mean-equation parameters.
    let pairs = ok_pairs(&run, EstimatorKind::SelfWeightedQmele, EstimatorKind::LocalQmele);
    assert!(pairs.len() >= 190);
    for j in 0..2 {
        let mse = |pick: fn(&(Vec<f64>, Vec<f64>)) -> &Vec<f64>| {
            pairs.iter().map(|p| (pick(p)[j] - DESIGN[j]).powi(2)).sum::<f64>() / pairs.len() as f64
        };
        let (init, local) = (mse(|p| &p.0), mse(|p| &p.1));
        assert!(local <= init, "component {j}: local {local} vs initializer {init}");
    }
}

#[test]
fn gaussian_criterion_wins_under_normal_innovations() {
    let run = run_mc_table(&scenario("normal", r#"["sw-qmele", "sw-qmle"]"#), true).unwrap();
    let sd_phi = |kind| run.table.get(kind).unwrap().params[1].sd.unwrap();
    let (qmle, qmele) = (sd_phi(EstimatorKind::SelfWeightedQmle), sd_phi(EstimatorKind::SelfWeightedQmele));
    assert!(qmle < qmele, "QMLE {qmle} vs QMELE {qmele}");
}

/// Weighted LAD for y_t = μ + φ y_{t−1} + ε_t by enumerating every basic solution.
fn weighted_lad_ar1(y: &[f64], w: &[f64]) -> (f64, f64, f64) {
    let x: Vec<f64> = (0..y.len()).map(|t| if t == 0 { 0.0 } else { y[t - 1] }).collect();
    let loss = |mu: f64, phi: f64| (0..y.len()).map(|t| w[t] * (y[t] - mu - phi * x[t]).abs()).sum::<f64>();
    let mut best = (f64::NAN, f64::NAN, f64::INFINITY);
    for i in 0..y.len() {
        for k in i + 1..y.len() {
            let dx = x[i] - x[k];
            if dx.abs() < 1e-12 {
                continue;
            }
            let phi = (y[i] - y[k]) / dx;
            let mu = y[i] - phi * x[i];
            let l = loss(mu, phi);
            if l < best.2 {
                best = (mu, phi, l);
            }
        }
    }
    best
}

#[test]
fn constant_volatility_fit_reduces_to_weighted_lad() {
    let orders = ModelOrders::new(1, 0, 0, 0);
    let theta = ParamVector::from_flat(orders, vec![0.2, 0.4, 1.0]).unwrap();
    let data = simulate(&theta, &InnovationDist::laplace(), 120, 200, 99).unwrap();
    let y = data.values().to_vec();
    let config = FitConfig {
        optimizer: OptimizerConfig { simplex_tolerance: 1e-16, ..OptimizerConfig::default() },
        ..FitConfig::default()
    };
    let fit = fit_self_weighted(&data, orders, &config, Criterion::Qmele).unwrap();
    assert!(fit.converged);
    let w = compute_weights(&data, &WeightSpec::default(), orders).unwrap();
    let (mu, phi, lad) = weighted_lad_ar1(&y, &w);
    let g = fit.theta_hat.gamma();
    assert!((g[0] - mu).abs() < 1e-6 && (g[1] - phi).abs() < 1e-6, "fit {g:?} vs LAD ({mu}, {phi})");
    // The volatility level is the profile value √α₀ = Σw|ε| / Σw.
    let scale = lad / w.iter().sum::<f64>();
    assert!((fit.theta_hat.alpha0().sqrt() - scale).abs() < 1e-6 * scale.max(1.0));
}

#[test]
fn fitted_residuals_have_unit_absolute_mean() {
    let theta = ParamVector::from_flat(orders(), DESIGN.to_vec()).unwrap();
    for seed in 0..5 {
        let data = simulate(&theta, &InnovationDist::laplace(), 1000, 500, SEED + seed).unwrap();
        let fit = fit_self_weighted(&data, orders(), &FitConfig::default(), Criterion::Qmele).unwrap();
        let eta = standardized_residuals(&fit, &data).unwrap();
        let abs_mean = eta.iter().map(|e| e.abs()).sum::<f64>() / eta.len() as f64;
        assert!((abs_mean - 1.0).abs() < 0.05, "seed {seed}: {abs_mean}");
    }
}

#[test]
fn closed_form_moments_match_sampling() {
    const DRAWS: usize = 1_000_000;
    let kinds = [
        InnovationKind::Laplace,
        InnovationKind::Normal,
        InnovationKind::NormalMixture { eps: 0.99, tau: 0.1 },
        InnovationKind::NormalMixture { eps: 0.5, tau: 3.0 },
        InnovationKind::NormalMixture { eps: 1.0, tau: (std::f64::consts::PI / 2.0).sqrt() },
    ];
    for (i, kind) in kinds.into_iter().enumerate() {
        let dist = InnovationDist::new(kind, Standardization::AbsMeanOne).unwrap();
        let report = efficiency_compare_with(&dist, MixtureMomentConvention::Exact);
        let mut draws = vec![0.0; DRAWS];
        dist.fill(&mut ChaCha8Rng::seed_from_u64(SEED + i as u64), &mut draws);
        for (power, closed) in [(2, report.eta2), (4, report.eta4)] {
            let values: Vec<f64> = draws.iter().map(|x| x.powi(power)).collect();
            let mean = values.iter().sum::<f64>() / DRAWS as f64;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (DRAWS - 1) as f64;
            let se = (var / DRAWS as f64).sqrt();
            assert!((mean - closed).abs() <= 3.0 * se, "{kind:?} power {power}: sample {mean} vs {closed} (se {se})");
        }
    }
}

#[test]
fn integrated_design_is_far_more_volatile() {
    let finite = ParamVector::from_flat(orders(), DESIGN.to_vec()).unwrap();
    let integrated = ParamVector::from_flat(orders(), IGARCH_DESIGN.to_vec()).unwrap();
    let variance = |theta: &ParamVector, seed| {
        let y = simulate(theta, &InnovationDist::laplace(), 1000, 500, seed).unwrap().into_vec();
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (y.len() - 1) as f64
    };
    let mut ratios: Vec<f64> = (0..20).map(|i| variance(&integrated, SEED + i) / variance(&finite, SEED + i)).collect();
    ratios.sort_by(f64::total_cmp);
    assert!(ratios.iter().filter(|r| **r > 1.0).count() >= 18, "{ratios:?}");
    assert!(ratios[10] > 2.0, "median ratio {}", ratios[10]);
}

#[test]
fn filter_levels_track_simulation_inputs() {
    let theta = ParamVector::from_flat(orders(), DESIGN.to_vec()).unwrap();
    let data = simulate(&theta, &InnovationDist::laplace(), 400, 500, SEED).unwrap();
    let (eps, h) = filter_levels(&theta, &data).unwrap();
    assert!(h.iter().all(|v| *v > 0.0) && eps.len() == 400);
}
