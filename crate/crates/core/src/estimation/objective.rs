use super::Criterion;
use crate::error::{Error, Result};
use crate::model::{filter_levels, ParamVector, SeriesData};

fn check_weights(data: &SeriesData, weights: &[f64]) -> Result<()> {
    if weights.len() != data.len() {
        return Err(Error::domain(format!(
            "{} weights supplied for {} observations",
            weights.len(),
            data.len()
        )));
    }
    Ok(())
}

/// Weighted exponential quasi-likelihood
/// (1/n) Σ w_t [log √h̃_t(θ) + |ε̃_t(γ)|/√h̃_t(θ)].
pub fn qmele_objective(theta: &ParamVector, data: &SeriesData, weights: &[f64]) -> Result<f64> {
    check_weights(data, weights)?;
    let (eps, h) = filter_levels(theta, data)?;
    let total: f64 = eps
        .iter()
        .zip(&h)
        .zip(weights)
        .map(|((e, h), w)| {
            let sd = h.sqrt();
            w * (sd.ln() + e.abs() / sd)
        })
        .sum();
    Ok(total / data.len() as f64)
}

/// Weighted Gaussian quasi-likelihood (1/n) Σ w_t [log h̃_t(θ) + ε̃_t²/h̃_t(θ)].
pub fn qmle_objective(theta: &ParamVector, data: &SeriesData, weights: &[f64]) -> Result<f64> {
    check_weights(data, weights)?;
    let (eps, h) = filter_levels(theta, data)?;
    let total: f64 = eps
        .iter()
        .zip(&h)
        .zip(weights)
        .map(|((e, h), w)| w * (h.ln() + e * e / h))
        .sum();
    Ok(total / data.len() as f64)
}

pub fn objective(criterion: Criterion, theta: &ParamVector, data: &SeriesData, weights: &[f64]) -> Result<f64> {
    match criterion {
        Criterion::Qmele => qmele_objective(theta, data, weights),
        Criterion::Qmle => qmle_objective(theta, data, weights),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelOrders;

    fn constant(alpha0: f64) -> ParamVector {
        ParamVector::from_flat(ModelOrders::new(0, 0, 0, 0), vec![0.0, alpha0]).unwrap()
    }

    #[test]
    fn hand_evaluations() {
        let zeros = SeriesData::new(vec![0.0; 4]).unwrap();
        assert_eq!(qmele_objective(&constant(1.0), &zeros, &[1.0; 4]).unwrap(), 0.0);
        assert_eq!(qmle_objective(&constant(1.0), &zeros, &[1.0; 4]).unwrap(), 0.0);

        let y = SeriesData::new(vec![2.0, -2.0]).unwrap();
        let v = qmele_objective(&constant(4.0), &y, &[1.0, 1.0]).unwrap();
        assert!((v - (2f64.ln() + 1.0)).abs() < 1e-15);
        assert!((v - 1.693147).abs() < 1e-6);
        let v = qmle_objective(&constant(4.0), &y, &[1.0, 1.0]).unwrap();
        assert!((v - (4f64.ln() + 1.0)).abs() < 1e-15);
        assert!((v - 2.386294).abs() < 1e-6);
    }

    #[test]
    fn weight_scaling_scales_objective() {
        let y = SeriesData::new(vec![1.0, -0.5, 2.0]).unwrap();
        let w = [1.0, 0.5, 0.25];
        let w3: Vec<f64> = w.iter().map(|v| 3.0 * v).collect();
        for a in [0.5, 1.0, 2.0] {
            let base = qmele_objective(&constant(a), &y, &w).unwrap();
            let scaled = qmele_objective(&constant(a), &y, &w3).unwrap();
            assert!((scaled - 3.0 * base).abs() < 1e-14);
        }
    }

    #[test]
    fn qmle_constant_model_minimized_at_mean_square() {
        let y = SeriesData::new(vec![1.0, -2.0, 0.5, 3.0]).unwrap();
        let ms = y.values().iter().map(|v| v * v).sum::<f64>() / 4.0;
        let at = |a: f64| qmle_objective(&constant(a), &y, &[1.0; 4]).unwrap();
        assert!(at(ms) < at(ms * 1.01));
        assert!(at(ms) < at(ms * 0.99));
    }

    #[test]
    fn weight_length_mismatch() {
        let y = SeriesData::new(vec![1.0, 2.0]).unwrap();
        assert!(qmele_objective(&constant(1.0), &y, &[1.0]).is_err());
    }
}
