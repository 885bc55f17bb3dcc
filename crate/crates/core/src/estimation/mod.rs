//! Self-weighted and local QMELE/QMLE estimation with sandwich covariances.

mod covariance;
mod density;
mod fit;
mod local;
mod nelder_mead;
mod objective;
mod transform;

pub use covariance::{
    covariance_local, covariance_qmle_local, covariance_qmle_self_weighted, covariance_self_weighted,
    qmele_information, qmele_score_variance,
};
pub use density::{estimate_eta2, estimate_g0, excess_kurtosis_factor, G0Mode, ETA2_FLOOR};
pub use fit::{
    fit_self_weighted, initial_estimate, Criterion, EstimatorKind, FitConfig, FitResult, OptimizerConfig,
};
pub use local::{
    local_qmele_step, local_qmle_step, qmle_information_star, qmle_score_star, sigma_star, t_star,
    MAX_STEP_HALVINGS,
};
pub use nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadResult};
pub use objective::{objective, qmele_objective, qmle_objective};
pub use transform::{from_unconstrained, to_unconstrained};
