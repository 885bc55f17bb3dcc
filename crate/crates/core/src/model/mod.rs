//! ARMA–GARCH parameterization, filtering recursions and path simulation.

mod filter;
mod innovation;
mod params;
mod series;
mod simulate;

pub use filter::{filter, filter_levels, FilterOutput, H_OVERFLOW_LIMIT};
pub use innovation::{InnovationDist, InnovationKind, MixtureMomentConvention, Standardization};
pub use params::{ModelOrders, ParamVector};
pub use series::{log_return_transform, SeriesData};
pub use simulate::{simulate, simulate_with_innovations, DEFAULT_BURN_IN};
