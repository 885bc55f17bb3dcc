//! Robust estimation for ARMA–GARCH/IGARCH time series.
//!
//! The crate implements the global self-weighted quasi-maximum exponential
//! likelihood estimator (QMELE), the one-step local QMELE built on top of it,
//! the Gaussian self-weighted/local QMLE baselines, sandwich standard errors,
//! and the tail and residual diagnostics used to decide between them.
//!
//! ```
//! use qmele::model::{InnovationDist, ModelOrders, ParamVector, simulate};
//!
//! let orders = ModelOrders::new(1, 0, 1, 1);
//! let theta = ParamVector::from_flat(orders, vec![0.0, 0.5, 0.1, 0.18, 0.4]).unwrap();
//! let y = simulate(&theta, &InnovationDist::laplace(), 200, 500, 7).unwrap();
//! assert_eq!(y.len(), 200);
//! ```

pub mod diagnostics;
pub mod error;
pub mod estimation;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod tails;
pub mod weights;

pub use error::{Error, Result};
