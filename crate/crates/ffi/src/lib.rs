//! C ABI for the qmele estimators.
//!
//! Every function returns a [`QmeleStatus`]; on failure a message is available
//! from [`qmele_last_error_message`] on the calling thread. Fits are returned
//! as opaque [`QmeleFit`] handles released with [`qmele_fit_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qmele::diagnostics::{efficiency_compare, Preferred};
use qmele::estimation::{fit_self_weighted, Criterion, FitConfig, FitResult, G0Mode};
use qmele::experiments::local_step;
use qmele::model::{simulate, InnovationDist, InnovationKind, ModelOrders, ParamVector, SeriesData, Standardization};
use qmele::tails::hill_estimator;
use qmele::weights::{compute_weights, WeightSpec};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmeleStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InsufficientData = 3,
    DegenerateSample = 4,
    NumericOverflow = 5,
    SingularInformation = 6,
    NonConvergence = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

/// Innovation laws, rescaled according to a [`QmeleStandardization`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmeleInnovation {
    Laplace = 0,
    Normal = 1,
    StudentT3 = 2,
    NormalMixture = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmeleStandardization {
    AbsMeanOne = 0,
    VarOne = 1,
    Raw = 2,
}

/// Estimator with the smaller asymptotic variance factor.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QmelePreferred {
    Qmele = 0,
    Qmle = 1,
    Tie = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QmeleEfficiency {
    pub kappa1: f64,
    pub kappa2: f64,
    pub eta2: f64,
    pub eta4: f64,
    pub eta4_infinite: bool,
    pub preferred: QmelePreferred,
}

/// Opaque fitted model.
pub struct QmeleFit {
    inner: FitResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &qmele::Error) -> QmeleStatus {
    use qmele::Error as E;
    match e {
        E::Domain(_) | E::UnsupportedOrder(_) => QmeleStatus::InvalidArgument,
        E::InsufficientData { .. } => QmeleStatus::InsufficientData,
        E::DegenerateSample(_) => QmeleStatus::DegenerateSample,
        E::NumericOverflow { .. } => QmeleStatus::NumericOverflow,
        E::SingularInformation { .. } => QmeleStatus::SingularInformation,
        E::NonConvergence(_) => QmeleStatus::NonConvergence,
    }
}

enum Failure {
    Status(QmeleStatus, String),
    Core(qmele::Error),
}

impl From<qmele::Error> for Failure {
    fn from(e: qmele::Error) -> Self {
        Failure::Core(e)
    }
}

fn null(name: &str) -> Failure {
    Failure::Status(QmeleStatus::NullPointer, format!("`{name}` is null"))
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QmeleStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QmeleStatus::Ok,
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            QmeleStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be null or point to `len` readable values.
unsafe fn slice<'a, T>(ptr: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if ptr.is_null() {
        return Err(null(name));
    }
    Ok(unsafe { std::slice::from_raw_parts(ptr, len) })
}

/// # Safety
/// `ptr` must be null or point to `len` writable values.
unsafe fn slice_mut<'a, T>(ptr: *mut T, len: usize, name: &str) -> Result<&'a mut [T], Failure> {
    if ptr.is_null() {
        return Err(null(name));
    }
    Ok(unsafe { std::slice::from_raw_parts_mut(ptr, len) })
}

fn innovation(
    kind: QmeleInnovation,
    mix_eps: f64,
    mix_tau: f64,
    standardization: QmeleStandardization,
) -> Result<InnovationDist, Failure> {
    let kind = match kind {
        QmeleInnovation::Laplace => InnovationKind::Laplace,
        QmeleInnovation::Normal => InnovationKind::Normal,
        QmeleInnovation::StudentT3 => InnovationKind::StudentT3,
        QmeleInnovation::NormalMixture => InnovationKind::NormalMixture { eps: mix_eps, tau: mix_tau },
    };
    let standardization = match standardization {
        QmeleStandardization::AbsMeanOne => Standardization::AbsMeanOne,
        QmeleStandardization::VarOne => Standardization::VarOne,
        QmeleStandardization::Raw => Standardization::Raw,
    };
    Ok(InnovationDist::new(kind, standardization)?)
}

/// Message describing the last failure on this thread, or null. Valid until the next call into this library.
#[no_mangle]
pub extern "C" fn qmele_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Number of parameters of ARMA(p,q)-GARCH(r,s).
#[no_mangle]
pub extern "C" fn qmele_param_count(p: usize, q: usize, r: usize, s: usize) -> usize {
    ModelOrders::new(p, q, r, s).dim()
}

/// Fits the self-weighted QMELE, followed by the one-step local QMELE when `local` is true.
///
/// `g0 > 0` fixes the innovation density at zero; otherwise it is estimated by a kernel.
///
/// # Safety
/// `values` must point to `n` doubles and `out` to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qmele_fit(
    values: *const f64,
    n: usize,
    p: usize,
    q: usize,
    r: usize,
    s: usize,
    local: bool,
    g0: f64,
    seed: u64,
    out: *mut *mut QmeleFit,
) -> QmeleStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        unsafe { *out = ptr::null_mut() };
        let data = SeriesData::new(unsafe { slice(values, n, "values")? }.to_vec())?;
        let orders = ModelOrders::new(p, q, r, s);
        let g0_mode = if g0 > 0.0 { G0Mode::KnownDensity(g0) } else { G0Mode::KernelAtZero };
        let config = FitConfig { g0_mode, seed, ..FitConfig::default() };
        let mut fit = fit_self_weighted(&data, orders, &config, Criterion::Qmele)?;
        if !fit.converged {
            return Err(Failure::Status(QmeleStatus::NonConvergence, "self-weighted QMELE did not converge".into()));
        }
        if local {
            fit = local_step(&fit, &data, Criterion::Qmele, g0_mode)?;
        }
        unsafe { *out = Box::into_raw(Box::new(QmeleFit { inner: fit })) };
        Ok(())
    })
}

/// Releases a fit handle. Null is ignored.
///
/// # Safety
/// `fit` must be null or a handle from [`qmele_fit`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qmele_fit_free(fit: *mut QmeleFit) {
    if !fit.is_null() {
        drop(unsafe { Box::from_raw(fit) });
    }
}

/// # Safety
/// `fit` must be null or a live handle.
unsafe fn fit_ref<'a>(fit: *const QmeleFit) -> Result<&'a FitResult, Failure> {
    if fit.is_null() {
        return Err(null("fit"));
    }
    Ok(unsafe { &(*fit).inner })
}

fn copy_out(src: &[f64], dst: *mut f64, len: usize) -> Result<(), Failure> {
    if len < src.len() {
        return Err(Failure::Status(
            QmeleStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} needed", src.len()),
        ));
    }
    unsafe { slice_mut(dst, src.len(), "out")? }.copy_from_slice(src);
    Ok(())
}

/// Number of parameters of a fit, or 0 for a null handle.
///
/// # Safety
/// `fit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qmele_fit_dim(fit: *const QmeleFit) -> usize {
    unsafe { fit_ref(fit) }.map_or(0, |f| f.theta_hat.dim())
}

/// Copies the estimate into `out` (capacity `len`).
///
/// # Safety
/// `fit` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qmele_fit_estimates(fit: *const QmeleFit, out: *mut f64, len: usize) -> QmeleStatus {
    guard(|| copy_out(unsafe { fit_ref(fit)? }.theta_hat.as_slice(), out, len))
}

/// Copies the standard errors into `out` (capacity `len`).
///
/// # Safety
/// As for [`qmele_fit_estimates`].
#[no_mangle]
pub unsafe extern "C" fn qmele_fit_std_errors(fit: *const QmeleFit, out: *mut f64, len: usize) -> QmeleStatus {
    guard(|| copy_out(&unsafe { fit_ref(fit)? }.std_errors, out, len))
}

/// Copies the covariance matrix, row-major, into `out` (capacity `len` ≥ dim²).
///
/// # Safety
/// As for [`qmele_fit_estimates`].
#[no_mangle]
pub unsafe extern "C" fn qmele_fit_covariance(fit: *const QmeleFit, out: *mut f64, len: usize) -> QmeleStatus {
    guard(|| {
        let f = unsafe { fit_ref(fit)? };
        let row_major: Vec<f64> = f.covariance.transpose().iter().copied().collect();
        copy_out(&row_major, out, len)
    })
}

/// Objective value at the estimate, or NaN for a null handle.
///
/// # Safety
/// `fit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qmele_fit_objective(fit: *const QmeleFit) -> f64 {
    unsafe { fit_ref(fit) }.map_or(f64::NAN, |f| f.objective_value)
}

/// Simulates `n` observations into `out` after discarding `burn_in`.
///
/// # Safety
/// `theta` must point to `theta_len` doubles and `out` to `n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qmele_simulate(
    theta: *const f64,
    theta_len: usize,
    p: usize,
    q: usize,
    r: usize,
    s: usize,
    innovation_kind: QmeleInnovation,
    mix_eps: f64,
    mix_tau: f64,
    standardization: QmeleStandardization,
    n: usize,
    burn_in: usize,
    seed: u64,
    out: *mut f64,
) -> QmeleStatus {
    guard(|| {
        let theta = unsafe { slice(theta, theta_len, "theta")? };
        let theta = ParamVector::from_flat(ModelOrders::new(p, q, r, s), theta.to_vec())?;
        let dist = innovation(innovation_kind, mix_eps, mix_tau, standardization)?;
        let out = unsafe { slice_mut(out, n, "out")? };
        let data = simulate(&theta, &dist, n, burn_in, seed)?;
        out.copy_from_slice(data.values());
        Ok(())
    })
}

/// Self-weights of `values` (default weighting) for the given orders, written to `out`.
///
/// # Safety
/// `values` must point to `n` doubles and `out` to `n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qmele_weights(
    values: *const f64,
    n: usize,
    p: usize,
    q: usize,
    r: usize,
    s: usize,
    out: *mut f64,
) -> QmeleStatus {
    guard(|| {
        let data = SeriesData::new(unsafe { slice(values, n, "values")? }.to_vec())?;
        let w = compute_weights(&data, &WeightSpec::default(), ModelOrders::new(p, q, r, s))?;
        unsafe { slice_mut(out, n, "out")? }.copy_from_slice(&w);
        Ok(())
    })
}

/// Hill tail-index estimate from the `k` largest positive values.
///
/// # Safety
/// `values` must point to `n` doubles and `out` to one writable double.
#[no_mangle]
pub unsafe extern "C" fn qmele_hill(values: *const f64, n: usize, k: usize, out: *mut f64) -> QmeleStatus {
    guard(|| {
        let alpha = hill_estimator(unsafe { slice(values, n, "values")? }, k)?;
        let dst = unsafe { slice_mut(out, 1, "out")? };
        dst[0] = alpha;
        Ok(())
    })
}

/// Efficiency factors for the law rescaled to E|eta| = 1.
///
/// # Safety
/// `out` must point to one writable [`QmeleEfficiency`].
#[no_mangle]
pub unsafe extern "C" fn qmele_efficiency(
    innovation_kind: QmeleInnovation,
    mix_eps: f64,
    mix_tau: f64,
    out: *mut QmeleEfficiency,
) -> QmeleStatus {
    guard(|| {
        let dist = innovation(innovation_kind, mix_eps, mix_tau, QmeleStandardization::AbsMeanOne)?;
        let r = efficiency_compare(&dist);
        let preferred = match r.preferred {
            Preferred::Qmele => QmelePreferred::Qmele,
            Preferred::Qmle => QmelePreferred::Qmle,
            Preferred::Tie => QmelePreferred::Tie,
        };
        let value = QmeleEfficiency {
            kappa1: r.kappa1,
            kappa2: r.kappa2,
            eta2: r.eta2,
            eta4: r.eta4,
            eta4_infinite: r.eta4_infinite,
            preferred,
        };
        let dst = unsafe { slice_mut(out, 1, "out")? };
        dst[0] = value;
        Ok(())
    })
}
