use std::ffi::CStr;
use std::ptr;

use qmele_ffi::*;

fn laplace_path(n: usize, seed: u64) -> Vec<f64> {
    let theta = [0.0, 0.5, 0.1, 0.18, 0.4];
    let mut out = vec![0.0; n];
    let status = unsafe {
        qmele_simulate(
            theta.as_ptr(),
            theta.len(),
            1,
            0,
            1,
            1,
            QmeleInnovation::Laplace,
            0.0,
            1.0,
            QmeleStandardization::AbsMeanOne,
            n,
            500,
            seed,
            out.as_mut_ptr(),
        )
    };
    assert_eq!(status, QmeleStatus::Ok);
    out
}

fn last_error() -> String {
    let p = qmele_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn fit_round_trip() {
    let y = laplace_path(1000, 11);
    let mut fit: *mut QmeleFit = ptr::null_mut();
    let status = unsafe { qmele_fit(y.as_ptr(), y.len(), 1, 0, 1, 1, true, 0.5, 11, &mut fit) };
    assert_eq!(status, QmeleStatus::Ok);
    assert!(qmele_last_error_message().is_null());
    let m = unsafe { qmele_fit_dim(fit) };
    assert_eq!(m, qmele_param_count(1, 0, 1, 1));
    let mut est = vec![0.0; m];
    let mut se = vec![0.0; m];
    let mut cov = vec![0.0; m * m];
    unsafe {
        assert_eq!(qmele_fit_estimates(fit, est.as_mut_ptr(), m), QmeleStatus::Ok);
        assert_eq!(qmele_fit_std_errors(fit, se.as_mut_ptr(), m), QmeleStatus::Ok);
        assert_eq!(qmele_fit_covariance(fit, cov.as_mut_ptr(), m * m), QmeleStatus::Ok);
        assert!(qmele_fit_objective(fit).is_finite());
    }
    let truth = [0.0, 0.5, 0.1, 0.18, 0.4];
    for i in 0..m {
        assert!((est[i] - truth[i]).abs() < 5.0 * se[i], "parameter {i}: {} vs {}", est[i], truth[i]);
        assert!((cov[i * m + i].sqrt() - se[i]).abs() < 1e-15);
        for j in 0..m {
            assert_eq!(cov[i * m + j], cov[j * m + i]);
        }
    }
    let mut small = vec![0.0; m - 1];
    let status = unsafe { qmele_fit_estimates(fit, small.as_mut_ptr(), m - 1) };
    assert_eq!(status, QmeleStatus::BufferTooSmall);
    unsafe { qmele_fit_free(fit) };
}

#[test]
fn errors_map_to_status_codes() {
    let mut fit: *mut QmeleFit = ptr::null_mut();
    let short = [0.1, 0.2, -0.3];
    let status = unsafe { qmele_fit(short.as_ptr(), 3, 1, 0, 1, 1, false, 0.0, 0, &mut fit) };
    assert_eq!(status, QmeleStatus::InsufficientData);
    assert!(fit.is_null());
    assert!(last_error().contains("3"));

    let status = unsafe { qmele_fit(ptr::null(), 10, 1, 0, 1, 1, false, 0.0, 0, &mut fit) };
    assert_eq!(status, QmeleStatus::NullPointer);

    let bad_theta = [0.0, 0.5, -0.1, 0.18, 0.4];
    let mut out = [0.0; 10];
    let status = unsafe {
        qmele_simulate(
            bad_theta.as_ptr(),
            5,
            1,
            0,
            1,
            1,
            QmeleInnovation::Normal,
            0.0,
            1.0,
            QmeleStandardization::VarOne,
            10,
            0,
            1,
            out.as_mut_ptr(),
        )
    };
    assert_eq!(status, QmeleStatus::InvalidArgument);
    assert!(last_error().contains("alpha0"));

    assert_eq!(unsafe { qmele_fit_dim(ptr::null()) }, 0);
    assert!(unsafe { qmele_fit_objective(ptr::null()) }.is_nan());
    unsafe { qmele_fit_free(ptr::null_mut()) };
}

#[test]
fn efficiency_hill_and_weights() {
    let mut eff = QmeleEfficiency {
        kappa1: 0.0,
        kappa2: 0.0,
        eta2: 0.0,
        eta4: 0.0,
        eta4_infinite: false,
        preferred: QmelePreferred::Tie,
    };
    assert_eq!(unsafe { qmele_efficiency(QmeleInnovation::Laplace, 0.0, 1.0, &mut eff) }, QmeleStatus::Ok);
    assert_eq!((eff.kappa1, eff.kappa2, eff.preferred), (5.0, 4.0, QmelePreferred::Qmele));
    assert_eq!(unsafe { qmele_efficiency(QmeleInnovation::StudentT3, 0.0, 1.0, &mut eff) }, QmeleStatus::Ok);
    assert!(eff.eta4_infinite);

    let x = [1.0, 2.0, 4.0, 8.0];
    let mut alpha = 0.0;
    assert_eq!(unsafe { qmele_hill(x.as_ptr(), 4, 2, &mut alpha) }, QmeleStatus::Ok);
    assert!((alpha - 1.0 / (1.5 * 2f64.ln())).abs() < 1e-12);
    assert_eq!(unsafe { qmele_hill(x.as_ptr(), 4, 4, &mut alpha) }, QmeleStatus::InvalidArgument);

    let y = laplace_path(300, 5);
    let mut w = vec![0.0; y.len()];
    assert_eq!(unsafe { qmele_weights(y.as_ptr(), y.len(), 1, 0, 1, 1, w.as_mut_ptr()) }, QmeleStatus::Ok);
    assert!(w.iter().all(|v| *v > 0.0 && *v <= 1.0));
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/qmele.h");
    for symbol in [
        "qmele_last_error_message",
        "qmele_param_count",
        "qmele_fit(",
        "qmele_fit_free",
        "qmele_fit_dim",
        "qmele_fit_estimates",
        "qmele_fit_std_errors",
        "qmele_fit_covariance",
        "qmele_fit_objective",
        "qmele_simulate",
        "qmele_weights",
        "qmele_hill",
        "qmele_efficiency",
        "typedef struct QmeleFit QmeleFit;",
    ] {
        assert!(header.contains(symbol), "header lacks {symbol}");
    }
}
