//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest condition number accepted before a symmetric system is declared singular.
pub const CONDITION_LIMIT: f64 = 1e12;

pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// Inverse of a symmetric positive-definite matrix via its eigendecomposition.
///
/// Fails with [`Error::SingularInformation`] when the smallest eigenvalue is
/// nonpositive or the condition number exceeds [`CONDITION_LIMIT`].
pub fn spd_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularInformation { condition: f64::INFINITY });
    }
    let eig = symmetrize(a).symmetric_eigen();
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::SingularInformation { condition });
    }
    let inv_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l));
    let inv = &eig.eigenvectors * inv_diag * eig.eigenvectors.transpose();
    Ok(symmetrize(&inv))
}

/// Solves A x = b for symmetric positive-definite A.
pub fn spd_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    Ok(spd_inverse(a)? * b)
}

/// A⁻¹ B A⁻¹ · `scale`, symmetrized.
pub fn sandwich(bread: &DMatrix<f64>, meat: &DMatrix<f64>, scale: f64) -> Result<DMatrix<f64>> {
    let inv = spd_inverse(bread)?;
    Ok(symmetrize(&(&inv * meat * &inv * scale)))
}

/// Adds `c · u u′` to `acc`, writing each off-diagonal product to both triangles so
/// a symmetric accumulator stays exactly symmetric.
pub(crate) fn add_outer(acc: &mut DMatrix<f64>, u: &[f64], c: f64) {
    let m = u.len();
    for i in 0..m {
        let ci = c * u[i];
        if ci == 0.0 {
            continue;
        }
        acc[(i, i)] += ci * u[i];
        for j in i + 1..m {
            let v = ci * u[j];
            acc[(i, j)] += v;
            acc[(j, i)] += v;
        }
    }
}

/// Ordinary least squares β̂ = (X′X)⁻¹X′y; rows of `x` are observations.
pub fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> Option<DVector<f64>> {
    let xtx = x.transpose() * x;
    let xty = x.transpose() * y;
    xtx.cholesky().map(|c| c.solve(&xty))
}
