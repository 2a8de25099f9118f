//! Thin wrappers around nalgebra for the two decompositions the crate needs:
//! largest singular values (operator norms) and SVD nullspaces.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use nalgebra::DMatrix;

/// Convergence tolerance for singular value iterations.
pub const SVD_EPS: f64 = 1e-12;

/// Iteration cap; running past it is reported as a hard error.
pub const SVD_MAX_ITER: usize = 4000;

/// Relative threshold below which a singular value counts as zero when
/// extracting nullspaces.
pub const NULLSPACE_RELATIVE_THRESHOLD: f64 = 1e-9;

/// Build a matrix from a row-major coefficient slice.
pub fn from_row_major<S: Scalar>(rows: usize, cols: usize, coeffs: &[S]) -> DMatrix<S> {
    assert_eq!(rows * cols, coeffs.len());
    DMatrix::from_fn(rows, cols, |r, c| coeffs[r * cols + c])
}

/// Largest singular value of a row-major matrix.
///
/// The all-zero matrix short-circuits to 0 so degenerate inputs cannot stall
/// the iteration.
pub fn operator_norm<S: Scalar>(rows: usize, cols: usize, coeffs: &[S]) -> Result<f64> {
    if coeffs.iter().all(|x| x.is_zero_exact()) {
        return Ok(0.0);
    }
    let m = from_row_major(rows, cols, coeffs);
    let svd = m
        .try_svd(false, false, SVD_EPS, SVD_MAX_ITER)
        .ok_or(Error::NormDidNotConverge)?;
    Ok(svd
        .singular_values
        .iter()
        .fold(0.0f64, |acc, s| acc.max(*s)))
}

/// Orthonormal basis of the (right) nullspace of `m`, using the relative
/// singular value threshold above. Returns column vectors.
pub fn nullspace<S: Scalar>(m: &DMatrix<S>) -> Result<Vec<Vec<S>>> {
    let ncols = m.ncols();
    if ncols == 0 {
        return Ok(Vec::new());
    }
    if m.nrows() == 0 || m.iter().all(|x| x.is_zero_exact()) {
        // Every direction is null; hand back the standard basis.
        let mut basis = Vec::with_capacity(ncols);
        for j in 0..ncols {
            let mut v = vec![S::from_re(0.0); ncols];
            v[j] = S::from_re(1.0);
            basis.push(v);
        }
        return Ok(basis);
    }
    // The thin SVD of a wide matrix carries too few right singular vectors to
    // span the nullspace; padding with zero rows keeps the nullspace intact
    // and makes v_t square in the column dimension.
    let work = if m.nrows() < ncols {
        let mut p = DMatrix::from_element(ncols, ncols, S::from_re(0.0));
        p.view_mut((0, 0), (m.nrows(), ncols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = work
        .try_svd(false, true, SVD_EPS, SVD_MAX_ITER)
        .ok_or(Error::NormDidNotConverge)?;
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let smax = svd
        .singular_values
        .iter()
        .fold(0.0f64, |acc, s| acc.max(*s));
    let cutoff = smax * NULLSPACE_RELATIVE_THRESHOLD;
    let mut basis = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= cutoff {
            let row = v_t.row(i);
            basis.push(row.iter().map(|x| x.conj_s()).collect());
        }
    }
    Ok(basis)
}
