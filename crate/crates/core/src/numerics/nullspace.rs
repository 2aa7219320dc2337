use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ncpoly::CMatrix;

pub const DEFAULT_NULLSPACE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct NullspaceResult {
    /// Orthonormal basis of the numerical kernel.
    pub basis: Vec<DVector<Complex64>>,
    /// All singular values, descending.
    pub singular_values: Vec<f64>,
    /// Absolute cut used: `tol * sigma_max`.
    pub tol_used: f64,
}

/// Right singular vectors whose singular values fall below `tol * sigma_max`.
pub fn nullspace(a: &CMatrix, tol: f64) -> Result<NullspaceResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let (rows, cols) = a.shape();
    if cols == 0 {
        return Ok(NullspaceResult {
            basis: vec![],
            singular_values: vec![],
            tol_used: 0.0,
        });
    }
    // pad wide matrices so the decomposition yields a full right basis
    let padded = if rows < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    let cut = tol * sigma_max;
    let basis = order
        .iter()
        .filter(|&&i| svd.singular_values[i] < cut || sigma_max == 0.0)
        .map(|&i| v_t.row(i).adjoint().into_owned())
        .collect();
    Ok(NullspaceResult {
        basis,
        singular_values,
        tol_used: cut,
    })
}
