//! Eigendecomposition of sampled matrices and diagonal overlap
//! computation, plus the conditional-statistics estimators built on them.
//!
//! Right eigenvectors come from the dense nonsymmetric eigensolver
//! (LAPACK geev behind `ndarray-linalg`); left eigenvectors are the rows
//! of S^{-1} from a single LU solve, which enforces exact bi-orthogonal
//! pairing and halves the cost of a second eigendecomposition. Accuracy
//! is monitored through the per-sample residual max_n ||Xv_n - λ_n v_n||/||X||.

mod estimate;

pub use estimate::{
    conditional_overlap_estimate, density_histogram, ConditionalEstimate, GridSpec,
    Histogram, McConfig, McRun, WindowMode, DEFAULT_BLOCK_SAMPLES,
};

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Inverse};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sampling::{MatrixEntries, MatrixSample};

use std::sync::Once;

/// Samples whose eigensolve residual exceeds this are discarded (and
/// counted) rather than repaired.
pub const RESIDUAL_DISCARD: f64 = 1e-6;

static BLAS_THREADS: Once = Once::new();

/// The sample-level parallelism lives in our worker pool; a threaded BLAS
/// underneath would oversubscribe, so pin it to one thread unless the
/// caller already chose otherwise.
pub(crate) fn pin_blas_threads() {
    BLAS_THREADS.call_once(|| {
        if std::env::var_os("OPENBLAS_NUM_THREADS").is_none() {
            std::env::set_var("OPENBLAS_NUM_THREADS", "1");
        }
    });
}

/// Eigenvalues of one sample paired with their diagonal overlaps, sorted
/// by (Re, Im).
#[derive(Debug, Clone)]
pub struct SpectralSample {
    pub eigenvalues: Vec<Complex64>,
    pub overlaps: Vec<f64>,
    pub residual_max: f64,
}

fn eig_any(entries: &MatrixEntries) -> Result<(Array1<Complex64>, Array2<Complex64>)> {
    let run = || -> std::result::Result<_, ndarray_linalg::error::LinalgError> {
        match entries {
            // The real path keeps conjugate eigenpairs exact by construction.
            MatrixEntries::Real(m) => m.eig(),
            MatrixEntries::Complex(m) => m.eig(),
        }
    };
    run().map_err(|e| Error::numerical(format!("eigensolver failed: {e}")))
}

fn frobenius(entries: &MatrixEntries) -> f64 {
    match entries {
        MatrixEntries::Real(m) => m.iter().map(|v| v * v).sum::<f64>().sqrt(),
        MatrixEntries::Complex(m) => m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(),
    }
}

fn as_complex(entries: &MatrixEntries) -> Array2<Complex64> {
    match entries {
        MatrixEntries::Real(m) => m.mapv(|v| Complex64::new(v, 0.0)),
        MatrixEntries::Complex(m) => m.clone(),
    }
}

/// Decompose one sample: eigenvalues, diagonal overlaps
/// O_nn = ||row_n(S^{-1})||² ||col_n(S)||², and the eigenpair residual.
pub fn decompose(sample: &MatrixSample) -> Result<SpectralSample> {
    pin_blas_threads();
    let (eigenvalues, vectors) = eig_any(&sample.entries)?;
    let n = eigenvalues.len();
    let inverse = vectors
        .inv()
        .map_err(|e| Error::numerical(format!("eigenvector matrix is singular: {e}")))?;

    // Residual ||X S - S Λ|| column-wise, scaled by ||X||_F.
    let xc = as_complex(&sample.entries);
    let xs = xc.dot(&vectors);
    let norm_x = frobenius(&sample.entries).max(f64::MIN_POSITIVE);
    let mut residual_max = 0.0f64;
    for j in 0..n {
        let lambda = eigenvalues[j];
        let mut acc = 0.0f64;
        for i in 0..n {
            acc += (xs[(i, j)] - lambda * vectors[(i, j)]).norm_sqr();
        }
        residual_max = residual_max.max(acc.sqrt() / norm_x);
    }

    let mut indexed: Vec<usize> = (0..n).collect();
    indexed.sort_by(|&a, &b| {
        eigenvalues[a]
            .re
            .total_cmp(&eigenvalues[b].re)
            .then(eigenvalues[a].im.total_cmp(&eigenvalues[b].im))
    });

    let mut sorted_eigs = Vec::with_capacity(n);
    let mut overlaps = Vec::with_capacity(n);
    for &j in &indexed {
        let right: f64 = (0..n).map(|i| vectors[(i, j)].norm_sqr()).sum();
        let left: f64 = (0..n).map(|i| inverse[(j, i)].norm_sqr()).sum();
        sorted_eigs.push(eigenvalues[j]);
        overlaps.push(left * right);
    }

    Ok(SpectralSample {
        eigenvalues: sorted_eigs,
        overlaps,
        residual_max,
    })
}

/// max_{ij} |v_{L,i}^† v_{R,j} - δ_ij| for one sample; diagnostic used in
/// tests, not in the Monte Carlo hot path.
pub fn biorthogonality_residual(sample: &MatrixSample) -> Result<f64> {
    pin_blas_threads();
    let (_, vectors) = eig_any(&sample.entries)?;
    let inverse = vectors
        .inv()
        .map_err(|e| Error::numerical(format!("eigenvector matrix is singular: {e}")))?;
    let product = inverse.dot(&vectors);
    let n = product.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((product[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    Ok(worst)
}
