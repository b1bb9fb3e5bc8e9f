//! Small dense linear-algebra helpers shared by the modules.

use nalgebra::{DMatrix, DVector, Matrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Singular values of `m` in decreasing order together with the numerical rank:
/// a singular value counts as zero when it is below `rel_tol · σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> (usize, Vec<f64>) {
    let svd = m.clone().svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return (0, sv);
    }
    let rank = sv.iter().filter(|&&s| s > rel_tol * smax).count();
    (rank, sv)
}

/// Orthonormal basis (as columns) of the numerical kernel of `m`.
///
/// A zero matrix has the whole space as kernel. `abs_floor` guards against
/// declaring a genuinely zero matrix full rank through its rounding noise.
pub fn null_space(m: &DMatrix<f64>, rel_tol: f64, abs_floor: f64) -> DMatrix<f64> {
    let n = m.ncols();
    // pad wide matrices with zero rows so the thin SVD returns a complete V
    let padded = if m.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let thresh = (rel_tol * smax).max(abs_floor);
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&i| sv[i] <= thresh)
        .map(|i| v_t.row(i).transpose())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis of the column span of `m` (numerical rank with `rel_tol`).
pub fn column_basis(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let n = m.nrows();
    if m.ncols() == 0 {
        return DMatrix::zeros(n, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax > 0.0 && s > rel_tol * smax)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Sum of the principal 2×2 minors; the `s` in `λ³ − tλ² + sλ − det`.
pub fn second_trace(l: &Matrix3<f64>) -> f64 {
    let minor = |i: usize, j: usize| l[(i, i)] * l[(j, j)] - l[(i, j)] * l[(j, i)];
    minor(0, 1) + minor(0, 2) + minor(1, 2)
}

/// Deterministic sample points in `[-scale, scale]^dim`, used by identity oracles.
pub fn sample_points(count: usize, dim: usize, scale: f64, seed: u64) -> Vec<DVector<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| DVector::from_fn(dim, |_, _| rng.gen_range(-scale..scale)))
        .collect()
}

pub fn to_matrix3(m: &DMatrix<f64>) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| m[(i, j)])
}

pub fn to_dmatrix(m: &Matrix3<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |i, j| m[(i, j)])
}
