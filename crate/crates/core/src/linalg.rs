//! Numerical linear algebra on small complex matrices, backed by nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::scalar::C64;

/// Relative singular-value threshold for rank decisions.
pub const RANK_REL_TOL: f64 = 1e-9;

/// Orthonormal basis of `{v : A v = 0}`; singular values below
/// `rel_tol · σ_max` count as zero.
pub fn null_space(a: &DMatrix<C64>, rel_tol: f64) -> Vec<DVector<C64>> {
    let n = a.ncols();
    if n == 0 {
        return Vec::new();
    }
    // thin SVD of a wide matrix would miss part of the kernel
    let padded = if a.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = rel_tol * smax;
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| smax == 0.0 || **s <= cut)
        .map(|(i, _)| v_t.row(i).transpose().map(|z| z.conj()))
        .collect()
}

pub fn rank(a: &DMatrix<C64>, rel_tol: f64) -> usize {
    a.ncols() - null_space(a, rel_tol).len()
}

/// Stacks the linear maps `X ↦ X·Aₖ − Bₖ·X` (column-major vectorisation)
/// into one matrix whose kernel is the space of intertwiners
/// `X·Aₖ = Bₖ·X`. `X` is `rows × cols`, `Aₖ` is `cols × cols` and `Bₖ` is
/// `rows × rows`.
pub fn intertwining_system(pairs: &[(DMatrix<C64>, DMatrix<C64>)], rows: usize, cols: usize) -> DMatrix<C64> {
    let n = rows * cols;
    let mut out = DMatrix::zeros(pairs.len() * n, n);
    for (k, (a, b)) in pairs.iter().enumerate() {
        let left = a.transpose().kronecker(&DMatrix::identity(rows, rows));
        let right = DMatrix::<C64>::identity(cols, cols).kronecker(b);
        out.view_mut((k * n, 0), (n, n)).copy_from(&(left - right));
    }
    out
}

/// Reshapes a column-major vector into a `rows × cols` matrix.
pub fn unvec(v: &DVector<C64>, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_column_slice(rows, cols, v.as_slice())
}

/// Eigenvalues of a square complex matrix via the complex Schur form.
pub fn eigenvalues(m: &DMatrix<C64>) -> Vec<C64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let schur = m.clone().schur();
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}
