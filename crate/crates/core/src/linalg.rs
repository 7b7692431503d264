//! Small dense helpers shared by the geometric modules.

use nalgebra::{DMatrix, DVector};

use crate::exterior::C64;

/// Modified Gram-Schmidt on the columns. The change of basis is upper
/// triangular with positive diagonal, so orientation is preserved. Columns
/// that are dependent on earlier ones (relative norm below `tol`) are dropped.
pub fn gram_schmidt(w: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let scale = w.column_iter().map(|c| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut out: Vec<DVector<f64>> = Vec::new();
    for col in w.column_iter() {
        let mut v = col.clone_owned();
        for _ in 0..2 {
            for q in &out {
                let d = q.dot(&v);
                v -= q * d;
            }
        }
        let nv = v.norm();
        if nv > tol * scale {
            out.push(v / nv);
        }
    }
    if out.is_empty() {
        return DMatrix::zeros(w.nrows(), 0);
    }
    DMatrix::from_columns(&out)
}

/// `sqrt(det(wᵀ w))`, the k-volume spanned by the columns.
pub fn gram_volume(w: &DMatrix<f64>) -> f64 {
    if w.ncols() == 0 {
        return 1.0;
    }
    (w.transpose() * w).determinant().max(0.0).sqrt()
}

/// Orthonormal basis of the part of `span(w)` orthogonal to `span(s)`.
pub fn complement_in(w: &DMatrix<f64>, s: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let qw = gram_schmidt(w, tol);
    if s.ncols() == 0 {
        return qw;
    }
    let qs = gram_schmidt(s, tol);
    let proj = &qw - &qs * (qs.transpose() * &qw);
    let svd = proj.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors");
    let smax = svd.singular_values.max().max(f64::MIN_POSITIVE);
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let cols: Vec<DVector<f64>> = idx
        .into_iter()
        .filter(|&i| svd.singular_values[i] > tol * smax)
        .map(|i| u.column(i).clone_owned())
        .collect();
    if cols.is_empty() {
        return DMatrix::zeros(w.nrows(), 0);
    }
    DMatrix::from_columns(&cols)
}

/// Determinant of a complex square matrix.
pub fn cdet(a: &DMatrix<C64>) -> C64 {
    if a.nrows() == 0 {
        return C64::new(1.0, 0.0);
    }
    a.clone().determinant()
}

/// Realification of a complex `m × m` matrix: `α + iβ` becomes the block
/// `[[α, -β], [β, α]]` in coordinates `(Re z_0, Im z_0, Re z_1, …)`.
pub fn realify(a: &DMatrix<C64>) -> DMatrix<f64> {
    let m = a.nrows();
    let mut r = DMatrix::zeros(2 * m, 2 * a.ncols());
    for i in 0..m {
        for j in 0..a.ncols() {
            let z = a[(i, j)];
            r[(2 * i, 2 * j)] = z.re;
            r[(2 * i, 2 * j + 1)] = -z.im;
            r[(2 * i + 1, 2 * j)] = z.im;
            r[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    r
}

/// Complex vector `z_j = x_{2j} + i x_{2j+1}` of a real vector.
pub fn complexify_vector(v: &[f64]) -> Vec<C64> {
    v.chunks(2).map(|p| C64::new(p[0], p[1])).collect()
}

/// Identity minus `a`.
pub fn i_minus(a: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::identity(a.nrows(), a.ncols()) - a
}

/// Smallest over largest singular value (0 for the zero matrix).
pub fn relative_conditioning(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 1.0;
    }
    let s = a.singular_values();
    let max = s.max();
    if max == 0.0 {
        0.0
    } else {
        s.min() / max
    }
}

/// Block-diagonal rotation with planes `(2j, 2j+1)` rotated by `angles[j]`.
pub fn block_rotation(angles: &[f64]) -> DMatrix<f64> {
    let n = 2 * angles.len();
    let mut k = DMatrix::zeros(n, n);
    for (j, &t) in angles.iter().enumerate() {
        let (s, c) = t.sin_cos();
        k[(2 * j, 2 * j)] = c;
        k[(2 * j, 2 * j + 1)] = -s;
        k[(2 * j + 1, 2 * j)] = s;
        k[(2 * j + 1, 2 * j + 1)] = c;
    }
    k
}
