//! Integer linear algebra: Smith normal form, exact determinants, integer
//! kernels and saturation of sublattices.

use nalgebra::DMatrix;

pub type IMat = DMatrix<i64>;

/// `u * a * v = diag(d)` with `u`, `v` unimodular and `d[i] | d[i+1]`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IMat,
    pub v: IMat,
    /// Diagonal of length `min(rows, cols)`, nonnegative.
    pub d: Vec<i64>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.d.iter().filter(|&&x| x != 0).count()
    }
}

type Work = Vec<Vec<i128>>;

fn to_work(a: &IMat) -> Work {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)] as i128).collect()).collect()
}

fn identity(n: usize) -> Work {
    (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect()
}

fn from_work(w: &Work, rows: usize, cols: usize) -> IMat {
    IMat::from_fn(rows, cols, |i, j| i64::try_from(w[i][j]).expect("integer overflow in lattice computation"))
}

fn swap_cols(m: &mut Work, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn row_axpy(m: &mut Work, target: usize, src: usize, q: i128) {
    let s = m[src].clone();
    for (t, x) in m[target].iter_mut().zip(s) {
        *t += q * x;
    }
}

fn col_axpy(m: &mut Work, target: usize, src: usize, q: i128) {
    for row in m.iter_mut() {
        row[target] += q * row[src];
    }
}

pub fn smith_normal_form(a: &IMat) -> Smith {
    let (r, c) = (a.nrows(), a.ncols());
    let mut m = to_work(a);
    let mut u = identity(r);
    let mut v = identity(c);
    for t in 0..r.min(c) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            m.swap(t, pi);
            u.swap(t, pi);
            swap_cols(&mut m, t, pj);
            swap_cols(&mut v, t, pj);
            let p = m[t][t];
            let mut clean = true;
            for i in t + 1..r {
                let q = m[i][t].div_euclid(p);
                if q != 0 {
                    row_axpy(&mut m, i, t, -q);
                    row_axpy(&mut u, i, t, -q);
                }
                clean &= m[i][t] == 0;
            }
            for j in t + 1..c {
                let q = m[t][j].div_euclid(p);
                if q != 0 {
                    col_axpy(&mut m, j, t, -q);
                    col_axpy(&mut v, j, t, -q);
                }
                clean &= m[t][j] == 0;
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| m[i][j] % p != 0));
            match bad {
                Some(i) => {
                    row_axpy(&mut m, t, i, 1);
                    row_axpy(&mut u, t, i, 1);
                }
                None => break,
            }
        }
        if m[t][t] < 0 {
            for x in m[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
    }
    let d = (0..r.min(c)).map(|i| i64::try_from(m[i][i]).expect("overflow")).collect();
    Smith { u: from_work(&u, r, r), v: from_work(&v, c, c), d }
}

/// Exact determinant by fraction-free elimination.
pub fn det(a: &IMat) -> i64 {
    assert_eq!(a.nrows(), a.ncols());
    let n = a.nrows();
    if n == 0 {
        return 1;
    }
    let mut m = to_work(a);
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    i64::try_from(sign * m[n - 1][n - 1]).expect("determinant overflow")
}

/// `e[p]` = sum of the `p × p` principal minors, for `p = 0..=n`.
pub fn principal_minor_sums(a: &IMat) -> Vec<i64> {
    let n = a.nrows();
    let mut e = vec![0i64; n + 1];
    for mask in 0u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let sub = IMat::from_fn(idx.len(), idx.len(), |i, j| a[(idx[i], idx[j])]);
        e[idx.len()] += det(&sub);
    }
    e
}

pub fn rank(a: &IMat) -> usize {
    smith_normal_form(a).rank()
}

/// Basis (as columns) of `{x ∈ Z^c : a x = 0}`.
pub fn integer_kernel(a: &IMat) -> IMat {
    let s = smith_normal_form(a);
    let r = s.rank();
    let c = a.ncols();
    s.v.columns(r, c - r).into_owned()
}

/// Basis of `span_R(g) ∩ Z^n` for the columns of `g`.
pub fn saturate(g: &IMat) -> IMat {
    let n = g.nrows();
    let ann = integer_kernel(&g.transpose());
    if ann.ncols() == 0 {
        return IMat::identity(n, n);
    }
    integer_kernel(&ann.transpose())
}

/// Index `[Z^n : span_Z(columns)]`, or `None` when the columns do not span.
pub fn index_in_full(g: &IMat) -> Option<i64> {
    let s = smith_normal_form(g);
    if s.rank() < g.nrows() {
        return None;
    }
    Some(s.d.iter().filter(|&&x| x != 0).product())
}

pub fn to_f64(a: &IMat) -> DMatrix<f64> {
    a.map(|x| x as f64)
}

/// Round a real matrix to integers, failing if any entry is farther than `tol`.
pub fn round_integer(a: &DMatrix<f64>, tol: f64) -> Option<IMat> {
    let r = a.map(|x| x.round());
    if (a - &r).abs().max() > tol {
        return None;
    }
    Some(r.map(|x| x as i64))
}
