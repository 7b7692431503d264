//! Pointwise admissibility tests on tangent planes: transversality,
//! conformality, self-duality in middle degree, coisotropy, complex type and
//! the extended-pair condition.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exterior::{hodge_star, subsets, wedge, ComplexFrame, ExteriorElement, C64};
use crate::invariants::{pi_gram_sqrt_det, TangentConfiguration};
use crate::linalg::{gram_schmidt, relative_conditioning};

/// Relative threshold for rank and containment tests.
pub const GEOMETRY_TOL: f64 = 1e-10;

/// A linear subspace (spanned by the columns of `basis`) with optional
/// symplectic form, complex structure and companion form `Q`.
///
/// For planes in a product the ambient space is `R^b ⊕ R^n ⊕ R^n`, where the
/// optional base block of dimension `b` carries family parameters.
#[derive(Clone, Debug)]
pub struct PlaneWithStructure {
    pub basis: DMatrix<f64>,
    pub diagonal_part: DMatrix<f64>,
    pub base_dim: usize,
    pub omega: Option<DMatrix<f64>>,
    pub j: Option<DMatrix<f64>>,
    pub q: Option<ExteriorElement>,
}

impl PlaneWithStructure {
    pub fn new(basis: DMatrix<f64>) -> Self {
        let rows = basis.nrows();
        Self { basis, diagonal_part: DMatrix::zeros(rows, 0), base_dim: 0, omega: None, j: None, q: None }
    }

    pub fn from_configuration(cfg: &TangentConfiguration) -> Self {
        let mut p = Self::new(cfg.w().clone());
        p.diagonal_part = cfg.s().clone();
        p
    }

    pub fn with_base(mut self, base_dim: usize) -> Self {
        self.base_dim = base_dim;
        self
    }

    pub fn with_omega(mut self, omega: DMatrix<f64>) -> Self {
        self.omega = Some(omega);
        self
    }

    pub fn with_j(mut self, j: DMatrix<f64>) -> Self {
        self.j = Some(j);
        self
    }

    pub fn with_form(mut self, q: ExteriorElement) -> Self {
        self.q = Some(q);
        self
    }

    /// Standard `ω` and `J` on the ambient `R^{2m}`.
    pub fn with_standard_kahler(self) -> Self {
        let n = self.basis.nrows();
        let frame = ComplexFrame::new(n / 2);
        self.with_omega(standard_omega_matrix(n)).with_j(frame.j_vectors())
    }

    pub fn ambient(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    fn factor_dim(&self) -> usize {
        (self.ambient() - self.base_dim) / 2
    }

    fn omega_or_standard(&self) -> DMatrix<f64> {
        self.omega.clone().unwrap_or_else(|| standard_omega_matrix(self.ambient()))
    }

    fn j_or_standard(&self) -> DMatrix<f64> {
        self.j.clone().unwrap_or_else(|| ComplexFrame::new(self.ambient() / 2).j_vectors())
    }
}

/// Matrix `Ω` with `ω(u, v) = uᵀ Ω v` for `ω = Σ μ^{2j} ∧ μ^{2j+1}`.
pub fn standard_omega_matrix(n: usize) -> DMatrix<f64> {
    let mut o = DMatrix::zeros(n, n);
    for j in 0..n / 2 {
        o[(2 * j, 2 * j + 1)] = 1.0;
        o[(2 * j + 1, 2 * j)] = -1.0;
    }
    o
}

/// Whether the plane meets the diagonal transversely along its declared
/// diagonal part.
pub fn transversality_check(p: &PlaneWithStructure) -> bool {
    let n = p.factor_dim();
    TangentConfiguration::new(n, p.basis.clone(), p.diagonal_part.clone())
        .and_then(|cfg| pi_gram_sqrt_det(&cfg))
        .is_ok()
}

fn projections(p: &PlaneWithStructure) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = p.factor_dim();
    if p.dim() != n {
        return Err(Error::Shape(format!("plane has dimension {}, expected {n}", p.dim())));
    }
    let b = p.base_dim;
    let p1 = p.basis.rows(b, n).into_owned();
    let p2 = p.basis.rows(b + n, n).into_owned();
    if relative_conditioning(&p1) <= 1e-12 || relative_conditioning(&p2) <= 1e-12 {
        return Err(Error::DegenerateProjection);
    }
    Ok((p1, p2))
}

/// Matrix of `f = (i*π₂*)^{-1} i*π₁*` on covector coefficients.
pub fn transfer_map(p: &PlaneWithStructure) -> Result<DMatrix<f64>> {
    let (p1, p2) = projections(p)?;
    let inv = p2.try_inverse().ok_or(Error::DegenerateProjection)?;
    Ok((p1 * inv).transpose())
}

/// Common eigenvalue of `f*f`, or `NotConformal`.
pub fn conformal_factor(p: &PlaneWithStructure) -> Result<f64> {
    let f = transfer_map(p)?;
    let eig = (f.transpose() * &f).symmetric_eigenvalues();
    let (lo, hi) = (eig.min(), eig.max());
    let ratio = hi / lo;
    if ratio - 1.0 > GEOMETRY_TOL {
        return Err(Error::NotConformal { ratio });
    }
    Ok(eig.mean())
}

/// Evaluate `g(x) ∧ h(y)` (with `Q` prefixed when given) on the plane frame.
fn pair_value(
    p: &PlaneWithStructure,
    frame: &DMatrix<f64>,
    q: Option<&ExteriorElement>,
    g: &ExteriorElement,
    h: &ExteriorElement,
) -> Result<C64> {
    let n = p.factor_dim();
    let total = p.ambient();
    let gx = g.embed(total, p.base_dim);
    let hy = h.embed(total, p.base_dim + n);
    let mut form = wedge(&gx, &hy)?;
    if let Some(q) = q {
        form = wedge(q, &form)?;
    }
    form.evaluate_real(frame)
}

fn middle_pairs_residual(p: &PlaneWithStructure, q: Option<&ExteriorElement>) -> Result<f64> {
    let n = p.factor_dim();
    if n % 2 != 0 {
        return Err(Error::Shape("middle degree needs even dimension".into()));
    }
    let frame = gram_schmidt(&p.basis, 1e-12);
    let mids: Vec<ExteriorElement> =
        subsets(n, n / 2).into_iter().map(|m| ExteriorElement::monomial(n, m, C64::new(1.0, 0.0))).collect();
    let stars: Vec<ExteriorElement> = mids.iter().map(hodge_star).collect();
    let mut worst = 0.0f64;
    for (f, sf) in mids.iter().zip(&stars) {
        for (g, sg) in mids.iter().zip(&stars) {
            let plain = pair_value(p, &frame, q, f, g)?;
            let starred = pair_value(p, &frame, q, sf, sg)?;
            worst = worst.max((plain - starred).norm());
        }
    }
    Ok(worst)
}

/// `⋆f(x) ∧ ⋆F(y) − f(x) ∧ F(y)` vanishes on the plane for every pair of
/// middle-degree basis forms.
pub fn self_dual_middle_check(p: &PlaneWithStructure) -> bool {
    if p.dim() != p.factor_dim() {
        return false;
    }
    matches!(middle_pairs_residual(p, None), Ok(r) if r <= GEOMETRY_TOL)
}

/// `Q ∧ [f(x) ∧ F(y) − ⋆f(x) ∧ ⋆F(y)]` vanishes on the plane for all pairs.
pub fn extended_pair_check(p: &PlaneWithStructure) -> bool {
    let q = match &p.q {
        None => return true,
        Some(q) if q.is_zero() => return true,
        Some(q) => q,
    };
    if q.dim() != p.ambient() {
        return false;
    }
    let expected = p.factor_dim() + q.degree().unwrap_or(usize::MAX);
    if expected != p.dim() {
        return false;
    }
    matches!(middle_pairs_residual(p, Some(q)), Ok(r) if r <= GEOMETRY_TOL)
}

/// Orthonormal basis of `{u : ω(u, v) = 0 for all v in V}`.
pub fn symplectic_annihilator(p: &PlaneWithStructure) -> DMatrix<f64> {
    let frame = gram_schmidt(&p.basis, 1e-12);
    let omega = p.omega_or_standard();
    let constraints = frame.transpose() * omega;
    null_space(&constraints)
}

fn null_space(a: &DMatrix<f64>) -> DMatrix<f64> {
    let cols = a.ncols();
    let eig = (a.transpose() * a).symmetric_eigen();
    let max = eig.eigenvalues.max().max(f64::MIN_POSITIVE);
    let vecs: Vec<_> = (0..cols)
        .filter(|&i| eig.eigenvalues[i] <= 1e-14 * max)
        .map(|i| eig.eigenvectors.column(i).clone_owned())
        .collect();
    if vecs.is_empty() {
        return DMatrix::zeros(cols, 0);
    }
    DMatrix::from_columns(&vecs)
}

fn contained_in(vectors: &DMatrix<f64>, span: &DMatrix<f64>) -> bool {
    let q = gram_schmidt(span, 1e-12);
    vectors.column_iter().all(|v| {
        let r = v - &q * (q.transpose() * v);
        r.norm() <= GEOMETRY_TOL * v.norm().max(1.0)
    })
}

/// The plane contains its symplectic annihilator. Uses the standard `ω` when
/// none is attached.
pub fn coisotropic_check(p: &PlaneWithStructure) -> bool {
    contained_in(&symplectic_annihilator(p), &p.basis)
}

/// Middle-dimensional and `ω` vanishes on the plane.
pub fn lagrangian_check(p: &PlaneWithStructure) -> bool {
    if 2 * p.dim() != p.ambient() {
        return false;
    }
    let frame = gram_schmidt(&p.basis, 1e-12);
    let restricted = frame.transpose() * p.omega_or_standard() * &frame;
    restricted.abs().max() <= GEOMETRY_TOL
}

/// The plane is `J`-invariant. Uses the standard `J` when none is attached.
pub fn bitype_mm_check(p: &PlaneWithStructure) -> bool {
    let j = p.j_or_standard();
    contained_in(&(j * &p.basis), &p.basis)
}

/// Largest discrepancy, over degree-`l` basis forms `f`, between the plane
/// restrictions of `⋆f` and `(−1)^{l(l+1)/2} (1/q!) ω^q ∧ J f`, for a
/// coisotropic plane of dimension `m + q` in `R^{2m}` with the standard
/// structure (`l = m − q`).
pub fn restricted_star_residual(p: &PlaneWithStructure) -> Result<f64> {
    let n = p.ambient();
    let m = n / 2;
    let d = p.dim();
    if d < m || d > n || !coisotropic_check(p) {
        return Err(Error::NotCoisotropic);
    }
    let q = d - m;
    let l = m - q;
    let frame = gram_schmidt(&p.basis, 1e-12);
    let cframe = ComplexFrame::new(m);
    let omega = crate::exterior::standard_omega(n);
    let mut omega_q = ExteriorElement::one(n);
    for _ in 0..q {
        omega_q = wedge(&omega_q, &omega)?;
    }
    let sign = if (l * (l + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let factor = sign / factorial(q);
    let mut worst = 0.0f64;
    for mask in subsets(n, l) {
        let f = ExteriorElement::monomial(n, mask, C64::new(1.0, 0.0));
        let lhs = hodge_star(&f).evaluate_real(&frame)?;
        let jf = crate::exterior::j_action(&f, &cframe)?;
        let rhs = wedge(&omega_q, &jf)?.evaluate_real(&frame)? * factor;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{diagonal_plane, graph, trace_graph};
    use crate::linalg::block_rotation;

    fn cols(n: usize, v: &[&[f64]]) -> DMatrix<f64> {
        DMatrix::from_fn(n, v.len(), |i, j| v[j][i])
    }

    #[test]
    fn transversality_examples() {
        let two = DMatrix::identity(2, 2) * 2.0;
        assert!(transversality_check(&PlaneWithStructure::from_configuration(&graph(&two))));
        assert!(!transversality_check(&PlaneWithStructure::from_configuration(&diagonal_plane(2))));
    }

    #[test]
    fn conformal_examples() {
        let a = block_rotation(&[0.4]) * 2.0;
        let p = PlaneWithStructure::from_configuration(&trace_graph(&a));
        assert!((conformal_factor(&p).unwrap() - 4.0).abs() < 1e-12);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0]));
        let p = PlaneWithStructure::from_configuration(&graph(&d));
        assert!(matches!(conformal_factor(&p), Err(Error::NotConformal { .. })));
        assert!(!self_dual_middle_check(&p));
        let product = cols(4, &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]]);
        assert_eq!(conformal_factor(&PlaneWithStructure::new(product)), Err(Error::DegenerateProjection));
    }

    #[test]
    fn diagonal_is_self_dual() {
        assert!(self_dual_middle_check(&PlaneWithStructure::from_configuration(&diagonal_plane(4))));
    }

    #[test]
    fn coisotropic_examples() {
        let lag = PlaneWithStructure::new(cols(4, &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0]]));
        assert!(coisotropic_check(&lag));
        assert!(lagrangian_check(&lag));
        let complex_line = PlaneWithStructure::new(cols(4, &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]]));
        assert!(!coisotropic_check(&complex_line));
        assert!(bitype_mm_check(&complex_line));
        assert!(!bitype_mm_check(&lag));
        let hyper = PlaneWithStructure::new(cols(
            4,
            &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0]],
        ));
        assert!(coisotropic_check(&hyper));
        let ann = symplectic_annihilator(&hyper);
        assert_eq!(ann.ncols(), 1);
        assert!((ann[(2, 0)].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn restricted_star_on_hyperplane() {
        let hyper = PlaneWithStructure::new(cols(
            4,
            &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0]],
        ));
        assert!(restricted_star_residual(&hyper).unwrap() < 1e-12);
    }
}
