//! Local fixed-point densities, each available both in closed form and through
//! the definitional limit `⟨q, dV_W⟩ / det^{1/2}(2Π*Π)` on a tangent plane.
//!
//! Two graph conventions appear. [`graph`] is `{(v, Av)}`; [`trace_graph`] is
//! `{(Av, v)}`, the plane on which the harmonic index-form pairing equals the
//! trace of the induced map. The index forms built here ([`q_gb`], [`q_rr`],
//! [`q_sig`]) are meant to be evaluated on the trace graph.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{hodge_star, subsets, wedge, ComplexFrame, ExteriorElement, ProductSplit, C64};
use crate::linalg::{block_rotation, cdet, complement_in, gram_schmidt, gram_volume, i_minus, relative_conditioning};

/// Relative eigenvalue threshold below which the projection Gram matrix is singular.
pub const TRANSVERSE_TOL: f64 = 1e-12;
const SPAN_TOL: f64 = 1e-9;

/// Tangent plane `W ⊂ R^n ⊕ R^n` of a submanifold of `M × M` at a point of the
/// diagonal, together with its intersection `S` with the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentConfiguration {
    n: usize,
    w: DMatrix<f64>,
    s: DMatrix<f64>,
}

impl TangentConfiguration {
    /// `w` and `s` hold spanning vectors as columns, each of length `2n`.
    pub fn new(n: usize, w: DMatrix<f64>, s: DMatrix<f64>) -> Result<Self> {
        if w.nrows() != 2 * n || s.nrows() != 2 * n {
            return Err(Error::Shape(format!("vectors must have length {}", 2 * n)));
        }
        let qw = gram_schmidt(&w, 1e-12);
        if qw.ncols() != w.ncols() {
            return Err(Error::Shape("W spanning vectors are dependent".into()));
        }
        for col in s.column_iter() {
            let scale = col.norm().max(1.0);
            let diag_gap = (col.rows(0, n) - col.rows(n, n)).norm();
            let off_w = (col - &qw * (qw.transpose() * col)).norm();
            if diag_gap > SPAN_TOL * scale || off_w > SPAN_TOL * scale {
                return Err(Error::Shape("S vectors must lie in W and in the diagonal".into()));
            }
        }
        if w.ncols() != n + s.ncols() {
            return Err(Error::Shape(format!(
                "complement of S in W has dimension {}, expected {n}",
                w.ncols() as isize - s.ncols() as isize
            )));
        }
        Ok(Self { n, w, s })
    }

    /// Plane with no diagonal part.
    pub fn transverse(n: usize, w: DMatrix<f64>) -> Result<Self> {
        Self::new(n, w, DMatrix::zeros(2 * n, 0))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn w(&self) -> &DMatrix<f64> {
        &self.w
    }

    pub fn s(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn dim(&self) -> usize {
        self.w.ncols()
    }

    /// Orthonormal complement of `S` in `W`, oriented so that
    /// `(complement, S)` has the orientation of `W`.
    pub fn normal_frame(&self) -> DMatrix<f64> {
        let mut u = complement_in(&self.w, &self.s, 1e-12);
        let qs = gram_schmidt(&self.s, 1e-12);
        let mut joined = DMatrix::zeros(2 * self.n, u.ncols() + qs.ncols());
        joined.columns_mut(0, u.ncols()).copy_from(&u);
        joined.columns_mut(u.ncols(), qs.ncols()).copy_from(&qs);
        if u.ncols() > 0 && (self.w.transpose() * joined).determinant() < 0.0 {
            let flipped = -u.column(0);
            u.set_column(0, &flipped);
        }
        u
    }

    /// Orthonormal oriented frame of `S`.
    pub fn diagonal_frame(&self) -> DMatrix<f64> {
        gram_schmidt(&self.s, 1e-12)
    }
}

/// `{(v, Av)}` with basis `(e_j, A e_j)`.
pub fn graph(a: &DMatrix<f64>) -> TangentConfiguration {
    let n = a.nrows();
    let mut w = DMatrix::zeros(2 * n, n);
    w.view_mut((0, 0), (n, n)).fill_with_identity();
    w.view_mut((n, 0), (n, n)).copy_from(a);
    TangentConfiguration { n, w, s: DMatrix::zeros(2 * n, 0) }
}

/// `{(Av, v)}` with basis `(A e_j, e_j)`.
pub fn trace_graph(a: &DMatrix<f64>) -> TangentConfiguration {
    let n = a.nrows();
    let mut w = DMatrix::zeros(2 * n, n);
    w.view_mut((0, 0), (n, n)).copy_from(a);
    w.view_mut((n, 0), (n, n)).fill_with_identity();
    TangentConfiguration { n, w, s: DMatrix::zeros(2 * n, 0) }
}

/// The diagonal `{(v, v)}` as a plane with no declared diagonal part.
pub fn diagonal_plane(n: usize) -> TangentConfiguration {
    trace_graph(&DMatrix::identity(n, n))
}

/// Product plane `V1 × V2` (columns of `v1` then `v2`), with `S` the diagonal
/// copy of the given basis of `V1 ∩ V2`.
pub fn product_plane(v1: &DMatrix<f64>, v2: &DMatrix<f64>, meet: &DMatrix<f64>) -> Result<TangentConfiguration> {
    let n = v1.nrows();
    let mut w = DMatrix::zeros(2 * n, v1.ncols() + v2.ncols());
    w.view_mut((0, 0), (n, v1.ncols())).copy_from(v1);
    w.view_mut((n, v1.ncols()), (n, v2.ncols())).copy_from(v2);
    let mut s = DMatrix::zeros(2 * n, meet.ncols());
    s.view_mut((0, 0), (n, meet.ncols())).copy_from(meet);
    s.view_mut((n, 0), (n, meet.ncols())).copy_from(meet);
    TangentConfiguration::new(n, w, s)
}

/// `det^{1/2}(2Π*Π)` on the complement of `S` in `W`, with `Π(u, v) = (u - v)/√2`.
pub fn pi_gram_sqrt_det(cfg: &TangentConfiguration) -> Result<f64> {
    let n = cfg.n;
    let u = complement_in(&cfg.w, &cfg.s, 1e-12);
    if u.ncols() != n {
        return Err(Error::Shape(format!("complement has dimension {}, expected {n}", u.ncols())));
    }
    let diff = u.rows(0, n) - u.rows(n, n);
    let g = diff.transpose() * diff;
    let eig = g.symmetric_eigenvalues();
    let max = eig.max();
    let min = eig.min();
    if min <= TRANSVERSE_TOL * max.max(f64::MIN_POSITIVE) {
        return Err(Error::NonTransverse);
    }
    Ok(eig.iter().product::<f64>().sqrt())
}

/// `⟨q, dV_W⟩ / det^{1/2}(2Π*Π)`.
pub fn density(q: &ExteriorElement, cfg: &TangentConfiguration) -> Result<C64> {
    if q.dim() != 2 * cfg.n {
        return Err(Error::DimensionMismatch { expected: 2 * cfg.n, got: q.dim() });
    }
    let k = cfg.dim();
    if q.degrees().iter().any(|&d| d != k) {
        return Err(Error::DegreeMismatch { form: q.degrees().into_iter().find(|&d| d != k).unwrap(), plane: k });
    }
    let pg = pi_gram_sqrt_det(cfg)?;
    if q.is_zero() {
        return Ok(C64::default());
    }
    let val = q.evaluate_real(&cfg.w)?;
    Ok(val / gram_volume(&cfg.w) / pg)
}

/// `2^{-n/2} ⋀_i (π₁*μ^i − π₂*μ^i)`.
pub fn nu_form(n: usize) -> ExteriorElement {
    let split = ProductSplit::new(n);
    let factors: Vec<ExteriorElement> = (0..n)
        .map(|i| {
            let b = ExteriorElement::basis(n, i);
            &split.first(&b) - &split.second(&b)
        })
        .collect();
    let mut out = ExteriorElement::one(2 * n);
    for f in &factors {
        out = wedge(&out, f).expect("same dim");
    }
    out * 2f64.powf(-(n as f64) / 2.0)
}

/// The printed Dolbeault normal form scaled by `2^{m/2}`:
/// `(−1)^{m(m+1)/2} ⋀_j (π₁*η̄^j − π₂*η̄^j) ∧ ⋀_j π₂*η^j`.
pub fn nu2_scaled_form(m: usize) -> ExteriorElement {
    let frame = ComplexFrame::new(m);
    let split = ProductSplit::new(2 * m);
    let mut out = ExteriorElement::one(4 * m);
    for j in 0..m {
        let f = &split.first(&frame.eta_bar(j)) - &split.second(&frame.eta_bar(j));
        out = wedge(&out, &f).expect("same dim");
    }
    for j in 0..m {
        out = wedge(&out, &split.second(&frame.eta(j))).expect("same dim");
    }
    let sign = if (m * (m + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    out * sign
}

/// `ν₂` itself, `nu2_scaled_form(m) / 2^{m/2}`.
pub fn nu2_form(m: usize) -> ExteriorElement {
    nu2_scaled_form(m) * 2f64.powf(-(m as f64) / 2.0)
}

/// Gauss-Bonnet index data `Σ_J (−1)^{|J|} π₁*μ^J ∧ π₂*⋆μ^J`.
pub fn q_gb(n: usize) -> ExteriorElement {
    let split = ProductSplit::new(n);
    let mut out = ExteriorElement::zero(2 * n);
    for k in 0..=n {
        for mask in subsets(n, k) {
            let mu = ExteriorElement::monomial(n, mask, C64::new(1.0, 0.0));
            let t = wedge(&split.first(&mu), &split.second(&hodge_star(&mu))).expect("same dim");
            out += &(t * if k % 2 == 0 { 1.0 } else { -1.0 });
        }
    }
    out
}

/// Dolbeault index data `Σ_J (−1)^{|J|} π₁*η̄^J ∧ π₂*⋆η^J` on `R^{2m} ⊕ R^{2m}`.
pub fn q_rr(m: usize) -> ExteriorElement {
    let frame = ComplexFrame::new(m);
    let n = 2 * m;
    let split = ProductSplit::new(n);
    let mut out = ExteriorElement::zero(2 * n);
    for k in 0..=m {
        for mask in subsets(m, k) {
            let js: Vec<usize> = (0..m).filter(|j| mask >> j & 1 == 1).collect();
            let mut eta = ExteriorElement::one(n);
            let mut eta_bar = ExteriorElement::one(n);
            for &j in &js {
                eta = wedge(&eta, &frame.eta(j)).expect("same dim");
                eta_bar = wedge(&eta_bar, &frame.eta_bar(j)).expect("same dim");
            }
            let t = wedge(&split.first(&eta_bar), &split.second(&hodge_star(&eta))).expect("same dim");
            out += &(t * if k % 2 == 0 { 1.0 } else { -1.0 });
        }
    }
    out
}

/// Signature index data `Σ_{|I| = n/2} π₁*μ^I ∧ π₂*μ^I`.
pub fn q_sig(n: usize) -> ExteriorElement {
    assert!(n % 2 == 0, "signature data needs even dimension");
    let split = ProductSplit::new(n);
    let mut out = ExteriorElement::zero(2 * n);
    for mask in subsets(n, n / 2) {
        let mu = ExteriorElement::monomial(n, mask, C64::new(1.0, 0.0));
        out += &wedge(&split.first(&mu), &split.second(&mu)).expect("same dim");
    }
    out
}

fn check_invertible(a: &DMatrix<f64>) -> Result<()> {
    if relative_conditioning(a) <= TRANSVERSE_TOL {
        return Err(Error::NonTransverse);
    }
    Ok(())
}

/// `sign det(I − A)`.
pub fn nu_gb(a: &DMatrix<f64>) -> Result<f64> {
    let d = i_minus(a);
    check_invertible(&d)?;
    Ok(d.determinant().signum())
}

/// `density(2^{n/2} ν, graph(A))`.
pub fn nu_gb_density(a: &DMatrix<f64>) -> Result<f64> {
    let n = a.nrows();
    let q = nu_form(n) * 2f64.powf(n as f64 / 2.0);
    Ok(density(&q, &graph(a))?.re)
}

/// `1 / det_C(I − a)`.
pub fn nu_rr(a: &DMatrix<C64>) -> Result<C64> {
    let m = a.nrows();
    let d = DMatrix::<C64>::identity(m, m) - a;
    let sv = d.clone().singular_values();
    if m > 0 && sv.min() <= TRANSVERSE_TOL * sv.max() {
        return Err(Error::NonTransverse);
    }
    Ok(C64::new(1.0, 0.0) / cdet(&d))
}

/// `density(q_rr, trace_graph(realify a))`.
pub fn nu_rr_density(a: &DMatrix<C64>) -> Result<C64> {
    density(&q_rr(a.nrows()), &trace_graph(&crate::linalg::realify(a)))
}

/// Differential `μ k` of a conformal map, with `k` the block rotation by `angles`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformalDatum {
    pub mu: f64,
    pub angles: Vec<f64>,
}

impl ConformalDatum {
    pub fn new(mu: f64, angles: Vec<f64>) -> Result<Self> {
        if !(mu > 0.0) || angles.is_empty() {
            return Err(Error::OutOfRange(format!("need mu > 0 and m >= 1, got mu = {mu}")));
        }
        Ok(Self { mu, angles })
    }

    pub fn m(&self) -> usize {
        self.angles.len()
    }

    pub fn rotation(&self) -> DMatrix<f64> {
        block_rotation(&self.angles)
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        self.rotation() * self.mu
    }

    fn check_angles(&self) -> Result<()> {
        let tau = std::f64::consts::TAU;
        for &t in &self.angles {
            let r = t.rem_euclid(tau);
            if r.min(tau - r) < 1e-12 {
                return Err(Error::NonTransverse);
            }
        }
        check_invertible(&i_minus(&self.matrix()))
    }

    fn abs_det_ratio(&self) -> f64 {
        i_minus(&self.rotation()).determinant().abs() / i_minus(&self.matrix()).determinant().abs()
    }
}

pub fn i_pow(k: i64) -> C64 {
    match k.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// `i^{−m} μ^m |det(I − k)| / |det(I − μk)| ∏ cot(θ_j/2)`.
pub fn nu_sig(d: &ConformalDatum) -> Result<C64> {
    d.check_angles()?;
    let m = d.m() as i64;
    let cot: f64 = d.angles.iter().map(|t| 1.0 / (t / 2.0).tan()).product();
    Ok(i_pow(-m) * d.mu.powi(m as i32) * d.abs_det_ratio() * cot)
}

/// Factor relating the two signature evaluations:
/// `density(q_sig, trace_graph(μk)) = sig_orientation_factor(m) · nu_sig`.
/// It is 1 when `m` is even.
pub fn sig_orientation_factor(m: usize) -> C64 {
    let m = m as i64;
    let s = if (m * (m - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    i_pow(m) * s
}

/// `density(q_sig, trace_graph(μk))`.
pub fn nu_sig_density(d: &ConformalDatum) -> Result<C64> {
    density(&q_sig(2 * d.m()), &trace_graph(&d.matrix()))
}

/// `i^m 2^{−m} μ^{1/2 − m} |det(I − k)| / |det(I − μk)| ∏ cosec(θ_j/2)`, the
/// branch selected by [`crate::spin::spin_lift`].
pub fn nu_spin(d: &ConformalDatum) -> Result<C64> {
    d.check_angles()?;
    let m = d.m() as i64;
    let cosec: f64 = d.angles.iter().map(|t| 1.0 / (t / 2.0).sin()).product();
    Ok(i_pow(m) * 2f64.powi(-(m as i32)) * d.mu.powf(0.5 - m as f64) * d.abs_det_ratio() * cosec)
}

fn excess_direct(z: &ExteriorElement, q: &ExteriorElement, cfg: &TangentConfiguration) -> Result<C64> {
    density(&wedge(z, q)?, cfg)
}

/// `⟨z ∧ q_rr, dV_W⟩ / det^{1/2}(2Π*Π)` for a plane with diagonal part `S`.
pub fn nu_rr_excess(z: &ExteriorElement, cfg: &TangentConfiguration) -> Result<C64> {
    let n = cfg.n();
    if n % 2 != 0 {
        return Err(Error::Shape("Dolbeault data needs even base dimension".into()));
    }
    excess_direct(z, &q_rr(n / 2), cfg)
}

/// `2^p ⟨q_rr, ν_S^W⟩ / det^{1/2}(2Π*Π) · ⟨z₀, dV_S⟩` with `p` the complex
/// dimension of `S`. Agrees with [`nu_rr_excess`] when the plane is in the
/// normalized position (the graph part is normal and its complement to `S`
/// is orthogonal to `S`, with `π₁(S)` inside the −1 eigenspace).
pub fn nu_rr_excess_factored(z: &ExteriorElement, cfg: &TangentConfiguration) -> Result<C64> {
    let n = cfg.n();
    if n % 2 != 0 || cfg.s().ncols() % 2 != 0 {
        return Err(Error::Shape("Dolbeault data needs even dimensions".into()));
    }
    let m = n / 2;
    let p = cfg.s().ncols() / 2;
    let pg = pi_gram_sqrt_det(cfg)?;
    let normal = cfg.normal_frame();
    let q_nu = q_rr(m).evaluate_real(&normal)?;
    let frame = ComplexFrame::new(m);
    let split = ProductSplit::new(n);
    let z0 = crate::exterior::z_zero(z, &split, &frame, p)?;
    let z_s = z0.evaluate_real(&cfg.diagonal_frame())?;
    Ok(q_nu * z_s * 2f64.powi(p as i32) / pg)
}

/// `⟨z ∧ q_sig, dV_W⟩ / det^{1/2}(2Π*Π)`.
pub fn nu_sig_excess(z: &ExteriorElement, cfg: &TangentConfiguration) -> Result<C64> {
    excess_direct(z, &q_sig(cfg.n()), cfg)
}

/// `(−1)^{np} ⟨z, dV_S⟩ ⟨q_sig, ν_S^W⟩ / det^{1/2}(2Π*Π)` with `p = dim S`.
pub fn nu_sig_excess_factored(z: &ExteriorElement, cfg: &TangentConfiguration) -> Result<C64> {
    let n = cfg.n();
    let p = cfg.s().ncols();
    let pg = pi_gram_sqrt_det(cfg)?;
    let q_nu = q_sig(n).evaluate_real(&cfg.normal_frame())?;
    let z_s = z.evaluate_real(&cfg.diagonal_frame())?;
    let sign = if (n * p) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(q_nu * z_s * sign / pg)
}
