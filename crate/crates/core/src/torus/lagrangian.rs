//! Linear subtori: special Lagrangian intersection identities, their
//! translation average, and the coisotropic pairing.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};

use super::FlatTorus;
use crate::error::{Error, Result};
use crate::exterior::{hodge_star, inner, j_action, mask_indices, standard_omega, subsets, wedge, ComplexFrame, ExteriorElement, C64};
use crate::geometry::{coisotropic_check, factorial, lagrangian_check, PlaneWithStructure};
use crate::invariants::{density, i_pow, pi_gram_sqrt_det, product_plane, q_rr};
use crate::lattice::{self, IMat};
use crate::linalg::{gram_schmidt, gram_volume};
use crate::shells::shell_sum;

use super::ComplexTorus;

/// `offset + span_R(B G)` in `R^n / L`, with `G` an integer matrix of lattice
/// directions (saturated on construction).
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSubtorus {
    pub torus: FlatTorus,
    directions: IMat,
    pub offset: DVector<f64>,
}

impl AffineSubtorus {
    pub fn new(torus: FlatTorus, directions: IMat, offset: DVector<f64>) -> Result<Self> {
        let n = torus.dim();
        if directions.nrows() != n || offset.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: directions.nrows() });
        }
        if lattice::rank(&directions) != directions.ncols() {
            return Err(Error::Shape("subtorus directions must be independent".into()));
        }
        let directions = lattice::saturate(&directions);
        Ok(Self { torus, directions, offset })
    }

    /// Subtorus through the origin of the standard torus `R^n / Z^n`.
    pub fn linear(n: usize, directions: &[&[i64]]) -> Result<Self> {
        let d = directions.len();
        let g = IMat::from_fn(n, d, |i, j| directions[j][i]);
        Self::new(FlatTorus::standard(n), g, DVector::zeros(n))
    }

    pub fn translated(mut self, offset: DVector<f64>) -> Self {
        self.offset = offset;
        self
    }

    /// Saturated generators of the direction lattice, in lattice coordinates.
    /// Their orientation follows the input directions only up to sign.
    pub fn directions(&self) -> &IMat {
        &self.directions
    }

    pub fn dim(&self) -> usize {
        self.directions.ncols()
    }

    pub fn real_directions(&self) -> DMatrix<f64> {
        self.torus.basis() * lattice::to_f64(&self.directions)
    }

    pub fn volume(&self) -> f64 {
        gram_volume(&self.real_directions())
    }

    /// Oriented orthonormal frame of the tangent space.
    pub fn frame(&self) -> DMatrix<f64> {
        gram_schmidt(&self.real_directions(), 1e-12)
    }

    fn lattice_offset(&self) -> DVector<f64> {
        self.torus.lattice_coords(&self.offset)
    }

    /// `∫_V e^{2πi k·x}` for the dual vector with lattice coordinates `kappa`.
    pub fn mode_integral(&self, kappa: &[i64]) -> C64 {
        let g = &self.directions;
        let annihilates = (0..g.ncols()).all(|j| (0..g.nrows()).map(|i| kappa[i] * g[(i, j)]).sum::<i64>() == 0);
        if !annihilates {
            return C64::default();
        }
        let phase: f64 = kappa.iter().zip(self.lattice_offset().iter()).map(|(&k, &x)| k as f64 * x).sum();
        C64::from_polar(self.volume(), TAU * phase)
    }
}

/// How two subtori of the same torus meet.
#[derive(Clone, Debug, PartialEq)]
pub struct Meeting {
    /// Number of components of `V₁ ∩ V₂` (0 when disjoint).
    pub components: i64,
    /// Lattice of `V₁ ∩ V₂` directions, in lattice coordinates.
    pub meet: IMat,
    /// Whether `V₁` and `V₂` together span the ambient space.
    pub spanning: bool,
}

impl Meeting {
    pub fn of(v1: &AffineSubtorus, v2: &AffineSubtorus) -> Result<Self> {
        if v1.torus != v2.torus {
            return Err(Error::Shape("subtori live on different tori".into()));
        }
        let n = v1.torus.dim();
        let (g1, g2) = (v1.directions(), v2.directions());
        let (d1, d2) = (g1.ncols(), g2.ncols());
        let mut both = IMat::zeros(n, d1 + d2);
        both.columns_mut(0, d1).copy_from(g1);
        both.columns_mut(d1, d2).copy_from(g2);
        let mut signed = both.clone();
        signed.columns_mut(d1, d2).copy_from(&(-g2));
        let k = lattice::integer_kernel(&signed);
        let meet = g1 * k.rows(0, d1);
        if let Some(index) = lattice::index_in_full(&both) {
            return Ok(Self { components: index, meet, spanning: true });
        }
        let ann = lattice::integer_kernel(&both.transpose());
        let gap = v2.lattice_offset() - v1.lattice_offset();
        let reachable = (0..ann.ncols()).all(|j| {
            let s: f64 = (0..n).map(|i| ann[(i, j)] as f64 * gap[i]).sum();
            (s - s.round()).abs() < 1e-9
        });
        Ok(Self { components: if reachable { 1 } else { 0 }, meet, spanning: false })
    }

    /// Volume of one component of the intersection.
    pub fn component_volume(&self, torus: &FlatTorus) -> f64 {
        gram_volume(&(torus.basis() * lattice::to_f64(&self.meet)))
    }
}

fn require_lagrangian(ct: &ComplexTorus, v: &AffineSubtorus) -> Result<()> {
    if v.torus != ct.real {
        return Err(Error::Shape("subtorus does not live on this complex torus".into()));
    }
    if v.dim() != ct.m || !lagrangian_check(&PlaneWithStructure::new(v.real_directions())) {
        return Err(Error::NotLagrangian);
    }
    Ok(())
}

/// `dz¹ ∧ … ∧ dz^m` on the oriented orthonormal frame of a Lagrangian subtorus.
pub fn slag_phase(ct: &ComplexTorus, v: &AffineSubtorus) -> Result<C64> {
    require_lagrangian(ct, v)?;
    let f = v.frame();
    let m = ct.m;
    let z = DMatrix::from_fn(m, m, |j, c| C64::new(f[(2 * j, c)], f[(2 * j + 1, c)]));
    Ok(crate::linalg::cdet(&z))
}

/// `(−1)^{m(m−1)/2} i^m 2^{−m} e^{−i(φ₁−φ₂)}`, the harmonic Dolbeault pairing
/// density of `V₁ × V₂` per unit volume.
pub fn slag_rho_closed(m: usize, phase1: C64, phase2: C64) -> C64 {
    let sign = if (m * (m.saturating_sub(1)) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    i_pow(m as i64) * sign * 2f64.powi(-(m as i32)) * phase1.conj() * phase2
}

/// The same pairing evaluated directly: the Dolbeault index data on the
/// product of the two orthonormal frames.
pub fn slag_rho_oracle(ct: &ComplexTorus, v1: &AffineSubtorus, v2: &AffineSubtorus) -> Result<C64> {
    require_lagrangian(ct, v1)?;
    require_lagrangian(ct, v2)?;
    let n = 2 * ct.m;
    let (f1, f2) = (v1.frame(), v2.frame());
    let mut w = DMatrix::zeros(2 * n, 2 * ct.m);
    w.view_mut((0, 0), (n, ct.m)).copy_from(&f1);
    w.view_mut((n, ct.m), (n, ct.m)).copy_from(&f2);
    q_rr(ct.m).evaluate_real(&w)
}

fn check_cutoff(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidCutoff(r));
    }
    Ok(())
}

fn rho(ct: &ComplexTorus, v1: &AffineSubtorus, v2: &AffineSubtorus) -> Result<C64> {
    Ok(slag_rho_closed(ct.m, slag_phase(ct, v1)?, slag_phase(ct, v2)?))
}

/// Non-harmonic part of the Dolbeault pairing over `V₁ × V₂`:
/// `−(ρ/vol M) Σ_{0<|k|≤R} (1 − |k|/(R+1)) ∫_{V₁} e^{2πik·x} conj ∫_{V₂} e^{2πik·y}`.
/// The Fejér weights sum the conditionally convergent mode series.
pub fn slag_spectral_term(ct: &ComplexTorus, v1: &AffineSubtorus, v2: &AffineSubtorus, cutoff: f64) -> Result<C64> {
    check_cutoff(cutoff)?;
    let r = rho(ct, v1, v2)?;
    let sh = ct.real.dual_shells(cutoff, false);
    let sum = shell_sum(&sh, |kappa, q| {
        let w = 1.0 - q.sqrt() / (cutoff + 1.0);
        v1.mode_integral(kappa) * v2.mode_integral(kappa).conj() * w
    });
    Ok(-r * sum / ct.real.volume())
}

/// `(1/vol M) Σ_{0<|k|≤R} |k|^{−2} ∫_{V₁} e^{2πik·x} conj ∫_{V₂} e^{2πik·y}`:
/// the inverse-square weighting of the mode series.
pub fn slag_inverse_square_sum(v1: &AffineSubtorus, v2: &AffineSubtorus, cutoff: f64) -> Result<C64> {
    check_cutoff(cutoff)?;
    let sh = v1.torus.dual_shells(cutoff, false);
    let sum = shell_sum(&sh, |kappa, q| v1.mode_integral(kappa) * v2.mode_integral(kappa).conj() / q);
    Ok(sum / v1.torus.volume())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlagIdentity {
    /// Harmonic term minus the intersection sum.
    pub geometric: C64,
    pub spectral: C64,
    pub residual: f64,
    pub rho: C64,
    pub intersections: i64,
}

fn transverse_point_density(v1: &AffineSubtorus, v2: &AffineSubtorus, m: usize) -> Result<C64> {
    let n = v1.torus.dim();
    let cfg = product_plane(&v1.frame(), &v2.frame(), &DMatrix::zeros(n, 0))?;
    density(&q_rr(m), &cfg)
}

/// Intersection count and per-point density of two Lagrangian subtori;
/// parallel disjoint pairs give count 0.
fn lagrangian_meeting(ct: &ComplexTorus, v1: &AffineSubtorus, v2: &AffineSubtorus) -> Result<(i64, C64)> {
    let meeting = Meeting::of(v1, v2)?;
    if !meeting.spanning {
        if meeting.components > 0 {
            return Err(Error::NonTransverse);
        }
        return Ok((0, C64::default()));
    }
    Ok((meeting.components, transverse_point_density(v1, v2, ct.m)?))
}

/// Special Lagrangian intersection identity on a complex torus.
pub fn slag_identity_check(ct: &ComplexTorus, v1: &AffineSubtorus, v2: &AffineSubtorus, cutoff: f64) -> Result<SlagIdentity> {
    let r = rho(ct, v1, v2)?;
    let (count, point) = lagrangian_meeting(ct, v1, v2)?;
    let geometric = r * v1.volume() * v2.volume() / ct.real.volume() - point * count as f64;
    let spectral = slag_spectral_term(ct, v1, v2, cutoff)?;
    Ok(SlagIdentity { geometric, spectral, residual: (geometric - spectral).norm(), rho: r, intersections: count })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AverageIdentity {
    pub lhs: C64,
    pub rhs: C64,
    /// Intersection count of a generic translate, `[L : Λ₁ + Λ₂]`.
    pub generic_count: i64,
    pub parallel: bool,
}

/// Translation-averaged intersection identity: `ρ vol(V₁) vol(V₂)` against
/// `vol(M) · (generic count) · (point density)`.
pub fn average_identity_check(ct: &ComplexTorus, v1: &AffineSubtorus, v2: &AffineSubtorus) -> Result<AverageIdentity> {
    let r = rho(ct, v1, v2)?;
    let lhs = r * v1.volume() * v2.volume();
    let n = 2 * ct.m;
    let mut both = IMat::zeros(n, 2 * ct.m);
    both.columns_mut(0, ct.m).copy_from(v1.directions());
    both.columns_mut(ct.m, ct.m).copy_from(v2.directions());
    match lattice::index_in_full(&both) {
        Some(count) => {
            let point = transverse_point_density(v1, v2, ct.m)?;
            Ok(AverageIdentity { lhs, rhs: point * (ct.real.volume() * count as f64), generic_count: count, parallel: false })
        }
        None => Ok(AverageIdentity { lhs, rhs: C64::default(), generic_count: 0, parallel: true }),
    }
}

/// Volume form of the oriented span of `frame` (orthonormal columns).
fn plane_form(frame: &DMatrix<f64>) -> ExteriorElement {
    let n = frame.nrows();
    let d = frame.ncols();
    let mut out = ExteriorElement::zero(n);
    for mask in subsets(n, d) {
        let rows = mask_indices(mask);
        let sub = DMatrix::from_fn(d, d, |i, j| frame[(rows[i], j)]);
        out = out + ExteriorElement::monomial(n, mask, C64::new(sub.determinant(), 0.0));
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoisotropicPairing {
    pub lhs: f64,
    pub rhs: f64,
    pub components: i64,
    pub meet_volume: f64,
}

/// Harmonic pairing `Σ_I ∫_{V₁} ω^q ∧ μ^I ∫_{V₂} ⋆μ^I` (with constant
/// `(−1)^{l(l−1)/2}/q!`, `l = m − q`) against
/// `vol(V₁ ∩ V₂) ⟨dvol_{V₁}, J dvol_{V₂}⟩ / det^{1/2}(2Π*Π)` on the standard
/// Kähler torus `R^{2m}/L`, the determinant taken transverse to the diagonal
/// and anti-diagonal copies of `V₁ ∩ V₂`.
pub fn coisotropic_pairing_check(v1: &AffineSubtorus, v2: &AffineSubtorus) -> Result<CoisotropicPairing> {
    let n = v1.torus.dim();
    if n % 2 != 0 {
        return Err(Error::Shape("coisotropic pairing needs even dimension".into()));
    }
    let m = n / 2;
    let d = v1.dim();
    if v2.dim() != d || d < m {
        return Err(Error::Shape(format!("subtori must both have dimension m + q ≥ {m}")));
    }
    if !coisotropic_check(&PlaneWithStructure::new(v1.real_directions())) {
        return Err(Error::NotCoisotropic);
    }
    let q = d - m;
    let l = m - q;
    let meeting = Meeting::of(v1, v2)?;
    if !meeting.spanning {
        return Err(Error::NonTransverse);
    }
    let (f1, f2) = (v1.frame(), v2.frame());

    let mut omega_q = ExteriorElement::one(n);
    for _ in 0..q {
        omega_q = wedge(&omega_q, &standard_omega(n))?;
    }
    let mut s = 0.0;
    for mask in subsets(n, l) {
        let mu = ExteriorElement::monomial(n, mask, C64::new(1.0, 0.0));
        let a = wedge(&omega_q, &mu)?.evaluate_real(&f1)?.re;
        let b = hodge_star(&mu).evaluate_real(&f2)?.re;
        s += a * b;
    }
    let sign = if (l * l.saturating_sub(1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let lhs = sign / factorial(q) * v1.volume() * v2.volume() / v1.torus.volume() * s;

    let meet_real = v1.torus.basis() * lattice::to_f64(&meeting.meet);
    let meet_volume = meeting.component_volume(&v1.torus) * meeting.components as f64;
    let cfg = product_plane(&f1, &f2, &meet_real)?;
    let pg = pi_gram_sqrt_det(&cfg)?;
    let frame = ComplexFrame::new(m);
    let pairing = inner(&plane_form(&f1), &j_action(&plane_form(&f2), &frame)?)?.re;
    // The anti-diagonal copy of V₁ ∩ V₂ lies in the complement of S and
    // contributes √2 per direction to det^{1/2}(2Π*Π); it carries no
    // transversality information and is divided out.
    let antidiagonal = 2f64.powf(meeting.meet.ncols() as f64 / 2.0);
    let rhs = meet_volume * pairing * antidiagonal / pg;
    Ok(CoisotropicPairing { lhs, rhs, components: meeting.components, meet_volume })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn line(dir: [i64; 2], c: [f64; 2]) -> AffineSubtorus {
        AffineSubtorus::linear(2, &[&dir]).unwrap().translated(DVector::from_row_slice(&c))
    }

    #[test]
    fn phases_of_lines() {
        let ct = ComplexTorus::gaussian(1);
        let p = slag_phase(&ct, &line([1, 0], [0.0, 0.0])).unwrap();
        assert!((p - C64::new(1.0, 0.0)).norm() < 1e-15);
        let p = slag_phase(&ct, &line([1, 1], [0.0, 0.0])).unwrap();
        assert!((p - C64::from_polar(1.0, FRAC_PI_4)).norm() < 1e-15);
        let p = slag_phase(&ct, &line([0, 1], [0.0, 0.0])).unwrap();
        assert!((p - C64::new(0.0, 1.0)).norm() < 1e-15);
        let whole = AffineSubtorus::linear(2, &[&[1, 0], &[0, 1]]).unwrap();
        assert_eq!(slag_phase(&ct, &whole), Err(Error::NotLagrangian));
    }

    #[test]
    fn closed_phase_matches_oracle() {
        let ct = ComplexTorus::gaussian(1);
        for (a, b) in [([1, 0], [0, 1]), ([1, 1], [1, 0]), ([2, 1], [-1, 3])] {
            let (v1, v2) = (line(a, [0.0, 0.0]), line(b, [0.0, 0.0]));
            let closed = rho(&ct, &v1, &v2).unwrap();
            let oracle = slag_rho_oracle(&ct, &v1, &v2).unwrap();
            assert!((closed - oracle).norm() < 1e-14);
        }
    }

    #[test]
    fn meeting_counts() {
        let m = Meeting::of(&line([1, 0], [0.0, 0.0]), &line([1, 2], [0.0, 0.0])).unwrap();
        assert_eq!((m.components, m.spanning), (2, true));
        let m = Meeting::of(&line([1, 0], [0.0, 0.0]), &line([1, 0], [0.0, 0.5])).unwrap();
        assert_eq!(m.components, 0);
        let m = Meeting::of(&line([1, 0], [0.0, 0.0]), &line([1, 0], [0.3, 1.0])).unwrap();
        assert_eq!(m.components, 1);
    }

    #[test]
    fn inverse_square_parallel_lines() {
        for c in [0.1, 0.25, 0.5] {
            let s = slag_inverse_square_sum(&line([1, 0], [0.0, 0.0]), &line([1, 0], [0.0, c]), 400.0).unwrap();
            let exact = 2.0 * PI * PI * (c * c - c + 1.0 / 6.0);
            assert!((s.re - exact).abs() < 6e-3 && s.im.abs() < 1e-12, "c={c} {s} {exact}");
        }
    }

    #[test]
    fn coisotropic_four_torus() {
        let v1 = AffineSubtorus::linear(4, &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0]]).unwrap();
        let v2 = AffineSubtorus::linear(4, &[&[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]).unwrap();
        let c = coisotropic_pairing_check(&v1, &v2).unwrap();
        assert!((c.lhs - c.rhs).abs() < 1e-9, "{c:?}");
        let bad = AffineSubtorus::linear(4, &[&[1, 0, 0, 0], &[0, 1, 0, 0]]).unwrap();
        let other = AffineSubtorus::linear(4, &[&[0, 0, 1, 0], &[0, 0, 0, 1]]).unwrap();
        assert_eq!(coisotropic_pairing_check(&bad, &other).unwrap_err(), Error::NotCoisotropic);
    }
}
