//! Flat and complex tori: exact harmonic pairings by constant-form pullback,
//! fixed-point enumeration through the Smith normal form, and spectral sums
//! over the dual lattice.

mod lagrangian;

pub use lagrangian::*;

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::exterior::{pullback, C64};
use crate::invariants::{density, nu_gb, nu_rr, nu_sig, q_gb, q_rr, q_sig, trace_graph, ConformalDatum, TangentConfiguration};
use crate::lattice::{self, IMat};
use crate::linalg::{block_rotation, cdet, realify};
use crate::shells::{shell_sum, shells, Shell};

const LATTICE_TOL: f64 = 1e-9;

/// `R^n / L` with `L` generated by the columns of `basis`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatTorus {
    basis: DMatrix<f64>,
    inv: DMatrix<f64>,
}

impl FlatTorus {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::Shape("lattice basis must be square".into()));
        }
        let inv = basis.clone().try_inverse().ok_or_else(|| Error::Shape("lattice basis is singular".into()))?;
        Ok(Self { basis, inv })
    }

    /// `R^n / Z^n`.
    pub fn standard(n: usize) -> Self {
        Self { basis: DMatrix::identity(n, n), inv: DMatrix::identity(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn volume(&self) -> f64 {
        self.basis.determinant().abs()
    }

    /// Columns generate the dual lattice `L*`.
    pub fn dual_basis(&self) -> DMatrix<f64> {
        self.inv.transpose()
    }

    /// Gram matrix of the dual basis, so `|k|² = κᵀ G κ` for `k = B^{-T} κ`.
    pub fn dual_gram(&self) -> DMatrix<f64> {
        &self.inv * self.inv.transpose()
    }

    pub fn lattice_coords(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.inv * x
    }

    /// `B^{-1} A B` as an integer matrix, if `A` preserves the lattice.
    pub fn integer_form(&self, a: &DMatrix<f64>) -> Result<IMat> {
        lattice::round_integer(&(&self.inv * a * &self.basis), LATTICE_TOL).ok_or(Error::NotLatticePreserving)
    }

    /// Laplace eigenvalue `4π²|k|²` of the mode `e^{2πi k·x}`.
    pub fn eigenvalue(&self, kappa: &[i64]) -> f64 {
        let k = DVector::from_iterator(kappa.len(), kappa.iter().map(|&x| x as f64));
        4.0 * PI * PI * (k.transpose() * self.dual_gram() * k)[(0, 0)]
    }

    /// Dual-lattice shells with `|k| ≤ cutoff`.
    pub fn dual_shells(&self, cutoff: f64, include_origin: bool) -> Vec<Shell> {
        shells(&self.dual_gram(), cutoff, include_origin)
    }
}

/// Affine map `x ↦ A x + b` of a flat torus.
#[derive(Clone, Debug, PartialEq)]
pub struct ToriEndomorphism {
    pub torus: FlatTorus,
    pub a: DMatrix<f64>,
    pub offset: DVector<f64>,
    integer: IMat,
}

impl ToriEndomorphism {
    pub fn new(torus: FlatTorus, a: DMatrix<f64>, offset: DVector<f64>) -> Result<Self> {
        if a.nrows() != torus.dim() || offset.len() != torus.dim() {
            return Err(Error::DimensionMismatch { expected: torus.dim(), got: a.nrows() });
        }
        let integer = torus.integer_form(&a)?;
        Ok(Self { torus, a, offset, integer })
    }

    /// Map given by an integer matrix in lattice coordinates.
    pub fn from_integer(torus: FlatTorus, m: &IMat, offset: DVector<f64>) -> Result<Self> {
        let a = torus.basis() * lattice::to_f64(m) * &torus.inv;
        Self::new(torus, a, offset)
    }

    pub fn integer_matrix(&self) -> &IMat {
        &self.integer
    }

    pub fn dim(&self) -> usize {
        self.torus.dim()
    }

    /// `det(I − A)`, exact.
    pub fn det_i_minus(&self) -> i64 {
        let n = self.dim();
        lattice::det(&(IMat::identity(n, n) - &self.integer))
    }

    pub fn is_transverse(&self) -> bool {
        self.det_i_minus() != 0
    }
}

/// `Σ_p (−1)^p trace(Λ^p Aᵀ)`.
pub fn lefschetz_cohomological(f: &ToriEndomorphism) -> i64 {
    lattice::principal_minor_sums(f.integer_matrix())
        .iter()
        .enumerate()
        .map(|(p, e)| if p % 2 == 0 { *e } else { -*e })
        .sum()
}

/// All solutions of `(I − A) x ≡ b (mod L)`, as points of `R^n` with lattice
/// coordinates in `[0, 1)`.
pub fn fixed_points(f: &ToriEndomorphism) -> Result<Vec<DVector<f64>>> {
    let n = f.dim();
    let im = IMat::identity(n, n) - f.integer_matrix();
    let s = lattice::smith_normal_form(&im);
    if s.d.iter().any(|&x| x == 0) {
        return Err(Error::NonTransverse);
    }
    let beta = f.torus.lattice_coords(&f.offset);
    let ub = lattice::to_f64(&s.u) * beta;
    let v = lattice::to_f64(&s.v);
    let mut out = Vec::new();
    let mut z = vec![0i64; n];
    loop {
        let eta = DVector::from_fn(n, |i, _| (ub[i] + z[i] as f64) / s.d[i] as f64);
        let xi = (&v * eta).map(|x| x.rem_euclid(1.0));
        out.push(f.torus.basis() * xi);
        let mut k = 0;
        loop {
            if k == n {
                return Ok(out);
            }
            z[k] += 1;
            if z[k] < s.d[k] {
                break;
            }
            z[k] = 0;
            k += 1;
        }
    }
}

/// Pulled-back index data along `y ↦ (A y + b, y)`: the constant `c` with
/// `pullback = c · dvol`.
fn graph_coefficient(q: &crate::exterior::ExteriorElement, a: &DMatrix<f64>) -> Result<C64> {
    let n = a.nrows();
    let mut l = DMatrix::zeros(2 * n, n);
    l.view_mut((0, 0), (n, n)).copy_from(a);
    l.view_mut((n, 0), (n, n)).fill_with_identity();
    let p = pullback(&l, q)?;
    Ok(p.coeff(crate::exterior::full_mask(n)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GbIdentity {
    pub cohomological: i64,
    pub det_i_minus_a: i64,
    pub fixed_point_count: usize,
    /// `Σ ν_GB` over fixed points using the closed form.
    pub fixed_point_sum: i64,
    /// `Σ` of the brute-force densities of the Gauss-Bonnet index data.
    pub density_sum: f64,
    /// Exact harmonic pairing over the graph.
    pub harmonic: f64,
    /// Spectral integral at each requested `t`.
    pub spectral: Vec<(f64, f64)>,
    pub t_spread: f64,
}

/// Harmonic, spectral and fixed-point sides of the Gauss-Bonnet Lefschetz
/// identity for an affine torus map.
pub fn gb_identity_check(f: &ToriEndomorphism, ts: &[f64], cutoff: f64) -> Result<GbIdentity> {
    if !(cutoff > 0.0) {
        return Err(Error::InvalidCutoff(cutoff));
    }
    let n = f.dim();
    let pts = fixed_points(f)?;
    let q = q_gb(n);
    let c = graph_coefficient(&q, &f.a)?.re;
    let sign = nu_gb(&f.a)?;
    let local = density(&q, &trace_graph(&f.a))?.re;
    let sh = f.torus.dual_shells(cutoff, true);
    let spectral: Vec<(f64, f64)> = ts.iter().map(|&t| (t, c * graph_mode_sum(f, &sh, t).re)).collect();
    let (lo, hi) = spectral.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, v)| (lo.min(v), hi.max(v)));
    Ok(GbIdentity {
        cohomological: lefschetz_cohomological(f),
        det_i_minus_a: f.det_i_minus(),
        fixed_point_count: pts.len(),
        fixed_point_sum: sign as i64 * pts.len() as i64,
        density_sum: local * pts.len() as f64,
        harmonic: c,
        spectral,
        t_spread: if ts.is_empty() { 0.0 } else { hi - lo },
    })
}

/// `(1/vol) Σ_k e^{−tλ_k} ∫_M e^{2πi k·(f(y) − y)} dy` over the given shells:
/// a mode survives only when `Aᵀk = k`.
pub fn graph_mode_sum(f: &ToriEndomorphism, sh: &[Shell], t: f64) -> C64 {
    let m = f.integer_matrix();
    let n = f.dim();
    let beta = f.torus.lattice_coords(&f.offset);
    shell_sum(sh, |kappa, norm_sq| {
        let fixed = (0..n).all(|j| (0..n).map(|i| m[(i, j)] * kappa[i]).sum::<i64>() == kappa[j]);
        if !fixed {
            return C64::default();
        }
        let phase: f64 = kappa.iter().zip(beta.iter()).map(|(&k, &b)| k as f64 * b).sum();
        C64::from_polar((-4.0 * PI * PI * norm_sq * t).exp(), TAU * phase)
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvePairing {
    pub lhs: f64,
    pub rhs: f64,
    pub intersections: usize,
}

/// Gauss-Bonnet pairing over the closed curve `s ↦ (a s + c₁, b s + c₂)` in
/// `T¹ × T¹` against the fixed-point sum over its diagonal intersections.
pub fn curve_gb_pairing(a: i64, b: i64, offset: (f64, f64)) -> Result<CurvePairing> {
    let gap = offset.1 - offset.0;
    if a == b {
        let r = gap.rem_euclid(1.0);
        if r.min(1.0 - r) < 1e-12 {
            return Err(Error::NonTransverse);
        }
    }
    let q = q_gb(1);
    let l = DMatrix::from_row_slice(2, 1, &[a as f64, b as f64]);
    let lhs = pullback(&l, &q)?.coeff(1).re;
    let count = (a - b).unsigned_abs() as usize;
    let rhs = if count == 0 {
        0.0
    } else {
        let cfg = TangentConfiguration::transverse(1, l)?;
        density(&q, &cfg)?.re * count as f64
    };
    Ok(CurvePairing { lhs, rhs, intersections: count })
}

/// Conformal datum `(μ, θ)` of a similarity together with the orthonormal
/// frame `Q` (det +1) in which `A = μ Q k Qᵀ`.
pub fn conformal_datum_of(a: &DMatrix<f64>) -> Result<(ConformalDatum, DMatrix<f64>)> {
    let n = a.nrows();
    if n % 2 != 0 {
        return Err(Error::Shape("conformal datum needs even dimension".into()));
    }
    let ata = a.transpose() * a;
    let mu2 = ata.trace() / n as f64;
    let ratio = {
        let e = ata.symmetric_eigenvalues();
        e.max() / e.min()
    };
    if (ata.clone() - DMatrix::identity(n, n) * mu2).abs().max() > 1e-10 * mu2 {
        return Err(Error::NotConformal { ratio });
    }
    let mu = mu2.sqrt();
    let k = a / mu;
    // Eigenspaces of k + kᵀ (eigenvalue 2cos θ) are k-invariant; split each
    // into rotation planes (u, (k u − cos θ u)/sin θ).
    let eig = (&k + k.transpose()).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut cols: Vec<DVector<f64>> = Vec::new();
    let mut angles = Vec::new();
    let mut start = 0;
    while start < n {
        let lead = eig.eigenvalues[order[start]];
        let mut end = start + 1;
        while end < n && (eig.eigenvalues[order[end]] - lead).abs() < 1e-8 {
            end += 1;
        }
        let c = (lead / 2.0).clamp(-1.0, 1.0);
        if c > 1.0 - 1e-9 {
            return Err(Error::NonTransverse);
        }
        let mut pool: Vec<DVector<f64>> = order[start..end].iter().map(|&i| eig.eigenvectors.column(i).clone_owned()).collect();
        while let Some(u) = pool.first().cloned() {
            let (v, theta) = if c < -1.0 + 1e-9 {
                (pool.get(1).cloned().ok_or(Error::NotConformal { ratio })?, PI)
            } else {
                let sn = (1.0 - c * c).sqrt();
                ((&k * &u - &u * c) / sn, c.acos())
            };
            pool = pool
                .into_iter()
                .map(|w| {
                    let w = &w - &u * u.dot(&w);
                    &w - &v * v.dot(&w)
                })
                .filter(|w| w.norm() > 1e-6)
                .map(|w| w.normalize())
                .collect();
            let mut kept: Vec<DVector<f64>> = Vec::new();
            for w in pool {
                let r = kept.iter().fold(w, |acc, e| &acc - e * e.dot(&acc));
                if r.norm() > 1e-6 {
                    kept.push(r.normalize());
                }
            }
            pool = kept;
            cols.push(u);
            cols.push(v);
            angles.push(theta);
        }
        start = end;
    }
    if cols.len() != n {
        return Err(Error::NotConformal { ratio });
    }
    let mut frame = DMatrix::from_columns(&cols);
    if frame.determinant() < 0.0 {
        let flipped = -frame.column(1);
        frame.set_column(1, &flipped);
        angles[0] = -angles[0];
    }
    let angles: Vec<f64> = angles.into_iter().map(|x| x.rem_euclid(TAU)).collect();
    let rebuilt = &frame * block_rotation(&angles) * frame.transpose();
    if (rebuilt - &k).abs().max() > 1e-9 {
        return Err(Error::NotConformal { ratio });
    }
    Ok((ConformalDatum { mu, angles }, frame))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignaturePairing {
    pub lhs: f64,
    pub rhs: C64,
    /// Fixed-point sum using brute-force densities.
    pub rhs_density: C64,
    pub fixed_point_count: usize,
    pub datum: ConformalDatum,
}

/// Harmonic middle-degree pairing over the graph of a conformal torus map in
/// dimension `4k` against `Σ ν_sig`.
pub fn signature_pairing_check(f: &ToriEndomorphism) -> Result<SignaturePairing> {
    let n = f.dim();
    if n % 4 != 0 {
        return Err(Error::Shape(format!("signature check needs dimension divisible by 4, got {n}")));
    }
    if !f.is_transverse() {
        return Err(Error::NonTransverse);
    }
    let (datum, _) = conformal_datum_of(&f.a)?;
    let pts = fixed_points(f)?;
    let q = q_sig(n);
    let lhs = graph_coefficient(&q, &f.a)?.re;
    let count = pts.len() as f64;
    let rhs = nu_sig(&datum)? * count;
    let rhs_density = density(&q, &trace_graph(&f.a))? * count;
    Ok(SignaturePairing { lhs, rhs, rhs_density, fixed_point_count: pts.len(), datum })
}

/// `C^m / L` with `L` generated by `2m` real vectors in coordinates
/// `(Re z_0, Im z_0, Re z_1, …)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexTorus {
    pub m: usize,
    pub real: FlatTorus,
}

impl ComplexTorus {
    pub fn new(m: usize, basis: DMatrix<f64>) -> Result<Self> {
        if basis.nrows() != 2 * m {
            return Err(Error::DimensionMismatch { expected: 2 * m, got: basis.nrows() });
        }
        Ok(Self { m, real: FlatTorus::new(basis)? })
    }

    /// `C^m / Z[i]^m`.
    pub fn gaussian(m: usize) -> Self {
        Self { m, real: FlatTorus::standard(2 * m) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HoloLefschetz {
    /// `Σ_q (−1)^q trace(Λ^q ā)`.
    pub lhs: C64,
    /// `Σ 1/det_C(I − a)` over fixed points.
    pub rhs: C64,
    /// Same sum with brute-force Dolbeault densities.
    pub rhs_density: C64,
    pub fixed_point_count: usize,
}

fn complex_principal_minor_sums(a: &DMatrix<C64>) -> Vec<C64> {
    let m = a.nrows();
    let mut e = vec![C64::default(); m + 1];
    for mask in 0u32..(1 << m) {
        let idx: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let sub = DMatrix::from_fn(idx.len(), idx.len(), |i, j| a[(idx[i], idx[j])]);
        e[idx.len()] += cdet(&sub);
    }
    e
}

/// Holomorphic Lefschetz identity for `z ↦ a z + b` on a complex torus.
pub fn holo_lefschetz_check(ct: &ComplexTorus, a: &DMatrix<C64>, offset: &DVector<f64>) -> Result<HoloLefschetz> {
    let f = ToriEndomorphism::new(ct.real.clone(), realify(a), offset.clone())?;
    let pts = fixed_points(&f)?;
    let conj = a.map(|z| z.conj());
    let lhs = complex_principal_minor_sums(&conj)
        .iter()
        .enumerate()
        .map(|(q, e)| if q % 2 == 0 { *e } else { -*e })
        .sum();
    let count = pts.len() as f64;
    let local = nu_rr(a)?;
    let local_density = density(&q_rr(ct.m), &trace_graph(&realify(a)))?;
    Ok(HoloLefschetz { lhs, rhs: local * count, rhs_density: local_density * count, fixed_point_count: pts.len() })
}

/// `Σ_{|k| ≤ cutoff} e^{−4π²|k|² t}`, the heat trace on functions.
pub fn scalar_heat_trace(torus: &FlatTorus, t: f64, cutoff: f64) -> f64 {
    let sh = torus.dual_shells(cutoff, true);
    shell_sum(&sh, |_, q| C64::new((-4.0 * PI * PI * q * t).exp(), 0.0)).re
}

/// `Σ_p (−1)^p C(n,p) Σ_k e^{−4π²|k|² t}`: every mode carries the alternating
/// binomial sum, which is exactly zero.
pub fn heat_supertrace(torus: &FlatTorus, t: f64, cutoff: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::OutOfRange(format!("t must be positive, got {t}")));
    }
    let n = torus.dim() as i64;
    let mut weight = 0i64;
    let mut binom = 1i64;
    for p in 0..=n {
        weight += if p % 2 == 0 { binom } else { -binom };
        binom = binom * (n - p) / (p + 1);
    }
    Ok(weight as f64 * scalar_heat_trace(torus, t, cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn endo(rows: usize, v: &[i64]) -> ToriEndomorphism {
        let m = IMat::from_row_slice(rows, rows, v);
        ToriEndomorphism::from_integer(FlatTorus::standard(rows), &m, DVector::zeros(rows)).unwrap()
    }

    #[test]
    fn cohomological_examples() {
        assert_eq!(lefschetz_cohomological(&endo(1, &[2])), -1);
        assert_eq!(lefschetz_cohomological(&endo(2, &[1, 0, 0, 1])), 0);
        assert_eq!(lefschetz_cohomological(&endo(2, &[0, -1, 1, 0])), 2);
    }

    #[test]
    fn fixed_point_examples() {
        let p = fixed_points(&endo(1, &[2])).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p[0][0].abs() < 1e-15);
        let r = endo(2, &[0, -1, 1, 0]);
        let pts = fixed_points(&r).unwrap();
        assert_eq!(pts.len(), 2);
        for x in &pts {
            let res = &x.clone() - &r.a * x;
            assert!(res.iter().all(|v| (v - v.round()).abs() < 1e-12));
        }
        assert_eq!(fixed_points(&endo(2, &[1, 0, 0, 1])), Err(Error::NonTransverse));
    }

    #[test]
    fn gb_examples() {
        let g = gb_identity_check(&endo(1, &[2]), &[0.05, 0.1, 0.2], 10.0).unwrap();
        assert_eq!((g.cohomological, g.fixed_point_sum), (-1, -1));
        assert!((g.harmonic + 1.0).abs() < 1e-14);
        assert!(g.t_spread.abs() <= 1e-8);
        let g = gb_identity_check(&endo(2, &[0, -1, 1, 0]), &[0.05, 0.1, 0.2], 5.0).unwrap();
        assert_eq!((g.cohomological, g.fixed_point_sum), (2, 2));
        assert!((g.harmonic - 2.0).abs() < 1e-14);
        assert!((g.density_sum - 2.0).abs() < 1e-12);
    }

    #[test]
    fn curve_examples() {
        let c = curve_gb_pairing(0, 1, (0.0, 0.0)).unwrap();
        assert_eq!(c.intersections, 1);
        assert!((c.lhs - c.rhs).abs() < 1e-14 && (c.lhs.abs() - 1.0).abs() < 1e-14);
        let c = curve_gb_pairing(1, 1, (0.0, 0.3)).unwrap();
        assert_eq!((c.lhs, c.rhs, c.intersections), (0.0, 0.0, 0));
        let c = curve_gb_pairing(1, 2, (0.1, 0.4)).unwrap();
        assert!((c.lhs - c.rhs).abs() < 1e-10);
        assert_eq!(curve_gb_pairing(1, 1, (0.2, 0.2)), Err(Error::NonTransverse));
    }

    #[test]
    fn signature_examples() {
        let f = endo(4, &[0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1, 0]);
        let s = signature_pairing_check(&f).unwrap();
        assert!((s.rhs - C64::new(s.lhs, 0.0)).norm() < 1e-9, "{s:?}");
        let f = endo(4, &[-1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1]);
        let s = signature_pairing_check(&f).unwrap();
        assert!(s.lhs.abs() < 1e-12 && s.rhs.norm() < 1e-12);
        let id = endo(4, &[1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1]);
        assert_eq!(signature_pairing_check(&id).unwrap_err(), Error::NonTransverse);
    }

    #[test]
    fn holo_examples() {
        let ct = ComplexTorus::gaussian(1);
        let i = DMatrix::from_element(1, 1, C64::new(0.0, 1.0));
        let h = holo_lefschetz_check(&ct, &i, &DVector::zeros(2)).unwrap();
        assert!((h.lhs - C64::new(1.0, 1.0)).norm() < 1e-12);
        assert!((h.rhs - C64::new(1.0, 1.0)).norm() < 1e-12);
        assert_eq!(h.fixed_point_count, 2);
        let z = DMatrix::from_element(1, 1, C64::new(0.0, 0.0));
        let h = holo_lefschetz_check(&ct, &z, &DVector::zeros(2)).unwrap();
        assert!((h.lhs - C64::new(1.0, 0.0)).norm() < 1e-15 && (h.rhs - C64::new(1.0, 0.0)).norm() < 1e-15);
        let one = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        assert!(holo_lefschetz_check(&ct, &one, &DVector::zeros(2)).is_err());
    }

    #[test]
    fn heat_examples() {
        let t1 = FlatTorus::standard(1);
        let t = 0.01;
        let tr = scalar_heat_trace(&t1, t, 20.0);
        assert!((tr - (4.0 * PI * t).powf(-0.5)).abs() < 1e-8);
        assert_eq!(heat_supertrace(&FlatTorus::standard(3), 0.1, 3.0).unwrap(), 0.0);
    }
}
