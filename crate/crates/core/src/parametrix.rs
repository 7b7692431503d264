//! Flat-space heat parametrix, the torus heat kernel in its image-sum and
//! eigen-sum forms, and the small-time localization of index forms over graphs.

use std::collections::BTreeMap;
use std::f64::consts::{LN_10, PI, TAU};

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::exterior::{full_mask, pullback, ExteriorElement, C64};
use crate::invariants::{density, trace_graph};
use crate::shells::{shell_sum, shells};
use crate::torus::{fixed_points, graph_mode_sum, FlatTorus, ToriEndomorphism};

/// `(4πt)^{−n/2} e^{−|x−y|²/4t}`, the order-zero parametrix on `R^n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianKernel {
    pub n: usize,
    pub t: f64,
}

impl GaussianKernel {
    pub fn new(n: usize, t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::OutOfRange(format!("t must be positive, got {t}")));
        }
        Ok(Self { n, t })
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let r2: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
        (4.0 * PI * self.t).powf(-(self.n as f64) / 2.0) * (-r2 / (4.0 * self.t)).exp()
    }
}

/// Polynomial in `(x_1..x_n, u_1..u_n)`; exponents are stored as `[x…, u…]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Vec<u32>, C64>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: C64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(vec![0; 2 * n], c);
        p
    }

    /// `c · x^a u^b`.
    pub fn monomial(n: usize, x_exp: &[u32], u_exp: &[u32], c: C64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(x_exp.iter().chain(u_exp).copied().collect(), c);
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: C64) {
        let v = self.terms.entry(e.clone()).or_default();
        *v += c;
        if *v == C64::default() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], C64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn eval(&self, x: &[f64], u: &[f64]) -> C64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let m: f64 = x.iter().chain(u).zip(e).map(|(v, &k)| v.powi(k as i32)).product();
                c * m
            })
            .sum()
    }

    /// `∂/∂x_k`.
    pub fn dx(&self, k: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            if e[k] > 0 {
                let mut f = e.clone();
                f[k] -= 1;
                out.add_term(f, c * e[k] as f64);
            }
        }
        out
    }

    /// Multiplication by `u_k`.
    pub fn times_u(&self, k: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            let mut f = e.clone();
            f[self.n + k] += 1;
            out.add_term(f, *c);
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }
}

/// One step `a ↦ t Δ_x a + 4πi t Σ_k u_k ∂_{x_k} a` of the flat recursion
/// (`D² = −Δ`, trivial connection).
pub fn recursion_step(a: &Polynomial, t: f64) -> Polynomial {
    let mut out = Polynomial::zero(a.n);
    for k in 0..a.n {
        let d = a.dx(k);
        out = out.add(&d.dx(k).scale(C64::new(t, 0.0)));
        out = out.add(&d.times_u(k).scale(C64::new(0.0, 4.0 * PI * t)));
    }
    out
}

/// `a_j` in the flat case with `a_0` the identity.
pub fn aj_flat(n: usize, j: usize, t: f64) -> Polynomial {
    aj_from(Polynomial::constant(n, C64::new(1.0, 0.0)), j, t)
}

pub fn aj_from(a0: Polynomial, j: usize, t: f64) -> Polynomial {
    (0..j).fold(a0, |a, _| recursion_step(&a, t))
}

/// Which frequency/eigenvalue pairing the eigen-sum uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FourierConvention {
    /// Modes `e^{2πik·x}` with eigenvalues `4π²|k|²`.
    Standard,
    /// Modes `e^{2πik·x}` paired with `|k|²`: a dropped `2π`.
    DroppedTwoPi,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelComparison {
    pub max_diff: f64,
    pub trace_image: f64,
    pub trace_fourier: f64,
    pub image_radius: f64,
    pub fourier_radius: f64,
    pub pass: bool,
}

const TAIL: f64 = 1e-16;
const MAX_BOX_POINTS: f64 = 2e7;
const KERNEL_TOL: f64 = 1e-10;

fn box_points(gram: &nalgebra::DMatrix<f64>, radius: f64) -> f64 {
    let inv = gram.clone().try_inverse().unwrap_or_else(|| gram.clone());
    (0..gram.nrows()).map(|i| 2.0 * (radius * inv[(i, i)].max(0.0).sqrt()).floor() + 1.0).product()
}

fn fundamental(torus: &FlatTorus, v: &DVector<f64>) -> DVector<f64> {
    let c = torus.lattice_coords(v).map(|x| x - x.round());
    torus.basis() * c
}

/// Periodized Gaussian against the eigenfunction sum of the heat kernel of a
/// flat torus, at the given point pairs and on the diagonal (trace).
pub fn torus_kernel_compare(
    torus: &FlatTorus,
    t: f64,
    pairs: &[(DVector<f64>, DVector<f64>)],
    convention: FourierConvention,
) -> Result<KernelComparison> {
    let gauss = GaussianKernel::new(torus.dim(), t)?;
    let tail_log = -TAIL.ln();
    let diam: f64 = torus.basis().column_iter().map(|c| c.norm()).sum::<f64>() / 2.0;
    let image_radius = (4.0 * t * tail_log).sqrt() + diam;
    let fourier_radius = (tail_log / (4.0 * PI * PI * t)).sqrt();
    let primal = torus.basis().transpose() * torus.basis();
    let dual = torus.dual_gram();
    for (g, r) in [(&primal, image_radius), (&dual, fourier_radius)] {
        if box_points(g, r) > MAX_BOX_POINTS {
            return Err(Error::TruncationInsufficient(TAIL));
        }
    }
    let images = shells(&primal, image_radius, true);
    let modes = shells(&dual, fourier_radius, true);
    let eig = match convention {
        FourierConvention::Standard => 4.0 * PI * PI,
        FourierConvention::DroppedTwoPi => 1.0,
    };
    let vol = torus.volume();
    let n = torus.dim();
    let zero = vec![0.0; n];

    let image_sum = |d: &DVector<f64>| {
        shell_sum(&images, |l, _| {
            let shift = torus.basis() * DVector::from_iterator(n, l.iter().map(|&x| x as f64));
            let p: Vec<f64> = (d - shift).iter().copied().collect();
            C64::new(gauss.eval(&p, &zero), 0.0)
        })
        .re
    };
    let fourier_sum = |d: &DVector<f64>| {
        let c = torus.lattice_coords(d);
        shell_sum(&modes, |k, q| {
            let phase: f64 = k.iter().zip(c.iter()).map(|(&a, &b)| a as f64 * b).sum();
            C64::from_polar((-eig * q * t).exp(), TAU * phase)
        })
        .re
            / vol
    };

    let mut max_diff = 0.0f64;
    for (x, y) in pairs {
        let d = fundamental(torus, &(x - y));
        max_diff = max_diff.max((image_sum(&d) - fourier_sum(&d)).abs());
    }
    let origin = DVector::zeros(n);
    let trace_image = vol * image_sum(&origin);
    let trace_fourier = vol * fourier_sum(&origin);
    max_diff = max_diff.max((trace_image - trace_fourier).abs() / vol);
    Ok(KernelComparison {
        max_diff,
        trace_image,
        trace_fourier,
        image_radius,
        fourier_radius,
        pass: max_diff <= KERNEL_TOL,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Localization {
    /// `(t, ∫_graph q e_t)` at each grid point.
    pub samples: Vec<(f64, f64)>,
    pub extrapolated: f64,
    /// Difference between the two finest Richardson estimates.
    pub error_estimate: f64,
    /// Largest Lagrange weight magnitude of the stencil (1 for a constant fit).
    pub condition: f64,
    pub fixed_point_sum: f64,
}

/// Three-point polynomial extrapolation to `t = 0`; returns the value and the
/// largest stencil weight.
fn richardson(pts: &[(f64, f64)]) -> (f64, f64) {
    let mut value = 0.0;
    let mut cond = 0.0f64;
    for (i, &(ti, vi)) in pts.iter().enumerate() {
        let w: f64 = pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &(tj, _))| tj / (tj - ti)).product();
        value += w * vi;
        cond = cond.max(w.abs());
    }
    (value, cond)
}

/// Pairs the index data `q` with the truncated eigen-sum heat kernel over the
/// graph `{(f(y), y)}` (exact linear integration per mode), extrapolates
/// `t → 0`, and compares with the fixed-point sum of `density(q, ·)`.
pub fn localization_limit(q: &ExteriorElement, f: &ToriEndomorphism, ts: &[f64], cutoff: f64) -> Result<Localization> {
    let n = f.dim();
    if ts.len() < 3 {
        return Err(Error::UnstableExtrapolation("need at least three t values".into()));
    }
    let mut ts = ts.to_vec();
    ts.sort_by(f64::total_cmp);
    if ts[0] <= 0.0 || ts.windows(2).any(|w| w[1] - w[0] <= 1e-12 * w[1]) {
        return Err(Error::UnstableExtrapolation("t values must be positive and distinct".into()));
    }
    let pts = fixed_points(f)?;
    if !q.is_zero() && q.degree() != Some(n) {
        return Err(Error::DegreeMismatch { form: q.degree().unwrap_or(0), plane: n });
    }
    let mut l = nalgebra::DMatrix::zeros(2 * n, n);
    l.view_mut((0, 0), (n, n)).copy_from(&f.a);
    l.view_mut((n, 0), (n, n)).fill_with_identity();
    let coeff = if q.is_zero() { C64::default() } else { pullback(&l, q)?.coeff(full_mask(n)) };
    let sh = f.torus.dual_shells(cutoff, true);
    let samples: Vec<(f64, f64)> = ts.iter().map(|&t| (t, (coeff * graph_mode_sum(f, &sh, t)).re)).collect();

    let fine = &samples[..3];
    let (extrapolated, condition) = richardson(fine);
    let error_estimate = if samples.len() >= 4 { (richardson(&samples[1..4]).0 - extrapolated).abs() } else { 0.0 };
    if !condition.is_finite() || condition > 1e6 {
        return Err(Error::UnstableExtrapolation(format!("stencil condition {condition:.3e}")));
    }
    let fixed_point_sum = if q.is_zero() { 0.0 } else { density(q, &trace_graph(&f.a))?.re * pts.len() as f64 };
    Ok(Localization { samples, extrapolated, error_estimate, condition, fixed_point_sum })
}

/// Leading small-time term `(4πt)^{−n/2}` of the heat trace per unit volume.
pub fn scalar_trace_oracle(n: usize, t: f64) -> f64 {
    (4.0 * PI * t).powf(-(n as f64) / 2.0)
}

/// Smallest cutoff with `e^{−4π²R²t} < 1e−16`.
pub fn fourier_cutoff(t: f64) -> f64 {
    (16.0 * LN_10 / (4.0 * PI * PI * t)).sqrt()
}
