//! Exterior algebra over an oriented inner-product space with an orthonormal
//! coframe `μ^0 .. μ^{N-1}`.
//!
//! Basis monomials are stored as bitmasks: bit `i` set means `μ^i` is a
//! factor, and the factors are always taken in increasing order. Indices are
//! 0-based throughout the crate.

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 16;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Debug, PartialEq)]
pub struct ExteriorElement {
    dim: usize,
    coeffs: BTreeMap<u32, C64>,
}

impl ExteriorElement {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        Self { dim, coeffs: BTreeMap::new() }
    }

    pub fn one(dim: usize) -> Self {
        Self::monomial(dim, 0, C64::new(1.0, 0.0))
    }

    /// `c · μ^I` for the subset encoded by `mask`.
    pub fn monomial(dim: usize, mask: u32, c: C64) -> Self {
        let mut e = Self::zero(dim);
        assert!(dim == 32 || mask >> dim == 0, "mask {mask:b} outside dimension {dim}");
        if c != C64::new(0.0, 0.0) {
            e.coeffs.insert(mask, c);
        }
        e
    }

    /// The covector `μ^i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        assert!(i < dim);
        Self::monomial(dim, 1 << i, C64::new(1.0, 0.0))
    }

    /// `μ^{i_1} ∧ … ∧ μ^{i_k}` in the given order (the sign follows the order).
    pub fn from_indices(dim: usize, idx: &[usize]) -> Self {
        idx.iter()
            .fold(Self::one(dim), |acc, &i| wedge(&acc, &Self::basis(dim, i)).expect("same dim"))
    }

    /// Top-degree form `μ^0 ∧ … ∧ μ^{N-1}`.
    pub fn volume(dim: usize) -> Self {
        Self::monomial(dim, full_mask(dim), C64::new(1.0, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, mask: u32) -> C64 {
        self.coeffs.get(&mask).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, C64)> + '_ {
        self.coeffs.iter().map(|(&k, &v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree-`p` component.
    pub fn homogeneous(&self, p: usize) -> Self {
        self.filter(|mask| mask.count_ones() as usize == p)
    }

    /// Degrees that carry a nonzero coefficient.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.coeffs.keys().map(|m| m.count_ones() as usize).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// The single degree of a homogeneous nonzero element.
    pub fn degree(&self) -> Option<usize> {
        match self.degrees().as_slice() {
            [p] => Some(*p),
            _ => None,
        }
    }

    pub fn filter(&self, keep: impl Fn(u32) -> bool) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().filter(|(k, _)| keep(**k)).map(|(k, v)| (*k, *v)).collect(),
        }
    }

    /// Drop coefficients with modulus at most `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().filter(|(_, v)| v.norm() > tol).map(|(k, v)| (*k, *v)).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = Self::zero(self.dim);
        for (&k, &v) in &self.coeffs {
            out.add_term(k, v * c);
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v.conj())).collect(),
        }
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Sum of coefficient moduli squared.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|v| v.norm_sqr()).sum()
    }

    pub(crate) fn add_term(&mut self, mask: u32, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        let e = self.coeffs.entry(mask).or_default();
        *e += c;
        if *e == C64::new(0.0, 0.0) {
            self.coeffs.remove(&mask);
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Ok(())
    }

    /// Place this element into a larger space, sending `μ^i` to `μ^{i+shift}`.
    pub fn embed(&self, dim: usize, shift: usize) -> Self {
        assert!(self.dim + shift <= dim);
        Self {
            dim,
            coeffs: self.coeffs.iter().map(|(k, v)| (k << shift, *v)).collect(),
        }
    }

    /// Value on the ordered vectors given as columns of `w` (a multilinear
    /// alternating evaluation; only the component of degree `w.ncols()` enters).
    pub fn evaluate(&self, w: &DMatrix<C64>) -> Result<C64> {
        if w.nrows() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: w.nrows() });
        }
        let k = w.ncols();
        let mut acc = C64::default();
        for (&mask, &c) in &self.coeffs {
            if mask.count_ones() as usize != k {
                continue;
            }
            let rows = mask_indices(mask);
            acc += c * minor_det(w, &rows, &(0..k).collect::<Vec<_>>());
        }
        Ok(acc)
    }

    pub fn evaluate_real(&self, w: &DMatrix<f64>) -> Result<C64> {
        self.evaluate(&to_complex(w))
    }
}

impl Add for &ExteriorElement {
    type Output = ExteriorElement;
    fn add(self, rhs: &ExteriorElement) -> ExteriorElement {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in addition");
        let mut out = self.clone();
        for (&k, &v) in &rhs.coeffs {
            out.add_term(k, v);
        }
        out
    }
}

impl Add for ExteriorElement {
    type Output = ExteriorElement;
    fn add(self, rhs: ExteriorElement) -> ExteriorElement {
        &self + &rhs
    }
}

impl AddAssign<&ExteriorElement> for ExteriorElement {
    fn add_assign(&mut self, rhs: &ExteriorElement) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in addition");
        for (&k, &v) in &rhs.coeffs {
            self.add_term(k, v);
        }
    }
}

impl Sub for &ExteriorElement {
    type Output = ExteriorElement;
    fn sub(self, rhs: &ExteriorElement) -> ExteriorElement {
        self + &(-rhs)
    }
}

impl Sub for ExteriorElement {
    type Output = ExteriorElement;
    fn sub(self, rhs: ExteriorElement) -> ExteriorElement {
        &self - &rhs
    }
}

impl Neg for &ExteriorElement {
    type Output = ExteriorElement;
    fn neg(self) -> ExteriorElement {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Neg for ExteriorElement {
    type Output = ExteriorElement;
    fn neg(self) -> ExteriorElement {
        -&self
    }
}

impl Mul<C64> for &ExteriorElement {
    type Output = ExteriorElement;
    fn mul(self, c: C64) -> ExteriorElement {
        self.scale(c)
    }
}

impl Mul<f64> for &ExteriorElement {
    type Output = ExteriorElement;
    fn mul(self, c: f64) -> ExteriorElement {
        self.scale(C64::new(c, 0.0))
    }
}

impl Mul<f64> for ExteriorElement {
    type Output = ExteriorElement;
    fn mul(self, c: f64) -> ExteriorElement {
        self.scale(C64::new(c, 0.0))
    }
}

pub fn full_mask(dim: usize) -> u32 {
    if dim >= 32 {
        u32::MAX
    } else {
        (1u32 << dim) - 1
    }
}

/// Bit positions of `mask` in increasing order.
pub fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

pub fn indices_mask(idx: &[usize]) -> u32 {
    idx.iter().fold(0, |m, &i| m | 1 << i)
}

/// All `k`-subsets of `0..n` as masks, in increasing numeric order.
pub fn subsets(n: usize, k: usize) -> Vec<u32> {
    (0..=full_mask(n)).filter(|m| m.count_ones() as usize == k).collect()
}

/// Sign of the shuffle taking `μ^a ∧ μ^b` to sorted order, or 0 when they overlap.
pub fn wedge_sign(a: u32, b: u32) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> j).count_ones();
        rest &= rest - 1;
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn wedge(a: &ExteriorElement, b: &ExteriorElement) -> Result<ExteriorElement> {
    a.check_dim(b)?;
    let mut out = ExteriorElement::zero(a.dim);
    for (&ka, &va) in &a.coeffs {
        for (&kb, &vb) in &b.coeffs {
            let s = wedge_sign(ka, kb);
            if s != 0 {
                out.add_term(ka | kb, va * vb * s as f64);
            }
        }
    }
    Ok(out)
}

/// Wedge of a list of elements, left to right. The empty product is 1.
pub fn wedge_all(dim: usize, items: &[ExteriorElement]) -> Result<ExteriorElement> {
    items.iter().try_fold(ExteriorElement::one(dim), |acc, x| wedge(&acc, x))
}

pub fn hodge_star(a: &ExteriorElement) -> ExteriorElement {
    let full = full_mask(a.dim);
    let mut out = ExteriorElement::zero(a.dim);
    for (&k, &v) in &a.coeffs {
        let c = full & !k;
        out.add_term(c, v * wedge_sign(k, c) as f64);
    }
    out
}

/// Hermitian inner product, conjugate-linear in the second slot.
pub fn inner(a: &ExteriorElement, b: &ExteriorElement) -> Result<C64> {
    a.check_dim(b)?;
    Ok(a.coeffs
        .iter()
        .filter_map(|(k, va)| b.coeffs.get(k).map(|vb| va * vb.conj()))
        .sum())
}

/// Pullback along the linear map `L` (K×N, taking points of R^N to R^K) of a
/// form on R^K. Covectors transform as `μ^i ↦ Σ_j L[i][j] μ^j`.
pub fn pullback(l: &DMatrix<f64>, a: &ExteriorElement) -> Result<ExteriorElement> {
    pullback_complex(&to_complex(l), a)
}

pub fn pullback_complex(l: &DMatrix<C64>, a: &ExteriorElement) -> Result<ExteriorElement> {
    if l.nrows() != a.dim {
        return Err(Error::Shape(format!(
            "map has {} rows but the form lives in dimension {}",
            l.nrows(),
            a.dim
        )));
    }
    let n = l.ncols();
    if n > MAX_DIM {
        return Err(Error::OutOfRange(format!("source dimension {n} exceeds {MAX_DIM}")));
    }
    let images: Vec<ExteriorElement> = (0..l.nrows())
        .map(|i| {
            let mut e = ExteriorElement::zero(n);
            for j in 0..n {
                e.add_term(1 << j, l[(i, j)]);
            }
            e
        })
        .collect();
    let mut out = ExteriorElement::zero(n);
    for (&k, &v) in &a.coeffs {
        let mut term = ExteriorElement::monomial(n, 0, v);
        for i in mask_indices(k) {
            term = wedge(&term, &images[i])?;
            if term.is_zero() {
                break;
            }
        }
        out += &term;
    }
    Ok(out)
}

/// The standard symplectic form `Σ_j μ^{2j} ∧ μ^{2j+1}`.
pub fn standard_omega(dim: usize) -> ExteriorElement {
    assert!(dim % 2 == 0, "symplectic form needs even dimension");
    let mut out = ExteriorElement::zero(dim);
    for j in 0..dim / 2 {
        out.add_term(0b11 << (2 * j), C64::new(1.0, 0.0));
    }
    out
}

/// Exterior multiplication by `omega`.
pub fn lefschetz_l(a: &ExteriorElement, omega: &ExteriorElement) -> Result<ExteriorElement> {
    wedge(omega, a)
}

/// Complex structure on `R^{2m}` with coordinates paired as `(2j, 2j+1)`.
///
/// On vectors `J e_{2j} = e_{2j+1}`, `J e_{2j+1} = -e_{2j}`; on covectors
/// `α ↦ α∘J`, so the unitary coframe `η^j = (μ^{2j} + i μ^{2j+1})/√2` has
/// eigenvalue `+i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComplexFrame {
    pub m: usize,
}

impl ComplexFrame {
    pub fn new(m: usize) -> Self {
        Self { m }
    }

    pub fn real_dim(&self) -> usize {
        2 * self.m
    }

    pub fn eta(&self, j: usize) -> ExteriorElement {
        let n = self.real_dim();
        let mut e = ExteriorElement::zero(n);
        e.add_term(1 << (2 * j), C64::new(FRAC_1_SQRT_2, 0.0));
        e.add_term(1 << (2 * j + 1), C64::new(0.0, FRAC_1_SQRT_2));
        e
    }

    pub fn eta_bar(&self, j: usize) -> ExteriorElement {
        self.eta(j).conj()
    }

    /// Matrix of `J` acting on vectors.
    pub fn j_vectors(&self) -> DMatrix<f64> {
        let n = self.real_dim();
        let mut j = DMatrix::zeros(n, n);
        for k in 0..self.m {
            j[(2 * k + 1, 2 * k)] = 1.0;
            j[(2 * k, 2 * k + 1)] = -1.0;
        }
        j
    }

    /// Substitution expressing `μ^i` in the coframe `ζ` with
    /// `ζ^{2j} = η^j`, `ζ^{2j+1} = η̄^j`.
    fn to_eta(&self) -> DMatrix<C64> {
        let n = self.real_dim();
        let s = FRAC_1_SQRT_2;
        let mut c = DMatrix::zeros(n, n);
        for j in 0..self.m {
            c[(2 * j, 2 * j)] = C64::new(s, 0.0);
            c[(2 * j, 2 * j + 1)] = C64::new(s, 0.0);
            c[(2 * j + 1, 2 * j)] = C64::new(0.0, -s);
            c[(2 * j + 1, 2 * j + 1)] = C64::new(0.0, s);
        }
        c
    }

    /// Inverse substitution expressing `ζ` in `μ`.
    fn from_eta(&self) -> DMatrix<C64> {
        let n = self.real_dim();
        let s = FRAC_1_SQRT_2;
        let mut d = DMatrix::zeros(n, n);
        for j in 0..self.m {
            d[(2 * j, 2 * j)] = C64::new(s, 0.0);
            d[(2 * j, 2 * j + 1)] = C64::new(0.0, s);
            d[(2 * j + 1, 2 * j)] = C64::new(s, 0.0);
            d[(2 * j + 1, 2 * j + 1)] = C64::new(0.0, -s);
        }
        d
    }
}

/// `R^{2n} = R^n ⊕ R^n`: covectors `0..n` belong to the first factor and
/// `n..2n` to the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProductSplit {
    pub n: usize,
}

impl ProductSplit {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn first(&self, a: &ExteriorElement) -> ExteriorElement {
        assert_eq!(a.dim, self.n);
        a.embed(2 * self.n, 0)
    }

    pub fn second(&self, a: &ExteriorElement) -> ExteriorElement {
        assert_eq!(a.dim, self.n);
        a.embed(2 * self.n, self.n)
    }

    pub fn first_mask(&self) -> u32 {
        full_mask(self.n)
    }

    pub fn second_mask(&self) -> u32 {
        full_mask(self.n) << self.n
    }
}

fn block_diag2(a: &DMatrix<C64>) -> DMatrix<C64> {
    let n = a.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((n, n), (n, n)).copy_from(a);
    out
}

const EVEN_BITS: u32 = 0x5555_5555;
const ODD_BITS: u32 = 0xAAAA_AAAA;

/// Component of bitype `(p, q)`.
pub fn bitype_project(a: &ExteriorElement, frame: &ComplexFrame, p: usize, q: usize) -> Result<ExteriorElement> {
    if a.dim != frame.real_dim() {
        return Err(Error::DimensionMismatch { expected: frame.real_dim(), got: a.dim });
    }
    if p > frame.m || q > frame.m {
        return Err(Error::InvalidBidegree { p, q, m: frame.m });
    }
    let z = pullback_complex(&frame.to_eta(), a)?;
    let kept = z.filter(|k| (k & EVEN_BITS).count_ones() as usize == p && (k & ODD_BITS).count_ones() as usize == q);
    pullback_complex(&frame.from_eta(), &kept)
}

/// Component of multidegree `(a1, b1)(c1, d1)` on a product of two complex
/// spaces of complex dimension `frame.m` each.
pub fn multigrade_project(
    a: &ExteriorElement,
    split: &ProductSplit,
    frame: &ComplexFrame,
    grade: (usize, usize, usize, usize),
) -> Result<ExteriorElement> {
    if split.n != frame.real_dim() || a.dim != 2 * split.n {
        return Err(Error::DimensionMismatch { expected: 2 * frame.real_dim(), got: a.dim });
    }
    let (a1, b1, c1, d1) = grade;
    let m = frame.m;
    if a1 > m || b1 > m || c1 > m || d1 > m {
        return Err(Error::InvalidBidegree { p: a1.max(c1), q: b1.max(d1), m });
    }
    let to = block_diag2(&frame.to_eta());
    let from = block_diag2(&frame.from_eta());
    let z = pullback_complex(&to, a)?;
    let lo = split.first_mask();
    // n = 2m is even, so parity of a global index matches its parity within the factor.
    let hi = split.second_mask();
    let count = |k: u32, part: u32, parity: u32| (k & part & parity).count_ones() as usize;
    let kept = z.filter(|k| {
        count(k, lo, EVEN_BITS) == a1
            && count(k, lo, ODD_BITS) == b1
            && count(k, hi, EVEN_BITS) == c1
            && count(k, hi, ODD_BITS) == d1
    });
    pullback_complex(&from, &kept)
}

/// `Σ_a` of the `(p, a)(0, p - a)` components of `z`.
pub fn z_zero(z: &ExteriorElement, split: &ProductSplit, frame: &ComplexFrame, p: usize) -> Result<ExteriorElement> {
    let mut out = ExteriorElement::zero(z.dim);
    for a in 0..=p.min(frame.m) {
        if p - a > frame.m {
            continue;
        }
        out += &multigrade_project(z, split, frame, (p, a, 0, p - a))?;
    }
    Ok(out)
}

/// Action of `J` on forms, extended multiplicatively from covectors.
pub fn j_action(a: &ExteriorElement, frame: &ComplexFrame) -> Result<ExteriorElement> {
    if a.dim != frame.real_dim() {
        return Err(Error::DimensionMismatch { expected: frame.real_dim(), got: a.dim });
    }
    pullback(&frame.j_vectors(), a)
}

pub fn to_complex(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|x| C64::new(x, 0.0))
}

/// Determinant of the submatrix with the given rows and columns.
pub fn minor_det(w: &DMatrix<C64>, rows: &[usize], cols: &[usize]) -> C64 {
    let k = rows.len();
    match k {
        0 => C64::new(1.0, 0.0),
        1 => w[(rows[0], cols[0])],
        2 => w[(rows[0], cols[0])] * w[(rows[1], cols[1])] - w[(rows[0], cols[1])] * w[(rows[1], cols[0])],
        _ => DMatrix::from_fn(k, k, |i, j| w[(rows[i], cols[j])]).determinant(),
    }
}
