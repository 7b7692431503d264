//! Deterministic seeded generators for the randomized checks.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::exterior::C64;
use crate::invariants::ConformalDatum;
use crate::lattice::{self, IMat};
use crate::linalg::{block_rotation, gram_schmidt, i_minus, relative_conditioning};

const MAX_TRIES: usize = 10_000;

#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn gaussian_matrix(&mut self, r: usize, c: usize) -> DMatrix<f64> {
        DMatrix::from_fn(r, c, |_, _| self.rng.sample(StandardNormal))
    }

    pub fn complex_matrix(&mut self, r: usize, c: usize) -> DMatrix<C64> {
        DMatrix::from_fn(r, c, |_, _| {
            C64::new(self.rng.sample(StandardNormal), self.rng.sample(StandardNormal))
        })
    }

    /// Real `n × n` matrix with `I − A` comfortably invertible.
    pub fn transverse_matrix(&mut self, n: usize) -> DMatrix<f64> {
        loop {
            let a = self.gaussian_matrix(n, n);
            if relative_conditioning(&i_minus(&a)) > 1e-4 {
                return a;
            }
        }
    }

    /// Complex `m × m` matrix with `I − a` comfortably invertible.
    pub fn transverse_complex_matrix(&mut self, m: usize) -> DMatrix<C64> {
        loop {
            let a = self.complex_matrix(m, m);
            let d = DMatrix::<C64>::identity(m, m) - &a;
            let s = d.singular_values();
            if s.min() > 1e-4 * s.max() {
                return a;
            }
        }
    }

    /// Rotation with determinant +1.
    pub fn rotation(&mut self, n: usize) -> DMatrix<f64> {
        loop {
            let q = gram_schmidt(&self.gaussian_matrix(n, n), 1e-10);
            if q.ncols() == n {
                let d = q.determinant();
                let mut q = q;
                if d < 0.0 {
                    let c = -q.column(0);
                    q.set_column(0, &c);
                }
                return q;
            }
        }
    }

    /// Conformal datum with angles away from 0 and `det(I − μk)` away from 0.
    pub fn conformal_datum(&mut self, m: usize) -> ConformalDatum {
        loop {
            let mu = self.uniform(0.3, 3.0);
            let angles: Vec<f64> = (0..m).map(|_| self.uniform(0.2, std::f64::consts::TAU - 0.2)).collect();
            let mk = block_rotation(&angles) * mu;
            if relative_conditioning(&i_minus(&mk)) > 1e-3 {
                return ConformalDatum { mu, angles };
            }
        }
    }

    /// A conformal matrix `μ Q k Qᵀ` in a random orthonormal frame.
    pub fn conformal_matrix(&mut self, m: usize) -> DMatrix<f64> {
        let d = self.conformal_datum(m);
        let q = self.rotation(2 * m);
        &q * d.matrix() * q.transpose()
    }

    /// Integer matrix with entries in `-bound..=bound` and `det(I − A) ≠ 0`.
    pub fn integer_matrix(&mut self, n: usize, bound: i64) -> IMat {
        loop {
            let a = IMat::from_fn(n, n, |_, _| self.rng.random_range(-bound..=bound));
            if lattice::det(&(IMat::identity(n, n) - &a)) != 0 {
                return a;
            }
        }
    }

    /// Gaussian-integer `m × m` matrix with `det_C(I − a) ≠ 0`.
    pub fn gaussian_integer_matrix(&mut self, m: usize, bound: i64) -> DMatrix<C64> {
        loop {
            let a = DMatrix::from_fn(m, m, |_, _| {
                C64::new(
                    self.rng.random_range(-bound..=bound) as f64,
                    self.rng.random_range(-bound..=bound) as f64,
                )
            });
            let d = DMatrix::<C64>::identity(m, m) - &a;
            if d.determinant().norm() > 0.5 {
                return a;
            }
        }
    }

    /// Signed permutation matrix with `det(I − A) ≠ 0`.
    pub fn orthogonal_integer(&mut self, n: usize) -> Result<IMat> {
        let all = signed_permutations(n);
        let good: Vec<IMat> = all
            .into_iter()
            .filter(|a| lattice::det(&(IMat::identity(n, n) - a)) != 0)
            .collect();
        if good.is_empty() {
            return Err(Error::Infeasible(format!("no transverse signed permutation in dimension {n}")));
        }
        Ok(good[self.rng.random_range(0..good.len())].clone())
    }

    /// Primitive integer vector with entries in `-bound..=bound`.
    pub fn primitive_vector(&mut self, n: usize, bound: i64) -> Vec<i64> {
        loop {
            let v: Vec<i64> = (0..n).map(|_| self.rng.random_range(-bound..=bound)).collect();
            if v.iter().fold(0, |g, &x| gcd(g, x)) == 1 {
                return v;
            }
        }
    }

    /// Integer generators of a rank-`d` sublattice of `Z^n`.
    pub fn integer_directions(&mut self, n: usize, d: usize, bound: i64) -> IMat {
        for _ in 0..MAX_TRIES {
            let g = IMat::from_fn(n, d, |_, _| self.rng.random_range(-bound..=bound));
            if lattice::rank(&g) == d {
                return g;
            }
        }
        panic!("could not draw {d} independent integer vectors in Z^{n}");
    }

    /// Integer generators of a rational coisotropic subspace of dimension
    /// `m + q` in `R^{2m}` with the standard symplectic form: the symplectic
    /// annihilator of a random rational isotropic subspace of dimension `m − q`.
    pub fn coisotropic_directions(&mut self, m: usize, q: usize, bound: i64) -> Result<IMat> {
        if q > m {
            return Err(Error::Infeasible(format!("q = {q} exceeds m = {m}")));
        }
        let n = 2 * m;
        let l = m - q;
        let omega = standard_omega_matrix(m);
        'outer: for _ in 0..MAX_TRIES {
            let mut iso: Vec<Vec<i64>> = Vec::new();
            for _ in 0..l {
                let constraints: Vec<Vec<i64>> = iso.iter().map(|a| mat_vec(&omega, a)).collect();
                let candidate = if constraints.is_empty() {
                    self.primitive_vector(n, bound)
                } else {
                    let c = IMat::from_fn(constraints.len(), n, |i, j| constraints[i][j]);
                    let k = lattice::integer_kernel(&c);
                    let coeffs: Vec<i64> = (0..k.ncols()).map(|_| self.rng.random_range(-bound..=bound)).collect();
                    (0..n).map(|i| (0..k.ncols()).map(|j| k[(i, j)] * coeffs[j]).sum()).collect()
                };
                iso.push(candidate);
                let g = IMat::from_fn(n, iso.len(), |i, j| iso[j][i]);
                if lattice::rank(&g) < iso.len() {
                    continue 'outer;
                }
            }
            if l == 0 {
                return Ok(IMat::identity(n, n));
            }
            let ann = IMat::from_fn(l, n, |i, j| mat_vec(&omega, &iso[i])[j]);
            return Ok(lattice::integer_kernel(&ann));
        }
        Err(Error::Infeasible("no isotropic subspace found".into()))
    }
}

/// Matrix of `ω(u, v) = uᵀ Ω v` for `ω = Σ μ^{2j} ∧ μ^{2j+1}`.
pub fn standard_omega_matrix(m: usize) -> IMat {
    let mut o = IMat::zeros(2 * m, 2 * m);
    for j in 0..m {
        o[(2 * j, 2 * j + 1)] = 1;
        o[(2 * j + 1, 2 * j)] = -1;
    }
    o
}

fn mat_vec(a: &IMat, v: &[i64]) -> Vec<i64> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)] * v[j]).sum()).collect()
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// All `2^n n!` signed permutation matrices.
pub fn signed_permutations(n: usize) -> Vec<IMat> {
    fn perms(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == items.len() {
            out.push(items.clone());
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            perms(items, k + 1, out);
            items.swap(k, i);
        }
    }
    let mut ps = Vec::new();
    perms(&mut (0..n).collect(), 0, &mut ps);
    let mut out = Vec::new();
    for p in &ps {
        for signs in 0u32..(1 << n) {
            let mut a = IMat::zeros(n, n);
            for (col, &row) in p.iter().enumerate() {
                a[(row, col)] = if signs >> col & 1 == 1 { -1 } else { 1 };
            }
            out.push(a);
        }
    }
    out
}
