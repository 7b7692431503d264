//! Euclidean Clifford algebra on `R^{2m}` acting on `C^{2^m}`, and the trace
//! oracle for the spin fixed-point density.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::exterior::{ExteriorElement, ProductSplit, C64};
use crate::invariants::{density, trace_graph, ConformalDatum};

pub type CMat = DMatrix<C64>;

#[derive(Clone, Debug)]
pub struct GammaRep {
    pub m: usize,
    /// `gammas[i]` represents Clifford multiplication by `e_i`.
    pub gammas: Vec<CMat>,
    /// Chirality `i^m γ_0 ⋯ γ_{2m-1}`.
    pub tau: CMat,
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

fn pauli() -> (CMat, CMat, CMat) {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    (
        CMat::from_row_slice(2, 2, &[o, one, one, o]),
        CMat::from_row_slice(2, 2, &[o, -i, i, o]),
        CMat::from_row_slice(2, 2, &[one, o, o, -one]),
    )
}

/// Hermitian generators with `γ_i γ_j + γ_j γ_i = 2 δ_ij`.
pub fn build_gammas(m: usize) -> Result<GammaRep> {
    if !(1..=4).contains(&m) {
        return Err(Error::OutOfRange(format!("spin representation needs 1 <= m <= 4, got {m}")));
    }
    let (sx, sy, sz) = pauli();
    let id2 = CMat::identity(2, 2);
    let mut gammas = Vec::with_capacity(2 * m);
    for k in 0..m {
        for s in [&sx, &sy] {
            let mut g = CMat::identity(1, 1);
            for slot in 0..m {
                let f = match slot.cmp(&k) {
                    std::cmp::Ordering::Less => &sz,
                    std::cmp::Ordering::Equal => s,
                    std::cmp::Ordering::Greater => &id2,
                };
                g = kron(&g, f);
            }
            gammas.push(g);
        }
    }
    let dim = 1 << m;
    let mut tau = CMat::identity(dim, dim);
    for g in &gammas {
        tau *= g;
    }
    let phase = match m % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    };
    tau *= phase;
    Ok(GammaRep { m, gammas, tau })
}

impl GammaRep {
    pub fn spinor_dim(&self) -> usize {
        1 << self.m
    }

    /// Clifford multiplication `γ(v) = Σ v_i γ_i`.
    pub fn gamma_of(&self, v: &[f64]) -> CMat {
        let d = self.spinor_dim();
        let mut out = CMat::zeros(d, d);
        for (g, &x) in self.gammas.iter().zip(v) {
            out += g * C64::new(x, 0.0);
        }
        out
    }
}

/// `∏_j (cos(θ_j/2) + sin(θ_j/2) γ_{2j+1} γ_{2j})`, which satisfies
/// `k_S γ(v) k_S^{-1} = γ(k v)` for the block rotation `k` by the same angles.
pub fn spin_lift(rep: &GammaRep, angles: &[f64]) -> Result<CMat> {
    if angles.len() != rep.m {
        return Err(Error::DimensionMismatch { expected: rep.m, got: angles.len() });
    }
    let d = rep.spinor_dim();
    let id = CMat::identity(d, d);
    let mut k = id.clone();
    for (j, &t) in angles.iter().enumerate() {
        let (s, c) = (t / 2.0).sin_cos();
        let plane = &rep.gammas[2 * j + 1] * &rep.gammas[2 * j];
        k *= &id * C64::new(c, 0.0) + plane * C64::new(s, 0.0);
    }
    Ok(k)
}

/// `μ^{(1−2m)/2} k_S`.
pub fn a_spinor(rep: &GammaRep, d: &ConformalDatum) -> Result<CMat> {
    if !(d.mu > 0.0) {
        return Err(Error::OutOfRange(format!("mu must be positive, got {}", d.mu)));
    }
    let scale = d.mu.powf((1.0 - 2.0 * rep.m as f64) / 2.0);
    Ok(spin_lift(rep, &d.angles)? * C64::new(scale, 0.0))
}

/// `Tr(τ_S A_S) · ⟨π₂*dvol, dV_W⟩ / det^{1/2}(2Π*Π)` on the trace graph of `μk`.
pub fn spin_density_oracle(d: &ConformalDatum) -> Result<C64> {
    let m = d.m();
    let rep = build_gammas(m)?;
    let a = a_spinor(&rep, d)?;
    let tr = (&rep.tau * a).trace();
    let n = 2 * m;
    let vol2 = ProductSplit::new(n).second(&ExteriorElement::volume(n));
    Ok(tr * density(&vol2, &trace_graph(&d.matrix()))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: &CMat, b: &CMat, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn clifford_relations() {
        for m in 1..=3 {
            let rep = build_gammas(m).unwrap();
            let d = rep.spinor_dim();
            let id = CMat::identity(d, d);
            for i in 0..2 * m {
                for j in 0..2 * m {
                    let ac = &rep.gammas[i] * &rep.gammas[j] + &rep.gammas[j] * &rep.gammas[i];
                    let want = if i == j { &id * C64::new(2.0, 0.0) } else { CMat::zeros(d, d) };
                    assert!(close(&ac, &want, 1e-14));
                }
                assert!(close(&rep.gammas[i], &rep.gammas[i].adjoint(), 0.0));
            }
            assert!(close(&(&rep.tau * &rep.tau), &id, 1e-14));
            assert!(rep.tau.trace().norm() < 1e-14);
        }
        assert!(build_gammas(0).is_err());
        assert!(build_gammas(5).is_err());
    }

    #[test]
    fn lift_endpoints() {
        let rep = build_gammas(2).unwrap();
        let id = CMat::identity(4, 4);
        assert!(close(&spin_lift(&rep, &[0.0, 0.0]).unwrap(), &id, 0.0));
        assert!(close(&spin_lift(&rep, &[2.0 * PI, 0.0]).unwrap(), &-id, 1e-15));
    }

    #[test]
    fn a_spinor_prefactor() {
        let rep = build_gammas(1).unwrap();
        let d = ConformalDatum::new(4.0, vec![0.7]).unwrap();
        let a = a_spinor(&rep, &d).unwrap();
        let k = spin_lift(&rep, &[0.7]).unwrap();
        assert!(close(&a, &(k * C64::new(0.5, 0.0)), 1e-15));
    }

    #[test]
    fn oracle_matches_closed_form_at_pi() {
        let d = ConformalDatum::new(1.0, vec![PI]).unwrap();
        let o = spin_density_oracle(&d).unwrap();
        assert!((o - C64::new(0.0, 0.5)).norm() < 1e-14);
    }
}
