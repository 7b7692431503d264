//! Deterministic lattice sums: points are grouped into shells of equal norm,
//! each shell is summed with compensation (in parallel across shells), and
//! shell totals are reduced sequentially in increasing norm.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::exterior::C64;

/// Neumaier compensated accumulator for complex values.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: C64,
    comp: C64,
}

fn two_sum(acc: &mut f64, comp: &mut f64, x: f64) {
    let t = *acc + x;
    if acc.abs() >= x.abs() {
        *comp += (*acc - t) + x;
    } else {
        *comp += (x - t) + *acc;
    }
    *acc = t;
}

impl Neumaier {
    pub fn add(&mut self, x: C64) {
        two_sum(&mut self.sum.re, &mut self.comp.re, x.re);
        two_sum(&mut self.sum.im, &mut self.comp.im, x.im);
    }

    pub fn value(&self) -> C64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Shell {
    pub norm_sq: f64,
    pub points: Vec<Vec<i64>>,
}

/// Integer coordinate vectors `c` with `cᵀ G c ≤ radius²`, grouped into
/// shells sorted by norm, points within a shell in lexicographic order.
pub fn shells(gram: &DMatrix<f64>, radius: f64, include_origin: bool) -> Vec<Shell> {
    let d = gram.nrows();
    if d == 0 {
        return if include_origin { vec![Shell { norm_sq: 0.0, points: vec![vec![]] }] } else { vec![] };
    }
    let inv = gram.clone().try_inverse().expect("Gram matrix must be invertible");
    let r2 = radius * radius;
    let bounds: Vec<i64> = (0..d).map(|i| (radius * inv[(i, i)].max(0.0).sqrt()).floor() as i64).collect();
    let mut pts: Vec<(f64, Vec<i64>)> = Vec::new();
    let mut c: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        let mut q = 0.0;
        for i in 0..d {
            for j in 0..d {
                q += c[i] as f64 * gram[(i, j)] * c[j] as f64;
            }
        }
        let origin = c.iter().all(|&x| x == 0);
        if q <= r2 * (1.0 + 1e-12) && (include_origin || !origin) {
            pts.push((q, c.clone()));
        }
        let mut k = 0;
        loop {
            if k == d {
                return group(pts);
            }
            c[k] += 1;
            if c[k] <= bounds[k] {
                break;
            }
            c[k] = -bounds[k];
            k += 1;
        }
    }
}

fn group(mut pts: Vec<(f64, Vec<i64>)>) -> Vec<Shell> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let mut out: Vec<Shell> = Vec::new();
    for (q, p) in pts {
        match out.last_mut() {
            Some(s) if (q - s.norm_sq).abs() <= 1e-12 * q.max(1.0) => s.points.push(p),
            _ => out.push(Shell { norm_sq: q, points: vec![p] }),
        }
    }
    out
}

/// `Σ f(c)` over all shell points with the deterministic reduction order.
pub fn shell_sum<F>(shells: &[Shell], f: F) -> C64
where
    F: Fn(&[i64], f64) -> C64 + Sync,
{
    let totals: Vec<C64> = shells
        .par_iter()
        .map(|s| {
            let mut acc = Neumaier::default();
            for p in &s.points {
                acc.add(f(p, s.norm_sq));
            }
            acc.value()
        })
        .collect();
    let mut acc = Neumaier::default();
    for t in totals {
        acc.add(t);
    }
    acc.value()
}
