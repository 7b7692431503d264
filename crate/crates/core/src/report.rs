//! Uniform comparison record for every identity check.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::exterior::C64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub test: String,
    #[serde(deserialize_with = "nullable")]
    pub lhs_re: f64,
    #[serde(deserialize_with = "nullable")]
    pub lhs_im: f64,
    #[serde(deserialize_with = "nullable")]
    pub rhs_re: f64,
    #[serde(deserialize_with = "nullable")]
    pub rhs_im: f64,
    #[serde(deserialize_with = "nullable")]
    pub abs_err: f64,
    #[serde(deserialize_with = "nullable")]
    pub rel_err: f64,
    #[serde(deserialize_with = "nullable")]
    pub tol: f64,
    pub pass: bool,
    pub params: BTreeMap<String, String>,
    #[serde(deserialize_with = "nullable")]
    pub seconds: f64,
}

/// Writers emit non-finite numbers as `null`; read them back as NaN.
fn nullable<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

impl VerificationReport {
    /// Compares `lhs` against `rhs`; passes when the absolute error is within `tol`.
    pub fn compare(test: impl Into<String>, lhs: C64, rhs: C64, tol: f64) -> Self {
        let abs_err = (lhs - rhs).norm();
        let rel_err = if rhs.norm() > 0.0 { abs_err / rhs.norm() } else { abs_err };
        Self {
            test: test.into(),
            lhs_re: lhs.re,
            lhs_im: lhs.im,
            rhs_re: rhs.re,
            rhs_im: rhs.im,
            abs_err,
            rel_err,
            tol,
            pass: abs_err <= tol,
            params: BTreeMap::new(),
            seconds: 0.0,
        }
    }

    /// Same as [`compare`](Self::compare) but judged on the relative error.
    pub fn compare_relative(test: impl Into<String>, lhs: C64, rhs: C64, tol: f64) -> Self {
        let mut r = Self::compare(test, lhs, rhs, tol);
        r.pass = r.rel_err <= tol;
        r
    }

    pub fn real(test: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::compare(test, C64::new(lhs, 0.0), C64::new(rhs, 0.0), tol)
    }

    /// A failed check that could not be evaluated.
    pub fn failure(test: impl Into<String>, reason: impl std::fmt::Display) -> Self {
        let mut r = Self::compare(test, C64::new(f64::NAN, 0.0), C64::new(f64::NAN, 0.0), 0.0);
        r.pass = false;
        r.params.insert("error".into(), reason.to_string());
        r
    }

    pub fn with_param(mut self, key: impl Into<String>, value: impl std::fmt::Display) -> Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    pub fn lhs(&self) -> C64 {
        C64::new(self.lhs_re, self.lhs_im)
    }

    pub fn rhs(&self) -> C64 {
        C64::new(self.rhs_re, self.rhs_im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_within_tolerance() {
        assert!(VerificationReport::real("a", 1.0, 1.0 + 1e-10, 1e-9).pass);
        assert!(!VerificationReport::real("a", 1.0, 1.1, 1e-9).pass);
        assert!(!VerificationReport::failure("x", "boom").pass);
    }
}
