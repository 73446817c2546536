use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_ABS_TOL: f64 = 1e-9;
pub const DEFAULT_REL_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ToleranceError {
    #[error("tolerance `{name}` must be a finite nonnegative number, got {value}")]
    Invalid { name: &'static str, value: f64 },
    #[error("abs_tol and rel_tol cannot both be zero")]
    BothZero,
}

/// Absolute/relative thresholds used by every approximate comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    abs_tol: f64,
    rel_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: DEFAULT_ABS_TOL,
            rel_tol: DEFAULT_REL_TOL,
        }
    }
}

impl ToleranceConfig {
    pub fn new(abs_tol: f64, rel_tol: f64) -> Result<Self, ToleranceError> {
        for (name, value) in [("abs_tol", abs_tol), ("rel_tol", rel_tol)] {
            if !value.is_finite() || value < 0.0 {
                return Err(ToleranceError::Invalid { name, value });
            }
        }
        if abs_tol == 0.0 && rel_tol == 0.0 {
            return Err(ToleranceError::BothZero);
        }
        Ok(Self { abs_tol, rel_tol })
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    /// Threshold for a scalar test whose natural magnitude is `scale`.
    /// The scale is floored at 1 so tiny operands fall back to `abs + rel`.
    pub fn scalar_threshold(&self, scale: f64) -> f64 {
        self.abs_tol + self.rel_tol * scale.max(1.0)
    }

    /// Residual expressed in threshold units: `<= 1` passes.
    pub fn normalized(&self, residual: f64, scale: f64) -> f64 {
        residual / self.scalar_threshold(scale)
    }

    /// Threshold for comparing two vectors `a`, `b`:
    /// `abs_tol + rel_tol * max(|a|, |b|)`.
    pub fn vector_threshold(&self, norm_a: f64, norm_b: f64) -> f64 {
        self.abs_tol + self.rel_tol * norm_a.max(norm_b)
    }

    /// Distance between `a` and `b` in vector-threshold units.
    pub fn vector_distance(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        (a - b).norm() / self.vector_threshold(a.norm(), b.norm())
    }

    pub fn vectors_close(&self, a: &DVector<f64>, b: &DVector<f64>) -> bool {
        (a - b).norm() <= self.vector_threshold(a.norm(), b.norm())
    }
}
