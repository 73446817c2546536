//! Recovery of the linear operator `A` on `V` from a reduced graph.
//!
//! The reduced graph of a bimonotone operator translated through one of its
//! points is single-valued and linear on `V`. Writing any `x ∈ V` as a
//! combination of `k` sampled domain points `d_1..d_k`, `Ax` is the same
//! combination of their images. In matrix form, with `M = [d_1 … d_k]` and
//! `N = [T̂(d_1) … T̂(d_k)]`, this is `Â = N M⁻¹`. Every other sampled point
//! must then satisfy `Âx̂ = x̂*`, and `Â` must come out antisymmetric.

use nalgebra::{DMatrix, DVector};

use super::{DecomposeError, ReducedGraph};
use crate::tolerance::ToleranceConfig;

/// `max |Â + Âᵀ|`.
pub fn skewness_defect(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    (a + a.transpose()).amax()
}

/// Choose `k` reduced domain points forming a well-conditioned basis of `R^k`
/// by column-pivoted Gram-Schmidt: at each step take the point with the
/// largest component orthogonal to those already taken (lowest index on
/// ties).
pub fn select_pivots(rg: &ReducedGraph) -> Result<Vec<usize>, DecomposeError> {
    let k = rg.dimension();
    let m = rg.len();
    let mut residual: Vec<DVector<f64>> = rg.points().iter().map(|p| p.x.clone()).collect();
    let scale = residual.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let cutoff = k.max(m) as f64 * f64::EPSILON * scale;
    let mut pivots = Vec::with_capacity(k);
    for step in 0..k {
        let (best, norm) = residual
            .iter()
            .enumerate()
            .filter(|(i, _)| !pivots.contains(i))
            .map(|(i, r)| (i, r.norm()))
            .fold((usize::MAX, -1.0), |acc, (i, n)| if n > acc.1 { (i, n) } else { acc });
        if best == usize::MAX || norm <= cutoff {
            return Err(DecomposeError::RankDeficient {
                rank: step,
                expected: k,
            });
        }
        pivots.push(best);
        let dir = &residual[best] / norm;
        for r in residual.iter_mut() {
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                let c = dir.dot(r);
                r.axpy(-c, &dir, 1.0);
            }
        }
    }
    Ok(pivots)
}

/// Build `Â` from the reduced graph using the automatically chosen pivots.
///
/// The returned matrix is not symmetrized; see [`skewness_defect`].
pub fn build_skew_operator(rg: &ReducedGraph, tol: &ToleranceConfig) -> Result<DMatrix<f64>, DecomposeError> {
    let pivots = select_pivots(rg)?;
    build_skew_operator_with_pivots(rg, &pivots, tol)
}

/// Build `Â` expanding over the given `k` reduced points.
pub fn build_skew_operator_with_pivots(
    rg: &ReducedGraph,
    pivots: &[usize],
    tol: &ToleranceConfig,
) -> Result<DMatrix<f64>, DecomposeError> {
    let k = rg.dimension();
    if !rg.contains_origin(tol) {
        return Err(DecomposeError::MissingOrigin);
    }
    if pivots.len() != k || pivots.iter().any(|&i| i >= rg.len()) {
        return Err(DecomposeError::RankDeficient {
            rank: pivots.len(),
            expected: k,
        });
    }
    if k == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let pts = rg.points();
    let m = DMatrix::from_columns(&pivots.iter().map(|&i| pts[i].x.clone()).collect::<Vec<_>>());
    let n = DMatrix::from_columns(&pivots.iter().map(|&i| pts[i].xstar.clone()).collect::<Vec<_>>());
    // Â M = N  <=>  Mᵀ Âᵀ = Nᵀ
    let a_t = m
        .transpose()
        .lu()
        .solve(&n.transpose())
        .ok_or(DecomposeError::RankDeficient {
            rank: k - 1,
            expected: k,
        })?;
    let a = a_t.transpose();

    let mut worst: Option<(usize, f64, f64)> = None;
    for (index, p) in pts.iter().enumerate() {
        let predicted = &a * &p.x;
        let residual = (&p.xstar - &predicted).norm();
        let ratio = residual / tol.vector_threshold(p.xstar.norm(), predicted.norm());
        if ratio > 1.0 && worst.is_none_or(|(_, _, r)| ratio > r) {
            worst = Some((index, residual, ratio));
        }
    }
    if let Some((index, residual, _)) = worst {
        return Err(DecomposeError::Inconsistent { index, residual });
    }
    let defect = skewness_defect(&a);
    if defect > tol.scalar_threshold(a.amax()) {
        return Err(DecomposeError::NotSkew { defect });
    }
    Ok(a)
}
