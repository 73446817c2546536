//! Constructive skew-symmetric representation of a bimonotone graph.
//!
//! Pipeline: translate by a basepoint `(u, u*)` so that `(0, 0)` is in the
//! graph, take an orthonormal basis `Q` of the span `V` of the translated
//! domain, restrict everything to `V` through `Qᵀ`, check that the restricted
//! graph is single-valued, and recover the linear map on `V` in `Q`
//! coordinates. The affine offset is `v̂* = Qᵀu* - ÂQᵀu`, so that on the
//! original graph `Qᵀx* = ÂQᵀx + v̂*`.
//!
//! Only the restriction of `x*` to `V` is determined by the graph; the
//! component of `x*` orthogonal to `V` is arbitrary, so all residuals are
//! measured after projecting by `Qᵀ`.

mod basis;
mod skew;

pub use basis::{orthonormality_defect, span_basis, OrthonormalBasis, ORTHONORMALITY_TOL};
pub use skew::{build_skew_operator, build_skew_operator_with_pivots, select_pivots, skewness_defect};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{bimonotone_check, ClassificationReport, Worst};
use crate::graph::{GraphPoint, OperatorGraph};
use crate::io::GraphPointDoc;
use crate::rng::random_orthogonal;
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Error)]
pub enum DecomposeError {
    #[error("graph is not bimonotone at tolerance (worst violation {:e})", .0.worst_violation)]
    NotBimonotone(ClassificationReport),
    #[error("reduced graph is not single-valued (worst violation {:e}); tolerance inconsistency", .0.worst_violation)]
    NotSingleValued(ClassificationReport),
    #[error("point {index} lies outside the span (residual {residual:e})")]
    OutOfSpan { index: usize, residual: f64 },
    #[error("reduced domain has rank {rank}, basis has {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("not bimonotone at tolerance: point {index} misses the linear fit by {residual:e}")]
    Inconsistent { index: usize, residual: f64 },
    #[error("recovered operator is not skew-symmetric (max |A + Aᵀ| = {defect:e})")]
    NotSkew { defect: f64 },
    #[error("reduced graph does not contain (0, 0)")]
    MissingOrigin,
    #[error("basepoint index {index} out of range for {len} points")]
    BasepointOutOfRange { index: usize, len: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("invalid decomposition: {0}")]
    Invalid(String),
}

/// Graph expressed in coordinates of an orthonormal basis of `V`.
/// Point order follows the source graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedGraph {
    dimension: usize,
    points: Vec<GraphPoint>,
}

impl ReducedGraph {
    pub fn new(dimension: usize, points: Vec<GraphPoint>) -> Result<Self, DecomposeError> {
        for p in &points {
            for v in [&p.x, &p.xstar] {
                if v.len() != dimension {
                    return Err(DecomposeError::DimensionMismatch {
                        expected: dimension,
                        found: v.len(),
                    });
                }
            }
        }
        Ok(Self { dimension, points })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points(&self) -> &[GraphPoint] {
        &self.points
    }

    pub fn points_mut(&mut self) -> &mut [GraphPoint] {
        &mut self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains_origin(&self, tol: &ToleranceConfig) -> bool {
        let zero = DVector::zeros(self.dimension);
        self.points
            .iter()
            .any(|p| tol.vectors_close(&p.x, &zero) && tol.vectors_close(&p.xstar, &zero))
    }
}

/// Restrict `g` to `span(basis)`: `x̂ = Qᵀx`, `x̂* = Qᵀx*`.
pub fn reduce(
    g: &OperatorGraph,
    basis: &OrthonormalBasis,
    tol: &ToleranceConfig,
) -> Result<ReducedGraph, DecomposeError> {
    if basis.dimension() != g.dimension() {
        return Err(DecomposeError::DimensionMismatch {
            expected: g.dimension(),
            found: basis.dimension(),
        });
    }
    let mut points = Vec::with_capacity(g.len());
    for (index, p) in g.points().iter().enumerate() {
        let residual = basis.out_of_span(&p.x);
        if residual > tol.vector_threshold(p.x.norm(), 0.0) {
            return Err(DecomposeError::OutOfSpan { index, residual });
        }
        points.push(GraphPoint::new(basis.coords(&p.x), basis.coords(&p.xstar)));
    }
    ReducedGraph::new(basis.rank(), points)
}

/// Points sharing a reduced primal coordinate must share the reduced dual.
pub fn single_valued_check(rg: &ReducedGraph, tol: &ToleranceConfig) -> ClassificationReport {
    let pts = rg.points();
    let mut worst = Worst::default();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if tol.vectors_close(&pts[i].x, &pts[j].x) {
                worst.offer(tol.vector_distance(&pts[i].xstar, &pts[j].xstar), i, j);
            }
        }
    }
    ClassificationReport {
        verdict: worst.value <= 1.0,
        worst_violation: worst.value,
        witness: worst.witness,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecomposeOptions {
    /// Index of the graph point used as `(u, u*)`. Defaults to the first point.
    pub basepoint: Option<usize>,
    /// When set, the span basis is multiplied by a seeded random orthogonal
    /// matrix. The recovered `Â` changes by the matching conjugation.
    pub basis_seed: Option<u64>,
}

/// Skew-symmetric representation `Qᵀx* = ÂQᵀx + v̂*` of a bimonotone graph.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewDecomposition {
    pub basis: OrthonormalBasis,
    /// Antisymmetric part of the recovered operator.
    pub a_hat: DMatrix<f64>,
    pub v_hat: DVector<f64>,
    pub basepoint: GraphPoint,
    pub max_residual: f64,
    /// `max |Â + Âᵀ|` of the operator before its antisymmetric part was taken.
    pub skewness_defect: f64,
}

impl SkewDecomposition {
    pub fn rank(&self) -> usize {
        self.basis.rank()
    }

    /// `ÂQᵀx + v̂*`.
    pub fn predict_reduced(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a_hat * self.basis.coords(x) + &self.v_hat
    }

    /// Ambient-space operator `QÂQᵀ` and offset `Qv̂*`. When `V = Rⁿ`
    /// these give `T(x) = Ax + v*` on the whole domain.
    pub fn ambient(&self) -> (DMatrix<f64>, DVector<f64>) {
        let q = self.basis.matrix();
        (q * &self.a_hat * q.transpose(), q * &self.v_hat)
    }
}

pub fn decompose(
    g: &OperatorGraph,
    options: DecomposeOptions,
    tol: &ToleranceConfig,
) -> Result<SkewDecomposition, DecomposeError> {
    let report = bimonotone_check(g, tol);
    if !report.verdict {
        return Err(DecomposeError::NotBimonotone(report));
    }
    let index = options.basepoint.unwrap_or(0);
    let base = g
        .points()
        .get(index)
        .ok_or(DecomposeError::BasepointOutOfRange { index, len: g.len() })?
        .clone();
    let shifted = g
        .translate(&base.x, &base.xstar)
        .expect("basepoint has the graph dimension");

    let mut basis = span_basis(g.dimension(), &shifted.domain(tol))?;
    if let Some(seed) = options.basis_seed {
        let r = random_orthogonal(basis.rank(), &mut ChaCha8Rng::seed_from_u64(seed));
        basis = basis.rotated(&r)?;
    }
    let rg = reduce(&shifted, &basis, tol)?;
    let sv = single_valued_check(&rg, tol);
    if !sv.verdict {
        return Err(DecomposeError::NotSingleValued(sv));
    }
    let raw = build_skew_operator(&rg, tol)?;
    let defect = skewness_defect(&raw);
    let a_hat = (&raw - raw.transpose()) * 0.5;
    let v_hat = basis.coords(&base.xstar) - &a_hat * basis.coords(&base.x);

    let mut dec = SkewDecomposition {
        basis,
        a_hat,
        v_hat,
        basepoint: base,
        max_residual: 0.0,
        skewness_defect: defect,
    };
    dec.max_residual = residuals(&dec, g).fold(0.0, |acc, (r, _)| acc.max(r));
    Ok(dec)
}

/// Per-point reconstruction residuals of a decomposition against a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub verdict: bool,
    pub max_residual: f64,
    pub worst_point: Option<usize>,
    pub residuals: Vec<f64>,
}

fn residuals<'a>(dec: &'a SkewDecomposition, g: &'a OperatorGraph) -> impl Iterator<Item = (f64, f64)> + 'a {
    g.points().iter().map(move |p| {
        let observed = dec.basis.coords(&p.xstar);
        let predicted = dec.predict_reduced(&p.x);
        let scale = observed.norm().max(predicted.norm());
        ((observed - predicted).norm(), scale)
    })
}

/// `|Qᵀx* - (ÂQᵀx + v̂*)|` for every point; passes iff each residual is within
/// `abs_tol + rel_tol · max(|Qᵀx*|, |ÂQᵀx + v̂*|)`.
pub fn verify_reconstruction(
    dec: &SkewDecomposition,
    g: &OperatorGraph,
    tol: &ToleranceConfig,
) -> Result<ResidualReport, DecomposeError> {
    if dec.basis.dimension() != g.dimension() {
        return Err(DecomposeError::DimensionMismatch {
            expected: dec.basis.dimension(),
            found: g.dimension(),
        });
    }
    let mut verdict = true;
    let mut max_residual = 0.0;
    let mut worst_point = None;
    let mut all = Vec::with_capacity(g.len());
    for (i, (r, scale)) in residuals(dec, g).enumerate() {
        if r > tol.vector_threshold(scale, 0.0) {
            verdict = false;
        }
        if r > max_residual {
            max_residual = r;
            worst_point = Some(i);
        }
        all.push(r);
    }
    Ok(ResidualReport {
        verdict,
        max_residual,
        worst_point,
        residuals: all,
    })
}

/// JSON form of [`SkewDecomposition`]. Matrices are row-major; the basis is
/// stored as `n` rows of `k` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkewDecompositionDoc {
    pub basis: Vec<Vec<f64>>,
    pub a_hat: Vec<Vec<f64>>,
    pub v_hat: Vec<f64>,
    pub basepoint: GraphPointDoc,
    pub max_residual: f64,
    pub skewness_defect: f64,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl From<&SkewDecomposition> for SkewDecompositionDoc {
    fn from(d: &SkewDecomposition) -> Self {
        Self {
            basis: rows(d.basis.matrix()),
            a_hat: rows(&d.a_hat),
            v_hat: d.v_hat.as_slice().to_vec(),
            basepoint: GraphPointDoc::from(&d.basepoint),
            max_residual: d.max_residual,
            skewness_defect: d.skewness_defect,
        }
    }
}

impl TryFrom<&SkewDecompositionDoc> for SkewDecomposition {
    type Error = DecomposeError;

    fn try_from(doc: &SkewDecompositionDoc) -> Result<Self, Self::Error> {
        let n = doc.basis.len();
        let k = doc.basis.first().map_or(0, Vec::len);
        if n == 0 || doc.basis.iter().any(|r| r.len() != k) {
            return Err(DecomposeError::Invalid(
                "basis needs at least one row and rows of equal length".into(),
            ));
        }
        if doc.a_hat.len() != k || doc.a_hat.iter().any(|r| r.len() != k) || doc.v_hat.len() != k {
            return Err(DecomposeError::Invalid(format!(
                "a_hat must be {k}x{k} and v_hat of length {k}"
            )));
        }
        if doc.basepoint.x.len() != n || doc.basepoint.xstar.len() != n {
            return Err(DecomposeError::Invalid(format!("basepoint must have dimension {n}")));
        }
        let basis = OrthonormalBasis::new(DMatrix::from_row_iterator(n, k, doc.basis.iter().flatten().copied()))?;
        Ok(Self {
            basis,
            a_hat: DMatrix::from_row_iterator(k, k, doc.a_hat.iter().flatten().copied()),
            v_hat: DVector::from_column_slice(&doc.v_hat),
            basepoint: GraphPoint::from(&doc.basepoint),
            max_residual: doc.max_residual,
            skewness_defect: doc.skewness_defect,
        })
    }
}
