//! Finite samples of multivalued operators `T: Rⁿ ⇉ Rⁿ`.
//!
//! A graph is stored extensionally as a list of `(x, x*)` pairs. A point `x`
//! carrying several images simply appears several times. The dual space is
//! identified with `Rⁿ` through the Euclidean inner product.

use nalgebra::DVector;
use thiserror::Error;

use crate::tolerance::ToleranceConfig;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("graph dimension must be positive")]
    ZeroDimension,
    #[error("graph must contain at least one point")]
    Empty,
    #[error("point {index}: `{field}` has {found} entries, expected {expected}")]
    DimensionMismatch {
        index: usize,
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("point {index}: `{field}` contains a non-finite entry")]
    NonFinite { index: usize, field: &'static str },
    #[error("argument `{name}` has {found} entries, expected {expected}")]
    ArgumentDimension {
        name: &'static str,
        expected: usize,
        found: usize,
    },
}

/// One element `(x, x*)` of the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphPoint {
    pub x: DVector<f64>,
    pub xstar: DVector<f64>,
}

impl GraphPoint {
    pub fn new(x: DVector<f64>, xstar: DVector<f64>) -> Self {
        Self { x, xstar }
    }

    pub fn from_slices(x: &[f64], xstar: &[f64]) -> Self {
        Self::new(DVector::from_column_slice(x), DVector::from_column_slice(xstar))
    }

    /// Pairing `<x* - y*, x - y>`.
    pub fn pairing(&self, other: &GraphPoint) -> f64 {
        (&self.xstar - &other.xstar).dot(&(&self.x - &other.x))
    }
}

/// Validated finite sample of an operator graph.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorGraph {
    dimension: usize,
    points: Vec<GraphPoint>,
}

impl OperatorGraph {
    pub fn new(dimension: usize, points: Vec<GraphPoint>) -> Result<Self, GraphError> {
        if dimension == 0 {
            return Err(GraphError::ZeroDimension);
        }
        if points.is_empty() {
            return Err(GraphError::Empty);
        }
        for (index, p) in points.iter().enumerate() {
            for (field, v) in [("x", &p.x), ("xstar", &p.xstar)] {
                if v.len() != dimension {
                    return Err(GraphError::DimensionMismatch {
                        index,
                        field,
                        expected: dimension,
                        found: v.len(),
                    });
                }
                if v.iter().any(|e| !e.is_finite()) {
                    return Err(GraphError::NonFinite { index, field });
                }
            }
        }
        Ok(Self { dimension, points })
    }

    /// Build a graph by sampling a single-valued map at the given points.
    pub fn from_map<F>(dimension: usize, xs: &[DVector<f64>], f: F) -> Result<Self, GraphError>
    where
        F: Fn(&DVector<f64>) -> DVector<f64>,
    {
        let points = xs.iter().map(|x| GraphPoint::new(x.clone(), f(x))).collect();
        Self::new(dimension, points)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points(&self) -> &[GraphPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<GraphPoint> {
        self.points
    }

    /// Distinct primal points, first appearance wins.
    pub fn domain(&self, tol: &ToleranceConfig) -> Vec<DVector<f64>> {
        dedup(self.points.iter().map(|p| &p.x), tol)
    }

    /// Distinct dual points, first appearance wins.
    pub fn range(&self, tol: &ToleranceConfig) -> Vec<DVector<f64>> {
        dedup(self.points.iter().map(|p| &p.xstar), tol)
    }

    /// Graph of `T⁻¹`: every `(x, x*)` becomes `(x*, x)`.
    pub fn inverse(&self) -> OperatorGraph {
        let points = self
            .points
            .iter()
            .map(|p| GraphPoint::new(p.xstar.clone(), p.x.clone()))
            .collect();
        OperatorGraph {
            dimension: self.dimension,
            points,
        }
    }

    /// Graph of `x ↦ T(x + u) - u*`, i.e. every `(x, x*)` becomes `(x - u, x* - u*)`.
    pub fn translate(&self, u: &DVector<f64>, ustar: &DVector<f64>) -> Result<OperatorGraph, GraphError> {
        for (name, v) in [("u", u), ("ustar", ustar)] {
            if v.len() != self.dimension {
                return Err(GraphError::ArgumentDimension {
                    name,
                    expected: self.dimension,
                    found: v.len(),
                });
            }
        }
        let points = self
            .points
            .iter()
            .map(|p| GraphPoint::new(&p.x - u, &p.xstar - ustar))
            .collect();
        Ok(OperatorGraph {
            dimension: self.dimension,
            points,
        })
    }

    /// True if some stored pair matches `(x, xstar)` in both components.
    pub fn contains(&self, x: &DVector<f64>, xstar: &DVector<f64>, tol: &ToleranceConfig) -> bool {
        self.points
            .iter()
            .any(|p| tol.vectors_close(&p.x, x) && tol.vectors_close(&p.xstar, xstar))
    }
}

fn dedup<'a>(vectors: impl Iterator<Item = &'a DVector<f64>>, tol: &ToleranceConfig) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        if !out.iter().any(|w| tol.vectors_close(v, w)) {
            out.push(v.clone());
        }
    }
    out
}

/// Free-function form of [`OperatorGraph::inverse`].
pub fn inverse_graph(g: &OperatorGraph) -> OperatorGraph {
    g.inverse()
}
