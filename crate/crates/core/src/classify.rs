//! Membership tests for the monotone, bimonotone, paramonotone and
//! constant-on-domain classes.
//!
//! Every check scans point pairs `i < j` and records the largest
//! tolerance-normalized violation: a value `<= 1` is within tolerance. The
//! witness is the first pair (lexicographic order) attaining the maximum, so
//! reports are deterministic and their verdict and magnitude do not depend on
//! the order of the points.
//!
//! Paramonotonicity is certified for the sampled graph only; nothing is
//! claimed about pairs that were never sampled.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::OperatorGraph;
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub verdict: bool,
    pub worst_violation: f64,
    pub witness: Option<(usize, usize)>,
}

impl ClassificationReport {
    fn from_worst(worst: Worst) -> Self {
        Self {
            verdict: worst.value <= 1.0,
            worst_violation: worst.value,
            witness: worst.witness,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ClassifyError {
    #[error("graph does not contain (0, 0); translate it by one of its points first")]
    MissingOrigin,
}

/// Outcome of the paramonotonicity test. The property is only defined for
/// monotone operators, so a non-monotone graph gets its own outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Paramonotonicity {
    Checked(ClassificationReport),
    NotMonotone { monotone: ClassificationReport },
}

impl Paramonotonicity {
    /// True only for a monotone graph that passed the test.
    pub fn is_paramonotone(&self) -> bool {
        matches!(self, Paramonotonicity::Checked(r) if r.verdict)
    }

    pub fn report(&self) -> Option<&ClassificationReport> {
        match self {
            Paramonotonicity::Checked(r) => Some(r),
            Paramonotonicity::NotMonotone { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Worst {
    pub value: f64,
    pub witness: Option<(usize, usize)>,
}

impl Worst {
    pub fn offer(&mut self, value: f64, i: usize, j: usize) {
        if value > self.value {
            self.value = value;
            self.witness = Some((i, j));
        }
    }
}

fn scan_pairs<F>(g: &OperatorGraph, mut violation: F) -> Worst
where
    F: FnMut(usize, usize) -> f64,
{
    let mut worst = Worst::default();
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            worst.offer(violation(i, j), i, j);
        }
    }
    worst
}

/// Pairing `<x* - y*, x - y>` and the product of the two difference norms.
fn pairing_and_scale(g: &OperatorGraph, i: usize, j: usize) -> (f64, f64) {
    let (p, q) = (&g.points()[i], &g.points()[j]);
    let dx = &p.x - &q.x;
    let dxs = &p.xstar - &q.xstar;
    (dxs.dot(&dx), dxs.norm() * dx.norm())
}

/// `<x* - y*, x - y> >= 0` for every pair, within tolerance.
pub fn monotone_check(g: &OperatorGraph, tol: &ToleranceConfig) -> ClassificationReport {
    ClassificationReport::from_worst(scan_pairs(g, |i, j| {
        let (p, scale) = pairing_and_scale(g, i, j);
        tol.normalized((-p).max(0.0), scale)
    }))
}

/// `<x* - y*, x - y> = 0` for every pair, within tolerance.
pub fn bimonotone_check(g: &OperatorGraph, tol: &ToleranceConfig) -> ClassificationReport {
    ClassificationReport::from_worst(scan_pairs(g, |i, j| {
        let (p, scale) = pairing_and_scale(g, i, j);
        tol.normalized(p.abs(), scale)
    }))
}

/// Whenever a pair has vanishing pairing, both crossed pairs `(x, y*)` and
/// `(y, x*)` must be in the sampled graph.
///
/// A missing crossed pair `(x_i, x*_j)` is scored by the distance from `x*_j`
/// to the nearest dual stored at `x_i`, in vector-tolerance units.
pub fn paramonotone_check(g: &OperatorGraph, tol: &ToleranceConfig) -> Paramonotonicity {
    let monotone = monotone_check(g, tol);
    if !monotone.verdict {
        return Paramonotonicity::NotMonotone { monotone };
    }
    let pts = g.points();
    // Indices of stored pairs sharing each primal point.
    let fibres: Vec<Vec<usize>> = pts
        .iter()
        .map(|p| {
            pts.iter()
                .enumerate()
                .filter(|(_, q)| tol.vectors_close(&p.x, &q.x))
                .map(|(s, _)| s)
                .collect()
        })
        .collect();
    let cross_distance = |at: usize, dual: &DVector<f64>| -> f64 {
        fibres[at]
            .iter()
            .map(|&s| tol.vector_distance(&pts[s].xstar, dual))
            .fold(f64::INFINITY, f64::min)
    };
    let worst = scan_pairs(g, |i, j| {
        let (p, scale) = pairing_and_scale(g, i, j);
        if tol.normalized(p.abs(), scale) > 1.0 {
            return 0.0;
        }
        cross_distance(i, &pts[j].xstar).max(cross_distance(j, &pts[i].xstar))
    });
    Paramonotonicity::Checked(ClassificationReport::from_worst(worst))
}

/// All dual values coincide within vector tolerance.
pub fn constant_on_domain_check(g: &OperatorGraph, tol: &ToleranceConfig) -> ClassificationReport {
    let pts = g.points();
    ClassificationReport::from_worst(scan_pairs(g, |i, j| tol.vector_distance(&pts[i].xstar, &pts[j].xstar)))
}

/// For a graph containing `(0, 0)`: `<x*, x> = 0` for every point and
/// `<x*, y> = -<y*, x>` for every pair. A single-point violation is reported
/// with witness `(i, i)`.
pub fn skew_form_check(g: &OperatorGraph, tol: &ToleranceConfig) -> Result<ClassificationReport, ClassifyError> {
    let zero = DVector::zeros(g.dimension());
    if !g.contains(&zero, &zero, tol) {
        return Err(ClassifyError::MissingOrigin);
    }
    let pts = g.points();
    let mut worst = Worst::default();
    for (i, p) in pts.iter().enumerate() {
        let v = tol.normalized(p.xstar.dot(&p.x).abs(), p.xstar.norm() * p.x.norm());
        worst.offer(v, i, i);
        for (j, q) in pts.iter().enumerate().skip(i + 1) {
            let lhs = p.xstar.dot(&q.x);
            let rhs = q.xstar.dot(&p.x);
            let scale = (p.xstar.norm() * q.x.norm()).max(q.xstar.norm() * p.x.norm());
            worst.offer(tol.normalized((lhs + rhs).abs(), scale), i, j);
        }
    }
    Ok(ClassificationReport::from_worst(worst))
}
