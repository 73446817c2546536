#![allow(dead_code)]

use bimonotone::generate::{make_fixture, Fixture, FixtureSpec};
use bimonotone::{reduce, span_basis, OperatorGraph, ReducedGraph, ToleranceConfig};
use nalgebra::{DMatrix, DVector};

/// Least-squares fit of `x̂* ≈ Âx̂` over the `k(k-1)/2` free parameters of a
/// skew matrix, solved through the normal equations.
pub fn skew_least_squares(rg: &ReducedGraph) -> DMatrix<f64> {
    let k = rg.dimension();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|p| (p + 1..k).map(move |q| (p, q))).collect();
    if pairs.is_empty() {
        return DMatrix::zeros(k, k);
    }
    let rows = rg.len() * k;
    let mut design = DMatrix::zeros(rows, pairs.len());
    let mut target = DVector::zeros(rows);
    for (i, pt) in rg.points().iter().enumerate() {
        for r in 0..k {
            target[i * k + r] = pt.xstar[r];
        }
        // (Âx)_p += θ x_q ; (Âx)_q -= θ x_p
        for (c, &(p, q)) in pairs.iter().enumerate() {
            design[(i * k + p, c)] += pt.x[q];
            design[(i * k + q, c)] -= pt.x[p];
        }
    }
    let normal = design.tr_mul(&design);
    let rhs = design.tr_mul(&target);
    let theta = normal.cholesky().expect("sample spans the reduced space").solve(&rhs);
    let mut a = DMatrix::zeros(k, k);
    for (c, &(p, q)) in pairs.iter().enumerate() {
        a[(p, q)] = theta[c];
        a[(q, p)] = -theta[c];
    }
    a
}

/// Largest `|<x* - y*, x - y>|` over all pairs, by direct scan.
pub fn max_abs_pairing(g: &OperatorGraph) -> f64 {
    let pts = g.points();
    let mut worst: f64 = 0.0;
    for p in pts {
        for q in pts {
            worst = worst.max(p.pairing(q).abs());
        }
    }
    worst
}

/// Translate by the first point and reduce onto the span of the translated domain.
pub fn reduced_from(g: &OperatorGraph, tol: &ToleranceConfig) -> ReducedGraph {
    let b = g.points()[0].clone();
    let t = g.translate(&b.x, &b.xstar).unwrap();
    let basis = span_basis(g.dimension(), &t.domain(tol)).unwrap();
    reduce(&t, &basis, tol).unwrap()
}

pub fn fixture(n: usize, k: usize, m: usize, seed: u64) -> Fixture {
    make_fixture(&FixtureSpec::new(n, k, m, seed)).unwrap()
}

pub fn conjugated_truth(a0: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    q.transpose() * a0 * q
}
