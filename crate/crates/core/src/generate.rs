//! Seeded ground-truth fixtures.
//!
//! A fixture plants a random `k`-dimensional subspace `V ⊆ Rⁿ` with
//! orthonormal basis `Q₀`, a random skew operator `A₀ = Q₀Â₀Q₀ᵀ` and an
//! offset `v₀`, then samples `m` domain points in `V` with duals
//! `A₀x + v₀ + w`. The extension term `w` is orthogonal to `V` and drawn
//! fresh for every branch, which gives multivalued graphs that are still
//! bimonotone. In-span noise, in contrast, breaks bimonotonicity.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decompose::{span_basis, OrthonormalBasis};
use crate::graph::{GraphError, GraphPoint, OperatorGraph};
use crate::rng::{normal_matrix, normal_vector, random_orthonormal, seeded, unit_vector};

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("invalid fixture spec: {0}")]
    InvalidSpec(String),
    #[error("point index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("amplitude must be finite and nonnegative, got {0}")]
    BadAmplitude(f64),
    #[error("no {0} directions exist for this basis")]
    EmptyDirectionClass(&'static str),
    #[error("basis dimension {found} does not match graph dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureSpec {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub branches: usize,
    pub offset_norm: f64,
    pub noise_in_span: f64,
    pub noise_orthogonal: f64,
    pub seed: u64,
    /// Plant `A₀ = 0`, giving a constant operator on `V`.
    #[serde(default)]
    pub zero_operator: bool,
}

impl FixtureSpec {
    pub fn new(n: usize, k: usize, m: usize, seed: u64) -> Self {
        Self {
            n,
            k,
            m,
            branches: 1,
            offset_norm: 1.0,
            noise_in_span: 0.0,
            noise_orthogonal: 0.0,
            seed,
            zero_operator: false,
        }
    }

    pub fn validate(&self) -> Result<(), GenerateError> {
        let bad = |msg: String| Err(GenerateError::InvalidSpec(msg));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.k > self.n {
            return bad(format!("k = {} exceeds n = {}", self.k, self.n));
        }
        if self.m == 0 || self.branches == 0 {
            return bad("m and branches must be at least 1".into());
        }
        for (name, v) in [
            ("offset_norm", self.offset_norm),
            ("noise_in_span", self.noise_in_span),
            ("noise_orthogonal", self.noise_orthogonal),
        ] {
            if !v.is_finite() || v < 0.0 {
                return bad(format!("{name} must be finite and nonnegative, got {v}"));
            }
        }
        Ok(())
    }
}

/// Planted operator behind a fixture.
#[derive(Debug, Clone, PartialEq)]
pub struct FixtureTruth {
    /// `n×n`, skew, supported on the planted span.
    pub a0: DMatrix<f64>,
    pub v0: DVector<f64>,
    pub basis0: OrthonormalBasis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fixture {
    pub graph: OperatorGraph,
    pub truth: FixtureTruth,
}

/// `(B - Bᵀ)/2` for a standard normal `B` drawn from `seed`.
pub fn random_skew(k: usize, seed: u64) -> DMatrix<f64> {
    random_skew_with(k, &mut seeded(seed))
}

pub fn random_skew_with<R: Rng + ?Sized>(k: usize, rng: &mut R) -> DMatrix<f64> {
    let b = normal_matrix(k, k, rng);
    (&b - b.transpose()) * 0.5
}

fn draw_coords<R: Rng + ?Sized>(k: usize, m: usize, rng: &mut R) -> Vec<DVector<f64>> {
    (0..m).map(|_| normal_vector(k, rng)).collect()
}

/// Rank of the differences `c_j - c_0`, which is the dimension of the span of
/// the domain after translating by the first point.
fn difference_rank(k: usize, coords: &[DVector<f64>]) -> usize {
    let diffs: Vec<_> = coords.iter().skip(1).map(|c| c - &coords[0]).collect();
    span_basis(k, &diffs).map_or(0, |b| b.rank())
}

pub fn make_fixture(spec: &FixtureSpec) -> Result<Fixture, GenerateError> {
    spec.validate()?;
    let (n, k) = (spec.n, spec.k);
    let mut rng = seeded(spec.seed);

    let q0 = random_orthonormal(n, k, &mut rng);
    let a_hat0 = if spec.zero_operator {
        DMatrix::zeros(k, k)
    } else {
        random_skew_with(k, &mut rng)
    };
    let a0 = &q0 * &a_hat0 * q0.transpose();
    let v0 = unit_vector(n, &mut rng) * spec.offset_norm;

    let wanted = k.min(spec.m - 1);
    let mut coords = draw_coords(k, spec.m, &mut rng);
    if difference_rank(k, &coords) < wanted {
        coords = draw_coords(k, spec.m, &mut rng);
    }

    let projector = DMatrix::identity(n, n) - &q0 * q0.transpose();
    let complement_dim = n - k;
    let mut points = Vec::with_capacity(spec.m * spec.branches);
    for c in &coords {
        let x = &q0 * c;
        let image = &a0 * &x + &v0;
        for _ in 0..spec.branches {
            let mut xstar = image.clone();
            if spec.noise_orthogonal > 0.0 && complement_dim > 0 {
                let w = orthogonal_direction(&projector, &mut rng);
                let scale: f64 = rng.random();
                xstar += w * (spec.noise_orthogonal * scale);
            }
            if spec.noise_in_span > 0.0 && k > 0 {
                xstar += &q0 * unit_vector(k, &mut rng) * spec.noise_in_span;
            }
            points.push(GraphPoint::new(x.clone(), xstar));
        }
    }
    let graph = OperatorGraph::new(n, points)?;
    let basis0 = OrthonormalBasis::new(q0).expect("QR factor is orthonormal");
    Ok(Fixture {
        graph,
        truth: FixtureTruth { a0, v0, basis0 },
    })
}

fn orthogonal_direction<R: Rng + ?Sized>(projector: &DMatrix<f64>, rng: &mut R) -> DVector<f64> {
    loop {
        let w = projector * normal_vector(projector.nrows(), rng);
        let norm = w.norm();
        if norm > 1e-8 {
            return w / norm;
        }
    }
}

/// Graph with `x = Qc` and `x* = Q(Âc + v̂*)` for each coordinate vector `c`.
pub fn synthesize(
    basis: &OrthonormalBasis,
    a_hat: &DMatrix<f64>,
    v_hat: &DVector<f64>,
    coords: &[DVector<f64>],
) -> Result<OperatorGraph, GraphError> {
    let points = coords
        .iter()
        .map(|c| GraphPoint::new(basis.embed(c), basis.embed(&(a_hat * c + v_hat))))
        .collect();
    OperatorGraph::new(basis.dimension(), points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PerturbDirection {
    InSpan,
    Orthogonal,
}

/// Move the dual of point `index` by `amplitude` along a random unit
/// direction inside `span(basis)` or orthogonal to it.
pub fn perturb(
    g: &OperatorGraph,
    index: usize,
    direction: PerturbDirection,
    amplitude: f64,
    basis: &OrthonormalBasis,
    seed: u64,
) -> Result<OperatorGraph, GenerateError> {
    if index >= g.len() {
        return Err(GenerateError::IndexOutOfRange { index, len: g.len() });
    }
    if !amplitude.is_finite() || amplitude < 0.0 {
        return Err(GenerateError::BadAmplitude(amplitude));
    }
    let n = g.dimension();
    if basis.dimension() != n {
        return Err(GenerateError::DimensionMismatch {
            expected: n,
            found: basis.dimension(),
        });
    }
    if amplitude == 0.0 {
        return Ok(g.clone());
    }
    let mut rng = seeded(seed);
    let q = basis.matrix();
    let dir = match direction {
        PerturbDirection::InSpan => {
            if basis.rank() == 0 {
                return Err(GenerateError::EmptyDirectionClass("in-span"));
            }
            q * unit_vector(basis.rank(), &mut rng)
        }
        PerturbDirection::Orthogonal => {
            if basis.rank() == n {
                return Err(GenerateError::EmptyDirectionClass("orthogonal"));
            }
            orthogonal_direction(&(DMatrix::identity(n, n) - q * q.transpose()), &mut rng)
        }
    };
    let mut points = g.points().to_vec();
    points[index].xstar += dir * amplitude;
    Ok(OperatorGraph::new(n, points)?)
}

/// JSON form of [`FixtureTruth`], written next to the generated graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureTruthDoc {
    pub spec: FixtureSpec,
    pub a0: Vec<Vec<f64>>,
    pub v0: Vec<f64>,
    pub basis0: Vec<Vec<f64>>,
}

impl FixtureTruthDoc {
    pub fn new(spec: &FixtureSpec, truth: &FixtureTruth) -> Self {
        let rows = |m: &DMatrix<f64>| m.row_iter().map(|r| r.iter().copied().collect()).collect();
        Self {
            spec: spec.clone(),
            a0: rows(&truth.a0),
            v0: truth.v0.as_slice().to_vec(),
            basis0: rows(truth.basis0.matrix()),
        }
    }

    pub fn a0(&self) -> DMatrix<f64> {
        let n = self.a0.len();
        DMatrix::from_row_iterator(n, n, self.a0.iter().flatten().copied())
    }
}
