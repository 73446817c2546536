use nalgebra::{DMatrix, DVector};

use super::DecomposeError;

/// Bound on `max |QᵀQ - I|` accepted for a stored basis.
pub const ORTHONORMALITY_TOL: f64 = 1e-12;

/// Orthonormal basis `Q` (n×k) of a subspace `V ⊆ Rⁿ`.
///
/// `Qᵀx` gives coordinates of `x ∈ V` and restricts a dual vector to `V`;
/// `Qc` embeds coordinates back into `Rⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    q: DMatrix<f64>,
}

impl OrthonormalBasis {
    pub fn new(q: DMatrix<f64>) -> Result<Self, DecomposeError> {
        if q.ncols() > q.nrows() {
            return Err(DecomposeError::InvalidBasis(format!(
                "{} columns exceed ambient dimension {}",
                q.ncols(),
                q.nrows()
            )));
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(DecomposeError::InvalidBasis("non-finite entry".into()));
        }
        let defect = orthonormality_defect(&q);
        if defect > ORTHONORMALITY_TOL {
            return Err(DecomposeError::InvalidBasis(format!(
                "columns not orthonormal (max |QᵀQ - I| = {defect:e})"
            )));
        }
        Ok(Self { q })
    }

    /// Basis of `{0}` in `Rⁿ`.
    pub fn trivial(dimension: usize) -> Self {
        Self {
            q: DMatrix::zeros(dimension, 0),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn dimension(&self) -> usize {
        self.q.nrows()
    }

    pub fn rank(&self) -> usize {
        self.q.ncols()
    }

    pub fn coords(&self, v: &DVector<f64>) -> DVector<f64> {
        self.q.tr_mul(v)
    }

    pub fn embed(&self, c: &DVector<f64>) -> DVector<f64> {
        &self.q * c
    }

    /// `|v - QQᵀv|`.
    pub fn out_of_span(&self, v: &DVector<f64>) -> f64 {
        (v - self.embed(&self.coords(v))).norm()
    }

    /// Change of coordinates `Q R` for an orthogonal k×k `R`.
    pub fn rotated(&self, r: &DMatrix<f64>) -> Result<Self, DecomposeError> {
        Self::new(&self.q * r)
    }
}

pub fn orthonormality_defect(q: &DMatrix<f64>) -> f64 {
    let k = q.ncols();
    (q.tr_mul(q) - DMatrix::identity(k, k)).amax()
}

/// Orthonormal basis of `span(vectors)` in `Rⁿ`.
///
/// The rank is numerical: singular values at or below
/// `max(rows, cols) · eps · σ_max` are discarded.
pub fn span_basis(dimension: usize, vectors: &[DVector<f64>]) -> Result<OrthonormalBasis, DecomposeError> {
    if let Some(bad) = vectors.iter().position(|v| v.len() != dimension) {
        return Err(DecomposeError::DimensionMismatch {
            expected: dimension,
            found: vectors[bad].len(),
        });
    }
    if vectors.is_empty() || dimension == 0 {
        return Ok(OrthonormalBasis::trivial(dimension));
    }
    let a = DMatrix::from_columns(vectors);
    let (rows, cols) = a.shape();
    let svd = a.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sigma = &svd.singular_values;
    let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
    if sigma_max == 0.0 {
        return Ok(OrthonormalBasis::trivial(dimension));
    }
    let cutoff = rows.max(cols) as f64 * f64::EPSILON * sigma_max;
    let mut keep: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] > cutoff).collect();
    keep.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]).then(i.cmp(&j)));
    let columns: Vec<DVector<f64>> = keep.iter().map(|&i| u.column(i).into_owned()).collect();
    let q = if columns.is_empty() {
        DMatrix::zeros(dimension, 0)
    } else {
        DMatrix::from_columns(&columns)
    };
    OrthonormalBasis::new(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(e: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(e)
    }

    #[test]
    fn two_axes() {
        let b = span_basis(3, &[v(&[1.0, 0.0, 0.0]), v(&[0.0, 2.0, 0.0])]).unwrap();
        assert_eq!(b.rank(), 2);
        assert!(orthonormality_defect(b.matrix()) <= 1e-12);
        assert!(b.out_of_span(&v(&[3.0, -1.0, 0.0])) < 1e-15);
        assert!((b.out_of_span(&v(&[0.0, 0.0, 1.0])) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn collinear() {
        let b = span_basis(2, &[v(&[1.0, 1.0]), v(&[2.0, 2.0])]).unwrap();
        assert_eq!(b.rank(), 1);
    }

    #[test]
    fn empty_and_zero_inputs() {
        assert_eq!(span_basis(4, &[]).unwrap().rank(), 0);
        let b = span_basis(3, &[v(&[0.0; 3]), v(&[0.0; 3])]).unwrap();
        assert_eq!(b.rank(), 0);
        assert_eq!(b.dimension(), 3);
        assert_eq!(span_basis(0, &[DVector::zeros(0)]).unwrap().rank(), 0);
    }

    #[test]
    fn rejects_mixed_dimensions() {
        assert!(matches!(
            span_basis(2, &[v(&[1.0, 0.0]), v(&[1.0])]),
            Err(DecomposeError::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn rejects_non_orthonormal() {
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(OrthonormalBasis::new(q).is_err());
        assert!(OrthonormalBasis::new(DMatrix::identity(2, 3)).is_err());
    }
}
