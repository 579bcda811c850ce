//! Small dense complex helpers on top of `nalgebra`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64;

use crate::code::UnitMatrix;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn unit_to_cmatrix(m: &UnitMatrix) -> CMatrix {
    CMatrix::from_fn(m.rows(), m.cols(), |r, c| m.get(r, c).to_complex())
}

/// Cholesky factor `R = L L^H` of a Hermitian positive-definite matrix.
///
/// A whitened row vector `v` is `L^{-1} conj(v)^T`, so that
/// `v R^{-1} v^H = ||whiten(v)||^2` and inner products carry over.
#[derive(Debug, Clone)]
pub struct Whitener {
    chol: Cholesky<Complex64, Dyn>,
    /// `Some(d)` when `R` is diagonal; whitening is then a scaling.
    diag_inv_sqrt: Option<Vec<f64>>,
}

impl Whitener {
    pub fn new(r: &CMatrix) -> Result<Self> {
        let n = r.nrows();
        let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || r[(i, j)].norm() == 0.0));
        let chol = Cholesky::new(r.clone()).ok_or(Error::SingularCovariance)?;
        // complex Cholesky does not fail on negative pivots, it takes a
        // complex square root; a Hermitian positive-definite input has a
        // real positive factor diagonal
        let l = chol.l_dirty();
        if (0..n).any(|i| !(l[(i, i)].re > 0.0) || l[(i, i)].im.abs() > 1e-12 * l[(i, i)].re) {
            return Err(Error::SingularCovariance);
        }
        let diag_inv_sqrt = diagonal.then(|| (0..n).map(|i| 1.0 / r[(i, i)].re.sqrt()).collect());
        Ok(Whitener {
            chol,
            diag_inv_sqrt,
        })
    }

    pub fn dim(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    pub fn whiten(&self, v: &[Complex64]) -> CVector {
        match &self.diag_inv_sqrt {
            Some(d) => CVector::from_iterator(v.len(), v.iter().zip(d).map(|(x, s)| x.conj() * *s)),
            None => {
                let rhs = CVector::from_iterator(v.len(), v.iter().map(|x| x.conj()));
                self.chol
                    .l()
                    .solve_lower_triangular(&rhs)
                    .expect("Cholesky factor has a positive diagonal")
            }
        }
    }

    pub fn inverse(&self) -> CMatrix {
        self.chol.inverse()
    }
}
