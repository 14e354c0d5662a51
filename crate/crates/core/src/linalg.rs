//! Small dense helpers shared by the numerical modules.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn ensure_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}×{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    Ok(m.nrows())
}

/// Returns the number of modes `n` of a `2n×2n` matrix.
pub fn ensure_phase_square(m: &DMatrix<f64>) -> Result<usize> {
    let size = ensure_square(m)?;
    if size % 2 != 0 {
        return Err(Error::Dimension(format!(
            "phase-space matrices have even size, got {size}×{size}"
        )));
    }
    Ok(size / 2)
}

pub fn ensure_finite(m: &DMatrix<f64>) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain("matrix has non-finite entries".into()))
    }
}

/// Checks `‖A − Aᵀ‖_max ≤ tol·(1 + ‖A‖_max)` and returns the symmetric part.
pub fn check_symmetric(m: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    ensure_square(m)?;
    ensure_finite(m)?;
    let deviation = max_abs(&(m - m.transpose()));
    let allowed = tol * (1.0 + max_abs(m));
    if deviation > allowed {
        return Err(Error::NotSymmetric { deviation, allowed });
    }
    Ok(symmetrize(m))
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl SymEigen {
    pub fn new(m: &DMatrix<f64>) -> Self {
        let eig = symmetrize(m).symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
        let columns: Vec<_> = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
        let vectors = DMatrix::from_columns(&columns);
        Self { values, vectors }
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// `V·diag(f(λ))·Vᵀ`
    pub fn map(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let scaled = DVector::from_iterator(self.values.len(), self.values.iter().map(|&v| f(v)));
        let m = &self.vectors * DMatrix::from_diagonal(&scaled) * self.vectors.transpose();
        symmetrize(&m)
    }
}

/// Validates a symmetric positive definite matrix and returns its
/// eigen-decomposition. Refuses matrices whose condition number exceeds
/// `max_condition`.
pub fn spd_eigen(m: &DMatrix<f64>, sym_tol: f64, max_condition: f64) -> Result<SymEigen> {
    let sym = check_symmetric(m, sym_tol)?;
    let eig = SymEigen::new(&sym);
    if eig.min() <= 0.0 {
        return Err(Error::NotSpd { min_eigenvalue: eig.min() });
    }
    let condition = eig.max() / eig.min();
    if condition > max_condition {
        return Err(Error::NumericalFailure(format!(
            "condition number {condition:.3e} exceeds {max_condition:.1e}"
        )));
    }
    Ok(eig)
}

pub fn spd_inverse(m: &DMatrix<f64>, sym_tol: f64, max_condition: f64) -> Result<DMatrix<f64>> {
    Ok(spd_eigen(m, sym_tol, max_condition)?.map(|v| 1.0 / v))
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    SymEigen::new(m).min()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &DMatrix<Complex64>) -> Vec<f64> {
    let herm = (h + h.adjoint()).map(|c| c * 0.5);
    let mut values: Vec<f64> = herm.symmetric_eigen().eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// `A + iB` as a complex matrix.
pub fn complexify(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| Complex::new(re[(i, j)], im[(i, j)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_check_accepts_rounding_and_rejects_skew() {
        let mut m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 3.0]);
        m[(0, 1)] += 1e-14;
        assert!(check_symmetric(&m, 1e-10).is_ok());
        let skew = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!(matches!(check_symmetric(&skew, 1e-10), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn spd_eigen_rejects_indefinite_and_ill_conditioned() {
        let indefinite = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
        assert!(matches!(spd_eigen(&indefinite, 1e-10, 1e12), Err(Error::NotSpd { .. })));
        let singular = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0]));
        assert!(matches!(spd_eigen(&singular, 1e-10, 1e12), Err(Error::NotSpd { .. })));
        let stiff = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-13]));
        assert!(matches!(spd_eigen(&stiff, 1e-10, 1e12), Err(Error::NumericalFailure(_))));
    }

    #[test]
    fn hermitian_eigenvalues_of_pauli_y() {
        let re = DMatrix::zeros(2, 2);
        let im = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let values = hermitian_eigenvalues(&complexify(&re, &im));
        assert!((values[0] + 1.0).abs() < 1e-14);
        assert!((values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn odd_dimension_is_rejected() {
        let m = DMatrix::<f64>::identity(3, 3);
        assert!(matches!(ensure_phase_square(&m), Err(Error::Dimension(_))));
    }
}
