//! Mixed and pure Gaussian states.
//!
//! A mixed state is stored through its mean `⟨z⟩` and covariance matrix
//! `Σ`; a pure state `ψ_{X,Y}` through the real symmetric pair `(X, Y)`.
//! Its Wigner function is `(πħ)^{-n} exp(−zᵀGz/ħ)` with
//!
//! ```text
//! G = [[X + Y X⁻¹ Y, Y X⁻¹], [X⁻¹ Y, X⁻¹]] = SᵀS,
//! S = [[X^{1/2}, 0], [X^{-1/2} Y, X^{-1/2}]]
//! ```
//!
//! and its covariance matrix is `Σ_ψ = (ħ/2) G⁻¹`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, max_abs, SymEigen};
use crate::symplectic::{self, standard_form, PhaseDim, SymplecticMatrix, SymplecticSpectrum};
use crate::tolerance::{self, Tolerances};

fn check_hbar(hbar: f64) -> Result<()> {
    if hbar > 0.0 && hbar.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("ħ must be positive and finite, got {hbar}")))
    }
}

fn check_mean(mean: &DVector<f64>, dim: PhaseDim) -> Result<()> {
    if mean.len() != dim.size() {
        return Err(Error::Dimension(format!(
            "mean has length {}, expected {}",
            mean.len(),
            dim.size()
        )));
    }
    if mean.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("mean has non-finite entries".into()));
    }
    Ok(())
}

/// Mixed Gaussian state: mean vector and covariance matrix.
#[derive(Debug, Clone)]
pub struct GaussianMixedState {
    mean: DVector<f64>,
    sigma: DMatrix<f64>,
    sigma_inv: DMatrix<f64>,
    log_det: f64,
    hbar: f64,
}

impl GaussianMixedState {
    pub fn new(sigma: DMatrix<f64>, mean: DVector<f64>, hbar: f64) -> Result<Self> {
        check_hbar(hbar)?;
        let dim = PhaseDim::of_matrix(&sigma)?;
        check_mean(&mean, dim)?;
        let tol = Tolerances::default();
        let sigma = linalg::check_symmetric(&sigma, tol.symmetry)?;
        let eig = linalg::spd_eigen(&sigma, tol.symmetry, tol.max_condition)?;
        let sigma_inv = eig.map(|v| 1.0 / v);
        let log_det = eig.values.iter().map(|v| v.ln()).sum();
        Ok(Self { mean, sigma, sigma_inv, log_det, hbar })
    }

    pub fn centered(sigma: DMatrix<f64>, hbar: f64) -> Result<Self> {
        let size = sigma.nrows();
        Self::new(sigma, DVector::zeros(size), hbar)
    }

    pub fn dim(&self) -> PhaseDim {
        PhaseDim::of_matrix(&self.sigma).expect("validated at construction")
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn sigma_inverse(&self) -> &DMatrix<f64> {
        &self.sigma_inv
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `(ΔX_j)²`
    pub fn var_x(&self, mode: usize) -> f64 {
        let d = self.dim();
        self.sigma[(d.x(mode), d.x(mode))]
    }

    /// `(ΔP_j)²`
    pub fn var_p(&self, mode: usize) -> f64 {
        let d = self.dim();
        self.sigma[(d.p(mode), d.p(mode))]
    }

    /// `Δ(X_j, P_j)`
    pub fn cov_xp(&self, mode: usize) -> f64 {
        let d = self.dim();
        self.sigma[(d.x(mode), d.p(mode))]
    }

    /// `[[(ΔX_j)², Δ(X_j,P_j)], [Δ(X_j,P_j), (ΔP_j)²]]`
    pub fn mode_block(&self, mode: usize) -> DMatrix<f64> {
        self.dim().mode_block(&self.sigma, mode)
    }

    /// `Δ(X, X)`
    pub fn xx_block(&self) -> DMatrix<f64> {
        let n = self.dim().modes();
        self.sigma.view((0, 0), (n, n)).into_owned()
    }

    /// `Δ(X, P)`
    pub fn xp_block(&self) -> DMatrix<f64> {
        let n = self.dim().modes();
        self.sigma.view((0, n), (n, n)).into_owned()
    }

    /// `Δ(P, P)`
    pub fn pp_block(&self) -> DMatrix<f64> {
        let n = self.dim().modes();
        self.sigma.view((n, n), (n, n)).into_owned()
    }

    /// `M = (ħ/2) Σ⁻¹`, the matrix of the covariance ellipsoid `zᵀMz ≤ ħ`.
    pub fn m_matrix(&self) -> Result<DMatrix<f64>> {
        Ok(&self.sigma_inv * (0.5 * self.hbar))
    }

    pub fn with_mean(&self, mean: DVector<f64>) -> Result<Self> {
        check_mean(&mean, self.dim())?;
        Ok(Self { mean, ..self.clone() })
    }

    pub fn wigner_value(&self, z: &[f64]) -> f64 {
        let n = self.dim().modes();
        assert_eq!(z.len(), 2 * n, "phase-space point has wrong dimension");
        let d = DVector::from_column_slice(z) - &self.mean;
        let quad = d.dot(&(&self.sigma_inv * &d));
        let log_prefactor = -(n as f64) * (2.0 * PI).ln() - 0.5 * self.log_det;
        (log_prefactor - 0.5 * quad).exp()
    }
}

/// Normalized pure Gaussian `ψ_{X,Y}` (with an optional phase-space mean).
#[derive(Debug, Clone)]
pub struct PureGaussian {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
    mean: DVector<f64>,
    hbar: f64,
}

impl PureGaussian {
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>, mean: DVector<f64>, hbar: f64) -> Result<Self> {
        check_hbar(hbar)?;
        let tol = Tolerances::default();
        let n = linalg::ensure_square(&x)?;
        if y.nrows() != n || y.ncols() != n {
            return Err(Error::Dimension(format!(
                "X is {n}×{n} but Y is {}×{}",
                y.nrows(),
                y.ncols()
            )));
        }
        let x = linalg::check_symmetric(&x, tol.symmetry)?;
        let y = linalg::check_symmetric(&y, tol.symmetry)?;
        linalg::spd_eigen(&x, tol.symmetry, tol.max_condition)?;
        check_mean(&mean, PhaseDim::new(n)?)?;
        Ok(Self { x, y, mean, hbar })
    }

    pub fn centered(x: DMatrix<f64>, y: DMatrix<f64>, hbar: f64) -> Result<Self> {
        let n = x.nrows();
        Self::new(x, y, DVector::zeros(2 * n), hbar)
    }

    /// The coherent ground state `X = I`, `Y = 0`.
    pub fn ground(dim: PhaseDim, hbar: f64) -> Result<Self> {
        let n = dim.modes();
        Self::centered(DMatrix::identity(n, n), DMatrix::zeros(n, n), hbar)
    }

    pub fn dim(&self) -> PhaseDim {
        PhaseDim::new(self.x.nrows()).expect("validated at construction")
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn wigner_value(&self, z: &[f64]) -> f64 {
        let w = wigner_of_pure(self).expect("validated at construction");
        w.value(z)
    }
}

/// Wigner function `(πħ)^{-n} exp(−(z−⟨z⟩)ᵀG(z−⟨z⟩)/ħ)` of a pure Gaussian.
#[derive(Debug, Clone)]
pub struct WignerGaussian {
    g: DMatrix<f64>,
    mean: DVector<f64>,
    hbar: f64,
}

impl WignerGaussian {
    /// Checks that `G` is symmetric positive definite. Symplecticity is
    /// checked by [`factor_g`].
    pub fn new(g: DMatrix<f64>, mean: DVector<f64>, hbar: f64) -> Result<Self> {
        check_hbar(hbar)?;
        let dim = PhaseDim::of_matrix(&g)?;
        check_mean(&mean, dim)?;
        let tol = Tolerances::default();
        let g = linalg::check_symmetric(&g, tol.symmetry)?;
        linalg::spd_eigen(&g, tol.symmetry, tol.max_condition)?;
        Ok(Self { g, mean, hbar })
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn dim(&self) -> PhaseDim {
        PhaseDim::of_matrix(&self.g).expect("validated at construction")
    }

    pub fn value(&self, z: &[f64]) -> f64 {
        let n = self.dim().modes();
        assert_eq!(z.len(), 2 * n, "phase-space point has wrong dimension");
        let d = DVector::from_column_slice(z) - &self.mean;
        let quad = d.dot(&(&self.g * &d));
        (PI * self.hbar).powi(-(n as i32)) * (-quad / self.hbar).exp()
    }
}

/// Builds `G` from `(X, Y)` and checks that it is symplectic.
pub fn wigner_of_pure(psi: &PureGaussian) -> Result<WignerGaussian> {
    let n = psi.dim().modes();
    let tol = Tolerances::default();
    let x_inv = linalg::spd_inverse(&psi.x, tol.symmetry, tol.max_condition)?;
    let y = &psi.y;
    let mut g = DMatrix::zeros(2 * n, 2 * n);
    g.view_mut((0, 0), (n, n)).copy_from(&(&psi.x + y * &x_inv * y));
    g.view_mut((0, n), (n, n)).copy_from(&(y * &x_inv));
    g.view_mut((n, 0), (n, n)).copy_from(&(&x_inv * y));
    g.view_mut((n, n), (n, n)).copy_from(&x_inv);
    let g = linalg::symmetrize(&g);
    let defect = symplectic::symplectic_defect(&g)?;
    let scale = max_abs(&g);
    if defect > tol.williamson * (1.0 + scale * scale) {
        return Err(Error::NumericalFailure(format!(
            "Wigner matrix is not symplectic (defect {defect:.3e})"
        )));
    }
    WignerGaussian::new(g, psi.mean.clone(), psi.hbar)
}

/// Inverse of [`wigner_of_pure`]: reads `X = G_pp⁻¹`, `Y = G_pp⁻¹ G_px` off the
/// blocks of a symplectic positive definite `G`, and returns the factor `S`
/// with `SᵀS = G`.
pub fn factor_g(w: &WignerGaussian, tol: f64) -> Result<(SymplecticMatrix, PureGaussian)> {
    let g = &w.g;
    let dim = w.dim();
    let n = dim.modes();
    let scale = max_abs(g);
    let defect = symplectic::symplectic_defect(g)?;
    if defect > tol * (1.0 + scale * scale) {
        return Err(Error::Domain(format!(
            "G is not symplectic (‖GJG − J‖ = {defect:.3e}); no pure Gaussian has this Wigner matrix"
        )));
    }
    let defaults = Tolerances::default();
    let g_pp = g.view((n, n), (n, n)).into_owned();
    let g_px = g.view((n, 0), (n, n)).into_owned();
    let pp_eig = linalg::spd_eigen(&g_pp, defaults.symmetry, defaults.max_condition)?;
    let x = pp_eig.map(|v| 1.0 / v);
    let y = linalg::symmetrize(&(&x * g_px));

    let x_eig = SymEigen::new(&x);
    let x_half = x_eig.map(f64::sqrt);
    let x_minus_half = x_eig.map(|v| 1.0 / v.sqrt());
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    s.view_mut((0, 0), (n, n)).copy_from(&x_half);
    s.view_mut((n, 0), (n, n)).copy_from(&(&x_minus_half * &y));
    s.view_mut((n, n), (n, n)).copy_from(&x_minus_half);

    let residual = max_abs(&(s.transpose() * &s - g));
    if residual > tol.max(defaults.williamson) * (1.0 + scale) {
        return Err(Error::NumericalFailure(format!(
            "factorization SᵀS = G failed (residual {residual:.3e})"
        )));
    }
    let psi = PureGaussian::new(x, y, w.mean.clone(), w.hbar)?;
    Ok((SymplecticMatrix::new_unchecked(s), psi))
}

/// `Σ_ψ = (ħ/2) G⁻¹`, using `G⁻¹ = JᵀGJ` for symplectic `G`.
pub fn covariance_of_pure(psi: &PureGaussian) -> Result<GaussianMixedState> {
    let w = wigner_of_pure(psi)?;
    let j = standard_form(w.dim());
    let g_inv = j.transpose() * &w.g * &j;
    GaussianMixedState::new(g_inv * (0.5 * psi.hbar), psi.mean.clone(), psi.hbar)
}

/// One Robertson–Schrödinger inequality `(ΔX_j)²(ΔP_j)² ≥ Δ(X_j,P_j)² + ħ²/4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsEntry {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RsReport {
    pub entries: Vec<RsEntry>,
    pub tol: f64,
}

impl RsReport {
    pub fn saturated_modes(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(j, e)| e.saturated.then_some(j))
            .collect()
    }

    /// At least one, but not all, inequalities are equalities.
    pub fn partially_saturated(&self) -> bool {
        let k = self.saturated_modes().len();
        k > 0 && k < self.entries.len()
    }

    pub fn all_saturated(&self) -> bool {
        self.entries.iter().all(|e| e.saturated)
    }

    pub fn min_slack(&self) -> f64 {
        self.entries.iter().map(|e| e.slack).fold(f64::INFINITY, f64::min)
    }
}

pub fn rs_report(rho: &GaussianMixedState, tol: f64) -> RsReport {
    rs_report_sigma(rho.sigma(), rho.hbar(), tol).expect("validated at construction")
}

/// Robertson–Schrödinger report for a raw symmetric `Σ`.
pub fn rs_report_sigma(sigma: &DMatrix<f64>, hbar: f64, tol: f64) -> Result<RsReport> {
    let dim = PhaseDim::of_matrix(sigma)?;
    let entries = (0..dim.modes())
        .map(|j| {
            let b = dim.mode_block(sigma, j);
            let lhs = b[(0, 0)] * b[(1, 1)];
            let rhs = b[(0, 1)] * b[(0, 1)] + 0.25 * hbar * hbar;
            let slack = lhs - rhs;
            RsEntry { lhs, rhs, slack, saturated: slack.abs() <= tol * rhs }
        })
        .collect();
    Ok(RsReport { entries, tol })
}

/// Smallest eigenvalue of the Hermitian matrix `Σ + (iħ/2)J`.
pub fn quantum_margin(sigma: &DMatrix<f64>, hbar: f64) -> Result<f64> {
    let dim = PhaseDim::of_matrix(sigma)?;
    let sigma = linalg::check_symmetric(sigma, tolerance::SYMMETRY)?;
    let h = linalg::complexify(&sigma, &(standard_form(dim) * (0.5 * hbar)));
    Ok(linalg::hermitian_eigenvalues(&h)[0])
}

/// `Σ + (iħ/2)J ⪰ 0`, judged as `λ_min ≥ −tol·‖Σ‖₂`.
pub fn quantum_condition_sigma(sigma: &DMatrix<f64>, hbar: f64, tol: f64) -> Result<bool> {
    check_hbar(hbar)?;
    let margin = quantum_margin(sigma, hbar)?;
    let norm = SymEigen::new(sigma).values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    Ok(margin >= -tol * norm)
}

pub fn quantum_condition(rho: &GaussianMixedState, tol: f64) -> Result<bool> {
    quantum_condition_sigma(rho.sigma(), rho.hbar(), tol)
}

/// Symplectic spectrum of `Σ` itself (in absolute units, not `ħ/2`).
pub fn sigma_spectrum(rho: &GaussianMixedState) -> Result<SymplecticSpectrum> {
    symplectic::symplectic_spectrum(rho.sigma())
}

/// Spectral form of the quantum condition: `λ₁(M) ≤ 1 + tol`.
pub fn quantum_condition_by_spectrum(rho: &GaussianMixedState, tol: f64) -> Result<bool> {
    let lambda1 = symplectic::symplectic_spectrum(&rho.m_matrix()?)?.max();
    Ok(lambda1 <= 1.0 + tol)
}

/// Symplectic capacity `πħ/λ₁(M)` of the covariance ellipsoid.
pub fn capacity_of_state(rho: &GaussianMixedState) -> Result<f64> {
    symplectic::symplectic_capacity(&rho.m_matrix()?, rho.hbar())
}

/// States that transform covariantly under `z ↦ Sz`.
pub trait SymplecticCovariant: Sized {
    fn transformed(&self, s: &SymplecticMatrix) -> Result<Self>;
}

impl SymplecticCovariant for GaussianMixedState {
    /// `Σ′ = SΣSᵀ`, `⟨z⟩′ = S⟨z⟩`.
    fn transformed(&self, s: &SymplecticMatrix) -> Result<Self> {
        if s.dim() != self.dim() {
            return Err(Error::Dimension("symplectic matrix and state differ in size".into()));
        }
        let sm = s.matrix();
        let sigma = sm * &self.sigma * sm.transpose();
        GaussianMixedState::new(linalg::symmetrize(&sigma), sm * &self.mean, self.hbar)
    }
}

impl SymplecticCovariant for PureGaussian {
    /// `G′ = S⁻ᵀ G S⁻¹`, refactored into `(X′, Y′)`.
    fn transformed(&self, s: &SymplecticMatrix) -> Result<Self> {
        if s.dim() != self.dim() {
            return Err(Error::Dimension("symplectic matrix and state differ in size".into()));
        }
        let w = wigner_of_pure(self)?;
        let s_inv = s.inverse();
        let si = s_inv.matrix();
        let g = linalg::symmetrize(&(si.transpose() * w.g() * si));
        let moved = WignerGaussian::new(g, s.matrix() * &self.mean, self.hbar)?;
        let (_, psi) = factor_g(&moved, tolerance::WILLIAMSON).map_err(|e| match e {
            Error::Domain(msg) => Error::NumericalFailure(format!("transformed state: {msg}")),
            other => other,
        })?;
        Ok(psi)
    }
}

pub fn transform_state<T: SymplecticCovariant>(s: &SymplecticMatrix, state: &T) -> Result<T> {
    state.transformed(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{fixtures, rng};

    fn diag(values: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_row_slice(values))
    }

    fn one(v: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, v)
    }

    #[test]
    fn ground_state_wigner_matrix_is_identity() {
        let psi = PureGaussian::ground(PhaseDim::new(2).unwrap(), 1.0).unwrap();
        let w = wigner_of_pure(&psi).unwrap();
        assert!(max_abs(&(w.g() - DMatrix::<f64>::identity(4, 4))) < 1e-15);
    }

    #[test]
    fn one_mode_wigner_matrix() {
        let psi = PureGaussian::centered(one(2.0), one(1.0), 1.0).unwrap();
        let w = wigner_of_pure(&psi).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[2.5, 0.5, 0.5, 0.5]);
        assert!(max_abs(&(w.g() - expected)) < 1e-15);
        let (s, back) = factor_g(&w, 1e-10).unwrap();
        assert!((back.x()[(0, 0)] - 2.0).abs() < 1e-14);
        assert!((back.y()[(0, 0)] - 1.0).abs() < 1e-14);
        assert!(max_abs(&(s.matrix().transpose() * s.matrix() - w.g())) < 1e-14);
    }

    #[test]
    fn factor_identity() {
        let w = WignerGaussian::new(DMatrix::identity(4, 4), DVector::zeros(4), 1.0).unwrap();
        let (s, psi) = factor_g(&w, 1e-10).unwrap();
        assert!(max_abs(&(s.matrix() - DMatrix::<f64>::identity(4, 4))) < 1e-15);
        assert!(max_abs(&(psi.x() - DMatrix::<f64>::identity(2, 2))) < 1e-15);
        assert!(max_abs(psi.y()) < 1e-15);
    }

    #[test]
    fn factor_rejects_non_symplectic() {
        let w = WignerGaussian::new(diag(&[2.0, 2.0]), DVector::zeros(2), 1.0).unwrap();
        assert!(matches!(factor_g(&w, 1e-10), Err(Error::Domain(_))));
    }

    #[test]
    fn covariance_of_pure_examples() {
        let psi = PureGaussian::ground(PhaseDim::new(1).unwrap(), 1.0).unwrap();
        let cov = covariance_of_pure(&psi).unwrap();
        assert!(max_abs(&(cov.sigma() - diag(&[0.5, 0.5]))) < 1e-15);

        let psi = PureGaussian::centered(one(2.0), one(1.0), 1.0).unwrap();
        let cov = covariance_of_pure(&psi).unwrap();
        // ½·G⁻¹ with G = [[5/2, 1/2], [1/2, 1/2]], det G = 1
        let expected = DMatrix::from_row_slice(2, 2, &[0.25, -0.25, -0.25, 1.25]);
        assert!(max_abs(&(cov.sigma() - expected)) < 1e-15);
    }

    #[test]
    fn rs_report_examples() {
        let hbar = 1.0;
        let rho = GaussianMixedState::centered(DMatrix::identity(4, 4) * 0.5, hbar).unwrap();
        let r = rs_report(&rho, 1e-8);
        assert!(r.all_saturated());
        assert!(!r.partially_saturated());
        assert!(r.entries.iter().all(|e| e.slack.abs() < 1e-15));

        let rho = GaussianMixedState::centered(diag(&[0.5, 1.0, 0.5, 2.0]), hbar).unwrap();
        let r = rs_report(&rho, 1e-8);
        assert!(r.entries[0].saturated);
        assert!((r.entries[0].slack).abs() < 1e-15);
        assert!((r.entries[1].slack - 1.75).abs() < 1e-15);
        assert!(r.partially_saturated());
        assert_eq!(r.saturated_modes(), vec![0]);

        let rho = GaussianMixedState::centered(DMatrix::identity(4, 4), hbar).unwrap();
        let r = rs_report(&rho, 1e-8);
        assert!(r.saturated_modes().is_empty());
        assert!(r.entries.iter().all(|e| (e.slack - 0.75).abs() < 1e-15));
    }

    #[test]
    fn quantum_condition_examples() {
        let hbar = 1.3;
        let at = |c: f64| GaussianMixedState::centered(DMatrix::identity(2, 2) * c, hbar).unwrap();
        assert!(quantum_condition(&at(hbar / 2.0), 1e-9).unwrap());
        assert!(quantum_margin(at(hbar / 2.0).sigma(), hbar).unwrap().abs() < 1e-14);
        assert!(!quantum_condition(&at(hbar / 4.0), 1e-9).unwrap());

        let sigma0 = fixtures::covariance_with_spectrum(3, &[1.0, 1.5, 2.5], hbar).unwrap();
        let rho0 = GaussianMixedState::centered(sigma0, hbar).unwrap();
        let s = symplectic::random_symplectic(PhaseDim::new(3).unwrap(), 77, 6).unwrap();
        let moved = transform_state(&s, &rho0).unwrap();
        assert!(quantum_condition(&moved, 1e-9).unwrap());
    }

    #[test]
    fn quantum_condition_rejects_asymmetric() {
        let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(
            quantum_condition_sigma(&sigma, 1.0, 1e-9),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn capacity_examples() {
        let hbar = 0.8;
        let rho = GaussianMixedState::centered(DMatrix::identity(4, 4) * (hbar / 2.0), hbar).unwrap();
        assert!((capacity_of_state(&rho).unwrap() - PI * hbar).abs() < 1e-13);
        let rho = GaussianMixedState::centered(DMatrix::identity(4, 4) * hbar, hbar).unwrap();
        assert!((capacity_of_state(&rho).unwrap() - 2.0 * PI * hbar).abs() < 1e-13);
    }

    #[test]
    fn identity_and_fourier_transforms() {
        let dim = PhaseDim::new(2).unwrap();
        let psi = PureGaussian::ground(dim, 1.0).unwrap();
        let same = transform_state(&SymplecticMatrix::identity(dim), &psi).unwrap();
        assert!(max_abs(&(same.x() - psi.x())) < 1e-15);
        let turned = transform_state(&symplectic::fourier(dim), &psi).unwrap();
        assert!(max_abs(&(turned.x() - psi.x())) < 1e-14);
        assert!(max_abs(turned.y()) < 1e-14);
    }

    #[test]
    fn pure_transform_matches_covariance_transform() {
        let dim = PhaseDim::new(3).unwrap();
        let x = fixtures::random_spd(&mut rng::seeded(1), 3, 0.5, 2.0);
        let y = fixtures::random_spd(&mut rng::seeded(2), 3, 0.5, 2.0) - DMatrix::identity(3, 3);
        let psi = PureGaussian::centered(x, y, 1.0).unwrap();
        let s = symplectic::random_symplectic(dim, 9, 5).unwrap();
        let via_pure = covariance_of_pure(&transform_state(&s, &psi).unwrap()).unwrap();
        let via_mixed = transform_state(&s, &covariance_of_pure(&psi).unwrap()).unwrap();
        let scale = max_abs(via_mixed.sigma());
        assert!(max_abs(&(via_pure.sigma() - via_mixed.sigma())) < 1e-9 * scale);
    }

    #[test]
    fn mean_moves_with_transform() {
        let dim = PhaseDim::new(1).unwrap();
        let rho = GaussianMixedState::new(DMatrix::identity(2, 2), DVector::from_vec(vec![1.0, 2.0]), 1.0).unwrap();
        let s = symplectic::fourier(dim);
        let moved = transform_state(&s, &rho).unwrap();
        assert_eq!(moved.mean().as_slice(), &[2.0, -1.0]);
    }

    #[test]
    fn wigner_value_prefactors() {
        let psi = PureGaussian::ground(PhaseDim::new(1).unwrap(), 1.0).unwrap();
        assert!((psi.wigner_value(&[0.0, 0.0]) - 1.0 / PI).abs() < 1e-15);
        let rho = GaussianMixedState::centered(DMatrix::identity(2, 2), 1.0).unwrap();
        assert!((rho.wigner_value(&[0.0, 0.0]) - 0.5 / PI).abs() < 1e-15);
    }

    #[test]
    fn pure_and_mixed_wigner_agree_for_pure_covariance() {
        let psi = PureGaussian::new(one(1.7), one(-0.4), DVector::from_vec(vec![0.3, -0.2]), 0.6).unwrap();
        let rho = covariance_of_pure(&psi).unwrap();
        for z in [[0.0, 0.0], [0.5, 0.1], [-0.2, 0.9]] {
            let a = psi.wigner_value(&z);
            let b = rho.wigner_value(&z);
            assert!((a - b).abs() < 1e-12 * a.max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn wigner_normalization_by_quadrature() {
        // trapezoid on a large box; Gaussians make the rule spectrally accurate
        let sigma = DMatrix::from_row_slice(2, 2, &[0.8, 0.3, 0.3, 0.6]);
        let rho = GaussianMixedState::new(sigma, DVector::from_vec(vec![0.4, -0.1]), 1.0).unwrap();
        let (half, steps) = (9.0_f64, 600usize);
        let h = 2.0 * half / steps as f64;
        let mut total = 0.0;
        for a in 0..=steps {
            for b in 0..=steps {
                let z = [-half + a as f64 * h, -half + b as f64 * h];
                let wa = if a == 0 || a == steps { 0.5 } else { 1.0 };
                let wb = if b == 0 || b == steps { 0.5 } else { 1.0 };
                total += wa * wb * rho.wigner_value(&z);
            }
        }
        assert!((total * h * h - 1.0).abs() < 1e-6);
    }

    #[test]
    fn block_accessors() {
        let sigma = DMatrix::from_fn(4, 4, |i, j| if i == j { 2.0 + i as f64 } else { 0.1 * (i + j) as f64 });
        let rho = GaussianMixedState::centered(sigma.clone(), 1.0).unwrap();
        assert_eq!(rho.var_x(1), sigma[(1, 1)]);
        assert_eq!(rho.var_p(1), sigma[(3, 3)]);
        assert_eq!(rho.cov_xp(1), sigma[(1, 3)]);
        assert_eq!(rho.xp_block()[(0, 1)], sigma[(0, 3)]);
        assert_eq!(rho.pp_block()[(1, 1)], sigma[(3, 3)]);
        assert_eq!(rho.xx_block()[(1, 0)], sigma[(1, 0)]);
    }

    #[test]
    fn rejects_bad_hbar_and_mean() {
        let sigma = DMatrix::identity(2, 2);
        assert!(GaussianMixedState::centered(sigma.clone(), 0.0).is_err());
        assert!(matches!(
            GaussianMixedState::new(sigma, DVector::zeros(3), 1.0),
            Err(Error::Dimension(_))
        ));
    }
}
