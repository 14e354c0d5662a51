//! Linear algebra of the real symplectic group `Sp(2n, R)`.
//!
//! Everything here is written against the standard form
//! `J = [[0, I], [-I, 0]]` acting on `z = (x_1..x_n, p_1..p_n)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::linalg::{self, max_abs, Complex64, SymEigen};
use crate::rng;
use crate::tolerance::{self, Tolerances};

/// Number of modes `n`; phase space has dimension `2n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhaseDim(usize);

impl PhaseDim {
    pub fn new(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::Dimension("number of modes must be at least 1".into()));
        }
        Ok(Self(modes))
    }

    pub fn of_matrix(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(linalg::ensure_phase_square(m)?)
    }

    pub fn modes(self) -> usize {
        self.0
    }

    pub fn size(self) -> usize {
        2 * self.0
    }

    /// Row/column of `x_j` (0-based mode index).
    pub fn x(self, mode: usize) -> usize {
        debug_assert!(mode < self.0);
        mode
    }

    /// Row/column of `p_j` (0-based mode index).
    pub fn p(self, mode: usize) -> usize {
        debug_assert!(mode < self.0);
        self.0 + mode
    }

    pub fn check_mode(self, mode: usize) -> Result<()> {
        if mode >= self.0 {
            return Err(Error::Dimension(format!(
                "mode index {mode} out of range for {} modes",
                self.0
            )));
        }
        Ok(())
    }

    /// The 2×2 `(x_j, p_j)` principal block of a `2n×2n` matrix.
    pub fn mode_block(self, m: &DMatrix<f64>, mode: usize) -> DMatrix<f64> {
        let idx = [self.x(mode), self.p(mode)];
        DMatrix::from_fn(2, 2, |a, b| m[(idx[a], idx[b])])
    }
}

/// The standard symplectic form `J = [[0, I], [-I, 0]]`.
pub fn standard_form(dim: PhaseDim) -> DMatrix<f64> {
    let n = dim.modes();
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(k, n + k)] = 1.0;
        j[(n + k, k)] = -1.0;
    }
    j
}

/// `‖SᵀJS − J‖_max`
pub fn symplectic_defect(s: &DMatrix<f64>) -> Result<f64> {
    let dim = PhaseDim::of_matrix(s)?;
    let j = standard_form(dim);
    Ok(max_abs(&(s.transpose() * &j * s - j)))
}

/// True iff `‖SᵀJS − J‖_max ≤ tol`.
pub fn is_symplectic(s: &DMatrix<f64>, tol: f64) -> Result<bool> {
    Ok(symplectic_defect(s)? <= tol)
}

/// A `2n×2n` real matrix with `SᵀJS = J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix(DMatrix<f64>);

impl SymplecticMatrix {
    /// Validates `‖SᵀJS − J‖_max ≤ tol·(1 + ‖S‖²_max)`.
    pub fn new(m: DMatrix<f64>, tol: f64) -> Result<Self> {
        linalg::ensure_finite(&m)?;
        let defect = symplectic_defect(&m)?;
        let scale = max_abs(&m);
        let allowed = tol * (1.0 + scale * scale);
        if defect > allowed {
            return Err(Error::Domain(format!(
                "matrix is not symplectic (‖SᵀJS − J‖ = {defect:.3e}, allowed {allowed:.3e})"
            )));
        }
        Ok(Self(m))
    }

    pub(crate) fn new_unchecked(m: DMatrix<f64>) -> Self {
        Self(m)
    }

    pub fn identity(dim: PhaseDim) -> Self {
        Self(DMatrix::identity(dim.size(), dim.size()))
    }

    pub fn dim(&self) -> PhaseDim {
        PhaseDim(self.0.nrows() / 2)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// `S⁻¹ = −J Sᵀ J`, exact for symplectic `S`.
    pub fn inverse(&self) -> Self {
        let j = standard_form(self.dim());
        Self(-(&j * self.0.transpose() * &j))
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> Self {
        Self(&self.0 * &other.0)
    }

    /// `SSᵀ`, the canonical representative of the ball image `S(B)`.
    pub fn gram(&self) -> DMatrix<f64> {
        linalg::symmetrize(&(&self.0 * self.0.transpose()))
    }
}

/// Symplectic matrix of the modified Fourier transform: `J` itself.
pub fn fourier(dim: PhaseDim) -> SymplecticMatrix {
    SymplecticMatrix(standard_form(dim))
}

/// Symplectic matrix of the chirp `exp(−i xᵀPx / 2ħ)`: `[[I, 0], [−P, I]]`.
pub fn chirp(p: &DMatrix<f64>) -> Result<SymplecticMatrix> {
    let p = linalg::check_symmetric(p, tolerance::SYMMETRY)?;
    let n = p.nrows();
    let mut s = DMatrix::identity(2 * n, 2 * n);
    s.view_mut((n, 0), (n, n)).copy_from(&(-p));
    Ok(SymplecticMatrix(s))
}

/// `[[I, P], [0, I]]`, i.e. a chirp conjugated by the Fourier matrix.
pub fn upper_chirp(p: &DMatrix<f64>) -> Result<SymplecticMatrix> {
    let p = linalg::check_symmetric(p, tolerance::SYMMETRY)?;
    let n = p.nrows();
    let mut s = DMatrix::identity(2 * n, 2 * n);
    s.view_mut((0, n), (n, n)).copy_from(&p);
    Ok(SymplecticMatrix(s))
}

/// Symplectic matrix of the dilation `ψ(x) ↦ √det L ψ(Lx)`: `[[L⁻¹, 0], [0, Lᵀ]]`.
pub fn dilation(l: &DMatrix<f64>) -> Result<SymplecticMatrix> {
    let n = linalg::ensure_square(l)?;
    let inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Domain("dilation matrix is singular".into()))?;
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    s.view_mut((0, 0), (n, n)).copy_from(&inv);
    s.view_mut((n, n), (n, n)).copy_from(&l.transpose());
    Ok(SymplecticMatrix(s))
}

/// Rotation by `angle` in every conjugate plane `(x_j, p_j)`; an element of `U(n)`.
pub fn mode_rotation(dim: PhaseDim, angle: f64) -> SymplecticMatrix {
    let n = dim.modes();
    let (s, c) = angle.sin_cos();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        m[(dim.x(k), dim.x(k))] = c;
        m[(dim.x(k), dim.p(k))] = s;
        m[(dim.p(k), dim.x(k))] = -s;
        m[(dim.p(k), dim.p(k))] = c;
    }
    SymplecticMatrix(m)
}

fn random_symmetric(rng: &mut rng::Rng, n: usize, amplitude: f64) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(-amplitude..=amplitude);
            p[(i, j)] = v;
            p[(j, i)] = v;
        }
    }
    p
}

/// `diag(e^u)·(I + E)` with `|u_i| ≤ scale/2` and `‖E‖_F ≤ 0.4·scale`, so
/// the factor stays invertible with bounded condition number.
fn random_dilation_matrix(rng: &mut rng::Rng, n: usize, scale: f64) -> DMatrix<f64> {
    let off = 0.4 * scale / n as f64;
    let mut l = DMatrix::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            l[(i, j)] += rng.random_range(-off..=off);
        }
    }
    for i in 0..n {
        let u: f64 = rng.random_range(-0.5 * scale..=0.5 * scale);
        let factor = u.exp();
        l.row_mut(i).scale_mut(factor);
    }
    l
}

#[derive(Clone, Copy)]
enum FactorSet {
    /// Fourier matrix, chirps and dilations with unit-size entries.
    Generators,
    /// Lower chirps, upper chirps and dilations with entries of size `scale`.
    NearIdentity(f64),
}

fn sample_product(dim: PhaseDim, seed: u64, n_factors: usize, set: FactorSet) -> Result<SymplecticMatrix> {
    if n_factors == 0 {
        return Err(Error::Domain("random_symplectic needs at least one factor".into()));
    }
    let n = dim.modes();
    let mut rng = rng::seeded(seed);
    let mut product = DMatrix::identity(2 * n, 2 * n);
    for _ in 0..n_factors {
        let kind = rng.random_range(0..3u8);
        let factor = match (set, kind) {
            (FactorSet::Generators, 0) => fourier(dim),
            (FactorSet::Generators, 1) => chirp(&random_symmetric(&mut rng, n, 1.0))?,
            (FactorSet::Generators, _) => dilation(&random_dilation_matrix(&mut rng, n, 1.0))?,
            (FactorSet::NearIdentity(scale), 0) => upper_chirp(&random_symmetric(&mut rng, n, scale))?,
            (FactorSet::NearIdentity(scale), 1) => chirp(&random_symmetric(&mut rng, n, scale))?,
            (FactorSet::NearIdentity(scale), _) => dilation(&random_dilation_matrix(&mut rng, n, scale))?,
        };
        product *= factor.into_inner();
    }
    let s = SymplecticMatrix::new(product, tolerance::SYMPLECTIC).map_err(|e| {
        Error::NumericalFailure(format!("sampled product lost symplecticity: {e}"))
    })?;
    Ok(s)
}

/// Product of `n_factors` random generator matrices (Fourier `J`, chirps
/// `[[I,0],[−P,I]]` with `P` entries in `[−1,1]`, dilations
/// `[[L⁻¹,0],[0,Lᵀ]]` with `L` close to a positive diagonal).
/// Deterministic for a fixed seed.
pub fn random_symplectic(dim: PhaseDim, seed: u64, n_factors: usize) -> Result<SymplecticMatrix> {
    sample_product(dim, seed, n_factors, FactorSet::Generators)
}

/// Like [`random_symplectic`] but every factor is within `O(scale)` of the
/// identity (the Fourier factor is replaced by upper chirps).
pub fn random_symplectic_near_identity(
    dim: PhaseDim,
    seed: u64,
    n_factors: usize,
    scale: f64,
) -> Result<SymplecticMatrix> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Domain(format!("scale must be positive, got {scale}")));
    }
    sample_product(dim, seed, n_factors, FactorSet::NearIdentity(scale))
}

/// Positive square root of a symmetric positive definite matrix.
pub fn spd_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let tol = Tolerances::default();
    Ok(linalg::spd_eigen(m, tol.symmetry, tol.max_condition)?.map(f64::sqrt))
}

/// Symplectic eigenvalues, sorted decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum(Vec<f64>);

impl SymplecticSpectrum {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Dimension("empty symplectic spectrum".into()));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Domain(format!("symplectic eigenvalues must be positive, got {bad}")));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// λ₁, the largest symplectic eigenvalue.
    pub fn max(&self) -> f64 {
        self.0[0]
    }

    pub fn min(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `diag(Λ, Λ)`
    pub fn diagonal(&self) -> DMatrix<f64> {
        let doubled: Vec<f64> = self.0.iter().chain(self.0.iter()).copied().collect();
        DMatrix::from_diagonal(&DVector::from_vec(doubled))
    }
}

/// Orthogonal `Q` with `QᵀAQ = [[0, Λ], [−Λ, 0]]` for an invertible
/// skew-symmetric `A`, with `Λ` positive and decreasing.
///
/// Pairs are extracted one at a time: `u` is the top eigenvector of `AᵀA`
/// restricted to the orthogonal complement of the pairs found so far, and
/// `v = −Au/|Au|`, which makes `uᵀAv = |Au| > 0`.
pub(crate) fn skew_normal_form(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let size = a.nrows();
    let n = size / 2;
    let gram = linalg::symmetrize(&(a.transpose() * a));
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(size);
    let mut us = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(n);

    let project_out = |w: &mut DVector<f64>, basis: &[DVector<f64>]| {
        for _ in 0..2 {
            for b in basis {
                let c = b.dot(w);
                w.axpy(-c, b, 1.0);
            }
        }
    };

    for _ in 0..n {
        let mut projector = DMatrix::identity(size, size);
        for b in &basis {
            projector -= b * b.transpose();
        }
        let deflated = &projector * &gram * &projector;
        let eig = SymEigen::new(&deflated);
        let mut u = eig.vectors.column(size - 1).into_owned();
        project_out(&mut u, &basis);
        let norm = u.norm();
        if norm < 0.5 {
            return Err(Error::NumericalFailure("skew normal form lost orthogonality".into()));
        }
        u /= norm;
        // deterministic sign: largest component positive
        let pivot = u.iamax();
        if u[pivot] < 0.0 {
            u = -u;
        }
        let au = a * &u;
        let mut v = -au;
        basis.push(u.clone());
        project_out(&mut v, &basis);
        let vnorm = v.norm();
        if vnorm <= f64::MIN_POSITIVE {
            return Err(Error::NumericalFailure("skew-symmetric matrix is singular".into()));
        }
        v /= vnorm;
        basis.push(v.clone());
        us.push(u);
        vs.push(v);
    }

    let mut pairs: Vec<(f64, DVector<f64>, DVector<f64>)> = us
        .into_iter()
        .zip(vs)
        .map(|(u, v)| ((a * &v).dot(&u), u, v))
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));

    let columns: Vec<DVector<f64>> = pairs
        .iter()
        .map(|p| p.1.clone())
        .chain(pairs.iter().map(|p| p.2.clone()))
        .collect();
    let q = DMatrix::from_columns(&columns);
    let lambdas = pairs.into_iter().map(|p| p.0).collect();
    Ok((q, lambdas))
}

/// `(M^{1/2}, M^{-1/2}, A = M^{1/2} J M^{1/2})`
fn sqrt_and_skew(m: &DMatrix<f64>, tol: &Tolerances) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let dim = PhaseDim::of_matrix(m)?;
    let eig = linalg::spd_eigen(m, tol.symmetry, tol.max_condition)?;
    let k = eig.map(f64::sqrt);
    let k_inv = eig.map(|v| 1.0 / v.sqrt());
    let j = standard_form(dim);
    let a = &k * j * &k;
    let a = (&a - a.transpose()) * 0.5;
    Ok((k, k_inv, a))
}

/// The `n` positive numbers `λ_j` with `±iλ_j` the eigenvalues of `JM`,
/// computed from the skew normal form of `M^{1/2} J M^{1/2}`.
pub fn symplectic_spectrum(m: &DMatrix<f64>) -> Result<SymplecticSpectrum> {
    symplectic_spectrum_with(m, &Tolerances::default())
}

pub fn symplectic_spectrum_with(m: &DMatrix<f64>, tol: &Tolerances) -> Result<SymplecticSpectrum> {
    let (_, _, a) = sqrt_and_skew(m, tol)?;
    let (_, lambdas) = skew_normal_form(&a)?;
    SymplecticSpectrum::new(lambdas)
}

/// Independent route to the symplectic spectrum: imaginary parts of the
/// eigenvalues of the non-symmetric matrix `JM` (real Schur form).
pub fn spectrum_from_jm(m: &DMatrix<f64>) -> Result<SymplecticSpectrum> {
    let tol = Tolerances::default();
    let dim = PhaseDim::of_matrix(m)?;
    linalg::spd_eigen(m, tol.symmetry, tol.max_condition)?;
    let jm = standard_form(dim) * m;
    let mut imag: Vec<f64> = jm.complex_eigenvalues().iter().map(|c| c.im.abs()).collect();
    if imag.len() != dim.size() {
        return Err(Error::NumericalFailure("eigenvalue solver did not converge".into()));
    }
    imag.sort_by(|a, b| b.total_cmp(a));
    let values = imag.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect();
    SymplecticSpectrum::new(values)
}

/// `(S, Λ)` with `S` symplectic and `SᵀMS = diag(Λ, Λ)`.
#[derive(Debug, Clone)]
pub struct WilliamsonDecomposition {
    pub s: SymplecticMatrix,
    pub spectrum: SymplecticSpectrum,
    /// `‖SᵀMS − diag(Λ,Λ)‖_max`
    pub diagonal_residual: f64,
    /// `‖SᵀJS − J‖_max`
    pub symplectic_residual: f64,
}

impl WilliamsonDecomposition {
    pub fn diagonal(&self) -> DMatrix<f64> {
        self.spectrum.diagonal()
    }
}

/// Fixes the `U(n)` freedom of a Williamson matrix: within each group of
/// equal symplectic eigenvalues, right-multiplies `S` by the unitary
/// `[[A, −B], [B, A]]` that maximizes the trace of the group's diagonal
/// block (a complex Procrustes problem). For `M = I` this returns `S = I`.
fn canonical_rotation(s: DMatrix<f64>, lambdas: &[f64]) -> DMatrix<f64> {
    let n = lambdas.len();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (k, l) in lambdas.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if (lambdas[g[0]] - l).abs() <= 1e-10 * l => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    let mut rotation = DMatrix::<f64>::identity(2 * n, 2 * n);
    for g in &groups {
        let k = g.len();
        let at = |i: usize| if i < k { g[i] } else { n + g[i - k] };
        let c = DMatrix::from_fn(2 * k, 2 * k, |r, col| s[(at(r), at(col))]);
        let z = DMatrix::from_fn(k, k, |r, col| {
            Complex64::new(c[(r, col)] + c[(k + r, k + col)], c[(k + r, col)] - c[(r, k + col)])
        });
        let svd = z.svd(true, true);
        let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else { continue };
        let w = v_t.adjoint() * u.adjoint();
        for r in 0..k {
            for col in 0..k {
                let (re, im) = (w[(r, col)].re, w[(r, col)].im);
                rotation[(at(r), at(col))] = re;
                rotation[(at(k + r), at(k + col))] = re;
                rotation[(at(r), at(k + col))] = -im;
                rotation[(at(k + r), at(col))] = im;
            }
        }
    }
    s * rotation
}

/// Williamson diagonalization of a symmetric positive definite `M`.
///
/// With `K = M^{1/2}` and `Q` bringing `A = KJK` to skew normal form
/// `[[0, Λ], [−Λ, 0]]`, the matrix `S = K⁻¹ Q diag(Λ^{1/2}, Λ^{1/2})` is
/// symplectic and `SᵀMS = diag(Λ, Λ)`. Within a degenerate block `S` is only
/// defined up to a symplectic rotation; `SSᵀ` is not.
pub fn williamson(m: &DMatrix<f64>) -> Result<WilliamsonDecomposition> {
    williamson_with(m, &Tolerances::default())
}

pub fn williamson_with(m: &DMatrix<f64>, tol: &Tolerances) -> Result<WilliamsonDecomposition> {
    let dim = PhaseDim::of_matrix(m)?;
    let (_, k_inv, a) = sqrt_and_skew(m, tol)?;
    let (q, lambdas) = skew_normal_form(&a)?;
    let spectrum = SymplecticSpectrum::new(lambdas)?;
    let root: Vec<f64> = spectrum.values().iter().map(|v| v.sqrt()).collect();
    let root = DVector::from_iterator(dim.size(), root.iter().chain(root.iter()).copied());
    let s = canonical_rotation(k_inv * q * DMatrix::from_diagonal(&root), spectrum.values());

    let m_sym = linalg::symmetrize(m);
    let diagonal_residual = max_abs(&(s.transpose() * &m_sym * &s - spectrum.diagonal()));
    let symplectic_residual = symplectic_defect(&s)?;
    let scale = max_abs(&s);
    if diagonal_residual > tol.williamson * max_abs(&m_sym)
        || symplectic_residual > tol.williamson * (1.0 + scale * scale)
    {
        return Err(Error::NumericalFailure(format!(
            "Williamson verification failed (diagonal residual {diagonal_residual:.3e}, symplectic residual {symplectic_residual:.3e})"
        )));
    }
    Ok(WilliamsonDecomposition {
        s: SymplecticMatrix::new_unchecked(s),
        spectrum,
        diagonal_residual,
        symplectic_residual,
    })
}

/// Symplectic capacity `πħ/λ₁` of the ellipsoid `zᵀMz ≤ ħ`.
pub fn symplectic_capacity(m: &DMatrix<f64>, hbar: f64) -> Result<f64> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::Domain(format!("ħ must be positive, got {hbar}")));
    }
    Ok(PI * hbar / symplectic_spectrum(m)?.max())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn diag(values: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_row_slice(values))
    }

    #[test]
    fn standard_form_layout() {
        let j1 = standard_form(PhaseDim::new(1).unwrap());
        assert_eq!(j1, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let j2 = standard_form(PhaseDim::new(2).unwrap());
        assert_eq!(j2.view((0, 2), (2, 2)), DMatrix::<f64>::identity(2, 2));
        assert_eq!(j2.view((2, 0), (2, 2)), -DMatrix::<f64>::identity(2, 2));
        assert_eq!(j2.view((0, 0), (2, 2)), DMatrix::<f64>::zeros(2, 2));
        let j3 = standard_form(PhaseDim::new(3).unwrap());
        assert_eq!(&j3 * &j3, -DMatrix::<f64>::identity(6, 6));
        assert_eq!(j3.transpose(), -j3);
    }

    #[test]
    fn zero_modes_rejected() {
        assert!(matches!(PhaseDim::new(0), Err(Error::Dimension(_))));
    }

    #[test]
    fn is_symplectic_examples() {
        assert!(is_symplectic(&DMatrix::identity(4, 4), 1e-12).unwrap());
        assert!(is_symplectic(&diag(&[2.0, 0.5]), 1e-12).unwrap());
        assert!(!is_symplectic(&diag(&[2.0, 2.0]), 1e-12).unwrap());
        assert!(matches!(
            is_symplectic(&DMatrix::identity(3, 3), 1e-12),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn zero_chirp_is_identity() {
        let s = chirp(&DMatrix::zeros(3, 3)).unwrap();
        assert_eq!(s.matrix(), &DMatrix::<f64>::identity(6, 6));
    }

    #[test]
    fn upper_chirp_is_fourier_conjugate_of_chirp() {
        let dim = PhaseDim::new(2).unwrap();
        let p = DMatrix::from_row_slice(2, 2, &[0.3, -0.2, -0.2, 0.7]);
        let j = fourier(dim);
        let conj = j.compose(&chirp(&p).unwrap()).compose(&j.inverse());
        assert!(max_abs(&(conj.matrix() - upper_chirp(&p).unwrap().matrix())) < 1e-15);
    }

    #[test]
    fn random_symplectic_requires_a_factor() {
        let dim = PhaseDim::new(2).unwrap();
        assert!(random_symplectic(dim, 1, 0).is_err());
    }

    #[test]
    fn random_symplectic_is_deterministic_and_symplectic() {
        for n in 1..=5 {
            let dim = PhaseDim::new(n).unwrap();
            for seed in 0..10 {
                let a = random_symplectic(dim, seed, 8).unwrap();
                let b = random_symplectic(dim, seed, 8).unwrap();
                assert_eq!(a, b);
                assert!(symplectic_defect(a.matrix()).unwrap() <= 1e-10);
            }
        }
    }

    #[test]
    fn inverse_is_exact() {
        let dim = PhaseDim::new(3).unwrap();
        let s = random_symplectic(dim, 3, 6).unwrap();
        let prod = s.matrix() * s.inverse().matrix();
        assert!(max_abs(&(prod - DMatrix::<f64>::identity(6, 6))) < 1e-10);
    }

    #[test]
    fn spd_sqrt_examples() {
        assert_eq!(spd_sqrt(&DMatrix::identity(2, 2)).unwrap(), DMatrix::<f64>::identity(2, 2));
        let k = spd_sqrt(&diag(&[4.0, 9.0])).unwrap();
        assert!(max_abs(&(k - diag(&[2.0, 3.0]))) < 1e-14);
        let mut rng = rng::seeded(11);
        for n in 1..=6 {
            let m = fixtures::random_spd(&mut rng, 2 * n, 0.1, 10.0);
            let k = spd_sqrt(&m).unwrap();
            assert!(max_abs(&(&k * &k - &m)) <= 1e-10 * max_abs(&m));
        }
        assert!(matches!(spd_sqrt(&diag(&[1.0, -1.0])), Err(Error::NotSpd { .. })));
    }

    #[test]
    fn spectrum_examples() {
        let s = symplectic_spectrum(&DMatrix::identity(6, 6)).unwrap();
        assert!(s.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
        let (a, b) = (4.0_f64, 9.0_f64);
        let s = symplectic_spectrum(&diag(&[a, b])).unwrap();
        assert!((s.max() - (a * b).sqrt()).abs() < 1e-13);

        let mut rng = rng::seeded(5);
        let m = fixtures::random_spd(&mut rng, 4, 0.2, 5.0);
        let base = symplectic_spectrum(&m).unwrap();
        let scaled = symplectic_spectrum(&(&m * 3.0)).unwrap();
        for (x, y) in base.values().iter().zip(scaled.values()) {
            assert!((3.0 * x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_of_diagonal_modes_is_geometric_mean() {
        // M = diag(1, 1/2, 1, 1/4): modes (1,1) and (1/2,1/4)
        let s = symplectic_spectrum(&diag(&[1.0, 0.5, 1.0, 0.25])).unwrap();
        assert!((s.values()[0] - 1.0).abs() < 1e-14);
        assert!((s.values()[1] - (0.125_f64).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn williamson_identity() {
        let w = williamson(&DMatrix::identity(4, 4)).unwrap();
        assert!(w.spectrum.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
        assert!(max_abs(&(w.s.gram() - DMatrix::<f64>::identity(4, 4))) < 1e-14);
        assert!(max_abs(&(w.s.matrix() - DMatrix::<f64>::identity(4, 4))) < 1e-14);
    }

    #[test]
    fn williamson_one_mode_closed_form() {
        let (a, b) = (4.0_f64, 9.0_f64);
        let m = diag(&[a, b]);
        let w = williamson(&m).unwrap();
        let lambda = (a * b).sqrt();
        assert!((w.spectrum.max() - lambda).abs() < 1e-13);
        let sms = w.s.matrix().transpose() * &m * w.s.matrix();
        assert!(max_abs(&(sms - DMatrix::identity(2, 2) * lambda)) < 1e-12);
        // unique up to rotation: SSᵀ = diag((b/a)^{1/2}, (a/b)^{1/2})
        let expected = diag(&[(b / a).sqrt(), (a / b).sqrt()]);
        assert!(max_abs(&(w.s.gram() - expected)) < 1e-13);
        // the rotation freedom is fixed, leaving the diagonal factor
        assert!(max_abs(&(w.s.matrix() - diag(&[(lambda / a).sqrt(), (lambda / b).sqrt()]))) < 1e-13);
    }

    #[test]
    fn williamson_random_spd() {
        let mut rng = rng::seeded(21);
        for n in 1..=6 {
            for _ in 0..5 {
                let m = fixtures::random_spd(&mut rng, 2 * n, 0.1, 10.0);
                let w = williamson(&m).unwrap();
                assert!(w.diagonal_residual <= 1e-8 * max_abs(&m));
                assert!(w.symplectic_residual <= 1e-10);
                let values = w.spectrum.values();
                assert!(values.windows(2).all(|p| p[0] >= p[1]));
            }
        }
    }

    #[test]
    fn williamson_degenerate_spectrum() {
        let dim = PhaseDim::new(3).unwrap();
        let t = random_symplectic(dim, 8, 5).unwrap();
        // Sp-congruent to 2·I: all symplectic eigenvalues equal 2
        let m = t.matrix().transpose() * t.matrix() * 2.0;
        let w = williamson(&m).unwrap();
        assert!(w.spectrum.values().iter().all(|v| (v - 2.0).abs() < 1e-9));
        assert!(w.diagonal_residual <= 1e-8 * max_abs(&m));
    }

    #[test]
    fn two_spectrum_routes_agree() {
        let mut rng = rng::seeded(99);
        for n in 1..=6 {
            let m = fixtures::random_spd(&mut rng, 2 * n, 0.1, 10.0);
            let a = symplectic_spectrum(&m).unwrap();
            let b = spectrum_from_jm(&m).unwrap();
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() < 1e-9, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn capacity_examples() {
        let c = symplectic_capacity(&DMatrix::identity(2, 2), 1.0).unwrap();
        assert!((c - PI).abs() < 1e-14);
        let c = symplectic_capacity(&diag(&[4.0, 9.0]), 1.0).unwrap();
        assert!((c - PI / 6.0).abs() < 1e-13);
        let mut rng = rng::seeded(4);
        let m = fixtures::random_spd(&mut rng, 4, 0.3, 3.0);
        let s = random_symplectic(PhaseDim::new(2).unwrap(), 17, 6).unwrap();
        let moved = s.matrix().transpose() * &m * s.matrix();
        let c0 = symplectic_capacity(&m, 1.0).unwrap();
        let c1 = symplectic_capacity(&moved, 1.0).unwrap();
        assert!((c0 - c1).abs() < 1e-9 * c0);
    }

    #[test]
    fn not_spd_errors() {
        let m = diag(&[1.0, 0.0]);
        assert!(matches!(symplectic_spectrum(&m), Err(Error::NotSpd { .. })));
        assert!(matches!(williamson(&m), Err(Error::NotSpd { .. })));
        assert!(matches!(symplectic_capacity(&m, 1.0), Err(Error::NotSpd { .. })));
    }
}
