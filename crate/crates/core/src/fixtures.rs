//! Seeded generators of inputs for tests and batch experiments.
//!
//! Partially saturated states are built as `Σ = T (Σ_sat ⊕ Σ_rest) Tᵀ`
//! where `Σ_sat` is a 2×2 block with determinant `ħ²/4`, `Σ_rest` is a
//! strictly mixed covariance matrix of the other modes, and `T` acts on the
//! saturated mode and on the remaining modes separately.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::gaussian::GaussianMixedState;
use crate::rng::{self, Rng};
use crate::symplectic::{random_symplectic, PhaseDim, SymplecticMatrix};

/// Haar-ish random orthogonal matrix from the QR factorization of a
/// Gaussian matrix (signs fixed by the diagonal of R).
pub fn random_orthogonal(rng: &mut Rng, size: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(size, size, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..size {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    q
}

/// Random SPD matrix with eigenvalues log-uniform in `[lo, hi]`.
pub fn random_spd(rng: &mut Rng, size: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let q = random_orthogonal(rng, size);
    let (a, b) = (lo.ln(), hi.ln());
    let values = DVector::from_fn(size, |_, _| rng.random_range(a..=b).exp());
    let m = &q * DMatrix::from_diagonal(&values) * q.transpose();
    (&m + m.transpose()) * 0.5
}

/// Places a `2k×2k` matrix written in the ordering of `modes` into a
/// `2n×2n` matrix, leaving all other entries zero.
pub fn scatter_modes(block: &DMatrix<f64>, modes: &[usize], dim: PhaseDim) -> DMatrix<f64> {
    let k = modes.len();
    assert_eq!(block.nrows(), 2 * k);
    let index = |a: usize| if a < k { dim.x(modes[a]) } else { dim.p(modes[a - k]) };
    let mut out = DMatrix::zeros(dim.size(), dim.size());
    for a in 0..2 * k {
        for b in 0..2 * k {
            out[(index(a), index(b))] = block[(a, b)];
        }
    }
    out
}

/// Direct sum of a one-mode matrix at `mode` and an `(n−1)`-mode matrix on
/// the remaining modes (in increasing order).
pub fn direct_sum_at(one_mode: &DMatrix<f64>, rest: &DMatrix<f64>, mode: usize, dim: PhaseDim) -> DMatrix<f64> {
    let others: Vec<usize> = (0..dim.modes()).filter(|&k| k != mode).collect();
    let mut out = scatter_modes(one_mode, &[mode], dim);
    if !others.is_empty() {
        out += scatter_modes(rest, &others, dim);
    }
    out
}

/// Random 2×2 matrix with determinant one.
pub fn random_sl2(rng: &mut Rng) -> DMatrix<f64> {
    let a: f64 = rng.random_range(-0.7_f64..=0.7).exp();
    let c: f64 = rng.random_range(-1.0..=1.0);
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let (s, co) = theta.sin_cos();
    let rot = DMatrix::from_row_slice(2, 2, &[co, s, -s, co]);
    DMatrix::from_row_slice(2, 2, &[a, 0.0, c, 1.0 / a]) * rot
}

/// `(ħ/2)·T diag(ν, ν) Tᵀ` with random symplectic `T` and the given
/// symplectic eigenvalues `ν` (in units of `ħ/2`).
pub fn covariance_with_spectrum(seed: u64, nu: &[f64], hbar: f64) -> Result<DMatrix<f64>> {
    let dim = PhaseDim::new(nu.len())?;
    let t = random_symplectic(dim, seed, 4)?;
    let doubled: Vec<f64> = nu.iter().chain(nu.iter()).copied().collect();
    let d = DMatrix::from_diagonal(&DVector::from_vec(doubled));
    let sigma = t.matrix() * d * t.matrix().transpose() * (0.5 * hbar);
    Ok((&sigma + sigma.transpose()) * 0.5)
}

/// A partially saturated mixed state together with its saturated mode.
#[derive(Debug, Clone)]
pub struct SaturatedFixture {
    pub state: GaussianMixedState,
    pub mode: usize,
    /// Symplectic eigenvalues of the non-saturated modes, in units of `ħ/2`.
    pub rest_spectrum: Vec<f64>,
}

/// Partially saturated fixture: RS saturated at `mode`, other modes strictly
/// mixed with symplectic eigenvalues in `[1.2, 3]·ħ/2`.
pub fn saturated_fixture(seed: u64, modes: usize, mode: usize, hbar: f64) -> Result<SaturatedFixture> {
    let dim = PhaseDim::new(modes)?;
    dim.check_mode(mode)?;
    let mut rng = rng::seeded(seed);
    let s1 = random_sl2(&mut rng);
    let sat = &s1 * s1.transpose() * (0.5 * hbar);
    let rest_spectrum: Vec<f64> = (1..modes).map(|_| rng.random_range(1.2..=3.0)).collect();
    let rest = if modes > 1 {
        covariance_with_spectrum(rng::split_seed(seed, 1), &rest_spectrum, hbar)?
    } else {
        DMatrix::zeros(0, 0)
    };
    let sigma = direct_sum_at(&sat, &rest, mode, dim);
    Ok(SaturatedFixture {
        state: GaussianMixedState::centered(sigma, hbar)?,
        mode,
        rest_spectrum,
    })
}

/// Covariance matrix whose largest symplectic eigenvalue of
/// `M = (ħ/2)Σ⁻¹` is `lambda1` (so the capacity is `πħ/lambda1`).
pub fn slack_fixture(seed: u64, modes: usize, lambda1: f64, hbar: f64) -> Result<GaussianMixedState> {
    let mut rng = rng::seeded(seed);
    // Σ symplectic eigenvalues ν·ħ/2 with ν = 1/λ, smallest at 1/lambda1
    let mut nu = vec![1.0 / lambda1];
    nu.extend((1..modes).map(|_| rng.random_range(1.0..=2.0) / lambda1));
    let sigma = covariance_with_spectrum(rng::split_seed(seed, 2), &nu, hbar)?;
    GaussianMixedState::centered(sigma, hbar)
}

/// Symplectic matrix acting as `T_j ⊕ T_rest` with `T_j` on `mode` only.
pub fn mode_preserving_symplectic(seed: u64, modes: usize, mode: usize, act_on_mode: bool) -> Result<SymplecticMatrix> {
    let dim = PhaseDim::new(modes)?;
    let mut rng = rng::seeded(seed);
    let one = if act_on_mode {
        random_sl2(&mut rng)
    } else {
        DMatrix::identity(2, 2)
    };
    let rest = if modes > 1 {
        random_symplectic(PhaseDim::new(modes - 1)?, rng::split_seed(seed, 3), 4)?.into_inner()
    } else {
        DMatrix::zeros(0, 0)
    };
    SymplecticMatrix::new(direct_sum_at(&one, &rest, mode, dim), 1e-10)
}
