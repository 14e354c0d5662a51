//! Pure Gaussian state determined by a saturated Robertson–Schrödinger pair.
//!
//! If `Σ` satisfies the quantum condition and the RS inequality of mode `j`
//! is an equality, the largest symplectic eigenvalue of `M = (ħ/2)Σ⁻¹` is
//! one, so the covariance ellipsoid `Ω: zᵀMz ≤ ħ` has capacity `πħ` and
//! contains the quantum blob `S(B_√ħ)` given by a Williamson diagonalizer
//! `S` of `M`. The pure state with Wigner matrix `G = (SSᵀ)⁻¹` has the same
//! `(x_j, p_j)` covariance block as `ρ`, and `Σ_ψ = (ħ/2)SSᵀ ⪯ Σ_ρ`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::{self, GaussianMixedState, PureGaussian, WignerGaussian};
use crate::linalg::{self, max_abs, Complex64, SymEigen};
use crate::rng;
use crate::symplectic::{self, standard_form, PhaseDim, SymplecticMatrix, SymplecticSpectrum};
use crate::tolerance::{self, Tolerances};

/// Symplectic ball `S(B_√ħ)`, canonically represented by `SSᵀ`.
#[derive(Debug, Clone)]
pub struct QuantumBlob {
    s: SymplecticMatrix,
    canonical: DMatrix<f64>,
    hbar: f64,
}

impl QuantumBlob {
    pub fn new(s: SymplecticMatrix, hbar: f64) -> Self {
        let canonical = s.gram();
        Self { s, canonical, hbar }
    }

    pub fn s(&self) -> &SymplecticMatrix {
        &self.s
    }

    /// `SSᵀ`; identical for all `S·U` with `U ∈ U(n)`.
    pub fn canonical(&self) -> &DMatrix<f64> {
        &self.canonical
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// `(SSᵀ)⁻¹ = Jᵀ(SSᵀ)J`; the blob is `{z : zᵀ(SSᵀ)⁻¹z ≤ ħ}`.
    pub fn quadratic_form(&self) -> DMatrix<f64> {
        let j = standard_form(self.s.dim());
        linalg::symmetrize(&(j.transpose() * &self.canonical * j))
    }

    /// Covariance matrix `(ħ/2)SSᵀ` of the pure state attached to the blob.
    pub fn covariance(&self) -> DMatrix<f64> {
        &self.canonical * (0.5 * self.hbar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityCheck {
    pub lambda1: f64,
    pub capacity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub lambda1: f64,
    pub capacity: f64,
    /// `‖B_j(Σ_ψ) − B_j(Σ_ρ)‖_max` for the 2×2 block of the saturated mode.
    pub block_mismatch: f64,
    /// Smallest eigenvalue of `G_ψ − M`.
    pub domination_min_eig: f64,
    pub tol: f64,
}

#[derive(Debug, Clone)]
pub struct PurificationResult {
    pub psi: PureGaussian,
    pub blob: QuantumBlob,
    pub saturated_mode: usize,
    pub diagnostics: Diagnostics,
}

impl PurificationResult {
    pub fn covariance(&self) -> DMatrix<f64> {
        self.blob.covariance()
    }
}

/// Checks that RS saturation at `mode` forces `λ₁(M) = 1`, i.e. `c(Ω) = πħ`.
pub fn check_saturation_implies_capacity(rho: &GaussianMixedState, mode: usize, tol: f64) -> Result<CapacityCheck> {
    rho.dim().check_mode(mode)?;
    if !gaussian::quantum_condition(rho, tol)? {
        let margin = gaussian::quantum_margin(rho.sigma(), rho.hbar())?;
        return Err(Error::InvalidState(format!(
            "Σ + (iħ/2)J has a negative eigenvalue {margin:.6e}"
        )));
    }
    let report = gaussian::rs_report(rho, tol);
    let entry = report.entries[mode];
    if !entry.saturated {
        return Err(Error::NotSaturated { mode, slack: entry.slack, allowed: tol * entry.rhs });
    }
    let lambda1 = symplectic::symplectic_spectrum(&rho.m_matrix()?)?.max();
    let capacity = PI * rho.hbar() / lambda1;
    if (lambda1 - 1.0).abs() > tol {
        return Err(Error::Inconsistency(format!(
            "mode {mode} is saturated but λ₁(M) = {lambda1:.12} ≠ 1"
        )));
    }
    Ok(CapacityCheck { lambda1, capacity })
}

/// `{λ_j⁻¹ + 1, λ_j⁻¹ − 1}` for each `j`, the eigenvalues of `D⁻¹ + iJ`.
pub fn eigenvalues_of_dinv_plus_ij(spectrum: &SymplecticSpectrum) -> Vec<f64> {
    spectrum
        .values()
        .iter()
        .flat_map(|&l| [1.0 / l + 1.0, 1.0 / l - 1.0])
        .collect()
}

/// The Hermitian matrix `diag(Λ⁻¹, Λ⁻¹) + iJ`.
pub fn dinv_plus_ij(spectrum: &SymplecticSpectrum) -> DMatrix<Complex64> {
    let inv: Vec<f64> = spectrum.values().iter().map(|l| 1.0 / l).collect();
    let dim = PhaseDim::new(inv.len()).expect("spectrum is non-empty");
    let re = DMatrix::from_diagonal(&DVector::from_iterator(
        dim.size(),
        inv.iter().chain(inv.iter()).copied(),
    ));
    linalg::complexify(&re, &standard_form(dim))
}

/// Direct Hermitian eigensolve of `diag(Λ⁻¹, Λ⁻¹) + iJ`, ascending.
pub fn dinv_plus_ij_eigenvalues(spectrum: &SymplecticSpectrum) -> Vec<f64> {
    linalg::hermitian_eigenvalues(&dinv_plus_ij(spectrum))
}

/// The blob `S(B_√ħ)` with `S` a Williamson diagonalizer of `M`. It lies in
/// `Ω` whenever `λ₁(M) ≤ 1`; no capacity check is made.
pub fn inscribed_blob(rho: &GaussianMixedState) -> Result<QuantumBlob> {
    let w = symplectic::williamson(&rho.m_matrix()?)?;
    Ok(QuantumBlob::new(w.s, rho.hbar()))
}

/// Smallest eigenvalue of `(SSᵀ)⁻¹ − M`; non-negative iff the blob fits in `Ω`.
pub fn inclusion_margin(blob: &QuantumBlob, m: &DMatrix<f64>) -> f64 {
    linalg::min_eigenvalue(&(blob.quadratic_form() - m))
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    SymEigen::new(m).values.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
}

/// Largest quantum blob of the covariance ellipsoid, for `c(Ω) = πħ`.
pub fn extract_blob(rho: &GaussianMixedState, tol: f64) -> Result<QuantumBlob> {
    let m = rho.m_matrix()?;
    let w = symplectic::williamson(&m)?;
    let capacity = PI * rho.hbar() / w.spectrum.max();
    let expected = PI * rho.hbar();
    if (capacity - expected).abs() > tol * expected {
        return Err(Error::Capacity { capacity, expected });
    }
    let blob = QuantumBlob::new(w.s, rho.hbar());
    let margin = inclusion_margin(&blob, &m);
    if margin < -tol * spectral_norm(&m) {
        return Err(Error::NumericalFailure(format!(
            "blob inclusion check failed (min eigenvalue {margin:.3e})"
        )));
    }
    Ok(blob)
}

/// Builds the pure Gaussian attached to the saturated mode `mode`.
pub fn purify(rho: &GaussianMixedState, mode: usize, tol: f64) -> Result<PurificationResult> {
    let cap = check_saturation_implies_capacity(rho, mode, tol)?;
    let blob = extract_blob(rho, tol)?;
    let dim = rho.dim();

    let g = blob.quadratic_form();
    let wigner = WignerGaussian::new(g.clone(), rho.mean().clone(), rho.hbar())?;
    let (_, psi) = gaussian::factor_g(&wigner, tol.max(tolerance::WILLIAMSON))?;

    let sigma_psi = blob.covariance();
    let block_rho = rho.mode_block(mode);
    let block_psi = dim.mode_block(&sigma_psi, mode);
    let block_mismatch = max_abs(&(&block_psi - &block_rho));
    if block_mismatch > tol * max_abs(&block_rho) {
        return Err(Error::Inconsistency(format!(
            "covariance block of mode {mode} differs by {block_mismatch:.3e}"
        )));
    }

    let m = rho.m_matrix()?;
    let domination_min_eig = linalg::min_eigenvalue(&(&g - &m));
    if domination_min_eig < -tol * spectral_norm(&m) {
        return Err(Error::Inconsistency(format!(
            "pure state is not dominated (min eigenvalue {domination_min_eig:.3e})"
        )));
    }

    Ok(PurificationResult {
        psi,
        blob,
        saturated_mode: mode,
        diagnostics: Diagnostics {
            lambda1: cap.lambda1,
            capacity: cap.capacity,
            block_mismatch,
            domination_min_eig,
            tol,
        },
    })
}

/// [`purify`] at the smallest saturated mode.
pub fn purify_first_saturated(rho: &GaussianMixedState, tol: f64) -> Result<PurificationResult> {
    let report = gaussian::rs_report(rho, tol);
    match report.saturated_modes().first() {
        Some(&mode) => purify(rho, mode, tol),
        None => {
            let (mode, entry) = report
                .entries
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.slack.abs().total_cmp(&b.1.slack.abs()))
                .expect("at least one mode");
            Err(Error::NotSaturated { mode, slack: entry.slack, allowed: tol * entry.rhs })
        }
    }
}

/// Smallest eigenvalue of `G_ψ − M`.
pub fn domination_margin(psi: &PureGaussian, rho: &GaussianMixedState) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::Domain("states have different numbers of modes".into()));
    }
    if (psi.hbar() - rho.hbar()).abs() > 1e-12 * rho.hbar() {
        return Err(Error::Domain(format!(
            "states use different ħ ({} vs {})",
            psi.hbar(),
            rho.hbar()
        )));
    }
    let scale = 1.0 + rho.mean().amax();
    if (psi.mean() - rho.mean()).amax() > 1e-12 * scale {
        return Err(Error::Domain("states have different means".into()));
    }
    let g = gaussian::wigner_of_pure(psi)?.g().clone();
    Ok(linalg::min_eigenvalue(&(g - rho.m_matrix()?)))
}

/// Exponent form of `Wψ ≤ Wρ`: `zᵀMz ≤ zᵀG_ψz` for all `z`, judged as
/// `G_ψ − M ⪰ −tol·‖M‖`. Equivalent to `Σ_ψ ⪯ Σ_ρ`.
pub fn dominates(psi: &PureGaussian, rho: &GaussianMixedState, tol: f64) -> Result<bool> {
    let margin = domination_margin(psi, rho)?;
    Ok(margin >= -tol * spectral_norm(&rho.m_matrix()?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlobComparison {
    /// `max(‖UᵀU − I‖, ‖UJ − JU‖)` for `U = S1⁻¹S2`.
    pub rotation_defect: f64,
    /// `‖S1S1ᵀ − S2S2ᵀ‖_max / max(1, ‖S1S1ᵀ‖_max)`
    pub canonical_distance: f64,
}

pub fn compare_blobs(s1: &SymplecticMatrix, s2: &SymplecticMatrix) -> Result<BlobComparison> {
    if s1.dim() != s2.dim() {
        return Err(Error::Dimension("symplectic matrices differ in size".into()));
    }
    let dim = s1.dim();
    let u = s1.inverse().compose(s2).into_inner();
    let j = standard_form(dim);
    let ortho = max_abs(&(u.transpose() * &u - DMatrix::identity(dim.size(), dim.size())));
    let commute = max_abs(&(&u * &j - &j * &u));
    let g1 = s1.gram();
    let canonical_distance = max_abs(&(&g1 - s2.gram())) / max_abs(&g1).max(1.0);
    Ok(BlobComparison { rotation_defect: ortho.max(commute), canonical_distance })
}

/// `S1(B) = S2(B)`: `S1⁻¹S2 ∈ U(n)`, cross-checked against `S1S1ᵀ = S2S2ᵀ`.
pub fn blobs_equal(s1: &SymplecticMatrix, s2: &SymplecticMatrix, tol: f64) -> Result<bool> {
    let c = compare_blobs(s1, s2)?;
    let by_rotation = c.rotation_defect <= tol;
    let by_canonical = c.canonical_distance <= tol;
    if by_rotation != by_canonical {
        return Err(Error::Inconsistency(format!(
            "blob tests disagree (rotation defect {:.3e}, canonical distance {:.3e})",
            c.rotation_defect, c.canonical_distance
        )));
    }
    Ok(by_rotation)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Relative inclusion tolerance: `λ_min((TTᵀ)⁻¹ − M) ≥ −tol·‖M‖`.
    pub inclusion_tol: f64,
    /// Relative distance above which `TTᵀ` counts as a different blob.
    pub distinct_tol: f64,
    /// Generator factors per candidate.
    pub factors: usize,
    /// Perturbation sizes are drawn log-uniformly from this range.
    pub min_scale: f64,
    pub max_scale: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { inclusion_tol: 1e-9, distinct_tol: 1e-6, factors: 3, min_scale: 1e-3, max_scale: 1.0 }
    }
}

/// A second blob `T(B_√ħ) ⊆ Ω` with `TTᵀ ≠ SSᵀ`.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub trial: usize,
    pub t: SymplecticMatrix,
    pub inclusion_margin: f64,
    pub distance: f64,
}

pub fn uniqueness_search(
    rho: &GaussianMixedState,
    blob: &QuantumBlob,
    trials: usize,
    seed: u64,
) -> Result<Option<Counterexample>> {
    uniqueness_search_with(rho, blob, trials, seed, &SearchConfig::default())
}

/// Randomized falsification of blob uniqueness. Candidates are
/// `T = S·V` with `V` a product of near-identity chirps and dilations of
/// random size; a candidate is reported when `T(B) ⊆ Ω` and `TTᵀ` differs
/// from `SSᵀ`. Trials run in parallel with per-trial seeds and the lowest
/// trial index wins, so the result is deterministic.
pub fn uniqueness_search_with(
    rho: &GaussianMixedState,
    blob: &QuantumBlob,
    trials: usize,
    seed: u64,
    config: &SearchConfig,
) -> Result<Option<Counterexample>> {
    let dim = rho.dim();
    if blob.s().dim() != dim {
        return Err(Error::Dimension("blob and state differ in size".into()));
    }
    let m = rho.m_matrix()?;
    let m_norm = spectral_norm(&m);
    let reference = blob.canonical();
    let ref_scale = max_abs(reference).max(1.0);
    let (lo, hi) = (config.min_scale.ln(), config.max_scale.ln());

    let outcomes: Vec<Result<Option<Counterexample>>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = rng::split_seed(seed, trial as u64);
            let mut r = rng::seeded(trial_seed);
            let scale = r.random_range(lo..=hi).exp();
            let v = symplectic::random_symplectic_near_identity(
                dim,
                rng::split_seed(trial_seed, 1),
                config.factors,
                scale,
            )?;
            let t = blob.s().compose(&v);
            let candidate = QuantumBlob::new(t.clone(), blob.hbar());
            let margin = inclusion_margin(&candidate, &m);
            if margin < -config.inclusion_tol * m_norm {
                return Ok(None);
            }
            let distance = max_abs(&(candidate.canonical() - reference)) / ref_scale;
            if distance <= config.distinct_tol {
                return Ok(None);
            }
            Ok(Some(Counterexample { trial, t, inclusion_margin: margin, distance }))
        })
        .collect();

    for outcome in outcomes {
        if let Some(found) = outcome? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

/// The ellipsoid `{z : ½zᵀQz ≤ 1}`.
#[derive(Debug, Clone)]
pub struct DualEllipsoid {
    q: DMatrix<f64>,
}

impl DualEllipsoid {
    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn contains(&self, z: &DVector<f64>) -> bool {
        0.5 * z.dot(&(&self.q * z)) <= 1.0
    }
}

/// Dual of `{½zᵀQz ≤ 1}`: `{½zᵀQ⁻¹z ≤ 1}`.
pub fn dual_ellipsoid(q: &DMatrix<f64>) -> Result<DualEllipsoid> {
    let tol = Tolerances::default();
    Ok(DualEllipsoid { q: linalg::spd_inverse(q, tol.symmetry, tol.max_condition)? })
}

/// Area of the central section of `{½zᵀAz ≤ 1}` by the `(x_j, p_j)` plane:
/// `2π / √det A_j` with `A_j` the 2×2 block of the mode.
pub fn section_area_of_form(a: &DMatrix<f64>, mode: usize) -> Result<f64> {
    let dim = PhaseDim::of_matrix(a)?;
    dim.check_mode(mode)?;
    let b = dim.mode_block(a, mode);
    let det = b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)];
    if !(det > 0.0 && b[(0, 0)] > 0.0) {
        return Err(Error::NotSpd { min_eigenvalue: SymEigen::new(&b).min() });
    }
    Ok(2.0 * PI / det.sqrt())
}

/// Section of `Ω* = {½zᵀΣz ≤ 1}` by the `(x_j, p_j)` plane. Equals `4π/ħ`
/// when the RS inequality of the mode is saturated.
pub fn dual_section_area(rho: &GaussianMixedState, mode: usize) -> Result<f64> {
    section_area_of_form(rho.sigma(), mode)
}

/// Section of `Ω = {½zᵀΣ⁻¹z ≤ 1}` itself by the `(x_j, p_j)` plane.
pub fn omega_section_area(rho: &GaussianMixedState, mode: usize) -> Result<f64> {
    section_area_of_form(rho.sigma_inverse(), mode)
}
