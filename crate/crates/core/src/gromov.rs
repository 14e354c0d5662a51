//! Central sections of linear symplectic balls `S(B_R)` by planes.
//!
//! The section of `{z : zᵀQz ≤ R²}`, `Q = (SSᵀ)⁻¹`, by the plane spanned by
//! orthonormal `u, v` is the ellipse `wᵀQ₂w ≤ R²` with
//! `Q₂ = [[uᵀQu, uᵀQv], [vᵀQu, vᵀQv]]`, of area `πR²/√det Q₂`.
//!
//! `S` maps the big disk `B_R ∩ S⁻¹(P)` onto the section and preserves the
//! symplectic form, so the symplectic area `σ(u,v)·area` of the section
//! equals `σ(a,b)·πR²`, where `(a, b)` is an oriented orthonormal basis of
//! the preimage plane `S⁻¹(P)`. Since `|σ(a,b)| ≤ 1`, a conjugate plane
//! (`σ(u,v) = 1`) cuts an area of at most `πR²`, with equality exactly when
//! `S⁻¹(P)` is itself a symplectic-unit plane (for example when `S` does
//! not couple mode `j` to the others).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, SymEigen};
use crate::rng;
use crate::symplectic::{standard_form, PhaseDim, SymplecticMatrix};

pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_NODES: usize = 10_000;
const SHARDS: usize = 16;

/// `S(B_R) + center`
#[derive(Debug, Clone)]
pub struct SymplecticBall {
    s: SymplecticMatrix,
    radius: f64,
    center: DVector<f64>,
}

impl SymplecticBall {
    pub fn new(s: SymplecticMatrix, radius: f64, center: DVector<f64>) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("radius must be positive, got {radius}")));
        }
        if center.len() != s.dim().size() {
            return Err(Error::Dimension("center has the wrong length".into()));
        }
        Ok(Self { s, radius, center })
    }

    pub fn centered(s: SymplecticMatrix, radius: f64) -> Result<Self> {
        let size = s.dim().size();
        Self::new(s, radius, DVector::zeros(size))
    }

    pub fn s(&self) -> &SymplecticMatrix {
        &self.s
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn dim(&self) -> PhaseDim {
        self.s.dim()
    }

    /// `Q = (SSᵀ)⁻¹ = S⁻ᵀS⁻¹`
    pub fn quadratic_form(&self) -> DMatrix<f64> {
        let inv = self.s.inverse();
        linalg::symmetrize(&(inv.matrix().transpose() * inv.matrix()))
    }
}

/// A plane through the center of the ball.
#[derive(Debug, Clone, PartialEq)]
pub enum PlaneSpec {
    /// `span(e_{x_j}, e_{p_j})`, 0-based mode.
    Conjugate(usize),
    /// `span(u, v)` with `u, v` orthonormal.
    Span(DVector<f64>, DVector<f64>),
}

impl PlaneSpec {
    pub fn basis(&self, dim: PhaseDim) -> Result<(DVector<f64>, DVector<f64>)> {
        match self {
            PlaneSpec::Conjugate(mode) => {
                dim.check_mode(*mode)?;
                let mut u = DVector::zeros(dim.size());
                let mut v = DVector::zeros(dim.size());
                u[dim.x(*mode)] = 1.0;
                v[dim.p(*mode)] = 1.0;
                Ok((u, v))
            }
            PlaneSpec::Span(u, v) => {
                if u.len() != dim.size() || v.len() != dim.size() {
                    return Err(Error::Dimension("plane vectors have the wrong length".into()));
                }
                let defect = (u.norm() - 1.0).abs().max((v.norm() - 1.0).abs()).max(u.dot(v).abs());
                if defect > 1e-10 {
                    return Err(Error::Domain(format!(
                        "plane basis is not orthonormal (defect {defect:.3e})"
                    )));
                }
                Ok((u.clone(), v.clone()))
            }
        }
    }
}

/// `σ(u, v) = uᵀJv`
pub fn symplectic_pairing(u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    let dim = PhaseDim::new(u.len() / 2).expect("even length");
    u.dot(&(standard_form(dim) * v))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionResult {
    pub area_closed_form: f64,
    pub area_sampled: f64,
    pub sampled_std_error: f64,
    pub samples: usize,
    pub symplectic_pairing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self { samples: DEFAULT_SAMPLES, seed: 0 }
    }
}

/// Restriction of the ball's quadratic form to the plane `span(u, v)`.
pub fn restricted_form(ball: &SymplecticBall, u: &DVector<f64>, v: &DVector<f64>) -> DMatrix<f64> {
    let q = ball.quadratic_form();
    let qu = &q * u;
    let qv = &q * v;
    let off = 0.5 * (u.dot(&qv) + v.dot(&qu));
    DMatrix::from_row_slice(2, 2, &[u.dot(&qu), off, off, v.dot(&qv)])
}

fn det2(m: &DMatrix<f64>) -> f64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

fn closed_form_area(q2: &DMatrix<f64>, radius: f64) -> Result<f64> {
    let det = det2(q2);
    if !(det > 0.0 && q2[(0, 0)] > 0.0) || !det.is_finite() {
        return Err(Error::NumericalFailure(format!(
            "degenerate section (det Q₂ = {det:.3e})"
        )));
    }
    Ok(PI * radius * radius / det.sqrt())
}

/// Rejection-sampling estimate of the area of `{w ∈ R² : wᵀQ₂w ≤ R²}`.
/// Returns `(area, standard error)`.
pub fn sample_ellipse_area(q2: &DMatrix<f64>, radius: f64, config: &SamplingConfig) -> Result<(f64, f64)> {
    if config.samples == 0 {
        return Err(Error::Domain("Monte-Carlo needs at least one sample".into()));
    }
    let det = det2(q2);
    if det.is_nan() || det <= 0.0 {
        return Err(Error::NumericalFailure(format!("degenerate section (det Q₂ = {det:.3e})")));
    }
    // bounding box half-widths from the inverse form
    let ha = radius * (q2[(1, 1)] / det).sqrt();
    let hb = radius * (q2[(0, 0)] / det).sqrt();
    let r2 = radius * radius;
    let (a, b, c) = (q2[(0, 0)], q2[(0, 1)], q2[(1, 1)]);

    let total = config.samples;
    let hits: usize = (0..SHARDS)
        .into_par_iter()
        .map(|shard| {
            let count = total / SHARDS + usize::from(shard < total % SHARDS);
            let mut r = rng::seeded(rng::split_seed(config.seed, shard as u64));
            (0..count)
                .filter(|_| {
                    let x: f64 = r.random_range(-ha..=ha);
                    let y: f64 = r.random_range(-hb..=hb);
                    a * x * x + 2.0 * b * x * y + c * y * y <= r2
                })
                .count()
        })
        .sum();
    let box_area = 4.0 * ha * hb;
    let p = hits as f64 / total as f64;
    let area = box_area * p;
    let std_error = box_area * (p * (1.0 - p) / total as f64).sqrt();
    Ok((area, std_error))
}

pub fn section_area(ball: &SymplecticBall, plane: &PlaneSpec) -> Result<SectionResult> {
    section_area_with(ball, plane, &SamplingConfig::default())
}

/// Closed-form and Monte-Carlo area of the central section by `plane`.
pub fn section_area_with(ball: &SymplecticBall, plane: &PlaneSpec, config: &SamplingConfig) -> Result<SectionResult> {
    let (u, v) = plane.basis(ball.dim())?;
    let q2 = restricted_form(ball, &u, &v);
    let area_closed_form = closed_form_area(&q2, ball.radius)?;
    let (area_sampled, sampled_std_error) = sample_ellipse_area(&q2, ball.radius, config)?;
    Ok(SectionResult {
        area_closed_form,
        area_sampled,
        sampled_std_error,
        samples: config.samples,
        symplectic_pairing: symplectic_pairing(&u, &v),
    })
}

/// `∮ p dx` over the boundary of `{(x, p) : (x,p) Q₂ (x,p)ᵀ ≤ R²}` by the
/// trapezoidal rule on `nodes` points. The curve is oriented positively for
/// `dp ∧ dx`, so the integral equals `+area`.
pub fn boundary_integral(q2: &DMatrix<f64>, radius: f64, nodes: usize) -> Result<f64> {
    if nodes < 3 {
        return Err(Error::Domain("boundary integral needs at least 3 nodes".into()));
    }
    let eig = SymEigen::new(q2);
    if eig.min() <= 0.0 {
        return Err(Error::NumericalFailure("degenerate section ellipse".into()));
    }
    let root = eig.map(|v| 1.0 / v.sqrt());
    let h = std::f64::consts::TAU / nodes as f64;
    let sum: f64 = (0..nodes)
        .map(|k| {
            let t = k as f64 * h;
            let (s, c) = t.sin_cos();
            // (x, p) = R·Q₂^{-1/2}·(sin t, cos t)
            let p = radius * (root[(1, 0)] * s + root[(1, 1)] * c);
            let dx = radius * (root[(0, 0)] * c - root[(0, 1)] * s);
            p * dx
        })
        .sum();
    Ok(sum * h)
}

/// Orthogonal projection of the ball onto the `(x_j, p_j)` plane:
/// `πR²·√det (SSᵀ)_j`.
pub fn projection_area(ball: &SymplecticBall, mode: usize) -> Result<f64> {
    let dim = ball.dim();
    dim.check_mode(mode)?;
    let block = dim.mode_block(&ball.s.gram(), mode);
    Ok(PI * ball.radius * ball.radius * det2(&block).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSection {
    pub mode: usize,
    pub area_closed_form: f64,
    pub boundary_integral: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropositionReport {
    pub radius: f64,
    /// `πR²`
    pub expected: f64,
    pub tol: f64,
    pub nodes: usize,
    pub sections: Vec<ModeSection>,
}

impl PropositionReport {
    pub fn max_relative_deviation(&self) -> f64 {
        self.sections
            .iter()
            .map(|s| (s.area_closed_form - self.expected).abs() / self.expected)
            .fold(0.0, f64::max)
    }

    pub fn max_boundary_deviation(&self) -> f64 {
        self.sections
            .iter()
            .map(|s| (s.boundary_integral - s.area_closed_form).abs() / s.area_closed_form)
            .fold(0.0, f64::max)
    }

    /// Every conjugate section has area `πR²` and every boundary integral
    /// matches its closed form, both within `tol` (relative).
    pub fn holds(&self) -> bool {
        self.max_relative_deviation() <= self.tol && self.max_boundary_deviation() <= self.tol
    }
}

/// Measures every conjugate-plane section of `S(B_R)` without asserting.
pub fn proposition_report(s: &SymplecticMatrix, radius: f64, tol: f64, nodes: usize) -> Result<PropositionReport> {
    let ball = SymplecticBall::centered(s.clone(), radius)?;
    let dim = ball.dim();
    let sections = (0..dim.modes())
        .map(|mode| {
            let (u, v) = PlaneSpec::Conjugate(mode).basis(dim)?;
            let q2 = restricted_form(&ball, &u, &v);
            Ok(ModeSection {
                mode,
                area_closed_form: closed_form_area(&q2, radius)?,
                boundary_integral: boundary_integral(&q2, radius, nodes)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PropositionReport { radius, expected: PI * radius * radius, tol, nodes, sections })
}

/// Asserts that every conjugate-plane section of `S(B_R)` has area `πR²`
/// and that the boundary integral `∮ p_j dx_j` reproduces it.
pub fn verify_proposition(s: &SymplecticMatrix, radius: f64, tol: f64, nodes: usize) -> Result<PropositionReport> {
    let report = proposition_report(s, radius, tol, nodes)?;
    for sec in &report.sections {
        let dev = (sec.area_closed_form - report.expected).abs() / report.expected;
        if dev > tol {
            return Err(Error::PropositionViolation(format!(
                "section of mode {} has area {:.12}, expected πR² = {:.12}",
                sec.mode, sec.area_closed_form, report.expected
            )));
        }
        let bdev = (sec.boundary_integral - sec.area_closed_form).abs() / sec.area_closed_form;
        if bdev > tol {
            return Err(Error::PropositionViolation(format!(
                "boundary integral {:.12} of mode {} disagrees with area {:.12}",
                sec.boundary_integral, sec.mode, sec.area_closed_form
            )));
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneSection {
    pub section: SectionResult,
    /// `σ(u′, v′)` for the orthonormalized basis.
    pub pairing: f64,
    pub euclidean_area: f64,
    /// `|σ(u′, v′)|·euclidean_area`
    pub symplectic_area: f64,
    /// `|σ(a, b)|·πR²` for an orthonormal basis `(a, b)` of `S⁻¹(P)`, when requested.
    pub preimage_symplectic_area: Option<f64>,
}

fn orthonormalize(u: &DVector<f64>, v: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
    let un = u.norm();
    if un <= f64::EPSILON {
        return Err(Error::Domain("plane vector is zero".into()));
    }
    let a = u / un;
    let w = v - &a * a.dot(v);
    let wn = w.norm();
    if wn <= 1e-12 * v.norm().max(1.0) {
        return Err(Error::Domain("plane vectors are parallel".into()));
    }
    Ok((a, w / wn))
}

/// Section of the ball by an arbitrary symplectic plane `span(u, v)`.
///
/// With `check_preimage`, also verifies that the section's symplectic area
/// equals that of the big disk `B_R ∩ S⁻¹(P)`.
pub fn symplectic_plane_section(
    ball: &SymplecticBall,
    u: &DVector<f64>,
    v: &DVector<f64>,
    tol: f64,
    check_preimage: bool,
) -> Result<PlaneSection> {
    let dim = ball.dim();
    if u.len() != dim.size() || v.len() != dim.size() {
        return Err(Error::Dimension("plane vectors have the wrong length".into()));
    }
    let (u1, v1) = orthonormalize(u, v)?;
    let pairing = symplectic_pairing(&u1, &v1);
    if pairing.abs() <= tol {
        return Err(Error::NotSymplecticPlane { pairing });
    }
    let section = section_area(ball, &PlaneSpec::Span(u1.clone(), v1.clone()))?;
    let euclidean_area = section.area_closed_form;
    let symplectic_area = pairing.abs() * euclidean_area;

    let preimage_symplectic_area = if check_preimage {
        let inv = ball.s.inverse();
        let (a, b) = orthonormalize(&(inv.matrix() * &u1), &(inv.matrix() * &v1))?;
        let disk = PI * ball.radius * ball.radius;
        let signed_preimage = symplectic_pairing(&a, &b) * disk;
        let signed_section = pairing * euclidean_area;
        if (signed_preimage - signed_section).abs() > tol * disk {
            return Err(Error::PropositionViolation(format!(
                "symplectic area of section {signed_section:.12} differs from preimage disk {signed_preimage:.12}"
            )));
        }
        Some(signed_preimage.abs())
    } else {
        None
    };

    Ok(PlaneSection { section, pairing, euclidean_area, symplectic_area, preimage_symplectic_area })
}
