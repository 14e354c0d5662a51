//! The subcommands. Each one maps a loaded input to an [`Outcome`].

use std::f64::consts::PI;
use std::path::Path;

use blobkit::gaussian::{self, rs_report};
use blobkit::gromov::{self, PlaneSpec, SamplingConfig, SymplecticBall};
use blobkit::purification::{self, compare_blobs};
use blobkit::symplectic::{self, PhaseDim};
use blobkit::tolerance::Tolerances;
use nalgebra::DVector;
use serde_json::{json, Map, Value};

use crate::matrix_file::{rows, Kind, MatrixFile};
use crate::report::{Failure, Outcome};

#[derive(Debug, Clone, Copy)]
pub struct Context {
    pub tol: f64,
}

impl Context {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances { williamson: self.tol, saturation: self.tol, ..Tolerances::default() }
    }

    pub fn tolerances_json(&self) -> Value {
        let t = self.tolerances();
        json!({
            "tol": self.tol,
            "symmetry": t.symmetry,
            "symplectic": t.symplectic,
            "williamson": t.williamson,
            "saturation": t.saturation,
            "max_condition": t.max_condition,
        })
    }
}

type CmdResult = Result<Outcome, Failure>;

fn diag_map(value: Value) -> Map<String, Value> {
    match value {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

fn not_a_state(file: &MatrixFile) -> Result<(), Failure> {
    if file.kind == Kind::Symplectic {
        return Err(Failure::input("expected kind covariance, M or G; got symplectic"));
    }
    Ok(())
}

pub fn williamson(file: &MatrixFile, ctx: &Context) -> CmdResult {
    not_a_state(file)?;
    let m = file.m_matrix()?;
    let w = symplectic::williamson_with(&m, &ctx.tolerances())?;
    let lambda = w.spectrum.values().to_vec();
    let capacity = PI * file.hbar / w.spectrum.max();
    let summary = format!("symplectic spectrum of M: {lambda:?}");
    Ok(Outcome::new(
        true,
        json!({ "S": rows(w.s.matrix()), "spectrum": lambda, "capacity": capacity }),
        diag_map(json!({
            "diagonal_residual": w.diagonal_residual,
            "symplectic_residual": w.symplectic_residual,
            "m_min_eigenvalue": blobkit::linalg::min_eigenvalue(&m),
        })),
        summary,
    ))
}

#[derive(Debug, Clone, Copy)]
pub struct CheckFlags {
    pub rs: bool,
    pub quantum: bool,
    pub capacity: bool,
}

pub fn check(file: &MatrixFile, flags: CheckFlags, ctx: &Context) -> CmdResult {
    not_a_state(file)?;
    let all = !(flags.rs || flags.quantum || flags.capacity);
    let state = file.state()?;
    let hbar = state.hbar();
    let mut result = Map::new();
    let mut diagnostics = Map::new();
    let mut ok = true;
    let mut notes = Vec::new();

    if all || flags.rs {
        let report = rs_report(&state, ctx.tol);
        let violated: Vec<usize> = report
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.slack < -ctx.tol * e.rhs)
            .map(|(j, _)| j + 1)
            .collect();
        let entries: Vec<Value> = report
            .entries
            .iter()
            .enumerate()
            .map(|(j, e)| {
                json!({ "index": j + 1, "lhs": e.lhs, "rhs": e.rhs, "slack": e.slack, "saturated": e.saturated })
            })
            .collect();
        let saturated: Vec<usize> = report.saturated_modes().iter().map(|j| j + 1).collect();
        notes.push(format!("RS saturated at {saturated:?}, violated at {violated:?}"));
        ok &= violated.is_empty();
        result.insert(
            "rs".into(),
            json!({
                "entries": entries,
                "saturated": saturated,
                "violated": violated,
                "partially_saturated": report.partially_saturated(),
                "holds": violated.is_empty(),
            }),
        );
        diagnostics.insert("rs_min_slack".into(), json!(report.min_slack()));
    }
    if all || flags.quantum {
        let holds = gaussian::quantum_condition(&state, ctx.tol)?;
        let margin = gaussian::quantum_margin(state.sigma(), hbar)?;
        notes.push(format!("quantum condition {}", if holds { "holds" } else { "violated" }));
        ok &= holds;
        result.insert("quantum".into(), json!({ "holds": holds }));
        diagnostics.insert("quantum_min_eigenvalue".into(), json!(margin));
    }
    if all || flags.capacity {
        let m = state.m_matrix()?;
        let lambda1 = symplectic::symplectic_spectrum_with(&m, &ctx.tolerances())?.max();
        let capacity = PI * hbar / lambda1;
        let holds = capacity >= PI * hbar * (1.0 - ctx.tol);
        notes.push(format!("capacity {capacity:.12} (πħ = {:.12})", PI * hbar));
        ok &= holds;
        result.insert(
            "capacity".into(),
            json!({ "value": capacity, "pi_hbar": PI * hbar, "lambda1": lambda1, "holds": holds }),
        );
    }
    Ok(Outcome::new(ok, Value::Object(result), diagnostics, notes.join("; ")))
}

pub fn spectrum(file: &MatrixFile, ctx: &Context) -> CmdResult {
    not_a_state(file)?;
    let m = file.m_matrix()?;
    let skew = symplectic::symplectic_spectrum_with(&m, &ctx.tolerances())?;
    let jm = symplectic::spectrum_from_jm(&m)?;
    let gap = skew.values().iter().zip(jm.values()).map(|(a, b)| (a - b).abs() / a.max(1.0)).fold(0.0, f64::max);
    let sigma_spectrum: Vec<f64> = skew.values().iter().rev().map(|l| 0.5 * file.hbar / l).collect();
    let agree = gap <= ctx.tol;
    let summary = format!("spectrum {:?}, oracle gap {gap:.3e}", skew.values());
    if !agree {
        return Err(Failure { code: crate::report::exit::NUMERICAL, message: summary });
    }
    Ok(Outcome::new(
        true,
        json!({
            "spectrum": skew.values(),
            "spectrum_jm": jm.values(),
            "sigma_spectrum": sigma_spectrum,
            "capacity": PI * file.hbar / skew.max(),
        }),
        diag_map(json!({ "oracle_gap": gap })),
        summary,
    ))
}

pub fn purify(file: &MatrixFile, index: Option<usize>, emit: Option<&Path>, ctx: &Context) -> CmdResult {
    not_a_state(file)?;
    let state = file.state()?;
    let res = match index {
        Some(0) => return Err(Failure::input("--index counts modes from 1")),
        Some(j) => {
            state.dim().check_mode(j - 1)?;
            purification::purify(&state, j - 1, ctx.tol)?
        }
        None => purification::purify_first_saturated(&state, ctx.tol)?,
    };
    let g = gaussian::wigner_of_pure(&res.psi)?.g().clone();
    if let Some(path) = emit {
        MatrixFile::new(Kind::G, g.clone(), state.mean().clone(), state.hbar())
            .write(path)
            .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
    }
    let d = res.diagnostics;
    Ok(Outcome::new(
        true,
        json!({
            "index": res.saturated_mode + 1,
            "X": rows(res.psi.x()),
            "Y": rows(res.psi.y()),
            "sigma_psi": rows(&res.covariance()),
            "blob_canonical": rows(res.blob.canonical()),
            "G": rows(&g),
        }),
        diag_map(json!({
            "lambda1": d.lambda1,
            "capacity": d.capacity,
            "block_mismatch": d.block_mismatch,
            "domination_min_eigenvalue": d.domination_min_eig,
        })),
        format!("pure state attached to saturated index {}", res.saturated_mode + 1),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Plane {
    Conjugate(usize),
    Coordinates(usize, usize),
}

impl Plane {
    /// `"j"` (1-based mode) or `"eK,eL"` (1-based phase-space coordinates).
    pub fn parse(text: &str) -> Result<Self, String> {
        let text = text.trim();
        if let Some((a, b)) = text.split_once(',') {
            let coord = |s: &str| -> Result<usize, String> {
                let s = s.trim();
                s.strip_prefix('e')
                    .and_then(|k| k.parse::<usize>().ok())
                    .filter(|k| *k >= 1)
                    .ok_or_else(|| format!("bad plane vector {s:?}; expected eK with K ≥ 1"))
            };
            let (k, l) = (coord(a)?, coord(b)?);
            if k == l {
                return Err("plane vectors must differ".into());
            }
            return Ok(Plane::Coordinates(k, l));
        }
        match text.parse::<usize>() {
            Ok(j) if j >= 1 => Ok(Plane::Conjugate(j)),
            _ => Err(format!("bad plane {text:?}; expected a mode index j or \"eK,eL\"")),
        }
    }

    fn label(&self) -> String {
        match self {
            Plane::Conjugate(j) => j.to_string(),
            Plane::Coordinates(k, l) => format!("e{k},e{l}"),
        }
    }

    fn spec(&self, dim: PhaseDim) -> Result<PlaneSpec, Failure> {
        match *self {
            Plane::Conjugate(j) => {
                dim.check_mode(j - 1)?;
                Ok(PlaneSpec::Conjugate(j - 1))
            }
            Plane::Coordinates(k, l) => {
                if k > dim.size() || l > dim.size() {
                    return Err(Failure::input(format!("plane e{k},e{l} outside dimension {}", dim.size())));
                }
                let e = |i: usize| {
                    let mut v = DVector::zeros(dim.size());
                    v[i - 1] = 1.0;
                    v
                };
                Ok(PlaneSpec::Span(e(k), e(l)))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct GromovArgs {
    pub radius: f64,
    pub planes: Vec<Plane>,
    pub samples: usize,
    pub seed: u64,
    pub nodes: usize,
}

pub fn gromov(file: &MatrixFile, args: &GromovArgs, ctx: &Context) -> CmdResult {
    let s = file.symplectic().map_err(|e| match e {
        blobkit::Error::Domain(msg) => Failure::violated(msg),
        other => other.into(),
    })?;
    let ball = SymplecticBall::centered(s, args.radius)?;
    let dim = ball.dim();
    let planes: Vec<Plane> = if args.planes.is_empty() {
        (1..=dim.modes()).map(Plane::Conjugate).collect()
    } else {
        args.planes.clone()
    };
    let expected = PI * args.radius * args.radius;
    let mut ok = true;
    let mut out = Vec::new();
    let mut failed = Vec::new();
    for (k, plane) in planes.iter().enumerate() {
        let spec = plane.spec(dim)?;
        let config = SamplingConfig { samples: args.samples, seed: blobkit::rng::split_seed(args.seed, k as u64) };
        let sec = gromov::section_area_with(&ball, &spec, &config)?;
        let z = if sec.sampled_std_error > 0.0 {
            (sec.area_sampled - sec.area_closed_form) / sec.sampled_std_error
        } else {
            0.0
        };
        let mut entry = json!({
            "plane": plane.label(),
            "area_closed_form": sec.area_closed_form,
            "area_sampled": sec.area_sampled,
            "sampled_std_error": sec.sampled_std_error,
            "sampled_z_score": z,
            "samples": sec.samples,
            "symplectic_pairing": sec.symplectic_pairing,
        });
        if let PlaneSpec::Conjugate(j) = spec {
            let (u, v) = spec.basis(dim)?;
            let q2 = gromov::restricted_form(&ball, &u, &v);
            let line = gromov::boundary_integral(&q2, args.radius, args.nodes)?;
            let deviation = (sec.area_closed_form - expected).abs() / expected;
            let line_deviation = (line - sec.area_closed_form).abs() / sec.area_closed_form;
            let holds = deviation <= ctx.tol && line_deviation <= ctx.tol.max(1e-5);
            if !holds {
                failed.push(plane.label());
            }
            ok &= holds;
            let m = entry.as_object_mut().expect("object");
            m.insert("expected".into(), json!(expected));
            m.insert("relative_deviation".into(), json!(deviation));
            m.insert("boundary_integral".into(), json!(line));
            m.insert("boundary_relative_deviation".into(), json!(line_deviation));
            m.insert("projection_area".into(), json!(gromov::projection_area(&ball, j)?));
            m.insert("holds".into(), json!(holds));
        }
        out.push(entry);
    }
    let summary = if failed.is_empty() {
        format!("{} plane(s) measured", out.len())
    } else {
        format!("conjugate section area differs from πR² at plane(s) {}", failed.join(", "))
    };
    Ok(Outcome::new(
        ok,
        json!({ "radius": args.radius, "sections": out }),
        diag_map(json!({ "nodes": args.nodes, "seed": args.seed, "line_integral_tol": ctx.tol.max(1e-5) })),
        summary,
    ))
}

pub fn blob_equal(a: &MatrixFile, b: &MatrixFile, ctx: &Context) -> CmdResult {
    let s1 = a.symplectic()?;
    let s2 = b.symplectic()?;
    if (a.hbar - b.hbar).abs() > 0.0 {
        return Err(Failure::input("files use different hbar"));
    }
    let c = compare_blobs(&s1, &s2)?;
    let equal = purification::blobs_equal(&s1, &s2, ctx.tol)?;
    Ok(Outcome::new(
        true,
        json!({ "equal": equal }),
        diag_map(json!({ "rotation_defect": c.rotation_defect, "canonical_distance": c.canonical_distance })),
        format!("blobs {}", if equal { "coincide" } else { "differ" }),
    ))
}

pub fn random_symplectic(n: usize, seed: u64, factors: usize, hbar: f64) -> Result<MatrixFile, Failure> {
    let dim = PhaseDim::new(n)?;
    let s = symplectic::random_symplectic(dim, seed, factors)?;
    let size = dim.size();
    Ok(MatrixFile::new(Kind::Symplectic, s.into_inner(), DVector::zeros(size), hbar))
}
