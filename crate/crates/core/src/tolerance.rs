//! Default tolerances. All of them are relative and can be overridden per call.

/// Symmetry check: `‖A − Aᵀ‖_max ≤ τ·(1 + ‖A‖_max)`.
pub const SYMMETRY: f64 = 1e-10;
/// Symplecticity check: `‖SᵀJS − J‖_max ≤ τ·(1 + ‖S‖²_max)`.
pub const SYMPLECTIC: f64 = 1e-10;
/// Williamson residual `‖SᵀMS − diag(Λ,Λ)‖_max ≤ τ·‖M‖_max`.
pub const WILLIAMSON: f64 = 1e-8;
/// Robertson–Schrödinger saturation, relative to the right-hand side.
pub const SATURATION: f64 = 1e-8;
/// Largest accepted condition number for SPD inputs.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub symmetry: f64,
    pub symplectic: f64,
    pub williamson: f64,
    pub saturation: f64,
    pub max_condition: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            symmetry: SYMMETRY,
            symplectic: SYMPLECTIC,
            williamson: WILLIAMSON,
            saturation: SATURATION,
            max_condition: MAX_CONDITION,
        }
    }
}
