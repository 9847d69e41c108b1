//! Optimal-control layer: cost functional, the one-shot linear-quadratic
//! solve for active pressure control, the projected-gradient loop for the
//! passive bilinear problems, and finite-difference gradient verification.

mod fd_check;
mod lq;
mod passive;

pub use fd_check::{
    fd_gradient_check, fd_gradient_check_passive, fd_gradient_check_pressure, DirectionCheck,
    GradientCheckReport,
};
pub use lq::{minimize_lq_pressure_pg, solve_lq_pressure};
pub use passive::{solve_passive, OptimizerSettings};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use thiserror::Error;

use crate::fem::AssembledOperators;
use crate::solver::{SolverError, StateSolution, CONTROL_EPS};

#[derive(Debug, Error)]
pub enum OcpError {
    #[error("invalid cost configuration: {0}")]
    InvalidConfig(String),
    #[error("singular KKT system: {0}")]
    SingularKkt(String),
    #[error("inadmissible initial control: {0}")]
    InadmissibleInitialControl(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Cost weights: `J = ½ X†CX + ½ Σ (α uᵀE_c u + β uᵀA_c u)`.
#[derive(Debug, Clone)]
pub struct CostConfig {
    /// Body-motion weight matrix C (symmetric positive definite).
    pub weight: Matrix3<f64>,
    pub alpha_u: f64,
    pub beta_u: f64,
    pub alpha_v: f64,
    pub beta_v: f64,
}

impl CostConfig {
    /// Diagonal weight `C = diag(1, 1, H²)` with characteristic height H.
    pub fn with_height(
        height: f64,
        alpha_u: f64,
        beta_u: f64,
        alpha_v: f64,
        beta_v: f64,
    ) -> Result<Self, OcpError> {
        let cfg = Self {
            weight: Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, height * height)),
            alpha_u,
            beta_u,
            alpha_v,
            beta_v,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), OcpError> {
        if !(self.alpha_u > 0.0 && self.beta_u > 0.0 && self.alpha_v > 0.0 && self.beta_v > 0.0) {
            return Err(OcpError::InvalidConfig(
                "regularization weights must be strictly positive".into(),
            ));
        }
        let sym = (self.weight - self.weight.transpose()).abs().max();
        if sym > 1e-12 {
            return Err(OcpError::InvalidConfig("weight matrix not symmetric".into()));
        }
        let eig = self.weight.symmetric_eigenvalues();
        if eig.min() <= 0.0 {
            return Err(OcpError::InvalidConfig(
                "weight matrix not positive definite".into(),
            ));
        }
        Ok(())
    }
}

/// Box-constrained control values over the Γ_c control DOFs.
#[derive(Debug, Clone)]
pub struct ControlField {
    pub values: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ControlField {
    /// Tension/stiffness field: unit initial value, lower bound ε, unbounded
    /// above.
    pub fn tension_default(n: usize) -> Self {
        Self {
            values: vec![1.0_f64.max(CONTROL_EPS); n],
            lower: vec![CONTROL_EPS; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    /// Mass field `v = 1 − ω²m/(gρ)`: mid-box initial value, bounds
    /// `[ε, 1−ε]`.
    pub fn mass_default(n: usize) -> Self {
        Self {
            values: vec![0.5; n],
            lower: vec![CONTROL_EPS; n],
            upper: vec![1.0 - CONTROL_EPS; n],
        }
    }

    pub fn constant(n: usize, value: f64, lower: f64, upper: f64) -> Self {
        Self {
            values: vec![value; n],
            lower: vec![lower; n],
            upper: vec![upper; n],
        }
    }

    pub fn is_admissible(&self) -> bool {
        self.values
            .iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .all(|((&v, &lo), &hi)| v >= lo && v <= hi)
    }
}

/// Motion part of the cost, `½ Re(X† C X)`.
pub fn motion_term(x: &Vector3<Complex64>, weight: &Matrix3<f64>) -> f64 {
    let mut acc = Complex64::default();
    for r in 0..3 {
        for c in 0..3 {
            acc += x[r].conj() * x[c] * weight[(r, c)];
        }
    }
    0.5 * acc.re
}

/// Weighted control norm `½(α uᵀE_c u + β uᵀA_c u)` for a real control.
pub fn control_penalty(u: &[f64], alpha: f64, beta: f64, ops: &AssembledOperators) -> f64 {
    0.5 * (alpha * ops.e_c.form(u, u) + beta * ops.a_c.form(u, u))
}

/// Weighted control norm for a complex control (pressure mode).
pub fn control_penalty_complex(
    u: &[Complex64],
    alpha: f64,
    beta: f64,
    ops: &AssembledOperators,
) -> f64 {
    0.5 * (alpha * ops.e_c.form_c(u, u).re + beta * ops.a_c.form_c(u, u).re)
}

/// Pressure-mode cost: J and its motion term.
pub fn cost_pressure(
    x: &Vector3<Complex64>,
    u: &[Complex64],
    cfg: &CostConfig,
    ops: &AssembledOperators,
) -> (f64, f64) {
    let motion = motion_term(x, &cfg.weight);
    (
        motion + control_penalty_complex(u, cfg.alpha_u, cfg.beta_u, ops),
        motion,
    )
}

/// Passive-mode cost: J and its motion term.
pub fn cost_passive(
    x: &Vector3<Complex64>,
    u: &[f64],
    v: &[f64],
    cfg: &CostConfig,
    ops: &AssembledOperators,
) -> (f64, f64) {
    let motion = motion_term(x, &cfg.weight);
    (
        motion
            + control_penalty(u, cfg.alpha_u, cfg.beta_u, ops)
            + control_penalty(v, cfg.alpha_v, cfg.beta_v, ops),
        motion,
    )
}

/// The weighted control norm `‖u‖_U = √(α uᵀE_c u + β uᵀA_c u)`.
pub fn control_norm(u: &[Complex64], alpha: f64, beta: f64, ops: &AssembledOperators) -> f64 {
    (alpha * ops.e_c.form_c(u, u).re + beta * ops.a_c.form_c(u, u).re)
        .max(0.0)
        .sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIter,
    LineSearchFailure,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIter => "max_iter",
            Termination::LineSearchFailure => "line_search_failure",
        }
    }
}

/// Optimal controls of a run, per mode.
#[derive(Debug, Clone)]
pub enum OptimalControls {
    Pressure(Vec<Complex64>),
    Passive { u: Vec<f64>, v: Vec<f64> },
}

/// Outcome of an optimal-control run.
#[derive(Debug, Clone)]
pub struct OcpResult {
    pub controls: OptimalControls,
    pub state: StateSolution,
    pub j_history: Vec<f64>,
    pub motion_history: Vec<f64>,
    pub pg_norm_history: Vec<f64>,
    pub termination: Termination,
    /// Relative residual of the full KKT system (one-shot LQ only).
    pub kkt_residual: Option<f64>,
}

impl OcpResult {
    pub fn final_j(&self) -> f64 {
        *self.j_history.last().expect("nonempty history")
    }

    pub fn final_motion(&self) -> f64 {
        *self.motion_history.last().expect("nonempty history")
    }
}
