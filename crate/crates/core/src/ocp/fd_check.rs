//! Central finite-difference verification of the adjoint-based gradients.
//!
//! For each random direction the directional derivative of the reduced cost
//! is compared against central differences over a decade sweep of step
//! sizes; the per-direction minimum relative error is the reported figure
//! (the sweep shows the classic V of truncation against roundoff).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{cost_passive, cost_pressure, ControlField, CostConfig, OcpError};
use crate::fem::{AssembledOperators, ControlTensors};
use crate::solver::{PassiveSolver, PressureSolver};
use crate::wave::{RigidBody2D, WaveEnvironment};

const STEP_SWEEP: [f64; 5] = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7];

#[derive(Debug, Clone)]
pub struct DirectionCheck {
    /// (step, relative error) over the sweep.
    pub errors: Vec<(f64, f64)>,
    pub min_rel_error: f64,
}

#[derive(Debug, Clone)]
pub struct GradientCheckReport {
    pub directions: Vec<DirectionCheck>,
}

impl GradientCheckReport {
    /// Worst per-direction best error.
    pub fn max_min_error(&self) -> f64 {
        self.directions
            .iter()
            .map(|d| d.min_rel_error)
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        !self.directions.is_empty() && self.max_min_error() < tol
    }
}

fn check_direction(
    mut eval: impl FnMut(f64) -> Result<f64, OcpError>,
    analytic: f64,
    steps: &[f64],
) -> Result<DirectionCheck, OcpError> {
    let mut errors = Vec::with_capacity(steps.len());
    let mut min_rel = f64::INFINITY;
    for &s in steps {
        let plus = eval(s)?;
        let minus = eval(-s)?;
        let fd = (plus - minus) / (2.0 * s);
        let rel = (fd - analytic).abs() / analytic.abs().max(1e-30);
        min_rel = min_rel.min(rel);
        errors.push((s, rel));
    }
    Ok(DirectionCheck {
        errors,
        min_rel_error: min_rel,
    })
}

/// Gradient check for the active pressure mode (complex control).
pub fn fd_gradient_check_pressure(
    ops: &AssembledOperators,
    body: &RigidBody2D,
    env: &WaveEnvironment,
    cfg: &CostConfig,
    point: &[Complex64],
    n_directions: usize,
    seed: u64,
) -> Result<GradientCheckReport, OcpError> {
    cfg.validate()?;
    let solver = PressureSolver::new(ops, body, env)?;
    let l = ops.control.n_dofs;
    assert_eq!(point.len(), l);
    let state = solver.solve_state(point)?;
    let grad = super::lq::pressure_gradient(&solver, ops, cfg, point, &state.body)?;
    let scale = point
        .iter()
        .map(|v| v.norm())
        .fold(1.0_f64, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut directions = Vec::with_capacity(n_directions);
    for _ in 0..n_directions {
        let mut d: Vec<Complex64> = (0..l)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = crate::linalg::norm2_c(&d).max(f64::MIN_POSITIVE);
        for v in &mut d {
            *v /= norm;
        }
        let analytic: f64 = grad
            .iter()
            .zip(&d)
            .map(|(g, di)| (g.conj() * di).re)
            .sum();
        let steps: Vec<f64> = STEP_SWEEP.iter().map(|s| s * scale).collect();
        let check = check_direction(
            |s| {
                let trial: Vec<Complex64> =
                    point.iter().zip(&d).map(|(p, di)| p + s * di).collect();
                let st = solver.solve_state(&trial)?;
                Ok(cost_pressure(&st.body, &trial, cfg, ops).0)
            },
            analytic,
            &steps,
        )?;
        directions.push(check);
    }
    Ok(GradientCheckReport { directions })
}

/// Gradient check for a passive mode (stacked real controls u, v). The point
/// must be strictly interior to the box with margin at least ten times the
/// largest step.
pub fn fd_gradient_check_passive(
    ops: &AssembledOperators,
    tensors: &ControlTensors,
    body: &RigidBody2D,
    env: &WaveEnvironment,
    cfg: &CostConfig,
    u0: &ControlField,
    v0: &ControlField,
    n_directions: usize,
    seed: u64,
) -> Result<GradientCheckReport, OcpError> {
    cfg.validate()?;
    let mut solver = PassiveSolver::new(ops, tensors, body, env)?;
    let l = ops.control.n_dofs;
    let z: Vec<f64> = u0.values.iter().chain(&v0.values).copied().collect();
    let lo: Vec<f64> = u0.lower.iter().chain(&v0.lower).copied().collect();
    let hi: Vec<f64> = u0.upper.iter().chain(&v0.upper).copied().collect();
    let margin = z
        .iter()
        .zip(lo.iter().zip(&hi))
        .map(|(&zi, (&l, &h))| (zi - l).min(h - zi))
        .fold(f64::INFINITY, f64::min);
    let scale = z.iter().fold(1.0_f64, |a, &v| a.max(v.abs()));
    let steps: Vec<f64> = STEP_SWEEP
        .iter()
        .map(|s| s * scale)
        .filter(|s| 10.0 * s <= margin)
        .collect();
    if steps.is_empty() {
        return Err(OcpError::InadmissibleInitialControl(
            "finite-difference point too close to the control bounds".into(),
        ));
    }

    let (u, v) = z.split_at(l);
    let state = solver.solve_state(u, v)?;
    let grad = super::passive::passive_gradient(&mut solver, ops, tensors, env, cfg, &z, &state)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut directions = Vec::with_capacity(n_directions);
    for _ in 0..n_directions {
        let mut d: Vec<f64> = (0..2 * l).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = crate::linalg::norm2(&d).max(f64::MIN_POSITIVE);
        for x in &mut d {
            *x /= norm;
        }
        let analytic: f64 = grad.iter().zip(&d).map(|(g, di)| g * di).sum();
        let check = check_direction(
            |s| {
                let trial: Vec<f64> = z.iter().zip(&d).map(|(p, di)| p + s * di).collect();
                let (tu, tv) = trial.split_at(l);
                let st = solver.solve_state(tu, tv)?;
                Ok(cost_passive(&st.body, tu, tv, cfg, ops).0)
            },
            analytic,
            &steps,
        )?;
        directions.push(check);
    }
    Ok(GradientCheckReport { directions })
}

/// Joint entry point used by the batch front-end.
pub fn fd_gradient_check(
    mode: crate::fem::DeviceKind,
    ops: &AssembledOperators,
    tensors: &ControlTensors,
    body: &RigidBody2D,
    env: &WaveEnvironment,
    cfg: &CostConfig,
    u0: &ControlField,
    v0: &ControlField,
    n_directions: usize,
    seed: u64,
) -> Result<GradientCheckReport, OcpError> {
    if tensors.kind != mode {
        return Err(OcpError::InvalidConfig(format!(
            "tensors assembled for {:?}, requested {:?}",
            tensors.kind, mode
        )));
    }
    fd_gradient_check_passive(ops, tensors, body, env, cfg, u0, v0, n_directions, seed)
}
