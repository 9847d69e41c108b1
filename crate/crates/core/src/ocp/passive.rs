//! Projected-gradient optimization of the bilinear passive problems.
//!
//! Both controls are stacked into one box-constrained vector; each iteration
//! costs one forward and one adjoint solve plus the line-search forward
//! solves. Reduced gradients:
//!
//! ```text
//! ∇_u J = (α_u E_c + β_u A_c) u + Re(μ̄ 𝔸 η)        (𝕃 for the plate)
//! ∇_v J = (α_v E_c + β_v A_c) v + gρ Re(μ̄ 𝔹 η)
//! ```
//!
//! Steps are projected onto the box and accepted under a monotone Armijo
//! condition, so the cost history is strictly decreasing.

use super::{cost_passive, ControlField, CostConfig, OcpError, OcpResult, OptimalControls, Termination};
use crate::fem::{AssembledOperators, ControlTensors};
use crate::solver::PassiveSolver;
use crate::wave::{RigidBody2D, WaveEnvironment};

/// Projected-gradient settings; the defaults are the pinned artifact values.
#[derive(Debug, Clone)]
pub struct OptimizerSettings {
    pub tol_rel: f64,
    pub tol_abs: f64,
    pub max_iter: usize,
    pub armijo_c: f64,
    pub backtrack: f64,
    pub max_backtracks: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            tol_rel: 1e-6,
            tol_abs: 1e-12,
            max_iter: 500,
            armijo_c: 1e-4,
            backtrack: 0.5,
            max_backtracks: 40,
        }
    }
}

fn clamp(z: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
    z.iter()
        .zip(lo)
        .zip(hi)
        .map(|((&z, &l), &h)| z.min(h).max(l))
        .collect()
}

/// Reduced gradient over the stacked controls [u; v].
pub(crate) fn passive_gradient(
    solver: &mut PassiveSolver,
    ops: &AssembledOperators,
    tensors: &ControlTensors,
    env: &WaveEnvironment,
    cfg: &CostConfig,
    z: &[f64],
    state: &crate::solver::StateSolution,
) -> Result<Vec<f64>, OcpError> {
    let l = ops.control.n_dofs;
    let (u, v) = z.split_at(l);
    let adj = solver.solve_adjoint(u, v, &state.body, &cfg.weight)?;
    let eu = ops.e_c.matvec(u);
    let au = ops.a_c.matvec(u);
    let ev = ops.e_c.matvec(v);
    let av = ops.a_c.matvec(v);
    let su = tensors.gradient_stiffness(&adj.mu, &state.eta);
    let sv = tensors.gradient_mass(&adj.mu, &state.eta);
    let mut g = Vec::with_capacity(2 * l);
    for k in 0..l {
        g.push(cfg.alpha_u * eu[k] + cfg.beta_u * au[k] + su[k]);
    }
    for k in 0..l {
        g.push(cfg.alpha_v * ev[k] + cfg.beta_v * av[k] + env.g * env.rho * sv[k]);
    }
    Ok(g)
}

/// Minimizes the passive cost over (u, v) from the given starting fields.
/// The tensors' kind selects membrane or plate.
pub fn solve_passive(
    ops: &AssembledOperators,
    tensors: &ControlTensors,
    body: &RigidBody2D,
    env: &WaveEnvironment,
    cfg: &CostConfig,
    u0: &ControlField,
    v0: &ControlField,
    settings: &OptimizerSettings,
) -> Result<OcpResult, OcpError> {
    cfg.validate()?;
    if !u0.is_admissible() || !v0.is_admissible() {
        return Err(OcpError::InadmissibleInitialControl(
            "initial control outside its box".into(),
        ));
    }
    let l = ops.control.n_dofs;
    if u0.values.len() != l || v0.values.len() != l {
        return Err(OcpError::InadmissibleInitialControl(format!(
            "expected {l} control DOFs"
        )));
    }
    let mut solver = PassiveSolver::new(ops, tensors, body, env)?;

    // stacked variable [u; v]
    let mut z: Vec<f64> = u0.values.iter().chain(&v0.values).copied().collect();
    let lo: Vec<f64> = u0.lower.iter().chain(&v0.lower).copied().collect();
    let hi: Vec<f64> = u0.upper.iter().chain(&v0.upper).copied().collect();

    let evaluate = |solver: &mut PassiveSolver, z: &[f64]| -> Result<_, OcpError> {
        let (u, v) = z.split_at(l);
        let state = solver.solve_state(u, v)?;
        let (j, motion) = cost_passive(&state.body, u, v, cfg, ops);
        Ok((state, j, motion))
    };

    let (mut state, mut j, mut motion) = evaluate(&mut solver, &z)?;
    let mut grad = passive_gradient(&mut solver, ops, tensors, env, cfg, &z, &state)?;
    let pg_norm = |z: &[f64], g: &[f64]| -> f64 {
        let moved: Vec<f64> = z.iter().zip(g).map(|(&zi, &gi)| zi - gi).collect();
        let proj = clamp(&moved, &lo, &hi);
        proj.iter()
            .zip(z)
            .map(|(&p, &zi)| (p - zi) * (p - zi))
            .sum::<f64>()
            .sqrt()
    };
    let pg0 = pg_norm(&z, &grad);
    let mut j_history = vec![j];
    let mut motion_history = vec![motion];
    let mut pg_history = vec![pg0];
    let mut termination = Termination::MaxIter;
    let mut step = 1.0;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;

    for _ in 0..settings.max_iter {
        let pg = *pg_history.last().unwrap();
        if pg <= settings.tol_rel * pg0 + settings.tol_abs {
            termination = Termination::Converged;
            break;
        }
        // BB1 trial step when curvature information is available
        if let Some((z_prev, g_prev)) = &prev {
            let mut sts = 0.0;
            let mut sty = 0.0;
            for k in 0..z.len() {
                let s = z[k] - z_prev[k];
                let y = grad[k] - g_prev[k];
                sts += s * s;
                sty += s * y;
            }
            if sty > 0.0 && sts > 0.0 {
                step = sts / sty;
            } else {
                step *= 2.0;
            }
        }
        let mut accepted = false;
        let mut t = step;
        for _ in 0..settings.max_backtracks {
            let moved: Vec<f64> = z.iter().zip(&grad).map(|(&zi, &gi)| zi - t * gi).collect();
            let trial = clamp(&moved, &lo, &hi);
            let decrease: f64 = grad
                .iter()
                .zip(trial.iter().zip(&z))
                .map(|(&g, (&tz, &zi))| g * (tz - zi))
                .sum();
            if decrease >= 0.0 {
                // no feasible descent along this direction at this step
                t *= settings.backtrack;
                continue;
            }
            let (tstate, tj, tmotion) = evaluate(&mut solver, &trial)?;
            if tj <= j + settings.armijo_c * decrease {
                prev = Some((z.clone(), grad.clone()));
                z = trial;
                state = tstate;
                j = tj;
                motion = tmotion;
                step = t;
                accepted = true;
                break;
            }
            t *= settings.backtrack;
        }
        if !accepted {
            termination = Termination::LineSearchFailure;
            break;
        }
        grad = passive_gradient(&mut solver, ops, tensors, env, cfg, &z, &state)?;
        j_history.push(j);
        motion_history.push(motion);
        pg_history.push(pg_norm(&z, &grad));
    }

    let (u, v) = z.split_at(l);
    Ok(OcpResult {
        controls: OptimalControls::Passive {
            u: u.to_vec(),
            v: v.to_vec(),
        },
        state,
        j_history,
        motion_history,
        pg_norm_history: pg_history,
        termination,
        kkt_residual: None,
    })
}
