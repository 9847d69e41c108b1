//! Closed-form wave physics: dispersion relation, incident potential,
//! radiation coefficient and the rigid-body mass/stiffness matrices of the
//! half-submerged circular section.
//!
//! Sign conventions follow the crate-level `e^{+jωt}` time convention.

use nalgebra::Matrix3;
use num_complex::Complex64;
use thiserror::Error;

use crate::J;

#[derive(Debug, Error)]
pub enum WaveError {
    #[error("dispersion solve did not converge after {0} iterations")]
    NonConvergence(usize),
    #[error("invalid wave parameter: {0}")]
    InvalidParameter(String),
    #[error(
        "buoyancy imbalance: body mass {mass} does not match displaced mass {displaced} \
         (half-submerged equilibrium requires rho_body = rho/2)"
    )]
    BuoyancyImbalance { mass: f64, displaced: f64 },
}

/// Solves `ω² = g k tanh(k h0)` for the unique positive real root.
///
/// Newton iteration from the deep-water guess `k0 = ω²/g`, safeguarded by
/// bisection on `[1e-12, 10 ω²/g + 10/h0]`; the returned root has relative
/// residual `< 1e-12`.
pub fn solve_dispersion(omega: f64, depth: f64, g: f64) -> Result<f64, WaveError> {
    if !(omega > 0.0 && depth > 0.0 && g > 0.0) {
        return Err(WaveError::InvalidParameter(
            "omega, depth and g must be positive".into(),
        ));
    }
    let target = omega * omega;
    let f = |k: f64| target - g * k * (k * depth).tanh();
    let mut lo = 1e-12;
    let mut hi = 10.0 * target / g + 10.0 / depth;
    if f(lo) <= 0.0 || f(hi) >= 0.0 {
        return Err(WaveError::InvalidParameter(
            "dispersion root not bracketed".into(),
        ));
    }
    let mut k = target / g;
    k = k.clamp(lo, hi);
    const MAX_ITER: usize = 200;
    for _ in 0..MAX_ITER {
        let th = (k * depth).tanh();
        let res = target - g * k * th;
        if res.abs() <= 1e-14 * target {
            return Ok(k);
        }
        if res > 0.0 {
            lo = lo.max(k);
        } else {
            hi = hi.min(k);
        }
        // sech² underflows harmlessly for large k·depth
        let sech2 = {
            let c = (k * depth).cosh();
            1.0 / (c * c)
        };
        let deriv = -g * (th + k * depth * sech2);
        let mut next = k - res / deriv;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - k).abs() <= f64::EPSILON * k.abs() {
            k = next;
            let final_res = (target - g * k * (k * depth).tanh()).abs();
            if final_res <= 1e-12 * target {
                return Ok(k);
            }
        }
        k = next;
    }
    let final_res = (target - g * k * (k * depth).tanh()).abs();
    if final_res <= 1e-12 * target {
        Ok(k)
    } else {
        Err(WaveError::NonConvergence(MAX_ITER))
    }
}

/// Ambient sea state and incident regular wave.
#[derive(Debug, Clone)]
pub struct WaveEnvironment {
    /// Water density [kg/m³].
    pub rho: f64,
    /// Gravity [m/s²].
    pub g: f64,
    /// Angular frequency [rad/s].
    pub omega: f64,
    /// Still-water depth [m].
    pub depth: f64,
    /// Incident amplitude [m].
    pub amplitude: f64,
    /// Sign of the phase `exp(j·direction·k·x)`: +1 or −1.
    pub direction: f64,
    /// Wavenumber from the dispersion relation [1/m].
    pub k: f64,
}

impl WaveEnvironment {
    pub fn new(
        rho: f64,
        g: f64,
        omega: f64,
        depth: f64,
        amplitude: f64,
        direction: f64,
    ) -> Result<Self, WaveError> {
        if !(rho > 0.0 && amplitude >= 0.0) {
            return Err(WaveError::InvalidParameter(
                "rho must be positive and amplitude nonnegative".into(),
            ));
        }
        if direction != 1.0 && direction != -1.0 {
            return Err(WaveError::InvalidParameter(
                "direction must be +1 or -1".into(),
            ));
        }
        let k = solve_dispersion(omega, depth, g)?;
        Ok(Self {
            rho,
            g,
            omega,
            depth,
            amplitude,
            direction,
            k,
        })
    }

    /// Convenience constructor with the defaults `ρ = 1030`, `g = 9.81` and
    /// wave period `T` in seconds.
    pub fn with_period(period: f64, depth: f64, amplitude: f64) -> Result<Self, WaveError> {
        if period <= 0.0 {
            return Err(WaveError::InvalidParameter("period must be positive".into()));
        }
        Self::new(
            1030.0,
            9.81,
            2.0 * std::f64::consts::PI / period,
            depth,
            amplitude,
            1.0,
        )
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.k
    }

    /// Depth profile `cosh(k(z+h0))/cosh(k h0)`, evaluated overflow-free.
    fn cosh_ratio(&self, z: f64) -> f64 {
        let a = self.k * (z + self.depth);
        let b = self.k * self.depth;
        ((a - b).exp()) * (1.0 + (-2.0 * a).exp()) / (1.0 + (-2.0 * b).exp())
    }

    /// Vertical-derivative profile `k sinh(k(z+h0))/cosh(k h0)`.
    fn sinh_ratio(&self, z: f64) -> f64 {
        let a = self.k * (z + self.depth);
        let b = self.k * self.depth;
        self.k * ((a - b).exp()) * (1.0 - (-2.0 * a).exp()) / (1.0 + (-2.0 * b).exp())
    }

    /// Incident potential `φⁱ = j(gA/ω)·cosh(k(z+h0))/cosh(k h0)·e^{j d k x}`.
    pub fn incident_potential(&self, x: f64, z: f64) -> Complex64 {
        let phase = (J * self.direction * self.k * x).exp();
        J * (self.g * self.amplitude / self.omega) * self.cosh_ratio(z) * phase
    }

    /// Gradient `(∂φⁱ/∂x, ∂φⁱ/∂z)`.
    pub fn incident_gradient(&self, x: f64, z: f64) -> [Complex64; 2] {
        let phase = (J * self.direction * self.k * x).exp();
        let amp = J * (self.g * self.amplitude / self.omega);
        let dx = amp * self.cosh_ratio(z) * phase * J * self.direction * self.k;
        let dz = amp * self.sinh_ratio(z) * phase;
        [dx, dz]
    }

    /// Normal derivative `∇φⁱ · n`.
    pub fn incident_normal_derivative(&self, x: f64, z: f64, normal: [f64; 2]) -> Complex64 {
        let grad = self.incident_gradient(x, z);
        grad[0] * normal[0] + grad[1] * normal[1]
    }

    /// Free-surface elevation amplitude `η = −(jω/g) φ` at `z = 0`.
    pub fn incident_elevation(&self, x: f64) -> Complex64 {
        -(J * self.omega / self.g) * self.incident_potential(x, 0.0)
    }
}

/// First-order radiation coefficient on the vertical truncation lines.
///
/// Straight truncation boundaries carry no curvature term, so `α = jk`.
pub fn radiation_coefficient(env: &WaveEnvironment) -> Complex64 {
    J * env.k
}

/// Half-submerged circular body with three rigid degrees of freedom
/// (surge x, heave z, roll θ), reference point at the circle center.
#[derive(Debug, Clone)]
pub struct RigidBody2D {
    /// Body density [kg/m³].
    pub rho_body: f64,
    /// Radius [m].
    pub radius: f64,
    /// Reference point (circle center, on the waterline).
    pub center: [f64; 2],
    /// 3×3 mass matrix (per unit length).
    pub mass: Matrix3<f64>,
    /// 3×3 hydrostatic stiffness matrix.
    pub stiffness: Matrix3<f64>,
}

impl RigidBody2D {
    pub fn half_submerged_circle(
        rho_body: f64,
        radius: f64,
        rho: f64,
        g: f64,
    ) -> Result<Self, WaveError> {
        let (mass, stiffness) = body_matrices(rho_body, radius, rho, g)?;
        Ok(Self {
            rho_body,
            radius,
            center: [0.0, 0.0],
            mass,
            stiffness,
        })
    }
}

/// Mass and hydrostatic stiffness of the half-submerged circle of radius `r`
/// (full circular cross-section, floating at its center).
///
/// Static equilibrium (`ρ_b π r² = ρ π r²/2`) is a hypothesis of the
/// linearization and is enforced here.
pub fn body_matrices(
    rho_body: f64,
    radius: f64,
    rho: f64,
    g: f64,
) -> Result<(Matrix3<f64>, Matrix3<f64>), WaveError> {
    if !(rho_body > 0.0 && radius > 0.0 && rho > 0.0 && g > 0.0) {
        return Err(WaveError::InvalidParameter(
            "body densities and radius must be positive".into(),
        ));
    }
    let area = std::f64::consts::PI * radius * radius;
    let mass_line = rho_body * area;
    let displaced = rho * area / 2.0;
    if (mass_line - displaced).abs() > 1e-9 * displaced {
        return Err(WaveError::BuoyancyImbalance {
            mass: mass_line,
            displaced,
        });
    }
    // polar second moment of the homogeneous disk about its center
    let inertia = 0.5 * mass_line * radius * radius;
    let mass = Matrix3::from_diagonal(&nalgebra::Vector3::new(mass_line, mass_line, inertia));

    // waterline width 2r; first moment of the waterline about x_G vanishes by
    // symmetry; the roll entry combines the waterline second moment with the
    // first vertical moment of the displaced half-disk and cancels exactly
    // for a circle.
    let waterline = 2.0 * radius;
    let second_moment_waterline = 2.0 * radius.powi(3) / 3.0;
    let vertical_moment_displaced = -2.0 * radius.powi(3) / 3.0;
    let k_heave = rho * g * waterline;
    let k_roll = rho * g * (second_moment_waterline + vertical_moment_displaced);
    let stiffness = Matrix3::from_diagonal(&nalgebra::Vector3::new(0.0, k_heave, k_roll));
    Ok((mass, stiffness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};

    fn residual(k: f64, omega: f64, depth: f64, g: f64) -> f64 {
        (omega * omega - g * k * (k * depth).tanh()).abs() / (omega * omega)
    }

    /// Plain bisection, independent of the Newton path.
    fn bisection_oracle(omega: f64, depth: f64, g: f64) -> f64 {
        let target = omega * omega;
        let f = |k: f64| target - g * k * (k * depth).tanh();
        let (mut lo, mut hi) = (1e-12, 10.0 * target / g + 10.0 / depth);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn dispersion_reference_case() {
        let omega = 2.0 * std::f64::consts::PI / 1.2;
        let k = solve_dispersion(omega, 2.5, 9.81).unwrap();
        let lambda = 2.0 * std::f64::consts::PI / k;
        assert!((2.23..=2.27).contains(&lambda), "λ = {lambda}");
        assert!((k - 2.795).abs() < 5e-3);
        assert!(residual(k, omega, 2.5, 9.81) < 1e-12);
    }

    #[test]
    fn dispersion_deep_water_limit() {
        let k = solve_dispersion(10.0, 1000.0, 9.81).unwrap();
        assert_relative_eq!(k, 100.0 / 9.81, max_relative = 1e-9);
    }

    #[test]
    fn dispersion_matches_bisection_in_shallow_water() {
        let (omega, depth, g) = (0.5, 0.01, 9.81);
        let k = solve_dispersion(omega, depth, g).unwrap();
        let k_oracle = bisection_oracle(omega, depth, g);
        assert_relative_eq!(k, k_oracle, max_relative = 1e-13);
        // sanity: close to the shallow-water estimate ω/√(g h₀)
        let shallow = omega / (g * depth).sqrt();
        assert!((k - shallow).abs() / shallow < 0.05);
    }

    #[test]
    fn dispersion_monotone_in_omega() {
        let mut prev = 0.0;
        for i in 1..=40 {
            let omega = 0.25 * i as f64;
            let k = solve_dispersion(omega, 2.5, 9.81).unwrap();
            assert!(k > prev, "k not monotone at ω = {omega}");
            prev = k;
        }
    }

    #[test]
    fn incident_surface_elevation_has_amplitude_a() {
        let env = WaveEnvironment::with_period(1.2, 2.5, 1.0).unwrap();
        for x in [-3.0, 0.0, 0.7, 2.4] {
            let eta = env.incident_elevation(x);
            assert_relative_eq!(eta.norm(), 1.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn incident_bottom_normal_derivative_vanishes() {
        let env = WaveEnvironment::with_period(1.2, 2.5, 1.0).unwrap();
        for x in [-2.0, 0.3, 1.9] {
            let dn = env.incident_normal_derivative(x, -env.depth, [0.0, -1.0]);
            assert!(dn.norm() < 1e-14);
        }
    }

    #[test]
    fn incident_free_surface_residual_vanishes() {
        let env = WaveEnvironment::with_period(1.2, 2.5, 1.0).unwrap();
        for x in [-3.5, -0.2, 1.1] {
            let grad = env.incident_gradient(x, 0.0);
            let phi = env.incident_potential(x, 0.0);
            let res = grad[1] - (env.omega * env.omega / env.g) * phi;
            assert!(res.norm() < 1e-12 * phi.norm());
        }
    }

    #[test]
    fn incident_potential_is_harmonic() {
        // 5-point finite-difference Laplacian at random interior points
        let env = WaveEnvironment::with_period(1.2, 2.5, 1.0).unwrap();
        let lambda = env.wavelength();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let h = 1e-4;
        for _ in 0..50 {
            let x: f64 = rng.random_range(-3.0..3.0);
            let z: f64 = rng.random_range(-2.3..-0.2);
            let lap = (env.incident_potential(x + h, z)
                + env.incident_potential(x - h, z)
                + env.incident_potential(x, z + h)
                + env.incident_potential(x, z - h)
                - 4.0 * env.incident_potential(x, z))
                / (h * h);
            let phi = env.incident_potential(x, z);
            assert!(lap.norm() < 1e-5 * phi.norm() / (lambda * lambda));
        }
    }

    #[test]
    fn radiation_coefficient_is_imaginary_and_linear_in_k() {
        let env = WaveEnvironment::with_period(1.2, 2.5, 1.0).unwrap();
        let alpha = radiation_coefficient(&env);
        assert_eq!(alpha.re, 0.0);
        assert_relative_eq!(alpha.im, env.k, max_relative = 1e-14);

        // deep water: doubling ω quadruples |α|
        let e1 = WaveEnvironment::new(1030.0, 9.81, 2.0, 500.0, 1.0, 1.0).unwrap();
        let e2 = WaveEnvironment::new(1030.0, 9.81, 4.0, 500.0, 1.0, 1.0).unwrap();
        let a1 = radiation_coefficient(&e1).norm();
        let a2 = radiation_coefficient(&e2).norm();
        assert_relative_eq!(a2 / a1, 4.0, max_relative = 1e-6);
    }

    #[test]
    fn body_matrices_reference_values() {
        let (m, k) = body_matrices(515.0, 0.5, 1030.0, 9.81).unwrap();
        assert_relative_eq!(k[(1, 1)], 1030.0 * 9.81 * 1.0, max_relative = 1e-14);
        // surge row and column identically zero
        for i in 0..3 {
            assert_eq!(k[(0, i)], 0.0);
            assert_eq!(k[(i, 0)], 0.0);
        }
        // circle: roll restoring cancels exactly
        assert_eq!(k[(2, 2)], 0.0);
        // diagonal mass, symmetric matrices
        let off_diag: f64 = (0..3)
            .flat_map(|r| (0..3).map(move |c| (r, c)))
            .filter(|&(r, c)| r != c)
            .map(|(r, c)| m[(r, c)].abs())
            .sum();
        assert_eq!(off_diag, 0.0);
        assert_eq!(m[(0, 0)], m[(1, 1)]);
        assert_relative_eq!(m[(0, 0)], 515.0 * std::f64::consts::PI * 0.25, max_relative = 1e-14);
        assert_relative_eq!(m[(2, 2)], 0.5 * m[(0, 0)] * 0.25, max_relative = 1e-14);
        assert_eq!((m - m.transpose()).abs().max(), 0.0);
        assert_eq!((k - k.transpose()).abs().max(), 0.0);
    }

    #[test]
    fn body_matrices_rejects_buoyancy_imbalance() {
        let err = body_matrices(800.0, 0.5, 1030.0, 9.81).unwrap_err();
        assert!(matches!(err, WaveError::BuoyancyImbalance { .. }));
    }
}
