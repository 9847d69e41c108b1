//! Frequency-domain finite-element solver and optimal-control suite for
//! minimizing the wave-induced motion of a floating rigid body.
//!
//! Everything lives on a 2D vertical slice (x–z plane): the fluid occupies a
//! rectangle of depth `h0` and half-width `L` minus a half-submerged circular
//! body at the origin. The air-water interface carries a control region on
//! both sides of the body where either an active surface pressure is applied
//! or a passive floating device (tensioned membrane / thin elastic plate) is
//! tuned.
//!
//! # Time convention
//!
//! All harmonic fields use `e^{+jωt}`: a physical field `F(x, t)` is
//! `Re{ f(x) e^{jωt} }` with complex amplitude `f`. Every sign in the
//! radiation operators (`α = jk` on the truncation lines, `ᾱ` in the adjoint)
//! and in the coupled state/adjoint systems follows this convention. Mixing
//! conventions is the classic failure mode; do not flip signs locally.
//!
//! # Modules
//!
//! - [`geometry`] — slice/channel mesh construction, validation, text I/O
//! - [`wave`] — dispersion relation, incident wave, radiation coefficient,
//!   rigid-body mass/stiffness matrices
//! - [`fem`] — P2 Galerkin assembly of all discrete operators and the
//!   control-dependent tensor contractions
//! - [`solver`] — coupled forward and adjoint solves for the three control
//!   modes
//! - [`ocp`] — cost functional, one-shot LQ pressure control, projected
//!   gradient for the passive devices, finite-difference gradient checks
//! - [`linalg`] — sparse/dense kernels shared by the above

pub mod fem;
pub mod geometry;
pub mod linalg;
pub mod ocp;
pub mod solver;
pub mod wave;

pub use num_complex::Complex64;

/// Imaginary unit, matching the paper-style `j` notation used throughout.
pub const J: Complex64 = Complex64::new(0.0, 1.0);
