//! Spectral mollification filters for backward heat and fractional
//! diffusion problems on the plane.
//!
//! The crate reconstructs an initial state `u(.,0)` from a noisy final
//! state `g = u(.,T)` of the diffusion equation
//! `du/dt + gamma(t) (-Laplacian)^tau u = 0` by minimizing
//! `||A u - g||^2 + ||(I - C_beta) u||^2`, where `A` is the diffusion
//! operator and `C_beta` a mollifier. Both operators are Fourier
//! multipliers, so the minimizer is a closed-form spectral filter.
//!
//! Module map:
//! - [`grid`], [`field`], [`fourier`]: discretization, fields, and the
//!   quadrature-corrected FFT pair;
//! - [`forward`]: conductivity integrals and the diffusion multiplier,
//!   including its frequency-truncated variant;
//! - [`mollifier`]: mollifier symbols and the penalty `|1 - phihat|^2`;
//! - [`filter`]: the reconstruction filter, the discrepancy functional and
//!   both parameter selection rules;
//! - [`problems`]: the four built-in benchmark problems;
//! - [`noise`]: calibrated Gaussian noise with reproducible streams;
//! - [`logsource`]: logarithmic source calculus (`f_q`, `Theta_q`);
//! - [`experiment`]: single runs, Monte Carlo studies, convergence-rate
//!   curves and their CSV formats.

pub mod error;
pub mod experiment;
pub mod field;
pub mod filter;
pub mod forward;
pub mod fourier;
pub mod grid;
pub mod logsource;
pub mod mollifier;
pub mod noise;
pub mod problems;

pub use error::{Error, Result};
pub use field::{RealField, SpectralField};
pub use filter::{FilterSpec, SelectionResult, SelectionRule};
pub use forward::{Conductivity, DiffusionSymbol};
pub use fourier::{forward_ft, inverse_ft};
pub use grid::Grid2D;
pub use mollifier::MollifierSymbol;
pub use noise::NoiseSpec;
pub use problems::ProblemSpec;
