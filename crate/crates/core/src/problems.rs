//! The four built-in benchmark problems: initial states, their diffusion
//! symbols and exact final data. Custom problems wrap a user-supplied
//! initial field.

use crate::error::{Error, Result};
use crate::field::RealField;
use crate::forward::{apply_forward, Conductivity, DiffusionSymbol};
use crate::grid::Grid2D;

/// Final time shared by all built-in problems.
pub const T_FINAL: f64 = 1.0;

/// Initial-data generator of a problem.
#[derive(Debug, Clone)]
pub enum InitialData {
    /// `exp(-x1^2 - x2^2)`.
    Gaussian,
    /// Product of two triangle impulses of half-width 3.
    TriangleProduct,
    /// Indicator of `[-5, 5]^2`.
    BoxIndicator,
    /// Head phantom scaled to `[-L, L]^2`, intensities clipped to `[0, 1]`.
    HeadPhantom,
    /// A fixed user-supplied field (custom problems).
    Field(RealField),
}

/// A reconstruction problem: fractional exponent, conductivity and initial
/// state.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    id: Option<u8>,
    pub tau: f64,
    pub conductivity: Conductivity,
    pub initial: InitialData,
    /// Regularity of the initial state, for reporting only.
    pub sobolev_note: &'static str,
}

impl ProblemSpec {
    /// One of the four built-in examples.
    pub fn example(id: u8) -> Result<Self> {
        let spec = match id {
            1 => ProblemSpec {
                id: Some(1),
                tau: 1.0,
                conductivity: Conductivity::Affine { c0: 0.3, c1: -0.2, t_final: T_FINAL },
                initial: InitialData::Gaussian,
                sobolev_note: "in H^p for every p",
            },
            2 => ProblemSpec {
                id: Some(2),
                tau: 1.0,
                conductivity: Conductivity::Affine { c0: 0.2, c1: -0.1, t_final: T_FINAL },
                initial: InitialData::TriangleProduct,
                sobolev_note: "in H^1",
            },
            3 => ProblemSpec {
                id: Some(3),
                tau: 1.0,
                conductivity: Conductivity::constant(0.1, T_FINAL),
                initial: InitialData::BoxIndicator,
                sobolev_note: "in H^p only for p < 1/2",
            },
            4 => ProblemSpec {
                id: Some(4),
                tau: 0.5,
                conductivity: Conductivity::constant(0.1, T_FINAL),
                initial: InitialData::HeadPhantom,
                sobolev_note: "not in any H^p, p > 0",
            },
            other => {
                return Err(Error::domain(format!(
                    "unknown example id {other}, expected 1..=4"
                )))
            }
        };
        Ok(spec)
    }

    /// A custom problem around a user-supplied initial field.
    pub fn custom(tau: f64, conductivity: Conductivity, u0: RealField) -> Self {
        ProblemSpec {
            id: None,
            tau,
            conductivity,
            initial: InitialData::Field(u0),
            sobolev_note: "user supplied",
        }
    }

    /// Built-in example id, if any.
    pub fn id(&self) -> Option<u8> {
        self.id
    }

    /// Samples the initial state at the grid nodes.
    pub fn make_initial(&self, grid: &Grid2D) -> Result<RealField> {
        match &self.initial {
            InitialData::Gaussian => Ok(RealField::from_fn(*grid, |x, y| (-(x * x + y * y)).exp())),
            InitialData::TriangleProduct => {
                Ok(RealField::from_fn(*grid, |x, y| triangle(x) * triangle(y)))
            }
            InitialData::BoxIndicator => Ok(RealField::from_fn(*grid, |x, y| {
                if x.abs() <= 5.0 && y.abs() <= 5.0 {
                    1.0
                } else {
                    0.0
                }
            })),
            InitialData::HeadPhantom => {
                let l = grid.l();
                Ok(RealField::from_fn(*grid, |x, y| phantom(x / l, y / l)))
            }
            InitialData::Field(f) => {
                grid.check_same(f.grid(), "custom initial data")?;
                Ok(f.clone())
            }
        }
    }

    /// The diffusion multiplier of this problem.
    pub fn diffusion_symbol(&self) -> Result<DiffusionSymbol> {
        DiffusionSymbol::new(self.tau, self.conductivity.integrate()?)
    }

    /// Exact final data: the diffusion symbol applied to the initial state.
    pub fn make_exact_data(&self, grid: &Grid2D) -> Result<RealField> {
        let u0 = self.make_initial(grid)?;
        apply_forward(&self.diffusion_symbol()?, &u0)
    }
}

/// Triangle impulse of half-width 3: `1 - |t| / 3` on `[-3, 3]`, else 0.
fn triangle(t: f64) -> f64 {
    if t.abs() <= 3.0 {
        1.0 - t.abs() / 3.0
    } else {
        0.0
    }
}

/// One phantom ellipse: additive intensity, semi-axes, center, rotation in
/// degrees.
struct Ellipse {
    intensity: f64,
    a: f64,
    b: f64,
    x0: f64,
    y0: f64,
    phi_deg: f64,
}

/// Shepp-Logan ellipse geometry with the modified (Toft) intensity set,
/// which keeps tissue contrast inside `[0, 1]`; the original intensities
/// saturate everywhere once clipped to that range.
const PHANTOM: [Ellipse; 10] = [
    Ellipse { intensity: 1.0, a: 0.69, b: 0.92, x0: 0.0, y0: 0.0, phi_deg: 0.0 },
    Ellipse { intensity: -0.8, a: 0.6624, b: 0.874, x0: 0.0, y0: -0.0184, phi_deg: 0.0 },
    Ellipse { intensity: -0.2, a: 0.11, b: 0.31, x0: 0.22, y0: 0.0, phi_deg: -18.0 },
    Ellipse { intensity: -0.2, a: 0.16, b: 0.41, x0: -0.22, y0: 0.0, phi_deg: 18.0 },
    Ellipse { intensity: 0.1, a: 0.21, b: 0.25, x0: 0.0, y0: 0.35, phi_deg: 0.0 },
    Ellipse { intensity: 0.1, a: 0.046, b: 0.046, x0: 0.0, y0: 0.1, phi_deg: 0.0 },
    Ellipse { intensity: 0.1, a: 0.046, b: 0.046, x0: 0.0, y0: -0.1, phi_deg: 0.0 },
    Ellipse { intensity: 0.1, a: 0.046, b: 0.023, x0: -0.08, y0: -0.605, phi_deg: 0.0 },
    Ellipse { intensity: 0.1, a: 0.023, b: 0.023, x0: 0.0, y0: -0.606, phi_deg: 0.0 },
    Ellipse { intensity: 0.1, a: 0.023, b: 0.046, x0: 0.06, y0: -0.605, phi_deg: 0.0 },
];

/// Phantom intensity at a point of the unit square `[-1, 1]^2`.
fn phantom(x: f64, y: f64) -> f64 {
    let mut v = 0.0;
    for e in &PHANTOM {
        let phi = e.phi_deg.to_radians();
        let (s, c) = phi.sin_cos();
        let dx = x - e.x0;
        let dy = y - e.y0;
        let xr = dx * c + dy * s;
        let yr = -dx * s + dy * c;
        if (xr / e.a).powi(2) + (yr / e.b).powi(2) <= 1.0 {
            v += e.intensity;
        }
    }
    v.clamp(0.0, 1.0)
}
