//! Mollifier operators `C_beta f = phi_beta * f` as Fourier multipliers
//! `phihat(beta xi)`, together with the penalty symbol `|1 - phihat(beta xi)|^2`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::RealField;
use crate::fourier::{forward_ft, inverse_ft};
use crate::grid::Grid2D;

/// Radial profile of the kernel transform, `r = |xi| -> phihat(r)`.
type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A mollifier kernel described by its radial Fourier transform and the
/// small-frequency exponent `s` of `|1 - phihat(xi)| ~ |xi|^s`.
///
/// The default Gaussian kernel `phi(x) = exp(-|x|^2 / 2) / (2 pi)` has
/// `phihat(xi) = exp(-2 pi^2 |xi|^2)` and `s = 2`. Alternate radial kernels
/// can be registered through [`MollifierSymbol::custom`]; their required
/// properties (unit mass, strict decrease, `|xi|^s` behavior near zero) are
/// spot-checked by sampling at registration.
#[derive(Clone)]
pub struct MollifierSymbol {
    kind: Kind,
    s: f64,
}

#[derive(Clone)]
enum Kind {
    Gaussian,
    Custom(Profile),
}

impl fmt::Debug for MollifierSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::Gaussian => write!(f, "MollifierSymbol::Gaussian {{ s: {} }}", self.s),
            Kind::Custom(_) => write!(f, "MollifierSymbol::Custom {{ s: {} }}", self.s),
        }
    }
}

impl Default for MollifierSymbol {
    fn default() -> Self {
        Self::gaussian()
    }
}

impl MollifierSymbol {
    /// The standard normal convolution kernel (`s = 2`).
    pub fn gaussian() -> Self {
        MollifierSymbol {
            kind: Kind::Gaussian,
            s: 2.0,
        }
    }

    /// Registers a custom radial kernel transform with the stated
    /// small-frequency exponent, verifying the mollifier conditions on a
    /// sample of radii.
    pub fn custom(profile: impl Fn(f64) -> f64 + Send + Sync + 'static, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::domain(format!("exponent s must be positive, got {s}")));
        }
        let m = MollifierSymbol {
            kind: Kind::Custom(Arc::new(profile)),
            s,
        };
        if (m.profile(0.0) - 1.0).abs() > 1e-12 {
            return Err(Error::domain("kernel transform must equal 1 at the origin"));
        }
        let mut prev = 1.0;
        for i in 1..=400 {
            let r = 1e-3 * 1.05f64.powi(i);
            let v = m.profile(r);
            if !(v.is_finite() && v.abs() < 1.0) {
                return Err(Error::domain(format!(
                    "kernel transform must satisfy |phihat| < 1 away from 0, got {v} at r = {r}"
                )));
            }
            if v > prev + 1e-12 {
                return Err(Error::domain(format!(
                    "kernel transform must be radially decreasing, violated at r = {r}"
                )));
            }
            prev = v;
        }
        // |1 - phihat(r)| ~ r^s near zero: check the log-log slope
        let (r0, r1) = (1e-4, 1e-2);
        let d0 = (1.0 - m.profile(r0)).abs();
        let d1 = (1.0 - m.profile(r1)).abs();
        if d0 <= 0.0 || d1 <= 0.0 {
            return Err(Error::domain("kernel transform reaches 1 away from 0"));
        }
        let slope = (d1.ln() - d0.ln()) / (r1.ln() - r0.ln());
        if (slope - s).abs() > 0.1 {
            return Err(Error::domain(format!(
                "small-frequency exponent mismatch: declared {s}, measured {slope:.3}"
            )));
        }
        Ok(m)
    }

    /// Declared small-frequency exponent.
    pub fn s(&self) -> f64 {
        self.s
    }

    /// `phihat(r)` at radius `r >= 0`.
    pub(crate) fn profile(&self, r: f64) -> f64 {
        match &self.kind {
            Kind::Gaussian => {
                let c = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
                (-c * r * r).exp()
            }
            Kind::Custom(p) => p(r),
        }
    }

    /// Multiplier value `phihat(beta xi)` at a frequency point.
    pub fn phi_hat(&self, beta: f64, xi1: f64, xi2: f64) -> Result<f64> {
        check_beta(beta)?;
        Ok(self.profile(beta * (xi1 * xi1 + xi2 * xi2).sqrt()))
    }

    /// Penalty value `|1 - phihat(beta xi)|^2` at a frequency point.
    pub fn penalty_symbol(&self, beta: f64, xi1: f64, xi2: f64) -> Result<f64> {
        check_beta(beta)?;
        Ok(self.penalty_at(beta, (xi1 * xi1 + xi2 * xi2).sqrt()))
    }

    pub(crate) fn penalty_at(&self, beta: f64, r: f64) -> f64 {
        let d = 1.0 - self.profile(beta * r);
        d * d
    }

    /// Penalty values at every frequency node of `grid`, row-major.
    pub fn penalty_on(&self, beta: f64, grid: &Grid2D) -> Vec<f64> {
        let n = grid.n();
        let mut out = Vec::with_capacity(grid.len());
        for k1 in 0..n {
            for k2 in 0..n {
                out.push(self.penalty_at(beta, grid.xi_norm_sq(k1, k2).sqrt()));
            }
        }
        out
    }

    /// Applies `C_beta` as the multiplier `phihat(beta xi)`.
    pub fn apply(&self, beta: f64, f: &RealField) -> Result<RealField> {
        check_beta(beta)?;
        let grid = *f.grid();
        let n = grid.n();
        let mut fhat = forward_ft(f)?;
        for k1 in 0..n {
            let xi1 = grid.xi(k1);
            for k2 in 0..n {
                let r = (xi1 * xi1 + grid.xi(k2) * grid.xi(k2)).sqrt();
                fhat.values_mut()[k1 * n + k2] *= self.profile(beta * r);
            }
        }
        inverse_ft(&fhat)
    }

    /// `(min, max)` of the penalty on the unit circle `|xi| = 1`. Every
    /// registered kernel is radial, so the two extremes coincide at
    /// `|1 - phihat(beta)|^2`.
    pub fn penalty_extremes_on_unit_circle(&self, beta: f64) -> Result<(f64, f64)> {
        check_beta(beta)?;
        let v = self.penalty_at(beta, 1.0);
        Ok((v, v))
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "mollification radius must be positive, got {beta}"
        )))
    }
}
