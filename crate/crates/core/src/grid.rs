//! Uniform discretization of the plane and of its frequency domain.

use crate::error::{Error, Result};

/// Uniform N x N grid on `[-L, L]^2` with the matched frequency grid on
/// `[-Omega, Omega]^2`, `Omega = N / (4 L)`.
///
/// Both domains use the same half-sample node convention
/// `x(i) = -L + (i + 1/2) kappa` and `xi(k) = -Omega + (k + 1/2) sigma`
/// (0-based indices), so no node falls on the origin of either domain and
/// the node sets are symmetric under negation: `-x(i) = x(N-1-i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    n: usize,
    l: f64,
    kappa: f64,
    omega: f64,
    xi_spacing: f64,
}

impl Grid2D {
    /// Builds the grid for `n` samples per axis on `[-l, l]^2`.
    ///
    /// `n` must be even and positive; `l` must be positive and finite.
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n == 0 || n % 2 != 0 {
            return Err(Error::domain(format!(
                "grid size must be a positive even integer, got {n}"
            )));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::domain(format!(
                "domain half-width must be positive and finite, got {l}"
            )));
        }
        let kappa = 2.0 * l / n as f64;
        let omega = n as f64 / (4.0 * l);
        let xi_spacing = 1.0 / (2.0 * l);
        Ok(Grid2D {
            n,
            l,
            kappa,
            omega,
            xi_spacing,
        })
    }

    /// Samples per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Half-width of the spatial domain.
    pub fn l(&self) -> f64 {
        self.l
    }

    /// Spatial spacing `2L / N`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Frequency half-width `N / (4 L)`.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Frequency spacing `1 / (2 L)`.
    pub fn xi_spacing(&self) -> f64 {
        self.xi_spacing
    }

    /// Total number of nodes `N^2`.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spatial node along one axis, `i` in `0..n`.
    pub fn x(&self, i: usize) -> f64 {
        -self.l + (i as f64 + 0.5) * self.kappa
    }

    /// Frequency node along one axis, `k` in `0..n`.
    pub fn xi(&self, k: usize) -> f64 {
        -self.omega + (k as f64 + 0.5) * self.xi_spacing
    }

    /// `|xi|^2` at the frequency node `(k1, k2)`.
    pub fn xi_norm_sq(&self, k1: usize, k2: usize) -> f64 {
        let a = self.xi(k1);
        let b = self.xi(k2);
        a * a + b * b
    }

    /// Row-major index of node `(i, j)`, `i` indexing the first axis.
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    pub(crate) fn check_same(&self, other: &Grid2D, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{what}: {}x{} on [-{},{}] vs {}x{} on [-{},{}]",
                self.n, self.n, self.l, self.l, other.n, other.n, other.l, other.l
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_identities() {
        let g = Grid2D::new(256, 10.0).unwrap();
        assert_eq!(g.kappa() * g.n() as f64, 2.0 * g.l());
        assert_eq!(g.omega(), 256.0 / 40.0);
        assert_eq!(g.xi_spacing() * g.n() as f64, 2.0 * g.omega());
    }

    #[test]
    fn node_formulas_match_half_sample_convention() {
        let g = Grid2D::new(4, 1.0).unwrap();
        // kappa = 0.5, nodes at -0.75, -0.25, 0.25, 0.75
        let xs: Vec<f64> = (0..4).map(|i| g.x(i)).collect();
        assert_eq!(xs, vec![-0.75, -0.25, 0.25, 0.75]);
        // omega = 1, sigma = 0.5, nodes at -0.75, -0.25, 0.25, 0.75
        let xis: Vec<f64> = (0..4).map(|k| g.xi(k)).collect();
        assert_eq!(xis, vec![-0.75, -0.25, 0.25, 0.75]);
    }

    #[test]
    fn nodes_are_negation_symmetric() {
        let g = Grid2D::new(64, 10.0).unwrap();
        for i in 0..64 {
            assert!((g.x(i) + g.x(63 - i)).abs() < 1e-12);
            assert!((g.xi(i) + g.xi(63 - i)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_odd_zero_and_bad_widths() {
        assert!(Grid2D::new(0, 1.0).is_err());
        assert!(Grid2D::new(17, 1.0).is_err());
        assert!(Grid2D::new(16, 0.0).is_err());
        assert!(Grid2D::new(16, -2.0).is_err());
        assert!(Grid2D::new(16, f64::NAN).is_err());
    }
}
