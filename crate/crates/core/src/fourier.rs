//! Discrete approximation of the continuous Fourier transform
//!
//! `F(f)(xi) = integral of f(x) exp(-2 pi i x . xi) dx`
//!
//! on the half-sample grids of [`Grid2D`]. The quadrature
//!
//! `F(f)(xi_k) ~ kappa^2 sum_j f(x_j) exp(-2 pi i x_j . xi_k)`
//!
//! factors per axis into a pre-phase, a plain FFT and a post-phase, because
//! `x_j xi_k = C + alpha j + alpha k + j k / N` with constants
//! `C = N/4 - 1/2 + 1/(4N)` and `alpha = -1/2 + 1/(2N)`. With the matched
//! weights (`kappa` per spatial axis, `xi_spacing` per frequency axis) the
//! transform is exactly unitary on the grid, so Parseval holds to rounding
//! and the inverse is the conjugate-phase FFT.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::field::{RealField, SpectralField};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction))
}

/// Per-axis phase factors `w_j = (-1)^j exp(-i pi j / N)` and
/// `p_k = exp(-2 pi i C) (-1)^k exp(-i pi k / N)`; the inverse transform
/// uses their conjugates.
fn phase_vectors(n: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let nf = n as f64;
    // C reduced mod 1 before multiplying by 2 pi to keep the argument small.
    let c_frac = (nf / 4.0).fract() - 0.5 + 0.25 / nf;
    let head = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * c_frac);
    let mut w = Vec::with_capacity(n);
    let mut p = Vec::with_capacity(n);
    for j in 0..n {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let tw = Complex64::from_polar(sign, -std::f64::consts::PI * j as f64 / nf);
        w.push(tw);
        p.push(head * tw);
    }
    (w, p)
}

/// In-place 2-D FFT over a row-major `n x n` buffer: rows, transpose,
/// rows again, transpose back.
fn fft2_inplace(buf: &mut [Complex64], n: usize, direction: FftDirection) {
    let fft = plan(n, direction);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for row in buf.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose(buf, n);
    for row in buf.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose(buf, n);
}

fn transpose(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// Forward transform: quadrature of the continuous Fourier integral on the
/// grid, `O(N^2 log N)`.
pub fn forward_ft(f: &RealField) -> Result<SpectralField> {
    f.check_finite()?;
    let grid = *f.grid();
    let n = grid.n();
    let (w, p) = phase_vectors(n);
    let mut buf: Vec<Complex64> = Vec::with_capacity(grid.len());
    for i in 0..n {
        let wi = w[i];
        for j in 0..n {
            buf.push(wi * w[j] * f.values()[i * n + j]);
        }
    }
    fft2_inplace(&mut buf, n, FftDirection::Forward);
    let k2 = grid.kappa() * grid.kappa();
    for i in 0..n {
        let pi = p[i] * k2;
        for j in 0..n {
            buf[i * n + j] *= pi * p[j];
        }
    }
    Ok(SpectralField::from_raw(grid, buf))
}

/// Inverse transform; exact left-inverse of [`forward_ft`] up to rounding.
///
/// The imaginary residue of the reconstruction is discarded after checking
/// that its largest modulus is at most `1e-8` times the largest absolute
/// sample, which fails on spectra that are not Hermitian-symmetric.
pub fn inverse_ft(fhat: &SpectralField) -> Result<RealField> {
    fhat.check_finite()?;
    let grid = *fhat.grid();
    let n = grid.n();
    let (w, p) = phase_vectors(n);
    let mut buf: Vec<Complex64> = Vec::with_capacity(grid.len());
    for k1 in 0..n {
        let wk = w[k1].conj();
        for k2 in 0..n {
            buf.push(wk * w[k2].conj() * fhat.values()[k1 * n + k2]);
        }
    }
    fft2_inplace(&mut buf, n, FftDirection::Inverse);
    let s2 = grid.xi_spacing() * grid.xi_spacing();
    let mut out = Vec::with_capacity(grid.len());
    let mut max_re: f64 = 0.0;
    let mut max_im: f64 = 0.0;
    for i in 0..n {
        let qi = p[i].conj() * s2;
        for j in 0..n {
            let v = qi * p[j].conj() * buf[i * n + j];
            max_re = max_re.max(v.re.abs());
            max_im = max_im.max(v.im.abs());
            out.push(v.re);
        }
    }
    if max_im > 1e-8 * max_re {
        return Err(Error::InvalidField(format!(
            "imaginary residue {max_im:.3e} exceeds 1e-8 x max |f| = {:.3e}; \
             spectrum is not Hermitian-symmetric",
            1e-8 * max_re
        )));
    }
    RealField::from_values(grid, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn random_field(grid: Grid2D, seed: u64) -> RealField {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        RealField::from_fn(grid, |_, _| rng.gen::<f64>() - 0.5)
    }

    /// Direct O(N^3) evaluation of the same quadrature through per-axis
    /// kernel matrices; independent of the FFT path.
    fn direct_dft(f: &RealField) -> SpectralField {
        let g = *f.grid();
        let n = g.n();
        let mut kernel = vec![Complex64::default(); n * n];
        for k in 0..n {
            for j in 0..n {
                let phase = -2.0 * std::f64::consts::PI * g.x(j) * g.xi(k);
                kernel[k * n + j] = Complex64::from_polar(1.0, phase);
            }
        }
        // S = kappa^2 * K F K^T
        let mut tmp = vec![Complex64::default(); n * n];
        for k in 0..n {
            for j2 in 0..n {
                let mut acc = Complex64::default();
                for j1 in 0..n {
                    acc += kernel[k * n + j1] * f.values()[j1 * n + j2];
                }
                tmp[k * n + j2] = acc;
            }
        }
        let mut out = vec![Complex64::default(); n * n];
        let w = g.kappa() * g.kappa();
        for k1 in 0..n {
            for k2 in 0..n {
                let mut acc = Complex64::default();
                for j2 in 0..n {
                    acc += tmp[k1 * n + j2] * kernel[k2 * n + j2];
                }
                out[k1 * n + k2] = acc * w;
            }
        }
        SpectralField::from_raw(g, out)
    }

    #[test]
    fn zero_maps_to_zero_both_ways() {
        let g = Grid2D::new(16, 3.0).unwrap();
        let z = forward_ft(&RealField::zeros(g)).unwrap();
        assert!(z.values().iter().all(|v| v.norm() == 0.0));
        let back = inverse_ft(&SpectralField::zeros(g)).unwrap();
        assert!(back.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn matches_direct_dft_at_n64() {
        let g = Grid2D::new(64, 10.0).unwrap();
        let f = random_field(g, 9);
        let fast = forward_ft(&f).unwrap();
        let slow = direct_dft(&f);
        let err = fast.sub(&slow).l2_norm() / slow.l2_norm();
        assert!(err < 1e-10, "relative deviation {err:.3e}");
    }

    #[test]
    fn gaussian_pair_exp_minus_pi_x2() {
        let g = Grid2D::new(256, 10.0).unwrap();
        let f = RealField::from_fn(g, |x, y| (-std::f64::consts::PI * (x * x + y * y)).exp());
        let fhat = forward_ft(&f).unwrap();
        let mut worst = 0.0f64;
        for k1 in 0..g.n() {
            for k2 in 0..g.n() {
                let exact = (-std::f64::consts::PI * g.xi_norm_sq(k1, k2)).exp();
                worst = worst.max((fhat.get(k1, k2) - exact).norm());
            }
        }
        assert!(worst <= 1e-8, "max abs error {worst:.3e}");
    }

    #[test]
    fn gaussian_pair_standard_normal_kernel() {
        let g = Grid2D::new(256, 10.0).unwrap();
        let norm = 1.0 / (2.0 * std::f64::consts::PI);
        let f = RealField::from_fn(g, |x, y| norm * (-(x * x + y * y) / 2.0).exp());
        let fhat = forward_ft(&f).unwrap();
        let c = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
        let mut worst = 0.0f64;
        for k1 in 0..g.n() {
            for k2 in 0..g.n() {
                let exact = (-c * g.xi_norm_sq(k1, k2)).exp();
                worst = worst.max((fhat.get(k1, k2) - exact).norm());
            }
        }
        assert!(worst <= 1e-8, "max abs error {worst:.3e}");
    }

    #[test]
    fn round_trip_on_white_noise() {
        let g = Grid2D::new(64, 5.0).unwrap();
        let f = random_field(g, 1234);
        let back = inverse_ft(&forward_ft(&f).unwrap()).unwrap();
        let rel = back.sub(&f).l2_norm() / f.l2_norm();
        assert!(rel <= 1e-10, "round-trip relative error {rel:.3e}");
    }

    #[test]
    fn parseval_on_white_noise() {
        let g = Grid2D::new(64, 10.0).unwrap();
        let f = random_field(g, 77);
        let a = f.l2_norm();
        let b = forward_ft(&f).unwrap().l2_norm();
        assert!((a - b).abs() / a <= 1e-8);
    }

    #[test]
    fn hermitian_symmetry_of_real_input() {
        let g = Grid2D::new(32, 2.0).unwrap();
        let fhat = forward_ft(&random_field(g, 5)).unwrap();
        let n = g.n();
        let mut worst = 0.0f64;
        for k1 in 0..n {
            for k2 in 0..n {
                let a = fhat.get(k1, k2);
                let b = fhat.get(n - 1 - k1, n - 1 - k2).conj();
                worst = worst.max((a - b).norm());
            }
        }
        let scale = fhat.values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
        assert!(worst <= 1e-12 * scale.max(1.0), "defect {worst:.3e}");
    }

    #[test]
    fn linearity() {
        let g = Grid2D::new(32, 4.0).unwrap();
        let f1 = random_field(g, 1);
        let f2 = random_field(g, 2);
        let (a, b) = (0.7312, -2.25);
        let lhs = forward_ft(&f1.scale(a).axpy(b, &f2)).unwrap();
        let f1h = forward_ft(&f1).unwrap();
        let f2h = forward_ft(&f2).unwrap();
        let mut worst = 0.0f64;
        for (l, (v1, v2)) in lhs.values().iter().zip(f1h.values().iter().zip(f2h.values())) {
            worst = worst.max((l - (a * v1 + b * v2)).norm());
        }
        let scale = lhs.values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
        assert!(worst <= 1e-12 * scale, "linearity defect {worst:.3e}");
    }

    #[test]
    fn rejects_non_hermitian_spectrum() {
        let g = Grid2D::new(16, 1.0).unwrap();
        let mut s = SpectralField::zeros(g);
        s.values_mut()[3] = Complex64::new(0.0, 1.0);
        assert!(matches!(inverse_ft(&s), Err(Error::InvalidField(_))));
    }

    #[test]
    fn rejects_non_finite_input() {
        let g = Grid2D::new(16, 1.0).unwrap();
        let mut f = RealField::zeros(g);
        f.values_mut()[0] = f64::INFINITY;
        assert!(forward_ft(&f).is_err());
        let mut s = SpectralField::zeros(g);
        s.values_mut()[0] = Complex64::new(f64::NAN, 0.0);
        assert!(inverse_ft(&s).is_err());
    }
}
