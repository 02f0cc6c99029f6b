//! Constant-coefficient data of the half-line problem for one spectral
//! parameter: the roots of `mu^2 + lambda mu - 1 = 0`, the companion matrix
//! `A(lambda)`, its spectral projections, and the half-line dichotomy
//! projections `R_+`, `R_-`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used throughout.
pub type ComplexValue = Complex64;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default rejection radius around the band `[-2i, 2i]`.
pub const DEFAULT_BAND_TOL: f64 = 1e-9;

/// Default bound on `|n|` accepted by [`matrix_power`].
pub const DEFAULT_POWER_LIMIT: u64 = 1_000_000;

/// A 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, s: Complex64) -> Mat2 {
        let m = &self.0;
        Mat2([[s * m[0][0], s * m[0][1]], [s * m[1][0], s * m[1][1]]])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.is_finite())
    }

    /// Max entrywise distance to `other`.
    pub fn dist(&self, other: &Mat2) -> f64 {
        (*self - *other).max_abs()
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + (-rhs)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-ONE)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

/// The projection onto the first coordinate, `diag(1, 0)`.
pub const Q_PLUS: Mat2 = Mat2([[ONE, ZERO], [ZERO, ZERO]]);
/// `diag(0, 1)`.
pub const Q_MINUS: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ONE]]);

/// Distance from `lambda` to the segment `[-2i, 2i]`.
pub fn band_distance(lambda: Complex64) -> f64 {
    let excess = (lambda.im.abs() - 2.0).max(0.0);
    lambda.re.hypot(excess)
}

/// All lambda-dependent constant-coefficient data. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralFrame {
    pub lambda: Complex64,
    /// Root of `mu^2 + lambda mu - 1` inside the unit disc.
    pub mu_plus: Complex64,
    /// Root outside the unit disc.
    pub mu_minus: Complex64,
    pub a: Mat2,
    pub a_inv: Mat2,
    pub p_plus: Mat2,
    pub p_minus: Mat2,
    pub q_plus: Mat2,
    pub q_minus: Mat2,
    pub r_plus: Mat2,
    pub r_minus: Mat2,
    pub band_distance: f64,
}

impl SpectralFrame {
    pub fn new(lambda: Complex64) -> Result<Self> {
        spectral_frame(lambda, DEFAULT_BAND_TOL)
    }

    /// `mu_+ - mu_-`, nonzero off the band.
    pub fn mu_gap(&self) -> Complex64 {
        self.mu_plus - self.mu_minus
    }

    /// `mu_+ / mu_- = -mu_+^2`, the contraction ratio between the two modes.
    pub fn mode_ratio(&self) -> Complex64 {
        -self.mu_plus * self.mu_plus
    }

    /// `A_n^x = A + B_n C_n` for a given product `b_n c_n`.
    pub fn a_cross(&self, bc: Complex64) -> Mat2 {
        Mat2::new(bc - self.lambda, ONE, ONE, ZERO)
    }

    /// Explicit inverse of `A_n^x` (its determinant is always `-1`).
    pub fn a_cross_inv(&self, bc: Complex64) -> Mat2 {
        Mat2::new(ZERO, ONE, ONE, self.lambda - bc)
    }
}

/// Builds the frame for `lambda`, rejecting points within `band_tol` of the
/// band. The larger-modulus root is computed first so the quadratic formula
/// never subtracts nearly equal quantities; the other root follows from
/// `mu_+ mu_- = -1`.
pub fn spectral_frame(lambda: Complex64, band_tol: f64) -> Result<SpectralFrame> {
    if !lambda.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite lambda {lambda}")));
    }
    let distance = band_distance(lambda);
    if distance <= band_tol {
        return Err(Error::BandSpectrum {
            lambda,
            distance,
            tol: band_tol,
        });
    }

    let s = (lambda * lambda + 4.0).sqrt();
    let cand_a = (-lambda - s) * 0.5;
    let cand_b = (-lambda + s) * 0.5;
    let mu_minus = if cand_a.norm() >= cand_b.norm() {
        cand_a
    } else {
        cand_b
    };
    let mu_plus = -mu_minus.inv();

    let gap_inv = (mu_plus - mu_minus).inv();
    let a = Mat2::new(-lambda, ONE, ONE, ZERO);
    let a_inv = Mat2::new(ZERO, ONE, ONE, lambda);
    let p_plus = Mat2::new(mu_plus, ONE, ONE, -mu_minus).scale(gap_inv);
    let p_minus = Mat2::IDENTITY - p_plus;
    let r_plus = Mat2::new(ZERO, mu_plus, ZERO, ONE);
    let r_minus = Mat2::new(ONE, -mu_plus, ZERO, ZERO);

    Ok(SpectralFrame {
        lambda,
        mu_plus,
        mu_minus,
        a,
        a_inv,
        p_plus,
        p_minus,
        q_plus: Q_PLUS,
        q_minus: Q_MINUS,
        r_plus,
        r_minus,
        band_distance: distance,
    })
}

/// `A^n` in the spectral form `mu_+^n P_+ + mu_-^n P_-`.
pub fn matrix_power(frame: &SpectralFrame, n: i64) -> Result<Mat2> {
    matrix_power_with_limit(frame, n, DEFAULT_POWER_LIMIT)
}

pub fn matrix_power_with_limit(frame: &SpectralFrame, n: i64, limit: u64) -> Result<Mat2> {
    if n.unsigned_abs() > limit || n.unsigned_abs() > i32::MAX as u64 {
        return Err(Error::PowerLimit { exponent: n, limit });
    }
    if n == 0 {
        return Ok(Mat2::IDENTITY);
    }
    let e = n as i32;
    let out =
        frame.p_plus.scale(frame.mu_plus.powi(e)) + frame.p_minus.scale(frame.mu_minus.powi(e));
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::Overflow { exponent: n })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn residual(mu: Complex64, lambda: Complex64) -> f64 {
        (mu * mu + lambda * mu - 1.0).norm()
    }

    #[test]
    fn real_roots_at_three_and_one() {
        let f = SpectralFrame::new(c(3.0, 0.0)).unwrap();
        assert!((f.mu_plus - c(0.3027756377319946, 0.0)).norm() < 1e-12);
        assert!((f.mu_minus - c(-3.302_775_637_731_995, 0.0)).norm() < 1e-12);
        assert!(residual(f.mu_plus, f.lambda) < 1e-14);
        assert!(residual(f.mu_minus, f.lambda) < 1e-14);

        let f = SpectralFrame::new(c(1.0, 0.0)).unwrap();
        assert!((f.mu_plus.re - 0.6180339887498949).abs() < 1e-12);
        assert!((f.mu_minus.re + 1.618033988749895).abs() < 1e-12);
    }

    #[test]
    fn imaginary_lambda_above_band() {
        let f = SpectralFrame::new(c(0.0, 2.5)).unwrap();
        assert!((f.mu_plus - c(0.0, -0.5)).norm() < 1e-14);
        assert!((f.mu_minus - c(0.0, -2.0)).norm() < 1e-14);
        assert!(residual(f.mu_plus, f.lambda) < 1e-14);
    }

    #[test]
    fn band_points_are_rejected() {
        for lambda in [c(0.0, 1.0), c(0.0, -2.0), c(1e-12, 0.3)] {
            match SpectralFrame::new(lambda) {
                Err(Error::BandSpectrum { .. }) => {}
                other => panic!("expected BandSpectrum for {lambda}, got {other:?}"),
            }
        }
        assert!(spectral_frame(c(0.05, 0.0), 0.1).is_err());
        assert!(spectral_frame(c(0.0, 2.2), 0.1).is_ok());
    }

    #[test]
    fn large_lambda_has_no_cancellation() {
        let lambda = c(1e8, 0.0);
        let f = SpectralFrame::new(lambda).unwrap();
        // mu_+ ~ 1/lambda - 1/lambda^3
        assert!((f.mu_plus.re * 1e8 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn power_examples() {
        let f = SpectralFrame::new(c(3.0, 0.0)).unwrap();
        assert_eq!(matrix_power(&f, 0).unwrap(), Mat2::IDENTITY);
        let inv = matrix_power(&f, -1).unwrap();
        let expected = Mat2::new(ZERO, ONE, ONE, c(3.0, 0.0));
        assert!(inv.dist(&expected) < 1e-14);
        assert!(matrix_power(&f, 1).unwrap().dist(&f.a) < 1e-14);
    }

    #[test]
    fn power_limits_and_overflow() {
        let f = SpectralFrame::new(c(3.0, 0.0)).unwrap();
        assert!(matches!(
            matrix_power(&f, 2_000_000),
            Err(Error::PowerLimit { .. })
        ));
        assert!(matches!(matrix_power(&f, 900), Err(Error::Overflow { .. })));
        assert!(matches!(
            matrix_power(&f, -900),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn dichotomy_relations() {
        let f = SpectralFrame::new(c(-0.7, 1.9)).unwrap();
        let tol = 1e-12;
        assert!((f.a * f.r_plus).dist(&f.r_plus.scale(f.mu_plus)) < tol);
        assert!((f.r_minus * f.a_inv).dist(&f.r_minus.scale(-f.mu_plus)) < tol);
        assert!((f.r_plus * f.q_plus).max_abs() < tol);
        assert!((f.r_plus * f.p_plus).dist(&f.p_plus) < tol);
        assert!((f.p_plus * f.r_plus).dist(&f.r_plus) < tol);
    }

    #[test]
    fn a_cross_inverse() {
        let f = SpectralFrame::new(c(0.4, -0.3)).unwrap();
        let bc = c(1.7, 0.2);
        let prod = f.a_cross(bc) * f.a_cross_inv(bc);
        assert!(prod.dist(&Mat2::IDENTITY) < 1e-15);
        assert!((f.a_cross(bc).det() + 1.0).norm() < 1e-15);
    }
}
