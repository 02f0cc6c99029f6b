//! The continued fraction
//! `g_+(lambda) = 1 / (lambda/rho_1 + 1 / (lambda/rho_2 + ...))`
//! and the characteristic function `G+ = mu_+ z+_0 (g_+ + lambda/rho_0)`.
//!
//! The fraction converges for `Re lambda > 0`. It is evaluated by backward
//! recurrence from a finite depth `D`, seeded with the fixed point `mu_+` of
//! `t = 1/(lambda + t)` (the limit of the tail, since `rho_n -> 1`).

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jost::{self, JostSolution};
use crate::json;
use crate::policy::TruncationPolicy;
use crate::problem::{ProblemModel, RhoModel};
use crate::spectral::{SpectralFrame, ZERO};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContFracPolicy {
    /// Tolerance on `|g(D) - g(2D)|`, relative to `max(1, |g|)`.
    pub tol: f64,
    pub initial_depth: usize,
    pub max_depth: usize,
    /// Seed the tail with 0 instead of `mu_+` (slower; for debugging).
    pub zero_seed: bool,
}

impl Default for ContFracPolicy {
    fn default() -> Self {
        ContFracPolicy {
            tol: 1e-13,
            initial_depth: 64,
            max_depth: 1 << 24,
            zero_seed: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuedFractionValue {
    #[serde(serialize_with = "json::complex")]
    pub value: Complex64,
    pub depth_used: usize,
    pub converged: bool,
    /// `|arg lambda| > pi/2 - 1e-3`, where convergence degenerates.
    pub near_imaginary_axis: bool,
}

fn evaluate(
    rho: &RhoModel,
    frame: &SpectralFrame,
    depth: usize,
    seed: Complex64,
) -> Result<Complex64> {
    let mut t = seed;
    for k in (1..=depth).rev() {
        t = (frame.lambda / rho.value(k)? + t).inv();
    }
    Ok(t)
}

/// `g_+(lambda)` with doubling depth.
pub fn g_plus(
    rho: &RhoModel,
    frame: &SpectralFrame,
    policy: &ContFracPolicy,
) -> Result<ContinuedFractionValue> {
    if !(frame.lambda.re > 0.0) {
        return Err(Error::Domain {
            lambda: frame.lambda,
            reason: "the continued fraction needs Re lambda > 0",
        });
    }
    let seed = if policy.zero_seed {
        ZERO
    } else {
        frame.mu_plus
    };
    let near_imaginary_axis = frame.lambda.arg().abs() > FRAC_PI_2 - 1e-3;
    let mut depth = policy.initial_depth.max(1);
    let mut prev = evaluate(rho, frame, depth, seed)?;
    let mut last_change = f64::INFINITY;
    while depth * 2 <= policy.max_depth {
        depth *= 2;
        let next = evaluate(rho, frame, depth, seed)?;
        last_change = (next - prev).norm();
        if last_change <= policy.tol * next.norm().max(1.0) {
            return Ok(ContinuedFractionValue {
                value: next,
                depth_used: depth,
                converged: true,
                near_imaginary_axis,
            });
        }
        prev = next;
    }
    Err(Error::NoConvergence {
        what: "continued fraction",
        last_change,
        limit: policy.max_depth,
    })
}

/// `h(lambda) = g_+(lambda) + lambda / rho_0`; its zeros on `lambda > 0` are
/// the eigenvalues.
pub fn root_function(
    rho: &RhoModel,
    frame: &SpectralFrame,
    policy: &ContFracPolicy,
) -> Result<Complex64> {
    Ok(g_plus(rho, frame, policy)?.value + frame.lambda / rho.value(0)?)
}

/// `G+` using an already computed Jost solution for `z+_0`.
pub fn cont_frac_from_jost(
    rho: &RhoModel,
    frame: &SpectralFrame,
    policy: &ContFracPolicy,
    sol: &JostSolution,
) -> Result<Complex64> {
    let z0 = sol.scaled(0).expect("Jost solution stores n = 0");
    Ok(frame.mu_plus * z0 * root_function(rho, frame, policy)?)
}

/// `G+(lambda) = mu_+ z+_0 (g_+ + lambda/rho_0)` for an Euler-kind model.
pub fn cont_frac_function(
    model: &ProblemModel,
    frame: &SpectralFrame,
    policy: &ContFracPolicy,
    jost_policy: &TruncationPolicy,
) -> Result<Complex64> {
    let rho = model.rho().ok_or_else(|| {
        Error::InvalidInput("the continued fraction is defined for Euler models only".into())
    })?;
    let sol = jost::jost_scalar(model, frame, jost_policy)?;
    cont_frac_from_jost(rho, frame, policy, &sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler2d::Lattice;

    fn frame(re: f64, im: f64) -> SpectralFrame {
        SpectralFrame::new(Complex64::new(re, im)).unwrap()
    }

    fn unit_tail() -> RhoModel {
        // rho_0 is never used by g_+, rho_n = 1 for n >= 1
        RhoModel::list(vec![-0.5]).unwrap()
    }

    fn slice() -> RhoModel {
        RhoModel::lattice(Lattice::new([3, 1], [2, -2])).unwrap()
    }

    #[test]
    fn unit_tail_gives_fixed_point() {
        let p = ContFracPolicy::default();
        let g = g_plus(&unit_tail(), &frame(1.0, 0.0), &p).unwrap();
        assert!((g.value.re - 0.6180339887).abs() < 1e-10);
        let g = g_plus(&unit_tail(), &frame(3.0, 0.0), &p).unwrap();
        assert!((g.value.re - 0.3027756377).abs() < 1e-10);
        let zero_seed = ContFracPolicy {
            zero_seed: true,
            ..p
        };
        let g0 = g_plus(&unit_tail(), &frame(1.0, 0.0), &zero_seed).unwrap();
        assert!((g0.value.re - 0.6180339887).abs() < 1e-10);
    }

    #[test]
    fn left_half_plane_is_rejected() {
        let err = g_plus(&slice(), &frame(-1.0, 0.0), &ContFracPolicy::default()).unwrap_err();
        assert_eq!(err.kind(), "DomainError");
        assert!(g_plus(&slice(), &frame(0.0, 3.0), &ContFracPolicy::default()).is_err());
    }

    #[test]
    fn near_axis_is_flagged() {
        let g = g_plus(&slice(), &frame(1e-4, 3.0), &ContFracPolicy::default()).unwrap();
        assert!(g.near_imaginary_axis);
        assert!(
            !g_plus(&slice(), &frame(1.0, 0.0), &ContFracPolicy::default())
                .unwrap()
                .near_imaginary_axis
        );
    }

    #[test]
    fn positive_on_positive_axis() {
        for lam in [0.01, 0.2, 1.0, 10.0] {
            let g = g_plus(&slice(), &frame(lam, 0.0), &ContFracPolicy::default()).unwrap();
            assert!(g.value.re > 0.0 && g.value.im == 0.0);
        }
    }

    #[test]
    fn limits_at_zero_and_infinity() {
        let p = ContFracPolicy::default();
        let errs: Vec<f64> = (1..=4)
            .map(|k| {
                (g_plus(&slice(), &frame(10f64.powi(-k), 0.0), &p)
                    .unwrap()
                    .value
                    .re
                    - 1.0)
                    .abs()
            })
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
        assert!(g_plus(&slice(), &frame(1e3, 0.0), &p).unwrap().value.re < 1e-2);
    }

    #[test]
    fn ratio_identity_and_agreement_with_jost() {
        let rho = slice();
        let model = ProblemModel::euler(rho.clone());
        let jp = TruncationPolicy::default();
        let cp = ContFracPolicy::default();
        for lam in [0.5, 1.0, 1.5] {
            let f = frame(lam, 0.0);
            let sol = jost::jost_scalar(&model, &f, &jp).unwrap();
            // v_0 = z+_{-1} / z+_0 = zhat_{-1} / (mu_+ zhat_0)
            let v0 = sol.scaled(-1).unwrap() / (f.mu_plus * sol.scaled(0).unwrap());
            let h = root_function(&rho, &f, &cp).unwrap();
            assert!((v0 - h).norm() < 1e-6, "lambda={lam}: {v0} vs {h}");
            let g = cont_frac_function(&model, &f, &cp, &jp).unwrap();
            assert!((g - sol.jost_function()).norm() < 1e-6);
        }
    }
}
