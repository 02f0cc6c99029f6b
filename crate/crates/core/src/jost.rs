//! Jost solution, regular solution, Wronskian, Jost function and the
//! matrix Jost solution behind the Evans function.
//!
//! All backward recursions run in the scaled variables `zhat_n = mu_+^-n z_n`
//! and `Yhat_n = mu_+^-n Y_n`. In the decreasing-n direction the Jost mode
//! dominates, so the recursion is stable, and `F+ = zhat_{-1}` is read off
//! directly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::policy::{adaptive, TruncationPolicy};
use crate::problem::ProblemModel;
use crate::spectral::{Mat2, SpectralFrame, ONE, ZERO};

/// Scaled Jost sequence `zhat_n` for `n = -1 ..= seed_index + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct JostSolution {
    pub lambda: Complex64,
    /// Seed index of the shortest truncation; the stored range ends at
    /// `seed_index + 1`.
    pub seed_index: usize,
    /// `values[k]` is `zhat_{k-1}`.
    pub values: Vec<Complex64>,
    /// Change of the last extrapolated estimate of `(zhat_{-1}, zhat_0)`.
    pub truncation_error: f64,
    /// Largest support used among the doubled truncations.
    pub support_used: usize,
    pub extrapolated: bool,
}

impl JostSolution {
    /// `zhat_n`, if stored.
    pub fn scaled(&self, n: i64) -> Option<Complex64> {
        usize::try_from(n + 1)
            .ok()
            .and_then(|k| self.values.get(k).copied())
    }

    /// `z+_n = mu_+^n zhat_n`.
    pub fn unscaled(&self, frame: &SpectralFrame, n: i64) -> Option<Complex64> {
        let e = i32::try_from(n).ok()?;
        self.scaled(n).map(|z| z * frame.mu_plus.powi(e))
    }

    /// `F+ = mu_+ z+_{-1} = zhat_{-1}`.
    pub fn jost_function(&self) -> Complex64 {
        self.values[0]
    }

    /// Largest index with a stored value.
    pub fn last_index(&self) -> i64 {
        self.values.len() as i64 - 2
    }

    /// `max_n |zhat_{n-1} - mu_+^2 zhat_{n+1} - mu_+ (lambda - b_n c_n) zhat_n| / max(1, |zhat_n|)`
    /// over the interior of the stored range.
    pub fn recursion_residual(&self, model: &ProblemModel, frame: &SpectralFrame) -> Result<f64> {
        let mu = frame.mu_plus;
        let mu2 = mu * mu;
        let mut worst = 0.0f64;
        for n in 0..=self.last_index() - 1 {
            let k = (n + 1) as usize;
            let t = model.bc(frame, n as usize)?;
            let r = self.values[k - 1]
                - mu2 * self.values[k + 1]
                - mu * (frame.lambda - t) * self.values[k];
            worst = worst.max(r.norm() / self.values[k].norm().max(1.0));
        }
        Ok(worst)
    }
}

/// Regular solution `z_{-1} = 0`, `z_0 = 1`, stored for `n = -1 ..= N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularSolution {
    /// `values[k]` is `z_{k-1}`.
    pub values: Vec<Complex64>,
}

impl RegularSolution {
    pub fn get(&self, n: i64) -> Option<Complex64> {
        usize::try_from(n + 1)
            .ok()
            .and_then(|k| self.values.get(k).copied())
    }
}

/// Scaled Jost sequence of the model truncated to support `0..support`,
/// i.e. seeded with `zhat_{support-1} = zhat_support = 1`. Returns
/// `zhat_n` for `n = -1 ..= keep`; entries past the support are exactly 1.
pub fn jost_truncated(
    model: &ProblemModel,
    frame: &SpectralFrame,
    support: usize,
    keep: usize,
) -> Result<Vec<Complex64>> {
    let mu = frame.mu_plus;
    let mu2 = mu * mu;
    let mut out = vec![ONE; keep + 2];
    let (mut next, mut cur) = (ONE, ONE);
    for n in (0..support).rev() {
        let prev = mu2 * next + mu * (frame.lambda - model.bc(frame, n)?) * cur;
        if !prev.is_finite() {
            return Err(Error::Overflow {
                exponent: n as i64 - 1,
            });
        }
        if n <= keep + 1 {
            out[n] = prev;
        }
        next = cur;
        cur = prev;
    }
    Ok(out)
}

/// `Yhat_0` of the model truncated to `0..support`, seeded with
/// `Yhat_support = R_+`.
pub fn matrix_jost_truncated(
    model: &ProblemModel,
    frame: &SpectralFrame,
    support: usize,
) -> Result<Mat2> {
    let mut y = frame.r_plus;
    for n in (0..support).rev() {
        y = (frame.a_cross_inv(model.bc(frame, n)?) * y).scale(frame.mu_plus);
        if !y.is_finite() {
            return Err(Error::Overflow { exponent: n as i64 });
        }
    }
    Ok(y)
}

fn head_change(a: &[Complex64], b: &[Complex64]) -> (f64, f64) {
    let delta = (a[0] - b[0]).norm().max((a[1] - b[1]).norm());
    (delta, a[0].norm().max(a[1].norm()))
}

/// Jost solution by backward recursion, with supports doubled (and, for
/// algebraic tails, Richardson-extrapolated) until `zhat_{-1}` and
/// `zhat_0` are stable to `policy.tol`.
pub fn jost_scalar(
    model: &ProblemModel,
    frame: &SpectralFrame,
    policy: &TruncationPolicy,
) -> Result<JostSolution> {
    let start = policy.start(frame, model.support_len());
    let keep = start.max(policy.initial_support).max(1);
    let run = adaptive(
        policy,
        start,
        model.support_len().is_some(),
        model.tail_exponent,
        "Jost solution",
        |s| jost_truncated(model, frame, s, keep),
        |a: &Vec<Complex64>, b: &Vec<Complex64>| head_change(a, b),
    )?;
    Ok(JostSolution {
        lambda: frame.lambda,
        seed_index: keep - 1,
        values: run.value,
        truncation_error: run.change,
        support_used: run.support,
        extrapolated: run.extrapolated,
    })
}

/// Forward recursion `z_{n+1} = z_{n-1} + (b_n c_n - lambda) z_n`.
pub fn regular_solution(
    model: &ProblemModel,
    frame: &SpectralFrame,
    n_max: usize,
) -> Result<RegularSolution> {
    if n_max < 1 {
        return Err(Error::InvalidInput("regular solution needs N >= 1".into()));
    }
    let mut values = Vec::with_capacity(n_max + 2);
    values.push(ZERO);
    values.push(ONE);
    for n in 0..n_max {
        let z = values[n] + (model.bc(frame, n)? - frame.lambda) * values[n + 1];
        if !z.is_finite() {
            return Err(Error::Overflow {
                exponent: n as i64 + 1,
            });
        }
        values.push(z);
    }
    Ok(RegularSolution { values })
}

/// Discrete Wronskian `(-1)^n (u_{n-1} v_n - u_n v_{n-1})`, constant in `n`
/// along two solutions. The sign makes `W(z+, z^r)_0 = z+_{-1}`, hence
/// `F+ = 1` for the free equation.
pub fn wronskian(
    u_prev: Complex64,
    u_cur: Complex64,
    v_prev: Complex64,
    v_cur: Complex64,
    n: i64,
) -> Complex64 {
    let w = u_prev * v_cur - u_cur * v_prev;
    if n.rem_euclid(2) == 0 {
        w
    } else {
        -w
    }
}

/// `F+(lambda) = mu_+ W(z+, z^r)_0 = zhat_{-1}`.
pub fn jost_function(
    model: &ProblemModel,
    frame: &SpectralFrame,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    Ok(jost_scalar(model, frame, policy)?.jost_function())
}

/// `Yhat_0`, the scaled matrix Jost solution at `n = 0`.
pub fn matrix_jost(
    model: &ProblemModel,
    frame: &SpectralFrame,
    policy: &TruncationPolicy,
) -> Result<Mat2> {
    let run = adaptive(
        policy,
        policy.start(frame, model.support_len()),
        model.support_len().is_some(),
        model.tail_exponent,
        "matrix Jost solution",
        |s| matrix_jost_truncated(model, frame, s),
        |a: &Mat2, b: &Mat2| (a.dist(b), a.max_abs()),
    )?;
    Ok(run.value)
}

/// `E+(lambda) = det(Yhat_0 + R_-)`.
pub fn evans(
    model: &ProblemModel,
    frame: &SpectralFrame,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    Ok((matrix_jost(model, frame, policy)? + frame.r_minus).det())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler2d::Lattice;
    use crate::problem::RhoModel;

    fn frame(re: f64, im: f64) -> SpectralFrame {
        SpectralFrame::new(Complex64::new(re, im)).unwrap()
    }

    fn euler() -> ProblemModel {
        ProblemModel::euler(RhoModel::lattice(Lattice::new([3, 1], [2, -2])).unwrap())
    }

    #[test]
    fn free_equation_keeps_unit_sequence() {
        let f = frame(0.7, -1.3);
        let sol = jost_scalar(&ProblemModel::zero(), &f, &TruncationPolicy::default()).unwrap();
        for z in &sol.values {
            assert!((z - ONE).norm() < 1e-13);
        }
        let y = matrix_jost(&ProblemModel::zero(), &f, &TruncationPolicy::default()).unwrap();
        assert!(y.dist(&f.r_plus) < 1e-14);
    }

    #[test]
    fn rank_one_closed_form() {
        let p = TruncationPolicy::default();
        let m = ProblemModel::rank_one(Complex64::new(1.0, 0.0));
        let f = frame(1.0, 0.0);
        let expect = 1.0 - f.mu_plus;
        assert!((jost_function(&m, &f, &p).unwrap() - expect).norm() < 1e-14);
        assert!((expect.re - 0.3819660113).abs() < 1e-10);

        let f = frame(3.0, 0.0);
        assert!((jost_function(&m, &f, &p).unwrap().re - 0.6972243623).abs() < 1e-9);

        let m = ProblemModel::rank_one(Complex64::new(2.0, 0.0));
        let f = frame(1.5, 0.0);
        assert!(jost_function(&m, &f, &p).unwrap().norm() < 1e-14);
        assert!(evans(&m, &f, &p).unwrap().norm() < 1e-10);
    }

    #[test]
    fn euler_self_convergence() {
        let m = euler();
        let f = frame(1.0, 0.0);
        let a = jost_truncated(&m, &f, 4096, 0).unwrap()[0];
        let b = jost_truncated(&m, &f, 8192, 0).unwrap()[0];
        // raw truncations converge like 1/N
        let c = jost_truncated(&m, &f, 16384, 0).unwrap()[0];
        let ratio = (a - b).norm() / (b - c).norm();
        assert!((ratio - 2.0).abs() < 0.05, "{ratio}");
        let sol = jost_scalar(&m, &f, &TruncationPolicy::default()).unwrap();
        assert!(sol.extrapolated);
        let tight = TruncationPolicy {
            tol: 1e-12,
            ..TruncationPolicy::default()
        };
        let refined = jost_scalar(&m, &f, &tight).unwrap();
        assert!((sol.jost_function() - refined.jost_function()).norm() < 1e-8);
    }

    #[test]
    fn evans_matches_jost_on_euler() {
        let m = euler();
        let p = TruncationPolicy::default();
        for f in [frame(1.0, 0.0), frame(0.8, 0.3), frame(-0.4, 2.5)] {
            let fj = jost_function(&m, &f, &p).unwrap();
            let fe = evans(&m, &f, &p).unwrap();
            assert!((fj - fe).norm() < 1e-8 * fj.norm().max(1.0), "{fj} vs {fe}");
        }
    }

    #[test]
    fn matrix_jost_columns() {
        let m = euler();
        let f = frame(1.2, 0.4);
        let p = TruncationPolicy::default();
        let y = matrix_jost(&m, &f, &p).unwrap();
        let sol = jost_scalar(&m, &f, &p).unwrap();
        assert_eq!(y.get(0, 0), ZERO);
        assert_eq!(y.get(1, 0), ZERO);
        let z0 = sol.scaled(0).unwrap();
        let zm1 = sol.scaled(-1).unwrap();
        // second column of Yhat_0 is (mu_+ z+_0, mu_+ z+_{-1}) = (mu_+ zhat_0, zhat_{-1})
        assert!((y.get(0, 1) - f.mu_plus * z0).norm() < 1e-10);
        assert!((y.get(1, 1) - zm1).norm() < 1e-10);
    }

    #[test]
    fn regular_solution_steps() {
        let f = frame(1.0, 0.0);
        let r = regular_solution(&ProblemModel::zero(), &f, 5).unwrap();
        assert_eq!(r.get(-1).unwrap(), ZERO);
        assert_eq!(r.get(0).unwrap(), ONE);
        assert_eq!(r.get(1).unwrap(), Complex64::new(-1.0, 0.0));
        let r = regular_solution(&ProblemModel::rank_one(Complex64::new(2.0, 0.0)), &f, 5).unwrap();
        assert_eq!(r.get(1).unwrap(), ONE);
        assert!(regular_solution(&euler(), &f, 0).is_err());
    }

    #[test]
    fn wronskian_basics() {
        let u = (Complex64::new(0.3, 1.0), Complex64::new(-2.0, 0.5));
        assert_eq!(wronskian(u.0, u.1, u.0, u.1, 3), ZERO);
        let zm1 = Complex64::new(0.25, -0.5);
        assert_eq!(wronskian(zm1, Complex64::new(7.0, 1.0), ZERO, ONE, 0), zm1);
    }

    #[test]
    fn wronskian_is_constant_and_recursion_holds() {
        let m = euler();
        let f = frame(1.0, 0.0);
        let policy = TruncationPolicy {
            initial_support: 256,
            ..TruncationPolicy::default()
        };
        let sol = jost_scalar(&m, &f, &policy).unwrap();
        assert!(sol.recursion_residual(&m, &f).unwrap() < 1e-12);
        let reg = regular_solution(&m, &f, 200).unwrap();
        let w: Vec<Complex64> = (0..=200)
            .map(|n| {
                wronskian(
                    sol.unscaled(&f, n - 1).unwrap(),
                    sol.unscaled(&f, n).unwrap(),
                    reg.get(n - 1).unwrap(),
                    reg.get(n).unwrap(),
                    n,
                )
            })
            .collect();
        let w0 = w[0];
        assert!((f.mu_plus * w0 - sol.jost_function()).norm() < 1e-14);
        let spread = w.iter().map(|x| (x - w0).norm()).fold(0.0, f64::max) / w0.norm();
        assert!(spread < 1e-9, "{spread}");
    }

    #[test]
    fn jost_solution_nonvanishing_for_positive_lambda() {
        let m = euler();
        for lam in [0.1, 0.5, 1.0, 3.0] {
            let sol = jost_scalar(&m, &frame(lam, 0.0), &TruncationPolicy::default()).unwrap();
            let min = sol.values[1..]
                .iter()
                .map(|z| z.norm())
                .fold(f64::INFINITY, f64::min);
            assert!(min > 0.0);
        }
    }
}
