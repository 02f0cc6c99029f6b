//! Finite-section Fredholm determinants `det(I - K)` and `det(I - T)`.
//!
//! `K = -diag(c) (S - S^-1 - lambda)^-1 diag(b)` uses the scalar resolvent
//! kernel `a_nk`. `T` is the 2x2-block operator built from the semi-separable
//! kernel `G_nk = -A^n R_- A^-(k+1)` (`n <= k`), `+A^n R_+ A^-(k+1)` (`k < n`),
//! with `T_nk = C_n G_nk B_k`, `B_k = b_k Q_+`, `C_n = c_n Q_+`.
//!
//! The kernel sign is fixed by the requirement that `a` really inverts
//! `S - S^-1 - lambda` on the half-line, which [`resolvent_residual`]
//! verifies.

use num_complex::Complex64;
use serde::Serialize;

use crate::contfrac::{self, ContFracPolicy};
use crate::error::{Error, Result};
use crate::jost;
use crate::json;
use crate::linalg::{lu_det, DenseMatrix, Tridiagonal};
use crate::policy::{adaptive, TruncationPolicy};
use crate::problem::ProblemModel;
use crate::spectral::{Mat2, SpectralFrame, ONE, ZERO};

/// A finite-section determinant and how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeterminantValue {
    #[serde(serialize_with = "json::complex")]
    pub value: Complex64,
    pub section_size: usize,
    #[serde(serialize_with = "json::sig17")]
    pub error_estimate: f64,
    pub extrapolated: bool,
}

/// Which finite section [`det_adaptive`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    K,
    T,
}

fn parity_sign(e: usize) -> f64 {
    if e.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Entry `a_nk` of `(S - S^-1 - lambda)^-1` on l^2(Z_+):
///
/// `a_nk = -(mu_+ - mu_-)^-1 (-mu_+)^(k-n) (1 - (-mu_+^2)^(n+1))` for `n <= k`,
/// `a_nk = -(mu_+ - mu_-)^-1 mu_+^(n-k) (1 - (-mu_+^2)^(k+1))` for `n > k`.
pub fn resolvent_entry(frame: &SpectralFrame, n: usize, k: usize) -> Complex64 {
    let mu = frame.mu_plus;
    let ratio = frame.mode_ratio();
    let g = -frame.mu_gap().inv();
    if n <= k {
        g * (-mu).powi((k - n) as i32) * (ONE - ratio.powi(n as i32 + 1))
    } else {
        g * mu.powi((n - k) as i32) * (ONE - ratio.powi(k as i32 + 1))
    }
}

/// Powers of `mu_+`, `-mu_+^2` and the projection products needed to
/// assemble sections of size `n`.
struct Powers {
    gap_inv: Complex64,
    mu: Vec<Complex64>,
    ratio: Vec<Complex64>,
    p_plus_r_minus: Mat2,
    p_minus_r_minus: Mat2,
    r_plus_p_plus: Mat2,
    r_plus_p_minus: Mat2,
}

impl Powers {
    fn new(frame: &SpectralFrame, n: usize) -> Self {
        let table = |base: Complex64| {
            let mut v = Vec::with_capacity(2 * n + 2);
            let mut x = ONE;
            for _ in 0..2 * n + 2 {
                v.push(x);
                x *= base;
            }
            v
        };
        Powers {
            gap_inv: frame.mu_gap().inv(),
            mu: table(frame.mu_plus),
            ratio: table(frame.mode_ratio()),
            p_plus_r_minus: frame.p_plus * frame.r_minus,
            p_minus_r_minus: frame.p_minus * frame.r_minus,
            r_plus_p_plus: frame.r_plus * frame.p_plus,
            r_plus_p_minus: frame.r_plus * frame.p_minus,
        }
    }

    fn resolvent(&self, n: usize, k: usize) -> Complex64 {
        if n <= k {
            -self.gap_inv * self.mu[k - n] * parity_sign(k - n) * (ONE - self.ratio[n + 1])
        } else {
            -self.gap_inv * self.mu[n - k] * (ONE - self.ratio[k + 1])
        }
    }

    /// `G_nk` in stabilized form: only nonnegative powers of `mu_+` appear.
    fn block(&self, n: usize, k: usize) -> Mat2 {
        if n <= k {
            // A^n R_- A^-(k+1) = (-mu_+)^(k+1) (mu_+^n P_+ + mu_-^n P_-) R_-
            let c1 = self.mu[n + k + 1] * parity_sign(k + 1);
            let c2 = self.mu[k + 1 - n] * parity_sign(n + k + 1);
            -(self.p_plus_r_minus.scale(c1) + self.p_minus_r_minus.scale(c2))
        } else {
            // A^n R_+ A^-(k+1) = mu_+^n R_+ (mu_+^-(k+1) P_+ + (-mu_+)^(k+1) P_-)
            let c1 = self.mu[n - k - 1];
            let c2 = self.mu[n + k + 1] * parity_sign(k + 1);
            self.r_plus_p_plus.scale(c1) + self.r_plus_p_minus.scale(c2)
        }
    }
}

/// Max deviation from the identity of `(S - S^-1 - lambda) a` on the
/// `N x N` section, over rows `0 ..= N-3`.
pub fn resolvent_residual(frame: &SpectralFrame, n: usize) -> Result<f64> {
    let powers = Powers::new(frame, n);
    resolvent_residual_with(frame, n, |i, j| powers.resolvent(i, j))
}

/// [`resolvent_residual`] for an arbitrary kernel `a(n, k)`.
pub fn resolvent_residual_with<F>(frame: &SpectralFrame, n: usize, kernel: F) -> Result<f64>
where
    F: Fn(usize, usize) -> Complex64,
{
    if n < 3 {
        return Err(Error::InvalidInput(
            "resolvent residual needs N >= 3".into(),
        ));
    }
    let a: Vec<Vec<Complex64>> = (0..n)
        .map(|i| (0..n).map(|j| kernel(i, j)).collect())
        .collect();
    let mut worst = 0.0f64;
    #[allow(clippy::needless_range_loop)]
    for i in 0..n - 2 {
        for j in 0..n {
            // row i of S - S^-1 - lambda: +1 at i-1, -lambda at i, -1 at i+1
            let mut v = -frame.lambda * a[i][j] - a[i + 1][j];
            if i > 0 {
                v += a[i - 1][j];
            }
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((v - target).norm());
        }
    }
    Ok(worst)
}

fn coefficients(
    model: &ProblemModel,
    frame: &SpectralFrame,
    n: usize,
) -> Result<Vec<(Complex64, Complex64)>> {
    (0..n).map(|i| model.coeff(frame, i)).collect()
}

/// The `N x N` section of `K`, `K[n,k] = -c_n a_nk b_k`.
pub fn k_section(model: &ProblemModel, frame: &SpectralFrame, n: usize) -> Result<DenseMatrix> {
    let bc = coefficients(model, frame, n)?;
    let powers = Powers::new(frame, n);
    Ok(DenseMatrix::from_fn(n, |i, k| {
        -bc[i].1 * powers.resolvent(i, k) * bc[k].0
    }))
}

/// The `2N x 2N` section of `T`; block `(n, k)` occupies rows `2n, 2n+1`
/// and columns `2k, 2k+1`.
pub fn t_section(model: &ProblemModel, frame: &SpectralFrame, n: usize) -> Result<DenseMatrix> {
    let bc = coefficients(model, frame, n)?;
    let powers = Powers::new(frame, n);
    let q = frame.q_plus;
    Ok(DenseMatrix::from_fn(2 * n, |r, s| {
        let (bn, i) = (r / 2, r % 2);
        let (bk, j) = (s / 2, s % 2);
        let c_n = q.scale(bc[bn].1);
        let b_k = q.scale(bc[bk].0);
        (c_n * powers.block(bn, bk) * b_k).get(i, j)
    }))
}

fn identity_minus(mut m: DenseMatrix) -> DenseMatrix {
    let n = m.size();
    for i in 0..n {
        for j in 0..n {
            let v = m[(i, j)];
            m[(i, j)] = if i == j { ONE - v } else { -v };
        }
    }
    m
}

/// `det(I - K)` on the `N x N` section.
pub fn det_k(model: &ProblemModel, frame: &SpectralFrame, n: usize) -> Result<DeterminantValue> {
    if n < 1 {
        return Err(Error::InvalidInput("section size must be >= 1".into()));
    }
    let value = lu_det(identity_minus(k_section(model, frame, n)?))?;
    Ok(DeterminantValue {
        value,
        section_size: n,
        error_estimate: 0.0,
        extrapolated: false,
    })
}

/// `det(I - T)` on the `2N x 2N` block section.
pub fn det_t(model: &ProblemModel, frame: &SpectralFrame, n: usize) -> Result<DeterminantValue> {
    if n < 1 {
        return Err(Error::InvalidInput("section size must be >= 1".into()));
    }
    let value = lu_det(identity_minus(t_section(model, frame, n)?))?;
    Ok(DeterminantValue {
        value,
        section_size: n,
        error_estimate: 0.0,
        extrapolated: false,
    })
}

/// Section determinant with doubling section size. Finitely supported
/// models are exact at their support length; algebraic tails are
/// Richardson-extrapolated.
pub fn det_adaptive(
    model: &ProblemModel,
    frame: &SpectralFrame,
    policy: &TruncationPolicy,
    section: Section,
) -> Result<DeterminantValue> {
    let support = model.support_len();
    let start = policy.start(frame, support).max(1);
    let eval = |n: usize| match section {
        Section::K => det_k(model, frame, n).map(|d| d.value),
        Section::T => det_t(model, frame, n).map(|d| d.value),
    };
    let what = match section {
        Section::K => "det(I - K) section",
        Section::T => "det(I - T) section",
    };
    let run = adaptive(
        policy,
        start,
        support.is_some(),
        model.tail_exponent,
        what,
        eval,
        |a: &Complex64, b: &Complex64| ((a - b).norm(), a.norm()),
    )?;
    Ok(DeterminantValue {
        value: run.value,
        section_size: run.support,
        error_estimate: run.change,
        extrapolated: run.extrapolated,
    })
}

/// `max_{i,j} |f_i - f_j| / max(1, max_k |f_k|)`.
pub fn max_pairwise_discrepancy(values: &[Complex64]) -> f64 {
    let scale = values.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut worst = 0.0f64;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            worst = worst.max((a - b).norm());
        }
    }
    worst / scale
}

/// Tolerances for the five characteristic functions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReportPolicy {
    pub jost: TruncationPolicy,
    pub sections: SectionPolicy,
    pub contfrac: ContFracPolicy,
}

/// Newtype so that [`ReportPolicy::default`] picks the section defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionPolicy(pub TruncationPolicy);

impl Default for SectionPolicy {
    fn default() -> Self {
        SectionPolicy(TruncationPolicy::sections())
    }
}

/// All characteristic functions at one lambda.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeterminantReport {
    #[serde(serialize_with = "json::complex")]
    pub lambda: Complex64,
    #[serde(rename = "det_K", serialize_with = "json::complex")]
    pub det_k: Complex64,
    #[serde(rename = "det_T", serialize_with = "json::complex")]
    pub det_t: Complex64,
    #[serde(serialize_with = "json::complex")]
    pub evans: Complex64,
    #[serde(serialize_with = "json::complex")]
    pub jost: Complex64,
    #[serde(serialize_with = "json::complex_opt")]
    pub cont_frac: Option<Complex64>,
    #[serde(serialize_with = "json::sig17")]
    pub max_pairwise_discrepancy: f64,
    #[serde(skip)]
    pub det_k_info: DeterminantValue,
    #[serde(skip)]
    pub det_t_info: DeterminantValue,
    #[serde(skip)]
    pub jost_support: usize,
}

impl DeterminantReport {
    /// Evaluates `det_K`, `det_T`, `E+`, `F+`, and `G+` when the model is of
    /// Euler kind and `Re lambda > 0`.
    pub fn compute(
        model: &ProblemModel,
        frame: &SpectralFrame,
        policy: &ReportPolicy,
    ) -> Result<Self> {
        let det_k_info = det_adaptive(model, frame, &policy.sections.0, Section::K)?;
        let det_t_info = det_adaptive(model, frame, &policy.sections.0, Section::T)?;
        let sol = jost::jost_scalar(model, frame, &policy.jost)?;
        let evans = jost::evans(model, frame, &policy.jost)?;
        let cont_frac = match model.rho() {
            Some(rho) if frame.lambda.re > 0.0 => Some(contfrac::cont_frac_from_jost(
                rho,
                frame,
                &policy.contfrac,
                &sol,
            )?),
            _ => None,
        };
        let mut values = vec![
            det_k_info.value,
            det_t_info.value,
            evans,
            sol.jost_function(),
        ];
        values.extend(cont_frac);
        Ok(DeterminantReport {
            lambda: frame.lambda,
            det_k: det_k_info.value,
            det_t: det_t_info.value,
            evans,
            jost: sol.jost_function(),
            cont_frac,
            max_pairwise_discrepancy: max_pairwise_discrepancy(&values),
            det_k_info,
            det_t_info,
            jost_support: sol.support_used,
        })
    }

    /// The populated values in the order `det_K, det_T, evans, jost, cont_frac`.
    pub fn values(&self) -> Vec<Complex64> {
        let mut v = vec![self.det_k, self.det_t, self.evans, self.jost];
        v.extend(self.cont_frac);
        v
    }
}

/// Truncated operator of the original equation, `M x M`: subdiagonal `1`,
/// superdiagonal `-1`, diagonal `b_n c_n` (real lambda, real model).
/// Eigenvalues `lambda` solve `det(E(lambda) - lambda I) = 0`.
pub fn ev3_matrix(model: &ProblemModel, frame: &SpectralFrame, m: usize) -> Result<Tridiagonal> {
    if !model.is_real() || frame.lambda.im != 0.0 {
        return Err(Error::InvalidInput(
            "operator matrix needs a real model and real lambda".into(),
        ));
    }
    let diag = (0..m)
        .map(|n| model.bc(frame, n).map(|t| t.re))
        .collect::<Result<Vec<_>>>()?;
    Ok(Tridiagonal {
        sub: vec![1.0; m.saturating_sub(1)],
        diag,
        sup: vec![-1.0; m.saturating_sub(1)],
    })
}
