//! Lattice slices of the linearized 2D Euler equation around the
//! unidirectional flow `cos(p . x)`.
//!
//! Along the line `q + n p` the eigenvalue problem reduces to
//! `z_{n-1} - z_{n+1} = lambda z_n / rho_n` with
//! `rho_n = 1 - |p|^2 / |q + n p|^2`. Everything that decides a case label is
//! integer arithmetic on `d(n) = |q + n p|^2 - |p|^2`.

use std::fmt;

use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::contfrac::{self, ContFracPolicy};
use crate::determinants::{DeterminantReport, ReportPolicy, SectionPolicy};
use crate::error::{Error, Result};
use crate::jost;
use crate::json::{self, Sig17};
use crate::linalg::{scan_sign_changes, tridiagonal_det_sign, Tridiagonal};
use crate::policy::TruncationPolicy;
use crate::problem::{ProblemModel, RhoModel};
use crate::rootfind::{bracket_real_roots, refine_root};
use crate::spectral::SpectralFrame;

pub type IVec = [i64; 2];

/// A lattice line `q + n p`, `n in Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lattice {
    pub p: IVec,
    pub q: IVec,
}

impl Lattice {
    pub const fn new(p: IVec, q: IVec) -> Self {
        Lattice { p, q }
    }
}

fn norm2(v: IVec) -> i128 {
    let (a, b) = (v[0] as i128, v[1] as i128);
    a * a + b * b
}

fn wedge(a: IVec, b: IVec) -> i128 {
    a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128
}

fn dot(a: IVec, b: IVec) -> i128 {
    a[0] as i128 * b[0] as i128 + a[1] as i128 * b[1] as i128
}

fn shifted(p: IVec, q: IVec, n: i64) -> Result<IVec> {
    let comp = |i: usize| {
        p[i].checked_mul(n)
            .and_then(|x| x.checked_add(q[i]))
            .ok_or_else(|| Error::InvalidInput(format!("lattice index {n} overflows")))
    };
    Ok([comp(0)?, comp(1)?])
}

fn ratio_i128(num: i128, den: i128) -> Result<Ratio<i64>> {
    let conv = |x: i128| {
        i64::try_from(x).map_err(|_| Error::InvalidInput("lattice value overflows i64".into()))
    };
    Ok(Ratio::new(conv(num)?, conv(den)?))
}

/// `beta(p, q) = (|q|^-2 - |p|^-2) (p ^ q) / 2`, and 0 when `p` or `q` is 0.
pub fn beta_exact(p: IVec, q: IVec) -> Result<Ratio<i64>> {
    let (pp, qq) = (norm2(p), norm2(q));
    if pp == 0 || qq == 0 {
        return Ok(Ratio::from_integer(0));
    }
    ratio_i128((pp - qq) * wedge(p, q), 2 * pp * qq)
}

pub fn beta(p: IVec, q: IVec) -> Result<f64> {
    beta_exact(p, q).map(to_f64)
}

fn to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `rho_n = 1 - |p|^2 / |q + n p|^2` as an exact fraction.
pub fn rho_exact(p: IVec, q: IVec, n: i64) -> Result<Ratio<i64>> {
    let d = norm2(shifted(p, q, n)?);
    if d == 0 {
        return Err(Error::DegenerateLatticePoint { n });
    }
    ratio_i128(d - norm2(p), d)
}

/// `rho_n` rounded once from the exact fraction.
pub fn rho_n(p: IVec, q: IVec, n: i64) -> Result<f64> {
    let d = norm2(shifted(p, q, n)?);
    if d == 0 {
        return Err(Error::DegenerateLatticePoint { n });
    }
    Ok((d - norm2(p)) as f64 / d as f64)
}

/// Position of the line `q + n p` relative to the open disc of radius `|p|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseLabel {
    /// One interior point `q + m p`, with `q + (m-1) p` on the circle.
    #[serde(rename = "I_minus")]
    IMinus,
    /// One interior point, with `q + (m+1) p` on the circle.
    #[serde(rename = "I_plus")]
    IPlus,
    /// One interior point, no lattice point on the circle.
    #[serde(rename = "I_zero")]
    IZero,
    /// Two interior points.
    #[serde(rename = "II")]
    II,
    #[serde(rename = "outside_or_boundary")]
    OutsideOrBoundary,
    #[serde(rename = "parallel")]
    Parallel,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseLabel::IMinus => "I_minus",
            CaseLabel::IPlus => "I_plus",
            CaseLabel::IZero => "I_zero",
            CaseLabel::II => "II",
            CaseLabel::OutsideOrBoundary => "outside_or_boundary",
            CaseLabel::Parallel => "parallel",
        };
        f.write_str(s)
    }
}

/// Label plus the interior index `m` when there is exactly one.
fn classify_indexed(p: IVec, q: IVec) -> Result<(CaseLabel, Option<i64>)> {
    let pp = norm2(p);
    if pp == 0 {
        return Err(Error::InvalidInput("p must be nonzero".into()));
    }
    if wedge(p, q) == 0 {
        return Ok((CaseLabel::Parallel, None));
    }
    // d(n) = pp n^2 + 2 (p.q) n + qq - pp
    let pq = dot(p, q);
    let d = |n: i128| pp * n * n + 2 * pq * n + norm2(q) - pp;
    let disc = pq * pq - pp * (norm2(q) - pp);
    if disc < 0 {
        return Ok((CaseLabel::OutsideOrBoundary, None));
    }
    // the float root bounds only delimit the integer scan; one extra point
    // on each side absorbs their rounding
    let centre = -(pq as f64) / pp as f64;
    let half = (disc as f64).sqrt() / pp as f64;
    let lo = (centre - half).floor() as i128 - 1;
    let hi = (centre + half).ceil() as i128 + 1;
    let interior: Vec<i128> = (lo..=hi).filter(|&n| d(n) < 0).collect();
    let boundary: Vec<i128> = (lo..=hi).filter(|&n| d(n) == 0).collect();
    let label = match (interior.as_slice(), boundary.as_slice()) {
        ([], _) => CaseLabel::OutsideOrBoundary,
        ([_], []) => CaseLabel::IZero,
        ([m], [b]) if *b == m - 1 => CaseLabel::IMinus,
        ([m], [b]) if *b == m + 1 => CaseLabel::IPlus,
        ([_], _) => CaseLabel::OutsideOrBoundary,
        _ => CaseLabel::II,
    };
    let m = if interior.len() == 1 {
        Some(interior[0] as i64)
    } else {
        None
    };
    Ok((label, m))
}

/// Case label of the slice through `q` along `p`.
pub fn classify(p: IVec, q: IVec) -> Result<CaseLabel> {
    classify_indexed(p, q).map(|(label, _)| label)
}

/// A case-I_minus slice, re-indexed so that its interior point is `q`
/// (`n = 0`) and the boundary point is `q - p` (`n = -1`).
#[derive(Debug, Clone, PartialEq)]
pub struct EulerSlice {
    pub p: IVec,
    /// Canonical base point, `q_input + m p`.
    pub q: IVec,
    pub q_input: IVec,
    /// `alpha = 2 |p|^2 / (q ^ p)`, so that `alpha (q ^ p) |p|^-2 / 2 = 1`.
    pub alpha: Ratio<i64>,
    pub rho: RhoModel,
    pub case_label: CaseLabel,
}

impl EulerSlice {
    pub fn new(p: IVec, q: IVec) -> Result<Self> {
        let (label, m) = classify_indexed(p, q)?;
        if label != CaseLabel::IMinus {
            return Err(Error::InvalidCase(label.to_string()));
        }
        let m = m.expect("case I_minus has one interior point");
        let qc = shifted(p, q, m)?;
        let alpha = ratio_i128(2 * norm2(p), wedge(qc, p))?;
        let rho = RhoModel::lattice(Lattice::new(p, qc))?;
        Ok(EulerSlice {
            p,
            q: qc,
            q_input: q,
            alpha,
            rho,
            case_label: label,
        })
    }

    pub fn alpha_f64(&self) -> f64 {
        to_f64(self.alpha)
    }

    /// `rho_n` for any integer `n` (negative indices included).
    pub fn rho_at(&self, n: i64) -> Result<f64> {
        rho_n(self.p, self.q, n)
    }

    pub fn model(&self) -> Result<ProblemModel> {
        Ok(ProblemModel::euler(self.rho.clone()))
    }
}

impl Serialize for EulerSlice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let head: Vec<Sig17> = (-1..8)
            .map(|n| Sig17(self.rho_at(n).unwrap_or(f64::NAN)))
            .collect();
        let mut st = s.serialize_struct("EulerSlice", 7)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("q", &self.q)?;
        st.serialize_field("q_input", &self.q_input)?;
        st.serialize_field("alpha", &Sig17(self.alpha_f64()))?;
        st.serialize_field("alpha_exact", &self.alpha.to_string())?;
        st.serialize_field("rho_from_minus_one", &head)?;
        st.serialize_field("case_label", &self.case_label)?;
        st.end()
    }
}

/// Case-`label` slices with `|p|^2 <= max_norm2`, one per line, in the
/// canonical form of [`EulerSlice`] (for I_minus) or as found. Ordered by
/// `|p|^2`, then `p`, then `q`.
pub fn enumerate_slices(max_norm2: i64, label: CaseLabel) -> Vec<(IVec, IVec)> {
    let r = (max_norm2 as f64).sqrt().floor() as i64;
    let mut out = Vec::new();
    let mut ps: Vec<IVec> = (-r..=r)
        .flat_map(|a| (-r..=r).map(move |b| [a, b]))
        .filter(|&p| p != [0, 0] && norm2(p) <= max_norm2 as i128)
        .collect();
    ps.sort_by_key(|&p| (norm2(p), p));
    for p in ps {
        // every line along p meets the box |q_i| <= r
        for a in -r..=r {
            for b in -r..=r {
                let q = [a, b];
                if let Ok((l, Some(m))) = classify_indexed(p, q) {
                    if l == label && m == 0 && !out.contains(&(p, q)) {
                        out.push((p, q));
                    }
                }
            }
        }
    }
    out
}

/// A full-line sequence `w_n` for `n = first ..= first + values.len() - 1`,
/// zero below `first`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullLineSequence {
    pub first: i64,
    pub values: Vec<Complex64>,
}

impl FullLineSequence {
    pub fn last(&self) -> i64 {
        self.first + self.values.len() as i64 - 1
    }

    pub fn get(&self, n: i64) -> Option<Complex64> {
        if n < self.first {
            return Some(Complex64::new(0.0, 0.0));
        }
        self.values.get((n - self.first) as usize).copied()
    }
}

/// Extends a half-line eigenvector `z_0 ..= z_M` to the full line:
/// `w_n = z_n / rho_n` (`n >= 0`), `w_{-1} = -z_0 / lambda`, `w_n = 0` below.
/// The result starts at `n = -3` so the seam rows can be checked.
pub fn halfline_extend(
    z: &[Complex64],
    lambda: Complex64,
    slice: &EulerSlice,
) -> Result<FullLineSequence> {
    if !(lambda.re > 0.0) {
        return Err(Error::Domain {
            lambda,
            reason: "the full-line correspondence needs Re lambda > 0",
        });
    }
    if slice.case_label != CaseLabel::IMinus {
        return Err(Error::InvalidCase(slice.case_label.to_string()));
    }
    let zero = Complex64::new(0.0, 0.0);
    let z0 = z.first().copied().unwrap_or(zero);
    let mut values = vec![zero, zero, -z0 / lambda];
    for (n, zn) in z.iter().enumerate() {
        values.push(zn / slice.rho_at(n as i64)?);
    }
    Ok(FullLineSequence { first: -3, values })
}

/// `(S - S*) diag(rho) w` at `n = first + 1 ..= last - 1`.
pub fn apply_lq(slice: &EulerSlice, w: &FullLineSequence) -> Result<Vec<(i64, Complex64)>> {
    let mut out = Vec::new();
    for n in w.first + 1..w.last() {
        let prev = slice.rho_at(n - 1)? * w.get(n - 1).unwrap_or_default();
        let next = slice.rho_at(n + 1)? * w.get(n + 1).unwrap_or_default();
        out.push((n, prev - next));
    }
    Ok(out)
}

/// `max_n |(L w)_n - lambda w_n| / max_n |w_n|`.
pub fn weq_residual(slice: &EulerSlice, w: &FullLineSequence, lambda: Complex64) -> Result<f64> {
    let scale = w.values.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let lw = apply_lq(slice, w)?;
    let worst = lw
        .iter()
        .map(|&(n, v)| (v - lambda * w.get(n).unwrap_or_default()).norm())
        .fold(0.0, f64::max);
    Ok(worst / scale)
}

/// `M x M` truncation of `rho_n z_{n-1} - rho_n z_{n+1}`, with `z_{-1} = 0`
/// and `z_M = 0`.
pub fn oracle_matrix(slice: &EulerSlice, m: usize) -> Result<Tridiagonal> {
    let rho = (0..m)
        .map(|n| slice.rho.value(n))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Tridiagonal {
        sub: rho[1..].to_vec(),
        diag: vec![0.0; m],
        sup: rho[..m.saturating_sub(1)].iter().map(|r| -r).collect(),
    })
}

/// Real eigenvalues of [`oracle_matrix`] in `interval`, by sign changes of
/// `det(O - lambda I)` on a grid followed by bisection.
pub fn oracle_scan(
    slice: &EulerSlice,
    m: usize,
    interval: (f64, f64),
    grid: usize,
) -> Result<Vec<f64>> {
    let o = oracle_matrix(slice, m)?;
    Ok(scan_sign_changes(
        |x| tridiagonal_det_sign(&o.shifted(x)).0,
        interval.0,
        interval.1,
        grid,
        1e-13,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelinePolicy {
    /// Left end `epsilon` of the search interval `(epsilon, lambda_max]`.
    pub lambda_min: f64,
    /// Defaults to `2 sup |rho_n|`.
    pub lambda_max: Option<f64>,
    pub grid: usize,
    pub root_tol: f64,
    pub oracle_size: usize,
    pub oracle_grid: usize,
    pub jost: TruncationPolicy,
    pub sections: TruncationPolicy,
    pub contfrac: ContFracPolicy,
    /// Extra real sample points for determinant reports (`lambda*` is
    /// always included).
    pub report_samples: Vec<f64>,
}

impl Default for PipelinePolicy {
    fn default() -> Self {
        PipelinePolicy {
            lambda_min: 1e-2,
            lambda_max: None,
            grid: 200,
            root_tol: 1e-12,
            oracle_size: 4000,
            oracle_grid: 400,
            jost: TruncationPolicy::default(),
            sections: TruncationPolicy::sections(),
            contfrac: ContFracPolicy::default(),
            report_samples: vec![1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstabilityReport {
    pub slice: EulerSlice,
    #[serde(serialize_with = "json::sig17")]
    pub lambda_star: f64,
    #[serde(serialize_with = "json::sig17")]
    pub f_residual: f64,
    #[serde(serialize_with = "json::sig17")]
    pub derivative_abs: f64,
    #[serde(serialize_with = "json::sig17")]
    pub oracle_lambda: f64,
    #[serde(serialize_with = "json::sig17")]
    pub agreement: f64,
    pub determinant_report_at_samples: Vec<DeterminantReport>,
    /// Every sign change of `F+` found on the search interval.
    #[serde(serialize_with = "json::sig17_vec")]
    pub jost_roots: Vec<f64>,
    #[serde(serialize_with = "json::sig17_vec")]
    pub oracle_roots: Vec<f64>,
    /// Root of `h = g_+ + lambda/rho_0` closest to `lambda_star`.
    #[serde(serialize_with = "json::sig17")]
    pub cont_frac_root: f64,
    /// `|h(lambda_star)|`.
    #[serde(serialize_with = "json::sig17")]
    pub h_residual: f64,
    /// Residual of the full-line equation for the extended eigenvector.
    #[serde(serialize_with = "json::sig17")]
    pub weq_residual: f64,
    #[serde(serialize_with = "json::sig17_vec")]
    pub search_interval: Vec<f64>,
}

fn nearest(xs: &[f64], x: f64) -> f64 {
    xs.iter()
        .copied()
        .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
        .unwrap_or(f64::NAN)
}

/// Locates the positive eigenvalue of a case-I_minus slice through `F+`
/// and cross-checks it against the operator-matrix oracle and the
/// continued-fraction root.
pub fn instability_pipeline(
    p: IVec,
    q: IVec,
    policy: &PipelinePolicy,
) -> Result<InstabilityReport> {
    let slice = EulerSlice::new(p, q)?;
    let model = slice.model()?;
    let lo = policy.lambda_min;
    let hi = policy.lambda_max.unwrap_or(2.0 * slice.rho.sup_abs()?);
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::InvalidInput(format!(
            "bad search interval ({lo}, {hi}]"
        )));
    }

    let f = |x: f64| {
        jost::jost_function(
            &model,
            &SpectralFrame::new(Complex64::new(x, 0.0))?,
            &policy.jost,
        )
    };
    let brackets = bracket_real_roots(f, lo, hi, policy.grid)?;
    if brackets.is_empty() {
        return Err(Error::NoRootFound { lo, hi });
    }
    let roots = brackets
        .par_iter()
        .map(|b| refine_root(f, *b, policy.root_tol))
        .collect::<Result<Vec<_>>>()?;
    let star = roots[0];
    let lambda_star = star.location.re;
    let frame = SpectralFrame::new(Complex64::new(lambda_star, 0.0))?;

    let oracle_roots = oracle_scan(&slice, policy.oracle_size, (lo, hi), policy.oracle_grid)?;
    let oracle_lambda = nearest(&oracle_roots, lambda_star);

    let h = |x: f64| {
        contfrac::root_function(
            &slice.rho,
            &SpectralFrame::new(Complex64::new(x, 0.0))?,
            &policy.contfrac,
        )
    };
    let h_roots = bracket_real_roots(h, lo, hi, policy.grid)?
        .par_iter()
        .map(|b| refine_root(h, *b, policy.root_tol).map(|r| r.location.re))
        .collect::<Result<Vec<_>>>()?;
    let h_residual = h(lambda_star)?.norm();

    let sol = jost::jost_scalar(&model, &frame, &policy.jost)?;
    let z: Vec<Complex64> = (0..=sol.last_index())
        .map(|n| sol.unscaled(&frame, n).expect("stored range"))
        .collect();
    let w = halfline_extend(&z, frame.lambda, &slice)?;
    let weq = weq_residual(&slice, &w, frame.lambda)?;

    let report_policy = ReportPolicy {
        jost: policy.jost,
        sections: SectionPolicy(policy.sections),
        contfrac: policy.contfrac,
    };
    let mut samples = vec![lambda_star];
    samples.extend(policy.report_samples.iter().copied());
    let determinant_report_at_samples = samples
        .par_iter()
        .map(|&x| {
            DeterminantReport::compute(
                &model,
                &SpectralFrame::new(Complex64::new(x, 0.0))?,
                &report_policy,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(InstabilityReport {
        slice,
        lambda_star,
        f_residual: star.residual,
        derivative_abs: star.derivative_abs,
        oracle_lambda,
        agreement: (lambda_star - oracle_lambda).abs(),
        determinant_report_at_samples,
        jost_roots: roots.iter().map(|r| r.location.re).collect(),
        oracle_roots,
        cont_frac_root: nearest(&h_roots, lambda_star),
        h_residual,
        weq_residual: weq,
        search_interval: vec![lo, hi],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: IVec = [3, 1];
    const Q: IVec = [2, -2];

    #[test]
    fn beta_examples() {
        assert_eq!(beta(P, P).unwrap(), 0.0);
        assert_eq!(beta_exact(P, Q).unwrap(), Ratio::new(-1, 10));
        assert_eq!(beta(P, [0, 0]).unwrap(), 0.0);
        assert_eq!(beta([0, 0], Q).unwrap(), 0.0);
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho_n(P, Q, 0).unwrap(), -0.25);
        assert_eq!(rho_n(P, Q, -1).unwrap(), 0.0);
        assert_eq!(rho_exact(P, Q, 1).unwrap(), Ratio::new(8, 13));
        assert!((rho_n(P, Q, 1).unwrap() - 0.6153846).abs() < 1e-7);
        assert!(matches!(
            rho_n([1, 0], [2, 0], -2),
            Err(Error::DegenerateLatticePoint { n: -2 })
        ));
    }

    #[test]
    fn rho_tail_is_inverse_square() {
        let mut worst = 0.0f64;
        for n in 1..=10_000i64 {
            let r = rho_n(P, Q, n).unwrap();
            assert!(r > 0.0 && r < 1.0);
            worst = worst.max((1.0 - r) * (n * n) as f64);
        }
        assert!(worst < 2.0, "{worst}");
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(P, Q).unwrap(), CaseLabel::IMinus);
        assert_eq!(classify(P, [1, 2]).unwrap(), CaseLabel::II);
        assert_eq!(
            classify([1, 0], [0, 1]).unwrap(),
            CaseLabel::OutsideOrBoundary
        );
        assert_eq!(classify([1, 0], [2, 0]).unwrap(), CaseLabel::Parallel);
        assert!(classify([0, 0], Q).is_err());
        // reversing the direction of p turns I_minus into I_plus
        assert_eq!(classify([-3, -1], Q).unwrap(), CaseLabel::IPlus);
        // shifting q along the line does not change the label
        assert_eq!(classify(P, [5, -1]).unwrap(), CaseLabel::IMinus);
        assert_eq!(classify(P, [-10, -6]).unwrap(), CaseLabel::IMinus);
        assert_eq!(classify([2, 0], [0, 1]).unwrap(), CaseLabel::IZero);
    }

    #[test]
    fn slice_canonicalization_and_alpha() {
        let s = EulerSlice::new(P, [5, -1]).unwrap();
        assert_eq!(s.q, Q);
        assert_eq!(s.q_input, [5, -1]);
        // alpha (q ^ p) |p|^-2 / 2 = 1 exactly
        let qp = Ratio::from_integer(wedge(s.q, s.p) as i64);
        assert_eq!(
            s.alpha * qp / Ratio::from_integer(norm2(P) as i64) / Ratio::from_integer(2),
            Ratio::from_integer(1)
        );
        assert_eq!(s.rho_at(-1).unwrap(), 0.0);
        assert!(s.rho_at(0).unwrap() < 0.0);
        for n in (-40..40).filter(|n| *n != 0 && *n != -1) {
            let r = s.rho_at(n).unwrap();
            assert!(r > 0.0 && r < 1.0, "rho_{n} = {r}");
        }
        // alpha beta(p, q + n p) = rho_n
        for n in -5..5 {
            let qn = shifted(P, s.q, n).unwrap();
            assert_eq!(
                s.alpha * beta_exact(P, qn).unwrap(),
                rho_exact(P, s.q, n).unwrap()
            );
        }
        assert!(matches!(EulerSlice::new(P, [1, 2]), Err(Error::InvalidCase(ref c)) if c == "II"));
    }

    #[test]
    fn oracle_matrix_structure() {
        let s = EulerSlice::new(P, Q).unwrap();
        let o = oracle_matrix(&s, 2).unwrap();
        assert_eq!(o.to_dense(), vec![vec![0.0, 0.25], vec![8.0 / 13.0, 0.0]]);
        let o = oracle_matrix(&s, 50).unwrap();
        assert!(o.diag.iter().all(|d| *d == 0.0));
        for n in 1..49 {
            assert_eq!(o.sup[n], -o.sub[n - 1]);
        }
    }

    #[test]
    fn oracle_scan_single_stable_root() {
        let s = EulerSlice::new(P, Q).unwrap();
        let r4 = oracle_scan(&s, 4000, (0.01, 2.0), 400).unwrap();
        let r2 = oracle_scan(&s, 2000, (0.01, 2.0), 400).unwrap();
        assert_eq!(r4.len(), 1, "{r4:?}");
        assert_eq!(r2.len(), 1);
        assert!((r4[0] - r2[0]).abs() < 1e-4);
    }

    #[test]
    fn extension_of_zero_and_seam_identity() {
        let s = EulerSlice::new(P, Q).unwrap();
        let zero = vec![Complex64::new(0.0, 0.0); 10];
        let w = halfline_extend(&zero, Complex64::new(0.5, 0.0), &s).unwrap();
        assert!(w.values.iter().all(|x| x.norm() == 0.0));
        let z = vec![Complex64::new(1.5, 0.0), Complex64::new(0.7, 0.0)];
        let lam = Complex64::new(0.3, 0.0);
        let w = halfline_extend(&z, lam, &s).unwrap();
        assert_eq!(w.get(-5).unwrap().norm(), 0.0);
        // row n = -1: rho_{-2} w_{-2} - rho_0 w_0 = lambda w_{-1}
        let lhs =
            s.rho_at(-2).unwrap() * w.get(-2).unwrap() - s.rho_at(0).unwrap() * w.get(0).unwrap();
        assert!((lhs - lam * w.get(-1).unwrap()).norm() < 1e-15);
        assert!(halfline_extend(&z, Complex64::new(-1.0, 0.0), &s).is_err());
    }

    #[test]
    fn enumeration_finds_reference_slice() {
        let found = enumerate_slices(10, CaseLabel::IMinus);
        assert!(found.contains(&(P, Q)), "{found:?}");
        for (p, q) in &found {
            assert_eq!(classify(*p, *q).unwrap(), CaseLabel::IMinus);
            EulerSlice::new(*p, *q).unwrap();
        }
    }
}
