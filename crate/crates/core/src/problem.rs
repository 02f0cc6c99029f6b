//! Coefficient models `(b_n, c_n)` for `z_{n-1} - z_{n+1} + b_n c_n z_n = lambda z_n`.
//!
//! Three kinds are supported: explicit finite lists (zero beyond their
//! length), a rank-one perturbation at `n = 0`, and the Euler coefficients
//! `b_n = -lambda sqrt(1 - rho_n) / rho_n`, `c_n = sqrt(1 - rho_n)` built from
//! a [`RhoModel`].
//!
//! Membership of `(b_n), (c_n)` in l^2 cannot be certified from finitely many
//! terms. Validation checks the first [`RHO_VALIDATION_TERMS`] terms; the
//! decay rate of the tail is carried as metadata (`tail_exponent`) and used
//! only to size truncations and to pick the extrapolation orders.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euler2d::{self, EulerSlice, Lattice};
use crate::json::JsonComplex;
use crate::spectral::{SpectralFrame, ONE, ZERO};

/// How many `rho_n` are checked against the sign conditions.
pub const RHO_VALIDATION_TERMS: usize = 10_000;

/// Number of explicit terms summed by [`ProblemModel::tail_sum`] before the
/// algebraic remainder estimate takes over.
pub const TAIL_WINDOW: usize = 256;

/// Source of the sequence `rho_n`, `n >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum RhoModel {
    /// `rho_n = 1 - |p|^2 / |q + n p|^2` for a lattice slice.
    EulerLattice(Lattice),
    /// Finite list, `rho_n = 1` beyond its end.
    List(Vec<f64>),
}

impl RhoModel {
    /// Lattice-backed model; `(p, q)` must satisfy the sign conditions
    /// `rho_0 < 0`, `rho_n in (0, 1)` as given (no re-indexing).
    pub fn lattice(lattice: Lattice) -> Result<Self> {
        let model = RhoModel::EulerLattice(lattice);
        model.validate()?;
        Ok(model)
    }

    pub fn list(rho: Vec<f64>) -> Result<Self> {
        if rho.is_empty() {
            return Err(Error::InvalidInput("rho list is empty".into()));
        }
        let model = RhoModel::List(rho);
        model.validate()?;
        Ok(model)
    }

    pub fn value(&self, n: usize) -> Result<f64> {
        match self {
            RhoModel::EulerLattice(lat) => euler2d::rho_n(lat.p, lat.q, n as i64),
            RhoModel::List(v) => Ok(v.get(n).copied().unwrap_or(1.0)),
        }
    }

    /// Number of terms different from the unit tail, if finite.
    pub fn support_len(&self) -> Option<usize> {
        match self {
            RhoModel::EulerLattice(_) => None,
            RhoModel::List(v) => Some(v.len()),
        }
    }

    /// `sup_n |rho_n|` (at least 1, the limit value).
    pub fn sup_abs(&self) -> Result<f64> {
        let terms = self.support_len().unwrap_or(RHO_VALIDATION_TERMS);
        let mut sup = 1.0f64;
        for n in 0..terms {
            sup = sup.max(self.value(n)?.abs());
        }
        Ok(sup)
    }

    fn validate(&self) -> Result<()> {
        let terms = self.support_len().unwrap_or(RHO_VALIDATION_TERMS);
        for n in 0..terms {
            let r = self.value(n)?;
            if !r.is_finite() {
                return Err(Error::InvalidInput(format!("rho_{n} is not finite")));
            }
            let ok = if n == 0 { r < 0.0 } else { r > 0.0 && r < 1.0 };
            if !ok {
                let want = if n == 0 {
                    "rho_0 < 0"
                } else {
                    "rho_n in (0, 1)"
                };
                return Err(Error::InvalidInput(format!(
                    "rho_{n} = {r} violates {want}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Explicit {
        b: Vec<Complex64>,
        c: Vec<Complex64>,
    },
    RankOne {
        s: Complex64,
    },
    EulerRho(RhoModel),
}

/// A coefficient model together with its tail-decay claim.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemModel {
    pub kind: ModelKind,
    /// `|b_n c_n| = O(n^-tail_exponent)`; infinite for finitely supported models.
    pub tail_exponent: f64,
}

impl ProblemModel {
    pub fn explicit(b: Vec<Complex64>, c: Vec<Complex64>) -> Result<Self> {
        if b.len() != c.len() {
            return Err(Error::InvalidInput(format!(
                "b and c lengths differ ({} vs {})",
                b.len(),
                c.len()
            )));
        }
        if b.iter().chain(&c).any(|z| !z.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        Ok(ProblemModel {
            kind: ModelKind::Explicit { b, c },
            tail_exponent: f64::INFINITY,
        })
    }

    /// `b_n c_n = 0` for all n.
    pub fn zero() -> Self {
        ProblemModel {
            kind: ModelKind::Explicit {
                b: vec![],
                c: vec![],
            },
            tail_exponent: f64::INFINITY,
        }
    }

    /// Single perturbation `b_0 c_0 = s`, stored as `b_0 = s`, `c_0 = 1`.
    pub fn rank_one(s: Complex64) -> Self {
        ProblemModel {
            kind: ModelKind::RankOne { s },
            tail_exponent: f64::INFINITY,
        }
    }

    pub fn euler(rho: RhoModel) -> Self {
        let tail_exponent = match rho {
            RhoModel::EulerLattice(_) => 2.0,
            RhoModel::List(_) => f64::INFINITY,
        };
        ProblemModel {
            kind: ModelKind::EulerRho(rho),
            tail_exponent,
        }
    }

    pub fn rho(&self) -> Option<&RhoModel> {
        match &self.kind {
            ModelKind::EulerRho(r) => Some(r),
            _ => None,
        }
    }

    /// Length of the support of `b_n c_n` when finite.
    pub fn support_len(&self) -> Option<usize> {
        match &self.kind {
            ModelKind::Explicit { b, .. } => Some(b.len()),
            ModelKind::RankOne { .. } => Some(1),
            ModelKind::EulerRho(r) => r.support_len(),
        }
    }

    /// True when `b_n`, `c_n` are real for real lambda.
    pub fn is_real(&self) -> bool {
        match &self.kind {
            ModelKind::Explicit { b, c } => b.iter().chain(c).all(|z| z.im == 0.0),
            ModelKind::RankOne { s } => s.im == 0.0,
            ModelKind::EulerRho(_) => true,
        }
    }

    /// The pair `(b_n, c_n)` at spectral parameter `frame.lambda`.
    pub fn coeff(&self, frame: &SpectralFrame, n: usize) -> Result<(Complex64, Complex64)> {
        match &self.kind {
            ModelKind::Explicit { b, c } => Ok(match (b.get(n), c.get(n)) {
                (Some(&bn), Some(&cn)) => (bn, cn),
                _ => (ZERO, ZERO),
            }),
            ModelKind::RankOne { s } => Ok(if n == 0 { (*s, ONE) } else { (ZERO, ZERO) }),
            ModelKind::EulerRho(rho) => {
                let r = rho.value(n)?;
                if r == 0.0 {
                    return Err(Error::DegenerateRho { index: n });
                }
                let c = Complex64::new((1.0 - r).sqrt(), 0.0);
                let b = -frame.lambda * c / r;
                Ok((b, c))
            }
        }
    }

    /// `b_n c_n`. For the Euler kind this is evaluated as
    /// `-lambda (1 - rho_n) / rho_n` directly.
    pub fn bc(&self, frame: &SpectralFrame, n: usize) -> Result<Complex64> {
        match &self.kind {
            ModelKind::EulerRho(rho) => {
                let r = rho.value(n)?;
                if r == 0.0 {
                    return Err(Error::DegenerateRho { index: n });
                }
                Ok(-frame.lambda * ((1.0 - r) / r))
            }
            _ => {
                let (b, c) = self.coeff(frame, n)?;
                Ok(b * c)
            }
        }
    }

    /// Surrogate for `sum_{n >= start} |b_n c_n|`: exact for finitely supported
    /// models, otherwise a window of [`TAIL_WINDOW`] terms plus the remainder
    /// implied by `tail_exponent`.
    pub fn tail_sum(&self, frame: &SpectralFrame, start: usize) -> Result<f64> {
        if let Some(len) = self.support_len() {
            let mut sum = 0.0;
            for n in start..len {
                sum += self.bc(frame, n)?.norm();
            }
            return Ok(sum);
        }
        let end = start + TAIL_WINDOW;
        let mut sum = 0.0;
        for n in start..end {
            sum += self.bc(frame, n)?.norm();
        }
        let e = self.tail_exponent;
        if e > 1.0 {
            // sum_{n >= m} (m / n)^e ~ m^e (m - 1/2)^(1 - e) / (e - 1)
            let m = end as f64;
            let last = self.bc(frame, end)?.norm();
            sum += last * m.powf(e) * (m - 0.5).powf(1.0 - e) / (e - 1.0);
        } else {
            sum = f64::INFINITY;
        }
        Ok(sum)
    }
}

/// The CLI problem schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    Euler {
        p: [i64; 2],
        q: [i64; 2],
    },
    RankOne {
        s: JsonComplex,
    },
    Explicit {
        b: Vec<JsonComplex>,
        c: Vec<JsonComplex>,
    },
    RhoList {
        rho: Vec<f64>,
    },
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("problem JSON: {e}")))
    }

    /// Builds the model. Euler slices go through [`EulerSlice::new`], which
    /// requires case I_minus.
    pub fn build(&self) -> Result<ProblemModel> {
        match self {
            ProblemSpec::Euler { p, q } => {
                let slice = EulerSlice::new(*p, *q)?;
                slice.model()
            }
            ProblemSpec::RankOne { s } => Ok(ProblemModel::rank_one((*s).into())),
            ProblemSpec::Explicit { b, c } => ProblemModel::explicit(
                b.iter().copied().map(Into::into).collect(),
                c.iter().copied().map(Into::into).collect(),
            ),
            ProblemSpec::RhoList { rho } => Ok(ProblemModel::euler(RhoModel::list(rho.clone())?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(re: f64, im: f64) -> SpectralFrame {
        SpectralFrame::new(Complex64::new(re, im)).unwrap()
    }

    fn reference_euler() -> ProblemModel {
        ProblemModel::euler(RhoModel::lattice(Lattice::new([3, 1], [2, -2])).unwrap())
    }

    #[test]
    fn rank_one_coefficients() {
        let m = ProblemModel::rank_one(Complex64::new(1.0, 0.0));
        for lam in [frame(1.0, 0.0), frame(0.3, 4.0)] {
            let (b, c) = m.coeff(&lam, 0).unwrap();
            assert_eq!(b * c, Complex64::new(1.0, 0.0));
            assert_eq!(m.coeff(&lam, 5).unwrap(), (ZERO, ZERO));
        }
    }

    #[test]
    fn euler_coefficients_match_rho_form() {
        let m = ProblemModel::euler(RhoModel::list(vec![-0.25, 8.0 / 13.0]).unwrap());
        let f = frame(1.0, 0.0);
        let (b, c) = m.coeff(&f, 0).unwrap();
        assert!((b * c - Complex64::new(5.0, 0.0)).norm() < 1e-14);
        assert_eq!(b.im, 0.0);
        assert_eq!(m.coeff(&f, 7).unwrap(), (ZERO, ZERO));

        let m = reference_euler();
        let f = frame(0.8, 0.3);
        let rho = m.rho().unwrap();
        for n in 0..200 {
            let r = rho.value(n).unwrap();
            let (b, c) = m.coeff(&f, n).unwrap();
            assert!((c * c - (1.0 - r)).norm() < 1e-14);
            let expect = -f.lambda * (1.0 - r) / r;
            assert!((b * c - expect).norm() <= 1e-14 * expect.norm().max(1.0));
            assert!((m.bc(&f, n).unwrap() - expect).norm() <= 1e-14 * expect.norm().max(1.0));
        }
    }

    #[test]
    fn coefficients_are_bitwise_deterministic() {
        let m = reference_euler();
        let f = frame(0.5, 0.0);
        for n in [0, 3, 999] {
            assert_eq!(m.coeff(&f, n).unwrap(), m.coeff(&f, n).unwrap());
        }
    }

    #[test]
    fn explicit_validation() {
        let one = Complex64::new(1.0, 0.0);
        assert!(ProblemModel::explicit(vec![one], vec![]).is_err());
        assert!(ProblemModel::explicit(vec![Complex64::new(f64::NAN, 0.0)], vec![one]).is_err());
        let m = ProblemModel::explicit(vec![one, one], vec![one, one]).unwrap();
        assert_eq!(m.coeff(&frame(1.0, 0.0), 10).unwrap(), (ZERO, ZERO));
    }

    #[test]
    fn rho_validation() {
        assert!(RhoModel::list(vec![0.25, 0.5]).is_err());
        assert!(RhoModel::list(vec![-0.25, 1.5]).is_err());
        assert!(RhoModel::list(vec![]).is_err());
        // not canonical: interior point of the slice is not at n = 0
        assert!(RhoModel::lattice(Lattice::new([3, 1], [5, -1])).is_err());
        let r = RhoModel::list(vec![-0.25, 0.6]).unwrap();
        assert_eq!(r.value(10).unwrap(), 1.0);
    }

    #[test]
    fn tail_sum_finite_support() {
        let f = frame(1.0, 0.0);
        let m = ProblemModel::rank_one(Complex64::new(3.0, 0.0));
        assert_eq!(m.tail_sum(&f, 1).unwrap(), 0.0);
        assert_eq!(m.tail_sum(&f, 0).unwrap(), 3.0);
        let one = Complex64::new(1.0, 0.0);
        let m = ProblemModel::explicit(vec![one; 4], vec![one; 4]).unwrap();
        assert_eq!(m.tail_sum(&f, 4).unwrap(), 0.0);
        assert_eq!(m.tail_sum(&f, 2).unwrap(), 2.0);
    }

    #[test]
    fn euler_tail_is_order_one_over_n() {
        let m = reference_euler();
        let f = frame(1.0, 0.0);
        let scaled: Vec<f64> = [1000, 2000, 4000]
            .iter()
            .map(|&n| m.tail_sum(&f, n).unwrap() * n as f64)
            .collect();
        // |b_n c_n| ~ 1/n^2, so N * tail -> 1 for lambda = 1
        for s in &scaled {
            assert!((s - 1.0).abs() < 0.01, "{scaled:?}");
        }
        let mut prev = f64::INFINITY;
        for n in 0..3000 {
            let t = m.tail_sum(&f, n).unwrap();
            assert!(t <= prev, "tail_sum increased at {n}");
            prev = t;
        }
    }

    #[test]
    fn schema_parses_all_kinds() {
        let specs = [
            r#"{"type":"euler","p":[3,1],"q":[2,-2]}"#,
            r#"{"type":"rank_one","s":{"re":2,"im":0}}"#,
            r#"{"type":"explicit","b":[{"re":1,"im":0}],"c":[{"re":0.5,"im":1}]}"#,
            r#"{"type":"rho_list","rho":[-0.25,0.6154,0.8]}"#,
        ];
        for text in specs {
            let spec = ProblemSpec::from_json(text).unwrap();
            spec.build().unwrap();
        }
        assert!(ProblemSpec::from_json(r#"{"type":"nope"}"#).is_err());
        let bad = ProblemSpec::from_json(r#"{"type":"euler","p":[3,1],"q":[1,2]}"#).unwrap();
        assert!(matches!(bad.build(), Err(Error::InvalidCase(_))));
    }
}
