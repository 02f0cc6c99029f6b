//! Truncation control shared by the recursions and the finite sections.
//!
//! Every characteristic function is evaluated on the model truncated to a
//! support `0..S`, for `S = S0, 2 S0, 4 S0, ...`. Finitely supported models
//! are exact once `S` covers the support. For algebraic tails
//! `|b_n c_n| ~ n^-e` the truncated value has an asymptotic expansion in
//! powers of `1/S` starting at order `e - 1`, so successive doublings are fed
//! through a Richardson tableau.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Mat2, SpectralFrame};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Relative tolerance on successive (extrapolated) values.
    pub tol: f64,
    /// Smallest support tried.
    pub initial_support: usize,
    /// Largest support (section size, or seed index for recursions) allowed.
    pub n_max: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            tol: 1e-10,
            initial_support: 64,
            n_max: 1 << 22,
        }
    }
}

impl TruncationPolicy {
    /// Defaults for dense finite sections, where each doubling costs 8x.
    pub fn sections() -> Self {
        TruncationPolicy {
            tol: 1e-8,
            initial_support: 64,
            n_max: 1024,
        }
    }

    /// First support to try at this lambda: the exact support when it is
    /// finite, otherwise large enough that `S (1 - |mu_+|) >= 2`, since near
    /// the band the expansion in `1/S` only becomes asymptotic late.
    pub(crate) fn start(&self, frame: &SpectralFrame, support: Option<usize>) -> usize {
        if let Some(len) = support {
            return len;
        }
        let gap = 1.0 - frame.mu_plus.norm();
        let mut s = self.initial_support.max(1);
        while (s as f64) * gap < 2.0 && s * 2 <= self.n_max {
            s *= 2;
        }
        s
    }
}

/// Values that can be combined linearly by the tableau.
pub(crate) trait Extrapolate: Clone {
    fn combine(&self, w_self: f64, other: &Self, w_other: f64) -> Self;
    fn distance(&self, other: &Self) -> f64;
}

impl Extrapolate for Complex64 {
    fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        self * a + other * b
    }
    fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
}

impl Extrapolate for Mat2 {
    fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        self.scale(Complex64::new(a, 0.0)) + other.scale(Complex64::new(b, 0.0))
    }
    fn distance(&self, other: &Self) -> f64 {
        self.dist(other)
    }
}

impl Extrapolate for Vec<Complex64> {
    fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        self.iter().zip(other).map(|(x, y)| x * a + y * b).collect()
    }
    fn distance(&self, other: &Self) -> f64 {
        self.iter()
            .zip(other)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

/// Richardson tableau for a sequence computed at `h, h/2, h/4, ...` whose
/// error expands in `h^p0, h^(p0+1), ...`. With `p0 = None` the tableau is
/// bypassed and the latest raw value is returned.
pub(crate) struct Richardson<T> {
    leading_order: Option<f64>,
    prev_row: Vec<T>,
    best: Option<T>,
}

impl<T: Extrapolate> Richardson<T> {
    pub(crate) fn new(leading_order: Option<f64>) -> Self {
        Richardson {
            leading_order,
            prev_row: Vec::new(),
            best: None,
        }
    }

    /// Leading order for a model with the given tail exponent.
    pub(crate) fn for_tail(tail_exponent: f64) -> Self {
        let order =
            (tail_exponent.is_finite() && tail_exponent > 1.0).then_some(tail_exponent - 1.0);
        Self::new(order)
    }

    pub(crate) fn is_extrapolating(&self) -> bool {
        self.leading_order.is_some() && self.prev_row.len() > 1
    }

    /// The entry one order below the newest estimate; its distance from the
    /// estimate bounds the error left in the tableau.
    pub(crate) fn runner_up(&self) -> Option<&T> {
        let n = self.prev_row.len();
        (self.leading_order.is_some() && n > 1).then(|| &self.prev_row[n - 2])
    }

    /// Adds the next raw value, returns the new best estimate and its change
    /// from the previous best (infinite on the first push).
    pub(crate) fn push(&mut self, raw: T) -> (T, f64) {
        let best = match self.leading_order {
            None => {
                self.prev_row = vec![raw.clone()];
                raw
            }
            Some(p0) => {
                let mut row = Vec::with_capacity(self.prev_row.len() + 1);
                row.push(raw);
                for (k, prev) in self.prev_row.iter().enumerate() {
                    let factor = 2f64.powf(p0 + k as f64);
                    let w = 1.0 / (factor - 1.0);
                    let next = row[k].combine(1.0 + w, prev, -w);
                    row.push(next);
                }
                let best = row.last().cloned().expect("row is nonempty");
                self.prev_row = row;
                best
            }
        };
        let change = match &self.best {
            Some(old) => best.distance(old),
            None => f64::INFINITY,
        };
        self.best = Some(best.clone());
        (best, change)
    }
}

/// Outcome of [`adaptive`].
pub(crate) struct Adaptive<T> {
    pub value: T,
    /// Largest support evaluated.
    pub support: usize,
    pub change: f64,
    pub extrapolated: bool,
}

/// Evaluates `eval(S)` for `S = start, 2 start, ...` until the best estimate
/// is within `tol * max(1, scale)` of the previous value (the raw value at
/// `S / 2`, or the next lower order of the tableau when extrapolating).
/// `change` measures that distance (so callers can watch only part of a
/// vector); `exact` short-circuits after the first evaluation.
#[allow(clippy::too_many_arguments)]
pub(crate) fn adaptive<T, E, C>(
    policy: &TruncationPolicy,
    start: usize,
    exact: bool,
    tail_exponent: f64,
    what: &'static str,
    mut eval: E,
    change: C,
) -> Result<Adaptive<T>>
where
    T: Extrapolate,
    E: FnMut(usize) -> Result<T>,
    C: Fn(&T, &T) -> (f64, f64),
{
    if !(policy.tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance {} must be positive",
            policy.tol
        )));
    }
    let mut tableau = if exact {
        Richardson::new(None)
    } else {
        Richardson::for_tail(tail_exponent)
    };
    let mut support = start;
    let mut prev: Option<T> = None;
    let mut last_change = f64::INFINITY;
    loop {
        let raw = eval(support)?;
        let (best, _) = tableau.push(raw);
        if exact {
            return Ok(Adaptive {
                value: best,
                support,
                change: 0.0,
                extrapolated: false,
            });
        }
        if let Some(old) = tableau.runner_up().or(prev.as_ref()) {
            let (delta, scale) = change(&best, old);
            last_change = delta;
            if delta <= policy.tol * scale.max(1.0) {
                return Ok(Adaptive {
                    value: best,
                    support,
                    change: delta,
                    extrapolated: tableau.is_extrapolating(),
                });
            }
        }
        prev = Some(best);
        match support.max(1).checked_mul(2) {
            Some(next) if next <= policy.n_max => support = next,
            _ => {
                return Err(Error::NoConvergence {
                    what,
                    last_change,
                    limit: policy.n_max,
                })
            }
        }
    }
}
