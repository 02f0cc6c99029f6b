//! Zeros of characteristic functions: sign-change brackets on the real
//! axis with bisection and secant polish, and argument-principle counts on
//! rectangles.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::json;

/// Adjacent grid points with a strict sign change of `Re f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    #[serde(serialize_with = "json::sig17")]
    pub lo: f64,
    #[serde(serialize_with = "json::sig17")]
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootMethod {
    Bracket,
    #[serde(rename = "winding+refine")]
    WindingRefine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootResult {
    #[serde(serialize_with = "json::complex")]
    pub location: Complex64,
    #[serde(serialize_with = "json::sig17")]
    pub residual: f64,
    #[serde(serialize_with = "json::sig17")]
    pub derivative_abs: f64,
    pub method: RootMethod,
}

/// Relative size of `Im f` tolerated on the real axis.
pub const REAL_VALUED_TOL: f64 = 1e-10;

fn real_value<F>(f: &F, x: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let v = f(x)?;
    if v.im.abs() >= REAL_VALUED_TOL * v.norm() && v.im != 0.0 {
        return Err(Error::NotRealValued { x, value: v });
    }
    Ok(v.re)
}

/// Brackets of sign changes of `Re f` on the uniform grid of `grid + 1`
/// points over `[a, b]`. Even-order roots are invisible to this scan.
pub fn bracket_real_roots<F>(f: F, a: f64, b: f64, grid: usize) -> Result<Vec<Bracket>>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    if !(a < b) || grid < 1 {
        return Err(Error::InvalidInput(format!(
            "bad scan interval [{a}, {b}] with grid {grid}"
        )));
    }
    let xs: Vec<f64> = (0..=grid)
        .map(|i| a + (b - a) * i as f64 / grid as f64)
        .collect();
    let ys = xs
        .par_iter()
        .map(|&x| real_value(&f, x))
        .collect::<Result<Vec<f64>>>()?;
    let mut out = Vec::new();
    for i in 0..grid {
        if ys[i] != 0.0 && ys[i + 1] != 0.0 && ys[i].signum() != ys[i + 1].signum() {
            out.push(Bracket {
                lo: xs[i],
                hi: xs[i + 1],
            });
        } else if ys[i + 1] == 0.0 && i + 1 < grid && ys[i] * ys[i + 2] < 0.0 {
            // exact zero on a grid point: bracket it with its neighbours
            out.push(Bracket {
                lo: xs[i],
                hi: xs[i + 2],
            });
        }
    }
    Ok(out)
}

fn same_sign(a: f64, b: f64) -> bool {
    (a > 0.0) == (b > 0.0)
}

/// Secant iteration kept inside `[lo, hi]`; fails with `Stall` when a step
/// leaves the bracket or the iterates stop improving.
fn secant_polish<F>(
    f: &F,
    mut lo: f64,
    mut flo: f64,
    mut hi: f64,
    fhi: f64,
    tol: f64,
) -> Result<f64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let (mut x0, mut f0, mut x1, mut f1) = (lo, flo, hi, fhi);
    for _ in 0..60 {
        if f1 == 0.0 {
            return Ok(x1);
        }
        if f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !(x2 >= lo && x2 <= hi) {
            break;
        }
        let f2 = real_value(f, x2)?;
        if same_sign(f2, flo) {
            lo = x2;
            flo = f2;
        } else {
            hi = x2;
        }
        let step = (x2 - x1).abs();
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        if step <= tol * x1.abs().max(1.0) || f2 == 0.0 {
            return Ok(x1);
        }
    }
    Err(Error::Stall { lo, hi })
}

fn bisect<F>(
    f: &F,
    mut lo: f64,
    mut flo: f64,
    mut hi: f64,
    width: f64,
) -> Result<(f64, f64, f64, f64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let mut fhi = real_value(f, hi)?;
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = real_value(f, mid)?;
        if fm == 0.0 {
            return Ok((mid, fm, mid, fm));
        }
        if same_sign(fm, flo) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    Ok((lo, flo, hi, fhi))
}

/// Refines a sign-change bracket: bisection to width `10 tol`, then secant
/// polish (falling back to bisection down to `tol` if the secant stalls).
/// The derivative is a central difference with step `sqrt(tol)`.
pub fn refine_root<F>(f: F, bracket: Bracket, tol: f64) -> Result<RootResult>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(
            "root tolerance must be positive".into(),
        ));
    }
    let flo = real_value(&f, bracket.lo)?;
    let fhi = real_value(&f, bracket.hi)?;
    let x = if flo == 0.0 {
        bracket.lo
    } else if fhi == 0.0 {
        bracket.hi
    } else {
        if same_sign(flo, fhi) {
            return Err(Error::InvalidInput(format!(
                "no sign change on [{}, {}]",
                bracket.lo, bracket.hi
            )));
        }
        let (lo, flo, hi, fhi) = bisect(&f, bracket.lo, flo, bracket.hi, 10.0 * tol)?;
        if lo == hi {
            lo
        } else {
            match secant_polish(&f, lo, flo, hi, fhi, tol) {
                Ok(x) => x,
                Err(Error::Stall { lo: slo, hi: shi }) => {
                    let flo = real_value(&f, slo)?;
                    let (lo, _, hi, _) = bisect(&f, slo, flo, shi, tol)?;
                    0.5 * (lo + hi)
                }
                Err(e) => return Err(e),
            }
        }
    };
    let residual = f(x)?.norm();
    let h = tol.sqrt();
    let derivative_abs = ((f(x + h)? - f(x - h)?) / (2.0 * h)).norm();
    Ok(RootResult {
        location: Complex64::new(x, 0.0),
        residual,
        derivative_abs,
        method: RootMethod::Bracket,
    })
}

/// Axis-aligned rectangle `[lo.re, hi.re] x [lo.im, hi.im]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub lo: Complex64,
    pub hi: Complex64,
}

impl Rectangle {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Result<Self> {
        if !(re.0 < re.1 && im.0 < im.1) {
            return Err(Error::InvalidInput(format!(
                "degenerate rectangle {re:?} x {im:?}"
            )));
        }
        Ok(Rectangle {
            lo: Complex64::new(re.0, im.0),
            hi: Complex64::new(re.1, im.1),
        })
    }

    /// Distance from the rectangle to the band `[-2i, 2i]`.
    pub fn band_distance(&self) -> f64 {
        let dx = (self.lo.re).max(-self.hi.re).max(0.0);
        let dy = (self.lo.im - 2.0).max(-2.0 - self.hi.im).max(0.0);
        dx.hypot(dy)
    }

    /// Counterclockwise boundary point for `t in [0, 4)`, one unit per edge.
    fn point(&self, t: f64) -> Complex64 {
        let (x0, y0, x1, y1) = (self.lo.re, self.lo.im, self.hi.re, self.hi.im);
        let edge = (t.floor() as i64).clamp(0, 3);
        let s = t - edge as f64;
        match edge {
            0 => Complex64::new(x0 + s * (x1 - x0), y0),
            1 => Complex64::new(x1, y0 + s * (y1 - y0)),
            2 => Complex64::new(x1 - s * (x1 - x0), y1),
            _ => Complex64::new(x0, y1 - s * (y1 - y0)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourPolicy {
    /// Samples per edge before refinement.
    pub initial_per_edge: usize,
    /// Maximum number of bisections of any initial segment.
    pub max_depth: u32,
    /// Required distance between rectangle and band.
    pub margin: f64,
    /// Zero-on-contour threshold relative to `max |f|` on the contour.
    pub floor_rel: f64,
}

impl Default for ContourPolicy {
    fn default() -> Self {
        ContourPolicy {
            initial_per_edge: 16,
            max_depth: 24,
            margin: 1e-2,
            floor_rel: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourCount {
    #[serde(serialize_with = "json::complex")]
    pub lo: Complex64,
    #[serde(serialize_with = "json::complex")]
    pub hi: Complex64,
    pub winding: i64,
    #[serde(serialize_with = "json::sig17")]
    pub min_modulus_on_contour: f64,
    pub samples_used: usize,
    /// Distance of the total phase / 2 pi from the nearest integer.
    #[serde(serialize_with = "json::sig17")]
    pub rounding_error: f64,
}

struct SegmentPhase {
    phase: f64,
    min_mod: f64,
    max_mod: f64,
    samples: usize,
}

fn segment_phase<F>(
    f: &F,
    rect: &Rectangle,
    (t0, f0): (f64, Complex64),
    (t1, f1): (f64, Complex64),
    depth: u32,
    policy: &ContourPolicy,
) -> Result<SegmentPhase>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let step = (f1 / f0).arg();
    if step.abs() < FRAC_PI_2 {
        return Ok(SegmentPhase {
            phase: step,
            min_mod: f0.norm().min(f1.norm()),
            max_mod: f0.norm().max(f1.norm()),
            samples: 0,
        });
    }
    if depth >= policy.max_depth {
        return Err(Error::ZeroOnContour {
            min_modulus: f0.norm().min(f1.norm()),
        });
    }
    let tm = 0.5 * (t0 + t1);
    let fm = f(rect.point(tm))?;
    if fm == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroOnContour { min_modulus: 0.0 });
    }
    let left = segment_phase(f, rect, (t0, f0), (tm, fm), depth + 1, policy)?;
    let right = segment_phase(f, rect, (tm, fm), (t1, f1), depth + 1, policy)?;
    Ok(SegmentPhase {
        phase: left.phase + right.phase,
        min_mod: left.min_mod.min(right.min_mod),
        max_mod: left.max_mod.max(right.max_mod),
        samples: left.samples + right.samples + 1,
    })
}

/// Number of zeros of a holomorphic `f` inside `rect` by phase
/// continuation along the boundary. Consecutive samples are bisected until
/// every phase step is below `pi/2`.
pub fn winding_number<F>(f: F, rect: Rectangle, policy: &ContourPolicy) -> Result<ContourCount>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let dist = rect.band_distance();
    if dist <= policy.margin {
        return Err(Error::InvalidInput(format!(
            "rectangle is within {dist:e} of the band (margin {:e})",
            policy.margin
        )));
    }
    let n = 4 * policy.initial_per_edge.max(1);
    let ts: Vec<f64> = (0..n).map(|i| 4.0 * i as f64 / n as f64).collect();
    let values = ts
        .par_iter()
        .map(|&t| f(rect.point(t)))
        .collect::<Result<Vec<_>>>()?;
    if let Some(z) = values.iter().find(|v| v.norm() == 0.0) {
        return Err(Error::ZeroOnContour {
            min_modulus: z.norm(),
        });
    }
    let segments = (0..n)
        .into_par_iter()
        .map(|i| {
            let j = (i + 1) % n;
            let t1 = if j == 0 { 4.0 } else { ts[j] };
            segment_phase(&f, &rect, (ts[i], values[i]), (t1, values[j]), 0, policy)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = 0.0;
    let mut min_mod = f64::INFINITY;
    let mut max_mod = 0.0f64;
    let mut samples = n;
    for s in &segments {
        total += s.phase;
        min_mod = min_mod.min(s.min_mod);
        max_mod = max_mod.max(s.max_mod);
        samples += s.samples;
    }
    if min_mod < policy.floor_rel * max_mod {
        return Err(Error::ZeroOnContour {
            min_modulus: min_mod,
        });
    }
    let turns = total / (2.0 * PI);
    let winding = turns.round();
    Ok(ContourCount {
        lo: rect.lo,
        hi: rect.hi,
        winding: winding as i64,
        min_modulus_on_contour: min_mod,
        samples_used: samples,
        rounding_error: (turns - winding).abs(),
    })
}

impl Rectangle {
    pub fn center(&self) -> Complex64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.lo.re && z.re <= self.hi.re && z.im >= self.lo.im && z.im <= self.hi.im
    }
}

/// Complex secant iteration from the centre of a rectangle known to hold a
/// single zero. Fails if an iterate leaves the rectangle.
pub fn refine_complex_root<F>(f: F, rect: Rectangle, tol: f64) -> Result<RootResult>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(
            "root tolerance must be positive".into(),
        ));
    }
    let diag = rect.hi - rect.lo;
    let mut x0 = rect.center();
    let mut x1 = x0 + 1e-3 * diag;
    let mut f0 = f(x0)?;
    let mut f1 = f(x1)?;
    let mut last_change = f64::INFINITY;
    for _ in 0..100 {
        if f1.norm() == 0.0 {
            break;
        }
        if f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !rect.contains(x2) {
            break;
        }
        last_change = (x2 - x1).norm();
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x2)?;
        if last_change <= tol * x1.norm().max(1.0) {
            let h = tol.sqrt();
            let derivative_abs = ((f(x1 + h)? - f(x1 - h)?) / (2.0 * h)).norm();
            return Ok(RootResult {
                location: x1,
                residual: f1.norm(),
                derivative_abs,
                method: RootMethod::WindingRefine,
            });
        }
    }
    if f1.norm() == 0.0 {
        let h = tol.sqrt();
        return Ok(RootResult {
            location: x1,
            residual: 0.0,
            derivative_abs: ((f(x1 + h)? - f(x1 - h)?) / (2.0 * h)).norm(),
            method: RootMethod::WindingRefine,
        });
    }
    Err(Error::NoConvergence {
        what: "complex secant",
        last_change,
        limit: 100,
    })
}
