//! Dense complex LU determinant and a real tridiagonal LU used by the
//! finite-section oracles.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spectral::{ONE, ZERO};

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds the matrix row by row (in parallel) from `entry(row, col)`.
    pub fn from_fn<F>(n: usize, entry: F) -> Self
    where
        F: Fn(usize, usize) -> Complex64 + Sync,
    {
        let mut data = vec![ZERO; n * n];
        if n > 0 {
            data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
                for (j, x) in row.iter_mut().enumerate() {
                    *x = entry(i, j);
                }
            });
        }
        DenseMatrix { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("matrix is not square".into()));
        }
        Ok(DenseMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Determinant by LU with partial pivoting. The matrix is consumed as
/// workspace. A zero pivot column means the matrix is singular and the
/// determinant is returned as exactly zero.
///
/// Rows whose multiplier is exactly zero are skipped, which keeps the block
/// sections (half their rows are unit vectors) at twice the cost of a
/// scalar section rather than eight times.
pub fn lu_det(mut m: DenseMatrix) -> Result<Complex64> {
    let n = m.n;
    let mut det = ONE;
    for k in 0..n {
        let mut piv = k;
        let mut best = m[(k, k)].norm();
        for i in k + 1..n {
            let v = m[(i, k)].norm();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if !best.is_finite() {
            return Err(Error::LuFailure { step: k });
        }
        if best == 0.0 {
            return Ok(ZERO);
        }
        if piv != k {
            for j in 0..n {
                m.data.swap(k * n + j, piv * n + j);
            }
            det = -det;
        }
        let pivot = m[(k, k)];
        det *= pivot;
        let inv = pivot.inv();
        let (upper, lower) = m.data.split_at_mut((k + 1) * n);
        let pivot_row = &upper[k * n + k + 1..k * n + n];
        for row in lower.chunks_mut(n) {
            let l = row[k] * inv;
            if l == ZERO {
                continue;
            }
            row[k] = ZERO;
            for (x, p) in row[k + 1..].iter_mut().zip(pivot_row) {
                *x -= l * p;
            }
        }
    }
    if det.is_finite() {
        Ok(det)
    } else {
        Err(Error::LuFailure { step: n })
    }
}

/// Real tridiagonal matrix: `sub[i]` at `(i+1, i)`, `diag[i]` at `(i, i)`,
/// `sup[i]` at `(i, i+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.size();
        let mut out = vec![vec![0.0; n]; n];
        for i in 0..n {
            out[i][i] = self.diag[i];
            if i + 1 < n {
                out[i + 1][i] = self.sub[i];
                out[i][i + 1] = self.sup[i];
            }
        }
        out
    }

    /// `self - shift I`.
    pub fn shifted(&self, shift: f64) -> Tridiagonal {
        Tridiagonal {
            sub: self.sub.clone(),
            diag: self.diag.iter().map(|d| d - shift).collect(),
            sup: self.sup.clone(),
        }
    }
}

/// Sign (`-1`, `0`, `1`) and `ln|det|` of a real tridiagonal matrix, by LU
/// with partial pivoting (row interchanges produce a second superdiagonal,
/// which never feeds back into the determinant).
pub fn tridiagonal_det_sign(t: &Tridiagonal) -> (f64, f64) {
    let n = t.size();
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut d = t.diag.clone();
    let mut du = t.sup.clone();
    let dl = &t.sub;
    let mut sign = 1.0;
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] != 0.0 {
                let fact = dl[i] / d[i];
                d[i + 1] -= fact * du[i];
            }
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 1 < n - 1 {
                du[i + 1] *= -fact;
            }
            du[i] = temp;
            sign = -sign;
        }
    }
    let mut log_abs = 0.0;
    for x in &d {
        if *x == 0.0 {
            return (0.0, f64::NEG_INFINITY);
        }
        if *x < 0.0 {
            sign = -sign;
        }
        log_abs += x.abs().ln();
    }
    (sign, log_abs)
}

/// Roots of a sign function `sign(x)` on `[a, b]`: sign changes on a
/// uniform grid of `grid + 1` points (evaluated in parallel), each bisected
/// to width `tol`. Returns sorted midpoints.
pub fn scan_sign_changes<F>(sign: F, a: f64, b: f64, grid: usize, tol: f64) -> Vec<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    if !(a < b) || grid == 0 {
        return Vec::new();
    }
    let xs: Vec<f64> = (0..=grid)
        .map(|i| a + (b - a) * i as f64 / grid as f64)
        .collect();
    let ss: Vec<f64> = xs.par_iter().map(|&x| sign(x)).collect();
    let brackets: Vec<(f64, f64, f64)> = (0..grid)
        .filter(|&i| ss[i] != 0.0 && ss[i + 1] != 0.0 && ss[i] != ss[i + 1])
        .map(|i| (xs[i], xs[i + 1], ss[i]))
        .collect();
    let mut roots: Vec<f64> = brackets
        .par_iter()
        .map(|&(mut lo, mut hi, slo)| {
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let sm = sign(mid);
                if sm == 0.0 {
                    return mid;
                }
                if sm == slo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect();
    // exact zeros on grid points
    for i in 1..grid {
        if ss[i] == 0.0 && ss[i - 1] != ss[i + 1] {
            roots.push(xs[i]);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Cofactor expansion along the first row.
    fn cofactor_det(rows: &[Vec<Complex64>]) -> Complex64 {
        let n = rows.len();
        if n == 1 {
            return rows[0][0];
        }
        let mut sum = ZERO;
        for j in 0..n {
            let minor: Vec<Vec<Complex64>> = rows[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|(k, _)| *k != j)
                        .map(|(_, x)| *x)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sum += rows[0][j] * cofactor_det(&minor) * sign;
        }
        sum
    }

    fn pseudo_random(n: usize, seed: u64) -> Vec<Vec<Complex64>> {
        let mut state = seed;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        (0..n)
            .map(|_| (0..n).map(|_| c(next(), next())).collect())
            .collect()
    }

    #[test]
    fn simple_determinants() {
        assert_eq!(lu_det(DenseMatrix::identity(5)).unwrap(), ONE);
        let m =
            DenseMatrix::from_rows(vec![vec![c(2.0, 0.0), ZERO], vec![ZERO, c(0.0, 3.0)]]).unwrap();
        assert!((lu_det(m).unwrap() - c(0.0, 6.0)).norm() < 1e-15);
        let swap = DenseMatrix::from_rows(vec![vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap();
        assert_eq!(lu_det(swap).unwrap(), -ONE);
        let singular = DenseMatrix::from_rows(vec![vec![ONE, ONE], vec![ONE, ONE]]).unwrap();
        assert!(lu_det(singular).unwrap().norm() < 1e-15);
    }

    #[test]
    fn agrees_with_cofactor_expansion() {
        for (n, seed) in [(3, 1), (5, 7), (8, 42)] {
            let rows = pseudo_random(n, seed);
            let expect = cofactor_det(&rows);
            let got = lu_det(DenseMatrix::from_rows(rows).unwrap()).unwrap();
            assert!(
                (got - expect).norm() < 1e-12 * expect.norm().max(1.0),
                "n={n}"
            );
        }
    }

    #[test]
    fn nonfinite_pivot_fails() {
        let m = DenseMatrix::from_rows(vec![vec![c(f64::INFINITY, 0.0)]]).unwrap();
        assert!(matches!(lu_det(m), Err(Error::LuFailure { .. })));
    }

    #[test]
    fn tridiagonal_sign_matches_dense() {
        let t = Tridiagonal {
            sub: vec![0.3, -2.0, 1.5, 0.1],
            diag: vec![0.0, 0.1, -0.4, 2.0, 0.0],
            sup: vec![1.0, 0.7, -3.0, 0.2],
        };
        let dense: Vec<Vec<Complex64>> = t
            .to_dense()
            .into_iter()
            .map(|r| r.into_iter().map(|x| c(x, 0.0)).collect())
            .collect();
        let expect = cofactor_det(&dense).re;
        let (sign, log_abs) = tridiagonal_det_sign(&t);
        assert_eq!(sign, expect.signum());
        assert!((log_abs - expect.abs().ln()).abs() < 1e-12);
    }

    #[test]
    fn shifted_scan_finds_rank_one_eigenvalue() {
        // subdiagonal 1, superdiagonal -1, diagonal s at n = 0: eigenvalue s - 1/s
        let m = 400;
        let mut diag = vec![0.0; m];
        diag[0] = 2.0;
        let t = Tridiagonal {
            sub: vec![1.0; m - 1],
            diag,
            sup: vec![-1.0; m - 1],
        };
        let roots = scan_sign_changes(
            |x| tridiagonal_det_sign(&t.shifted(x)).0,
            0.1,
            3.0,
            100,
            1e-12,
        );
        assert_eq!(roots.len(), 1, "{roots:?}");
        assert!((roots[0] - 1.5).abs() < 1e-8);
    }
}
