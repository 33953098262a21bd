//! Dense complex linear algebra at arbitrary precision.
//!
//! Sizes here are small (Hankel systems of order ≤ a few dozen, least-squares
//! problems with a few hundred rows), so plain dense algorithms are used.

use rug::Float;

use crate::error::{Error, Result};
use crate::num::{pow2_neg, Complex};

pub type Matrix = Vec<Vec<Complex>>;

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    odd_swaps: bool,
    singular: bool,
}

impl Lu {
    pub fn new(mut a: Matrix) -> Self {
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd_swaps = false;
        let mut singular = false;
        for k in 0..n {
            let mut pivot = k;
            let mut best = a[k][k].norm_sqr();
            for (i, row) in a.iter().enumerate().skip(k + 1) {
                let m = row[k].norm_sqr();
                if m > best {
                    best = m;
                    pivot = i;
                }
            }
            if best.is_zero() {
                singular = true;
                continue;
            }
            if pivot != k {
                a.swap(pivot, k);
                perm.swap(pivot, k);
                odd_swaps = !odd_swaps;
            }
            let (upper, lower) = a.split_at_mut(k + 1);
            let pivot_row = &upper[k];
            let inv = pivot_row[k].recip();
            for row in lower.iter_mut() {
                if row[k].is_zero() {
                    continue;
                }
                let factor = &row[k] * &inv;
                for j in (k + 1)..n {
                    let t = &factor * &pivot_row[j];
                    row[j] -= &t;
                }
                row[k] = factor;
            }
        }
        Lu {
            lu: a,
            perm,
            odd_swaps,
            singular,
        }
    }

    /// True when some pivot column was exactly zero.
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn determinant(&self, prec: u32) -> Complex {
        if self.singular {
            return Complex::zero(prec);
        }
        let mut det = Complex::one(prec);
        for (k, row) in self.lu.iter().enumerate() {
            det = &det * &row[k];
        }
        if self.odd_swaps {
            -det
        } else {
            det
        }
    }

    pub fn solve(&self, b: &[Complex]) -> Option<Vec<Complex>> {
        if self.singular {
            return None;
        }
        let n = self.lu.len();
        let mut x: Vec<Complex> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                let t = &self.lu[i][j] * &x[j];
                x[i] -= &t;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let t = &self.lu[i][j] * &x[j];
                x[i] -= &t;
            }
            x[i] = &x[i] / &self.lu[i][i];
        }
        Some(x)
    }
}

pub fn determinant(a: &Matrix, prec: u32) -> Complex {
    if a.is_empty() {
        return Complex::one(prec);
    }
    Lu::new(a.clone()).determinant(prec)
}

/// Determinant together with the Hadamard bound `∏ ‖row_i‖₂`.
///
/// `|det| ≤ bound` always holds, so `|det| / bound` is a scale-free measure of
/// how far the matrix is from singular.
pub fn hadamard(a: &Matrix, prec: u32) -> (Complex, Float) {
    let det = determinant(a, prec);
    let mut bound = Float::with_val(prec, 1);
    for row in a {
        let mut s = Float::new(prec);
        for x in row {
            s += x.norm_sqr();
        }
        bound *= s.sqrt();
    }
    (det, bound)
}

/// Least-squares solver that accepts one column at a time.
///
/// Columns are normalized to unit length before a complex Householder step,
/// so that after `k` columns the solution of the `k`-column problem is
/// available in `O(k²)`.
#[derive(Clone, Debug)]
pub struct IncrementalQr {
    rows: usize,
    prec: u32,
    reflectors: Vec<(Vec<Complex>, Float)>,
    r_cols: Vec<Vec<Complex>>,
    col_scale: Vec<Float>,
    qtb: Vec<Complex>,
}

impl IncrementalQr {
    pub fn new(rhs: Vec<Complex>, prec: u32) -> Self {
        IncrementalQr {
            rows: rhs.len(),
            prec,
            reflectors: Vec::new(),
            r_cols: Vec::new(),
            col_scale: Vec::new(),
            qtb: rhs,
        }
    }

    pub fn columns(&self) -> usize {
        self.r_cols.len()
    }

    pub fn push_column(&mut self, mut col: Vec<Complex>) -> Result<()> {
        let k = self.r_cols.len();
        if col.len() != self.rows {
            return Err(Error::LengthMismatch(col.len(), self.rows));
        }
        if k >= self.rows {
            return Err(Error::RankDeficient { column: k });
        }
        let norm = vec_norm(&col, self.prec);
        if norm.is_zero() {
            return Err(Error::RankDeficient { column: k });
        }
        for x in col.iter_mut() {
            *x = x.div_float(&norm);
        }
        for (j, (v, beta)) in self.reflectors.iter().enumerate() {
            apply_reflector(v, beta, &mut col[j..]);
        }
        let tail = &col[k..];
        let tail_norm = vec_norm(tail, self.prec);
        if tail_norm <= pow2_neg(self.prec, self.prec.saturating_sub(10)) {
            return Err(Error::RankDeficient { column: k });
        }
        let x0 = &tail[0];
        let x0_abs = x0.abs();
        let alpha = if x0_abs.is_zero() {
            Complex::from_float(-tail_norm.clone())
        } else {
            -(x0.div_float(&x0_abs).scale(&tail_norm))
        };
        let mut v: Vec<Complex> = tail.to_vec();
        v[0] = &v[0] - &alpha;
        let vnorm2 = {
            let mut s = Float::new(self.prec);
            for x in &v {
                s += x.norm_sqr();
            }
            s
        };
        let beta = Float::with_val(self.prec, 2) / vnorm2;
        apply_reflector(&v, &beta, &mut self.qtb[k..]);
        let mut r_col: Vec<Complex> = col[..k].to_vec();
        r_col.push(alpha);
        self.r_cols.push(r_col);
        self.reflectors.push((v, beta));
        self.col_scale.push(norm);
        Ok(())
    }

    /// Coefficients of the least-squares solution for the current columns.
    pub fn solve(&self) -> Vec<Complex> {
        let n = self.r_cols.len();
        let mut x: Vec<Complex> = self.qtb[..n].to_vec();
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let t = &self.r_cols[j][i] * &x[j];
                x[i] -= &t;
            }
            x[i] = &x[i] / &self.r_cols[i][i];
        }
        for (xi, s) in x.iter_mut().zip(&self.col_scale) {
            *xi = xi.div_float(s);
        }
        x
    }

    /// Ratio of the largest to the smallest diagonal entry of `R`
    /// (columns normalized): a cheap condition estimate.
    pub fn condition_estimate(&self) -> f64 {
        let diag: Vec<Float> = self
            .r_cols
            .iter()
            .enumerate()
            .map(|(i, c)| c[i].abs())
            .collect();
        let max = diag.iter().cloned().fold(Float::new(self.prec), |a, b| a.max(&b));
        let min = diag.iter().cloned().reduce(|a, b| a.min(&b));
        match min {
            Some(m) if !m.is_zero() => (max / m).to_f64(),
            Some(_) => f64::INFINITY,
            None => 1.0,
        }
    }
}

fn vec_norm(v: &[Complex], prec: u32) -> Float {
    let mut s = Float::new(prec);
    for x in v {
        s += x.norm_sqr();
    }
    s.sqrt()
}

fn apply_reflector(v: &[Complex], beta: &Float, y: &mut [Complex]) {
    let mut s = Complex::zero(y[0].prec().max(beta.prec()));
    for (vi, yi) in v.iter().zip(y.iter()) {
        s.add_mul(&vi.conj(), yi);
    }
    let s = s.scale(beta);
    for (vi, yi) in v.iter().zip(y.iter_mut()) {
        let t = vi * &s;
        *yi -= &t;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::with_val(53, re, im)
    }

    #[test]
    fn determinant_of_small_matrices() {
        let a = vec![vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(3.0, 0.0), c(4.0, 0.0)]];
        assert_eq!(determinant(&a, 53).to_f64(), (-2.0, 0.0));
        let singular = vec![vec![c(1.0, 1.0), c(2.0, 2.0)], vec![c(1.0, 1.0), c(2.0, 2.0)]];
        assert!(determinant(&singular, 53).abs_f64() < 1e-15);
        assert_eq!(determinant(&Vec::new(), 53).to_f64(), (1.0, 0.0));
    }

    #[test]
    fn lu_solve_recovers_solution() {
        let a = vec![
            vec![c(0.0, 0.0), c(1.0, 0.0), c(2.0, 1.0)],
            vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)],
            vec![c(3.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)],
        ];
        let x = vec![c(1.0, 0.0), c(-1.0, 2.0), c(0.5, 0.0)];
        let b: Vec<Complex> = a
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&x)
                    .fold(Complex::zero(53), |acc, (r, xi)| acc + r * xi)
            })
            .collect();
        let sol = Lu::new(a).solve(&b).unwrap();
        for (s, e) in sol.iter().zip(&x) {
            assert!((s - e).abs_f64() < 1e-14);
        }
    }

    #[test]
    fn hadamard_bound_dominates_determinant() {
        let a = vec![vec![c(1.0, 2.0), c(-1.0, 0.5)], vec![c(0.3, 0.0), c(2.0, -1.0)]];
        let (det, bound) = hadamard(&a, 53);
        assert!(det.abs() <= bound);
    }

    #[test]
    fn incremental_qr_fits_a_line_exactly() {
        let prec = 128;
        let xs: Vec<f64> = (0..6).map(|i| i as f64 * 0.5).collect();
        let rhs: Vec<Complex> = xs.iter().map(|&x| Complex::real(prec, 2.0 - 3.0 * x)).collect();
        let mut qr = IncrementalQr::new(rhs, prec);
        qr.push_column(xs.iter().map(|_| Complex::one(prec)).collect()).unwrap();
        qr.push_column(xs.iter().map(|&x| Complex::real(prec, x)).collect()).unwrap();
        let sol = qr.solve();
        assert!((&sol[0] - &Complex::real(prec, 2.0)).abs() < pow2_neg(prec, 110));
        assert!((&sol[1] - &Complex::real(prec, -3.0)).abs() < pow2_neg(prec, 110));
    }

    #[test]
    fn incremental_qr_reports_dependent_columns() {
        let prec = 64;
        let rhs = vec![Complex::one(prec); 3];
        let mut qr = IncrementalQr::new(rhs, prec);
        qr.push_column(vec![Complex::one(prec); 3]).unwrap();
        let err = qr.push_column(vec![Complex::real(prec, 2.0); 3]).unwrap_err();
        assert!(matches!(err, Error::RankDeficient { column: 1 }));
    }
}
