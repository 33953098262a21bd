//! Polynomial roots by simultaneous (Aberth–Ehrlich) iteration.

use rug::Float;

use crate::error::{Error, Result};
use crate::num::{pow2_neg, Complex};
use crate::series::Polynomial;

/// A root and its multiplicity, in absolute coordinates.
#[derive(Clone, Debug)]
pub struct Root {
    pub value: Complex,
    pub multiplicity: usize,
}

fn eval_with_derivative(coeffs: &[Complex], w: &Complex, prec: u32) -> (Complex, Complex) {
    let mut p = Complex::zero(prec);
    let mut dp = Complex::zero(prec);
    for c in coeffs.iter().rev() {
        dp = &dp * w + &p;
        p = &p * w + c;
    }
    (p, dp)
}

/// All roots (with repetition) of `p`, in absolute coordinates.
pub fn aberth(p: &Polynomial) -> Result<Vec<Complex>> {
    let prec = p.prec();
    let Some(n) = p.degree() else {
        return Err(Error::RootFindingFailed("zero polynomial".into()));
    };
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = p.coeff(n);
    let inv = lead.recip();
    let coeffs: Vec<Complex> = (0..=n).map(|k| &p.coeff(k) * &inv).collect();

    // Fujiwara bound on the root moduli.
    let mut bound = Float::new(prec);
    for (k, c) in coeffs.iter().enumerate().take(n) {
        let a = c.abs();
        if a.is_zero() {
            continue;
        }
        let e = (n - k) as u32;
        let r = if k == 0 { a / 2u32 } else { a };
        bound.max_mut(&r.root(e));
    }
    let radius = Float::with_val(prec, &bound * 2u32).max(&Float::with_val(prec, 1e-3));
    let mut z: Vec<Complex> = (0..n)
        .map(|j| {
            let theta = Float::with_val(prec, 2.0 * std::f64::consts::PI * j as f64 / n as f64 + 0.4);
            Complex::from_polar(&radius, &theta)
        })
        .collect();

    let tight = pow2_neg(prec, prec.saturating_sub(8));
    let max_iter = 40 * n + 4 * prec as usize;
    let mut last_step = Float::with_val(prec, f64::INFINITY);
    for _ in 0..max_iter {
        let mut worst = Float::new(prec);
        for j in 0..n {
            let (v, dv) = eval_with_derivative(&coeffs, &z[j], prec);
            if v.is_zero() {
                continue;
            }
            if dv.is_zero() {
                let nudge = Complex::with_val(prec, 1e-3, 1e-3);
                z[j] = &z[j] + &nudge;
                worst = Float::with_val(prec, 1);
                continue;
            }
            let ratio = &v / &dv;
            let mut sum = Complex::zero(prec);
            for k in 0..n {
                if k != j {
                    let d = &z[j] - &z[k];
                    if !d.is_zero() {
                        sum += d.recip();
                    }
                }
            }
            let denom = Complex::one(prec) - &ratio * &sum;
            let w = if denom.is_zero() { ratio } else { &ratio / &denom };
            if !w.is_finite() {
                return Err(Error::RootFindingFailed("non-finite correction".into()));
            }
            let rel = w.abs() / (Float::with_val(prec, 1) + z[j].abs());
            worst.max_mut(&rel);
            z[j] = &z[j] - &w;
        }
        last_step = worst;
        if last_step <= tight {
            break;
        }
    }
    // Multiple roots converge linearly to about prec/m bits.
    let loose = pow2_neg(prec, prec / (2 * n as u32).max(2));
    if last_step > loose {
        return Err(Error::RootFindingFailed(format!(
            "no convergence, last relative step {:e}",
            last_step.to_f64()
        )));
    }
    let c = p.center();
    Ok(z.into_iter().map(|r| r + c).collect())
}

/// Roots grouped into clusters of radius `2^(-prec/(2n))` (relative), each
/// reported by its mean and the cluster size as multiplicity.
pub fn clustered_roots(p: &Polynomial) -> Result<Vec<Root>> {
    let raw = aberth(p)?;
    let prec = p.prec();
    let n = raw.len().max(1) as u32;
    let delta = pow2_neg(prec, prec / (2 * n));
    let mut used = vec![false; raw.len()];
    let mut out = Vec::new();
    for i in 0..raw.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut members = vec![raw[i].clone()];
        let scale = Float::with_val(prec, 1) + raw[i].abs();
        let tol = Float::with_val(prec, &delta * &scale);
        for j in (i + 1)..raw.len() {
            if !used[j] && (&raw[i] - &raw[j]).abs() <= tol {
                used[j] = true;
                members.push(raw[j].clone());
            }
        }
        let m = members.len();
        let mean = members
            .into_iter()
            .fold(Complex::zero(prec), |a, b| a + b)
            .div_float(&Float::with_val(prec, m));
        out.push(Root {
            value: mean,
            multiplicity: m,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_re(mut v: Vec<Complex>) -> Vec<(f64, f64)> {
        v.sort_by(|a, b| a.re().partial_cmp(b.re()).unwrap().then(a.im().partial_cmp(b.im()).unwrap()));
        v.iter().map(|z| z.to_f64()).collect()
    }

    #[test]
    fn simple_roots() {
        // (z − 1)(z + 2)(z − i)
        let a = Polynomial::from_f64(128, &[(1.0, 0.0), (-1.0, 0.0)]);
        let b = Polynomial::from_f64(128, &[(2.0, 0.0), (1.0, 0.0)]);
        let c = Polynomial::from_f64(128, &[(0.0, -1.0), (1.0, 0.0)]);
        let p = &(&a * &b) * &c;
        let r = sorted_re(aberth(&p).unwrap());
        let expect = [(-2.0, 0.0), (0.0, 1.0), (1.0, 0.0)];
        for (x, e) in r.iter().zip(expect) {
            assert!((x.0 - e.0).abs() < 1e-25 && (x.1 - e.1).abs() < 1e-25);
        }
    }

    #[test]
    fn multiple_roots_cluster() {
        // z²(z − 3)
        let p = Polynomial::from_f64(256, &[(0.0, 0.0), (0.0, 0.0), (-3.0, 0.0), (1.0, 0.0)]);
        let roots = clustered_roots(&p).unwrap();
        assert_eq!(roots.len(), 2);
        let double = roots.iter().find(|r| r.multiplicity == 2).unwrap();
        assert!(double.value.abs_f64() < 1e-30);
        let simple = roots.iter().find(|r| r.multiplicity == 1).unwrap();
        assert!((simple.value.to_f64().0 - 3.0).abs() < 1e-30);
    }

    #[test]
    fn shifted_center_and_constants() {
        let p = Polynomial::from_f64(64, &[(1.0, 0.0), (1.0, 0.0)]).recenter(&Complex::with_val(64, 5.0, 0.0));
        let r = aberth(&p).unwrap();
        assert!((r[0].to_f64().0 + 1.0).abs() < 1e-15);
        assert!(aberth(&Polynomial::from_f64(64, &[(2.0, 0.0)])).unwrap().is_empty());
    }
}
