//! Dense univariate polynomials with complex double-precision coefficients.
//!
//! Coefficients are stored low degree first. Trailing zeros are allowed in
//! storage; equality ignores them.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg;

pub type C64 = Complex64;

/// Default absolute tolerance for coefficient comparisons.
pub const POLY_EQ_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Default)]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Poly { coeffs: vec![c] }
    }

    /// `c * x^k`
    pub fn monomial(c: C64, k: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    /// `x - a`
    pub fn linear_factor(a: C64) -> Self {
        Poly::new(vec![-a, C64::new(1.0, 0.0)])
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    /// Coefficient of `x^k`, zero past the stored length.
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Number of stored coefficients (nominal degree + 1).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exact degree (largest index with a nonzero coefficient); `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != C64::default())
    }

    /// Degree ignoring coefficients with modulus at most `tol`.
    pub fn degree_tol(&self, tol: f64) -> Option<usize> {
        self.coeffs.iter().rposition(|c| c.norm() > tol)
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drop exact trailing zeros.
    pub fn trimmed(&self) -> Poly {
        let n = self.degree().map_or(0, |d| d + 1);
        Poly::new(self.coeffs[..n].to_vec())
    }

    /// Drop trailing coefficients with modulus at most `tol`.
    pub fn trimmed_tol(&self, tol: f64) -> Poly {
        let n = self.degree_tol(tol).map_or(0, |d| d + 1);
        Poly::new(self.coeffs[..n].to_vec())
    }

    /// Pad or cut storage to exactly `len` coefficients. Cutting discards
    /// coefficients without checking them.
    pub fn resized(&self, len: usize) -> Poly {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(len, C64::default());
        Poly::new(coeffs)
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::default(), |acc, &c| acc * x + c)
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Divide by `(x - a)`; returns quotient and remainder `p(a)`.
    pub fn div_linear(&self, a: C64) -> (Poly, C64) {
        if self.coeffs.is_empty() {
            return (Poly::zero(), C64::default());
        }
        let n = self.coeffs.len();
        let mut q = vec![C64::default(); n.saturating_sub(1)];
        let mut carry = C64::default();
        for k in (0..n).rev() {
            let val = self.coeffs[k] + carry * a;
            if k == 0 {
                return (Poly::new(q), val);
            }
            q[k - 1] = val;
            carry = val;
        }
        unreachable!()
    }

    /// Coefficients of `p(x + c)`, i.e. the Taylor expansion of `p` at `c`.
    pub fn taylor_shift(&self, c: C64) -> Poly {
        let mut out = self.coeffs.clone();
        let n = out.len();
        for i in 0..n {
            for k in (i..n.saturating_sub(1)).rev() {
                let t = out[k + 1] * c;
                out[k] += t;
            }
        }
        Poly::new(out)
    }

    /// Reversed polynomial `x^n p(1/x)` for nominal degree `n`; coefficients
    /// past `n` are discarded.
    pub fn reversed(&self, n: usize) -> Poly {
        Poly::new((0..=n).map(|k| self.coeff(n - k)).collect())
    }

    /// Coefficientwise closeness with absolute tolerance.
    pub fn approx_eq(&self, other: &Poly, tol: f64) -> bool {
        self.max_diff(other) <= tol
    }

    pub fn max_diff(&self, other: &Poly) -> f64 {
        let n = self.len().max(other.len());
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Roots via companion-matrix eigenvalues, polished by Newton steps on
    /// the original coefficients. Leading coefficients of modulus at most
    /// `trim_tol * max_abs` are treated as zero.
    pub fn roots(&self, trim_tol: f64) -> Vec<C64> {
        let scale = self.max_abs();
        if scale == 0.0 {
            return Vec::new();
        }
        let p = self.trimmed_tol(trim_tol * scale);
        let n = match p.degree() {
            Some(0) | None => return Vec::new(),
            Some(n) => n,
        };
        let lead = p.coeffs[n];
        let mut comp = DMatrix::<C64>::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = C64::new(1.0, 0.0);
        }
        for i in 0..n {
            comp[(i, n - 1)] = -p.coeffs[i] / lead;
        }
        let mut roots = linalg::eigenvalues(&comp);
        let dp = p.derivative();
        for z in roots.iter_mut() {
            for _ in 0..3 {
                let f = p.eval(*z);
                let df = dp.eval(*z);
                if df.norm() == 0.0 {
                    break;
                }
                let cand = *z - f / df;
                if p.eval(cand).norm() < f.norm() {
                    *z = cand;
                } else {
                    break;
                }
            }
        }
        linalg::sort_complex(&mut roots);
        roots
    }

    /// Interpolate a polynomial of degree `< n` from its values at the
    /// nodes `radius * exp(2 pi i k / n)`, `k = 0..n`.
    pub fn from_circle_samples(values: &[C64], radius: f64) -> Poly {
        let n = values.len();
        let mut coeffs = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = C64::default();
            for (k, v) in values.iter().enumerate() {
                let ang = -2.0 * PI * (j * k % n) as f64 / n as f64;
                acc += v * C64::from_polar(1.0, ang);
            }
            coeffs.push(acc / (n as f64 * radius.powi(j as i32)));
        }
        Poly::new(coeffs)
    }

    /// The `n` sample nodes used by [`Poly::from_circle_samples`].
    pub fn circle_nodes(n: usize, radius: f64) -> Vec<C64> {
        (0..n)
            .map(|k| C64::from_polar(radius, 2.0 * PI * k as f64 / n as f64))
            .collect()
    }
}

/// Minimum pairwise distance between points, scaled by `max(1, |z_i|, |z_j|)`.
/// Returns `f64::INFINITY` for fewer than two points.
pub fn min_relative_separation(points: &[C64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let scale = 1f64.max(points[i].norm()).max(points[j].norm());
            best = best.min((points[i] - points[j]).norm() / scale);
        }
    }
    best
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        let n = self.len().max(other.len());
        (0..n).all(|k| self.coeff(k) == other.coeff(k))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.len().max(rhs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.len().max(rhs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_empty() || rhs.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![C64::default(); self.len() + rhs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn equality_ignores_trailing_zeros() {
        let a = Poly::from_real(&[1.0, 2.0]);
        let b = Poly::from_real(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(a, b);
        assert_eq!(b.degree(), Some(1));
        assert_eq!(Poly::from_real(&[0.0, 0.0]).degree(), None);
    }

    #[test]
    fn synthetic_division_is_exact_on_products() {
        let q = Poly::new(vec![C64::new(1.0, 1.0), c(-2.0), c(0.5)]);
        let a = C64::new(0.3, -0.7);
        let p = &q * &Poly::linear_factor(a);
        let (quot, rem) = p.div_linear(a);
        assert!(rem.norm() < 1e-15);
        assert!(quot.approx_eq(&q, 1e-15));
    }

    #[test]
    fn taylor_shift_matches_evaluation() {
        let p = Poly::from_real(&[1.0, -3.0, 0.0, 2.0]);
        let s = C64::new(0.5, 1.5);
        let shifted = p.taylor_shift(s);
        for z in [c(0.0), c(1.0), C64::new(-0.4, 0.9)] {
            assert!((shifted.eval(z) - p.eval(z + s)).norm() < 1e-12);
        }
    }

    #[test]
    fn roots_of_known_cubic() {
        // (x - 1)(x + 2)(x - i)
        let p = &(&Poly::linear_factor(c(1.0)) * &Poly::linear_factor(c(-2.0)))
            * &Poly::linear_factor(C64::new(0.0, 1.0));
        let roots = p.roots(1e-14);
        assert_eq!(roots.len(), 3);
        let expect = [c(-2.0), C64::new(0.0, 1.0), c(1.0)];
        for (r, e) in roots.iter().zip(expect.iter()) {
            assert!((r - e).norm() < 1e-13, "{r} vs {e}");
        }
    }

    #[test]
    fn circle_interpolation_recovers_coefficients() {
        let p = Poly::new(vec![c(1.0), C64::new(0.0, 2.0), c(-3.0), c(0.25)]);
        for radius in [1.0, 1.1] {
            let nodes = Poly::circle_nodes(4, radius);
            let vals: Vec<_> = nodes.iter().map(|&z| p.eval(z)).collect();
            let q = Poly::from_circle_samples(&vals, radius);
            assert!(q.approx_eq(&p, 1e-13));
        }
    }

    #[test]
    fn reversed_and_derivative() {
        let p = Poly::from_real(&[1.0, 2.0, 3.0]);
        assert_eq!(p.reversed(3), Poly::from_real(&[0.0, 3.0, 2.0, 1.0]));
        assert_eq!(p.derivative(), Poly::from_real(&[2.0, 6.0]));
    }
}
