//! Dense polynomials in `z` with complex coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `Σ_j c_j z^j`, coefficients in ascending order, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ZPoly {
    coeffs: Vec<Complex64>,
}

impl ZPoly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Self { coeffs };
        p.trim(0.0);
        p
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn z() -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^j`, zero beyond the degree.
    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops leading coefficients with modulus at most `tol`.
    pub fn trim(&mut self, tol: f64) {
        while self.coeffs.last().is_some_and(|c| c.norm() <= tol) {
            self.coeffs.pop();
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn powi(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(Complex64::new(1.0, 0.0)), |acc, _| &acc * self)
    }

    /// Euclidean division by a nonzero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let mut rem = self.coeffs.clone();
        let d = divisor.degree();
        let lead = divisor.leading();
        if rem.len() <= d {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Complex64::new(0.0, 0.0); rem.len() - d];
        for i in (0..quot.len()).rev() {
            let q = rem[i + d] / lead;
            quot[i] = q;
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= q * c;
            }
            rem[i + d] = Complex64::new(0.0, 0.0);
        }
        rem.truncate(d);
        (Self::new(quot), Self::new(rem))
    }
}

impl Add for &ZPoly {
    type Output = ZPoly;
    fn add(self, other: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        ZPoly::new((0..n).map(|j| self.coeff(j) + other.coeff(j)).collect())
    }
}

impl Sub for &ZPoly {
    type Output = ZPoly;
    fn sub(self, other: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        ZPoly::new((0..n).map(|j| self.coeff(j) - other.coeff(j)).collect())
    }
}

impl Mul for &ZPoly {
    type Output = ZPoly;
    fn mul(self, other: &ZPoly) -> ZPoly {
        if self.is_zero() || other.is_zero() {
            return ZPoly::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ZPoly::new(out)
    }
}

impl Neg for &ZPoly {
    type Output = ZPoly;
    fn neg(self) -> ZPoly {
        ZPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Extended Euclid: `(d, s, u)` with `s·a + u·b = d`, `d` a gcd of `a`, `b`.
/// Remainders whose coefficients fall below `rel_tol` times the size of
/// the dividend are treated as zero.
pub fn extended_gcd(a: &ZPoly, b: &ZPoly, rel_tol: f64) -> (ZPoly, ZPoly, ZPoly) {
    let one = ZPoly::constant(Complex64::new(1.0, 0.0));
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (one.clone(), ZPoly::zero());
    let (mut u0, mut u1) = (ZPoly::zero(), one);
    while !r1.is_zero() {
        let (q, mut r) = r0.div_rem(&r1);
        r.trim(rel_tol * r0.max_abs().max(r1.max_abs()));
        let s = &s0 - &(&q * &s1);
        let u = &u0 - &(&q * &u1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        u0 = std::mem::replace(&mut u1, u);
    }
    (r0, s0, u0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[(f64, f64)]) -> ZPoly {
        ZPoly::new(coeffs.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    #[test]
    fn arithmetic() {
        let a = p(&[(1.0, 0.0), (0.0, 1.0)]); // 1 + iz
        let b = p(&[(0.0, 0.0), (2.0, 0.0), (1.0, 0.0)]); // 2z + z²
        assert_eq!((&a * &b).degree(), 3);
        assert_eq!((&a - &a), ZPoly::zero());
        assert_eq!((&b + &(-&b)).degree(), 0);
        let z0 = Complex64::new(0.3, -0.2);
        assert!(((&a * &b).eval(z0) - a.eval(z0) * b.eval(z0)).norm() < 1e-15);
        assert_eq!(ZPoly::z().powi(3).degree(), 3);
    }

    #[test]
    fn division_identity() {
        let a = p(&[(1.0, 0.0), (-2.0, 0.5), (0.0, 0.0), (3.0, 1.0)]);
        let b = p(&[(0.5, 0.0), (1.0, -1.0)]);
        let (q, r) = a.div_rem(&b);
        assert!(r.degree() < b.degree() || r.is_zero());
        let back = &(&q * &b) + &r;
        for j in 0..4 {
            assert!((back.coeff(j) - a.coeff(j)).norm() < 1e-14);
        }
    }

    #[test]
    fn gcd_of_coprime_pair_is_constant() {
        let a = p(&[(0.0, 0.0), (1.0, 0.0)]);
        let b = p(&[(-1.0, 0.0), (1.0, 0.0)]);
        let (d, s, u) = extended_gcd(&a, &b, 1e-12);
        assert_eq!(d.degree(), 0);
        let combo = &(&s * &a) + &(&u * &b);
        assert!((&combo - &d).max_abs() < 1e-15);
    }

    #[test]
    fn gcd_detects_common_factor() {
        let common = p(&[(0.5, 0.5), (1.0, 0.0)]);
        let a = &common * &p(&[(2.0, 0.0), (1.0, 0.0)]);
        let b = &common * &p(&[(0.0, -1.0), (1.0, 0.0)]);
        let (d, _, _) = extended_gcd(&a, &b, 1e-12);
        assert_eq!(d.degree(), 1);
        let root = -common.coeff(0);
        assert!(d.eval(root).norm() < 1e-12);
    }
}
