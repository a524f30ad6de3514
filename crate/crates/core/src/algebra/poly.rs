use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;

use crate::C64;

/// Dense complex polynomial, coefficients in ascending degree.
///
/// Exact trailing zeros are trimmed on construction, so a nonzero polynomial
/// always has a nonzero leading coefficient. The zero polynomial has no
/// coefficients and reports degree 0.
#[derive(Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `z`.
    pub fn identity() -> Self {
        Self::new(vec![C64::zero(), C64::new(1.0, 0.0)])
    }

    pub fn monomial(degree: usize, c: C64) -> Self {
        let mut coeffs = vec![C64::zero(); degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    /// `z - a`.
    pub fn linear_factor(a: C64) -> Self {
        Self::new(vec![-a, C64::new(1.0, 0.0)])
    }

    /// Monic polynomial with the given roots (repeated entries are repeated roots).
    pub fn from_roots(roots: &[C64]) -> Self {
        let mut coeffs = vec![C64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![C64::zero(); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of `z^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_else(C64::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_else(C64::zero)
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::zero(), |acc, &c| acc * z + c)
    }

    /// Value and first derivative in one Horner sweep.
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let mut p = C64::zero();
        let mut dp = C64::zero();
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Divides by the leading coefficient. The zero polynomial is returned unchanged.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.leading().inv())
    }

    /// Drops leading coefficients whose magnitude is below `rel_tol` times the
    /// largest coefficient. Used after cancellations that are exact in theory.
    pub fn trimmed(&self, rel_tol: f64) -> Self {
        let cutoff = rel_tol * self.max_coeff_abs();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= cutoff) {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    ///
    /// Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let dd = divisor.degree();
        if self.is_zero() || self.degree() < dd {
            return (Polynomial::zero(), self.clone());
        }
        let lead_inv = divisor.leading().inv();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![C64::zero(); self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] * lead_inv;
            quot[k] = q;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * d;
            }
            rem[k + dd] = C64::zero();
        }
        rem.truncate(dd);
        (Polynomial::new(quot), Polynomial::new(rem))
    }

    /// Synthetic division by `z - a`, returning the quotient and the remainder `p(a)`.
    pub fn deflate(&self, a: C64) -> (Polynomial, C64) {
        if self.is_zero() {
            return (Polynomial::zero(), C64::zero());
        }
        let n = self.coeffs.len();
        let mut quot = vec![C64::zero(); n - 1];
        let mut acc = C64::zero();
        for k in (0..n).rev() {
            acc = acc * a + self.coeffs[k];
            if k > 0 {
                quot[k - 1] = acc;
            }
        }
        (Polynomial::new(quot), acc)
    }

    /// Coefficients of `w -> p(a + w)`.
    pub fn taylor_shift(&self, a: C64) -> Polynomial {
        // repeated synthetic division yields the Taylor coefficients at `a`
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut current = self.clone();
        while !current.is_zero() {
            let (q, r) = current.deflate(a);
            out.push(r);
            current = q;
        }
        Polynomial::new(out)
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut out = Polynomial::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Entry-wise complex conjugate of the coefficients.
    pub fn conj(&self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![C64::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl From<Vec<Complex64>> for Polynomial {
    fn from(v: Vec<Complex64>) -> Self {
        Polynomial::new(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn from_roots_expands_product() {
        let p = Polynomial::from_roots(&[c64(1.0, 0.0), c64(-1.0, 0.0)]);
        assert_eq!(p, Polynomial::from_real(&[-1.0, 0.0, 1.0]));
        let q = Polynomial::from_roots(&[c64(0.0, 1.0), c64(0.0, -1.0), c64(2.0, 0.0)]);
        // (z^2 + 1)(z - 2)
        assert_eq!(q, Polynomial::from_real(&[-2.0, 1.0, -2.0, 1.0]));
    }

    #[test]
    fn div_rem_reconstructs() {
        let a = Polynomial::from_real(&[1.0, -3.0, 0.5, 2.0, 1.0]);
        let b = Polynomial::from_real(&[2.0, 0.0, 1.0]);
        let (q, r) = a.div_rem(&b);
        assert!(r.degree() < b.degree());
        let back = &(&q * &b) + &r;
        for k in 0..=a.degree() {
            assert!((back.coeff(k) - a.coeff(k)).norm() < 1e-14);
        }
    }

    #[test]
    fn taylor_shift_matches_evaluation() {
        let p = Polynomial::from_real(&[1.0, 2.0, 3.0, 4.0]);
        let a = c64(0.3, -0.7);
        let s = p.taylor_shift(a);
        let w = c64(0.11, 0.05);
        assert!((s.eval(w) - p.eval(a + w)).norm() < 1e-13);
        assert!((s.coeff(1) - p.derivative().eval(a)).norm() < 1e-13);
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = Polynomial::new(vec![c64(1.0, 0.0), C64::zero(), C64::zero()]);
        assert_eq!(p.degree(), 0);
        assert!(Polynomial::new(vec![C64::zero()]).is_zero());
    }

    #[test]
    fn eval_with_derivative_agrees() {
        let p = Polynomial::from_real(&[0.5, -1.0, 0.0, 2.0]);
        let z = c64(-0.4, 1.1);
        let (v, d) = p.eval_with_derivative(z);
        assert!((v - p.eval(z)).norm() < 1e-14);
        assert!((d - p.derivative().eval(z)).norm() < 1e-14);
    }
}
