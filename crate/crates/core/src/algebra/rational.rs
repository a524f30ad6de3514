use num_traits::Zero;

use super::roots::{cluster_points, default_cluster_tol, raw_roots, Root};
use super::Polynomial;
use crate::{Error, Result, C64};

/// Quotient of two complex polynomials, kept in reduced form with a monic
/// denominator by the public constructors.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    /// Reduces `num / den` by cancelling common roots.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        rational_reduce(&num, &den)
    }

    /// Stores `num / den` as given (denominator made monic). No cancellation.
    pub fn unreduced(num: Polynomial, den: Polynomial) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let lc = den.leading().inv();
        RationalFunction {
            num: num.scale(lc),
            den: den.scale(lc),
        }
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        RationalFunction {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn constant(c: C64) -> Self {
        Self::from_polynomial(Polynomial::constant(c))
    }

    /// The identity function `z`.
    pub fn identity() -> Self {
        Self::from_polynomial(Polynomial::identity())
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.num.eval(z) / self.den.eval(z)
    }

    /// Degree as a map of the sphere, `max(deg num, deg den)`.
    pub fn map_degree(&self) -> usize {
        self.num.degree().max(self.den.degree())
    }

    /// Coefficient of `1/z` at infinity with the sign of a residue of `f dz`.
    pub fn residue_at_infinity(&self) -> C64 {
        if self.num.is_zero() || self.den.degree() == 0 {
            return C64::zero();
        }
        let (_, rem) = self.num.div_rem(&self.den);
        -rem.coeff(self.den.degree() - 1) / self.den.leading()
    }

    pub fn derivative(&self) -> Result<Self> {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let d = &self.den * &self.den;
        Self::new(n, d)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let n = &(&self.num * &other.den) + &(&other.num * &self.den);
        Self::new(n, &self.den * &other.den)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Self::new(&self.num * &other.num, &self.den * &other.den)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DegenerateInput("division by the zero function".into()));
        }
        Self::new(&self.num * &other.den, &self.den * &other.num)
    }

    pub fn recip(&self) -> Result<Self> {
        Self::constant(C64::new(1.0, 0.0)).div(self)
    }

    pub fn scale(&self, s: C64) -> Self {
        RationalFunction {
            num: self.num.scale(s),
            den: self.den.clone(),
        }
    }

    /// `z -> conj(f(conj z))`.
    pub fn conj_reflect(&self) -> Self {
        RationalFunction {
            num: self.num.conj(),
            den: self.den.conj(),
        }
    }
}

fn clustered_roots(p: &Polynomial) -> Result<Vec<Root>> {
    if p.degree() == 0 {
        return Ok(Vec::new());
    }
    let raw = raw_roots(p)?;
    let max_mod = raw.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(cluster_points(&raw, default_cluster_tol(max_mod)))
}

fn deflate_times(p: &Polynomial, root: C64, times: usize) -> Polynomial {
    (0..times).fold(p.clone(), |acc, _| acc.deflate(root).0)
}

/// Cancels roots common to `num` and `den` (matched within the clustering
/// tolerance, with multiplicity) and makes the denominator monic.
pub fn rational_reduce(num: &Polynomial, den: &Polynomial) -> Result<RationalFunction> {
    if den.is_zero() {
        return Err(Error::DegenerateInput("zero denominator".into()));
    }
    if num.is_zero() {
        return Ok(RationalFunction::from_polynomial(Polynomial::zero()));
    }
    if num.degree() == 0 || den.degree() == 0 {
        return Ok(RationalFunction::unreduced(num.clone(), den.clone()));
    }
    let num_roots = clustered_roots(num)?;
    let den_roots = clustered_roots(den)?;
    let max_mod = num_roots
        .iter()
        .chain(&den_roots)
        .map(|r| r.location.norm())
        .fold(0.0, f64::max);
    let tol = default_cluster_tol(max_mod);
    let mut n = num.clone();
    let mut d = den.clone();
    let mut used = vec![false; num_roots.len()];
    for dr in &den_roots {
        let best = num_roots
            .iter()
            .enumerate()
            .filter(|(i, nr)| !used[*i] && (nr.location - dr.location).norm() <= tol)
            .min_by(|a, b| {
                (a.1.location - dr.location)
                    .norm()
                    .total_cmp(&(b.1.location - dr.location).norm())
            });
        if let Some((i, nr)) = best {
            used[i] = true;
            let k = nr.multiplicity.min(dr.multiplicity);
            n = deflate_times(&n, nr.location, k);
            d = deflate_times(&d, dr.location, k);
        }
    }
    Ok(RationalFunction::unreduced(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn poly(c: &[f64]) -> Polynomial {
        Polynomial::from_real(c)
    }

    #[test]
    fn cancels_common_linear_factor() {
        let f = rational_reduce(&poly(&[-1.0, 0.0, 1.0]), &poly(&[-1.0, 1.0])).unwrap();
        assert_eq!(f.denominator().degree(), 0);
        let n = f.numerator();
        assert!((n.coeff(0) - 1.0).norm() < 1e-14 && (n.coeff(1) - 1.0).norm() < 1e-14);
    }

    #[test]
    fn z_over_z_is_one() {
        let f = rational_reduce(&poly(&[0.0, 1.0]), &poly(&[0.0, 1.0])).unwrap();
        assert_eq!(f.numerator(), &Polynomial::one());
        assert_eq!(f.denominator(), &Polynomial::one());
    }

    #[test]
    fn sum_of_fractions_for_central_two() {
        // -1/z + 1/(z+1) + 1/(z-1)
        let terms = [
            RationalFunction::unreduced(poly(&[-1.0]), poly(&[0.0, 1.0])),
            RationalFunction::unreduced(poly(&[1.0]), poly(&[1.0, 1.0])),
            RationalFunction::unreduced(poly(&[1.0]), poly(&[-1.0, 1.0])),
        ];
        let mut f = RationalFunction::constant(C64::zero());
        for t in &terms {
            f = f.add(t).unwrap();
        }
        let want_n = poly(&[1.0, 0.0, 1.0]);
        let want_d = poly(&[0.0, -1.0, 0.0, 1.0]);
        assert_eq!(f.denominator().degree(), 3);
        for k in 0..=3 {
            assert!((f.numerator().coeff(k) - want_n.coeff(k)).norm() < 1e-13);
            assert!((f.denominator().coeff(k) - want_d.coeff(k)).norm() < 1e-13);
        }
    }

    #[test]
    fn residue_at_infinity_of_simple_forms() {
        let f = RationalFunction::unreduced(poly(&[1.0]), poly(&[0.0, 1.0]));
        assert!((f.residue_at_infinity() + 1.0).norm() < 1e-15);
        let g = RationalFunction::from_polynomial(poly(&[0.0, 1.0]));
        assert!(g.residue_at_infinity().norm() < 1e-15);
    }

    #[test]
    fn derivative_agrees_with_difference_quotient() {
        let f = RationalFunction::unreduced(poly(&[1.0, 2.0, 0.5]), poly(&[0.3, -1.0, 1.0]));
        let d = f.derivative().unwrap();
        let z = c64(0.7, 0.4);
        let h = 1e-6;
        let fd = (f.eval(z + h) - f.eval(z - h)) / (2.0 * h);
        assert!((d.eval(z) - fd).norm() < 1e-7);
    }
}
