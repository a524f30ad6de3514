use num_traits::Zero;

use super::roots::{canonical_arg, cluster_points, default_cluster_tol, raw_roots};
use super::{Polynomial, RationalFunction};
use crate::{Error, Result, C64};

/// Poles closer than this (relative to `1 + |p|`) are the same pole.
pub const POLE_MERGE_TOL: f64 = 1e-12;

/// Principal part at one pole: `Σ_j coefficients[j-1] / (z - location)^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleTerm {
    pub location: C64,
    pub coefficients: Vec<C64>,
}

impl PoleTerm {
    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn residue(&self) -> C64 {
        self.coefficients.first().copied().unwrap_or_else(C64::zero)
    }

    fn eval(&self, z: C64) -> C64 {
        let w = (z - self.location).inv();
        let mut acc = C64::zero();
        let mut pw = w;
        for &c in &self.coefficients {
            acc += c * pw;
            pw *= w;
        }
        acc
    }
}

/// A rational function as polynomial part plus principal parts at its poles.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PoleExpansion {
    pub poles: Vec<PoleTerm>,
    pub polynomial: Polynomial,
}

fn same_point(a: C64, b: C64) -> bool {
    (a - b).norm() <= POLE_MERGE_TOL * (1.0 + a.norm().max(b.norm()))
}

fn binom(n: usize, k: usize) -> f64 {
    let k = k.min(n.saturating_sub(k));
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Taylor coefficients of `1 / (w + delta)^k` in powers of `w`, up to `w^hi`.
fn shifted_pole_taylor(delta: C64, k: usize, hi: usize) -> Vec<C64> {
    let inv = delta.inv();
    let mut out = Vec::with_capacity(hi + 1);
    let mut pw = inv.powu(k as u32);
    for n in 0..=hi {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        out.push(pw * (sign * binom(n + k - 1, k - 1)));
        pw *= inv;
    }
    out
}

impl PoleExpansion {
    pub fn from_polynomial(p: Polynomial) -> Self {
        PoleExpansion {
            poles: Vec::new(),
            polynomial: p,
        }
    }

    /// `Σ c_i / (z - p_i)`, simple poles only. Repeated locations are merged.
    pub fn simple_poles(terms: &[(C64, C64)]) -> Self {
        let mut out = PoleExpansion::default();
        for &(p, c) in terms {
            out = out.add(&PoleExpansion {
                poles: vec![PoleTerm {
                    location: p,
                    coefficients: vec![c],
                }],
                polynomial: Polynomial::zero(),
            });
        }
        out
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.polynomial.eval(z) + self.poles.iter().map(|t| t.eval(z)).sum::<C64>()
    }

    pub fn pole_at(&self, point: C64) -> Option<&PoleTerm> {
        self.poles.iter().find(|t| same_point(t.location, point))
    }

    /// Residue at a finite point, zero if the point is not a stored pole.
    pub fn residue(&self, point: C64, tol: f64) -> Result<C64> {
        let near: Vec<&PoleTerm> = self
            .poles
            .iter()
            .filter(|t| (t.location - point).norm() <= tol)
            .collect();
        match near.len() {
            0 => Ok(C64::zero()),
            1 => Ok(near[0].residue()),
            _ => Err(Error::AmbiguousPole { point }),
        }
    }

    pub fn residues(&self) -> Vec<(C64, C64)> {
        self.poles.iter().map(|t| (t.location, t.residue())).collect()
    }

    /// Laurent coefficients at `p` for powers `lo..=hi` of `z - p`.
    pub fn laurent_at(&self, p: C64, lo: i64, hi: i64) -> Vec<C64> {
        let len = (hi - lo + 1).max(0) as usize;
        let mut out = vec![C64::zero(); len];
        let mut put = |power: i64, v: C64| {
            if power >= lo && power <= hi {
                out[(power - lo) as usize] += v;
            }
        };
        for t in &self.poles {
            if same_point(t.location, p) {
                for (j, &c) in t.coefficients.iter().enumerate() {
                    put(-(j as i64) - 1, c);
                }
            } else if hi >= 0 {
                for (j, &c) in t.coefficients.iter().enumerate() {
                    let series = shifted_pole_taylor(p - t.location, j + 1, hi as usize);
                    for (n, s) in series.into_iter().enumerate() {
                        put(n as i64, c * s);
                    }
                }
            }
        }
        if hi >= 0 {
            let shifted = self.polynomial.taylor_shift(p);
            for (n, &c) in shifted.coeffs().iter().enumerate() {
                put(n as i64, c);
            }
        }
        out
    }

    /// Coefficients of `z^k` for `k in lo..=hi` in the expansion at infinity.
    pub fn at_infinity(&self, lo: i64, hi: i64) -> Vec<C64> {
        let len = (hi - lo + 1).max(0) as usize;
        let mut out = vec![C64::zero(); len];
        for (k, &c) in self.polynomial.coeffs().iter().enumerate() {
            let k = k as i64;
            if k >= lo && k <= hi {
                out[(k - lo) as usize] += c;
            }
        }
        for t in &self.poles {
            for (j, &c) in t.coefficients.iter().enumerate() {
                let k = j + 1;
                // c/(z-q)^k = c Σ_n binom(n+k-1, k-1) q^n z^{-k-n}
                let mut n = 0usize;
                loop {
                    let power = -(k as i64) - n as i64;
                    if power < lo {
                        break;
                    }
                    if power <= hi {
                        out[(power - lo) as usize] +=
                            c * t.location.powu(n as u32) * binom(n + k - 1, k - 1);
                    }
                    n += 1;
                }
            }
        }
        out
    }

    /// Degree of the polynomial part, `-1` when it is zero.
    pub fn top_power(&self) -> i64 {
        if self.polynomial.is_zero() {
            -1
        } else {
            self.polynomial.degree() as i64
        }
    }

    fn locations_with(&self, other: &PoleExpansion) -> Vec<C64> {
        let mut locs: Vec<C64> = self.poles.iter().map(|t| t.location).collect();
        for t in &other.poles {
            if !locs.iter().any(|&l| same_point(l, t.location)) {
                locs.push(t.location);
            }
        }
        locs
    }

    fn order_at(&self, p: C64) -> usize {
        self.pole_at(p).map_or(0, |t| t.order())
    }

    /// Exact product by Laurent multiplication at every pole and at infinity.
    pub fn mul(&self, other: &PoleExpansion) -> PoleExpansion {
        let mut poles = Vec::new();
        for p in self.locations_with(other) {
            let oa = self.order_at(p) as i64;
            let ob = other.order_at(p) as i64;
            let total = oa + ob;
            let a = self.laurent_at(p, -oa, ob - 1);
            let b = other.laurent_at(p, -ob, oa - 1);
            // a[i] is the coefficient of w^(i - oa), b[j] of w^(j - ob)
            let mut coefficients = vec![C64::zero(); total as usize];
            for (i, &ai) in a.iter().enumerate() {
                for (j, &bj) in b.iter().enumerate() {
                    let power = i as i64 + j as i64 - total;
                    if power < 0 {
                        coefficients[(-power - 1) as usize] += ai * bj;
                    }
                }
            }
            while coefficients.last().is_some_and(|c| c.is_zero()) {
                coefficients.pop();
            }
            if !coefficients.is_empty() {
                poles.push(PoleTerm {
                    location: p,
                    coefficients,
                });
            }
        }
        let ta = self.top_power();
        let tb = other.top_power();
        let polynomial = if ta + tb >= 0 {
            let a = self.at_infinity(-tb, ta);
            let b = other.at_infinity(-ta, tb);
            let mut coeffs = vec![C64::zero(); (ta + tb + 1) as usize];
            for (i, &ai) in a.iter().enumerate() {
                for (j, &bj) in b.iter().enumerate() {
                    let power = (i as i64 - tb) + (j as i64 - ta);
                    if power >= 0 {
                        coeffs[power as usize] += ai * bj;
                    }
                }
            }
            Polynomial::new(coeffs)
        } else {
            Polynomial::zero()
        };
        let mut out = PoleExpansion { poles, polynomial };
        out.sort();
        out
    }

    pub fn add(&self, other: &PoleExpansion) -> PoleExpansion {
        let mut poles = self.poles.clone();
        for t in &other.poles {
            match poles.iter_mut().find(|s| same_point(s.location, t.location)) {
                Some(s) => {
                    if s.coefficients.len() < t.coefficients.len() {
                        s.coefficients.resize(t.coefficients.len(), C64::zero());
                    }
                    for (a, &b) in s.coefficients.iter_mut().zip(&t.coefficients) {
                        *a += b;
                    }
                }
                None => poles.push(t.clone()),
            }
        }
        for t in poles.iter_mut() {
            while t.coefficients.last().is_some_and(|c| c.is_zero()) {
                t.coefficients.pop();
            }
        }
        poles.retain(|t| !t.coefficients.is_empty());
        let mut out = PoleExpansion {
            poles,
            polynomial: &self.polynomial + &other.polynomial,
        };
        out.sort();
        out
    }

    pub fn scale(&self, s: C64) -> PoleExpansion {
        PoleExpansion {
            poles: self
                .poles
                .iter()
                .map(|t| PoleTerm {
                    location: t.location,
                    coefficients: t.coefficients.iter().map(|&c| c * s).collect(),
                })
                .collect(),
            polynomial: self.polynomial.scale(s),
        }
    }

    pub fn derivative(&self) -> PoleExpansion {
        PoleExpansion {
            poles: self
                .poles
                .iter()
                .map(|t| {
                    let mut coefficients = vec![C64::zero(); t.order() + 1];
                    for (j, &c) in t.coefficients.iter().enumerate() {
                        coefficients[j + 1] = -c * (j + 1) as f64;
                    }
                    PoleTerm {
                        location: t.location,
                        coefficients,
                    }
                })
                .collect(),
            polynomial: self.polynomial.derivative(),
        }
    }

    /// Drops principal-part coefficients below `rel_tol` times the largest
    /// coefficient at the same pole, from the top order down.
    pub fn pruned(&self, rel_tol: f64) -> PoleExpansion {
        let mut out = self.clone();
        for t in out.poles.iter_mut() {
            let cutoff = rel_tol * t.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
            while t.coefficients.last().is_some_and(|c| c.norm() <= cutoff) {
                t.coefficients.pop();
            }
        }
        out.poles.retain(|t| !t.coefficients.is_empty());
        out.polynomial = out.polynomial.trimmed(rel_tol);
        out
    }

    fn sort(&mut self) {
        self.poles.sort_by(|a, b| {
            canonical_arg(a.location)
                .total_cmp(&canonical_arg(b.location))
                .then(a.location.norm().total_cmp(&b.location.norm()))
        });
    }

    /// Monic-denominator rational function with the same values.
    pub fn to_rational(&self) -> RationalFunction {
        let factors: Vec<Polynomial> = self
            .poles
            .iter()
            .map(|t| Polynomial::linear_factor(t.location).pow(t.order() as u32))
            .collect();
        let den = factors.iter().fold(Polynomial::one(), |acc, f| &acc * f);
        let mut num = &self.polynomial * &den;
        for (i, t) in self.poles.iter().enumerate() {
            let others = factors
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(Polynomial::one(), |acc, (_, f)| &acc * f);
            let k = t.order();
            let lin = Polynomial::linear_factor(t.location);
            for (j, &c) in t.coefficients.iter().enumerate() {
                let part = lin.pow((k - j - 1) as u32).scale(c);
                num = &num + &(&part * &others);
            }
        }
        RationalFunction::unreduced(num.trimmed(1e-14), den)
    }
}

/// Partial-fraction decomposition of `f` with poles found by clustering.
pub fn partial_fractions(f: &RationalFunction) -> Result<PoleExpansion> {
    let (num, den) = (f.numerator(), f.denominator());
    if num.is_zero() {
        return Ok(PoleExpansion::default());
    }
    let (quot, _) = num.div_rem(den);
    if den.degree() == 0 {
        return Ok(PoleExpansion::from_polynomial(quot));
    }
    let raw = raw_roots(den)?;
    let max_mod = raw.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = default_cluster_tol(max_mod);
    let clusters = cluster_points(&raw, tol);
    for (i, a) in clusters.iter().enumerate() {
        for b in &clusters[i + 1..] {
            if (a.location - b.location).norm() <= 10.0 * tol {
                return Err(Error::IllConditioned(format!(
                    "poles {} and {} are closer than the clustering resolution",
                    a.location, b.location
                )));
            }
        }
    }
    let lead = den.leading();
    let mut poles = Vec::with_capacity(clusters.len());
    for (i, c) in clusters.iter().enumerate() {
        let k = c.multiplicity;
        let rest = clusters
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(Polynomial::constant(lead), |acc, (_, o)| {
                &acc * &Polynomial::linear_factor(o.location).pow(o.multiplicity as u32)
            });
        let n_series = num.taylor_shift(c.location);
        let q_series = rest.taylor_shift(c.location);
        let b = series_divide(n_series.coeffs(), q_series.coeffs(), k);
        let coefficients: Vec<C64> = (1..=k).map(|j| b[k - j]).collect();
        poles.push(PoleTerm {
            location: c.location,
            coefficients,
        });
    }
    let mut out = PoleExpansion {
        poles,
        polynomial: quot,
    };
    out.sort();
    Ok(out)
}

/// First `n` coefficients of the power series `a / b`.
fn series_divide(a: &[C64], b: &[C64], n: usize) -> Vec<C64> {
    let get = |v: &[C64], i: usize| v.get(i).copied().unwrap_or_else(C64::zero);
    let b0 = get(b, 0);
    let mut out: Vec<C64> = Vec::with_capacity(n);
    for i in 0..n {
        let mut s = get(a, i);
        for (j, &o) in out.iter().enumerate() {
            s -= o * get(b, i - j);
        }
        out.push(s / b0);
    }
    out
}
