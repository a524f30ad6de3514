//! Local polynomial models of deformations of a branched covering.
//!
//! Near a branch point of order `k - 1` with branching value `q`, a deformed
//! covering is `h(z) = z^k + q + Σ_(j<k-1) a_j z^j`. The branching values of
//! `h` are its critical values, and a marked covering is determined by `a`.

use std::f64::consts::{FRAC_PI_4, TAU};

use crate::algebra::{canonical_arg, min_cost_assignment, poly_roots, Polynomial, RootSet};
use crate::{Error, Result, C64};

/// Tolerance of the conjugation check on symmetric slices.
const SLICE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CoveringLocalModel {
    pub k: usize,
    pub q: C64,
    /// `a_0, …, a_(k-2)`.
    pub a: Vec<C64>,
}

impl CoveringLocalModel {
    pub fn new(k: usize, q: C64, a: Vec<C64>) -> Result<Self> {
        if k < 2 {
            return Err(Error::Precondition(format!("local degree must be at least 2, got {k}")));
        }
        if a.len() != k - 1 {
            return Err(Error::Precondition(format!("expected {} parameters, got {}", k - 1, a.len())));
        }
        Ok(CoveringLocalModel { k, q, a })
    }

    /// Writes a monic polynomial in local form by removing the `z^(k-1)` term
    /// with a translation.
    pub fn from_polynomial(h: &Polynomial, q: C64) -> Result<Self> {
        let k = h.degree();
        if k < 2 || h.is_zero() {
            return Err(Error::Precondition(format!("degree must be at least 2, got {k}")));
        }
        let h = h.monic();
        let shifted = h.taylor_shift(-h.coeff(k - 1) / k as f64);
        let mut a: Vec<C64> = (0..k - 1).map(|j| shifted.coeff(j)).collect();
        a[0] -= q;
        CoveringLocalModel::new(k, q, a)
    }

    pub fn polynomial(&self) -> Polynomial {
        let mut c = self.a.clone();
        c[0] += self.q;
        c.push(C64::new(0.0, 0.0));
        c.push(C64::new(1.0, 0.0));
        Polynomial::new(c)
    }

    /// `0.25 |q|`, or `0.25` when `q = 0`.
    pub fn default_cover_radius(&self) -> f64 {
        if self.q.norm() == 0.0 {
            0.25
        } else {
            0.25 * self.q.norm()
        }
    }

    /// All critical values lie in the disk of radius `radius` about `q`.
    pub fn is_admissible(&self, radius: f64) -> Result<bool> {
        let p = branching_profile(&self.polynomial())?;
        Ok(p.critical_values.iter().all(|(v, _)| (v - self.q).norm() < radius))
    }

    /// The solution of `h(z) = q + ε` closest to `ε^(1/k)`, ties going to the
    /// smallest argument.
    pub fn marked_point(&self, eps: f64) -> Result<C64> {
        let p = self.polynomial();
        let shifted = Polynomial::new(
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(j, &c)| if j == 0 { c - self.q - eps } else { c })
                .collect(),
        );
        let target = C64::new(eps.powf(1.0 / self.k as f64), 0.0);
        let roots = poly_roots(&shifted, None)?.locations();
        let tie = 1e-12 * target.norm();
        roots
            .into_iter()
            .min_by(|a, b| {
                let (da, db) = ((a - target).norm(), (b - target).norm());
                if (da - db).abs() <= tie {
                    canonical_arg(*a).total_cmp(&canonical_arg(*b))
                } else {
                    da.total_cmp(&db)
                }
            })
            .ok_or_else(|| Error::DegenerateInput("no solution of h(z) = q + ε".into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchingProfile {
    /// Roots of `h'`; a root of multiplicity `r` is a branch point of order `r`.
    pub critical_points: RootSet,
    /// `(h(c), order)` per critical point, in the order of `critical_points`.
    pub critical_values: Vec<(C64, usize)>,
}

impl BranchingProfile {
    /// Critical values repeated by branching order.
    pub fn values_expanded(&self) -> Vec<C64> {
        self.critical_values
            .iter()
            .flat_map(|&(v, e)| std::iter::repeat(v).take(e))
            .collect()
    }

    /// `Σ` of branching orders; equals `deg h - 1`.
    pub fn total_order(&self) -> usize {
        self.critical_values.iter().map(|(_, e)| e).sum()
    }
}

pub fn branching_profile(h: &Polynomial) -> Result<BranchingProfile> {
    if h.degree() < 2 {
        return Err(Error::Precondition(format!("degree must be at least 2, got {}", h.degree())));
    }
    let critical_points = poly_roots(&h.derivative(), None)?;
    let critical_values = critical_points
        .roots
        .iter()
        .map(|r| (h.eval(r.location), r.multiplicity))
        .collect();
    Ok(BranchingProfile { critical_points, critical_values })
}

/// Largest distance in an optimal matching of two equally long lists.
fn matching_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let cost: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| (x - y).norm()).collect()).collect();
    min_cost_assignment(&cost)
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .fold(0.0, f64::max)
}

fn check_degrees(h1: &Polynomial, h2: &Polynomial) -> Result<()> {
    if h1.degree() != h2.degree() {
        return Err(Error::Precondition(format!(
            "degrees differ: {} and {}",
            h1.degree(),
            h2.degree()
        )));
    }
    Ok(())
}

/// The critical-value multisets agree within `tol`.
pub fn same_branching_values(h1: &Polynomial, h2: &Polynomial, tol: f64) -> Result<bool> {
    check_degrees(h1, h2)?;
    let (a, b) = (branching_profile(h1)?.values_expanded(), branching_profile(h2)?.values_expanded());
    Ok(a.len() == b.len() && matching_distance(&a, &b) <= tol)
}

/// The multisets of `(order, value)` pairs agree. This is necessary for the
/// coverings to be isomorphic.
pub fn isomorphic_profiles(h1: &Polynomial, h2: &Polynomial) -> Result<bool> {
    check_degrees(h1, h2)?;
    let (p1, p2) = (branching_profile(h1)?, branching_profile(h2)?);
    let scale = p1
        .critical_values
        .iter()
        .chain(&p2.critical_values)
        .map(|(v, _)| v.norm())
        .fold(0.0, f64::max);
    let tol = 1e-9 * (1.0 + scale);
    let max_order = h1.degree();
    for e in 1..max_order {
        let pick = |p: &BranchingProfile| -> Vec<C64> {
            p.critical_values.iter().filter(|(_, o)| *o == e).map(|(v, _)| *v).collect()
        };
        let (a, b) = (pick(&p1), pick(&p2));
        if a.len() != b.len() || matching_distance(&a, &b) > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Marked coverings in the local chart are isomorphic exactly when their
/// parameters agree.
pub fn marked_equal(m1: &CoveringLocalModel, m2: &CoveringLocalModel, tol: f64) -> Result<bool> {
    if m1.k != m2.k || m1.q != m2.q {
        return Err(Error::Precondition("models have different (k, q)".into()));
    }
    Ok(m1.a.iter().zip(&m2.a).all(|(x, y)| (x - y).norm() <= tol))
}

/// `a_(σ(i)j) = conj(a_ij)` for all `i, j`.
pub fn symmetric_slice_check(models: &[CoveringLocalModel], sigma: &[usize]) -> Result<bool> {
    let r = models.len();
    if sigma.len() != r {
        return Err(Error::InvalidAction(format!("action has {} entries for {r} models", sigma.len())));
    }
    for (i, &s) in sigma.iter().enumerate() {
        if s >= r || sigma[s] != i {
            return Err(Error::InvalidAction(format!("not an involution at {i}")));
        }
        if models[s].k != models[i].k {
            return Err(Error::InvalidAction(format!(
                "degree {} at {i} but {} at {s}",
                models[i].k, models[s].k
            )));
        }
    }
    Ok(sigma.iter().enumerate().all(|(i, &s)| {
        models[i]
            .a
            .iter()
            .zip(&models[s].a)
            .all(|(x, y)| (y - x.conj()).norm() <= SLICE_TOL)
    }))
}

/// Elementary symmetric functions `e_1, …, e_(k-1)` of the critical values.
pub fn symmetric_functions_of_branching(model: &CoveringLocalModel) -> Result<Vec<C64>> {
    let values = branching_profile(&model.polynomial())?.values_expanded();
    Ok(elementary_symmetric(&values))
}

fn elementary_symmetric(values: &[C64]) -> Vec<C64> {
    let mut e = vec![C64::new(1.0, 0.0)];
    for &v in values {
        e.push(C64::new(0.0, 0.0));
        for j in (1..e.len()).rev() {
            let prev = e[j - 1];
            e[j] += prev * v;
        }
    }
    e.remove(0);
    e
}

/// Samples the symmetric functions with `a_j` on a circle of radius `radius`
/// and fits polynomials of degree `k(k-1)` in the circle variable. Returns the
/// worst sample misfit.
pub fn branching_polynomial_fit(model: &CoveringLocalModel, j: usize, radius: f64) -> Result<f64> {
    if j >= model.a.len() {
        return Err(Error::Precondition(format!("parameter index {j} out of range")));
    }
    let degree = model.k * (model.k - 1);
    let n = (2 * degree + 1).max(25);
    let w: Vec<C64> = (0..n).map(|s| C64::from_polar(1.0, TAU * s as f64 / n as f64)).collect();
    let samples = w
        .iter()
        .map(|&w| {
            let mut m = model.clone();
            m.a[j] += radius * w;
            symmetric_functions_of_branching(&m)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for f in 0..model.k - 1 {
        let coeffs: Vec<C64> = (0..=degree)
            .map(|d| (0..n).map(|s| samples[s][f] * w[s].powu(d as u32).conj()).sum::<C64>() / n as f64)
            .collect();
        let scale = samples.iter().map(|v| v[f].norm()).fold(1.0, f64::max);
        for s in 0..n {
            let fit: C64 = coeffs.iter().enumerate().map(|(d, c)| c * w[s].powu(d as u32)).sum();
            worst = worst.max((fit - samples[s][f]).norm() / scale);
        }
    }
    Ok(worst)
}

/// `z⁴ + 4t z³`.
pub fn f_t(t: f64) -> Polynomial {
    Polynomial::from_real(&[0.0, 0.0, 0.0, 4.0 * t, 1.0])
}

/// `z⁴ + 4tα z³ + 4t²α² z²` with `α = 27^(1/4) e^(iπ/4)`, so `α⁴ = -27`.
pub fn g_t(t: f64) -> Polynomial {
    let alpha = C64::from_polar(27f64.powf(0.25), FRAC_PI_4);
    let zero = C64::new(0.0, 0.0);
    Polynomial::new(vec![zero, zero, 4.0 * t * t * alpha * alpha, 4.0 * t * alpha, C64::new(1.0, 0.0)])
}

/// `z³ + c z`.
pub fn cubic(c: C64) -> Polynomial {
    let zero = C64::new(0.0, 0.0);
    Polynomial::new(vec![zero, c, zero, C64::new(1.0, 0.0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn j() -> C64 {
        C64::from_polar(1.0, TAU / 3.0)
    }

    #[test]
    fn profile_of_f() {
        let p = branching_profile(&f_t(0.1)).unwrap();
        assert_eq!(p.critical_points.len(), 2);
        assert_eq!(p.total_order(), 3);
        let zero = p.critical_points.roots.iter().find(|r| r.location.norm() < 1e-12).unwrap();
        assert_eq!(zero.multiplicity, 2);
        assert!(p.critical_points.roots.iter().any(|r| (r.location - c64(-0.3, 0.0)).norm() < 1e-12));
        let mut v = p.values_expanded();
        v.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((v[0] - c64(-0.0027, 0.0)).norm() < 1e-15);
        assert!(v[1].norm() < 1e-15 && v[2].norm() < 1e-15);
    }

    #[test]
    fn profile_of_g() {
        let t = 0.1;
        let p = branching_profile(&g_t(t)).unwrap();
        assert_eq!(p.critical_points.len(), 3);
        assert!(p.critical_values.iter().all(|(_, e)| *e == 1));
        let alpha = C64::from_polar(27f64.powf(0.25), FRAC_PI_4);
        for want in [c64(0.0, 0.0), -t * alpha, -2.0 * t * alpha] {
            assert!(p.critical_points.roots.iter().any(|r| (r.location - want).norm() < 1e-12));
        }
        assert!((alpha.powu(4) + 27.0).norm() < 1e-12);
    }

    #[test]
    fn square_has_one_value() {
        let p = branching_profile(&Polynomial::from_real(&[0.0, 0.0, 1.0])).unwrap();
        assert_eq!(p.critical_values, vec![(c64(0.0, 0.0), 1)]);
    }

    #[test]
    fn f_and_g_share_values_but_not_profiles() {
        for t in [0.1, 0.05, 0.01, 0.001] {
            assert!(same_branching_values(&f_t(t), &g_t(t), 1e-10).unwrap());
            assert!(!isomorphic_profiles(&f_t(t), &g_t(t)).unwrap());
        }
        let z4 = Polynomial::from_real(&[0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(!same_branching_values(&f_t(0.1), &z4, 1e-10).unwrap());
        assert!(same_branching_values(&f_t(0.1), &f_t(0.1), 0.0).unwrap());
    }

    #[test]
    fn rotated_cubics() {
        let t = 0.1;
        let (h1, h2) = (cubic(c64(t, 0.0)), cubic(t * j()));
        assert!(isomorphic_profiles(&h1, &h2).unwrap());
        let m1 = CoveringLocalModel::new(3, c64(0.0, 0.0), vec![c64(0.0, 0.0), c64(t, 0.0)]).unwrap();
        let m2 = CoveringLocalModel::new(3, c64(0.0, 0.0), vec![c64(0.0, 0.0), t * j()]).unwrap();
        assert!(!marked_equal(&m1, &m2, 1e-9).unwrap());
        assert!(marked_equal(&m1, &m1, 0.0).unwrap());
        let mut m3 = m1.clone();
        m3.a[0] += 1e-12;
        assert!(marked_equal(&m1, &m3, 1e-9).unwrap());
        for z in [c64(0.3, 0.1), c64(-0.2, 0.7)] {
            assert!((h2.eval(j() * j() * z) - h1.eval(z)).norm() < 1e-14);
        }
    }

    #[test]
    fn marking_follows_the_root() {
        let m = CoveringLocalModel::new(3, c64(0.0, 0.0), vec![c64(0.0, 0.0); 2]).unwrap();
        let x = m.marked_point(0.008).unwrap();
        assert!((x - c64(0.2, 0.0)).norm() < 1e-12);
        let m = CoveringLocalModel::new(3, c64(0.0, 0.0), vec![c64(1e-4, 0.0), c64(0.0, 0.0)]).unwrap();
        let y = m.marked_point(0.008).unwrap();
        assert!((y - x).norm() < 0.01);
    }

    #[test]
    fn slices() {
        let z = c64(0.1, 0.2);
        let real = CoveringLocalModel::new(2, c64(1.0, 0.0), vec![c64(0.3, 0.0)]).unwrap();
        assert!(symmetric_slice_check(&[real.clone()], &[0]).unwrap());
        let a = CoveringLocalModel::new(2, c64(1.0, 0.0), vec![z]).unwrap();
        let b = CoveringLocalModel::new(2, c64(1.0, 0.0), vec![z.conj()]).unwrap();
        assert!(symmetric_slice_check(&[a.clone(), b], &[1, 0]).unwrap());
        assert!(!symmetric_slice_check(&[a.clone(), a.clone()], &[1, 0]).unwrap());
        let c = CoveringLocalModel::new(3, c64(1.0, 0.0), vec![z, z]).unwrap();
        assert!(matches!(symmetric_slice_check(&[a.clone(), c], &[1, 0]), Err(Error::InvalidAction(_))));
        assert!(matches!(symmetric_slice_check(&[a.clone(), a], &[0, 0]), Err(Error::InvalidAction(_))));
    }

    #[test]
    fn symmetric_functions() {
        let q = c64(0.5, 0.25);
        let m = CoveringLocalModel::new(2, q, vec![c64(0.1, -0.1)]).unwrap();
        let e = symmetric_functions_of_branching(&m).unwrap();
        assert!((e[0] - (q + c64(0.1, -0.1))).norm() < 1e-14);
        let m = CoveringLocalModel::new(3, q, vec![c64(0.0, 0.0); 2]).unwrap();
        let e = symmetric_functions_of_branching(&m).unwrap();
        assert!((e[0] - 2.0 * q).norm() < 1e-12 && (e[1] - q * q).norm() < 1e-12);
    }

    #[test]
    fn f_in_local_form() {
        let t = 0.1;
        let m = CoveringLocalModel::from_polynomial(&f_t(t), c64(0.0, 0.0)).unwrap();
        assert_eq!(m.k, 4);
        let direct = elementary_symmetric(&branching_profile(&f_t(t)).unwrap().values_expanded());
        let local = symmetric_functions_of_branching(&m).unwrap();
        for (a, b) in direct.iter().zip(&local) {
            assert!((a - b).norm() < 1e-14);
        }
        assert!(m.is_admissible(m.default_cover_radius()).unwrap());
    }

    #[test]
    fn symmetric_functions_are_polynomial() {
        let m = CoveringLocalModel::new(4, c64(0.2, 0.0), vec![c64(0.01, 0.0), c64(0.0, 0.02), c64(0.03, 0.0)]).unwrap();
        for j in 0..3 {
            let r = branching_polynomial_fit(&m, j, 0.05).unwrap();
            assert!(r < 1e-8, "{j} {r}");
        }
    }
}
