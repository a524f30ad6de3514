use std::f64::consts::TAU;

use num_traits::Zero;

use super::Polynomial;
use crate::{Error, Result, C64};

/// Iteration cap of the simultaneous root iteration.
pub const ROOT_ITERATION_CAP: usize = 500;

/// Angle offset of the deterministic starting configuration.
const START_ANGLE: f64 = 0.4;

/// A root location and its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub location: C64,
    pub multiplicity: usize,
}

/// Roots of a polynomial, sorted by argument in `[0, 2π)` then modulus.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RootSet {
    pub roots: Vec<Root>,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn locations(&self) -> Vec<C64> {
        self.roots.iter().map(|r| r.location).collect()
    }

    /// Locations repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<C64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat(r.location).take(r.multiplicity))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn max_modulus(&self) -> f64 {
        self.roots
            .iter()
            .map(|r| r.location.norm())
            .fold(0.0, f64::max)
    }
}

/// Default clustering tolerance for roots of modulus up to `max_modulus`.
pub fn default_cluster_tol(max_modulus: f64) -> f64 {
    1e-8 * (1.0 + max_modulus)
}

/// Argument in `[0, 2π)`, with numerically real points snapped onto the axis.
pub fn canonical_arg(z: C64) -> f64 {
    if z.norm() == 0.0 {
        return 0.0;
    }
    let im = if z.im.abs() <= 1e-13 * z.norm() { 0.0 } else { z.im };
    let a = im.atan2(z.re);
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

fn root_order(a: &C64, b: &C64) -> std::cmp::Ordering {
    canonical_arg(*a)
        .total_cmp(&canonical_arg(*b))
        .then(a.norm().total_cmp(&b.norm()))
}

/// All roots of `p` repeated by multiplicity, unclustered and unsorted.
///
/// Zero roots are split off exactly; the rest is solved by Aberth-Ehrlich
/// iteration from a fixed start on a circle, then polished by Newton steps.
pub fn raw_roots(p: &Polynomial) -> Result<Vec<C64>> {
    if p.is_zero() {
        return Err(Error::DegenerateInput("zero polynomial has no root set".into()));
    }
    let coeffs = p.coeffs();
    let zeros = coeffs.iter().take_while(|c| c.is_zero()).count();
    let mut out = vec![C64::zero(); zeros];
    let reduced = Polynomial::new(coeffs[zeros..].to_vec()).monic();
    let d = reduced.degree();
    match d {
        0 => {}
        1 => out.push(-reduced.coeff(0)),
        _ => out.extend(aberth(&reduced)?),
    }
    Ok(out)
}

fn aberth(p: &Polynomial) -> Result<Vec<C64>> {
    let d = p.degree();
    let radius = 1.0
        + p.coeffs()[..d]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..d)
        .map(|k| C64::from_polar(radius, TAU * k as f64 / d as f64 + START_ANGLE))
        .collect();
    let scale = p.max_coeff_abs();
    let mut converged = vec![false; d];
    for _ in 0..ROOT_ITERATION_CAP {
        for k in 0..d {
            if converged[k] {
                continue;
            }
            let (v, dv) = p.eval_with_derivative(z[k]);
            if v.norm() <= f64::EPSILON * scale * (1.0 + z[k].norm()).powi(d as i32) {
                converged[k] = true;
                continue;
            }
            let ratio = v / dv;
            let repulsion: C64 = (0..d)
                .filter(|&j| j != k)
                .map(|j| {
                    let diff = z[k] - z[j];
                    if diff.is_zero() {
                        C64::zero()
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                continue;
            }
            z[k] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * (1.0 + z[k].norm()) {
                converged[k] = true;
            }
        }
        if converged.iter().all(|&c| c) {
            break;
        }
    }
    for root in z.iter_mut() {
        *root = polish(p, *root);
    }
    let worst = z
        .iter()
        .map(|&r| relative_residual(p, r))
        .fold(0.0, f64::max);
    if worst > 1e-9 {
        return Err(Error::NumericFailure {
            what: format!("root iteration did not converge in {ROOT_ITERATION_CAP} steps"),
            best_residual: worst,
        });
    }
    Ok(z)
}

/// `|p(z)| / (max|coeff| (1+|z|)^deg)`, the acceptance measure for a root.
pub fn relative_residual(p: &Polynomial, z: C64) -> f64 {
    p.eval(z).norm() / (p.max_coeff_abs() * (1.0 + z.norm()).powi(p.degree() as i32))
}

fn polish(p: &Polynomial, mut z: C64) -> C64 {
    let mut best = p.eval(z).norm();
    for _ in 0..3 {
        let (v, dv) = p.eval_with_derivative(z);
        if dv.is_zero() {
            break;
        }
        let candidate = z - v / dv;
        let r = p.eval(candidate).norm();
        if !(r < best) {
            break;
        }
        best = r;
        z = candidate;
    }
    z
}

/// Merges points closer than `tol` (single linkage); cluster location is the mean.
pub fn cluster_points(points: &[C64], tol: f64) -> Vec<Root> {
    let n = points.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (points[i] - points[j]).norm() <= tol {
                let a = find(&mut label, i);
                let b = find(&mut label, j);
                if a != b {
                    label[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<C64>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut label, i);
        match groups.iter_mut().find(|(g, _)| *g == r) {
            Some((_, v)) => v.push(points[i]),
            None => groups.push((r, vec![points[i]])),
        }
    }
    let mut roots: Vec<Root> = groups
        .into_iter()
        .map(|(_, v)| Root {
            location: v.iter().sum::<C64>() / v.len() as f64,
            multiplicity: v.len(),
        })
        .collect();
    roots.sort_by(|a, b| root_order(&a.location, &b.location));
    roots
}

/// Roots of `p` with multiplicities inferred by clustering.
///
/// `cluster_tol` defaults to [`default_cluster_tol`] of the largest root modulus.
pub fn poly_roots(p: &Polynomial, cluster_tol: Option<f64>) -> Result<RootSet> {
    if p.is_zero() {
        return Err(Error::DegenerateInput("zero polynomial has no root set".into()));
    }
    if p.degree() == 0 {
        return Err(Error::DegenerateInput("constant polynomial has no roots".into()));
    }
    let raw = raw_roots(p)?;
    let max_mod = raw.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = cluster_tol.unwrap_or_else(|| default_cluster_tol(max_mod));
    Ok(RootSet {
        roots: cluster_points(&raw, tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use std::f64::consts::PI;

    #[test]
    fn quadratic_with_imaginary_roots() {
        let rs = poly_roots(&Polynomial::from_real(&[1.0, 0.0, 1.0]), None).unwrap();
        assert_eq!(rs.len(), 2);
        assert!((rs.roots[0].location - c64(0.0, 1.0)).norm() < 1e-14);
        assert!((rs.roots[1].location - c64(0.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn cube_roots_of_minus_two() {
        let rs = poly_roots(&Polynomial::from_real(&[2.0, 0.0, 0.0, 1.0]), None).unwrap();
        let args = [PI / 3.0, PI, 5.0 * PI / 3.0];
        for (r, a) in rs.roots.iter().zip(args) {
            assert!((r.location.norm() - 2f64.cbrt()).abs() < 1e-13);
            assert!((canonical_arg(r.location) - a).abs() < 1e-13);
            assert_eq!(r.multiplicity, 1);
        }
    }

    #[test]
    fn double_root_at_origin() {
        let t = 0.01;
        let p = Polynomial::from_real(&[0.0, 0.0, 12.0 * t, 4.0]);
        let rs = poly_roots(&p, None).unwrap();
        assert_eq!(rs.len(), 2);
        assert_eq!(rs.roots[0].location, C64::zero());
        assert_eq!(rs.roots[0].multiplicity, 2);
        assert!((rs.roots[1].location - c64(-0.03, 0.0)).norm() < 1e-15);
        assert_eq!(rs.roots[1].multiplicity, 1);
    }

    #[test]
    fn clustered_double_root_away_from_origin() {
        let p = Polynomial::from_roots(&[c64(1.0, 1.0), c64(1.0, 1.0), c64(-2.0, 0.5)]);
        let rs = poly_roots(&p, Some(1e-6)).unwrap();
        assert_eq!(rs.total_multiplicity(), 3);
        assert!(rs.roots.iter().any(|r| r.multiplicity == 2));
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert!(matches!(
            poly_roots(&Polynomial::zero(), None),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn wilkinson_like_spread() {
        let roots: Vec<C64> = (1..=10).map(|k| c64(k as f64, 0.0)).collect();
        let p = Polynomial::from_roots(&roots);
        let rs = poly_roots(&p, None).unwrap();
        assert_eq!(rs.len(), 10);
        for k in 1..=10 {
            assert!(rs.roots.iter().any(|r| (r.location - k as f64).norm() < 1e-6));
        }
    }
}
