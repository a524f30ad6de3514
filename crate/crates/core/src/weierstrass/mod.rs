//! Weierstrass representation on the sphere: `φ1 = ½(1/g − g)φ3`,
//! `φ2 = (i/2)(1/g + g)φ3`, immersion `Re ∫ (φ1, φ2, φ3)`, Gauss curvature,
//! meshes, and the parameter/equation dimension count.
//!
//! Scaling: the height differential carries the size of the surface. The
//! catenoid of waist radius `r` is `g = z`, `φ3 = r dz/z`; its curvature on the
//! waist is `-1/r²`. The `scale` field multiplies output coordinates only and
//! divides curvature by `scale²`.

mod mesh;

use log::warn;
use num_traits::Zero;

pub use mesh::{mesh_surface, mesh_surface_with_margin, ParametrizedSurface, SamplingGrid, SurfaceMesh};

use crate::algebra::{
    cluster_points, default_cluster_tol, partial_fractions, raw_roots, PoleExpansion,
    Polynomial, RationalFunction,
};
use crate::forms::{contour_integral, IntegrationSettings, MeromorphicForm, PathSpec, Point};
use crate::{Error, Result, C64};

/// Gauss map, height differential and ends of a genus-zero minimal surface.
#[derive(Debug, Clone)]
pub struct WeierstrassData {
    pub gauss_map: RationalFunction,
    pub height_differential: MeromorphicForm,
    pub punctures: Vec<Point>,
    pub base_point: C64,
    pub scale: f64,
    pub phi1: MeromorphicForm,
    pub phi2: MeromorphicForm,
    psi: RationalFunction,
    psi_inv: RationalFunction,
    settings: IntegrationSettings,
}

/// `(φ1, φ2)` from `g` and `φ3`, by exact Laurent multiplication.
pub fn phi12_from(
    g: &RationalFunction,
    phi3: &MeromorphicForm,
) -> Result<(MeromorphicForm, MeromorphicForm)> {
    if g.is_zero() {
        return Err(Error::InvalidWeierstrassData("Gauss map is identically zero".into()));
    }
    let ge = partial_fractions(g)?;
    let ginv = partial_fractions(&g.recip()?)?;
    let half = C64::new(0.5, 0.0);
    let a = ginv.add(&ge.scale(C64::new(-1.0, 0.0))).scale(half);
    let b = ginv.add(&ge).scale(C64::new(0.0, 0.5));
    Ok((phi3.multiplied_by(&a), phi3.multiplied_by(&b)))
}

/// Order of vanishing of `f` at `p` (negative for poles).
fn order_at(f: &RationalFunction, p: Point) -> Result<i64> {
    match p {
        Point::Infinity => {
            Ok(f.denominator().degree() as i64 - f.numerator().degree() as i64)
        }
        Point::Finite(z) => {
            let count = |poly: &Polynomial| -> Result<i64> {
                if poly.degree() == 0 {
                    return Ok(0);
                }
                let tol = default_cluster_tol(z.norm());
                Ok(raw_roots(poly)?.iter().filter(|r| (**r - z).norm() <= tol.max(1e-7)).count() as i64)
            };
            Ok(count(f.numerator())? - count(f.denominator())?)
        }
    }
}

/// Order of `φ3 = f dz` at `p`; at infinity `dz` has a double pole.
fn form_order_at(w: &MeromorphicForm, p: Point) -> Result<i64> {
    let o = order_at(w.density(), p)?;
    Ok(match p {
        Point::Infinity => o - 2,
        Point::Finite(_) => o,
    })
}

impl WeierstrassData {
    pub fn new(
        gauss_map: RationalFunction,
        height_differential: MeromorphicForm,
        punctures: Vec<Point>,
        base_point: C64,
    ) -> Result<Self> {
        let (phi1, phi2) = phi12_from(&gauss_map, &height_differential)?;
        let data = WeierstrassData {
            psi: curvature_factor(&gauss_map, &height_differential, false)?,
            psi_inv: curvature_factor(&gauss_map, &height_differential, true)?,
            gauss_map,
            height_differential,
            punctures,
            base_point,
            scale: 1.0,
            phi1,
            phi2,
            settings: IntegrationSettings::default(),
        };
        data.check_ends()?;
        Ok(data)
    }

    /// Unit-waist catenoid `g = z`, `φ3 = dz/z`, ends at `0` and `∞`, based at `1`.
    pub fn catenoid() -> Self {
        Self::catenoid_scaled(1.0)
    }

    /// Catenoid of waist radius `r`: `g = z`, `φ3 = r dz/z`.
    pub fn catenoid_scaled(r: f64) -> Self {
        let phi3 = MeromorphicForm::simple_poles(&[(C64::zero(), C64::new(r, 0.0))]);
        Self::new(
            RationalFunction::identity(),
            phi3,
            vec![Point::Finite(C64::zero()), Point::Infinity],
            C64::new(1.0, 0.0),
        )
        .expect("catenoid data is valid")
    }

    /// Catenoid with its top end at the origin: `g = z`, `φ3 = -dz/z`.
    pub fn catenoid_top_at_origin() -> Self {
        Self::catenoid_with_growth(-1.0).expect("catenoid data is valid")
    }

    /// `g = z`, `φ3 = c dz/z`, ends `[∞, 0]`: the end at `∞` has growth `c`.
    pub fn catenoid_with_growth(c: f64) -> Result<Self> {
        if c == 0.0 || !c.is_finite() {
            return Err(Error::InvalidWeierstrassData(format!("catenoid growth {c} must be finite and nonzero")));
        }
        let phi3 = MeromorphicForm::simple_poles(&[(C64::zero(), C64::new(c, 0.0))]);
        Self::new(
            RationalFunction::identity(),
            phi3,
            vec![Point::Infinity, Point::Finite(C64::zero())],
            C64::new(1.0, 0.0),
        )
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_settings(mut self, settings: IntegrationSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn settings(&self) -> &IntegrationSettings {
        &self.settings
    }

    fn check_ends(&self) -> Result<()> {
        let finite: Vec<C64> = self
            .punctures
            .iter()
            .filter_map(|p| match p {
                Point::Finite(z) => Some(*z),
                Point::Infinity => None,
            })
            .collect();
        for t in &self.height_differential.expansion().poles {
            if t.order() != 1 {
                return Err(Error::InvalidWeierstrassData(format!(
                    "height differential has a pole of order {} at {}",
                    t.order(),
                    t.location
                )));
            }
            if !finite.iter().any(|q| (q - t.location).norm() <= 1e-9) {
                return Err(Error::InvalidWeierstrassData(format!(
                    "height differential has a pole at {} which is not a puncture",
                    t.location
                )));
            }
        }
        for &p in &self.punctures {
            if form_order_at(&self.height_differential, p)? != -1 {
                return Err(Error::InvalidWeierstrassData(format!(
                    "height differential needs a simple pole at the puncture {p:?}"
                )));
            }
            if order_at(&self.gauss_map, p)?.abs() != 1 {
                return Err(Error::InvalidWeierstrassData(format!(
                    "Gauss map must take 0 or ∞ simply at the puncture {p:?}"
                )));
            }
        }
        if form_order_at(&self.height_differential, Point::Infinity)? < 0
            && !self.punctures.contains(&Point::Infinity)
        {
            return Err(Error::InvalidWeierstrassData(
                "height differential has a pole at ∞ which is not a puncture".into(),
            ));
        }
        Ok(())
    }

    /// Poles of `φ1`, `φ2`, `φ3` in the finite plane.
    pub fn singularities(&self) -> Vec<C64> {
        let mut out = self.height_differential.poles();
        for p in self.phi1.poles().into_iter().chain(self.phi2.poles()) {
            if !out.iter().any(|q| (q - p).norm() <= 1e-12) {
                out.push(p);
            }
        }
        out
    }

    /// Evaluates `(φ1, φ2, φ3)` densities at `z`.
    pub fn densities(&self, z: C64) -> [C64; 3] {
        [self.phi1.eval(z), self.phi2.eval(z), self.height_differential.eval(z)]
    }
}

fn curvature_factor(g: &RationalFunction, phi3: &MeromorphicForm, inverted: bool) -> Result<RationalFunction> {
    let dg = if g.map_degree() == 0 {
        RationalFunction::constant(C64::zero())
    } else {
        g.derivative()?
    };
    if phi3.density().is_zero() {
        return Err(Error::InvalidWeierstrassData("height differential is identically zero".into()));
    }
    if inverted {
        // (1/g)' (1/g) / φ3 = -g' / (g^3 φ3)
        let g3 = g.mul(g)?.mul(g)?;
        dg.scale(C64::new(-1.0, 0.0)).div(&g3.mul(phi3.density())?)
    } else {
        dg.mul(g)?.div(phi3.density())
    }
}

/// Real parts of the periods `2πi Res φ_k` at every finite pole and at infinity.
///
/// Nonzero entries obstruct a well-defined immersion.
pub fn period_obstructions(data: &WeierstrassData) -> Result<Vec<(Point, [f64; 3])>> {
    let forms = [&data.phi1, &data.phi2, &data.height_differential];
    let mut points: Vec<Point> = data.singularities().into_iter().map(Point::Finite).collect();
    points.push(Point::Infinity);
    let mut out = Vec::new();
    for p in points {
        let mut v = [0.0; 3];
        for (k, w) in forms.iter().enumerate() {
            let r = w.residue_at(p)?;
            v[k] = (C64::new(0.0, std::f64::consts::TAU) * r).re;
        }
        out.push((p, v));
    }
    Ok(out)
}

/// Polyline from `a` to `b` keeping `margin` away from `poles`: the straight
/// segment if clear, otherwise a two-leg detour through an offset midpoint.
pub fn avoiding_path(a: C64, b: C64, poles: &[C64], margin: f64) -> Result<PathSpec> {
    let straight = PathSpec::segment(a, b);
    if straight.check_clearance(poles, margin).is_ok() {
        return Ok(straight);
    }
    let d = b - a;
    let mid = a + d * 0.5;
    let normal = if d.is_zero() { C64::new(0.0, 1.0) } else { d * C64::i() / d.norm() };
    let len = d.norm().max(margin);
    for k in 1..=40 {
        for sign in [1.0, -1.0] {
            let offset = normal * (sign * len * 0.05 * k as f64);
            let path = PathSpec::Polyline(vec![a, mid + offset, b]);
            if path.check_clearance(poles, margin).is_ok() {
                return Ok(path);
            }
        }
    }
    straight.check_clearance(poles, margin)?;
    Ok(straight)
}

/// `Re ∫ (φ1, φ2, φ3)` along an explicit path, scaled by `data.scale`.
pub fn immerse_along(data: &WeierstrassData, path: &PathSpec) -> Result<[f64; 3]> {
    let poles = data.singularities();
    let settings = data.settings;
    let mut x = [0.0; 3];
    let forms = [&data.phi1, &data.phi2, &data.height_differential];
    for (k, w) in forms.iter().enumerate() {
        let v = contour_integral(|z| w.eval(z), path, &poles, &settings)?;
        x[k] = data.scale * v.re;
    }
    Ok(x)
}

/// The immersion at `z`, integrated from the base point along a pole-avoiding path.
pub fn immerse(data: &WeierstrassData, z: C64) -> Result<[f64; 3]> {
    let poles = data.singularities();
    for &p in &poles {
        let distance = (z - p).norm();
        if distance <= 1e-12 * (1.0 + p.norm()) {
            return Err(Error::PathThroughPole {
                point: p,
                distance,
                margin: data.settings.pole_margin,
            });
        }
    }
    if z == data.base_point {
        return Ok([0.0; 3]);
    }
    let obstructed = period_obstructions(data)?
        .iter()
        .any(|(_, v)| v.iter().any(|c| c.abs() > 1e-9));
    if obstructed {
        warn!("periods of the Weierstrass data do not vanish; the immersion depends on the path");
    }
    let endpoint_clearance = poles
        .iter()
        .map(|p| (z - p).norm().min((data.base_point - p).norm()))
        .fold(f64::INFINITY, f64::min);
    let margin = data.settings.pole_margin.min(0.5 * endpoint_clearance);
    let path = avoiding_path(data.base_point, z, &poles, margin)?;
    let settings = IntegrationSettings {
        pole_margin: margin,
        ..data.settings
    };
    let local = WeierstrassData {
        settings,
        ..data.clone()
    };
    immerse_along(&local, &path)
}

/// Gauss curvature `-(4|g'||g| / (|φ3| (1+|g|²)²))²` of the induced metric.
///
/// Zeros of `φ3` matched by zeros or poles of `g` are handled through the
/// reduced factors `g'g/φ3` and `(1/g)'(1/g)/φ3`.
pub fn gauss_curvature(data: &WeierstrassData, z: C64) -> Result<f64> {
    let g_den = data.gauss_map.denominator().eval(z);
    let use_inverse = g_den.norm() <= 1e-300 || data.gauss_map.eval(z).norm() > 1.0;
    let (psi, gz) = if use_inverse {
        let g = data.gauss_map.eval(z);
        let ginv = if g.is_finite() && !g.is_zero() { g.inv() } else { C64::zero() };
        (&data.psi_inv, ginv)
    } else {
        (&data.psi, data.gauss_map.eval(z))
    };
    let den = psi.denominator().eval(z);
    let num = psi.numerator().eval(z);
    if den.norm() <= 1e-14 * psi.denominator().max_coeff_abs() * (1.0 + z.norm()).powi(psi.denominator().degree() as i32) {
        return Err(Error::SingularPoint(format!(
            "the conformal factor degenerates at {z} (zero of φ3 not matched by g)"
        )));
    }
    let value = num / den;
    let factor = 4.0 * value.norm() / (1.0 + gz.norm_sqr()).powi(2);
    let k = -(factor * factor) / (data.scale * data.scale);
    Ok(if k == 0.0 { 0.0 } else { k })
}

/// Agreement of zeros of `φ3` with zeros/poles of `g` (the metric regularity condition).
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCompatibility {
    pub point: Point,
    pub phi3_order: i64,
    pub gauss_order: i64,
    pub compatible: bool,
}

pub fn compatibility_report(data: &WeierstrassData) -> Result<Vec<ZeroCompatibility>> {
    let mut out = Vec::new();
    let num = data.height_differential.density().numerator();
    if num.degree() > 0 {
        let raw = raw_roots(num)?;
        let max_mod = raw.iter().map(|r| r.norm()).fold(0.0, f64::max);
        for r in cluster_points(&raw, default_cluster_tol(max_mod)) {
            let p = Point::Finite(r.location);
            let go = order_at(&data.gauss_map, p)?;
            out.push(ZeroCompatibility {
                point: p,
                phi3_order: r.multiplicity as i64,
                gauss_order: go,
                compatible: go.unsigned_abs() as i64 == r.multiplicity as i64,
            });
        }
    }
    let at_inf = form_order_at(&data.height_differential, Point::Infinity)?;
    if at_inf > 0 {
        let go = order_at(&data.gauss_map, Point::Infinity)?;
        out.push(ZeroCompatibility {
            point: Point::Infinity,
            phi3_order: at_inf,
            gauss_order: go,
            compatible: go.abs() == at_inf,
        });
    }
    Ok(out)
}

/// `(parameters, equations, expected kernel)` = `(5G+3n−5, 5G+2n−4, n−1)`.
pub fn dimension_audit(genus: usize, ends: usize) -> Result<(usize, usize, usize)> {
    if ends < 2 {
        return Err(Error::Precondition(format!("need at least two ends, got {ends}")));
    }
    let (g, n) = (genus, ends);
    Ok((5 * g + 3 * n - 5, 5 * g + 2 * n - 4, n - 1))
}

/// Expansion of `g` for callers that multiply forms by the Gauss map.
pub fn gauss_expansion(data: &WeierstrassData) -> Result<PoleExpansion> {
    partial_fractions(&data.gauss_map)
}

impl ParametrizedSurface for WeierstrassData {
    fn point(&self, z: C64) -> Result<[f64; 3]> {
        immerse(self, z)
    }

    fn curvature(&self, z: C64) -> Result<f64> {
        gauss_curvature(self, z)
    }

    fn singularities(&self) -> Vec<C64> {
        WeierstrassData::singularities(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use std::f64::consts::PI;

    #[test]
    fn catenoid_phi12() {
        let d = WeierstrassData::catenoid();
        for z in [c64(0.4, 0.3), c64(-1.5, 2.0)] {
            let p1 = d.phi1.eval(z);
            let p2 = d.phi2.eval(z);
            let w = z.inv() * z.inv();
            assert!((p1 - (w - 1.0) * 0.5).norm() < 1e-13);
            assert!((p2 - (w + 1.0) * c64(0.0, 0.5)).norm() < 1e-13);
            let p3 = d.height_differential.eval(z);
            assert!((p1 * p1 + p2 * p2 + p3 * p3).norm() < 1e-12 * p3.norm_sqr());
        }
    }

    #[test]
    fn constant_gauss_map_has_no_phi1() {
        let phi3 = MeromorphicForm::simple_poles(&[(c64(0.5, 0.0), c64(1.0, 0.0))]);
        let (p1, _) = phi12_from(&RationalFunction::constant(c64(1.0, 0.0)), &phi3).unwrap();
        assert_eq!(p1.eval(c64(0.1, 0.2)), C64::zero());
    }

    #[test]
    fn catenoid_height_and_waist() {
        let d = WeierstrassData::catenoid();
        assert_eq!(immerse(&d, c64(1.0, 0.0)).unwrap(), [0.0; 3]);
        let x = immerse(&d, c64(2.0, 0.0)).unwrap();
        assert!((x[2] - 2f64.ln()).abs() < 1e-12);
        for k in 0..8 {
            let th = 0.3 + k as f64 * 0.7;
            let x = immerse(&d, C64::from_polar(1.0, th)).unwrap();
            assert!(x[2].abs() < 1e-12);
            let r = ((x[0] - 1.0).powi(2) + x[1].powi(2)).sqrt();
            assert!((r - 1.0).abs() < 1e-10, "{x:?}");
        }
    }

    #[test]
    fn catenoid_curvature() {
        let d = WeierstrassData::catenoid();
        assert!((gauss_curvature(&d, c64(0.0, 1.0)).unwrap() + 1.0).abs() < 1e-14);
        let half = WeierstrassData::catenoid_scaled(0.5);
        assert!((gauss_curvature(&half, c64(1.0, 0.0)).unwrap() + 4.0).abs() < 1e-12);
        for r in [0.2, 0.7, 3.0, 5.0] {
            let k = gauss_curvature(&d, C64::from_polar(r, 1.1)).unwrap();
            let want = -1.0 / (r as f64).ln().cosh().powi(4);
            assert!((k - want).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_curvature_for_constant_gauss_map() {
        let phi3 = MeromorphicForm::simple_poles(&[(C64::zero(), c64(1.0, 0.0))]);
        let d = WeierstrassData {
            psi: curvature_factor(&RationalFunction::constant(c64(2.0, 0.0)), &phi3, false).unwrap(),
            psi_inv: curvature_factor(&RationalFunction::constant(c64(2.0, 0.0)), &phi3, true).unwrap(),
            ..WeierstrassData::catenoid()
        };
        let d = WeierstrassData {
            gauss_map: RationalFunction::constant(c64(2.0, 0.0)),
            ..d
        };
        assert_eq!(gauss_curvature(&d, c64(0.3, 0.1)).unwrap(), 0.0);
    }

    #[test]
    fn paths_around_the_neck_agree() {
        let d = WeierstrassData::catenoid();
        let z = c64(-2.0, 0.0);
        let up = PathSpec::Polyline(vec![c64(1.0, 0.0), c64(0.0, 1.5), z]);
        let down = PathSpec::Polyline(vec![c64(1.0, 0.0), c64(0.0, -1.5), z]);
        let a = immerse_along(&d, &up).unwrap();
        let b = immerse_along(&d, &down).unwrap();
        for k in 0..3 {
            assert!((a[k] - b[k]).abs() < 1e-8);
        }
        let _ = PI;
    }

    #[test]
    fn puncture_is_refused() {
        let d = WeierstrassData::catenoid();
        assert!(matches!(immerse(&d, C64::zero()), Err(Error::PathThroughPole { .. })));
    }

    #[test]
    fn dimension_counts() {
        assert_eq!(dimension_audit(0, 2).unwrap(), (1, 0, 1));
        assert_eq!(dimension_audit(1, 3).unwrap(), (9, 7, 2));
        assert_eq!(dimension_audit(0, 3).unwrap(), (4, 2, 2));
        assert!(dimension_audit(0, 1).is_err());
    }

    #[test]
    fn catenoid_has_no_obstructions_or_incompatible_zeros() {
        let d = WeierstrassData::catenoid();
        for (_, v) in period_obstructions(&d).unwrap() {
            assert!(v.iter().all(|c| c.abs() < 1e-12));
        }
        assert!(compatibility_report(&d).unwrap().is_empty());
    }

    #[test]
    fn non_puncture_pole_is_invalid() {
        let phi3 = MeromorphicForm::simple_poles(&[(C64::zero(), c64(1.0, 0.0)), (c64(2.0, 0.0), c64(1.0, 0.0))]);
        let r = WeierstrassData::new(
            RationalFunction::identity(),
            phi3,
            vec![Point::Finite(C64::zero()), Point::Infinity],
            c64(1.0, 0.0),
        );
        assert!(matches!(r, Err(Error::InvalidWeierstrassData(_))));
    }
}
