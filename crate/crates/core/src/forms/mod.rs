//! Meromorphic 1-forms `f(z) dz` on the sphere: residues (including the point
//! at infinity), circle periods, path integrals and vertical flux.

mod path;
mod quadrature;

use std::f64::consts::TAU;

use num_traits::Zero;

pub use path::{contour_integral, IntegrationSettings, PathSpec};
pub use quadrature::integrate;

use crate::algebra::{default_cluster_tol, partial_fractions, PoleExpansion, RationalFunction};
use crate::{Error, Result, C64};

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Finite(C64),
    Infinity,
}

impl From<C64> for Point {
    fn from(z: C64) -> Self {
        Point::Finite(z)
    }
}

/// Absolute agreement required between residue and quadrature periods.
pub const PERIOD_CROSS_CHECK_TOL: f64 = 1e-9;

/// `f(z) dz` with `f` held both as a reduced rational function and as its
/// partial-fraction expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct MeromorphicForm {
    density: RationalFunction,
    expansion: PoleExpansion,
}

impl MeromorphicForm {
    pub fn from_rational(density: RationalFunction) -> Result<Self> {
        let expansion = partial_fractions(&density)?;
        Ok(MeromorphicForm { density, expansion })
    }

    pub fn from_expansion(expansion: PoleExpansion) -> Self {
        MeromorphicForm {
            density: expansion.to_rational(),
            expansion,
        }
    }

    /// `Σ c_i dz / (z - p_i)`.
    pub fn simple_poles(terms: &[(C64, C64)]) -> Self {
        Self::from_expansion(PoleExpansion::simple_poles(terms))
    }

    pub fn density(&self) -> &RationalFunction {
        &self.density
    }

    pub fn expansion(&self) -> &PoleExpansion {
        &self.expansion
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.expansion.eval(z)
    }

    pub fn poles(&self) -> Vec<C64> {
        self.expansion.poles.iter().map(|t| t.location).collect()
    }

    pub fn residue_at(&self, point: Point) -> Result<C64> {
        match point {
            Point::Finite(p) => self.expansion.residue(p, default_cluster_tol(p.norm())),
            Point::Infinity => Ok(self.density.residue_at_infinity()),
        }
    }

    /// Finite poles with their residues.
    pub fn residues(&self) -> Vec<(C64, C64)> {
        self.expansion.residues()
    }

    /// `Σ` of all residues including infinity; zero up to rounding.
    pub fn residue_sum(&self) -> C64 {
        self.residues().iter().map(|&(_, r)| r).sum::<C64>() + self.density.residue_at_infinity()
    }

    /// The form `(h f) dz` for a function `h` given by its expansion.
    pub fn multiplied_by(&self, h: &PoleExpansion) -> Self {
        Self::from_expansion(self.expansion.mul(h))
    }

    pub fn scale(&self, s: C64) -> Self {
        MeromorphicForm {
            density: self.density.scale(s),
            expansion: self.expansion.scale(s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_expansion(self.expansion.add(&other.expansion))
    }
}

/// Period over a circle by residues, cross-checked by quadrature.
pub fn circle_period(
    w: &MeromorphicForm,
    circle: &PathSpec,
    settings: &IntegrationSettings,
) -> Result<C64> {
    let by_residues = circle_period_by_residues(w, circle)?;
    let by_quadrature = circle_period_by_quadrature(w, circle, settings)?;
    if (by_residues - by_quadrature).norm() > PERIOD_CROSS_CHECK_TOL {
        return Err(Error::CrossCheck {
            by_residues,
            by_quadrature,
        });
    }
    Ok(by_residues)
}

/// `orientation · 2πi · Σ residues strictly inside`.
pub fn circle_period_by_residues(w: &MeromorphicForm, circle: &PathSpec) -> Result<C64> {
    let PathSpec::Circle {
        center,
        radius,
        orientation,
    } = circle
    else {
        return Err(Error::DegenerateInput("circle period needs a circle path".into()));
    };
    circle.validate()?;
    let inside: C64 = w
        .residues()
        .iter()
        .filter(|(p, _)| (p - center).norm() < *radius)
        .map(|&(_, r)| r)
        .sum();
    Ok(inside * C64::new(0.0, TAU * *orientation as f64))
}

pub fn circle_period_by_quadrature(
    w: &MeromorphicForm,
    circle: &PathSpec,
    settings: &IntegrationSettings,
) -> Result<C64> {
    if !matches!(circle, PathSpec::Circle { .. }) {
        return Err(Error::DegenerateInput("circle period needs a circle path".into()));
    }
    contour_integral(|z| w.eval(z), circle, &w.poles(), settings)
}

pub fn path_integral(
    w: &MeromorphicForm,
    path: &PathSpec,
    settings: &IntegrationSettings,
) -> Result<C64> {
    if let PathSpec::Circle { .. } = path {
        return circle_period(w, path, settings);
    }
    contour_integral(|z| w.eval(z), path, &w.poles(), settings)
}

/// Imaginary part of the period of the height differential along a cycle.
pub fn vertical_flux(
    w_phi3: &MeromorphicForm,
    cycle: &PathSpec,
    settings: &IntegrationSettings,
) -> Result<f64> {
    let period = match cycle {
        PathSpec::Circle { .. } => circle_period(w_phi3, cycle, settings)?,
        PathSpec::Polyline(v) if v.first() == v.last() => path_integral(w_phi3, cycle, settings)?,
        _ => {
            return Err(Error::DegenerateInput("vertical flux needs a closed cycle".into()));
        }
    };
    Ok(period.im)
}

/// Sum over all residues, used as a closure diagnostic.
pub fn residue_theorem_defect(w: &MeromorphicForm) -> f64 {
    let scale = w
        .residues()
        .iter()
        .map(|(_, r)| r.norm())
        .fold(w.density.residue_at_infinity().norm(), f64::max);
    w.residue_sum().norm() / scale.max(1.0)
}

impl Default for MeromorphicForm {
    fn default() -> Self {
        MeromorphicForm {
            density: RationalFunction::constant(C64::zero()),
            expansion: PoleExpansion::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Polynomial;
    use crate::c64;
    use std::f64::consts::PI;

    fn dz_over_z() -> MeromorphicForm {
        MeromorphicForm::simple_poles(&[(C64::zero(), c64(1.0, 0.0))])
    }

    #[test]
    fn residue_of_dz_over_z() {
        let w = dz_over_z();
        assert_eq!(w.residue_at(Point::Finite(C64::zero())).unwrap(), c64(1.0, 0.0));
        assert!((w.residue_at(Point::Infinity).unwrap() + 1.0).norm() < 1e-15);
        assert_eq!(w.residue_at(Point::Finite(c64(3.0, 0.0))).unwrap(), C64::zero());
    }

    #[test]
    fn residue_at_infinity_of_central_plus_side() {
        let w = MeromorphicForm::from_rational(RationalFunction::unreduced(
            Polynomial::from_real(&[0.0, 0.0, 3.0]),
            Polynomial::from_real(&[-2.0, 0.0, 0.0, 2.0]),
        ))
        .unwrap();
        assert!((w.residue_at(Point::Infinity).unwrap() + 1.5).norm() < 1e-13);
        assert!(w.residue_sum().norm() < 1e-13);
    }

    #[test]
    fn unit_circle_periods() {
        let s = IntegrationSettings::default();
        let p = circle_period(&dz_over_z(), &PathSpec::circle(C64::zero(), 1.0), &s).unwrap();
        assert!((p - c64(0.0, 2.0 * PI)).norm() < 1e-14);
        let zdz = MeromorphicForm::from_expansion(PoleExpansion::from_polynomial(Polynomial::identity()));
        let q = circle_period(&zdz, &PathSpec::circle(C64::zero(), 1.0), &s).unwrap();
        assert_eq!(q, C64::zero());
    }

    #[test]
    fn semicircle_tracks_the_log_branch() {
        let arc: Vec<C64> = (0..=400)
            .map(|k| C64::from_polar(1.0, -PI / 2.0 + PI * k as f64 / 400.0))
            .collect();
        let v = path_integral(&dz_over_z(), &PathSpec::Polyline(arc), &IntegrationSettings::default()).unwrap();
        // chords approximate the arc; the exact value is iπ because the form is exact off 0
        assert!((v - c64(0.0, PI)).norm() < 1e-10);
    }

    #[test]
    fn catenoid_flux() {
        let f = vertical_flux(&dz_over_z(), &PathSpec::circle(C64::zero(), 1.0), &IntegrationSettings::default())
            .unwrap();
        assert!((f - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn open_path_is_not_a_cycle() {
        let r = vertical_flux(
            &dz_over_z(),
            &PathSpec::segment(c64(1.0, 0.0), c64(2.0, 0.0)),
            &IntegrationSettings::default(),
        );
        assert!(r.is_err());
    }
}
