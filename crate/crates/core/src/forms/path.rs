use std::f64::consts::TAU;

use num_traits::Zero;

use super::quadrature::integrate;
use crate::{Error, Result, C64};

/// An integration path in the standard chart.
#[derive(Debug, Clone, PartialEq)]
pub enum PathSpec {
    /// Full circle; `orientation` is `+1` counterclockwise, `-1` clockwise.
    Circle {
        center: C64,
        radius: f64,
        orientation: i8,
    },
    Polyline(Vec<C64>),
    Segment { from: C64, to: C64 },
}

/// Tolerances shared by every path integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSettings {
    /// Minimal distance between the path and any singularity of the integrand.
    pub pole_margin: f64,
    pub abs_tol: f64,
    pub max_subintervals: usize,
}

impl Default for IntegrationSettings {
    fn default() -> Self {
        IntegrationSettings {
            pole_margin: 0.05,
            abs_tol: 1e-10,
            max_subintervals: 1 << 16,
        }
    }
}

impl IntegrationSettings {
    pub fn with_margin(pole_margin: f64) -> Self {
        IntegrationSettings {
            pole_margin,
            ..Self::default()
        }
    }

    pub fn with_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

fn segment_distance(a: C64, b: C64, p: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (a + d * s - p).norm()
}

impl PathSpec {
    pub fn circle(center: C64, radius: f64) -> Self {
        PathSpec::Circle {
            center,
            radius,
            orientation: 1,
        }
    }

    pub fn segment(from: C64, to: C64) -> Self {
        PathSpec::Segment { from, to }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PathSpec::Circle {
                radius,
                orientation,
                ..
            } => {
                if !(*radius > 0.0) || !radius.is_finite() {
                    return Err(Error::DegenerateInput(format!("circle radius {radius} must be positive")));
                }
                if orientation.abs() != 1 {
                    return Err(Error::DegenerateInput("circle orientation must be +1 or -1".into()));
                }
            }
            PathSpec::Polyline(v) => {
                if v.len() < 2 {
                    return Err(Error::DegenerateInput("polyline needs at least two vertices".into()));
                }
            }
            PathSpec::Segment { .. } => {}
        }
        Ok(())
    }

    pub fn start(&self) -> C64 {
        match self {
            PathSpec::Circle { center, radius, .. } => center + radius,
            PathSpec::Polyline(v) => v[0],
            PathSpec::Segment { from, .. } => *from,
        }
    }

    pub fn end(&self) -> C64 {
        match self {
            PathSpec::Circle { center, radius, .. } => center + radius,
            PathSpec::Polyline(v) => *v.last().expect("validated polyline"),
            PathSpec::Segment { to, .. } => *to,
        }
    }

    /// Euclidean distance from `p` to the trace of the path.
    pub fn distance_to(&self, p: C64) -> f64 {
        match self {
            PathSpec::Circle { center, radius, .. } => ((p - center).norm() - radius).abs(),
            PathSpec::Polyline(v) => v
                .windows(2)
                .map(|w| segment_distance(w[0], w[1], p))
                .fold(f64::INFINITY, f64::min),
            PathSpec::Segment { from, to } => segment_distance(*from, *to, p),
        }
    }

    /// Fails if any of `points` is closer to the path than `margin`.
    pub fn check_clearance(&self, points: &[C64], margin: f64) -> Result<()> {
        for &p in points {
            let distance = self.distance_to(p);
            if distance < margin {
                return Err(Error::PathThroughPole {
                    point: p,
                    distance,
                    margin,
                });
            }
        }
        Ok(())
    }
}

/// `∫_path f(z) dz` by adaptive quadrature, after checking that the path keeps
/// `settings.pole_margin` away from every point in `singularities`.
pub fn contour_integral<F: Fn(C64) -> C64>(
    f: F,
    path: &PathSpec,
    singularities: &[C64],
    settings: &IntegrationSettings,
) -> Result<C64> {
    path.validate()?;
    path.check_clearance(singularities, settings.pole_margin)?;
    match path {
        PathSpec::Circle {
            center,
            radius,
            orientation,
        } => {
            let o = *orientation as f64;
            let integrand = |s: f64| {
                let e = C64::from_polar(1.0, o * s);
                f(center + e * *radius) * (C64::i() * o * *radius * e)
            };
            Ok(integrate(integrand, 0.0, TAU, settings.abs_tol, settings.max_subintervals)?.0)
        }
        PathSpec::Segment { from, to } => segment_integral(&f, *from, *to, settings),
        PathSpec::Polyline(v) => {
            let n = (v.len() - 1) as f64;
            let mut total = C64::zero();
            for w in v.windows(2) {
                let s = IntegrationSettings {
                    abs_tol: settings.abs_tol / n,
                    ..*settings
                };
                total += segment_integral(&f, w[0], w[1], &s)?;
            }
            Ok(total)
        }
    }
}

fn segment_integral<F: Fn(C64) -> C64>(
    f: &F,
    a: C64,
    b: C64,
    settings: &IntegrationSettings,
) -> Result<C64> {
    let d = b - a;
    if d.is_zero() {
        return Ok(C64::zero());
    }
    Ok(integrate(
        |s| f(a + d * s) * d,
        0.0,
        1.0,
        settings.abs_tol,
        settings.max_subintervals,
    )?
    .0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use std::f64::consts::PI;

    #[test]
    fn dz_along_segment() {
        let v = contour_integral(
            |_| c64(1.0, 0.0),
            &PathSpec::segment(C64::zero(), c64(1.0, 1.0)),
            &[],
            &IntegrationSettings::default(),
        )
        .unwrap();
        assert!((v - c64(1.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn inverse_over_unit_circle() {
        let v = contour_integral(
            |z| z.inv(),
            &PathSpec::circle(C64::zero(), 1.0),
            &[C64::zero()],
            &IntegrationSettings::default(),
        )
        .unwrap();
        assert!((v - c64(0.0, 2.0 * PI)).norm() < 1e-12);
    }

    #[test]
    fn clockwise_circle_flips_sign() {
        let p = PathSpec::Circle {
            center: C64::zero(),
            radius: 2.0,
            orientation: -1,
        };
        let v = contour_integral(|z| z.inv(), &p, &[], &IntegrationSettings::default()).unwrap();
        assert!((v + c64(0.0, 2.0 * PI)).norm() < 1e-12);
    }

    #[test]
    fn near_pole_is_refused() {
        let r = contour_integral(
            |z| z.inv(),
            &PathSpec::segment(c64(-1.0, 0.01), c64(1.0, 0.01)),
            &[C64::zero()],
            &IntegrationSettings::default(),
        );
        assert!(matches!(r, Err(Error::PathThroughPole { .. })));
    }

    #[test]
    fn degenerate_paths_are_rejected() {
        assert!(PathSpec::Polyline(vec![C64::zero()]).validate().is_err());
        assert!(PathSpec::circle(C64::zero(), 0.0).validate().is_err());
    }
}
