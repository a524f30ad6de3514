use std::f64::consts::{PI, TAU};

use super::ParameterVector;
use crate::algebra::{default_cluster_tol, raw_roots, Polynomial};
use crate::forms::{contour_integral, IntegrationSettings, PathSpec};
use crate::gluing::{build_components, GluedComponents, GluingConfiguration};
use crate::{Error, Result, C64};

/// Quadrature tolerance of the B-period integrals.
const H_B_TOL: f64 = 1e-13;
/// Largest angle subtended by one chord of an arc.
const ARC_STEP: f64 = PI / 32.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodResiduals {
    pub v_a: Vec<f64>,
    pub h_a: Vec<C64>,
    pub v_b: Vec<f64>,
    pub h_b: Vec<C64>,
}

/// Which way an arc turns around the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// The arc of angle at most `π`.
    Short,
    /// The arc through the upper half plane.
    Upper,
    /// The arc through the lower half plane.
    Lower,
}

fn wrap(a: f64) -> f64 {
    let mut a = a % TAU;
    if a > PI {
        a -= TAU;
    } else if a <= -PI {
        a += TAU;
    }
    a
}

/// Radial leg from `from` to the circle `|z| = radius`, an arc, and a radial
/// leg out to `to`. Arcs are replaced by chords.
pub fn h_b_path(from: C64, to: C64, radius: f64, route: Route) -> PathSpec {
    let (ta, tb) = (from.arg(), to.arg());
    let short = wrap(tb - ta);
    let long = if short >= 0.0 { short - TAU } else { short + TAU };
    let mid_sin = |d: f64| (ta + 0.5 * d).sin();
    let delta = match route {
        Route::Short => short,
        Route::Upper => {
            if mid_sin(short) >= mid_sin(long) {
                short
            } else {
                long
            }
        }
        Route::Lower => {
            if mid_sin(short) < mid_sin(long) {
                short
            } else {
                long
            }
        }
    };
    let n = ((delta.abs() / ARC_STEP).ceil() as usize).max(1);
    let mut pts = vec![from];
    pts.extend((0..=n).map(|k| C64::from_polar(radius, ta + delta * k as f64 / n as f64)));
    pts.push(to);
    PathSpec::Polyline(pts)
}

pub fn residual_periods(x: &ParameterVector) -> Result<PeriodResiduals> {
    let cfg = x.to_configuration()?;
    periods_of(&cfg, &build_components(&cfg)?)
}

pub(super) fn periods_of(cfg: &GluingConfiguration, comps: &GluedComponents) -> Result<PeriodResiduals> {
    let (v_a, v_b) = vertical_periods(&cfg.gamma);
    Ok(PeriodResiduals {
        v_a,
        h_a: h_a_by_residues(cfg, comps)?,
        v_b,
        h_b: h_b(cfg, comps)?,
    })
}

/// `V^A_j = -2π Im γ_j` and `V^B_i = -2 Re(γ_i - γ_m)` for `i, j < m`.
pub fn vertical_periods(gamma: &[C64]) -> (Vec<f64>, Vec<f64>) {
    let m = gamma.len();
    let gm = gamma[m - 1];
    (
        gamma[..m - 1].iter().map(|g| -TAU * g.im).collect(),
        gamma[..m - 1].iter().map(|g| -2.0 * (g - gm).re).collect(),
    )
}

/// `½ (conj ∮ g⁺φ3 around p_i⁺ + ∮ g⁻φ3 around p_i⁻)` from residues.
pub fn h_a_by_residues(cfg: &GluingConfiguration, comps: &GluedComponents) -> Result<Vec<C64>> {
    let plus = comps.g_plus_expansion.mul(comps.phi3_plus.expansion());
    let minus = comps.g_minus_expansion.mul(comps.phi3_minus.expansion());
    let two_pi_i = C64::new(0.0, TAU);
    (0..cfg.m)
        .map(|i| {
            let (pp, pm) = (cfg.p_plus[i], cfg.p_minus[i]);
            let rp = plus.residue(pp, default_cluster_tol(pp.norm()))?;
            let rm = minus.residue(pm, default_cluster_tol(pm.norm()))?;
            Ok(0.5 * ((two_pi_i * rp).conj() + two_pi_i * rm))
        })
        .collect()
}

/// The same circle integrals by quadrature on circles of radius `ε`.
pub fn h_a_by_quadrature(cfg: &GluingConfiguration, comps: &GluedComponents) -> Result<Vec<C64>> {
    let settings = IntegrationSettings::with_margin(0.5 * cfg.epsilon).with_tol(1e-12);
    let fp = |z: C64| comps.g_plus_expansion.eval(z) * comps.phi3_plus.eval(z);
    let fm = |z: C64| comps.g_minus_expansion.eval(z) * comps.phi3_minus.eval(z);
    (0..cfg.m)
        .map(|i| {
            let others = |pts: &[C64]| -> Vec<C64> {
                pts.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &p)| p).collect()
            };
            let mut minus_sing = others(&cfg.p_minus);
            minus_sing.push(C64::new(0.0, 0.0));
            let ip = contour_integral(fp, &PathSpec::circle(cfg.p_plus[i], cfg.epsilon), &others(&cfg.p_plus), &settings)?;
            let im = contour_integral(fm, &PathSpec::circle(cfg.p_minus[i], cfg.epsilon), &minus_sing, &settings)?;
            Ok(0.5 * (ip.conj() + im))
        })
        .collect()
}

/// `φ3` and `g` must be written over the same denominator.
fn check_shared_poles(phi3: &Polynomial, phi3_den: &Polynomial, g: &Polynomial, g_den: &Polynomial) -> Result<()> {
    let same = phi3_den.degree() == g_den.degree()
        && (0..=phi3_den.degree()).all(|k| (phi3_den.coeff(k) - g_den.coeff(k)).norm() <= 1e-12 * (1.0 + g_den.coeff(k).norm()));
    if !same || phi3.is_zero() || g.is_zero() {
        return Err(Error::DegenerateConfiguration("φ3 and g do not share their poles".into()));
    }
    Ok(())
}

fn h_b(cfg: &GluingConfiguration, comps: &GluedComponents) -> Result<Vec<C64>> {
    let m = cfg.m;
    let settings = IntegrationSettings::with_margin(0.5 * cfg.epsilon).with_tol(H_B_TOL);
    let gm = comps.g_minus_expansion.to_rational();
    let gp = comps.g_plus_expansion.to_rational();
    let (am, bm) = (comps.phi3_minus.density().numerator(), gm.numerator());
    let (ap, bp) = (comps.phi3_plus.density().numerator(), gp.numerator());
    check_shared_poles(am, comps.phi3_minus.density().denominator(), bm, gm.denominator())?;
    check_shared_poles(ap, comps.phi3_plus.density().denominator(), bp, gp.denominator())?;
    let poles_m = raw_roots(bm)?;
    let poles_p = if bp.degree() > 0 { raw_roots(bp)? } else { Vec::new() };
    let fm = |z: C64| am.eval(z) / bm.eval(z);
    let fp = |z: C64| ap.eval(z) / bp.eval(z);
    let r_in = 0.5 * cfg.p_minus.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min);
    let r_out = 1.5 * cfg.p_plus.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let middle = if m % 2 == 0 { Some(m / 2 - 1) } else { None };
    (0..m - 1)
        .map(|i| {
            let routes: &[Route] = if Some(i) == middle { &[Route::Upper, Route::Lower] } else { &[Route::Short] };
            let mut total = C64::new(0.0, 0.0);
            for &route in routes {
                let lm = contour_integral(fm, &h_b_path(cfg.p_minus[i], cfg.p_minus[m - 1], r_in, route), &poles_m, &settings)?;
                let lp = contour_integral(fp, &h_b_path(cfg.p_plus[m - 1], cfg.p_plus[i], r_out, route), &poles_p, &settings)?;
                total += 0.5 * lm.conj() - 0.5 * lp;
            }
            Ok(total / routes.len() as f64)
        })
        .collect()
}
