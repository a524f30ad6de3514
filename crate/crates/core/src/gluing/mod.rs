//! The glued configuration at `t = 0`: the base surface `Σ` (a catenoid with
//! its top end at the origin), two extra spheres `ℂ⁻` and `ℂ⁺`, their Gauss
//! maps `g⁻`, `g⁺`, the per-component height differential, node maps,
//! limit graphs `u±` and the end growths of the glued surface.
//!
//! Vectors indexed `1..=m` are stored 0-based. `V` is the real subspace of
//! `ℂ^(m-1)` given by `z_(m-i) = conj(z_i)`.

mod level;

use num_traits::Zero;

pub use level::{level_curves, LevelCurve, LogPotential, LEVEL_RESOLUTION};

use crate::algebra::{PoleExpansion, RationalFunction};
use crate::forms::{MeromorphicForm, Point};
use crate::weierstrass::{ParametrizedSurface, WeierstrassData};
use crate::{Error, Result, C64};

/// Node radius used when none is given.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// Symmetry slice tolerance.
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Minus,
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neck {
    /// The node joining `q_n ∈ Σ` to `0 ∈ ℂ⁻`: `v⁻ v⁺ = t`.
    Top,
    /// A node joining `p_i⁻` to `p_i⁺`: `v⁻ v⁺ = t²`.
    Circle,
}

/// All parameters of one gluing step.
#[derive(Debug, Clone)]
pub struct GluingConfiguration {
    pub m: usize,
    pub t: f64,
    pub epsilon: f64,
    /// `β_0⁻, …, β_m⁻`.
    pub beta_minus: Vec<C64>,
    pub beta_plus: Vec<C64>,
    pub p_minus: Vec<C64>,
    pub p_plus: Vec<C64>,
    pub gamma: Vec<C64>,
    /// Growths `c_1, …, c_(n-1)` of the ends of the base below the top end.
    pub c: Vec<f64>,
    pub alpha: Vec<f64>,
    pub base: WeierstrassData,
}

/// `ω^k` with `ω = e^(2πi/m)`.
pub fn root_of_unity(m: usize, k: i64) -> C64 {
    C64::from_polar(1.0, std::f64::consts::TAU * k as f64 / m as f64)
}

/// `(ω^(s·1), …, ω^(s·m))` with conjugate pairs and real entries made exact.
pub fn symmetric_roots_of_unity(m: usize, s: i64) -> Vec<C64> {
    let mut v: Vec<C64> = (1..=m as i64).map(|i| root_of_unity(m, s * i)).collect();
    for k in 0..(m - 1) / 2 {
        v[m - 2 - k] = v[k].conj();
    }
    if m % 2 == 0 {
        v[m / 2 - 1] = C64::new(-1.0, 0.0);
    }
    v[m - 1] = C64::new(1.0, 0.0);
    v
}

/// Whether `v` (length `m`) lies in `V × ℝ`.
pub fn in_v_times_r(v: &[C64], tol: f64) -> bool {
    let m = v.len();
    if m == 0 {
        return false;
    }
    let last_real = v[m - 1].im.abs() <= tol * (1.0 + v[m - 1].norm());
    last_real && in_v(&v[..m - 1], tol)
}

/// Whether `v` (length `m-1`) lies in `V`.
pub fn in_v(v: &[C64], tol: f64) -> bool {
    let n = v.len();
    (0..n).all(|i| (v[n - 1 - i] - v[i].conj()).norm() <= tol * (1.0 + v[i].norm()))
}

/// Central configuration over the unit catenoid.
pub fn central_configuration(m: usize) -> Result<GluingConfiguration> {
    if m < 2 {
        return Err(Error::Precondition(format!("m must be at least 2, got {m}")));
    }
    let g = C64::new(1.0 / (m as f64 - 1.0), 0.0);
    let mut beta_minus = vec![C64::new(-1.0, 0.0)];
    beta_minus.extend(std::iter::repeat(g).take(m));
    let cfg = GluingConfiguration {
        m,
        t: 0.0,
        epsilon: DEFAULT_EPSILON,
        beta_minus,
        beta_plus: vec![g; m],
        p_minus: symmetric_roots_of_unity(m, 1),
        p_plus: symmetric_roots_of_unity(m, -1),
        gamma: vec![g; m],
        c: vec![-1.0],
        alpha: Vec::new(),
        base: WeierstrassData::catenoid_top_at_origin(),
    };
    cfg.validate()?;
    Ok(cfg)
}

impl GluingConfiguration {
    pub fn validate(&self) -> Result<()> {
        let m = self.m;
        if m < 2 {
            return Err(Error::Precondition(format!("m must be at least 2, got {m}")));
        }
        let lens = [
            ("beta_minus", self.beta_minus.len(), m + 1),
            ("beta_plus", self.beta_plus.len(), m),
            ("p_minus", self.p_minus.len(), m),
            ("p_plus", self.p_plus.len(), m),
            ("gamma", self.gamma.len(), m),
        ];
        for (name, got, want) in lens {
            if got != want {
                return Err(Error::DegenerateConfiguration(format!("{name} has length {got}, expected {want}")));
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Precondition(format!("epsilon {} must lie in (0, 1)", self.epsilon)));
        }
        if !(self.t >= 0.0 && self.t < self.epsilon * self.epsilon) {
            return Err(Error::Precondition(format!("t {} must lie in [0, epsilon²)", self.t)));
        }
        let b0 = self.beta_minus[0];
        let bm = self.beta_minus[m];
        let sym = b0.im.abs() <= SYMMETRY_TOL
            && bm.im.abs() <= SYMMETRY_TOL
            && in_v(&self.beta_minus[1..m], SYMMETRY_TOL)
            && in_v_times_r(&self.beta_plus, SYMMETRY_TOL)
            && in_v_times_r(&self.p_plus, SYMMETRY_TOL)
            && in_v_times_r(&self.p_minus, SYMMETRY_TOL)
            && in_v_times_r(&self.gamma, SYMMETRY_TOL);
        if !sym {
            return Err(Error::DegenerateConfiguration("parameters leave the symmetry slice".into()));
        }
        for (name, p) in [("p_minus", &self.p_minus), ("p_plus", &self.p_plus)] {
            for (i, a) in p.iter().enumerate() {
                if a.norm() <= SYMMETRY_TOL {
                    return Err(Error::DegenerateConfiguration(format!("{name}[{i}] is zero")));
                }
                for b in &p[i + 1..] {
                    if (a - b).norm() <= 1e-10 {
                        return Err(Error::DegenerateConfiguration(format!("{name} has coincident points at {a}")));
                    }
                }
            }
        }
        if self.beta_minus.iter().chain(&self.beta_plus).any(|b| b.is_zero()) {
            return Err(Error::DegenerateConfiguration("a β coefficient is zero".into()));
        }
        Ok(())
    }

    pub fn sum_c(&self) -> f64 {
        self.c.iter().sum()
    }

    /// `u±` weights: `(singularity, coefficient of log|z - s|)`.
    pub fn limit_potential(&self, side: Side) -> LogPotential {
        match side {
            Side::Plus => LogPotential::new(
                self.p_plus
                    .iter()
                    .zip(&self.gamma)
                    .map(|(&p, g)| (p, g.re))
                    .collect(),
            ),
            Side::Minus => {
                let mut terms = vec![(C64::zero(), self.sum_c())];
                terms.extend(self.p_minus.iter().zip(&self.gamma).map(|(&p, g)| (p, g.re)));
                LogPotential::new(terms)
            }
        }
    }
}

/// The Gauss maps and the `t = 0` height differential on each component.
#[derive(Debug, Clone)]
pub struct GluedComponents {
    pub g_minus: RationalFunction,
    pub g_plus: RationalFunction,
    pub g_minus_expansion: PoleExpansion,
    pub g_plus_expansion: PoleExpansion,
    pub phi3_sigma: MeromorphicForm,
    pub phi3_minus: MeromorphicForm,
    pub phi3_plus: MeromorphicForm,
}

pub fn build_components(cfg: &GluingConfiguration) -> Result<GluedComponents> {
    cfg.validate()?;
    let m = cfg.m;
    let mut gm = vec![(C64::zero(), cfg.beta_minus[0])];
    gm.extend((0..m).map(|i| (cfg.p_minus[i], cfg.beta_minus[i + 1])));
    let g_minus_expansion = PoleExpansion::simple_poles(&gm);
    let gp: Vec<(C64, C64)> = (0..m).map(|i| (cfg.p_plus[i], cfg.beta_plus[i])).collect();
    let g_plus_expansion = PoleExpansion::simple_poles(&gp);
    let to_reduced = |e: &PoleExpansion| -> Result<RationalFunction> {
        let r = e.to_rational();
        RationalFunction::new(r.numerator().clone(), r.denominator().clone())
    };
    let mut pm = vec![(C64::zero(), C64::new(-cfg.sum_c(), 0.0))];
    pm.extend((0..m).map(|i| (cfg.p_minus[i], -cfg.gamma[i])));
    let pp: Vec<(C64, C64)> = (0..m).map(|i| (cfg.p_plus[i], cfg.gamma[i])).collect();
    Ok(GluedComponents {
        g_minus: to_reduced(&g_minus_expansion)?,
        g_plus: to_reduced(&g_plus_expansion)?,
        g_minus_expansion,
        g_plus_expansion,
        phi3_sigma: cfg.base.height_differential.clone(),
        phi3_minus: MeromorphicForm::simple_poles(&pm),
        phi3_plus: MeromorphicForm::simple_poles(&pp),
    })
}

/// Largest violation of opposite residues across the nodes.
pub fn node_residue_mismatch(cfg: &GluingConfiguration, comps: &GluedComponents) -> Result<f64> {
    let top = comps.phi3_sigma.residue_at(Point::Finite(C64::zero()))?
        + comps.phi3_minus.residue_at(Point::Finite(C64::zero()))?;
    let mut worst = top.norm();
    for i in 0..cfg.m {
        let r = comps.phi3_minus.residue_at(Point::Finite(cfg.p_minus[i]))?
            + comps.phi3_plus.residue_at(Point::Finite(cfg.p_plus[i]))?;
        worst = worst.max(r.norm());
    }
    Ok(worst)
}

/// Closed forms of the central Gauss maps.
pub fn central_g_minus_closed_form(m: usize, z: C64) -> C64 {
    -z.inv() + central_g_plus_closed_form(m, z)
}

pub fn central_g_plus_closed_form(m: usize, z: C64) -> C64 {
    let mf = m as f64;
    z.powu(m as u32 - 1) * mf / ((z.powu(m as u32) - 1.0) * (mf - 1.0))
}

/// Node coordinate change `v -> t/v` (top node) or `v -> t²/v` (circle node).
pub fn node_transition(v: C64, t: f64, neck: Neck, epsilon: f64) -> Result<C64> {
    if !(t > 0.0) {
        return Err(Error::Precondition(format!("t must be positive, got {t}")));
    }
    let product = match neck {
        Neck::Top => t,
        Neck::Circle => t * t,
    };
    let inner = product / epsilon;
    let r = v.norm();
    let slack = 1e-12 * epsilon;
    if v.is_zero() || r < inner - slack || r > epsilon + slack {
        return Err(Error::OutOfGluingRegion {
            v,
            inner,
            outer: epsilon,
        });
    }
    Ok(C64::new(product, 0.0) / v)
}

/// `u+(z) = Σ γ_i log|z - p_i⁺|`, `u-(z) = Σc log|z| + Σ γ_i log|z - p_i⁻|`.
///
/// The height of the limit surface on `ℂ⁻` is `-u-`.
pub fn limit_graph(cfg: &GluingConfiguration, side: Side, z: C64) -> Result<f64> {
    cfg.limit_potential(side).value(z)
}

/// Graph of `u±` over the plane, with the curvature of the graph.
#[derive(Debug, Clone)]
pub struct LimitGraph {
    pub potential: LogPotential,
}

impl LimitGraph {
    pub fn new(cfg: &GluingConfiguration, side: Side) -> Self {
        LimitGraph {
            potential: cfg.limit_potential(side),
        }
    }
}

impl ParametrizedSurface for LimitGraph {
    fn point(&self, z: C64) -> Result<[f64; 3]> {
        Ok([z.re, z.im, self.potential.value(z)?])
    }

    fn curvature(&self, z: C64) -> Result<f64> {
        // graph of a harmonic u: K = -|F'|² / (1 + |F|²)² with F = u_x - i u_y
        let f = self.potential.gradient(z);
        let df = self.potential.gradient_derivative(z);
        Ok(-df.norm_sqr() / (1.0 + f.norm_sqr()).powi(2))
    }

    fn singularities(&self) -> Vec<C64> {
        self.potential.terms.iter().map(|t| t.0).collect()
    }
}

/// `(-Res φ3 at q_1..q_(n-1), -Res at ∞⁻, -Res at ∞⁺)`.
pub fn growth_vector(cfg: &GluingConfiguration) -> Result<Vec<f64>> {
    let comps = build_components(cfg)?;
    let base_ends = &cfg.base.punctures;
    let mut out = Vec::with_capacity(base_ends.len() + 1);
    for &q in &base_ends[..base_ends.len() - 1] {
        out.push(-comps.phi3_sigma.residue_at(q)?.re);
    }
    out.push(-comps.phi3_minus.residue_at(Point::Infinity)?.re);
    out.push(-comps.phi3_plus.residue_at(Point::Infinity)?.re);
    Ok(out)
}
