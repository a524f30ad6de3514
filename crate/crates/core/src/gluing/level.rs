use std::f64::consts::{PI, TAU};

use num_traits::Zero;

use super::{GluingConfiguration, Side};
use crate::algebra::{raw_roots, Polynomial};
use crate::{Error, Result, C64};

/// Cells per direction in each chart.
pub const LEVEL_RESOLUTION: usize = 512;

const SINGULAR_TOL: f64 = 1e-12;
const CRITICAL_TOL: f64 = 1e-9;
const CONVEXITY_TOL: f64 = 1e-3;

/// `U(z) = Σ a_k log|z - s_k|`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogPotential {
    pub terms: Vec<(C64, f64)>,
}

impl LogPotential {
    /// Merges repeated singularities and drops zero weights.
    pub fn new(terms: Vec<(C64, f64)>) -> Self {
        let mut merged: Vec<(C64, f64)> = Vec::new();
        for (s, a) in terms {
            match merged.iter_mut().find(|(p, _)| (p - s).norm() <= SINGULAR_TOL * (1.0 + s.norm())) {
                Some(t) => t.1 += a,
                None => merged.push((s, a)),
            }
        }
        merged.retain(|t| t.1 != 0.0);
        LogPotential { terms: merged }
    }

    pub fn negated(&self) -> Self {
        LogPotential {
            terms: self.terms.iter().map(|&(s, a)| (s, -a)).collect(),
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|t| t.1).sum()
    }

    pub fn value(&self, z: C64) -> Result<f64> {
        for &(s, _) in &self.terms {
            if (z - s).norm() <= SINGULAR_TOL * (1.0 + s.norm()) {
                return Err(Error::SingularPoint(format!("log singularity at {s}")));
            }
        }
        Ok(self.raw_value(z))
    }

    fn raw_value(&self, z: C64) -> f64 {
        self.terms.iter().map(|&(s, a)| a * (z - s).norm().ln()).sum()
    }

    /// `U_x - i U_y = Σ a_k / (z - s_k)`.
    pub fn gradient(&self, z: C64) -> C64 {
        self.terms.iter().map(|&(s, a)| a / (z - s)).sum()
    }

    pub fn gradient_derivative(&self, z: C64) -> C64 {
        self.terms.iter().map(|&(s, a)| -a / ((z - s) * (z - s))).sum()
    }

    /// Zeros of the gradient.
    pub fn critical_points(&self) -> Result<Vec<C64>> {
        let mut num = Polynomial::zero();
        for (k, &(_, a)) in self.terms.iter().enumerate() {
            let others: Vec<C64> = self
                .terms
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, t)| t.0)
                .collect();
            num = &num + &Polynomial::from_roots(&others).scale(C64::new(a, 0.0));
        }
        let num = num.trimmed(1e-14);
        if num.degree() < 1 {
            return Ok(Vec::new());
        }
        raw_roots(&num)
    }

    pub fn critical_values(&self) -> Result<Vec<f64>> {
        Ok(self
            .critical_points()?
            .into_iter()
            .filter_map(|c| self.value(c).ok())
            .collect())
    }
}

/// A closed component of a level set.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelCurve {
    /// Counter-clockwise vertices on the curve; the last joins the first.
    pub points: Vec<C64>,
    pub convex: bool,
    /// Sum of the positive turning angles.
    pub total_turning: f64,
    /// Sum of the magnitudes of the negative turning angles.
    pub negative_turning: f64,
}

impl LevelCurve {
    fn new(mut points: Vec<C64>) -> Self {
        if signed_area(&points) < 0.0 {
            points.reverse();
        }
        let n = points.len();
        let (mut pos, mut neg) = (0.0, 0.0);
        for k in 0..n {
            let a = points[(k + n - 1) % n];
            let b = points[k];
            let c = points[(k + 1) % n];
            let turn = ((c - b) / (b - a)).arg();
            if turn >= 0.0 {
                pos += turn;
            } else {
                neg -= turn;
            }
        }
        LevelCurve {
            points,
            convex: neg < CONVEXITY_TOL * pos,
            total_turning: pos,
            negative_turning: neg,
        }
    }

    /// Winding number of the curve around `z` is non-zero.
    pub fn encloses(&self, z: C64) -> bool {
        let n = self.points.len();
        let w: f64 = (0..n)
            .map(|k| ((self.points[(k + 1) % n] - z) / (self.points[k] - z)).arg())
            .sum();
        (w / TAU).round() != 0.0
    }

    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bbox();
        (hi - lo).norm()
    }

    fn bbox(&self) -> (C64, C64) {
        let mut lo = C64::new(f64::INFINITY, f64::INFINITY);
        let mut hi = C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.points {
            lo = C64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = C64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        (lo, hi)
    }

    fn same_as(&self, other: &LevelCurve) -> bool {
        let (a0, a1) = self.bbox();
        let (b0, b1) = other.bbox();
        let tol = 1e-3 * self.diameter().max(other.diameter());
        (a0 - b0).norm() <= tol && (a1 - b1).norm() <= tol
    }
}

fn signed_area(p: &[C64]) -> f64 {
    let n = p.len();
    0.5 * (0..n)
        .map(|k| {
            let (a, b) = (p[k], p[(k + 1) % n]);
            a.re * b.im - a.im * b.re
        })
        .sum::<f64>()
}

/// Components of `{x3 = height}` on the limit graph of the given side.
///
/// On `ℂ⁺` the height is `u+`; on `ℂ⁻` it is `-u-`. Components are sorted by
/// their leftmost point.
pub fn level_curves(cfg: &GluingConfiguration, side: Side, height: f64, resolution: usize) -> Result<Vec<LevelCurve>> {
    let pot = cfg.limit_potential(side);
    let pot = match side {
        Side::Plus => pot,
        Side::Minus => pot.negated(),
    };
    level_curves_of(&pot, height, resolution)
}

/// Closed components of `{U = height}`.
///
/// Every component encloses a singularity. The level set is traced by marching
/// squares in log-polar charts: one around each singularity and one around
/// the origin reaching past every singularity. Only loops winding once around
/// the chart centre are kept; vertices are then projected onto the level set
/// by Newton steps along the gradient.
pub fn level_curves_of(pot: &LogPotential, height: f64, resolution: usize) -> Result<Vec<LevelCurve>> {
    if !height.is_finite() {
        return Err(Error::Precondition(format!("height {height} is not finite")));
    }
    if resolution < 8 {
        return Err(Error::Precondition(format!("resolution {resolution} is below 8")));
    }
    if pot.terms.is_empty() {
        return Ok(Vec::new());
    }
    for cv in pot.critical_values()? {
        let distance = (height - cv).abs();
        if distance <= CRITICAL_TOL * (1.0 + cv.abs()) {
            return Err(Error::CriticalLevel {
                height,
                critical: cv,
                distance,
            });
        }
    }
    let mut found: Vec<LevelCurve> = Vec::new();
    for (center, r_min, r_max) in charts(pot, height) {
        for loop_pts in trace_chart(pot, height, center, r_min, r_max, resolution) {
            let projected = project(pot, height, loop_pts)?;
            if projected.len() < 3 {
                continue;
            }
            let curve = LevelCurve::new(projected);
            if !found.iter().any(|c| c.same_as(&curve)) {
                found.push(curve);
            }
        }
    }
    let leftmost = |c: &LevelCurve| c.points.iter().map(|p| p.re).fold(f64::INFINITY, f64::min);
    found.sort_by(|a, b| leftmost(a).total_cmp(&leftmost(b)));
    Ok(found)
}

/// Log radius clamped to a usable range.
fn clamp_log(x: f64) -> f64 {
    x.clamp(-600.0, 300.0)
}

fn charts(pot: &LogPotential, h: f64) -> Vec<(C64, f64, f64)> {
    let n = pot.terms.len();
    let mut out = Vec::new();
    let max_mod = pot.terms.iter().map(|t| t.0.norm()).fold(0.0, f64::max);
    let mut near_scale = f64::INFINITY;
    for k in 0..n {
        let (s, a) = pot.terms[k];
        let sep = (0..n)
            .filter(|&j| j != k)
            .map(|j| (pot.terms[j].0 - s).norm())
            .fold(f64::INFINITY, f64::min);
        let b: f64 = (0..n)
            .filter(|&j| j != k)
            .map(|j| pot.terms[j].1 * (pot.terms[j].0 - s).norm().ln())
            .sum();
        // U ≈ a log r + b near s
        let log_est = clamp_log((h - b) / a);
        let r_max = if sep.is_finite() { 0.45 * sep } else { 4.0 * log_est.exp().max(1.0) };
        let log_min = (log_est - 1.4).min(r_max.ln() - 7.0);
        out.push((s, clamp_log(log_min).exp(), r_max));
        if s.norm() > SINGULAR_TOL {
            near_scale = near_scale.min(s.norm());
        } else {
            near_scale = near_scale.min(clamp_log(log_min).exp() * 1e3);
        }
    }
    let total = pot.total_weight();
    let mut log_max = (4.0 * max_mod).max(1.0).ln();
    if total != 0.0 {
        log_max = log_max.max(clamp_log(h / total) + 1.4);
    }
    let origin_singular = pot.terms.iter().any(|t| t.0.norm() <= SINGULAR_TOL);
    let r_min = if origin_singular {
        out.iter().find(|c| c.0.norm() <= SINGULAR_TOL).map(|c| c.1).unwrap_or(1e-3)
    } else {
        1e-3 * near_scale
    };
    out.push((C64::zero(), r_min, clamp_log(log_max).exp()));
    out
}

/// Closed marching-squares loops in the chart `z = center + e^(ρ + iθ)` that
/// wind once around the centre.
fn trace_chart(pot: &LogPotential, h: f64, center: C64, r_min: f64, r_max: f64, n: usize) -> Vec<Vec<C64>> {
    let nr = n;
    let nt = n;
    let (rho0, rho1) = (r_min.ln(), r_max.ln());
    let drho = (rho1 - rho0) / nr as f64;
    let dth = TAU / nt as f64;
    let rho = |i: usize| rho0 + drho * i as f64;
    let th = |j: usize| dth * (j as f64 + 0.5);
    let at = |r: f64, t: f64| center + C64::from_polar(r.exp(), t);
    let mut vals = vec![0.0; (nr + 1) * nt];
    for i in 0..=nr {
        for j in 0..nt {
            let v = pot.raw_value(at(rho(i), th(j))) - h;
            vals[i * nt + j] = if v.is_nan() { 0.0 } else { v.clamp(-1e300, 1e300) };
        }
    }
    let val = |i: usize, j: usize| vals[i * nt + j % nt];
    let pos = |i: usize, j: usize| val(i, j) >= 0.0;
    // edge ids: radial (i,j)-(i+1,j) then angular (i,j)-(i,j+1)
    let radial = |i: usize, j: usize| i * nt + j % nt;
    let angular = |i: usize, j: usize| nr * nt + i * nt + j % nt;
    let n_edges = nr * nt + (nr + 1) * nt;
    let mut coord = vec![(0.0, 0.0); n_edges];
    let mut links: Vec<Vec<usize>> = vec![Vec::new(); n_edges];
    let cross = |v0: f64, v1: f64| v0 / (v0 - v1);
    for i in 0..nr {
        for j in 0..nt {
            if pos(i, j) != pos(i + 1, j) {
                let f = cross(val(i, j), val(i + 1, j));
                coord[radial(i, j)] = (rho(i) + f * drho, th(j));
            }
        }
    }
    for i in 0..=nr {
        for j in 0..nt {
            if pos(i, j) != pos(i, j + 1) {
                let f = cross(val(i, j), val(i, j + 1));
                coord[angular(i, j)] = (rho(i), th(j) + f * dth);
            }
        }
    }
    let mut link = |a: usize, b: usize| {
        links[a].push(b);
        links[b].push(a);
    };
    for i in 0..nr {
        for j in 0..nt {
            let (pa, pb, pc, pd) = (pos(i, j), pos(i + 1, j), pos(i + 1, j + 1), pos(i, j + 1));
            let bottom = radial(i, j);
            let right = angular(i + 1, j);
            let top = radial(i, j + 1);
            let left = angular(i, j);
            let edges: Vec<usize> = [(bottom, pa != pb), (right, pb != pc), (top, pd != pc), (left, pa != pd)]
                .iter()
                .filter(|e| e.1)
                .map(|e| e.0)
                .collect();
            match edges.len() {
                2 => link(edges[0], edges[1]),
                4 => {
                    let mid = 0.25 * (val(i, j) + val(i + 1, j) + val(i + 1, j + 1) + val(i, j + 1));
                    if (mid >= 0.0) == pa {
                        link(bottom, right);
                        link(top, left);
                    } else {
                        link(bottom, left);
                        link(right, top);
                    }
                }
                _ => {}
            }
        }
    }
    let mut seen = vec![false; n_edges];
    let mut loops = Vec::new();
    for start in 0..n_edges {
        if seen[start] || links[start].len() != 2 {
            continue;
        }
        let mut chain = vec![start];
        seen[start] = true;
        let (mut prev, mut cur) = (start, links[start][0]);
        let mut closed = false;
        loop {
            if cur == start {
                closed = true;
                break;
            }
            if seen[cur] {
                break;
            }
            seen[cur] = true;
            chain.push(cur);
            let next = links[cur].iter().copied().find(|&e| e != prev);
            match next {
                Some(e) if links[cur].len() == 2 => {
                    prev = cur;
                    cur = e;
                }
                _ => break,
            }
        }
        if !closed {
            continue;
        }
        let mut turns = 0.0;
        for k in 0..chain.len() {
            let a = coord[chain[k]].1;
            let b = coord[chain[(k + 1) % chain.len()]].1;
            let mut d = b - a;
            if d > PI {
                d -= TAU;
            } else if d < -PI {
                d += TAU;
            }
            turns += d;
        }
        if (turns / TAU).round().abs() == 1.0 {
            loops.push(chain.iter().map(|&e| at(coord[e].0, coord[e].1)).collect());
        }
    }
    loops
}

/// Newton steps `z <- z - (U - h) / F(z)` and removal of repeated vertices.
fn project(pot: &LogPotential, h: f64, pts: Vec<C64>) -> Result<Vec<C64>> {
    let tol = 1e-13 * (1.0 + h.abs());
    let mut out: Vec<C64> = Vec::with_capacity(pts.len());
    for mut z in pts {
        let mut r = pot.raw_value(z) - h;
        for _ in 0..30 {
            if r.abs() <= tol {
                break;
            }
            let f = pot.gradient(z);
            if f.is_zero() || !f.is_finite() {
                break;
            }
            let next = z - r / f;
            let rn = pot.raw_value(next) - h;
            if !(rn.abs() < r.abs()) {
                break;
            }
            z = next;
            r = rn;
        }
        if !(r.abs() <= 1e3 * tol) {
            return Err(Error::NumericFailure {
                what: format!("projection onto the level {h} stalled at {z}"),
                best_residual: r.abs(),
            });
        }
        out.push(z);
    }
    let scale = out.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let mut dedup: Vec<C64> = Vec::with_capacity(out.len());
    for z in out {
        if dedup.last().is_none_or(|&p| (p - z).norm() > 1e-12 * scale) {
            dedup.push(z);
        }
    }
    while dedup.len() > 1 && (dedup[0] - dedup[dedup.len() - 1]).norm() <= 1e-12 * scale {
        dedup.pop();
    }
    Ok(dedup)
}
