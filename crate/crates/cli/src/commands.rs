use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use minsurf_core::equations::{full_residual, ParameterVector};
use minsurf_core::forms::residue_theorem_defect;
use minsurf_core::gluing::{
    build_components, central_configuration, central_g_minus_closed_form, growth_vector, node_residue_mismatch,
    LimitGraph, Side,
};
use minsurf_core::hurwitz::{
    branching_profile, cubic, f_t, g_t, isomorphic_profiles, marked_equal, same_branching_values, CoveringLocalModel,
};
use minsurf_core::jacobian::{jacobian_at_central, JacobianSettings};
use minsurf_core::tower::{asymptotics, Schedule};
use minsurf_core::weierstrass::{mesh_surface, SamplingGrid, SurfaceMesh, WeierstrassData};
use minsurf_core::{c64, C64};
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::report::Report;

pub const CENTRAL_M_MAX: usize = 24;
pub const LEMMA_M_MAX: usize = 8;
pub const DEFAULT_STEPS: usize = 10;
/// Steps above this are flagged as too coarse for the Jacobian.
const COARSE_STEP: f64 = 1e-4;

fn config(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

/// Writes the meshes as separate OBJ objects with a shared vertex numbering.
pub fn write_obj(path: &Path, pieces: &[(&str, &SurfaceMesh)]) -> Result<()> {
    let mut s = String::new();
    let mut offset = 1;
    for (name, mesh) in pieces {
        let _ = writeln!(s, "o {name}");
        for v in &mesh.vertices {
            let _ = writeln!(s, "v {} {} {}", v[0], v[1], v[2]);
        }
        for f in &mesh.faces {
            let _ = writeln!(s, "f {} {} {}", f[0] + offset, f[1] + offset, f[2] + offset);
        }
        offset += mesh.vertices.len();
    }
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))?;
    let mut csv = String::from("object,index,gauss_curvature,height\n");
    for (name, mesh) in pieces {
        for (i, (k, h)) in mesh.gauss_curvature.iter().zip(&mesh.height).enumerate() {
            let _ = writeln!(csv, "{name},{i},{k},{h}");
        }
    }
    let csv_path = path.with_extension("csv");
    std::fs::write(&csv_path, csv).with_context(|| format!("writing {}", csv_path.display()))
}

fn graph_meshes(m: usize, grid: usize) -> Result<(SurfaceMesh, SurfaceMesh)> {
    let cfg = central_configuration(m)?;
    let g = SamplingGrid::annulus(1.25, 3.0, grid, grid);
    let plus = mesh_surface(&LimitGraph::new(&cfg, Side::Plus), &g)?;
    let mut minus = mesh_surface(&LimitGraph::new(&cfg, Side::Minus), &g)?;
    for v in &mut minus.vertices {
        v[2] = -v[2];
    }
    for h in &mut minus.height {
        *h = -*h;
    }
    Ok((plus, minus))
}

pub fn central(m: usize, tol: f64, grid: usize, mesh: Option<&Path>) -> Result<Report> {
    if !(2..=CENTRAL_M_MAX).contains(&m) {
        bail!("m must lie in 2..={CENTRAL_M_MAX}, got {m}");
    }
    let mut r = Report::new(
        "central",
        config(&[("m", json!(m)), ("tol", json!(tol)), ("grid", json!(grid)), ("mesh", json!(mesh.map(|p| p.display().to_string())))]),
    );
    let x = ParameterVector::central(m)?;
    let res = full_residual(&x)?;
    r.small("full residual", res.max_abs(), tol);
    for (name, v) in res.block_max() {
        r.small(&format!("residual block {name}"), v, tol);
    }
    let cfg = x.to_configuration()?;
    let comps = build_components(&cfg)?;
    r.small("node residue mismatch", node_residue_mismatch(&cfg, &comps)?, 1e-10);
    r.small("residue sum on C-", residue_theorem_defect(&comps.phi3_minus), 1e-10);
    r.small("residue sum on C+", residue_theorem_defect(&comps.phi3_plus), 1e-10);
    let g = growth_vector(&cfg)?;
    r.small("growth sum", g.iter().sum::<f64>().abs(), 1e-10);
    r.exact("growths increasing", true, g.windows(2).all(|w| w[0] < w[1]));
    let mut closed: f64 = 0.0;
    for k in 0..16 {
        let z = C64::from_polar(if k % 2 == 0 { 0.6 } else { 1.7 }, 0.3 + 0.7 * k as f64);
        let (a, b) = (comps.g_minus.eval(z), central_g_minus_closed_form(m, z));
        closed = closed.max((a - b).norm() / b.norm().max(1.0));
    }
    r.small("g- closed form", closed, 1e-10);
    r.data.insert("growth_vector".into(), json!(g));
    if let Some(path) = mesh {
        let (plus, minus) = graph_meshes(m, grid)?;
        write_obj(path, &[("u_plus", &plus), ("u_minus", &minus)])?;
        r.note(format!("wrote {} vertices to {}", plus.vertices.len() + minus.vertices.len(), path.display()));
    }
    Ok(r)
}

pub fn lemma1(m: usize, step: f64) -> Result<Report> {
    if !(2..=LEMMA_M_MAX).contains(&m) {
        bail!("m must lie in 2..={LEMMA_M_MAX}, got {m}");
    }
    if !(step > 0.0 && step < 1.0) {
        bail!("step must lie in (0, 1), got {step}");
    }
    let settings = JacobianSettings { step, m_cap: LEMMA_M_MAX, ..Default::default() };
    let mut r = Report::new("lemma1", config(&[("m", json!(m)), ("step", json!(step))]));
    if step > COARSE_STEP {
        r.note(format!("warning: step {step:e} is coarse; finite differences may not be consistent"));
    }
    let j = jacobian_at_central(m, &settings)?;
    for b in &j.blocks {
        r.checks.push(crate::report::Check {
            name: format!("block {}", b.block_name),
            expected: b.expected.map_or(json!("full rank"), |e| json!(e)),
            actual: json!({
                "smallest_singular_value": b.smallest_singular_value,
                "largest_offblock_entry": b.largest_offblock_entry,
            }),
            tol: Some(settings.offblock_tol),
            pass: b.pass,
        });
    }
    r.exact("rank", json!(j.jacobian.nrows()), json!(j.rank));
    r.exact("kernel dimension", json!(5), json!(j.kernel_dimension));
    for (name, d) in &j.gauge_defects {
        r.small(&format!("{name} in kernel"), *d, 1e-6);
    }
    r.exact("kernel spanned by scaling and symmetries", json!(j.kernel_dimension), json!(j.gauge_rank));
    if j.halving_change > 1e-5 {
        r.note(format!("warning: columns change by {:e} relative under step halving", j.halving_change));
    }
    r.data.insert("shape".into(), json!([j.jacobian.nrows(), j.jacobian.ncols()]));
    r.data.insert("singular_values".into(), json!(j.singular_values));
    r.data.insert("halving_change".into(), json!(j.halving_change));
    let blocks: Map<String, Value> = j
        .blocks
        .iter()
        .map(|b| {
            let sv: Vec<f64> = b.matrix.clone().singular_values().iter().copied().collect();
            (b.block_name.clone(), json!(sv))
        })
        .collect();
    r.data.insert("block_singular_values".into(), Value::Object(blocks));
    Ok(r)
}

pub fn tower(schedule: &str, steps: Option<usize>, csv: Option<&Path>) -> Result<Report> {
    let s = Schedule::parse(schedule, steps.unwrap_or(DEFAULT_STEPS))?;
    let last = steps.unwrap_or(s.last_index());
    let mut r = Report::new(
        "tower",
        config(&[("schedule", json!(schedule)), ("steps", json!(last)), ("out", json!(csv.map(|p| p.display().to_string())))]),
    );
    let report = minsurf_core::tower::validate_schedule(&s)?;
    r.exact("m_n >= 2n-1", true, report.lower_bound_holds);
    let a = asymptotics(&s, last)?;
    r.checks.push(crate::report::Check {
        name: "c_n(S_n)/sqrt(n) bounded".into(),
        expected: json!(a.sqrt_constant),
        actual: json!(a.max_sqrt_ratio),
        tol: None,
        pass: a.sqrt_bound_holds,
    });
    r.exact("curvature certificate exceeds n-1", true, a.certificate_exceeds_n_minus_1);
    if report.is_minimal && last >= 5 {
        let c5 = a.rows.iter().find(|row| row.n == 5).expect("row 5 exists");
        r.exact("c_5(S_5)", json!("35/16"), json!(c5.top_growth.to_string()));
    }
    r.data.insert("series".into(), json!(a.series.to_string()));
    r.data.insert("tail_ratio".into(), json!(a.tail_ratio));
    r.data.insert("decay_exponent".into(), json!(a.decay_exponent));
    r.data.insert("partial_sum".into(), json!(a.rows.last().map(|row| row.partial_sum)));
    r.note(format!("series of limit growths: {}", a.series));
    r.note("growths are the exact t = 0 limit values");
    if let Some(path) = csv {
        let mut out = String::from("n,m,c_n_exact,c_n,sqrt_ratio,curvature_certificate,limit_growth,partial_sum\n");
        for row in &a.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                row.n,
                row.m,
                row.top_growth,
                row.top_growth.to_f64().unwrap_or(f64::NAN),
                row.sqrt_ratio,
                row.curvature_certificate,
                row.limit_growth,
                row.partial_sum
            );
        }
        std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(r)
}

pub fn hurwitz(t: f64) -> Result<Report> {
    if !(t > 0.0 && t <= 0.5) {
        bail!("t must lie in (0, 0.5], got {t}");
    }
    let mut r = Report::new("hurwitz", config(&[("t", json!(t))]));
    let (f, g) = (f_t(t), g_t(t));
    r.exact("f_t and g_t have the same branching values", true, same_branching_values(&f, &g, 1e-10)?);
    r.exact("f_t and g_t have isomorphic profiles", false, isomorphic_profiles(&f, &g)?);
    let prof = branching_profile(&f)?;
    let mut values: Vec<f64> = prof.values_expanded().iter().map(|z| z.re).collect();
    values.sort_by(f64::total_cmp);
    let want = [-27.0 * t.powi(4), 0.0, 0.0];
    let dev = values.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    r.small("critical values of f_t are {0, 0, -27t^4}", dev, 1e-10);
    let j = C64::from_polar(1.0, std::f64::consts::TAU / 3.0);
    r.exact("z^3 + tz and z^3 + tjz have isomorphic profiles", true, isomorphic_profiles(&cubic(c64(t, 0.0)), &cubic(t * j))?);
    let zero = c64(0.0, 0.0);
    let m1 = CoveringLocalModel::new(3, zero, vec![zero, c64(t, 0.0)])?;
    let m2 = CoveringLocalModel::new(3, zero, vec![zero, t * j])?;
    r.exact("z^3 + tz and z^3 + tjz are equal as marked coverings", false, marked_equal(&m1, &m2, 1e-9)?);
    r.data.insert("critical_values".into(), json!(values));
    r.note(format!("f_t(-3t) = -27t^4 = {}", -27.0 * t.powi(4)));
    Ok(r)
}

/// Catenoid mesh with the two limit graphs rescaled by `(x1, x2, x3) ↦ (-2t x1, -2t x2, x3)`.
/// Illustrative only: this is not a glued surface.
pub fn figure(m: usize, t: f64, grid: usize, out: &Path) -> Result<Report> {
    if !(2..=CENTRAL_M_MAX).contains(&m) {
        bail!("m must lie in 2..={CENTRAL_M_MAX}, got {m}");
    }
    if !(t > 0.0 && t < 1.0) {
        bail!("t must lie in (0, 1), got {t}");
    }
    let mut r = Report::new(
        "figure",
        config(&[("m", json!(m)), ("t", json!(t)), ("grid", json!(grid)), ("out", json!(out.display().to_string()))]),
    );
    let cat = mesh_surface(&WeierstrassData::catenoid(), &SamplingGrid::annulus(0.2, 5.0, grid, grid))?;
    let (mut plus, mut minus) = graph_meshes(m, grid)?;
    for mesh in [&mut plus, &mut minus] {
        for v in &mut mesh.vertices {
            v[0] *= -2.0 * t;
            v[1] *= -2.0 * t;
        }
    }
    write_obj(out, &[("catenoid", &cat), ("upper_graph", &plus), ("lower_graph", &minus)])?;
    r.exact("vertices written", json!(3 * grid * grid), json!(cat.vertices.len() + plus.vertices.len() + minus.vertices.len()));
    r.note("illustrative sketch: catenoid and rescaled limit graphs, not a true glued surface");
    Ok(r)
}
