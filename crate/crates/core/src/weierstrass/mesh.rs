use std::f64::consts::TAU;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::{Error, Result, C64};

/// Default distance kept between grid points and singularities.
pub const MESH_POLE_MARGIN: f64 = 0.05;

/// A surface given by a map from a planar domain.
pub trait ParametrizedSurface {
    fn point(&self, z: C64) -> Result<[f64; 3]>;
    fn curvature(&self, z: C64) -> Result<f64>;
    /// Points of the domain where the map is undefined.
    fn singularities(&self) -> Vec<C64>;
}

/// Sampling of the parameter domain.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplingGrid {
    /// `n_radial` radii spaced linearly in `[r_min, r_max]`, `n_angular`
    /// angles offset by half a step; wraps around in angle.
    Annular {
        center: C64,
        r_min: f64,
        r_max: f64,
        n_radial: usize,
        n_angular: usize,
    },
    /// `nx × ny` points on the closed rectangle spanned by two corners.
    Rectangular {
        min: C64,
        max: C64,
        nx: usize,
        ny: usize,
    },
}

impl SamplingGrid {
    pub fn annulus(r_min: f64, r_max: f64, n_radial: usize, n_angular: usize) -> Self {
        SamplingGrid::Annular {
            center: C64::new(0.0, 0.0),
            r_min,
            r_max,
            n_radial,
            n_angular,
        }
    }

    fn dims(&self) -> (usize, usize) {
        match self {
            SamplingGrid::Annular {
                n_radial, n_angular, ..
            } => (*n_radial, *n_angular),
            SamplingGrid::Rectangular { nx, ny, .. } => (*nx, *ny),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.dims();
        if a < 2 || b < 2 {
            return Err(Error::DegenerateInput(format!("grid must be at least 2x2, got {a}x{b}")));
        }
        if let SamplingGrid::Annular { r_min, r_max, .. } = self {
            if !(*r_min >= 0.0 && r_max > r_min) {
                return Err(Error::DegenerateInput(format!("bad annulus radii {r_min}..{r_max}")));
            }
        }
        Ok(())
    }

    /// Grid points in row-major order (outer index radial / x).
    pub fn points(&self) -> Vec<C64> {
        let (a, b) = self.dims();
        let mut out = Vec::with_capacity(a * b);
        match self {
            SamplingGrid::Annular {
                center,
                r_min,
                r_max,
                ..
            } => {
                for i in 0..a {
                    let r = r_min + (r_max - r_min) * i as f64 / (a - 1) as f64;
                    for j in 0..b {
                        let th = TAU * (j as f64 + 0.5) / b as f64;
                        out.push(center + C64::from_polar(r, th));
                    }
                }
            }
            SamplingGrid::Rectangular { min, max, .. } => {
                for i in 0..a {
                    let x = min.re + (max.re - min.re) * i as f64 / (a - 1) as f64;
                    for j in 0..b {
                        let y = min.im + (max.im - min.im) * j as f64 / (b - 1) as f64;
                        out.push(C64::new(x, y));
                    }
                }
            }
        }
        out
    }

    fn faces(&self) -> Vec<[usize; 3]> {
        let (a, b) = self.dims();
        let idx = |i: usize, j: usize| i * b + j;
        let mut out = Vec::new();
        let wraps = matches!(self, SamplingGrid::Annular { .. });
        let cols = if wraps { b } else { b - 1 };
        for i in 0..a - 1 {
            for j in 0..cols {
                let jn = (j + 1) % b;
                out.push([idx(i, j), idx(i + 1, j), idx(i + 1, jn)]);
                out.push([idx(i, j), idx(i + 1, jn), idx(i, jn)]);
            }
        }
        if !wraps {
            // a rectangular cell is split once; a 2x2 grid gives exactly two faces
            return out;
        }
        out
    }
}

/// Triangle mesh with per-vertex curvature and height channels.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    pub gauss_curvature: Vec<f64>,
    pub height: Vec<f64>,
    pub parameters: Vec<C64>,
}

fn triangle_area(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
    let w = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    0.5 * (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt()
}

impl SurfaceMesh {
    pub fn bbox_diagonal(&self) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (0..3).map(|k| (hi[k] - lo[k]).powi(2)).sum::<f64>().sqrt()
    }

    pub fn max_abs_curvature(&self) -> f64 {
        self.gauss_curvature.iter().map(|k| k.abs()).fold(0.0, f64::max)
    }

    /// Wavefront OBJ text: `v x y z` lines then 1-based `f a b c` lines.
    pub fn to_obj(&self, name: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "o {name}");
        for v in &self.vertices {
            let _ = writeln!(s, "v {} {} {}", v[0], v[1], v[2]);
        }
        for f in &self.faces {
            let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
        }
        s
    }

    /// `index,u,v,x,y,z,gauss_curvature,height` rows.
    pub fn channels_csv(&self) -> String {
        let mut s = String::from("index,u,v,x,y,z,gauss_curvature,height\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let p = self.parameters[i];
            let _ = writeln!(
                s,
                "{i},{},{},{},{},{},{},{}",
                p.re, p.im, v[0], v[1], v[2], self.gauss_curvature[i], self.height[i]
            );
        }
        s
    }
}

pub fn mesh_surface<S: ParametrizedSurface + Sync>(surface: &S, grid: &SamplingGrid) -> Result<SurfaceMesh> {
    mesh_surface_with_margin(surface, grid, MESH_POLE_MARGIN)
}

/// Samples `surface` on `grid`. Points are evaluated in parallel; vertex order
/// is the grid order. Faces with area below `1e-14 · bbox²` are dropped.
pub fn mesh_surface_with_margin<S: ParametrizedSurface + Sync>(
    surface: &S,
    grid: &SamplingGrid,
    margin: f64,
) -> Result<SurfaceMesh> {
    grid.validate()?;
    let params = grid.points();
    let singular = surface.singularities();
    for &z in &params {
        for &p in &singular {
            let distance = (z - p).norm();
            if distance < margin {
                return Err(Error::PathThroughPole {
                    point: p,
                    distance,
                    margin,
                });
            }
        }
    }
    let samples: Vec<Result<([f64; 3], f64)>> = params
        .par_iter()
        .map(|&z| Ok((surface.point(z)?, surface.curvature(z)?)))
        .collect();
    let mut vertices = Vec::with_capacity(params.len());
    let mut curvature = Vec::with_capacity(params.len());
    for s in samples {
        let (x, k) = s?;
        vertices.push(x);
        curvature.push(k);
    }
    let height = vertices.iter().map(|v| v[2]).collect();
    let mut mesh = SurfaceMesh {
        vertices,
        faces: Vec::new(),
        gauss_curvature: curvature,
        height,
        parameters: params,
    };
    let min_area = 1e-14 * mesh.bbox_diagonal().powi(2);
    mesh.faces = grid
        .faces()
        .into_iter()
        .filter(|f| triangle_area(mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]) > min_area)
        .collect();
    Ok(mesh)
}
