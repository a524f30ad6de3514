//! Construction and verification toolkit for minimal surfaces obtained by
//! gluing an extra catenoidal end (a plane and a ring of catenoidal necks) on
//! top of a non-degenerate surface, evaluated at the degenerate limit where
//! everything is an explicit rational function on the sphere.
//!
//! Layering, bottom to top:
//!
//! * [`algebra`]: complex polynomials, deterministic roots, rational functions
//!   and exact partial-fraction (pole) expansions.
//! * [`forms`]: meromorphic 1-forms, residues including infinity, circle
//!   periods, adaptive path quadrature and vertical flux.
//! * [`weierstrass`]: Weierstrass data, immersion, curvature, meshes and the
//!   parameter/equation dimension count.
//! * [`gluing`]: the two extra spheres, their Gauss maps, the limit height
//!   differential, limit graphs, level curves and end growths.
//! * [`equations`]: the residual system (zero/pole, vertical and horizontal
//!   periods) as a function of the symmetric parameter vector.
//! * [`jacobian`]: finite-difference Jacobian certificate of the block
//!   structure, and the diagonally dominant matrix certificate.
//! * [`tower`]: end-growth bookkeeping for the iterated construction.
//! * [`hurwitz`]: local polynomial models of branched-covering deformations.

pub mod algebra;
pub mod equations;
pub mod error;
pub mod forms;
pub mod gluing;
pub mod hurwitz;
pub mod jacobian;
pub mod tower;
pub mod weierstrass;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand used throughout the crate.
pub type C64 = Complex64;

/// `Complex64::new` as a free function.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
