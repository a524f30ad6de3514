//! Complex polynomials, deterministic root finding, rational functions and
//! partial-fraction expansions.

mod assign;
mod partial;
mod poly;
mod rational;
mod roots;

pub use assign::min_cost_assignment;
pub use partial::{partial_fractions, PoleExpansion, PoleTerm, POLE_MERGE_TOL};
pub use poly::Polynomial;
pub use rational::{rational_reduce, RationalFunction};
pub use roots::{
    canonical_arg, cluster_points, default_cluster_tol, poly_roots, raw_roots, relative_residual,
    Root, RootSet, ROOT_ITERATION_CAP,
};
