//! Finite-difference certificate of the block structure of the residual
//! system at the central value, and the diagonally dominant matrix behind the
//! horizontal A-periods.
//!
//! All matrices are real: every parameter and residual is expressed in its
//! free real coordinates before differentiation. Complex-step differentiation
//! does not apply because the residuals involve conjugation.

mod matrix_a;

use std::ops::Range;

use log::debug;
use nalgebra::DMatrix;
use rayon::prelude::*;

pub use matrix_a::{build_matrix_a, certify_matrix_a, MatrixA, MatrixACertificate};

use crate::equations::{
    full_residual, pack_palindromic, residual_real, scaling_direction, vertical_periods, ParameterVector, Reader,
    ResidualVector,
};
use crate::{Error, Result, C64};

/// Largest `m` accepted by [`jacobian_at_central`] unless raised.
pub const DEFAULT_M_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianSettings {
    /// Relative step; the step for coordinate `x` is `step · max(1, |x|)`.
    pub step: f64,
    /// Allowed change of a column when the step is halved, relative to its norm.
    pub halving_tol: f64,
    /// Singular values above this count towards the rank.
    pub rank_tol: f64,
    /// Entries below `offblock_tol · ‖J‖` count as zero.
    pub offblock_tol: f64,
    pub m_cap: usize,
}

impl Default for JacobianSettings {
    fn default() -> Self {
        JacobianSettings {
            step: 1e-6,
            halving_tol: 1e-3,
            rank_tol: 1e-6,
            offblock_tol: 1e-8,
            m_cap: DEFAULT_M_CAP,
        }
    }
}

/// One claim about a sub-block of the Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockReport {
    pub block_name: String,
    pub matrix: DMatrix<f64>,
    pub smallest_singular_value: f64,
    pub largest_offblock_entry: f64,
    /// The value the claim is tested against, if any.
    pub expected: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobianReport {
    pub m: usize,
    pub jacobian: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub kernel_dimension: usize,
    /// Columns span the numerical kernel.
    pub kernel: DMatrix<f64>,
    /// `‖J d‖` for the catenoid scaling direction `d`.
    pub scaling_defect: f64,
    /// `‖J d‖` for each symmetry direction of [`gauge_directions`].
    pub gauge_defects: Vec<(&'static str, f64)>,
    /// Rank of the scaling and symmetry directions together.
    pub gauge_rank: usize,
    /// Largest relative column change under step halving.
    pub halving_change: f64,
    pub blocks: Vec<BlockReport>,
}

impl JacobianReport {
    pub fn block(&self, name: &str) -> Option<&BlockReport> {
        self.blocks.iter().find(|b| b.block_name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.blocks.iter().all(|b| b.pass)
    }
}

/// Central differences `(f(x + h e_j) - f(x - h e_j)) / 2h`, columns in parallel.
pub fn finite_difference_jacobian<F>(f: &F, x: &[f64], step: f64) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let f0 = f(x)?;
    let cols: Vec<Result<Vec<f64>>> = (0..x.len())
        .into_par_iter()
        .map(|j| {
            let h = step * x[j].abs().max(1.0);
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += h;
            xm[j] -= h;
            let (fp, fm) = (f(&xp)?, f(&xm)?);
            Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
        })
        .collect();
    let mut jac = DMatrix::zeros(f0.len(), x.len());
    for (j, c) in cols.into_iter().enumerate() {
        jac.set_column(j, &nalgebra::DVector::from_vec(c?));
    }
    Ok(jac)
}

/// Jacobian at `step`, checked against the one at `step / 2`.
pub fn checked_jacobian<F>(f: &F, x: &[f64], settings: &JacobianSettings) -> Result<(DMatrix<f64>, f64)>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let j1 = finite_difference_jacobian(f, x, settings.step)?;
    let j2 = finite_difference_jacobian(f, x, 0.5 * settings.step)?;
    let floor = settings.offblock_tol * j1.norm().max(1.0);
    let mut worst: f64 = 0.0;
    for c in 0..j1.ncols() {
        let a = j1.column(c);
        let diff = (a - j2.column(c)).norm();
        let rel = diff / a.norm().max(floor);
        if diff > floor && rel > settings.halving_tol {
            return Err(Error::NoisyJacobian(format!(
                "column {c} changes by {rel:e} relative when the step is halved"
            )));
        }
        if diff > floor {
            worst = worst.max(rel);
        }
    }
    Ok((j1, worst))
}

fn sub(j: &DMatrix<f64>, rows: &Range<usize>, cols: &[Range<usize>]) -> DMatrix<f64> {
    let ncols: usize = cols.iter().map(|c| c.len()).sum();
    let mut out = DMatrix::zeros(rows.len(), ncols);
    let mut k = 0;
    for c in cols {
        for col in c.clone() {
            for (i, row) in rows.clone().enumerate() {
                out[(i, k)] = j[(row, col)];
            }
            k += 1;
        }
    }
    out
}

fn smallest_sv(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return f64::INFINITY;
    }
    a.clone().singular_values().iter().copied().fold(f64::INFINITY, f64::min)
}

fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Claim that `rows × cols` has full row rank and that `rows` vanish on the
/// `others` columns.
fn rank_claim(
    name: &str,
    j: &DMatrix<f64>,
    rows: &Range<usize>,
    cols: &[Range<usize>],
    others: &[Range<usize>],
    settings: &JacobianSettings,
) -> BlockReport {
    let matrix = sub(j, rows, cols);
    let s = smallest_sv(&matrix);
    let off = max_abs(&sub(j, rows, others));
    let pass = s > settings.rank_tol && off <= settings.offblock_tol * j.norm();
    BlockReport {
        block_name: name.to_string(),
        matrix,
        smallest_singular_value: s,
        largest_offblock_entry: off,
        expected: None,
        pass,
    }
}

/// `V^A` and `V^B` against every complex `γ̇` without the symmetry constraint:
/// rows `(V^A, V^B)`, columns `(Re γ̇, Im γ̇)`.
pub fn unreduced_vertical_block(m: usize, gamma_m: f64) -> DMatrix<f64> {
    let n = m - 1;
    let f = |x: &[f64]| -> Result<Vec<f64>> {
        let mut g: Vec<C64> = (0..n).map(|k| C64::new(gamma_m + x[k], x[n + k])).collect();
        g.push(C64::new(gamma_m, 0.0));
        let (a, b) = vertical_periods(&g);
        Ok(a.into_iter().chain(b).collect())
    };
    finite_difference_jacobian(&f, &vec![0.0; 2 * n], 1e-6).expect("linear map evaluates everywhere")
}

/// Expected `∂H^B/∂ṗ⁺` in real coordinates from `H^B_i = ½(ṗ_m⁺ - ṗ_i⁺)`.
pub fn predicted_h_b_block(m: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m - 1, m);
    for k in 0..m {
        let mut e = vec![0.0; m];
        e[k] = 1.0;
        let mut r = Reader::new(&e);
        let mut p = r.palindromic(m - 1).expect("sized");
        p.push(C64::new(r.real().expect("sized"), 0.0));
        let h: Vec<C64> = (0..m - 1).map(|i| 0.5 * (p[m - 1] - p[i])).collect();
        let mut col = Vec::new();
        pack_palindromic(&h, &mut col);
        for (i, v) in col.into_iter().enumerate() {
            out[(i, k)] = v;
        }
    }
    out
}

/// Directions along which the residual system is invariant at the central
/// value: the catenoid scaling, real translation and real dilation of `ℂ⁺`,
/// real dilation of `ℂ⁻`, and a common constant factor on `g⁻` and `g⁺`.
pub fn gauge_directions(m: usize) -> Result<Vec<(&'static str, Vec<f64>)>> {
    let x0 = ParameterVector::central(m)?;
    let g0 = C64::new(x0.gamma_m, 0.0);
    let zero = ParameterVector {
        m,
        gamma_m: 0.0,
        gamma_dot: vec![C64::new(0.0, 0.0); m - 1],
        beta_minus_dot: vec![C64::new(0.0, 0.0); m + 1],
        beta_plus_dot: vec![C64::new(0.0, 0.0); m],
        p_minus: vec![C64::new(0.0, 0.0); m],
        p_plus_dot: vec![C64::new(0.0, 0.0); m],
        c: vec![0.0],
    };
    let mut beta_minus = vec![C64::new(-1.0, 0.0)];
    beta_minus.extend(std::iter::repeat(g0).take(m));
    let conj_p: Vec<C64> = x0.p_minus.iter().map(|p| p.conj()).collect();

    let translate_plus = ParameterVector {
        p_plus_dot: vec![C64::new(1.0, 0.0); m],
        ..zero.clone()
    };
    let dilate_minus = ParameterVector {
        p_minus: x0.p_minus.clone(),
        beta_minus_dot: beta_minus.clone(),
        p_plus_dot: conj_p.iter().map(|p| -p).collect(),
        ..zero.clone()
    };
    let dilate_plus = ParameterVector {
        p_plus_dot: conj_p,
        beta_plus_dot: vec![g0; m],
        ..zero.clone()
    };
    let scale_gauss = ParameterVector {
        beta_minus_dot: beta_minus,
        beta_plus_dot: vec![g0; m],
        ..zero
    };
    Ok(vec![
        ("catenoid scaling", scaling_direction(m)),
        ("translation of C+", translate_plus.to_real()),
        ("dilation of C-", dilate_minus.to_real()),
        ("dilation of C+", dilate_plus.to_real()),
        ("common factor on g", scale_gauss.to_real()),
    ])
}

pub fn jacobian_at_central(m: usize, settings: &JacobianSettings) -> Result<JacobianReport> {
    if m < 2 || m > settings.m_cap {
        return Err(Error::Precondition(format!("m must lie in 2..={}, got {m}", settings.m_cap)));
    }
    let x0 = ParameterVector::central(m)?;
    let x = x0.to_real();
    let f = |x: &[f64]| residual_real(m, x);
    let (jac, halving_change) = checked_jacobian(&f, &x, settings)?;
    debug!("jacobian {}x{} for m = {m}", jac.nrows(), jac.ncols());

    let pr: Vec<Range<usize>> = ParameterVector::block_ranges(m).into_iter().map(|b| b.1).collect();
    let rr: Vec<Range<usize>> = ResidualVector::block_ranges(m).into_iter().map(|b| b.1).collect();
    let [gamma_m, gamma_dot, beta_minus, beta_plus, p_minus, p_plus, c] =
        <[Range<usize>; 7]>::try_from(pr.clone()).expect("seven parameter blocks");
    let [z_minus, z_plus, v_a, h_a, v_b, h_b] =
        <[Range<usize>; 6]>::try_from(rr).expect("six residual blocks");
    let except = |keep: &[&Range<usize>]| -> Vec<Range<usize>> {
        pr.iter().filter(|r| !keep.contains(r)).cloned().collect()
    };

    let mut blocks = vec![
        rank_claim("Z_minus/beta_minus_dot", &jac, &z_minus, &[beta_minus.clone()], &except(&[&beta_minus]), settings),
        rank_claim("Z_plus/beta_plus_dot", &jac, &z_plus, &[beta_plus.clone()], &except(&[&beta_plus]), settings),
    ];
    let v_rows: Vec<usize> = v_a.clone().chain(v_b.clone()).collect();
    let vj = jac.select_rows(v_rows.iter());
    let pick = |cols: &[Range<usize>]| sub(&vj, &(0..vj.nrows()), cols);
    let v_block = pick(&[gamma_dot.clone()]);
    let v_off = max_abs(&pick(&except(&[&gamma_dot])));
    let v_s = smallest_sv(&v_block);
    blocks.push(BlockReport {
        block_name: "V/gamma_dot".into(),
        pass: v_s > settings.rank_tol && v_off <= settings.offblock_tol * jac.norm() && v_block.is_square(),
        matrix: v_block,
        smallest_singular_value: v_s,
        largest_offblock_entry: v_off,
        expected: None,
    });
    let unreduced = unreduced_vertical_block(m, x0.gamma_m);
    let sv = unreduced.clone().singular_values();
    let (smin, smax) = sv.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &s| (a.min(s), b.max(s)));
    blocks.push(BlockReport {
        block_name: "V/gamma_dot unreduced".into(),
        pass: (smin - 2.0).abs() < 1e-6 && (smax - std::f64::consts::TAU).abs() < 1e-6,
        matrix: unreduced,
        smallest_singular_value: smin,
        largest_offblock_entry: 0.0,
        expected: Some(2.0),
    });

    let hb = sub(&jac, &h_b, &[p_plus.clone()]);
    let hb_dev = max_abs(&(&hb - predicted_h_b_block(m)));
    let hb_s = smallest_sv(&hb);
    blocks.push(BlockReport {
        block_name: "H_B/p_plus_dot".into(),
        pass: hb_s > settings.rank_tol && hb_dev <= 1e-6,
        matrix: hb,
        smallest_singular_value: hb_s,
        largest_offblock_entry: hb_dev,
        expected: Some(0.5),
    });

    // R_m -> Σ p_i R_i on ∂H^A/∂(p⁻, γ_m); H^A here carries a factor i
    let p0 = x0.p_minus.clone();
    let g = |x: &[f64]| -> Result<Vec<f64>> {
        let r = full_residual(&ParameterVector::from_real(m, x)?)?;
        let s: C64 = r.h_a.iter().zip(&p0).map(|(h, p)| h * p).sum::<C64>() * C64::new(0.0, -1.0);
        Ok(vec![s.re, s.im])
    };
    let srow = finite_difference_jacobian(&g, &x, settings.step)?;
    let row = sub(&srow, &(0..2), &[p_minus.clone(), gamma_m.clone()]);
    let last = row[(0, row.ncols() - 1)];
    let rest = max_abs(&row.columns(0, row.ncols() - 1).into_owned()).max(row[(1, row.ncols() - 1)].abs());
    let want = -std::f64::consts::TAU * m as f64;
    blocks.push(BlockReport {
        block_name: "H_A row operation".into(),
        pass: (last - want).abs() <= 1e-6 * want.abs() && rest <= 1e-6,
        smallest_singular_value: last.abs(),
        largest_offblock_entry: rest,
        matrix: row,
        expected: Some(want),
    });
    blocks.push(rank_claim(
        "H_A/(p_minus, gamma_m)",
        &jac,
        &h_a,
        &[p_minus.clone(), gamma_m.clone()],
        &[],
        settings,
    ));

    let declared: Vec<Range<usize>> = pr.iter().filter(|r| **r != c).cloned().collect();
    let all_rows = 0..jac.nrows();
    blocks.push(rank_claim("surjectivity", &jac, &all_rows, &declared, &[], settings));

    let svd = jac.clone().svd(false, true);
    let mut singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let rank = singular_values.iter().filter(|&&s| s > settings.rank_tol).count();
    let kernel_dimension = jac.ncols() - rank;
    let v_t = svd.v_t.expect("requested");
    let kernel_rows: Vec<usize> = (0..v_t.nrows()).filter(|&i| svd.singular_values[i] <= settings.rank_tol).collect();
    let mut kernel = v_t.select_rows(kernel_rows.iter()).transpose();
    if kernel.ncols() < kernel_dimension {
        // thin SVD of a wide matrix omits the trailing right singular vectors
        kernel = complete_kernel(&jac, settings.rank_tol);
    }
    let d = nalgebra::DVector::from_vec(scaling_direction(m));
    let scaling_defect = (&jac * &d).norm();
    let gauges = gauge_directions(m)?;
    let gauge_defects = gauges
        .iter()
        .map(|(n, v)| (*n, (&jac * nalgebra::DVector::from_column_slice(v)).norm()))
        .collect();
    let g = DMatrix::from_fn(jac.ncols(), gauges.len(), |i, k| gauges[k].1[i]);
    let gauge_rank = g.singular_values().iter().filter(|&&s| s > settings.rank_tol).count();
    Ok(JacobianReport {
        m,
        jacobian: jac,
        singular_values,
        rank,
        kernel_dimension,
        kernel,
        scaling_defect,
        gauge_defects,
        gauge_rank,
        halving_change,
        blocks,
    })
}

/// Kernel basis from the SVD of `JᵀJ`, which is square.
fn complete_kernel(j: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let jtj = j.transpose() * j;
    let svd = jtj.svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let rows: Vec<usize> = (0..v_t.nrows())
        .filter(|&i| svd.singular_values[i].sqrt() <= tol)
        .collect();
    v_t.select_rows(rows.iter()).transpose()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_has_the_vertical_singular_values() {
        let b = unreduced_vertical_block(2, 1.0);
        let mut s: Vec<f64> = b.singular_values().iter().copied().collect();
        s.sort_by(|a, b| a.total_cmp(b));
        assert!((s[0] - 2.0).abs() < 1e-8);
        assert!((s[1] - std::f64::consts::TAU).abs() < 1e-8);
    }

    #[test]
    fn central_three() {
        let r = jacobian_at_central(3, &JacobianSettings::default()).unwrap();
        for b in &r.blocks {
            assert!(b.pass, "{} {} {}", b.block_name, b.smallest_singular_value, b.largest_offblock_entry);
        }
        assert_eq!(r.jacobian.shape(), (12, 17));
        assert_eq!(r.rank, 12);
        assert_eq!(r.kernel_dimension, 5);
        assert!(r.scaling_defect < 1e-6);
        assert_eq!(r.gauge_rank, 5);
        for (name, d) in &r.gauge_defects {
            assert!(*d < 1e-6, "{name} {d}");
        }
        assert_eq!(r.block("Z_minus/beta_minus_dot").unwrap().matrix.shape(), (3, 4));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(jacobian_at_central(11, &JacobianSettings::default()).is_err());
        assert!(jacobian_at_central(1, &JacobianSettings::default()).is_err());
    }

    #[test]
    fn linear_map_is_recovered() {
        let f = |x: &[f64]| -> Result<Vec<f64>> { Ok(vec![2.0 * x[0] - x[1], 3.0 * x[1]]) };
        let (j, change) = checked_jacobian(&f, &[0.3, -0.2], &JacobianSettings::default()).unwrap();
        assert!((j[(0, 0)] - 2.0).abs() < 1e-8 && (j[(1, 1)] - 3.0).abs() < 1e-8);
        assert!(change < 1e-3);
    }

    #[test]
    fn noise_is_flagged() {
        use std::sync::atomic::{AtomicU64, Ordering};
        let calls = AtomicU64::new(0);
        let f = |x: &[f64]| -> Result<Vec<f64>> {
            let k = calls.fetch_add(1, Ordering::Relaxed);
            Ok(vec![x[0] + 1e-7 * (k % 7) as f64])
        };
        assert!(matches!(
            checked_jacobian(&f, &[0.0], &JacobianSettings::default()),
            Err(Error::NoisyJacobian(_))
        ));
    }
}
