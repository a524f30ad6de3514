use std::f64::consts::TAU;

use nalgebra::DMatrix;

use crate::gluing::symmetric_roots_of_unity;
use crate::{Error, Result, C64};

/// `(m-1) × (m-1)` matrix with `a_ij = 2/(p_i - p_j)²` and
/// `a_ii = (m-1)/p_i² - Σ_(j≤m, j≠i) 2/(p_i - p_j)²`, `p_i = ω^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixA {
    pub m: usize,
    pub entries: DMatrix<C64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixACertificate {
    pub m: usize,
    pub diagonal_magnitudes: Vec<f64>,
    /// `|a_ii| - Σ_(j≠i) |a_ij|` per row.
    pub dominance_margins: Vec<f64>,
    /// `2/|p_i - 1|²` per row.
    pub predicted_margins: Vec<f64>,
    pub smallest_singular_value: f64,
    /// Worst `|1 - 2 Re(1/(1+z)²) - 2/|1+z|²|` over sample points of the unit circle.
    pub circle_identity_defect: f64,
    pub dominant: bool,
    pub invertible: bool,
}

pub fn build_matrix_a(m: usize) -> Result<MatrixA> {
    if m < 2 {
        return Err(Error::Precondition(format!("m must be at least 2, got {m}")));
    }
    let p = symmetric_roots_of_unity(m, 1);
    let n = m - 1;
    let entries = DMatrix::from_fn(n, n, |i, j| {
        if i != j {
            2.0 / ((p[i] - p[j]) * (p[i] - p[j]))
        } else {
            let s: C64 = (0..m).filter(|&k| k != i).map(|k| 2.0 / ((p[i] - p[k]) * (p[i] - p[k]))).sum();
            (m as f64 - 1.0) / (p[i] * p[i]) - s
        }
    });
    Ok(MatrixA { m, entries })
}

/// Unit-circle sample points at golden-angle spacing.
fn circle_samples(n: usize) -> impl Iterator<Item = C64> {
    let golden = TAU * (1.0 - 1.0 / 1.618_033_988_749_895);
    (0..n).map(move |k| C64::from_polar(1.0, 0.1 + golden * k as f64))
}

pub fn certify_matrix_a(a: &MatrixA) -> MatrixACertificate {
    let m = a.m;
    let n = m - 1;
    let p = symmetric_roots_of_unity(m, 1);
    let e = &a.entries;
    let diagonal_magnitudes: Vec<f64> = (0..n).map(|i| e[(i, i)].norm()).collect();
    let dominance_margins: Vec<f64> = (0..n)
        .map(|i| diagonal_magnitudes[i] - (0..n).filter(|&j| j != i).map(|j| e[(i, j)].norm()).sum::<f64>())
        .collect();
    let predicted_margins: Vec<f64> = (0..n).map(|i| 2.0 / (p[i] - 1.0).norm_sqr()).collect();
    let smallest_singular_value = e.clone().singular_values().iter().copied().fold(f64::INFINITY, f64::min);
    let circle_identity_defect = circle_samples(100)
        .map(|z| {
            let w = 1.0 + z;
            (1.0 - 2.0 * (1.0 / (w * w)).re - 2.0 / w.norm_sqr()).abs()
        })
        .fold(0.0, f64::max);
    let dominant = dominance_margins
        .iter()
        .zip(&predicted_margins)
        .all(|(d, q)| *d > 0.0 && (d - q).abs() <= 1e-10 * (1.0 + q));
    MatrixACertificate {
        m,
        diagonal_magnitudes,
        dominance_margins,
        predicted_margins,
        smallest_singular_value,
        circle_identity_defect,
        dominant,
        invertible: smallest_singular_value > 1e-6,
    }
}
