use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_traits::Zero;

use crate::{Error, Result, C64};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One 15-point Kronrod evaluation with the embedded 7-point Gauss estimate.
fn kronrod<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    let k = k * half;
    let g = g * half;
    (k, (k - g).norm())
}

struct Piece {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below `abs_tol` or `max_subintervals` is reached.
/// Returns the value and the final error estimate.
pub fn integrate<F: Fn(f64) -> C64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_subintervals: usize,
) -> Result<(C64, f64)> {
    let (value, error) = kronrod(&f, a, b);
    if !value.is_finite() {
        return Err(Error::NumericFailure {
            what: "integrand is not finite".into(),
            best_residual: f64::INFINITY,
        });
    }
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    while total_err > abs_tol {
        if heap.len() >= max_subintervals {
            return Err(Error::NumericFailure {
                what: format!("quadrature did not reach {abs_tol:e} within {max_subintervals} subintervals"),
                best_residual: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = kronrod(&f, worst.a, mid);
        let (v2, e2) = kronrod(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
        if mid == worst.a || mid == worst.b {
            break;
        }
    }
    // resum to shed the drift of the running updates
    let mut sum = C64::zero();
    let mut err = 0.0;
    for p in heap.iter() {
        sum += p.value;
        err += p.error;
    }
    if !sum.is_finite() {
        return Err(Error::NumericFailure {
            what: "integrand is not finite".into(),
            best_residual: f64::INFINITY,
        });
    }
    Ok((sum, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let (v, _) = integrate(|x| C64::new(x.powi(5), 0.0), 0.0, 2.0, 1e-12, 100).unwrap();
        assert!((v.re - 64.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_complex() {
        let (v, e) = integrate(|x| C64::from_polar(1.0, 7.0 * x), 0.0, PI, 1e-12, 1 << 10).unwrap();
        // ∫ e^{7ix} = (e^{7iπ} - 1)/(7i) = 2i/7
        assert!((v - C64::new(0.0, 2.0 / 7.0)).norm() < 1e-12);
        assert!(e < 1e-12);
    }

    #[test]
    fn peaked_integrand_is_adapted() {
        let d = 1e-3;
        let (v, _) = integrate(|x| C64::new(d / (x * x + d * d), 0.0), -1.0, 1.0, 1e-10, 1 << 12).unwrap();
        let exact = 2.0 * (1.0 / d).atan();
        assert!((v.re - exact).abs() < 1e-9);
    }

    #[test]
    fn cap_is_reported() {
        let r = integrate(|x| C64::new(x.powf(-0.9), 0.0), 0.0, 1.0, 1e-14, 8);
        assert!(matches!(r, Err(Error::NumericFailure { .. })));
    }
}
