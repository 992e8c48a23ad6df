// SPDX-License-Identifier: Apache-2.0

//! Adaptive Gauss-Kronrod (7/15) quadrature.

use crate::error::{Error, Result};
use alloc::vec::Vec;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, libm::fabs((k - g) * h))
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Returns the estimate and its error bound. Subdivision stops after
/// `max_intervals` pieces; failing to reach `tol` by then is an error.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_intervals: usize,
) -> Result<(f64, f64)> {
    if !(tol > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(
            "quadrature needs finite bounds and tol > 0".into(),
        ));
    }
    if a == b {
        return Ok((0.0, 0.0));
    }
    let mut pieces: Vec<(f64, f64, f64, f64)> = Vec::new();
    let (v, e) = kronrod(&mut f, a, b);
    pieces.push((a, b, v, e));
    loop {
        let total_err: f64 = pieces.iter().map(|p| p.3).sum();
        if total_err <= tol {
            break;
        }
        if pieces.len() >= max_intervals {
            return Err(Error::InsufficientData(alloc::format!(
                "quadrature error {total_err:e} above {tol:e} after {max_intervals} intervals"
            )));
        }
        let (worst, _) =
            pieces.iter().enumerate().fold(
                (0, -1.0),
                |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc },
            );
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = kronrod(&mut f, lo, mid);
        let (v2, e2) = kronrod(&mut f, mid, hi);
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
    // Sum in a fixed order so results do not depend on the refinement history.
    pieces.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap_or(core::cmp::Ordering::Equal));
    let value = pieces.iter().map(|p| p.2).sum();
    let err = pieces.iter().map(|p| p.3).sum();
    Ok((value, err))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let (v, _) = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12, 10).unwrap();
        assert!((v - 8.0).abs() < 1e-13);
    }

    #[test]
    fn log_singularity() {
        // ∫₀¹ -ln x dx = 1
        let (v, _) = integrate(
            |x| if x > 0.0 { -libm::log(x) } else { 0.0 },
            0.0,
            1.0,
            1e-11,
            2000,
        )
        .unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn oscillatory() {
        let (v, _) = integrate(libm::sin, 0.0, core::f64::consts::PI, 1e-12, 100).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }
}
