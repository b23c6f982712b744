//! Adaptive Gauss–Kronrod quadrature.
//!
//! A globally adaptive 7/15-point Gauss–Kronrod scheme (bisect the interval
//! with the largest error estimate until the total estimate drops below
//! tolerance), plus an improper-integral driver for integrands with an
//! integrable singularity at the left endpoint 0.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

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

// Gauss weights for XGK[1], XGK[3], XGK[5] and the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_intervals: 2000,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }
}

/// Value and error estimate of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Segment { a, b, value, error }
}

/// Integrates `f` over `[a, b]`. Accepts `a >= b` (returns the signed value).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
        });
    }
    if a > b {
        return integrate(f, b, a, opts).map(|r| QuadResult {
            value: -r.value,
            error_estimate: r.error_estimate,
        });
    }

    let first = gauss_kronrod(&f, a, b);
    let mut total = first.value;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);

    while total_err > opts.abs_tol.max(opts.rel_tol * total.abs()) {
        if heap.len() >= opts.max_intervals {
            if !total.is_finite() || total_err > 1e3 * opts.abs_tol.max(opts.rel_tol * total.abs()) {
                return Err(Error::Quadrature {
                    a,
                    b,
                    error_estimate: total_err,
                });
            }
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in double precision.
            heap.push(worst);
            break;
        }
        let left = gauss_kronrod(&f, worst.a, mid);
        let right = gauss_kronrod(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed the drift of the incremental updates.
    let mut segments: Vec<Segment> = heap.into_vec();
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value: f64 = segments.iter().map(|s| s.value).sum();
    let error_estimate: f64 = segments.iter().map(|s| s.error).sum();
    if !value.is_finite() {
        return Err(Error::Quadrature {
            a,
            b,
            error_estimate,
        });
    }
    Ok(QuadResult {
        value,
        error_estimate,
    })
}

/// Largest substitution reach `s` probed by [`integrate_from_zero`].
const MAX_REACH: f64 = 512.0;

/// Integrates `g` over `(0, u]` for integrands allowed to be singular at 0.
///
/// Uses `t = u e^{-s}`, turning the integral into `∫_0^∞ g(u e^{-s}) u e^{-s} ds`,
/// and sums dyadic blocks `[2^{j-1}, 2^j]` in `s`. Divergence is reported when
/// the last probed block still carries more than `rel_tol` of the total.
pub fn integrate_from_zero<F: Fn(f64) -> f64>(g: F, u: f64, opts: QuadOptions) -> Result<QuadResult> {
    if u <= 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
        });
    }
    let transformed = |s: f64| {
        let t = u * (-s).exp();
        if t <= 0.0 {
            0.0
        } else {
            g(t) * t
        }
    };

    let mut total = 0.0;
    let mut err = 0.0;
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut last_block;
    loop {
        let block = integrate(&transformed, lo, hi, opts)?;
        total += block.value;
        err += block.error_estimate;
        last_block = block.value.abs();
        let small = block.value.abs() <= opts.abs_tol.max(1e-14 * total.abs());
        if small && hi >= 8.0 {
            return Ok(QuadResult {
                value: total,
                error_estimate: err + block.value.abs(),
            });
        }
        if hi >= MAX_REACH {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if last_block <= opts.rel_tol * total.abs() {
        Ok(QuadResult {
            value: total,
            error_estimate: err + last_block,
        })
    } else {
        Err(Error::Divergent {
            partial: total,
            reach: hi,
        })
    }
}
