//! Globally adaptive Gauss-Kronrod (G7/K15) integration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

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
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
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

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> Result<Segment> {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut eval = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFinite { at: x })
        }
    };
    let fc = eval(mid)?;
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = eval(mid - dx)? + eval(mid + dx)?;
        k += WGK[j] * pair;
        if j % 2 == 1 {
            g += WG[j / 2] * pair;
        }
    }
    Ok(Segment {
        lo,
        hi,
        value: k * half,
        error: ((k - g) * half).abs(),
    })
}

/// Integrates `f` over `[a, b]` until the summed error estimate is below
/// `abs_tol`. `breaks` are interior points used for the initial partition.
pub fn integrate<F>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    budget: usize,
) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    if abs_tol.is_nan() || abs_tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance {abs_tol} must be > 0"
        )));
    }
    if !(a.is_finite() && b.is_finite() && b >= a) {
        return Err(Error::InvalidArgument(format!(
            "[{a}, {b}] is not an ordered finite interval"
        )));
    }
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut edges = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    edges.extend(inner);
    edges.push(b);
    edges.dedup();

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in edges.windows(2) {
        heap.push(kronrod(&mut f, w[0], w[1])?);
        evaluations += 15;
    }
    let mut total_error: f64 = heap.iter().map(|s| s.error).sum();
    while total_error > abs_tol {
        if evaluations >= budget {
            return Err(Error::NoConvergence {
                tol: abs_tol,
                budget,
                estimate: total_error,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Cannot split further in floating point; keep what we have.
            total_error -= worst.error;
            heap.push(Segment {
                error: 0.0,
                ..worst
            });
        } else {
            let left = kronrod(&mut f, worst.lo, mid)?;
            let right = kronrod(&mut f, mid, worst.hi)?;
            evaluations += 30;
            total_error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
        }
        if total_error <= abs_tol {
            // Resynchronise the running sum before accepting it.
            total_error = heap.iter().map(|s| s.error).sum();
        }
    }
    let mut pieces: Vec<Segment> = heap.into_vec();
    pieces.sort_by(|p, q| p.lo.total_cmp(&q.lo));
    Ok(Estimate {
        value: pieces.iter().map(|s| s.value).sum(),
        error: total_error,
        evaluations,
    })
}
