//! Adaptive 7/15-point Gauss–Kronrod quadrature.
//!
//! Intervals are bisected globally (largest error first) until the summed
//! error estimate drops below the absolute tolerance. Endpoints are never
//! evaluated, so integrands with removable singularities at the bounds are
//! fine.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::Real;

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
// Gauss weights for the odd Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct QuadratureOptions<T> {
    pub abs_tol: T,
    pub max_intervals: usize,
    /// Size of the integral of `|terms|` when the integrand is a difference
    /// of nearly equal quantities; errors below its roundoff level are
    /// accepted.
    pub magnitude: T,
}

impl<T: Real> Default for QuadratureOptions<T> {
    fn default() -> Self {
        Self { abs_tol: T::lit(1e-12), max_intervals: 4000, magnitude: T::zero() }
    }
}

fn gk15<T: Real>(f: &impl Fn(T) -> T, a: T, b: T) -> (T, T) {
    let half = (b - a) * T::lit(0.5);
    let centre = (a + b) * T::lit(0.5);
    let fc = f(centre);
    let mut kron = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * T::lit(x);
        let s = f(centre - dx) + f(centre + dx);
        kron = kron + s * T::lit(w);
        if j % 2 == 1 {
            gauss = gauss + s * T::lit(WG[j / 2]);
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl<T: Real> Eq for Panel<T> {}
impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.error.partial_cmp(&o.error).unwrap_or(std::cmp::Ordering::Equal)
    }
}

pub fn integrate<T: Real>(f: impl Fn(T) -> T, a: T, b: T, opts: QuadratureOptions<T>) -> Result<Estimate<T>> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::param("bounds", "integration bounds must be finite"));
    }
    if a == b {
        return Ok(Estimate { value: T::zero(), error: T::zero(), evaluations: 0 });
    }
    let (v, e) = gk15(&f, a, b);
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v, error: e });
    let mut total = v;
    let mut total_err = e;
    while total_err > opts.abs_tol {
        if heap.len() >= opts.max_intervals {
            break;
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = (worst.a + worst.b) * T::lit(0.5);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        evaluations += 30;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
        // re-sum instead of updating incrementally to avoid drift
        total = heap.iter().map(|p| p.value).fold(T::zero(), |x, y| x + y);
        total_err = heap.iter().map(|p| p.error).fold(T::zero(), |x, y| x + y);
    }
    if !total.is_finite() {
        return Err(Error::QuadratureFailed { tol: opts.abs_tol.as_f64(), err: f64::INFINITY });
    }
    // Panels whose error is at roundoff level cannot improve further.
    let summed = heap.iter().map(|p| p.value.abs()).fold(T::zero(), |x, y| x + y);
    let floor = T::epsilon() * T::lit(64.0) * summed.max(opts.magnitude);
    if total_err > opts.abs_tol && total_err > floor {
        return Err(Error::QuadratureFailed { tol: opts.abs_tol.as_f64(), err: total_err.as_f64() });
    }
    Ok(Estimate { value: total, error: total_err, evaluations })
}
