//! Discrete conformal geometry on flat tori.
//!
//! Fields live on a periodic `Nⁿ` grid stored row-major (axis 0 slowest).
//! `Δ = d*d` is the positive Laplacian. For `ĝ = u^ℓ g`, `ℓ = 4/(n−2)`,
//!
//! ```text
//! ŝ u^{ℓ+1} = s u + (n−1)ℓ Δu,      dμ_ĝ = u^{2n/(n−2)} dμ,
//! ```
//!
//! and since `ŝ dμ_ĝ = (su + (n−1)ℓΔu) u dμ` the Yamabe quotient is a ratio
//! of a quadratic form and a norm of `u`. Integrals are cell sums, which makes
//! `∫Δu dμ = 0` and the flat-case identity `∫ŝ u^ℓ dμ ≤ 0` hold exactly up to
//! rounding.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_DIM: usize = 4;
pub const MIN_POINTS: usize = 8;
const MAX_HALVINGS: usize = 60;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum LaplacianKind {
    /// Second-order periodic central differences.
    #[default]
    Stencil,
    /// Exact on trigonometric polynomials below the Nyquist frequency.
    Spectral,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConformalGrid<T> {
    pub n_dim: usize,
    pub n: usize,
    pub periods: Vec<T>,
    /// Scalar curvature of the base metric at each cell.
    pub base_scalar: Vec<T>,
    pub cell_volume: T,
    pub laplacian: LaplacianKind,
}

impl<T: Real> ConformalGrid<T> {
    pub fn new(n_dim: usize, n: usize, periods: Vec<T>) -> Result<Self> {
        if n_dim < 3 {
            return Err(Error::param("n_dim", format!("conformal exponent needs n ≥ 3, got {n_dim}")));
        }
        if n < MIN_POINTS {
            return Err(Error::param("n", format!("need at least {MIN_POINTS} points per axis, got {n}")));
        }
        if periods.len() != n_dim || periods.iter().any(|&p| !(p > T::zero()) || !p.is_finite()) {
            return Err(Error::param("periods", "need one positive period per axis"));
        }
        let len = n.checked_pow(n_dim as u32).ok_or_else(|| Error::param("n", "grid size overflows"))?;
        let cell_volume = periods.iter().fold(T::one(), |acc, &p| acc * p / T::from_usize_lossy(n));
        Ok(Self {
            n_dim,
            n,
            periods,
            base_scalar: vec![T::zero(); len],
            cell_volume,
            laplacian: LaplacianKind::Stencil,
        })
    }

    /// Unit flat torus `ℝⁿ/ℤⁿ`.
    pub fn flat_torus(n_dim: usize, n: usize) -> Result<Self> {
        Self::new(n_dim, n, vec![T::one(); n_dim])
    }

    pub fn with_laplacian(mut self, kind: LaplacianKind) -> Self {
        self.laplacian = kind;
        self
    }

    pub fn with_base_scalar(mut self, s: Vec<T>) -> Result<Self> {
        if s.len() != self.len() {
            return Err(Error::param("base_scalar", format!("expected {} values, got {}", self.len(), s.len())));
        }
        self.base_scalar = s;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.base_scalar.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_flat(&self) -> bool {
        self.base_scalar.iter().all(|&s| s == T::zero())
    }

    /// `ℓ = 4/(n−2)`.
    pub fn ell(&self) -> T {
        T::lit(4.0) / T::from_usize_lossy(self.n_dim - 2)
    }

    /// `2n/(n−2)`, the volume exponent.
    pub fn volume_exponent(&self) -> T {
        T::from_usize_lossy(2 * self.n_dim) / T::from_usize_lossy(self.n_dim - 2)
    }

    fn stride(&self, axis: usize) -> usize {
        self.n.pow((self.n_dim - 1 - axis) as u32)
    }

    pub fn coords(&self, idx: usize) -> Vec<T> {
        (0..self.n_dim)
            .map(|a| {
                let k = (idx / self.stride(a)) % self.n;
                self.periods[a] * T::from_usize_lossy(k) / T::from_usize_lossy(self.n)
            })
            .collect()
    }

    pub fn field(&self, f: impl Fn(&[T]) -> T + Sync) -> Vec<T> {
        (0..self.len()).into_par_iter().map(|i| f(&self.coords(i))).collect()
    }

    pub fn integrate(&self, v: &[T]) -> T {
        v.iter().copied().sum::<T>() * self.cell_volume
    }

    fn check_len(&self, u: &[T]) -> Result<()> {
        if u.len() == self.len() {
            Ok(())
        } else {
            Err(Error::param("u", format!("expected {} values, got {}", self.len(), u.len())))
        }
    }

    fn check_positive(&self, u: &[T]) -> Result<()> {
        self.check_len(u)?;
        let min = u.iter().copied().fold(T::infinity(), T::min);
        if min > T::zero() && min.is_finite() {
            Ok(())
        } else {
            Err(Error::NonPositiveField { min: min.as_f64() })
        }
    }
}

/// A positive conformal factor together with its exponent `ℓ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalFactor<T> {
    pub u: Vec<T>,
    pub ell: T,
}

impl<T: Real> ConformalFactor<T> {
    pub fn new(grid: &ConformalGrid<T>, u: Vec<T>) -> Result<Self> {
        grid.check_positive(&u)?;
        Ok(Self { u, ell: grid.ell() })
    }
}

pub fn laplacian<T: Real>(grid: &ConformalGrid<T>, u: &[T]) -> Result<Vec<T>> {
    grid.check_len(u)?;
    Ok(match grid.laplacian {
        LaplacianKind::Stencil => stencil_laplacian(grid, u),
        LaplacianKind::Spectral => spectral_laplacian(grid, u),
    })
}

fn stencil_laplacian<T: Real>(grid: &ConformalGrid<T>, u: &[T]) -> Vec<T> {
    let n = grid.n;
    let two = T::lit(2.0);
    let mut lap = vec![T::zero(); u.len()];
    for a in 0..grid.n_dim {
        let h = grid.periods[a] / T::from_usize_lossy(n);
        let w = (h * h).recip();
        let s = grid.stride(a);
        // slabs of thickness 1 along axis a are contiguous runs of length s
        lap.par_chunks_mut(n * s).zip(u.par_chunks(n * s)).for_each(|(out, u)| {
            for k in 0..n {
                let (cur, up, dn) = (k * s, ((k + 1) % n) * s, ((k + n - 1) % n) * s);
                let (o, c, p, m) = (&mut out[cur..cur + s], &u[cur..cur + s], &u[up..up + s], &u[dn..dn + s]);
                for j in 0..s {
                    o[j] = o[j] + (two * c[j] - p[j] - m[j]) * w;
                }
            }
        });
    }
    lap
}

fn fft_lines<T: Real>(grid: &ConformalGrid<T>, data: &mut [Complex<T>], inverse: bool) {
    let n = grid.n;
    let mut planner = FftPlanner::<T>::new();
    let fft: Arc<dyn rustfft::Fft<T>> = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    let mut line = vec![Complex::new(T::zero(), T::zero()); n];
    for a in 0..grid.n_dim {
        let s = grid.stride(a);
        for start in 0..data.len() {
            if !(start / s).is_multiple_of(n) {
                continue;
            }
            for (k, z) in line.iter_mut().enumerate() {
                *z = data[start + k * s];
            }
            fft.process(&mut line);
            for (k, z) in line.iter().enumerate() {
                data[start + k * s] = *z;
            }
        }
    }
}

fn spectral_laplacian<T: Real>(grid: &ConformalGrid<T>, u: &[T]) -> Vec<T> {
    let n = grid.n;
    let mut data: Vec<Complex<T>> = u.iter().map(|&x| Complex::new(x, T::zero())).collect();
    fft_lines(grid, &mut data, false);
    let wavenumber = |a: usize, k: usize| {
        let m = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        T::lit(2.0 * std::f64::consts::PI * m) / grid.periods[a]
    };
    for (i, z) in data.iter_mut().enumerate() {
        let k2 = (0..grid.n_dim).fold(T::zero(), |acc, a| {
            let w = wavenumber(a, (i / grid.stride(a)) % n);
            acc + w * w
        });
        *z = *z * k2;
    }
    fft_lines(grid, &mut data, true);
    let scale = T::from_usize_lossy(data.len()).recip();
    data.iter().map(|z| z.re * scale).collect()
}

/// `ŝ = (su + (n−1)ℓΔu)/u^{ℓ+1}`.
pub fn conformal_scalar<T: Real>(grid: &ConformalGrid<T>, u: &[T]) -> Result<Vec<T>> {
    grid.check_positive(u)?;
    let lap = laplacian(grid, u)?;
    let ell = grid.ell();
    let a = T::from_usize_lossy(grid.n_dim - 1) * ell;
    Ok(u.par_iter()
        .zip(lap.par_iter())
        .zip(grid.base_scalar.par_iter())
        .map(|((&u, &l), &s)| (s * u + a * l) / pow(u, ell + T::one()))
        .collect())
}

/// `x^p`, exact repeated multiplication for integral `p`.
#[inline]
fn pow<T: Real>(x: T, p: T) -> T {
    if p.fract() == T::zero() && p.abs() < T::lit(64.0) {
        x.powi(p.to_i32().unwrap_or(0))
    } else {
        x.powf(p)
    }
}

struct Energy<T> {
    /// `∫(su² + (n−1)ℓ uΔu) dμ`
    quadratic: T,
    /// `∫u^{2n/(n−2)} dμ`
    volume: T,
    lap: Vec<T>,
}

fn energy<T: Real>(grid: &ConformalGrid<T>, u: &[T]) -> Result<Energy<T>> {
    let lap = laplacian(grid, u)?;
    let a = T::from_usize_lossy(grid.n_dim - 1) * grid.ell();
    let p = grid.volume_exponent();
    let (quadratic, volume) = u
        .par_iter()
        .zip(lap.par_iter())
        .zip(grid.base_scalar.par_iter())
        .map(|((&u, &l), &s)| ((s * u + a * l) * u, pow(u, p)))
        .reduce(|| (T::zero(), T::zero()), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok(Energy { quadratic: quadratic * grid.cell_volume, volume: volume * grid.cell_volume, lap })
}

impl<T: Real> Energy<T> {
    /// The energy of `c·u`.
    fn rescale(&mut self, c: T, p: T) {
        self.quadratic = self.quadratic * c * c;
        self.volume = self.volume * c.powf(p);
        self.lap.par_iter_mut().for_each(|l| *l = *l * c);
    }

    fn quotient(&self, n_dim: usize) -> T {
        let e = T::from_usize_lossy(n_dim - 2) / T::from_usize_lossy(n_dim);
        self.quadratic / self.volume.powf(e)
    }
}

/// `∫ŝ dμ_ĝ / (∫dμ_ĝ)^{(n−2)/n}` for `ĝ = u^ℓ g`.
pub fn yamabe_quotient<T: Real>(grid: &ConformalGrid<T>, u: &[T]) -> Result<T> {
    grid.check_positive(u)?;
    Ok(energy(grid, u)?.quotient(grid.n_dim))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescentRow {
    pub iter: usize,
    pub quotient: f64,
    pub step: f64,
    pub u_spread: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DescentResult<T> {
    pub u_star: Vec<T>,
    pub quotient_star: T,
    pub iterations: usize,
    pub trace: Vec<DescentRow>,
}

impl<T> DescentResult<T> {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,quotient,step,u_spread\n");
        for r in &self.trace {
            out.push_str(&format!("{},{:e},{:e},{:e}\n", r.iter, r.quotient, r.step, r.u_spread));
        }
        out
    }
}

/// `(max − min)/mean`.
pub fn relative_spread<T: Real>(u: &[T]) -> T {
    let (lo, hi) = u.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let mean = u.iter().copied().sum::<T>() / T::from_usize_lossy(u.len());
    (hi - lo) / mean
}

fn normalize<T: Real>(grid: &ConformalGrid<T>, u: &mut [T], volume: T) -> T {
    let c = volume.powf(grid.volume_exponent().recip()).recip();
    u.par_iter_mut().for_each(|x| *x = *x * c);
    c
}

/// Projected gradient descent on the Yamabe quotient at unit conformal
/// volume.
///
/// Each iteration backtracks by halving from twice the last accepted step,
/// capped at 1, until the quotient decreases and `u` stays positive. The run
/// stops when the relative decrease drops below `tol` or the gradient
/// vanishes.
pub fn minimize_yamabe<T: Real>(
    grid: &ConformalGrid<T>,
    u0: &[T],
    max_iters: usize,
    tol: T,
) -> Result<DescentResult<T>> {
    grid.check_positive(u0)?;
    let n_dim = grid.n_dim;
    let a = T::from_usize_lossy(n_dim - 1) * grid.ell();
    let p = grid.volume_exponent();
    let two = T::lit(2.0);

    let mut u = u0.to_vec();
    let mut en = energy(grid, &u)?;
    let c = normalize(grid, &mut u, en.volume);
    en.rescale(c, p);
    let mut q = en.quotient(n_dim);
    let mut step = T::one();
    let mut trace =
        vec![DescentRow { iter: 0, quotient: q.as_f64(), step: 0.0, u_spread: relative_spread(&u).as_f64() }];
    let mut iterations = 0;

    while iterations < max_iters {
        // L²-gradient of the quotient at unit volume
        let lambda = en.quadratic / en.volume;
        let grad: Vec<T> = u
            .par_iter()
            .zip(en.lap.par_iter())
            .zip(grid.base_scalar.par_iter())
            .map(|((&u, &l), &s)| two * (s * u + a * l - lambda * pow(u, p - T::one())))
            .collect();
        let gmax = grad.iter().fold(T::zero(), |m, g| m.max(g.abs()));
        if !(gmax > T::epsilon() * (T::one() + q.abs())) {
            break;
        }
        step = (step * two).min(T::one());
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let mut trial: Vec<T> = u.par_iter().zip(grad.par_iter()).map(|(&u, &g)| u - step * g).collect();
            if trial.iter().all(|&x| x > T::zero()) {
                let mut e = energy(grid, &trial)?;
                let c = normalize(grid, &mut trial, e.volume);
                e.rescale(c, p);
                let qt = e.quotient(n_dim);
                if qt < q {
                    accepted = Some((trial, e, qt));
                    break;
                }
            }
            step = step / two;
        }
        let Some((trial, e, qt)) = accepted else {
            if iterations == 0 {
                return Err(Error::Descent("no admissible step from the initial factor".into()));
            }
            break;
        };
        iterations += 1;
        let decrease = (q - qt) / q.abs().max(T::min_positive_value());
        u = trial;
        en = e;
        q = qt;
        trace.push(DescentRow {
            iter: iterations,
            quotient: q.as_f64(),
            step: step.as_f64(),
            u_spread: relative_spread(&u).as_f64(),
        });
        if decrease < tol {
            break;
        }
    }
    log::debug!("descent stopped after {iterations} iterations at quotient {q}");
    Ok(DescentResult { u_star: u, quotient_star: q, iterations, trace })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderGap<T> {
    pub lhs: T,
    pub rhs: T,
    pub gap: T,
}

/// Both sides of `(∫|s|^{n/2}dμ_ĝ)^{2/n} ≥ ∫s dμ_ĝ/(∫dμ_ĝ)^{1−2/n}` for
/// the metric `ĝ = u^ℓ g` and an arbitrary field `s`.
pub fn holder_gap<T: Real>(grid: &ConformalGrid<T>, s: &[T], u: &[T]) -> Result<HolderGap<T>> {
    grid.check_len(s)?;
    grid.check_positive(u)?;
    let p = grid.volume_exponent();
    let half_n = T::from_usize_lossy(grid.n_dim) / T::lit(2.0);
    let two_over_n = half_n.recip();
    let w: Vec<T> = u.iter().map(|&u| u.powf(p)).collect();
    let vol = grid.integrate(&w);
    let abs_int = grid.integrate(&s.iter().zip(&w).map(|(&s, &w)| s.abs().powf(half_n) * w).collect::<Vec<_>>());
    let int = grid.integrate(&s.iter().zip(&w).map(|(&s, &w)| s * w).collect::<Vec<_>>());
    let lhs = abs_int.powf(two_over_n);
    let rhs = int / vol.powf(T::one() - two_over_n);
    Ok(HolderGap { lhs, rhs, gap: lhs - rhs })
}

/// `∫ŝ u^ℓ dμ`, which on a flat base equals `−(n−1)ℓ∫|du|²/u² dμ ≤ 0`.
pub fn negative_case_check<T: Real>(grid: &ConformalGrid<T>, u: &[T]) -> Result<T> {
    if !grid.is_flat() {
        return Err(Error::param("grid", "the identity is checked on a flat base only"));
    }
    let s_hat = conformal_scalar(grid, u)?;
    let ell = grid.ell();
    Ok(grid.integrate(&s_hat.iter().zip(u).map(|(&s, &u)| s * u.powf(ell)).collect::<Vec<_>>()))
}

/// Volume of the unit `n`-sphere in `ℝⁿ⁺¹`.
pub fn unit_sphere_volume(n: u32) -> f64 {
    use std::f64::consts::PI;
    // V_n = 2π V_{n−2}/(n−1), V_0 = 2, V_1 = 2π
    let (mut v, mut k) = if n.is_multiple_of(2) { (2.0, 0) } else { (2.0 * PI, 1) };
    while k < n {
        k += 2;
        v *= 2.0 * PI / f64::from(k - 1);
    }
    v
}

/// `n(n−1)V_n^{2/n}`, the Yamabe constant of the round sphere.
pub fn aubin_bound(n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("n", format!("need n ≥ 2, got {n}")));
    }
    let nf = f64::from(n);
    Ok(nf * (nf - 1.0) * unit_sphere_volume(n).powf(2.0 / nf))
}
