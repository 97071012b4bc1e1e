//! Collapsing torus bundles and left-invariant curvature.
//!
//! A bundle `T² → M → Σ` with flat, totally geodesic fibers is rescaled along
//! the fibers,
//!
//! ```text
//! g_t = (1/t) g + (1 − 1/t) π*h,
//! ```
//!
//! which leaves the horizontal distribution alone and multiplies the fiber
//! metric by `1/t`. For an orthonormal horizontal frame `w₁, w₂` write `v`
//! for the vertical part of `[w₁, w₂]`; then O'Neill's formulas give
//!
//! ```text
//! K(H) = K(Σ) − ¾ g_t(v, v),   K(P) = ¼ g_t(v, U)²,   K(V) = 0
//! ```
//!
//! for the horizontal plane, a mixed plane containing the unit vertical `U`,
//! and the vertical plane. Since `g_t(v, v) = g(v, v)/t` everything stays
//! bounded while the volume is `Vol(g)/t`.
//!
//! [`homogeneous_curvature`] is an independent Koszul-formula engine for
//! left-invariant metrics on Lie groups, used to cross-check these formulas
//! and the coframe conventions of the radial engine.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{CurvatureFrame, Riemann4};
use crate::scalar::Real;

pub const MAX_LIE_DIM: usize = 6;

/// `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants<T> {
    n: usize,
    c: Vec<T>,
}

impl<T: Real> StructureConstants<T> {
    /// Builds from the brackets `[e_i, e_j] = value·e_k` for `i < j`;
    /// antisymmetry is filled in and the Jacobi identity checked.
    pub fn new(n: usize, brackets: &[(usize, usize, usize, T)]) -> Result<Self> {
        if n == 0 || n > MAX_LIE_DIM {
            return Err(Error::param("n", format!("dimension must be in 1..={MAX_LIE_DIM}, got {n}")));
        }
        let mut c = vec![T::zero(); n * n * n];
        for &(i, j, k, v) in brackets {
            if i >= n || j >= n || k >= n {
                return Err(Error::param("brackets", format!("index out of range in [e{i}, e{j}] -> e{k}")));
            }
            if i == j {
                return Err(Error::param("brackets", "[e_i, e_i] must vanish"));
            }
            c[(i * n + j) * n + k] = c[(i * n + j) * n + k] + v;
            c[(j * n + i) * n + k] = c[(j * n + i) * n + k] - v;
        }
        let sc = Self { n, c };
        let residual = sc.jacobi_residual();
        let scale = sc.c.iter().fold(T::one(), |m, x| m.max(x.abs()));
        if residual > T::lit(1e-12) * scale * scale {
            return Err(Error::JacobiViolation { residual: residual.as_f64() });
        }
        Ok(sc)
    }

    pub fn abelian(n: usize) -> Result<Self> {
        Self::new(n, &[])
    }

    /// `su(2)` in the frame dual to `σᵢ` with `dσ₁ = 2σ₂ ∧ σ₃`:
    /// `[X_j, X_k] = −2X_i` for cyclic `(i, j, k)`.
    pub fn su2() -> Self {
        let m2 = T::lit(-2.0);
        Self::new(3, &[(1, 2, 0, m2), (2, 0, 1, m2), (0, 1, 2, m2)]).expect("su(2) satisfies Jacobi")
    }

    /// Heisenberg algebra times a line: `[e₀, e₁] = e₂`, `e₃` central.
    pub fn heisenberg_times_line() -> Self {
        Self::new(4, &[(0, 1, 2, T::one())]).expect("nilpotent algebra satisfies Jacobi")
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let n = self.n + other.n;
        let mut brackets = Vec::new();
        for (off, sc) in [(0, self), (self.n, other)] {
            for i in 0..sc.n {
                for j in (i + 1)..sc.n {
                    for k in 0..sc.n {
                        let v = sc.get(i, j, k);
                        if v != T::zero() {
                            brackets.push((i + off, j + off, k + off, v));
                        }
                    }
                }
            }
        }
        Self::new(n, &brackets)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> T {
        self.c[(i * self.n + j) * self.n + k]
    }

    /// Largest component of `[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]`.
    pub fn jacobi_residual(&self) -> T {
        let n = self.n;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut s = T::zero();
                        for m in 0..n {
                            s = s
                                + self.get(i, j, m) * self.get(m, k, l)
                                + self.get(j, k, m) * self.get(m, i, l)
                                + self.get(k, i, m) * self.get(m, j, l);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }
}

/// Full Riemann tensor of a left-invariant metric, in the orthonormal frame
/// `E_i = e_i/√g_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousCurvature<T> {
    n: usize,
    r: Vec<T>,
}

impl<T: Real> HomogeneousCurvature<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// `g(R(E_a, E_b)E_c, E_d)`.
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> T {
        let n = self.n;
        self.r[((a * n + b) * n + c) * n + d]
    }

    pub fn sectional(&self, a: usize, b: usize) -> T {
        self.get(a, b, b, a)
    }

    pub fn ricci(&self, b: usize, c: usize) -> T {
        (0..self.n).map(|a| self.get(a, b, c, a)).fold(T::zero(), |x, y| x + y)
    }

    pub fn scalar(&self) -> T {
        (0..self.n).map(|a| self.ricci(a, a)).fold(T::zero(), |x, y| x + y)
    }

    pub fn frobenius(&self) -> T {
        self.r.iter().fold(T::zero(), |s, &x| s + x * x).sqrt()
    }

    /// Four-dimensional frame data (`n` must be 4).
    pub fn frame(&self) -> Result<CurvatureFrame<T>> {
        if self.n != 4 {
            return Err(Error::param("n", format!("a curvature frame needs dimension 4, got {}", self.n)));
        }
        let mut r: Riemann4<T> = [[[[T::zero(); 4]; 4]; 4]; 4];
        for (a, ra) in r.iter_mut().enumerate() {
            for (b, rb) in ra.iter_mut().enumerate() {
                for (c, rc) in rb.iter_mut().enumerate() {
                    for (d, v) in rc.iter_mut().enumerate() {
                        *v = self.get(a, b, c, d);
                    }
                }
            }
        }
        Ok(CurvatureFrame::from_riemann(&r))
    }
}

fn orthonormal_constants<T: Real>(sc: &StructureConstants<T>, diag: &[T]) -> Result<Vec<T>> {
    let n = sc.dim();
    if diag.len() != n {
        return Err(Error::param("metric_diag", format!("expected {n} entries, got {}", diag.len())));
    }
    if let Some(bad) = diag.iter().find(|g| !(**g > T::zero()) || !g.is_finite()) {
        return Err(Error::param("metric_diag", format!("entries must be positive, got {bad}")));
    }
    let s: Vec<T> = diag.iter().map(|g| g.sqrt()).collect();
    let mut c = vec![T::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                c[(i * n + j) * n + k] = sc.get(i, j, k) * s[k] / (s[i] * s[j]);
            }
        }
    }
    Ok(c)
}

/// Curvature of the left-invariant metric `diag(metric_diag)` in the basis
/// of the structure constants.
pub fn homogeneous_curvature<T: Real>(
    sc: &StructureConstants<T>,
    metric_diag: &[T],
) -> Result<HomogeneousCurvature<T>> {
    let n = sc.dim();
    let c = orthonormal_constants(sc, metric_diag)?;
    let cc = |a: usize, b: usize, e: usize| c[(a * n + b) * n + e];
    let half = T::lit(0.5);
    // Γ[a][b][e] = g(∇_{E_a} E_b, E_e) from the Koszul formula
    let mut gamma = vec![T::zero(); n * n * n];
    for a in 0..n {
        for b in 0..n {
            for e in 0..n {
                gamma[(a * n + b) * n + e] = (cc(a, b, e) - cc(b, e, a) + cc(e, a, b)) * half;
            }
        }
    }
    let g = |a: usize, b: usize, e: usize| gamma[(a * n + b) * n + e];
    let mut r = vec![T::zero(); n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c_ in 0..n {
                for d in 0..n {
                    let mut v = T::zero();
                    for e in 0..n {
                        v = v + g(b, c_, e) * g(a, e, d) - g(a, c_, e) * g(b, e, d) - cc(a, b, e) * g(e, c_, d);
                    }
                    r[((a * n + b) * n + c_) * n + d] = v;
                }
            }
        }
    }
    Ok(HomogeneousCurvature { n, r })
}

/// Curvature of the base of the Riemannian submersion `G → G/H` where the
/// fibers are tangent to the basis directions not listed in `horizontal`.
///
/// Uses O'Neill's tensor formula
/// `R̂_abcd = R_abcd − 2⟨A_ab, A_cd⟩ + ⟨A_bc, A_ad⟩ − ⟨A_ac, A_bd⟩`
/// with `A_XY = ½[X, Y]^V`, valid when the metric is bi-invariant (or more
/// generally when `G → G/H` is a Riemannian submersion).
pub fn quotient_curvature<T: Real>(
    sc: &StructureConstants<T>,
    metric_diag: &[T],
    horizontal: &[usize],
) -> Result<HomogeneousCurvature<T>> {
    let n = sc.dim();
    if horizontal.iter().any(|&h| h >= n) || horizontal.is_empty() {
        return Err(Error::param("horizontal", "indices must be a non-empty subset of the basis"));
    }
    let total = homogeneous_curvature(sc, metric_diag)?;
    let c = orthonormal_constants(sc, metric_diag)?;
    let vertical: Vec<usize> = (0..n).filter(|i| !horizontal.contains(i)).collect();
    let half = T::lit(0.5);
    let a_dot = |x: usize, y: usize, z: usize, w: usize| {
        vertical.iter().fold(T::zero(), |s, &v| s + c[(x * n + y) * n + v] * half * c[(z * n + w) * n + v] * half)
    };
    let m = horizontal.len();
    let mut r = vec![T::zero(); m * m * m * m];
    for (ia, &a) in horizontal.iter().enumerate() {
        for (ib, &b) in horizontal.iter().enumerate() {
            for (ic, &cc) in horizontal.iter().enumerate() {
                for (id, &d) in horizontal.iter().enumerate() {
                    r[((ia * m + ib) * m + ic) * m + id] = total.get(a, b, cc, d) - T::lit(2.0) * a_dot(a, b, cc, d)
                        + a_dot(b, cc, a, d)
                        - a_dot(a, cc, b, d);
                }
            }
        }
    }
    Ok(HomogeneousCurvature { n: m, r })
}

pub type BasePoint = [f64; 2];
type BaseFn = Arc<dyn Fn(BasePoint) -> f64 + Send + Sync>;

/// A compact (orbifold) surface chart with its Gauss curvature.
///
/// Points are chart coordinates in `[0, 1]²`; cone points are excluded from
/// sampling.
#[derive(Clone)]
pub struct BaseSurface {
    pub label: String,
    pub area: f64,
    curvature: BaseFn,
    pub sup_abs_curvature: f64,
    pub cone_points: Vec<BasePoint>,
}

impl fmt::Debug for BaseSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BaseSurface")
            .field("label", &self.label)
            .field("area", &self.area)
            .field("sup_abs_curvature", &self.sup_abs_curvature)
            .field("cone_points", &self.cone_points)
            .finish()
    }
}

impl BaseSurface {
    pub fn new(
        label: impl Into<String>,
        area: f64,
        sup_abs_curvature: f64,
        cone_points: Vec<BasePoint>,
        curvature: impl Fn(BasePoint) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), area, curvature: Arc::new(curvature), sup_abs_curvature, cone_points }
    }

    pub fn flat_torus(area: f64) -> Self {
        Self::new("flat torus", area, 0.0, vec![], |_| 0.0)
    }

    /// Flat orbifold with the given cone points, e.g. the pillowcase `T²/±1`.
    pub fn flat_orbifold(area: f64, cone_points: Vec<BasePoint>) -> Self {
        Self::new("flat orbifold", area, 0.0, cone_points, |_| 0.0)
    }

    pub fn pillowcase(area: f64) -> Self {
        Self::flat_orbifold(area, vec![[0.0, 0.0], [0.5, 0.0], [0.0, 0.5], [0.5, 0.5]])
    }

    pub fn round_sphere(radius: f64) -> Self {
        let k = radius.powi(-2);
        Self::new("round sphere", 4.0 * std::f64::consts::PI * radius * radius, k, vec![], move |_| k)
    }

    /// Round hemisphere of curvature 1 (area `2π`).
    pub fn unit_hemisphere() -> Self {
        Self::new("unit hemisphere", 2.0 * std::f64::consts::PI, 1.0, vec![], |_| 1.0)
    }

    pub fn curvature(&self, p: BasePoint) -> f64 {
        (self.curvature)(p)
    }

    fn check_point(&self, p: BasePoint) -> Result<()> {
        let inside = p.iter().all(|x| (0.0..=1.0).contains(x));
        let near_cone = self.cone_points.iter().any(|c| (c[0] - p[0]).hypot(c[1] - p[1]) < 1e-9);
        if inside && !near_cone {
            Ok(())
        } else {
            Err(Error::param("point", format!("{p:?} is outside the chart or at a cone point")))
        }
    }

    /// `m × m` interior sample grid avoiding cone points.
    pub fn sample_points(&self, m: usize) -> Vec<BasePoint> {
        let mut pts = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let p = [(i as f64 + 0.37) / m as f64, (j as f64 + 0.61) / m as f64];
                if self.check_point(p).is_ok() {
                    pts.push(p);
                }
            }
        }
        pts
    }
}

pub type FiberMetric = [[f64; 2]; 2];
pub type Monodromy = [[i64; 2]; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BundleKind {
    TrivialTorusOverTorus,
    /// `Σ × T²` over an arbitrary base.
    Product,
    TwistedProduct(Monodromy),
    Nilmanifold,
}

type ObstructionFn = Arc<dyn Fn(BasePoint) -> [f64; 2] + Send + Sync>;

#[derive(Clone)]
pub struct BundleModel {
    pub kind: BundleKind,
    pub base: BaseSurface,
    pub fiber_metric: FiberMetric,
    /// Area of `(ℝ²/ℤ², f)`.
    pub fiber_area: f64,
    obstruction: ObstructionFn,
}

impl fmt::Debug for BundleModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BundleModel")
            .field("kind", &self.kind)
            .field("base", &self.base)
            .field("fiber_metric", &self.fiber_metric)
            .field("fiber_area", &self.fiber_area)
            .finish()
    }
}

fn fiber_norm2(f: &FiberMetric, v: [f64; 2]) -> f64 {
    f[0][0] * v[0] * v[0] + 2.0 * f[0][1] * v[0] * v[1] + f[1][1] * v[1] * v[1]
}

fn check_fiber_metric(f: &FiberMetric) -> Result<f64> {
    let det = f[0][0] * f[1][1] - f[0][1] * f[1][0];
    if (f[0][1] - f[1][0]).abs() > 1e-14 * f[0][0].abs().max(f[1][1].abs()) {
        return Err(Error::param("fiber_metric", "must be symmetric"));
    }
    if !(f[0][0] > 0.0 && det > 0.0) {
        return Err(Error::param("fiber_metric", "must be positive definite"));
    }
    Ok(det.sqrt())
}

fn mat_mul(a: &Monodromy, b: &Monodromy) -> Monodromy {
    let mut m = [[0i64; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

/// Order of a monodromy matrix if it is 2, 4 or 6.
pub fn monodromy_order(m: &Monodromy) -> Option<usize> {
    let id = [[1, 0], [0, 1]];
    let mut p = *m;
    for k in 1..=6 {
        if p == id {
            return [2, 4, 6].contains(&k).then_some(k);
        }
        p = mat_mul(&p, m);
    }
    None
}

fn check_isometry(m: &Monodromy, f: &FiberMetric) -> Result<()> {
    let order = monodromy_order(m)
        .ok_or_else(|| Error::NotAnIsometry(format!("monodromy {m:?} does not have order 2, 4 or 6")))?;
    let mf = [[m[0][0] as f64, m[0][1] as f64], [m[1][0] as f64, m[1][1] as f64]];
    let scale = f[0][0].abs().max(f[1][1].abs());
    for i in 0..2 {
        for j in 0..2 {
            let mut v = 0.0;
            for k in 0..2 {
                for l in 0..2 {
                    v += mf[k][i] * f[k][l] * mf[l][j];
                }
            }
            if (v - f[i][j]).abs() > 1e-12 * scale {
                return Err(Error::NotAnIsometry(format!(
                    "order-{order} monodromy {m:?} does not preserve the fiber metric {f:?}"
                )));
            }
        }
    }
    Ok(())
}

/// Builds a bundle over the given base.
///
/// The trivial bundle and twisted products carry the flat product
/// connection (`v = 0`); the nilmanifold uses the left-invariant complement
/// and `v` is the unit vector along the first lattice direction.
pub fn make_bundle(kind: BundleKind, fiber_metric: FiberMetric, base: BaseSurface) -> Result<BundleModel> {
    let fiber_area = check_fiber_metric(&fiber_metric)?;
    if !(base.area > 0.0) {
        return Err(Error::param("base", "base area must be positive"));
    }
    let obstruction: ObstructionFn = match kind {
        BundleKind::TrivialTorusOverTorus | BundleKind::Product => Arc::new(|_| [0.0, 0.0]),
        BundleKind::TwistedProduct(m) => {
            check_isometry(&m, &fiber_metric)?;
            Arc::new(|_| [0.0, 0.0])
        }
        BundleKind::Nilmanifold => {
            let s = fiber_metric[0][0].sqrt().recip();
            Arc::new(move |_| [s, 0.0])
        }
    };
    Ok(BundleModel { kind, base, fiber_metric, fiber_area, obstruction })
}

impl BundleModel {
    pub fn obstruction(&self, p: BasePoint) -> [f64; 2] {
        (self.obstruction)(p)
    }

    /// `Vol(M, g)` at `t = 1`.
    pub fn volume(&self) -> f64 {
        self.base.area * self.fiber_area
    }
}

#[derive(Clone, Debug)]
pub struct SubmersionMetric {
    pub bundle: BundleModel,
    pub t: f64,
}

pub fn collapse_metric(bundle: &BundleModel, t: f64) -> Result<SubmersionMetric> {
    if !(t >= 1.0) || !t.is_finite() {
        return Err(Error::param("t", format!("collapse parameter must be ≥ 1, got {t}")));
    }
    Ok(SubmersionMetric { bundle: bundle.clone(), t })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneillCurvatures {
    pub k_h: f64,
    pub k_p: f64,
    pub k_v: f64,
}

impl SubmersionMetric {
    /// `g_t` on a tangent vector split as (orthonormal horizontal
    /// components, fiber-coordinate vertical components).
    pub fn quadratic_form(&self, h: [f64; 2], v: [f64; 2]) -> f64 {
        h[0] * h[0] + h[1] * h[1] + self.vertical_norm2(v)
    }

    pub fn vertical_norm2(&self, v: [f64; 2]) -> f64 {
        fiber_norm2(&self.bundle.fiber_metric, v) / self.t
    }

    pub fn volume(&self) -> f64 {
        self.bundle.volume() / self.t
    }

    /// Horizontal, maximal mixed and vertical sectional curvatures.
    ///
    /// The mixed value is for the plane whose vertical direction is parallel
    /// to `v`, which maximises `K(P)`.
    pub fn oneill_at(&self, p: BasePoint) -> Result<OneillCurvatures> {
        self.bundle.base.check_point(p)?;
        let v2 = self.vertical_norm2(self.bundle.obstruction(p));
        Ok(OneillCurvatures { k_h: self.bundle.base.curvature(p) - 0.75 * v2, k_p: 0.25 * v2, k_v: 0.0 })
    }

    /// `K(P) = ¼ g_t(v, U)²` for the mixed plane with vertical direction
    /// `u` (fiber coordinates, any length).
    pub fn mixed_curvature(&self, p: BasePoint, u: [f64; 2]) -> Result<f64> {
        self.bundle.base.check_point(p)?;
        let nu = self.vertical_norm2(u);
        if !(nu > 0.0) {
            return Err(Error::param("u", "vertical direction must be non-zero"));
        }
        let v = self.bundle.obstruction(p);
        let f = &self.bundle.fiber_metric;
        let dot = (f[0][0] * v[0] * u[0] + f[0][1] * (v[0] * u[1] + v[1] * u[0]) + f[1][1] * v[1] * u[1]) / self.t;
        Ok(0.25 * dot * dot / nu)
    }
}

impl SubmersionMetric {
    /// Full curvature of `g_t` over a base point.
    ///
    /// Exact for flat connections (locally `Σ × T²`) and for a constant
    /// obstruction over a flat base (the nilmanifold, via the left-invariant
    /// engine).
    pub fn frame_at(&self, p: BasePoint) -> Result<CurvatureFrame<f64>> {
        self.bundle.base.check_point(p)?;
        let k = self.bundle.base.curvature(p);
        let v = self.bundle.obstruction(p);
        let v_norm = fiber_norm2(&self.bundle.fiber_metric, v).sqrt();
        if v_norm == 0.0 {
            let mut r: Riemann4<f64> = [[[[0.0; 4]; 4]; 4]; 4];
            r[0][1][1][0] = k;
            r[1][0][0][1] = k;
            r[0][1][0][1] = -k;
            r[1][0][1][0] = -k;
            return Ok(CurvatureFrame::from_riemann(&r));
        }
        if k != 0.0 {
            return Err(Error::param("bundle", "curvature frame needs a flat base when v ≠ 0"));
        }
        let sc = StructureConstants::new(4, &[(0, 1, 2, v_norm)])?;
        homogeneous_curvature(&sc, &[1.0, 1.0, 1.0 / self.t, 1.0 / self.t])?.frame()
    }
}

pub fn oneill_at(metric: &SubmersionMetric, p: BasePoint) -> Result<OneillCurvatures> {
    metric.oneill_at(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseRow {
    pub t: f64,
    pub volume: f64,
    pub sup_kh: f64,
    pub sup_kp: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseSweep {
    pub rows: Vec<CollapseRow>,
}

impl CollapseSweep {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,vol,sup_KH,sup_KP\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.t, r.volume, r.sup_kh, r.sup_kp));
        }
        out
    }
}

/// Volumes and sampled sup-norms of `K(H)`, `K(P)` along `t_list`.
pub fn collapse_sweep(bundle: &BundleModel, t_list: &[f64], grid: usize) -> Result<CollapseSweep> {
    let points = bundle.base.sample_points(grid.max(1));
    let rows = t_list
        .par_iter()
        .map(|&t| {
            let m = collapse_metric(bundle, t)?;
            let mut sup_kh = 0.0f64;
            let mut sup_kp = 0.0f64;
            for &p in &points {
                let k = m.oneill_at(p)?;
                sup_kh = sup_kh.max(k.k_h.abs());
                sup_kp = sup_kp.max(k.k_p.abs());
            }
            Ok(CollapseRow { t, volume: m.volume(), sup_kh, sup_kp })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CollapseSweep { rows })
}

/// Bound on `|∫ χ-integrand dμ|` for a metric with `|K| ≤ Λ` and volume `V`.
///
/// The Euler integrand is at most `|𝓡|²/8π²`, each of the 36 operator
/// entries is at most `2Λ` in absolute value, hence `18Λ²V/π²`.
pub fn gauss_bonnet_bound(lambda: f64, volume: f64) -> f64 {
    18.0 * lambda * lambda * volume / std::f64::consts::PI.powi(2)
}
