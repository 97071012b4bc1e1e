//! Curvature engine for diagonal SU(2)-invariant cohomogeneity-one metrics
//!
//! ```text
//! g = f(r)² dr² + a(r)² σ₁² + b(r)² σ₂² + c(r)² σ₃²,   dσ₁ = 2 σ₂ ∧ σ₃ (cyclic)
//! ```
//!
//! With this normalisation `σ₁² + σ₂² + σ₃²` is the unit round metric on `S³`
//! and the flat metric on `ℝ⁴` is `f = 1, a = b = c = r`.
//!
//! Curvature comes from the orthonormal frame `E₀ = f⁻¹∂_r, Eᵢ = aᵢ⁻¹Xᵢ`
//! (`Xᵢ` dual to `σᵢ`). Its brackets are
//!
//! ```text
//! [E₀, Eᵢ] = −(aᵢ'/(f aᵢ)) Eᵢ,    [Eⱼ, Eₖ] = −(2aᵢ/(aⱼaₖ)) Eᵢ
//! ```
//!
//! The Koszul formula turns these structure functions into connection
//! coefficients and the Riemann tensor follows from
//! `R_abcd = E_a(Γ_bcd) − E_b(Γ_acd) + Γ_bceΓ_aed − Γ_aceΓ_bed − c_abeΓ_ecd`.
//! Only `E₀` differentiates (everything depends on `r` alone), and the
//! needed `r`-derivatives come straight from the profile jets.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{CurvatureFrame, Riemann4};
use crate::jet::Jet2;
use crate::quadrature::{integrate, QuadratureOptions};
use crate::scalar::Real;

/// Default relative offset kept between the degenerate locus and `r_min`.
pub const DEFAULT_BOLT_OFFSET: f64 = 1e-3;
/// Default outer radius of the preset charts.
pub const DEFAULT_R_MAX: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileJets<T> {
    pub f: Jet2<T>,
    pub a: Jet2<T>,
    pub b: Jet2<T>,
    pub c: Jet2<T>,
}

impl<T: Real> ProfileJets<T> {
    fn scale(self, k: T) -> Self {
        Self { f: self.f * k, a: self.a * k, b: self.b * k, c: self.c * k }
    }

    /// Volume density `f·a·b·c`.
    pub fn density(&self) -> T {
        self.f.value * self.a.value * self.b.value * self.c.value
    }
}

pub type ProfileFn<T> = Arc<dyn Fn(T) -> ProfileJets<T> + Send + Sync>;

/// The four profile functions together with their domain.
///
/// `r_min`/`r_max` bound the window where curvature may be evaluated;
/// `closure` is the wider interval over which the volume density is
/// integrable (it includes the degenerate locus, e.g. a bolt).
#[derive(Clone)]
pub struct RadialProfile<T> {
    pub label: String,
    eval: ProfileFn<T>,
    pub r_min: T,
    pub r_max: T,
    pub closure: (T, T),
}

impl<T: fmt::Debug> fmt::Debug for RadialProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("label", &self.label)
            .field("r_min", &self.r_min)
            .field("r_max", &self.r_max)
            .field("closure", &self.closure)
            .finish()
    }
}

impl<T: Real> RadialProfile<T> {
    pub fn new(
        label: impl Into<String>,
        r_min: T,
        r_max: T,
        closure: (T, T),
        eval: impl Fn(T) -> ProfileJets<T> + Send + Sync + 'static,
    ) -> Self {
        Self { label: label.into(), eval: Arc::new(eval), r_min, r_max, closure }
    }

    pub fn eval(&self, r: T) -> ProfileJets<T> {
        (self.eval)(r)
    }

    /// Same functions restricted/extended to a different outer radius.
    pub fn with_r_max(&self, r_max: T) -> Self {
        let mut p = self.clone();
        p.r_max = r_max;
        p.closure.1 = r_max;
        p
    }

    /// Checks `f, a, b, c > 0` on `samples` points of the evaluation window.
    pub fn check_positive(&self, samples: usize) -> Result<()> {
        for r in sample_grid(self.r_min, self.r_max, samples.max(2)) {
            let j = self.eval(r);
            for (name, v) in [("f", j.f.value), ("a", j.a.value), ("b", j.b.value), ("c", j.c.value)] {
                if !(v > T::zero()) || !v.is_finite() {
                    return Err(Error::NonPositiveProfile { which: name, r: r.as_f64(), value: v.as_f64() });
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkKind {
    /// `S³`
    FullSphere,
    /// `SO(3) = S³/±1`
    Z2Quotient,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkQuotient {
    pub kind: LinkKind,
    pub link_volume: f64,
}

impl LinkQuotient {
    pub fn full_sphere() -> Self {
        Self { kind: LinkKind::FullSphere, link_volume: 2.0 * std::f64::consts::PI.powi(2) }
    }

    pub fn z2_quotient() -> Self {
        Self { kind: LinkKind::Z2Quotient, link_volume: std::f64::consts::PI.powi(2) }
    }

    pub fn of(kind: LinkKind) -> Self {
        match kind {
            LinkKind::FullSphere => Self::full_sphere(),
            LinkKind::Z2Quotient => Self::z2_quotient(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RadialMetric<T> {
    pub profile: RadialProfile<T>,
    pub link: LinkQuotient,
}

#[derive(Clone, Debug)]
pub enum MetricPreset<T> {
    /// `dr²/(1−A/r⁴) + r²(σ₁² + σ₂² + (1−A/r⁴)σ₃²)`, `r > A^{1/4}`
    EguchiHanson(T),
    /// `dr²/(1−1/r²) + r²(σ₁² + σ₂² + (1−1/r²)σ₃²)`, `r > 1`
    Burns,
    Flat,
    /// Geodesic polar chart of the round `S⁴` of the given radius.
    Round(T),
    Custom(RadialProfile<T>),
}

#[derive(Clone, Copy, Debug)]
pub struct MetricOptions<T> {
    pub bolt_offset: T,
    pub r_max: T,
}

impl<T: Real> Default for MetricOptions<T> {
    fn default() -> Self {
        Self { bolt_offset: T::lit(DEFAULT_BOLT_OFFSET), r_max: T::lit(DEFAULT_R_MAX) }
    }
}

/// `dr²/W + r²(σ₁² + σ₂² + W σ₃²)` for a warp jet `W(r)`.
pub fn warped_jets<T: Real>(r: T, w: Jet2<T>) -> ProfileJets<T> {
    let x = Jet2::variable(r);
    let sw = w.sqrt();
    ProfileJets { f: sw.recip(), a: x, b: x, c: x * sw }
}

pub fn flat_jets<T: Real>(r: T) -> ProfileJets<T> {
    let x = Jet2::variable(r);
    ProfileJets { f: Jet2::constant(T::one()), a: x, b: x, c: x }
}

pub fn make_metric<T: Real>(preset: MetricPreset<T>, link: LinkQuotient) -> Result<RadialMetric<T>> {
    make_metric_with(preset, link, MetricOptions::default())
}

pub fn make_metric_with<T: Real>(
    preset: MetricPreset<T>,
    link: LinkQuotient,
    opts: MetricOptions<T>,
) -> Result<RadialMetric<T>> {
    let delta = opts.bolt_offset;
    if !(delta >= T::zero()) {
        return Err(Error::param("bolt_offset", "must be non-negative"));
    }
    let one = T::one();
    let profile = match preset {
        MetricPreset::EguchiHanson(a) => {
            if !(a > T::zero()) || !a.is_finite() {
                return Err(Error::param("A", format!("Eguchi-Hanson parameter must be positive, got {a}")));
            }
            let bolt = a.sqrt().sqrt();
            let r_min = bolt * (one + delta);
            check_r_max(r_min, opts.r_max)?;
            RadialProfile::new(format!("eguchi-hanson(A={a})"), r_min, opts.r_max, (bolt, opts.r_max), move |r| {
                let x = Jet2::variable(r);
                warped_jets(r, Jet2::constant(T::one()) - x.powi(-4) * a)
            })
        }
        MetricPreset::Burns => {
            let r_min = one + delta;
            check_r_max(r_min, opts.r_max)?;
            RadialProfile::new("burns", r_min, opts.r_max, (one, opts.r_max), |r| {
                let x = Jet2::variable(r);
                warped_jets(r, Jet2::constant(T::one()) - x.powi(-2))
            })
        }
        MetricPreset::Flat => {
            check_r_max(T::zero(), opts.r_max)?;
            RadialProfile::new("flat", T::zero(), opts.r_max, (T::zero(), opts.r_max), flat_jets)
        }
        MetricPreset::Round(radius) => {
            if !(radius > T::zero()) {
                return Err(Error::param("radius", "round radius must be positive"));
            }
            let top = T::PI() * radius;
            let pad = top * delta;
            RadialProfile::new(format!("round(R={radius})"), pad, top - pad, (T::zero(), top), move |r| {
                let s = (Jet2::variable(r) / radius).sin() * radius;
                ProfileJets { f: Jet2::constant(T::one()), a: s, b: s, c: s }
            })
        }
        MetricPreset::Custom(p) => {
            check_r_max(p.r_min, p.r_max)?;
            p.check_positive(256)?;
            p
        }
    };
    Ok(RadialMetric { profile, link })
}

fn check_r_max<T: Real>(r_min: T, r_max: T) -> Result<()> {
    if r_max > r_min && r_max.is_finite() {
        Ok(())
    } else {
        Err(Error::param("r_max", format!("must exceed r_min = {r_min}, got {r_max}")))
    }
}

/// Geometric grid of `n` points in `(lo, hi]` (`lo` itself excluded).
///
/// Grids nest under doubling: the points for `n` are a subset of those for
/// `2n`. A zero lower end is replaced by `hi·DEFAULT_BOLT_OFFSET`.
pub fn sample_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let lo = if lo > T::zero() { lo } else { hi * T::lit(DEFAULT_BOLT_OFFSET) };
    let ratio = (hi / lo).ln();
    let nf = T::from_usize_lossy(n);
    (1..=n).map(|k| if k == n { hi } else { lo * (ratio * T::from_usize_lossy(k) / nf).exp() }).collect()
}

type Tensor3<T> = [[[T; 4]; 4]; 4];

/// Riemann tensor at `r` from the profile jets.
pub fn riemann_at<T: Real>(j: &ProfileJets<T>) -> Riemann4<T> {
    let zero = Jet2::constant(T::zero());
    let two = T::lit(2.0);
    let f1 = Jet2::first_order(j.f.value, j.f.d1);
    let prof = [j.a, j.b, j.c];
    let p1: [Jet2<T>; 3] = std::array::from_fn(|i| Jet2::first_order(prof[i].value, prof[i].d1));

    // structure functions c[a][b][e] = g([E_a, E_b], E_e), as first-order jets in r
    let mut c: Tensor3<Jet2<T>> = [[[zero; 4]; 4]; 4];
    for i in 0..3 {
        let alpha = -(prof[i].derivative() / (f1 * p1[i]));
        c[0][i + 1][i + 1] = alpha;
        c[i + 1][0][i + 1] = -alpha;
        let (jj, kk) = ((i + 1) % 3, (i + 2) % 3);
        let beta = -(p1[i] * two) / (p1[jj] * p1[kk]);
        c[jj + 1][kk + 1][i + 1] = beta;
        c[kk + 1][jj + 1][i + 1] = -beta;
    }

    // Γ[a][b][e] = g(∇_{E_a} E_b, E_e)
    let half = T::lit(0.5);
    let mut gamma: Tensor3<Jet2<T>> = [[[zero; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for e in 0..4 {
                gamma[a][b][e] = (c[a][b][e] - c[b][e][a] + c[e][a][b]) * half;
            }
        }
    }

    let inv_f = j.f.value.recip();
    let deriv = |a: usize, g: &Jet2<T>| if a == 0 { g.d1 * inv_f } else { T::zero() };

    let mut r = [[[[T::zero(); 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for cc in 0..4 {
                for d in 0..4 {
                    let mut v = deriv(a, &gamma[b][cc][d]) - deriv(b, &gamma[a][cc][d]);
                    for e in 0..4 {
                        v = v + gamma[b][cc][e].value * gamma[a][e][d].value
                            - gamma[a][cc][e].value * gamma[b][e][d].value
                            - c[a][b][e].value * gamma[e][cc][d].value;
                    }
                    r[a][b][cc][d] = v;
                }
            }
        }
    }
    r
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSupNorms {
    pub sup_ricci: f64,
    pub sup_scalar: f64,
    pub sup_sec: f64,
    pub sup_riemann: f64,
}

impl CurvatureSupNorms {
    pub fn absorb<T: Real>(&mut self, frame: &CurvatureFrame<T>) {
        self.sup_ricci = self.sup_ricci.max(frame.max_abs_ricci().as_f64());
        self.sup_scalar = self.sup_scalar.max(frame.scalar.abs().as_f64());
        self.sup_sec = self.sup_sec.max(frame.sec_min.abs().as_f64()).max(frame.sec_max.abs().as_f64());
        self.sup_riemann = self.sup_riemann.max(frame.riemann_norm().as_f64());
    }

    pub fn merge(mut self, o: Self) -> Self {
        self.sup_ricci = self.sup_ricci.max(o.sup_ricci);
        self.sup_scalar = self.sup_scalar.max(o.sup_scalar);
        self.sup_sec = self.sup_sec.max(o.sup_sec);
        self.sup_riemann = self.sup_riemann.max(o.sup_riemann);
        self
    }
}

impl<T: Real> RadialMetric<T> {
    pub fn r_min(&self) -> T {
        self.profile.r_min
    }

    pub fn r_max(&self) -> T {
        self.profile.r_max
    }

    /// The metric multiplied by the constant `λ²`.
    pub fn scaled(&self, lambda: T) -> Self {
        let inner = self.profile.clone();
        let profile = RadialProfile::new(
            format!("{}×{lambda}²", inner.label),
            inner.r_min,
            inner.r_max,
            inner.closure,
            move |r| inner.eval(r).scale(lambda),
        );
        Self { profile, link: self.link }
    }

    pub fn curvature_at(&self, r: T) -> Result<CurvatureFrame<T>> {
        let (lo, hi) = (self.profile.r_min, self.profile.r_max);
        if !(r > lo && r <= hi) {
            return Err(Error::OutOfDomain { r: r.as_f64(), lo: lo.as_f64(), hi: hi.as_f64() });
        }
        let jets = self.profile.eval(r);
        Ok(CurvatureFrame::from_riemann(&riemann_at(&jets)))
    }

    /// Suprema of frame norms over the geometric grid of `samples` points in
    /// `(r_min, r_max]`.
    pub fn sup_norms(&self, samples: usize) -> Result<CurvatureSupNorms> {
        if samples < 2 {
            return Err(Error::param("samples", "need at least two samples"));
        }
        if !(self.profile.r_max > self.profile.r_min) {
            return Err(Error::param("domain", "empty radial domain"));
        }
        let grid = sample_grid(self.profile.r_min, self.profile.r_max, samples);
        grid.par_iter()
            .map(|&r| {
                let frame = self.curvature_at(r)?;
                let mut s = CurvatureSupNorms::default();
                s.absorb(&frame);
                Ok(s)
            })
            .try_reduce(CurvatureSupNorms::default, |a, b| Ok(a.merge(b)))
    }

    pub fn volume(&self, r_lo: T, r_hi: T) -> Result<T> {
        self.volume_with(r_lo, r_hi, QuadratureOptions::default())
    }

    /// `link_volume · ∫ f a b c dr` over `[r_lo, r_hi]`.
    pub fn volume_with(&self, r_lo: T, r_hi: T, opts: QuadratureOptions<T>) -> Result<T> {
        let (floor, ceil) = self.profile.closure;
        if !(floor <= r_lo && r_lo < r_hi && r_hi <= ceil) {
            return Err(Error::BadRange {
                lo: r_lo.as_f64(),
                hi: r_hi.as_f64(),
                floor: floor.as_f64(),
                ceil: ceil.as_f64(),
            });
        }
        let est = integrate(|r| self.profile.eval(r).density(), r_lo, r_hi, opts)?;
        Ok(est.value * T::lit(self.link.link_volume))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn eh(a: f64) -> RadialMetric<f64> {
        make_metric(MetricPreset::EguchiHanson(a), LinkQuotient::z2_quotient()).unwrap()
    }

    #[test]
    fn eguchi_hanson_profile_matches_closed_form() {
        let m = eh(1.0);
        let r = 1.7;
        let j = m.profile.eval(r);
        let w: f64 = 1.0 - 1.0 / r.powi(4);
        assert!((j.c.value.powi(2) - r * r * w).abs() < 1e-14);
        assert!((j.f.value.powi(2) - 1.0 / w).abs() < 1e-13);
        assert!((m.r_min() - 1.001).abs() < 1e-15);
    }

    #[test]
    fn burns_profile_matches_closed_form() {
        let m: RadialMetric<f64> = make_metric(MetricPreset::Burns, LinkQuotient::full_sphere()).unwrap();
        let r = 3.0;
        let j = m.profile.eval(r);
        assert!((j.c.value.powi(2) - r * r * (1.0 - 1.0 / (r * r))).abs() < 1e-13);
    }

    #[test]
    fn non_positive_parameter_rejected() {
        assert!(make_metric(MetricPreset::EguchiHanson(0.0), LinkQuotient::z2_quotient()).is_err());
        assert!(make_metric(MetricPreset::EguchiHanson(-1.0), LinkQuotient::z2_quotient()).is_err());
    }

    #[test]
    fn custom_profile_must_be_positive() {
        let bad = RadialProfile::new("bad", 0.5, 2.0, (0.5, 2.0), |r: f64| {
            let x = Jet2::variable(r);
            ProfileJets { f: Jet2::constant(1.0), a: x, b: x, c: x - 1.0 }
        });
        let err = make_metric(MetricPreset::Custom(bad), LinkQuotient::full_sphere()).unwrap_err();
        assert!(matches!(err, Error::NonPositiveProfile { which: "c", .. }));
    }

    #[test]
    fn flat_is_flat() {
        let m: RadialMetric<f64> = make_metric(MetricPreset::Flat, LinkQuotient::full_sphere()).unwrap();
        for r in [0.1, 1.0, 7.5] {
            let f = m.curvature_at(r).unwrap();
            assert!(f.riemann_norm() < 1e-13, "r={r}: {}", f.riemann_norm());
        }
        let s = m.sup_norms(64).unwrap();
        assert!(s.sup_ricci < 1e-10 && s.sup_riemann < 1e-10, "{s:?}");
    }

    #[test]
    fn round_chart_has_unit_sectional_curvature() {
        let m: RadialMetric<f64> = make_metric(MetricPreset::Round(1.0), LinkQuotient::full_sphere()).unwrap();
        for r in [0.3, 1.0, 2.2] {
            let f = m.curvature_at(r).unwrap();
            assert!((f.scalar - 12.0).abs() < 1e-11);
            assert!((f.sec_min - 1.0).abs() < 1e-9 && (f.sec_max - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn eguchi_hanson_is_ricci_flat_and_anti_self_dual() {
        let f = eh(1.0).curvature_at(2.0).unwrap();
        assert!(f.max_abs_ricci() < 1e-13);
        assert!(f.w_plus_norm2 < 1e-24);
        assert!(f.w_minus_norm2 > 1e-3);
    }

    #[test]
    fn burns_is_scalar_flat_not_ricci_flat() {
        let m: RadialMetric<f64> = make_metric(MetricPreset::Burns, LinkQuotient::full_sphere()).unwrap();
        let f = m.curvature_at(3.0).unwrap();
        assert!(f.scalar.abs() < 1e-13);
        assert!(f.max_abs_ricci() > 1e-3);
    }

    #[test]
    fn out_of_domain_rejected() {
        let m = eh(1.0);
        assert!(matches!(m.curvature_at(0.9), Err(Error::OutOfDomain { .. })));
        assert!(m.curvature_at(25.0).is_err());
    }

    #[test]
    fn flat_ball_volumes() {
        let m: RadialMetric<f64> = make_metric(MetricPreset::Flat, LinkQuotient::full_sphere()).unwrap();
        assert!((m.volume(0.0, 1.0).unwrap() - PI * PI / 2.0).abs() < 1e-13);
        let q: RadialMetric<f64> = make_metric(MetricPreset::Flat, LinkQuotient::z2_quotient()).unwrap();
        assert!((q.volume(0.0, 1.0).unwrap() - PI * PI / 4.0).abs() < 1e-13);
        assert!(matches!(q.volume(1.0, 0.5), Err(Error::BadRange { .. })));
    }

    #[test]
    fn round_sphere_volume() {
        let m: RadialMetric<f64> = make_metric(MetricPreset::Round(1.0), LinkQuotient::full_sphere()).unwrap();
        let v = m.volume(0.0, PI).unwrap();
        assert!((v - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn grids_nest_under_doubling() {
        let a = sample_grid(0.5f64, 20.0, 50);
        let b = sample_grid(0.5, 20.0, 100);
        for (k, x) in a.iter().enumerate() {
            assert!((x - b[2 * k + 1]).abs() <= 1e-12 * x);
        }
    }

    #[test]
    fn sup_norms_non_decreasing_under_refinement() {
        let m = eh(1.0);
        let coarse = m.sup_norms(40).unwrap();
        let fine = m.sup_norms(80).unwrap();
        assert!(fine.sup_riemann >= coarse.sup_riemann);
        assert!(fine.sup_sec >= coarse.sup_sec);
    }

    #[test]
    fn works_in_single_precision() {
        let m: RadialMetric<f32> = make_metric(MetricPreset::Round(1.0), LinkQuotient::full_sphere()).unwrap();
        let f = m.curvature_at(1.0).unwrap();
        assert!((f.scalar - 12.0).abs() < 1e-3);
    }
}
