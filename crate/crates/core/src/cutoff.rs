//! Cutoff-modified instantons.
//!
//! Both families have the shape `dr²/W + r²(σ₁² + σ₂² + W σ₃²)` with
//!
//! ```text
//! Eguchi-Hanson:  W = 1 − φ(r/ε) ε⁸/r⁴,   r > ε²,  link SO(3)
//! Burns:          W = 1 − φ(r/ε) ε⁶/r²,   r > ε³,  link S³
//! ```
//!
//! where `φ` is 1 on `[0, 1]` and 0 on `[2, ∞)`. The metric is the rescaled
//! instanton for `r < ε` and exactly flat for `r > 2ε`. Since `f·a·b·c = r³`
//! the volume form is Euclidean everywhere, and the gluing only removes the
//! ball under the bolt.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::quadrature::{integrate, QuadratureOptions};
use crate::radial::{
    make_metric_with, warped_jets, LinkQuotient, MetricOptions, MetricPreset, RadialMetric, RadialProfile,
    DEFAULT_BOLT_OFFSET,
};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum BumpKind {
    /// `h(2−x) / (h(2−x) + h(x−1))` with `h(t) = e^{−1/t}`; C∞.
    #[default]
    Smooth,
    /// `1 − (6s⁵ − 15s⁴ + 10s³)`, `s = x − 1`; only C².
    Polynomial,
}

/// Monotone cutoff equal to 1 on `[0, 1]` and 0 on `[2, ∞)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BumpFunction {
    pub kind: BumpKind,
}

impl BumpFunction {
    pub fn smooth() -> Self {
        Self { kind: BumpKind::Smooth }
    }

    pub fn polynomial() -> Self {
        Self { kind: BumpKind::Polynomial }
    }

    pub fn support(&self) -> (f64, f64) {
        (0.0, 2.0)
    }

    /// `(φ, φ', φ'')` at `x ≥ 0`.
    pub fn eval<T: Real>(&self, x: T) -> Result<Jet2<T>> {
        if !(x >= T::zero()) {
            return Err(Error::param("x", format!("bump argument must be non-negative, got {x}")));
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked<T: Real>(&self, x: T) -> Jet2<T> {
        let one = T::one();
        let two = T::lit(2.0);
        if x <= one {
            return Jet2::constant(one);
        }
        if x >= two {
            return Jet2::constant(T::zero());
        }
        let v = Jet2::variable(x);
        match self.kind {
            BumpKind::Smooth => {
                // φ = 1/(1 + e^g) with g = 1/(2−x) − 1/(x−1); written through
                // φ and 1−φ separately so φ' keeps its sign near the ends
                let g = (Jet2::constant(two) - v).recip() - (v - one).recip();
                let phi = (one + g.value.exp()).recip();
                let psi = (one + (-g.value).exp()).recip();
                let slope = -(phi * psi);
                g.apply(phi, slope, phi * psi * (psi - phi))
            }
            BumpKind::Polynomial => {
                let s = v - one;
                let s3 = s.powi(3);
                Jet2::constant(one) - (s3 * s * s * T::lit(6.0) - s3 * s * T::lit(15.0) + s3 * T::lit(10.0))
            }
        }
    }

    /// `φ ∘ x` for a jet `x`.
    pub fn compose<T: Real>(&self, x: Jet2<T>) -> Jet2<T> {
        let p = self.eval_unchecked(x.value.max(T::zero()));
        x.apply(p.value, p.d1, p.d2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutoffBase {
    EguchiHanson,
    Burns,
}

impl CutoffBase {
    pub fn link(self) -> LinkQuotient {
        match self {
            CutoffBase::EguchiHanson => LinkQuotient::z2_quotient(),
            CutoffBase::Burns => LinkQuotient::full_sphere(),
        }
    }

    /// Radius of the degenerate locus: `ε²` or `ε³`.
    pub fn bolt<T: Real>(self, eps: T) -> T {
        match self {
            CutoffBase::EguchiHanson => eps * eps,
            CutoffBase::Burns => eps * eps * eps,
        }
    }

    /// `π²ε⁸/2` or `π²ε¹²/2`, the closed-form deficit constants quoted for
    /// these gluings.
    pub fn reference_deficit(self, eps: f64) -> f64 {
        let pi2 = std::f64::consts::PI.powi(2);
        match self {
            CutoffBase::EguchiHanson => pi2 * eps.powi(8) / 2.0,
            CutoffBase::Burns => pi2 * eps.powi(12) / 2.0,
        }
    }

    /// Power of `ε` governing the deficit.
    pub fn deficit_power(self) -> i32 {
        match self {
            CutoffBase::EguchiHanson => 8,
            CutoffBase::Burns => 12,
        }
    }
}

impl std::str::FromStr for CutoffBase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "eh" | "eguchihanson" => Ok(CutoffBase::EguchiHanson),
            "burns" => Ok(CutoffBase::Burns),
            _ => Err(Error::param("base", format!("unknown family `{s}` (expected eh or burns)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffFamily<T> {
    pub base: CutoffBase,
    pub bump: BumpFunction,
    pub epsilon: T,
}

impl<T: Real> CutoffFamily<T> {
    pub fn new(base: CutoffBase, epsilon: T) -> Self {
        Self { base, bump: BumpFunction::smooth(), epsilon }
    }

    pub fn with_bump(mut self, bump: BumpFunction) -> Self {
        self.bump = bump;
        self
    }

    /// Default outer edge of the sampling window, well inside the flat zone.
    pub fn default_r_max(&self) -> T {
        self.epsilon * T::lit(4.0)
    }

    /// Warp `W(r)` as a jet.
    pub fn warp(&self, r: T) -> Jet2<T> {
        warp_jet(self.base, self.bump, self.epsilon, r)
    }
}

fn warp_jet<T: Real>(base: CutoffBase, bump: BumpFunction, eps: T, r: T) -> Jet2<T> {
    let x = Jet2::variable(r);
    let phi = bump.compose(x / eps);
    let one = Jet2::constant(T::one());
    match base {
        CutoffBase::EguchiHanson => one - phi * x.powi(-4) * eps.powi(8),
        CutoffBase::Burns => one - phi * x.powi(-2) * eps.powi(6),
    }
}

pub fn modified_metric<T: Real>(family: &CutoffFamily<T>) -> Result<RadialMetric<T>> {
    modified_metric_with(family, family.default_r_max(), T::lit(DEFAULT_BOLT_OFFSET))
}

pub fn modified_metric_with<T: Real>(family: &CutoffFamily<T>, r_max: T, bolt_offset: T) -> Result<RadialMetric<T>> {
    let eps = family.epsilon;
    if !(eps > T::zero()) || !eps.is_finite() {
        return Err(Error::param("epsilon", format!("must be positive, got {eps}")));
    }
    let (base, bump) = (family.base, family.bump);
    let bolt = base.bolt(eps);
    let r_min = bolt * (T::one() + bolt_offset);
    let label = match base {
        CutoffBase::EguchiHanson => format!("eguchi-hanson cutoff ε={eps}"),
        CutoffBase::Burns => format!("burns cutoff ε={eps}"),
    };
    let profile =
        RadialProfile::new(label, r_min, r_max, (bolt, r_max), move |r| warped_jets(r, warp_jet(base, bump, eps, r)));
    make_metric_with(MetricPreset::Custom(profile), base.link(), MetricOptions { bolt_offset, r_max }).map_err(|e| {
        match e {
            Error::NonPositiveProfile { .. } => Error::param("epsilon", format!("profile not positive ({e})")),
            other => other,
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub sup_norm: f64,
    pub log_eps: f64,
    pub log_sup: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub base: CutoffBase,
    pub rows: Vec<SweepRow>,
    pub fitted_slope: f64,
    /// `ε` values whose sup-norm came out non-finite.
    pub excluded: Vec<f64>,
}

impl SweepTable {
    /// `max sup_norm/ε²`, the empirical constant in `sup ≤ C·ε²`.
    pub fn decay_constant(&self) -> f64 {
        self.rows.iter().map(|r| r.sup_norm / (r.epsilon * r.epsilon)).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("epsilon,sup_norm,log_eps,log_sup\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{}\n", r.epsilon, r.sup_norm, r.log_eps, r.log_sup));
        }
        out
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub const DEFAULT_SWEEP: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
pub const DEFAULT_SWEEP_SAMPLES: usize = 500;

pub fn decay_sweep(base: CutoffBase, eps_list: &[f64]) -> Result<SweepTable> {
    decay_sweep_with(base, eps_list, BumpFunction::smooth(), DEFAULT_SWEEP_SAMPLES)
}

/// Sup of Ricci (EH) or scalar (Burns) curvature against `ε`, with the
/// log-log slope.
pub fn decay_sweep_with(base: CutoffBase, eps_list: &[f64], bump: BumpFunction, samples: usize) -> Result<SweepTable> {
    let mut distinct: Vec<f64> = eps_list.to_vec();
    distinct.sort_by(|a, b| a.total_cmp(b));
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InsufficientSweep { needed: 3, got: distinct.len() });
    }
    let sups: Vec<(f64, Result<f64>)> = eps_list
        .par_iter()
        .map(|&eps| {
            let sup = modified_metric(&CutoffFamily::new(base, eps).with_bump(bump))
                .and_then(|m| m.sup_norms(samples))
                .map(|s| match base {
                    CutoffBase::EguchiHanson => s.sup_ricci,
                    CutoffBase::Burns => s.sup_scalar,
                });
            (eps, sup)
        })
        .collect();
    let mut rows = Vec::new();
    let mut excluded = Vec::new();
    for (eps, sup) in sups {
        let sup = sup?;
        if sup.is_finite() && sup > 0.0 {
            rows.push(SweepRow { epsilon: eps, sup_norm: sup, log_eps: eps.ln(), log_sup: sup.ln() });
        } else {
            log::warn!("sweep row ε={eps} excluded: sup norm {sup}");
            excluded.push(eps);
        }
    }
    if rows.len() < 3 {
        return Err(Error::InsufficientSweep { needed: 3, got: rows.len() });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.log_eps).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.log_sup).collect();
    Ok(SweepTable { base, rows, fitted_slope: fit_slope(&xs, &ys), excluded })
}

/// Flat-cone volume on `[0, R]` minus the modified volume on `[bolt, R]`.
///
/// The two are integrated as a single difference so that tiny deficits are
/// not lost to cancellation.
pub fn volume_deficit<T: Real>(family: &CutoffFamily<T>, big_r: T) -> Result<T> {
    let eps = family.epsilon;
    if !(big_r > eps * T::lit(2.0)) || !big_r.is_finite() {
        return Err(Error::param("R", format!("must exceed 2ε = {}, got {big_r}", eps * T::lit(2.0))));
    }
    let metric = modified_metric_with(family, big_r, T::lit(DEFAULT_BOLT_OFFSET))?;
    let bolt = family.base.bolt(eps);
    let cap = integrate(|r| r * r * r, T::zero(), bolt, QuadratureOptions::default())?;
    // the integrand vanishes identically beyond 2ε; its size before
    // cancellation is that of ∫ r³ over the transition zone
    let two_eps = eps * T::lit(2.0);
    let opts = QuadratureOptions {
        abs_tol: cap.value * T::lit(1e-13),
        magnitude: two_eps.powi(4) / T::lit(4.0),
        ..Default::default()
    };
    let diff = integrate(|r| r * r * r - metric.profile.eval(r).density(), bolt, big_r, opts)?;
    Ok((cap.value + diff.value) * T::lit(metric.link.link_volume))
}
