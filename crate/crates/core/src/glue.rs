//! Chartwise assembly of collapsing metrics on elliptic surfaces.
//!
//! The flat orbifold `V = (ℝ × T³)/ℤ₂`, with `ĝ_t = dx² + dθ² + f/t` and the
//! involution acting by `−1` on every factor, has 8 singular points at
//! `x = 0`, `θ ∈ {0, π}` and the four half-lattice points of `(T², f)`.
//! Replacing the `2ε_t`-ball around each one with a cutoff Eguchi-Hanson cap,
//! `ε_t = î/(4√t)` with `î = min(ι, π)` and `ι` the injectivity radius of
//! `(T², f)`, gives a model of the rational elliptic surface minus a fiber.
//! Its end `[0, ∞) × S¹ × (T², f/t)` is truncated at `|x| = a`.
//!
//! A surface model joins a torus bundle block to `k` such pieces through
//! necks `[0, 1] × S¹ × (T², f/t)`, and `ℓ` Burns caps of size
//! `ε = ϱ_t/(2ℓ)` are grafted into a flat region. Every chart carries its own
//! volume and curvature sup-norms. Families are certified by aggregating them
//! over a list of `t`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cutoff::{modified_metric_with, BumpFunction, CutoffBase, CutoffFamily};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureOptions};
use crate::radial::DEFAULT_BOLT_OFFSET;
use crate::submersion::{collapse_metric, BaseSurface, BundleKind, BundleModel, FiberMetric};
use crate::surface::{blow_up_surface, Kodaira, Parity, SurfaceData};

pub const DEFAULT_TRUNCATION: f64 = 4.0;
pub const DEFAULT_CAP_SAMPLES: usize = 200;
/// Unit-square lattice scaled so that its injectivity radius is 1.
pub const DEFAULT_FIBER: FiberMetric = [[4.0, 0.0], [0.0, 4.0]];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ChartKind {
    FlatBlock,
    CylinderNeck,
    /// Torus-bundle region over a base surface.
    BundleBlock,
    EHCap(f64),
    BurnsCap(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub kind: ChartKind,
    pub volume: f64,
    pub sup_ricci: f64,
    pub sup_scalar: f64,
    /// `∫|W₊|² dμ` over the chart.
    pub w_plus_l2: f64,
    /// `∫|W₋|² dμ` over the chart.
    pub w_minus_l2: f64,
}

impl Chart {
    fn flat(kind: ChartKind, volume: f64) -> Self {
        Self { kind, volume, sup_ricci: 0.0, sup_scalar: 0.0, w_plus_l2: 0.0, w_minus_l2: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub eh_epsilon: Option<f64>,
    pub burns_epsilon: Option<f64>,
    /// Radius of the Euclidean ball that hosts the Burns caps.
    pub flat_radius: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartedFamily {
    pub t: f64,
    pub charts: Vec<Chart>,
    pub schedule: Schedule,
    pub surface_tag: Option<SurfaceData>,
}

impl ChartedFamily {
    pub fn total_volume(&self) -> f64 {
        self.charts.iter().map(|c| c.volume).sum()
    }

    pub fn sup_ricci(&self) -> f64 {
        self.charts.iter().fold(0.0, |m, c| m.max(c.sup_ricci))
    }

    pub fn sup_scalar(&self) -> f64 {
        self.charts.iter().fold(0.0, |m, c| m.max(c.sup_scalar))
    }

    pub fn w_plus_l2(&self) -> f64 {
        self.charts.iter().map(|c| c.w_plus_l2).sum()
    }

    pub fn w_minus_l2(&self) -> f64 {
        self.charts.iter().map(|c| c.w_minus_l2).sum()
    }

    pub fn count(&self, pred: impl Fn(&ChartKind) -> bool) -> usize {
        self.charts.iter().filter(|c| pred(&c.kind)).count()
    }
}

/// Shortest non-zero vector length of `ℤ²` under the metric `f`.
pub fn systole(f: &FiberMetric) -> f64 {
    let dot = |u: [f64; 2], v: [f64; 2]| {
        f[0][0] * u[0] * v[0] + f[0][1] * (u[0] * v[1] + u[1] * v[0]) + f[1][1] * u[1] * v[1]
    };
    // Lagrange-Gauss reduction
    let (mut u, mut v) = ([1.0, 0.0], [0.0, 1.0]);
    if dot(u, u) > dot(v, v) {
        std::mem::swap(&mut u, &mut v);
    }
    for _ in 0..64 {
        let m = (dot(u, v) / dot(u, u)).round();
        v = [v[0] - m * u[0], v[1] - m * u[1]];
        if dot(v, v) >= dot(u, u) {
            break;
        }
        std::mem::swap(&mut u, &mut v);
    }
    dot(u, u).sqrt()
}

/// Injectivity radius of the flat torus `(ℝ²/ℤ², f)`.
pub fn injectivity_radius(f: &FiberMetric) -> f64 {
    systole(f) / 2.0
}

fn fiber_area(f: &FiberMetric) -> Result<f64> {
    let det = f[0][0] * f[1][1] - f[0][1] * f[1][0];
    if !(f[0][0] > 0.0 && det > 0.0) || (f[0][1] - f[1][0]).abs() > 1e-14 * f[0][0] {
        return Err(Error::param("fiber_metric", "must be symmetric positive definite"));
    }
    Ok(det.sqrt())
}

fn check_t(t: f64) -> Result<()> {
    if t >= 1.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::param("t", format!("must be ≥ 1, got {t}")))
    }
}

/// `ε_t = min(ι, π)/(4√t)`.
pub fn eh_schedule(f: &FiberMetric, t: f64) -> f64 {
    injectivity_radius(f).min(PI) / (4.0 * t.sqrt())
}

/// Cutoff cap over `[bolt, 2ε]` with its certificate data.
pub fn cap_chart(base: CutoffBase, eps: f64, bump: BumpFunction, samples: usize) -> Result<Chart> {
    let fam = CutoffFamily::new(base, eps).with_bump(bump);
    let outer = 2.0 * eps;
    let sampled = modified_metric_with(&fam, outer, DEFAULT_BOLT_OFFSET)?;
    let sup = sampled.sup_norms(samples)?;
    let exact = modified_metric_with(&fam, outer, 0.0)?;
    let bolt = base.bolt(eps);
    let volume = exact.volume(bolt, outer)?;
    let link = exact.link.link_volume;
    let weyl = |plus: bool| -> Result<f64> {
        // smooth across the bolt; scale tolerance to the curvature size
        let opts = QuadratureOptions { abs_tol: 1e-11, magnitude: 1.0, ..Default::default() };
        let est = integrate(
            |r| match exact.curvature_at(r) {
                Ok(fr) => (if plus { fr.w_plus_norm2 } else { fr.w_minus_norm2 }) * exact.profile.eval(r).density(),
                Err(_) => 0.0,
            },
            bolt,
            outer,
            opts,
        )?;
        Ok(est.value * link)
    };
    let kind = match base {
        CutoffBase::EguchiHanson => ChartKind::EHCap(eps),
        CutoffBase::Burns => ChartKind::BurnsCap(eps),
    };
    Ok(Chart {
        kind,
        volume,
        sup_ricci: sup.sup_ricci,
        sup_scalar: sup.sup_scalar,
        w_plus_l2: weyl(true)?,
        w_minus_l2: weyl(false)?,
    })
}

/// Euclidean volume of the `2ε`-ball a cap replaces.
fn replaced_ball(base: CutoffBase, eps: f64) -> f64 {
    base.link().link_volume * (2.0 * eps).powi(4) / 4.0
}

/// Options shared by the orbifold and surface families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlueOptions {
    pub truncation: f64,
    pub bump: BumpFunction,
    pub cap_samples: usize,
}

impl Default for GlueOptions {
    fn default() -> Self {
        Self { truncation: DEFAULT_TRUNCATION, bump: BumpFunction::smooth(), cap_samples: DEFAULT_CAP_SAMPLES }
    }
}

/// The 8 singular points of `V` in `(x, θ, y₁, y₂)`, `y` in lattice
/// coordinates.
pub fn singular_points() -> Vec<[f64; 4]> {
    let mut pts = Vec::with_capacity(8);
    for theta in [0.0, PI] {
        for y1 in [0.0, 0.5] {
            for y2 in [0.0, 0.5] {
                pts.push([0.0, theta, y1, y2]);
            }
        }
    }
    pts
}

/// Distance in `ℝ × S¹ × (T², f/t)` (lattice-periodic in the last three).
pub fn flat_distance(f: &FiberMetric, t: f64, p: &[f64; 4], q: &[f64; 4]) -> f64 {
    let dx = p[0] - q[0];
    let dth = {
        let d = (p[1] - q[1]).rem_euclid(2.0 * PI);
        d.min(2.0 * PI - d)
    };
    let mut best = f64::INFINITY;
    for m in -2..=2 {
        for n in -2..=2 {
            let y = [p[2] - q[2] + m as f64, p[3] - q[3] + n as f64];
            let d2 = f[0][0] * y[0] * y[0] + 2.0 * f[0][1] * y[0] * y[1] + f[1][1] * y[1] * y[1];
            best = best.min(d2 / t);
        }
    }
    (dx * dx + dth * dth + best).sqrt()
}

/// Flat block `|x| ≤ a` of `V` with the 8 singular points replaced by
/// cutoff Eguchi-Hanson caps.
pub fn orbifold_family(fiber: &FiberMetric, t: f64) -> Result<ChartedFamily> {
    orbifold_family_with(fiber, t, GlueOptions::default())
}

pub fn orbifold_family_with(fiber: &FiberMetric, t: f64, opts: GlueOptions) -> Result<ChartedFamily> {
    check_t(t)?;
    let alpha = fiber_area(fiber)?;
    let a = opts.truncation;
    let eps = eh_schedule(fiber, t);
    if !(2.0 * eps < a) {
        return Err(Error::Gluing(format!("truncation a = {a} cannot contain caps of radius {}", 2.0 * eps)));
    }
    let pts = singular_points();
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            let d = flat_distance(fiber, t, p, q);
            if d < 4.0 * eps * (1.0 - 1e-12) {
                return Err(Error::Gluing(format!("2ε-balls overlap: distance {d} < {}", 4.0 * eps)));
            }
        }
    }
    let cap = cap_chart(CutoffBase::EguchiHanson, eps, opts.bump, opts.cap_samples)?;
    let flat_volume = 2.0 * PI * a * alpha / t - 8.0 * replaced_ball(CutoffBase::EguchiHanson, eps);
    let mut charts = vec![Chart::flat(ChartKind::FlatBlock, flat_volume)];
    charts.extend(std::iter::repeat_n(cap, 8));
    Ok(ChartedFamily {
        t,
        charts,
        schedule: Schedule { eh_epsilon: Some(eps), ..Default::default() },
        surface_tag: None,
    })
}

/// `CP² # 9(−CP²)`, the rational elliptic surface.
pub fn rational_elliptic_tag() -> SurfaceData {
    SurfaceData { kod: Kodaira::MinusInfinity, b1_parity: Parity::Even, c1sq_min: 9, chi: 12, tau: -8, blowups: 9 }
}

/// A torus bundle fiber-summed with `k` rational pieces and blown up `ℓ`
/// times.
#[derive(Clone)]
pub struct SurfaceModel {
    pub bundle: BundleModel,
    pub fiber_sums: usize,
    pub blowups: usize,
    pub opts: GlueOptions,
    /// Invariants of the minimal surface being modelled, if known.
    pub minimal_tag: Option<SurfaceData>,
}

impl fmt::Debug for SurfaceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceModel")
            .field("bundle", &self.bundle)
            .field("fiber_sums", &self.fiber_sums)
            .field("blowups", &self.blowups)
            .field("minimal_tag", &self.minimal_tag)
            .finish()
    }
}

/// Checks the gluing preconditions and returns the model.
///
/// Fiber sums and Burns caps need product-flat regions, so the bundle must
/// have a flat connection; caps grafted directly into the bundle block
/// (`k = 0`) also need a flat base.
pub fn assemble_surface_model(bundle: &BundleModel, k: usize, ell: usize) -> Result<SurfaceModel> {
    let flat_connection = !matches!(bundle.kind, BundleKind::Nilmanifold);
    if (k > 0 || ell > 0) && !flat_connection {
        return Err(Error::Gluing("fiber sums and blow-ups need a product region; the nilmanifold has none".into()));
    }
    if k == 0 && ell > 0 && bundle.base.sup_abs_curvature != 0.0 {
        return Err(Error::Gluing("blow-ups without fiber sums need a flat base".into()));
    }
    let minimal_tag = match (k, bundle.base.sup_abs_curvature > 0.0) {
        // S² × T² fiber-summed once is the rational elliptic surface
        (1, true) => Some(rational_elliptic_tag()),
        _ => None,
    };
    Ok(SurfaceModel { bundle: bundle.clone(), fiber_sums: k, blowups: ell, opts: GlueOptions::default(), minimal_tag })
}

/// `S² × T²` with a hemisphere removed, fiber-summed with one orbifold
/// piece: the rational elliptic surface.
pub fn rational_elliptic_model(fiber: FiberMetric, ell: usize) -> Result<SurfaceModel> {
    let bundle = crate::submersion::make_bundle(BundleKind::Product, fiber, BaseSurface::unit_hemisphere())?;
    assemble_surface_model(&bundle, 1, ell)
}

impl SurfaceModel {
    pub fn with_options(mut self, opts: GlueOptions) -> Self {
        self.opts = opts;
        self
    }

    pub fn with_tag(mut self, tag: SurfaceData) -> Self {
        self.minimal_tag = Some(tag);
        self
    }

    /// The tag of the modelled surface after blow-ups.
    pub fn surface_tag(&self) -> Result<Option<SurfaceData>> {
        self.minimal_tag.map(|tag| blow_up_surface(&tag, self.blowups as u32)).transpose()
    }

    /// Radius of the Euclidean ball available for Burns caps.
    pub fn flat_radius(&self, t: f64) -> f64 {
        let iota = injectivity_radius(&self.bundle.fiber_metric) / t.sqrt();
        if self.fiber_sums > 0 {
            PI.min(iota).min(self.opts.truncation / 4.0).min(1.0)
        } else {
            // flat square base of the given area
            iota.min(self.bundle.base.area.sqrt() / 2.0).min(1.0)
        }
    }

    pub fn family(&self, t: f64) -> Result<ChartedFamily> {
        check_t(t)?;
        let f = self.bundle.fiber_metric;
        let metric = collapse_metric(&self.bundle, t)?;
        let alpha = self.bundle.fiber_area;
        let points = self.bundle.base.sample_points(8);
        let frames = points.iter().map(|&p| metric.frame_at(p)).collect::<Result<Vec<_>>>()?;
        let n = frames.len().max(1) as f64;
        let block_volume = metric.volume();
        let mut block = Chart {
            kind: ChartKind::BundleBlock,
            volume: block_volume,
            sup_ricci: frames.iter().fold(0.0, |m, fr| m.max(fr.max_abs_ricci())),
            sup_scalar: frames.iter().fold(0.0, |m, fr| m.max(fr.scalar.abs())),
            w_plus_l2: frames.iter().map(|fr| fr.w_plus_norm2).sum::<f64>() / n * block_volume,
            w_minus_l2: frames.iter().map(|fr| fr.w_minus_norm2).sum::<f64>() / n * block_volume,
        };
        let mut charts = Vec::new();
        let mut schedule = Schedule::default();
        let mut flat_blocks = Vec::new();
        for _ in 0..self.fiber_sums {
            charts.push(Chart::flat(ChartKind::CylinderNeck, 2.0 * PI * alpha / t));
            let piece = orbifold_family_with(&f, t, self.opts)?;
            schedule.eh_epsilon = piece.schedule.eh_epsilon;
            for c in piece.charts {
                if c.kind == ChartKind::FlatBlock {
                    flat_blocks.push(charts.len());
                }
                charts.push(c);
            }
        }
        if self.blowups > 0 {
            let rho = self.flat_radius(t);
            let eps = rho / (2.0 * self.blowups as f64);
            schedule.flat_radius = Some(rho);
            schedule.burns_epsilon = Some(eps);
            let cap = cap_chart(CutoffBase::Burns, eps, self.opts.bump, self.opts.cap_samples)?;
            let removed = self.blowups as f64 * replaced_ball(CutoffBase::Burns, eps);
            // ℓ balls of radius ϱ/ℓ strung along a diameter of the ϱ-ball
            let host = match flat_blocks.first() {
                Some(&i) => &mut charts[i],
                None => &mut block,
            };
            if !(host.volume > removed) {
                return Err(Error::Gluing("Burns caps exceed the available flat volume".into()));
            }
            host.volume -= removed;
            charts.extend(std::iter::repeat_n(cap, self.blowups));
        }
        charts.insert(0, block);
        Ok(ChartedFamily { t, charts, schedule, surface_tag: self.surface_tag()? })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    BoundedRicciCollapse,
    BoundedScalarCollapse,
    NoCollapse,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateRow {
    pub t: f64,
    pub total_volume: f64,
    pub sup_ricci: f64,
    pub sup_scalar: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollapseCertificate {
    pub surface_tag: Option<SurfaceData>,
    pub schedule: Vec<Schedule>,
    pub rows: Vec<CertificateRow>,
    pub verdict: Verdict,
    pub diagnostic: Option<String>,
}

/// Thresholds for turning sampled rows into a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificatePolicy {
    /// Required `Vol(last)/Vol(first)`.
    pub volume_ratio: f64,
    /// Relative slack on "bounded by the first row".
    pub growth: f64,
    pub abs_slack: f64,
}

impl Default for CertificatePolicy {
    fn default() -> Self {
        Self { volume_ratio: 0.05, growth: 1e-6, abs_slack: 1e-12 }
    }
}

pub type FamilyRule = Arc<dyn Fn(f64) -> Result<ChartedFamily> + Send + Sync>;

pub fn certificate(rule: impl Fn(f64) -> Result<ChartedFamily> + Sync, t_list: &[f64]) -> Result<CollapseCertificate> {
    certificate_with(rule, t_list, CertificatePolicy::default())
}

pub fn certificate_with(
    rule: impl Fn(f64) -> Result<ChartedFamily> + Sync,
    t_list: &[f64],
    policy: CertificatePolicy,
) -> Result<CollapseCertificate> {
    if t_list.len() < 3 {
        return Err(Error::InsufficientSweep { needed: 3, got: t_list.len() });
    }
    if t_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("t_list", "parameter values must be strictly increasing"));
    }
    let families = t_list.par_iter().map(|&t| rule(t)).collect::<Result<Vec<_>>>()?;
    let rows: Vec<CertificateRow> = families
        .iter()
        .map(|fam| CertificateRow {
            t: fam.t,
            total_volume: fam.total_volume(),
            sup_ricci: fam.sup_ricci(),
            sup_scalar: fam.sup_scalar(),
        })
        .collect();
    let (verdict, diagnostic) = judge(&rows, policy);
    Ok(CollapseCertificate {
        surface_tag: families[0].surface_tag,
        schedule: families.iter().map(|f| f.schedule).collect(),
        rows,
        verdict,
        diagnostic,
    })
}

fn judge(rows: &[CertificateRow], p: CertificatePolicy) -> (Verdict, Option<String>) {
    let first = rows[0];
    let last = rows[rows.len() - 1];
    if let Some(w) = rows.windows(2).find(|w| !(w[1].total_volume < w[0].total_volume)) {
        return (
            Verdict::NoCollapse,
            Some(format!("volume not strictly decreasing between t={} and t={}", w[0].t, w[1].t)),
        );
    }
    if !(last.total_volume <= p.volume_ratio * first.total_volume) {
        return (
            Verdict::NoCollapse,
            Some(format!("final volume ratio {} above {}", last.total_volume / first.total_volume, p.volume_ratio)),
        );
    }
    let bounded = |sel: fn(&CertificateRow) -> f64| {
        let cap = sel(&first) * (1.0 + p.growth) + p.abs_slack;
        rows.iter().all(|r| sel(r).is_finite() && sel(r) <= cap)
    };
    if bounded(|r| r.sup_ricci) {
        (Verdict::BoundedRicciCollapse, None)
    } else if bounded(|r| r.sup_scalar) {
        (Verdict::BoundedScalarCollapse, Some("Ricci curvature grows along the family".into()))
    } else {
        (Verdict::NoCollapse, Some("neither Ricci nor scalar curvature stays bounded".into()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RicciObstruction {
    pub admissible: bool,
    pub reason: String,
}

/// Bounded-Ricci collapse forces `2χ + 3τ ≥ 0`.
pub fn ricci_obstruction(surface: &SurfaceData) -> Result<RicciObstruction> {
    surface.validate()?;
    let c = surface.two_chi_plus_three_tau();
    Ok(if c >= 0 {
        RicciObstruction { admissible: true, reason: format!("2χ+3τ = {c} ≥ 0") }
    } else {
        RicciObstruction {
            admissible: false,
            reason: format!("2χ+3τ = {c} < 0: bounded Ricci curvature with volume → 0 is impossible"),
        }
    })
}
