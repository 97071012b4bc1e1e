//! Gauss-Bonnet and signature integrands.
//!
//! With `|W±|²` the squared Frobenius norm of the traceless `Λ±` blocks of the
//! curvature operator and `|r̊|²` the tensor norm of the trace-free Ricci
//! tensor,
//!
//! ```text
//! 8π²χ  = ∫ |W₊|² + |W₋|² + s²/24 − |r̊|²/2
//! 12π²τ = ∫ |W₊|² − |W₋|²
//! 4π²(2χ + 3τ) = ∫ 2|W₊|² + s²/24 − |r̊|²/2
//! ```
//!
//! These constants are locked by the round `S⁴` (`2χ+3τ = 4`), flat (`0`)
//! and `S² × S²` (`8`) checks.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::CurvatureFrame;
use crate::glue::ChartedFamily;
use crate::quadrature::{integrate, QuadratureOptions};
use crate::radial::RadialMetric;
use crate::scalar::Real;
use crate::submersion::SubmersionMetric;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharDensities<T> {
    /// Integrand of `2χ + 3τ`.
    pub gb_density: T,
    /// Integrand of `τ`.
    pub sig_density: T,
    /// `gb_density` without the `|W₊|²` term.
    pub restricted_gb_density: T,
    /// Integrand of `χ`.
    pub euler_density: T,
}

pub fn densities_at<T: Real>(frame: &CurvatureFrame<T>) -> CharDensities<T> {
    let pi2 = T::PI() * T::PI();
    let s2 = frame.scalar * frame.scalar / T::lit(24.0);
    let half_ric = frame.ricci_traceless_norm2 / T::lit(2.0);
    let (wp, wm) = (frame.w_plus_norm2, frame.w_minus_norm2);
    let four_pi2 = T::lit(4.0) * pi2;
    CharDensities {
        gb_density: (wp + wp + s2 - half_ric) / four_pi2,
        sig_density: (wp - wm) / (T::lit(12.0) * pi2),
        restricted_gb_density: (s2 - half_ric) / four_pi2,
        euler_density: (wp + wm + s2 - half_ric) / (T::lit(8.0) * pi2),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CharIntegrals {
    pub two_chi_plus_three_tau: f64,
    pub tau: f64,
    pub chi: f64,
    pub w_plus_l2: f64,
    pub w_minus_l2: f64,
}

impl CharIntegrals {
    /// Integrals of constant densities over a region of the given volume.
    fn constant(frame: &CurvatureFrame<f64>, volume: f64) -> Self {
        let d = densities_at(frame);
        Self {
            two_chi_plus_three_tau: d.gb_density * volume,
            tau: d.sig_density * volume,
            chi: d.euler_density * volume,
            w_plus_l2: frame.w_plus_norm2 * volume,
            w_minus_l2: frame.w_minus_norm2 * volume,
        }
    }
}

/// A model metric and the region to integrate over.
#[derive(Clone, Copy, Debug)]
pub enum CharModel<'a> {
    /// Radial metric over `lo < r < hi`.
    Radial { metric: &'a RadialMetric<f64>, lo: f64, hi: f64 },
    /// Collapsing bundle, curvature averaged over `samples²` base points.
    Submersion { metric: &'a SubmersionMetric, samples: usize },
    /// Locally homogeneous metric of the given total volume.
    Homogeneous { frame: &'a CurvatureFrame<f64>, volume: f64 },
}

pub fn integrate_characteristics(model: CharModel<'_>) -> Result<CharIntegrals> {
    match model {
        CharModel::Radial { metric, lo, hi } => integrate_radial(metric, lo, hi),
        CharModel::Submersion { metric, samples } => {
            let pts = metric.bundle.base.sample_points(samples.max(1));
            let frames = pts.iter().map(|&p| metric.frame_at(p)).collect::<Result<Vec<_>>>()?;
            let volume = metric.volume();
            let n = frames.len() as f64;
            Ok(frames.iter().fold(CharIntegrals::default(), |acc, f| {
                let c = CharIntegrals::constant(f, volume / n);
                CharIntegrals {
                    two_chi_plus_three_tau: acc.two_chi_plus_three_tau + c.two_chi_plus_three_tau,
                    tau: acc.tau + c.tau,
                    chi: acc.chi + c.chi,
                    w_plus_l2: acc.w_plus_l2 + c.w_plus_l2,
                    w_minus_l2: acc.w_minus_l2 + c.w_minus_l2,
                }
            }))
        }
        CharModel::Homogeneous { frame, volume } => {
            if !(volume >= 0.0) {
                return Err(Error::param("volume", "must be non-negative"));
            }
            Ok(CharIntegrals::constant(frame, volume))
        }
    }
}

fn integrate_radial(metric: &RadialMetric<f64>, lo: f64, hi: f64) -> Result<CharIntegrals> {
    let (floor, ceil) = metric.profile.closure;
    if !(floor <= lo && lo < hi && hi <= ceil) {
        return Err(Error::BadRange { lo, hi, floor, ceil });
    }
    let link = metric.link.link_volume;
    let field = |pick: fn(&CurvatureFrame<f64>) -> f64| -> Result<f64> {
        // the interior rule never samples the endpoints, where the chart may
        // degenerate
        let opts = QuadratureOptions { abs_tol: 1e-12, magnitude: 1.0, ..Default::default() };
        let est = integrate(
            |r| match metric.curvature_at(r) {
                Ok(fr) => pick(&fr) * metric.profile.eval(r).density(),
                Err(_) => f64::NAN,
            },
            lo,
            hi,
            opts,
        )?;
        Ok(est.value * link)
    };
    Ok(CharIntegrals {
        two_chi_plus_three_tau: field(|f| densities_at(f).gb_density)?,
        tau: field(|f| densities_at(f).sig_density)?,
        chi: field(|f| densities_at(f).euler_density)?,
        w_plus_l2: field(|f| f.w_plus_norm2)?,
        w_minus_l2: field(|f| f.w_minus_norm2)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WPlusRow {
    pub t: f64,
    pub w_plus_l2: f64,
    pub w_minus_l2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WPlusSweep {
    pub rows: Vec<WPlusRow>,
    /// Smallest `∫|W₊|²` seen.
    pub inf_w_plus: f64,
    /// `(∫|W₊|² − ∫|W₋|²)/12π²` at the last row, the signature the `W₋`
    /// integral approaches as `W₊` dies out.
    pub tau_estimate: f64,
}

impl WPlusSweep {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,w_plus_l2,w_minus_l2\n");
        for r in &self.rows {
            out.push_str(&format!("{},{:e},{:e}\n", r.t, r.w_plus_l2, r.w_minus_l2));
        }
        out
    }

    pub fn is_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].w_plus_l2 < w[0].w_plus_l2)
    }
}

pub fn wplus_sweep(rule: impl Fn(f64) -> Result<ChartedFamily>, t_list: &[f64]) -> Result<WPlusSweep> {
    if t_list.is_empty() {
        return Err(Error::InsufficientSweep { needed: 1, got: 0 });
    }
    let rows = t_list
        .iter()
        .map(|&t| {
            let fam = rule(t)?;
            Ok(WPlusRow { t, w_plus_l2: fam.w_plus_l2(), w_minus_l2: fam.w_minus_l2() })
        })
        .collect::<Result<Vec<_>>>()?;
    let last = rows[rows.len() - 1];
    Ok(WPlusSweep {
        inf_w_plus: rows.iter().fold(f64::INFINITY, |m, r| m.min(r.w_plus_l2)),
        tau_estimate: (last.w_plus_l2 - last.w_minus_l2) / (12.0 * PI * PI),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glue::{Chart, ChartKind, Schedule};
    use crate::radial::{make_metric, make_metric_with, LinkQuotient, MetricOptions, MetricPreset};
    use crate::submersion::{quotient_curvature, StructureConstants};

    #[test]
    fn flat_densities_vanish() {
        let d = densities_at(&CurvatureFrame::<f64>::flat());
        assert_eq!((d.gb_density, d.sig_density, d.restricted_gb_density, d.euler_density), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn round_sphere_densities() {
        let m: RadialMetric<f64> = make_metric(MetricPreset::Round(1.0), LinkQuotient::full_sphere()).unwrap();
        let d = densities_at(&m.curvature_at(1.0).unwrap());
        assert!((d.gb_density - 6.0 / (4.0 * PI * PI)).abs() < 1e-12);
        assert!(d.sig_density.abs() < 1e-12);
    }

    #[test]
    fn eguchi_hanson_is_anti_self_dual() {
        let m: RadialMetric<f64> = make_metric(MetricPreset::EguchiHanson(1.0), LinkQuotient::z2_quotient()).unwrap();
        let d = densities_at(&m.curvature_at(2.0).unwrap());
        assert!(d.sig_density < 0.0 && d.euler_density > 0.0);
        assert!(d.gb_density.abs() < 1e-12);
    }

    #[test]
    fn round_sphere_integrals() {
        let opts = MetricOptions { bolt_offset: 0.0f64, ..Default::default() };
        let m = make_metric_with(MetricPreset::Round(1.0), LinkQuotient::full_sphere(), opts).unwrap();
        let c = integrate_characteristics(CharModel::Radial { metric: &m, lo: 0.0, hi: PI }).unwrap();
        assert!((c.two_chi_plus_three_tau - 4.0).abs() < 1e-6);
        assert!((c.chi - 2.0).abs() < 1e-6);
        assert!(c.tau.abs() < 1e-8);
    }

    #[test]
    fn product_of_spheres() {
        let su2 = StructureConstants::<f64>::su2();
        let sc = su2.direct_sum(&su2).unwrap();
        let q = quotient_curvature(&sc, &[4.0; 6], &[0, 1, 3, 4]).unwrap();
        let frame = q.frame().unwrap();
        let c = integrate_characteristics(CharModel::Homogeneous { frame: &frame, volume: 16.0 * PI * PI }).unwrap();
        assert!((c.two_chi_plus_three_tau - 8.0).abs() < 1e-6);
        assert!((c.chi - 4.0).abs() < 1e-6);
        assert!(c.tau.abs() < 1e-8);
    }

    #[test]
    fn sweep_controls() {
        let flat = |t: f64| {
            Ok(ChartedFamily {
                t,
                charts: vec![Chart {
                    kind: ChartKind::FlatBlock,
                    volume: 1.0 / t,
                    sup_ricci: 0.0,
                    sup_scalar: 0.0,
                    w_plus_l2: 0.0,
                    w_minus_l2: 0.0,
                }],
                schedule: Schedule::default(),
                surface_tag: None,
            })
        };
        let s = wplus_sweep(flat, &[1.0, 10.0]).unwrap();
        assert!(s.rows.iter().all(|r| r.w_plus_l2 == 0.0));
        assert!(!s.is_decreasing());
        assert!(wplus_sweep(flat, &[]).is_err());
    }
}
