use std::f64::consts::PI;

use curvlab::cutoff::{decay_sweep, volume_deficit, CutoffBase, CutoffFamily};
use curvlab::glue::{
    assemble_surface_model, certificate, eh_schedule, flat_distance, orbifold_family, orbifold_family_with,
    rational_elliptic_model, ricci_obstruction, singular_points, ChartKind, CollapseCertificate, GlueOptions, Verdict,
    DEFAULT_FIBER, DEFAULT_TRUNCATION,
};
use curvlab::submersion::{make_bundle, BaseSurface, BundleKind};

const T_GRID: [f64; 6] = [1.0, 3.0, 10.0, 30.0, 100.0, 1000.0];

fn deficit(base: CutoffBase, eps: f64) -> f64 {
    volume_deficit(&CutoffFamily::new(base, eps), 3.0 * eps).unwrap()
}

#[test]
fn volume_is_flat_model_minus_deficits() {
    let alpha = 4.0;
    for t in [1.0, 10.0, 100.0] {
        let fam = orbifold_family(&DEFAULT_FIBER, t).unwrap();
        let eps = fam.schedule.eh_epsilon.unwrap();
        let expected = 2.0 * PI * DEFAULT_TRUNCATION * alpha / t - 8.0 * deficit(CutoffBase::EguchiHanson, eps);
        assert!((fam.total_volume() - expected).abs() < 1e-9 * expected, "t={t}");
        assert!(fam.total_volume() < 2.0 * PI * DEFAULT_TRUNCATION * alpha / t);
    }
}

#[test]
fn surface_volume_accounts_for_every_piece() {
    let model = rational_elliptic_model(DEFAULT_FIBER, 2).unwrap();
    for t in [1.0, 10.0] {
        let fam = model.family(t).unwrap();
        let eh = fam.schedule.eh_epsilon.unwrap();
        let burns = fam.schedule.burns_epsilon.unwrap();
        let alpha = 4.0;
        let flat = 2.0 * PI * alpha / t + 2.0 * PI * alpha / t + 2.0 * PI * DEFAULT_TRUNCATION * alpha / t;
        let expected = flat - 8.0 * deficit(CutoffBase::EguchiHanson, eh) - 2.0 * deficit(CutoffBase::Burns, burns);
        assert!((fam.total_volume() - expected).abs() < 1e-9 * expected, "t={t}");
        assert_eq!(fam.count(|k| matches!(k, ChartKind::BurnsCap(_))), 2);
        assert_eq!(fam.count(|k| matches!(k, ChartKind::EHCap(_))), 8);
        assert_eq!(fam.count(|k| *k == ChartKind::CylinderNeck), 1);
    }
}

#[test]
fn caps_are_disjoint_for_every_sampled_parameter() {
    let pts = singular_points();
    assert_eq!(pts.len(), 8);
    for fiber in [DEFAULT_FIBER, [[1.0, 0.0], [0.0, 1.0]], [[3.0, 1.0], [1.0, 2.0]]] {
        for t in T_GRID {
            let eps = eh_schedule(&fiber, t);
            for (i, p) in pts.iter().enumerate() {
                for q in &pts[i + 1..] {
                    assert!(flat_distance(&fiber, t, p, q) >= 4.0 * eps * (1.0 - 1e-12));
                }
            }
        }
    }
}

#[test]
fn orbifold_volume_strictly_decreases() {
    let vols: Vec<f64> = T_GRID.iter().map(|&t| orbifold_family(&DEFAULT_FIBER, t).unwrap().total_volume()).collect();
    assert!(vols.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn schedule_examples() {
    assert_eq!(eh_schedule(&DEFAULT_FIBER, 1.0), 0.25);
    assert!((eh_schedule(&DEFAULT_FIBER, 100.0) - 0.025).abs() < 1e-15);
    let fam = orbifold_family(&DEFAULT_FIBER, 1.0).unwrap();
    assert_eq!(fam.count(|k| matches!(k, ChartKind::EHCap(e) if *e == 0.25)), 8);
}

#[test]
fn cap_ricci_decays_with_schedule() {
    let c = decay_sweep(CutoffBase::EguchiHanson, &[0.2, 0.1, 0.05, 0.025]).unwrap().decay_constant();
    for t in [1.0, 100.0] {
        let fam = orbifold_family(&DEFAULT_FIBER, t).unwrap();
        let eps = fam.schedule.eh_epsilon.unwrap();
        assert!(fam.sup_ricci() <= 1.05 * c * eps * eps, "t={t}: {} vs {}", fam.sup_ricci(), c * eps * eps);
    }
}

#[test]
fn neck_matches_its_neighbours() {
    let model = rational_elliptic_model(DEFAULT_FIBER, 0).unwrap();
    let t = 7.0;
    let fam = model.family(t).unwrap();
    let neck = fam.charts.iter().find(|c| c.kind == ChartKind::CylinderNeck).unwrap();
    // unit-length neck: its volume is the area of the S¹ × (T², f/t) cross-section
    let cross_section = 2.0 * PI * 4.0 / t;
    assert!((neck.volume - cross_section).abs() < 1e-15);
    // the Z₂ quotient of |x| ≤ a is [0, a] × T³ away from the fixed points, and
    // its end at x = a is the same flat 3-torus
    let eps = fam.schedule.eh_epsilon.unwrap();
    let block = fam.charts.iter().find(|c| c.kind == ChartKind::FlatBlock).unwrap();
    let ball = PI * PI * (2.0 * eps).powi(4) / 4.0;
    let block_section = (block.volume + 8.0 * ball) / DEFAULT_TRUNCATION;
    assert!((block_section - cross_section).abs() < 1e-12);
    assert_eq!((neck.sup_ricci, neck.sup_scalar, block.sup_ricci, block.sup_scalar), (0.0, 0.0, 0.0, 0.0));
}

#[test]
fn blow_ups_are_never_certified_ricci_bounded() {
    for ell in [1, 2, 3] {
        let model = rational_elliptic_model(DEFAULT_FIBER, ell).unwrap();
        let tag = model.surface_tag().unwrap().unwrap();
        assert!(!ricci_obstruction(&tag).unwrap().admissible);
        let cert = certificate(|t| model.family(t), &[1.0, 10.0, 100.0]).unwrap();
        assert_ne!(cert.verdict, Verdict::BoundedRicciCollapse);
    }
    let minimal = rational_elliptic_model(DEFAULT_FIBER, 0).unwrap();
    assert!(ricci_obstruction(&minimal.surface_tag().unwrap().unwrap()).unwrap().admissible);
}

#[test]
fn rational_elliptic_certificate() {
    let model = rational_elliptic_model(DEFAULT_FIBER, 0).unwrap();
    let cert = certificate(|t| model.family(t), &[1.0, 10.0, 100.0, 1000.0]).unwrap();
    assert_eq!(cert.verdict, Verdict::BoundedRicciCollapse);
    let first = cert.rows[0];
    for row in &cert.rows {
        assert!(row.sup_ricci <= first.sup_ricci * (1.0 + 1e-6));
    }
    assert!(cert.rows.windows(2).all(|w| w[1].total_volume < w[0].total_volume));
}

#[test]
fn trivial_bundle_certificate() {
    let bundle =
        make_bundle(BundleKind::TrivialTorusOverTorus, [[1.0, 0.0], [0.0, 1.0]], BaseSurface::flat_torus(1.0)).unwrap();
    let model = assemble_surface_model(&bundle, 0, 0).unwrap();
    let cert = certificate(|t| model.family(t), &[1.0, 10.0, 100.0]).unwrap();
    let vols: Vec<f64> = cert.rows.iter().map(|r| r.total_volume).collect();
    assert_eq!(vols, vec![1.0, 0.1, 0.01]);
    assert_eq!(cert.verdict, Verdict::BoundedRicciCollapse);
}

#[test]
fn certificate_json_round_trip() {
    let model = rational_elliptic_model(DEFAULT_FIBER, 1).unwrap();
    let cert = certificate(|t| model.family(t), &[1.0, 10.0, 100.0]).unwrap();
    let json = serde_json::to_value(&cert).unwrap();
    for key in ["surface_tag", "schedule", "rows", "verdict"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert_eq!(json["verdict"], "BoundedScalarCollapse");
    let back: CollapseCertificate = serde_json::from_value(json).unwrap();
    assert_eq!(back, cert);
}

#[test]
fn rejected_configurations() {
    assert!(orbifold_family(&DEFAULT_FIBER, 0.5).is_err());
    let tight = GlueOptions { truncation: 0.1, ..Default::default() };
    assert!(orbifold_family_with(&DEFAULT_FIBER, 1.0, tight).is_err());
    let nil = make_bundle(BundleKind::Nilmanifold, [[1.0, 0.0], [0.0, 1.0]], BaseSurface::flat_torus(1.0)).unwrap();
    assert!(assemble_surface_model(&nil, 1, 0).is_err());
    let sphere = make_bundle(BundleKind::Product, [[1.0, 0.0], [0.0, 1.0]], BaseSurface::round_sphere(1.0)).unwrap();
    assert!(assemble_surface_model(&sphere, 0, 1).is_err());
}
