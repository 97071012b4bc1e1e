use curvlab::characteristic::{integrate_characteristics, CharModel};
use curvlab::submersion::{
    collapse_metric, collapse_sweep, gauss_bonnet_bound, homogeneous_curvature, make_bundle, BaseSurface, BundleKind,
    BundleModel, StructureConstants,
};

const UNIT: [[f64; 2]; 2] = [[1.0, 0.0], [0.0, 1.0]];

fn bundles() -> Vec<BundleModel> {
    vec![
        make_bundle(BundleKind::TrivialTorusOverTorus, UNIT, BaseSurface::flat_torus(1.0)).unwrap(),
        make_bundle(BundleKind::TwistedProduct([[-1, 0], [0, -1]]), UNIT, BaseSurface::pillowcase(0.5)).unwrap(),
        make_bundle(BundleKind::TwistedProduct([[0, -1], [1, 0]]), UNIT, BaseSurface::flat_orbifold(1.0, vec![]))
            .unwrap(),
        make_bundle(BundleKind::Product, [[2.0, 0.5], [0.5, 1.0]], BaseSurface::round_sphere(1.5)).unwrap(),
        make_bundle(BundleKind::Nilmanifold, UNIT, BaseSurface::flat_torus(1.0)).unwrap(),
        make_bundle(BundleKind::Nilmanifold, [[4.0, 1.0], [1.0, 3.0]], BaseSurface::flat_torus(2.0)).unwrap(),
    ]
}

fn t_grid() -> Vec<f64> {
    (0..=24).map(|k| 10f64.powf(k as f64 / 4.0)).collect()
}

#[test]
fn nilmanifold_matches_left_invariant_oracle() {
    let bundle = make_bundle(BundleKind::Nilmanifold, UNIT, BaseSurface::flat_torus(1.0)).unwrap();
    let sc = StructureConstants::<f64>::heisenberg_times_line();
    for t in [1.0, 2.5, 4.0, 100.0] {
        let m = collapse_metric(&bundle, t).unwrap();
        let h = homogeneous_curvature(&sc, &[1.0, 1.0, 1.0 / t, 1.0 / t]).unwrap();
        let p = [0.3, 0.7];
        let k = m.oneill_at(p).unwrap();
        assert!((k.k_h - h.sectional(0, 1)).abs() < 1e-10);
        assert!((k.k_p - h.sectional(0, 2)).abs() < 1e-10);
        assert!((k.k_p - h.sectional(1, 2)).abs() < 1e-10);
        assert!((k.k_v - h.sectional(2, 3)).abs() < 1e-10);
        // mixed planes through every vertical direction
        for step in 0..12 {
            let a = step as f64 * std::f64::consts::PI / 12.0;
            let u = [a.cos(), a.sin()];
            let mut oracle = 0.0;
            for (i, ui) in [(2, u[0]), (3, u[1])] {
                for (j, uj) in [(2, u[0]), (3, u[1])] {
                    oracle += ui * uj * h.get(0, i, j, 0);
                }
            }
            let got = m.mixed_curvature(p, u).unwrap();
            assert!((got - oracle).abs() < 1e-10, "t={t} angle {a}: {got} vs {oracle}");
        }
    }
}

#[test]
fn nilmanifold_frame_agrees_with_oneill() {
    let bundle = make_bundle(BundleKind::Nilmanifold, UNIT, BaseSurface::flat_torus(1.0)).unwrap();
    for t in [1.0, 4.0, 1e3] {
        let m = collapse_metric(&bundle, t).unwrap();
        let k = m.oneill_at([0.5, 0.5]).unwrap();
        let f = m.frame_at([0.5, 0.5]).unwrap();
        assert!((f.sec_min - k.k_h).abs() < 1e-10 && (f.sec_max - k.k_p).abs() < 1e-10);
    }
}

#[test]
fn uniform_boundedness_along_the_family() {
    for bundle in bundles() {
        let sweep = collapse_sweep(&bundle, &t_grid(), 6).unwrap();
        let first = sweep.rows[0];
        let bound = bundle.base.sup_abs_curvature.max(first.sup_kh).max(first.sup_kp);
        for row in &sweep.rows {
            assert!(row.sup_kh.is_finite() && row.sup_kp.is_finite());
            assert!(row.sup_kh.max(row.sup_kp) <= bound * (1.0 + 1e-12), "{:?} t={}", bundle.kind, row.t);
        }
    }
}

#[test]
fn oneill_limits_are_monotone() {
    let bundle = make_bundle(BundleKind::Nilmanifold, [[4.0, 1.0], [1.0, 3.0]], BaseSurface::flat_torus(2.0)).unwrap();
    let ks: Vec<_> =
        t_grid().iter().map(|&t| collapse_metric(&bundle, t).unwrap().oneill_at([0.2, 0.2]).unwrap()).collect();
    for w in ks.windows(2) {
        assert!(w[1].k_h > w[0].k_h && w[1].k_p < w[0].k_p && w[1].k_v == 0.0);
    }
    let last = ks.last().unwrap();
    assert!(last.k_h.abs() < 1e-6 && last.k_p < 1e-6);
}

#[test]
fn volume_law() {
    for bundle in bundles() {
        let v1 = collapse_metric(&bundle, 1.0).unwrap().volume();
        assert_eq!(v1, bundle.volume());
        for t in t_grid() {
            let vt = collapse_metric(&bundle, t).unwrap().volume();
            assert!((vt * t - v1).abs() <= 1e-12 * v1);
        }
    }
}

#[test]
fn gauss_bonnet_bound_holds_along_the_family() {
    for bundle in bundles() {
        for t in [1.0, 10.0, 1e4] {
            let m = collapse_metric(&bundle, t).unwrap();
            let pts = bundle.base.sample_points(5);
            let lambda = pts
                .iter()
                .map(|&p| {
                    let f = m.frame_at(p).unwrap();
                    f.sec_min.abs().max(f.sec_max.abs())
                })
                .fold(0.0, f64::max);
            let c = integrate_characteristics(CharModel::Submersion { metric: &m, samples: 5 }).unwrap();
            assert!(c.chi.abs() <= gauss_bonnet_bound(lambda, m.volume()) + 1e-15, "{:?} t={t}", bundle.kind);
            // every model here is a torus bundle, so the Euler integral vanishes
            assert!(c.chi.abs() < 1e-12);
        }
    }
}

#[test]
fn quadratic_form_at_t_four() {
    let bundle = make_bundle(BundleKind::Nilmanifold, [[4.0, 1.0], [1.0, 3.0]], BaseSurface::flat_torus(2.0)).unwrap();
    let (g1, g4) = (collapse_metric(&bundle, 1.0).unwrap(), collapse_metric(&bundle, 4.0).unwrap());
    for v in [[1.0, 0.0], [0.3, -2.0], [1.5, 1.5]] {
        assert!((g4.vertical_norm2(v).sqrt() - 0.5 * g1.vertical_norm2(v).sqrt()).abs() < 1e-15);
        assert_eq!(g4.quadratic_form([0.7, -0.2], [0.0, 0.0]), g1.quadratic_form([0.7, -0.2], [0.0, 0.0]));
        let full = g4.quadratic_form([0.7, -0.2], v);
        assert!((full - (0.53 + g1.vertical_norm2(v) / 4.0)).abs() < 1e-14);
    }
}

#[test]
fn flat_connection_keeps_base_curvature() {
    let bundle = make_bundle(BundleKind::Product, UNIT, BaseSurface::round_sphere(2.0)).unwrap();
    for t in [1.0, 7.0, 1e5] {
        let k = collapse_metric(&bundle, t).unwrap().oneill_at([0.4, 0.4]).unwrap();
        assert_eq!((k.k_h, k.k_p, k.k_v), (0.25, 0.0, 0.0));
    }
}

#[test]
fn structure_constants_behave() {
    let sum = StructureConstants::<f64>::su2().direct_sum(&StructureConstants::su2()).unwrap();
    assert_eq!(sum.dim(), 6);
    assert!(sum.jacobi_residual() < 1e-12);
    for i in 0..6 {
        for j in 0..6 {
            for k in 0..6 {
                assert_eq!(sum.get(i, j, k), -sum.get(j, i, k));
            }
        }
    }
    let h = homogeneous_curvature(&sum, &[1.0; 6]).unwrap();
    assert!((h.sectional(0, 1) - 1.0).abs() < 1e-12);
    assert!(h.sectional(0, 3).abs() < 1e-12);
    assert!(StructureConstants::<f64>::abelian(7).is_err());
    assert!(homogeneous_curvature(&StructureConstants::<f64>::su2(), &[1.0, -1.0, 1.0]).is_err());
}

#[test]
fn invalid_inputs() {
    assert!(make_bundle(BundleKind::TwistedProduct([[1, 1], [0, 1]]), UNIT, BaseSurface::flat_torus(1.0)).is_err());
    let skew = [[1.0, 0.3], [0.3, 1.0]];
    assert!(make_bundle(BundleKind::TwistedProduct([[0, -1], [1, 0]]), skew, BaseSurface::flat_torus(1.0)).is_err());
    assert!(
        make_bundle(BundleKind::TrivialTorusOverTorus, [[1.0, 2.0], [2.0, 1.0]], BaseSurface::flat_torus(1.0)).is_err()
    );
    let b = &bundles()[0];
    assert!(collapse_metric(b, 0.5).is_err());
    assert!(collapse_metric(b, 1.0).unwrap().oneill_at([1.5, 0.0]).is_err());
    let csv = collapse_sweep(b, &[1.0, 2.0], 3).unwrap().to_csv();
    assert_eq!(csv.lines().next(), Some("t,vol,sup_KH,sup_KP"));
}
