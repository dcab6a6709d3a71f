mod common;

use common::*;
use s1cover::planar::{eval_band, is_smooth_point};
use s1cover::probes::sampling::uniforms;
use s1cover::probes::{brute_preimage_oracle_planar, PlanarOracle, Window};
use s1cover::*;

fn both() -> [MapConfig; 2] {
    [MapConfig::regularized(), MapConfig::literal()]
}

#[test]
fn bands_agree_on_every_junction_line() {
    let pairs = [
        (RegionTag::Outside, RegionTag::S1),
        (RegionTag::S1, RegionTag::S2),
        (RegionTag::S2, RegionTag::S3),
        (RegionTag::S3, RegionTag::S4),
        (RegionTag::S4, RegionTag::S5),
        (RegionTag::S5, RegionTag::Outside),
    ];
    for cfg in both().into_iter().chain([MapConfig::new(2.5, Profile::Regularized).unwrap()]) {
        for i in 0..1000 {
            let [u] = uniforms::<1>(1, i);
            let x = 1.0 + 10f64.powf(-3.0 + 6.0 * u);
            // the junction heights as the map itself sees them at this abscissa
            let w = cfg.slope * (x - 1.0);
            for (line, (below, above)) in MapConfig::band_lines(w).into_iter().zip(pairs) {
                let p = PlanarPoint::new(x, line);
                let (a, b) = (eval_band(below, p, &cfg), eval_band(above, p, &cfg));
                let tol = 1e-12 * (1.0 + a.norm());
                assert!(a.dist(b) <= tol, "{cfg:?} x={x} line={line}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn cone_boundary_is_fixed() {
    for cfg in both() {
        for i in 0..1000 {
            let [u] = uniforms::<1>(2, i);
            let x = 1.0 + 100.0 * u;
            for y in [cfg.slope * (x - 1.0), -cfg.slope * (x - 1.0)] {
                let p = PlanarPoint::new(x, y);
                assert_eq!(eval_planar(p, &cfg).unwrap(), p);
            }
        }
    }
}

#[test]
fn regularized_preserves_sense() {
    let cfg = MapConfig::regularized();
    let mut checked = 0;
    for i in 0..100_000 {
        let p = planar_sample(&cfg, 3, i);
        let jet = jet_planar(p, &cfg).unwrap();
        if jet.smooth {
            assert!(jet.jacobian.det() > 0.0, "det {} at {p}", jet.jacobian.det());
            checked += 1;
        }
    }
    assert!(checked > 99_000);
}

#[test]
fn literal_folds_only_in_the_side_bands_of_short_strata() {
    // det in the side bands is 5c(1 + r - 1/r) / (2W): negative below the golden ratio conjugate
    let cfg = MapConfig::literal();
    let critical = (5f64.sqrt() - 1.0) / 2.0;
    let mut negative = 0;
    for i in 0..100_000 {
        let p = planar_sample(&cfg, 4, i);
        let jet = jet_planar(p, &cfg).unwrap();
        if !jet.smooth {
            continue;
        }
        let det = jet.jacobian.det();
        let tag = classify_region(p, &cfg).tag;
        let r = p.x - 1.0;
        if matches!(tag, RegionTag::S2 | RegionTag::S4) && r < critical * (1.0 - 1e-9) {
            assert!(det < 0.0, "{p}");
            negative += 1;
        } else if !(matches!(tag, RegionTag::S2 | RegionTag::S4) && (r - critical).abs() < 1e-9) {
            assert!(det > 0.0, "{p} {tag:?} det {det}");
        }
    }
    assert!(negative > 0);
}

#[test]
fn jets_match_central_differences() {
    for cfg in both() {
        let mut worst = 0.0_f64;
        for i in 0..1000 {
            let p = smooth_planar_sample(&cfg, 5, i, 1e-4);
            let jet = jet_planar(p, &cfg).unwrap();
            assert!(jet.smooth);
            let fd = fd_jacobian_planar(|q| eval_planar(q, &cfg).unwrap(), p, FD_STEP);
            worst = worst.max(rel_err2(&jet.jacobian, &fd));
        }
        assert!(worst <= 1e-5, "{cfg:?}: {worst}");
    }
}

#[test]
fn smooth_flag_tracks_boundaries() {
    let cfg = MapConfig::regularized();
    for i in 0..1000 {
        let [u, v] = uniforms::<2>(6, i);
        let r = 10f64.powf(-2.0 + 4.0 * u);
        let line = MapConfig::band_lines(r)[(v * 6.0) as usize % 6];
        assert!(!is_smooth_point(PlanarPoint::new(1.0 + r, line), &cfg));
    }
    assert!(!is_smooth_point(PlanarPoint::APEX, &cfg));
}

#[test]
fn every_solver_preimage_maps_back() {
    for cfg in both() {
        for i in 0..20_000 {
            let c = uniforms::<2>(7, i);
            let q = PlanarPoint::new(0.05 + 7.95 * c[0], -6.0 + 12.0 * c[1]);
            let set = preimage_planar(q, &cfg).unwrap();
            assert!(!set.is_empty());
            for (p, tag) in set.points.iter().zip(&set.provenance) {
                let img = eval_planar(*p, &cfg).unwrap();
                assert!(img.dist(q) <= 1e-10 * (1.0 + q.norm()), "{cfg:?} {q}: {p} -> {img}");
                assert_eq!(classify_region(*p, &cfg).tag, *tag);
            }
        }
    }
}

#[test]
fn fibres_are_pairs_except_at_the_apex() {
    let cfg = MapConfig::regularized();
    assert_eq!(preimage_planar(PlanarPoint::APEX, &cfg).unwrap().points, vec![PlanarPoint::APEX]);
    for i in 0..20_000 {
        let c = uniforms::<2>(8, i);
        let q = PlanarPoint::new(0.05 + 7.95 * c[0], -6.0 + 12.0 * c[1]);
        assert_eq!(preimage_planar(q, &cfg).unwrap().len(), 2, "{q}");
    }
}

#[test]
fn literal_axis_targets_have_three_preimages() {
    let cfg = MapConfig::literal();
    for u in [1.5, 2.0, 3.0, 7.5] {
        let set = preimage_planar(PlanarPoint::new(u, 0.0), &cfg).unwrap();
        assert_eq!(set.provenance, vec![RegionTag::S1, RegionTag::S5, RegionTag::S3], "{u}");
    }
}

#[test]
fn oracle_examples() {
    let f = MapHandle::paper_f_planar(MapConfig::regularized());
    let w = Window::new(vec![0.01, -5.0], vec![10.0, 5.0]).unwrap();
    let oracle = PlanarOracle::new(&f, &w, 1e-3).unwrap();

    let rep = oracle.preimages(PlanarPoint::new(0.5, 0.0), 0.0);
    assert_eq!(rep.count(), 2);
    let mut reps: Vec<PlanarPoint> = rep.clusters.iter().map(|c| c.representative).collect();
    reps.sort_by(|a, b| a.x.total_cmp(&b.x));
    assert!(reps[0].dist(PlanarPoint::new(0.5, 0.0)) < 1e-3);
    assert!(reps[1].dist(PlanarPoint::new(2.0, 0.0)) < 1e-3);

    let rep = oracle.preimages(PlanarPoint::APEX, 0.0);
    assert_eq!(rep.count(), 1);
    assert!(rep.clusters[0].representative.dist(PlanarPoint::APEX) < 1e-3);

    let rep = brute_preimage_oracle_planar(&f, PlanarPoint::new(50.0, 0.0), &w, 1e-2, 1e-3).unwrap();
    assert_eq!(rep.count(), 0);
}

#[test]
fn solver_agrees_with_oracle() {
    let cfg = MapConfig::regularized();
    let f = MapHandle::paper_f_planar(cfg);
    let step = 2e-2;
    let oracle = PlanarOracle::new(&f, &Window::new(vec![0.01, -7.5], vec![21.0, 7.5]).unwrap(), step).unwrap();
    for i in 0..30 {
        let c = uniforms::<2>(9, i);
        let q = PlanarPoint::new(0.05 + 7.95 * c[0], -6.0 + 12.0 * c[1]);
        let set = preimage_planar(q, &cfg).unwrap();
        let rep = oracle.preimages_refined(q, 0.0, 16);
        assert_eq!(rep.count(), set.len(), "{q}");
        for p in &set.points {
            let d = rep.clusters.iter().map(|c| c.representative.dist(*p)).fold(f64::INFINITY, f64::min);
            assert!(d <= step, "{q}: {p} at {d}");
        }
    }
}
