use rayon::ThreadPoolBuilder;
use s1cover::probes::*;
use s1cover::*;

fn with_workers<T: Send>(n: usize, f: impl FnOnce() -> T + Send) -> T {
    ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(f)
}

fn reports(map: &MapHandle) -> String {
    let planar = MapHandle::paper_f_planar(map.config);
    let window = Window::new(vec![0.05, -6.0], vec![8.0, 6.0]).unwrap();
    let hist = preimage_histogram::<PlanarPoint>(&planar, &window, 5000, 42).unwrap();
    let scan = branch_scan_planar(&planar, &Window::new(vec![0.9, -0.1], vec![1.1, 0.1]).unwrap(), 5e-3, 1e-3, None).unwrap();
    let radii = [2.0, 4.0, 8.0, 16.0];
    let growth = growth_fit(map, &radii, 500, 1e-6, 7).unwrap();
    let poles = pole_components(&MapHandle::remark(), 100.0, &Window::cube(-0.5, 0.5), 0.05, &[SpatialPoint::ORIGIN]).unwrap();
    let open = openness_probe(&planar, PlanarPoint::APEX, 1e-2, 1e-5, 500, 3).unwrap();
    let modulus = continuity_modulus(&planar, PlanarPoint::APEX, &[1e-1, 1e-2], 400).unwrap();
    let oracle = brute_preimage_oracle_spatial(map, SpatialPoint::new(1.0 / 3.0, 0.0, 0.0), &Window::cube(-3.5, 3.5), 0.05, 0.05).unwrap();
    serde_json::to_string(&(hist, scan, growth, poles, open, modulus, oracle)).unwrap()
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let f = MapHandle::paper_f(MapConfig::regularized());
    let one = with_workers(1, || reports(&f));
    let eight = with_workers(8, || reports(&f));
    assert_eq!(one, eight);
    assert_eq!(one, with_workers(3, || reports(&f)));
}

#[test]
fn growth_slopes_are_stable_under_more_samples() {
    let f = MapHandle::paper_f(MapConfig::regularized());
    let radii: Vec<f64> = (1..=8).map(|k| 2f64.powi(k)).collect();
    let a = growth_fit(&f, &radii, 1000, 1e-6, 0).unwrap();
    let b = growth_fit(&f, &radii, 2000, 1e-6, 0).unwrap();
    assert!((a.slope_paper - b.slope_paper).abs() <= 0.05);
    assert!((a.slope_outer - b.slope_outer).abs() <= 0.05);
}

#[test]
fn halving_the_probe_keeps_hits_near_the_apex() {
    let f = MapHandle::paper_f_planar(MapConfig::regularized());
    let w = Window::new(vec![0.95, -0.05], vec![1.05, 0.05]).unwrap();
    let rep = branch_scan_planar(&f, &w, 1e-3, 1e-3, None).unwrap();
    assert!(!rep.hits.is_empty());
    for h in &rep.hits {
        let again = local_index_planar(&f, *h, 5e-4, DEFAULT_N0).unwrap();
        assert!(again.winding >= 2, "{h}");
    }
}

#[test]
fn index_is_one_away_from_the_branch_set() {
    let f = MapHandle::paper_f_planar(MapConfig::regularized());
    let r = 1e-3;
    let mut n = 0;
    for i in 0..2000 {
        let c = sampling::uniform_in_box(&[0.05, -3.0], &[4.0, 3.0], 31, i);
        let p = PlanarPoint::new(c[0], c[1]);
        if p.dist(PlanarPoint::APEX) <= 10.0 * r {
            continue;
        }
        assert_eq!(local_index_planar(&f, p, r, DEFAULT_N0).unwrap().winding, 1, "{p}");
        n += 1;
    }
    assert!(n > 1900);

    let big = MapHandle::paper_f(MapConfig::regularized());
    for i in 0..500 {
        let c = sampling::uniform_in_box(&[-3.0, -3.0, -3.0], &[3.0, 3.0, 3.0], 32, i);
        let p = SpatialPoint::new(c[0], c[1], c[2]);
        if ((p.rho() - 1.0).powi(2) + p.z * p.z).sqrt() <= 10.0 * r || p.rho() < 1e-2 {
            continue;
        }
        let rep = local_index_spatial(&big, p, &ProbePlane::Meridian, r, DEFAULT_N0).unwrap();
        assert_eq!(rep.winding, 1, "{p}");
    }
}

#[test]
fn openness_needs_a_solver() {
    let rep = openness_probe(&MapHandle::winding3(), SpatialPoint::new(1.0, 0.0, 0.0), 1e-2, 1e-3, 10, 0);
    assert!(matches!(rep, Err(ProbeError::NoSolver(_))));
    let rep = preimage_histogram::<SpatialPoint>(&MapHandle::remark(), &Window::cube(-1.0, 1.0), 10, 0);
    assert!(matches!(rep, Err(ProbeError::NoSolver(_))));
}

#[test]
fn identity_histogram_is_all_ones() {
    let h = preimage_histogram::<PlanarPoint>(&MapHandle::identity2(), &Window::square(-1.0, 1.0), 1000, 0).unwrap();
    assert_eq!(h.fraction(1), 1.0);
}

#[test]
fn remark_map_has_one_bounded_pole_component() {
    let rep = pole_components(&MapHandle::remark(), 10.0, &Window::cube(-4.0, 4.0), 0.1, &[SpatialPoint::ORIGIN]).unwrap();
    assert_eq!(rep.components.len(), 1, "{:?}", rep.components);
    assert_eq!(rep.component_of(0), Some(0));
    let c = &rep.components[0];
    assert!(c.bbox_lo.iter().all(|v| *v > -4.0) && c.bbox_hi.iter().all(|v| *v < 4.0));
}

#[test]
fn spatial_oracle_finds_both_sheets() {
    let f = MapHandle::paper_f(MapConfig::regularized());
    let rep = brute_preimage_oracle_spatial(&f, SpatialPoint::new(1.0 / 3.0, 0.0, 0.0), &Window::cube(-3.5, 3.5), 0.05, 0.05).unwrap();
    assert_eq!(rep.count(), 2, "{:?}", rep.clusters);
}

#[test]
fn winding_probe_rejects_exhaustion_and_collision() {
    let err = winding_number(16, |_| Ok([0.0, 0.0])).unwrap_err();
    assert_eq!(err, ProbeError::ValueCollision);
    // a jump of a quarter turn never shrinks under refinement
    let err = winding_number(16, |th| Ok(if th < 1.0 { [1.0, 0.0] } else { [0.0, 1.0] })).unwrap_err();
    assert!(matches!(err, ProbeError::RefinementExhausted { .. }));
}
