mod common;

use common::*;
use s1cover::probes::growth_fit;
use s1cover::probes::sampling::uniforms;
use s1cover::*;

fn reg() -> MapConfig {
    MapConfig::regularized()
}

fn rotate(p: SpatialPoint, th: f64) -> SpatialPoint {
    let (s, c) = th.sin_cos();
    SpatialPoint::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z)
}

#[test]
fn azimuth_is_preserved() {
    let cfg = reg();
    for i in 0..100_000 {
        let p = spatial_sample(&cfg, 11, i);
        let v = eval_spatial(p, &cfg);
        let d = (v.y.atan2(v.x) - p.y.atan2(p.x)).abs();
        let d = d.min(std::f64::consts::TAU - d);
        assert!(d <= 1e-12, "{p} -> {v}");
    }
}

#[test]
fn axis_is_fixed() {
    for cfg in [reg(), MapConfig::literal()] {
        for i in 0..1000 {
            let [u] = uniforms::<1>(12, i);
            let p = SpatialPoint::new(0.0, 0.0, 200.0 * u - 100.0);
            assert_eq!(eval_spatial(p, &cfg), p);
        }
    }
}

#[test]
fn commutes_with_rotations_about_the_axis() {
    let cfg = reg();
    for i in 0..10_000 {
        let p = spatial_sample(&cfg, 13, i);
        let [u] = uniforms::<1>(14, i);
        let th = std::f64::consts::TAU * u;
        let a = eval_spatial(rotate(p, th), &cfg);
        let b = rotate(eval_spatial(p, &cfg), th);
        assert!(a.dist(b) <= 1e-12 * (1.0 + b.norm()), "{p} th={th}");
    }
}

#[test]
fn jacobian_determinant_is_positive() {
    let cfg = reg();
    for i in 0..100_000 {
        let p = spatial_sample(&cfg, 15, i);
        let jet = jet_spatial(p, &cfg).unwrap();
        if jet.smooth {
            assert!(jet.det() > 0.0, "{p}");
            assert!(jet.angular_factor > 0.0);
            let cart = jet.jacobian.det();
            assert!((cart - jet.det()).abs() <= 1e-9 * jet.det().abs(), "{p}: {cart} vs {}", jet.det());
        }
    }
}

#[test]
fn jets_match_central_differences() {
    let cfg = reg();
    let mut worst = 0.0_f64;
    for i in 0..1000 {
        let p = smooth_spatial_sample(&cfg, 16, i, 1e-4);
        let jet = jet_spatial(p, &cfg).unwrap();
        let fd = fd_jacobian_spatial(|q| eval_spatial(q, &cfg), p, FD_STEP);
        worst = worst.max(rel_err3(&jet.jacobian, &fd));
    }
    assert!(worst <= 1e-5, "{worst}");
}

#[test]
fn distortion_stays_under_the_fitted_quartic() {
    let cfg = reg();
    let radii: Vec<f64> = (1..=8).map(|k| 2f64.powi(k)).collect();
    let fit = growth_fit(&MapHandle::paper_f(cfg), &radii, 2000, 1e-6, 0).unwrap();
    let c = fit.log_c.exp();
    let mut checked = 0;
    for i in 0..100_000 {
        let [a, b, t] = uniforms::<3>(17, i);
        let r = 2.0 * 128f64.powf(a);
        let z = 2.0 * b - 1.0;
        let s = (1.0 - z * z).sqrt();
        let phi = std::f64::consts::TAU * t;
        let p = SpatialPoint::new(r * s * phi.cos(), r * s * phi.sin(), r * z);
        match distortion_at(p, &cfg) {
            Ok(d) => {
                assert!(d.paper_ratio <= 1.05 * c * r.powi(4), "{p}: {} vs C={c}", d.paper_ratio);
                checked += 1;
            }
            Err(MapError::NonsmoothPoint) => {}
            Err(e) => panic!("{p}: {e}"),
        }
    }
    assert!(checked > 99_000);
}

#[test]
fn middle_band_ratio_is_the_fourth_power_of_rho() {
    let cfg = reg();
    for rho in [1.5, 3.0, 10.0, 100.0] {
        let d = distortion_at(SpatialPoint::new(rho, 0.0, 0.0), &cfg).unwrap();
        let expect = rho.powi(4);
        assert!((d.paper_ratio - expect).abs() <= 1e-9 * expect, "{rho}: {}", d.paper_ratio);
    }
}

#[test]
fn preimages_lift_and_map_back() {
    let cfg = reg();
    for i in 0..10_000 {
        let q = spatial_sample(&cfg, 18, i);
        let set = preimage_spatial(q, &cfg);
        assert!(set.complete);
        for p in &set.points {
            let v = eval_spatial(*p, &cfg);
            assert!(v.dist(q) <= 1e-10 * (1.0 + q.norm()), "{q}: {p} -> {v}");
        }
    }
}
