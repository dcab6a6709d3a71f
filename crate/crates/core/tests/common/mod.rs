#![allow(dead_code)]

//! Samplers and finite-difference oracles shared by the integration tests.

use s1cover::probes::sampling::uniforms;
use s1cover::{boundary_distance, MapConfig, Mat2, Mat3, PlanarPoint, SpatialPoint};

/// Central-difference step used for every jacobian comparison.
pub const FD_STEP: f64 = 1e-6;

/// A point of the half-plane, half of the time inside the cone with the
/// stratum radius log-uniform in `[1e-2, 1e2]`, otherwise uniform in a box.
pub fn planar_sample(cfg: &MapConfig, seed: u64, i: u64) -> PlanarPoint {
    let u: [f64; 4] = uniforms(seed, i);
    if u[0] < 0.5 {
        let r = 10f64.powf(-2.0 + 4.0 * u[1]);
        let w = cfg.slope * r;
        PlanarPoint::new(1.0 + r, w * (2.0 * u[2] - 1.0))
    } else {
        PlanarPoint::new(1e-3 + 20.0 * u[1], 40.0 * u[2] - 20.0)
    }
}

/// Like [`planar_sample`] but redrawn until the point is at least `margin`
/// (relative) away from every non-smooth line.
pub fn smooth_planar_sample(cfg: &MapConfig, seed: u64, i: u64, margin: f64) -> PlanarPoint {
    let mut k = 0;
    loop {
        let p = planar_sample(cfg, seed, i + (k << 32));
        if boundary_distance(p, cfg) > margin * (1.0 + p.norm()) {
            return p;
        }
        k += 1;
    }
}

/// Random rotation of a planar sample about the z-axis.
pub fn spatial_sample(cfg: &MapConfig, seed: u64, i: u64) -> SpatialPoint {
    let q = planar_sample(cfg, seed, i);
    let [phi] = uniforms::<1>(seed ^ 0x5eed, i);
    let phi = std::f64::consts::TAU * phi;
    SpatialPoint::new(q.x * phi.cos(), q.x * phi.sin(), q.y)
}

pub fn smooth_spatial_sample(cfg: &MapConfig, seed: u64, i: u64, margin: f64) -> SpatialPoint {
    let q = smooth_planar_sample(cfg, seed, i, margin);
    let [phi] = uniforms::<1>(seed ^ 0x5eed, i);
    let phi = std::f64::consts::TAU * phi;
    SpatialPoint::new(q.x * phi.cos(), q.x * phi.sin(), q.y)
}

pub fn fd_jacobian_planar(f: impl Fn(PlanarPoint) -> PlanarPoint, p: PlanarPoint, h: f64) -> Mat2 {
    let dx = {
        let (a, b) = (f(PlanarPoint::new(p.x + h, p.y)), f(PlanarPoint::new(p.x - h, p.y)));
        [(a.x - b.x) / (2.0 * h), (a.y - b.y) / (2.0 * h)]
    };
    let dy = {
        let (a, b) = (f(PlanarPoint::new(p.x, p.y + h)), f(PlanarPoint::new(p.x, p.y - h)));
        [(a.x - b.x) / (2.0 * h), (a.y - b.y) / (2.0 * h)]
    };
    Mat2([[dx[0], dy[0]], [dx[1], dy[1]]])
}

pub fn fd_jacobian_spatial(f: impl Fn(SpatialPoint) -> SpatialPoint, p: SpatialPoint, h: f64) -> Mat3 {
    let mut m = [[0.0; 3]; 3];
    for col in 0..3 {
        let mut e = [0.0; 3];
        e[col] = h;
        let e = SpatialPoint::new(e[0], e[1], e[2]);
        let d = (f(p + e) - f(p - e)).scale(1.0 / (2.0 * h));
        for (row, v) in d.to_array().into_iter().enumerate() {
            m[row][col] = v;
        }
    }
    Mat3(m)
}

/// Largest entrywise difference over the largest entry of the reference.
pub fn rel_err2(analytic: &Mat2, fd: &Mat2) -> f64 {
    let mut d = 0.0_f64;
    for i in 0..2 {
        for j in 0..2 {
            d = d.max((analytic.0[i][j] - fd.0[i][j]).abs());
        }
    }
    d / analytic.max_abs_entry().max(f64::MIN_POSITIVE)
}

pub fn rel_err3(analytic: &Mat3, fd: &Mat3) -> f64 {
    let mut d = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            d = d.max((analytic.0[i][j] - fd.0[i][j]).abs());
        }
    }
    d / analytic.max_abs_entry().max(f64::MIN_POSITIVE)
}
