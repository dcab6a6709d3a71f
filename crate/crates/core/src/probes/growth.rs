use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::fibonacci_sphere;
use crate::error::ProbeError;
use crate::geometry::{boundary_distance, PlanarPoint, SpatialPoint};
use crate::reference::{MapHandle, MapKind};
use crate::spatial::{distortion_at, DistortionSample};

/// Sup of the distortion ratios over spheres, with log-log fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub radii: Vec<f64>,
    pub sup_outer: Vec<f64>,
    pub sup_paper: Vec<f64>,
    /// Smooth samples kept per sphere.
    pub kept: Vec<usize>,
    pub slope_outer: f64,
    pub slope_paper: f64,
    /// Intercept of the `|DF| / J_F` fit, i.e. `log C`.
    pub log_c: f64,
    pub log_c_outer: f64,
}

/// Least-squares line through `(log x, log y)`; returns `(slope, intercept)`.
pub fn log_log_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Distortion of `map` at `p`, or `None` when `p` lies on the z-axis or within
/// `margin * (1 + |p|)` of the non-smooth set.
pub fn distortion_sample(map: &MapHandle, p: SpatialPoint, margin: f64) -> Option<Result<DistortionSample, ProbeError>> {
    match map.kind {
        MapKind::PaperF => {
            let q = PlanarPoint::new(p.rho(), p.z);
            if q.x == 0.0 || boundary_distance(q, &map.config) < margin * (1.0 + p.norm()) {
                return None;
            }
            Some(distortion_at(p, &map.config).map_err(ProbeError::from))
        }
        MapKind::Identity3 => Some(Ok(DistortionSample {
            point: p,
            op_norm: 1.0,
            jac_det: 1.0,
            outer_ratio: 1.0,
            paper_ratio: 1.0,
        })),
        _ => Some(Err(ProbeError::NoJacobian(map.name()))),
    }
}

/// Seed of the `k`-th sphere of a growth fit run with `seed`.
pub fn shell_seed(seed: u64, k: usize) -> u64 {
    seed ^ ((k as u64 + 1) << 40)
}

/// Distortion at `n` seeded points of the sphere of radius `radius`, in
/// sample order, leaving out points within `boundary_margin * (1 + |p|)` of
/// the non-smooth set.
pub fn sphere_distortion(
    map: &MapHandle,
    radius: f64,
    n: usize,
    boundary_margin: f64,
    seed: u64,
) -> Result<Vec<DistortionSample>, ProbeError> {
    let dirs = fibonacci_sphere(n, Some(seed));
    let results: Vec<Option<Result<DistortionSample, ProbeError>>> =
        dirs.par_iter().map(|d| distortion_sample(map, d.scale(radius), boundary_margin)).collect();
    results.into_iter().flatten().collect()
}

/// For each radius, the sup of `|DF|^3 / J_F` and `|DF| / J_F` over seeded
/// sphere samples, skipping points within `boundary_margin * (1 + |p|)` of the
/// non-smooth set, followed by log-log least-squares fits.
pub fn growth_fit(
    map: &MapHandle,
    radii: &[f64],
    samples_per_sphere: usize,
    boundary_margin: f64,
    seed: u64,
) -> Result<GrowthFit, ProbeError> {
    if radii.len() < 4 {
        return Err(ProbeError::InvalidArgument(format!("growth fit needs at least 4 radii, got {}", radii.len())));
    }
    if radii.windows(2).any(|w| !(w[0] < w[1])) || !(radii[0] > 0.0) {
        return Err(ProbeError::InvalidArgument("radii must be positive and strictly increasing".into()));
    }
    if samples_per_sphere == 0 {
        return Err(ProbeError::InvalidArgument("need at least one sample per sphere".into()));
    }
    let mut sup_outer = Vec::with_capacity(radii.len());
    let mut sup_paper = Vec::with_capacity(radii.len());
    let mut kept = Vec::with_capacity(radii.len());
    for (k, &radius) in radii.iter().enumerate() {
        let samples = sphere_distortion(map, radius, samples_per_sphere, boundary_margin, shell_seed(seed, k))?;
        let n = samples.len();
        if 2 * n < samples_per_sphere {
            return Err(ProbeError::InsufficientSmoothSamples { radius, kept: n, total: samples_per_sphere });
        }
        sup_outer.push(samples.iter().map(|s| s.outer_ratio).fold(0.0, f64::max));
        sup_paper.push(samples.iter().map(|s| s.paper_ratio).fold(0.0, f64::max));
        kept.push(n);
    }
    let (slope_outer, log_c_outer) = log_log_fit(radii, &sup_outer);
    let (slope_paper, log_c) = log_log_fit(radii, &sup_paper);
    Ok(GrowthFit { radii: radii.to_vec(), sup_outer, sup_paper, kept, slope_outer, slope_paper, log_c, log_c_outer })
}
