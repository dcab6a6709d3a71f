use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::index::{local_index_planar, local_index_spatial, ProbePlane, DEFAULT_N0};
use super::{ProbePoint, ReferenceSet, Window};
use crate::error::ProbeError;
use crate::geometry::{PlanarPoint, SpatialPoint};
use crate::reference::MapHandle;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellError {
    pub point: [f64; 3],
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubeStats {
    pub reference: ReferenceSet,
    pub max_distance: f64,
    pub mean_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchScanReport<P> {
    pub window: Window,
    pub step: f64,
    pub probe_radius: f64,
    pub grid_points: usize,
    /// Grid points with index >= 2 at both the probe radius and half of it.
    pub hits: Vec<P>,
    /// Grid points with index >= 2 at the probe radius only.
    pub unverified: Vec<P>,
    pub errors: Vec<CellError>,
    pub tube: Option<TubeStats>,
}

impl<P: ProbePoint> BranchScanReport<P> {
    /// Largest distance from a sample point to its nearest hit
    /// (infinite when there are no hits).
    pub fn coverage_radius(&self, samples: &[[f64; 3]]) -> f64 {
        samples
            .iter()
            .map(|s| {
                self.hits
                    .iter()
                    .map(|h| {
                        let c = h.coords();
                        ((c[0] - s[0]).powi(2) + (c[1] - s[1]).powi(2) + (c[2] - s[2]).powi(2)).sqrt()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
}

enum Outcome {
    Hit,
    Unverified,
    Failed(String),
}

fn classify<F>(index: &F, radius: f64) -> Option<Outcome>
where
    F: Fn(f64) -> Result<i64, ProbeError>,
{
    match index(radius) {
        Ok(w) if w >= 2 => match index(radius / 2.0) {
            Ok(w) if w >= 2 => Some(Outcome::Hit),
            Ok(_) => Some(Outcome::Unverified),
            Err(e) => Some(Outcome::Failed(e.to_string())),
        },
        Ok(_) => None,
        Err(e) => Some(Outcome::Failed(e.to_string())),
    }
}

fn scan<P, F>(
    window: &Window,
    step: f64,
    probe_radius: f64,
    reference: Option<&ReferenceSet>,
    index_at: F,
) -> Result<BranchScanReport<P>, ProbeError>
where
    P: ProbePoint,
    F: Fn(P, f64) -> Result<i64, ProbeError> + Sync,
{
    window.check_dim(P::DIM)?;
    if !(probe_radius > 0.0) {
        return Err(ProbeError::InvalidArgument(format!("probe radius must be positive, got {probe_radius}")));
    }
    let grid = window.grid(step)?;
    let outcomes: Vec<(P, Outcome)> = (0..grid.len())
        .into_par_iter()
        .filter_map(|idx| {
            let p = P::from_coords(&grid.point(idx));
            classify(&|r| index_at(p, r), probe_radius).map(|o| (p, o))
        })
        .collect();

    let mut hits = Vec::new();
    let mut unverified = Vec::new();
    let mut errors = Vec::new();
    for (p, o) in outcomes {
        match o {
            Outcome::Hit => hits.push(p),
            Outcome::Unverified => unverified.push(p),
            Outcome::Failed(error) => errors.push(CellError { point: p.coords(), error }),
        }
    }
    let tube = reference.map(|r| {
        let d: Vec<f64> = hits.iter().map(|h| r.distance(h.coords())).collect();
        TubeStats {
            reference: r.clone(),
            max_distance: d.iter().copied().fold(0.0, f64::max),
            mean_distance: if d.is_empty() { 0.0 } else { d.iter().sum::<f64>() / d.len() as f64 },
        }
    });
    Ok(BranchScanReport {
        window: window.clone(),
        step,
        probe_radius,
        grid_points: grid.len(),
        hits,
        unverified,
        errors,
        tube,
    })
}

/// Grid scan of a planar map for points of local index at least 2.
pub fn branch_scan_planar(
    map: &MapHandle,
    window: &Window,
    step: f64,
    probe_radius: f64,
    reference: Option<&ReferenceSet>,
) -> Result<BranchScanReport<PlanarPoint>, ProbeError> {
    scan(window, step, probe_radius, reference, |p, r| {
        local_index_planar(map, p, r, DEFAULT_N0).map(|rep| rep.winding)
    })
}

/// Grid scan of a spatial map, probing on circles in `plane`.
pub fn branch_scan_spatial(
    map: &MapHandle,
    window: &Window,
    step: f64,
    probe_radius: f64,
    plane: &ProbePlane,
    reference: Option<&ReferenceSet>,
) -> Result<BranchScanReport<SpatialPoint>, ProbeError> {
    scan(window, step, probe_radius, reference, |p, r| {
        local_index_spatial(map, p, plane, r, DEFAULT_N0).map(|rep| rep.winding)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellHits {
    pub radius: f64,
    pub samples: usize,
    pub hits: Vec<SpatialPoint>,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellScanReport {
    pub probe_radius: f64,
    pub shells: Vec<ShellHits>,
}

impl ShellScanReport {
    pub fn every_shell_hit(&self) -> bool {
        self.shells.iter().all(|s| !s.hits.is_empty())
    }
}

/// Scans spheres of the given radii on a latitude/longitude grid (poles
/// included) for index-2 points.
pub fn shell_scan(
    map: &MapHandle,
    radii: &[f64],
    n_polar: usize,
    n_azimuth: usize,
    probe_radius: f64,
    plane: &ProbePlane,
) -> Result<ShellScanReport, ProbeError> {
    if n_polar < 1 || n_azimuth < 1 {
        return Err(ProbeError::InvalidArgument("shell scan needs a non-empty grid".into()));
    }
    let shells = radii
        .iter()
        .map(|&radius| {
            let mut pts = Vec::new();
            for i in 0..=n_polar {
                let th = std::f64::consts::PI * i as f64 / n_polar as f64;
                if i == 0 || i == n_polar {
                    let z = if i == 0 { radius } else { -radius };
                    pts.push(SpatialPoint::new(0.0, 0.0, z));
                    continue;
                }
                for j in 0..n_azimuth {
                    let ph = std::f64::consts::TAU * j as f64 / n_azimuth as f64;
                    pts.push(SpatialPoint::new(
                        radius * th.sin() * ph.cos(),
                        radius * th.sin() * ph.sin(),
                        radius * th.cos(),
                    ));
                }
            }
            let outcomes: Vec<Option<Outcome>> = pts
                .par_iter()
                .map(|&p| {
                    classify(
                        &|r| local_index_spatial(map, p, plane, r, DEFAULT_N0).map(|rep| rep.winding),
                        probe_radius,
                    )
                })
                .collect();
            let mut hits = Vec::new();
            let mut errors = 0;
            for (p, o) in pts.iter().zip(outcomes) {
                match o {
                    Some(Outcome::Hit) => hits.push(*p),
                    Some(Outcome::Failed(_)) => errors += 1,
                    _ => {}
                }
            }
            ShellHits { radius, samples: pts.len(), hits, errors }
        })
        .collect();
    Ok(ShellScanReport { probe_radius, shells })
}
