use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ProbePoint;
use crate::error::ProbeError;
use crate::geometry::PlanarPoint;
use crate::reference::{MapHandle, MapKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusSample {
    pub delta: f64,
    /// `max |f(x) - f(base)|` over the sample set of `B(base, delta)`.
    pub modulus: f64,
    pub samples: usize,
}

/// Sampled modulus of continuity at `base` for each radius in `deltas`.
///
/// At the apex of the planar construction the sample set also contains the
/// segment midpoints `(1 + r, 0)` for `r = delta/2, delta/4, delta/8`.
/// Samples outside the domain of the map are skipped.
pub fn continuity_modulus<P: ProbePoint>(
    map: &MapHandle,
    base: P,
    deltas: &[f64],
    samples: usize,
) -> Result<Vec<ModulusSample>, ProbeError> {
    let fb = P::eval(map, base)?;
    let apex = map.kind == MapKind::PaperFPlanar && base.coords() == PlanarPoint::APEX.coords();
    deltas
        .iter()
        .map(|&delta| {
            if !(delta > 0.0 && delta.is_finite()) {
                return Err(ProbeError::InvalidArgument(format!("delta must be positive, got {delta}")));
            }
            let mut pts = P::ball_samples(base, delta, samples);
            if apex {
                for k in [2.0, 4.0, 8.0] {
                    pts.push(P::from_coords(&[1.0 + delta / k, 0.0, 0.0]));
                }
            }
            let dists: Vec<Option<f64>> = pts
                .par_iter()
                .map(|&p| P::eval(map, p).ok().map(|v| v.distance(fb)))
                .collect();
            let used = dists.iter().flatten().count();
            let modulus = dists.into_iter().flatten().fold(0.0_f64, f64::max);
            Ok(ModulusSample { delta, modulus, samples: used })
        })
        .collect()
}
