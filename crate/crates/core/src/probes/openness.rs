use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::uniform_in_unit_ball;
use super::ProbePoint;
use crate::error::ProbeError;
use crate::reference::MapHandle;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpennessReport<P> {
    pub base: P,
    pub delta: f64,
    pub epsilon: f64,
    pub targets: usize,
    /// Targets with at least one preimage inside `B(base, delta)`.
    pub covered: usize,
    pub fraction: f64,
}

/// Fraction of `m` seeded targets in `B(f(base), epsilon)` that have a
/// preimage in `B(base, delta)`. A value of 1 means the sampled image of the
/// small ball contains the target ball.
pub fn openness_probe<P: ProbePoint>(
    map: &MapHandle,
    base: P,
    delta: f64,
    epsilon: f64,
    m: usize,
    seed: u64,
) -> Result<OpennessReport<P>, ProbeError> {
    if !map.has_solver() {
        return Err(ProbeError::NoSolver(map.name()));
    }
    if !(delta > 0.0 && epsilon > 0.0) || m == 0 {
        return Err(ProbeError::InvalidArgument("openness probe needs delta, epsilon, m > 0".into()));
    }
    let fb = P::eval(map, base)?;
    let c = fb.coords();
    let hits: Vec<bool> = (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let u = uniform_in_unit_ball(P::DIM, seed, i);
            let t = P::from_coords(&[c[0] + epsilon * u[0], c[1] + epsilon * u[1], c[2] + epsilon * u[2]]);
            match P::preimages(map, t) {
                Ok(set) => set.points.iter().any(|p| p.distance(base) < delta),
                Err(_) => false,
            }
        })
        .collect();
    let covered = hits.iter().filter(|h| **h).count();
    Ok(OpennessReport { base, delta, epsilon, targets: m, covered, fraction: covered as f64 / m as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{MapConfig, PlanarPoint, SpatialPoint};

    #[test]
    fn open_at_regular_point() {
        let f = MapHandle::paper_f_planar(MapConfig::regularized());
        let rep = openness_probe(&f, PlanarPoint::new(2.0, 0.5), 1e-2, 1e-3, 500, 0).unwrap();
        assert_eq!(rep.fraction, 1.0);
    }

    #[test]
    fn open_at_apex() {
        let f = MapHandle::paper_f_planar(MapConfig::regularized());
        let rep = openness_probe(&f, PlanarPoint::APEX, 1e-2, 1e-5, 500, 0).unwrap();
        assert_eq!(rep.fraction, 1.0);
    }

    #[test]
    fn open_in_identity_region() {
        let f = MapHandle::paper_f_planar(MapConfig::regularized());
        let rep = openness_probe(&f, PlanarPoint::new(0.5, 4.0), 1e-2, 0.5e-2, 500, 3).unwrap();
        assert_eq!(rep.fraction, 1.0);
        let f = MapHandle::paper_f(MapConfig::regularized());
        let rep = openness_probe(&f, SpatialPoint::new(0.0, 0.6, 0.0), 1e-2, 0.5e-2, 200, 3).unwrap();
        assert_eq!(rep.fraction, 1.0);
    }

    #[test]
    fn requires_solver() {
        let err = openness_probe(&MapHandle::remark(), SpatialPoint::new(0.0, 5.0, 0.0), 1e-2, 1e-3, 10, 0);
        assert!(matches!(err, Err(ProbeError::NoSolver(_))));
    }
}
