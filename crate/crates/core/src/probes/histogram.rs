use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::uniform_in_box;
use super::{ProbePoint, Window};
use crate::error::ProbeError;
use crate::reference::MapHandle;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreimageHistogram {
    pub window: Window,
    pub seed: u64,
    pub targets: usize,
    /// Preimage count -> number of targets.
    pub counts: BTreeMap<usize, usize>,
    /// Targets whose fibre was reported as not discrete.
    pub incomplete: usize,
}

impl PreimageHistogram {
    pub fn fraction(&self, count: usize) -> f64 {
        self.counts.get(&count).copied().unwrap_or(0) as f64 / self.targets as f64
    }
}

/// Histogram of analytic preimage counts over `m` seeded uniform targets in
/// `window`.
pub fn preimage_histogram<P: ProbePoint>(
    map: &MapHandle,
    window: &Window,
    m: usize,
    seed: u64,
) -> Result<PreimageHistogram, ProbeError> {
    window.check_dim(P::DIM)?;
    if !map.has_solver() {
        return Err(ProbeError::NoSolver(map.name()));
    }
    if m == 0 {
        return Err(ProbeError::InvalidArgument("histogram needs at least one target".into()));
    }
    let per_target: Vec<(usize, bool)> = (0..m as u64)
        .into_par_iter()
        .map(|i| {
            let t = P::from_coords(&uniform_in_box(&window.lo, &window.hi, seed, i));
            P::preimages(map, t).map(|s| (s.len(), s.complete))
        })
        .collect::<Result<_, _>>()?;
    let mut counts = BTreeMap::new();
    let mut incomplete = 0;
    for (n, complete) in per_target {
        *counts.entry(n).or_insert(0) += 1;
        incomplete += usize::from(!complete);
    }
    Ok(PreimageHistogram { window: window.clone(), seed, targets: m, counts, incomplete })
}
