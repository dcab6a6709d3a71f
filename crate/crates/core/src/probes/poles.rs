use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ProbePoint, Window};
use crate::error::ProbeError;
use crate::reference::MapHandle;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleComponent {
    pub cells: usize,
    /// Indices of the declared poles whose grid cell lies in this component.
    pub poles: Vec<usize>,
    pub bbox_lo: [f64; 3],
    pub bbox_hi: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleComponentsReport {
    pub threshold: f64,
    pub window: Window,
    pub step: f64,
    pub grid_points: usize,
    /// Face-connected components of `{|f| > threshold}`, in scan order.
    pub components: Vec<PoleComponent>,
    /// Every declared pole inside the window sits in its own component.
    pub separated: bool,
}

impl PoleComponentsReport {
    pub fn component_of(&self, pole: usize) -> Option<usize> {
        self.components.iter().position(|c| c.poles.contains(&pole))
    }
}

/// Connected components of the grid set where `|map| > threshold`. Grid
/// points where the map cannot be evaluated (punctures, poles) count as
/// above the threshold.
pub fn pole_components<P: ProbePoint>(
    map: &MapHandle,
    threshold: f64,
    window: &Window,
    step: f64,
    poles: &[P],
) -> Result<PoleComponentsReport, ProbeError> {
    window.check_dim(P::DIM)?;
    let grid = window.grid(step)?;
    let dim = grid.counts.len();
    let above: Vec<bool> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let p = P::from_coords(&grid.point(idx));
            match P::eval(map, p) {
                Ok(v) => {
                    let c = v.coords();
                    (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt() > threshold
                }
                Err(_) => true,
            }
        })
        .collect();

    const NONE: u32 = u32::MAX;
    let mut label = vec![NONE; grid.len()];
    let mut components: Vec<PoleComponent> = Vec::new();
    let mut queue = VecDeque::new();
    let mut nbrs = Vec::with_capacity(6);
    for start in 0..grid.len() {
        if !above[start] || label[start] != NONE {
            continue;
        }
        let id = components.len() as u32;
        let mut comp = PoleComponent {
            cells: 0,
            poles: Vec::new(),
            bbox_lo: [f64::INFINITY; 3],
            bbox_hi: [f64::NEG_INFINITY; 3],
        };
        label[start] = id;
        queue.push_back(start);
        while let Some(idx) = queue.pop_front() {
            comp.cells += 1;
            let c = grid.point(idx);
            for axis in 0..dim {
                comp.bbox_lo[axis] = comp.bbox_lo[axis].min(c[axis]);
                comp.bbox_hi[axis] = comp.bbox_hi[axis].max(c[axis]);
            }
            grid.face_neighbours(idx, &mut nbrs);
            for &n in &nbrs {
                if above[n] && label[n] == NONE {
                    label[n] = id;
                    queue.push_back(n);
                }
            }
        }
        for axis in dim..3 {
            comp.bbox_lo[axis] = 0.0;
            comp.bbox_hi[axis] = 0.0;
        }
        components.push(comp);
    }

    let mut separated = true;
    for (k, pole) in poles.iter().enumerate() {
        let c = pole.coords();
        if !window.contains(&c[..dim]) {
            continue;
        }
        match grid.nearest(&c[..dim]).map(|i| label[i]) {
            Some(id) if id != NONE => components[id as usize].poles.push(k),
            _ => separated = false,
        }
    }
    if components.iter().any(|c| c.poles.len() > 1) {
        separated = false;
    }
    Ok(PoleComponentsReport { threshold, window: window.clone(), step, grid_points: grid.len(), components, separated })
}

/// Smallest threshold of the ladder at which the declared poles are
/// separated. Its reciprocal is an empirical stand-in for the radius below
/// which the normal neighbourhoods of the poles are disjoint.
pub fn separation_threshold<P: ProbePoint>(
    map: &MapHandle,
    thresholds: &[f64],
    window: &Window,
    step: f64,
    poles: &[P],
) -> Result<Option<f64>, ProbeError> {
    let mut sorted = thresholds.to_vec();
    sorted.sort_by(f64::total_cmp);
    for t in sorted {
        if pole_components(map, t, window, step, poles)?.separated {
            return Ok(Some(t));
        }
    }
    Ok(None)
}
