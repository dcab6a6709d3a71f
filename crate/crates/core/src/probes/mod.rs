//! Numerical probes.
//!
//! Every probe is deterministic in its parameters: sample sets come from
//! fixed enumerations plus counter-based seeded jitter, parallel work is
//! collected in index order, and reductions run sequentially afterwards, so
//! reports do not depend on the number of worker threads.

mod branch;
mod continuity;
mod growth;
mod histogram;
mod index;
mod openness;
mod oracle;
mod poles;
pub mod sampling;

use serde::{Deserialize, Serialize};

use crate::error::{MapError, ProbeError};
use crate::geometry::{PlanarPoint, SpatialPoint};
use crate::planar::PreimageSet;
use crate::reference::MapHandle;

pub use branch::{branch_scan_planar, branch_scan_spatial, shell_scan, BranchScanReport, CellError, ShellHits, ShellScanReport, TubeStats};
pub use continuity::{continuity_modulus, ModulusSample};
pub use growth::{distortion_sample, growth_fit, log_log_fit, shell_seed, sphere_distortion, GrowthFit};
pub use histogram::{preimage_histogram, PreimageHistogram};
pub use index::{local_index_planar, local_index_spatial, winding_number, IndexReport, ProbePlane, DEFAULT_N0, MAX_SAMPLES};
pub use openness::{openness_probe, OpennessReport};
pub use oracle::{brute_preimage_oracle_planar, brute_preimage_oracle_spatial, OracleCluster, OracleReport, PlanarOracle};
pub use poles::{pole_components, separation_threshold, PoleComponent, PoleComponentsReport};

/// Points the probes can work with.
pub trait ProbePoint: Copy + Send + Sync + PartialEq + std::fmt::Debug {
    const DIM: usize;

    fn eval(map: &MapHandle, p: Self) -> Result<Self, MapError>;
    fn preimages(map: &MapHandle, q: Self) -> Result<PreimageSet<Self>, ProbeError>;
    fn distance(self, other: Self) -> f64;
    fn coords(self) -> [f64; 3];
    fn from_coords(c: &[f64]) -> Self;
    /// Deterministic sample of the closed ball `B(center, radius)`, about `n`
    /// points including the center.
    fn ball_samples(center: Self, radius: f64, n: usize) -> Vec<Self>;
}

impl ProbePoint for PlanarPoint {
    const DIM: usize = 2;

    fn eval(map: &MapHandle, p: Self) -> Result<Self, MapError> {
        map.eval2(p)
    }

    fn preimages(map: &MapHandle, q: Self) -> Result<PreimageSet<Self>, ProbeError> {
        map.preimages2(q)
    }

    fn distance(self, other: Self) -> f64 {
        self.dist(other)
    }

    fn coords(self) -> [f64; 3] {
        [self.x, self.y, 0.0]
    }

    fn from_coords(c: &[f64]) -> Self {
        PlanarPoint::new(c[0], c[1])
    }

    fn ball_samples(center: Self, radius: f64, n: usize) -> Vec<Self> {
        let rings = ((n as f64).sqrt() / 2.0).ceil().max(1.0) as usize;
        let per_ring = (n / rings).max(8);
        let mut out = Vec::with_capacity(rings * per_ring + 1);
        out.push(center);
        for j in 1..=rings {
            let r = radius * j as f64 / rings as f64;
            // stagger the rings so the angles do not line up
            let offset = j as f64 * 0.5 / rings as f64;
            for k in 0..per_ring {
                let th = std::f64::consts::TAU * (k as f64 + offset) / per_ring as f64;
                out.push(PlanarPoint::new(center.x + r * th.cos(), center.y + r * th.sin()));
            }
        }
        out
    }
}

impl ProbePoint for SpatialPoint {
    const DIM: usize = 3;

    fn eval(map: &MapHandle, p: Self) -> Result<Self, MapError> {
        map.eval3(p)
    }

    fn preimages(map: &MapHandle, q: Self) -> Result<PreimageSet<Self>, ProbeError> {
        map.preimages3(q)
    }

    fn distance(self, other: Self) -> f64 {
        self.dist(other)
    }

    fn coords(self) -> [f64; 3] {
        self.to_array()
    }

    fn from_coords(c: &[f64]) -> Self {
        SpatialPoint::new(c[0], c[1], c[2])
    }

    fn ball_samples(center: Self, radius: f64, n: usize) -> Vec<Self> {
        let shells = ((n as f64).cbrt()).ceil().max(1.0) as usize;
        let per_shell = (n / shells).max(8);
        let mut out = Vec::with_capacity(shells * per_shell + 1);
        out.push(center);
        for j in 1..=shells {
            let r = radius * j as f64 / shells as f64;
            for d in sampling::fibonacci_sphere(per_shell, None) {
                out.push(center + d.scale(r));
            }
        }
        out
    }
}

/// An axis-aligned box, 2- or 3-dimensional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Window {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, ProbeError> {
        if lo.len() != hi.len() || !(2..=3).contains(&lo.len()) {
            return Err(ProbeError::InvalidArgument("window must be 2- or 3-dimensional".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a.is_finite() && b.is_finite() && a <= b)) {
            return Err(ProbeError::InvalidArgument(format!("window bounds not ordered: {lo:?} / {hi:?}")));
        }
        Ok(Self { lo, hi })
    }

    /// From interleaved bounds `lo0, hi0, lo1, hi1, ...`.
    pub fn from_bounds(b: &[f64]) -> Result<Self, ProbeError> {
        if b.len() % 2 != 0 {
            return Err(ProbeError::InvalidArgument("window needs an even number of bounds".into()));
        }
        Self::new(b.iter().step_by(2).copied().collect(), b.iter().skip(1).step_by(2).copied().collect())
    }

    pub fn square(lo: f64, hi: f64) -> Self {
        Self { lo: vec![lo; 2], hi: vec![hi; 2] }
    }

    pub fn cube(lo: f64, hi: f64) -> Self {
        Self { lo: vec![lo; 3], hi: vec![hi; 3] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, c: &[f64]) -> bool {
        self.lo.iter().zip(&self.hi).zip(c).all(|((l, h), x)| l <= x && x <= h)
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<(), ProbeError> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(ProbeError::InvalidArgument(format!("expected a {dim}-dimensional window, got {}", self.dim())))
        }
    }

    pub(crate) fn grid(&self, step: f64) -> Result<Grid, ProbeError> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(ProbeError::InvalidArgument(format!("grid step must be positive, got {step}")));
        }
        let counts: Vec<usize> = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| ((h - l) / step + 1e-9).floor() as usize + 1)
            .collect();
        Ok(Grid { lo: self.lo.clone(), step, counts })
    }
}

/// Regular lattice `lo + k * step` inside a window, row-major with the first
/// axis varying slowest.
#[derive(Debug, Clone)]
pub(crate) struct Grid {
    pub lo: Vec<f64>,
    pub step: f64,
    pub counts: Vec<usize>,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn unravel(&self, mut idx: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        for axis in (0..self.counts.len()).rev() {
            out[axis] = idx % self.counts[axis];
            idx /= self.counts[axis];
        }
        out
    }

    pub fn ravel(&self, ijk: &[usize]) -> usize {
        ijk.iter().zip(&self.counts).fold(0, |acc, (i, n)| acc * n + i)
    }

    pub fn coord(&self, axis: usize, k: usize) -> f64 {
        self.lo[axis] + k as f64 * self.step
    }

    pub fn point(&self, idx: usize) -> [f64; 3] {
        let ijk = self.unravel(idx);
        let mut c = [0.0; 3];
        for axis in 0..self.counts.len() {
            c[axis] = self.coord(axis, ijk[axis]);
        }
        c
    }

    /// Nearest lattice index of a point, if the point lies within half a step
    /// of the lattice.
    pub fn nearest(&self, c: &[f64]) -> Option<usize> {
        let mut ijk = [0usize; 3];
        for axis in 0..self.counts.len() {
            let k = ((c[axis] - self.lo[axis]) / self.step).round();
            if k < 0.0 || k >= self.counts[axis] as f64 {
                return None;
            }
            ijk[axis] = k as usize;
        }
        Some(self.ravel(&ijk[..self.counts.len()]))
    }

    /// Face neighbours (4 in 2D, 6 in 3D).
    pub fn face_neighbours(&self, idx: usize, out: &mut Vec<usize>) {
        out.clear();
        let ijk = self.unravel(idx);
        let dim = self.counts.len();
        for axis in 0..dim {
            let mut n = ijk;
            if ijk[axis] > 0 {
                n[axis] -= 1;
                out.push(self.ravel(&n[..dim]));
            }
            if ijk[axis] + 1 < self.counts[axis] {
                n[axis] = ijk[axis] + 1;
                out.push(self.ravel(&n[..dim]));
            }
        }
    }
}

/// A reference set for tube statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceSet {
    /// A finite set of points (planar points use `z = 0`).
    Points { points: Vec<[f64; 3]> },
    /// `x^2 + y^2 = radius^2, z = 0`.
    CircleXy { radius: f64 },
    /// `x^2 + z^2 = radius^2, y = 0`.
    CircleXz { radius: f64 },
    ZAxis,
}

impl ReferenceSet {
    pub fn distance(&self, c: [f64; 3]) -> f64 {
        let [x, y, z] = c;
        match self {
            ReferenceSet::Points { points } => points
                .iter()
                .map(|p| ((x - p[0]).powi(2) + (y - p[1]).powi(2) + (z - p[2]).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min),
            ReferenceSet::CircleXy { radius } => (x.hypot(y) - radius).hypot(z),
            ReferenceSet::CircleXz { radius } => (x.hypot(z) - radius).hypot(y),
            ReferenceSet::ZAxis => x.hypot(y),
        }
    }

    /// `n` evenly spaced points of a circle reference.
    pub fn circle_samples(&self, n: usize) -> Vec<[f64; 3]> {
        let at = |k: usize| std::f64::consts::TAU * k as f64 / n as f64;
        match self {
            ReferenceSet::CircleXy { radius } => {
                (0..n).map(|k| [radius * at(k).cos(), radius * at(k).sin(), 0.0]).collect()
            }
            ReferenceSet::CircleXz { radius } => {
                (0..n).map(|k| [radius * at(k).cos(), 0.0, radius * at(k).sin()]).collect()
            }
            ReferenceSet::Points { points } => points.clone(),
            ReferenceSet::ZAxis => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts_include_both_ends() {
        let g = Window::square(0.5, 1.5).grid(1e-3).unwrap();
        assert_eq!(g.counts, vec![1001, 1001]);
        let g = Window::cube(-1.5, 1.5).grid(2e-2).unwrap();
        assert_eq!(g.counts, vec![151, 151, 151]);
        assert_eq!(g.point(g.ravel(&[75, 75, 75])), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn ravel_round_trip() {
        let g = Window::new(vec![0.0, 0.0, 0.0], vec![1.0, 2.0, 3.0]).unwrap().grid(0.5).unwrap();
        for idx in 0..g.len() {
            let ijk = g.unravel(idx);
            assert_eq!(g.ravel(&ijk), idx);
        }
    }

    #[test]
    fn window_validation() {
        assert!(Window::from_bounds(&[1.0, 0.0, 0.0, 1.0]).is_err());
        assert!(Window::from_bounds(&[0.0, 1.0, 0.0]).is_err());
        assert!(Window::from_bounds(&[0.0]).is_err());
        let w = Window::from_bounds(&[-1.5, 1.5, -1.0, 1.0, -0.5, 0.5]).unwrap();
        assert_eq!(w.lo, vec![-1.5, -1.0, -0.5]);
        assert!(w.grid(0.0).is_err());
    }

    #[test]
    fn reference_distances() {
        assert!((ReferenceSet::CircleXy { radius: 1.0 }.distance([0.0, 0.0, 0.0]) - 1.0).abs() < 1e-15);
        assert_eq!(ReferenceSet::CircleXy { radius: 1.0 }.distance([0.0, 1.0, 0.0]), 0.0);
        assert_eq!(ReferenceSet::CircleXz { radius: 1.0 }.distance([0.0, 0.0, 1.0]), 0.0);
        assert_eq!(ReferenceSet::ZAxis.distance([3.0, 4.0, 9.0]), 5.0);
    }
}
