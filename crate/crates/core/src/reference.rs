//! Auxiliary maps: winding maps, inversions, the inverted winding map with a
//! pole at the origin, and right-to-left composition behind a single
//! [`MapHandle`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{MapError, ProbeError};
use crate::geometry::{MapConfig, PlanarPoint, RegionTag, SpatialPoint};
use crate::planar::{eval_planar, preimage_planar, PreimageSet};
use crate::spatial::{eval_spatial, preimage_spatial};

/// Center of the inversion conjugating the winding map.
pub const REMARK_CENTER: SpatialPoint = SpatialPoint { x: 1.0, y: 0.0, z: 0.0 };
/// Squared radius of that inversion.
pub const REMARK_RADIUS_SQ: f64 = 2.0;

/// Values closer than this to an inversion center are treated as hitting it.
const CENTER_EPS_SQ: f64 = 1e-300 * 1e-300;

/// `z -> z^2` on the plane.
#[inline]
pub fn winding_planar(z: PlanarPoint) -> PlanarPoint {
    PlanarPoint::new(z.x * z.x - z.y * z.y, 2.0 * z.x * z.y)
}

/// `(rho, phi, z) -> (rho, 2 phi, z)`.
#[inline]
pub fn winding_spatial(p: SpatialPoint) -> SpatialPoint {
    let rho = p.rho();
    if rho == 0.0 {
        return p;
    }
    // (x + iy)^2 / rho keeps the modulus and doubles the argument
    let sq = winding_planar(PlanarPoint::new(p.x, p.y));
    SpatialPoint::new(sq.x / rho, sq.y / rho, p.z)
}

/// `x -> x / |x|^2`.
pub fn inversion(p: SpatialPoint) -> Result<SpatialPoint, MapError> {
    let n2 = p.norm_sq();
    if n2 == 0.0 {
        return Err(MapError::PunctureInput { stage: 0 });
    }
    Ok(p.scale(1.0 / n2))
}

/// `x -> a + s^2 (x - a) / |x - a|^2`.
pub fn sphere_inversion(p: SpatialPoint, center: SpatialPoint, radius: f64) -> Result<SpatialPoint, MapError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(MapError::InvalidArgument(format!("inversion radius must be positive, got {radius}")));
    }
    let d = p - center;
    let n2 = d.norm_sq();
    if n2 == 0.0 {
        return Err(MapError::PunctureInput { stage: 0 });
    }
    Ok(center + d.scale(radius * radius / n2))
}

/// The winding map conjugated by the inversion in the sphere about
/// `(1, 0, 0)` of radius `sqrt 2`.
///
/// The inversion sends the z-axis to the unit circle of the XZ-plane and
/// swaps `(1, 0, 0)` with infinity, so the branch set is that circle, the
/// origin is a pole, and `(1, 0, 0)` is fixed.
pub fn remark_map(p: SpatialPoint) -> Result<SpatialPoint, MapError> {
    if p.norm_sq() == 0.0 {
        return Err(MapError::PunctureInput { stage: 0 });
    }
    let a = REMARK_CENTER;
    let d = p - a;
    let n2 = d.norm_sq();
    if n2 == 0.0 {
        // infinity is fixed by the winding map
        return Ok(a);
    }
    let w = winding_spatial(a + d.scale(REMARK_RADIUS_SQ / n2));
    let e = w - a;
    let m2 = e.norm_sq();
    if m2 <= CENTER_EPS_SQ || !w.is_finite() {
        return Err(MapError::PoleOverflow { stage: 0 });
    }
    let out = a + e.scale(REMARK_RADIUS_SQ / m2);
    if !out.is_finite() {
        return Err(MapError::PoleOverflow { stage: 0 });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapKind {
    /// The branched cover on R^3.
    PaperF,
    /// Its restriction to a single half-plane.
    PaperFPlanar,
    Winding2,
    Winding3,
    InversionOrigin,
    SphereInversion { center: SpatialPoint, radius: f64 },
    RemarkMap,
    Identity2,
    Identity3,
    /// Applied right to left: the last stage acts first.
    Composition { stages: Vec<MapHandle> },
}

/// A map together with the configuration of the construction it uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapHandle {
    pub kind: MapKind,
    pub config: MapConfig,
}

impl MapHandle {
    pub fn new(kind: MapKind, config: MapConfig) -> Result<Self, MapError> {
        match &kind {
            MapKind::SphereInversion { radius, .. } if !(*radius > 0.0 && radius.is_finite()) => {
                return Err(MapError::InvalidArgument(format!("inversion radius must be positive, got {radius}")));
            }
            MapKind::Composition { stages } => {
                if stages.is_empty() {
                    return Err(MapError::InvalidArgument("composition needs at least one map".into()));
                }
                if let Some(s) = stages.iter().find(|s| s.dim() != 3) {
                    return Err(MapError::InvalidArgument(format!("composition stage `{}` is not spatial", s.name())));
                }
            }
            _ => {}
        }
        Ok(Self { kind, config })
    }

    fn simple(kind: MapKind) -> Self {
        Self { kind, config: MapConfig::default() }
    }

    pub fn paper_f(config: MapConfig) -> Self {
        Self { kind: MapKind::PaperF, config }
    }

    pub fn paper_f_planar(config: MapConfig) -> Self {
        Self { kind: MapKind::PaperFPlanar, config }
    }

    pub fn winding2() -> Self {
        Self::simple(MapKind::Winding2)
    }

    pub fn winding3() -> Self {
        Self::simple(MapKind::Winding3)
    }

    pub fn inversion_origin() -> Self {
        Self::simple(MapKind::InversionOrigin)
    }

    pub fn sphere_inversion(center: SpatialPoint, radius: f64) -> Result<Self, MapError> {
        Self::new(MapKind::SphereInversion { center, radius }, MapConfig::default())
    }

    pub fn remark() -> Self {
        Self::simple(MapKind::RemarkMap)
    }

    pub fn identity2() -> Self {
        Self::simple(MapKind::Identity2)
    }

    pub fn identity3() -> Self {
        Self::simple(MapKind::Identity3)
    }

    pub fn compose(stages: Vec<MapHandle>) -> Result<Self, MapError> {
        Self::new(MapKind::Composition { stages }, MapConfig::default())
    }

    /// `F o h` on the punctured unit ball.
    pub fn punctured_ball(config: MapConfig) -> Self {
        Self {
            kind: MapKind::Composition { stages: vec![Self::paper_f(config), Self::inversion_origin()] },
            config,
        }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            MapKind::PaperFPlanar | MapKind::Winding2 | MapKind::Identity2 => 2,
            _ => 3,
        }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            MapKind::PaperF => "paperF".into(),
            MapKind::PaperFPlanar => "paperF-planar".into(),
            MapKind::Winding2 => "winding2".into(),
            MapKind::Winding3 => "winding3".into(),
            MapKind::InversionOrigin => "inversion".into(),
            MapKind::SphereInversion { .. } => "sphere-inversion".into(),
            MapKind::RemarkMap => "remark".into(),
            MapKind::Identity2 => "identity2".into(),
            MapKind::Identity3 => "identity".into(),
            MapKind::Composition { stages } => {
                let names: Vec<_> = stages.iter().map(|s| s.name()).collect();
                format!("compose({})", names.join(","))
            }
        }
    }

    /// Points excluded from the domain.
    pub fn domain_note(&self) -> String {
        match &self.kind {
            MapKind::PaperFPlanar => "open half-plane x > 0".into(),
            MapKind::InversionOrigin => "R^3 minus the origin".into(),
            MapKind::SphereInversion { center, .. } => format!("R^3 minus {center}"),
            MapKind::RemarkMap => "R^3 minus the origin (pole)".into(),
            MapKind::Composition { stages } => {
                let notes: Vec<_> = stages.iter().rev().map(|s| s.domain_note()).collect();
                format!("successive domains: {}", notes.join(" ; "))
            }
            _ => "everywhere".into(),
        }
    }

    pub fn eval2(&self, p: PlanarPoint) -> Result<PlanarPoint, MapError> {
        match self.kind {
            MapKind::PaperFPlanar => eval_planar(p, &self.config),
            MapKind::Winding2 => Ok(winding_planar(p)),
            MapKind::Identity2 => Ok(p),
            _ => Err(MapError::DimensionMismatch { expected: 3 }),
        }
    }

    pub fn eval3(&self, p: SpatialPoint) -> Result<SpatialPoint, MapError> {
        match &self.kind {
            MapKind::PaperF => Ok(eval_spatial(p, &self.config)),
            MapKind::Winding3 => Ok(winding_spatial(p)),
            MapKind::InversionOrigin => inversion(p),
            MapKind::SphereInversion { center, radius } => sphere_inversion(p, *center, *radius),
            MapKind::RemarkMap => remark_map(p),
            MapKind::Identity3 => Ok(p),
            MapKind::Composition { stages } => {
                let mut x = p;
                for (i, stage) in stages.iter().enumerate().rev() {
                    x = stage.eval3(x).map_err(|e| match e {
                        MapError::PunctureInput { .. } => MapError::PunctureInput { stage: i },
                        MapError::PoleOverflow { .. } => MapError::PoleOverflow { stage: i },
                        other => other,
                    })?;
                }
                Ok(x)
            }
            _ => Err(MapError::DimensionMismatch { expected: 2 }),
        }
    }

    pub fn has_solver(&self) -> bool {
        matches!(
            self.kind,
            MapKind::PaperF
                | MapKind::PaperFPlanar
                | MapKind::Identity2
                | MapKind::Identity3
                | MapKind::InversionOrigin
                | MapKind::SphereInversion { .. }
        )
    }

    pub fn preimages2(&self, q: PlanarPoint) -> Result<PreimageSet<PlanarPoint>, ProbeError> {
        match self.kind {
            MapKind::PaperFPlanar => Ok(preimage_planar(q, &self.config)?),
            MapKind::Identity2 => Ok(single(q)),
            _ => Err(ProbeError::NoSolver(self.name())),
        }
    }

    pub fn preimages3(&self, q: SpatialPoint) -> Result<PreimageSet<SpatialPoint>, ProbeError> {
        match &self.kind {
            MapKind::PaperF => Ok(preimage_spatial(q, &self.config)),
            MapKind::Identity3 => Ok(single(q)),
            // involutions
            MapKind::InversionOrigin => Ok(single(inversion(q)?)),
            MapKind::SphereInversion { center, radius } => Ok(single(sphere_inversion(q, *center, *radius)?)),
            _ => Err(ProbeError::NoSolver(self.name())),
        }
    }
}

impl fmt::Display for MapHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn single<P>(p: P) -> PreimageSet<P> {
    PreimageSet { points: vec![p], provenance: vec![RegionTag::Outside], complete: true }
}

/// Applies `maps` right to left.
pub fn compose(maps: &[MapHandle], p: SpatialPoint) -> Result<SpatialPoint, MapError> {
    MapHandle::compose(maps.to_vec())?.eval3(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64, z: f64) -> SpatialPoint {
        SpatialPoint::new(x, y, z)
    }

    #[test]
    fn winding_examples() {
        assert_eq!(winding_planar(PlanarPoint::new(1.0, 0.0)), PlanarPoint::new(1.0, 0.0));
        assert_eq!(winding_planar(PlanarPoint::new(0.0, 1.0)), PlanarPoint::new(-1.0, 0.0));
        assert_eq!(winding_spatial(pt(1.0, 0.0, 5.0)), pt(1.0, 0.0, 5.0));
        assert_eq!(winding_spatial(pt(0.0, 1.0, 0.0)), pt(-1.0, 0.0, 0.0));
        assert_eq!(winding_spatial(pt(0.0, 0.0, 3.0)), pt(0.0, 0.0, 3.0));
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(inversion(pt(2.0, 0.0, 0.0)).unwrap(), pt(0.5, 0.0, 0.0));
        assert_eq!(inversion(SpatialPoint::ORIGIN), Err(MapError::PunctureInput { stage: 0 }));
        let u = pt(0.6, 0.0, 0.8);
        assert!(inversion(u).unwrap().dist(u) < 1e-15);

        let a = pt(1.0, 0.0, 0.0);
        let s = 2.0_f64.sqrt();
        assert!(sphere_inversion(SpatialPoint::ORIGIN, a, s).unwrap().dist(pt(-1.0, 0.0, 0.0)) < 1e-15);
        assert!(sphere_inversion(pt(0.0, 0.0, 1.0), a, s).unwrap().dist(pt(0.0, 0.0, 1.0)) < 1e-15);
        assert_eq!(sphere_inversion(a, a, s), Err(MapError::PunctureInput { stage: 0 }));
    }

    #[test]
    fn remark_map_fixes_branch_circle() {
        for k in 0..16 {
            let b = std::f64::consts::TAU * k as f64 / 16.0;
            let p = pt(b.cos(), 0.0, b.sin());
            let img = remark_map(p).unwrap();
            assert!(img.dist(p) < 1e-12, "{p} -> {img}");
        }
    }

    #[test]
    fn remark_map_pole_at_origin() {
        // along the x-axis the map is exactly t -> 1/t
        for t in [1e-1, 1e-2, 1e-3, 1e-4] {
            let v = remark_map(pt(t, 0.0, 0.0)).unwrap();
            assert!((v.norm() * t - 1.0).abs() < 1e-9, "t = {t}: {v}");
        }
        assert!(remark_map(pt(1e-3, 0.0, 0.0)).unwrap().norm() > 1e2);
        assert_eq!(remark_map(SpatialPoint::ORIGIN), Err(MapError::PunctureInput { stage: 0 }));
        assert!(remark_map(pt(0.0, 5.0, 0.0)).unwrap().is_finite());
    }

    #[test]
    fn composition_examples() {
        let ball = MapHandle::punctured_ball(MapConfig::regularized());
        let v = ball.eval3(pt(0.5, 0.0, 0.0)).unwrap();
        assert!(v.dist(pt(0.5, 0.0, 0.0)) < 1e-15);

        let twice = [MapHandle::inversion_origin(), MapHandle::inversion_origin()];
        let p = pt(0.3, -2.0, 0.7);
        assert!(compose(&twice, p).unwrap().dist(p) < 1e-12 * p.norm());

        assert_eq!(ball.eval3(SpatialPoint::ORIGIN), Err(MapError::PunctureInput { stage: 1 }));
        assert!(MapHandle::compose(vec![]).is_err());
        assert!(MapHandle::compose(vec![MapHandle::winding2()]).is_err());
    }

    #[test]
    fn punctured_ball_near_origin_is_finite() {
        let ball = MapHandle::punctured_ball(MapConfig::regularized());
        for k in 1..=1000 {
            let t = 0.01 * k as f64 / 1000.0;
            for dir in [pt(1.0, 0.0, 0.0), pt(0.0, 0.6, 0.8), pt(-0.48, 0.6, 0.64)] {
                assert!(ball.eval3(dir.scale(t)).unwrap().is_finite());
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        assert_eq!(MapHandle::winding2().eval3(SpatialPoint::ORIGIN), Err(MapError::DimensionMismatch { expected: 2 }));
        assert_eq!(
            MapHandle::winding3().eval2(PlanarPoint::new(1.0, 0.0)),
            Err(MapError::DimensionMismatch { expected: 3 })
        );
    }

    #[test]
    fn no_solver_for_remark_map() {
        assert!(matches!(MapHandle::remark().preimages3(SpatialPoint::ORIGIN), Err(ProbeError::NoSolver(_))));
    }
}
