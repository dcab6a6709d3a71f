//! The branched cover `F: R^3 -> R^3`, assembled from the planar map on every
//! meridian half-plane and the identity on the z-axis.
//!
//! In cylindrical coordinates `F(rho, phi, z) = (u, phi, v)` with
//! `(u, v) = f(rho, z)`, so the derivative splits orthogonally into the
//! planar jacobian on the meridian directions and the factor `u / rho` on the
//! angular direction.

use serde::{Deserialize, Serialize};

use crate::error::MapError;
use crate::geometry::{MapConfig, Mat2, Mat3, PlanarPoint, SpatialPoint};
use crate::planar::{jet_planar, preimage_planar, eval_band, PreimageSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet3 {
    pub value: SpatialPoint,
    /// Cartesian derivative.
    pub jacobian: Mat3,
    /// Derivative of the meridian map `(rho, z) -> (u, v)`.
    pub planar_part: Mat2,
    /// Stretch `u / rho` of the angular direction.
    pub angular_factor: f64,
    pub smooth: bool,
}

impl Jet3 {
    /// Jacobian determinant from the orthogonal splitting.
    pub fn det(&self) -> f64 {
        self.planar_part.det() * self.angular_factor
    }
}

/// Pointwise distortion data at a smooth point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionSample {
    pub point: SpatialPoint,
    /// Largest singular value `|DF|`.
    pub op_norm: f64,
    /// `J_F = det DF`.
    pub jac_det: f64,
    /// `|DF|^3 / J_F`.
    pub outer_ratio: f64,
    /// `|DF| / J_F`.
    pub paper_ratio: f64,
}

#[inline]
fn on_axis(p: SpatialPoint) -> bool {
    p.x == 0.0 && p.y == 0.0
}

pub fn eval_spatial(p: SpatialPoint, cfg: &MapConfig) -> SpatialPoint {
    if on_axis(p) {
        return p;
    }
    let rho = p.rho();
    let q = PlanarPoint::new(rho, p.z);
    let tag = crate::geometry::classify_region(q, cfg).tag;
    let img = eval_band(tag, q, cfg);
    let k = img.x / rho;
    SpatialPoint::new(p.x * k, p.y * k, img.y)
}

pub fn jet_spatial(p: SpatialPoint, cfg: &MapConfig) -> Result<Jet3, MapError> {
    if on_axis(p) {
        return Err(MapError::OnAxisInput);
    }
    let rho = p.rho();
    let (cos, sin) = (p.x / rho, p.y / rho);
    let planar = jet_planar(PlanarPoint::new(rho, p.z), cfg)?;
    let u = planar.value.x;
    let angular = u / rho;
    let [[a, b], [c, d]] = planar.jacobian.0;

    // columns e_rho, e_phi, e_z
    let frame = Mat3([[cos, -sin, 0.0], [sin, cos, 0.0], [0.0, 0.0, 1.0]]);
    let local = Mat3([[a, 0.0, b], [0.0, angular, 0.0], [c, 0.0, d]]);
    let jacobian = frame.mul(&local).mul(&frame.transpose());

    Ok(Jet3 {
        value: SpatialPoint::new(cos * u, sin * u, planar.value.y),
        jacobian,
        planar_part: planar.jacobian,
        angular_factor: angular,
        smooth: planar.smooth,
    })
}

pub fn distortion_from_jet(point: SpatialPoint, jet: &Jet3) -> Result<DistortionSample, MapError> {
    if !jet.smooth {
        return Err(MapError::NonsmoothPoint);
    }
    let (sigma, _) = jet.planar_part.singular_values();
    let op_norm = sigma.max(jet.angular_factor);
    let jac_det = jet.det();
    if !(jac_det > 0.0) {
        return Err(MapError::DegenerateJacobian(jac_det));
    }
    Ok(DistortionSample {
        point,
        op_norm,
        jac_det,
        outer_ratio: op_norm.powi(3) / jac_det,
        paper_ratio: op_norm / jac_det,
    })
}

pub fn distortion_at(p: SpatialPoint, cfg: &MapConfig) -> Result<DistortionSample, MapError> {
    distortion_from_jet(p, &jet_spatial(p, cfg)?)
}

pub fn preimage_spatial(q: SpatialPoint, cfg: &MapConfig) -> PreimageSet<SpatialPoint> {
    if on_axis(q) {
        return PreimageSet {
            points: vec![q],
            provenance: vec![crate::geometry::RegionTag::Outside],
            complete: true,
        };
    }
    let rho = q.rho();
    let (cos, sin) = (q.x / rho, q.y / rho);
    let planar = preimage_planar(PlanarPoint::new(rho, q.z), cfg)
        .expect("rho > 0 off the axis");
    PreimageSet {
        points: planar
            .points
            .iter()
            .map(|p| SpatialPoint::new(cos * p.x, sin * p.x, p.y))
            .collect(),
        provenance: planar.provenance,
        complete: planar.complete,
    }
}
