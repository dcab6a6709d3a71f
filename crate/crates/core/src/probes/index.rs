use std::f64::consts::{FRAC_PI_4, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::ProbeError;
use crate::geometry::{PlanarPoint, SpatialPoint};
use crate::reference::MapHandle;

/// Initial number of samples on a probe circle.
pub const DEFAULT_N0: usize = 16;
/// Refinement stops with an error beyond this many samples.
pub const MAX_SAMPLES: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexReport<P> {
    pub base: P,
    pub radius: f64,
    /// Samples used by the final, accepted pass.
    pub samples: usize,
    pub winding: i64,
    /// True when the initial sample count had to be doubled.
    pub refined: bool,
}

/// Plane carrying the probe circle of a spatial index computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbePlane {
    /// The half-plane through the base and the z-axis, spanned by the radial
    /// direction and `e_z`. Preserved by maps that keep the azimuth.
    Meridian,
    /// Spanned by `e_x` and `e_y`.
    Horizontal,
    /// Spanned by the direction of the XZ-projection of the base and `e_y`;
    /// transverse to circles about the y-axis in the XZ-plane.
    XzRadial,
    /// Spanned by two given vectors (orthonormalised).
    Span { e1: SpatialPoint, e2: SpatialPoint },
}

impl ProbePlane {
    pub fn basis(&self, base: SpatialPoint) -> Result<(SpatialPoint, SpatialPoint), ProbeError> {
        match self {
            ProbePlane::Meridian => {
                let rho = base.rho();
                let radial = if rho > 0.0 {
                    SpatialPoint::new(base.x / rho, base.y / rho, 0.0)
                } else {
                    SpatialPoint::new(1.0, 0.0, 0.0)
                };
                Ok((radial, SpatialPoint::new(0.0, 0.0, 1.0)))
            }
            ProbePlane::Horizontal => Ok((SpatialPoint::new(1.0, 0.0, 0.0), SpatialPoint::new(0.0, 1.0, 0.0))),
            ProbePlane::XzRadial => {
                let r = base.x.hypot(base.z);
                let radial = if r > 0.0 {
                    SpatialPoint::new(base.x / r, 0.0, base.z / r)
                } else {
                    SpatialPoint::new(1.0, 0.0, 0.0)
                };
                Ok((radial, SpatialPoint::new(0.0, 1.0, 0.0)))
            }
            ProbePlane::Span { e1, e2 } => {
                let n1 = e1.norm();
                if !(n1 > 0.0) {
                    return Err(ProbeError::InvalidArgument("degenerate probe plane".into()));
                }
                let u = e1.scale(1.0 / n1);
                let w = *e2 - u.scale(u.dot(*e2));
                let n2 = w.norm();
                if !(n2 > 1e-12 * e2.norm()) || !(n2 > 0.0) {
                    return Err(ProbeError::InvalidArgument("degenerate probe plane".into()));
                }
                Ok((u, w.scale(1.0 / n2)))
            }
        }
    }
}

#[inline]
fn wrap(mut d: f64) -> f64 {
    while d > PI {
        d -= TAU;
    }
    while d <= -PI {
        d += TAU;
    }
    d
}

fn angle_of(v: [f64; 2]) -> Result<f64, ProbeError> {
    if v[0] == 0.0 && v[1] == 0.0 {
        return Err(ProbeError::ValueCollision);
    }
    Ok(v[1].atan2(v[0]))
}

/// Winding number about the origin of the closed curve `theta -> curve(theta)`,
/// `theta in [0, 2pi)`. Starts with `n0` samples and doubles until every
/// angle increment is below `pi/4`.
///
/// Returns `(winding, samples, refined)`.
pub fn winding_number<F>(n0: usize, curve: F) -> Result<(i64, usize, bool), ProbeError>
where
    F: Fn(f64) -> Result<[f64; 2], ProbeError>,
{
    let mut n = n0.max(4);
    if n > MAX_SAMPLES {
        return Err(ProbeError::RefinementExhausted { samples: n });
    }
    let mut angles = (0..n)
        .map(|k| angle_of(curve(TAU * k as f64 / n as f64)?))
        .collect::<Result<Vec<_>, _>>()?;
    let mut refined = false;
    loop {
        let mut total = 0.0;
        let mut coarse = false;
        for k in 0..n {
            let d = wrap(angles[(k + 1) % n] - angles[k]);
            if d.abs() >= FRAC_PI_4 {
                coarse = true;
                break;
            }
            total += d;
        }
        if !coarse {
            return Ok(((total / TAU).round() as i64, n, refined));
        }
        if 2 * n > MAX_SAMPLES {
            return Err(ProbeError::RefinementExhausted { samples: n });
        }
        let mut next = Vec::with_capacity(2 * n);
        for (k, a) in angles.iter().enumerate() {
            next.push(*a);
            next.push(angle_of(curve(TAU * (2 * k + 1) as f64 / (2 * n) as f64)?)?);
        }
        angles = next;
        n *= 2;
        refined = true;
    }
}

/// Local index of a planar map at `base`: the winding of the image of the
/// circle of `radius` about `base` around the image of `base`.
pub fn local_index_planar(
    map: &MapHandle,
    base: PlanarPoint,
    radius: f64,
    n0: usize,
) -> Result<IndexReport<PlanarPoint>, ProbeError> {
    check_radius(radius)?;
    let fb = map.eval2(base)?;
    let (winding, samples, refined) = winding_number(n0, |th| {
        let p = PlanarPoint::new(base.x + radius * th.cos(), base.y + radius * th.sin());
        let v = map.eval2(p)?;
        Ok([v.x - fb.x, v.y - fb.y])
    })?;
    Ok(IndexReport { base, radius, samples, winding, refined })
}

/// Local index of a spatial map at `base`, measured on a probe circle in
/// `plane` and projected back onto the same plane.
pub fn local_index_spatial(
    map: &MapHandle,
    base: SpatialPoint,
    plane: &ProbePlane,
    radius: f64,
    n0: usize,
) -> Result<IndexReport<SpatialPoint>, ProbeError> {
    check_radius(radius)?;
    let (e1, e2) = plane.basis(base)?;
    let fb = map.eval3(base)?;
    let (winding, samples, refined) = winding_number(n0, |th| {
        let p = base + e1.scale(radius * th.cos()) + e2.scale(radius * th.sin());
        let d = map.eval3(p)? - fb;
        Ok([d.dot(e1), d.dot(e2)])
    })?;
    Ok(IndexReport { base, radius, samples, winding, refined })
}

fn check_radius(radius: f64) -> Result<(), ProbeError> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(ProbeError::InvalidArgument(format!("probe radius must be positive, got {radius}")))
    }
}
