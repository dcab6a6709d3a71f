//! The map `f: T -> T` on a single half-plane.
//!
//! Outside the cone `f` is the identity. Each segment `I_r` is sent around
//! the boundary of a rectangle: the bottom band runs up the segment itself,
//! the second band runs left along the top edge to abscissa `g(r)`, the middle
//! band runs down the far edge, the fourth runs right along the bottom edge,
//! and the top band runs up the segment again. Every piece is affine in the
//! height `t`, so the derivative and the inverse are closed-form.

use serde::{Deserialize, Serialize};

use crate::error::MapError;
use crate::geometry::{
    boundary_distance, classify_region, MapConfig, Mat2, PlanarPoint, RegionTag, INNER_JUNCTION,
    OUTER_JUNCTION,
};

/// Relative tolerance used for boundary detection and preimage dedup.
pub const POINT_TOL: f64 = 1e-12;

/// Value and derivative at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet2 {
    pub value: PlanarPoint,
    pub jacobian: Mat2,
    /// False when the point sits on a band boundary, the cone, or the apex.
    pub smooth: bool,
}

/// All preimages of a target, each tagged with the region it lies in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreimageSet<P> {
    pub points: Vec<P>,
    pub provenance: Vec<RegionTag>,
    /// False when a piece of the map degenerates and the fibre is not discrete.
    pub complete: bool,
}

impl<P> PreimageSet<P> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn check_in_t(p: PlanarPoint) -> Result<(), MapError> {
    if p.x > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(MapError::InvalidArgument(format!("{p} is not a point of the open half-plane x > 0")))
    }
}

/// Evaluates the formula attached to `tag` at `p`, regardless of which region
/// `p` actually lies in. Cone tags need `p.x > 1`.
pub fn eval_band(tag: RegionTag, p: PlanarPoint, cfg: &MapConfig) -> PlanarPoint {
    let PlanarPoint { x, y } = p;
    if tag == RegionTag::Outside {
        return p;
    }
    let r = x - 1.0;
    let w = cfg.slope * r;
    let g = cfg.g(r);
    let span = w * (OUTER_JUNCTION - INNER_JUNCTION);
    match tag {
        RegionTag::Outside => unreachable!(),
        RegionTag::S1 => PlanarPoint::new(x, 5.0 * y + 4.0 * w),
        RegionTag::S2 => {
            let s = (y + w * OUTER_JUNCTION) / span;
            PlanarPoint::new(x + s * (g - x), w)
        }
        // 0 - 5y rather than -5y keeps the axis at +0
        RegionTag::S3 => PlanarPoint::new(g, 0.0 - 5.0 * y),
        RegionTag::S4 => {
            let s = (y - w * INNER_JUNCTION) / span;
            PlanarPoint::new(g + s * (x - g), -w)
        }
        RegionTag::S5 => PlanarPoint::new(x, 5.0 * y - 4.0 * w),
    }
}

/// Jacobian of the formula attached to `tag` at `p`.
pub fn jacobian_band(tag: RegionTag, p: PlanarPoint, cfg: &MapConfig) -> Mat2 {
    let PlanarPoint { x, y } = p;
    let c = cfg.slope;
    if tag == RegionTag::Outside {
        return Mat2::IDENTITY;
    }
    let r = x - 1.0;
    let w = c * r;
    let g = cfg.g(r);
    let dg = cfg.dg(r);
    let span = w * (OUTER_JUNCTION - INNER_JUNCTION);
    // d/dx and d/dy of the band parameter (y + k w) / span; the k w / span
    // part is constant in x, only y / span moves.
    let ds_dx = -y * c / (span * w);
    let ds_dy = 1.0 / span;
    match tag {
        RegionTag::Outside => unreachable!(),
        RegionTag::S1 => Mat2([[1.0, 0.0], [4.0 * c, 5.0]]),
        RegionTag::S2 => {
            let s = (y + w * OUTER_JUNCTION) / span;
            Mat2([[1.0 + s * (dg - 1.0) + (g - x) * ds_dx, (g - x) * ds_dy], [c, 0.0]])
        }
        RegionTag::S3 => Mat2([[dg, 0.0], [0.0, -5.0]]),
        RegionTag::S4 => {
            let s = (y - w * INNER_JUNCTION) / span;
            Mat2([[dg + s * (1.0 - dg) + (x - g) * ds_dx, (x - g) * ds_dy], [-c, 0.0]])
        }
        RegionTag::S5 => Mat2([[1.0, 0.0], [-4.0 * c, 5.0]]),
    }
}

pub fn eval_planar(p: PlanarPoint, cfg: &MapConfig) -> Result<PlanarPoint, MapError> {
    check_in_t(p)?;
    Ok(eval_band(classify_region(p, cfg).tag, p, cfg))
}

/// True when `p` is farther than the boundary tolerance from every
/// non-smooth line of the map.
pub fn is_smooth_point(p: PlanarPoint, cfg: &MapConfig) -> bool {
    boundary_distance(p, cfg) > POINT_TOL * (1.0 + p.norm())
}

pub fn jet_planar(p: PlanarPoint, cfg: &MapConfig) -> Result<Jet2, MapError> {
    check_in_t(p)?;
    let tag = classify_region(p, cfg).tag;
    Ok(Jet2 {
        value: eval_band(tag, p, cfg),
        jacobian: jacobian_band(tag, p, cfg),
        smooth: is_smooth_point(p, cfg),
    })
}

/// Whether `p` lies in the closed band of `tag`, up to rounding.
fn in_band_closure(tag: RegionTag, p: PlanarPoint, cfg: &MapConfig) -> bool {
    if !(p.x > 1.0) {
        return false;
    }
    let w = cfg.slope * (p.x - 1.0);
    let slack = POINT_TOL * (1.0 + p.norm());
    match tag.band(w) {
        Some((lo, hi)) => p.y >= lo - slack && p.y <= hi + slack,
        None => false,
    }
}

#[inline]
fn close(a: PlanarPoint, b: PlanarPoint) -> bool {
    a.dist(b) <= POINT_TOL * (1.0 + a.norm().max(b.norm()))
}

/// Enumerates every preimage of `q` analytically: one candidate per piece,
/// kept when it lands in the closure of its piece's band.
pub fn preimage_planar(q: PlanarPoint, cfg: &MapConfig) -> Result<PreimageSet<PlanarPoint>, MapError> {
    check_in_t(q)?;
    let PlanarPoint { x: u, y: v } = q;
    let c = cfg.slope;
    let mut candidates: Vec<PlanarPoint> = Vec::with_capacity(6);
    let push_in_band = |tag: RegionTag, cand: PlanarPoint, out: &mut Vec<PlanarPoint>| {
        if in_band_closure(tag, cand, cfg) {
            out.push(cand);
        }
    };
    let mut complete = true;

    if classify_region(q, cfg).tag == RegionTag::Outside {
        candidates.push(q);
    }

    // bottom and top bands ride on the segment through u itself
    if u > 1.0 {
        let w = c * (u - 1.0);
        push_in_band(RegionTag::S1, PlanarPoint::new(u, (v - 4.0 * w) / 5.0), &mut candidates);
        push_in_band(RegionTag::S5, PlanarPoint::new(u, (v + 4.0 * w) / 5.0), &mut candidates);
    }

    // far edge: abscissa g(r), height -5t
    if let Ok(r) = cfg.profile_inverse(u) {
        if r > 0.0 && v.abs() <= c * r * (1.0 + POINT_TOL) {
            candidates.push(PlanarPoint::new(1.0 + r, -v / 5.0));
        }
    }

    // top edge (second band) at height +W and bottom edge (fourth band) at -W
    if v != 0.0 {
        let r = v.abs() / c;
        let x = 1.0 + r;
        let w = v.abs();
        let g = cfg.g(r);
        let span = w * (OUTER_JUNCTION - INNER_JUNCTION);
        let (from, to, base) = if v > 0.0 {
            (x, g, -w * OUTER_JUNCTION)
        } else {
            (g, x, w * INNER_JUNCTION)
        };
        let len = to - from;
        if len == 0.0 || (len.abs() <= POINT_TOL * (1.0 + x)) {
            if (u - from).abs() <= POINT_TOL * (1.0 + x) {
                // the whole band collapses onto q
                complete = false;
                candidates.push(PlanarPoint::new(x, base + 0.5 * span));
            }
        } else {
            let s = (u - from) / len;
            let slack = POINT_TOL * (1.0 + x) / len.abs();
            if s >= -slack && s <= 1.0 + slack {
                let s = s.clamp(0.0, 1.0);
                candidates.push(PlanarPoint::new(x, base + s * span));
            }
        }
    }

    let mut points: Vec<PlanarPoint> = Vec::with_capacity(candidates.len());
    for cand in candidates {
        if cand.x > 0.0 && !points.iter().any(|&p| close(p, cand)) {
            points.push(cand);
        }
    }
    let provenance = points.iter().map(|&p| classify_region(p, cfg).tag).collect();
    Ok(PreimageSet { points, provenance, complete })
}

/// Image of the segment `I_r` under `f`, as one polyline per band (bottom
/// band first), each with `samples` points spaced evenly over the closed band.
/// Consecutive polylines share their end points, tracing the rectangle.
pub fn stratum_image_path(r: f64, samples: usize, cfg: &MapConfig) -> Result<Vec<Vec<PlanarPoint>>, MapError> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(MapError::InvalidArgument(format!("stratum radius must be positive, got {r}")));
    }
    if samples < 2 {
        return Err(MapError::InvalidArgument("a band polyline needs at least 2 samples".into()));
    }
    let w = cfg.slope * r;
    Ok(RegionTag::CONE_BANDS
        .iter()
        .map(|&tag| {
            let (lo, hi) = tag.band(w).expect("cone band");
            (0..samples)
                .map(|k| {
                    let y = lo + (hi - lo) * k as f64 / (samples - 1) as f64;
                    eval_band(tag, PlanarPoint::new(1.0 + r, y), cfg)
                })
                .collect()
        })
        .collect())
}
