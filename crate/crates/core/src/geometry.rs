//! Coordinates, the cone stratification of the half-plane `T = {x > 0}`, and
//! the profile function that places the far edge of each image rectangle.
//!
//! Inside the cone `|y| < c (x - 1)` every point lies on a vertical segment
//! `I_r` at abscissa `1 + r` with half-width `W = c r`. Two inner cones cut each
//! segment into five bands of equal length:
//!
//! ```text
//! S1: [-W, -3W/5)  S2: [-3W/5, -W/5)  S3: [-W/5, W/5]  S4: (W/5, 3W/5]  S5: (3W/5, W)
//! ```

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::MapError;

/// A point of the half-plane model `T`: `x` is the distance from the
/// rotation axis, `y` the height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarPoint {
    pub x: f64,
    pub y: f64,
}

impl PlanarPoint {
    pub const APEX: PlanarPoint = PlanarPoint { x: 1.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, other: Self) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl fmt::Display for PlanarPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A point of R^3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpatialPoint {
    pub const ORIGIN: SpatialPoint = SpatialPoint { x: 0.0, y: 0.0, z: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Distance from the z-axis.
    #[inline]
    pub fn rho(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }

    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl std::ops::Add for SpatialPoint {
    type Output = SpatialPoint;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for SpatialPoint {
    type Output = SpatialPoint;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl fmt::Display for SpatialPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Row-major 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    #[inline]
    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    #[inline]
    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    /// Singular values `(max, min)` in closed form.
    pub fn singular_values(&self) -> (f64, f64) {
        let [[a, b], [c, d]] = self.0;
        let p = (a + d).hypot(c - b);
        let q = (a - d).hypot(b + c);
        ((p + q) / 2.0, (p - q).abs() / 2.0)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.0.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Row-major 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn mul(&self, other: &Mat3) -> Mat3 {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        Mat3(out)
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.0.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Which abscissa the far edge of the image rectangle of `I_r` sits at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// `g(r) = 1/r`. Blows up at the apex.
    Literal,
    /// `g(r) = 1/(1+r)`, with `g(0+) = 1`.
    #[default]
    Regularized,
}

impl std::str::FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "literal" => Ok(Profile::Literal),
            "regularized" => Ok(Profile::Regularized),
            other => Err(format!("unknown profile variant `{other}`")),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Literal => "literal",
            Profile::Regularized => "regularized",
        })
    }
}

/// Fraction of the half-width at the outer inner-cone junction.
pub const OUTER_JUNCTION: f64 = 3.0 / 5.0;
/// Fraction of the half-width at the inner junction.
pub const INNER_JUNCTION: f64 = 1.0 / 5.0;

/// Parameters selecting which version of the construction is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapConfig {
    /// Slope `c` of the outer cone `|y| < c (x - 1)`.
    pub slope: f64,
    pub profile: Profile,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self { slope: 1.0, profile: Profile::Regularized }
    }
}

impl MapConfig {
    pub fn new(slope: f64, profile: Profile) -> Result<Self, MapError> {
        if !(slope.is_finite() && slope > 0.0) {
            return Err(MapError::InvalidArgument(format!(
                "cone slope must be positive and finite, got {slope}"
            )));
        }
        Ok(Self { slope, profile })
    }

    pub fn literal() -> Self {
        Self { slope: 1.0, profile: Profile::Literal }
    }

    pub fn regularized() -> Self {
        Self::default()
    }

    /// `g(r)`.
    pub fn profile_eval(&self, r: f64) -> Result<f64, MapError> {
        if !(r > 0.0) {
            return Err(MapError::InvalidArgument(format!("profile needs r > 0, got {r}")));
        }
        Ok(self.g(r))
    }

    /// `g'(r)`.
    pub fn profile_derivative(&self, r: f64) -> Result<f64, MapError> {
        if !(r > 0.0) {
            return Err(MapError::InvalidArgument(format!("profile needs r > 0, got {r}")));
        }
        Ok(self.dg(r))
    }

    /// `g^{-1}(u)` on the range of the profile.
    pub fn profile_inverse(&self, u: f64) -> Result<f64, MapError> {
        match self.profile {
            Profile::Literal if u > 0.0 && u.is_finite() => Ok(1.0 / u),
            Profile::Regularized if u > 0.0 && u < 1.0 => Ok(1.0 / u - 1.0),
            _ => Err(MapError::InvalidArgument(format!(
                "{u} is outside the range of the {} profile",
                self.profile
            ))),
        }
    }

    #[inline]
    pub(crate) fn g(&self, r: f64) -> f64 {
        match self.profile {
            Profile::Literal => 1.0 / r,
            Profile::Regularized => 1.0 / (1.0 + r),
        }
    }

    #[inline]
    pub(crate) fn dg(&self, r: f64) -> f64 {
        match self.profile {
            Profile::Literal => -1.0 / (r * r),
            Profile::Regularized => -1.0 / ((1.0 + r) * (1.0 + r)),
        }
    }

    /// Heights, relative to the x-axis, of the six band boundaries of the
    /// segment with half-width `w`, bottom to top.
    #[inline]
    pub fn band_lines(w: f64) -> [f64; 6] {
        let outer = w * OUTER_JUNCTION;
        let inner = w * INNER_JUNCTION;
        [-w, -outer, -inner, inner, outer, w]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegionTag {
    Outside,
    S1,
    S2,
    S3,
    S4,
    S5,
}

impl RegionTag {
    pub const CONE_BANDS: [RegionTag; 5] =
        [RegionTag::S1, RegionTag::S2, RegionTag::S3, RegionTag::S4, RegionTag::S5];

    /// Closed band `[lo, hi]` of this tag on a segment of half-width `w`.
    pub fn band(self, w: f64) -> Option<(f64, f64)> {
        let [l0, l1, l2, l3, l4, l5] = MapConfig::band_lines(w);
        match self {
            RegionTag::Outside => None,
            RegionTag::S1 => Some((l0, l1)),
            RegionTag::S2 => Some((l1, l2)),
            RegionTag::S3 => Some((l2, l3)),
            RegionTag::S4 => Some((l3, l4)),
            RegionTag::S5 => Some((l4, l5)),
        }
    }
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Position of a cone point on its segment `I_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub r: f64,
    pub halfwidth: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub tag: RegionTag,
    pub stratum: Option<Stratum>,
}

impl Region {
    const OUTSIDE: Region = Region { tag: RegionTag::Outside, stratum: None };
}

/// Classifies a planar point into the identity region or one of the five
/// bands. Boundaries follow the half-open convention in the module docs.
pub fn classify_region(p: PlanarPoint, cfg: &MapConfig) -> Region {
    if !(p.x > 1.0) {
        return Region::OUTSIDE;
    }
    let r = p.x - 1.0;
    let w = cfg.slope * r;
    let t = p.y;
    if !(t.abs() < w) {
        return Region::OUTSIDE;
    }
    let outer = w * OUTER_JUNCTION;
    let inner = w * INNER_JUNCTION;
    let tag = if t < -outer {
        RegionTag::S1
    } else if t < -inner {
        RegionTag::S2
    } else if t <= inner {
        RegionTag::S3
    } else if t <= outer {
        RegionTag::S4
    } else {
        RegionTag::S5
    };
    Region { tag, stratum: Some(Stratum { r, halfwidth: w, t }) }
}

/// Euclidean distance from `p` to the non-smooth set of the planar map: the
/// six rays from the apex `(1, 0)` carrying the cone and band boundaries.
pub fn boundary_distance(p: PlanarPoint, cfg: &MapConfig) -> f64 {
    let (ax, ay) = (p.x - 1.0, p.y);
    let apex = ax.hypot(ay);
    if ax <= 0.0 {
        // every ray points into x > 1, so the apex is the closest point
        return apex;
    }
    MapConfig::band_lines(cfg.slope)
        .iter()
        .map(|&k| {
            let n = 1.0_f64.hypot(k);
            let along = (ax + k * ay) / n;
            if along <= 0.0 {
                apex
            } else {
                (ay - k * ax).abs() / n
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Splits an off-axis point into its half-plane angle in `[0, 2pi)` and its
/// coordinates `(rho, z)` in `T`.
pub fn to_halfplane(p: SpatialPoint) -> Result<(f64, PlanarPoint), MapError> {
    if p.x == 0.0 && p.y == 0.0 {
        return Err(MapError::OnAxisInput);
    }
    let mut angle = p.y.atan2(p.x);
    if angle < 0.0 {
        angle += TAU;
    }
    if angle >= TAU {
        angle = 0.0;
    }
    Ok((angle, PlanarPoint::new(p.rho(), p.z)))
}

pub fn from_halfplane(angle: f64, q: PlanarPoint) -> Result<SpatialPoint, MapError> {
    if !(q.x >= 0.0) {
        return Err(MapError::InvalidArgument(format!(
            "half-plane abscissa must be non-negative, got {}",
            q.x
        )));
    }
    let (s, c) = angle.sin_cos();
    Ok(SpatialPoint::new(q.x * c, q.x * s, q.y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn classify_examples() {
        let cfg = MapConfig::new(1.0, Profile::Regularized).unwrap();
        assert_eq!(classify_region(PlanarPoint::new(0.5, 7.0), &cfg).tag, RegionTag::Outside);

        let mid = classify_region(PlanarPoint::new(3.0, 0.0), &cfg);
        assert_eq!(mid.tag, RegionTag::S3);
        assert_eq!(mid.stratum, Some(Stratum { r: 2.0, halfwidth: 2.0, t: 0.0 }));

        let low = classify_region(PlanarPoint::new(3.0, -1.6), &cfg);
        assert_eq!(low.tag, RegionTag::S1);
        assert_eq!(low.stratum.unwrap().t, -1.6);
    }

    #[test]
    fn band_ties_follow_half_open_convention() {
        let cfg = MapConfig::default();
        let at = |y| classify_region(PlanarPoint::new(6.0, y), &cfg).tag;
        // W = 5: lines at -5, -3, -1, 1, 3, 5
        assert_eq!(at(-5.0), RegionTag::Outside);
        assert_eq!(at(-3.0), RegionTag::S2);
        assert_eq!(at(-1.0), RegionTag::S3);
        assert_eq!(at(1.0), RegionTag::S3);
        assert_eq!(at(3.0), RegionTag::S4);
        assert_eq!(at(5.0), RegionTag::Outside);
        assert_eq!(at(4.999), RegionTag::S5);
        assert_eq!(classify_region(PlanarPoint::new(1.0, 0.0), &cfg).tag, RegionTag::Outside);
        assert_eq!(classify_region(PlanarPoint::new(-2.0, 0.0), &cfg).tag, RegionTag::Outside);
    }

    #[test]
    fn profile_examples() {
        let lit = MapConfig::literal();
        let reg = MapConfig::regularized();
        assert_eq!(lit.profile_eval(2.0).unwrap(), 0.5);
        assert!((reg.profile_eval(2.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(reg.profile_inverse(0.5).unwrap(), 1.0);
        assert_eq!(lit.profile_inverse(4.0).unwrap(), 0.25);
        assert!(reg.profile_eval(0.0).is_err());
        assert!(reg.profile_eval(-1.0).is_err());
        assert!(reg.profile_inverse(1.0).is_err());
        assert!(reg.profile_inverse(0.0).is_err());
        assert!(lit.profile_inverse(-0.1).is_err());
    }

    #[test]
    fn bad_slope_rejected() {
        assert!(MapConfig::new(0.0, Profile::Literal).is_err());
        assert!(MapConfig::new(f64::NAN, Profile::Literal).is_err());
        assert!(MapConfig::new(f64::INFINITY, Profile::Literal).is_err());
    }

    #[test]
    fn halfplane_examples() {
        let (a, q) = to_halfplane(SpatialPoint::new(0.0, 3.0, 2.0)).unwrap();
        assert!((a - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(q, PlanarPoint::new(3.0, 2.0));

        let (a, q) = to_halfplane(SpatialPoint::new(-1.0, 0.0, 0.0)).unwrap();
        assert!((a - PI).abs() < 1e-15);
        assert_eq!(q, PlanarPoint::new(1.0, 0.0));

        assert_eq!(to_halfplane(SpatialPoint::new(0.0, 0.0, 5.0)), Err(MapError::OnAxisInput));

        let p = from_halfplane(FRAC_PI_2, PlanarPoint::new(3.0, 2.0)).unwrap();
        assert!(p.dist(SpatialPoint::new(0.0, 3.0, 2.0)) < 1e-15);
        assert_eq!(from_halfplane(0.0, PlanarPoint::new(1.0, 0.0)).unwrap(), SpatialPoint::new(1.0, 0.0, 0.0));
        let p = from_halfplane(PI, PlanarPoint::new(2.0, -1.0)).unwrap();
        assert!(p.dist(SpatialPoint::new(-2.0, 0.0, -1.0)) < 1e-15);
        assert!(from_halfplane(0.0, PlanarPoint::new(-1.0, 0.0)).is_err());
    }

    #[test]
    fn negative_angles_are_normalized() {
        let (a, _) = to_halfplane(SpatialPoint::new(1.0, -1.0, 0.0)).unwrap();
        assert!((a - 7.0 * PI / 4.0).abs() < 1e-15);
        let (a, _) = to_halfplane(SpatialPoint::new(1.0, -0.0, 0.0)).unwrap();
        assert!((0.0..TAU).contains(&a));
    }

    #[test]
    fn boundary_distance_examples() {
        let cfg = MapConfig::default();
        assert_eq!(boundary_distance(PlanarPoint::APEX, &cfg), 0.0);
        assert!((boundary_distance(PlanarPoint::new(0.0, 0.0), &cfg) - 1.0).abs() < 1e-15);
        // on the cone boundary
        assert!(boundary_distance(PlanarPoint::new(3.0, 2.0), &cfg) < 1e-15);
        // x-axis point: nearest lines are y = +-(x-1)/5
        let d = boundary_distance(PlanarPoint::new(6.0, 0.0), &cfg);
        assert!((d - 1.0 / 1.04_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn singular_values_of_shear() {
        let m = Mat2([[1.0, 0.0], [4.0, 5.0]]);
        let (hi, lo) = m.singular_values();
        assert!((hi * lo - 5.0).abs() < 1e-12);
        assert!((hi * hi + lo * lo - 42.0).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            #[test]
            fn profile_strictly_decreasing(r1 in 1e-6..1e4_f64, dr in 1e-6..1e4_f64, lit in any::<bool>()) {
                let cfg = if lit { MapConfig::literal() } else { MapConfig::regularized() };
                let r2 = r1 + dr;
                prop_assert!(cfg.profile_eval(r1).unwrap() > cfg.profile_eval(r2).unwrap());
                prop_assert!(cfg.profile_eval(r2).unwrap() > 0.0);
            }

            #[test]
            fn profile_inverse_round_trip(r in 1e-2..1e6_f64, lit in any::<bool>()) {
                let cfg = if lit { MapConfig::literal() } else { MapConfig::regularized() };
                let back = cfg.profile_inverse(cfg.profile_eval(r).unwrap()).unwrap();
                prop_assert!((back - r).abs() <= 1e-12 * r);
            }

            #[test]
            fn band_membership_stable_under_small_perturbation(
                x in 1.01..50.0_f64, frac in -0.999..0.999_f64, slope in 0.1..5.0_f64,
            ) {
                let cfg = MapConfig::new(slope, Profile::Regularized).unwrap();
                let w = slope * (x - 1.0);
                let y = frac * w;
                let tag = classify_region(PlanarPoint::new(x, y), &cfg).tag;
                let gap = MapConfig::band_lines(w).iter().map(|l| (y - l).abs()).fold(f64::INFINITY, f64::min);
                let eps = gap * 0.49;
                for dy in [-eps, eps] {
                    prop_assert_eq!(classify_region(PlanarPoint::new(x, y + dy), &cfg).tag, tag);
                }
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(2000))]
            #[test]
            fn halfplane_round_trip(x in -1e3..1e3_f64, y in -1e3..1e3_f64, z in -1e3..1e3_f64) {
                prop_assume!(x.hypot(y) > 1e-9);
                let p = SpatialPoint::new(x, y, z);
                let (a, q) = to_halfplane(p).unwrap();
                prop_assert!((0.0..TAU).contains(&a));
                let back = from_halfplane(a, q).unwrap();
                prop_assert!(back.dist(p) <= 1e-12 * p.norm().max(1e-300));
            }
        }
    }
}
