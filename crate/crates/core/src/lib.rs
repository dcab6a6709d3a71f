//! A branched cover `F: R^3 -> R^3` whose branch set is the unit circle of the
//! XY-plane, the auxiliary maps around it, and a suite of numerical probes
//! (local index, continuity, openness, branch scans, preimage histograms,
//! distortion growth, pole components).
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: points, the cone stratification, the profile function.
//! - [`planar`]: the map on one half-plane, its jacobian and its preimages.
//! - [`spatial`]: the rotated assembly on R^3 and its distortion.
//! - [`reference`]: winding maps, inversions, composition, [`MapHandle`].
//! - [`probes`]: the measurement suite.

pub mod error;
pub mod geometry;
pub mod planar;
pub mod probes;
pub mod reference;
pub mod spatial;

pub use error::{MapError, ProbeError};
pub use geometry::{
    boundary_distance, classify_region, from_halfplane, to_halfplane, MapConfig, Mat2, Mat3,
    PlanarPoint, Profile, Region, RegionTag, SpatialPoint, Stratum,
};
pub use planar::{eval_planar, jet_planar, preimage_planar, stratum_image_path, Jet2, PreimageSet};
pub use reference::{
    compose, inversion, remark_map, sphere_inversion, winding_planar, winding_spatial, MapHandle,
    MapKind,
};
pub use spatial::{distortion_at, eval_spatial, jet_spatial, preimage_spatial, DistortionSample, Jet3};
