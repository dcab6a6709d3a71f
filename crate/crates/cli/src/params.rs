//! Flags and config-file keys. Every key of the JSON config file has the name
//! of the flag it stands for; flags win over the file.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use s1cover::{PlanarPoint, Profile, SpatialPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum MapSel {
    /// The branched cover of R^3.
    #[value(name = "paperF")]
    #[serde(rename = "paperF")]
    PaperF,
    /// Its restriction to one half-plane.
    #[value(name = "paperF-planar")]
    #[serde(rename = "paperF-planar")]
    PaperFPlanar,
    #[value(name = "winding2")]
    #[serde(rename = "winding2")]
    Winding2,
    #[value(name = "winding3")]
    #[serde(rename = "winding3")]
    Winding3,
    /// x / |x|^2.
    #[value(name = "inversion")]
    #[serde(rename = "inversion")]
    Inversion,
    /// Inversion in the sphere given by --center and --sphere-radius.
    #[value(name = "sphere-inversion")]
    #[serde(rename = "sphere-inversion")]
    SphereInversion,
    /// The inverted winding map with a pole at the origin.
    #[value(name = "remark")]
    #[serde(rename = "remark")]
    Remark,
    /// paperF composed with the inversion, on the punctured unit ball.
    #[value(name = "punctured-ball")]
    #[serde(rename = "punctured-ball")]
    PuncturedBall,
    #[value(name = "identity2")]
    #[serde(rename = "identity2")]
    Identity2,
    #[value(name = "identity3")]
    #[serde(rename = "identity3")]
    Identity3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Plane of the probe circle for spatial index computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlaneSel {
    /// Through the base and the z-axis.
    Meridian,
    /// Parallel to the XY-plane.
    Horizontal,
    /// Spanned by the XZ-projection of the base and the y-axis; transverse to
    /// circles in the XZ-plane.
    XzRadial,
}

/// Reference set for the distance statistics of a branch scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefSel {
    /// The point (1, 0) (planar) or (1, 0, 0).
    Apex,
    /// The point (0, 0) or (0, 0, 0).
    Origin,
    UnitCircle,
    UnitCircleXz,
    ZAxis,
    None,
}

/// A point given as comma-separated coordinates or by name.
#[derive(Debug, Clone, PartialEq)]
pub enum PointSpec {
    /// `(1, 0)` in the plane, `(1, 0, 0)` in space.
    Apex,
    Origin,
    At(Vec<f64>),
}

impl PointSpec {
    pub fn planar(&self) -> Result<PlanarPoint, String> {
        match self {
            PointSpec::Apex => Ok(PlanarPoint::APEX),
            PointSpec::Origin => Ok(PlanarPoint::new(0.0, 0.0)),
            PointSpec::At(c) if c.len() == 2 => Ok(PlanarPoint::new(c[0], c[1])),
            PointSpec::At(c) => Err(format!("expected a planar point, got {} coordinates", c.len())),
        }
    }

    pub fn spatial(&self) -> Result<SpatialPoint, String> {
        match self {
            PointSpec::Apex => Ok(SpatialPoint::new(1.0, 0.0, 0.0)),
            PointSpec::Origin => Ok(SpatialPoint::ORIGIN),
            PointSpec::At(c) if c.len() == 3 => Ok(SpatialPoint::new(c[0], c[1], c[2])),
            PointSpec::At(c) => Err(format!("expected a spatial point, got {} coordinates", c.len())),
        }
    }
}

fn parse_numbers(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>().map_err(|_| format!("`{t}` is not a number"))
        })
        .collect()
}

impl FromStr for PointSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "apex" => Ok(PointSpec::Apex),
            "origin" => Ok(PointSpec::Origin),
            other => {
                let c = parse_numbers(other)?;
                if c.len() == 2 || c.len() == 3 {
                    Ok(PointSpec::At(c))
                } else {
                    Err(format!("a point needs 2 or 3 coordinates, got {}", c.len()))
                }
            }
        }
    }
}

impl fmt::Display for PointSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointSpec::Apex => f.write_str("apex"),
            PointSpec::Origin => f.write_str("origin"),
            PointSpec::At(c) => {
                let parts: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl Serialize for PointSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            PointSpec::At(c) => c.serialize(s),
            named => s.serialize_str(&named.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for PointSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) => s.parse().map_err(D::Error::custom),
            v => {
                let c: Vec<f64> = serde_json::from_value(v).map_err(D::Error::custom)?;
                PointSpec::from_str(&PointSpec::At(c).to_string()).map_err(D::Error::custom)
            }
        }
    }
}

/// Comma-separated numbers on the command line, a JSON array in the file.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Numbers(pub Vec<f64>);

impl FromStr for Numbers {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_numbers(s).map(Numbers)
    }
}

impl<'de> Deserialize<'de> for Numbers {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) => s.parse().map_err(D::Error::custom),
            v => serde_json::from_value(v).map(Numbers).map_err(D::Error::custom),
        }
    }
}

/// Points separated by `;`, or a JSON array of points.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PointList(pub Vec<PointSpec>);

impl FromStr for PointList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.split(';').filter(|t| !t.trim().is_empty()).map(str::parse).collect::<Result<_, _>>().map(PointList)
    }
}

impl<'de> Deserialize<'de> for PointList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) => s.parse().map_err(D::Error::custom),
            v => serde_json::from_value(v).map(PointList).map_err(D::Error::custom),
        }
    }
}

/// All parameters of all commands. Each command reads the ones it needs and
/// fills in its own defaults before running; the filled-in set is echoed in
/// the report.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Params {
    /// JSON file of parameters, keyed by flag name. Flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Map to probe (default depends on the command and the given geometry).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSel>,
    /// Profile of the construction: regularized or literal.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<Profile>,
    /// Slope c of the cone.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    /// Center of the sphere for sphere-inversion.
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<PointSpec>,
    /// Radius of the sphere for sphere-inversion.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sphere_radius: Option<f64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Worker threads. Results do not depend on it, so it is not echoed.
    #[arg(long, global = true)]
    #[serde(skip_serializing)]
    pub workers: Option<usize>,
    /// Stamp the report with the current time (off by default so reports
    /// stay byte-identical across runs).
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<bool>,

    /// Point to evaluate or invert: `x,y`, `x,y,z`, `apex` or `origin`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<PointSpec>,
    /// Base point of index, continuity and openness probes.
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<PointSpec>,
    /// Probe circle radius.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Initial samples on a probe circle.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n0: Option<usize>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plane: Option<PlaneSel>,
    /// Box as interleaved bounds `lo1,hi1,lo2,hi2[,lo3,hi3]`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Numbers>,
    /// Grid step.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<RefSel>,
    /// Ball radii of the continuity probe.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Numbers>,
    /// Samples per ball, sphere or segment.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Source ball radius of the openness probe.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Target ball radius of the openness probe.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Number of random targets.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    /// Sphere radii (growth, distortion, shell scans) or stratum radii (figure-data).
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<Numbers>,
    /// Relative distance to the non-smooth set below which samples are skipped.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    /// Norm threshold R of the pole-component scan.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Ladder of thresholds; reports the smallest one separating the poles.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Numbers>,
    /// Declared poles, separated by `;`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub poles: Option<PointList>,
    /// Oracle image tolerance.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Local refinement factor of the planar oracle.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refine: Option<usize>,
    /// Lattice of the oracle (interleaved bounds).
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_window: Option<Numbers>,

    /// Fail (exit 2) unless the measured index equals this.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assert_index: Option<i64>,
    /// Fail unless every fitted growth slope is at least this.
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assert_slope_min: Option<f64>,
    /// Fail unless every fitted growth slope is at most this.
    #[arg(long, global = true, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assert_slope_max: Option<f64>,
    /// Fail unless the reported fraction (histogram: count 2; openness) is at least this.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assert_fraction_min: Option<f64>,
    /// Fail unless every branch hit lies this close to the reference set.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assert_max_distance: Option<f64>,
    /// Fail unless every reference sample has a hit this close.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assert_coverage_max: Option<f64>,
    /// Fail unless every continuity modulus is at most this multiple of its delta.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assert_modulus_ratio_max: Option<f64>,
    /// Fail unless the pole scan finds exactly this many components.
    #[arg(long, global = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assert_components: Option<usize>,
}

impl Params {
    /// Overlays `self` (flags) on `file`: keys set on the command line win.
    pub fn over(self, file: Value) -> Result<Params, String> {
        let Value::Object(mut merged) = file else {
            return Err("the config file must hold a JSON object".into());
        };
        let workers = self.workers;
        let Value::Object(flags) = serde_json::to_value(&self).map_err(|e| e.to_string())? else {
            unreachable!("params serialize to an object")
        };
        merged.extend(flags);
        let mut out: Params = serde_json::from_value(Value::Object(merged)).map_err(|e| format!("config: {e}"))?;
        out.workers = workers.or(out.workers);
        out.config = self.config;
        Ok(out)
    }
}
