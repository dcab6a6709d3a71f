use clap::Subcommand;
use serde::Serialize;
use serde_json::{json, Value};

use s1cover::probes::*;
use s1cover::*;

use crate::params::{MapSel, Numbers, Params, PlaneSel, PointList, PointSpec, RefSel};
use crate::report::{usage, CliError, Output, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Evaluate a map at --point.
    Eval,
    /// Value and jacobian at --point.
    Jet,
    /// Analytic preimages of --point.
    Preimage,
    /// Local index at --base (winding number on a probe circle).
    Index,
    /// Grid scan for index-2 points; with --radii, scans spheres instead.
    BranchScan,
    /// Sampled modulus of continuity at --base.
    Continuity,
    /// Fraction of a small target ball reached from a small source ball.
    Openness,
    /// Histogram of preimage counts over random targets.
    Histogram,
    /// Pointwise distortion at --point or on spheres of --radii.
    Distortion,
    /// Log-log fit of the distortion sup against the radius.
    Growth,
    /// Connected components of {|f| > threshold}.
    Poles,
    /// Analytic preimages against a brute-force lattice oracle.
    OracleCheck,
    /// Image polylines of the segments I_r, for plotting.
    FigureData,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Jet => "jet",
            Command::Preimage => "preimage",
            Command::Index => "index",
            Command::BranchScan => "branch-scan",
            Command::Continuity => "continuity",
            Command::Openness => "openness",
            Command::Histogram => "histogram",
            Command::Distortion => "distortion",
            Command::Growth => "growth",
            Command::Poles => "poles",
            Command::OracleCheck => "oracle-check",
            Command::FigureData => "figure-data",
        }
    }

    /// Commands that can write CSV.
    pub fn has_table(self) -> bool {
        matches!(
            self,
            Command::BranchScan | Command::Continuity | Command::Distortion | Command::Growth | Command::FigureData
        )
    }

    /// Runs the command. Defaults are written back into `p` so that the
    /// caller can echo the resolved parameters.
    pub fn run(self, p: &mut Params) -> Result<Output, CliError> {
        match self {
            Command::Eval => eval(p),
            Command::Jet => jet(p),
            Command::Preimage => preimage(p),
            Command::Index => index(p),
            Command::BranchScan => branch_scan(p),
            Command::Continuity => continuity(p),
            Command::Openness => openness(p),
            Command::Histogram => histogram(p),
            Command::Distortion => distortion(p),
            Command::Growth => growth(p),
            Command::Poles => poles(p),
            Command::OracleCheck => oracle_check(p),
            Command::FigureData => figure_data(p),
        }
    }
}

fn fill<T: Clone>(slot: &mut Option<T>, default: T) -> T {
    slot.get_or_insert(default).clone()
}

fn numbers(slot: &mut Option<Numbers>, default: &[f64]) -> Vec<f64> {
    fill(slot, Numbers(default.to_vec())).0
}

fn map_config(p: &Params) -> Result<MapConfig, CliError> {
    Ok(MapConfig::new(p.slope.unwrap_or(1.0), p.variant.unwrap_or_default())?)
}

/// Resolves `--map`, defaulting to the construction in dimension `dim`.
fn resolve_map(p: &mut Params, dim: usize) -> Result<MapHandle, CliError> {
    let default = if dim == 3 { MapSel::PaperF } else { MapSel::PaperFPlanar };
    resolve_map_or(p, default)
}

fn resolve_map_or(p: &mut Params, default: MapSel) -> Result<MapHandle, CliError> {
    let cfg = map_config(p)?;
    Ok(match fill(&mut p.map, default) {
        MapSel::PaperF => MapHandle::paper_f(cfg),
        MapSel::PaperFPlanar => MapHandle::paper_f_planar(cfg),
        MapSel::Winding2 => MapHandle::winding2(),
        MapSel::Winding3 => MapHandle::winding3(),
        MapSel::Inversion => MapHandle::inversion_origin(),
        MapSel::SphereInversion => {
            let center = fill(&mut p.center, PointSpec::At(vec![1.0, 0.0, 0.0])).spatial().map_err(usage)?;
            let radius = fill(&mut p.sphere_radius, 2f64.sqrt());
            MapHandle::sphere_inversion(center, radius)?
        }
        MapSel::Remark => MapHandle::remark(),
        MapSel::PuncturedBall => MapHandle::punctured_ball(cfg),
        MapSel::Identity2 => MapHandle::identity2(),
        MapSel::Identity3 => MapHandle::identity3(),
    })
}

/// Dimension suggested by a point when no map is given.
fn point_dim(spec: &PointSpec) -> usize {
    match spec {
        PointSpec::At(c) => c.len(),
        PointSpec::Apex => 2,
        PointSpec::Origin => 3,
    }
}

/// Dimension of the geometry: the map's when one is given, else the hint.
fn geometry_dim(p: &Params, hint: usize) -> Result<usize, CliError> {
    match p.map {
        Some(_) => Ok(resolve_map(&mut p.clone(), hint)?.dim()),
        None => Ok(hint),
    }
}

fn window(bounds: &[f64], dim: usize) -> Result<Window, CliError> {
    let w = Window::from_bounds(bounds)?;
    if w.dim() != dim {
        return Err(usage(format!("expected a {dim}-dimensional window, got {} bounds", bounds.len())));
    }
    Ok(w)
}

/// Points given on the command line fail with a usage error when they lie
/// outside the domain of the map.
fn at_point(e: MapError) -> CliError {
    CliError::Usage(e.to_string())
}

trait CliPoint: ProbePoint + Serialize {
    fn from_spec(spec: &PointSpec) -> Result<Self, CliError>;

    fn arr(self) -> Vec<f64> {
        self.coords()[..Self::DIM].to_vec()
    }
}

impl CliPoint for PlanarPoint {
    fn from_spec(spec: &PointSpec) -> Result<Self, CliError> {
        spec.planar().map_err(usage)
    }
}

impl CliPoint for SpatialPoint {
    fn from_spec(spec: &PointSpec) -> Result<Self, CliError> {
        spec.spatial().map_err(usage)
    }
}

/// Calls `$body` with `$P` bound to the point type of dimension `$dim`.
macro_rules! by_dim {
    ($dim:expr, $P:ident => $body:expr) => {
        if $dim == 2 {
            type $P = PlanarPoint;
            $body
        } else {
            type $P = SpatialPoint;
            $body
        }
    };
}

fn required_point(p: &Params, what: &str) -> Result<PointSpec, CliError> {
    p.point.clone().ok_or_else(|| usage(format!("{what} needs --point")))
}

// point-wise commands ---------------------------------------------------------

fn eval(p: &mut Params) -> Result<Output, CliError> {
    let spec = required_point(p, "eval")?;
    let map = resolve_map(p, point_dim(&spec))?;
    by_dim!(map.dim(), P => {
        let x = P::from_spec(&spec)?;
        let v = P::eval(&map, x).map_err(at_point)?;
        Output::json(&json!({"map": map.name(), "point": x.arr(), "value": v.arr()}))
    })
}

fn jet(p: &mut Params) -> Result<Output, CliError> {
    let spec = required_point(p, "jet")?;
    let map = resolve_map(p, point_dim(&spec))?;
    let payload = match map.kind {
        MapKind::PaperFPlanar => {
            let x = PlanarPoint::from_spec(&spec)?;
            let j = jet_planar(x, &map.config).map_err(at_point)?;
            json!({"map": map.name(), "point": x.arr(), "value": j.value.arr(), "jacobian": j.jacobian,
                   "det": j.jacobian.det(), "smooth": j.smooth})
        }
        MapKind::PaperF => {
            let x = SpatialPoint::from_spec(&spec)?;
            let j = jet_spatial(x, &map.config).map_err(at_point)?;
            json!({"map": map.name(), "point": x.arr(), "value": j.value.arr(), "jacobian": j.jacobian,
                   "det": j.jacobian.det(), "planar_part": j.planar_part, "angular_factor": j.angular_factor,
                   "smooth": j.smooth})
        }
        MapKind::Identity2 => {
            let x = PlanarPoint::from_spec(&spec)?;
            json!({"map": map.name(), "point": x.arr(), "value": x.arr(), "jacobian": Mat2::IDENTITY, "det": 1.0, "smooth": true})
        }
        MapKind::Identity3 => {
            let x = SpatialPoint::from_spec(&spec)?;
            json!({"map": map.name(), "point": x.arr(), "value": x.arr(), "jacobian": Mat3::IDENTITY, "det": 1.0, "smooth": true})
        }
        _ => return Err(ProbeError::NoJacobian(map.name()).into()),
    };
    Ok(Output::json(&payload)?)
}

fn preimage(p: &mut Params) -> Result<Output, CliError> {
    let spec = required_point(p, "preimage")?;
    let map = resolve_map(p, point_dim(&spec))?;
    by_dim!(map.dim(), P => {
        let q = P::from_spec(&spec)?;
        let set = P::preimages(&map, q)?;
        let points: Vec<Vec<f64>> = set.points.iter().map(|x| x.arr()).collect();
        Output::json(&json!({"map": map.name(), "target": q.arr(), "count": set.len(), "points": points,
                             "provenance": set.provenance, "complete": set.complete}))
    })
}

fn default_plane(map: &MapHandle) -> PlaneSel {
    match map.kind {
        MapKind::RemarkMap => PlaneSel::XzRadial,
        MapKind::Winding3 => PlaneSel::Horizontal,
        _ => PlaneSel::Meridian,
    }
}

fn probe_plane(p: &mut Params, map: &MapHandle) -> ProbePlane {
    match fill(&mut p.plane, default_plane(map)) {
        PlaneSel::Meridian => ProbePlane::Meridian,
        PlaneSel::Horizontal => ProbePlane::Horizontal,
        PlaneSel::XzRadial => ProbePlane::XzRadial,
    }
}

fn index(p: &mut Params) -> Result<Output, CliError> {
    let base = fill(&mut p.base, PointSpec::Apex);
    let map = resolve_map(p, point_dim(&base))?;
    let radius = fill(&mut p.radius, 1e-3);
    let n0 = fill(&mut p.n0, DEFAULT_N0);
    let (payload, winding) = if map.dim() == 2 {
        let rep = local_index_planar(&map, PlanarPoint::from_spec(&base)?, radius, n0)?;
        (serde_json::to_value(&rep), rep.winding)
    } else {
        let plane = probe_plane(p, &map);
        let rep = local_index_spatial(&map, SpatialPoint::from_spec(&base)?, &plane, radius, n0)?;
        (serde_json::to_value(&rep), rep.winding)
    };
    let payload = payload.map_err(|e| CliError::Probe(e.to_string()))?;
    Ok(Output::json(&payload)?.verdict(p.assert_index.map(|t| Verdict::equals("index", winding as f64, t as f64))))
}

// scans -----------------------------------------------------------------------

fn default_reference(map: &MapHandle) -> RefSel {
    match map.kind {
        MapKind::PaperFPlanar => RefSel::Apex,
        MapKind::PaperF | MapKind::Composition { .. } => RefSel::UnitCircle,
        MapKind::RemarkMap => RefSel::UnitCircleXz,
        MapKind::Winding3 => RefSel::ZAxis,
        MapKind::Winding2 => RefSel::Origin,
        _ => RefSel::None,
    }
}

fn reference_set(sel: RefSel) -> Option<ReferenceSet> {
    match sel {
        RefSel::Apex => Some(ReferenceSet::Points { points: vec![[1.0, 0.0, 0.0]] }),
        RefSel::Origin => Some(ReferenceSet::Points { points: vec![[0.0; 3]] }),
        RefSel::UnitCircle => Some(ReferenceSet::CircleXy { radius: 1.0 }),
        RefSel::UnitCircleXz => Some(ReferenceSet::CircleXz { radius: 1.0 }),
        RefSel::ZAxis => Some(ReferenceSet::ZAxis),
        RefSel::None => None,
    }
}

/// Number of reference points checked for coverage.
const COVERAGE_SAMPLES: usize = 360;

fn branch_scan(p: &mut Params) -> Result<Output, CliError> {
    let hint = p.window.as_ref().map_or(2, |w| w.0.len() / 2);
    let dim = geometry_dim(p, if p.radii.is_some() { 3 } else { hint })?;
    let map = resolve_map(p, dim)?;
    if p.radii.is_some() {
        return shell(p, &map);
    }
    let (bounds, step, radius): (&[f64], f64, f64) =
        if dim == 2 { (&[0.5, 1.5, -0.5, 0.5], 1e-3, 1e-4) } else { (&[-1.5, 1.5, -1.5, 1.5, -1.5, 1.5], 2e-2, 3e-2) };
    let w = window(&numbers(&mut p.window, bounds), dim)?;
    let step = fill(&mut p.step, step);
    let radius = fill(&mut p.radius, radius);
    let reference = reference_set(fill(&mut p.reference, default_reference(&map)));

    let summary = if dim == 2 {
        summarize(branch_scan_planar(&map, &w, step, radius, reference.as_ref())?, &reference, p)?
    } else {
        let plane = probe_plane(p, &map);
        summarize(branch_scan_spatial(&map, &w, step, radius, &plane, reference.as_ref())?, &reference, p)?
    };
    let ScanSummary { mut payload, tube, coverage, table } = summary;
    if let (Some(c), Value::Object(m)) = (coverage, &mut payload) {
        m.insert("coverage_radius".into(), json!(c));
    }
    let distance = match (p.assert_max_distance, &tube) {
        (Some(t), Some(tube)) => Some(Verdict::at_most("max_distance", tube.max_distance, t)),
        (Some(_), None) => return Err(usage("--assert-max-distance needs a --reference")),
        _ => None,
    };
    let header = if dim == 2 { vec!["x", "y"] } else { vec!["x", "y", "z"] };
    Ok(Output::json(&payload)?
        .with_table(header, table)
        .verdict(distance)
        .verdict(p.assert_coverage_max.zip(coverage).map(|(t, c)| Verdict::at_most("coverage_radius", c, t))))
}

struct ScanSummary {
    payload: Value,
    tube: Option<TubeStats>,
    coverage: Option<f64>,
    table: Vec<Vec<f64>>,
}

fn summarize<P: CliPoint>(
    rep: BranchScanReport<P>,
    reference: &Option<ReferenceSet>,
    p: &Params,
) -> Result<ScanSummary, CliError> {
    let samples = reference.as_ref().map(|r| r.circle_samples(COVERAGE_SAMPLES)).unwrap_or_default();
    let coverage = if samples.is_empty() {
        if p.assert_coverage_max.is_some() {
            return Err(usage("--assert-coverage-max needs a circle or point --reference"));
        }
        None
    } else {
        Some(rep.coverage_radius(&samples))
    };
    Ok(ScanSummary {
        table: rep.hits.iter().map(|h| h.arr()).collect(),
        tube: rep.tube.clone(),
        coverage,
        payload: serde_json::to_value(&rep).map_err(|e| CliError::Probe(e.to_string()))?,
    })
}

fn shell(p: &mut Params, map: &MapHandle) -> Result<Output, CliError> {
    if map.dim() != 3 {
        return Err(usage("a shell scan (--radii) needs a spatial map"));
    }
    let radii = p.radii.clone().expect("checked by caller").0;
    let n = fill(&mut p.samples, 8);
    let radius = fill(&mut p.radius, 3e-2);
    let plane = probe_plane(p, map);
    let rep = shell_scan(map, &radii, n, n, radius, &plane)?;
    let table = rep
        .shells
        .iter()
        .flat_map(|s| s.hits.iter().map(move |h| vec![s.radius, h.x, h.y, h.z]))
        .collect();
    Ok(Output::json(&json!({"map": map.name(), "every_shell_hit": rep.every_shell_hit(), "scan": rep}))?
        .with_table(vec!["shell", "x", "y", "z"], table))
}

fn continuity(p: &mut Params) -> Result<Output, CliError> {
    let base = fill(&mut p.base, PointSpec::Apex);
    let map = resolve_map(p, point_dim(&base))?;
    let deltas = numbers(&mut p.deltas, &[1e-1, 1e-2, 1e-3, 1e-4]);
    let samples = fill(&mut p.samples, 400);
    let (base_arr, moduli) = by_dim!(map.dim(), P => {
        let b = P::from_spec(&base)?;
        (b.arr(), continuity_modulus(&map, b, &deltas, samples)?)
    });
    let worst = moduli.iter().map(|m| m.modulus / m.delta).fold(0.0, f64::max);
    let table = moduli.iter().map(|m| vec![m.delta, m.modulus, m.samples as f64]).collect();
    Ok(Output::json(&json!({"map": map.name(), "base": base_arr, "moduli": moduli, "max_ratio": worst}))?
        .with_table(vec!["delta", "modulus", "samples"], table)
        .verdict(p.assert_modulus_ratio_max.map(|t| Verdict::at_most("modulus_ratio", worst, t))))
}

fn openness(p: &mut Params) -> Result<Output, CliError> {
    let base = fill(&mut p.base, PointSpec::Apex);
    let map = resolve_map(p, point_dim(&base))?;
    let delta = fill(&mut p.delta, 1e-2);
    let epsilon = fill(&mut p.epsilon, 1e-5);
    let m = fill(&mut p.m, 500);
    let seed = p.seed.unwrap_or(0);
    let (payload, fraction) = by_dim!(map.dim(), P => {
        let rep = openness_probe(&map, P::from_spec(&base)?, delta, epsilon, m, seed)?;
        (serde_json::to_value(&rep), rep.fraction)
    });
    let payload = payload.map_err(|e| CliError::Probe(e.to_string()))?;
    Ok(Output::json(&payload)?.verdict(p.assert_fraction_min.map(|t| Verdict::at_least("fraction", fraction, t))))
}

fn histogram(p: &mut Params) -> Result<Output, CliError> {
    let hint = p.window.as_ref().map_or(2, |w| w.0.len() / 2);
    let dim = geometry_dim(p, hint)?;
    let map = resolve_map(p, dim)?;
    let bounds: &[f64] = if dim == 2 { &[0.05, 8.0, -6.0, 6.0] } else { &[-3.0, 3.0, -3.0, 3.0, -3.0, 3.0] };
    let w = window(&numbers(&mut p.window, bounds), dim)?;
    let m = fill(&mut p.m, 10_000);
    let seed = p.seed.unwrap_or(0);
    let hist = by_dim!(dim, P => preimage_histogram::<P>(&map, &w, m, seed)?);
    let two = hist.fraction(2);
    Ok(Output::json(&json!({"map": map.name(), "histogram": hist, "fraction_two": two}))?
        .verdict(p.assert_fraction_min.map(|t| Verdict::at_least("fraction_two", two, t))))
}

// distortion ------------------------------------------------------------------

const GROWTH_RADII: [f64; 8] = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0];

fn distortion(p: &mut Params) -> Result<Output, CliError> {
    let map = resolve_map_or(p, MapSel::PaperF)?;
    if map.dim() != 3 {
        return Err(usage("distortion needs a spatial map"));
    }
    let samples = if let Some(spec) = p.point.clone() {
        let x = SpatialPoint::from_spec(&spec)?;
        let s = distortion_sample(&map, x, 0.0)
            .ok_or_else(|| usage(format!("{x} is not a smooth point of {}", map.name())))?
            .map_err(|e| match e {
                ProbeError::Map(m) => at_point(m),
                other => other.into(),
            })?;
        vec![s]
    } else {
        let radii = numbers(&mut p.radii, &GROWTH_RADII[..4]);
        let n = fill(&mut p.samples, 200);
        let margin = fill(&mut p.margin, 1e-6);
        let seed = p.seed.unwrap_or(0);
        let mut all = Vec::new();
        for (k, &r) in radii.iter().enumerate() {
            if !(r > 0.0 && r.is_finite()) {
                return Err(usage(format!("radii must be positive, got {r}")));
            }
            all.extend(sphere_distortion(&map, r, n, margin, shell_seed(seed, k))?);
        }
        all
    };
    let table = samples
        .iter()
        .map(|s| vec![s.point.x, s.point.y, s.point.z, s.op_norm, s.jac_det, s.outer_ratio, s.paper_ratio])
        .collect();
    Ok(Output::json(&json!({"map": map.name(), "samples": samples}))?
        .with_table(vec!["X", "Y", "Z", "op_norm", "jac_det", "outer_ratio", "paper_ratio"], table))
}

fn growth(p: &mut Params) -> Result<Output, CliError> {
    let map = resolve_map_or(p, MapSel::PaperF)?;
    let radii = numbers(&mut p.radii, &GROWTH_RADII);
    let n = fill(&mut p.samples, 2000);
    let margin = fill(&mut p.margin, 1e-6);
    let fit = growth_fit(&map, &radii, n, margin, p.seed.unwrap_or(0))?;
    let slopes = [("slope_paper", fit.slope_paper), ("slope_outer", fit.slope_outer)];
    let table = (0..fit.radii.len())
        .map(|k| vec![fit.radii[k], fit.sup_outer[k], fit.sup_paper[k], fit.kept[k] as f64])
        .collect();
    let mut out = Output::json(&json!({"map": map.name(), "fit": fit}))?
        .with_table(vec!["radius", "sup_outer", "sup_paper", "kept"], table);
    for (name, v) in slopes {
        out = out
            .verdict(p.assert_slope_min.map(|t| Verdict::at_least(name, v, t)))
            .verdict(p.assert_slope_max.map(|t| Verdict::at_most(name, v, t)));
    }
    Ok(out)
}

// poles -----------------------------------------------------------------------

fn poles(p: &mut Params) -> Result<Output, CliError> {
    let hint = p.window.as_ref().map_or(3, |w| w.0.len() / 2);
    let dim = geometry_dim(p, hint)?;
    let map = resolve_map_or(p, if dim == 2 { MapSel::PaperFPlanar } else { MapSel::Remark })?;
    let bounds: &[f64] = if dim == 2 { &[-0.5, 0.5, -0.5, 0.5] } else { &[-0.5, 0.5, -0.5, 0.5, -0.5, 0.5] };
    let w = window(&numbers(&mut p.window, bounds), dim)?;
    let threshold = fill(&mut p.threshold, 100.0);
    let step = fill(&mut p.step, 0.01);
    let declared = fill(&mut p.poles, PointList(vec![PointSpec::Origin])).0;
    let thresholds = p.thresholds.clone().map(|t| t.0);
    let (rep, separation) = by_dim!(dim, P => {
        let pts = declared.iter().map(P::from_spec).collect::<Result<Vec<P>, _>>()?;
        let rep = pole_components(&map, threshold, &w, step, &pts)?;
        let sep = match &thresholds {
            Some(t) => Some(separation_threshold(&map, t, &w, step, &pts)?),
            None => None,
        };
        (rep, sep)
    });
    let count = rep.components.len();
    let mut payload = json!({"map": map.name(), "components": rep, "count": count});
    if let Some(sep) = separation {
        payload["separation_threshold"] = json!(sep);
    }
    Ok(Output::json(&payload)?.verdict(p.assert_components.map(|t| Verdict::equals("components", count as f64, t as f64))))
}

// oracle ----------------------------------------------------------------------

#[derive(Serialize)]
struct Comparison<P> {
    target: P,
    solver: Vec<P>,
    oracle: Vec<P>,
    /// Largest distance from an analytic preimage to the nearest oracle point.
    worst_distance: f64,
}

fn compare<P: ProbePoint>(target: P, solver: Vec<P>, oracle: Vec<P>) -> Comparison<P> {
    let worst_distance = solver
        .iter()
        .map(|s| oracle.iter().map(|o| o.distance(*s)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    Comparison { target, solver, oracle, worst_distance }
}

fn oracle_check(p: &mut Params) -> Result<Output, CliError> {
    let hint = p.window.as_ref().map_or(2, |w| w.0.len() / 2);
    let dim = geometry_dim(p, hint)?;
    let map = resolve_map(p, dim)?;
    let seed = p.seed.unwrap_or(0);
    let (comparisons, step) = if dim == 2 {
        let targets = window(&numbers(&mut p.window, &[0.05, 8.0, -6.0, 6.0]), 2)?;
        let lattice = window(&numbers(&mut p.oracle_window, &[0.01, 21.0, -7.5, 7.5]), 2)?;
        let step = fill(&mut p.step, 1e-2);
        let tol = fill(&mut p.tol, 0.0);
        let factor = fill(&mut p.refine, 16);
        let m = fill(&mut p.m, 200);
        let oracle = PlanarOracle::new(&map, &lattice, step)?;
        let mut out = Vec::with_capacity(m);
        for i in 0..m as u64 {
            let c = sampling::uniform_in_box(&targets.lo, &targets.hi, seed, i);
            let q = PlanarPoint::new(c[0], c[1]);
            let solver = map.preimages2(q)?.points;
            let found = oracle.preimages_refined(q, tol, factor).clusters.iter().map(|c| c.representative).collect();
            out.push(serde_json::to_value(compare(q, solver, found)));
        }
        (out, step)
    } else {
        let targets = window(&numbers(&mut p.window, &[-2.0, 2.0, -2.0, 2.0, -2.0, 2.0]), 3)?;
        let lattice = window(&numbers(&mut p.oracle_window, &[-3.5, 3.5, -3.5, 3.5, -3.5, 3.5]), 3)?;
        let step = fill(&mut p.step, 5e-2);
        let tol = fill(&mut p.tol, 5e-2);
        let m = fill(&mut p.m, 10);
        let mut out = Vec::with_capacity(m);
        for i in 0..m as u64 {
            let c = sampling::uniform_in_box(&targets.lo, &targets.hi, seed, i);
            let q = SpatialPoint::new(c[0], c[1], c[2]);
            let solver = map.preimages3(q)?.points;
            let found = brute_preimage_oracle_spatial(&map, q, &lattice, step, tol)?
                .clusters
                .iter()
                .map(|c| c.representative)
                .collect();
            out.push(serde_json::to_value(compare(q, solver, found)));
        }
        (out, step)
    };
    let comparisons: Vec<Value> =
        comparisons.into_iter().collect::<Result<_, _>>().map_err(|e| CliError::Probe(e.to_string()))?;
    let len = |v: &Value, k: &str| v[k].as_array().map_or(0, Vec::len);
    let matched = comparisons.iter().filter(|c| len(c, "solver") == len(c, "oracle")).count();
    let worst = comparisons.iter().filter_map(|c| c["worst_distance"].as_f64()).fold(0.0, f64::max);
    let fraction = if comparisons.is_empty() { 1.0 } else { matched as f64 / comparisons.len() as f64 };
    Ok(Output::json(&json!({
        "map": map.name(),
        "targets": comparisons.len(),
        "count_matches": matched,
        "match_fraction": fraction,
        "worst_distance": worst,
        "step": step,
        "comparisons": comparisons,
    }))?
    .verdict(p.assert_fraction_min.map(|t| Verdict::at_least("match_fraction", fraction, t)))
    .verdict(p.assert_max_distance.map(|t| Verdict::at_most("worst_distance", worst, t))))
}

// figure ----------------------------------------------------------------------

fn figure_data(p: &mut Params) -> Result<Output, CliError> {
    let map = resolve_map_or(p, MapSel::PaperFPlanar)?;
    if !matches!(map.kind, MapKind::PaperF | MapKind::PaperFPlanar) {
        return Err(usage("figure-data draws the strata of paperF or paperF-planar"));
    }
    let radii = numbers(&mut p.radii, &[0.5, 1.0, 2.0, 3.0]);
    let n = fill(&mut p.samples, 32);
    let mut table = Vec::new();
    let mut polylines = Vec::new();
    for &r in &radii {
        let path = stratum_image_path(r, n, &map.config).map_err(at_point)?;
        for (k, seg) in path.iter().enumerate() {
            table.extend(seg.iter().map(|q| vec![r, k as f64, q.x, q.y]));
        }
        let segments: Vec<Vec<[f64; 2]>> = path.iter().map(|s| s.iter().map(|q| [q.x, q.y]).collect()).collect();
        polylines.push(json!({"r": r, "segments": segments}));
    }
    Ok(Output::json(&json!({"map": map.name(), "samples_per_segment": n, "polylines": polylines}))?
        .with_table(vec!["r", "segment_index", "x", "y"], table))
}
