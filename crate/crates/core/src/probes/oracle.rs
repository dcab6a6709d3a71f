//! Brute-force preimage oracle, independent of the analytic solvers.
//!
//! Both oracles triangulate a lattice (two triangles per square, six
//! tetrahedra per cube), map the vertices, and report every simplex whose
//! image contains the target up to `tol`. Hit simplices are clustered by
//! lattice adjacency and each cluster is located by piecewise-linear
//! back-interpolation.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ProbePoint, Window};
use crate::error::ProbeError;
use crate::geometry::{PlanarPoint, SpatialPoint};
use crate::reference::MapHandle;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCluster<P> {
    pub representative: P,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport<P> {
    pub target: P,
    pub step: f64,
    pub clusters: Vec<OracleCluster<P>>,
}

impl<P> OracleReport<P> {
    pub fn count(&self) -> usize {
        self.clusters.len()
    }
}

/// Lattice of mapped vertices, reusable across many targets.
pub struct PlanarOracle {
    map: MapHandle,
    lo: [f64; 2],
    hi: [f64; 2],
    step: f64,
    nx: usize,
    ny: usize,
    /// Vertex images; NaN where the map is undefined or not finite.
    images: Vec<PlanarPoint>,
    index: SquareIndex,
}

/// Buckets of lattice squares keyed by the cells of a uniform grid over the
/// image plane that their image boxes overlap.
struct SquareIndex {
    lo: [f64; 2],
    cell: [f64; 2],
    n: [usize; 2],
    /// CSR layout: squares of bucket `b` are `squares[start[b]..start[b + 1]]`.
    start: Vec<usize>,
    squares: Vec<u32>,
    /// Squares whose image box spans too many buckets; always tested.
    wide: Vec<u32>,
}

/// Image boxes wider than this many buckets go to the always-tested list.
const WIDE_BUCKETS: usize = 256;

impl SquareIndex {
    /// `box_of(s)` is the image box `[x0, y0, x1, y1]` of square `s`, and
    /// `[lo, hi]` contains all of them.
    fn build(squares: usize, lo: [f64; 2], hi: [f64; 2], box_of: impl Fn(usize) -> Option<[f64; 4]>) -> Self {
        // about sixteen squares per bucket on average
        let side = (((squares as f64) / 16.0).sqrt().ceil() as usize).clamp(1, 4096);
        let n = [side, side];
        let cell = [((hi[0] - lo[0]) / side as f64).max(f64::MIN_POSITIVE), ((hi[1] - lo[1]) / side as f64).max(f64::MIN_POSITIVE)];
        let mut index = Self { lo, cell, n, start: vec![0; side * side + 1], squares: Vec::new(), wide: Vec::new() };
        if !(lo[0] <= hi[0] && lo[1] <= hi[1]) {
            return index;
        }
        let narrow = |r: &[usize; 4]| (r[2] - r[0] + 1) * (r[3] - r[1] + 1) <= WIDE_BUCKETS;
        for s in 0..squares {
            let Some(r) = box_of(s).map(|b| index.range(b)) else { continue };
            if !narrow(&r) {
                index.wide.push(s as u32);
                continue;
            }
            for i in r[0]..=r[2] {
                for j in r[1]..=r[3] {
                    index.start[i * side + j + 1] += 1;
                }
            }
        }
        for b in 0..side * side {
            index.start[b + 1] += index.start[b];
        }
        let mut fill = index.start.clone();
        index.squares = vec![0; index.start[side * side]];
        for s in 0..squares {
            let Some(r) = box_of(s).map(|b| index.range(b)) else { continue };
            if !narrow(&r) {
                continue;
            }
            for i in r[0]..=r[2] {
                for j in r[1]..=r[3] {
                    let b = i * side + j;
                    index.squares[fill[b]] = s as u32;
                    fill[b] += 1;
                }
            }
        }
        index
    }

    fn bucket(&self, v: f64, axis: usize) -> usize {
        (((v - self.lo[axis]) / self.cell[axis]).floor().max(0.0) as usize).min(self.n[axis] - 1)
    }

    /// Bucket range `[i0, j0, i1, j1]` of a box `[x0, y0, x1, y1]`.
    fn range(&self, b: [f64; 4]) -> [usize; 4] {
        [self.bucket(b[0], 0), self.bucket(b[1], 1), self.bucket(b[2], 0), self.bucket(b[3], 1)]
    }

    /// Squares whose image box may meet the box of radius `tol` about `t`,
    /// in increasing order.
    fn candidates(&self, t: PlanarPoint, tol: f64) -> Vec<u32> {
        let mut out = self.wide.clone();
        let q = [t.x - tol, t.y - tol, t.x + tol, t.y + tol];
        let hi = [self.lo[0] + self.cell[0] * self.n[0] as f64, self.lo[1] + self.cell[1] * self.n[1] as f64];
        if !self.squares.is_empty() && q[2] >= self.lo[0] && q[3] >= self.lo[1] && q[0] <= hi[0] && q[1] <= hi[1] {
            let [i0, j0, i1, j1] = self.range(q);
            for i in i0..=i1 {
                for j in j0..=j1 {
                    let b = i * self.n[1] + j;
                    out.extend_from_slice(&self.squares[self.start[b]..self.start[b + 1]]);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

struct TriHit {
    i: usize,
    j: usize,
    estimate: [f64; 2],
}

impl PlanarOracle {
    pub fn new(map: &MapHandle, window: &Window, step: f64) -> Result<Self, ProbeError> {
        window.check_dim(2)?;
        let grid = window.grid(step)?;
        let (nx, ny) = (grid.counts[0], grid.counts[1]);
        if nx < 2 || ny < 2 {
            return Err(ProbeError::InvalidArgument("oracle window must span at least one cell".into()));
        }
        if (nx - 1) * (ny - 1) > u32::MAX as usize {
            return Err(ProbeError::InvalidArgument("oracle lattice is too large".into()));
        }
        let undefined = PlanarPoint::new(f64::NAN, f64::NAN);
        let images: Vec<PlanarPoint> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let c = grid.point(idx);
                map.eval2(PlanarPoint::new(c[0], c[1])).ok().filter(|v| v.is_finite()).unwrap_or(undefined)
            })
            .collect();
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for v in images.iter().filter(|v| v.is_finite()) {
            lo = [lo[0].min(v.x), lo[1].min(v.y)];
            hi = [hi[0].max(v.x), hi[1].max(v.y)];
        }
        let box_of = |s: usize| {
            let (i, j) = (s / (ny - 1), s % (ny - 1));
            let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
            for (a, c) in [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)] {
                let v = images[a * ny + c];
                if !v.is_finite() {
                    return None;
                }
                b = [b[0].min(v.x), b[1].min(v.y), b[2].max(v.x), b[3].max(v.y)];
            }
            Some(b)
        };
        let index = SquareIndex::build((nx - 1) * (ny - 1), lo, hi, box_of);
        Ok(Self {
            map: map.clone(),
            lo: [window.lo[0], window.lo[1]],
            hi: [window.hi[0], window.hi[1]],
            step,
            nx,
            ny,
            images,
            index,
        })
    }

    #[inline]
    fn vertex(&self, i: usize, j: usize) -> [f64; 2] {
        [self.lo[0] + i as f64 * self.step, self.lo[1] + j as f64 * self.step]
    }

    #[inline]
    fn image(&self, i: usize, j: usize) -> Option<PlanarPoint> {
        Some(self.images[i * self.ny + j]).filter(|v| v.is_finite())
    }

    fn square_hits(&self, i: usize, j: usize, t: PlanarPoint, tol: f64, out: &mut Vec<TriHit>) {
        let ids = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
        let imgs: Option<Vec<PlanarPoint>> = ids.iter().map(|&(a, b)| self.image(a, b)).collect();
        let Some(imgs) = imgs else { return };
        for tri in [[0usize, 1, 2], [0, 2, 3]] {
            let img = [imgs[tri[0]], imgs[tri[1]], imgs[tri[2]]];
            let (lox, hix) = (img.iter().map(|p| p.x).fold(f64::INFINITY, f64::min), img.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max));
            let (loy, hiy) = (img.iter().map(|p| p.y).fold(f64::INFINITY, f64::min), img.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max));
            if t.x < lox - tol || t.x > hix + tol || t.y < loy - tol || t.y > hiy + tol {
                continue;
            }
            if let Some(bary) = closest_barycentric(img, t, tol) {
                let dom = [ids[tri[0]], ids[tri[1]], ids[tri[2]]].map(|(a, b)| self.vertex(a, b));
                let estimate = [
                    bary[0] * dom[0][0] + bary[1] * dom[1][0] + bary[2] * dom[2][0],
                    bary[0] * dom[0][1] + bary[1] * dom[1][1] + bary[2] * dom[2][1],
                ];
                out.push(TriHit { i, j, estimate });
            }
        }
    }

    fn hits(&self, target: PlanarPoint, tol: f64) -> Vec<TriHit> {
        let mut out = Vec::new();
        for s in self.index.candidates(target, tol) {
            let s = s as usize;
            self.square_hits(s / (self.ny - 1), s % (self.ny - 1), target, tol, &mut out);
        }
        out
    }

    /// Clusters of lattice triangles whose image lies within `tol` of `target`.
    pub fn preimages(&self, target: PlanarPoint, tol: f64) -> OracleReport<PlanarPoint> {
        self.preimages_refined(target, tol, 1)
    }

    /// Like [`preimages`](Self::preimages), but each cluster is re-located on
    /// a local lattice `factor` times finer around its squares. Counts come
    /// from the coarse lattice; only the representatives move.
    pub fn preimages_refined(&self, target: PlanarPoint, tol: f64, factor: usize) -> OracleReport<PlanarPoint> {
        let hits = self.hits(target, tol);
        let clusters = cluster(hits.len(), |k| (hits[k].i, hits[k].j))
            .into_iter()
            .map(|members| {
                let coarse = mean_estimate(members.iter().map(|&k| hits[k].estimate));
                let representative = if factor > 1 {
                    self.refine(&members, &hits, target, tol, factor, coarse).unwrap_or(coarse)
                } else {
                    coarse
                };
                OracleCluster { representative, cells: members.len() }
            })
            .collect();
        OracleReport { target, step: self.step, clusters }
    }

    fn refine(
        &self,
        members: &[usize],
        hits: &[TriHit],
        target: PlanarPoint,
        tol: f64,
        factor: usize,
        coarse: PlanarPoint,
    ) -> Option<PlanarPoint> {
        let (mut i0, mut i1, mut j0, mut j1) = (usize::MAX, 0, usize::MAX, 0);
        for &k in members {
            i0 = i0.min(hits[k].i);
            i1 = i1.max(hits[k].i + 1);
            j0 = j0.min(hits[k].j);
            j1 = j1.max(hits[k].j + 1);
        }
        // the coarse interpolant can be off by more than a square next to a kink
        const PAD: usize = 3;
        let lo = self.vertex(i0.saturating_sub(PAD), j0.saturating_sub(PAD));
        let hi = self.vertex((i1 + PAD).min(self.nx - 1), (j1 + PAD).min(self.ny - 1));
        let hi = [hi[0].min(self.hi[0]), hi[1].min(self.hi[1])];
        let window = Window::new(lo.to_vec(), hi.to_vec()).ok()?;
        let fine = PlanarOracle::new(&self.map, &window, self.step / factor as f64).ok()?;
        let sub = fine.hits(target, tol);
        cluster(sub.len(), |k| (sub[k].i, sub[k].j))
            .into_iter()
            .map(|m| mean_estimate(m.iter().map(|&k| sub[k].estimate)))
            .min_by(|a, b| a.dist(coarse).total_cmp(&b.dist(coarse)))
    }
}

fn mean_estimate(it: impl Iterator<Item = [f64; 2]>) -> PlanarPoint {
    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0.0);
    for e in it {
        sx += e[0];
        sy += e[1];
        n += 1.0;
    }
    PlanarPoint::new(sx / n, sy / n)
}

/// Barycentric coordinates of the point of triangle `tri` closest to `t`, if
/// that point is within `tol`.
fn closest_barycentric(tri: [PlanarPoint; 3], t: PlanarPoint, tol: f64) -> Option<[f64; 3]> {
    let [a, b, c] = tri;
    let det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    if det != 0.0 {
        let l1 = ((t.x - a.x) * (c.y - a.y) - (c.x - a.x) * (t.y - a.y)) / det;
        let l2 = ((b.x - a.x) * (t.y - a.y) - (t.x - a.x) * (b.y - a.y)) / det;
        let l0 = 1.0 - l1 - l2;
        if l0 >= 0.0 && l1 >= 0.0 && l2 >= 0.0 {
            return Some([l0, l1, l2]);
        }
    }
    let mut best: Option<(f64, [f64; 3])> = None;
    for (p, q, ip, iq) in [(a, b, 0, 1), (b, c, 1, 2), (c, a, 2, 0)] {
        let (dx, dy) = (q.x - p.x, q.y - p.y);
        let len2 = dx * dx + dy * dy;
        let s = if len2 > 0.0 { (((t.x - p.x) * dx + (t.y - p.y) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
        let d = (p.x + s * dx - t.x).hypot(p.y + s * dy - t.y);
        if d <= tol && best.is_none_or(|(bd, _)| d < bd) {
            let mut bary = [0.0; 3];
            bary[ip] = 1.0 - s;
            bary[iq] = s;
            best = Some((d, bary));
        }
    }
    best.map(|(_, b)| b)
}

/// Groups items whose lattice squares touch (8-neighbourhood), preserving the
/// order of first appearance.
fn cluster(n: usize, key: impl Fn(usize) -> (usize, usize)) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut by_square: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for k in 0..n {
        by_square.entry(key(k)).or_default().push(k);
    }
    for k in 0..n {
        let (i, j) = key(k);
        for di in -1i64..=1 {
            for dj in -1i64..=1 {
                let (ni, nj) = (i as i64 + di, j as i64 + dj);
                if ni < 0 || nj < 0 {
                    continue;
                }
                if let Some(others) = by_square.get(&(ni as usize, nj as usize)) {
                    for &o in others {
                        let (ra, rb) = (find(&mut parent, k), find(&mut parent, o));
                        if ra != rb {
                            parent[ra.max(rb)] = ra.min(rb);
                        }
                    }
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for k in 0..n {
        let r = find(&mut parent, k);
        let g = *slot.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(k);
    }
    groups
}

pub fn brute_preimage_oracle_planar(
    map: &MapHandle,
    target: PlanarPoint,
    window: &Window,
    step: f64,
    tol: f64,
) -> Result<OracleReport<PlanarPoint>, ProbeError> {
    Ok(PlanarOracle::new(map, window, step)?.preimages(target, tol))
}

/// The six tetrahedra of the Kuhn split of a cube, as corner offsets. The
/// split is the same in every cube, so neighbouring cubes share faces.
const KUHN: [[[usize; 3]; 4]; 6] = {
    const fn path(a: usize, b: usize, c: usize) -> [[usize; 3]; 4] {
        let mut v = [[0usize; 3]; 4];
        v[1][a] = 1;
        v[2] = v[1];
        v[2][b] = 1;
        v[3] = v[2];
        v[3][c] = 1;
        v
    }
    [path(0, 1, 2), path(0, 2, 1), path(1, 0, 2), path(1, 2, 0), path(2, 0, 1), path(2, 1, 0)]
};

/// Barycentric coordinates of `t` in the tetrahedron `v`, if `t` is on the
/// inner side of every face plane or beyond it by at most `tol`.
fn tet_barycentric(v: [SpatialPoint; 4], t: SpatialPoint, tol: f64) -> Option<[f64; 4]> {
    let [a, b, c, d] = v;
    let (e1, e2, e3, r) = (b - a, c - a, d - a, t - a);
    let cross = |p: SpatialPoint, q: SpatialPoint| SpatialPoint::new(p.y * q.z - p.z * q.y, p.z * q.x - p.x * q.z, p.x * q.y - p.y * q.x);
    let det = e1.dot(cross(e2, e3));
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    // rows of the inverse of [e1 e2 e3] are the gradients of l1, l2, l3
    let g1 = cross(e2, e3).scale(1.0 / det);
    let g2 = cross(e3, e1).scale(1.0 / det);
    let g3 = cross(e1, e2).scale(1.0 / det);
    let g0 = (g1 + g2 + g3).scale(-1.0);
    let (l1, l2, l3) = (g1.dot(r), g2.dot(r), g3.dot(r));
    let l = [1.0 - l1 - l2 - l3, l1, l2, l3];
    let inside = l.iter().zip([g0, g1, g2, g3]).all(|(li, g)| *li >= 0.0 || -li / g.norm() <= tol);
    inside.then_some(l)
}

/// Preimages of `target` on the tetrahedral lattice of `window` with spacing
/// `step`: every tetrahedron whose image contains the target, with face
/// planes pushed out by `tol`, is a hit. Hits in cubes that touch (26
/// neighbours) form one cluster, represented by the mean of their
/// back-interpolated positions.
pub fn brute_preimage_oracle_spatial(
    map: &MapHandle,
    target: SpatialPoint,
    window: &Window,
    step: f64,
    tol: f64,
) -> Result<OracleReport<SpatialPoint>, ProbeError> {
    window.check_dim(3)?;
    if !(tol >= 0.0) {
        return Err(ProbeError::InvalidArgument(format!("oracle tolerance must be non-negative, got {tol}")));
    }
    let grid = window.grid(step)?;
    let [nx, ny, nz] = [grid.counts[0], grid.counts[1], grid.counts[2]];
    if nx < 2 || ny < 2 || nz < 2 {
        return Err(ProbeError::InvalidArgument("oracle window must span at least one cell".into()));
    }
    let images: Vec<Option<SpatialPoint>> = (0..grid.len())
        .into_par_iter()
        .map(|idx| map.eval3(SpatialPoint::from_coords(&grid.point(idx))).ok().filter(|v| v.is_finite()))
        .collect();
    let cubes = (nx - 1) * (ny - 1) * (nz - 1);
    let hits: Vec<([usize; 3], SpatialPoint)> = (0..cubes)
        .into_par_iter()
        .fold(Vec::new, |mut acc, c| {
            let ijk = [c / ((ny - 1) * (nz - 1)), (c / (nz - 1)) % (ny - 1), c % (nz - 1)];
            let corner = |o: [usize; 3]| [ijk[0] + o[0], ijk[1] + o[1], ijk[2] + o[2]];
            let mut all = [SpatialPoint::ORIGIN; 8];
            for (k, slot) in all.iter_mut().enumerate() {
                match images[grid.ravel(&corner([k >> 2, (k >> 1) & 1, k & 1]))] {
                    Some(v) => *slot = v,
                    None => return acc,
                }
            }
            let lo = all.iter().fold(SpatialPoint::new(f64::INFINITY, f64::INFINITY, f64::INFINITY), |m, v| {
                SpatialPoint::new(m.x.min(v.x), m.y.min(v.y), m.z.min(v.z))
            });
            let hi = all.iter().fold(SpatialPoint::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY), |m, v| {
                SpatialPoint::new(m.x.max(v.x), m.y.max(v.y), m.z.max(v.z))
            });
            if target.x < lo.x - tol || target.y < lo.y - tol || target.z < lo.z - tol
                || target.x > hi.x + tol || target.y > hi.y + tol || target.z > hi.z + tol
            {
                return acc;
            }
            for tet in KUHN {
                let at = |o: [usize; 3]| all[(o[0] << 2) | (o[1] << 1) | o[2]];
                if let Some(l) = tet_barycentric(tet.map(at), target, tol) {
                    let dom = tet.map(|o| {
                        let p = corner(o);
                        SpatialPoint::new(grid.coord(0, p[0]), grid.coord(1, p[1]), grid.coord(2, p[2]))
                    });
                    let estimate = dom[0].scale(l[0]) + dom[1].scale(l[1]) + dom[2].scale(l[2]) + dom[3].scale(l[3]);
                    acc.push((ijk, estimate));
                }
            }
            acc
        })
        .reduce(Vec::new, |mut a, mut b| {
            a.append(&mut b);
            a
        });

    let by_cube: HashMap<[usize; 3], Vec<usize>> = hits.iter().enumerate().fold(HashMap::new(), |mut m, (k, h)| {
        m.entry(h.0).or_default().push(k);
        m
    });
    let mut seen = vec![false; hits.len()];
    let mut clusters = Vec::new();
    for start in 0..hits.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut members = Vec::new();
        while let Some(k) = stack.pop() {
            members.push(k);
            let c = hits[k].0;
            for dx in -1i64..=1 {
                for dy in -1i64..=1 {
                    for dz in -1i64..=1 {
                        let n = [c[0] as i64 + dx, c[1] as i64 + dy, c[2] as i64 + dz];
                        if n.iter().any(|v| *v < 0) {
                            continue;
                        }
                        for &o in by_cube.get(&n.map(|v| v as usize)).into_iter().flatten() {
                            if !seen[o] {
                                seen[o] = true;
                                stack.push(o);
                            }
                        }
                    }
                }
            }
        }
        // sum in hit order so the result does not depend on the traversal
        members.sort_unstable();
        let sum = members.iter().fold(SpatialPoint::ORIGIN, |acc, &k| acc + hits[k].1);
        let cells: std::collections::BTreeSet<[usize; 3]> = members.iter().map(|&k| hits[k].0).collect();
        clusters.push(OracleCluster { representative: sum.scale(1.0 / members.len() as f64), cells: cells.len() });
    }
    Ok(OracleReport { target, step, clusters })
}
