//! Triangle–triangle intersection of two meshes and stitching into polylines.

use std::collections::HashMap;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::Serialize;

use super::{ManifoldKind, ManifoldMesh};
use crate::dynamics::Reversor;

/// Endpoints closer than this are identified when stitching.
pub const STITCH_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    /// The curve leaves one of the meshes.
    Boundary,
    /// Three or more segments meet.
    Junction,
    /// The polyline is closed.
    Closed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixCrossing {
    pub point: Vector3<f64>,
    /// Parameter `s` of the nearest point `(s, −η/2, −η − s)` of `Fix(h)`.
    pub parameter: f64,
    pub distance: f64,
    /// Index of the polyline segment nearest to the line.
    pub segment: usize,
    /// Unit direction of that segment.
    pub tangent: Vector3<f64>,
    /// `n̂ × Dh n̂` with `n̂` the stable-mesh triangle normal.
    pub predicted: Vector3<f64>,
    /// Angle between the two directions as lines, in degrees.
    pub angle_deg: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeteroclinicCurve {
    /// Oriented to start at the end nearer the first mesh's fixed point.
    pub polyline: Vec<Vector3<f64>>,
    pub endpoints: [Endpoint; 2],
    /// Triangle pair `(first mesh, second mesh)` of each segment.
    pub triangles: Vec<(usize, usize)>,
    pub crossings: Vec<FixCrossing>,
}

impl HeteroclinicCurve {
    pub fn length(&self) -> f64 {
        self.polyline.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    pub fn distance_to(&self, x: &Vector3<f64>) -> f64 {
        if self.polyline.len() == 1 {
            return (self.polyline[0] - x).norm();
        }
        self.polyline
            .windows(2)
            .map(|w| point_segment_distance(x, &w[0], &w[1]))
            .fold(f64::INFINITY, f64::min)
    }
}

pub(crate) fn point_segment_distance(x: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let d = b - a;
    let l2 = d.norm_squared();
    let t = if l2 == 0.0 {
        0.0
    } else {
        ((x - a).dot(&d) / l2).clamp(0.0, 1.0)
    };
    (a + d * t - x).norm()
}

/// Euclidean distance from `p` to the triangle `abc`.
pub(crate) fn point_triangle_distance(
    p: &Vector3<f64>,
    a: &Vector3<f64>,
    b: &Vector3<f64>,
    c: &Vector3<f64>,
) -> f64 {
    let n = (b - a).cross(&(c - a));
    let nn = n.norm_squared();
    if nn > 0.0 {
        let d = (p - a).dot(&n) / nn;
        let q = p - n * d;
        let inside = (b - a).cross(&(q - a)).dot(&n) >= 0.0
            && (c - b).cross(&(q - b)).dot(&n) >= 0.0
            && (a - c).cross(&(q - c)).dot(&n) >= 0.0;
        if inside {
            return (p - q).norm();
        }
    }
    point_segment_distance(p, a, b)
        .min(point_segment_distance(p, b, c))
        .min(point_segment_distance(p, c, a))
}

struct Tri {
    v: [Vector3<f64>; 3],
    lo: Vector3<f64>,
    hi: Vector3<f64>,
}

fn tri(mesh: &ManifoldMesh, t: usize) -> Tri {
    let mut ids = mesh.triangles[t];
    ids.sort_unstable();
    // vertex-id order makes shared edges evaluate identically
    let v = ids.map(|i| mesh.vertices[i]);
    Tri {
        lo: v[0].inf(&v[1]).inf(&v[2]),
        hi: v[0].sup(&v[1]).sup(&v[2]),
        v,
    }
}

/// Points where the edges of `t` cross the plane of `u` inside `u`. The edge
/// endpoints are taken in vertex-id order so that neighbours sharing the edge
/// compute the identical point.
fn edge_plane_points(t: &Tri, u: &Tri, out: &mut Vec<Vector3<f64>>) {
    let n = (u.v[1] - u.v[0]).cross(&(u.v[2] - u.v[0]));
    if n.norm_squared() == 0.0 {
        return;
    }
    let d: Vec<f64> = t.v.iter().map(|x| n.dot(&(x - u.v[0]))).collect();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let (di, dj) = (d[i], d[j]);
        if (di > 0.0 && dj > 0.0) || (di < 0.0 && dj < 0.0) || di == dj {
            continue;
        }
        let x = t.v[i] + (t.v[j] - t.v[i]) * (di / (di - dj));
        if inside(&x, u, &n) {
            out.push(x);
        }
    }
}

fn inside(x: &Vector3<f64>, u: &Tri, n: &Vector3<f64>) -> bool {
    let tol = -1e-12 * n.norm_squared();
    (u.v[1] - u.v[0]).cross(&(x - u.v[0])).dot(n) >= tol
        && (u.v[2] - u.v[1]).cross(&(x - u.v[1])).dot(n) >= tol
        && (u.v[0] - u.v[2]).cross(&(x - u.v[2])).dot(n) >= tol
}

fn segment(t: &Tri, u: &Tri) -> Option<(Vector3<f64>, Vector3<f64>)> {
    let mut pts = Vec::with_capacity(4);
    edge_plane_points(t, u, &mut pts);
    edge_plane_points(u, t, &mut pts);
    let scale = 1.0 + t.hi.amax().max(-t.lo.amin());
    let mut uniq: Vec<Vector3<f64>> = Vec::with_capacity(2);
    for p in pts {
        if !uniq.iter().any(|q| (q - p).amax() <= 1e-13 * scale) {
            uniq.push(p);
        }
    }
    if uniq.len() >= 2 {
        // keep the farthest pair
        let mut best = (0, 1, -1.0);
        for i in 0..uniq.len() {
            for j in i + 1..uniq.len() {
                let d = (uniq[i] - uniq[j]).norm();
                if d > best.2 {
                    best = (i, j, d);
                }
            }
        }
        Some((uniq[best.0], uniq[best.1]))
    } else {
        None
    }
}

struct Grid {
    cell: f64,
    map: HashMap<(i64, i64, i64), Vec<usize>>,
}

impl Grid {
    fn key(&self, x: f64) -> i64 {
        (x / self.cell).floor() as i64
    }

    fn build(tris: &[Tri], cell: f64) -> Grid {
        let mut g = Grid {
            cell,
            map: HashMap::new(),
        };
        for (i, t) in tris.iter().enumerate() {
            let (lo, hi) = (t.lo.map(|x| g.key(x)), t.hi.map(|x| g.key(x)));
            for a in lo[0]..=hi[0] {
                for b in lo[1]..=hi[1] {
                    for c in lo[2]..=hi[2] {
                        g.map.entry((a, b, c)).or_default().push(i);
                    }
                }
            }
        }
        g
    }

    fn candidates(&self, t: &Tri) -> Vec<usize> {
        let (lo, hi) = (t.lo.map(|x| self.key(x)), t.hi.map(|x| self.key(x)));
        let mut out = Vec::new();
        for a in lo[0]..=hi[0] {
            for b in lo[1]..=hi[1] {
                for c in lo[2]..=hi[2] {
                    if let Some(v) = self.map.get(&(a, b, c)) {
                        out.extend_from_slice(v);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn overlaps(a: &Tri, b: &Tri) -> bool {
    (0..3).all(|i| a.lo[i] <= b.hi[i] && b.lo[i] <= a.hi[i])
}

/// Intersection curves of two triangulated manifolds. With a reversor, the
/// places where a curve passes within `max(refine)` of `Fix(h)` are recorded
/// together with the symmetry-predicted tangent.
pub fn intersect_meshes(
    a: &ManifoldMesh,
    b: &ManifoldMesh,
    reversor: Option<&Reversor>,
) -> Vec<HeteroclinicCurve> {
    let ta: Vec<Tri> = (0..a.triangles.len()).map(|t| tri(a, t)).collect();
    let tb: Vec<Tri> = (0..b.triangles.len()).map(|t| tri(b, t)).collect();
    if ta.is_empty() || tb.is_empty() {
        return vec![];
    }
    let mut sizes: Vec<f64> = tb.iter().map(|t| (t.hi - t.lo).amax()).collect();
    sizes.sort_by(|x, y| x.total_cmp(y));
    let cell = (2.0 * sizes[sizes.len() / 2]).max(1e-12);
    let grid = Grid::build(&tb, cell);

    let segments: Vec<(Vector3<f64>, Vector3<f64>, usize, usize)> = ta
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, t)| {
            grid.candidates(t)
                .into_iter()
                .filter(|&j| overlaps(t, &tb[j]))
                .filter_map(|j| segment(t, &tb[j]).map(|(p, q)| (p, q, i, j)))
                .collect::<Vec<_>>()
        })
        .collect();
    if segments.is_empty() {
        return vec![];
    }

    // stitch: merge endpoints within STITCH_TOL
    let mut nodes: Vec<Vector3<f64>> = Vec::new();
    let mut lookup: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    let key = |x: &Vector3<f64>| {
        (
            (x[0] / STITCH_TOL).floor() as i64,
            (x[1] / STITCH_TOL).floor() as i64,
            (x[2] / STITCH_TOL).floor() as i64,
        )
    };
    let mut node_of = |x: Vector3<f64>, nodes: &mut Vec<Vector3<f64>>| -> usize {
        let k = key(&x);
        for da in -1..=1 {
            for db in -1..=1 {
                for dc in -1..=1 {
                    if let Some(v) = lookup.get(&(k.0 + da, k.1 + db, k.2 + dc)) {
                        for &n in v {
                            if (nodes[n] - x).norm() <= STITCH_TOL {
                                return n;
                            }
                        }
                    }
                }
            }
        }
        nodes.push(x);
        lookup.entry(k).or_default().push(nodes.len() - 1);
        nodes.len() - 1
    };
    let mut adj: Vec<Vec<(usize, usize)>> = Vec::new();
    for (s, (p, q, _, _)) in segments.iter().enumerate() {
        let (u, v) = (node_of(*p, &mut nodes), node_of(*q, &mut nodes));
        if u == v {
            continue;
        }
        adj.resize(nodes.len(), Vec::new());
        adj[u].push((v, s));
        adj[v].push((u, s));
    }
    adj.resize(nodes.len(), Vec::new());

    let mut used = vec![false; segments.len()];
    let mut curves = Vec::new();
    let walk = |start: usize, used: &mut Vec<bool>| -> Option<(Vec<usize>, Vec<usize>)> {
        let mut path = vec![start];
        let mut segs = Vec::new();
        let mut cur = start;
        loop {
            let next = adj[cur].iter().find(|(_, s)| !used[*s]).copied();
            let Some((n, s)) = next else { break };
            used[s] = true;
            path.push(n);
            segs.push(s);
            cur = n;
            if adj[cur].len() != 2 || cur == start {
                break;
            }
        }
        (!segs.is_empty()).then_some((path, segs))
    };
    let degree = |n: usize| adj[n].len();
    let ends = |n: usize| if degree(n) == 1 { Endpoint::Boundary } else { Endpoint::Junction };
    for n in 0..nodes.len() {
        if degree(n) != 2 {
            while let Some((path, segs)) = walk(n, &mut used) {
                let last = *path.last().expect("nonempty");
                curves.push((path, segs, [ends(n), ends(last)]));
            }
        }
    }
    for n in 0..nodes.len() {
        while let Some((path, segs)) = walk(n, &mut used) {
            curves.push((path, segs, [Endpoint::Closed, Endpoint::Closed]));
        }
    }

    let origin = a.fixed_point.location();
    let (stable_tris, swap) = match a.kind {
        ManifoldKind::Stable => (&ta, false),
        ManifoldKind::Unstable => (&tb, true),
    };
    let mut out: Vec<HeteroclinicCurve> = curves
        .into_iter()
        .map(|(path, segs, endpoints)| {
            let mut polyline: Vec<Vector3<f64>> = path.iter().map(|&n| nodes[n]).collect();
            let mut triangles: Vec<(usize, usize)> =
                segs.iter().map(|&s| (segments[s].2, segments[s].3)).collect();
            let mut endpoints = endpoints;
            if (polyline[0] - origin).norm() > (polyline[polyline.len() - 1] - origin).norm() {
                polyline.reverse();
                triangles.reverse();
                endpoints.reverse();
            }
            let crossings = match reversor {
                Some(r) => crossings(&polyline, &triangles, r, stable_tris, swap, a.refine.max(b.refine)),
                None => vec![],
            };
            HeteroclinicCurve {
                polyline,
                endpoints,
                triangles,
                crossings,
            }
        })
        .collect();
    out.sort_by(|x, y| y.length().total_cmp(&x.length()));
    out
}

/// Closest points between a segment and `Fix(h)`, returned as
/// `(distance, segment parameter, line parameter)`.
fn segment_line(p: &Vector3<f64>, q: &Vector3<f64>, r: &Reversor) -> (f64, f64, f64) {
    let line = r.fix_line();
    let o = line.point(0.0);
    let e = Vector3::new(1.0, 0.0, -1.0);
    let d = q - p;
    // minimize |p + d t − o − e s|² over t ∈ [0, 1], s ∈ ℝ
    let w = p - o;
    let (a, b, c) = (d.dot(&d), d.dot(&e), e.dot(&e));
    let (dd, ee) = (d.dot(&w), e.dot(&w));
    let den = a * c - b * b;
    let mut t = if den > 1e-300 { (b * ee - c * dd) / den } else { 0.0 };
    t = t.clamp(0.0, 1.0);
    let s = (w + d * t).dot(&e) / c;
    let dist = (w + d * t - e * s).norm();
    (dist, t, s)
}

fn crossings(
    polyline: &[Vector3<f64>],
    triangles: &[(usize, usize)],
    r: &Reversor,
    stable_tris: &[Tri],
    stable_is_second: bool,
    tol: f64,
) -> Vec<FixCrossing> {
    let dh = r.jacobian();
    let mut out = Vec::new();
    let mut best: Option<FixCrossing> = None;
    for (i, w) in polyline.windows(2).enumerate() {
        let (dist, t, s) = segment_line(&w[0], &w[1], r);
        if dist < tol {
            if best.as_ref().is_none_or(|b| dist < b.distance) {
                let tri_id = if stable_is_second { triangles[i].1 } else { triangles[i].0 };
                let st = &stable_tris[tri_id];
                let n = (st.v[1] - st.v[0]).cross(&(st.v[2] - st.v[0])).normalize();
                let predicted = n.cross(&(dh * n)).normalize();
                let tangent = (w[1] - w[0]).normalize();
                let angle_deg = tangent.dot(&predicted).abs().min(1.0).acos().to_degrees();
                best = Some(FixCrossing {
                    point: w[0] + (w[1] - w[0]) * t,
                    parameter: s,
                    distance: dist,
                    segment: i,
                    tangent,
                    predicted,
                    angle_deg,
                });
            }
        } else if let Some(b) = best.take() {
            out.push(b);
        }
    }
    out.extend(best);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: [[f64; 3]; 3]) -> Tri {
        let v = v.map(|x| Vector3::new(x[0], x[1], x[2]));
        Tri {
            lo: v[0].inf(&v[1]).inf(&v[2]),
            hi: v[0].sup(&v[1]).sup(&v[2]),
            v,
        }
    }

    #[test]
    fn crossing_triangles() {
        let a = t([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 2.0, 0.0]]);
        let b = t([[0.5, 0.5, -1.0], [0.5, 0.5, 1.0], [1.5, 0.2, 0.0]]);
        let (p, q) = segment(&a, &b).unwrap();
        assert!(p[2].abs() < 1e-15 && q[2].abs() < 1e-15);
        let far = t([[0.0, 0.0, 5.0], [1.0, 0.0, 5.0], [0.0, 1.0, 5.0]]);
        assert!(segment(&a, &far).is_none());
    }

    #[test]
    fn distances() {
        let (a, b, c) = (
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
        );
        assert_eq!(point_triangle_distance(&Vector3::new(0.2, 0.2, 3.0), &a, &b, &c), 3.0);
        assert_eq!(point_triangle_distance(&Vector3::new(-1.0, 0.0, 0.0), &a, &b, &c), 1.0);
    }
}
