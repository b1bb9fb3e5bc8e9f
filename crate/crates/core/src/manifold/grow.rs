//! Growth of 1D and 2D invariant manifolds from the linear data at a fixed point.

use std::f64::consts::TAU;

use nalgebra::{Matrix2, Vector2, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{linear_data, BoundingBox, ManifoldKind};
use crate::dynamics::{FixedPointReport, GenericMapParams};
use crate::error::{Error, Result};

/// Seed angles closer than this are not split further.
const MIN_DPHI: f64 = 1e-9;
const MIN_DT: f64 = 1e-9;
const MAX_PASSES: usize = 60;
/// Each band between the initial levels is split at most this many times.
const MAX_BAND_SPLITS: i32 = 4;
/// A band is split while its longest triangle edge exceeds this many `refine`.
const BAND_FACTOR: f64 = 1.5;
/// Longer band edges are taken to span a gap rather than a wide band.
const BAND_CAP: f64 = 6.0;
/// Edges longer than this many `refine` are treated as gaps by default.
const GAP_FACTOR: f64 = 2.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowOptions {
    /// Seed radius; `1e-4 (1 + |x*|)` when absent.
    pub epsilon: Option<f64>,
    /// Number of generations.
    pub depth: usize,
    /// Maximum edge length along a ring (2D) or branch (1D).
    pub refine: f64,
    /// Iterates of the map per generation.
    pub steps_per_generation: usize,
    /// Rings per generation; defaults to one per iterate.
    pub sub_rings: Option<usize>,
    pub ring_points: usize,
    /// Defaults to the escape cube scaled by 1.5.
    pub bounding_box: Option<BoundingBox>,
    /// Triangles with an edge between rings longer than this are dropped;
    /// defaults to `2 × refine`.
    pub max_radial: Option<f64>,
    pub max_vertices: usize,
}

impl Default for GrowOptions {
    fn default() -> Self {
        GrowOptions {
            epsilon: None,
            depth: 8,
            refine: 0.05,
            steps_per_generation: 30,
            sub_rings: None,
            ring_points: 64,
            bounding_box: None,
            max_radial: None,
            max_vertices: 4_000_000,
        }
    }
}

impl GrowOptions {
    pub fn epsilon_for(&self, fp: &FixedPointReport) -> f64 {
        self.epsilon
            .unwrap_or(1e-4 * (1.0 + fp.coordinate.abs()))
    }

    fn validate(&self) -> Result<()> {
        if !(self.refine > 0.0) || self.steps_per_generation == 0 || self.ring_points < 3 {
            return Err(Error::InvalidInput(
                "refine must be positive, steps_per_generation ≥ 1, ring_points ≥ 3".into(),
            ));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0) {
                return Err(Error::InvalidInput("epsilon must be positive".into()));
            }
        }
        Ok(())
    }

    fn resolve_box(&self, p: &GenericMapParams) -> Result<BoundingBox> {
        match self.bounding_box {
            Some(b) => Ok(b),
            None => BoundingBox::escape_cube(p).map_err(|_| {
                Error::InvalidInput("Q is not positive definite; a bounding box is required".into())
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    /// First vertex index; a ring occupies a contiguous range sorted by its
    /// nominal angle.
    pub start: usize,
    pub len: usize,
    pub generation: usize,
    /// Iterates of the map applied to the seed circle.
    pub iterates: usize,
    pub seed_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ManifoldMesh {
    pub kind: ManifoldKind,
    pub fixed_point: FixedPointReport,
    /// Vertex 0 is the fixed point.
    pub vertices: Vec<Vector3<f64>>,
    pub triangles: Vec<[usize; 3]>,
    pub generation: Vec<usize>,
    /// Angle of each vertex on its seed circle.
    pub seed_angle: Vec<f64>,
    pub rings: Vec<Ring>,
    pub epsilon: f64,
    pub refine: f64,
    pub steps_per_generation: usize,
    pub depth: usize,
    pub bounding_box: BoundingBox,
    pub truncated: bool,
    pub truncation: Option<String>,
}

fn step(p: &GenericMapParams, kind: ManifoldKind, x: &Vector3<f64>) -> Vector3<f64> {
    match kind {
        ManifoldKind::Unstable => p.apply(x),
        ManifoldKind::Stable => p.apply_inverse(x),
    }
}

fn iterate(p: &GenericMapParams, kind: ManifoldKind, x: &Vector3<f64>, n: usize) -> Vector3<f64> {
    let mut y = *x;
    for _ in 0..n {
        y = step(p, kind, &y);
        if !y.iter().all(|v| v.is_finite()) {
            break;
        }
    }
    y
}

fn ok(b: &BoundingBox, x: &Vector3<f64>) -> bool {
    x.iter().all(|v| v.is_finite()) && b.contains(x)
}

struct RingSample {
    phi: f64,
    x: Vector3<f64>,
}

impl ManifoldMesh {
    pub fn map_direction(&self) -> ManifoldKind {
        self.kind
    }

    pub fn triangle(&self, t: usize) -> [Vector3<f64>; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn max_edge_length(&self) -> f64 {
        self.triangles
            .iter()
            .map(|&[a, b, c]| {
                let (va, vb, vc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
                (va - vb).norm().max((vb - vc).norm()).max((vc - va).norm())
            })
            .fold(0.0, f64::max)
    }

    /// Triangle area summed per generation of the outermost vertex.
    pub fn generation_areas(&self) -> Vec<f64> {
        let mut areas = vec![0.0; self.depth + 1];
        for &[a, b, c] in &self.triangles {
            let g = self.generation[a].max(self.generation[b]).max(self.generation[c]);
            let (va, vb, vc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
            areas[g] += 0.5 * (vb - va).cross(&(vc - va)).norm();
        }
        areas
    }

    /// Distance from `x` to the triangulated surface.
    pub fn distance_to(&self, x: &Vector3<f64>) -> f64 {
        self.triangles
            .par_iter()
            .map(|&[a, b, c]| {
                super::intersect::point_triangle_distance(
                    x,
                    &self.vertices[a],
                    &self.vertices[b],
                    &self.vertices[c],
                )
            })
            .reduce(|| f64::INFINITY, f64::min)
    }
}

/// Triangulated 2D manifold grown ring by ring.
///
/// Ring `j` of generation `g` is the image under `f^{gk}` (`f⁻¹` for the
/// stable manifold) of the seed circle of radius `ε ρ^{k j/m}` in the
/// eigenplane, with `k` iterates per generation, `m` rings per generation and
/// `ρ` the smallest expansion rate. Each ring carries the seed angles of the
/// same ring one generation earlier, mapped by `f^k`, and is refined by
/// inserting seed-angle midpoints until consecutive points are within
/// `refine`. Points leaving the bounding box are dropped and truncate growth.
pub fn grow_2d(
    p: &GenericMapParams,
    fp: &FixedPointReport,
    kind: ManifoldKind,
    opts: &GrowOptions,
) -> Result<ManifoldMesh> {
    opts.validate()?;
    let lin = linear_data(p, fp)?;
    let sub = lin.subspace(kind);
    if sub.dim() != 2 {
        return Err(Error::NotApplicable(format!(
            "the {kind:?} subspace is {}-dimensional",
            sub.dim()
        )));
    }
    let bbox = opts.resolve_box(p)?;
    let eps = opts.epsilon_for(fp);
    let k = opts.steps_per_generation;
    let m = opts.sub_rings.unwrap_or(k).max(1);
    let min_du = 1.0 / (m as f64 * 2f64.powi(MAX_BAND_SPLITS)) * (1.0 - 1e-9);
    let max_edge = opts.max_radial.unwrap_or(GAP_FACTOR * opts.refine);
    let a = Matrix2::new(
        sub.action[(0, 0)],
        sub.action[(0, 1)],
        sub.action[(1, 0)],
        sub.action[(1, 1)],
    );
    let b = match kind {
        ManifoldKind::Unstable => a,
        ManifoldKind::Stable => a.try_inverse().expect("hyperbolic"),
    };
    let rho = b
        .complex_eigenvalues()
        .iter()
        .map(|l| l.norm())
        .fold(f64::INFINITY, f64::min);
    let (e1, e2) = (sub.basis[0], sub.basis[1]);
    let x0 = lin.location;
    let seed = |phi: f64, r: f64| x0 + (e1 * phi.cos() + e2 * phi.sin()) * r;

    // normalized powers of b for the nominal angle of each generation
    let mut powers = vec![Matrix2::identity()];
    for g in 1..=opts.depth {
        let mut q = powers[g - 1];
        for _ in 0..k {
            q = b * q;
            q /= q.amax();
        }
        powers.push(q);
    }
    let nominal = |g: usize, phi: f64| {
        let v = powers[g] * Vector2::new(phi.cos(), phi.sin());
        v[1].atan2(v[0]).rem_euclid(TAU)
    };

    let mut truncated = false;
    let mut truncation = None;
    let mut total = 1usize;

    let refine_ring = |mut samples: Vec<RingSample>, iterates: usize, radius: f64| -> (Vec<RingSample>, bool) {
        let mut lost = false;
        let mut failed = vec![false; samples.len()];
        for _ in 0..MAX_PASSES {
            let n = samples.len();
            if n < 2 {
                break;
            }
            let mids: Vec<(usize, f64)> = (0..n)
                .filter_map(|i| {
                    let j = (i + 1) % n;
                    let mut dphi = samples[j].phi - samples[i].phi;
                    if j == 0 {
                        dphi += TAU;
                    }
                    if failed[i] || dphi <= MIN_DPHI || (samples[j].x - samples[i].x).norm() <= opts.refine {
                        return None;
                    }
                    Some((i, (samples[i].phi + 0.5 * dphi).rem_euclid(TAU)))
                })
                .collect();
            if mids.is_empty() {
                break;
            }
            let pts: Vec<Option<Vector3<f64>>> = mids
                .par_iter()
                .map(|&(_, phi)| {
                    let x = iterate(p, kind, &seed(phi, radius), iterates);
                    ok(&bbox, &x).then_some(x)
                })
                .collect();
            for (&(i, phi), x) in mids.iter().zip(pts) {
                match x {
                    Some(x) => {
                        samples.push(RingSample { phi, x });
                        failed.push(false);
                    }
                    None => {
                        failed[i] = true;
                        lost = true;
                    }
                }
            }
            let mut order: Vec<usize> = (0..samples.len()).collect();
            order.sort_by(|&i, &j| samples[i].phi.total_cmp(&samples[j].phi));
            let mut taken: Vec<Option<RingSample>> = samples.into_iter().map(Some).collect();
            samples = order.iter().map(|&i| taken[i].take().expect("unique")).collect();
            failed = order.iter().map(|&i| failed[i]).collect();
        }
        (samples, lost)
    };

    let radius_of = |u: f64| eps * rho.powf(k as f64 * u);
    let fresh = |u: f64, g: usize, phis: &[f64]| -> (Vec<RingSample>, bool) {
        let radius = radius_of(u);
        let pts: Vec<RingSample> = phis
            .par_iter()
            .map(|&phi| RingSample {
                phi,
                x: iterate(p, kind, &seed(phi, radius), g * k),
            })
            .collect();
        let before = pts.len();
        let alive: Vec<RingSample> = pts.into_iter().filter(|s| ok(&bbox, &s.x)).collect();
        let lost = alive.len() < before;
        let (r, lost2) = refine_ring(alive, g * k, radius);
        (r, lost || lost2)
    };
    let sorted_by_psi = |g: usize, samples: &[RingSample]| -> (Vec<usize>, Vec<f64>) {
        let psi: Vec<f64> = samples.iter().map(|s| nominal(g, s.phi)).collect();
        let mut order: Vec<usize> = (0..samples.len()).collect();
        order.sort_by(|&i, &j| psi[i].total_cmp(&psi[j]));
        let sorted = order.iter().map(|&i| psi[i]).collect();
        (order, sorted)
    };
    // longest edge between two rings over triangles not spanning a ring gap
    let band_width = |ga: usize, a: &[RingSample], gb: usize, b: &[RingSample]| -> f64 {
        let (oa, pa) = sorted_by_psi(ga, a);
        let (ob, pb) = sorted_by_psi(gb, b);
        let va: Vec<Vector3<f64>> = oa.iter().map(|&i| a[i].x).collect();
        let vb: Vec<Vector3<f64>> = ob.iter().map(|&i| b[i].x).collect();
        let mut all = va.clone();
        all.extend_from_slice(&vb);
        let ra = Ring { start: 0, len: va.len(), generation: ga, iterates: 0, seed_radius: 0.0 };
        let rb = Ring { start: va.len(), len: vb.len(), generation: gb, iterates: 0, seed_radius: 0.0 };
        let mut tris = Vec::new();
        zipper(&mut tris, &all, &ra, &pa, &rb, &pb, opts.refine, BAND_CAP * opts.refine);
        tris.iter()
            .map(|&[x, y, z]| {
                (all[x] - all[y]).norm().max((all[y] - all[z]).norm()).max((all[z] - all[x]).norm())
            })
            .fold(0.0, f64::max)
    };

    let mut vertices = vec![x0];
    let mut generation = vec![0usize];
    let mut seed_angle = vec![0.0];
    let mut rings: Vec<Ring> = Vec::new();
    let mut ring_psi_last: Vec<f64> = Vec::new();
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    let mut levels: Vec<f64> = (0..m).map(|j| j as f64 / m as f64).collect();
    // alive samples of each level from the previous generation
    let mut carried: Vec<Vec<RingSample>> = Vec::new();
    let initial: Vec<f64> = (0..opts.ring_points)
        .map(|i| TAU * i as f64 / opts.ring_points as f64)
        .collect();

    'growth: for g in 0..=opts.depth {
        let last = g == opts.depth;
        let count = if last { 1 } else { levels.len() };
        let mut built: Vec<(f64, Vec<RingSample>, bool)> = (0..count)
            .into_par_iter()
            .map(|i| {
                let u = levels[i];
                if g == 0 {
                    let (r, lost) = fresh(u, 0, &initial);
                    return (u, r, lost);
                }
                let start: Vec<RingSample> = carried[i]
                    .par_iter()
                    .map(|s| RingSample {
                        phi: s.phi,
                        x: iterate(p, kind, &s.x, k),
                    })
                    .collect();
                let before = start.len();
                let alive: Vec<RingSample> = start.into_iter().filter(|s| ok(&bbox, &s.x)).collect();
                let lost = alive.len() < before;
                let (r, lost2) = refine_ring(alive, g * k, radius_of(u));
                (u, r, lost || lost2)
            })
            .collect();
        if !last {
            // split bands wider than the ring resolution, the band past the
            // last level measured against the ring one generation on
            let phis_of = |s: &[RingSample]| s.iter().map(|x| x.phi).collect::<Vec<f64>>();
            let mut probe = fresh(1.0, g, &phis_of(&built[built.len() - 1].1)).0;
            for _ in 0..MAX_PASSES {
                let mut inserts: Vec<(usize, f64, Vec<f64>)> = Vec::new();
                for i in 0..built.len() {
                    let (ua, a) = (built[i].0, &built[i].1);
                    let (ub, b) = match built.get(i + 1) {
                        Some(x) => (x.0, &x.1),
                        None => (1.0, &probe),
                    };
                    if ub - ua > min_du && band_width(g, a, g, b) > opts.refine * BAND_FACTOR {
                        inserts.push((i + 1, 0.5 * (ua + ub), phis_of(a)));
                    }
                }
                if inserts.is_empty() {
                    break;
                }
                let new: Vec<(f64, Vec<RingSample>, bool)> = inserts
                    .par_iter()
                    .map(|(_, u, phis)| {
                        let (r, lost) = fresh(*u, g, phis);
                        (*u, r, lost)
                    })
                    .collect();
                for ((at, _, _), ring) in inserts.iter().zip(new).rev() {
                    built.insert(*at, ring);
                }
                if built.iter().map(|b| b.1.len()).sum::<usize>() + total > opts.max_vertices {
                    break;
                }
                probe = fresh(1.0, g, &phis_of(&built[built.len() - 1].1)).0;
            }
            levels = built.iter().map(|b| b.0).collect();
        }
        let mut next_carried = Vec::with_capacity(built.len());
        for (u, samples, lost) in built {
            if lost && !truncated {
                truncated = true;
                truncation = Some(format!("left the bounding box in generation {g}"));
            }
            if total + samples.len() > opts.max_vertices {
                truncated = true;
                truncation = Some(format!("vertex limit reached in generation {g}"));
                break 'growth;
            }
            let (order, ring_psi) = sorted_by_psi(g, &samples);
            let start = vertices.len();
            for &i in &order {
                vertices.push(samples[i].x);
                generation.push(g);
                seed_angle.push(samples[i].phi);
            }
            let ring = Ring {
                start,
                len: samples.len(),
                generation: g,
                iterates: g * k,
                seed_radius: radius_of(u),
            };
            match rings.last() {
                None => fan(&mut triangles, &vertices, &ring, opts.refine),
                Some(prev) => zipper(
                    &mut triangles,
                    &vertices,
                    prev,
                    &ring_psi_last,
                    &ring,
                    &ring_psi,
                    opts.refine,
                    max_edge,
                ),
            }
            total += samples.len();
            rings.push(ring);
            ring_psi_last = ring_psi;
            next_carried.push(samples);
        }
        if next_carried.iter().all(|s| s.is_empty()) {
            break;
        }
        carried = next_carried;
    }

    Ok(ManifoldMesh {
        kind,
        fixed_point: fp.clone(),
        vertices,
        triangles,
        generation,
        seed_angle,
        rings,
        epsilon: eps,
        refine: opts.refine,
        steps_per_generation: k,
        depth: opts.depth,
        bounding_box: bbox,
        truncated,
        truncation,
    })
}

fn ring_edge_ok(vertices: &[Vector3<f64>], a: usize, b: usize, refine: f64) -> bool {
    (vertices[a] - vertices[b]).norm() <= refine * (1.0 + 1e-12)
}

fn fan(tris: &mut Vec<[usize; 3]>, vertices: &[Vector3<f64>], ring: &Ring, refine: f64) {
    let n = ring.len;
    if n < 3 {
        return;
    }
    for i in 0..n {
        let (a, b) = (ring.start + i, ring.start + (i + 1) % n);
        if ring_edge_ok(vertices, a, b, refine) {
            tris.push([0, a, b]);
        }
    }
}

/// Triangulates the band between two rings sorted by nominal angle.
#[allow(clippy::too_many_arguments)]
fn zipper(
    tris: &mut Vec<[usize; 3]>,
    vertices: &[Vector3<f64>],
    a: &Ring,
    psi_a: &[f64],
    b: &Ring,
    psi_b: &[f64],
    refine: f64,
    max_radial: f64,
) {
    let (na, nb) = (a.len, b.len);
    if na == 0 || nb == 0 {
        return;
    }
    let ua = |t: usize| psi_a[t % na] + TAU * (t / na) as f64;
    let ub = |t: usize| psi_b[t % nb] + TAU * (t / nb) as f64;
    let va = |t: usize| a.start + t % na;
    let vb = |t: usize| b.start + t % nb;
    let radial_ok = |x: usize, y: usize| (vertices[x] - vertices[y]).norm() <= max_radial;
    let (mut i, mut j) = (0usize, 0usize);
    while i < na || j < nb {
        let advance_a = j >= nb || (i < na && ua(i + 1) <= ub(j + 1));
        if advance_a {
            let (x, y, z) = (va(i), va(i + 1), vb(j));
            if na > 1 && ring_edge_ok(vertices, x, y, refine) && radial_ok(x, z) && radial_ok(y, z) {
                tris.push([x, y, z]);
            }
            i += 1;
        } else {
            let (x, y, z) = (va(i), vb(j + 1), vb(j));
            if nb > 1 && ring_edge_ok(vertices, z, y, refine) && radial_ok(x, z) && radial_ok(x, y) {
                tris.push([x, y, z]);
            }
            j += 1;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchPoint {
    pub point: Vector3<f64>,
    /// Iterates plus the fraction of the fundamental segment.
    pub t: f64,
    pub generation: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Branch {
    /// `+1` for the side of the eigenvector, `−1` for the other.
    pub side: i8,
    pub points: Vec<BranchPoint>,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ManifoldBranches {
    pub kind: ManifoldKind,
    pub fixed_point: FixedPointReport,
    pub direction: Vector3<f64>,
    /// Eigenvalue of the growth direction (`f` or `f⁻¹`).
    pub multiplier: f64,
    pub epsilon: f64,
    pub branches: [Branch; 2],
}

impl ManifoldBranches {
    /// The point at parameter `t` on the given branch, recomputed from its seed.
    pub fn evaluate(&self, p: &GenericMapParams, side: i8, t: f64) -> Vector3<f64> {
        branch_point(p, self.kind, &self.fixed_point.location(), &self.direction, self.multiplier, self.epsilon, side, t)
    }
}

#[allow(clippy::too_many_arguments)]
fn branch_point(
    p: &GenericMapParams,
    kind: ManifoldKind,
    x0: &Vector3<f64>,
    v: &Vector3<f64>,
    lambda: f64,
    eps: f64,
    side: i8,
    t: f64,
) -> Vector3<f64> {
    let n = t.floor();
    let u = t - n;
    let n = n as usize;
    // a negative multiplier swaps sides at each iterate
    let flip = if lambda < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    let seed = x0 + v * (side as f64 * flip * eps * lambda.abs().powf(u));
    iterate(p, kind, &seed, n)
}

/// Both branches of a 1D manifold: points `f^n(x* ± ε|λ|^u v)` for
/// `t = n + u ∈ [0, depth·k]`, sampled eight per iterate and bisected in `t`
/// wherever consecutive points are further apart than `refine`.
pub fn grow_1d(
    p: &GenericMapParams,
    fp: &FixedPointReport,
    kind: ManifoldKind,
    opts: &GrowOptions,
) -> Result<ManifoldBranches> {
    opts.validate()?;
    let lin = linear_data(p, fp)?;
    let sub = lin.subspace(kind);
    if sub.dim() != 1 {
        return Err(Error::NotApplicable(format!(
            "the {kind:?} subspace is {}-dimensional",
            sub.dim()
        )));
    }
    let bbox = opts.resolve_box(p)?;
    let eps = opts.epsilon_for(fp);
    let k = opts.steps_per_generation;
    let lambda = match kind {
        ManifoldKind::Unstable => sub.action[(0, 0)],
        ManifoldKind::Stable => 1.0 / sub.action[(0, 0)],
    };
    let v = sub.basis[0];
    let x0 = lin.location;
    let n_max = (opts.depth * k) as f64;
    let eval = |side: i8, t: f64| branch_point(p, kind, &x0, &v, lambda, eps, side, t);

    let branch = |side: i8| -> Branch {
        let count = (8.0 * n_max) as usize;
        let ts: Vec<f64> = (0..=count).map(|i| i as f64 / 8.0).collect();
        let pts: Vec<Vector3<f64>> = ts.par_iter().map(|&t| eval(side, t)).collect();
        let mut samples: Vec<(f64, Vector3<f64>)> = Vec::new();
        let mut truncated = false;
        for (t, x) in ts.into_iter().zip(pts) {
            if !ok(&bbox, &x) {
                truncated = true;
                break;
            }
            samples.push((t, x));
        }
        let mut failed = vec![false; samples.len()];
        for _ in 0..MAX_PASSES {
            let mids: Vec<(usize, f64)> = samples
                .windows(2)
                .enumerate()
                .filter(|(i, w)| {
                    !failed[*i] && w[1].0 - w[0].0 > MIN_DT && (w[1].1 - w[0].1).norm() > opts.refine
                })
                .map(|(i, w)| (i, 0.5 * (w[0].0 + w[1].0)))
                .collect();
            if mids.is_empty() {
                break;
            }
            let xs: Vec<Vector3<f64>> = mids.par_iter().map(|&(_, t)| eval(side, t)).collect();
            for (&(i, t), x) in mids.iter().zip(xs) {
                if ok(&bbox, &x) {
                    samples.push((t, x));
                    failed.push(false);
                } else {
                    failed[i] = true;
                }
            }
            let mut order: Vec<usize> = (0..samples.len()).collect();
            order.sort_by(|&i, &j| samples[i].0.total_cmp(&samples[j].0));
            samples = order.iter().map(|&i| samples[i]).collect();
            failed = order.iter().map(|&i| failed[i]).collect();
        }
        Branch {
            side,
            points: samples
                .into_iter()
                .map(|(t, point)| BranchPoint {
                    point,
                    t,
                    generation: t.floor() as usize / k,
                })
                .collect(),
            truncated,
        }
    };
    Ok(ManifoldBranches {
        kind,
        fixed_point: fp.clone(),
        direction: v,
        multiplier: lambda,
        epsilon: eps,
        branches: [branch(1), branch(-1)],
    })
}
