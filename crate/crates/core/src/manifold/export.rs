//! Mesh and polyline export, and vertex-cloud comparison.

use std::fmt::Write as _;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::Serialize;

use super::{BoundingBox, HeteroclinicCurve, ManifoldKind, ManifoldMesh};
use crate::dynamics::{FixedPointReport, GenericMapParams};

impl ManifoldMesh {
    /// Wavefront text: `v x y z` lines followed by 1-based `f a b c` lines.
    pub fn to_obj(&self, comments: &[String]) -> String {
        let mut s = String::new();
        for c in comments {
            let _ = writeln!(s, "# {c}");
        }
        for v in &self.vertices {
            let _ = writeln!(s, "v {:.16e} {:.16e} {:.16e}", v[0], v[1], v[2]);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1);
        }
        s
    }

    pub fn sidecar(&self, params: &GenericMapParams) -> MeshSidecar {
        MeshSidecar {
            kind: self.kind,
            fixed_point: self.fixed_point.clone(),
            params: *params,
            vertex_count: self.vertices.len(),
            triangle_count: self.triangles.len(),
            generation: self.generation.clone(),
            epsilon: self.epsilon,
            refine: self.refine,
            steps_per_generation: self.steps_per_generation,
            depth: self.depth,
            bounding_box: self.bounding_box,
            truncated: self.truncated,
            truncation: self.truncation.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeshSidecar {
    pub kind: ManifoldKind,
    pub fixed_point: FixedPointReport,
    pub params: GenericMapParams,
    pub vertex_count: usize,
    pub triangle_count: usize,
    pub generation: Vec<usize>,
    pub epsilon: f64,
    pub refine: f64,
    pub steps_per_generation: usize,
    pub depth: usize,
    pub bounding_box: BoundingBox,
    pub truncated: bool,
    pub truncation: Option<String>,
}

/// `curve_id,x,y,z` rows.
pub fn polylines_csv(curves: &[HeteroclinicCurve]) -> String {
    let mut s = String::from("curve_id,x,y,z\n");
    for (i, c) in curves.iter().enumerate() {
        for p in &c.polyline {
            let _ = writeln!(s, "{i},{:.16e},{:.16e},{:.16e}", p[0], p[1], p[2]);
        }
    }
    s
}

fn one_sided(a: &[Vector3<f64>], b: &[Vector3<f64>]) -> f64 {
    // sort b by x for a sweep
    let mut sorted: Vec<Vector3<f64>> = b.to_vec();
    sorted.sort_by(|p, q| p[0].total_cmp(&q[0]));
    let xs: Vec<f64> = sorted.iter().map(|p| p[0]).collect();
    a.par_iter()
        .map(|p| {
            let mut best = f64::INFINITY;
            let i = xs.partition_point(|&x| x < p[0]);
            let mut lo = i;
            let mut hi = i;
            loop {
                let mut moved = false;
                if hi < xs.len() && xs[hi] - p[0] < best {
                    best = best.min((sorted[hi] - p).norm());
                    hi += 1;
                    moved = true;
                }
                if lo > 0 && p[0] - xs[lo - 1] < best {
                    best = best.min((sorted[lo - 1] - p).norm());
                    lo -= 1;
                    moved = true;
                }
                if !moved {
                    break;
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// Symmetric Hausdorff distance between two point clouds.
pub fn hausdorff_distance(a: &[Vector3<f64>], b: &[Vector3<f64>]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { f64::INFINITY };
    }
    one_sided(a, b).max(one_sided(b, a))
}
