//! Heteroclinic points on `Fix(h)` located by a sign search and double-double
//! bisection.

use std::ops::{Add, Mul, Sub};

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use super::eigenvector;
use crate::dynamics::{fixed_points, Classification, FixedPointReport, GenericMapParams, Reversor};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeteroclinicOptions {
    /// Uniform samples of the bracket.
    pub samples: usize,
    /// Iterates allowed for an orbit to approach its limit.
    pub step_budget: usize,
    /// Radius of the ball around the type A point used to read off the side
    /// an orbit leaves on; `0.2 |x₊ − x₋|` when absent.
    pub ball_radius: Option<f64>,
    /// Required closeness of the forward and backward limits.
    pub distance_tol: f64,
}

impl Default for HeteroclinicOptions {
    fn default() -> Self {
        HeteroclinicOptions {
            samples: 20_000,
            step_budget: 3000,
            ball_radius: None,
            distance_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeteroclinicPoint {
    pub point: Vector3<f64>,
    /// `s` in `(s, −η/2, −η − s)`.
    pub parameter: f64,
    /// Fixed point approached under `f` (type A, two-dimensional stable manifold).
    pub forward_limit: Vector3<f64>,
    pub backward_limit: Vector3<f64>,
    pub forward_distance: f64,
    pub backward_distance: f64,
    pub forward_steps: usize,
    pub backward_steps: usize,
    /// Unit normal to the stable manifold at the point.
    pub normal: Vector3<f64>,
    /// `n̂ × Dh n̂`, the tangent of the heteroclinic curve through the point.
    pub tangent: Vector3<f64>,
}

trait Real: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    fn of(x: f64) -> Self;
    fn lo(self) -> f64;
}

impl Real for f64 {
    fn of(x: f64) -> Self {
        x
    }
    fn lo(self) -> f64 {
        self
    }
}

impl Real for TwoFloat {
    fn of(x: f64) -> Self {
        TwoFloat::from(x)
    }
    fn lo(self) -> f64 {
        self.hi()
    }
}

struct Family<T> {
    alpha: T,
    tau: T,
    sigma: T,
    a: T,
    b: T,
    c: T,
}

impl<T: Real> Family<T> {
    fn new(p: &GenericMapParams) -> Self {
        Family {
            alpha: T::of(p.alpha),
            tau: T::of(p.tau),
            sigma: T::of(p.sigma),
            a: T::of(p.quad.a),
            b: T::of(p.quad.b),
            c: T::of(p.quad.c),
        }
    }

    fn q(&self, x: T, y: T) -> T {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    fn forward(&self, v: [T; 3]) -> [T; 3] {
        let [x, y, z] = v;
        [self.alpha + self.tau * x - self.sigma * y + z + self.q(x, y), x, y]
    }

    fn backward(&self, v: [T; 3]) -> [T; 3] {
        let [x, y, z] = v;
        [y, z, x - self.alpha - self.tau * y + self.sigma * z - self.q(y, z)]
    }
}

fn to_f64<T: Real>(v: [T; 3]) -> Vector3<f64> {
    Vector3::new(v[0].lo(), v[1].lo(), v[2].lo())
}

struct Setup {
    target: Vector3<f64>,
    other: Vector3<f64>,
    left_unstable: Vector3<f64>,
    ball: f64,
    escape: f64,
}

/// Side (`±1`) of the unstable direction on which the orbit of the `Fix(h)`
/// point with parameter `s` leaves the ball around the target, or `None` when
/// it never enters, never leaves, or escapes.
fn exit_side<T: Real>(fam: &Family<T>, r: &Reversor, setup: &Setup, s: T, budget: usize) -> Option<i8> {
    let eta = T::of(r.eta);
    let mut v = [s, T::of(-0.5) * eta, T::of(0.0) - eta - s];
    let mut inside = false;
    for _ in 0..budget {
        v = fam.forward(v);
        let x = to_f64(v);
        if !(x.amax() < setup.escape) {
            return None;
        }
        let d = x - setup.target;
        if d.norm() < setup.ball {
            inside = true;
        } else if inside {
            // the offset is small here, so its sign is exact enough in f64
            let t = setup.target;
            let w = [v[0] - T::of(t[0]), v[1] - T::of(t[1]), v[2] - T::of(t[2])];
            let l = setup.left_unstable;
            let proj = (w[0] * T::of(l[0]) + w[1] * T::of(l[1]) + w[2] * T::of(l[2])).lo();
            return Some(if proj > 0.0 { 1 } else { -1 });
        }
    }
    None
}

fn closest<T: Real>(
    fam: &Family<T>,
    start: [T; 3],
    target: &Vector3<f64>,
    budget: usize,
    forward: bool,
) -> (f64, usize, Vec<Vector3<f64>>) {
    let mut v = start;
    let mut best = ((to_f64(v) - target).norm(), 0);
    let mut orbit = vec![to_f64(v)];
    for n in 1..=budget {
        v = if forward { fam.forward(v) } else { fam.backward(v) };
        let x = to_f64(v);
        if !x.iter().all(|c| c.is_finite()) {
            break;
        }
        orbit.push(x);
        let d = (x - target).norm();
        if d < best.0 {
            best = (d, n);
        }
    }
    orbit.truncate(best.1 + 1);
    (best.0, best.1, orbit)
}

/// Normal to the stable manifold at `orbit[0]`: the left unstable
/// eigenvector pulled back along the orbit.
pub fn stable_normal(p: &GenericMapParams, orbit: &[Vector3<f64>], left_unstable: &Vector3<f64>) -> Vector3<f64> {
    let mut n = *left_unstable;
    for x in orbit.iter().rev().skip(1) {
        n = p.jacobian(x).transpose() * n;
        n /= n.norm();
    }
    n
}

/// Left eigenvector of `Df` for the unstable eigenvalue of a type A point.
pub(crate) fn left_unstable(p: &GenericMapParams, fa: &FixedPointReport) -> Option<Vector3<f64>> {
    let lam = fa.eigenvalues.iter().find(|l| l.norm() > 1.0 && l.im == 0.0)?;
    let l = eigenvector(&p.jacobian(&fa.location()).transpose(), *lam);
    Some(Vector3::new(l[0].re, l[1].re, l[2].re).normalize())
}

/// Tangent `n̂ × Dh n̂` that a heteroclinic curve through a point near
/// `Fix(h)` should have, with `n̂` the normal to the stable manifold of the
/// type A point obtained by following the orbit of `x` to its closest
/// approach within `budget` steps and pulling the unstable covector back.
pub fn symmetric_tangent(
    p: &GenericMapParams,
    r: &Reversor,
    x: &Vector3<f64>,
    budget: usize,
) -> Result<Vector3<f64>> {
    let (fa, _) = type_a_and_b(p)?;
    let l = left_unstable(p, &fa)
        .ok_or_else(|| Error::NotApplicable("type A point has no real unstable eigenvalue".into()))?;
    let fam = Family::<f64>::new(p);
    let (_, _, orbit) = closest(&fam, [x[0], x[1], x[2]], &fa.location(), budget, true);
    let n = stable_normal(p, &orbit, &l);
    Ok(n.cross(&(r.jacobian() * n)).normalize())
}

fn type_a_and_b(p: &GenericMapParams) -> Result<(FixedPointReport, FixedPointReport)> {
    let fps = fixed_points(p)?;
    let a = fps.iter().find(|f| f.classification == Classification::TypeA);
    let b = fps.iter().find(|f| f.classification == Classification::TypeB);
    match (a, b) {
        (Some(a), Some(b)) => Ok((a.clone(), b.clone())),
        _ => Err(Error::NotApplicable(
            "needs two hyperbolic fixed points of opposite type".into(),
        )),
    }
}

/// Points of `Fix(h) ∩ W^s(x_A)` with parameter in `bracket`, `x_A` being the
/// type A fixed point. Sign changes of the exit side are bisected in
/// double-double arithmetic; a root is kept when its forward orbit comes
/// within `distance_tol` of `x_A` and its backward orbit within `distance_tol`
/// of the other fixed point.
pub fn heteroclinic_from_symmetry(
    p: &GenericMapParams,
    r: &Reversor,
    bracket: (f64, f64),
    opts: &HeteroclinicOptions,
) -> Result<Vec<HeteroclinicPoint>> {
    if !(bracket.1 > bracket.0) || opts.samples < 2 {
        return Err(Error::InvalidInput("empty bracket".into()));
    }
    let (fa, fb) = type_a_and_b(p)?;
    let (target, other) = (fa.location(), fb.location());
    let left_unstable = left_unstable(p, &fa).expect("type A has a real unstable eigenvalue");
    let setup = Setup {
        target,
        other,
        left_unstable,
        ball: opts.ball_radius.unwrap_or(0.2 * (target - other).norm()),
        escape: 1e6 * (1.0 + target.amax().max(other.amax())),
    };
    let f64fam = Family::<f64>::new(p);
    let ddfam = Family::<TwoFloat>::new(p);
    let grid: Vec<f64> = (0..opts.samples)
        .map(|i| bracket.0 + (bracket.1 - bracket.0) * i as f64 / (opts.samples - 1) as f64)
        .collect();
    let sides: Vec<Option<i8>> = grid
        .par_iter()
        .map(|&s| exit_side(&f64fam, r, &setup, s, opts.step_budget))
        .collect();
    let brackets: Vec<(f64, f64, i8)> = (0..grid.len() - 1)
        .filter_map(|i| match (sides[i], sides[i + 1]) {
            (Some(x), Some(y)) if x != y => Some((grid[i], grid[i + 1], x)),
            _ => None,
        })
        .collect();
    let dh = r.jacobian();
    let mut found: Vec<HeteroclinicPoint> = brackets
        .par_iter()
        .filter_map(|&(lo, hi, side_lo)| {
            let (mut lo, mut hi) = (TwoFloat::from(lo), TwoFloat::from(hi));
            for _ in 0..110 {
                let mid = lo + (hi - lo) * TwoFloat::from(0.5);
                match exit_side(&ddfam, r, &setup, mid, opts.step_budget) {
                    Some(sd) if sd == side_lo => lo = mid,
                    Some(_) => hi = mid,
                    None => {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                }
                if (hi - lo).hi() <= 1e-31 * (1.0 + lo.hi().abs()) {
                    break;
                }
            }
            let s = lo + (hi - lo) * TwoFloat::from(0.5);
            let eta = TwoFloat::from(r.eta);
            let start = [s, TwoFloat::from(-0.5) * eta, TwoFloat::from(0.0) - eta - s];
            let (fd, fs, orbit) = closest(&ddfam, start, &setup.target, opts.step_budget, true);
            let (bd, bs, _) = closest(&ddfam, start, &setup.other, opts.step_budget, false);
            if fd > opts.distance_tol || bd > opts.distance_tol {
                return None;
            }
            let normal = stable_normal(p, &orbit, &setup.left_unstable);
            let tangent = normal.cross(&(dh * normal)).normalize();
            Some(HeteroclinicPoint {
                point: to_f64(start),
                parameter: s.hi(),
                forward_limit: setup.target,
                backward_limit: setup.other,
                forward_distance: fd,
                backward_distance: bd,
                forward_steps: fs,
                backward_steps: bs,
                normal,
                tangent,
            })
        })
        .collect();
    found.sort_by(|a, b| a.parameter.total_cmp(&b.parameter));
    found.dedup_by(|a, b| (a.parameter - b.parameter).abs() <= 1e-9 * (1.0 + b.parameter.abs()));
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::reversor_for;

    #[test]
    fn double_double_map_agrees() {
        let p = GenericMapParams::new(0.1, -0.3, 0.2, 0.5, 0.1, 0.4);
        let fam = Family::<TwoFloat>::new(&p);
        let x = Vector3::new(0.3, -0.2, 0.7);
        let v = fam.forward([TwoFloat::from(x[0]), TwoFloat::from(x[1]), TwoFloat::from(x[2])]);
        assert!((to_f64(v) - p.apply(&x)).amax() < 1e-15);
        let w = fam.backward(v);
        assert!((to_f64(w) - x).amax() < 1e-15);
    }

    #[test]
    fn needs_opposite_types() {
        let p = GenericMapParams::new(0.0625, 0.5, 0.0, 0.5, 0.0, 0.5);
        let r = reversor_for(&p, 1e-12).unwrap();
        assert!(heteroclinic_from_symmetry(&p, &r, (-1.0, 1.0), &HeteroclinicOptions::default()).is_err());
    }

    #[test]
    fn example_points_are_symmetric() {
        let p = GenericMapParams::manifold_example();
        let r = reversor_for(&p, 1e-12).unwrap();
        let pts = heteroclinic_from_symmetry(&p, &r, (-0.2, 0.45), &HeteroclinicOptions::default()).unwrap();
        assert!(pts.len() >= 2);
        for h in &pts {
            assert!((r.apply(&h.point) - h.point).amax() < 1e-12);
            assert!(h.forward_distance < 1e-6 && h.backward_distance < 1e-6);
            let t = symmetric_tangent(&p, &r, &h.point, 3000).unwrap();
            assert!(t.dot(&h.tangent).abs() > 1.0 - 1e-9);
        }
        for s0 in [-0.12360158135871481, 0.3619608514764702] {
            assert!(pts.iter().any(|h| (h.parameter - s0).abs() < 1e-9), "{s0}");
        }
    }
}
