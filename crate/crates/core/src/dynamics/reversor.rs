//! The reversor `h(x, y, z) = −(z + η, y + η, x + η)` of the `a = c` family,
//! its fixed line, symmetric periodic orbits and the degenerate period-2 line.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use super::GenericMapParams;
use crate::error::{Error, Result};
use crate::linalg::sample_points;

/// Max residual of `h∘f − f⁻¹∘h` accepted when constructing a reversor.
pub const REVERSOR_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Reversor {
    pub eta: f64,
    /// Max of `‖h(f(x)) − f⁻¹(h(x))‖` over the verification points.
    pub residual: f64,
}

impl Reversor {
    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        Vector3::new(-(p[2] + self.eta), -(p[1] + self.eta), -(p[0] + self.eta))
    }

    /// `Dh`, the negated anti-diagonal permutation.
    pub fn jacobian(&self) -> Matrix3<f64> {
        Matrix3::new(0.0, 0.0, -1.0, 0.0, -1.0, 0.0, -1.0, 0.0, 0.0)
    }

    pub fn fix_line(&self) -> FixLine {
        FixLine { eta: self.eta }
    }
}

/// `s ↦ (s, −η/2, −η − s)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FixLine {
    pub eta: f64,
}

impl FixLine {
    pub fn point(&self, s: f64) -> Vector3<f64> {
        Vector3::new(s, -0.5 * self.eta, -self.eta - s)
    }

    /// Unit direction of the line.
    pub fn direction(&self) -> Vector3<f64> {
        Vector3::new(1.0, 0.0, -1.0) / 2f64.sqrt()
    }

    /// The two defining functions `x + z + η` and `y + η/2`.
    pub fn defining(&self, p: &Vector3<f64>) -> [f64; 2] {
        [p[0] + p[2] + self.eta, p[1] + 0.5 * self.eta]
    }

    /// Parameter of the closest line point.
    pub fn project(&self, p: &Vector3<f64>) -> f64 {
        0.5 * (p[0] - p[2] - self.eta)
    }
}

pub fn fix_set(r: &Reversor) -> FixLine {
    r.fix_line()
}

/// `h` with `η = (τ − σ)/(a + b + c)` when `a = c`; the functional equation
/// is verified at 20 points before returning.
pub fn reversor_for(p: &GenericMapParams, tol: f64) -> Result<Reversor> {
    let q = &p.quad;
    let sum = q.sum();
    if sum.abs() <= tol {
        return Err(Error::NonGeneric("a + b + c = 0".into()));
    }
    if (q.a - q.c).abs() > tol * (1.0 + q.a.abs().max(q.c.abs())) {
        return Err(Error::NotReversible(format!("a = {} differs from c = {}", q.a, q.c)));
    }
    let mut r = Reversor {
        eta: (p.tau - p.sigma) / sum,
        residual: 0.0,
    };
    let mut residual: f64 = 0.0;
    for x in sample_points(20, 3, 1.0, 0x4e7e_7e75) {
        let x = Vector3::new(x[0], x[1], x[2]);
        let lhs = r.apply(&p.apply(&x));
        let rhs = p.apply_inverse(&r.apply(&x));
        let scale = 1.0 + lhs.amax();
        residual = residual.max((lhs - rhs).amax() / scale);
    }
    r.residual = residual;
    if residual > REVERSOR_TOL {
        return Err(Error::NotReversible(format!(
            "h∘f − f⁻¹∘h residual {residual:e}"
        )));
    }
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetrySet {
    /// `Fix(h)`
    Reversor,
    /// `Fix(h∘f)`: points with `f(x) = h(x)`.
    ReversorComposed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetricPoint {
    pub point: Vector3<f64>,
    pub parameter: f64,
    pub start: SymmetrySet,
    /// `‖f^period(x) − x‖`.
    pub periodic_residual: f64,
}

/// Points of `Fix(h∘f)`: `y = −x − η` and
/// `2z = −η − α − τx + σy − Q(x, y)`.
fn fix_hf_point(p: &GenericMapParams, eta: f64, s: f64) -> Vector3<f64> {
    let y = -s - eta;
    let z = 0.5 * (-eta - p.alpha - p.tau * s + p.sigma * y - p.quad.eval(s, y));
    Vector3::new(s, y, z)
}

fn fix_hf_defining(p: &GenericMapParams, eta: f64, v: &Vector3<f64>) -> [f64; 2] {
    let on = fix_hf_point(p, eta, v[0]);
    [v[1] - on[1], v[2] - on[2]]
}

const BISECT_TOL: f64 = 1e-12;
const ACCEPT_TOL: f64 = 1e-9;

/// Symmetric periodic points of the given period whose orbit meets
/// `Fix(h)` or `Fix(h∘f)` at a parameter in `bracket`.
///
/// A point `x` on one of the two lines is symmetric of period `n` when
/// `f^k(x)` lies on the appropriate line (`k = ⌊n/2⌋` or `⌈n/2⌉`). The two
/// defining functions of that line are sampled along the bracket, sign
/// changes of either are refined by bisection, and a root is kept when the
/// other function also vanishes and `f^n(x) = x` to 1e-9.
pub fn symmetric_orbit_search(
    p: &GenericMapParams,
    r: &Reversor,
    period: usize,
    bracket: (f64, f64),
    samples: usize,
) -> Result<Vec<SymmetricPoint>> {
    if period == 0 {
        return Err(Error::InvalidInput("period must be positive".into()));
    }
    if !(bracket.1 > bracket.0) || samples < 2 {
        return Err(Error::InvalidInput("empty bracket".into()));
    }
    let eta = r.eta;
    let line = r.fix_line();
    let half = (period / 2) as i64;
    let mut found: Vec<SymmetricPoint> = Vec::new();
    for start in [SymmetrySet::Reversor, SymmetrySet::ReversorComposed] {
        let start_point = |s: f64| match start {
            SymmetrySet::Reversor => line.point(s),
            SymmetrySet::ReversorComposed => fix_hf_point(p, eta, s),
        };
        // even periods return to the starting line; odd ones reach the other
        let (k, target) = match (start, period % 2) {
            (SymmetrySet::Reversor, 0) => (half, SymmetrySet::Reversor),
            (SymmetrySet::Reversor, _) => (half, SymmetrySet::ReversorComposed),
            (SymmetrySet::ReversorComposed, 0) => (half, SymmetrySet::ReversorComposed),
            (SymmetrySet::ReversorComposed, _) => (half + 1, SymmetrySet::Reversor),
        };
        let g = |s: f64| -> [f64; 2] {
            let y = p.apply_n(&start_point(s), k);
            match target {
                SymmetrySet::Reversor => line.defining(&y),
                SymmetrySet::ReversorComposed => fix_hf_defining(p, eta, &y),
            }
        };
        let grid: Vec<f64> = (0..samples)
            .map(|i| bracket.0 + (bracket.1 - bracket.0) * i as f64 / (samples - 1) as f64)
            .collect();
        let vals: Vec<[f64; 2]> = grid.iter().map(|&s| g(s)).collect();
        for comp in 0..2 {
            for w in 0..samples - 1 {
                let (g0, g1) = (vals[w][comp], vals[w + 1][comp]);
                if !(g0.is_finite() && g1.is_finite()) {
                    continue;
                }
                let root = if g0 == 0.0 {
                    grid[w]
                } else if g0.signum() == g1.signum() {
                    continue;
                } else {
                    let (mut lo, mut hi, mut flo) = (grid[w], grid[w + 1], g0);
                    while hi - lo > BISECT_TOL * (1.0 + lo.abs()) {
                        let mid = 0.5 * (lo + hi);
                        let fm = g(mid)[comp];
                        if fm == 0.0 {
                            lo = mid;
                            hi = mid;
                            break;
                        }
                        if fm.signum() == flo.signum() {
                            lo = mid;
                            flo = fm;
                        } else {
                            hi = mid;
                        }
                    }
                    0.5 * (lo + hi)
                };
                let other = g(root)[1 - comp];
                let x = start_point(root);
                let res = (p.apply_n(&x, period as i64) - x).amax();
                let scale = 1.0 + x.amax();
                if other.abs() <= ACCEPT_TOL * scale && res <= ACCEPT_TOL * scale
                    && !found.iter().any(|f| (f.point - x).amax() <= 1e-9 * scale) {
                        found.push(SymmetricPoint {
                            point: x,
                            parameter: root,
                            start,
                            periodic_residual: res,
                        });
                    }
            }
        }
    }
    Ok(found)
}

/// The lines `(x, δ − x, x)` of period-2 points when `a = c = b/2` and
/// `σ + τ + 2 = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Period2Line {
    /// Real roots of `α − (1 + σ)δ + aδ² = 0`, the relation substitution into
    /// the map gives.
    pub deltas: Vec<f64>,
    /// Real roots of `α + (1 + σ)δ + aδ² = 0`, the relation as printed.
    pub printed_deltas: Vec<f64>,
}

impl Period2Line {
    pub fn point(delta: f64, x: f64) -> Vector3<f64> {
        Vector3::new(x, delta - x, x)
    }
}

fn real_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b != 0.0 { vec![-c / b] } else { vec![] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    if disc == 0.0 {
        return vec![-b / (2.0 * a)];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let (r1, r2) = if q == 0.0 {
        let h = 0.5 * disc.sqrt() / a;
        (h, -h)
    } else {
        (q / a, c / q)
    };
    let mut v = vec![r1, r2];
    v.sort_by(|x, y| x.total_cmp(y));
    v
}

pub fn period2_line(p: &GenericMapParams, tol: f64) -> Result<Period2Line> {
    let q = &p.quad;
    if (q.a - q.c).abs() > tol || (q.b - 2.0 * q.a).abs() > tol {
        return Err(Error::NotApplicable("needs a = c = b/2".into()));
    }
    if (p.sigma + p.tau + 2.0).abs() > tol {
        return Err(Error::NotApplicable("needs σ + τ + 2 = 0".into()));
    }
    Ok(Period2Line {
        deltas: real_roots(q.a, -(1.0 + p.sigma), p.alpha),
        printed_deltas: real_roots(q.a, 1.0 + p.sigma, p.alpha),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig_parameters_are_reversible() {
        let p = GenericMapParams::manifold_example();
        let r = reversor_for(&p, 1e-12).unwrap();
        assert!((r.eta + 0.3).abs() < 1e-15);
        let x = Vector3::new(0.2, -0.4, 0.9);
        assert!((r.apply(&r.apply(&x)) - x).amax() < 1e-15);
    }

    #[test]
    fn equal_traces_give_plain_flip() {
        let p = GenericMapParams::new(0.1, 0.4, 0.4, 0.3, 0.4, 0.3);
        let r = reversor_for(&p, 1e-12).unwrap();
        assert_eq!(r.eta, 0.0);
        assert_eq!(r.apply(&Vector3::new(1.0, 2.0, 3.0)), Vector3::new(-3.0, -2.0, -1.0));
    }

    #[test]
    fn asymmetric_form_is_not_reversible() {
        let p = GenericMapParams::new(0.0, -0.3, 0.0, 0.6, 0.0, 0.4);
        assert!(matches!(reversor_for(&p, 1e-12), Err(Error::NotReversible(_))));
        let p = GenericMapParams::new(0.0, -0.3, 0.0, 0.5, -1.0, 0.5);
        assert!(matches!(reversor_for(&p, 1e-12), Err(Error::NonGeneric(_))));
    }

    #[test]
    fn fix_line_examples() {
        let l = FixLine { eta: 0.0 };
        assert_eq!(l.point(0.0), Vector3::zeros());
        let r = Reversor { eta: -0.3, residual: 0.0 };
        let x = r.fix_line().point(1.0);
        assert!((x - Vector3::new(1.0, 0.15, -0.7)).amax() < 1e-15);
        assert!((r.apply(&x) - x).amax() < 1e-15);
    }

    #[test]
    fn period_two_relation() {
        let p = GenericMapParams::new(0.0, -2.0, 0.0, 0.25, 0.5, 0.25);
        let l = period2_line(&p, 1e-12).unwrap();
        assert_eq!(l.deltas, vec![0.0, 4.0]);
        assert_eq!(l.printed_deltas, vec![-4.0, 0.0]);
        let x = Period2Line::point(0.0, 1.0);
        assert_eq!(x, Vector3::new(1.0, -1.0, 1.0));
        assert_eq!(p.apply(&x), Vector3::new(-1.0, 1.0, -1.0));
        assert_eq!(p.apply(&p.apply(&x)), x);

        // α = 1 makes δ = 2 a double root
        let p = GenericMapParams::new(1.0, -2.0, 0.0, 0.25, 0.5, 0.25);
        assert_eq!(period2_line(&p, 1e-12).unwrap().deltas, vec![2.0]);

        let p = GenericMapParams::new(0.0, -2.0, 0.0, 0.25, 0.4, 0.35);
        assert!(matches!(period2_line(&p, 1e-12), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn symmetric_search_finds_degenerate_point() {
        // x² − 2x + 1: the fixed points merge at (1, 1, 1) = (−η/2, −η/2, −η/2)
        let p = GenericMapParams::new(1.0, -2.0, 0.0, 0.25, 0.5, 0.25);
        let r = reversor_for(&p, 1e-12).unwrap();
        for period in [1, 2] {
            let hits = symmetric_orbit_search(&p, &r, period, (-3.0, 3.0), 10_000).unwrap();
            assert!(hits
                .iter()
                .any(|h| (h.point - Vector3::from_element(1.0)).amax() < 1e-6));
        }
        let hits = symmetric_orbit_search(
            &GenericMapParams::manifold_example(),
            &reversor_for(&GenericMapParams::manifold_example(), 1e-12).unwrap(),
            1,
            (50.0, 60.0),
            1000,
        )
        .unwrap();
        assert!(hits.is_empty());
    }
}
