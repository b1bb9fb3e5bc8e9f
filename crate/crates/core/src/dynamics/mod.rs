//! Dynamics of the family
//! `f(x, y, z) = (α + τx − σy + z + Q(x, y), x, y)`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::normalform::{NormalFormParams, QuadraticForm2};
use crate::polymap::QuadMap;

pub mod cubic;
pub mod diagram;
pub mod orbit;
pub mod periodic;
pub mod reversor;

pub use cubic::{classify_stability, Classification, StabilityReport};
pub use diagram::{stability_diagram, DiagramCell, GridSpec, Plane, StabilityDiagram};
pub use orbit::{
    asymptotic_direction, escape_bound, iterate, AsymptoticDirection, Direction, OrbitRecord,
    Verdict,
};
pub use periodic::{periodic_count_bound, PeriodicBound};
pub use reversor::{
    fix_set, period2_line, reversor_for, symmetric_orbit_search, FixLine, Period2Line, Reversor,
    SymmetricPoint,
};

/// Tolerance for `a + b + c = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GenericMapParams {
    pub alpha: f64,
    pub tau: f64,
    pub sigma: f64,
    pub quad: QuadraticForm2,
}

impl GenericMapParams {
    pub fn new(alpha: f64, tau: f64, sigma: f64, a: f64, b: f64, c: f64) -> Self {
        GenericMapParams {
            alpha,
            tau,
            sigma,
            quad: QuadraticForm2::new(a, b, c),
        }
    }

    /// `a = c = 0.5`, `b = 0`, `α = 0`, `τ = −0.3`, `σ = 0`.
    pub fn manifold_example() -> Self {
        Self::new(0.0, -0.3, 0.0, 0.5, 0.0, 0.5)
    }

    pub fn from_normal_form(p: &NormalFormParams) -> Result<Self> {
        match *p {
            NormalFormParams::CaseI {
                alpha,
                tau,
                sigma,
                quad,
            } => Ok(GenericMapParams {
                alpha,
                tau,
                sigma,
                quad,
            }),
            _ => Err(Error::NotApplicable("dynamics needs a case I normal form".into())),
        }
    }

    pub fn is_normalized(&self) -> bool {
        (self.quad.sum() - 1.0).abs() <= NORMALIZATION_TOL
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        let (x, y, z) = (p[0], p[1], p[2]);
        Vector3::new(
            self.alpha + self.tau * x - self.sigma * y + z + self.quad.eval(x, y),
            x,
            y,
        )
    }

    pub fn apply_inverse(&self, p: &Vector3<f64>) -> Vector3<f64> {
        let (x, y, z) = (p[0], p[1], p[2]);
        Vector3::new(
            y,
            z,
            x - self.alpha - self.tau * y + self.sigma * z - self.quad.eval(y, z),
        )
    }

    /// `f^n` for `n ≥ 0`, `f^{-n}` for `n < 0`.
    pub fn apply_n(&self, p: &Vector3<f64>, n: i64) -> Vector3<f64> {
        let mut q = *p;
        for _ in 0..n.unsigned_abs() {
            q = if n >= 0 {
                self.apply(&q)
            } else {
                self.apply_inverse(&q)
            };
        }
        q
    }

    pub fn jacobian(&self, p: &Vector3<f64>) -> Matrix3<f64> {
        let q = &self.quad;
        let (x, y) = (p[0], p[1]);
        Matrix3::new(
            self.tau + 2.0 * q.a * x + q.b * y,
            -self.sigma + q.b * x + 2.0 * q.c * y,
            1.0,
            1.0,
            0.0,
            0.0,
            0.0,
            1.0,
            0.0,
        )
    }

    pub fn to_quad_map(&self) -> QuadMap {
        NormalFormParams::CaseI {
            alpha: self.alpha,
            tau: self.tau,
            sigma: self.sigma,
            quad: self.quad,
        }
        .to_quad_map()
    }

    /// `(τ − σ)² − 4α`.
    pub fn discriminant(&self) -> f64 {
        let d = self.tau - self.sigma;
        d * d - 4.0 * self.alpha
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Plus,
    Minus,
    /// Zero discriminant: the two points coincide.
    Double,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPointReport {
    pub which: Which,
    /// The common coordinate `x*` of `(x*, x*, x*)`.
    pub coordinate: f64,
    pub t: f64,
    pub s: f64,
    pub eigenvalues: [Complex64; 3],
    pub classification: Classification,
}

impl FixedPointReport {
    pub fn location(&self) -> Vector3<f64> {
        Vector3::from_element(self.coordinate)
    }
}

/// The fixed points `(x±, x±, x±)` with `x± = ½(σ − τ ± √((τ−σ)² − 4α))`.
pub fn fixed_points(p: &GenericMapParams) -> Result<Vec<FixedPointReport>> {
    if !p.is_normalized() {
        return Err(Error::NotNormalized(p.quad.sum()));
    }
    let disc = p.discriminant();
    let bq = p.tau - p.sigma;
    let roots: Vec<(Which, f64)> = if disc < 0.0 {
        vec![]
    } else if disc == 0.0 {
        vec![(Which::Double, -0.5 * bq)]
    } else {
        // x² + (τ−σ)x + α = 0, without cancellation
        let sq = disc.sqrt();
        let q = -0.5 * (bq + bq.signum() * sq);
        let (r1, r2) = if q == 0.0 {
            (0.5 * sq, -0.5 * sq)
        } else {
            (q, p.alpha / q)
        };
        let (plus, minus) = if r1 > r2 { (r1, r2) } else { (r2, r1) };
        vec![(Which::Plus, plus), (Which::Minus, minus)]
    };
    Ok(roots
        .into_iter()
        .map(|(which, x)| {
            let q = &p.quad;
            let t = p.tau + (2.0 * q.a + q.b) * x;
            let s = p.sigma - (2.0 * q.c + q.b) * x;
            let rep = classify_stability(t, s);
            FixedPointReport {
                which,
                coordinate: x,
                t,
                s,
                eigenvalues: rep.eigenvalues,
                classification: rep.classification,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_examples() {
        let p = GenericMapParams::new(-1.0, 0.0, 0.0, 0.5, 0.0, 0.5);
        let fp = fixed_points(&p).unwrap();
        assert_eq!(fp.len(), 2);
        assert_eq!(fp[0].coordinate, 1.0);
        assert_eq!(fp[1].coordinate, -1.0);

        let p = GenericMapParams::new(0.0, 1.0, 0.0, 0.5, 0.0, 0.5);
        let fp = fixed_points(&p).unwrap();
        assert_eq!(fp[0].coordinate, 0.0);
        assert_eq!(fp[1].coordinate, -1.0);

        let p = GenericMapParams::new(0.25, 1.0, 0.0, 0.5, 0.0, 0.5);
        let fp = fixed_points(&p).unwrap();
        assert_eq!(fp.len(), 1);
        assert_eq!(fp[0].which, Which::Double);
        assert_eq!(fp[0].coordinate, -0.5);

        let p = GenericMapParams::new(1.0, 0.0, 0.0, 0.5, 0.0, 0.5);
        assert!(fixed_points(&p).unwrap().is_empty());

        let p = GenericMapParams::new(0.0, 0.0, 0.0, 1.0, 0.0, 1.0);
        assert!(matches!(fixed_points(&p), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn inverse_inverts() {
        let p = GenericMapParams::new(0.3, -0.7, 0.2, 0.6, -0.1, 0.5);
        let x = Vector3::new(0.4, -1.3, 2.0);
        assert!((p.apply_inverse(&p.apply(&x)) - x).amax() < 1e-15);
        assert!((p.apply(&p.apply_inverse(&x)) - x).amax() < 1e-15);
    }

    #[test]
    fn jacobian_matches_quad_map() {
        let p = GenericMapParams::new(0.3, -0.7, 0.2, 0.6, -0.1, 0.5);
        let x = Vector3::new(0.4, -1.3, 2.0);
        let dx = nalgebra::DVector::from_column_slice(x.as_slice());
        let j = p.to_quad_map().jacobian(&dx);
        for i in 0..3 {
            for k in 0..3 {
                assert!((j[(i, k)] - p.jacobian(&x)[(i, k)]).abs() < 1e-15);
            }
        }
    }
}
