//! Quadratic shears of R³ in the `(v, P)` representation
//! `S(x) = x + ½(xᵀPx)v` with `Pv = 0`.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polymap::QuadMap;
use crate::DEFAULT_TOL;

/// Relative tolerance for the proportionality `A_i = v_i P`.
pub const PROPORTIONALITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct ShearData {
    pub v: Vector3<f64>,
    pub p: Matrix3<f64>,
}

impl ShearData {
    /// Checks symmetry of `P` and `Pv = 0` (relative to `‖P‖‖v‖`).
    pub fn new(v: Vector3<f64>, p: Matrix3<f64>, tol: f64) -> Result<Self> {
        if v.iter().chain(p.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite shear data".into()));
        }
        let p = (p + p.transpose()) * 0.5;
        let scale = (p.amax() * v.amax()).max(1.0);
        let pv = (p * v).amax();
        if pv > tol * scale {
            return Err(Error::NotAShear(format!("|Pv| = {pv:e}")));
        }
        Ok(ShearData { v, p })
    }

    /// `‖v‖ = 1`, first nonzero component of `v` positive, magnitude moved into `P`.
    pub fn normalized(&self) -> Self {
        let n = self.v.norm();
        if n == 0.0 {
            return self.clone();
        }
        let sign = self
            .v
            .iter()
            .find(|c| c.abs() > 1e-14 * n)
            .map(|c| c.signum())
            .unwrap_or(1.0);
        let s = sign * n;
        ShearData {
            v: self.v / s,
            p: self.p * s,
        }
    }

    pub fn to_file(&self) -> ShearFile {
        ShearFile {
            v: self.v.iter().copied().collect(),
            p: (0..3).map(|i| (0..3).map(|j| self.p[(i, j)]).collect()).collect(),
        }
    }

    pub fn from_file(f: &ShearFile, tol: f64) -> Result<Self> {
        if f.v.len() != 3 || f.p.len() != 3 || f.p.iter().any(|r| r.len() != 3) {
            return Err(Error::InvalidInput("shear data must be 3-dimensional".into()));
        }
        let v = Vector3::from_iterator(f.v.iter().copied());
        let p = Matrix3::from_fn(|i, j| f.p[i][j]);
        Self::new(v, p, tol)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShearFile {
    pub v: Vec<f64>,
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Extraction {
    Shear(ShearData),
    /// The quadratic part vanishes.
    Affine,
    NotAShear { reason: String, residual: f64 },
}

impl Extraction {
    pub fn shear(self) -> Option<ShearData> {
        match self {
            Extraction::Shear(d) => Some(d),
            _ => None,
        }
    }
}

fn to_dm(m: &Matrix3<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |i, j| m[(i, j)])
}

/// `x + ½(xᵀPx)v`.
pub fn build_shear(data: &ShearData) -> QuadMap {
    power(data, 1)
}

/// `x + (k/2)(xᵀPx)v`, the k-th iterate.
pub fn power(data: &ShearData, k: i64) -> QuadMap {
    let p = to_dm(&data.p);
    let quad = (0..3).map(|i| &p * (k as f64 * data.v[i])).collect();
    QuadMap::standard(quad).expect("3×3 data")
}

const PROBES: [[f64; 3]; 10] = [
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [1.0, 1.0, 0.0],
    [1.0, 0.0, 1.0],
    [0.0, 1.0, 1.0],
    [1.0, -1.0, 0.0],
    [1.0, 0.0, -1.0],
    [0.0, 1.0, -1.0],
    [1.0, 1.0, 1.0],
];

/// Recovers `(v, P)` from a standard-form map of R³, using the default
/// zero tolerance.
pub fn extract_shear(map: &QuadMap) -> Result<Extraction> {
    extract_shear_tol(map, DEFAULT_TOL)
}

pub fn extract_shear_tol(map: &QuadMap, tol: f64) -> Result<Extraction> {
    if map.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: map.dim(),
        });
    }
    if !map.is_standard_form(tol) {
        return Err(Error::InvalidInput("shear extraction needs a map in standard form".into()));
    }
    let quad = map.quad();
    let norms: Vec<f64> = quad.iter().map(|a| a.amax()).collect();
    let (pivot, &amax) = norms
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("three matrices");
    if amax <= tol {
        return Ok(Extraction::Affine);
    }

    let mut dir = None;
    for probe in PROBES {
        let q = map.quadratic_part(&DVector::from_row_slice(&probe));
        if q.amax() > tol * amax {
            dir = Some(Vector3::new(q[0], q[1], q[2]));
            break;
        }
    }
    let Some(dir) = dir else {
        // xᵀA_i x vanishes on all probes but A_i ≠ 0
        return Ok(Extraction::NotAShear {
            reason: "quadratic part vanishes on every probe point".into(),
            residual: amax,
        });
    };
    let v = dir / dir.norm();
    if v[pivot].abs() < PROPORTIONALITY_TOL {
        return Ok(Extraction::NotAShear {
            reason: "probe direction is orthogonal to the pivot component".into(),
            residual: amax,
        });
    }
    let a_p = &quad[pivot];
    let p = Matrix3::from_fn(|i, j| a_p[(i, j)] / v[pivot]);
    let mut prop: f64 = 0.0;
    for (i, a) in quad.iter().enumerate() {
        let d = Matrix3::from_fn(|r, c| a[(r, c)] - v[i] * p[(r, c)]);
        prop = prop.max(d.amax());
    }
    if prop > PROPORTIONALITY_TOL * amax {
        return Ok(Extraction::NotAShear {
            reason: "quadratic matrices are not proportional".into(),
            residual: prop / amax,
        });
    }
    let pv = (p * v).amax();
    if pv > tol.max(PROPORTIONALITY_TOL * p.amax()) {
        return Ok(Extraction::NotAShear {
            reason: "Pv != 0".into(),
            residual: pv,
        });
    }
    Ok(Extraction::Shear(ShearData { v, p }.normalized()))
}
