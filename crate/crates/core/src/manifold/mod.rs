//! Stable and unstable manifolds of the fixed points of the generic family,
//! their intersections, and heteroclinic points found by symmetry.

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{escape_bound, FixedPointReport, GenericMapParams, Reversor};
use crate::error::{Error, Result};

mod export;
mod grow;
mod hetero;
mod intersect;

pub use export::{hausdorff_distance, polylines_csv, MeshSidecar};
pub use grow::{grow_1d, grow_2d, Branch, BranchPoint, GrowOptions, ManifoldBranches, ManifoldMesh};
pub use hetero::{
    heteroclinic_from_symmetry, stable_normal, symmetric_tangent, HeteroclinicOptions, HeteroclinicPoint,
};
pub use intersect::{intersect_meshes, Endpoint, FixCrossing, HeteroclinicCurve};

/// Distance to the unit circle below which an eigenvalue is not hyperbolic.
pub const HYPERBOLIC_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifoldKind {
    Stable,
    Unstable,
}

/// A real invariant subspace of `Df` at a fixed point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Subspace {
    pub eigenvalues: Vec<Complex64>,
    /// For a complex pair: real and imaginary parts of an eigenvector with
    /// `‖Re v‖² + ‖Im v‖² = 1`; otherwise orthonormal.
    pub basis: Vec<Vector3<f64>>,
    /// `Df` restricted to the subspace, in `basis` coordinates.
    pub action: DMatrix<f64>,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Distance from `v − origin` to the subspace.
    pub fn distance(&self, origin: &Vector3<f64>, v: &Vector3<f64>) -> f64 {
        let d = v - origin;
        let e = basis_matrix(&self.basis);
        let g = e.transpose() * &e;
        let rhs = e.transpose() * nalgebra::DVector::from_column_slice(d.as_slice());
        let c = g.lu().solve(&rhs).unwrap_or_else(|| rhs.clone());
        let proj = &e * c;
        (nalgebra::DVector::from_column_slice(d.as_slice()) - proj).norm()
    }
}

fn basis_matrix(basis: &[Vector3<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(3, basis.len(), |i, j| basis[j][i])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearData {
    pub fixed_point: FixedPointReport,
    pub location: Vector3<f64>,
    pub jacobian: Matrix3<f64>,
    pub stable: Subspace,
    pub unstable: Subspace,
}

impl LinearData {
    pub fn subspace(&self, kind: ManifoldKind) -> &Subspace {
        match kind {
            ManifoldKind::Stable => &self.stable,
            ManifoldKind::Unstable => &self.unstable,
        }
    }
}

fn cross_c(a: &[Complex64; 3], b: &[Complex64; 3]) -> [Complex64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Null vector of `m − λI` from the largest cross product of two rows.
pub(crate) fn eigenvector(m: &Matrix3<f64>, lambda: Complex64) -> [Complex64; 3] {
    let rows: Vec<[Complex64; 3]> = (0..3)
        .map(|i| {
            let mut r = [Complex64::new(0.0, 0.0); 3];
            for (j, rj) in r.iter_mut().enumerate() {
                *rj = Complex64::new(m[(i, j)], 0.0);
                if i == j {
                    *rj -= lambda;
                }
            }
            r
        })
        .collect();
    let mut best = [Complex64::new(0.0, 0.0); 3];
    let mut best_norm = -1.0;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let c = cross_c(&rows[i], &rows[j]);
        let n: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        if n > best_norm {
            best_norm = n;
            best = c;
        }
    }
    let n = best_norm.sqrt();
    best.map(|z| z / n)
}

fn canonical_sign(v: Vector3<f64>) -> Vector3<f64> {
    match v.iter().find(|x| x.abs() > 1e-14) {
        Some(x) if *x < 0.0 => -v,
        _ => v,
    }
}

fn subspace_of(jac: &Matrix3<f64>, eigs: Vec<Complex64>) -> Subspace {
    let basis: Vec<Vector3<f64>> = if eigs.len() == 2 && eigs[0].im != 0.0 {
        let lam = if eigs[0].im > 0.0 { eigs[0] } else { eigs[1] };
        let v = eigenvector(jac, lam);
        vec![
            Vector3::new(v[0].re, v[1].re, v[2].re),
            Vector3::new(v[0].im, v[1].im, v[2].im),
        ]
    } else {
        let raw: Vec<Vector3<f64>> = eigs
            .iter()
            .map(|l| {
                let v = eigenvector(jac, Complex64::new(l.re, 0.0));
                Vector3::new(v[0].re, v[1].re, v[2].re).normalize()
            })
            .collect();
        if raw.len() == 2 {
            let e1 = canonical_sign(raw[0]);
            let e2 = raw[1] - e1 * e1.dot(&raw[1]);
            vec![e1, canonical_sign(e2.normalize())]
        } else {
            raw.into_iter().map(canonical_sign).collect()
        }
    };
    let e = basis_matrix(&basis);
    let j = DMatrix::from_fn(3, 3, |r, c| jac[(r, c)]);
    let g = e.transpose() * &e;
    let action = g
        .lu()
        .solve(&(e.transpose() * &j * &e))
        .expect("independent basis");
    Subspace {
        eigenvalues: eigs,
        basis,
        action,
    }
}

/// Stable and unstable subspaces at a hyperbolic fixed point.
pub fn linear_data(p: &GenericMapParams, fp: &FixedPointReport) -> Result<LinearData> {
    let location = fp.location();
    for l in &fp.eigenvalues {
        if (l.norm() - 1.0).abs() <= HYPERBOLIC_TOL {
            return Err(Error::NotHyperbolic { modulus: l.norm() });
        }
    }
    let jacobian = p.jacobian(&location);
    let (mut s, mut u) = (vec![], vec![]);
    for l in fp.eigenvalues {
        if l.norm() < 1.0 {
            s.push(l);
        } else {
            u.push(l);
        }
    }
    Ok(LinearData {
        fixed_point: fp.clone(),
        location,
        jacobian,
        stable: subspace_of(&jacobian, s),
        unstable: subspace_of(&jacobian, u),
    })
}

/// Axis-aligned cube outside which growth stops.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub center: Vector3<f64>,
    pub half_width: f64,
}

impl BoundingBox {
    pub fn contains(&self, x: &Vector3<f64>) -> bool {
        (x - self.center).amax() <= self.half_width
    }

    /// The escape cube scaled by 1.5.
    pub fn escape_cube(p: &GenericMapParams) -> Result<Self> {
        let kappa = escape_bound(&p.quad, p.alpha, p.tau, p.sigma)?;
        Ok(BoundingBox {
            center: Vector3::zeros(),
            half_width: 1.5 * kappa,
        })
    }

    /// The smallest cube centred on `Fix(h)`'s midpoint `−η/2 (1, 1, 1)`
    /// that contains the scaled escape cube, so that `h` maps it to itself.
    pub fn symmetric_escape_cube(p: &GenericMapParams, r: &Reversor) -> Result<Self> {
        let b = Self::escape_cube(p)?;
        let c = -0.5 * r.eta;
        Ok(BoundingBox {
            center: Vector3::from_element(c),
            half_width: b.half_width + c.abs(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{fixed_points, Classification};

    #[test]
    fn fig2_split() {
        let p = GenericMapParams::manifold_example();
        let fps = fixed_points(&p).unwrap();
        assert_eq!(fps.len(), 2);
        let kinds: Vec<Classification> = fps.iter().map(|f| f.classification).collect();
        assert!(kinds.contains(&Classification::TypeA) && kinds.contains(&Classification::TypeB));
        for fp in &fps {
            let d = linear_data(&p, fp).unwrap();
            let (s, u) = (d.stable.dim(), d.unstable.dim());
            assert_eq!(s + u, 3);
            match fp.classification {
                Classification::TypeA => assert_eq!(u, 1),
                _ => assert_eq!(s, 1),
            }
            for sub in [&d.stable, &d.unstable] {
                let e = basis_matrix(&sub.basis);
                let j = DMatrix::from_fn(3, 3, |r, c| d.jacobian[(r, c)]);
                let res = (&j * &e - &e * &sub.action).amax();
                assert!(res < 1e-12, "{res}");
            }
        }
    }

    #[test]
    fn saddle_node_is_rejected() {
        // a double fixed point sits on t = s
        let p = GenericMapParams::new(0.0625, 0.5, 0.0, 0.5, 0.0, 0.5);
        let fps = fixed_points(&p).unwrap();
        let fp = fps.iter().find(|f| (f.t - f.s).abs() < 1e-12).unwrap();
        assert!(matches!(linear_data(&p, fp), Err(Error::NotHyperbolic { .. })));
    }
}
