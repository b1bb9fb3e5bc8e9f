#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quadvp::shear::ShearData;
use quadvp::QuadMap;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    r.gen_range(lo..hi)
}

pub fn vec3(r: &mut ChaCha8Rng) -> Vector3<f64> {
    Vector3::from_fn(|_, _| r.gen_range(-1.0..1.0))
}

pub fn mat3(r: &mut ChaCha8Rng) -> Matrix3<f64> {
    Matrix3::from_fn(|_, _| r.gen_range(-1.0..1.0))
}

pub fn symmetric3(r: &mut ChaCha8Rng) -> Matrix3<f64> {
    let m = mat3(r);
    (m + m.transpose()) * 0.5
}

/// Random `v` and a random symmetric `P` projected so that `Pv = 0`.
pub fn shear_data(r: &mut ChaCha8Rng) -> ShearData {
    let v = loop {
        let v = vec3(r);
        if v.norm() > 0.2 {
            break v;
        }
    };
    let pi = Matrix3::identity() - v * v.transpose() / v.norm_squared();
    let p = pi * symmetric3(r) * pi;
    ShearData::new(v, p, 1e-12).expect("projected P")
}

/// Rotation from a random unit quaternion.
pub fn rotation(r: &mut ChaCha8Rng) -> Matrix3<f64> {
    let q = nalgebra::UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(
        r.gen_range(-1.0..1.0),
        r.gen_range(-1.0..1.0),
        r.gen_range(-1.0..1.0),
        r.gen_range(-1.0..1.0),
    ));
    *q.to_rotation_matrix().matrix()
}

pub fn dm(m: &Matrix3<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |i, j| m[(i, j)])
}

pub fn dv(v: &Vector3<f64>) -> DVector<f64> {
    DVector::from_column_slice(v.as_slice())
}

/// `b + L(x + ½(xᵀPx)v)`.
pub fn affine_times_shear(b: &Vector3<f64>, l: &Matrix3<f64>, s: &ShearData) -> QuadMap {
    let lv = l * s.v;
    let quad = (0..3).map(|i| dm(&(s.p * lv[i]))).collect();
    QuadMap::new(dv(b), dm(l), quad).unwrap()
}

/// Volume-preserving standard-form map that is not a shear: a rotated
/// triangular map `(x + q₁(y, z), y + c z², z)`.
pub fn triangular_non_shear(r: &mut ChaCha8Rng) -> QuadMap {
    let (a11, a12, a22) = (r.gen_range(0.5..1.5), r.gen_range(0.5..1.5), r.gen_range(-1.0..1.0));
    let c = r.gen_range(0.5..1.5);
    let a0 = Matrix3::new(0.0, 0.0, 0.0, 0.0, 2.0 * a11, a12, 0.0, a12, 2.0 * a22);
    let a1 = Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0 * c);
    let a = [a0, a1, Matrix3::zeros()];
    // R f(Rᵀx): A'_i = Σ_k R_ik R A_k Rᵀ
    let rot = rotation(r);
    let quad = (0..3)
        .map(|i| {
            let mut m = Matrix3::zeros();
            for (k, ak) in a.iter().enumerate() {
                m += rot * ak * rot.transpose() * rot[(i, k)];
            }
            dm(&m)
        })
        .collect();
    QuadMap::standard(quad).unwrap()
}

/// A random symplectic matrix of size `2n`: a product of the generators
/// `[[I, S], [0, I]]`, `[[I, 0], [S, I]]` and `[[A, 0], [0, A⁻ᵀ]]`.
pub fn symplectic_matrix(r: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let sym = |r: &mut ChaCha8Rng| {
        let m = DMatrix::from_fn(n, n, |_, _| r.gen_range(-0.7..0.7));
        (&m + m.transpose()) * 0.5
    };
    let mut upper = DMatrix::identity(2 * n, 2 * n);
    upper.view_mut((0, n), (n, n)).copy_from(&sym(r));
    let mut lower = DMatrix::identity(2 * n, 2 * n);
    lower.view_mut((n, 0), (n, n)).copy_from(&sym(r));
    let a = loop {
        let a = DMatrix::<f64>::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } + r.gen_range(-0.5..0.5));
        if a.determinant().abs() > 0.2 {
            break a;
        }
    };
    let mut diag = DMatrix::zeros(2 * n, 2 * n);
    diag.view_mut((0, 0), (n, n)).copy_from(&a);
    diag.view_mut((n, n), (n, n))
        .copy_from(&a.clone().try_inverse().unwrap().transpose());
    upper * diag * lower
}

/// Totally symmetric `n×n×n` tensor.
pub fn symmetric_tensor(r: &mut ChaCha8Rng, n: usize) -> Vec<Vec<Vec<f64>>> {
    let mut t = vec![vec![vec![0.0; n]; n]; n];
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let v = r.gen_range(-1.0..1.0);
                for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
                    t[a][b][c] = v;
                }
            }
        }
    }
    t
}

/// `g∘f∘g⁻¹` for linear `g`.
pub fn conjugate_linear(f: &QuadMap, g: &DMatrix<f64>) -> QuadMap {
    let gi = g.clone().try_inverse().unwrap();
    let n = f.dim();
    // g(b + L g⁻¹x + ½((g⁻¹x)ᵀA_k g⁻¹x)_k)
    let quad: Vec<DMatrix<f64>> = (0..n)
        .map(|i| {
            let mut m = DMatrix::zeros(n, n);
            for (k, ak) in f.quad().iter().enumerate() {
                m += gi.transpose() * ak * &gi * g[(i, k)];
            }
            m
        })
        .collect();
    QuadMap::new(g * f.constant(), g * f.linear() * &gi, quad).unwrap()
}

pub fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}
