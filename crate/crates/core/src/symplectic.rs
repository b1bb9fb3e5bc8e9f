//! Quadratic symplectic maps of R²ⁿ with `J = [[0, I], [−I, 0]]`: symplecticity
//! test, decomposition into affine symplectic map and symplectic shear, and the
//! linear symplectic change of coordinates bringing a shear to `(q + ∇V(p), p)`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{null_space, sample_points};
use crate::poly::MatPoly;
use crate::polymap::{AffineMap, QuadMap};

/// Relative threshold for the common kernel of the `M(e_k)`.
pub const KERNEL_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticContext {
    half_dim: usize,
    j: DMatrix<f64>,
}

impl SymplecticContext {
    pub fn new(half_dim: usize) -> Self {
        let n = half_dim;
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(i, n + i)] = 1.0;
            j[(n + i, i)] = -1.0;
        }
        SymplecticContext { half_dim, j }
    }

    pub fn for_dim(dim: usize) -> Result<Self> {
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::OddDimension(dim));
        }
        Ok(Self::new(dim / 2))
    }

    pub fn half_dim(&self) -> usize {
        self.half_dim
    }

    pub fn j(&self) -> &DMatrix<f64> {
        &self.j
    }

    /// `ω(u, w) = uᵀJw`.
    pub fn omega(&self, u: &DVector<f64>, w: &DVector<f64>) -> f64 {
        u.dot(&(&self.j * w))
    }

    /// `‖LᵀJL − J‖_max`.
    pub fn linear_residual(&self, l: &DMatrix<f64>) -> f64 {
        (l.transpose() * &self.j * l - &self.j).amax()
    }

    fn check(&self, map: &QuadMap) -> Result<()> {
        if map.dim() != 2 * self.half_dim {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.half_dim,
                got: map.dim(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymplecticCertificate {
    pub holds: bool,
    /// `‖LᵀJL − J‖`.
    pub linear_residual: f64,
    /// `max_k ‖M_kᵀJ − JᵀM_k‖` on the standard-form part.
    pub transpose_residual: f64,
    /// `max_{i≤j} ‖M_iᵀJM_j + M_jᵀJM_i‖`.
    pub quadratic_residual: f64,
}

/// `Df(x)ᵀJDf(x) ≡ J`, checked on `L` and on the basis matrices of the
/// standard-form part.
pub fn is_symplectic(map: &QuadMap, ctx: &SymplecticContext, tol: f64) -> Result<SymplecticCertificate> {
    if !map.dim().is_multiple_of(2) {
        return Err(Error::OddDimension(map.dim()));
    }
    ctx.check(map)?;
    let j = ctx.j();
    let linear_residual = ctx.linear_residual(map.linear());
    let Ok(s) = map.standard_part() else {
        return Ok(SymplecticCertificate {
            holds: false,
            linear_residual,
            transpose_residual: f64::INFINITY,
            quadratic_residual: f64::INFINITY,
        });
    };
    let ms = s.basis_matrices();
    let mut transpose_residual: f64 = 0.0;
    for m in &ms {
        transpose_residual = transpose_residual.max((m.transpose() * j - j.transpose() * m).amax());
    }
    let mut quadratic_residual: f64 = 0.0;
    for a in 0..ms.len() {
        for b in a..ms.len() {
            let r = ms[a].transpose() * j * &ms[b] + ms[b].transpose() * j * &ms[a];
            quadratic_residual = quadratic_residual.max(r.amax());
        }
    }
    let scale = ms.iter().map(|m| m.amax()).fold(1.0, f64::max);
    Ok(SymplecticCertificate {
        holds: linear_residual <= tol * map.linear().amax().max(1.0).powi(2)
            && transpose_residual <= tol * scale
            && quadratic_residual <= tol * scale * scale,
        linear_residual,
        transpose_residual,
        quadratic_residual,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticDecomposition {
    pub affine: AffineMap,
    pub shear: QuadMap,
    /// Largest monomial coefficient of `M(x)²` for the shear.
    pub square_residual: f64,
    pub shear_certificate: SymplecticCertificate,
}

/// `f = T∘S`, `T(x) = Df(0)x + f(0)`, with `M(x)² ≡ 0` certified for `S`.
pub fn symplectic_decompose(
    map: &QuadMap,
    ctx: &SymplecticContext,
    tol: f64,
) -> Result<SymplecticDecomposition> {
    let cert = is_symplectic(map, ctx, tol)?;
    if !cert.holds {
        return Err(Error::NotSymplectic {
            residual: cert
                .linear_residual
                .max(cert.transpose_residual)
                .max(cert.quadratic_residual),
        });
    }
    let shear = map.standard_part()?;
    let square_residual = MatPoly::linear(&shear.basis_matrices()).pow(2).max_abs_coeff();
    let shear_certificate = is_symplectic(&shear, ctx, tol)?;
    Ok(SymplecticDecomposition {
        affine: map.affine_part(),
        shear,
        square_residual,
        shear_certificate,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShearNormalFormSymp {
    /// `B(p) = Σ_k p_k B_k`.
    pub b: Vec<DMatrix<f64>>,
    /// Linear symplectic `λ` with `λ∘S∘λ⁻¹(q, p) = (q + ½B(p)p, p)`.
    pub lambda: DMatrix<f64>,
    /// Orthonormal basis of the Lagrangian `F`, `N^⊥ ⊂ F ⊂ N`.
    pub lagrangian: DMatrix<f64>,
    pub certificate: GradientCertificate,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GradientCertificate {
    pub kernel_dim: usize,
    /// Distance of `N^⊥` from `N`.
    pub complement_in_kernel: f64,
    /// `max |ω(f_i, f_j)|` over the basis of `F`.
    pub isotropy: f64,
    /// `‖λᵀJλ − J‖`.
    pub lambda_symplectic: f64,
    /// Largest entry of the blocks `A`, `C`, `D` of `M̃(0, p)` and of `M̃(q, 0)`.
    pub block_residual: f64,
    /// `max ‖B_k − B_kᵀ‖`.
    pub symmetry_residual: f64,
    /// Sample-point mismatch of `λ∘S∘λ⁻¹` against `(q + ½B(p)p, p)`.
    pub sample_residual: f64,
}

impl ShearNormalFormSymp {
    pub fn half_dim(&self) -> usize {
        self.b.len()
    }

    pub fn b_of(&self, p: &DVector<f64>) -> DMatrix<f64> {
        let n = self.half_dim();
        let mut m = DMatrix::zeros(n, n);
        for (k, bk) in self.b.iter().enumerate() {
            m += bk * p[k];
        }
        m
    }

    /// `∇V(p) = ½B(p)p`.
    pub fn gradient(&self, p: &DVector<f64>) -> DVector<f64> {
        self.b_of(p) * p * 0.5
    }

    /// `V(p) = (1/6) Σ (B_k)_ij p_i p_j p_k`.
    pub fn potential(&self, p: &DVector<f64>) -> f64 {
        p.dot(&(self.b_of(p) * p)) / 6.0
    }

    /// `(q + ∇V(p), p)`.
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = self.half_dim();
        let p = x.rows(n, n).into_owned();
        let g = self.gradient(&p);
        let mut y = x.clone();
        for i in 0..n {
            y[i] += g[i];
        }
        y
    }

    /// `B` as an `n × n × n` nested array, `B[k][i][j] = (B_k)_ij`.
    pub fn b_tensor(&self) -> Vec<Vec<Vec<f64>>> {
        let n = self.half_dim();
        self.b
            .iter()
            .map(|bk| (0..n).map(|i| (0..n).map(|j| bk[(i, j)]).collect()).collect())
            .collect()
    }
}

/// Conjugates a symplectic shear to `(q + ∇V(p), p)`.
pub fn shear_to_gradient_form(
    s: &QuadMap,
    ctx: &SymplecticContext,
    tol: f64,
) -> Result<ShearNormalFormSymp> {
    ctx.check(s)?;
    if !s.is_standard_form(tol) {
        return Err(Error::InvalidInput("expected a shear in standard form".into()));
    }
    let n = ctx.half_dim();
    let dim = 2 * n;
    let j = ctx.j();
    let ms = s.basis_matrices();
    let scale = ms.iter().map(|m| m.amax()).fold(0.0, f64::max);

    // N: common kernel of the M(e_k)
    let mut stacked = DMatrix::zeros(dim * dim, dim);
    for (k, m) in ms.iter().enumerate() {
        stacked.view_mut((k * dim, 0), (dim, dim)).copy_from(m);
    }
    let kernel = null_space(&stacked, KERNEL_TOL, tol * scale.max(1.0));
    let kdim = kernel.ncols();
    if kdim < n {
        return Err(Error::Degenerate(format!(
            "kernel of M has dimension {kdim} < {n}"
        )));
    }
    // N^⊥ = {u : uᵀJy = 0 for y ∈ N} = (span JN)^⊥ in the Euclidean sense
    let jn = j * &kernel;
    let complement = null_space(&jn.transpose(), KERNEL_TOL, tol);
    let proj = &kernel * kernel.transpose();
    let complement_in_kernel = if complement.ncols() == 0 {
        0.0
    } else {
        (&complement - &proj * &complement).amax()
    };
    if complement_in_kernel > 1e3 * KERNEL_TOL {
        return Err(Error::NotSymplectic {
            residual: complement_in_kernel,
        });
    }

    // greedy isotropic extension of N^⊥ inside N
    let mut f_cols: Vec<DVector<f64>> = Vec::new();
    for c in complement.column_iter() {
        push_orthonormal(&mut f_cols, c.into_owned());
    }
    while f_cols.len() < n {
        // coefficients c with ω(f_i, N c) = 0
        let coeffs = if f_cols.is_empty() {
            DMatrix::identity(kdim, kdim)
        } else {
            let fm = DMatrix::from_columns(&f_cols);
            null_space(&(fm.transpose() * j * &kernel), KERNEL_TOL, 1e-12)
        };
        let mut best: Option<(f64, DVector<f64>)> = None;
        for c in coeffs.column_iter() {
            let mut x = &kernel * c;
            for f in &f_cols {
                x -= f * f.dot(&x);
            }
            let nx = x.norm();
            if best.as_ref().is_none_or(|(b, _)| nx > *b) {
                best = Some((nx, x));
            }
        }
        match best {
            Some((nx, x)) if nx > 1e-6 => f_cols.push(x / nx),
            _ => {
                return Err(Error::Degenerate(
                    "could not extend N^⊥ to a Lagrangian subspace".into(),
                ))
            }
        }
    }
    f_cols.truncate(n);
    let fm = DMatrix::from_columns(&f_cols);
    let mut isotropy: f64 = 0.0;
    for a in &f_cols {
        for b in &f_cols {
            isotropy = isotropy.max(ctx.omega(a, b).abs());
        }
    }

    // Φ = [F | −JF] is orthogonal and symplectic, λ = Φ⁻¹ = Φᵀ
    let phi = {
        let mut p = DMatrix::zeros(dim, dim);
        p.view_mut((0, 0), (dim, n)).copy_from(&fm);
        p.view_mut((0, n), (dim, n)).copy_from(&(-(j * &fm)));
        p
    };
    let lambda = phi.transpose();
    let conj = AffineMap {
        linear: phi.clone(),
        constant: DVector::zeros(dim),
    };
    let st = s.conjugate_by(&conj)?;
    let mt = st.basis_matrices();
    let mut block_residual: f64 = 0.0;
    for m in mt.iter().take(n) {
        block_residual = block_residual.max(m.amax());
    }
    let mut b = Vec::with_capacity(n);
    for m in mt.iter().skip(n) {
        block_residual = block_residual.max(m.view((0, 0), (n, n)).amax());
        block_residual = block_residual.max(m.view((n, 0), (n, n)).amax());
        block_residual = block_residual.max(m.view((n, n), (n, n)).amax());
        b.push(m.view((0, n), (n, n)).into_owned());
    }
    let symmetry_residual = b
        .iter()
        .map(|bk| (bk - bk.transpose()).amax())
        .fold(0.0, f64::max);

    let mut out = ShearNormalFormSymp {
        b,
        lambda: lambda.clone(),
        lagrangian: fm,
        certificate: GradientCertificate {
            kernel_dim: kdim,
            complement_in_kernel,
            isotropy,
            lambda_symplectic: ctx.linear_residual(&lambda),
            block_residual,
            symmetry_residual,
            sample_residual: 0.0,
        },
    };
    let mut sample_residual: f64 = 0.0;
    for x in sample_points(20, dim, 1.0, 0x5eed_5e7) {
        let lhs = &lambda * s.evaluate(&(&phi * &x))?;
        sample_residual = sample_residual.max((lhs - out.apply(&x)).amax());
    }
    out.certificate.sample_residual = sample_residual;
    Ok(out)
}

fn push_orthonormal(cols: &mut Vec<DVector<f64>>, mut x: DVector<f64>) {
    for c in cols.iter() {
        x -= c * c.dot(&x);
    }
    let n = x.norm();
    if n > 1e-10 {
        cols.push(x / n);
    }
}

/// `(q + ∇V(p), p)` with `∇V(p)_i = ½ Σ_jk T[i][j][k] p_j p_k`; `T` must be
/// symmetric in all indices for the result to be symplectic.
pub fn gradient_shear(t: &[Vec<Vec<f64>>]) -> Result<QuadMap> {
    let n = t.len();
    let dim = 2 * n;
    let mut quad = vec![DMatrix::zeros(dim, dim); dim];
    for (i, ti) in t.iter().enumerate() {
        if ti.len() != n || ti.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("tensor must be n×n×n".into()));
        }
        for j in 0..n {
            for k in 0..n {
                quad[i][(n + j, n + k)] = ti[j][k];
            }
        }
    }
    QuadMap::standard(quad)
}
