//! Quadratic polynomial maps `f(x) = b + Lx + ½(xᵀA₁x, …, xᵀAₙx)`.
//!
//! The quadratic part is stored as `n` symmetric matrices. The matrix-valued
//! linear function `M(x)` has entries `M(x)[i][j] = Σ_k A_i[j][k] x_k`, so that
//! `q(x) = ½M(x)x`, `M(x)y = M(y)x` and `Df(x) = L + M(x)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{MatPoly, Poly, PolyMap};
use crate::DEFAULT_TOL;

/// `T(x) = Lx + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    pub linear: DMatrix<f64>,
    pub constant: DVector<f64>,
}

impl AffineMap {
    pub fn new(linear: DMatrix<f64>, constant: DVector<f64>) -> Result<Self> {
        if !linear.is_square() {
            return Err(Error::InvalidInput("linear part must be square".into()));
        }
        if constant.len() != linear.nrows() {
            return Err(Error::DimensionMismatch {
                expected: linear.nrows(),
                got: constant.len(),
            });
        }
        Ok(AffineMap { linear, constant })
    }

    pub fn identity(n: usize) -> Self {
        AffineMap {
            linear: DMatrix::identity(n, n),
            constant: DVector::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.constant.len()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.linear * x + &self.constant
    }

    pub fn determinant(&self) -> f64 {
        self.linear.determinant()
    }

    pub fn is_volume_preserving(&self, tol: f64) -> bool {
        (self.determinant().abs() - 1.0).abs() <= tol
    }

    pub fn inverse(&self) -> Result<AffineMap> {
        let inv = self
            .linear
            .clone()
            .try_inverse()
            .ok_or(Error::SingularLinearPart)?;
        let c = -(&inv * &self.constant);
        Ok(AffineMap {
            linear: inv,
            constant: c,
        })
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap {
            linear: &self.linear * &other.linear,
            constant: &self.linear * &other.constant + &self.constant,
        }
    }

    pub fn to_quad_map(&self) -> QuadMap {
        let n = self.dim();
        QuadMap {
            constant: self.constant.clone(),
            linear: self.linear.clone(),
            quad: vec![DMatrix::zeros(n, n); n],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadMap {
    constant: DVector<f64>,
    linear: DMatrix<f64>,
    quad: Vec<DMatrix<f64>>,
}

/// Which equivalent form of "det Df ≡ 1" was verified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeCondition {
    /// `b = 0`, `L = I`: `[M(x)]ⁿ ≡ 0` expanded in monomials.
    StandardFormNilpotency,
    /// `det L = 1` and `[L⁻¹M(x)]ⁿ ≡ 0` for the standard-form part `T⁻¹∘f`.
    AffineDeterminantAndNilpotency,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeCertificate {
    pub holds: bool,
    pub condition: VolumeCondition,
    pub det_linear: f64,
    /// Largest monomial coefficient of `[M(x)]ⁿ`; `None` when `L` is singular.
    pub nilpotency_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InverseCertificate {
    pub holds: bool,
    /// Largest monomial coefficient of `M(x)²x` for the standard-form part.
    pub square_residual: f64,
    /// Largest entry of `M(x)M(y)z + M(y)M(z)x + M(z)M(x)y` over basis triples.
    pub triple_residual: f64,
}

/// Result of composing two quadratic maps.
#[derive(Clone, Debug)]
pub enum Composed {
    Quad(QuadMap),
    Poly(PolyMap),
}

impl Composed {
    pub fn into_poly(self) -> PolyMap {
        match self {
            Composed::Quad(q) => q.to_poly_map(),
            Composed::Poly(p) => p,
        }
    }

    pub fn into_quad(self) -> Option<QuadMap> {
        match self {
            Composed::Quad(q) => Some(q),
            Composed::Poly(_) => None,
        }
    }
}

impl QuadMap {
    /// Builds a map, symmetrizing any non-symmetric quadratic matrix.
    pub fn new(
        constant: DVector<f64>,
        linear: DMatrix<f64>,
        quad: Vec<DMatrix<f64>>,
    ) -> Result<Self> {
        let n = constant.len();
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if linear.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: linear.nrows(),
            });
        }
        if quad.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: quad.len(),
            });
        }
        let mut sym = Vec::with_capacity(n);
        for (i, a) in quad.into_iter().enumerate() {
            if a.shape() != (n, n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: a.nrows(),
                });
            }
            let asym = (&a - a.transpose()).amax();
            if asym > 0.0 {
                log::warn!("quadratic matrix A_{} is not symmetric (max |A - Aᵀ| = {asym:e}); symmetrizing", i + 1);
                sym.push((&a + a.transpose()) * 0.5);
            } else {
                sym.push(a);
            }
        }
        if constant.iter().chain(linear.iter()).chain(sym.iter().flat_map(|m| m.iter())).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        Ok(QuadMap {
            constant,
            linear,
            quad: sym,
        })
    }

    pub fn identity(n: usize) -> Self {
        AffineMap::identity(n).to_quad_map()
    }

    /// `x + ½(xᵀA_i x)_i`.
    pub fn standard(quad: Vec<DMatrix<f64>>) -> Result<Self> {
        let n = quad.len();
        Self::new(DVector::zeros(n), DMatrix::identity(n, n), quad)
    }

    pub fn dim(&self) -> usize {
        self.constant.len()
    }

    pub fn constant(&self) -> &DVector<f64> {
        &self.constant
    }

    pub fn linear(&self) -> &DMatrix<f64> {
        &self.linear
    }

    pub fn quad(&self) -> &[DMatrix<f64>] {
        &self.quad
    }

    fn check_dim(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `(½xᵀA_i x)_i`.
    pub fn quadratic_part(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            self.quad.iter().map(|a| 0.5 * x.dot(&(a * x))),
        )
    }

    pub fn evaluate(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(x)?;
        Ok(&self.constant + &self.linear * x + self.quadratic_part(x))
    }

    /// `M(x)` of the quadratic tensor: row `i` is `(A_i x)ᵀ`.
    pub fn m_of(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (i, a) in self.quad.iter().enumerate() {
            let row = a * x;
            for j in 0..n {
                m[(i, j)] = row[j];
            }
        }
        m
    }

    /// `M(e_k)` for `k = 1..n`; `M(x) = Σ x_k M(e_k)`.
    pub fn basis_matrices(&self) -> Vec<DMatrix<f64>> {
        let n = self.dim();
        (0..n)
            .map(|k| DMatrix::from_fn(n, n, |i, j| self.quad[i][(j, k)]))
            .collect()
    }

    pub fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        &self.linear + self.m_of(x)
    }

    pub fn is_standard_form(&self, tol: f64) -> bool {
        let n = self.dim();
        self.constant.amax() <= tol && (&self.linear - DMatrix::identity(n, n)).amax() <= tol
    }

    pub fn is_affine(&self, tol: f64) -> bool {
        self.quad.iter().all(|a| a.amax() <= tol)
    }

    pub fn affine_part(&self) -> AffineMap {
        AffineMap {
            linear: self.linear.clone(),
            constant: self.constant.clone(),
        }
    }

    /// The standard-form factor `S = T⁻¹∘f` with `T(x) = Lx + b`.
    pub fn standard_part(&self) -> Result<QuadMap> {
        let inv = self
            .linear
            .clone()
            .try_inverse()
            .ok_or(Error::SingularLinearPart)?;
        let n = self.dim();
        let quad = (0..n)
            .map(|i| {
                let mut acc = DMatrix::zeros(n, n);
                for (j, a) in self.quad.iter().enumerate() {
                    acc += a * inv[(i, j)];
                }
                acc
            })
            .collect();
        QuadMap::standard(quad)
    }

    /// Apply a linear map to the output: `K·f`.
    pub fn left_linear(&self, k: &DMatrix<f64>) -> QuadMap {
        let n = self.dim();
        let quad = (0..n)
            .map(|i| {
                let mut acc = DMatrix::zeros(n, n);
                for (j, a) in self.quad.iter().enumerate() {
                    acc += a * k[(i, j)];
                }
                acc
            })
            .collect();
        QuadMap {
            constant: k * &self.constant,
            linear: k * &self.linear,
            quad,
        }
    }

    /// `f ∘ C` for an affine `C(x) = Gx + g`, exact in coefficients.
    pub fn precompose_affine(&self, c: &AffineMap) -> QuadMap {
        let g = &c.linear;
        QuadMap {
            constant: self.evaluate(&c.constant).expect("matching dimension"),
            linear: self.jacobian(&c.constant) * g,
            quad: self.quad.iter().map(|a| g.transpose() * a * g).collect(),
        }
    }

    /// `C⁻¹ ∘ f ∘ C`.
    pub fn conjugate_by(&self, c: &AffineMap) -> Result<QuadMap> {
        let inv = c.inverse()?;
        let mut m = self.precompose_affine(c).left_linear(&inv.linear);
        m.constant += &inv.constant;
        Ok(m)
    }

    fn coefficient_scale(&self) -> f64 {
        self.quad
            .iter()
            .map(|a| a.amax())
            .fold(0.0, f64::max)
            .max(1.0)
    }

    /// `det Df(x) ≡ 1`, decided through the nilpotency of `M(x)` of the
    /// standard-form part, expanded symbolically.
    pub fn is_volume_preserving(&self, tol: f64) -> VolumeCertificate {
        let n = self.dim();
        let det_linear = self.linear.determinant();
        let standard = self.is_standard_form(0.0);
        let condition = if standard {
            VolumeCondition::StandardFormNilpotency
        } else {
            VolumeCondition::AffineDeterminantAndNilpotency
        };
        let det_ok = (det_linear - 1.0).abs() <= tol * (1.0 + self.linear.norm().powi(n as i32));
        let s = if standard {
            Ok(self.clone())
        } else {
            self.standard_part()
        };
        let Ok(s) = s else {
            return VolumeCertificate {
                holds: false,
                condition,
                det_linear,
                nilpotency_residual: None,
            };
        };
        let m = MatPoly::linear(&s.basis_matrices());
        let residual = m.pow(n as u32).max_abs_coeff();
        let scale = s.coefficient_scale().powi(n as i32);
        VolumeCertificate {
            holds: det_ok && residual <= tol * scale,
            condition,
            det_linear,
            nilpotency_residual: Some(residual),
        }
    }

    /// Whether the inverse is again quadratic: `M(x)²x ≡ 0` for `T⁻¹∘f`.
    pub fn has_quadratic_inverse(&self, tol: f64) -> Result<InverseCertificate> {
        let vol = self.is_volume_preserving(tol);
        if !vol.holds {
            return Err(Error::NotVolumePreserving {
                det_linear: vol.det_linear,
                residual: vol.nilpotency_residual.unwrap_or(f64::INFINITY),
            });
        }
        let s = self.standard_part()?;
        let n = s.dim();
        let basis = s.basis_matrices();
        let m = MatPoly::linear(&basis);
        let square_residual = m.pow(2).mul(&MatPoly::coordinate_vector(n)).max_abs_coeff();

        let mut triple_residual: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let (ei, ej, ek) = (unit(n, i), unit(n, j), unit(n, k));
                    let t = &basis[i] * &basis[j] * &ek
                        + &basis[j] * &basis[k] * &ei
                        + &basis[k] * &basis[i] * &ej;
                    triple_residual = triple_residual.max(t.amax());
                }
            }
        }
        let scale = s.coefficient_scale().powi(2);
        Ok(InverseCertificate {
            holds: square_residual <= tol * scale,
            square_residual,
            triple_residual,
        })
    }

    /// Exact quadratic inverse `S⁻¹∘T⁻¹` with `S⁻¹(u) = u − ½M(u)u`.
    pub fn invert_quadratic(&self, tol: f64) -> Result<QuadMap> {
        let cert = self.has_quadratic_inverse(tol)?;
        if !cert.holds {
            return Err(Error::NoQuadraticInverse {
                residual: cert.square_residual,
            });
        }
        let n = self.dim();
        let k = self
            .linear
            .clone()
            .try_inverse()
            .ok_or(Error::SingularLinearPart)?;
        let s = self.standard_part()?;
        // u = K y + k0
        let k0 = -(&k * &self.constant);
        let mut constant = k0.clone();
        let mut linear = k.clone();
        let mut quad = Vec::with_capacity(n);
        for (i, a) in s.quad.iter().enumerate() {
            let ak0 = a * &k0;
            constant[i] -= 0.5 * k0.dot(&ak0);
            let row = ak0.transpose() * &k;
            for j in 0..n {
                linear[(i, j)] -= row[j];
            }
            quad.push(-(k.transpose() * a * &k));
        }
        QuadMap::new(constant, linear, quad)
    }

    pub fn to_poly_map(&self) -> PolyMap {
        let n = self.dim();
        let components = (0..n)
            .map(|i| {
                let mut p = Poly::zero(n);
                p.add_term(vec![0; n], self.constant[i]);
                for j in 0..n {
                    let mut m = vec![0; n];
                    m[j] = 1;
                    p.add_term(m, self.linear[(i, j)]);
                }
                let a = &self.quad[i];
                for j in 0..n {
                    for k in j..n {
                        let mut m = vec![0; n];
                        m[j] += 1;
                        m[k] += 1;
                        let c = if j == k { 0.5 * a[(j, j)] } else { a[(j, k)] };
                        p.add_term(m, c);
                    }
                }
                p
            })
            .collect();
        PolyMap { components }
    }

    /// Reads a polynomial map of degree ≤ 2 back into a `QuadMap`, or `None`
    /// when a coefficient above degree 2 exceeds `tol`.
    pub fn from_poly_map(p: &PolyMap, tol: f64) -> Option<QuadMap> {
        if p.max_abs_coeff_above(2) > tol {
            return None;
        }
        let n = p.dim();
        let mut constant = DVector::zeros(n);
        let mut linear = DMatrix::zeros(n, n);
        let mut quad = vec![DMatrix::zeros(n, n); n];
        for (i, comp) in p.components.iter().enumerate() {
            if comp.nvars() != n {
                return None;
            }
            for (m, c) in comp.terms() {
                let idx: Vec<usize> = m
                    .iter()
                    .enumerate()
                    .flat_map(|(v, &e)| std::iter::repeat_n(v, e as usize))
                    .collect();
                match idx.as_slice() {
                    [] => constant[i] += c,
                    [j] => linear[(i, *j)] += c,
                    [j, k] if j == k => quad[i][(*j, *j)] += 2.0 * c,
                    [j, k] => {
                        quad[i][(*j, *k)] += c;
                        quad[i][(*k, *j)] += c;
                    }
                    _ => {}
                }
            }
        }
        QuadMap::new(constant, linear, quad).ok()
    }

    /// Largest coefficient difference to another map of the same dimension.
    pub fn max_coeff_diff(&self, other: &QuadMap) -> f64 {
        let mut d = (&self.constant - &other.constant).amax();
        d = d.max((&self.linear - &other.linear).amax());
        for (a, b) in self.quad.iter().zip(&other.quad) {
            d = d.max((a - b).amax());
        }
        d
    }

    pub fn to_file(&self) -> MapFile {
        let n = self.dim();
        let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect()
        };
        MapFile {
            dim: n,
            constant: self.constant.iter().copied().collect(),
            linear: rows(&self.linear),
            quad: self.quad.iter().map(rows).collect(),
        }
    }

    pub fn from_file(file: &MapFile) -> Result<Self> {
        let n = file.dim;
        let matrix = |rows: &[Vec<f64>], what: &str| -> Result<DMatrix<f64>> {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidInput(format!("{what} must be {n}×{n}")));
            }
            Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
        };
        if file.constant.len() != n {
            return Err(Error::InvalidInput(format!("const must have {n} entries")));
        }
        if file.quad.len() != n {
            return Err(Error::InvalidInput(format!("quad must hold {n} matrices")));
        }
        let linear = matrix(&file.linear, "linear")?;
        let quad = file
            .quad
            .iter()
            .enumerate()
            .map(|(i, q)| matrix(q, &format!("quad[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        QuadMap::new(DVector::from_vec(file.constant.clone()), linear, quad)
    }
}

/// `f ∘ g` computed exactly in the monomial basis.
pub fn compose(f: &QuadMap, g: &QuadMap) -> Result<Composed> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    let p = f.to_poly_map().compose(&g.to_poly_map());
    Ok(match QuadMap::from_poly_map(&p, DEFAULT_TOL) {
        Some(q) => Composed::Quad(q),
        None => Composed::Poly(p),
    })
}

/// `I − M + M² − … ± M^{n−1}`, the inverse of `I + M` for nilpotent `M`.
pub fn inverse_series(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut term = DMatrix::identity(n, n);
    let mut acc = term.clone();
    for _ in 1..n {
        term = -(&term * m);
        acc += &term;
    }
    acc
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[i] = 1.0;
    e
}

/// JSON interchange form of a [`QuadMap`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub dim: usize,
    #[serde(rename = "const")]
    pub constant: Vec<f64>,
    pub linear: Vec<Vec<f64>>,
    pub quad: Vec<Vec<Vec<f64>>>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec3(a: f64, b: f64, c: f64) -> DVector<f64> {
        DVector::from_vec(vec![a, b, c])
    }

    /// (x + ½y², y, z)
    fn simple_shear() -> QuadMap {
        let mut a1 = DMatrix::zeros(3, 3);
        a1[(1, 1)] = 1.0;
        QuadMap::standard(vec![a1, DMatrix::zeros(3, 3), DMatrix::zeros(3, 3)]).unwrap()
    }

    /// x + ½(xᵀx)e₁
    fn radial_non_example() -> QuadMap {
        QuadMap::standard(vec![
            DMatrix::identity(3, 3),
            DMatrix::zeros(3, 3),
            DMatrix::zeros(3, 3),
        ])
        .unwrap()
    }

    /// Eq. (5) with α = τ = σ = 0 and Q = x²: (z + x², x, y).
    fn normal_form_x_squared() -> QuadMap {
        let linear = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let mut a1 = DMatrix::zeros(3, 3);
        a1[(0, 0)] = 2.0;
        QuadMap::new(
            DVector::zeros(3),
            linear,
            vec![a1, DMatrix::zeros(3, 3), DMatrix::zeros(3, 3)],
        )
        .unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let id = QuadMap::identity(3);
        assert_eq!(id.evaluate(&vec3(1.0, 2.0, 3.0)).unwrap(), vec3(1.0, 2.0, 3.0));
        assert_eq!(
            simple_shear().evaluate(&vec3(0.0, 2.0, 0.0)).unwrap(),
            vec3(2.0, 2.0, 0.0)
        );
        assert_eq!(
            normal_form_x_squared().evaluate(&vec3(1.0, 0.0, 0.0)).unwrap(),
            vec3(1.0, 1.0, 0.0)
        );
        assert!(matches!(
            id.evaluate(&DVector::zeros(2)),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn m_of_examples() {
        let m = simple_shear().m_of(&vec3(0.0, 1.0, 0.0));
        let mut expected = DMatrix::zeros(3, 3);
        expected[(0, 1)] = 1.0;
        assert_eq!(m, expected);
        assert_eq!(normal_form_x_squared().m_of(&DVector::zeros(3)), DMatrix::zeros(3, 3));
    }

    #[test]
    fn asymmetric_input_is_symmetrized() {
        let mut a = DMatrix::zeros(2, 2);
        a[(0, 1)] = 2.0;
        let f = QuadMap::standard(vec![a, DMatrix::zeros(2, 2)]).unwrap();
        assert_eq!(f.quad()[0][(0, 1)], 1.0);
        assert_eq!(f.quad()[0][(1, 0)], 1.0);
    }

    #[test]
    fn volume_preservation_examples() {
        let c = simple_shear().is_volume_preserving(DEFAULT_TOL);
        assert!(c.holds);
        assert_eq!(c.condition, VolumeCondition::StandardFormNilpotency);

        let c = radial_non_example().is_volume_preserving(DEFAULT_TOL);
        assert!(!c.holds);
        // M(x)³ = x₁² M(x): the x₁³ coefficient of entry (0,0) is 1
        assert_eq!(c.nilpotency_residual, Some(1.0));

        let c = normal_form_x_squared().is_volume_preserving(DEFAULT_TOL);
        assert!(c.holds);
        assert_eq!(c.condition, VolumeCondition::AffineDeterminantAndNilpotency);
    }

    #[test]
    fn quadratic_inverse_examples() {
        assert!(simple_shear().has_quadratic_inverse(DEFAULT_TOL).unwrap().holds);
        assert!(QuadMap::identity(3).has_quadratic_inverse(DEFAULT_TOL).unwrap().holds);
        assert!(matches!(
            radial_non_example().has_quadratic_inverse(DEFAULT_TOL),
            Err(Error::NotVolumePreserving { .. })
        ));
    }

    #[test]
    fn inverse_examples() {
        let inv = simple_shear().invert_quadratic(DEFAULT_TOL).unwrap();
        let mut a1 = DMatrix::zeros(3, 3);
        a1[(1, 1)] = -1.0;
        let expected =
            QuadMap::standard(vec![a1, DMatrix::zeros(3, 3), DMatrix::zeros(3, 3)]).unwrap();
        assert_eq!(inv.max_coeff_diff(&expected), 0.0);

        // (z + x², x, y)⁻¹ = (y, z, x − y²)
        let inv = normal_form_x_squared().invert_quadratic(DEFAULT_TOL).unwrap();
        for p in [vec3(1.0, 2.0, 3.0), vec3(-0.5, 0.25, 4.0)] {
            let got = inv.evaluate(&p).unwrap();
            let want = vec3(p[1], p[2], p[0] - p[1] * p[1]);
            assert!((got - want).amax() < 1e-15);
        }
    }

    #[test]
    fn compose_with_identity_is_exact() {
        let f = normal_form_x_squared();
        let c = compose(&f, &QuadMap::identity(3)).unwrap().into_quad().unwrap();
        assert_eq!(c.max_coeff_diff(&f), 0.0);
    }

    #[test]
    fn compose_of_non_shears_is_quartic() {
        let f = radial_non_example();
        match compose(&f, &f).unwrap() {
            Composed::Poly(p) => assert_eq!(p.degree(), 4),
            Composed::Quad(_) => panic!("expected a quartic"),
        }
    }

    #[test]
    fn map_file_round_trip() {
        let f = normal_form_x_squared();
        let text = serde_json::to_string(&f.to_file()).unwrap();
        let back: MapFile = serde_json::from_str(&text).unwrap();
        assert_eq!(QuadMap::from_file(&back).unwrap(), f);
        assert!(text.contains("\"const\""));
    }

    #[test]
    fn inverse_series_inverts_nilpotent() {
        let m = simple_shear().m_of(&vec3(0.3, -2.0, 1.0));
        let i = DMatrix::<f64>::identity(3, 3);
        let prod = (&i + &m) * inverse_series(&m);
        assert!((prod - i).amax() < 1e-15);
    }
}
