//! Affine normal forms of quadratic volume-preserving diffeomorphisms of R³.
//!
//! `f = T∘S` with `T(x) = Lx + b` and `S` a shear `x + ½(xᵀPx)v`. The case is
//! the dimension of `Z(v, L) = span{v, Lv, L²v}`. Every conjugacy is checked by
//! re-conjugating the input map in coefficients and comparing it with the
//! closed form at sample points.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, sample_points, to_dmatrix, to_matrix3};
use crate::polymap::{AffineMap, QuadMap};
use crate::shear::{extract_shear, Extraction, ShearData};
use crate::DEFAULT_TOL;

/// Relative singular-value threshold for rank decisions on `[v | Lv | L²v]`.
pub const RANK_TOL: f64 = 1e-8;
const SAMPLE_COUNT: usize = 20;
const SAMPLE_SEED: u64 = 0x5eed_0f4e;

/// `Q(u, w) = a u² + b u w + c w²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticForm2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadraticForm2 {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        QuadraticForm2 { a, b, c }
    }

    pub fn eval(&self, u: f64, w: f64) -> f64 {
        self.a * u * u + self.b * u * w + self.c * w * w
    }

    /// `d = ac − b²/4`.
    pub fn d(&self) -> f64 {
        self.a * self.c - 0.25 * self.b * self.b
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0.0 && self.c > 0.0 && self.d() > 0.0
    }

    /// `Q(1, 1)`.
    pub fn sum(&self) -> f64 {
        self.a + self.b + self.c
    }

    pub fn scaled(&self, s: f64) -> Self {
        QuadraticForm2::new(self.a * s, self.b * s, self.c * s)
    }

    /// Symmetric matrix `H` with `Q(u, w) = ½ (u, w) H (u, w)ᵀ`.
    fn hessian(&self) -> [[f64; 2]; 2] {
        [[2.0 * self.a, self.b], [self.b, 2.0 * self.c]]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
    III,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "case")]
pub enum NormalFormParams {
    /// `(α + τx − σy + z + Q(x, y), x, y)`.
    #[serde(rename = "I")]
    CaseI {
        alpha: f64,
        tau: f64,
        sigma: f64,
        quad: QuadraticForm2,
    },
    /// `(x0 + αx + y + Q(x, z), y0 − βx, z0 + z/β)`.
    #[serde(rename = "II")]
    CaseII {
        x0: f64,
        y0: f64,
        z0: f64,
        alpha: f64,
        beta: f64,
        quad: QuadraticForm2,
    },
    /// `(x0 + αx + Q(y, z), y0 − z/α, z0 + y + βz)`.
    #[serde(rename = "III")]
    CaseIII {
        x0: f64,
        y0: f64,
        z0: f64,
        alpha: f64,
        beta: f64,
        quad: QuadraticForm2,
    },
}

impl NormalFormParams {
    pub fn case(&self) -> Case {
        match self {
            NormalFormParams::CaseI { .. } => Case::I,
            NormalFormParams::CaseII { .. } => Case::II,
            NormalFormParams::CaseIII { .. } => Case::III,
        }
    }

    pub fn quad(&self) -> QuadraticForm2 {
        match *self {
            NormalFormParams::CaseI { quad, .. }
            | NormalFormParams::CaseII { quad, .. }
            | NormalFormParams::CaseIII { quad, .. } => quad,
        }
    }

    /// The closed-form map.
    pub fn to_quad_map(&self) -> QuadMap {
        let mut a0 = DMatrix::zeros(3, 3);
        let (constant, linear, vars) = match *self {
            NormalFormParams::CaseI {
                alpha, tau, sigma, ..
            } => (
                [alpha, 0.0, 0.0],
                [tau, -sigma, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0],
                (0, 1),
            ),
            NormalFormParams::CaseII {
                x0,
                y0,
                z0,
                alpha,
                beta,
                ..
            } => (
                [x0, y0, z0],
                [alpha, 1.0, 0.0, -beta, 0.0, 0.0, 0.0, 0.0, 1.0 / beta],
                (0, 2),
            ),
            NormalFormParams::CaseIII {
                x0,
                y0,
                z0,
                alpha,
                beta,
                ..
            } => (
                [x0, y0, z0],
                [alpha, 0.0, 0.0, 0.0, 0.0, -1.0 / alpha, 0.0, 1.0, beta],
                (1, 2),
            ),
        };
        let h = self.quad().hessian();
        let (u, w) = vars;
        a0[(u, u)] = h[0][0];
        a0[(u, w)] = h[0][1];
        a0[(w, u)] = h[1][0];
        a0[(w, w)] = h[1][1];
        QuadMap::new(
            DVector::from_row_slice(&constant),
            DMatrix::from_row_slice(3, 3, &linear),
            vec![a0, DMatrix::zeros(3, 3), DMatrix::zeros(3, 3)],
        )
        .expect("3×3 closed form")
    }

    /// Named scalar parameters, for reports.
    pub fn to_map(&self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: f64| {
            m.insert(k.to_string(), v);
        };
        match *self {
            NormalFormParams::CaseI {
                alpha, tau, sigma, ..
            } => {
                put("alpha", alpha);
                put("tau", tau);
                put("sigma", sigma);
            }
            NormalFormParams::CaseII {
                x0,
                y0,
                z0,
                alpha,
                beta,
                ..
            }
            | NormalFormParams::CaseIII {
                x0,
                y0,
                z0,
                alpha,
                beta,
                ..
            } => {
                put("x0", x0);
                put("y0", y0);
                put("z0", z0);
                put("alpha", alpha);
                put("beta", beta);
            }
        }
        let q = self.quad();
        put("a", q.a);
        put("b", q.b);
        put("c", q.c);
        m
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Singular values of `[v | Lv | L²v]`, decreasing.
    pub z_singular_values: Vec<f64>,
    /// A singular value lies within a factor 10 of the rank threshold.
    pub near_degenerate_rank: bool,
    /// Max over sample points of `‖C⁻¹∘f∘C(x) − nf(x)‖`.
    pub conjugacy_residual: f64,
    pub trace_l: f64,
    pub second_trace_l: f64,
    /// Case-specific intermediate quantities.
    pub values: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalForm {
    pub params: NormalFormParams,
    /// `C` with `C⁻¹∘f∘C = nf`; maps normal-form coordinates to original ones.
    pub conjugacy: AffineMap,
    pub diagnostics: Diagnostics,
}

impl NormalForm {
    pub fn case(&self) -> Case {
        self.params.case()
    }

    pub fn to_quad_map(&self) -> QuadMap {
        self.params.to_quad_map()
    }
}

/// `f = T∘S` with `T(x) = Df(0)x + f(0)`.
pub fn decompose(map: &QuadMap) -> Result<(AffineMap, ShearData)> {
    if map.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: map.dim(),
        });
    }
    let inv = map.has_quadratic_inverse(DEFAULT_TOL)?;
    if !inv.holds {
        return Err(Error::NoQuadraticInverse {
            residual: inv.square_residual,
        });
    }
    let t = map.affine_part();
    let s = map.standard_part()?;
    match extract_shear(&s)? {
        Extraction::Shear(d) => Ok((t, d)),
        Extraction::Affine => Err(Error::Affine),
        Extraction::NotAShear { reason, .. } => Err(Error::NotAShear(format!(
            "standard part has a quadratic inverse but is not a (v, P) shear: {reason}"
        ))),
    }
}

/// Rank of `[v | Lv | L²v]` and its singular values.
pub fn z_dimension_with_values(v: &Vector3<f64>, l: &Matrix3<f64>) -> Result<(usize, Vec<f64>)> {
    if v.amax() == 0.0 {
        return Err(Error::Affine);
    }
    let lv = l * v;
    let llv = l * lv;
    let z = Matrix3::from_columns(&[*v, lv, llv]);
    let (rank, sv) = numerical_rank(&to_dmatrix(&z), RANK_TOL);
    Ok((rank.max(1), sv))
}

pub fn z_dimension(v: &Vector3<f64>, l: &Matrix3<f64>) -> Result<usize> {
    z_dimension_with_values(v, l).map(|(r, _)| r)
}

pub fn second_trace(l: &Matrix3<f64>) -> f64 {
    crate::linalg::second_trace(l)
}

fn max_sample_residual(a: &QuadMap, b: &QuadMap) -> f64 {
    sample_points(SAMPLE_COUNT, 3, 1.0, SAMPLE_SEED)
        .iter()
        .map(|x| (a.evaluate(x).unwrap() - b.evaluate(x).unwrap()).amax())
        .fold(0.0, f64::max)
}

fn affine_from(u: &Matrix3<f64>, shift: &Vector3<f64>) -> AffineMap {
    AffineMap {
        linear: to_dmatrix(u),
        constant: DVector::from_column_slice((u * shift).as_slice()),
    }
}

/// Reads `(a, b, c)` from the symmetric matrix of the first component at the
/// variable pair `(u, w)`, scaled by `s`.
fn read_quad(a0: &DMatrix<f64>, u: usize, w: usize, s: f64) -> QuadraticForm2 {
    QuadraticForm2::new(
        0.5 * a0[(u, u)] * s,
        a0[(u, w)] * s,
        0.5 * a0[(w, w)] * s,
    )
}

/// Reduces `f` to one of the three normal forms.
pub fn to_normal_form(map: &QuadMap) -> Result<NormalForm> {
    let (t, shear) = decompose(map)?;
    let l = to_matrix3(&t.linear);
    let v = shear.v;
    let (rank, sv) = z_dimension_with_values(&v, &l)?;
    let smax = sv[0];
    let thr = RANK_TOL * smax;
    let mut diag = Diagnostics {
        near_degenerate_rank: sv.iter().any(|&s| s > thr / 10.0 && s < thr * 10.0),
        z_singular_values: sv,
        trace_l: l.trace(),
        second_trace_l: second_trace(&l),
        ..Default::default()
    };
    if diag.near_degenerate_rank {
        diag.notes
            .push("a singular value of [v | Lv | L²v] is within 10x of the rank threshold".into());
    }
    let lv = l * v;
    let llv = l * lv;

    let (params, conjugacy) = match rank {
        3 => {
            let tau = l.trace();
            let u = Matrix3::from_columns(&[lv, llv - lv * tau, v]);
            let c0 = affine_from(&u, &Vector3::zeros());
            let g = map.conjugate_by(&c0)?;
            let (y0, z0) = (g.constant()[1], g.constant()[2]);
            diag.values.insert("x0".into(), g.constant()[0]);
            diag.values.insert("y0".into(), y0);
            diag.values.insert("z0".into(), z0);
            diag.values.insert("tau_before_translation".into(), g.linear()[(0, 0)]);
            diag.values.insert("sigma_before_translation".into(), -g.linear()[(0, 1)]);
            let conj = affine_from(&u, &Vector3::new(0.0, y0, y0 + z0));
            let h = map.conjugate_by(&conj)?;
            if y0 != 0.0 {
                diag.notes.push(
                    "the translation moves the origin; tau and sigma are traces of Df at the new origin"
                        .into(),
                );
            }
            let p = NormalFormParams::CaseI {
                alpha: h.constant()[0],
                tau: h.linear()[(0, 0)],
                sigma: -h.linear()[(0, 1)],
                quad: read_quad(&h.quad()[0], 0, 1, 1.0),
            };
            (p, (conj, h))
        }
        2 => {
            // L²v = αLv − βv
            let m = DMatrix::from_columns(&[
                DVector::from_column_slice(lv.as_slice()),
                DVector::from_column_slice((-v).as_slice()),
            ]);
            let rhs = DVector::from_column_slice(llv.as_slice());
            let sol = m
                .svd(true, true)
                .solve(&rhs, 1e-14)
                .map_err(|e| Error::Degenerate(e.to_string()))?;
            let (alpha, beta) = (sol[0], sol[1]);
            if beta.abs() < 1e-12 {
                return Err(Error::Degenerate("beta vanishes in case II".into()));
            }
            let fit = (lv * alpha - v * beta - llv).amax();
            diag.values.insert("z_relation_residual".into(), fit);
            let lam = l.determinant() / beta;
            let w = eigenvector(&l, lam)?;
            let u = Matrix3::from_columns(&[lv, v, w]);
            let vol = u.determinant().abs() / (lv.norm() * v.norm() * w.norm());
            diag.values.insert("basis_volume".into(), vol);
            if vol < RANK_TOL {
                return Err(Error::Degenerate(
                    "eigenvector for 1/beta lies in Z(v, L)".into(),
                ));
            }
            let conj = affine_from(&u, &Vector3::zeros());
            let h = map.conjugate_by(&conj)?;
            let p = NormalFormParams::CaseII {
                x0: h.constant()[0],
                y0: h.constant()[1],
                z0: h.constant()[2],
                alpha: h.linear()[(0, 0)],
                beta: -h.linear()[(1, 0)],
                quad: read_quad(&h.quad()[0], 0, 2, 1.0),
            };
            (p, (conj, h))
        }
        _ => {
            let alpha = v.dot(&lv) / v.dot(&v);
            // columns of L − αI span the invariant complement of v
            let shifted = l - Matrix3::identity() * alpha;
            let mut best: Option<(f64, Vector3<f64>)> = None;
            for i in 0..3 {
                let w = shifted.column(i).into_owned();
                let nw = w.norm();
                if nw == 0.0 {
                    continue;
                }
                let w = w / nw;
                let lw = l * w;
                let vol = Matrix3::from_columns(&[v, w, lw]).determinant().abs()
                    / (v.norm() * lw.norm().max(f64::MIN_POSITIVE));
                if best.is_none_or(|(b, _)| vol > b) {
                    best = Some((vol, w));
                }
            }
            let (vol, w) = best.ok_or_else(|| Error::Degenerate("L = alpha I".into()))?;
            diag.values.insert("basis_volume".into(), vol);
            if vol < RANK_TOL {
                return Err(Error::Degenerate("no complement with dim Z(w, L) = 2".into()));
            }
            let lw = l * w;
            let llw = l * lw;
            let beta = l.trace() - alpha;
            // β by projecting L²w onto span{w, Lw}
            let m = DMatrix::from_columns(&[
                DVector::from_column_slice(lw.as_slice()),
                DVector::from_column_slice(w.as_slice()),
            ]);
            if let Ok(sol) = m
                .svd(true, true)
                .solve(&DVector::from_column_slice(llw.as_slice()), 1e-14)
            {
                diag.values.insert("beta_projection".into(), sol[0]);
            }
            diag.values.insert("beta_trace".into(), beta);
            let u = Matrix3::from_columns(&[v, w, lw]);
            let conj = affine_from(&u, &Vector3::zeros());
            let h = map.conjugate_by(&conj)?;
            let a = h.linear()[(0, 0)];
            let p = NormalFormParams::CaseIII {
                x0: h.constant()[0],
                y0: h.constant()[1],
                z0: h.constant()[2],
                alpha: a,
                beta: h.linear()[(2, 2)],
                quad: read_quad(&h.quad()[0], 1, 2, 1.0),
            };
            (p, (conj, h))
        }
    };
    let (conj, conjugated) = conjugacy;
    diag.conjugacy_residual = max_sample_residual(&conjugated, &params.to_quad_map());
    Ok(NormalForm {
        params,
        conjugacy: conj,
        diagnostics: diag,
    })
}

/// Eigenvector of `L` for the simple real eigenvalue `lam`: adjugate seed,
/// then inverse iteration.
fn eigenvector(l: &Matrix3<f64>, lam: f64) -> Result<Vector3<f64>> {
    let m = l - Matrix3::identity() * lam;
    let cof = |r: usize, c: usize| {
        let rows: Vec<usize> = (0..3).filter(|&i| i != r).collect();
        let cols: Vec<usize> = (0..3).filter(|&j| j != c).collect();
        let d = m[(rows[0], cols[0])] * m[(rows[1], cols[1])]
            - m[(rows[0], cols[1])] * m[(rows[1], cols[0])];
        if (r + c).is_multiple_of(2) {
            d
        } else {
            -d
        }
    };
    // adj(M) = cofactor matrixᵀ; its columns lie in ker M when rank M = 2
    let adj = Matrix3::from_fn(|i, j| cof(j, i));
    let mut seed: Option<(f64, Vector3<f64>)> = None;
    for j in 0..3 {
        let col = adj.column(j).into_owned();
        let n = col.norm();
        if n == 0.0 {
            continue;
        }
        let col = col / n;
        let res = (m * col).norm();
        if seed.is_none_or(|(r, _)| res < r) {
            seed = Some((res, col));
        }
    }
    let mut w = seed
        .map(|(_, c)| c)
        .ok_or_else(|| Error::Degenerate("eigenvalue is not simple".into()))?;
    let shift = lam + 1e-10 * (1.0 + lam.abs()) * (1.0 + l.amax());
    let solver = (l - Matrix3::identity() * shift).lu();
    for _ in 0..3 {
        match solver.solve(&w) {
            Some(next) if next.iter().all(|x| x.is_finite()) && next.norm() > 0.0 => {
                w = next / next.norm();
            }
            _ => break,
        }
    }
    Ok(w)
}

/// Outcome of the σ-removing translation and `a + b + c = 1` scaling.
#[derive(Clone, Debug, PartialEq)]
pub enum GenericReduction {
    Generic(NormalForm),
    /// Returned untransformed.
    NonGeneric {
        reason: NonGenericReason,
        form: NormalForm,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NonGenericReason {
    /// `a + b + c = 0`
    SumZero,
    /// `b + 2c = 0`
    Translation,
}

/// Conjugates a case I form by `x ↦ μx + γ(1, 1, 1)` with `γ = σ/(b + 2c)`
/// and `μ = 1/(a + b + c)`, giving `σ = 0` and `a + b + c = 1`.
pub fn reduce_generic(nf: &NormalForm, tol: f64) -> Result<GenericReduction> {
    let NormalFormParams::CaseI { sigma, quad, .. } = nf.params else {
        return Err(Error::NotApplicable("generic reduction needs a case I form".into()));
    };
    let sum = quad.sum();
    if sum.abs() <= tol {
        return Ok(GenericReduction::NonGeneric {
            reason: NonGenericReason::SumZero,
            form: nf.clone(),
        });
    }
    let den = quad.b + 2.0 * quad.c;
    let gamma = if sigma == 0.0 {
        0.0
    } else if den.abs() <= tol {
        return Ok(GenericReduction::NonGeneric {
            reason: NonGenericReason::Translation,
            form: nf.clone(),
        });
    } else {
        sigma / den
    };
    let mu = 1.0 / sum;
    let extra = AffineMap {
        linear: DMatrix::identity(3, 3) * mu,
        constant: DVector::from_element(3, gamma),
    };
    let nf_map = nf.to_quad_map();
    let h = nf_map.conjugate_by(&extra)?;
    let params = NormalFormParams::CaseI {
        alpha: h.constant()[0],
        tau: h.linear()[(0, 0)],
        sigma: -h.linear()[(0, 1)],
        quad: read_quad(&h.quad()[0], 0, 1, 1.0),
    };
    let mut diag = nf.diagnostics.clone();
    diag.values.insert("gamma".into(), gamma);
    diag.values.insert("scale".into(), mu);
    let own = max_sample_residual(&h, &params.to_quad_map());
    diag.values.insert("generic_step_residual".into(), own);
    diag.conjugacy_residual = diag.conjugacy_residual.max(own);
    Ok(GenericReduction::Generic(NormalForm {
        params,
        conjugacy: nf.conjugacy.compose(&extra),
        diagnostics: diag,
    }))
}

/// Conjugacy residual of `nf` against the map it claims to normalize.
pub fn conjugacy_residual(map: &QuadMap, nf: &NormalForm) -> Result<f64> {
    let h = map.conjugate_by(&nf.conjugacy)?;
    Ok(max_sample_residual(&h, &nf.to_quad_map()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjugacyFile {
    pub linear: Vec<Vec<f64>>,
    #[serde(rename = "const")]
    pub constant: Vec<f64>,
}

impl From<&AffineMap> for ConjugacyFile {
    fn from(a: &AffineMap) -> Self {
        let n = a.dim();
        ConjugacyFile {
            linear: (0..n).map(|i| (0..n).map(|j| a.linear[(i, j)]).collect()).collect(),
            constant: a.constant.iter().copied().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenericFile {
    pub alpha: f64,
    pub tau: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// JSON normal-form report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalFormFile {
    pub case: String,
    pub params: BTreeMap<String, f64>,
    pub conjugacy: Option<ConjugacyFile>,
    pub shear: Option<crate::shear::ShearFile>,
    pub generic: Option<GenericFile>,
    pub generic_conjugacy: Option<ConjugacyFile>,
    pub non_generic: Option<NonGenericReason>,
    pub diagnostics: Option<Diagnostics>,
}

impl NormalFormFile {
    pub fn affine() -> Self {
        NormalFormFile {
            case: "affine".into(),
            params: BTreeMap::new(),
            conjugacy: None,
            shear: None,
            generic: None,
            generic_conjugacy: None,
            non_generic: None,
            diagnostics: None,
        }
    }

    pub fn new(nf: &NormalForm, shear: &ShearData, generic: Option<&GenericReduction>) -> Self {
        let case = match nf.case() {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
        };
        let (g, gc, ng) = match generic {
            Some(GenericReduction::Generic(f)) => match f.params {
                NormalFormParams::CaseI {
                    alpha, tau, quad, ..
                } => (
                    Some(GenericFile {
                        alpha,
                        tau,
                        a: quad.a,
                        b: quad.b,
                        c: quad.c,
                    }),
                    Some(ConjugacyFile::from(&f.conjugacy)),
                    None,
                ),
                _ => (None, None, None),
            },
            Some(GenericReduction::NonGeneric { reason, .. }) => (None, None, Some(*reason)),
            None => (None, None, None),
        };
        NormalFormFile {
            case: case.into(),
            params: nf.params.to_map(),
            conjugacy: Some(ConjugacyFile::from(&nf.conjugacy)),
            shear: Some(shear.to_file()),
            generic: g,
            generic_conjugacy: gc,
            non_generic: ng,
            diagnostics: Some(nf.diagnostics.clone()),
        }
    }
}

/// Parameters of the case I form (α, τ, σ, Q) read back from a report.
pub fn case_i_from_params(params: &BTreeMap<String, f64>) -> Result<NormalFormParams> {
    let get = |k: &str| {
        params
            .get(k)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("missing parameter {k}")))
    };
    Ok(NormalFormParams::CaseI {
        alpha: get("alpha")?,
        tau: get("tau")?,
        sigma: get("sigma")?,
        quad: QuadraticForm2::new(get("a")?, get("b")?, get("c")?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shear::build_shear;
    use crate::polymap::compose;

    fn cyclic() -> Matrix3<f64> {
        Matrix3::new(0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0)
    }

    #[test]
    fn z_dimension_examples() {
        assert_eq!(z_dimension(&Vector3::z(), &cyclic()).unwrap(), 3);
        let l = Matrix3::from_diagonal(&Vector3::new(2.0, 0.5, 1.0));
        assert_eq!(z_dimension(&Vector3::x(), &l).unwrap(), 1);
        // rotation block in the (x, y) plane, v in that plane
        let l = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
        assert_eq!(z_dimension(&Vector3::x(), &l).unwrap(), 2);
        assert!(matches!(
            z_dimension(&Vector3::zeros(), &l),
            Err(Error::Affine)
        ));
    }

    #[test]
    fn permutation_times_shear_is_case_i_with_zero_traces() {
        let s = ShearData::new(
            Vector3::z(),
            Matrix3::from_diagonal(&Vector3::new(1.0, 0.0, 0.0)),
            DEFAULT_TOL,
        )
        .unwrap();
        let t = AffineMap::new(to_dmatrix(&cyclic()), DVector::zeros(3)).unwrap();
        let f = compose(&t.to_quad_map(), &build_shear(&s))
            .unwrap()
            .into_quad()
            .unwrap();
        let nf = to_normal_form(&f).unwrap();
        match nf.params {
            NormalFormParams::CaseI { tau, sigma, .. } => {
                assert!(tau.abs() < 1e-14);
                assert!(sigma.abs() < 1e-14);
            }
            _ => panic!("expected case I"),
        }
        assert!(nf.diagnostics.conjugacy_residual < 1e-12);
    }

    #[test]
    fn generic_scaling_example() {
        let params = NormalFormParams::CaseI {
            alpha: 0.3,
            tau: 0.1,
            sigma: 0.0,
            quad: QuadraticForm2::new(2.0, 0.0, 2.0),
        };
        let nf = to_normal_form(&params.to_quad_map()).unwrap();
        let GenericReduction::Generic(g) = reduce_generic(&nf, DEFAULT_TOL).unwrap() else {
            panic!("generic input");
        };
        let q = g.params.quad();
        assert!((q.a - 0.5).abs() < 1e-14 && q.b.abs() < 1e-14 && (q.c - 0.5).abs() < 1e-14);
    }

    #[test]
    fn non_generic_inputs_are_flagged() {
        let params = NormalFormParams::CaseI {
            alpha: 0.0,
            tau: 0.0,
            sigma: 1.0,
            quad: QuadraticForm2::new(1.0, -2.0, 1.0),
        };
        let nf = NormalForm {
            params,
            conjugacy: AffineMap::identity(3),
            diagnostics: Diagnostics::default(),
        };
        assert!(matches!(
            reduce_generic(&nf, DEFAULT_TOL).unwrap(),
            GenericReduction::NonGeneric {
                reason: NonGenericReason::SumZero,
                ..
            }
        ));
        let nf = NormalForm {
            params: NormalFormParams::CaseI {
                alpha: 0.0,
                tau: 0.0,
                sigma: 1.0,
                quad: QuadraticForm2::new(1.0, 2.0, -1.0),
            },
            ..nf
        };
        assert!(matches!(
            reduce_generic(&nf, DEFAULT_TOL).unwrap(),
            GenericReduction::NonGeneric {
                reason: NonGenericReason::Translation,
                ..
            }
        ));
    }

    #[test]
    fn quadratic_form_predicates() {
        let q = QuadraticForm2::new(0.5, 0.0, 0.5);
        assert_eq!(q.d(), 0.25);
        assert!(q.is_positive_definite());
        assert!(!QuadraticForm2::new(0.5, 1.0, 0.5).is_positive_definite());
        assert_eq!(q.eval(2.0, 0.0), 2.0);
    }
}
