//! Sparse multivariate polynomials with `f64` coefficients.
//!
//! These are used where an identity has to hold for every `x`: the identity is
//! expanded in the monomial basis and every coefficient is inspected. Nothing
//! here is sampled.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

/// Exponent vector of a monomial, one entry per variable.
pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = vec![0; nvars];
        m[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(m, 1.0);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn coeff(&self, m: &[u32]) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    pub fn add_term(&mut self, m: Monomial, c: f64) {
        debug_assert_eq!(m.len(), self.nvars);
        if c == 0.0 {
            return;
        }
        let e = self.terms.entry(m).or_insert(0.0);
        *e += c;
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .filter(|(_, c)| **c != 0.0)
            .map(|(m, _)| m.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                c * m
                    .iter()
                    .zip(x)
                    .map(|(&e, &xi)| xi.powi(e as i32))
                    .product::<f64>()
            })
            .sum()
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |acc, c| acc.max(c.abs()))
    }

    /// Largest coefficient magnitude among monomials of total degree `> d`.
    pub fn max_abs_coeff_above(&self, d: u32) -> f64 {
        self.terms
            .iter()
            .filter(|(m, _)| m.iter().sum::<u32>() > d)
            .fold(0.0, |acc, (_, c)| acc.max(c.abs()))
    }

    /// Homogeneous component of total degree `d`.
    pub fn homogeneous(&self, d: u32) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.iter().sum::<u32>() == d)
                .map(|(m, c)| (m.clone(), *c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Poly::constant(self.nvars, 1.0);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Substitute `x_i ↦ g[i]`. All `g[i]` must share the same variable count.
    pub fn compose(&self, g: &[Poly]) -> Poly {
        assert_eq!(g.len(), self.nvars, "substitution arity mismatch");
        let out_vars = g.first().map(|p| p.nvars).unwrap_or(0);
        // cache powers of each substituted component
        let max_exp: Vec<u32> = (0..self.nvars)
            .map(|i| self.terms.keys().map(|m| m[i]).max().unwrap_or(0))
            .collect();
        let powers: Vec<Vec<Poly>> = g
            .iter()
            .zip(&max_exp)
            .map(|(gi, &e)| {
                let mut v = vec![Poly::constant(out_vars, 1.0)];
                for k in 1..=e as usize {
                    let next = &v[k - 1] * gi;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = Poly::zero(out_vars);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(out_vars, *c);
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Drop coefficients with magnitude `<= tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.abs() > tol)
                .map(|(m, c)| (m.clone(), *c))
                .collect(),
        }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -*c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

/// A vector of polynomials in a common set of variables, i.e. a polynomial map.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap {
    pub components: Vec<Poly>,
}

impl PolyMap {
    pub fn identity(n: usize) -> Self {
        PolyMap {
            components: (0..n).map(|i| Poly::var(n, i)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.components.iter().map(|p| p.eval(x)).collect()
    }

    pub fn degree(&self) -> u32 {
        self.components.iter().map(Poly::degree).max().unwrap_or(0)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolyMap) -> PolyMap {
        PolyMap {
            components: self
                .components
                .iter()
                .map(|p| p.compose(&inner.components))
                .collect(),
        }
    }

    /// Largest coefficient difference between two maps, over every monomial.
    pub fn max_coeff_diff(&self, other: &PolyMap) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| (a - b).max_abs_coeff())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coeff_above(&self, d: u32) -> f64 {
        self.components
            .iter()
            .map(|p| p.max_abs_coeff_above(d))
            .fold(0.0, f64::max)
    }
}

/// Homogeneous matrix-valued polynomial in `nvars` variables, stored as a map from
/// exponent vectors to dense coefficient matrices.
#[derive(Clone, Debug)]
pub struct MatPoly {
    nvars: usize,
    rows: usize,
    cols: usize,
    terms: BTreeMap<Monomial, DMatrix<f64>>,
}

impl MatPoly {
    /// `Σ_k x_k · mats[k]`.
    pub fn linear(mats: &[DMatrix<f64>]) -> Self {
        let nvars = mats.len();
        let (rows, cols) = mats.first().map(|m| m.shape()).unwrap_or((0, 0));
        let mut terms = BTreeMap::new();
        for (k, m) in mats.iter().enumerate() {
            let mut e = vec![0; nvars];
            e[k] = 1;
            terms.insert(e, m.clone());
        }
        MatPoly {
            nvars,
            rows,
            cols,
            terms,
        }
    }

    /// The column vector `x` itself, as an `n × 1` linear polynomial.
    pub fn coordinate_vector(n: usize) -> Self {
        let cols: Vec<DMatrix<f64>> = (0..n)
            .map(|k| {
                let mut c = DMatrix::zeros(n, 1);
                c[(k, 0)] = 1.0;
                c
            })
            .collect();
        Self::linear(&cols)
    }

    pub fn mul(&self, rhs: &MatPoly) -> MatPoly {
        assert_eq!(self.nvars, rhs.nvars);
        assert_eq!(self.cols, rhs.rows);
        let mut terms: BTreeMap<Monomial, DMatrix<f64>> = BTreeMap::new();
        for (ma, a) in &self.terms {
            for (mb, b) in &rhs.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                let prod = a * b;
                terms
                    .entry(m)
                    .and_modify(|acc| *acc += &prod)
                    .or_insert(prod);
            }
        }
        MatPoly {
            nvars: self.nvars,
            rows: self.rows,
            cols: rhs.cols,
            terms,
        }
    }

    pub fn pow(&self, k: u32) -> MatPoly {
        assert!(k >= 1);
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Largest coefficient entry over all monomials: zero iff the polynomial
    /// vanishes identically.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|m| m.amax())
            .fold(0.0, f64::max)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }
}
