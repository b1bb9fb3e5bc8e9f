//! Degeneracy test for the `2^n` bound on fixed points of `f^n`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::normalform::QuadraticForm2;

/// `|μ₊^k μ₋^(n−k) − 1|` below this counts as a violation.
pub const PRODUCT_TOL: f64 = 1e-9;

pub const QUANTIFIER_NOTE: &str = "the lemma is stated with 'for some k'; its proof needs every \
product to differ from 1, so the bound is certified only when no k gives 1";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicBound {
    pub n: usize,
    /// Roots of `aμ² + bμ + c`; `None` stands for a root at infinity.
    pub mu_plus: Option<Complex64>,
    pub mu_minus: Option<Complex64>,
    /// `μ₊^k μ₋^(n−k)` for `k = 0..=n`; `None` when infinite.
    pub products: Vec<Option<Complex64>>,
    pub violating_k: Vec<usize>,
    pub bound_2n: bool,
    pub note: &'static str,
}

fn roots(q: &QuadraticForm2) -> (Option<Complex64>, Option<Complex64>) {
    let (a, b, c) = (q.a, q.b, q.c);
    if a == 0.0 {
        if b == 0.0 {
            return (None, None);
        }
        return (Some(Complex64::new(-c / b, 0.0)), None);
    }
    let disc = Complex64::new(b * b - 4.0 * a * c, 0.0).sqrt();
    let bb = Complex64::new(b, 0.0);
    // pick the sign that avoids cancellation, recover the other from c/a
    let qq = if b >= 0.0 { -(bb + disc) * 0.5 } else { -(bb - disc) * 0.5 };
    if qq.norm() == 0.0 {
        return (Some(Complex64::new(0.0, 0.0)), Some(Complex64::new(0.0, 0.0)));
    }
    (Some(qq / a), Some(Complex64::new(c, 0.0) / qq))
}

fn product(mp: Option<Complex64>, mm: Option<Complex64>, k: usize, n: usize) -> Option<Complex64> {
    let pow = |m: Option<Complex64>, e: usize| -> Option<Complex64> {
        if e == 0 {
            return Some(Complex64::new(1.0, 0.0));
        }
        m.map(|v| v.powu(e as u32))
    };
    Some(pow(mp, k)? * pow(mm, n - k)?)
}

/// Checks `μ₊^k μ₋^(n−k) ≠ 1` for every `k = 0..=n`.
pub fn periodic_count_bound(q: &QuadraticForm2, n: usize) -> Result<PeriodicBound> {
    if q.a == 0.0 && q.c == 0.0 {
        return Err(Error::InvalidInput("a and c both vanish".into()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    let (mp, mm) = roots(q);
    let products: Vec<Option<Complex64>> = (0..=n).map(|k| product(mp, mm, k, n)).collect();
    let violating_k: Vec<usize> = products
        .iter()
        .enumerate()
        .filter(|(_, p)| matches!(p, Some(v) if (v - Complex64::new(1.0, 0.0)).norm() < PRODUCT_TOL))
        .map(|(k, _)| k)
        .collect();
    Ok(PeriodicBound {
        n,
        mu_plus: mp,
        mu_minus: mm,
        products,
        bound_2n: violating_k.is_empty(),
        violating_k,
        note: QUANTIFIER_NOTE,
    })
}
