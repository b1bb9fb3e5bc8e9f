//! Roots of `λ³ − tλ² + sλ − 1` and the stability class of a fixed point.

use num_complex::Complex64;
use serde::Serialize;

/// Distance to `±1` below which a root is taken to lie on a stability line.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// One-dimensional unstable manifold.
    TypeA,
    /// One-dimensional stable manifold.
    TypeB,
    /// An eigenvalue `+1` (`t = s`).
    SaddleNode,
    /// An eigenvalue `−1` (`t + s = −2`).
    PeriodDoubling,
    /// All eigenvalues on the unit circle away from `±1`.
    EllipticPair,
}

impl Classification {
    pub fn code(&self) -> &'static str {
        match self {
            Classification::TypeA => "A",
            Classification::TypeB => "B",
            Classification::SaddleNode => "SN",
            Classification::PeriodDoubling => "PD",
            Classification::EllipticPair => "E",
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        matches!(self, Classification::TypeA | Classification::TypeB)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub t: f64,
    pub s: f64,
    /// Real root first; a complex pair follows with positive imaginary part first.
    pub eigenvalues: [Complex64; 3],
    pub classification: Classification,
}

impl StabilityReport {
    pub fn has_complex_pair(&self) -> bool {
        self.eigenvalues[1].im != 0.0
    }

    /// Argument of the complex eigenvalue in the upper half plane.
    pub fn phase(&self) -> Option<f64> {
        if self.has_complex_pair() {
            Some(self.eigenvalues[1].arg().abs())
        } else {
            None
        }
    }
}

fn residual(t: f64, s: f64, l: f64) -> f64 {
    ((l - t) * l + s) * l - 1.0
}

fn polish(t: f64, s: f64, l: f64) -> f64 {
    let r0 = residual(t, s, l);
    let d = (3.0 * l - 2.0 * t) * l + s;
    if d == 0.0 || r0 == 0.0 {
        return l;
    }
    let l1 = l - r0 / d;
    if residual(t, s, l1).abs() < r0.abs() {
        l1
    } else {
        l
    }
}

/// Roots of `λ³ − tλ² + sλ − 1 = 0` via the depressed cubic `μ³ + pμ + q`
/// with `λ = μ + t/3`.
pub fn cubic_roots(t: f64, s: f64) -> [Complex64; 3] {
    let p = s - t * t / 3.0;
    let q = -2.0 * t * t * t / 27.0 + t * s / 3.0 - 1.0;
    let shift = t / 3.0;
    let scale = 4.0 * p.abs().powi(3) + 27.0 * q * q;
    let disc = -(4.0 * p * p * p + 27.0 * q * q);
    let near_double = disc.abs() <= 1e-14 * scale;
    if near_double {
        if p == 0.0 && q == 0.0 {
            let r = Complex64::new(shift, 0.0);
            return [r, r, r];
        }
        // μ₁ = 2m, μ₂ = μ₃ = −m with m = cbrt(−q/2)
        let m = (-0.5 * q).cbrt();
        let single = polish(t, s, 2.0 * m + shift);
        let double = -m + shift;
        let mut roots = [single, double, double];
        roots.sort_by(|a, b| b.total_cmp(a));
        return roots_from_real(roots);
    }
    if disc > 0.0 {
        let r = (-p / 3.0).sqrt();
        let arg = ((3.0 * q) / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let mut roots = [0.0; 3];
        for (k, root) in roots.iter_mut().enumerate() {
            let mu = 2.0 * r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
            *root = polish(t, s, mu + shift);
        }
        roots.sort_by(|a, b| b.total_cmp(a));
        return roots_from_real(roots);
    }
    let sq = (0.25 * q * q + p * p * p / 27.0).sqrt();
    let u = (-0.5 * q + sq).cbrt();
    let v = (-0.5 * q - sq).cbrt();
    let l1 = polish(t, s, u + v + shift);
    // remaining pair: λ² − (t − λ₁)λ + 1/λ₁ = 0
    let bsum = t - l1;
    let prod = 1.0 / l1;
    let d = bsum * bsum - 4.0 * prod;
    if d >= 0.0 {
        let sq = d.sqrt();
        let r1 = 0.5 * (bsum + bsum.signum() * sq);
        let r2 = if r1 != 0.0 { prod / r1 } else { 0.5 * (bsum - sq) };
        let mut roots = [l1, polish(t, s, r1), polish(t, s, r2)];
        roots.sort_by(|a, b| b.total_cmp(a));
        return roots_from_real(roots);
    }
    let im = 0.5 * (-d).sqrt();
    [
        Complex64::new(l1, 0.0),
        Complex64::new(0.5 * bsum, im),
        Complex64::new(0.5 * bsum, -im),
    ]
}

fn roots_from_real(r: [f64; 3]) -> [Complex64; 3] {
    [
        Complex64::new(r[0], 0.0),
        Complex64::new(r[1], 0.0),
        Complex64::new(r[2], 0.0),
    ]
}

/// Eigenvalues and class of the linearization with trace `t`, second trace `s`
/// and determinant one.
pub fn classify_stability(t: f64, s: f64) -> StabilityReport {
    let eigenvalues = cubic_roots(t, s);
    let near = |target: f64| {
        eigenvalues
            .iter()
            .any(|l| (l - Complex64::new(target, 0.0)).norm() < BOUNDARY_TOL)
    };
    let classification = if near(1.0) {
        Classification::SaddleNode
    } else if near(-1.0) {
        Classification::PeriodDoubling
    } else {
        let outside = eigenvalues
            .iter()
            .filter(|l| l.norm() > 1.0 + BOUNDARY_TOL)
            .count();
        let inside = eigenvalues
            .iter()
            .filter(|l| l.norm() < 1.0 - BOUNDARY_TOL)
            .count();
        if outside == 1 {
            Classification::TypeA
        } else if inside == 1 {
            Classification::TypeB
        } else {
            Classification::EllipticPair
        }
    };
    StabilityReport {
        t,
        s,
        eigenvalues,
        classification,
    }
}
