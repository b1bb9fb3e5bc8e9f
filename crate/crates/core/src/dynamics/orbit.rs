//! Orbits in third-difference form and the escape cube for positive-definite `Q`.

use nalgebra::Vector3;
use serde::Serialize;

use super::GenericMapParams;
use crate::error::{Error, Result};
use crate::normalform::QuadraticForm2;

/// Tail length bound after escape is certified.
const TAIL_MAX: usize = 200;
/// The tail stops once `|x|` exceeds this.
const TAIL_HUGE: f64 = 1e100;
const TAIL_RATIO: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    BoundedSoFar,
    EscapedForward,
    EscapedBackward,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitRecord {
    pub direction: Direction,
    /// `(x_t, x_{t−1}, x_{t−2})` in the order visited.
    pub states: Vec<Vector3<f64>>,
    pub verdict: Verdict,
    /// Index into `states` where escape was certified.
    pub escape_time: Option<usize>,
    /// The orbit left the representable range.
    pub overflow: bool,
    pub kappa: Option<f64>,
}

impl OrbitRecord {
    /// Scalar sequence `x_{−2}, x_{−1}, x_0, x_1, …` (forward) or
    /// `x_0, x_{−1}, x_{−2}, x_{−3}, …` (backward).
    pub fn scalars(&self) -> Vec<f64> {
        let Some(first) = self.states.first() else {
            return vec![];
        };
        match self.direction {
            Direction::Forward => {
                let mut v = vec![first[2], first[1], first[0]];
                v.extend(self.states.iter().skip(1).map(|s| s[0]));
                v
            }
            Direction::Backward => {
                let mut v = vec![first[0], first[1], first[2]];
                v.extend(self.states.iter().skip(1).map(|s| s[2]));
                v
            }
        }
    }
}

/// `κ` of the escape theorem, as printed:
/// `(m/2d)(K + √(K² + 4|α|m/d))`, `m = max(a, c)`, `K = |τ| + |σ| + 2`.
pub fn escape_bound_printed(q: &QuadraticForm2, alpha: f64, tau: f64, sigma: f64) -> Result<f64> {
    let (m, d, k) = bound_terms(q, tau, sigma)?;
    Ok(m / (2.0 * d) * (k + (k * k + 4.0 * alpha.abs() * m / d).sqrt()))
}

/// Positive root of `(d/m)x² − Kx − |α| = 0`, the threshold the case analysis
/// needs.
pub fn escape_bound_threshold(q: &QuadraticForm2, alpha: f64, tau: f64, sigma: f64) -> Result<f64> {
    let (m, d, k) = bound_terms(q, tau, sigma)?;
    Ok(m / (2.0 * d) * (k + (k * k + 4.0 * alpha.abs() * d / m).sqrt()))
}

fn bound_terms(q: &QuadraticForm2, tau: f64, sigma: f64) -> Result<(f64, f64, f64)> {
    if !q.is_positive_definite() {
        return Err(Error::NotPositiveDefinite {
            a: q.a,
            c: q.c,
            d: q.d(),
        });
    }
    Ok((q.a.max(q.c), q.d(), tau.abs() + sigma.abs() + 2.0))
}

/// Half-width of the cube containing every bounded orbit: the larger of the
/// printed formula and the threshold derived from the case analysis.
pub fn escape_bound(q: &QuadraticForm2, alpha: f64, tau: f64, sigma: f64) -> Result<f64> {
    Ok(escape_bound_printed(q, alpha, tau, sigma)?
        .max(escape_bound_threshold(q, alpha, tau, sigma)?))
}

fn ratios_small(s: &Vector3<f64>, dir: Direction) -> bool {
    match dir {
        Direction::Forward => {
            (s[1] / s[0]).abs() < TAIL_RATIO && (s[2] / s[1]).abs() < TAIL_RATIO
        }
        Direction::Backward => {
            (s[1] / s[2]).abs() < TAIL_RATIO && (s[0] / s[1]).abs() < TAIL_RATIO
        }
    }
}

fn triggered(s: &Vector3<f64>, kappa: f64, dir: Direction) -> bool {
    let (x, y, z) = (s[0].abs(), s[1].abs(), s[2].abs());
    match dir {
        Direction::Forward => x > kappa && x >= y && x >= z,
        Direction::Backward => z > kappa && z >= x && z >= y,
    }
}

/// Iterates `n_steps` times. For positive-definite `Q`, escape is certified
/// as soon as the leading coordinate exceeds `κ` and dominates the others;
/// the orbit is then continued for a short tail (beyond `n_steps` if needed)
/// until the asymptotic ratios are small.
pub fn iterate(
    p: &GenericMapParams,
    x0: &Vector3<f64>,
    n_steps: usize,
    direction: Direction,
) -> OrbitRecord {
    let kappa = escape_bound(&p.quad, p.alpha, p.tau, p.sigma).ok();
    let step = |s: &Vector3<f64>| match direction {
        Direction::Forward => p.apply(s),
        Direction::Backward => p.apply_inverse(s),
    };
    let mut states = vec![*x0];
    let mut escape_time = None;
    let mut overflow = false;
    let escaped = match direction {
        Direction::Forward => Verdict::EscapedForward,
        Direction::Backward => Verdict::EscapedBackward,
    };
    let mut verdict = Verdict::BoundedSoFar;
    if let Some(k) = kappa {
        if triggered(x0, k, direction) {
            escape_time = Some(0);
            verdict = escaped;
        }
    }
    let mut tail = 0;
    loop {
        let cur = *states.last().expect("nonempty");
        if escape_time.is_some() {
            let lead = match direction {
                Direction::Forward => cur[0],
                Direction::Backward => cur[2],
            };
            if tail >= TAIL_MAX || lead.abs() > TAIL_HUGE || ratios_small(&cur, direction) {
                break;
            }
            tail += 1;
        } else if states.len() > n_steps {
            break;
        }
        let next = step(&cur);
        if !next.iter().all(|v| v.is_finite()) {
            overflow = true;
            verdict = escaped;
            if escape_time.is_none() {
                escape_time = Some(states.len() - 1);
            }
            break;
        }
        states.push(next);
        if escape_time.is_none() {
            if let Some(k) = kappa {
                if triggered(&next, k, direction) {
                    escape_time = Some(states.len() - 1);
                    verdict = escaped;
                }
            }
        }
    }
    OrbitRecord {
        direction,
        states,
        verdict,
        escape_time,
        overflow,
        kappa,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoticDirection {
    PlusX,
    MinusZ,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub direction: AsymptoticDirection,
    /// `|y/x|, |z/y|` (forward) or `|y/z|, |x/y|` (backward) at the last state.
    pub ratios: [f64; 2],
}

/// `+x` for forward escapes and `−z` for backward ones, with the final-step
/// coordinate ratios.
pub fn asymptotic_direction(orbit: &OrbitRecord) -> Result<AsymptoticReport> {
    let last = orbit.states.last().ok_or(Error::NotEscaped)?;
    match orbit.verdict {
        Verdict::BoundedSoFar => Err(Error::NotEscaped),
        Verdict::EscapedForward => {
            if last[0] <= 0.0 {
                return Err(Error::NotEscaped);
            }
            Ok(AsymptoticReport {
                direction: AsymptoticDirection::PlusX,
                ratios: [(last[1] / last[0]).abs(), (last[2] / last[1]).abs()],
            })
        }
        Verdict::EscapedBackward => {
            if last[2] >= 0.0 {
                return Err(Error::NotEscaped);
            }
            Ok(AsymptoticReport {
                direction: AsymptoticDirection::MinusZ,
                ratios: [(last[1] / last[2]).abs(), (last[0] / last[1]).abs()],
            })
        }
    }
}
