//! Stability diagrams over `(τ, α)` at fixed `σ` and `Q`, or over `(t, s)`.

use rayon::prelude::*;
use serde::Serialize;

use super::cubic::{classify_stability, Classification};
use super::{fixed_points, GenericMapParams, Which};
use crate::error::{Error, Result};
use crate::normalform::QuadraticForm2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Plane {
    /// Horizontal `τ`, vertical `α`.
    TauAlpha,
    /// Horizontal `t`, vertical `s`.
    TraceSecondTrace,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub plane: Plane,
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl GridSpec {
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / self.ny as f64
    }

    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.x_min + (i as f64 + 0.5) * self.dx(),
            self.y_min + (j as f64 + 0.5) * self.dy(),
        )
    }

    fn validate(&self) -> Result<()> {
        let ok = self.nx > 0
            && self.ny > 0
            && self.x_max > self.x_min
            && self.y_max > self.y_min
            && [self.x_min, self.x_max, self.y_min, self.y_max]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput("empty or non-finite grid".into()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointClass {
    pub classification: Classification,
    pub complex: bool,
    /// Argument of the upper complex eigenvalue, radians.
    pub phase: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagramCell {
    pub i: usize,
    pub j: usize,
    pub x: f64,
    pub y: f64,
    /// Number of fixed points; `None` on the `(t, s)` plane.
    pub count: Option<usize>,
    pub plus: Option<PointClass>,
    pub minus: Option<PointClass>,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Curve {
    pub name: String,
    /// Polyline pieces inside the plotting window.
    pub pieces: Vec<Vec<[f64; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityDiagram {
    pub grid: GridSpec,
    pub quad: QuadraticForm2,
    pub sigma: f64,
    /// Row-major with `j` (vertical) outer.
    pub cells: Vec<DiagramCell>,
    pub curves: Vec<Curve>,
}

fn point_class(t: f64, s: f64) -> PointClass {
    let r = classify_stability(t, s);
    PointClass {
        classification: r.classification,
        complex: r.has_complex_pair(),
        phase: r.phase(),
    }
}

fn code(p: &PointClass) -> String {
    format!("{}{}", p.classification.code(), if p.complex { "c" } else { "r" })
}

fn cell(grid: &GridSpec, quad: QuadraticForm2, sigma: f64, i: usize, j: usize) -> DiagramCell {
    let (x, y) = grid.center(i, j);
    match grid.plane {
        Plane::TraceSecondTrace => {
            let pc = point_class(x, y);
            DiagramCell {
                i,
                j,
                x,
                y,
                count: None,
                label: code(&pc),
                plus: Some(pc),
                minus: None,
            }
        }
        Plane::TauAlpha => {
            let p = GenericMapParams {
                alpha: y,
                tau: x,
                sigma,
                quad,
            };
            let fps = fixed_points(&p).expect("normalized before the sweep");
            let mut plus = None;
            let mut minus = None;
            for f in &fps {
                let r = PointClass {
                    classification: f.classification,
                    complex: f.eigenvalues[1].im != 0.0,
                    phase: if f.eigenvalues[1].im != 0.0 {
                        Some(f.eigenvalues[1].arg().abs())
                    } else {
                        None
                    },
                };
                match f.which {
                    Which::Minus => minus = Some(r),
                    Which::Plus | Which::Double => plus = Some(r),
                }
            }
            let label = match (&plus, &minus) {
                (None, _) => "none".to_string(),
                (Some(p), None) => code(p),
                (Some(p), Some(m)) => format!("{}/{}", code(p), code(m)),
            };
            DiagramCell {
                i,
                j,
                x,
                y,
                count: Some(fps.len()),
                plus,
                minus,
                label,
            }
        }
    }
}

/// Labels every cell and samples the analytic boundary curves.
pub fn stability_diagram(
    grid: &GridSpec,
    quad: QuadraticForm2,
    sigma: f64,
) -> Result<StabilityDiagram> {
    grid.validate()?;
    if grid.plane == Plane::TauAlpha && (quad.sum() - 1.0).abs() > super::NORMALIZATION_TOL {
        return Err(Error::NotNormalized(quad.sum()));
    }
    let cells: Vec<DiagramCell> = (0..grid.nx * grid.ny)
        .into_par_iter()
        .map(|k| cell(grid, quad, sigma, k % grid.nx, k / grid.nx))
        .collect();
    Ok(StabilityDiagram {
        grid: *grid,
        quad,
        sigma,
        cells,
        curves: boundary_curves(grid, quad, sigma),
    })
}

const CURVE_SAMPLES: usize = 4000;

/// `2r + 1/r² = t`, `r² + 2/r = s` for `r` in `[−3, −0.3] ∪ [0.3, 3]`.
fn double_root_ts() -> Vec<Vec<[f64; 2]>> {
    let branch = |lo: f64, hi: f64| -> Vec<[f64; 2]> {
        (0..=CURVE_SAMPLES)
            .map(|k| {
                let r = lo + (hi - lo) * k as f64 / CURVE_SAMPLES as f64;
                [2.0 * r + 1.0 / (r * r), r * r + 2.0 / r]
            })
            .collect()
    };
    vec![branch(-3.0, -0.3), branch(0.3, 3.0)]
}

fn clip(grid: &GridSpec, pts: impl IntoIterator<Item = [f64; 2]>) -> Vec<Vec<[f64; 2]>> {
    let (mx, my) = (grid.dx(), grid.dy());
    let inside = |p: &[f64; 2]| {
        p[0].is_finite()
            && p[1].is_finite()
            && p[0] >= grid.x_min - mx
            && p[0] <= grid.x_max + mx
            && p[1] >= grid.y_min - my
            && p[1] <= grid.y_max + my
    };
    let mut pieces = Vec::new();
    let mut cur: Vec<[f64; 2]> = Vec::new();
    for p in pts {
        if inside(&p) {
            cur.push(p);
        } else if !cur.is_empty() {
            pieces.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        pieces.push(cur);
    }
    pieces.retain(|p| p.len() >= 2);
    pieces
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |k| lo + (hi - lo) * k as f64 / n as f64)
}

fn boundary_curves(grid: &GridSpec, q: QuadraticForm2, sigma: f64) -> Vec<Curve> {
    let mut curves = Vec::new();
    match grid.plane {
        Plane::TraceSecondTrace => {
            let (lo, hi) = (
                grid.x_min.min(grid.y_min) - 1.0,
                grid.x_max.max(grid.y_max) + 1.0,
            );
            curves.push(Curve {
                name: "saddle_node".into(),
                pieces: clip(grid, linspace(lo, hi, CURVE_SAMPLES).map(|t| [t, t])),
            });
            curves.push(Curve {
                name: "period_doubling".into(),
                pieces: clip(grid, linspace(lo, hi, CURVE_SAMPLES).map(|t| [t, -2.0 - t])),
            });
            let mut pieces = Vec::new();
            for b in double_root_ts() {
                pieces.extend(clip(grid, b));
            }
            curves.push(Curve {
                name: "double_root".into(),
                pieces,
            });
        }
        Plane::TauAlpha => {
            // fixed points x² + (τ − σ)x + α = 0 appear at the saddle-node curve
            let (lo, hi) = (grid.x_min - grid.dx(), grid.x_max + grid.dx());
            curves.push(Curve {
                name: "saddle_node".into(),
                pieces: clip(
                    grid,
                    linspace(lo, hi, CURVE_SAMPLES).map(|tau| [tau, 0.25 * (tau - sigma).powi(2)]),
                ),
            });
            let pd = if q.a == q.c {
                let tau = -2.0 - sigma;
                let top = (0.25 * (tau - sigma).powi(2)).min(grid.y_max + grid.dy());
                clip(
                    grid,
                    linspace(grid.y_min - grid.dy(), top, CURVE_SAMPLES).map(|a| [tau, a]),
                )
            } else {
                clip(
                    grid,
                    linspace(lo, hi, CURVE_SAMPLES).map(|tau| {
                        let x = -(2.0 + tau + sigma) / (2.0 * (q.a - q.c));
                        [tau, -x * x - (tau - sigma) * x]
                    }),
                )
            };
            curves.push(Curve {
                name: "period_doubling".into(),
                pieces: pd,
            });
            let den = 2.0 * q.c + q.b;
            if den != 0.0 {
                let mut pieces = Vec::new();
                for b in double_root_ts() {
                    let mapped = b.into_iter().map(|[t, s]| {
                        let x = (sigma - s) / den;
                        let tau = t - (2.0 * q.a + q.b) * x;
                        [tau, -x * x - (tau - sigma) * x]
                    });
                    pieces.extend(clip(grid, mapped));
                }
                curves.push(Curve {
                    name: "double_root".into(),
                    pieces,
                });
            }
        }
    }
    curves
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2], sx: f64, sy: f64) -> f64 {
    // distances measured in cell units
    let (px, py) = (p[0] / sx, p[1] / sy);
    let (ax, ay) = (a[0] / sx, a[1] / sy);
    let (bx, by) = (b[0] / sx, b[1] / sy);
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    let u = if len2 == 0.0 {
        0.0
    } else {
        (((px - ax) * dx + (py - ay) * dy) / len2).clamp(0.0, 1.0)
    };
    ((px - ax - u * dx).powi(2) + (py - ay - u * dy).powi(2)).sqrt()
}

impl StabilityDiagram {
    pub fn cell_at(&self, i: usize, j: usize) -> &DiagramCell {
        &self.cells[j * self.grid.nx + i]
    }

    /// Distance, in cells, from the midpoint between two cell centres to the
    /// nearest analytic curve.
    pub fn curve_distance(&self, p: [f64; 2]) -> f64 {
        let (sx, sy) = (self.grid.dx(), self.grid.dy());
        let mut best = f64::INFINITY;
        for c in &self.curves {
            for piece in &c.pieces {
                for w in piece.windows(2) {
                    best = best.min(segment_distance(p, w[0], w[1], sx, sy));
                }
            }
        }
        best
    }

    /// Adjacent cell pairs with different labels whose shared edge lies more
    /// than `cells` grid cells from every analytic curve.
    pub fn boundary_mismatches(&self, cells: f64) -> Vec<((usize, usize), (usize, usize))> {
        let g = &self.grid;
        let mut pairs = Vec::new();
        for j in 0..g.ny {
            for i in 0..g.nx {
                if i + 1 < g.nx {
                    pairs.push(((i, j), (i + 1, j)));
                }
                if j + 1 < g.ny {
                    pairs.push(((i, j), (i, j + 1)));
                }
            }
        }
        pairs
            .into_par_iter()
            .filter(|&(a, b)| {
                let ca = self.cell_at(a.0, a.1);
                let cb = self.cell_at(b.0, b.1);
                if ca.label == cb.label {
                    return false;
                }
                let mid = [0.5 * (ca.x + cb.x), 0.5 * (ca.y + cb.y)];
                self.curve_distance(mid) > cells
            })
            .collect()
    }

    pub fn boundary_pair_count(&self) -> usize {
        let g = &self.grid;
        let mut n = 0;
        for j in 0..g.ny {
            for i in 0..g.nx {
                let l = &self.cell_at(i, j).label;
                if i + 1 < g.nx && &self.cell_at(i + 1, j).label != l {
                    n += 1;
                }
                if j + 1 < g.ny && &self.cell_at(i, j + 1).label != l {
                    n += 1;
                }
            }
        }
        n
    }

    fn labels(&self) -> Vec<String> {
        let mut l: Vec<String> = self.cells.iter().map(|c| c.label.clone()).collect();
        l.sort();
        l.dedup();
        l
    }

    /// One row per cell; `comments` become leading `#` lines.
    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            out.push_str(&format!("# {c}\n"));
        }
        let (xn, yn) = match self.grid.plane {
            Plane::TauAlpha => ("tau", "alpha"),
            Plane::TraceSecondTrace => ("t", "s"),
        };
        out.push_str(&format!(
            "i,j,{xn},{yn},count,plus_class,plus_complex,plus_phase,minus_class,minus_complex,minus_phase,label\n"
        ));
        let pc = |p: &Option<PointClass>| -> (String, String, String) {
            match p {
                None => (String::new(), String::new(), String::new()),
                Some(p) => (
                    p.classification.code().to_string(),
                    (p.complex as u8).to_string(),
                    p.phase.map(|v| format!("{v:.16e}")).unwrap_or_default(),
                ),
            }
        };
        for c in &self.cells {
            let (a, b, d) = pc(&c.plus);
            let (e, f, g) = pc(&c.minus);
            out.push_str(&format!(
                "{},{},{:.16e},{:.16e},{},{a},{b},{d},{e},{f},{g},{}\n",
                c.i,
                c.j,
                c.x,
                c.y,
                c.count.map(|n| n.to_string()).unwrap_or_default(),
                c.label
            ));
        }
        out
    }

    /// Cell rectangles coloured by label, with the analytic curves as paths.
    pub fn to_svg(&self, comments: &[String]) -> String {
        const PX: f64 = 8.0;
        const PALETTE: [&str; 12] = [
            "#e6f0ff", "#ffe6cc", "#d9f2d9", "#f2d9e6", "#fff5bf", "#d9d9f2", "#cce6e6",
            "#f2e0d9", "#e0e0e0", "#d6ecbf", "#f0d0f0", "#bfe0ff",
        ];
        const STROKES: [(&str, &str); 3] = [
            ("saddle_node", "#c00000"),
            ("period_doubling", "#0040c0"),
            ("double_root", "#008000"),
        ];
        let g = &self.grid;
        let (w, h) = (g.nx as f64 * PX, g.ny as f64 * PX);
        let labels = self.labels();
        let colour = |l: &str| {
            let k = labels.iter().position(|x| x == l).unwrap_or(0);
            PALETTE[k % PALETTE.len()]
        };
        let to_px = |x: f64, y: f64| {
            (
                (x - g.x_min) / (g.x_max - g.x_min) * w,
                h - (y - g.y_min) / (g.y_max - g.y_min) * h,
            )
        };
        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
        ));
        out.push_str("<metadata>\n");
        for c in comments {
            out.push_str(&xml_escape(c));
            out.push('\n');
        }
        out.push_str("</metadata>\n<g id=\"regions\" shape-rendering=\"crispEdges\">\n");
        for c in &self.cells {
            let x = c.i as f64 * PX;
            let y = h - (c.j as f64 + 1.0) * PX;
            out.push_str(&format!(
                "<rect x=\"{x}\" y=\"{y}\" width=\"{PX}\" height=\"{PX}\" fill=\"{}\"><title>{}</title></rect>\n",
                colour(&c.label),
                xml_escape(&c.label)
            ));
        }
        out.push_str("</g>\n<g id=\"curves\" fill=\"none\" stroke-width=\"1.5\">\n");
        for c in &self.curves {
            let stroke = STROKES
                .iter()
                .find(|(n, _)| *n == c.name)
                .map(|(_, s)| *s)
                .unwrap_or("#000000");
            for piece in &c.pieces {
                let mut d = String::new();
                for (k, p) in piece.iter().enumerate() {
                    let (x, y) = to_px(p[0], p[1]);
                    d.push_str(&format!("{}{x:.3},{y:.3}", if k == 0 { "M" } else { " L" }));
                }
                out.push_str(&format!(
                    "<path class=\"{}\" stroke=\"{stroke}\" d=\"{d}\"/>\n",
                    c.name
                ));
            }
        }
        out.push_str("</g>\n<g id=\"legend\" font-size=\"10\" font-family=\"monospace\">\n");
        for (k, l) in labels.iter().enumerate() {
            let y = 12.0 + 12.0 * k as f64;
            out.push_str(&format!(
                "<rect x=\"4\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\" stroke=\"#000\"/><text x=\"18\" y=\"{}\">{}</text>\n",
                y - 9.0,
                colour(l),
                y,
                xml_escape(l)
            ));
        }
        out.push_str("</g>\n</svg>\n");
        out
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
