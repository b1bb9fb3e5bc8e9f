use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use nalgebra::{DMatrix, Vector3};
use serde::Serialize;
use serde_json::{json, Value};

use quadvp::dynamics::{
    asymptotic_direction, escape_bound, fixed_points as find_fixed_points, iterate as run_orbit,
    orbit::{escape_bound_printed, escape_bound_threshold},
    period2_line, periodic_count_bound, reversor_for, stability_diagram, symmetric_orbit_search,
    Direction, FixedPointReport, GenericMapParams, GridSpec, Plane, Reversor,
};
use quadvp::manifold::{
    grow_2d, hausdorff_distance, heteroclinic_from_symmetry, intersect_meshes, linear_data,
    polylines_csv, symmetric_tangent, BoundingBox, GrowOptions, HeteroclinicOptions, ManifoldKind, ManifoldMesh,
};
use quadvp::normalform::{decompose, reduce_generic, to_normal_form, Case, NormalFormFile, QuadraticForm2};
use quadvp::polymap::MapFile;
use quadvp::symplectic::{is_symplectic, shear_to_gradient_form, symplectic_decompose, SymplecticContext};
use quadvp::{QuadMap, DEFAULT_TOL};

use crate::output::{emit, json as to_json, write_atomic, Meta};
use crate::params::ParamArgs;

pub enum Status {
    Ok,
    PredicateFailed,
}

/// Errors that report a property of the input rather than a failure to run.
fn predicate_error(e: &anyhow::Error) -> bool {
    use quadvp::Error as E;
    matches!(
        e.downcast_ref::<E>(),
        Some(
            E::NotVolumePreserving { .. }
                | E::NoQuadraticInverse { .. }
                | E::NotAShear(_)
                | E::NotSymplectic { .. }
                | E::NotReversible(_)
        )
    )
}

fn or_predicate(r: Result<Status>) -> Result<Status> {
    match r {
        Err(e) if predicate_error(&e) => {
            eprintln!("{e:#}");
            Ok(Status::PredicateFailed)
        }
        r => r,
    }
}

fn read_map(path: &Path) -> Result<QuadMap> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: MapFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    QuadMap::from_file(&file).with_context(|| format!("{}", path.display()))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn e17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Verdict {
    Holds,
    Fails,
    Skipped,
    NotApplicable,
}

#[derive(Serialize)]
struct Predicate {
    name: &'static str,
    status: Verdict,
    detail: Value,
}

impl Predicate {
    fn new(name: &'static str, status: Verdict, detail: Value) -> Self {
        Predicate { name, status, detail }
    }

    fn skipped(name: &'static str) -> Self {
        Self::new(name, Verdict::Skipped, Value::Null)
    }
}

fn error_detail(e: &quadvp::Error) -> Value {
    json!({ "error": e.to_string() })
}

#[derive(Args, Debug, Serialize)]
pub struct ClassifyArgs {
    /// JSON map file with `dim`, `const`, `linear` and `quad`.
    pub map: PathBuf,
    /// Also run the symplectic checks (even dimension).
    #[arg(long)]
    pub symplectic: bool,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn classify(a: ClassifyArgs) -> Result<Status> {
    let map = read_map(&a.map)?;
    let tol = a.tol;
    let dim = map.dim();
    let mut preds = vec![];

    let vol = map.is_volume_preserving(tol);
    let vol_ok = vol.holds;
    preds.push(Predicate::new(
        "volume_preserving",
        if vol_ok { Verdict::Holds } else { Verdict::Fails },
        serde_json::to_value(&vol)?,
    ));

    let mut inv_ok = false;
    if vol_ok {
        let inv = map.has_quadratic_inverse(tol)?;
        inv_ok = inv.holds;
        preds.push(Predicate::new(
            "quadratic_inverse",
            if inv_ok { Verdict::Holds } else { Verdict::Fails },
            serde_json::to_value(&inv)?,
        ));
    } else {
        preds.push(Predicate::skipped("quadratic_inverse"));
    }

    let three = json!({ "reason": format!("defined for dimension 3, map has dimension {dim}") });
    let mut shear_ok = false;
    if dim != 3 {
        preds.push(Predicate::new("shear", Verdict::NotApplicable, three.clone()));
    } else if !inv_ok {
        preds.push(Predicate::skipped("shear"));
    } else {
        match decompose(&map) {
            Ok((t, d)) => {
                shear_ok = true;
                let n = d.normalized();
                preds.push(Predicate::new(
                    "shear",
                    Verdict::Holds,
                    json!({
                        "shear": n.to_file(),
                        "affine": { "linear": rows(&t.linear), "const": t.constant.as_slice() },
                    }),
                ));
            }
            Err(quadvp::Error::Affine) => preds.push(Predicate::new(
                "shear",
                Verdict::NotApplicable,
                json!({ "reason": "quadratic part vanishes: the map is affine" }),
            )),
            Err(e @ quadvp::Error::NotAShear(_)) => {
                preds.push(Predicate::new("shear", Verdict::Fails, error_detail(&e)))
            }
            Err(e) => return Err(e.into()),
        }
    }

    if dim != 3 {
        preds.push(Predicate::new("case", Verdict::NotApplicable, three));
    } else if !shear_ok {
        preds.push(Predicate::skipped("case"));
    } else {
        match to_normal_form(&map) {
            Ok(nf) => preds.push(Predicate::new(
                "case",
                Verdict::Holds,
                json!({
                    "case": nf.case(),
                    "params": nf.params.to_map(),
                    "conjugacy_residual": nf.diagnostics.conjugacy_residual,
                }),
            )),
            Err(e) => preds.push(Predicate::new("case", Verdict::Fails, error_detail(&e))),
        }
    }

    if a.symplectic {
        symplectic_predicates(&map, tol, vol_ok, &mut preds)?;
    }

    let failed = preds.iter().any(|p| p.status == Verdict::Fails);
    let meta = Meta::new("classify", &a);
    let body = json!({ "dim": dim, "predicates": preds, "all_hold": !failed });
    emit(a.output.as_deref(), &to_json(&meta, &body)?)?;
    Ok(if failed { Status::PredicateFailed } else { Status::Ok })
}

fn symplectic_predicates(map: &QuadMap, tol: f64, vol_ok: bool, preds: &mut Vec<Predicate>) -> Result<()> {
    let names = ["symplectic", "symplectic_shear", "gradient_form"];
    let dim = map.dim();
    if !dim.is_multiple_of(2) {
        let why = json!({ "reason": format!("needs an even dimension, map has dimension {dim}") });
        for n in names {
            preds.push(Predicate::new(n, Verdict::NotApplicable, why.clone()));
        }
        return Ok(());
    }
    if !vol_ok {
        for n in names {
            preds.push(Predicate::skipped(n));
        }
        return Ok(());
    }
    let ctx = SymplecticContext::for_dim(dim)?;
    let cert = is_symplectic(map, &ctx, tol)?;
    let holds = cert.holds;
    preds.push(Predicate::new(
        names[0],
        if holds { Verdict::Holds } else { Verdict::Fails },
        serde_json::to_value(&cert)?,
    ));
    if !holds {
        preds.push(Predicate::skipped(names[1]));
        preds.push(Predicate::skipped(names[2]));
        return Ok(());
    }
    let dec = symplectic_decompose(map, &ctx, tol)?;
    preds.push(Predicate::new(
        names[1],
        if dec.shear_certificate.holds { Verdict::Holds } else { Verdict::Fails },
        json!({
            "square_residual": dec.square_residual,
            "certificate": dec.shear_certificate,
            "affine": { "linear": rows(&dec.affine.linear), "const": dec.affine.constant.as_slice() },
        }),
    ));
    match shear_to_gradient_form(&dec.shear, &ctx, tol) {
        Ok(g) => preds.push(Predicate::new(
            names[2],
            Verdict::Holds,
            json!({
                "B": g.b_tensor(),
                "lambda": rows(&g.lambda),
                "lagrangian": rows(&g.lagrangian),
                "certificate": g.certificate,
            }),
        )),
        Err(e) => preds.push(Predicate::new(names[2], Verdict::Fails, error_detail(&e))),
    }
    Ok(())
}

#[derive(Args, Debug, Serialize)]
pub struct NormalFormArgs {
    /// JSON map file of dimension 3.
    pub map: PathBuf,
    /// Tolerance of the generic reduction (`a + b + c = 0`, `b + 2c = 0`).
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn normal_form(a: NormalFormArgs) -> Result<Status> {
    or_predicate((|| {
        let map = read_map(&a.map)?;
        let vol = map.is_volume_preserving(DEFAULT_TOL);
        if !vol.holds {
            return Err(quadvp::Error::NotVolumePreserving {
                det_linear: vol.det_linear,
                residual: vol.nilpotency_residual.unwrap_or(f64::INFINITY),
            }
            .into());
        }
        let file = if map.dim() == 3 && map.is_affine(a.tol) {
            NormalFormFile::affine()
        } else {
            let (_, shear) = decompose(&map)?;
            let nf = to_normal_form(&map)?;
            let generic = match nf.case() {
                Case::I => Some(reduce_generic(&nf, a.tol)?),
                _ => None,
            };
            NormalFormFile::new(&nf, &shear, generic.as_ref())
        };
        let meta = Meta::new("normal-form", &a);
        emit(a.output.as_deref(), &to_json(&meta, &file)?)?;
        Ok(Status::Ok)
    })())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    Json,
    Csv,
}

#[derive(Args, Debug, Serialize)]
pub struct FixedPointsArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t = TableFormat::Json)]
    pub format: TableFormat,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Serialize)]
struct Config<'a, A: Serialize> {
    resolved: GenericMapParams,
    #[serde(flatten)]
    args: &'a A,
}

pub fn fixed_points(a: FixedPointsArgs) -> Result<Status> {
    let p = a.params.resolve()?;
    let fps = find_fixed_points(&p)?;
    let meta = Meta::new("fixed-points", &Config { resolved: p, args: &a });
    let text = match a.format {
        TableFormat::Json => {
            let q = &p.quad;
            let body = json!({
                "discriminant": p.discriminant(),
                "fixed_points": fps,
                "escape_bound": escape_bound(q, p.alpha, p.tau, p.sigma).ok(),
                "escape_bound_printed": escape_bound_printed(q, p.alpha, p.tau, p.sigma).ok(),
                "escape_bound_threshold": escape_bound_threshold(q, p.alpha, p.tau, p.sigma).ok(),
            });
            to_json(&meta, &body)?
        }
        TableFormat::Csv => fixed_points_csv(&meta, &fps),
    };
    emit(a.output.as_deref(), &text)?;
    Ok(Status::Ok)
}

fn fixed_points_csv(meta: &Meta, fps: &[FixedPointReport]) -> String {
    let mut s = String::new();
    for c in meta.comments() {
        let _ = writeln!(s, "# {c}");
    }
    s.push_str("which,coordinate,t,s,class,l1_re,l1_im,l2_re,l2_im,l3_re,l3_im\n");
    for f in fps {
        let which = serde_json::to_value(f.which).expect("serializes");
        let _ = write!(
            s,
            "{},{},{},{},{}",
            which.as_str().unwrap_or(""),
            e17(f.coordinate),
            e17(f.t),
            e17(f.s),
            f.classification.code()
        );
        for l in &f.eigenvalues {
            let _ = write!(s, ",{},{}", e17(l.re), e17(l.im));
        }
        s.push('\n');
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PlaneArg {
    TauAlpha,
    #[value(name = "t-s")]
    TS,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DiagramFormat {
    Csv,
    Svg,
}

#[derive(Args, Debug, Serialize)]
pub struct DiagramArgs {
    #[arg(long, value_enum, default_value_t = PlaneArg::TauAlpha)]
    pub plane: PlaneArg,
    /// Horizontal range; `-4` to `4` for τ, `-4` to `6` for t.
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    /// Vertical range; `-3` to `5` for α, `-4` to `6` for s.
    #[arg(long, allow_hyphen_values = true)]
    pub y_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub y_max: Option<f64>,
    #[arg(long, default_value_t = 160)]
    pub nx: usize,
    #[arg(long, default_value_t = 160)]
    pub ny: usize,
    /// Coefficients of Q; required for the τ-α plane.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Normal-form file supplying σ and Q.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = DiagramFormat::Svg)]
    pub format: DiagramFormat,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn diagram(a: DiagramArgs) -> Result<Status> {
    let (plane, xr, yr) = match a.plane {
        PlaneArg::TauAlpha => (Plane::TauAlpha, (-4.0, 4.0), (-3.0, 5.0)),
        PlaneArg::TS => (Plane::TraceSecondTrace, (-4.0, 6.0), (-4.0, 6.0)),
    };
    let grid = GridSpec {
        plane,
        x_min: a.x_min.unwrap_or(xr.0),
        x_max: a.x_max.unwrap_or(xr.1),
        nx: a.nx,
        y_min: a.y_min.unwrap_or(yr.0),
        y_max: a.y_max.unwrap_or(yr.1),
        ny: a.ny,
    };
    let flags = [a.a, a.b, a.c, a.sigma];
    let (quad, sigma) = if a.params.is_some() {
        if flags.iter().any(Option::is_some) {
            bail!("conflicting parameter sources: --params and --a/--b/--c/--sigma");
        }
        let pa = ParamArgs {
            alpha: None,
            tau: None,
            sigma: None,
            a: None,
            b: None,
            c: None,
            params: a.params.clone(),
        };
        let p = pa.resolve()?;
        (p.quad, p.sigma)
    } else {
        match (a.a, a.b, a.c) {
            (Some(qa), Some(qb), Some(qc)) => (QuadraticForm2::new(qa, qb, qc), a.sigma.unwrap_or(0.0)),
            (None, None, None) if plane == Plane::TraceSecondTrace => {
                (QuadraticForm2::new(0.5, 0.0, 0.5), a.sigma.unwrap_or(0.0))
            }
            _ => bail!("the τ-α plane needs --a, --b and --c (or --params)"),
        }
    };
    let d = stability_diagram(&grid, quad, sigma)?;
    #[derive(Serialize)]
    struct Cfg<'a> {
        grid: GridSpec,
        quad: QuadraticForm2,
        sigma: f64,
        format: DiagramFormat,
        params: &'a Option<PathBuf>,
    }
    let meta = Meta::new(
        "diagram",
        &Cfg {
            grid,
            quad,
            sigma,
            format: a.format,
            params: &a.params,
        },
    );
    let comments = meta.comments();
    let text = match a.format {
        DiagramFormat::Csv => d.to_csv(&comments),
        DiagramFormat::Svg => d.to_svg(&comments),
    };
    emit(a.output.as_deref(), &text)?;
    Ok(Status::Ok)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DirectionArg {
    Forward,
    Backward,
}

#[derive(Args, Debug, Serialize)]
pub struct IterateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Initial state `x,y,z`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub x0: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = DirectionArg::Forward)]
    pub direction: DirectionArg,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn iterate(a: IterateArgs) -> Result<Status> {
    let p = a.params.resolve()?;
    if a.x0.len() != 3 {
        bail!("--x0 needs three values");
    }
    let x0 = Vector3::new(a.x0[0], a.x0[1], a.x0[2]);
    let dir = match a.direction {
        DirectionArg::Forward => Direction::Forward,
        DirectionArg::Backward => Direction::Backward,
    };
    let orbit = run_orbit(&p, &x0, a.steps, dir);
    let asym = asymptotic_direction(&orbit).ok();
    let meta = Meta::new("iterate", &Config { resolved: p, args: &a });
    let text = match a.format {
        TableFormat::Json => to_json(&meta, &json!({ "orbit": orbit, "asymptotic": asym }))?,
        TableFormat::Csv => {
            let mut s = String::new();
            for c in meta.comments() {
                let _ = writeln!(s, "# {c}");
            }
            let v = serde_json::to_value(orbit.verdict)?;
            let _ = writeln!(s, "# verdict={}", v.as_str().unwrap_or(""));
            let opt = |x: Option<String>| x.unwrap_or_else(|| "none".into());
            let _ = writeln!(s, "# escape_time={}", opt(orbit.escape_time.map(|t| t.to_string())));
            let _ = writeln!(s, "# kappa={}", opt(orbit.kappa.map(e17)));
            let _ = writeln!(s, "# overflow={}", orbit.overflow);
            if let Some(r) = &asym {
                let d = serde_json::to_value(r.direction)?;
                let _ = writeln!(
                    s,
                    "# asymptotic={} ratios={},{}",
                    d.as_str().unwrap_or(""),
                    e17(r.ratios[0]),
                    e17(r.ratios[1])
                );
            }
            s.push_str("step,x,y,z\n");
            for (i, x) in orbit.states.iter().enumerate() {
                let _ = writeln!(s, "{i},{},{},{}", e17(x[0]), e17(x[1]), e17(x[2]));
            }
            s
        }
    };
    emit(a.output.as_deref(), &text)?;
    Ok(Status::Ok)
}

#[derive(Args, Debug, Serialize)]
pub struct ManifoldArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Directory for the meshes, curves and summary.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    #[arg(long, default_value_t = 0.05)]
    pub refine: f64,
    /// Iterates of the map per generation.
    #[arg(long, default_value_t = 30)]
    pub steps_per_generation: usize,
    #[arg(long, default_value_t = 64)]
    pub ring_points: usize,
    /// Seed radius shared by both meshes; `1e-4 (1 + |x*|)` maximised over
    /// the two fixed points when absent.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 4_000_000)]
    pub max_vertices: usize,
    /// Skip the search for heteroclinic points on the fixed line of the reversor.
    #[arg(long)]
    pub no_heteroclinic: bool,
}

fn two_dim_point<'a>(
    p: &GenericMapParams,
    fps: &'a [FixedPointReport],
    kind: ManifoldKind,
) -> Option<&'a FixedPointReport> {
    fps.iter().find(|f| {
        f.classification.is_hyperbolic()
            && linear_data(p, f).map(|l| l.subspace(kind).dim() == 2).unwrap_or(false)
    })
}

/// Fixed-line parameters of both fixed points, widened by twice their distance.
fn fix_bracket(r: &Reversor, fps: &[FixedPointReport]) -> Option<(f64, f64)> {
    if fps.len() < 2 {
        return None;
    }
    let line = r.fix_line();
    let (x, y) = (fps[0].location(), fps[1].location());
    let (s1, s2) = (line.project(&x), line.project(&y));
    let w = 2.0 * (x - y).norm();
    let bracket = (s1.min(s2) - w, s1.max(s2) + w);
    (bracket.1 > bracket.0).then_some(bracket)
}

#[derive(Serialize)]
struct CurveSummary {
    points: usize,
    length: f64,
    endpoints: Value,
    crossings: Vec<Value>,
}

pub fn manifold(a: ManifoldArgs) -> Result<Status> {
    or_predicate((|| {
        let p = a.params.resolve()?;
        let fps = find_fixed_points(&p)?;
        let (Some(fu), Some(fs)) = (
            two_dim_point(&p, &fps, ManifoldKind::Unstable),
            two_dim_point(&p, &fps, ManifoldKind::Stable),
        ) else {
            bail!("needs hyperbolic fixed points with two-dimensional stable and unstable manifolds");
        };
        let h = reversor_for(&p, DEFAULT_TOL).ok();
        let base = GrowOptions {
            epsilon: a.epsilon,
            depth: a.depth,
            refine: a.refine,
            steps_per_generation: a.steps_per_generation,
            ring_points: a.ring_points,
            max_vertices: a.max_vertices,
            ..GrowOptions::default()
        };
        let opts = match &h {
            // equal seeds and an h-invariant box keep the two meshes images of each other
            Some(r) => GrowOptions {
                epsilon: Some(base.epsilon.unwrap_or_else(|| base.epsilon_for(fu).max(base.epsilon_for(fs)))),
                bounding_box: Some(BoundingBox::symmetric_escape_cube(&p, r)?),
                ..base
            },
            None => base,
        };
        let wu = grow_2d(&p, fu, ManifoldKind::Unstable, &opts)?;
        let ws = grow_2d(&p, fs, ManifoldKind::Stable, &opts)?;
        let curves = intersect_meshes(&wu, &ws, h.as_ref());
        let points = match (&h, a.no_heteroclinic) {
            (Some(r), false) => match fix_bracket(r, &fps) {
                Some(br) => Some(heteroclinic_from_symmetry(&p, r, br, &HeteroclinicOptions::default())?),
                None => None,
            },
            _ => None,
        };
        let hausdorff = h.as_ref().map(|r| {
            let hu: Vec<Vector3<f64>> = wu.vertices.iter().map(|v| r.apply(v)).collect();
            hausdorff_distance(&hu, &ws.vertices)
        });

        #[derive(Serialize)]
        struct Cfg<'a> {
            params: GenericMapParams,
            grow: &'a GrowOptions,
            heteroclinic: Option<HeteroclinicOptions>,
        }
        let meta = Meta::new(
            "manifold",
            &Cfg {
                params: p,
                grow: &opts,
                heteroclinic: (!a.no_heteroclinic && h.is_some()).then(HeteroclinicOptions::default),
            },
        );
        std::fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
        let comments = meta.comments();
        for (name, m) in [("unstable", &wu), ("stable", &ws)] {
            write_mesh(&a.out_dir, name, m, &p, &meta, &comments)?;
        }
        let mut csv = String::new();
        for c in &comments {
            let _ = writeln!(csv, "# {c}");
        }
        csv.push_str(&polylines_csv(&curves));
        write_atomic(&a.out_dir.join("curves.csv"), &csv)?;

        let summary: Vec<CurveSummary> = curves
            .iter()
            .map(|c| CurveSummary {
                points: c.polyline.len(),
                length: c.length(),
                endpoints: serde_json::to_value(c.endpoints).expect("serializes"),
                crossings: c
                    .crossings
                    .iter()
                    .map(|x| {
                        let mut v = serde_json::to_value(x).expect("serializes");
                        // tangent predicted from the orbit rather than the mesh facet
                        let sym = h.as_ref().and_then(|r| symmetric_tangent(&p, r, &x.point, 3000).ok());
                        v["orbit_tangent"] = json!(sym);
                        v["orbit_angle_deg"] = json!(sym.map(|t| x.tangent.dot(&t).abs().min(1.0).acos().to_degrees()));
                        v
                    })
                    .collect(),
            })
            .collect();
        let body = json!({
            "reversor": h,
            "unstable": { "fixed_point": fu, "vertices": wu.vertices.len(), "triangles": wu.triangles.len(), "truncated": wu.truncated },
            "stable": { "fixed_point": fs, "vertices": ws.vertices.len(), "triangles": ws.triangles.len(), "truncated": ws.truncated },
            "max_edge_length": wu.max_edge_length().max(ws.max_edge_length()),
            "curves": summary,
            "heteroclinic_points": points,
            "hausdorff_reflected": hausdorff,
        });
        write_atomic(&a.out_dir.join("summary.json"), &to_json(&meta, &body)?)?;
        Ok(Status::Ok)
    })())
}

fn write_mesh(
    dir: &Path,
    name: &str,
    m: &ManifoldMesh,
    p: &GenericMapParams,
    meta: &Meta,
    comments: &[String],
) -> Result<()> {
    write_atomic(&dir.join(format!("{name}.obj")), &m.to_obj(comments))?;
    write_atomic(&dir.join(format!("{name}.json")), &to_json(meta, &m.sidecar(p))?)
}

#[derive(Args, Debug, Serialize)]
pub struct SymmetricArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Periods 1..=N are searched.
    #[arg(long, default_value_t = 4)]
    pub max_period: usize,
    /// Parameter range `lo,hi` along the fixed lines; defaults to the
    /// projections of the fixed points widened by twice their distance,
    /// or `-2,2` without fixed points.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub bracket: Option<Vec<f64>>,
    #[arg(long, default_value_t = 4000)]
    pub samples: usize,
    /// Also search for heteroclinic points on the fixed line.
    #[arg(long)]
    pub heteroclinic: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn symmetric(a: SymmetricArgs) -> Result<Status> {
    or_predicate((|| {
        let p = a.params.resolve()?;
        let r = reversor_for(&p, DEFAULT_TOL)?;
        let fps = find_fixed_points(&p)?;
        let bracket = match &a.bracket {
            Some(v) if v.len() == 2 && v[1] > v[0] => (v[0], v[1]),
            Some(_) => bail!("--bracket needs lo,hi with lo < hi"),
            None => fix_bracket(&r, &fps).unwrap_or((-2.0, 2.0)),
        };
        let mut orbits = vec![];
        for n in 1..=a.max_period {
            let pts = symmetric_orbit_search(&p, &r, n, bracket, a.samples)?;
            orbits.push(json!({ "period": n, "points": pts }));
        }
        let p2 = match period2_line(&p, DEFAULT_TOL) {
            Ok(l) => json!(l),
            Err(e) => json!({ "not_applicable": e.to_string() }),
        };
        let hetero = if a.heteroclinic {
            Some(heteroclinic_from_symmetry(&p, &r, bracket, &HeteroclinicOptions::default())?)
        } else {
            None
        };
        let meta = Meta::new("symmetric", &Config { resolved: p, args: &a });
        let body = json!({
            "reversor": r,
            "fix_line": r.fix_line(),
            "bracket": [bracket.0, bracket.1],
            "symmetric_orbits": orbits,
            "period2_line": p2,
            "heteroclinic_points": hetero,
        });
        emit(a.output.as_deref(), &to_json(&meta, &body)?)?;
        Ok(Status::Ok)
    })())
}

#[derive(Args, Debug, Serialize)]
pub struct PeriodicBoundArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub c: f64,
    /// Period.
    #[arg(long)]
    pub n: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn periodic_bound(a: PeriodicBoundArgs) -> Result<Status> {
    let r = periodic_count_bound(&QuadraticForm2::new(a.a, a.b, a.c), a.n)?;
    let meta = Meta::new("periodic-bound", &a);
    emit(a.output.as_deref(), &to_json(&meta, &r)?)?;
    Ok(if r.bound_2n { Status::Ok } else { Status::PredicateFailed })
}
