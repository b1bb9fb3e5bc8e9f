//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, Vector3};
use num_complex::Complex64;
use rand::Rng;

use common::*;
use quadvp::dynamics::{
    asymptotic_direction, classify_stability, escape_bound, fixed_points, iterate, period2_line, periodic_count_bound,
    reversor_for, stability_diagram, AsymptoticDirection, Direction, GenericMapParams, GridSpec, Plane, Verdict,
    Which,
};
use quadvp::linalg::sample_points;
use quadvp::manifold::{
    grow_2d, hausdorff_distance, heteroclinic_from_symmetry, intersect_meshes, symmetric_tangent, BoundingBox,
    GrowOptions, HeteroclinicOptions, ManifoldKind,
};
use quadvp::normalform::{to_normal_form, Case, QuadraticForm2};
use quadvp::poly::PolyMap;
use quadvp::polymap::compose;
use quadvp::shear::{build_shear, extract_shear, power, Extraction};
use quadvp::symplectic::{gradient_shear, shear_to_gradient_form, symplectic_decompose, SymplecticContext};
use quadvp::{Error, QuadMap, DEFAULT_TOL};

#[derive(Default)]
struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 5 {
            self.failures.push(what());
        } else if !ok {
            self.failures.push(String::new());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn within(&mut self, t: Instant, limit: Duration) {
        let e = t.elapsed();
        self.note(format!("{:.2?}", e));
        self.check(e < limit, || format!("took {e:.2?}, limit {limit:?}"));
    }
}

fn identity_diff(p: &PolyMap) -> f64 {
    p.max_coeff_diff(&PolyMap::identity(p.dim()))
}

fn det_residual(f: &QuadMap, seed: u64) -> f64 {
    sample_points(100, f.dim(), 1.0, seed)
        .iter()
        .map(|x| (f.jacobian(x).determinant() - 1.0).abs())
        .fold(0.0, f64::max)
}

fn inverse_round_trip(f: &QuadMap) -> Option<f64> {
    let g = f.invert_quadratic(DEFAULT_TOL).ok()?;
    let a = compose(&g, f).ok()?.into_poly();
    let b = compose(f, &g).ok()?.into_poly();
    Some(identity_diff(&a).max(identity_diff(&b)))
}

fn c1() -> Outcome {
    let mut o = Outcome::default();
    let t = Instant::now();
    let mut r = rng(1);
    for i in 0..500 {
        let d = shear_data(&mut r);
        let f = build_shear(&d);
        let cert = f.is_volume_preserving(DEFAULT_TOL);
        o.check(cert.holds && cert.nilpotency_residual.unwrap_or(1.0) < 1e-12, || {
            format!("shear {i}: nilpotency {:?}", cert.nilpotency_residual)
        });
        let det = det_residual(&f, i);
        o.check(det < 1e-12, || format!("shear {i}: det residual {det:e}"));
        let inv = inverse_round_trip(&f);
        o.check(inv.is_some_and(|e| e < 1e-12), || format!("shear {i}: round trip {inv:?}"));
    }
    for i in 0..500u64 {
        let d = shear_data(&mut r);
        let f = if i % 2 == 0 {
            // P with Pv ≠ 0
            let p = symmetric3(&mut r);
            QuadMap::standard((0..3).map(|k| dm(&(p * d.v[k]))).collect()).unwrap()
        } else {
            let f = build_shear(&d);
            let quad = f.quad().iter().map(|a| a + dm(&(symmetric3(&mut r) * 0.1))).collect();
            QuadMap::standard(quad).unwrap()
        };
        let nil = f.is_volume_preserving(DEFAULT_TOL).holds;
        let det = det_residual(&f, 1000 + i) < 1e-12;
        let inv = inverse_round_trip(&f).is_some_and(|e| e < 1e-12);
        o.check(!(nil && det && inv), || format!("non-example {i} passed every predicate"));
    }
    o.within(t, Duration::from_secs(10));
    o
}

fn c2() -> Outcome {
    let mut o = Outcome::default();
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let d = shear_data(&mut r);
        let f = build_shear(&d).to_poly_map();
        let g = build_shear(&d).invert_quadratic(DEFAULT_TOL).unwrap().to_poly_map();
        for k in -3i64..=3 {
            let step = if k >= 0 { &f } else { &g };
            let mut want = PolyMap::identity(3);
            for _ in 0..k.unsigned_abs() {
                want = step.compose(&want);
            }
            let e = power(&d, k).to_poly_map().max_coeff_diff(&want);
            worst = worst.max(e);
            o.check(e < 1e-12, || format!("shear {i}, k = {k}: {e:e}"));
        }
    }
    o.note(format!("max coefficient error {worst:.1e}"));
    o
}

fn c3() -> Outcome {
    let mut o = Outcome::default();
    let mut r = rng(3);
    for i in 0..500 {
        let d = shear_data(&mut r);
        let f = build_shear(&d);
        match extract_shear(&f) {
            Ok(Extraction::Shear(e)) => {
                let n = d.normalized();
                let de = (e.v - n.v).amax().max((e.p - n.p).amax());
                o.check(de < 1e-12, || format!("instance {i}: extracted data differs by {de:e}"));
                let dm = build_shear(&e).max_coeff_diff(&f);
                o.check(dm < 1e-12, || format!("instance {i}: rebuilt map differs by {dm:e}"));
            }
            other => o.check(false, || format!("instance {i}: {other:?}")),
        }
    }
    for i in 0..500 {
        let f = triangular_non_shear(&mut r);
        o.check(f.is_volume_preserving(DEFAULT_TOL).holds, || format!("perturbation {i} is not volume preserving"));
        let e = extract_shear(&f);
        o.check(matches!(e, Ok(Extraction::NotAShear { .. })), || format!("perturbation {i}: {e:?}"));
    }
    o
}

fn det_one(m: nalgebra::Matrix3<f64>) -> Option<nalgebra::Matrix3<f64>> {
    let d = m.determinant();
    if d.abs() < 0.1 {
        return None;
    }
    Some(m / d.cbrt())
}

fn frame(r: &mut rand_chacha::ChaCha8Rng) -> nalgebra::Matrix3<f64> {
    loop {
        let c = rotation(r) + mat3(r) * 0.3;
        if c.determinant().abs() > 0.3 {
            return c;
        }
    }
}

fn projected(r: &mut rand_chacha::ChaCha8Rng, v: &Vector3<f64>) -> nalgebra::Matrix3<f64> {
    let pi = nalgebra::Matrix3::identity() - v * v.transpose() / v.norm_squared();
    pi * symmetric3(r) * pi
}

/// `(b, L, v)` with `dim span{v, Lv, L²v} = dim` and `det L = 1`.
fn linear_for(r: &mut rand_chacha::ChaCha8Rng, dim: usize) -> (nalgebra::Matrix3<f64>, Vector3<f64>) {
    loop {
        let c = frame(r);
        let ci = c.try_inverse().unwrap();
        let (t, v) = match dim {
            3 => match det_one(mat3(r) + nalgebra::Matrix3::identity()) {
                Some(l) => (ci * l * c, vec3(r)),
                None => continue,
            },
            2 => {
                let k = nalgebra::Matrix2::<f64>::from_fn(|_, _| r.gen_range(-1.5..1.5));
                let dk = k.determinant();
                if dk.abs() < 0.3 {
                    continue;
                }
                let mut t = nalgebra::Matrix3::zeros();
                t.view_mut((0, 0), (2, 2)).copy_from(&k);
                t[(2, 2)] = 1.0 / dk;
                (t, Vector3::new(r.gen_range(0.3..1.0), r.gen_range(0.3..1.0), 0.0))
            }
            _ => {
                let k = nalgebra::Matrix2::<f64>::from_fn(|_, _| r.gen_range(-1.5..1.5));
                let dk = k.determinant();
                if dk.abs() < 0.3 {
                    continue;
                }
                let mut t = nalgebra::Matrix3::zeros();
                t[(0, 0)] = 1.0 / dk;
                t[(0, 1)] = r.gen_range(-1.0..1.0);
                t[(0, 2)] = r.gen_range(-1.0..1.0);
                t.view_mut((1, 1), (2, 2)).copy_from(&k);
                (t, Vector3::x())
            }
        };
        if dim == 3 {
            return (t, v);
        }
        return (c * t * ci, c * v);
    }
}

fn c4() -> Outcome {
    let mut o = Outcome::default();
    let t0 = Instant::now();
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for (dim, case) in [(3, Case::I), (2, Case::II), (1, Case::III)] {
        for i in 0..200 {
            let (l, v) = linear_for(&mut r, dim);
            let p = projected(&mut r, &v);
            let s = quadvp::shear::ShearData::new(v, p, 1e-12).unwrap();
            let b = vec3(&mut r);
            let f = affine_times_shear(&b, &l, &s);
            let nf = match to_normal_form(&f) {
                Ok(nf) => nf,
                Err(e) => {
                    o.check(false, || format!("dim Z = {dim}, draw {i}: {e}"));
                    continue;
                }
            };
            o.check(nf.case() == case, || format!("dim Z = {dim}, draw {i}: case {:?}", nf.case()));
            let n = nf.to_quad_map();
            let c = &nf.conjugacy;
            let res = sample_points(20, 3, 1.0, 40 + i)
                .iter()
                .map(|x| {
                    let lhs = f.evaluate(&c.apply(x)).unwrap();
                    let rhs = c.apply(&n.evaluate(x).unwrap());
                    (lhs - rhs).amax()
                })
                .fold(0.0, f64::max);
            worst = worst.max(res);
            o.check(res < 1e-9, || format!("dim Z = {dim}, draw {i}: residual {res:e}"));
        }
    }
    o.note(format!("max residual {worst:.1e}"));
    o.within(t0, Duration::from_secs(30));
    o
}

fn c5() -> Outcome {
    let mut o = Outcome::default();
    let forms = [(0.5, 0.0, 0.5), (0.2, 0.3, 0.5), (-0.5, 1.0, 0.5)];
    for &(a, b, c) in &forms {
        for i in 0..50 {
            for j in 0..50 {
                let tau = -3.0 + 6.0 * (i as f64 + 0.5) / 50.0;
                let alpha = -2.0 + 4.0 * (j as f64 + 0.5) / 50.0;
                let p = GenericMapParams::new(alpha, tau, 0.0, a, b, c);
                let fps = fixed_points(&p).unwrap();
                let disc = tau * tau - 4.0 * alpha;
                let want = if disc > 0.0 { 2 } else { 0 };
                o.check(fps.len() == want, || format!("({a},{b},{c}) τ={tau} α={alpha}: {} points", fps.len()));
                for fp in &fps {
                    let x = fp.location();
                    let e = (p.apply(&x) - x).amax();
                    o.check(e < 1e-12, || format!("τ={tau} α={alpha}: |f(x*) − x*| = {e:e}"));
                    let sign = if fp.which == Which::Plus { 1.0 } else { -1.0 };
                    let e = (fp.t - fp.s - sign * disc.sqrt()).abs();
                    o.check(e < 1e-10, || format!("τ={tau} α={alpha}: trace identity off by {e:e}"));
                }
            }
        }
        // on τ² = 4α the two points merge
        let p = GenericMapParams::new(0.25, 1.0, 0.0, a, b, c);
        let fps = fixed_points(&p).unwrap();
        o.check(fps.len() == 1 && fps[0].which == Which::Double, || format!("({a},{b},{c}): {fps:?} on the curve"));
    }
    o
}

fn sorted_re(v: &[Complex64; 3]) -> Vec<f64> {
    let mut r: Vec<f64> = v.iter().map(|z| z.re).collect();
    r.sort_by(f64::total_cmp);
    r
}

fn c6() -> Outcome {
    let mut o = Outcome::default();
    let rep = classify_stability(-1.0, -1.0);
    let got = sorted_re(&rep.eigenvalues);
    let e = max_abs(rep.eigenvalues.iter().map(|z| z.im))
        .max(max_abs(got.iter().zip([-1.0, -1.0, 1.0]).map(|(g, w)| g - w)));
    o.check(e < 1e-9, || format!("(−1, −1): {:?}", rep.eigenvalues));
    let rep = classify_stability(3.0, 3.0);
    let e = max_abs(rep.eigenvalues.iter().map(|z| (z - 1.0).norm()));
    o.check(e < 1e-6, || format!("(3, 3): {:?}", rep.eigenvalues));
    o.note(format!("triple root error {e:.1e}"));
    let mut worst: f64 = 0.0;
    for sign in [-1.0, 1.0] {
        for k in 0..=270 {
            let r = sign * (0.3 + 0.01 * k as f64);
            let rep = classify_stability(2.0 * r + 1.0 / (r * r), r * r + 2.0 / r);
            let l = rep.eigenvalues;
            let gap = [(0, 1), (0, 2), (1, 2)]
                .iter()
                .map(|&(i, j)| (l[i] - l[j]).norm())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(gap);
            o.check(gap < 1e-6, || format!("r = {r}: closest pair {gap:e}"));
        }
    }
    o.note(format!("max double-root gap {worst:.1e}"));
    o
}

fn positive_definite(r: &mut rand_chacha::ChaCha8Rng) -> GenericMapParams {
    let (a, c) = (r.gen_range(0.05..1.0), r.gen_range(0.05..1.0));
    let bm = 2.0 * f64::sqrt(a * c);
    let b = r.gen_range(-0.95 * bm..0.95 * bm);
    let s = a + b + c;
    GenericMapParams::new(
        r.gen_range(-2.0..2.0),
        r.gen_range(-2.0..2.0),
        r.gen_range(-2.0..2.0),
        a / s,
        b / s,
        c / s,
    )
}

fn c7() -> Outcome {
    let mut o = Outcome::default();
    let t0 = Instant::now();
    let q = QuadraticForm2::new(0.5, 0.0, 0.5);
    let k = escape_bound(&q, 0.0, 0.0, 0.0).unwrap();
    o.check(k == 4.0, || format!("κ = {k}"));
    let mut r = rng(7);
    let mut escapes = [0usize; 2];
    for i in 0..1000 {
        let p = positive_definite(&mut r);
        let kappa = escape_bound(&p.quad, p.alpha, p.tau, p.sigma).unwrap();
        // proof cases: x, z or y dominant
        let lead = kappa * r.gen_range(1.01..3.0) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
        let mut rest = || lead.abs() * r.gen_range(-1.0..1.0);
        let x0 = match i % 3 {
            0 => Vector3::new(lead, rest(), rest()),
            1 => Vector3::new(rest(), rest(), lead),
            _ => Vector3::new(rest(), lead, rest()),
        };
        let mut any = false;
        for (slot, dir) in [Direction::Forward, Direction::Backward].into_iter().enumerate() {
            let orb = iterate(&p, &x0, 400, dir);
            if orb.verdict == Verdict::BoundedSoFar {
                continue;
            }
            any = true;
            escapes[slot] += 1;
            let lead: Vec<f64> = orb.states[orb.escape_time.unwrap()..]
                .iter()
                .map(|s| if dir == Direction::Forward { s[0].abs() } else { s[2].abs() })
                .collect();
            let mono = lead.windows(2).all(|w| w[1] > w[0]);
            o.check(mono, || format!("draw {i} {dir:?}: not monotone after escape"));
            let want = if dir == Direction::Forward { AsymptoticDirection::PlusX } else { AsymptoticDirection::MinusZ };
            let a = asymptotic_direction(&orb);
            o.check(a.as_ref().is_ok_and(|a| a.direction == want && a.ratios.iter().all(|&q| q < 0.1)), || {
                format!("draw {i} {dir:?}: {a:?}")
            });
        }
        o.check(any, || format!("draw {i}: seed {x0:?} outside κ = {kappa} escaped in neither direction"));
        for fp in fixed_points(&p).unwrap() {
            o.check(fp.coordinate.abs() < kappa, || format!("draw {i}: |x*| = {} ≥ κ", fp.coordinate.abs()));
            for dir in [Direction::Forward, Direction::Backward] {
                let orb = iterate(&p, &fp.location(), 0, dir);
                o.check(orb.verdict == Verdict::BoundedSoFar, || format!("draw {i}: fixed point triggers escape"));
            }
        }
    }
    // period-2 lines need a = c = b/2, where Q is only semidefinite
    let p = GenericMapParams::new(0.0, -2.0, 0.0, 0.25, 0.5, 0.25);
    let line = period2_line(&p, 1e-12).unwrap();
    for &d in &line.deltas {
        for x in [-1.0, 0.0, 0.5, 2.0] {
            let x0 = quadvp::dynamics::Period2Line::point(d, x);
            for dir in [Direction::Forward, Direction::Backward] {
                let orb = iterate(&p, &x0, 100, dir);
                o.check(orb.verdict == Verdict::BoundedSoFar, || format!("period-2 point {x0:?} escaped"));
            }
        }
    }
    o.note(format!("{} forward and {} backward escapes", escapes[0], escapes[1]));
    o.within(t0, Duration::from_secs(60));
    o
}

fn c8() -> Outcome {
    let mut o = Outcome::default();
    let mut r = rng(8);
    for i in 0..100 {
        let a = r.gen_range(-1.0..1.0);
        let p = GenericMapParams::new(
            r.gen_range(-1.0..1.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
            a,
            1.0 - 2.0 * a,
            a,
        );
        let h = match reversor_for(&p, DEFAULT_TOL) {
            Ok(h) => h,
            Err(e) => {
                o.check(false, || format!("draw {i}: {e}"));
                continue;
            }
        };
        // h is affine: compose the coefficients
        let j = h.jacobian();
        let c = h.apply(&Vector3::zeros());
        let jj = j * j;
        let cc = j * c + c;
        o.check(jj == nalgebra::Matrix3::identity() && cc == Vector3::zeros(), || {
            format!("draw {i}: h∘h has linear part {jj} and constant {cc}")
        });
        for x in sample_points(20, 3, 1.0, 80 + i) {
            let x = Vector3::new(x[0], x[1], x[2]);
            o.check((h.apply(&h.apply(&x)) - x).amax() < 1e-15, || format!("draw {i}: h(h(x)) ≠ x"));
        }
        let res = sample_points(20, 3, 1.0, 800 + i)
            .iter()
            .map(|x| {
                let x = Vector3::new(x[0], x[1], x[2]);
                (h.apply(&p.apply(&x)) - p.apply_inverse(&h.apply(&x))).amax()
            })
            .fold(0.0, f64::max);
        o.check(res < 1e-10, || format!("draw {i}: h∘f − f⁻¹∘h = {res:e}"));
    }
    for i in 0..100 {
        let (a, c) = loop {
            let (a, c): (f64, f64) = (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
            if (a - c).abs() > 1e-3 && (1.0f64 - a - c).abs() > 1e-3 {
                break (a, c);
            }
        };
        let p = GenericMapParams::new(
            r.gen_range(-1.0..1.0),
            r.gen_range(-2.0..2.0),
            r.gen_range(-2.0..2.0),
            a,
            1.0 - a - c,
            c,
        );
        let e = reversor_for(&p, DEFAULT_TOL);
        o.check(matches!(e, Err(Error::NotReversible(_))), || format!("draw {i} (a={a}, c={c}): {e:?}"));
    }
    o
}

fn c9() -> Outcome {
    let mut o = Outcome::default();
    let p = GenericMapParams::new(0.0, -2.0, 0.0, 0.25, 0.5, 0.25);
    for delta in [0.0, -4.0] {
        let mut worst: f64 = 0.0;
        for k in 0..=40 {
            let x = -5.0 + 0.25 * k as f64;
            let v = quadvp::dynamics::Period2Line::point(delta, x);
            worst = worst.max((p.apply(&p.apply(&v)) - v).amax());
        }
        o.note(format!("δ = {delta}: max |f²(x) − x| = {worst:.1e}"));
        o.check(worst < 1e-12, || format!("δ = {delta}: max |f²(x) − x| = {worst:e}"));
    }
    if let Ok(line) = period2_line(&p, 1e-12) {
        o.note(format!("period-2 lines found at δ ∈ {:?}", line.deltas));
    }
    o
}

fn c10() -> Outcome {
    let mut o = Outcome::default();
    let q = QuadraticForm2::new(1.0, 0.0, 2.0);
    for n in 2..=4 {
        let b = periodic_count_bound(&q, n).unwrap();
        o.check(b.bound_2n && b.violating_k.is_empty(), || format!("(1,0,2), n = {n}: {b:?}"));
    }
    for q in [QuadraticForm2::new(0.5, 0.0, 0.5), QuadraticForm2::new(0.3, 0.4, 0.3), QuadraticForm2::new(1.0, -1.5, 1.0)] {
        for n in [2, 4, 6, 8] {
            let b = periodic_count_bound(&q, n).unwrap();
            o.check(!b.bound_2n && b.violating_k.contains(&(n / 2)), || format!("{q:?}, n = {n}: {b:?}"));
        }
    }
    o
}

fn c11() -> Outcome {
    let mut o = Outcome::default();
    let mut r = rng(11);
    for n in [2usize, 3] {
        let ctx = SymplecticContext::new(n);
        for i in 0..100 {
            let s = gradient_shear(&symmetric_tensor(&mut r, n)).unwrap();
            let mu = symplectic_matrix(&mut r, n);
            let s = conjugate_linear(&s, &mu);
            let l = symplectic_matrix(&mut r, n);
            let b = DVector::from_fn(2 * n, |_, _| r.gen_range(-1.0..1.0));
            let t = QuadMap::new(b, l, vec![DMatrix::zeros(2 * n, 2 * n); 2 * n]).unwrap();
            let f = compose(&t, &s).unwrap().into_quad().unwrap();
            let dec = match symplectic_decompose(&f, &ctx, 1e-9) {
                Ok(d) => d,
                Err(e) => {
                    o.check(false, || format!("R{}, draw {i}: {e}", 2 * n));
                    continue;
                }
            };
            o.check(dec.square_residual < 1e-9, || format!("R{}, draw {i}: M(x)² residual {:e}", 2 * n, dec.square_residual));
            let g = match shear_to_gradient_form(&dec.shear, &ctx, 1e-9) {
                Ok(g) => g,
                Err(e) => {
                    o.check(false, || format!("R{}, draw {i}: {e}", 2 * n));
                    continue;
                }
            };
            for k in 0..5u64 {
                let p = &sample_points(1, n, 1.0, 1100 + 10 * i as u64 + k)[0];
                // ∂(B(p)p)_a/∂p_j = B(p)_aj + (B_j p)_a
                let jac = DMatrix::from_fn(n, n, |a, j| g.b_of(p)[(a, j)] + (&g.b[j] * p)[a]);
                let asym = (&jac - jac.transpose()).amax();
                o.check(asym < 1e-9, || format!("R{}, draw {i}: Jacobian asymmetry {asym:e}", 2 * n));
                let h = 1e-5;
                let grad = g.gradient(p);
                let fd = DVector::from_fn(n, |j, _| {
                    let mut up = p.clone();
                    let mut dn = p.clone();
                    up[j] += h;
                    dn[j] -= h;
                    (g.potential(&up) - g.potential(&dn)) / (2.0 * h)
                });
                let rel = (&fd - &grad).amax() / grad.amax().max(1e-3);
                o.check(rel < 1e-6, || format!("R{}, draw {i}: ∇V mismatch {rel:e}", 2 * n));
            }
        }
    }
    o
}

fn c12() -> Outcome {
    let mut o = Outcome::default();
    let t0 = Instant::now();
    let p = GenericMapParams::manifold_example();
    let h = reversor_for(&p, DEFAULT_TOL).unwrap();
    let fps = fixed_points(&p).unwrap();
    let a = fps.iter().find(|f| f.classification == quadvp::dynamics::Classification::TypeA).unwrap();
    let b = fps.iter().find(|f| f.classification == quadvp::dynamics::Classification::TypeB).unwrap();
    let opts = GrowOptions {
        epsilon: Some(1.3e-4),
        depth: 8,
        refine: 0.05,
        steps_per_generation: 30,
        bounding_box: Some(BoundingBox::symmetric_escape_cube(&p, &h).unwrap()),
        ..GrowOptions::default()
    };
    let wu = grow_2d(&p, b, ManifoldKind::Unstable, &opts).unwrap();
    let ws = grow_2d(&p, a, ManifoldKind::Stable, &opts).unwrap();
    let edge = wu.max_edge_length().max(ws.max_edge_length());
    let bound = 2.0 * opts.refine;
    o.check(edge <= bound, || format!("edge {edge} exceeds the bound {bound}"));
    o.note(format!("{} + {} vertices, edges ≤ {bound}", wu.vertices.len(), ws.vertices.len()));

    let curves = intersect_meshes(&wu, &ws, Some(&h));
    o.check(!curves.is_empty(), || "no intersection curve".into());
    let pts = heteroclinic_from_symmetry(&p, &h, (-1.0, 1.0), &HeteroclinicOptions::default()).unwrap();
    o.check(!pts.is_empty(), || "no heteroclinic point on Fix(h)".into());
    o.note(format!("{} curves, {} points on Fix(h)", curves.len(), pts.len()));

    // every crossing of Fix(h) by a curve sits at a certified point
    let crossings: Vec<_> = curves.iter().flat_map(|c| c.crossings.iter()).collect();
    o.check(!crossings.is_empty(), || "no curve crosses Fix(h)".into());
    for x in &crossings {
        let near = pts.iter().map(|q| (q.point - x.point).norm()).fold(f64::INFINITY, f64::min);
        o.check(near < bound, || format!("crossing at s = {} is {near} from every point", x.parameter));
        let t = symmetric_tangent(&p, &h, &x.point, 3000).unwrap();
        let ang = x.tangent.dot(&t).abs().min(1.0).acos().to_degrees();
        o.note(format!("crossing s = {:.5}: tangent off by {ang:.2}°", x.parameter));
        o.check(ang < 5.0, || format!("crossing at s = {}: tangent off by {ang}°", x.parameter));
    }
    let hu: Vec<Vector3<f64>> = wu.vertices.iter().map(|v| h.apply(v)).collect();
    let hd = hausdorff_distance(&hu, &ws.vertices);
    o.note(format!("Hausdorff {hd:.4}"));
    o.check(hd < 2.0 * bound, || format!("Hausdorff distance {hd} ≥ {}", 2.0 * bound));
    o.within(t0, Duration::from_secs(120));
    o
}

fn c13() -> Outcome {
    let mut o = Outcome::default();
    let grid = GridSpec {
        plane: Plane::TauAlpha,
        x_min: -4.0,
        x_max: 4.0,
        nx: 160,
        y_min: -3.0,
        y_max: 5.0,
        ny: 160,
    };
    for (name, q) in [("a=c", QuadraticForm2::new(0.5, 0.0, 0.5)), ("a≠c", QuadraticForm2::new(-0.5, 1.0, 0.5))] {
        let render = || {
            let d = stability_diagram(&grid, q, 0.0).unwrap();
            (d.to_csv(&[]), d.to_svg(&[]), d)
        };
        let (csv1, svg1, d) = render();
        let (csv2, svg2, _) = render();
        o.check(csv1 == csv2 && svg1 == svg2, || format!("{name}: outputs differ between runs"));
        let bad = d.boundary_mismatches(1.0);
        o.check(bad.is_empty(), || format!("{name}: {} boundary pairs off the curves, e.g. {:?}", bad.len(), bad.first()));
        o.note(format!("{name}: {} boundary pairs", d.boundary_pair_count()));
    }
    o
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("shear equivalences", c1),
        ("shear powers", c2),
        ("shear extraction round trip", c3),
        ("normal form conjugacy", c4),
        ("fixed points and trace identities", c5),
        ("stability landmarks", c6),
        ("escape bound", c7),
        ("reversor", c8),
        ("period-2 line", c9),
        ("periodic orbit bound", c10),
        ("symplectic gradient form", c11),
        ("manifold cross-validation", c12),
        ("diagram regression", c13),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = format!("{}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|a| a == &id || name.contains(a.as_str())) {
            continue;
        }
        let o = f();
        let status = if o.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("{status} {id:>2} {name} [{}]", o.notes.join("; "));
        if !o.failures.is_empty() {
            failed += 1;
            let shown: Vec<&String> = o.failures.iter().filter(|s| !s.is_empty()).collect();
            for s in shown {
                println!("     {s}");
            }
            println!("     {} failing checks", o.failures.len());
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
