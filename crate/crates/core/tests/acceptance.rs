//! Exit-gate checks: one PASS/FAIL line per criterion. Criteria listed in `UNATTAINABLE` are
//! reported but do not fail the run; everything else must pass.

use std::fs;
use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use semistab_core::blockdecomp::{
    decompose, eliminate, eliminate_general, reflect_z, tile_map, useful_tiles, verify_block_decomposition, BlockDecomposition, Tile,
    TileMapper, WitnessedMatrix,
};
use semistab_core::gitnorm::{
    find_destabilizer, git_norm, git_norm_with, minimize_diagonal, rescaled_at, sigma_interval, sparse_criterion, DiagonalStatus, GitOptions,
};
use semistab_core::linalg::float::{haar_orthogonal, singular_values};
use semistab_core::radon::{
    balanced_check, curvature_form, model_exponents, semistability_verdict, type1_decomposition, type1_problem, type2_decomposition,
    type2_problem, verify_destabilizing, verify_radon_decomposition, BalancedType, Certificate, CurvatureForm, RadonProblem, VerdictOptions,
    VerdictState,
};
use semistab_core::scalar::rat_to_f64;
use semistab_core::sublevel::{constant_tile_weight, estimate_integral, minor_square_sum, survey, BoxDomain, OmegaBasis, SampleOptions};
use semistab_core::tileplan::{solve_plan, tile_point, tiles_from_json, PlanJson, SigmaChoice};
use semistab_core::{act_group, rat, rat_int, GroupElement, Mat, Multiindex, Poly, PolyMatrix, Rat};

/// Criteria that cannot hold as stated; see the detail line for the closed-form argument.
const UNATTAINABLE: &[usize] = &[6];

type Check = Result<String, String>;

fn fixture(name: &str) -> String {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn matrix_fixture(name: &str) -> PolyMatrix<Rat> {
    PolyMatrix::from_json(&fixture(name)).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, budget: Duration) -> Result<(), String> {
    let el = t.elapsed();
    ensure(el < budget, || format!("took {el:?}, budget {budget:?}"))
}

fn v(d: usize, k: usize) -> Poly<Rat> {
    Poly::var(d, k)
}

fn c(d: usize, x: i64) -> Poly<Rat> {
    Poly::constant(d, rat_int(x))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn criterion_1() -> Check {
    let t = Instant::now();
    let w = WitnessedMatrix::from_json(&fixture("intro.json")).map_err(|e| e.to_string())?;
    let (dec, _) = w.decomposition().map_err(|e| e.to_string())?;
    ensure(dec.degrees == vec![vec![0, 1, 1], vec![0, 2, 3]], || format!("D = {:?}", dec.degrees))?;
    let rep = verify_block_decomposition(&w.m, &dec).map_err(|e| e.to_string())?;
    ensure(rep.pass, || format!("verification failed: {rep:?}"))?;
    within(t, Duration::from_secs(1))?;
    Ok(format!("D = {:?}, verified, {:?}", dec.degrees, t.elapsed()))
}

/// The displayed reduced matrix in variables (s₁, s₂, z₁, z₂) with z = s − t.
fn concrete_display() -> PolyMatrix<Rat> {
    let d = 4;
    let (s1, s2, z1, z2) = (v(d, 0), v(d, 1), v(d, 2), v(d, 3));
    let o = || Poly::zero(d);
    let m3 = |p: &Poly<Rat>| p.scale(&rat_int(-3));
    PolyMatrix::from_rows(
        d,
        vec![
            vec![c(d, 1), o(), o(), o(), z1.clone(), o(), o(), o(), z1.pow(2)],
            vec![o(), c(d, 1), o(), o(), o(), z2.clone(), o(), o(), z2.pow(2)],
            vec![m3(&s1), o(), c(d, 1), o(), m3(&(&s1 * &z1)), o(), z1.clone(), o(), z1.pow(3).scale(&rat_int(-2))],
            vec![o(), m3(&s2), o(), c(d, 1), o(), m3(&(&s2 * &z2)), o(), z2.clone(), z2.pow(3).scale(&rat_int(-2))],
        ],
    )
    .unwrap()
}

fn concrete_tiles() -> [Tile; 4] {
    [Tile::new((0, 1), (0, 0)), Tile::new((0, 1), (1, 1)), Tile::new((0, 0), (2, 2)), Tile::new((1, 1), (2, 2))]
}

fn criterion_2() -> Check {
    let t = Instant::now();
    let m = matrix_fixture("concrete.json");
    let el = eliminate_general(&m).map_err(|e| e.to_string())?;
    ensure(reflect_z(&el.r, m.d()) == concrete_display(), || format!("reduced matrix differs:\n{:?}", el.r))?;
    let (dec, _, _) = decompose(&m).map_err(|e| e.to_string())?;
    ensure(dec.degrees == vec![vec![0, 1, 2], vec![0, 1, 3]], || format!("D = {:?}", dec.degrees))?;
    let useful = useful_tiles(&dec);
    let tiles = concrete_tiles();
    ensure(tiles.iter().all(|x| useful.contains(x)), || format!("useful tiles {useful:?}"))?;
    let mapper = TileMapper::new(&m, &dec).map_err(|e| e.to_string())?;
    let origin = vec![rat_int(0); 2];
    let mut points = Vec::new();
    for (i, tile) in tiles.iter().enumerate() {
        let sigma = rat(i as i64, 2);
        let pm = mapper.at(tile, &origin).map_err(|e| e.to_string())?;
        ensure(sparse_criterion(&pm, &sigma).positive, || format!("tile {tile} not certified at σ = {sigma}"))?;
        points.push(tile_point(&dec, tile, &sigma));
    }
    let plan = solve_plan(&points, 4, 9, &SigmaChoice::Pinned(rat(13, 36))).map_err(|e| e.to_string())?.ok_or("plan infeasible")?;
    let want = vec![rat(4, 9), rat(4, 9), rat(1, 18), rat(1, 18)];
    ensure(plan.theta == want, || format!("θ = {:?}", plan.theta))?;
    ensure(plan.tau == rat(9, 13), || format!("τ = {}", plan.tau))?;
    within(t, Duration::from_secs(10))?;
    Ok(format!("reduced matrix exact, 4 tiles certified, θ = (4/9, 4/9, 1/18, 1/18), τ = 9/13, {:?}", t.elapsed()))
}

/// The degree-one part of the degenerate tile map, as displayed.
fn degenerate_linear_display() -> PolyMatrix<Rat> {
    let d = 3;
    let n = |k| -v(d, k);
    let o = || Poly::zero(d);
    PolyMatrix::from_rows(
        d,
        vec![vec![o(), n(1), n(2), n(0)], vec![n(1), n(0), o(), o()], vec![n(0), n(2), n(1), o()], vec![n(2), o(), n(0), o()]],
    )
    .unwrap()
}

fn criterion_3() -> Check {
    let t = Instant::now();
    let m = matrix_fixture("degenerate.json");
    let el = eliminate(&m).map_err(|e| e.to_string())?;
    // formal degrees: order of the lowest term, and 0 / 1 for the identically zero entries
    let degrees: Vec<Vec<u32>> =
        (0..4).map(|i| (0..8).map(|j| m.get(i, j).order().unwrap_or(u32::from(j >= 5))).collect()).collect();
    let dec = BlockDecomposition::new(vec![1; 4], vec![1; 8], degrees, el.a, el.b).map_err(|e| e.to_string())?;
    let p = tile_map(&m, &dec, &Tile::full(&dec), &[rat_int(0), rat_int(0), rat_int(0)]).map_err(|e| e.to_string())?;
    for s in [rat(3, 16), rat(5, 24)] {
        ensure(sparse_criterion(&p, &s).positive, || format!("not certified at σ = {s}"))?;
    }
    let (lo, hi) = sigma_interval(&p.support_set()).ok_or("empty σ interval")?;
    ensure(lo <= rat(3, 16) && hi >= rat(5, 24), || format!("σ interval [{lo}, {hi}]"))?;
    let linear = p.submatrix(0..4, 4..8).map_entries(|_, _, e| e.homogeneous_part(1));
    ensure(linear == degenerate_linear_display(), || format!("degree-one part differs: {linear:?}"))?;
    let sigma = rat(1, 3);
    let e = linear.support_set();
    let dz = find_destabilizer(&e, &sigma).ok_or("no destabiliser found")?;
    ensure(dz.verify(&e, &sigma) && dz.margin > rat_int(0), || format!("certificate fails: {dz:?}"))?;
    // ε-exponents: rows (3,−3,3,−3), columns (6,0,0,−6), variables (4,−2,−2)
    let exponents: Vec<Rat> = [3, -3, 3, -3, 6, 0, 0, -6, 4, -2, -2].iter().map(|&x| rat_int(x)).collect();
    let got = dz.w.flat();
    let k = exponents.iter().position(|x| *x != rat_int(0)).unwrap();
    let lambda = &got[k] / &exponents[k];
    ensure(lambda != rat_int(0) && got.iter().zip(&exponents).all(|(g, p)| *g == &lambda * p), || format!("direction {got:?}"))?;
    within(t, Duration::from_secs(10))?;
    Ok(format!("σ interval [{lo}, {hi}], destabiliser = ({lambda})·ε-exponents, margin {}, {:?}", dz.margin, t.elapsed()))
}

fn mono_matrix(d: usize, rows: Vec<Vec<Poly<Rat>>>) -> PolyMatrix<Rat> {
    PolyMatrix::from_rows(d, rows).unwrap()
}

fn criterion_4() -> Check {
    let t = Instant::now();
    let m = matrix_fixture("concrete.json");
    let (dec, _, _) = decompose(&m).map_err(|e| e.to_string())?;
    let mapper = TileMapper::new(&m, &dec).map_err(|e| e.to_string())?;
    let mut fixtures: Vec<(String, PolyMatrix<Rat>, Rat)> = vec![
        ("t2".into(), matrix_fixture("t2.json"), rat_int(1)),
        ("identity".into(), PolyMatrix::identity(2, 1), rat_int(0)),
        ("z".into(), mono_matrix(1, vec![vec![v(1, 0)]]), rat_int(1)),
        ("diag(1,4)".into(), mono_matrix(1, vec![vec![c(1, 1), Poly::zero(1)], vec![Poly::zero(1), c(1, 4)]]), rat_int(0)),
        ("[z1, 2z2]".into(), mono_matrix(2, vec![vec![v(2, 0), v(2, 1).scale(&rat_int(2))]]), rat(1, 2)),
    ];
    for (i, tile) in concrete_tiles().iter().enumerate() {
        fixtures.push((format!("tile {tile}"), mapper.at(tile, &[rat_int(0), rat_int(0)]).map_err(|e| e.to_string())?, rat(i as i64, 2)));
    }
    let mut used = 0;
    let mut worst = 0.0f64;
    for (name, pm, sigma) in &fixtures {
        let sc = sparse_criterion(pm, sigma);
        if !(sc.applicable && sc.positive && sc.strictly_positive_theta) {
            continue;
        }
        used += 1;
        let s = rat_to_f64(sigma);
        let g = git_norm(pm, s, 16, 400);
        let dg = minimize_diagonal(pm, s, 1e-12, 200);
        let norm = pm.hs_norm();
        ensure(rel(g.value, dg.value) <= 1e-3, || format!("{name}: git {} vs diagonal {}", g.value, dg.value))?;
        ensure(g.foc_residual <= 1e-6 * norm * norm, || format!("{name}: residual {}", g.foc_residual))?;
        worst = worst.max(rel(g.value, dg.value));
    }
    ensure(used >= 8, || format!("only {used} fixtures satisfy the sparse hypotheses"))?;
    let drift: Vec<(PolyMatrix<Rat>, f64)> = vec![
        (mono_matrix(1, vec![vec![v(1, 0).pow(2)]]), 1.0),
        (mono_matrix(1, vec![vec![v(1, 0).pow(2)]]), 3.0),
        (matrix_fixture("t2.json"), 0.5),
        (matrix_fixture("t2.json"), 2.0),
        (mono_matrix(2, vec![vec![v(2, 0), v(2, 1)]]), 1.0),
    ];
    for (pm, s) in &drift {
        let dg = minimize_diagonal(pm, *s, 1e-12, 200);
        let norm = pm.hs_norm();
        ensure(dg.status == DiagonalStatus::DriftToZero && dg.value < 1e-6 * norm, || format!("σ = {s}: {:?} {}", dg.status, dg.value))?;
        let g = git_norm(pm, *s, 4, 200);
        ensure(g.status == DiagonalStatus::DriftToZero, || format!("σ = {s}: git status {:?}", g.status))?;
    }
    Ok(format!("{used} sparse fixtures agree (worst rel {worst:.1e}), {} drift fixtures, {:?}", drift.len(), t.elapsed()))
}

fn random_poly_matrix(rng: &mut ChaCha8Rng, p: usize, q: usize, d: usize, deg: u32) -> PolyMatrix<f64> {
    let monos = Multiindex::all_up_to(d, deg);
    let entries = (0..p * q)
        .map(|_| {
            let terms: Vec<(Multiindex, f64)> =
                monos.iter().filter_map(|a| rng.random_bool(0.6).then(|| (a.clone(), rng.random_range(-2.0..2.0)))).collect();
            Poly::from_terms(d, terms)
        })
        .collect();
    PolyMatrix::new(p, q, d, entries).unwrap()
}

fn orthogonal(rng: &mut ChaCha8Rng, n: usize) -> Mat<f64> {
    Mat::from_nalgebra(&haar_orthogonal(n, rng))
}

fn criterion_5() -> Check {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_hs = 0.0f64;
    for _ in 0..1000 {
        let (p, q, d) = (rng.random_range(1..=3), rng.random_range(1..=4), rng.random_range(1..=3));
        let pm = random_poly_matrix(&mut rng, p, q, d, 3);
        let g = GroupElement::new(orthogonal(&mut rng, p), orthogonal(&mut rng, q), orthogonal(&mut rng, d)).unwrap();
        let moved = act_group(&pm, &g).map_err(|e| e.to_string())?;
        let r = rel(moved.hs_norm(), pm.hs_norm());
        ensure(r <= 1e-9, || format!("HS invariance off by {r:e}"))?;
        worst_hs = worst_hs.max(r);
    }
    let mut worst_minor = 0.0f64;
    for _ in 0..1000 {
        let p = rng.random_range(1..=4);
        let q = rng.random_range(p..=7);
        let m = DMatrix::from_fn(p, q, |_, _| rng.random_range(-3.0..3.0));
        // left: ordered column tuples = p!·(increasing tuples); right: p!/p^p·[inf_A ‖AM‖²]^p with
        // the infimum p·(Πσⱼ²)^{1/p} from the singular values
        let fact: f64 = (1..=p).map(|k| k as f64).product();
        let left = fact * minor_square_sum(&m);
        let prod: f64 = singular_values(&m).iter().map(|s| s * s).product();
        let inf = p as f64 * prod.powf(1.0 / p as f64);
        let right = fact / (p as f64).powi(p as i32) * inf.powi(p as i32);
        let r = rel(left, right);
        ensure(r <= 1e-8, || format!("minor-sum identity off by {r:e} at {p}x{q}"))?;
        worst_minor = worst_minor.max(r);
    }
    // homogeneous of degree k at the balanced σ = k/d
    let (mut worst_orbit, mut strict) = (0.0f64, 0);
    for k in 0..300 {
        let (p, q, deg) = (rng.random_range(1..=2), rng.random_range(1..=3), rng.random_range(0..=2u32));
        let pm = random_poly_matrix(&mut rng, p, q, 2, deg)
            .map(|x| semistab_core::scalar::f64_to_rat(*x, 64))
            .map_entries(|_, _, e| e.homogeneous_part(deg));
        if pm.is_zero() {
            continue;
        }
        let sigma = deg as f64 / 2.0;
        let opts = GitOptions { restarts: 2, budget: 60, seed: k, ..Default::default() };
        let e = git_norm_with(&pm, sigma, &opts);
        let g = unimodular_element(&mut rng, p, q, 2);
        let moved = act_group(&pm, &g).map_err(|e| e.to_string())?;
        let transported = e.frame.compose(&g.inverse().unwrap().to_f64());
        let here = rescaled_at(&pm, &e.frame, &e.w, sigma).hs_norm();
        let there = rescaled_at(&moved, &transported, &e.w, sigma).hs_norm();
        ensure(rel(here, e.value) <= 1e-9, || format!("incumbent value {} vs recomputed {here}", e.value))?;
        // round-off in the transported frame is amplified by the largest diagonal weight
        // e^{w_p,i + w_q,j + α·w_d − σΣw_d}; the 10⁻⁹ check applies where that stays small
        let top = |x: &[f64]| x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let amp = (top(&e.w.w_p) + top(&e.w.w_q) + deg as f64 * top(&e.w.w_d).max(0.0) - sigma * e.w.w_d.iter().sum::<f64>()).exp();
        let gi = g.inverse().unwrap();
        let kappa: f64 = [(&g.a, &gi.a), (&g.b, &gi.b), (&g.c, &gi.c)].iter().map(|(m, mi)| m.rows() as f64 * m.max_abs() * mi.max_abs()).product();
        let floor = 1e-14 * amp * kappa * pm.hs_norm();
        if floor <= 1e-10 * here {
            strict += 1;
            let r = rel(here, there);
            ensure(r <= 1e-9, || format!("orbit transport off by {r:e}: {here} vs {there}"))?;
            worst_orbit = worst_orbit.max(r);
        } else {
            ensure((here - there).abs() <= 1e-9 * here + floor, || format!("incumbent moved: {here} vs {there} (floor {floor:e}, conditioning {kappa:.1e})"))?;
        }
    }
    ensure(strict >= 50, || format!("only {strict} well-conditioned incumbents"))?;
    Ok(format!("HS {worst_hs:.1e}, minor-sum {worst_minor:.1e}, orbit transport {worst_orbit:.1e} over {strict} well-conditioned minimisers, {:?}", t.elapsed()))
}

/// (A, B, C) with integer shears of determinant 1 and C = shear·diag(2, 1/2).
fn unimodular_element(rng: &mut ChaCha8Rng, p: usize, q: usize, d: usize) -> GroupElement<Rat> {
    let mut shear = |n: usize| {
        let mut m = Mat::<Rat>::identity(n);
        for _ in 0..2 * n {
            if n < 2 {
                break;
            }
            let i = rng.random_range(0..n);
            let j = (i + rng.random_range(1..n)) % n;
            let f = rat_int(rng.random_range(-2..=2));
            for col in 0..n {
                let x = &m[(j, col)] * &f;
                m[(i, col)] = &m[(i, col)] + &x;
            }
        }
        m
    };
    let (a, b, s) = (shear(p), shear(q), shear(d));
    let mut scale = vec![rat_int(1); d];
    scale[0] = rat_int(2);
    scale[d - 1] = rat(1, 2);
    GroupElement::new(a, b, &s * &Mat::diag(&scale)).unwrap()
}

fn aniso(c: f64) -> OmegaBasis {
    OmegaBasis::from_columns(&[vec![c, 0.0], vec![0.0, 1.0 / c]]).unwrap()
}

fn criterion_6() -> Check {
    let t = Instant::now();
    let row = PolyMatrix::<f64>::from_rows(1, vec![vec![Poly::one(1), Poly::var(1, 0)]]).unwrap();
    let one = |_: &[f64]| 1.0;
    let radius = 1.0e4;
    let dom = BoxDomain::cube(1, radius);
    let opts = SampleOptions { samples: 100_000, seed: 0, stratified: true, ..Default::default() };
    let mut notes = Vec::new();
    for cc in [0.1, 1.0, 10.0] {
        let est = estimate_integral(&row, &one, 2.0, &dom, &aniso(cc), &opts).map_err(|e| e.to_string())?;
        let r = rel(est.value, std::f64::consts::PI);
        ensure(r <= 0.1, || format!("τ = 2, c = {cc}: {} vs π", est.value))?;
        notes.push(format!("c={cc}: {:.4}", est.value));
    }
    let e1 = estimate_integral(&row, &one, 1.0, &dom, &aniso(1.0), &opts).map_err(|e| e.to_string())?;
    let e10 = estimate_integral(&row, &one, 1.0, &dom, &aniso(10.0), &opts).map_err(|e| e.to_string())?;
    within(t, Duration::from_secs(30))?;
    // ∫_{−R}^{R} (c² + t²/c²)^{−1/2} dt = 2c·asinh(R/c²), so the ratio is 10·asinh(R/100)/asinh(R) < 10 for every R
    let closed = |cc: f64| 2.0 * cc * (radius / (cc * cc)).asinh();
    let ratio = e10.value / e1.value;
    let closed_ratio = closed(10.0) / closed(1.0);
    let summary = format!(
        "τ = 2 within 10% of π ({}); τ = 1 ratio c=10/c=1 is {ratio:.3} (closed form {closed_ratio:.3}, supremum over R is 10)",
        notes.join(", ")
    );
    if ratio > 10.0 {
        Ok(summary)
    } else {
        Err(format!("{summary}: the required ratio > 10 is unattainable"))
    }
}

fn criterion_7() -> Check {
    let t = Instant::now();
    let cfg: Value = serde_json::from_str(&fixture("concrete_sublevel.json")).map_err(|e| e.to_string())?;
    let num = |k: &str| cfg[k].as_f64().ok_or_else(|| format!("fixture field {k}"));
    let int = |k: &str| cfg[k].as_u64().ok_or_else(|| format!("fixture field {k}"));
    let cap = cfg["oracle"]["cap"].as_f64().ok_or("fixture field oracle.cap")?;
    let m = matrix_fixture(cfg["matrix"].as_str().ok_or("fixture field matrix")?);
    let pj: PlanJson = serde_json::from_str(&fixture(cfg["plan"].as_str().ok_or("fixture field plan")?)).map_err(|e| e.to_string())?;
    let (dec, _, _) = decompose(&m).map_err(|e| e.to_string())?;
    let mapper = TileMapper::new(&m, &dec).map_err(|e| e.to_string())?;
    let points: Vec<_> = tiles_from_json(&pj).map_err(|e| e.to_string())?.iter().map(|(tile, s)| tile_point(&dec, tile, s)).collect();
    let plan = solve_plan(&points, m.p(), m.q(), &SigmaChoice::Pinned(rat(13, 36))).map_err(|e| e.to_string())?.ok_or("plan infeasible")?;
    ensure(plan.tau == rat(9, 13), || format!("τ = {}", plan.tau))?;
    let w = constant_tile_weight(&mapper, &plan, &GitOptions::default()).map_err(|e| e.to_string())?.ok_or("plan tiles lack certificates")?;
    ensure(rel(w, num("weight")?) <= 1e-6, || format!("weight {w} differs from the oracle's"))?;
    let dom = BoxDomain::cube(2, num("radius")?);
    let mf = m.to_f64();
    let mut maxima = Vec::new();
    let seeds: Vec<u64> = cfg["seeds"].as_array().ok_or("fixture field seeds")?.iter().filter_map(Value::as_u64).collect();
    ensure(seeds.len() >= 3, || "need the pinned seed and fresh re-run seeds".into())?;
    for seed in seeds {
        let opts = SampleOptions { samples: int("samples")? as usize, seed, stratified: true, ..Default::default() };
        let rep = survey(&mf, &|_: &[f64]| w, 9.0 / 13.0, &dom, int("omegas")? as usize, num("scale_max")?, &opts).map_err(|e| e.to_string())?;
        ensure(rep.omegas.len() == 200, || format!("{} bases", rep.omegas.len()))?;
        ensure(rep.max_estimate < cap, || format!("seed {seed}: max {} ≥ cap {cap}", rep.max_estimate))?;
        maxima.push(format!("{:.3}", rep.max_estimate));
    }
    within(t, Duration::from_secs(300))?;
    Ok(format!("maxima [{}] below cap {cap}, {:?}", maxima.join(", "), t.elapsed()))
}

fn criterion_8() -> Check {
    let t = Instant::now();
    let e = model_exponents(3, 3, 2).map_err(|e| e.to_string())?;
    ensure((e.r_g.clone(), e.r_f.clone()) == (rat(5, 3), rat(5, 3)), || format!("{e:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let n = rng.random_range(2..=12usize);
        let n1 = rng.random_range(2..=12usize);
        let k = rng.random_range(1..n.min(n1));
        let e = model_exponents(n, n1, k).map_err(|e| e.to_string())?;
        let (ni, n1i, ki) = (n as i64, n1 as i64, k as i64);
        ensure(rat_int(ni + ki) * &e.inv_p2 + rat_int(n1i + ki) * &e.inv_p1 == rat_int(n1i + ni), || format!("identity fails at ({n},{n1},{k})"))?;
    }
    let r = balanced_check(&[Multiindex::new(vec![2])], BalancedType::Two, 1).map_err(|e| e.to_string())?;
    ensure(r.r == rat(3, 2) && r.target == rat_int(3), || format!("{r:?}"))?;
    let mi = |v: &[u32]| Multiindex::new(v.to_vec());
    let type1: Vec<(Vec<Multiindex>, usize)> =
        vec![(vec![mi(&[1, 0]), mi(&[0, 1])], 1), (vec![mi(&[1, 0]), mi(&[0, 1]), mi(&[1, 1])], 2), (vec![mi(&[1])], 3)];
    for (set, k) in &type1 {
        let prob = type1_problem(set, *k).map_err(|e| e.to_string())?;
        let rep = verify_radon_decomposition(&prob, &vec![rat_int(0); prob.n], &type1_decomposition(set, *k)).map_err(|e| e.to_string())?;
        ensure(rep.pass, || format!("P₁ for {set:?}, k = {k}: {rep:?}"))?;
    }
    let type2: Vec<Vec<Multiindex>> = vec![vec![mi(&[2])], vec![mi(&[2]), mi(&[3])], vec![mi(&[2, 0]), mi(&[0, 2]), mi(&[1, 1])]];
    for set in &type2 {
        let prob = type2_problem(set).map_err(|e| e.to_string())?;
        let rep = verify_radon_decomposition(&prob, &vec![rat_int(0); prob.n], &type2_decomposition(set)).map_err(|e| e.to_string())?;
        ensure(rep.pass, || format!("P₂ for {set:?}: {rep:?}"))?;
    }
    Ok(format!("(5/3, 5/3), identity on 20 triples, r = 3/2 → 3, {} P₁ and {} P₂ decompositions verified, {:?}", type1.len(), type2.len(), t.elapsed()))
}

fn criterion_9() -> Check {
    let t = Instant::now();
    let opts = VerdictOptions { frames: 16, ..Default::default() };
    let unit = CurvatureForm::from_tensor(vec![vec![vec![rat_int(1)]]]).map_err(|e| e.to_string())?;
    let v = semistability_verdict(&unit, &opts).map_err(|e| e.to_string())?;
    ensure(v.state == VerdictState::Positive, || format!("unit form: {v:?}"))?;
    let parabola = RadonProblem::from_json(&fixture("parabola.json")).map_err(|e| e.to_string())?;
    let q = curvature_form(&parabola, &[rat_int(0), rat_int(0)], &[rat_int(0)]).map_err(|e| e.to_string())?;
    let v = semistability_verdict(&q, &opts).map_err(|e| e.to_string())?;
    ensure(v.state == VerdictState::Positive, || format!("parabola: {v:?}"))?;
    let check_unstable = |q: &CurvatureForm, what: &str| -> Result<(), String> {
        let v = semistability_verdict(q, &opts).map_err(|e| e.to_string())?;
        let Certificate::Destabilizing { frame, destabilizer } = &v.certificate else { return Err(format!("{what}: {v:?}")) };
        ensure(v.state == VerdictState::Unstable && verify_destabilizing(&q.to_poly_matrix(), &v.sigma, frame, destabilizer), || {
            format!("{what}: certificate does not re-verify")
        })
    };
    check_unstable(&CurvatureForm::zeros(1, 1, 1), "zero form")?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in 0..20 {
        let tensor = (0..5).map(|_| (0..2).map(|_| (0..3).map(|_| rat_int(rng.random_range(-9..=9))).collect()).collect()).collect();
        check_unstable(&CurvatureForm::from_tensor(tensor).map_err(|e| e.to_string())?, &format!("random form {k}"))?;
    }
    Ok(format!("unit and parabola positive; zero and 20 random (5,2,3) forms unstable with exact certificates, {:?}", t.elapsed()))
}

#[test]
fn acceptance() {
    let criteria: [(usize, fn() -> Check); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    // written to the raw handle so the lines survive the test harness's output capture
    let mut out = std::io::stdout();
    let mut unexpected = Vec::new();
    for (n, f) in criteria {
        match f() {
            Ok(detail) => writeln!(out, "criterion {n}: PASS — {detail}").unwrap(),
            Err(detail) => {
                writeln!(out, "criterion {n}: FAIL — {detail}").unwrap();
                if !UNATTAINABLE.contains(&n) {
                    unexpected.push(n);
                }
            }
        }
    }
    assert!(unexpected.is_empty(), "failing criteria: {unexpected:?}");
}
