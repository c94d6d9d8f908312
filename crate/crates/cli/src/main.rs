mod table;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use semistab_core::blockdecomp::{decompose, invariance_certificate, useful_tiles, verify_block_decomposition, BlockDecomposition, TileMapper, WitnessedMatrix};
use semistab_core::gitnorm::{find_destabilizer, git_norm_with, polytope_membership, sigma_interval, sparse_criterion, DiagonalStatus, GitOptions};
use semistab_core::polycore::json::{rat_from_json, rat_to_json};
use semistab_core::radon::{balanced_check, curvature_form, model_exponents, verdict_at, BalancedType, RadonProblem, VerdictOptions, VerdictState};
use semistab_core::scalar::{fmt_rat, parse_rat, rat_to_f64};
use semistab_core::sublevel::{constant_tile_weight, survey, BoxDomain, SampleOptions};
use semistab_core::tileplan::{certified_tile_points, solve_plan, tile_point, tiles_from_json, PlanJson, SigmaChoice, TilePlan};
use semistab_core::{Error, Multiindex, PolyMatrix, Rat};

use table::Table;

#[derive(Parser, Debug)]
#[command(name = "semistab", version, about = "Semistability, block decompositions and sublevel estimates for polynomial matrices")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Hilbert-Schmidt norm of a polynomial matrix.
    Hsnorm(Common),
    /// Upper bound for the GIT norm by orthogonal-frame descent.
    Gitnorm(Common),
    /// Semistability verdict with a certificate.
    Semistable(Common),
    /// Destabilising one-parameter subgroup of the support in the given frame.
    Destabilize(Common),
    /// Newton-polytope membership of the balanced barycenter and the feasible σ interval.
    Polytope(Common),
    /// Block decomposition of an incidence matrix, optionally verified.
    Blockdecomp(BlockArgs),
    /// Useful tiles with their certified σ values.
    Tiles(Common),
    /// Tile plan and sublevel exponent τ.
    Plan(Common),
    /// Sublevel integral estimates over random volume-one bases.
    Sublevel(SublevelArgs),
    /// Radon-like transforms: exponents, balanced sets or curvature verdicts.
    Radon(RadonArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Input JSON file (also accepted as --input).
    #[arg(value_name = "PATH", conflicts_with = "input")]
    path: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// σ as num/den.
    #[arg(long, value_parser = parse_rat_arg)]
    sigma: Option<Rat>,
    /// τ as num/den.
    #[arg(long, value_parser = parse_rat_arg)]
    tau: Option<Rat>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 8.0)]
    scale_max: f64,
    /// Cap on worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct BlockArgs {
    #[command(flatten)]
    common: Common,
    /// Verify the decomposition exactly.
    #[arg(long)]
    verify: bool,
    /// Verify this decomposition file instead of computing one.
    #[arg(long, value_name = "PATH")]
    decomposition: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SublevelArgs {
    #[command(flatten)]
    common: Common,
    /// Number of random bases ω.
    #[arg(long, default_value_t = 200)]
    omegas: usize,
    /// Half-width of the integration cube.
    #[arg(long, default_value_t = 50.0)]
    radius: f64,
    /// Plain Monte Carlo instead of adaptive stratification.
    #[arg(long)]
    plain: bool,
    /// Use the tiles and σ of this plan file instead of searching for a plan.
    #[arg(long, value_name = "PATH")]
    plan: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RadonArgs {
    #[command(flatten)]
    common: Common,
    /// Print the model exponents for (n, n1, k).
    #[arg(long, requires_all = ["n", "n1", "k"])]
    exponents: bool,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Balanced multiindex set, e.g. "1,0;0,1".
    #[arg(long, value_name = "SET")]
    balanced: Option<String>,
    /// Balanced type (1 or 2).
    #[arg(long = "type", value_parser = clap::value_parser!(u8).range(1..=2), default_value_t = 1)]
    balanced_type: u8,
    /// Base point x₀ as comma-separated rationals (default 0).
    #[arg(long, value_name = "RATS")]
    x0: Option<String>,
    /// Base point t₀ as comma-separated rationals (default 0).
    #[arg(long, value_name = "RATS")]
    t0: Option<String>,
}

fn parse_rat_arg(s: &str) -> Result<Rat, String> {
    parse_rat(s)
}

/// Decisive, undetermined, or input error.
enum Outcome {
    Decisive,
    Undetermined,
}

type CliResult = Result<(Value, Table, Outcome), String>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let common = match &cli.verb {
        Verb::Blockdecomp(a) => &a.common,
        Verb::Sublevel(a) => &a.common,
        Verb::Radon(a) => &a.common,
        Verb::Hsnorm(c) | Verb::Gitnorm(c) | Verb::Semistable(c) | Verb::Destabilize(c) | Verb::Polytope(c) | Verb::Tiles(c) | Verb::Plan(c) => c,
    };
    if let Some(n) = common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.verb {
        Verb::Hsnorm(c) => hsnorm(c),
        Verb::Gitnorm(c) => gitnorm(c),
        Verb::Semistable(c) => semistable(c),
        Verb::Destabilize(c) => destabilize(c),
        Verb::Polytope(c) => polytope(c),
        Verb::Blockdecomp(a) => blockdecomp(a),
        Verb::Tiles(c) => tiles(c),
        Verb::Plan(c) => plan(c),
        Verb::Sublevel(a) => sublevel(a),
        Verb::Radon(a) => radon(a),
    };
    match result {
        Ok((report, table, outcome)) => {
            if let Some(out) = &common.out {
                let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
                if let Err(e) = fs::write(out, text) {
                    eprintln!("error: cannot write {}: {e}", out.display());
                    return ExitCode::from(1);
                }
            }
            print!("{table}");
            match outcome {
                Outcome::Decisive => ExitCode::SUCCESS,
                Outcome::Undetermined => ExitCode::from(2),
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn json_err(e: Error) -> String {
    format!("cannot serialize report: {e}")
}

fn read_input(c: &Common) -> Result<(PathBuf, String), String> {
    let path = c.input.clone().or_else(|| c.path.clone()).ok_or("no input file given (use --input PATH)")?;
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Ok((path, text))
}

fn read_matrix(c: &Common) -> Result<PolyMatrix<Rat>, String> {
    let (path, text) = read_input(c)?;
    PolyMatrix::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn require_sigma(c: &Common) -> Result<Rat, String> {
    c.sigma.clone().ok_or_else(|| "--sigma is required for this verb".to_string())
}

fn git_options(c: &Common) -> GitOptions {
    GitOptions { restarts: c.restarts, seed: c.seed, ..GitOptions::default() }
}

fn rat_json(r: &Rat) -> Result<Value, String> {
    serde_json::to_value(rat_to_json(r).map_err(json_err)?).map_err(|e| e.to_string())
}

fn rats_json(v: &[Rat]) -> Result<Value, String> {
    Ok(Value::Array(v.iter().map(rat_json).collect::<Result<_, _>>()?))
}

fn fmt_rats(v: &[Rat]) -> String {
    v.iter().map(fmt_rat).collect::<Vec<_>>().join(" ")
}

fn hsnorm(c: &Common) -> CliResult {
    let pm = read_matrix(c)?;
    let value = pm.hs_norm();
    let mut t = Table::new(&["p", "q", "d", "hs_norm"]);
    t.row(vec![pm.p().to_string(), pm.q().to_string(), pm.d().to_string(), format!("{value:.6}")]);
    Ok((json!({"p": pm.p(), "q": pm.q(), "d": pm.d(), "value": value}), t, Outcome::Decisive))
}

fn gitnorm(c: &Common) -> CliResult {
    let pm = read_matrix(c)?;
    let sigma = require_sigma(c)?;
    let est = git_norm_with(&pm, rat_to_f64(&sigma), &git_options(c));
    let mut t = Table::new(&["sigma", "value", "status", "residual", "restart"]);
    t.row(vec![fmt_rat(&sigma), format!("{:.6}", est.value), est.status.as_str().into(), format!("{:.3e}", est.foc_residual), est.restart.to_string()]);
    let report = json!({
        "value": est.value,
        "status": est.status.as_str(),
        "certificate": {
            "w_p": est.w.w_p, "w_q": est.w.w_q, "w_d": est.w.w_d,
            "frame": {"A": est.frame.a.to_rows(), "B": est.frame.b.to_rows(), "C": est.frame.c.to_rows()},
            "residual": est.foc_residual,
            "restart": est.restart,
            "evaluations": est.evaluations,
        },
    });
    let outcome = if est.status == DiagonalStatus::BudgetExhausted { Outcome::Undetermined } else { Outcome::Decisive };
    Ok((report, t, outcome))
}

fn semistable(c: &Common) -> CliResult {
    let pm = read_matrix(c)?;
    let sigma = require_sigma(c)?;
    let opts = VerdictOptions { frames: c.restarts, seed: c.seed, git: git_options(c) };
    let v = verdict_at(&pm, &sigma, &opts).map_err(err)?;
    let report = v.to_json_value().map_err(json_err)?;
    let mut t = Table::new(&["sigma", "verdict", "certificate", "frames"]);
    t.row(vec![fmt_rat(&sigma), v.state.as_str().into(), report["certificate"]["kind"].as_str().unwrap_or("").into(), v.frames_tried.to_string()]);
    let outcome = if v.state == VerdictState::Undetermined { Outcome::Undetermined } else { Outcome::Decisive };
    Ok((report, t, outcome))
}

fn destabilize(c: &Common) -> CliResult {
    let pm = read_matrix(c)?;
    let sigma = require_sigma(c)?;
    let e = pm.support_set();
    let mut t = Table::new(&["sigma", "result", "margin", "w_p", "w_q", "w_d"]);
    let report = match find_destabilizer(&e, &sigma) {
        Some(d) => {
            let ok = d.verify(&e, &sigma);
            t.row(vec![fmt_rat(&sigma), if ok { "destabilized".into() } else { "unverified".into() }, fmt_rat(&d.margin), fmt_rats(&d.w.w_p), fmt_rats(&d.w.w_q), fmt_rats(&d.w.w_d)]);
            json!({
                "found": true, "verified": ok, "sigma": rat_json(&sigma)?,
                "margin": rat_json(&d.margin)?, "lp_margin": rat_json(&d.lp_margin)?,
                "w_p": rats_json(&d.w.w_p)?, "w_q": rats_json(&d.w.w_q)?, "w_d": rats_json(&d.w.w_d)?,
            })
        }
        None => {
            t.row(vec![fmt_rat(&sigma), "none in this frame".into(), "-".into(), "-".into(), "-".into(), "-".into()]);
            json!({"found": false, "sigma": rat_json(&sigma)?})
        }
    };
    Ok((report, t, Outcome::Decisive))
}

fn polytope(c: &Common) -> CliResult {
    let pm = read_matrix(c)?;
    let sigma = require_sigma(c)?;
    let e = pm.support_set();
    let m = polytope_membership(&e, &sigma).map_err(err)?;
    let interval = sigma_interval(&e);
    let sparse = sparse_criterion(&pm, &sigma);
    let mut t = Table::new(&["sigma", "member", "sigma_min", "sigma_max", "sparse_positive"]);
    let (lo, hi) = interval.clone().map(|(a, b)| (fmt_rat(&a), fmt_rat(&b))).unwrap_or(("-".into(), "-".into()));
    t.row(vec![fmt_rat(&sigma), m.member.to_string(), lo, hi, sparse.positive.to_string()]);
    let report = json!({
        "sigma": rat_json(&sigma)?,
        "member": m.member,
        "theta": m.theta.as_deref().map(rats_json).transpose()?,
        "separator": m.separator.as_ref().map(|d| -> Result<Value, String> {
            Ok(json!({"w_p": rats_json(&d.w.w_p)?, "w_q": rats_json(&d.w.w_q)?, "w_d": rats_json(&d.w.w_d)?, "margin": rat_json(&d.margin)?}))
        }).transpose()?,
        "sigma_interval": interval.map(|(a, b)| -> Result<Value, String> { Ok(json!([rat_json(&a)?, rat_json(&b)?])) }).transpose()?,
        "sparse": {"applicable": sparse.applicable, "positive": sparse.positive, "strictly_positive_theta": sparse.strictly_positive_theta},
    });
    Ok((report, t, Outcome::Decisive))
}

fn degree_table(dec: &BlockDecomposition) -> Table {
    let mut heads = vec!["D".to_string()];
    heads.extend((0..=dec.m()).map(|j| format!("q{j}={}", dec.col_groups[j])));
    let mut t = Table::owned(heads);
    for (i, row) in dec.degrees.iter().enumerate() {
        let mut r = vec![format!("p{i}={}", dec.row_groups[i])];
        r.extend(row.iter().map(|x| x.to_string()));
        t.row(r);
    }
    t
}

fn blockdecomp(a: &BlockArgs) -> CliResult {
    let (path, text) = read_input(&a.common)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("{}: malformed JSON: {e}", path.display()))?;
    let witnessed = value.get("M").is_some();
    let at = |e: Error| format!("{}: {e}", path.display());
    let (m, dec, route, flagged) = if witnessed {
        let w = WitnessedMatrix::from_json(&text).map_err(at)?;
        let (dec, v) = w.decomposition().map_err(err)?;
        (w.m, dec, "given".to_string(), v.flagged)
    } else {
        let m = PolyMatrix::from_json(&text).map_err(at)?;
        match &a.decomposition {
            Some(dp) => {
                let t = fs::read_to_string(dp).map_err(|e| format!("cannot read {}: {e}", dp.display()))?;
                let dec = BlockDecomposition::from_json(&t).map_err(|e| format!("{}: {e}", dp.display()))?;
                (m, dec, "given".to_string(), Vec::new())
            }
            None => {
                let (dec, el, v) = decompose(&m).map_err(err)?;
                (m, dec, format!("{:?}", el.route).to_lowercase(), v.flagged)
            }
        }
    };
    let mut report = json!({
        "decomposition": dec.to_json_value().map_err(json_err)?,
        "route": route,
        "flagged_zero_blocks": flagged,
    });
    let mut t = degree_table(&dec);
    let mut outcome = Outcome::Decisive;
    if a.verify || a.decomposition.is_some() {
        let rep = verify_block_decomposition(&m, &dec).map_err(err)?;
        report["verify"] = serde_json::to_value(&rep).map_err(|e| e.to_string())?;
        t.footer(format!("{} ({} violations, det A = 1: {}, det B = 1: {}, monotone: {})", if rep.pass { "PASS" } else { "FAIL" }, rep.violations.len(), rep.det_a, rep.det_b, rep.monotone));
        if !rep.pass {
            outcome = Outcome::Undetermined;
        }
    }
    Ok((report, t, outcome))
}

fn tile_setup(c: &Common) -> Result<(PolyMatrix<Rat>, TileMapper), String> {
    let m = read_matrix(c)?;
    let (dec, _, _) = decompose(&m).map_err(err)?;
    let mapper = TileMapper::new(&m, &dec).map_err(err)?;
    Ok((m, mapper))
}

fn tiles(c: &Common) -> CliResult {
    let (m, mapper) = tile_setup(c)?;
    let t0 = vec![Rat::from_integer(0.into()); m.d()];
    let points = certified_tile_points(&mapper, &t0).map_err(err)?;
    let mut t = Table::new(&["tile", "shape", "certified_sigma"]);
    let mut list = Vec::new();
    for tile in useful_tiles(&mapper.dec) {
        let sig: Vec<Rat> = points.iter().filter(|p| p.tile == tile).map(|p| p.sigma.clone()).collect();
        t.row(vec![tile.to_string(), format!("{}x{}", tile.p_of(&mapper.dec), tile.q_of(&mapper.dec)), if sig.is_empty() { "-".into() } else { fmt_rats(&sig) }]);
        list.push(json!({"rows": [tile.rows.0, tile.rows.1], "cols": [tile.cols.0, tile.cols.1], "certified_sigma": rats_json(&sig)?}));
    }
    Ok((json!({"D": mapper.dec.degrees, "tiles": list}), t, Outcome::Decisive))
}

fn solve_points(c: &Common, m: &PolyMatrix<Rat>, mapper: &TileMapper, invariant_only: bool) -> Result<Option<TilePlan>, String> {
    let t0 = vec![Rat::from_integer(0.into()); m.d()];
    let mut points = certified_tile_points(mapper, &t0).map_err(err)?;
    if invariant_only {
        points.retain(|pt| mapper.symbolic(&pt.tile).ok().and_then(|s| invariance_certificate(&s)).is_some());
    }
    if points.is_empty() {
        return Ok(None);
    }
    let choice = c.sigma.clone().map_or(SigmaChoice::Max, SigmaChoice::Pinned);
    solve_plan(&points, m.p(), m.q(), &choice).map_err(err)
}

fn plan(c: &Common) -> CliResult {
    let (m, mapper) = tile_setup(c)?;
    let Some(plan) = solve_points(c, &m, &mapper, false)? else {
        let mut t = Table::new(&["plan"]);
        t.row(vec!["infeasible".into()]);
        return Ok((json!({"feasible": false}), t, Outcome::Undetermined));
    };
    let mut t = Table::new(&["tile", "sigma_i", "theta_i"]);
    for (pt, th) in plan.points.iter().zip(&plan.theta) {
        t.row(vec![pt.tile.to_string(), fmt_rat(&pt.sigma), fmt_rat(th)]);
    }
    t.footer(format!("sigma = {}  tau = {}", fmt_rat(&plan.sigma), fmt_rat(&plan.tau)));
    let report = serde_json::to_value(plan.to_json_value().map_err(json_err)?).map_err(|e| e.to_string())?;
    Ok((report, t, Outcome::Decisive))
}

fn sublevel(a: &SublevelArgs) -> CliResult {
    let c = &a.common;
    let (m, mapper) = tile_setup(c)?;
    let plan = match &a.plan {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            let pj: PlanJson = serde_json::from_str(&text).map_err(|e| format!("{}: malformed JSON: {e}", path.display()))?;
            let sigma = rat_from_json(&pj.sigma, "$.sigma").map_err(|e| format!("{}: {e}", path.display()))?;
            let tiles = tiles_from_json(&pj).map_err(|e| format!("{}: {e}", path.display()))?;
            let points: Vec<_> = tiles.iter().map(|(t, s)| tile_point(&mapper.dec, t, s)).collect();
            let plan = solve_plan(&points, m.p(), m.q(), &SigmaChoice::Pinned(sigma)).map_err(err)?;
            Some(plan.ok_or_else(|| format!("{}: the plan's tiles cannot reach its σ", path.display()))?)
        }
        None => {
            let invariant = solve_points(c, &m, &mapper, true)?;
            if invariant.is_some() { invariant } else { solve_points(c, &m, &mapper, false)? }
        }
    };
    let tau = match (&c.tau, &plan) {
        (Some(t), _) => t.clone(),
        (None, Some(p)) => p.tau.clone(),
        (None, None) => return Err("no feasible tile plan; pass --tau".into()),
    };
    let weight = match &plan {
        Some(p) => constant_tile_weight(&mapper, p, &git_options(c)).map_err(err)?,
        None => None,
    };
    let w = weight.unwrap_or(1.0);
    let domain = BoxDomain::cube(m.d(), a.radius);
    let opts = SampleOptions { samples: c.samples, seed: c.seed, stratified: !a.plain, ..SampleOptions::default() };
    let mf = m.to_f64();
    let rep = survey(&mf, &|_: &[f64]| w, rat_to_f64(&tau), &domain, a.omegas, c.scale_max, &opts).map_err(err)?;
    let mut t = Table::new(&["omega", "log_scale_max", "estimate", "stderr"]);
    for (k, o) in rep.omegas.iter().enumerate() {
        let spread = o.log_scale.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        t.row(vec![k.to_string(), format!("{spread:.3}"), format!("{:.6}", o.estimate), format!("{:.3e}", o.stderr)]);
    }
    t.footer(format!("tau = {}  weight = {w:.6}{}  max = {:.6}", fmt_rat(&tau), if weight.is_none() { " (unit)" } else { "" }, rep.max_estimate));
    let report = serde_json::from_str(&rep.to_json().map_err(json_err)?).map_err(|e| e.to_string())?;
    Ok((report, t, Outcome::Decisive))
}

fn parse_point(s: &Option<String>, n: usize, name: &str) -> Result<Vec<Rat>, String> {
    match s {
        None => Ok(vec![Rat::from_integer(0.into()); n]),
        Some(s) => {
            let v = s.split(',').map(|x| parse_rat(x.trim()).map_err(|e| format!("--{name}: {e}"))).collect::<Result<Vec<_>, _>>()?;
            if v.len() != n {
                return Err(format!("--{name} has {} coordinates, expected {n}", v.len()));
            }
            Ok(v)
        }
    }
}

fn parse_set(s: &str) -> Result<Vec<Multiindex>, String> {
    s.split(';')
        .map(|a| a.split(',').map(|x| x.trim().parse::<u32>().map_err(|e| format!("--balanced: {e} in {a:?}"))).collect::<Result<Vec<_>, _>>().map(Multiindex::new))
        .collect()
}

fn radon(a: &RadonArgs) -> CliResult {
    let c = &a.common;
    if a.exponents {
        let (n, n1, k) = (a.n.unwrap_or(0), a.n1.unwrap_or(0), a.k.unwrap_or(0));
        let e = model_exponents(n, n1, k).map_err(err)?;
        let mut t = Table::new(&["n", "n1", "k", "r_g", "r_f", "1/p2", "1/p1"]);
        t.row(vec![n.to_string(), n1.to_string(), k.to_string(), fmt_rat(&e.r_g), fmt_rat(&e.r_f), fmt_rat(&e.inv_p2), fmt_rat(&e.inv_p1)]);
        t.footer(format!("{} {}", fmt_rat(&e.r_g), fmt_rat(&e.r_f)));
        let report = json!({"n": n, "n1": n1, "k": k, "r_g": rat_json(&e.r_g)?, "r_f": rat_json(&e.r_f)?, "inv_p2": rat_json(&e.inv_p2)?, "inv_p1": rat_json(&e.inv_p1)?});
        return Ok((report, t, Outcome::Decisive));
    }
    if let Some(set) = &a.balanced {
        let set = parse_set(set)?;
        let ty = if a.balanced_type == 1 { BalancedType::One } else { BalancedType::Two };
        let kd = match ty {
            BalancedType::One => a.k.ok_or("--k is required for type 1")?,
            BalancedType::Two => set.first().map_or(0, |m| m.len()),
        };
        let r = balanced_check(&set, ty, kd).map_err(err)?;
        let mut t = Table::new(&["type", "N", "sigma", "r", "target"]);
        t.row(vec![a.balanced_type.to_string(), r.n.to_string(), fmt_rat(&r.sigma), fmt_rat(&r.r), fmt_rat(&r.target)]);
        let report = json!({"type": a.balanced_type, "N": r.n, "sigma": rat_json(&r.sigma)?, "r": rat_json(&r.r)?, "target": rat_json(&r.target)?});
        return Ok((report, t, Outcome::Decisive));
    }
    let (path, text) = read_input(c)?;
    let prob = RadonProblem::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let x0 = parse_point(&a.x0, prob.n, "x0")?;
    let t0 = parse_point(&a.t0, prob.d(), "t0")?;
    let q = curvature_form(&prob, &x0, &t0).map_err(err)?;
    let opts = VerdictOptions { frames: c.restarts, seed: c.seed, git: git_options(c) };
    let v = semistab_core::radon::semistability_verdict(&q, &opts).map_err(err)?;
    let e = model_exponents(prob.n, prob.n1, prob.k).map_err(err)?;
    let (qa, qb, qc) = q.shape();
    let mut t = Table::new(&["shape", "verdict", "certificate", "r_g", "r_f"]);
    let mut verdict = v.to_json_value().map_err(json_err)?;
    t.row(vec![format!("{qa}x{qb}x{qc}"), v.state.as_str().into(), verdict["certificate"]["kind"].as_str().unwrap_or("").into(), fmt_rat(&e.r_g), fmt_rat(&e.r_f)]);
    verdict["form"] = serde_json::to_value(q.to_json_value().map_err(json_err)?).map_err(|e| e.to_string())?;
    verdict["exponents"] = json!({"r_g": rat_json(&e.r_g)?, "r_f": rat_json(&e.r_f)?});
    let outcome = if v.state == VerdictState::Undetermined { Outcome::Undetermined } else { Outcome::Decisive };
    Ok((verdict, t, outcome))
}
