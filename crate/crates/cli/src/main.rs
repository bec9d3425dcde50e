//! `setmotion`: command-line front end.
//!
//! Exit codes: 0 ok, 2 configuration error, 3 solver error, 4 a validation
//! check found violations.

mod formats;
mod scenario;
mod svg;

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use setmotion_core::adjoint::{check_free_arc_condition, check_junctions, check_max_principle, Weights};
use setmotion_core::corner::{corner_interface_with, ode1_residuals, CornerOptions};
use setmotion_core::dido::{eradication_verdict, DidoSolver};
use setmotion_core::evolution::{admissibility_check, triangle_strategy, wedge_domain, wedge_strategy, Motion};
use setmotion_core::freearc::{free_arc_rates, symmetric_free_arc};
use setmotion_core::geometry::Domain;
use setmotion_core::mintime::{dido_flow_with, levelset_eradication, min_time_with, Slicing, TimeValue};

use formats::{boundary_json, corner_csv, corner_diagnostics, motion_jsonl, parse_domain, read_motion_jsonl};
use scenario::{Checks, OutputSpec, Scenario, Strategy, Task, WeightsSpec};

#[derive(Debug)]
enum Failure {
    Config(String),
    Solver(String),
    Violations(Value),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Violations(_) => 4,
        }
    }
}

fn config<E: ToString>(e: E) -> Failure {
    Failure::Config(e.to_string())
}

fn solver_err<E: ToString>(context: &'static str) -> impl Fn(E) -> Failure {
    move |e| Failure::Solver(format!("{context}: {}", e.to_string()))
}

#[derive(Parser)]
#[command(name = "setmotion", version, about = "Optimal motion of a contaminated set inside a planar domain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Write artifacts into this directory instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write every n-th frame as an 800×800 SVG (needs --out).
    #[arg(long)]
    svg_every: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Dido cut of a given area fraction: {a, g, cut}.
    Dido {
        /// Inline JSON or a JSON/TOML file.
        #[arg(long)]
        domain: String,
        #[arg(long)]
        area_fraction: f64,
    },
    /// Eradication verdict from κ(V) and K(V).
    Feasibility {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        effort: f64,
    },
    /// Minimum time between two area fractions.
    Mintime {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        effort: f64,
        #[arg(long, default_value_t = 1.0)]
        from: f64,
        #[arg(long, default_value_t = 0.0)]
        to: f64,
    },
    /// Dido flow from an area fraction down to zero (JSON-lines motion).
    Flow {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        effort: f64,
        #[arg(long, default_value_t = 1.0)]
        from: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Constant-rate sweep along parallel lines.
    Slice {
        #[arg(long)]
        domain: String,
        #[arg(long)]
        effort: f64,
        /// Sweep direction, radians.
        #[arg(long, default_value_t = 0.0)]
        angle: f64,
        #[arg(long)]
        b1: f64,
        #[arg(long, default_value_t = 200)]
        frames: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Explicit strategies: triangle, wedge, disc.
    Simulate {
        #[arg(long, value_enum)]
        scenario: Strategy,
        #[arg(long)]
        effort: f64,
        /// Leg length of the wedge.
        #[arg(long)]
        leg: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Maximally extended free arcs.
    Freearc(FreearcArgs),
    /// Free interface from a polygon corner (CSV + JSON diagnostics).
    Corner {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        effort: f64,
        #[arg(long)]
        xdagger: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks a JSON-lines motion.
    Validate(ValidateArgs),
    /// Runs a scenario file (JSON or TOML, "schema": 1).
    Run {
        scenario: PathBuf,
        /// Overrides output.dir of the scenario.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "mode")]
struct FreearcMode {
    /// Closed form of the symmetric arc.
    #[arg(long)]
    symmetric: bool,
    /// Endpoint rates of the non-symmetric construction.
    #[arg(long)]
    rates: bool,
}

#[derive(Args)]
struct FreearcArgs {
    #[command(flatten)]
    mode: FreearcMode,
    #[arg(long)]
    effort: f64,
    /// Radius of curvature of ∂V at the contact point (--symmetric).
    #[arg(long)]
    rho: Option<f64>,
    /// Span θ* of the controlled arc (--rates).
    #[arg(long)]
    theta: Option<f64>,
    /// Radius r* of the controlled arc (--rates).
    #[arg(long)]
    radius: Option<f64>,
    /// Curvature of ∂V at Q (--rates).
    #[arg(long)]
    omega: Option<f64>,
    /// Curvature of the free arc at P (--rates).
    #[arg(long)]
    omega_sharp: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    Admissibility,
    MaxPrinciple,
    Junctions,
    FreeArc,
    All,
}

#[derive(Args)]
struct ValidateArgs {
    /// JSON-lines frames as written by flow/simulate.
    #[arg(long)]
    motion: PathBuf,
    #[arg(long)]
    domain: String,
    #[arg(long)]
    effort: f64,
    #[arg(long, value_enum, default_value_t = CheckKind::All)]
    check: CheckKind,
    #[arg(long, requires = "kappa2", conflicts_with = "min_time")]
    kappa1: Option<f64>,
    #[arg(long, requires = "kappa1")]
    kappa2: Option<f64>,
    /// Weights (κ₁, κ₂) = (1, 0).
    #[arg(long)]
    min_time: bool,
    /// CSV `t,omega,omega_star` for the free-arc condition.
    #[arg(long)]
    samples: Option<PathBuf>,
    #[arg(long)]
    t1: Option<f64>,
    #[arg(long)]
    t2: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    tol_eff: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol_ang: f64,
}

// ---------------------------------------------------------------------------
// tasks

struct Artifacts {
    summary: Value,
    motion: Option<(Motion, Domain)>,
    csv: Option<String>,
}

impl Artifacts {
    fn summary(summary: Value) -> Self {
        Artifacts { summary, motion: None, csv: None }
    }
}

fn domain_of(spec: Option<&formats::DomainSpec>) -> Result<Domain, Failure> {
    spec.ok_or_else(|| config("domain: required by this task"))?.to_domain().map_err(config)
}

fn positive(name: &str, v: f64) -> Result<f64, Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(config(format!("{name}: must be positive, got {v}")))
    }
}

fn fraction(name: &str, v: f64) -> Result<f64, Failure> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(config(format!("{name}: must lie in [0, 1], got {v}")))
    }
}

fn run_task(task: &Task, domain: Option<&formats::DomainSpec>, m: f64) -> Result<Artifacts, Failure> {
    positive("effort", m)?;
    match task {
        Task::Dido { area_fraction } => {
            let d = domain_of(domain)?;
            let solver = DidoSolver::new(&d).map_err(solver_err("dido"))?;
            let a = fraction("area_fraction", *area_fraction)? * solver.total_area();
            let cut = solver.cut(a).map_err(solver_err("dido"))?;
            Ok(Artifacts::summary(json!({
                "a": a,
                "g": cut.length,
                "family": format!("{:?}", cut.family),
                "complement": cut.complement,
                "cut": boundary_json(&cut.cut),
            })))
        }
        Task::Feasibility => {
            let d = domain_of(domain)?;
            let r = eradication_verdict(&d, m).map_err(solver_err("feasibility"))?;
            Ok(Artifacts::summary(json!({
                "effort": m,
                "kappa": r.kappa,
                "k_upper": r.k_upper,
                "verdict": r.verdict.to_string(),
                "margin": r.margin,
            })))
        }
        Task::Mintime { from, to } => {
            let d = domain_of(domain)?;
            let solver = DidoSolver::new(&d).map_err(solver_err("mintime"))?;
            let total = solver.total_area();
            let (a0, a1) = (fraction("from", *from)? * total, fraction("to", *to)? * total);
            let r = min_time_with(&solver, m, a0, a1).map_err(solver_err("mintime"))?;
            let t = match r.value {
                TimeValue::Finite(t) => json!(t),
                TimeValue::Infinite => Value::Null,
            };
            Ok(Artifacts::summary(json!({
                "effort": m,
                "a_from": a0,
                "a_to": a1,
                "finite": matches!(r.value, TimeValue::Finite(_)),
                "T": t,
                "g_max": r.g_max,
                "a_at_g_max": r.a_at_g_max,
                "quadrature_error": r.quadrature_error,
                "samples": r.samples.iter().map(|(a, v)| json!([a, if v.is_finite() { json!(v) } else { Value::Null }])).collect::<Vec<_>>(),
            })))
        }
        Task::Flow { from } => {
            let d = domain_of(domain)?;
            let solver = DidoSolver::new(&d).map_err(solver_err("flow"))?;
            let a0 = fraction("from", *from)? * solver.total_area();
            let motion = dido_flow_with(&solver, m, a0).map_err(solver_err("flow"))?;
            let summary = json!({ "effort": m, "a_from": a0, "T": motion.final_time(), "frames": motion.frames.len() });
            Ok(Artifacts { summary, motion: Some((motion, d)), csv: None })
        }
        Task::Slice { angle, b1, frames } => {
            let d = domain_of(domain)?;
            positive("b1", *b1)?;
            let motion = levelset_eradication(&d, Slicing::Directional { angle: *angle }, m, *b1, *frames)
                .map_err(solver_err("slice"))?;
            let summary = json!({ "effort": m, "b1": b1, "T": motion.final_time(), "frames": motion.frames.len() });
            Ok(Artifacts { summary, motion: Some((motion, d)), csv: None })
        }
        Task::Simulate { strategy, leg } => simulate(*strategy, m, *leg),
        Task::Freearc { rho } => {
            let s = symmetric_free_arc(m, positive("rho", *rho)?).map_err(solver_err("freearc"))?;
            Ok(Artifacts::summary(json!({
                "effort": s.m,
                "rho": s.rho,
                "ell": s.ell,
                "h": s.h,
                "meq_residual": s.meq_residual,
                "eleq_residual": s.eleq_residual,
            })))
        }
        Task::Corner { beta, c, x_dagger } => {
            let mut opts = CornerOptions::default();
            if let Some(x) = x_dagger {
                opts.x_dagger = positive("x_dagger", *x)?;
            }
            let ci = corner_interface_with(*beta, *c, m, &opts).map_err(solver_err("corner"))?;
            let res = ode1_residuals(&ci.state, &ci.params).map_err(solver_err("corner"))?;
            let worst = res.iter().fold(0.0f64, |a, r| a.max(*r));
            Ok(Artifacts { summary: corner_diagnostics(&ci, worst), motion: None, csv: Some(corner_csv(&ci.state)) })
        }
    }
}

fn simulate(strategy: Strategy, m: f64, leg: Option<f64>) -> Result<Artifacts, Failure> {
    let (motion, domain, summary) = match strategy {
        Strategy::Triangle => {
            let r = triangle_strategy(m).map_err(solver_err("triangle"))?;
            let s = json!({
                "strategy": "triangle",
                "effort": m,
                "T": r.t_total,
                "t_star": r.t_star,
                "r_star": r.r_star,
                "lambda": r.lambda,
                "stage2_rk4": r.stage2_rk4,
                "stage2_closed": r.stage2_closed,
            });
            (r.motion, Domain::unit_triangle(), s)
        }
        Strategy::Wedge => {
            let k = positive("leg", leg.unwrap_or(1.0))?;
            let r = wedge_strategy(k, m).map_err(solver_err("wedge"))?;
            let s = json!({
                "strategy": "wedge",
                "effort": m,
                "leg": k,
                "T": r.t_end,
                "t_star": r.t_switch,
                "s_star": r.s_switch,
                "switch_angle": r.switch_angle,
            });
            (r.motion, wedge_domain(k), s)
        }
        Strategy::Disc => {
            let d = Domain::Disc { radius: 1.0 };
            let solver = DidoSolver::new(&d).map_err(solver_err("disc"))?;
            let motion = dido_flow_with(&solver, m, PI).map_err(solver_err("disc"))?;
            let s = json!({ "strategy": "disc", "effort": m, "T": motion.final_time() });
            (motion, d, s)
        }
    };
    let mut summary = summary;
    summary["frames"] = json!(motion.frames.len());
    Ok(Artifacts { summary, motion: Some((motion, domain)), csv: None })
}

// ---------------------------------------------------------------------------
// checks

fn motion_checks(
    motion: &Motion,
    domain: &Domain,
    checks: Checks,
    weights: Option<Weights>,
) -> Result<(Value, bool), Failure> {
    let mut out = serde_json::Map::new();
    let mut ok = true;
    let (res, at) = motion.area_identity_residual();
    out.insert("area_identity".into(), json!({ "worst": res, "pair": at }));
    if checks.admissibility {
        let r = admissibility_check(motion, domain, motion.effort, 1e-3);
        ok &= r.admissible();
        out.insert("admissibility".into(), admissibility_json(&r));
    }
    if checks.junctions {
        let r = check_junctions(motion, domain, 1e-6);
        ok &= r.passed();
        out.insert("junctions".into(), junctions_json(&r));
    }
    if checks.max_principle {
        let w = weights.ok_or_else(|| config("weights: required by the max-principle check"))?;
        let r = check_max_principle(motion, domain, w, 1e-6).map_err(solver_err("max-principle"))?;
        ok &= r.passed();
        out.insert("max_principle".into(), max_principle_json(&r));
    }
    Ok((Value::Object(out), ok))
}

fn admissibility_json(r: &setmotion_core::evolution::AdmissibilityReport) -> Value {
    json!({
        "passed": r.admissible(),
        "pairs": r.pairs,
        "containment_violations": r.containment_violations,
        "effort_violations": r.effort_violations,
        "worst_containment": r.worst_containment,
        "worst_effort_ratio": r.worst_effort_ratio,
        "worst_containment_pair": r.worst_containment_pair,
        "worst_effort_pair": r.worst_effort_pair,
    })
}

fn junctions_json(r: &setmotion_core::adjoint::JunctionReport) -> Value {
    json!({
        "passed": r.passed(),
        "frames": r.frames,
        "interior_checked": r.interior_checked,
        "boundary_checked": r.boundary_checked,
        "tangency_violations": r.tangency_violations,
        "boundary_violations": r.boundary_violations,
        "worst_tangency": r.worst_tangency,
        "worst_boundary": r.worst_boundary,
    })
}

fn max_principle_json(r: &setmotion_core::adjoint::MaxPrincipleReport) -> Value {
    json!({
        "passed": r.passed(),
        "windows": r.windows,
        "trajectories": r.trajectories,
        "points_checked": r.points_checked,
        "max1_violations": r.max1_violations,
        "worst_max1_gap": r.worst_max1_gap,
        "sameom_violations": r.sameom_violations,
        "worst_sameom": r.worst_sameom,
        "worst_duality": r.worst_duality,
        "notes": r.notes,
    })
}

fn validate(a: &ValidateArgs) -> Result<Value, Failure> {
    let m = positive("effort", a.effort)?;
    let domain = parse_domain(&a.domain).map_err(config)?;
    let text = fs::read_to_string(&a.motion).map_err(|e| config(format!("{}: {e}", a.motion.display())))?;
    let motion = read_motion_jsonl(&text, m).map_err(|e| config(format!("{}: {e}", a.motion.display())))?;
    let wants = |k: CheckKind| a.check == k || a.check == CheckKind::All;
    let weights = match (a.kappa1, a.kappa2, a.min_time) {
        (Some(k1), Some(k2), _) => {
            if !(k1 >= 0.0 && k2 >= 0.0 && k1 + k2 > 0.0) {
                return Err(config("weights: need kappa1, kappa2 >= 0 with a positive sum"));
            }
            Weights::new(k1, k2)
        }
        _ => Weights::min_time(),
    };
    let mut out = serde_json::Map::new();
    let mut ok = true;
    if wants(CheckKind::Admissibility) {
        let r = admissibility_check(&motion, &domain, m, a.tol_eff);
        ok &= r.admissible();
        out.insert("admissibility".into(), admissibility_json(&r));
    }
    if wants(CheckKind::Junctions) {
        let r = check_junctions(&motion, &domain, a.tol_ang);
        ok &= r.passed();
        out.insert("junctions".into(), junctions_json(&r));
    }
    if wants(CheckKind::MaxPrinciple) {
        let r = check_max_principle(&motion, &domain, weights, 1e-6).map_err(solver_err("max-principle"))?;
        ok &= r.passed();
        out.insert("max_principle".into(), max_principle_json(&r));
    }
    // the free-arc condition needs curvature samples; under `all` it runs
    // only when they are given
    if a.check == CheckKind::FreeArc || (a.check == CheckKind::All && a.samples.is_some()) {
        let path = a.samples.as_ref().ok_or_else(|| config("--samples is required by the free-arc check"))?;
        let (t1, t2) = match (a.t1, a.t2) {
            (Some(t1), Some(t2)) => (t1, t2),
            _ => return Err(config("--t1 and --t2 are required by the free-arc check")),
        };
        let (times, omega, star) = read_samples(path)?;
        let r = check_free_arc_condition(&times, &omega, &star, t1, t2).map_err(config)?;
        let pass = r <= 1e-6;
        ok &= pass;
        out.insert("free_arc".into(), json!({ "passed": pass, "residual": r, "t1": t1, "t2": t2 }));
    }
    out.insert("passed".into(), json!(ok));
    let v = Value::Object(out);
    if ok {
        Ok(v)
    } else {
        Err(Failure::Violations(v))
    }
}

type Samples = (Vec<f64>, Vec<f64>, Vec<f64>);

fn read_samples(path: &Path) -> Result<Samples, Failure> {
    let text = fs::read_to_string(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
    let (mut t, mut w, mut s) = (Vec::new(), Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('t') {
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| config(format!("{}: line {}: {e}", path.display(), i + 1)))?;
        if v.len() != 3 {
            return Err(config(format!("{}: line {}: expected t,omega,omega_star", path.display(), i + 1)));
        }
        t.push(v[0]);
        w.push(v[1]);
        s.push(v[2]);
    }
    Ok((t, w, s))
}

// ---------------------------------------------------------------------------
// output

// A closed pipe (`| head`) ends output quietly instead of panicking.
fn say(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: stdout: {e}");
        std::process::exit(2);
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json serializes")
}

fn write(dir: &Path, name: &str, content: &str) -> Result<(), Failure> {
    fs::write(dir.join(name), content).map_err(|e| config(format!("{}: {e}", dir.join(name).display())))
}

fn emit(art: &Artifacts, out: &OutputSpec) -> Result<(), Failure> {
    let Some(dir) = &out.dir else {
        if let Some((motion, _)) = &art.motion {
            if out.jsonl {
                say(&motion_jsonl(motion));
            }
        }
        if let Some(csv) = &art.csv {
            if out.csv {
                say(csv);
                say("\n");
            }
        }
        say(&(pretty(&art.summary) + "\n"));
        return Ok(());
    };
    let dir = Path::new(dir);
    fs::create_dir_all(dir).map_err(|e| config(format!("{}: {e}", dir.display())))?;
    write(dir, "summary.json", &(pretty(&art.summary) + "\n"))?;
    if let Some((motion, domain)) = &art.motion {
        if out.jsonl {
            write(dir, "motion.jsonl", &motion_jsonl(motion))?;
        }
        if out.svg {
            let n = motion.frames.len();
            for (i, f) in motion.frames.iter().enumerate() {
                if i % out.svg_every == 0 || i + 1 == n {
                    write(dir, &format!("frame_{i:05}.svg"), &svg::frame_svg(domain, f))?;
                }
            }
        }
    }
    if let (Some(csv), true) = (&art.csv, out.csv) {
        write(dir, "corner.csv", csv)?;
    }
    say(&(pretty(&art.summary) + "\n"));
    Ok(())
}

fn output_of(o: &OutArgs) -> Result<OutputSpec, Failure> {
    if o.svg_every.is_some() && o.out.is_none() {
        return Err(config("--svg-every needs --out"));
    }
    if o.svg_every == Some(0) {
        return Err(config("--svg-every must be at least 1"));
    }
    Ok(OutputSpec {
        dir: o.out.as_ref().map(|p| p.display().to_string()),
        svg: o.svg_every.is_some(),
        svg_every: o.svg_every.unwrap_or(1),
        ..OutputSpec::default()
    })
}

fn run_scenario(path: &Path, out_override: Option<&Path>) -> Result<(), Failure> {
    let sc = Scenario::load(path).map_err(config)?;
    let mut art = run_task(&sc.task, sc.domain.as_ref(), sc.effort)?;
    let mut out = sc.output.clone();
    if let Some(dir) = out_override {
        out.dir = Some(dir.display().to_string());
    }
    let mut ok = true;
    if let Some((motion, domain)) = &art.motion {
        let w = sc.weights.map(|WeightsSpec { kappa1, kappa2 }| Weights::new(kappa1, kappa2));
        let (checks, pass) = motion_checks(motion, domain, sc.checks, w)?;
        art.summary["residuals"] = checks;
        ok = pass;
    }
    let summary = json!({ "name": sc.name, "schema": sc.schema, "result": art.summary });
    art.summary = summary;
    emit(&art, &out)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Violations(json!({ "name": sc.name, "passed": false })))
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    let stdout = OutputSpec::default();
    match cmd {
        Command::Dido { domain, area_fraction } => {
            let spec = formats::DomainSpec::from_domain(&parse_domain(&domain).map_err(config)?);
            emit(&run_task(&Task::Dido { area_fraction }, Some(&spec), 1.0)?, &stdout)
        }
        Command::Feasibility { domain, effort } => {
            let spec = formats::DomainSpec::from_domain(&parse_domain(&domain).map_err(config)?);
            emit(&run_task(&Task::Feasibility, Some(&spec), effort)?, &stdout)
        }
        Command::Mintime { domain, effort, from, to } => {
            let spec = formats::DomainSpec::from_domain(&parse_domain(&domain).map_err(config)?);
            emit(&run_task(&Task::Mintime { from, to }, Some(&spec), effort)?, &stdout)
        }
        Command::Flow { domain, effort, from, out } => {
            let spec = formats::DomainSpec::from_domain(&parse_domain(&domain).map_err(config)?);
            emit(&run_task(&Task::Flow { from }, Some(&spec), effort)?, &output_of(&out)?)
        }
        Command::Slice { domain, effort, angle, b1, frames, out } => {
            let spec = formats::DomainSpec::from_domain(&parse_domain(&domain).map_err(config)?);
            emit(&run_task(&Task::Slice { angle, b1, frames }, Some(&spec), effort)?, &output_of(&out)?)
        }
        Command::Simulate { scenario, effort, leg, out } => {
            emit(&run_task(&Task::Simulate { strategy: scenario, leg }, None, effort)?, &output_of(&out)?)
        }
        Command::Freearc(a) => freearc(&a),
        Command::Corner { beta, c, effort, xdagger, out } => {
            let art = run_task(&Task::Corner { beta, c, x_dagger: xdagger }, None, effort)?;
            emit(&art, &OutputSpec { dir: out.map(|p| p.display().to_string()), ..OutputSpec::default() })
        }
        Command::Validate(a) => match validate(&a) {
            Ok(v) => {
                say(&(pretty(&v) + "\n"));
                Ok(())
            }
            Err(Failure::Violations(v)) => {
                say(&(pretty(&v) + "\n"));
                Err(Failure::Violations(v))
            }
            Err(e) => Err(e),
        },
        Command::Run { scenario, out } => run_scenario(&scenario, out.as_deref()),
    }
}

fn freearc(a: &FreearcArgs) -> Result<(), Failure> {
    let m = positive("effort", a.effort)?;
    if a.mode.symmetric {
        let rho = a.rho.ok_or_else(|| config("--rho is required with --symmetric"))?;
        return emit(&run_task(&Task::Freearc { rho }, None, m)?, &OutputSpec::default());
    }
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| config(format!("--{name} is required with --rates")));
    let r = free_arc_rates(
        need(a.theta, "theta")?,
        need(a.radius, "radius")?,
        need(a.omega, "omega")?,
        need(a.omega_sharp, "omega-sharp")?,
        m,
    )
    .map_err(solver_err("freearc"))?;
    let v = json!({
        "theta_star": r.theta_star,
        "r_star": r.r_star,
        "omega": r.omega,
        "omega_sharp": r.omega_sharp,
        "effort": r.m,
        "qdot_mag": r.qdot_mag,
        "dr_dzeta": r.dr_dzeta,
        "ddelta_dzeta": r.ddelta_dzeta,
        "ddelta_dxi": r.ddelta_dxi,
        "dr_dxi": r.dr_dxi,
        "dxi_dt": r.dxi_dt,
    });
    say(&(pretty(&v) + "\n"));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                Failure::Config(msg) => eprintln!("error: {msg}"),
                Failure::Solver(msg) => eprintln!("solver error: {msg}"),
                Failure::Violations(_) => eprintln!("validation found violations"),
            }
            ExitCode::from(e.code())
        }
    }
}
