use std::f64::consts::LN_2;
use std::fmt::Write as _;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};

use stabmagic::anneal::{anneal_minimize, ising_initial_guess, AnnealConfig};
use stabmagic::bmsa::{a2_lin_exact, bmsa, bmsa_branch_bound, bmsa_bruteforce, Backend, BbOptions};
use stabmagic::measures::{a2_conv, nullity, sre, stabilizer_fidelity, MeasureResult};
use stabmagic::simkit::{
    doped_circuit, ising_ground_state, product_theta_state, simulate, Boundary, CircuitIR, CircuitOp,
};
use stabmagic::{CliffordTableau, MagicError, Statevector};

mod check;
mod source;

#[derive(Parser)]
#[command(name = "stabmagic", version, about = "Magic monotones of pure qubit states")]
struct Cli {
    /// Seed for every random generator.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = LogBase::E)]
    log_base: LogBase,
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    out: OutFormat,
    /// Include wall-clock times (output is then not byte-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
enum LogBase {
    #[value(name = "e")]
    #[serde(rename = "e")]
    E,
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
}

impl LogBase {
    fn convert(self, nats: f64) -> f64 {
        match self {
            LogBase::E => nats,
            LogBase::Two => nats / LN_2,
        }
    }

    fn label(self) -> &'static str {
        match self {
            LogBase::E => "e",
            LogBase::Two => "2",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    /// Branch and bound where supported, exhaustive search otherwise.
    Auto,
    Brute,
    Bb,
    Anneal,
}

/// Rényi order; accepts `inf`.
#[derive(Clone, Copy, Debug)]
struct Alpha(f64);

impl FromStr for Alpha {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" => f64::INFINITY,
            t => t.parse::<f64>().map_err(|e| format!("{s:?}: {e}"))?,
        };
        if v.is_nan() || v < 0.0 {
            return Err(format!("alpha must be >= 0, got {s}"));
        }
        Ok(Alpha(v))
    }
}

impl Serialize for Alpha {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate measures on one state.
    Measure(MeasureArgs),
    /// BMSA of a product state over a range of sizes.
    ScanProduct(ScanProductArgs),
    /// BMSA of transverse-field Ising ground states over a field grid.
    ScanIsing(ScanIsingArgs),
    /// Randomized check of the inequalities between the measures.
    CheckInequalities(CheckArgs),
    /// Sparse stabilizer-basis simulation of a circuit.
    Sim(SimArgs),
}

#[derive(Args, Serialize)]
struct MeasureArgs {
    /// Named generator (w:N, chi, theta:θ:N, ising:N:h:bc, gue:N:t, doped:N:NT,
    /// psieps:N:ε, stab-random:N, haar:N, ghz:N, zero:N) or a state file.
    #[arg(long)]
    state: String,
    /// Stabilizer Rényi entropy of this order (repeatable).
    #[arg(long = "sre", value_name = "ORDER")]
    sre: Vec<f64>,
    /// Linear stabilizer entropy of this order (repeatable).
    #[arg(long = "sre-lin", value_name = "ORDER")]
    sre_lin: Vec<f64>,
    /// Exact BMSA of this order (repeatable); uses --method unless it is anneal.
    #[arg(long = "bmsa-exact", value_name = "ALPHA")]
    bmsa_exact: Vec<Alpha>,
    /// BMSA at --alpha with --method.
    #[arg(long)]
    bmsa: bool,
    #[arg(long, default_value = "1")]
    alpha: Alpha,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    method: Method,
    /// Annealing restarts.
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long)]
    dmin: bool,
    #[arg(long)]
    fidelity: bool,
    #[arg(long)]
    nullity: bool,
    #[arg(long)]
    a2_lin: bool,
    #[arg(long)]
    a2_conv: bool,
    /// Participation entropy at --alpha in the computational basis.
    #[arg(long)]
    participation: bool,
}

#[derive(Args, Serialize)]
struct ScanProductArgs {
    /// Angle of (|0> + e^{iθ}|1>)/√2, e.g. pi/8.
    #[arg(long, default_value = "pi/8")]
    theta: String,
    #[arg(long, default_value_t = 2)]
    n_min: usize,
    #[arg(long, default_value_t = 6)]
    n_max: usize,
    #[arg(long, default_value = "1")]
    alpha: Alpha,
    #[arg(long, value_enum, default_value_t = Method::Bb)]
    method: Method,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
}

#[derive(Args, Serialize)]
struct ScanIsingArgs {
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// open or periodic
    #[arg(long, default_value = "periodic")]
    bc: String,
    #[arg(long, default_value_t = 0.7)]
    h_min: f64,
    #[arg(long, default_value_t = 1.3)]
    h_max: f64,
    #[arg(long, default_value_t = 0.1)]
    h_step: f64,
    #[arg(long, default_value = "1")]
    alpha: Alpha,
    #[arg(long, value_enum, default_value_t = Method::Bb)]
    method: Method,
    /// Also run annealing and report its deviation from the exact value.
    #[arg(long)]
    compare: bool,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
}

#[derive(Args, Serialize)]
struct CheckArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Args, Serialize)]
struct SimArgs {
    /// JSON-lines circuit file, or doped:N:NT for a random doped circuit.
    #[arg(long)]
    circuit: String,
    /// Qubit count, required for circuit files.
    #[arg(long)]
    n: Option<usize>,
    /// Drop coefficients with |c_i| below this after each rotation.
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Skip the dense comparison.
    #[arg(long)]
    no_dense: bool,
}

/// Largest `n` compared against dense simulation.
const SIM_DENSE_MAX: usize = 20;

enum Failure {
    Magic(MagicError),
    Violation(String),
}

impl From<MagicError> for Failure {
    fn from(e: MagicError) -> Self {
        Failure::Magic(e)
    }
}

type CmdResult = Result<String, Failure>;

struct Ctx {
    seed: u64,
    base: LogBase,
    out: OutFormat,
    timing: bool,
}

impl Ctx {
    fn record(&self, command: &str, config: Value, results: Value, start: Instant) -> String {
        let mut rec = json!({
            "command": command,
            "version": concat!("stabmagic ", env!("CARGO_PKG_VERSION")),
            "seed": self.seed,
            "log_base": self.base.label(),
            "config": config,
            "results": results,
        });
        if self.timing {
            rec["wall_time_s"] = json!(start.elapsed().as_secs_f64());
        }
        serde_json::to_string_pretty(&rec).expect("json value") + "\n"
    }

    fn csv_header(&self, command: &str, columns: &str) -> String {
        format!("# stabmagic {command} v1 log_base={}\n{columns}\n", self.base.label())
    }
}

fn entropic(ctx: &Ctx, m: &MeasureResult) -> Value {
    let mut v = m.to_json();
    v["value"] = json!(ctx.base.convert(m.value));
    v
}

fn bmsa_with(
    psi: &Statevector,
    alpha: f64,
    method: Method,
    restarts: usize,
    seed: u64,
) -> Result<MeasureResult, MagicError> {
    let params = json!({"alpha": Alpha(alpha), "method": method});
    let res = match method {
        Method::Auto => bmsa(psi, alpha)?,
        Method::Brute => bmsa_bruteforce(psi, alpha, Backend::Overlap)?,
        Method::Bb => bmsa_branch_bound(psi, alpha, BbOptions::default())?,
        Method::Anneal => {
            let cfg = AnnealConfig {
                alpha,
                seed,
                restarts,
                ..Default::default()
            };
            let r = anneal_minimize(psi, &cfg)?;
            let cert = json!({"tableau": r.best_tableau.to_json(), "accepted_moves": r.accepted_moves});
            return Ok(MeasureResult::new("bmsa", params, r.best_value).with_certificate(cert));
        }
    };
    let mut cert = res.to_json(false);
    for k in ["alpha", "value_nats", "value_bits"] {
        cert.as_object_mut().expect("object").remove(k);
    }
    Ok(MeasureResult::new("bmsa", params, res.value).with_certificate(cert))
}

fn cmd_measure(ctx: &Ctx, a: &MeasureArgs) -> CmdResult {
    let start = Instant::now();
    let psi = source::load_state(&a.state, ctx.seed)?;
    let any = !a.sre.is_empty()
        || !a.sre_lin.is_empty()
        || !a.bmsa_exact.is_empty()
        || a.bmsa
        || a.dmin
        || a.fidelity
        || a.nullity
        || a.a2_lin
        || a.a2_conv
        || a.participation;
    let sre_orders = if any { a.sre.clone() } else { vec![2.0] };
    let mut rows: Vec<Value> = Vec::new();
    for &q in &sre_orders {
        rows.push(entropic(
            ctx,
            &MeasureResult::new("sre", json!({"order": q}), sre(&psi, q, false)?),
        ));
    }
    for &q in &a.sre_lin {
        // linear entropy is not a logarithm; no base conversion
        let v = sre(&psi, q, true)?;
        rows.push(json!({"measure": "sre_linear", "params": {"order": q}, "value": v}));
    }
    if a.dmin || !any {
        let (f, key, idx) = stabilizer_fidelity(&psi)?;
        let m = MeasureResult::new("dmin", json!({}), (-f.ln()).max(0.0))
            .with_certificate(json!({"key": key.to_json(), "element": idx}));
        rows.push(entropic(ctx, &m));
    }
    if a.fidelity {
        let (f, key, idx) = stabilizer_fidelity(&psi)?;
        rows.push(json!({"measure": "stabilizer_fidelity", "params": {}, "value": f,
            "certificate": {"key": key.to_json(), "element": idx}}));
    }
    if a.bmsa || !any {
        rows.push(entropic(
            ctx,
            &bmsa_with(&psi, a.alpha.0, a.method, a.restarts, ctx.seed)?,
        ));
    }
    for &Alpha(alpha) in &a.bmsa_exact {
        let method = if a.method == Method::Anneal {
            Method::Auto
        } else {
            a.method
        };
        let mut m = bmsa_with(&psi, alpha, method, a.restarts, ctx.seed)?;
        m.measure = "bmsa_exact".into();
        rows.push(entropic(ctx, &m));
    }
    if a.nullity {
        let nu = nullity(&psi, 1e-9)?;
        rows.push(json!({"measure": "nullity", "params": {"tol": 1e-9}, "value": nu}));
    }
    if a.a2_lin {
        let (v, key) = a2_lin_exact(&psi)?;
        rows.push(json!({"measure": "a2_linear", "params": {}, "value": v, "certificate": {"key": key.to_json()}}));
    }
    if a.a2_conv {
        let (v, key) = a2_conv(&psi)?;
        let m = MeasureResult::new("a2_conv", json!({}), v).with_certificate(json!({"key": key.to_json()}));
        rows.push(entropic(ctx, &m));
    }
    if a.participation {
        let v = psi.participation_entropy(a.alpha.0);
        rows.push(entropic(
            ctx,
            &MeasureResult::new("participation", json!({"alpha": a.alpha}), v),
        ));
    }
    match ctx.out {
        OutFormat::Json => {
            let results = json!({"state": a.state, "n": psi.num_qubits(), "measures": rows});
            Ok(ctx.record("measure", serde_json::to_value(a).expect("args"), results, start))
        }
        OutFormat::Csv => {
            let mut s = ctx.csv_header("measure", "measure,params,value,value_nats,value_bits");
            for r in &rows {
                let params = r["params"]
                    .as_object()
                    .map(|o| {
                        o.iter()
                            .map(|(k, v)| format!("{k}={}", v.as_str().map_or(v.to_string(), String::from)))
                            .collect::<Vec<_>>()
                            .join(";")
                    })
                    .unwrap_or_default();
                let opt = |k: &str| {
                    r.get(k)
                        .filter(|v| !v.is_null())
                        .map_or(String::new(), |v| v.to_string())
                };
                writeln!(
                    s,
                    "{},{},{},{},{}",
                    r["measure"].as_str().unwrap_or(""),
                    params,
                    r["value"],
                    opt("value_nats"),
                    opt("value_bits")
                )
                .unwrap();
            }
            Ok(s)
        }
    }
}

struct ScanRow {
    x: f64,
    nats: f64,
    method: &'static str,
    runtime: f64,
    anneal: Option<f64>,
}

fn method_tag(m: Method) -> &'static str {
    match m {
        Method::Auto => "auto",
        Method::Brute => "brute",
        Method::Bb => "bb",
        Method::Anneal => "anneal",
    }
}

/// Least-squares slope, intercept and R².
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - my - slope * (x - mx)).powi(2))
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, my - slope * mx, r2)
}

fn cmd_scan_product(ctx: &Ctx, a: &ScanProductArgs) -> CmdResult {
    let start = Instant::now();
    if a.n_min == 0 || a.n_min > a.n_max {
        return Err(MagicError::Domain(format!("bad size range {}..{}", a.n_min, a.n_max)).into());
    }
    let theta = source::parse_angle(&a.theta)?;
    let mut rows = Vec::new();
    for n in a.n_min..=a.n_max {
        let t0 = Instant::now();
        let psi = product_theta_state(n, theta)?;
        let m = bmsa_with(&psi, a.alpha.0, a.method, a.restarts, ctx.seed)?;
        rows.push(ScanRow {
            x: n as f64,
            nats: m.value,
            method: method_tag(a.method),
            runtime: t0.elapsed().as_secs_f64(),
            anneal: None,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.x).collect();
    let ys: Vec<f64> = rows.iter().map(|r| ctx.base.convert(r.nats)).collect();
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    match ctx.out {
        OutFormat::Json => {
            let list: Vec<Value> = rows.iter().map(|r| scan_row_json(ctx, "n", r)).collect();
            let results =
                json!({"theta": theta, "rows": list, "fit": {"slope": slope, "intercept": intercept, "r2": r2}});
            Ok(ctx.record("scan-product", serde_json::to_value(a).expect("args"), results, start))
        }
        OutFormat::Csv => Ok(scan_csv(ctx, "scan-product", "n", &rows, false)),
    }
}

fn scan_row_json(ctx: &Ctx, xname: &str, r: &ScanRow) -> Value {
    let mut v = json!({xname: r.x, "value": ctx.base.convert(r.nats), "value_nats": r.nats,
        "value_bits": r.nats / LN_2, "method": r.method});
    if let Some(an) = r.anneal {
        v["anneal_nats"] = json!(an);
        v["abs_diff_nats"] = json!((an - r.nats).abs());
    }
    if ctx.timing {
        v["runtime_s"] = json!(r.runtime);
    }
    v
}

fn scan_csv(ctx: &Ctx, command: &str, xname: &str, rows: &[ScanRow], compare: bool) -> String {
    let mut cols = format!("{xname},value,value_nats,value_bits,method");
    if compare {
        cols.push_str(",anneal_nats,abs_diff_nats");
    }
    if ctx.timing {
        cols.push_str(",runtime_s");
    }
    let mut s = ctx.csv_header(command, &cols);
    for r in rows {
        write!(
            s,
            "{},{},{},{},{}",
            r.x,
            ctx.base.convert(r.nats),
            r.nats,
            r.nats / LN_2,
            r.method
        )
        .unwrap();
        if let Some(an) = r.anneal {
            write!(s, ",{},{}", an, (an - r.nats).abs()).unwrap();
        }
        if ctx.timing {
            write!(s, ",{}", r.runtime).unwrap();
        }
        s.push('\n');
    }
    s
}

fn ising_anneal(
    psi: &Statevector,
    guess: &CliffordTableau,
    alpha: f64,
    restarts: usize,
    seed: u64,
) -> Result<f64, MagicError> {
    let cfg = AnnealConfig {
        alpha,
        seed,
        restarts,
        initial_tableau: Some(guess.clone()),
        ..Default::default()
    };
    Ok(anneal_minimize(psi, &cfg)?.best_value)
}

fn cmd_scan_ising(ctx: &Ctx, a: &ScanIsingArgs) -> CmdResult {
    let start = Instant::now();
    let bc: Boundary = a.bc.parse()?;
    if a.h_step.is_nan() || a.h_step <= 0.0 || a.h_max < a.h_min {
        return Err(MagicError::Domain("need h_step > 0 and h_max >= h_min".into()).into());
    }
    let points = ((a.h_max - a.h_min) / a.h_step + 1e-9).floor() as usize + 1;
    let guess = ising_initial_guess(a.n)?;
    let mut rows = Vec::new();
    for i in 0..points {
        let h = ((a.h_min + i as f64 * a.h_step) * 1e9).round() / 1e9;
        let t0 = Instant::now();
        let psi = ising_ground_state(a.n, h, bc)?;
        let nats = match a.method {
            Method::Anneal => ising_anneal(&psi, &guess, a.alpha.0, a.restarts, ctx.seed)?,
            m => bmsa_with(&psi, a.alpha.0, m, a.restarts, ctx.seed)?.value,
        };
        let anneal = if a.compare && a.method != Method::Anneal {
            Some(ising_anneal(&psi, &guess, a.alpha.0, a.restarts, ctx.seed)?)
        } else {
            None
        };
        rows.push(ScanRow {
            x: h,
            nats,
            method: method_tag(a.method),
            runtime: t0.elapsed().as_secs_f64(),
            anneal,
        });
    }
    let peak = rows.iter().fold(&rows[0], |b, r| if r.nats > b.nats { r } else { b }).x;
    match ctx.out {
        OutFormat::Json => {
            let list: Vec<Value> = rows
                .iter()
                .map(|r| {
                    let mut v = scan_row_json(ctx, "h", r);
                    v["density"] = json!(ctx.base.convert(r.nats) / a.n as f64);
                    v
                })
                .collect();
            let max_diff = rows
                .iter()
                .filter_map(|r| r.anneal.map(|an| (an - r.nats).abs()))
                .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))));
            let results = json!({"rows": list, "peak_h": peak, "max_abs_diff_nats": max_diff});
            Ok(ctx.record("scan-ising", serde_json::to_value(a).expect("args"), results, start))
        }
        OutFormat::Csv => Ok(scan_csv(
            ctx,
            "scan-ising",
            "h",
            &rows,
            a.compare && a.method != Method::Anneal,
        )),
    }
}

fn cmd_check(ctx: &Ctx, a: &CheckArgs) -> CmdResult {
    let start = Instant::now();
    if a.n == 0 || a.n > 4 {
        return Err(MagicError::CapExceeded {
            what: "check-inequalities",
            n: a.n,
            cap: 4,
        }
        .into());
    }
    let report = check::run(a.n, a.trials, ctx.seed, a.inject_fault)?;
    let out = match ctx.out {
        OutFormat::Json => {
            let list: Vec<Value> = report
                .tallies
                .iter()
                .map(|(name, t)| {
                    json!({"inequality": name, "checks": t.checks, "violations": t.violations,
                        "worst_slack_nats": t.worst_slack, "worst_slack_bits": t.worst_slack / LN_2})
                })
                .collect();
            let results =
                json!({"tolerance": check::TOL, "inequalities": list, "total_violations": report.total_violations()});
            ctx.record(
                "check-inequalities",
                serde_json::to_value(a).expect("args"),
                results,
                start,
            )
        }
        OutFormat::Csv => {
            let mut s = ctx.csv_header(
                "check-inequalities",
                "inequality,checks,violations,worst_slack_nats,worst_slack_bits",
            );
            for (name, t) in &report.tallies {
                writeln!(
                    s,
                    "{name},{},{},{},{}",
                    t.checks,
                    t.violations,
                    t.worst_slack,
                    t.worst_slack / LN_2
                )
                .unwrap();
            }
            s
        }
    };
    if report.total_violations() > 0 {
        print!("{out}");
        return Err(Failure::Violation(format!(
            "{} inequality violations",
            report.total_violations()
        )));
    }
    Ok(out)
}

fn load_circuit(a: &SimArgs, seed: u64) -> Result<CircuitIR, MagicError> {
    if let Some(rest) = a.circuit.strip_prefix("doped:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| MagicError::Domain(format!("bad circuit spec {:?}", a.circuit)))
        };
        let [n, nt] = parts.as_slice() else {
            return Err(MagicError::Domain(format!("doped takes N:NT, got {:?}", a.circuit)));
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        return doped_circuit(parse(n)?, parse(nt)?, &mut rng);
    }
    let n =
        a.n.ok_or_else(|| MagicError::Domain("--n is required for circuit files".into()))?;
    let text = std::fs::read_to_string(&a.circuit).map_err(|e| MagicError::Io(format!("{}: {e}", a.circuit)))?;
    CircuitIR::from_jsonl(n, &text)
}

fn cmd_sim(ctx: &Ctx, a: &SimArgs) -> CmdResult {
    let start = Instant::now();
    if a.eps.is_nan() || a.eps < 0.0 {
        return Err(MagicError::Domain(format!("eps must be >= 0, got {}", a.eps)).into());
    }
    let circ = load_circuit(a, ctx.seed)?;
    let dense = !a.no_dense && circ.num_qubits() <= SIM_DENSE_MAX;
    let (_, report) = simulate(&circ, a.eps, dense)?;
    match ctx.out {
        OutFormat::Json => {
            let mut results = serde_json::to_value(&report).expect("report");
            results["final_entropy"] = json!(ctx.base.convert(report.final_entropy));
            results["final_entropy_nats"] = json!(report.final_entropy);
            results["ops"] = json!(circ.ops().len());
            results["rotations"] = json!(circ.rotation_count());
            Ok(ctx.record("sim", serde_json::to_value(a).expect("args"), results, start))
        }
        OutFormat::Csv => {
            let mut s = ctx.csv_header("sim", "step,op,term_count");
            for (i, (op, count)) in circ.ops().iter().zip(&report.term_counts).enumerate() {
                let name = match op {
                    CircuitOp::Clifford(g) => g.name(),
                    CircuitOp::Rotation { .. } => "ROT",
                };
                writeln!(s, "{i},{name},{count}").unwrap();
            }
            Ok(s)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        seed: cli.seed,
        base: cli.log_base,
        out: cli.out,
        timing: cli.timing,
    };
    let result = match &cli.command {
        Command::Measure(a) => cmd_measure(&ctx, a),
        Command::ScanProduct(a) => cmd_scan_product(&ctx, a),
        Command::ScanIsing(a) => cmd_scan_ising(&ctx, a),
        Command::CheckInequalities(a) => cmd_check(&ctx, a),
        Command::Sim(a) => cmd_sim(&ctx, a),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Magic(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(3)
        }
    }
}
