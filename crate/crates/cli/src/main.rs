mod config;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use symbolkit::crossed::{circle_action, cond_expectation, cp_mul, cp_star, default_quadrature, phi_map, CPElement};
use symbolkit::dsl::{parse, parse_expr_with};
use symbolkit::gamma::{central_lower_bound, gamma_eval, is_fredholm, phi_grid, End, FredholmTols};
use symbolkit::kmap::{delta0_detailed, delta1_with, homotopy_delta0_check, k1_ak_detailed};
use symbolkit::linalg::smallest_singular_value;
use symbolkit::opalg::OpExpr;
use symbolkit::oracle::{discretize, numerical_index_detailed, GridSpec};
use symbolkit::report::Report;
use symbolkit::sigma::{
    index_commutative, k1_ae_coordinates, mbar_symbol, sigma_invertible, sigma_symbol, winding_number, SigmaGrid,
    Verdict, CHART_NAMES, INDEX_SIGN,
};
use symbolkit::verify::{run_criterion, suite_ids};
use symbolkit::{SymbolError, C64};

use crate::config::Config;

#[derive(Parser, Debug)]
#[command(name = "symbolkit", version, about = "Symbols, Fredholm verdicts and indices for operators on L2(R)")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct GlobalOpts {
    /// key=value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Truncation radius of the boundary symbol
    #[arg(long = "N", global = true)]
    n: Option<String>,
    #[arg(long = "grid-n", global = true)]
    grid_n: Option<String>,
    #[arg(long = "grid-L", global = true)]
    grid_l: Option<String>,
    #[arg(long = "tol-sigma", global = true)]
    tol_sigma: Option<String>,
    #[arg(long = "tol-rank", global = true)]
    tol_rank: Option<String>,
    #[arg(long = "phi-samples", global = true)]
    phi_samples: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Leave out the wall time so reports are byte-for-byte reproducible
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Principal symbol on its six charts
    Sigma {
        expr: String,
        /// Chart written by --csv
        #[arg(long, default_value = "circpos_plusXi")]
        chart: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Square-boundary symbol of a commutative element and its winding
    Mbar {
        expr: String,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Boundary symbol matrix at one point
    Gamma {
        expr: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phi: f64,
        /// +1 or -1
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        end: i64,
        /// Write the matrix in the text format
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    Fredholm {
        expr: String,
    },
    /// Index by winding (commutative elements) or by the grid oracle
    Index {
        expr: String,
        /// Also run the grid oracle for commutative elements
        #[arg(long)]
        oracle: bool,
    },
    Delta0 {
        expr: String,
    },
    Delta1 {
        expr: String,
    },
    /// Coordinates of the class modulo compacts in the B1, B2, B3 basis
    Kcoords {
        expr: String,
    },
    Homotopy {
        #[arg(long, default_value_t = 9)]
        x_samples: usize,
        #[arg(long, default_value_t = 33)]
        phi_points: usize,
    },
    /// Crossed-product operations on JSON elements {"j": "function"}
    Crossed {
        f: String,
        #[arg(long)]
        g: Option<String>,
        /// Gauge angle θ, z = e^{iθ}
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
    },
    /// Run a bundled verification suite (or `all`)
    Verify {
        suite: String,
    },
    /// Run the directives of a DSL program file
    Run {
        file: PathBuf,
    },
}

struct Ctx {
    cfg: Config,
    timing: bool,
    bindings: BTreeMap<String, OpExpr>,
}

/// A finished report and whether it counts as success.
struct Outcome {
    report: Value,
    ok: bool,
}

fn expr(ctx: &Ctx, text: &str) -> Result<OpExpr, SymbolError> {
    parse_expr_with(text, &ctx.bindings)
}

fn write_file(path: &Path, text: &str) -> Result<(), SymbolError> {
    std::fs::write(path, text).map_err(|e| SymbolError::Config(format!("cannot write {}: {e}", path.display())))
}

fn fredholm_tols(cfg: &Config) -> FredholmTols {
    FredholmTols {
        sigma_tol: cfg.tol_sigma,
        gamma_tol: cfg.tol_sigma,
        ns: vec![cfg.n, 2 * cfg.n],
        phis: phi_grid(cfg.phi_samples),
        grid: SigmaGrid::default(),
    }
}

fn op_name(c: &Command) -> &'static str {
    match c {
        Command::Sigma { .. } => "sigma",
        Command::Mbar { .. } => "mbar",
        Command::Gamma { .. } => "gamma",
        Command::Fredholm { .. } => "fredholm",
        Command::Index { .. } => "index",
        Command::Delta0 { .. } => "delta0",
        Command::Delta1 { .. } => "delta1",
        Command::Kcoords { .. } => "kcoords",
        Command::Homotopy { .. } => "homotopy",
        Command::Crossed { .. } => "crossed",
        Command::Verify { .. } => "verify",
        Command::Run { .. } => "run",
    }
}

fn inputs(c: &Command) -> Value {
    match c {
        Command::Sigma { expr, chart, .. } => json!({"expr": expr, "chart": chart}),
        Command::Gamma { expr, phi, end, .. } => json!({"expr": expr, "phi": phi, "end": end}),
        Command::Mbar { expr, .. }
        | Command::Fredholm { expr }
        | Command::Delta0 { expr }
        | Command::Delta1 { expr }
        | Command::Kcoords { expr } => json!({"expr": expr}),
        Command::Index { expr, oracle } => json!({"expr": expr, "oracle": oracle}),
        Command::Homotopy { x_samples, phi_points } => json!({"x_samples": x_samples, "phi_points": phi_points}),
        Command::Crossed { f, g, theta } => json!({"f": f, "g": g, "theta": theta}),
        Command::Verify { suite } => json!({"suite": suite}),
        Command::Run { file } => json!({"file": file.display().to_string()}),
    }
}

fn execute(ctx: &Ctx, cmd: &Command, r: Report) -> Result<(Report, bool), SymbolError> {
    let cfg = &ctx.cfg;
    Ok(match cmd {
        Command::Sigma { expr: text, chart, csv } => {
            let e = expr(ctx, text)?;
            if !CHART_NAMES.contains(&chart.as_str()) {
                return Err(SymbolError::BadParameters(format!("unknown chart `{chart}`, expected one of {CHART_NAMES:?}")));
            }
            let s = sigma_symbol(&e, &SigmaGrid::default());
            let v = sigma_invertible(&s, cfg.tol_sigma);
            let charts: Vec<Value> =
                s.charts.iter().map(|c| json!({"name": c.name, "min_modulus": c.min_modulus().0})).collect();
            let mut r = r.set("verdict", v.verdict).set("certificates", &v).set_value("charts", Value::Array(charts));
            if v.verdict == Verdict::Invertible {
                r = r.set("k1_ae_coordinates", k1_ae_coordinates(&s, cfg.tol_sigma)?);
            }
            if let Some(path) = csv {
                write_file(path, &s.chart(chart).to_csv())?;
            }
            (r, true)
        }
        Command::Mbar { expr: text, csv } => {
            let m = mbar_symbol(&expr(ctx, text)?)?;
            let w = winding_number(&m.curve(), cfg.tol_sigma)?;
            if let Some(path) = csv {
                write_file(path, &m.to_csv())?;
            }
            let edges: Vec<&str> = m.edges.iter().map(|e| e.name).collect();
            (r.set("winding", w).set("index", INDEX_SIGN * w).set("edges", edges), true)
        }
        Command::Gamma { expr: text, phi, end, dump } => {
            let e = expr(ctx, text)?;
            let end = End::from_sign(*end).ok_or_else(|| SymbolError::BadParameters("end must be +1 or -1".into()))?;
            let g = gamma_eval(&e, *phi, end, cfg.n);
            if let Some(path) = dump {
                write_file(path, &g.to_text())?;
            }
            let certs = json!({
                "min_singular_value": smallest_singular_value(&g.entries),
                "central_lower_bound": central_lower_bound(&e, *phi, end, cfg.n),
                "frobenius_norm": g.entries.norm(),
            });
            (r.set("size", 2 * cfg.n + 1).set_value("certificates", certs), true)
        }
        Command::Fredholm { expr: text } => {
            let rep = is_fredholm(&expr(ctx, text)?, &fredholm_tols(cfg));
            let worst = rep.gamma.as_ref().and_then(|g| g.worst.clone());
            let certs = json!({"sigma": rep.sigma, "gamma_verdict": rep.gamma.as_ref().map(|g| g.verdict), "gamma_worst": worst});
            (r.set("verdict", rep.verdict).set_value("certificates", certs), true)
        }
        Command::Index { expr: text, oracle } => {
            let e = expr(ctx, text)?;
            let mut r = r;
            let mut index = None;
            if e.is_commutative_class() {
                let w = index_commutative(&e)?;
                index = Some(w);
                r = r.set("winding_index", w);
            }
            if *oracle || index.is_none() {
                let spec = GridSpec::new(cfg.grid_l, cfg.grid_n)?;
                let (i, a, b) =
                    numerical_index_detailed(&discretize(&e, spec), &discretize(&e, spec.doubled()), cfg.tol_rank)?;
                let certs = json!({
                    "grids": [[spec.l, spec.n], [2.0 * spec.l, 2 * spec.n]],
                    "kernel": [a.kernel, b.kernel],
                    "cokernel": [a.cokernel, b.cokernel],
                    "gap": [a.gap, b.gap],
                });
                r = r.set("oracle_index", i).set_value("certificates", certs);
                if index.is_some_and(|w| w != i) {
                    return Err(SymbolError::NoPlateau { first: index.unwrap_or_default(), second: i });
                }
                index = Some(i);
            }
            (r.set("index", index), true)
        }
        Command::Delta0 { expr: text } => {
            let d = delta0_detailed(&expr(ctx, text)?, cfg.n, cfg.phi_samples)?;
            let c = [d.class.u_coord, d.class.v_coord];
            (r.set("u", c[0]).set("v", c[1]).set("coordinates", c).set("certificates", &d), true)
        }
        Command::Delta1 { expr: text } => {
            let p = delta1_with(&expr(ctx, text)?, cfg.n, cfg.tol_rank)?;
            (r.set("ind_minus", p.ind_minus).set("ind_plus", p.ind_plus).set("coordinates", [p.ind_minus, p.ind_plus]), true)
        }
        Command::Kcoords { expr: text } => {
            let e = expr(ctx, text)?;
            let tols = fredholm_tols(cfg);
            let ak = k1_ak_detailed(&e, &tols)?;
            let c = ak.coordinates;
            let ae = k1_ae_coordinates(&sigma_symbol(&e, &tols.grid), cfg.tol_sigma)?;
            (r.set("coordinates", [c.n_plus, c.n_minus, c.m]).set("k1_ae_coordinates", ae).set("certificates", &ak), true)
        }
        Command::Homotopy { x_samples, phi_points } => {
            let h = homotopy_delta0_check(cfg.n, *x_samples, *phi_points);
            (r.set("g_winding", h.g_winding).set("certificates", &h), true)
        }
        Command::Crossed { f, g, theta } => {
            let parse_cp = |s: &str| -> Result<CPElement, SymbolError> {
                let v: Value = serde_json::from_str(s).map_err(|e| SymbolError::BadParameters(format!("CPElement JSON: {e}")))?;
                CPElement::from_json(&v)
            };
            let f = parse_cp(f)?;
            let ex = cond_expectation(&f, default_quadrature(&f))?;
            let mut r = r
                .set_value("star", cp_star(&f).to_json())
                .set_value("expectation", json!({"value": ex.value.to_string(), "nodes": ex.nodes, "quadrature_residual": ex.quadrature_residual}))
                .set("phi_map", phi_map(&f).expr().to_string());
            if let Some(g) = g {
                r = r.set_value("product", cp_mul(&f, &parse_cp(g)?).to_json());
            }
            if let Some(t) = theta {
                r = r.set_value("gauge", circle_action(C64::from_polar(1.0, *t), &f)?.to_json());
            }
            (r, true)
        }
        Command::Verify { suite } => {
            let mut all = true;
            let mut crit = Vec::new();
            for id in suite_ids(suite)? {
                let c = run_criterion(id, cfg.seed);
                all &= c.pass;
                crit.push(c);
            }
            let r = if ctx.timing { r } else { r.set_value("note", json!("suite timings omitted")) };
            let crit: Vec<Value> = crit
                .into_iter()
                .map(|c| {
                    let mut v = symbolkit::report::to_report_value(&c);
                    if !ctx.timing {
                        v.as_object_mut().map(|o| o.remove("seconds"));
                    }
                    v
                })
                .collect();
            (r.set("passed", all).set_value("criteria", Value::Array(crit)), all)
        }
        Command::Run { file } => {
            let text = std::fs::read_to_string(file)
                .map_err(|e| SymbolError::Config(format!("cannot read {}: {e}", file.display())))?;
            let prog = parse(&text)?;
            let inner = Ctx { cfg: ctx.cfg.clone(), timing: ctx.timing, bindings: prog.bindings.clone() };
            let mut ok = true;
            let mut reports = Vec::new();
            for d in &prog.directives {
                let argv = std::iter::once("symbolkit".to_string()).chain(std::iter::once(d.command.clone())).chain(d.args.iter().cloned());
                let out = match Cli::try_parse_from(argv) {
                    Ok(cli) if !matches!(cli.command, Command::Run { .. }) => run_command(&inner, &cli.command),
                    Ok(_) => failure(&inner, "run", &SymbolError::UnknownCommand("nested run".into())),
                    Err(e) => failure(&inner, &d.command, &SymbolError::UnknownCommand(e.to_string().lines().next().unwrap_or("").to_string())),
                };
                ok &= out.ok;
                reports.push(out.report);
            }
            (r.set_value("reports", Value::Array(reports)), ok)
        }
    })
}

fn failure(ctx: &Ctx, op: &str, e: &SymbolError) -> Outcome {
    Outcome { report: Report::new(op).set_value("config", ctx.cfg.to_json()).error(e).into_value(), ok: false }
}

fn run_command(ctx: &Ctx, cmd: &Command) -> Outcome {
    let start = Instant::now();
    let base = Report::new(op_name(cmd)).set_value("inputs", inputs(cmd)).set_value("config", ctx.cfg.to_json());
    let (report, ok) = match execute(ctx, cmd, base.clone()) {
        Ok((r, ok)) => (r, ok),
        Err(e) => (base.error(&e), false),
    };
    let report = if ctx.timing { report.set("wall_time_s", start.elapsed().as_secs_f64()) } else { report };
    Outcome { report: report.into_value(), ok }
}

fn resolve_config(g: &GlobalOpts) -> Result<Config, SymbolError> {
    let env: BTreeMap<String, String> = std::env::vars().filter(|(k, _)| k.starts_with("SYMBOLKIT_")).collect();
    let file = match &g.config {
        Some(p) => Some(
            std::fs::read_to_string(p).map_err(|e| SymbolError::Config(format!("cannot read {}: {e}", p.display())))?,
        ),
        None => None,
    };
    let flags: Vec<(&str, String)> = [
        ("N", &g.n),
        ("grid_n", &g.grid_n),
        ("grid_L", &g.grid_l),
        ("tol_sigma", &g.tol_sigma),
        ("tol_rank", &g.tol_rank),
        ("phi_samples", &g.phi_samples),
        ("seed", &g.seed),
    ]
    .into_iter()
    .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
    .collect();
    Config::resolve(&env, file.as_deref(), &flags)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match resolve_config(&cli.global) {
        Ok(cfg) => run_command(&Ctx { cfg, timing: !cli.global.no_timing, bindings: BTreeMap::new() }, &cli.command),
        Err(e) => Outcome { report: Report::new(op_name(&cli.command)).error(&e).into_value(), ok: false },
    };
    // a closed pipe is not an error worth a panic
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&out.report).unwrap_or_default());
    if out.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
