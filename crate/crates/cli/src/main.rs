use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use twistlab_cli::fixtures::{bundled, run_fixture_matrix};
use twistlab_cli::{JobSpec, Outcome, DEFAULT_NODE_CAP, DEFAULT_RADIUS, DEFAULT_TOL, EXIT_OK, EXIT_SPEC};

/// Deciders and probes for twisted group C*-algebras. JSON goes to stdout,
/// a summary to stderr. TWISTLAB_BUDGET overrides the node cap.
#[derive(Parser)]
#[command(name = "twistlab", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a complete job file ("-" reads stdin).
    Run { job: String },
    #[command(subcommand)]
    Verdict(VerdictCmd),
    /// Kleppner, unique trace and C*-simplicity verdicts.
    Classify(Common),
    /// σ-regularity of one element, or generators of the regular subgroup.
    Regular {
        #[command(flatten)]
        common: Common,
        #[arg(long, conflicts_with_all = ["window", "height"])]
        element: Option<String>,
        #[arg(long, requires = "element")]
        subgroup: Option<String>,
        #[arg(long, default_value_t = 4)]
        window: i64,
        #[arg(long, default_value_t = 4)]
        height: i64,
    },
    #[command(subcommand)]
    Spectral(SpectralCmd),
    #[command(subcommand)]
    Growth(GrowthCmd),
    /// Run the bundled example matrix.
    Fixtures {
        #[arg(long, default_value_t = 4)]
        workers: usize,
        /// Override every fixture's search radius.
        #[arg(long)]
        radius: Option<u32>,
    },
}

#[derive(Subcommand)]
enum VerdictCmd {
    Kleppner {
        #[command(flatten)]
        common: Common,
        /// Candidate witnesses, tried first.
        #[arg(long = "hint")]
        hints: Vec<String>,
    },
    RelativeKleppner {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        subgroup: String,
    },
    ConditionX {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        subgroup: String,
    },
}

#[derive(Subcommand)]
enum SpectralCmd {
    /// Lower bounds for ‖Λ_σ(f)‖ from ball compressions.
    Norm {
        #[command(flatten)]
        common: Common,
        /// [[element, re, im], …]
        #[arg(long)]
        f: String,
        #[arg(long, value_delimiter = ',')]
        radii: Vec<u32>,
    },
    R2 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    Domination {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        f: String,
        #[arg(long)]
        xi: String,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
    StableRank {
        #[command(flatten)]
        common: Common,
        /// [element, …]
        #[arg(long)]
        set: String,
        #[arg(long)]
        search_radius: Option<u32>,
        #[arg(long, default_value_t = 3)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum GrowthCmd {
    Class {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        g: String,
        #[arg(long, default_value = "1+L")]
        kappa: String,
        #[arg(long, default_value_t = 8)]
        kmax: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
        degrees: Vec<u32>,
    },
    Decay {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "1+L")]
        kappa: String,
        #[arg(long = "M")]
        m: f64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long)]
        f: Option<String>,
    },
    Orbit {
        #[command(flatten)]
        common: Common,
        /// Phase JSON, e.g. '{"rat":[1,5]}'.
        #[arg(long)]
        nu1: String,
        #[arg(long, default_value = r#"{"rat":[0,1]}"#)]
        nu2: String,
        #[arg(long, value_delimiter = ',', default_value = "phi1")]
        maps: Vec<String>,
        #[arg(long)]
        start: Option<String>,
        #[arg(long, default_value_t = 4096)]
        points: usize,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Family JSON, or @path.
    #[arg(long, default_value = r#"{"family":"sum_z"}"#)]
    group: String,
    /// Cocycle JSON, or @path; trivial when absent.
    #[arg(long)]
    cocycle: Option<String>,
    /// Numeric value of an irrational symbol, name=value.
    #[arg(long = "basis")]
    basis: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_RADIUS)]
    radius: u32,
    #[arg(long, default_value_t = DEFAULT_NODE_CAP)]
    node_cap: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn read_arg(s: &str) -> Result<String, String> {
    match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}")),
        None => Ok(s.to_string()),
    }
}

/// JSON text, or a bare string such as a word "a b A".
fn json_arg(name: &str, s: &str) -> Result<Value, String> {
    let text = read_arg(s)?;
    match serde_json::from_str(&text) {
        Ok(v) => Ok(v),
        Err(e) if text.trim_start().starts_with(['{', '[']) => Err(format!("--{name}: {e}")),
        Err(_) => Ok(Value::String(text)),
    }
}

fn node_cap_override() -> Result<Option<usize>, String> {
    match std::env::var("TWISTLAB_BUDGET") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| format!("TWISTLAB_BUDGET: not a node count: {v:?}")),
        Err(_) => Ok(None),
    }
}

fn job(c: &Common, command: Value) -> Result<Value, String> {
    let mut basis = Map::new();
    for b in &c.basis {
        let (k, v) = b.split_once('=').ok_or_else(|| format!("--basis {b:?}: expected name=value"))?;
        let v: f64 = v.trim().parse().map_err(|_| format!("--basis {b:?}: bad number"))?;
        basis.insert(k.trim().to_string(), json!(v));
    }
    let mut j = json!({
        "group": json_arg("group", &c.group)?,
        "basis": basis,
        "command": command,
        "budgets": { "radius": c.radius, "node_cap": c.node_cap, "tol": c.tol },
        "seed": c.seed,
    });
    if let Some(s) = &c.cocycle {
        j["cocycle"] = json_arg("cocycle", s)?;
    }
    Ok(j)
}

fn build(cmd: &Cmd) -> Result<Value, String> {
    Ok(match cmd {
        Cmd::Run { job } => {
            let text = if job == "-" {
                std::io::read_to_string(std::io::stdin()).map_err(|e| e.to_string())?
            } else {
                std::fs::read_to_string(job).map_err(|e| format!("{job}: {e}"))?
            };
            serde_json::from_str(&text).map_err(|e| format!("{job}: {e}"))?
        }
        Cmd::Verdict(VerdictCmd::Kleppner { common, hints }) => {
            let hints = hints.iter().map(|h| json_arg("hint", h)).collect::<Result<Vec<_>, _>>()?;
            job(common, json!({ "op": "kleppner", "hints": hints }))?
        }
        Cmd::Verdict(VerdictCmd::RelativeKleppner { common, subgroup }) => {
            job(common, json!({ "op": "relative_kleppner", "subgroup": subgroup }))?
        }
        Cmd::Verdict(VerdictCmd::ConditionX { common, subgroup }) => job(common, json!({ "op": "condition_x", "subgroup": subgroup }))?,
        Cmd::Classify(common) => job(common, json!({ "op": "classify" }))?,
        Cmd::Regular { common, element: Some(e), subgroup, .. } => {
            job(common, json!({ "op": "regular", "element": json_arg("element", e)?, "subgroup": subgroup }))?
        }
        Cmd::Regular { common, element: None, window, height, .. } => {
            job(common, json!({ "op": "generators", "window": window, "height": height }))?
        }
        Cmd::Spectral(SpectralCmd::Norm { common, f, radii }) => {
            job(common, json!({ "op": "norm", "f": json_arg("f", f)?, "radii": radii }))?
        }
        Cmd::Spectral(SpectralCmd::R2 { common, f, n_max }) => job(common, json!({ "op": "r2", "f": json_arg("f", f)?, "n_max": n_max }))?,
        Cmd::Spectral(SpectralCmd::Domination { common, f, xi, n_max }) => job(
            common,
            json!({ "op": "domination", "f": json_arg("f", f)?, "xi": json_arg("xi", xi)?, "n_max": n_max }),
        )?,
        Cmd::Spectral(SpectralCmd::StableRank { common, set, search_radius, samples }) => job(
            common,
            json!({ "op": "stable_rank", "set": json_arg("set", set)?, "search_radius": search_radius, "samples": samples }),
        )?,
        Cmd::Growth(GrowthCmd::Class { common, g, kappa, kmax, degrees }) => job(
            common,
            json!({ "op": "growth_class", "element": json_arg("g", g)?, "kappa": kappa, "k_max": kmax, "degrees": degrees }),
        )?,
        Cmd::Growth(GrowthCmd::Decay { common, kappa, m, trials, f }) => {
            let f = f.as_deref().map(|f| json_arg("f", f)).transpose()?;
            job(common, json!({ "op": "decay", "kappa": kappa, "m": m, "trials": trials, "f": f }))?
        }
        Cmd::Growth(GrowthCmd::Orbit { common, nu1, nu2, maps, start, points }) => {
            let start = start.as_deref().map(|s| json_arg("start", s)).transpose()?;
            job(
                common,
                json!({ "op": "orbit", "nu1": json_arg("nu1", nu1)?, "nu2": json_arg("nu2", nu2)?,
                        "maps": maps, "start": start, "n_points": points }),
            )?
        }
        Cmd::Fixtures { .. } => unreachable!(),
    })
}

/// Prints to stdout; a closed pipe is not an error.
fn print(text: &str) {
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn emit(o: &Outcome) -> ExitCode {
    print(&o.to_json());
    ExitCode::from(o.code as u8)
}

fn fail(msg: String) -> ExitCode {
    eprintln!("error: {msg}");
    emit(&Outcome { report: json!({ "error": msg, "exit": EXIT_SPEC }), code: EXIT_SPEC })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cap = match node_cap_override() {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    if let Cmd::Fixtures { workers, radius } = &cli.cmd {
        let m = run_fixture_matrix(&bundled(), *radius, *workers);
        for r in &m.rows {
            let tag = match (r.matches, r.expected_divergence) {
                (true, _) => "match",
                (false, true) => "diverge (budget)",
                _ => "MISMATCH",
            };
            eprintln!("{:<36} {tag}", r.fixture);
        }
        print(&serde_json::to_string_pretty(&m).expect("reports serialize"));
        return if m.all_match { ExitCode::from(EXIT_OK as u8) } else { ExitCode::from(EXIT_SPEC as u8) };
    }
    let mut value = match build(&cli.cmd) {
        Ok(v) => v,
        Err(e) => return fail(e),
    };
    if let Some(c) = cap {
        value["budgets"]["node_cap"] = json!(c);
    }
    let spec = match JobSpec::from_value(value) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let out = twistlab_cli::run(&spec);
    match out.report.get("error") {
        Some(e) => eprintln!("{}: {}", spec.command.name(), e.as_str().unwrap_or_default()),
        None => eprintln!("{} on {}: exit {}", spec.command.name(), spec.group.name(), out.code),
    }
    emit(&out)
}
