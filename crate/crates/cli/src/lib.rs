//! Job specifications, dispatch to the core library, and the fixture matrix.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_path_to_error::Segment;
use serde_json::{json, Value};

use twistlab::cocycles::{build_cocycle, CocycleSpec};
use twistlab::growth::{self, LengthFunction, TorusMap};
use twistlab::regularity::{is_regular_wrt_subgroup, is_sigma_regular, regular_subgroup_generators};
use twistlab::spectral::{self, FiniteFunction, GaussRat, Scalar};
use twistlab::verdicts::{self, Status};
use twistlab::{Cocycle, Error, Family, Group, IrrationalBasis, Phase};

pub mod fixtures;

pub const DEFAULT_RADIUS: u32 = 6;
pub const DEFAULT_NODE_CAP: usize = 1_000_000;
pub const DEFAULT_TOL: f64 = 1e-8;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SPEC: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    #[serde(default = "default_radius")]
    pub radius: u32,
    #[serde(default = "default_cap")]
    pub node_cap: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_radius() -> u32 {
    DEFAULT_RADIUS
}
fn default_cap() -> usize {
    DEFAULT_NODE_CAP
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { radius: DEFAULT_RADIUS, node_cap: DEFAULT_NODE_CAP, tol: DEFAULT_TOL }
    }
}

/// Integer, float or "p/q" string.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Num {
    fn exact(&self) -> Option<BigRational> {
        match self {
            Num::Int(i) => Some(BigRational::from_integer((*i).into())),
            Num::Float(_) => None,
            Num::Text(s) => BigRational::from_str(s.trim()).ok(),
        }
    }

    fn float(&self) -> Option<f64> {
        match self {
            Num::Int(i) => Some(*i as f64),
            Num::Float(f) => Some(*f),
            Num::Text(s) => match BigRational::from_str(s.trim()) {
                Ok(r) => num_traits::ToPrimitive::to_f64(&r),
                Err(_) => s.trim().parse().ok(),
            },
        }
    }
}

/// `[element, re, im]`
pub type Entry = (Value, Num, Num);

/// Written with an `op` tag in job files; see [`JobSpec::from_value`].
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Command {
    Kleppner {
        #[serde(default)]
        hints: Vec<Value>,
    },
    RelativeKleppner {
        subgroup: String,
    },
    ConditionX {
        subgroup: String,
    },
    Classify {},
    Regular {
        element: Value,
        #[serde(default)]
        subgroup: Option<String>,
    },
    Generators {
        window: i64,
        height: i64,
    },
    Norm {
        f: Vec<Entry>,
        #[serde(default)]
        radii: Vec<u32>,
    },
    R2 {
        f: Vec<Entry>,
        n_max: usize,
    },
    Domination {
        f: Vec<Entry>,
        xi: Vec<Entry>,
        n_max: usize,
    },
    StableRank {
        set: Vec<Value>,
        #[serde(default)]
        search_radius: Option<u32>,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    GrowthClass {
        element: Value,
        #[serde(default = "default_kappa")]
        kappa: String,
        #[serde(default = "default_kmax")]
        k_max: usize,
        #[serde(default = "default_degrees")]
        degrees: Vec<u32>,
    },
    Decay {
        #[serde(default = "default_kappa")]
        kappa: String,
        m: f64,
        #[serde(default = "default_trials")]
        trials: usize,
        #[serde(default)]
        f: Option<Vec<Entry>>,
    },
    Orbit {
        nu1: Phase,
        nu2: Phase,
        #[serde(default = "default_maps")]
        maps: Vec<TorusMap>,
        #[serde(default)]
        start: Option<(Phase, Phase)>,
        #[serde(default = "default_points")]
        n_points: usize,
    },
}

fn default_samples() -> usize {
    3
}
fn default_kappa() -> String {
    "1+L".into()
}
fn default_kmax() -> usize {
    8
}
fn default_degrees() -> Vec<u32> {
    vec![1, 2, 3]
}
fn default_trials() -> usize {
    50
}
fn default_maps() -> Vec<TorusMap> {
    vec![TorusMap::Phi1]
}
fn default_points() -> usize {
    4096
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Kleppner { .. } => "kleppner",
            Command::RelativeKleppner { .. } => "relative_kleppner",
            Command::ConditionX { .. } => "condition_x",
            Command::Classify {} => "classify",
            Command::Regular { .. } => "regular",
            Command::Generators { .. } => "generators",
            Command::Norm { .. } => "norm",
            Command::R2 { .. } => "r2",
            Command::Domination { .. } => "domination",
            Command::StableRank { .. } => "stable_rank",
            Command::GrowthClass { .. } => "growth_class",
            Command::Decay { .. } => "decay",
            Command::Orbit { .. } => "orbit",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub group: Family,
    #[serde(default)]
    pub cocycle: Option<CocycleSpec>,
    /// Numeric values of the irrational symbols.
    #[serde(default)]
    pub basis: BTreeMap<String, f64>,
    pub command: Command,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub seed: u64,
}

impl JobSpec {
    /// Parses a job, reporting the JSON path of schema errors.
    pub fn from_json(text: &str) -> Result<JobSpec, String> {
        let v: Value = serde_json::from_str(text).map_err(|e| format!("job: {e}"))?;
        JobSpec::from_value(v)
    }

    pub fn from_value(mut v: Value) -> Result<JobSpec, String> {
        if let Some(cmd) = v.get_mut("command").and_then(Value::as_object_mut) {
            let op = match cmd.remove("op") {
                Some(Value::String(op)) => op,
                Some(other) => return Err(format!("command.op: expected a string, got {other}")),
                None => return Err("command.op: missing field `op`".into()),
            };
            let rest = Value::Object(std::mem::take(cmd));
            v["command"] = json!({ op: rest });
        }
        serde_path_to_error::deserialize(v).map_err(|e| {
            let mut path = String::new();
            for seg in e.path().iter() {
                match seg {
                    Segment::Seq { index } => path.push_str(&format!("[{index}]")),
                    Segment::Map { key } => {
                        if !path.is_empty() {
                            path.push('.');
                        }
                        path.push_str(key);
                    }
                    Segment::Enum { .. } | Segment::Unknown => {}
                }
            }
            if path.is_empty() {
                path.push_str("job");
            }
            format!("{path}: {}", e.into_inner())
        })
    }
}

/// Report JSON and exit code.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Value,
    pub code: i32,
}

impl Outcome {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.report).expect("reports serialize")
    }
}

pub(crate) fn spec_error(msg: String) -> Outcome {
    Outcome { report: json!({ "error": msg, "exit": EXIT_SPEC }), code: EXIT_SPEC }
}

fn from_error(e: Error) -> Outcome {
    match e {
        Error::Budget { radius, cap } => Outcome {
            report: json!({ "error": format!("budget exhausted at radius {radius} (node cap {cap})"), "status": Status::Inconclusive, "exit": EXIT_BUDGET }),
            code: EXIT_BUDGET,
        },
        other => spec_error(other.to_string()),
    }
}

pub fn run_json(text: &str) -> Outcome {
    match JobSpec::from_json(text) {
        Ok(job) => run(&job),
        Err(e) => spec_error(e),
    }
}

/// Dispatches a job. Exit code 0 on completion, 1 on spec errors, 2 when
/// the budget ran out with nothing decided.
pub fn run(job: &JobSpec) -> Outcome {
    match dispatch(job) {
        Ok((body, undecided)) => {
            let report = json!({
                "command": job.command.name(),
                "group": job.group.name(),
                "cocycle": body.1,
                "budgets": job.budgets,
                "seed": job.seed,
                "report": body.0,
            });
            Outcome { report, code: if undecided { EXIT_BUDGET } else { EXIT_OK } }
        }
        Err(e) => from_error(e),
    }
}

type Body = (Value, String);

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn functions(group: &Group, entries: &[Entry], path: &str) -> twistlab::Result<Vec<(twistlab::Element, Num, Num)>> {
    entries
        .iter()
        .enumerate()
        .map(|(i, (g, re, im))| {
            let g = group.parse_element(g).map_err(|e| Error::Config(format!("{path}[{i}]: {e}")))?;
            Ok((g, re.clone(), im.clone()))
        })
        .collect()
}

fn float_fn(entries: &[(twistlab::Element, Num, Num)], path: &str) -> twistlab::Result<FiniteFunction<num_complex::Complex64>> {
    let mut f = FiniteFunction::new();
    for (i, (g, re, im)) in entries.iter().enumerate() {
        let (Some(a), Some(b)) = (re.float(), im.float()) else {
            return Err(Error::Config(format!("{path}[{i}]: coefficient is not a number")));
        };
        let c = num_complex::Complex64::new(a, b);
        let e = f.entry(g.clone()).or_insert(num_complex::Complex64::new(0.0, 0.0));
        *e += c;
    }
    f.retain(|_, v| *v != num_complex::Complex64::new(0.0, 0.0));
    Ok(f)
}

fn exact_fn(entries: &[(twistlab::Element, Num, Num)]) -> Option<FiniteFunction<GaussRat>> {
    let mut f = FiniteFunction::new();
    for (g, re, im) in entries {
        let c = GaussRat::new(re.exact()?, im.exact()?);
        let e = f.entry(g.clone()).or_insert_with(<GaussRat as Scalar>::zero);
        *e = Scalar::add(&*e, &c);
    }
    f.retain(|_, v| !v.is_zero());
    Some(f)
}

fn dispatch(job: &JobSpec) -> twistlab::Result<(Body, bool)> {
    if job.budgets.node_cap == 0 || job.budgets.tol.is_nan() || job.budgets.tol <= 0.0 {
        return Err(Error::Config("budgets: node_cap and tol must be positive".into()));
    }
    let group = Group::new(job.group.clone())?.with_node_cap(job.budgets.node_cap);
    let sigma = match &job.cocycle {
        Some(spec) => build_cocycle(&group, spec, "cocycle")?,
        None => Cocycle::trivial(&group),
    };
    let basis = IrrationalBasis::new(job.basis.iter().map(|(k, v)| (k.clone(), *v)))?;
    let b = &job.budgets;
    let r = b.radius;
    let desc = sigma.describe();
    let out = |v: Value, undecided: bool| Ok(((v, desc.clone()), undecided));
    match &job.command {
        Command::Kleppner { hints } => {
            let hints = hints.iter().map(|h| group.parse_element(h)).collect::<twistlab::Result<Vec<_>>>()?;
            let v = verdicts::decide_kleppner(&sigma, r, &hints);
            out(to_value(&v), v.is(Status::Inconclusive))
        }
        Command::RelativeKleppner { subgroup } => {
            let sub = twistlab::groups::Subgroup::parse(subgroup)?;
            let v = verdicts::decide_relative_kleppner(&sigma, sub, r)?;
            out(json!({ "subgroup": sub.name(), "verdict": v }), v.is(Status::Inconclusive))
        }
        Command::ConditionX { subgroup } => {
            let sub = twistlab::groups::Subgroup::parse(subgroup)?;
            let x = verdicts::check_condition_x(&sigma, sub, r)?;
            let undecided = x.verdict.is(Status::Inconclusive);
            out(json!({ "subgroup": sub.name(), "condition_x": x }), undecided)
        }
        Command::Classify {} => {
            let p = verdicts::classify(&sigma, r);
            out(to_value(&p), p.all_inconclusive())
        }
        Command::Regular { element, subgroup } => {
            let g = group.parse_element(element)?;
            let rep = match subgroup {
                Some(s) => is_regular_wrt_subgroup(&sigma, &g, twistlab::groups::Subgroup::parse(s)?, r)?,
                None => is_sigma_regular(&sigma, &g, r)?,
            };
            let undecided = !rep.is_regular() && !rep.is_not_regular();
            out(to_value(&rep), undecided)
        }
        Command::Generators { window, height } => {
            let rep = regular_subgroup_generators(&sigma, *window, *height)?;
            out(to_value(&rep), false)
        }
        Command::Norm { f, radii } => {
            let f = float_fn(&functions(&group, f, "command.f")?, "command.f")?;
            let radii = if radii.is_empty() { vec![r] } else { radii.clone() };
            let seq = spectral::truncated_norm_sequence(&f, &sigma, radii, b.tol, &basis, job.seed)?;
            let monotone = seq.windows(2).all(|w| w[1].estimate.value >= w[0].estimate.value - b.tol.sqrt());
            out(json!({ "sequence": seq, "monotone": monotone }), false)
        }
        Command::R2 { f, n_max } => {
            let entries = functions(&group, f, "command.f")?;
            if let Some(fx) = exact_fn(&entries) {
                if let Ok((rep, _)) = spectral::r2_estimate(&fx, &sigma, *n_max, &basis, b.node_cap) {
                    return out(to_value(&rep), false);
                }
            }
            let fl = float_fn(&entries, "command.f")?;
            let (rep, _) = spectral::r2_estimate(&fl, &sigma, *n_max, &basis, b.node_cap)?;
            out(to_value(&rep), false)
        }
        Command::Domination { f, xi, n_max } => {
            let fe = functions(&group, f, "command.f")?;
            let xe = functions(&group, xi, "command.xi")?;
            if let (Some(a), Some(x)) = (exact_fn(&fe), exact_fn(&xe)) {
                if let Ok(rep) = spectral::check_domination(&a, &x, &sigma, *n_max, &basis) {
                    return out(json!({ "pass": rep.pass(), "domination": rep }), false);
                }
            }
            let rep = spectral::check_domination(&float_fn(&fe, "command.f")?, &float_fn(&xe, "command.xi")?, &sigma, *n_max, &basis)?;
            out(json!({ "pass": rep.pass(), "domination": rep }), false)
        }
        Command::StableRank { set, search_radius, samples } => {
            let set = set.iter().map(|h| group.parse_element(h)).collect::<twistlab::Result<Vec<_>>>()?;
            let rep = spectral::stable_rank_evidence(&sigma, &set, search_radius.unwrap_or(r), r, b.tol, &basis, job.seed, *samples)?;
            out(to_value(&rep), false)
        }
        Command::GrowthClass { element, kappa, k_max, degrees } => {
            let g = group.parse_element(element)?;
            let k = LengthFunction::parse(kappa)?;
            let p = growth::class_growth_counts(&group, &g, &k, *k_max, r)?;
            let s = growth::superpolynomial_probe(&p, degrees);
            out(json!({ "profile": p, "superpolynomial": s }), false)
        }
        Command::Decay { kappa, m, trials, f } => {
            let k = LengthFunction::parse(kappa)?;
            let fixed = match f {
                Some(f) => Some(float_fn(&functions(&group, f, "command.f")?, "command.f")?),
                None => None,
            };
            let rep = growth::kappa_decay_probe(&sigma, &k, *m, *trials, r, b.tol, &basis, job.seed, fixed)?;
            out(to_value(&rep), false)
        }
        Command::Orbit { nu1, nu2, maps, start, n_points } => {
            let start = start.clone().unwrap_or_else(growth::unit_point);
            let rep = growth::torus_orbit_probe(nu1, nu2, maps, &start, *n_points, &basis)?;
            out(to_value(&rep), false)
        }
    }
}
