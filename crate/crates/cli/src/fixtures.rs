//! Bundled example matrix and its runner.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::{run, JobSpec};

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub job: Value,
    /// JSON pattern the report must contain.
    pub expect: Value,
    /// Depends on ball search, so radius 0 may leave it undecided.
    pub search_based: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub fixture: String,
    pub expected: Value,
    pub got: Value,
    #[serde(rename = "match")]
    pub matches: bool,
    /// Undecided under a zero budget; not a failure.
    pub expected_divergence: bool,
    pub exit: i32,
}

#[derive(Clone, Debug, Serialize)]
pub struct Matrix {
    pub rows: Vec<Row>,
    pub all_match: bool,
}

const R: f64 = std::f64::consts::SQRT_2 - 1.0;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

fn statuses(k: &str, ut: &str, cs: &str) -> Value {
    json!({ "report": { "kleppner": { "status": k }, "unique_trace": { "status": ut }, "cstar_simple": { "status": cs } } })
}

fn classify(group: Value, cocycle: Value, basis: Value) -> Value {
    json!({ "group": group, "cocycle": cocycle, "basis": basis, "command": { "op": "classify" } })
}

const EXAMPLE_C: &str = r#"{"kind":"theta_diag","diagonals":[],"period":[{"irr":{"r":[1,1]}},{"rat":[0,1]},{"rat":[1,1],"irr":{"r":[-1,1]}},{"rat":[0,1]}]}"#;

/// The example matrix: one entry per stated verdict.
pub fn bundled() -> Vec<Fixture> {
    let zwrz = json!({ "family": "wreath", "base": "Z" });
    let lamp = json!({ "family": "wreath", "base": "Z2" });
    let bs = json!({ "family": "bs_nn", "n": 2 });
    let f2z = json!({ "family": "free_times_z" });
    let example_c: Value = serde_json::from_str(EXAMPLE_C).unwrap();
    vec![
        Fixture {
            name: "a_zwrz_prime_reciprocal",
            job: classify(zwrz, json!({ "kind": "lift", "base": { "kind": "theta_rule", "rule": "prime_reciprocal" } }), json!({})),
            expect: statuses("certified", "certified", "certified"),
            search_based: false,
        },
        Fixture {
            name: "b_example_c_regular",
            job: json!({ "group": { "family": "sum_z" }, "cocycle": example_c, "basis": { "r": R },
                         "command": { "op": "regular", "element": { "1": 1, "3": 1 } } }),
            expect: json!({ "report": { "status": "regular" } }),
            search_based: false,
        },
        Fixture {
            name: "b_example_c_kleppner",
            job: json!({ "group": { "family": "sum_z" }, "cocycle": example_c, "basis": { "r": R },
                         "command": { "op": "kleppner", "hints": [{ "1": 1, "3": 1 }] } }),
            expect: json!({ "report": { "status": "refuted", "witness": { "1": 1, "3": 1 } } }),
            search_based: true,
        },
        Fixture {
            name: "c_lamplighter_singleton",
            job: classify(lamp.clone(), json!({ "kind": "lift", "base": { "kind": "bitstream", "pre": [1], "period": [0] } }), json!({})),
            expect: statuses("certified", "certified", "certified"),
            search_based: false,
        },
        Fixture {
            name: "c_lamplighter_odd_base_kleppner",
            job: json!({ "group": { "family": "sum_z2" }, "cocycle": { "kind": "bitstream", "pre": [], "period": [1, 0] },
                         "command": { "op": "kleppner" } }),
            expect: json!({ "report": { "status": "refuted", "witness": { "0": 1, "2": 1 } } }),
            search_based: false,
        },
        Fixture {
            name: "c_lamplighter_odd_classify",
            job: classify(lamp, json!({ "kind": "lift", "base": { "kind": "bitstream", "pre": [], "period": [1, 0] } }), json!({})),
            expect: json!({ "report": { "unique_trace": { "status": "refuted", "note": "Y is periodic with m = 2" } } }),
            search_based: false,
        },
        Fixture {
            name: "d_bs_irrational",
            job: classify(bs.clone(), json!({ "kind": "bs", "lambda": { "irr": { "l": [1, 1] } } }), json!({ "l": GOLDEN })),
            expect: statuses("certified", "certified", "certified"),
            search_based: false,
        },
        Fixture {
            name: "d_bs_third_kleppner",
            job: json!({ "group": bs, "cocycle": { "kind": "bs", "lambda": { "rat": [1, 3] } }, "command": { "op": "kleppner" } }),
            expect: json!({ "report": { "status": "refuted", "witness": "b b b b b b" } }),
            search_based: false,
        },
        Fixture {
            name: "d_bs_third_relative_center",
            job: json!({ "group": bs, "cocycle": { "kind": "bs", "lambda": { "rat": [1, 3] } },
                         "command": { "op": "relative_kleppner", "subgroup": "center" } }),
            expect: json!({ "report": { "verdict": { "status": "refuted", "witness": "a a a" } } }),
            search_based: false,
        },
        Fixture {
            name: "e_sanov_irrational",
            job: classify(
                json!({ "family": "sanov" }),
                json!({ "kind": "sanov", "mu0": { "irr": { "t": [1, 1] } }, "mu1": { "rat": [1, 2] }, "mu2": { "rat": [1, 2] } }),
                json!({ "t": GOLDEN }),
            ),
            expect: json!({ "report": { "unique_trace": { "status": "certified" }, "cstar_simple": { "status": "certified" } } }),
            search_based: false,
        },
        Fixture {
            name: "e_sanov_torsion",
            job: classify(
                json!({ "family": "sanov" }),
                json!({ "kind": "sanov", "mu0": { "rat": [1, 3] }, "mu1": { "rat": [1, 2] }, "mu2": { "rat": [1, 4] } }),
                json!({}),
            ),
            expect: json!({ "report": { "unique_trace": { "status": "refuted" }, "cstar_simple": { "status": "refuted" } } }),
            search_based: false,
        },
        Fixture {
            name: "f_f2z_nontorsion",
            job: classify(f2z.clone(), json!({ "kind": "free_times_z", "mu": { "irr": { "m": [1, 1] } }, "nu": { "rat": [1, 2] } }), json!({ "m": GOLDEN })),
            expect: statuses("certified", "certified", "certified"),
            search_based: false,
        },
        Fixture {
            name: "f_f2z_torsion",
            job: json!({ "group": f2z, "cocycle": { "kind": "free_times_z", "mu": { "rat": [1, 2] }, "nu": { "rat": [1, 3] } },
                         "command": { "op": "kleppner" } }),
            expect: json!({ "report": { "status": "refuted" } }),
            search_based: false,
        },
        Fixture {
            name: "g_lamplighter_relative_base",
            job: json!({ "group": { "family": "wreath", "base": "Z2" }, "command": { "op": "relative_kleppner", "subgroup": "base" } }),
            expect: json!({ "report": { "verdict": { "status": "certified" } } }),
            search_based: false,
        },
        Fixture {
            name: "g_finite_wreath_relative_base",
            job: json!({ "group": { "family": "wreath", "base": "Z2", "acting": 3 }, "command": { "op": "relative_kleppner", "subgroup": "base" } }),
            expect: json!({ "report": { "verdict": { "status": "refuted" } } }),
            search_based: false,
        },
    ]
}

/// Projection of `got` onto the keys of `pattern`.
pub fn project(pattern: &Value, got: &Value) -> Value {
    match (pattern, got) {
        (Value::Object(p), Value::Object(g)) => {
            let mut m = Map::new();
            for k in p.keys() {
                m.insert(k.clone(), g.get(k).map_or(Value::Null, |v| project(&p[k], v)));
            }
            Value::Object(m)
        }
        _ => got.clone(),
    }
}

/// Runs the matrix on at most `workers` threads; rows keep input order.
/// `radius` overrides every job's search radius.
pub fn run_fixture_matrix(fixtures: &[Fixture], radius: Option<u32>, workers: usize) -> Matrix {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().expect("thread pool");
    let rows: Vec<Row> = pool.install(|| fixtures.par_iter().map(|f| run_one(f, radius)).collect());
    let all_match = rows.iter().all(|r| r.matches || r.expected_divergence);
    Matrix { rows, all_match }
}

fn run_one(f: &Fixture, radius: Option<u32>) -> Row {
    let mut job = f.job.clone();
    if let Some(r) = radius {
        job["budgets"]["radius"] = json!(r);
    }
    let out = match JobSpec::from_value(job) {
        Ok(spec) => run(&spec),
        Err(e) => crate::spec_error(e),
    };
    let got = project(&f.expect, &out.report);
    let matches = got == f.expect;
    let undecided = out.report.to_string().contains("\"inconclusive\"");
    Row {
        fixture: f.name.into(),
        expected: f.expect.clone(),
        got,
        matches,
        expected_divergence: !matches && f.search_based && radius == Some(0) && undecided,
        exit: out.code,
    }
}
