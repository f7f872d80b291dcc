//! Kleppner-type deciders and the rule classifier for C*-simplicity and the
//! unique trace property.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::cocycles::{Bitstream, Cocycle, CocycleKind, Theta};
use crate::groups::{unit, Element, Family, Group, LampBase, Subgroup};
use crate::lattice::is_aperiodic;
use crate::regularity::{certificate, is_regular_wrt_subgroup, regular_subgroup_generators, zn_radical};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Certified,
    Refuted,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cite: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Element>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Citation attached to each rule id.
pub fn cite(rule: &str) -> &'static str {
    match rule {
        "icc" => "ICC: K(G) = Z2(G,T)",
        "finite_exhaustive" => "finite group, exhaustive check",
        "theta_prime_reciprocal" => "Example exmp ZwrZ(d)",
        "theta_finite_bandwidth_irrational" => "Example exmp ZwrZ(b)",
        "theta_finite_bandwidth_torsion" => "Example exmp ZwrZ(a)",
        "theta_window_finite" => "finitely many nonzero θ entries",
        "bitstream_nonperiodic" | "bitstream_periodic" => "Prop lamp-prop",
        "bs_lambda_nontorsion" | "bs_lambda_torsion" | "bs_center" => "Lemma BS-2",
        "f2z_nontorsion" | "f2z_torsion" => "Example F2xZ",
        "bilinear_nondegenerate" | "bilinear_radical" => "abelian: regular elements form the radical",
        "t_theta_kernel" => "kernel of T_theta",
        "finite_class_search" => "certified finite class",
        "direct_product" => "Prop direct product",
        "wreath_trivial" => "Lemma wreath relK",
        "aperiodic_action" => "Theorem aperiodic",
        "sanov_base" => "Sanov group, relative Kleppner for Z2",
        "central_subgroup_search" => "Remark relK(c)",
        "whole_subgroup" => "relative Kleppner for H = G",
        "class_k_fch" => "Theorem FCH",
        "class_k_bs" => "Prop BS-prop",
        "class_k_f2z" => "Example F2xZ",
        "zwrz" => "Prop propZwrZ",
        "lamplighter" => "Prop lamp-prop",
        "invariant_b" => "Remark invariant-b",
        "zn_by_z" => "Example Zn-by-Z",
        "sanov" => "Sanov proposition: some mu nontorsion",
        "free_powers" => "Powers: free groups of rank >= 2",
        "murphy" => "Theorem Murph",
        "kleppner_necessary" => "C*S(G) and UT(G) are contained in K(G)",
        "sut_relk" => "Corollary sut-relKlep",
        "condition_x_abelian_n" => "condition X with abelian N",
        "coboundary" => "trivial cohomology class",
        _ => "",
    }
}

impl Verdict {
    pub fn certified(rule: &str) -> Verdict {
        Verdict { status: Status::Certified, rule: Some(rule.into()), cite: Some(cite(rule).into()), witness: None, bound: None, note: None }
    }

    pub fn refuted(rule: &str, witness: Option<Element>) -> Verdict {
        Verdict { status: Status::Refuted, rule: Some(rule.into()), cite: Some(cite(rule).into()), witness, bound: None, note: None }
    }

    pub fn inconclusive(bound: u32) -> Verdict {
        Verdict { status: Status::Inconclusive, rule: None, cite: None, witness: None, bound: Some(bound), note: None }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Verdict {
        self.note = Some(note.into());
        self
    }

    pub fn is(&self, s: Status) -> bool {
        self.status == s
    }
}

// ------------------------------------------------------------ periodicity

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Periodicity {
    pub periodic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<u64>,
    /// Why Y_μ has no period, when it has none.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// Whether Y_μ = X_μ ∪ (−X_μ) is periodic. A period m of Y_μ forces m ∉ Y_μ
/// and ε_n = ε_{n+m} = ε_{m−n}, so the minimal eventual period q of X_μ is
/// the only candidate for the minimal period.
pub fn bitstream_periodic(mu: &Bitstream) -> Periodicity {
    let block = &mu.period;
    let len = block.len();
    let q = (1..=len).find(|&d| len.is_multiple_of(d) && (0..len).all(|i| block[i] == block[i % d])).unwrap() as i64;
    let no = |why: String| Periodicity { periodic: false, period: None, reason: Some(why) };
    if let Some(n) = (1..=mu.pre.len() as i64).find(|&n| mu.bit(n) != mu.bit(n + q)) {
        return no(format!("X is not periodic from 1 on: bit {n} differs from bit {}", n + q));
    }
    if mu.bit(q) {
        return no(format!("minimal period {q} lies in X but 0 does not lie in Y"));
    }
    if let Some(n) = (1..q).find(|&n| mu.bit(n) != mu.bit(q - n)) {
        return no(format!("bits {n} and {} differ, so Y is not symmetric mod {q}", q - n));
    }
    Periodicity { periodic: true, period: Some(q as u64), reason: None }
}

// ----------------------------------------------------------------- ICC

/// ICC metadata per family.
pub fn is_icc(f: &Family) -> bool {
    match f {
        Family::Wreath { acting: None, .. } => true,
        Family::ZnSemidirect { a } => is_aperiodic(a),
        Family::Sanov => true,
        Family::Free { rank } => *rank >= 2,
        Family::Product { left, right } => is_icc(left) && is_icc(right),
        _ => false,
    }
}

/// Whether the family lies in the class where Kleppner's condition, the
/// unique trace property and C*-simplicity coincide.
fn class_k_rule(f: &Family) -> Option<&'static str> {
    match f {
        Family::BsNn { .. } => Some("class_k_bs"),
        Family::FreeTimesZ => Some("class_k_f2z"),
        Family::Free { rank: 1 } => Some("class_k_fch"),
        f if f.is_abelian() || f.is_finite() => Some("class_k_fch"),
        _ => None,
    }
}

// ------------------------------------------------------------- Kleppner

/// Kleppner's condition: every nontrivial σ-regular class is infinite.
/// `hints` are tried before the ball search.
pub fn decide_kleppner(sigma: &Cocycle, budget: u32, hints: &[Element]) -> Verdict {
    let group = sigma.group();
    let fam = group.family();
    let rep = sigma.representative();
    let refute = |rule: &str, g: Element| {
        debug_assert!(certificate(sigma, &g).is_some_and(|r| r.is_regular()), "{g}");
        Verdict::refuted(rule, Some(g))
    };

    // family certificates
    match (rep.kind(), fam) {
        (CocycleKind::Product(l, r), Family::Product { .. }) => {
            let (vl, vr) = (decide_kleppner(l, budget, &[]), decide_kleppner(r, budget, &[]));
            let (gl, gr) = group.factors().unwrap();
            return match (vl.status, vr.status) {
                (Status::Certified, Status::Certified) => Verdict::certified("direct_product"),
                (Status::Refuted, _) => Verdict::refuted(
                    "direct_product",
                    vl.witness.map(|w| Element::Pair(Box::new(w), Box::new(gr.identity()))),
                ),
                (_, Status::Refuted) => Verdict::refuted(
                    "direct_product",
                    vr.witness.map(|w| Element::Pair(Box::new(gl.identity()), Box::new(w))),
                ),
                _ => Verdict::inconclusive(budget).with_note("a factor is inconclusive"),
            };
        }
        (CocycleKind::Theta(Theta::PrimeReciprocal), Family::SumZ) => {
            return Verdict::certified("theta_prime_reciprocal")
        }
        (CocycleKind::Theta(t @ Theta::Diag { pre, .. }), Family::SumZ) if t.bandwidth().is_some() => {
            if pre.iter().any(|p| !p.is_torsion()) {
                return Verdict::certified("theta_finite_bandwidth_irrational");
            }
        }
        (CocycleKind::Theta(Theta::Window(w)), Family::SumZ) => {
            let far = w.keys().map(|&(_, k)| k).max().map_or(0, |k| k + 1);
            return refute("theta_window_finite", unit(far));
        }
        (CocycleKind::Bitstream(mu), Family::SumZ2) => {
            let p = bitstream_periodic(mu);
            return match p.period {
                None => Verdict::certified("bitstream_nonperiodic").with_note(p.reason.unwrap_or_default()),
                Some(m) => refute("bitstream_periodic", crate::groups::sparse(&[(0, 1), (m as i64, 1)]))
                    .with_note(format!("Y is periodic with m = {m}")),
            };
        }
        (CocycleKind::Bs { lambda }, Family::BsNn { n }) => {
            return match lambda.order() {
                None => Verdict::certified("bs_lambda_nontorsion"),
                Some(q) => {
                    // b^{cn} is regular iff cnλ = 0; take the least c
                    let c = (&q / q.gcd(&BigInt::from(*n))).to_i64().expect("small order");
                    refute("bs_lambda_torsion", Subgroup::Center.embed(group, &Element::Vector(vec![c])))
                }
            };
        }
        (CocycleKind::FreeTimesZ { mu, nu }, Family::FreeTimesZ) => {
            return match (mu.order(), nu.order()) {
                (Some(a), Some(b)) => {
                    let m = a.lcm(&b).to_i64().expect("small order");
                    refute("f2z_torsion", Element::FreeZ { w: vec![], m })
                }
                _ => Verdict::certified("f2z_nontorsion"),
            };
        }
        (_, Family::Zn { .. }) => {
            let rad = zn_radical(rep).expect("zn family");
            return match rad.first() {
                None => Verdict::certified("bilinear_nondegenerate"),
                Some(v) => refute("bilinear_radical", Element::Vector(v.clone())),
            };
        }
        _ => {}
    }
    if is_icc(fam) {
        return Verdict::certified("icc");
    }
    if fam.is_finite() {
        return decide_finite(sigma);
    }
    if budget == 0 {
        return Verdict::inconclusive(0).with_note("search disabled");
    }

    // refutation search
    for h in hints {
        if group.contains(h) && !group.is_identity(h) && group.class_certified_finite(h)
            && certificate(sigma, h).is_some_and(|r| r.is_regular()) {
                return Verdict::refuted("finite_class_search", Some(h.clone())).with_note("hint");
            }
    }
    if matches!((rep.kind(), fam), (CocycleKind::Theta(_), Family::SumZ)) {
        let w = i64::from(budget.min(4));
        if let Ok(r) = regular_subgroup_generators(sigma, w, w) {
            if let Some(g) = r.generators.first() {
                return refute("t_theta_kernel", g.clone());
            }
        }
    }
    let ball = match group.ball(budget) {
        Ok(b) => b,
        Err(e) => return Verdict::inconclusive(budget).with_note(e.to_string()),
    };
    for g in ball.iter() {
        if group.is_identity(g) || !group.class_certified_finite(g) {
            continue;
        }
        if certificate(sigma, g).is_some_and(|r| r.is_regular()) {
            return Verdict::refuted("finite_class_search", Some(g.clone()));
        }
    }
    Verdict::inconclusive(budget)
}

/// Finite groups: Kleppner holds iff no nontrivial element is σ-regular.
fn decide_finite(sigma: &Cocycle) -> Verdict {
    let group = sigma.group();
    let elems = match group.elements() {
        Ok(e) => e,
        Err(e) => return Verdict::inconclusive(0).with_note(e.to_string()),
    };
    for g in elems.iter().filter(|g| !group.is_identity(g)) {
        let regular = match certificate(sigma, g) {
            Some(r) => r.is_regular(),
            None => elems.iter().all(|h| !group.commutes(g, h) || sigma.antisym(g, h).is_zero()),
        };
        if regular {
            return Verdict::refuted("finite_exhaustive", Some(g.clone()));
        }
    }
    Verdict::certified("finite_exhaustive")
}

// ---------------------------------------------------- relative Kleppner

/// Relative Kleppner condition for (G, H, σ).
pub fn decide_relative_kleppner(sigma: &Cocycle, sub: Subgroup, budget: u32) -> Result<Verdict> {
    let group = sigma.group();
    sub.check(group)?;
    let fam = group.family();
    let rep = sigma.representative();
    let trivial = matches!(rep.kind(), CocycleKind::Trivial | CocycleKind::Coboundary(_));
    match (fam, sub) {
        (_, Subgroup::Whole) => {
            let mut v = decide_kleppner(sigma, budget, &[]);
            v.note = Some("H = G".into());
            return Ok(v);
        }
        (Family::Wreath { base, acting }, Subgroup::Base) if trivial => {
            if *base == LampBase::Z || acting.is_none() {
                return Ok(Verdict::certified("wreath_trivial"));
            }
            let shift = Element::Wreath { lamps: Default::default(), shift: 1 };
            return Ok(Verdict::refuted("wreath_trivial", Some(shift)));
        }
        (Family::Wreath { acting: None, .. }, Subgroup::Base) => return Ok(Verdict::certified("aperiodic_action")),
        (Family::ZnSemidirect { a }, Subgroup::Base) if is_aperiodic(a) => {
            return Ok(Verdict::certified("aperiodic_action"))
        }
        (Family::Sanov, Subgroup::Base) => return Ok(Verdict::certified("sanov_base")),
        (Family::BsNn { n }, Subgroup::Center) => {
            if let CocycleKind::Bs { lambda } = rep.kind() {
                return Ok(match lambda.order() {
                    None => Verdict::certified("bs_center"),
                    Some(q) => {
                        let m = (&q / q.gcd(&BigInt::from(*n))).to_i64().expect("small order");
                        let g = group.word(&vec!["a"; m as usize].join(" ")).expect("word");
                        Verdict::refuted("bs_center", Some(g))
                    }
                });
            }
        }
        _ => {}
    }
    if budget == 0 {
        return Ok(Verdict::inconclusive(0).with_note("search disabled"));
    }
    // C_H(g) is finite when H is central or G is finite
    let finite_classes = sub.is_central(group) || fam.is_finite();
    if !finite_classes {
        return Ok(Verdict::inconclusive(budget).with_note("no rule certifies finite H-classes"));
    }
    let ball = match group.ball(budget) {
        Ok(b) => b,
        Err(e) => return Ok(Verdict::inconclusive(budget).with_note(e.to_string())),
    };
    for g in ball.iter().filter(|g| !sub.contains(group, g)) {
        if is_regular_wrt_subgroup(sigma, g, sub, budget)?.is_regular() {
            return Ok(Verdict::refuted("central_subgroup_search", Some(g.clone())));
        }
    }
    Ok(Verdict::inconclusive(budget))
}

// ----------------------------------------------------------- condition X

#[derive(Clone, Debug, Serialize)]
pub struct ConditionX {
    #[serde(flatten)]
    pub verdict: Verdict,
    /// Nontrivial h ∈ N for which a commuting witness g was found.
    pub checked: usize,
}

/// Whether (i) FC(G) ⊆ N and (ii) G/N is FC-hypercentral are known.
fn condition_x_metadata(group: &Group, sub: Subgroup) -> bool {
    match (group.family(), sub) {
        (_, Subgroup::Whole) => true,
        (Family::Wreath { acting: None, .. }, Subgroup::Base) => true,
        (Family::ZnSemidirect { a }, Subgroup::Base) => is_aperiodic(a),
        _ => false,
    }
}

/// Clause (iii): every nontrivial h ∈ N has g with hg = gh and
/// σ(h,g) ≠ σ(g,h).
pub fn check_condition_x(sigma: &Cocycle, sub: Subgroup, budget: u32) -> Result<ConditionX> {
    let group = sigma.group();
    sub.check(group)?;
    if !condition_x_metadata(group, sub) {
        return Err(Error::Config(format!(
            "no metadata for FC(G) ⊆ N and G/N FC-hypercentral with N = {} in {}",
            sub.name(),
            group.name()
        )));
    }
    if sub == Subgroup::Whole && group.family().is_abelian() {
        let v = decide_kleppner(sigma, budget, &[]);
        return Ok(ConditionX { verdict: v.with_note("N = G abelian: clause (iii) is Kleppner's condition"), checked: 0 });
    }
    let rep = sigma.representative();
    let trivial = matches!(rep.kind(), CocycleKind::Trivial | CocycleKind::Coboundary(_));
    let elems = match sub.ball(group, budget) {
        Ok(e) => e,
        Err(e) => return Ok(ConditionX { verdict: Verdict::inconclusive(budget).with_note(e.to_string()), checked: 0 }),
    };
    let nontrivial: Vec<&Element> = elems.iter().filter(|h| !group.is_identity(h)).collect();
    if trivial {
        return Ok(ConditionX {
            verdict: Verdict::refuted("coboundary", nontrivial.first().map(|h| (*h).clone())),
            checked: 0,
        });
    }
    // Kleppner for the restriction to an abelian N puts the witnesses in N.
    let restricted_ok = sigma
        .restrict(sub)
        .ok()
        .filter(|s| s.group().family().is_abelian())
        .map(|s| decide_kleppner(&s, 0, &[]).is(Status::Certified))
        .unwrap_or(false);
    let ball = match group.ball(budget) {
        Ok(b) => b,
        Err(e) => return Ok(ConditionX { verdict: Verdict::inconclusive(budget).with_note(e.to_string()), checked: 0 }),
    };
    let mut checked = 0;
    for h in &nontrivial {
        let found = ball.iter().any(|g| group.commutes(h, g) && !sigma.antisym(h, g).is_zero());
        if !found {
            let mut v = Verdict::inconclusive(budget).with_note("no commuting witness within the search radius");
            v.witness = Some((*h).clone());
            return Ok(ConditionX { verdict: v, checked });
        }
        checked += 1;
    }
    let verdict = if restricted_ok {
        Verdict::certified("condition_x_abelian_n")
    } else {
        Verdict::inconclusive(budget).with_note(format!("witnesses found for all {checked} elements checked"))
    };
    Ok(ConditionX { verdict, checked })
}

// -------------------------------------------------------------- classify

#[derive(Clone, Debug, Serialize)]
pub struct TraceEntry {
    pub property: String,
    pub status: Status,
    pub rule: String,
    pub cite: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub kleppner: Verdict,
    pub unique_trace: Verdict,
    pub cstar_simple: Verdict,
    pub trace: Vec<TraceEntry>,
}

impl PropertyReport {
    fn set(&mut self, property: &str, v: Verdict) {
        self.trace.push(TraceEntry {
            property: property.into(),
            status: v.status,
            rule: v.rule.clone().unwrap_or_default(),
            cite: v.cite.clone().unwrap_or_default(),
        });
        match property {
            "kleppner" => self.kleppner = v,
            "unique_trace" => self.unique_trace = v,
            _ => self.cstar_simple = v,
        }
    }

    pub fn all_inconclusive(&self) -> bool {
        [&self.kleppner, &self.unique_trace, &self.cstar_simple].iter().all(|v| v.is(Status::Inconclusive))
    }
}

fn from_status(s: Status, rule: &str, witness: Option<Element>, budget: u32) -> Verdict {
    match s {
        Status::Certified => Verdict::certified(rule),
        Status::Refuted => Verdict::refuted(rule, witness),
        Status::Inconclusive => Verdict::inconclusive(budget),
    }
}

fn combine(a: Status, b: Status) -> Status {
    match (a, b) {
        (Status::Certified, Status::Certified) => Status::Certified,
        (Status::Refuted, _) | (_, Status::Refuted) => Status::Refuted,
        _ => Status::Inconclusive,
    }
}

/// Chains the encoded theorems into verdicts for Kleppner's condition, the
/// unique trace property and C*-simplicity.
pub fn classify(sigma: &Cocycle, budget: u32) -> PropertyReport {
    let group = sigma.group();
    let fam = group.family();
    let rep = sigma.representative();
    let mut report = PropertyReport {
        kleppner: Verdict::inconclusive(budget),
        unique_trace: Verdict::inconclusive(budget),
        cstar_simple: Verdict::inconclusive(budget),
        trace: Vec::new(),
    };
    let k = decide_kleppner(sigma, budget, &[]);
    let ks = k.status;
    let kw = k.witness.clone();
    report.set("kleppner", k);

    let pending = |r: &PropertyReport| r.unique_trace.is(Status::Inconclusive) || r.cstar_simple.is(Status::Inconclusive);

    if let Some(rule) = class_k_rule(fam) {
        report.set("unique_trace", from_status(ks, rule, kw.clone(), budget));
        report.set("cstar_simple", from_status(ks, rule, kw.clone(), budget));
    }

    if pending(&report) {
        match (rep.kind(), fam) {
            (CocycleKind::Product(l, r), Family::Product { .. }) => {
                let (a, b) = (classify(l, budget), classify(r, budget));
                report.set("unique_trace", from_status(combine(a.unique_trace.status, b.unique_trace.status), "direct_product", None, budget));
                report.set("cstar_simple", from_status(combine(a.cstar_simple.status, b.cstar_simple.status), "direct_product", None, budget));
            }
            (CocycleKind::Lift(base), Family::Wreath { base: LampBase::Z, acting: None }) => {
                let bk = decide_kleppner(base, budget, &[]);
                report.set("unique_trace", from_status(bk.status, "zwrz", bk.witness.clone(), budget));
                if bk.is(Status::Certified) {
                    report.set("cstar_simple", Verdict::certified("zwrz"));
                }
            }
            (CocycleKind::Lift(base), Family::Wreath { base: LampBase::Z2, acting: None }) => {
                if let CocycleKind::Bitstream(mu) = base.kind() {
                    let p = bitstream_periodic(mu);
                    match p.period {
                        None => {
                            report.set("unique_trace", Verdict::certified("lamplighter"));
                            report.set("cstar_simple", Verdict::certified("lamplighter"));
                        }
                        Some(m) => {
                            report.set("unique_trace", Verdict::refuted("lamplighter", None).with_note(format!("Y is periodic with m = {m}")));
                            if *mu == Bitstream::new(vec![], vec![true, false]).unwrap() {
                                report.set("cstar_simple", Verdict::refuted("invariant_b", None));
                            }
                        }
                    }
                }
            }
            (CocycleKind::Lift(base), Family::ZnSemidirect { a }) if is_aperiodic(a) => {
                let bk = decide_kleppner(base, budget, &[]);
                report.set("unique_trace", from_status(bk.status, "zn_by_z", bk.witness.clone(), budget));
                report.set("cstar_simple", from_status(bk.status, "zn_by_z", bk.witness, budget));
            }
            (CocycleKind::Sanov { mu0, mu1, mu2 }, Family::Sanov) => {
                let any = [mu0, mu1, mu2].iter().any(|m| !m.is_torsion());
                let s = if any { Status::Certified } else { Status::Refuted };
                report.set("unique_trace", from_status(s, "sanov", None, budget));
                report.set("cstar_simple", from_status(s, "sanov", None, budget));
            }
            (_, Family::Free { rank }) if *rank >= 2 => {
                report.set("unique_trace", Verdict::certified("free_powers"));
                report.set("cstar_simple", Verdict::certified("free_powers"));
            }
            _ => {}
        }
    }

    // UT via a subgroup H with the relative Kleppner condition
    if report.unique_trace.is(Status::Inconclusive) {
        for sub in [Subgroup::Base, Subgroup::Center] {
            if sub.check(group).is_err() || sub.own_group(group).is_none() {
                continue;
            }
            let Ok(restricted) = sigma.restrict(sub) else { continue };
            let rel = decide_relative_kleppner(sigma, sub, budget).ok();
            if rel.is_some_and(|v| v.is(Status::Certified))
                && classify(&restricted, budget).unique_trace.is(Status::Certified)
            {
                report.set("unique_trace", Verdict::certified("sut_relk"));
                break;
            }
        }
    }

    if report.kleppner.is(Status::Refuted) {
        let w = report.kleppner.witness.clone();
        for p in ["unique_trace", "cstar_simple"] {
            let v = if p == "unique_trace" { &report.unique_trace } else { &report.cstar_simple };
            assert!(!v.is(Status::Certified), "{p} certified alongside a refuted Kleppner condition");
            if v.is(Status::Inconclusive) {
                report.set(p, Verdict::refuted("kleppner_necessary", w.clone()));
            }
        }
    }
    if fam.is_amenable() && report.unique_trace.is(Status::Certified) && report.cstar_simple.is(Status::Inconclusive) {
        report.set("cstar_simple", Verdict::certified("murphy"));
    }
    if report.kleppner.is(Status::Inconclusive)
        && (report.unique_trace.is(Status::Certified) || report.cstar_simple.is(Status::Certified))
    {
        report.set("kleppner", Verdict::certified("kleppner_necessary"));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycles::{build_cocycle, CocycleSpec};
    use crate::groups::sparse;
    use crate::regularity::is_sigma_regular;

    fn grp(f: Family) -> Group {
        Group::new(f).unwrap()
    }

    fn cocycle(g: &Group, json: &str) -> Cocycle {
        let spec: CocycleSpec = serde_json::from_str(json).unwrap();
        build_cocycle(g, &spec, "cocycle").unwrap()
    }

    fn bits(pre: &[u8], period: &[u8]) -> Bitstream {
        Bitstream::new(pre.iter().map(|&b| b == 1).collect(), period.iter().map(|&b| b == 1).collect()).unwrap()
    }

    #[test]
    fn periodicity_examples() {
        assert!(!bitstream_periodic(&bits(&[1], &[0])).periodic);
        assert_eq!(bitstream_periodic(&bits(&[], &[1, 0])).period, Some(2));
        assert!(!bitstream_periodic(&bits(&[], &[0, 1])).periodic);
        assert_eq!(bitstream_periodic(&bits(&[], &[0])).period, Some(1));
        // {1,2} ∪ 3ℕ+{1,2}: Y = ℤ∖3ℤ, period 3
        assert_eq!(bitstream_periodic(&bits(&[1, 1, 0], &[1, 1, 0])).period, Some(3));
    }

    /// Y periodic with period m ⇔ indicator of Y on a long window is
    /// m-periodic; brute force over short streams.
    #[test]
    fn periodicity_brute_force() {
        for pre_len in 0..3 {
            for per_len in 1..4 {
                for mask in 0..(1u32 << (pre_len + per_len)) {
                    let all: Vec<u8> = (0..pre_len + per_len).map(|i| ((mask >> i) & 1) as u8).collect();
                    let mu = bits(&all[..pre_len], &all[pre_len..]);
                    let y = |z: i64| z != 0 && mu.bit(z.abs());
                    let brute = (1..=12).find(|&m| (-40..40).all(|z| y(z) == y(z + m)));
                    assert_eq!(bitstream_periodic(&mu).period, brute.map(|m| m as u64), "{mu:?}");
                }
            }
        }
    }

    #[test]
    fn kleppner_bs_torsion() {
        let g = grp(Family::BsNn { n: 2 });
        let v = decide_kleppner(&cocycle(&g, r#"{"kind":"bs","lambda":{"rat":[1,3]}}"#), 3, &[]);
        assert_eq!(v.status, Status::Refuted);
        assert_eq!(v.witness, Some(g.word("b b b b b b").unwrap()));
    }

    #[test]
    fn kleppner_trivial_sum() {
        let g = grp(Family::SumZ);
        let v = decide_kleppner(&Cocycle::trivial(&g), 2, &[]);
        assert_eq!(v.status, Status::Refuted);
        assert_eq!(v.witness, Some(unit(0)));
        let zero = cocycle(&g, r#"{"kind":"theta_diag","diagonals":[{"rat":[0,1]}]}"#);
        assert_eq!(decide_kleppner(&zero, 2, &[]).witness, Some(unit(0)));
    }

    #[test]
    fn kleppner_lamplighter_base() {
        let g = grp(Family::SumZ2);
        let v = decide_kleppner(&cocycle(&g, r#"{"kind":"bitstream","pre":[1],"period":[0]}"#), 2, &[]);
        assert_eq!(v.status, Status::Certified);
        let s = cocycle(&g, r#"{"kind":"bitstream","pre":[],"period":[1,0]}"#);
        let v = decide_kleppner(&s, 2, &[]);
        assert_eq!(v.witness, Some(sparse(&[(0, 1), (2, 1)])));
        assert!(is_sigma_regular(&s, v.witness.as_ref().unwrap(), 0).unwrap().is_regular());
    }

    #[test]
    fn relative_examples() {
        let f = grp(Family::Wreath { base: LampBase::Z2, acting: Some(3) });
        assert_eq!(decide_relative_kleppner(&Cocycle::trivial(&f), Subgroup::Base, 2).unwrap().status, Status::Refuted);
        let w = grp(Family::Wreath { base: LampBase::Z2, acting: None });
        let s = cocycle(&w, r#"{"kind":"lift","base":{"kind":"bitstream","pre":[],"period":[1,0]}}"#);
        assert_eq!(decide_relative_kleppner(&s, Subgroup::Base, 2).unwrap().status, Status::Certified);
        let bs = grp(Family::BsNn { n: 2 });
        let v = decide_relative_kleppner(&cocycle(&bs, r#"{"kind":"bs","lambda":{"rat":[1,3]}}"#), Subgroup::Center, 2).unwrap();
        assert_eq!(v.witness, Some(bs.word("a a a").unwrap()));
        assert!(decide_relative_kleppner(&Cocycle::trivial(&bs), Subgroup::Base, 2).is_err());
    }

    #[test]
    fn relative_search_on_central_h() {
        let g = grp(Family::FreeTimesZ);
        let s = cocycle(&g, r#"{"kind":"free_times_z","mu":{"irr":{"m":[1,1]}},"nu":{"rat":[0,1]}}"#);
        let v = decide_relative_kleppner(&s, Subgroup::Center, 2).unwrap();
        assert_eq!(v.status, Status::Refuted);
        let w = v.witness.unwrap();
        assert!(is_regular_wrt_subgroup(&s, &w, Subgroup::Center, 3).unwrap().is_regular());
    }

    #[test]
    fn condition_x() {
        let g = grp(Family::ZnSemidirect { a: vec![vec![2, 1], vec![1, 1]] });
        let s = cocycle(&g, r#"{"kind":"lift","base":{"kind":"sigma0","mu0":{"irr":{"t":[1,1]}}}}"#);
        let r = check_condition_x(&s, Subgroup::Base, 2).unwrap();
        assert_eq!(r.verdict.status, Status::Certified);
        assert!(r.checked > 0);
        let r = check_condition_x(&Cocycle::trivial(&g), Subgroup::Base, 2).unwrap();
        assert_eq!(r.verdict.status, Status::Refuted);
        let sv = grp(Family::Sanov);
        assert!(check_condition_x(&Cocycle::trivial(&sv), Subgroup::Base, 2).is_err());
    }

    #[test]
    fn classify_examples() {
        let w = grp(Family::Wreath { base: LampBase::Z, acting: None });
        let s = cocycle(&w, r#"{"kind":"lift","base":{"kind":"theta_rule","rule":"prime_reciprocal"}}"#);
        let r = classify(&s, 2);
        assert!([r.kleppner.status, r.unique_trace.status, r.cstar_simple.status].iter().all(|&x| x == Status::Certified));

        let sv = grp(Family::Sanov);
        let s = cocycle(&sv, r#"{"kind":"sanov","mu0":{"rat":[1,3]},"mu1":{"rat":[1,2]},"mu2":{"rat":[0,1]}}"#);
        let r = classify(&s, 2);
        assert_eq!((r.kleppner.status, r.unique_trace.status, r.cstar_simple.status), (Status::Certified, Status::Refuted, Status::Refuted));

        let bs = grp(Family::BsNn { n: 2 });
        let r = classify(&cocycle(&bs, r#"{"kind":"bs","lambda":{"irr":{"l":[1,1]}}}"#), 2);
        assert!([r.kleppner.status, r.unique_trace.status, r.cstar_simple.status].iter().all(|&x| x == Status::Certified));
        assert_eq!(r.kleppner.cite.as_deref(), Some("Lemma BS-2"));
    }

    #[test]
    fn classify_never_contradicts_kleppner() {
        let families = [
            Family::SumZ,
            Family::Zn { n: 2 },
            Family::BsNn { n: 3 },
            Family::FreeTimesZ,
            Family::Free { rank: 2 },
            Family::Wreath { base: LampBase::Z2, acting: Some(2) },
        ];
        for f in families {
            let r = classify(&Cocycle::trivial(&grp(f)), 2);
            if r.kleppner.is(Status::Refuted) {
                assert!(!r.unique_trace.is(Status::Certified) && !r.cstar_simple.is(Status::Certified));
            }
        }
    }

    #[test]
    fn kleppner_monotone_in_budget() {
        let g = grp(Family::Zn { n: 3 });
        let s = Cocycle::trivial(&g);
        let a = decide_kleppner(&s, 1, &[]);
        let b = decide_kleppner(&s, 3, &[]);
        assert_eq!(a.status, Status::Refuted);
        assert_eq!(a, b);
    }
}
