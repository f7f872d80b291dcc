//! σ-regularity: absolute, relative to a subgroup and relative to (k,H).

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cocycles::{nth_prime, Bitstream, Cocycle, CocycleKind, Theta};
use crate::groups::{word_root, Element, Family, Group, Subgroup};
use crate::lattice::{gf2_basis, gf2_kernel, gf2_reduce, hnf, in_lattice, kernel_basis, IVec};
use crate::phase::Phase;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RegStatus {
    /// Certified by the named rule.
    Regular { rule: String },
    /// `witness` commutes with the subject and σ(g,h) ≠ σ(h,g).
    NotRegular { witness: Element, forward: Phase, backward: Phase },
    NoWitnessUpTo { radius: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityReport {
    pub subject: Element,
    #[serde(flatten)]
    pub verdict: RegStatus,
}

impl RegularityReport {
    pub fn is_regular(&self) -> bool {
        matches!(self.verdict, RegStatus::Regular { .. })
    }

    pub fn is_not_regular(&self) -> bool {
        matches!(self.verdict, RegStatus::NotRegular { .. })
    }

    pub fn witness(&self) -> Option<&Element> {
        match &self.verdict {
            RegStatus::NotRegular { witness, .. } => Some(witness),
            _ => None,
        }
    }
}

fn regular(g: &Element, rule: &str) -> RegularityReport {
    RegularityReport { subject: g.clone(), verdict: RegStatus::Regular { rule: rule.into() } }
}

fn not_regular(sigma: &Cocycle, g: &Element, h: Element) -> RegularityReport {
    let (forward, backward) = (sigma.eval(g, &h), sigma.eval(&h, g));
    debug_assert!(forward != backward && sigma.group().commutes(g, &h));
    RegularityReport { subject: g.clone(), verdict: RegStatus::NotRegular { witness: h, forward, backward } }
}

// ------------------------------------------------------------ T_θ image

/// Rows of (θ − θ*)x, with a flag telling whether they cover every row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThetaImage {
    pub rows: Vec<(i64, Phase)>,
    pub certified: bool,
}

impl ThetaImage {
    pub fn all_zero(&self) -> bool {
        self.rows.iter().all(|(_, p)| p.is_zero())
    }

    pub fn first_nonzero(&self) -> Option<i64> {
        self.rows.iter().find(|(_, p)| !p.is_zero()).map(|(k, _)| *k)
    }
}

fn support_range(x: &BTreeMap<i64, i64>) -> Option<(i64, i64)> {
    Some((*x.keys().next()?, *x.keys().next_back()?))
}

/// Row indices outside which every row of T_θ x repeats an included row or
/// vanishes, when such a finite set exists.
fn certifying_rows(theta: &Theta, x: &BTreeMap<i64, i64>) -> Option<BTreeSet<i64>> {
    let Some((lo, hi)) = support_range(x) else {
        return Some(BTreeSet::new());
    };
    match theta {
        Theta::Window(w) => Some(w.keys().flat_map(|&(j, k)| [j, k]).chain(lo..=hi).collect()),
        _ => theta.certifying_reach().map(|r| (lo - r..=hi + r).collect()),
    }
}

/// The phases e_k*(θ − θ*)x. Without a window the rows are chosen to cover
/// every constraint; prime-reciprocal θ then needs an explicit window.
pub fn t_theta_image(theta: &Theta, x: &BTreeMap<i64, i64>, window: Option<RangeInclusive<i64>>) -> Result<ThetaImage> {
    let cover = certifying_rows(theta, x);
    let (rows, certified): (Vec<i64>, bool) = match (window, cover) {
        (Some(w), Some(c)) => {
            let certified = c.iter().all(|k| w.contains(k));
            (w.collect(), certified)
        }
        (Some(w), None) => (w.collect(), x.is_empty()),
        (None, Some(c)) => (c.into_iter().collect(), true),
        (None, None) => {
            return Err(Error::Config("θ has infinitely many nonzero diagonals; give an explicit row window".into()))
        }
    };
    Ok(ThetaImage { rows: rows.into_iter().map(|k| (k, theta.row(k, x))).collect(), certified })
}

/// Same for a bitstream cocycle on ⊕ℤ₂; always certified.
pub fn bitstream_image(mu: &Bitstream, x: &BTreeMap<i64, i64>) -> ThetaImage {
    let rows = match support_range(x) {
        Some((lo, hi)) => (lo - mu.reach()..=hi + mu.reach()).map(|k| (k, mu.row(k, x))).collect(),
        None => Vec::new(),
    };
    ThetaImage { rows, certified: true }
}

/// For prime-reciprocal θ and x ≠ 0: the index m = max supp(x) + n, where
/// p_n > Σ|x_j|. Row m is Σ x_j / p_{m−j} with distinct primes exceeding
/// every |x_j|, hence nonzero mod 1.
pub fn prime_reciprocal_witness(x: &BTreeMap<i64, i64>) -> Option<i64> {
    let (_, hi) = support_range(x)?;
    let l1: i64 = x.values().map(|v| v.abs()).sum();
    let n = (1..).find(|&n| nth_prime(n) as i64 > l1).unwrap();
    Some(hi + n as i64)
}

// ----------------------------------------------------------- certificates

/// Exact decision when a structural rule applies.
pub fn certificate(sigma: &Cocycle, g: &Element) -> Option<RegularityReport> {
    let group = sigma.group();
    if group.is_identity(g) {
        return Some(regular(g, "identity"));
    }
    // σ and σ − ∂b agree on commuting pairs up to ∂b(g,h) − ∂b(h,g) = 0.
    let rep = sigma.representative();
    match (rep.kind(), g) {
        (CocycleKind::Trivial | CocycleKind::Coboundary(_), _) => Some(regular(g, "coboundary")),
        (CocycleKind::Theta(Theta::PrimeReciprocal), Element::Sum(x)) => {
            let m = prime_reciprocal_witness(x)?;
            Some(not_regular(sigma, g, Element::Sum(BTreeMap::from([(m, 1)]))))
        }
        (CocycleKind::Theta(t), Element::Sum(x)) => {
            let img = t_theta_image(t, x, None).ok()?;
            Some(match img.first_nonzero() {
                None => regular(g, "t_theta_kernel"),
                Some(k) => not_regular(sigma, g, Element::Sum(BTreeMap::from([(k, 1)]))),
            })
        }
        (CocycleKind::Bitstream(mu), Element::Sum(x)) => Some(match bitstream_image(mu, x).first_nonzero() {
            None => regular(g, "t_theta_kernel"),
            Some(k) => not_regular(sigma, g, Element::Sum(BTreeMap::from([(k, 1)]))),
        }),
        (CocycleKind::ZnBilinear(_) | CocycleKind::Sigma0(_), Element::Vector(v)) => {
            // antisymmetric bilinear form: test on a basis
            for i in 0..v.len() {
                let mut e = vec![0; v.len()];
                e[i] = 1;
                let h = Element::Vector(e);
                if !rep.antisym(g, &h).is_zero() {
                    return Some(not_regular(sigma, g, h));
                }
            }
            Some(regular(g, "bilinear_radical"))
        }
        (CocycleKind::Bs { .. }, _) if group.is_central(g) => {
            // σ(g,h) − σ(h,g) = λ·φ_b(g)·φ_a(h) for central g; test h = a.
            let a = group.word("a").expect("generator");
            Some(if rep.antisym(g, &a).is_zero() { regular(g, "bs_central_lambda") } else { not_regular(sigma, g, a) })
        }
        (CocycleKind::FreeTimesZ { .. }, Element::FreeZ { w, .. }) => {
            // C(g) = ⟨(r,0), (e,1)⟩ for w ≠ e, the whole group for w = e;
            // the antisymmetric form is bilinear on it.
            let mut tests = vec![Element::FreeZ { w: vec![], m: 1 }];
            if w.is_empty() {
                tests.push(Element::FreeZ { w: vec![1], m: 0 });
                tests.push(Element::FreeZ { w: vec![2], m: 0 });
            } else {
                tests.push(Element::FreeZ { w: word_root(w).0, m: 0 });
            }
            for h in tests {
                if !rep.antisym(g, &h).is_zero() {
                    return Some(not_regular(sigma, g, h));
                }
            }
            Some(regular(g, "free_times_z_centralizer"))
        }
        (CocycleKind::Product(l, r), Element::Pair(a, b)) => {
            let (ra, rb) = (certificate(l, a)?, certificate(r, b)?);
            let (lg, rg) = group.factors().expect("product");
            Some(match (&ra.verdict, &rb.verdict) {
                (RegStatus::NotRegular { witness, .. }, _) => {
                    not_regular(sigma, g, Element::Pair(Box::new(witness.clone()), Box::new(rg.identity())))
                }
                (_, RegStatus::NotRegular { witness, .. }) => {
                    not_regular(sigma, g, Element::Pair(Box::new(lg.identity()), Box::new(witness.clone())))
                }
                _ => regular(g, "product_components"),
            })
        }
        _ => None,
    }
}

fn search(sigma: &Cocycle, g: &Element, candidates: Vec<Element>, radius: u32) -> RegularityReport {
    let group = sigma.group();
    for h in candidates {
        if group.commutes(g, &h) && !sigma.antisym(g, &h).is_zero() {
            return not_regular(sigma, g, h);
        }
    }
    RegularityReport { subject: g.clone(), verdict: RegStatus::NoWitnessUpTo { radius } }
}

/// Is `g` σ-regular? Certificates are tried first; otherwise the commuting
/// part of ball(R) is searched for a witness, which can only refute.
pub fn is_sigma_regular(sigma: &Cocycle, g: &Element, radius: u32) -> Result<RegularityReport> {
    if !sigma.group().contains(g) {
        return Err(Error::FamilyMismatch(format!("{g} is not in {}", sigma.group().name())));
    }
    if let Some(r) = certificate(sigma, g) {
        return Ok(r);
    }
    Ok(search(sigma, g, sigma.group().ball(radius)?.elements, radius))
}

/// Regularity of `g` with respect to the subgroup H: only commuting h ∈ H
/// count.
pub fn is_regular_wrt_subgroup(sigma: &Cocycle, g: &Element, sub: Subgroup, radius: u32) -> Result<RegularityReport> {
    let group = sigma.group();
    sub.check(group)?;
    if !group.contains(g) {
        return Err(Error::FamilyMismatch(format!("{g} is not in {}", group.name())));
    }
    match sub {
        Subgroup::Whole => return is_sigma_regular(sigma, g, radius),
        Subgroup::Trivial => return Ok(regular(g, "trivial_subgroup")),
        Subgroup::Center if group.family().is_abelian() => return is_sigma_regular(sigma, g, radius),
        _ => {}
    }
    if group.is_identity(g) {
        return Ok(regular(g, "identity"));
    }
    let rep = sigma.representative();
    match (rep.kind(), group.family(), sub) {
        (CocycleKind::Trivial | CocycleKind::Coboundary(_), ..) => return Ok(regular(g, "coboundary")),
        (CocycleKind::Bs { .. }, Family::BsNn { .. }, Subgroup::Center) => {
            // the form is additive in the central exponent; h = bⁿ decides
            let h = Subgroup::Center.embed(group, &Element::Vector(vec![1]));
            return Ok(if rep.antisym(g, &h).is_zero() {
                regular(g, "bs_center_lambda")
            } else {
                not_regular(sigma, g, h)
            });
        }
        (CocycleKind::FreeTimesZ { .. }, Family::FreeTimesZ, Subgroup::Center) => {
            let h = Element::FreeZ { w: vec![], m: 1 };
            return Ok(if rep.antisym(g, &h).is_zero() {
                regular(g, "free_times_z_center")
            } else {
                not_regular(sigma, g, h)
            });
        }
        _ => {}
    }
    Ok(search(sigma, g, sub.ball(group, radius)?, radius))
}

/// C_H^k(t) ∩ {s ∈ H-ball(R)}: the elements (k s k⁻¹) t s⁻¹.
pub fn relative_class_partial(group: &Group, k: &Element, t: &Element, sub: Subgroup, radius: u32) -> Result<Vec<Element>> {
    sub.check(group)?;
    if !sub.contains(group, t) {
        return Err(Error::Invalid(format!("{t} is not in the {} subgroup", sub.name())));
    }
    let mut seen = HashSet::new();
    Ok(sub
        .ball(group, radius)?
        .into_iter()
        .map(|s| group.mul(&group.mul(&group.conjugate(k, &s), t), &group.invert(&s)))
        .filter(|x| seen.insert(x.clone()))
        .collect())
}

/// t is σ-regular w.r.t. (k,H) iff k⁻¹t is σ-regular w.r.t. H.
pub fn is_regular_wrt_kh(sigma: &Cocycle, k: &Element, t: &Element, sub: Subgroup, radius: u32) -> Result<RegularityReport> {
    let group = sigma.group();
    let x = group.mul(&group.invert(k), t);
    let mut r = is_regular_wrt_subgroup(sigma, &x, sub, radius)?;
    r.subject = t.clone();
    Ok(r)
}

// ------------------------------------------------- regular subgroup of ⊕

/// Generators of the σ-regular vectors with support in [−W,W] and entries
/// bounded by B.
#[derive(Clone, Debug, Serialize)]
pub struct GeneratorReport {
    pub generators: Vec<Element>,
    /// The generators span every regular vector supported in the window.
    pub complete: bool,
    pub rank: usize,
}

/// Integer constraints Σ_j x_j c_j ≡ 0 mod 1 from one row of phases:
/// one equation per irrational symbol, and one with a slack column for the
/// rational part, returned as (rows, slack row).
fn phase_constraints(coeffs: &[Phase]) -> (Vec<IVec>, Option<IVec>) {
    let symbols: BTreeSet<&String> = coeffs.iter().flat_map(|c| c.irr_coeffs().keys()).collect();
    let scale = |vals: Vec<num_rational::BigRational>| -> (IVec, BigInt) {
        let d = vals.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        (vals.iter().map(|v| (v * num_rational::BigRational::from_integer(d.clone())).to_integer()).collect(), d)
    };
    let mut rows = Vec::new();
    for s in symbols {
        let vals = coeffs.iter().map(|c| c.irr_coeffs().get(s).cloned().unwrap_or_default()).collect();
        rows.push(scale(vals).0);
    }
    let (mut r, d) = scale(coeffs.iter().map(|c| c.rational_part().clone()).collect());
    let slack = if r.iter().all(Zero::is_zero) {
        None
    } else {
        r.push(-d);
        Some(r)
    };
    (rows, slack)
}

/// HNF basis of {x ∈ ℤⁿ : Σ_j x_j c_{kj} ≡ 0 mod 1 for every row k}.
fn regular_lattice(rows: &[Vec<Phase>], n: usize) -> Vec<IVec> {
    let mut eqs: Vec<IVec> = Vec::new();
    let mut slacks: Vec<IVec> = Vec::new();
    for coeffs in rows {
        let (r, s) = phase_constraints(coeffs);
        eqs.extend(r);
        slacks.extend(s);
    }
    let cols = n + slacks.len();
    let mut mat: Vec<IVec> = eqs
        .into_iter()
        .map(|mut r| {
            r.resize(cols, BigInt::zero());
            r
        })
        .collect();
    for (i, s) in slacks.into_iter().enumerate() {
        let mut r = vec![BigInt::zero(); cols];
        r[..n].clone_from_slice(&s[..n]);
        r[n + i] = s[n].clone();
        mat.push(r);
    }
    let kernel: Vec<IVec> = kernel_basis(&mat, cols).into_iter().map(|v| v[..n].to_vec()).collect();
    hnf(&kernel)
}

/// Radical of the antisymmetric form of σ on ℤⁿ, i.e. its regular elements,
/// as an HNF basis. None for other families.
pub fn zn_radical(sigma: &Cocycle) -> Option<Vec<Vec<i64>>> {
    let Family::Zn { n } = sigma.group().family() else {
        return None;
    };
    let n = *n;
    let e = |i: usize| {
        let mut v = vec![0; n];
        v[i] = 1;
        Element::Vector(v)
    };
    let rows: Vec<Vec<Phase>> = (0..n).map(|i| (0..n).map(|j| sigma.antisym(&e(j), &e(i))).collect()).collect();
    regular_lattice(&rows, n).iter().map(|v| crate::lattice::to_i64(v)).collect()
}

/// Vectors on n coordinates with ℓ¹-norm exactly `t` and entries in [−b, b]
/// (or in {0,1} when `binary`).
fn vectors_of_norm(n: usize, t: i64, b: i64, binary: bool) -> Vec<Vec<i64>> {
    fn rec(i: usize, left: i64, cur: &mut Vec<i64>, n: usize, b: i64, binary: bool, out: &mut Vec<Vec<i64>>) {
        if i == n {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let top = left.min(b);
        let vals: Vec<i64> = if binary { (0..=top.min(1)).collect() } else { (-top..=top).collect() };
        for v in vals {
            cur[i] = v;
            rec(i + 1, left - v.abs(), cur, n, b, binary, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(0, t, &mut vec![0; n], n, b, binary, &mut out);
    out
}

fn candidate_key(v: &[i64]) -> (i64, usize, i64, Vec<i64>) {
    let idx: Vec<usize> = (0..v.len()).filter(|&i| v[i] != 0).collect();
    let diam = idx.last().unwrap() - idx[0];
    let mid = (v.len() / 2) as i64;
    let far = idx.iter().map(|&i| (i as i64 - mid).abs()).max().unwrap();
    (v.iter().map(|x| x.abs()).sum(), diam, far, v.to_vec())
}

const GREEDY_NORM: i64 = 4;

/// Generators of S ∩ box for θ on ⊕ℤ or a bitstream on ⊕ℤ₂.
pub fn regular_subgroup_generators(sigma: &Cocycle, w: i64, b: i64) -> Result<GeneratorReport> {
    let n = (2 * w + 1) as usize;
    let coord = |i: usize| i as i64 - w;
    let to_elem = |v: &[i64]| Element::Sum(v.iter().enumerate().filter(|(_, x)| **x != 0).map(|(i, x)| (coord(i), *x)).collect());
    let rep = sigma.representative();
    match rep.kind() {
        CocycleKind::Theta(Theta::PrimeReciprocal) => {
            // every nonzero vector has a witness row
            Ok(GeneratorReport { generators: vec![], complete: true, rank: 0 })
        }
        CocycleKind::Theta(theta) => {
            let probe: BTreeMap<i64, i64> = (-w..=w).map(|k| (k, 1)).collect();
            let rows: Vec<Vec<Phase>> = certifying_rows(theta, &probe)
                .expect("finite cover")
                .into_iter()
                .map(|k| (-w..=w).map(|j| &theta.entry(j, k) - &theta.entry(k, j)).collect())
                .collect();
            let target = regular_lattice(&rows, n);
            let mut gens: Vec<Vec<i64>> = Vec::new();
            let mut span: Vec<IVec> = Vec::new();
            'greedy: for t in 1..=GREEDY_NORM {
                let mut cands = vectors_of_norm(n, t, b, false);
                // ±v span the same subgroup
                cands.retain(|v| v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0));
                cands.sort_by_key(|v| candidate_key(v));
                for v in cands {
                    if span.len() == target.len() && span == target {
                        break 'greedy;
                    }
                    let bv = crate::lattice::to_ivec(&v);
                    if in_lattice(&target, &bv) && !in_lattice(&span, &bv) {
                        gens.push(v);
                        let mut all: Vec<IVec> = span.clone();
                        all.push(bv);
                        span = hnf(&all);
                    }
                }
            }
            if span != target {
                for v in &target {
                    if let Some(small) = crate::lattice::to_i64(v).filter(|x| x.iter().all(|e| e.abs() <= b)) {
                        if !in_lattice(&span, v) {
                            gens.push(small);
                            let mut all = span.clone();
                            all.push(v.clone());
                            span = hnf(&all);
                        }
                    }
                }
            }
            Ok(GeneratorReport {
                generators: gens.iter().map(|v| to_elem(v)).collect(),
                complete: span == target,
                rank: target.len(),
            })
        }
        CocycleKind::Bitstream(mu) => {
            let rows: Vec<Vec<bool>> = (-w - mu.reach()..=w + mu.reach())
                .map(|k| (-w..=w).map(|j| j != k && mu.bit((k - j).abs())).collect())
                .collect();
            let target = gf2_basis(&gf2_kernel(&rows, n));
            let mut gens: Vec<Vec<i64>> = Vec::new();
            let mut span: Vec<Vec<bool>> = Vec::new();
            for t in 1..=GREEDY_NORM {
                if span.len() == target.len() {
                    break;
                }
                let mut cands = vectors_of_norm(n, t, 1, true);
                cands.sort_by_key(|v| candidate_key(v));
                for v in cands {
                    let bv: Vec<bool> = v.iter().map(|&x| x != 0).collect();
                    let in_target = gf2_reduce(&target, &bv).iter().all(|x| !x);
                    if in_target && gf2_reduce(&span, &bv).iter().any(|&x| x) {
                        gens.push(v);
                        let mut all = span.clone();
                        all.push(bv);
                        span = gf2_basis(&all);
                    }
                }
            }
            if span.len() != target.len() {
                for v in &target {
                    if gf2_reduce(&span, v).iter().any(|&x| x) {
                        gens.push(v.iter().map(|&x| i64::from(x)).collect());
                        let mut all = span.clone();
                        all.push(v.clone());
                        span = gf2_basis(&all);
                    }
                }
            }
            Ok(GeneratorReport { generators: gens.iter().map(|v| to_elem(v)).collect(), complete: true, rank: target.len() })
        }
        _ => Err(Error::Invalid(format!("{} is not a θ or bitstream cocycle", sigma.describe()))),
    }
}
