//! σ-twisted convolution, r₂, truncated operator norms, domination and
//! semifree sets.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::cocycles::Cocycle;
use crate::groups::{Element, Group};
use crate::phase::{IrrationalBasis, Phase};
use crate::{Error, Result};

// ---------------------------------------------------------------- scalars

/// Coefficient ring for finitely supported functions.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn conj(&self) -> Self;
    /// e^{2πi p}, when representable.
    fn from_phase(p: &Phase, basis: &IrrationalBasis) -> Option<Self>;
}

/// Scalars with a modulus, used for norms.
pub trait Normed: Scalar {
    type Real: Clone + PartialOrd + fmt::Display;
    fn norm_sqr(&self) -> Self::Real;
    /// |z| as a scalar, when representable.
    fn modulus(&self) -> Option<Self>;
    fn real_zero() -> Self::Real;
    fn real_add(a: &Self::Real, b: &Self::Real) -> Self::Real;
    fn real_f64(a: &Self::Real) -> f64;
    /// a ≤ b, exactly or up to rounding.
    fn real_le(a: &Self::Real, b: &Self::Real) -> bool;
    fn real_eq(a: &Self::Real, b: &Self::Real) -> bool;
    const EXACT: bool;
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn from_phase(p: &Phase, basis: &IrrationalBasis) -> Option<Self> {
        p.to_complex(basis).ok()
    }
}

const FLOAT_SLACK: f64 = 1e-9;

impl Normed for Complex64 {
    type Real = f64;
    fn norm_sqr(&self) -> f64 {
        Complex64::norm_sqr(self)
    }
    fn modulus(&self) -> Option<Self> {
        Some(Complex64::new(self.norm(), 0.0))
    }
    fn real_zero() -> f64 {
        0.0
    }
    fn real_add(a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn real_f64(a: &f64) -> f64 {
        *a
    }
    fn real_le(a: &f64, b: &f64) -> bool {
        *a <= *b + FLOAT_SLACK * b.abs().max(1.0)
    }
    fn real_eq(a: &f64, b: &f64) -> bool {
        (a - b).abs() <= FLOAT_SLACK * b.abs().max(1.0)
    }
    const EXACT: bool = false;
}

/// a + bi with rational a, b.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> GaussRat {
        GaussRat { re, im }
    }

    pub fn int(re: i64, im: i64) -> GaussRat {
        GaussRat { re: BigRational::from_integer(re.into()), im: BigRational::from_integer(im.into()) }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}i", self.re, self.im)
    }
}

impl Scalar for GaussRat {
    fn zero() -> Self {
        GaussRat::int(0, 0)
    }
    fn one() -> Self {
        GaussRat::int(1, 0)
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        GaussRat::new(&self.re + &o.re, &self.im + &o.im)
    }
    fn mul(&self, o: &Self) -> Self {
        GaussRat::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
    fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -&self.im)
    }
    fn from_phase(p: &Phase, _: &IrrationalBasis) -> Option<Self> {
        Some(match p.quarter_turns()? {
            0 => GaussRat::int(1, 0),
            1 => GaussRat::int(0, 1),
            2 => GaussRat::int(-1, 0),
            _ => GaussRat::int(0, -1),
        })
    }
}

impl Normed for GaussRat {
    type Real = BigRational;
    fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
    fn modulus(&self) -> Option<Self> {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => Some(GaussRat::new(self.re.abs(), BigRational::zero())),
            (true, false) => Some(GaussRat::new(self.im.abs(), BigRational::zero())),
            _ => None,
        }
    }
    fn real_zero() -> BigRational {
        BigRational::zero()
    }
    fn real_add(a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn real_f64(a: &BigRational) -> f64 {
        a.to_f64().unwrap_or(f64::NAN)
    }
    fn real_le(a: &BigRational, b: &BigRational) -> bool {
        a <= b
    }
    fn real_eq(a: &BigRational, b: &BigRational) -> bool {
        a == b
    }
    const EXACT: bool = true;
}

/// Formal ℚ-combination Σ c_p e^{2πi p}. Products of such sums are exact;
/// distinct phases are never identified, so equality is only meaningful
/// for monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cyclo(pub BTreeMap<Phase, BigRational>);

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(p, c)| format!("{c}·e({p})")).collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl Scalar for Cyclo {
    fn zero() -> Self {
        Cyclo(BTreeMap::new())
    }
    fn one() -> Self {
        Cyclo(BTreeMap::from([(Phase::zero(), BigRational::one())]))
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let mut m = self.0.clone();
        for (p, c) in &o.0 {
            let e = m.entry(p.clone()).or_insert_with(BigRational::zero);
            *e += c;
            if e.is_zero() {
                m.remove(p);
            }
        }
        Cyclo(m)
    }
    fn mul(&self, o: &Self) -> Self {
        let mut acc = Cyclo::zero();
        for (p, c) in &self.0 {
            for (q, d) in &o.0 {
                acc = acc.add(&Cyclo(BTreeMap::from([(p + q, c * d)])));
            }
        }
        acc
    }
    fn conj(&self) -> Self {
        Cyclo(self.0.iter().map(|(p, c)| (-p, c.clone())).collect())
    }
    fn from_phase(p: &Phase, _: &IrrationalBasis) -> Option<Self> {
        Some(Cyclo(BTreeMap::from([(p.clone(), BigRational::one())])))
    }
}

// ------------------------------------------------------- finite functions

pub type FiniteFunction<S> = BTreeMap<Element, S>;

pub fn delta<S: Scalar>(g: Element) -> FiniteFunction<S> {
    BTreeMap::from([(g, S::one())])
}

fn phase_scalar<S: Scalar>(p: &Phase, basis: &IrrationalBasis) -> Result<S> {
    S::from_phase(p, basis).ok_or_else(|| Error::Invalid(format!("phase {p} has no exact value in this scalar ring")))
}

/// (f ∗_σ ξ)(h) = Σ_g f(g) ξ(g⁻¹h) σ(g, g⁻¹h).
pub fn convolve<S: Scalar>(
    f: &FiniteFunction<S>,
    xi: &FiniteFunction<S>,
    sigma: &Cocycle,
    basis: &IrrationalBasis,
) -> Result<FiniteFunction<S>> {
    let group = sigma.group();
    let mut out: FiniteFunction<S> = BTreeMap::new();
    for (g, a) in f {
        for (k, b) in xi {
            let w = phase_scalar::<S>(&sigma.eval(g, k), basis)?;
            let v = a.mul(b).mul(&w);
            let e = out.entry(group.mul(g, k)).or_insert_with(S::zero);
            *e = e.add(&v);
        }
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// λ_σ(g)⁻¹ δ_e = conj(σ(g,g⁻¹))·δ_{g⁻¹}.
pub fn inverse_delta<S: Scalar>(sigma: &Cocycle, g: &Element, basis: &IrrationalBasis) -> Result<FiniteFunction<S>> {
    let gi = sigma.group().invert(g);
    let c = phase_scalar::<S>(&sigma.eval(g, &gi), basis)?.conj();
    Ok(BTreeMap::from([(gi, c)]))
}

pub fn l2_sqr<S: Normed>(f: &FiniteFunction<S>) -> S::Real {
    f.values().fold(S::real_zero(), |acc, v| S::real_add(&acc, &v.norm_sqr()))
}

fn abs_fn<S: Normed>(f: &FiniteFunction<S>) -> Result<FiniteFunction<S>> {
    f.iter()
        .map(|(g, v)| {
            v.modulus()
                .map(|m| (g.clone(), m))
                .ok_or_else(|| Error::Invalid(format!("|{v}| is not representable exactly")))
        })
        .collect()
}

fn check_support<S>(f: &FiniteFunction<S>, n: usize, cap: usize) -> Result<()> {
    if f.len() > cap {
        return Err(Error::Budget { radius: n as u32, cap });
    }
    Ok(())
}

// --------------------------------------------------------------------- r₂

#[derive(Clone, Debug, Serialize)]
pub struct R2Report {
    /// ‖aⁿδ‖₂², n = 1..n_max, printed exactly when the ring is exact.
    pub squared_norms: Vec<String>,
    pub roots: Vec<f64>,
    pub estimate: f64,
    pub exact: bool,
}

/// ‖aⁿδ_e‖₂^{1/n} for a = Λ_σ(f).
pub fn r2_estimate<S: Normed>(
    f: &FiniteFunction<S>,
    sigma: &Cocycle,
    n_max: usize,
    basis: &IrrationalBasis,
    cap: usize,
) -> Result<(R2Report, Vec<S::Real>)> {
    let mut cur = delta::<S>(sigma.group().identity());
    let mut sq = Vec::new();
    let mut roots = Vec::new();
    for n in 1..=n_max {
        cur = convolve(f, &cur, sigma, basis)?;
        check_support(&cur, n, cap)?;
        let s = l2_sqr(&cur);
        roots.push(S::real_f64(&s).powf(0.5 / n as f64));
        sq.push(s);
    }
    let report = R2Report {
        squared_norms: sq.iter().map(|s| s.to_string()).collect(),
        estimate: roots.last().copied().unwrap_or(0.0),
        roots,
        exact: S::EXACT,
    };
    Ok((report, sq))
}

// ---------------------------------------------------------- compressions

/// Sparse compression P_B Λ_σ(f) P_B on the ball B.
#[derive(Clone, Debug)]
pub struct TruncatedOperator {
    pub ball: Vec<Element>,
    /// rows[h] = [(col k, value)]
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl TruncatedOperator {
    pub fn new(f: &FiniteFunction<Complex64>, sigma: &Cocycle, radius: u32, basis: &IrrationalBasis) -> Result<Self> {
        let group = sigma.group();
        let ball = group.ball(radius)?;
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); ball.len()];
        let phases: Vec<(Element, Complex64)> = f.iter().map(|(g, v)| (g.clone(), *v)).collect();
        for (col, k) in ball.iter().enumerate() {
            for (g, v) in &phases {
                let h = group.mul(g, k);
                if let Some(row) = ball.position(&h) {
                    let w = sigma.eval(g, k).to_complex(basis)?;
                    rows[row].push((col, v * w));
                }
            }
        }
        Ok(TruncatedOperator { ball: ball.elements, rows })
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.rows.iter().map(|r| r.iter().map(|(c, a)| a * v[*c]).sum()).collect()
    }

    pub fn apply_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (i, r) in self.rows.iter().enumerate() {
            for (c, a) in r {
                out[*c] += a.conj() * v[i];
            }
        }
        out
    }

    /// Largest singular value of Mⁿ by power iteration on (Mⁿ)*Mⁿ.
    pub fn power_norm(&self, n: usize, tol: f64, seed: u64) -> NormEstimate {
        let fwd = |v: &[Complex64]| (0..n).fold(v.to_vec(), |x, _| self.apply(&x));
        let back = |v: &[Complex64]| (0..n).fold(v.to_vec(), |x, _| self.apply_adjoint(&x));
        power_iteration(self.dim(), |v| back(&fwd(v)), tol, seed)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct NormEstimate {
    /// sqrt of the best Rayleigh quotient; a lower bound for the norm.
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub const ITERATION_CAP: usize = 10_000;
const RESTARTS: usize = 3;

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Power iteration for the top eigenvalue of a positive operator; returns
/// the square root, i.e. the norm of the underlying M.
fn power_iteration(dim: usize, op: impl Fn(&[Complex64]) -> Vec<Complex64>, tol: f64, seed: u64) -> NormEstimate {
    if dim == 0 {
        return NormEstimate { value: 0.0, iterations: 0, converged: true };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = NormEstimate { value: 0.0, iterations: 0, converged: false };
    let mut total = 0;
    let mut all_converged = true;
    for _ in 0..RESTARTS {
        let mut v: Vec<Complex64> = (0..dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let mut rq = 0.0f64;
        let mut converged = false;
        for _ in 0..ITERATION_CAP {
            total += 1;
            let w = op(&v);
            // ⟨v, M*M v⟩ with ‖v‖ = 1
            let next: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
            let nw = norm(&w);
            let change = (next - rq).abs() / next.abs().max(f64::MIN_POSITIVE);
            rq = rq.max(next);
            if nw == 0.0 {
                converged = true;
                break;
            }
            v = w.into_iter().map(|x| x / nw).collect();
            if change < tol {
                converged = true;
                break;
            }
        }
        all_converged &= converged;
        let value = rq.max(0.0).sqrt();
        if value > best.value {
            best.value = value;
        }
    }
    best.iterations = total;
    best.converged = all_converged;
    best
}

#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    pub radius: u32,
    pub ball_size: usize,
    #[serde(flatten)]
    pub estimate: NormEstimate,
}

/// Lower bound for ‖Λ_σ(f)‖ from the compression to ball(R).
pub fn truncated_norm(
    f: &FiniteFunction<Complex64>,
    sigma: &Cocycle,
    radius: u32,
    tol: f64,
    basis: &IrrationalBasis,
    seed: u64,
) -> Result<NormReport> {
    let m = TruncatedOperator::new(f, sigma, radius, basis)?;
    Ok(NormReport { radius, ball_size: m.dim(), estimate: m.power_norm(1, tol, seed) })
}

/// The same for every radius in `radii`.
pub fn truncated_norm_sequence(
    f: &FiniteFunction<Complex64>,
    sigma: &Cocycle,
    radii: impl IntoIterator<Item = u32>,
    tol: f64,
    basis: &IrrationalBasis,
    seed: u64,
) -> Result<Vec<NormReport>> {
    radii.into_iter().map(|r| truncated_norm(f, sigma, r, tol, basis, seed)).collect()
}

// ------------------------------------------------------------- domination

#[derive(Clone, Debug, Serialize)]
pub struct DominationStep {
    pub n: usize,
    /// ‖aⁿξ‖₂²
    pub lhs: String,
    /// ‖bⁿ|ξ|‖₂²
    pub rhs: String,
    pub pass: bool,
    pub equal: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DominationReport {
    pub steps: Vec<DominationStep>,
    pub exact: bool,
}

impl DominationReport {
    pub fn pass(&self) -> bool {
        self.steps.iter().all(|s| s.pass)
    }
}

/// ‖aⁿξ‖₂ ≤ ‖bⁿ|ξ|‖₂ with a = Λ_σ(f), b = Λ(|f|).
pub fn check_domination<S: Normed>(
    f: &FiniteFunction<S>,
    xi: &FiniteFunction<S>,
    sigma: &Cocycle,
    n_max: usize,
    basis: &IrrationalBasis,
) -> Result<DominationReport> {
    let plain = Cocycle::trivial(sigma.group());
    let (af, axi) = (abs_fn(f)?, abs_fn(xi)?);
    let (mut a, mut b) = (xi.clone(), axi);
    let mut steps = Vec::new();
    for n in 1..=n_max {
        a = convolve(f, &a, sigma, basis)?;
        b = convolve(&af, &b, &plain, basis)?;
        let (l, r) = (l2_sqr(&a), l2_sqr(&b));
        steps.push(DominationStep { n, lhs: l.to_string(), rhs: r.to_string(), pass: S::real_le(&l, &r), equal: S::real_eq(&l, &r) });
    }
    Ok(DominationReport { steps, exact: S::EXACT })
}

// --------------------------------------------------------------- semifree

#[derive(Clone, Debug, Serialize)]
pub struct SemifreeReport {
    pub semifree: bool,
    pub depth: usize,
    /// Two distinct factor sequences (indices into S) with equal product.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collision: Option<(Vec<usize>, Vec<usize>)>,
}

/// Whether all products of 1..=depth factors from `s` are distinct.
pub fn semifree_check(group: &Group, s: &[Element], depth: usize, cap: usize) -> Result<SemifreeReport> {
    let mut seen: HashMap<Element, Vec<usize>> = HashMap::new();
    let mut layer: Vec<(Vec<usize>, Element)> = vec![(Vec::new(), group.identity())];
    for d in 1..=depth {
        let mut next = Vec::with_capacity(layer.len() * s.len());
        for (seq, x) in &layer {
            for (i, g) in s.iter().enumerate() {
                let mut q = seq.clone();
                q.push(i);
                let y = group.mul(x, g);
                if let Some(prev) = seen.get(&y) {
                    return Ok(SemifreeReport { semifree: false, depth: d, collision: Some((prev.clone(), q)) });
                }
                seen.insert(y.clone(), q.clone());
                next.push((q, y));
            }
        }
        if seen.len() > cap {
            return Err(Error::Budget { radius: d as u32, cap });
        }
        layer = next;
    }
    Ok(SemifreeReport { semifree: true, depth, collision: None })
}

// ---------------------------------------------------- stable rank evidence

#[derive(Clone, Debug, Serialize)]
pub struct SampleEvidence {
    pub l2_norm: f64,
    /// ‖Mⁿ‖^{1/n} for n = 1, 2, 4, … ≤ 2R; the proxy is their minimum.
    pub proxies: Vec<(usize, f64)>,
    pub proxy: f64,
    /// ‖f‖₂ − proxy
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StableRankReport {
    pub found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub translate: Option<Element>,
    pub searched: usize,
    pub samples: Vec<SampleEvidence>,
    pub note: String,
}

pub const SEMIFREE_DEPTH: usize = 4;

/// Searches g with gF semifree, then compares spectral-radius proxies of
/// compressions of Λ_σ(f), supp f ⊆ gF, with ‖f‖₂. Evidence only.
#[allow(clippy::too_many_arguments)]
pub fn stable_rank_evidence(
    sigma: &Cocycle,
    f_set: &[Element],
    search_radius: u32,
    radius: u32,
    tol: f64,
    basis: &IrrationalBasis,
    seed: u64,
    samples: usize,
) -> Result<StableRankReport> {
    let group = sigma.group();
    let ball = group.ball(search_radius)?;
    let mut searched = 0;
    let mut translate = None;
    for g in ball.iter() {
        searched += 1;
        let s: Vec<Element> = f_set.iter().map(|x| group.mul(g, x)).collect();
        if semifree_check(group, &s, SEMIFREE_DEPTH, group_cap(group))?.semifree {
            translate = Some(g.clone());
            break;
        }
    }
    let Some(g) = translate else {
        return Ok(StableRankReport {
            found: false,
            translate: None,
            searched,
            samples: vec![],
            note: format!("no g in ball({search_radius}) makes gF semifree to depth {SEMIFREE_DEPTH}"),
        });
    };
    let support: Vec<Element> = f_set.iter().map(|x| group.mul(&g, x)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for i in 0..samples {
        let f: FiniteFunction<Complex64> = support
            .iter()
            .map(|x| {
                let c = if i == 0 { Complex64::new(1.0, 0.0) } else { unit_disk(&mut rng) };
                (x.clone(), c)
            })
            .collect();
        let l2 = f.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let m = TruncatedOperator::new(&f, sigma, radius, basis)?;
        let mut proxies = Vec::new();
        let mut n = 1;
        // past 2R the compression may be nilpotent
        while n <= 2 * radius.max(1) as usize {
            let est = m.power_norm(n, tol, seed.wrapping_add(n as u64));
            if est.value == 0.0 {
                break;
            }
            let p = est.value.powf(1.0 / n as f64);
            let done = proxies.last().is_some_and(|&(_, q): &(usize, f64)| (p - q).abs() <= tol * q.max(1e-300));
            proxies.push((n, p));
            if done {
                break;
            }
            n *= 2;
        }
        let proxy = proxies.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
        let proxy = if proxy.is_finite() { proxy } else { 0.0 };
        out.push(SampleEvidence { l2_norm: l2, proxies, proxy, margin: l2 - proxy });
    }
    Ok(StableRankReport { found: true, translate: Some(g), searched, samples: out, note: "evidence only".into() })
}

fn group_cap(g: &Group) -> usize {
    g.node_cap
}

/// Uniform point of the closed unit disk.
pub fn unit_disk<R: Rng>(rng: &mut R) -> Complex64 {
    loop {
        let z = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        if z.norm_sqr() <= 1.0 {
            return z;
        }
    }
}

/// Prints a finite function as [[element, re, im], …].
pub fn serialize_function<S: Serializer>(f: &FiniteFunction<Complex64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<(serde_json::Value, f64, f64)> = f.iter().map(|(g, c)| (g.render(), c.re, c.im)).collect();
    v.serialize(s)
}
