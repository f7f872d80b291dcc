//! 2-cocycles of the supported families, written additively in angles.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::groups::{bs_abelianization, exponent_sum, sanov_act, sanov_letter_matrix, Element, Family, Group, LampBase, Subgroup};
use crate::phase::Phase;
use crate::{Error, Result};

// ---------------------------------------------------------------- primes

/// The m-th prime, 1-based (`nth_prime(1) = 2`).
pub fn nth_prime(m: usize) -> u64 {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    let primes = PRIMES.get_or_init(|| {
        let limit = 200_000usize;
        let mut sieve = vec![true; limit + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= limit {
            if sieve[i] {
                let mut j = i * i;
                while j <= limit {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        (0..=limit).filter(|&k| sieve[k]).map(|k| k as u64).collect()
    });
    assert!(m >= 1 && m <= primes.len(), "prime index {m} out of range");
    primes[m - 1]
}

// ------------------------------------------------------------------ θ

/// Upper-triangular ℤ×ℤ matrix θ with σ_θ(x,y) = Σ_{j<k} θ_{j,k} x_j y_k.
#[derive(Clone, Debug, PartialEq)]
pub enum Theta {
    /// Constant on diagonals: θ_{j,k} = θ_{k−j}; `pre` lists θ_1, θ_2, … and
    /// `period` then repeats forever (empty: zero from there on).
    Diag { pre: Vec<Phase>, period: Vec<Phase> },
    /// θ_m = 1/p_m with p_m the m-th prime.
    PrimeReciprocal,
    /// Finitely many explicit entries θ_{j,k}, j < k; all others zero.
    Window(BTreeMap<(i64, i64), Phase>),
}

impl Theta {
    pub fn diag(&self, m: i64) -> Phase {
        assert!(m >= 1);
        match self {
            Theta::Diag { pre, period } => {
                let i = (m - 1) as usize;
                if i < pre.len() {
                    pre[i].clone()
                } else if period.is_empty() {
                    Phase::zero()
                } else {
                    period[(i - pre.len()) % period.len()].clone()
                }
            }
            Theta::PrimeReciprocal => Phase::rational(1, nth_prime(m as usize) as i64),
            Theta::Window(_) => panic!("window θ has no diagonal sequence"),
        }
    }

    pub fn entry(&self, j: i64, k: i64) -> Phase {
        if j >= k {
            return Phase::zero();
        }
        match self {
            Theta::Window(w) => w.get(&(j, k)).cloned().unwrap_or_else(Phase::zero),
            _ => self.diag(k - j),
        }
    }

    pub fn is_diagonal_constant(&self) -> bool {
        match self {
            Theta::Window(w) => w.values().all(Phase::is_zero),
            _ => true,
        }
    }

    /// Largest m with θ_m ≠ 0 when only finitely many diagonals are nonzero.
    pub fn bandwidth(&self) -> Option<i64> {
        match self {
            Theta::Diag { pre, period } if period.iter().all(Phase::is_zero) => {
                Some(pre.iter().rposition(|p| !p.is_zero()).map_or(0, |i| i as i64 + 1))
            }
            _ => None,
        }
    }

    /// Rows outside `supp ± reach` repeat rows inside it (or vanish).
    pub fn certifying_reach(&self) -> Option<i64> {
        match self {
            Theta::Diag { pre, period } => match self.bandwidth() {
                Some(w) => Some(w),
                None => Some((pre.len() + period.len()) as i64),
            },
            _ => None,
        }
    }

    pub fn eval(&self, x: &BTreeMap<i64, i64>, y: &BTreeMap<i64, i64>) -> Phase {
        let mut acc = Phase::zero();
        for (&j, &xj) in x {
            for (&k, &yk) in y.range(j + 1..) {
                let t = self.entry(j, k);
                if !t.is_zero() {
                    acc += &t.scale_int(xj * yk);
                }
            }
        }
        acc
    }

    /// Row k of T_θ applied to x: Σ_j x_j (θ_{j,k} − θ_{k,j}).
    pub fn row(&self, k: i64, x: &BTreeMap<i64, i64>) -> Phase {
        x.iter()
            .map(|(&j, &xj)| (&self.entry(j, k) - &self.entry(k, j)).scale_int(xj))
            .sum()
    }
}

// ------------------------------------------------------------ bitstream

/// Diagonal-constant ±1 matrix on ⊕ℤ₂ given by the bits ε_1, ε_2, …
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bitstream {
    #[serde(default, deserialize_with = "de_bits", serialize_with = "ser_bits")]
    pub pre: Vec<bool>,
    #[serde(deserialize_with = "de_bits", serialize_with = "ser_bits")]
    pub period: Vec<bool>,
}

fn de_bits<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<bool>, D::Error> {
    let v = Vec::<u8>::deserialize(d)?;
    v.into_iter()
        .map(|b| match b {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(serde::de::Error::custom(format!("bit must be 0 or 1, got {b}"))),
        })
        .collect()
}

fn ser_bits<S: serde::Serializer>(v: &[bool], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|&b| u8::from(b)).collect::<Vec<_>>().serialize(s)
}

impl Bitstream {
    pub fn new(pre: Vec<bool>, period: Vec<bool>) -> Result<Bitstream> {
        if period.is_empty() {
            return Err(Error::Config("bitstream: period must be nonempty".into()));
        }
        Ok(Bitstream { pre, period })
    }

    /// ε_m for m ≥ 1.
    pub fn bit(&self, m: i64) -> bool {
        assert!(m >= 1);
        let i = (m - 1) as usize;
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.period[(i - self.pre.len()) % self.period.len()]
        }
    }

    pub fn reach(&self) -> i64 {
        (self.pre.len() + self.period.len()) as i64
    }

    pub fn eval(&self, s: &BTreeMap<i64, i64>, t: &BTreeMap<i64, i64>) -> Phase {
        let mut count = 0i64;
        for &j in s.keys() {
            for &k in t.range(j + 1..).map(|(k, _)| k) {
                if self.bit(k - j) {
                    count += 1;
                }
            }
        }
        Phase::rational(count, 2)
    }

    /// Row k of the antisymmetrisation applied to x.
    pub fn row(&self, k: i64, x: &BTreeMap<i64, i64>) -> Phase {
        let count = x.keys().filter(|&&j| j != k && self.bit((k - j).abs())).count();
        Phase::rational(count as i64, 2)
    }
}

// ------------------------------------------------------------ coboundaries

/// A normalized function b: G → 𝕋.
#[derive(Clone, Debug, PartialEq)]
pub enum CoboundaryFn {
    Zero,
    /// Finite table; b vanishes off the table.
    Table(BTreeMap<Element, Phase>),
    /// b(x) = σ_μ(x⁰, x¹), x⁰ and x¹ the even- and odd-indexed parts.
    LamplighterSplit(Bitstream),
}

impl CoboundaryFn {
    pub fn eval(&self, x: &Element) -> Phase {
        match self {
            CoboundaryFn::Zero => Phase::zero(),
            CoboundaryFn::Table(t) => t.get(x).cloned().unwrap_or_else(Phase::zero),
            CoboundaryFn::LamplighterSplit(mu) => match x {
                Element::Sum(m) => {
                    let even = m.iter().filter(|(k, _)| k.rem_euclid(2) == 0).map(|(k, v)| (*k, *v)).collect();
                    let odd = m.iter().filter(|(k, _)| k.rem_euclid(2) == 1).map(|(k, v)| (*k, *v)).collect();
                    mu.eval(&even, &odd)
                }
                _ => panic!("lamplighter split needs a ⊕ℤ₂ element"),
            },
        }
    }
}

// ---------------------------------------------------------------- cocycle

#[derive(Clone, Debug, PartialEq)]
pub enum CocycleKind {
    Trivial,
    Theta(Theta),
    Bitstream(Bitstream),
    /// σ(x,y) = Σ x_i M_ij y_j on ℤⁿ.
    ZnBilinear(Vec<Vec<Phase>>),
    /// σ₀(a,b) = ½(a₁b₂ − a₂b₁)·μ₀ on ℤ².
    Sigma0(Phase),
    Sanov { mu0: Phase, mu1: Phase, mu2: Phase },
    /// σ(x,y) = φ_b(x)·φ_a(y)·λ on BS(n,n).
    Bs { lambda: Phase },
    /// σ((x,m),(y,n)) = m·(#_a(y)·μ + #_b(y)·ν).
    FreeTimesZ { mu: Phase, nu: Phase },
    /// σ((x,k),(y,l)) = σ'(x, k·y) for an invariant σ' on the normal part.
    Lift(Box<Cocycle>),
    Product(Box<Cocycle>, Box<Cocycle>),
    Coboundary(CoboundaryFn),
    /// σ − ∂b
    Similar(Box<Cocycle>, CoboundaryFn),
    Restricted { parent: Box<Cocycle>, sub: Subgroup },
    /// Negative control: adds `delta` at one ordered pair.
    Corrupted { inner: Box<Cocycle>, at: (Element, Element), delta: Phase },
}

/// A cocycle together with the group it lives on.
#[derive(Clone, Debug, PartialEq)]
pub struct Cocycle {
    group: Group,
    kind: CocycleKind,
}

impl Cocycle {
    pub fn trivial(group: &Group) -> Cocycle {
        Cocycle { group: group.clone(), kind: CocycleKind::Trivial }
    }

    /// Builds a cocycle after checking it against the family.
    pub fn new(group: &Group, kind: CocycleKind) -> Result<Cocycle> {
        let fam = group.family();
        let mismatch = |what: &str| Err(Error::Config(format!("cocycle {what} does not fit {}", group.name())));
        match (&kind, fam) {
            (CocycleKind::Trivial | CocycleKind::Coboundary(_), _) => {}
            (CocycleKind::Theta(t), Family::SumZ) => {
                if let Theta::Window(w) = t {
                    if let Some(((j, k), _)) = w.iter().find(|((j, k), p)| j >= k && !p.is_zero()) {
                        return Err(Error::Config(format!("θ entry ({j},{k}) is not above the diagonal")));
                    }
                }
            }
            (CocycleKind::Bitstream(_), Family::SumZ2) => {}
            (CocycleKind::ZnBilinear(m), Family::Zn { n }) => {
                if m.len() != *n || m.iter().any(|r| r.len() != *n) {
                    return mismatch("matrix size");
                }
            }
            (CocycleKind::Sigma0(_), Family::Zn { n: 2 }) => {}
            (CocycleKind::Sanov { .. }, Family::Sanov) => {}
            (CocycleKind::Bs { .. }, Family::BsNn { .. }) => {}
            (CocycleKind::FreeTimesZ { .. }, Family::FreeTimesZ) => {}
            (CocycleKind::Lift(base), _) => {
                let (want, action) = match fam {
                    Family::Wreath { base: LampBase::Z, acting: None } => (Family::SumZ, Action::Shift),
                    Family::Wreath { base: LampBase::Z2, acting: None } => (Family::SumZ2, Action::Shift),
                    Family::ZnSemidirect { a } => (Family::Zn { n: a.len() }, Action::Matrix(a.clone())),
                    _ => return mismatch("lift"),
                };
                if *base.group.family() != want {
                    return mismatch("lift base");
                }
                let rep = verify_invariance(base, &action, 200, 0);
                if !rep.pass {
                    return Err(Error::NotInvariant(format!(
                        "{} moves under the action (witness {:?})",
                        base.describe(),
                        rep.witness.map(|(x, y)| (x.to_string(), y.to_string()))
                    )));
                }
            }
            (CocycleKind::Product(l, r), Family::Product { left, right }) => {
                if l.group.family() != left.as_ref() || r.group.family() != right.as_ref() {
                    return mismatch("product factors");
                }
            }
            (CocycleKind::Similar(inner, _), _) | (CocycleKind::Corrupted { inner, .. }, _) => {
                if inner.group != *group {
                    return mismatch("inner cocycle");
                }
            }
            (CocycleKind::Restricted { parent, sub }, _) => {
                if sub.own_group(&parent.group).as_ref() != Some(group) {
                    return mismatch("restriction");
                }
            }
            _ => return mismatch(&format!("{:?}", std::mem::discriminant(&kind))),
        }
        Ok(Cocycle { group: group.clone(), kind })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn kind(&self) -> &CocycleKind {
        &self.kind
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            CocycleKind::Trivial => "trivial".into(),
            CocycleKind::Theta(Theta::PrimeReciprocal) => "theta(prime reciprocal)".into(),
            CocycleKind::Theta(_) => "theta".into(),
            CocycleKind::Bitstream(_) => "bitstream".into(),
            CocycleKind::ZnBilinear(_) => "bilinear".into(),
            CocycleKind::Sigma0(_) => "sigma0".into(),
            CocycleKind::Sanov { .. } => "sanov".into(),
            CocycleKind::Bs { .. } => "bs inflation".into(),
            CocycleKind::FreeTimesZ { .. } => "free x Z".into(),
            CocycleKind::Lift(b) => format!("lift of {}", b.describe()),
            CocycleKind::Product(a, b) => format!("{} x {}", a.describe(), b.describe()),
            CocycleKind::Coboundary(_) => "coboundary".into(),
            CocycleKind::Similar(s, _) => format!("similar to {}", s.describe()),
            CocycleKind::Restricted { parent, sub } => format!("{} restricted to {}", parent.describe(), sub.name()),
            CocycleKind::Corrupted { inner, .. } => format!("corrupted {}", inner.describe()),
        }
    }

    /// Strips similarity transforms; the result is cohomologous to `self`.
    pub fn representative(&self) -> &Cocycle {
        match &self.kind {
            CocycleKind::Similar(inner, _) => inner.representative(),
            _ => self,
        }
    }

    /// Checked evaluation.
    pub fn eval_checked(&self, g: &Element, h: &Element) -> Result<Phase> {
        for x in [g, h] {
            if !self.group.contains(x) {
                return Err(Error::FamilyMismatch(format!("{x} is not in {}", self.group.name())));
            }
        }
        Ok(self.eval(g, h))
    }

    /// σ(g,h) for members of the cocycle's group.
    pub fn eval(&self, g: &Element, h: &Element) -> Phase {
        match (&self.kind, g, h) {
            (CocycleKind::Trivial, ..) => Phase::zero(),
            (CocycleKind::Theta(t), Element::Sum(x), Element::Sum(y)) => t.eval(x, y),
            (CocycleKind::Bitstream(mu), Element::Sum(x), Element::Sum(y)) => mu.eval(x, y),
            (CocycleKind::ZnBilinear(m), Element::Vector(x), Element::Vector(y)) => {
                let mut acc = Phase::zero();
                for (i, xi) in x.iter().enumerate() {
                    for (j, yj) in y.iter().enumerate() {
                        if xi * yj != 0 {
                            acc += &m[i][j].scale_int(xi * yj);
                        }
                    }
                }
                acc
            }
            (CocycleKind::Sigma0(mu0), Element::Vector(a), Element::Vector(b)) => sigma0(mu0, [a[0], a[1]], [b[0], b[1]]),
            (CocycleKind::Sanov { mu0, mu1, mu2 }, Element::Sanov { v: a, w: x }, Element::Sanov { v: b, .. }) => {
                &sigma0(mu0, *a, sanov_act(x, *b)) + &sanov_g(*b, x, mu1, mu2)
            }
            (CocycleKind::Bs { lambda }, ..) => {
                let (_, xb) = bs_abelianization(g);
                let (ya, _) = bs_abelianization(h);
                lambda.scale_int(xb * ya)
            }
            (CocycleKind::FreeTimesZ { mu, nu }, Element::FreeZ { m, .. }, Element::FreeZ { w: y, .. }) => {
                &mu.scale_int(m * exponent_sum(y, 1)) + &nu.scale_int(m * exponent_sum(y, 2))
            }
            (CocycleKind::Lift(base), Element::Wreath { lamps: x, shift: k }, Element::Wreath { lamps: y, .. }) => {
                let ky = y.iter().map(|(&j, &v)| (j + k, v)).collect();
                base.eval(&Element::Sum(x.clone()), &Element::Sum(ky))
            }
            (CocycleKind::Lift(base), Element::Semi { v, k }, Element::Semi { v: w, .. }) => {
                base.eval(&Element::Vector(v.clone()), &Element::Vector(self.group.act_semi(*k, w)))
            }
            (CocycleKind::Product(l, r), Element::Pair(a, b), Element::Pair(c, d)) => &l.eval(a, c) + &r.eval(b, d),
            (CocycleKind::Coboundary(b), ..) => coboundary(&self.group, b, g, h),
            (CocycleKind::Similar(s, b), ..) => &s.eval(g, h) - &coboundary(&self.group, b, g, h),
            (CocycleKind::Restricted { parent, sub }, ..) => {
                let pg = &parent.group;
                parent.eval(&sub.embed(pg, g), &sub.embed(pg, h))
            }
            (CocycleKind::Corrupted { inner, at, delta }, ..) => {
                let v = inner.eval(g, h);
                if (g, h) == (&at.0, &at.1) {
                    &v + delta
                } else {
                    v
                }
            }
            _ => panic!("cannot evaluate {} at ({g}, {h})", self.describe()),
        }
    }

    /// σ̃(g,h) = σ(g,h) − σ(ghg⁻¹, g).
    pub fn sigma_tilde(&self, g: &Element, h: &Element) -> Phase {
        let c = self.group.conjugate(g, h);
        &self.eval(g, h) - &self.eval(&c, g)
    }

    /// σ(g,h) − σ(h,g); for commuting g, h this equals σ̃(g,h).
    pub fn antisym(&self, g: &Element, h: &Element) -> Phase {
        &self.eval(g, h) - &self.eval(h, g)
    }

    /// σ − ∂b.
    pub fn similar_transform(&self, b: CoboundaryFn) -> Cocycle {
        Cocycle { group: self.group.clone(), kind: CocycleKind::Similar(Box::new(self.clone()), b) }
    }

    /// Restriction to a recognized subgroup, on the subgroup's own family.
    pub fn restrict(&self, sub: Subgroup) -> Result<Cocycle> {
        sub.check(&self.group)?;
        let h = sub
            .own_group(&self.group)
            .ok_or_else(|| Error::UnrecognizedSubgroup(format!("{} of {} has no family", sub.name(), self.group.name())))?;
        if sub == Subgroup::Whole {
            return Ok(self.clone());
        }
        let kind = match (&self.kind, sub) {
            (CocycleKind::Lift(base), Subgroup::Base) => return Ok((**base).clone()),
            (CocycleKind::Sanov { mu0, .. }, Subgroup::Base) => CocycleKind::Sigma0(mu0.clone()),
            (CocycleKind::Bs { .. } | CocycleKind::FreeTimesZ { .. }, Subgroup::Center) => CocycleKind::Trivial,
            (CocycleKind::Trivial, _) => CocycleKind::Trivial,
            _ => CocycleKind::Restricted { parent: Box::new(self.clone()), sub },
        };
        Cocycle::new(&h, kind)
    }
}

fn sigma0(mu0: &Phase, a: [i64; 2], b: [i64; 2]) -> Phase {
    let det = a[0] * b[1] - a[1] * b[0];
    mu0.scale(&BigRational::new(det.into(), 2.into()))
}

fn coboundary(group: &Group, b: &CoboundaryFn, g: &Element, h: &Element) -> Phase {
    &(&b.eval(g) + &b.eval(h)) - &b.eval(&group.mul(g, h))
}

/// g(a, x) for the Sanov cocycle. It is linear in `a`: g(a,x) = c(x)·a with
/// c(wℓ) = c(w)·M_ℓ + c(ℓ), c(v₁) = (μ₁,0), c(v₂) = (0,μ₂).
pub fn sanov_g(a: [i64; 2], x: &[i8], mu1: &Phase, mu2: &Phase) -> Phase {
    let letter = |l: i8| -> [Phase; 2] {
        match l {
            1 => [mu1.clone(), Phase::zero()],
            2 => [Phase::zero(), mu2.clone()],
            -1 => [-mu1, mu1.scale_int(2)],
            -2 => [mu2.scale_int(2), -mu2],
            _ => unreachable!(),
        }
    };
    let mut c = [Phase::zero(), Phase::zero()];
    for &l in x {
        let m = sanov_letter_matrix(l);
        let cl = letter(l);
        c = [
            &(&c[0].scale_int(m[0][0]) + &c[1].scale_int(m[1][0])) + &cl[0],
            &(&c[0].scale_int(m[0][1]) + &c[1].scale_int(m[1][1])) + &cl[1],
        ];
    }
    &c[0].scale_int(a[0]) + &c[1].scale_int(a[1])
}

// ------------------------------------------------------------ verification

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub checked: usize,
    pub pass: bool,
    pub counterexample: Option<(Element, Element, Element)>,
}

/// Checks σ(g,h) + σ(gh,k) = σ(h,k) + σ(g,hk) exactly, first on every triple
/// from the radius-1 ball, then on `samples` random triples.
pub fn verify_cocycle_identity(sigma: &Cocycle, samples: usize, seed: u64, radius: u32) -> IdentityReport {
    let g = &sigma.group;
    let check = |a: &Element, b: &Element, c: &Element| {
        let ab = g.mul(a, b);
        let bc = g.mul(b, c);
        &sigma.eval(a, b) + &sigma.eval(&ab, c) == &sigma.eval(b, c) + &sigma.eval(a, &bc)
    };
    let small = match g.ball(1) {
        Ok(b) => b.elements,
        Err(_) => vec![g.identity()],
    };
    let mut checked = 0;
    let mut fail = None;
    'outer: for a in &small {
        for b in &small {
            for c in &small {
                checked += 1;
                if !check(a, b, c) {
                    fail = Some((a.clone(), b.clone(), c.clone()));
                    break 'outer;
                }
            }
        }
    }
    if fail.is_none() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let (a, b, c) = (g.sample(&mut rng, radius), g.sample(&mut rng, radius), g.sample(&mut rng, radius));
            checked += 1;
            if !check(&a, &b, &c) {
                fail = Some((a, b, c));
                break;
            }
        }
    }
    IdentityReport { checked, pass: fail.is_none(), counterexample: fail }
}

/// Normalization σ(g,e) = σ(e,g) = 0 on sampled g.
pub fn verify_normalized(sigma: &Cocycle, samples: usize, seed: u64, radius: u32) -> bool {
    let g = &sigma.group;
    let e = g.identity();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).all(|_| {
        let x = g.sample(&mut rng, radius);
        sigma.eval(&x, &e).is_zero() && sigma.eval(&e, &x).is_zero()
    })
}

/// The automorphism a lift is taken along.
#[derive(Clone, Debug, PartialEq)]
pub enum Action {
    /// n·e_k = e_{k+n}
    Shift,
    Matrix(Vec<Vec<i64>>),
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub pass: bool,
    /// Decided exactly rather than by sampling.
    pub certified: bool,
    pub witness: Option<(Element, Element)>,
}

fn act(action: &Action, x: &Element) -> Element {
    match (action, x) {
        (Action::Shift, Element::Sum(m)) => Element::Sum(m.iter().map(|(&k, &v)| (k + 1, v)).collect()),
        (Action::Matrix(a), Element::Vector(v)) => Element::Vector(crate::lattice::mat_vec(a, v)),
        _ => panic!("action does not apply to {x}"),
    }
}

/// Checks σ'(1·x, 1·y) = σ'(x,y).
pub fn verify_invariance(sigma: &Cocycle, action: &Action, samples: usize, seed: u64) -> InvarianceReport {
    let ok = |w: Option<(Element, Element)>, certified| InvarianceReport { pass: w.is_none(), certified, witness: w };
    match (&sigma.kind, action) {
        (CocycleKind::Trivial, _) => return ok(None, true),
        (CocycleKind::Theta(Theta::Window(w)), Action::Shift) => {
            let t = Theta::Window(w.clone());
            for &(j, k) in w.keys() {
                for (a, b) in [(j, k), (j - 1, k - 1)] {
                    if t.entry(a, b) != t.entry(a + 1, b + 1) {
                        return ok(Some((crate::groups::unit(a), crate::groups::unit(b))), true);
                    }
                }
            }
            return ok(None, true);
        }
        (CocycleKind::Theta(_) | CocycleKind::Bitstream(_), Action::Shift) => return ok(None, true),
        (CocycleKind::ZnBilinear(_) | CocycleKind::Sigma0(_), Action::Matrix(a)) => {
            // Bilinear: invariance on basis pairs is invariance everywhere.
            let n = a.len();
            let e = |i: usize| {
                let mut v = vec![0; n];
                v[i] = 1;
                Element::Vector(v)
            };
            for i in 0..n {
                for j in 0..n {
                    let (x, y) = (e(i), e(j));
                    if sigma.eval(&act(action, &x), &act(action, &y)) != sigma.eval(&x, &y) {
                        return ok(Some((x, y)), true);
                    }
                }
            }
            return ok(None, true);
        }
        _ => {}
    }
    let g = &sigma.group;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let (x, y) = (g.sample(&mut rng, 4), g.sample(&mut rng, 4));
        if sigma.eval(&act(action, &x), &act(action, &y)) != sigma.eval(&x, &y) {
            return ok(Some((x, y)), false);
        }
    }
    ok(None, false)
}

// ------------------------------------------------------------------ specs

/// JSON form of a cocycle, tagged by `kind`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CocycleSpec {
    Trivial,
    ThetaDiag {
        diagonals: Vec<Phase>,
        #[serde(default)]
        period: Vec<Phase>,
    },
    ThetaRule { rule: String },
    ThetaWindow { entries: Vec<(i64, i64, Phase)> },
    Bitstream {
        #[serde(flatten)]
        mu: Bitstream,
    },
    ZnBilinear { matrix: Vec<Vec<Phase>> },
    Sigma0 { mu0: Phase },
    Sanov { mu0: Phase, mu1: Phase, mu2: Phase },
    Bs { lambda: Phase },
    FreeTimesZ { mu: Phase, nu: Phase },
    Lift { base: Box<CocycleSpec> },
    Product { left: Box<CocycleSpec>, right: Box<CocycleSpec> },
    Coboundary { b: CoboundarySpec },
    Similar { sigma: Box<CocycleSpec>, b: CoboundarySpec },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoboundarySpec {
    Zero,
    Table { entries: Vec<(Value, Phase)> },
    LamplighterSplit {
        #[serde(flatten)]
        mu: Bitstream,
    },
}

fn build_b(group: &Group, spec: &CoboundarySpec, path: &str) -> Result<CoboundaryFn> {
    Ok(match spec {
        CoboundarySpec::Zero => CoboundaryFn::Zero,
        CoboundarySpec::Table { entries } => {
            let mut t = BTreeMap::new();
            for (i, (x, p)) in entries.iter().enumerate() {
                let x = group.parse_element(x).map_err(|e| Error::Config(format!("{path}.entries[{i}]: {e}")))?;
                if group.is_identity(&x) && !p.is_zero() {
                    return Err(Error::Config(format!("{path}.entries[{i}]: b(e) must be 0")));
                }
                t.insert(x, p.clone());
            }
            CoboundaryFn::Table(t)
        }
        CoboundarySpec::LamplighterSplit { mu } => {
            if *group.family() != Family::SumZ2 {
                return Err(Error::Config(format!("{path}: lamplighter_split needs sum_z2")));
            }
            CoboundaryFn::LamplighterSplit(Bitstream::new(mu.pre.clone(), mu.period.clone())?)
        }
    })
}

/// Builds and type-checks a cocycle from its spec; `path` prefixes errors.
pub fn build_cocycle(group: &Group, spec: &CocycleSpec, path: &str) -> Result<Cocycle> {
    let at = |e: Error| match e {
        Error::Config(m) => Error::Config(format!("{path}: {m}")),
        other => other,
    };
    let kind = match spec {
        CocycleSpec::Trivial => CocycleKind::Trivial,
        CocycleSpec::ThetaDiag { diagonals, period } => {
            CocycleKind::Theta(Theta::Diag { pre: diagonals.clone(), period: period.clone() })
        }
        CocycleSpec::ThetaRule { rule } => match rule.as_str() {
            "prime_reciprocal" => CocycleKind::Theta(Theta::PrimeReciprocal),
            other => return Err(Error::Config(format!("{path}.rule: unknown rule `{other}`"))),
        },
        CocycleSpec::ThetaWindow { entries } => {
            let mut w = BTreeMap::new();
            for (i, (j, k, p)) in entries.iter().enumerate() {
                if j >= k && !p.is_zero() {
                    return Err(Error::Config(format!(
                        "{path}.entries[{i}]: θ entry ({j},{k}) is on or below the diagonal"
                    )));
                }
                if !p.is_zero() {
                    w.insert((*j, *k), p.clone());
                }
            }
            CocycleKind::Theta(Theta::Window(w))
        }
        CocycleSpec::Bitstream { mu } => {
            CocycleKind::Bitstream(Bitstream::new(mu.pre.clone(), mu.period.clone()).map_err(at)?)
        }
        CocycleSpec::ZnBilinear { matrix } => CocycleKind::ZnBilinear(matrix.clone()),
        CocycleSpec::Sigma0 { mu0 } => CocycleKind::Sigma0(mu0.clone()),
        CocycleSpec::Sanov { mu0, mu1, mu2 } => {
            CocycleKind::Sanov { mu0: mu0.clone(), mu1: mu1.clone(), mu2: mu2.clone() }
        }
        CocycleSpec::Bs { lambda } => CocycleKind::Bs { lambda: lambda.clone() },
        CocycleSpec::FreeTimesZ { mu, nu } => CocycleKind::FreeTimesZ { mu: mu.clone(), nu: nu.clone() },
        CocycleSpec::Lift { base } => {
            let sub = Subgroup::Base;
            sub.check(group).map_err(|_| Error::Config(format!("{path}: lift needs a semidirect family")))?;
            let h = sub
                .own_group(group)
                .ok_or_else(|| Error::Config(format!("{path}: lift needs an infinite acting group")))?;
            CocycleKind::Lift(Box::new(build_cocycle(&h, base, &format!("{path}.base"))?))
        }
        CocycleSpec::Product { left, right } => {
            let (l, r) = group
                .factors()
                .ok_or_else(|| Error::Config(format!("{path}: product cocycle needs a product family")))?;
            CocycleKind::Product(
                Box::new(build_cocycle(&l, left, &format!("{path}.left"))?),
                Box::new(build_cocycle(&r, right, &format!("{path}.right"))?),
            )
        }
        CocycleSpec::Coboundary { b } => CocycleKind::Coboundary(build_b(group, b, &format!("{path}.b"))?),
        CocycleSpec::Similar { sigma, b } => CocycleKind::Similar(
            Box::new(build_cocycle(group, sigma, &format!("{path}.sigma"))?),
            build_b(group, b, &format!("{path}.b"))?,
        ),
    };
    Cocycle::new(group, kind).map_err(at)
}
