//! Group families, normal forms, products, balls and word lengths.
//!
//! Every [`Element`] is stored in normal form, so structural equality is
//! group equality. Balls are breadth-first over the family's standard
//! symmetric generating set and are capped by a node budget.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{json, Value};

use crate::lattice;
use crate::{Error, Result};

pub const DEFAULT_NODE_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LampBase {
    Z,
    Z2,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// ⊕_ℤ ℤ
    SumZ,
    /// ⊕_ℤ ℤ₂
    SumZ2,
    /// ℤⁿ
    Zn { n: usize },
    /// base ≀ ℤ, or base ≀ ℤ_q when `acting` is set.
    Wreath {
        base: LampBase,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        acting: Option<u32>,
    },
    /// ℤⁿ ⋊_A ℤ
    ZnSemidirect {
        #[serde(rename = "A")]
        a: Vec<Vec<i64>>,
    },
    /// ℤ² ⋊ 𝔽₂ with 𝔽₂ = ⟨[[1,2],[0,1]], [[1,0],[2,1]]⟩.
    Sanov,
    /// BS(n,n) = ⟨a, b | a bⁿ a⁻¹ = bⁿ⟩.
    BsNn { n: u32 },
    Free { rank: u8 },
    /// 𝔽₂ × ℤ
    FreeTimesZ,
    Product { left: Box<Family>, right: Box<Family> },
}

impl Family {
    pub fn name(&self) -> String {
        match self {
            Family::SumZ => "sum_z".into(),
            Family::SumZ2 => "sum_z2".into(),
            Family::Zn { n } => format!("Z^{n}"),
            Family::Wreath { base, acting } => {
                let b = match base {
                    LampBase::Z => "Z",
                    LampBase::Z2 => "Z2",
                };
                match acting {
                    Some(q) => format!("{b} wr Z{q}"),
                    None => format!("{b} wr Z"),
                }
            }
            Family::ZnSemidirect { a } => format!("Z^{} x_A Z", a.len()),
            Family::Sanov => "sanov".into(),
            Family::BsNn { n } => format!("BS({n},{n})"),
            Family::Free { rank } => format!("F{rank}"),
            Family::FreeTimesZ => "F2 x Z".into(),
            Family::Product { left, right } => format!("({}) x ({})", left.name(), right.name()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Family::Zn { n } if *n == 0 => Err(Error::Config("zn: n must be positive".into())),
            Family::Wreath { acting: Some(q), .. } if *q < 2 => {
                Err(Error::Config("wreath: acting order must be at least 2".into()))
            }
            Family::ZnSemidirect { a } => {
                let n = a.len();
                if n == 0 || a.iter().any(|r| r.len() != n) {
                    return Err(Error::Config("zn_semidirect: A must be a nonempty square matrix".into()));
                }
                let d = lattice::det_i64(a);
                if d != 1 && d != -1 {
                    return Err(Error::Config(format!("zn_semidirect: det A = {d}, expected ±1")));
                }
                Ok(())
            }
            Family::BsNn { n } if *n < 2 => Err(Error::Config("bs_nn: n must be at least 2".into())),
            Family::Free { rank } if *rank == 0 || *rank > 26 => {
                Err(Error::Config("free: rank must be in 1..=26".into()))
            }
            Family::Product { left, right } => {
                left.validate()?;
                right.validate()
            }
            _ => Ok(()),
        }
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            Family::SumZ | Family::SumZ2 | Family::Zn { .. } => true,
            Family::Free { rank } => *rank == 1,
            Family::ZnSemidirect { a } => lattice::is_identity(a),
            Family::Product { left, right } => left.is_abelian() && right.is_abelian(),
            _ => false,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Family::Wreath { base: LampBase::Z2, acting: Some(_) } => true,
            Family::Product { left, right } => left.is_finite() && right.is_finite(),
            _ => false,
        }
    }

    pub fn is_amenable(&self) -> bool {
        match self {
            Family::Sanov | Family::FreeTimesZ => false,
            Family::Free { rank } => *rank == 1,
            Family::BsNn { .. } => false,
            Family::Product { left, right } => left.is_amenable() && right.is_amenable(),
            _ => true,
        }
    }
}

/// One syllable of a BS(n,n) normal form modulo the centre ⟨bⁿ⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Syl {
    /// `a^k`, k ≠ 0
    A(i64),
    /// `b^r`, 0 < r < n
    B(i64),
}

/// A group element in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    /// Finitely supported sequence; zero entries are never stored.
    Sum(BTreeMap<i64, i64>),
    Vector(Vec<i64>),
    Wreath { lamps: BTreeMap<i64, i64>, shift: i64 },
    Semi { v: Vec<i64>, k: i64 },
    /// Letters ±1 = v₁^{±1}, ±2 = v₂^{±1}.
    Sanov { v: [i64; 2], w: Vec<i8> },
    /// Free-product normal form in ℤ * ℤ_n times the central power `b^{cn}`.
    Bs { n: u32, syl: Vec<Syl>, c: i64 },
    /// Reduced word; letter ±i is the i-th generator or its inverse.
    Word(Vec<i8>),
    FreeZ { w: Vec<i8>, m: i64 },
    Pair(Box<Element>, Box<Element>),
}

// ---------------------------------------------------------------- words

pub(crate) fn word_push(w: &mut Vec<i8>, l: i8) {
    if w.last() == Some(&-l) {
        w.pop();
    } else {
        w.push(l);
    }
}

pub(crate) fn word_mul(a: &[i8], b: &[i8]) -> Vec<i8> {
    let mut w = a.to_vec();
    for &l in b {
        word_push(&mut w, l);
    }
    w
}

pub(crate) fn word_inv(a: &[i8]) -> Vec<i8> {
    a.iter().rev().map(|l| -l).collect()
}

pub(crate) fn render_word(w: &[i8]) -> String {
    if w.is_empty() {
        return "e".into();
    }
    w.iter()
        .map(|&l| {
            let c = (b'a' + (l.unsigned_abs() - 1)) as char;
            if l > 0 {
                c.to_string()
            } else {
                c.to_ascii_uppercase().to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub(crate) fn parse_letters(s: &str, rank: u8) -> Result<Vec<i8>> {
    let mut out = Vec::new();
    let t = s.trim();
    if t == "e" || t.is_empty() {
        return Ok(out);
    }
    for ch in t.chars().filter(|c| !c.is_whitespace()) {
        if !ch.is_ascii_alphabetic() {
            return Err(Error::Config(format!("bad letter `{ch}` in word `{s}`")));
        }
        let idx = (ch.to_ascii_lowercase() as u8 - b'a' + 1) as i8;
        if idx as u8 > rank {
            return Err(Error::Config(format!("letter `{ch}` exceeds rank {rank}")));
        }
        out.push(if ch.is_ascii_uppercase() { -idx } else { idx });
    }
    Ok(out)
}

fn free_reduce(letters: &[i8]) -> Vec<i8> {
    let mut w = Vec::new();
    for &l in letters {
        word_push(&mut w, l);
    }
    w
}

/// Primitive root r of a reduced word w, so that w = r^k with k maximal.
pub fn word_root(w: &[i8]) -> (Vec<i8>, usize) {
    if w.is_empty() {
        return (Vec::new(), 0);
    }
    // w = u c u⁻¹ with c cyclically reduced
    let mut i = 0;
    while i < w.len() - 1 - i && w[i] == -w[w.len() - 1 - i] {
        i += 1;
    }
    let (u, c) = (&w[..i], &w[i..w.len() - i]);
    let n = c.len();
    let p = (1..=n).find(|&p| n % p == 0 && (0..n).all(|j| c[j] == c[j % p])).unwrap();
    let mut r = u.to_vec();
    r.extend_from_slice(&c[..p]);
    (word_mul(&r, &word_inv(u)), n / p)
}

/// Exponent sum of generator `g` (1-based) in a word.
pub fn exponent_sum(w: &[i8], g: i8) -> i64 {
    w.iter()
        .map(|&l| if l == g { 1 } else if l == -g { -1 } else { 0 })
        .sum()
}

// ---------------------------------------------------------- sparse maps

fn sparse_add(m: &mut BTreeMap<i64, i64>, k: i64, v: i64, modulus: Option<i64>) {
    let e = m.entry(k).or_insert(0);
    *e += v;
    if let Some(q) = modulus {
        *e = e.rem_euclid(q);
    }
    if *e == 0 {
        m.remove(&k);
    }
}

fn shift_map(m: &BTreeMap<i64, i64>, by: i64, period: Option<i64>) -> BTreeMap<i64, i64> {
    m.iter()
        .map(|(&k, &v)| {
            let j = match period {
                Some(q) => (k + by).rem_euclid(q),
                None => k + by,
            };
            (j, v)
        })
        .collect()
}

// ------------------------------------------------------------- Sanov

const SANOV_MATS: [[[i64; 2]; 2]; 2] = [[[1, 2], [0, 1]], [[1, 0], [2, 1]]];

/// Matrix of a signed Sanov letter.
pub fn sanov_letter_matrix(l: i8) -> [[i64; 2]; 2] {
    let m = SANOV_MATS[(l.unsigned_abs() - 1) as usize];
    if l > 0 {
        m
    } else {
        [[m[0][0], -m[0][1]], [-m[1][0], m[1][1]]]
    }
}

fn mat2_apply(m: &[[i64; 2]; 2], v: [i64; 2]) -> [i64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// `x·v` for a Sanov word `x`, folding letters right to left.
pub fn sanov_act(w: &[i8], v: [i64; 2]) -> [i64; 2] {
    w.iter().rev().fold(v, |acc, &l| mat2_apply(&sanov_letter_matrix(l), acc))
}

// ---------------------------------------------------------------- BS

fn bs_push(syl: &mut Vec<Syl>, c: &mut i64, s: Syl, n: i64) {
    match s {
        Syl::A(0) => {}
        Syl::A(i) => match syl.last_mut() {
            Some(Syl::A(j)) => {
                *j += i;
                if *j == 0 {
                    syl.pop();
                }
            }
            _ => syl.push(Syl::A(i)),
        },
        Syl::B(r) => {
            *c += r.div_euclid(n);
            let r = r.rem_euclid(n);
            if r == 0 {
                return;
            }
            match syl.last_mut() {
                Some(Syl::B(s)) => {
                    *s += r;
                    if *s >= n {
                        *s -= n;
                        *c += 1;
                    }
                    if *s == 0 {
                        syl.pop();
                    }
                }
                _ => syl.push(Syl::B(r)),
            }
        }
    }
}

fn bs_from_letters(n: u32, letters: &[i8]) -> Element {
    let (mut syl, mut c) = (Vec::new(), 0);
    for &l in letters {
        let s = match l {
            1 => Syl::A(1),
            -1 => Syl::A(-1),
            2 => Syl::B(1),
            _ => Syl::B(-1),
        };
        bs_push(&mut syl, &mut c, s, n as i64);
    }
    Element::Bs { n, syl, c }
}

/// Exponent sums (φ₁, φ₂) of a BS(n,n) element in a and b.
pub fn bs_abelianization(g: &Element) -> (i64, i64) {
    match g {
        Element::Bs { n, syl, c } => {
            let mut p = (0, *c * *n as i64);
            for s in syl {
                match s {
                    Syl::A(i) => p.0 += i,
                    Syl::B(r) => p.1 += r,
                }
            }
            p
        }
        _ => panic!("not a BS element"),
    }
}

impl Element {
    /// Word over {a, b}: the central power is merged into the last b-syllable.
    fn bs_letters(n: u32, syl: &[Syl], c: i64) -> Vec<i8> {
        let last_b = syl.iter().rposition(|s| matches!(s, Syl::B(_)));
        let mut out = Vec::new();
        let emit = |out: &mut Vec<i8>, l: i8, k: i64| {
            for _ in 0..k.abs() {
                out.push(if k > 0 { l } else { -l });
            }
        };
        for (i, s) in syl.iter().enumerate() {
            match *s {
                Syl::A(k) => emit(&mut out, 1, k),
                Syl::B(r) => {
                    let k = if Some(i) == last_b { r + c * n as i64 } else { r };
                    emit(&mut out, 2, k);
                }
            }
        }
        if last_b.is_none() {
            emit(&mut out, 2, c * n as i64);
        }
        out
    }

    pub fn render(&self) -> Value {
        match self {
            Element::Sum(m) => sparse_json(m),
            Element::Vector(v) => json!(v),
            Element::Wreath { lamps, shift } => json!({"lamps": sparse_json(lamps), "shift": shift}),
            Element::Semi { v, k } => json!({"v": v, "k": k}),
            Element::Sanov { v, w } => json!({"v": v, "w": render_word(w)}),
            Element::Bs { n, syl, c } => json!(render_word(&Element::bs_letters(*n, syl, *c))),
            Element::Word(w) => json!(render_word(w)),
            Element::FreeZ { w, m } => json!({"w": render_word(w), "m": m}),
            Element::Pair(a, b) => json!([a.render(), b.render()]),
        }
    }

    /// Exponent sums for BS(n,n) elements.
    pub fn bs_phi(&self) -> (i64, i64) {
        bs_abelianization(self)
    }
}

fn sparse_json(m: &BTreeMap<i64, i64>) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.to_string(), json!(v))).collect())
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.render().serialize(s)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.render() {
            Value::String(s) => write!(f, "{s}"),
            v => write!(f, "{v}"),
        }
    }
}

/// Unit vector `e_k` in ⊕ℤ or ⊕ℤ₂.
pub fn unit(k: i64) -> Element {
    Element::Sum(BTreeMap::from([(k, 1)]))
}

/// Sparse element from `(index, value)` pairs; values are added up.
pub fn sparse(entries: &[(i64, i64)]) -> Element {
    let mut m = BTreeMap::new();
    for &(k, v) in entries {
        sparse_add(&mut m, k, v, None);
    }
    Element::Sum(m)
}

/// Elements of a ball together with their word lengths, in BFS order.
#[derive(Clone, Debug)]
pub struct Ball {
    pub elements: Vec<Element>,
    pub dist: Vec<u32>,
    index: HashMap<Element, usize>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, g: &Element) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.index.contains_key(g)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Element> {
        self.elements.iter()
    }

    fn from_pairs(pairs: Vec<(Element, u32)>) -> Ball {
        let mut index = HashMap::with_capacity(pairs.len());
        let mut elements = Vec::with_capacity(pairs.len());
        let mut dist = Vec::with_capacity(pairs.len());
        for (g, d) in pairs {
            if index.contains_key(&g) {
                continue;
            }
            index.insert(g.clone(), elements.len());
            elements.push(g);
            dist.push(d);
        }
        Ball { elements, dist, index }
    }
}

/// A validated family together with its search budget.
#[derive(Clone, Debug)]
pub struct Group {
    family: Family,
    pub node_cap: usize,
    a_inv: Option<Vec<Vec<i64>>>,
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family
    }
}

impl Group {
    pub fn new(family: Family) -> Result<Group> {
        family.validate()?;
        let a_inv = match &family {
            Family::ZnSemidirect { a } => Some(lattice::unimodular_inverse(a)),
            _ => None,
        };
        Ok(Group { family, node_cap: DEFAULT_NODE_CAP, a_inv })
    }

    pub fn with_node_cap(mut self, cap: usize) -> Group {
        self.node_cap = cap;
        self
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn name(&self) -> String {
        self.family.name()
    }

    fn factor(&self, f: &Family) -> Group {
        Group::new(f.clone()).expect("validated").with_node_cap(self.node_cap)
    }

    /// The two factors of a direct product.
    pub fn factors(&self) -> Option<(Group, Group)> {
        match &self.family {
            Family::Product { left, right } => Some((self.factor(left), self.factor(right))),
            _ => None,
        }
    }

    fn period(&self) -> Option<i64> {
        match self.family {
            Family::Wreath { acting, .. } => acting.map(i64::from),
            _ => None,
        }
    }

    fn lamp_mod(&self) -> Option<i64> {
        match self.family {
            Family::SumZ2 | Family::Wreath { base: LampBase::Z2, .. } => Some(2),
            _ => None,
        }
    }

    pub fn identity(&self) -> Element {
        match &self.family {
            Family::SumZ | Family::SumZ2 => Element::Sum(BTreeMap::new()),
            Family::Zn { n } => Element::Vector(vec![0; *n]),
            Family::Wreath { .. } => Element::Wreath { lamps: BTreeMap::new(), shift: 0 },
            Family::ZnSemidirect { a } => Element::Semi { v: vec![0; a.len()], k: 0 },
            Family::Sanov => Element::Sanov { v: [0, 0], w: vec![] },
            Family::BsNn { n } => Element::Bs { n: *n, syl: vec![], c: 0 },
            Family::Free { .. } => Element::Word(vec![]),
            Family::FreeTimesZ => Element::FreeZ { w: vec![], m: 0 },
            Family::Product { .. } => {
                let (l, r) = self.factors().unwrap();
                Element::Pair(Box::new(l.identity()), Box::new(r.identity()))
            }
        }
    }

    pub fn is_identity(&self, g: &Element) -> bool {
        *g == self.identity()
    }

    /// True when `g` is a well-formed normal form of this family.
    pub fn contains(&self, g: &Element) -> bool {
        let m = self.lamp_mod();
        let lamps_ok = |l: &BTreeMap<i64, i64>| {
            l.values().all(|&v| v != 0 && m.is_none_or(|q| (0..q).contains(&v)))
                && self.period().is_none_or(|q| l.keys().all(|k| (0..q).contains(k)))
        };
        let reduced = |w: &[i8], rank: u8| {
            w.iter().all(|l| *l != 0 && l.unsigned_abs() <= rank) && w.windows(2).all(|p| p[0] != -p[1])
        };
        match (&self.family, g) {
            (Family::SumZ | Family::SumZ2, Element::Sum(l)) => lamps_ok(l),
            (Family::Zn { n }, Element::Vector(v)) => v.len() == *n,
            (Family::Wreath { .. }, Element::Wreath { lamps, shift }) => {
                lamps_ok(lamps) && self.period().is_none_or(|q| (0..q).contains(shift))
            }
            (Family::ZnSemidirect { a }, Element::Semi { v, .. }) => v.len() == a.len(),
            (Family::Sanov, Element::Sanov { w, .. }) => reduced(w, 2),
            (Family::BsNn { n }, Element::Bs { n: m, syl, .. }) => {
                n == m
                    && syl.iter().all(|s| match *s {
                        Syl::A(k) => k != 0,
                        Syl::B(r) => r > 0 && r < *n as i64,
                    })
                    && syl.windows(2).all(|p| std::mem::discriminant(&p[0]) != std::mem::discriminant(&p[1]))
            }
            (Family::Free { rank }, Element::Word(w)) => reduced(w, *rank),
            (Family::FreeTimesZ, Element::FreeZ { w, .. }) => reduced(w, 2),
            (Family::Product { .. }, Element::Pair(a, b)) => {
                let (l, r) = self.factors().unwrap();
                l.contains(a) && r.contains(b)
            }
            _ => false,
        }
    }

    fn check(&self, g: &Element) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::FamilyMismatch(format!("{g} is not a normal-form element of {}", self.name())))
        }
    }

    /// Checked product.
    pub fn compose(&self, g: &Element, h: &Element) -> Result<Element> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul(g, h))
    }

    /// Product of two elements already known to belong to this family.
    pub fn mul(&self, g: &Element, h: &Element) -> Element {
        match (&self.family, g, h) {
            (Family::SumZ | Family::SumZ2, Element::Sum(x), Element::Sum(y)) => {
                let mut z = x.clone();
                for (&k, &v) in y {
                    sparse_add(&mut z, k, v, self.lamp_mod());
                }
                Element::Sum(z)
            }
            (Family::Zn { .. }, Element::Vector(x), Element::Vector(y)) => {
                Element::Vector(x.iter().zip(y).map(|(a, b)| a + b).collect())
            }
            (Family::Wreath { .. }, Element::Wreath { lamps: x, shift: k }, Element::Wreath { lamps: y, shift: l }) => {
                let p = self.period();
                let mut z = x.clone();
                for (j, v) in shift_map(y, *k, p) {
                    sparse_add(&mut z, j, v, self.lamp_mod());
                }
                let s = match p {
                    Some(q) => (k + l).rem_euclid(q),
                    None => k + l,
                };
                Element::Wreath { lamps: z, shift: s }
            }
            (Family::ZnSemidirect { .. }, Element::Semi { v, k }, Element::Semi { v: w, k: l }) => {
                let aw = self.act_semi(*k, w);
                Element::Semi { v: v.iter().zip(&aw).map(|(a, b)| a + b).collect(), k: k + l }
            }
            (Family::Sanov, Element::Sanov { v: a, w: x }, Element::Sanov { v: b, w: y }) => {
                let xb = sanov_act(x, *b);
                Element::Sanov { v: [a[0] + xb[0], a[1] + xb[1]], w: word_mul(x, y) }
            }
            (Family::BsNn { n }, Element::Bs { syl: s1, c: c1, .. }, Element::Bs { syl: s2, c: c2, .. }) => {
                let (mut syl, mut c) = (s1.clone(), c1 + c2);
                for &s in s2 {
                    bs_push(&mut syl, &mut c, s, *n as i64);
                }
                Element::Bs { n: *n, syl, c }
            }
            (Family::Free { .. }, Element::Word(x), Element::Word(y)) => Element::Word(word_mul(x, y)),
            (Family::FreeTimesZ, Element::FreeZ { w: x, m }, Element::FreeZ { w: y, m: n }) => {
                Element::FreeZ { w: word_mul(x, y), m: m + n }
            }
            (Family::Product { .. }, Element::Pair(a, b), Element::Pair(c, d)) => {
                let (l, r) = self.factors().unwrap();
                Element::Pair(Box::new(l.mul(a, c)), Box::new(r.mul(b, d)))
            }
            _ => panic!("family mismatch in mul: {g} * {h} in {}", self.name()),
        }
    }

    /// `A^k w` in the ℤⁿ ⋊_A ℤ family.
    pub fn act_semi(&self, k: i64, w: &[i64]) -> Vec<i64> {
        let a = match &self.family {
            Family::ZnSemidirect { a } => a,
            _ => panic!("not a semidirect family"),
        };
        let m = if k >= 0 { a } else { self.a_inv.as_ref().unwrap() };
        let mut v = w.to_vec();
        for _ in 0..k.unsigned_abs() {
            v = lattice::mat_vec(m, &v);
        }
        v
    }

    pub fn invert(&self, g: &Element) -> Element {
        match (&self.family, g) {
            (Family::SumZ | Family::SumZ2, Element::Sum(x)) => {
                let mut z = BTreeMap::new();
                for (&k, &v) in x {
                    sparse_add(&mut z, k, -v, self.lamp_mod());
                }
                Element::Sum(z)
            }
            (Family::Zn { .. }, Element::Vector(x)) => Element::Vector(x.iter().map(|a| -a).collect()),
            (Family::Wreath { .. }, Element::Wreath { lamps, shift }) => {
                let p = self.period();
                let mut z = BTreeMap::new();
                for (j, v) in shift_map(lamps, -shift, p) {
                    sparse_add(&mut z, j, -v, self.lamp_mod());
                }
                let s = match p {
                    Some(q) => (-shift).rem_euclid(q),
                    None => -shift,
                };
                Element::Wreath { lamps: z, shift: s }
            }
            (Family::ZnSemidirect { .. }, Element::Semi { v, k }) => {
                let w = self.act_semi(-k, v);
                Element::Semi { v: w.iter().map(|a| -a).collect(), k: -k }
            }
            (Family::Sanov, Element::Sanov { v, w }) => {
                let wi = word_inv(w);
                let u = sanov_act(&wi, *v);
                Element::Sanov { v: [-u[0], -u[1]], w: wi }
            }
            (Family::BsNn { n }, Element::Bs { syl, c, .. }) => {
                let (mut out, mut cc) = (Vec::new(), -c);
                for s in syl.iter().rev() {
                    let t = match *s {
                        Syl::A(k) => Syl::A(-k),
                        Syl::B(r) => Syl::B(-r),
                    };
                    bs_push(&mut out, &mut cc, t, *n as i64);
                }
                Element::Bs { n: *n, syl: out, c: cc }
            }
            (Family::Free { .. }, Element::Word(w)) => Element::Word(word_inv(w)),
            (Family::FreeTimesZ, Element::FreeZ { w, m }) => Element::FreeZ { w: word_inv(w), m: -m },
            (Family::Product { .. }, Element::Pair(a, b)) => {
                let (l, r) = self.factors().unwrap();
                Element::Pair(Box::new(l.invert(a)), Box::new(r.invert(b)))
            }
            _ => panic!("family mismatch in invert: {g} in {}", self.name()),
        }
    }

    /// `g h g⁻¹`.
    pub fn conjugate(&self, g: &Element, h: &Element) -> Element {
        self.mul(&self.mul(g, h), &self.invert(g))
    }

    pub fn commutes(&self, g: &Element, h: &Element) -> bool {
        self.mul(g, h) == self.mul(h, g)
    }

    /// Symmetric standard generating set. Empty for the ⊕-families, whose
    /// lengths are inherited from the wreath product.
    pub fn generators(&self) -> Vec<Element> {
        let mut out: Vec<Element> = match &self.family {
            Family::SumZ | Family::SumZ2 => vec![],
            Family::Zn { n } => (0..*n)
                .flat_map(|i| {
                    [1, -1].map(|s| {
                        let mut v = vec![0; *n];
                        v[i] = s;
                        Element::Vector(v)
                    })
                })
                .collect(),
            Family::Wreath { base, acting } => {
                let mut g = vec![Element::Wreath { lamps: BTreeMap::from([(0, 1)]), shift: 0 }];
                if *base == LampBase::Z {
                    g.push(Element::Wreath { lamps: BTreeMap::from([(0, -1)]), shift: 0 });
                }
                let q = acting.map(i64::from);
                for s in [1i64, -1] {
                    let s = q.map_or(s, |q| s.rem_euclid(q));
                    g.push(Element::Wreath { lamps: BTreeMap::new(), shift: s });
                }
                g
            }
            Family::ZnSemidirect { a } => {
                let n = a.len();
                let mut g: Vec<Element> = (0..n)
                    .flat_map(|i| {
                        [1, -1].map(|s| {
                            let mut v = vec![0; n];
                            v[i] = s;
                            Element::Semi { v, k: 0 }
                        })
                    })
                    .collect();
                g.push(Element::Semi { v: vec![0; n], k: 1 });
                g.push(Element::Semi { v: vec![0; n], k: -1 });
                g
            }
            Family::Sanov => {
                let mut g = vec![];
                for v in [[1, 0], [-1, 0], [0, 1], [0, -1]] {
                    g.push(Element::Sanov { v, w: vec![] });
                }
                for l in [1, -1, 2, -2] {
                    g.push(Element::Sanov { v: [0, 0], w: vec![l] });
                }
                g
            }
            Family::BsNn { n } => [1, -1, 2, -2].iter().map(|&l| bs_from_letters(*n, &[l])).collect(),
            Family::Free { rank } => {
                (1..=*rank as i8).flat_map(|i| [i, -i]).map(|l| Element::Word(vec![l])).collect()
            }
            Family::FreeTimesZ => {
                let mut g: Vec<Element> = [1, -1, 2, -2].iter().map(|&l| Element::FreeZ { w: vec![l], m: 0 }).collect();
                g.push(Element::FreeZ { w: vec![], m: 1 });
                g.push(Element::FreeZ { w: vec![], m: -1 });
                g
            }
            Family::Product { .. } => {
                let (l, r) = self.factors().unwrap();
                let (el, er) = (l.identity(), r.identity());
                let mut g: Vec<Element> =
                    l.generators().into_iter().map(|x| Element::Pair(Box::new(x), Box::new(er.clone()))).collect();
                g.extend(r.generators().into_iter().map(|y| Element::Pair(Box::new(el.clone()), Box::new(y))));
                g
            }
        };
        let mut seen = HashSet::new();
        out.retain(|g| seen.insert(g.clone()));
        out
    }

    /// The ambient wreath product whose word length the ⊕-family inherits.
    fn ambient_wreath(&self) -> Option<Group> {
        let base = match self.family {
            Family::SumZ => LampBase::Z,
            Family::SumZ2 => LampBase::Z2,
            _ => return None,
        };
        Some(self.factor(&Family::Wreath { base, acting: None }))
    }

    /// All elements of word length ≤ `r`, in BFS order.
    pub fn ball(&self, r: u32) -> Result<Ball> {
        if let Some(w) = self.ambient_wreath() {
            let b = w.ball(r)?;
            let pairs = b
                .elements
                .into_iter()
                .zip(b.dist)
                .filter_map(|(g, d)| match g {
                    Element::Wreath { lamps, shift: 0 } => Some((Element::Sum(lamps), d)),
                    _ => None,
                })
                .collect::<Vec<_>>();
            return Ok(Ball::from_pairs(pairs));
        }
        let gens = self.generators();
        let e = self.identity();
        let mut index = HashMap::new();
        index.insert(e.clone(), 0usize);
        let mut elements = vec![e];
        let mut dist = vec![0u32];
        let mut start = 0;
        for d in 1..=r {
            let end = elements.len();
            for i in start..end {
                for s in &gens {
                    let h = self.mul(&elements[i], s);
                    if !index.contains_key(&h) {
                        if elements.len() >= self.node_cap {
                            return Err(Error::Budget { radius: r, cap: self.node_cap });
                        }
                        index.insert(h.clone(), elements.len());
                        elements.push(h);
                        dist.push(d);
                    }
                }
            }
            if elements.len() == end {
                break;
            }
            start = end;
        }
        Ok(Ball { elements, dist, index })
    }

    /// Every element of a finite group.
    pub fn elements(&self) -> Result<Vec<Element>> {
        if !self.family.is_finite() {
            return Err(Error::Invalid(format!("{} is infinite", self.name())));
        }
        let b = self.ball(u32::MAX)?;
        Ok(b.elements)
    }

    /// `{h g h⁻¹ : h ∈ ball(R)}`, in order of first appearance.
    pub fn conjugacy_class_partial(&self, g: &Element, r: u32) -> Result<Vec<Element>> {
        let b = self.ball(r)?;
        let mut seen = HashSet::new();
        Ok(b.elements
            .iter()
            .map(|h| self.conjugate(h, g))
            .filter(|x| seen.insert(x.clone()))
            .collect())
    }

    /// `{h ∈ ball(R) : gh = hg}`.
    pub fn commuting_ball(&self, g: &Element, r: u32) -> Result<Vec<Element>> {
        Ok(self.ball(r)?.elements.into_iter().filter(|h| self.commutes(g, h)).collect())
    }

    /// Exact centrality test: commuting with every generator.
    pub fn is_central(&self, g: &Element) -> bool {
        if self.family.is_abelian() {
            return true;
        }
        self.generators().iter().all(|s| self.commutes(g, s))
    }

    /// Whether the conjugacy class of `g` is certified finite by a rule:
    /// abelian family, finite group, or central element.
    pub fn class_certified_finite(&self, g: &Element) -> bool {
        if self.family.is_abelian() || self.family.is_finite() || self.is_central(g) {
            return true;
        }
        match (&self.family, g) {
            (Family::Product { .. }, Element::Pair(a, b)) => {
                let (l, r) = self.factors().unwrap();
                l.class_certified_finite(a) && r.class_certified_finite(b)
            }
            _ => false,
        }
    }

    /// Word length from a closed form, where one is known.
    pub fn length_closed_form(&self, g: &Element) -> Option<u64> {
        match (&self.family, g) {
            (Family::SumZ | Family::SumZ2, Element::Sum(x)) => Some(lamplighter_length(x, 0)),
            (Family::Wreath { acting: None, .. }, Element::Wreath { lamps, shift }) => {
                Some(lamplighter_length(lamps, *shift))
            }
            (Family::Zn { .. }, Element::Vector(v)) => Some(v.iter().map(|a| a.unsigned_abs()).sum()),
            (Family::Free { .. }, Element::Word(w)) => Some(w.len() as u64),
            (Family::FreeTimesZ, Element::FreeZ { w, m }) => Some(w.len() as u64 + m.unsigned_abs()),
            (Family::Product { .. }, Element::Pair(a, b)) => {
                let (l, r) = self.factors().unwrap();
                Some(l.length_closed_form(a)? + r.length_closed_form(b)?)
            }
            _ => None,
        }
    }

    /// Pseudo-random element: a random walk of length at most `radius`,
    /// or for ⊕-families a random sparse vector with ℓ¹-norm at most `radius`.
    pub fn sample<R: Rng>(&self, rng: &mut R, radius: u32) -> Element {
        if self.ambient_wreath().is_some() {
            let mut m = BTreeMap::new();
            let r = radius as i64;
            let budget = rng.gen_range(0..=r);
            for _ in 0..budget {
                let k = rng.gen_range(-r..=r);
                let v = if rng.gen_bool(0.5) { 1 } else { -1 };
                sparse_add(&mut m, k, v, self.lamp_mod());
            }
            return Element::Sum(m);
        }
        let gens = self.generators();
        let len = rng.gen_range(0..=radius);
        let mut g = self.identity();
        for _ in 0..len {
            g = self.mul(&g, &gens[rng.gen_range(0..gens.len())]);
        }
        g
    }

    /// Parses the JSON element syntax of this family.
    pub fn parse_element(&self, v: &Value) -> Result<Element> {
        let bad = |what: &str| Error::Config(format!("{}: cannot read element {v}: {what}", self.name()));
        let int = |x: &Value| x.as_i64().ok_or_else(|| bad("expected integer"));
        let sparse_of = |x: &Value| -> Result<BTreeMap<i64, i64>> {
            let mut m = BTreeMap::new();
            match x {
                Value::Object(o) => {
                    for (k, val) in o {
                        let k: i64 = k.parse().map_err(|_| bad("sparse key must be an integer"))?;
                        sparse_add(&mut m, k, int(val)?, self.lamp_mod());
                    }
                }
                Value::Array(a) => {
                    for k in a {
                        sparse_add(&mut m, int(k)?, 1, self.lamp_mod());
                    }
                }
                _ => return Err(bad("expected object or index list")),
            }
            if let Some(q) = self.period() {
                m = m.into_iter().fold(BTreeMap::new(), |mut acc, (k, v)| {
                    sparse_add(&mut acc, k.rem_euclid(q), v, self.lamp_mod());
                    acc
                });
            }
            Ok(m)
        };
        let vec_of = |x: &Value, n: usize| -> Result<Vec<i64>> {
            let a = x.as_array().ok_or_else(|| bad("expected array"))?;
            if a.len() != n {
                return Err(bad(&format!("expected {n} entries")));
            }
            a.iter().map(int).collect()
        };
        let word_of = |x: &Value, rank: u8| -> Result<Vec<i8>> {
            Ok(free_reduce(&parse_letters(x.as_str().ok_or_else(|| bad("expected word string"))?, rank)?))
        };
        let g = match &self.family {
            Family::SumZ | Family::SumZ2 => Element::Sum(sparse_of(v)?),
            Family::Zn { n } => Element::Vector(vec_of(v, *n)?),
            Family::Wreath { .. } => {
                let shift = int(&v["shift"])?;
                let shift = self.period().map_or(shift, |q| shift.rem_euclid(q));
                Element::Wreath { lamps: sparse_of(&v["lamps"])?, shift }
            }
            Family::ZnSemidirect { a } => Element::Semi { v: vec_of(&v["v"], a.len())?, k: int(&v["k"])? },
            Family::Sanov => {
                let a = vec_of(&v["v"], 2)?;
                Element::Sanov { v: [a[0], a[1]], w: word_of(&v["w"], 2)? }
            }
            Family::BsNn { n } => {
                let s = v.as_str().ok_or_else(|| bad("expected word string"))?;
                bs_from_letters(*n, &parse_letters(s, 2)?)
            }
            Family::Free { rank } => Element::Word(word_of(v, *rank)?),
            Family::FreeTimesZ => Element::FreeZ { w: word_of(&v["w"], 2)?, m: int(&v["m"])? },
            Family::Product { .. } => {
                let (l, r) = self.factors().unwrap();
                let a = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("expected [left, right]"))?;
                Element::Pair(Box::new(l.parse_element(&a[0])?), Box::new(r.parse_element(&a[1])?))
            }
        };
        Ok(g)
    }

    /// Element from a word in the generators (BS, free, Sanov letters).
    pub fn word(&self, s: &str) -> Result<Element> {
        self.parse_element(&Value::String(s.into()))
    }
}

/// Recognized subgroups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subgroup {
    Trivial,
    Whole,
    /// The ⊕-part of a wreath product, ℤⁿ in ℤⁿ⋊ℤ, ℤ² in the Sanov group.
    Base,
    /// ⟨bⁿ⟩ in BS(n,n), {e}×ℤ in 𝔽₂×ℤ, the whole group when abelian.
    Center,
}

impl Subgroup {
    pub fn parse(name: &str) -> Result<Subgroup> {
        match name {
            "trivial" => Ok(Subgroup::Trivial),
            "whole" => Ok(Subgroup::Whole),
            "base" => Ok(Subgroup::Base),
            "center" | "centre" => Ok(Subgroup::Center),
            _ => Err(Error::UnrecognizedSubgroup(name.into())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Subgroup::Trivial => "trivial",
            Subgroup::Whole => "whole",
            Subgroup::Base => "base",
            Subgroup::Center => "center",
        }
    }

    /// Fails when the subgroup has no meaning in the family.
    pub fn check(&self, g: &Group) -> Result<()> {
        let ok = match (self, g.family()) {
            (Subgroup::Trivial | Subgroup::Whole, _) => true,
            (Subgroup::Base, Family::Wreath { .. } | Family::ZnSemidirect { .. } | Family::Sanov) => true,
            (Subgroup::Center, Family::BsNn { .. } | Family::FreeTimesZ) => true,
            (Subgroup::Center, f) => f.is_abelian(),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnrecognizedSubgroup(format!("{} in {}", self.name(), g.name())))
        }
    }

    /// The subgroup as a family of its own, when it has one.
    pub fn own_group(&self, g: &Group) -> Option<Group> {
        let f = match (self, g.family()) {
            (Subgroup::Whole, f) => f.clone(),
            (Subgroup::Center, f) if f.is_abelian() => f.clone(),
            (Subgroup::Base, Family::Wreath { base: LampBase::Z, acting: None }) => Family::SumZ,
            (Subgroup::Base, Family::Wreath { base: LampBase::Z2, acting: None }) => Family::SumZ2,
            (Subgroup::Base, Family::ZnSemidirect { a }) => Family::Zn { n: a.len() },
            (Subgroup::Base, Family::Sanov) => Family::Zn { n: 2 },
            (Subgroup::Center, Family::BsNn { .. } | Family::FreeTimesZ) => Family::Zn { n: 1 },
            _ => return None,
        };
        Some(Group::new(f).expect("valid").with_node_cap(g.node_cap))
    }

    /// Image of an element of [`Subgroup::own_group`] in `g`.
    pub fn embed(&self, g: &Group, x: &Element) -> Element {
        match (self, g.family(), x) {
            (Subgroup::Whole, ..) => x.clone(),
            (Subgroup::Center, f, _) if f.is_abelian() => x.clone(),
            (Subgroup::Base, Family::Wreath { .. }, Element::Sum(m)) => Element::Wreath { lamps: m.clone(), shift: 0 },
            (Subgroup::Base, Family::ZnSemidirect { .. }, Element::Vector(v)) => Element::Semi { v: v.clone(), k: 0 },
            (Subgroup::Base, Family::Sanov, Element::Vector(v)) => Element::Sanov { v: [v[0], v[1]], w: vec![] },
            (Subgroup::Center, Family::BsNn { n }, Element::Vector(v)) => Element::Bs { n: *n, syl: vec![], c: v[0] },
            (Subgroup::Center, Family::FreeTimesZ, Element::Vector(v)) => Element::FreeZ { w: vec![], m: v[0] },
            _ => panic!("cannot embed {x} via {} into {}", self.name(), g.name()),
        }
    }

    pub fn contains(&self, g: &Group, x: &Element) -> bool {
        match (self, x) {
            (Subgroup::Trivial, _) => g.is_identity(x),
            (Subgroup::Whole, _) => true,
            (Subgroup::Center, _) if g.family().is_abelian() => true,
            (Subgroup::Base, Element::Wreath { shift, .. }) => *shift == 0,
            (Subgroup::Base, Element::Semi { k, .. }) => *k == 0,
            (Subgroup::Base, Element::Sanov { w, .. }) => w.is_empty(),
            (Subgroup::Center, Element::Bs { syl, .. }) => syl.is_empty(),
            (Subgroup::Center, Element::FreeZ { w, .. }) => w.is_empty(),
            _ => false,
        }
    }

    /// Elements of the subgroup's own ball of radius `r`, mapped into `g`.
    /// Without an own family the ambient ball is filtered instead.
    pub fn ball(&self, g: &Group, r: u32) -> Result<Vec<Element>> {
        if *self == Subgroup::Trivial {
            return Ok(vec![g.identity()]);
        }
        match self.own_group(g) {
            Some(h) => Ok(h.ball(r)?.elements.iter().map(|x| self.embed(g, x)).collect()),
            None => Ok(g.ball(r)?.elements.into_iter().filter(|x| self.contains(g, x)).collect()),
        }
    }

    /// Whether the subgroup is central in `g`.
    pub fn is_central(&self, g: &Group) -> bool {
        match self {
            Subgroup::Trivial => true,
            Subgroup::Center => true,
            Subgroup::Whole => g.family().is_abelian(),
            Subgroup::Base => g.family().is_abelian(),
        }
    }
}

/// Word length in the wreath product with generators {lamp at 0, shift}.
pub fn lamplighter_length(lamps: &BTreeMap<i64, i64>, shift: i64) -> u64 {
    let flips: u64 = lamps.values().map(|v| v.unsigned_abs()).sum();
    let walk = match (lamps.keys().next(), lamps.keys().next_back()) {
        (Some(&lo), Some(&hi)) => {
            let span = (hi - lo) as u64;
            let left_first = lo.unsigned_abs() + span + (shift - hi).unsigned_abs();
            let right_first = hi.unsigned_abs() + span + (shift - lo).unsigned_abs();
            left_first.min(right_first)
        }
        _ => shift.unsigned_abs(),
    };
    flips + walk
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots() {
        assert_eq!(word_root(&[1, 2, 1, 2]), (vec![1, 2], 2));
        assert_eq!(word_root(&[2, 1, 1, 1, -2]), (vec![2, 1, -2], 3));
        assert_eq!(word_root(&[1, 2]), (vec![1, 2], 1));
        assert_eq!(word_root(&[]), (vec![], 0));
    }
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(f: Family) -> Group {
        Group::new(f).unwrap()
    }

    #[test]
    fn sum_compose_and_invert() {
        let s = g(Family::SumZ);
        assert_eq!(s.compose(&unit(1), &unit(1)).unwrap(), sparse(&[(1, 2)]));
        assert_eq!(s.invert(&sparse(&[(0, 1), (3, 2)])), sparse(&[(0, -1), (3, -2)]));
        let z2 = g(Family::SumZ2);
        assert_eq!(z2.mul(&unit(4), &unit(4)), z2.identity());
    }

    #[test]
    fn semidirect_example() {
        let s = g(Family::ZnSemidirect { a: vec![vec![2, 1], vec![1, 1]] });
        let t = Element::Semi { v: vec![0, 0], k: 1 };
        let x = Element::Semi { v: vec![1, 0], k: 0 };
        assert_eq!(s.mul(&t, &x), Element::Semi { v: vec![2, 1], k: 1 });
        let y = Element::Semi { v: vec![3, -5], k: -2 };
        assert_eq!(s.mul(&y, &s.invert(&y)), s.identity());
    }

    #[test]
    fn bs_britton_reduction() {
        let b = g(Family::BsNn { n: 2 });
        let x = b.word("a b b A").unwrap();
        assert_eq!(x, b.word("b b").unwrap());
        assert_eq!(x.render(), json!("b b"));
        assert_eq!(b.word("b a").unwrap(), b.word("b a").unwrap());
        assert_ne!(b.word("b a").unwrap(), b.word("a b").unwrap());
        assert_eq!(b.word("b b a").unwrap(), b.word("a b b").unwrap());
        assert_eq!(b.word("B").unwrap().render(), json!("B"));
        assert_eq!(b.word("a B a").unwrap().render(), json!("a B a"));
    }

    #[test]
    fn bs_rendering_has_no_pinch_and_reparses() {
        let b = g(Family::BsNn { n: 2 });
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let x = b.sample(&mut rng, 10);
            let w = x.render();
            let s = w.as_str().unwrap().replace(' ', "");
            assert_eq!(b.word(&s).unwrap(), x);
            let letters = parse_letters(&s, 2).unwrap();
            assert_eq!(free_reduce(&letters), letters, "{s}");
            // a^ε b^{jn} a^{-ε}
            for i in 0..letters.len() {
                if letters[i].abs() != 1 {
                    continue;
                }
                let mut j = i + 1;
                while j < letters.len() && letters[j].abs() == 2 {
                    j += 1;
                }
                if j > i + 1 && j < letters.len() && letters[j] == -letters[i] {
                    let bsum: i64 = letters[i + 1..j].iter().map(|&l| if l > 0 { 1 } else { -1 }).sum();
                    assert_ne!(bsum % 2, 0, "pinch in {s}");
                }
            }
        }
    }

    #[test]
    fn wreath_inverse_and_conjugation() {
        let w = g(Family::Wreath { base: LampBase::Z, acting: None });
        let x = Element::Wreath { lamps: BTreeMap::from([(0, 2), (3, -1)]), shift: 2 };
        let xi = w.invert(&x);
        assert_eq!(xi, Element::Wreath { lamps: BTreeMap::from([(-2, -2), (1, 1)]), shift: -2 });
        assert_eq!(w.mul(&x, &xi), w.identity());
        let t = Element::Wreath { lamps: BTreeMap::new(), shift: 3 };
        let e1 = Element::Wreath { lamps: BTreeMap::from([(1, 1)]), shift: 0 };
        assert_eq!(w.conjugate(&t, &e1), Element::Wreath { lamps: BTreeMap::from([(4, 1)]), shift: 0 });
    }

    #[test]
    fn sanov_conjugation() {
        let s = g(Family::Sanov);
        let v1 = Element::Sanov { v: [0, 0], w: vec![1] };
        let e2 = Element::Sanov { v: [0, 1], w: vec![] };
        assert_eq!(s.conjugate(&v1, &e2), Element::Sanov { v: [2, 1], w: vec![] });
    }

    #[test]
    fn free_balls() {
        let f = g(Family::Free { rank: 2 });
        assert_eq!(f.ball(1).unwrap().len(), 5);
        assert_eq!(f.ball(2).unwrap().len(), 17);
        for r in 0..7 {
            assert_eq!(f.ball(r).unwrap().len() as u64, 2 * 3u64.pow(r) - 1);
        }
        let z = g(Family::Free { rank: 1 });
        let b = z.ball(3).unwrap();
        assert_eq!(b.len(), 7);
        assert!(b.contains(&Element::Word(vec![-1, -1, -1])));
    }

    #[test]
    fn classes_and_centralizers() {
        let f = g(Family::Free { rank: 2 });
        let a = f.word("a").unwrap();
        let c = f.conjugacy_class_partial(&a, 1).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.contains(&f.word("b a B").unwrap()));
        let cb = f.commuting_ball(&a, 2).unwrap();
        let want: HashSet<_> = ["e", "a", "A", "a a", "A A"].iter().map(|s| f.word(s).unwrap()).collect();
        assert_eq!(cb.into_iter().collect::<HashSet<_>>(), want);

        let bs = g(Family::BsNn { n: 2 });
        let b2 = bs.word("b b").unwrap();
        assert_eq!(bs.conjugacy_class_partial(&b2, 3).unwrap(), vec![b2.clone()]);
        assert_eq!(bs.commuting_ball(&b2, 1).unwrap().len(), bs.ball(1).unwrap().len());
        assert!(bs.is_central(&b2));
        assert!(!bs.is_central(&bs.word("b").unwrap()));

        let s = g(Family::SumZ);
        assert_eq!(s.conjugacy_class_partial(&unit(2), 3).unwrap(), vec![unit(2)]);
    }

    #[test]
    fn closed_form_lengths_match_bfs() {
        for fam in [
            Family::Wreath { base: LampBase::Z, acting: None },
            Family::Wreath { base: LampBase::Z2, acting: None },
            Family::FreeTimesZ,
            Family::Zn { n: 3 },
        ] {
            let gr = g(fam);
            let b = gr.ball(5).unwrap();
            for (x, d) in b.elements.iter().zip(&b.dist) {
                assert_eq!(gr.length_closed_form(x), Some(*d as u64), "{x} in {}", gr.name());
            }
        }
    }

    #[test]
    fn sum_ball_is_wreath_ball_at_shift_zero() {
        let s = g(Family::SumZ);
        let b = s.ball(4).unwrap();
        assert!(b.contains(&unit(0)));
        assert!(b.contains(&unit(1)));
        assert!(!b.contains(&unit(2)));
        assert!(b.dist.windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn finite_wreath() {
        let w = g(Family::Wreath { base: LampBase::Z2, acting: Some(3) });
        assert_eq!(w.elements().unwrap().len(), 24);
    }

    #[test]
    fn budget_is_reported() {
        let f = g(Family::Free { rank: 2 }).with_node_cap(100);
        assert!(matches!(f.ball(6), Err(Error::Budget { radius: 6, cap: 100 })));
    }

    #[test]
    fn family_json() {
        let f: Family = serde_json::from_str(r#"{"family":"bs_nn","n":2}"#).unwrap();
        assert_eq!(f, Family::BsNn { n: 2 });
        let f: Family = serde_json::from_str(r#"{"family":"zn_semidirect","A":[[2,1],[1,1]]}"#).unwrap();
        assert!(Group::new(f).is_ok());
        let f: Family = serde_json::from_str(r#"{"family":"zn_semidirect","A":[[2,0],[0,1]]}"#).unwrap();
        assert!(Group::new(f).is_err());
        let f: Family = serde_json::from_str(r#"{"family":"wreath","base":"Z2","acting":3}"#).unwrap();
        assert!(f.is_finite());
    }

    #[test]
    fn mismatch_is_an_error() {
        let f = g(Family::Free { rank: 2 });
        assert!(f.compose(&unit(0), &f.identity()).is_err());
        assert!(f.compose(&Element::Word(vec![1, -1]), &f.identity()).is_err());
    }
}
