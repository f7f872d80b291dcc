//! Conjugacy-class growth, κ-decay falsification and torus orbit probes.

use std::collections::{BTreeSet, VecDeque};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cocycles::Cocycle;
use crate::groups::{Ball, Element, Group};
use crate::phase::{IrrationalBasis, Phase};
use crate::spectral::{self, FiniteFunction};
use crate::{Error, Result};

/// κ = 1 + L or κ = (1 + L)^s, L the word length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LengthFunction {
    WordLengthPlusOne,
    Powered { s: BigRational },
}

impl LengthFunction {
    pub fn powered(p: i64, q: i64) -> LengthFunction {
        LengthFunction::Powered { s: BigRational::new(p.into(), q.into()) }
    }

    pub fn eval_length(&self, l: u64) -> f64 {
        let base = 1.0 + l as f64;
        match self {
            LengthFunction::WordLengthPlusOne => base,
            LengthFunction::Powered { s } => base.powf(s.to_f64().unwrap_or(f64::NAN)),
        }
    }

    /// Accepts "1+L" and "(1+L)^s" with s an integer or p/q.
    pub fn parse(s: &str) -> Result<LengthFunction> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "1+L" || t == "L+1" {
            return Ok(LengthFunction::WordLengthPlusOne);
        }
        let bad = || Error::Config(format!("kappa: cannot parse {s:?}; expected \"1+L\" or \"(1+L)^s\""));
        let exp = t.strip_prefix("(1+L)^").ok_or_else(bad)?;
        let exp = exp.trim_start_matches('(').trim_end_matches(')');
        let r = match exp.split_once('/') {
            Some((p, q)) => {
                let (p, q): (i64, i64) = (p.parse().map_err(|_| bad())?, q.parse().map_err(|_| bad())?);
                if q == 0 {
                    return Err(bad());
                }
                BigRational::new(p.into(), q.into())
            }
            None => BigRational::from_integer(exp.parse::<i64>().map_err(|_| bad())?.into()),
        };
        Ok(LengthFunction::Powered { s: r })
    }
}

/// Word lengths by closed form, falling back to a BFS ball.
pub struct Lengths<'a> {
    group: &'a Group,
    ball: Option<Ball>,
    radius: u32,
}

impl<'a> Lengths<'a> {
    pub fn new(group: &'a Group) -> Self {
        Lengths { group, ball: None, radius: 0 }
    }

    /// Precomputes the ball used when no closed form exists.
    pub fn reach(&mut self, r: u32) -> Result<()> {
        if self.ball.is_none() || self.radius < r {
            self.ball = Some(self.group.ball(r)?);
            self.radius = r;
        }
        Ok(())
    }

    pub fn length(&self, g: &Element) -> Result<u64> {
        if let Some(l) = self.group.length_closed_form(g) {
            return Ok(l);
        }
        let b = self.ball.as_ref().ok_or_else(|| Error::Invalid("length ball not prepared".into()))?;
        b.position(g)
            .map(|i| b.dist[i] as u64)
            .ok_or(Error::Budget { radius: self.radius, cap: self.group.node_cap })
    }
}

// ------------------------------------------------------------ class growth

#[derive(Clone, Debug, Serialize)]
pub struct GrowthProfile {
    /// Which class was profiled.
    pub subject: serde_json::Value,
    pub kappa: LengthFunction,
    /// counts[k-1] = |C_k ∩ found|, C_k = {k−1 < κ ≤ k}; lower bounds.
    pub counts: Vec<u64>,
    /// Found class elements with κ > k_max.
    pub beyond: u64,
    pub radius: u32,
    pub found: usize,
}

/// Shell index k with k−1 < κ ≤ k.
fn shell(kappa: f64) -> u64 {
    kappa.ceil().max(1.0) as u64
}

/// Bins {h g h⁻¹ : |h| ≤ R} by κ-shells.
pub fn class_growth_counts(group: &Group, g: &Element, kappa: &LengthFunction, k_max: usize, radius: u32) -> Result<GrowthProfile> {
    let class = group.conjugacy_class_partial(g, radius)?;
    let mut lengths = Lengths::new(group);
    if group.length_closed_form(g).is_none() {
        let mut own = Lengths::new(group);
        own.reach(radius)?;
        let lg = own.length(g).unwrap_or(radius as u64);
        lengths.reach(2 * radius + lg as u32)?;
    }
    let mut counts = vec![0u64; k_max];
    let mut beyond = 0;
    for x in &class {
        let k = shell(kappa.eval_length(lengths.length(x)?));
        match counts.get_mut(k as usize - 1) {
            Some(c) => *c += 1,
            None => beyond += 1,
        }
    }
    Ok(GrowthProfile { subject: g.render(), kappa: kappa.clone(), counts, beyond, radius, found: class.len() })
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeResult {
    pub degree: u32,
    pub exceeded: bool,
    /// First shell k with count > k^d.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shell: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuperpolyReport {
    pub subject: serde_json::Value,
    pub degrees: Vec<DegreeResult>,
    pub note: &'static str,
}

/// For each d, whether some shell beats k^d. Evidence only.
pub fn superpolynomial_probe(profile: &GrowthProfile, degrees: &[u32]) -> SuperpolyReport {
    let degrees = degrees
        .iter()
        .map(|&d| {
            let shell = profile
                .counts
                .iter()
                .enumerate()
                .map(|(i, &c)| (i + 1, c))
                .find(|&(k, c)| c as f64 > (k as f64).powi(d as i32))
                .map(|x| x.0);
            DegreeResult { degree: d, exceeded: shell.is_some(), shell }
        })
        .collect();
    SuperpolyReport { subject: profile.subject.clone(), degrees, note: "evidence only: finitely many shells" }
}

// ---------------------------------------------------------------- κ-decay

#[derive(Clone, Debug, Serialize)]
pub struct DecaySample {
    #[serde(serialize_with = "spectral::serialize_function")]
    pub f: FiniteFunction<Complex64>,
    pub weighted_norm: f64,
    pub lower_bound: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub m: f64,
    pub radius: u32,
    pub trials: usize,
    pub max_ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<DecaySample>,
    /// The violation's lower bound recomputed at radius R+2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub revalidated: Option<f64>,
}

pub const DECAY_SUPPORT_RADIUS: u32 = 4;
pub const DECAY_MAX_SUPPORT: usize = 6;

/// ‖f‖_{2,κ} = (Σ |f(g)|² κ(g)²)^{1/2}.
pub fn weighted_norm(f: &FiniteFunction<Complex64>, kappa: &LengthFunction, lengths: &Lengths) -> Result<f64> {
    let mut s = 0.0;
    for (g, c) in f {
        let k = kappa.eval_length(lengths.length(g)?);
        s += c.norm_sqr() * k * k;
    }
    Ok(s.sqrt())
}

/// Random f: support uniform in ball(4) of size ≤ 6, unit-disk coefficients.
pub fn random_function<R: Rng>(ball: &Ball, rng: &mut R) -> FiniteFunction<Complex64> {
    let size = rng.gen_range(1..=DECAY_MAX_SUPPORT.min(ball.len()));
    ball.elements.choose_multiple(rng, size).map(|g| (g.clone(), spectral::unit_disk(rng))).collect()
}

#[allow(clippy::too_many_arguments)]
fn decay_sample(
    f: FiniteFunction<Complex64>,
    sigma: &Cocycle,
    kappa: &LengthFunction,
    lengths: &Lengths,
    radius: u32,
    tol: f64,
    basis: &IrrationalBasis,
    seed: u64,
) -> Result<DecaySample> {
    let weighted = weighted_norm(&f, kappa, lengths)?;
    let lb = spectral::truncated_norm(&f, sigma, radius, tol, basis, seed)?.estimate.value;
    Ok(DecaySample { ratio: if weighted > 0.0 { lb / weighted } else { 0.0 }, f, weighted_norm: weighted, lower_bound: lb })
}

/// Looks for f with ‖P_B Λ_σ(f) P_B‖ > M‖f‖_{2,κ}. `fixed` replaces the
/// random samples when given.
#[allow(clippy::too_many_arguments)]
pub fn kappa_decay_probe(
    sigma: &Cocycle,
    kappa: &LengthFunction,
    m: f64,
    trials: usize,
    radius: u32,
    tol: f64,
    basis: &IrrationalBasis,
    seed: u64,
    fixed: Option<FiniteFunction<Complex64>>,
) -> Result<DecayReport> {
    let group = sigma.group();
    let support_ball = group.ball(DECAY_SUPPORT_RADIUS)?;
    let mut lengths = Lengths::new(group);
    let need = fixed.as_ref().map_or(Ok(0), |f| {
        f.keys().try_fold(DECAY_SUPPORT_RADIUS, |acc, g| -> Result<u32> {
            Ok(match group.length_closed_form(g) {
                Some(l) => acc.max(l as u32),
                None => acc.max(2 * radius),
            })
        })
    })?;
    lengths.reach(DECAY_SUPPORT_RADIUS.max(need))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<FiniteFunction<Complex64>> = match fixed {
        Some(f) => vec![f],
        None => (0..trials).map(|_| random_function(&support_ball, &mut rng)).collect(),
    };
    let mut report = DecayReport { m, radius, trials: samples.len(), max_ratio: 0.0, violation: None, revalidated: None };
    for (i, f) in samples.into_iter().enumerate() {
        let s = decay_sample(f, sigma, kappa, &lengths, radius, tol, basis, seed.wrapping_add(i as u64))?;
        report.max_ratio = report.max_ratio.max(s.ratio);
        if report.violation.is_none() && s.lower_bound > m * s.weighted_norm * (1.0 + 1e-9) {
            let again = spectral::truncated_norm(&s.f, sigma, radius + 2, tol, basis, seed)?.estimate.value;
            report.revalidated = Some(again);
            report.violation = Some(s);
        }
    }
    Ok(report)
}

// ------------------------------------------------------------ torus orbits

/// φ₁(x, y) = (x + ν₁, 2x + y), φ₂(x, y) = (x + 2y, y + ν₂), in angles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorusMap {
    Phi1,
    Phi2,
}

pub type TorusPoint = (Phase, Phase);

fn apply(map: TorusMap, p: &TorusPoint, nu1: &Phase, nu2: &Phase, inverse: bool) -> TorusPoint {
    let (x, y) = p;
    match (map, inverse) {
        (TorusMap::Phi1, false) => (x + nu1, &x.scale_int(2) + y),
        (TorusMap::Phi1, true) => {
            let x0 = x - nu1;
            (x0.clone(), y - &x0.scale_int(2))
        }
        (TorusMap::Phi2, false) => (x + &y.scale_int(2), y + nu2),
        (TorusMap::Phi2, true) => {
            let y0 = y - nu2;
            (x - &y0.scale_int(2), y0)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub maps: Vec<TorusMap>,
    pub n_points: usize,
    /// All used ν and the start are torsion, so the orbit is finite.
    pub finite_orbit: bool,
    /// Exact size of the orbit under the group generated by the maps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit_size: Option<usize>,
    /// Distinct first coordinates among the sampled points (exact).
    pub first_coordinates: usize,
    pub discrepancy: f64,
}

pub const GRID: usize = 32;
pub const ORBIT_CAP: usize = 1 << 20;

/// Star discrepancy over the corners of a 32×32 grid.
pub fn grid_discrepancy(points: &[(f64, f64)]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mut cells = vec![[0u64; GRID]; GRID];
    for &(x, y) in points {
        let i = ((x * GRID as f64) as usize).min(GRID - 1);
        let j = ((y * GRID as f64) as usize).min(GRID - 1);
        cells[i][j] += 1;
    }
    // cum[i][j] = #points in [0, i/32) × [0, j/32)
    let mut cum = vec![vec![0u64; GRID + 1]; GRID + 1];
    for i in 0..GRID {
        for j in 0..GRID {
            cum[i + 1][j + 1] = cells[i][j] + cum[i][j + 1] + cum[i + 1][j] - cum[i][j];
        }
    }
    let n = points.len() as f64;
    let mut d: f64 = 0.0;
    for (i, row) in cum.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            let area = (i * j) as f64 / (GRID * GRID) as f64;
            d = d.max((c as f64 / n - area).abs());
        }
    }
    d
}

/// Iterates the maps cyclically from `start` in exact arithmetic.
pub fn torus_orbit_probe(
    nu1: &Phase,
    nu2: &Phase,
    maps: &[TorusMap],
    start: &TorusPoint,
    n_points: usize,
    basis: &IrrationalBasis,
) -> Result<OrbitReport> {
    if maps.is_empty() {
        return Err(Error::Config("torus_orbit_probe: no maps".into()));
    }
    for p in [nu1, nu2, &start.0, &start.1] {
        basis.check(p)?;
    }
    let used_torsion = maps.iter().all(|m| match m {
        TorusMap::Phi1 => nu1.is_torsion(),
        TorusMap::Phi2 => nu2.is_torsion(),
    });
    let finite = used_torsion && start.0.is_torsion() && start.1.is_torsion();
    let orbit_size = if finite { exact_orbit(nu1, nu2, maps, start) } else { None };

    let mut p = start.clone();
    let mut pts = Vec::with_capacity(n_points);
    let mut firsts = BTreeSet::new();
    for i in 0..n_points {
        pts.push((p.0.angle(basis)?, p.1.angle(basis)?));
        firsts.insert(p.0.clone());
        p = apply(maps[i % maps.len()], &p, nu1, nu2, false);
    }
    Ok(OrbitReport {
        maps: maps.to_vec(),
        n_points,
        finite_orbit: finite,
        orbit_size,
        first_coordinates: firsts.len(),
        discrepancy: grid_discrepancy(&pts),
    })
}

fn exact_orbit(nu1: &Phase, nu2: &Phase, maps: &[TorusMap], start: &TorusPoint) -> Option<usize> {
    let distinct: BTreeSet<TorusMap> = maps.iter().copied().collect();
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(p) = queue.pop_front() {
        for &m in &distinct {
            for inv in [false, true] {
                let q = apply(m, &p, nu1, nu2, inv);
                if seen.insert(q.clone()) {
                    if seen.len() > ORBIT_CAP {
                        return None;
                    }
                    queue.push_back(q);
                }
            }
        }
    }
    Some(seen.len())
}

impl PartialOrd for TorusMap {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TorusMap {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (*self as u8).cmp(&(*other as u8))
    }
}

/// Zero phase pair, i.e. the point (1, 1).
pub fn unit_point() -> TorusPoint {
    (Phase::zero(), Phase::zero())
}

pub fn is_zero_start(p: &TorusPoint) -> bool {
    p.0.is_zero() && p.1.is_zero() && p.0.rational_part().is_zero()
}
