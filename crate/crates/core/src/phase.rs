//! Exact arithmetic in the circle group, stored as angles mod 1.
//!
//! A [`Phase`] is `q + Σ c_s·s (mod 1)` where `q, c_s` are rationals and the
//! symbols `s` are irrationals declared in an [`IrrationalBasis`]. The basis
//! is a contract: `{1} ∪ symbols` are assumed linearly independent over ℚ.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Declared irrational symbols together with numeric values for export.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IrrationalBasis {
    values: BTreeMap<String, f64>,
}

impl IrrationalBasis {
    pub fn new<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut values = BTreeMap::new();
        for (name, v) in pairs {
            let name = name.into();
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Config(format!("basis value for `{name}` must lie in (0,1), got {v}")));
            }
            if values.insert(name.clone(), v).is_some() {
                return Err(Error::Config(format!("duplicate basis symbol `{name}`")));
            }
        }
        Ok(IrrationalBasis { values })
    }

    pub fn empty() -> Self {
        IrrationalBasis::default()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }

    pub fn value(&self, symbol: &str) -> Option<f64> {
        self.values.get(symbol).copied()
    }

    /// Fails unless every symbol used by `p` is declared.
    pub fn check(&self, p: &Phase) -> Result<()> {
        for s in p.irr.keys() {
            if !self.values.contains_key(s) {
                return Err(Error::Config(format!("symbol `{s}` has no numeric value in the basis")));
            }
        }
        Ok(())
    }
}

impl Serialize for IrrationalBasis {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.values.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IrrationalBasis {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = BTreeMap::<String, f64>::deserialize(d)?;
        IrrationalBasis::new(m).map_err(serde::de::Error::custom)
    }
}

/// An element of 𝕋 written additively as an angle mod 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase {
    rat: BigRational,
    irr: BTreeMap<String, BigRational>,
}

fn reduce_mod1(q: &BigRational) -> BigRational {
    q - q.floor()
}

impl Phase {
    pub fn zero() -> Self {
        Phase { rat: BigRational::zero(), irr: BTreeMap::new() }
    }

    /// The rational angle `p/q` mod 1.
    pub fn rational(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Phase::from_ratio(BigRational::new(p.into(), q.into()))
    }

    pub fn from_ratio(q: BigRational) -> Self {
        Phase { rat: reduce_mod1(&q), irr: BTreeMap::new() }
    }

    /// `c·s` for a declared symbol `s`.
    pub fn symbol(name: &str, c: BigRational) -> Self {
        Phase::zero().with_symbol(name, c)
    }

    /// Adds `c·name` to the angle.
    pub fn with_symbol(mut self, name: &str, c: BigRational) -> Self {
        let e = self.irr.entry(name.to_string()).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.irr.remove(name);
        }
        self
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn irr_coeffs(&self) -> &BTreeMap<String, BigRational> {
        &self.irr
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.irr.is_empty()
    }

    /// Angle sum; the group law of 𝕋.
    pub fn mul(&self, other: &Phase) -> Phase {
        let mut irr = self.irr.clone();
        for (s, c) in &other.irr {
            let e = irr.entry(s.clone()).or_insert_with(BigRational::zero);
            *e += c;
            if e.is_zero() {
                irr.remove(s);
            }
        }
        Phase { rat: reduce_mod1(&(&self.rat + &other.rat)), irr }
    }

    pub fn inv(&self) -> Phase {
        Phase {
            rat: reduce_mod1(&-&self.rat),
            irr: self.irr.iter().map(|(s, c)| (s.clone(), -c)).collect(),
        }
    }

    /// Multiplies the angle by `c`.
    pub fn scale(&self, c: &BigRational) -> Phase {
        if c.is_zero() {
            return Phase::zero();
        }
        Phase {
            rat: reduce_mod1(&(&self.rat * c)),
            irr: self.irr.iter().map(|(s, v)| (s.clone(), v * c)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Phase {
        self.scale(&BigRational::from_integer(n.into()))
    }

    pub fn is_torsion(&self) -> bool {
        self.irr.is_empty()
    }

    /// Multiplicative order when torsion.
    pub fn order(&self) -> Option<BigInt> {
        self.is_torsion().then(|| self.rat.denom().clone())
    }

    /// Numeric angle in `[0,1)` per the basis.
    pub fn angle(&self, basis: &IrrationalBasis) -> Result<f64> {
        basis.check(self)?;
        let mut a = self.rat.to_f64().unwrap_or(0.0);
        for (s, c) in &self.irr {
            let v = basis.value(s).expect("checked");
            a += c.to_f64().unwrap_or(0.0) * v;
        }
        Ok(a - a.floor())
    }

    pub fn to_complex(&self, basis: &IrrationalBasis) -> Result<Complex64> {
        let a = self.angle(basis)?;
        Ok(Complex64::from_polar(1.0, std::f64::consts::TAU * a))
    }

    /// `exp(2πi·angle)` when the angle is a multiple of 1/4: the power of `i`.
    pub fn quarter_turns(&self) -> Option<u8> {
        if !self.is_torsion() {
            return None;
        }
        let four = &self.rat * BigRational::from_integer(4.into());
        four.is_integer().then(|| four.to_integer().to_u8().expect("in [0,4)"))
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rat)?;
        for (s, c) in &self.irr {
            if c.is_negative() {
                write!(f, " - {}·{s}", -c)?;
            } else {
                write!(f, " + {c}·{s}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Phase({self})")
    }
}

impl Add<&Phase> for &Phase {
    type Output = Phase;
    fn add(self, rhs: &Phase) -> Phase {
        self.mul(rhs)
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        self.mul(&rhs)
    }
}

impl AddAssign<&Phase> for Phase {
    fn add_assign(&mut self, rhs: &Phase) {
        *self = self.mul(rhs);
    }
}

impl Sub<&Phase> for &Phase {
    type Output = Phase;
    fn sub(self, rhs: &Phase) -> Phase {
        self.mul(&rhs.inv())
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, rhs: Phase) -> Phase {
        self.mul(&rhs.inv())
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        self.inv()
    }
}

impl Neg for &Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        self.inv()
    }
}

impl std::iter::Sum for Phase {
    fn sum<I: Iterator<Item = Phase>>(iter: I) -> Phase {
        iter.fold(Phase::zero(), |a, b| a.mul(&b))
    }
}

// Literal syntax: {"rat": [p, q], "irr": {"r": [a, b]}}.

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Int {
    Small(i64),
    Big(String),
}

impl Int {
    fn of(b: &BigInt) -> Int {
        match b.to_i64() {
            Some(v) => Int::Small(v),
            None => Int::Big(b.to_string()),
        }
    }

    fn value(&self) -> std::result::Result<BigInt, String> {
        match self {
            Int::Small(v) => Ok((*v).into()),
            Int::Big(s) => s.parse().map_err(|_| format!("`{s}` is not an integer")),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Literal {
    #[serde(default)]
    rat: Option<[Int; 2]>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    irr: BTreeMap<String, [Int; 2]>,
}

fn ratio(pair: &[Int; 2]) -> std::result::Result<BigRational, String> {
    let (p, q) = (pair[0].value()?, pair[1].value()?);
    if q.is_zero() {
        return Err("zero denominator in phase literal".into());
    }
    Ok(BigRational::new(p, q))
}

impl Serialize for Phase {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let lit = Literal {
            rat: Some([Int::of(self.rat.numer()), Int::of(self.rat.denom())]),
            irr: self
                .irr
                .iter()
                .map(|(k, c)| (k.clone(), [Int::of(c.numer()), Int::of(c.denom())]))
                .collect(),
        };
        lit.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Phase {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let lit = Literal::deserialize(d)?;
        let mut p = match &lit.rat {
            Some(pair) => Phase::from_ratio(ratio(pair).map_err(serde::de::Error::custom)?),
            None => Phase::zero(),
        };
        for (s, pair) in &lit.irr {
            p = p.with_symbol(s, ratio(pair).map_err(serde::de::Error::custom)?);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn half_plus_half_is_zero() {
        assert_eq!(Phase::rational(1, 2) + Phase::rational(1, 2), Phase::zero());
    }

    #[test]
    fn inverse_with_symbol() {
        let p = Phase::rational(1, 3).with_symbol("r", q(1, 1));
        let r = Phase::rational(2, 3).with_symbol("r", q(-1, 1));
        assert_eq!(p + r, Phase::zero());
    }

    #[test]
    fn scale_examples() {
        assert_eq!(Phase::rational(1, 2).scale(&q(1, 2)), Phase::rational(1, 4));
        let r = Phase::symbol("r", q(1, 1));
        assert_eq!(r.scale_int(3), Phase::symbol("r", q(3, 1)));
        assert_eq!(r.scale(&q(0, 1)), Phase::zero());
    }

    #[test]
    fn canonical_representative() {
        assert_eq!(Phase::rational(-1, 3), Phase::rational(2, 3));
        assert_eq!(Phase::rational(7, 3).rational_part(), &q(1, 3));
        assert_eq!(Phase::rational(4, 6), Phase::rational(2, 3));
    }

    #[test]
    fn torsion() {
        assert!(Phase::rational(2, 5).is_torsion());
        assert_eq!(Phase::rational(2, 5).order(), Some(5.into()));
        assert!(!Phase::symbol("r", q(1, 1)).is_torsion());
        assert!(!Phase::rational(1, 3).with_symbol("r", q(2, 7)).is_torsion());
    }

    #[test]
    fn complex_values() {
        let b = IrrationalBasis::new([("r", 0.25)]).unwrap();
        let z = Phase::rational(1, 2).to_complex(&b).unwrap();
        assert!((z - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        let z = Phase::rational(1, 4).to_complex(&b).unwrap();
        assert!((z - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        let z = Phase::symbol("r", q(1, 1)).to_complex(&b).unwrap();
        assert!((z - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn missing_symbol_is_config_error() {
        let b = IrrationalBasis::empty();
        assert!(matches!(Phase::symbol("r", q(1, 1)).to_complex(&b), Err(Error::Config(_))));
    }

    #[test]
    fn basis_rejects_bad_values() {
        assert!(IrrationalBasis::new([("r", 1.5)]).is_err());
        assert!(IrrationalBasis::new([("r", 0.5), ("r", 0.3)]).is_err());
    }

    #[test]
    fn literal_round_trip() {
        let p: Phase = serde_json::from_str(r#"{"rat":[1,3],"irr":{"r":[2,7]}}"#).unwrap();
        assert_eq!(p, Phase::rational(1, 3).with_symbol("r", q(2, 7)));
        let back: Phase = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        let z: Phase = serde_json::from_str(r#"{"irr":{"r":[0,1]}}"#).unwrap();
        assert!(z.is_zero());
        assert!(serde_json::from_str::<Phase>(r#"{"rat":[1,0]}"#).is_err());
    }

    #[test]
    fn quarter_turns() {
        assert_eq!(Phase::rational(3, 4).quarter_turns(), Some(3));
        assert_eq!(Phase::rational(1, 3).quarter_turns(), None);
    }

    fn arb_phase() -> impl Strategy<Value = Phase> {
        (
            -20i64..20,
            1i64..12,
            proptest::collection::vec((0usize..2, -9i64..9, 1i64..6), 0..3),
        )
            .prop_map(|(p, d, irr)| {
                let mut ph = Phase::rational(p, d);
                for (s, a, b) in irr {
                    ph = ph.with_symbol(["r", "t"][s], q(a, b));
                }
                ph
            })
    }

    proptest! {
        #[test]
        fn group_laws(a in arb_phase(), b in arb_phase(), c in arb_phase()) {
            prop_assert_eq!((&(&a + &b)) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a + &Phase::zero(), a.clone());
            prop_assert_eq!(&a - &a, Phase::zero());
        }

        #[test]
        fn scale_distributes(a in arb_phase(), x in -30i64..30, y in -30i64..30, d in 1i64..8) {
            let (s, t) = (q(x, d), q(y, d));
            prop_assert_eq!(a.scale(&(&s + &t)), &a.scale(&s) + &a.scale(&t));
        }

        #[test]
        fn torsion_killed_by_denominator(p in -50i64..50, d in 1i64..40) {
            let a = Phase::rational(p, d);
            let n = BigRational::from_integer(a.rational_part().denom().clone());
            prop_assert!(a.is_torsion());
            prop_assert!(a.scale(&n).is_zero());
        }

        #[test]
        fn complex_is_homomorphism(a in arb_phase(), b in arb_phase()) {
            let basis = IrrationalBasis::new([("r", 0.41421356237), ("t", 0.73205080757)]).unwrap();
            let lhs = (&a + &b).to_complex(&basis).unwrap();
            let rhs = a.to_complex(&basis).unwrap() * b.to_complex(&basis).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-10);
            prop_assert!((lhs.norm() - 1.0).abs() < 1e-12);
        }
    }
}
