use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twistlab::cocycles::{build_cocycle, verify_cocycle_identity, CocycleSpec};
use twistlab::lattice::{hnf, in_lattice, to_ivec};
use twistlab::spectral::{convolve, delta, inverse_delta, Cyclo, FiniteFunction, Scalar};
use twistlab::{Cocycle, Element, Family, Group, IrrationalBasis, Phase};

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn phase() -> impl Strategy<Value = Phase> {
    (-40i64..40, 1i64..13, -5i64..5, 1i64..4).prop_map(|(p, q, c, d)| Phase::rational(p, q).with_symbol("t", rat(c, d)))
}

fn torsion() -> impl Strategy<Value = Phase> {
    (-40i64..40, 1i64..13).prop_map(|(p, q)| Phase::rational(p, q))
}

fn group(f: Family) -> Group {
    Group::new(f).unwrap()
}

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![
        Just(Family::SumZ),
        Just(Family::SumZ2),
        Just(Family::Zn { n: 3 }),
        Just(Family::Sanov),
        Just(Family::BsNn { n: 2 }),
        Just(Family::BsNn { n: 3 }),
        Just(Family::Free { rank: 2 }),
        Just(Family::FreeTimesZ),
        Just(Family::ZnSemidirect { a: vec![vec![2, 1], vec![1, 1]] }),
        Just(Family::ZnSemidirect { a: vec![vec![0, -1], vec![1, 0]] }),
    ]
}

proptest! {
    #[test]
    fn phase_addition_is_an_abelian_group(a in phase(), b in phase(), c in phase()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!((&a + &(-&a)).is_zero());
        prop_assert_eq!(&a - &b, &a + &(-&b));
    }

    #[test]
    fn rational_part_stays_in_unit_interval(a in phase(), n in -20i64..20) {
        let s = a.scale_int(n);
        let r = s.rational_part();
        prop_assert!(*r >= rat(0, 1) && *r < rat(1, 1));
        prop_assert_eq!(s, (0..n.abs()).fold(Phase::zero(), |acc, _| if n > 0 { &acc + &a } else { &acc - &a }));
    }

    #[test]
    fn torsion_order_kills_the_phase(a in torsion()) {
        let n: i64 = a.order().unwrap().try_into().unwrap();
        prop_assert!(a.scale_int(n).is_zero());
        prop_assert!((1..n).all(|k| !a.scale_int(k).is_zero()));
    }

    #[test]
    fn phase_json_round_trips(a in phase()) {
        let s = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<Phase>(&s).unwrap(), a);
    }

    #[test]
    fn group_law_holds(f in family(), seed in any::<u64>()) {
        let g = group(f);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (g.sample(&mut rng, 5), g.sample(&mut rng, 5), g.sample(&mut rng, 5));
        prop_assert_eq!(g.mul(&g.mul(&x, &y), &z), g.mul(&x, &g.mul(&y, &z)));
        prop_assert!(g.is_identity(&g.mul(&x, &g.invert(&x))));
        prop_assert_eq!(g.mul(&g.identity(), &x), x.clone());
        prop_assert_eq!(g.parse_element(&x.render()).unwrap(), x);
    }

    #[test]
    fn bilinear_cocycles_satisfy_the_identity(m in proptest::collection::vec(phase(), 9), seed in any::<u64>()) {
        let g = group(Family::Zn { n: 3 });
        let rows: Vec<Vec<Phase>> = m.chunks(3).map(|c| c.to_vec()).collect();
        let sigma = build_cocycle(&g, &CocycleSpec::ZnBilinear { matrix: rows }, "cocycle").unwrap();
        prop_assert!(verify_cocycle_identity(&sigma, 50, seed, 6).pass);
    }

    #[test]
    fn family_cocycles_satisfy_the_identity(mu0 in phase(), mu1 in torsion(), mu2 in phase(), seed in any::<u64>()) {
        let cases = [
            (Family::Sanov, CocycleSpec::Sanov { mu0: mu0.clone(), mu1: mu1.clone(), mu2: mu2.clone() }),
            (Family::BsNn { n: 2 }, CocycleSpec::Bs { lambda: mu0.clone() }),
            (Family::FreeTimesZ, CocycleSpec::FreeTimesZ { mu: mu2.clone(), nu: mu1.clone() }),
            (Family::SumZ, CocycleSpec::ThetaDiag { diagonals: vec![mu0.clone()], period: vec![mu1.clone(), mu2.clone()] }),
        ];
        for (f, spec) in cases {
            let g = group(f);
            let sigma = build_cocycle(&g, &spec, "cocycle").unwrap();
            let rep = verify_cocycle_identity(&sigma, 40, seed, 4);
            prop_assert!(rep.pass, "{:?}", rep.counterexample);
        }
    }

    #[test]
    fn conjugation_bridge_on_sanov(mu0 in phase(), mu1 in torsion(), mu2 in torsion(), seed in any::<u64>()) {
        let g = group(Family::Sanov);
        let sigma = build_cocycle(&g, &CocycleSpec::Sanov { mu0, mu1, mu2 }, "cocycle").unwrap();
        let basis = IrrationalBasis::empty();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (g.sample(&mut rng, 4), g.sample(&mut rng, 4));
        let inner = inverse_delta::<Cyclo>(&sigma, &x, &basis).unwrap();
        let got = convolve(&delta(x.clone()), &convolve(&delta(y.clone()), &inner, &sigma, &basis).unwrap(), &sigma, &basis).unwrap();
        let want: FiniteFunction<Cyclo> =
            BTreeMap::from([(g.conjugate(&x, &y), Cyclo::from_phase(&sigma.sigma_tilde(&x, &y), &basis).unwrap())]);
        prop_assert_eq!(got, want);
    }

    #[test]
    fn trivial_cocycle_is_normalized_and_symmetric(f in family(), seed in any::<u64>()) {
        let g = group(f);
        let sigma = Cocycle::trivial(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (g.sample(&mut rng, 4), g.sample(&mut rng, 4));
        prop_assert!(sigma.eval(&x, &y).is_zero());
        prop_assert!(sigma.sigma_tilde(&x, &y).is_zero());
    }

    #[test]
    fn hnf_spans_its_input(vs in proptest::collection::vec(proptest::collection::vec(-6i64..6, 4), 1..6)) {
        let vs: Vec<_> = vs.iter().map(|v| to_ivec(v)).collect();
        let h = hnf(&vs);
        prop_assert!(vs.iter().all(|v| in_lattice(&h, v)));
        prop_assert!(h.iter().all(|r| in_lattice(&hnf(&vs), r)));
        prop_assert_eq!(hnf(&h), h);
    }
}

#[test]
fn sums_render_as_sparse_maps() {
    let x = Element::Sum(BTreeMap::from([(-2, 3), (5, -1)]));
    assert_eq!(x.render(), serde_json::json!({"-2": 3, "5": -1}));
}
