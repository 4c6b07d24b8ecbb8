mod common;

use std::sync::OnceLock;

use common::*;
use hypdisc::bench::EntryDistribution;
use hypdisc::domain::{dirichlet_sides, peripheral_classes};
use hypdisc::finiteindex::{
    coset_enumeration, recognize, reduce_mod, schreier_generators, FiniteIndexConfig,
    FullCertificate, Level, PrimeIdealData, DEFAULT_COSET_CAP,
};
use hypdisc::hyperbolic::{act, dist_surrogate, Point};
use hypdisc::membership::{group_equal, Mode, ReducedGroup};
use hypdisc::reduction::{
    principal_words, recognize_torsion_free, Certificate, CyclicOrder, IndiscreteReason, Reducer,
    ReducerConfig,
};
use hypdisc::{FieldSpec, GroupElement, IsometryClass, Letter, Word};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Sample {
    gens: Vec<GroupElement>,
    group: ReducedGroup,
}

/// Discrete torsion-free groups: the pair, plus random sets over ℚ and ℚ(√3).
fn pool() -> &'static [Sample] {
    static POOL: OnceLock<Vec<Sample>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut sets = vec![pair()];
        for (n, d, k) in [(2, 6, k3()), (3, 8, k3()), (2, 5, q())] {
            sets.extend(
                discrete_trials(n, d, k, EntryDistribution::default(), 4)
                    .into_iter()
                    .map(|(g, _)| g),
            );
        }
        sets.into_iter()
            .map(|gens| {
                let k = gens[0].spec();
                let cert = recognize_torsion_free(&gens).unwrap();
                let group = ReducedGroup::from_certificate_sl2(k, &cert, &gens).unwrap();
                Sample { gens, group }
            })
            .collect()
    })
}

fn word_over(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..rank, any::<bool>()), 0..=max_len).prop_map(|ls| {
        Word::new(
            ls.into_iter()
                .map(|(i, inv)| Letter::new(i, if inv { -1 } else { 1 })),
        )
    })
}

fn sample_and_word(max_len: usize) -> impl Strategy<Value = (usize, Word)> {
    let rank = pool().iter().map(|s| s.gens.len()).min().unwrap();
    (0..pool().len(), word_over(rank, max_len))
}

/// `(a/b, n/d)` as a point over `k`.
type Coords = (i64, i64, i64, i64);

fn coords() -> impl Strategy<Value = Coords> {
    (-30i64..=30, 1i64..=10, 1i64..=40, 1i64..=16)
}

fn point(k: FieldSpec, (a, b, n, d): Coords) -> Point {
    Point::new(k.ratio(a, b), k.ratio(n, d)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn membership_round_trip((idx, w) in sample_and_word(12)) {
        let s = &pool()[idx];
        let k = s.group.spec();
        let target = w.evaluate_sl2(&s.gens, k).unwrap();
        let answer = s.group.is_member(&target, Mode::Psl2).unwrap();
        let found = answer.word().expect("member");
        prop_assert_eq!(found.evaluate(s.group.original(), k).unwrap(), target.normalize());
        let sl2 = s.group.is_member(&target, Mode::Sl2).unwrap();
        let exact = sl2.word().expect("member in SL2");
        prop_assert_eq!(exact.evaluate_sl2(&s.gens, k).unwrap(), target);
    }

    #[test]
    fn domain_reduction_certificate((idx, c) in (0..13usize, coords())) {
        let s = &pool()[idx % pool().len()];
        let w = point(s.group.spec(), c);
        let r = s.group.reduce_to_domain(&w).unwrap();
        prop_assert_eq!(&act(&r.elem, &w), &r.point);
        let v = s.group.base();
        let here = dist_surrogate(v, &r.point);
        for dw in s.group.domain_words() {
            let moved = act(&dw.elem, &r.point);
            prop_assert!(dist_surrogate(v, &moved).value() >= here.value(), "{} decreases", dw.word);
        }
    }

    #[test]
    fn domain_reduction_is_equivariant((idx, x) in sample_and_word(6), c in coords()) {
        let s = &pool()[idx];
        let k = s.group.spec();
        let w = point(k, c);
        let g = x.evaluate(s.group.original(), k).unwrap();
        let a = s.group.reduce_to_domain(&w).unwrap();
        let b = s.group.reduce_to_domain(&act(&g, &w)).unwrap();
        prop_assert_eq!(a.point, b.point);
    }
}

#[test]
fn certificates_are_reduced_and_deterministic() {
    for s in pool() {
        let gens = projective(&s.gens);
        let a = Reducer::new(ReducerConfig::default()).run(&gens).unwrap();
        let b = Reducer::new(ReducerConfig::default()).run(&gens).unwrap();
        assert_eq!(a, b);
        a.verify(&gens).unwrap();
        let reduced = a.reduced().unwrap();
        for e in reduced {
            assert_eq!(e.word.evaluate(&gens, s.group.spec()).unwrap(), e.elem);
        }
        let order = CyclicOrder::compute(reduced).unwrap();
        let eta = order.eta();
        assert!(eta.is_bijection());
        assert_eq!(eta.len(), 2 * reduced.len());
        let cycles = eta.cycles(&order);
        assert!(cycles.len() <= 2 * reduced.len());
        let principal = principal_words(reduced).unwrap();
        for p in &principal {
            let ls = p.word.letters();
            assert!(ls.windows(2).all(|w| w[1] == eta.apply(w[0])));
        }
        let (classes, report) = peripheral_classes(&s.group).unwrap();
        assert_eq!(classes.len(), cycles.len());
        assert!(report.is_consistent());
        if !report.degenerate && !report.cocompact {
            let g = report.genus.unwrap() as usize;
            assert_eq!(
                2 * g + report.parabolic_classes + report.hyperbolic_boundary_classes,
                report.rank + 1
            );
        }
    }
}

#[test]
fn witnesses_satisfy_their_invariants() {
    let mut seen = [0usize; 3];
    for seed in 0..120 {
        let params = hypdisc::bench::TrialParams {
            entries: EntryDistribution::UNIT,
            ..hypdisc::bench::TrialParams::new(2, 6, k3(), seed).unwrap()
        };
        let gens = projective(&hypdisc::bench::random_generating_set(&params));
        let cert = Reducer::new(ReducerConfig::default()).run(&gens).unwrap();
        cert.verify(&gens).unwrap();
        match &cert {
            Certificate::DiscreteTorsionFree { .. } => seen[0] += 1,
            Certificate::EllipticWitness { elem, .. } => {
                let t = elem.trace();
                assert!((&t * &t - k3().int(4)).is_negative());
                seen[1] += 1;
            }
            Certificate::IndiscretePair {
                elems: [g, h],
                reason,
                ..
            } => {
                match reason {
                    IndiscreteReason::CollarViolation => {
                        assert!(
                            hypdisc::hyperbolic::phi_product_lt_one(g, h) && !g.commutes_with(h)
                        )
                    }
                    IndiscreteReason::AbelianIncommensurable { .. } => assert!(g.commutes_with(h)),
                }
                seen[2] += 1;
            }
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

#[test]
fn group_equal_is_reflexive_and_symmetric() {
    let p = pool();
    for (i, a) in p.iter().enumerate().take(6) {
        assert!(group_equal(&a.group, &a.group).unwrap());
        for b in p.iter().take(6).skip(i + 1) {
            assert_eq!(
                group_equal(&a.group, &b.group).unwrap(),
                group_equal(&b.group, &a.group).unwrap()
            );
        }
    }
    // Nielsen-equivalent generators give the same group
    let [a, b] = [pair()[0].clone(), pair()[1].clone()];
    let moved = vec![&a * &b, b.inverse()];
    let cert = recognize_torsion_free(&moved).unwrap();
    let g = ReducedGroup::from_certificate_sl2(q(), &cert, &moved).unwrap();
    assert!(group_equal(&g, &pool()[0].group).unwrap());
}

#[test]
fn domains_are_oriented_and_audited() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for s in pool() {
        let v = Point::i(s.group.spec());
        let d = dirichlet_sides(&s.group, &v).unwrap();
        assert!(d.sides.iter().all(|side| side.is_oriented()));
        assert!(d.is_irredundant());
        for p in d.sample_points(12, &mut rng) {
            assert!(s.group.reduce_to_domain(&p).unwrap().word.is_empty(), "{p}");
        }
    }
}

#[test]
fn coset_tables_are_closed() {
    for (gens, p) in [(pair(), 5), (pair(), 7), (delta_266(), 5)] {
        let k = gens[0].spec();
        let prime = PrimeIdealData::new(k, p).unwrap();
        for level in [Level::Projective, Level::Linear] {
            let table = coset_enumeration(&gens, &prime, level, DEFAULT_COSET_CAP).unwrap();
            assert!(table.reps()[0].0.is_empty());
            let order = prime.psl2_order() as usize * if level == Level::Linear { 2 } else { 1 };
            assert_eq!(order % table.index(), 0);
            for (_, m) in table.reps() {
                for g in table.generator_images() {
                    assert!(table.find(&g.mul(m, &prime)).is_some());
                }
            }
            for w in schreier_generators(&gens, &table).unwrap() {
                let value = w.evaluate_sl2(&gens, k).unwrap();
                assert!(reduce_mod(&value, &prime, level)
                    .unwrap()
                    .is_identity(&prime, level));
            }
        }
    }
}

fn check_redundant_generators(sets: Vec<Vec<GroupElement>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for gens in sets {
        let k = gens[0].spec();
        let extra = hypdisc::bench::random_word(&mut rng, gens.len(), 4)
            .evaluate_sl2(&gens, k)
            .unwrap();
        let mut more = gens.clone();
        more.push(extra);
        let config = FiniteIndexConfig::default();
        let (FullCertificate::Discrete(a), FullCertificate::Discrete(b)) = (
            recognize(&gens, &config).unwrap(),
            recognize(&more, &config).unwrap(),
        ) else {
            panic!("not discrete")
        };
        assert!(group_equal(&a.subgroup, &b.subgroup).unwrap() || a.prime() != b.prime());
        for g in &more {
            assert!(hypdisc::finiteindex::is_member(&a, g, Mode::Psl2)
                .unwrap()
                .is_member());
        }
        for w in a.kernel_words().unwrap() {
            let value = w.evaluate(&projective(&gens), k).unwrap();
            assert!(value.classify() != IsometryClass::Elliptic);
        }
    }
}

#[test]
fn recognition_is_stable_under_redundant_generators() {
    check_redundant_generators(vec![
        vec![m(q(), ["2", "0", "0", "1/2"])],
        vec![m(q(), ["1", "1", "0", "1"])],
        vec![m(q(), ["2", "1", "1", "1"])],
    ]);
}

// a redundant generator inflates the Schreier set; about three minutes in release
#[test]
#[ignore]
fn recognition_of_the_pair_is_stable_under_redundant_generators() {
    check_redundant_generators(vec![pair()]);
}
