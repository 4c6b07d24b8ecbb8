#![allow(dead_code)]

use hypdisc::bench::{random_generating_set, run_trial, EntryDistribution, TrialParams};
use hypdisc::hyperbolic::Point;
use hypdisc::numberfield::rational;
use hypdisc::reduction::{Certificate, ReducerConfig};
use hypdisc::{FieldElement, FieldSpec, GroupElement, ProjectiveElement};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

pub fn q() -> FieldSpec {
    FieldSpec::RATIONALS
}

pub fn k3() -> FieldSpec {
    FieldSpec::new(3).unwrap()
}

pub fn m(spec: FieldSpec, e: [&str; 4]) -> GroupElement {
    let f = |s: &str| spec.parse(s).unwrap();
    GroupElement::new(f(e[0]), f(e[1]), f(e[2]), f(e[3])).unwrap()
}

pub fn pair() -> Vec<GroupElement> {
    vec![m(q(), ["1", "2", "0", "1"]), m(q(), ["1", "0", "2", "1"])]
}

pub fn delta_266() -> Vec<GroupElement> {
    let k = k3();
    vec![
        m(k, ["2-r", "-1+r", "2-2*r", "-2+r"]),
        m(k, ["-1+r", "1", "-2+r", "1"]),
        m(k, ["r", "1", "-1", "0"]),
    ]
}

pub fn delta_266_outsider() -> GroupElement {
    m(
        k3(),
        [
            "-12483933055*r - 21622285764",
            "12710965*r + 21803060",
            "23447531*r + 40614766",
            "-23470*r - 41654",
        ],
    )
}

pub fn projective(gens: &[GroupElement]) -> Vec<ProjectiveElement> {
    gens.iter().map(|g| g.normalize()).collect()
}

/// Squarefree field parameters used by the strategies.
pub const FIELDS: [u64; 5] = [1, 2, 3, 5, 7];

pub fn spec_strategy() -> impl Strategy<Value = FieldSpec> {
    prop::sample::select(FIELDS.to_vec()).prop_map(|d| FieldSpec::new(d).unwrap())
}

pub fn elem_in(spec: FieldSpec) -> impl Strategy<Value = FieldElement> {
    (-40i64..=40, 1i64..=12, -40i64..=40, 1i64..=12).prop_map(move |(a, b, c, d)| {
        let irr = if spec.is_rational() {
            rational(0, 1)
        } else {
            rational(c, d)
        };
        spec.element(rational(a, b), irr)
    })
}

pub fn nonzero_in(spec: FieldSpec) -> impl Strategy<Value = FieldElement> {
    elem_in(spec).prop_filter("nonzero", |x| !x.is_zero())
}

/// Products of unipotent triangular factors with small entries.
pub fn group_elem_in(spec: FieldSpec, max_factors: usize) -> impl Strategy<Value = GroupElement> {
    prop::collection::vec((any::<bool>(), nonzero_in(spec)), 1..=max_factors).prop_map(move |fs| {
        fs.into_iter()
            .fold(GroupElement::identity(spec), |g, (upper, x)| {
                let f = if upper {
                    GroupElement::new(spec.one(), x, spec.zero(), spec.one())
                } else {
                    GroupElement::new(spec.one(), spec.zero(), x, spec.one())
                };
                &g * &f.unwrap()
            })
    })
}

pub fn point_in(spec: FieldSpec) -> impl Strategy<Value = Point> {
    (elem_in(spec), 1i64..=60, 1i64..=12)
        .prop_map(move |(x, n, d)| Point::new(x, spec.ratio(n, d)).unwrap())
}

/// Generating sets of random trials that recognize as discrete and
/// torsion-free, with their certificates.
pub fn discrete_trials(
    n: usize,
    d: usize,
    field: FieldSpec,
    entries: EntryDistribution,
    count: usize,
) -> Vec<(Vec<GroupElement>, Certificate)> {
    let mut out = Vec::new();
    let mut seed = 0;
    while out.len() < count {
        let params = TrialParams {
            entries,
            ..TrialParams::new(n, d, field, seed).unwrap()
        };
        seed += 1;
        if let (_, Some(cert @ Certificate::DiscreteTorsionFree { .. })) =
            run_trial(&params, &ReducerConfig::default()).unwrap()
        {
            out.push((random_generating_set(&params), cert));
        }
    }
    out
}

/// Sign of `a + b√d` from a 100-digit enclosure of `√d`.
pub fn interval_sign(x: &FieldElement) -> i8 {
    let (a, b) = (x.a(), x.b());
    let big_a = a.numer() * b.denom();
    let big_b = b.numer() * a.denom();
    if big_b.is_zero() {
        return if big_a.is_zero() {
            0
        } else if big_a.is_positive() {
            1
        } else {
            -1
        };
    }
    let scale = BigInt::from(10).pow(100u32);
    let s = (BigInt::from(x.spec().d()) * &scale * &scale).sqrt();
    let (lo_root, hi_root) = (s.clone(), s + 1);
    let base = &big_a * &scale;
    let (p, q) = (&base + &big_b * &lo_root, &base + &big_b * &hi_root);
    let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
    if lo.is_positive() {
        1
    } else if hi.is_negative() {
        -1
    } else {
        panic!("enclosure too wide for {x}")
    }
}
