//! Deciding whether two commuting elements generate a discrete group.

use std::collections::HashMap;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::moebius::{IsometryClass, ProjectiveElement, Word};

/// Default exponent bound for the hyperbolic dependence search.
pub const DEFAULT_SEARCH_BOUND: u32 = 64;

/// Outcome of [`resolve_commuting_pair`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CommutingPair {
    NotAbelian,
    Cyclic(CyclicPair),
    /// `bounded` is set when indiscreteness rests on an exhausted search
    /// rather than an exact certificate.
    Indiscrete {
        bounded: bool,
    },
}

/// `⟨a, b⟩ = ⟨c⟩` with `c = aᵘ·bʷ`, `a = cᵖ`, `b = cᵠ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicPair {
    pub generator: ProjectiveElement,
    /// `(u, w)` with `c = aᵘ·bʷ`.
    pub from_pair: (i64, i64),
    pub a_exponent: i64,
    pub b_exponent: i64,
}

impl CyclicPair {
    /// `a` as a word in the single letter `c`.
    pub fn a_word(&self) -> Word {
        Word::gen(0).pow(self.a_exponent)
    }

    /// `b` as a word in the single letter `c`.
    pub fn b_word(&self) -> Word {
        Word::gen(0).pow(self.b_exponent)
    }

    /// `c` as a word in `a` (letter 0) and `b` (letter 1).
    pub fn c_word(&self) -> Word {
        Word::gen(0)
            .pow(self.from_pair.0)
            .concat_reduce(&Word::gen(1).pow(self.from_pair.1))
    }
}

/// Returns `(g, s, t)` with `s·x + t·y = g = gcd(x, y) ≥ 0`.
fn bezout(x: i64, y: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (x as i128, y as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (r0, s0, t0) = (-r0, -s0, -t0);
    }
    (r0 as i64, s0 as i64, t0 as i64)
}

/// Entries of `g − I` for the representative with positive trace.
fn nilpotent_part(g: &ProjectiveElement) -> [crate::FieldElement; 4] {
    let r = if g.trace().is_negative() {
        g.rep().negate()
    } else {
        g.rep().clone()
    };
    let one = r.spec().one();
    [r.a() - &one, r.b().clone(), r.c().clone(), r.d() - &one]
}

fn cyclic(
    a: &ProjectiveElement,
    b: &ProjectiveElement,
    u: i64,
    w: i64,
    pa: i64,
    pb: i64,
) -> CommutingPair {
    let generator = &a.pow(u) * &b.pow(w);
    debug_assert_eq!(generator.pow(pa), *a);
    debug_assert_eq!(generator.pow(pb), *b);
    CommutingPair::Cyclic(CyclicPair {
        generator,
        from_pair: (u, w),
        a_exponent: pa,
        b_exponent: pb,
    })
}

/// Decides whether `⟨a, b⟩` is abelian, and if so whether it is discrete.
pub fn resolve_commuting_pair(
    a: &ProjectiveElement,
    b: &ProjectiveElement,
) -> Result<CommutingPair> {
    resolve_commuting_pair_with(a, b, DEFAULT_SEARCH_BOUND)
}

pub fn resolve_commuting_pair_with(
    a: &ProjectiveElement,
    b: &ProjectiveElement,
    search_bound: u32,
) -> Result<CommutingPair> {
    if a.is_identity() || b.is_identity() {
        return Err(Error::Precondition(
            "identity passed to resolve_commuting_pair".into(),
        ));
    }
    if !a.commutes_with(b) {
        return Ok(CommutingPair::NotAbelian);
    }
    match (a.classify(), b.classify()) {
        (IsometryClass::Parabolic, IsometryClass::Parabolic) => parabolic(a, b),
        (IsometryClass::Hyperbolic, IsometryClass::Hyperbolic) => {
            Ok(hyperbolic(a, b, search_bound))
        }
        (IsometryClass::Elliptic, IsometryClass::Elliptic) => elliptic(a, b),
        // commuting nontrivial isometries always share their type
        _ => Ok(CommutingPair::NotAbelian),
    }
}

fn parabolic(a: &ProjectiveElement, b: &ProjectiveElement) -> Result<CommutingPair> {
    let na = nilpotent_part(a);
    let nb = nilpotent_part(b);
    let k = na
        .iter()
        .position(|e| !e.is_zero())
        .expect("a is not the identity");
    let lambda = match nb[k].rational_ratio(&na[k])? {
        Some(q) => q,
        None => return Ok(CommutingPair::Indiscrete { bounded: false }),
    };
    let (p, q) = match (lambda.numer().to_i64(), lambda.denom().to_i64()) {
        (Some(p), Some(q)) => (p, q),
        _ => {
            return Err(Error::Precondition(format!(
                "translation ratio {lambda} too large"
            )))
        }
    };
    // b = a^(p/q): with u·q + w·p = 1, c = aᵘbʷ has a = c^q and b = c^p
    let (_, u, w) = bezout(q, p);
    Ok(cyclic(a, b, u, w, q, p))
}

fn hyperbolic(a: &ProjectiveElement, b: &ProjectiveElement, bound: u32) -> CommutingPair {
    let bound = bound as i64;
    let mut powers: HashMap<ProjectiveElement, i64> = HashMap::new();
    let (mut up, mut down) = (b.clone(), b.inverse());
    let binv = b.inverse();
    for q in 1..=bound {
        powers.entry(up.clone()).or_insert(q);
        powers.entry(down.clone()).or_insert(-q);
        up = &up * b;
        down = &down * &binv;
    }
    let mut ap = a.clone();
    for p in 1..=bound {
        if let Some(&q) = powers.get(&ap) {
            // aᵖ = b^q with p minimal, so gcd(p, q) = 1
            let (_, u, w) = bezout(q, p);
            return cyclic(a, b, u, w, q, p);
        }
        ap = &ap * a;
    }
    CommutingPair::Indiscrete { bounded: true }
}

fn order_of(g: &ProjectiveElement, limit: u32) -> Option<u32> {
    let mut acc = g.clone();
    for k in 1..=limit {
        if acc.is_identity() {
            return Some(k);
        }
        acc = &acc * g;
    }
    None
}

fn elliptic(a: &ProjectiveElement, b: &ProjectiveElement) -> Result<CommutingPair> {
    let (na, nb) = match (a.elliptic_finite_order()?, b.elliptic_finite_order()?) {
        (Some(x), Some(y)) => (x, y),
        _ => return Ok(CommutingPair::Indiscrete { bounded: false }),
    };
    let l = num_integer::lcm(na, nb);
    for u in 0..na as i64 {
        for w in 0..nb as i64 {
            let c = &a.pow(u) * &b.pow(w);
            if order_of(&c, l) != Some(l) {
                continue;
            }
            let exp_of = |target: &ProjectiveElement| (0..l as i64).find(|&k| c.pow(k) == *target);
            if let (Some(pa), Some(pb)) = (exp_of(a), exp_of(b)) {
                return Ok(cyclic(a, b, u, w, pa, pb));
            }
        }
    }
    // unreachable for a finite cyclic rotation group
    Ok(CommutingPair::Indiscrete { bounded: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::GroupElement;
    use crate::numberfield::FieldSpec;

    fn pe(spec: FieldSpec, a: &str, b: &str, c: &str, d: &str) -> ProjectiveElement {
        GroupElement::new(
            spec.parse(a).unwrap(),
            spec.parse(b).unwrap(),
            spec.parse(c).unwrap(),
            spec.parse(d).unwrap(),
        )
        .unwrap()
        .normalize()
    }

    #[test]
    fn parabolic_commensurable() {
        let q = FieldSpec::RATIONALS;
        let a = pe(q, "1", "1", "0", "1");
        let b = pe(q, "1", "3", "0", "1");
        match resolve_commuting_pair(&a, &b).unwrap() {
            CommutingPair::Cyclic(c) => {
                assert_eq!(c.generator, a);
                assert_eq!(c.generator.pow(c.b_exponent), b);
                assert_eq!(c.b_exponent, 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parabolic_fractional_ratio() {
        let q = FieldSpec::RATIONALS;
        let a = pe(q, "1", "2", "0", "1");
        let b = pe(q, "1", "3", "0", "1");
        match resolve_commuting_pair(&a, &b).unwrap() {
            CommutingPair::Cyclic(c) => assert_eq!(c.generator, pe(q, "1", "1", "0", "1")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parabolic_incommensurable() {
        let k = FieldSpec::new(3).unwrap();
        let a = pe(k, "1", "1", "0", "1");
        let b = pe(k, "1", "r", "0", "1");
        assert_eq!(
            resolve_commuting_pair(&a, &b).unwrap(),
            CommutingPair::Indiscrete { bounded: false }
        );
    }

    #[test]
    fn hyperbolic_powers() {
        let q = FieldSpec::RATIONALS;
        let a = pe(q, "2", "0", "0", "1/2");
        let b = pe(q, "4", "0", "0", "1/4");
        match resolve_commuting_pair(&a, &b).unwrap() {
            CommutingPair::Cyclic(c) => {
                assert_eq!(c.generator, a);
                assert_eq!(c.b_exponent, 2);
            }
            other => panic!("{other:?}"),
        }
        // 4 and 8 share the generator diag(2, 1/2)
        let c8 = pe(q, "8", "0", "0", "1/8");
        match resolve_commuting_pair(&b, &c8).unwrap() {
            CommutingPair::Cyclic(c) => assert_eq!(c.generator, a),
            other => panic!("{other:?}"),
        }
        // 2 and 3 are multiplicatively independent
        let three = pe(q, "3", "0", "0", "1/3");
        assert_eq!(
            resolve_commuting_pair(&a, &three).unwrap(),
            CommutingPair::Indiscrete { bounded: true }
        );
    }

    #[test]
    fn elliptic_rotations() {
        let k = FieldSpec::new(3).unwrap();
        let c = pe(k, "r", "1", "-1", "0");
        let c2 = c.pow(2);
        let c3 = c.pow(3);
        match resolve_commuting_pair(&c2, &c3).unwrap() {
            CommutingPair::Cyclic(p) => {
                assert_eq!(order_of(&p.generator, 6), Some(6));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_commuting() {
        let q = FieldSpec::RATIONALS;
        let a = pe(q, "1", "2", "0", "1");
        let b = pe(q, "1", "0", "2", "1");
        assert_eq!(
            resolve_commuting_pair(&a, &b).unwrap(),
            CommutingPair::NotAbelian
        );
        assert!(resolve_commuting_pair(&a, &ProjectiveElement::identity(q)).is_err());
    }

    #[test]
    fn bezout_signs() {
        assert_eq!(bezout(3, 1), (1, 0, 1));
        let (g, s, t) = bezout(2, -3);
        assert_eq!(g, 1);
        assert_eq!(2 * s - 3 * t, 1);
    }
}
