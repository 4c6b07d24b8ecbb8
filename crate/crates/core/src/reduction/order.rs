//! Cyclic order of the signed generators around the base point, the
//! permutation η and the principal and short words it induces.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::hyperbolic::{act, direction_from, displacement_at, Direction, DistSurrogate, Point};
use crate::moebius::{GroupElement, IsometryClass, Letter, ProjectiveElement, Word};

use super::GeneratorEntry;

/// The signed letters `X^±` listed clockwise around the base point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicOrder {
    slots: Vec<Letter>,
    position: HashMap<Letter, usize>,
}

impl CyclicOrder {
    /// Clockwise order of the images `x·v` seen from `v = i`.
    pub fn compute(entries: &[GeneratorEntry]) -> Result<Self> {
        let spec = match entries.first() {
            Some(e) => e.elem.spec(),
            None => {
                return Ok(CyclicOrder {
                    slots: Vec::new(),
                    position: HashMap::new(),
                })
            }
        };
        Self::compute_at(entries, &Point::i(spec))
    }

    /// Clockwise order seen from an arbitrary base point. Letters on a common
    /// ray are ordered by distance from the base point, then by
    /// `(index, exponent)`.
    pub fn compute_at(entries: &[GeneratorEntry], base: &Point) -> Result<Self> {
        let reference = Direction::new(base.spec().one(), base.spec().zero())?;
        let mut keyed: Vec<(Letter, Direction, &DistSurrogate)> =
            Vec::with_capacity(2 * entries.len());
        for (i, e) in entries.iter().enumerate() {
            if e.elem.is_identity() {
                return Err(Error::Precondition(format!(
                    "generator {i} is the identity"
                )));
            }
            for exp in [1i8, -1] {
                let g = if exp > 0 {
                    e.elem.clone()
                } else {
                    e.elem.inverse()
                };
                let p = act(&g, base);
                let dir = direction_from(base, &p).map_err(|_| {
                    Error::Precondition(format!("generator {i} fixes the base point"))
                })?;
                keyed.push((Letter::new(i, exp), dir, &e.surrogate));
            }
        }
        keyed.sort_by(|x, y| {
            reference
                .cw_cmp(&x.1, &y.1)
                .then_with(|| x.2.cmp(y.2))
                .then_with(|| x.0.cmp(&y.0))
        });
        let slots: Vec<Letter> = keyed.into_iter().map(|k| k.0).collect();
        let position = slots.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        Ok(CyclicOrder { slots, position })
    }

    pub fn slots(&self) -> &[Letter] {
        &self.slots
    }

    pub fn successor(&self, l: Letter) -> Letter {
        let i = self.position[&l];
        self.slots[(i + 1) % self.slots.len()]
    }

    /// `η(x)` is the slot directly following `x⁻¹`.
    pub fn eta(&self) -> EtaPermutation {
        EtaPermutation {
            map: self
                .slots
                .iter()
                .map(|&l| (l, self.successor(l.inverse())))
                .collect(),
        }
    }
}

/// The bijection `η` on signed letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaPermutation {
    map: HashMap<Letter, Letter>,
}

impl EtaPermutation {
    pub fn apply(&self, l: Letter) -> Letter {
        self.map[&l]
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn is_bijection(&self) -> bool {
        let image: HashSet<&Letter> = self.map.values().collect();
        image.len() == self.map.len() && image.iter().all(|l| self.map.contains_key(l))
    }

    /// Orbits, each starting at its first letter in `order`.
    pub fn cycles(&self, order: &CyclicOrder) -> Vec<Vec<Letter>> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for &start in order.slots() {
            if seen.contains(&start) {
                continue;
            }
            let mut cycle = vec![start];
            seen.insert(start);
            let mut l = self.apply(start);
            while l != start {
                seen.insert(l);
                cycle.push(l);
                l = self.apply(l);
            }
            out.push(cycle);
        }
        out
    }
}

/// A word read along an η-orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrincipalWord {
    pub word: Word,
    pub elem: ProjectiveElement,
    pub cycle_id: usize,
}

/// A contiguous subword of a principal word with its value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortWord {
    pub word: Word,
    pub elem: ProjectiveElement,
    pub surrogate: DistSurrogate,
}

impl ShortWord {
    pub fn is_elliptic(&self) -> bool {
        self.elem.classify() == IsometryClass::Elliptic
    }
}

/// Order, η and its cycles for one generating set.
pub(crate) struct Layout {
    pub cycles: Vec<Vec<Letter>>,
}

impl Layout {
    pub fn new(entries: &[GeneratorEntry], base: &Point) -> Result<Self> {
        let order = CyclicOrder::compute_at(entries, base)?;
        let cycles = order.eta().cycles(&order);
        Ok(Layout { cycles })
    }

    /// Every principal word: one per starting letter.
    pub fn principal_words(&self, entries: &[GeneratorEntry]) -> Vec<PrincipalWord> {
        let mut out = Vec::new();
        for (id, cycle) in self.cycles.iter().enumerate() {
            let n = cycle.len();
            for s in 0..n {
                let letters: Vec<Letter> = (0..n).map(|k| cycle[(s + k) % n]).collect();
                let word = Word::new(letters);
                let elem = eval_letters(entries, word.letters());
                out.push(PrincipalWord {
                    word,
                    elem,
                    cycle_id: id,
                });
            }
        }
        out
    }

    /// Every contiguous subword of every rotation, without deduplication.
    pub fn raw_short_words(&self, entries: &[GeneratorEntry], base: &Point) -> Vec<ShortWord> {
        let reps: Vec<(GroupElement, GroupElement)> = entries
            .iter()
            .map(|e| (e.elem.rep().clone(), e.elem.rep().inverse()))
            .collect();
        let mut out = Vec::new();
        for cycle in &self.cycles {
            let n = cycle.len();
            for s in 0..n {
                let mut acc: Option<GroupElement> = None;
                let mut letters = Vec::with_capacity(n);
                for k in 0..n {
                    let l = cycle[(s + k) % n];
                    letters.push(l);
                    let g = if l.exp > 0 {
                        &reps[l.index].0
                    } else {
                        &reps[l.index].1
                    };
                    acc = Some(match acc {
                        None => g.clone(),
                        Some(a) => &a * g,
                    });
                    let elem = ProjectiveElement::from(acc.clone().expect("just set"));
                    let surrogate = displacement_at(&elem, base);
                    out.push(ShortWord {
                        word: Word::new(letters.iter().copied()),
                        elem,
                        surrogate,
                    });
                }
            }
        }
        out
    }
}

fn eval_letters(entries: &[GeneratorEntry], letters: &[Letter]) -> ProjectiveElement {
    let spec = entries[0].elem.spec();
    let mut acc = GroupElement::identity(spec);
    for l in letters {
        let g = &entries[l.index].elem;
        acc = if l.exp > 0 {
            &acc * g.rep()
        } else {
            &acc * &g.rep().inverse()
        };
    }
    ProjectiveElement::from(acc)
}

/// Keeps the first word for each distinct matrix.
pub(crate) fn dedup_short_words(raw: Vec<ShortWord>) -> Vec<ShortWord> {
    let mut seen = HashSet::new();
    raw.into_iter()
        .filter(|s| seen.insert(s.elem.clone()))
        .collect()
}
