//! Reduction of a generating set: decides whether `⟨X⟩` is discrete and
//! torsion-free.
//!
//! The loop repeatedly replaces a generator `x` by a short word `h` that
//! contains exactly one letter `x^±1` and moves the base point strictly less
//! than `x` does. When no such replacement exists the set is reduced and the
//! group is discrete and torsion-free; otherwise the loop stops early with an
//! elliptic element or with a pair that generates an indiscrete group.
//!
//! Every entry carries a word over the original generators, so the final
//! reduced set (and every witness) can be re-checked independently.

mod commuting;
mod order;

use std::collections::HashMap;
use std::fmt;

pub use commuting::{
    resolve_commuting_pair, resolve_commuting_pair_with, CommutingPair, CyclicPair,
    DEFAULT_SEARCH_BOUND,
};
pub use order::{CyclicOrder, EtaPermutation, PrincipalWord, ShortWord};

pub(crate) use order::Layout;

use crate::error::{Error, Result};
use crate::hyperbolic::{displacement_at, DistSurrogate, Point};
use crate::moebius::{IsometryClass, ProjectiveElement, Word};
use crate::numberfield::FieldSpec;

/// A generator together with its expression in the original input.
#[derive(Clone, PartialEq, Eq)]
pub struct GeneratorEntry {
    pub elem: ProjectiveElement,
    /// Word over the original generators.
    pub word: Word,
    /// Cached displacement surrogate at the base point.
    pub surrogate: DistSurrogate,
}

impl GeneratorEntry {
    pub fn new(elem: ProjectiveElement, word: Word) -> Self {
        let base = Point::i(elem.spec());
        Self::at(elem, word, &base)
    }

    pub fn at(elem: ProjectiveElement, word: Word, base: &Point) -> Self {
        let surrogate = displacement_at(&elem, base);
        GeneratorEntry {
            elem,
            word,
            surrogate,
        }
    }

    /// Entries `x_i` with the one-letter words `i`.
    pub fn from_elements(gens: &[ProjectiveElement]) -> Vec<Self> {
        gens.iter()
            .enumerate()
            .map(|(i, g)| GeneratorEntry::new(g.clone(), Word::gen(i)))
            .collect()
    }
}

impl fmt::Debug for GeneratorEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} ({:?})", self.word, self.elem, self.surrogate)
    }
}

/// Why a pair generates an indiscrete group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IndiscreteReason {
    /// The pair commutes but has no common cyclic generator. `bounded`
    /// marks a hyperbolic pair whose dependence search was exhausted.
    AbelianIncommensurable { bounded: bool },
    /// The pair does not commute and `t(g) + t(h) < 1`.
    CollarViolation,
}

/// Result of [`recognize_torsion_free`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    DiscreteTorsionFree {
        reduced: Vec<GeneratorEntry>,
        original: Vec<ProjectiveElement>,
    },
    /// An elliptic element of the group. With `finite_order = Some(n)` it
    /// only refutes torsion-freeness; with `None` it refutes discreteness.
    EllipticWitness {
        word: Word,
        elem: ProjectiveElement,
        finite_order: Option<u32>,
    },
    IndiscretePair {
        words: [Word; 2],
        elems: [ProjectiveElement; 2],
        reason: IndiscreteReason,
    },
}

impl Certificate {
    pub fn is_discrete_torsion_free(&self) -> bool {
        matches!(self, Certificate::DiscreteTorsionFree { .. })
    }

    /// True when the certificate proves the group is not discrete.
    pub fn proves_indiscrete(&self) -> bool {
        match self {
            Certificate::DiscreteTorsionFree { .. } => false,
            Certificate::EllipticWitness { finite_order, .. } => finite_order.is_none(),
            Certificate::IndiscretePair { .. } => true,
        }
    }

    pub fn reduced(&self) -> Option<&[GeneratorEntry]> {
        match self {
            Certificate::DiscreteTorsionFree { reduced, .. } => Some(reduced),
            _ => None,
        }
    }

    /// Re-checks the certificate against the original generators.
    pub fn verify(&self, original: &[ProjectiveElement]) -> Result<()> {
        let spec = original
            .first()
            .map(|g| g.spec())
            .unwrap_or(FieldSpec::RATIONALS);
        let fail = |m: String| Err(Error::Verification(m));
        let eval = |w: &Word| w.evaluate(original, spec);
        match self {
            Certificate::DiscreteTorsionFree { reduced, .. } => {
                for e in reduced {
                    if eval(&e.word)? != e.elem {
                        return fail(format!("word {} does not evaluate to its entry", e.word));
                    }
                    if e.surrogate != displacement_at(&e.elem, &Point::i(spec)) {
                        return fail(format!("stale surrogate on {}", e.word));
                    }
                }
                let defect = reduced_defect(reduced, &Point::i(spec))?;
                if let Some(d) = defect {
                    return fail(d);
                }
                Ok(())
            }
            Certificate::EllipticWitness {
                word,
                elem,
                finite_order,
            } => {
                if eval(word)? != *elem {
                    return fail(format!(
                        "witness word {word} does not evaluate to its element"
                    ));
                }
                if elem.classify() != IsometryClass::Elliptic {
                    return fail("witness is not elliptic".into());
                }
                if elem.elliptic_finite_order()? != *finite_order {
                    return fail("recorded order disagrees with the trace".into());
                }
                Ok(())
            }
            Certificate::IndiscretePair {
                words,
                elems,
                reason,
            } => {
                for (w, e) in words.iter().zip(elems) {
                    if eval(w)? != *e {
                        return fail(format!("pair word {w} does not evaluate to its element"));
                    }
                }
                let [g, h] = elems;
                match reason {
                    IndiscreteReason::CollarViolation => {
                        if g.commutes_with(h) {
                            return fail("collar pair commutes".into());
                        }
                        let base = Point::i(spec);
                        if !displacement_at(g, &base).phi_product_lt_one(&displacement_at(h, &base))
                        {
                            return fail("collar inequality does not hold".into());
                        }
                        Ok(())
                    }
                    IndiscreteReason::AbelianIncommensurable { .. } => {
                        match resolve_commuting_pair(g, h)? {
                            CommutingPair::Indiscrete { .. } => Ok(()),
                            other => fail(format!("pair resolves to {other:?}")),
                        }
                    }
                }
            }
        }
    }
}

/// Checks that a candidate set is reduced; returns a description of the
/// first defect found.
pub(crate) fn reduced_defect(entries: &[GeneratorEntry], base: &Point) -> Result<Option<String>> {
    if let Some(e) = entries.iter().find(|e| e.elem.is_identity()) {
        return Ok(Some(format!("identity generator {}", e.word)));
    }
    if let Some(j) = duplicate_generator(entries) {
        return Ok(Some(format!(
            "generator {j} duplicates another or its inverse"
        )));
    }
    if entries.is_empty() {
        return Ok(None);
    }
    if let Some(e) = entries
        .iter()
        .find(|e| e.elem.classify() == IsometryClass::Elliptic)
    {
        return Ok(Some(format!("elliptic generator {}", e.word)));
    }
    let layout = Layout::new(entries, base)?;
    let shorts = layout.raw_short_words(entries, base);
    if let Some(s) = shorts.iter().find(|s| s.is_elliptic()) {
        return Ok(Some(format!("elliptic short word {}", s.word)));
    }
    if let Some(r) = best_replacement(entries, &shorts) {
        return Ok(Some(format!(
            "good replacement {} for generator {}",
            r.word, r.target
        )));
    }
    Ok(None)
}

/// A good replacement: `word` (over the current set) may replace entry
/// `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replacement {
    pub target: usize,
    pub word: Word,
    pub elem: ProjectiveElement,
    pub surrogate: DistSurrogate,
}

fn best_replacement(entries: &[GeneratorEntry], shorts: &[ShortWord]) -> Option<Replacement> {
    let mut best: Option<(&ShortWord, usize)> = None;
    for s in shorts {
        if let Some((b, _)) = best {
            if s.surrogate > b.surrogate {
                continue;
            }
        }
        let mut counts: HashMap<usize, usize> = HashMap::new();
        for l in s.word.letters() {
            *counts.entry(l.index).or_default() += 1;
        }
        for (&i, &n) in &counts {
            if n != 1 || s.surrogate >= entries[i].surrogate {
                continue;
            }
            let better = match best {
                None => true,
                Some((b, j)) => s
                    .surrogate
                    .cmp(&b.surrogate)
                    .then(s.word.len().cmp(&b.word.len()))
                    .then_with(|| s.word.cmp(&b.word))
                    .then_with(|| entries[j].surrogate.cmp(&entries[i].surrogate))
                    .then(i.cmp(&j))
                    .is_lt(),
            };
            if better {
                best = Some((s, i));
            }
        }
    }
    best.map(|(s, i)| Replacement {
        target: i,
        word: s.word.clone(),
        elem: s.elem.clone(),
        surrogate: s.surrogate.clone(),
    })
}

/// Index of a later entry equal to an earlier one or to its inverse.
fn duplicate_generator(entries: &[GeneratorEntry]) -> Option<usize> {
    let mut seen: HashMap<&ProjectiveElement, usize> = HashMap::new();
    for (j, e) in entries.iter().enumerate() {
        if seen.contains_key(&e.elem) || seen.contains_key(&e.elem.inverse()) {
            return Some(j);
        }
        seen.insert(&e.elem, j);
    }
    None
}

/// Clockwise order of `X^±` at `v = i`.
pub fn compute_cyclic_order(entries: &[GeneratorEntry]) -> Result<CyclicOrder> {
    CyclicOrder::compute(entries)
}

fn base_of(entries: &[GeneratorEntry]) -> Option<Point> {
    entries.first().map(|e| Point::i(e.elem.spec()))
}

/// One principal word per signed letter, grouped by η-cycle.
pub fn principal_words(entries: &[GeneratorEntry]) -> Result<Vec<PrincipalWord>> {
    let Some(base) = base_of(entries) else {
        return Ok(Vec::new());
    };
    Ok(Layout::new(entries, &base)?.principal_words(entries))
}

/// Short words (subwords of principal words), one per distinct matrix.
pub fn short_words(entries: &[GeneratorEntry]) -> Result<Vec<ShortWord>> {
    let Some(base) = base_of(entries) else {
        return Ok(Vec::new());
    };
    let raw = Layout::new(entries, &base)?.raw_short_words(entries, &base);
    Ok(order::dedup_short_words(raw))
}

/// [`principal_words`] seen from `base`.
pub fn principal_words_at(entries: &[GeneratorEntry], base: &Point) -> Result<Vec<PrincipalWord>> {
    if entries.is_empty() {
        return Ok(Vec::new());
    }
    Ok(Layout::new(entries, base)?.principal_words(entries))
}

/// [`short_words`] seen from `base`.
pub fn short_words_at(entries: &[GeneratorEntry], base: &Point) -> Result<Vec<ShortWord>> {
    if entries.is_empty() {
        return Ok(Vec::new());
    }
    let raw = Layout::new(entries, base)?.raw_short_words(entries, base);
    Ok(order::dedup_short_words(raw))
}

/// Best good replacement: smallest surrogate, then shorter word, then
/// lexicographic letters.
pub fn find_good_replacement(entries: &[GeneratorEntry]) -> Result<Option<Replacement>> {
    let Some(base) = base_of(entries) else {
        return Ok(None);
    };
    let raw = Layout::new(entries, &base)?.raw_short_words(entries, &base);
    Ok(best_replacement(entries, &raw))
}

/// Tunables for [`Reducer`].
#[derive(Clone, Debug)]
pub struct ReducerConfig {
    pub max_iters: u64,
    pub search_bound: u32,
    /// Base point; `i` when absent.
    pub base: Option<Point>,
}

impl Default for ReducerConfig {
    fn default() -> Self {
        ReducerConfig {
            max_iters: 200_000,
            search_bound: DEFAULT_SEARCH_BOUND,
            base: None,
        }
    }
}

/// Counters collected during one run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReducerStats {
    pub iterations: u64,
    pub replacements: u64,
    pub removals: u64,
    pub merges: u64,
    pub words_considered: u64,
}

/// Runs the reduction loop and records statistics.
#[derive(Clone, Debug, Default)]
pub struct Reducer {
    pub config: ReducerConfig,
    pub stats: ReducerStats,
}

impl Reducer {
    pub fn new(config: ReducerConfig) -> Self {
        Reducer {
            config,
            stats: ReducerStats::default(),
        }
    }

    pub fn run(&mut self, gens: &[ProjectiveElement]) -> Result<Certificate> {
        let spec = gens
            .first()
            .map(|g| g.spec())
            .unwrap_or(FieldSpec::RATIONALS);
        if let Some(g) = gens.iter().find(|g| g.spec() != spec) {
            return Err(Error::FieldMismatch(spec.d(), g.spec().d()));
        }
        let base = self.config.base.clone().unwrap_or_else(|| Point::i(spec));
        let original = gens.to_vec();
        let mut entries: Vec<GeneratorEntry> = gens
            .iter()
            .enumerate()
            .map(|(i, g)| GeneratorEntry::at(g.clone(), Word::gen(i), &base))
            .collect();
        let witness = |word: Word, elem: ProjectiveElement| -> Result<Certificate> {
            let finite_order = elem.elliptic_finite_order()?;
            Ok(Certificate::EllipticWitness {
                word,
                elem,
                finite_order,
            })
        };
        loop {
            self.stats.iterations += 1;
            if self.stats.iterations > self.config.max_iters {
                return Err(Error::IterationCap(self.config.max_iters));
            }
            entries.retain(|e| !e.elem.is_identity());
            if let Some(e) = entries.iter().find(|e| e.elem.trace().is_zero()) {
                return witness(e.word.clone(), e.elem.clone());
            }
            if let Some(j) = duplicate_generator(&entries) {
                entries.remove(j);
                self.stats.removals += 1;
                continue;
            }
            match entries.len() {
                0 => {
                    return Ok(Certificate::DiscreteTorsionFree {
                        reduced: entries,
                        original,
                    })
                }
                1 => {
                    let e = entries.pop().expect("one entry");
                    if e.elem.classify() == IsometryClass::Elliptic {
                        return witness(e.word, e.elem);
                    }
                    return Ok(Certificate::DiscreteTorsionFree {
                        reduced: vec![e],
                        original,
                    });
                }
                _ => {}
            }
            let (ia, ib) = two_smallest(&entries);
            match resolve_commuting_pair_with(
                &entries[ia].elem,
                &entries[ib].elem,
                self.config.search_bound,
            )? {
                CommutingPair::NotAbelian => {}
                CommutingPair::Indiscrete { bounded } => {
                    return Ok(Certificate::IndiscretePair {
                        words: [entries[ia].word.clone(), entries[ib].word.clone()],
                        elems: [entries[ia].elem.clone(), entries[ib].elem.clone()],
                        reason: IndiscreteReason::AbelianIncommensurable { bounded },
                    });
                }
                CommutingPair::Cyclic(c) => {
                    let (u, w) = c.from_pair;
                    let word = entries[ia]
                        .word
                        .pow(u)
                        .concat_reduce(&entries[ib].word.pow(w));
                    let merged = GeneratorEntry::at(c.generator, word, &base);
                    self.check_entry(&merged, &original, spec)?;
                    let (lo, hi) = (ia.min(ib), ia.max(ib));
                    entries.remove(hi);
                    entries[lo] = merged;
                    self.stats.merges += 1;
                    continue;
                }
            }
            if let Some(e) = entries
                .iter()
                .find(|e| e.elem.classify() == IsometryClass::Elliptic)
            {
                return witness(e.word.clone(), e.elem.clone());
            }
            let layout = Layout::new(&entries, &base)?;
            let shorts = layout.raw_short_words(&entries, &base);
            self.stats.words_considered += shorts.len() as u64;
            let images: Vec<Word> = entries.iter().map(|e| e.word.clone()).collect();
            if let Some(s) = shorts.iter().find(|s| s.is_elliptic()) {
                return witness(s.word.substitute(&images)?, s.elem.clone());
            }
            let minimal = shorts
                .iter()
                .filter(|s| !s.elem.is_identity())
                .min_by(|x, y| {
                    x.surrogate
                        .cmp(&y.surrogate)
                        .then(x.word.len().cmp(&y.word.len()))
                });
            if let Some(g) = minimal {
                if g.surrogate.phi_product_lt_one(&entries[ib].surrogate) {
                    if let Some(k) = [ia, ib]
                        .into_iter()
                        .find(|&k| !entries[k].elem.commutes_with(&g.elem))
                    {
                        return Ok(Certificate::IndiscretePair {
                            words: [entries[k].word.clone(), g.word.substitute(&images)?],
                            elems: [entries[k].elem.clone(), g.elem.clone()],
                            reason: IndiscreteReason::CollarViolation,
                        });
                    }
                }
            }
            match best_replacement(&entries, &shorts) {
                Some(r) => {
                    let word = r.word.substitute(&images)?;
                    let entry = GeneratorEntry {
                        elem: r.elem,
                        word,
                        surrogate: r.surrogate,
                    };
                    self.check_entry(&entry, &original, spec)?;
                    entries[r.target] = entry;
                    self.stats.replacements += 1;
                }
                None => {
                    return Ok(Certificate::DiscreteTorsionFree {
                        reduced: entries,
                        original,
                    })
                }
            }
        }
    }

    fn check_entry(
        &self,
        e: &GeneratorEntry,
        original: &[ProjectiveElement],
        spec: FieldSpec,
    ) -> Result<()> {
        if cfg!(debug_assertions) && e.word.evaluate(original, spec)? != e.elem {
            return Err(Error::Verification(format!(
                "word {} lost track of its element",
                e.word
            )));
        }
        Ok(())
    }
}

fn two_smallest(entries: &[GeneratorEntry]) -> (usize, usize) {
    let mut idx: Vec<usize> = (0..entries.len()).collect();
    idx.sort_by(|&i, &j| {
        entries[i]
            .surrogate
            .cmp(&entries[j].surrogate)
            .then(i.cmp(&j))
    });
    (idx[0], idx[1])
}

/// Runs the reduction loop with default settings.
pub fn recognize_torsion_free<G: Clone + Into<ProjectiveElement>>(
    gens: &[G],
) -> Result<Certificate> {
    let gens: Vec<ProjectiveElement> = gens.iter().cloned().map(Into::into).collect();
    Reducer::default().run(&gens)
}
