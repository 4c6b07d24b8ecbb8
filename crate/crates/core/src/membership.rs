//! Point reduction into the Dirichlet domain of a reduced set, constructive
//! membership and group equality.
//!
//! A reduced set `X` determines the Dirichlet domain at `v = i` as the
//! intersection of the half-planes nearer to `v` than to `h⁻¹·v`, over the
//! short words `h` of `X` and their inverses. Pushing a point across any
//! violated bisector strictly decreases its distance to `v`; when no side
//! is violated the point is in the closed domain. For a query `q`, the orbit
//! point `q·v` lands on `v` exactly when `q` belongs to the group.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::hyperbolic::{act, Point};
use crate::moebius::{GroupElement, ProjectiveElement, Word};
use crate::numberfield::{FieldElement, FieldSpec};
use crate::reduction::{reduced_defect, Certificate, GeneratorEntry, Layout};

/// Default cap on domain-reduction steps.
pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

/// Cap on the number of equidistant orbit points visited by the tie pass.
const TIE_PASS_CAP: usize = 4096;

/// One side-pairing candidate: a short word `h` (or inverse) with the orbit
/// point `h⁻¹·v` whose bisector with `v` bounds the domain.
#[derive(Clone, Debug)]
pub struct DomainWord {
    /// Word over the reduced entries.
    pub word: Word,
    pub elem: ProjectiveElement,
    /// `h⁻¹·v`.
    pub preimage: Point,
    approx: (f64, f64),
}

/// A reduced generating set prepared for membership queries.
#[derive(Clone, Debug)]
pub struct ReducedGroup {
    entries: Vec<GeneratorEntry>,
    original: Vec<ProjectiveElement>,
    lifts: Vec<GroupElement>,
    words: Vec<DomainWord>,
    spec: FieldSpec,
    base: Point,
    minus_identity: Option<Word>,
    surface_relator: Option<Word>,
    max_steps: u64,
}

/// Outcome of a membership query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MembershipAnswer {
    /// `word` is over the original generators; its SL₂ evaluation over the
    /// lifts equals `sl2_sign · q`.
    Member {
        word: Word,
        sl2_sign: i8,
    },
    NonMember,
}

impl MembershipAnswer {
    pub fn is_member(&self) -> bool {
        matches!(self, MembershipAnswer::Member { .. })
    }

    pub fn word(&self) -> Option<&Word> {
        match self {
            MembershipAnswer::Member { word, .. } => Some(word),
            MembershipAnswer::NonMember => None,
        }
    }
}

/// Whether queries are answered in SL₂ or in PSL₂.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    Sl2,
    #[default]
    Psl2,
}

/// Result of [`ReducedGroup::reduce_to_domain`]: `elem·w = point` with
/// `elem` the value of `word` over the reduced entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainReduction {
    pub word: Word,
    pub elem: ProjectiveElement,
    pub point: Point,
    pub steps: u64,
}

/// `|q − p|² / Im q`: monotone in `d(q, p)` for fixed `p`.
pub(crate) fn cosh_proxy(q: &Point, p: &Point) -> FieldElement {
    let dx = p.x() - q.x();
    let dy = p.y() - q.y();
    (&dx * &dx + &dy * &dy) / q.y().clone()
}

/// Floating-point [`cosh_proxy`] with a bound on its rounding error, or
/// `None` when the inputs are out of range for a meaningful estimate.
fn cosh_proxy_f64(q: (f64, f64), p: (f64, f64)) -> Option<(f64, f64)> {
    let (dx, dy) = (p.0 - q.0, p.1 - q.1);
    let value = (dx * dx + dy * dy) / q.1;
    let scale = ((p.0.abs() + q.0.abs()).powi(2) + (p.1 + q.1).powi(2)) / q.1;
    let ok = value.is_finite() && scale.is_finite() && q.1 > 0.0 && p.1 > 0.0;
    ok.then_some((value, 1e-10 * scale + f64::MIN_POSITIVE))
}

impl ReducedGroup {
    /// Prepares the reduced set of a `DiscreteTorsionFree` certificate. The
    /// SL₂ lifts of the original generators are their stored
    /// representatives.
    pub fn from_certificate(cert: &Certificate) -> Result<Self> {
        match cert {
            Certificate::DiscreteTorsionFree { reduced, original } => {
                let lifts = original.iter().map(|g| g.rep().clone()).collect();
                let spec = original
                    .first()
                    .map(|g| g.spec())
                    .unwrap_or(FieldSpec::RATIONALS);
                Self::new(spec, reduced.clone(), original.clone(), lifts)
            }
            _ => Err(Error::Precondition(
                "certificate does not describe a discrete torsion-free group".into(),
            )),
        }
    }

    /// Like [`from_certificate`](Self::from_certificate) with explicit SL₂
    /// lifts of the original generators. `spec` matters only when there are
    /// no generators.
    pub fn from_certificate_sl2(
        spec: FieldSpec,
        cert: &Certificate,
        lifts: &[GroupElement],
    ) -> Result<Self> {
        match cert {
            Certificate::DiscreteTorsionFree { reduced, original } => {
                if lifts.len() != original.len() {
                    return Err(Error::Precondition(
                        "one lift per original generator expected".into(),
                    ));
                }
                for (l, g) in lifts.iter().zip(original) {
                    if ProjectiveElement::from(l.clone()) != *g {
                        return Err(Error::Precondition(format!("{l} is not a lift of {g}")));
                    }
                }
                Self::new(spec, reduced.clone(), original.clone(), lifts.to_vec())
            }
            _ => Err(Error::Precondition(
                "certificate does not describe a discrete torsion-free group".into(),
            )),
        }
    }

    /// Checks that `entries` is reduced at `i` and precomputes its domain
    /// words.
    pub fn new(
        spec: FieldSpec,
        entries: Vec<GeneratorEntry>,
        original: Vec<ProjectiveElement>,
        lifts: Vec<GroupElement>,
    ) -> Result<Self> {
        Self::at(Point::i(spec), entries, original, lifts)
    }

    /// Like [`new`](Self::new) for a set reduced at an arbitrary base point;
    /// the entry surrogates must be measured at `base`.
    pub fn at(
        base: Point,
        entries: Vec<GeneratorEntry>,
        original: Vec<ProjectiveElement>,
        lifts: Vec<GroupElement>,
    ) -> Result<Self> {
        let spec = base.spec();
        if let Some(g) = original.iter().find(|g| g.spec() != spec) {
            return Err(Error::FieldMismatch(spec.d(), g.spec().d()));
        }
        if let Some(defect) = reduced_defect(&entries, &base)? {
            return Err(Error::Precondition(format!(
                "generating set is not reduced: {defect}"
            )));
        }
        let mut words = Vec::new();
        let mut surface_relator = None;
        if !entries.is_empty() {
            let layout = Layout::new(&entries, &base)?;
            let mut seen = HashSet::new();
            for s in layout.raw_short_words(&entries, &base) {
                for (word, elem) in [(s.word.inverse(), s.elem.inverse()), (s.word, s.elem)] {
                    if elem.is_identity() || !seen.insert(elem.clone()) {
                        continue;
                    }
                    let preimage = act(&elem.inverse(), &base);
                    let approx = preimage.to_f64();
                    words.push(DomainWord {
                        word,
                        elem,
                        preimage,
                        approx,
                    });
                }
            }
            surface_relator = layout
                .principal_words(&entries)
                .into_iter()
                .find(|p| p.elem.is_identity())
                .map(|p| p.word);
        }
        let mut group = ReducedGroup {
            entries,
            original,
            lifts,
            words,
            spec,
            base,
            minus_identity: None,
            surface_relator,
            max_steps: DEFAULT_MAX_STEPS,
        };
        group.minus_identity = group.find_minus_identity()?;
        Ok(group)
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn entries(&self) -> &[GeneratorEntry] {
        &self.entries
    }

    pub fn original(&self) -> &[ProjectiveElement] {
        &self.original
    }

    pub fn lifts(&self) -> &[GroupElement] {
        &self.lifts
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    /// The point the set is reduced at.
    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    /// Short words and their inverses, deduplicated, identity excluded.
    pub fn domain_words(&self) -> &[DomainWord] {
        &self.words
    }

    /// A principal word that evaluates to the identity, when the group is
    /// cocompact.
    pub fn surface_relator(&self) -> Option<&Word> {
        self.surface_relator.as_ref()
    }

    /// A word over the original generators whose SL₂ value is `−I`, if the
    /// lifted group contains `−I`.
    pub fn minus_identity_word(&self) -> Option<&Word> {
        self.minus_identity.as_ref()
    }

    /// Rewrites a word over the reduced entries as a word over the original
    /// generators.
    pub fn expand(&self, word: &Word) -> Result<Word> {
        let images: Vec<Word> = self.entries.iter().map(|e| e.word.clone()).collect();
        word.substitute(&images)
    }

    /// SL₂ value of a word over the original generators.
    pub fn evaluate_lifted(&self, word: &Word) -> Result<GroupElement> {
        word.evaluate_sl2(&self.lifts, self.spec)
    }

    fn find_minus_identity(&self) -> Result<Option<Word>> {
        let minus = GroupElement::identity(self.spec).negate();
        if let Some(r) = &self.surface_relator {
            let w = self.expand(r)?;
            if self.evaluate_lifted(&w)? == minus {
                return Ok(Some(w));
            }
        }
        for (i, lift) in self.lifts.iter().enumerate() {
            let red = self.reduce_point(
                &act(&ProjectiveElement::from(lift.clone()), &self.base),
                false,
            )?;
            let w = self.expand(&red.word.inverse())?;
            let value = self.evaluate_lifted(&w)?;
            if value == lift.negate() {
                return Ok(Some(Word::gen(i).concat_reduce(&w.inverse())));
            }
            debug_assert_eq!(&value, lift);
        }
        Ok(None)
    }

    /// Moves `w` into the closed Dirichlet domain at `i`, then applies the
    /// canonical tie pass so that all orbit points on the boundary map to
    /// the same representative.
    pub fn reduce_to_domain(&self, w: &Point) -> Result<DomainReduction> {
        self.reduce_point(w, true)
    }

    pub(crate) fn reduce_point(&self, w: &Point, tie_pass: bool) -> Result<DomainReduction> {
        if w.spec() != self.spec {
            return Err(Error::FieldMismatch(self.spec.d(), w.spec().d()));
        }
        let base = &self.base;
        let mut word = Word::empty();
        let mut elem = ProjectiveElement::identity(self.spec);
        let mut point = w.clone();
        let mut steps = 0u64;
        while let Some(k) = self.best_step(base, &point) {
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::IterationCap(self.max_steps));
            }
            let dw = &self.words[k];
            point = act(&dw.elem, &point);
            elem = &dw.elem * &elem;
            word = dw.word.concat_reduce(&word);
        }
        let mut out = DomainReduction {
            word,
            elem,
            point,
            steps,
        };
        if tie_pass {
            self.canonical_representative(&mut out)?;
        }
        Ok(out)
    }

    /// The domain word whose move brings `point` nearest to `base`, if any
    /// move brings it strictly nearer. Floating point only discards
    /// candidates that are provably worse; the choice itself is exact.
    fn best_step(&self, base: &Point, point: &Point) -> Option<usize> {
        let current = cosh_proxy(base, point);
        let pf = point.to_f64();
        let Some((cur_f, cur_err)) = cosh_proxy_f64(base.to_f64(), pf) else {
            return self.best_step_exact(&current, point);
        };
        let mut approx = Vec::with_capacity(self.words.len());
        for dw in &self.words {
            match cosh_proxy_f64(dw.approx, pf) {
                Some(v) => approx.push(v),
                None => return self.best_step_exact(&current, point),
            }
        }
        // the true minimum is at most min(value + err)
        let ceiling = approx
            .iter()
            .fold(cur_f + cur_err, |m, &(v, e)| m.min(v + e));
        let mut best: Option<(FieldElement, usize)> = None;
        for (k, &(v, e)) in approx.iter().enumerate() {
            if v - e > ceiling || v - e > cur_f + cur_err {
                continue;
            }
            let value = cosh_proxy(&self.words[k].preimage, point);
            if value < current && best.as_ref().map_or(true, |(b, _)| value < *b) {
                best = Some((value, k));
            }
        }
        best.map(|(_, k)| k)
    }

    fn best_step_exact(&self, current: &FieldElement, point: &Point) -> Option<usize> {
        let mut best: Option<(FieldElement, usize)> = None;
        for (k, dw) in self.words.iter().enumerate() {
            let value = cosh_proxy(&dw.preimage, point);
            if value < *current && best.as_ref().map_or(true, |(b, _)| value < *b) {
                best = Some((value, k));
            }
        }
        best.map(|(_, k)| k)
    }

    /// Among the orbit points in the closed domain reachable from `out.point`
    /// through equidistant side pairings, picks the lexicographically least.
    fn canonical_representative(&self, out: &mut DomainReduction) -> Result<()> {
        let base = &self.base;
        let level = cosh_proxy(base, &out.point);
        let mut found: HashMap<Point, (Word, ProjectiveElement)> = HashMap::new();
        found.insert(
            out.point.clone(),
            (Word::empty(), ProjectiveElement::identity(self.spec)),
        );
        let mut frontier = vec![out.point.clone()];
        while let Some(p) = frontier.pop() {
            let (pw, pe) = found[&p].clone();
            let pf = p.to_f64();
            let level_f = cosh_proxy_f64(base.to_f64(), pf);
            for dw in &self.words {
                if let (Some((l, le)), Some((v, e))) = (level_f, cosh_proxy_f64(dw.approx, pf)) {
                    if (v - l).abs() > e + le {
                        continue;
                    }
                }
                if cosh_proxy(&dw.preimage, &p) != level {
                    continue;
                }
                let q = act(&dw.elem, &p);
                if found.contains_key(&q) {
                    continue;
                }
                if found.len() >= TIE_PASS_CAP {
                    return Err(Error::IterationCap(TIE_PASS_CAP as u64));
                }
                found.insert(q.clone(), (dw.word.concat_reduce(&pw), &dw.elem * &pe));
                frontier.push(q);
            }
        }
        let best = found
            .keys()
            .min_by(|a, b| a.lex_cmp(b))
            .expect("contains the start")
            .clone();
        let (w, e) = found.remove(&best).expect("present");
        out.word = w.concat_reduce(&out.word);
        out.elem = &e * &out.elem;
        out.point = best;
        Ok(())
    }

    /// Decides whether `q` lies in the group; in SL₂ mode the sign is taken
    /// into account.
    pub fn is_member(&self, q: &GroupElement, mode: Mode) -> Result<MembershipAnswer> {
        if q.spec() != self.spec {
            return Err(Error::FieldMismatch(self.spec.d(), q.spec().d()));
        }
        let qp = ProjectiveElement::from(q.clone());
        let red = self.reduce_point(&act(&qp, &self.base), false)?;
        if !(&red.elem * &qp).is_identity() {
            return Ok(MembershipAnswer::NonMember);
        }
        let word = self.expand(&red.word.inverse())?;
        let value = self.evaluate_lifted(&word)?;
        let sl2_sign: i8 = if value == *q { 1 } else { -1 };
        debug_assert!(sl2_sign == 1 || value == q.negate());
        match (mode, sl2_sign, &self.minus_identity) {
            (Mode::Psl2, _, _) | (Mode::Sl2, 1, _) => {
                Ok(MembershipAnswer::Member { word, sl2_sign })
            }
            (Mode::Sl2, _, Some(m)) => Ok(MembershipAnswer::Member {
                word: m.concat_reduce(&word),
                sl2_sign: 1,
            }),
            (Mode::Sl2, _, None) => Ok(MembershipAnswer::NonMember),
        }
    }
}

/// Membership in the group generated by a reduced set.
pub fn is_member_torsion_free(
    g: &ReducedGroup,
    q: &GroupElement,
    mode: Mode,
) -> Result<MembershipAnswer> {
    g.is_member(q, mode)
}

pub fn reduce_to_domain(g: &ReducedGroup, w: &Point) -> Result<DomainReduction> {
    g.reduce_to_domain(w)
}

/// True iff every reduced generator of each group lies in the other.
pub fn group_equal(g1: &ReducedGroup, g2: &ReducedGroup) -> Result<bool> {
    if g1.spec != g2.spec {
        return Ok(false);
    }
    for (a, b) in [(g1, g2), (g2, g1)] {
        for e in &a.entries {
            if !b.is_member(e.elem.rep(), Mode::Psl2)?.is_member() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
