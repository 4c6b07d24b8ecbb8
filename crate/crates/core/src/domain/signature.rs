//! Peripheral classes and the signature of a reduced group.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperbolic::Geodesic;
use crate::membership::ReducedGroup;
use crate::moebius::{IsometryClass, ProjectiveElement, Word};
use crate::numberfield::FieldElement;
use crate::reduction::{principal_words_at, PrincipalWord};

use super::ball_words;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PeripheralKind {
    Parabolic,
    BoundaryHyperbolic,
    /// The principal word is the identity: a closed surface relator.
    Relator,
}

/// One η-cycle with its first principal word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeripheralClass {
    pub principal: PrincipalWord,
    /// `principal.word` over the original generators.
    pub word: Word,
    pub kind: PeripheralKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SignatureReport {
    /// `None` when `degenerate`.
    pub genus: Option<u64>,
    pub parabolic_classes: usize,
    pub hyperbolic_boundary_classes: usize,
    pub cocompact: bool,
    /// The Euler relation has no valid solution, or two parabolic classes
    /// share a fixed point.
    pub degenerate: bool,
    pub rank: usize,
}

impl SignatureReport {
    /// `rank = 2·genus + s + t − 1` (or `2·genus` when cocompact).
    pub fn is_consistent(&self) -> bool {
        match (self.genus, self.cocompact) {
            (None, _) => self.degenerate,
            (Some(g), true) => {
                self.parabolic_classes == 0
                    && self.hyperbolic_boundary_classes == 0
                    && self.rank as u64 == 2 * g
            }
            (Some(g), false) => {
                (self.rank + 1) as u64
                    == 2 * g + (self.parabolic_classes + self.hyperbolic_boundary_classes) as u64
            }
        }
    }
}

/// Fixed point of a parabolic element; `None` stands for `∞`.
fn parabolic_fixed_point(g: &ProjectiveElement) -> Option<FieldElement> {
    let r = g.rep();
    if r.c().is_zero() {
        return None;
    }
    Some((r.a() - r.d()) / (r.spec().int(2) * r.c()))
}

fn first_per_cycle(group: &ReducedGroup) -> Result<Vec<PrincipalWord>> {
    let mut seen = HashSet::new();
    Ok(principal_words_at(group.entries(), group.base())?
        .into_iter()
        .filter(|p| seen.insert(p.cycle_id))
        .collect())
}

/// Classifies each η-cycle and derives the signature.
pub fn peripheral_classes(group: &ReducedGroup) -> Result<(Vec<PeripheralClass>, SignatureReport)> {
    let mut classes = Vec::new();
    for p in first_per_cycle(group)? {
        let kind = match p.elem.classify() {
            IsometryClass::Parabolic => PeripheralKind::Parabolic,
            IsometryClass::Hyperbolic => PeripheralKind::BoundaryHyperbolic,
            IsometryClass::Identity => PeripheralKind::Relator,
            IsometryClass::Elliptic => {
                return Err(Error::Verification(format!(
                    "principal word {:?} is elliptic",
                    p.word
                )));
            }
        };
        let word = group.expand(&p.word)?;
        classes.push(PeripheralClass {
            principal: p,
            word,
            kind,
        });
    }
    let rank = group.rank();
    let count = |k: PeripheralKind| classes.iter().filter(|c| c.kind == k).count();
    let (s, t) = (
        count(PeripheralKind::Parabolic),
        count(PeripheralKind::BoundaryHyperbolic),
    );
    let cocompact = count(PeripheralKind::Relator) > 0;
    let report = if cocompact {
        SignatureReport {
            genus: Some(rank as u64 / 2),
            parabolic_classes: 0,
            hyperbolic_boundary_classes: 0,
            cocompact,
            degenerate: rank % 2 == 1,
            rank,
        }
    } else {
        let twice = rank as i64 + 1 - s as i64 - t as i64;
        let mut fixed = HashSet::new();
        let shared = classes
            .iter()
            .filter(|c| c.kind == PeripheralKind::Parabolic)
            .any(|c| !fixed.insert(parabolic_fixed_point(&c.principal.elem)));
        let degenerate = twice < 0 || twice % 2 != 0 || shared;
        SignatureReport {
            genus: (!degenerate).then_some(twice as u64 / 2),
            parabolic_classes: s,
            hyperbolic_boundary_classes: t,
            cocompact,
            degenerate,
            rank,
        }
    };
    Ok((classes, report))
}

/// Axes of the hyperbolic principal words and their conjugates by words of
/// length at most `conj_depth`, without repeated curves.
pub fn nielsen_region_sides(group: &ReducedGroup, conj_depth: usize) -> Result<Vec<Geodesic>> {
    let spec = group.spec();
    let elems: Vec<ProjectiveElement> = group.entries().iter().map(|e| e.elem.clone()).collect();
    let conjugators: Vec<ProjectiveElement> = ball_words(elems.len(), conj_depth)
        .iter()
        .map(|w| w.evaluate(&elems, spec))
        .collect::<Result<_>>()?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for p in first_per_cycle(group)? {
        if p.elem.classify() != IsometryClass::Hyperbolic {
            continue;
        }
        for c in &conjugators {
            let axis = Geodesic::axis(&(&(c * &p.elem) * &c.inverse()))?;
            if !seen.contains(&axis.reversed()) && seen.insert(axis.clone()) {
                out.push(axis);
            }
        }
    }
    Ok(out)
}
