//! Determinant-one matrices, projective normalization, isometry types and
//! free words.
//!
//! Words are read left to right and evaluated as ordinary matrix products:
//! the word `x₁x₂…xₙ` denotes `x₁·x₂·…·xₙ`, which acts on the upper half
//! plane on the left. A path in the Cayley graph starting at the identity
//! therefore visits `x₁, x₁x₂, …`, and the orbit picture at a vertex `g` is
//! the translate by `g` of the picture at the base point.

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};
use crate::numberfield::{FieldElement, FieldSpec};

/// A 2×2 matrix `[[a, b], [c, d]]` of determinant one.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    a: FieldElement,
    b: FieldElement,
    c: FieldElement,
    d: FieldElement,
}

impl GroupElement {
    /// Checks that all entries share a field and that the determinant is 1.
    pub fn new(a: FieldElement, b: FieldElement, c: FieldElement, d: FieldElement) -> Result<Self> {
        let spec = a.spec();
        for e in [&b, &c, &d] {
            if e.spec() != spec {
                return Err(Error::FieldMismatch(spec.d(), e.spec().d()));
            }
        }
        let det = &a * &d - &b * &c;
        if !det.is_one() {
            return Err(Error::Determinant(det.to_string()));
        }
        Ok(GroupElement { a, b, c, d })
    }

    /// Integer matrix `[[a, b], [c, d]]` over the given field.
    pub fn from_ints(spec: FieldSpec, m: [[i64; 2]; 2]) -> Result<Self> {
        Self::new(
            spec.int(m[0][0]),
            spec.int(m[0][1]),
            spec.int(m[1][0]),
            spec.int(m[1][1]),
        )
    }

    pub fn identity(spec: FieldSpec) -> Self {
        GroupElement {
            a: spec.one(),
            b: spec.zero(),
            c: spec.zero(),
            d: spec.one(),
        }
    }

    pub fn a(&self) -> &FieldElement {
        &self.a
    }
    pub fn b(&self) -> &FieldElement {
        &self.b
    }
    pub fn c(&self) -> &FieldElement {
        &self.c
    }
    pub fn d(&self) -> &FieldElement {
        &self.d
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> [&FieldElement; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn spec(&self) -> FieldSpec {
        self.a.spec()
    }

    pub fn trace(&self) -> FieldElement {
        &self.a + &self.d
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    pub fn negate(&self) -> GroupElement {
        GroupElement {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
            d: -&self.d,
        }
    }

    pub fn checked_mul(&self, rhs: &GroupElement) -> Result<GroupElement> {
        if self.spec() != rhs.spec() {
            return Err(Error::FieldMismatch(self.spec().d(), rhs.spec().d()));
        }
        Ok(self * rhs)
    }

    /// Integer power; negative exponents use the inverse.
    pub fn pow(&self, e: i64) -> GroupElement {
        let mut base = if e < 0 { self.inverse() } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = GroupElement::identity(self.spec());
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a.is_one() && self.d.is_one()
    }

    /// `±I`.
    pub fn is_projective_identity(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d && (&self.a * &self.a).is_one()
    }

    pub fn classify(&self) -> IsometryClass {
        if self.is_projective_identity() {
            return IsometryClass::Identity;
        }
        let t = self.trace();
        match (&t * &t - self.spec().int(4)).signum() {
            -1 => IsometryClass::Elliptic,
            0 => IsometryClass::Parabolic,
            _ => IsometryClass::Hyperbolic,
        }
    }

    /// Representative of the projective class with canonical sign.
    pub fn normalize(&self) -> ProjectiveElement {
        ProjectiveElement::from(self.clone())
    }

    fn first_nonzero_sign(&self) -> i8 {
        self.entries()
            .iter()
            .map(|e| e.signum())
            .find(|s| *s != 0)
            .unwrap_or(0)
    }
}

impl Mul<&GroupElement> for &GroupElement {
    type Output = GroupElement;
    fn mul(self, r: &GroupElement) -> GroupElement {
        GroupElement {
            a: &self.a * &r.a + &self.b * &r.c,
            b: &self.a * &r.b + &self.b * &r.d,
            c: &self.c * &r.a + &self.d * &r.c,
            d: &self.c * &r.b + &self.d * &r.d,
        }
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, r: GroupElement) -> GroupElement {
        &self * &r
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Element of PSL₂: an SL₂ matrix whose first nonzero entry (row-major) is
/// positive. Equality and hashing are exact.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjectiveElement {
    rep: GroupElement,
}

impl From<GroupElement> for ProjectiveElement {
    fn from(g: GroupElement) -> Self {
        if g.first_nonzero_sign() < 0 {
            ProjectiveElement { rep: g.negate() }
        } else {
            ProjectiveElement { rep: g }
        }
    }
}

impl ProjectiveElement {
    pub fn identity(spec: FieldSpec) -> Self {
        ProjectiveElement {
            rep: GroupElement::identity(spec),
        }
    }

    /// Canonical SL₂ representative.
    pub fn rep(&self) -> &GroupElement {
        &self.rep
    }

    pub fn into_rep(self) -> GroupElement {
        self.rep
    }

    pub fn spec(&self) -> FieldSpec {
        self.rep.spec()
    }

    /// Trace of the canonical representative; only defined up to sign on
    /// the projective class.
    pub fn trace(&self) -> FieldElement {
        self.rep.trace()
    }

    pub fn inverse(&self) -> ProjectiveElement {
        ProjectiveElement::from(self.rep.inverse())
    }

    pub fn pow(&self, e: i64) -> ProjectiveElement {
        ProjectiveElement::from(self.rep.pow(e))
    }

    pub fn is_identity(&self) -> bool {
        self.rep.is_identity()
    }

    pub fn classify(&self) -> IsometryClass {
        self.rep.classify()
    }

    pub fn commutes_with(&self, other: &ProjectiveElement) -> bool {
        self * other == other * self
    }

    /// Order of an elliptic element whose trace is `±2cos(πk/n)`.
    ///
    /// Over fields of degree at most two only `n ∈ {2, 3, 4, 5, 6}` can occur,
    /// so the squared trace is compared against `0, 1, 2, (3 ± √5)/2, 3`.
    /// `None` means the rotation angle is an irrational multiple of π.
    pub fn elliptic_finite_order(&self) -> Result<Option<u32>> {
        if self.classify() != IsometryClass::Elliptic {
            return Err(Error::Precondition(format!("{} is not elliptic", self.rep)));
        }
        let spec = self.spec();
        let t = self.trace();
        let t2 = &t * &t;
        let mut table = vec![(spec.int(0), 2), (spec.int(1), 3)];
        match spec.d() {
            2 => table.push((spec.int(2), 4)),
            3 => table.push((spec.int(3), 6)),
            5 => {
                let half = spec.ratio(1, 2);
                table.push((&half * spec.from_ints(3, 1), 5));
                table.push((&half * spec.from_ints(3, -1), 5));
            }
            _ => {}
        }
        Ok(table.into_iter().find(|(v, _)| *v == t2).map(|(_, n)| n))
    }
}

impl Mul<&ProjectiveElement> for &ProjectiveElement {
    type Output = ProjectiveElement;
    fn mul(self, r: &ProjectiveElement) -> ProjectiveElement {
        ProjectiveElement::from(&self.rep * &r.rep)
    }
}

impl Mul for ProjectiveElement {
    type Output = ProjectiveElement;
    fn mul(self, r: ProjectiveElement) -> ProjectiveElement {
        &self * &r
    }
}

impl fmt::Display for ProjectiveElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "±{}", self.rep)
    }
}

impl fmt::Debug for ProjectiveElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Isometry type, decided by `sign(trace² − 4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IsometryClass {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// A generator index with exponent ±1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub index: usize,
    pub exp: i8,
}

impl Letter {
    pub fn new(index: usize, exp: i8) -> Self {
        debug_assert!(exp == 1 || exp == -1);
        Letter { index, exp }
    }

    pub fn gen(index: usize) -> Self {
        Letter { index, exp: 1 }
    }

    pub fn inverse(self) -> Self {
        Letter {
            index: self.index,
            exp: -self.exp,
        }
    }

    /// `±(index + 1)`, the encoding used in JSON documents.
    pub fn to_signed(self) -> i64 {
        (self.index as i64 + 1) * self.exp as i64
    }

    pub fn from_signed(v: i64) -> Result<Self> {
        if v == 0 {
            return Err(Error::Precondition("letter code 0".into()));
        }
        Ok(Letter {
            index: v.unsigned_abs() as usize - 1,
            exp: v.signum() as i8,
        })
    }
}

/// A freely reduced word in signed generator letters.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    /// Freely reduces the given letters.
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    pub fn empty() -> Self {
        Word::default()
    }

    pub fn letter(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    pub fn gen(index: usize) -> Self {
        Word::letter(Letter::gen(index))
    }

    pub fn from_signed(codes: &[i64]) -> Result<Self> {
        Ok(Word::new(
            codes
                .iter()
                .map(|&c| Letter::from_signed(c))
                .collect::<Result<Vec<_>>>()?,
        ))
    }

    pub fn to_signed(&self) -> Vec<i64> {
        self.letters.iter().map(|l| l.to_signed()).collect()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Concatenation followed by free reduction.
    pub fn concat_reduce(&self, other: &Word) -> Word {
        let mut i = self.letters.len();
        let mut j = 0;
        while i > 0 && j < other.letters.len() && self.letters[i - 1] == other.letters[j].inverse()
        {
            i -= 1;
            j += 1;
        }
        let mut letters = self.letters[..i].to_vec();
        letters.extend_from_slice(&other.letters[j..]);
        Word { letters }
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = Word::empty();
        for _ in 0..e.unsigned_abs() {
            acc = acc.concat_reduce(&base);
        }
        acc
    }

    /// Returns `(w', c)` with `self = c·w'·c⁻¹` and `w'` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.letters.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k] == self.letters[n - 1 - k].inverse() {
            k += 1;
        }
        (
            Word {
                letters: self.letters[k..n - k].to_vec(),
            },
            Word {
                letters: self.letters[..k].to_vec(),
            },
        )
    }

    /// Number of letters with the given generator index.
    pub fn count_index(&self, index: usize) -> usize {
        self.letters.iter().filter(|l| l.index == index).count()
    }

    /// Replaces every letter `i` by `images[i]` (and `i⁻¹` by its inverse).
    pub fn substitute(&self, images: &[Word]) -> Result<Word> {
        let mut letters = Vec::new();
        for l in &self.letters {
            let img = images.get(l.index).ok_or(Error::IndexOutOfRange {
                index: l.index,
                len: images.len(),
            })?;
            if l.exp > 0 {
                letters.extend_from_slice(&img.letters);
            } else {
                letters.extend(img.letters.iter().rev().map(|x| x.inverse()));
            }
        }
        Ok(Word::new(letters))
    }

    fn check_range(&self, len: usize) -> Result<()> {
        match self.letters.iter().find(|l| l.index >= len) {
            Some(l) => Err(Error::IndexOutOfRange {
                index: l.index,
                len,
            }),
            None => Ok(()),
        }
    }

    /// Projective evaluation; the empty word needs at least one generator to
    /// know the field, otherwise an explicit spec.
    pub fn evaluate(
        &self,
        gens: &[ProjectiveElement],
        spec: FieldSpec,
    ) -> Result<ProjectiveElement> {
        let reps: Vec<&GroupElement> = gens.iter().map(|g| g.rep()).collect();
        Ok(ProjectiveElement::from(self.eval_reps(&reps, spec)?))
    }

    /// Evaluation over SL₂ matrices, keeping the sign.
    pub fn evaluate_sl2(&self, gens: &[GroupElement], spec: FieldSpec) -> Result<GroupElement> {
        let reps: Vec<&GroupElement> = gens.iter().collect();
        self.eval_reps(&reps, spec)
    }

    fn eval_reps(&self, gens: &[&GroupElement], spec: FieldSpec) -> Result<GroupElement> {
        self.check_range(gens.len())?;
        let inverses: Vec<GroupElement> = gens.iter().map(|g| g.inverse()).collect();
        let mut acc = GroupElement::identity(spec);
        for l in &self.letters {
            let g = if l.exp > 0 {
                gens[l.index]
            } else {
                &inverses[l.index]
            };
            acc = acc.checked_mul(g)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for Word {
    /// Lower-case letters for generators, upper-case for inverses; indices
    /// past 25 are written `x26` / `X26`. The empty word prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            if l.index < 26 {
                let c = (b'a' + l.index as u8) as char;
                let c = if l.exp > 0 { c } else { c.to_ascii_uppercase() };
                write!(f, "{c}")?;
            } else {
                write!(f, "{}{}", if l.exp > 0 { 'x' } else { 'X' }, l.index)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
