//! Recognition and membership for groups that may contain torsion.
//!
//! Reduction modulo a suitable prime ideal maps `G` onto a finite group whose
//! kernel `H` is torsion-free. The cosets of `H` are enumerated in the finite
//! image, Schreier generators give a generating set of `H`, and the
//! torsion-free machinery runs on `H`. `G` is discrete iff `H` is.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::membership::{MembershipAnswer, Mode, ReducedGroup};
use crate::moebius::{GroupElement, ProjectiveElement, Word};
use crate::numberfield::{FieldElement, FieldSpec, Rational};
use crate::reduction::{Certificate, Reducer, ReducerConfig, ReducerStats};

/// Default cap on the size of the finite image.
pub const DEFAULT_COSET_CAP: usize = 1_000_000;

/// Largest prime tried before giving up.
const PRIME_SEARCH_LIMIT: u64 = 100_000;

/// Element `u + v·s` of `F_p` (with `v = 0`) or of `F_{p²} = F_p(s)`,
/// `s² = d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    u: u64,
    v: u64,
}

impl Residue {
    pub fn parts(self) -> (u64, u64) {
        (self.u, self.v)
    }
}

/// The residue field of a prime ideal over an odd prime `p ∤ d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeIdealData {
    pub p: u64,
    /// 1 when `d` is a square mod `p` (or the field is ℚ), 2 when inert.
    pub residue_degree: u32,
    /// Image of `√d` in `F_p` for a split prime.
    pub root: Option<u64>,
    /// `d mod p`; in the inert case the residue field is `F_p[s]/(s² − d)`.
    pub d_mod_p: u64,
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| n % k != 0)
}

impl PrimeIdealData {
    /// The residue field for `p` in `K`, if `p` is odd and unramified.
    pub fn new(spec: FieldSpec, p: u64) -> Option<Self> {
        if p < 3 || !is_prime(p) || spec.d() % p == 0 {
            return None;
        }
        let dp = spec.d() % p;
        if spec.is_rational() {
            return Some(PrimeIdealData {
                p,
                residue_degree: 1,
                root: None,
                d_mod_p: dp,
            });
        }
        match (1..p).find(|r| r * r % p == dp) {
            Some(r) => Some(PrimeIdealData {
                p,
                residue_degree: 1,
                root: Some(r),
                d_mod_p: dp,
            }),
            None => Some(PrimeIdealData {
                p,
                residue_degree: 2,
                root: None,
                d_mod_p: dp,
            }),
        }
    }

    /// Size of the residue field.
    pub fn q(&self) -> u64 {
        self.p.pow(self.residue_degree)
    }

    /// `|PSL₂(F_q)|`.
    pub fn psl2_order(&self) -> u64 {
        let q = self.q();
        q * (q - 1) * (q + 1) / 2
    }

    pub fn zero(&self) -> Residue {
        Residue { u: 0, v: 0 }
    }

    pub fn one(&self) -> Residue {
        Residue { u: 1, v: 0 }
    }

    pub fn add(&self, x: Residue, y: Residue) -> Residue {
        Residue {
            u: (x.u + y.u) % self.p,
            v: (x.v + y.v) % self.p,
        }
    }

    pub fn neg(&self, x: Residue) -> Residue {
        Residue {
            u: (self.p - x.u) % self.p,
            v: (self.p - x.v) % self.p,
        }
    }

    pub fn mul(&self, x: Residue, y: Residue) -> Residue {
        let p = self.p;
        let u = (x.u * y.u + x.v * y.v % p * self.d_mod_p) % p;
        let v = (x.u * y.v + x.v * y.u) % p;
        Residue { u, v }
    }

    fn rational(&self, q: &Rational) -> Result<u64> {
        let p = BigInt::from(self.p);
        let den = q.denom().mod_floor(&p);
        if den.is_zero() {
            return Err(Error::NotIntegral(self.p));
        }
        let num = q.numer().mod_floor(&p).to_u64().expect("reduced mod p");
        let den = den.to_u64().expect("reduced mod p");
        Ok(num * pow_mod(den, self.p - 2, self.p) % self.p)
    }

    /// The reduction map `K → F_q`.
    pub fn reduce(&self, x: &FieldElement) -> Result<Residue> {
        let a = self.rational(x.a())?;
        let b = self.rational(x.b())?;
        Ok(match (self.residue_degree, self.root) {
            (2, _) => Residue { u: a, v: b },
            (_, Some(r)) => Residue {
                u: (a + b * r) % self.p,
                v: 0,
            },
            // over ℚ the b part is always zero
            _ => Residue { u: a, v: 0 },
        })
    }
}

/// Finite traces of elliptic elements of `PSL₂(K)` up to sign.
fn torsion_traces(spec: FieldSpec) -> Vec<FieldElement> {
    let mut out = vec![spec.zero(), spec.one()];
    match spec.d() {
        2 | 3 => out.push(spec.sqrt_d()),
        5 => {
            let half = spec.ratio(1, 2);
            out.push(&half * spec.from_ints(1, 1));
            out.push(&half * spec.from_ints(-1, 1));
        }
        _ => {}
    }
    out
}

/// True when the prime rules out torsion in the kernel and every generator
/// entry is integral there.
fn admissible(prime: &PrimeIdealData, spec: FieldSpec, gens: &[GroupElement]) -> bool {
    let two = prime.reduce(&spec.int(2)).expect("2 is integral");
    let minus_two = prime.neg(two);
    let traces_ok = torsion_traces(spec).iter().all(|t| {
        let r = prime.reduce(t).expect("traces are integral away from 2");
        let rn = prime.neg(r);
        r != two && r != minus_two && rn != two
    });
    traces_ok
        && gens
            .iter()
            .all(|g| g.entries().iter().all(|e| prime.reduce(e).is_ok()))
}

/// Smallest admissible prime at or above `start`.
pub fn select_torsion_free_prime(
    spec: FieldSpec,
    gens: &[GroupElement],
    start: u64,
) -> Result<PrimeIdealData> {
    (start.max(3)..=PRIME_SEARCH_LIMIT)
        .filter_map(|p| PrimeIdealData::new(spec, p))
        .find(|prime| admissible(prime, spec, gens))
        .ok_or(Error::NoAdmissiblePrime(PRIME_SEARCH_LIMIT))
}

/// Whether cosets are taken in `PSL₂(F_q)` or in `SL₂(F_q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    #[default]
    Projective,
    Linear,
}

/// A 2×2 matrix over the residue field.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueMatrix(pub [Residue; 4]);

impl ResidueMatrix {
    pub fn identity(prime: &PrimeIdealData) -> Self {
        ResidueMatrix([prime.one(), prime.zero(), prime.zero(), prime.one()])
    }

    pub fn mul(&self, other: &Self, prime: &PrimeIdealData) -> Self {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = other.0;
        let m = |x, y, z, w| prime.add(prime.mul(x, y), prime.mul(z, w));
        ResidueMatrix([m(a, e, b, g), m(a, f, b, h), m(c, e, d, g), m(c, f, d, h)])
    }

    fn negate(&self, prime: &PrimeIdealData) -> Self {
        ResidueMatrix(self.0.map(|x| prime.neg(x)))
    }

    /// Picks the smaller of `±M` when working projectively.
    fn normalize(self, prime: &PrimeIdealData, level: Level) -> Self {
        match level {
            Level::Linear => self,
            Level::Projective => {
                let n = self.negate(prime);
                if n.0 < self.0 {
                    n
                } else {
                    self
                }
            }
        }
    }

    pub fn is_identity(&self, prime: &PrimeIdealData, level: Level) -> bool {
        self.normalize(prime, level) == ResidueMatrix::identity(prime).normalize(prime, level)
    }
}

impl fmt::Debug for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self
            .0
            .iter()
            .map(|r| {
                if r.v == 0 {
                    r.u.to_string()
                } else {
                    format!("{}+{}s", r.u, r.v)
                }
            })
            .collect();
        write!(f, "[[{}, {}], [{}, {}]]", e[0], e[1], e[2], e[3])
    }
}

/// Reduces a matrix entrywise.
pub fn reduce_mod(g: &GroupElement, prime: &PrimeIdealData, level: Level) -> Result<ResidueMatrix> {
    let e = g.entries();
    let m = ResidueMatrix([
        prime.reduce(e[0])?,
        prime.reduce(e[1])?,
        prime.reduce(e[2])?,
        prime.reduce(e[3])?,
    ]);
    Ok(m.normalize(prime, level))
}

/// Left coset representatives of the kernel, one per element of the finite
/// image, each with a shortest word.
#[derive(Clone, Debug)]
pub struct CosetTable {
    prime: PrimeIdealData,
    level: Level,
    reps: Vec<(Word, ResidueMatrix)>,
    lookup: HashMap<ResidueMatrix, usize>,
    gen_images: Vec<ResidueMatrix>,
}

impl CosetTable {
    pub fn index(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[(Word, ResidueMatrix)] {
        &self.reps
    }

    pub fn prime(&self) -> &PrimeIdealData {
        &self.prime
    }

    pub fn level(&self) -> Level {
        self.level
    }

    /// Coset of an image element, if it lies in the image group.
    pub fn find(&self, m: &ResidueMatrix) -> Option<usize> {
        self.lookup
            .get(&m.normalize(&self.prime, self.level))
            .copied()
    }

    pub fn generator_images(&self) -> &[ResidueMatrix] {
        &self.gen_images
    }
}

/// Breadth-first closure of the image group under left multiplication by the
/// generator images.
pub fn coset_enumeration(
    gens: &[GroupElement],
    prime: &PrimeIdealData,
    level: Level,
    cap: usize,
) -> Result<CosetTable> {
    let gen_images: Vec<ResidueMatrix> = gens
        .iter()
        .map(|g| reduce_mod(g, prime, level))
        .collect::<Result<_>>()?;
    let id = ResidueMatrix::identity(prime).normalize(prime, level);
    let mut reps = vec![(Word::empty(), id)];
    let mut lookup = HashMap::from([(id, 0usize)]);
    let mut head = 0;
    while head < reps.len() {
        let (word, m) = reps[head].clone();
        for (i, x) in gen_images.iter().enumerate() {
            let y = x.mul(&m, prime).normalize(prime, level);
            if lookup.contains_key(&y) {
                continue;
            }
            if reps.len() >= cap {
                return Err(Error::CosetCap(cap));
            }
            lookup.insert(y, reps.len());
            reps.push((Word::gen(i).concat_reduce(&word), y));
        }
        head += 1;
    }
    Ok(CosetTable {
        prime: *prime,
        level,
        reps,
        lookup,
        gen_images,
    })
}

/// Schreier generators `rep(x·s)⁻¹·x·s` of the kernel, as words over the
/// generators, with trivial words and repeated matrices dropped.
pub fn schreier_generators(gens: &[GroupElement], table: &CosetTable) -> Result<Vec<Word>> {
    let spec = gens
        .first()
        .map(|g| g.spec())
        .unwrap_or(FieldSpec::RATIONALS);
    let projective: Vec<ProjectiveElement> = gens.iter().map(|g| g.normalize()).collect();
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for (sw, sm) in &table.reps {
        for (i, x) in table.gen_images.iter().enumerate() {
            let target = table
                .find(&x.mul(sm, &table.prime))
                .expect("table is closed");
            let word = table.reps[target]
                .0
                .inverse()
                .concat_reduce(&Word::gen(i))
                .concat_reduce(sw);
            if word.is_empty() {
                continue;
            }
            let elem = word.evaluate(&projective, spec)?;
            let key = match table.level {
                Level::Projective => elem.rep().clone(),
                Level::Linear => word.evaluate_sl2(gens, spec)?,
            };
            if elem.is_identity() && table.level == Level::Projective {
                continue;
            }
            if key.is_identity() || !seen.insert(key) {
                continue;
            }
            out.push(word);
        }
    }
    Ok(out)
}

/// Tunables for [`recognize`].
#[derive(Clone, Debug)]
pub struct FiniteIndexConfig {
    pub prime_start: u64,
    pub coset_cap: usize,
    pub level: Level,
    pub reducer: ReducerConfig,
}

impl Default for FiniteIndexConfig {
    fn default() -> Self {
        FiniteIndexConfig {
            prime_start: 3,
            coset_cap: DEFAULT_COSET_CAP,
            level: Level::Projective,
            reducer: ReducerConfig::default(),
        }
    }
}

/// A discrete group with its torsion-free finite-index kernel.
#[derive(Clone, Debug)]
pub struct FiniteIndexData {
    pub generators: Vec<GroupElement>,
    pub cosets: CosetTable,
    /// Schreier generators of the kernel as words over the generators.
    pub schreier: Vec<Word>,
    /// The kernel, whose original generators are the Schreier elements.
    pub subgroup: ReducedGroup,
    pub stats: ReducerStats,
}

impl FiniteIndexData {
    pub fn prime(&self) -> &PrimeIdealData {
        self.cosets.prime()
    }

    pub fn index(&self) -> usize {
        self.cosets.index()
    }

    /// Reduced generators of the kernel as words over the generators.
    pub fn kernel_words(&self) -> Result<Vec<Word>> {
        self.subgroup
            .entries()
            .iter()
            .map(|e| e.word.substitute(&self.schreier))
            .collect()
    }
}

/// Outcome of [`recognize`].
#[derive(Clone, Debug)]
pub enum FullCertificate {
    Discrete(Box<FiniteIndexData>),
    /// The witness refers to words over the generators.
    Indiscrete(Certificate),
}

impl FullCertificate {
    pub fn is_discrete(&self) -> bool {
        matches!(self, FullCertificate::Discrete(_))
    }
}

fn translate(
    cert: Certificate,
    schreier: &[Word],
    original: &[ProjectiveElement],
) -> Result<Certificate> {
    Ok(match cert {
        Certificate::EllipticWitness {
            word,
            elem,
            finite_order,
        } => Certificate::EllipticWitness {
            word: word.substitute(schreier)?,
            elem,
            finite_order,
        },
        Certificate::IndiscretePair {
            words,
            elems,
            reason,
        } => Certificate::IndiscretePair {
            words: [
                words[0].substitute(schreier)?,
                words[1].substitute(schreier)?,
            ],
            elems,
            reason,
        },
        Certificate::DiscreteTorsionFree { reduced, .. } => Certificate::DiscreteTorsionFree {
            reduced,
            original: original.to_vec(),
        },
    })
}

/// Decides discreteness of `⟨gens⟩`, torsion allowed.
pub fn recognize(gens: &[GroupElement], config: &FiniteIndexConfig) -> Result<FullCertificate> {
    let spec = gens
        .first()
        .map(|g| g.spec())
        .unwrap_or(FieldSpec::RATIONALS);
    let prime = select_torsion_free_prime(spec, gens, config.prime_start)?;
    let cosets = coset_enumeration(gens, &prime, config.level, config.coset_cap)?;
    let schreier = schreier_generators(gens, &cosets)?;
    let lifts: Vec<GroupElement> = schreier
        .iter()
        .map(|w| w.evaluate_sl2(gens, spec))
        .collect::<Result<_>>()?;
    let kernel: Vec<ProjectiveElement> = lifts.iter().map(|g| g.normalize()).collect();
    let mut reducer = Reducer::new(config.reducer.clone());
    let cert = reducer.run(&kernel)?;
    if !cert.is_discrete_torsion_free() {
        if matches!(
            cert,
            Certificate::EllipticWitness {
                finite_order: Some(_),
                ..
            }
        ) {
            return Err(Error::Verification(
                "torsion found in a kernel that should be torsion-free".into(),
            ));
        }
        let originals: Vec<ProjectiveElement> = gens.iter().map(|g| g.normalize()).collect();
        return Ok(FullCertificate::Indiscrete(translate(
            cert, &schreier, &originals,
        )?));
    }
    let subgroup = ReducedGroup::from_certificate_sl2(spec, &cert, &lifts)?;
    Ok(FullCertificate::Discrete(Box::new(FiniteIndexData {
        generators: gens.to_vec(),
        cosets,
        schreier,
        subgroup,
        stats: reducer.stats,
    })))
}

/// Membership in a group recognized by [`recognize`]; the returned word is
/// over the generators.
pub fn is_member(data: &FiniteIndexData, q: &GroupElement, mode: Mode) -> Result<MembershipAnswer> {
    let spec = data.subgroup.spec();
    if q.spec() != spec {
        return Err(Error::FieldMismatch(spec.d(), q.spec().d()));
    }
    let candidates: Vec<GroupElement> = match (data.cosets.level(), mode) {
        (Level::Linear, Mode::Psl2) => vec![q.clone(), q.negate()],
        _ => vec![q.clone()],
    };
    for cand in candidates {
        let image = match reduce_mod(&cand, data.prime(), data.cosets.level()) {
            Ok(m) => m,
            Err(Error::NotIntegral(_)) => return Ok(MembershipAnswer::NonMember),
            Err(e) => return Err(e),
        };
        let Some(k) = data.cosets.find(&image) else {
            continue;
        };
        let s_word = &data.cosets.reps()[k].0;
        let s = s_word.evaluate_sl2(&data.generators, spec)?;
        let residual = &s.inverse() * &cand;
        if let MembershipAnswer::Member { word, .. } = data.subgroup.is_member(&residual, mode)? {
            let full = s_word.concat_reduce(&word.substitute(&data.schreier)?);
            let value = full.evaluate_sl2(&data.generators, spec)?;
            let sl2_sign = if value == *q { 1 } else { -1 };
            return Ok(MembershipAnswer::Member {
                word: full,
                sl2_sign,
            });
        }
    }
    Ok(MembershipAnswer::NonMember)
}
