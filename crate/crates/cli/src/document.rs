//! JSON input and certificate documents.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use hypdisc::finiteindex::{
    reduce_mod, select_torsion_free_prime, FullCertificate, Level, PrimeIdealData,
};
use hypdisc::membership::{MembershipAnswer, Mode};
use hypdisc::reduction::{Certificate, GeneratorEntry, IndiscreteReason, ReducerStats};
use hypdisc::{Error, FieldSpec, GroupElement, ProjectiveElement, Result, Word};

/// `[[a, b], [c, d]]` with entries in the field grammar.
pub type Matrix = [[String; 2]; 2];

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    /// The squarefree `d` of ℚ(√d); 1 for ℚ.
    #[serde(default = "one")]
    pub field: u64,
    pub generators: Vec<Matrix>,
    #[serde(default)]
    pub query: Option<Matrix>,
    /// `"sl2"` or `"psl2"`.
    #[serde(default)]
    pub mode: Option<String>,
    #[serde(default)]
    pub torsion_free: Option<bool>,
}

fn one() -> u64 {
    1
}

pub fn parse_matrix(spec: FieldSpec, m: &Matrix) -> Result<GroupElement> {
    let e = |s: &String| spec.parse(s);
    GroupElement::new(e(&m[0][0])?, e(&m[0][1])?, e(&m[1][0])?, e(&m[1][1])?)
}

pub fn show_matrix(g: &GroupElement) -> Matrix {
    [
        [g.a().to_string(), g.b().to_string()],
        [g.c().to_string(), g.d().to_string()],
    ]
}

pub fn parse_mode(text: &str) -> Result<Mode> {
    match text {
        "sl2" => Ok(Mode::Sl2),
        "psl2" => Ok(Mode::Psl2),
        other => Err(Error::Precondition(format!("unknown mode {other:?}"))),
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
pub struct ReducedGenerator {
    pub word: Vec<i64>,
    pub matrix: Matrix,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq, Eq)]
pub struct Witness {
    /// `elliptic`, `collar` or `abelian`.
    pub kind: String,
    pub words: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounded: Option<bool>,
}

/// Every document carries its generators so that it can be re-checked on
/// its own.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct CertificateDocument {
    pub status: String,
    pub field: u64,
    pub generators: Vec<Matrix>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reduced: Vec<ReducedGenerator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sl2_sign: Option<i8>,
    #[serde(default)]
    pub diagnostics: Map<String, Value>,
}

pub const DISCRETE_TORSION_FREE: &str = "discrete-torsion-free";
pub const DISCRETE: &str = "discrete";
pub const INDISCRETE: &str = "indiscrete";
/// Torsion-free mode only: a finite-order elliptic element was found.
pub const TORSION: &str = "torsion";
pub const MEMBER: &str = "member";
pub const NON_MEMBER: &str = "non-member";

fn stats_map(stats: &ReducerStats) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("iterations".into(), stats.iterations.into());
    m.insert("replacements".into(), stats.replacements.into());
    m.insert("removals".into(), stats.removals.into());
    m.insert("merges".into(), stats.merges.into());
    m.insert("words_considered".into(), stats.words_considered.into());
    m
}

fn level_name(level: Level) -> &'static str {
    match level {
        Level::Projective => "projective",
        Level::Linear => "linear",
    }
}

pub fn parse_level(text: &str) -> Result<Level> {
    match text {
        "projective" => Ok(Level::Projective),
        "linear" => Ok(Level::Linear),
        other => Err(Error::Precondition(format!("unknown level {other:?}"))),
    }
}

impl CertificateDocument {
    fn base(status: &str, spec: FieldSpec, gens: &[GroupElement]) -> Self {
        CertificateDocument {
            status: status.into(),
            field: spec.d(),
            generators: gens.iter().map(show_matrix).collect(),
            reduced: Vec::new(),
            witness: None,
            query: None,
            mode: None,
            word: None,
            sl2_sign: None,
            diagnostics: Map::new(),
        }
    }

    fn witness_of(cert: &Certificate) -> Option<Witness> {
        match cert {
            Certificate::DiscreteTorsionFree { .. } => None,
            Certificate::EllipticWitness {
                word, finite_order, ..
            } => Some(Witness {
                kind: "elliptic".into(),
                words: vec![word.to_signed()],
                order: *finite_order,
                bounded: None,
            }),
            Certificate::IndiscretePair { words, reason, .. } => {
                let (kind, bounded) = match reason {
                    IndiscreteReason::CollarViolation => ("collar", None),
                    IndiscreteReason::AbelianIncommensurable { bounded } => {
                        ("abelian", Some(*bounded))
                    }
                };
                Some(Witness {
                    kind: kind.into(),
                    words: words.iter().map(|w| w.to_signed()).collect(),
                    order: None,
                    bounded,
                })
            }
        }
    }

    /// Result of torsion-free recognition.
    pub fn from_torsion_free(
        spec: FieldSpec,
        gens: &[GroupElement],
        cert: &Certificate,
        stats: &ReducerStats,
    ) -> Self {
        let status = match cert {
            Certificate::DiscreteTorsionFree { .. } => DISCRETE_TORSION_FREE,
            Certificate::EllipticWitness {
                finite_order: Some(_),
                ..
            } => TORSION,
            _ => INDISCRETE,
        };
        let mut doc = Self::base(status, spec, gens);
        if let Some(reduced) = cert.reduced() {
            doc.reduced = reduced
                .iter()
                .map(|e| ReducedGenerator {
                    word: e.word.to_signed(),
                    matrix: show_matrix(e.elem.rep()),
                })
                .collect();
        }
        doc.witness = Self::witness_of(cert);
        doc.diagnostics = stats_map(stats);
        doc
    }

    /// Result of full recognition.
    pub fn from_full(
        spec: FieldSpec,
        gens: &[GroupElement],
        cert: &FullCertificate,
    ) -> Result<Self> {
        Ok(match cert {
            FullCertificate::Discrete(data) => {
                let mut doc = Self::base(DISCRETE, spec, gens);
                let words = data.kernel_words()?;
                doc.reduced = words
                    .iter()
                    .zip(data.subgroup.entries())
                    .map(|(w, e)| ReducedGenerator {
                        word: w.to_signed(),
                        matrix: show_matrix(e.elem.rep()),
                    })
                    .collect();
                let mut diag = stats_map(&data.stats);
                let prime = data.prime();
                diag.insert("prime".into(), prime.p.into());
                diag.insert("residue_degree".into(), prime.residue_degree.into());
                diag.insert("level".into(), level_name(data.cosets.level()).into());
                diag.insert("index".into(), data.index().into());
                diag.insert("schreier_generators".into(), data.schreier.len().into());
                diag.insert("kernel_rank".into(), data.subgroup.rank().into());
                doc.diagnostics = diag;
                doc
            }
            FullCertificate::Indiscrete(c) => {
                let mut doc = Self::base(INDISCRETE, spec, gens);
                doc.witness = Self::witness_of(c);
                doc
            }
        })
    }

    pub fn from_membership(
        spec: FieldSpec,
        gens: &[GroupElement],
        query: &GroupElement,
        mode: Mode,
        answer: &MembershipAnswer,
    ) -> Self {
        let status = if answer.is_member() {
            MEMBER
        } else {
            NON_MEMBER
        };
        let mut doc = Self::base(status, spec, gens);
        doc.query = Some(show_matrix(query));
        doc.mode = Some(match mode {
            Mode::Sl2 => "sl2".into(),
            Mode::Psl2 => "psl2".into(),
        });
        if let MembershipAnswer::Member { word, sl2_sign } = answer {
            doc.word = Some(word.to_signed());
            doc.sl2_sign = Some(*sl2_sign);
        }
        doc
    }

    pub fn spec(&self) -> Result<FieldSpec> {
        FieldSpec::new(self.field)
    }

    pub fn generators(&self) -> Result<Vec<GroupElement>> {
        let spec = self.spec()?;
        self.generators
            .iter()
            .map(|m| parse_matrix(spec, m))
            .collect()
    }

    fn witness_certificate(&self, original: &[ProjectiveElement]) -> Result<Certificate> {
        let spec = self.spec()?;
        let w = self
            .witness
            .as_ref()
            .ok_or_else(|| Error::Verification("missing witness".into()))?;
        let words: Vec<Word> = w
            .words
            .iter()
            .map(|c| Word::from_signed(c))
            .collect::<Result<_>>()?;
        let elems: Vec<ProjectiveElement> = words
            .iter()
            .map(|x| x.evaluate(original, spec))
            .collect::<Result<_>>()?;
        match (w.kind.as_str(), words.len()) {
            ("elliptic", 1) => Ok(Certificate::EllipticWitness {
                word: words[0].clone(),
                elem: elems[0].clone(),
                finite_order: w.order,
            }),
            ("collar", 2) | ("abelian", 2) => Ok(Certificate::IndiscretePair {
                words: [words[0].clone(), words[1].clone()],
                elems: [elems[0].clone(), elems[1].clone()],
                reason: if w.kind == "collar" {
                    IndiscreteReason::CollarViolation
                } else {
                    IndiscreteReason::AbelianIncommensurable {
                        bounded: w.bounded.unwrap_or(false),
                    }
                },
            }),
            _ => Err(Error::Verification(format!(
                "malformed witness of kind {:?}",
                w.kind
            ))),
        }
    }

    fn reduced_certificate(&self, original: &[ProjectiveElement]) -> Result<Certificate> {
        let spec = self.spec()?;
        let mut reduced = Vec::with_capacity(self.reduced.len());
        for r in &self.reduced {
            let word = Word::from_signed(&r.word)?;
            let elem = word.evaluate(original, spec)?;
            if parse_matrix(spec, &r.matrix)?.normalize() != elem {
                return Err(Error::Verification(format!(
                    "matrix of {word} does not match its word"
                )));
            }
            reduced.push(GeneratorEntry::new(elem, word));
        }
        Ok(Certificate::DiscreteTorsionFree {
            reduced,
            original: original.to_vec(),
        })
    }

    fn diagnostic_u64(&self, key: &str) -> Result<u64> {
        self.diagnostics
            .get(key)
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Verification(format!("missing diagnostic {key:?}")))
    }

    /// Re-checks every claim that can be checked from the document alone.
    /// Non-membership is re-decided by `recheck_non_member`.
    pub fn verify(&self) -> Result<()> {
        let spec = self.spec()?;
        let gens = self.generators()?;
        let original: Vec<ProjectiveElement> = gens.iter().map(|g| g.normalize()).collect();
        match self.status.as_str() {
            DISCRETE_TORSION_FREE => self.reduced_certificate(&original)?.verify(&original),
            DISCRETE => {
                self.reduced_certificate(&original)?.verify(&original)?;
                let p = self.diagnostic_u64("prime")?;
                let level = match self.diagnostics.get("level").and_then(Value::as_str) {
                    Some(l) => parse_level(l)?,
                    None => Level::Projective,
                };
                let prime = PrimeIdealData::new(spec, p)
                    .ok_or_else(|| Error::Verification(format!("{p} is not a usable prime")))?;
                if select_torsion_free_prime(spec, &gens, p)?.p != p {
                    return Err(Error::Verification(format!("prime {p} is not admissible")));
                }
                for r in &self.reduced {
                    let lift = Word::from_signed(&r.word)?.evaluate_sl2(&gens, spec)?;
                    if !reduce_mod(&lift, &prime, level)?.is_identity(&prime, level) {
                        return Err(Error::Verification(
                            "kernel generator is not trivial modulo the prime".into(),
                        ));
                    }
                }
                Ok(())
            }
            INDISCRETE | TORSION => {
                let cert = self.witness_certificate(&original)?;
                cert.verify(&original)?;
                let finite = matches!(
                    cert,
                    Certificate::EllipticWitness {
                        finite_order: Some(_),
                        ..
                    }
                );
                if finite != (self.status == TORSION) {
                    return Err(Error::Verification(
                        "witness order does not match the status".into(),
                    ));
                }
                Ok(())
            }
            MEMBER => {
                let q = parse_matrix(
                    spec,
                    self.query
                        .as_ref()
                        .ok_or_else(|| Error::Verification("missing query".into()))?,
                )?;
                let word = Word::from_signed(
                    self.word
                        .as_ref()
                        .ok_or_else(|| Error::Verification("missing word".into()))?,
                )?;
                let value = word.evaluate_sl2(&gens, spec)?;
                let sign = self.sl2_sign.unwrap_or(1);
                let expected = if sign < 0 { q.negate() } else { q.clone() };
                if value != expected {
                    return Err(Error::Verification(format!(
                        "word {word} does not evaluate to the query"
                    )));
                }
                if self.mode.as_deref() == Some("sl2") && sign != 1 {
                    return Err(Error::Verification("SL2 answer with sign -1".into()));
                }
                Ok(())
            }
            NON_MEMBER => Ok(()),
            other => Err(Error::Verification(format!("unknown status {other:?}"))),
        }
    }
}
