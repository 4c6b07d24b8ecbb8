//! Random generating sets and a timing harness.

use std::fmt;
use std::io::{self, Write};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::membership::{Mode, ReducedGroup};
use crate::moebius::{GroupElement, Letter, ProjectiveElement, Word};
use crate::numberfield::{rational, FieldElement, FieldSpec};
use crate::reduction::{Certificate, Reducer, ReducerConfig};

/// Bounds on the rational parts of random triangular entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EntryDistribution {
    pub max_numerator: i64,
    pub max_denominator: i64,
}

impl Default for EntryDistribution {
    fn default() -> Self {
        EntryDistribution {
            max_numerator: 8,
            max_denominator: 8,
        }
    }
}

impl EntryDistribution {
    /// Integer parts in `{−1, 0, 1}`. Roughly half of the `(5, 15)` sets
    /// are then discrete and torsion-free.
    pub const UNIT: EntryDistribution = EntryDistribution {
        max_numerator: 1,
        max_denominator: 1,
    };

    pub fn new(max_numerator: i64, max_denominator: i64) -> Result<Self> {
        if max_numerator < 1 || max_denominator < 1 {
            return Err(Error::Precondition(format!(
                "entry bounds must be positive, got {max_numerator}/{max_denominator}"
            )));
        }
        Ok(EntryDistribution {
            max_numerator,
            max_denominator,
        })
    }
}

/// One random instance: `n` generators, each a product of `d` unipotent
/// triangular factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialParams {
    pub n: usize,
    pub d: usize,
    pub field: FieldSpec,
    pub seed: u64,
    pub entries: EntryDistribution,
}

impl TrialParams {
    pub fn new(n: usize, d: usize, field: FieldSpec, seed: u64) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::Precondition(format!(
                "need n, d ≥ 1, got n = {n}, d = {d}"
            )));
        }
        Ok(TrialParams {
            n,
            d,
            field,
            seed,
            entries: EntryDistribution::default(),
        })
    }
}

fn random_part<R: Rng>(rng: &mut R, dist: EntryDistribution) -> num_rational::BigRational {
    rational(
        rng.gen_range(-dist.max_numerator..=dist.max_numerator),
        rng.gen_range(1..=dist.max_denominator),
    )
}

fn random_entry<R: Rng>(rng: &mut R, spec: FieldSpec, dist: EntryDistribution) -> FieldElement {
    loop {
        let a = random_part(rng, dist);
        let b = if spec.is_rational() {
            rational(0, 1)
        } else {
            random_part(rng, dist)
        };
        let x = spec.element(a, b);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Deterministic for a given seed.
pub fn random_generating_set(params: &TrialParams) -> Vec<GroupElement> {
    let spec = params.field;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    (0..params.n)
        .map(|_| {
            let mut g = GroupElement::identity(spec);
            for _ in 0..params.d {
                let x = random_entry(&mut rng, spec, params.entries);
                let factor = if rng.gen_bool(0.5) {
                    GroupElement::new(spec.one(), x, spec.zero(), spec.one())
                } else {
                    GroupElement::new(spec.one(), spec.zero(), x, spec.one())
                };
                g = &g * &factor.expect("unipotent");
            }
            g
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Outcome {
    DiscreteTorsionFree,
    Elliptic,
    Indiscrete,
    /// The iteration cap was reached.
    Cap,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::DiscreteTorsionFree => "discrete-torsion-free",
            Outcome::Elliptic => "elliptic",
            Outcome::Indiscrete => "indiscrete",
            Outcome::Cap => "cap",
        })
    }
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialRow {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub outcome: Outcome,
    pub millis: u128,
    pub words_considered: u64,
}

pub const CSV_HEADER: &str = "n,d,seed,outcome,millis,words_considered";

impl TrialRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n, self.d, self.seed, self.outcome, self.millis, self.words_considered
        )
    }
}

/// Recognizes one random set and re-checks the certificate.
pub fn run_trial(
    params: &TrialParams,
    config: &ReducerConfig,
) -> Result<(TrialRow, Option<Certificate>)> {
    let gens: Vec<ProjectiveElement> = random_generating_set(params)
        .iter()
        .map(|g| g.normalize())
        .collect();
    let mut reducer = Reducer::new(config.clone());
    let start = Instant::now();
    let result = reducer.run(&gens);
    let millis = start.elapsed().as_millis();
    let (outcome, cert) = match result {
        Ok(cert) => {
            cert.verify(&gens)?;
            let outcome = match &cert {
                Certificate::DiscreteTorsionFree { .. } => Outcome::DiscreteTorsionFree,
                Certificate::EllipticWitness { .. } => Outcome::Elliptic,
                Certificate::IndiscretePair { .. } => Outcome::Indiscrete,
            };
            (outcome, Some(cert))
        }
        Err(Error::IterationCap(_)) => (Outcome::Cap, None),
        Err(e) => return Err(e),
    };
    let row = TrialRow {
        n: params.n,
        d: params.d,
        seed: params.seed,
        outcome,
        millis,
        words_considered: reducer.stats.words_considered,
    };
    Ok((row, cert))
}

/// Field, seeds and entry distribution shared by every cell of a table.
#[derive(Clone, Debug)]
pub struct TableConfig {
    pub field: FieldSpec,
    pub trials: u64,
    pub first_seed: u64,
    pub entries: EntryDistribution,
    pub reducer: ReducerConfig,
}

impl TableConfig {
    pub fn new(field: FieldSpec, trials: u64, first_seed: u64) -> Self {
        TableConfig {
            field,
            trials,
            first_seed,
            entries: EntryDistribution::default(),
            reducer: ReducerConfig::default(),
        }
    }

    fn params(&self, n: usize, d: usize, k: u64) -> Result<TrialParams> {
        Ok(TrialParams {
            entries: self.entries,
            ..TrialParams::new(n, d, self.field, self.first_seed + k)?
        })
    }
}

/// `config.trials` seeds for every `(n, d)` in `grid`.
pub fn run_table(grid: &[(usize, usize)], config: &TableConfig) -> Result<Vec<TrialRow>> {
    let mut rows = Vec::new();
    for &(n, d) in grid {
        for k in 0..config.trials {
            rows.push(run_trial(&config.params(n, d, k)?, &config.reducer)?.0);
        }
    }
    Ok(rows)
}

/// Writes rows, preceded by the header when `header` is set.
pub fn write_csv<W: Write>(out: &mut W, rows: &[TrialRow], header: bool) -> io::Result<()> {
    if header {
        writeln!(out, "{CSV_HEADER}")?;
    }
    for r in rows {
        writeln!(out, "{}", r.to_csv())?;
    }
    Ok(())
}

/// Mean and maximum time per outcome-independent `(n, d)` cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSummary {
    pub n: usize,
    pub d: usize,
    pub trials: usize,
    pub discrete: usize,
    pub elliptic: usize,
    pub indiscrete: usize,
    pub capped: usize,
    pub mean_millis: f64,
    pub max_millis: u128,
}

pub fn summarize(rows: &[TrialRow]) -> Vec<CellSummary> {
    let mut cells: Vec<CellSummary> = Vec::new();
    for r in rows {
        let idx = match cells.iter().position(|c| c.n == r.n && c.d == r.d) {
            Some(i) => i,
            None => {
                cells.push(CellSummary {
                    n: r.n,
                    d: r.d,
                    trials: 0,
                    discrete: 0,
                    elliptic: 0,
                    indiscrete: 0,
                    capped: 0,
                    mean_millis: 0.0,
                    max_millis: 0,
                });
                cells.len() - 1
            }
        };
        let c = &mut cells[idx];
        c.mean_millis = (c.mean_millis * c.trials as f64 + r.millis as f64) / (c.trials + 1) as f64;
        c.trials += 1;
        c.max_millis = c.max_millis.max(r.millis);
        match r.outcome {
            Outcome::DiscreteTorsionFree => c.discrete += 1,
            Outcome::Elliptic => c.elliptic += 1,
            Outcome::Indiscrete => c.indiscrete += 1,
            Outcome::Cap => c.capped += 1,
        }
    }
    cells
}

/// Word lengths of the membership timing mode.
pub const MEMBERSHIP_LENGTHS: [usize; 4] = [5, 10, 20, 40];

/// `(n, d)` cells of the recognition timing table.
pub const RECOGNITION_GRID: [(usize, usize); 4] = [(2, 7), (5, 15), (10, 20), (20, 27)];

pub const MEMBERSHIP_CSV_HEADER: &str = "n,d,seed,m,millis,word_len";

/// Time to recover a random word of length `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipRow {
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub m: usize,
    pub millis: u128,
    pub steps_word_len: usize,
}

impl MembershipRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n, self.d, self.seed, self.m, self.millis, self.steps_word_len
        )
    }
}

/// A random freely reduced word of length `m` in `rank` letters.
pub fn random_word<R: Rng>(rng: &mut R, rank: usize, m: usize) -> Word {
    let mut letters: Vec<Letter> = Vec::with_capacity(m);
    let all: Vec<Letter> = (0..rank)
        .flat_map(|i| [Letter::new(i, 1), Letter::new(i, -1)])
        .collect();
    while letters.len() < m {
        let l = *all.choose(rng).expect("rank ≥ 1");
        if letters.last() != Some(&l.inverse()) {
            letters.push(l);
        }
    }
    Word::new(letters)
}

/// For each discrete torsion-free trial, queries random words of every
/// length in `lengths` and checks that the answer evaluates correctly.
pub fn run_membership_table(
    n: usize,
    d: usize,
    lengths: &[usize],
    config: &TableConfig,
) -> Result<Vec<MembershipRow>> {
    let field = config.field;
    let mut rows = Vec::new();
    for k in 0..config.trials {
        let params = config.params(n, d, k)?;
        let gens = random_generating_set(&params);
        let (_, Some(cert @ Certificate::DiscreteTorsionFree { .. })) =
            run_trial(&params, &config.reducer)?
        else {
            continue;
        };
        let group = ReducedGroup::from_certificate_sl2(field, &cert, &gens)?;
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed ^ 0x9e37_79b9);
        for &m in lengths {
            let w = random_word(&mut rng, n, m);
            let q = w.evaluate_sl2(&gens, field)?;
            let start = Instant::now();
            let answer = group.is_member(&q, Mode::Psl2)?;
            let millis = start.elapsed().as_millis();
            let Some(found) = answer.word() else {
                return Err(Error::Verification(format!(
                    "word {w} not recognized as a member"
                )));
            };
            if found.evaluate(group.original(), field)? != q.normalize() {
                return Err(Error::Verification(format!(
                    "returned word {found} does not evaluate to the query"
                )));
            }
            rows.push(MembershipRow {
                n,
                d,
                seed: params.seed,
                m,
                millis,
                steps_word_len: found.len(),
            });
        }
    }
    Ok(rows)
}
