mod document;

use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use hypdisc::bench::{self, EntryDistribution, TableConfig, TrialParams};
use hypdisc::domain::{
    cayley_ball, dirichlet_sides, emit_cayley_svg, emit_svg, full_group_domain, peripheral_classes,
    DomainDescription, FullDomainConfig, SvgStyle,
};
use hypdisc::finiteindex::{self, FiniteIndexConfig, FullCertificate};
use hypdisc::hyperbolic::Point;
use hypdisc::membership::{Mode, ReducedGroup};
use hypdisc::reduction::{Certificate, Reducer, ReducerConfig};
use hypdisc::{Error, FieldSpec, GroupElement, ProjectiveElement};

use document::{parse_level, parse_matrix, parse_mode, CertificateDocument, InputDocument};

/// Exit status contract.
const EXIT_POSITIVE: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_VERIFICATION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "hypdisc",
    version,
    about = "Exact discreteness, membership and fundamental domains for Fuchsian groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
struct RecognitionArgs {
    /// Assume the group is torsion-free and run the reduction directly.
    #[arg(long)]
    torsion_free: bool,
    /// Iteration cap of the reduction loop.
    #[arg(long, env = "HYPDISC_MAX_ITERS", default_value_t = 200_000)]
    max_iters: u64,
    /// Smallest prime tried for the torsion-free kernel.
    #[arg(long, default_value_t = 3)]
    prime_start: u64,
    /// `projective` or `linear` congruence kernel.
    #[arg(long, default_value = "projective")]
    level: String,
    /// Re-check the emitted document before printing it.
    #[arg(long)]
    verify: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Decide discreteness and print a certificate document.
    Recognize {
        file: PathBuf,
        #[command(flatten)]
        rec: RecognitionArgs,
    },
    /// Decide whether the query matrix lies in the group.
    Member {
        file: PathBuf,
        #[command(flatten)]
        rec: RecognitionArgs,
        #[arg(long, conflicts_with = "psl2")]
        sl2: bool,
        #[arg(long)]
        psl2: bool,
    },
    /// Print the sides of a Dirichlet domain centered at i.
    Domain {
        file: PathBuf,
        #[command(flatten)]
        rec: RecognitionArgs,
        #[command(flatten)]
        dom: DomainArgs,
        /// Also write the domain as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Genus and peripheral class counts of a torsion-free group.
    Signature {
        file: PathBuf,
        #[arg(long, env = "HYPDISC_MAX_ITERS", default_value_t = 200_000)]
        max_iters: u64,
    },
    /// Draw the domain, or a Cayley ball with `--cayley`, in the Poincaré disk.
    Plot {
        file: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        /// Radius of the Cayley ball of the input generators.
        #[arg(long)]
        cayley: Option<usize>,
        #[command(flatten)]
        rec: RecognitionArgs,
        #[command(flatten)]
        dom: DomainArgs,
    },
    /// Time random recognitions and append CSV rows.
    Bench(BenchArgs),
    /// Re-check an emitted certificate document.
    Verify { file: PathBuf },
}

#[derive(Args, Clone, Debug)]
struct DomainArgs {
    /// Word-ball radius checked by the domain audit.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Seed of the sampling audit.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Clone, Debug)]
struct BenchArgs {
    /// Generating-set sizes; paired with `--d`. Defaults to the standard grid.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Triangular factor counts.
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    /// `d` of ℚ(√d).
    #[arg(long, default_value_t = 3)]
    field: u64,
    #[arg(long, default_value_t = 10)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "HYPDISC_MAX_ITERS", default_value_t = 200_000)]
    max_iters: u64,
    /// Bound on the numerators of random triangular entries.
    #[arg(long, default_value_t = 8)]
    max_numerator: i64,
    /// Bound on the denominators of random triangular entries.
    #[arg(long, default_value_t = 8)]
    max_denominator: i64,
    /// Time membership of random words instead of recognition.
    #[arg(long)]
    membership: bool,
    /// CSV file to append to; stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Either an error or a finished command with its exit status.
type Outcome = Result<u8, Failure>;

#[derive(Debug)]
enum Failure {
    Input(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => EXIT_INVALID,
            Failure::Core(
                Error::IterationCap(_) | Error::CosetCap(_) | Error::NoAdmissiblePrime(_),
            ) => EXIT_CAP,
            Failure::Core(Error::Verification(_)) => EXIT_VERIFICATION,
            Failure::Core(_) => EXIT_INVALID,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(m) => f.write_str(m),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Parsed input with entry-level error locations.
struct Input {
    doc: InputDocument,
    spec: FieldSpec,
    gens: Vec<GroupElement>,
}

fn load(path: &Path) -> Result<Input, Failure> {
    let doc: InputDocument = read_json(path)?;
    let spec = FieldSpec::new(doc.field)?;
    let gens = doc
        .generators
        .iter()
        .enumerate()
        .map(|(k, m)| parse_matrix(spec, m).map_err(|e| locate(&format!("generators[{k}]"), e)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Input { doc, spec, gens })
}

fn locate(at: &str, e: Error) -> Failure {
    match e {
        Error::Parse { .. } | Error::Determinant(_) => Failure::Input(format!("{at}: {e}")),
        other => Failure::Core(other),
    }
}

fn reducer_config(rec: &RecognitionArgs) -> ReducerConfig {
    ReducerConfig {
        max_iters: rec.max_iters,
        ..ReducerConfig::default()
    }
}

fn full_config(rec: &RecognitionArgs) -> Result<FiniteIndexConfig, Failure> {
    Ok(FiniteIndexConfig {
        prime_start: rec.prime_start,
        level: parse_level(&rec.level)?,
        reducer: reducer_config(rec),
        ..FiniteIndexConfig::default()
    })
}

fn torsion_free(rec: &RecognitionArgs, input: &Input) -> bool {
    rec.torsion_free || input.doc.torsion_free.unwrap_or(false)
}

fn projective(gens: &[GroupElement]) -> Vec<ProjectiveElement> {
    gens.iter().map(|g| g.normalize()).collect()
}

fn run_reducer(input: &Input, config: ReducerConfig) -> Result<(Certificate, Reducer), Failure> {
    let mut reducer = Reducer::new(config);
    let cert = reducer.run(&projective(&input.gens))?;
    Ok((cert, reducer))
}

/// Writes a line to stdout; a closed pipe is not an error.
fn print_out(text: &str) {
    let mut out = io::stdout().lock();
    if let Err(e) = writeln!(out, "{text}") {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
        }
    }
}

fn emit(doc: &CertificateDocument, verify: bool) -> Result<(), Failure> {
    if verify {
        doc.verify()?;
    }
    print_out(&serde_json::to_string_pretty(doc).expect("documents serialize"));
    Ok(())
}

fn positive_if(ok: bool) -> u8 {
    if ok {
        EXIT_POSITIVE
    } else {
        EXIT_NEGATIVE
    }
}

fn cmd_recognize(file: &Path, rec: &RecognitionArgs) -> Outcome {
    let input = load(file)?;
    if torsion_free(rec, &input) {
        let (cert, reducer) = run_reducer(&input, reducer_config(rec))?;
        let doc =
            CertificateDocument::from_torsion_free(input.spec, &input.gens, &cert, &reducer.stats);
        emit(&doc, rec.verify)?;
        return Ok(positive_if(cert.is_discrete_torsion_free()));
    }
    let cert = finiteindex::recognize(&input.gens, &full_config(rec)?)?;
    let doc = CertificateDocument::from_full(input.spec, &input.gens, &cert)?;
    emit(&doc, rec.verify)?;
    Ok(positive_if(cert.is_discrete()))
}

/// A discrete group ready for queries, or the document explaining why not.
enum Recognized {
    TorsionFree(ReducedGroup),
    Full(Box<finiteindex::FiniteIndexData>),
    Rejected(CertificateDocument),
}

fn recognized(input: &Input, rec: &RecognitionArgs) -> Result<Recognized, Failure> {
    if torsion_free(rec, input) {
        let (cert, reducer) = run_reducer(input, reducer_config(rec))?;
        if !cert.is_discrete_torsion_free() {
            let doc = CertificateDocument::from_torsion_free(
                input.spec,
                &input.gens,
                &cert,
                &reducer.stats,
            );
            return Ok(Recognized::Rejected(doc));
        }
        return Ok(Recognized::TorsionFree(ReducedGroup::from_certificate_sl2(
            input.spec,
            &cert,
            &input.gens,
        )?));
    }
    match finiteindex::recognize(&input.gens, &full_config(rec)?)? {
        FullCertificate::Discrete(data) => Ok(Recognized::Full(data)),
        cert => Ok(Recognized::Rejected(CertificateDocument::from_full(
            input.spec,
            &input.gens,
            &cert,
        )?)),
    }
}

fn not_discrete(doc: &CertificateDocument) -> Failure {
    eprintln!(
        "{}",
        serde_json::to_string_pretty(doc).expect("documents serialize")
    );
    Failure::Core(Error::Precondition(format!(
        "the generators are not accepted ({})",
        doc.status
    )))
}

fn cmd_member(file: &Path, rec: &RecognitionArgs, sl2: bool, psl2: bool) -> Outcome {
    let input = load(file)?;
    let query = input
        .doc
        .query
        .as_ref()
        .ok_or_else(|| Failure::Input("the input has no query".into()))?;
    let q = parse_matrix(input.spec, query).map_err(|e| locate("query", e))?;
    let mode = match (sl2, psl2, input.doc.mode.as_deref()) {
        (true, _, _) => Mode::Sl2,
        (_, true, _) => Mode::Psl2,
        (_, _, Some(m)) => parse_mode(m)?,
        _ => Mode::Psl2,
    };
    let answer = match recognized(&input, rec)? {
        Recognized::TorsionFree(group) => group.is_member(&q, mode)?,
        Recognized::Full(data) => finiteindex::is_member(&data, &q, mode)?,
        Recognized::Rejected(doc) => return Err(not_discrete(&doc)),
    };
    let doc = CertificateDocument::from_membership(input.spec, &input.gens, &q, mode, &answer);
    emit(&doc, rec.verify)?;
    Ok(positive_if(answer.is_member()))
}

fn build_domain(
    input: &Input,
    rec: &RecognitionArgs,
    dom: &DomainArgs,
) -> Result<DomainDescription, Failure> {
    match recognized(input, rec)? {
        Recognized::TorsionFree(group) => Ok(dirichlet_sides(&group, &Point::i(input.spec))?),
        Recognized::Full(data) => {
            let config = FullDomainConfig {
                depth: dom.depth,
                seed: dom.seed,
                ..FullDomainConfig::default()
            };
            Ok(full_group_domain(&data, &config)?)
        }
        Recognized::Rejected(doc) => Err(not_discrete(&doc)),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn cmd_domain(file: &Path, rec: &RecognitionArgs, dom: &DomainArgs, svg: Option<&Path>) -> Outcome {
    let input = load(file)?;
    let d = build_domain(&input, rec, dom)?;
    let mut out = d.to_json();
    let obj = out.as_object_mut().expect("domain JSON is an object");
    obj.insert("free_boundary".into(), d.free_boundary.into());
    obj.insert("area".into(), d.area().map_or(Value::Null, Value::from));
    obj.insert(
        "verified_depth".into(),
        d.verified_depth.map_or(Value::Null, Value::from),
    );
    print_out(&serde_json::to_string_pretty(&out).expect("domain JSON serializes"));
    if let Some(path) = svg {
        write_file(path, &emit_svg(&d, &SvgStyle::default()))?;
    }
    Ok(EXIT_POSITIVE)
}

fn cmd_signature(file: &Path, max_iters: u64) -> Outcome {
    let input = load(file)?;
    let (cert, reducer) = run_reducer(
        &input,
        ReducerConfig {
            max_iters,
            ..ReducerConfig::default()
        },
    )?;
    if !cert.is_discrete_torsion_free() {
        let doc =
            CertificateDocument::from_torsion_free(input.spec, &input.gens, &cert, &reducer.stats);
        emit(&doc, false)?;
        return Ok(EXIT_NEGATIVE);
    }
    let group = ReducedGroup::from_certificate_sl2(input.spec, &cert, &input.gens)?;
    let (_, r) = peripheral_classes(&group)?;
    let out = json!({
        "genus": r.genus,
        "s": r.parabolic_classes,
        "t": r.hyperbolic_boundary_classes,
        "cocompact": r.cocompact,
        "degenerate": r.degenerate,
        "rank": r.rank,
    });
    print_out(&serde_json::to_string_pretty(&out).expect("signature serializes"));
    Ok(EXIT_POSITIVE)
}

fn cmd_plot(
    file: &Path,
    svg: &Path,
    cayley: Option<usize>,
    rec: &RecognitionArgs,
    dom: &DomainArgs,
) -> Outcome {
    let input = load(file)?;
    let style = SvgStyle::default();
    let text = match cayley {
        Some(radius) => emit_cayley_svg(
            &cayley_ball(&projective(&input.gens), &Point::i(input.spec), radius)?,
            &style,
        ),
        None => emit_svg(&build_domain(&input, rec, dom)?, &style),
    };
    write_file(svg, &text)?;
    Ok(EXIT_POSITIVE)
}

fn bench_grid(args: &BenchArgs) -> Result<Vec<(usize, usize)>, Failure> {
    match (args.n.is_empty(), args.d.is_empty()) {
        (true, true) => Ok(bench::RECOGNITION_GRID.to_vec()),
        (false, false) if args.n.len() == args.d.len() => {
            Ok(args.n.iter().copied().zip(args.d.iter().copied()).collect())
        }
        _ => Err(Failure::Input(
            "--n and --d must list the same number of values".into(),
        )),
    }
}

fn cmd_bench(args: &BenchArgs) -> Outcome {
    let field = FieldSpec::new(args.field)?;
    let grid = bench_grid(args)?;
    for &(n, d) in &grid {
        TrialParams::new(n, d, field, args.seed)?;
    }
    let config = TableConfig {
        entries: EntryDistribution::new(args.max_numerator, args.max_denominator)?,
        reducer: ReducerConfig {
            max_iters: args.max_iters,
            ..ReducerConfig::default()
        },
        ..TableConfig::new(field, args.trials, args.seed)
    };
    let (header, lines) = if args.membership {
        let mut lines = Vec::new();
        for &(n, d) in &grid {
            let rows = bench::run_membership_table(n, d, &bench::MEMBERSHIP_LENGTHS, &config)?;
            lines.extend(rows.iter().map(|r| r.to_csv()));
        }
        (bench::MEMBERSHIP_CSV_HEADER, lines)
    } else {
        let rows = bench::run_table(&grid, &config)?;
        for c in bench::summarize(&rows) {
            eprintln!(
                "(n, d) = ({}, {}): {} trials, {} discrete, {} elliptic, {} indiscrete, {} capped, mean {:.1} ms, max {} ms",
                c.n, c.d, c.trials, c.discrete, c.elliptic, c.indiscrete, c.capped, c.mean_millis, c.max_millis
            );
        }
        (bench::CSV_HEADER, rows.iter().map(|r| r.to_csv()).collect())
    };
    let mut sink: Box<dyn Write> = match &args.csv {
        Some(path) => {
            let file = OpenOptions::new().create(true).append(true).open(path)?;
            let empty = file.metadata()?.len() == 0;
            let mut w: Box<dyn Write> = Box::new(file);
            if empty {
                writeln!(w, "{header}")?;
            }
            w
        }
        None => {
            let mut w: Box<dyn Write> = Box::new(io::stdout());
            writeln!(w, "{header}")?;
            w
        }
    };
    for line in lines {
        writeln!(sink, "{line}")?;
    }
    Ok(EXIT_POSITIVE)
}

/// Non-membership cannot be certified by a word, so the query is decided
/// again from scratch.
fn recheck_non_member(doc: &CertificateDocument) -> Result<(), Failure> {
    let spec = doc.spec()?;
    let gens = doc.generators()?;
    let q = parse_matrix(
        spec,
        doc.query
            .as_ref()
            .ok_or_else(|| Failure::Input("missing query".into()))?,
    )?;
    let mode = parse_mode(doc.mode.as_deref().unwrap_or("psl2"))?;
    let cert = Reducer::new(ReducerConfig::default()).run(&projective(&gens))?;
    let answer = if cert.is_discrete_torsion_free() {
        ReducedGroup::from_certificate_sl2(spec, &cert, &gens)?.is_member(&q, mode)?
    } else {
        match finiteindex::recognize(&gens, &FiniteIndexConfig::default())? {
            FullCertificate::Discrete(data) => finiteindex::is_member(&data, &q, mode)?,
            FullCertificate::Indiscrete(_) => {
                return Err(Error::Verification("the generators are not discrete".into()).into())
            }
        }
    };
    if answer.is_member() {
        return Err(Error::Verification("the query is a member".into()).into());
    }
    Ok(())
}

fn cmd_verify(file: &Path) -> Outcome {
    let doc: CertificateDocument = read_json(file)?;
    doc.verify()?;
    if doc.status == document::NON_MEMBER {
        recheck_non_member(&doc)?;
    }
    print_out(&format!("ok: {}", doc.status));
    Ok(EXIT_POSITIVE)
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Recognize { file, rec } => cmd_recognize(file, rec),
        Command::Member {
            file,
            rec,
            sl2,
            psl2,
        } => cmd_member(file, rec, *sl2, *psl2),
        Command::Domain {
            file,
            rec,
            dom,
            svg,
        } => cmd_domain(file, rec, dom, svg.as_deref()),
        Command::Signature { file, max_iters } => cmd_signature(file, *max_iters),
        Command::Plot {
            file,
            svg,
            cayley,
            rec,
            dom,
        } => cmd_plot(file, svg, *cayley, rec, dom),
        Command::Bench(args) => cmd_bench(args),
        Command::Verify { file } => cmd_verify(file),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_POSITIVE
            });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
