//! Command-line front door: enumeration and diagrams of the admissible
//! partition families, Möbius tables, exact moment/cumulant transforms on
//! table files, additive convolution, operator-model moments and dumps, the
//! central-limit scaling demo, and the verification suites.
//!
//! Exit codes: 0 on success, 1 when a verification suite fails, 2 on usage
//! errors (bad flags, malformed inputs, values outside an operation's
//! domain).

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::BigRational;

use ffb::cumulants::CumulantOracle;
use ffb::cumulants::{
    ffb_convolve, one_block_cumulant, words_up_to, Letter, MomentFunctional, MomentTable,
    TableKind, Word,
};
use ffb::fock::{
    build_basis, left_annihilation, left_creation, projection_block, projection_level,
    right_annihilation, right_creation, FockOperator, TripleFamily,
};
use ffb::suites::{
    run_all, run_clt_suite, run_independence_suite, run_lattice_suite, run_mobius_suite,
    SuiteConfig, SuiteReport,
};
use ffb::{ChiMap, Face, Partition};

#[derive(Parser)]
#[command(
    name = "ffb",
    about = "Exact combinatorics of interval-bi-noncrossing lattices, cumulants, and the Fock-space operator model",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate or draw the admissible partition family of a labeling.
    Ibnc {
        #[command(subcommand)]
        action: IbncAction,
    },
    /// Möbius values on the lattice of a labeling.
    Mobius(MobiusArgs),
    /// Exact transforms between moment tables and cumulant tables.
    Transform {
        #[command(subcommand)]
        action: TransformAction,
    },
    /// Additive convolution of two moment tables.
    Convolve(ConvolveArgs),
    /// Operator-model moments and matrix dumps.
    Fock {
        #[command(subcommand)]
        action: FockAction,
    },
    /// Central-limit scaling demo.
    Clt {
        #[command(subcommand)]
        action: CltAction,
    },
    /// Run a verification suite; exits 1 if any check fails.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum IbncAction {
    /// Count (and optionally list) the admissible partitions.
    Enumerate {
        /// Labeling as a string over {l, r, c}.
        #[arg(long)]
        chi: String,
        /// Print each partition after the count.
        #[arg(long)]
        list: bool,
    },
    /// Draw the two-column diagram of a labeling.
    Diagram {
        #[arg(long)]
        chi: String,
        /// Partition in block text form, e.g. 1,2|3,5|4.
        #[arg(long)]
        partition: Option<String>,
    },
}

#[derive(Args)]
struct MobiusArgs {
    #[arg(long)]
    chi: String,
    /// Lower partition of a single lookup.
    #[arg(long, requires = "to")]
    from: Option<String>,
    /// Upper partition of a single lookup.
    #[arg(long, requires = "from")]
    to: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    format: TableFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum TransformAction {
    /// Moment table in, cumulant table out.
    ToCumulants(TransformArgs),
    /// Cumulant table in, moment table out.
    ToMoments(TransformArgs),
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long)]
    input: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConvolveArgs {
    /// First moment table.
    #[arg(long)]
    input: PathBuf,
    /// Second moment table over the same alphabet.
    #[arg(long = "with")]
    with_table: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Longest word the output covers.
    #[arg(long, default_value_t = 4)]
    max_n: usize,
}

#[derive(Subcommand)]
enum FockAction {
    /// Vacuum moments of generator words.
    Moments {
        /// Number of triples (equals the coefficient dimension).
        #[arg(long, default_value_t = 2)]
        indices: usize,
        /// Longest word to evaluate.
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        /// Evaluate one word instead, e.g. "1:l:creation 2:r:annihilation".
        #[arg(long)]
        word: Option<String>,
    },
    /// CSV dump (row,col,value) of one operator matrix.
    Dump {
        #[arg(long, default_value_t = 2)]
        indices: usize,
        /// Truncation degree of the basis.
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// Operator name: l1, l1*, r1, r1*, c1, c1*, plevel1, pblock1, ...
        #[arg(long)]
        op: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CltAction {
    /// Print the exact scaling table of the fixture limit family.
    Demo {
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        /// Copy counts, comma separated.
        #[arg(long, default_value = "1,4,16")]
        n_list: String,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// One of: lattice, mobius, independence, clt, all.
    suite: String,
    #[arg(long)]
    max_n: Option<usize>,
    /// Number of triples for the independence suite.
    #[arg(long, default_value_t = 2)]
    indices: usize,
    /// Seed for the randomized suites.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Sample count for the randomized suites.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    format: TableFormat,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> ffb::Result<ExitCode> {
    match cli.command {
        Command::Ibnc { action } => {
            match action {
                IbncAction::Enumerate { chi, list } => {
                    let chi: ChiMap = chi.parse()?;
                    let lattice = ffb::lattice_for(&chi)?;
                    println!("count: {}", lattice.len());
                    if list {
                        for pi in lattice.elements() {
                            println!("{pi}");
                        }
                    }
                }
                IbncAction::Diagram { chi, partition } => {
                    let chi: ChiMap = chi.parse()?;
                    let pi = partition.map(|p| p.parse::<Partition>()).transpose()?;
                    print!("{}", ffb::render_diagram(&chi, pi.as_ref())?);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Mobius(args) => run_mobius(args).map(|_| ExitCode::SUCCESS),
        Command::Transform { action } => {
            let (args, direction) = match action {
                TransformAction::ToCumulants(a) => (a, TableKind::Cumulants),
                TransformAction::ToMoments(a) => (a, TableKind::Moments),
            };
            run_transform(args, direction).map(|_| ExitCode::SUCCESS)
        }
        Command::Convolve(args) => run_convolve(args).map(|_| ExitCode::SUCCESS),
        Command::Fock { action } => run_fock(action).map(|_| ExitCode::SUCCESS),
        Command::Clt { action } => run_clt(action).map(|_| ExitCode::SUCCESS),
        Command::Verify(args) => run_verify(args),
    }
}

fn write_out(output: &Option<PathBuf>, text: &str) -> ffb::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            ffb::Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_mobius(args: MobiusArgs) -> ffb::Result<()> {
    let chi: ChiMap = args.chi.parse()?;
    let lattice = ffb::lattice_for(&chi)?;
    if let (Some(from), Some(to)) = (&args.from, &args.to) {
        let sigma: Partition = from.parse()?;
        let pi: Partition = to.parse()?;
        let i = lattice
            .index_of(&sigma)
            .ok_or_else(|| ffb::Error::Domain(format!("{sigma} is not in the lattice of {chi}")))?;
        let j = lattice
            .index_of(&pi)
            .ok_or_else(|| ffb::Error::Domain(format!("{pi} is not in the lattice of {chi}")))?;
        if !lattice.leq_idx(i, j) {
            return Err(ffb::Error::Domain(format!("{sigma} is not <= {pi}")));
        }
        println!("{}", lattice.mobius_idx(i, j));
        return Ok(());
    }
    let text = match args.format {
        TableFormat::Csv | TableFormat::Text => {
            let mut out = String::new();
            out.push_str("sigma\\pi");
            for pi in lattice.elements() {
                out.push(',');
                out.push_str(&pi.to_string());
            }
            out.push('\n');
            for i in 0..lattice.len() {
                out.push_str(&lattice.element(i).to_string());
                for j in 0..lattice.len() {
                    out.push(',');
                    if lattice.leq_idx(i, j) {
                        out.push_str(&lattice.mobius_idx(i, j).to_string());
                    }
                }
                out.push('\n');
            }
            out
        }
        TableFormat::Json => {
            let mut values = Vec::new();
            for i in 0..lattice.len() {
                for j in 0..lattice.len() {
                    if lattice.leq_idx(i, j) {
                        values.push(serde_json::json!({
                            "from": lattice.element(i).to_string(),
                            "to": lattice.element(j).to_string(),
                            "mu": lattice.mobius_idx(i, j).to_string(),
                        }));
                    }
                }
            }
            let doc = serde_json::json!({ "chi": chi.to_string(), "values": values });
            let mut text = serde_json::to_string_pretty(&doc).expect("serialization");
            text.push('\n');
            text
        }
    };
    write_out(&args.output, &text)
}

fn run_transform(args: TransformArgs, target: TableKind) -> ffb::Result<()> {
    let text = std::fs::read_to_string(&args.input).map_err(|e| {
        ffb::Error::InvalidArgument(format!("cannot read {}: {e}", args.input.display()))
    })?;
    let (table, kind) = MomentTable::from_json(&text)?;
    let result = match (kind, target) {
        (TableKind::Moments, TableKind::Cumulants) => {
            let mut out = MomentTable::new(table.letters().to_vec());
            let mut keys: Vec<Vec<usize>> = table.entries().map(|(k, _)| k.clone()).collect();
            keys.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            for key in keys {
                let word = table.word_for(&key);
                let kappa = one_block_cumulant(&word, &table)?;
                out.insert_indices(key, kappa)?;
            }
            out.to_json(TableKind::Cumulants)
        }
        (TableKind::Cumulants, TableKind::Moments) => {
            let oracle = TableCumulants { table: &table };
            let mut out = MomentTable::new(table.letters().to_vec());
            let mut keys: Vec<Vec<usize>> = table.entries().map(|(k, _)| k.clone()).collect();
            keys.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            for key in keys {
                let word = table.word_for(&key);
                let moment = ffb::cumulants::moments_from_cumulants(&word.chi(), &word, &oracle)?;
                out.insert_indices(key, moment)?;
            }
            out.to_json(TableKind::Moments)
        }
        (TableKind::Moments, TableKind::Moments) => {
            return Err(ffb::Error::InvalidArgument(
                "input already holds moments; use to-cumulants".into(),
            ))
        }
        (TableKind::Cumulants, TableKind::Cumulants) => {
            return Err(ffb::Error::InvalidArgument(
                "input already holds cumulants; use to-moments".into(),
            ))
        }
    };
    write_out(&args.output, &result)
}

/// Cumulant oracle reading straight from a cumulant table.
struct TableCumulants<'a> {
    table: &'a MomentTable,
}

impl CumulantOracle for TableCumulants<'_> {
    fn kappa(&self, word: &Word) -> ffb::Result<BigRational> {
        self.table.moment(word)
    }
}

fn run_convolve(args: ConvolveArgs) -> ffb::Result<()> {
    let read = |path: &PathBuf| -> ffb::Result<MomentTable> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ffb::Error::InvalidArgument(format!("cannot read {}: {e}", path.display()))
        })?;
        let (table, kind) = MomentTable::from_json(&text)?;
        if kind != TableKind::Moments {
            return Err(ffb::Error::InvalidArgument(format!(
                "{} must hold moments",
                path.display()
            )));
        }
        Ok(table)
    };
    let a = read(&args.input)?;
    let b = read(&args.with_table)?;
    let out = ffb_convolve(&a, &b, args.max_n)?;
    write_out(&args.output, &out.to_json(TableKind::Moments))
}

fn parse_word(text: &str) -> ffb::Result<Word> {
    let letters = text
        .split_whitespace()
        .map(|piece| {
            let parts: Vec<&str> = piece.split(':').collect();
            if parts.len() != 3 {
                return Err(ffb::Error::Parse(format!(
                    "letter {piece:?} must be index:face:tag"
                )));
            }
            let mut chars = parts[1].chars();
            let face = Face::from_char(chars.next().ok_or_else(|| {
                ffb::Error::Parse(format!("letter {piece:?} has an empty face"))
            })?)?;
            if chars.next().is_some() {
                return Err(ffb::Error::Parse(format!(
                    "letter {piece:?} has a bad face"
                )));
            }
            Ok(Letter::new(parts[0], face, parts[2]))
        })
        .collect::<ffb::Result<Vec<_>>>()?;
    Word::new(letters)
}

fn run_fock(action: FockAction) -> ffb::Result<()> {
    match action {
        FockAction::Moments {
            indices,
            max_n,
            word,
        } => {
            let basis = build_basis(indices, max_n.max(2))?;
            let family = TripleFamily::new(&basis)?;
            match word {
                Some(text) => {
                    let word = parse_word(&text)?;
                    println!("{}", family.moment(&word)?);
                }
                None => {
                    for word in words_up_to(family.letters(), max_n) {
                        println!("{word} = {}", family.moment(&word)?);
                    }
                }
            }
        }
        FockAction::Dump {
            indices,
            degree,
            op,
            output,
        } => {
            let basis = build_basis(indices, degree)?;
            let operator = named_operator(&basis, &op)?;
            write_out(&output, &operator.dump_csv())?;
        }
    }
    Ok(())
}

fn named_operator(basis: &Arc<ffb::fock::FockBasis>, name: &str) -> ffb::Result<FockOperator> {
    let bad = || ffb::Error::InvalidArgument(format!("unknown operator name {name:?}"));
    if name.len() < 2 || !name.is_ascii() {
        return Err(bad());
    }
    let (kind, rest) = name.split_at(1);
    let prefixed = ["plevel", "pblock"].iter().find(|p| name.starts_with(**p));
    if let Some(prefix) = prefixed {
        let i: usize = name[prefix.len()..].parse().map_err(|_| bad())?;
        return match *prefix {
            "plevel" => projection_level(basis, i),
            _ => projection_block(basis, i),
        };
    }
    let star = rest.ends_with('*');
    let digits = if star { &rest[..rest.len() - 1] } else { rest };
    let i: usize = digits.parse().map_err(|_| bad())?;
    if i == 0 || i > basis.d() {
        return Err(ffb::Error::InvalidArgument(format!(
            "index {i} outside 1..={}",
            basis.d()
        )));
    }
    let mut e = vec![BigRational::from_integer(0.into()); basis.d()];
    e[i - 1] = BigRational::from_integer(1.into());
    match (kind, star) {
        ("l", false) => left_creation(basis, &e),
        ("l", true) => left_annihilation(basis, &e),
        ("r", false) => right_creation(basis, &e),
        ("r", true) => right_annihilation(basis, &e),
        ("c", star) => {
            let p = projection_level(basis, i)?;
            let inner = if star {
                left_annihilation(basis, &e)?
            } else {
                left_creation(basis, &e)?
            };
            p.multiply(&inner)?.multiply(&p)
        }
        _ => Err(bad()),
    }
}

fn run_clt(action: CltAction) -> ffb::Result<()> {
    let CltAction::Demo { max_n, n_list } = action;
    let copies: Vec<u64> = n_list
        .split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| ffb::Error::Parse(format!("bad copy count {p:?}")))
        })
        .collect::<ffb::Result<Vec<_>>>()?;
    let report = ffb::suites::clt_demo_report(max_n, &copies)?;
    println!("normalized cumulants kappa_m(S_N) * N^(m/2 - 1) per copy count N");
    println!("copy counts: {copies:?}");
    for m in 1..=max_n {
        let rows: Vec<_> = report.rows.iter().filter(|r| r.word.len() == m).collect();
        let nonzero = rows
            .iter()
            .filter(|r| !num::Zero::is_zero(&r.base_cumulant))
            .count();
        println!(
            "order {m}: {} words, {} with nonzero cumulant",
            rows.len(),
            nonzero
        );
        if let Some(row) = rows.iter().find(|r| !num::Zero::is_zero(&r.base_cumulant)) {
            let values: Vec<String> = row
                .normalized
                .iter()
                .map(|(n, v)| format!("N={n}: {v}"))
                .collect();
            println!("  e.g. [{}] -> {}", row.word, values.join(", "));
            if !row.raw.is_empty() {
                let raws: Vec<String> =
                    row.raw.iter().map(|(n, v)| format!("N={n}: {v}")).collect();
                println!("  raw  [{}] -> {}", row.word, raws.join(", "));
            }
        }
    }
    println!(
        "{}",
        if report.passed() {
            "scaling exact: PASS"
        } else {
            "scaling exact: FAIL"
        }
    );
    if !report.passed() {
        return Err(ffb::Error::Domain(report.failures.join("; ")));
    }
    Ok(())
}

fn run_verify(args: VerifyArgs) -> ffb::Result<ExitCode> {
    let reports: Vec<SuiteReport> = match args.suite.as_str() {
        "lattice" => vec![run_lattice_suite(SuiteConfig {
            seed: args.seed,
            samples: args.samples.unwrap_or(100),
            max_n: args.max_n.unwrap_or(8),
        })?],
        "mobius" => vec![run_mobius_suite(SuiteConfig {
            seed: args.seed,
            samples: args.samples.unwrap_or(60),
            max_n: args.max_n.unwrap_or(7),
        })?],
        "independence" => {
            vec![run_independence_suite(
                args.indices,
                args.max_n.unwrap_or(5),
            )?]
        }
        "clt" => vec![run_clt_suite(args.max_n.unwrap_or(5))?],
        "all" => run_all(args.seed)?,
        other => {
            return Err(ffb::Error::InvalidArgument(format!(
                "unknown suite {other:?}; expected lattice, mobius, independence, clt or all"
            )))
        }
    };
    let all_passed = reports.iter().all(|r| r.passed());
    match args.format {
        TableFormat::Json => {
            for report in &reports {
                print!("{}", report.to_json());
            }
        }
        _ => {
            for report in &reports {
                print!("{report}");
            }
            println!(
                "{}",
                if all_passed {
                    "all checks passed"
                } else {
                    "some checks FAILED"
                }
            );
        }
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
