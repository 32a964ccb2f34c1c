//! `pfg`: exact checks, cores and proposition verification for symmetric
//! partition function games.

mod text;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pfg_core::beliefs::{singleton_threshold, Belief, BeliefFile};
use pfg_core::game::{
    check_yi_p2, compress, expand, is_efficient, EfficiencyReport, ExternalityReport, ExternalitySign, GameFamily,
    SymmetricGame, YiReport,
};
use pfg_core::generators::{
    cournot_family, cournot_game, neg_family, neg_family_game, random_family, random_symmetric_game, CournotParams,
    NegFamilyParams,
};
use pfg_core::harness::{verify_proposition, VerifyConfig, VerifyMode};
use pfg_core::induced::{core_nonempty_lp, equal_split, equal_split_in_core, induce, CoreVerdict, EqualSplitReport};
use pfg_core::par::Execution;
use pfg_core::partitions::{enumerate_set_partitions, enumerate_shapes, shape_multiplicity};
use pfg_core::{limits, random, rational, Error, Rational};

const EXIT_COUNTEREXAMPLE: u8 = 1;
const EXIT_HYPOTHESES: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

#[derive(Parser, Debug)]
#[command(name = "pfg", version, about = "Partition function games with coalitional beliefs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Efficiency, externality sign, Yi's P.2 and symmetry of a game file.
    Check {
        game: PathBuf,
        /// Fail unless externalities have this sign.
        #[arg(long, value_enum)]
        require_sign: Option<SignArg>,
        /// Fail unless smaller coalitions earn more per member.
        #[arg(long)]
        require_yi: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Induced game, equal-split verdict and optionally the LP verdict.
    Core {
        game: PathBuf,
        /// Belief files; each holds one belief or an array of beliefs.
        #[arg(long, num_args = 1.., required = true)]
        beliefs: Vec<PathBuf>,
        #[arg(long)]
        lp: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Add a display-only decimal column.
        #[arg(long)]
        approx: bool,
    },
    /// Audit a game family and check core non-emptiness on sampled beliefs.
    Verify {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write per-cell margins as CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        approx: bool,
        /// Run every cell on the calling thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Largest singleton merge probability that keeps a 3-player core non-empty.
    Threshold {
        game: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// List set partitions of {1..n}, or shapes with their multiplicities.
    Partitions {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        shapes: bool,
    },
    /// Write a generated game as JSON.
    Generate {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args, Debug)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: FamilyKind,
    /// Externality strength for `negfam`, as p/q.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long, default_value = "1")]
    margin: String,
    #[arg(long, default_value = "1")]
    slope: String,
    /// Externality sign for `random`.
    #[arg(long, value_enum, default_value_t = SignArg::Positive)]
    sign: SignArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyKind {
    Cournot,
    Negfam,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SignArg {
    Positive,
    Negative,
}

impl From<SignArg> for ExternalitySign {
    fn from(s: SignArg) -> ExternalitySign {
        match s {
            SignArg::Positive => ExternalitySign::Positive,
            SignArg::Negative => ExternalitySign::Negative,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Prop1,
    Prop2,
    Mirror,
}

impl From<ModeArg> for VerifyMode {
    fn from(m: ModeArg) -> VerifyMode {
        match m {
            ModeArg::Prop1 => VerifyMode::Prop1,
            ModeArg::Prop2 => VerifyMode::Prop2,
            ModeArg::Mirror => VerifyMode::NegativeMirror,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    Hypotheses(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Data(_) => EXIT_DATA,
            Failure::Hypotheses(_) => EXIT_HYPOTHESES,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Hypotheses(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let msg = e.to_string();
        match e {
            Error::SizeLimit { .. } | Error::InvalidArgument(_) | Error::Generator(_) => Failure::Usage(msg),
            Error::UnsupportedSign(_) | Error::InfeasibleStep { .. } => Failure::Hypotheses(msg),
            _ => Failure::Data(msg),
        }
    }
}

type CliResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("pfg: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Check {
            game,
            require_sign,
            require_yi,
            format,
        } => cmd_check(&game, require_sign, require_yi, format),
        Command::Core {
            game,
            beliefs,
            lp,
            format,
            approx,
        } => cmd_core(&game, &beliefs, lp, format, approx),
        Command::Verify {
            family,
            mode,
            n_max,
            samples,
            seed,
            report,
            csv,
            format,
            approx,
            sequential,
        } => {
            let seed = match (seed, samples) {
                (Some(s), _) => s,
                (None, 0) if family.family != FamilyKind::Random => 0,
                (None, _) => return Err(Failure::Usage("--seed is required when sampling".into())),
            };
            let mut config = VerifyConfig::new(mode.into(), samples, seed);
            if sequential {
                config.execution = Execution::Sequential;
            }
            cmd_verify(
                &family,
                n_max,
                &config,
                report.as_deref(),
                csv.as_deref(),
                format,
                approx,
            )
        }
        Command::Threshold { game, format } => cmd_threshold(&game, format),
        Command::Partitions { n, shapes } => cmd_partitions(n, shapes),
        Command::Generate { family, n, seed, out } => cmd_generate(&family, n, seed, out.as_deref()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn load_game(path: &Path) -> Result<SymmetricGame, Failure> {
    SymmetricGame::from_json(&read(path)?).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

#[derive(serde::Deserialize)]
#[serde(untagged)]
enum BeliefInput {
    Many(Vec<BeliefFile>),
    One(BeliefFile),
}

fn load_beliefs(path: &Path) -> Result<Vec<Belief>, Failure> {
    let data = |e: &dyn std::fmt::Display| Failure::Data(format!("{}: {e}", path.display()));
    let text = read(path)?;
    // Parse twice so that syntax errors keep their line and column.
    let _: serde_json::Value = serde_json::from_str(&text).map_err(|e| data(&e))?;
    let files = match serde_json::from_str::<BeliefInput>(&text).map_err(|e| data(&e))? {
        BeliefInput::Many(v) => v,
        BeliefInput::One(f) => vec![f],
    };
    files
        .into_iter()
        .map(|f| Belief::from_file(f).map_err(|e| data(&e)))
        .collect()
}

fn parse_rational(flag: &str, value: &str) -> Result<Rational, Failure> {
    rational::parse(value).map_err(|e| Failure::Usage(format!("--{flag}: {e}")))
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

#[derive(Serialize)]
struct CheckReport<'a> {
    n: usize,
    efficiency: EfficiencyReport,
    externalities: &'a ExternalityReport,
    yi_p2: YiReport,
    /// `None` when the game is too large to expand.
    symmetric_round_trip: Option<bool>,
    passed: bool,
}

fn cmd_check(path: &Path, require_sign: Option<SignArg>, require_yi: bool, format: Format) -> CliResult {
    let g = load_game(path)?;
    let efficiency = is_efficient(&g);
    let externalities = g.externalities();
    let yi_p2 = check_yi_p2(&g);
    let symmetric_round_trip = if g.n() <= limits::cap(limits::EXPAND_MAX_N) {
        let general = expand(&g)?;
        Some(compress(&general)? == g)
    } else {
        None
    };
    let mut passed = efficiency.efficient && symmetric_round_trip != Some(false);
    if let Some(sign) = require_sign {
        passed &= externalities.sign == ExternalitySign::from(sign);
    }
    if require_yi {
        passed &= yi_p2.holds;
    }
    let report = CheckReport {
        n: g.n(),
        efficiency,
        externalities,
        yi_p2,
        symmetric_round_trip,
        passed,
    };
    match format {
        Format::Json => print_json(&report),
        Format::Text => {
            print!(
                "{}",
                text::check(
                    report.n,
                    &report.efficiency,
                    report.externalities,
                    &report.yi_p2,
                    report.symmetric_round_trip
                )
            );
        }
    }
    Ok(if passed { 0 } else { EXIT_COUNTEREXAMPLE })
}

#[derive(Serialize)]
struct CoreReport {
    n: usize,
    #[serde(with = "rational::serde_str")]
    grand: Rational,
    #[serde(with = "rational::serde_vec_str")]
    induced: Vec<Rational>,
    equal_split: pfg_core::induced::Allocation,
    verdict: EqualSplitReport,
    lp: Option<CoreVerdict>,
}

fn cmd_core(game: &Path, belief_paths: &[PathBuf], lp: bool, format: Format, approx: bool) -> CliResult {
    let g = load_game(game)?;
    let mut beliefs = BTreeMap::new();
    for path in belief_paths {
        for b in load_beliefs(path)? {
            if b.n() != g.n() {
                return Err(Failure::Data(format!(
                    "{}: belief for n = {} but the game has n = {}",
                    path.display(),
                    b.n(),
                    g.n()
                )));
            }
            if beliefs.insert(b.s(), b).is_some() {
                return Err(Failure::Usage(format!(
                    "two beliefs given for one coalition size in {}",
                    path.display()
                )));
            }
        }
    }
    if let Some(s) = (1..g.n()).find(|s| !beliefs.contains_key(s)) {
        return Err(Failure::Usage(format!("no belief given for coalition size {s}")));
    }
    let ig = induce(&g, &beliefs)?;
    let verdict = equal_split_in_core(&ig);
    let lp = if lp { Some(core_nonempty_lp(&ig)?) } else { None };
    let report = CoreReport {
        n: g.n(),
        grand: g.grand().clone(),
        induced: (1..g.n()).map(|s| ig.vh(s).clone()).collect(),
        equal_split: equal_split(&ig),
        verdict,
        lp,
    };
    match format {
        Format::Json => print_json(&report),
        Format::Text => print!(
            "{}",
            text::core(
                &report.grand,
                &report.induced,
                &report.equal_split,
                &report.verdict,
                report.lp.as_ref(),
                approx
            )
        ),
    }
    let nonempty = report.lp.as_ref().map_or(report.verdict.in_core, |v| v.nonempty);
    Ok(if report.verdict.in_core && nonempty {
        0
    } else {
        EXIT_COUNTEREXAMPLE
    })
}

fn build_family(args: &FamilyArgs, n_max: usize, seed: u64) -> Result<(GameFamily, String), Failure> {
    if n_max < 3 {
        return Err(Failure::Usage(format!("--n-max must be at least 3, got {n_max}")));
    }
    match args.family {
        FamilyKind::Cournot => {
            let p = cournot_params(args)?;
            let label = format!(
                "cournot(margin={}, slope={})",
                rational::format(p.margin()),
                rational::format(p.slope())
            );
            Ok((cournot_family(&p, n_max)?, label))
        }
        FamilyKind::Negfam => {
            let p = negfam_params(args)?;
            Ok((
                neg_family(&p, n_max)?,
                format!("negfam(eps={})", rational::format(p.epsilon())),
            ))
        }
        FamilyKind::Random => {
            let sign = ExternalitySign::from(args.sign);
            let game_seed = random::derive_seed(seed, &[u64::MAX]);
            Ok((
                random_family(sign, n_max, game_seed)?,
                format!("random(sign={sign}, seed={seed})"),
            ))
        }
    }
}

fn cournot_params(args: &FamilyArgs) -> Result<CournotParams, Failure> {
    let margin = parse_rational("margin", &args.margin)?;
    let slope = parse_rational("slope", &args.slope)?;
    Ok(CournotParams::new(margin, slope)?)
}

fn negfam_params(args: &FamilyArgs) -> Result<NegFamilyParams, Failure> {
    let eps = args
        .eps
        .as_deref()
        .ok_or_else(|| Failure::Usage("--eps is required for the negfam family".into()))?;
    Ok(NegFamilyParams::new(parse_rational("eps", eps)?)?)
}

fn cmd_verify(
    family: &FamilyArgs,
    n_max: usize,
    config: &VerifyConfig,
    report_path: Option<&Path>,
    csv_path: Option<&Path>,
    format: Format,
    approx: bool,
) -> CliResult {
    limits::check("verification n_max", n_max, limits::VERIFY_MAX_N)?;
    let (f, label) = build_family(family, n_max, config.seed)?;
    let report = verify_proposition(&f, &label, config)?;
    if let Some(path) = report_path {
        write(path, &(report.to_json() + "\n"))?;
    }
    if let Some(path) = csv_path {
        write(path, &report.margins_csv())?;
    }
    match format {
        Format::Json => println!("{}", report.to_json()),
        Format::Text => print!("{}", text::verify(&report, approx)),
    }
    Ok(report.exit_code() as u8)
}

fn cmd_threshold(path: &Path, format: Format) -> CliResult {
    let g = load_game(path)?;
    let base = singleton_threshold(&g)?;
    match format {
        Format::Json => print_json(&base),
        Format::Text => print!("{}", text::threshold(&base)),
    }
    Ok(0)
}

fn cmd_partitions(n: usize, shapes: bool) -> CliResult {
    if shapes {
        let all = enumerate_shapes(n)?;
        for sh in &all {
            println!("{sh} {}", shape_multiplicity(sh));
        }
        eprintln!("{} shapes of {n}", all.len());
    } else {
        let all = enumerate_set_partitions(n)?;
        for p in &all {
            println!("{p}");
        }
        eprintln!("{} set partitions of {n}", all.len());
    }
    Ok(0)
}

fn cmd_generate(args: &FamilyArgs, n: usize, seed: Option<u64>, out: Option<&Path>) -> CliResult {
    let g = match args.family {
        FamilyKind::Cournot => cournot_game(&cournot_params(args)?, n)?,
        FamilyKind::Negfam => neg_family_game(&negfam_params(args)?, n)?,
        FamilyKind::Random => {
            let seed = seed.ok_or_else(|| Failure::Usage("--seed is required for the random family".into()))?;
            random_symmetric_game(n, args.sign.into(), seed)?
        }
    };
    let json = g.to_json() + "\n";
    match out {
        Some(path) => write(path, &json)?,
        None => print!("{json}"),
    }
    Ok(0)
}
