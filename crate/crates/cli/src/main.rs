//! `entbasis` command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use entbasis::analysis::{BasisKind, SearchConfig, SearchMode, VerifyOptions};
use entbasis::constructions::{
    bell_meb, catalog, dft_superposition, embed_meb, find_entry, n_qubit_ueb, prop2a_set, two_qubit_ueb_general,
    CoeffVariant, ExpectedKind, QubitPair,
};
use entbasis::cuts::Bipartition;
use entbasis::report::{build_report, exit_code, ReportRequest};
use entbasis::state::{StateSet, Tolerance, C64};
use entbasis::statefile::StateFile;
use entbasis::Error;

const EXIT_GATE_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "entbasis", version, about = "Construct and verify incomplete entangled bases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Catalog of shipped constructions
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Build a catalog entry or run a generator and write a state file
    Construct(ConstructArgs),
    /// Check the basis property of a state file
    Verify {
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Full diagnostics for a state file
    Analyze {
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        /// Search for states completing the set
        #[arg(long, value_enum)]
        completion: Option<CompletionArg>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Subcommand)]
enum CatalogAction {
    List {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Args)]
struct ConstructArgs {
    /// Catalog entry or generator: ueb-general, bell-meb, embed-meb, nqubit-ueb, dft, prop2a-set
    name: String,
    /// Output file; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum, default_value_t = VariantArg::Dft)]
    variant: VariantArg,
    /// Bit strings for the dft generator
    #[arg(long, value_delimiter = ',')]
    strings: Vec<String>,
    /// Rotation angles of the three local bases for ueb-general
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    angles: Vec<f64>,
}

#[derive(Debug, Args)]
struct CommonArgs {
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    starts: usize,
    /// Cut as a party bitmask, or `all`
    #[arg(long)]
    cut: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Re-orthonormalize input states in file order
    #[arg(long)]
    gram_fix: bool,
    /// Report INCONCLUSIVE instead of numerical evidence
    #[arg(long)]
    require_exact: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Ueb,
    UebAllCuts,
    Umeb,
}

impl From<KindArg> for BasisKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Ueb => BasisKind::Ueb,
            KindArg::UebAllCuts => BasisKind::UebAllCuts,
            KindArg::Umeb => BasisKind::Umeb,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CompletionArg {
    Entangled,
    MaxEntangled,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Dft,
    Hadamard,
}

fn input_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_INPUT)
}

fn rotation(theta: f64) -> QubitPair {
    let (s, c) = theta.sin_cos();
    [[C64::new(c, 0.0), C64::new(s, 0.0)], [C64::new(-s, 0.0), C64::new(c, 0.0)]]
}

fn require(v: Option<usize>, flag: &str) -> entbasis::Result<usize> {
    v.ok_or_else(|| Error::InvalidParameter(format!("missing --{flag}")))
}

fn construct(args: &ConstructArgs) -> entbasis::Result<(StateSet, Option<ExpectedKind>)> {
    if let Ok(entry) = find_entry(&args.name) {
        return Ok((entry.build()?, Some(entry.expected)));
    }
    match args.name.as_str() {
        "ueb-general" => {
            let [a, b, bp] = match args.angles.as_slice() {
                [] => [0.0; 3],
                &[a, b, bp] => [a, b, bp],
                _ => return Err(Error::InvalidParameter("--angles takes three values".into())),
            };
            let g = two_qubit_ueb_general(&rotation(a), &rotation(b), &rotation(bp))?;
            let expected = (g.verdict.outcome == entbasis::analysis::Outcome::Verified).then_some(ExpectedKind::Ueb);
            Ok((g.set, expected))
        }
        "bell-meb" => Ok((bell_meb(require(args.d, "d")?)?, Some(ExpectedKind::Meb))),
        "embed-meb" => Ok((embed_meb(require(args.d, "d")?, require(args.n, "n")?)?, Some(ExpectedKind::Umeb))),
        "nqubit-ueb" => {
            let variant = match args.variant {
                VariantArg::Dft => CoeffVariant::Dft,
                VariantArg::Hadamard => CoeffVariant::HadamardIfPowerOfTwo,
            };
            Ok((n_qubit_ueb(require(args.n, "n")?, variant)?, Some(ExpectedKind::UebAllCuts)))
        }
        "dft" => {
            let refs: Vec<&str> = args.strings.iter().map(String::as_str).collect();
            Ok((dft_superposition(&refs)?.with_name("dft"), None))
        }
        "prop2a-set" => Ok((prop2a_set(&SearchConfig::default())?, None)),
        other => Err(Error::UnknownName(other.to_string())),
    }
}

fn cmd_construct(args: &ConstructArgs) -> ExitCode {
    let (set, expected) = match construct(args) {
        Ok(v) => v,
        Err(e @ Error::GateFailed { .. }) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_GATE_FAILED);
        }
        Err(e) => return input_error(e),
    };
    let json = StateFile::from_set(&set, expected).to_json() + "\n";
    match &args.out {
        Some(path) => match fs::write(path, json) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => input_error(format!("{}: {e}", path.display())),
        },
        None => {
            print!("{json}");
            ExitCode::SUCCESS
        }
    }
}

fn cmd_catalog(format: Format) -> ExitCode {
    match format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = catalog()
                .iter()
                .map(|e| {
                    serde_json::json!({
                        "name": e.name,
                        "dims": e.dims,
                        "cardinality": e.cardinality,
                        "expected": e.expected,
                        "provenance": e.provenance,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&rows).expect("catalog serializes"));
        }
        Format::Text => {
            for e in catalog() {
                let space = e.dims.iter().map(usize::to_string).collect::<Vec<_>>().join("x");
                let kind = serde_json::to_value(e.expected).expect("kind serializes");
                println!("{:<16} {:<8} {:>3} states  {:<13} {}", e.name, space, e.cardinality, kind.as_str().unwrap_or(""), e.provenance);
            }
        }
    }
    ExitCode::SUCCESS
}

struct Loaded {
    bytes: Vec<u8>,
    file: StateFile,
    set: StateSet,
    cfg: SearchConfig,
    kind: BasisKind,
    opts: VerifyOptions,
}

fn load(path: &Path, kind: Option<KindArg>, common: &CommonArgs) -> entbasis::Result<Loaded> {
    let bytes = fs::read(path).map_err(|e| Error::StateFile(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| Error::StateFile(e.to_string()))?;
    let file = StateFile::from_json(&text)?;
    let tol = Tolerance::new(common.tol)?;
    let set = file.to_state_set(tol, common.gram_fix)?;
    let cfg = SearchConfig::default().with_tol(tol).with_seed(common.seed).with_starts(common.starts);
    let mut kind = kind.map(BasisKind::from).unwrap_or_else(|| match file.expected_kind {
        Some(k) => k.basis_kind(),
        None if set.space().parties() == 2 => BasisKind::Ueb,
        None => BasisKind::UebAllCuts,
    });
    let cut = match common.cut.as_deref() {
        None => None,
        Some("all") => {
            if kind == BasisKind::Ueb {
                kind = BasisKind::UebAllCuts;
            }
            None
        }
        Some(mask) => {
            let mask: u64 = mask.parse().map_err(|_| Error::InvalidParameter(format!("bad cut mask {mask:?}")))?;
            Some(Bipartition::new(set.space().clone(), mask)?)
        }
    };
    let opts = VerifyOptions { cut, require_exact: common.require_exact };
    Ok(Loaded { bytes, file, set, cfg, kind, opts })
}

fn run_report(loaded: Loaded, request: ReportRequest, format: Format) -> entbasis::Result<(String, i32)> {
    let report = build_report(&loaded.bytes, &loaded.set, loaded.kind, &loaded.opts, &loaded.cfg, &request)?;
    let code = exit_code(report.verdict.outcome);
    let text = match format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(),
    };
    Ok((text, code))
}

fn cmd_verify(input: &Path, kind: Option<KindArg>, common: &CommonArgs) -> ExitCode {
    let result = load(input, kind, common).and_then(|l| {
        let request = ReportRequest { gram_fix: common.gram_fix, ..Default::default() };
        run_report(l, request, common.format)
    });
    match result {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code as u8)
        }
        Err(e) => input_error(e),
    }
}

fn cmd_analyze(input: &Path, kind: Option<KindArg>, completion: Option<CompletionArg>, common: &CommonArgs) -> ExitCode {
    let result = load(input, kind, common).and_then(|l| {
        let request = ReportRequest {
            full_diagnostics: true,
            completion: completion.map(|c| match c {
                CompletionArg::Entangled => SearchMode::Entangled,
                CompletionArg::MaxEntangled => SearchMode::MaxEntangled,
            }),
            planes: l.file.planes(l.cfg.tol)?,
            gram_fix: common.gram_fix,
        };
        run_report(l, request, common.format)
    });
    match result {
        Ok((text, _)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => input_error(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Catalog { action: CatalogAction::List { format } } => cmd_catalog(*format),
        Command::Construct(args) => cmd_construct(args),
        Command::Verify { input, kind, common } => cmd_verify(input, *kind, common),
        Command::Analyze { input, kind, completion, common } => cmd_analyze(input, *kind, *completion, common),
    }
}
