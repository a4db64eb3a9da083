//! Command-line front end: loads packages and built-in examples, computes
//! cohomology tables, runs the seeded verification suites, and exports the
//! example corpus as JSON.
//!
//! Output is deterministic: identical inputs, seeds, and flags produce
//! byte-identical output. Exit codes: 0 on success, 1 when a verification
//! suite finds a failing property, 2 on invalid input.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use rigsyn::complex::Complex;
use rigsyn::fisoc::{abs_rigid_dims, frobenius_eigenvalues, FrobComplex};
use rigsyn::report::Report;
use rigsyn::ring_axioms::Perturbation;
use rigsyn::suites;
use rigsyn::syntomic::{
    builtin_example, builtin_names, syntomic_cone, syntomic_holim, BuiltinExample,
    SyntomicPackage,
};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "rigsyn",
    version,
    about = "Exact chain-level cohomology: computations and verification suites"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_parser = ["text", "json"], default_value = "text")]
    format: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a degree -> dimension table.
    Compute {
        #[command(subcommand)]
        subject: Subject,
    },
    /// Run a seeded verification suite; exits 1 if any check fails.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// List or export the built-in examples.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Name of a built-in example (see `examples list`).
    #[arg(long, value_name = "NAME")]
    example: Option<String>,
    /// Path to a JSON file holding a package, a Frobenius complex, or a
    /// plain complex.
    #[arg(long, value_name = "PATH", conflicts_with = "example")]
    package: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Subject {
    /// Syntomic cohomology of a package at a twist.
    Syntomic {
        #[command(flatten)]
        input: InputArgs,
        /// Tate twist.
        #[arg(long, default_value_t = 0)]
        twist: i64,
    },
    /// Absolute rigid cohomology of Frobenius data at a twist.
    AbsRigid {
        #[command(flatten)]
        input: InputArgs,
        /// Tate twist.
        #[arg(long, default_value_t = 0)]
        twist: i64,
    },
    /// Syntomic cohomology through the homotopy limit of the package fence.
    Holim {
        #[command(flatten)]
        input: InputArgs,
        /// Tate twist.
        #[arg(long, default_value_t = 0)]
        twist: i64,
    },
    /// Plain cohomology; Frobenius eigenvalues are listed when the input
    /// carries a Frobenius.
    Cohomology {
        #[command(flatten)]
        input: InputArgs,
    },
}

#[derive(Subcommand)]
enum Suite {
    /// Every suite, sharing the seed and sweep width.
    All(SweepArgs),
    /// Cone long exact sequences and the two cone conventions.
    ConeLes(SweepArgs),
    /// Truncated polynomial forms: stabilization scan, integration,
    /// products, volume integrals, Stokes.
    TsQuasiIso(TsArgs),
    /// Godement resolutions on small poset sites.
    Godement(GodementArgs),
    /// Degeneration sequences and the maps-from-the-unit route.
    Ses(SweepArgs),
    /// Graded-monoid, stability, and orientation checks with seeded
    /// defect detection.
    RingAxioms(RingAxiomArgs),
    /// Homotopy limit invariance under node replacement.
    HolimInvariance(HolimArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Seed for the case generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random cases.
    #[arg(long, default_value_t = 200)]
    cases: usize,
    /// Prime for Frobenius data.
    #[arg(long, default_value_t = 5)]
    prime: i64,
}

#[derive(Args)]
struct TsArgs {
    /// Seed for the sampled-forms sweep.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of sampled forms for the Stokes check.
    #[arg(long, default_value_t = 200)]
    cases: usize,
    /// Cosimplicial levels retained by the bar construction.
    #[arg(long, default_value_t = 5)]
    truncation_level: usize,
    /// Largest polynomial degree bound in the stabilization scan.
    #[arg(long, default_value_t = 2)]
    degree_bound: usize,
}

#[derive(Args)]
struct GodementArgs {
    /// Seed for the random sites and sheaves.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Resolution levels to build; the quasi-isomorphism margin is one
    /// below this.
    #[arg(long, default_value_t = 5)]
    truncation_level: usize,
}

#[derive(Args)]
struct RingAxiomArgs {
    /// Seed for defect placement.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Data model to check.
    #[arg(long, default_value = "derham-toy")]
    model: String,
    /// Inject a seeded defect (unit, mu, or orientation) before checking.
    #[arg(long, value_parser = parse_perturbation)]
    perturb: Option<Perturbation>,
}

#[derive(Args)]
struct HolimArgs {
    /// Seed for the fence generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random fences.
    #[arg(long, default_value_t = 50)]
    cases: usize,
}

#[derive(Subcommand)]
enum ExamplesAction {
    /// List the built-in examples.
    List,
    /// Print one example as JSON (byte-stable across runs).
    Export { name: String },
}

fn parse_perturbation(s: &str) -> Result<Perturbation, String> {
    Perturbation::from_str(s).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct TableRow {
    degree: i64,
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    eigenvalues: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    irrational_degree: Option<usize>,
}

#[derive(Serialize)]
struct TableOut<'a> {
    schema_version: u32,
    command: &'a str,
    subject: &'a str,
    source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    twist: Option<i64>,
    rows: Vec<TableRow>,
}

#[derive(Serialize)]
struct ReportOut<'a> {
    schema_version: u32,
    command: &'a str,
    suite: &'a str,
    seed: u64,
    report: &'a Report,
}

#[derive(Serialize)]
struct ExampleEntry {
    name: &'static str,
    note: &'static str,
}

#[derive(Serialize)]
struct ExamplesOut {
    schema_version: u32,
    command: &'static str,
    examples: Vec<ExampleEntry>,
}

#[derive(Serialize)]
struct ErrorOut<'a> {
    schema_version: u32,
    error: &'a str,
}

fn to_json(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

enum LoadedInput {
    Package(Box<SyntomicPackage>),
    Frob(FrobComplex),
    Plain(Complex),
}

fn load_input(input: &InputArgs) -> Result<(LoadedInput, String), String> {
    match (&input.example, &input.package) {
        (Some(name), None) => {
            let loaded = match builtin_example(name).map_err(|e| e.to_string())? {
                BuiltinExample::Package(pkg) => LoadedInput::Package(pkg),
                BuiltinExample::Frob(m) => LoadedInput::Frob(m),
            };
            Ok((loaded, format!("example {name}")))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            let value: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| format!("invalid JSON: {e}"))?;
            let loaded = if value.get("schema_version").is_some() {
                LoadedInput::Package(Box::new(
                    serde_json::from_value::<SyntomicPackage>(value)
                        .map_err(|e| format!("invalid package: {e}"))?,
                ))
            } else if value.get("phi").is_some() {
                LoadedInput::Frob(
                    serde_json::from_value::<FrobComplex>(value)
                        .map_err(|e| format!("invalid Frobenius complex: {e}"))?,
                )
            } else {
                LoadedInput::Plain(
                    serde_json::from_value::<Complex>(value)
                        .map_err(|e| format!("invalid complex: {e}"))?,
                )
            };
            Ok((loaded, format!("file {}", path.display())))
        }
        _ => Err("exactly one of --example or --package is required".into()),
    }
}

fn dims_rows(dims: &BTreeMap<i64, usize>) -> Vec<TableRow> {
    dims.iter()
        .map(|(&degree, &dim)| TableRow {
            degree,
            dim,
            eigenvalues: None,
            irrational_degree: None,
        })
        .collect()
}

fn frob_rows(m: &FrobComplex) -> Vec<TableRow> {
    let (lo, hi) = m.complex().support();
    (lo..=hi)
        .map(|degree| {
            let dim = m.complex().cohomology(degree).dim;
            let (roots, residual) = frobenius_eigenvalues(m, degree);
            let mut eigenvalues = Vec::new();
            for (value, mult) in roots {
                for _ in 0..mult {
                    eigenvalues.push(value.to_string());
                }
            }
            TableRow {
                degree,
                dim,
                eigenvalues: Some(eigenvalues),
                irrational_degree: Some(residual),
            }
        })
        .collect()
}

fn plain_rows(c: &Complex) -> Vec<TableRow> {
    let (lo, hi) = c.support();
    (lo..=hi)
        .map(|degree| TableRow {
            degree,
            dim: c.cohomology(degree).dim,
            eigenvalues: None,
            irrational_degree: None,
        })
        .collect()
}

fn print_table(rows: &[TableRow]) {
    let eigen = rows.iter().any(|r| r.eigenvalues.is_some());
    if eigen {
        println!("{:>6}  {:>9}  {}", "degree", "dimension", "frobenius eigenvalues");
    } else {
        println!("{:>6}  {:>9}", "degree", "dimension");
    }
    for r in rows {
        if let Some(values) = &r.eigenvalues {
            let mut shown =
                if values.is_empty() { "-".to_string() } else { values.join(", ") };
            if r.irrational_degree.unwrap_or(0) > 0 {
                shown.push_str(&format!(
                    " (+ irrational factor of degree {})",
                    r.irrational_degree.unwrap()
                ));
            }
            println!("{:>6}  {:>9}  {shown}", r.degree, r.dim);
        } else {
            println!("{:>6}  {:>9}", r.degree, r.dim);
        }
    }
}

fn emit_table(cli: &Cli, subject: &str, source: String, twist: Option<i64>, rows: Vec<TableRow>) {
    if cli.format == "json" {
        let out = TableOut {
            schema_version: SCHEMA_VERSION,
            command: "compute",
            subject,
            source,
            twist,
            rows,
        };
        println!("{}", to_json(&out));
    } else {
        print_table(&rows);
    }
}

fn check_prime(p: i64) -> Result<(), String> {
    if p < 2 {
        return Err(format!("--prime {p} is not a prime"));
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return Err(format!("--prime {p} is not a prime"));
        }
        d += 1;
    }
    Ok(())
}

fn run_compute(cli: &Cli, subject: &Subject) -> Result<ExitCode, String> {
    let (name, input, twist) = match subject {
        Subject::Syntomic { input, twist } => ("syntomic", input, Some(*twist)),
        Subject::AbsRigid { input, twist } => ("abs-rigid", input, Some(*twist)),
        Subject::Holim { input, twist } => ("holim", input, Some(*twist)),
        Subject::Cohomology { input } => ("cohomology", input, None),
    };
    let (loaded, source) = load_input(input)?;
    let rows = match (subject, &loaded) {
        (Subject::Syntomic { twist, .. }, LoadedInput::Package(pkg)) => {
            dims_rows(&syntomic_cone(pkg, *twist).map_err(|e| e.to_string())?)
        }
        (Subject::Holim { twist, .. }, LoadedInput::Package(pkg)) => {
            dims_rows(&syntomic_holim(pkg, *twist).map_err(|e| e.to_string())?)
        }
        (Subject::Syntomic { .. } | Subject::Holim { .. }, _) => {
            return Err(format!(
                "{source} has no de Rham filtration data; {name} needs a package"
            ));
        }
        (Subject::AbsRigid { twist, .. }, LoadedInput::Package(pkg)) => {
            dims_rows(&abs_rigid_dims(pkg.rig(), *twist))
        }
        (Subject::AbsRigid { twist, .. }, LoadedInput::Frob(m)) => {
            dims_rows(&abs_rigid_dims(m, *twist))
        }
        (Subject::AbsRigid { .. }, LoadedInput::Plain(_)) => {
            return Err(format!("{source} has no Frobenius data; abs-rigid needs one"));
        }
        (Subject::Cohomology { .. }, LoadedInput::Package(pkg)) => frob_rows(pkg.rig()),
        (Subject::Cohomology { .. }, LoadedInput::Frob(m)) => frob_rows(m),
        (Subject::Cohomology { .. }, LoadedInput::Plain(c)) => plain_rows(c),
    };
    emit_table(cli, name, source, twist, rows);
    Ok(ExitCode::SUCCESS)
}

fn run_verify(cli: &Cli, suite: &Suite) -> Result<ExitCode, String> {
    let (name, seed, report) = match suite {
        Suite::All(a) => {
            check_prime(a.prime)?;
            ("all", a.seed, suites::all_suites(a.seed, a.cases, a.prime))
        }
        Suite::ConeLes(a) => {
            check_prime(a.prime)?;
            ("cone-les", a.seed, suites::cone_les_suite(a.seed, a.cases, a.prime))
        }
        Suite::TsQuasiIso(a) => {
            let bounds: Vec<usize> = (0..=a.degree_bound).collect();
            (
                "ts-quasi-iso",
                a.seed,
                suites::ts_suite(a.truncation_level, &bounds, a.seed, a.cases),
            )
        }
        Suite::Godement(a) => {
            ("godement", a.seed, suites::godement_suite(a.seed, a.truncation_level))
        }
        Suite::Ses(a) => {
            check_prime(a.prime)?;
            ("ses", a.seed, suites::ses_suite(a.seed, a.cases, a.prime))
        }
        Suite::RingAxioms(a) => {
            let report = match a.perturb {
                None => suites::ring_axioms_suite(&a.model, a.seed),
                Some(what) => suites::perturbed_ring_axioms(&a.model, what, a.seed),
            };
            ("ring-axioms", a.seed, report)
        }
        Suite::HolimInvariance(a) => (
            "holim-invariance",
            a.seed,
            suites::holim_invariance_suite(a.seed, a.cases),
        ),
    };
    let report = report.map_err(|e| e.to_string())?;
    if cli.format == "json" {
        let out = ReportOut {
            schema_version: SCHEMA_VERSION,
            command: "verify",
            suite: name,
            seed,
            report: &report,
        };
        println!("{}", to_json(&out));
    } else {
        print!("{report}");
    }
    Ok(if report.is_ok() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn example_notes() -> Vec<ExampleEntry> {
    builtin_names()
        .into_iter()
        .map(|name| ExampleEntry {
            name,
            note: match name {
                "gm" => "one line in degrees 0 and 1, Frobenius weights 0 and 1",
                "p1" => "one line in degrees 0 and 2, Frobenius weights 0 and 1",
                "elliptic-mult" => {
                    "syntomic package of a curve with split multiplicative reduction"
                }
                "nodal-cubic" => {
                    "syntomic package of a nodal curve assembled from its hypercover"
                }
                _ => "built-in example",
            },
        })
        .collect()
}

fn run_examples(cli: &Cli, action: &ExamplesAction) -> Result<ExitCode, String> {
    match action {
        ExamplesAction::List => {
            let entries = example_notes();
            if cli.format == "json" {
                let out = ExamplesOut {
                    schema_version: SCHEMA_VERSION,
                    command: "examples",
                    examples: entries,
                };
                println!("{}", to_json(&out));
            } else {
                for e in entries {
                    println!("{:<14} {}", e.name, e.note);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        ExamplesAction::Export { name } => {
            let text = match builtin_example(name).map_err(|e| e.to_string())? {
                BuiltinExample::Package(pkg) => to_json(&pkg),
                BuiltinExample::Frob(m) => to_json(&m),
            };
            println!("{text}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, String> {
    match &cli.command {
        Command::Compute { subject } => run_compute(cli, subject),
        Command::Verify { suite } => run_verify(cli, suite),
        Command::Examples { action } => run_examples(cli, action),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(message) => {
            if cli.format == "json" {
                let out = ErrorOut { schema_version: SCHEMA_VERSION, error: &message };
                println!("{}", to_json(&out));
            }
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
