//! `pvcsp`: solve, check, construct, compare and generate.
//!
//! Exit codes: 0 YES / holds, 1 NO / fails / disagreement, 2 input error,
//! 3 internal invariant violation.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pvcsp_core::compare::compare_cases;
use pvcsp_core::format::{
    as_frachom, parse_instance, parse_measure, parse_structure, print_frachom, print_instance, print_measure,
    print_structure,
};
use pvcsp_core::gen::{batch, Family};
use pvcsp_core::oracle::{pvcsp_oracle, OracleClass};
use pvcsp_core::relax::{solve, Algorithm, SolveAnswer, Verdict};
use pvcsp_core::theory::{
    block_multiset_structure_capped, check_fractional_homomorphism_capped, check_promise_fpol_capped,
    compose_sampling_fpol, find_frachom_lp, find_promise_fpol_lp_capped, fpol_from_frachom, lift_fpol_to_frachom,
    symmetrize_input_weights, BlockPartition, CheckOutcome,
};
use pvcsp_core::{guard, Error, Instance, PromiseTemplate, ValuedStructure};

#[derive(Parser)]
#[command(name = "pvcsp", version, about = "Exact relaxations for promise valued CSPs")]
struct Cli {
    /// Step cap for exhaustive enumerations (overrides PVCSP_CAP).
    #[arg(long, global = true)]
    cap: Option<u128>,
    /// Structured output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide an instance.
    Solve(SolveArgs),
    /// Verify a fractional homomorphism (arity 1) or polymorphism.
    Check(CheckArgs),
    /// Build a derived structure or measure.
    Construct(ConstructArgs),
    /// Run engines against the oracle on a generated batch.
    Compare(CompareArgs),
    /// Write a generated batch.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Combined,
    Blp,
    Aip,
    Oracle,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    structure: PathBuf,
    /// Relaxed template, used by the oracle only. Defaults to the structure.
    #[arg(long)]
    gamma: Option<PathBuf>,
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "combined")]
    algorithm: Engine,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    structure: PathBuf,
    #[arg(long)]
    gamma: Option<PathBuf>,
    #[arg(long)]
    measure: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    Multiset,
    Bimultiset,
    Lift,
    Unlift,
    Compose,
    Symmetrize,
    FindFrachom,
    FindFpol,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(value_enum)]
    kind: Construction,
    #[arg(long)]
    structure: Option<PathBuf>,
    #[arg(long)]
    gamma: Option<PathBuf>,
    #[arg(long)]
    measure: Option<PathBuf>,
    /// Arity-1 measure used as the sampling homomorphism in `compose`.
    #[arg(long)]
    frachom: Option<PathBuf>,
    /// Block sizes, e.g. `sizes:2,1`.
    #[arg(long)]
    partition: Option<String>,
    /// Polymorphism arity for `find-fpol` when no partition is given.
    #[arg(long)]
    arity: Option<usize>,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    family: Family,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    count: u64,
    /// Comma-separated engines.
    #[arg(long, value_delimiter = ',', default_value = "combined")]
    algorithm: Vec<EngineName>,
    /// Record disagreements without failing.
    #[arg(long)]
    expect_weak: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineName {
    Combined,
    Blp,
    Aip,
}

impl From<EngineName> for Algorithm {
    fn from(e: EngineName) -> Self {
        match e {
            EngineName::Combined => Algorithm::Combined,
            EngineName::Blp => Algorithm::BlpOnly,
            EngineName::Aip => Algorithm::AipOnly,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    family: Family,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// Directory for one file set per case; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Invariant(_) | Error::IndexMisalignment => Failure::Invariant(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load<T>(path: &Path, parse: impl Fn(&str) -> pvcsp_core::Result<T>) -> Result<T, Failure> {
    parse(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn required<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, Failure> {
    p.as_deref()
        .ok_or_else(|| Failure::Input(format!("--{flag} is required")))
}

fn template(structure: &Path, gamma: Option<&Path>) -> Result<PromiseTemplate, Failure> {
    let delta = load(structure, parse_structure)?;
    match gamma {
        Some(g) => Ok(PromiseTemplate::new(delta, load(g, parse_structure)?)?),
        None => Ok(PromiseTemplate::diagonal(delta)),
    }
}

fn parse_partition(text: &str) -> Result<BlockPartition, Failure> {
    let bad = || Failure::Input(format!("partition `{text}`: expected `sizes:a,b,...`"));
    let list = text.strip_prefix("sizes:").ok_or_else(bad)?;
    let sizes = list
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BlockPartition::from_sizes(&sizes)?)
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
    } else {
        print!("{}", text());
    }
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render_answer(a: &SolveAnswer) -> String {
    let t = &a.trace;
    let mut s = String::new();
    let _ = writeln!(s, "algorithm      {}", t.algorithm);
    let _ = writeln!(s, "threshold      {}", pvcsp_core::arith::format_rational(&t.threshold));
    let _ = writeln!(
        s,
        "columns        {} ({} outside the domain)",
        t.columns, t.domain_eliminated
    );
    let _ = writeln!(s, "rows           {}", t.rows);
    if let Some(v) = &t.blp_value {
        let _ = writeln!(s, "blp value      {v}");
    }
    if let Some(p) = &t.star {
        let _ = writeln!(s, "star point     {p}");
    }
    if t.star.is_some() {
        let _ = writeln!(s, "refinement     {} columns removed", t.refinement_eliminated.len());
        for c in &t.refinement_eliminated {
            let _ = writeln!(s, "  - {c}");
        }
    }
    if let Some(v) = &t.aff_value {
        let _ = writeln!(s, "aip value      {v}");
    }
    let _ = writeln!(s, "{}", a.verdict);
    s
}

fn cmd_solve(args: &SolveArgs, json: bool) -> Outcome {
    let tpl = template(&args.structure, args.gamma.as_deref())?;
    let instance: Instance = load(&args.instance, parse_instance)?;
    let algorithm = match args.algorithm {
        Engine::Combined => Algorithm::Combined,
        Engine::Blp => Algorithm::BlpOnly,
        Engine::Aip => Algorithm::AipOnly,
        Engine::Oracle => {
            let class = pvcsp_oracle(&tpl, &instance)?;
            #[derive(Serialize)]
            struct Report {
                oracle: OracleClass,
            }
            emit(json, &Report { oracle: class }, || format!("{class}\n"));
            return Ok(u8::from(class == OracleClass::No));
        }
    };
    let answer = solve(algorithm, &tpl.delta, &instance)?;
    emit(json, &answer, || render_answer(&answer));
    Ok(u8::from(answer.verdict == Verdict::No))
}

fn render_check(c: &CheckOutcome) -> String {
    let mut s = format!("{} inequalities checked\n", c.checked);
    match &c.violation {
        None => s.push_str("holds\n"),
        Some(v) => {
            let tuples: Vec<String> = v.tuples.iter().map(|t| format!("({})", t.join(","))).collect();
            let _ = writeln!(
                s,
                "violated at {} {}: {} > {}",
                v.symbol,
                tuples.join(" "),
                v.lhs,
                v.rhs
            );
        }
    }
    s
}

fn cmd_check(args: &CheckArgs, json: bool, cap: u128) -> Outcome {
    let tpl = template(&args.structure, args.gamma.as_deref())?;
    let omega = load(&args.measure, parse_measure)?;
    let outcome = if omega.arity == 1 {
        check_fractional_homomorphism_capped(&as_frachom(&omega)?, &tpl.delta, &tpl.gamma, cap)?
    } else {
        check_promise_fpol_capped(&omega, &tpl, cap)?
    };
    emit(json, &outcome, || render_check(&outcome));
    Ok(u8::from(!outcome.holds))
}

fn cmd_construct(args: &ConstructArgs, cap: u128) -> Outcome {
    let partition = || {
        parse_partition(
            args.partition
                .as_deref()
                .ok_or_else(|| Failure::Input("--partition is required".into()))?,
        )
    };
    let structure = || load(required(&args.structure, "structure")?, parse_structure);
    let tpl = || template(required(&args.structure, "structure")?, args.gamma.as_deref());
    let measure = |p: &Option<PathBuf>, flag| load(required(p, flag)?, parse_measure);
    let text = match args.kind {
        Construction::Multiset | Construction::Bimultiset => {
            let p = partition()?;
            let want = if matches!(args.kind, Construction::Multiset) {
                1
            } else {
                2
            };
            if p.blocks().len() != want {
                return Err(Failure::Input(format!("this construction takes {want} block(s)")));
            }
            print_structure(&block_multiset_structure_capped(&structure()?, &p, cap)?)
        }
        Construction::Lift => {
            let omega = measure(&args.measure, "measure")?;
            print_frachom(&lift_fpol_to_frachom(&omega, &partition()?, &tpl()?)?)
        }
        Construction::Unlift => {
            let chi = as_frachom(&measure(&args.measure, "measure")?)?;
            print_measure(&fpol_from_frachom(&chi, &partition()?, &structure()?)?)
        }
        Construction::Compose => {
            let chi = as_frachom(&measure(&args.frachom, "frachom")?)?;
            let omega = measure(&args.measure, "measure")?;
            print_measure(&compose_sampling_fpol(&chi, &omega)?)
        }
        Construction::Symmetrize => {
            let omega = measure(&args.measure, "measure")?;
            print_measure(&symmetrize_input_weights(&omega, &partition()?)?)
        }
        Construction::FindFrachom => {
            let t = tpl()?;
            match find_frachom_lp(&t.delta, &t.gamma)? {
                Some(chi) => print_frachom(&chi),
                None => {
                    eprintln!("no fractional homomorphism exists");
                    return Ok(1);
                }
            }
        }
        Construction::FindFpol => {
            let p = args.partition.as_deref().map(parse_partition).transpose()?;
            let m = match (&p, args.arity) {
                (Some(p), Some(m)) if p.arity() != m => {
                    return Err(Failure::Input(format!("--arity {m} disagrees with the partition")))
                }
                (Some(p), _) => p.arity(),
                (None, Some(m)) => m,
                (None, None) => return Err(Failure::Input("--arity or --partition is required".into())),
            };
            match find_promise_fpol_lp_capped(&tpl()?, m, p.as_ref(), cap)? {
                Some(omega) => print_measure(&omega),
                None => {
                    eprintln!("no polymorphism of this shape exists");
                    return Ok(1);
                }
            }
        }
    };
    write_output(&args.out, &text)?;
    Ok(0)
}

fn cmd_compare(args: &CompareArgs, json: bool) -> Outcome {
    let cases = batch(args.family, args.seed, args.count)?;
    let engines: Vec<Algorithm> = args.algorithm.iter().map(|&e| e.into()).collect();
    let label = format!("{} seed={} count={}", args.family, args.seed, args.count);
    let report = compare_cases(&label, &cases, &engines)?;
    emit(json, &report, || report.render_text());
    if report.errors() > 0 {
        return Err(Failure::Invariant(format!("{} engine failures", report.errors())));
    }
    Ok(u8::from(report.disagreements() > 0 && !args.expect_weak))
}

fn case_text(delta: &ValuedStructure, gamma: &ValuedStructure, instance: &Instance) -> [(String, String); 3] {
    [
        ("delta".into(), print_structure(delta)),
        ("gamma".into(), print_structure(gamma)),
        ("instance".into(), print_instance(instance)),
    ]
}

fn cmd_gen(args: &GenArgs) -> Outcome {
    let cases = batch(args.family, args.seed, args.count)?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    }
    for (i, case) in cases.iter().enumerate() {
        for (kind, text) in case_text(&case.template.delta, &case.template.gamma, &case.instance) {
            match &args.out {
                Some(dir) => {
                    let path = dir.join(format!("case{i:04}.{kind}"));
                    fs::write(&path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                }
                None => print!("# case {i} {kind}\n{text}"),
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cap = cli.cap.unwrap_or_else(guard::default_cap);
    if let Some(c) = cli.cap {
        // Routines without an explicit cap parameter read the environment.
        std::env::set_var("PVCSP_CAP", c.to_string());
    }
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, cli.json),
        Command::Check(a) => cmd_check(a, cli.json, cap),
        Command::Construct(a) => cmd_construct(a, cap),
        Command::Compare(a) => cmd_compare(a, cli.json),
        Command::Gen(a) => cmd_gen(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
