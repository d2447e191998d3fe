use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use quivsat::cnf::{parse_dimacs, preprocess, Assignment, Formula};
use quivsat::gf::FieldSpec;
use quivsat::harness::{
    decide_sat_with, emit_reduction, emit_report, root_class, tits_check, verify_formula, Format, Mode,
    VerificationReport, VerifyOptions, DEFAULT_ASSIGNMENT_BUDGET, DEFAULT_END_BUDGET, DEFAULT_SEARCH_SAMPLES,
};
use quivsat::quiver::{endomorphism_dimension, verify_decomposition};
use quivsat::reduction::{build_template, explicit_decomposition, find_falsified_witness, substitute};

/// Exit code for input, parse, and budget errors.
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "quivsat", version, about = "Reduce 3-CNF formulas to quiver representations and check the result")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Dot,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Dot => Format::Dot,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Sample,
}

#[derive(Subcommand)]
enum Command {
    /// Print the quiver and the symbolic representation of a formula.
    Reduce {
        /// DIMACS file, or `-` for stdin.
        dimacs: PathBuf,
        /// Field: a prime `p` or a prime power `p^d`.
        #[arg(long, default_value = "2")]
        field: FieldSpec,
        #[arg(long, value_enum, default_value = "json")]
        out: OutFormat,
    },
    /// Evaluate one assignment and certify the representation it gives.
    Check {
        dimacs: PathBuf,
        /// Comma-separated element codes, one per input variable (or per
        /// preprocessed variable).
        #[arg(long, value_delimiter = ',', required = true)]
        assign: Vec<u64>,
        #[arg(long, default_value = "2")]
        field: FieldSpec,
    },
    /// Check the reduction on every (or a sample of) assignment(s).
    /// Exits with 2 when any assignment violates the expected certificate.
    Verify {
        dimacs: PathBuf,
        #[arg(long, default_value = "2")]
        field: FieldSpec,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: ModeArg,
        /// Seed for sample mode.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exhaustive: maximum number of assignments. Sample: number of draws.
        #[arg(long)]
        budget: Option<u64>,
        /// Largest endomorphism space enumerated exhaustively.
        #[arg(long, default_value_t = DEFAULT_END_BUDGET)]
        end_budget: u64,
        #[arg(long, value_enum, default_value = "json")]
        out: OutFormat,
    },
    /// Decide satisfiability through indecomposability. Exits 0 when
    /// satisfiable and 1 when not.
    Sat {
        dimacs: PathBuf,
        #[arg(long, default_value = "2")]
        field: FieldSpec,
        #[arg(long, default_value_t = DEFAULT_ASSIGNMENT_BUDGET)]
        budget: u64,
    },
    /// Dimension vector, Tits form values, and root classification.
    Root {
        dimacs: PathBuf,
        #[arg(long, default_value = "2")]
        field: FieldSpec,
    },
}

/// 0 when every assignment got its expected certificate, 2 otherwise.
fn verify_exit_code(report: &VerificationReport) -> u8 {
    if report.violations().next().is_some() {
        2
    } else {
        0
    }
}

fn read_formula(path: &Path) -> Result<Formula> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading stdin")?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    parse_dimacs(&text).with_context(|| format!("parsing {}", path.display()))
}

fn check(formula: &Formula, field: &FieldSpec, codes: &[u64]) -> Result<serde_json::Value> {
    let pf = preprocess(formula);
    let given = Assignment::from_codes(field, codes)?;
    let x = if given.len() == pf.num_vars() {
        given
    } else if given.len() == formula.num_vars() {
        pf.lift_assignment(&given)?
    } else {
        bail!(
            "expected {} values (input variables) or {} (preprocessed variables), got {}",
            formula.num_vars(),
            pf.num_vars(),
            given.len()
        );
    };
    if pf.num_clauses() == 0 {
        return Ok(json!({ "evaluates": true, "certificate": "empty-formula" }));
    }
    let t = build_template(&pf, field)?;
    let evaluates = pf.evaluate(&x, field)?;
    let r = substitute(&t, &x)?;
    let end_dim = endomorphism_dimension(&r);
    let mut out = json!({
        "assignment": x.codes(),
        "evaluates": evaluates,
        "end_dim": end_dim,
        "dims": t.dims(),
    });
    match find_falsified_witness(&t, &x)? {
        Some((k, l)) => {
            let w = explicit_decomposition(&t, &x, k, l)?;
            out["certificate"] = json!("explicit-decomposition");
            out["verified"] = json!(verify_decomposition(&r, &w)?);
            out["clause"] = json!(k + 1);
            out["block"] = json!(l + 1);
            out["first_dims"] = json!(w.first_dims());
            out["second_dims"] = json!(w.second_dims());
        }
        None => {
            out["certificate"] = json!(if end_dim == 1 { "schur" } else { "none" });
        }
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Reduce { dimacs, field, out } => {
            let f = preprocess(&read_formula(&dimacs)?);
            if f.num_clauses() == 0 {
                bail!("every clause is a tautology; there is nothing to reduce");
            }
            let t = build_template(&f, &field)?;
            print!("{}", emit_reduction(&t, out.into()));
            if matches!(out, OutFormat::Json) {
                println!();
            }
            Ok(0)
        }
        Command::Check { dimacs, assign, field } => {
            let f = read_formula(&dimacs)?;
            println!("{}", serde_json::to_string_pretty(&check(&f, &field, &assign)?)?);
            Ok(0)
        }
        Command::Verify { dimacs, field, mode, seed, budget, end_budget, out } => {
            let f = read_formula(&dimacs)?;
            let mode = match mode {
                ModeArg::Exhaustive => Mode::Exhaustive { budget: budget.unwrap_or(DEFAULT_ASSIGNMENT_BUDGET) },
                ModeArg::Sample => Mode::Sample { count: budget.unwrap_or(1000), seed },
            };
            let opts = VerifyOptions { mode, end_budget, search_samples: DEFAULT_SEARCH_SAMPLES, scheme: None };
            let report = verify_formula(&f, &field, &opts)?;
            print!("{}", emit_report(&report, out.into()));
            if matches!(out, OutFormat::Json) {
                println!();
            }
            Ok(verify_exit_code(&report))
        }
        Command::Sat { dimacs, field, budget } => {
            let f = read_formula(&dimacs)?;
            let v = decide_sat_with(&f, &field, budget)?;
            if v.satisfiable {
                println!("s SATISFIABLE");
                let w = v.original_witness.expect("witness for satisfiable verdict");
                let codes: Vec<String> = w.codes().iter().map(u32::to_string).collect();
                println!("v {}", codes.join(" "));
                Ok(0)
            } else {
                println!("s UNSATISFIABLE");
                Ok(1)
            }
        }
        Command::Root { dimacs, field } => {
            let f = preprocess(&read_formula(&dimacs)?);
            if f.num_clauses() == 0 {
                bail!("every clause is a tautology; there is no quiver");
            }
            let t = build_template(&f, &field)?;
            let tits = tits_check(&t)?;
            let out = json!({
                "dim_vector": t.dims(),
                "gram_value": tits.gram_value,
                "closed_form": tits.closed_form,
                "pairings_match": tits.pairings_match,
                "root_class": root_class(&t)?,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
