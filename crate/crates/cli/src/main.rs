use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use crnreal::milp::{export_lp, import_solution, Arithmetic, PivotRule, SolveOptions};
use crnreal::rational::{display, parse_rational};
use crnreal::realization::{certify, finish, model_for, verify_conjugacy, SupplementalCap};
use crnreal::{
    canonical_realization, deficiency_report, find, parse_network, parse_ode, write_network, FindOptions, FindOutcome, FindStatus,
    MassActionSystem, Mode, ModelConfig, PolynomialSystem, Rational, Theorem,
};
use serde_json::json;

/// Exit code for a certified realization or a certified conjugacy.
const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_LIMIT: u8 = 3;
const EXIT_REJECTED: u8 = 4;

/// Deficiency analysis of reaction networks and MILP search for realizations
/// satisfying the Deficiency One Theorem.
#[derive(Debug, Parser)]
#[command(name = "crnreal", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report n, l, s, deficiencies, terminal classes and theorem verdicts.
    Analyze {
        /// Network file, or `.ode` polynomial system (realized canonically).
        file: PathBuf,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Turn a mass-action-admissible polynomial system into its canonical network.
    Realize {
        ode: PathBuf,
        /// Write the network here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a dynamically equivalent or linearly conjugate realization.
    Find {
        file: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = SolverArg::Internal)]
        solver: SolverArg,
        /// External solution (`name value` lines) for `--solver lpfile`.
        #[arg(long, value_name = "SOLFILE")]
        solution: Option<PathBuf>,
        #[command(flatten)]
        solve: SolveArgs,
        /// Fresh-seed rebuilds after a certification failure.
        #[arg(long, default_value_t = crnreal::realization::search::DEFAULT_RETRIES)]
        retries: usize,
        /// Write the JSON result here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the target network file here.
        #[arg(long, value_name = "PATH")]
        network_out: Option<PathBuf>,
        /// Print the JSON result on standard output.
        #[arg(long)]
        json: bool,
    },
    /// Check that `target` is linearly conjugate to `original` under `x = diag(c) x*`.
    Verify {
        original: PathBuf,
        target: PathBuf,
        /// Conjugacy constants, comma separated; all ones when omitted.
        #[arg(long, value_delimiter = ',')]
        c: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t = TheoremArg::Dot)]
        theorem: TheoremArg,
        #[arg(long)]
        json: bool,
    },
    /// Write the realization MILP in LP format, or certify an external solution of it.
    ExportLp {
        file: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        /// Solution of the exported model to decode and certify.
        #[arg(long = "import", value_name = "SOLFILE")]
        import: Option<PathBuf>,
        /// LP file destination (standard output when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, clap::Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Conjugate)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = TheoremArg::Dot)]
    theorem: TheoremArg,
    /// Big-M parameter, a rational in (0, 1).
    #[arg(long, default_value = "0.1", allow_hyphen_values = true)]
    eps: String,
    /// Seed of the delta sampler.
    #[arg(long, env = "CRN_SEED", default_value_t = 0)]
    seed: u64,
    /// Cap supplemental flows at `C'/eps` instead of `C'`.
    #[arg(long)]
    scaled_supplemental: bool,
}

#[derive(Debug, clap::Args)]
struct SolveArgs {
    #[arg(long, value_enum, default_value_t = ArithmeticArg::Exact)]
    arithmetic: ArithmeticArg,
    #[arg(long, value_enum, default_value_t = PivotArg::Dantzig)]
    pivot: PivotArg,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    max_nodes: Option<usize>,
    /// Worker threads for the LP pivots; 1 is the determinism reference.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Dynequiv,
    Conjugate,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TheoremArg {
    Dot,
    Boros,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    Internal,
    Lpfile,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ArithmeticArg {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PivotArg {
    Bland,
    Dantzig,
}

impl From<TheoremArg> for Theorem {
    fn from(t: TheoremArg) -> Self {
        match t {
            TheoremArg::Dot => Theorem::Dot,
            TheoremArg::Boros => Theorem::Boros,
        }
    }
}

impl ModelArgs {
    fn config(&self) -> Result<ModelConfig> {
        let eps = parse_rational(&self.eps).with_context(|| format!("invalid --eps {}", self.eps))?;
        if eps <= Rational::from_integer(0.into()) || eps >= Rational::from_integer(1.into()) {
            bail!("--eps must lie strictly between 0 and 1, got {}", self.eps);
        }
        Ok(ModelConfig {
            eps,
            seed: self.seed,
            mode: match self.mode {
                ModeArg::Dynequiv => Mode::DynamicalEquivalence,
                ModeArg::Conjugate => Mode::LinearConjugacy,
            },
            theorem: self.theorem.into(),
            supplemental_cap: if self.scaled_supplemental { SupplementalCap::Scaled } else { SupplementalCap::Unit },
            deltas: None,
        })
    }
}

impl SolveArgs {
    fn options(&self) -> Result<SolveOptions> {
        if self.threads == 0 {
            bail!("--threads must be at least 1");
        }
        let time_limit = match self.time_limit {
            Some(t) if !(t > 0.0 && t.is_finite()) => bail!("--time-limit must be a positive number of seconds"),
            Some(t) => Some(Duration::from_secs_f64(t)),
            None => None,
        };
        Ok(SolveOptions {
            arithmetic: match self.arithmetic {
                ArithmeticArg::Exact => Arithmetic::Exact,
                ArithmeticArg::Float => Arithmetic::Float,
            },
            pivot_rule: match self.pivot {
                PivotArg::Bland => PivotRule::Bland,
                PivotArg::Dantzig => PivotRule::Dantzig,
            },
            max_nodes: self.max_nodes,
            time_limit,
            ..SolveOptions::default()
        })
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn is_ode(path: &Path) -> bool {
    path.extension().map_or(false, |e| e == "ode")
}

/// Network file, or the canonical realization of a `.ode` file.
fn load_system(path: &Path) -> Result<MassActionSystem> {
    let text = read(path)?;
    if is_ode(path) {
        let ode = parse_ode(&text).with_context(|| format!("{}", path.display()))?;
        Ok(canonical_realization(&ode)?)
    } else {
        parse_network(&text).with_context(|| format!("{}", path.display()))
    }
}

fn emit_json(value: &serde_json::Value, out: Option<&Path>, stdout: bool) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    if let Some(path) = out {
        write(path, &(text.clone() + "\n"))?;
    }
    if stdout {
        println!("{text}");
    }
    Ok(())
}

fn cmd_analyze(file: &Path, json: bool) -> Result<u8> {
    let sys = load_system(file)?;
    let report = deficiency_report(sys.network());
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("{}", report.summary());
    }
    Ok(EXIT_OK)
}

fn cmd_realize(ode: &Path, out: Option<&Path>) -> Result<u8> {
    let poly = parse_ode(&read(ode)?).with_context(|| format!("{}", ode.display()))?;
    let sys = canonical_realization(&poly)?;
    let back = PolynomialSystem::from_mass_action(&sys)?;
    if back.normalized() != poly.normalized() {
        bail!("canonical realization does not reproduce the input polynomials");
    }
    let text = write_network(&sys);
    match out {
        Some(path) => {
            write(path, &text)?;
            eprintln!(
                "{} complexes, {} reactions written to {}",
                sys.network().num_complexes(),
                sys.network().reactions().len(),
                path.display()
            );
        }
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

fn status_code(status: FindStatus) -> u8 {
    match status {
        FindStatus::Optimal | FindStatus::Feasible => EXIT_OK,
        FindStatus::Infeasible => EXIT_INFEASIBLE,
        FindStatus::Limit => EXIT_LIMIT,
    }
}

fn outcome_json(file: &Path, config: &ModelConfig, solver: &str, outcome: &FindOutcome) -> serde_json::Value {
    json!({
        "input": file.display().to_string(),
        "status": outcome.status,
        "solver": solver,
        "eps": display(&config.eps),
        "seed": outcome.seed,
        "attempts": outcome.attempts,
        "objective": outcome.objective.as_ref().map(display),
        "stats": outcome.stats,
        "result": outcome.result,
    })
}

fn report_outcome(outcome: &FindOutcome) {
    println!("status: {}", serde_json::to_value(outcome.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default());
    println!(
        "seed: {}, attempts: {}, nodes: {}, LP iterations: {}, {} ms",
        outcome.seed, outcome.attempts, outcome.stats.nodes, outcome.stats.lp_iterations, outcome.stats.elapsed_ms
    );
    if let Some(r) = &outcome.result {
        let c: Vec<String> = r.c.iter().map(display).collect();
        println!("c = ({})", c.join(", "));
        print!("{}", write_network(&r.target));
        println!("{}", r.verification.deficiency.summary());
        println!("certified: {}", if r.verification.certified { "yes" } else { "no" });
        for remark in &r.verification.remarks {
            println!("note: {remark}");
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_find(
    file: &Path,
    model: &ModelArgs,
    solver: SolverArg,
    solution: Option<&Path>,
    solve: &SolveArgs,
    retries: usize,
    out: Option<&Path>,
    network_out: Option<&Path>,
    json: bool,
) -> Result<u8> {
    let config = model.config()?;
    let options = solve.options()?;
    let sys = load_system(file)?;
    let outcome = match solver {
        SolverArg::Internal => {
            if solution.is_some() {
                bail!("--solution requires --solver lpfile");
            }
            let opts = FindOptions { config: config.clone(), solve: options, max_retries: retries };
            let pool = rayon::ThreadPoolBuilder::new().num_threads(solve.threads).build()?;
            pool.install(|| find(&sys, &opts))?
        }
        SolverArg::Lpfile => {
            let Some(path) = solution else { bail!("--solver lpfile needs --solution SOLFILE (write the model with export-lp)") };
            import_outcome(&sys, &config, &read(path)?, &options)?
        }
    };
    let solver_name = match solver {
        SolverArg::Internal => "internal",
        SolverArg::Lpfile => "lpfile",
    };
    let value = outcome_json(file, &config, solver_name, &outcome);
    emit_json(&value, out, json)?;
    if let (Some(path), Some(r)) = (network_out, &outcome.result) {
        write(path, &write_network(&r.target))?;
    }
    if !json {
        report_outcome(&outcome);
    }
    match &outcome.result {
        Some(r) if !r.verification.certified => Ok(EXIT_REJECTED),
        _ => Ok(status_code(outcome.status)),
    }
}

/// Decodes and certifies an external solution of the model built from `config`.
fn import_outcome(sys: &MassActionSystem, config: &ModelConfig, text: &str, options: &SolveOptions) -> Result<FindOutcome> {
    let rm = model_for(sys, config)?;
    let solution = import_solution(text, &rm.model, options)?;
    let result = finish(sys, &rm, &solution)?;
    Ok(FindOutcome {
        status: FindStatus::Feasible,
        result,
        seed: config.seed,
        attempts: 1,
        stats: solution.stats,
        objective: solution.objective,
    })
}

fn cmd_verify(original: &Path, target: &Path, c: Option<&[String]>, theorem: TheoremArg, json: bool) -> Result<u8> {
    let orig = load_system(original)?;
    let tgt = load_system(target)?;
    let c: Vec<Rational> = match c {
        Some(values) => values
            .iter()
            .map(|v| parse_rational(v.trim()).with_context(|| format!("invalid --c entry {v}")))
            .collect::<Result<_>>()?,
        None => vec![Rational::from_integer(1.into()); orig.num_species()],
    };
    if tgt.network().species_names() != orig.network().species_names() {
        bail!(
            "species differ: original has [{}], target has [{}]",
            orig.network().species_names().join(", "),
            tgt.network().species_names().join(", ")
        );
    }
    let check = verify_conjugacy(&orig, &tgt, &c)?;
    let report = certify(&orig, &tgt, &c, theorem.into())?;
    let conjugate = check.exact();
    if json {
        println!("{}", serde_json::to_string_pretty(&json!({ "conjugate": conjugate, "report": report }))?);
    } else {
        println!("linear conjugacy: {}", if conjugate { "certified" } else { "rejected" });
        println!("LC residual: {}", display(&check.lc_residual));
        match &check.vector_field_residual {
            Some(r) => println!("vector field residual: {} over {} points", display(r), check.points_checked),
            None => println!("vector field residual: not computed (non-integer stoichiometry)"),
        }
        println!("target: {}", report.deficiency.summary());
    }
    Ok(if conjugate { EXIT_OK } else { EXIT_REJECTED })
}

fn cmd_export_lp(file: &Path, model: &ModelArgs, import: Option<&Path>, out: Option<&Path>, json: bool) -> Result<u8> {
    let config = model.config()?;
    let sys = load_system(file)?;
    match import {
        None => {
            let rm = model_for(&sys, &config)?;
            let text = export_lp(&rm.model);
            match out {
                Some(path) => {
                    write(path, &text)?;
                    eprintln!(
                        "{} variables, {} constraints, {} linkage slots written to {}",
                        rm.model.num_vars(),
                        rm.model.constraints.len(),
                        rm.vars.slots,
                        path.display()
                    );
                }
                None => print!("{text}"),
            }
            Ok(EXIT_OK)
        }
        Some(sol) => {
            let outcome = import_outcome(&sys, &config, &read(sol)?, &SolveOptions::default())?;
            let value = outcome_json(file, &config, "lpfile", &outcome);
            emit_json(&value, out, json)?;
            if !json {
                report_outcome(&outcome);
            }
            let certified = outcome.result.as_ref().map_or(false, |r| r.verification.certified);
            Ok(if certified { EXIT_OK } else { EXIT_REJECTED })
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Analyze { file, json } => cmd_analyze(&file, json),
        Command::Realize { ode, out } => cmd_realize(&ode, out.as_deref()),
        Command::Find { file, model, solver, solution, solve, retries, out, network_out, json } => cmd_find(
            &file,
            &model,
            solver,
            solution.as_deref(),
            &solve,
            retries,
            out.as_deref(),
            network_out.as_deref(),
            json,
        ),
        Command::Verify { original, target, c, theorem, json } => cmd_verify(&original, &target, c.as_deref(), theorem, json),
        Command::ExportLp { file, model, import, out, json } => cmd_export_lp(&file, &model, import.as_deref(), out.as_deref(), json),
    }
}

fn main() -> ExitCode {
    // usage errors share the generic error code; 2 is reserved for infeasibility
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
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
