//! Command-line front end. Every command prints one JSON [`RunReport`] on
//! standard output and maps its outcome to an exit code:
//! 0 success, 1 hypothesis or verification failure, 2 no group inverse,
//! 3 I/O or malformed input.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::conditions::{check_conditions_with_lambda, ConditionId};
use crate::error::Error;
use crate::formulas::{
    run_formula, BlockPair, Diagnostics, FormulaOutput, GroupOutcome, InverseKind, NoGroupInverse, Pattern, TheoremId,
    Truncation,
};
use crate::generator::{example_45, generate, GeneratorRecipe};
use crate::ginv::drazin;
use crate::matrix::{c, Matrix, C64, DEFAULT_TOL};
use crate::oracle::{compare, ComparisonVerdict, COMPARE_TOL};
use crate::report::{extended_f64, ConditionReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_NO_GROUP_INVERSE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "gdrazin", version, about = "Drazin and group inverses of 2x2 block matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Drazin inverse, index and spectral idempotent of one matrix.
    Drazin {
        /// Matrix file (`{"rows", "cols", "data": [[[re, im], ...], ...]}`).
        #[arg(long)]
        input: PathBuf,
        /// Relative rank tolerance.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Closed-form inverse of a block matrix built from E and F.
    Block(BlockArgs),
    /// Write a generated (E, F) pair.
    Gen {
        #[arg(long)]
        theorem: TheoremId,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Condition to break on purpose, e.g. `E^piF^pi`.
        #[arg(long)]
        violate: Option<ConditionId>,
        #[arg(long)]
        e_out: PathBuf,
        #[arg(long)]
        f_out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Compare formulas with the oracle on generated instances.
    Sweep {
        /// Theorem to sweep; all of them when omitted.
        #[arg(long)]
        theorem: Option<TheoremId>,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative Frobenius tolerance for the comparison.
        #[arg(long, default_value_t = COMPARE_TOL)]
        tol: f64,
        /// Relative rank tolerance for the computations.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        compute_tol: f64,
    },
}

#[derive(Args, Debug)]
struct BlockArgs {
    #[arg(long)]
    theorem: TheoremId,
    #[arg(long, required_unless_present = "fixture")]
    e: Option<PathBuf>,
    #[arg(long, required_unless_present = "fixture")]
    f: Option<PathBuf>,
    /// Built-in pair instead of files (`example45`).
    #[arg(long, conflicts_with_all = ["e", "f"])]
    fixture: Option<String>,
    /// Expected layout; must match the theorem's.
    #[arg(long)]
    pattern: Option<Pattern>,
    /// Also compare with the oracle.
    #[arg(long)]
    verify: bool,
    /// `λ` for `EF = λFE`, as `re` or `re,im`; fitted when omitted.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<Scalar>,
    /// Relative rank and hypothesis tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Relative Frobenius tolerance for `--verify`.
    #[arg(long, default_value_t = COMPARE_TOL)]
    compare_tol: f64,
}

/// A complex number written `re` or `re,im`.
#[derive(Clone, Copy, Debug)]
struct Scalar(C64);

impl FromStr for Scalar {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
        match s.split_once(',') {
            Some((re, im)) => Ok(Scalar(c(parse(re)?, parse(im)?))),
            None => Ok(Scalar(c(parse(s)?, 0.0))),
        }
    }
}

/// How a command ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Ok,
    HypothesisFailure,
    VerificationFailure,
    NoGroupInverse,
    Infeasible,
    InputError,
    NumericalError,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => EXIT_OK,
            Outcome::HypothesisFailure
            | Outcome::VerificationFailure
            | Outcome::Infeasible
            | Outcome::NumericalError => EXIT_FAILURE,
            Outcome::NoGroupInverse => EXIT_NO_GROUP_INVERSE,
            Outcome::InputError => EXIT_INPUT,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrazinOutput {
    pub drazin: Matrix,
    pub index: usize,
    pub idempotent: Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultBlocks {
    pub kind: InverseKind,
    pub top_left: Matrix,
    pub top_right: Matrix,
    pub bottom_left: Matrix,
    pub bottom_right: Matrix,
    pub assembled: Matrix,
}

impl ResultBlocks {
    fn new(kind: InverseKind, assembled: Matrix) -> Self {
        let [top_left, top_right, bottom_left, bottom_right] = assembled.quarters();
        Self {
            kind,
            top_left,
            top_right,
            bottom_left,
            bottom_right,
            assembled,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theorem: TheoremId,
    pub instances: usize,
    #[serde(with = "extended_f64")]
    pub max_relative_error: f64,
    pub failures: usize,
    /// Instances whose route checks flagged a printed-formula discrepancy.
    pub display_discrepancies: usize,
    /// Seeds of failing instances (first few).
    pub failing_seeds: Vec<u64>,
}

/// Everything a command reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: Vec<String>,
    /// SHA-256 of the canonical JSON of the command's inputs.
    pub inputs_digest: String,
    pub outcome: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditions: Option<ConditionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drazin: Option<DrazinOutput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<ResultBlocks>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub no_group_inverse: Option<NoGroupInverse>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated: Option<BlockPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepRow>>,
    pub wall_time_ms: f64,
}

impl RunReport {
    fn new(command: Vec<String>, digest: String) -> Self {
        Self {
            command,
            inputs_digest: digest,
            outcome: Outcome::Ok,
            error: None,
            conditions: None,
            drazin: None,
            result: None,
            no_group_inverse: None,
            comparison: None,
            diagnostics: None,
            truncation: None,
            generated: None,
            sweep: None,
            wall_time_ms: 0.0,
        }
    }

    fn fail(&mut self, err: &Error) {
        self.outcome = outcome_of(err);
        self.error = Some(err.to_string());
        if let Error::Hypothesis { report, .. } = err {
            self.conditions = Some(report.clone());
        }
    }
}

fn outcome_of(err: &Error) -> Outcome {
    match err {
        Error::Hypothesis { .. } => Outcome::HypothesisFailure,
        Error::NoGroupInverse { .. } => Outcome::NoGroupInverse,
        Error::Infeasible(_) => Outcome::Infeasible,
        Error::Singular { .. } | Error::RecursionDepth { .. } => Outcome::NumericalError,
        Error::ShapeMismatch { .. }
        | Error::NotSquare { .. }
        | Error::NonFinite { .. }
        | Error::DataLength { .. }
        | Error::BadTolerance(_) => Outcome::InputError,
    }
}

/// What a finished command produced.
#[derive(Debug)]
pub struct Execution {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `args` (including the program name) and runs the command.
pub fn execute<I, T>(args: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let echo: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Execution {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                Execution {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    let start = Instant::now();
    let mut stderr = String::new();
    let mut report = match cli.command {
        Command::Drazin { input, tol } => cmd_drazin(echo, &input, tol),
        Command::Block(args) => cmd_block(echo, &args),
        Command::Gen {
            theorem,
            n,
            seed,
            violate,
            e_out,
            f_out,
            tol,
        } => {
            let recipe = GeneratorRecipe {
                theorem,
                dimension: n,
                seed,
                violate,
            };
            cmd_gen(echo, &recipe, &e_out, &f_out, tol)
        }
        Command::Sweep {
            theorem,
            count,
            nmax,
            seed,
            tol,
            compute_tol,
        } => {
            let theorems = theorem.map_or_else(|| TheoremId::ALL.to_vec(), |t| vec![t]);
            let report = cmd_sweep(echo, &theorems, count, nmax, seed, tol, compute_tol);
            if let Some(rows) = &report.sweep {
                stderr = sweep_table(rows);
            }
            report
        }
    };
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    if let Some(err) = &report.error {
        stderr.push_str(&format!("error: {err}\n"));
    }
    let stdout = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
    Execution {
        stdout,
        stderr,
        code: report.outcome.exit_code(),
    }
}

fn digest<T: Serialize + ?Sized>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("inputs serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Reads a matrix file.
pub fn read_matrix(path: &Path) -> Result<Matrix, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Writes a matrix file; numbers use the shortest representation that
/// reads back exactly.
pub fn write_matrix(path: &Path, m: &Matrix) -> Result<(), String> {
    let text = serde_json::to_string_pretty(m).expect("matrices serialize") + "\n";
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn input_error(echo: Vec<String>, digest: String, msg: String) -> RunReport {
    let mut report = RunReport::new(echo, digest);
    report.outcome = Outcome::InputError;
    report.error = Some(msg);
    report
}

fn cmd_drazin(echo: Vec<String>, input: &Path, tol: f64) -> RunReport {
    let a = match read_matrix(input) {
        Ok(a) => a,
        Err(msg) => return input_error(echo, digest(&input.display().to_string()), msg),
    };
    let mut report = RunReport::new(echo, digest(&(&a, tol)));
    match drazin(&a, tol) {
        Ok(d) => {
            report.drazin = Some(DrazinOutput {
                drazin: d.drazin,
                index: d.index,
                idempotent: d.idempotent,
            })
        }
        Err(e) => report.fail(&e),
    }
    report
}

fn load_pair(args: &BlockArgs) -> Result<BlockPair, String> {
    if let Some(name) = &args.fixture {
        return match name.to_ascii_lowercase().as_str() {
            "example45" => Ok(example_45()),
            other => Err(format!("unknown fixture {other:?}; available: example45")),
        };
    }
    let e = read_matrix(args.e.as_deref().ok_or("missing --e")?)?;
    let f = read_matrix(args.f.as_deref().ok_or("missing --f")?)?;
    BlockPair::new(e, f, args.theorem.pattern()).map_err(|e| e.to_string())
}

fn cmd_block(echo: Vec<String>, args: &BlockArgs) -> RunReport {
    let theorem = args.theorem;
    let lambda = args.lambda.map(|s| s.0);
    if let Some(p) = args.pattern {
        if p != theorem.pattern() {
            let msg = format!("{theorem} is stated for pattern {}, not {p}", theorem.pattern());
            return input_error(echo, digest(&msg), msg);
        }
    }
    let mut pair = match load_pair(args) {
        Ok(p) => p,
        Err(msg) => return input_error(echo, digest(&msg), msg),
    };
    pair.pattern = theorem.pattern();
    let mut report = RunReport::new(echo, digest(&(&pair, theorem, lambda.map(|z| [z.re, z.im]), args.tol)));
    match check_conditions_with_lambda(&pair.e, &pair.f, theorem, lambda, args.tol) {
        Ok(c) => report.conditions = Some(c),
        Err(e) => {
            report.fail(&e);
            return report;
        }
    }
    let output = match run_formula(theorem, &pair.e, &pair.f, lambda, args.tol) {
        Ok(o) => o,
        Err(e) => {
            report.fail(&e);
            return report;
        }
    };
    let kind = match &output {
        FormulaOutput::Blocks(b) => {
            report.truncation = Some(b.truncation.clone());
            b.kind
        }
        FormulaOutput::Group(_) => InverseKind::Group,
    };
    report.diagnostics = output.diagnostics().cloned();
    match output.assembled() {
        Some(value) => {
            if args.verify {
                match compare(&value, kind, &pair, args.compare_tol) {
                    Ok(v) => {
                        if !v.pass {
                            report.outcome = Outcome::VerificationFailure;
                        }
                        report.comparison = Some(v);
                    }
                    Err(e) => report.fail(&e),
                }
            }
            report.result = Some(ResultBlocks::new(kind, value));
        }
        None => {
            if let FormulaOutput::Group(GroupOutcome::NoGroupInverse(no)) = output {
                report.no_group_inverse = Some(no);
            }
            report.outcome = Outcome::NoGroupInverse;
            if args.verify {
                match drazin(&crate::oracle::assemble(&pair), DEFAULT_TOL) {
                    Ok(d) if d.index <= 1 => {
                        report.outcome = Outcome::VerificationFailure;
                        report.error = Some(format!(
                            "formula reports no group inverse but the oracle index is {}",
                            d.index
                        ));
                    }
                    Ok(_) => {}
                    Err(e) => report.fail(&e),
                }
            }
        }
    }
    report
}

fn cmd_gen(echo: Vec<String>, recipe: &GeneratorRecipe, e_out: &Path, f_out: &Path, tol: f64) -> RunReport {
    let mut report = RunReport::new(echo, digest(recipe));
    let pair = match generate(recipe) {
        Ok(p) => p,
        Err(e) => {
            report.fail(&e);
            return report;
        }
    };
    match check_conditions_with_lambda(&pair.e, &pair.f, recipe.theorem, None, tol) {
        Ok(c) => report.conditions = Some(c),
        Err(e) => report.fail(&e),
    }
    for (path, m) in [(e_out, &pair.e), (f_out, &pair.f)] {
        if let Err(msg) = write_matrix(path, m) {
            report.outcome = Outcome::InputError;
            report.error = Some(msg);
            return report;
        }
    }
    report.generated = Some(pair);
    report
}

/// Formula-versus-oracle statistics for one theorem.
pub fn sweep_theorem(theorem: TheoremId, count: usize, nmax: usize, seed: u64, tol: f64, compute_tol: f64) -> SweepRow {
    let mut row = SweepRow {
        theorem,
        instances: 0,
        max_relative_error: 0.0,
        failures: 0,
        display_discrepancies: 0,
        failing_seeds: Vec::new(),
    };
    let nmax = nmax.max(1);
    for i in 0..count {
        let s = seed.wrapping_add(i as u64);
        let pair = if i == 0 && theorem == TheoremId::Thm41 {
            Ok(example_45())
        } else {
            generate(&GeneratorRecipe::new(theorem, 1 + i % nmax, s))
        };
        row.instances += 1;
        let error = pair.and_then(|pair| {
            let out = run_formula(theorem, &pair.e, &pair.f, None, compute_tol)?;
            if out.diagnostics().is_some_and(Diagnostics::has_discrepancy) {
                row.display_discrepancies += 1;
            }
            let kind = match &out {
                FormulaOutput::Blocks(b) => b.kind,
                FormulaOutput::Group(_) => InverseKind::Group,
            };
            match out.assembled() {
                Some(value) => Ok(compare(&value, kind, &pair, tol)?.relative_error),
                None => Ok(f64::INFINITY),
            }
        });
        let err = error.unwrap_or(f64::INFINITY);
        row.max_relative_error = row.max_relative_error.max(err);
        if err.is_nan() || err > tol {
            row.failures += 1;
            if row.failing_seeds.len() < 10 {
                row.failing_seeds.push(s);
            }
        }
    }
    row
}

fn cmd_sweep(
    echo: Vec<String>,
    theorems: &[TheoremId],
    count: usize,
    nmax: usize,
    seed: u64,
    tol: f64,
    compute_tol: f64,
) -> RunReport {
    let mut report = RunReport::new(echo, digest(&(theorems, count, nmax, seed, tol, compute_tol)));
    if !(tol > 0.0 && compute_tol > 0.0 && compute_tol.is_finite()) {
        report.fail(&Error::BadTolerance(if tol > 0.0 { compute_tol } else { tol }));
        return report;
    }
    let rows: Vec<SweepRow> = theorems
        .iter()
        .map(|&t| sweep_theorem(t, count, nmax, seed, tol, compute_tol))
        .collect();
    if rows.iter().any(|r| r.failures > 0) {
        report.outcome = Outcome::VerificationFailure;
    }
    report.sweep = Some(rows);
    report
}

fn sweep_table(rows: &[SweepRow]) -> String {
    let mut out = format!(
        "{:<8} {:>9} {:>14} {:>8} {:>13}\n",
        "theorem", "instances", "max rel error", "failures", "display flags"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<8} {:>9} {:>14.3e} {:>8} {:>13}\n",
            r.theorem.name(),
            r.instances,
            r.max_relative_error,
            r.failures,
            r.display_discrepancies
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_flag_parses() {
        assert_eq!(Scalar::from_str("-1").unwrap().0, c(-1.0, 0.0));
        assert_eq!(Scalar::from_str("0.5, 2").unwrap().0, c(0.5, 2.0));
        assert!(Scalar::from_str("x").is_err());
    }

    #[test]
    fn worked_fixture_verifies() {
        let run = execute([
            "gdrazin",
            "block",
            "--theorem",
            "thm41",
            "--fixture",
            "example45",
            "--verify",
        ]);
        assert_eq!(run.code, EXIT_OK, "{}", run.stderr);
        let report: RunReport = serde_json::from_str(&run.stdout).unwrap();
        assert!(report.comparison.unwrap().pass);
    }

    #[test]
    fn bad_arguments_are_input_errors() {
        assert_eq!(execute(["gdrazin", "block", "--theorem", "nope"]).code, EXIT_INPUT);
        assert_eq!(execute(["gdrazin", "--help"]).code, EXIT_OK);
    }

    #[test]
    fn pattern_must_match() {
        let run = execute([
            "gdrazin",
            "block",
            "--theorem",
            "thm41",
            "--fixture",
            "example45",
            "--pattern",
            "EI_F0",
        ]);
        assert_eq!(run.code, EXIT_INPUT);
    }

    #[test]
    fn unreachable_tolerance_fails_the_sweep() {
        let row = sweep_theorem(TheoremId::Thm31, 10, 3, 0, 1e-30, DEFAULT_TOL);
        assert_eq!(row.instances, 10);
        assert!(row.failures > 0);
    }
}
