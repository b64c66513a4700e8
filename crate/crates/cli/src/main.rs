//! `sylvlike`: analyze and solve `AX + f(X)B = C` from JSON files.
//!
//! Exit codes: 0 success, 1 bad input, 2 sufficient condition fails but the
//! equation is uniquely solvable, 3 not uniquely solvable, 4 verification
//! failed, 5 Newton did not converge.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use sylvlike::gen::{generate, random_involution, seeded_rng, InstanceKind};
use sylvlike::io::{from_json, to_json, LaurentDump, LaurentFile, OperatorSpec, ProblemFile, QepFile};
use sylvlike::palindromic::{build_z, check_pairing, make_qep, newton_riccati, qep_eigs_from_riccati};
use sylvlike::pencil::{laurent_coefficients, HomogeneousEig};
use sylvlike::solvability::{SolvabilityReport, Tolerances};
use sylvlike::solvers::{analyze, solve, Method, SolveReport};
use sylvlike::{Error, Matrix, OperatorKind, StructuredOperator};

const MAX_DIM: usize = 32;
const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAXIT: usize = 50;

#[derive(Parser)]
#[command(name = "sylvlike", version, about = "Sylvester-like matrix equations AX + f(X)B = C")]
struct Cli {
    /// Verification tolerance (chordal gap for conditions, residual gate for solutions).
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Seed for every random choice; echoed in reports.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the sufficient solvability condition (exit 0 holds, 2 fails but unique, 3 singular).
    Analyze {
        /// Problem JSON, or `-` for stdin.
        file: PathBuf,
    },
    /// Solve the equation and report X with its residual.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// Print a seeded random problem.
    Gen {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "generic", value_parser = parse_kind)]
        kind: InstanceKind,
        #[arg(long, default_value = "transpose", value_parser = parse_operator)]
        operator: OperatorKind,
        /// 1-based permutation images, comma separated.
        #[arg(long, value_delimiter = ',')]
        perm: Option<Vec<usize>>,
        /// Lexicographic index of the permutation (1-based).
        #[arg(long)]
        perm_index: Option<u128>,
    },
    /// Laurent coefficients of (D − λE)^{-1} at infinity.
    Laurent {
        file: PathBuf,
        /// Highest coefficient index (default 2m + 1; overrides the file).
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Palindromic quadratic eigenvalues through the Riccati equation.
    Qep { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Kron,
    Reduction,
    ClosedForm,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::Kron => Method::Kron,
            MethodArg::Reduction => Method::Reduction,
            MethodArg::ClosedForm => Method::ClosedForm,
        }
    }
}

fn parse_kind(s: &str) -> Result<InstanceKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_operator(s: &str) -> Result<OperatorKind, String> {
    OperatorKind::ALL
        .into_iter()
        .find(|k| k.name() == s || k.name().replace('_', "-") == s)
        .ok_or_else(|| format!("unknown operator '{s}'"))
}

/// A command's result: the JSON to print and the exit code.
struct Outcome {
    code: u8,
    body: Option<Value>,
    message: Option<String>,
}

impl Outcome {
    fn ok(body: Value) -> Self {
        Outcome { code: 0, body: Some(body), message: None }
    }

    fn fail(code: u8, message: impl Into<String>) -> Self {
        Outcome { code, body: None, message: Some(message.into()) }
    }
}

fn input_error(e: impl std::fmt::Display) -> Outcome {
    Outcome::fail(1, e.to_string())
}

fn read_input(path: &PathBuf) -> Result<String, Outcome> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(input_error)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Outcome::fail(1, format!("{}: {e}", path.display())))
    }
}

fn check_dim(m: usize) -> Result<(), Outcome> {
    if m == 0 || m > MAX_DIM {
        return Err(Outcome::fail(1, format!("dimension {m} outside 1..={MAX_DIM}")));
    }
    Ok(())
}

fn with_seed<T: Serialize>(value: &T, seed: u64) -> Value {
    let mut v = serde_json::to_value(value).expect("report types serialize");
    if let Value::Object(map) = &mut v {
        map.insert("seed".into(), json!(seed));
    }
    v
}

fn load_problem(path: &PathBuf, seed: u64) -> Result<(sylvlike::solvers::Problem, u64), Outcome> {
    let file: ProblemFile = from_json(&read_input(path)?).map_err(input_error)?;
    check_dim(file.a.rows())?;
    let p = file.to_problem().map_err(input_error)?;
    Ok((p, file.seed.unwrap_or(seed)))
}

/// Exit code of `analyze` as a function of the report.
fn analyze_code(r: &SolvabilityReport) -> u8 {
    match (r.holds, r.kron_nonsingular) {
        (true, _) => 0,
        (false, true) => 2,
        (false, false) => 3,
    }
}

fn solve_code(r: &SolveReport, tol: f64) -> u8 {
    if r.residual <= tol {
        0
    } else {
        4
    }
}

fn cmd_analyze(cli: &Cli, file: &PathBuf) -> Result<Outcome, Outcome> {
    let (p, seed) = load_problem(file, cli.seed)?;
    let report = analyze(&p, &Tolerances::with_chordal(cli.tol)).map_err(input_error)?;
    Ok(Outcome { code: analyze_code(&report), body: Some(with_seed(&report, seed)), message: None })
}

fn cmd_solve(cli: &Cli, file: &PathBuf, method: MethodArg) -> Result<Outcome, Outcome> {
    let (p, seed) = load_problem(file, cli.seed)?;
    match solve(&p, method.into(), &Tolerances::with_chordal(cli.tol)) {
        Ok(r) => Ok(Outcome { code: solve_code(&r, cli.tol), body: Some(with_seed(&r, seed)), message: None }),
        Err(e @ Error::NotUniquelySolvable { .. }) => Err(Outcome::fail(3, e.to_string())),
        Err(e @ Error::ResidualCheckFailed { .. }) => Err(Outcome::fail(4, e.to_string())),
        Err(e) => Err(input_error(e)),
    }
}

fn cmd_gen(
    cli: &Cli,
    m: usize,
    kind: InstanceKind,
    operator: OperatorKind,
    perm: &Option<Vec<usize>>,
    perm_index: Option<u128>,
) -> Result<Outcome, Outcome> {
    check_dim(m)?;
    let mut rng = seeded_rng(cli.seed);
    let f = if operator.needs_perm() && perm.is_none() && perm_index.is_none() {
        StructuredOperator::new(operator, Some(random_involution(&mut rng, m))).map_err(input_error)?
    } else {
        let op = OperatorSpec { kind: operator, perm: perm.clone(), perm_index };
        op.build(m).map_err(input_error)?
    };
    let p = generate(&mut rng, kind, m, &f).map_err(input_error)?;
    let mut file = ProblemFile::from(&p);
    file.seed = Some(cli.seed);
    Ok(Outcome::ok(serde_json::to_value(&file).expect("problem file serializes")))
}

fn cmd_laurent(cli: &Cli, file: &PathBuf, kmax: Option<usize>) -> Result<Outcome, Outcome> {
    let lf: LaurentFile = from_json(&read_input(file)?).map_err(input_error)?;
    let m = lf.d.rows();
    check_dim(m)?;
    let kmax = kmax.or(lf.kmax).unwrap_or(2 * m + 1);
    let l = laurent_coefficients(&lf.d, &lf.e, kmax).map_err(input_error)?;
    Ok(Outcome::ok(with_seed(&LaurentDump::from(&l), cli.seed)))
}

#[derive(Serialize)]
struct QepReport {
    eigenvalues: Vec<HomogeneousEig>,
    first: Vec<HomogeneousEig>,
    second: Vec<HomogeneousEig>,
    pairs: Vec<(HomogeneousEig, HomogeneousEig)>,
    unmatched: Vec<HomogeneousEig>,
    newton_trace: sylvlike::palindromic::NewtonTrace,
    /// `|det Q(λ)| / (|λ|²‖A₂‖ + |λ|‖A₁‖ + ‖A₀‖)^m` for each finite eigenvalue.
    residuals: Vec<f64>,
}

fn det_residual(q: &sylvlike::palindromic::PalindromicQEP, h: &HomogeneousEig) -> Option<f64> {
    let z = h.value()?;
    let scale = z.norm_sqr() * q.a2.norm_fro() + z.norm() * q.a1.norm_fro() + q.a0.norm_fro();
    let det = sylvlike::matrix::determinant(&q.eval(z)).ok()?;
    Some(det.norm() / scale.powi(q.dim() as i32))
}

fn cmd_qep(cli: &Cli, file: &PathBuf) -> Result<Outcome, Outcome> {
    let qf: QepFile = from_json(&read_input(file)?).map_err(input_error)?;
    let m = qf.a2.rows();
    check_dim(m)?;
    let f = qf.operator.build(m).map_err(input_error)?;
    let q = make_qep(qf.a2.clone(), qf.a1.clone(), f.clone()).map_err(input_error)?;
    let blocks = build_z(&q);
    let x0 = qf.x0.clone().unwrap_or_else(|| Matrix::zeros(m, m));
    if x0.rows() != m || x0.cols() != m {
        return Err(Outcome::fail(1, "x0 does not match A2"));
    }
    let tol = qf.tol.unwrap_or(NEWTON_TOL);
    let trace = match newton_riccati(&blocks, &f, &x0, tol, qf.maxit.unwrap_or(NEWTON_MAXIT)) {
        Ok(t) => t,
        Err(Error::NotConverged(t)) => {
            let body = with_seed(&json!({ "error": "not converged", "newton_trace": *t }), cli.seed);
            return Err(Outcome { code: 5, body: Some(body), message: Some("Newton iteration did not converge".into()) });
        }
        Err(e @ Error::NewtonStepSingular { .. }) => return Err(Outcome::fail(5, e.to_string())),
        Err(e) => return Err(input_error(e)),
    };
    let eigs = qep_eigs_from_riccati(&blocks, &trace.x, &f).map_err(|e| Outcome::fail(4, e.to_string()))?;
    let all = eigs.all();
    let pairing = check_pairing(&all, f.classify().scalar_map);
    let residuals = all.iter().filter_map(|h| det_residual(&q, h)).collect();
    let code = if pairing.ok { 0 } else { 4 };
    let report = QepReport {
        eigenvalues: all,
        first: eigs.first,
        second: eigs.second,
        pairs: pairing.pairs,
        unmatched: pairing.unmatched,
        newton_trace: trace,
        residuals,
    };
    Ok(Outcome { code, body: Some(with_seed(&report, cli.seed)), message: None })
}

fn run(cli: &Cli) -> Outcome {
    if cli.tol.is_nan() || cli.tol <= 0.0 {
        return Outcome::fail(1, "--tol must be positive");
    }
    let result = match &cli.command {
        Command::Analyze { file } => cmd_analyze(cli, file),
        Command::Solve { file, method } => cmd_solve(cli, file, *method),
        Command::Gen { m, kind, operator, perm, perm_index } => cmd_gen(cli, *m, *kind, *operator, perm, *perm_index),
        Command::Laurent { file, kmax } => cmd_laurent(cli, file, *kmax),
        Command::Qep { file } => cmd_qep(cli, file),
    };
    result.unwrap_or_else(|o| o)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli);
    if let Some(msg) = &outcome.message {
        eprintln!("error: {msg}");
    }
    if let Some(body) = &outcome.body {
        let text = to_json(body) + "\n";
        match &cli.output {
            Some(path) => {
                if let Err(e) = fs::write(path, text) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            None => print!("{text}"),
        }
    }
    ExitCode::from(outcome.code)
}
