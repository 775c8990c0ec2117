//! `strongsum`: classify matrices, evaluate strong means and norms, and
//! tabulate both sides of the approximation bounds.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{parse_p, parse_range, ConfigFile, PValue};
use strongsum::fixtures::{self, Fixture};
use strongsum::norms::{self, NormSpace};
use strongsum::seqclass::{self, SummabilityMatrix};
use strongsum::summation::{self, GammaSequence, QuadratureSpec};
use strongsum::verify::{self, BoundCase, Majorant, Statement, Verifier};
use strongsum::Error as CoreError;

const EXIT_ERROR: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_FLAGGED: u8 = 3;

#[derive(Parser)]
#[command(name = "strongsum", version, about = "Strong summability laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sequence class constants for the rows of a matrix.
    Classify(CommonArgs),
    /// Norm of the strong mean for each n of the range.
    StrongMean(CommonArgs),
    /// Norms, moduli and best approximations of a fixture.
    Approximate(ApproximateArgs),
    /// Left/right side tables for one or more statements.
    Verify(CommonArgs),
    /// Merge CSV tables produced by `verify`.
    Report(ReportArgs),
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// TOML file with the same keys as the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `cesaro`, `riesz`, `riesz:<s>` or a matrix TOML file.
    #[arg(long)]
    matrix: Option<String>,
    /// Builtin fixture name or a fixture TOML file.
    #[arg(long)]
    fixture: Option<String>,
    /// Stepanov exponent (`inf` allowed) or `uniform`.
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    /// Rows `a..b` (inclusive) or a single `n`.
    #[arg(long)]
    n: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative tolerance for the kernel quadrature.
    #[arg(long)]
    tol: Option<f64>,
    /// Comma-separated statement ids.
    #[arg(long)]
    statement: Option<String>,
    /// `truncation` or `jackson`.
    #[arg(long)]
    majorant: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    /// Norm of the fixture.
    Norm,
    /// Modulus of continuity at each `--arg` delta.
    Modulus,
    /// Best uniform approximation of degree `--arg` k (periodic fixtures).
    BestPeriodic,
    /// Truncation bound for E_sigma at each `--arg` sigma.
    BestStepanov,
    /// Jackson majorant at each `--arg` sigma.
    Jackson,
    /// Partial sum S_lambda f(x) from the kernel integral at each `--arg` x.
    Representation,
}

#[derive(Args)]
struct ApproximateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum)]
    quantity: Quantity,
    /// Comma-separated arguments for the quantity.
    #[arg(long, default_value = "0")]
    arg: String,
    /// Cutoff for `representation`.
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Kernel width for `representation` (defaults to the fixture gap).
    #[arg(long)]
    width: Option<f64>,
}

#[derive(Args)]
struct ReportArgs {
    /// CSV tables to merge, in order.
    #[arg(long, num_args = 1.., required = true)]
    inputs: Vec<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure with its exit status.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        let error = e.into();
        let code = match error.downcast_ref::<CoreError>() {
            Some(CoreError::InvalidC(_) | CoreError::InvalidExponent(_) | CoreError::InvalidArguments(_)) => EXIT_USAGE,
            Some(CoreError::HypothesisViolation(_)) => EXIT_FLAGGED,
            _ => EXIT_ERROR,
        };
        Self { code, error }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        error: anyhow!(msg.into()),
    }
}

/// Flags merged over the config file, validated.
struct RunConfig {
    matrix: String,
    fixture: String,
    p: Option<f64>,
    q: f64,
    c: f64,
    n: (usize, usize),
    out: PathBuf,
    tol: f64,
    statement: Option<String>,
    majorant: Majorant,
}

impl RunConfig {
    fn resolve(args: &CommonArgs) -> std::result::Result<Self, Failure> {
        let file = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let p_value = match &args.p {
            Some(s) => PValue::Text(s.clone()),
            None => file.p.clone().unwrap_or(PValue::Number(config::DEFAULT_P)),
        };
        let p = parse_p(&p_value).map_err(|e| usage(e.to_string()))?;
        let q = args.q.or(file.q).unwrap_or(config::DEFAULT_Q);
        if !(q > 0.0) || !q.is_finite() {
            return Err(usage(format!("q must be positive, got {q}")));
        }
        let c = args.c.or(file.c).unwrap_or(config::DEFAULT_C);
        if !(c > 1.0) || !c.is_finite() {
            return Err(usage(format!("c must exceed 1, got {c}")));
        }
        let n_text = args.n.clone().or(file.n).unwrap_or_else(|| config::DEFAULT_N.into());
        let n = parse_range(&n_text).map_err(|e| usage(e.to_string()))?;
        let tol = args.tol.or(file.tol).unwrap_or(config::DEFAULT_TOL);
        if !(tol > 0.0) {
            return Err(usage(format!("tol must be positive, got {tol}")));
        }
        let majorant_text = args
            .majorant
            .clone()
            .or(file.majorant)
            .unwrap_or_else(|| config::DEFAULT_MAJORANT.into());
        let majorant: Majorant = majorant_text.parse().map_err(|e: CoreError| usage(e.to_string()))?;
        let matrix = args.matrix.clone().or(file.matrix).unwrap_or_else(|| config::DEFAULT_MATRIX.into());
        let fixture = args.fixture.clone().or(file.fixture).unwrap_or_else(|| config::DEFAULT_FIXTURE.into());
        for spec in [&matrix, &fixture] {
            if spec.ends_with(".toml") && !Path::new(spec).exists() {
                return Err(anyhow!("file {spec} does not exist").into());
            }
        }
        Ok(Self {
            matrix,
            fixture,
            p,
            q,
            c,
            n,
            out: args.out.clone().or(file.out).unwrap_or_else(|| config::DEFAULT_OUT.into()),
            tol,
            statement: args.statement.clone().or(file.statement),
            majorant,
        })
    }

    fn load_matrix(&self) -> Result<SummabilityMatrix> {
        if self.matrix.ends_with(".toml") || Path::new(&self.matrix).is_file() {
            Ok(SummabilityMatrix::from_file(Path::new(&self.matrix))?)
        } else {
            Ok(SummabilityMatrix::builtin(&self.matrix)?)
        }
    }

    fn load_fixture(&self) -> Result<Fixture> {
        Ok(fixtures::resolve(&self.fixture)?)
    }

    fn space(&self) -> Result<NormSpace> {
        Ok(match self.p {
            None => NormSpace::uniform(),
            Some(p) => NormSpace::stepanov(p)?,
        })
    }
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

fn cmd_classify(args: &CommonArgs) -> std::result::Result<u8, Failure> {
    let cfg = RunConfig::resolve(args)?;
    let matrix = cfg.load_matrix()?;
    let (a, b) = match matrix.n_range() {
        Some(range) if args.n.is_none() => range,
        _ => cfg.n,
    };
    let report = seqclass::classify(&matrix, a, b, cfg.c)?;
    let path = write_out(&cfg.out, "classify.json", &serde_json::to_string_pretty(&report)?)?;
    let f = report.flags;
    println!(
        "matrix {} rows {a}..={b}: T1={} MS={} RBVS={} MRBVS={} GM={} GM2beta(c={})={}",
        report.matrix, f.t1, f.ms, f.rbvs, f.mrbvs, f.gm, cfg.c, f.gm2beta
    );
    println!(
        "sup K: rbvs={} mrbvs={} gm={} gm2beta={}",
        verify::format_number(report.sup.rbvs),
        verify::format_number(report.sup.mrbvs),
        verify::format_number(report.sup.gm),
        verify::format_number(report.sup.gm2beta)
    );
    println!("wrote {}", path.display());
    if !f.t1 {
        let bad: Vec<String> = report.rows.iter().filter(|r| !r.t1).map(|r| r.n.to_string()).collect();
        eprintln!("hypothesis violation: rows {} do not sum to 1", bad.join(", "));
        return Ok(EXIT_FLAGGED);
    }
    Ok(0)
}

fn cmd_strong_mean(args: &CommonArgs) -> std::result::Result<u8, Failure> {
    let cfg = RunConfig::resolve(args)?;
    let matrix = cfg.load_matrix()?;
    let fixture = cfg.load_fixture()?;
    let space = cfg.space()?;
    let gammas = GammaSequence::half_alpha(fixture.function.alpha())?;
    let mut csv = String::from("n,value,tolerance\n");
    for n in cfg.n.0..=cfg.n.1 {
        let row = matrix.row(n)?;
        let v = summation::strong_mean_norm(&fixture.function, &row, &gammas, cfg.q, &space)?;
        let _ = writeln!(csv, "{n},{},{}", verify::format_number(v.value), verify::format_number(v.tolerance));
    }
    print!("{csv}");
    write_out(&cfg.out, "strong_mean.csv", &csv)?;
    Ok(0)
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad argument {t:?}")))
        .collect()
}

fn cmd_approximate(a: &ApproximateArgs) -> std::result::Result<u8, Failure> {
    let cfg = RunConfig::resolve(&a.common)?;
    let fixture = cfg.load_fixture()?;
    let f = &fixture.function;
    let space = cfg.space()?;
    let args = parse_list(&a.arg).map_err(|e| usage(e.to_string()))?;
    let mut csv = String::from("quantity,arg,value,tolerance\n");
    let name = match a.quantity {
        Quantity::Norm => "norm",
        Quantity::Modulus => "modulus",
        Quantity::BestPeriodic => "best-periodic",
        Quantity::BestStepanov => "best-stepanov",
        Quantity::Jackson => "jackson",
        Quantity::Representation => "representation",
    };
    for &x in &args {
        let (value, tol) = match a.quantity {
            Quantity::Norm => {
                let m = norms::norm_in(f, &space, norms::default_u_span(f))?;
                (m.value, m.tolerance)
            }
            Quantity::Modulus => {
                let m = norms::modulus(f, x, &space)?;
                (m.value, m.tolerance)
            }
            Quantity::BestPeriodic => {
                if x < 0.0 || x.fract() != 0.0 {
                    return Err(usage(format!("degree must be a nonnegative integer, got {x}")));
                }
                let m = norms::best_approx_periodic(&fixture.periodic()?, x as usize)?;
                (m.value, m.tolerance)
            }
            Quantity::BestStepanov => {
                let m = norms::best_approx_stepanov_upper(f, x, &space)?;
                (m.value, m.tolerance)
            }
            Quantity::Jackson => {
                let m = norms::jackson_rhs(f, x, &space)?;
                (m.value, m.tolerance)
            }
            Quantity::Representation => {
                let width = a.width.unwrap_or(f.alpha());
                let quad = QuadratureSpec::from_tail_bound(width, cfg.tol)?;
                let r = summation::integral_partial_sum(f, x, a.lambda, width, &quad)?;
                (r.value.re, r.tolerance())
            }
        };
        let _ = writeln!(csv, "{name},{},{},{}", verify::format_number(x), verify::format_number(value), verify::format_number(tol));
    }
    print!("{csv}");
    write_out(&cfg.out, "approximate.csv", &csv)?;
    Ok(0)
}

fn cmd_verify(args: &CommonArgs) -> std::result::Result<u8, Failure> {
    let cfg = RunConfig::resolve(args)?;
    let ids = cfg
        .statement
        .clone()
        .ok_or_else(|| usage("verify needs --statement"))?;
    let statements: Vec<Statement> = ids
        .split(',')
        .map(|s| s.trim().parse::<Statement>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| usage(e.to_string()))?;
    let matrix = cfg.load_matrix()?;
    let fixture = cfg.load_fixture()?;
    let mut verifier = Verifier::new();
    let mut reports = Vec::new();
    for st in statements {
        let p = match cfg.p {
            Some(p) => p,
            None if st.is_periodic() => f64::INFINITY,
            None => return Err(usage(format!("{} needs a Stepanov exponent", st.id()))),
        };
        let case = BoundCase {
            statement: st,
            fixture: fixture.clone(),
            matrix: matrix.clone(),
            p,
            q: cfg.q,
            c: cfg.c,
            n_start: cfg.n.0,
            n_end: cfg.n.1,
            majorant: cfg.majorant,
        };
        reports.push(verifier.run(&case)?);
    }
    let csv = verify::to_csv(&reports);
    write_out(&cfg.out, "verify.csv", &csv)?;
    write_out(&cfg.out, "verify.json", &serde_json::to_string_pretty(&reports)?)?;
    let mut flagged = false;
    for r in &reports {
        println!(
            "{} {} {}: sup ratio {} over n = {}..={}",
            r.statement,
            r.fixture,
            r.matrix,
            verify::format_number(r.sup_ratio),
            r.n_start,
            r.n_end
        );
        for f in &r.flags {
            eprintln!("consistency flag ({}): {f}", r.statement);
            flagged = true;
        }
    }
    Ok(if flagged { EXIT_FLAGGED } else { 0 })
}

fn cmd_report(args: &ReportArgs) -> std::result::Result<u8, Failure> {
    let mut tables = Vec::new();
    for p in &args.inputs {
        tables.push(fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?);
    }
    let merged = verify::merge_csv(&tables)?;
    let out = args.out.clone().unwrap_or_else(|| config::DEFAULT_OUT.into());
    let path = write_out(&out, "report.csv", &merged)?;
    println!("merged {} tables into {}", tables.len(), path.display());
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Classify(a) => cmd_classify(a),
        Command::StrongMean(a) => cmd_strong_mean(a),
        Command::Approximate(a) => cmd_approximate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Report(a) => cmd_report(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
