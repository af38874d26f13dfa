use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use matfrechet::conditioning::{cond2_exact_hpd, cond2_upper_bound, KroneckerOptions};
use matfrechet::engine::{frechet, FrechetOptions, Path};
use matfrechet::functions::{catalog_lookup, FunctionClass, FunctionId, ScalarFunction};
use matfrechet::linalg::{check_hermitian, extreme_eigenvalues_hermitian};
use matfrechet::mtx::{write_mtx, MtxFormat};
use matfrechet::quadrature::{build_rule, scalar_check, scalar_derivative, RuleKind};
use matfrechet::reference::{frechet_complex_step, frechet_hr};
use matfrechet::{ComplexMatrix, Error, Result};
use matfrechet_cli::experiments::{run_experiment, ExperimentConfig, ExperimentId, Method};
use matfrechet_cli::inputs::{parse_complex, parse_dirs, parse_matrix, parse_range};
use matfrechet_cli::record::{OutputFormat, RecordWriter, Summary};
use serde_json::json;

#[derive(Parser)]
#[command(name = "matfrechet", version, about = "Higher-order Fréchet derivatives of matrix functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate L_f^(k)(A, E_1, ..., E_k)
    Compute {
        #[arg(long = "fn", value_parser = parse_fn)]
        function: FunctionId,
        #[arg(long, default_value = "quad", value_parser = parse_method)]
        method: Method,
        /// derivative order; optional when the directions fix it
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_parser = parse_rule)]
        rule: Option<RuleKind>,
        /// Matrix Market path or gallery:<name>:<n>[:<param>]
        #[arg(long)]
        matrix: String,
        /// random:<dense|unit-pairs>:<seed>, a JSON direction set, or comma-separated Matrix Market paths
        #[arg(long)]
        dirs: String,
        /// write the derivative as a Matrix Market array file
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        path: Option<PathArg>,
        /// complex-step size for --method cs
        #[arg(long)]
        h: Option<f64>,
    },
    /// Level-2 condition number: exact HPD formula, Kronecker bound, or both
    Cond2 {
        #[arg(long = "fn", value_parser = parse_fn)]
        function: FunctionId,
        #[arg(long, value_enum, default_value = "both")]
        method: Cond2Arg,
        #[arg(long)]
        matrix: String,
    },
    /// Run an experiment and emit benchmark records
    Bench {
        #[arg(long, value_parser = parse_experiment)]
        experiment: ExperimentId,
        /// JSON experiment configuration; omitted fields take defaults
        #[arg(long)]
        config: Option<PathBuf>,
        /// output file, standard output when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Scalar accuracy of a quadrature rule over a range of node counts
    Quadcheck {
        #[arg(long, value_parser = parse_rule)]
        rule: RuleKind,
        /// a:b[:step]
        #[arg(long)]
        m_range: String,
        /// x or x,y for x + iy
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// defaults to the function the rule is built for
        #[arg(long = "fn", value_parser = parse_fn)]
        function: Option<FunctionId>,
        /// check the k-th scalar derivative instead of f itself
        #[arg(long, default_value_t = 0)]
        k: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Dense,
    RankOne,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Cond2Arg {
    Exact,
    Bound,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn parse_fn(s: &str) -> std::result::Result<FunctionId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_rule(s: &str) -> std::result::Result<RuleKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_experiment(s: &str) -> std::result::Result<ExperimentId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

/// Rejects Hermitian arguments of Stieltjes-class functions with `λ_min ≤ 0`;
/// non-Hermitian spectra are not checked.
fn check_domain(f: &ScalarFunction, a: &ComplexMatrix) -> Result<()> {
    if f.class == FunctionClass::CauchyContour || check_hermitian(a).is_err() {
        return Ok(());
    }
    let (lo, _) = extreme_eigenvalues_hermitian(a)?;
    if lo <= 0.0 {
        return Err(Error::DomainViolation {
            function: f.name(),
            detail: format!("smallest eigenvalue {lo:e} is not positive"),
        });
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn compute(
    f: &ScalarFunction,
    method: Method,
    k: Option<usize>,
    m: Option<usize>,
    rule: Option<RuleKind>,
    matrix: &str,
    dirs: &str,
    out: Option<&PathBuf>,
    path: Option<PathArg>,
    h: Option<f64>,
) -> Result<()> {
    let a = parse_matrix(matrix)?;
    let dirs = parse_dirs(dirs, a.nrows(), k)?;
    if method != Method::Quad && (m.is_some() || rule.is_some() || path.is_some()) {
        return Err(Error::BadParams("--m, --rule and --path apply to --method quad only".into()));
    }
    if method != Method::Cs && h.is_some() {
        return Err(Error::BadParams("--h applies to --method cs only".into()));
    }
    check_domain(f, &a)?;
    let start = std::time::Instant::now();
    let (value, diagnostics) = match method {
        Method::Quad => {
            let opts = FrechetOptions {
                rule,
                m,
                path: path.map(|p| match p {
                    PathArg::Dense => Path::Dense,
                    PathArg::RankOne => Path::RankOne,
                }),
                ..FrechetOptions::default()
            };
            let r = frechet(f, &a, &dirs, &opts)?;
            (r.value, Some(r.diagnostics))
        }
        Method::Hr => (frechet_hr(f, &a, &dirs)?, None),
        Method::Cs => (frechet_complex_step(f, &a, &dirs, h)?, None),
    };
    let elapsed = start.elapsed().as_secs_f64();
    if let Some(p) = out {
        write_mtx(p, &value, MtxFormat::Array)?;
    }
    print_json(&json!({
        "function": f.name(),
        "method": method.name(),
        "n": a.nrows(),
        "k": dirs.k(),
        "frobenius_norm": value.frobenius(),
        "elapsed_seconds": elapsed,
        "diagnostics": diagnostics,
        "out": out.map(|p| p.display().to_string()),
    }))
}

fn cond2(f: &ScalarFunction, method: Cond2Arg, matrix: &str) -> Result<()> {
    let a = parse_matrix(matrix)?;
    let exact = match method {
        Cond2Arg::Bound => None,
        _ => Some(cond2_exact_hpd(f, &a)?),
    };
    let mut bound = match method {
        Cond2Arg::Exact => None,
        _ => Some(cond2_upper_bound(f, &a, &KroneckerOptions::default())?),
    };
    if let (Some(e), Some(b)) = (&exact, bound.as_mut()) {
        b.ratio = Some(b.value / e.value);
    }
    print_json(&json!({
        "function": f.name(),
        "n": a.nrows(),
        "exact": exact,
        "bound": bound,
    }))
}

fn bench(id: ExperimentId, config: Option<&PathBuf>, out: Option<&PathBuf>, format: FormatArg) -> Result<()> {
    let cfg = match config {
        Some(p) => ExperimentConfig::from_json(&std::fs::read_to_string(p)?)?,
        None => ExperimentConfig::default(),
    };
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    };
    let format = match format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    let mut writer = RecordWriter::new(sink, format, id.name());
    let mut write_err = None;
    let result = run_experiment(id, &cfg, &mut |rec| {
        writer.push(rec).inspect_err(|e| write_err = Some(e.clone()))
    });
    match result {
        Ok(summary) => {
            // CSV has no place for the summary; it goes to stderr instead
            if format == OutputFormat::Csv {
                eprintln!("summary: {}", serde_json::to_string(&summary).map_err(|e| Error::Io(e.to_string()))?);
            }
            writer.finish(summary, None)
        }
        Err(e) => {
            if write_err.is_none() {
                writer.finish(Summary::new(), Some(e.to_string()))?;
            }
            Err(e)
        }
    }
}

fn quadcheck(rule: RuleKind, m_range: &str, z: &str, function: Option<FunctionId>, k: usize) -> Result<()> {
    let f = catalog_lookup(function.unwrap_or(rule.target()));
    rule.check_compatible(&f)?;
    let z = parse_complex(z)?;
    let exact = f.derivative(k, z);
    let mut out = io::stdout().lock();
    writeln!(out, "m,re,im,rel_error")?;
    for m in parse_range(m_range)? {
        let q = build_rule(rule, m)?;
        let s = if k == 0 { scalar_check(&q, &f, z)? } else { scalar_derivative(&q, k, z) };
        let err = (s - exact).norm() / exact.norm();
        writeln!(out, "{m},{:e},{:e},{err:e}", s.re, s.im)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Compute { function, method, k, m, rule, matrix, dirs, out, path, h } => compute(
            &catalog_lookup(function),
            method,
            k,
            m,
            rule,
            &matrix,
            &dirs,
            out.as_ref(),
            path,
            h,
        ),
        Command::Cond2 { function, method, matrix } => cond2(&catalog_lookup(function), method, &matrix),
        Command::Bench { experiment, config, out, format } => bench(experiment, config.as_ref(), out.as_ref(), format),
        Command::Quadcheck { rule, m_range, z, function, k } => quadcheck(rule, &m_range, &z, function, k),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
