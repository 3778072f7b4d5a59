//! Command-line front end: eigenvalue clouds, windowed overlap histograms,
//! and the named verification suites.
//!
//! Exit codes: 0 success (and, for `verify`, all checks green), 1 a verify
//! check failed, 2 usage error, 3 numerical or I/O error.

use std::fmt;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};

use overlap_lab_core::ensembles::EnsembleSpec;
use overlap_lab_core::experiments::{
    eigenvalue_cloud, overlap_histogram, run_experiment, EnsembleTag, VerifyConfig, DEFAULT_ALPHA,
    DEFAULT_SEED,
};
use overlap_lab_core::Error;

#[derive(Parser)]
#[command(name = "overlap-lab", version, about = "Eigenvector overlap experiments for non-Hermitian random matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw spectra and emit eigenvalue point clouds
    Sample(SampleArgs),
    /// Emit scaled diagonal overlaps of eigenvalues inside a radial window
    OverlapHist(HistArgs),
    /// Run a named verification suite and write its report
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EnsembleArg {
    Cge,
    Sph,
    Tue,
}

impl From<EnsembleArg> for EnsembleTag {
    fn from(e: EnsembleArg) -> Self {
        match e {
            EnsembleArg::Cge => EnsembleTag::Cge,
            EnsembleArg::Sph => EnsembleTag::Sph,
            EnsembleArg::Tue => EnsembleTag::Tue,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SampleArgs {
    /// Matrix ensemble
    #[arg(long, value_enum, default_value_t = EnsembleArg::Sph)]
    ensemble: EnsembleArg,
    /// Matrix dimension
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Truncation co-dimension (tue only; defaults to n)
    #[arg(long)]
    m: Option<usize>,
    /// Independent spectra to draw
    #[arg(long, default_value_t = 1)]
    replicas: u64,
    /// RNG seed; falls back to OVERLAP_LAB_SEED, then the built-in default
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results are identical for any value
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Output path, '-' for stdout
    #[arg(long, default_value = "-")]
    out: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Append stereographic sphere coordinates sx, sy, sz
    #[arg(long)]
    sphere: bool,
}

#[derive(Args)]
struct HistArgs {
    #[arg(long, value_enum, default_value_t = EnsembleArg::Sph)]
    ensemble: EnsembleArg,
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Truncation co-dimension (tue only; defaults to n)
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 30)]
    replicas: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// KS significance for the informational limit-law comparison
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Keep eigenvalues with |lambda| < window
    #[arg(long, default_value_t = 0.8)]
    window: f64,
    /// Rows output path, '-' for stdout; csv mode writes the summary next to
    /// it as <out>.summary.json (or to stderr for stdout output)
    #[arg(long, default_value = "-")]
    out: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Lift the n <= 256 cost guard on the Schur solve
    #[arg(long)]
    allow_large: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name; see --help for the list
    #[arg(long)]
    experiment: String,
    /// Restrict the suite to one ensemble
    #[arg(long, value_enum)]
    ensemble: Option<EnsembleArg>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    replicas: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Report path, '-' for stdout
    #[arg(long, default_value = "-")]
    out: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

enum AppError {
    Core(Error),
    Io(std::io::Error),
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Core(e) => write!(f, "{e}"),
            AppError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        AppError::Core(e)
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

fn exit_code(e: &AppError) -> i32 {
    match e {
        AppError::Core(
            Error::InvalidConfig(_)
            | Error::UnsupportedEnsemble(_)
            | Error::ParameterOutOfRange(_)
            | Error::EmptyInput(_)
            | Error::DimensionMismatch(_),
        ) => 2,
        _ => 3,
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sample(args) => cmd_sample(args),
        Command::OverlapHist(args) => cmd_overlap_hist(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, AppError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("OVERLAP_LAB_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| {
            AppError::Core(Error::InvalidConfig(format!(
                "OVERLAP_LAB_SEED must be an unsigned integer, got {v:?}"
            )))
        }),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn build_spec(ensemble: EnsembleArg, n: usize, m: Option<usize>) -> Result<EnsembleSpec, AppError> {
    let tag: EnsembleTag = ensemble.into();
    let spec = tag.spec(n, m.unwrap_or(n));
    spec.validate()?;
    Ok(spec)
}

fn write_output(path: &str, content: &str) -> Result<(), AppError> {
    if path == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(content.as_bytes())?;
        stdout.flush()?;
    } else {
        std::fs::write(path, content)?;
    }
    Ok(())
}

fn summary_path(out: &str) -> String {
    Path::new(out).with_extension("summary.json").to_string_lossy().into_owned()
}

fn cmd_sample(args: SampleArgs) -> Result<i32, AppError> {
    let seed = resolve_seed(args.seed)?;
    let spec = build_spec(args.ensemble, args.n, args.m)?;
    let points = eigenvalue_cloud(spec, args.replicas, seed, args.threads, args.sphere)?;
    let content = match args.format {
        Format::Csv => {
            let mut s = String::from(if args.sphere {
                "replica,index,re,im,sx,sy,sz\n"
            } else {
                "replica,index,re,im\n"
            });
            for p in &points {
                match p.sphere {
                    Some(q) => s.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        p.replica, p.index, p.value.re, p.value.im, q.x, q.y, q.z
                    )),
                    None => {
                        s.push_str(&format!("{},{},{},{}\n", p.replica, p.index, p.value.re, p.value.im))
                    }
                }
            }
            s
        }
        Format::Json => {
            let rows: Vec<serde_json::Value> = points
                .iter()
                .map(|p| match p.sphere {
                    Some(q) => serde_json::json!({
                        "replica": p.replica, "index": p.index,
                        "re": p.value.re, "im": p.value.im,
                        "sx": q.x, "sy": q.y, "sz": q.z,
                    }),
                    None => serde_json::json!({
                        "replica": p.replica, "index": p.index,
                        "re": p.value.re, "im": p.value.im,
                    }),
                })
                .collect();
            let doc = serde_json::json!({ "schema": 1, "ensemble": spec.label(), "rows": rows });
            let mut s = serde_json::to_string_pretty(&doc).expect("rows serialize");
            s.push('\n');
            s
        }
    };
    write_output(&args.out, &content)?;
    Ok(0)
}

fn cmd_overlap_hist(args: HistArgs) -> Result<i32, AppError> {
    if args.n > 256 && !args.allow_large {
        return Err(AppError::Core(Error::InvalidConfig(format!(
            "n = {} exceeds the Schur cost guard of 256; pass --allow-large to proceed",
            args.n
        ))));
    }
    let seed = resolve_seed(args.seed)?;
    let spec = build_spec(args.ensemble, args.n, args.m)?;
    let (rows, summary) =
        overlap_histogram(spec, args.replicas, seed, args.threads, args.window, args.alpha)?;
    let mut summary_json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    summary_json.push('\n');
    match args.format {
        Format::Csv => {
            let mut s = String::from("replica,re,im,o_scaled\n");
            for r in &rows {
                s.push_str(&format!("{},{},{},{}\n", r.replica, r.value.re, r.value.im, r.o_scaled));
            }
            write_output(&args.out, &s)?;
            if args.out == "-" {
                eprintln!("{summary_json}");
            } else {
                write_output(&summary_path(&args.out), &summary_json)?;
            }
        }
        Format::Json => {
            let row_values: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "replica": r.replica, "re": r.value.re, "im": r.value.im,
                        "o_scaled": r.o_scaled,
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "summary": serde_json::to_value(&summary).expect("summary serializes"),
                "rows": row_values,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("doc serializes");
            s.push('\n');
            write_output(&args.out, &s)?;
        }
    }
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<i32, AppError> {
    let seed = resolve_seed(args.seed)?;
    let cfg = VerifyConfig {
        seed,
        alpha: args.alpha,
        threads: args.threads,
        ensemble: args.ensemble.map(EnsembleTag::from),
        n: args.n,
        m: args.m,
        replicas: args.replicas,
    };
    let report = run_experiment(&args.experiment, &cfg)?;
    let content = match args.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    write_output(&args.out, &content)?;
    for c in &report.checks {
        eprintln!(
            "{} {} [{}]",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.ensemble.as_deref().unwrap_or("-")
        );
    }
    Ok(if report.pass { 0 } else { 1 })
}
