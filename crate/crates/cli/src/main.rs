use clap::{Args, Parser, Subcommand, ValueEnum};
use kgspec_core::bounds::{self, improved_kg_bound, melas_laplacian_bound, BoundBreakdown, DomainSpec};
use kgspec_core::harness::{self, to_json, VerifyOptions};
use kgspec_core::lemma::{self, TabulatedDecreasingFn};
use kgspec_core::spectral::{compute_spectrum_with, BasisDescriptor, Family};
use kgspec_core::{Domain, Error, Shape};
use serde::Serialize;
use serde_json::json;
use std::io::Write;
use std::process::ExitCode;

const EXIT_USAGE: u8 = 2;
const EXIT_STRICT_1D: u8 = 3;
const EXIT_UNSUPPORTED: u8 = 4;
const EXIT_SOLVER: u8 = 5;
const EXIT_ASSERTION: u8 = 6;

#[derive(Parser)]
#[command(name = "kgspec", version, about = "Eigenvalue-sum bounds for |p| on bounded domains")]
struct Cli {
    /// Leave the timestamp field empty so repeated runs compare byte for byte.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lower bounds on Σ_{j≤k} β_j for k = 1..n.
    Bounds(BoundsArgs),
    /// Rayleigh–Ritz eigenvalues on an interval or box.
    Eigs(EigsArgs),
    /// Full verification report.
    Verify(VerifyArgs),
    /// Moment-inequality fuzzing or a single-profile diagnostic.
    Lemma(LemmaArgs),
    /// Riesz mean of a stored spectrum.
    Riesz(RieszArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Sine,
    Hat,
    Both,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    domain: String,
    #[arg(long)]
    k: usize,
    /// Include the Melas bound for the Dirichlet Laplacian with this M_d.
    #[arg(long)]
    melas_md: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Fail instead of flagging rows where the improved bound is unavailable.
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct EigsArgs {
    #[arg(long)]
    domain: String,
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    resolution: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    xi_cutoff: Option<f64>,
    /// Include coefficient vectors in the output.
    #[arg(long)]
    coefficients: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    domain: String,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "both")]
    family: FamilyArg,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    hat_resolution: Option<usize>,
    #[arg(long)]
    xi_cutoff: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct LemmaArgs {
    #[arg(long = "d")]
    d: usize,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Profile as JSON: {"knots":[..],"values":[..],"m":..}
    #[arg(long)]
    phi: Option<String>,
}

#[derive(Args)]
struct RieszArgs {
    /// JSON file holding an array of eigenvalues or an object with "eigenvalues".
    #[arg(long)]
    spectrum: std::path::PathBuf,
    #[arg(long)]
    z: f64,
    #[arg(long)]
    sigma: f64,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    fail(EXIT_USAGE, e.to_string())
}

/// Exit status for errors raised while building or solving a spectrum.
fn spectral_failure(e: Error) -> Failure {
    let code = match e {
        Error::UnsupportedDomain | Error::DimensionUnsupported { .. } => EXIT_UNSUPPORTED,
        Error::InvalidArgument(_) | Error::Parse { .. } | Error::InvalidDomain(_) => EXIT_USAGE,
        _ => EXIT_SOLVER,
    };
    fail(code, e.to_string())
}

fn parse_domain(s: &str) -> Result<Domain, Failure> {
    s.parse::<Domain>().map_err(usage)
}

fn require_eigensolver_domain(dom: &Domain) -> Result<(), Failure> {
    if matches!(dom.shape(), Shape::Ball { .. }) {
        return Err(spectral_failure(Error::UnsupportedDomain));
    }
    Ok(())
}

#[derive(Serialize)]
struct BoundsRow {
    #[serde(flatten)]
    breakdown: BoundBreakdown,
    #[serde(skip_serializing_if = "Option::is_none")]
    melas_laplacian: Option<f64>,
}

fn run_bounds(a: &BoundsArgs) -> Result<String, Failure> {
    let dom = parse_domain(&a.domain)?;
    if a.k == 0 {
        return Err(usage("k must be at least 1"));
    }
    let spec = DomainSpec::of(&dom);
    if a.strict && spec.d == 1 {
        return Err(fail(EXIT_STRICT_1D, "the improved bound needs d ≥ 2 (correction term undefined for d = 1)"));
    }
    let rows = (1..=a.k)
        .map(|k| {
            let melas = a.melas_md.map(|md| melas_laplacian_bound(spec, k, md)).transpose().map_err(usage)?;
            Ok(BoundsRow { breakdown: improved_kg_bound(spec, k), melas_laplacian: melas })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(match a.format {
        Format::Json => to_json(&json!({ "version": harness::VERSION, "domain": dom.to_string(), "rows": rows })),
        Format::Csv => {
            let mut out = String::from("k,leading_term,correction_term,total,applicability");
            if a.melas_md.is_some() {
                out.push_str(",melas_laplacian");
            }
            out.push('\n');
            for r in &rows {
                let b = &r.breakdown;
                let app = serde_json::to_value(b.applicability).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{}",
                    b.k,
                    harness::format_f64(b.leading_term),
                    harness::format_f64(b.correction_term),
                    harness::format_f64(b.total),
                    app
                ));
                if let Some(m) = r.melas_laplacian {
                    out.push_str(&format!(",{}", harness::format_f64(m)));
                }
                out.push('\n');
            }
            out
        }
    })
}

fn run_eigs(a: &EigsArgs) -> Result<String, Failure> {
    let dom = parse_domain(&a.domain)?;
    require_eigensolver_domain(&dom)?;
    let family = match a.family {
        FamilyArg::Sine => Family::Sine,
        FamilyArg::Hat => Family::Hat,
        FamilyArg::Both => return Err(usage("eigs takes a single family: sine or hat")),
    };
    if a.k == 0 {
        return Err(usage("k must be at least 1"));
    }
    let mut basis = BasisDescriptor::new(&dom, family, a.resolution).map_err(spectral_failure)?;
    if let Some(x) = a.xi_cutoff {
        basis = basis.with_cutoff(x).map_err(spectral_failure)?;
    }
    let result = compute_spectrum_with(&basis, a.k).map_err(spectral_failure)?;
    Ok(to_json(&result.report(a.coefficients)))
}

fn run_verify(a: &VerifyArgs, no_timestamp: bool) -> Result<(String, bool), Failure> {
    let dom = parse_domain(&a.domain)?;
    if a.k == 0 {
        return Err(usage("k must be at least 1"));
    }
    require_eigensolver_domain(&dom)?;
    let mut opts = VerifyOptions::new(a.k);
    opts.families = match a.family {
        FamilyArg::Sine => vec![Family::Sine],
        FamilyArg::Hat => vec![Family::Hat],
        FamilyArg::Both => vec![Family::Sine, Family::Hat],
    };
    opts.resolution = a.resolution;
    opts.hat_resolution = a.hat_resolution;
    opts.xi_cutoff = a.xi_cutoff;
    opts.seed = a.seed;
    let mut report = harness::verify(&dom, &opts).map_err(spectral_failure)?;
    if !no_timestamp {
        report.timestamp = Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    }
    let json = to_json(&report);
    if let Some(path) = &a.out {
        std::fs::write(path, &json).map_err(|e| fail(EXIT_USAGE, format!("cannot write {}: {e}", path.display())))?;
    }
    let body = match a.format {
        Format::Json => json,
        Format::Csv => report.table_csv(),
    };
    for name in report.failures() {
        eprintln!("asserted check failed: {name}");
    }
    Ok((body, report.passed()))
}

fn run_lemma(a: &LemmaArgs) -> Result<String, Failure> {
    if a.d < 2 {
        return Err(usage("lemma requires d ≥ 2"));
    }
    match (&a.phi, a.trials) {
        (Some(src), _) => {
            let phi = TabulatedDecreasingFn::from_json(src).map_err(usage)?;
            let mp = lemma::moments(&phi, a.d).map_err(usage)?;
            let rhs = lemma::lemma_rhs(&phi, a.d).map_err(usage)?;
            let gap = lemma::lemma_gap(&phi, a.d).map_err(usage)?;
            let step12 = lemma::step12_check(&lemma::normalize_eta(&phi), a.d).map_err(usage)?;
            Ok(to_json(&json!({
                "d": a.d,
                "A": mp.a,
                "B": mp.b,
                "lemma_rhs": rhs,
                "lemma_gap": gap,
                "alpha": step12.alpha,
                "step12": step12,
            })))
        }
        (None, Some(trials)) => {
            if trials == 0 {
                return Err(usage("trials must be at least 1"));
            }
            let report = lemma::fuzz_lemma(a.d, trials, a.seed).map_err(usage)?;
            Ok(to_json(&report))
        }
        (None, None) => Err(usage("lemma needs --phi or --trials")),
    }
}

fn run_riesz(a: &RieszArgs) -> Result<String, Failure> {
    let text = std::fs::read_to_string(&a.spectrum)
        .map_err(|e| usage(format!("cannot read {}: {e}", a.spectrum.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| usage(format!("malformed spectrum file: {e}")))?;
    let list = value.get("eigenvalues").unwrap_or(&value);
    let spectrum: Vec<f64> = serde_json::from_value(list.clone())
        .map_err(|_| usage("spectrum file must hold an array of numbers or an object with \"eigenvalues\""))?;
    bounds::check_spectrum(&spectrum).map_err(usage)?;
    if !(a.sigma >= 0.0) {
        return Err(usage("sigma must be non-negative"));
    }
    Ok(to_json(&json!({ "z": a.z, "sigma": a.sigma, "riesz_mean": bounds::riesz_mean(&spectrum, a.z, a.sigma) })))
}

fn configure_threads() {
    if let Some(n) = std::env::var("KGSPEC_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|n| *n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let outcome = match &cli.command {
        Command::Bounds(a) => run_bounds(a).map(|s| (s, true)),
        Command::Eigs(a) => run_eigs(a).map(|s| (s, true)),
        Command::Verify(a) => run_verify(a, cli.no_timestamp),
        Command::Lemma(a) => run_lemma(a).map(|s| (s, true)),
        Command::Riesz(a) => run_riesz(a).map(|s| (s, true)),
    };
    match outcome {
        Ok((body, passed)) => {
            let mut out = std::io::stdout().lock();
            // a closed pipe is not an error for a report writer
            let _ = out.write_all(body.as_bytes());
            if !body.ends_with('\n') {
                let _ = out.write_all(b"\n");
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_ASSERTION)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
