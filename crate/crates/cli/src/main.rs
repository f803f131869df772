use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dewkit::document::{DocumentKind, MatrixDocument};
use dewkit::families::{orthogonal_family, recommended_sample_count, span_certificate_with};
use dewkit::reproduce::{reproduce, ReproduceOptions};
use dewkit::subspace::{certify_ces, CesOptions, CES_TOL};
use dewkit::tensor::RANK_TOL;
use dewkit::witness::{
    dew_from_q, optimality_analysis, verify_ew, OptimalityOptions, EPS_MIN, ZERO_SET_TOL,
};
use dewkit::Error;
use serde_json::{json, Value};

mod views;

#[derive(Parser, Debug)]
#[command(name = "dewkit", version, about = "Decomposable entanglement witnesses and completely entangled subspaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search a subspace document for product vectors.
    CheckCes {
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Verify and analyze a witness (kind witness) or Q (kind matrix, wrapped as Q^Γ).
    AnalyzeWitness {
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Product vectors orthogonal to a subspace and the dimensions they span.
    FindProductVectors {
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Regenerate the worked examples: ladder, v1, v2, pyramid, lemma1-4, theorem1-2 or all.
    Reproduce {
        example: String,
        #[command(flatten)]
        common: Common,
        /// Trials per randomized suite.
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    multistarts: usize,
    /// Samples per chart for family construction.
    #[arg(long)]
    samples: Option<usize>,
    /// check-ces: overlap margin; analyze-witness: product-minimum tolerance;
    /// find-product-vectors: rank tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Output file; stdout when absent or "-".
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExhausted(_) => CliError::Internal(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

struct Outcome {
    body: Value,
    text: String,
    ok: bool,
}

fn read_input(path: &Option<PathBuf>) -> Result<MatrixDocument, CliError> {
    let text = match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?
        }
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|e| CliError::Input(format!("stdin: {e}")))?;
            s
        }
    };
    Ok(MatrixDocument::parse(&text)?)
}

fn ces_options(c: &Common) -> CesOptions {
    CesOptions { multistarts: c.multistarts, seed: c.seed, tol: c.tol.unwrap_or(CES_TOL), ..CesOptions::default() }
}

fn check_ces(input: &Option<PathBuf>, c: &Common) -> Result<Outcome, CliError> {
    let doc = read_input(input)?;
    let v = doc.to_subspace()?;
    let cert = certify_ces(&v, &ces_options(c));
    let body = json!({
        "dims": { "m": v.dims().m(), "n": v.dims().n() },
        "subspace_dim": v.dim(),
        "certificate": views::ces_certificate(&cert),
    });
    Ok(Outcome { text: views::flat_text(&body), body, ok: cert.is_ces })
}

fn analyze_witness(input: &Option<PathBuf>, c: &Common) -> Result<Outcome, CliError> {
    let doc = read_input(input)?;
    let w = match doc.kind {
        DocumentKind::Matrix => {
            let (q, dims) = doc.to_matrix()?;
            dew_from_q(&q, dims)?
        }
        DocumentKind::Witness => doc.to_witness()?,
        other => return Err(CliError::Input(format!("expected a matrix or witness document, got {other:?}"))),
    };
    let mut opts = OptimalityOptions::with_seed(c.seed);
    opts.ew.multistarts = c.multistarts;
    opts.ces.multistarts = c.multistarts;
    opts.samples = c.samples;
    if let Some(tol) = c.tol {
        opts.ew.tol = tol;
    }
    let verdict = verify_ew(&w, &opts.ew);
    let optimality = if verdict.is_ew {
        Some(optimality_analysis(&w, &opts).map_err(|e| CliError::Internal(e.to_string()))?)
    } else {
        None
    };
    let dims = w.dims();
    let body = json!({
        "input_kind": doc.kind,
        "dims": { "m": dims.m(), "n": dims.n() },
        "verdict": views::ew_verdict(&verdict),
        "optimality": optimality.as_ref().map(views::optimality),
        "seed": c.seed,
        "multistarts": c.multistarts,
        "tolerances": {
            "ew_tol": opts.ew.tol,
            "eps_min": EPS_MIN,
            "zero_set_tol": ZERO_SET_TOL,
            "rank_tol": RANK_TOL,
            "ces_tol": opts.ces.tol,
        },
    });
    Ok(Outcome { text: views::flat_text(&body), body, ok: verdict.is_ew })
}

fn find_product_vectors(input: &Option<PathBuf>, c: &Common) -> Result<Outcome, CliError> {
    let doc = read_input(input)?;
    let v = doc.to_subspace()?;
    let samples = c.samples.unwrap_or_else(|| recommended_sample_count(&v.dims(), v.dim()));
    let ces = CesOptions { multistarts: c.multistarts, seed: c.seed, ..CesOptions::default() };
    let fam = orthogonal_family(&v, samples, &ces)?;
    let tol = c.tol.unwrap_or(RANK_TOL);
    let span = if fam.is_empty() { None } else { Some(span_certificate_with(&fam, tol)?) };
    let body = json!({
        "subspace_dim": v.dim(),
        "samples_per_chart": samples,
        "certified_ces": fam.certified,
        "span": span.as_ref().map(views::span),
        "family": serde_json::to_value(MatrixDocument::from_family(&fam)).expect("document"),
        "seed": c.seed,
        "tolerances": { "rank_tol": tol, "ces_tol": ces.tol },
    });
    Ok(Outcome { text: views::flat_text(&body), body, ok: true })
}

fn run_reproduce(example: &str, c: &Common, trials: usize) -> Result<Outcome, CliError> {
    let opts = ReproduceOptions { seed: c.seed, trials, multistarts: c.multistarts };
    let reports = reproduce(example, &opts).map_err(|e| match e {
        Error::UnknownExample(_) => CliError::Input(e.to_string()),
        other => CliError::Internal(other.to_string()),
    })?;
    let ok = reports.iter().all(|r| r.passed());
    Ok(Outcome {
        body: serde_json::to_value(&reports).expect("reports serialize"),
        text: views::reports_text(&reports),
        ok,
    })
}

fn emit(outcome: &Outcome, c: &Common) -> Result<(), CliError> {
    let rendered = match c.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.body).map_err(|e| CliError::Internal(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Text => outcome.text.clone(),
    };
    match &c.output {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::write(p, rendered).map_err(|e| CliError::Internal(format!("{}: {e}", p.display())))
        }
        _ => io::stdout().write_all(rendered.as_bytes()).map_err(|e| CliError::Internal(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (result, common) = match &cli.command {
        Command::CheckCes { input, common } => (check_ces(input, common), common),
        Command::AnalyzeWitness { input, common } => (analyze_witness(input, common), common),
        Command::FindProductVectors { input, common } => (find_product_vectors(input, common), common),
        Command::Reproduce { example, common, trials } => (run_reproduce(example, common, *trials), common),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.code());
        }
    };
    if let Err(e) = emit(&outcome, common) {
        eprintln!("error: {e}");
        return ExitCode::from(e.code());
    }
    ExitCode::from(if outcome.ok { 0 } else { 1 })
}
