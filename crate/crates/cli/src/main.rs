//! Command-line front end for the two-mode Gaussian separability toolbox.
//!
//! Exit codes follow the verdict: 0 separable, 1 entangled, 2 unphysical,
//! 3 boundary, 64 for any input or configuration error. `verify` exits 0
//! only when every acceptance check passes.

mod grid;

use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gauss_sep_core::criteria::{
    dgcz_standard_bound, explicit_bound, optimal_squeezing, separability_verdict, simon_det_margin,
    Verdict,
};
use gauss_sep_core::gaussian::{CovarianceMatrix, StandardForm};
use gauss_sep_core::io::{CovarianceJson, StandardFormJson};
use gauss_sep_core::oracle::{
    random_physical_covariance, random_physical_standard_form, OracleConfig,
};
use gauss_sep_core::smallmat::TOL_PSD;
use gauss_sep_core::suite::{run_suite, SuiteConfig};

use crate::grid::GridSpec;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] gauss_sep_core::Error),
    #[error("{0}")]
    Input(String),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(gauss_sep_core::Error::Unphysical { .. }) => 2,
            _ => 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Parser)]
#[command(
    name = "gauss-sep",
    version,
    about = "Separability of two-mode Gaussian states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide separability of a covariance matrix or standard form
    Check {
        /// JSON input file; stdin when omitted or "-"
        #[arg(long)]
        input: Option<PathBuf>,
        /// Standard-form parameter a, bypassing JSON input (needs b, c1, c2)
        #[arg(long, conflicts_with = "input", allow_negative_numbers = true)]
        a: Option<f64>,
        #[arg(long, conflicts_with = "input", allow_negative_numbers = true)]
        b: Option<f64>,
        #[arg(long, conflicts_with = "input", allow_negative_numbers = true)]
        c1: Option<f64>,
        #[arg(long, conflicts_with = "input", allow_negative_numbers = true)]
        c2: Option<f64>,
        /// Relative tolerance for positivity decisions
        #[arg(long, default_value_t = TOL_PSD)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Reduce a covariance matrix to standard form
    Reduce {
        /// JSON input file; stdin when omitted or "-"
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = TOL_PSD)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Closed-form separability bound and optimal squeezing at (a, b, t)
    Bound {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        /// Correlation ratio |c2| / c1, in [0, 1]
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Tabulate the bound hierarchy over a parameter grid as CSV
    Scan {
        /// Axis spec "a=start:stop:count,b=...,t=..." (inclusive linspace)
        #[arg(long, default_value = "a=0.5:3:6,b=0.5:3:6,t=0:1:11")]
        grid: String,
    },
    /// Generate a random physical state as a JSON document
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit standard-form parameters instead of a full matrix
        #[arg(long)]
        standard_form: bool,
    },
    /// Run the oracle verification suite
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Brute-force grid resolution per squeezing axis
        #[arg(long, default_value_t = 200)]
        grid_points: usize,
        /// Test hook: perturb the D polynomial by +0.01 so the formula
        /// checks must fail
        #[arg(long)]
        inject_d_fault: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn main() {
    // The Rust runtime ignores SIGPIPE, which turns `gauss-sep scan | head`
    // into a write panic; line-oriented tools should die quietly instead.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 2 on usage errors by default, which this tool
            // reserves for unphysical states; parse failures are 64.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Check {
            input,
            a,
            b,
            c1,
            c2,
            tol,
            format,
        } => {
            let direct = direct_standard_form(a, b, c1, c2)?;
            cmd_check(input.as_deref(), direct, tol, format)
        }
        Command::Reduce { input, tol, format } => cmd_reduce(input.as_deref(), tol, format),
        Command::Bound { a, b, t, format } => cmd_bound(a, b, t, format),
        Command::Scan { grid } => cmd_scan(&grid),
        Command::Random {
            seed,
            standard_form,
        } => cmd_random(seed, standard_form),
        Command::Verify {
            seed,
            grid_points,
            inject_d_fault,
            format,
        } => cmd_verify(seed, grid_points, inject_d_fault, format),
    }
}

fn read_input(path: Option<&Path>) -> Result<String, CliError> {
    let from_stdin = || {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Input(format!("failed to read stdin: {e}")))?;
        Ok(text)
    };
    match path {
        None => from_stdin(),
        Some(p) if p.as_os_str() == "-" => from_stdin(),
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| CliError::Input(format!("failed to read {}: {e}", p.display()))),
    }
}

/// Accepts either input document: a covariance matrix (keyed by `v`) or
/// standard-form parameters (keyed by `a`).
fn parse_state(text: &str) -> Result<CovarianceMatrix, CliError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let object = value
        .as_object()
        .ok_or_else(|| CliError::Input("input must be a JSON object".to_string()))?;
    if object.contains_key("v") {
        Ok(serde_json::from_value::<CovarianceJson>(value)?.to_matrix()?)
    } else if object.contains_key("a") {
        Ok(serde_json::from_value::<StandardFormJson>(value)?
            .to_form()?
            .to_matrix())
    } else {
        Err(CliError::Input(
            "expected a covariance document {\"ordering\", \"v\"} \
             or a standard-form document {\"a\", \"b\", \"c1\", \"c2\"}"
                .to_string(),
        ))
    }
}

/// Resolves the optional `--a/--b/--c1/--c2` group: all four present builds
/// a state, none defers to JSON input, anything partial is an error.
fn direct_standard_form(
    a: Option<f64>,
    b: Option<f64>,
    c1: Option<f64>,
    c2: Option<f64>,
) -> Result<Option<CovarianceMatrix>, CliError> {
    match (a, b, c1, c2) {
        (None, None, None, None) => Ok(None),
        (Some(a), Some(b), Some(c1), Some(c2)) => {
            Ok(Some(StandardForm::new(a, b, c1, c2)?.to_matrix()))
        }
        _ => Err(CliError::Input(
            "--a, --b, --c1, --c2 must be given together".to_string(),
        )),
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Separable => "separable",
        Verdict::Entangled => "entangled",
        Verdict::Unphysical => "unphysical",
        Verdict::Boundary => "boundary",
    }
}

fn verdict_exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Separable => 0,
        Verdict::Entangled => 1,
        Verdict::Unphysical => 2,
        Verdict::Boundary => 3,
    }
}

fn cmd_check(
    input: Option<&Path>,
    direct: Option<CovarianceMatrix>,
    tol: f64,
    format: Format,
) -> Result<i32, CliError> {
    let v = match direct {
        Some(v) => v,
        None => parse_state(&read_input(input)?)?,
    };
    let report = separability_verdict(&v, tol)?;
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        Format::Text => {
            println!("verdict: {}", verdict_name(report.verdict));
            println!("physicality margin: {}", report.physical.min_eigenvalue);
            println!("ppt margin: {}", report.ppt_full.min_eigenvalue);
            if let Some(c) = &report.criteria {
                let sf = &c.standard_form;
                println!(
                    "standard form: a={} b={} c1={} c2={}",
                    sf.a(),
                    sf.b(),
                    sf.c1(),
                    sf.c2()
                );
                println!("c1_max: {}", c.explicit_bound.c1_max);
                println!(
                    "optimal squeezing: r1={} r2={}",
                    c.optimal_squeeze.r1, c.optimal_squeeze.r2
                );
                println!("simon margin: {}", c.simon_det_margin);
                println!("dgcz margin: {}", c.dgcz_margin);
            }
        }
        Format::Csv => return Err(CliError::Input("check does not produce CSV".to_string())),
    }
    Ok(verdict_exit_code(report.verdict))
}

#[derive(Serialize)]
struct ReduceOutput {
    standard_form: StandardFormJson,
    /// Correlation ratio |c2| / c1; absent when the cross block vanishes.
    t: Option<f64>,
    /// The local symplectic taking the input to the standard form.
    transform: [[f64; 4]; 4],
}

fn cmd_reduce(input: Option<&Path>, tol: f64, format: Format) -> Result<i32, CliError> {
    let v = parse_state(&read_input(input)?)?;
    let (sf, transform) = v.to_standard_form(tol)?;
    let out = ReduceOutput {
        standard_form: StandardFormJson::from_form(&sf),
        t: sf.t(),
        transform: *transform.matrix().entries(),
    };
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out)?),
        Format::Text => {
            println!(
                "standard form: a={} b={} c1={} c2={}",
                sf.a(),
                sf.b(),
                sf.c1(),
                sf.c2()
            );
            for row in out.transform {
                println!("transform: {} {} {} {}", row[0], row[1], row[2], row[3]);
            }
        }
        Format::Csv => return Err(CliError::Input("reduce does not produce CSV".to_string())),
    }
    Ok(0)
}

#[derive(Serialize)]
struct BoundOutput {
    a: f64,
    b: f64,
    t: f64,
    c1_max: f64,
    r1: f64,
    r2: f64,
    dgcz_bound: f64,
    /// Simon margin at (a, b, c1_max, t * c1_max); vanishes on the
    /// separability boundary by construction.
    simon_margin_at_boundary: f64,
}

fn cmd_bound(a: f64, b: f64, t: f64, format: Format) -> Result<i32, CliError> {
    let bound = explicit_bound(a, b, t)?;
    let squeeze = optimal_squeezing(a, b, t)?;
    let dgcz = dgcz_standard_bound(a, b, t)?;
    let boundary = StandardForm::new(a, b, bound.c1_max, t * bound.c1_max)?;
    let out = BoundOutput {
        a,
        b,
        t,
        c1_max: bound.c1_max,
        r1: squeeze.r1,
        r2: squeeze.r2,
        dgcz_bound: dgcz,
        simon_margin_at_boundary: simon_det_margin(&boundary),
    };
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out)?),
        Format::Text => {
            println!("c1_max: {}", out.c1_max);
            println!("optimal squeezing: r1={} r2={}", out.r1, out.r2);
            println!("dgcz bound: {}", out.dgcz_bound);
            println!("simon margin at boundary: {}", out.simon_margin_at_boundary);
        }
        Format::Csv => return Err(CliError::Input("bound does not produce CSV".to_string())),
    }
    Ok(0)
}

fn cmd_scan(grid: &str) -> Result<i32, CliError> {
    let spec = GridSpec::parse(grid)?;
    // Single-threaded on purpose: row bytes must not depend on scheduling.
    let mut out = String::from("a,b,t,c1_max,r1,r2,dgcz_bound,hierarchy_gap\n");
    for (a, b, t) in spec.points() {
        let bound = explicit_bound(a, b, t)?;
        let squeeze = optimal_squeezing(a, b, t)?;
        let dgcz = dgcz_standard_bound(a, b, t)?;
        let gap = dgcz - bound.c1_max;
        out.push_str(&format!(
            "{a},{b},{t},{},{},{},{dgcz},{gap}\n",
            bound.c1_max, squeeze.r1, squeeze.r2
        ));
    }
    print!("{out}");
    Ok(0)
}

fn cmd_random(seed: u64, standard_form: bool) -> Result<i32, CliError> {
    if standard_form {
        let sf = random_physical_standard_form(seed);
        println!(
            "{}",
            serde_json::to_string_pretty(&StandardFormJson::from_form(&sf))?
        );
    } else {
        let v = random_physical_covariance(seed);
        println!(
            "{}",
            serde_json::to_string_pretty(&CovarianceJson::from_matrix(&v))?
        );
    }
    Ok(0)
}

fn cmd_verify(
    seed: u64,
    grid_points: usize,
    inject_d_fault: bool,
    format: Format,
) -> Result<i32, CliError> {
    let cfg = SuiteConfig {
        oracle: OracleConfig {
            grid_points,
            seed,
            ..OracleConfig::default()
        },
        d_fault: if inject_d_fault { 0.01 } else { 0.0 },
        ..SuiteConfig::default()
    };
    let report = run_suite(&cfg)?;
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        Format::Text => print!("{}", report.text_summary()),
        Format::Csv => return Err(CliError::Input("verify does not produce CSV".to_string())),
    }
    Ok(if report.all_pass { 0 } else { 1 })
}
