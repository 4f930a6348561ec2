use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use laxflow::config::Tolerances;
use laxflow::flows::{integrate, FieldSpec};
use laxflow::spectral::{char_poly, smoothness_check, CurveReport, SpectralCurve};
use laxflow::verify::{verify_suite, Suite};
use laxflow::{gauge, sov, LaxError, Node, PolyMatrix, SampleSlice, C64};

#[derive(Parser)]
#[command(name = "laxflow", version, about = "Polynomial Lax matrices: sampling, curves, normal forms, flows, separation of variables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a seeded random matrix as JSON.
    Sample {
        #[arg(short, long)]
        r: usize,
        #[arg(short, long)]
        d: usize,
        #[arg(long, value_enum, default_value_t = SliceArg::Full)]
        slice: SliceArg,
        /// Marked point for `--slice s-c`.
        #[arg(long, default_value = "0")]
        at: Node,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Spectral curve coefficients, genus and smoothness report.
    Curve { input: Option<PathBuf> },
    /// Gauge a matrix onto the representative slice at a point.
    Normalform {
        #[arg(long)]
        at: Node,
        input: Option<PathBuf>,
    },
    /// Integrate a Lax field with RK4 and export the trajectory.
    Flow {
        #[arg(long, value_enum)]
        field: FieldArg,
        /// Evaluation point of the Upsilon and projected fields.
        #[arg(long, default_value = "0")]
        a: C64,
        #[arg(long, default_value_t = 1)]
        p: usize,
        /// Coefficient index of a Y field.
        #[arg(long, default_value_t = 0)]
        j: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// CSV instead of JSON.
        #[arg(long)]
        csv: bool,
        /// Write matrix coefficients on every n-th CSV row only.
        #[arg(long)]
        stride: Option<usize>,
        input: Option<PathBuf>,
    },
    /// Divisor of a slice member at infinity.
    Sov { input: Option<PathBuf> },
    /// Theta-divisor membership report at a point.
    Theta {
        #[arg(long)]
        at: Node,
        input: Option<PathBuf>,
    },
    /// Run the property suites; exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// TOML file with a [tolerances] table.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Record wall time per check.
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SliceArg {
    Full,
    SInfinity,
    #[value(name = "s-c")]
    SC,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    Upsilon,
    Y,
    Projected,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    All,
    Flows,
    Poisson,
    Sov,
    Gauge,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::All => Suite::All,
            SuiteArg::Flows => Suite::Flows,
            SuiteArg::Poisson => Suite::Poisson,
            SuiteArg::Sov => Suite::Sov,
            SuiteArg::Gauge => Suite::Gauge,
        }
    }
}

#[derive(Serialize)]
struct CurveOut {
    curve: SpectralCurve,
    report: CurveReport,
}

#[derive(Serialize)]
struct NormalFormOut {
    slice_member: PolyMatrix,
    gauge: gauge::GaugeElement,
}

fn read_matrix(path: Option<PathBuf>) -> laxflow::Result<PolyMatrix> {
    let text = match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)?,
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    PolyMatrix::from_json(&text)
}

// A closed pipe on stdout (e.g. `| head`) ends output quietly.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn print_json<T: Serialize>(value: &T) {
    emit(&(serde_json::to_string_pretty(value).expect("serializable") + "\n"));
}

fn run(cmd: Command) -> laxflow::Result<bool> {
    match cmd {
        Command::Sample { r, d, slice, at, seed } => {
            let slice = match slice {
                SliceArg::Full => SampleSlice::Full,
                SliceArg::SInfinity => SampleSlice::SInfinity,
                SliceArg::SC => SampleSlice::at(at),
            };
            emit(&(PolyMatrix::random(r, d, seed, slice)?.to_json_pretty() + "\n"));
        }
        Command::Curve { input } => {
            let curve = char_poly(&read_matrix(input)?);
            let report = smoothness_check(&curve);
            print_json(&CurveOut { curve, report });
        }
        Command::Normalform { at, input } => {
            let (slice_member, gauge) = gauge::normal_form(&read_matrix(input)?, at)?;
            print_json(&NormalFormOut { slice_member, gauge });
        }
        Command::Flow { field, a, p, j, t, dt, csv, stride, input } => {
            let spec = match field {
                FieldArg::Upsilon => FieldSpec::Upsilon { a, p },
                FieldArg::Y => FieldSpec::YField { j, p },
                FieldArg::Projected => FieldSpec::Projected { a, p },
            };
            let traj = integrate(&read_matrix(input)?, spec, t, dt)?;
            if csv {
                emit(&traj.to_csv(stride));
            } else {
                emit(&(traj.to_json() + "\n"));
            }
        }
        Command::Sov { input } => {
            emit(&(sov::sov_divisor(&read_matrix(input)?)?.to_json_pretty() + "\n"));
        }
        Command::Theta { at, input } => {
            print_json(&gauge::theta_membership(&read_matrix(input)?, at)?);
        }
        Command::Verify { suite, seed, config, timings } => {
            let tol = Tolerances::resolve(config.as_deref())?;
            let report = verify_suite(seed, suite.into(), &tol, timings);
            for c in &report.checks {
                eprintln!("{}", c.line());
            }
            emit(&(report.to_json() + "\n"));
            return Ok(report.all_passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ (LaxError::Parse(_) | LaxError::InvalidArgument(_) | LaxError::Io(_))) => {
            eprintln!("laxflow: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("laxflow: {e}");
            ExitCode::from(1)
        }
    }
}
