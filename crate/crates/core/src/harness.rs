//! Command-line front end. Exit codes: 0 success, 1 a violated inequality,
//! 2 usage or instance errors, 3 numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::instance::{self, GenRequest, InstanceFile, NormFile, SubspaceForm};
use crate::measures::{self, CertifiedValue, Check, Form, MeasureError, ProblemInstance};
use crate::par;
use crate::renegar::{distance_bounds, RenegarError};
use crate::report::{CheckRow, MeasureRow, Report};
use crate::suites::{run_suite, Suite, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Pool size override, read once at startup.
pub const THREADS_ENV: &str = "CONIC_COND_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "conic-cond",
    version,
    about = "Condition measures for conic feasibility problems"
)]
struct Cli {
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate condition measures of one instance.
    Measure {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = MeasureArg::All)]
        measure: MeasureArg,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// CSV report path; a summary goes to stdout either way.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified bounds on the distance to infeasibility of a data map.
    Renegar {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        form: FormArg,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Rounds of random certificate search for a smaller perturbation.
        #[arg(long, default_value_t = 0)]
        tighten: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run seeded property suites.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true)]
        debug_corrupt_bounds: bool,
    },
    /// Write a random instance.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        cone: ConeArg,
        /// Ambient dimension; matrix order for psd.
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        subspace_dim: usize,
        #[arg(long, value_enum, default_value_t = RequireArg::Either)]
        require: RequireArg,
        #[arg(long, value_enum, default_value_t = NormArg::L2)]
        norm: NormArg,
        #[arg(long, value_enum, default_value_t = FormArg::Image)]
        form: FormArg,
        /// Instance path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum MeasureArg {
    Nu,
    NuBar,
    NuExt,
    NuBarExt,
    Sigma,
    SigmaExt,
    Sym,
    Theta,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FormArg {
    Image,
    Kernel,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SuiteArg {
    Holder,
    PropNu,
    RenegarSandwich,
    NuSigma,
    Symmetry,
    ExampleWedge,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ConeArg {
    Orthant,
    Wedge,
    Soc,
    Psd,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum RequireArg {
    Feasible,
    Infeasible,
    Either,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum NormArg {
    L1,
    L2,
    Linf,
    Induced,
}

/// A failure mapped to its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Failure {
        Failure {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }

    fn numerical(message: impl ToString) -> Failure {
        Failure {
            code: EXIT_NUMERICAL,
            message: message.to_string(),
        }
    }
}

impl From<instance::InstanceError> for Failure {
    fn from(e: instance::InstanceError) -> Failure {
        use instance::InstanceError as E;
        match e {
            E::Measure(m) => m.into(),
            E::Renegar(r) => r.into(),
            other => Failure::usage(other),
        }
    }
}

impl From<MeasureError> for Failure {
    fn from(e: MeasureError) -> Failure {
        match e {
            MeasureError::DimensionMismatch(_)
            | MeasureError::BadTolerance(_)
            | MeasureError::Unsupported(_) => Failure::usage(e),
            other => Failure::numerical(other),
        }
    }
}

impl From<RenegarError> for Failure {
    fn from(e: RenegarError) -> Failure {
        match e {
            RenegarError::Measure(m) => m.into(),
            RenegarError::DimensionMismatch(_)
            | RenegarError::Unsupported(_)
            | RenegarError::NonFinite => Failure::usage(e),
            other => Failure::numerical(other),
        }
    }
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.trim().parse::<usize>() {
            Ok(n) => {
                par::init_threads(n);
            }
            Err(_) => {
                eprintln!("error: {THREADS_ENV} must be a thread count, got {v:?}");
                return EXIT_USAGE;
            }
        }
    }
    let parallel = par::available() && !cli.sequential;
    match dispatch(cli.command, parallel) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Exit-code wrapper for `main`.
pub fn main_exit() -> ExitCode {
    ExitCode::from(run_cli(std::env::args_os()) as u8)
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Failure::usage(format!("--tol must be positive, got {tol}")))
    }
}

fn dispatch(command: Command, parallel: bool) -> Result<i32, Failure> {
    match command {
        Command::Measure {
            instance,
            measure,
            tol,
            out,
        } => {
            check_tol(tol)?;
            let file = InstanceFile::read(&instance)?;
            let inst = file.to_instance()?;
            let report = measure_report(&inst, measure, tol)?;
            emit(&report, out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Renegar {
            instance,
            form,
            tol,
            tighten,
            seed,
            out,
        } => {
            check_tol(tol)?;
            let file = InstanceFile::read(&instance)?;
            let inst = file.to_instance()?;
            let form = match form {
                FormArg::Image => Form::Image,
                FormArg::Kernel => Form::Kernel,
            };
            let map = file.data_map(form)?;
            let start = Instant::now();
            let mut db = distance_bounds(&map, &inst, tol)?;
            if tighten > 0 {
                db.tighten(&map, &inst.cone, seed, tighten)?;
            }
            let wall = start.elapsed().as_secs_f64() * 1e3;
            let kind = "renegar";
            let measure_name = if form == Form::Image { "nu" } else { "nu_bar" };
            let cert = &db.certificate;
            let measures = vec![
                MeasureRow::new(kind, "dist", &db.dist, tol, wall),
                MeasureRow::new(kind, measure_name, &db.measure, tol, wall),
                MeasureRow::new(kind, "op_norm", &db.op_norm, tol, wall),
                MeasureRow::new(kind, "inv_norm", &db.inv_norm, tol, wall),
                MeasureRow::from_interval(kind, "perturbation_norm", cert.norm, "bound", tol, wall),
            ];
            let cap = db.measure.interval().mul(db.op_norm.interval());
            let checks = [
                Check::new(
                    "dist lower <= dist upper",
                    pt(db.dist.lower),
                    pt(db.dist.upper),
                    0.0,
                ),
                Check::new(
                    format!("|dA| <= {measure_name}*|A|"),
                    cert.norm,
                    pt(cap.hi),
                    tol,
                ),
                Check::new(
                    "certificate residual <= 1e-9",
                    pt(cert.residual),
                    pt(1e-9),
                    0.0,
                ),
            ];
            let report = Report {
                measures,
                checks: checks.iter().map(|c| CheckRow::new(kind, c)).collect(),
            };
            emit(&report, out.as_deref())?;
            Ok(if report.violated() > 0 {
                EXIT_VIOLATED
            } else {
                EXIT_OK
            })
        }
        Command::Verify {
            suite,
            trials,
            seed,
            tol,
            out,
            debug_corrupt_bounds,
        } => {
            check_tol(tol)?;
            let cfg = SuiteConfig {
                trials,
                seed,
                tol,
                parallel,
                corrupt_bounds: debug_corrupt_bounds,
            };
            let suites: Vec<Suite> = match suite {
                SuiteArg::All => Suite::ALL.to_vec(),
                SuiteArg::Holder => vec![Suite::Holder],
                SuiteArg::PropNu => vec![Suite::PropNu],
                SuiteArg::RenegarSandwich => vec![Suite::RenegarSandwich],
                SuiteArg::NuSigma => vec![Suite::NuSigma],
                SuiteArg::Symmetry => vec![Suite::Symmetry],
                SuiteArg::ExampleWedge => vec![Suite::ExampleWedge],
            };
            let mut report = Report::default();
            for s in suites {
                let r = run_suite(s, &cfg).map_err(Failure::numerical)?;
                let held = r.checks.iter().filter(|c| c.status == "HOLDS").count();
                println!(
                    "{:<18} {:>5} checks, {} held, {} violated",
                    s.name(),
                    r.checks.len(),
                    held,
                    r.violated()
                );
                report.extend(r);
            }
            for c in report.checks.iter().filter(|c| c.status != "HOLDS") {
                println!(
                    "{:<12} {} {} (slack {:.3e})",
                    c.status, c.kind, c.name, c.slack
                );
            }
            if let Some(path) = out {
                report.write(&path).map_err(Failure::usage)?;
            }
            Ok(if report.violated() > 0 {
                EXIT_VIOLATED
            } else {
                EXIT_OK
            })
        }
        Command::Gen {
            seed,
            cone,
            dim,
            subspace_dim,
            require,
            norm,
            form,
            out,
        } => {
            let cone = match cone {
                ConeArg::Orthant => instance::ConeKind::Orthant,
                ConeArg::Wedge => instance::ConeKind::Wedge,
                ConeArg::Soc => instance::ConeKind::Soc,
                ConeArg::Psd => instance::ConeKind::Psd,
            };
            let require = match require {
                RequireArg::Feasible => instance::Require::Feasible,
                RequireArg::Infeasible => instance::Require::Infeasible,
                RequireArg::Either => instance::Require::Either,
            };
            let norm = match norm {
                NormArg::L1 => NormFile::L1,
                NormArg::L2 => NormFile::L2,
                NormArg::Linf => NormFile::Linf,
                NormArg::Induced => NormFile::Induced { e: None },
            };
            let form = match form {
                FormArg::Image => SubspaceForm::Span,
                FormArg::Kernel => SubspaceForm::Kernel,
            };
            let req = GenRequest::new(seed, cone, dim, subspace_dim, require)
                .norm(norm)
                .form(form);
            let file = instance::generate(&req)?;
            match out {
                Some(path) => file.write(&path)?,
                None => print!("{}", file.emit()),
            }
            Ok(EXIT_OK)
        }
    }
}

fn pt(v: f64) -> crate::interval::Interval {
    crate::interval::Interval::point(v)
}

fn measure_report(inst: &ProblemInstance, which: MeasureArg, tol: f64) -> Result<Report, Failure> {
    type Eval = fn(&ProblemInstance, f64) -> Result<CertifiedValue, MeasureError>;
    let ext = inst.second_norm.is_some();
    let all: [(MeasureArg, &str, Eval, bool); 8] = [
        (MeasureArg::Nu, "nu", measures::nu, true),
        (MeasureArg::NuBar, "nu_bar", measures::nu_bar, true),
        (MeasureArg::NuExt, "nu_ext", measures::nu_ext, ext),
        (
            MeasureArg::NuBarExt,
            "nu_bar_ext",
            measures::nu_bar_ext,
            ext,
        ),
        (MeasureArg::Sigma, "sigma", measures::sigma, true),
        (MeasureArg::SigmaExt, "sigma_ext", measures::sigma_ext, ext),
        (MeasureArg::Sym, "sym", measures::sym_measure, true),
        (
            MeasureArg::Theta,
            "theta",
            |i, _| Ok(measures::theta(i)),
            true,
        ),
    ];
    let mut report = Report::default();
    for (arg, name, eval, applicable) in all {
        let selected = which == arg || (which == MeasureArg::All && applicable);
        if !selected {
            continue;
        }
        let start = Instant::now();
        match eval(inst, tol) {
            Ok(v) => {
                let wall = start.elapsed().as_secs_f64() * 1e3;
                report
                    .measures
                    .push(MeasureRow::new("measure", name, &v, tol, wall));
            }
            // some measures are undefined on some subspaces; `all` skips them
            Err(MeasureError::TrivialComplement | MeasureError::ZeroNotInS)
                if which == MeasureArg::All =>
            {
                eprintln!("note: {name} is undefined for this instance");
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(report)
}

fn emit(report: &Report, out: Option<&Path>) -> Result<(), Failure> {
    print!("{}", report.summary());
    if let Some(path) = out {
        report.write(path).map_err(Failure::usage)?;
    }
    Ok(())
}
