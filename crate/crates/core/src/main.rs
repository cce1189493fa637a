use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use nitsche_lab::comparison::{hessian_check, osserman_check, ComparisonReport};
use nitsche_lab::metric::{CurvatureBound, CurvatureSign, MetricSpec, RotMetric};
use nitsche_lab::minimal::{corollary_check, WeierstrassData};
use nitsche_lab::modulus::{capacity, DoublyConnectedDomain, MaskedDomain};
use nitsche_lab::pde::{
    max_harmonicity_residual, solve_dirichlet_with, AnnulusGrid, Orientation, SolverConfig,
};
use nitsche_lab::radial::{critical_outer, shoot, solve_bvp, BvpOutcome};
use nitsche_lab::report::{
    check_bound, verify_end_to_end, BoundReport, SolverChoice, VerifyParams,
};
use nitsche_lab::{Error, Result};

const EXIT_MATH_FAIL: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_INVALID: u8 = 4;

/// Sub-checks whose failure means the discrete map is not trustworthy.
const NUMERICAL_CHECKS: [&str; 2] = ["solver_converged", "harmonicity"];

#[derive(Parser)]
#[command(
    name = "nitsche-lab",
    version,
    about = "Harmonic maps between annuli and Nitsche-type bounds"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Export the profile or field as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Override the pass tolerance of the main check.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Radial two-point problem for a rotationally symmetric metric.
    SolveRadial {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        rho1: f64,
        #[arg(
            long,
            required_unless_present = "critical",
            conflicts_with = "critical"
        )]
        rho2: Option<f64>,
        /// Report the outer radius of the critical map instead.
        #[arg(long)]
        critical: bool,
        #[arg(long = "mod")]
        modulus: f64,
    },
    /// Newton–Krylov solve of the Dirichlet problem on a log-polar grid.
    SolveMap {
        #[arg(long)]
        metric: PathBuf,
        #[command(flatten)]
        map: MapArgs,
    },
    /// Conformal modulus by capacity.
    Modulus {
        /// `circular <r1> <r2>` or a JSON domain file.
        #[arg(long, num_args = 1..=3, required = true)]
        domain: Vec<String>,
        #[arg(long, default_value_t = 256)]
        n: usize,
    },
    /// Corollary check on a catalog minimal surface.
    Minimal {
        #[arg(long, required_unless_present = "list")]
        surface: Option<String>,
        #[arg(long, required_unless_present = "list")]
        rho1: Option<f64>,
        #[arg(long, required_unless_present = "list")]
        rho2: Option<f64>,
        #[arg(long, default_value_t = 256)]
        n: usize,
        /// List catalog surfaces.
        #[arg(long)]
        list: bool,
    },
    /// Hessian and Osserman comparison.
    Compare {
        #[arg(long)]
        metric: PathBuf,
        /// `constant` for the model space of the metric's bound, or a metric file.
        #[arg(long, default_value = "constant")]
        against: String,
        #[arg(long)]
        rho_max: f64,
    },
    /// Arithmetic check of both sides of the bound.
    CheckBound {
        #[command(flatten)]
        bound: BoundArgs,
        #[arg(long)]
        rho1: f64,
        #[arg(long)]
        rho2: f64,
        #[arg(long = "mod")]
        modulus: f64,
    },
    /// Solve, run every diagnostic and report.
    Verify {
        #[arg(long)]
        metric: PathBuf,
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_enum, default_value_t = SolverArg::Grid)]
        solver: SolverArg,
    },
}

#[derive(Args)]
struct MapArgs {
    #[arg(long)]
    r1: f64,
    #[arg(long)]
    r2: f64,
    #[arg(long)]
    rho1: f64,
    #[arg(long)]
    rho2: f64,
    #[arg(long, default_value_t = 64)]
    nr: usize,
    #[arg(long, default_value_t = 64)]
    ntheta: usize,
    /// Send the inner circle to the outer boundary and renormalize by inversion.
    #[arg(long)]
    reversed: bool,
}

impl MapArgs {
    fn orientation(&self) -> Orientation {
        if self.reversed {
            Orientation::InnerToOuter
        } else {
            Orientation::InnerToInner
        }
    }
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, value_enum)]
    sign: SignArg,
    #[arg(long)]
    kappa: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Negative,
    Zero,
    Positive,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Grid,
    Radial,
}

/// What a subcommand produced.
struct Outcome {
    report: Value,
    code: u8,
    summary: String,
}

fn code_for(pass: bool) -> u8 {
    if pass {
        0
    } else {
        EXIT_MATH_FAIL
    }
}

fn load_metric(path: &Path) -> Result<RotMetric> {
    MetricSpec::load(path)?.build()
}

fn with_csv(
    path: Option<&PathBuf>,
    write: impl FnOnce(BufWriter<File>) -> Result<()>,
) -> Result<()> {
    match path {
        Some(p) => write(BufWriter::new(File::create(p)?)),
        None => Ok(()),
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn apply_tol(report: &mut BoundReport, tol: Option<f64>) {
    if let Some(t) = tol {
        report.tolerance = t;
        report.finalize();
    }
}

fn bound_outcome(report: &BoundReport) -> Result<Outcome> {
    Ok(Outcome {
        report: to_value(report)?,
        code: code_for(report.passed()),
        summary: format!(
            "{}: lhs = {:.9}, rhs = {:.9}, margin = {:.3e}",
            if report.passed() { "PASS" } else { "FAIL" },
            report.lhs,
            report.rhs,
            report.margin
        ),
    })
}

fn comparison_outcome(
    hessian: &ComparisonReport,
    osserman: &ComparisonReport,
    tol: Option<f64>,
) -> Result<Outcome> {
    let ok = |r: &ComparisonReport| match tol {
        Some(t) => r.min_margin >= -t,
        None => r.pass,
    };
    let pass = ok(hessian) && ok(osserman);
    let code = if hessian.precondition_violated() || osserman.precondition_violated() {
        EXIT_INVALID
    } else {
        code_for(pass)
    };
    Ok(Outcome {
        report: json!({ "hessian": hessian, "osserman": osserman, "pass": pass }),
        code,
        summary: format!(
            "{}: hessian min margin {:.3e}, osserman min margin {:.3e}",
            if pass { "PASS" } else { "FAIL" },
            hessian.min_margin,
            osserman.min_margin
        ),
    })
}

fn parse_bound(b: &BoundArgs) -> Result<CurvatureBound> {
    let sign = match b.sign {
        SignArg::Negative => CurvatureSign::Negative,
        SignArg::Zero => CurvatureSign::Zero,
        SignArg::Positive => CurvatureSign::Positive,
    };
    CurvatureBound::new(sign, b.kappa)
}

fn parse_domain(args: &[String]) -> Result<DoublyConnectedDomain> {
    let bad = || {
        Error::InvalidInput(format!(
            "expected `circular <r1> <r2>` or a file, got {args:?}"
        ))
    };
    match args {
        [kind, r1, r2] if kind == "circular" => {
            let r1 = r1.parse().map_err(|_| bad())?;
            let r2 = r2.parse().map_err(|_| bad())?;
            Ok(DoublyConnectedDomain::Circular { r1, r2 })
        }
        [file] => {
            let spec: DomainFile = serde_json::from_str(&std::fs::read_to_string(file)?)?;
            spec.into_domain()
        }
        _ => Err(bad()),
    }
}

#[derive(serde::Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum DomainFile {
    Circular {
        r1: f64,
        r2: f64,
    },
    Geodesic {
        metric: MetricSpec,
        rho1: f64,
        rho2: f64,
        n: Option<usize>,
    },
}

impl DomainFile {
    fn into_domain(self) -> Result<DoublyConnectedDomain> {
        match self {
            DomainFile::Circular { r1, r2 } => Ok(DoublyConnectedDomain::Circular { r1, r2 }),
            DomainFile::Geodesic {
                metric,
                rho1,
                rho2,
                n,
            } => Ok(DoublyConnectedDomain::Masked(MaskedDomain::geodesic(
                &metric.build()?,
                rho1,
                rho2,
                n.unwrap_or(256),
            )?)),
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::SolveRadial {
            metric,
            rho1,
            rho2,
            critical,
            modulus,
        } => {
            let m = load_metric(metric)?;
            if *critical {
                let outer = critical_outer(&m, *rho1, *modulus)?;
                if g.csv.is_some() {
                    let p = shoot(&m, *rho1, 0.0, *modulus)?;
                    with_csv(g.csv.as_ref(), |w| p.write_csv(w))?;
                }
                return Ok(Outcome {
                    report: json!({ "rho1": rho1, "mod": modulus, "critical_outer": outer }),
                    code: 0,
                    summary: format!("critical outer radius {outer:.12}"),
                });
            }
            let rho2 = rho2.expect("clap enforces --rho2 without --critical");
            let outcome = solve_bvp(&m, *rho1, rho2, *modulus)?;
            if let BvpOutcome::Solved(p) = &outcome {
                with_csv(g.csv.as_ref(), |w| p.write_csv(w))?;
            }
            let summary = match &outcome {
                BvpOutcome::Solved(p) => format!(
                    "solved: slope0 = {:.12}, residual {:.3e}",
                    p.slope0, p.residual
                ),
                BvpOutcome::NoSolution { critical_outer } => {
                    format!("no solution: critical outer radius {critical_outer:.12} exceeds rho2")
                }
            };
            Ok(Outcome {
                code: code_for(matches!(outcome, BvpOutcome::Solved(_))),
                report: to_value(&outcome)?,
                summary,
            })
        }
        Command::SolveMap { metric, map } => {
            let m = load_metric(metric)?;
            let grid = AnnulusGrid::new(map.r1, map.r2, map.nr, map.ntheta)?;
            let (f, rep) = solve_dirichlet_with(
                grid,
                &m,
                map.rho1,
                map.rho2,
                map.orientation(),
                &SolverConfig::default(),
            )?;
            with_csv(g.csv.as_ref(), |w| f.write_csv(w))?;
            let residual = max_harmonicity_residual(&f)?;
            Ok(Outcome {
                code: if rep.converged { 0 } else { EXIT_NUMERICAL },
                summary: format!(
                    "{} after {} Newton steps, residual {residual:.3e}, homeomorphic: {}",
                    if rep.converged {
                        "converged"
                    } else {
                        "not converged"
                    },
                    rep.iterations,
                    rep.homeomorphic
                ),
                report: json!({ "solver": rep, "max_residual": residual }),
            })
        }
        Command::Modulus { domain, n } => {
            let d = match parse_domain(domain)? {
                DoublyConnectedDomain::Circular { r1, r2 } if *n != 256 => {
                    DoublyConnectedDomain::Masked(MaskedDomain::circular_polar(r1, r2, *n, *n)?)
                }
                d => d,
            };
            let c = capacity(&d)?;
            Ok(Outcome {
                summary: format!(
                    "modulus {:.12} ({} unknowns, {} CG iterations)",
                    c.modulus, c.unknowns, c.cg_iterations
                ),
                report: to_value(&c)?,
                code: 0,
            })
        }
        Command::Minimal {
            surface,
            rho1,
            rho2,
            n,
            list,
        } => {
            if *list {
                let names = WeierstrassData::catalog_names();
                return Ok(Outcome {
                    summary: names.join("\n"),
                    report: json!({ "surfaces": names }),
                    code: 0,
                });
            }
            let (Some(surface), Some(rho1), Some(rho2)) = (surface, rho1, rho2) else {
                unreachable!("clap enforces the arguments")
            };
            let mut report =
                corollary_check(&WeierstrassData::by_name(surface)?, *rho1, *rho2, *n)?;
            apply_tol(&mut report, g.tol);
            bound_outcome(&report)
        }
        Command::Compare {
            metric,
            against,
            rho_max,
        } => {
            let m = load_metric(metric)?;
            let bound = m.bound();
            let hat = if against == "constant" {
                RotMetric::constant(bound)
            } else {
                load_metric(Path::new(against))?
            };
            let h = hessian_check(&m, *rho_max, &bound)?;
            let o = osserman_check(&m, &hat, *rho_max)?;
            comparison_outcome(&h, &o, g.tol)
        }
        Command::CheckBound {
            bound,
            rho1,
            rho2,
            modulus,
        } => {
            let mut report = check_bound(&parse_bound(bound)?, *rho1, *rho2, *modulus)?;
            apply_tol(&mut report, g.tol);
            bound_outcome(&report)
        }
        Command::Verify {
            metric,
            map,
            solver,
        } => {
            let m = load_metric(metric)?;
            let params = VerifyParams {
                r1: map.r1,
                r2: map.r2,
                rho1: map.rho1,
                rho2: map.rho2,
                nr: map.nr,
                ntheta: map.ntheta,
                solver: match solver {
                    SolverArg::Grid => SolverChoice::Grid,
                    SolverArg::Radial => SolverChoice::Radial,
                },
                orientation: map.orientation(),
            };
            let mut report = verify_end_to_end(&m, &params)?;
            apply_tol(&mut report, g.tol);
            let mut out = bound_outcome(&report)?;
            let failed = report.failed_subchecks();
            if failed
                .iter()
                .any(|c| NUMERICAL_CHECKS.contains(&c.name.as_str()))
            {
                out.code = EXIT_NUMERICAL;
            }
            for c in failed {
                out.summary
                    .push_str(&format!("\n  failed {}: {}", c.name, c.detail));
            }
            Ok(out)
        }
    }
}

fn emit(g: &Global, out: &Outcome) -> Result<()> {
    let text = serde_json::to_string_pretty(&out.report)?;
    match &g.out {
        Some(p) => {
            std::fs::write(p, text + "\n")?;
            if !g.quiet {
                println!("{}", out.summary);
            }
        }
        None if !g.quiet => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}")?;
        }
        None => {}
    }
    if !g.quiet && g.out.is_none() {
        eprintln!("{}", out.summary);
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoSolution { .. } => EXIT_MATH_FAIL,
        e if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_INVALID,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|out| emit(&cli.global, &out).map(|_| out.code)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
