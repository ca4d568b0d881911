use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dacx_cli::commands::{self, EvalSource, Outcome, ScalarMode};
use dacx_cli::laws::check_laws;
use dacx_cli::problem::FormatName;
use dacx_cli::{exit, CliError, ProblemFile, EXIT_CODE_HELP};

#[derive(Parser)]
#[command(name = "dacx", version, about = "Combined asymptotic expansions: build, evaluate, validate", after_help = EXIT_CODE_HELP)]
struct Cli {
    /// Worker threads for grid sweeps.
    #[arg(long, global = true, env = "DACX_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScalarArg {
    Rational,
    F64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Build the combined expansion and write its coefficients as JSON.
    Expand {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, value_enum, default_value = "rational")]
        scalar: ScalarArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate partial sums on the grid, from a problem or an `expand` document.
    Eval {
        #[arg(long, required_unless_present = "expansion")]
        problem: Option<PathBuf>,
        #[arg(long, conflicts_with = "problem")]
        expansion: Option<PathBuf>,
        /// Comma-separated η values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        eta: Option<Vec<f64>>,
        /// Comma-separated sample points; defaults to the grid.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Option<Vec<f64>>,
        /// Number of levels summed; defaults to all.
        #[arg(long)]
        n: Option<usize>,
        /// Problem file supplying the grid and η list when evaluating a document.
        #[arg(long, requires = "expansion")]
        grid_from: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sweep uniform errors against the reference solution and check convergence orders.
    Validate {
        #[arg(long)]
        problem: PathBuf,
        /// Comma-separated truncations to check; defaults to orders.N.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Canard value of Y' = Y(Y − X)(Y + X) + c by shooting.
    CanardValue {
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 10.0)]
        x_far: f64,
    },
    /// Moments of the inner forcings whose vanishing gives a canard.
    CanardMoments {
        #[arg(long)]
        problem: PathBuf,
    },
    /// Polynomial-solution (resonance) check of Z'' − αX^{p−1}Z' + βX^{p−2}Z = 0.
    Resonance {
        #[arg(long, allow_hyphen_values = true, required_unless_present = "problem")]
        alpha: Option<String>,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "problem")]
        beta: Option<String>,
        #[arg(long, required_unless_present = "problem")]
        p: Option<u32>,
        #[arg(long, conflicts_with_all = ["alpha", "beta", "p"])]
        problem: Option<PathBuf>,
    },
    /// Fit C·L^n·Γ(n/p + 1) to coefficient norms.
    GevreyFit {
        /// Comma-separated norms ‖a_0‖, ‖a_1‖, …
        #[arg(long, value_delimiter = ',', required_unless_present = "problem")]
        norms: Option<Vec<f64>>,
        /// Use the level norms of this problem's expansion.
        #[arg(long, conflicts_with = "norms")]
        problem: Option<PathBuf>,
        /// Radius of the weighted slow-part norm.
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        #[arg(long)]
        p_hint: Option<f64>,
        /// Report the optimal truncation at this η.
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Truncated Borel–Laplace sum of Σ a_n η^n.
    BorelSum {
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required_unless_present = "coeffs_file"
        )]
        coeffs: Option<Vec<f64>>,
        /// JSON array of coefficients.
        #[arg(long, conflicts_with = "coeffs")]
        coeffs_file: Option<PathBuf>,
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value_t = 1)]
        p: u32,
        #[arg(long)]
        rho: f64,
    },
    /// Randomized algebra-law checks on rational series.
    CheckLaws {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 256)]
        cases: u32,
    },
}

fn format_name(f: Option<FormatArg>) -> Option<FormatName> {
    f.map(|f| match f {
        FormatArg::Csv => FormatName::Csv,
        FormatArg::Json => FormatName::Json,
    })
}

fn run(cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Expand {
            problem,
            scalar,
            output,
        } => {
            let mode = match scalar {
                ScalarArg::Rational => ScalarMode::Rational,
                ScalarArg::F64 => ScalarMode::Float,
            };
            commands::expand(&ProblemFile::load(&problem)?, mode, output.as_deref())
        }
        Command::Eval {
            problem,
            expansion,
            eta,
            x,
            n,
            grid_from,
            output,
        } => {
            let pf = problem
                .or(grid_from)
                .map(|p| ProblemFile::load(&p))
                .transpose()?;
            let source = match (&expansion, &pf) {
                (Some(path), _) => EvalSource::Expansion(path),
                (None, Some(pf)) => EvalSource::Problem(pf),
                (None, None) => {
                    return Err(CliError::Usage(
                        "eval needs --problem or --expansion".into(),
                    ))
                }
            };
            commands::eval(
                source,
                pf.as_ref(),
                eta.as_deref(),
                x.as_deref(),
                n,
                output.as_deref(),
            )
        }
        Command::Validate {
            problem,
            n,
            output,
            format,
        } => commands::validate(
            &ProblemFile::load(&problem)?,
            n.as_deref(),
            output.as_deref(),
            format_name(format),
        ),
        Command::CanardValue { tol, x_far } => commands::canard_value(tol, x_far).map(|(_, o)| o),
        Command::CanardMoments { problem } => commands::moments(&ProblemFile::load(&problem)?),
        Command::Resonance {
            alpha,
            beta,
            p,
            problem,
        } => {
            let spec = match (problem, alpha, beta, p) {
                (Some(path), ..) => ProblemFile::load(&path)?.equation()?,
                (None, Some(a), Some(b), Some(p)) => commands::resonance_spec(&a, &b, p)?,
                _ => {
                    return Err(CliError::Usage(
                        "resonance needs --alpha, --beta and --p, or --problem".into(),
                    ))
                }
            };
            commands::resonance(&spec)
        }
        Command::GevreyFit {
            norms,
            problem,
            radius,
            p_hint,
            eta,
        } => {
            let norms = match (norms, problem) {
                (Some(n), _) => n,
                (None, Some(path)) => commands::problem_norms(&ProblemFile::load(&path)?, radius)?,
                (None, None) => {
                    return Err(CliError::Usage(
                        "gevrey-fit needs --norms or --problem".into(),
                    ))
                }
            };
            commands::gevrey(&norms, p_hint, eta)
        }
        Command::BorelSum {
            coeffs,
            coeffs_file,
            eta,
            p,
            rho,
        } => {
            let coeffs = match (coeffs, coeffs_file) {
                (Some(c), _) => c,
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| CliError::io(path.display(), e))?;
                    serde_json::from_str(&text)
                        .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?
                }
                (None, None) => {
                    return Err(CliError::Usage(
                        "borel-sum needs --coeffs or --coeffs-file".into(),
                    ))
                }
            };
            commands::borel(&coeffs, eta, p, rho).map(|(_, o)| o)
        }
        Command::CheckLaws { seed, cases } => {
            let results = check_laws(seed, cases);
            let mut lines = Vec::new();
            for r in &results {
                match &r.failure {
                    None => lines.push(format!("PASS {} ({} cases)", r.name, r.cases)),
                    Some(f) => lines.push(format!("FAIL {}: {f}", r.name)),
                }
            }
            Ok(Outcome {
                summary: lines.join("\n"),
                pass: results.iter().all(|r| r.failure.is_none()),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::USAGE as u8
            } else {
                exit::OK as u8
            });
        }
    };
    if let Some(n) = cli.threads.filter(|&n| n > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("warning: could not cap threads at {n}: {e}");
        }
    }
    match run(cli.command) {
        Ok(out) => {
            println!("{}", out.summary);
            ExitCode::from(if out.pass {
                exit::OK
            } else {
                exit::VERDICT_FAILED
            } as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
