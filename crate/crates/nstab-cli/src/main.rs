//! `nstab`: evaluate Gaussian noise stability, expand half-space profiles,
//! run property suites, search for penalized maximizers, and sweep grids
//! into CSV. Exit codes are a contract: 0 success, 1 property failure,
//! 2 usage, 3 convergence, 4 infeasible search, 5 I/O.

mod output;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use nstab_core::functionals::{
    deficit_report, noise_stability, ObjectiveSpec, PenaltyKind, StabilityMethod,
};
use nstab_core::gauss;
use nstab_core::hermite::{
    expand_gaussian_bump, expand_gaussian_derivative, expand_phi_penalty, CoefficientEnvelope,
    ExpansionKind,
};
use nstab_core::quad::QuadratureSpec;
use nstab_core::sets::IntervalUnion;
use nstab_core::variational::stability_form;
use nstab_core::{epsilon_cap, maximize, Error as CoreError, SearchConfig};

use output::{cell, write_csv, write_json, RunManifest};

#[derive(Parser)]
#[command(name = "nstab", version, about = "Numerical laboratory for Gaussian noise stability")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Noise stability of an interval union at correlation rho.
    Stability(StabilityArgs),
    /// Hermite coefficients of a half-space profile, with decay bounds.
    Expand(ExpandArgs),
    /// Seeded property suites; exits 1 if any case fails.
    Verify(VerifyArgs),
    /// Multi-restart search for a maximizer of the penalized objective.
    Optimize(OptimizeArgs),
    /// Evaluate a quantity over a correlation grid into CSV.
    Sweep(SweepArgs),
}

/// Sets use the bracketed syntax `"(-inf,0];[1.25,2.5]"`.
#[derive(Args)]
struct StabilityArgs {
    #[arg(long)]
    set: IntervalUnion,
    #[arg(long)]
    rho: f64,
    #[arg(long, value_enum, default_value_t = Method::Quadrature)]
    method: Method,
    /// Series truncation for --method mehler.
    #[arg(long, default_value_t = 150)]
    terms: usize,
    /// Sample pairs for --method mc.
    #[arg(long, default_value_t = 10_000_000)]
    pairs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Method {
    Quadrature,
    Mehler,
    Mc,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::Mehler => "mehler",
            Method::Mc => "mc",
        }
    }
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(long, value_enum)]
    kind: ExpandKind,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 60)]
    order: usize,
    /// Envelope split parameter; adds a bound column when given.
    #[arg(long)]
    lambda: Option<f64>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ExpandKind {
    Phi,
    Bump,
    BumpDerivative,
}

impl ExpandKind {
    fn name(self) -> &'static str {
        match self {
            ExpandKind::Phi => "phi",
            ExpandKind::Bump => "bump",
            ExpandKind::BumpDerivative => "bump-derivative",
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Correlation grid; suite defaults when omitted.
    #[arg(long = "rho")]
    rhos: Vec<f64>,
    /// Measure grid; suite defaults when omitted.
    #[arg(long = "a")]
    a_grid: Vec<f64>,
    /// Profile slopes, zipped against --a for the profiles suite.
    #[arg(long = "beta")]
    betas: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Suite {
    Borell,
    Sandwich,
    Variational,
    Profiles,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Borell => "borell",
            Suite::Sandwich => "sandwich",
            Suite::Variational => "variational",
            Suite::Profiles => "profiles",
        }
    }
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    a: f64,
    /// Penalty slope; rho/2 when omitted.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, conflicts_with = "epsilon_frac")]
    epsilon: Option<f64>,
    /// Penalty weight as a fraction of the admissible cap.
    #[arg(long)]
    epsilon_frac: Option<f64>,
    /// Defaults to none when the weight is zero, phi-volume otherwise.
    #[arg(long, value_enum)]
    penalty: Option<Penalty>,
    #[arg(long, default_value_t = 2)]
    components: usize,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 300)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    step_tol: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV of the winning restart's improvement history.
    #[arg(long)]
    history: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Penalty {
    None,
    Phi,
    PhiVolume,
    Barycenter,
}

impl Penalty {
    fn kind(self) -> PenaltyKind {
        match self {
            Penalty::None => PenaltyKind::None,
            Penalty::Phi => PenaltyKind::PhiSquared,
            Penalty::PhiVolume => PenaltyKind::PhiSquaredWithVolume,
            Penalty::Barycenter => PenaltyKind::BarycenterSquared,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Penalty::None => "none",
            Penalty::Phi => "phi",
            Penalty::PhiVolume => "phi-volume",
            Penalty::Barycenter => "barycenter",
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    what: SweepWhat,
    #[arg(long)]
    set: IntervalUnion,
    /// Either `start:stop:step` or a comma list, e.g. `0.1:0.9:0.1`.
    #[arg(long)]
    rho_grid: String,
    /// Target measure for the deficit; the set's own measure when omitted.
    #[arg(long)]
    a: Option<f64>,
    /// Deficit penalty slope; defaults to each row's rho.
    #[arg(long)]
    beta: Option<f64>,
    /// Barycenter floor for the deficit sweep.
    #[arg(long, default_value_t = 0.05)]
    z0: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SweepWhat {
    Stability,
    Deficit,
    StabilityForm,
}

impl SweepWhat {
    fn name(self) -> &'static str {
        match self {
            SweepWhat::Stability => "stability",
            SweepWhat::Deficit => "deficit",
            SweepWhat::StabilityForm => "stability-form",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// 2 usage, 3 convergence, 4 infeasible, 5 I/O; anything else is a usage
/// problem by default.
fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(core) = err.downcast_ref::<CoreError>() {
        return match core {
            CoreError::Convergence { .. } => 3,
            CoreError::Infeasible(_) => 4,
            _ => 2,
        };
    }
    if err.downcast_ref::<std::io::Error>().is_some() || err.downcast_ref::<csv::Error>().is_some()
    {
        return 5;
    }
    2
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Stability(args) => cmd_stability(args),
        Command::Expand(args) => cmd_expand(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn cmd_stability(args: StabilityArgs) -> anyhow::Result<ExitCode> {
    let method = match args.method {
        Method::Quadrature => StabilityMethod::Quadrature,
        Method::Mehler => StabilityMethod::Mehler { terms: args.terms },
        Method::Mc => StabilityMethod::MonteCarlo { pairs: args.pairs, seed: args.seed },
    };
    let result =
        noise_stability(&args.set, args.rho, method, &QuadratureSpec::default_spec())?;
    println!(
        "stability = {} (error estimate {:.3e}, method {})",
        cell(result.value),
        result.error_estimate,
        args.method.name()
    );
    if let Some(path) = &args.out {
        let manifest = RunManifest::new("stability", args.seed)
            .param("set", &args.set)
            .param("rho", args.rho)
            .param("method", args.method.name());
        write_json(
            path,
            &json!({
                "manifest": manifest,
                "set": args.set,
                "rho": args.rho,
                "method": args.method.name(),
                "value": result.value,
                "error_estimate": result.error_estimate,
            }),
        )?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_expand(args: ExpandArgs) -> anyhow::Result<ExitCode> {
    let (series, kind) = match args.kind {
        ExpandKind::Phi => {
            (expand_phi_penalty(args.beta, args.alpha, args.order)?, ExpansionKind::PhiExpansion)
        }
        ExpandKind::Bump => (
            expand_gaussian_bump(args.beta, args.alpha, args.order)?,
            ExpansionKind::GaussianExpansion,
        ),
        ExpandKind::BumpDerivative => (
            expand_gaussian_derivative(args.beta, args.alpha, args.order)?,
            ExpansionKind::GaussianDerivativeExpansion,
        ),
    };
    let envelope = match args.lambda {
        Some(lambda) => Some(CoefficientEnvelope::new(args.beta, lambda, args.alpha, kind)?),
        None => None,
    };

    let mut manifest = RunManifest::new("expand", 0)
        .param("kind", args.kind.name())
        .param("beta", args.beta)
        .param("alpha", args.alpha)
        .param("order", args.order);
    if let Some(lambda) = args.lambda {
        manifest = manifest.param("lambda", lambda);
    }

    let rows: Vec<Vec<String>> = series
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let bound = envelope
                .as_ref()
                .filter(|env| k >= env.min_index())
                .map(|env| cell(env.bound(k)))
                .unwrap_or_default();
            vec![k.to_string(), cell(c), bound]
        })
        .collect();
    let header = ["k", "coefficient", "envelope_bound"];

    match &args.out {
        Some(path) => {
            write_csv(path, &manifest, &header, &rows)?;
            println!("wrote {} coefficients to {}", rows.len(), path.display());
        }
        None => {
            for row in &rows {
                println!("{}", row.join(","));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn defaults(values: Vec<f64>, fallback: &[f64]) -> Vec<f64> {
    if values.is_empty() {
        fallback.to_vec()
    } else {
        values
    }
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let cases = match args.suite {
        Suite::Borell => suites::borell(
            args.trials,
            args.seed,
            &defaults(args.rhos.clone(), &[0.3, 0.6, 0.9]),
            &defaults(args.a_grid.clone(), &[0.2, 0.35, 0.5, 0.65, 0.8]),
        )?,
        Suite::Sandwich => suites::sandwich(
            args.trials,
            args.seed,
            &defaults(args.rhos.clone(), &[0.3, 0.5, 0.7]),
            &defaults(args.a_grid.clone(), &[0.5]),
        )?,
        Suite::Variational => suites::variational(
            args.trials,
            args.seed,
            &defaults(args.rhos.clone(), &[0.3, 0.6, 0.9]),
        )?,
        Suite::Profiles => {
            let pairs: Vec<(f64, f64)> = if args.a_grid.is_empty() {
                vec![(0.3, 0.4), (0.5, 0.6), (0.7, 0.3)]
            } else {
                if args.a_grid.len() != args.betas.len() {
                    bail!("--a and --beta must pair up for the profiles suite");
                }
                args.a_grid.iter().copied().zip(args.betas.iter().copied()).collect()
            };
            suites::profiles(&pairs)?
        }
    };

    let passed = cases.iter().filter(|c| c.pass).count();
    println!("suite {}: {passed}/{} cases pass", args.suite.name(), cases.len());
    if let Some(path) = &args.out {
        let manifest = RunManifest::new("verify", args.seed)
            .param("suite", args.suite.name())
            .param("trials", args.trials);
        write_json(path, &json!({ "manifest": manifest, "cases": cases }))?;
    }
    if passed == cases.len() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn cmd_optimize(args: OptimizeArgs) -> anyhow::Result<ExitCode> {
    let beta = args.beta.unwrap_or(args.rho / 2.0);
    let epsilon = match (args.epsilon, args.epsilon_frac) {
        (Some(e), _) => e,
        (None, Some(frac)) => {
            let z0 = gauss::gaussian_density(gauss::phi_inv(args.a)?);
            let cap = epsilon_cap(args.rho, beta, args.a, z0)?;
            if cap.degenerate {
                bail!("the penalty cap degenerates to zero at beta = rho; pick beta < rho");
            }
            frac * cap.value
        }
        (None, None) => 0.0,
    };
    let kind = match args.penalty {
        Some(p) => p.kind(),
        None if epsilon == 0.0 => PenaltyKind::None,
        None => PenaltyKind::PhiSquaredWithVolume,
    };
    let penalty_name = args.penalty.map(Penalty::name).unwrap_or(if epsilon == 0.0 {
        "none"
    } else {
        "phi-volume"
    });

    let ospec = ObjectiveSpec::new(args.rho, beta, epsilon, args.a, kind)?;
    let config = SearchConfig {
        component_count: args.components,
        restarts: args.restarts,
        max_iters: args.max_iters,
        step_tol: args.step_tol,
        objective: ospec,
        seed: args.seed,
    };
    let result = maximize(&config)?;

    println!("best set       = {}", result.best_set);
    println!("best value     = {}", cell(result.best_value));
    println!("is half space  = {}", result.is_halfspace);

    let manifest = RunManifest::new("optimize", args.seed)
        .param("rho", args.rho)
        .param("beta", beta)
        .param("epsilon", epsilon)
        .param("a", args.a)
        .param("penalty", penalty_name)
        .param("components", args.components)
        .param("restarts", args.restarts)
        .param("max_iters", args.max_iters)
        .param("step_tol", args.step_tol);
    if let Some(path) = &args.out {
        write_json(
            path,
            &json!({
                "manifest": manifest,
                "best_set": result.best_set,
                "best_value": result.best_value,
                "is_halfspace": result.is_halfspace,
            }),
        )?;
    }
    if let Some(path) = &args.history {
        let rows: Vec<Vec<String>> = result
            .history
            .iter()
            .map(|&(iter, value)| vec![iter.to_string(), cell(value)])
            .collect();
        write_csv(path, &manifest, &["iteration", "value"], &rows)?;
    }
    Ok(ExitCode::SUCCESS)
}

/// `start:stop:step` (inclusive) or a comma-separated list.
fn parse_grid(text: &str) -> anyhow::Result<Vec<f64>> {
    let parse = |tok: &str| -> anyhow::Result<f64> {
        tok.trim()
            .parse::<f64>()
            .with_context(|| format!("cannot parse grid entry '{}'", tok.trim()))
    };
    let grid: Vec<f64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, stop, step] = parts[..] else {
            bail!("grid '{text}' must be start:stop:step");
        };
        let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
        if !(step > 0.0) {
            bail!("grid step must be positive, got {step}");
        }
        let n = ((stop - start) / step + 1e-9).floor() as i64;
        (0..=n.max(-1)).map(|i| start + i as f64 * step).collect()
    } else {
        text.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(parse)
            .collect::<anyhow::Result<_>>()?
    };
    if grid.is_empty() {
        bail!("the correlation grid is empty");
    }
    Ok(grid)
}

fn cmd_sweep(args: SweepArgs) -> anyhow::Result<ExitCode> {
    let grid = parse_grid(&args.rho_grid)?;
    let mut manifest = RunManifest::new("sweep", 0)
        .param("what", args.what.name())
        .param("set", &args.set)
        .param("rho_grid", &args.rho_grid);

    let (header, rows): (Vec<&str>, Vec<Vec<String>>) = match args.what {
        SweepWhat::Stability => {
            let mut rows = Vec::with_capacity(grid.len());
            for &rho in &grid {
                let r = noise_stability(
                    &args.set,
                    rho,
                    StabilityMethod::Quadrature,
                    &QuadratureSpec::default_spec(),
                )?;
                rows.push(vec![cell(rho), cell(r.value), cell(r.error_estimate)]);
            }
            (vec!["rho", "value", "error_estimate"], rows)
        }
        SweepWhat::Deficit => {
            let a = args.a.unwrap_or_else(|| args.set.measure());
            manifest = manifest.param("a", a).param("z0", args.z0);
            if let Some(beta) = args.beta {
                manifest = manifest.param("beta", beta);
            }
            let mut rows = Vec::with_capacity(grid.len());
            for &rho in &grid {
                let rep = deficit_report(&args.set, rho, args.beta.unwrap_or(rho), a, args.z0)?;
                rows.push(vec![
                    cell(rho),
                    cell(rep.delta),
                    cell(rep.eta_beta),
                    cell(rep.eta_rho),
                ]);
            }
            (vec!["rho", "delta", "eta_beta", "eta_rho"], rows)
        }
        SweepWhat::StabilityForm => {
            let mut rows = Vec::with_capacity(grid.len());
            for &rho in &grid {
                let sf = stability_form(&args.set, rho)?;
                rows.push(vec![
                    cell(rho),
                    cell(sf.value),
                    cell(sf.pair_form),
                    cell(sf.closed_form),
                    cell(sf.lower_bound),
                    cell(sf.perimeter_gap),
                ]);
            }
            (
                vec!["rho", "value", "pair_form", "closed_form", "lower_bound", "perimeter_gap"],
                rows,
            )
        }
    };

    write_csv(&args.out, &manifest, &header, &rows)?;
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(ExitCode::SUCCESS)
}
