//! `varentropy` command-line tool.
//!
//! Exit status: 0 on success, 2 on usage errors, 1 on numerical failures.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use varentropy::bounds::{bound_suite, system_suite, BoundKind, BoundReport};
use varentropy::coherent::{compare_with, CoherentSystem, DistortionFunction};
use varentropy::distributions::Distribution;
use varentropy::estimation::Method;
use varentropy::experiments::{
    bootstrap_wpve, fmt_g, model_selection, simulate, wind_speed_dataset, BandwidthRule, SimulationConfig, Target,
};
use varentropy::measures::{
    weighted_past_entropy, weighted_past_renyi, weighted_residual_entropy, weighted_varentropy, wpde, wpdve, wpve,
    wrve, MeasureResult,
};
use varentropy::Error;

mod parse;

#[derive(Parser)]
#[command(name = "varentropy", version, about = "Weighted past, residual and paired varentropy tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a measure over a t grid.
    Measure(MeasureArgs),
    /// Monte Carlo study of the WPVE or WPDVE estimators.
    Simulate(SimulateArgs),
    /// Bootstrap the kernel WPVE estimator on a dataset.
    Bootstrap(BootstrapArgs),
    /// Fit candidate laws to a dataset and rank them by AIC.
    Fit(FitArgs),
    /// Compare coherent systems built from one component law.
    System(SystemArgs),
    /// Evaluate every bound over a t grid.
    BoundCheck(BoundArgs),
}

#[derive(Args)]
struct Output {
    /// Write CSV here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// File of key=value lines used for flags not given on the command line.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Wpve,
    Wrve,
    Wpdve,
    Wpe,
    Wre,
    Wpde,
    Renyi,
    Wve,
}

#[derive(Args)]
struct MeasureArgs {
    /// Law, e.g. exp:lambda=0.7 or uniform:a=0,b=1.
    #[arg(long)]
    dist: String,
    #[arg(long, value_enum)]
    kind: Kind,
    /// y, 1, y^2, affine:a=..,b=.. or cubic:alpha=..,beta=..
    #[arg(long, default_value = "y")]
    weight: String,
    /// a:b:step, a comma list, or one value.
    #[arg(long)]
    t: String,
    /// Renyi order.
    #[arg(long, default_value_t = 2.0)]
    order: f64,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Wpve,
    Wpdve,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Parametric,
    Nonparametric,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value = "wpve")]
    target: TargetArg,
    /// Exponential rate of the generating law.
    #[arg(long, default_value_t = 0.7)]
    rate: f64,
    #[arg(long, default_value = "0.1,0.2,0.3,0.4,1.0")]
    t: String,
    #[arg(long, default_value = "100,120,150,200")]
    n: String,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value = "parametric")]
    method: MethodArg,
    /// `silverman` or a positive number.
    #[arg(long, default_value = "silverman")]
    bandwidth: String,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct BootstrapArgs {
    /// Newline-delimited sample; the embedded wind-speed data by default.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Reference law; defaults to the best AIC fit of the data.
    #[arg(long)]
    reference: Option<String>,
    #[arg(long, default_value_t = 500)]
    replicates: usize,
    #[arg(long, default_value_t = 0.35)]
    bandwidth: f64,
    #[arg(long, default_value = "1.0,1.1,1.2,1.3,1.4,1.5,1.8,2.0,2.5,3.0")]
    t: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    data: Option<PathBuf>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct SystemArgs {
    #[arg(long, default_value = "power:beta=0.2,scale=1")]
    dist: String,
    #[arg(long, default_value_t = 0.5)]
    t: f64,
    /// Renyi order.
    #[arg(long, default_value_t = 1.8)]
    alpha: f64,
    /// Comma-free list of systems: series, 2-of-3, parallel, identity, poly:c1,c2,..
    #[arg(long = "q", num_args = 1.., default_values = ["series", "2-of-3", "parallel"])]
    q: Vec<String>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    dist: String,
    #[arg(long)]
    t: String,
    /// Envelope slope for the density-envelope bounds.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Envelope intercept for the density-envelope bounds.
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Also run the system bounds for these structures.
    #[arg(long = "q", num_args = 1..)]
    q: Vec<String>,
    /// Density floor for the system density-floor bound.
    #[arg(long, default_value_t = 1.0)]
    floor: f64,
    #[command(flatten)]
    out: Output,
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Quadrature(_) | Error::NonConvergence(_) | Error::Consistency(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CmdResult = Result<String, Failure>;

fn usage<T>(r: Result<T, String>) -> Result<T, Failure> {
    r.map_err(Failure::Usage)
}

fn header(lines: &[(&str, String)]) -> String {
    lines.iter().map(|(k, v)| format!("# {k}={v}\n")).collect()
}

fn measure(a: &MeasureArgs) -> CmdResult {
    let d = usage(parse::distribution(&a.dist))?;
    let w = usage(parse::weight(&a.weight))?;
    let ts = usage(parse::grid(&a.t))?;
    let mut s = header(&[
        ("dist", a.dist.clone()),
        ("kind", a.kind.to_possible_value().unwrap().get_name().to_string()),
        ("weight", w.label()),
    ]);
    s.push_str("t,value,error_estimate\n");
    for t in ts {
        let r: MeasureResult = match a.kind {
            Kind::Wpve => wpve(&d, &w, t)?,
            Kind::Wrve => wrve(&d, &w, t)?,
            Kind::Wpdve => wpdve(&d, &w, t)?,
            Kind::Wpe => weighted_past_entropy(&d, &w, t)?,
            Kind::Wre => weighted_residual_entropy(&d, &w, t)?,
            Kind::Wpde => wpde(&d, &w, t)?,
            Kind::Renyi => weighted_past_renyi(&d, &w, t, a.order)?,
            Kind::Wve => weighted_varentropy(&d, &w)?,
        };
        let _ = writeln!(s, "{},{},{}", fmt_g(t), fmt_g(r.value), fmt_g(r.abs_error));
    }
    Ok(s)
}

fn sim(a: &SimulateArgs) -> CmdResult {
    let ts = usage(parse::grid(&a.t))?;
    let ns = usage(parse::sizes(&a.n))?;
    let target = match a.target {
        TargetArg::Wpve => Target::Wpve,
        TargetArg::Wpdve => Target::Wpdve,
    };
    let method = match a.method {
        MethodArg::Parametric => Method::Parametric,
        MethodArg::Nonparametric => Method::Nonparametric,
    };
    let mut cfg = SimulationConfig::new(target, a.rate, ts, ns, a.reps, a.seed, method);
    cfg.bandwidth = match a.bandwidth.as_str() {
        "silverman" => BandwidthRule::Silverman,
        b => BandwidthRule::Fixed(usage(b.parse::<f64>().map_err(|_| format!("bad bandwidth '{b}'")))?),
    };
    Ok(simulate(&cfg)?.to_csv())
}

fn load_data(path: &Option<PathBuf>) -> Result<Vec<f64>, Failure> {
    match path {
        None => Ok(wind_speed_dataset().values().to_vec()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display())))?;
            usage(parse::sample_text(&text))
        }
    }
}

fn bootstrap(a: &BootstrapArgs) -> CmdResult {
    let data = load_data(&a.data)?;
    let ts = usage(parse::grid(&a.t))?;
    let reference: Distribution = match &a.reference {
        Some(spec) => usage(parse::distribution(spec))?,
        None => model_selection(&data)?[0].distribution,
    };
    Ok(bootstrap_wpve(&data, &reference, a.replicates, a.bandwidth, &ts, a.seed)?.to_csv())
}

fn fit(a: &FitArgs) -> CmdResult {
    let data = load_data(&a.data)?;
    let fits = model_selection(&data)?;
    let mut s = header(&[("n", data.len().to_string())]);
    s.push_str("family,parameters,neg_log_lik,aic,aicc,bic,ks_statistic,ks_p_value,converged\n");
    for f in fits {
        let params = f
            .distribution
            .family()
            .parameters()
            .iter()
            .map(|(k, v)| format!("{k}={}", fmt_g(*v)))
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            f.family.name(),
            params,
            fmt_g(f.neg_log_lik),
            fmt_g(f.aic),
            fmt_g(f.aicc),
            fmt_g(f.bic),
            fmt_g(f.ks_statistic),
            fmt_g(f.ks_p_value),
            f.status.converged()
        );
    }
    Ok(s)
}

fn systems(specs: &[String]) -> Result<Vec<DistortionFunction>, Failure> {
    specs.iter().map(|q| usage(parse::distortion(q))).collect()
}

fn system(a: &SystemArgs) -> CmdResult {
    let d = usage(parse::distribution(&a.dist))?;
    let qs = systems(&a.q)?;
    let rows = compare_with(d, &qs, a.t, a.alpha)?;
    let mut s = header(&[("dist", a.dist.clone()), ("t", fmt_g(a.t)), ("renyi_order", fmt_g(a.alpha))]);
    s.push_str("system,wpve,pve,wpre,wpse\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{}", r.system, fmt_g(r.wpve), fmt_g(r.pve), fmt_g(r.wpre), fmt_g(r.wpse));
    }
    Ok(s)
}

fn report_line(s: &mut String, t: f64, r: &BoundReport) {
    let kind = match r.kind {
        BoundKind::Upper => "upper",
        BoundKind::Lower => "lower",
    };
    let _ = writeln!(
        s,
        "{},{},{},{},{},{},{},{}",
        fmt_g(t),
        r.label,
        kind,
        fmt_g(r.bound),
        fmt_g(r.exact),
        fmt_g(r.slack),
        r.satisfied,
        r.precondition.label()
    );
}

fn bound_check(a: &BoundArgs) -> CmdResult {
    let d = usage(parse::distribution(&a.dist))?;
    let ts = usage(parse::grid(&a.t))?;
    let qs = systems(&a.q)?;
    let mut s = header(&[
        ("dist", a.dist.clone()),
        ("alpha", fmt_g(a.alpha)),
        ("beta", fmt_g(a.beta)),
    ]);
    s.push_str("t,label,kind,bound,exact,slack,satisfied,precondition\n");
    for &t in &ts {
        for (label, r) in bound_suite(&d, t, a.alpha, a.beta) {
            match r {
                Ok(r) => report_line(&mut s, t, &r),
                Err(e) => {
                    let _ = writeln!(s, "{},{label},,,,,,error: {}", fmt_g(t), e.to_string().replace(',', ";"));
                }
            }
        }
        for q in &qs {
            let sys = CoherentSystem::new(d, q.clone());
            for (label, r) in system_suite(&sys, t, a.alpha, a.beta, a.floor) {
                match r {
                    Ok(mut r) => {
                        r.label = format!("{}[{}]", r.label, q.name());
                        report_line(&mut s, t, &r)
                    }
                    Err(e) => {
                        let _ = writeln!(s, "{},{label}[{}],,,,,,error: {}", fmt_g(t), q.name(), e.to_string().replace(',', ";"));
                    }
                }
            }
        }
    }
    Ok(s)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let (csv, out) = match &cli.command {
        Command::Measure(a) => (measure(a)?, &a.out),
        Command::Simulate(a) => (sim(a)?, &a.out),
        Command::Bootstrap(a) => (bootstrap(a)?, &a.out),
        Command::Fit(a) => (fit(a)?, &a.out),
        Command::System(a) => (system(a)?, &a.out),
        Command::BoundCheck(a) => (bound_check(a)?, &a.out),
    };
    match &out.output {
        Some(p) => std::fs::write(p, csv).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let args = match parse::expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(1)
        }
    }
}
