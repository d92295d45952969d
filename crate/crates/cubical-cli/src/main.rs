//! Command-line driver: sampling, Betti numbers, persistence, and the
//! Monte Carlo experiment suite.
//!
//! Exit codes: 0 on success, 1 when a property check fails or a runtime
//! error occurs, 2 for invalid plans or arguments.

mod config;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cubical::experiment::{
    check_additivity_bounds, check_resampling_bound, check_stabilization, emit_checks, emit_clt,
    emit_lifetime_lln, emit_lln, emit_positivity, run_clt, run_lifetime_lln, run_lln,
    run_positivity, ChecksBundle, CltTarget, ExperimentError, ExperimentPlan, OutputFormat,
    StabilizationSummary,
};
use cubical::model::{resample_origin, sample_configuration, ModelSpec, SampleSeed};
use cubical::persistence::{betti_curve, persistence_diagram};
use cubical::{
    betti, build_filtration, euler_characteristic, CoefficientField, Configuration, CubicalSet,
    Window,
};

use config::FileConfig;

#[derive(Parser)]
#[command(
    name = "cubical",
    about = "Cubical homology and random filtration experiments on the integer lattice",
    version
)]
struct Cli {
    /// Flat key=value file mirroring the long flags; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a configuration and dump it as `cube value` lines.
    Sample(SampleArgs),
    /// Betti numbers and Euler characteristic of a cube-list file.
    Betti(BettiArgs),
    /// Persistence diagram and Betti curve of a configuration file.
    Persist(PersistArgs),
    /// Normalized Betti curves across a ladder of window sizes.
    Lln(PlanArgs),
    /// Normalized lifetime sums across a ladder of window sizes.
    LifetimeLln(PlanArgs),
    /// Variance scaling and empirical normality of a fixed statistic.
    Clt(CltArgs),
    /// Positivity certificate counts for the limiting Betti density.
    Positivity(PositivityArgs),
    /// Structural property checks: additivity bounds, origin resampling,
    /// stabilization.
    Checks(ChecksArgs),
}

#[derive(Args)]
struct SampleArgs {
    /// Model string, e.g. bernoulli:d=2,k=1 | uniform:d=3 | costafarber:d=2,p=1,0.5,0.25
    #[arg(long)]
    model: Option<String>,
    /// Analysis window radius; the sampled region extends one step further.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sample stream index.
    #[arg(long)]
    stream: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BettiArgs {
    /// Cube-list file: one `d;a1,..,ad;e1,..,ed` cube per line.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Coefficients: gf2 or rational.
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PersistArgs {
    /// Configuration file of `cube value` lines covering the enlarged window.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    q: Option<usize>,
    /// Analysis window radius.
    #[arg(long = "window-n")]
    window_n: Option<u32>,
    /// Output prefix; writes <prefix>.diagram.csv and <prefix>.curve.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    q: Option<usize>,
    /// Comma-separated grid of evaluation times in [0,1].
    #[arg(long = "t-grid", value_delimiter = ',')]
    t_grid: Option<Vec<f64>>,
    /// Comma-separated ascending window radii.
    #[arg(long = "n-list", value_delimiter = ',')]
    n_list: Option<Vec<u32>>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct CltArgs {
    #[command(flatten)]
    plan: PlanArgs,
    /// betti or lifetime.
    #[arg(long)]
    target: Option<String>,
    /// Evaluation time for the betti target.
    #[arg(long)]
    t: Option<f64>,
}

#[derive(Args)]
struct PositivityArgs {
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    /// Pattern window radius K.
    #[arg(long = "window-k")]
    window_k: Option<u32>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct ChecksArgs {
    /// Trials for the additivity-bound checks.
    #[arg(long)]
    trials: Option<usize>,
    /// Trials per dimension for the origin-resampling bound.
    #[arg(long = "resample-trials")]
    resample_trials: Option<usize>,
    /// Frozen pairs for the stabilization check.
    #[arg(long = "stab-pairs")]
    stab_pairs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self { message: message.into(), code: 2 }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self { message: message.into(), code: 1 }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Plan(_)
            | ExperimentError::Model(_)
            | ExperimentError::PatternWindowMismatch { .. }
            | ExperimentError::DiscontinuousMarginals
            | ExperimentError::RequiresProductMeasure => Failure::invalid(e.to_string()),
            ExperimentError::Filtration(_) => Failure::runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.config.as_deref().map(FileConfig::load).transpose() {
        Ok(cfg) => cfg.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match dispatch(cli.command, &cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(command: Command, cfg: &FileConfig) -> Result<(), Failure> {
    match command {
        Command::Sample(args) => cmd_sample(args, cfg),
        Command::Betti(args) => cmd_betti(args, cfg),
        Command::Persist(args) => cmd_persist(args, cfg),
        Command::Lln(args) => cmd_lln(args, cfg),
        Command::LifetimeLln(args) => cmd_lifetime_lln(args, cfg),
        Command::Clt(args) => cmd_clt(args, cfg),
        Command::Positivity(args) => cmd_positivity(args, cfg),
        Command::Checks(args) => cmd_checks(args, cfg),
    }
}

fn parse_model(text: &str) -> Result<ModelSpec, Failure> {
    text.parse::<ModelSpec>().map_err(|e| Failure::invalid(e.to_string()))
}

fn parse_format(text: Option<String>) -> Result<OutputFormat, Failure> {
    match text {
        None => Ok(OutputFormat::Csv),
        Some(s) => s.parse().map_err(Failure::invalid),
    }
}

fn write_output(out: Option<&PathBuf>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn build_plan(args: &PlanArgs, cfg: &FileConfig) -> Result<ExperimentPlan, Failure> {
    let model_text: String = cfg
        .resolve("model", args.model.clone())?
        .ok_or_else(|| Failure::invalid("--model is required"))?;
    let model = parse_model(&model_text)?;
    let q = cfg.resolve("q", args.q)?.unwrap_or(0);
    let mut plan = ExperimentPlan::new(model, q);
    if let Some(grid) = cfg.resolve_list("t-grid", args.t_grid.clone())? {
        plan.t_grid = grid;
    }
    if let Some(n_list) = cfg.resolve_list("n-list", args.n_list.clone())? {
        plan.n_list = n_list;
    }
    if let Some(samples) = cfg.resolve("samples", args.samples)? {
        plan.samples_per_n = samples;
    }
    if let Some(seed) = cfg.resolve("seed", args.seed)? {
        plan.seed = seed;
    }
    plan.validate().map_err(|e| Failure::invalid(e.to_string()))?;
    Ok(plan)
}

fn cmd_sample(args: SampleArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let model_text: String = cfg
        .resolve("model", args.model)?
        .ok_or_else(|| Failure::invalid("--model is required"))?;
    let model = parse_model(&model_text)?;
    let n: u32 = cfg.resolve("n", args.n)?.unwrap_or(4);
    let seed: u64 = cfg.resolve("seed", args.seed)?.unwrap_or(0);
    let stream: u64 = cfg.resolve("stream", args.stream)?.unwrap_or(0);
    let region = Window::new(n, model.ambient).enlarged();
    let sample = sample_configuration(&model, region, &SampleSeed::new(seed, stream))
        .map_err(|e| Failure::invalid(e.to_string()))?;
    let mut text = format!("# model={model} n={n} seed={seed} stream={stream}\n");
    text.push_str(&sample.dump());
    let out = cfg.resolve_path("out", args.out)?;
    write_output(out.as_ref(), text.as_bytes())
}

fn cmd_betti(args: BettiArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let input = cfg
        .resolve_path("input", args.input)?
        .ok_or_else(|| Failure::invalid("--input is required"))?;
    let field = match cfg
        .resolve::<String>("field", args.field)?
        .unwrap_or_else(|| "rational".to_string())
        .as_str()
    {
        "gf2" => CoefficientField::Gf2,
        "rational" => CoefficientField::Rational,
        other => return Err(Failure::invalid(format!("unknown field `{other}`"))),
    };
    let text = fs::read_to_string(&input)?;
    let cubes =
        CubicalSet::parse_cube_list(&text).map_err(|e| Failure::invalid(e.to_string()))?;
    let complex = CubicalSet::from_cubes(cubes).map_err(|e| Failure::invalid(e.to_string()))?;
    let vector = betti(&complex, field).map_err(|e| Failure::runtime(e.to_string()))?;
    let mut out = String::from("k,beta_k\n");
    for (k, v) in vector.values.iter().enumerate() {
        out.push_str(&format!("{k},{v}\n"));
    }
    out.push_str(&format!("euler,{}\n", euler_characteristic(&complex)));
    let path = cfg.resolve_path("out", args.out)?;
    write_output(path.as_ref(), out.as_bytes())
}

fn cmd_persist(args: PersistArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let input = cfg
        .resolve_path("input", args.input)?
        .ok_or_else(|| Failure::invalid("--input is required"))?;
    let window_n: u32 = cfg
        .resolve("window-n", args.window_n)?
        .ok_or_else(|| Failure::invalid("--window-n is required"))?;
    let q: usize = cfg.resolve("q", args.q)?.unwrap_or(0);
    let text = fs::read_to_string(&input)?;
    let first_cube = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .ok_or_else(|| Failure::invalid("empty configuration file"))?;
    let d: usize = first_cube
        .split(';')
        .next()
        .and_then(|tok| tok.parse().ok())
        .ok_or_else(|| Failure::invalid("malformed first configuration line"))?;
    if q >= d {
        return Err(Failure::invalid(format!("q={q} must be below d={d}")));
    }
    let region = Window::new(window_n + 1, d);
    let config =
        Configuration::parse(region, &text).map_err(|e| Failure::invalid(e.to_string()))?;
    let filtration = build_filtration(&config, Window::new(window_n, d))
        .map_err(|e| Failure::runtime(e.to_string()))?;
    let diagram = persistence_diagram(&filtration, q);
    let curve = betti_curve(&filtration, q);

    let prefix = cfg
        .resolve_path("out", args.out)?
        .ok_or_else(|| Failure::invalid("--out prefix is required"))?;
    let mut diagram_csv = String::from("birth,death\n");
    for iv in &diagram.intervals {
        diagram_csv.push_str(&format!("{},{}\n", iv.birth, iv.death));
    }
    let mut curve_csv = String::from("t,beta\n");
    for &(t, v) in curve.points() {
        curve_csv.push_str(&format!("{t},{v}\n"));
    }
    fs::write(with_suffix(&prefix, ".diagram.csv"), diagram_csv)?;
    fs::write(with_suffix(&prefix, ".curve.csv"), curve_csv)?;
    Ok(())
}

fn with_suffix(prefix: &std::path::Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_lln(args: PlanArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let format = parse_format(cfg.resolve("format", args.format.clone())?)?;
    let out = cfg.resolve_path("out", args.out.clone())?;
    let plan = build_plan(&args, cfg)?;
    let result = run_lln(&plan)?;
    for delta in &result.sup_deltas {
        eprintln!(
            "sup |mean_{}(t) - mean_{}(t)| = {}",
            delta.from_n, delta.to_n, delta.sup_diff
        );
    }
    let mut buf = Vec::new();
    emit_lln(&result, format, &mut buf)?;
    write_output(out.as_ref(), &buf)
}

fn cmd_lifetime_lln(args: PlanArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let format = parse_format(cfg.resolve("format", args.format.clone())?)?;
    let out = cfg.resolve_path("out", args.out.clone())?;
    let plan = build_plan(&args, cfg)?;
    let result = run_lifetime_lln(&plan)?;
    let mut buf = Vec::new();
    emit_lifetime_lln(&result, format, &mut buf)?;
    write_output(out.as_ref(), &buf)
}

fn cmd_clt(args: CltArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let format = parse_format(cfg.resolve("format", args.plan.format.clone())?)?;
    let out = cfg.resolve_path("out", args.plan.out.clone())?;
    let plan = build_plan(&args.plan, cfg)?;
    let target = match cfg
        .resolve::<String>("target", args.target)?
        .unwrap_or_else(|| "betti".to_string())
        .as_str()
    {
        "betti" => CltTarget::Betti { t: cfg.resolve("t", args.t)?.unwrap_or(0.5) },
        "lifetime" => CltTarget::Lifetime,
        other => return Err(Failure::invalid(format!("unknown target `{other}`"))),
    };
    let result = run_clt(&plan, target)?;
    let mut buf = Vec::new();
    emit_clt(&result, format, &mut buf)?;
    write_output(out.as_ref(), &buf)
}

fn cmd_positivity(args: PositivityArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let model_text: String = cfg
        .resolve("model", args.model)?
        .ok_or_else(|| Failure::invalid("--model is required"))?;
    let model = parse_model(&model_text)?;
    let q: usize = cfg.resolve("q", args.q)?.unwrap_or(1);
    let t: f64 = cfg.resolve("t", args.t)?.unwrap_or(0.5);
    let window_k: u32 = cfg.resolve("window-k", args.window_k)?.unwrap_or(2);
    let samples: usize = cfg.resolve("samples", args.samples)?.unwrap_or(10_000);
    let seed: u64 = cfg.resolve("seed", args.seed)?.unwrap_or(0);
    let format = parse_format(cfg.resolve("format", args.format)?)?;
    let report = run_positivity(&model, q, t, window_k, samples, seed)?;
    eprintln!(
        "witnesses in {} of {} samples; lower bound {}",
        report.samples_with_witness, report.samples, report.lower_bound
    );
    let mut buf = Vec::new();
    emit_positivity(&report, format, &mut buf)?;
    let out = cfg.resolve_path("out", args.out)?;
    write_output(out.as_ref(), &buf)
}

fn cmd_checks(args: ChecksArgs, cfg: &FileConfig) -> Result<(), Failure> {
    let trials: usize = cfg.resolve("trials", args.trials)?.unwrap_or(500);
    let resample_trials: usize =
        cfg.resolve("resample-trials", args.resample_trials)?.unwrap_or(1000);
    let stab_pairs: usize = cfg.resolve("stab-pairs", args.stab_pairs)?.unwrap_or(100);
    let seed: u64 = cfg.resolve("seed", args.seed)?.unwrap_or(0);
    let format = parse_format(cfg.resolve("format", args.format)?)?;

    let bounds = check_additivity_bounds(trials, seed);
    eprintln!(
        "additivity bounds: {} nested violations, {} cover violations",
        bounds.nested_violations.len(),
        bounds.cover_violations.len()
    );

    let mut resampling = Vec::new();
    for d in [2usize, 3] {
        let model = ModelSpec::uniform(d);
        for q in 0..2.min(d) {
            let report = check_resampling_bound(&model, 3, q, 0.5, resample_trials, seed)?;
            eprintln!(
                "resampling d={d} q={q}: max |diff| {} (bound {})",
                report.max_abs_diff, report.bound
            );
            resampling.push(report);
        }
    }

    let model = ModelSpec::uniform(2);
    let n_list: Vec<u32> = (2..=8).collect();
    let region = Window::new(9, 2);
    let mut reports = Vec::new();
    let mut stabilized = 0usize;
    for i in 0..stab_pairs {
        let s = SampleSeed::new(seed ^ 0x5741, i as u64);
        let base = sample_configuration(&model, region, &s)
            .map_err(|e| Failure::runtime(e.to_string()))?;
        let stirred =
            resample_origin(&base, &model, &s).map_err(|e| Failure::runtime(e.to_string()))?;
        let report = check_stabilization(&base, &stirred, 1, 0.5, &n_list)?;
        if report.stabilized {
            stabilized += 1;
        }
        reports.push(report);
    }
    eprintln!("stabilization: {stabilized}/{stab_pairs} pairs constant on the tail");

    let bundle = ChecksBundle {
        additivity_bounds: bounds,
        resampling,
        stabilization_summary: StabilizationSummary {
            pairs: stab_pairs,
            stabilized,
            reports,
        },
    };
    let mut buf = Vec::new();
    emit_checks(&bundle, format, &mut buf)?;
    let out = cfg.resolve_path("out", args.out)?;
    write_output(out.as_ref(), &buf)?;

    let bounds_ok = bundle.additivity_bounds.passed();
    let resample_ok = bundle.resampling.iter().all(|r| r.violations == 0);
    let stab_ok = stabilized * 100 >= stab_pairs * 95;
    if bounds_ok && resample_ok && stab_ok {
        Ok(())
    } else {
        Err(Failure::runtime("one or more property checks failed"))
    }
}
