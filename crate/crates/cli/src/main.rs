//! `luce`: sampling, statistics, limit constants and the experiment harness.

use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use luce::experiments::{self, ExperimentConfig, REGISTRY};
use luce::inversions::{
    be_bound_inversions, inversion_moments, sukhatme_inversion_constant, sukhatme_inversion_mean_constant,
};
use luce::io::{fmt_f64, read_permutations, write_permutations, Table, WeightsSpec};
use luce::locallimits::{
    be_bound_cocc, eta_exponential, lambda_exponential, lambda_finite, nu_infinity_exponential, nu_infinity_uniform,
    nu_n_squared, zeta,
};
use luce::model::{log_luce_pmf, Algorithm};
use luce::patterns::{cocc, count_inversions, cycle_stats, occ_estimate, occ_exact};
use luce::permuton::{mallows_density, DensityMethod};
use luce::topk::{topk_probability_luce, topk_probability_permuton, PositionQuery, TopkMethod};
use luce::{luce_pmf, rng_stream, Error, ExactRational, Pattern, Permutation, PermutonModel, WeightProfile};

#[derive(Parser)]
#[command(name = "luce", version, about = "Luce (Plackett-Luce) random permutations")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw Luce permutations, one per line.
    Sample(SampleArgs),
    /// Probability of one permutation.
    Pmf(PmfArgs),
    /// Pattern and cycle statistics of permutations read from a file.
    Stats(StatsArgs),
    /// The limiting permuton.
    #[command(subcommand)]
    Permuton(PermutonCmd),
    /// Exact local-limit constants for consecutive patterns.
    #[command(subcommand)]
    Limits(LimitsCmd),
    /// Inversion-count moments and bounds.
    #[command(subcommand)]
    Inversions(InversionsCmd),
    /// Probability that the given labels are drawn last, in order.
    Topk(TopkArgs),
    /// Run a registered experiment and write its CSV and JSON sidecar.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Sequential,
    Race,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Sequential => Algorithm::Sequential,
            AlgoArg::Race => Algorithm::Race,
        }
    }
}

#[derive(Args)]
struct WeightsArgs {
    /// sukhatme | linear | constant[:C] | exp-sukhatme:ALPHA | steps:V1,V2,.. | file:PATH
    #[arg(long, alias = "profile", default_value = "sukhatme")]
    weights: String,
    /// Number of labels (implied by file:PATH).
    #[arg(long)]
    n: Option<usize>,
}

impl WeightsArgs {
    fn resolve(&self) -> luce::Result<luce::WeightVector> {
        WeightsSpec::parse(&self.weights)?.resolve(self.n)
    }
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    weights: WeightsArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, value_enum, default_value = "sequential")]
    algo: AlgoArg,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PmfArgs {
    #[command(flatten)]
    weights: WeightsArgs,
    /// One-line notation, e.g. "2 3 1".
    #[arg(long)]
    perm: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct StatsArgs {
    /// Permutation file, one per line; `-` reads stdin.
    #[arg(long, default_value = "-")]
    input: String,
    /// Patterns whose classical and consecutive proportions are reported.
    #[arg(long = "pattern")]
    patterns: Vec<Pattern>,
    /// Estimate classical occurrences from this many random subsets.
    #[arg(long)]
    occ_samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct ProfileArg {
    /// sukhatme | linear | constant[:C] | steps:V1,V2,..
    #[arg(long, alias = "weights", default_value = "sukhatme")]
    profile: String,
}

impl ProfileArg {
    fn model(&self) -> luce::Result<PermutonModel> {
        PermutonModel::new(WeightProfile::parse(&self.profile)?)
    }
}

#[derive(Subcommand)]
enum PermutonCmd {
    /// F(x).
    F {
        #[command(flatten)]
        profile: ProfileArg,
        #[arg(long)]
        x: f64,
    },
    /// F⁻¹(y).
    Inverse {
        #[command(flatten)]
        profile: ProfileArg,
        #[arg(long)]
        y: f64,
    },
    /// Density ρ(x, y).
    Density {
        #[command(flatten)]
        profile: ProfileArg,
        #[arg(long)]
        x: f64,
        #[arg(long)]
        y: f64,
    },
    /// Density on the midpoints of a G×G grid, CSV `x,y,rho`.
    Grid {
        #[command(flatten)]
        profile: ProfileArg,
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// Tabulate the Mallows permuton with this β instead.
        #[arg(long)]
        mallows: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pattern density of the permuton.
    PatternDensity {
        #[command(flatten)]
        profile: ProfileArg,
        #[arg(long)]
        pattern: Pattern,
        /// Monte Carlo with this many samples instead of quadrature.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Permutations sampled from the permuton.
    Sample {
        #[command(flatten)]
        profile: ProfileArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Compute y-coordinates through F rather than by ranking.
        #[arg(long)]
        evaluate_f: bool,
    },
}

#[derive(Subcommand)]
enum LimitsCmd {
    /// Limiting variance constant ν∞(π); with --alpha, for geometric weights.
    NuInfinity {
        #[arg(long)]
        pattern: Pattern,
        #[arg(long)]
        alpha: Option<ExactRational>,
    },
    /// Limiting mean Λ(π); 1/k! without --alpha.
    Lambda {
        #[arg(long)]
        pattern: Pattern,
        #[arg(long)]
        alpha: Option<ExactRational>,
    },
    /// ζ(π, h) for locally uniform weights.
    Zeta {
        #[arg(long)]
        pattern: Pattern,
        #[arg(long)]
        h: usize,
    },
    /// η(π, h) for geometric weights.
    Eta {
        #[arg(long)]
        pattern: Pattern,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        alpha: ExactRational,
    },
    /// Finite-n mean and n·variance of the consecutive proportion.
    Finite {
        #[command(flatten)]
        weights: WeightsArgs,
        #[arg(long)]
        pattern: Pattern,
    },
    /// Berry–Esseen bound 32(1+√6)·n·k²/ν_n³.
    BeBound {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        nu: f64,
    },
}

#[derive(Subcommand)]
enum InversionsCmd {
    /// Exact mean and variance of the inversion count.
    Moments {
        #[command(flatten)]
        weights: WeightsArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Limiting constants for f(y) = 1 - y.
    Sukhatme,
    /// Berry–Esseen style bound with a = (√Var - n)⁺.
    BeBound {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        variance: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
}

#[derive(Args)]
struct TopkArgs {
    #[command(flatten)]
    weights: WeightsArgs,
    /// Labels a₁ (drawn last), a₂, …
    #[arg(long = "label", required = true)]
    labels: Vec<usize>,
    /// Monte Carlo with this many samples (default: quadrature).
    #[arg(long)]
    samples: Option<u64>,
    /// Also estimate the same event for the permuton sample, with this many replicates.
    #[arg(long)]
    permuton_reps: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Registered experiment name.
    name: Option<String>,
    /// List registered experiments.
    #[arg(long)]
    list: bool,
    #[arg(long, alias = "profile")]
    weights: Option<String>,
    #[arg(long = "pattern")]
    patterns: Vec<Pattern>,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    mc_samples: Option<u64>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long = "label")]
    labels: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "sequential")]
    algo: AlgoArg,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Exit with status 3 when a tolerance check fails.
    #[arg(long)]
    check: bool,
}

enum Failure {
    Lib(Error),
    Checks(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(3)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Capacity(_) => 4,
                Error::Io(_) => 1,
                _ => 2,
            })
        }
    }
}

fn dispatch(cmd: Command) -> CliResult {
    match cmd {
        Command::Sample(a) => cmd_sample(a),
        Command::Pmf(a) => cmd_pmf(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Permuton(c) => cmd_permuton(c),
        Command::Limits(c) => cmd_limits(c),
        Command::Inversions(c) => cmd_inversions(c),
        Command::Topk(a) => cmd_topk(a),
        Command::Experiment(a) => cmd_experiment(a),
    }
}

fn cmd_sample(a: SampleArgs) -> CliResult {
    let weights = a.weights.resolve()?;
    let algo = Algorithm::from(a.algo);
    let perms: Vec<Permutation> = (0..a.count).map(|r| algo.sample(&weights, &mut rng_stream(a.seed, r))).collect();
    match a.out {
        Some(path) => write_permutations(&mut BufWriter::new(std::fs::File::create(path)?), &perms)?,
        None => write_permutations(&mut BufWriter::new(io::stdout().lock()), &perms)?,
    }
    Ok(())
}

fn cmd_pmf(a: PmfArgs) -> CliResult {
    let weights = a.weights.resolve()?;
    let sigma: Permutation = a.perm.parse()?;
    let p = luce_pmf(&weights, &sigma)?;
    let lp = log_luce_pmf(&weights, &sigma)?;
    emit(a.format, &[("probability", p), ("log_probability", lp)])
}

/// Prints named values as `name = value` lines or a JSON object.
fn emit(format: Format, values: &[(&str, f64)]) -> CliResult {
    match format {
        Format::Json => {
            let obj: serde_json::Map<String, Value> = values.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            println!("{}", Value::Object(obj));
        }
        Format::Csv => {
            let mut t = Table::new(&values.iter().map(|v| v.0).collect::<Vec<_>>());
            t.push(values.iter().map(|v| fmt_f64(v.1)).collect());
            print!("{}", t.to_csv()?);
        }
        Format::Text => {
            for (k, v) in values {
                println!("{k} = {}", fmt_f64(*v));
            }
        }
    }
    Ok(())
}

fn read_input(input: &str) -> luce::Result<Vec<Permutation>> {
    if input != "-" {
        return read_permutations(std::path::Path::new(input));
    }
    let mut text = String::new();
    io::stdin().read_to_string(&mut text)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(line.parse().map_err(|e: Error| Error::Parse {
            path: "<stdin>".into(),
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

fn cmd_stats(a: StatsArgs) -> CliResult {
    let perms = read_input(&a.input)?;
    let mut header = vec!["index".to_string(), "n".into(), "inversions".into(), "fixed_points".into(), "cycles".into()];
    for p in &a.patterns {
        header.push(format!("occ_{p}"));
        header.push(format!("cocc_{p}"));
    }
    let mut table = Table::new(&header);
    for (i, sigma) in perms.iter().enumerate() {
        let cycles = cycle_stats(sigma);
        let mut row = vec![
            (i + 1).to_string(),
            sigma.len().to_string(),
            count_inversions(sigma).to_string(),
            cycles.fixed_points.to_string(),
            cycles.cycle_type.values().sum::<usize>().to_string(),
        ];
        for p in &a.patterns {
            let occ = match a.occ_samples {
                Some(s) => occ_estimate(p, sigma, s, &mut rng_stream(a.seed, i as u64))?.value,
                None => occ_exact(p, sigma)?.proportion,
            };
            row.push(fmt_f64(occ));
            row.push(fmt_f64(cocc(p, sigma)?.proportion));
        }
        table.push(row);
    }
    match a.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&table.to_json()).map_err(Error::from)?),
        _ => print!("{}", table.to_csv()?),
    }
    Ok(())
}

fn cmd_permuton(c: PermutonCmd) -> CliResult {
    match c {
        PermutonCmd::F { profile, x } => println!("{}", fmt_f64(profile.model()?.capital_f(x)?)),
        PermutonCmd::Inverse { profile, y } => println!("{}", fmt_f64(profile.model()?.capital_f_inverse(y)?)),
        PermutonCmd::Density { profile, x, y } => println!("{}", fmt_f64(profile.model()?.density(x, y)?)),
        PermutonCmd::Grid { profile, points, mallows, out } => {
            if points == 0 {
                return Err(Error::Argument("--points must be at least 1".into()).into());
            }
            let axis: Vec<f64> = (0..points).map(|i| (i as f64 + 0.5) / points as f64).collect();
            let cells = match mallows {
                Some(beta) => {
                    let mut v = Vec::with_capacity(points * points);
                    for &x in &axis {
                        for &y in &axis {
                            v.push((x, y, mallows_density(beta, x, y)?));
                        }
                    }
                    v
                }
                None => profile.model()?.density_grid(&axis, &axis)?,
            };
            let mut table = Table::new(&["x", "y", "rho"]);
            for (x, y, r) in cells {
                table.push(vec![fmt_f64(x), fmt_f64(y), fmt_f64(r)]);
            }
            match out {
                Some(path) => table.write_csv(&path)?,
                None => print!("{}", table.to_csv()?),
            }
        }
        PermutonCmd::PatternDensity { profile, pattern, samples, seed, format } => {
            let method = match samples {
                Some(samples) => DensityMethod::MonteCarlo { samples, seed },
                None => DensityMethod::Quadrature,
            };
            let e = profile.model()?.pattern_density(&pattern, method)?;
            emit(format, &[("density", e.value), ("stderr", e.stderr)])?;
        }
        PermutonCmd::Sample { profile, n, count, seed, evaluate_f } => {
            let model = profile.model()?;
            let perms: Vec<Permutation> =
                (0..count).map(|r| model.sample_with(n, &mut rng_stream(seed, r), evaluate_f)).collect();
            write_permutations(&mut BufWriter::new(io::stdout().lock()), &perms)?;
        }
    }
    Ok(())
}

fn print_exact(v: &ExactRational) {
    println!("{v} ≈ {:.6}", v.to_f64());
}

fn cmd_limits(c: LimitsCmd) -> CliResult {
    match c {
        LimitsCmd::NuInfinity { pattern, alpha } => print_exact(&match alpha {
            Some(a) => nu_infinity_exponential(&pattern, &a)?,
            None => nu_infinity_uniform(&pattern)?,
        }),
        LimitsCmd::Lambda { pattern, alpha } => print_exact(&match alpha {
            Some(a) => lambda_exponential(&pattern, &a)?,
            None => ExactRational::new(1, (1..=pattern.len() as i64).product()),
        }),
        LimitsCmd::Zeta { pattern, h } => print_exact(&zeta(&pattern, h)?),
        LimitsCmd::Eta { pattern, h, alpha } => print_exact(&eta_exponential(&pattern, h, &alpha)?),
        LimitsCmd::Finite { weights, pattern } => {
            let w = weights.resolve()?;
            let mean = lambda_finite(&w, &pattern)?;
            let nu2 = nu_n_squared(&w, &pattern)?;
            emit(Format::Text, &[("mean", mean), ("nu_n_squared", nu2)])?;
        }
        LimitsCmd::BeBound { n, k, nu } => println!("{}", fmt_f64(be_bound_cocc(n, k, nu)?)),
    }
    Ok(())
}

fn cmd_inversions(c: InversionsCmd) -> CliResult {
    match c {
        InversionsCmd::Moments { weights, format } => {
            let m = inversion_moments(&weights.resolve()?)?;
            emit(format, &[("n", m.n as f64), ("mean", m.mean), ("variance", m.variance)])
        }
        InversionsCmd::Sukhatme => emit(
            Format::Text,
            &[("mean_proportion", sukhatme_inversion_mean_constant()), ("v", sukhatme_inversion_constant())],
        ),
        InversionsCmd::BeBound { n, variance, c } => {
            let b = be_bound_inversions(n, variance, c)?;
            emit(Format::Text, &[("a", b.a), ("bound", b.value)])
        }
    }
}

fn cmd_topk(a: TopkArgs) -> CliResult {
    let weights = a.weights.resolve()?;
    let query = PositionQuery::new(a.labels.clone(), weights.len())?;
    let method = match a.samples {
        Some(samples) => TopkMethod::MonteCarlo { samples, seed: a.seed },
        None => TopkMethod::Quadrature,
    };
    let luce = topk_probability_luce(&weights, &query, method)?;
    let mut values = vec![("luce", luce.value), ("luce_stderr", luce.stderr)];
    if let Some(reps) = a.permuton_reps {
        let profile = WeightsSpec::parse(&a.weights.weights)?
            .profile()
            .cloned()
            .ok_or_else(|| Error::Argument("the permuton needs a weight profile".into()))?;
        let e = topk_probability_permuton(&PermutonModel::new(profile)?, &query, reps, a.seed)?;
        values.push(("permuton", e.value));
        values.push(("permuton_stderr", e.stderr));
    }
    emit(a.format, &values)
}

fn cmd_experiment(a: ExperimentArgs) -> CliResult {
    if a.list {
        for (name, about) in REGISTRY {
            println!("{name:<22}{about}");
        }
        return Ok(());
    }
    let Some(name) = a.name else {
        return Err(Error::Argument(format!("experiment name required; registered: {}", experiments::registry_names())).into());
    };
    let cfg = ExperimentConfig {
        weights: a.weights,
        patterns: a.patterns,
        n: a.n,
        reps: a.reps,
        mc_samples: a.mc_samples,
        alpha: a.alpha,
        labels: a.labels,
        seed: a.seed,
        algo: a.algo.into(),
    };
    let report = experiments::run(&name, &cfg)?;
    let (csv, meta) = report.write(&a.out)?;
    let mut out = io::stdout().lock();
    writeln!(out, "wrote {} and {}", csv.display(), meta.display())?;
    for c in &report.outcome.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{verdict} {}: observed {} reference {} ({})", c.name, fmt_f64(c.observed), fmt_f64(c.reference), c.tolerance)?;
    }
    if a.check && !report.passed() {
        let failed = report.outcome.checks.iter().filter(|c| !c.passed).count();
        return Err(Failure::Checks(format!("{failed} check(s) failed")));
    }
    Ok(())
}
