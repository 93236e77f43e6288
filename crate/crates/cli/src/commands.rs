use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use pvbounds::analytic::{analytic_grid, sample_dataset, GaussianExampleConfig, Scorer};
use pvbounds::complexity::{
    order_coefficient_lower_bound, shattering_count, vc_subgraph_dimension_bounds, verify_level_set_optimality_with,
    FiniteInstance, PoolClass, SearchBudget, MAX_SHATTER_POINTS,
};
use pvbounds::rng::SampleRng;
use pvbounds::{
    build_band, compute_curves, select_accuracy, select_maximin_lcb, BandConfig, BandMode, Complexity,
    ThresholdChoice,
};

use crate::coverage::{coverage_experiment, CoverageConfig};
use crate::error::{CliError, Result};
use crate::io::{
    load_dataset_csv, load_function_class, load_instance, load_theta_table, write_dataset_csv, write_results,
    AnalyticTable, BandDocument, Cell, OutputFormat, Table, ToTable,
};

#[derive(Debug, Parser)]
#[command(name = "pvbounds", version, about = "Predictive value curves and confidence bands for scoring functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Empirical ppv/npv curves of a `score,label` file.
    Curve(CurveArgs),
    /// Confidence bands around the empirical curves.
    Bands(BandsArgs),
    /// Pick a threshold by accuracy or by the larger of the two lower bounds.
    Select(SelectArgs),
    /// Draw a labeled sample from the Gaussian example.
    Simulate(SimulateArgs),
    /// Population curves of the Gaussian example on a grid of positive rates.
    Analytic(AnalyticArgs),
    /// Monte Carlo coverage of the bands on the Gaussian example.
    Coverage(CoverageArgs),
    /// Order coefficients, shattering count and VC-subgraph bounds of a tabulated class.
    Complexity(ComplexityArgs),
    /// Check that level sets of a finite regression function are not dominated.
    #[command(name = "check-theorem1")]
    CheckTheorem1(CheckArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Output format; defaults to JSON for a `.json` file and CSV otherwise.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

impl OutputArgs {
    fn format(&self) -> OutputFormat {
        self.format.unwrap_or_else(|| OutputFormat::from_path(&self.output))
    }

    fn write<T: ToTable + ?Sized>(&self, results: &T) -> Result<()> {
        write_results(results, &self.output, self.format())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Fixed,
    Uniform,
}

#[derive(Debug, Args)]
pub struct BandArgs {
    /// Confidence parameter in (0, 1).
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Fixed)]
    pub mode: ModeArg,
    /// VC-subgraph dimension of the scoring class (uniform mode).
    #[arg(long, conflicts_with = "theta_table")]
    pub vc_dim: Option<usize>,
    /// `k,theta` file of order coefficients for k = 1..n-1 (uniform mode).
    #[arg(long)]
    pub theta_table: Option<PathBuf>,
}

impl BandArgs {
    pub fn config(&self) -> Result<BandConfig> {
        let mode = match (self.mode, self.vc_dim, &self.theta_table) {
            (ModeArg::Fixed, None, None) => BandMode::Fixed,
            (ModeArg::Fixed, _, _) => {
                return Err(CliError::Invalid(
                    "--vc-dim and --theta-table only apply to --mode uniform".into(),
                ))
            }
            (ModeArg::Uniform, Some(d), None) => BandMode::Uniform(Complexity::VcDimension(d)),
            (ModeArg::Uniform, None, Some(path)) => BandMode::Uniform(Complexity::Theta(load_theta_table(path)?)),
            (ModeArg::Uniform, _, _) => {
                return Err(CliError::Invalid(
                    "--mode uniform needs exactly one of --vc-dim or --theta-table".into(),
                ))
            }
        };
        Ok(BandConfig {
            delta: self.delta,
            mode,
        })
    }
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// `score,label` CSV file.
    #[arg(long, short)]
    pub input: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BandsArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[command(flatten)]
    pub band: BandArgs,
    /// Keep only rows with c n <= k <= (1 - c) n.
    #[arg(long)]
    pub trim: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Accuracy,
    MaximinLcb,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    #[command(flatten)]
    pub band: BandArgs,
    #[arg(long, value_enum, default_value_t = RuleArg::MaximinLcb)]
    pub rule: RuleArg,
    /// Also write the choice to this file.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScorerArg {
    Eta,
    F1,
}

impl From<ScorerArg> for Scorer {
    fn from(s: ScorerArg) -> Self {
        match s {
            ScorerArg::Eta => Scorer::Eta,
            ScorerArg::F1 => Scorer::F1,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[arg(long, value_enum, default_value_t = ScorerArg::Eta)]
    pub scorer: ScorerArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output `score,label` CSV file.
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// Number of positive rates, evenly spaced from 1/grid to (grid-1)/grid.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    #[command(flatten)]
    pub band: BandArgs,
    #[arg(long, default_value_t = 50)]
    pub reps: usize,
    /// Master seed; replication i uses a seed derived from it and i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ScorerArg::Eta)]
    pub scorer: ScorerArg,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    /// Tabulated class: {"points": [...], "functions": [{"id": ..., "values": [...]}]}.
    #[arg(long, required_unless_present = "affine_pool", conflicts_with = "affine_pool")]
    pub class: Option<PathBuf>,
    /// Use the affine functions a x + b on these comma-separated points.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub affine_pool: Option<Vec<f64>>,
    /// Slopes of the affine family.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "-2,-1,-0.5,0,0.5,1,2")]
    pub slopes: Vec<f64>,
    /// Intercepts of the affine family.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "-2,-1,-0.5,0,0.5,1,2")]
    pub intercepts: Vec<f64>,
    /// Declared vector-space dimension of a tabulated class.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Subset size for the order coefficients; defaults to the pool size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Largest subset count searched exhaustively.
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Instance file: {"mu": ["1/2", ...], "eta": ["4/5", ...]}. Repeatable.
    #[arg(long)]
    pub instance: Vec<PathBuf>,
    /// Number of random instances to check as well.
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    /// Largest number of points in a random instance.
    #[arg(long, default_value_t = 10)]
    pub max_m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also check the level sets of mass 0 and 1.
    #[arg(long)]
    pub include_degenerate: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

fn write_optional<T: ToTable + ?Sized>(results: &T, path: &Option<PathBuf>, format: Option<OutputFormat>) -> Result<()> {
    match path {
        Some(p) => write_results(results, p, format.unwrap_or_else(|| OutputFormat::from_path(p))),
        None => Ok(()),
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Curve(a) => {
            let curves = compute_curves(&load_dataset_csv(&a.input)?);
            a.output.write(&curves)
        }
        Command::Bands(a) => {
            let curves = compute_curves(&load_dataset_csv(&a.input)?);
            let band = build_band(&curves, &a.band.config()?)?;
            a.output.write(&BandDocument::from_band(&band, a.trim)?)
        }
        Command::Select(a) => {
            let choice = select(&a.input, &a.band, a.rule)?;
            println!(
                "k={} alpha={} rule={} objective={}",
                choice.k,
                choice.alpha,
                choice.rule.name(),
                choice.objective_value
            );
            write_optional(&choice, &a.output, None)
        }
        Command::Simulate(a) => {
            let dataset = sample_dataset(&GaussianExampleConfig {
                d: a.d,
                scorer: a.scorer.into(),
                seed: a.seed,
                n: a.n,
            })?;
            write_dataset_csv(&dataset, &a.output)
        }
        Command::Analytic(a) => {
            let points = analytic_grid(a.d, a.grid)?;
            a.output.write(&AnalyticTable { d: a.d, points: &points })
        }
        Command::Coverage(a) => coverage(a),
        Command::Complexity(a) => complexity(a),
        Command::CheckTheorem1(a) => check_theorem1(a),
    }
}

pub fn select(input: &Path, band: &BandArgs, rule: RuleArg) -> Result<ThresholdChoice> {
    let curves = compute_curves(&load_dataset_csv(input)?);
    Ok(match rule {
        RuleArg::Accuracy => select_accuracy(&curves),
        RuleArg::MaximinLcb => select_maximin_lcb(&build_band(&curves, &band.config()?)?)?,
    })
}

fn coverage(a: CoverageArgs) -> Result<()> {
    let config = CoverageConfig {
        n: a.n,
        d: a.d,
        delta: a.band.delta,
        reps: a.reps,
        master_seed: a.seed,
        mode: a.band.config()?.mode,
        scorer: a.scorer.into(),
    };
    let report = match a.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Invalid(e.to_string()))?
            .install(|| coverage_experiment(&config))?,
        None => coverage_experiment(&config)?,
    };
    let covered = report.replications.iter().filter(|r| r.covered).count();
    println!(
        "coverage={} covered={covered} reps={} delta={} n={} d={} scorer={}",
        report.coverage,
        config.reps,
        config.delta,
        config.n,
        config.d,
        config.scorer.name()
    );
    write_optional(&report, &a.output, a.format)
}

struct ComplexityReport {
    meta: Vec<(&'static str, Cell)>,
    rows: Vec<Vec<Cell>>,
}

impl ToTable for ComplexityReport {
    fn to_table(&self) -> Table {
        Table {
            meta: self.meta.clone(),
            meta_json: Vec::new(),
            columns: vec!["k", "theta_lower_bound", "exhaustive", "subsets_examined", "best_subset"],
            rows: self.rows.clone(),
        }
    }
}

fn complexity(a: ComplexityArgs) -> Result<()> {
    let pool = match (&a.class, &a.affine_pool) {
        (Some(path), _) => PoolClass::new(load_function_class(path)?, a.dim),
        (None, Some(points)) => PoolClass::affine_on_line(points, &a.slopes, &a.intercepts)?,
        (None, None) => unreachable!("clap requires one of --class or --affine-pool"),
    };
    let budget = SearchBudget {
        max_subsets: a.budget,
        seed: a.seed,
    };
    let size = pool.pool_size();
    let n = a.n.unwrap_or(size);

    let mut rows = Vec::new();
    let mut max_theta = 0;
    for k in 1..=n {
        let r = order_coefficient_lower_bound(&pool, n, k, budget)?;
        max_theta = max_theta.max(r.value);
        let subset = r
            .best_subset
            .iter()
            .map(|&i| pool.class.point_ids()[i].as_str())
            .collect::<Vec<_>>()
            .join(" ");
        rows.push(vec![
            Cell::Int(k as u64),
            Cell::Int(r.value as u64),
            Cell::Bool(r.exhaustive),
            Cell::Int(r.subsets_examined),
            Cell::Text(subset),
        ]);
    }
    let vc = vc_subgraph_dimension_bounds(&pool, budget)?;
    let mut meta = vec![
        ("m", Cell::Int(pool.class.m() as u64)),
        ("pool_size", Cell::Int(size as u64)),
        ("n", Cell::Int(n as u64)),
        ("seed", Cell::Int(a.seed)),
    ];
    println!("m={} pool_size={size} n={n}", pool.class.m());
    println!("theta_lower_bound_max={max_theta}");
    if size <= MAX_SHATTER_POINTS {
        let pi = shattering_count(&pool.class)?;
        println!("shattering_count={pi}");
        meta.push(("shattering_count", Cell::Int(pi as u64)));
    }
    println!(
        "vc_lower={} vc_upper={}{}",
        vc.lower,
        vc.upper,
        if vc.upper_certified { "" } else { " (no dimension declared)" }
    );
    meta.push(("vc_lower", Cell::Int(vc.lower as u64)));
    meta.push(("vc_upper", Cell::Int(vc.upper as u64)));
    meta.push(("vc_upper_certified", Cell::Bool(vc.upper_certified)));
    write_optional(&ComplexityReport { meta, rows }, &a.output, a.format)
}

/// Random instance with masses `w_i / sum(w)` and regression values `a/b`.
pub fn random_instance(rng: &mut SampleRng, max_m: usize) -> FiniteInstance {
    let m = 1 + rng.below(max_m as u64) as usize;
    let mut weights: Vec<u64> = (0..m).map(|_| rng.below(10)).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[0] = 1;
    }
    let total: u64 = weights.iter().sum();
    let mu: Vec<String> = weights.iter().map(|w| format!("{w}/{total}")).collect();
    let eta: Vec<String> = (0..m)
        .map(|_| {
            let den = 1 + rng.below(12);
            format!("{}/{den}", rng.below(den + 1))
        })
        .collect();
    FiniteInstance::parse(&mu, &eta).expect("generated instances are valid")
}

struct CheckReport(Vec<Vec<Cell>>);

impl ToTable for CheckReport {
    fn to_table(&self) -> Table {
        Table {
            columns: vec![
                "instance",
                "m",
                "holds",
                "level_sets_checked",
                "degenerate_skipped",
                "counterexample",
            ],
            rows: self.0.clone(),
            ..Table::default()
        }
    }
}

fn check_theorem1(a: CheckArgs) -> Result<()> {
    if a.instance.is_empty() && a.random == 0 {
        return Err(CliError::Invalid("give --instance files and/or --random N".into()));
    }
    if a.random > 0 && a.max_m == 0 {
        return Err(CliError::Invalid("--max-m must be >= 1".into()));
    }
    let mut instances = Vec::new();
    for path in &a.instance {
        instances.push((path.display().to_string(), load_instance(path)?));
    }
    let mut rng = SampleRng::new(a.seed);
    for i in 0..a.random {
        instances.push((format!("random-{i}"), random_instance(&mut rng, a.max_m)));
    }

    let mut rows = Vec::new();
    let mut failures = 0;
    for (name, instance) in &instances {
        let r = verify_level_set_optimality_with(instance, a.include_degenerate)?;
        let counterexample = r
            .counterexample
            .as_ref()
            .map(|c| format!("{:?} dominated by {:?}", c.level_set, c.dominating))
            .unwrap_or_default();
        if !r.holds {
            failures += 1;
            println!("{name}: level set {counterexample}");
        }
        rows.push(vec![
            Cell::Text(name.clone()),
            Cell::Int(instance.len() as u64),
            Cell::Bool(r.holds),
            Cell::Int(r.level_sets_checked as u64),
            Cell::Int(r.degenerate_skipped as u64),
            Cell::Text(counterexample),
        ]);
    }
    println!("instances={} holds={} failures={failures}", instances.len(), instances.len() - failures);
    write_optional(&CheckReport(rows), &a.output, a.format)?;
    if failures > 0 {
        return Err(CliError::Invalid(format!("{failures} instance(s) with a dominated level set")));
    }
    Ok(())
}
