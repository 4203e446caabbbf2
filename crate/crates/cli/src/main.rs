//! `ladle`: generate, validate, and simulate food distribution scenarios.
//!
//! Exit codes: 0 success, 2 input or IO error (including usage), 3 scenario
//! validation failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use ladle_cli::report;
use ladle_core::{
    compute_metrics, generate_scenario, run_baseline_policy, run_proposed_policy_with,
    validate_scenario, AgencyOrdering, EpsilonSpec, GeneratorConfig, MetricsError, PolicyError,
    Scenario, SimError,
};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Policy { .. } | SimError::Metrics { .. } => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<PolicyError> for CliError {
    fn from(e: PolicyError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// Comma-separated float list, e.g. `1.5` or `0.5,1.0,2.0`.
#[derive(Debug, Clone)]
struct FloatList(Vec<f64>);

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}")))
            .collect::<Result<Vec<f64>, _>>()
            .map(FloatList)
    }
}

/// `LO:HI` numeric range.
#[derive(Debug, Clone, Copy)]
struct RangeArg {
    lo: f64,
    hi: f64,
}

impl FromStr for RangeArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
        Ok(RangeArg {
            lo: lo.trim().parse().map_err(|e| format!("bad range start {lo:?}: {e}"))?,
            hi: hi.trim().parse().map_err(|e| format!("bad range end {hi:?}: {e}"))?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyChoice {
    Proposed,
    Baseline,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrderChoice {
    /// Poorest agencies first (head-count ratio descending).
    PovertyDesc,
    /// Least poor agencies first.
    PovertyAsc,
}

impl From<OrderChoice> for AgencyOrdering {
    fn from(c: OrderChoice) -> Self {
        match c {
            OrderChoice::PovertyDesc => AgencyOrdering::PoorestFirst,
            OrderChoice::PovertyAsc => AgencyOrdering::LeastPoorFirst,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatChoice {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct GeneratorArgs {
    /// Master seed for scenario generation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of donors (at most 63).
    #[arg(long, default_value_t = 10)]
    donors: usize,
    /// Number of receiving agencies.
    #[arg(long, default_value_t = 5)]
    agencies: usize,
    /// Number of food types.
    #[arg(long = "food-types", default_value_t = 3)]
    food_types: usize,
    /// Per-donor, per-type supply range in pounds.
    #[arg(long = "supply-range", default_value = "600:800")]
    supply_range: RangeArg,
    /// Per-agency total demand range in pounds.
    #[arg(long = "demand-range", default_value = "1000:2000")]
    demand_range: RangeArg,
    /// Side length of the square service region.
    #[arg(long = "region-km", default_value_t = 50.0)]
    region_km: f64,
    /// Inequality aversion: one value for all food types, or one per type.
    /// For `sweep` this is the grid of values to sweep over.
    #[arg(long, alias = "epsilons", default_value = "1.5")]
    epsilon: FloatList,
    /// Plate-share weights, one per food type (default uniform).
    #[arg(long)]
    weights: Option<FloatList>,
    /// Pounds that feed one person for one day.
    #[arg(long = "pounds-per-person", default_value_t = 4.0)]
    pounds_per_person: f64,
}

impl GeneratorArgs {
    fn to_config(&self) -> GeneratorConfig {
        GeneratorConfig {
            n_donors: self.donors,
            n_agencies: self.agencies,
            n_food_types: self.food_types,
            supply_range: (self.supply_range.lo, self.supply_range.hi),
            demand_range: (self.demand_range.lo, self.demand_range.hi),
            region_size_km: self.region_km,
            epsilon: if self.epsilon.0.len() == 1 {
                EpsilonSpec::Uniform(self.epsilon.0[0])
            } else {
                EpsilonSpec::PerType(self.epsilon.0.clone())
            },
            weights: self.weights.as_ref().map(|w| w.0.clone()),
            pounds_per_person: self.pounds_per_person,
            seed: self.seed,
            ..GeneratorConfig::default()
        }
    }
}

const GENERATOR_ARG_IDS: [&str; 10] = [
    "seed",
    "donors",
    "agencies",
    "food_types",
    "supply_range",
    "demand_range",
    "region_km",
    "epsilon",
    "weights",
    "pounds_per_person",
];

#[derive(Debug, Parser)]
#[command(
    name = "ladle",
    version,
    about = "Simulate equitable food-bank distribution policies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a scenario file and list any violations.
    Validate {
        /// Scenario JSON file to check.
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Generate a scenario and write it as JSON.
    Gen {
        #[command(flatten)]
        generator: GeneratorArgs,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one or both policies on a single scenario and emit the delivery
    /// table.
    Run {
        /// Scenario JSON file; omit to generate one from the flags below.
        #[arg(long, conflicts_with_all = GENERATOR_ARG_IDS)]
        scenario: Option<PathBuf>,
        #[command(flatten)]
        generator: GeneratorArgs,
        #[arg(long, value_enum, default_value_t = PolicyChoice::Both)]
        policy: PolicyChoice,
        /// Agency visit order for the welfare-guided policy.
        #[arg(long = "agency-order", value_enum, default_value_t = OrderChoice::PovertyDesc)]
        agency_order: OrderChoice,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatChoice::Csv)]
        format: FormatChoice,
    },
    /// Replicate both policies over generated scenarios and summarize.
    Compare {
        #[command(flatten)]
        generator: GeneratorArgs,
        /// Number of Monte Carlo replications.
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
        replications: u32,
        /// Agency visit order for the welfare-guided policy.
        #[arg(long = "agency-order", value_enum, default_value_t = OrderChoice::PovertyDesc)]
        agency_order: OrderChoice,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatChoice::Csv)]
        format: FormatChoice,
    },
    /// Rerun the comparison once per aversion value in `--epsilon`.
    Sweep {
        #[command(flatten)]
        generator: GeneratorArgs,
        /// Number of Monte Carlo replications per sweep point.
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
        replications: u32,
        /// Agency visit order for the welfare-guided policy.
        #[arg(long = "agency-order", value_enum, default_value_t = OrderChoice::PovertyDesc)]
        agency_order: OrderChoice,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatChoice::Csv)]
        format: FormatChoice,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { scenario } => cmd_validate(&scenario),
        Command::Gen { generator, out } => cmd_gen(&generator, out.as_deref()),
        Command::Run { scenario, generator, policy, agency_order, out, format } => {
            cmd_run(scenario.as_deref(), &generator, policy, agency_order, out.as_deref(), format)
        }
        Command::Compare { generator, replications, agency_order, out, format } => cmd_compare(
            &generator,
            replications as usize,
            agency_order,
            out.as_deref(),
            format,
        ),
        Command::Sweep { generator, replications, agency_order, out, format } => cmd_sweep(
            &generator,
            replications as usize,
            agency_order,
            out.as_deref(),
            format,
        ),
    }
}

fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    Scenario::from_json(&text)
        .map_err(|e| CliError::Input(format!("cannot parse {}: {e}", path.display())))
}

fn check_valid(s: &Scenario, origin: &str) -> Result<(), CliError> {
    let violations = validate_scenario(s);
    if violations.is_empty() {
        return Ok(());
    }
    for v in &violations {
        eprintln!("{v}");
    }
    Err(CliError::Validation(format!(
        "{origin}: scenario failed validation with {} violation(s)",
        violations.len()
    )))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::Input(format!("cannot write to stdout: {e}"))),
    }
}

fn cmd_validate(path: &Path) -> Result<(), CliError> {
    let s = load_scenario(path)?;
    check_valid(&s, &path.display().to_string())?;
    println!(
        "{}: valid scenario ({} donors, {} agencies, {} food types)",
        path.display(),
        s.donors.len(),
        s.agencies.len(),
        s.n_food_types()
    );
    Ok(())
}

fn cmd_gen(generator: &GeneratorArgs, out: Option<&Path>) -> Result<(), CliError> {
    let s = generate_scenario(&generator.to_config())?;
    let mut text = s.to_json_pretty();
    text.push('\n');
    emit(out, text.as_bytes())
}

fn cmd_run(
    scenario: Option<&Path>,
    generator: &GeneratorArgs,
    policy: PolicyChoice,
    agency_order: OrderChoice,
    out: Option<&Path>,
    format: FormatChoice,
) -> Result<(), CliError> {
    let s = match scenario {
        Some(path) => {
            let s = load_scenario(path)?;
            check_valid(&s, &path.display().to_string())?;
            s
        }
        None => generate_scenario(&generator.to_config())?,
    };
    let p = s.n_food_types();
    let mut rows = Vec::new();
    if policy != PolicyChoice::Baseline {
        let run = run_proposed_policy_with(&s, agency_order.into())?;
        let metrics = compute_metrics(&run, &s)?;
        rows.extend(report::run_rows("proposed", &run, &metrics, p));
    }
    if policy != PolicyChoice::Proposed {
        let run = run_baseline_policy(&s)?;
        let metrics = compute_metrics(&run, &s)?;
        rows.extend(report::run_rows("baseline", &run, &metrics, p));
    }
    let bytes = match format {
        FormatChoice::Csv => report::write_run_csv(&rows, p),
        FormatChoice::Json => report::write_run_json(&rows),
    };
    emit(out, &bytes)
}

fn cmd_compare(
    generator: &GeneratorArgs,
    replications: usize,
    agency_order: OrderChoice,
    out: Option<&Path>,
    format: FormatChoice,
) -> Result<(), CliError> {
    let stats = ladle_core::run_replications_with(
        &generator.to_config(),
        replications,
        agency_order.into(),
    )?;
    let rows = report::compare_rows(&stats);
    let bytes = match format {
        FormatChoice::Csv => report::write_compare_csv(&rows),
        FormatChoice::Json => report::write_compare_json(&rows),
    };
    emit(out, &bytes)
}

fn cmd_sweep(
    generator: &GeneratorArgs,
    replications: usize,
    agency_order: OrderChoice,
    out: Option<&Path>,
    format: FormatChoice,
) -> Result<(), CliError> {
    let points = ladle_core::epsilon_sweep_with(
        &generator.to_config(),
        &generator.epsilon.0,
        replications,
        agency_order.into(),
    )?;
    let rows = report::sweep_rows(&points);
    let bytes = match format {
        FormatChoice::Csv => report::write_sweep_csv(&rows),
        FormatChoice::Json => report::write_sweep_json(&rows),
    };
    emit(out, &bytes)
}
