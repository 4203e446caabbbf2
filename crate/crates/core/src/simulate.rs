//! Seeded scenario generation, Monte Carlo replications, and the
//! inequality-aversion sweep.
//!
//! Everything here is deterministic given the configuration: the generator
//! consumes a fixed-order ChaCha8 stream, and replication `i` derives its
//! own seed from the master seed, so replications can run in any order (or
//! concurrently) and aggregate to identical statistics.

use crate::metrics::{compute_metrics, MetricsError, RunMetrics};
use crate::model::{
    Agency, AgencyId, Donor, DonorId, FoodType, Location, PolicyParams, Scenario,
};
use crate::policy::{run_baseline_policy, run_proposed_policy_with, AgencyOrdering, PolicyError};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("at least one replication is required")]
    NoReplications,
    #[error("replication indices must be exactly 0..{expected}")]
    BadIndexSet { expected: usize },
    #[error("epsilon sweep requires at least one epsilon")]
    EmptySweep,
    #[error("sweep epsilon must be a finite number >= 0, got {0}")]
    InvalidEpsilon(f64),
    #[error("replication {index}: {source}")]
    Policy {
        index: usize,
        #[source]
        source: PolicyError,
    },
    #[error("replication {index}: {source}")]
    Metrics {
        index: usize,
        #[source]
        source: MetricsError,
    },
}

/// Inequality aversion for generated scenarios: one value for every food
/// type, or an explicit per-type vector.
#[derive(Debug, Clone, PartialEq)]
pub enum EpsilonSpec {
    Uniform(f64),
    PerType(Vec<f64>),
}

impl EpsilonSpec {
    fn resolve(&self, p: usize) -> Vec<f64> {
        match self {
            EpsilonSpec::Uniform(e) => vec![*e; p],
            EpsilonSpec::PerType(v) => v.clone(),
        }
    }

    fn values(&self) -> &[f64] {
        match self {
            EpsilonSpec::Uniform(e) => std::slice::from_ref(e),
            EpsilonSpec::PerType(v) => v,
        }
    }
}

/// Knobs of the random scenario generator. `Default` reproduces the
/// reference setup: 10 donors, 5 agencies, 3 food types, supplies
/// U[600, 800) per type, agency demand totals U[1000, 2000) split by plate
/// weight, a 50 km square region, and aversion 1.5 everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub n_donors: usize,
    pub n_agencies: usize,
    pub n_food_types: usize,
    pub supply_range: (f64, f64),
    pub demand_range: (f64, f64),
    pub region_size_km: f64,
    pub epsilon: EpsilonSpec,
    /// Plate share per food type; `None` means uniform.
    pub weights: Option<Vec<f64>>,
    pub capacity_range: (f64, f64),
    pub population_range: (u64, u64),
    pub poverty_ratio_range: (f64, f64),
    pub pounds_per_person: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n_donors: 10,
            n_agencies: 5,
            n_food_types: 3,
            supply_range: (600.0, 800.0),
            demand_range: (1000.0, 2000.0),
            region_size_km: 50.0,
            epsilon: EpsilonSpec::Uniform(1.5),
            weights: None,
            capacity_range: (1500.0, 3000.0),
            population_range: (500, 5000),
            poverty_ratio_range: (0.05, 0.5),
            pounds_per_person: 4.0,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::InvalidConfig(msg));
        if self.n_donors == 0 {
            return bad("at least one donor is required".into());
        }
        if self.n_donors > 63 {
            return bad(format!(
                "{} donors requested; donor subset enumeration supports at most 63",
                self.n_donors
            ));
        }
        if self.n_agencies == 0 {
            return bad("at least one agency is required".into());
        }
        if self.n_food_types == 0 {
            return bad("at least one food type is required".into());
        }
        for (name, (lo, hi)) in [
            ("supply-range", self.supply_range),
            ("demand-range", self.demand_range),
            ("capacity-range", self.capacity_range),
        ] {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                return bad(format!("{name} must satisfy 0 <= lo <= hi, got {lo}:{hi}"));
            }
        }
        if self.region_size_km <= 0.0 || !self.region_size_km.is_finite() {
            return bad(format!("region size must be > 0, got {}", self.region_size_km));
        }
        let (plo, phi) = self.population_range;
        if plo < 1 || plo > phi {
            return bad(format!("population range must satisfy 1 <= lo <= hi, got {plo}:{phi}"));
        }
        let (rlo, rhi) = self.poverty_ratio_range;
        if !(rlo.is_finite() && rhi.is_finite() && 0.0 <= rlo && rlo <= rhi && rhi <= 1.0) {
            return bad(format!(
                "poverty ratio range must satisfy 0 <= lo <= hi <= 1, got {rlo}:{rhi}"
            ));
        }
        if self.pounds_per_person <= 0.0 || !self.pounds_per_person.is_finite() {
            return bad(format!("pounds per person must be > 0, got {}", self.pounds_per_person));
        }
        if let Some(w) = &self.weights {
            if w.len() != self.n_food_types {
                return bad(format!(
                    "{} weights given for {} food types",
                    w.len(),
                    self.n_food_types
                ));
            }
            if w.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
                return bad("weights must lie in [0, 1]".into());
            }
            let sum: f64 = w.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return bad(format!("weights must sum to 1 within 1e-9, got {sum}"));
            }
        }
        for &e in self.epsilon.values() {
            if e < 0.0 || !e.is_finite() {
                return bad(format!("epsilon must be a finite number >= 0, got {e}"));
            }
        }
        if let EpsilonSpec::PerType(v) = &self.epsilon {
            if v.len() != self.n_food_types {
                return bad(format!(
                    "{} epsilon values given for {} food types",
                    v.len(),
                    self.n_food_types
                ));
            }
        }
        Ok(())
    }

    fn weights_or_uniform(&self) -> Vec<f64> {
        self.weights
            .clone()
            .unwrap_or_else(|| vec![1.0 / self.n_food_types as f64; self.n_food_types])
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replication `replication` of a run with `master_seed`:
/// `splitmix64(splitmix64(master) ^ (replication * 0x9E3779B97F4A7C15))`.
/// Each replication's stream is independent of execution order.
pub fn replication_seed(master_seed: u64, replication: u64) -> u64 {
    splitmix64(splitmix64(master_seed) ^ replication.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn uniform_f(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

/// Draws a complete scenario from the config's seed. The draw order is
/// fixed (food bank location; each donor's location then supplies; the
/// donor perishability shuffle; each agency's location, demand total,
/// capacity, population, poverty ratio), so identical configs always yield
/// identical scenarios.
pub fn generate_scenario(cfg: &GeneratorConfig) -> Result<Scenario, SimError> {
    cfg.validate()?;
    let p = cfg.n_food_types;
    let weights = cfg.weights_or_uniform();
    let epsilon = cfg.epsilon.resolve(p);
    let region = cfg.region_size_km;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let food_bank_location = Location {
        x: uniform_f(&mut rng, (0.0, region)),
        y: uniform_f(&mut rng, (0.0, region)),
    };

    let food_types: Vec<FoodType> = (0..p)
        .map(|x| FoodType {
            id: x,
            name: format!("food_type_{x}"),
            weight: weights[x],
            perishability_rank: x as u32,
        })
        .collect();

    let mut donors: Vec<Donor> = (0..cfg.n_donors)
        .map(|i| {
            let location = Location {
                x: uniform_f(&mut rng, (0.0, region)),
                y: uniform_f(&mut rng, (0.0, region)),
            };
            let supply = (0..p).map(|_| uniform_f(&mut rng, cfg.supply_range)).collect();
            Donor {
                id: DonorId(i as u32),
                name: format!("donor_{i}"),
                location,
                supply,
                perishability_rank: 0,
            }
        })
        .collect();
    // Fisher-Yates over 0..n assigns each donor a distinct perishability rank
    let mut ranks: Vec<u32> = (0..cfg.n_donors as u32).collect();
    for i in (1..ranks.len()).rev() {
        let j = rng.random_range(0..=i);
        ranks.swap(i, j);
    }
    for (donor, rank) in donors.iter_mut().zip(ranks) {
        donor.perishability_rank = rank;
    }

    let agencies: Vec<Agency> = (0..cfg.n_agencies)
        .map(|j| {
            let location = Location {
                x: uniform_f(&mut rng, (0.0, region)),
                y: uniform_f(&mut rng, (0.0, region)),
            };
            let demand_total = uniform_f(&mut rng, cfg.demand_range);
            let demand = weights.iter().map(|w| demand_total * w).collect();
            let storage_capacity = uniform_f(&mut rng, cfg.capacity_range);
            let population = rng.random_range(cfg.population_range.0..=cfg.population_range.1);
            let ratio = uniform_f(&mut rng, cfg.poverty_ratio_range);
            let poor_population =
                ((ratio * population as f64).round() as u64).min(population);
            Agency {
                id: AgencyId(j as u32),
                name: format!("agency_{j}"),
                location,
                demand,
                storage_capacity,
                population,
                poor_population,
            }
        })
        .collect();

    let scenario = Scenario {
        region_size_km: region,
        food_bank_location,
        food_types,
        donors,
        agencies,
        params: PolicyParams { epsilon, weights, pounds_per_person: cfg.pounds_per_person },
    };
    debug_assert!(crate::model::validate_scenario(&scenario).is_empty());
    Ok(scenario)
}

/// Mean and sample standard deviation (n-1 denominator; 0 when n = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStat {
    pub mean: f64,
    pub sd: f64,
}

fn summarize(values: &[f64]) -> SummaryStat {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    SummaryStat { mean, sd }
}

/// Replication statistics for one policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyStats {
    pub overflow_lbs: SummaryStat,
    pub undistributed_lbs: SummaryStat,
    pub people_served: SummaryStat,
}

/// Side-by-side replication statistics for both policies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonStats {
    pub proposed: PolicyStats,
    pub baseline: PolicyStats,
    pub n_replications: usize,
    pub seed: u64,
}

/// Outcome of both policies on one replication's scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationOutcome {
    pub index: usize,
    pub proposed: RunMetrics,
    pub baseline: RunMetrics,
}

/// Runs both policies on replication `index` of the config's seed ladder.
pub fn run_replication(
    cfg: &GeneratorConfig,
    index: usize,
    ordering: AgencyOrdering,
) -> Result<ReplicationOutcome, SimError> {
    let mut replication_cfg = cfg.clone();
    replication_cfg.seed = replication_seed(cfg.seed, index as u64);
    let scenario = generate_scenario(&replication_cfg)?;
    let proposed = run_proposed_policy_with(&scenario, ordering)
        .map_err(|source| SimError::Policy { index, source })?;
    let baseline =
        run_baseline_policy(&scenario).map_err(|source| SimError::Policy { index, source })?;
    Ok(ReplicationOutcome {
        index,
        proposed: compute_metrics(&proposed, &scenario)
            .map_err(|source| SimError::Metrics { index, source })?,
        baseline: compute_metrics(&baseline, &scenario)
            .map_err(|source| SimError::Metrics { index, source })?,
    })
}

/// Runs `n` seeded replications of both policies and aggregates them.
pub fn run_replications(cfg: &GeneratorConfig, n: usize) -> Result<ComparisonStats, SimError> {
    run_replications_with(cfg, n, AgencyOrdering::PoorestFirst)
}

/// As [`run_replications`], with an explicit agency ordering for the
/// welfare-guided policy.
pub fn run_replications_with(
    cfg: &GeneratorConfig,
    n: usize,
    ordering: AgencyOrdering,
) -> Result<ComparisonStats, SimError> {
    if n == 0 {
        return Err(SimError::NoReplications);
    }
    let outcomes: Vec<ReplicationOutcome> = (0..n)
        .map(|i| run_replication(cfg, i, ordering))
        .collect::<Result<_, _>>()?;
    aggregate_replications(&outcomes, cfg.seed)
}

/// Folds replication outcomes into summary statistics. Outcomes may arrive
/// in any order; they are sorted by index first, so the result is
/// independent of execution order. The indices must be exactly `0..n`.
pub fn aggregate_replications(
    outcomes: &[ReplicationOutcome],
    master_seed: u64,
) -> Result<ComparisonStats, SimError> {
    if outcomes.is_empty() {
        return Err(SimError::NoReplications);
    }
    let n = outcomes.len();
    let mut sorted: Vec<&ReplicationOutcome> = outcomes.iter().collect();
    sorted.sort_by_key(|o| o.index);
    if sorted.iter().enumerate().any(|(i, o)| o.index != i) {
        return Err(SimError::BadIndexSet { expected: n });
    }
    let stats = |pick: fn(&ReplicationOutcome) -> &RunMetrics| PolicyStats {
        overflow_lbs: summarize(&sorted.iter().map(|o| pick(o).overflow_lbs).collect::<Vec<_>>()),
        undistributed_lbs: summarize(
            &sorted.iter().map(|o| pick(o).undistributed_lbs).collect::<Vec<_>>(),
        ),
        people_served: summarize(
            &sorted.iter().map(|o| pick(o).people_served as f64).collect::<Vec<_>>(),
        ),
    };
    Ok(ComparisonStats {
        proposed: stats(|o| &o.proposed),
        baseline: stats(|o| &o.baseline),
        n_replications: n,
        seed: master_seed,
    })
}

/// Reruns the replication set once per aversion value. Every sweep entry
/// uses the same seed ladder, so scenarios differ only in epsilon and the
/// epsilon-blind baseline statistics are identical across entries.
pub fn epsilon_sweep(
    cfg: &GeneratorConfig,
    epsilons: &[f64],
    n: usize,
) -> Result<Vec<(f64, ComparisonStats)>, SimError> {
    epsilon_sweep_with(cfg, epsilons, n, AgencyOrdering::PoorestFirst)
}

/// As [`epsilon_sweep`], with an explicit agency ordering.
pub fn epsilon_sweep_with(
    cfg: &GeneratorConfig,
    epsilons: &[f64],
    n: usize,
    ordering: AgencyOrdering,
) -> Result<Vec<(f64, ComparisonStats)>, SimError> {
    if epsilons.is_empty() {
        return Err(SimError::EmptySweep);
    }
    for &e in epsilons {
        if e < 0.0 || !e.is_finite() {
            return Err(SimError::InvalidEpsilon(e));
        }
    }
    let mut rows = Vec::with_capacity(epsilons.len());
    for &e in epsilons {
        let mut sweep_cfg = cfg.clone();
        sweep_cfg.epsilon = EpsilonSpec::Uniform(e);
        rows.push((e, run_replications_with(&sweep_cfg, n, ordering)?));
    }
    Ok(rows)
}
