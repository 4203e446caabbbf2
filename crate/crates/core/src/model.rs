//! Scenario data model: food types, donors, agencies, policy parameters,
//! plus validation and the JSON file schema.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Identifier of a food donor. Ids must be unique within a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DonorId(pub u32);

/// Identifier of a receiving agency. Ids must be unique within a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgencyId(pub u32);

impl fmt::Display for DonorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for AgencyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Planar position in km within the service region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub x: f64,
    pub y: f64,
}

impl Location {
    pub fn distance(&self, other: Location) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A distributed food category (e.g. grains, vegetables).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoodType {
    /// Small index; food type ids must be exactly 0..p-1 in list order so
    /// they double as vector indices.
    pub id: usize,
    pub name: String,
    /// Share of a balanced plate this type contributes; shares sum to 1.
    pub weight: f64,
    /// Lower rank spoils sooner.
    pub perishability_rank: u32,
}

/// A supplier holding pounds of each food type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Donor {
    pub id: DonorId,
    pub name: String,
    pub location: Location,
    /// Pounds on hand per food type, indexed by food type id.
    pub supply: Vec<f64>,
    /// Lower rank spoils sooner; drives the drain order during allocation.
    pub perishability_rank: u32,
}

/// A receiving agency serving a local population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agency {
    pub id: AgencyId,
    pub name: String,
    pub location: Location,
    /// Pounds requested per food type, indexed by food type id.
    pub demand: Vec<f64>,
    /// Most pounds the agency can physically hold in one round.
    pub storage_capacity: f64,
    pub population: u64,
    pub poor_population: u64,
}

/// Knobs of the welfare-guided policy.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyParams {
    /// Inequality aversion per food type; 0 = mean, larger = more averse.
    pub epsilon: Vec<f64>,
    /// Plate share per food type; authoritative copy of `FoodType::weight`.
    pub weights: Vec<f64>,
    /// Pounds that feed one person for one period.
    pub pounds_per_person: f64,
}

/// A complete distribution problem: one food bank, donors, agencies, and the
/// policy parameters. Serializes to a self-contained JSON document; the file
/// schema stores weights only on `food_types`, and `params.weights` is
/// rebuilt from them on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "ScenarioFile", into = "ScenarioFile")]
pub struct Scenario {
    pub region_size_km: f64,
    pub food_bank_location: Location,
    pub food_types: Vec<FoodType>,
    pub donors: Vec<Donor>,
    pub agencies: Vec<Agency>,
    pub params: PolicyParams,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScenarioFile {
    region_size_km: f64,
    food_bank_location: Location,
    food_types: Vec<FoodType>,
    donors: Vec<Donor>,
    agencies: Vec<Agency>,
    params: ParamsFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ParamsFile {
    epsilon: Vec<f64>,
    pounds_per_person: f64,
}

impl From<ScenarioFile> for Scenario {
    fn from(file: ScenarioFile) -> Self {
        let weights = file.food_types.iter().map(|ft| ft.weight).collect();
        Scenario {
            region_size_km: file.region_size_km,
            food_bank_location: file.food_bank_location,
            food_types: file.food_types,
            donors: file.donors,
            agencies: file.agencies,
            params: PolicyParams {
                epsilon: file.params.epsilon,
                weights,
                pounds_per_person: file.params.pounds_per_person,
            },
        }
    }
}

impl From<Scenario> for ScenarioFile {
    fn from(s: Scenario) -> Self {
        ScenarioFile {
            region_size_km: s.region_size_km,
            food_bank_location: s.food_bank_location,
            food_types: s.food_types,
            donors: s.donors,
            agencies: s.agencies,
            params: ParamsFile {
                epsilon: s.params.epsilon,
                pounds_per_person: s.params.pounds_per_person,
            },
        }
    }
}

impl Scenario {
    pub fn n_food_types(&self) -> usize {
        self.food_types.len()
    }

    pub fn donor(&self, id: DonorId) -> Option<&Donor> {
        self.donors.iter().find(|d| d.id == id)
    }

    pub fn agency(&self, id: AgencyId) -> Option<&Agency> {
        self.agencies.iter().find(|a| a.id == id)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

/// Unknown weight-preset name.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown weight preset {0:?}; valid presets: myplate4, uniform3")]
pub struct PresetError(pub String);

/// Named plate-share presets.
///
/// `myplate4` covers grains, vegetables, fruits, protein at 0.30 / 0.40 /
/// 0.10 / 0.20 (dairy excluded: it is tracked as a beverage, not warehouse
/// poundage). `uniform3` splits evenly across three types.
pub fn myplate_weights(scheme: &str) -> Result<Vec<f64>, PresetError> {
    match scheme {
        "myplate4" => Ok(vec![0.30, 0.40, 0.10, 0.20]),
        "uniform3" => Ok(vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]),
        other => Err(PresetError(other.to_string())),
    }
}

/// One failed scenario invariant: which field, and the rule it broke.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub rule: String,
}

impl Violation {
    fn new(path: impl Into<String>, rule: impl Into<String>) -> Self {
        Violation { path: path.into(), rule: rule.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.rule)
    }
}

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Checks every scenario invariant and returns all violations found; an
/// empty list means the scenario is well-formed.
pub fn validate_scenario(s: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();
    let p = s.food_types.len();

    if s.region_size_km <= 0.0 || !s.region_size_km.is_finite() {
        out.push(Violation::new(
            "region_size_km",
            format!("must be a positive number, got {}", s.region_size_km),
        ));
    }
    if s.food_types.is_empty() {
        out.push(Violation::new("food_types", "at least one food type is required"));
    }
    if s.donors.is_empty() {
        out.push(Violation::new("donors", "at least one donor is required"));
    }
    if s.agencies.is_empty() {
        out.push(Violation::new("agencies", "at least one agency is required"));
    }

    let mut weight_sum = 0.0;
    for (i, ft) in s.food_types.iter().enumerate() {
        if ft.id != i {
            out.push(Violation::new(
                format!("food_types[{i}].id"),
                format!("ids must be 0..{p} in list order, got {}", ft.id),
            ));
        }
        if !(0.0..=1.0).contains(&ft.weight) {
            out.push(Violation::new(
                format!("food_types[{i}].weight"),
                format!("must lie in [0, 1], got {}", ft.weight),
            ));
        }
        weight_sum += ft.weight;
    }
    if p > 0 && (weight_sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        out.push(Violation::new(
            "food_types",
            format!("weights must sum to 1 within 1e-9, got {weight_sum}"),
        ));
    }

    let mut seen_donors = std::collections::BTreeSet::new();
    for (i, d) in s.donors.iter().enumerate() {
        if !seen_donors.insert(d.id) {
            out.push(Violation::new(
                format!("donors[{i}].id"),
                format!("duplicate donor id {}", d.id),
            ));
        }
        if d.supply.len() != p {
            out.push(Violation::new(
                format!("donors[{i}].supply"),
                format!("length {} != food type count {p}", d.supply.len()),
            ));
        }
        for (x, &lbs) in d.supply.iter().enumerate() {
            if lbs < 0.0 || !lbs.is_finite() {
                out.push(Violation::new(
                    format!("donors[{i}].supply[{x}]"),
                    format!("must be >= 0, got {lbs}"),
                ));
            }
        }
        let inside = d.location.x >= 0.0
            && d.location.x <= s.region_size_km
            && d.location.y >= 0.0
            && d.location.y <= s.region_size_km;
        if !inside {
            out.push(Violation::new(
                format!("donors[{i}].location"),
                format!(
                    "({}, {}) lies outside the {} km square region",
                    d.location.x, d.location.y, s.region_size_km
                ),
            ));
        }
    }

    let mut seen_agencies = std::collections::BTreeSet::new();
    for (i, a) in s.agencies.iter().enumerate() {
        if !seen_agencies.insert(a.id) {
            out.push(Violation::new(
                format!("agencies[{i}].id"),
                format!("duplicate agency id {}", a.id),
            ));
        }
        if a.demand.len() != p {
            out.push(Violation::new(
                format!("agencies[{i}].demand"),
                format!("length {} != food type count {p}", a.demand.len()),
            ));
        }
        for (x, &lbs) in a.demand.iter().enumerate() {
            if lbs < 0.0 || !lbs.is_finite() {
                out.push(Violation::new(
                    format!("agencies[{i}].demand[{x}]"),
                    format!("must be >= 0, got {lbs}"),
                ));
            }
        }
        if a.storage_capacity < 0.0 || !a.storage_capacity.is_finite() {
            out.push(Violation::new(
                format!("agencies[{i}].storage_capacity"),
                format!("must be >= 0, got {}", a.storage_capacity),
            ));
        }
        if a.poor_population > a.population {
            out.push(Violation::new(
                format!("agencies[{i}].poor_population"),
                format!("{} exceeds population {}", a.poor_population, a.population),
            ));
        }
    }

    if s.params.epsilon.len() != p {
        out.push(Violation::new(
            "params.epsilon",
            format!("length {} != food type count {p}", s.params.epsilon.len()),
        ));
    }
    for (x, &e) in s.params.epsilon.iter().enumerate() {
        if e < 0.0 || !e.is_finite() {
            out.push(Violation::new(
                format!("params.epsilon[{x}]"),
                format!("must be >= 0, got {e}"),
            ));
        }
    }
    if s.params.weights.len() != p {
        out.push(Violation::new(
            "params.weights",
            format!("length {} != food type count {p}", s.params.weights.len()),
        ));
    } else if p > 0 {
        let sum: f64 = s.params.weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            out.push(Violation::new(
                "params.weights",
                format!("weights must sum to 1 within 1e-9, got {sum}"),
            ));
        }
    }
    if s.params.pounds_per_person <= 0.0 || !s.params.pounds_per_person.is_finite() {
        out.push(Violation::new(
            "params.pounds_per_person",
            format!("must be > 0, got {}", s.params.pounds_per_person),
        ));
    }

    out
}
