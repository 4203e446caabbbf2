//! Outcome accounting for allocation plans: wasted pounds and people served.
//!
//! Overflow is poundage delivered beyond what an agency asked for; it rots
//! in storage and feeds no one, so the people-served conversion only counts
//! pounds consumed against demand. A person is served only when fed in the
//! plate proportion across every food type.

use crate::model::{AgencyId, Scenario};
use crate::policy::{AllocationPlan, PolicyRun};
use crate::welfare::WelfareReport;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("plan references unknown {kind} id {id}")]
    UnknownId { kind: &'static str, id: u32 },
    #[error("plan names food type {food_type} but the scenario has {count} food types")]
    UnknownFoodType { food_type: usize, count: usize },
    #[error("{kind} {id} carries {got} food types, expected {expected}")]
    DimensionMismatch { kind: &'static str, id: u32, got: usize, expected: usize },
    #[error(
        "food type {food_type} has zero plate weight but nonzero demand; \
         the people-served conversion is undefined"
    )]
    ZeroWeightDemand { food_type: usize },
}

/// How delivered pounds convert into people served.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ServedRule {
    /// Count a person only when fed in plate proportion: the binding food
    /// type determines the count. Pounds beyond demand feed no one.
    #[default]
    NutritionMin,
    /// Raw poundage over pounds-per-person, mix-blind. Sensitivity knob
    /// only.
    PoundsOnly,
}

/// Per-agency slice of a run's outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgencyMetrics {
    pub agency: AgencyId,
    /// Pounds received per food type.
    pub delivered: Vec<f64>,
    pub overflow_lbs: f64,
    pub people_served: u64,
}

/// Everything measured about one policy run on one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub overflow_lbs: f64,
    pub undistributed_lbs: f64,
    pub people_served: u64,
    /// One entry per agency, ordered by agency id.
    pub per_agency: Vec<AgencyMetrics>,
    /// One entry per agency decision in visit order; empty for policies
    /// that do not score welfare.
    pub welfare_trace: Vec<WelfareReport>,
}

fn check_plan(plan: &AllocationPlan, s: &Scenario) -> Result<(), MetricsError> {
    let p = s.n_food_types();
    for (a, d, x) in plan.shipments.keys() {
        if s.agency(*a).is_none() {
            return Err(MetricsError::UnknownId { kind: "agency", id: a.0 });
        }
        if s.donor(*d).is_none() {
            return Err(MetricsError::UnknownId { kind: "donor", id: d.0 });
        }
        if *x >= p {
            return Err(MetricsError::UnknownFoodType { food_type: *x, count: p });
        }
    }
    for (d, residual) in &plan.residual_supply {
        if s.donor(*d).is_none() {
            return Err(MetricsError::UnknownId { kind: "donor", id: d.0 });
        }
        if residual.len() != p {
            return Err(MetricsError::DimensionMismatch {
                kind: "donor",
                id: d.0,
                got: residual.len(),
                expected: p,
            });
        }
    }
    for a in &s.agencies {
        if a.demand.len() != p {
            return Err(MetricsError::DimensionMismatch {
                kind: "agency",
                id: a.id.0,
                got: a.demand.len(),
                expected: p,
            });
        }
    }
    Ok(())
}

/// Pounds wasted by a plan: `(overflow, undistributed)`. Overflow is the
/// headline waste, pounds delivered beyond demand summed over agencies and
/// food types; undistributed is what never left the donors.
pub fn compute_overflow(plan: &AllocationPlan, s: &Scenario) -> Result<(f64, f64), MetricsError> {
    check_plan(plan, s)?;
    let p = s.n_food_types();
    let mut overflow = 0.0;
    for a in &s.agencies {
        let delivered = plan.delivered(a.id, p);
        for (got, want) in delivered.iter().zip(&a.demand) {
            overflow += (got - want).max(0.0);
        }
    }
    Ok((overflow, plan.undistributed()))
}

/// People served under the plate-proportion rule, capped per agency at its
/// population.
pub fn compute_people_served(plan: &AllocationPlan, s: &Scenario) -> Result<u64, MetricsError> {
    compute_people_served_with(plan, s, ServedRule::NutritionMin)
}

/// People served under an explicit conversion rule.
pub fn compute_people_served_with(
    plan: &AllocationPlan,
    s: &Scenario,
    rule: ServedRule,
) -> Result<u64, MetricsError> {
    check_plan(plan, s)?;
    check_weights(s, rule)?;
    let p = s.n_food_types();
    let mut total = 0u64;
    for a in &s.agencies {
        let delivered = plan.delivered(a.id, p);
        total += agency_people(&delivered, a.demand.as_slice(), a.population, s, rule);
    }
    Ok(total)
}

fn check_weights(s: &Scenario, rule: ServedRule) -> Result<(), MetricsError> {
    if rule != ServedRule::NutritionMin {
        return Ok(());
    }
    for (x, &w) in s.params.weights.iter().enumerate() {
        if w == 0.0 && s.agencies.iter().any(|a| a.demand.get(x).copied().unwrap_or(0.0) > 0.0) {
            return Err(MetricsError::ZeroWeightDemand { food_type: x });
        }
    }
    Ok(())
}

fn agency_people(
    delivered: &[f64],
    demand: &[f64],
    population: u64,
    s: &Scenario,
    rule: ServedRule,
) -> u64 {
    let ppp = s.params.pounds_per_person;
    let people = match rule {
        ServedRule::NutritionMin => {
            let mut served = f64::INFINITY;
            for (x, &w) in s.params.weights.iter().enumerate() {
                if w == 0.0 {
                    continue; // zero-weight types need zero pounds per plate
                }
                let consumed = delivered[x].min(demand[x]);
                served = served.min(consumed / (w * ppp));
            }
            if served.is_finite() { served.floor() } else { 0.0 }
        }
        ServedRule::PoundsOnly => (delivered.iter().sum::<f64>() / ppp).floor(),
    };
    (people as u64).min(population)
}

/// Assembles the full outcome report for one policy run.
pub fn compute_metrics(run: &PolicyRun, s: &Scenario) -> Result<RunMetrics, MetricsError> {
    let plan = &run.plan;
    let (overflow_lbs, undistributed_lbs) = compute_overflow(plan, s)?;
    check_weights(s, ServedRule::NutritionMin)?;
    let p = s.n_food_types();
    let mut ids: Vec<AgencyId> = s.agencies.iter().map(|a| a.id).collect();
    ids.sort();
    let mut per_agency = Vec::with_capacity(ids.len());
    let mut people_served = 0u64;
    for id in ids {
        let a = s.agency(id).expect("id taken from scenario");
        let delivered = plan.delivered(id, p);
        let overflow: f64 =
            (0..p).map(|x| (delivered[x] - a.demand[x]).max(0.0)).sum();
        let people =
            agency_people(&delivered, &a.demand, a.population, s, ServedRule::NutritionMin);
        people_served += people;
        per_agency.push(AgencyMetrics {
            agency: id,
            delivered,
            overflow_lbs: overflow,
            people_served: people,
        });
    }
    Ok(RunMetrics {
        overflow_lbs,
        undistributed_lbs,
        people_served,
        per_agency,
        welfare_trace: run.welfare_trace.clone(),
    })
}
