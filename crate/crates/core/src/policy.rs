//! Allocation policies: the welfare-guided donor-combination policy and a
//! distance-ordered, capacity-filling baseline.
//!
//! The welfare-guided policy visits agencies poorest-first. For each agency
//! it enumerates every donor subset whose remaining supply covers the
//! agency's (capacity-capped) demand in every food type, tentatively drains
//! each candidate in perishability order, scores the residual supplies left
//! across *all* donors with the per-type welfare measure, and commits the
//! subset with the highest blended welfare. The baseline ignores poverty and
//! equity: it fills agencies nearest-first up to storage capacity from the
//! pooled supply.

use crate::model::{
    validate_scenario, Agency, AgencyId, Donor, DonorId, Location, Scenario, Violation,
};
use crate::welfare::{
    atkinson_welfare, head_count_ratio, ResidualProfile, WelfareError, WelfareReport,
};
use std::collections::BTreeMap;

/// Pounds per food type held by each donor, keyed by donor id.
pub type SupplyMap = BTreeMap<DonorId, Vec<f64>>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolicyError {
    #[error("scenario failed validation: {}", summarize(.0))]
    InvalidScenario(Vec<Violation>),
    #[error(transparent)]
    Welfare(#[from] WelfareError),
}

fn summarize(violations: &[Violation]) -> String {
    violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// Which end of the poverty ranking the welfare-guided policy serves first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AgencyOrdering {
    #[default]
    PoorestFirst,
    LeastPoorFirst,
}

/// Committed shipments, what is left at each donor, and the agency visit
/// order that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct AllocationPlan {
    /// (agency, donor, food type) -> pounds shipped; zero entries are omitted.
    pub shipments: BTreeMap<(AgencyId, DonorId, usize), f64>,
    pub residual_supply: SupplyMap,
    pub visit_order: Vec<AgencyId>,
}

impl AllocationPlan {
    pub fn shipped(&self, agency: AgencyId, donor: DonorId, food_type: usize) -> f64 {
        self.shipments.get(&(agency, donor, food_type)).copied().unwrap_or(0.0)
    }

    /// Pounds delivered to one agency per food type, summed over donors in
    /// id order.
    pub fn delivered(&self, agency: AgencyId, n_food_types: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_food_types];
        let lo = (agency, DonorId(0), 0usize);
        let hi = (agency, DonorId(u32::MAX), usize::MAX);
        for ((_, _, x), lbs) in self.shipments.range(lo..=hi) {
            out[*x] += lbs;
        }
        out
    }

    /// Total pounds left unshipped across all donors.
    pub fn undistributed(&self) -> f64 {
        self.residual_supply.values().map(|v| v.iter().sum::<f64>()).sum()
    }
}

/// A committed or tentative plan plus the welfare score recorded at each
/// agency decision (empty for policies that do not score welfare).
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyRun {
    pub plan: AllocationPlan,
    pub welfare_trace: Vec<WelfareReport>,
}

/// Donor subsets able to cover a demand, or the all-donors fallback when
/// none can (`partial = true`).
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleCombinations {
    /// Sorted by subset size, then lexicographically by donor ids.
    pub subsets: Vec<Vec<DonorId>>,
    pub partial: bool,
}

/// One scored candidate: the subset, the residuals it would leave across all
/// donors, and the welfare of those residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationEvaluation {
    pub donor_subset: Vec<DonorId>,
    pub tentative_residuals: SupplyMap,
    pub welfare: WelfareReport,
}

/// What a tentative drain would ship from each donor and leave behind.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub shipped: SupplyMap,
    pub residuals: SupplyMap,
}

/// Donors most perishable first (rank ascending), ties by id ascending.
pub fn order_donors(donors: &[Donor]) -> Vec<DonorId> {
    let mut keyed: Vec<(u32, DonorId)> =
        donors.iter().map(|d| (d.perishability_rank, d.id)).collect();
    keyed.sort();
    keyed.into_iter().map(|(_, id)| id).collect()
}

/// Agencies by descending head-count poverty ratio, ties by id ascending.
pub fn order_agencies_by_poverty(agencies: &[Agency]) -> Result<Vec<AgencyId>, WelfareError> {
    poverty_order(agencies, AgencyOrdering::PoorestFirst)
}

fn poverty_order(
    agencies: &[Agency],
    ordering: AgencyOrdering,
) -> Result<Vec<AgencyId>, WelfareError> {
    let mut keyed = Vec::with_capacity(agencies.len());
    for a in agencies {
        keyed.push((head_count_ratio(a.poor_population, a.population)?, a.id));
    }
    keyed.sort_by(|(ra, ia), (rb, ib)| {
        let by_ratio = match ordering {
            AgencyOrdering::PoorestFirst => rb.total_cmp(ra),
            AgencyOrdering::LeastPoorFirst => ra.total_cmp(rb),
        };
        by_ratio.then(ia.cmp(ib))
    });
    Ok(keyed.into_iter().map(|(_, id)| id).collect())
}

/// Agencies by ascending straight-line distance from the food bank, ties by
/// id ascending.
pub fn order_agencies_by_distance(agencies: &[Agency], food_bank: Location) -> Vec<AgencyId> {
    let mut keyed: Vec<(f64, AgencyId)> =
        agencies.iter().map(|a| (a.location.distance(food_bank), a.id)).collect();
    keyed.sort_by(|(da, ia), (db, ib)| da.total_cmp(db).then(ia.cmp(ib)));
    keyed.into_iter().map(|(_, id)| id).collect()
}

/// Every donor subset whose available supply covers `demand` in every food
/// type. When no subset qualifies the single all-donors subset is returned
/// with `partial = true` so callers can still ship what exists.
pub fn enumerate_feasible_combinations(
    available: &SupplyMap,
    demand: &[f64],
) -> FeasibleCombinations {
    let ids: Vec<DonorId> = available.keys().copied().collect();
    let n = ids.len();
    assert!(n < 64, "donor subset enumeration supports at most 63 donors");
    let supplies: Vec<&Vec<f64>> = available.values().collect();
    let mut subsets = Vec::new();
    for mask in 1u64..(1u64 << n) {
        let covers = (0..demand.len()).all(|x| {
            let total: f64 =
                (0..n).filter(|i| mask & (1 << i) != 0).map(|i| supplies[i][x]).sum();
            total >= demand[x]
        });
        if covers {
            let subset: Vec<DonorId> =
                (0..n).filter(|i| mask & (1 << i) != 0).map(|i| ids[i]).collect();
            subsets.push(subset);
        }
    }
    if subsets.is_empty() {
        return FeasibleCombinations { subsets: vec![ids], partial: true };
    }
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    FeasibleCombinations { subsets, partial: false }
}

/// Drains donors of `subset` in `drain_order` until each food type reaches
/// `demand[x]` or the subset runs dry. Never ships more than the demand in
/// any type and never leaves a negative residual.
pub fn allocate_from_subset(
    subset: &[DonorId],
    available: &SupplyMap,
    demand: &[f64],
    drain_order: &[DonorId],
) -> Allocation {
    let p = demand.len();
    let mut take: SupplyMap = subset.iter().map(|&d| (d, vec![0.0; p])).collect();
    let drain: Vec<DonorId> =
        drain_order.iter().copied().filter(|d| take.contains_key(d)).collect();
    for x in 0..p {
        let mut remaining = demand[x];
        for d in &drain {
            if remaining <= 0.0 {
                break;
            }
            let amount = remaining.min(available[d][x]);
            if amount > 0.0 {
                take.get_mut(d).unwrap()[x] = amount;
                remaining -= amount;
            }
        }
        cap_type_total(&mut take, demand[x], x);
    }
    let mut residuals = available.clone();
    for (d, t) in &take {
        let r = residuals.get_mut(d).unwrap();
        for x in 0..p {
            r[x] -= t[x];
            debug_assert!(r[x] >= 0.0);
        }
    }
    Allocation { shipped: take, residuals }
}

/// A partial fill makes the takes sum mathematically equal to the target, so
/// the rounded f64 sum overshoots by an ulp about half the time. Downstream
/// overflow accounting must see exactly zero for demand-capped fills, so
/// shave the excess off the largest take (smallest donor id on ties) until
/// the id-ordered sum fits.
fn cap_type_total(take: &mut SupplyMap, target: f64, x: usize) {
    loop {
        let total: f64 = take.values().map(|v| v[x]).sum();
        if total - target <= 0.0 {
            return;
        }
        let excess = total - target;
        let mut largest: Option<DonorId> = None;
        let mut largest_take = f64::NEG_INFINITY;
        for (&d, v) in take.iter() {
            if v[x] > largest_take {
                largest = Some(d);
                largest_take = v[x];
            }
        }
        let Some(d) = largest else { return };
        let v = &mut take.get_mut(&d).unwrap()[x];
        let shaved = *v - excess;
        // force progress even when the subtraction rounds back to *v
        *v = if shaved < *v { shaved.max(0.0) } else { v.next_down().max(0.0) };
    }
}

/// Highest blended welfare wins; ties go to the smaller subset, then to the
/// lexicographically smaller donor ids. Returns `None` only for an empty
/// candidate list.
pub fn select_best_combination(
    evaluations: &[CombinationEvaluation],
) -> Option<&CombinationEvaluation> {
    evaluations.iter().reduce(|best, e| if beats(e, best) { e } else { best })
}

fn beats(challenger: &CombinationEvaluation, incumbent: &CombinationEvaluation) -> bool {
    match challenger.welfare.combined.total_cmp(&incumbent.welfare.combined) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => {
            (challenger.donor_subset.len(), &challenger.donor_subset)
                < (incumbent.donor_subset.len(), &incumbent.donor_subset)
        }
    }
}

/// Per-type pounds the policy targets for one agency: the stated demand,
/// scaled down proportionally when its total exceeds storage capacity.
pub fn effective_demand(agency: &Agency) -> Vec<f64> {
    let total: f64 = agency.demand.iter().sum();
    if total <= agency.storage_capacity || total == 0.0 {
        return agency.demand.clone();
    }
    let scale = agency.storage_capacity / total;
    agency.demand.iter().map(|d| d * scale).collect()
}

/// Welfare-guided allocation, poorest agencies first.
pub fn run_proposed_policy(s: &Scenario) -> Result<PolicyRun, PolicyError> {
    run_proposed_policy_with(s, AgencyOrdering::PoorestFirst)
}

/// Welfare-guided allocation with an explicit agency ordering.
pub fn run_proposed_policy_with(
    s: &Scenario,
    ordering: AgencyOrdering,
) -> Result<PolicyRun, PolicyError> {
    let violations = validate_scenario(s);
    if !violations.is_empty() {
        return Err(PolicyError::InvalidScenario(violations));
    }
    let p = s.n_food_types();
    let drain_order = order_donors(&s.donors);
    let visit_order = poverty_order(&s.agencies, ordering)?;
    let mut residual: SupplyMap =
        s.donors.iter().map(|d| (d.id, d.supply.clone())).collect();
    let mut shipments = BTreeMap::new();
    let mut welfare_trace = Vec::with_capacity(s.agencies.len());

    for &aid in &visit_order {
        let agency = s.agency(aid).expect("visit order references scenario agencies");
        let target = effective_demand(agency);
        let combos = enumerate_feasible_combinations(&residual, &target);
        let mut evaluations = Vec::with_capacity(combos.subsets.len());
        for subset in combos.subsets {
            let alloc = allocate_from_subset(&subset, &residual, &target, &drain_order);
            let welfare =
                profile_welfare(&alloc.residuals, p, &s.params.epsilon, &s.params.weights)?;
            evaluations.push(CombinationEvaluation {
                donor_subset: subset,
                tentative_residuals: alloc.residuals,
                welfare,
            });
        }
        let best =
            select_best_combination(&evaluations).expect("at least one candidate combination");
        // Re-run the drain for the winner: committed shipments must be the
        // exact takes, not a residual difference, or the overshoot guard in
        // cap_type_total is lost.
        let alloc = allocate_from_subset(&best.donor_subset, &residual, &target, &drain_order);
        for (d, by_type) in &alloc.shipped {
            for (x, &lbs) in by_type.iter().enumerate() {
                if lbs > 0.0 {
                    shipments.insert((aid, *d, x), lbs);
                }
            }
        }
        welfare_trace.push(best.welfare.clone());
        residual = alloc.residuals;
    }

    Ok(PolicyRun {
        plan: AllocationPlan { shipments, residual_supply: residual, visit_order },
        welfare_trace,
    })
}

/// Per-type welfare of the residuals across all donors (donor id order),
/// blended with the plate-share weights.
fn profile_welfare(
    residuals: &SupplyMap,
    p: usize,
    epsilon: &[f64],
    weights: &[f64],
) -> Result<WelfareReport, WelfareError> {
    let mut per_type = Vec::with_capacity(p);
    for x in 0..p {
        let column: Vec<f64> = residuals.values().map(|v| v[x]).collect();
        per_type.push(atkinson_welfare(&ResidualProfile::new(column)?, epsilon[x])?);
    }
    WelfareReport::new(per_type, weights)
}

/// Poverty-blind baseline: agencies nearest the food bank first, each filled
/// up to storage capacity from the pooled supply, donors drained in
/// perishability order, food types drawn proportionally to their share of
/// the remaining pool.
pub fn run_baseline_policy(s: &Scenario) -> Result<PolicyRun, PolicyError> {
    let violations = validate_scenario(s);
    if !violations.is_empty() {
        return Err(PolicyError::InvalidScenario(violations));
    }
    let p = s.n_food_types();
    let drain_order = order_donors(&s.donors);
    let visit_order = order_agencies_by_distance(&s.agencies, s.food_bank_location);
    let mut residual: SupplyMap =
        s.donors.iter().map(|d| (d.id, d.supply.clone())).collect();
    let mut shipments = BTreeMap::new();

    for &aid in &visit_order {
        let agency = s.agency(aid).expect("visit order references scenario agencies");
        let pool: Vec<f64> =
            (0..p).map(|x| residual.values().map(|v| v[x]).sum()).collect();
        let pool_total: f64 = pool.iter().sum();
        if pool_total <= 0.0 {
            continue;
        }
        let grab_total = agency.storage_capacity.min(pool_total);
        for x in 0..p {
            let mut want = grab_total * pool[x] / pool_total;
            for d in &drain_order {
                if want <= 0.0 {
                    break;
                }
                let r = residual.get_mut(d).unwrap();
                let amount = want.min(r[x]);
                if amount > 0.0 {
                    r[x] -= amount;
                    shipments.insert((aid, *d, x), amount);
                    want -= amount;
                }
            }
        }
    }

    Ok(PolicyRun {
        plan: AllocationPlan { shipments, residual_supply: residual, visit_order },
        welfare_trace: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FoodType, PolicyParams};

    fn donor(id: u32, rank: u32, supply: Vec<f64>) -> Donor {
        Donor {
            id: DonorId(id),
            name: format!("d{id}"),
            location: Location { x: 0.0, y: 0.0 },
            supply,
            perishability_rank: rank,
        }
    }

    fn agency(id: u32, poor: u64, population: u64, demand: Vec<f64>, capacity: f64) -> Agency {
        Agency {
            id: AgencyId(id),
            name: format!("a{id}"),
            location: Location { x: 0.0, y: 0.0 },
            demand,
            storage_capacity: capacity,
            population,
            poor_population: poor,
        }
    }

    fn supply_map(entries: &[(u32, Vec<f64>)]) -> SupplyMap {
        entries.iter().map(|(id, v)| (DonorId(*id), v.clone())).collect()
    }

    fn scenario(donors: Vec<Donor>, agencies: Vec<Agency>, p: usize, epsilon: f64) -> Scenario {
        let weights = vec![1.0 / p as f64; p];
        Scenario {
            region_size_km: 50.0,
            food_bank_location: Location { x: 25.0, y: 25.0 },
            food_types: (0..p)
                .map(|x| FoodType {
                    id: x,
                    name: format!("food_type_{x}"),
                    weight: weights[x],
                    perishability_rank: x as u32,
                })
                .collect(),
            donors,
            agencies,
            params: PolicyParams { epsilon: vec![epsilon; p], weights, pounds_per_person: 4.0 },
        }
    }

    #[test]
    fn donors_order_most_perishable_first_then_id() {
        let donors = vec![
            donor(0, 5, vec![1.0]),
            donor(1, 2, vec![1.0]),
            donor(2, 2, vec![1.0]),
            donor(3, 9, vec![1.0]),
        ];
        assert_eq!(order_donors(&donors), vec![DonorId(1), DonorId(2), DonorId(0), DonorId(3)]);
    }

    #[test]
    fn poverty_order_descends_with_id_ties() {
        let agencies = vec![
            agency(0, 100, 1000, vec![1.0], 10.0), // 0.10
            agency(1, 500, 1000, vec![1.0], 10.0), // 0.50
            agency(2, 250, 1000, vec![1.0], 10.0), // 0.25
            agency(3, 50, 200, vec![1.0], 10.0),   // 0.25, tie with 2
        ];
        assert_eq!(
            order_agencies_by_poverty(&agencies).unwrap(),
            vec![AgencyId(1), AgencyId(2), AgencyId(3), AgencyId(0)]
        );
    }

    #[test]
    fn poverty_order_fails_on_zero_population() {
        let agencies = vec![agency(0, 0, 0, vec![1.0], 10.0)];
        assert!(order_agencies_by_poverty(&agencies).is_err());
    }

    #[test]
    fn distance_order_ascends_with_id_ties() {
        let bank = Location { x: 0.0, y: 0.0 };
        let mut agencies = vec![
            agency(0, 1, 10, vec![1.0], 10.0),
            agency(1, 1, 10, vec![1.0], 10.0),
            agency(2, 1, 10, vec![1.0], 10.0),
        ];
        agencies[0].location = Location { x: 3.0, y: 4.0 }; // 5
        agencies[1].location = Location { x: 1.0, y: 0.0 }; // 1
        agencies[2].location = Location { x: 0.0, y: 1.0 }; // 1, tie with 1
        assert_eq!(
            order_agencies_by_distance(&agencies, bank),
            vec![AgencyId(1), AgencyId(2), AgencyId(0)]
        );
    }

    #[test]
    fn only_the_pair_covers_a_large_demand() {
        let available = supply_map(&[(1, vec![800.0; 3]), (2, vec![800.0; 3])]);
        let combos = enumerate_feasible_combinations(&available, &[1000.0, 1000.0, 1000.0]);
        assert!(!combos.partial);
        assert_eq!(combos.subsets, vec![vec![DonorId(1), DonorId(2)]]);
    }

    #[test]
    fn zero_demand_makes_every_subset_feasible() {
        let available = supply_map(&[(1, vec![5.0]), (2, vec![5.0])]);
        let combos = enumerate_feasible_combinations(&available, &[0.0]);
        assert!(!combos.partial);
        assert_eq!(combos.subsets.len(), 3); // 2^2 - 1
    }

    #[test]
    fn pairs_and_triple_cover_when_singles_cannot() {
        let available =
            supply_map(&[(1, vec![700.0]), (2, vec![500.0]), (3, vec![900.0])]);
        let combos = enumerate_feasible_combinations(&available, &[1100.0]);
        assert!(!combos.partial);
        let expected: Vec<Vec<DonorId>> = vec![
            vec![DonorId(1), DonorId(2)],
            vec![DonorId(1), DonorId(3)],
            vec![DonorId(2), DonorId(3)],
            vec![DonorId(1), DonorId(2), DonorId(3)],
        ];
        assert_eq!(combos.subsets, expected);
    }

    #[test]
    fn insufficient_supply_falls_back_to_all_donors() {
        let available = supply_map(&[(1, vec![100.0]), (2, vec![50.0])]);
        let combos = enumerate_feasible_combinations(&available, &[1000.0]);
        assert!(combos.partial);
        assert_eq!(combos.subsets, vec![vec![DonorId(1), DonorId(2)]]);
    }

    #[test]
    fn drain_follows_perishability_order() {
        // donor 7 is more perishable (rank 0) than donor 3 (rank 1)
        let available = supply_map(&[(3, vec![400.0]), (7, vec![300.0])]);
        let drain = vec![DonorId(7), DonorId(3)];
        let subset = vec![DonorId(3), DonorId(7)];
        let alloc = allocate_from_subset(&subset, &available, &[500.0], &drain);
        assert_eq!(alloc.shipped[&DonorId(7)], vec![300.0]);
        assert_eq!(alloc.shipped[&DonorId(3)], vec![200.0]);
        assert_eq!(alloc.residuals[&DonorId(7)], vec![0.0]);
        assert_eq!(alloc.residuals[&DonorId(3)], vec![200.0]);
    }

    #[test]
    fn drain_stops_at_demand_and_subset_capacity() {
        let available = supply_map(&[(0, vec![100.0, 10.0]), (1, vec![100.0, 10.0])]);
        let drain = vec![DonorId(0), DonorId(1)];
        let alloc = allocate_from_subset(&[DonorId(0)], &available, &[40.0, 50.0], &drain);
        // type 0 capped by demand, type 1 by what the subset holds
        assert_eq!(alloc.shipped[&DonorId(0)], vec![40.0, 10.0]);
        assert!(!alloc.shipped.contains_key(&DonorId(1)));
        assert_eq!(alloc.residuals[&DonorId(1)], vec![100.0, 10.0]);
    }

    #[test]
    fn shipped_sum_never_exceeds_demand_in_f64() {
        // a partial fill whose takes sum to the demand exactly in exact
        // arithmetic; the rounded sum must still not exceed it
        let available = supply_map(&[(0, vec![600.1]), (1, vec![499.9]), (2, vec![800.3])]);
        let drain = vec![DonorId(0), DonorId(1), DonorId(2)];
        for demand in [1000.0, 1000.3, 700.7, 1100.05] {
            let subset = vec![DonorId(0), DonorId(1), DonorId(2)];
            let alloc = allocate_from_subset(&subset, &available, &[demand], &drain);
            let total: f64 = alloc.shipped.values().map(|v| v[0]).sum();
            assert!(total <= demand, "shipped {total} > demand {demand}");
        }
    }

    #[test]
    fn best_combination_prefers_welfare_then_size_then_ids() {
        let eval = |ids: &[u32], combined: f64| CombinationEvaluation {
            donor_subset: ids.iter().map(|&i| DonorId(i)).collect(),
            tentative_residuals: SupplyMap::new(),
            welfare: WelfareReport { per_type: vec![combined], combined },
        };
        let evals =
            vec![eval(&[1, 2], 5.0), eval(&[3], 7.0), eval(&[1], 7.0), eval(&[0, 1], 7.0)];
        let best = select_best_combination(&evals).unwrap();
        assert_eq!(best.donor_subset, vec![DonorId(1)]);

        let evals = vec![eval(&[2], 4.0), eval(&[1], 4.0)];
        assert_eq!(select_best_combination(&evals).unwrap().donor_subset, vec![DonorId(1)]);
        assert!(select_best_combination(&[]).is_none());
    }

    #[test]
    fn effective_demand_scales_to_capacity() {
        let a = agency(0, 1, 10, vec![600.0, 600.0], 900.0);
        let eff = effective_demand(&a);
        assert!((eff[0] - 450.0).abs() < 1e-12);
        assert!((eff[1] - 450.0).abs() < 1e-12);
        let roomy = agency(0, 1, 10, vec![600.0, 600.0], 2000.0);
        assert_eq!(effective_demand(&roomy), vec![600.0, 600.0]);
    }

    #[test]
    fn single_donor_single_agency_ships_the_demand() {
        let s = scenario(
            vec![donor(0, 0, vec![300.0, 300.0])],
            vec![agency(0, 10, 100, vec![120.0, 80.0], 1000.0)],
            2,
            1.5,
        );
        let run = run_proposed_policy(&s).unwrap();
        assert_eq!(run.plan.delivered(AgencyId(0), 2), vec![120.0, 80.0]);
        assert_eq!(run.plan.residual_supply[&DonorId(0)], vec![180.0, 220.0]);
        assert_eq!(run.welfare_trace.len(), 1);
    }

    #[test]
    fn zero_supply_yields_empty_plan() {
        let s = scenario(
            vec![donor(0, 0, vec![0.0, 0.0])],
            vec![agency(0, 10, 100, vec![120.0, 80.0], 1000.0)],
            2,
            1.5,
        );
        let run = run_proposed_policy(&s).unwrap();
        assert!(run.plan.shipments.is_empty());
        assert_eq!(run.plan.undistributed(), 0.0);
    }

    #[test]
    fn proposed_policy_prefers_the_equalizing_donor() {
        // two donors, one agency; draining the rich donor leaves residuals
        // far more even than draining the poor one
        let s = scenario(
            vec![donor(0, 0, vec![100.0]), donor(1, 1, vec![500.0])],
            vec![agency(0, 10, 100, vec![90.0], 1000.0)],
            1,
            1.5,
        );
        let run = run_proposed_policy(&s).unwrap();
        // subsets {0}, {1}, {0,1} are all feasible; welfare is maximized by
        // taking everything from the rich donor 1
        assert_eq!(run.plan.shipped(AgencyId(0), DonorId(1), 0), 90.0);
        assert_eq!(run.plan.shipped(AgencyId(0), DonorId(0), 0), 0.0);
    }

    #[test]
    fn proposed_policy_visits_poorest_first_and_respects_capacity() {
        let s = scenario(
            vec![donor(0, 0, vec![500.0, 500.0]), donor(1, 1, vec![500.0, 500.0])],
            vec![
                agency(0, 10, 1000, vec![200.0, 200.0], 150.0), // capacity-bound
                agency(1, 900, 1000, vec![300.0, 300.0], 1000.0), // poorest
            ],
            2,
            1.5,
        );
        let run = run_proposed_policy(&s).unwrap();
        assert_eq!(run.plan.visit_order, vec![AgencyId(1), AgencyId(0)]);
        let delivered = run.plan.delivered(AgencyId(0), 2);
        assert!((delivered.iter().sum::<f64>() - 150.0).abs() < 1e-9);
        // per-type target is scaled evenly
        assert!((delivered[0] - 75.0).abs() < 1e-9);
        let poorest = run.plan.delivered(AgencyId(1), 2);
        assert_eq!(poorest, vec![300.0, 300.0]);
    }

    #[test]
    fn agency_ordering_override_reverses_visits() {
        let s = scenario(
            vec![donor(0, 0, vec![500.0])],
            vec![
                agency(0, 100, 1000, vec![100.0], 500.0),
                agency(1, 900, 1000, vec![100.0], 500.0),
            ],
            1,
            1.5,
        );
        let run = run_proposed_policy_with(&s, AgencyOrdering::LeastPoorFirst).unwrap();
        assert_eq!(run.plan.visit_order, vec![AgencyId(0), AgencyId(1)]);
    }

    #[test]
    fn invalid_scenario_is_rejected_with_violations() {
        let mut s = scenario(
            vec![donor(0, 0, vec![500.0])],
            vec![agency(0, 100, 1000, vec![100.0], 500.0)],
            1,
            1.5,
        );
        s.params.epsilon = vec![-1.0];
        match run_proposed_policy(&s) {
            Err(PolicyError::InvalidScenario(v)) => assert!(!v.is_empty()),
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn baseline_fills_to_capacity_nearest_first() {
        let mut s = scenario(
            vec![donor(0, 0, vec![1000.0, 1000.0]), donor(1, 1, vec![1000.0, 1000.0])],
            vec![
                agency(0, 10, 100, vec![600.0, 600.0], 1500.0),
                agency(1, 90, 100, vec![600.0, 600.0], 1500.0),
            ],
            2,
            1.5,
        );
        s.agencies[0].location = Location { x: 30.0, y: 25.0 }; // 5 km out
        s.agencies[1].location = Location { x: 26.0, y: 25.0 }; // 1 km out
        let run = run_baseline_policy(&s).unwrap();
        assert_eq!(run.plan.visit_order, vec![AgencyId(1), AgencyId(0)]);
        assert!(run.welfare_trace.is_empty());
        // nearest agency takes 1500 of the 4000 pool, evenly split by share
        let first = run.plan.delivered(AgencyId(1), 2);
        assert!((first.iter().sum::<f64>() - 1500.0).abs() < 1e-9);
        assert!((first[0] - 750.0).abs() < 1e-9);
        // most perishable donor 0 is emptied first
        assert_eq!(run.plan.shipped(AgencyId(1), DonorId(0), 0), 750.0);
        let second = run.plan.delivered(AgencyId(0), 2);
        assert!((second.iter().sum::<f64>() - 1500.0).abs() < 1e-9);
    }

    #[test]
    fn baseline_stops_when_the_pool_runs_dry() {
        let s = scenario(
            vec![donor(0, 0, vec![700.0])],
            vec![
                agency(0, 10, 100, vec![600.0], 500.0),
                agency(1, 90, 100, vec![600.0], 500.0),
            ],
            1,
            1.5,
        );
        let run = run_baseline_policy(&s).unwrap();
        let a0 = run.plan.delivered(AgencyId(0), 1);
        let a1 = run.plan.delivered(AgencyId(1), 1);
        assert!((a0[0] + a1[0] - 700.0).abs() < 1e-9);
        assert_eq!(a0[0], 500.0);
        assert!((a1[0] - 200.0).abs() < 1e-9);
    }

    #[test]
    fn policies_are_deterministic() {
        let s = scenario(
            vec![
                donor(0, 2, vec![300.0, 200.0]),
                donor(1, 0, vec![250.0, 350.0]),
                donor(2, 1, vec![400.0, 100.0]),
            ],
            vec![
                agency(0, 350, 1000, vec![200.0, 150.0], 400.0),
                agency(1, 100, 800, vec![180.0, 220.0], 350.0),
            ],
            2,
            1.5,
        );
        assert_eq!(run_proposed_policy(&s).unwrap(), run_proposed_policy(&s).unwrap());
        assert_eq!(run_baseline_policy(&s).unwrap(), run_baseline_policy(&s).unwrap());
    }
}
