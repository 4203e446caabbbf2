//! Invariants that must hold for every scenario the generator can produce,
//! checked over randomized configurations.

use ladle_core::{
    compute_metrics, compute_overflow, generate_scenario, run_baseline_policy,
    run_proposed_policy, validate_scenario, AllocationPlan, EpsilonSpec, GeneratorConfig,
    Scenario,
};
use proptest::prelude::*;

const EPSILON_GRID: [f64; 5] = [0.0, 0.5, 1.0, 1.5, 2.0];

prop_compose! {
    fn small_config()(
        seed in any::<u64>(),
        n_donors in 1usize..=7,
        n_agencies in 1usize..=5,
        n_food_types in 1usize..=3,
        (supply_lo, supply_w) in (0.0f64..500.0, 1.0f64..800.0),
        (demand_lo, demand_w) in (100.0f64..1500.0, 1.0f64..1500.0),
        (cap_lo, cap_w) in (200.0f64..2500.0, 1.0f64..2000.0),
        eps_idx in 0usize..EPSILON_GRID.len(),
        (pop_lo, pop_w) in (1u64..2000, 0u64..5000),
        (pov_lo, pov_w) in (0.0f64..0.5, 0.0f64..0.5),
        pounds_per_person in 1.0f64..8.0,
    ) -> GeneratorConfig {
        GeneratorConfig {
            n_donors,
            n_agencies,
            n_food_types,
            supply_range: (supply_lo, supply_lo + supply_w),
            demand_range: (demand_lo, demand_lo + demand_w),
            capacity_range: (cap_lo, cap_lo + cap_w),
            epsilon: EpsilonSpec::Uniform(EPSILON_GRID[eps_idx]),
            population_range: (pop_lo, pop_lo + pop_w),
            poverty_ratio_range: (pov_lo, pov_lo + pov_w),
            pounds_per_person,
            seed,
            ..GeneratorConfig::default()
        }
    }
}

fn total_supply(s: &Scenario) -> f64 {
    s.donors.iter().map(|d| d.supply.iter().sum::<f64>()).sum()
}

fn consumed_pounds(plan: &AllocationPlan, s: &Scenario) -> f64 {
    let p = s.n_food_types();
    s.agencies
        .iter()
        .map(|a| {
            plan.delivered(a.id, p)
                .iter()
                .zip(&a.demand)
                .map(|(got, want)| got.min(*want))
                .sum::<f64>()
        })
        .sum()
}

fn check_plan_shape(plan: &AllocationPlan, s: &Scenario) {
    assert_eq!(plan.visit_order.len(), s.agencies.len());
    let mut visited: Vec<_> = plan.visit_order.clone();
    visited.sort();
    visited.dedup();
    assert_eq!(visited.len(), s.agencies.len(), "visit order repeats an agency");
    assert_eq!(plan.residual_supply.len(), s.donors.len());
    for ((agency, donor, food_type), lbs) in &plan.shipments {
        assert!(lbs.is_finite() && *lbs > 0.0, "shipment {agency}/{donor}/{food_type} = {lbs}");
        assert!(*food_type < s.n_food_types());
    }
    for (donor, residual) in &plan.residual_supply {
        for (x, lbs) in residual.iter().enumerate() {
            assert!(lbs.is_finite() && *lbs >= 0.0, "residual {donor}[{x}] = {lbs}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn generated_scenarios_always_validate(cfg in small_config()) {
        let s = generate_scenario(&cfg).unwrap();
        prop_assert_eq!(validate_scenario(&s), Vec::new());
    }

    #[test]
    fn scenario_json_round_trips_exactly(cfg in small_config()) {
        let s = generate_scenario(&cfg).unwrap();
        let back = Scenario::from_json(&s.to_json_pretty()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn both_plans_conserve_mass(cfg in small_config()) {
        let s = generate_scenario(&cfg).unwrap();
        for run in [run_proposed_policy(&s).unwrap(), run_baseline_policy(&s).unwrap()] {
            let (overflow, undistributed) = compute_overflow(&run.plan, &s).unwrap();
            let consumed = consumed_pounds(&run.plan, &s);
            let balance = overflow + undistributed + consumed - total_supply(&s);
            prop_assert!(balance.abs() <= 1e-6, "mass balance off by {balance}");
        }
    }

    #[test]
    fn plans_are_well_formed(cfg in small_config()) {
        let s = generate_scenario(&cfg).unwrap();
        let proposed = run_proposed_policy(&s).unwrap();
        let baseline = run_baseline_policy(&s).unwrap();
        check_plan_shape(&proposed.plan, &s);
        check_plan_shape(&baseline.plan, &s);
        prop_assert_eq!(proposed.welfare_trace.len(), s.agencies.len());
        prop_assert!(baseline.welfare_trace.is_empty());
    }

    #[test]
    fn welfare_guided_deliveries_never_exceed_demand_or_capacity(cfg in small_config()) {
        let s = generate_scenario(&cfg).unwrap();
        let run = run_proposed_policy(&s).unwrap();
        let p = s.n_food_types();
        for a in &s.agencies {
            let delivered = run.plan.delivered(a.id, p);
            for (x, (got, want)) in delivered.iter().zip(&a.demand).enumerate() {
                prop_assert!(got <= want, "agency {} type {x}: {got} > demand {want}", a.id);
            }
            let total: f64 = delivered.iter().sum();
            prop_assert!(
                total <= a.storage_capacity + 1e-9,
                "agency {}: {total} > capacity {}", a.id, a.storage_capacity
            );
        }
        let (overflow, _) = compute_overflow(&run.plan, &s).unwrap();
        prop_assert_eq!(overflow, 0.0, "demand-capped plan overflowed");
    }

    #[test]
    fn baseline_deliveries_never_exceed_capacity(cfg in small_config()) {
        let s = generate_scenario(&cfg).unwrap();
        let run = run_baseline_policy(&s).unwrap();
        let p = s.n_food_types();
        for a in &s.agencies {
            let total: f64 = run.plan.delivered(a.id, p).iter().sum();
            prop_assert!(
                total <= a.storage_capacity + 1e-9,
                "agency {}: {total} > capacity {}", a.id, a.storage_capacity
            );
        }
    }

    #[test]
    fn policies_are_pure_functions_of_the_scenario(cfg in small_config()) {
        let s = generate_scenario(&cfg).unwrap();
        prop_assert_eq!(run_proposed_policy(&s).unwrap(), run_proposed_policy(&s).unwrap());
        prop_assert_eq!(run_baseline_policy(&s).unwrap(), run_baseline_policy(&s).unwrap());
    }

    #[test]
    fn welfare_trace_blends_are_consistent(cfg in small_config()) {
        let s = generate_scenario(&cfg).unwrap();
        let run = run_proposed_policy(&s).unwrap();
        for report in &run.welfare_trace {
            prop_assert_eq!(report.per_type.len(), s.n_food_types());
            let blended: f64 = report
                .per_type
                .iter()
                .zip(&s.params.weights)
                .map(|(w, weight)| w * weight)
                .sum();
            prop_assert!((report.combined - blended).abs() <= 1e-9);
            for w in &report.per_type {
                prop_assert!(w.is_finite() && *w >= 0.0);
            }
        }
    }

    #[test]
    fn metrics_agree_with_plan_totals(cfg in small_config()) {
        let s = generate_scenario(&cfg).unwrap();
        let run = run_proposed_policy(&s).unwrap();
        let m = compute_metrics(&run, &s).unwrap();
        prop_assert_eq!(m.per_agency.len(), s.agencies.len());
        let agency_overflow: f64 = m.per_agency.iter().map(|a| a.overflow_lbs).sum();
        prop_assert!((m.overflow_lbs - agency_overflow).abs() <= 1e-9);
        let agency_people: u64 = m.per_agency.iter().map(|a| a.people_served).sum();
        prop_assert_eq!(m.people_served, agency_people);
        let population: u64 = s.agencies.iter().map(|a| a.population).sum();
        prop_assert!(m.people_served <= population);
        prop_assert!(m.per_agency.windows(2).all(|w| w[0].agency < w[1].agency));
    }

    #[test]
    fn more_supply_never_serves_fewer_people(cfg in small_config()) {
        let mut s = generate_scenario(&cfg).unwrap();
        let before = compute_metrics(&run_proposed_policy(&s).unwrap(), &s).unwrap();
        for d in &mut s.donors {
            for lbs in &mut d.supply {
                *lbs *= 1.5;
            }
        }
        let after = compute_metrics(&run_proposed_policy(&s).unwrap(), &s).unwrap();
        prop_assert!(
            after.people_served >= before.people_served,
            "supply grew but served fell: {} -> {}", before.people_served, after.people_served
        );
    }
}
