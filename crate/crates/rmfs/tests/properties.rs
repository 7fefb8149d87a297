use proptest::prelude::*;
use rmfs::fixtures::random_state;
use rmfs::instance::{InstanceParams, Layout, gen_instance};
use rmfs::model::validate_assignment;
use rmfs::prefilter::prefilter;
use rmfs::sim::{self, Policy, SimOptions};
use rmfs::solver::{SolverConfig, Status, brute_force_oracle, solve_state};
use rmfs::{ModelParams, Variant, WarehouseState};

fn opt(st: &WarehouseState, v: Variant, p: &ModelParams) -> i64 {
    let (a, s) = solve_state(st, v, p, &SolverConfig::default()).unwrap();
    assert_eq!(s.status, Status::Optimal);
    assert!(validate_assignment(st, &a, v, p).is_empty());
    a.objective_value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn solver_matches_oracle(seed in any::<u64>()) {
        let st = random_state(seed, 5, 8, 2);
        let p = ModelParams::default();
        for v in Variant::ALL {
            let (want, asg) = brute_force_oracle(&st, v, &p).unwrap();
            prop_assert!(validate_assignment(&st, &asg, v, &p).is_empty());
            prop_assert_eq!(opt(&st, v, &p), want, "{}", v);
        }
    }

    #[test]
    fn split_models_dominate(seed in any::<u64>()) {
        let st = random_state(seed, 5, 8, 2);
        let p = ModelParams::default();
        let [i, s, t] = Variant::ALL.map(|v| opt(&st, v, &p));
        prop_assert!(t <= s && s <= i, "{} {} {}", t, s, i);
    }

    #[test]
    fn packing_capacity_sandwich(seed in any::<u64>()) {
        let st = random_state(seed, 5, 8, 2);
        let free = ModelParams::default();
        let whole = opt(&st, Variant::Integrated, &free);
        for v in [Variant::SplitStations, Variant::SplitTime] {
            let unlimited = opt(&st, v, &free);
            let mut last = i64::MAX;
            for c in st.active_splits..=st.backlog.len() as u32 + 1 {
                let o = opt(&st, v, &ModelParams { packing_capacity: Some(c), ..free });
                prop_assert!(o <= last && o <= whole);
                last = o;
            }
            prop_assert_eq!(last, unlimited);
        }
    }

    #[test]
    fn full_prefilter_changes_nothing(seed in any::<u64>()) {
        let st = random_state(seed, 5, 8, 2);
        let p = ModelParams::default();
        let kept = st.with_backlog(&prefilter(&st, st.backlog.len()));
        for v in Variant::ALL {
            prop_assert_eq!(opt(&kept, v, &p), opt(&st, v, &p));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn pile_on_times_visits_is_picks(seed in 0u64..1000, orders in 3u32..10, pods in 8u32..16) {
        let layout = Layout::desk();
        let inst = gen_instance(&InstanceParams::new(orders, 8, pods, 2, seed), &layout).unwrap();
        for policy in Policy::ALL {
            let r = sim::run(&inst, &layout, policy, &ModelParams::default(), seed, &SimOptions::default()).unwrap();
            prop_assert_eq!(r.pile_on.num * r.pod_station_visits, r.total_picks * r.pile_on.den);
            prop_assert_eq!(r.total_picks as usize, inst.total_lines());
            prop_assert!(r.collisions.is_empty());
        }
    }
}
