use super::*;
use crate::fixtures::{example1, example2, split_over_time};
use crate::instance::{InstanceParams, gen_instance};
use crate::model::{Order, Pod};

fn opts() -> SimOptions {
    SimOptions { trace: true, ..Default::default() }
}

fn two_station_layout(capacity: u32, robots: u32) -> Layout {
    Layout::new(3, 2, 2, capacity, robots)
}

fn strip_wall(mut r: SimReport) -> SimReport {
    for p in &mut r.periods {
        p.wall = Duration::ZERO;
    }
    r
}

fn check_sound(r: &SimReport) {
    assert!(r.collisions.is_empty(), "{:?}", r.collisions);
    assert_eq!(r.pile_on.num * r.pod_station_visits, r.total_picks * r.pile_on.den);
    assert!(r.requests.iter().all(|q| q.completed_at.is_some_and(|c| c >= q.created_at)));
    assert_eq!(r.requests.len() as u64, r.total_picks);
}

#[test]
fn single_docked_line_takes_one_pick() {
    let mut st = StationState::new(1, 3);
    st.at.push(PodId(1));
    let state = WarehouseState {
        period: 1,
        num_skus: 1,
        pods: vec![Pod::new(1, [1])],
        stored: vec![],
        stations: vec![st],
        backlog: vec![Order::new(1, [1])],
        started: vec![],
        active_splits: 0,
        pod_distance: vec![],
    };
    let layout = Layout::new(1, 1, 1, 3, 1);
    for policy in Policy::ALL {
        let r = run_state(&state, &layout, policy, &ModelParams::default(), 1, &opts()).unwrap();
        check_sound(&r);
        assert_eq!(r.pod_station_visits, 1, "{policy}");
        assert_eq!(r.pile_on, Ratio { num: 1, den: 1 });
        assert_eq!(r.orders[0].turnover(), 7.0);
        assert_eq!(r.orders[0].backlog_time(), 0.0);
    }
}

#[test]
fn example1_visits_by_policy() {
    let layout = two_station_layout(2, 2);
    let p = ModelParams::default();
    let split = run_state(&example1(), &layout, Policy::SplitStations, &p, 3, &opts()).unwrap();
    let whole = run_state(&example1(), &layout, Policy::Integrated, &p, 3, &opts()).unwrap();
    check_sound(&split);
    check_sound(&whole);
    assert_eq!(split.pod_station_visits, 2);
    assert_eq!(whole.pod_station_visits, 4);
    assert_eq!(whole.total_picks, 4);
}

#[test]
fn example2_sequential_and_integrated() {
    let layout = two_station_layout(6, 4);
    let p = ModelParams::default();
    let seq = run_state(&example2(), &layout, Policy::Sequential, &p, 1, &opts()).unwrap();
    let int = run_state(&example2(), &layout, Policy::Integrated, &p, 1, &opts()).unwrap();
    check_sound(&seq);
    check_sound(&int);
    assert_eq!(seq.pod_station_visits, 6);
    assert_eq!(int.pod_station_visits, 4);
    assert_eq!(seq.pile_on, Ratio { num: 2, den: 1 });
    assert_eq!(int.pile_on, Ratio { num: 3, den: 1 });
}

#[test]
fn same_seed_same_report() {
    let layout = Layout::desk();
    let inst = gen_instance(&InstanceParams::new(8, 10, 12, 2, 5), &layout).unwrap();
    for policy in Policy::ALL {
        let a = run(&inst, &layout, policy, &ModelParams::default(), 9, &opts()).unwrap();
        let b = run(&inst, &layout, policy, &ModelParams::default(), 9, &opts()).unwrap();
        check_sound(&a);
        assert_eq!(a.completed_orders, 8);
        assert_eq!(strip_wall(a), strip_wall(b));
    }
}

#[test]
fn capacity_and_queue_bounds_hold() {
    let layout = Layout::desk();
    let inst = gen_instance(&InstanceParams::new(12, 12, 16, 2, 2), &layout).unwrap();
    let r = run(&inst, &layout, Policy::SplitTime, &ModelParams::default(), 4, &opts()).unwrap();
    check_sound(&r);
    assert!(r.max_queue <= layout.queue_length);
    assert_eq!(r.total_picks as usize, inst.total_lines());
    let mut open = std::collections::BTreeMap::<StationId, i64>::new();
    let mut events: Vec<(f64, i32, StationId)> = Vec::new();
    for q in &r.requests {
        events.push((q.created_at, 1, q.station));
        events.push((q.completed_at.unwrap(), -1, q.station));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for (_, d, s) in events {
        let v = open.entry(s).or_default();
        *v += d as i64;
        assert!(*v <= 6);
    }
}

#[test]
fn packing_limit_caps_open_splits() {
    let layout = Layout::desk();
    let inst = gen_instance(&InstanceParams::new(10, 10, 12, 2, 8), &layout).unwrap();
    let p = ModelParams { packing_capacity: Some(1), ..Default::default() };
    for policy in [Policy::SplitStations, Policy::SplitTime] {
        let r = run(&inst, &layout, policy, &p, 2, &opts()).unwrap();
        check_sound(&r);
        assert!(r.max_active_splits <= 1, "{policy}: {}", r.max_active_splits);
    }
}

#[test]
fn prefilter_runs_complete() {
    let layout = Layout::desk();
    let inst = gen_instance(&InstanceParams::new(12, 12, 16, 2, 3), &layout).unwrap();
    let o = SimOptions { prefilter: Some(3), ..opts() };
    for policy in [Policy::Integrated, Policy::SplitStations, Policy::SplitTime] {
        let r = run(&inst, &layout, policy, &ModelParams::default(), 1, &o).unwrap();
        check_sound(&r);
        assert!(r.periods.iter().all(|p| p.orders <= 3));
        assert_eq!(r.completed_orders, 12);
    }
}

#[test]
fn trace_is_tab_separated() {
    let r = run_state(&example1(), &two_station_layout(2, 2), Policy::SplitTime, &ModelParams::default(), 1, &opts()).unwrap();
    let mut buf = Vec::new();
    r.write_trace(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.lines().all(|l| l.split('\t').count() == 4));
    assert!(text.contains("pick-complete"));
}

#[test]
fn split_over_time_replay() {
    let (state, schedule) = split_over_time();
    let cfg = SolverConfig::default();
    let p = ModelParams::default();
    let visits = |policy| replay(&state, &schedule, policy, &p, &cfg).unwrap();
    let r = visits(Policy::SplitTime);
    assert!(r.completed);
    assert_eq!(r.visits, 2);
    for policy in [Policy::Integrated, Policy::SplitStations, Policy::Sequential] {
        let r = visits(policy);
        assert!(r.completed, "{policy}");
        assert_eq!(r.visits, 4, "{policy}");
    }
}

#[test]
fn policy_names_round_trip() {
    for p in Policy::ALL {
        assert_eq!(p.name().parse::<Policy>().unwrap(), p);
    }
    assert!("both".parse::<Policy>().is_err());
}
