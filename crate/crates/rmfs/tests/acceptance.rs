//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use rmfs::baseline::sequential_assignment;
use rmfs::fixtures::{example1, example2, random_state, split_over_time};
use rmfs::harness::{ExperimentConfig, run_experiment, write_rows};
use rmfs::instance::{Instance, InstanceParams, Layout, gen_instance};
use rmfs::path::Grid;
use rmfs::prefilter::prefilter;
use rmfs::sim::{self, Policy, SimOptions, SimReport, replay};
use rmfs::solver::{SolverConfig, Status, brute_force_oracle, solve_state};
use rmfs::{ModelParams, Variant, WarehouseState};

const C1_BUDGET: Duration = Duration::from_secs(1);
const C2_BUDGET: Duration = Duration::from_secs(5);
const C3_BUDGET: Duration = Duration::from_secs(5);
const C4_BUDGET: Duration = Duration::from_secs(120);
const C5_BUDGET: Duration = Duration::from_secs(300);
const C6_BUDGET: Duration = Duration::from_secs(120);
const C7_BUDGET: Duration = Duration::from_secs(900);
const C9_BUDGET: Duration = Duration::from_secs(900);
const C4_STATES: u64 = 50;
const C5_STATES: u64 = 120;
const C6_STATES: u64 = 50;
/// Bound on median PSV/order with n = 10 over the unfiltered median, per model.
const C9_MAX_PSV_FACTOR: f64 = 1.5;
const C9_N: usize = 10;
/// Timing repeats per run; the fastest counts, which damps scheduler noise.
const C9_TIMING_REPEATS: usize = 3;

struct Gate {
    failed: Vec<u32>,
    reports: Vec<SimReport>,
}

impl Gate {
    fn record(&mut self, id: u32, name: &str, ok: bool, started: Instant, budget: Duration, detail: String) {
        let took = started.elapsed();
        let ok = ok && took <= budget;
        if !ok {
            self.failed.push(id);
        }
        let verdict = if ok { "PASS" } else { "FAIL" };
        let mut out = std::io::stdout();
        let _ = writeln!(out, "{verdict} criterion {id:>2} {name}: {detail} [{:.2}s of {}s]", took.as_secs_f64(), budget.as_secs());
    }

    fn sim(&mut self, inst: &Instance, layout: &Layout, policy: Policy, seed: u64, prefilter: Option<usize>) -> SimReport {
        let o = SimOptions { prefilter, ..Default::default() };
        let r = sim::run(inst, layout, policy, &ModelParams::default(), seed, &o).expect("simulation runs");
        self.reports.push(r.clone());
        r
    }

    fn sim_state(&mut self, st: &WarehouseState, layout: &Layout, policy: Policy) -> SimReport {
        let r = sim::run_state(st, layout, policy, &ModelParams::default(), 1, &SimOptions::default()).expect("simulation runs");
        self.reports.push(r.clone());
        r
    }
}

fn opt(st: &WarehouseState, v: Variant, p: &ModelParams) -> Option<i64> {
    let (a, s) = solve_state(st, v, p, &SolverConfig::default()).ok()?;
    (s.status == Status::Optimal).then_some(a.objective_value)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 { xs[n / 2] } else { (xs[n / 2 - 1] + xs[n / 2]) / 2.0 }
}

fn docked(st: &WarehouseState) -> usize {
    st.stations.iter().map(|s| s.at.len() + s.inbound.len()).sum()
}

fn criterion1(g: &mut Gate) {
    let t = Instant::now();
    let st = example1();
    let p = ModelParams::default();
    let whole = opt(&st, Variant::Integrated, &p);
    let split = opt(&st, Variant::SplitStations, &p);
    let ok = whole == Some(4) && split == Some(2);
    g.record(1, "worked example", ok, t, C1_BUDGET, format!("integrated {whole:?} (want 4), split among stations {split:?} (want 2)"));
}

fn criterion2(g: &mut Gate) {
    let t = Instant::now();
    let st = example2();
    let p = ModelParams::default();
    let layout = Layout::new(3, 2, 2, 6, 4);
    let seq = g.sim_state(&st, &layout, Policy::Sequential);
    let int = g.sim_state(&st, &layout, Policy::Integrated);
    let oracle = brute_force_oracle(&st, Variant::Integrated, &p).map(|r| r.0).ok();
    let model = opt(&st, Variant::Integrated, &p);
    let rule_visits = sequential_assignment(&st, p.w_u).new_visits(&st) + docked(&st);
    let ok = seq.pod_station_visits == 6 && int.pod_station_visits == 4 && oracle == Some(4) && model == oracle && rule_visits == 6;
    g.record(
        2,
        "sequential vs integrated",
        ok,
        t,
        C2_BUDGET,
        format!(
            "simulated visits sequential {} (want 6), integrated {} (want 4); oracle {oracle:?} = model {model:?}; rule decision {rule_visits} visits",
            seq.pod_station_visits, int.pod_station_visits
        ),
    );
}

fn criterion3(g: &mut Gate) {
    let t = Instant::now();
    let (st, schedule) = split_over_time();
    let p = ModelParams::default();
    let cfg = SolverConfig::default();
    let r = replay(&st, &schedule, Policy::SplitTime, &p, &cfg).expect("replay runs");
    let others: Vec<String> = [Policy::SplitStations, Policy::Integrated]
        .iter()
        .map(|&pol| {
            let o = replay(&st, &schedule, pol, &p, &cfg).expect("replay runs");
            format!("{pol} {}", o.visits)
        })
        .collect();
    let ok = r.completed && r.visits == 2 && r.periods.len() == 2;
    g.record(
        3,
        "split over time",
        ok,
        t,
        C3_BUDGET,
        format!("split_time {} visits over {} periods (want 2 over 2); {}", r.visits, r.periods.len(), others.join(", ")),
    );
}

fn criterion4(g: &mut Gate) {
    let t = Instant::now();
    let p = ModelParams::default();
    let mut mismatches = Vec::new();
    for seed in 0..C4_STATES {
        let st = random_state(4_000 + seed, 5, 8, 2);
        for v in Variant::ALL {
            let want = brute_force_oracle(&st, v, &p).map(|r| r.0).ok();
            let got = opt(&st, v, &p);
            if want.is_none() || got != want {
                mismatches.push(format!("seed {seed} {v}: {got:?} vs {want:?}"));
            }
        }
    }
    let detail = format!("{} states × 3 variants, {} mismatches{}", C4_STATES, mismatches.len(), first(&mismatches));
    g.record(4, "solver exactness", mismatches.is_empty(), t, C4_BUDGET, detail);
}

fn criterion5(g: &mut Gate) {
    let t = Instant::now();
    let p = ModelParams::default();
    let mut bad = Vec::new();
    for seed in 0..C5_STATES {
        let st = random_state(5_000 + seed, 5, 8, 2);
        let [i, s, tm] = Variant::ALL.map(|v| opt(&st, v, &p));
        match (i, s, tm) {
            (Some(i), Some(s), Some(tm)) if tm <= s && s <= i => {}
            other => bad.push(format!("seed {seed}: {other:?}")),
        }
    }
    let detail = format!("{C5_STATES} states, {} violations{}", bad.len(), first(&bad));
    g.record(5, "dominance", bad.is_empty(), t, C5_BUDGET, detail);
}

fn criterion6(g: &mut Gate) {
    let t = Instant::now();
    let free = ModelParams::default();
    let mut bad = Vec::new();
    for seed in 0..C6_STATES {
        let st = random_state(6_000 + seed, 5, 8, 2);
        let whole = opt(&st, Variant::Integrated, &free);
        for v in [Variant::SplitStations, Variant::SplitTime] {
            let unlimited = opt(&st, v, &free);
            let values: Vec<Option<i64>> = (st.active_splits..=st.backlog.len() as u32 + 1)
                .map(|c| opt(&st, v, &ModelParams { packing_capacity: Some(c), ..free }))
                .collect();
            let monotone = values.windows(2).all(|w| w[1] <= w[0]);
            let capped = values.iter().all(|o| o.is_some() && *o <= whole);
            if !(monotone && capped && values.last() == Some(&unlimited)) {
                bad.push(format!("seed {seed} {v}: {values:?} unlimited {unlimited:?} integrated {whole:?}"));
            }
        }
    }
    let detail = format!("{C6_STATES} states × 2 split variants, {} violations{}", bad.len(), first(&bad));
    g.record(6, "packing capacity sandwich", bad.is_empty(), t, C6_BUDGET, detail);
}

fn desk_instances(layout: &Layout) -> Vec<Instance> {
    (1..=10).map(|seed| gen_instance(&InstanceParams::new(20, 20, 30, 2, seed), layout).unwrap()).collect()
}

fn criterion7(g: &mut Gate) {
    let t = Instant::now();
    let layout = Layout::desk();
    let mut psv = vec![Vec::new(); 4];
    let mut dist = vec![Vec::new(); 4];
    for (k, inst) in desk_instances(&layout).iter().enumerate() {
        for (j, policy) in Policy::ALL.into_iter().enumerate() {
            let r = g.sim(inst, &layout, policy, k as u64 + 1, None);
            psv[j].push(r.pod_station_visits as f64 / 20.0);
            dist[j].push(r.robot_distance / 20.0);
        }
    }
    let mp: Vec<f64> = psv.into_iter().map(median).collect();
    let md: Vec<f64> = dist.into_iter().map(median).collect();
    // Policy::ALL order: sequential, integrated, split_stations, split_time.
    let ok = mp[2] < mp[1] && mp[1] < mp[0] && md[2] < md[1] && md[1] < md[0];
    let fmt = |v: &[f64]| Policy::ALL.iter().zip(v).map(|(p, x)| format!("{p} {x:.3}")).collect::<Vec<_>>().join(", ");
    g.record(7, "desk-scale trend", ok, t, C7_BUDGET, format!("median PSV/order {}; median m/order {}", fmt(&mp), fmt(&md)));
}

fn criterion8(g: &mut Gate) {
    let t = Instant::now();
    let bad = g.reports.iter().filter(|r| r.pile_on.num * r.pod_station_visits != r.total_picks * r.pile_on.den).count();
    let detail = format!("{} simulation runs, {bad} identity failures", g.reports.len());
    g.record(8, "pile-on identity", bad == 0 && !g.reports.is_empty(), t, Duration::from_secs(1), detail);
}

fn criterion9(g: &mut Gate) {
    let t = Instant::now();
    let p = ModelParams::default();
    let layout = Layout::desk();
    let instances = desk_instances(&layout);

    let mut states: Vec<WarehouseState> = (0..C4_STATES).map(|s| random_state(9_000 + s, 5, 8, 2)).collect();
    states.extend(instances.iter().map(|i| sim::initial_state(i, &layout)));
    let mut differ = 0;
    for st in &states {
        let kept = st.with_backlog(&prefilter(st, st.backlog.len()));
        for v in Variant::ALL {
            if opt(&kept, v, &p) != opt(st, v, &p) {
                differ += 1;
            }
        }
    }

    let models = [Policy::Integrated, Policy::SplitStations, Policy::SplitTime];
    let mut time = [[Duration::ZERO; 2]; 3];
    let mut psv: [[Vec<f64>; 2]; 3] = Default::default();
    for (k, inst) in instances.iter().enumerate() {
        for (j, &policy) in models.iter().enumerate() {
            for (f, pf) in [None, Some(C9_N)].into_iter().enumerate() {
                let mut best = Duration::MAX;
                for _ in 0..C9_TIMING_REPEATS {
                    let r = g.sim(inst, &layout, policy, k as u64 + 1, pf);
                    best = best.min(r.solver_time(true) + r.solver_time(false));
                    if psv[j][f].len() == k {
                        psv[j][f].push(r.pod_station_visits as f64 / 20.0);
                    }
                }
                time[j][f] += best;
            }
        }
    }
    let total = |f: usize| time.iter().map(|t| t[f]).sum::<Duration>();
    let factors: Vec<f64> = psv.iter().map(|v| median(v[1].clone()) / median(v[0].clone())).collect();
    let ok = differ == 0 && total(1) < total(0) && factors.iter().all(|&f| f <= C9_MAX_PSV_FACTOR);
    let per: Vec<String> = models
        .iter()
        .zip(&time)
        .zip(&factors)
        .map(|((m, t), f)| format!("{m} {:.1}→{:.1} ms, PSV ×{f:.3}", t[0].as_secs_f64() * 1e3, t[1].as_secs_f64() * 1e3))
        .collect();
    let detail = format!(
        "full-backlog prefilter differs on {differ} of {} solves; solver time unfiltered {:.1} ms vs n={C9_N} {:.1} ms ({}); PSV factor bound {C9_MAX_PSV_FACTOR}",
        states.len() * 3,
        total(0).as_secs_f64() * 1e3,
        total(1).as_secs_f64() * 1e3,
        per.join("; ")
    );
    g.record(9, "prefilter consistency", ok, t, C9_BUDGET, detail);
}

fn criterion10(g: &mut Gate) {
    let t = Instant::now();
    let mut cfg = ExperimentConfig::new(vec![InstanceParams::new(12, 12, 16, 2, 0)], Layout::desk());
    cfg.repetitions = 3;
    cfg.prefilter = vec![None, Some(4)];
    let csv = |c: &ExperimentConfig| {
        let out = run_experiment(c).expect("experiment runs");
        let mut buf = Vec::new();
        write_rows(&mut buf, &out.rows).unwrap();
        (buf, out.rows.iter().all(|r| r.status == "ok"))
    };
    let (a, ok_a) = csv(&cfg);
    let (b, ok_b) = csv(&cfg);
    let identical = a == b && ok_a && ok_b;

    let collisions: usize = g.reports.iter().map(|r| r.collisions.len()).sum();

    let grid = Grid::from_rows(&[".....", "###.#"]);
    let (s, e) = ((0, 4), (4, 0));
    let best = common::joint_bfs(&grid, s, e);
    let (makespan, mut audit) = common::prioritized(&grid, s, e);
    let planner_ok = best == Some(makespan) && audit.verify(makespan + 5).is_empty();

    let ok = identical && collisions == 0 && planner_ok;
    let detail = format!(
        "experiment CSV identical {identical} ({} bytes); {collisions} collisions over {} runs; planner makespan {makespan} vs joint BFS {best:?}",
        a.len(),
        g.reports.len()
    );
    g.record(10, "determinism and safety", ok, t, Duration::from_secs(120), detail);
}

fn main() {
    let mut g = Gate { failed: Vec::new(), reports: Vec::new() };
    criterion1(&mut g);
    criterion2(&mut g);
    criterion3(&mut g);
    criterion4(&mut g);
    criterion5(&mut g);
    criterion6(&mut g);
    criterion7(&mut g);
    criterion9(&mut g);
    criterion8(&mut g);
    criterion10(&mut g);
    if g.failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: failed criteria {:?}", g.failed);
        std::process::exit(1);
    }
}

fn first(found: &[String]) -> String {
    found.first().map(|s| format!(", first: {s}")).unwrap_or_default()
}
