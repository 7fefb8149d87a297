//! Event-driven simulation of the picking floor: periodic order and pod decisions,
//! robots on a shared reservation grid, FIFO station queues.

mod replay;
mod world;

use std::fmt;
use std::io::Write;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::instance::{Instance, Layout};
use crate::model::{ModelParams, OrderId, PodId, SkuId, StationId, StationState, Variant, WarehouseState};
use crate::solver::{SolverConfig, Status};
use crate::{Error, Result};

pub use replay::{ReplayReport, replay};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    Sequential,
    Integrated,
    SplitStations,
    SplitTime,
}

impl Policy {
    pub const ALL: [Policy; 4] = [Policy::Sequential, Policy::Integrated, Policy::SplitStations, Policy::SplitTime];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Sequential => "sequential",
            Policy::Integrated => "integrated",
            Policy::SplitStations => "split_stations",
            Policy::SplitTime => "split_time",
        }
    }

    /// The period model behind the policy; `None` for the rule-based baseline.
    pub fn variant(self) -> Option<Variant> {
        match self {
            Policy::Sequential => None,
            Policy::Integrated => Some(Variant::Integrated),
            Policy::SplitStations => Some(Variant::SplitStations),
            Policy::SplitTime => Some(Variant::SplitTime),
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Contract(format!("unknown policy {s:?}; expected one of sequential, integrated, split_stations, split_time")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    /// Keep only the n best-covered backlog orders in each model solve.
    pub prefilter: Option<usize>,
    pub solver: SolverConfig,
    /// Planning window in ticks; `None` plans every trip to its end.
    pub window: Option<u32>,
    pub trace: bool,
    /// Simulated seconds after which the run is declared stuck.
    pub time_limit: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { prefilter: None, solver: SolverConfig::default(), window: None, trace: false, time_limit: 1.0e7 }
    }
}

/// Picks per pod-station visit, kept as a reduced fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        let g = gcd(num, den).max(1);
        Ratio { num: num / g, den: den / g }
    }

    pub fn value(self) -> f64 {
        if self.den == 0 { 0.0 } else { self.num as f64 / self.den as f64 }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// One line picked at a station from a pod.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionRequest {
    pub order: OrderId,
    pub sku: SkuId,
    pub station: StationId,
    pub pod: Option<PodId>,
    pub created_at: f64,
    pub completed_at: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderTimes {
    pub order: OrderId,
    pub received: f64,
    /// When the last of its lines was assigned to a station.
    pub assigned: f64,
    /// When its last line was picked.
    pub completed: f64,
}

impl OrderTimes {
    pub fn backlog_time(&self) -> f64 {
        self.assigned - self.received
    }

    pub fn station_time(&self) -> f64 {
        self.completed - self.assigned
    }

    pub fn turnover(&self) -> f64 {
        self.completed - self.received
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodStat {
    pub period: u32,
    pub time: f64,
    /// Backlog orders handed to the decision (after prefiltering).
    pub orders: usize,
    pub lines_assigned: usize,
    pub new_visits: usize,
    pub objective: i64,
    pub status: Option<Status>,
    pub nodes: u64,
    pub wall: Duration,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub time: f64,
    pub kind: String,
    pub entity: u32,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub policy: Policy,
    pub pod_station_visits: u64,
    pub completed_orders: u64,
    pub total_picks: u64,
    /// Meters driven by all robots.
    pub robot_distance: f64,
    pub pile_on: Ratio,
    pub orders: Vec<OrderTimes>,
    pub requests: Vec<ExtractionRequest>,
    pub periods: Vec<PeriodStat>,
    pub sim_seconds: f64,
    /// Conflicts found by the independent collision audit; empty on a sound run.
    pub collisions: Vec<String>,
    pub max_queue: u32,
    pub max_active_splits: u32,
    pub trace: Vec<TraceRow>,
}

impl SimReport {
    /// Solver wall time of the first period (`true`) or of all later ones.
    pub fn solver_time(&self, first: bool) -> Duration {
        self.periods.iter().filter(|p| (p.period == 1) == first).map(|p| p.wall).sum()
    }

    pub fn solver_nodes(&self, first: bool) -> u64 {
        self.periods.iter().filter(|p| (p.period == 1) == first).map(|p| p.nodes).sum()
    }

    pub fn mean_backlog_time(&self) -> f64 {
        mean(self.orders.iter().map(OrderTimes::backlog_time))
    }

    pub fn mean_station_time(&self) -> f64 {
        mean(self.orders.iter().map(OrderTimes::station_time))
    }

    /// Tab-separated trace: time, kind, entity, detail.
    pub fn write_trace<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "time\tkind\tentity\tdetail")?;
        for r in &self.trace {
            writeln!(w, "{:.3}\t{}\t{}\t{}", r.time, r.kind, r.entity, r.detail)?;
        }
        Ok(())
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 { 0.0 } else { s / n as f64 }
}

/// Starting state for an instance: every order waiting, every pod in storage.
pub fn initial_state(instance: &Instance, layout: &Layout) -> WarehouseState {
    WarehouseState {
        period: 1,
        num_skus: instance.num_skus,
        pods: instance.pods.clone(),
        stored: instance.pods.iter().map(|p| p.id).collect(),
        stations: layout
            .stations
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let mut st = StationState::new(k as u32 + 1, s.capacity);
                st.queue_length = layout.queue_length;
                st
            })
            .collect(),
        backlog: instance.orders.clone(),
        started: vec![],
        active_splits: 0,
        pod_distance: vec![],
    }
}

/// Simulates an instance until every order is picked.
pub fn run(
    instance: &Instance,
    layout: &Layout,
    policy: Policy,
    params: &ModelParams,
    seed: u64,
    options: &SimOptions,
) -> Result<SimReport> {
    layout.validate(instance.pods.len() as u32)?;
    run_state(&initial_state(instance, layout), layout, policy, params, seed, options)
}

/// Simulates from an explicit state. Pods listed at a station start docked there,
/// each with its own robot; the layout supplies geometry, robots and kinematics.
pub fn run_state(
    state: &WarehouseState,
    layout: &Layout,
    policy: Policy,
    params: &ModelParams,
    seed: u64,
    options: &SimOptions,
) -> Result<SimReport> {
    world::World::new(state, layout, policy, params, seed, options)?.run()
}

#[cfg(test)]
mod tests;
