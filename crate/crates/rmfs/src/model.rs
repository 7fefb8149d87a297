//! Domain types shared by every module, plus solver-independent validators.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident, $prefix:literal) => {
        $(#[$m])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_type!(
    /// SKU index, contiguous from 1; the rank drives the popularity distribution.
    SkuId,
    "i"
);
id_type!(OrderId, "o");
id_type!(PodId, "p");
id_type!(StationId, "s");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Order {
    pub id: OrderId,
    /// One unit per line; kept sorted.
    pub lines: Vec<SkuId>,
    #[serde(default)]
    pub arrival_time: f64,
}

impl Order {
    pub fn new(id: u32, lines: impl IntoIterator<Item = u32>) -> Self {
        let mut lines: Vec<SkuId> = lines.into_iter().map(SkuId).collect();
        lines.sort();
        Order { id: OrderId(id), lines, arrival_time: 0.0 }
    }
}

/// Inventory of a pod as a SKU presence set. Picking never depletes it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pod {
    pub id: PodId,
    pub skus: Vec<SkuId>,
}

impl Pod {
    pub fn new(id: u32, skus: impl IntoIterator<Item = u32>) -> Self {
        let skus: BTreeSet<SkuId> = skus.into_iter().map(SkuId).collect();
        Pod { id: PodId(id), skus: skus.into_iter().collect() }
    }

    pub fn holds(&self, sku: SkuId) -> bool {
        self.skus.binary_search(&sku).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationState {
    pub id: StationId,
    /// Total item capacity C_s.
    pub capacity: u32,
    /// Capacity available to this period's decision.
    pub free: u32,
    #[serde(default = "default_queue_length")]
    pub queue_length: u32,
    /// Pods docked or waiting in the queue.
    #[serde(default)]
    pub at: Vec<PodId>,
    /// Pods on their way to this station.
    #[serde(default)]
    pub inbound: Vec<PodId>,
    /// Assigned lines not yet picked.
    #[serde(default)]
    pub open_requests: Vec<(OrderId, SkuId)>,
}

fn default_queue_length() -> u32 {
    12
}

impl StationState {
    pub fn new(id: u32, capacity: u32) -> Self {
        StationState {
            id: StationId(id),
            capacity,
            free: capacity,
            queue_length: default_queue_length(),
            at: Vec::new(),
            inbound: Vec::new(),
            open_requests: Vec::new(),
        }
    }

    /// Pods already at or heading to the station (the forced set P_s).
    pub fn present(&self) -> impl Iterator<Item = PodId> + '_ {
        self.at.iter().chain(self.inbound.iter()).copied()
    }
}

/// Snapshot handed to a period decision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarehouseState {
    #[serde(default = "one")]
    pub period: u32,
    pub num_skus: u32,
    pub pods: Vec<Pod>,
    #[serde(default)]
    pub stored: Vec<PodId>,
    pub stations: Vec<StationState>,
    /// Orders with unassigned lines; partially assigned orders carry only their residual lines.
    pub backlog: Vec<Order>,
    /// Backlog orders that already had lines assigned in an earlier period.
    #[serde(default)]
    pub started: Vec<OrderId>,
    /// Split orders still being picked (packing tracker n_l).
    #[serde(default)]
    pub active_splits: u32,
    /// Cells from a stored pod to the nearest station, when known. Only breaks
    /// ties between equally good pod choices.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pod_distance: Vec<(PodId, u32)>,
}

fn one() -> u32 {
    1
}

impl WarehouseState {
    pub fn pod(&self, id: PodId) -> Option<&Pod> {
        self.pods.iter().find(|p| p.id == id)
    }

    pub fn max_capacity(&self) -> u32 {
        self.stations.iter().map(|s| s.capacity).max().unwrap_or(0)
    }

    pub fn is_started(&self, order: OrderId) -> bool {
        self.started.contains(&order)
    }

    pub fn total_free(&self) -> u32 {
        self.stations.iter().map(|s| s.free).sum()
    }

    /// Same state with the backlog restricted to `keep`, in the given order.
    pub fn with_backlog(&self, keep: &[OrderId]) -> WarehouseState {
        let mut out = self.clone();
        out.backlog = keep
            .iter()
            .filter_map(|id| self.backlog.iter().find(|o| o.id == *id).cloned())
            .collect();
        out.started.retain(|id| keep.contains(id));
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Integrated,
    SplitStations,
    SplitTime,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Integrated, Variant::SplitStations, Variant::SplitTime];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Integrated => "integrated",
            Variant::SplitStations => "split_stations",
            Variant::SplitTime => "split_time",
        }
    }

    pub fn splits(self) -> bool {
        self != Variant::Integrated
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Variant {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "integrated" => Ok(Variant::Integrated),
            "split_stations" | "split" => Ok(Variant::SplitStations),
            "split_time" => Ok(Variant::SplitTime),
            _ => Err(crate::Error::Contract(format!("unknown variant `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Weight of one unit of unused station capacity.
    pub w_u: u32,
    /// Packing capacity C for split orders; `None` means unlimited.
    pub packing_capacity: Option<u32>,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { w_u: 2, packing_capacity: None }
    }
}

/// Decoded period decision, stored sparsely: only non-zero entries are listed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    /// x_ps = 1
    pub pods: Vec<(PodId, StationId)>,
    /// y_os = 1
    pub orders: Vec<(OrderId, StationId)>,
    /// y_ios = 1
    pub lines: Vec<(OrderId, SkuId, StationId)>,
    /// u_s for every station.
    pub unused: Vec<(StationId, u32)>,
    /// y_o = 1
    pub active: Vec<OrderId>,
    /// e_o > 0
    pub extra_stations: Vec<(OrderId, u32)>,
    /// y^b_io = 1
    pub deferred: Vec<(OrderId, SkuId)>,
    /// y^l_o = 1
    pub split: Vec<OrderId>,
    pub objective_value: i64,
}

impl Assignment {
    pub fn normalize(&mut self) {
        self.pods.sort();
        self.orders.sort();
        self.lines.sort();
        self.unused.sort();
        self.active.sort();
        self.extra_stations.sort();
        self.deferred.sort();
        self.split.sort();
    }

    /// Pod-station pairs that are new relative to the state (pods not already present).
    pub fn new_visits(&self, state: &WarehouseState) -> usize {
        self.pods
            .iter()
            .filter(|(p, s)| {
                !state.stations.iter().any(|st| st.id == *s && st.present().any(|q| q == *p))
            })
            .count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    Period,
    DuplicateId,
    UnknownSku,
    UnknownPod,
    UnknownStation,
    UnknownOrder,
    EmptyOrder,
    DuplicateLine,
    MaxOrderSize,
    PodLocation,
    CapacityRange,
    QueueLength,
    UnavailableSku,
    StartedOrder,
    Domain,
    Link,
    OneStation,
    Coverage,
    CapacityBalance,
    ForcedPod,
    LineAssignment,
    ActiveOrder,
    ExtraStations,
    Deferral,
    Packing,
    Objective,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub subjects: Vec<u32>,
    pub message: String,
}

impl Violation {
    fn new(kind: ViolationKind, subjects: Vec<u32>, message: impl Into<String>) -> Self {
        Violation { kind, subjects, message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {:?}: {}", self.kind, self.subjects, self.message)
    }
}

pub fn validate_state(state: &WarehouseState) -> Vec<Violation> {
    use ViolationKind::*;
    let mut out = Vec::new();
    if state.period == 0 {
        out.push(Violation::new(Period, vec![], "period starts at 1"));
    }
    let sku_ok = |s: SkuId| s.0 >= 1 && s.0 <= state.num_skus;

    let mut pod_ids = BTreeSet::new();
    for pod in &state.pods {
        if !pod_ids.insert(pod.id) {
            out.push(Violation::new(DuplicateId, vec![pod.id.0], format!("pod {} listed twice", pod.id)));
        }
        for &s in &pod.skus {
            if !sku_ok(s) {
                out.push(Violation::new(UnknownSku, vec![pod.id.0, s.0], format!("pod {} holds unknown {}", pod.id, s)));
            }
        }
    }

    let mut station_ids = BTreeSet::new();
    let mut places: BTreeMap<PodId, usize> = BTreeMap::new();
    for &p in &state.stored {
        *places.entry(p).or_default() += 1;
    }
    for st in &state.stations {
        if !station_ids.insert(st.id) {
            out.push(Violation::new(DuplicateId, vec![st.id.0], format!("station {} listed twice", st.id)));
        }
        if st.free > st.capacity {
            out.push(Violation::new(
                CapacityRange,
                vec![st.id.0],
                format!("station {} free {} exceeds capacity {}", st.id, st.free, st.capacity),
            ));
        }
        if st.at.len() + st.inbound.len() > st.queue_length as usize + 1 {
            out.push(Violation::new(QueueLength, vec![st.id.0], format!("station {} queue overflow", st.id)));
        }
        for p in st.present() {
            *places.entry(p).or_default() += 1;
        }
    }
    for (&p, &n) in &places {
        if !pod_ids.contains(&p) {
            out.push(Violation::new(UnknownPod, vec![p.0], format!("location refers to unknown pod {p}")));
        } else if n > 1 {
            out.push(Violation::new(PodLocation, vec![p.0], format!("pod {p} appears in {n} locations")));
        }
    }
    for &p in &pod_ids {
        if !places.contains_key(&p) {
            out.push(Violation::new(PodLocation, vec![p.0], format!("pod {p} has no location")));
        }
    }

    let max_cap = state.max_capacity();
    let mut order_ids = BTreeSet::new();
    for o in &state.backlog {
        if !order_ids.insert(o.id) {
            out.push(Violation::new(DuplicateId, vec![o.id.0], format!("order {} listed twice", o.id)));
        }
        if o.lines.is_empty() {
            out.push(Violation::new(EmptyOrder, vec![o.id.0], format!("order {} has no lines", o.id)));
        }
        let distinct: BTreeSet<_> = o.lines.iter().collect();
        if distinct.len() != o.lines.len() {
            out.push(Violation::new(DuplicateLine, vec![o.id.0], format!("order {} repeats a SKU", o.id)));
        }
        if o.lines.len() as u32 > max_cap {
            out.push(Violation::new(
                MaxOrderSize,
                vec![o.id.0],
                format!("order {} has {} lines but the largest station holds {}", o.id, o.lines.len(), max_cap),
            ));
        }
        for &s in &o.lines {
            if !sku_ok(s) {
                out.push(Violation::new(UnknownSku, vec![o.id.0, s.0], format!("order {} needs unknown {}", o.id, s)));
            } else if !state.pods.iter().any(|p| p.holds(s)) {
                out.push(Violation::new(UnavailableSku, vec![o.id.0, s.0], format!("{s} is stored in no pod")));
            }
        }
    }
    for &o in &state.started {
        if !order_ids.contains(&o) {
            out.push(Violation::new(StartedOrder, vec![o.0], format!("started order {o} is not in the backlog")));
        }
    }
    out
}

/// Checks every constraint of `variant` directly on a decoded assignment.
pub fn validate_assignment(
    state: &WarehouseState,
    asg: &Assignment,
    variant: Variant,
    params: &ModelParams,
) -> Vec<Violation> {
    use ViolationKind::*;
    let mut out = Vec::new();
    let station = |s: StationId| state.stations.iter().find(|st| st.id == s);
    let order = |o: OrderId| state.backlog.iter().find(|b| b.id == o);

    let x: BTreeSet<(PodId, StationId)> = asg.pods.iter().copied().collect();
    let yos: BTreeSet<(OrderId, StationId)> = asg.orders.iter().copied().collect();
    let yios: BTreeSet<(OrderId, SkuId, StationId)> = asg.lines.iter().copied().collect();
    let yo: BTreeSet<OrderId> = asg.active.iter().copied().collect();
    let yb: BTreeSet<(OrderId, SkuId)> = asg.deferred.iter().copied().collect();
    let yl: BTreeSet<OrderId> = asg.split.iter().copied().collect();
    let extra: BTreeMap<OrderId, u32> = asg.extra_stations.iter().copied().collect();

    // Domain checks: every entry refers to a real object and appears once.
    let dup = |n: usize, m: usize| n != m;
    if dup(x.len(), asg.pods.len())
        || dup(yos.len(), asg.orders.len())
        || dup(yios.len(), asg.lines.len())
        || dup(yo.len(), asg.active.len())
        || dup(yb.len(), asg.deferred.len())
        || dup(yl.len(), asg.split.len())
        || dup(extra.len(), asg.extra_stations.len())
    {
        out.push(Violation::new(Domain, vec![], "a binary variable is listed more than once"));
    }
    for &(p, s) in &x {
        if state.pod(p).is_none() || station(s).is_none() {
            out.push(Violation::new(Domain, vec![p.0, s.0], format!("x[{p}][{s}] refers to unknown ids")));
        }
    }
    for &(o, s) in &yos {
        if order(o).is_none() || station(s).is_none() {
            out.push(Violation::new(Domain, vec![o.0, s.0], format!("y[{o}][{s}] refers to unknown ids")));
        }
    }
    for &(o, i, s) in &yios {
        if !order(o).is_some_and(|b| b.lines.contains(&i)) || station(s).is_none() {
            out.push(Violation::new(Domain, vec![o.0, i.0, s.0], format!("y[{o}][{i}][{s}] is not a backlog line")));
        }
    }
    for &o in yo.iter().chain(yl.iter()).chain(extra.keys()) {
        if order(o).is_none() {
            out.push(Violation::new(UnknownOrder, vec![o.0], format!("{o} is not in the backlog")));
        }
    }
    for &(o, i) in &yb {
        if !order(o).is_some_and(|b| b.lines.contains(&i)) {
            out.push(Violation::new(Domain, vec![o.0, i.0], format!("deferred line ({o},{i}) is not a backlog line")));
        }
    }
    let mut unused: BTreeMap<StationId, u32> = BTreeMap::new();
    for &(s, u) in &asg.unused {
        if unused.insert(s, u).is_some() || station(s).is_none() {
            out.push(Violation::new(Domain, vec![s.0], format!("unused capacity of {s} listed badly")));
        }
    }

    // (5) capacity balance and (10) forced pods, per station.
    for st in &state.stations {
        let assigned = yios.iter().filter(|(_, _, s)| *s == st.id).count() as u32;
        let u = unused.get(&st.id).copied();
        match u {
            Some(u) if assigned + u == st.free => {}
            _ => out.push(Violation::new(
                CapacityBalance,
                vec![st.id.0],
                format!("station {}: {} assigned + {:?} unused != {}", st.id, assigned, u, st.free),
            )),
        }
        for p in st.present() {
            if !x.contains(&(p, st.id)) {
                out.push(Violation::new(ForcedPod, vec![p.0, st.id.0], format!("pod {p} at {} must stay assigned", st.id)));
            }
        }
    }

    // (9) every assigned line is covered by an assigned pod holding the SKU.
    for &(o, i, s) in &yios {
        let covered = x.iter().any(|&(p, t)| t == s && state.pod(p).is_some_and(|pod| pod.holds(i)));
        if !covered {
            out.push(Violation::new(Coverage, vec![o.0, i.0, s.0], format!("line ({o},{i}) at {s} has no pod")));
        }
    }

    for o in &state.backlog {
        let stations_of: BTreeSet<StationId> = yos.iter().filter(|(q, _)| *q == o.id).map(|(_, s)| *s).collect();
        let n_os = stations_of.len() as u32;
        let active = yo.contains(&o.id);
        let e = extra.get(&o.id).copied().unwrap_or(0);
        for s in state.stations.iter().map(|st| st.id) {
            let y = stations_of.contains(&s);
            let n_lines = o.lines.iter().filter(|i| yios.contains(&(o.id, **i, s))).count();
            match variant {
                Variant::Integrated => {
                    // (2) y_os = y_ios for every line
                    if o.lines.iter().any(|i| yios.contains(&(o.id, *i, s)) != y) {
                        out.push(Violation::new(Link, vec![o.id.0, s.0], format!("{} at {s}: lines differ from order", o.id)));
                    }
                }
                _ => {
                    // (2.1) y_os ≥ y_ios, (20) y_o ≥ y_os, (21) Σ_i y_ios ≥ y_os
                    if !y && n_lines > 0 {
                        out.push(Violation::new(Link, vec![o.id.0, s.0], format!("{} has lines at {s} without y_os", o.id)));
                    }
                    if y && !active {
                        out.push(Violation::new(ActiveOrder, vec![o.id.0, s.0], format!("{} at {s} but inactive", o.id)));
                    }
                    if y && n_lines == 0 {
                        out.push(Violation::new(Link, vec![o.id.0, s.0], format!("{} at {s} without lines", o.id)));
                    }
                }
            }
        }
        // (4) at most one station, or (4.2) Σ_s y_os − e_o = y_o
        match variant {
            Variant::Integrated => {
                if n_os > 1 {
                    out.push(Violation::new(OneStation, vec![o.id.0], format!("{} assigned to {} stations", o.id, n_os)));
                }
                if active != (n_os == 1) {
                    out.push(Violation::new(ActiveOrder, vec![o.id.0], format!("{} activity flag disagrees", o.id)));
                }
                if e != 0 {
                    out.push(Violation::new(ExtraStations, vec![o.id.0], format!("{} cannot split", o.id)));
                }
            }
            _ => {
                if n_os != e + active as u32 {
                    out.push(Violation::new(
                        ExtraStations,
                        vec![o.id.0],
                        format!("{}: {} stations, e_o = {}, y_o = {}", o.id, n_os, e, active as u32),
                    ));
                }
            }
        }
        // (19) Σ_s y_ios (+ y^b_io) = y_o for every line
        for &i in &o.lines {
            let n = yios.iter().filter(|(q, j, _)| *q == o.id && *j == i).count() as u32;
            let b = yb.contains(&(o.id, i)) as u32;
            if b == 1 && variant != Variant::SplitTime {
                out.push(Violation::new(Deferral, vec![o.id.0, i.0], format!("({}, {i}) deferred outside split_time", o.id)));
            }
            let want = active as u32;
            let ok = match variant {
                Variant::Integrated => n <= 1 && (n == want),
                _ => n + b == want,
            };
            if !ok {
                out.push(Violation::new(
                    LineAssignment,
                    vec![o.id.0, i.0],
                    format!("line ({}, {i}) assigned {n} times (deferred {b}) with y_o = {want}", o.id),
                ));
            }
        }
    }

    // Packing capacity: y^l_o marks exactly the new split orders, and their count fits.
    if variant.splits() && params.packing_capacity.is_some() {
        let cap = params.packing_capacity.unwrap_or(u32::MAX);
        for o in &state.backlog {
            let deferred_any = o.lines.iter().any(|i| yb.contains(&(o.id, *i)));
            let is_split = extra.get(&o.id).copied().unwrap_or(0) > 0 || deferred_any;
            let marked = yl.contains(&o.id);
            if state.is_started(o.id) {
                if marked {
                    out.push(Violation::new(Packing, vec![o.id.0], format!("{} already counted as split", o.id)));
                }
            } else if marked != is_split {
                out.push(Violation::new(Packing, vec![o.id.0], format!("{} split flag is {marked}", o.id)));
            }
        }
        if state.active_splits as u64 + yl.len() as u64 > cap as u64 {
            out.push(Violation::new(
                Packing,
                vec![],
                format!("{} active + {} new splits exceed packing capacity {cap}", state.active_splits, yl.len()),
            ));
        }
    } else if !yl.is_empty() {
        out.push(Violation::new(Packing, vec![], "split flags set without packing capacity"));
    }

    let u_total: u64 = unused.values().map(|&u| u as u64).sum();
    let objective = x.len() as i64 + params.w_u as i64 * u_total as i64;
    if objective != asg.objective_value {
        out.push(Violation::new(
            Objective,
            vec![],
            format!("objective {} recomputes to {objective}", asg.objective_value),
        ));
    }
    out
}

pub const STATE_SCHEMA: &str = "rmfs.state/1";
pub const ASSIGNMENT_SCHEMA: &str = "rmfs.assignment/1";

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    schema: String,
    #[serde(flatten)]
    body: T,
}

/// Reads a state file and checks it against the model assumptions.
pub fn state_from_json(text: &str) -> crate::Result<WarehouseState> {
    let e: Envelope<WarehouseState> = serde_json::from_str(text)?;
    if e.schema != STATE_SCHEMA {
        return Err(crate::Error::Contract(format!("expected schema {STATE_SCHEMA}, found {}", e.schema)));
    }
    let v = validate_state(&e.body);
    if !v.is_empty() {
        return Err(crate::Error::Invalid(v));
    }
    Ok(e.body)
}

pub fn state_to_json(state: &WarehouseState) -> String {
    serde_json::to_string_pretty(&Envelope { schema: STATE_SCHEMA.into(), body: state }).expect("state serializes")
}

pub fn assignment_to_json(a: &Assignment) -> String {
    serde_json::to_string_pretty(&Envelope { schema: ASSIGNMENT_SCHEMA.into(), body: a }).expect("assignment serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example1;

    fn kinds(v: &[Violation]) -> Vec<ViolationKind> {
        v.iter().map(|v| v.kind).collect()
    }

    fn split_optimum() -> Assignment {
        let (s1, s2) = (StationId(1), StationId(2));
        let mut a = Assignment {
            pods: vec![(PodId(1), s1), (PodId(2), s2)],
            orders: vec![(OrderId(1), s1), (OrderId(1), s2), (OrderId(2), s1), (OrderId(2), s2)],
            lines: vec![
                (OrderId(1), SkuId(1), s1),
                (OrderId(1), SkuId(2), s2),
                (OrderId(2), SkuId(1), s1),
                (OrderId(2), SkuId(2), s2),
            ],
            unused: vec![(s1, 0), (s2, 0)],
            active: vec![OrderId(1), OrderId(2)],
            extra_stations: vec![(OrderId(1), 1), (OrderId(2), 1)],
            deferred: vec![],
            split: vec![],
            objective_value: 2,
        };
        a.normalize();
        a
    }

    #[test]
    fn empty_warehouse_is_valid() {
        let st = WarehouseState {
            period: 1,
            num_skus: 0,
            pods: vec![],
            stored: vec![],
            stations: vec![],
            backlog: vec![],
            started: vec![],
            active_splits: 0,
            pod_distance: vec![],
        };
        assert!(validate_state(&st).is_empty());
    }

    #[test]
    fn oversized_order_is_flagged() {
        let mut st = example1();
        st.num_skus = 16;
        st.pods[0] = Pod::new(1, 1..=16);
        st.stations = vec![StationState::new(1, 15), StationState::new(2, 15)];
        st.backlog = vec![Order::new(1, 1..=16)];
        assert_eq!(kinds(&validate_state(&st)), vec![ViolationKind::MaxOrderSize]);
    }

    #[test]
    fn pod_in_two_places_is_flagged() {
        let mut st = example1();
        st.stations[0].at.push(PodId(1));
        assert_eq!(kinds(&validate_state(&st)), vec![ViolationKind::PodLocation]);
    }

    #[test]
    fn zero_assignment_with_full_slack() {
        let st = example1();
        let a = Assignment {
            unused: vec![(StationId(1), 2), (StationId(2), 2)],
            objective_value: 8,
            ..Default::default()
        };
        for v in Variant::ALL {
            assert!(validate_assignment(&st, &a, v, &ModelParams::default()).is_empty(), "{v}");
        }
    }

    #[test]
    fn split_optimum_accepted_only_by_split_models() {
        let st = example1();
        let a = split_optimum();
        let p = ModelParams::default();
        assert!(validate_assignment(&st, &a, Variant::SplitStations, &p).is_empty());
        assert!(validate_assignment(&st, &a, Variant::SplitTime, &p).is_empty());
        let v = kinds(&validate_assignment(&st, &a, Variant::Integrated, &p));
        assert!(v.contains(&ViolationKind::OneStation));
    }

    #[test]
    fn missing_pod_breaks_coverage() {
        let st = example1();
        let mut a = split_optimum();
        a.pods.pop();
        a.objective_value = 1;
        let v = kinds(&validate_assignment(&st, &a, Variant::SplitStations, &ModelParams::default()));
        assert_eq!(v, vec![ViolationKind::Coverage, ViolationKind::Coverage]);
    }

    #[test]
    fn forced_pod_must_stay() {
        let mut st = example1();
        st.stored.retain(|p| *p != PodId(1));
        st.stations[0].at.push(PodId(1));
        let a = Assignment {
            unused: vec![(StationId(1), 2), (StationId(2), 2)],
            objective_value: 8,
            ..Default::default()
        };
        let v = kinds(&validate_assignment(&st, &a, Variant::Integrated, &ModelParams::default()));
        assert_eq!(v, vec![ViolationKind::ForcedPod]);
    }

    #[test]
    fn variant_round_trips_through_text() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!("both".parse::<Variant>().is_err());
    }

    #[test]
    fn state_file_round_trip() {
        let st = crate::fixtures::example2();
        let text = state_to_json(&st);
        assert!(text.contains(STATE_SCHEMA));
        assert_eq!(state_from_json(&text).unwrap(), st);
        assert!(matches!(state_from_json(&text.replace("rmfs.state/1", "rmfs.state/9")), Err(crate::Error::Contract(_))));
    }
}
