use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, VecDeque};
use std::time::Instant;

use rand::SeedableRng;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use super::{ExtractionRequest, OrderTimes, PeriodStat, Policy, Ratio, SimOptions, SimReport, TraceRow};
use crate::baseline::sequential_assignment;
use crate::instance::Layout;
use crate::model::{
    Assignment, ModelParams, Order, OrderId, Pod, SkuId, StationId, StationState, Variant, WarehouseState,
    validate_assignment, validate_state,
};
use crate::path::{CollisionAudit, GoalKind, Kinematics, PathRequest, PlanError, Planner, RobotId, Tick, travel_time};
use crate::prefilter::prefilter;
use crate::solver::solve_state;
use crate::{Error, Result};

/// Ties at equal times resolve in this order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    PickComplete,
    RobotArrive,
    PodStored,
    PeriodCheck,
    TaskAssigned,
}

impl Kind {
    fn label(self) -> &'static str {
        match self {
            Kind::PickComplete => "pick-complete",
            Kind::RobotArrive => "robot-arrive",
            Kind::PodStored => "pod-stored",
            Kind::PeriodCheck => "period-check",
            Kind::TaskAssigned => "task-assigned",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Event {
    /// Bit pattern of a non-negative f64, which sorts like the number.
    time: u64,
    kind: Kind,
    entity: u32,
    seq: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Job {
    Idle,
    Fetch { pod: usize },
    Deliver { pod: usize, station: usize },
    Docked { pod: usize },
    Transfer { pod: usize, station: usize },
    Store { pod: usize, cell: u32 },
}

struct Robot {
    cell: u32,
    on_grid: bool,
    job: Job,
    retries: u32,
}

struct PodRt {
    cell: Option<u32>,
    /// Stations still to visit; the front is where the pod is or is heading.
    route: VecDeque<usize>,
    robot: Option<usize>,
}

struct OrderRt {
    id: OrderId,
    received: f64,
    residual: Vec<SkuId>,
    open: u32,
    touched: bool,
    split: bool,
    stations: BTreeSet<usize>,
    assigned: Option<f64>,
    completed: Option<f64>,
}

#[derive(Default)]
struct Part {
    held: u32,
    open: u32,
}

struct Station {
    id: StationId,
    capacity: u32,
    free: u32,
    queue_length: u32,
    queue: VecDeque<usize>,
    en_route: u32,
    requests: Vec<usize>,
    picking: Option<usize>,
    parts: BTreeMap<usize, Part>,
    entry: u32,
    exit: u32,
}

pub(super) struct World<'a> {
    policy: Policy,
    params: ModelParams,
    options: &'a SimOptions,
    kin: Kinematics,
    planner: Planner,
    audit: CollisionAudit,
    num_skus: u32,
    pod_defs: Vec<Pod>,
    pods: Vec<PodRt>,
    robots: Vec<Robot>,
    stations: Vec<Station>,
    orders: Vec<OrderRt>,
    order_index: HashMap<OrderId, usize>,
    requests: Vec<ExtractionRequest>,
    free_cells: BTreeSet<u32>,
    /// Per cell: loaded-robot distance to the closest station entry.
    to_station: Vec<u32>,
    tasks: VecDeque<usize>,
    events: BinaryHeap<Reverse<Event>>,
    seq: u64,
    now: f64,
    period: u32,
    visits: u64,
    picks: u64,
    distance: f64,
    periods: Vec<PeriodStat>,
    trace: Vec<TraceRow>,
    max_queue: u32,
    max_splits: u32,
}

fn time_key(t: f64) -> u64 {
    if t <= 0.0 { 0 } else { t.to_bits() }
}

impl<'a> World<'a> {
    pub(super) fn new(
        state: &WarehouseState,
        layout: &Layout,
        policy: Policy,
        params: &ModelParams,
        seed: u64,
        options: &'a SimOptions,
    ) -> Result<Self> {
        let v = validate_state(state);
        if !v.is_empty() {
            return Err(Error::Invalid(v));
        }
        if layout.stations.len() != state.stations.len() {
            return Err(Error::Contract(format!(
                "layout has {} stations, state has {}",
                layout.stations.len(),
                state.stations.len()
            )));
        }
        let grid = crate::path::Grid::from_layout(layout)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cells = grid.storage_cells();
        cells.shuffle(&mut rng);

        let pod_index: HashMap<_, _> = state.pods.iter().enumerate().map(|(i, p)| (p.id, i)).collect();
        let mut pods: Vec<PodRt> = state.pods.iter().map(|_| PodRt { cell: None, route: VecDeque::new(), robot: None }).collect();
        let mut stations = Vec::new();
        let mut docked = Vec::new();
        let mut tasks = VecDeque::new();
        for (k, st) in state.stations.iter().enumerate() {
            let sc = grid.stations[k];
            for p in &st.at {
                let i = pod_index[p];
                pods[i].route.push_back(k);
                docked.push((i, k));
            }
            for p in &st.inbound {
                let i = pod_index[p];
                pods[i].route.push_back(k);
                tasks.push_back(i);
            }
            stations.push(Station {
                id: st.id,
                capacity: st.capacity,
                free: st.free,
                queue_length: st.queue_length,
                queue: st.at.iter().map(|p| pod_index[p]).collect(),
                en_route: 0,
                requests: Vec::new(),
                picking: None,
                parts: BTreeMap::new(),
                entry: sc.entry,
                exit: sc.exit,
            });
        }
        let shelved: Vec<usize> = (0..pods.len()).filter(|&i| !docked.iter().any(|(d, _)| *d == i)).collect();
        if shelved.len() > cells.len() {
            return Err(Error::Contract(format!("{} storage cells for {} pods", cells.len(), shelved.len())));
        }
        for (n, &i) in shelved.iter().enumerate() {
            pods[i].cell = Some(cells[n]);
        }
        let free_cells: BTreeSet<u32> = cells[shelved.len()..].iter().copied().collect();

        let mut planner = Planner::new(grid);
        let mut to_station = vec![u32::MAX; planner.grid.kinds.len()];
        for s in &stations {
            for (best, d) in to_station.iter_mut().zip(planner.distances(s.entry, true)) {
                *best = (*best).min(*d);
            }
        }
        let mut audit = CollisionAudit::default();
        let n_robots = layout.robots as usize;
        if docked.len() > n_robots {
            return Err(Error::Contract(format!("{} docked pods but only {n_robots} robots", docked.len())));
        }
        let mut robots = Vec::new();
        for &(i, k) in &docked {
            pods[i].robot = Some(robots.len());
            robots.push(Robot { cell: stations[k].exit, on_grid: false, job: Job::Docked { pod: i }, retries: 0 });
        }
        let mut under = shelved.clone();
        under.shuffle(&mut rng);
        if n_robots - docked.len() > under.len() {
            return Err(Error::Contract("idle robots park under pods, so there must be at least as many pods".into()));
        }
        for &i in &under[..n_robots - docked.len()] {
            let c = pods[i].cell.expect("shelved pod has a cell");
            let r = robots.len();
            planner.table.hold(r as RobotId, c, 0);
            audit.park(r as RobotId, c, 0);
            robots.push(Robot { cell: c, on_grid: true, job: Job::Idle, retries: 0 });
        }

        let mut orders = Vec::new();
        let mut order_index = HashMap::new();
        for o in &state.backlog {
            order_index.insert(o.id, orders.len());
            orders.push(OrderRt {
                id: o.id,
                received: o.arrival_time,
                residual: o.lines.clone(),
                open: 0,
                touched: state.is_started(o.id),
                split: state.is_started(o.id),
                stations: BTreeSet::new(),
                assigned: None,
                completed: None,
            });
        }
        let mut requests = Vec::new();
        for (k, st) in state.stations.iter().enumerate() {
            for &(o, i) in &st.open_requests {
                let oi = *order_index.entry(o).or_insert_with(|| {
                    orders.push(OrderRt {
                        id: o,
                        received: 0.0,
                        residual: vec![],
                        open: 0,
                        touched: true,
                        split: false,
                        stations: BTreeSet::new(),
                        assigned: Some(0.0),
                        completed: None,
                    });
                    orders.len() - 1
                });
                orders[oi].open += 1;
                orders[oi].stations.insert(k);
                let part = stations[k].parts.entry(oi).or_default();
                part.held += 1;
                part.open += 1;
                stations[k].requests.push(requests.len());
                requests.push(ExtractionRequest {
                    order: o,
                    sku: i,
                    station: st.id,
                    pod: None,
                    created_at: 0.0,
                    completed_at: None,
                });
            }
        }

        let max_queue = stations.iter().map(|s| s.queue.len() as u32).max().unwrap_or(0);
        Ok(World {
            policy,
            params: *params,
            options,
            kin: layout.kinematics.clone(),
            planner,
            audit,
            num_skus: state.num_skus,
            pod_defs: state.pods.clone(),
            pods,
            robots,
            stations,
            orders,
            order_index,
            requests,
            free_cells,
            to_station,
            tasks,
            events: BinaryHeap::new(),
            seq: 0,
            now: 0.0,
            period: 0,
            visits: docked.len() as u64,
            picks: 0,
            distance: 0.0,
            periods: Vec::new(),
            trace: Vec::new(),
            max_queue,
            max_splits: state.active_splits,
        })
    }

    pub(super) fn run(mut self) -> Result<SimReport> {
        let docked: Vec<String> = self
            .stations
            .iter()
            .flat_map(|s| s.queue.iter().map(move |&p| (p, s.id)))
            .map(|(p, s)| format!("pod {} docked at station {s}", self.pod_defs[p].id))
            .collect();
        for d in docked {
            self.log(Kind::RobotArrive, 0, d);
        }
        self.schedule(0.0, Kind::PeriodCheck, 0);
        while let Some(Reverse(ev)) = self.events.pop() {
            self.now = f64::from_bits(ev.time);
            if self.now > self.options.time_limit {
                return Err(Error::Sim(format!("no completion within {} simulated seconds", self.options.time_limit)));
            }
            let e = ev.entity as usize;
            match ev.kind {
                Kind::PickComplete => self.pick_complete(e)?,
                Kind::RobotArrive => self.robot_arrive(e)?,
                Kind::PodStored => self.pod_stored(e)?,
                Kind::TaskAssigned => self.start_leg(e)?,
                Kind::PeriodCheck => {
                    self.advance_period()?;
                    self.after_decision()?;
                }
            }
            if self.events.is_empty() && self.open_orders() > 0 && self.advance_period()? {
                self.after_decision()?;
            }
        }
        let open = self.open_orders();
        if open > 0 {
            return Err(Error::Sim(format!("stalled at {:.1} s with {open} orders unfinished", self.now)));
        }
        self.report()
    }

    fn open_orders(&self) -> usize {
        self.orders.iter().filter(|o| o.completed.is_none()).count()
    }

    fn tick_at(&self, t: f64) -> Tick {
        (t / self.kin.tick() - 1e-9).ceil().max(0.0) as Tick
    }

    fn schedule(&mut self, time: f64, kind: Kind, entity: usize) {
        self.seq += 1;
        self.events.push(Reverse(Event { time: time_key(time), kind, entity: entity as u32, seq: self.seq }));
    }

    fn log(&mut self, kind: Kind, entity: u32, detail: String) {
        if self.options.trace {
            self.trace.push(TraceRow { time: self.now, kind: kind.label().into(), entity, detail });
        }
    }

    fn snapshot(&self) -> WarehouseState {
        let stations = self
            .stations
            .iter()
            .enumerate()
            .map(|(k, s)| StationState {
                id: s.id,
                capacity: s.capacity,
                free: s.free,
                queue_length: s.queue_length,
                at: s.queue.iter().map(|&p| self.pod_defs[p].id).collect(),
                inbound: (0..self.pods.len())
                    .filter(|&p| self.pods[p].route.front() == Some(&k) && !s.queue.contains(&p))
                    .map(|p| self.pod_defs[p].id)
                    .collect(),
                open_requests: s.requests.iter().map(|&r| (self.requests[r].order, self.requests[r].sku)).collect(),
            })
            .collect();
        let backlog: Vec<&OrderRt> = self.orders.iter().filter(|o| !o.residual.is_empty()).collect();
        WarehouseState {
            period: self.period,
            num_skus: self.num_skus,
            pods: self.pod_defs.clone(),
            stored: (0..self.pods.len()).filter(|&p| self.pods[p].route.is_empty()).map(|p| self.pod_defs[p].id).collect(),
            stations,
            backlog: backlog
                .iter()
                .map(|o| Order { id: o.id, lines: o.residual.clone(), arrival_time: o.received })
                .collect(),
            started: backlog.iter().filter(|o| o.touched).map(|o| o.id).collect(),
            active_splits: self.active_splits(),
            pod_distance: (0..self.pods.len())
                .filter(|&p| self.pods[p].route.is_empty())
                .filter_map(|p| self.pods[p].cell.map(|c| (self.pod_defs[p].id, self.to_station[c as usize])))
                .collect(),
        }
    }

    fn active_splits(&self) -> u32 {
        self.orders.iter().filter(|o| o.split && o.completed.is_none()).count() as u32
    }

    /// Re-plans the period when a station can take the smallest waiting order.
    fn advance_period(&mut self) -> Result<bool> {
        let Some(smallest) = self.orders.iter().filter(|o| !o.residual.is_empty()).map(|o| o.residual.len() as u32).min()
        else {
            return Ok(false);
        };
        if !self.stations.iter().any(|s| s.free >= smallest) {
            return Ok(false);
        }
        self.period += 1;
        let snap = self.snapshot();
        let (view, asg, stat) = self.decide(&snap)?;
        let variant = self.policy.variant().unwrap_or(Variant::Integrated);
        let v = validate_assignment(&view, &asg, variant, &self.params);
        if !v.is_empty() {
            return Err(Error::Invalid(v));
        }
        self.log(
            Kind::PeriodCheck,
            self.period,
            format!("{} lines and {} pods assigned, objective {}", asg.lines.len(), asg.pods.len(), asg.objective_value),
        );
        self.apply(&asg)?;
        self.periods.push(PeriodStat { new_visits: asg.new_visits(&view), ..stat });
        Ok(true)
    }

    fn decide(&self, snap: &WarehouseState) -> Result<(WarehouseState, Assignment, PeriodStat)> {
        let mut stat = PeriodStat {
            period: self.period,
            time: self.now,
            orders: snap.backlog.len(),
            lines_assigned: 0,
            new_visits: 0,
            objective: 0,
            status: None,
            nodes: 0,
            wall: Default::default(),
        };
        let Some(variant) = self.policy.variant() else {
            let start = Instant::now();
            let asg = sequential_assignment(snap, self.params.w_u);
            stat.wall = start.elapsed();
            stat.lines_assigned = asg.lines.len();
            stat.objective = asg.objective_value;
            return Ok((snap.clone(), asg, stat));
        };
        let view = match self.options.prefilter {
            Some(n) if n < snap.backlog.len() => {
                let fits = |o: &Order| {
                    let len = o.lines.len() as u32;
                    match variant {
                        Variant::Integrated => snap.stations.iter().any(|s| s.free >= len),
                        Variant::SplitStations => snap.total_free() >= len,
                        Variant::SplitTime => true,
                    }
                };
                let candidates: Vec<OrderId> = snap.backlog.iter().filter(|o| fits(o)).map(|o| o.id).collect();
                snap.with_backlog(&prefilter(&snap.with_backlog(&candidates), n))
            }
            _ => snap.clone(),
        };
        stat.orders = view.backlog.len();
        let (asg, sol) = solve_state(&view, variant, &self.params, &self.options.solver)?;
        stat.lines_assigned = asg.lines.len();
        stat.objective = asg.objective_value;
        stat.status = Some(sol.status);
        stat.nodes = sol.nodes;
        stat.wall = sol.wall_time;
        Ok((view, asg, stat))
    }

    fn station_index(&self, id: StationId) -> Result<usize> {
        self.stations.iter().position(|s| s.id == id).ok_or_else(|| Error::Contract(format!("unknown station {id}")))
    }

    fn apply(&mut self, asg: &Assignment) -> Result<()> {
        let mut touched = BTreeSet::new();
        for &(o, i, s) in &asg.lines {
            let k = self.station_index(s)?;
            let oi = self.order_index[&o];
            let order = &mut self.orders[oi];
            let Some(pos) = order.residual.iter().position(|x| *x == i) else {
                return Err(Error::Contract(format!("{o} has no open line {i}")));
            };
            order.residual.remove(pos);
            order.open += 1;
            order.stations.insert(k);
            touched.insert(oi);
            let st = &mut self.stations[k];
            if st.free == 0 {
                return Err(Error::Contract(format!("station {s} over capacity")));
            }
            st.free -= 1;
            let part = st.parts.entry(oi).or_default();
            part.held += 1;
            part.open += 1;
            st.requests.push(self.requests.len());
            self.requests.push(ExtractionRequest {
                order: o,
                sku: i,
                station: s,
                pod: None,
                created_at: self.now,
                completed_at: None,
            });
        }
        for oi in touched {
            let order = &mut self.orders[oi];
            if order.stations.len() > 1 || !order.residual.is_empty() || asg.split.contains(&order.id) {
                order.split = true;
            }
            order.touched = true;
            if order.residual.is_empty() && order.assigned.is_none() {
                order.assigned = Some(self.now);
            }
        }
        self.max_splits = self.max_splits.max(self.active_splits());
        for &(p, s) in &asg.pods {
            let k = self.station_index(s)?;
            let pi = self.pod_defs.iter().position(|d| d.id == p).expect("assigned pod exists");
            let pod = &mut self.pods[pi];
            if pod.route.contains(&k) {
                continue;
            }
            pod.route.push_back(k);
            if pod.route.len() == 1 && pod.robot.is_none() {
                self.tasks.push_back(pi);
            }
        }
        Ok(())
    }

    fn after_decision(&mut self) -> Result<()> {
        for k in 0..self.stations.len() {
            self.kick(k)?;
        }
        self.dispatch()
    }

    fn occupancy(&self, k: usize) -> u32 {
        self.stations[k].queue.len() as u32 + self.stations[k].en_route
    }

    /// Starts the next pick at an idle station, sending away head pods that have nothing left to give.
    fn kick(&mut self, k: usize) -> Result<()> {
        if self.stations[k].picking.is_some() {
            return Ok(());
        }
        while let Some(&p) = self.stations[k].queue.front() {
            let pod = &self.pod_defs[p];
            let next = self.stations[k].requests.iter().copied().find(|&r| pod.holds(self.requests[r].sku));
            if let Some(r) = next {
                self.stations[k].picking = Some(r);
                self.schedule(self.now + self.kin.pick, Kind::PickComplete, k);
                return Ok(());
            }
            self.stations[k].queue.pop_front();
            self.depart(k, p)?;
        }
        Ok(())
    }

    fn pick_complete(&mut self, k: usize) -> Result<()> {
        let r = self.stations[k].picking.take().ok_or_else(|| Error::Sim("pick without a request".into()))?;
        let p = *self.stations[k].queue.front().ok_or_else(|| Error::Sim("pick without a pod".into()))?;
        self.requests[r].completed_at = Some(self.now);
        self.requests[r].pod = Some(self.pod_defs[p].id);
        self.stations[k].requests.retain(|&x| x != r);
        self.picks += 1;
        let oi = self.order_index[&self.requests[r].order];
        let st = &mut self.stations[k];
        let part = st.parts.get_mut(&oi).expect("open part");
        part.open -= 1;
        if part.open == 0 {
            st.free += part.held;
            st.parts.remove(&oi);
        }
        let order = &mut self.orders[oi];
        order.open -= 1;
        if order.open == 0 && order.residual.is_empty() {
            order.completed = Some(self.now);
        }
        let detail = format!("{} {} from pod {}", self.requests[r].order, self.requests[r].sku, self.pod_defs[p].id);
        self.log(Kind::PickComplete, self.stations[k].id.0, detail);
        if self.advance_period()? {
            self.after_decision()
        } else {
            self.kick(k)
        }
    }

    fn depart(&mut self, k: usize, p: usize) -> Result<()> {
        let r = self.pods[p].robot.ok_or_else(|| Error::Sim("docked pod without a robot".into()))?;
        self.pods[p].route.pop_front();
        let next = self.pods[p].route.front().copied();
        self.robots[r].job = match next {
            Some(n) if self.occupancy(n) < self.stations[n].queue_length => {
                self.stations[n].en_route += 1;
                Job::Transfer { pod: p, station: n }
            }
            _ => {
                let cell = self.claim_cell(self.stations[k].exit)?;
                Job::Store { pod: p, cell }
            }
        };
        self.start_leg(r)
    }

    /// Nearest free storage cell to `from`, ties by cell index.
    fn claim_cell(&mut self, from: u32) -> Result<u32> {
        let grid = &self.planner.grid;
        let c = self
            .free_cells
            .iter()
            .copied()
            .min_by_key(|&c| (grid.manhattan(from, c), c))
            .ok_or_else(|| Error::Contract("no free storage location".into()))?;
        self.free_cells.remove(&c);
        Ok(c)
    }

    fn dispatch(&mut self) -> Result<()> {
        let mut i = 0;
        while i < self.tasks.len() {
            let p = self.tasks[i];
            let k = self.pods[p].route[0];
            if self.occupancy(k) >= self.stations[k].queue_length {
                i += 1;
                continue;
            }
            let cell = self.pods[p].cell.expect("task pod is stored");
            let grid = &self.planner.grid;
            let Some(r) = (0..self.robots.len())
                .filter(|&r| self.robots[r].job == Job::Idle)
                .min_by_key(|&r| (grid.manhattan(self.robots[r].cell, cell), r))
            else {
                break;
            };
            self.tasks.remove(i);
            self.robots[r].job = Job::Fetch { pod: p };
            self.pods[p].robot = Some(r);
            self.stations[k].en_route += 1;
            self.log(Kind::TaskAssigned, r as u32, format!("fetch pod {} for station {}", self.pod_defs[p].id, self.stations[k].id));
            self.start_leg(r)?;
        }
        Ok(())
    }

    /// Plans and reserves the robot's next trip; retries one tick later when blocked.
    fn start_leg(&mut self, r: usize) -> Result<()> {
        let t0 = self.tick_at(self.now);
        let robot = &self.robots[r];
        let (to, loaded, goal, lifts) = match robot.job {
            Job::Fetch { pod } => (self.pods[pod].cell.expect("fetched pod is stored"), false, GoalKind::Park, 0),
            Job::Deliver { station, .. } => (self.stations[station].entry, true, GoalKind::Station, 1),
            Job::Transfer { station, .. } => (self.stations[station].entry, true, GoalKind::Station, 0),
            Job::Store { cell, .. } => (cell, true, GoalKind::Park, 1),
            Job::Idle | Job::Docked { .. } => return Err(Error::Contract(format!("robot {r} has no trip"))),
        };
        let from = robot.cell;
        let blocked = !robot.on_grid && self.planner.table.owner(from, t0).is_some();
        let req = PathRequest { robot: r as RobotId, from, to, start: t0, loaded, goal, window: self.options.window };
        let path = if blocked { Err(PlanError::DeadlockRetry) } else { self.planner.plan(&req) };
        let path = match path {
            Ok(path) => path,
            Err(PlanError::DeadlockRetry) => {
                self.robots[r].retries += 1;
                if self.robots[r].retries > 20_000 {
                    return Err(Error::Sim(format!("robot {r} cannot leave cell {from}")));
                }
                let dt = self.kin.tick();
                self.schedule(t0 as f64 * dt + dt, Kind::TaskAssigned, r);
                return Ok(());
            }
            Err(e) => return Err(Error::Sim(format!("robot {r}: {e}"))),
        };
        let rid = r as RobotId;
        if self.robots[r].on_grid {
            self.planner.table.release(rid, t0);
            self.audit.leave(rid, t0);
        }
        self.planner.table.reserve(rid, &path);
        self.audit.path(rid, &path);
        self.planner.table.prune(t0.saturating_sub(1));
        self.distance += path.distance(&self.kin);
        let end = *path.cells.last().expect("paths are non-empty");
        let reached = end == to;
        let arrive = path.arrival();
        let drive = travel_time(&self.planner.grid, &path.cells, &self.kin, if reached { lifts } else { 0 });
        let dt = self.kin.tick();
        let at = (arrive as f64 * dt).max(t0 as f64 * dt + drive);
        let robot = &mut self.robots[r];
        robot.retries = 0;
        robot.cell = end;
        if let Job::Deliver { pod, .. } = robot.job
            && let Some(c) = self.pods[pod].cell.take() {
                self.free_cells.insert(c);
            }
        if reached && goal == GoalKind::Station {
            robot.on_grid = false;
            self.schedule(at, Kind::RobotArrive, r);
            return Ok(());
        }
        robot.on_grid = true;
        self.planner.table.hold(rid, end, arrive);
        self.audit.park(rid, end, arrive + 1);
        let kind = match (reached, robot.job) {
            (false, _) => Kind::TaskAssigned,
            (true, Job::Store { .. }) => Kind::PodStored,
            (true, _) => Kind::RobotArrive,
        };
        self.schedule(at, kind, r);
        Ok(())
    }

    fn robot_arrive(&mut self, r: usize) -> Result<()> {
        match self.robots[r].job {
            Job::Fetch { pod } => {
                let station = self.pods[pod].route[0];
                self.robots[r].job = Job::Deliver { pod, station };
                self.start_leg(r)
            }
            Job::Deliver { pod, station } | Job::Transfer { pod, station } => {
                let st = &mut self.stations[station];
                st.en_route -= 1;
                st.queue.push_back(pod);
                self.max_queue = self.max_queue.max(st.queue.len() as u32);
                self.visits += 1;
                self.robots[r].job = Job::Docked { pod };
                self.robots[r].cell = self.stations[station].exit;
                let detail = format!("pod {} docks at station {}", self.pod_defs[pod].id, self.stations[station].id);
                self.log(Kind::RobotArrive, r as u32, detail);
                self.kick(station)
            }
            other => Err(Error::Contract(format!("robot {r} arrived while {other:?}"))),
        }
    }

    fn pod_stored(&mut self, r: usize) -> Result<()> {
        let Job::Store { pod, cell } = self.robots[r].job else {
            return Err(Error::Contract(format!("robot {r} stored without a pod")));
        };
        self.pods[pod].cell = Some(cell);
        self.pods[pod].robot = None;
        self.robots[r].job = Job::Idle;
        self.log(Kind::PodStored, r as u32, format!("pod {} at cell {cell}", self.pod_defs[pod].id));
        if !self.pods[pod].route.is_empty() {
            self.tasks.push_back(pod);
        }
        self.dispatch()
    }

    fn report(mut self) -> Result<SimReport> {
        let end = self.tick_at(self.now) + 1;
        let collisions = self.audit.verify(end);
        let orders = self
            .orders
            .iter()
            .map(|o| OrderTimes {
                order: o.id,
                received: o.received,
                assigned: o.assigned.unwrap_or(o.received),
                completed: o.completed.unwrap_or(f64::NAN),
            })
            .collect();
        Ok(SimReport {
            policy: self.policy,
            pod_station_visits: self.visits,
            completed_orders: self.orders.iter().filter(|o| o.completed.is_some()).count() as u64,
            total_picks: self.picks,
            robot_distance: self.distance,
            pile_on: Ratio::new(self.picks, self.visits),
            orders,
            requests: self.requests,
            periods: self.periods,
            sim_seconds: self.now,
            collisions,
            max_queue: self.max_queue,
            max_active_splits: self.max_splits,
            trace: self.trace,
        })
    }
}
