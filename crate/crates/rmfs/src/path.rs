//! Grid, robot kinematics and cooperative space-time A* over a shared reservation table.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::instance::Layout;
use crate::{Error, Result};

pub type RobotId = u32;
pub type Tick = u64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Kinematics {
    /// m/s²
    pub accel: f64,
    /// m/s
    pub vmax: f64,
    /// Seconds to turn around (180°); a quarter turn takes half.
    pub full_turn: f64,
    /// Seconds per pod lift or store.
    pub lift: f64,
    /// Seconds per picked unit.
    pub pick: f64,
    /// Tote-side seconds per unit; does not block the picker.
    pub handling: f64,
    /// Meters per cell.
    pub cell_edge: f64,
}

impl Default for Kinematics {
    fn default() -> Self {
        Kinematics { accel: 1.0, vmax: 1.5, full_turn: 2.5, lift: 2.2, pick: 7.0, handling: 13.0, cell_edge: 1.0 }
    }
}

impl Kinematics {
    /// Length of one reservation tick: one cell at top speed.
    pub fn tick(&self) -> f64 {
        self.cell_edge / self.vmax
    }

    /// Rest-to-rest time over a straight run of `d` meters.
    pub fn straight(&self, d: f64) -> f64 {
        if d <= 0.0 {
            return 0.0;
        }
        if d >= self.vmax * self.vmax / self.accel {
            d / self.vmax + self.vmax / self.accel
        } else {
            2.0 * (d / self.accel).sqrt()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellKind {
    Aisle,
    Storage,
    Blocked,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StationCells {
    pub entry: u32,
    pub exit: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub width: u32,
    pub height: u32,
    pub kinds: Vec<CellKind>,
    pub stations: Vec<StationCells>,
}

impl Grid {
    /// Blocks of storage cells separated by one-cell aisles; stations sit on the west aisle.
    pub fn from_layout(layout: &Layout) -> Result<Grid> {
        let (w, h) = (layout.width(), layout.height());
        let mut kinds = vec![CellKind::Aisle; (w * h) as usize];
        for by in 0..layout.block_rows {
            for bx in 0..layout.block_cols {
                for dy in 0..layout.block_height {
                    for dx in 0..layout.block_width {
                        let x = 1 + bx * (layout.block_width + 1) + dx;
                        let y = 1 + by * (layout.block_height + 1) + dy;
                        kinds[(y * w + x) as usize] = CellKind::Storage;
                    }
                }
            }
        }
        let n = layout.stations.len() as u32;
        if n == 0 || 2 * n > h {
            return Err(Error::Contract(format!("{n} stations do not fit on a west aisle of height {h}")));
        }
        let mut stations = Vec::new();
        let mut prev: Option<u32> = None;
        for k in 0..n {
            let mut y = ((k + 1) * h / (n + 1)).saturating_sub(1).min(h - 2);
            if let Some(p) = prev {
                y = y.max(p + 2);
            }
            if y + 1 >= h {
                return Err(Error::Contract("stations do not fit on the west aisle".into()));
            }
            stations.push(StationCells { entry: y * w, exit: (y + 1) * w });
            prev = Some(y);
        }
        Ok(Grid { width: w, height: h, kinds, stations })
    }

    /// Test grids: `.` aisle, `s` storage, `#` blocked; one string per row.
    pub fn from_rows(rows: &[&str]) -> Grid {
        let height = rows.len() as u32;
        let width = rows.first().map_or(0, |r| r.len()) as u32;
        let kinds = rows
            .iter()
            .flat_map(|r| {
                r.chars().map(|c| match c {
                    's' => CellKind::Storage,
                    '#' => CellKind::Blocked,
                    _ => CellKind::Aisle,
                })
            })
            .collect();
        Grid { width, height, kinds, stations: Vec::new() }
    }

    pub fn cell(&self, x: u32, y: u32) -> u32 {
        y * self.width + x
    }

    pub fn xy(&self, c: u32) -> (u32, u32) {
        (c % self.width, c / self.width)
    }

    pub fn manhattan(&self, a: u32, b: u32) -> u32 {
        let ((ax, ay), (bx, by)) = (self.xy(a), self.xy(b));
        ax.abs_diff(bx) + ay.abs_diff(by)
    }

    pub fn neighbors(&self, c: u32) -> impl Iterator<Item = u32> + '_ {
        let (x, y) = self.xy(c);
        let mut out = [None; 4];
        if x > 0 {
            out[0] = Some(c - 1);
        }
        if x + 1 < self.width {
            out[1] = Some(c + 1);
        }
        if y > 0 {
            out[2] = Some(c - self.width);
        }
        if y + 1 < self.height {
            out[3] = Some(c + self.width);
        }
        out.into_iter().flatten().filter(|&n| self.kinds[n as usize] != CellKind::Blocked)
    }

    pub fn storage_cells(&self) -> Vec<u32> {
        (0..self.kinds.len() as u32).filter(|&c| self.kinds[c as usize] == CellKind::Storage).collect()
    }

    /// Loaded robots keep to aisles; empty robots may pass under stored pods.
    fn passable(&self, c: u32, loaded: bool) -> bool {
        match self.kinds[c as usize] {
            CellKind::Aisle => true,
            CellKind::Storage => !loaded,
            CellKind::Blocked => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Hold {
    robot: RobotId,
    from: Tick,
    until: Option<Tick>,
}

impl Hold {
    fn covers(&self, t: Tick) -> bool {
        t >= self.from && self.until.is_none_or(|u| t <= u)
    }
}

/// Space-time occupancy shared by all robots.
#[derive(Clone, Debug, Default)]
pub struct ReservationTable {
    cells: HashMap<(u32, Tick), RobotId>,
    edges: HashMap<(u32, u32, Tick), RobotId>,
    holds: HashMap<u32, Vec<Hold>>,
    /// Latest tick with a point reservation per cell.
    last: HashMap<u32, Tick>,
}

impl ReservationTable {
    pub fn owner(&self, c: u32, t: Tick) -> Option<RobotId> {
        if let Some(&r) = self.cells.get(&(c, t)) {
            return Some(r);
        }
        self.holds.get(&c)?.iter().find(|h| h.covers(t)).map(|h| h.robot)
    }

    fn free_for(&self, c: u32, t: Tick, robot: RobotId) -> bool {
        self.owner(c, t).is_none_or(|r| r == robot)
    }

    /// True if no other robot uses `c` at or after `t`.
    pub fn free_from(&self, c: u32, t: Tick, robot: RobotId) -> bool {
        if self.last.get(&c).is_some_and(|&l| l >= t) {
            let max = self.last[&c];
            if (t..=max).any(|k| !self.free_for(c, k, robot)) {
                return false;
            }
        }
        self.holds.get(&c).is_none_or(|hs| hs.iter().all(|h| h.robot == robot || h.until.is_some_and(|u| u < t)))
    }

    fn swap_blocked(&self, from: u32, to: u32, t: Tick, robot: RobotId) -> bool {
        self.edges.get(&(to, from, t)).is_some_and(|&r| r != robot)
    }

    pub fn hold(&mut self, robot: RobotId, c: u32, from: Tick) {
        self.holds.entry(c).or_default().push(Hold { robot, from, until: None });
    }

    /// Ends the robot's open holds at `t - 1`; returns the cells released.
    pub fn release(&mut self, robot: RobotId, t: Tick) -> Vec<u32> {
        let mut out = Vec::new();
        for (c, hs) in self.holds.iter_mut() {
            for h in hs.iter_mut().filter(|h| h.robot == robot && h.until.is_none()) {
                h.until = if t > h.from { Some(t - 1) } else { Some(h.from) };
                if t <= h.from {
                    h.until = None;
                    h.from = Tick::MAX;
                }
                out.push(*c);
            }
            hs.retain(|h| h.from != Tick::MAX);
        }
        out.sort_unstable();
        out
    }

    pub fn reserve(&mut self, robot: RobotId, path: &TimedPath) {
        for (i, &c) in path.cells.iter().enumerate() {
            let t = path.start + i as Tick;
            self.cells.insert((c, t), robot);
            let l = self.last.entry(c).or_insert(t);
            *l = (*l).max(t);
            if let Some(&next) = path.cells.get(i + 1) {
                self.edges.insert((c, next, t), robot);
            }
        }
    }

    /// Drops point reservations and finished holds before `t`.
    pub fn prune(&mut self, t: Tick) {
        self.cells.retain(|(_, k), _| *k >= t);
        self.edges.retain(|(.., k), _| *k >= t);
        for hs in self.holds.values_mut() {
            hs.retain(|h| h.until.is_none_or(|u| u >= t));
        }
        self.holds.retain(|_, hs| !hs.is_empty());
    }
}

/// Cells occupied at consecutive ticks from `start`; repeated cells are waits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimedPath {
    pub start: Tick,
    pub cells: Vec<u32>,
}

impl TimedPath {
    pub fn arrival(&self) -> Tick {
        self.start + self.cells.len().saturating_sub(1) as Tick
    }

    pub fn moves(&self) -> usize {
        self.cells.windows(2).filter(|w| w[0] != w[1]).count()
    }

    pub fn distance(&self, kin: &Kinematics) -> f64 {
        self.moves() as f64 * kin.cell_edge
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GoalKind {
    /// The robot leaves the grid on arrival.
    Station,
    /// The robot stays at the goal indefinitely.
    Park,
}

#[derive(Clone, Copy, Debug)]
pub struct PathRequest {
    pub robot: RobotId,
    pub from: u32,
    pub to: u32,
    pub start: Tick,
    pub loaded: bool,
    pub goal: GoalKind,
    /// Reservations are honored for this many ticks; `None` plans the whole way.
    pub window: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("no path within the node budget; retry later")]
    DeadlockRetry,
    #[error("goal unreachable")]
    Unreachable,
}

/// Cooperative planner with cached true distances.
#[derive(Clone, Debug)]
pub struct Planner {
    pub grid: Grid,
    pub table: ReservationTable,
    pub node_budget: usize,
    dist: HashMap<(u32, bool), Vec<u32>>,
}

impl Planner {
    pub fn new(grid: Grid) -> Self {
        Planner { grid, table: ReservationTable::default(), node_budget: 200_000, dist: HashMap::new() }
    }

    /// BFS distances to `goal`; impassable cells get a value but are not expanded.
    pub fn distances(&mut self, goal: u32, loaded: bool) -> &[u32] {
        let grid = &self.grid;
        self.dist.entry((goal, loaded)).or_insert_with(|| {
            let mut d = vec![u32::MAX; grid.kinds.len()];
            d[goal as usize] = 0;
            let mut q = VecDeque::from([goal]);
            while let Some(c) = q.pop_front() {
                if c != goal && !grid.passable(c, loaded) {
                    continue;
                }
                for n in grid.neighbors(c) {
                    if d[n as usize] == u32::MAX {
                        d[n as usize] = d[c as usize] + 1;
                        q.push_back(n);
                    }
                }
            }
            d
        })
    }

    /// Space-time A*; the returned path is not reserved.
    pub fn plan(&mut self, req: &PathRequest) -> std::result::Result<TimedPath, PlanError> {
        if req.from == req.to {
            return Ok(TimedPath { start: req.start, cells: vec![req.from] });
        }
        let h = self.distances(req.to, req.loaded).to_vec();
        if h[req.from as usize] == u32::MAX {
            return Err(PlanError::Unreachable);
        }
        let grid = &self.grid;
        let table = &self.table;
        let horizon = req.window.map(|w| req.start + w as Tick);
        let ok_cell = |c: u32| c == req.to || c == req.from || grid.passable(c, req.loaded);

        // Node: (cell, tick). Parent links rebuild the path.
        let mut parent: HashMap<(u32, Tick), (u32, Tick)> = HashMap::new();
        let mut seen: HashSet<(u32, Tick)> = HashSet::new();
        let mut open = BinaryHeap::new();
        open.push(Reverse((h[req.from as usize] as Tick, 0u64, req.from, req.start)));
        let mut expanded = 0usize;
        while let Some(Reverse((_, neg_g, c, t))) = open.pop() {
            let _ = neg_g;
            if !seen.insert((c, t)) {
                continue;
            }
            let done = c == req.to
                && match req.goal {
                    GoalKind::Station => true,
                    GoalKind::Park => table.free_from(c, t, req.robot),
                };
            let beyond = horizon.is_some_and(|hz| t >= hz);
            if done || beyond {
                let mut cells = vec![c];
                let mut cur = (c, t);
                while let Some(&p) = parent.get(&cur) {
                    cells.push(p.0);
                    cur = p;
                }
                cells.reverse();
                return Ok(TimedPath { start: req.start, cells });
            }
            expanded += 1;
            if expanded > self.node_budget {
                return Err(PlanError::DeadlockRetry);
            }
            let nt = t + 1;
            let g = nt - req.start;
            let wait = std::iter::once(c);
            for n in wait.chain(grid.neighbors(c)) {
                if !ok_cell(n) || h[n as usize] == u32::MAX || seen.contains(&(n, nt)) {
                    continue;
                }
                if !table.free_for(n, nt, req.robot) || (n != c && table.swap_blocked(c, n, t, req.robot)) {
                    continue;
                }
                parent.entry((n, nt)).or_insert((c, t));
                // Prefer deeper nodes on ties so waits are taken late.
                open.push(Reverse((g + h[n as usize] as Tick, Tick::MAX - g, n, nt)));
            }
        }
        Err(PlanError::DeadlockRetry)
    }
}

/// Seconds to drive `path`: straight runs at the trapezoid profile, turns pro-rated
/// from the full-turn time, waits at one tick each, plus `lifts` pod handling events.
pub fn travel_time(grid: &Grid, path: &[u32], kin: &Kinematics, lifts: u32) -> f64 {
    let mut total = lifts as f64 * kin.lift;
    let mut run = 0u32;
    let mut dir: Option<(i64, i64)> = None;
    let mut last_dir: Option<(i64, i64)> = None;
    for w in path.windows(2) {
        if w[0] == w[1] {
            total += kin.straight(run as f64 * kin.cell_edge) + kin.tick();
            run = 0;
            dir = None;
            continue;
        }
        let ((ax, ay), (bx, by)) = (grid.xy(w[0]), grid.xy(w[1]));
        let d = (bx as i64 - ax as i64, by as i64 - ay as i64);
        if dir != Some(d) {
            total += kin.straight(run as f64 * kin.cell_edge);
            run = 0;
            if let Some(prev) = last_dir
                && prev != d {
                    let quarter = if prev.0 == -d.0 && prev.1 == -d.1 { 2.0 } else { 1.0 };
                    total += quarter * kin.full_turn / 2.0;
                }
        }
        dir = Some(d);
        last_dir = Some(d);
        run += 1;
    }
    total + kin.straight(run as f64 * kin.cell_edge)
}

/// Independent record of every robot's whereabouts, checked after the fact.
#[derive(Clone, Debug, Default)]
pub struct CollisionAudit {
    /// Per cell: (from, to, robot) occupancy intervals, inclusive.
    spans: BTreeMap<u32, Vec<(Tick, Tick, RobotId)>>,
    moves: HashMap<(u32, u32, Tick), RobotId>,
    open: HashMap<RobotId, (u32, Tick)>,
    pub swaps: Vec<(RobotId, RobotId, Tick)>,
}

impl CollisionAudit {
    pub fn path(&mut self, robot: RobotId, path: &TimedPath) {
        for (i, &c) in path.cells.iter().enumerate() {
            let t = path.start + i as Tick;
            self.spans.entry(c).or_default().push((t, t, robot));
            if let Some(&n) = path.cells.get(i + 1)
                && n != c {
                    if let Some(&other) = self.moves.get(&(n, c, t)) {
                        self.swaps.push((robot, other, t));
                    }
                    self.moves.insert((c, n, t), robot);
                }
        }
    }

    /// The robot stays at `c` from `t` until [`CollisionAudit::leave`].
    pub fn park(&mut self, robot: RobotId, c: u32, t: Tick) {
        self.open.insert(robot, (c, t));
    }

    pub fn leave(&mut self, robot: RobotId, t: Tick) {
        if let Some((c, from)) = self.open.remove(&robot)
            && t > from {
                self.spans.entry(c).or_default().push((from, t - 1, robot));
            }
    }

    /// Closes open stays at `end` and returns every conflict found.
    pub fn verify(&mut self, end: Tick) -> Vec<String> {
        let open: Vec<RobotId> = self.open.keys().copied().collect();
        for r in open {
            self.leave(r, end + 1);
        }
        let mut out: Vec<String> = self.swaps.iter().map(|(a, b, t)| format!("robots {a} and {b} swap at tick {t}")).collect();
        for (c, spans) in self.spans.iter_mut() {
            spans.sort_unstable();
            let mut reach: Option<(Tick, RobotId)> = None;
            for &(from, to, r) in spans.iter() {
                if let Some((end, owner)) = reach {
                    if from <= end && owner != r {
                        out.push(format!("robots {owner} and {r} share cell {c} at tick {from}"));
                    }
                    if to > end {
                        reach = Some((to, r));
                    }
                } else {
                    reach = Some((to, r));
                }
            }
        }
        out
    }
}
