//! Greedy starting solutions: whole orders first, then (over time) single lines.

use std::cmp::Reverse;
use std::collections::BTreeSet;

use crate::model::{Assignment, ModelParams, Variant, WarehouseState};

struct Plan<'a> {
    state: &'a WarehouseState,
    w_u: i64,
    /// Per station: chosen pod indices.
    pods: Vec<BTreeSet<usize>>,
    /// Pods already at or heading to some station; preferred on ties.
    out: Vec<bool>,
    /// Known distance to the stations; nearer wins the next tie.
    distance: Vec<u32>,
    /// Open lines each pod could serve anywhere; the last tie-break before the index.
    demand: Vec<usize>,
    free: Vec<u32>,
    /// Per order, per line: station index once assigned.
    placed: Vec<Vec<Option<usize>>>,
    /// Orders counted against the packing headroom.
    counted: Vec<bool>,
    headroom: Option<u32>,
}

impl<'a> Plan<'a> {
    fn new(state: &'a WarehouseState, variant: Variant, params: &ModelParams) -> Self {
        let pods = state
            .stations
            .iter()
            .map(|st| st.present().filter_map(|p| state.pods.iter().position(|q| q.id == p)).collect())
            .collect();
        let headroom = match params.packing_capacity {
            Some(c) if variant.splits() => Some(c.saturating_sub(state.active_splits)),
            _ => None,
        };
        let out = state.pods.iter().map(|p| state.stations.iter().any(|s| s.present().any(|q| q == p.id))).collect();
        let wanted: Vec<_> = state
            .stations
            .iter()
            .flat_map(|s| s.open_requests.iter().map(|(_, i)| *i))
            .chain(state.backlog.iter().flat_map(|o| o.lines.iter().copied()))
            .collect();
        let demand = state.pods.iter().map(|p| wanted.iter().filter(|i| p.holds(**i)).count()).collect();
        let distance = state
            .pods
            .iter()
            .map(|p| state.pod_distance.iter().find(|(q, _)| *q == p.id).map_or(u32::MAX, |(_, d)| *d))
            .collect();
        Plan {
            state,
            w_u: params.w_u as i64,
            pods,
            out,
            distance,
            demand,
            free: state.stations.iter().map(|s| s.free).collect(),
            placed: state.backlog.iter().map(|o| vec![None; o.lines.len()]).collect(),
            counted: vec![false; state.backlog.len()],
            headroom,
        }
    }

    /// Larger is better: more lines served, then already out of storage, then nearer,
    /// then more demanded, then lower index.
    fn rank(&self, &(p, gain): &(usize, usize)) -> (usize, bool, Reverse<u32>, usize, Reverse<usize>) {
        (gain, self.out[p], Reverse(self.distance[p]), self.demand[p], Reverse(p))
    }

    fn covered(&self, k: usize, o: usize, l: usize) -> bool {
        let sku = self.state.backlog[o].lines[l];
        self.pods[k].iter().any(|&p| self.state.pods[p].holds(sku))
    }

    /// Greedy set cover of an order's uncovered lines at station k.
    fn extra_pods(&self, k: usize, o: usize) -> Option<Vec<usize>> {
        let order = &self.state.backlog[o];
        let mut left: Vec<_> = (0..order.lines.len()).filter(|&l| !self.covered(k, o, l)).map(|l| order.lines[l]).collect();
        let mut out = Vec::new();
        while !left.is_empty() {
            let (best, gain) = (0..self.state.pods.len())
                .filter(|p| !self.pods[k].contains(p) && !out.contains(p))
                .map(|p| (p, left.iter().filter(|s| self.state.pods[p].holds(**s)).count()))
                .max_by(|a, b| self.rank(a).cmp(&self.rank(b)))?;
            if gain == 0 {
                return None;
            }
            left.retain(|s| !self.state.pods[best].holds(*s));
            out.push(best);
        }
        Some(out)
    }

    fn whole_orders(&mut self) {
        for k in 0..self.state.stations.len() {
            loop {
                let mut best: Option<(i64, usize, Vec<usize>)> = None;
                for (o, order) in self.state.backlog.iter().enumerate() {
                    if self.placed[o].iter().any(Option::is_some) || order.lines.len() as u32 > self.free[k] {
                        continue;
                    }
                    let Some(extra) = self.extra_pods(k, o) else { continue };
                    let net = extra.len() as i64 - self.w_u * order.lines.len() as i64;
                    if best.as_ref().is_none_or(|(b, bo, _)| {
                        (net, Reverse(order.lines.len())) < (*b, Reverse(self.state.backlog[*bo].lines.len()))
                    }) {
                        best = Some((net, o, extra));
                    }
                }
                match best {
                    Some((net, o, extra)) if net < 0 => {
                        self.pods[k].extend(extra);
                        for slot in &mut self.placed[o] {
                            *slot = Some(k);
                        }
                        self.free[k] -= self.state.backlog[o].lines.len() as u32;
                    }
                    _ => break,
                }
            }
        }
    }

    fn may_touch(&mut self, o: usize) -> bool {
        if self.counted[o] || self.state.is_started(self.state.backlog[o].id) {
            return true;
        }
        match self.headroom {
            None => true,
            Some(0) => false,
            Some(h) => {
                self.headroom = Some(h - 1);
                self.counted[o] = true;
                true
            }
        }
    }

    /// Open lines ranked: orders already touched, then fewer remaining lines, then position.
    fn open_lines(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(bool, usize, usize, usize)> = Vec::new();
        for (o, slots) in self.placed.iter().enumerate() {
            let touched = slots.iter().any(Option::is_some);
            let left = slots.iter().filter(|s| s.is_none()).count();
            for (l, s) in slots.iter().enumerate() {
                if s.is_none() {
                    out.push((!touched, left, o, l));
                }
            }
        }
        out.sort();
        out.into_iter().map(|(.., o, l)| (o, l)).collect()
    }

    fn fill_lines(&mut self, k: usize) {
        for (o, l) in self.open_lines() {
            if self.free[k] == 0 {
                return;
            }
            if self.covered(k, o, l) && self.may_touch(o) {
                self.placed[o][l] = Some(k);
                self.free[k] -= 1;
            }
        }
    }

    /// Adds pods one at a time by how many open lines they would serve.
    fn pod_driven(&mut self) {
        for k in 0..self.state.stations.len() {
            self.fill_lines(k);
            while self.free[k] > 0 {
                let open = self.open_lines();
                let best = (0..self.state.pods.len())
                    .filter(|p| !self.pods[k].contains(p))
                    .map(|p| {
                        let g = open.iter().filter(|(o, l)| self.state.pods[p].holds(self.state.backlog[*o].lines[*l])).count();
                        (p, g.min(self.free[k] as usize))
                    })
                    .max_by(|a, b| self.rank(a).cmp(&self.rank(b)));
                match best {
                    Some((p, g)) if g > 0 => {
                        self.pods[k].insert(p);
                        let before = self.free[k];
                        self.fill_lines(k);
                        if self.free[k] == before {
                            self.pods[k].remove(&p);
                            break;
                        }
                    }
                    _ => break,
                }
            }
        }
    }

    fn assignment(&self, variant: Variant) -> Assignment {
        let st = self.state;
        let mut a = Assignment::default();
        for (o, order) in st.backlog.iter().enumerate() {
            if self.placed[o].iter().all(Option::is_none) {
                continue;
            }
            let mut used = BTreeSet::new();
            let mut deferred = false;
            for (l, s) in self.placed[o].iter().enumerate() {
                match s {
                    Some(k) => {
                        used.insert(*k);
                        a.lines.push((order.id, order.lines[l], st.stations[*k].id));
                    }
                    None => {
                        deferred = true;
                        a.deferred.push((order.id, order.lines[l]));
                    }
                }
            }
            a.active.push(order.id);
            for &k in &used {
                a.orders.push((order.id, st.stations[k].id));
            }
            if variant.splits() && used.len() > 1 {
                a.extra_stations.push((order.id, used.len() as u32 - 1));
            }
            if self.headroom.is_some() && !st.is_started(order.id) && (used.len() > 1 || deferred) {
                a.split.push(order.id);
            }
        }
        for (k, station) in st.stations.iter().enumerate() {
            for &p in &self.pods[k] {
                a.pods.push((st.pods[p].id, station.id));
            }
            a.unused.push((station.id, self.free[k]));
        }
        a.objective_value = a.pods.len() as i64 + self.w_u * a.unused.iter().map(|(_, u)| *u as i64).sum::<i64>();
        a.normalize();
        a
    }
}

/// Candidate solutions; callers keep only the ones that validate.
pub(crate) fn greedy(state: &WarehouseState, variant: Variant, params: &ModelParams) -> Vec<Assignment> {
    let mut plan = Plan::new(state, variant, params);
    plan.whole_orders();
    let mut out = vec![plan.assignment(variant)];
    if variant == Variant::SplitTime {
        for k in 0..state.stations.len() {
            plan.fill_lines(k);
        }
        out.push(plan.assignment(variant));
        let mut plan = Plan::new(state, variant, params);
        plan.pod_driven();
        out.push(plan.assignment(variant));
    }
    out
}
