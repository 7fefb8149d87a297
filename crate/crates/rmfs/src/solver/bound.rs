//! Lower bound for the period models, read off the cover and capacity rows.
//!
//! Per station: pods fixed at the station, plus the exact set-cover size of the
//! SKUs of fixed lines they do not hold, plus the cheapest way to fill the
//! remaining capacity when k more pods can add at most the k largest line gains.
//! The same count is also taken over all stations at once, where the lines left
//! to assign cap what any set of pods can fill.

use std::collections::{BTreeMap, HashMap};

use super::engine::Engine;
use crate::ilp::{IlpProblem, Relation, Role, RowKind};
use crate::model::StationId;

struct StationView {
    free: i64,
    u_cost: i64,
    lines: Vec<(usize, u32)>,
    pods: Vec<usize>,
    pod_cost: Vec<i64>,
    pod_skus: Vec<Vec<u32>>,
    sku_pods: HashMap<u32, Vec<usize>>,
}

pub(crate) struct Bounder {
    stations: Vec<StationView>,
    memo: HashMap<(usize, Vec<u32>), Option<u32>>,
    gains: Vec<i64>,
    counts: HashMap<u32, i64>,
    /// Line variables of each (order, sku) across stations, with the sku.
    line_vars: Vec<(u32, Vec<usize>)>,
    /// Placement variables of each pod across stations, with its skus.
    pod_vars: Vec<(Vec<u32>, Vec<usize>)>,
}

/// What one station contributes to the joint count.
struct Part {
    fixed_pods: i64,
    need: i64,
    room: i64,
    free_lines: i64,
    u_cost: i64,
}

impl Bounder {
    /// Recognizes the model structure; `None` for problems without it.
    pub fn new(pb: &IlpProblem) -> Option<Bounder> {
        pb.meta.variant?;
        let mut by_station: BTreeMap<StationId, StationView> = BTreeMap::new();
        for (idx, c) in pb.constraints.iter().enumerate() {
            if c.kind != RowKind::Capacity {
                continue;
            }
            let mut station = None;
            let mut u_cost = 0;
            let mut lines = Vec::new();
            for &(v, a) in &c.terms {
                match pb.variables[v].role {
                    Role::U { station: s } if a == 1 => {
                        station = Some(s);
                        u_cost = pb.objective[v];
                    }
                    Role::Yios { sku, station: s, .. } if a == 1 => {
                        station = Some(s);
                        lines.push((v, sku.0));
                    }
                    _ => return None,
                }
            }
            if c.relation != Relation::Eq || pb.constraints[idx].rhs < 0 {
                return None;
            }
            let s = station?;
            by_station.insert(
                s,
                StationView {
                    free: c.rhs,
                    u_cost,
                    lines,
                    pods: Vec::new(),
                    pod_cost: Vec::new(),
                    pod_skus: Vec::new(),
                    sku_pods: HashMap::new(),
                },
            );
        }
        let mut keys: BTreeMap<(u32, u32), Vec<usize>> = BTreeMap::new();
        for (idx, v) in pb.variables.iter().enumerate() {
            if let Role::Yios { order, sku, .. } = v.role {
                keys.entry((order.0, sku.0)).or_default().push(idx);
            }
        }
        let mut by_pod: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (idx, v) in pb.variables.iter().enumerate() {
            if let Role::X { pod, .. } = v.role {
                by_pod.entry(pod.0).or_default().push(idx);
            }
        }
        let mut pod_index: HashMap<usize, usize> = HashMap::new();
        let mut pod_skus: HashMap<u32, Vec<u32>> = HashMap::new();
        for c in pb.constraints.iter().filter(|c| c.kind == RowKind::Cover) {
            let mut sku = None;
            let mut station = None;
            let mut pods = Vec::new();
            for &(v, a) in &c.terms {
                match pb.variables[v].role {
                    Role::Yios { sku: i, station: s, .. } if a == -1 => {
                        sku = Some(i.0);
                        station = Some(s);
                    }
                    Role::X { pod, .. } if a == 1 => pods.push((v, pod.0)),
                    _ => return None,
                }
            }
            let (sku, view) = (sku?, by_station.get_mut(&station?)?);
            for (v, pod) in pods {
                pod_skus.entry(pod).or_default().push(sku);
                let k = *pod_index.entry(v).or_insert_with(|| {
                    view.pods.push(v);
                    view.pod_cost.push(pb.objective[v]);
                    view.pod_skus.push(Vec::new());
                    view.pods.len() - 1
                });
                if !view.pod_skus[k].contains(&sku) {
                    view.pod_skus[k].push(sku);
                }
                let list = view.sku_pods.entry(sku).or_default();
                if !list.contains(&k) {
                    list.push(k);
                }
            }
            view.sku_pods.entry(sku).or_default();
        }
        // Pods that cover nothing at a station can still be fixed there; they only add cost.
        for (idx, v) in pb.variables.iter().enumerate() {
            if let Role::X { station, .. } = v.role
                && let Some(view) = by_station.get_mut(&station)
                    && let std::collections::hash_map::Entry::Vacant(e) = pod_index.entry(idx) {
                        e.insert(view.pods.len());
                        view.pods.push(idx);
                        view.pod_cost.push(pb.objective[idx]);
                        view.pod_skus.push(Vec::new());
                    }
        }
        if by_station.values().flat_map(|s| s.pod_cost.iter()).any(|&c| c != 1) {
            return None;
        }
        Some(Bounder {
            stations: by_station.into_values().collect(),
            memo: HashMap::new(),
            gains: Vec::new(),
            counts: HashMap::new(),
            line_vars: keys.into_iter().map(|((_, sku), vs)| (sku, vs)).collect(),
            pod_vars: by_pod
                .into_iter()
                .map(|(pod, vs)| {
                    let mut skus = pod_skus.remove(&pod).unwrap_or_default();
                    skus.sort_unstable();
                    skus.dedup();
                    (skus, vs)
                })
                .collect(),
        })
    }

    /// Admissible lower bound on the objective of any completion; `i64::MAX` if none exists.
    pub fn bound(&mut self, e: &Engine) -> i64 {
        let mut total = 0;
        let mut parts = Vec::with_capacity(self.stations.len());
        for k in 0..self.stations.len() {
            match self.station_bound(k, e) {
                Some((b, part)) => {
                    total += b;
                    parts.push(part);
                }
                None => return i64::MAX,
            }
        }
        total.max(self.joint_bound(e, &parts))
    }

    /// Pods and unused capacity over all stations together. Lines not yet placed
    /// fill at most one slot each, and all copies of one pod together reach only
    /// the lines holding its skus.
    fn joint_bound(&mut self, e: &Engine, parts: &[Part]) -> i64 {
        let Some(u_cost) = parts.first().map(|p| p.u_cost) else { return 0 };
        if parts.iter().any(|p| p.u_cost != u_cost) {
            return 0;
        }
        self.counts.clear();
        let mut open = 0;
        for (sku, vs) in &self.line_vars {
            if vs.iter().all(|&v| e.lb[v] == 0) && vs.iter().any(|&v| e.ub[v] == 1) {
                open += 1;
                *self.counts.entry(*sku).or_default() += 1;
            }
        }
        let mut cands: Vec<Vec<(u32, i64)>> = Vec::new();
        for (skus, vs) in &self.pod_vars {
            if vs.iter().any(|&v| e.lb[v] == 0 && e.ub[v] == 1) {
                let c: Vec<(u32, i64)> =
                    skus.iter().filter_map(|s| self.counts.get(s).map(|&n| (*s, n))).collect();
                if !c.is_empty() {
                    cands.push(c);
                }
            }
        }
        cands.sort_by_key(|c| std::cmp::Reverse(c.iter().map(|x| x.1).sum::<i64>()));
        let fixed: i64 = parts.iter().map(|p| p.fixed_pods).sum();
        let need: i64 = parts.iter().map(|p| p.need).sum();
        let room: i64 = parts.iter().map(|p| p.room).sum();
        let base: i64 = parts.iter().map(|p| p.free_lines).sum();
        let mut best = i64::MAX;
        for q in 0..=cands.len() {
            let filled = base + if q == 0 { 0 } else { max_cover(&cands, q, room - base) };
            let short = room - filled.min(open);
            best = best.min((q as i64).max(need) + u_cost * short.max(0));
            if short <= 0 {
                break;
            }
        }
        fixed + best
    }

    fn station_bound(&mut self, k: usize, e: &Engine) -> Option<(i64, Part)> {
        let st = &self.stations[k];
        let mut fixed_pods = 0;
        let mut covered: Vec<u32> = Vec::new();
        for (j, &v) in st.pods.iter().enumerate() {
            if e.lb[v] == 1 {
                fixed_pods += 1;
                covered.extend_from_slice(&st.pod_skus[j]);
            }
        }
        self.counts.clear();
        let mut fixed_lines = 0;
        let mut uncovered = 0;
        let mut required: Vec<u32> = Vec::new();
        let mut free_lines = 0;
        for &(v, sku) in &st.lines {
            let is_covered = covered.contains(&sku);
            if e.lb[v] == 1 {
                fixed_lines += 1;
                if !is_covered && !required.contains(&sku) {
                    required.push(sku);
                }
            } else if e.ub[v] == 1 {
                if is_covered {
                    free_lines += 1;
                } else {
                    uncovered += 1;
                    *self.counts.entry(sku).or_default() += 1;
                }
            }
        }
        required.sort_unstable();
        let need = if required.is_empty() { 0 } else { self.cover(k, required)? };

        let st = &self.stations[k];
        self.gains.clear();
        for (j, &v) in st.pods.iter().enumerate() {
            if e.lb[v] == 0 && e.ub[v] == 1 {
                let g: i64 = st.pod_skus[j].iter().map(|s| self.counts.get(s).copied().unwrap_or(0)).sum();
                self.gains.push(g);
            }
        }
        self.gains.sort_unstable_by(|a, b| b.cmp(a));
        let room = (st.free - fixed_lines).max(0);
        let base = room - free_lines;
        let mut best = i64::MAX;
        let mut filled = 0;
        for q in 0..=self.gains.len() {
            if q > 0 {
                filled = (filled + self.gains[q - 1]).min(uncovered);
            }
            if q < need as usize {
                continue;
            }
            let cost = q as i64 + st.u_cost * (base - filled).max(0);
            best = best.min(cost);
            if base - filled <= 0 {
                break;
            }
        }
        if best == i64::MAX {
            return None;
        }
        let part = Part { fixed_pods, need: need as i64, room, free_lines, u_cost: st.u_cost };
        Some((fixed_pods + best, part))
    }

    /// Minimum number of pods covering `skus` at station k, ignoring pods fixed to zero.
    fn cover(&mut self, k: usize, skus: Vec<u32>) -> Option<u32> {
        if let Some(&hit) = self.memo.get(&(k, skus.clone())) {
            return hit;
        }
        let st = &self.stations[k];
        let mut best = u32::MAX;
        let mut picked = Vec::new();
        cover_search(st, &skus, &mut picked, &mut best);
        let out = (best != u32::MAX).then_some(best);
        self.memo.insert((k, skus), out);
        out
    }
}

fn cover_search(st: &StationView, left: &[u32], picked: &mut Vec<usize>, best: &mut u32) {
    if left.is_empty() {
        *best = (*best).min(picked.len() as u32);
        return;
    }
    if picked.len() as u32 + 1 >= *best {
        return;
    }
    let widest = st.pod_skus.iter().map(|p| left.iter().filter(|s| p.contains(s)).count()).max().unwrap_or(0);
    if widest == 0 || picked.len() as u32 + left.len().div_ceil(widest) as u32 >= *best {
        return;
    }
    let sku = *left
        .iter()
        .min_by_key(|s| st.sku_pods.get(s).map_or(0, |p| p.len()))
        .expect("non-empty");
    let Some(cands) = st.sku_pods.get(&sku) else { return };
    for &j in cands {
        let rest: Vec<u32> = left.iter().copied().filter(|s| !st.pod_skus[j].contains(s)).collect();
        picked.push(j);
        cover_search(st, &rest, picked, best);
        picked.pop();
    }
}

/// Most lines that `q` of the candidate pods reach together, stopping early once
/// `enough` is reached. Candidates come sorted by their own line count. A search
/// that runs past a fixed step budget settles for the plain sum of the q largest.
fn max_cover(cands: &[Vec<(u32, i64)>], q: usize, enough: i64) -> i64 {
    const BUDGET: u32 = 2_000;
    struct Search<'a> {
        cands: &'a [Vec<(u32, i64)>],
        taken: Vec<u32>,
        best: i64,
        enough: i64,
        steps: u32,
    }
    impl Search<'_> {
        fn go(&mut self, from: usize, left: usize, got: i64) {
            self.best = self.best.max(got);
            if left == 0 || self.best >= self.enough || self.steps > BUDGET {
                return;
            }
            for j in from..self.cands.len() {
                let alone: i64 = self.cands[j].iter().map(|x| x.1).sum();
                if got + alone * left as i64 <= self.best {
                    return;
                }
                self.steps += 1;
                let n = self.taken.len();
                let mut add = 0;
                for &(s, c) in &self.cands[j] {
                    if !self.taken[..n].contains(&s) {
                        add += c;
                        self.taken.push(s);
                    }
                }
                self.go(j + 1, left - 1, got + add);
                self.taken.truncate(n);
            }
        }
    }
    let mut s = Search { cands, taken: Vec::new(), best: 0, enough, steps: 0 };
    s.go(0, q, 0);
    if s.steps > BUDGET {
        return cands.iter().take(q).map(|c| c.iter().map(|x| x.1).sum::<i64>()).sum();
    }
    s.best
}
