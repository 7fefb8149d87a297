//! Exhaustive reference solver for tiny period states.
//!
//! Enumerates every way to place each backlog order, then charges each station
//! the smallest pod set covering its SKUs. Shares no code with the ILP path.

use std::collections::HashMap;

use crate::model::{Assignment, ModelParams, OrderId, PodId, SkuId, Variant, WarehouseState};
use crate::{Error, Result};

pub const MAX_ORDERS: usize = 6;
pub const MAX_PODS: usize = 10;
pub const MAX_STATIONS: usize = 3;
pub const MAX_LEAVES: u64 = 20_000_000;

/// Where one line goes: a station index, or `None` for deferred.
type Placement = Vec<Option<usize>>;

struct Ctx<'a> {
    state: &'a WarehouseState,
    variant: Variant,
    w_u: i64,
    packing_room: Option<i64>,
    sku_bit: HashMap<SkuId, u32>,
    /// Per station: mask of SKUs on pods already there.
    forced_mask: Vec<u128>,
    forced_count: Vec<i64>,
    /// Per station: (union mask, pod list) of every subset of the other pods, by size.
    subsets: Vec<Vec<(u128, Vec<usize>)>>,
    memo: Vec<HashMap<u128, Option<usize>>>,
    leaves: u64,
}

fn options(variant: Variant, k: usize, n_st: usize) -> Vec<Option<Placement>> {
    let mut out = vec![None];
    match variant {
        Variant::Integrated => {
            for s in 0..n_st {
                out.push(Some(vec![Some(s); k]));
            }
        }
        Variant::SplitStations | Variant::SplitTime => {
            let base = if variant == Variant::SplitTime { n_st + 1 } else { n_st };
            let total = base.pow(k as u32);
            for mut code in 0..total {
                let mut p = Vec::with_capacity(k);
                for _ in 0..k {
                    let d = code % base;
                    code /= base;
                    p.push(if d < n_st { Some(d) } else { None });
                }
                if p.iter().any(Option::is_some) {
                    out.push(Some(p));
                }
            }
        }
    }
    out
}

impl Ctx<'_> {
    fn cover(&mut self, s: usize, mask: u128) -> Option<usize> {
        let need = mask & !self.forced_mask[s];
        if let Some(&hit) = self.memo[s].get(&need) {
            return hit;
        }
        let hit = self.subsets[s].iter().position(|(m, _)| m & need == need);
        self.memo[s].insert(need, hit);
        hit
    }

    fn is_split(&self, o: usize, p: &Placement) -> bool {
        let mut used = [false; MAX_STATIONS];
        for s in p.iter().flatten() {
            used[*s] = true;
        }
        let n = used.iter().filter(|u| **u).count();
        let started = self.state.is_started(self.state.backlog[o].id);
        !started && (n > 1 || p.iter().any(Option::is_none))
    }
}

/// Optimal objective and one optimal assignment, by full enumeration.
///
/// Ties keep the first optimum in enumeration order. Fails for states beyond
/// the size limits above.
pub fn brute_force_oracle(state: &WarehouseState, variant: Variant, params: &ModelParams) -> Result<(i64, Assignment)> {
    let n_st = state.stations.len();
    if state.backlog.len() > MAX_ORDERS || state.pods.len() > MAX_PODS || n_st > MAX_STATIONS {
        return Err(Error::Contract(format!(
            "oracle handles at most {MAX_ORDERS} orders, {MAX_PODS} pods and {MAX_STATIONS} stations"
        )));
    }
    let mut sku_bit = HashMap::new();
    for sku in state.pods.iter().flat_map(|p| &p.skus).chain(state.backlog.iter().flat_map(|o| &o.lines)) {
        let next = sku_bit.len() as u32;
        sku_bit.entry(*sku).or_insert(next);
    }
    if sku_bit.len() > 128 {
        return Err(Error::Contract("oracle handles at most 128 distinct SKUs".into()));
    }
    let pod_mask: Vec<u128> = state.pods.iter().map(|p| p.skus.iter().fold(0, |m, s| m | 1u128 << sku_bit[s])).collect();
    let mut forced_mask = Vec::new();
    let mut forced_count = Vec::new();
    let mut subsets = Vec::new();
    for st in &state.stations {
        let present: Vec<PodId> = st.present().collect();
        let (mut fm, mut fc) = (0u128, 0i64);
        let mut others = Vec::new();
        for (j, p) in state.pods.iter().enumerate() {
            if present.contains(&p.id) {
                fm |= pod_mask[j];
                fc += 1;
            } else {
                others.push(j);
            }
        }
        let mut subs: Vec<(u128, Vec<usize>)> = (0u32..1 << others.len())
            .map(|bits| {
                let pods: Vec<usize> = others.iter().enumerate().filter(|(b, _)| bits >> b & 1 == 1).map(|(_, j)| *j).collect();
                (pods.iter().fold(0, |m, j| m | pod_mask[*j]), pods)
            })
            .collect();
        subs.sort_by_key(|(_, p)| p.len());
        forced_mask.push(fm);
        forced_count.push(fc);
        subsets.push(subs);
    }
    let packing_room = match params.packing_capacity {
        Some(c) if variant.splits() => {
            if state.active_splits > c {
                return Err(Error::Contract("active splits exceed packing capacity".into()));
            }
            Some((c - state.active_splits) as i64)
        }
        _ => None,
    };
    let mut ctx = Ctx {
        state,
        variant,
        w_u: params.w_u as i64,
        packing_room,
        sku_bit,
        forced_mask,
        forced_count,
        subsets,
        memo: vec![HashMap::new(); n_st],
        leaves: 0,
    };
    let opts: Vec<Vec<Option<Placement>>> = state.backlog.iter().map(|o| options(variant, o.lines.len(), n_st)).collect();

    let mut chosen: Vec<usize> = vec![0; state.backlog.len()];
    let mut best: Option<(i64, Vec<usize>)> = None;
    let mut load = vec![0u32; n_st];
    let mut masks = vec![0u128; n_st];
    search(&mut ctx, &opts, 0, &mut chosen, &mut load, &mut masks, 0, &mut best)?;
    let (obj, picks) = best.ok_or_else(|| Error::Contract("no feasible assignment".into()))?;
    Ok((obj, assemble(&mut ctx, &opts, &picks, obj)))
}

#[allow(clippy::too_many_arguments)]
fn search(
    ctx: &mut Ctx,
    opts: &[Vec<Option<Placement>>],
    o: usize,
    chosen: &mut Vec<usize>,
    load: &mut Vec<u32>,
    masks: &mut Vec<u128>,
    splits: i64,
    best: &mut Option<(i64, Vec<usize>)>,
) -> Result<()> {
    if o == opts.len() {
        ctx.leaves += 1;
        if ctx.leaves > MAX_LEAVES {
            return Err(Error::Contract(format!("oracle enumeration exceeds {MAX_LEAVES} leaves")));
        }
        let mut obj = 0;
        for (s, st) in ctx.state.stations.iter().enumerate() {
            let Some(k) = ctx.cover(s, masks[s]) else { return Ok(()) };
            obj += ctx.forced_count[s] + ctx.subsets[s][k].1.len() as i64;
            obj += ctx.w_u * (st.free - load[s]) as i64;
        }
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            *best = Some((obj, chosen.clone()));
        }
        return Ok(());
    }
    let order = &ctx.state.backlog[o];
    for (k, opt) in opts[o].iter().enumerate() {
        let mut next_splits = splits;
        if let Some(p) = opt
            && ctx.packing_room.is_some() && ctx.is_split(o, p) {
                next_splits += 1;
                if next_splits > ctx.packing_room.unwrap_or(i64::MAX) {
                    continue;
                }
            }
        let saved_masks = masks.clone();
        let saved_load = load.clone();
        let mut fits = true;
        if let Some(p) = opt {
            for (line, place) in order.lines.iter().zip(p) {
                if let Some(s) = place {
                    load[*s] += 1;
                    masks[*s] |= 1u128 << ctx.sku_bit[line];
                    if load[*s] > ctx.state.stations[*s].free {
                        fits = false;
                    }
                }
            }
        }
        if fits {
            chosen[o] = k;
            search(ctx, opts, o + 1, chosen, load, masks, next_splits, best)?;
        }
        *masks = saved_masks;
        *load = saved_load;
    }
    Ok(())
}

fn assemble(ctx: &mut Ctx, opts: &[Vec<Option<Placement>>], picks: &[usize], obj: i64) -> Assignment {
    let state = ctx.state;
    let mut a = Assignment { objective_value: obj, ..Default::default() };
    let mut load = vec![0u32; state.stations.len()];
    let mut masks = vec![0u128; state.stations.len()];
    for (o, &k) in picks.iter().enumerate() {
        let order = &state.backlog[o];
        let Some(p) = &opts[o][k] else { continue };
        let id: OrderId = order.id;
        a.active.push(id);
        let mut used = Vec::new();
        for (line, place) in order.lines.iter().zip(p) {
            match place {
                Some(s) => {
                    let sid = state.stations[*s].id;
                    a.lines.push((id, *line, sid));
                    load[*s] += 1;
                    masks[*s] |= 1u128 << ctx.sku_bit[line];
                    if !used.contains(&sid) {
                        used.push(sid);
                    }
                }
                None => a.deferred.push((id, *line)),
            }
        }
        for s in &used {
            a.orders.push((id, *s));
        }
        if ctx.variant.splits() && used.len() > 1 {
            a.extra_stations.push((id, used.len() as u32 - 1));
        }
        if ctx.packing_room.is_some() && ctx.is_split(o, p) {
            a.split.push(id);
        }
    }
    for (s, st) in state.stations.iter().enumerate() {
        for p in st.present() {
            a.pods.push((p, st.id));
        }
        let k = ctx.cover(s, masks[s]).expect("optimum is coverable");
        for &j in &ctx.subsets[s][k].1 {
            a.pods.push((state.pods[j].id, st.id));
        }
        a.unused.push((st.id, st.free - load[s]));
    }
    a.normalize();
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example1;
    use crate::model::validate_assignment;

    #[test]
    fn example1_values() {
        let st = example1();
        let p = ModelParams::default();
        for (variant, want) in [(Variant::Integrated, 4), (Variant::SplitStations, 2), (Variant::SplitTime, 2)] {
            let (obj, a) = brute_force_oracle(&st, variant, &p).unwrap();
            assert_eq!(obj, want);
            assert!(validate_assignment(&st, &a, variant, &p).is_empty(), "{variant}");
        }
    }

    #[test]
    fn packing_limits_splits() {
        let st = example1();
        let one = ModelParams { packing_capacity: Some(1), ..Default::default() };
        let zero = ModelParams { packing_capacity: Some(0), ..Default::default() };
        // One split leaves one free slot per station, too few for the other order.
        assert_eq!(brute_force_oracle(&st, Variant::SplitStations, &one).unwrap().0, 4);
        assert_eq!(brute_force_oracle(&st, Variant::SplitStations, &ModelParams::default()).unwrap().0, 2);
        assert_eq!(brute_force_oracle(&st, Variant::SplitStations, &zero).unwrap().0, 4);
    }

    #[test]
    fn oversized_state_is_refused() {
        let mut st = example1();
        for i in 3..10 {
            st.backlog.push(crate::model::Order::new(i, [1]));
        }
        assert!(brute_force_oracle(&st, Variant::Integrated, &ModelParams::default()).is_err());
    }
}
