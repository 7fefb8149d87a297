//! Small hand-built warehouse states with known optima.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Order, OrderId, Pod, PodId, SkuId, StationState, WarehouseState};

/// Two stations of capacity 2; SKU 1 only on pod 1, SKU 2 only on pod 2; two
/// identical orders {1, 2}. Whole orders need four visits, split orders two.
pub fn example1() -> WarehouseState {
    WarehouseState {
        period: 1,
        num_skus: 2,
        pods: vec![Pod::new(1, [1]), Pod::new(2, [2])],
        stored: vec![PodId(1), PodId(2)],
        stations: vec![StationState::new(1, 2), StationState::new(2, 2)],
        backlog: vec![Order::new(1, [1, 2]), Order::new(2, [1, 2])],
        started: vec![],
        active_splits: 0,
        pod_distance: vec![],
    }
}

/// Four 3-line orders over SKUs 1..=12, pods 1 and 2 docked at stations 1 and 2,
/// pods 3 and 4 stored. The sequential rules need six visits, the integrated model four.
pub fn example2() -> WarehouseState {
    let mut s1 = StationState::new(1, 6);
    s1.at.push(PodId(1));
    let mut s2 = StationState::new(2, 6);
    s2.at.push(PodId(2));
    WarehouseState {
        period: 1,
        num_skus: 12,
        pods: vec![Pod::new(1, [1, 2, 3, 4]), Pod::new(2, [7, 8, 9, 10]), Pod::new(3, [5, 9, 10, 11]), Pod::new(4, [3, 4, 6, 12])],
        stored: vec![PodId(3), PodId(4)],
        stations: vec![s1, s2],
        backlog: vec![
            Order::new(1, [9, 10, 11]),
            Order::new(2, [1, 2, 5]),
            Order::new(3, [3, 4, 6]),
            Order::new(4, [7, 8, 12]),
        ],
        started: vec![],
        active_splits: 0,
        pod_distance: vec![],
    }
}

/// The Example-1 warehouse where only one station takes work per period:
/// station 1 in the first, station 2 in the second.
pub fn split_over_time() -> (WarehouseState, Vec<Vec<u32>>) {
    (example1(), vec![vec![2, 0], vec![0, 2]])
}

/// A random valid state with at most `max_orders` orders, `max_pods` pods and
/// the given number of stations. Some pods start docked or inbound, free
/// capacity varies, and one order may already be started.
pub fn random_state(seed: u64, max_orders: usize, max_pods: usize, stations: usize) -> WarehouseState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let num_skus = rng.gen_range(2..=8u32);
    let n_pods = rng.gen_range(2..=max_pods.max(2));
    let mut pods: Vec<Pod> = (1..=n_pods as u32)
        .map(|id| {
            let k = rng.gen_range(1..=3.min(num_skus));
            let mut skus: Vec<u32> = (1..=num_skus).collect();
            skus.shuffle(&mut rng);
            Pod::new(id, skus.into_iter().take(k as usize))
        })
        .collect();
    for p in &mut pods {
        p.skus.sort();
    }
    let mut held: Vec<SkuId> = pods.iter().flat_map(|p| p.skus.iter().copied()).collect();
    held.sort();
    held.dedup();

    let mut sts: Vec<StationState> = (1..=stations as u32)
        .map(|id| {
            let mut s = StationState::new(id, rng.gen_range(2..=6));
            s.free = rng.gen_range(s.capacity / 2..=s.capacity);
            s
        })
        .collect();
    let mut ids: Vec<PodId> = pods.iter().map(|p| p.id).collect();
    ids.shuffle(&mut rng);
    let mut stored = Vec::new();
    for p in ids {
        let k = rng.gen_range(0..stations * 4);
        if k < stations {
            sts[k].at.push(p);
        } else if k < 2 * stations {
            sts[k - stations].inbound.push(p);
        } else {
            stored.push(p);
        }
    }
    stored.sort();

    let max_len = sts.iter().map(|s| s.capacity).max().unwrap_or(1).min(3).min(held.len() as u32);
    let n_orders = rng.gen_range(1..=max_orders.max(1));
    let backlog: Vec<Order> = (1..=n_orders as u32)
        .map(|id| {
            let k = rng.gen_range(1..=max_len) as usize;
            let mut lines: Vec<SkuId> = held.choose_multiple(&mut rng, k).copied().collect();
            lines.sort();
            Order { id: OrderId(id), lines, arrival_time: 0.0 }
        })
        .collect();
    let started = if n_orders > 1 && rng.gen_bool(0.3) { vec![OrderId(1)] } else { vec![] };
    let active_splits = started.len() as u32;
    WarehouseState {
        period: if started.is_empty() { 1 } else { 2 },
        num_skus,
        pods,
        stored,
        stations: sts,
        backlog,
        started,
        active_splits,
        pod_distance: vec![],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_state;

    #[test]
    fn fixtures_are_valid() {
        assert!(validate_state(&example1()).is_empty());
        assert!(validate_state(&example2()).is_empty());
        for seed in 0..200 {
            let st = random_state(seed, 5, 8, 2);
            assert!(validate_state(&st).is_empty(), "seed {seed}: {:?}", validate_state(&st));
            assert!(st.backlog.len() <= 5 && st.pods.len() <= 8);
        }
    }
}
