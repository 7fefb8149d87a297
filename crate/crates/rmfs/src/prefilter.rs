//! Restricts the model backlog to the orders best served by pods already on the move.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::model::{OrderId, SkuId, WarehouseState};

pub const DEFAULT_N: usize = 10;

/// Share of an order's remaining lines held by pods at or heading to any station,
/// kept as an exact fraction.
pub fn score(state: &WarehouseState, order: OrderId) -> (usize, usize) {
    let on_hand = on_hand(state);
    let Some(o) = state.backlog.iter().find(|o| o.id == order) else {
        return (0, 1);
    };
    (o.lines.iter().filter(|i| on_hand.contains(i)).count(), o.lines.len().max(1))
}

fn on_hand(state: &WarehouseState) -> BTreeSet<SkuId> {
    state
        .stations
        .iter()
        .flat_map(|s| s.present())
        .filter_map(|p| state.pod(p))
        .flat_map(|p| p.skus.iter().copied())
        .collect()
}

/// The `n` highest-scoring backlog orders, best first, ties by ascending id.
pub fn prefilter(state: &WarehouseState, n: usize) -> Vec<OrderId> {
    let on_hand = on_hand(state);
    let mut scored: Vec<(usize, usize, OrderId)> = state
        .backlog
        .iter()
        .map(|o| (o.lines.iter().filter(|i| on_hand.contains(i)).count(), o.lines.len().max(1), o.id))
        .collect();
    scored.sort_by(|a, b| match (b.0 * a.1).cmp(&(a.0 * b.1)) {
        Ordering::Equal => a.2.cmp(&b.2),
        other => other,
    });
    scored.into_iter().take(n).map(|(.., id)| id).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Order, Pod, PodId, StationState};

    fn state() -> WarehouseState {
        let mut s = StationState::new(1, 6);
        s.inbound.push(PodId(1));
        WarehouseState {
            period: 1,
            num_skus: 6,
            pods: vec![Pod::new(1, [1, 2, 4]), Pod::new(2, [3, 5, 6])],
            stored: vec![PodId(2)],
            stations: vec![s],
            backlog: vec![Order::new(9, [4, 5]), Order::new(4, [1, 2, 3]), Order::new(2, [6]), Order::new(7, [1, 2])],
            started: vec![],
            active_splits: 0,
            pod_distance: vec![],
        }
    }

    #[test]
    fn ranks_by_covered_share() {
        let st = state();
        assert_eq!(score(&st, OrderId(4)), (2, 3));
        assert_eq!(prefilter(&st, 10), vec![OrderId(7), OrderId(4), OrderId(9), OrderId(2)]);
        assert_eq!(prefilter(&st, 2), vec![OrderId(7), OrderId(4)]);
    }

    #[test]
    fn nothing_on_hand_falls_back_to_ids() {
        let mut st = state();
        st.stations[0].inbound.clear();
        st.stored.push(PodId(1));
        assert_eq!(prefilter(&st, 3), vec![OrderId(2), OrderId(4), OrderId(7)]);
    }
}
