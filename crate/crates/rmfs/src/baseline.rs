//! Sequential comparison policy: Pod-Match order assignment, then Demand pod selection.

use std::collections::BTreeSet;

use crate::model::{Assignment, OrderId, PodId, SkuId, StationId, WarehouseState};

/// Assigns backlog orders to stations with free capacity, one order per station per round.
///
/// An order scores the number of its lines whose SKU sits on a pod at or heading
/// to the station. Ties go to the lower order id.
pub fn pod_match_poa(state: &WarehouseState) -> Vec<(OrderId, StationId)> {
    let mut free: Vec<u32> = state.stations.iter().map(|s| s.free).collect();
    let mut taken = vec![false; state.backlog.len()];
    let mut stations: Vec<usize> = (0..state.stations.len()).collect();
    stations.sort_by_key(|&k| state.stations[k].id);
    let on_hand: Vec<BTreeSet<SkuId>> = state
        .stations
        .iter()
        .map(|st| st.present().filter_map(|p| state.pod(p)).flat_map(|p| p.skus.iter().copied()).collect())
        .collect();
    let mut out = Vec::new();
    loop {
        let mut progress = false;
        for &k in &stations {
            let mut best: Option<(usize, usize)> = None;
            for (j, o) in state.backlog.iter().enumerate() {
                if taken[j] || o.lines.len() as u32 > free[k] || o.lines.is_empty() {
                    continue;
                }
                let score = o.lines.iter().filter(|i| on_hand[k].contains(i)).count();
                let better = match best {
                    None => true,
                    Some((bs, bj)) => score > bs || (score == bs && o.id < state.backlog[bj].id),
                };
                if better {
                    best = Some((score, j));
                }
            }
            if let Some((_, j)) = best {
                taken[j] = true;
                free[k] -= state.backlog[j].lines.len() as u32;
                out.push((state.backlog[j].id, state.stations[k].id));
                progress = true;
            }
        }
        if !progress {
            return out;
        }
    }
}

/// SKUs of the station's open requests that no pod at or heading to it can serve.
pub fn unserved(state: &WarehouseState, station: StationId) -> Vec<(OrderId, SkuId)> {
    let Some(st) = state.stations.iter().find(|s| s.id == station) else {
        return Vec::new();
    };
    let present: Vec<PodId> = st.present().collect();
    st.open_requests
        .iter()
        .copied()
        .filter(|(_, i)| !present.iter().any(|p| state.pod(*p).is_some_and(|pod| pod.holds(*i))))
        .collect()
}

/// Picks a pod for the station: among pods not yet there that serve one of its unserved
/// requests, the one holding the most demanded units over all open requests and
/// backlog lines. `None` when there is no candidate or the queue is full.
pub fn demand_pps(state: &WarehouseState, station: StationId) -> Option<PodId> {
    let st = state.stations.iter().find(|s| s.id == station)?;
    if st.present().count() as u32 >= st.queue_length {
        return None;
    }
    let need = unserved(state, station);
    if need.is_empty() {
        return None;
    }
    let demanded: Vec<SkuId> = state
        .stations
        .iter()
        .flat_map(|s| s.open_requests.iter().map(|(_, i)| *i))
        .chain(state.backlog.iter().flat_map(|o| o.lines.iter().copied()))
        .collect();
    let present: Vec<PodId> = st.present().collect();
    let mut best: Option<(usize, PodId)> = None;
    for pod in &state.pods {
        let p = pod.id;
        if present.contains(&p) || !need.iter().any(|(_, i)| pod.holds(*i)) {
            continue;
        }
        let score = demanded.iter().filter(|i| pod.holds(**i)).count();
        let better = match best {
            None => true,
            Some((bs, bp)) => score > bs || (score == bs && p < bp),
        };
        if better {
            best = Some((score, p));
        }
    }
    best.map(|(_, p)| p)
}

/// One full sequential period decision expressed as an assignment: Pod-Match
/// places orders, then Demand brings pods to each station (ascending id) until
/// its requests are served or no pod helps.
pub fn sequential_assignment(state: &WarehouseState, w_u: u32) -> Assignment {
    let mut st = state.clone();
    let placed = pod_match_poa(state);
    let mut a = Assignment::default();
    for &(o, s) in &placed {
        let order = state.backlog.iter().find(|b| b.id == o).expect("placed order is in the backlog");
        let station = st.stations.iter_mut().find(|x| x.id == s).expect("known station");
        station.free -= order.lines.len() as u32;
        for &i in &order.lines {
            station.open_requests.push((o, i));
            a.lines.push((o, i, s));
        }
        a.orders.push((o, s));
        a.active.push(o);
    }
    st.backlog.retain(|b| !placed.iter().any(|(o, _)| *o == b.id));
    let mut ids: Vec<StationId> = st.stations.iter().map(|s| s.id).collect();
    ids.sort();
    for s in ids {
        while let Some(p) = demand_pps(&st, s) {
            st.stored.retain(|q| *q != p);
            st.stations.iter_mut().find(|x| x.id == s).expect("known station").inbound.push(p);
        }
    }
    for station in &st.stations {
        for p in station.present() {
            a.pods.push((p, station.id));
        }
        a.unused.push((station.id, station.free));
    }
    a.objective_value = a.pods.len() as i64 + w_u as i64 * a.unused.iter().map(|(_, u)| *u as i64).sum::<i64>();
    a.normalize();
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example2;
    use crate::model::{ModelParams, Order, Pod, StationState, Variant, validate_assignment};

    #[test]
    fn empty_backlog_assigns_nothing() {
        let mut st = example2();
        st.backlog.clear();
        assert!(pod_match_poa(&st).is_empty());
    }

    #[test]
    fn example2_pod_match() {
        let got = pod_match_poa(&example2());
        let mut by_station: Vec<(StationId, OrderId)> = got.iter().map(|(o, s)| (*s, *o)).collect();
        by_station.sort();
        assert_eq!(
            by_station,
            vec![(StationId(1), OrderId(2)), (StationId(1), OrderId(3)), (StationId(2), OrderId(1)), (StationId(2), OrderId(4))]
        );
    }

    #[test]
    fn equal_scores_pick_lower_order_id() {
        let st = WarehouseState {
            period: 1,
            num_skus: 2,
            pods: vec![Pod::new(1, [1, 2])],
            stored: vec![PodId(1)],
            stations: vec![StationState::new(1, 1)],
            backlog: vec![Order::new(5, [2]), Order::new(3, [1])],
            started: vec![],
            active_splits: 0,
            pod_distance: vec![],
        };
        assert_eq!(pod_match_poa(&st), vec![(OrderId(3), StationId(1))]);
    }

    fn requests(skus: &[u32]) -> StationState {
        let mut s = StationState::new(1, 10);
        s.open_requests = skus.iter().map(|&i| (OrderId(1), SkuId(i))).collect();
        s
    }

    #[test]
    fn demand_prefers_more_demanded_pod() {
        let st = WarehouseState {
            period: 1,
            num_skus: 8,
            pods: vec![Pod::new(1, [1, 2, 3]), Pod::new(2, [1, 4, 5, 6, 7])],
            stored: vec![PodId(1), PodId(2)],
            stations: vec![requests(&[1, 2, 3, 4, 5, 6, 7])],
            backlog: vec![],
            started: vec![],
            active_splits: 0,
            pod_distance: vec![],
        };
        assert_eq!(demand_pps(&st, StationId(1)), Some(PodId(2)));
    }

    #[test]
    fn demand_single_candidate_and_ties() {
        let mut st = WarehouseState {
            period: 1,
            num_skus: 4,
            pods: vec![Pod::new(2, [1]), Pod::new(1, [1]), Pod::new(3, [3])],
            stored: vec![PodId(2), PodId(1), PodId(3)],
            stations: vec![requests(&[1])],
            backlog: vec![],
            started: vec![],
            active_splits: 0,
            pod_distance: vec![],
        };
        assert_eq!(demand_pps(&st, StationId(1)), Some(PodId(1)));
        st.stations[0].inbound.push(PodId(1));
        assert_eq!(demand_pps(&st, StationId(1)), None);
        st.stations[0].inbound.clear();
        st.pods.retain(|p| p.id == PodId(3));
        assert_eq!(demand_pps(&st, StationId(1)), None);
    }

    #[test]
    fn example2_sequential_uses_six_pods() {
        let st = example2();
        let a = sequential_assignment(&st, 2);
        assert_eq!(a.pods.len(), 6);
        assert_eq!(a.new_visits(&st), 4);
        assert_eq!(a.objective_value, 6);
        assert!(validate_assignment(&st, &a, Variant::Integrated, &ModelParams::default()).is_empty());
    }
}
