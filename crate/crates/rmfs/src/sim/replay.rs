//! Period-by-period replay without robots: each period gets a fixed capacity
//! schedule, and every assigned line is picked before the next period starts.

use serde::{Deserialize, Serialize};

use super::Policy;
use crate::baseline::sequential_assignment;
use crate::model::{Assignment, ModelParams, Variant, WarehouseState, validate_assignment, validate_state};
use crate::solver::{SolverConfig, solve_state};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub visits: usize,
    pub periods: Vec<Assignment>,
    /// Whether the backlog ran empty within the schedule.
    pub completed: bool,
}

/// Runs `policy` over the periods of `schedule`, where `schedule[t][k]` is the free
/// capacity of the k-th station in period t + 1. Pods return to storage between periods.
pub fn replay(
    state: &WarehouseState,
    schedule: &[Vec<u32>],
    policy: Policy,
    params: &ModelParams,
    config: &SolverConfig,
) -> Result<ReplayReport> {
    let v = validate_state(state);
    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }
    let mut st = state.clone();
    let mut visits = st.stations.iter().map(|s| s.at.len()).sum::<usize>();
    let mut periods = Vec::new();
    for (t, caps) in schedule.iter().enumerate() {
        if st.backlog.is_empty() {
            break;
        }
        if caps.len() != st.stations.len() {
            return Err(Error::Contract(format!("period {} lists {} capacities for {} stations", t + 1, caps.len(), st.stations.len())));
        }
        st.period = t as u32 + 1;
        for (s, &c) in st.stations.iter_mut().zip(caps) {
            s.capacity = s.capacity.max(c);
            s.free = c;
        }
        let asg = match policy.variant() {
            Some(variant) => solve_state(&st, variant, params, config)?.0,
            None => sequential_assignment(&st, params.w_u),
        };
        let v = validate_assignment(&st, &asg, policy.variant().unwrap_or(Variant::Integrated), params);
        if !v.is_empty() {
            return Err(Error::Invalid(v));
        }
        visits += asg.new_visits(&st);
        for &(o, i, _) in &asg.lines {
            if let Some(order) = st.backlog.iter_mut().find(|b| b.id == o) {
                order.lines.retain(|x| *x != i);
                if !order.lines.is_empty() && !st.started.contains(&o) {
                    st.started.push(o);
                }
            }
        }
        st.backlog.retain(|o| !o.lines.is_empty());
        st.started.retain(|o| st.backlog.iter().any(|b| b.id == *o));
        st.active_splits = st.started.len() as u32;
        for s in &mut st.stations {
            s.at.clear();
            s.inbound.clear();
            s.open_requests.clear();
        }
        st.stored = st.pods.iter().map(|p| p.id).collect();
        periods.push(asg);
    }
    Ok(ReplayReport { visits, completed: st.backlog.is_empty(), periods })
}
