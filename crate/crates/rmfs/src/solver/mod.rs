//! Depth-first branch and bound for the 0-1 period models.
//!
//! Each node propagates row bounds to a fixpoint and is pruned against the
//! incumbent with the larger of the plain objective bound and the cover bound.

mod bound;
mod engine;
mod heuristic;
pub mod oracle;

use std::collections::HashMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::ilp::{self, IlpProblem, Relation, Role, RowKind, VarKind};
use crate::model::{Assignment, ModelParams, OrderId, Variant, WarehouseState};
use crate::{Error, Result};
use bound::Bounder;
use engine::Engine;

pub use oracle::brute_force_oracle;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branching {
    /// Orders with more lines first, then pods by how many lines they could serve.
    #[default]
    Demand,
    /// Variables in index order, smaller values first.
    IndexOrder,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
    pub branching: Branching,
    /// Ignore the wall clock so that results depend only on the node limit.
    pub deterministic: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { time_limit: None, node_limit: Some(5_000_000), branching: Branching::Demand, deterministic: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    /// A limit was hit; the incumbent may not be optimal.
    Feasible,
    Infeasible,
    /// A limit was hit before any solution was found.
    NoSolution,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub status: Status,
    pub values: Option<Vec<i64>>,
    pub objective: Option<i64>,
    pub nodes: u64,
    pub wall_time: Duration,
}

/// Verifies domains and rows of `values` and returns the objective.
pub fn check_certificate(pb: &IlpProblem, values: &[i64]) -> Result<i64> {
    if values.len() != pb.variables.len() {
        return Err(Error::Contract(format!("{} values for {} variables", values.len(), pb.variables.len())));
    }
    for (v, &x) in pb.variables.iter().zip(values) {
        if x < 0 || x > v.kind.upper() {
            return Err(Error::Contract(format!("{} = {x} outside its domain", v.name)));
        }
    }
    if let Some(c) = pb.constraints.iter().find(|c| !c.holds(values)) {
        return Err(Error::Contract(format!("row {} violated", c.name)));
    }
    Ok(pb.objective_of(values))
}

/// Variable order and preferred first value for each branching variable.
fn branch_order(pb: &IlpProblem, rule: Branching) -> Vec<(usize, bool)> {
    let n = pb.variables.len();
    if rule == Branching::IndexOrder {
        return (0..n).map(|v| (v, false)).collect();
    }
    let mut lines: HashMap<OrderId, usize> = HashMap::new();
    for v in &pb.variables {
        if let Role::Yios { order, .. } | Role::Yb { order, .. } = v.role {
            *lines.entry(order).or_default() += 1;
        }
    }
    let mut coverage = vec![0usize; n];
    for c in pb.constraints.iter().filter(|c| c.kind == RowKind::Cover) {
        for &(v, a) in &c.terms {
            if a > 0 {
                coverage[v] += 1;
            }
        }
    }
    let splits = pb.meta.variant.is_some_and(Variant::splits);
    // (group, order key, inner rank, index) sorts the variables; the bool is "try 1 first".
    let mut keyed: Vec<((u8, usize, u32, u8, usize), bool)> = pb
        .variables
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let ok = |o: OrderId| (usize::MAX - lines.get(&o).copied().unwrap_or(0), o.0);
            match v.role {
                Role::Yos { order, .. } if !splits => {
                    let (a, b) = ok(order);
                    ((0, a, b, 0, i), true)
                }
                Role::Yo { order } => {
                    let (a, b) = ok(order);
                    ((0, a, b, 0, i), true)
                }
                Role::Yios { order, .. } => {
                    let (a, b) = ok(order);
                    ((0, a, b, 1, i), true)
                }
                Role::Yb { order, .. } => {
                    let (a, b) = ok(order);
                    ((0, a, b, 2, i), false)
                }
                Role::Yos { order, .. } | Role::E { order } => {
                    let (a, b) = ok(order);
                    ((0, a, b, 3, i), true)
                }
                Role::X { .. } => ((1, usize::MAX - coverage[i], 0, 0, i), true),
                _ => ((2, 0, 0, 0, i), false),
            }
        })
        .collect();
    keyed.sort_by_key(|(k, _)| *k);
    keyed.into_iter().map(|((.., i), one)| (i, one)).collect()
}

struct Frame {
    var: usize,
    values: Vec<i64>,
    next: usize,
    mark: usize,
    pos: usize,
}

/// Solves `pb` to optimality unless a limit intervenes.
pub fn solve(pb: &IlpProblem, config: &SolverConfig) -> Solution {
    solve_from(pb, config, None)
}

/// Like [`solve`], starting from a known feasible value vector. Only strictly
/// better solutions replace it.
pub fn solve_from(pb: &IlpProblem, config: &SolverConfig, start_values: Option<Vec<i64>>) -> Solution {
    let start = Instant::now();
    let order = branch_order(pb, config.branching);
    let mut eng = Engine::new(pb);
    let mut bounder = Bounder::new(pb);
    let mut best: Option<(i64, Vec<i64>)> =
        start_values.and_then(|v| check_certificate(pb, &v).ok().map(|obj| (obj, v)));
    let mut nodes: u64 = 0;
    let mut limited = false;
    let time_limit = if config.deterministic { None } else { config.time_limit };

    let plain_bound = |e: &Engine| -> i64 {
        pb.objective.iter().enumerate().map(|(v, &c)| if c >= 0 { c * e.lb[v] } else { c * e.ub[v] }).sum()
    };

    let mut stack: Vec<Frame> = Vec::new();
    let mut at_node = eng.propagate();
    let mut pos = 0usize;
    loop {
        if at_node {
            nodes += 1;
            let mut lb = plain_bound(&eng);
            if let Some(b) = bounder.as_mut() {
                lb = lb.max(b.bound(&eng));
            }
            let pruned = best.as_ref().is_some_and(|(obj, _)| lb >= *obj) || lb == i64::MAX;
            if !pruned {
                while pos < order.len() && eng.fixed(order[pos].0) {
                    pos += 1;
                }
                if pos == order.len() {
                    let values = eng.lb.clone();
                    let obj = pb.objective_of(&values);
                    if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                        best = Some((obj, values));
                    }
                } else {
                    let (var, one_first) = order[pos];
                    let (l, u) = (eng.lb[var], eng.ub[var]);
                    let mut values: Vec<i64> = (l..=u).collect();
                    if one_first && pb.variables[var].kind == VarKind::Binary {
                        values.reverse();
                    }
                    stack.push(Frame { var, values, next: 0, mark: eng.mark(), pos });
                }
            }
            let hit_nodes = config.node_limit.is_some_and(|n| nodes >= n);
            let hit_time = time_limit.is_some_and(|t| start.elapsed() >= t);
            if hit_nodes || hit_time {
                limited = !stack.is_empty();
                break;
            }
        }
        let Some(top) = stack.last_mut() else { break };
        eng.undo(top.mark);
        if top.next == top.values.len() {
            stack.pop();
            at_node = false;
            continue;
        }
        let val = top.values[top.next];
        top.next += 1;
        pos = top.pos;
        let var = top.var;
        at_node = eng.tighten(var, val, val) && eng.propagate();
    }

    let status = match (&best, limited) {
        (Some(_), false) => Status::Optimal,
        (Some(_), true) => Status::Feasible,
        (None, false) => Status::Infeasible,
        (None, true) => Status::NoSolution,
    };
    let (objective, values) = match best {
        Some((o, v)) => (Some(o), Some(v)),
        None => (None, None),
    };
    Solution { status, values, objective, nodes, wall_time: start.elapsed() }
}

/// Builds, solves and decodes one period decision.
pub fn solve_state(
    state: &WarehouseState,
    variant: Variant,
    params: &ModelParams,
    config: &SolverConfig,
) -> Result<(Assignment, Solution)> {
    let pb = ilp::build_model(state, variant, params)?;
    let warm = heuristic::greedy(state, variant, params)
        .into_iter()
        .filter(|a| crate::model::validate_assignment(state, a, variant, params).is_empty())
        .min_by_key(|a| a.objective_value)
        .map(|a| ilp::encode(&pb, &a));
    let sol = solve_from(&pb, config, warm);
    let values = sol.values.as_ref().ok_or_else(|| {
        Error::Contract(format!("{variant} model for period {} has no solution ({:?})", state.period, sol.status))
    })?;
    check_certificate(&pb, values)?;
    let asg = ilp::decode(&pb, values)?;
    Ok((asg, sol))
}

/// Problem with one constraint row per entry, for hand-written tests.
pub fn small_problem(costs: &[i64], uppers: &[i64], rows: &[(Vec<(usize, i64)>, Relation, i64)]) -> IlpProblem {
    let mut pb = IlpProblem::empty("small");
    for (i, (&c, &u)) in costs.iter().zip(uppers).enumerate() {
        let kind = if u == 1 { VarKind::Binary } else { VarKind::Integer { upper: u } };
        pb.add_var(format!("v{i}"), kind, Role::Free, c);
    }
    for (k, (terms, rel, rhs)) in rows.iter().enumerate() {
        pb.add_row(format!("r{k}"), RowKind::Other, terms.clone(), *rel, *rhs);
    }
    pb
}
