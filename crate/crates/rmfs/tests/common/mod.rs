//! Helpers shared by the integration test targets.

use std::collections::{HashSet, VecDeque};

use rmfs::path::*;

/// Fewest ticks until both robots stand on their goals, over all joint moves
/// without shared cells or swaps.
pub fn joint_bfs(grid: &Grid, a: (u32, u32), b: (u32, u32)) -> Option<u64> {
    let moves = |c: u32| -> Vec<u32> {
        let mut m = vec![c];
        m.extend(grid.neighbors(c));
        m
    };
    let mut seen = HashSet::from([(a.0, b.0)]);
    let mut q = VecDeque::from([((a.0, b.0), 0u64)]);
    while let Some(((pa, pb), t)) = q.pop_front() {
        if pa == a.1 && pb == b.1 {
            return Some(t);
        }
        for na in moves(pa) {
            for nb in moves(pb) {
                if na == nb || (na == pb && nb == pa) {
                    continue;
                }
                if seen.insert((na, nb)) {
                    q.push_back(((na, nb), t + 1));
                }
            }
        }
    }
    None
}

pub fn prioritized(grid: &Grid, a: (u32, u32), b: (u32, u32)) -> (u64, CollisionAudit) {
    let mut p = Planner::new(grid.clone());
    let mut audit = CollisionAudit::default();
    let mut arrivals = Vec::new();
    for (robot, (from, to)) in [(0, a), (1, b)] {
        let req = PathRequest { robot, from, to, start: 0, loaded: false, goal: GoalKind::Park, window: None };
        let path = p.plan(&req).unwrap();
        p.table.reserve(robot, &path);
        p.table.hold(robot, to, path.arrival());
        audit.path(robot, &path);
        audit.park(robot, to, path.arrival() + 1);
        arrivals.push(path.arrival());
    }
    (arrivals.into_iter().max().unwrap(), audit)
}
