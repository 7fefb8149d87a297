//! Bound propagation over linear rows with a trail for backtracking.

use crate::ilp::{IlpProblem, Relation};

const NEG: i64 = i64::MIN / 4;
const POS: i64 = i64::MAX / 4;

struct Row {
    terms: Vec<(u32, i64)>,
    lo: i64,
    hi: i64,
}

pub(crate) struct Engine {
    pub lb: Vec<i64>,
    pub ub: Vec<i64>,
    rows: Vec<Row>,
    var_rows: Vec<Vec<(u32, i64)>>,
    min_act: Vec<i64>,
    max_act: Vec<i64>,
    trail: Vec<(u32, i64, i64)>,
    queue: Vec<u32>,
    queued: Vec<bool>,
}

impl Engine {
    pub fn new(pb: &IlpProblem) -> Engine {
        let n = pb.variables.len();
        let lb = vec![0; n];
        let ub: Vec<i64> = pb.variables.iter().map(|v| v.kind.upper()).collect();
        let mut var_rows = vec![Vec::new(); n];
        let mut rows = Vec::with_capacity(pb.constraints.len());
        for (r, c) in pb.constraints.iter().enumerate() {
            let (lo, hi) = match c.relation {
                Relation::Le => (NEG, c.rhs),
                Relation::Eq => (c.rhs, c.rhs),
                Relation::Ge => (c.rhs, POS),
            };
            let mut terms: Vec<(u32, i64)> = Vec::with_capacity(c.terms.len());
            for &(v, a) in &c.terms {
                match terms.iter_mut().find(|(w, _)| *w as usize == v) {
                    Some(t) => t.1 += a,
                    None => terms.push((v as u32, a)),
                }
            }
            terms.retain(|t| t.1 != 0);
            for &(v, a) in &terms {
                var_rows[v as usize].push((r as u32, a));
            }
            rows.push(Row { terms, lo, hi });
        }
        let m = rows.len();
        let mut e = Engine {
            lb,
            ub,
            rows,
            var_rows,
            min_act: vec![0; m],
            max_act: vec![0; m],
            trail: Vec::new(),
            queue: (0..m as u32).collect(),
            queued: vec![true; m],
        };
        for r in 0..m {
            let (mut lo, mut hi) = (0, 0);
            for &(v, a) in &e.rows[r].terms {
                let (l, u) = (e.lb[v as usize], e.ub[v as usize]);
                if a > 0 {
                    lo += a * l;
                    hi += a * u;
                } else {
                    lo += a * u;
                    hi += a * l;
                }
            }
            e.min_act[r] = lo;
            e.max_act[r] = hi;
        }
        e
    }

    pub fn mark(&self) -> usize {
        self.trail.len()
    }

    pub fn fixed(&self, v: usize) -> bool {
        self.lb[v] == self.ub[v]
    }

    fn shift(&mut self, v: usize, new_lb: i64, new_ub: i64) {
        let (dl, du) = (new_lb - self.lb[v], new_ub - self.ub[v]);
        for k in 0..self.var_rows[v].len() {
            let (r, a) = self.var_rows[v][k];
            let r = r as usize;
            if a > 0 {
                self.min_act[r] += a * dl;
                self.max_act[r] += a * du;
            } else {
                self.min_act[r] += a * du;
                self.max_act[r] += a * dl;
            }
        }
        self.lb[v] = new_lb;
        self.ub[v] = new_ub;
    }

    /// Tightens the bounds of `v`; returns false on an empty domain.
    pub fn tighten(&mut self, v: usize, lo: i64, hi: i64) -> bool {
        let new_lb = self.lb[v].max(lo);
        let new_ub = self.ub[v].min(hi);
        if new_lb > new_ub {
            return false;
        }
        if new_lb == self.lb[v] && new_ub == self.ub[v] {
            return true;
        }
        self.trail.push((v as u32, self.lb[v], self.ub[v]));
        self.shift(v, new_lb, new_ub);
        for k in 0..self.var_rows[v].len() {
            let r = self.var_rows[v][k].0;
            if !self.queued[r as usize] {
                self.queued[r as usize] = true;
                self.queue.push(r);
            }
        }
        true
    }

    pub fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (v, l, u) = self.trail.pop().expect("trail entry");
            self.shift(v as usize, l, u);
        }
    }

    fn clear_queue(&mut self) {
        for r in self.queue.drain(..) {
            self.queued[r as usize] = false;
        }
    }

    /// Runs to a fixpoint; returns false if some row cannot be satisfied.
    pub fn propagate(&mut self) -> bool {
        while let Some(r) = self.queue.pop() {
            let r = r as usize;
            self.queued[r] = false;
            let (lo, hi) = (self.rows[r].lo, self.rows[r].hi);
            if self.min_act[r] > hi || self.max_act[r] < lo {
                self.clear_queue();
                return false;
            }
            for k in 0..self.rows[r].terms.len() {
                let (v, a) = self.rows[r].terms[k];
                let v = v as usize;
                let (l, u) = (self.lb[v], self.ub[v]);
                if l == u {
                    continue;
                }
                let (mut new_l, mut new_u) = (l, u);
                if hi < POS {
                    let slack = hi - self.min_act[r];
                    if a > 0 {
                        new_u = new_u.min(l + slack / a);
                    } else {
                        new_l = new_l.max(u - slack / -a);
                    }
                }
                if lo > NEG {
                    let slack = self.max_act[r] - lo;
                    if a > 0 {
                        new_l = new_l.max(u - slack / a);
                    } else {
                        new_u = new_u.min(l + slack / -a);
                    }
                }
                if (new_l != l || new_u != u) && !self.tighten(v, new_l, new_u) {
                    self.clear_queue();
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::{Role, RowKind, VarKind};

    fn problem(rows: &[(&[(usize, i64)], Relation, i64)], n: usize) -> IlpProblem {
        let mut pb = IlpProblem::empty("t");
        for i in 0..n {
            pb.add_var(format!("v{i}"), VarKind::Binary, Role::Free, 1);
        }
        for (terms, rel, rhs) in rows {
            pb.add_row("r", RowKind::Other, terms.to_vec(), *rel, *rhs);
        }
        pb
    }

    #[test]
    fn equality_fixes_remaining_variable() {
        let pb = problem(&[(&[(0, 1), (1, 1)], Relation::Eq, 1)], 2);
        let mut e = Engine::new(&pb);
        assert!(e.propagate());
        assert!(e.tighten(0, 0, 0));
        assert!(e.propagate());
        assert_eq!((e.lb[1], e.ub[1]), (1, 1));
    }

    #[test]
    fn conflict_is_detected_and_undone() {
        let pb = problem(&[(&[(0, 1), (1, 1)], Relation::Le, 1), (&[(0, 1), (1, 1)], Relation::Ge, 1)], 2);
        let mut e = Engine::new(&pb);
        assert!(e.propagate());
        let m = e.mark();
        assert!(e.tighten(0, 1, 1));
        assert!(e.propagate());
        assert_eq!(e.ub[1], 0);
        e.undo(m);
        assert_eq!((e.lb[0], e.ub[0], e.lb[1], e.ub[1]), (0, 1, 0, 1));
        assert!(e.tighten(0, 0, 0) && e.propagate());
        assert_eq!(e.lb[1], 1);
    }
}
