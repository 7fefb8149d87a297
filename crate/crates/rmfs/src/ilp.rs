//! Period models as 0-1 integer programs, their decoding, and LP-format export.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::model::{Assignment, ModelParams, OrderId, PodId, SkuId, StationId, Variant, WarehouseState};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Binary,
    /// Non-negative integer with an upper bound implied by the model.
    Integer { upper: i64 },
}

impl VarKind {
    pub fn upper(self) -> i64 {
        match self {
            VarKind::Binary => 1,
            VarKind::Integer { upper } => upper,
        }
    }
}

/// What a variable means; drives decoding, LP column order and the solver's branching.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    X { pod: PodId, station: StationId },
    Yos { order: OrderId, station: StationId },
    Yios { order: OrderId, sku: SkuId, station: StationId },
    Yo { order: OrderId },
    E { order: OrderId },
    Yb { order: OrderId, sku: SkuId },
    Yl { order: OrderId },
    U { station: StationId },
    Free,
}

impl Role {
    /// Column rank for LP export: x, y_os, y_ios, y_o, e_o, y^b, y^l, u.
    pub fn rank(&self) -> u8 {
        match self {
            Role::X { .. } => 0,
            Role::Yos { .. } => 1,
            Role::Yios { .. } => 2,
            Role::Yo { .. } => 3,
            Role::E { .. } => 4,
            Role::Yb { .. } => 5,
            Role::Yl { .. } => 6,
            Role::U { .. } => 7,
            Role::Free => 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub role: Role,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// Which family a row belongs to; the solver uses `Cover` and `Capacity` rows for bounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowKind {
    Link,
    OneStation,
    Capacity,
    Cover,
    Forced,
    LineSum,
    ActiveBound,
    LineBound,
    Packing,
    Other,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub kind: RowKind,
    pub terms: Vec<(usize, i64)>,
    pub relation: Relation,
    pub rhs: i64,
}

impl Constraint {
    pub fn holds(&self, values: &[i64]) -> bool {
        let lhs: i64 = self.terms.iter().map(|&(v, a)| a * values[v]).sum();
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemMeta {
    pub variant: Option<Variant>,
    pub w_u: u32,
    pub stations: Vec<StationId>,
    pub active_splits: u32,
    pub started: Vec<OrderId>,
    pub packing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IlpProblem {
    pub name: String,
    pub variables: Vec<Variable>,
    /// Minimization coefficients, one per variable.
    pub objective: Vec<i64>,
    pub constraints: Vec<Constraint>,
    pub meta: ProblemMeta,
}

impl IlpProblem {
    pub fn empty(name: &str) -> Self {
        IlpProblem {
            name: name.into(),
            variables: Vec::new(),
            objective: Vec::new(),
            constraints: Vec::new(),
            meta: ProblemMeta {
                variant: None,
                w_u: 1,
                stations: Vec::new(),
                active_splits: 0,
                started: Vec::new(),
                packing: false,
            },
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, role: Role, cost: i64) -> usize {
        self.variables.push(Variable { name: name.into(), kind, role });
        self.objective.push(cost);
        self.variables.len() - 1
    }

    pub fn add_row(&mut self, name: impl Into<String>, kind: RowKind, terms: Vec<(usize, i64)>, relation: Relation, rhs: i64) {
        self.constraints.push(Constraint { name: name.into(), kind, terms, relation, rhs });
    }

    pub fn objective_of(&self, values: &[i64]) -> i64 {
        self.objective.iter().zip(values).map(|(c, v)| c * v).sum()
    }

    pub fn count_role(&self, f: impl Fn(&Role) -> bool) -> usize {
        self.variables.iter().filter(|v| f(&v.role)).count()
    }

    pub fn find(&self, role: Role) -> Option<usize> {
        self.variables.iter().position(|v| v.role == role)
    }
}

/// Index of model variables during construction.
struct Vars {
    x: BTreeMap<(PodId, StationId), usize>,
    yos: BTreeMap<(OrderId, StationId), usize>,
    yios: BTreeMap<(OrderId, SkuId, StationId), usize>,
    yo: BTreeMap<OrderId, usize>,
    e: BTreeMap<OrderId, usize>,
    yb: BTreeMap<(OrderId, SkuId), usize>,
    u: BTreeMap<StationId, usize>,
}

fn build(state: &WarehouseState, params: &ModelParams, variant: Variant) -> IlpProblem {
    let mut pb = IlpProblem::empty(&format!("{variant} period {}", state.period));
    pb.meta = ProblemMeta {
        variant: Some(variant),
        w_u: params.w_u,
        stations: state.stations.iter().map(|s| s.id).collect(),
        active_splits: state.active_splits,
        started: state.started.clone(),
        packing: false,
    };
    let n_st = state.stations.len() as i64;
    let mut v = Vars {
        x: BTreeMap::new(),
        yos: BTreeMap::new(),
        yios: BTreeMap::new(),
        yo: BTreeMap::new(),
        e: BTreeMap::new(),
        yb: BTreeMap::new(),
        u: BTreeMap::new(),
    };

    for pod in &state.pods {
        for st in &state.stations {
            let id = pb.add_var(format!("x_p{}_s{}", pod.id.0, st.id.0), VarKind::Binary, Role::X { pod: pod.id, station: st.id }, 1);
            v.x.insert((pod.id, st.id), id);
        }
    }
    for o in &state.backlog {
        for st in &state.stations {
            let id = pb.add_var(
                format!("yos_o{}_s{}", o.id.0, st.id.0),
                VarKind::Binary,
                Role::Yos { order: o.id, station: st.id },
                0,
            );
            v.yos.insert((o.id, st.id), id);
        }
    }
    for o in &state.backlog {
        for &i in &o.lines {
            for st in &state.stations {
                let id = pb.add_var(
                    format!("yios_o{}_i{}_s{}", o.id.0, i.0, st.id.0),
                    VarKind::Binary,
                    Role::Yios { order: o.id, sku: i, station: st.id },
                    0,
                );
                v.yios.insert((o.id, i, st.id), id);
            }
        }
    }
    if variant.splits() {
        for o in &state.backlog {
            let id = pb.add_var(format!("yo_o{}", o.id.0), VarKind::Binary, Role::Yo { order: o.id }, 0);
            v.yo.insert(o.id, id);
        }
        for o in &state.backlog {
            let upper = (n_st - 1).max(0);
            let id = pb.add_var(format!("e_o{}", o.id.0), VarKind::Integer { upper }, Role::E { order: o.id }, 0);
            v.e.insert(o.id, id);
        }
    }
    if variant == Variant::SplitTime {
        for o in &state.backlog {
            for &i in &o.lines {
                let id = pb.add_var(format!("yb_o{}_i{}", o.id.0, i.0), VarKind::Binary, Role::Yb { order: o.id, sku: i }, 0);
                v.yb.insert((o.id, i), id);
            }
        }
    }
    for st in &state.stations {
        let id = pb.add_var(
            format!("u_s{}", st.id.0),
            VarKind::Integer { upper: st.free as i64 },
            Role::U { station: st.id },
            params.w_u as i64,
        );
        v.u.insert(st.id, id);
    }

    use Relation::*;
    for o in &state.backlog {
        let (oi, on) = (o.id, o.id.0);
        for st in &state.stations {
            let (s, sn) = (st.id, st.id.0);
            let yos = v.yos[&(oi, s)];
            for &i in &o.lines {
                let y = v.yios[&(oi, i, s)];
                match variant {
                    Variant::Integrated => pb.add_row(format!("link_o{on}_i{}_s{sn}", i.0), RowKind::Link, vec![(yos, 1), (y, -1)], Eq, 0),
                    _ => pb.add_row(format!("link_o{on}_i{}_s{sn}", i.0), RowKind::Link, vec![(yos, 1), (y, -1)], Ge, 0),
                }
            }
            if variant.splits() {
                pb.add_row(format!("active_o{on}_s{sn}"), RowKind::ActiveBound, vec![(v.yo[&oi], 1), (yos, -1)], Ge, 0);
                let mut terms: Vec<(usize, i64)> = o.lines.iter().map(|i| (v.yios[&(oi, *i, s)], 1)).collect();
                terms.push((yos, -1));
                pb.add_row(format!("lines_o{on}_s{sn}"), RowKind::LineBound, terms, Ge, 0);
            }
        }
        let stations: Vec<(usize, i64)> = state.stations.iter().map(|st| (v.yos[&(oi, st.id)], 1)).collect();
        if variant.splits() {
            let mut terms = stations;
            terms.push((v.e[&oi], -1));
            terms.push((v.yo[&oi], -1));
            pb.add_row(format!("stations_o{on}"), RowKind::OneStation, terms, Eq, 0);
            for &i in &o.lines {
                let mut terms: Vec<(usize, i64)> = state.stations.iter().map(|st| (v.yios[&(oi, i, st.id)], 1)).collect();
                if variant == Variant::SplitTime {
                    terms.push((v.yb[&(oi, i)], 1));
                }
                terms.push((v.yo[&oi], -1));
                pb.add_row(format!("line_o{on}_i{}", i.0), RowKind::LineSum, terms, Eq, 0);
            }
        } else {
            pb.add_row(format!("stations_o{on}"), RowKind::OneStation, stations, Le, 1);
        }
    }
    for st in &state.stations {
        let s = st.id;
        let mut terms: Vec<(usize, i64)> = v.yios.iter().filter(|((_, _, t), _)| *t == s).map(|(_, &id)| (id, 1)).collect();
        terms.push((v.u[&s], 1));
        pb.add_row(format!("capacity_s{}", s.0), RowKind::Capacity, terms, Eq, st.free as i64);
    }
    for o in &state.backlog {
        for &i in &o.lines {
            for st in &state.stations {
                let mut terms: Vec<(usize, i64)> = state
                    .pods
                    .iter()
                    .filter(|p| p.holds(i))
                    .map(|p| (v.x[&(p.id, st.id)], 1))
                    .collect();
                terms.push((v.yios[&(o.id, i, st.id)], -1));
                pb.add_row(format!("cover_o{}_i{}_s{}", o.id.0, i.0, st.id.0), RowKind::Cover, terms, Ge, 0);
            }
        }
    }
    for st in &state.stations {
        for p in st.present() {
            if let Some(&x) = v.x.get(&(p, st.id)) {
                pb.add_row(format!("forced_p{}_s{}", p.0, st.id.0), RowKind::Forced, vec![(x, 1)], Eq, 1);
            }
        }
    }
    pb
}

pub fn build_integrated(state: &WarehouseState, params: &ModelParams) -> IlpProblem {
    build(state, params, Variant::Integrated)
}

pub fn build_split_stations(state: &WarehouseState, params: &ModelParams) -> IlpProblem {
    build(state, params, Variant::SplitStations)
}

pub fn build_split_time(state: &WarehouseState, params: &ModelParams) -> IlpProblem {
    build(state, params, Variant::SplitTime)
}

/// Builds the variant's model and applies the packing extension when a capacity is set.
pub fn build_model(state: &WarehouseState, variant: Variant, params: &ModelParams) -> Result<IlpProblem> {
    let pb = build(state, params, variant);
    match params.packing_capacity {
        Some(_) if variant.splits() => add_packing_capacity(pb, params),
        _ => Ok(pb),
    }
}

/// Limits newly split orders: N·y^l_o ≥ e_o, y^l_o ≤ e_o and n_l + Σ_o y^l_o ≤ C.
/// Under split-over-time a deferred line also marks the order as split.
pub fn add_packing_capacity(mut pb: IlpProblem, params: &ModelParams) -> Result<IlpProblem> {
    let variant = pb.meta.variant.ok_or_else(|| Error::Contract("packing needs a model variant".into()))?;
    if !variant.splits() {
        return Err(Error::Contract("the integrated model has no split orders to limit".into()));
    }
    if pb.meta.packing {
        return Err(Error::Contract("packing capacity already added".into()));
    }
    let Some(cap) = params.packing_capacity else {
        return Ok(pb);
    };
    let headroom = cap as i64 - pb.meta.active_splits as i64;
    if headroom < 0 {
        return Err(Error::Contract(format!(
            "{} active split orders already exceed packing capacity {cap}",
            pb.meta.active_splits
        )));
    }
    let n = pb.meta.stations.len() as i64;
    let orders: Vec<(OrderId, usize)> = pb
        .variables
        .iter()
        .enumerate()
        .filter_map(|(idx, v)| match v.role {
            Role::E { order } if !pb.meta.started.contains(&order) => Some((order, idx)),
            _ => None,
        })
        .collect();
    let mut all = Vec::new();
    for (order, e) in orders {
        let yl = pb.add_var(format!("yl_o{}", order.0), VarKind::Binary, Role::Yl { order }, 0);
        all.push((yl, 1));
        let deferrals: Vec<usize> = pb
            .variables
            .iter()
            .enumerate()
            .filter(|(_, v)| matches!(v.role, Role::Yb { order: o, .. } if o == order))
            .map(|(i, _)| i)
            .collect();
        pb.add_row(format!("split_lo_o{}", order.0), RowKind::Packing, vec![(yl, n), (e, -1)], Relation::Ge, 0);
        let mut terms = vec![(yl, 1), (e, -1)];
        terms.extend(deferrals.iter().map(|&b| (b, -1)));
        pb.add_row(format!("split_hi_o{}", order.0), RowKind::Packing, terms, Relation::Le, 0);
        for b in deferrals {
            pb.add_row(format!("split_b_o{}_{}", order.0, b), RowKind::Packing, vec![(yl, 1), (b, -1)], Relation::Ge, 0);
        }
    }
    pb.add_row("packing", RowKind::Packing, all, Relation::Le, headroom);
    pb.meta.packing = true;
    Ok(pb)
}

/// Maps a complete, feasible value vector back to a sparse assignment.
pub fn decode(pb: &IlpProblem, values: &[i64]) -> Result<Assignment> {
    if values.len() != pb.variables.len() {
        return Err(Error::Contract(format!("{} values for {} variables", values.len(), pb.variables.len())));
    }
    for (v, &val) in pb.variables.iter().zip(values) {
        if val < 0 || val > v.kind.upper() {
            return Err(Error::Contract(format!("{} = {val} is out of range", v.name)));
        }
    }
    if let Some(row) = pb.constraints.iter().find(|c| !c.holds(values)) {
        return Err(Error::Contract(format!("constraint {} is violated", row.name)));
    }
    let mut a = Assignment::default();
    for (v, &val) in pb.variables.iter().zip(values) {
        match v.role {
            Role::X { pod, station } if val == 1 => a.pods.push((pod, station)),
            Role::Yos { order, station } if val == 1 => a.orders.push((order, station)),
            Role::Yios { order, sku, station } if val == 1 => a.lines.push((order, sku, station)),
            Role::Yo { order } if val == 1 => a.active.push(order),
            Role::E { order } if val > 0 => a.extra_stations.push((order, val as u32)),
            Role::Yb { order, sku } if val == 1 => a.deferred.push((order, sku)),
            Role::Yl { order } if val == 1 => a.split.push(order),
            Role::U { station } => a.unused.push((station, val as u32)),
            _ => {}
        }
    }
    if pb.meta.variant == Some(Variant::Integrated) {
        a.active = a.orders.iter().map(|(o, _)| *o).collect();
    }
    a.objective_value = pb.objective_of(values);
    a.normalize();
    Ok(a)
}

/// Inverse of [`decode`]: the value vector of an assignment. Rows are not checked.
pub fn encode(pb: &IlpProblem, a: &Assignment) -> Vec<i64> {
    pb.variables
        .iter()
        .map(|v| match v.role {
            Role::X { pod, station } => a.pods.contains(&(pod, station)) as i64,
            Role::Yos { order, station } => a.orders.contains(&(order, station)) as i64,
            Role::Yios { order, sku, station } => a.lines.contains(&(order, sku, station)) as i64,
            Role::Yo { order } => a.active.contains(&order) as i64,
            Role::E { order } => a.extra_stations.iter().find(|(o, _)| *o == order).map_or(0, |(_, e)| *e as i64),
            Role::Yb { order, sku } => a.deferred.contains(&(order, sku)) as i64,
            Role::Yl { order } => a.split.contains(&order) as i64,
            Role::U { station } => a.unused.iter().find(|(s, _)| *s == station).map_or(0, |(_, u)| *u as i64),
            Role::Free => 0,
        })
        .collect()
}

fn lp_term(out: &mut String, coef: i64, name: &str, first: bool) {
    let sign = if coef < 0 { "-" } else if first { "" } else { "+" };
    let mag = coef.abs();
    let sep = if first && coef >= 0 { "" } else { " " };
    if mag == 1 {
        let _ = write!(out, " {sign}{sep}{name}");
    } else {
        let _ = write!(out, " {sign}{sep}{mag} {name}");
    }
}

/// Writes the problem in the CPLEX LP text format with columns grouped by role.
pub fn to_lp(pb: &IlpProblem) -> String {
    let mut order: Vec<usize> = (0..pb.variables.len()).collect();
    order.sort_by_key(|&i| (pb.variables[i].role.rank(), i));
    let rank: BTreeMap<usize, usize> = order.iter().enumerate().map(|(r, &i)| (i, r)).collect();
    let name = |i: usize| pb.variables[i].name.as_str();

    let mut out = String::new();
    let _ = writeln!(out, "\\ {}", pb.name);
    out.push_str("Minimize\n obj:");
    let mut first = true;
    for &i in &order {
        if pb.objective[i] != 0 {
            lp_term(&mut out, pb.objective[i], name(i), first);
            first = false;
        }
    }
    if first {
        let _ = write!(out, " 0 {}", order.first().map(|&i| name(i)).unwrap_or("x"));
    }
    out.push_str("\nSubject To\n");
    for c in &pb.constraints {
        let mut terms = c.terms.clone();
        terms.sort_by_key(|(v, _)| rank[v]);
        let _ = write!(out, " {}:", c.name);
        if terms.is_empty() {
            let _ = write!(out, " 0 {}", order.first().map(|&i| name(i)).unwrap_or("x"));
        }
        for (k, &(v, a)) in terms.iter().enumerate() {
            lp_term(&mut out, a, name(v), k == 0);
        }
        let rel = match c.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        let _ = writeln!(out, " {rel} {}", c.rhs);
    }
    out.push_str("Bounds\n");
    for &i in &order {
        if let VarKind::Integer { upper } = pb.variables[i].kind {
            let _ = writeln!(out, " 0 <= {} <= {upper}", name(i));
        }
    }
    let generals: Vec<&str> = order.iter().filter(|&&i| pb.variables[i].kind != VarKind::Binary).map(|&i| name(i)).collect();
    if !generals.is_empty() {
        let _ = writeln!(out, "General\n {}", generals.join(" "));
    }
    let binaries: Vec<&str> = order.iter().filter(|&&i| pb.variables[i].kind == VarKind::Binary).map(|&i| name(i)).collect();
    if !binaries.is_empty() {
        let _ = writeln!(out, "Binary\n {}", binaries.join(" "));
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example1;
    use crate::model::{Pod, StationState, validate_assignment};

    fn zero_with_slack(pb: &IlpProblem, state: &WarehouseState) -> Vec<i64> {
        pb.variables
            .iter()
            .map(|v| match v.role {
                Role::U { station } => state.stations.iter().find(|s| s.id == station).unwrap().free as i64,
                Role::X { pod, station } => {
                    state.stations.iter().any(|s| s.id == station && s.present().any(|p| p == pod)) as i64
                }
                _ => 0,
            })
            .collect()
    }

    #[test]
    fn example1_variable_count() {
        let pb = build_integrated(&example1(), &ModelParams::default());
        assert_eq!(pb.variables.len(), 18);
        assert_eq!(pb.count_role(|r| matches!(r, Role::X { .. })), 4);
        assert_eq!(pb.count_role(|r| matches!(r, Role::Yos { .. })), 4);
        assert_eq!(pb.count_role(|r| matches!(r, Role::Yios { .. })), 8);
        assert_eq!(pb.count_role(|r| matches!(r, Role::U { .. })), 2);
    }

    #[test]
    fn docked_pod_is_forced() {
        let mut st = example1();
        st.pods.push(Pod::new(7, [1]));
        st.stations[0].at.push(crate::PodId(7));
        let pb = build_integrated(&st, &ModelParams::default());
        let x = pb.find(Role::X { pod: crate::PodId(7), station: StationId(1) }).unwrap();
        assert!(pb.constraints.iter().any(|c| c.terms == vec![(x, 1)] && c.relation == Relation::Eq && c.rhs == 1));
    }

    #[test]
    fn zero_solution_decodes_to_empty_assignment() {
        let st = example1();
        for variant in Variant::ALL {
            let pb = build_model(&st, variant, &ModelParams::default()).unwrap();
            let vals = zero_with_slack(&pb, &st);
            let a = decode(&pb, &vals).unwrap();
            assert!(a.pods.is_empty() && a.lines.is_empty());
            assert_eq!(a.objective_value, 8);
            assert!(validate_assignment(&st, &a, variant, &ModelParams::default()).is_empty());
        }
    }

    #[test]
    fn encode_inverts_decode() {
        let st = example1();
        for variant in Variant::ALL {
            let pb = build_model(&st, variant, &ModelParams { packing_capacity: Some(2), ..Default::default() }).unwrap();
            let vals = zero_with_slack(&pb, &st);
            assert_eq!(encode(&pb, &decode(&pb, &vals).unwrap()), vals);
        }
    }

    #[test]
    fn decode_rejects_infeasible_vectors() {
        let st = example1();
        let pb = build_integrated(&st, &ModelParams::default());
        let vals = vec![0; pb.variables.len()];
        assert!(decode(&pb, &vals).is_err());
        assert!(decode(&pb, &vals[1..]).is_err());
    }

    #[test]
    fn packing_rejected_for_integrated() {
        let pb = build_integrated(&example1(), &ModelParams::default());
        let p = ModelParams { packing_capacity: Some(1), ..Default::default() };
        assert!(add_packing_capacity(pb, &p).is_err());
    }

    #[test]
    fn packing_adds_one_flag_per_order() {
        let p = ModelParams { packing_capacity: Some(1), ..Default::default() };
        let pb = build_model(&example1(), Variant::SplitStations, &p).unwrap();
        assert_eq!(pb.count_role(|r| matches!(r, Role::Yl { .. })), 2);
        assert!(pb.constraints.iter().any(|c| c.name == "packing" && c.rhs == 1));
    }

    #[test]
    fn lp_export_orders_columns_by_role() {
        let mut st = example1();
        st.stations.push(StationState::new(3, 1));
        let p = ModelParams { packing_capacity: Some(2), ..Default::default() };
        let pb = build_model(&st, Variant::SplitTime, &p).unwrap();
        let lp = to_lp(&pb);
        assert!(lp.starts_with("\\ split_time period 1\nMinimize\n obj: x_p1_s1"));
        let bin = lp.split("Binary\n").nth(1).unwrap();
        let pos = |needle: &str| bin.find(needle).unwrap();
        assert!(pos("x_p2_s3") < pos("yos_o1_s1"));
        assert!(pos("yos_o2_s3") < pos("yios_o1_i1_s1"));
        assert!(pos("yios_o2_i2_s3") < pos("yo_o1"));
        assert!(pos("yo_o2") < pos("yb_o1_i1"));
        assert!(pos("yb_o2_i2") < pos("yl_o1"));
        assert!(lp.contains("General\n e_o1 e_o2 u_s1 u_s2 u_s3"));
        assert!(lp.contains(" capacity_s3: yios_o1_i1_s3 + yios_o1_i2_s3 + yios_o2_i1_s3 + yios_o2_i2_s3 + u_s3 = 1"));
        assert!(lp.ends_with("End\n"));
    }
}
