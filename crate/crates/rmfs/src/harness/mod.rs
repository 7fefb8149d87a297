//! Experiment runs and reports: instances × methods × repetitions, one CSV row per
//! run, and grouped summaries relative to the sequential baseline.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::instance::{InstanceParams, Layout, gen_instance};
use crate::model::ModelParams;
use crate::sim::{self, Policy, SimOptions, SimReport};
use crate::solver::SolverConfig;
use crate::{Error, Result};

pub const CONFIG_SCHEMA: &str = "rmfs.experiment/1";
pub const WORKERS_ENV: &str = "RMFS_WORKERS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema: String,
    /// Instance shapes. The seed inside each entry is replaced per repetition.
    pub instances: Vec<InstanceParams>,
    #[serde(default = "Layout::desk")]
    pub layout: Layout,
    #[serde(default = "all_methods")]
    pub methods: Vec<Policy>,
    #[serde(default = "default_reps")]
    pub repetitions: u32,
    #[serde(default = "default_seed")]
    pub seed_base: u64,
    /// Backlog sizes to try; `null` means no prefilter. The sequential method
    /// always runs once, unfiltered.
    #[serde(default = "no_prefilter")]
    pub prefilter: Vec<Option<usize>>,
    #[serde(default)]
    pub params: ModelParams,
    #[serde(default)]
    pub solver: SolverConfig,
}

fn all_methods() -> Vec<Policy> {
    Policy::ALL.to_vec()
}
fn default_reps() -> u32 {
    10
}
fn default_seed() -> u64 {
    1
}
fn no_prefilter() -> Vec<Option<usize>> {
    vec![None]
}

impl ExperimentConfig {
    pub fn new(instances: Vec<InstanceParams>, layout: Layout) -> Self {
        ExperimentConfig {
            schema: CONFIG_SCHEMA.into(),
            instances,
            layout,
            methods: all_methods(),
            repetitions: default_reps(),
            seed_base: default_seed(),
            prefilter: no_prefilter(),
            params: ModelParams::default(),
            solver: SolverConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text)?;
        if c.schema != CONFIG_SCHEMA {
            return Err(Error::Contract(format!("expected schema {CONFIG_SCHEMA}, found {}", c.schema)));
        }
        if c.instances.is_empty() || c.methods.is_empty() || c.repetitions == 0 || c.prefilter.is_empty() {
            return Err(Error::Contract("an experiment needs instances, methods, repetitions and a prefilter list".into()));
        }
        Ok(c)
    }

    /// Every (instance, repetition, method, prefilter) run in output order.
    pub fn jobs(&self) -> Vec<Job> {
        let mut out = Vec::new();
        for (i, p) in self.instances.iter().enumerate() {
            for r in 0..self.repetitions {
                for &method in &self.methods {
                    let sweep: &[Option<usize>] = if method == Policy::Sequential { &[None] } else { &self.prefilter };
                    for &prefilter in sweep {
                        let seed = self.seed_base + r as u64;
                        out.push(Job { instance: i, params: InstanceParams { seed, ..p.clone() }, seed, method, prefilter });
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Job {
    pub instance: usize,
    pub params: InstanceParams,
    pub seed: u64,
    pub method: Policy,
    pub prefilter: Option<usize>,
}

/// One CSV row. Metric fields are empty when the run failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub instance: String,
    pub orders: u32,
    pub skus: u32,
    pub pods: u32,
    pub alpha: u32,
    pub method: Policy,
    pub seed: u64,
    pub prefilter: Option<usize>,
    pub status: String,
    pub psv: Option<u64>,
    pub psv_per_order: Option<f64>,
    pub distance_per_order: Option<f64>,
    pub pile_on: Option<f64>,
    pub turnover_backlog: Option<f64>,
    pub turnover_station: Option<f64>,
    pub turnover: Option<f64>,
    pub nodes_first: Option<u64>,
    pub nodes_rest: Option<u64>,
    pub psv_rel: Option<f64>,
    pub distance_rel: Option<f64>,
}

/// Solver wall time of one run, kept apart so the main CSV stays reproducible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub instance: String,
    pub method: Policy,
    pub seed: u64,
    pub prefilter: Option<usize>,
    pub solver_first_s: f64,
    pub solver_rest_s: f64,
}

pub struct Outcome {
    pub rows: Vec<Row>,
    pub timing: Vec<TimingRow>,
}

/// Worker count from the environment; 0 or unset lets rayon decide.
pub fn workers() -> usize {
    std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(0)
}

pub fn run_job(config: &ExperimentConfig, job: &Job) -> Result<SimReport> {
    let inst = gen_instance(&job.params, &config.layout)?;
    let options = SimOptions { prefilter: job.prefilter, solver: config.solver.clone(), ..Default::default() };
    let mut params = config.params;
    if params.packing_capacity.is_none() {
        params.packing_capacity = config.layout.packing_capacity;
    }
    sim::run(&inst, &config.layout, job.method, &params, job.seed, &options)
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Outcome> {
    let jobs = config.jobs();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers())
        .build()
        .map_err(|e| Error::Contract(format!("worker pool: {e}")))?;
    let results: Vec<Result<SimReport>> = pool.install(|| jobs.par_iter().map(|j| run_job(config, j)).collect());

    let mut rows = Vec::with_capacity(jobs.len());
    let mut timing = Vec::new();
    for (job, res) in jobs.iter().zip(results) {
        let label = job.params.label();
        let mut row = Row {
            instance: label.clone(),
            orders: job.params.num_orders,
            skus: job.params.num_skus,
            pods: job.params.num_pods,
            alpha: job.params.skus_per_pod,
            method: job.method,
            seed: job.seed,
            prefilter: job.prefilter,
            status: "ok".into(),
            psv: None,
            psv_per_order: None,
            distance_per_order: None,
            pile_on: None,
            turnover_backlog: None,
            turnover_station: None,
            turnover: None,
            nodes_first: None,
            nodes_rest: None,
            psv_rel: None,
            distance_rel: None,
        };
        match res {
            Ok(r) => {
                let n = job.params.num_orders.max(1) as f64;
                row.psv = Some(r.pod_station_visits);
                row.psv_per_order = Some(r.pod_station_visits as f64 / n);
                row.distance_per_order = Some(r.robot_distance / n);
                row.pile_on = Some(r.pile_on.value());
                row.turnover_backlog = Some(r.mean_backlog_time());
                row.turnover_station = Some(r.mean_station_time());
                row.turnover = Some(r.mean_backlog_time() + r.mean_station_time());
                row.nodes_first = Some(r.solver_nodes(true));
                row.nodes_rest = Some(r.solver_nodes(false));
                timing.push(TimingRow {
                    instance: label,
                    method: job.method,
                    seed: job.seed,
                    prefilter: job.prefilter,
                    solver_first_s: r.solver_time(true).as_secs_f64(),
                    solver_rest_s: r.solver_time(false).as_secs_f64(),
                });
            }
            Err(e) => row.status = format!("error: {e}"),
        }
        rows.push(row);
    }
    normalize(&mut rows, jobs.iter().map(|j| j.instance));
    Ok(Outcome { rows, timing })
}

/// Fills the relative columns against the sequential row of the same instance and seed.
fn normalize(rows: &mut [Row], instance_of: impl Iterator<Item = usize>) {
    let keys: Vec<(usize, u64)> = instance_of.zip(rows.iter()).map(|(i, r)| (i, r.seed)).collect();
    let mut base: BTreeMap<(usize, u64), (Option<f64>, Option<f64>)> = BTreeMap::new();
    for (k, r) in keys.iter().zip(rows.iter()) {
        if r.method == Policy::Sequential {
            base.insert(*k, (r.psv_per_order, r.distance_per_order));
        }
    }
    for (k, r) in keys.iter().zip(rows.iter_mut()) {
        if let Some(&(bp, bd)) = base.get(k) {
            r.psv_rel = ratio(r.psv_per_order, bp);
            r.distance_rel = ratio(r.distance_per_order, bd);
        }
    }
}

fn ratio(x: Option<f64>, base: Option<f64>) -> Option<f64> {
    match (x, base) {
        (Some(x), Some(b)) if b > 0.0 => Some(x / b),
        (Some(0.0), Some(_)) => Some(1.0),
        _ => None,
    }
}

pub fn write_rows<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads experiment rows; a missing column or an empty file is an error.
pub fn read_rows<R: Read>(r: R) -> Result<Vec<Row>> {
    let mut rd = csv::Reader::from_reader(r);
    let headers = rd.headers()?.clone();
    for col in ["instance", "method", "seed", "status", "psv_per_order", "distance_per_order"] {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::Contract(format!("experiment CSV lacks column {col}")));
        }
    }
    let rows = rd.deserialize().collect::<std::result::Result<Vec<Row>, _>>()?;
    if rows.is_empty() {
        return Err(Error::Contract("experiment CSV has no rows".into()));
    }
    Ok(rows)
}

pub fn read_timing<R: Read>(r: R) -> Result<Vec<TimingRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let rows = rd.deserialize().collect::<std::result::Result<Vec<TimingRow>, _>>()?;
    Ok(rows)
}

pub const METRICS: [&str; 7] =
    ["psv_per_order", "distance_per_order", "pile_on", "turnover_backlog", "turnover_station", "turnover", "solver_s"];

fn metric(r: &Row, name: &str) -> Option<f64> {
    match name {
        "psv_per_order" => r.psv_per_order,
        "distance_per_order" => r.distance_per_order,
        "pile_on" => r.pile_on,
        "turnover_backlog" => r.turnover_backlog,
        "turnover_station" => r.turnover_station,
        "turnover" => r.turnover,
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub instance: String,
    pub method: Policy,
    pub prefilter: Option<usize>,
    pub metric: String,
    pub runs: usize,
    pub failed: usize,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    /// Mean over the sequential mean of the same instance; not given for solver time.
    pub ratio: Option<f64>,
}

/// Mean and population standard deviation; `None` for no values.
pub fn mean_std(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    Some((m, var.sqrt()))
}

/// Groups rows by instance, method and prefilter. Solver seconds come from the
/// timing rows when given.
pub fn summarize(rows: &[Row], timing: &[TimingRow]) -> Vec<Summary> {
    type Key = (String, Policy, Option<usize>);
    let mut groups: BTreeMap<Key, Vec<&Row>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.instance.clone(), r.method, r.prefilter)).or_default().push(r);
    }
    let mut secs: BTreeMap<(Key, u64), f64> = BTreeMap::new();
    for t in timing {
        secs.insert(((t.instance.clone(), t.method, t.prefilter), t.seed), t.solver_first_s + t.solver_rest_s);
    }
    let mut out = Vec::new();
    for (key, members) in &groups {
        let failed = members.iter().filter(|r| r.status != "ok").count();
        for name in METRICS {
            let values: Vec<f64> = if name == "solver_s" {
                members.iter().filter_map(|r| secs.get(&(key.clone(), r.seed)).copied()).collect()
            } else {
                members.iter().filter_map(|r| metric(r, name)).collect()
            };
            if name == "solver_s" && values.is_empty() {
                continue;
            }
            let ms = mean_std(&values);
            out.push(Summary {
                instance: key.0.clone(),
                method: key.1,
                prefilter: key.2,
                metric: name.into(),
                runs: members.len(),
                failed,
                mean: ms.map(|m| m.0),
                std: ms.map(|m| m.1),
                ratio: None,
            });
        }
    }
    let base: BTreeMap<(String, String), f64> = out
        .iter()
        .filter(|s| s.method == Policy::Sequential && s.prefilter.is_none())
        .filter_map(|s| s.mean.map(|m| ((s.instance.clone(), s.metric.clone()), m)))
        .collect();
    for s in out.iter_mut().filter(|s| s.metric != "solver_s") {
        if let (Some(m), Some(&b)) = (s.mean, base.get(&(s.instance.clone(), s.metric.clone()))) {
            s.ratio = ratio(Some(m), Some(b));
        }
    }
    out
}

/// Aligned text table with one line per group and `mean±std (ratio)` cells.
pub fn render_table(summary: &[Summary]) -> String {
    let mut cells: BTreeMap<(String, Policy, Option<usize>), BTreeMap<String, String>> = BTreeMap::new();
    for s in summary {
        let text = match (s.mean, s.std) {
            (Some(m), Some(sd)) => match s.ratio {
                Some(r) => format!("{m:.3}±{sd:.3} ({r:.3})"),
                None => format!("{m:.3}±{sd:.3}"),
            },
            _ => "-".into(),
        };
        cells.entry((s.instance.clone(), s.method, s.prefilter)).or_default().insert(s.metric.clone(), text);
    }
    let cols: Vec<&str> = METRICS.iter().copied().filter(|m| summary.iter().any(|s| s.metric == *m)).collect();
    let mut lines = vec![];
    let mut head = vec!["instance".to_string(), "method".into(), "prefilter".into()];
    head.extend(cols.iter().map(|c| c.to_string()));
    lines.push(head);
    for ((inst, method, pf), row) in &cells {
        let mut line = vec![inst.clone(), method.to_string(), pf.map_or("-".into(), |n| n.to_string())];
        line.extend(cols.iter().map(|c| row.get(*c).cloned().unwrap_or_else(|| "-".into())));
        lines.push(line);
    }
    let widths: Vec<usize> =
        (0..lines[0].len()).map(|i| lines.iter().map(|l| l[i].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for l in &lines {
        let padded: Vec<String> = l.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out += padded.join("  ").trim_end();
        out.push('\n');
    }
    out
}

/// Total solver time of a set of timing rows.
pub fn total_solver_time(timing: &[TimingRow]) -> Duration {
    timing.iter().map(|t| Duration::from_secs_f64(t.solver_first_s + t.solver_rest_s)).sum()
}
