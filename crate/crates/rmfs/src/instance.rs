//! Instance generation: order stream, SKU popularity, shared-storage pod filling, and layouts.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Order, OrderId, Pod, PodId, SkuId};
use crate::path::Kinematics;
use crate::{Error, Result};

pub const INSTANCE_SCHEMA: &str = "rmfs.instance/1";
pub const LAYOUT_SCHEMA: &str = "rmfs.layout/1";

const STREAM_LENGTHS: u64 = 1;
const STREAM_SKUS: u64 = 2;
const STREAM_PODS: u64 = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceParams {
    pub num_orders: u32,
    pub num_skus: u32,
    pub num_pods: u32,
    pub skus_per_pod: u32,
    #[serde(default = "default_length_p")]
    pub length_p: f64,
    /// Defaults to 5/|I| (capped below 1 for very small assortments).
    #[serde(default)]
    pub popularity_p: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

fn default_length_p() -> f64 {
    0.4
}

impl InstanceParams {
    pub fn new(num_orders: u32, num_skus: u32, num_pods: u32, skus_per_pod: u32, seed: u64) -> Self {
        InstanceParams {
            num_orders,
            num_skus,
            num_pods,
            skus_per_pod,
            length_p: default_length_p(),
            popularity_p: None,
            seed,
        }
    }

    pub fn popularity(&self) -> f64 {
        self.popularity_p.unwrap_or_else(|| (5.0 / self.num_skus as f64).min(0.9))
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.popularity();
        if self.num_orders == 0 || self.num_skus == 0 || self.num_pods == 0 || self.skus_per_pod == 0 {
            return Err(Error::Contract("orders, skus, pods and alpha must all be at least 1".into()));
        }
        if !(self.length_p > 0.0 && self.length_p < 1.0) || !(p > 0.0 && p < 1.0) {
            return Err(Error::Contract("distribution parameters must lie strictly between 0 and 1".into()));
        }
        if (self.num_pods as u64) * (self.skus_per_pod as u64) < self.num_skus as u64 {
            return Err(Error::Contract(format!(
                "{} pods with {} SKUs each cannot store all {} SKUs",
                self.num_pods, self.skus_per_pod, self.num_skus
            )));
        }
        Ok(())
    }

    /// Label used in result tables.
    pub fn label(&self) -> String {
        format!(
            "O{}-I{}-P{}-a{}",
            self.num_orders, self.num_skus, self.num_pods, self.skus_per_pod
        )
    }
}

/// The 24-instance grid: orders × SKUs × pods × SKUs per pod.
pub fn table1_grid(seed: u64) -> Vec<InstanceParams> {
    let mut out = Vec::new();
    for orders in [50, 150, 250] {
        for skus in [20, 100] {
            for pods in [50, 100] {
                for alpha in [2, 3] {
                    out.push(InstanceParams::new(orders, skus, pods, alpha, seed));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub schema: String,
    pub params: InstanceParams,
    pub num_skus: u32,
    pub orders: Vec<Order>,
    pub pods: Vec<Pod>,
}

impl Instance {
    pub fn from_parts(num_skus: u32, orders: Vec<Order>, pods: Vec<Pod>) -> Self {
        let params = InstanceParams::new(orders.len() as u32, num_skus, pods.len() as u32, 1, 0);
        Instance { schema: INSTANCE_SCHEMA.into(), params, num_skus, orders, pods }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Instance = serde_json::from_str(text)?;
        if inst.schema != INSTANCE_SCHEMA {
            return Err(Error::Contract(format!("expected schema {INSTANCE_SCHEMA}, found {}", inst.schema)));
        }
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn total_lines(&self) -> usize {
        self.orders.iter().map(|o| o.lines.len()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationSpec {
    pub capacity: u32,
}

/// Warehouse geometry and resources. Storage sits in blocks of `block_width` × `block_height`
/// cells separated by one-cell aisles; stations dock on the west aisle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub schema: String,
    pub block_cols: u32,
    pub block_rows: u32,
    #[serde(default = "default_block_width")]
    pub block_width: u32,
    #[serde(default = "default_block_height")]
    pub block_height: u32,
    pub stations: Vec<StationSpec>,
    pub robots: u32,
    #[serde(default = "default_queue")]
    pub queue_length: u32,
    #[serde(default)]
    pub packing_capacity: Option<u32>,
    #[serde(default)]
    pub kinematics: Kinematics,
}

fn default_block_width() -> u32 {
    4
}
fn default_block_height() -> u32 {
    2
}
fn default_queue() -> u32 {
    12
}

impl Layout {
    /// 504 storage locations in 2×4 blocks, 4 stations of 15 items, 8 robots.
    pub fn standard() -> Self {
        Layout::new(9, 7, 4, 15, 8)
    }

    /// 48 storage locations, 2 stations of 6 items, 4 robots.
    pub fn desk() -> Self {
        Layout::new(3, 2, 2, 6, 4)
    }

    pub fn new(block_cols: u32, block_rows: u32, stations: u32, capacity: u32, robots: u32) -> Self {
        Layout {
            schema: LAYOUT_SCHEMA.into(),
            block_cols,
            block_rows,
            block_width: default_block_width(),
            block_height: default_block_height(),
            stations: (0..stations).map(|_| StationSpec { capacity }).collect(),
            robots,
            queue_length: default_queue(),
            packing_capacity: None,
            kinematics: Kinematics::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let layout: Layout = serde_json::from_str(text)?;
        if layout.schema != LAYOUT_SCHEMA {
            return Err(Error::Contract(format!("expected schema {LAYOUT_SCHEMA}, found {}", layout.schema)));
        }
        Ok(layout)
    }

    pub fn width(&self) -> u32 {
        self.block_cols * self.block_width + self.block_cols + 1
    }

    pub fn height(&self) -> u32 {
        self.block_rows * self.block_height + self.block_rows + 1
    }

    pub fn storage_locations(&self) -> u32 {
        self.block_cols * self.block_rows * self.block_width * self.block_height
    }

    pub fn max_capacity(&self) -> u32 {
        self.stations.iter().map(|s| s.capacity).max().unwrap_or(0)
    }

    pub fn validate(&self, num_pods: u32) -> Result<()> {
        if self.stations.is_empty() || self.robots == 0 {
            return Err(Error::Contract("a layout needs at least one station and one robot".into()));
        }
        if self.stations.iter().any(|s| s.capacity == 0) {
            return Err(Error::Contract("station capacity must be positive".into()));
        }
        if self.storage_locations() < num_pods {
            return Err(Error::Contract(format!(
                "{} storage locations cannot hold {} pods",
                self.storage_locations(),
                num_pods
            )));
        }
        if 2 * self.stations.len() as u32 > self.height() {
            return Err(Error::Contract("the west aisle is too short for the stations".into()));
        }
        if self.robots > num_pods.max(1) {
            return Err(Error::Contract("robots park under pods, so there must be at least as many pods".into()));
        }
        Ok(())
    }
}

/// Truncated geometric draw over 1..=n: P(k) ∝ (1-p)^(k-1)·p.
pub fn sample_order_length<R: Rng>(rng: &mut R, length_p: f64, n: u32) -> u32 {
    let q = 1.0 - length_p;
    let z = 1.0 - q.powi(n as i32);
    let u: f64 = rng.gen_range(0.0..1.0);
    let k = ((1.0 - u * z).ln() / q.ln()).ceil();
    (k as u32).clamp(1, n)
}

/// Draws k distinct SKUs; each draw picks a remaining rank r with weight (1-p)^(r-1)·p.
pub fn sample_order_skus<R: Rng>(rng: &mut R, k: u32, num_skus: u32, popularity_p: f64) -> Result<Vec<SkuId>> {
    if k > num_skus {
        return Err(Error::Contract(format!("cannot draw {k} distinct SKUs from {num_skus}")));
    }
    let q = 1.0 - popularity_p;
    let mut remaining: Vec<(u32, f64)> = (1..=num_skus).map(|r| (r, q.powi(r as i32 - 1) * popularity_p)).collect();
    let mut out = Vec::with_capacity(k as usize);
    for _ in 0..k {
        let total: f64 = remaining.iter().map(|(_, w)| w).sum();
        let mut target = rng.gen_range(0.0..1.0) * total;
        let mut pick = remaining.len() - 1;
        for (idx, (_, w)) in remaining.iter().enumerate() {
            if target < *w {
                pick = idx;
                break;
            }
            target -= w;
        }
        out.push(SkuId(remaining.remove(pick).0));
    }
    out.sort();
    Ok(out)
}

/// Cuts a concatenated SKU sequence into pods of α slots; repeats within a pod collapse.
pub fn cut_pods(sequence: &[SkuId], num_pods: u32, alpha: u32) -> Vec<Vec<SkuId>> {
    (0..num_pods as usize)
        .map(|j| {
            let mut skus = sequence[j * alpha as usize..(j + 1) * alpha as usize].to_vec();
            skus.sort();
            skus.dedup();
            skus
        })
        .collect()
}

pub fn fill_pods<R: Rng>(rng: &mut R, num_pods: u32, alpha: u32, sku_ids: &[SkuId]) -> Vec<Vec<SkuId>> {
    let need = num_pods as usize * alpha as usize;
    let mut sequence = Vec::with_capacity(need + sku_ids.len());
    while sequence.len() < need {
        let mut perm = sku_ids.to_vec();
        perm.shuffle(rng);
        sequence.extend(perm);
    }
    cut_pods(&sequence, num_pods, alpha)
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Generates orders and pods; order length is truncated to the largest station capacity.
pub fn gen_instance(params: &InstanceParams, layout: &Layout) -> Result<Instance> {
    params.validate()?;
    layout.validate(params.num_pods)?;
    let mut lengths = stream(params.seed, STREAM_LENGTHS);
    let mut skus = stream(params.seed, STREAM_SKUS);
    let mut pods = stream(params.seed, STREAM_PODS);

    let max_len = params.num_skus.min(layout.max_capacity());
    let popularity = params.popularity();
    let mut orders = Vec::with_capacity(params.num_orders as usize);
    for o in 1..=params.num_orders {
        let k = sample_order_length(&mut lengths, params.length_p, max_len);
        let lines = sample_order_skus(&mut skus, k, params.num_skus, popularity)?;
        orders.push(Order { id: OrderId(o), lines, arrival_time: 0.0 });
    }
    let sku_ids: Vec<SkuId> = (1..=params.num_skus).map(SkuId).collect();
    let pods = fill_pods(&mut pods, params.num_pods, params.skus_per_pod, &sku_ids)
        .into_iter()
        .enumerate()
        .map(|(j, skus)| Pod { id: PodId(j as u32 + 1), skus })
        .collect();
    Ok(Instance { schema: INSTANCE_SCHEMA.into(), params: params.clone(), num_skus: params.num_skus, orders, pods })
}
