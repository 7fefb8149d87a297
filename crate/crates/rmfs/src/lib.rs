//! Integrated pick-order assignment and pick-pod selection for robotic mobile
//! fulfillment systems: exact period models, a sequential baseline, and a
//! warehouse simulator to compare them.

pub mod baseline;
pub mod fixtures;
pub mod harness;
pub mod ilp;
pub mod instance;
pub mod model;
pub mod path;
pub mod prefilter;
pub mod sim;
pub mod solver;

pub use model::{
    Assignment, ModelParams, Order, OrderId, Pod, PodId, SkuId, StationId, StationState, Variant, Violation,
    WarehouseState,
};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("invalid input: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("simulation failed: {0}")]
    Sim(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
