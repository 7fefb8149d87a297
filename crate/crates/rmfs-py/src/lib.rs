//! Python bindings. Everything crosses the boundary as JSON text.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rmfs::instance::{Instance, InstanceParams, Layout};
use rmfs::model::{assignment_to_json, state_from_json, validate_assignment};
use rmfs::sim::{Policy, SimOptions};
use rmfs::solver::{SolverConfig, brute_force_oracle, solve_state};
use rmfs::{ModelParams, Variant};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn layout(spec: &str) -> PyResult<Layout> {
    match spec {
        "desk" => Ok(Layout::desk()),
        "standard" => Ok(Layout::standard()),
        text => Layout::from_json(text).map_err(err),
    }
}

/// Generates an instance; returns its JSON.
#[pyfunction]
#[pyo3(signature = (orders, skus, pods, alpha, seed = 1, layout_spec = "standard"))]
fn gen_instance(orders: u32, skus: u32, pods: u32, alpha: u32, seed: u64, layout_spec: &str) -> PyResult<String> {
    let p = InstanceParams::new(orders, skus, pods, alpha, seed);
    Ok(rmfs::instance::gen_instance(&p, &layout(layout_spec)?).map_err(err)?.to_json())
}

/// Solves one period of a state file; returns the assignment JSON.
#[pyfunction]
#[pyo3(signature = (state_json, variant = "integrated", packing = None))]
fn solve(state_json: &str, variant: &str, packing: Option<u32>) -> PyResult<String> {
    let state = state_from_json(state_json).map_err(err)?;
    let variant: Variant = variant.parse().map_err(err)?;
    let params = ModelParams { packing_capacity: packing, ..Default::default() };
    let (asg, _) = solve_state(&state, variant, &params, &SolverConfig::default()).map_err(err)?;
    let v = validate_assignment(&state, &asg, variant, &params);
    if !v.is_empty() {
        return Err(err(rmfs::Error::Invalid(v)));
    }
    Ok(assignment_to_json(&asg))
}

/// Exhaustive optimum of a small state.
#[pyfunction]
#[pyo3(signature = (state_json, variant = "integrated"))]
fn oracle(state_json: &str, variant: &str) -> PyResult<i64> {
    let state = state_from_json(state_json).map_err(err)?;
    let variant: Variant = variant.parse().map_err(err)?;
    Ok(brute_force_oracle(&state, variant, &ModelParams::default()).map_err(err)?.0)
}

/// Simulates an instance; returns the report JSON without the trace.
#[pyfunction]
#[pyo3(signature = (instance_json, policy = "integrated", seed = 1, prefilter = None, layout_spec = "desk"))]
fn simulate(instance_json: &str, policy: &str, seed: u64, prefilter: Option<usize>, layout_spec: &str) -> PyResult<String> {
    let inst = Instance::from_json(instance_json).map_err(err)?;
    let policy: Policy = policy.parse().map_err(err)?;
    let options = SimOptions { prefilter, ..Default::default() };
    let r = rmfs::sim::run(&inst, &layout(layout_spec)?, policy, &ModelParams::default(), seed, &options).map_err(err)?;
    serde_json::to_string(&r).map_err(err)
}

#[pymodule]
fn rmfs_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(gen_instance, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
