//! Node-parallel grid evaluation.

use rayon::prelude::*;

use infharm2d_core::linalg2::svd2;
use infharm2d_core::operator::{infinity_laplacian, infinity_laplacian_separated};
use infharm2d_core::phase::sample_node;
use infharm2d_core::{GridJets, GridSpec, Mat2, PhaseMap, SeparatedMap, Vec2};

use crate::error::CliError;

pub const THREADS_ENV: &str = "INFHARM2D_THREADS";

/// Pool sized by `INFHARM2D_THREADS` (unset or `0` lets rayon decide).
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a non-negative integer, got `{v}`")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))
}

fn node_coords(grid: &GridSpec, k: usize) -> (usize, usize) {
    (k % grid.nx, k / grid.nx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRow {
    pub x: f64,
    pub y: f64,
    pub u: Vec2,
    pub du: Mat2,
    pub residual: Vec2,
    pub rank_indicator: f64,
}

/// Value, gradient, residual and rank indicator at every node, row-major.
pub fn field_rows(map: &SeparatedMap, grid: &GridSpec, tol: f64) -> Result<Vec<FieldRow>, CliError> {
    let jets = GridJets::new(map, grid)?;
    let rows = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = node_coords(grid, k);
            let jet = jets.jet(i, j);
            Ok(FieldRow {
                x: grid.x(i),
                y: grid.y(j),
                u: jet.u,
                du: jet.du,
                residual: infinity_laplacian(&jet, tol)?.value,
                rank_indicator: svd2(&jet.du).indicator(),
            })
        })
        .collect::<Result<Vec<_>, infharm2d_core::Error>>()?;
    Ok(rows)
}

/// Same result as the core's sequential builder, with the pointwise
/// classification spread over the pool.
pub fn phase_map(map: &SeparatedMap, grid: &GridSpec, tol: f64) -> Result<PhaseMap, CliError> {
    let jets = GridJets::new(map, grid)?;
    let samples = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = node_coords(grid, k);
            sample_node(&jets.jet(i, j), tol)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PhaseMap::from_pointwise(*grid, tol, &samples)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResidualStats {
    /// Largest `|Δ∞u|` from the index form.
    pub max_index: f64,
    /// Largest `|Δ∞u|` from the separated closed form.
    pub max_separated: f64,
    /// Largest pointwise difference between the two.
    pub max_form_diff: f64,
    pub argmax: (f64, f64),
}

pub fn residual_stats(map: &SeparatedMap, grid: &GridSpec, tol: f64) -> Result<ResidualStats, CliError> {
    let jets = GridJets::new(map, grid)?;
    let per_node = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = node_coords(grid, k);
            let a = infinity_laplacian(&jets.jet(i, j), tol)?.value;
            let b = infinity_laplacian_separated(&jets.fx[i], &jets.gy[j], tol)?;
            Ok((a.norm(), b.norm(), (a - b).norm()))
        })
        .collect::<Result<Vec<_>, infharm2d_core::Error>>()?;
    let mut s = ResidualStats { argmax: (grid.x(0), grid.y(0)), ..Default::default() };
    for (k, &(a, b, d)) in per_node.iter().enumerate() {
        if a > s.max_index {
            let (i, j) = node_coords(grid, k);
            s.argmax = (grid.x(i), grid.y(j));
        }
        s.max_index = s.max_index.max(a);
        s.max_separated = s.max_separated.max(b);
        s.max_form_diff = s.max_form_diff.max(d);
    }
    Ok(s)
}
