pub mod counterexample;
pub mod delta;
pub mod scalar;
pub mod selftest;
pub mod system;

use amp_core::{Domain, DEFAULT_GRID_1D, DEFAULT_GRID_2D, DEFAULT_TAU_REL};

use crate::config::ScenarioConfig;
use crate::Globals;

/// Grid size and sign tolerance after applying flag > file > default.
pub fn grid_and_tol(globals: &Globals, cfg: &ScenarioConfig, domain: Domain<f64>) -> (usize, f64) {
    let default_grid = match domain.dim() {
        1 => DEFAULT_GRID_1D,
        _ => DEFAULT_GRID_2D,
    };
    let grid = globals.grid.or(cfg.grid).unwrap_or(default_grid);
    let tol = globals.tol.or(cfg.tol).unwrap_or(DEFAULT_TAU_REL);
    (grid, tol)
}

/// Norm exponent default: 2 on intervals, 3 on rectangles.
pub fn default_q(cfg: &ScenarioConfig, domain: Domain<f64>) -> f64 {
    cfg.q.unwrap_or(match domain.dim() {
        1 => 2.0,
        _ => 3.0,
    })
}
