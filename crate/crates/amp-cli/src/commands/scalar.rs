//! `amplab scalar`: sweep the scalar resolvent over `mu` and classify signs.

use std::path::PathBuf;

use anyhow::{anyhow, Result};
use rayon::prelude::*;
use serde::Serialize;

use amp_core::fd::{fd_solve_scalar, FdGrid};
use amp_core::{classify_sign, solve_resolvent, SignReport, SpectralFn};

use crate::config::{ScenarioConfig, SweepRange};
use crate::output::{write_csv, write_json};
use crate::Globals;

#[derive(Serialize)]
struct OracleCheck {
    n: usize,
    mu: f64,
    sup_discrepancy: f64,
}

#[derive(Serialize)]
struct ScalarSummary {
    h: Vec<f64>,
    sweep: SweepRange,
    grid_n: usize,
    tau_rel: f64,
    /// `(mu_before, mu_after, verdict_before, verdict_after)` transitions.
    verdict_changes: Vec<(f64, f64, String, String)>,
    oracle: Option<OracleCheck>,
}

pub fn run(
    globals: &Globals,
    config: Option<PathBuf>,
    h_flag: Option<Vec<f64>>,
    sweep_flag: Option<SweepRange>,
) -> Result<()> {
    let cfg = match config {
        Some(path) => ScenarioConfig::load(&path)?,
        None => ScenarioConfig::default(),
    };
    let domain = cfg.domain();
    let h_coeffs = h_flag
        .or_else(|| cfg.h.clone())
        .ok_or_else(|| anyhow!("scalar needs forcing coefficients (config `h` or --h)"))?;
    let h = SpectralFn::new(domain, h_coeffs.clone())?;
    let sweep = sweep_flag
        .or(cfg.sweep)
        .ok_or_else(|| anyhow!("scalar needs a mu sweep (config `sweep` or --sweep)"))?;
    let (grid_n, tau_rel) = super::grid_and_tol(globals, &cfg, domain);

    let mus = sweep.values()?;
    let reports: Vec<(f64, SignReport<f64>)> = mus
        .par_iter()
        .map(|&mu| {
            let z = solve_resolvent(&h, mu)?;
            Ok((mu, classify_sign(&z, grid_n, tau_rel)?))
        })
        .collect::<amp_core::Result<Vec<_>>>()?;

    let rows: Vec<String> = reports
        .iter()
        .map(|(mu, r)| {
            format!(
                "{mu},{},{},{}",
                r.verdict, r.min_interior, r.boundary_min_normal_derivative
            )
        })
        .collect();
    let csv_path = globals.out.join("scalar_sweep.csv");
    write_csv(&csv_path, "mu,verdict,min_interior,boundary_min_nd", &rows)?;

    let verdict_changes: Vec<(f64, f64, String, String)> = reports
        .windows(2)
        .filter(|w| w[0].1.verdict != w[1].1.verdict)
        .map(|w| {
            (
                w[0].0,
                w[1].0,
                w[0].1.verdict.to_string(),
                w[1].1.verdict.to_string(),
            )
        })
        .collect();

    let oracle = match globals.oracle {
        Some(n) => {
            let mu = mus[0];
            let fd = FdGrid::new(domain, n)?;
            let coords = fd.coords();
            let rhs = h.evaluate(&coords)?;
            let z_fd = fd_solve_scalar(&fd, mu, &rhs)?;
            let z = solve_resolvent(&h, mu)?.evaluate(&coords)?;
            let sup = z_fd
                .iter()
                .zip(&z)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            let mut file = std::fs::File::create(globals.out.join("oracle_z_fd.csv"))?;
            amp_core::io::write_grid_csv(&mut file, &coords, &z_fd)?;
            println!("oracle check at mu = {mu}: sup discrepancy {sup:.3e} (n = {n})");
            Some(OracleCheck {
                n,
                mu,
                sup_discrepancy: sup,
            })
        }
        None => None,
    };

    write_json(
        &globals.out.join("scalar_report.json"),
        &ScalarSummary {
            h: h_coeffs,
            sweep,
            grid_n,
            tau_rel,
            verdict_changes: verdict_changes.clone(),
            oracle,
        },
    )?;

    println!(
        "scalar sweep: {} points -> {}",
        reports.len(),
        csv_path.display()
    );
    for (before, after, from, to) in &verdict_changes {
        println!("verdict changes from {from} to {to} between mu = {before} and mu = {after}");
    }
    Ok(())
}
