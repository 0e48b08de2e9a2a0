//! `amplab delta`: empirical validity intervals and the ratio-constant table.

use std::path::PathBuf;

use anyhow::{anyhow, Result};
use rayon::prelude::*;
use serde::Serialize;

use amp_core::{
    empirical_amp_interval, AmpError, AmpInterval, AmpScanOptions, KSample, SpectralFn,
};

use crate::config::ScenarioConfig;
use crate::output::{write_csv, write_json};
use crate::Globals;

#[derive(Serialize)]
struct DeltaReport {
    lambda_cap: f64,
    scan_step: f64,
    bisection_tol: f64,
    q: f64,
    /// Minimal ratio over members below the cap; absent when every member
    /// was cap-bound.
    k_hat: Option<f64>,
    samples: Vec<KSample<f64>>,
    intervals: Vec<AmpInterval<f64>>,
}

pub fn run(
    globals: &Globals,
    config: Option<PathBuf>,
    family_s_flag: Option<Vec<f64>>,
    lambda_cap_flag: Option<f64>,
) -> Result<()> {
    let cfg = match config {
        Some(path) => ScenarioConfig::load(&path)?,
        None => ScenarioConfig::default(),
    };
    let domain = cfg.domain();
    let modes = globals.modes.or(cfg.modes).unwrap_or(16).max(2);

    let family: Vec<SpectralFn<f64>> = if let Some(family) = &cfg.family {
        family
            .iter()
            .map(|coeffs| SpectralFn::new(domain, coeffs.clone()).map_err(anyhow::Error::from))
            .collect::<Result<_>>()?
    } else {
        let s_values = family_s_flag
            .or_else(|| cfg.family_s.clone())
            .ok_or_else(|| {
                anyhow!("delta needs a family (config `family`/`family_s` or --family-s)")
            })?;
        s_values
            .into_iter()
            .map(|s| {
                let mut coeffs = vec![0.0; modes];
                coeffs[0] = 1.0;
                coeffs[1] = s;
                SpectralFn::new(domain, coeffs).map_err(anyhow::Error::from)
            })
            .collect::<Result<_>>()?
    };

    let lambda1 = domain.lambda1();
    let lambda2 = domain.lambda2();
    let lambda_cap = lambda_cap_flag
        .or(cfg.lambda_cap)
        .unwrap_or(lambda1 + 0.9 * (lambda2 - lambda1));
    let scan_step = cfg.scan_step.unwrap_or((lambda_cap - lambda1) / 20.0);
    let bisection_tol = cfg.bisection_tol.unwrap_or(1e-8);
    let (grid_n, tau_rel) = super::grid_and_tol(globals, &cfg, domain);
    let opts = AmpScanOptions {
        q: super::default_q(&cfg, domain),
        grid_n,
        tau_rel,
    };

    let intervals: Vec<AmpInterval<f64>> = family
        .par_iter()
        .map(|h| empirical_amp_interval(h, lambda_cap, scan_step, bisection_tol, &opts))
        .collect::<amp_core::Result<Vec<_>>>()?;

    let samples: Vec<KSample<f64>> = intervals
        .iter()
        .map(|ivl| KSample {
            alpha: ivl.alpha,
            h_perp_norm: ivl.h_perp_norm_q,
            delta_star: ivl.delta_star,
            capped: ivl.capped,
            ratio: ivl.delta_star * ivl.h_perp_norm_q / ivl.alpha,
        })
        .collect();
    let k_hat = samples
        .iter()
        .filter(|s| !s.capped)
        .map(|s| s.ratio)
        .fold(None::<f64>, |acc, r| Some(acc.map_or(r, |a| a.min(r))));
    let capped = samples.iter().filter(|s| s.capped).count();

    // The table and the report are written even when the estimate is
    // undefined, so cap-bound members stay inspectable.
    let rows: Vec<String> = samples
        .iter()
        .map(|s| {
            format!(
                "{},{},{},{},{}",
                s.alpha, s.h_perp_norm, s.delta_star, s.capped, s.ratio
            )
        })
        .collect();
    let csv_path = globals.out.join("k_table.csv");
    write_csv(
        &csv_path,
        "alpha,h_perp_norm,delta_star,capped,ratio",
        &rows,
    )?;
    write_json(
        &globals.out.join("delta_report.json"),
        &DeltaReport {
            lambda_cap,
            scan_step,
            bisection_tol,
            q: opts.q,
            k_hat,
            samples,
            intervals,
        },
    )?;

    match k_hat {
        Some(k_hat) => {
            println!(
                "K estimate {k_hat} over {} members ({capped} cap-bound) -> {}",
                family.len(),
                csv_path.display()
            );
            Ok(())
        }
        None => Err(anyhow::Error::new(AmpError::AllCapBound).context(format!(
            "all {} member(s) reached the search ceiling {lambda_cap}; raise lambda_cap \
             (the cap-bound intervals are recorded in {})",
            family.len(),
            csv_path.display()
        ))),
    }
}
