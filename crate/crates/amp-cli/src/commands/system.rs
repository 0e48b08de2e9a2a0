//! `amplab system`: coupled solves, pattern verification, sweeps, oracle
//! cross-checks and the maximum-principle gap search.

use std::path::Path;

use anyhow::{anyhow, Result};
use rayon::prelude::*;
use serde::Serialize;

use amp_core::fd::{fd_solve_system, FdGrid};
use amp_core::sampling::{h1_coupling_d_dominant, nonneg_band_limited, rng_from_seed};
use amp_core::{
    classify_sign, coupling_constants, grid_sign, solve_system, spectrum, verify_pattern,
    CouplingMatrix, FnSign, PatternId, PatternVerdict, SignReport, SignVerdict, SpectralFn,
    SystemSpectrum, VerifyOptions,
};
use rand::Rng;

use crate::config::ScenarioConfig;
use crate::output::{write_csv, write_json};
use crate::{fail, Globals};

#[derive(Serialize)]
struct OracleCheck {
    n: usize,
    sup_discrepancy_u: f64,
    sup_discrepancy_v: f64,
}

#[derive(Serialize)]
struct SystemReport {
    coupling: [f64; 4],
    mu: f64,
    spectrum: Option<SystemSpectrum<f64>>,
    pattern: Option<PatternVerdict<f64>>,
    u_report: SignReport<f64>,
    v_report: SignReport<f64>,
    u_coeffs: Vec<f64>,
    v_coeffs: Vec<f64>,
    oracle: Option<OracleCheck>,
}

pub fn run(
    globals: &Globals,
    scenario: &Path,
    k_flag: Option<f64>,
    budget_k_flag: Option<f64>,
    search_mp: Option<usize>,
) -> Result<()> {
    let cfg = ScenarioConfig::load(scenario)?;
    if let Some(count) = search_mp {
        return search_maximum_principle_gap(globals, &cfg, count);
    }

    let domain = cfg.domain();
    let [a, b, c, d] = cfg
        .coupling
        .ok_or_else(|| anyhow!("system needs the `coupling` field [a, b, c, d]"))?;
    let coupling = CouplingMatrix::new(a, b, c, d);
    let spec = spectrum(&coupling, domain.lambda1()).ok();
    let mu = cfg.resolve_mu(spec.as_ref())?;
    let (f, g) = cfg.forcing_pair(k_flag)?;
    let (grid_n, tau_rel) = super::grid_and_tol(globals, &cfg, domain);
    let opts = VerifyOptions {
        grid_n,
        tau_rel,
        q: super::default_q(&cfg, domain),
        k_for_budget: budget_k_flag.or(cfg.budget_k),
    };

    let pattern_id = cfg
        .theorem
        .as_deref()
        .map(|s| s.parse::<PatternId>())
        .transpose()?;

    let pattern = match pattern_id {
        Some(id) => Some(verify_pattern(&coupling, mu, &f, &g, id, &opts)?),
        None => None,
    };
    let (u, v) = solve_system(&coupling, mu, &f, &g)?;
    let u_report = classify_sign(&u, grid_n, tau_rel)?;
    let v_report = classify_sign(&v, grid_n, tau_rel)?;

    let oracle = match globals.oracle {
        Some(n) => {
            let fd = FdGrid::new(domain, n)?;
            let coords = fd.coords();
            let fv = f.evaluate(&coords)?;
            let gv = g.evaluate(&coords)?;
            let (ufd, vfd) = fd_solve_system(&fd, &coupling, mu, &fv, &gv)?;
            let ue = u.evaluate(&coords)?;
            let ve = v.evaluate(&coords)?;
            let sup = |xs: &[f64], ys: &[f64]| {
                xs.iter()
                    .zip(ys)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0f64, f64::max)
            };
            let check = OracleCheck {
                n,
                sup_discrepancy_u: sup(&ufd, &ue),
                sup_discrepancy_v: sup(&vfd, &ve),
            };
            let mut file = std::fs::File::create(globals.out.join("oracle_u_fd.csv"))?;
            amp_core::io::write_grid_csv(&mut file, &coords, &ufd)?;
            let mut file = std::fs::File::create(globals.out.join("oracle_v_fd.csv"))?;
            amp_core::io::write_grid_csv(&mut file, &coords, &vfd)?;
            println!(
                "oracle check (n = {n}): sup discrepancy u {:.3e}, v {:.3e}",
                check.sup_discrepancy_u, check.sup_discrepancy_v
            );
            Some(check)
        }
        None => None,
    };

    println!("mu = {mu}: u {}, v {}", u_report.verdict, v_report.verdict);
    if let Some(p) = &pattern {
        println!(
            "pattern {}: hypotheses_met = {}, predicted (u {}, v {}), holds = {}",
            p.id, p.hypotheses_met, p.predicted_u, p.predicted_v, p.pattern_holds
        );
    }

    let hypotheses_met = pattern.as_ref().map(|p| p.hypotheses_met);
    write_json(
        &globals.out.join("system_report.json"),
        &SystemReport {
            coupling: [a, b, c, d],
            mu,
            spectrum: spec,
            pattern,
            u_report,
            v_report,
            u_coeffs: u.coeffs().to_vec(),
            v_coeffs: v.coeffs().to_vec(),
            oracle,
        },
    )?;

    if cfg.sweep.is_some() || cfg.k_sweep.is_some() {
        run_sweep(globals, &cfg, &coupling, mu, &f, grid_n, tau_rel, k_flag)?;
    }

    if globals.require_hypotheses {
        if let Some(false) = hypotheses_met {
            return Err(fail(5, "pattern hypotheses violated (strict mode)"));
        }
    }
    Ok(())
}

/// Sweep over `mu` (and the gain `k` when `g_rule = "k*f"`), buffered and
/// written in sweep order.
#[allow(clippy::too_many_arguments)]
fn run_sweep(
    globals: &Globals,
    cfg: &ScenarioConfig,
    coupling: &CouplingMatrix<f64>,
    base_mu: f64,
    f: &SpectralFn<f64>,
    grid_n: usize,
    tau_rel: f64,
    k_flag: Option<f64>,
) -> Result<()> {
    let mus = match &cfg.sweep {
        Some(s) => s.values()?,
        None => vec![base_mu],
    };
    let base_k = k_flag.or(cfg.k);
    let ks = match &cfg.k_sweep {
        Some(s) => {
            if cfg.g_rule.is_none() {
                return Err(anyhow!("k_sweep needs g_rule = \"k*f\""));
            }
            s.values()?
        }
        None => vec![base_k.unwrap_or(f64::NAN)],
    };

    let mut cases = Vec::new();
    for &mu in &mus {
        for &k in &ks {
            cases.push((mu, k));
        }
    }
    let rows: Vec<String> = cases
        .par_iter()
        .map(|&(mu, k)| {
            let g = if k.is_nan() {
                cfg.forcing_pair(None)
                    .map_err(|e| amp_core::AmpError::InvalidParam(e.to_string()))?
                    .1
            } else {
                f.scaled(k)
            };
            let (u, v) = solve_system(coupling, mu, f, &g)?;
            let ur = classify_sign(&u, grid_n, tau_rel)?;
            let vr = classify_sign(&v, grid_n, tau_rel)?;
            Ok(format!(
                "{mu},{k},{},{},{},{},{},{},{},{}",
                ur.verdict,
                vr.verdict,
                ur.min_interior,
                ur.max_interior,
                vr.min_interior,
                vr.max_interior,
                ur.boundary_min_normal_derivative,
                vr.boundary_min_normal_derivative
            ))
        })
        .collect::<amp_core::Result<Vec<_>>>()?;

    let path = globals.out.join("system_sweep.csv");
    write_csv(
        &path,
        "mu,k,u_verdict,v_verdict,u_min,u_max,v_min,v_max,u_boundary_min_nd,v_boundary_min_nd",
        &rows,
    )?;
    println!("system sweep: {} rows -> {}", rows.len(), path.display());
    Ok(())
}

#[derive(Serialize)]
struct MpSearchRow {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    mu: f64,
    u_verdict: SignVerdict,
    v_verdict: SignVerdict,
    weighted_gap_sign: FnSign,
}

/// Random search for maximum-principle failures with `a < d`,
/// `mu < mu_1^-` and nonnegative forcing, with the weighted-gap condition
/// deliberately NOT enforced. Whether failures exist in this regime is an
/// open question; the search only reports what it finds.
fn search_maximum_principle_gap(
    globals: &Globals,
    cfg: &ScenarioConfig,
    count: usize,
) -> Result<()> {
    let domain = cfg.domain();
    let modes = globals.modes.or(cfg.modes).unwrap_or(16);
    let (grid_n, tau_rel) = super::grid_and_tol(globals, cfg, domain);
    let mut rng = rng_from_seed(globals.seed);
    let mut deviations = Vec::new();
    for _ in 0..count {
        let m = h1_coupling_d_dominant(&mut rng);
        let s = spectrum(&m, domain.lambda1()).expect("sampler keeps D > 0");
        let mu = s.mu1_minus - rng.gen_range(0.1..2.0);
        let f = nonneg_band_limited(&mut rng, domain, modes, (0.5, 2.0));
        let g = nonneg_band_limited(&mut rng, domain, modes, (0.5, 2.0));
        let (u, v) = solve_system(&m, mu, &f, &g)?;
        let ur = classify_sign(&u, grid_n, tau_rel)?;
        let vr = classify_sign(&v, grid_n, tau_rel)?;
        if ur.verdict != SignVerdict::StrictlyPositive
            || vr.verdict != SignVerdict::StrictlyPositive
        {
            let t_star = coupling_constants(&m)?.t_star;
            let gap = g.combine(t_star, &f, -1.0)?;
            deviations.push(MpSearchRow {
                a: m.a,
                b: m.b,
                c: m.c,
                d: m.d,
                mu,
                u_verdict: ur.verdict,
                v_verdict: vr.verdict,
                weighted_gap_sign: grid_sign(&gap, grid_n, tau_rel)?,
            });
        }
    }
    let rows: Vec<String> = deviations
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{:?},{:?},{:?}",
                r.a, r.b, r.c, r.d, r.mu, r.u_verdict, r.v_verdict, r.weighted_gap_sign
            )
        })
        .collect();
    let path = globals.out.join("mp_search.csv");
    write_csv(
        &path,
        "a,b,c,d,mu,u_verdict,v_verdict,weighted_gap_sign",
        &rows,
    )?;
    println!(
        "mp search: {count} instances, {} deviations -> {}",
        deviations.len(),
        path.display()
    );
    Ok(())
}
