//! `amplab selftest`: seeded property sweeps, one summary line per check.

use anyhow::Result;
use rand::Rng;
use std::f64::consts::PI;

use amp_core::sampling::{
    band_limited, h1_coupling, h1_coupling_a_dominant, h1_coupling_d_dominant, rng_from_seed,
};
use amp_core::{
    counterexample_part1, decouple_difference, decouple_sum, empirical_amp_interval,
    solve_resolvent, solve_system, spectrum, window_equivalences, AmpScanOptions, Domain,
    SpectralFn,
};

use crate::{fail, Globals};

struct Outcome {
    failures: usize,
    detail: String,
}

pub fn run(globals: &Globals) -> Result<()> {
    let seed = globals.seed;
    let checks: Vec<(&str, Outcome)> = vec![
        ("window equivalences", window_sweep(seed)?),
        ("decoupling consistency", decoupling_sweep(seed)?),
        ("sign reversal", sign_reversal_sweep(seed)?),
        ("resolvent residual", residual_sweep(seed)?),
        ("counterexample closed forms", counterexample_forms()?),
        ("two-mode interval closed form", sharp_example()?),
    ];

    let mut failed = 0usize;
    for (name, outcome) in &checks {
        let status = if outcome.failures == 0 { "ok" } else { "FAIL" };
        println!("selftest {name}: {status} ({})", outcome.detail);
        failed += outcome.failures;
    }
    if failed > 0 {
        return Err(fail(1, format!("selftest: {failed} check(s) failed")));
    }
    Ok(())
}

fn window_sweep(seed: u64) -> Result<Outcome> {
    let mut rng = rng_from_seed(seed);
    let total = 10_000usize;
    let mut discarded = 0usize;
    let mut failures = 0usize;
    for _ in 0..total {
        let m = h1_coupling(&mut rng);
        let lambda1 = rng.gen_range(0.5..15.0);
        let mu = rng.gen_range(-15.0..15.0);
        let delta = rng.gen_range(0.0..10.0);
        let w = window_equivalences(&m, lambda1, mu, delta)?;
        if w.boundary_margin() < 1e-9 {
            discarded += 1;
        } else if !w.consistent() {
            failures += 1;
        }
    }
    Ok(Outcome {
        failures,
        detail: format!("{total} instances, {discarded} discarded, {failures} violations"),
    })
}

fn decoupling_sweep(seed: u64) -> Result<Outcome> {
    let d = Domain::unit_interval();
    let modes = 8usize;
    let mut rng = rng_from_seed(seed.wrapping_add(1));
    let mut worst = 0.0f64;
    for _ in 0..300 {
        let m = loop {
            let m = h1_coupling_a_dominant(&mut rng);
            if m.c <= -0.5 {
                break m;
            }
        };
        let (xi1, xi2) = m.eigenvalues().expect("D > 0");
        let mu = loop {
            let mu = rng.gen_range(-10.0..10.0);
            let ok = (1..=modes).all(|k| {
                let lam = (k as f64 * PI).powi(2);
                (lam - mu - xi1).abs() >= 0.5 && (lam - mu - xi2).abs() >= 0.5
            });
            if ok {
                break mu;
            }
        };
        let f = band_limited(&mut rng, d, modes, 0.5);
        let g = band_limited(&mut rng, d, modes, 0.5);
        let dec = decouple_sum(&m, mu, &f, &g)?;
        let (u, v) = solve_system(&m, mu, &f, &g)?;
        for i in 0..modes {
            worst = worst.max((u.coeff(i) + dec.t * v.coeff(i) - dec.w.coeff(i)).abs());
        }
    }
    for _ in 0..300 {
        let m = loop {
            let m = h1_coupling_d_dominant(&mut rng);
            if m.c <= -0.5 {
                break m;
            }
        };
        let s = spectrum(&m, d.lambda1()).expect("D > 0");
        let mu = s.mu1_minus - rng.gen_range(0.1..2.0);
        let f = band_limited(&mut rng, d, modes, 0.5);
        let g = band_limited(&mut rng, d, modes, 0.5);
        let dec = decouple_difference(&m, mu, &f, &g)?;
        let (u, v) = solve_system(&m, mu, &f, &g)?;
        for i in 0..modes {
            worst = worst.max((dec.u.coeff(i) - u.coeff(i)).abs());
            worst = worst.max((dec.v.coeff(i) - v.coeff(i)).abs());
        }
    }
    Ok(Outcome {
        failures: usize::from(worst > 1e-10),
        detail: format!("600 instances, worst coefficient gap {worst:.2e}"),
    })
}

fn sign_reversal_sweep(seed: u64) -> Result<Outcome> {
    let d = Domain::unit_interval();
    let mut rng = rng_from_seed(seed.wrapping_add(2));
    let mut failures = 0usize;
    for _ in 0..100 {
        let m = h1_coupling(&mut rng);
        let (xi1, xi2) = m.eigenvalues().expect("D > 0");
        let mu = loop {
            let mu = rng.gen_range(-10.0..10.0);
            let ok = (1..=4usize).all(|k| {
                let lam = (k as f64 * PI).powi(2);
                (lam - mu - xi1).abs() >= 0.2 && (lam - mu - xi2).abs() >= 0.2
            });
            if ok {
                break mu;
            }
        };
        let f = band_limited(&mut rng, d, 4, 1.0);
        let g = band_limited(&mut rng, d, 4, 1.0);
        let (u, v) = solve_system(&m, mu, &f, &g)?;
        let (nu, nv) = solve_system(&m, mu, &f.scaled(-1.0), &g.scaled(-1.0))?;
        for i in 0..4 {
            if nu.coeff(i) != -u.coeff(i) || nv.coeff(i) != -v.coeff(i) {
                failures += 1;
            }
        }
    }
    Ok(Outcome {
        failures,
        detail: format!("100 instances, {failures} exactness violations"),
    })
}

fn residual_sweep(seed: u64) -> Result<Outcome> {
    let d = Domain::unit_interval();
    let mut rng = rng_from_seed(seed.wrapping_add(3));
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let h = band_limited(&mut rng, d, 12, 5.0);
        let mu = loop {
            let mu = rng.gen_range(-50.0..50.0);
            if h.eigenpairs().iter().all(|p| (p.lambda - mu).abs() > 1e-3) {
                break mu;
            }
        };
        let z = solve_resolvent(&h, mu)?;
        for (i, p) in h.eigenpairs().iter().enumerate() {
            worst = worst.max(((p.lambda - mu) * z.coeff(i) - h.coeff(i)).abs());
        }
    }
    Ok(Outcome {
        failures: usize::from(worst > 1e-12),
        detail: format!("200 instances, worst residual {worst:.2e}"),
    })
}

fn counterexample_forms() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for k in [0.0, 1.0, 7.0, 20.0 / 3.0] {
        let r = counterexample_part1::<f64>(k, 256, 1e-9)?;
        worst = worst.max((r.v1 - r.v1_closed_form).abs());
        worst = worst.max((r.v2 - r.v2_closed_form).abs());
    }
    Ok(Outcome {
        failures: usize::from(worst > 1e-10),
        detail: format!("worst coefficient gap {worst:.2e}"),
    })
}

fn sharp_example() -> Result<Outcome> {
    let d: Domain<f64> = Domain::unit_interval();
    let lambda1 = d.lambda1();
    let gap = d.lambda2() - lambda1;
    let h = SpectralFn::new(d, vec![1.0, 1.0])?;
    let opts = AmpScanOptions {
        grid_n: 512,
        ..Default::default()
    };
    let ivl = empirical_amp_interval(&h, lambda1 + 0.9 * gap, 1.0, 1e-7, &opts)?;
    let expected = gap / 3.0;
    let rel = (ivl.delta_star - expected).abs() / expected;
    Ok(Outcome {
        failures: usize::from(rel > 1e-5),
        detail: format!("relative gap {rel:.2e}"),
    })
}
