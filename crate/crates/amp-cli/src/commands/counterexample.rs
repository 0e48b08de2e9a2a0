//! `amplab counterexample`: the fixed reference scenario, parts 1 and 2.

use anyhow::Result;

use amp_core::{counterexample_part1, counterexample_part2};

use crate::output::{write_csv, write_json};
use crate::Globals;

pub fn run(globals: &Globals, part: u8, values: Option<Vec<f64>>) -> Result<()> {
    let grid_n = globals.grid.unwrap_or(1024);
    let tau_rel = globals.tol.unwrap_or(amp_core::DEFAULT_TAU_REL);
    match part {
        1 => {
            let ks = values.unwrap_or_else(|| vec![1.0, 20.0 / 3.0, 7.0]);
            let mut rows = Vec::new();
            let mut reports = Vec::new();
            let mut failing = Vec::new();
            for &k in &ks {
                let r = counterexample_part1::<f64>(k, grid_n, tau_rel)?;
                rows.push(format!(
                    "{k},{},{},{},{},{},{}",
                    r.v1,
                    r.v2,
                    r.v1_closed_form,
                    r.v2_closed_form,
                    r.v_report.verdict,
                    r.max_principle_fails
                ));
                if r.max_principle_fails {
                    failing.push(k);
                }
                reports.push(r);
            }
            let path = globals.out.join("counterexample_part1.csv");
            write_csv(
                &path,
                "k,v1,v2,v1_closed_form,v2_closed_form,verdict,mp_fails",
                &rows,
            )?;
            write_json(&globals.out.join("counterexample_part1.json"), &reports)?;
            if failing.is_empty() {
                println!("maximum principle holds for every requested gain (threshold k = 20/3)");
            } else {
                println!(
                    "maximum principle fails at k = {failing:?} (threshold k = 20/3), see {}",
                    path.display()
                );
            }
        }
        2 => {
            let epss = values.unwrap_or_else(|| vec![0.1, 0.01, 0.001]);
            let mut rows = Vec::new();
            let mut reports = Vec::new();
            let mut mixed = Vec::new();
            for &eps in &epss {
                let r = counterexample_part2::<f64>(eps, grid_n, tau_rel)?;
                rows.push(format!(
                    "{eps},{},{},{},{},{},{}",
                    r.mu, r.k, r.u1, r.u2, r.ratio, r.u_report.verdict
                ));
                if r.u_report.verdict == amp_core::SignVerdict::Mixed {
                    mixed.push(eps);
                }
                reports.push(r);
            }
            let path = globals.out.join("counterexample_part2.csv");
            write_csv(&path, "eps,mu,k,u1,u2,ratio,verdict", &rows)?;
            write_json(&globals.out.join("counterexample_part2.json"), &reports)?;
            if mixed.is_empty() {
                println!("u kept a strict sign for every requested eps");
            } else {
                println!(
                    "u changes sign for eps = {mixed:?} despite f >= 0 >= g, see {}",
                    path.display()
                );
            }
        }
        _ => unreachable!("clap restricts part to 1..=2"),
    }
    Ok(())
}
