//! Scenario configuration: JSON file plus command-line overrides.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use amp_core::{Domain, SpectralFn, SystemSpectrum};

/// Inclusive-start sweep `start, start + step, ...` up to `stop`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SweepRange {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.step <= 0.0 || self.step.is_nan() {
            bail!("sweep step must be positive, got {}", self.step);
        }
        if self.stop < self.start {
            bail!(
                "sweep range must be ordered, got start {} > stop {}",
                self.start,
                self.stop
            );
        }
        let mut out = Vec::new();
        let mut i = 0usize;
        loop {
            let v = self.start + self.step * i as f64;
            if v > self.stop + 1e-12 * self.step {
                break;
            }
            out.push(v);
            i += 1;
        }
        if out.is_empty() {
            bail!("sweep range is empty");
        }
        Ok(out)
    }

    /// Parse the flag form `start:stop:step`.
    pub fn parse_flag(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            bail!("expected start:stop:step, got {s:?}");
        }
        Ok(SweepRange {
            start: parts[0].trim().parse().context("sweep start")?,
            stop: parts[1].trim().parse().context("sweep stop")?,
            step: parts[2].trim().parse().context("sweep step")?,
        })
    }
}

/// Parsed scenario file. Unknown fields are rejected so typos surface as
/// config errors with the offending name.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub domain: Option<Domain<f64>>,
    /// Forcing coefficients for the scalar command.
    pub h: Option<Vec<f64>>,
    /// Coupling matrix `[a, b, c, d]` for the system command.
    pub coupling: Option<[f64; 4]>,
    pub mu: Option<f64>,
    /// `"mu1_minus + eps"`, `"mu1_plus - 0.25"`, ... resolved against the
    /// system spectrum; the token `eps` reads the `eps` field.
    pub mu_rule: Option<String>,
    pub eps: Option<f64>,
    pub f: Option<Vec<f64>>,
    pub g: Option<Vec<f64>>,
    /// `"k*f"`: build `g` by scaling `f` with the `k` field.
    pub g_rule: Option<String>,
    pub k: Option<f64>,
    /// Pattern id (`T2`, `R3`, `T4`, `R5`, `T6`, `R7`).
    pub theorem: Option<String>,
    /// `mu` sweep for the scalar and system commands.
    pub sweep: Option<SweepRange>,
    /// Gain sweep for the system command (requires `g_rule = "k*f"`).
    pub k_sweep: Option<SweepRange>,
    /// Explicit forcing family for the delta command.
    pub family: Option<Vec<Vec<f64>>>,
    /// Shorthand family: principal mode plus `s` times the second mode.
    pub family_s: Option<Vec<f64>>,
    pub lambda_cap: Option<f64>,
    pub q: Option<f64>,
    pub scan_step: Option<f64>,
    pub bisection_tol: Option<f64>,
    /// Proportionality constant for the window budget of the `T2`-family
    /// hypotheses.
    pub budget_k: Option<f64>,
    pub modes: Option<usize>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let cfg: ScenarioConfig = serde_json::from_str(&text)
            .with_context(|| format!("cannot parse config {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        for (name, tol) in [
            ("tol", self.tol),
            ("scan_step", self.scan_step),
            ("bisection_tol", self.bisection_tol),
            ("q", self.q),
        ] {
            if let Some(t) = tol {
                if t <= 0.0 || t.is_nan() {
                    bail!("{name} must be positive, got {t}");
                }
            }
        }
        if let Some(s) = &self.sweep {
            s.values()?;
        }
        if let Some(s) = &self.k_sweep {
            s.values()?;
        }
        Ok(())
    }

    pub fn domain(&self) -> Domain<f64> {
        self.domain.unwrap_or_else(Domain::unit_interval)
    }

    /// Forcing pair `(f, g)`, honoring `g_rule`; `k_override` replaces the
    /// config gain.
    pub fn forcing_pair(
        &self,
        k_override: Option<f64>,
    ) -> Result<(SpectralFn<f64>, SpectralFn<f64>)> {
        let domain = self.domain();
        let f_coeffs = self
            .f
            .clone()
            .ok_or_else(|| anyhow::anyhow!("config field `f` is required"))?;
        let f = SpectralFn::new(domain, f_coeffs).map_err(anyhow::Error::from)?;
        let g = match (&self.g, &self.g_rule) {
            (Some(_), Some(_)) => bail!("config fields `g` and `g_rule` are mutually exclusive"),
            (Some(coeffs), None) => SpectralFn::new(domain, coeffs.clone())?,
            (None, Some(rule)) => {
                let rule = rule.replace(' ', "");
                if rule != "k*f" {
                    bail!("unsupported g_rule {rule:?}; expected \"k*f\"");
                }
                let k = k_override
                    .or(self.k)
                    .ok_or_else(|| anyhow::anyhow!("g_rule \"k*f\" needs the `k` field or --k"))?;
                f.scaled(k)
            }
            (None, None) => bail!("config needs either `g` or `g_rule`"),
        };
        Ok((f, g))
    }

    /// Resolve `mu` from the literal field or from `mu_rule` against the
    /// system spectrum.
    pub fn resolve_mu(&self, spectrum: Option<&SystemSpectrum<f64>>) -> Result<f64> {
        match (&self.mu, &self.mu_rule) {
            (Some(_), Some(_)) => bail!("config fields `mu` and `mu_rule` are mutually exclusive"),
            (Some(mu), None) => Ok(*mu),
            (None, Some(rule)) => {
                let spectrum = spectrum.ok_or_else(|| {
                    anyhow::anyhow!("mu_rule needs a coupling matrix to resolve against")
                })?;
                resolve_mu_rule(rule, self.eps, spectrum)
            }
            (None, None) => bail!("config needs either `mu` or `mu_rule`"),
        }
    }
}

fn resolve_mu_rule(rule: &str, eps: Option<f64>, spectrum: &SystemSpectrum<f64>) -> Result<f64> {
    let tokens: Vec<&str> = rule.split_whitespace().collect();
    let (base_name, rest) = match tokens.as_slice() {
        [base] => (*base, None),
        [base, op, term] => (*base, Some((*op, *term))),
        _ => bail!("cannot parse mu_rule {rule:?}; expected e.g. \"mu1_minus + eps\""),
    };
    let base = match base_name {
        "mu1_minus" => spectrum.mu1_minus,
        "mu1_plus" => spectrum.mu1_plus,
        other => bail!("unknown mu_rule base {other:?}; expected mu1_minus or mu1_plus"),
    };
    let Some((op, term)) = rest else {
        return Ok(base);
    };
    let term = if term == "eps" {
        eps.ok_or_else(|| anyhow::anyhow!("mu_rule uses `eps` but the config has no eps field"))?
    } else {
        term.parse::<f64>()
            .with_context(|| format!("mu_rule term {term:?}"))?
    };
    match op {
        "+" => Ok(base + term),
        "-" => Ok(base - term),
        other => bail!("unknown mu_rule operator {other:?}"),
    }
}
