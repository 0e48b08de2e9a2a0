//! Scalar resolvent equation, sign classification and the empirical
//! antimaximum-principle window.
//!
//! For `-Δz = μz + h` with Dirichlet conditions the expansion coefficients
//! satisfy `z_m = h_m / (λ_m - μ)`, so the solve is exact for the truncated
//! problem. The antimaximum principle (AMP) holds at `μ` when the solution of
//! a nonnegative forcing with positive principal component is strictly
//! negative inside with strictly positive outward normal derivative; its
//! empirical validity interval above `λ_1` is measured by a coarse scan
//! followed by bisection on the first failure.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Coord, Domain, Grid};
use crate::error::{AmpError, Result};
use crate::real::Real;
use crate::spectral::{NormKind, SpectralFn};
use crate::RESONANCE_GUARD;

/// Sign classification of a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignVerdict {
    /// Negative inside, outward normal derivative positive on the boundary
    /// (the antimaximum-principle conclusion).
    StrictlyNegative,
    /// Positive inside, outward normal derivative negative on the boundary
    /// (the maximum-principle conclusion).
    StrictlyPositive,
    /// Interior values of both signs beyond the tolerance.
    Mixed,
    /// Nothing can be asserted beyond the tolerance.
    Indeterminate,
}

impl std::fmt::Display for SignVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SignVerdict::StrictlyNegative => "StrictlyNegative",
            SignVerdict::StrictlyPositive => "StrictlyPositive",
            SignVerdict::Mixed => "Mixed",
            SignVerdict::Indeterminate => "Indeterminate",
        };
        f.write_str(s)
    }
}

/// Extremum locations backing a [`SignReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignWitnesses<R> {
    pub min_interior: Coord<R>,
    pub max_interior: Coord<R>,
    pub boundary_min: Coord<R>,
    pub boundary_max: Coord<R>,
}

/// Verdict on interior sign and boundary normal-derivative sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignReport<R> {
    pub verdict: SignVerdict,
    pub min_interior: R,
    pub max_interior: R,
    pub boundary_min_normal_derivative: R,
    pub boundary_max_normal_derivative: R,
    pub witnesses: SignWitnesses<R>,
    /// Absolute tolerance that was applied (relative input scaled by the
    /// interior sup of the function).
    pub tolerance: R,
    pub grid_n: usize,
}

/// Solve `-Δz = μz + h`: coefficients `z_m = h_m / (λ_m - μ)`.
///
/// Fails with [`AmpError::Resonance`] when `μ` sits within the relative guard
/// of an eigenvalue whose coefficient in `h` is nonzero.
pub fn solve_resolvent<R: Real>(h: &SpectralFn<R>, mu: R) -> Result<SpectralFn<R>> {
    let guard = R::of(RESONANCE_GUARD);
    let pairs = h.eigenpairs();
    let mut coeffs = Vec::with_capacity(h.len());
    for (c, pair) in h.coeffs().iter().zip(&pairs) {
        if c.is_zero() {
            coeffs.push(R::zero());
            continue;
        }
        let gap = pair.lambda - mu;
        if gap.abs() <= guard * (R::one() + pair.lambda.abs()) {
            return Err(AmpError::Resonance {
                mode: pair.mode().to_string(),
                lambda: pair.lambda.as_f64(),
                mu: mu.as_f64(),
            });
        }
        coeffs.push(*c / gap);
    }
    SpectralFn::new(h.domain(), coeffs)
}

/// Classify interior sign and boundary normal-derivative sign on an `n`-point
/// grid (`n >= 64`). `tau_rel` is relative to the interior sup of `z`.
pub fn classify_sign<R: Real>(z: &SpectralFn<R>, n: usize, tau_rel: R) -> Result<SignReport<R>> {
    if n < 64 {
        return Err(AmpError::InvalidParam(format!(
            "sign classification needs n >= 64, got {n}"
        )));
    }
    let grid = Grid::new(z.domain(), n)?;
    let coords = grid.coords();
    let vals = z.evaluate(&coords)?;

    let mut min_v = vals[0];
    let mut max_v = vals[0];
    let mut min_at = coords[0];
    let mut max_at = coords[0];
    let mut sup = R::zero();
    for (&v, &c) in vals.iter().zip(&coords) {
        if v < min_v {
            min_v = v;
            min_at = c;
        }
        if v > max_v {
            max_v = v;
            max_at = c;
        }
        sup = sup.max(v.abs());
    }

    let profile = z.normal_derivative(n)?;
    let bmin = *profile.min_sample();
    let bmax = *profile.max_sample();

    let tau = tau_rel * sup;
    let verdict = if max_v < -tau && bmin.outward_normal_derivative > tau {
        SignVerdict::StrictlyNegative
    } else if min_v > tau && bmax.outward_normal_derivative < -tau {
        SignVerdict::StrictlyPositive
    } else if min_v < -tau && max_v > tau {
        SignVerdict::Mixed
    } else {
        SignVerdict::Indeterminate
    };

    Ok(SignReport {
        verdict,
        min_interior: min_v,
        max_interior: max_v,
        boundary_min_normal_derivative: bmin.outward_normal_derivative,
        boundary_max_normal_derivative: bmax.outward_normal_derivative,
        witnesses: SignWitnesses {
            min_interior: min_at,
            max_interior: max_at,
            boundary_min: bmin.location,
            boundary_max: bmax.location,
        },
        tolerance: tau,
        grid_n: n,
    })
}

/// Settings shared by the AMP scan operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmpScanOptions<R> {
    /// Exponent for the orthogonal-part norm recorded with the scan.
    pub q: R,
    /// Evaluation grid per axis for classification and norms.
    pub grid_n: usize,
    /// Relative sign tolerance.
    pub tau_rel: R,
}

impl<R: Real> Default for AmpScanOptions<R> {
    fn default() -> Self {
        AmpScanOptions {
            q: R::of(2.0),
            grid_n: crate::DEFAULT_GRID_1D,
            tau_rel: R::of(crate::DEFAULT_TAU_REL),
        }
    }
}

/// Empirically measured AMP validity interval for one forcing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmpInterval<R> {
    /// Empirical sup of valid offsets above `λ_1`.
    pub delta_star: R,
    /// Search ceiling `Λ - λ_1`.
    pub cap: R,
    pub scan_step: R,
    pub bisection_tol: R,
    /// Principal coefficient of the forcing.
    pub alpha: R,
    /// `||h_perp||_q` on the scan grid (exact for `q = 2`).
    pub h_perp_norm_q: R,
    pub q: R,
    /// True when the AMP held at every sampled offset up to the cap.
    pub capped: bool,
    /// Largest `μ` at which the AMP was verified to hold.
    pub last_pass_mu: Option<R>,
    /// Smallest `μ` at which it was verified to fail.
    pub first_fail_mu: Option<R>,
    /// Every evaluated `(μ, verdict)` pair, scan then bisection order.
    pub scan_log: Vec<(R, SignVerdict)>,
}

fn perp_norm<R: Real>(h_perp: &SpectralFn<R>, q: R, grid_n: usize) -> Result<R> {
    if q == R::of(2.0) {
        h_perp.norm(NormKind::L2, grid_n.max(16))
    } else {
        h_perp.norm(NormKind::Lq(q), grid_n.max(16))
    }
}

/// Measure `δ*(h)`: the largest offset `δ <= Λ - λ_1` such that the solution
/// of `-Δz = μz + h` satisfies the AMP conclusion for every sampled
/// `μ` in `(λ_1, λ_1 + δ)`. Coarse scan at `scan_step`, then bisection on the
/// first failure down to `bisection_tol`.
///
/// Requires `alpha > 0` and `λ_1 < Λ < λ_2`.
pub fn empirical_amp_interval<R: Real>(
    h: &SpectralFn<R>,
    lambda_cap: R,
    scan_step: R,
    bisection_tol: R,
    opts: &AmpScanOptions<R>,
) -> Result<AmpInterval<R>> {
    if scan_step <= R::zero() || bisection_tol <= R::zero() {
        return Err(AmpError::InvalidParam(
            "scan_step and bisection_tol must be positive".into(),
        ));
    }
    let domain = h.domain();
    let lambda1 = domain.lambda1();
    let lambda2 = domain.lambda2();
    if !(lambda_cap > lambda1 && lambda_cap < lambda2) {
        return Err(AmpError::InvalidParam(format!(
            "lambda_cap must lie in (lambda_1, lambda_2) = ({lambda1}, {lambda2}), got {lambda_cap}"
        )));
    }
    let dec = h.decompose();
    if dec.alpha <= R::zero() {
        return Err(AmpError::Hypothesis(format!(
            "empirical AMP interval needs alpha > 0, got {}",
            dec.alpha
        )));
    }
    let h_perp_norm_q = perp_norm(&dec.h_perp, opts.q, opts.grid_n)?;
    let cap = lambda_cap - lambda1;

    // Coarse scan, cap included as the final sample.
    let mut mus: Vec<R> = Vec::new();
    let mut j = 1usize;
    loop {
        let mu = lambda1 + R::of_usize(j) * scan_step;
        if mu >= lambda_cap {
            break;
        }
        mus.push(mu);
        j += 1;
    }
    mus.push(lambda_cap);

    let amp_at = |mu: R| -> Result<SignVerdict> {
        let z = solve_resolvent(h, mu)?;
        Ok(classify_sign(&z, opts.grid_n, opts.tau_rel)?.verdict)
    };

    let verdicts: Vec<SignVerdict> = mus
        .par_iter()
        .map(|&mu| amp_at(mu))
        .collect::<Result<Vec<_>>>()?;
    let mut scan_log: Vec<(R, SignVerdict)> = mus.iter().copied().zip(verdicts.clone()).collect();

    let first_fail = verdicts
        .iter()
        .position(|&v| v != SignVerdict::StrictlyNegative);
    let (delta_star, capped, last_pass_mu, first_fail_mu) = match first_fail {
        None => (cap, true, Some(lambda_cap), None),
        Some(idx) => {
            let mut lo = if idx == 0 { lambda1 } else { mus[idx - 1] };
            let mut hi = mus[idx];
            let mut last_pass = if idx == 0 { None } else { Some(mus[idx - 1]) };
            while hi - lo > bisection_tol {
                let mid = (lo + hi) * R::of(0.5);
                if mid <= lo || mid >= hi {
                    break; // bracket exhausted at this precision
                }
                let v = amp_at(mid)?;
                scan_log.push((mid, v));
                if v == SignVerdict::StrictlyNegative {
                    lo = mid;
                    last_pass = Some(mid);
                } else {
                    hi = mid;
                }
            }
            let delta = (lo + hi) * R::of(0.5) - lambda1;
            (delta.max(R::zero()), false, last_pass, Some(hi))
        }
    };

    Ok(AmpInterval {
        delta_star,
        cap,
        scan_step,
        bisection_tol,
        alpha: dec.alpha,
        h_perp_norm_q,
        q: opts.q,
        capped,
        last_pass_mu,
        first_fail_mu,
        scan_log,
    })
}

/// One family member in a ratio-estimate table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KSample<R> {
    pub alpha: R,
    pub h_perp_norm: R,
    pub delta_star: R,
    pub capped: bool,
    /// `δ* ||h_perp||_q / α`.
    pub ratio: R,
}

/// Result of [`estimate_k`]: the minimal observed ratio over a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KEstimate<R> {
    pub k_hat: R,
    pub lambda_cap: R,
    pub q: R,
    pub samples: Vec<KSample<R>>,
}

/// Estimate the proportionality constant in `δ(h) = K α / ||h_perp||_q` by
/// measuring `δ*` for each family member and taking the minimum of
/// `δ* ||h_perp||_q / α` over members whose interval ended strictly below the
/// cap. Cap-bound members stay in the table but are excluded from the
/// minimum: for them the search ceiling, not the ratio bound, was binding.
pub fn estimate_k<R: Real>(
    family: &[SpectralFn<R>],
    lambda_cap: R,
    scan_step: R,
    bisection_tol: R,
    opts: &AmpScanOptions<R>,
) -> Result<KEstimate<R>> {
    if family.is_empty() {
        return Err(AmpError::InvalidParam("empty family".into()));
    }
    let samples: Vec<KSample<R>> = family
        .par_iter()
        .map(|h| {
            let interval = empirical_amp_interval(h, lambda_cap, scan_step, bisection_tol, opts)?;
            Ok(KSample {
                alpha: interval.alpha,
                h_perp_norm: interval.h_perp_norm_q,
                delta_star: interval.delta_star,
                capped: interval.capped,
                ratio: interval.delta_star * interval.h_perp_norm_q / interval.alpha,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let k_hat = samples
        .iter()
        .filter(|s| !s.capped)
        .map(|s| s.ratio)
        .fold(None::<R>, |acc, r| Some(acc.map_or(r, |a| a.min(r))));
    match k_hat {
        Some(k_hat) => Ok(KEstimate {
            k_hat,
            lambda_cap,
            q: opts.q,
            samples,
        }),
        None => Err(AmpError::AllCapBound),
    }
}

/// Geometric constants of the principal eigenfunction plus an empirical
/// stand-in for the regularity constant bounding `||z||_C1 / ||h||_Lq` over
/// forcings orthogonal to the principal mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConstants<R> {
    /// Minimum of `|∂φ_1/∂ν|` over the (sampled) boundary; exact on
    /// intervals.
    pub boundary_slope_min: R,
    /// Minimum of `φ_1` over grid points at distance `>= eps_prime` from the
    /// boundary.
    pub interior_floor: R,
    pub eps_prime: R,
    /// Largest observed `||z||_C1 / ||h_perp||_Lq` over the probe family and
    /// a 10-point `μ` ladder in `(λ_1, Λ]`. Reported only; never part of
    /// pass/fail logic.
    pub c1_over_lq_ratio: R,
}

/// Compute [`BoundaryConstants`] for a domain.
///
/// `eps_prime` must satisfy `0 < eps_prime <= inradius / 2`; every probe must
/// be orthogonal to the principal mode (zero first coefficient).
pub fn boundary_constants<R: Real>(
    domain: Domain<R>,
    eps_prime: R,
    probes: &[SpectralFn<R>],
    lambda_cap: R,
    q: R,
    grid_n: usize,
) -> Result<BoundaryConstants<R>> {
    let half_inradius = domain.inradius() * R::of(0.5);
    if !(eps_prime > R::zero() && eps_prime <= half_inradius) {
        return Err(AmpError::InvalidParam(format!(
            "eps_prime must lie in (0, {half_inradius}], got {eps_prime}"
        )));
    }
    if probes.is_empty() {
        return Err(AmpError::InvalidParam("empty probe family".into()));
    }
    for p in probes {
        if p.domain() != domain {
            return Err(AmpError::InvalidParam(
                "probe domain does not match target domain".into(),
            ));
        }
        if !p.coeff(0).is_zero() {
            return Err(AmpError::InvalidParam(
                "probes must be orthogonal to the principal mode".into(),
            ));
        }
    }
    let lambda1 = domain.lambda1();
    let lambda2 = domain.lambda2();
    if !(lambda_cap > lambda1 && lambda_cap < lambda2) {
        return Err(AmpError::InvalidParam(format!(
            "lambda_cap must lie in (lambda_1, lambda_2), got {lambda_cap}"
        )));
    }

    let phi1 = SpectralFn::basis(domain, 1, 1)?;

    // A: exact on the interval, edge-sampled minimum on the rectangle.
    let boundary_slope_min = match domain {
        Domain::Interval { length } => (R::of(2.0) / length).sqrt() * R::PI() / length,
        Domain::Rectangle { .. } => {
            let profile = phi1.normal_derivative(grid_n)?;
            profile
                .samples()
                .iter()
                .map(|s| s.outward_normal_derivative.abs())
                .fold(R::infinity(), |a, v| a.min(v))
        }
    };

    // B: grid minimum of phi_1 over the eps_prime-interior shell.
    let grid = Grid::new(domain, grid_n)?;
    let coords = grid.coords();
    let vals = phi1.evaluate(&coords)?;
    let mut interior_floor = R::infinity();
    let mut seen = false;
    for (&c, &v) in coords.iter().zip(&vals) {
        if domain.boundary_distance(c) >= eps_prime {
            interior_floor = interior_floor.min(v);
            seen = true;
        }
    }
    if !seen {
        return Err(AmpError::InvalidParam(format!(
            "no grid point at distance >= {eps_prime} from the boundary; refine the grid"
        )));
    }

    // Regularity-ratio probe: mu ladder lambda_1 + (cap) * j / 10, j = 1..10.
    let cap = lambda_cap - lambda1;
    let tenth = cap / R::of(10.0);
    let mut ratio = R::zero();
    for probe in probes {
        let denom = perp_norm(probe, q, grid_n)?;
        if denom.is_zero() {
            return Err(AmpError::InvalidParam("zero probe".into()));
        }
        for j in 1..=10usize {
            let mu = lambda1 + tenth * R::of_usize(j);
            let z = solve_resolvent(probe, mu)?;
            let c1 = z.norm(NormKind::C1, grid_n)?;
            ratio = ratio.max(c1 / denom);
        }
    }

    Ok(BoundaryConstants {
        boundary_slope_min,
        interior_floor,
        eps_prime,
        c1_over_lq_ratio: ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::NormKind;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn unit() -> Domain<f64> {
        Domain::unit_interval()
    }

    fn fun(coeffs: &[f64]) -> SpectralFn<f64> {
        SpectralFn::new(unit(), coeffs.to_vec()).unwrap()
    }

    #[test]
    fn resolvent_poisson_of_second_mode() {
        let z = solve_resolvent(&fun(&[0.0, 1.0]), 0.0).unwrap();
        assert_relative_eq!(z.coeff(1), 1.0 / (4.0 * PI * PI), max_relative = 1e-14);
        assert_eq!(z.coeff(0), 0.0);
    }

    #[test]
    fn resolvent_single_mode_blowup_with_sign_flip() {
        let eps = 1e-3;
        let z = solve_resolvent(&fun(&[1.0]), PI * PI + eps).unwrap();
        assert_relative_eq!(z.coeff(0), -1.0 / eps, max_relative = 1e-10);
    }

    #[test]
    fn resolvent_two_mode_closed_form() {
        let (h1, h2) = (0.7, -0.3);
        let mu = 20.0;
        let z = solve_resolvent(&fun(&[h1, h2]), mu).unwrap();
        assert_relative_eq!(z.coeff(0), h1 / (PI * PI - mu), max_relative = 1e-14);
        assert_relative_eq!(z.coeff(1), h2 / (4.0 * PI * PI - mu), max_relative = 1e-14);
    }

    #[test]
    fn resolvent_resonance_identifies_mode() {
        let err = solve_resolvent(&fun(&[0.0, 1.0]), 4.0 * PI * PI).unwrap_err();
        match err {
            AmpError::Resonance { mode, .. } => assert_eq!(mode, "2"),
            other => panic!("expected resonance, got {other}"),
        }
        // Zero coefficient on the resonant mode is fine.
        assert!(solve_resolvent(&fun(&[1.0, 0.0]), 4.0 * PI * PI).is_ok());
    }

    #[test]
    fn resolvent_splits_like_its_decomposition() {
        let h = fun(&[0.9, -0.4, 0.2, 0.05]);
        let mu = unit().lambda1() + 3.0;
        let z = solve_resolvent(&h, mu).unwrap();
        let dec = h.decompose();
        let z_perp = solve_resolvent(&dec.h_perp, mu).unwrap();
        let lead = dec.alpha / (unit().lambda1() - mu);
        assert_relative_eq!(z.coeff(0), lead, max_relative = 1e-13);
        for i in 1..4 {
            assert!((z.coeff(i) - z_perp.coeff(i)).abs() < 1e-13);
        }
    }

    #[test]
    fn classify_examples() {
        let neg = fun(&[-1.0]);
        assert_eq!(
            classify_sign(&neg, 256, 1e-9).unwrap().verdict,
            SignVerdict::StrictlyNegative
        );
        // -(phi_1 - s phi_2): strictly negative for s < 1/2, mixed past it.
        let z = fun(&[-1.0, 0.4]);
        assert_eq!(
            classify_sign(&z, 256, 1e-9).unwrap().verdict,
            SignVerdict::StrictlyNegative
        );
        let z = fun(&[-1.0, 0.6]);
        assert_eq!(
            classify_sign(&z, 256, 1e-9).unwrap().verdict,
            SignVerdict::Mixed
        );
        assert!(classify_sign(&z, 32, 1e-9).is_err());
    }

    #[test]
    fn classify_zero_function_is_indeterminate() {
        let z = SpectralFn::zeros(unit(), 4);
        assert_eq!(
            classify_sign(&z, 64, 1e-9).unwrap().verdict,
            SignVerdict::Indeterminate
        );
    }

    #[test]
    fn maximum_principle_below_lambda1() {
        // Nonnegative forcing, mu < lambda_1: solution strictly positive.
        let h = fun(&[1.0, 0.3, -0.1, 0.05]); // sum m |c_m| tail < alpha
        let z = solve_resolvent(&h, 2.0).unwrap();
        assert_eq!(
            classify_sign(&z, 512, 1e-9).unwrap().verdict,
            SignVerdict::StrictlyPositive
        );
    }

    #[test]
    fn amp_interval_pure_principal_mode_is_cap_bound() {
        let h = fun(&[1.0]);
        let lambda1 = PI * PI;
        let cap = lambda1 + 0.9 * 3.0 * PI * PI;
        let opts = AmpScanOptions {
            grid_n: 256,
            ..Default::default()
        };
        let ivl = empirical_amp_interval(&h, cap, 1.0, 1e-6, &opts).unwrap();
        assert!(ivl.capped);
        assert_relative_eq!(ivl.delta_star, ivl.cap, max_relative = 1e-14);
        assert_eq!(ivl.h_perp_norm_q, 0.0);
    }

    #[test]
    fn amp_interval_matches_two_mode_closed_form() {
        // delta* = h1 (lambda2 - lambda1) / (2 h2 + h1).
        let lambda1 = PI * PI;
        let gap = 3.0 * PI * PI;
        let opts = AmpScanOptions {
            grid_n: 2048,
            ..Default::default()
        };

        let ivl = empirical_amp_interval(&fun(&[1.0, 1.0]), lambda1 + 0.9 * gap, 1.0, 1e-8, &opts)
            .unwrap();
        assert!(!ivl.capped);
        assert_relative_eq!(ivl.delta_star, gap / 3.0, max_relative = 1e-6);

        let ivl = empirical_amp_interval(&fun(&[1.0, 2.0]), lambda1 + 0.9 * gap, 1.0, 1e-8, &opts)
            .unwrap();
        assert_relative_eq!(ivl.delta_star, gap / 5.0, max_relative = 1e-6);

        // The returned interval is backed by a verified bracket.
        let pass = ivl.last_pass_mu.unwrap();
        let fail = ivl.first_fail_mu.unwrap();
        assert!(pass >= lambda1 + ivl.delta_star - ivl.bisection_tol);
        assert!(fail <= lambda1 + ivl.delta_star + ivl.bisection_tol);
        assert!(ivl
            .scan_log
            .iter()
            .any(|(mu, v)| *mu == pass && *v == SignVerdict::StrictlyNegative));
        assert!(ivl
            .scan_log
            .iter()
            .any(|(mu, v)| *mu == fail && *v != SignVerdict::StrictlyNegative));
    }

    #[test]
    fn amp_interval_validates_hypotheses() {
        let opts = AmpScanOptions::default();
        let lambda1 = PI * PI;
        assert!(matches!(
            empirical_amp_interval(&fun(&[-1.0, 1.0]), lambda1 + 1.0, 0.5, 1e-6, &opts),
            Err(AmpError::Hypothesis(_))
        ));
        assert!(empirical_amp_interval(&fun(&[1.0]), 5.0 * PI * PI, 0.5, 1e-6, &opts).is_err());
    }

    #[test]
    fn estimate_k_two_mode_family() {
        // For h = phi_1 + s phi_2 the ratio is 3 pi^2 s / (2 s + 1),
        // minimized at the smallest s.
        let lambda1 = PI * PI;
        let mk = |s: f64| fun(&[1.0, s]);
        let family: Vec<_> = [0.5, 1.0, 2.0, 4.0].iter().map(|&s| mk(s)).collect();
        let opts = AmpScanOptions {
            grid_n: 1024,
            ..Default::default()
        };
        let est = estimate_k(&family, lambda1 + 2.0 * PI * PI, 1.0, 1e-8, &opts).unwrap();
        assert!(est.samples.iter().all(|s| !s.capped));
        assert_relative_eq!(est.k_hat, 0.75 * PI * PI, max_relative = 1e-6);

        let single = estimate_k(&[mk(1.0)], lambda1 + 2.0 * PI * PI, 1.0, 1e-8, &opts).unwrap();
        assert_relative_eq!(single.k_hat, PI * PI, max_relative = 1e-6);

        assert!(matches!(
            estimate_k(&[fun(&[1.0])], lambda1 + 2.0 * PI * PI, 1.0, 1e-8, &opts),
            Err(AmpError::AllCapBound)
        ));
    }

    #[test]
    fn monotone_family_deltas_match_closed_form() {
        let lambda1 = PI * PI;
        let gap = 3.0 * PI * PI;
        let opts = AmpScanOptions {
            grid_n: 1024,
            ..Default::default()
        };
        let mut prev = f64::INFINITY;
        for s in [0.3, 0.5, 1.0, 2.5] {
            let ivl =
                empirical_amp_interval(&fun(&[1.0, s]), lambda1 + 0.95 * gap, 1.0, 1e-8, &opts)
                    .unwrap();
            let closed = gap / (2.0 * s + 1.0);
            assert_relative_eq!(ivl.delta_star, closed, max_relative = 1e-6);
            assert!(ivl.delta_star <= prev);
            prev = ivl.delta_star;
        }
    }

    #[test]
    fn boundary_constants_interval() {
        let probes = vec![fun(&[0.0, 1.0]), fun(&[0.0, 0.5, -0.5])];
        let bc = boundary_constants(unit(), 0.25, &probes, PI * PI + 2.0, 2.0, 1023).unwrap();
        assert_relative_eq!(
            bc.boundary_slope_min,
            2f64.sqrt() * PI,
            max_relative = 1e-14
        );
        // min over dist >= 1/4 is phi_1(1/4) = sqrt(2) sin(pi/4) = 1.
        assert_relative_eq!(bc.interior_floor, 1.0, max_relative = 1e-12);
        assert!(bc.c1_over_lq_ratio > 0.0);
    }

    #[test]
    fn boundary_constants_square() {
        let sq = Domain::rectangle(1.0, 1.0).unwrap();
        let probe = SpectralFn::new(sq, vec![0.0, 1.0]).unwrap();
        let bc = boundary_constants(sq, 0.25, &[probe], 2.0 * PI * PI + 1.0, 3.0, 255).unwrap();
        // min over the shell is 2 sin^2(pi/4) = 1 at the shell corner.
        assert_relative_eq!(bc.interior_floor, 1.0, max_relative = 1e-12);
        assert!(bc.boundary_slope_min > 0.0);
    }

    #[test]
    fn boundary_constants_validation() {
        let probe = fun(&[0.0, 1.0]);
        // eps_prime above half the inradius.
        assert!(boundary_constants(
            unit(),
            0.3,
            std::slice::from_ref(&probe),
            PI * PI + 1.0,
            2.0,
            256
        )
        .is_err());
        // non-orthogonal probe.
        assert!(
            boundary_constants(unit(), 0.2, &[fun(&[1.0, 1.0])], PI * PI + 1.0, 2.0, 256).is_err()
        );
        // empty family.
        assert!(boundary_constants::<f64>(unit(), 0.2, &[], PI * PI + 1.0, 2.0, 256).is_err());
    }

    #[test]
    fn regularity_ratio_is_scale_invariant() {
        let probes = vec![fun(&[0.0, 1.0, -0.25])];
        let scaled: Vec<_> = probes.iter().map(|p| p.scaled(37.5)).collect();
        let a = boundary_constants(unit(), 0.2, &probes, PI * PI + 5.0, 2.0, 512).unwrap();
        let b = boundary_constants(unit(), 0.2, &scaled, PI * PI + 5.0, 2.0, 512).unwrap();
        assert_relative_eq!(a.c1_over_lq_ratio, b.c1_over_lq_ratio, max_relative = 1e-10);
    }

    #[test]
    fn scaling_forcing_does_not_move_delta_star() {
        let lambda1 = PI * PI;
        let opts = AmpScanOptions {
            grid_n: 512,
            ..Default::default()
        };
        let base = fun(&[1.0, 1.5]);
        let ivl = empirical_amp_interval(&base, lambda1 + 20.0, 1.0, 1e-7, &opts).unwrap();
        for c in [0.1, 10.0] {
            let scaled =
                empirical_amp_interval(&base.scaled(c), lambda1 + 20.0, 1.0, 1e-7, &opts).unwrap();
            assert!((scaled.delta_star - ivl.delta_star).abs() <= 2e-7);
        }
    }

    #[test]
    fn parseval_l2_matches_quadrature() {
        let f = fun(&[0.3, -1.2, 0.8, 0.05]);
        let exact = f.norm(NormKind::L2, 16).unwrap();
        let quad = f.norm(NormKind::Lq(2.0), 4096).unwrap();
        assert_relative_eq!(exact, quad, max_relative = 1e-8);
    }
}
