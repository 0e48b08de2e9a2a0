//! The fixed `a > d` scenario on `(0, pi)` showing that nonnegative forcing
//! alone does not protect the sign pattern of a non-cooperative system.
//!
//! Both parts use `A = [[4, 1], [-1, 1]]` and `f = phi_1 - phi_2 / 2 >= 0`
//! with `g = k f`. Part 1 fixes `mu = -3 < mu_1^-` and scans the coupling
//! gain `k`; part 2 approaches `mu_1^-` from above while cancelling the
//! principal-mode resonance, which blows up the second-mode share of `u`.

use serde::{Deserialize, Serialize};

use crate::error::{AmpError, Result};
use crate::real::Real;
use crate::scalar::{classify_sign, SignReport};
use crate::spectral::SpectralFn;
use crate::Domain;

use super::{grid_sign, solve_system, spectrum, CouplingMatrix, FnSign};

fn setup<R: Real>() -> Result<(Domain<R>, CouplingMatrix<R>, SpectralFn<R>)> {
    let domain = Domain::interval(R::PI())?;
    let coupling = CouplingMatrix::new(R::of(4.0), R::one(), -R::one(), R::one());
    let f = SpectralFn::new(domain, vec![R::one(), -R::of(0.5)])?;
    Ok((domain, coupling, f))
}

/// Part 1: closed-form check of `v` and the maximum-principle failure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "R: Real + Serialize",
    deserialize = "R: Real + Deserialize<'de>"
))]
pub struct Counterexample1Report<R> {
    pub k: R,
    pub mu: R,
    pub v1: R,
    pub v2: R,
    /// Always `-1`: at `mu = -3` the principal mode decouples from `g`.
    pub v1_closed_form: R,
    /// `(1 - 3k) / 38`.
    pub v2_closed_form: R,
    pub u: SpectralFn<R>,
    pub v: SpectralFn<R>,
    pub v_report: SignReport<R>,
    /// True when `v` changes sign, i.e. the maximum principle fails.
    pub max_principle_fails: bool,
    /// `k = 20/3`, where the second-mode share of `-v` reaches one half.
    pub failure_threshold_k: R,
}

/// Solve the fixed scenario at `mu = -3` for gain `k`, compare against the
/// closed forms and classify `v`. The maximum principle fails (mixed sign)
/// exactly for `k > 20/3`.
pub fn counterexample_part1<R: Real>(
    k: R,
    grid_n: usize,
    tau_rel: R,
) -> Result<Counterexample1Report<R>> {
    let (_, coupling, f) = setup::<R>()?;
    let mu = -R::of(3.0);
    let g = f.scaled(k);
    let (u, v) = solve_system(&coupling, mu, &f, &g)?;
    let v_report = classify_sign(&v, grid_n, tau_rel)?;
    Ok(Counterexample1Report {
        k,
        mu,
        v1: v.coeff(0),
        v2: v.coeff(1),
        v1_closed_form: -R::one(),
        v2_closed_form: (R::one() - R::of(3.0) * k) / R::of(38.0),
        u,
        v,
        max_principle_fails: v_report.verdict == crate::scalar::SignVerdict::Mixed,
        v_report,
        failure_threshold_k: R::of(20.0 / 3.0),
    })
}

/// Part 2: behaviour of `u` as `mu` approaches `mu_1^-` from above.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "R: Real + Serialize",
    deserialize = "R: Real + Deserialize<'de>"
))]
pub struct Counterexample2Report<R> {
    pub eps: R,
    /// `mu_1^- + eps`.
    pub mu: R,
    /// Gain `k = mu + eps^2`; keeping `k - mu = eps^2` cancels the
    /// principal-mode resonance at exactly the rate that makes `u_2 / u_1`
    /// grow like `1 / eps`. Negative throughout `eps` in `(0, 1/2)`, so
    /// `g = k f <= 0` while `f >= 0`.
    pub k: R,
    pub u1: R,
    pub u2: R,
    /// `u_2 / u_1` from the mode-by-mode solve.
    pub ratio: R,
    /// Scalar closed form of the same ratio:
    /// `(3 + eps^2)(sqrt(5) - eps) / (2 eps (9 + 3 sqrt(5) - (6 + sqrt(5)) eps + eps^2))`.
    pub ratio_closed_form: R,
    /// `(k - mu) / (mu^2 + 3 mu + 1)`.
    pub u1_closed_form: R,
    /// `(mu - k - 3) / (2 (mu^2 - 3 mu + 1))`.
    pub u2_closed_form: R,
    pub u: SpectralFn<R>,
    pub v: SpectralFn<R>,
    pub u_report: SignReport<R>,
    pub f_sign: FnSign,
    pub g_sign: FnSign,
}

/// Solve the fixed scenario at `mu = mu_1^- + eps`, `k = mu + eps^2` for
/// `eps` in `(0, 1/2)` and report the growth of `u_2 / u_1` together with the
/// sign classification of `u` (mixed for small `eps` even though `f >= 0` and
/// `g <= 0`).
pub fn counterexample_part2<R: Real>(
    eps: R,
    grid_n: usize,
    tau_rel: R,
) -> Result<Counterexample2Report<R>> {
    if !(eps > R::zero() && eps < R::of(0.5)) {
        return Err(AmpError::InvalidParam(format!(
            "eps must lie in (0, 0.5), got {eps}"
        )));
    }
    let (domain, coupling, f) = setup::<R>()?;
    let spec = spectrum(&coupling, domain.lambda1())?;
    let mu = spec.mu1_minus + eps;
    let k = mu + eps * eps;
    let g = f.scaled(k);
    let (u, v) = solve_system(&coupling, mu, &f, &g)?;
    let u_report = classify_sign(&u, grid_n, tau_rel)?;
    let f_sign = grid_sign(&f, grid_n, tau_rel)?;
    let g_sign = grid_sign(&g, grid_n, tau_rel)?;

    let three = R::of(3.0);
    let sqrt5 = R::of(5.0).sqrt();
    let u1_closed_form = (k - mu) / (mu * mu + three * mu + R::one());
    let u2_closed_form = (mu - k - three) / (R::of(2.0) * (mu * mu - three * mu + R::one()));
    let denom = R::of(9.0) + three * sqrt5 - (R::of(6.0) + sqrt5) * eps + eps * eps;
    let ratio_closed_form = (three + eps * eps) * (sqrt5 - eps) / (R::of(2.0) * eps * denom);

    Ok(Counterexample2Report {
        eps,
        mu,
        k,
        u1: u.coeff(0),
        u2: u.coeff(1),
        ratio: u.coeff(1) / u.coeff(0),
        ratio_closed_form,
        u1_closed_form,
        u2_closed_form,
        u,
        v,
        u_report,
        f_sign,
        g_sign,
    })
}
