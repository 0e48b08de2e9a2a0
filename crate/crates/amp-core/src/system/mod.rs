//! The 2x2 non-cooperative system `-ΔU = AU + μU + F` with Dirichlet
//! conditions: principal eigenvalues, per-mode solves, scalar decoupling
//! transforms and verification of the sign-pattern statements.
//!
//! The coupling matrix has `b > 0` and `c < 0` in the non-cooperative regime,
//! so comparison arguments do not apply directly; everything here reduces the
//! system to scalar resolvent equations through the eigenstructure of the
//! coupling matrix.

mod counterexample;

pub use counterexample::{
    counterexample_part1, counterexample_part2, Counterexample1Report, Counterexample2Report,
};

use serde::{Deserialize, Serialize};

use crate::error::{AmpError, Result};
use crate::real::Real;
use crate::scalar::{classify_sign, solve_resolvent, SignReport, SignVerdict};
use crate::spectral::{NormKind, SpectralFn};
use crate::Grid;
use crate::SYSTEM_RESONANCE_GUARD;

/// Constant coupling matrix `[[a, b], [c, d]]` of the system.
///
/// No constraints are enforced at construction; hypothesis predicates are
/// separate so that violating instances stay representable and checkable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix<R> {
    pub a: R,
    pub b: R,
    pub c: R,
    pub d: R,
}

impl<R: Real> CouplingMatrix<R> {
    pub fn new(a: R, b: R, c: R, d: R) -> Self {
        CouplingMatrix { a, b, c, d }
    }

    /// `D = (a - d)^2 + 4 b c`.
    pub fn discriminant(&self) -> R {
        let g = self.a - self.d;
        g * g + R::of(4.0) * self.b * self.c
    }

    /// Off-diagonal signs plus `D > 0`.
    pub fn satisfies_h1(&self) -> bool {
        self.b > R::zero() && self.c < R::zero() && self.discriminant() > R::zero()
    }

    /// Eigenvalues `(xi_1, xi_2)` with `xi_1 >= xi_2`; requires `D > 0`.
    pub fn eigenvalues(&self) -> Result<(R, R)> {
        let disc = self.discriminant();
        if disc <= R::zero() {
            return Err(AmpError::Hypothesis(format!(
                "coupling matrix needs D > 0 for two real principal eigenvalues, got D = {disc}"
            )));
        }
        let root = disc.sqrt();
        let half = R::of(0.5);
        let tr = self.a + self.d;
        Ok(((tr + root) * half, (tr - root) * half))
    }
}

/// Principal eigenvalues of the system relative to `lambda_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemSpectrum<R> {
    pub lambda1: R,
    pub discriminant: R,
    pub xi1: R,
    pub xi2: R,
    /// `mu_1^- = lambda_1 - xi_1`, the smaller principal eigenvalue.
    pub mu1_minus: R,
    /// `mu_1^+ = lambda_1 - xi_2`.
    pub mu1_plus: R,
}

/// Compute the system spectrum; fails when `D <= 0`.
pub fn spectrum<R: Real>(coupling: &CouplingMatrix<R>, lambda1: R) -> Result<SystemSpectrum<R>> {
    let (xi1, xi2) = coupling.eigenvalues()?;
    Ok(SystemSpectrum {
        lambda1,
        discriminant: coupling.discriminant(),
        xi1,
        xi2,
        mu1_minus: lambda1 - xi1,
        mu1_plus: lambda1 - xi2,
    })
}

/// The scalar coefficients of the decoupled equations at a given `mu`:
/// `gamma_1 = (a + d + 2 mu - sqrt(D)) / 2 = lambda_1 + mu - mu_1^+` and
/// `gamma_2 = (a + d + 2 mu + sqrt(D)) / 2 = lambda_1 + mu - mu_1^-`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPair<R> {
    pub gamma1: R,
    pub gamma2: R,
}

pub fn gammas<R: Real>(coupling: &CouplingMatrix<R>, _lambda1: R, mu: R) -> Result<GammaPair<R>> {
    let (xi1, xi2) = coupling.eigenvalues()?;
    Ok(GammaPair {
        gamma1: mu + xi2,
        gamma2: mu + xi1,
    })
}

/// Decoupling weights from the coupling-matrix eigenstructure:
/// `t = (a - d + sqrt(D)) / (-2c)` (positive when `a > d`) and
/// `t_star = (d - a + sqrt(D)) / (-2c)` (positive when `a < d`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingConstants<R> {
    pub t: R,
    pub t_star: R,
}

pub fn coupling_constants<R: Real>(coupling: &CouplingMatrix<R>) -> Result<CouplingConstants<R>> {
    let disc = coupling.discriminant();
    if disc <= R::zero() {
        return Err(AmpError::Hypothesis(format!(
            "decoupling weights need D > 0, got {disc}"
        )));
    }
    if coupling.c.is_zero() {
        return Err(AmpError::Hypothesis(
            "decoupling weights need c != 0".into(),
        ));
    }
    let root = disc.sqrt();
    let den = -(coupling.c + coupling.c);
    Ok(CouplingConstants {
        t: (coupling.a - coupling.d + root) / den,
        t_star: (coupling.d - coupling.a + root) / den,
    })
}

/// Two sides of one equivalence plus the distance to the nearest decision
/// boundary (used to discard razor-edge samples in randomized sweeps).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalencePair<R> {
    pub lhs: bool,
    pub rhs: bool,
    pub margin: R,
}

impl<R: Real> EquivalencePair<R> {
    fn from_diffs(lhs: R, rhs: &[R]) -> Self {
        let mut margin = lhs.abs();
        for r in rhs {
            margin = margin.min(r.abs());
        }
        EquivalencePair {
            lhs: lhs > R::zero(),
            rhs: rhs.iter().all(|r| *r > R::zero()),
            margin,
        }
    }

    pub fn agrees(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// The six window equivalences tying `mu` against the principal eigenvalues
/// to the gammas against `lambda_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowEquivalences<R> {
    /// `mu < mu_1^+  <=>  gamma_1 < lambda_1`
    pub upper_window: EquivalencePair<R>,
    /// `mu_1^- < mu  <=>  lambda_1 < gamma_2`
    pub lower_window: EquivalencePair<R>,
    /// `sqrt(D) < a - d  <=>  d + mu < gamma_1 <= gamma_2 < a + mu`
    pub ordering_a_side: EquivalencePair<R>,
    /// `sqrt(D) < d - a  <=>  a + mu < gamma_1 <= gamma_2 < d + mu`
    pub ordering_d_side: EquivalencePair<R>,
    /// `mu < mu_1^+ + delta  <=>  gamma_1 < lambda_1 + delta`
    pub upper_window_shifted: EquivalencePair<R>,
    /// `mu < mu_1^- + delta  <=>  gamma_2 < lambda_1 + delta`
    pub lower_window_shifted: EquivalencePair<R>,
}

impl<R: Real> WindowEquivalences<R> {
    pub fn all(&self) -> [EquivalencePair<R>; 6] {
        [
            self.upper_window,
            self.lower_window,
            self.ordering_a_side,
            self.ordering_d_side,
            self.upper_window_shifted,
            self.lower_window_shifted,
        ]
    }

    /// True when every pair agrees.
    pub fn consistent(&self) -> bool {
        self.all().iter().all(EquivalencePair::agrees)
    }

    /// Smallest distance to any decision boundary across the six pairs.
    pub fn boundary_margin(&self) -> R {
        self.all()
            .iter()
            .fold(R::infinity(), |acc, p| acc.min(p.margin))
    }
}

/// Evaluate both sides of the six equivalences numerically.
pub fn window_equivalences<R: Real>(
    coupling: &CouplingMatrix<R>,
    lambda1: R,
    mu: R,
    delta: R,
) -> Result<WindowEquivalences<R>> {
    let spec = spectrum(coupling, lambda1)?;
    let g = gammas(coupling, lambda1, mu)?;
    let root = spec.discriminant.sqrt();
    let (a, d) = (coupling.a, coupling.d);

    Ok(WindowEquivalences {
        upper_window: EquivalencePair::from_diffs(spec.mu1_plus - mu, &[lambda1 - g.gamma1]),
        lower_window: EquivalencePair::from_diffs(mu - spec.mu1_minus, &[g.gamma2 - lambda1]),
        ordering_a_side: EquivalencePair::from_diffs(
            (a - d) - root,
            &[g.gamma1 - (d + mu), (a + mu) - g.gamma2],
        ),
        ordering_d_side: EquivalencePair::from_diffs(
            (d - a) - root,
            &[g.gamma1 - (a + mu), (d + mu) - g.gamma2],
        ),
        upper_window_shifted: EquivalencePair::from_diffs(
            spec.mu1_plus + delta - mu,
            &[lambda1 + delta - g.gamma1],
        ),
        lower_window_shifted: EquivalencePair::from_diffs(
            spec.mu1_minus + delta - mu,
            &[lambda1 + delta - g.gamma2],
        ),
    })
}

/// Solve the coupled system mode by mode:
/// `((λ_m - μ) I - A) (u_m, v_m)^T = (f_m, g_m)^T`.
///
/// Exact for the truncated problem. Fails with [`AmpError::SystemResonance`]
/// when `μ` sits within the relative guard of `λ_m - ξ_i` for a mode with a
/// nonzero right-hand side.
pub fn solve_system<R: Real>(
    coupling: &CouplingMatrix<R>,
    mu: R,
    f: &SpectralFn<R>,
    g: &SpectralFn<R>,
) -> Result<(SpectralFn<R>, SpectralFn<R>)> {
    let domain = f.domain();
    if domain != g.domain() {
        return Err(AmpError::InvalidParam(
            "f and g must live on the same domain".into(),
        ));
    }
    let modes = f.len().max(g.len());
    let ordering = domain.mode_ordering(modes);
    let guard = R::of(SYSTEM_RESONANCE_GUARD);
    let disc = coupling.discriminant();
    let xi = if disc >= R::zero() {
        let root = disc.sqrt();
        let half = R::of(0.5);
        let tr = coupling.a + coupling.d;
        Some(((tr + root) * half, (tr - root) * half))
    } else {
        None
    };

    let mut uc = Vec::with_capacity(modes);
    let mut vc = Vec::with_capacity(modes);
    for (idx, mode) in ordering.iter().enumerate() {
        let fm = f.coeff(idx);
        let gm = g.coeff(idx);
        if fm.is_zero() && gm.is_zero() {
            uc.push(R::zero());
            vc.push(R::zero());
            continue;
        }
        let lambda = domain.eigenvalue(*mode)?;
        let p = lambda - mu;
        let tol = guard * (R::one() + lambda.abs());
        if let Some((xi1, xi2)) = xi {
            for (branch, xi_i) in [(1usize, xi1), (2usize, xi2)] {
                let gap = p - xi_i;
                if gap.abs() <= tol {
                    return Err(AmpError::SystemResonance {
                        mode: mode.to_string(),
                        branch,
                        mu: mu.as_f64(),
                        gap: gap.as_f64(),
                    });
                }
            }
        }
        let det = (p - coupling.a) * (p - coupling.d) - coupling.b * coupling.c;
        if det.abs() <= tol * tol {
            return Err(AmpError::SystemResonance {
                mode: mode.to_string(),
                branch: 0,
                mu: mu.as_f64(),
                gap: det.as_f64(),
            });
        }
        uc.push(((p - coupling.d) * fm + coupling.b * gm) / det);
        vc.push((coupling.c * fm + (p - coupling.a) * gm) / det);
    }
    Ok((SpectralFn::new(domain, uc)?, SpectralFn::new(domain, vc)?))
}

/// Result of the sum transform `w = u + t v` valid for `a > d`: `w` solves
/// the scalar equation `-Δw = γ_1 w + (f + t g)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "R: Real + Serialize",
    deserialize = "R: Real + Deserialize<'de>"
))]
pub struct DecoupledSum<R> {
    pub w: SpectralFn<R>,
    pub t: R,
    pub gamma1: R,
}

/// Decouple via `w = u + t v`; requires the non-cooperative hypothesis and
/// `a > d` (which makes `t > 0`).
pub fn decouple_sum<R: Real>(
    coupling: &CouplingMatrix<R>,
    mu: R,
    f: &SpectralFn<R>,
    g: &SpectralFn<R>,
) -> Result<DecoupledSum<R>> {
    if !coupling.satisfies_h1() {
        return Err(AmpError::Hypothesis(
            "sum decoupling needs b > 0, c < 0 and D > 0".into(),
        ));
    }
    if coupling.a <= coupling.d {
        return Err(AmpError::Hypothesis(format!(
            "sum decoupling needs a > d, got a = {}, d = {}",
            coupling.a, coupling.d
        )));
    }
    let lambda1 = f.domain().lambda1();
    let t = coupling_constants(coupling)?.t;
    let gamma1 = gammas(coupling, lambda1, mu)?.gamma1;
    let rhs = f.combine(R::one(), g, t)?;
    let w = solve_resolvent(&rhs, gamma1)?;
    Ok(DecoupledSum { w, t, gamma1 })
}

/// Result of the difference transform `w = -u + t_star v` valid for `a < d`
/// and `mu < mu_1^-`: all three functions solve scalar equations in the
/// maximum-principle regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "R: Real + Serialize",
    deserialize = "R: Real + Deserialize<'de>"
))]
pub struct DecoupledDifference<R> {
    pub u: SpectralFn<R>,
    pub v: SpectralFn<R>,
    pub w: SpectralFn<R>,
    pub t_star: R,
    pub gamma1: R,
    pub gamma2: R,
}

/// Decouple via `w = -u + t_star v`, then back-substitute:
/// `-Δw = γ_2 w + (t_star g - f)`, `-Δv = γ_1 v - c w + g`,
/// `-Δu = γ_1 u + (b / t_star) w + f`.
pub fn decouple_difference<R: Real>(
    coupling: &CouplingMatrix<R>,
    mu: R,
    f: &SpectralFn<R>,
    g: &SpectralFn<R>,
) -> Result<DecoupledDifference<R>> {
    if !coupling.satisfies_h1() {
        return Err(AmpError::Hypothesis(
            "difference decoupling needs b > 0, c < 0 and D > 0".into(),
        ));
    }
    if coupling.a >= coupling.d {
        return Err(AmpError::Hypothesis(format!(
            "difference decoupling needs a < d, got a = {}, d = {}",
            coupling.a, coupling.d
        )));
    }
    let lambda1 = f.domain().lambda1();
    let spec = spectrum(coupling, lambda1)?;
    if mu >= spec.mu1_minus {
        return Err(AmpError::Hypothesis(format!(
            "difference decoupling needs mu < mu_1^- = {}, got {mu}",
            spec.mu1_minus
        )));
    }
    let t_star = coupling_constants(coupling)?.t_star;
    let g_pair = gammas(coupling, lambda1, mu)?;

    let w_rhs = g.combine(t_star, f, -R::one())?;
    let w = solve_resolvent(&w_rhs, g_pair.gamma2)?;
    let v_rhs = g.combine(R::one(), &w, -coupling.c)?;
    let v = solve_resolvent(&v_rhs, g_pair.gamma1)?;
    let u_rhs = f.combine(R::one(), &w, coupling.b / t_star)?;
    let u = solve_resolvent(&u_rhs, g_pair.gamma1)?;

    Ok(DecoupledDifference {
        u,
        v,
        w,
        t_star,
        gamma1: g_pair.gamma1,
        gamma2: g_pair.gamma2,
    })
}

/// Pointwise sign of a function on the evaluation grid.
///
/// `NonNegative`/`NonPositive` additionally certify "not identically zero"
/// (some value beyond the tolerance); `Zero` means nothing exceeded it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FnSign {
    Zero,
    NonNegative,
    NonPositive,
    Mixed,
}

/// Classify the grid sign pattern of `f` with relative tolerance `tau_rel`.
pub fn grid_sign<R: Real>(f: &SpectralFn<R>, n: usize, tau_rel: R) -> Result<FnSign> {
    let grid = Grid::new(f.domain(), n)?;
    let vals = f.evaluate(&grid.coords())?;
    let sup = vals.iter().fold(R::zero(), |a, v| a.max(v.abs()));
    let tau = tau_rel * sup;
    let mut pos = false;
    let mut neg = false;
    for v in vals {
        if v > tau {
            pos = true;
        } else if v < -tau {
            neg = true;
        }
    }
    Ok(match (pos, neg) {
        (false, false) => FnSign::Zero,
        (true, false) => FnSign::NonNegative,
        (false, true) => FnSign::NonPositive,
        (true, true) => FnSign::Mixed,
    })
}

/// Which hypotheses an instance satisfies; every flag is recomputable from
/// the inputs and failures are reported rather than thrown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport<R> {
    /// `b > 0`, `c < 0`, `D > 0`.
    pub h1: bool,
    /// `mu_1^- < mu < mu_1^+`.
    pub h2: bool,
    /// `mu < mu_1^-`.
    pub h2_prime: bool,
    /// `d < a`.
    pub h3: bool,
    /// `a < d`.
    pub h3_prime: bool,
    pub f_sign: FnSign,
    pub g_sign: FnSign,
    /// Sign of `t_star g - f` on the grid; `None` when `t_star` is undefined
    /// (requires `D > 0` and `c != 0`).
    pub weighted_gap_sign: Option<FnSign>,
    /// `mu < mu_1^- + delta_2` with the caller-supplied budget constant;
    /// `None` when no budget was requested or applicable.
    pub h5: Option<bool>,
    pub mu: R,
    pub mu1_minus: Option<R>,
    pub mu1_plus: Option<R>,
}

/// Build a [`HypothesisReport`] for an instance.
pub fn hypothesis_report<R: Real>(
    coupling: &CouplingMatrix<R>,
    mu: R,
    f: &SpectralFn<R>,
    g: &SpectralFn<R>,
    n: usize,
    tau_rel: R,
) -> Result<HypothesisReport<R>> {
    let lambda1 = f.domain().lambda1();
    let spec = spectrum(coupling, lambda1).ok();
    let constants = coupling_constants(coupling).ok();
    let weighted_gap_sign = match constants {
        Some(cc) => Some(grid_sign(&g.combine(cc.t_star, f, -R::one())?, n, tau_rel)?),
        None => None,
    };
    Ok(HypothesisReport {
        h1: coupling.satisfies_h1(),
        h2: spec
            .map(|s| s.mu1_minus < mu && mu < s.mu1_plus)
            .unwrap_or(false),
        h2_prime: spec.map(|s| mu < s.mu1_minus).unwrap_or(false),
        h3: coupling.d < coupling.a,
        h3_prime: coupling.a < coupling.d,
        f_sign: grid_sign(f, n, tau_rel)?,
        g_sign: grid_sign(g, n, tau_rel)?,
        weighted_gap_sign,
        h5: None,
        mu,
        mu1_minus: spec.map(|s| s.mu1_minus),
        mu1_plus: spec.map(|s| s.mu1_plus),
    })
}

/// Identifiers for the six verifiable sign-pattern statements. The wire names
/// (`"T2"`, `"R3"`, ...) are part of the scenario-file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PatternId {
    /// `a > d`, `f, g >= 0`: `u < 0`, `v > 0` just above `mu_1^-`.
    T2,
    /// Sign-reversed variant of `T2`: `f, g <= 0` gives `u > 0`, `v < 0`.
    R3,
    /// `a < d`, `f <= 0 <= g`: `u < 0`, `v < 0` just above `mu_1^-`.
    T4,
    /// Sign-reversed variant of `T4`: `g <= 0 <= f` gives `u > 0`, `v > 0`.
    R5,
    /// `a < d`, `mu < mu_1^-`, `f, g >= 0` and `t_star g - f >= 0`:
    /// `u > 0`, `v > 0`.
    T6,
    /// Sign-reversed variant of `T6`.
    R7,
}

impl PatternId {
    pub const ALL: [PatternId; 6] = [
        PatternId::T2,
        PatternId::R3,
        PatternId::T4,
        PatternId::R5,
        PatternId::T6,
        PatternId::R7,
    ];

    /// Expected `(u, v)` classification when the hypotheses hold.
    pub fn predicted(&self) -> (SignVerdict, SignVerdict) {
        use SignVerdict::{StrictlyNegative as Neg, StrictlyPositive as Pos};
        match self {
            PatternId::T2 => (Neg, Pos),
            PatternId::R3 => (Pos, Neg),
            PatternId::T4 => (Neg, Neg),
            PatternId::R5 => (Pos, Pos),
            PatternId::T6 => (Pos, Pos),
            PatternId::R7 => (Neg, Neg),
        }
    }
}

impl std::fmt::Display for PatternId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PatternId::T2 => "T2",
            PatternId::R3 => "R3",
            PatternId::T4 => "T4",
            PatternId::R5 => "R5",
            PatternId::T6 => "T6",
            PatternId::R7 => "R7",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for PatternId {
    type Err = AmpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T2" => Ok(PatternId::T2),
            "R3" => Ok(PatternId::R3),
            "T4" => Ok(PatternId::T4),
            "R5" => Ok(PatternId::R5),
            "T6" => Ok(PatternId::T6),
            "R7" => Ok(PatternId::R7),
            other => Err(AmpError::InvalidParam(format!(
                "unknown pattern id {other:?}; expected one of T2, R3, T4, R5, T6, R7"
            ))),
        }
    }
}

/// Options for [`verify_pattern`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions<R> {
    pub grid_n: usize,
    pub tau_rel: R,
    /// Norm exponent for the budget (`q = 2` on intervals).
    pub q: R,
    /// When set, the `mu`-window hypothesis is checked against the budget
    /// `delta_2 = K * script_a / script_b` computed with this constant.
    pub k_for_budget: Option<R>,
}

impl<R: Real> Default for VerifyOptions<R> {
    fn default() -> Self {
        VerifyOptions {
            grid_n: crate::DEFAULT_GRID_1D,
            tau_rel: R::of(crate::DEFAULT_TAU_REL),
            q: R::of(2.0),
            k_for_budget: None,
        }
    }
}

/// Outcome of verifying one sign-pattern statement on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "R: Real + Serialize",
    deserialize = "R: Real + Deserialize<'de>"
))]
pub struct PatternVerdict<R> {
    pub id: PatternId,
    pub hypotheses: HypothesisReport<R>,
    /// All hypotheses required by `id` hold (including the budget window when
    /// one was computed).
    pub hypotheses_met: bool,
    pub predicted_u: SignVerdict,
    pub predicted_v: SignVerdict,
    pub u_report: SignReport<R>,
    pub v_report: SignReport<R>,
    /// The observed classifications match the predicted pattern.
    pub pattern_holds: bool,
    pub budget: Option<WindowBudget<R>>,
}

/// Solve the system, classify `(u, v)` and report whether the predicted sign
/// pattern of `id` holds. Hypothesis failures are reported in the verdict,
/// never thrown; only mechanical failures (resonance, mismatched domains)
/// error.
pub fn verify_pattern<R: Real>(
    coupling: &CouplingMatrix<R>,
    mu: R,
    f: &SpectralFn<R>,
    g: &SpectralFn<R>,
    id: PatternId,
    opts: &VerifyOptions<R>,
) -> Result<PatternVerdict<R>> {
    let mut hyp = hypothesis_report(coupling, mu, f, g, opts.grid_n, opts.tau_rel)?;

    // Budget for the mu-window of the four near-lower-eigenvalue patterns.
    let budget = match (id, opts.k_for_budget) {
        (PatternId::T6 | PatternId::R7, _) | (_, None) => None,
        (id, Some(k)) => {
            // Map each pattern onto the canonical a > d, f, g >= 0 form.
            let swapped = CouplingMatrix::new(coupling.d, -coupling.c, -coupling.b, coupling.a);
            let result = match id {
                PatternId::T2 => window_budget(coupling, mu, f, g, k, opts.q, opts.grid_n),
                PatternId::R3 => window_budget(
                    coupling,
                    mu,
                    &f.scaled(-R::one()),
                    &g.scaled(-R::one()),
                    k,
                    opts.q,
                    opts.grid_n,
                ),
                PatternId::T4 => window_budget(
                    &swapped,
                    mu,
                    g,
                    &f.scaled(-R::one()),
                    k,
                    opts.q,
                    opts.grid_n,
                ),
                PatternId::R5 => window_budget(
                    &swapped,
                    mu,
                    &g.scaled(-R::one()),
                    f,
                    k,
                    opts.q,
                    opts.grid_n,
                ),
                PatternId::T6 | PatternId::R7 => unreachable!(),
            };
            result.ok()
        }
    };
    if let (Some(b), Some(m)) = (&budget, hyp.mu1_minus) {
        hyp.h5 = Some(!b.bounded || mu < m + b.delta2);
    }

    let required = match id {
        PatternId::T2 => {
            hyp.h1
                && hyp.h2
                && hyp.h3
                && hyp.f_sign == FnSign::NonNegative
                && hyp.g_sign == FnSign::NonNegative
        }
        PatternId::R3 => {
            hyp.h1
                && hyp.h2
                && hyp.h3
                && hyp.f_sign == FnSign::NonPositive
                && hyp.g_sign == FnSign::NonPositive
        }
        PatternId::T4 => {
            hyp.h1
                && hyp.h2
                && hyp.h3_prime
                && hyp.f_sign == FnSign::NonPositive
                && hyp.g_sign == FnSign::NonNegative
        }
        PatternId::R5 => {
            hyp.h1
                && hyp.h2
                && hyp.h3_prime
                && hyp.f_sign == FnSign::NonNegative
                && hyp.g_sign == FnSign::NonPositive
        }
        PatternId::T6 => {
            hyp.h1
                && hyp.h2_prime
                && hyp.h3_prime
                && hyp.f_sign == FnSign::NonNegative
                && hyp.g_sign == FnSign::NonNegative
                && hyp.weighted_gap_sign == Some(FnSign::NonNegative)
        }
        PatternId::R7 => {
            hyp.h1
                && hyp.h2_prime
                && hyp.h3_prime
                && hyp.f_sign == FnSign::NonPositive
                && hyp.g_sign == FnSign::NonPositive
                && hyp.weighted_gap_sign == Some(FnSign::NonPositive)
        }
    };
    let hypotheses_met = required && hyp.h5.unwrap_or(true);

    let (u, v) = solve_system(coupling, mu, f, g)?;
    let u_report = classify_sign(&u, opts.grid_n, opts.tau_rel)?;
    let v_report = classify_sign(&v, opts.grid_n, opts.tau_rel)?;
    let (pu, pv) = id.predicted();

    Ok(PatternVerdict {
        id,
        hypotheses: hyp,
        hypotheses_met,
        predicted_u: pu,
        predicted_v: pv,
        pattern_holds: u_report.verdict == pu && v_report.verdict == pv,
        u_report,
        v_report,
        budget,
    })
}

/// The `mu`-independent window budget for the `a > d` pattern: `sigma` and
/// `script_a` bound the principal component of the transformed forcing from
/// below, `script_b` bounds its orthogonal part from above, and
/// `delta_2 = K script_a / script_b` is the resulting window length for a
/// caller-supplied proportionality constant `K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowBudget<R> {
    pub sigma: R,
    pub script_a: R,
    pub script_b: R,
    /// `K * script_a / script_b`; infinite when `script_b = 0`.
    pub delta2: R,
    pub k_used: R,
    /// Principal coefficient of `f`.
    pub alpha: R,
    /// Principal coefficient of `g`.
    pub beta: R,
    /// False when `script_b = 0` (pure principal-mode forcing), in which case
    /// the window is limited only by the search ceiling below `lambda_2`.
    pub bounded: bool,
}

/// Assemble the window budget. Requires the non-cooperative hypothesis,
/// `d < a`, nonnegative `f, g` on the grid and a positive principal
/// component; `mu` must stay below `mu_1^+`.
#[allow(clippy::too_many_arguments)]
pub fn window_budget<R: Real>(
    coupling: &CouplingMatrix<R>,
    mu: R,
    f: &SpectralFn<R>,
    g: &SpectralFn<R>,
    k: R,
    q: R,
    grid_n: usize,
) -> Result<WindowBudget<R>> {
    if !coupling.satisfies_h1() {
        return Err(AmpError::Hypothesis(
            "budget needs b > 0, c < 0 and D > 0".into(),
        ));
    }
    if coupling.d >= coupling.a {
        return Err(AmpError::Hypothesis("budget needs d < a".into()));
    }
    let tau = R::of(crate::DEFAULT_TAU_REL);
    let fs = grid_sign(f, grid_n, tau)?;
    let gs = grid_sign(g, grid_n, tau)?;
    if fs != FnSign::NonNegative || gs != FnSign::NonNegative {
        return Err(AmpError::Hypothesis(format!(
            "budget needs f, g >= 0 and not identically zero on the grid, got {fs:?}, {gs:?}"
        )));
    }
    let domain = f.domain();
    let lambda1 = domain.lambda1();
    let lambda2 = domain.lambda2();
    let spec = spectrum(coupling, lambda1)?;
    let alpha = f.coeff(0);
    let beta = g.coeff(0);
    if alpha <= R::zero() && beta <= R::zero() {
        return Err(AmpError::Hypothesis(
            "budget needs a positive principal coefficient in f or g".into(),
        ));
    }
    let upper_gap = spec.mu1_plus - mu;
    if upper_gap <= R::zero() {
        return Err(AmpError::InvalidParam(format!(
            "budget is defined for mu < mu_1^+ = {}, got {mu}",
            spec.mu1_plus
        )));
    }

    let sigma = (alpha * (lambda1 - coupling.d - mu) + beta * coupling.b) / upper_gap;
    let root = spec.discriminant.sqrt();
    let script_a = (alpha * (lambda1 - coupling.d - spec.mu1_plus) + beta * coupling.b) / root;
    if script_a <= R::zero() {
        return Err(AmpError::Hypothesis(format!(
            "script_a = {script_a} must be positive under the window and sign hypotheses"
        )));
    }

    let gap2 = lambda2 - lambda1;
    let f_perp = f.decompose().h_perp;
    let g_perp = g.decompose().h_perp;
    let f_perp_norm = perp_norm(&f_perp, q, grid_n)?;
    let g_perp_norm = perp_norm(&g_perp, q, grid_n)?;
    let script_b = (lambda2 - coupling.d - spec.mu1_minus) / gap2 * f_perp_norm
        + coupling.b / gap2 * g_perp_norm;

    let (delta2, bounded) = if script_b.is_zero() {
        (R::infinity(), false)
    } else {
        (k * script_a / script_b, true)
    };

    Ok(WindowBudget {
        sigma,
        script_a,
        script_b,
        delta2,
        k_used: k,
        alpha,
        beta,
        bounded,
    })
}

fn perp_norm<R: Real>(h: &SpectralFn<R>, q: R, grid_n: usize) -> Result<R> {
    if q == R::of(2.0) {
        h.norm(NormKind::L2, grid_n.max(16))
    } else {
        h.norm(NormKind::Lq(q), grid_n.max(16))
    }
}
