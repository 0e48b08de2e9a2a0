//! Cross-module invariants, mostly property-based.

use std::f64::consts::PI;

use amp_core::sampling::{h1_coupling, rng_from_seed};
use amp_core::{
    classify_sign, gammas, project_grid, solve_resolvent, solve_system, spectrum, window_budget,
    window_equivalences, Coord, CouplingMatrix, Domain, Grid, ModeIndex, NormKind, SignVerdict,
    SpectralFn,
};
use proptest::prelude::*;
use rand::Rng;

fn coeffs_strategy(max_modes: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, 1..max_modes)
}

proptest! {
    /// Parseval: the L2 norm is the Euclidean norm of the coefficients.
    #[test]
    fn parseval_l2_is_euclidean(coeffs in coeffs_strategy(24)) {
        let f = SpectralFn::new(Domain::unit_interval(), coeffs.clone()).unwrap();
        let euclid = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        let l2 = f.norm(NormKind::L2, 16).unwrap();
        prop_assert!((l2 - euclid).abs() <= 1e-10 * (1.0 + euclid));
    }

    /// Evaluation is linear in the coefficients.
    #[test]
    fn evaluation_is_linear(
        c1 in coeffs_strategy(12),
        c2 in coeffs_strategy(12),
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
    ) {
        let d = Domain::unit_interval();
        let f = SpectralFn::new(d, c1).unwrap();
        let g = SpectralFn::new(d, c2).unwrap();
        let combo = f.combine(a, &g, b).unwrap();
        let pts = [Coord::X(0.1), Coord::X(0.37), Coord::X(0.9)];
        let fv = f.evaluate(&pts).unwrap();
        let gv = g.evaluate(&pts).unwrap();
        let cv = combo.evaluate(&pts).unwrap();
        for i in 0..pts.len() {
            let expect = a * fv[i] + b * gv[i];
            prop_assert!((cv[i] - expect).abs() <= 1e-10 * (1.0 + expect.abs()));
        }
    }

    /// Projection inverts evaluation for band-limited functions.
    #[test]
    fn project_grid_round_trip(coeffs in coeffs_strategy(16)) {
        let d = Domain::unit_interval();
        let f = SpectralFn::new(d, coeffs.clone()).unwrap();
        let n = 64usize;
        let grid = Grid::new(d, n).unwrap();
        let samples = f.evaluate(&grid.coords()).unwrap();
        let p = project_grid(d, n, &samples, coeffs.len()).unwrap();
        for (a, b) in p.coeffs().iter().zip(&coeffs) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    /// Coefficient-wise residual of the scalar resolvent.
    #[test]
    fn resolvent_residual_vanishes(coeffs in coeffs_strategy(16), mu in -50.0..50.0f64) {
        let d = Domain::unit_interval();
        let h = SpectralFn::new(d, coeffs).unwrap();
        // Stay away from the spectrum so the division is well conditioned.
        for pair in h.eigenpairs() {
            prop_assume!((pair.lambda - mu).abs() > 1e-3);
        }
        let z = solve_resolvent(&h, mu).unwrap();
        for (i, pair) in h.eigenpairs().iter().enumerate() {
            let residual = (pair.lambda - mu) * z.coeff(i) - h.coeff(i);
            prop_assert!(residual.abs() < 1e-12);
        }
    }

    /// Per-mode residual of the coupled solve.
    #[test]
    fn system_residual_vanishes(
        f_coeffs in prop::collection::vec(-1.0..1.0f64, 1..8),
        g_coeffs in prop::collection::vec(-1.0..1.0f64, 1..8),
        seed in 0u64..1000,
        mu in -10.0..10.0f64,
    ) {
        let d = Domain::unit_interval();
        let mut rng = rng_from_seed(seed);
        let m = h1_coupling(&mut rng);
        let (xi1, xi2) = m.eigenvalues().unwrap();
        let modes = f_coeffs.len().max(g_coeffs.len());
        for k in 1..=modes {
            let lam = (k as f64 * PI).powi(2);
            prop_assume!((lam - mu - xi1).abs() > 0.5 && (lam - mu - xi2).abs() > 0.5);
        }
        let f = SpectralFn::new(d, f_coeffs).unwrap();
        let g = SpectralFn::new(d, g_coeffs).unwrap();
        let (u, v) = solve_system(&m, mu, &f, &g).unwrap();
        for (i, pair) in u.eigenpairs().iter().enumerate() {
            let p = pair.lambda - mu;
            let r1 = (p - m.a) * u.coeff(i) - m.b * v.coeff(i) - f.coeff(i);
            let r2 = -m.c * u.coeff(i) + (p - m.d) * v.coeff(i) - g.coeff(i);
            prop_assert!(r1.abs() < 1e-12 && r2.abs() < 1e-12, "r1 = {r1}, r2 = {r2}");
        }
    }

    /// The shifted determinant factors through the coupling eigenvalues.
    #[test]
    fn determinant_factorization(seed in 0u64..2000, lam in -20.0..650.0f64, mu in -10.0..10.0f64) {
        let mut rng = rng_from_seed(seed);
        let m = h1_coupling(&mut rng);
        let (xi1, xi2) = m.eigenvalues().unwrap();
        let p = lam - mu;
        let det = (p - m.a) * (p - m.d) - m.b * m.c;
        let factored = (p - xi1) * (p - xi2);
        prop_assert!((det - factored).abs() <= 1e-10 * (1.0 + det.abs()));
    }

    /// Both gamma closed forms agree, and the windows line up.
    #[test]
    fn gamma_identities_and_windows(seed in 0u64..2000, mu in -12.0..12.0f64, delta in 0.0..8.0f64) {
        let mut rng = rng_from_seed(seed);
        let m = h1_coupling(&mut rng);
        let lambda1 = rng.gen_range(0.5..15.0);
        let s = spectrum(&m, lambda1).unwrap();
        let g = gammas(&m, lambda1, mu).unwrap();
        let root = s.discriminant.sqrt();
        let direct1 = (m.a + m.d + 2.0 * mu - root) / 2.0;
        let direct2 = (m.a + m.d + 2.0 * mu + root) / 2.0;
        prop_assert!((g.gamma1 - direct1).abs() < 1e-12 * (1.0 + direct1.abs()));
        prop_assert!((g.gamma2 - direct2).abs() < 1e-12 * (1.0 + direct2.abs()));
        prop_assert!((g.gamma1 - (lambda1 + mu - s.mu1_plus)).abs() < 1e-10);
        prop_assert!((g.gamma2 - (lambda1 + mu - s.mu1_minus)).abs() < 1e-10);

        let w = window_equivalences(&m, lambda1, mu, delta).unwrap();
        prop_assume!(w.boundary_margin() >= 1e-9);
        prop_assert!(w.consistent());
    }

    /// The principal bound of the window budget sits below sigma throughout
    /// the window.
    #[test]
    fn budget_sigma_dominates_script_a(
        seed in 0u64..2000,
        frac in 0.0..0.95f64,
        alpha in 0.2..2.0f64,
        beta in 0.2..2.0f64,
    ) {
        let d = Domain::unit_interval();
        let mut rng = rng_from_seed(seed);
        let m = loop {
            let m = h1_coupling(&mut rng);
            if m.a > m.d {
                break m;
            }
        };
        let s = spectrum(&m, d.lambda1()).unwrap();
        let mu = s.mu1_minus + frac * (s.mu1_plus - s.mu1_minus);
        let f = SpectralFn::new(d, vec![alpha, 0.1 * alpha]).unwrap();
        let g = SpectralFn::new(d, vec![beta, 0.2 * beta]).unwrap();
        let b = window_budget(&m, mu, &f, &g, 1.0, 2.0, 256).unwrap();
        prop_assert!(b.sigma >= b.script_a - 1e-10 * (1.0 + b.script_a.abs()));
    }
}

/// Quadrature oracle: the eigenfunctions are orthonormal.
#[test]
fn eigenfunctions_orthonormal_under_quadrature() {
    let d: Domain<f64> = Domain::unit_interval();
    let m = 4096usize;
    let h = 1.0 / m as f64;
    for i in 1..=6usize {
        for j in 1..=6usize {
            let pi_ = d.eigenpair(ModeIndex::Interval(i)).unwrap();
            let pj = d.eigenpair(ModeIndex::Interval(j)).unwrap();
            let mut acc = 0.0;
            for k in 0..=m {
                let x = k as f64 * h;
                let w = if k == 0 || k == m {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += w * pi_.eval(Coord::X(x)) * pj.eval(Coord::X(x));
            }
            acc *= h / 3.0;
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((acc - expect).abs() < 1e-8, "({i},{j}) inner product {acc}");
        }
    }
}

/// Parseval against quadrature on a fine grid.
#[test]
fn parseval_matches_quadrature_at_4096() {
    let d = Domain::unit_interval();
    let mut rng = rng_from_seed(123);
    for _ in 0..8 {
        let coeffs: Vec<f64> = (0..24).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let f = SpectralFn::new(d, coeffs).unwrap();
        let exact = f.norm(NormKind::L2, 16).unwrap();
        let quad = f.norm(NormKind::Lq(2.0), 4096).unwrap();
        assert!((exact - quad).abs() <= 1e-6 * (1.0 + exact));
    }
}

/// The principal eigenfunction is positive inside with inward-pointing
/// gradient on the whole boundary.
#[test]
fn principal_mode_positivity() {
    for d in [
        Domain::unit_interval(),
        Domain::interval(PI).unwrap(),
        Domain::rectangle(1.0, 2.0).unwrap(),
    ] {
        let phi1 = SpectralFn::basis(d, 1, 1).unwrap();
        let grid = Grid::new(d, 64).unwrap();
        let vals = phi1.evaluate(&grid.coords()).unwrap();
        assert!(vals.iter().all(|v| *v > 0.0));
        let profile = phi1.normal_derivative(32).unwrap();
        assert!(profile
            .samples()
            .iter()
            .all(|s| s.outward_normal_derivative < 0.0));
    }
}

/// Regularity-style ratio stays bounded over probes orthogonal to the
/// principal mode, across the sampled window.
#[test]
fn orthogonal_probe_ratio_is_bounded() {
    let d = Domain::unit_interval();
    let lambda1 = d.lambda1();
    let lambda2 = d.lambda2();
    let mut rng = rng_from_seed(321);
    let mut max_ratio: f64 = 0.0;
    for _ in 0..10 {
        let mut coeffs: Vec<f64> = (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect();
        coeffs[0] = 0.0;
        let probe = SpectralFn::new(d, coeffs).unwrap();
        let denom = probe.norm(NormKind::L2, 16).unwrap();
        if denom == 0.0 {
            continue;
        }
        for j in 1..=10 {
            let mu = lambda1 + (lambda2 - lambda1) * 0.9 * j as f64 / 10.0;
            let z = solve_resolvent(&probe, mu).unwrap();
            let c1 = z.norm(NormKind::C1, 512).unwrap();
            max_ratio = max_ratio.max(c1 / denom);
        }
    }
    assert!(max_ratio.is_finite() && max_ratio > 0.0);
    // Crude ceiling: the smallest denominator in the window is
    // lambda_2 - Lambda = 0.1 gap, and C1 norms of unit-L2 expansions with
    // 12 modes stay below ~ sqrt(2) (1 + 12 pi).
    assert!(max_ratio < 1e3, "ratio {max_ratio}");
}

/// The whole pipeline instantiates at f32 precision.
#[test]
fn single_precision_smoke() {
    let d: Domain<f32> = Domain::unit_interval();
    let h = SpectralFn::new(d, vec![1.0f32, 0.5]).unwrap();
    let mu = 2.0f32;
    let z = solve_resolvent(&h, mu).unwrap();
    for (i, pair) in h.eigenpairs().iter().enumerate() {
        let residual = (pair.lambda - mu) * z.coeff(i) - h.coeff(i);
        assert!(residual.abs() < 1e-5);
    }
    let report = classify_sign(&z, 64, 1e-5f32).unwrap();
    assert_eq!(report.verdict, SignVerdict::StrictlyPositive);

    let m = CouplingMatrix::new(4.0f32, 1.0, -1.0, 1.0);
    let (u, v) = solve_system(&m, -3.0f32, &h, &h).unwrap();
    assert!(u.coeff(0).is_finite() && v.coeff(0).is_finite());
}

/// The pattern machinery is dimension-generic: the u<0, v>0 pattern holds on
/// a rectangle as well.
#[test]
fn pattern_holds_on_the_rectangle() {
    use amp_core::sampling::nonneg_band_limited;
    use amp_core::{verify_pattern, PatternId, VerifyOptions};

    let d = Domain::rectangle(1.0, 1.5).unwrap();
    let mut rng = rng_from_seed(2024);
    let opts = VerifyOptions {
        grid_n: 96,
        ..Default::default()
    };
    for _ in 0..5 {
        let m = loop {
            let m = h1_coupling(&mut rng);
            if m.a > m.d {
                break m;
            }
        };
        let s = spectrum(&m, d.lambda1()).unwrap();
        let mu = s.mu1_minus + 1e-3 * (s.mu1_plus - s.mu1_minus);
        let f = nonneg_band_limited(&mut rng, d, 6, (0.5, 2.0));
        let g = nonneg_band_limited(&mut rng, d, 6, (0.5, 2.0));
        let opts = VerifyOptions { q: 3.0, ..opts };
        let v = verify_pattern(&m, mu, &f, &g, PatternId::T2, &opts).unwrap();
        assert!(v.hypotheses_met, "{:?}", v.hypotheses);
        assert!(v.pattern_holds, "u {:?} v {:?}", v.u_report.verdict, v.v_report.verdict);
    }
}

/// Reports serialize to JSON and come back intact.
#[test]
fn report_types_round_trip_through_json() {
    let d = Domain::unit_interval();
    let h = SpectralFn::new(d, vec![1.0, 0.5]).unwrap();
    let z = solve_resolvent(&h, 2.0).unwrap();
    let report = classify_sign(&z, 64, 1e-9).unwrap();
    let text = serde_json::to_string(&report).unwrap();
    let back: amp_core::SignReport<f64> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);

    let opts = amp_core::AmpScanOptions {
        grid_n: 256,
        ..Default::default()
    };
    let ivl =
        amp_core::empirical_amp_interval(&h, d.lambda1() + 20.0, 2.0, 1e-6, &opts).unwrap();
    let text = serde_json::to_string(&ivl).unwrap();
    let back: amp_core::AmpInterval<f64> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, ivl);
}
