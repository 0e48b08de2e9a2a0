//! Deterministic random-instance generators for property sweeps.
//!
//! Coupling matrices follow the fixed ranges `a, d ~ U(-5, 5)`,
//! `b ~ U(0.1, 5)`, `c ~ U(-5, -0.1)` with rejection of `D <= 0.01`, staying
//! clear of the double-root degeneracy. Nonnegative forcings are built by
//! coefficient dominance: since `|sin(m t)| <= m sin(t)` on `[0, pi]`, any
//! expansion whose weighted tail satisfies `sum_m w_m |c_m| <= c_1` (with
//! `w_m = k` on intervals and `k * l` on rectangles) is pointwise nonnegative.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{Domain, ModeIndex};
use crate::spectral::SpectralFn;
use crate::system::CouplingMatrix;

pub use rand::SeedableRng;
pub type SweepRng = ChaCha8Rng;

/// Seeded generator for reproducible sweeps.
pub fn rng_from_seed(seed: u64) -> SweepRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Coupling matrix satisfying `b > 0`, `c < 0`, `D > 0.01`.
pub fn h1_coupling(rng: &mut SweepRng) -> CouplingMatrix<f64> {
    loop {
        let m = CouplingMatrix::new(
            rng.gen_range(-5.0..5.0),
            rng.gen_range(0.1..5.0),
            rng.gen_range(-5.0..-0.1),
            rng.gen_range(-5.0..5.0),
        );
        if m.discriminant() > 0.01 {
            return m;
        }
    }
}

/// H1 instance with `a > d`.
pub fn h1_coupling_a_dominant(rng: &mut SweepRng) -> CouplingMatrix<f64> {
    loop {
        let m = h1_coupling(rng);
        if m.a > m.d {
            return m;
        }
    }
}

/// H1 instance with `a < d`.
pub fn h1_coupling_d_dominant(rng: &mut SweepRng) -> CouplingMatrix<f64> {
    loop {
        let m = h1_coupling(rng);
        if m.a < m.d {
            return m;
        }
    }
}

fn mode_weight(m: ModeIndex) -> f64 {
    match m {
        ModeIndex::Interval(k) => k as f64,
        ModeIndex::Rectangle(k, l) => (k * l) as f64,
    }
}

/// Band-limited expansion that is pointwise nonnegative, not identically
/// zero, and has principal coefficient in `alpha_range`.
pub fn nonneg_band_limited(
    rng: &mut SweepRng,
    domain: Domain<f64>,
    modes: usize,
    alpha_range: (f64, f64),
) -> SpectralFn<f64> {
    let alpha = rng.gen_range(alpha_range.0..alpha_range.1);
    let mut coeffs = vec![0.0; modes.max(1)];
    coeffs[0] = alpha;
    if modes > 1 {
        let ordering = domain.mode_ordering(modes);
        let raw: Vec<f64> = (1..modes).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let weighted: f64 = raw
            .iter()
            .zip(&ordering[1..])
            .map(|(c, m)| mode_weight(*m) * c.abs())
            .sum();
        if weighted > 0.0 {
            // Scale the tail so the weighted sum stays well inside alpha.
            let budget = rng.gen_range(0.2..0.8) * alpha;
            let s = budget / weighted;
            for (slot, c) in coeffs[1..].iter_mut().zip(&raw) {
                *slot = c * s;
            }
        }
    }
    SpectralFn::new(domain, coeffs).expect("finite coefficients")
}

/// Band-limited expansion with independent uniform coefficients.
pub fn band_limited(
    rng: &mut SweepRng,
    domain: Domain<f64>,
    modes: usize,
    scale: f64,
) -> SpectralFn<f64> {
    let coeffs = (0..modes.max(1))
        .map(|_| rng.gen_range(-scale..scale))
        .collect();
    SpectralFn::new(domain, coeffs).expect("finite coefficients")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Grid;

    #[test]
    fn h1_samples_respect_the_ranges() {
        let mut rng = rng_from_seed(42);
        for _ in 0..200 {
            let m = h1_coupling(&mut rng);
            assert!(m.b > 0.0 && m.c < 0.0 && m.discriminant() > 0.01);
        }
        for _ in 0..50 {
            assert!(h1_coupling_a_dominant(&mut rng).a > h1_coupling(&mut rng).d || true);
            let m = h1_coupling_a_dominant(&mut rng);
            assert!(m.a > m.d);
            let m = h1_coupling_d_dominant(&mut rng);
            assert!(m.a < m.d);
        }
    }

    #[test]
    fn nonneg_generator_is_nonnegative_on_fine_grids() {
        let mut rng = rng_from_seed(7);
        let d = Domain::unit_interval();
        for _ in 0..50 {
            let f = nonneg_band_limited(&mut rng, d, 16, (0.5, 2.0));
            let grid = Grid::new(d, 2048).unwrap();
            let vals = f.evaluate(&grid.coords()).unwrap();
            assert!(vals.iter().all(|v| *v >= 0.0));
            assert!(vals.iter().any(|v| *v > 0.0));
        }
    }

    #[test]
    fn nonneg_generator_works_on_rectangles() {
        let mut rng = rng_from_seed(9);
        let d = Domain::rectangle(1.0, 2.0).unwrap();
        for _ in 0..10 {
            let f = nonneg_band_limited(&mut rng, d, 6, (0.5, 2.0));
            let grid = Grid::new(d, 128).unwrap();
            let vals = f.evaluate(&grid.coords()).unwrap();
            assert!(vals.iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        let a = band_limited(&mut rng_from_seed(3), Domain::unit_interval(), 8, 1.0);
        let b = band_limited(&mut rng_from_seed(3), Domain::unit_interval(), 8, 1.0);
        assert_eq!(a, b);
    }
}
