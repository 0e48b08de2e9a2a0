//! Independent finite-difference oracle: second-order discretization of
//! `-Δ` with Dirichlet conditions on the interval (3-point stencil, solved by
//! tridiagonal elimination) and the rectangle (5-point stencil, solved by
//! discrete sine diagonalization).
//!
//! The oracle deliberately shares nothing with the spectral path except the
//! domain definitions, so agreement between the two is meaningful evidence.

use crate::domain::{Coord, Domain, Grid};
use crate::error::{AmpError, Result};
use crate::real::Real;
use crate::system::CouplingMatrix;
use crate::FD_RESONANCE_GUARD;

/// Uniform finite-difference grid: `n` interior points per axis, mesh width
/// `L / (n + 1)` per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdGrid<R> {
    domain: Domain<R>,
    n: usize,
}

impl<R: Real> FdGrid<R> {
    pub fn new(domain: Domain<R>, n: usize) -> Result<Self> {
        if n < 8 {
            return Err(AmpError::InvalidParam(format!(
                "finite-difference grid needs n >= 8, got {n}"
            )));
        }
        Ok(FdGrid { domain, n })
    }

    pub fn domain(&self) -> Domain<R> {
        self.domain
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    /// Total number of unknowns (`n` or `n^2`).
    pub fn len(&self) -> usize {
        match self.domain.dim() {
            1 => self.n,
            _ => self.n * self.n,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Mesh width per axis.
    pub fn mesh_widths(&self) -> (R, Option<R>) {
        let np1 = R::of_usize(self.n + 1);
        match self.domain {
            Domain::Interval { length } => (length / np1, None),
            Domain::Rectangle { lx, ly } => (lx / np1, Some(ly / np1)),
        }
    }

    /// Interior coordinates in the same layout as the spectral grid
    /// (row-major, x outer).
    pub fn coords(&self) -> Vec<Coord<R>> {
        Grid::new(self.domain, self.n).expect("n >= 8").coords()
    }

    /// Discrete eigenvalue along one axis: `(4 / h^2) sin^2(k pi / (2(n+1)))`.
    fn axis_eigenvalue(h: R, k: usize, n: usize) -> R {
        let s = (R::PI() * R::of_usize(k) / (R::of(2.0) * R::of_usize(n + 1))).sin();
        R::of(4.0) / (h * h) * s * s
    }

    /// All discrete eigenvalues per axis, index `k - 1`.
    fn axis_eigenvalues(&self) -> (Vec<R>, Option<Vec<R>>) {
        let (hx, hy) = self.mesh_widths();
        let ex = (1..=self.n)
            .map(|k| Self::axis_eigenvalue(hx, k, self.n))
            .collect();
        let ey = hy.map(|hy| {
            (1..=self.n)
                .map(|k| Self::axis_eigenvalue(hy, k, self.n))
                .collect()
        });
        (ex, ey)
    }
}

/// Plain sine sums `out[k-1] = sum_i values[i-1] sin(k pi i / (n+1))`,
/// computed through a period-exact lookup table.
fn sine_transform<R: Real>(values: &[R], n: usize) -> Vec<R> {
    let period = 2 * (n + 1);
    let table: Vec<R> = (0..period)
        .map(|j| (R::PI() * R::of_usize(j) / R::of_usize(n + 1)).sin())
        .collect();
    (1..=n)
        .map(|k| {
            let mut acc = R::zero();
            for (i, v) in values.iter().enumerate() {
                acc += *v * table[(k * (i + 1)) % period];
            }
            acc
        })
        .collect()
}

fn check_scalar_resonance<R: Real>(grid: &FdGrid<R>, mu: R) -> Result<()> {
    let guard = R::of(FD_RESONANCE_GUARD);
    let (ex, ey) = grid.axis_eigenvalues();
    match ey {
        None => {
            for lam in &ex {
                if (mu - *lam).abs() <= guard {
                    return Err(AmpError::DiscreteResonance {
                        mu: mu.as_f64(),
                        lambda: lam.as_f64(),
                        tol: FD_RESONANCE_GUARD,
                    });
                }
            }
        }
        Some(ey) => {
            for lx in &ex {
                for ly in &ey {
                    let lam = *lx + *ly;
                    if (mu - lam).abs() <= guard {
                        return Err(AmpError::DiscreteResonance {
                            mu: mu.as_f64(),
                            lambda: lam.as_f64(),
                            tol: FD_RESONANCE_GUARD,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Solve `(L_h - mu I) z = rhs` for the 3-point (1D) or 5-point (2D)
/// Laplacian `L_h`. `rhs` holds interior values in grid layout.
pub fn fd_solve_scalar<R: Real>(grid: &FdGrid<R>, mu: R, rhs: &[R]) -> Result<Vec<R>> {
    if rhs.len() != grid.len() {
        return Err(AmpError::InvalidParam(format!(
            "expected {} grid values, got {}",
            grid.len(),
            rhs.len()
        )));
    }
    check_scalar_resonance(grid, mu)?;
    match grid.domain {
        Domain::Interval { .. } => {
            let (h, _) = grid.mesh_widths();
            let inv_h2 = R::one() / (h * h);
            let diag = R::of(2.0) * inv_h2 - mu;
            let off = -inv_h2;
            thomas_solve(diag, off, rhs)
        }
        Domain::Rectangle { .. } => {
            let n = grid.points_per_axis();
            let (ex, ey) = grid.axis_eigenvalues();
            let ey = ey.expect("2d grid");
            let hat = dst_2d(rhs, n);
            let mut solved = vec![R::zero(); n * n];
            for k in 0..n {
                for l in 0..n {
                    solved[k * n + l] = hat[k * n + l] / (ex[k] + ey[l] - mu);
                }
            }
            Ok(idst_2d(&solved, n))
        }
    }
}

/// Tridiagonal elimination for a constant-coefficient symmetric matrix
/// `diag` on the diagonal and `off` on both off-diagonals.
fn thomas_solve<R: Real>(diag: R, off: R, rhs: &[R]) -> Result<Vec<R>> {
    let n = rhs.len();
    let mut c = vec![R::zero(); n];
    let mut z = vec![R::zero(); n];
    let pivot_floor = R::of(1e-14) * (diag.abs() + off.abs() + R::one());
    let mut m = diag;
    if m.abs() <= pivot_floor {
        return Err(AmpError::InvalidParam(
            "tridiagonal pivot vanished; mu is too close to a discrete eigenvalue of a leading block"
                .into(),
        ));
    }
    c[0] = off / m;
    z[0] = rhs[0] / m;
    for i in 1..n {
        m = diag - off * c[i - 1];
        if m.abs() <= pivot_floor {
            return Err(AmpError::InvalidParam(
                "tridiagonal pivot vanished; mu is too close to a discrete eigenvalue of a leading block"
                    .into(),
            ));
        }
        c[i] = off / m;
        z[i] = (rhs[i] - off * z[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        let znext = z[i + 1];
        z[i] -= c[i] * znext;
    }
    Ok(z)
}

/// Forward 2D sine sums in both axes (row-major, x outer).
fn dst_2d<R: Real>(values: &[R], n: usize) -> Vec<R> {
    // y-direction per x-row, then x-direction per y-column.
    let mut stage = vec![R::zero(); n * n];
    for i in 0..n {
        let row = sine_transform(&values[i * n..(i + 1) * n], n);
        stage[i * n..(i + 1) * n].copy_from_slice(&row);
    }
    let mut out = vec![R::zero(); n * n];
    let mut col = vec![R::zero(); n];
    for l in 0..n {
        for i in 0..n {
            col[i] = stage[i * n + l];
        }
        let hat = sine_transform(&col, n);
        for k in 0..n {
            out[k * n + l] = hat[k];
        }
    }
    out
}

/// Inverse of [`dst_2d`]: the same sums scaled by `(2 / (n+1))^2`.
fn idst_2d<R: Real>(coeffs: &[R], n: usize) -> Vec<R> {
    let scale = R::of(2.0) / R::of_usize(n + 1);
    dst_2d(coeffs, n)
        .into_iter()
        .map(|v| v * scale * scale)
        .collect()
}

/// Solve the discretized coupled system by sine diagonalization: each
/// discrete mode yields a 2x2 solve with `λ_m` replaced by the discrete
/// eigenvalue.
pub fn fd_solve_system<R: Real>(
    grid: &FdGrid<R>,
    coupling: &CouplingMatrix<R>,
    mu: R,
    f: &[R],
    g: &[R],
) -> Result<(Vec<R>, Vec<R>)> {
    if f.len() != grid.len() || g.len() != grid.len() {
        return Err(AmpError::InvalidParam(format!(
            "expected {} grid values per component, got {} and {}",
            grid.len(),
            f.len(),
            g.len()
        )));
    }
    let n = grid.points_per_axis();
    let guard = R::of(FD_RESONANCE_GUARD);
    let disc = coupling.discriminant();
    let xi = if disc >= R::zero() {
        let root = disc.sqrt();
        let half = R::of(0.5);
        Some((
            (coupling.a + coupling.d + root) * half,
            (coupling.a + coupling.d - root) * half,
        ))
    } else {
        None
    };

    let solve_modes = |fh: &[R], gh: &[R], lams: &[R]| -> Result<(Vec<R>, Vec<R>)> {
        let mut uh = vec![R::zero(); fh.len()];
        let mut vh = vec![R::zero(); fh.len()];
        for (idx, &lam) in lams.iter().enumerate() {
            let p = lam - mu;
            if let Some((xi1, xi2)) = xi {
                for xi_i in [xi1, xi2] {
                    if (p - xi_i).abs() <= guard {
                        return Err(AmpError::DiscreteResonance {
                            mu: mu.as_f64(),
                            lambda: (lam - xi_i).as_f64(),
                            tol: FD_RESONANCE_GUARD,
                        });
                    }
                }
            }
            let det = (p - coupling.a) * (p - coupling.d) - coupling.b * coupling.c;
            uh[idx] = ((p - coupling.d) * fh[idx] + coupling.b * gh[idx]) / det;
            vh[idx] = (coupling.c * fh[idx] + (p - coupling.a) * gh[idx]) / det;
        }
        Ok((uh, vh))
    };

    match grid.domain.dim() {
        1 => {
            let (ex, _) = grid.axis_eigenvalues();
            let fh = sine_transform(f, n);
            let gh = sine_transform(g, n);
            let (uh, vh) = solve_modes(&fh, &gh, &ex)?;
            let scale = R::of(2.0) / R::of_usize(n + 1);
            let u = sine_transform(&uh, n)
                .into_iter()
                .map(|v| v * scale)
                .collect();
            let v = sine_transform(&vh, n)
                .into_iter()
                .map(|v| v * scale)
                .collect();
            Ok((u, v))
        }
        _ => {
            let (ex, ey) = grid.axis_eigenvalues();
            let ey = ey.expect("2d grid");
            let mut lams = vec![R::zero(); n * n];
            for k in 0..n {
                for l in 0..n {
                    lams[k * n + l] = ex[k] + ey[l];
                }
            }
            let fh = dst_2d(f, n);
            let gh = dst_2d(g, n);
            let (uh, vh) = solve_modes(&fh, &gh, &lams)?;
            Ok((idst_2d(&uh, n), idst_2d(&vh, n)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::solve_resolvent;
    use crate::spectral::{project_grid, SpectralFn};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let grid = FdGrid::new(Domain::unit_interval(), 32).unwrap();
        let z = fd_solve_scalar(&grid, -1.0, &vec![0.0; 32]).unwrap();
        assert!(z.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn discrete_eigenvector_solves_exactly() {
        let n = 64;
        let grid = FdGrid::new(Domain::unit_interval(), n).unwrap();
        let (h, _) = grid.mesh_widths();
        let lam1 = 4.0 / (h * h) * (PI / (2.0 * (n as f64 + 1.0))).sin().powi(2);
        let rhs: Vec<f64> = (1..=n)
            .map(|i| (PI * i as f64 / (n as f64 + 1.0)).sin())
            .collect();
        let mu = -2.0;
        let z = fd_solve_scalar(&grid, mu, &rhs).unwrap();
        for (zi, ri) in z.iter().zip(&rhs) {
            assert!((zi - ri / (lam1 - mu)).abs() < 1e-12);
        }
    }

    #[test]
    fn second_mode_error_shrinks_at_second_order() {
        // rhs = phi_2 samples, mu = 0: exact solution phi_2 / (4 pi^2).
        let d = Domain::unit_interval();
        let phi2 = SpectralFn::new(d, vec![0.0, 1.0]).unwrap();
        let mut errs = Vec::new();
        for n in [255usize, 511, 1023] {
            let grid = FdGrid::new(d, n).unwrap();
            let coords = grid.coords();
            let rhs = phi2.evaluate(&coords).unwrap();
            let z = fd_solve_scalar(&grid, 0.0, &rhs).unwrap();
            let exact: Vec<f64> = rhs.iter().map(|v| v / (4.0 * PI * PI)).collect();
            errs.push(sup_diff(&z, &exact));
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.6..=4.4).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn solve_is_symmetric_in_the_inner_product() {
        let grid = FdGrid::new(Domain::unit_interval(), 48).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x: Vec<f64> = (0..48).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..48).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ax = fd_solve_scalar(&grid, 3.0, &x).unwrap();
        let ay = fd_solve_scalar(&grid, 3.0, &y).unwrap();
        let lhs: f64 = ax.iter().zip(&y).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.iter().zip(&ay).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn discrete_maximum_principle_1d_and_2d() {
        let grid = FdGrid::new(Domain::unit_interval(), 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rhs: Vec<f64> = (0..64).map(|_| rng.gen_range(0.0..1.0)).collect();
        let z = fd_solve_scalar(&grid, 2.0, &rhs).unwrap();
        assert!(z.iter().all(|v| *v > 0.0));

        let sq = Domain::rectangle(1.0, 1.0).unwrap();
        let grid = FdGrid::new(sq, 16).unwrap();
        let rhs: Vec<f64> = (0..256).map(|_| rng.gen_range(0.0..1.0)).collect();
        let z = fd_solve_scalar(&grid, 5.0, &rhs).unwrap();
        assert!(z.iter().all(|v| *v > 0.0));
    }

    #[test]
    fn rectangle_solve_converges_to_spectral() {
        let sq = Domain::rectangle(1.0, 1.0).unwrap();
        let f = SpectralFn::new(sq, vec![1.0, -0.3, 0.2]).unwrap();
        let mu = 5.0;
        let zs = solve_resolvent(&f, mu).unwrap();
        let mut errs = Vec::new();
        for n in [15usize, 31, 63] {
            let grid = FdGrid::new(sq, n).unwrap();
            let coords = grid.coords();
            let rhs = f.evaluate(&coords).unwrap();
            let z = fd_solve_scalar(&grid, mu, &rhs).unwrap();
            let exact = zs.evaluate(&coords).unwrap();
            errs.push(sup_diff(&z, &exact));
        }
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn system_zero_forcing_gives_zero() {
        let grid = FdGrid::new(Domain::interval(PI).unwrap(), 16).unwrap();
        let a = CouplingMatrix::new(4.0, 1.0, -1.0, 1.0);
        let (u, v) = fd_solve_system(&grid, &a, -3.0, &[0.0; 16], &[0.0; 16]).unwrap();
        assert!(u.iter().chain(v.iter()).all(|x| *x == 0.0));
    }

    #[test]
    fn system_projects_to_reference_coefficient_at_second_order() {
        // At mu = -3, k = 7 the principal coefficient of v is exactly -1.
        let d = Domain::interval(PI).unwrap();
        let a = CouplingMatrix::new(4.0, 1.0, -1.0, 1.0);
        let f = SpectralFn::new(d, vec![1.0, -0.5]).unwrap();
        let g = f.scaled(7.0);
        let mut errs = Vec::new();
        for n in [511usize, 1023] {
            let grid = FdGrid::new(d, n).unwrap();
            let coords = grid.coords();
            let fv = f.evaluate(&coords).unwrap();
            let gv = g.evaluate(&coords).unwrap();
            let (_, v) = fd_solve_system(&grid, &a, -3.0, &fv, &gv).unwrap();
            let proj = project_grid(d, n, &v, 2).unwrap();
            errs.push((proj.coeff(0) + 1.0).abs());
        }
        assert!(errs[1] < errs[0]);
        let ratio = errs[0] / errs[1];
        assert!((3.4..=4.6).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn weak_coupling_limit_recovers_scalar_resolvent() {
        // As c -> 0^- the second equation decouples: v solves the scalar
        // problem with coefficient d + mu.
        let d = Domain::unit_interval();
        let a = CouplingMatrix::new(1.0, 0.5, -1e-6, 2.0);
        let mu = -4.0;
        let f = SpectralFn::new(d, vec![1.0]).unwrap();
        let g = SpectralFn::new(d, vec![1.0, 0.3]).unwrap();
        let n = 511;
        let grid = FdGrid::new(d, n).unwrap();
        let coords = grid.coords();
        let fv = f.evaluate(&coords).unwrap();
        let gv = g.evaluate(&coords).unwrap();
        let (_, v) = fd_solve_system(&grid, &a, mu, &fv, &gv).unwrap();
        let scalar = solve_resolvent(&g, a.d + mu).unwrap();
        let reference = scalar.evaluate(&coords).unwrap();
        assert!(sup_diff(&v, &reference) < 1e-4);
    }

    #[test]
    fn resonance_guard_trips_on_discrete_eigenvalue() {
        let n = 32;
        let grid = FdGrid::new(Domain::unit_interval(), n).unwrap();
        let (h, _) = grid.mesh_widths();
        let lam1 = 4.0 / (h * h) * (PI / (2.0 * (n as f64 + 1.0))).sin().powi(2);
        let rhs = vec![1.0; n];
        assert!(matches!(
            fd_solve_scalar(&grid, lam1, &rhs),
            Err(AmpError::DiscreteResonance { .. })
        ));
    }

    #[test]
    fn grid_validation() {
        assert!(FdGrid::new(Domain::<f64>::unit_interval(), 4).is_err());
        let grid = FdGrid::new(Domain::<f64>::unit_interval(), 8).unwrap();
        assert!(fd_solve_scalar(&grid, 0.0, &[1.0; 4]).is_err());
    }
}
