//! Functions represented by finite expansions in the Dirichlet sine basis.
//!
//! A [`SpectralFn`] stores coefficients against the L2-orthonormal eigenbasis
//! in the canonical mode ordering of its domain, so the L2 norm is the
//! Euclidean norm of the coefficients and the resolvent acts diagonally.

use serde::{Deserialize, Serialize};

use crate::domain::{Coord, Domain, Eigenpair, Grid, ModeIndex};
use crate::error::{AmpError, Result};
use crate::real::Real;

/// Norm selector for [`SpectralFn::norm`].
///
/// `L2` is evaluated exactly through the coefficient vector; the others are
/// evaluated on a uniform grid (composite Simpson quadrature for `Lq`).
/// On the interval any `q >= 1` is accepted so low-order norms can serve as
/// quadrature oracles; on the rectangle `q > 2` is required.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NormKind<R> {
    L2,
    Lq(R),
    LInf,
    C1,
}

/// Split against the principal eigenfunction: `h = alpha * phi_1 + h_perp`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "R: Real + Serialize",
    deserialize = "R: Real + Deserialize<'de>"
))]
pub struct Decomposition<R> {
    pub alpha: R,
    pub h_perp: SpectralFn<R>,
}

/// Finite expansion `sum_m c_m phi_m` against the canonical eigenbasis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "R: Real + Serialize",
    deserialize = "R: Real + Deserialize<'de>"
))]
pub struct SpectralFn<R> {
    domain: Domain<R>,
    coeffs: Vec<R>,
}

impl<R: Real> SpectralFn<R> {
    pub fn new(domain: Domain<R>, coeffs: Vec<R>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(AmpError::InvalidParam(
                "expansion needs at least one coefficient".into(),
            ));
        }
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite()) {
            return Err(AmpError::InvalidParam(format!(
                "coefficients must be finite, got {c}"
            )));
        }
        Ok(SpectralFn { domain, coeffs })
    }

    /// Zero function carried on `modes` coefficients.
    pub fn zeros(domain: Domain<R>, modes: usize) -> Self {
        SpectralFn {
            domain,
            coeffs: vec![R::zero(); modes.max(1)],
        }
    }

    /// The `m`-th basis function (1-based position in the canonical ordering).
    pub fn basis(domain: Domain<R>, position: usize, modes: usize) -> Result<Self> {
        if position == 0 || position > modes {
            return Err(AmpError::InvalidParam(format!(
                "basis position {position} outside 1..={modes}"
            )));
        }
        let mut coeffs = vec![R::zero(); modes];
        coeffs[position - 1] = R::one();
        SpectralFn::new(domain, coeffs)
    }

    pub fn domain(&self) -> Domain<R> {
        self.domain
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coefficient at 0-based position, zero beyond the stored length.
    pub fn coeff(&self, idx: usize) -> R {
        self.coeffs.get(idx).copied().unwrap_or_else(R::zero)
    }

    /// Eigenpairs matching the stored coefficients, in order.
    pub fn eigenpairs(&self) -> Vec<Eigenpair<R>> {
        self.domain
            .mode_ordering(self.coeffs.len())
            .into_iter()
            .map(|m| self.domain.eigenpair(m).expect("canonical mode"))
            .collect()
    }

    /// Split off the principal-mode component.
    pub fn decompose(&self) -> Decomposition<R> {
        let alpha = self.coeffs[0];
        let mut coeffs = self.coeffs.clone();
        coeffs[0] = R::zero();
        Decomposition {
            alpha,
            h_perp: SpectralFn {
                domain: self.domain,
                coeffs,
            },
        }
    }

    /// Pointwise values at strictly interior points.
    pub fn evaluate(&self, points: &[Coord<R>]) -> Result<Vec<R>> {
        for &p in points {
            if !self.domain.contains_interior(p) {
                return Err(AmpError::PointOutsideDomain {
                    x: p.x().as_f64(),
                    y: p.y().map(Real::as_f64),
                });
            }
        }
        Ok(self.eval_unchecked(points))
    }

    /// Value at one interior point.
    pub fn eval_at(&self, point: Coord<R>) -> Result<R> {
        Ok(self.evaluate(&[point])?[0])
    }

    /// Pointwise values without the interiority check (valid on the closure;
    /// the expansion vanishes on the boundary).
    pub(crate) fn eval_unchecked(&self, points: &[Coord<R>]) -> Vec<R> {
        let pairs = self.eigenpairs();
        points
            .iter()
            .map(|&p| {
                let mut acc = R::zero();
                for (c, pair) in self.coeffs.iter().zip(&pairs) {
                    if !c.is_zero() {
                        acc += *c * pair.eval(p);
                    }
                }
                acc
            })
            .collect()
    }

    /// Gradient components at arbitrary points of the closure, term by term.
    pub(crate) fn grad_unchecked(&self, points: &[Coord<R>]) -> Vec<(R, Option<R>)> {
        let pairs = self.eigenpairs();
        let two_d = self.domain.dim() == 2;
        points
            .iter()
            .map(|&p| {
                let mut gx = R::zero();
                let mut gy = R::zero();
                for (c, pair) in self.coeffs.iter().zip(&pairs) {
                    if !c.is_zero() {
                        let (dx, dy) = pair.eval_grad(p);
                        gx += *c * dx;
                        if let Some(dy) = dy {
                            gy += *c * dy;
                        }
                    }
                }
                (gx, if two_d { Some(gy) } else { None })
            })
            .collect()
    }

    /// Norm of the expansion; `n` is the evaluation grid size per axis for
    /// the grid-based kinds (`n >= 16`).
    pub fn norm(&self, kind: NormKind<R>, n: usize) -> Result<R> {
        match kind {
            NormKind::L2 => Ok(self
                .coeffs
                .iter()
                .fold(R::zero(), |acc, c| acc + *c * *c)
                .sqrt()),
            NormKind::LInf => {
                check_grid_n(n)?;
                let grid = Grid::new(self.domain, n)?;
                let vals = self.eval_unchecked(&grid.coords());
                Ok(vals.into_iter().fold(R::zero(), |acc, v| acc.max(v.abs())))
            }
            NormKind::Lq(q) => {
                check_grid_n(n)?;
                self.check_q(q)?;
                let integral = self.integrate_abs_pow(q, n);
                Ok(integral.powf(R::one() / q))
            }
            NormKind::C1 => {
                check_grid_n(n)?;
                let pts = closed_grid(self.domain, n);
                let vals = self.eval_unchecked(&pts);
                let max_val = vals.into_iter().fold(R::zero(), |a, v| a.max(v.abs()));
                let grads = self.grad_unchecked(&pts);
                let mut max_gx = R::zero();
                let mut max_gy = R::zero();
                for (gx, gy) in grads {
                    max_gx = max_gx.max(gx.abs());
                    if let Some(gy) = gy {
                        max_gy = max_gy.max(gy.abs());
                    }
                }
                Ok(max_val + max_gx + max_gy)
            }
        }
    }

    fn check_q(&self, q: R) -> Result<()> {
        if !q.is_finite() || q < R::one() {
            return Err(AmpError::NormUnsupported(format!(
                "Lq needs q >= 1, got {q}"
            )));
        }
        if self.domain.dim() >= 2 && q <= R::of(2.0) {
            return Err(AmpError::NormUnsupported(format!(
                "Lq on a 2-dimensional domain needs q > 2, got {q}"
            )));
        }
        Ok(())
    }

    /// Composite-Simpson integral of `|f|^q` over the domain.
    fn integrate_abs_pow(&self, q: R, n: usize) -> R {
        match self.domain {
            Domain::Interval { length } => {
                let w = simpson_weights::<R>(n + 1, length);
                let pts: Vec<Coord<R>> = (0..=n + 1)
                    .map(|i| Coord::X(length * R::of_usize(i) / R::of_usize(n + 1)))
                    .collect();
                let vals = self.eval_unchecked(&pts);
                vals.iter()
                    .zip(&w)
                    .fold(R::zero(), |acc, (v, wi)| acc + *wi * v.abs().powf(q))
            }
            Domain::Rectangle { lx, ly } => {
                let wx = simpson_weights::<R>(n + 1, lx);
                let wy = simpson_weights::<R>(n + 1, ly);
                let pts = closed_grid(self.domain, n);
                let vals = self.eval_unchecked(&pts);
                let m = n + 2;
                let mut acc = R::zero();
                for i in 0..m {
                    for j in 0..m {
                        acc += wx[i] * wy[j] * vals[i * m + j].abs().powf(q);
                    }
                }
                acc
            }
        }
    }

    /// Outward normal derivative on the boundary, term-by-term analytic.
    ///
    /// On the interval this is the pair `(-f'(0), f'(L))`; on the rectangle
    /// each edge is sampled at `density` interior positions (corners, where
    /// every expansion gradient vanishes tangentially, are excluded).
    pub fn normal_derivative(&self, density: usize) -> Result<BoundaryProfile<R>> {
        let zero = R::zero();
        match self.domain {
            Domain::Interval { length } => {
                let g = self.grad_unchecked(&[Coord::X(zero), Coord::X(length)]);
                Ok(BoundaryProfile {
                    samples: vec![
                        BoundarySample {
                            location: Coord::X(zero),
                            outward_normal_derivative: -g[0].0,
                        },
                        BoundarySample {
                            location: Coord::X(length),
                            outward_normal_derivative: g[1].0,
                        },
                    ],
                })
            }
            Domain::Rectangle { lx, ly } => {
                if density == 0 {
                    return Err(AmpError::InvalidParam(
                        "edge sampling density must be positive".into(),
                    ));
                }
                let step = |l: R, i: usize| l * R::of_usize(i) / R::of_usize(density + 1);
                let mut samples = Vec::with_capacity(4 * density);
                // x = 0 and x = Lx edges, outward normals -x and +x.
                for i in 1..=density {
                    let y = step(ly, i);
                    let g = self.grad_unchecked(&[Coord::XY(zero, y)])[0].0;
                    samples.push(BoundarySample {
                        location: Coord::XY(zero, y),
                        outward_normal_derivative: -g,
                    });
                }
                for i in 1..=density {
                    let y = step(ly, i);
                    let g = self.grad_unchecked(&[Coord::XY(lx, y)])[0].0;
                    samples.push(BoundarySample {
                        location: Coord::XY(lx, y),
                        outward_normal_derivative: g,
                    });
                }
                // y = 0 and y = Ly edges, outward normals -y and +y.
                for i in 1..=density {
                    let x = step(lx, i);
                    let g = self.grad_unchecked(&[Coord::XY(x, zero)])[0]
                        .1
                        .expect("2d gradient");
                    samples.push(BoundarySample {
                        location: Coord::XY(x, zero),
                        outward_normal_derivative: -g,
                    });
                }
                for i in 1..=density {
                    let x = step(lx, i);
                    let g = self.grad_unchecked(&[Coord::XY(x, ly)])[0]
                        .1
                        .expect("2d gradient");
                    samples.push(BoundarySample {
                        location: Coord::XY(x, ly),
                        outward_normal_derivative: g,
                    });
                }
                Ok(BoundaryProfile { samples })
            }
        }
    }

    /// `self * c`.
    pub fn scaled(&self, c: R) -> Self {
        SpectralFn {
            domain: self.domain,
            coeffs: self.coeffs.iter().map(|v| *v * c).collect(),
        }
    }

    /// `a * self + b * other`; the domains must match.
    pub fn combine(&self, a: R, other: &Self, b: R) -> Result<Self> {
        if self.domain != other.domain {
            return Err(AmpError::InvalidParam(
                "cannot combine expansions on different domains".into(),
            ));
        }
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| a * self.coeff(i) + b * other.coeff(i))
            .collect();
        SpectralFn::new(self.domain, coeffs)
    }
}

impl<R: Real> std::ops::Neg for &SpectralFn<R> {
    type Output = SpectralFn<R>;
    fn neg(self) -> SpectralFn<R> {
        self.scaled(-R::one())
    }
}

fn check_grid_n(n: usize) -> Result<()> {
    if n < 16 {
        Err(AmpError::InvalidParam(format!(
            "grid-based norms need n >= 16, got {n}"
        )))
    } else {
        Ok(())
    }
}

/// Closed tensor grid with `n` interior points plus the two boundary layers
/// per axis; row-major with x outer in 2D.
fn closed_grid<R: Real>(domain: Domain<R>, n: usize) -> Vec<Coord<R>> {
    match domain {
        Domain::Interval { length } => (0..=n + 1)
            .map(|i| Coord::X(length * R::of_usize(i) / R::of_usize(n + 1)))
            .collect(),
        Domain::Rectangle { lx, ly } => {
            let mut out = Vec::with_capacity((n + 2) * (n + 2));
            for i in 0..=n + 1 {
                let x = lx * R::of_usize(i) / R::of_usize(n + 1);
                for j in 0..=n + 1 {
                    out.push(Coord::XY(x, ly * R::of_usize(j) / R::of_usize(n + 1)));
                }
            }
            out
        }
    }
}

/// Composite Simpson weights over `m` equal subintervals of `[0, length]`
/// (`m + 1` nodes). An odd `m` is handled with a 3/8 block on the last three
/// subintervals.
fn simpson_weights<R: Real>(m: usize, length: R) -> Vec<R> {
    assert!(m >= 3, "quadrature needs at least 3 subintervals");
    let h = length / R::of_usize(m);
    let third = h / R::of(3.0);
    let mut w = vec![R::zero(); m + 1];
    let even_part = if m.is_multiple_of(2) { m } else { m - 3 };
    // Standard composite Simpson on [0, even_part].
    w[0] += third;
    w[even_part] += third;
    for (i, wi) in w.iter_mut().enumerate().take(even_part).skip(1) {
        *wi += if i % 2 == 1 {
            third * R::of(4.0)
        } else {
            third * R::of(2.0)
        };
    }
    if m % 2 == 1 {
        // Simpson 3/8 on the trailing three subintervals.
        let c = h * R::of(3.0 / 8.0);
        w[m - 3] += c;
        w[m - 2] += c * R::of(3.0);
        w[m - 1] += c * R::of(3.0);
        w[m] += c;
    }
    w
}

/// One boundary sample: location and the outward normal derivative there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySample<R> {
    pub location: Coord<R>,
    pub outward_normal_derivative: R,
}

/// Outward normal derivative sampled along the boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryProfile<R> {
    samples: Vec<BoundarySample<R>>,
}

impl<R: Real> BoundaryProfile<R> {
    pub fn samples(&self) -> &[BoundarySample<R>] {
        &self.samples
    }

    pub fn min_sample(&self) -> &BoundarySample<R> {
        self.samples
            .iter()
            .min_by(|a, b| {
                a.outward_normal_derivative
                    .partial_cmp(&b.outward_normal_derivative)
                    .expect("finite derivative")
            })
            .expect("nonempty profile")
    }

    pub fn max_sample(&self) -> &BoundarySample<R> {
        self.samples
            .iter()
            .max_by(|a, b| {
                a.outward_normal_derivative
                    .partial_cmp(&b.outward_normal_derivative)
                    .expect("finite derivative")
            })
            .expect("nonempty profile")
    }

    /// The `(-f'(0), f'(L))` pair on an interval domain.
    pub fn endpoint_pair(&self) -> Option<(R, R)> {
        match self.samples.as_slice() {
            [a, b] => Some((a.outward_normal_derivative, b.outward_normal_derivative)),
            _ => None,
        }
    }
}

/// Recover expansion coefficients from samples on the uniform interior grid
/// using exact discrete sine orthogonality. `values` is row-major with x
/// outer in 2D and must hold `n` (1D) or `n * n` (2D) entries; the result is
/// exact (up to rounding) for inputs band-limited to the first `n` modes per
/// axis.
pub fn project_grid<R: Real>(
    domain: Domain<R>,
    n: usize,
    values: &[R],
    modes: usize,
) -> Result<SpectralFn<R>> {
    if modes == 0 {
        return Err(AmpError::InvalidParam("need at least one mode".into()));
    }
    if modes > n {
        return Err(AmpError::InvalidParam(format!(
            "requested {modes} modes from an {n}-point grid; discrete orthogonality needs modes <= n"
        )));
    }
    let expected = if domain.dim() == 1 { n } else { n * n };
    if values.len() != expected {
        return Err(AmpError::InvalidParam(format!(
            "expected {expected} grid values, got {}",
            values.len()
        )));
    }
    let pi = R::PI();
    let np1 = R::of_usize(n + 1);
    let scale = R::of(2.0) / np1;
    let half = R::of(0.5);
    match domain {
        Domain::Interval { length } => {
            let amp = (length * half).sqrt();
            let coeffs = (1..=modes)
                .map(|k| {
                    let mut acc = R::zero();
                    for (i, v) in values.iter().enumerate() {
                        let arg = pi * R::of_usize(k * (i + 1)) / np1;
                        acc += *v * arg.sin();
                    }
                    amp * scale * acc
                })
                .collect();
            SpectralFn::new(domain, coeffs)
        }
        Domain::Rectangle { lx, ly } => {
            let amp = (lx * half).sqrt() * (ly * half).sqrt();
            let ordering = domain.mode_ordering(modes);
            let coeffs = ordering
                .into_iter()
                .map(|m| {
                    let (k, l) = match m {
                        ModeIndex::Rectangle(k, l) => (k, l),
                        ModeIndex::Interval(_) => unreachable!(),
                    };
                    let mut acc = R::zero();
                    for i in 1..=n {
                        let sx = (pi * R::of_usize(k * i) / np1).sin();
                        let mut row = R::zero();
                        for j in 1..=n {
                            row += values[(i - 1) * n + (j - 1)]
                                * (pi * R::of_usize(l * j) / np1).sin();
                        }
                        acc += sx * row;
                    }
                    amp * scale * scale * acc
                })
                .collect();
            SpectralFn::new(domain, coeffs)
        }
    }
}

/// Sup-norm mismatch between grid samples and the reconstruction of their
/// projection, i.e. what the truncation to `modes` coefficients lost. Zero
/// (up to rounding) for band-limited inputs.
pub fn projection_residual<R: Real>(
    projected: &SpectralFn<R>,
    n: usize,
    values: &[R],
) -> Result<R> {
    let grid = Grid::new(projected.domain(), n)?;
    let coords = grid.coords();
    if coords.len() != values.len() {
        return Err(AmpError::InvalidParam(format!(
            "expected {} grid values, got {}",
            coords.len(),
            values.len()
        )));
    }
    let recon = projected.eval_unchecked(&coords);
    Ok(recon
        .iter()
        .zip(values)
        .fold(R::zero(), |acc, (r, v)| acc.max((*r - *v).abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn unit() -> Domain<f64> {
        Domain::unit_interval()
    }

    fn phi(k: usize, modes: usize) -> SpectralFn<f64> {
        SpectralFn::basis(unit(), k, modes).unwrap()
    }

    #[test]
    fn decompose_splits_principal_component() {
        let h = SpectralFn::new(unit(), vec![1.0, 1.0]).unwrap();
        let d = h.decompose();
        assert_eq!(d.alpha, 1.0);
        assert_eq!(d.h_perp.coeffs(), &[0.0, 1.0]);

        let pure = phi(1, 4);
        let d = pure.decompose();
        assert_eq!(d.alpha, 1.0);
        assert!(d.h_perp.coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn evaluate_matches_closed_forms() {
        assert_relative_eq!(
            phi(1, 2).eval_at(Coord::X(0.5)).unwrap(),
            2f64.sqrt(),
            max_relative = 1e-14
        );
        assert!(phi(2, 2).eval_at(Coord::X(0.5)).unwrap().abs() < 1e-15);
        // phi_1 - phi_2 / 2 at 0.25 collapses to 1 - sqrt(2)/2.
        let f = SpectralFn::new(unit(), vec![1.0, -0.5]).unwrap();
        assert_relative_eq!(
            f.eval_at(Coord::X(0.25)).unwrap(),
            1.0 - 2f64.sqrt() / 2.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn evaluate_rejects_boundary_and_exterior_points() {
        let f = phi(1, 1);
        assert!(f.evaluate(&[Coord::X(0.0)]).is_err());
        assert!(f.evaluate(&[Coord::X(1.0)]).is_err());
        assert!(f.evaluate(&[Coord::X(-0.25)]).is_err());
        assert!(f.evaluate(&[Coord::XY(0.5, 0.5)]).is_err());
    }

    #[test]
    fn l2_norm_is_euclidean() {
        let f = SpectralFn::new(unit(), vec![3.0, 4.0]).unwrap();
        assert_relative_eq!(f.norm(NormKind::L2, 16).unwrap(), 5.0, max_relative = 1e-15);
        let phi1 = phi(1, 1);
        assert_eq!(phi1.norm(NormKind::L2, 16).unwrap(), 1.0);
    }

    #[test]
    fn l1_norm_of_principal_mode() {
        // integral of sqrt(2) sin(pi x) over (0,1) is 2 sqrt(2) / pi.
        let f = phi(1, 1);
        let l1 = f.norm(NormKind::Lq(1.0), 1024).unwrap();
        assert_relative_eq!(l1, 2.0 * 2f64.sqrt() / PI, max_relative = 1e-10);
    }

    #[test]
    fn c1_norm_of_principal_mode() {
        // max |phi_1| = sqrt(2) (grid hits x = 1/2 when n is odd) and
        // max |phi_1'| = sqrt(2) pi at the endpoints.
        let f = phi(1, 1);
        let c1 = f.norm(NormKind::C1, 1023).unwrap();
        assert_relative_eq!(c1, 2f64.sqrt() + 2f64.sqrt() * PI, max_relative = 1e-12);
    }

    #[test]
    fn lq_validation() {
        let f = phi(1, 1);
        assert!(f.norm(NormKind::Lq(0.5), 64).is_err());
        assert!(f.norm(NormKind::Lq(2.0), 8).is_err());
        let sq = SpectralFn::basis(Domain::rectangle(1.0, 1.0).unwrap(), 1, 1).unwrap();
        assert!(sq.norm(NormKind::Lq(2.0), 64).is_err());
        assert!(sq.norm(NormKind::Lq(3.0), 64).is_ok());
    }

    #[test]
    fn normal_derivative_interval_examples() {
        let s2pi = 2f64.sqrt() * PI;
        let (l, r) = phi(1, 2)
            .normal_derivative(1)
            .unwrap()
            .endpoint_pair()
            .unwrap();
        assert_relative_eq!(l, -s2pi, max_relative = 1e-14);
        assert_relative_eq!(r, -s2pi, max_relative = 1e-14);

        let neg = -&phi(1, 2);
        let (l, r) = neg.normal_derivative(1).unwrap().endpoint_pair().unwrap();
        assert_relative_eq!(l, s2pi, max_relative = 1e-14);
        assert_relative_eq!(r, s2pi, max_relative = 1e-14);

        let (l, r) = phi(2, 2)
            .normal_derivative(1)
            .unwrap()
            .endpoint_pair()
            .unwrap();
        assert_relative_eq!(l, -2.0 * s2pi, max_relative = 1e-14);
        assert_relative_eq!(r, 2.0 * s2pi, max_relative = 1e-14);
    }

    #[test]
    fn principal_mode_points_down_on_square_boundary() {
        let sq = Domain::rectangle(1.0, 1.0).unwrap();
        let f = SpectralFn::basis(sq, 1, 1).unwrap();
        let profile = f.normal_derivative(9).unwrap();
        assert_eq!(profile.samples().len(), 36);
        assert!(profile
            .samples()
            .iter()
            .all(|s| s.outward_normal_derivative < 0.0));
    }

    #[test]
    fn project_grid_recovers_basis_vectors() {
        let d = unit();
        let n = 64;
        let grid = Grid::new(d, n).unwrap();
        let samples = phi(3, 8).evaluate(&grid.coords()).unwrap();
        let p = project_grid(d, n, &samples, 8).unwrap();
        for (i, &c) in p.coeffs().iter().enumerate() {
            let expect = if i == 2 { 1.0 } else { 0.0 };
            assert!((c - expect).abs() < 1e-12, "coeff {i} = {c}");
        }

        let f = SpectralFn::new(d, vec![2.0, -1.0]).unwrap();
        let samples = f.evaluate(&grid.coords()).unwrap();
        let p = project_grid(d, n, &samples, 8).unwrap();
        assert!((p.coeff(0) - 2.0).abs() < 1e-12);
        assert!((p.coeff(1) + 1.0).abs() < 1e-12);
        assert!(p.coeffs()[2..].iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn project_grid_first_coefficient_of_parabola() {
        // x (1 - x) has first sine coefficient 4 sqrt(2) / pi^3 against the
        // normalized basis; cross-checked by Simpson quadrature.
        let d = unit();
        let n = 1024;
        let grid = Grid::new(d, n).unwrap();
        let samples: Vec<f64> = grid
            .coords()
            .iter()
            .map(|c| c.x() * (1.0 - c.x()))
            .collect();
        let p = project_grid(d, n, &samples, 16).unwrap();
        let analytic = 4.0 * 2f64.sqrt() / PI.powi(3);
        assert_relative_eq!(p.decompose().alpha, analytic, max_relative = 1e-9);

        // Independent quadrature oracle for the same inner product.
        let m = 4096usize;
        let h = 1.0 / (m as f64);
        let mut acc = 0.0;
        for i in 0..=m {
            let x = i as f64 * h;
            let w = if i == 0 || i == m {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * x * (1.0 - x) * 2f64.sqrt() * (PI * x).sin();
        }
        acc *= h / 3.0;
        assert_relative_eq!(p.decompose().alpha, acc, max_relative = 1e-9);
    }

    #[test]
    fn project_grid_validates_mode_count() {
        let d = unit();
        assert!(project_grid(d, 8, &[0.0; 8], 9).is_err());
        assert!(project_grid(d, 8, &[0.0; 7], 4).is_err());
    }

    #[test]
    fn projection_round_trip_2d() {
        let sq: Domain<f64> = Domain::rectangle(1.0, 2.0).unwrap();
        let f = SpectralFn::new(sq, vec![1.0, -0.5, 0.25, 0.0, 2.0]).unwrap();
        let n = 24;
        let grid = Grid::new(sq, n).unwrap();
        let samples = f.evaluate(&grid.coords()).unwrap();
        let p = project_grid(sq, n, &samples, 5).unwrap();
        for (a, b) in p.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b).abs() < 1e-12f64);
        }
        assert!(projection_residual(&p, n, &samples).unwrap() < 1e-12);
    }

    #[test]
    fn simpson_weights_integrate_cubics_exactly() {
        // Both the even and the odd (3/8-terminated) branch are exact for x^3.
        for m in [16usize, 17] {
            let w = simpson_weights::<f64>(m, 2.0);
            let h = 2.0 / m as f64;
            let acc: f64 = w
                .iter()
                .enumerate()
                .map(|(i, wi)| wi * (i as f64 * h).powi(3))
                .sum();
            assert_relative_eq!(acc, 4.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn spectral_fn_json_round_trip() {
        let f = SpectralFn::new(unit(), vec![1.0, -0.5]).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(
            s,
            r#"{"domain":{"kind":"interval","lengths":[1.0]},"coeffs":[1.0,-0.5]}"#
        );
        let back: SpectralFn<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
