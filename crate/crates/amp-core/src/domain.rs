//! Domains with analytic Dirichlet eigenpairs.
//!
//! Two domain shapes are supported: the interval `(0, L)` and the rectangle
//! `(0, Lx) x (0, Ly)`. Both have closed-form Dirichlet eigenpairs of the
//! negative Laplacian built from sines, which is what makes every solve in
//! this crate exact for band-limited data.

use serde::{Deserialize, Serialize};

use crate::error::{AmpError, Result};
use crate::real::Real;

/// A point of the domain: `X` for intervals, `XY` for rectangles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord<R> {
    X(R),
    XY(R, R),
}

impl<R: Real> Coord<R> {
    pub fn x(&self) -> R {
        match *self {
            Coord::X(x) | Coord::XY(x, _) => x,
        }
    }

    pub fn y(&self) -> Option<R> {
        match *self {
            Coord::X(_) => None,
            Coord::XY(_, y) => Some(y),
        }
    }
}

/// Index of a Dirichlet eigenpair: `k >= 1` on the interval, `(k, l)` with
/// `k, l >= 1` on the rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModeIndex {
    Interval(usize),
    Rectangle(usize, usize),
}

impl std::fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModeIndex::Interval(k) => write!(f, "{k}"),
            ModeIndex::Rectangle(k, l) => write!(f, "({k},{l})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum DomainKind {
    Interval,
    Rectangle,
}

/// Wire form `{ "kind": ..., "lengths": [...] }` used for (de)serialization.
#[derive(Serialize, Deserialize)]
struct DomainRepr<R> {
    kind: DomainKind,
    lengths: Vec<R>,
}

/// Bounded domain with an analytic Dirichlet sine eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "DomainRepr<R>",
    into = "DomainRepr<R>",
    bound(
        serialize = "R: Real + Serialize",
        deserialize = "R: Real + Deserialize<'de>"
    )
)]
pub enum Domain<R> {
    Interval { length: R },
    Rectangle { lx: R, ly: R },
}

impl<R: Real> TryFrom<DomainRepr<R>> for Domain<R> {
    type Error = AmpError;

    fn try_from(repr: DomainRepr<R>) -> Result<Self> {
        match (repr.kind, repr.lengths.as_slice()) {
            (DomainKind::Interval, &[l]) => Domain::interval(l),
            (DomainKind::Rectangle, &[lx, ly]) => Domain::rectangle(lx, ly),
            (kind, lengths) => Err(AmpError::InvalidDomain(format!(
                "{kind:?} expects {} length(s), got {}",
                if kind == DomainKind::Interval { 1 } else { 2 },
                lengths.len()
            ))),
        }
    }
}

impl<R: Real> From<Domain<R>> for DomainRepr<R> {
    fn from(d: Domain<R>) -> Self {
        match d {
            Domain::Interval { length } => DomainRepr {
                kind: DomainKind::Interval,
                lengths: vec![length],
            },
            Domain::Rectangle { lx, ly } => DomainRepr {
                kind: DomainKind::Rectangle,
                lengths: vec![lx, ly],
            },
        }
    }
}

impl<R: Real> Domain<R> {
    pub fn interval(length: R) -> Result<Self> {
        if length > R::zero() && length.is_finite() {
            Ok(Domain::Interval { length })
        } else {
            Err(AmpError::InvalidDomain(format!(
                "interval length must be positive, got {length}"
            )))
        }
    }

    pub fn rectangle(lx: R, ly: R) -> Result<Self> {
        if lx > R::zero() && ly > R::zero() && lx.is_finite() && ly.is_finite() {
            Ok(Domain::Rectangle { lx, ly })
        } else {
            Err(AmpError::InvalidDomain(format!(
                "rectangle lengths must be positive, got ({lx}, {ly})"
            )))
        }
    }

    /// Unit interval `(0, 1)`.
    pub fn unit_interval() -> Self {
        Domain::Interval { length: R::one() }
    }

    /// Spatial dimension: 1 or 2.
    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Rectangle { .. } => 2,
        }
    }

    /// Radius of the largest inscribed ball.
    pub fn inradius(&self) -> R {
        let half = R::of(0.5);
        match *self {
            Domain::Interval { length } => length * half,
            Domain::Rectangle { lx, ly } => lx.min(ly) * half,
        }
    }

    /// Distance from an interior point to the boundary.
    pub fn boundary_distance(&self, c: Coord<R>) -> R {
        match (*self, c) {
            (Domain::Interval { length }, Coord::X(x)) => x.min(length - x),
            (Domain::Rectangle { lx, ly }, Coord::XY(x, y)) => x.min(lx - x).min(y).min(ly - y),
            _ => R::nan(),
        }
    }

    /// True when the point lies strictly inside the domain.
    pub fn contains_interior(&self, c: Coord<R>) -> bool {
        match (*self, c) {
            (Domain::Interval { length }, Coord::X(x)) => x > R::zero() && x < length,
            (Domain::Rectangle { lx, ly }, Coord::XY(x, y)) => {
                x > R::zero() && x < lx && y > R::zero() && y < ly
            }
            _ => false,
        }
    }

    fn check_mode(&self, mode: ModeIndex) -> Result<()> {
        match (self, mode) {
            (Domain::Interval { .. }, ModeIndex::Interval(k)) if k >= 1 => Ok(()),
            (Domain::Rectangle { .. }, ModeIndex::Rectangle(k, l)) if k >= 1 && l >= 1 => Ok(()),
            (Domain::Interval { .. }, ModeIndex::Interval(_))
            | (Domain::Rectangle { .. }, ModeIndex::Rectangle(..)) => Err(AmpError::InvalidMode(
                format!("indices must be >= 1, got {mode}"),
            )),
            _ => Err(AmpError::InvalidMode(format!(
                "mode {mode} does not match a {}-dimensional domain",
                self.dim()
            ))),
        }
    }

    /// Dirichlet eigenvalue of `-Laplace` for the given mode.
    pub fn eigenvalue(&self, mode: ModeIndex) -> Result<R> {
        self.check_mode(mode)?;
        let pi = R::PI();
        Ok(match (*self, mode) {
            (Domain::Interval { length }, ModeIndex::Interval(k)) => {
                let w = R::of_usize(k) * pi / length;
                w * w
            }
            (Domain::Rectangle { lx, ly }, ModeIndex::Rectangle(k, l)) => {
                let wx = R::of_usize(k) * pi / lx;
                let wy = R::of_usize(l) * pi / ly;
                wx * wx + wy * wy
            }
            _ => unreachable!(),
        })
    }

    /// Eigenvalue plus a closed-form evaluator for the L2-normalized
    /// eigenfunction (the principal one is positive inside).
    pub fn eigenpair(&self, mode: ModeIndex) -> Result<Eigenpair<R>> {
        let lambda = self.eigenvalue(mode)?;
        Ok(Eigenpair {
            domain: *self,
            mode,
            lambda,
        })
    }

    /// Principal mode: `k = 1` on the interval, `(1, 1)` on the rectangle.
    pub fn principal_mode(&self) -> ModeIndex {
        match self {
            Domain::Interval { .. } => ModeIndex::Interval(1),
            Domain::Rectangle { .. } => ModeIndex::Rectangle(1, 1),
        }
    }

    /// First `count` modes in the canonical ordering: ascending eigenvalue,
    /// ties broken lexicographically on `(k, l)`. Position 0 is always the
    /// principal mode and eigenvalues are nondecreasing along the ordering.
    pub fn mode_ordering(&self, count: usize) -> Vec<ModeIndex> {
        match *self {
            Domain::Interval { .. } => (1..=count).map(ModeIndex::Interval).collect(),
            Domain::Rectangle { .. } => {
                // The `count` smallest eigenvalues always have k, l <= count:
                // for any (k, l) with k > count, the modes (1, l)..(count, l)
                // are all strictly smaller.
                let mut modes: Vec<(R, usize, usize)> = Vec::with_capacity(count * count);
                for k in 1..=count {
                    for l in 1..=count {
                        let lam = self
                            .eigenvalue(ModeIndex::Rectangle(k, l))
                            .expect("valid mode");
                        modes.push((lam, k, l));
                    }
                }
                modes.sort_by(|a, b| {
                    a.0.partial_cmp(&b.0)
                        .expect("finite eigenvalue")
                        .then(a.1.cmp(&b.1))
                        .then(a.2.cmp(&b.2))
                });
                modes
                    .into_iter()
                    .take(count)
                    .map(|(_, k, l)| ModeIndex::Rectangle(k, l))
                    .collect()
            }
        }
    }

    /// Smallest eigenvalue.
    pub fn lambda1(&self) -> R {
        self.eigenvalue(self.principal_mode())
            .expect("principal mode")
    }

    /// Second-smallest eigenvalue in the canonical ordering.
    pub fn lambda2(&self) -> R {
        let modes = self.mode_ordering(2);
        self.eigenvalue(modes[1]).expect("second mode")
    }
}

/// Closed-form Dirichlet eigenpair: the eigenvalue and an evaluator for the
/// L2-normalized eigenfunction and its gradient.
#[derive(Debug, Clone, Copy)]
pub struct Eigenpair<R> {
    domain: Domain<R>,
    mode: ModeIndex,
    pub lambda: R,
}

impl<R: Real> Eigenpair<R> {
    pub fn mode(&self) -> ModeIndex {
        self.mode
    }

    /// Eigenfunction value; defined on the closed domain (zero on the boundary).
    pub fn eval(&self, c: Coord<R>) -> R {
        let pi = R::PI();
        let two = R::of(2.0);
        match (self.domain, self.mode, c) {
            (Domain::Interval { length }, ModeIndex::Interval(k), Coord::X(x)) => {
                (two / length).sqrt() * (R::of_usize(k) * pi * x / length).sin()
            }
            (Domain::Rectangle { lx, ly }, ModeIndex::Rectangle(k, l), Coord::XY(x, y)) => {
                let nx = (two / lx).sqrt() * (R::of_usize(k) * pi * x / lx).sin();
                let ny = (two / ly).sqrt() * (R::of_usize(l) * pi * y / ly).sin();
                nx * ny
            }
            _ => R::nan(),
        }
    }

    /// Gradient of the eigenfunction (one component per dimension).
    pub fn eval_grad(&self, c: Coord<R>) -> (R, Option<R>) {
        let pi = R::PI();
        let two = R::of(2.0);
        match (self.domain, self.mode, c) {
            (Domain::Interval { length }, ModeIndex::Interval(k), Coord::X(x)) => {
                let w = R::of_usize(k) * pi / length;
                ((two / length).sqrt() * w * (w * x).cos(), None)
            }
            (Domain::Rectangle { lx, ly }, ModeIndex::Rectangle(k, l), Coord::XY(x, y)) => {
                let wx = R::of_usize(k) * pi / lx;
                let wy = R::of_usize(l) * pi / ly;
                let sx = (two / lx).sqrt();
                let sy = (two / ly).sqrt();
                let gx = sx * wx * (wx * x).cos() * sy * (wy * y).sin();
                let gy = sx * (wx * x).sin() * sy * wy * (wy * y).cos();
                (gx, Some(gy))
            }
            _ => (R::nan(), None),
        }
    }
}

/// Uniform interior grid: `n` points per axis, spacing `L / (n + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<R> {
    domain: Domain<R>,
    n: usize,
}

impl<R: Real> Grid<R> {
    pub fn new(domain: Domain<R>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(AmpError::InvalidParam(
                "grid needs at least one point".into(),
            ));
        }
        Ok(Grid { domain, n })
    }

    pub fn domain(&self) -> Domain<R> {
        self.domain
    }

    /// Interior points per axis.
    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    /// Total number of interior points (`n` or `n^2`).
    pub fn len(&self) -> usize {
        match self.domain.dim() {
            1 => self.n,
            _ => self.n * self.n,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn axis_point(length: R, i: usize, n: usize) -> R {
        length * R::of_usize(i) / R::of_usize(n + 1)
    }

    /// Interior coordinates; 2D is row-major with x as the outer index.
    pub fn coords(&self) -> Vec<Coord<R>> {
        match self.domain {
            Domain::Interval { length } => (1..=self.n)
                .map(|i| Coord::X(Self::axis_point(length, i, self.n)))
                .collect(),
            Domain::Rectangle { lx, ly } => {
                let mut out = Vec::with_capacity(self.n * self.n);
                for i in 1..=self.n {
                    let x = Self::axis_point(lx, i, self.n);
                    for j in 1..=self.n {
                        out.push(Coord::XY(x, Self::axis_point(ly, j, self.n)));
                    }
                }
                out
            }
        }
    }
}
