//! Spectral laboratory for maximum/antimaximum-principle experiments.
//!
//! The crate solves the Dirichlet resolvent equation `-Δz = μz + h` and the
//! coupled 2x2 system `-ΔU = AU + μU + F` on intervals and rectangles by
//! exact eigenfunction expansion, classifies solution signs, measures the
//! interval of parameters above the principal eigenvalue on which the
//! antimaximum principle holds, and cross-checks everything against an
//! independent finite-difference discretization.
//!
//! All numeric types are generic over the scalar [`Real`] (`f32` or `f64`);
//! `f64` aliases are exported at the crate root.

pub mod domain;
pub mod error;
pub mod fd;
pub mod io;
pub mod real;
pub mod sampling;
pub mod scalar;
pub mod spectral;
pub mod system;

pub use domain::{Coord, Domain, Eigenpair, Grid, ModeIndex};
pub use error::{AmpError, Result};
pub use real::Real;
pub use scalar::{
    boundary_constants, classify_sign, empirical_amp_interval, estimate_k, solve_resolvent,
    AmpInterval, AmpScanOptions, BoundaryConstants, KEstimate, KSample, SignReport, SignVerdict,
};
pub use spectral::{
    project_grid, projection_residual, BoundaryProfile, BoundarySample, Decomposition, NormKind,
    SpectralFn,
};
pub use system::{
    counterexample_part1, counterexample_part2, coupling_constants, decouple_difference,
    decouple_sum, gammas, grid_sign, hypothesis_report, solve_system, spectrum, verify_pattern,
    window_budget, window_equivalences, Counterexample1Report, Counterexample2Report,
    CouplingConstants, CouplingMatrix, DecoupledDifference, DecoupledSum, EquivalencePair, FnSign,
    GammaPair, HypothesisReport, PatternId, PatternVerdict, SystemSpectrum, VerifyOptions,
    WindowBudget, WindowEquivalences,
};

/// Default truncation length for expansions.
pub const DEFAULT_MODES: usize = 64;
/// Default evaluation grid (points per axis) on intervals.
pub const DEFAULT_GRID_1D: usize = 1024;
/// Default evaluation grid (points per axis) on rectangles.
pub const DEFAULT_GRID_2D: usize = 256;
/// Default relative sign tolerance: `tau = DEFAULT_TAU_REL * ||z||_inf`.
pub const DEFAULT_TAU_REL: f64 = 1e-9;
/// Relative guard for `1 / (lambda_m - mu)` in the scalar resolvent.
pub const RESONANCE_GUARD: f64 = 1e-10;
/// Relative guard for the per-mode system determinant factors.
pub const SYSTEM_RESONANCE_GUARD: f64 = 1e-10;
/// Absolute guard against discrete eigenvalues in the finite-difference path.
pub const FD_RESONANCE_GUARD: f64 = 1e-8;

pub type Domain64 = Domain<f64>;
pub type SpectralFn64 = SpectralFn<f64>;
pub type SignReport64 = SignReport<f64>;
pub type AmpInterval64 = AmpInterval<f64>;
pub type CouplingMatrix64 = CouplingMatrix<f64>;
