//! Eigenvalue growth along shrinking neighborhoods of a compact set.
//!
//! For open sets `U_j ⊃⊃ K` shrinking onto `K`, the Dirichlet ground values
//! `λ(U_j)` diverge exactly when `K` is negligible for the Dirichlet form.
//! Euclidean metric neighborhoods `{dist(·,K) < r_j}` stand in for general
//! shrinking bases; verdicts are therefore labeled "at grid scale" and make
//! no claim about the continuum fine topology.

use std::sync::Arc;

use crate::assembly::assemble_nonmagnetic;
use crate::eigen::{ground_state_with_start, SolverOpts};
use crate::error::{Error, Result};
use crate::grid::{neighborhood_grid, CompactSetSpec, GridDomain};
use crate::semiclassical::{classify_values, ClassifyOpts, Verdict, VerdictKind};
use crate::weight::Weight;

/// The `λ(U_j)` sequence along shrinking neighborhoods of a compact set.
#[derive(Clone, Debug)]
pub struct NeighborhoodFamily {
    pub set: CompactSetSpec,
    /// strictly decreasing neighborhood radii
    pub radii: Vec<f64>,
    /// Dirichlet ground values per level
    pub lambdas: Vec<f64>,
    /// grid spacing used per level
    pub h_used: Vec<f64>,
    /// lattice area of each neighborhood
    pub areas: Vec<f64>,
    pub residuals: Vec<f64>,
    pub converged: Vec<bool>,
}

/// Default per-level resolution: eight cells across the neighborhood width.
pub fn default_h_policy(r: f64) -> f64 {
    r / 8.0
}

/// Compute `λ(U_j)` for `U_j = {dist(·,K) < r_j}` at per-level resolution
/// `h_policy(r_j)` (the policy must satisfy `h ≤ r/4`).
pub fn lambda_shrinking(
    set: &CompactSetSpec,
    radii: &[f64],
    h_policy: impl Fn(f64) -> f64,
    opts: &SolverOpts,
) -> Result<NeighborhoodFamily> {
    if radii.is_empty() {
        return Err(Error::InvalidParams("empty radii list".into()));
    }
    if radii.windows(2).any(|p| p[0] <= p[1]) || radii[radii.len() - 1] <= 0.0 {
        return Err(Error::InvalidParams(
            "radii must be strictly decreasing and positive".into(),
        ));
    }
    let mut lambdas = Vec::with_capacity(radii.len());
    let mut h_used = Vec::with_capacity(radii.len());
    let mut areas = Vec::with_capacity(radii.len());
    let mut residuals = Vec::with_capacity(radii.len());
    let mut converged = Vec::with_capacity(radii.len());
    for &r in radii {
        let h = h_policy(r);
        let grid = Arc::new(neighborhood_grid(set, r, h)?);
        let op = assemble_nonmagnetic(&grid, &Weight::zero(), 0.0)?;
        let (gs, ok) = match ground_state_with_start(&op, opts, None) {
            Ok(g) => (g, true),
            Err(Error::NoConvergence { best, .. }) => (*best, false),
            Err(e) => return Err(e),
        };
        lambdas.push(gs.lambda);
        h_used.push(h);
        areas.push(grid.area());
        residuals.push(gs.residual);
        converged.push(ok);
    }
    Ok(NeighborhoodFamily {
        set: set.clone(),
        radii: radii.to_vec(),
        lambdas,
        h_used,
        areas,
        residuals,
        converged,
    })
}

/// `π / |D|`: the area lower bound for the Dirichlet ground value.
pub fn poincare_bound(g: &GridDomain) -> f64 {
    std::f64::consts::PI / g.area()
}

/// Verdict over a neighborhood family plus its reading in terms of
/// property (P).
#[derive(Clone, Debug)]
pub struct PropertyPVerdict {
    pub verdict: Verdict,
    pub interpretation: &'static str,
}

/// Classify `λ(U_j)` against `1/r_j` with the sweep thresholds.
pub fn property_p_verdict(
    family: &NeighborhoodFamily,
    opts: &ClassifyOpts,
) -> Result<PropertyPVerdict> {
    let keys: Vec<f64> = family.radii.iter().map(|&r| 1.0 / r).collect();
    let verdict = classify_values(&keys, &family.lambdas, opts)?;
    let interpretation = match verdict.kind {
        VerdictKind::Diverging => "consistent with property (P) at grid scale",
        VerdictKind::Bounded => "property (P) fails (fine interior nonempty at grid scale)",
        VerdictKind::Inconclusive => "inconclusive at grid scale",
    };
    Ok(PropertyPVerdict {
        verdict,
        interpretation,
    })
}
