//! Weights φ with exact first derivatives, Laplacian, and magnetic potential.
//!
//! The magnetic potential attached to a weight is `A = (-φ_y, φ_x)`, so the
//! magnetic field `dA = Δφ dx∧dy` coincides with the electric potential
//! `V = Δφ`. Derivatives are supplied analytically, never by differencing φ:
//! operator assembly then carries no extra discretization error from the
//! weight itself.
//!
//! Builtin catalog:
//!
//! | tag            | φ                          | Δφ                  |
//! |----------------|----------------------------|---------------------|
//! | `zero`         | 0                          | 0                   |
//! | `harmonic_log` | β log\|z−c\|               | 0 off the center    |
//! | `abs2`         | a\|z\|²                    | 4a                  |
//! | `abs4`         | a\|z\|⁴                    | 16a\|z\|²           |
//! | `flat_disc`    | ((\|z\|−r₀)₊)⁴             | 0 on \|z\| ≤ r₀     |
//! | `hol_squares`  | Σ\|p_j(z)\|², p_j polynomial | 4Σ\|p_j'(z)\|²    |
//!
//! For `zero`, `harmonic_log` and `abs2` the line integrals of `A` along
//! straight segments are available in closed form ([`Weight::link_integral`]);
//! elsewhere assembly falls back to the midpoint rule.

use num_complex::Complex64;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::GridDomain;

type PointFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Zero,
    HarmonicLog {
        beta: f64,
        center: (f64, f64),
    },
    Abs2 {
        coeff: f64,
    },
    Abs4 {
        coeff: f64,
    },
    FlatDisc {
        r0: f64,
    },
    HolSquares {
        /// coefficient lists of the h_j, lowest power first
        polys: Vec<Vec<Complex64>>,
        derivs: Vec<Vec<Complex64>>,
    },
    Custom {
        phi: PointFn,
        grad: GradFn,
        lap: PointFn,
    },
}

/// The weight φ together with `∇φ`, `Δφ` and, where available, exact link
/// integrals of `A = (-φ_y, φ_x)`. Immutable and cheap to clone.
#[derive(Clone)]
pub struct Weight {
    kind: Kind,
}

impl std::fmt::Debug for Weight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Weight({})", self.tag())
    }
}

fn eval_poly(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

fn poly_deriv(c: &[Complex64]) -> Vec<Complex64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &a)| a * k as f64)
        .collect()
}

impl Weight {
    pub fn zero() -> Weight {
        Weight { kind: Kind::Zero }
    }

    /// φ = β log|z − center|, harmonic away from the center.
    pub fn harmonic_log(beta: f64, center: (f64, f64)) -> Result<Weight> {
        if !beta.is_finite() || !center.0.is_finite() || !center.1.is_finite() {
            return Err(Error::InvalidParams(format!("harmonic_log(beta={beta})")));
        }
        Ok(Weight {
            kind: Kind::HarmonicLog { beta, center },
        })
    }

    /// φ = coeff·|z|². Negative coefficients are allowed (superharmonic).
    pub fn abs2_scaled(coeff: f64) -> Result<Weight> {
        if !coeff.is_finite() {
            return Err(Error::InvalidParams(format!("abs2(coeff={coeff})")));
        }
        Ok(Weight {
            kind: Kind::Abs2 { coeff },
        })
    }

    pub fn abs2() -> Weight {
        Weight::abs2_scaled(1.0).unwrap()
    }

    /// φ = coeff·|z|⁴.
    pub fn abs4_scaled(coeff: f64) -> Result<Weight> {
        if !coeff.is_finite() {
            return Err(Error::InvalidParams(format!("abs4(coeff={coeff})")));
        }
        Ok(Weight {
            kind: Kind::Abs4 { coeff },
        })
    }

    pub fn abs4() -> Weight {
        Weight::abs4_scaled(1.0).unwrap()
    }

    /// φ = ((|z| − r0)₊)⁴: C³, subharmonic, identically zero on |z| ≤ r0.
    pub fn flat_disc(r0: f64) -> Result<Weight> {
        if !(r0 > 0.0) || !r0.is_finite() {
            return Err(Error::InvalidParams(format!("flat_disc(r0={r0})")));
        }
        Ok(Weight {
            kind: Kind::FlatDisc { r0 },
        })
    }

    /// φ = Σ_j |h_j(z)|² for polynomials h_j given by coefficient lists
    /// (lowest power first).
    pub fn hol_squares(polys: Vec<Vec<Complex64>>) -> Result<Weight> {
        if polys
            .iter()
            .any(|p| p.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()))
        {
            return Err(Error::InvalidParams("hol_squares: non-finite coefficient".into()));
        }
        let derivs = polys.iter().map(|p| poly_deriv(p)).collect();
        Ok(Weight {
            kind: Kind::HolSquares { polys, derivs },
        })
    }

    /// User-supplied weight; callbacks must be pure and reentrant.
    pub fn custom(
        phi: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        grad: impl Fn(f64, f64) -> (f64, f64) + Send + Sync + 'static,
        lap: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Weight {
        Weight {
            kind: Kind::Custom {
                phi: Arc::new(phi),
                grad: Arc::new(grad),
                lap: Arc::new(lap),
            },
        }
    }

    pub fn tag(&self) -> &'static str {
        match self.kind {
            Kind::Zero => "zero",
            Kind::HarmonicLog { .. } => "harmonic_log",
            Kind::Abs2 { .. } => "abs2",
            Kind::Abs4 { .. } => "abs4",
            Kind::FlatDisc { .. } => "flat_disc",
            Kind::HolSquares { .. } => "hol_squares",
            Kind::Custom { .. } => "custom",
        }
    }

    pub(crate) fn harmonic_log_beta(&self) -> Option<f64> {
        match self.kind {
            Kind::HarmonicLog { beta, .. } => Some(beta),
            _ => None,
        }
    }

    pub(crate) fn is_hol_squares(&self) -> bool {
        matches!(self.kind, Kind::HolSquares { .. })
    }

    pub fn phi(&self, x: f64, y: f64) -> f64 {
        match &self.kind {
            Kind::Zero => 0.0,
            Kind::HarmonicLog { beta, center } => {
                beta * (x - center.0).hypot(y - center.1).ln()
            }
            Kind::Abs2 { coeff } => coeff * (x * x + y * y),
            Kind::Abs4 { coeff } => {
                let r2 = x * x + y * y;
                coeff * r2 * r2
            }
            Kind::FlatDisc { r0 } => {
                let s = (x.hypot(y) - r0).max(0.0);
                s * s * s * s
            }
            Kind::HolSquares { polys, .. } => {
                let z = Complex64::new(x, y);
                polys.iter().map(|p| eval_poly(p, z).norm_sqr()).sum()
            }
            Kind::Custom { phi, .. } => phi(x, y),
        }
    }

    /// `(φ_x, φ_y)`, analytically.
    pub fn grad(&self, x: f64, y: f64) -> (f64, f64) {
        match &self.kind {
            Kind::Zero => (0.0, 0.0),
            Kind::HarmonicLog { beta, center } => {
                let (dx, dy) = (x - center.0, y - center.1);
                let r2 = dx * dx + dy * dy;
                (beta * dx / r2, beta * dy / r2)
            }
            Kind::Abs2 { coeff } => (2.0 * coeff * x, 2.0 * coeff * y),
            Kind::Abs4 { coeff } => {
                let r2 = x * x + y * y;
                (4.0 * coeff * r2 * x, 4.0 * coeff * r2 * y)
            }
            Kind::FlatDisc { r0 } => {
                let r = x.hypot(y);
                let s = (r - r0).max(0.0);
                if s == 0.0 || r == 0.0 {
                    (0.0, 0.0)
                } else {
                    let f = 4.0 * s * s * s / r;
                    (f * x, f * y)
                }
            }
            Kind::HolSquares { polys, derivs } => {
                // phi_z = sum h_j'(z) conj(h_j(z)); grad = (2 Re, -2 Im)
                let z = Complex64::new(x, y);
                let mut pz = Complex64::new(0.0, 0.0);
                for (p, d) in polys.iter().zip(derivs) {
                    pz += eval_poly(d, z) * eval_poly(p, z).conj();
                }
                (2.0 * pz.re, -2.0 * pz.im)
            }
            Kind::Custom { grad, .. } => grad(x, y),
        }
    }

    /// `Δφ`, analytically.
    pub fn lap(&self, x: f64, y: f64) -> f64 {
        match &self.kind {
            Kind::Zero => 0.0,
            Kind::HarmonicLog { .. } => 0.0,
            Kind::Abs2 { coeff } => 4.0 * coeff,
            Kind::Abs4 { coeff } => 16.0 * coeff * (x * x + y * y),
            Kind::FlatDisc { r0 } => {
                let r = x.hypot(y);
                let s = (r - r0).max(0.0);
                if s == 0.0 {
                    0.0
                } else {
                    12.0 * s * s + 4.0 * s * s * s / r
                }
            }
            Kind::HolSquares { derivs, .. } => {
                let z = Complex64::new(x, y);
                4.0 * derivs
                    .iter()
                    .map(|d| eval_poly(d, z).norm_sqr())
                    .sum::<f64>()
            }
            Kind::Custom { lap, .. } => lap(x, y),
        }
    }

    /// Magnetic potential `A = (-φ_y, φ_x)`.
    pub fn potential(&self, x: f64, y: f64) -> (f64, f64) {
        let (gx, gy) = self.grad(x, y);
        (-gy, gx)
    }

    /// Exact `∫ A·dl` along the straight segment p → q, where available.
    ///
    /// Supplied for `zero` (0), `harmonic_log` (β times the angle swept at
    /// the center, exact for segments not through the center) and `abs2`
    /// (A is linear, so the midpoint rule is exact). Returns `None` for the
    /// other tags; assembly then uses the midpoint rule.
    pub fn link_integral(&self, p: (f64, f64), q: (f64, f64)) -> Option<f64> {
        match &self.kind {
            Kind::Zero => Some(0.0),
            Kind::HarmonicLog { beta, center } => {
                let a0 = (p.1 - center.1).atan2(p.0 - center.0);
                let a1 = (q.1 - center.1).atan2(q.0 - center.0);
                let mut d = a1 - a0;
                if d > std::f64::consts::PI {
                    d -= 2.0 * std::f64::consts::PI;
                } else if d < -std::f64::consts::PI {
                    d += 2.0 * std::f64::consts::PI;
                }
                Some(beta * d)
            }
            Kind::Abs2 { .. } => Some(self.midpoint_integral(p, q)),
            _ => None,
        }
    }

    /// Midpoint-rule `∫ A·dl` along p → q (second order; exact for linear A).
    pub fn midpoint_integral(&self, p: (f64, f64), q: (f64, f64)) -> f64 {
        let (ax, ay) = self.potential(0.5 * (p.0 + q.0), 0.5 * (p.1 + q.1));
        ax * (q.0 - p.0) + ay * (q.1 - p.1)
    }
}

/// Report of a pointwise subharmonicity scan over a grid.
#[derive(Clone, Copy, Debug)]
pub struct SubharmonicityReport {
    pub min_lap: f64,
    pub is_subharmonic: bool,
    /// tolerance used for the verdict
    pub eps: f64,
}

/// Nodes of a grid where `|Δφ|` falls below a threshold.
#[derive(Clone, Debug)]
pub struct VanishingSet {
    pub nodes: Vec<usize>,
    pub eps: f64,
}

/// Default threshold: `1e-9 * max |Δφ|` with an absolute floor of `1e-12`.
/// Distinguishes exact zeros of the builtin weights from roundoff.
pub fn default_vanishing_eps(w: &Weight, g: &GridDomain) -> f64 {
    let mut max_lap: f64 = 0.0;
    for k in 0..g.len() {
        let (x, y) = g.point(k);
        max_lap = max_lap.max(w.lap(x, y).abs());
    }
    (1e-9 * max_lap).max(1e-12)
}

/// Minimum of `Δφ` over the mask and the verdict `min ≥ -eps`.
pub fn subharmonicity_check(w: &Weight, g: &GridDomain) -> SubharmonicityReport {
    let mut min_lap = f64::INFINITY;
    for k in 0..g.len() {
        let (x, y) = g.point(k);
        min_lap = min_lap.min(w.lap(x, y));
    }
    let eps = default_vanishing_eps(w, g);
    SubharmonicityReport {
        min_lap,
        is_subharmonic: min_lap >= -eps,
        eps,
    }
}

/// The set `{|Δφ| ≤ eps}` as node indices of `g`.
pub fn vanishing_set(w: &Weight, g: &GridDomain, eps: f64) -> Result<VanishingSet> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParams(format!("vanishing_set eps must be positive, got {eps}")));
    }
    let nodes = (0..g.len())
        .filter(|&k| {
            let (x, y) = g.point(k);
            w.lap(x, y).abs() <= eps
        })
        .collect();
    Ok(VanishingSet { nodes, eps })
}
