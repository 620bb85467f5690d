//! Bounded planar domains as masked uniform grids with Dirichlet boundary.
//!
//! A [`GridDomain`] is the set of lattice nodes `(i*h, j*h)` lying strictly
//! inside a region. Dirichlet conditions are imposed by node deletion: a
//! function on the grid is implicitly zero off the mask. Nodes are stored in
//! row-major order (by `j`, then `i`), which fixes the index map and makes
//! every downstream computation deterministic.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Geometric description of a bounded domain.
#[derive(Clone)]
pub enum DomainSpec {
    Rectangle {
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
    },
    Disc {
        center: (f64, f64),
        radius: f64,
    },
    Annulus {
        center: (f64, f64),
        r_inner: f64,
        r_outer: f64,
    },
    /// Arbitrary inside test. The bounding box `(x0, x1, y0, y1)` must
    /// contain the region; it bounds the lattice scan.
    Predicate {
        inside: Arc<dyn Fn(f64, f64) -> bool + Send + Sync>,
        bbox: (f64, f64, f64, f64),
    },
}

impl std::fmt::Debug for DomainSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DomainSpec::Rectangle { x0, x1, y0, y1 } => {
                write!(f, "Rectangle({x0},{x1})x({y0},{y1})")
            }
            DomainSpec::Disc { center, radius } => write!(f, "Disc({center:?}, r={radius})"),
            DomainSpec::Annulus {
                center,
                r_inner,
                r_outer,
            } => write!(f, "Annulus({center:?}, {r_inner}..{r_outer})"),
            DomainSpec::Predicate { bbox, .. } => write!(f, "Predicate(bbox={bbox:?})"),
        }
    }
}

impl DomainSpec {
    pub fn unit_square() -> Self {
        DomainSpec::Rectangle {
            x0: 0.0,
            x1: 1.0,
            y0: 0.0,
            y1: 1.0,
        }
    }

    pub fn unit_disc() -> Self {
        DomainSpec::Disc {
            center: (0.0, 0.0),
            radius: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        match self {
            DomainSpec::Rectangle { x0, x1, y0, y1 } => {
                if !(x0 < x1 && y0 < y1) || [x0, x1, y0, y1].iter().any(|v| !v.is_finite()) {
                    return bad(format!("rectangle needs x0 < x1, y0 < y1, got ({x0},{x1})x({y0},{y1})"));
                }
            }
            DomainSpec::Disc { radius, center } => {
                if !(*radius > 0.0) || !center.0.is_finite() || !center.1.is_finite() {
                    return bad(format!("disc needs radius > 0, got {radius}"));
                }
            }
            DomainSpec::Annulus {
                r_inner, r_outer, ..
            } => {
                if !(*r_inner > 0.0 && r_inner < r_outer) {
                    return bad(format!("annulus needs 0 < r_inner < r_outer, got {r_inner}..{r_outer}"));
                }
            }
            DomainSpec::Predicate { bbox, .. } => {
                let (x0, x1, y0, y1) = *bbox;
                if !(x0 < x1 && y0 < y1) {
                    return bad(format!("predicate bounding box is degenerate: {bbox:?}"));
                }
            }
        }
        Ok(())
    }

    /// Strict interior test.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            DomainSpec::Rectangle { x0, x1, y0, y1 } => *x0 < x && x < *x1 && *y0 < y && y < *y1,
            DomainSpec::Disc { center, radius } => {
                let (dx, dy) = (x - center.0, y - center.1);
                dx * dx + dy * dy < radius * radius
            }
            DomainSpec::Annulus {
                center,
                r_inner,
                r_outer,
            } => {
                let (dx, dy) = (x - center.0, y - center.1);
                let r2 = dx * dx + dy * dy;
                r_inner * r_inner < r2 && r2 < r_outer * r_outer
            }
            DomainSpec::Predicate { inside, .. } => inside(x, y),
        }
    }

    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        match self {
            DomainSpec::Rectangle { x0, x1, y0, y1 } => (*x0, *x1, *y0, *y1),
            DomainSpec::Disc { center, radius } => (
                center.0 - radius,
                center.0 + radius,
                center.1 - radius,
                center.1 + radius,
            ),
            DomainSpec::Annulus {
                center, r_outer, ..
            } => (
                center.0 - r_outer,
                center.0 + r_outer,
                center.1 - r_outer,
                center.1 + r_outer,
            ),
            DomainSpec::Predicate { bbox, .. } => *bbox,
        }
    }
}

/// A compact planar set, described by an exact distance function.
#[derive(Clone, Debug)]
pub enum CompactSetSpec {
    Point((f64, f64)),
    Segment((f64, f64), (f64, f64)),
    ClosedDisc { center: (f64, f64), radius: f64 },
    Union(Vec<CompactSetSpec>),
}

impl CompactSetSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            CompactSetSpec::Point(_) | CompactSetSpec::Segment(..) => Ok(()),
            CompactSetSpec::ClosedDisc { radius, .. } => {
                if *radius > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidSpec(format!(
                        "closed disc needs radius > 0, got {radius}"
                    )))
                }
            }
            CompactSetSpec::Union(parts) => {
                if parts.is_empty() {
                    return Err(Error::InvalidSpec("empty union".into()));
                }
                parts.iter().try_for_each(|p| p.validate())
            }
        }
    }

    /// Euclidean distance to the set; zero exactly on the set.
    pub fn dist(&self, x: f64, y: f64) -> f64 {
        match self {
            CompactSetSpec::Point((px, py)) => (x - px).hypot(y - py),
            CompactSetSpec::Segment((ax, ay), (bx, by)) => {
                let (ux, uy) = (bx - ax, by - ay);
                let len2 = ux * ux + uy * uy;
                let t = if len2 == 0.0 {
                    0.0
                } else {
                    (((x - ax) * ux + (y - ay) * uy) / len2).clamp(0.0, 1.0)
                };
                (x - (ax + t * ux)).hypot(y - (ay + t * uy))
            }
            CompactSetSpec::ClosedDisc { center, radius } => {
                ((x - center.0).hypot(y - center.1) - radius).max(0.0)
            }
            CompactSetSpec::Union(parts) => parts
                .iter()
                .map(|p| p.dist(x, y))
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        match self {
            CompactSetSpec::Point((x, y)) => (*x, *x, *y, *y),
            CompactSetSpec::Segment((ax, ay), (bx, by)) => {
                (ax.min(*bx), ax.max(*bx), ay.min(*by), ay.max(*by))
            }
            CompactSetSpec::ClosedDisc { center, radius } => (
                center.0 - radius,
                center.0 + radius,
                center.1 - radius,
                center.1 + radius,
            ),
            CompactSetSpec::Union(parts) => {
                let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
                for p in parts {
                    let q = p.bbox();
                    b = (b.0.min(q.0), b.1.max(q.1), b.2.min(q.2), b.3.max(q.3));
                }
                b
            }
        }
    }
}

/// Masked uniform grid: the Dirichlet discretization carrier.
///
/// Immutable after construction; share it with [`Arc`].
#[derive(Clone, Debug)]
pub struct GridDomain {
    h: f64,
    nodes: Vec<(i64, i64)>,
    index: HashMap<(i64, i64), u32>,
    connected: bool,
}

impl GridDomain {
    fn from_nodes(h: f64, mut nodes: Vec<(i64, i64)>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::EmptyMask);
        }
        nodes.sort_unstable_by_key(|&(i, j)| (j, i));
        let index = nodes
            .iter()
            .enumerate()
            .map(|(k, &n)| (n, k as u32))
            .collect();
        let mut g = GridDomain {
            h,
            nodes,
            index,
            connected: false,
        };
        g.connected = g.compute_connected();
        Ok(g)
    }

    fn compute_connected(&self) -> bool {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(k) = stack.pop() {
            let (i, j) = self.nodes[k];
            for q in [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)] {
                if let Some(&m) = self.index.get(&q) {
                    if !seen[m as usize] {
                        seen[m as usize] = true;
                        count += 1;
                        stack.push(m as usize);
                    }
                }
            }
        }
        count == n
    }

    /// Grid spacing.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of interior nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty masks
    }

    /// Lattice coordinates of node `k`.
    pub fn node(&self, k: usize) -> (i64, i64) {
        self.nodes[k]
    }

    /// Physical point of node `k`.
    pub fn point(&self, k: usize) -> (f64, f64) {
        let (i, j) = self.nodes[k];
        (i as f64 * self.h, j as f64 * self.h)
    }

    pub fn nodes(&self) -> &[(i64, i64)] {
        &self.nodes
    }

    pub fn index_of(&self, node: (i64, i64)) -> Option<usize> {
        self.index.get(&node).map(|&k| k as usize)
    }

    pub fn contains_node(&self, node: (i64, i64)) -> bool {
        self.index.contains_key(&node)
    }

    /// `N * h^2`, the lattice approximation of the domain area.
    pub fn area(&self) -> f64 {
        self.len() as f64 * self.h * self.h
    }

    /// Whether the mask is 4-connected. Disconnected masks are legal (the
    /// spectrum is the minimum over components); this flag is diagnostic.
    pub fn is_connected(&self) -> bool {
        self.connected
    }
}

fn scan_mask(
    bbox: (f64, f64, f64, f64),
    h: f64,
    inside: impl Fn(f64, f64) -> bool,
) -> Vec<(i64, i64)> {
    let (x0, x1, y0, y1) = bbox;
    let i0 = (x0 / h).floor() as i64 - 1;
    let i1 = (x1 / h).ceil() as i64 + 1;
    let j0 = (y0 / h).floor() as i64 - 1;
    let j1 = (y1 / h).ceil() as i64 + 1;
    let mut nodes = Vec::new();
    for j in j0..=j1 {
        for i in i0..=i1 {
            if inside(i as f64 * h, j as f64 * h) {
                nodes.push((i, j));
            }
        }
    }
    nodes
}

/// Mask the lattice points strictly inside `spec` at spacing `h`.
pub fn build_grid(spec: &DomainSpec, h: f64) -> Result<GridDomain> {
    spec.validate()?;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidSpec(format!("spacing h must be positive, got {h}")));
    }
    let nodes = scan_mask(spec.bbox(), h, |x, y| spec.contains(x, y));
    GridDomain::from_nodes(h, nodes)
}

/// Grid for the open r-neighborhood `{dist(., K) < r}` of a compact set.
///
/// The policy `h <= r/4` keeps at least a few cells across the neighborhood
/// width.
pub fn neighborhood_grid(set: &CompactSetSpec, r: f64, h: f64) -> Result<GridDomain> {
    set.validate()?;
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidSpec(format!("neighborhood radius must be positive, got {r}")));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidSpec(format!("spacing h must be positive, got {h}")));
    }
    if h > r / 4.0 {
        return Err(Error::ResolutionTooCoarse { h, limit: r / 4.0 });
    }
    let (x0, x1, y0, y1) = set.bbox();
    let bbox = (x0 - r, x1 + r, y0 - r, y1 + r);
    let nodes = scan_mask(bbox, h, |x, y| set.dist(x, y) < r);
    GridDomain::from_nodes(h, nodes)
}
