//! Gridded Riemannian 4-manifolds.
//!
//! A [`GridGeometry`] samples a metric on a 4-dimensional box of sites, row
//! major (axis 3 fastest). Periodic axes wrap; the other axes are truncated
//! with a zero ghost layer just outside the first and last site, and the
//! outermost site layer carries Dirichlet data: it is excluded from field
//! quadrature and frozen by the descent flow.

mod distance;
mod metric;
mod ricci;

pub use distance::{
    bishop_gromov_violations, fit_growth_exponent, shell_decompose, volume_of_balls, BallVolume,
    DistanceField, Shell,
};
pub use metric::{
    identity4, invert4, is_positive_definite, pair_slot, Mat4, Mat6, SiteMetric, COMPLEMENT, PAIRS,
};
pub use ricci::{ricci, RicciField};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Real;

/// A single Gibbons–Hawking centre: nut position in ℝ³ and its mass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NutCenter {
    pub position: [f64; 3],
    pub mass: f64,
}

/// Declarative description of a model geometry; lengths are full side lengths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeometryDescriptor {
    /// `T⁴ = (ℝ/side ℤ)⁴` with `n` sites per axis.
    FlatTorus4 { side: f64, n: usize },
    /// Truncated `ℝ⁴`: the box `[-side/2, side/2]⁴` with Dirichlet faces.
    EuclideanBall4 { side: f64, n: usize },
    /// Truncated `ℝ³ × S¹`: Dirichlet box of the given side in `x, y, z` and a
    /// periodic fourth axis of the given circumference.
    #[serde(rename = "r3xs1")]
    R3xS1 {
        side: f64,
        circumference: f64,
        n: usize,
        #[serde(default)]
        n_circle: Option<usize>,
    },
    /// Multi-centre Gibbons–Hawking metric `V(dx²+dy²+dz²) + V⁻¹(dθ+α)²` with
    /// `V = 1 + Σ mⱼ/|x − pⱼ|`, truncated to a box in `x, y, z`.
    GibbonsHawking {
        centers: Vec<NutCenter>,
        side: f64,
        circumference: f64,
        n: usize,
        #[serde(default)]
        n_circle: Option<usize>,
    },
    /// Stereographic chart of the round 4-sphere of the given radius on a
    /// Dirichlet box (a sanity input for curvature code: `Ric = 3g/radius²`).
    RoundSpherePatch { radius: f64, side: f64, n: usize },
}

impl GeometryDescriptor {
    pub fn name(&self) -> &'static str {
        match self {
            GeometryDescriptor::FlatTorus4 { .. } => "flat_torus4",
            GeometryDescriptor::EuclideanBall4 { .. } => "euclidean_ball4",
            GeometryDescriptor::R3xS1 { .. } => "r3xs1",
            GeometryDescriptor::GibbonsHawking { .. } => "gibbons_hawking",
            GeometryDescriptor::RoundSpherePatch { .. } => "round_sphere_patch",
        }
    }
}

/// Asymptotic class of the end: `k = 0` for ALE, `k = 1` for ALF.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndClass {
    /// Closed manifold, no end.
    Compact,
    Ale,
    Alf,
}

impl EndClass {
    /// The collapsed-dimension count `k`, `None` for compact geometries.
    pub fn k(self) -> Option<u32> {
        match self {
            EndClass::Compact => None,
            EndClass::Ale => Some(0),
            EndClass::Alf => Some(1),
        }
    }
}

pub(crate) struct CurvedData<T> {
    pub metric: Vec<SiteMetric<T>>,
    /// `Γ^c_{ab}` stored as `[c][a][b]`.
    pub christoffel: Vec<[[[T; 4]; 4]; 4]>,
    pub one_sided: Vec<bool>,
}

/// Discretised Riemannian 4-manifold. Immutable after construction.
pub struct GridGeometry<T> {
    descriptor: GeometryDescriptor,
    dims: [usize; 4],
    strides: [usize; 4],
    spacing: [T; 4],
    origin: [T; 4],
    periodic: [bool; 4],
    end: EndClass,
    basepoint: usize,
    curved: Option<CurvedData<T>>,
    /// `[2·axis + forward]` neighbour of each site, `GHOST` beyond a truncated face.
    neighbors: Vec<[u32; 8]>,
    boundary: Vec<bool>,
}

const GHOST: u32 = u32::MAX;

impl<T: Real> GridGeometry<T> {
    /// Builds a populated geometry from a descriptor.
    pub fn new(descriptor: &GeometryDescriptor) -> Result<Self> {
        use GeometryDescriptor as D;
        match descriptor {
            D::FlatTorus4 { side, n } => {
                check_len("side", *side)?;
                check_sites(*n, 3)?;
                let h = T::lit(*side / *n as f64);
                Self::assemble(descriptor.clone(), [*n; 4], [h; 4], [T::zero(); 4], [true; 4], EndClass::Compact, None)
            }
            D::EuclideanBall4 { side, n } => {
                check_len("side", *side)?;
                check_sites(*n, 3)?;
                let (h, o) = dirichlet_axis::<T>(*side, *n);
                Self::assemble(descriptor.clone(), [*n; 4], [h; 4], [o; 4], [false; 4], EndClass::Ale, None)
            }
            D::R3xS1 { side, circumference, n, n_circle } => {
                check_len("side", *side)?;
                check_len("circumference", *circumference)?;
                check_sites(*n, 3)?;
                let (h, o) = dirichlet_axis::<T>(*side, *n);
                let nc = circle_sites(*side, *n, *circumference, *n_circle)?;
                let hc = T::lit(*circumference / nc as f64);
                Self::assemble(
                    descriptor.clone(),
                    [*n, *n, *n, nc],
                    [h, h, h, hc],
                    [o, o, o, T::zero()],
                    [false, false, false, true],
                    EndClass::Alf,
                    None,
                )
            }
            D::GibbonsHawking { centers, side, circumference, n, n_circle } => {
                check_len("side", *side)?;
                check_len("circumference", *circumference)?;
                check_sites(*n, 3)?;
                validate_centers(centers, *side)?;
                let (h, o) = dirichlet_axis::<T>(*side, *n);
                let nc = circle_sites(*side, *n, *circumference, *n_circle)?;
                let hc = T::lit(*circumference / nc as f64);
                let centers = centers.clone();
                let metric_at = move |x: [f64; 4]| gibbons_hawking_metric(&centers, x);
                let dims = [*n, *n, *n, nc];
                Self::assemble(
                    descriptor.clone(),
                    dims,
                    [h, h, h, hc],
                    [o, o, o, T::zero()],
                    [false, false, false, true],
                    EndClass::Alf,
                    Some(&metric_at),
                )
            }
            D::RoundSpherePatch { radius, side, n } => {
                check_len("radius", *radius)?;
                check_len("side", *side)?;
                check_sites(*n, 3)?;
                let (h, o) = dirichlet_axis::<T>(*side, *n);
                let r2 = radius * radius;
                let metric_at = move |x: [f64; 4]| {
                    let q: f64 = x.iter().map(|c| c * c).sum();
                    let f = 4.0 * r2 * r2 / ((r2 + q) * (r2 + q));
                    let mut g = [[0.0; 4]; 4];
                    for (i, row) in g.iter_mut().enumerate() {
                        row[i] = f;
                    }
                    g
                };
                // A patch of a closed manifold: no asymptotic end.
                Self::assemble(descriptor.clone(), [*n; 4], [h; 4], [o; 4], [false; 4], EndClass::Compact, Some(&metric_at))
            }
        }
    }

    fn assemble(
        descriptor: GeometryDescriptor,
        dims: [usize; 4],
        spacing: [T; 4],
        origin: [T; 4],
        periodic: [bool; 4],
        end: EndClass,
        metric_at: Option<&dyn Fn([f64; 4]) -> Mat4<f64>>,
    ) -> Result<Self> {
        let strides = [dims[1] * dims[2] * dims[3], dims[2] * dims[3], dims[3], 1];
        let mut geom = GridGeometry {
            descriptor,
            dims,
            strides,
            spacing,
            origin,
            periodic,
            end,
            basepoint: 0,
            curved: None,
            neighbors: Vec::new(),
            boundary: Vec::new(),
        };
        let n_sites: usize = dims.iter().product();
        if n_sites >= GHOST as usize {
            return Err(Error::Geometry(format!("{n_sites} sites exceed the supported grid size")));
        }
        geom.neighbors = (0..n_sites)
            .map(|s| {
                std::array::from_fn(|k| geom.compute_neighbor(s, k / 2, k % 2 == 1).map_or(GHOST, |t| t as u32))
            })
            .collect();
        geom.boundary = (0..n_sites).map(|s| geom.compute_boundary_layer(s)).collect();
        geom.basepoint = geom.nearest_site([T::zero(); 4]);
        if let Some(metric_at) = metric_at {
            let n = geom.n_sites();
            let mut metric = Vec::with_capacity(n);
            for s in 0..n {
                let x = geom.position(s).map(|c| c.to_f64_lossy());
                let g64 = metric_at(x);
                if g64.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::Geometry(format!(
                        "site {s} (x = {x:?}) lies on a metric singularity (centre or Dirac string)"
                    )));
                }
                let g = g64.map(|row| row.map(T::lit));
                let sm = SiteMetric::from_metric(g).ok_or_else(|| {
                    Error::Geometry(format!("metric not positive definite at site {s} (x = {x:?})"))
                })?;
                if !(sm.m > T::zero()) || !sm.m.is_finite() {
                    return Err(Error::Geometry(format!("non-positive volume density at site {s}")));
                }
                metric.push(sm);
            }
            let (christoffel, one_sided) = ricci::christoffel_field(&geom, &metric);
            geom.curved = Some(CurvedData { metric, christoffel, one_sided });
        }
        Ok(geom)
    }

    pub fn descriptor(&self) -> &GeometryDescriptor {
        &self.descriptor
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    pub fn spacing(&self) -> [T; 4] {
        self.spacing
    }

    pub fn max_spacing(&self) -> T {
        self.spacing.iter().fold(T::zero(), |m, &h| m.max(h))
    }

    pub fn periodic(&self) -> [bool; 4] {
        self.periodic
    }

    pub fn end_class(&self) -> EndClass {
        self.end
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn is_flat(&self) -> bool {
        self.curved.is_none()
    }

    pub fn is_compact(&self) -> bool {
        self.periodic.iter().all(|&p| p)
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.dims.iter().product()
    }

    /// Product of the spacings: the coordinate volume of one cell.
    pub fn cell_coordinate_volume(&self) -> T {
        self.spacing.iter().fold(T::one(), |p, &h| p * h)
    }

    #[inline]
    pub fn coords(&self, s: usize) -> [usize; 4] {
        let mut r = s;
        let mut c = [0; 4];
        for a in 0..4 {
            c[a] = r / self.strides[a];
            r %= self.strides[a];
        }
        c
    }

    #[inline]
    pub fn index(&self, c: [usize; 4]) -> usize {
        c[0] * self.strides[0] + c[1] * self.strides[1] + c[2] * self.strides[2] + c[3]
    }

    /// Coordinates of a site.
    #[inline]
    pub fn position(&self, s: usize) -> [T; 4] {
        let c = self.coords(s);
        let mut x = [T::zero(); 4];
        for a in 0..4 {
            x[a] = self.origin[a] + T::from_usize_lossy(c[a]) * self.spacing[a];
        }
        x
    }

    /// Site whose coordinates are closest to `x` (per-axis rounding).
    pub fn nearest_site(&self, x: [T; 4]) -> usize {
        let mut c = [0usize; 4];
        for a in 0..4 {
            let f = ((x[a] - self.origin[a]) / self.spacing[a]).round().to_f64_lossy();
            let n = self.dims[a] as i64;
            let mut i = f as i64;
            if self.periodic[a] {
                i = i.rem_euclid(n);
            } else {
                i = i.clamp(0, n - 1);
            }
            c[a] = i as usize;
        }
        self.index(c)
    }

    /// Neighbour one step along `axis` (`forward` or backward); `None` is the ghost layer.
    #[inline]
    pub fn neighbor(&self, s: usize, axis: usize, forward: bool) -> Option<usize> {
        let t = self.neighbors[s][2 * axis + forward as usize];
        (t != GHOST).then_some(t as usize)
    }

    fn compute_neighbor(&self, s: usize, axis: usize, forward: bool) -> Option<usize> {
        let i = (s / self.strides[axis]) % self.dims[axis];
        let n = self.dims[axis];
        let st = self.strides[axis];
        if forward {
            if i + 1 < n {
                Some(s + st)
            } else if self.periodic[axis] {
                Some(s + st - n * st)
            } else {
                None
            }
        } else if i > 0 {
            Some(s - st)
        } else if self.periodic[axis] {
            Some(s + (n - 1) * st)
        } else {
            None
        }
    }

    /// Site displaced by an integer offset, `None` if it leaves a truncated axis.
    pub fn offset(&self, s: usize, off: [i64; 4]) -> Option<usize> {
        let c = self.coords(s);
        let mut out = [0usize; 4];
        for a in 0..4 {
            let n = self.dims[a] as i64;
            let mut i = c[a] as i64 + off[a];
            if self.periodic[a] {
                i = i.rem_euclid(n);
            } else if i < 0 || i >= n {
                return None;
            }
            out[a] = i as usize;
        }
        Some(self.index(out))
    }

    /// Whether the site lies on the outermost layer of a truncated axis.
    #[inline]
    pub fn is_boundary_layer(&self, s: usize) -> bool {
        self.boundary[s]
    }

    fn compute_boundary_layer(&self, s: usize) -> bool {
        (0..4).any(|a| {
            if self.periodic[a] {
                return false;
            }
            let i = (s / self.strides[a]) % self.dims[a];
            i == 0 || i + 1 == self.dims[a]
        })
    }

    /// Number of site layers between `s` and the nearest truncated face
    /// (`usize::MAX` for fully periodic geometries).
    pub fn depth(&self, s: usize) -> usize {
        let c = self.coords(s);
        (0..4)
            .filter(|&a| !self.periodic[a])
            .map(|a| c[a].min(self.dims[a] - 1 - c[a]))
            .min()
            .unwrap_or(usize::MAX)
    }

    #[inline]
    pub fn site_metric(&self, s: usize) -> SiteMetric<T> {
        match &self.curved {
            None => SiteMetric::euclidean(),
            Some(c) => c.metric[s],
        }
    }

    /// Volume density `m = √det g`.
    #[inline]
    pub fn density(&self, s: usize) -> T {
        match &self.curved {
            None => T::one(),
            Some(c) => c.metric[s].m,
        }
    }

    /// Riemannian volume of the cell at `s`, `m h⁴`.
    #[inline]
    pub fn cell_volume(&self, s: usize) -> T {
        self.density(s) * self.cell_coordinate_volume()
    }

    /// Field quadrature weight: `m h⁴` away from Dirichlet data, zero on the boundary layer.
    #[inline]
    pub fn quadrature_weight(&self, s: usize) -> T {
        if self.is_boundary_layer(s) {
            T::zero()
        } else {
            self.cell_volume(s)
        }
    }

    /// `Γ^c_{ab}` at a site as `[c][a][b]` (zero on flat geometries).
    #[inline]
    pub fn christoffel(&self, s: usize) -> Option<&[[[T; 4]; 4]; 4]> {
        self.curved.as_ref().map(|c| &c.christoffel[s])
    }

    /// Sites where metric derivatives fell back to one-sided stencils.
    pub fn one_sided_sites(&self) -> usize {
        self.curved.as_ref().map_or(0, |c| c.one_sided.iter().filter(|&&b| b).count())
    }

    pub(crate) fn one_sided(&self, s: usize) -> bool {
        self.curved.as_ref().is_some_and(|c| c.one_sided[s])
    }

    /// Coordinate displacement from site `s` to site `t` using the minimal
    /// image on periodic axes.
    pub fn displacement(&self, s: usize, t: usize) -> [T; 4] {
        let (xs, xt) = (self.position(s), self.position(t));
        let mut d = [T::zero(); 4];
        for a in 0..4 {
            let mut v = xt[a] - xs[a];
            if self.periodic[a] {
                let period = T::from_usize_lossy(self.dims[a]) * self.spacing[a];
                let half = period / T::lit(2.0);
                if v > half {
                    v -= period;
                } else if v < -half {
                    v += period;
                }
            }
            d[a] = v;
        }
        d
    }
}

fn check_len(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Geometry(format!("{what} must be positive and finite (got {v})")))
    }
}

fn check_sites(n: usize, min: usize) -> Result<()> {
    if n >= min {
        Ok(())
    } else {
        Err(Error::Geometry(format!("need at least {min} sites per axis (got {n})")))
    }
}

/// Spacing and first-site coordinate of a Dirichlet axis of the given side:
/// the ghost sites sit exactly on `±side/2`.
fn dirichlet_axis<T: Real>(side: f64, n: usize) -> (T, T) {
    let h = side / (n as f64 + 1.0);
    (T::lit(h), T::lit(-side / 2.0 + h))
}

fn circle_sites(side: f64, n: usize, circumference: f64, n_circle: Option<usize>) -> Result<usize> {
    let nc = match n_circle {
        Some(nc) => nc,
        None => {
            let h = side / (n as f64 + 1.0);
            ((circumference / h).round() as usize).max(4)
        }
    };
    check_sites(nc, 3)?;
    Ok(nc)
}

fn validate_centers(centers: &[NutCenter], side: f64) -> Result<()> {
    if centers.is_empty() {
        return Err(Error::Geometry("Gibbons–Hawking metric needs at least one centre".into()));
    }
    for c in centers {
        if !(c.mass > 0.0) || !c.mass.is_finite() {
            return Err(Error::Geometry(format!("centre mass must be positive (got {})", c.mass)));
        }
        if c.position.iter().any(|p| !p.is_finite() || p.abs() >= side / 2.0) {
            return Err(Error::Geometry(format!("centre {:?} lies outside the box", c.position)));
        }
    }
    for (i, a) in centers.iter().enumerate() {
        for b in &centers[i + 1..] {
            let dxy = (a.position[0] - b.position[0]).hypot(a.position[1] - b.position[1]);
            if dxy < 1e-9 * side {
                return Err(Error::Geometry(format!(
                    "centres {:?} and {:?} share a vertical axis; their Dirac strings would meet",
                    a.position, b.position
                )));
            }
        }
    }
    Ok(())
}

/// Gibbons–Hawking potential and connection form at a point of ℝ³:
/// `V = 1 + Σ mⱼ/rⱼ`, `α = −Σ mⱼ (x dy − y dx)/(rⱼ (rⱼ + zⱼ))`, coordinates
/// relative to each centre. Each string runs along `−z` from its centre.
pub fn gibbons_hawking_potential(centers: &[NutCenter], p: [f64; 3]) -> (f64, [f64; 3]) {
    let mut v = 1.0;
    let mut alpha = [0.0; 3];
    for c in centers {
        let (x, y, z) = (p[0] - c.position[0], p[1] - c.position[1], p[2] - c.position[2]);
        let r = (x * x + y * y + z * z).sqrt();
        v += c.mass / r;
        let q = c.mass / (r * (r + z));
        alpha[0] += q * y;
        alpha[1] -= q * x;
    }
    (v, alpha)
}

fn gibbons_hawking_metric(centers: &[NutCenter], x: [f64; 4]) -> Mat4<f64> {
    let (v, alpha) = gibbons_hawking_potential(centers, [x[0], x[1], x[2]]);
    let mut g = [[0.0; 4]; 4];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = alpha[i] * alpha[j] / v;
        }
        g[i][i] += v;
        g[i][3] = alpha[i] / v;
        g[3][i] = alpha[i] / v;
    }
    g[3][3] = 1.0 / v;
    g
}
