//! Distances from the basepoint, volumes of balls and shell decompositions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use log::warn;
use rayon::prelude::*;

use super::GridGeometry;
use crate::error::{Error, Result};
use crate::Real;

/// Distance from a source site to every site of the grid.
pub struct DistanceField<T> {
    pub source: usize,
    pub dist: Vec<T>,
    /// Radius of the largest ball about the source that stays inside the grid:
    /// the distance to the frozen boundary layer, or half the shortest period
    /// on compact geometries. Balls may wrap around circle factors.
    pub inscribed_radius: T,
}

impl<T: Real> DistanceField<T> {
    /// Distances from `source`. Flat geometries use the exact formula (minimal
    /// image on periodic axes); curved ones run Dijkstra on the 80-neighbour
    /// lattice with edge lengths measured in the midpoint-averaged metric.
    pub fn new(geom: &GridGeometry<T>, source: usize) -> Self {
        let dist: Vec<T> = if geom.is_flat() {
            (0..geom.n_sites())
                .into_par_iter()
                .map(|t| geom.displacement(source, t).iter().map(|&d| d * d).sum::<T>().sqrt())
                .collect()
        } else {
            dijkstra(geom, source)
        };
        let mut inscribed = T::infinity();
        for a in 0..4 {
            if geom.is_compact() && geom.periodic()[a] {
                let period = T::from_usize_lossy(geom.dims()[a]) * geom.spacing()[a];
                inscribed = inscribed.min(period / T::lit(2.0));
            }
        }
        for (t, &d) in dist.iter().enumerate() {
            if geom.is_boundary_layer(t) {
                inscribed = inscribed.min(d);
            }
        }
        DistanceField { source, dist, inscribed_radius: inscribed }
    }

    pub fn from_basepoint(geom: &GridGeometry<T>) -> Self {
        Self::new(geom, geom.basepoint())
    }

    pub fn max(&self) -> T {
        self.dist.iter().copied().fold(T::zero(), T::max)
    }
}

struct Entry(f64, usize);

impl PartialEq for Entry {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Entry {
    // Min-heap on distance, ties broken by site index for determinism.
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}

fn dijkstra<T: Real>(geom: &GridGeometry<T>, source: usize) -> Vec<T> {
    let n = geom.n_sites();
    let h = geom.spacing().map(|v| v.to_f64_lossy());
    let mut offsets = Vec::with_capacity(80);
    for a in -1i64..=1 {
        for b in -1i64..=1 {
            for c in -1i64..=1 {
                for d in -1i64..=1 {
                    if (a, b, c, d) != (0, 0, 0, 0) {
                        offsets.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    let metric: Vec<[[f64; 4]; 4]> =
        (0..n).map(|s| geom.site_metric(s).g.map(|r| r.map(|v| v.to_f64_lossy()))).collect();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry(0.0, source));
    while let Some(Entry(d, s)) = heap.pop() {
        if done[s] {
            continue;
        }
        done[s] = true;
        for off in &offsets {
            let Some(t) = geom.offset(s, *off) else { continue };
            if done[t] {
                continue;
            }
            let dx = [0, 1, 2, 3].map(|a| off[a] as f64 * h[a]);
            let mut q = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    q += 0.5 * (metric[s][a][b] + metric[t][a][b]) * dx[a] * dx[b];
                }
            }
            let nd = d + q.sqrt();
            if nd < dist[t] {
                dist[t] = nd;
                heap.push(Entry(nd, t));
            }
        }
    }
    dist.into_iter().map(T::lit).collect()
}

/// Volume of a ball about the basepoint together with its Bishop–Gromov data.
#[derive(Clone, Copy, Debug)]
pub struct BallVolume<T> {
    pub radius: T,
    pub volume: T,
    /// `Vol(B_r)/r⁴`.
    pub ratio: T,
    /// Discretisation allowance on `ratio`: one cell layer, `(Vol(B_{r+h}) − Vol(B_r))/r⁴`.
    pub tolerance: T,
    /// The ball reaches past the inscribed radius and is clipped by the grid.
    pub clipped: bool,
}

/// `Vol(B_r) = Σ_{dist ≤ r} m h⁴` for each requested radius.
pub fn volume_of_balls<T: Real>(geom: &GridGeometry<T>, df: &DistanceField<T>, radii: &[T]) -> Vec<BallVolume<T>> {
    let mut order: Vec<usize> = (0..geom.n_sites()).collect();
    order.sort_by(|&a, &b| df.dist[a].partial_cmp(&df.dist[b]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    let mut cum = Vec::with_capacity(order.len());
    let mut acc = T::zero();
    for &s in &order {
        acc += geom.cell_volume(s);
        cum.push(acc);
    }
    let vol = |r: T| {
        let k = order.partition_point(|&s| df.dist[s] <= r);
        if k == 0 {
            T::zero()
        } else {
            cum[k - 1]
        }
    };
    let h = geom.max_spacing();
    let mut warned = false;
    radii
        .iter()
        .map(|&r| {
            let v = vol(r);
            let r4 = r.powi(4);
            let clipped = r > df.inscribed_radius;
            if clipped && !warned {
                warn!("ball radius {r} exceeds the inscribed radius {}; volumes are clipped", df.inscribed_radius);
                warned = true;
            }
            BallVolume { radius: r, volume: v, ratio: v / r4, tolerance: (vol(r + h) - v) / r4, clipped }
        })
        .collect()
}

/// Indices `i` at which `Vol(B_r)/r⁴` grows from radius `i−1` to `i` by more
/// than the discretisation allowance. Empty when the data are consistent
/// with non-negative Ricci curvature.
pub fn bishop_gromov_violations<T: Real>(balls: &[BallVolume<T>]) -> Vec<usize> {
    (1..balls.len())
        .filter(|&i| !balls[i].clipped && balls[i].ratio > balls[i - 1].ratio + balls[i].tolerance)
        .collect()
}

/// Least-squares slope and intercept of `log Vol` against `log r` for radii in `[r_min, r_max]`.
pub fn fit_growth_exponent<T: Real>(balls: &[BallVolume<T>], r_min: T, r_max: T) -> Option<(T, T)> {
    let pts: Vec<(f64, f64)> = balls
        .iter()
        .filter(|b| b.radius >= r_min && b.radius <= r_max && b.volume > T::zero())
        .map(|b| (b.radius.to_f64_lossy().ln(), b.volume.to_f64_lossy().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((T::lit(slope), T::lit(my - slope * mx)))
}

/// Sites whose distance from the basepoint lies in `[r_inner, r_outer)`.
#[derive(Clone, Debug)]
pub struct Shell<T> {
    pub r_inner: T,
    pub r_outer: T,
    pub sites: Vec<usize>,
}

impl<T: Real> Shell<T> {
    pub fn mid(&self) -> T {
        (self.r_inner + self.r_outer) / T::lit(2.0)
    }
}

/// Cuts the non-boundary sites into shells of the given width, starting at radius
/// `width` and stopping at the inscribed radius.
pub fn shell_decompose<T: Real>(geom: &GridGeometry<T>, df: &DistanceField<T>, width: T) -> Result<Vec<Shell<T>>> {
    if geom.is_compact() {
        return Err(Error::Shells("compact geometries have no end to decompose".into()));
    }
    let h = geom.max_spacing();
    if !(width >= T::lit(2.0) * h) {
        return Err(Error::Shells(format!("shell width {width} is below twice the grid spacing {h}")));
    }
    let n_shells = ((df.inscribed_radius - width) / width).floor().to_f64_lossy();
    if !(n_shells >= 1.0) {
        return Err(Error::Shells(format!(
            "inscribed radius {} leaves no room for shells of width {width}",
            df.inscribed_radius
        )));
    }
    let n_shells = n_shells as usize;
    let mut shells: Vec<Shell<T>> = (0..n_shells)
        .map(|k| {
            let r0 = width * T::from_usize_lossy(k + 1);
            Shell { r_inner: r0, r_outer: r0 + width, sites: Vec::new() }
        })
        .collect();
    for (s, &d) in df.dist.iter().enumerate() {
        if geom.is_boundary_layer(s) || d < width {
            continue;
        }
        let k = ((d - width) / width).floor().to_f64_lossy() as usize;
        if k < n_shells {
            shells[k].sites.push(s);
        }
    }
    if let Some(e) = shells.iter().find(|s| s.sites.is_empty()) {
        return Err(Error::Shells(format!("shell [{}, {}) contains no sites", e.r_inner, e.r_outer)));
    }
    Ok(shells)
}
