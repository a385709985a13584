#![allow(dead_code)]

use kwgauge::fields::{cell_volumes, AdForm, GaugePair};
use kwgauge::geometry::{GeometryDescriptor, GridGeometry};
use kwgauge::solver::{manufacture, Manufactured, RandomSmooth};

pub fn torus(n: usize) -> GridGeometry<f64> {
    GridGeometry::new(&GeometryDescriptor::FlatTorus4 { side: std::f64::consts::TAU, n }).unwrap()
}

pub fn random_pair(geom: &GridGeometry<f64>, seed: u64, amplitude: f64) -> GaugePair<f64> {
    let spec = RandomSmooth { amplitude, bandlimit: 1, ..RandomSmooth::new(seed) };
    manufacture(geom, &Manufactured::RandomSmooth(spec)).unwrap()
}

/// `Σ_s m h⁴ ⟨α, β⟩` over every site.
pub fn volume_inner(geom: &GridGeometry<f64>, x: &AdForm<f64>, y: &AdForm<f64>) -> f64 {
    x.weighted_inner(geom, y, &cell_volumes(geom)).unwrap()
}

/// Largest pointwise norm over sites at least `depth` layers inside the grid.
pub fn sup_inside(geom: &GridGeometry<f64>, f: &AdForm<f64>, depth: usize) -> f64 {
    (0..geom.n_sites())
        .filter(|&s| geom.depth(s) >= depth)
        .map(|s| f.site_inner(geom, s, f).sqrt())
        .fold(0.0, f64::max)
}

pub fn max_abs_inside(geom: &GridGeometry<f64>, v: &[f64], depth: usize) -> f64 {
    (0..geom.n_sites()).filter(|&s| geom.depth(s) >= depth).map(|s| v[s].abs()).fold(0.0, f64::max)
}
