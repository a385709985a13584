use rayon::prelude::*;

use crate::fields::ops::{self, Density};
use crate::fields::pointwise::{self as pw, One};
use crate::fields::{AdForm, GaugePair};
use crate::geometry::GridGeometry;
use crate::Real;

/// `L²` gradient of the discrete energy, in the pairing `Σ_s w_s g^{ab}⟨α_a, β_b⟩`:
///
/// * `∂E/∂A = 2(d_A^*F − j_Φ)`,
/// * `∂E/∂Φ = 2(∇^*∇Φ + ½∗[∗[Φ∧Φ]∧Φ])`,
///
/// with the divergences taken in the quadrature density. No Ricci term
/// appears: it enters the second-order equations only through the
/// Weitzenböck rewriting, not the energy. The gradient vanishes on Dirichlet
/// boundary layers, which the flow treats as frozen data.
pub fn energy_gradient<T: Real>(geom: &GridGeometry<T>, pair: &GaugePair<T>) -> GaugePair<T> {
    let (a, phi) = (&pair.a, &pair.phi);
    let f = ops::curvature(geom, a);
    let dsf = ops::codiff2(geom, a, &f, Density::Quadrature);
    drop(f);
    let (lap, j) = ops::laplacian_and_supercurrent(geom, a, phi, Density::Quadrature);
    let two = T::lit(2.0);
    let n = geom.n_sites();
    let ga: Vec<One<T>> = (0..n)
        .into_par_iter()
        .map(|s| {
            if geom.is_boundary_layer(s) {
                return pw::zero_one();
            }
            let (d, c) = (dsf.one(s), j.one(s));
            std::array::from_fn(|i| (d[i] - c[i]) * two)
        })
        .collect();
    let gphi: Vec<One<T>> = (0..n)
        .into_par_iter()
        .map(|s| {
            if geom.is_boundary_layer(s) {
                return pw::zero_one();
            }
            let l = lap.one(s);
            let c = pw::cubic(&geom.site_metric(s), &phi.one(s));
            std::array::from_fn(|i| (l[i] + c[i]) * two)
        })
        .collect();
    GaugePair { a: AdForm::from_sites(ga), phi: AdForm::from_sites(gphi) }
}

/// Five-point central-difference directional derivative of the energy along `dir`.
/// The energy is a quartic polynomial in the fields, so the stencil is exact up to rounding.
pub fn directional_derivative<T: Real>(geom: &GridGeometry<T>, pair: &GaugePair<T>, dir: &GaugePair<T>, step: T) -> T {
    let at = |k: f64| {
        let mut p = pair.clone();
        p.axpy(step * T::lit(k), dir).expect("same shape");
        crate::kw::energy(geom, &p)
    };
    let near = at(1.0) - at(-1.0);
    let far = at(2.0) - at(-2.0);
    (T::lit(8.0) * near - far) / (T::lit(12.0) * step)
}
