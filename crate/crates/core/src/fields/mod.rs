//! Adjoint-valued discrete forms and the covariant calculus on them.

mod form;
pub mod ops;
pub mod pointwise;

pub use form::{cell_volumes, n_components, quadrature_weights, AdForm, GaugePair};
pub use ops::Density;

use crate::geometry::GridGeometry;
use crate::Real;

/// `∗F` for a 2-form field.
pub fn hodge_star<T: Real>(geom: &GridGeometry<T>, w: &AdForm<T>) -> AdForm<T> {
    ops::map_two(geom, w, |s, v| pointwise::star(&geom.site_metric(s), v))
}

/// `(F⁺, F⁻) = (½(F + ∗F), ½(F − ∗F))`.
pub fn sd_asd_project<T: Real>(geom: &GridGeometry<T>, w: &AdForm<T>) -> (AdForm<T>, AdForm<T>) {
    let plus = ops::map_two(geom, w, |s, v| pointwise::self_dual(&geom.site_metric(s), v));
    let minus = ops::map_two(geom, w, |s, v| pointwise::anti_self_dual(&geom.site_metric(s), v));
    (plus, minus)
}

/// `[α ∧ β]` for two 1-form fields.
pub fn wedge_bracket<T: Real>(geom: &GridGeometry<T>, x: &AdForm<T>, y: &AdForm<T>) -> AdForm<T> {
    AdForm::from_fn(geom.n_sites(), |s| pointwise::wedge_bracket(&x.one(s), &y.one(s)))
}
