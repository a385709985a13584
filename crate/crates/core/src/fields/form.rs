use rayon::prelude::*;

use super::pointwise::{inner_one, inner_two, Lie, One, Two};
use crate::error::{Error, Result};
use crate::geometry::GridGeometry;
use crate::Real;

/// Number of independent components of a `p`-form in four dimensions.
pub const fn n_components(degree: usize) -> usize {
    match degree {
        0 | 4 => 1,
        1 | 3 => 4,
        2 => 6,
        _ => 0,
    }
}

/// An `ad P`-valued `p`-form sampled on every site, site major with the
/// components of each site contiguous (2-forms in the `PAIRS` order).
#[derive(Clone, Debug, PartialEq)]
pub struct AdForm<T> {
    degree: usize,
    data: Vec<Lie<T>>,
}

impl<T: Real> AdForm<T> {
    pub fn zeros(degree: usize, n_sites: usize) -> Self {
        AdForm { degree, data: vec![Lie::zero(); n_components(degree) * n_sites] }
    }

    pub fn from_vec(degree: usize, data: Vec<Lie<T>>) -> Result<Self> {
        let k = n_components(degree);
        if k == 0 || data.len() % k != 0 {
            return Err(Error::Shape(format!("{} values do not make a {degree}-form", data.len())));
        }
        Ok(AdForm { degree, data })
    }

    /// Assembles a form from one array per site.
    pub fn from_sites<const K: usize>(sites: Vec<[Lie<T>; K]>) -> Self {
        let degree = match K {
            1 => 0,
            4 => 1,
            6 => 2,
            _ => panic!("no form has {K} components"),
        };
        AdForm { degree, data: sites.into_iter().flatten().collect() }
    }

    /// Evaluates `f` at every site (in parallel) and collects a form.
    pub fn from_fn<const K: usize>(n_sites: usize, f: impl Fn(usize) -> [Lie<T>; K] + Sync + Send) -> Self {
        Self::from_sites((0..n_sites).into_par_iter().map(f).collect())
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn n_comp(&self) -> usize {
        n_components(self.degree)
    }

    #[inline]
    pub fn n_sites(&self) -> usize {
        self.data.len() / self.n_comp()
    }

    pub fn data(&self) -> &[Lie<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Lie<T>] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, s: usize, c: usize) -> Lie<T> {
        self.data[s * self.n_comp() + c]
    }

    #[inline]
    pub fn set(&mut self, s: usize, c: usize, v: Lie<T>) {
        let k = self.n_comp();
        self.data[s * k + c] = v;
    }

    #[inline]
    pub fn site(&self, s: usize) -> &[Lie<T>] {
        let k = self.n_comp();
        &self.data[s * k..(s + 1) * k]
    }

    #[inline]
    pub fn site_mut(&mut self, s: usize) -> &mut [Lie<T>] {
        let k = self.n_comp();
        &mut self.data[s * k..(s + 1) * k]
    }

    #[inline]
    pub fn scalar_at(&self, s: usize) -> Lie<T> {
        debug_assert_eq!(self.degree, 0);
        self.data[s]
    }

    #[inline]
    pub fn one(&self, s: usize) -> One<T> {
        debug_assert_eq!(self.degree, 1);
        let d = &self.data[4 * s..4 * s + 4];
        [d[0], d[1], d[2], d[3]]
    }

    #[inline]
    pub fn two(&self, s: usize) -> Two<T> {
        debug_assert_eq!(self.degree, 2);
        let d = &self.data[6 * s..6 * s + 6];
        [d[0], d[1], d[2], d[3], d[4], d[5]]
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.degree != other.degree || self.data.len() != other.data.len() {
            return Err(Error::Shape(format!(
                "{}-form on {} sites vs {}-form on {} sites",
                self.degree,
                self.n_sites(),
                other.degree,
                other.n_sites()
            )));
        }
        Ok(())
    }

    /// `self += a x`.
    pub fn axpy(&mut self, a: T, x: &Self) -> Result<()> {
        self.check_same(x)?;
        self.data.par_iter_mut().zip(&x.data).for_each(|(y, &v)| *y += v * a);
        Ok(())
    }

    pub fn scale(&mut self, a: T) {
        self.data.par_iter_mut().for_each(|y| *y = *y * a);
    }

    pub fn linear_combination(&self, a: T, other: &Self, b: T) -> Result<Self> {
        self.check_same(other)?;
        let data = self.data.par_iter().zip(&other.data).map(|(&x, &y)| x * a + y * b).collect();
        Ok(AdForm { degree: self.degree, data })
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.0.iter().all(|c| c.is_finite()))
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> T {
        self.data.iter().flat_map(|v| v.0).fold(T::zero(), |m, c| m.max(c.abs()))
    }

    /// Applies a rotation of the Lie algebra to every value.
    pub fn rotated(&self, r: &[[T; 3]; 3]) -> Self {
        AdForm { degree: self.degree, data: self.data.par_iter().map(|v| v.rotate(r)).collect() }
    }

    /// Pointwise `|ω|²` in the metric at each site.
    pub fn pointwise_norm_sq(&self, geom: &GridGeometry<T>) -> Vec<T> {
        (0..self.n_sites())
            .into_par_iter()
            .map(|s| self.site_inner(geom, s, self))
            .collect()
    }

    #[inline]
    pub fn site_inner(&self, geom: &GridGeometry<T>, s: usize, other: &Self) -> T {
        match self.degree {
            1 => inner_one(&geom.site_metric(s), &self.one(s), &other.one(s)),
            2 => inner_two(&geom.site_metric(s), &self.two(s), &other.two(s)),
            _ => self.get(s, 0).inner(other.get(s, 0)),
        }
    }

    /// `Σ_s w_s ⟨α, β⟩_s` with the given per-site weights.
    pub fn weighted_inner(&self, geom: &GridGeometry<T>, other: &Self, weights: &[T]) -> Result<T> {
        self.check_same(other)?;
        let terms: Vec<T> = (0..self.n_sites())
            .into_par_iter()
            .map(|s| if weights[s] == T::zero() { T::zero() } else { weights[s] * self.site_inner(geom, s, other) })
            .collect();
        Ok(terms.into_iter().sum())
    }

    /// Field `L²` inner product over the quadrature weights (Dirichlet data excluded).
    pub fn l2_inner(&self, geom: &GridGeometry<T>, other: &Self) -> Result<T> {
        self.weighted_inner(geom, other, &quadrature_weights(geom))
    }

    pub fn l2_norm(&self, geom: &GridGeometry<T>) -> T {
        self.l2_inner(geom, self).expect("same shape").max(T::zero()).sqrt()
    }

    /// Largest pointwise norm over sites with positive quadrature weight.
    pub fn sup_norm(&self, geom: &GridGeometry<T>) -> T {
        (0..self.n_sites())
            .filter(|&s| !geom.is_boundary_layer(s))
            .map(|s| self.site_inner(geom, s, self).max(T::zero()).sqrt())
            .fold(T::zero(), T::max)
    }
}

/// The quadrature weights `m h⁴`, zero on Dirichlet boundary layers.
pub fn quadrature_weights<T: Real>(geom: &GridGeometry<T>) -> Vec<T> {
    (0..geom.n_sites()).map(|s| geom.quadrature_weight(s)).collect()
}

/// Cell volumes `m h⁴` at every site, boundary layers included.
pub fn cell_volumes<T: Real>(geom: &GridGeometry<T>) -> Vec<T> {
    (0..geom.n_sites()).map(|s| geom.cell_volume(s)).collect()
}

/// A connection `A` (as a 1-form relative to the trivial connection) and a Higgs field `Φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugePair<T> {
    pub a: AdForm<T>,
    pub phi: AdForm<T>,
}

impl<T: Real> GaugePair<T> {
    pub fn new(a: AdForm<T>, phi: AdForm<T>) -> Result<Self> {
        if a.degree() != 1 || phi.degree() != 1 || a.n_sites() != phi.n_sites() {
            return Err(Error::Shape("connection and Higgs field must be 1-forms on the same grid".into()));
        }
        Ok(GaugePair { a, phi })
    }

    pub fn zeros(n_sites: usize) -> Self {
        GaugePair { a: AdForm::zeros(1, n_sites), phi: AdForm::zeros(1, n_sites) }
    }

    pub fn n_sites(&self) -> usize {
        self.a.n_sites()
    }

    pub fn axpy(&mut self, t: T, dir: &GaugePair<T>) -> Result<()> {
        self.a.axpy(t, &dir.a)?;
        self.phi.axpy(t, &dir.phi)
    }

    pub fn l2_inner(&self, geom: &GridGeometry<T>, other: &Self) -> Result<T> {
        let w = quadrature_weights(geom);
        Ok(self.a.weighted_inner(geom, &other.a, &w)? + self.phi.weighted_inner(geom, &other.phi, &w)?)
    }

    pub fn l2_norm(&self, geom: &GridGeometry<T>) -> T {
        self.l2_inner(geom, self).expect("same shape").max(T::zero()).sqrt()
    }

    /// Global gauge rotation by a constant element of `SO(3)`.
    pub fn rotated(&self, r: &[[T; 3]; 3]) -> Self {
        GaugePair { a: self.a.rotated(r), phi: self.phi.rotated(r) }
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.phi.is_finite()
    }
}
