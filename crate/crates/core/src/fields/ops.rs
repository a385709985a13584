//! Discrete exterior calculus twisted by a connection.
//!
//! Every derivative is the centred difference `D_a f = (f(x+h e_a) − f(x−h e_a))/2h`,
//! reading zero beyond a truncated face. `D_a` is antisymmetric for the plain
//! site sum, which makes each codifferential below the exact adjoint of the
//! matching covariant derivative under `Σ_s μ_s h⁴ ⟨·,·⟩`.

use rayon::prelude::*;

use super::form::AdForm;
use super::pointwise::{lower_one, raise_one, raise_tensor, raise_two, zero_one, Lie, One, Tensor, Two};
use crate::geometry::{GridGeometry, PAIRS};
use crate::Real;

/// Density `μ` in the divergence of a codifferential.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Density {
    /// The Riemannian density `m = √det g` everywhere.
    Volume,
    /// `m` away from Dirichlet data and zero on the boundary layer. This is the
    /// density for which the operators are adjoint to the energy's own sums.
    Quadrature,
}

pub fn density_field<T: Real>(geom: &GridGeometry<T>, density: Density) -> Vec<T> {
    (0..geom.n_sites())
        .map(|s| match density {
            Density::Quadrature if geom.is_boundary_layer(s) => T::zero(),
            _ => geom.density(s),
        })
        .collect()
}

#[inline]
fn half_inv_h<T: Real>(geom: &GridGeometry<T>, axis: usize) -> T {
    T::one() / (T::lit(2.0) * geom.spacing()[axis])
}

/// Centred difference of a site function with a zero ghost layer.
#[inline]
pub fn central<T: Real>(geom: &GridGeometry<T>, s: usize, axis: usize, f: impl Fn(usize) -> Lie<T>) -> Lie<T> {
    let p = geom.neighbor(s, axis, true).map_or(Lie::zero(), &f);
    let m = geom.neighbor(s, axis, false).map_or(Lie::zero(), &f);
    (p - m) * half_inv_h(geom, axis)
}

#[inline]
pub fn central_scalar<T: Real>(geom: &GridGeometry<T>, s: usize, axis: usize, f: impl Fn(usize) -> T) -> T {
    let p = geom.neighbor(s, axis, true).map_or(T::zero(), &f);
    let m = geom.neighbor(s, axis, false).map_or(T::zero(), &f);
    (p - m) * half_inv_h(geom, axis)
}

/// `F_A = dA + ½[A ∧ A]` at one site.
#[inline]
pub fn curvature_at<T: Real>(geom: &GridGeometry<T>, a: &AdForm<T>, s: usize) -> Two<T> {
    let here = a.one(s);
    std::array::from_fn(|i| {
        let (p, q) = PAIRS[i];
        central(geom, s, p, |t| a.get(t, q)) - central(geom, s, q, |t| a.get(t, p)) + here[p].bracket(here[q])
    })
}

pub fn curvature<T: Real>(geom: &GridGeometry<T>, a: &AdForm<T>) -> AdForm<T> {
    AdForm::from_fn(geom.n_sites(), |s| curvature_at(geom, a, s))
}

/// `d_A u = du + [A, u]` for a 0-form.
pub fn ext_d0<T: Real>(geom: &GridGeometry<T>, a: &AdForm<T>, u: &AdForm<T>) -> AdForm<T> {
    AdForm::from_fn(geom.n_sites(), |s| {
        let here = a.one(s);
        let us = u.scalar_at(s);
        let out: One<T> = std::array::from_fn(|b| central(geom, s, b, |t| u.scalar_at(t)) + here[b].bracket(us));
        out
    })
}

/// `d_A ω` for a 1-form at one site.
#[inline]
pub fn ext_d1_at<T: Real>(geom: &GridGeometry<T>, a: &AdForm<T>, w: &AdForm<T>, s: usize) -> Two<T> {
    let (ah, wh) = (a.one(s), w.one(s));
    std::array::from_fn(|i| {
        let (p, q) = PAIRS[i];
        central(geom, s, p, |t| w.get(t, q)) - central(geom, s, q, |t| w.get(t, p)) + ah[p].bracket(wh[q])
            - ah[q].bracket(wh[p])
    })
}

pub fn ext_d1<T: Real>(geom: &GridGeometry<T>, a: &AdForm<T>, w: &AdForm<T>) -> AdForm<T> {
    AdForm::from_fn(geom.n_sites(), |s| ext_d1_at(geom, a, w, s))
}

/// `d_A ω` for a 2-form, a 3-form stored by its omitted index: component `d`
/// holds `(d_A ω)_{abc}` with `{a,b,c} = {0,1,2,3} \ {d}` in increasing order.
pub fn ext_d2<T: Real>(geom: &GridGeometry<T>, a: &AdForm<T>, w: &AdForm<T>) -> AdForm<T> {
    use super::pointwise::component;
    AdForm::from_fn(geom.n_sites(), |s| {
        let (ah, wh) = (a.one(s), w.two(s));
        let term = |i: usize, j: usize, k: usize| {
            let dw = |r: usize, p: usize, q: usize| central(geom, s, r, |t| component(&w.two(t), p, q));
            dw(i, j, k) + dw(j, k, i) + dw(k, i, j)
                + ah[i].bracket(component(&wh, j, k))
                + ah[j].bracket(component(&wh, k, i))
                + ah[k].bracket(component(&wh, i, j))
        };
        let out: One<T> = [term(1, 2, 3), term(0, 2, 3), term(0, 1, 3), term(0, 1, 2)];
        out
    })
}

/// `(∇ω)_{ab} = D_a ω_b + [A_a, ω_b] − Γ^c_{ab} ω_c` at one site.
#[inline]
pub fn cov_grad_at<T: Real>(geom: &GridGeometry<T>, a: &AdForm<T>, w: &AdForm<T>, s: usize) -> Tensor<T> {
    let (ah, wh) = (a.one(s), w.one(s));
    let mut y: Tensor<T> = std::array::from_fn(|p| {
        std::array::from_fn(|q| central(geom, s, p, |t| w.get(t, q)) + ah[p].bracket(wh[q]))
    });
    if let Some(gam) = geom.christoffel(s) {
        for p in 0..4 {
            for q in 0..4 {
                for c in 0..4 {
                    y[p][q] -= wh[c] * gam[c][p][q];
                }
            }
        }
    }
    y
}

pub fn cov_grad<T: Real>(geom: &GridGeometry<T>, a: &AdForm<T>, w: &AdForm<T>) -> Vec<Tensor<T>> {
    (0..geom.n_sites()).into_par_iter().map(|s| cov_grad_at(geom, a, w, s)).collect()
}

#[inline]
fn inv_or_zero<T: Real>(mu: T) -> T {
    if mu == T::zero() {
        T::zero()
    } else {
        T::one() / mu
    }
}

/// `d_A^* ω = −μ⁻¹ Σ_a (D_a(μ ω^a) + μ[A_a, ω^a])` for a 1-form; a 0-form.
pub fn codiff1<T: Real>(geom: &GridGeometry<T>, a: &AdForm<T>, w: &AdForm<T>, density: Density) -> AdForm<T> {
    let mu = density_field(geom, density);
    let q: Vec<One<T>> = (0..geom.n_sites())
        .into_par_iter()
        .map(|s| {
            let up = raise_one(&geom.site_metric(s), &w.one(s));
            up.map(|v| v * mu[s])
        })
        .collect();
    AdForm::from_fn(geom.n_sites(), |s| {
        let ah = a.one(s);
        let mut acc = Lie::zero();
        for d in 0..4 {
            acc += central(geom, s, d, |t| q[t][d]) + ah[d].bracket(q[s][d]);
        }
        [acc * (-inv_or_zero(mu[s]))]
    })
}

/// `(d_A^* ω)_c = −g_{cb} μ⁻¹ Σ_a (D_a(μ ω^{ab}) + μ[A_a, ω^{ab}])` for a 2-form.
pub fn codiff2<T: Real>(geom: &GridGeometry<T>, a: &AdForm<T>, w: &AdForm<T>, density: Density) -> AdForm<T> {
    use super::pointwise::component;
    let mu = density_field(geom, density);
    let q: Vec<Two<T>> = (0..geom.n_sites())
        .into_par_iter()
        .map(|s| raise_two(&geom.site_metric(s), &w.two(s)).map(|v| v * mu[s]))
        .collect();
    AdForm::from_fn(geom.n_sites(), |s| {
        let ah = a.one(s);
        let mut up = zero_one::<T>();
        for (b, u) in up.iter_mut().enumerate() {
            for d in 0..4 {
                if d != b {
                    *u += central(geom, s, d, |t| component(&q[t], d, b)) + ah[d].bracket(component(&q[s], d, b));
                }
            }
        }
        let k = -inv_or_zero(mu[s]);
        lower_one(&geom.site_metric(s), &up.map(|v| v * k))
    })
}

/// Connection Laplacian `∇^*∇ω` of a 1-form, with `Γ` entering both the
/// gradient and the divergence.
pub fn connection_laplacian<T: Real>(
    geom: &GridGeometry<T>,
    a: &AdForm<T>,
    w: &AdForm<T>,
    density: Density,
) -> AdForm<T> {
    let mu = density_field(geom, density);
    let q: Vec<Tensor<T>> = (0..geom.n_sites())
        .into_par_iter()
        .map(|s| raised_gradient(geom, &cov_grad_at(geom, a, w, s), mu[s], s))
        .collect();
    divergence_of_gradient(geom, a, &q, &mu)
}

/// `∇^*∇Φ` together with the supercurrent `j_Φ`, sharing one pass over `∇Φ`.
pub fn laplacian_and_supercurrent<T: Real>(
    geom: &GridGeometry<T>,
    a: &AdForm<T>,
    phi: &AdForm<T>,
    density: Density,
) -> (AdForm<T>, AdForm<T>) {
    let mu = density_field(geom, density);
    let (q, j): (Vec<Tensor<T>>, Vec<One<T>>) = (0..geom.n_sites())
        .into_par_iter()
        .map(|s| {
            let y = cov_grad_at(geom, a, phi, s);
            (raised_gradient(geom, &y, mu[s], s), current_at(&geom.site_metric(s), &y, &phi.one(s)))
        })
        .unzip();
    (divergence_of_gradient(geom, a, &q, &mu), AdForm::from_sites(j))
}

#[inline]
fn raised_gradient<T: Real>(geom: &GridGeometry<T>, y: &Tensor<T>, mu: T, s: usize) -> Tensor<T> {
    raise_tensor(&geom.site_metric(s), y).map(|row| row.map(|v| v * mu))
}

/// `−μ⁻¹ g_{cb}(D_d q^{db} + [A_d, q^{db}] + Γ^b_{de} q^{de})` for the raised, weighted gradient `q`.
fn divergence_of_gradient<T: Real>(geom: &GridGeometry<T>, a: &AdForm<T>, q: &[Tensor<T>], mu: &[T]) -> AdForm<T> {
    AdForm::from_fn(geom.n_sites(), |s| {
        let ah = a.one(s);
        let mut up = zero_one::<T>();
        for (b, u) in up.iter_mut().enumerate() {
            for d in 0..4 {
                *u += central(geom, s, d, |t| q[t][d][b]) + ah[d].bracket(q[s][d][b]);
            }
        }
        if let Some(gam) = geom.christoffel(s) {
            for (b, u) in up.iter_mut().enumerate() {
                for d in 0..4 {
                    for e in 0..4 {
                        *u += q[s][d][e] * gam[b][d][e];
                    }
                }
            }
        }
        let k = -inv_or_zero(mu[s]);
        lower_one(&geom.site_metric(s), &up.map(|v| v * k))
    })
}

/// Supercurrent `j_a = g^{bd} [(∇Φ)_{ab}, Φ_d]`.
pub fn supercurrent<T: Real>(geom: &GridGeometry<T>, a: &AdForm<T>, phi: &AdForm<T>) -> AdForm<T> {
    AdForm::from_fn(geom.n_sites(), |s| current_at(&geom.site_metric(s), &cov_grad_at(geom, a, phi, s), &phi.one(s)))
}

#[inline]
fn current_at<T: Real>(g: &crate::geometry::SiteMetric<T>, y: &Tensor<T>, phi: &One<T>) -> One<T> {
    let up = raise_one(g, phi);
    std::array::from_fn(|p| {
        let mut acc = Lie::zero();
        for b in 0..4 {
            acc += y[p][b].bracket(up[b]);
        }
        acc
    })
}

/// Applies a pointwise map to a 2-form field.
pub fn map_two<T: Real>(geom: &GridGeometry<T>, w: &AdForm<T>, f: impl Fn(usize, &Two<T>) -> Two<T> + Sync + Send) -> AdForm<T> {
    AdForm::from_fn(geom.n_sites(), |s| f(s, &w.two(s)))
}

/// Applies a pointwise map to a 1-form field.
pub fn map_one<T: Real>(geom: &GridGeometry<T>, w: &AdForm<T>, f: impl Fn(usize, &One<T>) -> One<T> + Sync + Send) -> AdForm<T> {
    AdForm::from_fn(geom.n_sites(), |s| f(s, &w.one(s)))
}

/// Scalar Laplacian `Δu = −m⁻¹ D_a(m g^{ab} D_b u)` (non-negative spectrum).
pub fn scalar_laplacian<T: Real>(geom: &GridGeometry<T>, u: &[T]) -> Vec<T> {
    let n = geom.n_sites();
    let flux: Vec<[T; 4]> = (0..n)
        .into_par_iter()
        .map(|s| {
            let du: [T; 4] = std::array::from_fn(|b| central_scalar(geom, s, b, |t| u[t]));
            let sm = geom.site_metric(s);
            sm.raise_vec(&du).map(|v| v * sm.m)
        })
        .collect();
    (0..n)
        .into_par_iter()
        .map(|s| {
            let div: T = (0..4).map(|a| central_scalar(geom, s, a, |t| flux[t][a])).sum();
            -div / geom.density(s)
        })
        .collect()
}
