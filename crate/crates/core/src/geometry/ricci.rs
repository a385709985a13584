//! Christoffel symbols and Ricci curvature from a sampled metric.
//!
//! Derivatives are centred differences; on the outermost layer of a
//! truncated axis they switch to the second-order one-sided stencil
//! `(−3f₀ + 4f₁ − f₂)/2h` and the site is flagged.

use rayon::prelude::*;

use super::{GridGeometry, Mat4, SiteMetric};
use crate::Real;

/// `∂_axis f` at site `s`, with a flag that is set when the stencil was one sided.
pub(crate) fn site_derivative<T: Real>(
    geom: &GridGeometry<T>,
    s: usize,
    axis: usize,
    f: impl Fn(usize) -> T,
) -> (T, bool) {
    let h = geom.spacing()[axis];
    let two = T::lit(2.0);
    let step = |k: i64| {
        let mut o = [0i64; 4];
        o[axis] = k;
        geom.offset(s, o)
    };
    match (step(-1), step(1)) {
        (Some(m), Some(p)) => ((f(p) - f(m)) / (two * h), false),
        (None, Some(p)) => {
            let p2 = step(2).expect("axis has at least three sites");
            ((-T::lit(3.0) * f(s) + T::lit(4.0) * f(p) - f(p2)) / (two * h), true)
        }
        (Some(m), None) => {
            let m2 = step(-2).expect("axis has at least three sites");
            ((T::lit(3.0) * f(s) - T::lit(4.0) * f(m) + f(m2)) / (two * h), true)
        }
        (None, None) => (T::zero(), true),
    }
}

/// `Γ^c_{ab} = ½ g^{cd}(∂_a g_{db} + ∂_b g_{da} − ∂_d g_{ab})` at every site.
pub(crate) fn christoffel_field<T: Real>(
    geom: &GridGeometry<T>,
    metric: &[SiteMetric<T>],
) -> (Vec<[[[T; 4]; 4]; 4]>, Vec<bool>) {
    let n = geom.n_sites();
    (0..n)
        .into_par_iter()
        .map(|s| {
            let mut dg = [[[T::zero(); 4]; 4]; 4]; // dg[a][b][c] = ∂_a g_bc
            let mut flag = false;
            for a in 0..4 {
                for b in 0..4 {
                    for c in b..4 {
                        let (v, f) = site_derivative(geom, s, a, |t| metric[t].g[b][c]);
                        flag |= f;
                        dg[a][b][c] = v;
                        dg[a][c][b] = v;
                    }
                }
            }
            let ginv = &metric[s].ginv;
            let half = T::lit(0.5);
            let mut gam = [[[T::zero(); 4]; 4]; 4];
            for a in 0..4 {
                for b in a..4 {
                    let mut low = [T::zero(); 4];
                    for d in 0..4 {
                        low[d] = half * (dg[a][d][b] + dg[b][d][a] - dg[d][a][b]);
                    }
                    for c in 0..4 {
                        let v = (0..4).map(|d| ginv[c][d] * low[d]).sum::<T>();
                        gam[c][a][b] = v;
                        gam[c][b][a] = v;
                    }
                }
            }
            (gam, flag)
        })
        .unzip()
}

/// Ricci tensor sampled on a grid.
pub struct RicciField<T> {
    pub ric: Vec<Mat4<T>>,
    /// Sites where a one-sided stencil entered either derivative.
    pub one_sided: Vec<bool>,
}

impl<T: Real> RicciField<T> {
    /// Pointwise norm `|Ric|_g`.
    pub fn norm(&self, geom: &GridGeometry<T>, s: usize) -> T {
        tensor_norm(&geom.site_metric(s), &self.ric[s])
    }

    /// Largest `|Ric|_g` over the grid.
    pub fn max_norm(&self, geom: &GridGeometry<T>) -> T {
        (0..geom.n_sites()).map(|s| self.norm(geom, s)).fold(T::zero(), T::max)
    }

    /// `Ric(ω)_b = g^{cd} R_{bd} ω_c` for one covector.
    #[inline]
    pub fn apply(&self, geom: &GridGeometry<T>, s: usize, w: &[T; 4]) -> [T; 4] {
        apply_ricci(&geom.site_metric(s), &self.ric[s], w)
    }
}

/// `|S|_g² = g^{ac} g^{bd} S_{ab} S_{cd}` for a covariant 2-tensor.
pub fn tensor_norm<T: Real>(sm: &SiteMetric<T>, t: &Mat4<T>) -> T {
    let gi = &sm.ginv;
    let mut up = [[T::zero(); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut v = T::zero();
            for c in 0..4 {
                for d in 0..4 {
                    v += gi[a][c] * gi[b][d] * t[c][d];
                }
            }
            up[a][b] = v;
        }
    }
    let mut acc = T::zero();
    for a in 0..4 {
        for b in 0..4 {
            acc += up[a][b] * t[a][b];
        }
    }
    acc.max(T::zero()).sqrt()
}

#[inline]
pub(crate) fn apply_ricci<T: Real>(sm: &SiteMetric<T>, r: &Mat4<T>, w: &[T; 4]) -> [T; 4] {
    let up = sm.raise_vec(w);
    let mut out = [T::zero(); 4];
    for b in 0..4 {
        out[b] = (0..4).map(|d| r[b][d] * up[d]).sum();
    }
    out
}

/// Ricci tensor `R_{bd} = ∂_a Γ^a_{db} − ∂_d Γ^a_{ab} + Γ^a_{ae} Γ^e_{db} − Γ^a_{de} Γ^e_{ab}`.
/// Identically zero on flat geometries.
pub fn ricci<T: Real>(geom: &GridGeometry<T>) -> RicciField<T> {
    let n = geom.n_sites();
    if geom.is_flat() {
        return RicciField { ric: vec![[[T::zero(); 4]; 4]; n], one_sided: vec![false; n] };
    }
    let gam = |t: usize| geom.christoffel(t).expect("curved geometry stores Γ");
    (0..n)
        .into_par_iter()
        .map(|s| {
            let g = gam(s);
            let mut flag = geom.one_sided(s);
            // dgam[d][c][a][b] = ∂_d Γ^c_ab
            let mut dgam = [[[[T::zero(); 4]; 4]; 4]; 4];
            for d in 0..4 {
                for c in 0..4 {
                    for a in 0..4 {
                        for b in a..4 {
                            let (v, f) = site_derivative(geom, s, d, |t| gam(t)[c][a][b]);
                            flag |= f;
                            dgam[d][c][a][b] = v;
                            dgam[d][c][b][a] = v;
                        }
                    }
                }
            }
            let mut r = [[T::zero(); 4]; 4];
            for b in 0..4 {
                for d in 0..4 {
                    let mut v = T::zero();
                    for a in 0..4 {
                        v += dgam[a][a][d][b] - dgam[d][a][a][b];
                        for e in 0..4 {
                            v += g[a][a][e] * g[e][d][b] - g[a][d][e] * g[e][a][b];
                        }
                    }
                    r[b][d] = v;
                }
            }
            (r, flag)
        })
        .unzip::<_, _, Vec<_>, Vec<_>>()
        .into()
}

impl<T> From<(Vec<Mat4<T>>, Vec<bool>)> for RicciField<T> {
    fn from((ric, one_sided): (Vec<Mat4<T>>, Vec<bool>)) -> Self {
        RicciField { ric, one_sided }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{GeometryDescriptor, NutCenter};

    #[test]
    fn round_sphere_is_einstein() {
        let radius = 1.5;
        let geom = GridGeometry::<f64>::new(&GeometryDescriptor::RoundSpherePatch { radius, side: 2.0, n: 11 }).unwrap();
        let ric = ricci(&geom);
        let lambda = 3.0 / (radius * radius);
        for s in 0..geom.n_sites() {
            if ric.one_sided[s] || geom.depth(s) < 2 {
                continue;
            }
            let sm = geom.site_metric(s);
            let mut dev = [[0.0; 4]; 4];
            for a in 0..4 {
                for b in 0..4 {
                    dev[a][b] = ric.ric[s][a][b] - lambda * sm.g[a][b];
                }
            }
            assert!(tensor_norm(&sm, &dev) < 0.05 * lambda * 2.0, "site {s}: {}", tensor_norm(&sm, &dev));
        }
    }

    #[test]
    fn sphere_christoffel_matches_conformal_formula() {
        // g = e^{2φ} δ with φ = ln(2R²/(R²+|x|²)): Γ^c_ab = δ^c_a ∂_bφ + δ^c_b ∂_aφ − δ_ab ∂_cφ.
        let radius = 1.0;
        let geom = GridGeometry::<f64>::new(&GeometryDescriptor::RoundSpherePatch { radius, side: 1.0, n: 21 }).unwrap();
        let s = geom.nearest_site([0.1, -0.2, 0.15, 0.05]);
        let x = geom.position(s);
        let q: f64 = x.iter().map(|c| c * c).sum();
        let dphi = x.map(|c| -2.0 * c / (radius * radius + q));
        let gam = geom.christoffel(s).unwrap();
        let h = geom.spacing()[0];
        for c in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
                    let exact = d(c, a) * dphi[b] + d(c, b) * dphi[a] - d(a, b) * dphi[c];
                    assert!((gam[c][a][b] - exact).abs() < 2.0 * h * h, "{c}{a}{b}");
                }
            }
        }
    }

    #[test]
    fn gibbons_hawking_ricci_converges_to_zero() {
        // Away from the centre and on the side of the plane without the Dirac string.
        let worst = |n: usize| {
            let d = GeometryDescriptor::GibbonsHawking {
                centers: vec![NutCenter { position: [0.031, 0.017, 0.0], mass: 0.5 }],
                side: 6.0,
                circumference: 1.0,
                n,
                n_circle: Some(4),
            };
            let geom = GridGeometry::<f64>::new(&d).unwrap();
            let ric = ricci(&geom);
            (0..geom.n_sites())
                .filter(|&s| {
                    let x = geom.position(s);
                    geom.depth(s) >= 2 && x[2] > 0.0 && (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt() > 1.5
                })
                .map(|s| ric.norm(&geom, s))
                .fold(0.0f64, f64::max)
        };
        let (coarse, fine) = (worst(23), worst(35));
        assert!(coarse < 0.05, "{coarse}");
        assert!(coarse / fine > 1.8, "{coarse} -> {fine}");
    }

    #[test]
    fn flat_is_exactly_ricci_flat() {
        let geom = GridGeometry::<f64>::new(&GeometryDescriptor::FlatTorus4 { side: 1.0, n: 4 }).unwrap();
        assert_eq!(ricci(&geom).max_norm(&geom), 0.0);
    }
}
