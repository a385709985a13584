//! Scalar Laplace solver and Green's functions.
//!
//! The Laplacian is the positive operator `Δu = −m⁻¹ ∂_a(m g^{ab} ∂_b u)`, so
//! `Δ sin x = sin x` and Green's functions are positive. It is discretised as
//! `W⁻¹S` with `W = diag(m h⁴)` and `S` the Gram matrix of the energy
//! `Σ_s m_s h⁴ g^{ab} ∂_a u ∂_b u`, where the difference quotients average the
//! forward and backward choices per axis; cells just beyond a truncated face
//! hold the zero Dirichlet data. `S` is symmetric positive definite with any
//! Dirichlet axis, and reduces to the standard compact stencil on flat grids.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::GridGeometry;
use crate::Real;

/// Sum with a fixed chunking so the result does not depend on the thread count.
pub(crate) fn det_sum<T: Real>(v: &[T]) -> T {
    let parts: Vec<T> = v.par_chunks(4096).map(|c| c.iter().copied().sum()).collect();
    parts.into_iter().sum()
}

fn det_dot<T: Real>(x: &[T], y: &[T]) -> T {
    let parts: Vec<T> = x
        .par_chunks(4096)
        .zip(y.par_chunks(4096))
        .map(|(a, b)| a.iter().zip(b).map(|(&p, &q)| p * q).sum())
        .collect();
    parts.into_iter().sum()
}

/// Result of a Poisson solve.
#[derive(Clone, Debug)]
pub struct PoissonSolution<T> {
    pub solution: Vec<T>,
    pub iterations: usize,
    /// `‖Wf − Su‖ / ‖Wf‖` at exit.
    pub relative_residual: f64,
}

/// Discrete Laplace–Beltrami operator with its solver settings.
pub struct GreensOperator<'g, T> {
    geom: &'g GridGeometry<T>,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Per site `½ m h⁴ g^{ab}`.
    coeff: Vec<[[T; 4]; 4]>,
    diag: Vec<T>,
    cell: Vec<T>,
}

impl<'g, T: Real> GreensOperator<'g, T> {
    pub fn new(geom: &'g GridGeometry<T>) -> Self {
        let n = geom.n_sites();
        let half = T::lit(0.5);
        let coeff: Vec<[[T; 4]; 4]> = (0..n)
            .map(|s| {
                let sm = geom.site_metric(s);
                let w = geom.cell_volume(s) * half;
                sm.ginv.map(|row| row.map(|v| v * w))
            })
            .collect();
        let h = geom.spacing();
        let diag = (0..n)
            .map(|t| {
                let mut d = T::zero();
                for a in 0..4 {
                    let c = |s: usize| coeff[s][a][a] / (h[a] * h[a]);
                    d += c(t) + c(t);
                    if let Some(m) = geom.neighbor(t, a, false) {
                        d += c(m);
                    }
                    if let Some(p) = geom.neighbor(t, a, true) {
                        d += c(p);
                    }
                }
                d
            })
            .collect();
        let cell = (0..n).map(|s| geom.cell_volume(s)).collect();
        GreensOperator { geom, tolerance: 1e-10, max_iterations: 20_000, coeff, diag, cell }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn with_max_iterations(mut self, it: usize) -> Self {
        self.max_iterations = it;
        self
    }

    pub fn geometry(&self) -> &GridGeometry<T> {
        self.geom
    }

    /// `S u`.
    pub fn apply(&self, u: &[T]) -> Vec<T> {
        let g = self.geom;
        let n = g.n_sites();
        let h = g.spacing();
        let at = |t: Option<usize>| t.map_or(T::zero(), |t| u[t]);
        // q[s][a] = (forward, backward) fluxes ½ m h⁴ (g^{aa} d^±_a + Σ_{b≠a} g^{ab} C_b) / h_a
        let q: Vec<[(T, T); 4]> = (0..n)
            .into_par_iter()
            .map(|s| {
                let us = u[s];
                let fwd: [T; 4] = std::array::from_fn(|a| (at(g.neighbor(s, a, true)) - us) / h[a]);
                let bwd: [T; 4] = std::array::from_fn(|a| (us - at(g.neighbor(s, a, false))) / h[a]);
                let c = &self.coeff[s];
                std::array::from_fn(|a| {
                    let mut cross = T::zero();
                    if !g.is_flat() {
                        for b in 0..4 {
                            if b != a {
                                cross += c[a][b] * (fwd[b] + bwd[b]) * T::lit(0.5);
                            }
                        }
                    }
                    ((c[a][a] * fwd[a] + cross) / h[a], (c[a][a] * bwd[a] + cross) / h[a])
                })
            })
            .collect();
        (0..n)
            .into_par_iter()
            .map(|t| {
                let mut acc = T::zero();
                for a in 0..4 {
                    acc += q[t][a].1 - q[t][a].0;
                    // A ghost cell beyond a truncated face contributes only its
                    // difference towards `t`.
                    let ghost = self.coeff[t][a][a] / (h[a] * h[a]) * u[t];
                    match g.neighbor(t, a, false) {
                        Some(m) => acc += q[m][a].0,
                        None => acc += ghost,
                    }
                    match g.neighbor(t, a, true) {
                        Some(p) => acc -= q[p][a].1,
                        None => acc += ghost,
                    }
                }
                acc
            })
            .collect()
    }

    /// `Δu = W⁻¹ S u`.
    pub fn laplacian(&self, u: &[T]) -> Vec<T> {
        self.apply(u).into_iter().zip(&self.cell).map(|(v, &w)| v / w).collect()
    }

    /// Solves `Δu = f`. On fully periodic grids `f` must integrate to zero and
    /// the solution is normalised to zero mean.
    pub fn solve(&self, f: &[T]) -> Result<PoissonSolution<T>> {
        let n = self.geom.n_sites();
        if f.len() != n {
            return Err(Error::Shape(format!("source has {} values for {n} sites", f.len())));
        }
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::Source("source is not finite".into()));
        }
        let b: Vec<T> = f.iter().zip(&self.cell).map(|(&v, &w)| v * w).collect();
        let compact = self.geom.is_compact();
        if compact {
            let total = det_sum(&b).to_f64_lossy();
            let scale = det_sum(&b.iter().map(|v| v.abs()).collect::<Vec<_>>()).to_f64_lossy();
            if total.abs() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::Source(format!(
                    "source must have zero mean on a closed manifold (integral {total:e})"
                )));
            }
        }
        let bnorm = det_dot(&b, &b).sqrt();
        if bnorm == T::zero() {
            return Ok(PoissonSolution { solution: vec![T::zero(); n], iterations: 0, relative_residual: 0.0 });
        }
        let mut x = vec![T::zero(); n];
        let mut r = b.clone();
        let precond = |r: &[T]| -> Vec<T> { r.par_iter().zip(&self.diag).map(|(&v, &d)| v / d).collect() };
        let mut z = precond(&r);
        let mut p = z.clone();
        let mut rz = det_dot(&r, &z);
        let tol = T::lit(self.tolerance);
        let mut rel = T::one();
        let mut it = 0;
        while it < self.max_iterations {
            rel = det_dot(&r, &r).sqrt() / bnorm;
            if rel <= tol {
                break;
            }
            let sp = self.apply(&p);
            let alpha = rz / det_dot(&p, &sp);
            x.par_iter_mut().zip(&p).for_each(|(x, &p)| *x += alpha * p);
            r.par_iter_mut().zip(&sp).for_each(|(r, &s)| *r -= alpha * s);
            z = precond(&r);
            let rz_new = det_dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            p.par_iter_mut().zip(&z).for_each(|(p, &z)| *p = z + beta * *p);
            it += 1;
        }
        if rel > tol {
            return Err(Error::NotConverged { iterations: it, residual: rel.to_f64_lossy() });
        }
        if compact {
            let vol = det_sum(&self.cell);
            let mean = det_dot(&x, &self.cell) / vol;
            x.par_iter_mut().for_each(|v| *v -= mean);
        }
        Ok(PoissonSolution { solution: x, iterations: it, relative_residual: rel.to_f64_lossy() })
    }

    /// `G(x, ·)`: the response to a unit mass at site `x`, i.e. `1/(m h⁴)` there.
    pub fn column(&self, x: usize) -> Result<Vec<T>> {
        if self.geom.is_compact() {
            return Err(Error::Source("a closed manifold has no Green's function for a point source".into()));
        }
        if x >= self.geom.n_sites() {
            return Err(Error::Source(format!("site {x} is outside the grid")));
        }
        let mut f = vec![T::zero(); self.geom.n_sites()];
        f[x] = T::one() / self.cell[x];
        Ok(self.solve(&f)?.solution)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{GeometryDescriptor, NutCenter};
    use std::f64::consts::TAU;

    #[test]
    fn zero_source_gives_zero() {
        let g = GridGeometry::<f64>::new(&GeometryDescriptor::EuclideanBall4 { side: 2.0, n: 6 }).unwrap();
        let op = GreensOperator::new(&g);
        let sol = op.solve(&vec![0.0; g.n_sites()]).unwrap();
        assert!(sol.solution.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn torus_eigenfunction() {
        // Δ sin x = sin x with the positive Laplacian; error is O(h²).
        let err = |n: usize| {
            let g = GridGeometry::<f64>::new(&GeometryDescriptor::FlatTorus4 { side: TAU, n }).unwrap();
            let f: Vec<f64> = (0..g.n_sites()).map(|s| g.position(s)[0].sin()).collect();
            let u = GreensOperator::new(&g).solve(&f).unwrap().solution;
            u.iter().zip(&f).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(8), err(16));
        assert!(e1 < 0.1, "{e1}");
        assert!((e1 / e2 - 4.0).abs() < 0.4, "{e1} {e2}");
    }

    #[test]
    fn torus_rejects_nonzero_mean() {
        let g = GridGeometry::<f64>::new(&GeometryDescriptor::FlatTorus4 { side: 1.0, n: 4 }).unwrap();
        assert!(matches!(GreensOperator::new(&g).solve(&vec![1.0; g.n_sites()]), Err(Error::Source(_))));
    }

    #[test]
    fn maximum_principle() {
        let g = GridGeometry::<f64>::new(&GeometryDescriptor::EuclideanBall4 { side: 2.0, n: 9 }).unwrap();
        let col = GreensOperator::new(&g).column(g.index([2, 4, 5, 3])).unwrap();
        assert!(col.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn greens_function_is_symmetric() {
        let d = GeometryDescriptor::GibbonsHawking {
            centers: vec![NutCenter { position: [0.11, 0.07, 0.0], mass: 0.5 }],
            side: 4.0,
            circumference: 1.5,
            n: 9,
            n_circle: Some(4),
        };
        let g = GridGeometry::<f64>::new(&d).unwrap();
        let op = GreensOperator::new(&g).with_tolerance(1e-12);
        let (x, y) = (g.index([2, 3, 4, 1]), g.index([6, 5, 3, 2]));
        let (gx, gy) = (op.column(x).unwrap(), op.column(y).unwrap());
        let (a, b) = (gx[y], gy[x]);
        assert!((a - b).abs() < 1e-8 * a.abs(), "{a} vs {b}");
    }

    #[test]
    fn operator_is_symmetric_on_curved_grids() {
        use rand::{Rng, SeedableRng};
        let d = GeometryDescriptor::RoundSpherePatch { radius: 1.0, side: 2.0, n: 6 };
        let g = GridGeometry::<f64>::new(&d).unwrap();
        let op = GreensOperator::new(&g);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let u: Vec<f64> = (0..g.n_sites()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..g.n_sites()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (su, sv) = (op.apply(&u), op.apply(&v));
        let a: f64 = su.iter().zip(&v).map(|(p, q)| p * q).sum();
        let b: f64 = sv.iter().zip(&u).map(|(p, q)| p * q).sum();
        assert!((a - b).abs() < 1e-10 * a.abs().max(1.0));
        let uu: f64 = su.iter().zip(&u).map(|(p, q)| p * q).sum();
        assert!(uu > 0.0);
    }

    #[test]
    fn poisson_is_second_order_on_a_box() {
        // u = Π cos(π x_a / L) vanishes on the faces, Δu = 4 (π/L)² u.
        let err = |n: usize| {
            let side = 2.0;
            let g = GridGeometry::<f64>::new(&GeometryDescriptor::EuclideanBall4 { side, n }).unwrap();
            let k = std::f64::consts::PI / side;
            let exact: Vec<f64> = (0..g.n_sites()).map(|s| g.position(s).iter().map(|x| (k * x).cos()).product()).collect();
            let f: Vec<f64> = exact.iter().map(|u| 4.0 * k * k * u).collect();
            let u = GreensOperator::new(&g).solve(&f).unwrap().solution;
            u.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(7), err(15));
        assert!((e1 / e2 - 4.0).abs() < 0.5, "{e1} {e2}");
    }
}
