//! Pointwise metric data: inverse, volume density and the induced
//! structure on 2-forms.

use crate::Real;

pub type Mat4<T> = [[T; 4]; 4];
pub type Mat6<T> = [[T; 6]; 6];

/// Ordered index pairs used to store 2-form components.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Position of `(a, b)` in [`PAIRS`] with the sign of the reordering, or
/// `None` on the diagonal.
#[inline]
pub fn pair_slot(a: usize, b: usize) -> Option<(usize, i8)> {
    const SLOT: [[i8; 4]; 4] = [[-1, 0, 1, 2], [0, -1, 3, 4], [1, 3, -1, 5], [2, 4, 5, -1]];
    let k = SLOT[a][b];
    if k < 0 {
        None
    } else {
        Some((k as usize, if a < b { 1 } else { -1 }))
    }
}

/// Sign of `e_I ∧ e_J` relative to `dx¹∧dx²∧dx³∧dx⁴` for ordered pairs.
/// It pairs 12↔34 (+), 13↔24 (−), 14↔23 (+).
pub const COMPLEMENT: [(usize, i8); 6] = [(5, 1), (4, -1), (3, 1), (2, 1), (1, -1), (0, 1)];

pub fn identity4<T: Real>() -> Mat4<T> {
    let mut m = [[T::zero(); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

/// Inverse and determinant of a 4×4 matrix by Gauss–Jordan with partial pivoting.
pub fn invert4<T: Real>(a: &Mat4<T>) -> Option<(Mat4<T>, T)> {
    let mut m = *a;
    let mut inv = identity4::<T>();
    let mut det = T::one();
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &j| {
            m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[pivot][col] == T::zero() || !m[pivot][col].is_finite() {
            return None;
        }
        if pivot != col {
            m.swap(pivot, col);
            inv.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for k in 0..4 {
            m[col][k] /= p;
            inv[col][k] /= p;
        }
        for r in 0..4 {
            if r != col {
                let f = m[r][col];
                if f != T::zero() {
                    for k in 0..4 {
                        m[r][k] = m[r][k] - f * m[col][k];
                        inv[r][k] = inv[r][k] - f * inv[col][k];
                    }
                }
            }
        }
    }
    Some((inv, det))
}

/// Metric, inverse metric and volume density `m = √det g` at one site.
#[derive(Clone, Copy, Debug)]
pub struct SiteMetric<T> {
    pub g: Mat4<T>,
    pub ginv: Mat4<T>,
    pub m: T,
    pub flat: bool,
}

impl<T: Real> SiteMetric<T> {
    pub fn euclidean() -> Self {
        SiteMetric { g: identity4(), ginv: identity4(), m: T::one(), flat: true }
    }

    /// Returns `None` unless `g` is symmetric positive definite.
    pub fn from_metric(g: Mat4<T>) -> Option<Self> {
        if !is_positive_definite(&g) {
            return None;
        }
        let (ginv, det) = invert4(&g)?;
        Some(SiteMetric { g, ginv, m: det.sqrt(), flat: false })
    }

    /// Induced inner product on 2-forms in the [`PAIRS`] basis:
    /// `G_{(ab),(cd)} = g^{ac} g^{bd} − g^{ad} g^{bc}`.
    pub fn lambda2(&self) -> Mat6<T> {
        let gi = &self.ginv;
        let mut out = [[T::zero(); 6]; 6];
        for (i, &(a, b)) in PAIRS.iter().enumerate() {
            for (j, &(c, d)) in PAIRS.iter().enumerate() {
                out[i][j] = gi[a][c] * gi[b][d] - gi[a][d] * gi[b][c];
            }
        }
        out
    }

    /// Matrix of the Hodge star on 2-forms: `(∗F)_{cd} = ½ m ε_{abcd} F^{ab}`.
    pub fn hodge2(&self) -> Mat6<T> {
        let mut out = [[T::zero(); 6]; 6];
        if self.flat {
            for (i, &(j, s)) in COMPLEMENT.iter().enumerate() {
                out[j][i] = if s > 0 { T::one() } else { -T::one() };
            }
            return out;
        }
        let g2 = self.lambda2();
        // (∗F)_J = m Σ_I ε(I,J) F^I, F^I = Σ_K G_{IK} F_K
        for (i, &(j, s)) in COMPLEMENT.iter().enumerate() {
            let sign = if s > 0 { self.m } else { -self.m };
            for k in 0..6 {
                out[j][k] += sign * g2[i][k];
            }
        }
        out
    }

    #[inline]
    pub fn raise_vec(&self, v: &[T; 4]) -> [T; 4] {
        if self.flat {
            return *v;
        }
        let mut out = [T::zero(); 4];
        for (a, o) in out.iter_mut().enumerate() {
            for (b, vb) in v.iter().enumerate() {
                *o += self.ginv[a][b] * *vb;
            }
        }
        out
    }
}

/// Cholesky-style test for symmetric positive definiteness.
pub fn is_positive_definite<T: Real>(g: &Mat4<T>) -> bool {
    let tol = T::lit(1e-10);
    for i in 0..4 {
        for j in 0..4 {
            let scale = g[i][j].abs().max(g[j][i].abs()).max(T::one());
            if (g[i][j] - g[j][i]).abs() > tol * scale {
                return false;
            }
        }
    }
    let mut l = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..=i {
            let mut s = g[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > T::zero()) {
                    return false;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    true
}
