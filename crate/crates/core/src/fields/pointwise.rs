//! Algebra of `su(2)`-valued forms at a single site.

use crate::geometry::{pair_slot, SiteMetric, COMPLEMENT, PAIRS};
use crate::lie::LieValue;
use crate::Real;

pub type Lie<T> = LieValue<T>;
pub type One<T> = [Lie<T>; 4];
pub type Two<T> = [Lie<T>; 6];
/// Covariant 2-tensor with values in the algebra, `Y[a][b] = Y_{ab}`.
pub type Tensor<T> = [[Lie<T>; 4]; 4];

#[inline]
pub fn zero_one<T: Real>() -> One<T> {
    [Lie::zero(); 4]
}

#[inline]
pub fn zero_two<T: Real>() -> Two<T> {
    [Lie::zero(); 6]
}

/// Component `ω_{ab}` of a 2-form stored in the pair basis, for any `a, b`.
#[inline]
pub fn component<T: Real>(w: &Two<T>, a: usize, b: usize) -> Lie<T> {
    match pair_slot(a, b) {
        None => Lie::zero(),
        Some((k, 1)) => w[k],
        Some((k, _)) => -w[k],
    }
}

/// Applies a real 4×4 matrix to the form index.
#[inline]
pub fn mat_one<T: Real>(m: &[[T; 4]; 4], w: &One<T>) -> One<T> {
    let mut out = zero_one();
    for a in 0..4 {
        for b in 0..4 {
            if m[a][b] != T::zero() {
                out[a] += w[b] * m[a][b];
            }
        }
    }
    out
}

#[inline]
pub fn mat_two<T: Real>(m: &[[T; 6]; 6], w: &Two<T>) -> Two<T> {
    let mut out = zero_two();
    for i in 0..6 {
        for j in 0..6 {
            if m[i][j] != T::zero() {
                out[i] += w[j] * m[i][j];
            }
        }
    }
    out
}

#[inline]
pub fn raise_one<T: Real>(sm: &SiteMetric<T>, w: &One<T>) -> One<T> {
    if sm.flat {
        *w
    } else {
        mat_one(&sm.ginv, w)
    }
}

#[inline]
pub fn lower_one<T: Real>(sm: &SiteMetric<T>, w: &One<T>) -> One<T> {
    if sm.flat {
        *w
    } else {
        mat_one(&sm.g, w)
    }
}

/// Both indices raised: `ω^{ab} = g^{ac} g^{bd} ω_{cd}`.
#[inline]
pub fn raise_two<T: Real>(sm: &SiteMetric<T>, w: &Two<T>) -> Two<T> {
    if sm.flat {
        *w
    } else {
        mat_two(&sm.lambda2(), w)
    }
}

pub fn raise_tensor<T: Real>(sm: &SiteMetric<T>, y: &Tensor<T>) -> Tensor<T> {
    if sm.flat {
        return *y;
    }
    let gi = &sm.ginv;
    let mut half = [[Lie::zero(); 4]; 4];
    for a in 0..4 {
        for d in 0..4 {
            for c in 0..4 {
                half[a][d] += y[c][d] * gi[a][c];
            }
        }
    }
    let mut out = [[Lie::zero(); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for d in 0..4 {
                out[a][b] += half[a][d] * gi[b][d];
            }
        }
    }
    out
}

/// Hodge star on 2-forms.
#[inline]
pub fn star<T: Real>(sm: &SiteMetric<T>, w: &Two<T>) -> Two<T> {
    if sm.flat {
        let mut out = zero_two();
        for (i, &(j, s)) in COMPLEMENT.iter().enumerate() {
            out[j] = if s > 0 { w[i] } else { -w[i] };
        }
        out
    } else {
        mat_two(&sm.hodge2(), w)
    }
}

/// Self-dual part `½(ω + ∗ω)`.
pub fn self_dual<T: Real>(sm: &SiteMetric<T>, w: &Two<T>) -> Two<T> {
    let s = star(sm, w);
    let h = T::lit(0.5);
    std::array::from_fn(|i| (w[i] + s[i]) * h)
}

/// Anti-self-dual part `½(ω − ∗ω)`.
pub fn anti_self_dual<T: Real>(sm: &SiteMetric<T>, w: &Two<T>) -> Two<T> {
    let s = star(sm, w);
    let h = T::lit(0.5);
    std::array::from_fn(|i| (w[i] - s[i]) * h)
}

#[inline]
pub fn inner_one<T: Real>(sm: &SiteMetric<T>, x: &One<T>, y: &One<T>) -> T {
    let y = raise_one(sm, y);
    (0..4).map(|a| x[a].inner(y[a])).sum()
}

#[inline]
pub fn inner_two<T: Real>(sm: &SiteMetric<T>, x: &Two<T>, y: &Two<T>) -> T {
    let y = raise_two(sm, y);
    (0..6).map(|i| x[i].inner(y[i])).sum()
}

#[inline]
pub fn norm_sq_one<T: Real>(sm: &SiteMetric<T>, x: &One<T>) -> T {
    inner_one(sm, x, x)
}

#[inline]
pub fn norm_sq_two<T: Real>(sm: &SiteMetric<T>, x: &Two<T>) -> T {
    inner_two(sm, x, x)
}

/// `|Y|² = g^{ac} g^{bd} ⟨Y_{ab}, Y_{cd}⟩`.
pub fn norm_sq_tensor<T: Real>(sm: &SiteMetric<T>, y: &Tensor<T>) -> T {
    let up = raise_tensor(sm, y);
    let mut acc = T::zero();
    for a in 0..4 {
        for b in 0..4 {
            acc += y[a][b].inner(up[a][b]);
        }
    }
    acc
}

/// `[α ∧ β]_{ab} = [α_a, β_b] − [α_b, β_a]`.
#[inline]
pub fn wedge_bracket<T: Real>(x: &One<T>, y: &One<T>) -> Two<T> {
    std::array::from_fn(|i| {
        let (a, b) = PAIRS[i];
        x[a].bracket(y[b]) - x[b].bracket(y[a])
    })
}

/// `Σ_a [ψ_{ab}, φ^a]`, which equals `∗[(∗ψ) ∧ φ]` for a 2-form `ψ` and 1-form `φ`.
pub fn contract<T: Real>(sm: &SiteMetric<T>, psi: &Two<T>, phi: &One<T>) -> One<T> {
    let up = raise_one(sm, phi);
    std::array::from_fn(|b| {
        let mut acc = Lie::zero();
        for a in 0..4 {
            if a != b {
                acc += component(psi, a, b).bracket(up[a]);
            }
        }
        acc
    })
}

/// `½ ∗[∗[Φ ∧ Φ] ∧ Φ]`, i.e. `Σ_a [[Φ_a, Φ_b], Φ^a]`.
pub fn cubic<T: Real>(sm: &SiteMetric<T>, phi: &One<T>) -> One<T> {
    let up = raise_one(sm, phi);
    std::array::from_fn(|b| {
        let mut acc = Lie::zero();
        for a in 0..4 {
            if a != b {
                acc += phi[a].bracket(phi[b]).bracket(up[a]);
            }
        }
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::identity4;
    use proptest::prelude::*;

    fn sample_metric(seed: u64) -> SiteMetric<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut l = [[0.0; 4]; 4];
        for (i, row) in l.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate().take(i + 1) {
                *v = if i == j { 1.0 + rng.gen::<f64>() } else { rng.gen_range(-0.5..0.5) };
            }
        }
        let mut g = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                g[i][j] = (0..4).map(|k| l[i][k] * l[j][k]).sum();
            }
        }
        SiteMetric::from_metric(g).unwrap()
    }

    fn random_two(seed: u64) -> Two<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        std::array::from_fn(|_| Lie::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn random_one(seed: u64) -> One<f64> {
        let t = random_two(seed);
        [t[0], t[1], t[2], t[3]]
    }

    fn levi_civita(p: [usize; 4]) -> f64 {
        let mut s = 1.0;
        for i in 0..4 {
            for j in i + 1..4 {
                if p[i] == p[j] {
                    return 0.0;
                }
                if p[i] > p[j] {
                    s = -s;
                }
            }
        }
        s
    }

    /// `(∗F)_{cd} = ½ √det g ε_{abcd} g^{ae} g^{bf} F_{ef}`, summed over all indices.
    fn star_by_epsilon(sm: &SiteMetric<f64>, f: &Two<f64>) -> Two<f64> {
        let gi = &sm.ginv;
        std::array::from_fn(|k| {
            let (c, d) = PAIRS[k];
            let mut acc = Lie::zero();
            for a in 0..4 {
                for b in 0..4 {
                    let eps = levi_civita([a, b, c, d]);
                    if eps == 0.0 {
                        continue;
                    }
                    for e in 0..4 {
                        for ff in 0..4 {
                            acc += component(f, e, ff) * (0.5 * sm.m * eps * gi[a][e] * gi[b][ff]);
                        }
                    }
                }
            }
            acc
        })
    }

    fn close(x: &Two<f64>, y: &Two<f64>, tol: f64) -> bool {
        x.iter().zip(y).all(|(a, b)| (0..3).all(|i| (a.0[i] - b.0[i]).abs() <= tol))
    }

    #[test]
    fn flat_star_table() {
        let sm = SiteMetric::<f64>::euclidean();
        let e = |i: usize| {
            let mut w = zero_two::<f64>();
            w[i] = Lie::basis(0);
            w
        };
        // ∗(12) = 34, ∗(13) = −24, ∗(14) = 23
        assert_eq!(star(&sm, &e(0))[5], Lie::basis(0));
        assert_eq!(star(&sm, &e(1))[4], -Lie::basis(0));
        assert_eq!(star(&sm, &e(2))[3], Lie::basis(0));
    }

    #[test]
    fn star_matches_epsilon_contraction() {
        for seed in 0..20 {
            let sm = sample_metric(seed);
            let f = random_two(100 + seed);
            assert!(close(&star(&sm, &f), &star_by_epsilon(&sm, &f), 1e-12));
            let flat = SiteMetric::<f64>::euclidean();
            assert!(close(&star(&flat, &f), &star_by_epsilon(&flat, &f), 1e-15));
        }
    }

    #[test]
    fn star_is_an_involution_and_isometry() {
        for seed in 0..20 {
            let sm = sample_metric(seed);
            let f = random_two(200 + seed);
            let ss = star(&sm, &star(&sm, &f));
            assert!(close(&ss, &f, 1e-11));
            let a = norm_sq_two(&sm, &f);
            let b = norm_sq_two(&sm, &star(&sm, &f));
            assert!((a - b).abs() < 1e-11 * a.max(1.0));
            // ω ∧ ∗ω = |ω|² vol
            let sf = star(&sm, &f);
            let mut wedge = 0.0;
            for (i, &(j, s)) in COMPLEMENT.iter().enumerate() {
                wedge += f64::from(s) * f[i].inner(sf[j]);
            }
            assert!((wedge - sm.m * a).abs() < 1e-10 * a.max(1.0));
        }
    }

    #[test]
    fn projections_split_the_norm() {
        let sm = sample_metric(3);
        let f = random_two(5);
        let (p, m) = (self_dual(&sm, &f), anti_self_dual(&sm, &f));
        assert!(inner_two(&sm, &p, &m).abs() < 1e-12);
        let n = norm_sq_two(&sm, &f);
        assert!((norm_sq_two(&sm, &p) + norm_sq_two(&sm, &m) - n).abs() < 1e-12 * n);
        assert!(close(&star(&sm, &p), &p, 1e-12));
    }

    /// `∗[(∗ψ) ∧ φ]` built literally from the 3-form `(∗ψ) ∧ φ`.
    fn contract_by_three_form(sm: &SiteMetric<f64>, psi: &Two<f64>, phi: &One<f64>) -> One<f64> {
        let s = star(sm, psi);
        let gi = &sm.ginv;
        // χ_{abc} = [s_{ab}, φ_c] + [s_{bc}, φ_a] + [s_{ca}, φ_b]
        let chi = |a: usize, b: usize, c: usize| {
            component(&s, a, b).bracket(phi[c]) + component(&s, b, c).bracket(phi[a]) + component(&s, c, a).bracket(phi[b])
        };
        // (∗χ)_d = (1/6) m ε_{abcd} χ^{abc}
        std::array::from_fn(|d| {
            let mut acc = Lie::zero();
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        let eps = levi_civita([a, b, c, d]);
                        if eps == 0.0 {
                            continue;
                        }
                        for e in 0..4 {
                            for f in 0..4 {
                                for g in 0..4 {
                                    let w = gi[a][e] * gi[b][f] * gi[c][g];
                                    if w != 0.0 {
                                        acc += chi(e, f, g) * (sm.m * eps * w / 6.0);
                                    }
                                }
                            }
                        }
                    }
                }
            }
            acc
        })
    }

    #[test]
    fn contraction_is_star_of_wedge() {
        for seed in 0..6 {
            let sm = if seed == 0 { SiteMetric::euclidean() } else { sample_metric(seed) };
            let psi = random_two(300 + seed);
            let phi = random_one(400 + seed);
            let a = contract(&sm, &psi, &phi);
            let b = contract_by_three_form(&sm, &psi, &phi);
            for d in 0..4 {
                for i in 0..3 {
                    assert!((a[d].0[i] - b[d].0[i]).abs() < 1e-10, "seed {seed} d {d}");
                }
            }
        }
    }

    #[test]
    fn cubic_is_half_contraction_of_wedge() {
        let sm = sample_metric(9);
        let phi = random_one(10);
        let b = wedge_bracket(&phi, &phi);
        let half = contract_by_three_form(&sm, &b, &phi);
        let c = cubic(&sm, &phi);
        for d in 0..4 {
            for i in 0..3 {
                assert!((c[d].0[i] - 0.5 * half[d].0[i]).abs() < 1e-10);
            }
        }
        // ⟨Φ, cubic(Φ)⟩ = ½ |[Φ ∧ Φ]|²
        assert!((inner_one(&sm, &phi, &c) - 0.5 * norm_sq_two(&sm, &b)).abs() < 1e-10);
    }

    #[test]
    fn raising_with_identity_is_trivial() {
        let sm = SiteMetric::from_metric(identity4::<f64>()).unwrap();
        let f = random_two(1);
        assert!(close(&raise_two(&sm, &f), &f, 1e-15));
    }

    proptest! {
        #[test]
        fn norms_are_non_negative(seed in 0u64..1000) {
            let sm = sample_metric(seed);
            prop_assert!(norm_sq_two(&sm, &random_two(seed)) >= 0.0);
            prop_assert!(norm_sq_one(&sm, &random_one(seed)) >= 0.0);
        }

        #[test]
        fn wedge_bracket_is_symmetric_on_one_forms(s1 in 0u64..1000, s2 in 0u64..1000) {
            let (x, y) = (random_one(s1), random_one(s2 + 5000));
            prop_assert!(close(&wedge_bracket(&x, &y), &wedge_bracket(&y, &x), 1e-14));
        }
    }
}
