//! The θ-Kapustin–Witten system: residuals, energy, the first-order to
//! second-order algebra, and the potentials built from solutions.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::ops::{self, Density};
use crate::fields::pointwise::{self as pw, One, Two};
use crate::fields::{quadrature_weights, AdForm, GaugePair};
use crate::geometry::{GridGeometry, RicciField, Shell};
use crate::greens::GreensOperator;
use crate::Real;

/// The angle θ carried as `(cos θ, sin θ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KwAngle<T> {
    pub theta: T,
    pub cos: T,
    pub sin: T,
}

impl<T: Real> KwAngle<T> {
    pub fn new(theta: T) -> Self {
        KwAngle { theta, cos: theta.cos(), sin: theta.sin() }
    }

    /// `|sin θ cos θ|`, zero exactly at the angles where `tan θ` or its inverse blows up.
    pub fn degeneracy(&self) -> T {
        (self.sin * self.cos).abs()
    }
}

/// Residuals of the first-order system and of the second-order system.
pub struct KwResiduals<T> {
    /// `cos θ (F − ½[Φ∧Φ])⁻ − sin θ d_A⁻Φ`.
    pub r_minus: AdForm<T>,
    /// `sin θ (F − ½[Φ∧Φ])⁺ + cos θ d_A⁺Φ`.
    pub r_plus: AdForm<T>,
    /// `d_A^*Φ`.
    pub r_gauge: AdForm<T>,
    /// `∇^*∇Φ + ½∗[∗[Φ∧Φ]∧Φ] + Ric(Φ)`.
    pub so_phi: AdForm<T>,
    /// `d_A^*F − j_Φ`.
    pub so_f: AdForm<T>,
}

/// How the Ricci term enters the second-order residual.
pub enum RicciTerm<'a, T> {
    /// Drop it (exact on flat models, the analytic value on Ricci-flat ones).
    Zero,
    /// Use a sampled Ricci tensor.
    Sampled(&'a RicciField<T>),
}

/// First-order residuals `(r⁻, r⁺, r_gauge)`. Built from `cos θ` and `sin θ`
/// directly, so every angle is admissible.
pub fn first_order_residuals<T: Real>(
    geom: &GridGeometry<T>,
    pair: &GaugePair<T>,
    angle: KwAngle<T>,
) -> (AdForm<T>, AdForm<T>, AdForm<T>) {
    let n = geom.n_sites();
    let (a, phi) = (&pair.a, &pair.phi);
    let both: Vec<(Two<T>, Two<T>)> = (0..n)
        .into_par_iter()
        .map(|s| {
            let sm = geom.site_metric(s);
            let f = ops::curvature_at(geom, a, s);
            let p = phi.one(s);
            let b = pw::wedge_bracket(&p, &p);
            let dphi = ops::ext_d1_at(geom, a, phi, s);
            let half = T::lit(0.5);
            let g: Two<T> = std::array::from_fn(|i| f[i] - b[i] * half);
            let (gm, gp) = (pw::anti_self_dual(&sm, &g), pw::self_dual(&sm, &g));
            let (dm, dp) = (pw::anti_self_dual(&sm, &dphi), pw::self_dual(&sm, &dphi));
            let rm = std::array::from_fn(|i| gm[i] * angle.cos - dm[i] * angle.sin);
            let rp = std::array::from_fn(|i| gp[i] * angle.sin + dp[i] * angle.cos);
            (rm, rp)
        })
        .collect();
    let (rm, rp): (Vec<Two<T>>, Vec<Two<T>>) = both.into_iter().unzip();
    let gauge = ops::codiff1(geom, a, phi, Density::Volume);
    (AdForm::from_sites(rm), AdForm::from_sites(rp), gauge)
}

/// Second-order residuals `(so_phi, so_f)`.
pub fn second_order_residuals<T: Real>(
    geom: &GridGeometry<T>,
    pair: &GaugePair<T>,
    ricci: RicciTerm<'_, T>,
) -> (AdForm<T>, AdForm<T>) {
    let (a, phi) = (&pair.a, &pair.phi);
    let lap = ops::connection_laplacian(geom, a, phi, Density::Volume);
    let so_phi = AdForm::from_fn(geom.n_sites(), |s| {
        let sm = geom.site_metric(s);
        let p = phi.one(s);
        let c = pw::cubic(&sm, &p);
        let l = lap.one(s);
        let mut out: One<T> = std::array::from_fn(|i| l[i] + c[i]);
        if let RicciTerm::Sampled(r) = &ricci {
            let rp = ricci_apply(&sm, &r.ric[s], &p);
            for i in 0..4 {
                out[i] += rp[i];
            }
        }
        out
    });
    let f = ops::curvature(geom, a);
    let dsf = ops::codiff2(geom, a, &f, Density::Volume);
    let j = ops::supercurrent(geom, a, phi);
    let so_f = dsf.linear_combination(T::one(), &j, -T::one()).expect("same shape");
    (so_phi, so_f)
}

/// `Ric(ω)_b = g^{cd} R_{bd} ω_c` on algebra-valued covectors.
pub fn ricci_apply<T: Real>(sm: &crate::geometry::SiteMetric<T>, r: &[[T; 4]; 4], w: &One<T>) -> One<T> {
    let up = pw::raise_one(sm, w);
    std::array::from_fn(|b| {
        let mut acc = pw::Lie::zero();
        for d in 0..4 {
            acc += up[d] * r[b][d];
        }
        acc
    })
}

/// All five residual fields.
pub fn residuals<T: Real>(
    geom: &GridGeometry<T>,
    pair: &GaugePair<T>,
    angle: KwAngle<T>,
    ricci: RicciTerm<'_, T>,
) -> KwResiduals<T> {
    let (r_minus, r_plus, r_gauge) = first_order_residuals(geom, pair, angle);
    let (so_phi, so_f) = second_order_residuals(geom, pair, ricci);
    KwResiduals { r_minus, r_plus, r_gauge, so_phi, so_f }
}

impl<T: Real> KwResiduals<T> {
    /// `L²` norms in the order `(r⁻, r⁺, r_gauge, so_phi, so_f)`.
    pub fn l2_norms(&self, geom: &GridGeometry<T>) -> [T; 5] {
        [&self.r_minus, &self.r_plus, &self.r_gauge, &self.so_phi, &self.so_f].map(|f| f.l2_norm(geom))
    }

    /// Combined first-order residual `(‖r⁻‖² + ‖r⁺‖² + ‖r_gauge‖²)^{1/2}`.
    pub fn first_order_norm(&self, geom: &GridGeometry<T>) -> T {
        let n = self.l2_norms(geom);
        (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt()
    }
}

/// Pointwise energy density terms `(|F|², |∇Φ|², ¼|[Φ∧Φ]|²)` at one site.
#[inline]
pub fn density_terms_at<T: Real>(geom: &GridGeometry<T>, pair: &GaugePair<T>, s: usize) -> [T; 3] {
    let sm = geom.site_metric(s);
    let f = ops::curvature_at(geom, &pair.a, s);
    let y = ops::cov_grad_at(geom, &pair.a, &pair.phi, s);
    let p = pair.phi.one(s);
    let b = pw::wedge_bracket(&p, &p);
    [pw::norm_sq_two(&sm, &f), pw::norm_sq_tensor(&sm, &y), T::lit(0.25) * pw::norm_sq_two(&sm, &b)]
}

/// `E = Σ_s w_s e_KW(s)` without storing any intermediate field.
pub fn energy<T: Real>(geom: &GridGeometry<T>, pair: &GaugePair<T>) -> T {
    let c = energy_components(geom, pair);
    c[0] + c[1] + c[2]
}

/// Quadrature of each density term separately.
pub fn energy_components<T: Real>(geom: &GridGeometry<T>, pair: &GaugePair<T>) -> [T; 3] {
    let per_site: Vec<[T; 3]> = (0..geom.n_sites())
        .into_par_iter()
        .map(|s| {
            let w = geom.quadrature_weight(s);
            if w == T::zero() {
                [T::zero(); 3]
            } else {
                density_terms_at(geom, pair, s).map(|v| v * w)
            }
        })
        .collect();
    per_site.iter().fold([T::zero(); 3], |acc, v| [acc[0] + v[0], acc[1] + v[1], acc[2] + v[2]])
}

/// Yang–Mills action `Σ_s w_s |F|²` of a connection alone.
pub fn yang_mills_action<T: Real>(geom: &GridGeometry<T>, a: &AdForm<T>) -> T {
    let per_site: Vec<T> = (0..geom.n_sites())
        .into_par_iter()
        .map(|s| {
            let w = geom.quadrature_weight(s);
            if w == T::zero() {
                T::zero()
            } else {
                w * pw::norm_sq_two(&geom.site_metric(s), &ops::curvature_at(geom, a, s))
            }
        })
        .collect();
    per_site.into_iter().sum()
}

/// Energy totals, density and its Lᵖ norms.
#[derive(Clone, Debug)]
pub struct EnergyReport<T> {
    pub e_total: T,
    /// `e_KW` at every site (zero weight on boundary layers is applied only in sums).
    pub density: Vec<T>,
    /// `(‖F‖², ‖∇Φ‖², ¼‖[Φ∧Φ]‖²)`.
    pub components: [T; 3],
    /// `(p, ‖e_KW‖_{Lᵖ})`; `p = ∞` gives the supremum over weighted sites.
    pub lp_norms: Vec<(f64, T)>,
}

pub fn energy_report<T: Real>(geom: &GridGeometry<T>, pair: &GaugePair<T>, p_list: &[f64]) -> EnergyReport<T> {
    let terms: Vec<[T; 3]> = (0..geom.n_sites()).into_par_iter().map(|s| density_terms_at(geom, pair, s)).collect();
    let weights = quadrature_weights(geom);
    let mut components = [T::zero(); 3];
    for (t, &w) in terms.iter().zip(&weights) {
        if w != T::zero() {
            for k in 0..3 {
                components[k] += w * t[k];
            }
        }
    }
    let density: Vec<T> = terms.iter().map(|t| t[0] + t[1] + t[2]).collect();
    let lp_norms = p_list.iter().map(|&p| (p, lp_norm(&density, &weights, p))).collect();
    EnergyReport { e_total: components[0] + components[1] + components[2], density, components, lp_norms }
}

/// `(Σ w |u|ᵖ)^{1/p}`, or the weighted-support supremum for infinite `p`.
pub fn lp_norm<T: Real>(u: &[T], weights: &[T], p: f64) -> T {
    if p.is_infinite() {
        return u.iter().zip(weights).filter(|(_, &w)| w > T::zero()).map(|(v, _)| v.abs()).fold(T::zero(), T::max);
    }
    let pt = T::lit(p);
    let s: T = u.iter().zip(weights).map(|(v, &w)| w * v.abs().powf(pt)).sum();
    s.powf(T::one() / pt)
}

/// `∇^*∇Φ − (d^*dΦ + dd^*Φ − Σ_a[F_a·, Φ^a] − Ric(Φ))`, which vanishes in the continuum.
pub fn weitzenbock_defect<T: Real>(geom: &GridGeometry<T>, pair: &GaugePair<T>, ricci: RicciTerm<'_, T>) -> AdForm<T> {
    let (a, phi) = (&pair.a, &pair.phi);
    let rough = ops::connection_laplacian(geom, a, phi, Density::Volume);
    let dd = ops::codiff2(geom, a, &ops::ext_d1(geom, a, phi), Density::Volume);
    let dsd = ops::ext_d0(geom, a, &ops::codiff1(geom, a, phi, Density::Volume));
    let f = ops::curvature(geom, a);
    AdForm::from_fn(geom.n_sites(), |s| {
        let sm = geom.site_metric(s);
        let c = pw::contract(&sm, &f.two(s), &phi.one(s));
        let (r, x, y) = (rough.one(s), dd.one(s), dsd.one(s));
        let mut out: One<T> = std::array::from_fn(|i| r[i] - (x[i] + y[i] - c[i]));
        if let RicciTerm::Sampled(ric) = &ricci {
            let rp = ricci_apply(&sm, &ric.ric[s], &phi.one(s));
            for i in 0..4 {
                out[i] += rp[i];
            }
        }
        out
    })
}

/// `Δ(½|Φ|²) − (⟨Φ, ∇^*∇Φ⟩ − |∇Φ|²)`, which vanishes in the continuum for any `Φ`.
pub fn bochner_defect<T: Real>(geom: &GridGeometry<T>, pair: &GaugePair<T>) -> Vec<T> {
    let half_sq: Vec<T> = pair.phi.pointwise_norm_sq(geom).into_iter().map(|v| v * T::lit(0.5)).collect();
    let lap = ops::scalar_laplacian(geom, &half_sq);
    let rough = ops::connection_laplacian(geom, &pair.a, &pair.phi, Density::Volume);
    (0..geom.n_sites())
        .into_par_iter()
        .map(|s| {
            let sm = geom.site_metric(s);
            let y = ops::cov_grad_at(geom, &pair.a, &pair.phi, s);
            lap[s] - (pw::inner_one(&sm, &pair.phi.one(s), &rough.one(s)) - pw::norm_sq_tensor(&sm, &y))
        })
        .collect()
}

/// `Δ(½|Φ|²)` at every site.
pub fn half_phi_sq_laplacian<T: Real>(geom: &GridGeometry<T>, pair: &GaugePair<T>) -> Vec<T> {
    let half_sq: Vec<T> = pair.phi.pointwise_norm_sq(geom).into_iter().map(|v| v * T::lit(0.5)).collect();
    ops::scalar_laplacian(geom, &half_sq)
}

/// The potential `w` solving `Δw = |∇Φ|² + ½|[Φ∧Φ]|²`, and `h = w + ½|Φ|²`.
pub struct WPotential<T> {
    pub w: Vec<T>,
    pub h: Vec<T>,
    /// `Δh` at every site, in the Green's operator's own discretisation.
    pub laplacian_h: Vec<T>,
    /// `Δ(½|Φ|²)`, the scale against which `Δh` is judged.
    pub laplacian_half_phi_sq: Vec<T>,
}

/// With the source above, `Δh = 0` exactly at solutions of the second-order system
/// on Ricci-flat geometries, and `w ≥ 0` because the Green's operator is positive.
pub fn w_potential<T: Real>(geom: &GridGeometry<T>, pair: &GaugePair<T>, greens: &GreensOperator<'_, T>) -> Result<WPotential<T>> {
    let source: Vec<T> = (0..geom.n_sites())
        .into_par_iter()
        .map(|s| {
            let sm = geom.site_metric(s);
            let y = ops::cov_grad_at(geom, &pair.a, &pair.phi, s);
            let p = pair.phi.one(s);
            let b = pw::wedge_bracket(&p, &p);
            pw::norm_sq_tensor(&sm, &y) + T::lit(0.5) * pw::norm_sq_two(&sm, &b)
        })
        .collect();
    let w = if source.iter().all(|&v| v == T::zero()) {
        vec![T::zero(); geom.n_sites()]
    } else {
        greens.solve(&source)?.solution
    };
    let half_sq: Vec<T> = pair.phi.pointwise_norm_sq(geom).into_iter().map(|v| v * T::lit(0.5)).collect();
    let h: Vec<T> = w.iter().zip(&half_sq).map(|(&a, &b)| a + b).collect();
    let laplacian_h = greens.laplacian(&h);
    let laplacian_half_phi_sq = greens.laplacian(&half_sq);
    Ok(WPotential { w, h, laplacian_h, laplacian_half_phi_sq })
}

/// Statistics of a scalar field over one shell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShellStats<T> {
    pub radius: T,
    pub sup: T,
    pub inf: T,
    pub mean: T,
}

/// Per-shell `(R, sup, inf, mean)`, the mean weighted by cell volume.
pub fn shell_profile<T: Real>(geom: &GridGeometry<T>, field: &[T], shells: &[Shell<T>]) -> Result<Vec<ShellStats<T>>> {
    shells
        .iter()
        .map(|sh| {
            if sh.sites.is_empty() {
                return Err(Error::Shells(format!("shell at R = {} is empty", sh.mid())));
            }
            let mut sup = T::neg_infinity();
            let mut inf = T::infinity();
            let (mut num, mut den) = (T::zero(), T::zero());
            for &s in &sh.sites {
                let v = field[s];
                sup = sup.max(v);
                inf = inf.min(v);
                let w = geom.cell_volume(s);
                num += w * v;
                den += w;
            }
            Ok(ShellStats { radius: sh.mid(), sup, inf, mean: num / den })
        })
        .collect()
}

/// Pointwise algebra behind the passage from the first-order system to
/// the formulas for `d_AΦ` and `F` in terms of `t = tan θ`.
pub mod chain {
    use super::*;
    use crate::geometry::SiteMetric;

    /// Coefficients for one admissible angle: `a = (t⁻¹ − t)/2`, `b = (t⁻¹ + t)/2`.
    #[derive(Clone, Copy, Debug)]
    pub struct TanForm<T> {
        pub t: T,
        pub a: T,
        pub b: T,
    }

    impl<T: Real> TanForm<T> {
        /// Rejects angles with `|sin θ cos θ| < threshold`.
        pub fn new(angle: KwAngle<T>, threshold: T) -> Result<Self> {
            if !(angle.degeneracy() >= threshold) {
                return Err(Error::DegenerateAngle {
                    theta: angle.theta.to_f64_lossy(),
                    value: angle.degeneracy().to_f64_lossy(),
                    threshold: threshold.to_f64_lossy(),
                });
            }
            let t = angle.sin / angle.cos;
            let half = T::lit(0.5);
            Ok(TanForm { t, a: (T::one() / t - t) * half, b: (T::one() / t + t) * half })
        }
    }

    fn lin<T: Real>(x: &Two<T>, p: T, y: &Two<T>, q: T) -> Two<T> {
        std::array::from_fn(|i| x[i] * p + y[i] * q)
    }

    /// `G = F − ½[Φ∧Φ]`.
    pub fn g_of<T: Real>(f: &Two<T>, bracket: &Two<T>) -> Two<T> {
        lin(f, T::one(), bracket, -T::lit(0.5))
    }

    /// Solving the first-order equations for `d_A^±Φ`: `d⁻ = t⁻¹G⁻`, `d⁺ = −tG⁺`.
    pub fn intermediate<T: Real>(sm: &SiteMetric<T>, tf: &TanForm<T>, f: &Two<T>, bracket: &Two<T>) -> (Two<T>, Two<T>) {
        let g = g_of(f, bracket);
        let (gp, gm) = (pw::self_dual(sm, &g), pw::anti_self_dual(sm, &g));
        let dp = gp.map(|v| v * (-tf.t));
        let dm = gm.map(|v| v * (T::one() / tf.t));
        (dp, dm)
    }

    /// Sum of the two projected equations: `d_AΦ = aG − b∗G`.
    pub fn d_phi_from_g<T: Real>(sm: &SiteMetric<T>, tf: &TanForm<T>, g: &Two<T>) -> Two<T> {
        lin(g, tf.a, &pw::star(sm, g), -tf.b)
    }

    /// `((t − t⁻¹)/(t + t⁻¹)) ∗d_AΦ − (2/(t + t⁻¹)) ∗G`, which equals `d_AΦ`.
    pub fn d_phi_from_star<T: Real>(sm: &SiteMetric<T>, tf: &TanForm<T>, dphi: &Two<T>, g: &Two<T>) -> Two<T> {
        let (t, ti) = (tf.t, T::one() / tf.t);
        lin(&pw::star(sm, dphi), (t - ti) / (t + ti), &pw::star(sm, g), -T::lit(2.0) / (t + ti))
    }

    /// `F = ½[Φ∧Φ] + ((t − t⁻¹)/2) d_AΦ − ((t + t⁻¹)/2) ∗d_AΦ`.
    pub fn reconstruct_f<T: Real>(sm: &SiteMetric<T>, tf: &TanForm<T>, dphi: &Two<T>, bracket: &Two<T>) -> Two<T> {
        let half = T::lit(0.5);
        let (t, ti) = (tf.t, T::one() / tf.t);
        let base = lin(dphi, (t - ti) * half, &pw::star(sm, dphi), -(t + ti) * half);
        lin(&base, T::one(), bracket, half)
    }

    /// Worst relative errors of one pass through the chain.
    #[derive(Clone, Copy, Debug, Default, serde::Serialize)]
    pub struct ChainErrors {
        /// `d⁺ + d⁻` against `aG − b∗G`.
        pub d_phi_sum: f64,
        /// `d_AΦ` against its `∗`-form.
        pub d_phi_star: f64,
        /// Reconstructed `F` against the input.
        pub f_round_trip: f64,
        /// First-order residuals of the generated `(F, d_AΦ)`.
        pub residual: f64,
    }

    impl ChainErrors {
        pub fn worst(&self) -> f64 {
            self.d_phi_sum.max(self.d_phi_star).max(self.f_round_trip).max(self.residual)
        }

        fn merge(self, o: Self) -> Self {
            ChainErrors {
                d_phi_sum: self.d_phi_sum.max(o.d_phi_sum),
                d_phi_star: self.d_phi_star.max(o.d_phi_star),
                f_round_trip: self.f_round_trip.max(o.f_round_trip),
                residual: self.residual.max(o.residual),
            }
        }
    }

    fn rel<T: Real>(sm: &SiteMetric<T>, x: &Two<T>, y: &Two<T>, scale: T) -> f64 {
        let d = lin(x, T::one(), y, -T::one());
        (pw::norm_sq_two(sm, &d).sqrt() / scale).to_f64_lossy()
    }

    /// Runs the chain on one sample `(F, Φ)`.
    pub fn check_sample<T: Real>(sm: &SiteMetric<T>, angle: KwAngle<T>, tf: &TanForm<T>, f: &Two<T>, phi: &One<T>) -> ChainErrors {
        let bracket = pw::wedge_bracket(phi, phi);
        let g = g_of(f, &bracket);
        let (dp, dm) = intermediate(sm, tf, f, &bracket);
        let dphi = lin(&dp, T::one(), &dm, T::one());
        let scale = pw::norm_sq_two(sm, f).sqrt().max(pw::norm_sq_two(sm, &dphi).sqrt()).max(T::min_positive_value());
        let via_g = d_phi_from_g(sm, tf, &g);
        let via_star = d_phi_from_star(sm, tf, &dphi, &g);
        let f_back = reconstruct_f(sm, tf, &dphi, &bracket);
        let (gm, gp) = (pw::anti_self_dual(sm, &g), pw::self_dual(sm, &g));
        let (qm, qp) = (pw::anti_self_dual(sm, &dphi), pw::self_dual(sm, &dphi));
        let zero = pw::zero_two::<T>();
        let rm = lin(&gm, angle.cos, &qm, -angle.sin);
        let rp = lin(&gp, angle.sin, &qp, angle.cos);
        ChainErrors {
            d_phi_sum: rel(sm, &dphi, &via_g, scale),
            d_phi_star: rel(sm, &dphi, &via_star, scale),
            f_round_trip: rel(sm, f, &f_back, scale),
            residual: rel(sm, &rm, &zero, scale).max(rel(sm, &rp, &zero, scale)),
        }
    }

    /// Runs the chain on `samples` random draws with coefficients in `[−1, 1]`.
    pub fn verify(angle: KwAngle<f64>, samples: usize, seed: u64, threshold: f64) -> Result<ChainErrors> {
        use rand::{Rng, SeedableRng};
        let tf = TanForm::new(angle, threshold)?;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let sm = SiteMetric::<f64>::euclidean();
        let mut worst = ChainErrors::default();
        let lie = |rng: &mut rand_chacha::ChaCha8Rng| {
            pw::Lie::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        };
        for _ in 0..samples {
            let f: Two<f64> = std::array::from_fn(|_| lie(&mut rng));
            let phi: One<f64> = std::array::from_fn(|_| lie(&mut rng));
            worst = worst.merge(check_sample(&sm, angle, &tf, &f, &phi));
        }
        Ok(worst)
    }
}
