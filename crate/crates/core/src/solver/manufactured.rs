use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::pointwise::{Lie, One};
use crate::fields::{AdForm, GaugePair};
use crate::geometry::GridGeometry;
use crate::Real;

/// Band-limited random fields, zero on Dirichlet boundary layers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomSmooth {
    pub seed: u64,
    /// Scale of the raw coefficients (ignored when `target_energy` is set).
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// Highest wave number per axis.
    #[serde(default = "default_bandlimit")]
    pub bandlimit: usize,
    /// Width of a Gaussian envelope about the origin on truncated axes.
    #[serde(default)]
    pub envelope: Option<f64>,
    /// Draw a random connection too; otherwise `A = 0`.
    #[serde(default = "default_true")]
    pub connection: bool,
    /// Rescale the pair so that its energy is this value.
    #[serde(default)]
    pub target_energy: Option<f64>,
}

fn default_amplitude() -> f64 {
    0.1
}
fn default_bandlimit() -> usize {
    2
}
fn default_true() -> bool {
    true
}

impl RandomSmooth {
    pub fn new(seed: u64) -> Self {
        RandomSmooth {
            seed,
            amplitude: default_amplitude(),
            bandlimit: default_bandlimit(),
            envelope: None,
            connection: true,
            target_energy: None,
        }
    }
}

/// Named configurations with known structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Manufactured {
    Vacuum,
    /// Charge-one instanton in regular gauge (`anti` flips to the anti-instanton), `Φ = 0`.
    Bpst {
        rho: f64,
        #[serde(default)]
        center: [f64; 4],
        #[serde(default)]
        anti: bool,
    },
    /// `A = 0`, `Φ = magnitude · τ_generator dx^direction`.
    FlatParallel { direction: usize, generator: usize, magnitude: f64 },
    RandomSmooth(RandomSmooth),
}

/// 't Hooft symbol `η_{aμν}`; `anti` gives `η̄`.
pub fn thooft_eta(anti: bool, a: usize, mu: usize, nu: usize) -> f64 {
    let eps3 = |i: usize, j: usize, k: usize| -> f64 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    };
    let sign = if anti { -1.0 } else { 1.0 };
    match (mu, nu) {
        (3, 3) => 0.0,
        (m, 3) => sign * if m == a { 1.0 } else { 0.0 },
        (3, n) => -sign * if n == a { 1.0 } else { 0.0 },
        (m, n) => eps3(a, m, n),
    }
}

/// BPST potential `A_μ = 2 η_{aμν} y^ν/(|y|² + ρ²) τ_a`, `y = x − centre`.
pub fn bpst_potential(rho: f64, center: [f64; 4], anti: bool, x: [f64; 4]) -> [[f64; 3]; 4] {
    let y: [f64; 4] = std::array::from_fn(|i| x[i] - center[i]);
    let q = y.iter().map(|v| v * v).sum::<f64>() + rho * rho;
    std::array::from_fn(|mu| {
        std::array::from_fn(|a| (0..4).map(|nu| 2.0 * thooft_eta(anti, a, mu, nu) * y[nu]).sum::<f64>() / q)
    })
}

/// Closed-form BPST curvature `F^a_{μν} = −4 η_{aμν} ρ²/(|y|² + ρ²)²` in pair order.
pub fn bpst_curvature(rho: f64, center: [f64; 4], anti: bool, x: [f64; 4]) -> [[f64; 3]; 6] {
    let y2: f64 = (0..4).map(|i| (x[i] - center[i]).powi(2)).sum();
    let k = -4.0 * rho * rho / (y2 + rho * rho).powi(2);
    std::array::from_fn(|i| {
        let (mu, nu) = crate::geometry::PAIRS[i];
        std::array::from_fn(|a| k * thooft_eta(anti, a, mu, nu))
    })
}

/// Samples a manufactured configuration on the grid.
pub fn manufacture<T: Real>(geom: &GridGeometry<T>, kind: &Manufactured) -> Result<GaugePair<T>> {
    let n = geom.n_sites();
    match kind {
        Manufactured::Vacuum => Ok(GaugePair::zeros(n)),
        Manufactured::Bpst { rho, center, anti } => {
            if geom.periodic().iter().any(|&p| p) {
                return Err(Error::Manufactured(
                    "the instanton profile needs an ℝ⁴ chart; this geometry has periodic axes".into(),
                ));
            }
            if !(*rho > 0.0) {
                return Err(Error::Manufactured(format!("instanton scale must be positive (got {rho})")));
            }
            let a = AdForm::from_fn(n, |s| {
                let x = geom.position(s).map(|v| v.to_f64_lossy());
                let p = bpst_potential(*rho, *center, *anti, x);
                let out: One<T> = p.map(|c| Lie::new(T::lit(c[0]), T::lit(c[1]), T::lit(c[2])));
                out
            });
            Ok(GaugePair { a, phi: AdForm::zeros(1, n) })
        }
        Manufactured::FlatParallel { direction, generator, magnitude } => {
            if *direction > 3 || *generator > 2 {
                return Err(Error::Manufactured(format!(
                    "direction must be < 4 and generator < 3 (got {direction}, {generator})"
                )));
            }
            let mut phi = AdForm::zeros(1, n);
            let v = Lie::basis(*generator) * T::lit(*magnitude);
            for s in 0..n {
                phi.set(s, *direction, v);
            }
            Ok(GaugePair { a: AdForm::zeros(1, n), phi })
        }
        Manufactured::RandomSmooth(spec) => random_smooth(geom, spec),
    }
}

/// Per-axis basis table `[mode][site]`: Fourier modes on periodic axes, sine
/// modes vanishing on both faces of truncated axes.
fn axis_basis<T: Real>(geom: &GridGeometry<T>, axis: usize, k: usize) -> Vec<Vec<f64>> {
    let nsites = geom.dims()[axis];
    let h = geom.spacing()[axis].to_f64_lossy();
    let tau = std::f64::consts::TAU;
    if geom.periodic()[axis] {
        let period = h * nsites as f64;
        let mut rows = vec![vec![1.0; nsites]];
        for j in 1..=k {
            let w = tau * j as f64 / period;
            rows.push((0..nsites).map(|i| (w * i as f64 * h).cos()).collect());
            rows.push((0..nsites).map(|i| (w * i as f64 * h).sin()).collect());
        }
        rows
    } else {
        let side = h * (nsites + 1) as f64;
        (1..=k)
            .map(|j| {
                let w = std::f64::consts::PI * j as f64 / side;
                (0..nsites).map(|i| (w * (i + 1) as f64 * h).sin()).collect()
            })
            .collect()
    }
}

/// Contracts a coefficient tensor `c[k0][k1][k2][k3]` with the per-axis bases.
fn synthesize(basis: &[Vec<Vec<f64>>; 4], coeff: &[f64]) -> Vec<f64> {
    let mut shape: [usize; 4] = std::array::from_fn(|a| basis[a].len());
    let mut cur = coeff.to_vec();
    for axis in 0..4 {
        let m = shape[axis];
        let nsites = basis[axis][0].len();
        let outer: usize = shape[..axis].iter().product();
        let inner: usize = shape[axis + 1..].iter().product();
        let mut next = vec![0.0; outer * nsites * inner];
        for o in 0..outer {
            for k in 0..m {
                let src = &cur[(o * m + k) * inner..(o * m + k + 1) * inner];
                for (i, &b) in basis[axis][k].iter().enumerate() {
                    if b == 0.0 {
                        continue;
                    }
                    let dst = &mut next[(o * nsites + i) * inner..(o * nsites + i + 1) * inner];
                    for (d, &s) in dst.iter_mut().zip(src) {
                        *d += b * s;
                    }
                }
            }
        }
        shape[axis] = nsites;
        cur = next;
    }
    cur
}

fn random_smooth<T: Real>(geom: &GridGeometry<T>, spec: &RandomSmooth) -> Result<GaugePair<T>> {
    if spec.bandlimit == 0 {
        return Err(Error::Manufactured("band limit must be at least 1".into()));
    }
    let n = geom.n_sites();
    let basis: [Vec<Vec<f64>>; 4] = std::array::from_fn(|a| axis_basis(geom, a, spec.bandlimit));
    let modes: Vec<[usize; 4]> = {
        let m: [usize; 4] = std::array::from_fn(|a| basis[a].len());
        let mut v = Vec::new();
        for i in 0..m[0] {
            for j in 0..m[1] {
                for k in 0..m[2] {
                    for l in 0..m[3] {
                        v.push([i, j, k, l]);
                    }
                }
            }
        }
        v
    };
    // Wave number of a mode index: periodic index 2j−1, 2j ↦ j; sine index i ↦ i+1.
    let wave = |a: usize, i: usize| if geom.periodic()[a] { (i + 1) / 2 } else { i + 1 } as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let envelope: Option<Vec<f64>> = spec.envelope.map(|sigma| {
        (0..n)
            .map(|s| {
                let x = geom.position(s);
                let r2: f64 = (0..4).filter(|&a| !geom.periodic()[a]).map(|a| x[a].to_f64_lossy().powi(2)).sum();
                (-r2 / (2.0 * sigma * sigma)).exp()
            })
            .collect()
    });
    let norm = (modes.len() as f64).sqrt();
    let mut channel = || {
        let coeff: Vec<f64> = modes
            .iter()
            .map(|k| {
                let k2: f64 = (0..4).map(|a| wave(a, k[a]).powi(2)).sum();
                rng.gen_range(-1.0..1.0) / (1.0 + k2) * spec.amplitude * 4.0 / norm
            })
            .collect();
        let mut v = synthesize(&basis, &coeff);
        if let Some(env) = &envelope {
            for (x, e) in v.iter_mut().zip(env) {
                *x *= e;
            }
        }
        v
    };
    let mut build = |active: bool| -> AdForm<T> {
        let mut chans: Vec<Vec<f64>> = Vec::with_capacity(12);
        for _ in 0..12 {
            let c = channel();
            chans.push(if active { c } else { vec![0.0; n] });
        }
        AdForm::from_fn(n, |s| {
            if geom.is_boundary_layer(s) {
                return crate::fields::pointwise::zero_one();
            }
            let out: One<T> = std::array::from_fn(|c| {
                Lie::new(T::lit(chans[3 * c][s]), T::lit(chans[3 * c + 1][s]), T::lit(chans[3 * c + 2][s]))
            });
            out
        })
    };
    let phi = build(true);
    let a = build(spec.connection);
    let mut pair = GaugePair { a, phi };
    if let Some(target) = spec.target_energy {
        if !(target > 0.0) {
            return Err(Error::Manufactured(format!("target energy must be positive (got {target})")));
        }
        pair = rescale_to_energy(geom, &pair, T::lit(target));
    }
    Ok(pair)
}

/// Scales both fields by a common factor so that the energy hits `target`.
pub fn rescale_to_energy<T: Real>(geom: &GridGeometry<T>, pair: &GaugePair<T>, target: T) -> GaugePair<T> {
    let mut lambda = T::one();
    let mut scaled = pair.clone();
    for _ in 0..12 {
        let e = crate::kw::energy(geom, &scaled);
        if e == T::zero() {
            break;
        }
        lambda *= (target / e).sqrt();
        scaled = pair.clone();
        scaled.a.scale(lambda);
        scaled.phi.scale(lambda);
    }
    scaled
}
