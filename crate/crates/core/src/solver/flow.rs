use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use super::gradient::{directional_derivative, energy_gradient};
use crate::fields::GaugePair;
use crate::geometry::GridGeometry;
use crate::kw::energy;
use crate::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowOptions {
    pub max_iterations: usize,
    /// Stop once `‖∇E‖_{L²}` falls to this value.
    pub grad_tolerance: f64,
    pub initial_step: f64,
    /// The line search gives up below this step.
    pub min_step: f64,
    /// Step multiplier after an accepted iteration.
    pub growth: f64,
    /// Compare the gradient with a finite-difference derivative every this many iterations.
    pub fd_check_every: Option<usize>,
    pub fd_seed: u64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            max_iterations: 5000,
            grad_tolerance: 1e-6,
            initial_step: 0.05,
            min_step: 1e-14,
            growth: 1.1,
            fd_check_every: None,
            fd_seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Tolerance,
    MaxIter,
    Stall,
}

/// One accepted iteration (iteration 0 is the initial state).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowRecord {
    pub iteration: usize,
    pub energy: f64,
    pub grad_norm: f64,
    pub step: f64,
}

pub struct FlowState<T> {
    pub pair: GaugePair<T>,
    pub history: Vec<FlowRecord>,
    pub step: T,
    pub grad_norm: T,
    pub iterations: usize,
    pub stop: StopReason,
    /// `(iteration, relative error)` of each finite-difference gradient check.
    pub fd_checks: Vec<(usize, f64)>,
}

impl<T: Real> FlowState<T> {
    pub fn initial_energy(&self) -> f64 {
        self.history[0].energy
    }

    pub fn final_energy(&self) -> f64 {
        self.history.last().expect("history starts with the initial state").energy
    }

    /// Whether the recorded energies never increase.
    pub fn is_monotone(&self) -> bool {
        self.history.windows(2).all(|w| w[1].energy <= w[0].energy)
    }
}

/// Relative disagreement between `⟨∇E, v⟩` and a central difference along a
/// random direction `v` of the same shape as the gradient.
pub fn gradient_check<T: Real>(geom: &GridGeometry<T>, pair: &GaugePair<T>, grad: &GaugePair<T>, seed: u64, step: T) -> f64 {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let dir = random_direction(geom, pair.n_sites(), &mut rng);
    let fd = directional_derivative(geom, pair, &dir, step).to_f64_lossy();
    let an = grad.l2_inner(geom, &dir).expect("same shape").to_f64_lossy();
    (fd - an).abs() / an.abs().max(fd.abs()).max(f64::MIN_POSITIVE)
}

/// A random perturbation supported away from the frozen boundary layer.
pub fn random_direction<T: Real>(geom: &GridGeometry<T>, n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> GaugePair<T> {
    use crate::fields::pointwise::Lie;
    use rand::Rng;
    let mut dir = GaugePair::zeros(n);
    for s in 0..n {
        if geom.is_boundary_layer(s) {
            continue;
        }
        for c in 0..4 {
            let mut draw = || Lie::new(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0)));
            dir.a.set(s, c, draw());
            dir.phi.set(s, c, draw());
        }
    }
    dir
}

/// Gradient descent on the energy with a backtracking line search: the step
/// is halved until the energy strictly decreases and grown after each acceptance.
pub fn flow<T: Real>(geom: &GridGeometry<T>, initial: GaugePair<T>, opts: &FlowOptions) -> FlowState<T> {
    let mut pair = initial;
    let mut e = energy(geom, &pair);
    let mut grad = energy_gradient(geom, &pair);
    let mut gn = grad.l2_norm(geom);
    let mut step = T::lit(opts.initial_step);
    let min_step = T::lit(opts.min_step);
    let growth = T::lit(opts.growth);
    let tol = T::lit(opts.grad_tolerance);
    let mut history =
        vec![FlowRecord { iteration: 0, energy: e.to_f64_lossy(), grad_norm: gn.to_f64_lossy(), step: 0.0 }];
    let mut fd_checks = Vec::new();
    let mut it = 0;
    let stop = loop {
        if let Some(every) = opts.fd_check_every {
            if every > 0 && it % every == 0 && gn > T::zero() {
                let seed = opts.fd_seed.wrapping_add(it as u64);
                fd_checks.push((it, gradient_check(geom, &pair, &grad, seed, T::lit(1e-5))));
            }
        }
        if gn <= tol {
            break StopReason::Tolerance;
        }
        if it >= opts.max_iterations {
            break StopReason::MaxIter;
        }
        let accepted = loop {
            let mut trial = pair.clone();
            trial.axpy(-step, &grad).expect("same shape");
            let et = energy(geom, &trial);
            if et < e && et.is_finite() {
                break Some((trial, et));
            }
            step /= T::lit(2.0);
            if step < min_step {
                break None;
            }
        };
        let Some((trial, et)) = accepted else { break StopReason::Stall };
        it += 1;
        pair = trial;
        e = et;
        grad = energy_gradient(geom, &pair);
        gn = grad.l2_norm(geom);
        history.push(FlowRecord {
            iteration: it,
            energy: e.to_f64_lossy(),
            grad_norm: gn.to_f64_lossy(),
            step: step.to_f64_lossy(),
        });
        step *= growth;
    };
    FlowState { pair, history, step, grad_norm: gn, iterations: it, stop, fd_checks }
}
