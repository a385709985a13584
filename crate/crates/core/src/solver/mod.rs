//! Energy descent and manufactured configurations.

mod flow;
mod gradient;
mod manufactured;

pub use flow::{flow, gradient_check, random_direction, FlowOptions, FlowRecord, FlowState, StopReason};
pub use gradient::{directional_derivative, energy_gradient};
pub use manufactured::{
    bpst_curvature, bpst_potential, manufacture, rescale_to_energy, thooft_eta, Manufactured, RandomSmooth,
};
