//! Labels attached to verdicts and residual records.

pub const R_MINUS: &str = "1.5a";
pub const R_PLUS: &str = "1.5b";
pub const GAUGE: &str = "1.5c";
pub const SO_PHI: &str = "2.2a";
pub const SO_F: &str = "2.2b";
pub const RESIDUALS: [&str; 5] = [R_MINUS, R_PLUS, GAUGE, SO_PHI, SO_F];

pub const CHAIN: &str = "2.1";
pub const WEITZENBOCK: &str = "Phi_Weitzenbock";
pub const BOCHNER: &str = "5";
pub const ENERGY: &str = "1.9";
pub const VANISHING: &str = "B";
pub const DECAY: &str = "3.1";
pub const PHI_LIMITS: &str = "Phi_limits";
pub const W_POTENTIAL: &str = "w_def";
pub const BISHOP_GROMOV: &str = "4.2";
pub const GREEN: &str = "4.3";
pub const RICCI_FLAT: &str = "1.2";
