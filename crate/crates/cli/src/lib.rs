//! Configured experiment runner: each suite reads an [`ExperimentConfig`],
//! writes CSV and JSON outputs, and returns verdicts.

pub mod config;
pub mod report;
pub mod suites;
pub mod tags;

use std::path::PathBuf;

use kwgauge::fields::GaugePair;
use kwgauge::geometry::GeometryDescriptor;
use thiserror::Error;

pub use config::{ExperimentConfig, Suite};
pub use report::{SuiteReport, Verdict};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("did not converge: {0}")]
    NotConverged(String),
    #[error("output error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::NotConverged(_) => 3,
        }
    }
}

/// Library errors raised while setting up a run are configuration errors;
/// a Poisson solve that stalls is a convergence failure.
impl From<kwgauge::Error> for CliError {
    fn from(e: kwgauge::Error) -> Self {
        match e {
            kwgauge::Error::NotConverged { .. } => CliError::NotConverged(e.to_string()),
            kwgauge::Error::Io(_) | kwgauge::Error::Json(_) | kwgauge::Error::Snapshot(_) => CliError::Io(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

/// State shared by the suites of one invocation.
pub struct Context {
    pub config: ExperimentConfig,
    pub out: PathBuf,
    /// Final pair of the last flow, reused by a following decay profile.
    pub flowed: Option<GaugePair<f64>>,
}

impl Context {
    pub fn new(config: ExperimentConfig, out: PathBuf) -> Result<Self, CliError> {
        std::fs::create_dir_all(&out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
        Ok(Context { config, out, flowed: None })
    }

    /// A check tolerance after the global scale is applied.
    pub fn tol(&self, t: f64) -> f64 {
        t * self.config.tolerance_scale
    }

    /// A ratio window widened or narrowed about its centre by the global scale.
    pub fn window(&self, w: [f64; 2]) -> [f64; 2] {
        let (c, r) = ((w[0] + w[1]) / 2.0, (w[1] - w[0]) / 2.0 * self.config.tolerance_scale);
        [c - r, c + r]
    }

    pub fn seed(&self, default: u64) -> u64 {
        self.config.seed.unwrap_or(default)
    }
}

/// Run the suites in order, stopping at the first hard error.
pub fn run_suites(ctx: &mut Context, suites: &[Suite]) -> Result<Vec<SuiteReport>, CliError> {
    let mut reports = Vec::new();
    for &s in suites {
        let mut r = suites::run(ctx, s)?;
        for rep in &mut r {
            rep.write(&ctx.out)?;
        }
        reports.extend(r);
    }
    Ok(reports)
}

/// `0` when every check passed, `3` when a solver stopped short, `1` otherwise.
pub fn exit_code(reports: &[SuiteReport]) -> i32 {
    if reports.iter().any(|r| r.not_converged.is_some()) {
        3
    } else if reports.iter().all(|r| r.passed()) {
        0
    } else {
        1
    }
}

/// The same geometry with `n` sites along each truncated or long axis.
pub fn with_resolution(d: &GeometryDescriptor, n_new: usize) -> GeometryDescriptor {
    let mut d = d.clone();
    match &mut d {
        GeometryDescriptor::FlatTorus4 { n, .. }
        | GeometryDescriptor::EuclideanBall4 { n, .. }
        | GeometryDescriptor::R3xS1 { n, .. }
        | GeometryDescriptor::GibbonsHawking { n, .. }
        | GeometryDescriptor::RoundSpherePatch { n, .. } => *n = n_new,
    }
    d
}
