//! Experiment configuration read from a TOML file.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use kwgauge::geometry::GeometryDescriptor;
use kwgauge::solver::{FlowOptions, Manufactured, RandomSmooth};
use serde::Deserialize;

use crate::CliError;

/// One experiment: a geometry, initial data, and the suites to run on them.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// Overrides the seed of random initial data.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Multiplies every check tolerance.
    #[serde(default = "one")]
    pub tolerance_scale: f64,
    /// Below this value of `|sin θ cos θ|` the first-order algebra is refused.
    #[serde(default = "default_degeneracy")]
    pub degeneracy_threshold: f64,
    #[serde(default = "default_p_list")]
    pub p_list: Vec<f64>,
    /// Width of distance shells; twice the largest grid spacing when absent.
    #[serde(default)]
    pub shell_width: Option<f64>,
    #[serde(default)]
    pub ricci: RicciMode,
    /// Suites executed by `run`, in order.
    #[serde(default)]
    pub suites: Vec<Suite>,
    #[serde(default = "default_geometry")]
    pub geometry: GeometryDescriptor,
    #[serde(default = "default_initial")]
    pub initial: Manufactured,
    #[serde(default)]
    pub flow: FlowConfig,
    #[serde(default)]
    pub identities: IdentitiesConfig,
    #[serde(default)]
    pub decay: DecayConfig,
    #[serde(default)]
    pub greens: GreensConfig,
    #[serde(default)]
    pub volume: VolumeConfig,
    #[serde(default)]
    pub ricci_check: RicciCheckConfig,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RicciMode {
    /// Zero on flat models, the sampled tensor on curved ones.
    #[default]
    Auto,
    Analytic,
    Numerical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Identities,
    Flow,
    DecayProfile,
    Greens,
    VolumeGrowth,
    RicciCheck,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Flow => "flow",
            Suite::DecayProfile => "decay-profile",
            Suite::Greens => "greens",
            Suite::VolumeGrowth => "volume-growth",
            Suite::RicciCheck => "ricci-check",
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
pub struct FlowConfig {
    #[serde(flatten)]
    pub options: FlowOptions,
    /// Require `E_final ≤ energy_ratio · E_initial`.
    #[serde(default)]
    pub energy_ratio: Option<f64>,
    /// Require `‖∇Φ‖` and `‖[Φ∧Φ]‖` below this multiple of `√E_initial`.
    #[serde(default)]
    pub vanishing: Option<f64>,
    /// Compare the initial energy with a known value.
    #[serde(default)]
    pub expected_energy: Option<ExpectedEnergy>,
    /// Treat stopping short of `grad_tolerance` as a failure to converge.
    #[serde(default = "yes")]
    pub require_convergence: bool,
    /// Write the final pair as binary snapshots.
    #[serde(default = "yes")]
    pub snapshots: bool,
    /// Record the first- and second-order residuals before and after.
    #[serde(default = "yes")]
    pub residuals: bool,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            options: FlowOptions::default(),
            energy_ratio: None,
            vanishing: None,
            expected_energy: None,
            require_convergence: true,
            snapshots: true,
            residuals: true,
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedEnergy {
    pub value: f64,
    pub rel_tol: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesConfig {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_angles")]
    pub angles: Vec<f64>,
    #[serde(default = "default_chain_tol")]
    pub tolerance: f64,
    /// Refinement studies of the discrete identities.
    #[serde(default)]
    pub refinement: Vec<Refinement>,
}

impl Default for IdentitiesConfig {
    fn default() -> Self {
        IdentitiesConfig {
            samples: default_samples(),
            angles: default_angles(),
            tolerance: default_chain_tol(),
            refinement: Vec::new(),
        }
    }
}

/// A family of grids with halving spacing; consecutive defects must shrink
/// by a factor inside `window`.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "study", rename_all = "snake_case", deny_unknown_fields)]
pub enum Refinement {
    /// Second-order system on an instanton sampled on nested boxes that keep
    /// a fixed `region` (half-width) in view.
    Instanton {
        rho: f64,
        spacings: Vec<f64>,
        region: f64,
        #[serde(default = "default_window")]
        window: [f64; 2],
    },
    /// Weitzenböck defect of random band-limited fields on `T⁴` of these sizes.
    Weitzenbock {
        grids: Vec<usize>,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default = "default_window")]
        window: [f64; 2],
    },
    /// Bochner defect of `½|Φ|²` for random band-limited fields on `T⁴`.
    Bochner {
        grids: Vec<usize>,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default = "default_window")]
        window: [f64; 2],
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    /// Directory holding `a.kwfs` and `phi.kwfs` from an earlier flow; the
    /// configured flow is run first when absent.
    #[serde(default)]
    pub snapshot_dir: Option<PathBuf>,
    /// Bound on `max Δ(½|Φ|²)` per shell as a multiple of the first-order residual norm.
    #[serde(default = "default_subharmonic_factor")]
    pub subharmonic_factor: f64,
    /// Solve for the potential `w` and report how far `h = w + ½|Φ|²` is from harmonic.
    #[serde(default = "yes")]
    pub w_potential: bool,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig { snapshot_dir: None, subharmonic_factor: default_subharmonic_factor(), w_potential: true }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreensConfig {
    #[serde(default = "default_cg_tol")]
    pub tolerance: f64,
    #[serde(default = "default_cg_iter")]
    pub max_iterations: usize,
    /// Mid-range window `[a, b]` for the flat-space constant, `a` in grid spacings
    /// and `b` as a fraction of the inscribed radius.
    #[serde(default = "default_mid_range")]
    pub mid_range: [f64; 2],
    #[serde(default = "default_flat_rel_tol")]
    pub flat_rel_tol: f64,
    /// Largest admissible log-log slope of the shell supremum of `dist²G/(1+dist^k)`.
    #[serde(default = "default_max_slope")]
    pub max_slope: f64,
}

impl Default for GreensConfig {
    fn default() -> Self {
        GreensConfig {
            tolerance: default_cg_tol(),
            max_iterations: default_cg_iter(),
            mid_range: default_mid_range(),
            flat_rel_tol: default_flat_rel_tol(),
            max_slope: default_max_slope(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumeConfig {
    #[serde(default = "default_radii")]
    pub radii: usize,
    /// Smallest radius; two grid spacings when absent.
    #[serde(default)]
    pub r_min: Option<f64>,
    /// Largest radius; the inscribed radius when absent.
    #[serde(default)]
    pub r_max: Option<f64>,
    /// Radius window for the growth exponent; the outer half of the radii when absent.
    #[serde(default)]
    pub fit_window: Option<[f64; 2]>,
    #[serde(default = "default_exponent_tol")]
    pub exponent_tol: f64,
}

impl Default for VolumeConfig {
    fn default() -> Self {
        VolumeConfig { radii: default_radii(), r_min: None, r_max: None, fit_window: None, exponent_tol: default_exponent_tol() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RicciCheckConfig {
    /// Site counts `n` of the refinement family; each `n + 1` must divide the next.
    /// The configured geometry alone when empty.
    #[serde(default)]
    pub grids: Vec<usize>,
    /// Only sites farther than this from every centre are sampled.
    #[serde(default = "default_exclusion")]
    pub exclusion_radius: f64,
    /// Sample only `z > 0`, the side of each centre without the Dirac string.
    #[serde(default = "yes")]
    pub upper_half: bool,
    #[serde(default = "default_window")]
    pub window: [f64; 2],
}

impl Default for RicciCheckConfig {
    fn default() -> Self {
        RicciCheckConfig { grids: Vec::new(), exclusion_radius: default_exclusion(), upper_half: true, window: default_window() }
    }
}

fn default_name() -> String {
    "experiment".into()
}
fn default_theta() -> f64 {
    PI / 4.0
}
fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn default_degeneracy() -> f64 {
    1e-8
}
fn default_p_list() -> Vec<f64> {
    vec![1.0, 2.0, f64::INFINITY]
}
fn default_geometry() -> GeometryDescriptor {
    GeometryDescriptor::FlatTorus4 { side: 2.0 * PI, n: 8 }
}
fn default_initial() -> Manufactured {
    Manufactured::RandomSmooth(RandomSmooth { target_energy: Some(1.0), ..RandomSmooth::new(0) })
}
fn default_samples() -> usize {
    10_000
}
fn default_angles() -> Vec<f64> {
    vec![PI / 6.0, PI / 4.0, PI / 3.0, 3.0 * PI / 8.0]
}
fn default_chain_tol() -> f64 {
    1e-12
}
fn default_window() -> [f64; 2] {
    [3.5, 4.5]
}
fn default_amplitude() -> f64 {
    0.5
}
fn default_subharmonic_factor() -> f64 {
    10.0
}
fn default_cg_tol() -> f64 {
    1e-10
}
fn default_cg_iter() -> usize {
    20_000
}
fn default_mid_range() -> [f64; 2] {
    [3.0, 0.25]
}
fn default_flat_rel_tol() -> f64 {
    0.05
}
fn default_max_slope() -> f64 {
    0.1
}
fn default_radii() -> usize {
    24
}
fn default_exponent_tol() -> f64 {
    0.15
}
fn default_exclusion() -> f64 {
    1.5
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        toml::from_str("").expect("every field has a default")
    }
}

impl ExperimentConfig {
    /// Parse and validate a config file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: cannot read: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, why: &str| Err(CliError::Config(format!("field `{field}`: {why}")));
        if !self.theta.is_finite() {
            return bad("theta", "must be a finite real number");
        }
        if !(self.tolerance_scale.is_finite() && self.tolerance_scale > 0.0) {
            return bad("tolerance_scale", "must be positive");
        }
        if !(self.degeneracy_threshold >= 0.0) {
            return bad("degeneracy_threshold", "must be non-negative");
        }
        if self.p_list.iter().any(|&p| !(p >= 1.0)) {
            return bad("p_list", "every exponent must be at least 1");
        }
        if let Some(w) = self.shell_width {
            if !(w.is_finite() && w > 0.0) {
                return bad("shell_width", "must be positive");
            }
        }
        if self.identities.angles.iter().any(|t| !t.is_finite()) {
            return bad("identities.angles", "angles must be finite");
        }
        if self.identities.samples == 0 {
            return bad("identities.samples", "must be positive");
        }
        for r in &self.identities.refinement {
            let (len, window) = match r {
                Refinement::Instanton { spacings, window, rho, region } => {
                    if !(*rho > 0.0 && *region > 0.0) || spacings.iter().any(|&h| !(h > 0.0)) {
                        return bad("identities.refinement", "instanton scale, region and spacings must be positive");
                    }
                    (spacings.len(), window)
                }
                Refinement::Weitzenbock { grids, window, .. } | Refinement::Bochner { grids, window, .. } => {
                    if grids.windows(2).any(|w| w[1] != 2 * w[0]) {
                        return bad("identities.refinement", "torus grids must double at each step");
                    }
                    (grids.len(), window)
                }
            };
            if len < 2 {
                return bad("identities.refinement", "a refinement study needs at least two grids");
            }
            if !(window[0] < window[1]) {
                return bad("identities.refinement.window", "must be an increasing pair");
            }
        }
        let f = &self.flow.options;
        if !(f.initial_step > 0.0 && f.growth >= 1.0 && f.min_step > 0.0 && f.grad_tolerance >= 0.0) {
            return bad("flow", "steps must be positive, growth at least 1 and the tolerance non-negative");
        }
        if let Some(v) = self.volume.fit_window {
            if !(v[0] > 0.0 && v[0] < v[1]) {
                return bad("volume.fit_window", "must be an increasing pair of positive radii");
            }
        }
        if self.volume.radii < 2 {
            return bad("volume.radii", "need at least two radii");
        }
        let g = &self.ricci_check.grids;
        if g.windows(2).any(|w| w[0] == 0 || (w[1] + 1) % (w[0] + 1) != 0 || w[1] <= w[0]) {
            return bad("ricci_check.grids", "each n + 1 must divide the next");
        }
        Ok(())
    }

    /// Initial data with the global seed override applied.
    pub fn initial_data(&self) -> Manufactured {
        match (&self.initial, self.seed) {
            (Manufactured::RandomSmooth(r), Some(seed)) => Manufactured::RandomSmooth(RandomSmooth { seed, ..r.clone() }),
            (m, _) => m.clone(),
        }
    }
}
