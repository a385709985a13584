//! One module per suite. Each returns reports; files go to the output directory.

mod decay;
mod flow;
mod greens;
mod identities;
mod ricci;
mod volume;

use kwgauge::fields::cell_volumes;
use kwgauge::geometry::{DistanceField, GeometryDescriptor, GridGeometry, RicciField, Shell};
use kwgauge::kw::RicciTerm;

use crate::config::{RicciMode, Suite};
use crate::{CliError, Context, SuiteReport};

pub use flow::FlowOutcome;

pub fn run(ctx: &mut Context, suite: Suite) -> Result<Vec<SuiteReport>, CliError> {
    match suite {
        Suite::Identities => identities::run(ctx).map(|r| vec![r]),
        Suite::Flow => flow::run(ctx).map(|r| vec![r.report]),
        Suite::DecayProfile => decay::run(ctx),
        Suite::Greens => greens::run(ctx).map(|r| vec![r]),
        Suite::VolumeGrowth => volume::run(ctx).map(|r| vec![r]),
        Suite::RicciCheck => ricci::run(ctx).map(|r| vec![r]),
    }
}

pub(crate) fn build(d: &GeometryDescriptor) -> Result<GridGeometry<f64>, CliError> {
    Ok(GridGeometry::new(d)?)
}

/// The sampled Ricci tensor when the configuration asks for it.
pub(crate) fn ricci_field(ctx: &Context, geom: &GridGeometry<f64>) -> Option<RicciField<f64>> {
    let numerical = match ctx.config.ricci {
        RicciMode::Auto => !geom.is_flat(),
        RicciMode::Analytic => false,
        RicciMode::Numerical => true,
    };
    numerical.then(|| kwgauge::geometry::ricci(geom))
}

pub(crate) fn ricci_term(field: &Option<RicciField<f64>>) -> RicciTerm<'_, f64> {
    match field {
        Some(r) => RicciTerm::Sampled(r),
        None => RicciTerm::Zero,
    }
}

/// `(Σ m h⁴ v²)^{1/2}` over every site.
pub(crate) fn volume_norm(geom: &GridGeometry<f64>, v: &[f64]) -> f64 {
    let w = cell_volumes(geom);
    v.iter().zip(&w).map(|(x, w)| w * x * x).sum::<f64>().sqrt()
}

pub(crate) fn shells(ctx: &Context, geom: &GridGeometry<f64>, df: &DistanceField<f64>) -> Result<Vec<Shell<f64>>, CliError> {
    let width = ctx.config.shell_width.unwrap_or(2.0 * geom.max_spacing());
    Ok(kwgauge::geometry::shell_decompose(geom, df, width)?)
}

/// Largest change of `v` across one lattice edge at any of `sites`.
pub(crate) fn cell_variation(geom: &GridGeometry<f64>, v: &[f64], sites: impl Iterator<Item = usize>) -> f64 {
    let mut worst = 0.0f64;
    for s in sites {
        for a in 0..4 {
            for fwd in [false, true] {
                if let Some(t) = geom.neighbor(s, a, fwd) {
                    worst = worst.max((v[s] - v[t]).abs());
                }
            }
        }
    }
    worst
}

/// Least-squares slope of `log y` against `log x`.
pub(crate) fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Ratio checks for a refinement sequence of defects.
pub(crate) fn ratio_verdicts(report: &mut SuiteReport, tag: &str, what: &str, defects: &[f64], window: [f64; 2]) {
    if defects.iter().all(|&d| d == 0.0) {
        report.push(crate::Verdict::new(tag, what, true, 0.0, 0.0, "identically zero at every resolution"));
        return;
    }
    for (i, w) in defects.windows(2).enumerate() {
        let r = w[0] / w[1];
        let pass = r >= window[0] && r <= window[1];
        let detail = format!("refinement {}→{} (window [{:.3}, {:.3}])", i, i + 1, window[0], window[1]);
        report.push(crate::Verdict::new(tag, &format!("{what} ratio"), pass, r, window[1], detail));
    }
}
