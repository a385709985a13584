//! Ricci tensor of the sampled metric under refinement.

use kwgauge::geometry::{ricci, GeometryDescriptor, GridGeometry};

use super::{build, ratio_verdicts};
use crate::report::Csv;
use crate::{tags, with_resolution, CliError, Context, SuiteReport, Verdict};

/// Sites of `geom` that coincide with sites of the coarsest grid lying at
/// least two layers inside it, away from the centres and their strings.
fn sample(ctx: &Context, geom: &GridGeometry<f64>, coarse_n: usize) -> Vec<usize> {
    let cfg = &ctx.config.ricci_check;
    let centers: Vec<[f64; 3]> = match geom.descriptor() {
        GeometryDescriptor::GibbonsHawking { centers, .. } => centers.iter().map(|c| c.position).collect(),
        _ => Vec::new(),
    };
    let n = geom.dims()[0];
    let stride = (n + 1) / (coarse_n + 1);
    let top = centers.iter().map(|c| c[2]).fold(f64::NEG_INFINITY, f64::max);
    let h = geom.spacing()[0];
    (0..geom.n_sites())
        .filter(|&s| {
            let c = geom.coords(s);
            let x = geom.position(s);
            let truncated = (0..4).filter(|&a| !geom.periodic()[a]);
            if !truncated.clone().all(|a| (c[a] + 1) % stride == 0) {
                return false;
            }
            let depth = truncated.map(|a| ((c[a] + 1) / stride).min(coarse_n + 1 - (c[a] + 1) / stride) - 1).min().unwrap_or(usize::MAX);
            let far = centers.iter().all(|p| {
                let d = ((x[0] - p[0]).powi(2) + (x[1] - p[1]).powi(2) + (x[2] - p[2]).powi(2)).sqrt();
                d > cfg.exclusion_radius
            });
            let side = !cfg.upper_half || centers.is_empty() || x[2] > top + h / 2.0;
            depth >= 2 && far && side
        })
        .collect()
}

pub fn run(ctx: &mut Context) -> Result<SuiteReport, CliError> {
    let mut rep = SuiteReport::new("ricci-check");
    let base = ctx.config.geometry.clone();
    let grids = if ctx.config.ricci_check.grids.is_empty() {
        vec![build(&base)?.dims()[0]]
    } else {
        ctx.config.ricci_check.grids.clone()
    };
    let coarse_n = grids[0];
    let ricci_flat = !matches!(base, GeometryDescriptor::RoundSpherePatch { .. });
    let mut refine = Csv::create(ctx.out.join("ricci_refinement.csv"), &["n", "h", "max_ricci_norm"])?;
    let mut maxima = Vec::new();
    let mut last = Vec::new();
    for &n in &grids {
        let geom = build(&with_resolution(&base, n))?;
        let ric = ricci(&geom);
        let sites = sample(ctx, &geom, coarse_n);
        if sites.is_empty() {
            return Err(CliError::Config("ricci_check: no sites survive the sampling filters".into()));
        }
        let norms: Vec<(usize, f64)> = sites.iter().map(|&s| (s, ric.norm(&geom, s))).collect();
        let worst = norms.iter().map(|p| p.1).fold(0.0, f64::max);
        refine.row(&[n as f64, geom.max_spacing(), worst])?;
        rep.metric(&format!("one_sided_sites_n{n}"), geom.one_sided_sites());
        maxima.push(worst);
        last = norms;
    }
    rep.files.push(refine.finish()?);
    let mut csv = Csv::create(ctx.out.join("ricci.csv"), &["site", "max_ricci_norm"])?;
    for (s, v) in &last {
        csv.row(&[*s as f64, *v])?;
    }
    rep.files.push(csv.finish()?);
    rep.metric("max_ricci_norm", *maxima.last().expect("one grid"));
    if ricci_flat && maxima.iter().all(|&m| m == 0.0) {
        rep.push(Verdict::new(tags::RICCI_FLAT, "interior max |Ric|", true, 0.0, 0.0, "exactly flat"));
    } else if ricci_flat && maxima.len() >= 2 {
        let window = ctx.window(ctx.config.ricci_check.window);
        ratio_verdicts(&mut rep, tags::RICCI_FLAT, "interior max |Ric|", &maxima, window);
    }
    Ok(rep)
}
