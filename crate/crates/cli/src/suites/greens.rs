//! Green's function about the basepoint and its decay profile.

use std::f64::consts::PI;

use kwgauge::geometry::{DistanceField, EndClass};
use kwgauge::greens::GreensOperator;

use super::{build, log_log_slope};
use crate::report::Csv;
use crate::{tags, CliError, Context, SuiteReport, Verdict};

pub fn run(ctx: &mut Context) -> Result<SuiteReport, CliError> {
    let cfg = ctx.config.greens.clone();
    let geom = build(&ctx.config.geometry)?;
    let k = match geom.end_class() {
        EndClass::Compact => return Err(CliError::Config("greens needs a truncated geometry".into())),
        EndClass::Ale => 0,
        EndClass::Alf => 1,
    };
    let mut rep = SuiteReport::new("greens");
    let op = GreensOperator::new(&geom).with_tolerance(cfg.tolerance).with_max_iterations(cfg.max_iterations);
    let x = geom.basepoint();
    let g = op.column(x)?;
    let df = DistanceField::new(&geom, x);
    let r_in = df.inscribed_radius;
    let scaled = |s: usize| {
        let d = df.dist[s];
        d * d / (1.0 + d.powi(k)) * g[s]
    };

    let mut near: Vec<usize> = (0..geom.n_sites()).filter(|&s| s != x && df.dist[s] <= r_in / 2.0).collect();
    near.sort_by(|&a, &b| df.dist[a].total_cmp(&df.dist[b]).then(a.cmp(&b)));
    let mut csv = Csv::create(ctx.out.join("greens.csv"), &["distance", "G", "scaled"])?;
    for &s in &near {
        csv.row(&[df.dist[s], g[s], scaled(s)])?;
    }
    rep.files.push(csv.finish()?);

    let gmin = (0..geom.n_sites()).filter(|&s| !geom.is_boundary_layer(s)).map(|s| g[s]).fold(f64::INFINITY, f64::min);
    rep.push(Verdict::new(tags::GREEN, "G positive off the boundary", gmin > 0.0, gmin, 0.0, ""));

    // shells of the inner half
    let width = ctx.config.shell_width.unwrap_or(2.0 * geom.max_spacing());
    let mut prof = Vec::new();
    let mut csv = Csv::create(ctx.out.join("greens_shells.csv"), &["R", "sup", "inf", "mean", "mean_flat_constant"])?;
    let mut kk = 1;
    while (kk as f64 + 1.0) * width <= r_in / 2.0 + 1e-12 {
        let (lo, hi) = (kk as f64 * width, (kk as f64 + 1.0) * width);
        let sites: Vec<usize> = near.iter().copied().filter(|&s| df.dist[s] >= lo && df.dist[s] < hi).collect();
        if !sites.is_empty() {
            let v: Vec<f64> = sites.iter().map(|&s| scaled(s)).collect();
            let sup = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let inf = v.iter().copied().fold(f64::INFINITY, f64::min);
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let flat = sites.iter().map(|&s| 4.0 * PI * PI * df.dist[s].powi(2) * g[s]).sum::<f64>() / sites.len() as f64;
            csv.row(&[(lo + hi) / 2.0, sup, inf, mean, flat])?;
            prof.push(((lo + hi) / 2.0, sup, flat));
        }
        kk += 1;
    }
    rep.files.push(csv.finish()?);
    if prof.len() < 2 {
        return Err(CliError::Config("greens: the inner half of the box holds fewer than two shells".into()));
    }

    if k == 0 {
        let (a, b) = (cfg.mid_range[0] * geom.max_spacing(), cfg.mid_range[1] * r_in);
        let worst = prof.iter().filter(|p| p.0 >= a && p.0 <= b).map(|p| (p.2 - 1.0).abs()).fold(f64::NEG_INFINITY, f64::max);
        let bound = ctx.tol(cfg.flat_rel_tol);
        rep.push(Verdict::new(
            tags::GREEN,
            "4π²·dist²·G against 1 over mid-range shells",
            worst <= bound,
            worst,
            bound,
            format!("window [{a:.4}, {b:.4}]"),
        ));
    }
    let slope = log_log_slope(&prof.iter().map(|p| (p.0, p.1)).collect::<Vec<_>>()).unwrap_or(f64::NAN);
    let bound = ctx.tol(cfg.max_slope);
    rep.push(Verdict::new(
        tags::GREEN,
        &format!("growth of shell sup of dist²G/(1+dist^{k}) over inner half"),
        slope <= bound,
        slope,
        bound,
        format!("{} shells up to R = {:.4}", prof.len(), r_in / 2.0),
    ));
    // the same fit without the end correction, for contrast
    let raw: Vec<(f64, f64)> = prof.iter().map(|p| (p.0, p.2)).collect();
    rep.metric("flat_scaling_slope", log_log_slope(&raw).unwrap_or(f64::NAN));
    Ok(rep)
}
