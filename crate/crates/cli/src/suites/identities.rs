//! Pointwise first-order algebra and refinement studies of the discrete identities.

use std::f64::consts::TAU;

use kwgauge::fields::{ops, sd_asd_project, GaugePair};
use kwgauge::geometry::{GeometryDescriptor, GridGeometry};
use kwgauge::kw::{self, chain, KwAngle, RicciTerm};
use kwgauge::solver::{manufacture, Manufactured, RandomSmooth};

use super::{build, ratio_verdicts, volume_norm};
use crate::config::Refinement;
use crate::report::Csv;
use crate::{tags, CliError, Context, SuiteReport, Verdict};

pub fn run(ctx: &mut Context) -> Result<SuiteReport, CliError> {
    let mut rep = SuiteReport::new("identities");
    let cfg = ctx.config.identities.clone();
    let tol = ctx.tol(cfg.tolerance);
    for (i, &theta) in cfg.angles.iter().enumerate() {
        let errs = chain::verify(KwAngle::new(theta), cfg.samples, ctx.seed(0).wrapping_add(i as u64), ctx.config.degeneracy_threshold)?;
        let v = Verdict::new(
            tags::CHAIN,
            &format!("first-order chain, θ = {theta:.6}"),
            errs.worst() <= tol,
            errs.worst(),
            tol,
            format!("over {} samples", cfg.samples),
        );
        rep.push(v);
        rep.metric(&format!("chain_theta_{theta:.6}"), serde_json::to_value(&errs).expect("plain numbers"));
    }
    for (k, study) in cfg.refinement.iter().enumerate() {
        match study {
            Refinement::Instanton { rho, spacings, region, window } => {
                instanton(ctx, &mut rep, k, *rho, spacings, *region, ctx.window(*window))?
            }
            Refinement::Weitzenbock { grids, amplitude, window } => {
                torus_study(ctx, &mut rep, k, grids, *amplitude, ctx.window(*window), TorusDefect::Weitzenbock)?
            }
            Refinement::Bochner { grids, amplitude, window } => {
                torus_study(ctx, &mut rep, k, grids, *amplitude, ctx.window(*window), TorusDefect::Bochner)?
            }
        }
    }
    Ok(rep)
}

/// Smallest even cell count whose box keeps `region` plus a stencil margin inside.
fn nested_box(h: f64, region: f64) -> (f64, usize) {
    let mut cells = (2.0 * (region + 5.0 * h) / h - 1e-9).ceil() as usize;
    cells += cells % 2;
    (h * cells as f64, cells - 1)
}

fn instanton(
    ctx: &Context,
    rep: &mut SuiteReport,
    k: usize,
    rho: f64,
    spacings: &[f64],
    region: f64,
    window: [f64; 2],
) -> Result<(), CliError> {
    let h0 = spacings[0];
    for w in spacings.windows(2) {
        let r = w[0] / w[1];
        if (r - 2.0).abs() > 1e-9 {
            return Err(CliError::Config("field `identities.refinement.spacings`: each spacing must halve the previous".into()));
        }
    }
    let mut csv = Csv::create(ctx.out.join(format!("refinement_{k}_instanton.csv")), &["h", "n", "so_phi", "so_f", "f_minus"])?;
    let (mut so_phi, mut so_f, mut fm) = (Vec::new(), Vec::new(), Vec::new());
    for &h in spacings {
        let (side, n) = nested_box(h, region);
        let g = build(&GeometryDescriptor::EuclideanBall4 { side, n })?;
        let p = manufacture(&g, &Manufactured::Bpst { rho, center: [0.0; 4], anti: false })?;
        let (sp, sf) = kw::second_order_residuals(&g, &p, RicciTerm::Zero);
        let (_, minus) = sd_asd_project(&g, &ops::curvature(&g, &p.a));
        // rms over the sites of the coarsest lattice inside the region
        let on_coarse = |x: &[f64; 4]| x.iter().all(|&v| v.abs() <= region + 1e-9 && ((v / h0).round() * h0 - v).abs() < 1e-9 * h0);
        let sites: Vec<usize> = (0..g.n_sites()).filter(|&s| on_coarse(&g.position(s))).collect();
        let rms = |f: &kwgauge::fields::AdForm<f64>| {
            (sites.iter().map(|&s| f.site_inner(&g, s, f)).sum::<f64>() / sites.len() as f64).sqrt()
        };
        let row = [rms(&sp), rms(&sf), rms(&minus)];
        csv.row(&[h, n as f64, row[0], row[1], row[2]])?;
        so_phi.push(row[0]);
        so_f.push(row[1]);
        fm.push(row[2]);
    }
    rep.files.push(csv.finish()?);
    ratio_verdicts(rep, tags::SO_PHI, "instanton second-order Higgs residual", &so_phi, window);
    ratio_verdicts(rep, tags::SO_F, "instanton second-order curvature residual", &so_f, window);
    ratio_verdicts(rep, tags::R_MINUS, "instanton anti-self-dual curvature", &fm, window);
    Ok(())
}

#[derive(Clone, Copy)]
enum TorusDefect {
    Weitzenbock,
    Bochner,
}

fn torus_study(
    ctx: &Context,
    rep: &mut SuiteReport,
    k: usize,
    grids: &[usize],
    amplitude: f64,
    window: [f64; 2],
    which: TorusDefect,
) -> Result<(), CliError> {
    let name = match which {
        TorusDefect::Weitzenbock => "weitzenbock",
        TorusDefect::Bochner => "bochner",
    };
    let mut csv = Csv::create(ctx.out.join(format!("refinement_{k}_{name}.csv")), &["n", "h", "defect"])?;
    let mut defects = Vec::new();
    for &n in grids {
        let g: GridGeometry<f64> = build(&GeometryDescriptor::FlatTorus4 { side: TAU, n })?;
        let spec = RandomSmooth { amplitude, bandlimit: 1, ..RandomSmooth::new(ctx.seed(21)) };
        let p: GaugePair<f64> = manufacture(&g, &Manufactured::RandomSmooth(spec))?;
        let d = match which {
            TorusDefect::Weitzenbock => kw::weitzenbock_defect(&g, &p, RicciTerm::Zero).l2_norm(&g),
            TorusDefect::Bochner => volume_norm(&g, &kw::bochner_defect(&g, &p)),
        };
        csv.row(&[n as f64, g.max_spacing(), d])?;
        defects.push(d);
    }
    rep.files.push(csv.finish()?);
    let (tag, what) = match which {
        TorusDefect::Weitzenbock => (tags::WEITZENBOCK, "Weitzenböck defect"),
        TorusDefect::Bochner => (tags::BOCHNER, "Bochner defect"),
    };
    ratio_verdicts(rep, tag, what, &defects, window);
    Ok(())
}
