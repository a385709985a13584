//! Shell profiles of a flowed configuration: decay of `e_KW`, flattening of
//! `|Φ|`, subharmonicity of `½|Φ|²` and the harmonic potential `h`.

use kwgauge::fields::{AdForm, GaugePair};
use kwgauge::geometry::{DistanceField, GridGeometry, Shell};
use kwgauge::greens::GreensOperator;
use kwgauge::kw::{self, KwAngle, ShellStats};
use kwgauge::snapshot::{read_sidecar, read_snapshot, sidecar_path};

use super::{build, cell_variation, flow, ricci_field, ricci_term, shells, volume_norm};
use crate::report::Csv;
use crate::{tags, CliError, Context, SuiteReport, Verdict};

fn load(ctx: &Context, geom: &GridGeometry<f64>) -> Result<Option<GaugePair<f64>>, CliError> {
    let Some(dir) = &ctx.config.decay.snapshot_dir else { return Ok(None) };
    let mut forms = Vec::new();
    for name in ["a", "phi"] {
        let path = dir.join(format!("{name}.kwfs"));
        let side = read_sidecar(&sidecar_path(&path))?;
        if &side.geometry != geom.descriptor() {
            return Err(CliError::Config(format!("field `decay.snapshot_dir`: {} was written on a different geometry", path.display())));
        }
        let (_, form): (_, AdForm<f64>) = read_snapshot(&path)?;
        forms.push(form);
    }
    let phi = forms.pop().expect("two forms");
    let a = forms.pop().expect("two forms");
    Ok(Some(GaugePair::new(a, phi)?))
}

fn write_profile(ctx: &Context, rep: &mut SuiteReport, name: &str, stats: &[ShellStats<f64>]) -> Result<(), CliError> {
    let mut csv = Csv::create(ctx.out.join(name), &["R", "sup", "inf", "mean"])?;
    for s in stats {
        csv.row(&[s.radius, s.sup, s.inf, s.mean])?;
    }
    rep.files.push(csv.finish()?);
    Ok(())
}

/// Largest increase between consecutive entries.
fn worst_increase(v: &[f64]) -> f64 {
    v.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max)
}

pub fn run(ctx: &mut Context) -> Result<Vec<SuiteReport>, CliError> {
    let mut reports = Vec::new();
    let geom = build(&ctx.config.geometry)?;
    let pair = match (load(ctx, &geom)?, ctx.flowed.take()) {
        (Some(p), _) => p,
        (None, Some(p)) => p,
        (None, None) => {
            let out = flow::run(ctx)?;
            reports.push(out.report);
            out.pair
        }
    };
    if geom.is_compact() {
        return Err(CliError::Config("decay-profile needs a truncated geometry".into()));
    }
    let mut rep = SuiteReport::new("decay-profile");
    let df = DistanceField::from_basepoint(&geom);
    let shells = shells(ctx, &geom, &df)?;
    let energy = kw::energy_report(&geom, &pair, &ctx.config.p_list);
    let abs_phi: Vec<f64> = pair.phi.pointwise_norm_sq(&geom).into_iter().map(f64::sqrt).collect();
    let e_prof = kw::shell_profile(&geom, &energy.density, &shells)?;
    let phi_prof = kw::shell_profile(&geom, &abs_phi, &shells)?;

    let mut csv = Csv::create(ctx.out.join("decay.csv"), &["R", "sup_abs_phi", "inf_abs_phi", "sup_e_kw"])?;
    for (p, e) in phi_prof.iter().zip(&e_prof) {
        csv.row(&[p.radius, p.sup, p.inf, e.sup])?;
    }
    rep.files.push(csv.finish()?);
    write_profile(ctx, &mut rep, "shells_abs_phi.csv", &phi_prof)?;
    write_profile(ctx, &mut rep, "shells_e_kw.csv", &e_prof)?;

    let outer = shells.len() / 2;
    let outer_sites = || shells[outer..].iter().flat_map(|s: &Shell<f64>| s.sites.iter().copied());
    let e_sup: Vec<f64> = e_prof[outer..].iter().map(|s| s.sup).collect();
    let e_tol = ctx.tol(cell_variation(&geom, &energy.density, outer_sites()));
    rep.push(Verdict::new(
        tags::DECAY,
        "shell sup of e_KW nonincreasing over outer half",
        worst_increase(&e_sup) <= e_tol,
        worst_increase(&e_sup),
        e_tol,
        format!("{} shells from R = {:.4}", e_sup.len(), e_prof[outer].radius),
    ));
    let osc: Vec<f64> = phi_prof[outer..].iter().map(|s| s.sup - s.inf).collect();
    let phi_tol = ctx.tol(cell_variation(&geom, &abs_phi, outer_sites()));
    let c = phi_prof.last().map(|s| s.mean).unwrap_or(f64::NAN);
    rep.push(Verdict::new(
        tags::PHI_LIMITS,
        "shell oscillation of |Φ| nonincreasing over outer half",
        worst_increase(&osc) <= phi_tol,
        worst_increase(&osc),
        phi_tol,
        format!("far-shell mean c = {c:.6e}"),
    ));
    rep.metric("c_estimate", c);

    let ric = ricci_field(ctx, &geom);
    let res = kw::residuals(&geom, &pair, KwAngle::new(ctx.config.theta), ricci_term(&ric));
    let first = res.first_order_norm(&geom);
    drop(res);
    let lap = kw::half_phi_sq_laplacian(&geom, &pair);
    let lap_prof = kw::shell_profile(&geom, &lap, &shells)?;
    let worst = lap_prof.iter().map(|s| s.sup).fold(f64::NEG_INFINITY, f64::max);
    let bound = ctx.tol(ctx.config.decay.subharmonic_factor) * first;
    rep.push(Verdict::at_most(tags::BOCHNER, "shell max of Δ(½|Φ|²) against first-order residual", worst, bound));
    rep.metric("first_order_residual", first);

    if ctx.config.decay.w_potential {
        let greens = GreensOperator::new(&geom);
        let w = kw::w_potential(&geom, &pair, &greens)?;
        let wmin = w.w.iter().copied().fold(f64::INFINITY, f64::min);
        let wmax = w.w.iter().copied().fold(0.0, f64::max);
        rep.push(Verdict::new(tags::W_POTENTIAL, "w non-negative", wmin >= -1e-12 * wmax.max(f64::MIN_POSITIVE), wmin, 0.0, ""));
        let interior: Vec<f64> = (0..geom.n_sites()).map(|s| if geom.depth(s) >= 2 { 1.0 } else { 0.0 }).collect();
        let masked = |v: &[f64]| volume_norm(&geom, &v.iter().zip(&interior).map(|(a, b)| a * b).collect::<Vec<_>>());
        let (lh, lp) = (masked(&w.laplacian_h), masked(&w.laplacian_half_phi_sq));
        rep.metric("laplacian_h_norm", lh);
        rep.metric("laplacian_half_phi_sq_norm", lp);
    }
    reports.push(rep);
    Ok(reports)
}
