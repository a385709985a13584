//! Energy descent from configured initial data.

use kwgauge::fields::GaugePair;
use kwgauge::geometry::GridGeometry;
use kwgauge::kw::{self, KwAngle};
use kwgauge::snapshot::write_snapshot;
use kwgauge::solver::{self, manufacture, StopReason};
use serde_json::{json, Map, Value};

use super::{build, ricci_field, ricci_term};
use crate::report::{write_json, Csv};
use crate::{tags, CliError, Context, SuiteReport, Verdict};

pub struct FlowOutcome {
    pub report: SuiteReport,
    pub geometry: GridGeometry<f64>,
    pub pair: GaugePair<f64>,
}

fn residual_record(ctx: &Context, geom: &GridGeometry<f64>, pair: &GaugePair<f64>) -> Value {
    let ric = ricci_field(ctx, geom);
    let r = kw::residuals(geom, pair, KwAngle::new(ctx.config.theta), ricci_term(&ric));
    let mut m = Map::new();
    for (tag, v) in tags::RESIDUALS.iter().zip(r.l2_norms(geom)) {
        m.insert((*tag).into(), json!(v));
    }
    Value::Object(m)
}

/// `(‖∇Φ‖, ‖[Φ∧Φ]‖)` from the energy components.
fn vanishing_norms(components: &[f64; 3]) -> (f64, f64) {
    (components[1].sqrt(), (4.0 * components[2]).sqrt())
}

pub fn run(ctx: &mut Context) -> Result<FlowOutcome, CliError> {
    let cfg = ctx.config.clone();
    let fc = &cfg.flow;
    let mut rep = SuiteReport::new("flow");
    let geom = build(&cfg.geometry)?;
    let initial = manufacture(&geom, &cfg.initial_data())?;
    let rep0 = kw::energy_report(&geom, &initial, &cfg.p_list);
    let e0 = rep0.e_total;
    rep.metric("initial_energy", e0);

    if let Some(ex) = fc.expected_energy {
        let rel = (e0 - ex.value).abs() / ex.value;
        let bound = ctx.tol(ex.rel_tol);
        rep.push(Verdict::new(tags::ENERGY, "initial energy against expected value", rel <= bound, rel, bound, format!("E = {e0:.6e}, expected {:.6e}", ex.value)));
    }

    let evaluate_only = fc.options.max_iterations == 0;
    let mut residuals = Map::new();
    if fc.residuals {
        residuals.insert("initial".into(), residual_record(ctx, &geom, &initial));
    }

    let (pair, report_final) = if evaluate_only {
        (initial, rep0)
    } else {
        let state = solver::flow(&geom, initial, &fc.options);
        let mut csv = Csv::create(ctx.out.join("flow_history.csv"), &["iteration", "energy", "grad_norm", "step"])?;
        for r in &state.history {
            csv.row(&[r.iteration as f64, r.energy, r.grad_norm, r.step])?;
        }
        rep.files.push(csv.finish()?);
        rep.metric("iterations", state.iterations);
        rep.metric("stop", format!("{:?}", state.stop));
        rep.metric("final_grad_norm", state.history.last().map(|r| r.grad_norm).unwrap_or(f64::NAN));
        if !state.fd_checks.is_empty() {
            let worst = state.fd_checks.iter().map(|c| c.1).fold(0.0, f64::max);
            rep.push(Verdict::at_most(tags::ENERGY, "gradient against finite differences", worst, ctx.tol(1e-6)));
        }
        rep.push(Verdict::new(tags::ENERGY, "energy history monotone", state.is_monotone(), state.final_energy(), e0, "final against initial energy"));
        if fc.require_convergence && state.stop != StopReason::Tolerance {
            rep.not_converged = Some(format!(
                "flow stopped ({:?}) after {} iterations with gradient norm {:.3e} > {:.3e}",
                state.stop,
                state.iterations,
                state.grad_norm,
                fc.options.grad_tolerance
            ));
        }
        let fin = kw::energy_report(&geom, &state.pair, &cfg.p_list);
        (state.pair, fin)
    };
    let ef = report_final.e_total;
    rep.metric("final_energy", ef);

    if let Some(ratio) = fc.energy_ratio {
        let bound = ctx.tol(ratio) * e0;
        rep.push(Verdict::at_most(tags::ENERGY, "final energy against initial", ef, bound));
    }
    if let Some(v) = fc.vanishing {
        let scale = e0.sqrt();
        let (grad, bracket) = vanishing_norms(&report_final.components);
        let bound = ctx.tol(v) * scale;
        rep.push(Verdict::at_most(tags::VANISHING, "‖∇Φ‖ against initial energy scale", grad, bound));
        rep.push(Verdict::at_most(tags::VANISHING, "‖[Φ∧Φ]‖ against initial energy scale", bracket, bound));
    }

    let mut csv = Csv::create(ctx.out.join("energy.csv"), &["quantity", "value"])?;
    let named = [("e_total", ef), ("curvature", report_final.components[0]), ("higgs_gradient", report_final.components[1]), ("higgs_bracket", report_final.components[2])];
    for (k, v) in named {
        csv.record(&[k.to_string(), v.to_string()])?;
    }
    for (p, v) in &report_final.lp_norms {
        csv.record(&[format!("lp_{p}"), v.to_string()])?;
    }
    rep.files.push(csv.finish()?);

    if fc.residuals {
        if !evaluate_only {
            residuals.insert("final".into(), residual_record(ctx, &geom, &pair));
        }
        let path = ctx.out.join("residuals.json");
        write_json(&path, &Value::Object(residuals))?;
        rep.files.push(path);
    }
    if fc.snapshots {
        for (name, form) in [("a", &pair.a), ("phi", &pair.phi)] {
            let path = ctx.out.join(format!("{name}.kwfs"));
            write_snapshot(&path, name, &geom, form, cfg.theta)?;
            rep.files.push(path);
        }
    }
    ctx.flowed = Some(pair.clone());
    Ok(FlowOutcome { report: rep, geometry: geom, pair })
}
