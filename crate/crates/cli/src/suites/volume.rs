//! Volume growth of geodesic balls about the basepoint.

use kwgauge::geometry::{bishop_gromov_violations, fit_growth_exponent, volume_of_balls, DistanceField, EndClass};

use super::build;
use crate::report::Csv;
use crate::{tags, CliError, Context, SuiteReport, Verdict};

pub fn run(ctx: &mut Context) -> Result<SuiteReport, CliError> {
    let cfg = ctx.config.volume.clone();
    let geom = build(&ctx.config.geometry)?;
    let mut rep = SuiteReport::new("volume-growth");
    let df = DistanceField::from_basepoint(&geom);
    let r_min = cfg.r_min.unwrap_or(2.0 * geom.max_spacing());
    let r_max = cfg.r_max.unwrap_or(df.inscribed_radius);
    if !(r_min > 0.0 && r_min < r_max) {
        return Err(CliError::Config(format!("field `volume.r_min`: need 0 < r_min < r_max = {r_max:.4}")));
    }
    let n = cfg.radii;
    let radii: Vec<f64> = (0..n).map(|i| r_min + (r_max - r_min) * i as f64 / (n - 1) as f64).collect();
    let balls = volume_of_balls(&geom, &df, &radii);
    let mut csv = Csv::create(ctx.out.join("volume.csv"), &["r", "volume", "ratio"])?;
    for b in &balls {
        csv.row(&[b.radius, b.volume, b.ratio])?;
    }
    rep.files.push(csv.finish()?);
    let bad = bishop_gromov_violations(&balls);
    rep.push(Verdict::new(
        tags::BISHOP_GROMOV,
        "r⁻⁴Vol(B_r) nonincreasing",
        bad.is_empty(),
        bad.len() as f64,
        0.0,
        format!("{} radii in [{r_min:.4}, {r_max:.4}]", balls.len()),
    ));
    let expected = match geom.end_class() {
        EndClass::Compact => None,
        EndClass::Ale => Some(4.0),
        EndClass::Alf => Some(3.0),
    };
    let window = cfg.fit_window.unwrap_or([(r_min + r_max) / 2.0, r_max]);
    if let Some((slope, _)) = fit_growth_exponent(&balls, window[0], window[1]) {
        rep.metric("growth_exponent", slope);
        if let Some(e) = expected {
            let bound = ctx.tol(cfg.exponent_tol);
            rep.push(Verdict::new(
                tags::BISHOP_GROMOV,
                "volume growth exponent",
                (slope - e).abs() <= bound,
                slope,
                e,
                format!("|exponent − {e}| ≤ {bound:.3} over r ∈ [{:.4}, {:.4}]", window[0], window[1]),
            ));
        }
    } else if expected.is_some() {
        return Err(CliError::Config("field `volume.fit_window`: fewer than two radii fall inside".into()));
    }
    Ok(rep)
}
