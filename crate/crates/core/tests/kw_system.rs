mod common;

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

use common::*;
use kwgauge::fields::ops;
use kwgauge::fields::pointwise::{self as pw, Lie, One, Two};
use kwgauge::fields::{hodge_star, wedge_bracket, AdForm, GaugePair};
use kwgauge::geometry::{DistanceField, GeometryDescriptor, GridGeometry, SiteMetric, shell_decompose};
use kwgauge::greens::GreensOperator;
use kwgauge::kw::chain::{self, TanForm};
use kwgauge::kw::{self, KwAngle, RicciTerm};
use kwgauge::solver::{manufacture, Manufactured};
use kwgauge::Error;

#[test]
fn chain_round_trips_on_random_samples() {
    for theta in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, 3.0 * PI / 8.0] {
        let errs = chain::verify(KwAngle::new(theta), 10_000, 17, 1e-8).unwrap();
        assert!(errs.worst() <= 1e-12, "θ = {theta}: {errs:?}");
    }
}

#[test]
fn chain_holds_in_a_curved_metric() {
    let mut g = [[0.0; 4]; 4];
    for (i, row) in g.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = if i == j { 1.5 + 0.25 * i as f64 } else { 0.1 / (1.0 + (i + j) as f64) };
        }
    }
    let sm = SiteMetric::from_metric(g).unwrap();
    let angle = KwAngle::new(1.1);
    let tf = TanForm::new(angle, 1e-8).unwrap();
    let f: Two<f64> = std::array::from_fn(|i| Lie::new(0.3 * i as f64 - 0.7, 0.2, -0.1 * i as f64));
    let phi: One<f64> = std::array::from_fn(|i| Lie::new(0.5, -0.25 * i as f64, 0.1 + 0.2 * i as f64));
    assert!(chain::check_sample(&sm, angle, &tf, &f, &phi).worst() < 1e-12);
}

#[test]
fn degenerate_angles_are_rejected() {
    for theta in [0.0, PI / 2.0, PI] {
        assert!(matches!(TanForm::new(KwAngle::new(theta), 1e-8), Err(Error::DegenerateAngle { .. })));
    }
}

#[test]
fn quarter_angle_residuals_reduce_to_one_equation() {
    // At θ = π/4: r⁻ + r⁺ = (F − ½[Φ∧Φ] + ∗d_AΦ)/√2, so both vanish iff F = ½[Φ∧Φ] − ∗d_AΦ.
    let g = torus(6);
    let p = random_pair(&g, 3, 0.8);
    let (rm, rp, _) = kw::first_order_residuals(&g, &p, KwAngle::new(FRAC_PI_4));
    let f = ops::curvature(&g, &p.a);
    let b = wedge_bracket(&g, &p.phi, &p.phi);
    let sd = hodge_star(&g, &ops::ext_d1(&g, &p.a, &p.phi));
    let k = std::f64::consts::FRAC_1_SQRT_2;
    for s in 0..g.n_sites() {
        for c in 0..6 {
            let lhs = rm.get(s, c) + rp.get(s, c);
            let rhs = (f.get(s, c) - b.get(s, c) * 0.5 + sd.get(s, c)) * k;
            assert!((lhs - rhs).norm_sq().sqrt() < 1e-14);
        }
    }
    // pointwise samples constrained to solve the rearranged form
    let sm = SiteMetric::<f64>::euclidean();
    let tf = TanForm::new(KwAngle::new(FRAC_PI_4), 1e-8).unwrap();
    let dphi: Two<f64> = std::array::from_fn(|i| Lie::new(0.1 * i as f64, -0.3, 0.2));
    let phi: One<f64> = std::array::from_fn(|i| Lie::new(0.4, 0.1 * i as f64, -0.2));
    let bracket = pw::wedge_bracket(&phi, &phi);
    let f = chain::reconstruct_f(&sm, &tf, &dphi, &bracket);
    let expect: Two<f64> = {
        let st = pw::star(&sm, &dphi);
        std::array::from_fn(|i| bracket[i] * 0.5 - st[i])
    };
    for i in 0..6 {
        assert!((f[i] - expect[i]).norm_sq().sqrt() < 1e-15);
    }
}

#[test]
fn manufactured_solutions_have_zero_residuals() {
    let g = torus(6);
    let vacuum = GaugePair::zeros(g.n_sites());
    let flat = manufacture(&g, &Manufactured::FlatParallel { direction: 2, generator: 1, magnitude: 0.7 }).unwrap();
    for pair in [&vacuum, &flat] {
        for theta in [0.0, 0.4, FRAC_PI_4, 2.0] {
            let r = kw::residuals(&g, pair, KwAngle::new(theta), RicciTerm::Zero);
            for n in r.l2_norms(&g) {
                assert_eq!(n, 0.0);
            }
        }
    }
    let random = random_pair(&g, 8, 0.5);
    let r = kw::residuals(&g, &random, KwAngle::new(0.4), RicciTerm::Zero);
    assert!(r.l2_norms(&g).iter().all(|&v| v > 1e-3));
}

#[test]
fn instanton_residual_structure() {
    let geom = GridGeometry::<f64>::new(&GeometryDescriptor::EuclideanBall4 { side: 4.0, n: 11 }).unwrap();
    let p = manufacture(&geom, &Manufactured::Bpst { rho: 0.8, center: [0.0; 4], anti: false }).unwrap();
    let r = kw::residuals(&geom, &p, KwAngle::new(0.0), RicciTerm::Zero);
    assert_eq!(r.r_plus.max_abs(), 0.0);
    assert_eq!(r.so_phi.max_abs(), 0.0);
    assert_eq!(r.r_gauge.max_abs(), 0.0);
}

#[test]
fn energy_components_add_up() {
    let g = torus(6);
    let p = random_pair(&g, 4, 0.6);
    let rep = kw::energy_report(&g, &p, &[1.0, 2.0, f64::INFINITY]);
    assert_eq!(rep.e_total, rep.components[0] + rep.components[1] + rep.components[2]);
    assert_eq!(rep.e_total, kw::energy(&g, &p));
    assert!(rep.density.iter().all(|&v| v >= 0.0));
    let l1 = rep.lp_norms[0].1;
    assert!((l1 - rep.e_total).abs() < 1e-12 * l1);
    assert_eq!(kw::energy(&g, &GaugePair::zeros(g.n_sites())), 0.0);
}

fn bochner(n: usize) -> f64 {
    let g = torus(n);
    let p = random_pair(&g, 14, 0.6);
    let d = kw::bochner_defect(&g, &p);
    (d.iter().map(|v| v * v).sum::<f64>() * g.cell_coordinate_volume()).sqrt()
}

#[test]
fn bochner_identity_is_second_order() {
    let (e1, e2) = (bochner(16), bochner(32));
    assert!((3.5..=4.5).contains(&(e1 / e2)), "{e1} {e2}");
}

#[test]
fn w_potential_of_trivial_fields() {
    let g = torus(6);
    let greens = GreensOperator::new(&g);
    let w = kw::w_potential(&g, &GaugePair::zeros(g.n_sites()), &greens).unwrap();
    assert!(w.w.iter().chain(&w.h).all(|&v| v == 0.0));
    let flat = manufacture(&g, &Manufactured::FlatParallel { direction: 0, generator: 2, magnitude: 1.5 }).unwrap();
    let w = kw::w_potential(&g, &flat, &greens).unwrap();
    assert!(w.w.iter().all(|&v| v == 0.0));
    assert!(w.h.iter().all(|&v| (v - 0.5 * 1.5 * 1.5 * 0.5).abs() < 1e-15));
}

#[test]
fn w_potential_is_non_negative_and_solves_its_equation() {
    let g = GridGeometry::<f64>::new(&GeometryDescriptor::EuclideanBall4 { side: 4.0, n: 9 }).unwrap();
    let spec = kwgauge::solver::RandomSmooth { envelope: Some(0.8), ..kwgauge::solver::RandomSmooth::new(2) };
    let p = manufacture(&g, &Manufactured::RandomSmooth(spec)).unwrap();
    let greens = GreensOperator::new(&g);
    let w = kw::w_potential(&g, &p, &greens).unwrap();
    assert!(w.w.iter().all(|&v| v >= 0.0));
    let lw = greens.laplacian(&w.w);
    let src: Vec<f64> = (0..g.n_sites())
        .map(|s| {
            let t = kw::density_terms_at(&g, &p, s);
            t[1] + 2.0 * t[2]
        })
        .collect();
    let scale = src.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (a, b) in lw.iter().zip(&src) {
        assert!((a - b).abs() < 1e-7 * scale);
    }
}

#[test]
fn shell_profile_of_a_constant() {
    let g = GridGeometry::<f64>::new(&GeometryDescriptor::EuclideanBall4 { side: 2.0, n: 13 }).unwrap();
    let df = DistanceField::from_basepoint(&g);
    let shells = shell_decompose(&g, &df, 2.0 * g.max_spacing()).unwrap();
    let prof = kw::shell_profile(&g, &vec![2.5; g.n_sites()], &shells).unwrap();
    for st in prof {
        assert_eq!((st.sup, st.inf), (2.5, 2.5));
        assert!((st.mean - 2.5).abs() < 1e-12);
    }
    let mut empty = shells.clone();
    empty[0].sites.clear();
    assert!(kw::shell_profile(&g, &vec![0.0; g.n_sites()], &empty).is_err());
}

#[test]
fn lp_norms_of_known_density() {
    let u = vec![1.0f64, 2.0, 0.0];
    let w = vec![1.0f64, 0.5, 0.0];
    assert!((kw::lp_norm(&u, &w, 1.0) - 2.0).abs() < 1e-15);
    assert!((kw::lp_norm(&u, &w, 2.0) - 3f64.sqrt()).abs() < 1e-15);
    assert_eq!(kw::lp_norm(&u, &w, f64::INFINITY), 2.0);
}

#[test]
fn rotated_pairs_have_identical_residual_norms() {
    let g = torus(5);
    let p = random_pair(&g, 30, 0.7);
    let q = p.rotated(&[[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]]);
    let a = kw::residuals(&g, &p, KwAngle::new(0.3), RicciTerm::Zero).l2_norms(&g);
    let b = kw::residuals(&g, &q, KwAngle::new(0.3), RicciTerm::Zero).l2_norms(&g);
    assert_eq!(a, b);
    let _ = AdForm::<f64>::zeros(0, 1);
}

