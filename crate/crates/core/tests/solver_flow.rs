mod common;

use common::*;
use kwgauge::fields::GaugePair;
use kwgauge::geometry::{GeometryDescriptor, GridGeometry, NutCenter};
use kwgauge::kw;
use kwgauge::solver::{
    energy_gradient, flow, gradient_check, manufacture, rescale_to_energy, FlowOptions, Manufactured, RandomSmooth,
    StopReason,
};

fn gh() -> GridGeometry<f64> {
    let centers = vec![NutCenter { position: [0.2, 0.2, 0.5], mass: 0.5 }, NutCenter { position: [-0.2, -0.6, -0.6], mass: 0.5 }];
    GridGeometry::new(&GeometryDescriptor::GibbonsHawking { centers, side: 4.0, circumference: 4.0, n: 9, n_circle: Some(4) })
        .unwrap()
}

fn check_gradient(geom: &GridGeometry<f64>, pair: &GaugePair<f64>) {
    let grad = energy_gradient(geom, pair);
    for seed in 0..20 {
        let err = gradient_check(geom, pair, &grad, seed, 1e-5);
        assert!(err <= 1e-6, "seed {seed}: {err}");
    }
}

#[test]
fn gradient_matches_finite_differences_on_the_torus() {
    let g = torus(5);
    check_gradient(&g, &random_pair(&g, 1, 0.7));
}

#[test]
fn gradient_matches_finite_differences_on_the_ball() {
    let g: GridGeometry<f64> = GridGeometry::new(&GeometryDescriptor::EuclideanBall4 { side: 3.0, n: 7 }).unwrap();
    let p = manufacture(&g, &Manufactured::RandomSmooth(RandomSmooth { amplitude: 0.6, ..RandomSmooth::new(5) })).unwrap();
    check_gradient(&g, &p);
}

#[test]
fn gradient_matches_finite_differences_on_multi_center_geometry() {
    let g = gh();
    let p = manufacture(&g, &Manufactured::RandomSmooth(RandomSmooth { amplitude: 0.5, ..RandomSmooth::new(9) })).unwrap();
    check_gradient(&g, &p);
}

#[test]
fn instanton_has_no_higgs_gradient() {
    let g: GridGeometry<f64> = GridGeometry::new(&GeometryDescriptor::EuclideanBall4 { side: 4.0, n: 9 }).unwrap();
    let p = manufacture(&g, &Manufactured::Bpst { rho: 0.7, center: [0.0; 4], anti: true }).unwrap();
    assert_eq!(energy_gradient(&g, &p).phi.max_abs(), 0.0);
}

#[test]
fn instanton_needs_a_truncated_geometry() {
    assert!(manufacture(&torus(4), &Manufactured::Bpst { rho: 0.5, center: [0.0; 4], anti: false }).is_err());
}

#[test]
fn vacuum_is_already_converged() {
    let g = torus(4);
    let st = flow(&g, GaugePair::zeros(g.n_sites()), &FlowOptions::default());
    assert_eq!(st.iterations, 0);
    assert_eq!(st.stop, StopReason::Tolerance);
    assert_eq!(st.final_energy(), 0.0);
}

#[test]
fn flow_lowers_energy_monotonically() {
    let g = torus(5);
    let p = rescale_to_energy(&g, &random_pair(&g, 2, 0.5), 1.0);
    assert!((kw::energy(&g, &p) - 1.0).abs() < 1e-6);
    let opts = FlowOptions { max_iterations: 60, fd_check_every: Some(20), ..FlowOptions::default() };
    let st = flow(&g, p, &opts);
    assert!(st.is_monotone());
    assert!(st.final_energy() < 0.5 * st.initial_energy());
    assert_eq!(st.fd_checks.len(), 4);
    assert!(st.fd_checks.iter().all(|&(_, e)| e < 1e-6), "{:?} {:?}", st.fd_checks, st.history.last());
}

#[test]
fn flow_is_deterministic() {
    let g = torus(4);
    let run = || {
        let p = random_pair(&g, 6, 0.5);
        flow(&g, p, &FlowOptions { max_iterations: 15, ..FlowOptions::default() })
    };
    let (a, b) = (run(), run());
    assert_eq!(a.history, b.history);
    assert_eq!(a.pair.a.data(), b.pair.a.data());
    assert_eq!(a.pair.phi.data(), b.pair.phi.data());
}

#[test]
fn boundary_layer_stays_frozen() {
    let g: GridGeometry<f64> = GridGeometry::new(&GeometryDescriptor::EuclideanBall4 { side: 3.0, n: 7 }).unwrap();
    let p = manufacture(&g, &Manufactured::RandomSmooth(RandomSmooth { amplitude: 0.4, ..RandomSmooth::new(3) })).unwrap();
    let st = flow(&g, p.clone(), &FlowOptions { max_iterations: 10, ..FlowOptions::default() });
    for s in (0..g.n_sites()).filter(|&s| g.is_boundary_layer(s)) {
        assert_eq!(st.pair.a.site(s), p.a.site(s));
        assert_eq!(st.pair.phi.site(s), p.phi.site(s));
    }
}

#[test]
fn manufactured_data_is_seeded() {
    let g = torus(4);
    let a = random_pair(&g, 10, 0.3);
    let b = random_pair(&g, 10, 0.3);
    let c = random_pair(&g, 11, 0.3);
    assert_eq!(a.phi.data(), b.phi.data());
    assert_ne!(a.phi.data(), c.phi.data());
}
