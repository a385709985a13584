mod common;

use common::*;
use kwgauge::fields::ops::{self, Density};
use kwgauge::fields::pointwise::{self as pw, Lie};
use kwgauge::fields::{hodge_star, sd_asd_project, wedge_bracket, AdForm, GaugePair};
use kwgauge::geometry::{GeometryDescriptor, GridGeometry, NutCenter};
use kwgauge::kw;

fn gibbons_hawking(n: usize) -> GridGeometry<f64> {
    GridGeometry::new(&GeometryDescriptor::GibbonsHawking {
        centers: vec![
            NutCenter { position: [0.13, 0.21, 0.3], mass: 0.4 },
            NutCenter { position: [-0.37, -0.11, -0.2], mass: 0.3 },
        ],
        side: 4.0,
        circumference: 1.5,
        n,
        n_circle: Some(5),
    })
    .unwrap()
}

#[test]
fn trivial_connection_is_flat() {
    let g = torus(6);
    assert_eq!(ops::curvature(&g, &AdForm::zeros(1, g.n_sites())).max_abs(), 0.0);
}

#[test]
fn abelian_curvature_matches_derivative() {
    // A = sin(x¹) dx² τ₃ ⇒ F₁₂ = cos(x¹) τ₃.
    let err = |n: usize| {
        let g = torus(n);
        let mut a = AdForm::zeros(1, g.n_sites());
        for s in 0..g.n_sites() {
            a.set(s, 1, Lie::basis(2) * g.position(s)[0].sin());
        }
        let f = ops::curvature(&g, &a);
        (0..g.n_sites())
            .map(|s| {
                let exact = Lie::basis(2) * g.position(s)[0].cos();
                let mut e = (f.get(s, 0) - exact).norm_sq();
                for c in 1..6 {
                    e += f.get(s, c).norm_sq();
                }
                e.sqrt()
            })
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (err(8), err(16));
    assert!(e1 < 0.15);
    assert!((e1 / e2 - 4.0).abs() < 0.5, "{e1} {e2}");
}

#[test]
fn exterior_derivative_of_linear_form_is_exact_inside() {
    // ω = x¹ dx² τ₂ ⇒ dω = dx¹∧dx² τ₂; the wide stencil is exact on linear data.
    let g = GridGeometry::<f64>::new(&GeometryDescriptor::EuclideanBall4 { side: 2.0, n: 9 }).unwrap();
    let mut w = AdForm::zeros(1, g.n_sites());
    for s in 0..g.n_sites() {
        w.set(s, 1, Lie::basis(1) * g.position(s)[0]);
    }
    let d = ops::ext_d1(&g, &AdForm::zeros(1, g.n_sites()), &w);
    for s in (0..g.n_sites()).filter(|&s| g.depth(s) >= 1) {
        assert!((d.get(s, 0) - Lie::basis(1)).norm_sq() < 1e-24);
        for c in 1..6 {
            assert!(d.get(s, c).norm_sq() < 1e-24);
        }
    }
    let u = AdForm::from_fn(g.n_sites(), |_| [Lie::basis(0) * 3.0]);
    let du = ops::ext_d0(&g, &AdForm::zeros(1, g.n_sites()), &u);
    assert!(sup_inside(&g, &du, 1) == 0.0);
}

#[test]
fn divergence_free_rotation_field() {
    // Φ = (x² dx¹ − x¹ dx²) τ₁ has d^*Φ = 0.
    let g = GridGeometry::<f64>::new(&GeometryDescriptor::EuclideanBall4 { side: 2.0, n: 9 }).unwrap();
    let mut phi = AdForm::zeros(1, g.n_sites());
    for s in 0..g.n_sites() {
        let x = g.position(s);
        phi.set(s, 0, Lie::basis(0) * x[1]);
        phi.set(s, 1, Lie::basis(0) * -x[0]);
    }
    let div = ops::codiff1(&g, &AdForm::zeros(1, g.n_sites()), &phi, Density::Volume);
    assert!(sup_inside(&g, &div, 1) < 1e-13);
}

#[test]
fn codifferentials_are_exact_adjoints() {
    for g in [torus(6), gibbons_hawking(7)] {
        let p = random_pair(&g, 5, 0.7);
        let q = random_pair(&g, 6, 0.7);
        let a = &p.a;
        let u = AdForm::from_fn(g.n_sites(), |s| [q.phi.get(s, 0)]);
        // 0-forms to 1-forms
        let lhs = volume_inner(&g, &ops::ext_d0(&g, a, &u), &q.a);
        let rhs = volume_inner(&g, &u, &ops::codiff1(&g, a, &q.a, Density::Volume));
        assert!((lhs - rhs).abs() < 1e-11 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
        // 1-forms to 2-forms
        let beta = ops::curvature(&g, &q.a);
        let lhs = volume_inner(&g, &ops::ext_d1(&g, a, &p.phi), &beta);
        let rhs = volume_inner(&g, &p.phi, &ops::codiff2(&g, a, &beta, Density::Volume));
        assert!((lhs - rhs).abs() < 1e-11 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
        // the rough Laplacian is ∇^*∇
        let y = ops::cov_grad(&g, a, &p.phi);
        let yq = ops::cov_grad(&g, a, &q.phi);
        let lhs: f64 = (0..g.n_sites())
            .map(|s| {
                let sm = g.site_metric(s);
                let up = pw::raise_tensor(&sm, &yq[s]);
                let mut acc = 0.0;
                for i in 0..4 {
                    for j in 0..4 {
                        acc += y[s][i][j].inner(up[i][j]);
                    }
                }
                g.cell_volume(s) * acc
            })
            .sum();
        let rhs = volume_inner(&g, &p.phi, &ops::connection_laplacian(&g, a, &q.phi, Density::Volume));
        assert!((lhs - rhs).abs() < 1e-11 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
    }
}

fn bianchi_defect(n: usize) -> (f64, f64) {
    let g = torus(n);
    let p = random_pair(&g, 9, 0.6);
    let f = ops::curvature(&g, &p.a);
    let star_f = hodge_star(&g, &f);
    let d_star = ops::codiff2(&g, &p.a, &star_f, Density::Volume);
    let d_f = ops::ext_d2(&g, &p.a, &f);
    (d_star.l2_norm(&g), d_f.sup_norm(&g))
}

#[test]
fn bianchi_identity_is_second_order() {
    let (a1, b1) = bianchi_defect(8);
    let (a2, b2) = bianchi_defect(16);
    assert!((a1 / a2 - 4.0).abs() < 0.6, "{a1} {a2}");
    assert!((b1 / b2 - 4.0).abs() < 0.8, "{b1} {b2}");
}

#[test]
fn rough_laplacian_of_a_sine() {
    // ∇^*∇(sin x¹ dx² τ₁) = sin x¹ dx² τ₁.
    let err = |n: usize| {
        let g = torus(n);
        let mut w = AdForm::zeros(1, g.n_sites());
        for s in 0..g.n_sites() {
            w.set(s, 1, Lie::basis(0) * g.position(s)[0].sin());
        }
        let l = ops::connection_laplacian(&g, &AdForm::zeros(1, g.n_sites()), &w, Density::Volume);
        l.linear_combination(1.0, &w, -1.0).unwrap().sup_norm(&g)
    };
    let (e1, e2) = (err(8), err(16));
    assert!((e1 / e2 - 4.0).abs() < 0.5, "{e1} {e2}");
}

fn weitzenbock_defect(n: usize) -> f64 {
    let g = torus(n);
    let p = random_pair(&g, 21, 0.5);
    let (a, phi) = (&p.a, &p.phi);
    let rough = ops::connection_laplacian(&g, a, phi, Density::Volume);
    let dd = ops::codiff2(&g, a, &ops::ext_d1(&g, a, phi), Density::Volume);
    let dsd = ops::ext_d0(&g, a, &ops::codiff1(&g, a, phi, Density::Volume));
    let f = ops::curvature(&g, a);
    let c = AdForm::from_fn(g.n_sites(), |s| pw::contract(&g.site_metric(s), &f.two(s), &phi.one(s)));
    let hodge = dd.linear_combination(1.0, &dsd, 1.0).unwrap().linear_combination(1.0, &c, -1.0).unwrap();
    rough.linear_combination(1.0, &hodge, -1.0).unwrap().l2_norm(&g)
}

#[test]
fn weitzenbock_formula_is_second_order() {
    let (e1, e2) = (weitzenbock_defect(8), weitzenbock_defect(16));
    assert!(e1 > 0.0);
    eprintln!("weitzenbock {e1} {e2}");
    assert!((3.5..=4.5).contains(&(e1 / e2)), "{e1} {e2}");
}

#[test]
fn supercurrent_matches_index_loop() {
    let g = gibbons_hawking(7);
    let p = random_pair(&g, 2, 0.8);
    let j = ops::supercurrent(&g, &p.a, &p.phi);
    for s in (0..g.n_sites()).step_by(53) {
        let sm = g.site_metric(s);
        let y = ops::cov_grad_at(&g, &p.a, &p.phi, s);
        for a in 0..4 {
            let mut acc = Lie::zero();
            for b in 0..4 {
                for d in 0..4 {
                    acc += y[a][b].bracket(p.phi.get(s, d)) * sm.ginv[b][d];
                }
            }
            assert!((acc - j.get(s, a)).norm_sq().sqrt() < 1e-12 * (1.0 + acc.norm_sq().sqrt()));
        }
    }
    // a single generator carries no current
    let mut phi = AdForm::zeros(1, g.n_sites());
    for s in 0..g.n_sites() {
        phi.set(s, 0, Lie::basis(2) * g.position(s)[1].cos());
    }
    let j = ops::supercurrent(&g, &AdForm::zeros(1, g.n_sites()), &phi);
    assert_eq!(j.max_abs(), 0.0);
}

#[test]
fn projections_and_wedge_examples() {
    let g = torus(4);
    let mut f = AdForm::zeros(2, g.n_sites());
    for s in 0..g.n_sites() {
        f.set(s, 0, Lie::basis(0));
    }
    let (plus, minus) = sd_asd_project(&g, &f);
    assert_eq!(plus.get(0, 0), Lie::basis(0) * 0.5);
    assert_eq!(plus.get(0, 5), Lie::basis(0) * 0.5);
    assert_eq!(minus.get(0, 5), Lie::basis(0) * -0.5);
    let (pp, pm) = sd_asd_project(&g, &plus);
    assert_eq!(pp, plus);
    assert_eq!(pm.max_abs(), 0.0);

    let mut x = AdForm::zeros(1, g.n_sites());
    let mut y = AdForm::zeros(1, g.n_sites());
    for s in 0..g.n_sites() {
        x.set(s, 0, Lie::basis(0));
        y.set(s, 1, Lie::basis(1));
    }
    assert_eq!(wedge_bracket(&g, &x, &x).max_abs(), 0.0);
    let w = wedge_bracket(&g, &x, &y);
    assert_eq!(w.get(3, 0), Lie::basis(2));
    // [[Φ∧Φ]∧Φ] = 0: the 3-form of a random Φ
    let p = random_pair(&g, 1, 1.0);
    for s in 0..g.n_sites() {
        let phi = p.phi.one(s);
        let b = pw::wedge_bracket(&phi, &phi);
        for (i, j, k) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
            let c = |p: usize, q: usize| pw::component(&b, p, q);
            let t = c(i, j).bracket(phi[k]) + c(j, k).bracket(phi[i]) + c(k, i).bracket(phi[j]);
            assert!(t.norm_sq() < 1e-28);
        }
    }
}

#[test]
fn gauge_rotation_leaves_scalars_bit_identical() {
    let g = gibbons_hawking(6);
    let p = random_pair(&g, 12, 0.9);
    let r = [[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
    let q: GaugePair<f64> = p.rotated(&r);
    assert_eq!(kw::energy(&g, &p).to_bits(), kw::energy(&g, &q).to_bits());
    let (f, fq) = (ops::curvature(&g, &p.a), ops::curvature(&g, &q.a));
    assert_eq!(f.pointwise_norm_sq(&g), fq.pointwise_norm_sq(&g));
    let ep = kw::energy_report(&g, &p, &[1.0, 2.0]);
    let eq = kw::energy_report(&g, &q, &[1.0, 2.0]);
    assert_eq!(ep.density, eq.density);
}
