use std::f64::consts::PI;

use saddleloop::melnikov::{self, CycleKind};
use saddleloop::system::{HamiltonianSystem, OneForm};
use saddleloop::{Error, C64};

fn canonical() -> HamiltonianSystem {
    HamiltonianSystem::canonical(1.0, 0.0).unwrap()
}

/// Area inside the real oval `y^2/2 = t + (x^2 - 1)^2 / 4` around the origin, `-1/4 < t < 0`.
fn oval_area(t: f64) -> f64 {
    // turning points x^2 = 1 - 2 sqrt(-t)
    let xp = (1.0 - 2.0 * (-t).sqrt()).sqrt();
    let n = 4000;
    let mut acc = 0.0;
    for k in 0..n {
        let th = PI * (k as f64 + 0.5) / n as f64;
        // x = -xp cos(th) smooths the square-root endpoints
        let x = -xp * th.cos();
        let dx = xp * th.sin() * PI / n as f64;
        let y2 = 2.0 * (t + 0.25 * (x * x - 1.0).powi(2));
        acc += 2.0 * y2.max(0.0).sqrt() * dx;
    }
    acc
}

#[test]
fn m1_of_ydx_is_the_enclosed_area() {
    let sys = canonical();
    let grid = [0.2, 0.1, 0.05, 0.01];
    let m1 = melnikov::melnikov_M1(&sys, &grid).unwrap();
    for (s, v) in grid.iter().zip(m1.values.iter()) {
        let area = oval_area(-s);
        assert!(
            (v.re - area).abs() < 1e-8 * area,
            "s = {s}: {} vs {area}",
            v.re
        );
        assert!(v.im.abs() < 1e-12);
    }
}

#[test]
fn m1_near_the_center_matches_the_ellipse() {
    let sys = canonical();
    let s = 0.2499;
    let v = melnikov::melnikov_M1(&sys, &[s]).unwrap().values[0].re;
    // f ~ (x^2 + y^2)/2 - 1/4 near the origin: circle of radius sqrt(2 (0.25 - s))
    let area = PI * 2.0 * (0.25 - s);
    assert!((v - area).abs() < 1e-3 * area);
}

#[test]
fn m1_limit_is_the_eye_area() {
    let sys = canonical();
    let v = melnikov::melnikov_M1(&sys, &[1e-6]).unwrap().values[0].re;
    let eye = 4.0 * 2f64.sqrt() / 3.0;
    assert!((v - eye).abs() < 1e-3);
}

#[test]
fn periodic_orbit_closes_on_its_level() {
    let sys = canonical();
    let cyc = melnikov::periodic_orbit(&sys, -0.05).unwrap();
    assert_eq!(cyc.kind, CycleKind::Periodic);
    for p in &cyc.samples {
        assert!((sys.f.eval_c(p[0], p[1]) - C64::new(-0.05, 0.0)).norm() < 1e-8);
    }
}

#[test]
fn orbit_outside_the_annulus_rejected() {
    let sys = canonical();
    assert!(matches!(
        melnikov::periodic_orbit(&sys, 0.05),
        Err(Error::OutOfAnnulus(_))
    ));
}

#[test]
fn vanishing_integrals_are_imaginary_and_match_corner_differences() {
    let sys = canonical();
    for idx in [1, 2] {
        let fam = melnikov::VanishingFamily::new(&sys, idx).unwrap();
        for s in [0.02, 0.005, 0.001] {
            for annulus in [true, false] {
                let t = if annulus {
                    sys.sign() * s
                } else {
                    -sys.sign() * s
                };
                let j = melnikov::abelian_integral(&fam.cycle(t).unwrap(), &sys.omega).unwrap();
                let d = melnikov::corner_difference(&sys, idx, s, annulus).unwrap();
                assert!(j.re.abs() < 1e-10 * j.norm(), "{j}");
                assert!(
                    (j - d).norm() < 1e-8,
                    "saddle {idx} s {s} annulus {annulus}: {j} vs {d}"
                );
            }
        }
    }
}

#[test]
fn decomposition_recovers_m1() {
    let sys = HamiltonianSystem::canonical(1.0, -2.0).unwrap();
    let grid = melnikov::default_grid(&sys);
    let m1 = melnikov::melnikov_M1(&sys, &grid).unwrap();
    let dec = melnikov::decompose_log(&sys, &m1).unwrap();
    for k in 0..grid.len() {
        let back = dec.fsum()[k] * grid[k].ln() + dec.f3[k];
        assert!((back - dec.m1[k]).abs() < 1e-12 * (1.0 + dec.m1[k].abs()));
    }
    // f3 is analytic: second differences stay small relative to its size
    assert!(dec.f3_roughness() < 0.2, "{}", dec.f3_roughness());
}

#[test]
fn zero_form_gives_zero_m1() {
    let sys = canonical().with_omega(OneForm::zero());
    let m1 = melnikov::melnikov_M1(&sys, &[0.1, 0.01]).unwrap();
    assert!(m1.values.iter().all(|v| v.norm() == 0.0));
    assert!(matches!(
        melnikov::estimate_Md(&sys, -0.1, &[1e-2, 1e-3, 1e-4], 3),
        Err(Error::Degenerate)
    ));
}

#[test]
fn holonomy_order_one_matches_m1() {
    let sys = canonical();
    let est = melnikov::estimate_Md(&sys, -0.05, &[1e-3, 5e-4, 2.5e-4], 3).unwrap();
    assert_eq!(est.order, 1);
    assert!(est.m1_rel_diff.unwrap() < 1e-3, "{:?}", est);
}

#[test]
fn tuned_form_has_its_zero() {
    let s_star = 0.02;
    let sys = melnikov::canonical_tuned(s_star).unwrap();
    let m = melnikov::melnikov_M1(&sys, &[0.9 * s_star, s_star, 1.1 * s_star]).unwrap();
    assert!(m.values[1].re.abs() < 1e-10);
    assert!(m.values[0].re * m.values[2].re < 0.0);
}
