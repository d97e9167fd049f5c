use nalgebra::DMatrix;
use saddleloop::counting::{self, slit_disk_pieces, trace_contour};
use saddleloop::dulac::CoveringPoint;
use saddleloop::flow::{self, IntegratorConfig, Line};
use saddleloop::melnikov;
use saddleloop::system::HamiltonianSystem;
use saddleloop::{Error, C64};

const R: f64 = 1.0;
const S_LO: f64 = -0.2;
const S_HI: f64 = 0.1;

fn locus(u: f64) -> f64 {
    0.3 * (S_LO - u).powi(2)
}

fn excluded(z: C64) -> bool {
    z.re < S_LO && z.im.abs() <= locus(z.re) || (z.im == 0.0 && z.re >= S_LO && z.re <= S_HI)
}

/// Coefficients (ascending) of the monic polynomial with these roots.
fn expand(roots: &[C64]) -> Vec<C64> {
    let mut c = vec![C64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
        for (k, a) in c.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * r;
        }
        c = next;
    }
    c
}

fn companion_roots(c: &[f64]) -> Vec<C64> {
    let n = c.len() - 1;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / c[n];
    }
    m.complex_eigenvalues()
        .iter()
        .map(|z| C64::new(z.re, z.im))
        .collect()
}

fn winding_of(coef: &[f64]) -> i64 {
    let pieces = slit_disk_pieces(R, S_LO, S_HI, |u| Ok(locus(u))).unwrap();
    let eval = |z: C64, _th: [f64; 2]| {
        Ok(coef
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, a| acc * z + a))
    };
    trace_contour(&pieces, eval, 24, 20_000).unwrap().winding
}

#[test]
fn winding_matches_companion_count() {
    let cases: Vec<Vec<C64>> = vec![
        vec![C64::new(0.5, 0.0)],
        vec![C64::new(0.3, 0.4), C64::new(0.3, -0.4)],
        vec![
            C64::new(-0.6, 0.5),
            C64::new(-0.6, -0.5),
            C64::new(1.5, 0.0),
        ],
        // inside the excluded lens around the locus
        vec![
            C64::new(-0.7, 0.01),
            C64::new(-0.7, -0.01),
            C64::new(0.6, 0.0),
            C64::new(-2.0, 0.0),
        ],
        vec![
            C64::new(0.0, 0.9),
            C64::new(0.0, -0.9),
            C64::new(0.2, 0.0),
            C64::new(0.8, 0.0),
            C64::new(0.1, 0.3),
            C64::new(0.1, -0.3),
        ],
    ];
    for roots in cases {
        let coef: Vec<f64> = expand(&roots).iter().map(|c| c.re).collect();
        let oracle = companion_roots(&coef)
            .iter()
            .filter(|z| z.norm() < R && !excluded(**z))
            .count() as i64;
        assert_eq!(winding_of(&coef), oracle, "roots {roots:?}");
    }
}

#[test]
fn slit_must_fit_in_the_disk() {
    assert!(slit_disk_pieces(0.1, -0.2, 0.05, |_| Ok(0.0)).is_err());
}

#[test]
fn ydx_has_no_zeros() {
    let sys = HamiltonianSystem::canonical(1.0, 0.0).unwrap();
    let rep = counting::count_zeros(&sys, 1e-3, 0.05, None, &IntegratorConfig::default()).unwrap();
    assert_eq!(rep.winding_count, 0);
    assert_eq!(rep.real_cycle_count, 0);
    assert!(rep.s1 != rep.s2);
}

#[test]
fn tuned_form_has_one_cycle() {
    let s_star = 0.02;
    let sys = melnikov::canonical_tuned(s_star).unwrap();
    let rep = counting::count_zeros(&sys, 1e-3, 0.05, None, &IntegratorConfig::default()).unwrap();
    assert!(rep.winding_count >= 1);
    assert_eq!(rep.real_cycle_count, 1);
    assert!((rep.real_zeros[0] - s_star).abs() < 0.1 * s_star);
}

/// `d1 - d2` at a real point from plain real-time flow to `tau` in both directions.
fn direct_difference(sys: &HamiltonianSystem, eps: f64, z: f64, cfg: &IntegratorConfig) -> f64 {
    let fol = sys.foliation(eps);
    let x0 = sys
        .point_on_segment(&sys.lp.sigma(), C64::new(z, 0.0))
        .unwrap();
    let tau = Line::from_segment(&sys.lp.tau(), 1.6);
    let back = flow::flow_to_line(&fol, x0, -1.0, &tau, 1e3, cfg).unwrap();
    let fwd = flow::flow_to_line(&fol, x0, 1.0, &tau, 1e3, cfg).unwrap();
    sys.sign() * (fol.f_c(back.point[0], back.point[1]) - fol.f_c(fwd.point[0], fwd.point[1])).re
}

#[test]
fn displacement_identity_holds() {
    let sys = HamiltonianSystem::canonical(1.0, 0.0).unwrap();
    let cfg = IntegratorConfig::tight();
    for z in [0.01, 0.02, 0.03, 0.04, 0.05] {
        let a = counting::displacement(&sys, 1e-3, CoveringPoint::real(z), &cfg).unwrap();
        let b = direct_difference(&sys, 1e-3, z, &cfg);
        assert!(
            (a.re - b).abs() < 1e-8 && a.im.abs() < 1e-12,
            "z {z}: {a} vs {b}"
        );
    }
}

#[test]
fn zero_eps_rejected() {
    let sys = HamiltonianSystem::canonical(1.0, 0.0).unwrap();
    let r = counting::build_contour(&sys, 0.0, 0.05, &IntegratorConfig::default());
    assert!(matches!(r, Err(Error::Precondition(_))));
}
