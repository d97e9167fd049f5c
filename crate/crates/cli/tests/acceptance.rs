//! Acceptance checks, one PASS/FAIL line each. Run with `cargo test --test acceptance`.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saddleloop::bounds::{self, CharacteristicSet};
use saddleloop::counting::{self, slit_disk_pieces, trace_contour};
use saddleloop::dulac::{self, CoveringPoint, DulacMap};
use saddleloop::fit::characteristic_number;
use saddleloop::flow::{self, IntegratorConfig, Line};
use saddleloop::melnikov;
use saddleloop::system::HamiltonianSystem;
use saddleloop::{Rational64, C64};

type Outcome = Result<String, String>;

fn canonical() -> HamiltonianSystem {
    HamiltonianSystem::canonical(1.0, 0.0).unwrap()
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn pontryagin_order() -> Outcome {
    let sys = canonical();
    let cfg = IntegratorConfig::tight();
    let eps: [f64; 3] = [1e-2, 1e-3, 1e-4];
    let lx: Vec<f64> = eps.iter().map(|v| v.ln()).collect();
    let mut worst = f64::INFINITY;
    for idx in [1, 2] {
        let base = DulacMap::new(&sys, 0.0, idx, &cfg).map_err(e)?;
        let maps: Vec<DulacMap> = eps
            .iter()
            .map(|&v| DulacMap::new(&sys, v, idx, &cfg))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        for z in [0.01, 0.02, 0.04] {
            let zp = CoveringPoint::real(z);
            let m = -sys.sign() * base.eval_full(zp, false).map_err(e)?.integral;
            let mut ly = Vec::new();
            for (map, &v) in maps.iter().zip(&eps) {
                let d = map.eval(zp).map_err(e)?;
                ly.push((d - z - m * v).norm().ln());
            }
            worst = worst.min(slope(&lx, &ly));
        }
    }
    let msg = format!("min slope {worst:.3}");
    if worst >= 1.9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn zero_locus_order() -> Outcome {
    let sys = canonical();
    let cfg = IntegratorConfig::tight();
    let mut worst_order = f64::INFINITY;
    let mut worst_res = 0.0_f64;
    for idx in [1, 2] {
        let mut gaps = Vec::new();
        for eps in [1e-2, 1e-3] {
            let c =
                dulac::trace_zero_locus(&sys, eps, idx, (-0.05, -0.005), 16, &cfg).map_err(e)?;
            if c.samples.iter().any(|s| !s.converged) {
                return Err(format!(
                    "saddle {idx}: unconverged locus samples at eps {eps}"
                ));
            }
            worst_res = c
                .samples
                .iter()
                .fold(worst_res, |m, s| m.max(s.residual.abs()));
            gaps.push(
                c.samples
                    .iter()
                    .fold(0.0_f64, |m, s| m.max((s.v - s.v_pred).abs())),
            );
        }
        worst_order = worst_order.min((gaps[0] / gaps[1]).log10());
    }
    let msg = format!("min order {worst_order:.3}, max residual {worst_res:.2e}");
    if worst_order >= 1.9 && worst_res < 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn orientation_identity() -> Outcome {
    let sys = canonical();
    let mut worst = 0.0_f64;
    for idx in [1, 2] {
        let fam = melnikov::VanishingFamily::new(&sys, idx).map_err(e)?;
        for s in [0.02, 0.005, 0.001] {
            for annulus in [true, false] {
                let t = if annulus {
                    sys.sign() * s
                } else {
                    -sys.sign() * s
                };
                let j =
                    melnikov::abelian_integral(&fam.cycle(t).map_err(e)?, &sys.omega).map_err(e)?;
                let d = melnikov::corner_difference(&sys, idx, s, annulus).map_err(e)?;
                worst = worst.max((j - d).norm());
            }
        }
    }
    let msg = format!("max gap {worst:.2e}");
    if worst < 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn reality() -> Outcome {
    let mut worst_m1 = 0.0_f64;
    let mut worst_delta = 0.0_f64;
    for (a, b) in [(1.0, 0.0), (1.0, -2.0)] {
        let sys = HamiltonianSystem::canonical(a, b).map_err(e)?;
        let grid = melnikov::default_grid(&sys);
        let m1 = melnikov::melnikov_M1(&sys, &grid).map_err(e)?;
        let scale = m1.values.iter().fold(0.0_f64, |m, v| m.max(v.norm()));
        worst_m1 = m1
            .values
            .iter()
            .fold(worst_m1, |m, v| m.max(v.im.abs() / scale));
        for idx in [1, 2] {
            let fam = melnikov::VanishingFamily::new(&sys, idx).map_err(e)?;
            for &s in &grid {
                let j =
                    melnikov::abelian_integral(&fam.cycle(sys.sign() * s).map_err(e)?, &sys.omega)
                        .map_err(e)?;
                worst_delta = worst_delta.max(j.re.abs() / j.norm().max(1e-300));
            }
        }
    }
    let msg = format!("max |Im M1|/scale {worst_m1:.2e}, max |Re J|/|J| {worst_delta:.2e}");
    if worst_m1 <= 1e-10 && worst_delta <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn displacement_identity() -> Outcome {
    let sys = canonical();
    let cfg = IntegratorConfig::tight();
    let eps = 1e-3;
    let fol = sys.foliation(eps);
    let tau = Line::from_segment(&sys.lp.tau(), 1.6);
    let mut worst = 0.0_f64;
    for z in [0.01, 0.02, 0.03, 0.04, 0.05] {
        let a = counting::displacement(&sys, eps, CoveringPoint::real(z), &cfg).map_err(e)?;
        // independent: plain real-time flow from sigma to tau in both directions
        let x0 = sys
            .point_on_segment(&sys.lp.sigma(), C64::new(z, 0.0))
            .map_err(e)?;
        let back = flow::flow_to_line(&fol, x0, -1.0, &tau, 1e3, &cfg).map_err(e)?;
        let fwd = flow::flow_to_line(&fol, x0, 1.0, &tau, 1e3, &cfg).map_err(e)?;
        let b = sys.sign()
            * (fol.f_c(back.point[0], back.point[1]) - fol.f_c(fwd.point[0], fwd.point[1]));
        worst = worst.max((a - b).norm());
    }
    let msg = format!("max gap {worst:.2e}");
    if worst < 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

const R: f64 = 1.0;
const S_LO: f64 = -0.2;
const S_HI: f64 = 0.1;

fn locus(u: f64) -> f64 {
    0.3 * (S_LO - u).powi(2)
}

fn excluded(z: C64) -> bool {
    (z.re < S_LO && z.im.abs() <= locus(z.re))
        || (z.im.abs() < 1e-12 && z.re >= S_LO && z.re <= S_HI)
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

/// Roots kept a margin away from the contour: the circle, the locus and the slit.
fn sample_roots(rng: &mut ChaCha8Rng, degree: usize) -> Vec<C64> {
    let margin = 0.05;
    let mut roots = Vec::new();
    while roots.len() < degree {
        if degree - roots.len() >= 2 && rng.random_bool(0.6) {
            let z = C64::new(rng.random_range(-1.3..1.3), rng.random_range(margin..1.3));
            let near_locus = z.re < S_LO + margin && (z.im - locus(z.re)).abs() < margin;
            if (z.norm() - R).abs() < margin || near_locus {
                continue;
            }
            roots.push(z);
            roots.push(z.conj());
        } else {
            let x: f64 = rng.random_range(-1.3..1.3);
            if (x.abs() - R).abs() < margin || (x > S_LO - 2.0 * margin && x < S_HI + margin) {
                continue;
            }
            roots.push(C64::new(x, 0.0));
        }
    }
    roots
}

fn expand(roots: &[C64], lead: f64) -> Vec<f64> {
    let mut c = vec![C64::new(lead, 0.0)];
    for r in roots {
        let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
        for (k, a) in c.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * r;
        }
        c = next;
    }
    c.iter().map(|v| v.re).collect()
}

fn argument_principle(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = Vec::new();
    let mut counts = Vec::new();
    for k in 0..20 {
        let degree = rng.random_range(1..=6);
        let lead = rng.random_range(0.5..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let coef = expand(&sample_roots(&mut rng, degree), lead);
        let oracle = companion_roots(&coef)
            .iter()
            .filter(|z| z.norm() < R && !excluded(**z))
            .count() as i64;
        let pieces = slit_disk_pieces(R, S_LO, S_HI, |u| Ok(locus(u))).map_err(e)?;
        let eval = |z: C64, _th: [f64; 2]| {
            Ok(coef
                .iter()
                .rev()
                .fold(C64::new(0.0, 0.0), |acc, a| acc * z + a))
        };
        let w = trace_contour(&pieces, eval, 24, 20_000).map_err(e)?.winding;
        counts.push(oracle);
        if w != oracle {
            mismatches.push(format!("case {k}: winding {w} vs {oracle}"));
        }
    }
    if mismatches.is_empty() {
        Ok(format!("20/20 match, counts {counts:?}"))
    } else {
        Err(mismatches.join("; "))
    }
}

fn limit_cycle_detection() -> Outcome {
    let cfg = IntegratorConfig::default();
    let s_star = 0.02;
    let tuned = melnikov::canonical_tuned(s_star).map_err(e)?;
    let rep = counting::count_zeros(&tuned, 1e-3, 0.05, None, &cfg).map_err(e)?;
    let near = rep
        .real_zeros
        .iter()
        .filter(|z| (**z - s_star).abs() < 0.1 * s_star)
        .count();
    let mut ok = rep.real_cycle_count == 1 && near == 1 && rep.winding_count >= 1;
    let mut msg = format!(
        "tuned: winding {}, real zeros {:?}",
        rep.winding_count, rep.real_zeros
    );
    let ydx = canonical();
    for eps in [1e-2, 1e-3, 1e-4] {
        let r = counting::count_zeros(&ydx, eps, 0.05, None, &cfg).map_err(e)?;
        ok &= r.winding_count == 0 && r.real_cycle_count == 0;
        msg.push_str(&format!(
            "; y dx eps {eps:e}: winding {}, real {}",
            r.winding_count, r.real_cycle_count
        ));
    }
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn bound_formulas() -> Outcome {
    let r = |n: i64| Rational64::from_integer(n);
    let mut ok =
        bounds::bound_two_saddle(&CharacteristicSet::from_integers(1, 1, 1, 1).map_err(e)?) == r(4);
    for p in 1..=3 {
        ok &= bounds::bound_example_form(r(p), r(p), r(p), r(p)) == r(1 + 3 * p);
    }
    ok &= bounds::bound_roussarie(2, 2) == 3;
    ok &= bounds::bound_dumortier_roussarie(2) == 4;
    if ok {
        Ok("all exact".into())
    } else {
        Err("formula mismatch".into())
    }
}

fn fitter(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid: Vec<f64> = (0..16).map(|j| 0.0625 * 0.5f64.powi(j)).collect();
    let ps = [(0, 1), (1, 2), (1, 1), (3, 2), (2, 1)];
    let trials = 10;
    let mut fails = Vec::new();
    for (pn, pd) in ps {
        for q in 0..=2u32 {
            let p = pn as f64 / pd as f64;
            for _ in 0..trials {
                let v: Vec<f64> = grid
                    .iter()
                    .map(|s| {
                        s.powf(p) * s.ln().powi(q as i32) * (1.0 + rng.random_range(-0.01..0.01))
                    })
                    .collect();
                match characteristic_number(&grid, &v) {
                    Ok(m) if m.p == Some(Rational64::new(pn, pd)) && m.q == q => {}
                    Ok(m) => fails.push(format!("({p},{q}) -> ({:?},{})", m.p, m.q)),
                    Err(err) => fails.push(format!("({p},{q}) -> {err}")),
                }
            }
        }
    }
    if fails.is_empty() {
        Ok(format!("{} fits exact", ps.len() * 3 * trials))
    } else {
        Err(fails.join("; "))
    }
}

fn determinism() -> Outcome {
    let sys = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../systems/canonical_1m2x2.json");
    let dir = tempfile::tempdir().map_err(e)?;
    let mut bytes = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let args = [
            "saddleloop",
            sys.to_str().unwrap(),
            "--command",
            "analyze",
            "--eps",
            "1e-3",
            "--radius",
            "0.05",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ];
        let (code, _) = saddleloop_cli::main_with_args(args);
        if code != 0 {
            return Err(format!("analyze exited with {code}"));
        }
        bytes.push(std::fs::read(out.join("summary.json")).map_err(e)?);
    }
    if bytes[0] == bytes[1] {
        Ok(format!("{} identical bytes", bytes[0].len()))
    } else {
        Err("summary.json differs between runs".into())
    }
}

fn main() {
    let seed = 20240601;
    let checks: Vec<(u32, &str, Duration, Box<dyn Fn() -> Outcome>)> = vec![
        (
            1,
            "Pontryagin order",
            Duration::from_secs(60),
            Box::new(pontryagin_order),
        ),
        (
            2,
            "zero-locus parametrization",
            Duration::from_secs(120),
            Box::new(zero_locus_order),
        ),
        (
            3,
            "orientation identity",
            Duration::from_secs(60),
            Box::new(orientation_identity),
        ),
        (
            4,
            "reality and imaginarity",
            Duration::from_secs(30),
            Box::new(reality),
        ),
        (
            5,
            "displacement identity",
            Duration::from_secs(60),
            Box::new(displacement_identity),
        ),
        (
            6,
            "argument-principle oracle",
            Duration::from_secs(30),
            Box::new(move || argument_principle(seed)),
        ),
        (
            7,
            "limit-cycle detection",
            Duration::from_secs(300),
            Box::new(limit_cycle_detection),
        ),
        (
            8,
            "bound formulas",
            Duration::from_secs(1),
            Box::new(bound_formulas),
        ),
        (
            9,
            "characteristic-number fitter",
            Duration::from_secs(10),
            Box::new(move || fitter(seed)),
        ),
        (
            10,
            "determinism",
            Duration::from_secs(600),
            Box::new(determinism),
        ),
    ];
    let mut failed = 0;
    for (n, name, limit, check) in &checks {
        let t0 = Instant::now();
        let res = check();
        let dt = t0.elapsed();
        let (ok, detail) = match res {
            Ok(d) if dt <= *limit => (true, d),
            Ok(d) => (false, format!("{d}; took {dt:.2?} over {limit:?}")),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {n:>2} {}: {name} ({detail}; {dt:.2?})",
            if ok { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        checks.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
