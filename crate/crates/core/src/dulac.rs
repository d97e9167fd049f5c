//! Corner transitions (Dulac maps) near the saddles, continued on a sector of
//! the universal cover, and the zero locus of their imaginary part.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{self, Chart, IntegratorConfig, Line, Piece, Point};
use crate::melnikov;
use crate::system::{Foliation, HamiltonianSystem};

/// Distance from the saddle to the cross-sections.
pub const SECTION_DISTANCE: f64 = 0.25;

/// `z = rho e^{i phi}` on the universal cover; `phi` is not reduced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoveringPoint {
    pub rho: f64,
    pub phi: f64,
}

impl CoveringPoint {
    pub fn new(rho: f64, phi: f64) -> Self {
        Self { rho, phi }
    }

    pub fn real(s: f64) -> Self {
        if s >= 0.0 {
            Self { rho: s, phi: 0.0 }
        } else {
            Self { rho: -s, phi: PI }
        }
    }

    pub fn value(&self) -> C64 {
        C64::from_polar(self.rho, self.phi)
    }
}

/// Branch of `arg(w)` closest to `hint`.
pub fn arg_near(w: C64, hint: f64) -> f64 {
    let a = w.arg();
    a + 2.0 * PI * ((hint - a) / (2.0 * PI)).round()
}

/// Linear chart at a saddle with the entry separatrix along `a` and the exit
/// separatrix along `b`. Sections are `a = h` (entry) and `b = h` (exit).
#[derive(Debug, Clone)]
pub struct Corner {
    pub saddle_index: usize,
    pub origin: [f64; 2],
    pub e_in: [f64; 2],
    pub e_out: [f64; 2],
    pub chart: Chart,
    /// `f ~ kappa a b` near the saddle.
    pub kappa: f64,
    pub h: f64,
    /// Perturbed saddle in chart coordinates.
    pub sad: (f64, f64),
    /// Value of `sign f` where the perturbed entry separatrix meets the entry section.
    pub c_entry: f64,
    sign: f64,
}

impl Corner {
    /// `flow_order = true` enters along the stable separatrix (the Dulac map
    /// in the direction of the flow); `false` is the reverse transition.
    pub fn new(
        system: &HamiltonianSystem,
        fol: &Foliation,
        saddle_index: usize,
        flow_order: bool,
        cfg: &IntegratorConfig,
    ) -> Result<Self> {
        if saddle_index != 1 && saddle_index != 2 {
            return Err(Error::pre("saddle index must be 1 or 2"));
        }
        let lp = &system.lp;
        let p0 = lp.saddle(saddle_index).pos();
        let fol0 = Foliation::new(&system.f, &system.omega, 0.0);
        let (es, eu, _, _) = flow::saddle_directions(&fol0, p0)?;
        // loop branches: stable one faces the incoming connection
        let (m_in, m_out) = if saddle_index == 2 {
            (lp.mid_forward, lp.mid_backward)
        } else {
            (lp.mid_backward, lp.mid_forward)
        };
        let orient = |e: [f64; 2], m: [f64; 2]| {
            if e[0] * (m[0] - p0[0]) + e[1] * (m[1] - p0[1]) >= 0.0 {
                e
            } else {
                [-e[0], -e[1]]
            }
        };
        let es = orient(es, m_in);
        let eu = orient(eu, m_out);
        let (e_in, e_out) = if flow_order { (es, eu) } else { (eu, es) };
        let chart = Chart::from_basis(p0, e_in, e_out);
        let fxx = system.f.diff_x().diff_x().eval_r(p0[0], p0[1]);
        let fxy = system.f.diff_x().diff_y().eval_r(p0[0], p0[1]);
        let fyy = system.f.diff_y().diff_y().eval_r(p0[0], p0[1]);
        let kappa = e_in[0] * (fxx * e_out[0] + fxy * e_out[1])
            + e_in[1] * (fxy * e_out[0] + fyy * e_out[1]);
        let sign = system.sign();
        if sign * kappa <= 0.0 {
            return Err(Error::pre("annulus does not lie in the separatrix corner"));
        }
        let h = SECTION_DISTANCE;
        let ps = fol.refine_singular_point(p0)?;
        let sp = chart.to_real(ps);
        let mut corner = Self {
            saddle_index,
            origin: p0,
            e_in,
            e_out,
            chart,
            kappa,
            h,
            sad: (sp[0], sp[1]),
            c_entry: 0.0,
            sign,
        };
        if fol.eps != 0.0 {
            let cr = flow::separatrix_crossing(fol, p0, e_in, &corner.entry_line(), cfg)?;
            corner.c_entry = sign * fol.f_c(cr.point[0], cr.point[1]).re;
        }
        Ok(corner)
    }

    fn k(&self) -> f64 {
        self.sign * self.kappa
    }

    /// `a = h`, parametrized by `b`.
    pub fn entry_line(&self) -> Line {
        let chart = Chart::new(
            self.chart.m,
            [self.chart.off[0] + self.h, self.chart.off[1]],
        );
        Line {
            chart,
            mu_min: -0.5 * self.h,
            mu_max: 30.0 * self.h,
        }
    }

    /// `b = h`, parametrized by `a`.
    pub fn exit_line(&self) -> Line {
        let sw = self.chart.swapped();
        let chart = Chart::new(sw.m, [sw.off[0] + self.h, sw.off[1]]);
        Line {
            chart,
            mu_min: -0.5 * self.h,
            mu_max: 30.0 * self.h,
        }
    }

    /// Point of the entry section with `sign f = z`, continued from the separatrix point.
    pub fn entry_point(&self, f: &crate::poly::Polynomial2, z: C64) -> Result<Point> {
        let fx = f.diff_x();
        let fy = f.diff_y();
        let at = |b: C64| self.chart.from(C64::new(self.h, 0.0), b);
        let val = |b: C64| {
            let p = at(b);
            f.eval_c(p[0], p[1]) * self.sign
        };
        let der = |b: C64| {
            let p = at(b);
            (fx.eval_c(p[0], p[1]) * self.e_out[0] + fy.eval_c(p[0], p[1]) * self.e_out[1])
                * self.sign
        };
        let mut b = C64::new(0.0, 0.0);
        let z0 = val(b);
        let n = 32;
        for k in 1..=n {
            let goal = z0 + (z - z0) * (k as f64 / n as f64);
            for _ in 0..30 {
                let step = (val(b) - goal) / der(b);
                b -= step;
                if step.norm() < 1e-16 * (1.0 + b.norm()) {
                    break;
                }
            }
        }
        if (val(b) - z).norm() > 1e-12 * (1.0 + z.norm()) {
            return Err(Error::SectionMiss);
        }
        Ok(at(b))
    }

    /// Transition from a point on the entry section to the exit section.
    ///
    /// `theta` selects the sheet: the continuous argument of `z - c_entry`.
    /// The base path runs over `a` down to the waist `|a| = |b|`, turns in the
    /// `b`-plane around the saddle by the sheet angle, then runs over `b`.
    pub fn transit(
        &self,
        fol: &Foliation,
        start: Point,
        theta: f64,
        cfg: &IntegratorConfig,
        keep: bool,
    ) -> Result<CornerLift> {
        let (a0, _) = self.chart.to(&start);
        let z = fol.f_c(start[0], start[1]) * self.sign;
        let dz = z - self.c_entry;
        let rw = (dz.norm() / self.k()).sqrt();
        let a_w = C64::new(self.sad.0 + rw, 0.0);
        let mut samples = Vec::new();
        let mut integral = C64::new(0.0, 0.0);

        let leg1 = flow::lift_piece(
            fol,
            &self.chart,
            start,
            &Piece::Line { from: a0, to: a_w },
            cfg,
            keep,
        )?;
        integral += leg1.integral;
        samples.extend(leg1.samples.iter().map(|s| s.1));
        let mut cur = leg1.end;

        let bchart = self.chart.swapped();
        let (b_w, _) = bchart.to(&cur);
        let bc = C64::new(self.sad.1, 0.0);
        let r = (b_w - bc).norm();
        let th0 = arg_near(b_w - bc, theta);
        if th0.abs() > 1e-15 {
            let arc = Piece::Arc {
                center: bc,
                radius: r,
                arg_from: th0,
                arg_to: 0.0,
            };
            // the arc starts exactly where leg 1 ended
            let leg2 = flow::lift_piece(fol, &bchart, cur, &arc, cfg, keep)?;
            integral += leg2.integral;
            samples.extend(leg2.samples.iter().map(|s| s.1));
            cur = leg2.end;
        }
        let (b_now, _) = bchart.to(&cur);
        let leg3 = flow::lift_piece(
            fol,
            &bchart,
            cur,
            &Piece::Line {
                from: b_now,
                to: C64::new(self.h, 0.0),
            },
            cfg,
            keep,
        )?;
        integral += leg3.integral;
        samples.extend(leg3.samples.iter().map(|s| s.1));
        let end = leg3.end;
        let (_, a_end) = bchart.to(&end);
        if !(a_end.norm() < 50.0 * self.h) {
            return Err(Error::SectionMiss);
        }
        let value = fol.f_c(end[0], end[1]) * self.sign;
        Ok(CornerLift {
            end,
            value,
            integral,
            samples,
        })
    }
}

#[derive(Debug, Clone)]
pub struct CornerLift {
    pub end: Point,
    /// `sign f` at the end point.
    pub value: C64,
    /// `integral omega_0` along the lifted path.
    pub integral: C64,
    pub samples: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DulacSample {
    pub input: CoveringPoint,
    pub value: C64,
    pub eps: f64,
    pub saddle_index: usize,
    pub lift: Vec<Point>,
}

/// Dulac map of one saddle at fixed eps, sections fixed across eps.
#[derive(Debug, Clone)]
pub struct DulacMap {
    pub corner: Corner,
    pub fol: Foliation,
    pub cfg: IntegratorConfig,
    f: crate::poly::Polynomial2,
}

impl DulacMap {
    pub fn new(
        system: &HamiltonianSystem,
        eps: f64,
        saddle_index: usize,
        cfg: &IntegratorConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let fol = system.foliation(eps);
        let corner = Corner::new(system, &fol, saddle_index, true, cfg)?;
        Ok(Self {
            corner,
            fol,
            cfg: *cfg,
            f: system.f.clone(),
        })
    }

    /// `d(z)` and the integral of `omega_0` along the lifted path.
    pub fn eval_full(&self, z: CoveringPoint, keep: bool) -> Result<CornerLift> {
        let zv = z.value();
        let start = self.corner.entry_point(&self.f, zv)?;
        let theta = arg_near(zv - self.corner.c_entry, z.phi);
        self.corner
            .transit(&self.fol, start, theta, &self.cfg, keep)
    }

    pub fn eval(&self, z: CoveringPoint) -> Result<C64> {
        Ok(self.eval_full(z, false)?.value)
    }

    /// Value at `u + i v` on the sheet reached through the upper half plane.
    pub fn eval_upper(&self, z: C64) -> Result<C64> {
        let mut phi = z.arg();
        if phi < -0.5 * PI {
            phi += 2.0 * PI;
        }
        self.eval(CoveringPoint::new(z.norm(), phi))
    }
}

/// Dulac map value at one covering point.
pub fn dulac_map(
    system: &HamiltonianSystem,
    eps: f64,
    saddle_index: usize,
    z: CoveringPoint,
    config: &IntegratorConfig,
) -> Result<DulacSample> {
    let map = DulacMap::new(system, eps, saddle_index, config)?;
    let out = map.eval_full(z, true)?;
    Ok(DulacSample {
        input: z,
        value: out.value,
        eps,
        saddle_index,
        lift: out.samples,
    })
}

/// Empirical admissible radius per argument (factor-2 resolution).
pub fn probe_sector(
    system: &HamiltonianSystem,
    eps: f64,
    saddle_index: usize,
    phis: &[f64],
    config: &IntegratorConfig,
) -> Result<Vec<(f64, f64)>> {
    let map = DulacMap::new(system, eps, saddle_index, config)?;
    let rho_max = system.lp.s_max();
    let mut out = Vec::with_capacity(phis.len());
    for &phi in phis {
        let mut rho = rho_max;
        let mut found = 0.0;
        for _ in 0..30 {
            if let Ok(v) = map.eval(CoveringPoint::new(rho, phi)) {
                if v.is_finite() {
                    found = rho;
                    break;
                }
            }
            rho *= 0.5;
        }
        out.push((phi, found));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocusSample {
    pub u: f64,
    pub v: f64,
    pub v_pred: f64,
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroLocusCurve {
    pub eps: f64,
    pub saddle_index: usize,
    /// Leading eps-order used for the prediction.
    pub order: u32,
    pub samples: Vec<LocusSample>,
}

/// Solves `Im g(v) = 0` by secant iteration from `v0`.
pub fn solve_imaginary_zero<G>(mut g: G, v0: f64, scale: f64) -> Result<(f64, f64)>
where
    G: FnMut(f64) -> Result<f64>,
{
    let mut x0 = v0;
    let mut g0 = g(x0)?;
    let mut x1 = v0 + 1e-3 * v0.abs().max(scale) + 1e-9 * scale;
    let mut g1 = g(x1)?;
    for _ in 0..40 {
        if g1.abs() < 1e-14 * scale.max(1e-300) || g1 == 0.0 {
            return Ok((x1, g1.abs()));
        }
        if g1 == g0 {
            break;
        }
        let x2 = x1 - g1 * (x1 - x0) / (g1 - g0);
        x0 = x1;
        g0 = g1;
        x1 = x2;
        g1 = g(x1)?;
        if (x1 - x0).abs() < 1e-16 * (1.0 + x1.abs()) {
            return Ok((x1, g1.abs()));
        }
    }
    if g1.abs() < 1e-11 * scale.max(1e-300) {
        Ok((x1, g1.abs()))
    } else {
        Err(Error::SeedDivergence(x1))
    }
}

/// Traces `Im d(u + i v) = 0` for `u` on a geometric grid in `u_range` (`u < 0`).
pub fn trace_zero_locus(
    system: &HamiltonianSystem,
    eps: f64,
    saddle_index: usize,
    u_range: (f64, f64),
    n_samples: usize,
    config: &IntegratorConfig,
) -> Result<ZeroLocusCurve> {
    if eps == 0.0 || system.omega.is_zero() {
        return Err(Error::pre(
            "zero locus needs eps != 0 and a nonzero perturbation",
        ));
    }
    let (u_min, u_max) = u_range;
    if !(u_min < u_max && u_max < 0.0) || n_samples < 2 {
        return Err(Error::pre("u range must be negative and ordered"));
    }
    let map = DulacMap::new(system, eps, saddle_index, config)?;
    let fam = melnikov::VanishingFamily::new(system, saddle_index)?;
    let ratio = u_max / u_min;
    let us: Vec<f64> = (0..n_samples)
        .map(|k| u_min * ratio.powf(k as f64 / (n_samples - 1) as f64))
        .collect();
    // first-order prediction; falls back to a Newton seed if it vanishes
    let preds: Vec<f64> = us
        .iter()
        .map(|&u| fam.locus_slope(system, -u).map(|m| eps * m))
        .collect::<Result<Vec<_>>>()?;
    let scale_pred = preds.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let order = if scale_pred > 1e-12 * eps * system.lp.s_max() {
        1
    } else {
        0
    };
    let mut samples = Vec::with_capacity(us.len());
    for (k, &u) in us.iter().enumerate() {
        let seed = if order == 1 {
            preds[k]
        } else {
            let im0 = map.eval_upper(C64::new(u, 0.0))?.im;
            -im0
        };
        let g = |v: f64| map.eval_upper(C64::new(u, v)).map(|d| d.im);
        match solve_imaginary_zero(g, seed, u.abs()) {
            Ok((v, res)) => samples.push(LocusSample {
                u,
                v,
                v_pred: seed,
                residual: res,
                converged: true,
            }),
            Err(_) => samples.push(LocusSample {
                u,
                v: f64::NAN,
                v_pred: seed,
                residual: f64::NAN,
                converged: false,
            }),
        }
    }
    // branch jumps: a step in v may not exceed three times the predicted step
    for k in 1..samples.len() {
        let (a, b) = (&samples[k - 1], &samples[k]);
        if !(a.converged && b.converged) {
            continue;
        }
        let dv = (b.v - a.v).abs();
        let dp = (b.v_pred - a.v_pred).abs();
        if dv > 3.0 * dp + 1e-12 * eps * system.lp.s_max() {
            samples[k].converged = false;
        }
    }
    Ok(ZeroLocusCurve {
        eps,
        saddle_index,
        order,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arg_near_picks_the_closest_branch() {
        let w = C64::new(-1.0, 1e-3);
        assert!((arg_near(w, -3.0) - (w.arg() - 2.0 * PI)).abs() < 1e-15);
        assert!((arg_near(w, 3.0) - w.arg()).abs() < 1e-15);
    }

    #[test]
    fn covering_point_value() {
        let z = CoveringPoint::new(2.0, PI / 2.0 + 2.0 * PI);
        assert!((z.value() - C64::new(0.0, 2.0)).norm() < 1e-14);
        assert_eq!(CoveringPoint::real(0.5).phi, 0.0);
    }

    #[test]
    fn secant_reports_divergence() {
        let r = solve_imaginary_zero(|v| Ok(v * v + 1.0), 0.3, 1.0);
        assert!(matches!(r, Err(Error::SeedDivergence(_))));
    }
}
