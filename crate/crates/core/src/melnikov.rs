//! Abelian integrals over periodic orbits and vanishing cycles, the first
//! Melnikov function, its logarithmic decomposition and higher-order estimates.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::dulac::{Corner, CoveringPoint};
use crate::error::{Error, Result};
use crate::flow::{self, IntegratorConfig};
use crate::ode::{self, Control};
use crate::poly::{Poly1, Polynomial2};
use crate::roots;
use crate::system::{normalized_parameter, Foliation, HamiltonianSystem, OneForm, Segment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKind {
    Periodic,
    Vanishing,
}

#[derive(Debug, Clone)]
enum CycleParam {
    Orbit {
        start: [f64; 2],
        length: f64,
    },
    Circle {
        center: C64,
        radius: f64,
        a: f64,
        b: Poly1,
        c: Poly1,
    },
}

/// A closed cycle on the fiber `f = level`.
#[derive(Debug, Clone)]
pub struct FiberCycle {
    pub kind: CycleKind,
    pub level: f64,
    pub saddle_index: Option<usize>,
    pub samples: Vec<[C64; 2]>,
    /// +1 keeps the parametrization's direction, -1 reverses it.
    pub orientation: f64,
    f: Polynomial2,
    param: CycleParam,
}

const QUAD_START: usize = 64;
const QUAD_MAX: usize = 1 << 16;

fn unit_field(fol: &Foliation, x: f64, y: f64) -> Result<[f64; 2]> {
    let v = fol.field(x, y);
    let n = v[0].hypot(v[1]);
    if n < 1e-14 {
        return Err(Error::NoReturn);
    }
    Ok([v[0] / n, v[1] / n])
}

/// Arclength to the first return of the real orbit through `x0` to `seg`.
fn return_length(
    fol: &Foliation,
    x0: [f64; 2],
    seg: &Segment,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let nrm = seg.normal();
    let w = |p: &[f64; 2]| nrm[0] * (p[0] - seg.origin[0]) + nrm[1] * (p[1] - seg.origin[1]);
    let lam =
        |p: &[f64; 2]| seg.dir[0] * (p[0] - seg.origin[0]) + seg.dir[1] * (p[1] - seg.origin[1]);
    let rhs = |_t: f64, p: &[f64; 2]| unit_field(fol, p[0], p[1]);
    let mut ctl = cfg.control();
    ctl.h_max = 0.02;
    let mut hit = None;
    ode::integrate(rhs, 0.0, x0, 1e4, &ctl, |st| {
        let (w0, w1) = (w(&st.y0), w(&st.y1));
        let l1 = lam(&st.y1);
        if st.t0 > 0.0 && w0 * w1 < 0.0 && l1 > 0.0 && l1 < 1.6 * seg.length {
            hit = Some((st.t0, st.y0, st.t1, w0, w1));
            return Ok(Control::Stop);
        }
        Ok(Control::Continue)
    })?;
    let (t0, y0, t1, w0, w1) = hit.ok_or(Error::NoReturn)?;
    let mut s = t0 + (t1 - t0) * w0 / (w0 - w1);
    for _ in 0..6 {
        let p = ode::solve(rhs, t0, y0, s, &ctl)?.y;
        let u = unit_field(fol, p[0], p[1])?;
        let dw = nrm[0] * u[0] + nrm[1] * u[1];
        let step = w(&p) / dw;
        s -= step;
        if step.abs() < 1e-15 * (1.0 + s) {
            break;
        }
    }
    Ok(s)
}

/// Real periodic orbit of `f = t` through the transversal `sigma`.
pub fn periodic_orbit(system: &HamiltonianSystem, t: f64) -> Result<FiberCycle> {
    let s = normalized_parameter(&system.lp, t)?;
    let fol = system.foliation(0.0);
    let cfg = IntegratorConfig::tight();
    let seg = system.lp.sigma();
    let p = system.point_on_segment(&seg, C64::new(s, 0.0))?;
    let start = [p[0].re, p[1].re];
    let length = return_length(&fol, start, &seg, &cfg)?;
    let mut cyc = FiberCycle {
        kind: CycleKind::Periodic,
        level: t,
        saddle_index: None,
        samples: Vec::new(),
        orientation: 1.0,
        f: system.f.clone(),
        param: CycleParam::Orbit { start, length },
    };
    let (pts, _) = cyc.sample(256)?;
    let end = cyc.orbit_point(length)?;
    let gap = (end[0] - start[0]).hypot(end[1] - start[1]);
    if gap > 1e-8 {
        return Err(Error::NotClosed(gap));
    }
    cyc.samples = pts;
    Ok(cyc)
}

impl FiberCycle {
    fn orbit_point(&self, sigma: f64) -> Result<[f64; 2]> {
        let CycleParam::Orbit { start, .. } = &self.param else {
            return Err(Error::pre("not an orbit"));
        };
        let fol = Foliation::new(&self.f, &OneForm::zero(), 0.0);
        let rhs = |_t: f64, p: &[f64; 2]| unit_field(&fol, p[0], p[1]);
        let mut ctl = IntegratorConfig::tight().control();
        ctl.h_max = 0.02;
        Ok(ode::solve(rhs, 0.0, *start, sigma, &ctl)?.y)
    }

    /// `n` points with their parameter derivatives over one period
    /// (period normalized to `2 pi` for circles, arclength for orbits).
    fn sample(&self, n: usize) -> Result<(Vec<[C64; 2]>, Vec<[C64; 2]>)> {
        let mut pts = Vec::with_capacity(n);
        let mut ders = Vec::with_capacity(n);
        match &self.param {
            CycleParam::Orbit { start, length } => {
                let fol = Foliation::new(&self.f, &OneForm::zero(), 0.0);
                let rhs = |_t: f64, p: &[f64; 2]| unit_field(&fol, p[0], p[1]);
                let mut ctl = IntegratorConfig::tight().control();
                ctl.h_max = 0.02;
                let h = length / n as f64;
                let mut p = *start;
                for k in 0..n {
                    if k > 0 {
                        p = ode::solve(rhs, (k - 1) as f64 * h, p, k as f64 * h, &ctl)?.y;
                    }
                    let u = unit_field(&fol, p[0], p[1])?;
                    pts.push([C64::new(p[0], 0.0), C64::new(p[1], 0.0)]);
                    ders.push([C64::new(u[0], 0.0), C64::new(u[1], 0.0)]);
                }
            }
            CycleParam::Circle {
                center,
                radius,
                a,
                b,
                c,
            } => {
                let db = Poly1::new(
                    b.coef
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(i, v)| v * i as f64)
                        .collect(),
                );
                let dc = Poly1::new(
                    c.coef
                        .iter()
                        .enumerate()
                        .skip(1)
                        .map(|(i, v)| v * i as f64)
                        .collect(),
                );
                let disc = b.mul(b).add(&c.scale(-4.0 * a));
                let mut prev: Option<C64> = None;
                for k in 0..n {
                    let th = 2.0 * PI * k as f64 / n as f64;
                    let e = C64::from_polar(1.0, th);
                    let x = center + e * *radius;
                    let mut sq = disc.eval_c(x).sqrt();
                    if let Some(q) = prev {
                        if (sq - q).norm() > (sq + q).norm() {
                            sq = -sq;
                        }
                    }
                    prev = Some(sq);
                    let y = (-b.eval_c(x) + sq) / (2.0 * a);
                    let fx = db.eval_c(x) * y + dc.eval_c(x);
                    let dxdt = C64::new(0.0, 1.0) * e * *radius;
                    let dydt = -fx / sq * dxdt;
                    pts.push([x, y]);
                    ders.push([dxdt, dydt]);
                }
            }
        }
        Ok((pts, ders))
    }

    fn period(&self) -> f64 {
        match &self.param {
            CycleParam::Orbit { length, .. } => *length,
            CycleParam::Circle { .. } => 2.0 * PI,
        }
    }

    /// Trapezoid sum of `P dx + Q dy` at `n` nodes.
    fn trapezoid(&self, p: &Polynomial2, q: &Polynomial2, n: usize) -> Result<C64> {
        let (pts, ders) = self.sample(n)?;
        let mut acc = C64::new(0.0, 0.0);
        for (x, d) in pts.iter().zip(ders.iter()) {
            acc += p.eval_c(x[0], x[1]) * d[0] + q.eval_c(x[0], x[1]) * d[1];
        }
        Ok(acc * (self.period() / n as f64) * self.orientation)
    }

    /// Integral of the polynomial form `P dx + Q dy`, refined by doubling.
    pub fn integrate_form(&self, p: &Polynomial2, q: &Polynomial2) -> Result<C64> {
        let mut n = QUAD_START;
        let mut prev = self.trapezoid(p, q, n)?;
        while n < QUAD_MAX {
            n *= 2;
            let cur = self.trapezoid(p, q, n)?;
            if (cur - prev).norm() < 1e-11 * (1.0 + cur.norm()) {
                return Ok(cur);
            }
            prev = cur;
        }
        Err(Error::NoConvergence)
    }
}

/// `integral omega_0` over the cycle.
pub fn abelian_integral(cycle: &FiberCycle, omega: &OneForm) -> Result<C64> {
    let (p, q) = omega.leading();
    cycle.integrate_form(&p, &q)
}

fn hyperelliptic(f: &Polynomial2) -> Result<(f64, Poly1, Poly1)> {
    let (_, dy) = f.degrees();
    let a = f.y_slice(2);
    if dy > 2 || !a.is_constant() || a.coef.first().copied().unwrap_or(0.0) == 0.0 {
        return Err(Error::NotHyperelliptic);
    }
    Ok((a.coef[0], f.y_slice(1), f.y_slice(0)))
}

/// Vanishing cycles at one saddle, oriented once per side of the critical level.
#[derive(Debug, Clone)]
pub struct VanishingFamily {
    pub saddle_index: usize,
    /// Orientation on the annulus side and on the far side.
    pub orientation: (f64, f64),
    a: f64,
    b: Poly1,
    c: Poly1,
    x_saddle: f64,
    f: Polynomial2,
    sign: f64,
}

impl VanishingFamily {
    pub fn new(system: &HamiltonianSystem, saddle_index: usize) -> Result<Self> {
        let (a, b, c) = hyperelliptic(&system.f)?;
        let mut fam = Self {
            saddle_index,
            orientation: (1.0, 1.0),
            a,
            b,
            c,
            x_saddle: system.lp.saddle(saddle_index).x,
            f: system.f.clone(),
            sign: system.sign(),
        };
        // the cycle class does not depend on omega; y dx never integrates to zero on it
        let ydx = OneForm::constant(Polynomial2::from_terms([(0, 1, 1.0)]), Polynomial2::zero());
        let reference = system.with_omega(ydx.clone());
        let s_ref = 0.01 * system.lp.s_max();
        for annulus in [true, false] {
            let t = if annulus {
                fam.sign * s_ref
            } else {
                -fam.sign * s_ref
            };
            let raw = abelian_integral(&fam.raw_cycle(t)?, &ydx)?;
            let diff = corner_difference(&reference, saddle_index, s_ref, annulus)?;
            let r = diff / raw;
            let o = if r.re > 0.0 { 1.0 } else { -1.0 };
            if (r - o).norm() > 1e-4 {
                return Err(Error::NoConvergence);
            }
            if annulus {
                fam.orientation.0 = o;
            } else {
                fam.orientation.1 = o;
            }
        }
        Ok(fam)
    }

    fn raw_cycle(&self, t: f64) -> Result<FiberCycle> {
        let ct = self.c.add(&Poly1::new(alloc::vec![-t]));
        let disc = self.b.mul(&self.b).add(&ct.scale(-4.0 * self.a));
        let mut rs = roots::roots(&disc);
        if rs.len() < 2 {
            return Err(Error::BranchCollision);
        }
        let xs = self.x_saddle;
        rs.sort_by(|p, q| {
            (p - xs)
                .norm()
                .partial_cmp(&(q - xs).norm())
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        let (r1, r2) = (rs[0], rs[1]);
        let center = (r1 + r2) * 0.5;
        let half = (r1 - r2).norm() * 0.5;
        let d_other = rs[2..]
            .iter()
            .map(|r| (r - center).norm())
            .fold(f64::INFINITY, f64::min);
        let radius = (2.0 * half).min(0.5 * (half + d_other));
        if half == 0.0 || radius < 1.2 * half {
            return Err(Error::BranchCollision);
        }
        let mut cyc = FiberCycle {
            kind: CycleKind::Vanishing,
            level: t,
            saddle_index: Some(self.saddle_index),
            samples: Vec::new(),
            orientation: 1.0,
            f: self.f.clone(),
            param: CycleParam::Circle {
                center,
                radius,
                a: self.a,
                b: self.b.clone(),
                c: ct,
            },
        };
        cyc.samples = cyc.sample(128)?.0;
        Ok(cyc)
    }

    /// Oriented vanishing cycle on `f = t`.
    pub fn cycle(&self, t: f64) -> Result<FiberCycle> {
        if t == 0.0 {
            return Err(Error::pre("vanishing cycle needs a noncritical level"));
        }
        let mut cyc = self.raw_cycle(t)?;
        cyc.orientation = if self.sign * t > 0.0 {
            self.orientation.0
        } else {
            self.orientation.1
        };
        Ok(cyc)
    }

    /// `v / eps` to first order on the zero locus of `Im d`, at `u = -rho`.
    pub fn locus_slope(&self, system: &HamiltonianSystem, rho: f64) -> Result<f64> {
        let j = abelian_integral(&self.cycle(-self.sign * rho)?, &system.omega)?;
        Ok((j * self.sign / C64::new(0.0, 2.0)).re)
    }

    /// Coefficient of `log s` contributed by this saddle to the first Melnikov function.
    pub fn log_coefficient(&self, system: &HamiltonianSystem, s: f64) -> Result<f64> {
        let j = abelian_integral(&self.cycle(self.sign * s)?, &system.omega)?;
        Ok((-j * self.sign / C64::new(0.0, 2.0 * PI)).re)
    }
}

/// Vanishing cycle of `saddle_index` on the fiber `f = t`.
pub fn vanishing_cycle(
    system: &HamiltonianSystem,
    saddle_index: usize,
    t: f64,
) -> Result<FiberCycle> {
    VanishingFamily::new(system, saddle_index)?.cycle(t)
}

/// Difference of the corner integrals of `omega_0` between the two sheets that
/// bound a vanishing cycle: `s` against `s e^{-2 pi i}` on the annulus side,
/// `s e^{i pi}` against `s e^{-i pi}` on the far side.
pub fn corner_difference(
    system: &HamiltonianSystem,
    saddle_index: usize,
    s: f64,
    annulus_side: bool,
) -> Result<C64> {
    let cfg = IntegratorConfig::tight();
    let fol = system.foliation(0.0);
    let corner = Corner::new(system, &fol, saddle_index, true, &cfg)?;
    let (pa, pb) = if annulus_side {
        (CoveringPoint::new(s, 0.0), CoveringPoint::new(s, -2.0 * PI))
    } else {
        (CoveringPoint::new(s, PI), CoveringPoint::new(s, -PI))
    };
    let mut out = C64::new(0.0, 0.0);
    for (pt, sg) in [(pa, 1.0), (pb, -1.0)] {
        let start = corner.entry_point(&system.f, pt.value())?;
        out += corner.transit(&fol, start, pt.phi, &cfg, false)?.integral * sg;
    }
    Ok(out)
}

/// Samples of a function of the normalized parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbelianIntegralSamples {
    pub grid: Vec<f64>,
    pub values: Vec<C64>,
}

/// `s_j = s_0 2^{-j}` with `s_0 = |f(center)| / 4`, 16 points.
pub fn default_grid(system: &HamiltonianSystem) -> Vec<f64> {
    let s0 = 0.25 * system.lp.s_max();
    (0..16).map(|j| s0 * (0.5f64).powi(j)).collect()
}

/// First Melnikov function `M1(s) = -sign * (integral of omega_0 over the flow-oriented orbit)`.
#[allow(non_snake_case)]
pub fn melnikov_M1(system: &HamiltonianSystem, grid: &[f64]) -> Result<AbelianIntegralSamples> {
    if grid.is_empty() || grid.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::pre("grid must be positive and nonempty"));
    }
    let sign = system.sign();
    let values = grid
        .iter()
        .map(|&s| {
            let cyc = periodic_orbit(system, sign * s)?;
            Ok(abelian_integral(&cyc, &system.omega)? * -sign)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AbelianIntegralSamples {
        grid: grid.to_vec(),
        values,
    })
}

/// `M1 = (f1 + f2) log s + f3` on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct M1Decomposition {
    pub s: Vec<f64>,
    pub m1: Vec<f64>,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
    pub f3: Vec<f64>,
}

impl M1Decomposition {
    pub fn fsum(&self) -> Vec<f64> {
        self.f1
            .iter()
            .zip(self.f2.iter())
            .map(|(a, b)| a + b)
            .collect()
    }

    /// Largest second difference of `f3` against `log2 s`, relative to its size.
    pub fn f3_roughness(&self) -> f64 {
        let n = self.f3.len();
        let scale = self.f3.iter().fold(1e-300_f64, |m, v| m.max(v.abs()));
        (1..n.saturating_sub(1))
            .map(|k| (self.f3[k - 1] - 2.0 * self.f3[k] + self.f3[k + 1]).abs())
            .fold(0.0, f64::max)
            / scale
    }
}

pub fn decompose_log(
    system: &HamiltonianSystem,
    m1: &AbelianIntegralSamples,
) -> Result<M1Decomposition> {
    let fam1 = VanishingFamily::new(system, 1)?;
    let fam2 = VanishingFamily::new(system, 2)?;
    let mut out = M1Decomposition {
        s: m1.grid.clone(),
        m1: Vec::new(),
        f1: Vec::new(),
        f2: Vec::new(),
        f3: Vec::new(),
    };
    for (&s, v) in m1.grid.iter().zip(m1.values.iter()) {
        let a = fam1.log_coefficient(system, s)?;
        let b = fam2.log_coefficient(system, s)?;
        out.m1.push(v.re);
        out.f1.push(a);
        out.f2.push(b);
        out.f3.push(v.re - (a + b) * s.ln());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdEstimate {
    pub s: f64,
    pub order: u32,
    pub md: f64,
    pub slope: f64,
    /// Relative gap to the abelian integral when the order is one.
    pub m1_rel_diff: Option<f64>,
}

/// Leading term `h(s; eps) - s ~ eps^d M_d(s)` of the holonomy along the orbit of `f = t`.
#[allow(non_snake_case)]
pub fn estimate_Md(
    system: &HamiltonianSystem,
    t: f64,
    eps_grid: &[f64],
    d_max: u32,
) -> Result<MdEstimate> {
    if system.omega.is_zero() {
        return Err(Error::Degenerate);
    }
    if eps_grid.len() < 3 || eps_grid.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::pre("need at least three positive eps values"));
    }
    let s = normalized_parameter(&system.lp, t)?;
    let cyc = periodic_orbit(system, t)?;
    let (pts, _) = cyc.sample(1024)?;
    let mut loop_pts: Vec<[f64; 2]> = pts.iter().map(|p| [p[0].re, p[1].re]).collect();
    loop_pts.push(loop_pts[0]);
    let cfg = IntegratorConfig::tight();
    let seg = system.lp.sigma();
    let mut eps: Vec<f64> = eps_grid.to_vec();
    eps.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let mut delta = Vec::with_capacity(eps.len());
    for &e in &eps {
        let h = flow::holonomy_transport(system, e, &loop_pts, &seg, C64::new(s, 0.0), &cfg)?;
        delta.push(h.re - s);
    }
    if delta.iter().all(|d| d.abs() < 1e-13 * (1.0 + s)) {
        return Err(Error::Degenerate);
    }
    let xs: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ys: Vec<f64> = delta.iter().map(|d| d.abs().max(1e-300).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs
        .iter()
        .zip(ys.iter())
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let d = slope.round();
    if (slope - d).abs() > 0.1 || d < 1.0 {
        return Err(Error::OrderAmbiguous(slope));
    }
    if d as u32 > d_max {
        return Err(Error::Degenerate);
    }
    let g: Vec<f64> = eps
        .iter()
        .zip(delta.iter())
        .map(|(e, v)| v / e.powi(d as i32))
        .collect();
    let (e1, e2) = (eps[0], eps[1]);
    let md = (e2 * g[0] - e1 * g[1]) / (e2 - e1);
    let m1_rel_diff = if d == 1.0 {
        let m1 = abelian_integral(&cyc, &system.omega)?.re * -system.sign();
        Some((md - m1).abs() / m1.abs().max(1e-300))
    } else {
        None
    };
    Ok(MdEstimate {
        s,
        order: d as u32,
        md,
        slope,
        m1_rel_diff,
    })
}

/// Canonical system with `omega = (1 + beta x^2) y dx`, `beta` chosen so that
/// `M1` has a simple zero at `s_star`.
pub fn canonical_tuned(s_star: f64) -> Result<HamiltonianSystem> {
    let base = HamiltonianSystem::canonical(1.0, 0.0)?;
    let cyc = periodic_orbit(&base, base.sign() * s_star)?;
    let a = abelian_integral(&cyc, &OneForm::canonical(1.0, 0.0))?.re;
    let b = abelian_integral(&cyc, &OneForm::canonical(0.0, 1.0))?.re;
    if b == 0.0 {
        return Err(Error::Degenerate);
    }
    Ok(base.with_omega(OneForm::canonical(1.0, -a / b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_halves() {
        let sys = HamiltonianSystem::canonical(1.0, 0.0).unwrap();
        let g = default_grid(&sys);
        assert_eq!(g.len(), 16);
        assert!((g[0] - 0.0625).abs() < 1e-15 && (g[1] / g[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn critical_level_has_no_vanishing_cycle() {
        let sys = HamiltonianSystem::canonical(1.0, 0.0).unwrap();
        let fam = VanishingFamily::new(&sys, 1).unwrap();
        assert!(fam.cycle(0.0).is_err());
    }

    #[test]
    fn exact_form_integrates_to_zero() {
        // d(x^2 y) = 2 x y dx + x^2 dy
        let sys = HamiltonianSystem::canonical(1.0, 0.0).unwrap();
        let cyc = periodic_orbit(&sys, -0.1).unwrap();
        let w = OneForm::constant(
            Polynomial2::from_terms([(1, 1, 2.0)]),
            Polynomial2::from_terms([(2, 0, 1.0)]),
        );
        assert!(abelian_integral(&cyc, &w).unwrap().norm() < 1e-10);
    }
}
