//! Global transitions between the two transversals, the displacement map, and
//! zero counting by the argument principle on a slit disk.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, CharacteristicSet};
use crate::dulac::{solve_imaginary_zero, Corner, CoveringPoint};
use crate::error::{Error, Result};
use crate::flow::{self, IntegratorConfig, Line, Point};
use crate::ode::{self, Control};
use crate::system::{Foliation, HamiltonianSystem, Segment};

const T_MAX: f64 = 1000.0;

/// Where the perturbed separatrices cross the transversal `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddleCriticalValues {
    pub eps: f64,
    /// Indexed by saddle: `s[0]` for saddle 1, `s[1]` for saddle 2.
    pub s: [f64; 2],
}

impl SaddleCriticalValues {
    /// Saddle index (1 or 2) with the smaller critical value.
    pub fn lo(&self) -> usize {
        if self.s[0] <= self.s[1] {
            1
        } else {
            2
        }
    }

    pub fn hi(&self) -> usize {
        3 - self.lo()
    }

    pub fn sorted(&self) -> (f64, f64) {
        (self.s[0].min(self.s[1]), self.s[0].max(self.s[1]))
    }
}

/// `sigma -> tau` transitions past each saddle at a fixed eps.
#[derive(Debug, Clone)]
pub struct Transitions {
    pub system: HamiltonianSystem,
    pub eps: f64,
    pub fol: Foliation,
    pub cfg: IntegratorConfig,
    pub crit: SaddleCriticalValues,
    corner1: Corner,
    corner2: Corner,
    /// Real connection samples: sigma to each corner, and each corner to tau.
    paths_in: [Vec<[f64; 2]>; 2],
    paths_out: [Vec<[f64; 2]>; 2],
    sigma: Segment,
    sigma_line: Line,
    tau_line: Line,
}

impl Transitions {
    pub fn new(system: &HamiltonianSystem, eps: f64, cfg: &IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        let fol = system.foliation(eps);
        // saddle 1 is passed in backward time, saddle 2 in forward time
        let corner1 = Corner::new(system, &fol, 1, false, cfg)?;
        let corner2 = Corner::new(system, &fol, 2, true, cfg)?;
        let sigma = system.lp.sigma();
        let sigma_line = Line::from_segment(&sigma, 1.6);
        let tau_line = Line::from_segment(&system.lp.tau(), 1.6);
        let fol0 = system.foliation(0.0);
        let (mf, mb) = (system.lp.mid_forward, system.lp.mid_backward);
        let paths_in = [
            connection_samples(&fol0, mf, -1.0, &corner1.entry_line(), cfg)?,
            connection_samples(&fol0, mf, 1.0, &corner2.entry_line(), cfg)?,
        ];
        let mut out1 = connection_samples(&fol0, mb, 1.0, &corner1.exit_line(), cfg)?;
        let mut out2 = connection_samples(&fol0, mb, -1.0, &corner2.exit_line(), cfg)?;
        out1.reverse();
        out2.reverse();
        let paths_out = [out1, out2];
        let mut s = [0.0; 2];
        if eps != 0.0 {
            for (k, c) in [&corner1, &corner2].into_iter().enumerate() {
                let cr = flow::separatrix_crossing(&fol, c.origin, c.e_in, &sigma_line, cfg)?;
                s[k] = system.sign() * fol.f_c(cr.point[0], cr.point[1]).re;
            }
        }
        Ok(Self {
            system: system.clone(),
            eps,
            fol,
            cfg: *cfg,
            crit: SaddleCriticalValues { eps, s },
            corner1,
            corner2,
            paths_in,
            paths_out,
            sigma,
            sigma_line,
            tau_line,
        })
    }

    fn sign(&self) -> f64 {
        self.system.sign()
    }

    fn start(&self, z: C64) -> Result<Point> {
        self.system.point_on_segment(&self.sigma, z)
    }

    /// Transition past saddle `i` on the sheet `theta = arg(z - s_i)`.
    pub fn transition(&self, i: usize, z: C64, theta: f64) -> Result<C64> {
        let corner = if i == 1 { &self.corner1 } else { &self.corner2 };
        let x0 = self.start(z)?;
        let (x1, _) = flow::follow_samples(&self.fol, x0, &self.paths_in[i - 1][1..], &self.cfg)?;
        let (x1, _) = flow::land(&self.fol, x1, &corner.entry_line(), &self.cfg)?;
        let lift = corner.transit(&self.fol, x1, theta, &self.cfg, false)?;
        let (x2, _) =
            flow::follow_samples(&self.fol, lift.end, &self.paths_out[i - 1][1..], &self.cfg)?;
        let (x3, _) = flow::land(&self.fol, x2, &self.tau_line, &self.cfg)?;
        Ok(self.fol.f_c(x3[0], x3[1]) * self.sign())
    }

    /// `d1(z) - d2(z)`; `theta[k]` is the sheet for saddle `k + 1`.
    pub fn displacement(&self, z: C64, theta: [f64; 2]) -> Result<C64> {
        Ok(self.transition(1, z, theta[0])? - self.transition(2, z, theta[1])?)
    }

    /// Sheet angles reached from the positive axis through the upper half plane.
    pub fn upper_thetas(&self, z: C64) -> [f64; 2] {
        [upper_arg(z - self.crit.s[0]), upper_arg(z - self.crit.s[1])]
    }

    /// Full return to `sigma` in backward time, for real parameters.
    pub fn return_map(&self, z: f64) -> Result<f64> {
        let x0 = self.start(C64::new(z, 0.0))?;
        let cr = flow::flow_to_line(&self.fol, x0, -1.0, &self.sigma_line, T_MAX, &self.cfg)?;
        Ok(self.sign() * self.fol.f_c(cr.point[0], cr.point[1]).re)
    }
}

/// Real unperturbed orbit from `start` (time direction `dir`) up to `line`,
/// sampled about every 0.01 in arclength; the last sample lies on the line.
fn connection_samples(
    fol: &Foliation,
    start: [f64; 2],
    dir: f64,
    line: &Line,
    cfg: &IntegratorConfig,
) -> Result<Vec<[f64; 2]>> {
    let rhs = |_t: f64, p: &[f64; 2]| -> Result<[f64; 2]> {
        let v = fol.field(p[0], p[1]);
        let n = v[0].hypot(v[1]);
        if n < 1e-14 {
            return Err(Error::NoReturn);
        }
        Ok([dir * v[0] / n, dir * v[1] / n])
    };
    let mut ctl = cfg.control();
    ctl.h_max = 0.01;
    let w = |p: &[f64; 2]| line.chart.to_real(*p);
    let mut pts = alloc::vec![start];
    let mut done = false;
    ode::integrate(rhs, 0.0, start, 50.0, &ctl, |st| {
        let (a, b) = (w(&st.y0), w(&st.y1));
        if st.t0 > 0.0 && a[0] * b[0] <= 0.0 && b[1] >= line.mu_min && b[1] <= line.mu_max {
            let lam = a[0] / (a[0] - b[0]);
            pts.push([
                st.y0[0] + lam * (st.y1[0] - st.y0[0]),
                st.y0[1] + lam * (st.y1[1] - st.y0[1]),
            ]);
            done = true;
            return Ok(Control::Stop);
        }
        pts.push(st.y1);
        Ok(Control::Continue)
    })?;
    if !done {
        return Err(Error::NoConnection);
    }
    Ok(pts)
}

/// `arg(w)` in `(-pi/2, 3 pi/2]`.
pub fn upper_arg(w: C64) -> f64 {
    let a = w.arg();
    if a <= -0.5 * PI {
        a + 2.0 * PI
    } else {
        a
    }
}

pub fn saddle_values(
    system: &HamiltonianSystem,
    eps: f64,
    config: &IntegratorConfig,
) -> Result<SaddleCriticalValues> {
    Ok(Transitions::new(system, eps, config)?.crit)
}

/// Displacement at a covering point; each saddle's sheet is the branch of
/// `arg(z - s_i)` nearest `phi`.
pub fn displacement(
    system: &HamiltonianSystem,
    eps: f64,
    z: CoveringPoint,
    config: &IntegratorConfig,
) -> Result<C64> {
    let tr = Transitions::new(system, eps, config)?;
    let zv = z.value();
    let th = [
        crate::dulac::arg_near(zv - tr.crit.s[0], z.phi),
        crate::dulac::arg_near(zv - tr.crit.s[1], z.phi),
    ];
    tr.displacement(zv, th)
}

/// A point of a contour piece with sheet angles relative to `(s_lo, s_hi)`.
pub type PiecePoint = (C64, [f64; 2]);

pub struct ContourPiece<'a> {
    pub label: &'static str,
    pub at: Box<dyn Fn(f64) -> Result<PiecePoint> + 'a>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourSample {
    pub piece: usize,
    pub z: C64,
    pub theta: [f64; 2],
    pub value: C64,
    pub arg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourTrace {
    pub samples: Vec<ContourSample>,
    /// Argument increase along the upper half of the boundary.
    pub delta_arg_upper: f64,
    /// Full-contour winding, `2 delta_arg_upper / 2 pi`, before rounding.
    pub winding_raw: f64,
    pub winding: i64,
}

/// Upper half of the boundary of a disk of radius `r` cut along `locus`
/// (a curve `v(u)` for `u < s_lo` ending at `s_lo`) and the slit `[s_lo, s_hi]`.
/// The lower half is the mirror image.
pub fn slit_disk_pieces<'a, L>(
    r: f64,
    s_lo: f64,
    s_hi: f64,
    locus: L,
) -> Result<Vec<ContourPiece<'a>>>
where
    L: Fn(f64) -> Result<f64> + Clone + 'a,
{
    if !(r > 0.0) || !(s_lo <= s_hi) || s_hi >= r || -r >= s_lo {
        return Err(Error::pre("slit must lie inside the disk"));
    }
    let gap = s_hi - s_lo;
    let single = gap <= 1e-13 * r;
    let d0 = if single {
        1e-4 * r
    } else {
        (1e-4 * r).min(0.25 * gap)
    };
    // locus endpoint on the circle
    let mut u_end = -r;
    for _ in 0..8 {
        let v = locus(u_end)?;
        if v.abs() >= r {
            return Err(Error::pre("locus leaves the disk"));
        }
        u_end = -(r * r - v * v).sqrt();
    }
    let z_end = C64::new(u_end, locus(u_end)?);
    let psi_end = upper_arg(z_end);
    let th = move |z: C64| [upper_arg(z - s_lo), upper_arg(z - s_hi)];
    let mut out: Vec<ContourPiece<'a>> = Vec::new();
    out.push(ContourPiece {
        label: "circle",
        at: Box::new(move |t| {
            let z = C64::from_polar(r, t * psi_end);
            Ok((z, th(z)))
        }),
    });
    let span = s_lo - u_end;
    let lc = locus.clone();
    out.push(ContourPiece {
        label: "locus",
        at: Box::new(move |t| {
            let u = s_lo - span * (d0 / span).powf(t);
            let z = C64::new(u, lc(u)?);
            Ok((z, th(z)))
        }),
    });
    out.push(ContourPiece {
        label: "corner_lo",
        at: Box::new(move |t| {
            let psi = PI * (1.0 - t);
            let z = C64::new(s_lo, 0.0) + C64::from_polar(d0, psi);
            let hi = if single { psi } else { upper_arg(z - s_hi) };
            Ok((z, [psi, hi]))
        }),
    });
    if !single {
        out.push(ContourPiece {
            label: "slit",
            at: Box::new(move |t| {
                let u = (s_lo + d0) + t * (gap - 2.0 * d0);
                Ok((C64::new(u, 0.0), [0.0, PI]))
            }),
        });
        out.push(ContourPiece {
            label: "corner_hi",
            at: Box::new(move |t| {
                let psi = PI * (1.0 - t);
                let z = C64::new(s_hi, 0.0) + C64::from_polar(d0, psi);
                Ok((z, [upper_arg(z - s_lo), psi]))
            }),
        });
    }
    Ok(out)
}

/// Samples `eval` along the pieces, bisecting until consecutive values differ
/// in argument by less than `pi / 2`, and unwraps the argument.
pub fn trace_contour<F>(
    pieces: &[ContourPiece<'_>],
    eval: F,
    initial: usize,
    budget: usize,
) -> Result<ContourTrace>
where
    F: Fn(C64, [f64; 2]) -> Result<C64>,
{
    let initial = initial.max(2);
    let mut evals = 0usize;
    let mut samples: Vec<ContourSample> = Vec::new();
    for (k, piece) in pieces.iter().enumerate() {
        let mut pts: Vec<(f64, PiecePoint, C64)> = Vec::with_capacity(initial);
        for j in 0..initial {
            let t = j as f64 / (initial - 1) as f64;
            let p = (piece.at)(t)?;
            pts.push((t, p, eval(p.0, p.1)?));
            evals += 1;
        }
        loop {
            let mut next = Vec::with_capacity(pts.len() * 2);
            let mut split = false;
            for w in pts.windows(2) {
                next.push(w[0]);
                let jump = (w[1].2 / w[0].2).arg().abs();
                if !(jump < 0.5 * PI) {
                    if w[1].0 - w[0].0 < 1e-12 {
                        return Err(Error::RefinementBudget);
                    }
                    let t = 0.5 * (w[0].0 + w[1].0);
                    let p = (piece.at)(t)?;
                    next.push((t, p, eval(p.0, p.1)?));
                    evals += 1;
                    split = true;
                }
            }
            next.push(pts[pts.len() - 1]);
            pts = next;
            if evals > budget {
                return Err(Error::RefinementBudget);
            }
            if !split {
                break;
            }
        }
        for (_, p, v) in pts {
            samples.push(ContourSample {
                piece: k,
                z: p.0,
                theta: p.1,
                value: v,
                arg: 0.0,
            });
        }
    }
    if samples.is_empty() {
        return Err(Error::pre("empty contour"));
    }
    let mut acc = samples[0].value.arg();
    samples[0].arg = acc;
    for i in 1..samples.len() {
        let step = (samples[i].value / samples[i - 1].value).arg();
        if !(step.abs() < 0.5 * PI) {
            return Err(Error::RefinementBudget);
        }
        acc += step;
        samples[i].arg = acc;
    }
    let delta = acc - samples[0].arg;
    let raw = delta / PI;
    Ok(ContourTrace {
        samples,
        delta_arg_upper: delta,
        winding_raw: raw,
        winding: raw.round() as i64,
    })
}

/// Zero locus of `Im d` for the saddle with the smaller critical value,
/// as a function `u -> v` for `u < s_lo`.
fn locus_fn<'a>(tr: &'a Transitions) -> impl Fn(f64) -> Result<f64> + Clone + 'a {
    move |u: f64| {
        let lo = tr.crit.lo();
        let s_lo = tr.crit.s[lo - 1];
        let g = |v: f64| {
            let z = C64::new(u, v);
            tr.transition(lo, z, upper_arg(z - s_lo)).map(|d| d.im)
        };
        solve_imaginary_zero(g, 0.0, (s_lo - u).abs()).map(|(v, _)| v)
    }
}

/// Contour trace of the displacement map for `(eps, R)`.
pub fn build_contour(
    system: &HamiltonianSystem,
    eps: f64,
    r: f64,
    config: &IntegratorConfig,
) -> Result<ContourTrace> {
    let tr = Transitions::new(system, eps, config)?;
    contour_for(&tr, r)
}

const MODULUS_FLOOR: f64 = 1e-12;

fn contour_for(tr: &Transitions, r: f64) -> Result<ContourTrace> {
    if tr.eps == 0.0 {
        return Err(Error::pre("displacement vanishes identically at eps = 0"));
    }
    if !(r > 0.0 && r < tr.system.lp.s_max()) {
        return Err(Error::pre("radius must lie inside the annulus"));
    }
    let (s_lo, s_hi) = tr.crit.sorted();
    let lo = tr.crit.lo();
    let pieces = slit_disk_pieces(r, s_lo, s_hi, locus_fn(tr))?;
    let eval = |z: C64, th: [f64; 2]| {
        // sheet angles come as (lo, hi); the displacement wants (saddle 1, saddle 2)
        let t = if lo == 1 { th } else { [th[1], th[0]] };
        tr.displacement(z, t)
    };
    let trace = trace_contour(&pieces, eval, 24, 4000)?;
    let min_circle = trace
        .samples
        .iter()
        .filter(|s| s.piece == 0)
        .map(|s| s.value.norm())
        .fold(f64::INFINITY, f64::min);
    if min_circle < 1e3 * MODULUS_FLOOR {
        return Err(Error::SmallModulus(min_circle));
    }
    if (trace.winding_raw - trace.winding as f64).abs() >= 1e-3 {
        return Err(Error::RefinementBudget);
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub eps: f64,
    pub r: f64,
    pub s1: f64,
    pub s2: f64,
    pub winding_count: i64,
    pub winding_raw: f64,
    pub real_cycle_count: usize,
    pub real_zeros: Vec<f64>,
    pub bound: Option<i64>,
    /// Set when the winding exceeds the bound at this `(eps, R)`.
    pub bound_exceeded: bool,
    pub trace: ContourTrace,
}

/// Sign changes of `P(z) - z` on a uniform grid over `(s_hi + margin, R)`, refined by bisection.
/// Grid points whose orbit leaves the annulus before returning are skipped.
pub fn real_zeros(tr: &Transitions, r: f64, n: usize) -> Result<Vec<f64>> {
    let (_, s_hi) = tr.crit.sorted();
    let a = s_hi + 0.01 * (r - s_hi);
    let g = |z: f64| tr.return_map(z).map(|p| p - z);
    let zs: Vec<f64> = (0..n)
        .map(|k| a + (r - a) * k as f64 / (n - 1) as f64)
        .collect();
    let gs: Vec<Option<f64>> = zs.iter().map(|&z| g(z).ok()).collect();
    let mut out = Vec::new();
    for k in 1..n {
        let (Some(g0), Some(g1)) = (gs[k - 1], gs[k]) else {
            continue;
        };
        if g0 == 0.0 {
            out.push(zs[k - 1]);
            continue;
        }
        if g0 * g1 < 0.0 {
            let (mut lo, mut hi, mut glo) = (zs[k - 1], zs[k], g0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let gm = g(mid)?;
                if gm * glo <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    glo = gm;
                }
                if hi - lo < 1e-14 {
                    break;
                }
            }
            out.push(0.5 * (lo + hi));
        }
    }
    Ok(out)
}

/// Winding count of the displacement, direct real cycle count, and the bound.
pub fn count_zeros(
    system: &HamiltonianSystem,
    eps: f64,
    r: f64,
    characteristic: Option<&CharacteristicSet>,
    config: &IntegratorConfig,
) -> Result<CountReport> {
    let tr = Transitions::new(system, eps, config)?;
    let trace = contour_for(&tr, r)?;
    let zeros = real_zeros(&tr, r, 200)?;
    let bound = characteristic.map(|cs| bounds::floor(bounds::bound_two_saddle(cs)));
    let winding = trace.winding;
    Ok(CountReport {
        eps,
        r,
        s1: tr.crit.s[0],
        s2: tr.crit.s[1],
        winding_count: winding,
        winding_raw: trace.winding_raw,
        real_cycle_count: zeros.len(),
        real_zeros: zeros,
        bound,
        bound_exceeded: bound.map_or(false, |b| winding > b),
        trace,
    })
}
