//! Leaves of the complexified foliation: path lifting, holonomy, real and
//! complex-time flows, separatrices.

use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{self, Control, StepControl};
use crate::system::{Foliation, HamiltonianSystem, Segment};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    pub transversality_floor: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            max_steps: 200_000,
            transversality_floor: 1e-8,
        }
    }
}

impl IntegratorConfig {
    pub fn tight() -> Self {
        Self {
            rel_tol: 1e-13,
            abs_tol: 1e-13,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v <= 1e-2;
        if !ok(self.rel_tol)
            || !ok(self.abs_tol)
            || self.max_steps == 0
            || self.transversality_floor <= 0.0
        {
            return Err(Error::pre("integrator tolerances must lie in (0, 1e-2]"));
        }
        Ok(())
    }

    pub(crate) fn control(&self) -> StepControl {
        StepControl {
            rtol: self.rel_tol,
            atol: self.abs_tol,
            max_steps: self.max_steps,
            h_max: f64::INFINITY,
        }
    }
}

pub type Point = [C64; 2];

/// Affine real chart `(w, mu) = m X - off` on the complexified plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub m: [[f64; 2]; 2],
    pub off: [f64; 2],
    inv: [[f64; 2]; 2],
}

impl Chart {
    pub fn new(m: [[f64; 2]; 2], off: [f64; 2]) -> Self {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let inv = [
            [m[1][1] / det, -m[0][1] / det],
            [-m[1][0] / det, m[0][0] / det],
        ];
        Self { m, off, inv }
    }

    /// `w = x`, `mu = y`.
    pub fn x_axis() -> Self {
        Self::new([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0])
    }

    /// `w = y`, `mu = x`.
    pub fn y_axis() -> Self {
        Self::new([[0.0, 1.0], [1.0, 0.0]], [0.0, 0.0])
    }

    /// Chart with `X = origin + w e1 + mu e2`.
    pub fn from_basis(origin: [f64; 2], e1: [f64; 2], e2: [f64; 2]) -> Self {
        let det = e1[0] * e2[1] - e2[0] * e1[1];
        let m = [[e2[1] / det, -e2[0] / det], [-e1[1] / det, e1[0] / det]];
        let off = [
            m[0][0] * origin[0] + m[0][1] * origin[1],
            m[1][0] * origin[0] + m[1][1] * origin[1],
        ];
        Self::new(m, off)
    }

    /// Same chart with the roles of `w` and `mu` exchanged.
    pub fn swapped(&self) -> Self {
        Self::new([self.m[1], self.m[0]], [self.off[1], self.off[0]])
    }

    pub fn to(&self, p: &Point) -> (C64, C64) {
        (
            p[0] * self.m[0][0] + p[1] * self.m[0][1] - self.off[0],
            p[0] * self.m[1][0] + p[1] * self.m[1][1] - self.off[1],
        )
    }

    pub fn from(&self, w: C64, mu: C64) -> Point {
        let (u, v) = (w + self.off[0], mu + self.off[1]);
        [
            u * self.inv[0][0] + v * self.inv[0][1],
            u * self.inv[1][0] + v * self.inv[1][1],
        ]
    }

    pub fn to_real(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.m[0][0] * p[0] + self.m[0][1] * p[1] - self.off[0],
            self.m[1][0] * p[0] + self.m[1][1] * p[1] - self.off[1],
        ]
    }

    /// `dX/dw` and `dX/dmu`.
    fn columns(&self) -> ([f64; 2], [f64; 2]) {
        (
            [self.inv[0][0], self.inv[1][0]],
            [self.inv[0][1], self.inv[1][1]],
        )
    }
}

/// Straight line `w = 0` of a chart with a window on `Re mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub chart: Chart,
    pub mu_min: f64,
    pub mu_max: f64,
}

impl Line {
    /// The transversal segment, with `mu` the distance from its origin.
    pub fn from_segment(seg: &Segment, overshoot: f64) -> Self {
        let chart = Chart::from_basis(seg.origin, seg.normal(), seg.dir);
        Self {
            chart,
            mu_min: 0.0,
            mu_max: overshoot * seg.length,
        }
    }

    pub fn w(&self, p: &Point) -> C64 {
        self.chart.to(p).0
    }
}

/// Path in the `w` coordinate of a chart, parametrized by `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Piece {
    Line {
        from: C64,
        to: C64,
    },
    Arc {
        center: C64,
        radius: f64,
        arg_from: f64,
        arg_to: f64,
    },
}

impl Piece {
    pub fn at(&self, lam: f64) -> (C64, C64) {
        match *self {
            Piece::Line { from, to } => (from + (to - from) * lam, to - from),
            Piece::Arc {
                center,
                radius,
                arg_from,
                arg_to,
            } => {
                let th = arg_from + (arg_to - arg_from) * lam;
                let e = C64::from_polar(radius, th);
                (center + e, e * C64::new(0.0, arg_to - arg_from))
            }
        }
    }

    pub fn start(&self) -> C64 {
        self.at(0.0).0
    }

    pub fn end(&self) -> C64 {
        self.at(1.0).0
    }

    pub fn length(&self) -> f64 {
        match *self {
            Piece::Line { from, to } => (to - from).norm(),
            Piece::Arc {
                radius,
                arg_from,
                arg_to,
                ..
            } => radius * (arg_to - arg_from).abs(),
        }
    }

    pub fn reversed(&self) -> Self {
        match *self {
            Piece::Line { from, to } => Piece::Line { from: to, to: from },
            Piece::Arc {
                center,
                radius,
                arg_from,
                arg_to,
            } => Piece::Arc {
                center,
                radius,
                arg_from: arg_to,
                arg_to: arg_from,
            },
        }
    }

    pub fn conj(&self) -> Self {
        match *self {
            Piece::Line { from, to } => Piece::Line {
                from: from.conj(),
                to: to.conj(),
            },
            Piece::Arc {
                center,
                radius,
                arg_from,
                arg_to,
            } => Piece::Arc {
                center: center.conj(),
                radius,
                arg_from: -arg_from,
                arg_to: -arg_to,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn chart(self) -> Chart {
        match self {
            Axis::X => Chart::x_axis(),
            Axis::Y => Chart::y_axis(),
        }
    }
}

/// Piecewise base path; each piece lives in the plane of its own axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasePath {
    pub pieces: Vec<(Piece, Axis)>,
}

impl BasePath {
    pub fn single(piece: Piece, axis: Axis) -> Self {
        Self {
            pieces: alloc::vec![(piece, axis)],
        }
    }

    pub fn then(mut self, piece: Piece, axis: Axis) -> Self {
        self.pieces.push((piece, axis));
        self
    }

    pub fn reversed(&self) -> Self {
        Self {
            pieces: self
                .pieces
                .iter()
                .rev()
                .map(|(p, a)| (p.reversed(), *a))
                .collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            pieces: self.pieces.iter().map(|(p, a)| (p.conj(), *a)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftedLeafPath {
    pub samples: Vec<(f64, Point)>,
    pub eps: f64,
    pub f_drift: f64,
    /// `integral of omega_0` along the lift.
    pub integral: C64,
}

impl LiftedLeafPath {
    pub fn end(&self) -> Point {
        self.samples.last().unwrap().1
    }
}

/// Result of lifting one piece.
#[derive(Debug, Clone)]
pub struct PieceLift {
    pub end: Point,
    pub integral: C64,
    pub samples: Vec<(f64, Point)>,
}

/// Lifts `piece` (a path of the chart's `w`) to the leaf through `start`.
///
/// Solves `d mu / d lambda = -(alpha_w / alpha_mu) w'(lambda)` and carries
/// `integral omega_0` along.
pub fn lift_piece(
    fol: &Foliation,
    chart: &Chart,
    start: Point,
    piece: &Piece,
    cfg: &IntegratorConfig,
    keep_samples: bool,
) -> Result<PieceLift> {
    let (w0, mu0) = chart.to(&start);
    if (w0 - piece.start()).norm() > 1e-8 * (1.0 + w0.norm()) {
        return Err(Error::pre(
            "lift start does not project onto the path start",
        ));
    }
    let (c0, c1) = chart.columns();
    let floor = cfg.transversality_floor;
    let rhs = |lam: f64, s: &[f64; 4]| -> Result<[f64; 4]> {
        let (w, dw) = piece.at(lam);
        let mu = C64::new(s[0], s[1]);
        let p = chart.from(w, mu);
        let (a1, a2) = fol.alpha(p[0], p[1]);
        let aw = a1 * c0[0] + a2 * c0[1];
        let am = a1 * c1[0] + a2 * c1[1];
        if am.norm() < floor {
            return Err(Error::TransversalityLost(am.norm()));
        }
        let dmu = -aw / am * dw;
        let dx = dw * c0[0] + dmu * c1[0];
        let dy = dw * c0[1] + dmu * c1[1];
        let (pp, qq) = fol.omega0(p[0], p[1]);
        let di = pp * dx + qq * dy;
        Ok([dmu.re, dmu.im, di.re, di.im])
    };
    let mut samples = Vec::new();
    if keep_samples {
        samples.push((0.0, start));
    }
    let out = ode::integrate(
        rhs,
        0.0,
        [mu0.re, mu0.im, 0.0, 0.0],
        1.0,
        &cfg.control(),
        |st| {
            if keep_samples {
                let (w, _) = piece.at(st.t1);
                samples.push((st.t1, chart.from(w, C64::new(st.y1[0], st.y1[1]))));
            }
            Ok(Control::Continue)
        },
    )?;
    let end = chart.from(piece.end(), C64::new(out.y[0], out.y[1]));
    Ok(PieceLift {
        end,
        integral: C64::new(out.y[2], out.y[3]),
        samples,
    })
}

/// Lift of a base path; pieces are joined in the order given.
pub fn lift_path_fol(
    fol: &Foliation,
    start: Point,
    path: &BasePath,
    cfg: &IntegratorConfig,
) -> Result<LiftedLeafPath> {
    cfg.validate()?;
    let total: f64 = path
        .pieces
        .iter()
        .map(|(p, _)| p.length())
        .sum::<f64>()
        .max(1e-300);
    let f0 = fol.f_c(start[0], start[1]);
    let mut samples = alloc::vec![(0.0, start)];
    let mut cur = start;
    let mut integral = C64::new(0.0, 0.0);
    let mut base = 0.0;
    for (piece, axis) in &path.pieces {
        let lift = lift_piece(fol, &axis.chart(), cur, piece, cfg, true)?;
        let frac = piece.length() / total;
        for (lam, p) in lift.samples.iter().skip(1) {
            samples.push((base + frac * lam, *p));
        }
        base += frac;
        cur = lift.end;
        integral += lift.integral;
    }
    let f_drift = if fol.eps == 0.0 {
        samples
            .iter()
            .map(|(_, p)| (fol.f_c(p[0], p[1]) - f0).norm())
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    Ok(LiftedLeafPath {
        samples,
        eps: fol.eps,
        f_drift,
        integral,
    })
}

/// Lifts `path` for the system's foliation at `eps`.
pub fn lift_path(
    system: &HamiltonianSystem,
    eps: f64,
    start: Point,
    path: &BasePath,
    config: &IntegratorConfig,
) -> Result<LiftedLeafPath> {
    lift_path_fol(&system.foliation(eps), start, path, config)
}

/// Moves the leaf point onto the complexified line `w = 0`.
pub fn land(
    fol: &Foliation,
    p: Point,
    line: &Line,
    cfg: &IntegratorConfig,
) -> Result<(Point, C64)> {
    let (w, _) = line.chart.to(&p);
    let piece = Piece::Line {
        from: w,
        to: C64::new(0.0, 0.0),
    };
    let l = lift_piece(fol, &line.chart, p, &piece, cfg, false)?;
    Ok((l.end, l.integral))
}

/// Follows a sampled real curve with the leaf through `start`, switching
/// between x and y projections where the leaf folds over the current one.
pub fn follow_samples(
    fol: &Foliation,
    start: Point,
    samples: &[[f64; 2]],
    cfg: &IntegratorConfig,
) -> Result<(Point, C64)> {
    let mut cur = start;
    let mut integral = C64::new(0.0, 0.0);
    let mut axis = Axis::X;
    for s in samples {
        let (a1, a2) = fol.alpha(cur[0], cur[1]);
        // over x needs alpha_y, over y needs alpha_x; factor 2 hysteresis
        axis = match axis {
            Axis::X if a1.norm() > 2.0 * a2.norm() => Axis::Y,
            Axis::Y if a2.norm() > 2.0 * a1.norm() => Axis::X,
            a => a,
        };
        let (from, to) = match axis {
            Axis::X => (cur[0], C64::new(s[0], 0.0)),
            Axis::Y => (cur[1], C64::new(s[1], 0.0)),
        };
        if (to - from).norm() == 0.0 {
            continue;
        }
        let l = lift_piece(
            fol,
            &axis.chart(),
            cur,
            &Piece::Line { from, to },
            cfg,
            false,
        )?;
        cur = l.end;
        integral += l.integral;
    }
    Ok((cur, integral))
}

/// Holonomy of the leaf along a sampled closed loop starting on `section`.
///
/// `z` is the normalized parameter on the section; returns the transported one.
pub fn holonomy_transport(
    system: &HamiltonianSystem,
    eps: f64,
    loop_samples: &[[f64; 2]],
    section: &Segment,
    z: C64,
    cfg: &IntegratorConfig,
) -> Result<C64> {
    let n = loop_samples.len();
    if n < 3 {
        return Err(Error::NotClosed(f64::INFINITY));
    }
    let gap = (loop_samples[0][0] - loop_samples[n - 1][0])
        .hypot(loop_samples[0][1] - loop_samples[n - 1][1]);
    if gap > 1e-8 {
        return Err(Error::NotClosed(gap));
    }
    let line = Line::from_segment(section, 1.6);
    let off = line.chart.to_real(loop_samples[0])[0];
    if off.abs() > 1e-8 {
        return Err(Error::pre("loop does not start on the section"));
    }
    let fol = system.foliation(eps);
    let start = system.point_on_segment(section, z)?;
    let (p, _) = follow_samples(&fol, start, &loop_samples[1..], cfg)?;
    let (p, _) = land(&fol, p, &line, cfg)?;
    Ok(fol.f_c(p[0], p[1]) * system.sign())
}

/// Outcome of a flow run until a line is crossed.
#[derive(Debug, Clone)]
pub struct Crossing {
    pub point: Point,
    pub time: f64,
    /// `integral omega_0` along the trajectory, including the landing.
    pub integral: C64,
}

/// Flows the leaf point along real time `dir * t` until `Re w` changes sign on
/// `line` with `Re mu` inside its window, then lands exactly on the line.
pub fn flow_to_line(
    fol: &Foliation,
    start: Point,
    dir: f64,
    line: &Line,
    t_max: f64,
    cfg: &IntegratorConfig,
) -> Result<Crossing> {
    let rhs = |_t: f64, s: &[f64; 6]| -> Result<[f64; 6]> {
        let x = C64::new(s[0], s[1]);
        let y = C64::new(s[2], s[3]);
        let v = fol.field_c(x, y);
        let (pp, qq) = fol.omega0(x, y);
        let di = pp * v[0] + qq * v[1];
        Ok([v[0].re, v[0].im, v[1].re, v[1].im, di.re, di.im])
    };
    let pt = |s: &[f64; 6]| -> Point { [C64::new(s[0], s[1]), C64::new(s[2], s[3])] };
    let mut hit: Option<([f64; 6], f64)> = None;
    let y0 = [start[0].re, start[0].im, start[1].re, start[1].im, 0.0, 0.0];
    let mut ctl = cfg.control();
    ctl.h_max = 0.05;
    let out = ode::integrate(rhs, 0.0, y0, dir * t_max, &ctl, |st| {
        let (w0, _) = line.chart.to(&pt(&st.y0));
        let (w1, mu1) = line.chart.to(&pt(&st.y1));
        // a start on the line itself is not a crossing
        if st.t0 == 0.0 && w0.norm() < 1e-9 {
            return Ok(Control::Continue);
        }
        if w0.re * w1.re < 0.0 && mu1.re >= line.mu_min && mu1.re <= line.mu_max {
            hit = Some((st.y1, st.t1));
            return Ok(Control::Stop);
        }
        Ok(Control::Continue)
    })?;
    let (s, t) = match hit {
        Some(h) => h,
        None => {
            let _ = out;
            return Err(Error::NoReturn);
        }
    };
    let (p, extra) = land(fol, pt(&s), line, cfg)?;
    Ok(Crossing {
        point: p,
        time: t,
        integral: C64::new(s[4], s[5]) + extra,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    StablePlus,
    StableMinus,
    UnstablePlus,
    UnstableMinus,
}

impl Branch {
    pub fn is_stable(self) -> bool {
        matches!(self, Branch::StablePlus | Branch::StableMinus)
    }
}

/// Eigen-directions `(stable, unstable)` of a real saddle of the field.
pub fn saddle_directions(fol: &Foliation, p: [f64; 2]) -> Result<([f64; 2], [f64; 2], f64, f64)> {
    let j = fol.jacobian(p[0], p[1]);
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = tr * tr / 4.0 - det;
    if det >= 0.0 || disc <= 0.0 {
        return Err(Error::SaddleLost);
    }
    let ls = tr / 2.0 - disc.sqrt();
    let lu = tr / 2.0 + disc.sqrt();
    let vec_for = |l: f64| {
        let a = [j[0][1], l - j[0][0]];
        let b = [l - j[1][1], j[1][0]];
        let v = if a[0].hypot(a[1]) > b[0].hypot(b[1]) {
            a
        } else {
            b
        };
        let n = v[0].hypot(v[1]);
        let mut v = [v[0] / n, v[1] / n];
        // "+" branch points up (or right when horizontal)
        if v[1] < -1e-12 || (v[1].abs() <= 1e-12 && v[0] < 0.0) {
            v = [-v[0], -v[1]];
        }
        v
    };
    Ok((vec_for(ls), vec_for(lu), ls, lu))
}

/// Real separatrix samples in arclength, until `stop` fires or budget runs out.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub points: Vec<[f64; 2]>,
    pub hit: bool,
    pub saddle: [f64; 2],
}

pub fn separatrix_trajectory<S>(
    fol: &Foliation,
    saddle_guess: [f64; 2],
    branch: Branch,
    budget: f64,
    h_max: f64,
    mut stop: S,
) -> Result<Trajectory>
where
    S: FnMut(&[f64; 2]) -> bool,
{
    let p = fol.refine_singular_point(saddle_guess)?;
    let (es, eu, _, _) = saddle_directions(fol, p)?;
    let (e, sgn, time_dir) = match branch {
        Branch::StablePlus => (es, 1.0, -1.0),
        Branch::StableMinus => (es, -1.0, -1.0),
        Branch::UnstablePlus => (eu, 1.0, 1.0),
        Branch::UnstableMinus => (eu, -1.0, 1.0),
    };
    let start = [p[0] + 1e-6 * sgn * e[0], p[1] + 1e-6 * sgn * e[1]];
    let mut pts = alloc::vec![start];
    let mut hit = false;
    let ctl = StepControl {
        rtol: 1e-11,
        atol: 1e-13,
        max_steps: 400_000,
        h_max,
    };
    let rhs = |_s: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
        let v = fol.field(y[0], y[1]);
        let n = v[0].hypot(v[1]);
        if n == 0.0 {
            return Err(Error::SaddleLost);
        }
        Ok([time_dir * v[0] / n, time_dir * v[1] / n])
    };
    let res = ode::integrate(rhs, 0.0, start, budget, &ctl, |st| {
        pts.push(st.y1);
        if stop(&st.y1) {
            hit = true;
            return Ok(Control::Stop);
        }
        Ok(Control::Continue)
    });
    match res {
        Ok(_) => Ok(Trajectory {
            points: pts,
            hit,
            saddle: p,
        }),
        Err(Error::StepBudgetExceeded) => Err(Error::BudgetExceeded),
        Err(e) => Err(e),
    }
}

/// Separatrix of `saddle` for the system perturbed at `eps`.
pub fn separatrix_shoot<S>(
    system: &HamiltonianSystem,
    eps: f64,
    saddle_index: usize,
    branch: Branch,
    until: S,
) -> Result<Trajectory>
where
    S: FnMut(&[f64; 2]) -> bool,
{
    let fol = system.foliation(eps);
    let s = system.lp.saddle(saddle_index).pos();
    let budget = 50.0
        * (1.0
            + (system.lp.saddle1.x - system.lp.saddle2.x)
                .hypot(system.lp.saddle1.y - system.lp.saddle2.y));
    let tr = separatrix_trajectory(&fol, s, branch, budget, 1e-3, until)?;
    if !tr.hit {
        return Err(Error::BudgetExceeded);
    }
    Ok(tr)
}

/// Point where a separatrix branch (perturbed at `fol.eps`) crosses `line`.
pub fn separatrix_crossing(
    fol: &Foliation,
    saddle_guess: [f64; 2],
    direction: [f64; 2],
    line: &Line,
    cfg: &IntegratorConfig,
) -> Result<Crossing> {
    let p = fol.refine_singular_point(saddle_guess)?;
    let (es, eu, _, _) = saddle_directions(fol, p)?;
    let ds = es[0] * direction[0] + es[1] * direction[1];
    let du = eu[0] * direction[0] + eu[1] * direction[1];
    let (e, time_dir) = if ds.abs() > du.abs() {
        (es, -1.0)
    } else {
        (eu, 1.0)
    };
    let sg = if e[0] * direction[0] + e[1] * direction[1] > 0.0 {
        1.0
    } else {
        -1.0
    };
    let off = 1e-7;
    let start = [
        C64::new(p[0] + off * sg * e[0], 0.0),
        C64::new(p[1] + off * sg * e[1], 0.0),
    ];
    flow_to_line(fol, start, time_dir, line, 200.0, cfg)
}
