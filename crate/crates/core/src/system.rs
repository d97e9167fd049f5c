//! Planar Hamiltonian systems with a two-saddle loop, and their perturbations.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow;
use crate::poly::Polynomial2;

/// `omega_eps = P(x, y, eps) dx + Q(x, y, eps) dy`, stored by powers of eps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneForm {
    pub p: Vec<Polynomial2>,
    pub q: Vec<Polynomial2>,
}

impl OneForm {
    pub fn zero() -> Self {
        Self {
            p: vec![Polynomial2::zero()],
            q: vec![Polynomial2::zero()],
        }
    }

    /// eps-independent form `P dx + Q dy`.
    pub fn constant(p: Polynomial2, q: Polynomial2) -> Self {
        Self {
            p: vec![p],
            q: vec![q],
        }
    }

    /// From `(eps_power, i, j, c)` entries; duplicates are summed.
    pub fn from_terms(p: &[(usize, usize, usize, f64)], q: &[(usize, usize, usize, f64)]) -> Self {
        let order = p.iter().chain(q.iter()).map(|t| t.0).max().unwrap_or(0);
        let slice = |src: &[(usize, usize, usize, f64)], k: usize| {
            Polynomial2::from_terms(src.iter().filter(|t| t.0 == k).map(|t| (t.1, t.2, t.3)))
        };
        Self {
            p: (0..=order).map(|k| slice(p, k)).collect(),
            q: (0..=order).map(|k| slice(q, k)).collect(),
        }
    }

    /// `P(., ., eps)` and `Q(., ., eps)` as plain polynomials.
    pub fn at(&self, eps: f64) -> (Polynomial2, Polynomial2) {
        let fold = |v: &[Polynomial2]| {
            let mut acc = Polynomial2::zero();
            let mut w = 1.0;
            for poly in v {
                acc = acc.add(&poly.scale(w));
                w *= eps;
            }
            acc
        };
        (fold(&self.p), fold(&self.q))
    }

    /// The eps = 0 slice `omega_0`.
    pub fn leading(&self) -> (Polynomial2, Polynomial2) {
        (
            self.p.first().cloned().unwrap_or_else(Polynomial2::zero),
            self.q.first().cloned().unwrap_or_else(Polynomial2::zero),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.p.iter().chain(self.q.iter()).all(|c| c.is_zero())
    }

    pub fn negated(&self) -> Self {
        Self {
            p: self.p.iter().map(|c| c.scale(-1.0)).collect(),
            q: self.q.iter().map(|c| c.scale(-1.0)).collect(),
        }
    }

    /// `(alpha + beta x^2) y dx`.
    pub fn canonical(alpha: f64, beta: f64) -> Self {
        Self::constant(
            Polynomial2::from_terms([(0, 1, alpha), (2, 1, beta)]),
            Polynomial2::zero(),
        )
    }
}

/// `y^2/2 - (x^2 - 1)^2/4`.
pub fn canonical_f() -> Polynomial2 {
    Polynomial2::from_terms([(0, 2, 0.5), (0, 0, -0.25), (2, 0, 0.5), (4, 0, -0.25)])
}

/// Perturbed foliation `df + eps omega = 0` frozen at one eps.
///
/// The leaves are integral curves of `V = (f_y + eps Q, -(f_x + eps P))`.
#[derive(Debug, Clone)]
pub struct Foliation {
    pub eps: f64,
    pub f: Polynomial2,
    a1: Polynomial2,
    a2: Polynomial2,
    a1x: Polynomial2,
    a1y: Polynomial2,
    a2x: Polynomial2,
    a2y: Polynomial2,
    p0: Polynomial2,
    q0: Polynomial2,
}

impl Foliation {
    pub fn new(f: &Polynomial2, omega: &OneForm, eps: f64) -> Self {
        let (p, q) = omega.at(eps);
        let a1 = f.diff_x().add(&p.scale(eps));
        let a2 = f.diff_y().add(&q.scale(eps));
        let (p0, q0) = omega.leading();
        Self {
            eps,
            f: f.clone(),
            a1x: a1.diff_x(),
            a1y: a1.diff_y(),
            a2x: a2.diff_x(),
            a2y: a2.diff_y(),
            a1,
            a2,
            p0,
            q0,
        }
    }

    /// Coefficients of the Pfaffian form `a1 dx + a2 dy`.
    #[inline]
    pub fn alpha(&self, x: C64, y: C64) -> (C64, C64) {
        (self.a1.eval_c(x, y), self.a2.eval_c(x, y))
    }

    #[inline]
    pub fn field(&self, x: f64, y: f64) -> [f64; 2] {
        [self.a2.eval_r(x, y), -self.a1.eval_r(x, y)]
    }

    #[inline]
    pub fn field_c(&self, x: C64, y: C64) -> [C64; 2] {
        [self.a2.eval_c(x, y), -self.a1.eval_c(x, y)]
    }

    /// Jacobian of the real field.
    pub fn jacobian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        [
            [self.a2x.eval_r(x, y), self.a2y.eval_r(x, y)],
            [-self.a1x.eval_r(x, y), -self.a1y.eval_r(x, y)],
        ]
    }

    #[inline]
    pub fn omega0(&self, x: C64, y: C64) -> (C64, C64) {
        (self.p0.eval_c(x, y), self.q0.eval_c(x, y))
    }

    #[inline]
    pub fn f_c(&self, x: C64, y: C64) -> C64 {
        self.f.eval_c(x, y)
    }

    /// Newton refinement of a zero of the real field.
    pub fn refine_singular_point(&self, guess: [f64; 2]) -> Result<[f64; 2]> {
        let mut p = guess;
        for _ in 0..60 {
            let v = self.field(p[0], p[1]);
            let j = self.jacobian(p[0], p[1]);
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det.abs() < 1e-14 {
                return Err(Error::SaddleLost);
            }
            let dx = (v[0] * j[1][1] - v[1] * j[0][1]) / det;
            let dy = (j[0][0] * v[1] - j[1][0] * v[0]) / det;
            p = [p[0] - dx, p[1] - dy];
            if dx.abs() + dy.abs() < 1e-15 * (1.0 + p[0].abs() + p[1].abs()) {
                break;
            }
        }
        let v = self.field(p[0], p[1]);
        if v[0].abs() + v[1].abs() > 1e-11 || (p[0] - guess[0]).hypot(p[1] - guess[1]) > 0.1 {
            return Err(Error::SaddleLost);
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalKind {
    Saddle,
    Center,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub x: f64,
    pub y: f64,
    pub kind: CriticalKind,
    pub level: f64,
    pub hessian_det: f64,
}

impl CriticalPoint {
    pub fn pos(&self) -> [f64; 2] {
        [self.x, self.y]
    }
}

fn classify(f: &Polynomial2, x: f64, y: f64) -> CriticalPoint {
    let fxx = f.diff_x().diff_x().eval_r(x, y);
    let fxy = f.diff_x().diff_y().eval_r(x, y);
    let fyy = f.diff_y().diff_y().eval_r(x, y);
    let det = fxx * fyy - fxy * fxy;
    let kind = if det.abs() < 1e-10 {
        CriticalKind::Degenerate
    } else if det < 0.0 {
        CriticalKind::Saddle
    } else {
        CriticalKind::Center
    };
    CriticalPoint {
        x,
        y,
        kind,
        level: f.eval_r(x, y),
        hessian_det: det,
    }
}

/// Multi-start Newton on `grad f = 0` from a `grid_n x grid_n` seed grid.
pub fn find_critical_points(
    f: &Polynomial2,
    search_box: [f64; 4],
    grid_n: usize,
) -> Result<Vec<CriticalPoint>> {
    let [x0, x1, y0, y1] = search_box;
    if grid_n < 8 {
        return Err(Error::pre("grid_n must be at least 8"));
    }
    if !(x1 > x0 && y1 > y0) {
        return Err(Error::pre("search box is degenerate"));
    }
    let fx = f.diff_x();
    let fy = f.diff_y();
    let (fxx, fxy, fyy) = (fx.diff_x(), fx.diff_y(), fy.diff_y());
    let mut found: Vec<CriticalPoint> = Vec::new();
    for i in 0..grid_n {
        for j in 0..grid_n {
            let mut x = x0 + (x1 - x0) * (i as f64 + 0.5) / grid_n as f64;
            let mut y = y0 + (y1 - y0) * (j as f64 + 0.5) / grid_n as f64;
            let mut ok = false;
            for _ in 0..100 {
                let (gx, gy) = (fx.eval_r(x, y), fy.eval_r(x, y));
                if gx.hypot(gy) < 1e-13 {
                    ok = true;
                    break;
                }
                let (a, b, d) = (fxx.eval_r(x, y), fxy.eval_r(x, y), fyy.eval_r(x, y));
                let det = a * d - b * b;
                let (sx, sy) = if det.abs() > 1e-14 {
                    ((gx * d - gy * b) / det, (a * gy - b * gx) / det)
                } else {
                    // gradient step fallback near degenerate Hessians
                    (gx * 0.1, gy * 0.1)
                };
                let scale = 1.0_f64.max(sx.hypot(sy) / (0.5 * (x1 - x0).max(y1 - y0)));
                x -= sx / scale;
                y -= sy / scale;
                if !(x.is_finite() && y.is_finite()) {
                    break;
                }
            }
            if !ok {
                let (gx, gy) = (fx.eval_r(x, y), fy.eval_r(x, y));
                ok = gx.hypot(gy) < 1e-12;
            }
            if !ok || x < x0 || x > x1 || y < y0 || y > y1 {
                continue;
            }
            if found.iter().any(|c| (c.x - x).hypot(c.y - y) < 1e-8) {
                continue;
            }
            found.push(classify(f, x, y));
        }
    }
    found.sort_by(|a, b| {
        a.x.partial_cmp(&b.x)
            .unwrap()
            .then(a.y.partial_cmp(&b.y).unwrap())
    });
    Ok(found)
}

/// Straight transversal segment `origin + lambda * dir`, `lambda` in `[0, length]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub origin: [f64; 2],
    pub dir: [f64; 2],
    pub length: f64,
}

impl Segment {
    pub fn through(a: [f64; 2], b: [f64; 2]) -> Self {
        let d = [b[0] - a[0], b[1] - a[1]];
        let len = d[0].hypot(d[1]);
        Self {
            origin: a,
            dir: [d[0] / len, d[1] / len],
            length: len,
        }
    }

    pub fn point(&self, lambda: C64) -> [C64; 2] {
        [
            self.origin[0] + lambda * self.dir[0],
            self.origin[1] + lambda * self.dir[1],
        ]
    }

    /// Unit normal (dir rotated by +90 degrees).
    pub fn normal(&self) -> [f64; 2] {
        [-self.dir[1], self.dir[0]]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSaddleLoop {
    pub saddle1: CriticalPoint,
    pub saddle2: CriticalPoint,
    pub center: CriticalPoint,
    /// Constant subtracted from the raw first integral.
    pub level_shift: f64,
    pub loop_level: f64,
    pub annulus_sign: f64,
    pub annulus_range: (f64, f64),
    pub section_anchor: [f64; 2],
    /// Midpoint of the connection from saddle 1 to saddle 2.
    pub mid_forward: [f64; 2],
    /// Midpoint of the connection from saddle 2 to saddle 1.
    pub mid_backward: [f64; 2],
}

impl TwoSaddleLoop {
    /// Transversal from the center to the saddle1 -> saddle2 connection.
    pub fn sigma(&self) -> Segment {
        Segment::through(self.center.pos(), self.mid_forward)
    }

    /// Transversal from the center to the saddle2 -> saddle1 connection.
    pub fn tau(&self) -> Segment {
        Segment::through(self.center.pos(), self.mid_backward)
    }

    pub fn saddle(&self, index: usize) -> &CriticalPoint {
        if index == 1 {
            &self.saddle1
        } else {
            &self.saddle2
        }
    }

    /// Largest normalized parameter, `|f(center)|`.
    pub fn s_max(&self) -> f64 {
        self.center.level.abs()
    }
}

const CONNECT_RADIUS: f64 = 1e-3;

/// Arclength-sampled heteroclinic connection, ends trimmed at equal radius.
fn connection(fol: &Foliation, from: &CriticalPoint, to: &CriticalPoint) -> Result<Vec<[f64; 2]>> {
    let budget = 50.0 * (1.0 + (from.x - to.x).hypot(from.y - to.y));
    for branch in [flow::Branch::UnstablePlus, flow::Branch::UnstableMinus] {
        let target = to.pos();
        let traj = flow::separatrix_trajectory(fol, from.pos(), branch, budget, 2e-3, |p| {
            (p[0] - target[0]).hypot(p[1] - target[1]) < CONNECT_RADIUS
        });
        if let Ok(tr) = traj {
            if tr.hit {
                let start = tr
                    .points
                    .iter()
                    .position(|p| (p[0] - from.x).hypot(p[1] - from.y) >= CONNECT_RADIUS)
                    .unwrap_or(0);
                return Ok(tr.points[start..].to_vec());
            }
        }
    }
    Err(Error::NoConnection)
}

fn arclength_midpoint(pts: &[[f64; 2]]) -> [f64; 2] {
    let mut cum = vec![0.0];
    for w in pts.windows(2) {
        let l = cum.last().unwrap() + (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
        cum.push(l);
    }
    let half = cum.last().unwrap() / 2.0;
    let k = cum
        .iter()
        .position(|c| *c >= half)
        .unwrap_or(pts.len() - 1)
        .max(1);
    let t = (half - cum[k - 1]) / (cum[k] - cum[k - 1]).max(1e-300);
    [
        pts[k - 1][0] + t * (pts[k][0] - pts[k - 1][0]),
        pts[k - 1][1] + t * (pts[k][1] - pts[k - 1][1]),
    ]
}

fn winding_about(poly: &[[f64; 2]], p: [f64; 2]) -> f64 {
    let mut total = 0.0;
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        let a0 = (a[1] - p[1]).atan2(a[0] - p[0]);
        let b0 = (b[1] - p[1]).atan2(b[0] - p[0]);
        let mut d = b0 - a0;
        while d > core::f64::consts::PI {
            d -= 2.0 * core::f64::consts::PI;
        }
        while d < -core::f64::consts::PI {
            d += 2.0 * core::f64::consts::PI;
        }
        total += d;
    }
    total / (2.0 * core::f64::consts::PI)
}

/// Checks both heteroclinic connections and locates the annulus.
pub fn validate_two_saddle_loop(
    f: &Polynomial2,
    s1: &CriticalPoint,
    s2: &CriticalPoint,
) -> Result<TwoSaddleLoop> {
    if s1.kind != CriticalKind::Saddle || s2.kind != CriticalKind::Saddle {
        return Err(Error::pre("both critical points must be saddles"));
    }
    if (s1.x - s2.x).hypot(s1.y - s2.y) < 1e-8 {
        return Err(Error::pre("saddles must be distinct"));
    }
    let l1 = f.eval_r(s1.x, s1.y);
    let l2 = f.eval_r(s2.x, s2.y);
    if (l1 - l2).abs() >= 1e-10 {
        return Err(Error::SaddleLevelMismatch((l1 - l2).abs()));
    }
    let shift = 0.5 * (l1 + l2);
    let g = f.shifted(-shift);
    let fol = Foliation::new(&g, &OneForm::zero(), 0.0);
    let sd1 = classify(&g, s1.x, s1.y);
    let sd2 = classify(&g, s2.x, s2.y);
    if sd1.hessian_det > -1e-10 || sd2.hessian_det > -1e-10 {
        return Err(Error::pre("saddles must be Morse"));
    }
    let fwd = connection(&fol, &sd1, &sd2)?;
    let bwd = connection(&fol, &sd2, &sd1)?;

    let mut ring = fwd.clone();
    ring.extend_from_slice(&bwd);
    let n = ring.len() as f64;
    let centroid = [
        ring.iter().map(|p| p[0]).sum::<f64>() / n,
        ring.iter().map(|p| p[1]).sum::<f64>() / n,
    ];
    let sign = if g.eval_r(centroid[0], centroid[1]) < 0.0 {
        -1.0
    } else {
        1.0
    };

    let grad = Foliation::new(&g, &OneForm::zero(), 0.0);
    let c = grad
        .refine_singular_point(centroid)
        .map_err(|_| Error::NoInteriorCenter)?;
    let center = classify(&g, c[0], c[1]);
    if center.kind != CriticalKind::Center
        || winding_about(&ring, c).abs() < 0.5
        || center.level * sign <= 0.0
    {
        return Err(Error::NoInteriorCenter);
    }
    let mid_forward = arclength_midpoint(&fwd);
    let mid_backward = arclength_midpoint(&bwd);
    let range = if sign < 0.0 {
        (center.level, 0.0)
    } else {
        (0.0, center.level)
    };
    let anchor = [
        0.5 * (center.x + mid_forward[0]),
        0.5 * (center.y + mid_forward[1]),
    ];
    Ok(TwoSaddleLoop {
        saddle1: sd1,
        saddle2: sd2,
        center,
        level_shift: shift,
        loop_level: 0.0,
        annulus_sign: sign,
        annulus_range: range,
        section_anchor: anchor,
        mid_forward,
        mid_backward,
    })
}

/// `s = annulus_sign * t`, positive inside the annulus.
pub fn normalized_parameter(lp: &TwoSaddleLoop, t: f64) -> Result<f64> {
    let (lo, hi) = lp.annulus_range;
    if !(t > lo && t < hi) {
        return Err(Error::OutOfAnnulus(t));
    }
    Ok(lp.annulus_sign * t)
}

/// First integral, perturbation and validated loop. `f` is already shifted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSystem {
    pub f: Polynomial2,
    pub omega: OneForm,
    pub lp: TwoSaddleLoop,
}

impl HamiltonianSystem {
    pub fn from_loop(f: &Polynomial2, omega: OneForm, lp: TwoSaddleLoop) -> Self {
        Self {
            f: f.shifted(-lp.level_shift),
            omega,
            lp,
        }
    }

    /// Finds the saddles in the box and validates the loop. Saddles are ordered by x.
    pub fn build(
        f: &Polynomial2,
        omega: OneForm,
        search_box: [f64; 4],
        grid_n: usize,
    ) -> Result<Self> {
        let pts = find_critical_points(f, search_box, grid_n)?;
        let saddles: Vec<_> = pts
            .iter()
            .filter(|p| p.kind == CriticalKind::Saddle)
            .collect();
        for i in 0..saddles.len() {
            for j in i + 1..saddles.len() {
                if let Ok(lp) = validate_two_saddle_loop(f, saddles[i], saddles[j]) {
                    return Ok(Self::from_loop(f, omega, lp));
                }
            }
        }
        Err(Error::NoConnection)
    }

    /// Canonical eye system with `omega = (alpha + beta x^2) y dx`.
    pub fn canonical(alpha: f64, beta: f64) -> Result<Self> {
        Self::build(
            &canonical_f(),
            OneForm::canonical(alpha, beta),
            [-2.0, 2.0, -2.0, 2.0],
            16,
        )
    }

    pub fn with_omega(&self, omega: OneForm) -> Self {
        Self {
            f: self.f.clone(),
            omega,
            lp: self.lp.clone(),
        }
    }

    pub fn foliation(&self, eps: f64) -> Foliation {
        Foliation::new(&self.f, &self.omega, eps)
    }

    pub fn sign(&self) -> f64 {
        self.lp.annulus_sign
    }

    /// Point of the transversal `seg` with `sign * f = s`, continued from the real solution.
    pub fn point_on_segment(&self, seg: &Segment, s: C64) -> Result<[C64; 2]> {
        let sign = self.sign();
        let g = |lam: f64| {
            sign * self.f.eval_r(
                seg.origin[0] + lam * seg.dir[0],
                seg.origin[1] + lam * seg.dir[1],
            )
        };
        let target = s.re;
        // bracket on [0, 1.6 L]; s decreases from the center outward
        let (mut lo, mut hi) = (0.0, 1.6 * seg.length);
        if (g(lo) - target) * (g(hi) - target) > 0.0 {
            return Err(Error::pre("parameter not reachable on the transversal"));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (g(lo) - target) * (g(mid) - target) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-16 {
                break;
            }
        }
        let mut lam = C64::new(0.5 * (lo + hi), 0.0);
        let fx = self.f.diff_x();
        let fy = self.f.diff_y();
        let newton = |lam: &mut C64, goal: C64| {
            for _ in 0..50 {
                let p = seg.point(*lam);
                let val = self.f.eval_c(p[0], p[1]) * sign - goal;
                let der = (fx.eval_c(p[0], p[1]) * seg.dir[0] + fy.eval_c(p[0], p[1]) * seg.dir[1])
                    * sign;
                let step = val / der;
                *lam -= step;
                if step.norm() < 1e-16 * (1.0 + lam.norm()) {
                    break;
                }
            }
        };
        let start = C64::new(target, 0.0);
        let n = if s.im == 0.0 { 1 } else { 16 };
        for k in 1..=n {
            let goal = start + (s - start) * (k as f64 / n as f64);
            newton(&mut lam, goal);
        }
        Ok(seg.point(lam))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_form_eps_slices_combine() {
        let w = OneForm::from_terms(&[(0, 0, 1, 1.0), (1, 0, 1, 2.0), (0, 0, 1, 0.5)], &[]);
        let (p, q) = w.at(0.1);
        assert!((p.get(0, 1) - 1.7).abs() < 1e-15);
        assert!(q.is_zero());
    }

    #[test]
    fn critical_points_of_saddle_quadratic() {
        let f = Polynomial2::from_terms([(2, 0, 1.0), (0, 2, -1.0)]);
        let pts = find_critical_points(&f, [-2.0, 2.0, -2.0, 2.0], 16).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].kind, CriticalKind::Saddle);
        assert!(pts[0].x.abs() < 1e-12 && pts[0].level.abs() < 1e-12);
    }

    #[test]
    fn canonical_critical_points() {
        let pts = find_critical_points(&canonical_f(), [-2.0, 2.0, -2.0, 2.0], 16).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0].kind, CriticalKind::Saddle);
        assert!((pts[0].x + 1.0).abs() < 1e-12 && pts[0].level.abs() < 1e-12);
        assert_eq!(pts[1].kind, CriticalKind::Center);
        assert!((pts[1].level + 0.25).abs() < 1e-14);
        assert!((pts[2].x - 1.0).abs() < 1e-12);
        // mirror symmetry
        assert!((pts[0].x + pts[2].x).abs() < 1e-10 && (pts[0].y - pts[2].y).abs() < 1e-10);
    }

    #[test]
    fn linear_function_has_no_critical_points() {
        let f = Polynomial2::from_terms([(1, 0, 1.0)]);
        assert!(find_critical_points(&f, [-1.0, 1.0, -1.0, 1.0], 16)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn normalized_parameter_sign() {
        let sys = HamiltonianSystem::canonical(1.0, 0.0).unwrap();
        assert_eq!(sys.lp.annulus_sign, -1.0);
        assert!((normalized_parameter(&sys.lp, -0.1).unwrap() - 0.1).abs() < 1e-15);
        assert!(matches!(
            normalized_parameter(&sys.lp, 0.0),
            Err(Error::OutOfAnnulus(_))
        ));
    }
}
