//! Dormand-Prince 5(4) with PI step control and cubic Hermite dense output.

use crate::error::Error;
#[allow(unused_imports)]
use num_traits::Float;

/// Tolerances and budgets for a single integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub h_max: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            max_steps: 200_000,
            h_max: f64::INFINITY,
        }
    }
}

/// One accepted step, enough for cubic Hermite interpolation.
#[derive(Debug, Clone, Copy)]
pub struct Step<const N: usize> {
    pub t0: f64,
    pub y0: [f64; N],
    pub f0: [f64; N],
    pub t1: f64,
    pub y1: [f64; N],
    pub f1: [f64; N],
}

impl<const N: usize> Step<N> {
    /// Cubic Hermite interpolant at `t` inside the step.
    pub fn dense(&self, t: f64) -> [f64; N] {
        let h = self.t1 - self.t0;
        let th = (t - self.t0) / h;
        let h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
        let h10 = th * (1.0 - th) * (1.0 - th);
        let h01 = th * th * (3.0 - 2.0 * th);
        let h11 = th * th * (th - 1.0);
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] =
                h00 * self.y0[i] + h10 * h * self.f0[i] + h01 * self.y1[i] + h11 * h * self.f1[i];
        }
        out
    }
}

/// Observer verdict after each accepted step.
pub enum Control {
    Continue,
    Stop,
}

/// Result of [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Outcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub steps: usize,
    pub stopped: bool,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t1` (either direction).
///
/// `observe` sees every accepted step and may stop early.
pub fn integrate<const N: usize, R, O>(
    mut rhs: R,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    ctl: &StepControl,
    mut observe: O,
) -> Result<Outcome<N>, Error>
where
    R: FnMut(f64, &[f64; N]) -> Result<[f64; N], Error>,
    O: FnMut(&Step<N>) -> Result<Control, Error>,
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(Outcome {
            t: t0,
            y: y0,
            steps: 0,
            stopped: false,
        });
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut f = rhs(t, &y)?;

    let scale = |y: &[f64; N], i: usize| ctl.atol + ctl.rtol * y[i].abs();
    let d0 = (0..N)
        .map(|i| (y[i] / scale(&y, i)).powi(2))
        .sum::<f64>()
        .sqrt()
        / (N as f64).sqrt();
    let d1 = (0..N)
        .map(|i| (f[i] / scale(&y, i)).powi(2))
        .sum::<f64>()
        .sqrt()
        / (N as f64).sqrt();
    let mut h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h = h.min(span.abs()).min(ctl.h_max).max(1e-14);

    let beta = 0.04;
    let alpha = 0.2 - 0.75 * beta;
    let mut err_prev: f64 = 1e-4;
    let mut steps = 0usize;
    let mut reject_last = false;

    loop {
        if steps >= ctl.max_steps {
            return Err(Error::StepBudgetExceeded);
        }
        let remaining = (t1 - t).abs();
        let last = h >= remaining * (1.0 - 1e-13);
        let hs = if last { remaining } else { h } * dir;

        let k1 = f;
        let k2 = rhs(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]))?;
        let k3 = rhs(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = rhs(
            t + C4 * hs,
            &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
        )?;
        let k5 = rhs(
            t + C5 * hs,
            &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let k6 = rhs(
            t + hs,
            &axpy(
                &y,
                hs,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        )?;
        let y_new = axpy(
            &y,
            hs,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let t_new = if last { t1 } else { t + hs };
        let k7 = rhs(t_new, &y_new)?;

        let mut err = 0.0;
        for i in 0..N {
            let e =
                hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = ctl.atol + ctl.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc) * (e / sc);
        }
        let err = (err / N as f64).sqrt();
        steps += 1;
        if !err.is_finite() {
            h *= 0.2;
            reject_last = true;
            if h < 1e-15 * (1.0 + t.abs()) {
                return Err(Error::StepSizeUnderflow);
            }
            continue;
        }

        if err <= 1.0 {
            let step = Step {
                t0: t,
                y0: y,
                f0: k1,
                t1: t_new,
                y1: y_new,
                f1: k7,
            };
            t = t_new;
            y = y_new;
            f = k7;
            if let Control::Stop = observe(&step)? {
                return Ok(Outcome {
                    t,
                    y,
                    steps,
                    stopped: true,
                });
            }
            if last {
                return Ok(Outcome {
                    t,
                    y,
                    steps,
                    stopped: false,
                });
            }
            let mut fac = 0.9 * err.max(1e-10).powf(-alpha) * err_prev.powf(beta);
            fac = fac.clamp(0.2, 10.0);
            if reject_last {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(ctl.h_max);
            err_prev = err.max(1e-4);
            reject_last = false;
        } else {
            let fac = (0.9 * err.powf(-alpha)).clamp(0.2, 1.0);
            h *= fac;
            reject_last = true;
            if h < 1e-15 * (1.0 + t.abs()) {
                return Err(Error::StepSizeUnderflow);
            }
        }
    }
}

/// Integrates without observation.
pub fn solve<const N: usize, R>(
    rhs: R,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    ctl: &StepControl,
) -> Result<Outcome<N>, Error>
where
    R: FnMut(f64, &[f64; N]) -> Result<[f64; N], Error>,
{
    integrate(rhs, t0, y0, t1, ctl, |_| Ok(Control::Continue))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_matches_closed_form() {
        let ctl = StepControl {
            rtol: 1e-12,
            atol: 1e-12,
            ..Default::default()
        };
        let out = solve(|_, y: &[f64; 1]| Ok([-y[0]]), 0.0, [1.0], 3.0, &ctl).unwrap();
        assert!((out.y[0] - (-3.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let ctl = StepControl {
            rtol: 1e-12,
            atol: 1e-12,
            ..Default::default()
        };
        let out = solve(
            |_, y: &[f64; 2]| Ok([y[1], -y[0]]),
            0.0,
            [0.0, 1.0],
            -2.0,
            &ctl,
        )
        .unwrap();
        assert!((out.y[0] - (-2.0f64).sin()).abs() < 1e-10);
        assert!((out.y[1] - (-2.0f64).cos()).abs() < 1e-10);
    }

    #[test]
    fn dense_output_is_third_order_accurate() {
        let ctl = StepControl {
            rtol: 1e-9,
            atol: 1e-9,
            ..Default::default()
        };
        let mut worst: f64 = 0.0;
        solve(|_, y: &[f64; 1]| Ok([y[0]]), 0.0, [1.0], 1.0, &ctl).unwrap();
        integrate(
            |_, y: &[f64; 1]| Ok([y[0]]),
            0.0,
            [1.0],
            1.0,
            &ctl,
            |s| {
                let tm = 0.5 * (s.t0 + s.t1);
                worst = worst.max((s.dense(tm)[0] - tm.exp()).abs());
                Ok(Control::Continue)
            },
        )
        .unwrap();
        assert!(worst < 1e-6, "{worst}");
    }
}
