//! Leading-term fits `c s^p |log s|^q` for sampled functions near `s = 0`.

use alloc::vec::Vec;

use num_rational::Rational64;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticModel {
    /// Snapped exponent, present when the raw fit lies within 0.02 of a quarter.
    pub p: Option<Rational64>,
    pub p_raw: f64,
    pub q: u32,
    pub c: f64,
    pub fit_rms: f64,
}

impl AsymptoticModel {
    pub fn p_value(&self) -> f64 {
        match self.p {
            Some(r) => *r.numer() as f64 / *r.denom() as f64,
            None => self.p_raw,
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.c * s.powf(self.p_value()) * s.ln().abs().powi(self.q as i32)
    }
}

const SNAP_TOL: f64 = 0.02;
const MAX_Q: u32 = 3;

/// Nearest rational with denominator at most 4, if within the snap tolerance.
pub fn snap_exponent(p: f64) -> Option<Rational64> {
    let mut best: Option<(f64, Rational64)> = None;
    for den in [1i64, 2, 3, 4] {
        let num = (p * den as f64).round();
        let err = (p - num / den as f64).abs();
        if err <= SNAP_TOL && best.map_or(true, |(e, _)| err < e - 1e-12) {
            best = Some((err, Rational64::new(num as i64, den)));
        }
    }
    best.map(|(_, r)| r)
}

fn slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let b = sxy / sxx;
    (b, my - b * mx)
}

/// Fits `(p, q)` of the leading term from samples on a grid tending to zero.
///
/// For each `q` the slope of `log|v| - q log|log s|` against `log s` on the two
/// smallest decades gives `p`; the pair that best predicts the three smallest
/// points from a constant fitted on the rest wins.
pub fn characteristic_number(grid: &[f64], values: &[f64]) -> Result<AsymptoticModel> {
    if grid.len() != values.len() || grid.len() < 12 {
        return Err(Error::pre("need at least 12 samples"));
    }
    let mut pts: Vec<(f64, f64)> = grid.iter().copied().zip(values.iter().copied()).collect();
    if pts.iter().any(|(s, _)| !(*s > 0.0 && *s < 1.0)) {
        return Err(Error::pre("grid must lie in (0, 1)"));
    }
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
    let (smin, smax) = (pts[0].0, pts[pts.len() - 1].0);
    if smax / smin < 1e3 * (1.0 - 1e-9) {
        return Err(Error::pre("grid must span three decades"));
    }
    let scale = pts.iter().fold(0.0_f64, |m, p| m.max(p.1.abs()));
    if scale == 0.0 || pts.iter().any(|p| p.1 == 0.0 || !p.1.is_finite()) {
        return Err(Error::Degenerate);
    }
    let sign = pts[0].1.signum();
    let lx: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ll: Vec<f64> = lx.iter().map(|x| x.abs().ln()).collect();
    let lv: Vec<f64> = pts.iter().map(|p| p.1.abs().ln()).collect();
    let n = pts.len();
    let dec1 = pts
        .iter()
        .take_while(|p| p.0 <= smin * 10.0 * (1.0 + 1e-9))
        .count();
    let dec2 = pts
        .iter()
        .take_while(|p| p.0 <= smin * 100.0 * (1.0 + 1e-9))
        .count();
    let hold = 3;

    let mut best: Option<(f64, AsymptoticModel)> = None;
    for q in 0..=MAX_Q {
        let y: Vec<f64> = lv
            .iter()
            .zip(ll.iter())
            .map(|(v, l)| v - q as f64 * l)
            .collect();
        let (p_raw, _) = slope(&lx[..dec2], &y[..dec2]);
        let snapped = snap_exponent(p_raw);
        let p = snapped.map_or(p_raw, |r| *r.numer() as f64 / *r.denom() as f64);
        let resid: Vec<f64> = (0..n).map(|i| y[i] - p * lx[i]).collect();
        let c_fit = resid[hold..].iter().sum::<f64>() / (n - hold) as f64;
        let score = (resid[..hold]
            .iter()
            .map(|r| (r - c_fit).powi(2))
            .sum::<f64>()
            / hold as f64)
            .sqrt();
        let c_all = resid.iter().sum::<f64>() / n as f64;
        let rms = (resid.iter().map(|r| (r - c_all).powi(2)).sum::<f64>() / n as f64).sqrt();
        let model = AsymptoticModel {
            p: snapped,
            p_raw,
            q,
            c: sign * c_all.exp(),
            fit_rms: rms,
        };
        // snapped candidates are preferred at equal score
        let key = score * if snapped.is_some() { 1.0 } else { 4.0 };
        if best.as_ref().map_or(true, |(k, _)| key < *k) {
            best = Some((key, model));
        }
    }
    let (_, model) = best.ok_or(Error::NoisyTail)?;
    if dec1 >= 3 && dec2 - dec1 >= 3 {
        let y: Vec<f64> = lv
            .iter()
            .zip(ll.iter())
            .map(|(v, l)| v - model.q as f64 * l)
            .collect();
        let (p1, _) = slope(&lx[..dec1], &y[..dec1]);
        let (p2, _) = slope(&lx[dec1..dec2], &y[dec1..dec2]);
        if (p1 - p2).abs() > 0.1 {
            return Err(Error::NoisyTail);
        }
    }
    Ok(model)
}
