//! Simultaneous root finding for univariate polynomials (Aberth iteration).

use alloc::vec::Vec;

use num_complex::Complex64 as C64;

use crate::poly::Poly1;

/// All complex roots of `p`, unordered. Empty for constants.
pub fn roots(p: &Poly1) -> Vec<C64> {
    let n = p.degree();
    if n == 0 {
        return Vec::new();
    }
    let lead = p.coef[n];
    let c: Vec<f64> = p.coef.iter().map(|a| a / lead).collect();
    // Cauchy bound for the initial circle
    let bound = 1.0 + c[..n].iter().fold(0.0_f64, |m, a| m.max(a.abs()));
    let r0 = bound.min(1e6) * 0.5 + 0.1;
    let mut z: Vec<C64> = (0..n)
        .map(|k| C64::from_polar(r0, 0.4 + 2.0 * core::f64::consts::PI * k as f64 / n as f64))
        .collect();
    let dp = Poly1::new((1..=n).map(|i| c[i] * i as f64).collect());
    let pm = Poly1::new(c.clone());
    for _ in 0..500 {
        let mut moved = 0.0_f64;
        for i in 0..n {
            let pv = pm.eval_c(z[i]);
            let dv = dp.eval_c(z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dv;
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let w = ratio / (C64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-16 {
            break;
        }
    }
    // one Newton polish per root
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let dv = dp.eval_c(*zi);
            if dv.norm() > 0.0 {
                *zi -= pm.eval_c(*zi) / dv;
            }
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_with_known_roots() {
        // (x^2 - 1)^2 - 0.04 has roots at x^2 = 1 +- 0.2
        let p = Poly1::new(alloc::vec![1.0 - 0.04, 0.0, -2.0, 0.0, 1.0]);
        let mut r: Vec<f64> = roots(&p).iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let e = [
            -(1.2f64).sqrt(),
            -(0.8f64).sqrt(),
            (0.8f64).sqrt(),
            (1.2f64).sqrt(),
        ];
        for (a, b) in r.iter().zip(e.iter()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn complex_pair() {
        let p = Poly1::new(alloc::vec![1.0, 0.0, 1.0]);
        let r = roots(&p);
        assert_eq!(r.len(), 2);
        for z in r {
            assert!((z.norm() - 1.0).abs() < 1e-14 && z.re.abs() < 1e-14);
        }
    }
}
