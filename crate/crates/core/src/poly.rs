//! Dense bivariate and univariate polynomials with real coefficients.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul};

use num_complex::Complex64 as C64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// Bivariate polynomial `sum c[i][j] x^i y^j`, stored densely.
///
/// `coef[i * (dy + 1) + j]` is the coefficient of `x^i y^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial2 {
    dx: usize,
    dy: usize,
    coef: Vec<f64>,
}

impl Polynomial2 {
    pub fn zero() -> Self {
        Self {
            dx: 0,
            dy: 0,
            coef: vec![0.0],
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            dx: 0,
            dy: 0,
            coef: vec![c],
        }
    }

    /// Builds from `(i, j, c)` triples. Duplicate monomials are summed.
    pub fn from_terms<I: IntoIterator<Item = (usize, usize, f64)>>(terms: I) -> Self {
        let terms: Vec<_> = terms.into_iter().collect();
        let dx = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let dy = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut coef = vec![0.0; (dx + 1) * (dy + 1)];
        for (i, j, c) in terms {
            coef[i * (dy + 1) + j] += c;
        }
        Self { dx, dy, coef }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        loop {
            let top_x = (0..=self.dy).all(|j| self.get(self.dx, j) == 0.0);
            if self.dx > 0 && top_x {
                self.coef.truncate(self.dx * (self.dy + 1));
                self.dx -= 1;
                continue;
            }
            break;
        }
        while self.dy > 0 && (0..=self.dx).all(|i| self.get(i, self.dy) == 0.0) {
            let dy = self.dy;
            let mut coef = Vec::with_capacity((self.dx + 1) * dy);
            for i in 0..=self.dx {
                coef.extend_from_slice(&self.coef[i * (dy + 1)..i * (dy + 1) + dy]);
            }
            self.coef = coef;
            self.dy -= 1;
        }
        self
    }

    /// Degree bounds `(dx, dy)`.
    pub fn degrees(&self) -> (usize, usize) {
        (self.dx, self.dy)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i > self.dx || j > self.dy {
            0.0
        } else {
            self.coef[i * (self.dy + 1) + j]
        }
    }

    /// Nonzero monomials as `(i, j, c)`.
    pub fn terms(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..=self.dx {
            for j in 0..=self.dy {
                let c = self.get(i, j);
                if c != 0.0 {
                    out.push((i, j, c));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coef.iter().all(|c| *c == 0.0)
    }

    /// Horner evaluation, generic over real or complex arguments.
    pub fn eval<T>(&self, x: T, y: T) -> T
    where
        T: Copy + Zero + From<f64> + Add<Output = T> + Mul<Output = T>,
    {
        let mut acc = T::zero();
        for i in (0..=self.dx).rev() {
            let row = &self.coef[i * (self.dy + 1)..(i + 1) * (self.dy + 1)];
            let mut inner = T::zero();
            for &c in row.iter().rev() {
                inner = inner * y + T::from(c);
            }
            acc = acc * x + inner;
        }
        acc
    }

    pub fn eval_c(&self, x: C64, y: C64) -> C64 {
        self.eval(x, y)
    }

    pub fn eval_r(&self, x: f64, y: f64) -> f64 {
        self.eval(x, y)
    }

    pub fn diff_x(&self) -> Self {
        if self.dx == 0 {
            return Self::zero();
        }
        let mut terms = Vec::new();
        for (i, j, c) in self.terms() {
            if i > 0 {
                terms.push((i - 1, j, c * i as f64));
            }
        }
        Self::from_terms(terms)
    }

    pub fn diff_y(&self) -> Self {
        if self.dy == 0 {
            return Self::zero();
        }
        let mut terms = Vec::new();
        for (i, j, c) in self.terms() {
            if j > 0 {
                terms.push((i, j - 1, c * j as f64));
            }
        }
        Self::from_terms(terms)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_terms(self.terms().into_iter().map(|(i, j, c)| (i, j, c * s)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut t = self.terms();
        t.extend(other.terms());
        Self::from_terms(t)
    }

    /// Same polynomial with the constant term shifted by `c`.
    pub fn shifted(&self, c: f64) -> Self {
        let mut t = self.terms();
        t.push((0, 0, c));
        Self::from_terms(t)
    }

    /// Image under `x -> -x`.
    pub fn mirror_x(&self) -> Self {
        Self::from_terms(
            self.terms()
                .into_iter()
                .map(|(i, j, c)| (i, j, if i % 2 == 1 { -c } else { c })),
        )
    }

    /// Coefficient of `y^j` as a polynomial in `x`.
    pub fn y_slice(&self, j: usize) -> Poly1 {
        Poly1::new((0..=self.dx).map(|i| self.get(i, j)).collect())
    }

    pub fn max_abs_coef(&self) -> f64 {
        self.coef.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }
}

/// Univariate polynomial with real coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly1 {
    pub coef: Vec<f64>,
}

impl Poly1 {
    pub fn new(mut coef: Vec<f64>) -> Self {
        while coef.len() > 1 && *coef.last().unwrap() == 0.0 {
            coef.pop();
        }
        if coef.is_empty() {
            coef.push(0.0);
        }
        Self { coef }
    }

    pub fn degree(&self) -> usize {
        self.coef.len() - 1
    }

    pub fn eval_c(&self, x: C64) -> C64 {
        self.coef
            .iter()
            .rev()
            .fold(C64::zero(), |acc, &c| acc * x + c)
    }

    pub fn eval_r(&self, x: f64) -> f64 {
        self.coef.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut c = vec![0.0; self.coef.len() + o.coef.len() - 1];
        for (i, a) in self.coef.iter().enumerate() {
            for (j, b) in o.coef.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coef.len().max(o.coef.len());
        Self::new(
            (0..n)
                .map(|i| {
                    self.coef.get(i).copied().unwrap_or(0.0) + o.coef.get(i).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coef.iter().map(|c| c * s).collect())
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }
}
