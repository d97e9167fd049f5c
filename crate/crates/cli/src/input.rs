//! System description files.
//!
//! ```json
//! {
//!   "f": [[0, 2, 0.5], [4, 0, -0.25], [2, 0, 0.5], [0, 0, -0.25]],
//!   "omega": { "P": [[0, 0, 1, 1.0]], "Q": [] },
//!   "search_box": [-2, 2, -2, 2]
//! }
//! ```
//!
//! `f` terms are `[i, j, c]` for `c x^i y^j`. Form terms are `[k, i, j, c]`
//! for `c eps^k x^i y^j`; a three-entry term means `k = 0`. Duplicates add up.

use std::path::Path;

use saddleloop::poly::Polynomial2;
use saddleloop::system::{HamiltonianSystem, OneForm};
use serde::Deserialize;

use crate::report::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub f: Vec<Vec<f64>>,
    #[serde(default)]
    pub omega: FormFile,
    #[serde(default = "default_box")]
    pub search_box: [f64; 4],
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormFile {
    #[serde(rename = "P", default)]
    pub p: Vec<Vec<f64>>,
    #[serde(rename = "Q", default)]
    pub q: Vec<Vec<f64>>,
}

fn default_box() -> [f64; 4] {
    [-2.0, 2.0, -2.0, 2.0]
}

fn default_grid_n() -> usize {
    16
}

fn index(v: f64, what: &str) -> Result<usize, CliError> {
    if v >= 0.0 && v.fract() == 0.0 && v <= 64.0 {
        Ok(v as usize)
    } else {
        Err(CliError::validation(
            "input",
            "read_system",
            format!("{what} must be a small nonnegative integer, got {v}"),
        ))
    }
}

fn f_terms(raw: &[Vec<f64>]) -> Result<Vec<(usize, usize, f64)>, CliError> {
    raw.iter()
        .map(|t| match t.as_slice() {
            [i, j, c] if c.is_finite() => Ok((index(*i, "exponent")?, index(*j, "exponent")?, *c)),
            _ => Err(CliError::validation(
                "input",
                "read_system",
                format!("bad f term {t:?}"),
            )),
        })
        .collect()
}

fn form_terms(raw: &[Vec<f64>]) -> Result<Vec<(usize, usize, usize, f64)>, CliError> {
    raw.iter()
        .map(|t| match t.as_slice() {
            [i, j, c] if c.is_finite() => {
                Ok((0, index(*i, "exponent")?, index(*j, "exponent")?, *c))
            }
            [k, i, j, c] if c.is_finite() => Ok((
                index(*k, "eps power")?,
                index(*i, "exponent")?,
                index(*j, "exponent")?,
                *c,
            )),
            _ => Err(CliError::validation(
                "input",
                "read_system",
                format!("bad form term {t:?}"),
            )),
        })
        .collect()
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::validation("input", "read_system", e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::validation("input", "read_system", format!("{}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    pub fn polynomial(&self) -> Result<Polynomial2, CliError> {
        let terms = f_terms(&self.f)?;
        if terms.iter().all(|t| t.2 == 0.0) {
            return Err(CliError::validation(
                "input",
                "read_system",
                "f is identically zero".into(),
            ));
        }
        Ok(Polynomial2::from_terms(terms))
    }

    pub fn form(&self) -> Result<OneForm, CliError> {
        Ok(OneForm::from_terms(
            &form_terms(&self.omega.p)?,
            &form_terms(&self.omega.q)?,
        ))
    }

    /// Locates the saddles and validates the loop.
    pub fn build(&self) -> Result<HamiltonianSystem, CliError> {
        let [x0, x1, y0, y1] = self.search_box;
        if !(x0 < x1 && y0 < y1) {
            return Err(CliError::validation(
                "input",
                "read_system",
                "search_box must be [xmin, xmax, ymin, ymax]".into(),
            ));
        }
        HamiltonianSystem::build(
            &self.polynomial()?,
            self.form()?,
            self.search_box,
            self.grid_n,
        )
        .map_err(|e| CliError::core("system", "validate_two_saddle_loop", e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let sf = SystemFile::parse(r#"{"f": [[0,2,0.25],[0,2,0.25],[4,0,-0.25],[2,0,0.5],[0,0,-0.25]], "omega": {"P": [[0,1,1.0]]}}"#).unwrap();
        let p = sf.polynomial().unwrap();
        assert!((p.eval_r(0.0, 2.0) - (2.0 - 0.25)).abs() < 1e-15);
    }

    #[test]
    fn negative_exponent_rejected() {
        let sf = SystemFile::parse(r#"{"f": [[-1,2,0.5]]}"#).unwrap();
        assert!(sf.polynomial().is_err());
    }

    #[test]
    fn unknown_field_rejected() {
        assert!(SystemFile::parse(r#"{"f": [], "g": 1}"#).is_err());
    }
}
