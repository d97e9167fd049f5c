//! Cyclicity bounds evaluated from characteristic numbers, in exact rationals.

use alloc::string::String;
use alloc::vec::Vec;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Fitted,
    User,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicSet {
    pub nu_p: Rational64,
    pub nu_d1: Rational64,
    pub nu_d2: Rational64,
    pub nu_d12: Rational64,
    pub provenance: Provenance,
}

impl CharacteristicSet {
    pub fn new(
        nu_p: Rational64,
        nu_d1: Rational64,
        nu_d2: Rational64,
        nu_d12: Rational64,
        provenance: Provenance,
    ) -> Result<Self> {
        let cs = Self {
            nu_p,
            nu_d1,
            nu_d2,
            nu_d12,
            provenance,
        };
        cs.validate()?;
        Ok(cs)
    }

    pub fn from_integers(p: i64, d1: i64, d2: i64, d12: i64) -> Result<Self> {
        Self::new(p.into(), d1.into(), d2.into(), d12.into(), Provenance::User)
    }

    pub fn validate(&self) -> Result<()> {
        if [self.nu_p, self.nu_d1, self.nu_d2, self.nu_d12]
            .iter()
            .any(|v| v.is_negative())
        {
            return Err(Error::pre("characteristic numbers must be nonnegative"));
        }
        Ok(())
    }
}

pub fn bound_two_saddle(cs: &CharacteristicSet) -> Rational64 {
    Rational64::from_integer(1) + cs.nu_p + cs.nu_d1.max(cs.nu_d2) + cs.nu_d12
}

pub fn bound_homoclinic(nu_p: Rational64, nu_d1: Rational64) -> Rational64 {
    nu_p + nu_d1
}

pub fn bound_example_form(
    p: Rational64,
    q: Rational64,
    p1: Rational64,
    p2: Rational64,
) -> Rational64 {
    Rational64::from_integer(1) + p.min(q) + p1.max(p2) + q
}

pub fn bound_roussarie(p: i64, q: i64) -> i64 {
    if p < q {
        2 * p
    } else {
        2 * q - 1
    }
}

pub fn bound_dumortier_roussarie(p: i64) -> i64 {
    2 * p - 1 + p * (p - 1) / 2
}

/// Largest integer not above `r`.
pub fn floor(r: Rational64) -> i64 {
    r.floor().to_integer()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub name: String,
    pub value: Rational64,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub p: Rational64,
    pub q: Rational64,
    pub p1: Rational64,
    pub p2: Rational64,
    pub entries: Vec<BoundEntry>,
}

/// All bounds for the same inputs, reading the example's `(p, q, p1, p2)` as
/// `nu_P = min(p, q)`, `nu_d1 = p1`, `nu_d2 = p2`, `nu_d12 = q`. Integer-only formulas appear when `p` and
/// `q` are integers; negative values are clipped to zero with a note.
pub fn compare_bounds(p: Rational64, q: Rational64, p1: Rational64, p2: Rational64) -> BoundReport {
    let mut entries = Vec::new();
    let mut push = |name: &str, v: Rational64| {
        let (value, note) = if v.is_negative() {
            (
                Rational64::zero(),
                Some(alloc::format!("clipped from {}", v)),
            )
        } else {
            (v, None)
        };
        entries.push(BoundEntry {
            name: String::from(name),
            value,
            note,
        });
    };
    push(
        "two_saddle",
        bound_two_saddle(&CharacteristicSet {
            nu_p: p.min(q),
            nu_d1: p1,
            nu_d2: p2,
            nu_d12: q,
            provenance: Provenance::User,
        }),
    );
    push("example_form", bound_example_form(p, q, p1, p2));
    push("homoclinic", bound_homoclinic(p.min(q), p1));
    if p.is_integer() && q.is_integer() {
        push(
            "roussarie",
            bound_roussarie(p.to_integer(), q.to_integer()).into(),
        );
        push(
            "dumortier_roussarie",
            bound_dumortier_roussarie(p.to_integer()).into(),
        );
    }
    BoundReport {
        p,
        q,
        p1,
        p2,
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn literal_formulas() {
        let cs = CharacteristicSet::from_integers(1, 1, 1, 1).unwrap();
        assert_eq!(bound_two_saddle(&cs), r(4, 1));
        assert_eq!(bound_homoclinic(r(3, 2), r(1, 1)), r(5, 2));
        assert_eq!(
            bound_example_form(r(0, 1), r(1, 1), r(1, 1), r(1, 1)),
            r(3, 1)
        );
        assert_eq!(bound_roussarie(1, 2), 2);
        assert_eq!(bound_roussarie(0, 1), 0);
        assert_eq!(bound_dumortier_roussarie(3), 8);
    }

    #[test]
    fn negative_inputs_rejected() {
        assert!(
            CharacteristicSet::new(r(-1, 2), r(0, 1), r(0, 1), r(0, 1), Provenance::User).is_err()
        );
    }

    #[test]
    fn clipping_is_noted() {
        let rep = compare_bounds(r(0, 1), r(0, 1), r(0, 1), r(0, 1));
        let rou = rep.entries.iter().find(|e| e.name == "roussarie").unwrap();
        assert_eq!(rou.value, r(0, 1));
        assert!(rou.note.is_some());
    }
}
