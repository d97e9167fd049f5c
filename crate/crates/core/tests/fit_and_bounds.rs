use proptest::prelude::*;
use saddleloop::bounds::{self, CharacteristicSet};
use saddleloop::fit::{characteristic_number, snap_exponent};
use saddleloop::{Error, Rational64};

fn grid() -> Vec<f64> {
    (0..16).map(|j| 0.0625 * 0.5f64.powi(j)).collect()
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

#[test]
fn recovers_every_table_entry_without_noise() {
    let g = grid();
    for (pn, pd) in [(0, 1), (1, 2), (1, 1), (3, 2), (2, 1)] {
        for q in 0..=2u32 {
            let p = pn as f64 / pd as f64;
            let v: Vec<f64> = g
                .iter()
                .map(|s| -2.5 * s.powf(p) * s.ln().powi(q as i32))
                .collect();
            let m = characteristic_number(&g, &v).unwrap();
            assert_eq!((m.p, m.q), (Some(r(pn, pd)), q), "p {p} q {q}");
        }
    }
}

#[test]
fn zero_series_is_degenerate() {
    let g = grid();
    assert_eq!(
        characteristic_number(&g, &vec![0.0; g.len()]),
        Err(Error::Degenerate)
    );
}

#[test]
fn bound_examples() {
    assert_eq!(
        bounds::bound_two_saddle(&CharacteristicSet::from_integers(1, 1, 1, 1).unwrap()),
        r(4, 1)
    );
    for p in 1..=3 {
        let p = r(p, 1);
        assert_eq!(
            bounds::bound_example_form(p, p, p, p),
            r(1, 1) + r(3, 1) * p
        );
    }
    assert_eq!(bounds::bound_roussarie(2, 2), 3);
    assert_eq!(bounds::bound_dumortier_roussarie(2), 4);
    assert_eq!(bounds::floor(r(7, 2)), 3);
}

#[test]
fn comparison_table_lists_integer_formulas_only_for_integers() {
    let rep = bounds::compare_bounds(r(3, 2), r(1, 1), r(1, 1), r(1, 2));
    assert!(rep.entries.iter().all(|e| e.name != "roussarie"));
    let rep = bounds::compare_bounds(r(2, 1), r(2, 1), r(1, 1), r(1, 1));
    assert_eq!(
        rep.entries
            .iter()
            .find(|e| e.name == "roussarie")
            .unwrap()
            .value,
        r(3, 1)
    );
}

proptest! {
    #[test]
    fn quarters_snap_to_themselves(n in 0i64..40, d in prop::sample::select(vec![1i64, 2, 3, 4])) {
        let p = Rational64::new(n, d);
        let x = n as f64 / d as f64;
        prop_assert_eq!(snap_exponent(x), Some(p));
    }

    #[test]
    fn noisy_powers_recover_their_exponent(
        k in 0usize..5,
        q in 0u32..3,
        c in 0.2f64..5.0,
        noise in prop::collection::vec(-0.01f64..0.01, 16),
    ) {
        let p = [0.0, 0.5, 1.0, 1.5, 2.0][k];
        let g = grid();
        let v: Vec<f64> = g.iter().zip(&noise).map(|(s, e)| c * s.powf(p) * s.ln().abs().powi(q as i32) * (1.0 + e)).collect();
        let m = characteristic_number(&g, &v).unwrap();
        prop_assert_eq!(m.p, Some(Rational64::new((2.0 * p) as i64, 2)));
        prop_assert_eq!(m.q, q);
    }

    #[test]
    fn two_saddle_bound_is_monotone(a in 0i64..6, b in 0i64..6, c in 0i64..6, d in 0i64..6) {
        let lo = bounds::bound_two_saddle(&CharacteristicSet::from_integers(a, b, c, d).unwrap());
        let hi = bounds::bound_two_saddle(&CharacteristicSet::from_integers(a + 1, b, c, d).unwrap());
        prop_assert!(hi > lo);
    }
}
