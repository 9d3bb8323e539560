mod common;

use common::load;
use friezes::expansion::{laurent_of_bracelet, BraceletEngine, ExpandOptions};
use friezes::frieze::*;
use friezes::surface::Side;
use num_bigint::BigInt;

fn q(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn ints(g: &FriezeGrid<BigInt>, r: usize) -> Vec<i64> {
    g.row(r).iter().map(|v| i64::try_from(*v).unwrap()).collect()
}

#[test]
fn punctured_pentagon_rows() {
    let g = integer_frieze(&q(&[2, 4, 1, 5, 1]), 6, 3, 8).unwrap();
    assert_eq!(ints(&g, 2), vec![5, 1, 2, 4, 1, 5, 1, 2]);
    assert_eq!(ints(&g, 3), vec![4, 1, 7, 3, 4, 4, 1, 7]);
    assert_eq!(ints(&g, 4), vec![3, 3, 5, 11, 3, 3, 3, 5]);
    assert_eq!(ints(&g, 5), vec![8, 2, 18, 8, 2, 8, 2, 18]);
    assert_eq!(ints(&g, 6), vec![5, 7, 13, 5, 5, 5, 7, 13]);
}

#[test]
fn annulus_rows() {
    let g = integer_frieze(&q(&[1, 2, 6]), 11, 0, 3).unwrap();
    let expect = [
        [1, 2, 6],
        [1, 11, 5],
        [5, 9, 4],
        [4, 7, 19],
        [3, 33, 15],
        [14, 26, 11],
        [11, 19, 51],
        [8, 88, 40],
        [37, 69, 29],
        [29, 50, 134],
    ];
    for (r, row) in expect.iter().enumerate() {
        assert_eq!(ints(&g, r + 2), row.to_vec(), "row {}", r + 2);
    }
    let g = integer_frieze(&q(&[1, 2, 6]), 1 + 6 * 3, 0, 12).unwrap();
    let s = growth_coefficients(&g, 6, BigInt::from(2)).unwrap();
    assert_eq!(&s[..4], &q(&[2, 3, 7, 18])[..]);
    for k in 0..=3 {
        assert_eq!(chebyshev_apply(k, &s[1]), s[k as usize]);
    }
    for k in 0..=4 {
        assert_eq!(&s[k + 2], &(&s[1] * &s[k + 1] - &s[k]));
    }
    // 5 = 3*1 + 2 and 19 = 7*2 + 5
    assert_eq!(g.get(0, 4).unwrap(), &(&s[1] * g.get(0, 1).unwrap() + g.get(1, 3).unwrap()));
    assert_eq!(g.get(2, 7).unwrap(), &BigInt::from(19));
}

#[test]
fn arithmetic_progressions() {
    let g = integer_frieze(&q(&[1, 4, 1, 2, 6]), 16, -1, 15).unwrap();
    assert_eq!(ints(&g, 2)[..5], [6, 1, 4, 1, 2]);
    assert_eq!(ints(&g, 3)[..5], [5, 3, 3, 1, 11]);
    assert_eq!(ints(&g, 4)[..5], [14, 2, 2, 5, 9]);
    assert_eq!(ints(&g, 5)[..5], [9, 1, 9, 4, 25]);
    // common differences 3 and 9 along two diagonals
    assert_eq!(diagonal_difference(&g, 0, 1), Some(BigInt::from(3)));
    assert_eq!(diagonal_difference(&g, 1, 4), Some(BigInt::from(9)));
    assert!(verify_n_arithmetic(&g, 3).ok());
}

#[test]
fn laurent_windows_obey_diamonds() {
    for name in ["d5_plain.json", "d5.json", "c31.json", "p6_fan.json"] {
        let t = load(name);
        let rows = if t.is_polygon() { t.n() as usize - 1 } else { 3 * t.n() as usize };
        let g = laurent_frieze(&t, Side::Outer, rows, 0, 8, ExpandOptions::default()).unwrap();
        let r = verify_diamond(&g);
        assert!(r.ok(), "{name}: {:?}", r.failures);
        let ints = integer_frieze(&frieze_quiddity(&t, Side::Outer).unwrap(), rows, 0, 8).unwrap();
        assert_eq!(specialize_grid(&g).entries, ints.entries, "{name}");
    }
}

#[test]
fn growth_matches_bracelets() {
    let t = load("c31.json");
    let opts = ExpandOptions::default();
    for side in [Side::Outer, Side::Inner] {
        let s = laurent_growth(&t, 2, side, opts).unwrap();
        for k in 1..=2 {
            assert_eq!(s[k], laurent_of_bracelet(&t, k as u32, BraceletEngine::Band).unwrap());
        }
    }
    let d = load("d5_plain.json");
    let s = laurent_growth(&d, 2, Side::Outer, opts).unwrap();
    assert!(s.iter().all(|x| x.as_constant() == Some(BigInt::from(2))));
}

#[test]
fn identity_suites() {
    let opts = ExpandOptions::default();
    for name in ["d5_plain.json", "d5.json", "c31.json"] {
        let t = load(name);
        let n = t.n();
        for i in 1..=n {
            for j in 1..=n {
                for k in 2..=4 {
                    for m in 1..k {
                        let r = verify_progression(&t, i, j, k, m, opts).unwrap();
                        assert!(r.ok(), "{name} {:?}", r.failures);
                    }
                }
                let c = complement_differences(&t, i, j, 3, opts).unwrap();
                assert!(c.report.ok(), "{name} {:?}", c.report.failures);
                if name.starts_with("d5") {
                    assert!(c.c.iter().all(|x| *x == c.c[0]));
                    assert!(verify_arithmetic(&t, i, j, 4, opts).unwrap().ok());
                }
            }
        }
    }
}
