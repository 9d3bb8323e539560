#![allow(dead_code)]

use std::path::PathBuf;

use friezes::surface::Triangulation;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn load(name: &str) -> Triangulation {
    let text = std::fs::read_to_string(data(name)).unwrap();
    Triangulation::from_json(&text).unwrap()
}

/// Lower lifts `(s, t)` with `s` in the first period and at most `max` crossings.
pub fn short_arcs(t: &Triangulation, max: usize) -> Vec<(i64, i64)> {
    let n = t.n();
    let mut out = vec![];
    for s in 1..=n {
        for len in 2..=(4 * n) {
            if t.is_polygon() && len >= n {
                break;
            }
            let c = t.crossing(s, s + len).unwrap();
            if c.diagonals.len() <= max {
                out.push((s, s + len));
            }
        }
    }
    out
}
