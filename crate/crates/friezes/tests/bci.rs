mod common;

use std::collections::BTreeSet;

use common::{load, short_arcs};
use friezes::bci::*;
use friezes::surface::Vertex;

#[test]
fn worked_cover_shape() {
    let t = load("d5.json");
    let c = t.polygon_cover(5, 14).unwrap();
    assert_eq!(c.right, vec![Vertex::Low(6), Vertex::Low(11)]);
    assert_eq!(c.fans, vec![(0, 3), (3, 5)]);
    assert_eq!(c.unreduced_right.len(), 8);
    assert_eq!(c.forced.len(), 6);
    assert!(c.left.contains(&Vertex::Puncture));
    assert_eq!(c.left[0], Vertex::Low(4));
}

#[test]
fn worked_tuples_and_paths() {
    let t = load("d5.json");
    let c = t.polygon_cover(5, 14).unwrap();
    let tuples = enumerate_bci(&c);
    assert_eq!(tuples.len(), 11);
    let paths = enumerate_tpaths(&c);
    assert_eq!(paths.len(), 11);
    let trails: BTreeSet<TPath> = tuples.iter().map(|b| trail(&c, b).unwrap()).collect();
    let all: BTreeSet<TPath> = paths.into_iter().collect();
    assert_eq!(trails, all);
    let tr = trail(&c, &[0, 3]).unwrap();
    assert_eq!(tr.labels(&c), ["b4", "x0", "x1", "x1", "x3"]);
}

#[test]
fn round_trips_on_short_arcs() {
    for name in ["d5.json", "d5_plain.json", "c31.json", "p6_fan.json", "p5.json"] {
        let t = load(name);
        for (s, e) in short_arcs(&t, 8) {
            let c = t.polygon_cover(s, e).unwrap();
            let tuples = enumerate_bci(&c);
            for b in &tuples {
                let p = trail(&c, b).unwrap();
                assert!(validate_tpath(&c, &p).ok(), "{name} ({s},{e}) {b:?} {:?}", p.labels(&c));
                assert_eq!(&triangles_of(&c, &p).unwrap(), b, "{name} ({s},{e})");
            }
            let paths = enumerate_tpaths(&c);
            assert_eq!(paths.len(), tuples.len(), "{name} ({s},{e})");
            for p in &paths {
                let b = triangles_of(&c, p).unwrap();
                assert_eq!(&trail(&c, &b).unwrap(), p);
            }
        }
    }
}
