mod common;

use common::load;
use friezes::surface::{ArcKind, Side, SurfaceError};

#[test]
fn folded_quiddity_counts_twice() {
    assert_eq!(load("d5_folded_count.json").quiddity(), vec![6, 2, 1, 4, 1]);
    assert_eq!(load("d5_plain.json").quiddity(), vec![5, 1, 2, 4, 1]);
}

#[test]
fn quiddity_sums_to_three_triangles() {
    for name in ["p5.json", "p6_fan.json"] {
        let t = load(name);
        let total: u64 = t.quiddity().iter().sum();
        assert_eq!(total as usize, 3 * t.triangles().len(), "{name}");
    }
    assert_eq!(load("c31.json").quiddity_on(Side::Inner).unwrap().len(), 1);
}

#[test]
fn folded_adjacency_matrix() {
    let b = load("d5.json").signed_adjacency();
    let expect = vec![
        vec![0, 1, 0, -1, 1],
        vec![-1, 0, 0, 1, 0],
        vec![0, 0, 0, -1, 0],
        vec![1, -1, 1, 0, -1],
        vec![-1, 0, 0, 1, 0],
    ];
    assert_eq!(b, expect);
}

#[test]
fn adjacency_is_skew() {
    for name in ["d5_plain.json", "d5.json", "d5_folded_count.json", "c31.json", "p5.json", "p6_fan.json"] {
        let b = load(name).signed_adjacency();
        for i in 0..b.len() {
            for j in 0..b.len() {
                assert_eq!(b[i][j], -b[j][i], "{name}");
                assert!(b[i][j].abs() <= 2);
            }
        }
    }
    let b = load("p5.json").signed_adjacency();
    assert_eq!(b[0][1].abs(), 1);
}

#[test]
fn hexagon_flip() {
    let t = load("p6_fan.json");
    let f = t.flip("f4").unwrap();
    let def = f.arcs().iter().find(|a| a.label == "f4").unwrap();
    assert!(matches!(def.kind, ArcKind::Peripheral { from: 3, to: 5, .. }));
    assert_eq!(f.flip("f4").unwrap().to_json(), t.to_json());
}

#[test]
fn flips_are_involutions() {
    for name in ["d5_plain.json", "c31.json", "p6_fan.json", "p5.json"] {
        let t = load(name);
        for a in t.arcs() {
            if let Ok(f) = t.flip(&a.label) {
                assert_eq!(f.arcs().len(), t.arcs().len());
                if f.triangles().iter().any(|x| f.is_self_folded(x)) {
                    assert!(f.flip(&a.label).is_err());
                    continue;
                }
                assert_eq!(f.flip(&a.label).unwrap().to_json(), t.to_json(), "{name} {}", a.label);
            }
        }
    }
    let t = load("d5_plain.json");
    assert!(matches!(t.flip("b1"), Err(SurfaceError::Flip { .. } | SurfaceError::UnknownLabel(_))));
    let w = load("d5.json");
    assert!(w.flip("x4").is_err() && w.flip("x1").is_err());
}

#[test]
fn triangle_counts() {
    let d = load("d5_plain.json");
    assert_eq!(d.triangles().len(), 5);
    assert!(d.triangles().iter().all(|t| !d.is_self_folded(t)));
    assert_eq!(load("c31.json").triangles().len(), 4);
    let w = load("d5.json");
    assert_eq!(w.triangles().iter().filter(|t| w.is_self_folded(t)).count(), 1);
}
