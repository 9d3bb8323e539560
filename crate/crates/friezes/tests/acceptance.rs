mod common;

use std::time::Instant;

use common::{load, short_arcs};
use friezes::bci::{bci_lattice, brute_force_bci, check_bijection, check_isomorphism, enumerate_bci, enumerate_tpaths, order_ideals, poset_q};
use friezes::expansion::*;
use friezes::frieze::*;
use friezes::laurent::LaurentPoly;
use friezes::surface::{ArcSpec, Side};
use num_bigint::BigInt;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn q(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn ints(g: &FriezeGrid<BigInt>, r: usize) -> Vec<i64> {
    g.row(r).iter().map(|v| i64::try_from(*v).unwrap()).collect()
}

fn rows_match(g: &FriezeGrid<BigInt>, expect: &[(usize, &[i64])]) -> Check {
    for &(r, row) in expect {
        let got = ints(g, r);
        ensure!(got[..row.len()] == *row, "row {r}: {got:?} != {row:?}");
    }
    Ok(())
}

fn poly(t: &friezes::surface::Triangulation, s: &str) -> LaurentPoly {
    LaurentPoly::parse_text(s, Some(t.vars())).unwrap()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn integer_regression() -> Check {
    let g = integer_frieze(&q(&[4, 1, 2, 3, 2]), 5, 0, 5).map_err(err)?;
    rows_match(&g, &[(3, &[3, 1, 5, 5, 7]), (4, &[2, 2, 8, 17, 5]), (5, &[3, 3, 27, 12, 3])])?;
    let g = integer_frieze(&q(&[2, 4, 1, 5, 1]), 6, 3, 8).map_err(err)?;
    rows_match(
        &g,
        &[
            (0, &[0; 8]),
            (1, &[1; 8]),
            (2, &[5, 1, 2, 4, 1, 5, 1, 2]),
            (3, &[4, 1, 7, 3, 4, 4, 1, 7]),
            (4, &[3, 3, 5, 11, 3, 3, 3, 5]),
            (5, &[8, 2, 18, 8, 2, 8, 2, 18]),
            (6, &[5, 7, 13, 5, 5, 5, 7, 13]),
        ],
    )?;
    let g = integer_frieze(&q(&[1, 2, 6]), 11, 0, 6).map_err(err)?;
    rows_match(
        &g,
        &[
            (0, &[0; 6]),
            (1, &[1; 6]),
            (2, &[1, 2, 6, 1, 2, 6]),
            (3, &[1, 11, 5, 1, 11, 5]),
            (4, &[5, 9, 4, 5, 9, 4]),
            (5, &[4, 7, 19, 4, 7, 19]),
            (6, &[3, 33, 15, 3, 33, 15]),
            (7, &[14, 26, 11, 14, 26, 11]),
            (8, &[11, 19, 51, 11, 19, 51]),
            (9, &[8, 88, 40, 8, 88, 40]),
            (10, &[37, 69, 29, 37, 69, 29]),
            (11, &[29, 50, 134, 29, 50, 134]),
        ],
    )
}

fn growth() -> Check {
    let g = integer_frieze(&q(&[1, 2, 6]), 1 + 8 * 3, 0, 12).map_err(err)?;
    let s = growth_coefficients(&g, 8, BigInt::from(2)).map_err(err)?;
    ensure!(s[1..4] == q(&[3, 7, 18])[..], "s_1..s_3 = {:?}", &s[1..4]);
    for k in 0..=3u32 {
        ensure!(chebyshev_apply(k, &s[1]) == s[k as usize], "T_{k}(3) = {}", chebyshev_apply(k, &s[1]));
    }
    for k in 0..=6 {
        ensure!(s[k + 2] == &s[1] * &s[k + 1] - &s[k], "recurrence fails at k={k}");
    }
    Ok(())
}

fn laurent_regression() -> Check {
    let t = load("d5.json");
    let opts = ExpandOptions::default();
    let x = laurent_of_lift(&t, 5, 14, opts).map_err(err)?;
    let num = poly(&t, "x0*x1*x4 + 2*x1*x3*x4 + 2*x0^2 + 4*x0*x3 + 2*x3^2");
    let expect = num.monomial_quotient(&poly(&t, "x0*x1*x4")).map_err(err)?;
    ensure!(x == expect, "X = {}", x.canonical_text());
    let c = t.crossing(5, 14).map_err(err)?;
    let g = TileGraph::snake(&t, &c.triangles, &c.diagonals).map_err(err)?;
    ensure!(g.perfect_matchings().len() == 11, "{} matchings", g.perfect_matchings().len());
    let cover = t.polygon_cover(5, 14).map_err(err)?;
    ensure!(enumerate_bci(&cover).len() == 11, "{} BCI tuples", enumerate_bci(&cover).len());
    ensure!(enumerate_tpaths(&cover).len() == 11, "{} T-paths", enumerate_tpaths(&cover).len());
    ensure!(x.specialize_all() == BigInt::from(11), "specializes to {}", x.specialize_all());
    Ok(())
}

fn bracelets() -> Check {
    let t = load("c31.json");
    let g = TileGraph::band(&t, 2).map_err(err)?;
    let good = g.perfect_matchings().into_iter().filter(|m| g.is_good(m)).count();
    ensure!(good == 14, "{good} good matchings");
    let b2 = laurent_of_bracelet(&t, 2, BraceletEngine::Band).map_err(err)?;
    let num = poly(
        &t,
        "x1^4*x3^2 + x2^4*x3^2 + 2*x0*x1^3*x3 + 2*x0*x1*x2^2*x3 + x0^2*x1^2 + 2*x1^2*x2*x3 + 2*x2^3*x3 + 2*x0*x1*x2 + x2^2",
    );
    ensure!(num.len() == 9, "numerator has {} terms", num.len());
    let expect = num.monomial_quotient(&poly(&t, "x1^2*x2^2*x3^2")).map_err(err)?;
    ensure!(b2 == expect, "Brac_2 = {}", b2.canonical_text());
    let cheb = laurent_of_bracelet(&t, 1, BraceletEngine::Band).map_err(err)?.chebyshev(2);
    ensure!(cheb == b2, "T_2(Brac_1) = {}", cheb.canonical_text());
    for name in ["d5.json", "d5_plain.json"] {
        let d = load(name);
        for k in 1..=5 {
            let v = laurent_of_bracelet(&d, k, BraceletEngine::Band).map_err(err)?;
            ensure!(v.as_constant() == Some(BigInt::from(2)), "{name} Brac_{k} = {}", v.canonical_text());
        }
    }
    Ok(())
}

fn pentagon() -> Check {
    let t = load("p5.json");
    let opts = ExpandOptions { engine: Engine::Both, keep_boundary: true };
    let x = laurent_of_lift(&t, 5, 8, opts).map_err(err)?;
    let at_one = x.specialize_ones(&t.boundary_labels());
    ensure!(at_one == poly(&t, "a*b^-1 + b^-1"), "x = {}", at_one.canonical_text());
    let n = t.n();
    let mut diagonals = 0;
    for i in 1..=n {
        for j in i + 2..=n {
            if j - i == n - 1 {
                continue;
            }
            let g = ArcSpec { i, j, k: 1 };
            let c = g.complement().ok_or("missing complement")?;
            let a = laurent_of_value(&t, g.value(n), opts).map_err(err)?;
            let b = laurent_of_value(&t, c.value(n), opts).map_err(err)?;
            ensure!(a == b, "glide symmetry fails for ({i},{j})");
            diagonals += 1;
        }
    }
    ensure!(diagonals == 5, "{diagonals} diagonals");
    Ok(())
}

fn identities() -> Check {
    let opts = ExpandOptions::default();
    for name in ["d5.json", "d5_plain.json", "c31.json"] {
        let t = load(name);
        let sides = if name == "c31.json" { vec![Side::Outer, Side::Inner] } else { vec![Side::Outer] };
        for side in sides {
            let period = match side {
                Side::Outer => t.n(),
                Side::Inner => t.reflected().map_err(err)?.n(),
            } as usize;
            let g = laurent_frieze(&t, side, 3 * period, 1, 2 * period + 2, opts).map_err(err)?;
            let r = verify_diamond(&g);
            ensure!(r.ok() && r.checked > 0, "{name} diamond: {:?}", r.failures);
        }
        let n = t.n();
        for i in 1..=n {
            for j in 1..=n {
                for k in 2..=4 {
                    for m in 1..k {
                        let r = verify_progression(&t, i, j, k, m, opts).map_err(err)?;
                        ensure!(r.ok(), "{name} progression: {:?}", r.failures);
                    }
                }
                let kmax = if name == "c31.json" { 3 } else { 4 };
                let c = complement_differences(&t, i, j, kmax, opts).map_err(err)?;
                ensure!(c.report.ok(), "{name} complement differences: {:?}", c.report.failures);
                if name != "c31.json" {
                    ensure!(c.c.iter().all(|x| *x == c.c[0]), "{name}: c_k != c_1 at ({i},{j})");
                    let r = verify_arithmetic(&t, i, j, 4, opts).map_err(err)?;
                    ensure!(r.ok(), "{name} arithmetic: {:?}", r.failures);
                }
            }
        }
    }
    let g = integer_frieze(&q(&[1, 4, 1, 2, 6]), 16, -1, 15).map_err(err)?;
    ensure!(diagonal_difference(&g, 0, 1) == Some(BigInt::from(3)), "dotted difference");
    ensure!(diagonal_difference(&g, 1, 4) == Some(BigInt::from(9)), "dashed difference");
    let r = verify_n_arithmetic(&g, 3);
    ensure!(r.ok() && r.checked >= 9, "n-arithmetic: {:?}", r.failures);
    let g = integer_frieze(&q(&[1, 2, 6]), 8, 0, 8).map_err(err)?;
    let at = |i, j| g.get(i, j).cloned().unwrap();
    ensure!(at(0, 4) == BigInt::from(5) && at(0, 4) == 3 * at(0, 1) + at(1, 3), "5 = 3*1 + 2");
    ensure!(at(4, 12) == BigInt::from(19) && at(4, 12) == 7 * at(4, 6) + at(6, 10), "19 = 7*2 + 5");
    Ok(())
}

fn bijection_and_lattice() -> Check {
    for name in ["d5.json", "d5_plain.json", "d5_folded_count.json", "c31.json", "p5.json", "p6_fan.json"] {
        let t = load(name);
        for (s, e) in short_arcs(&t, 8) {
            let cover = t.polygon_cover(s, e).map_err(err)?;
            check_bijection(&cover).map_err(|m| format!("{name} ({s},{e}): {m}"))?;
        }
    }
    let t = load("d5.json");
    let cover = t.polygon_cover(5, 14).map_err(err)?;
    let l = bci_lattice(&cover);
    ensure!(l.nodes.len() == 11, "{} lattice nodes", l.nodes.len());
    let mut arrows = poset_q(&cover);
    arrows.sort();
    ensure!(arrows == [(1, 2), (2, 3), (4, 3), (4, 5)], "arrows {arrows:?}");
    ensure!(order_ideals(cover.d(), &arrows).len() == 11, "order ideals");
    check_isomorphism(&cover, &l)?;
    for (h, &r) in l.heights.iter().zip(&l.ranks) {
        ensure!(h.monomial_degree() == Some(r as i64), "rank {r} vs height {}", h.canonical_text());
    }
    for e in &l.edges {
        let (a, b) = (l.heights[e.from].monomial_degree(), l.heights[e.to].monomial_degree());
        ensure!(b == a.map(|d| d + 1), "twist {} -> {} changes degree by more than one", e.from, e.to);
    }
    Ok(())
}

fn engines() -> Check {
    let mut arcs = 0;
    for name in ["d5.json", "d5_plain.json", "c31.json"] {
        let t = load(name);
        for (s, e) in short_arcs(&t, 8) {
            let a = laurent_of_lift(&t, s, e, ExpandOptions { engine: Engine::Matching, keep_boundary: true }).map_err(err)?;
            let b = laurent_of_lift(&t, s, e, ExpandOptions { engine: Engine::TPath, keep_boundary: true }).map_err(err)?;
            ensure!(a == b, "{name} ({s},{e}): {}", a.first_difference(&b).unwrap_or_default());
            arcs += 1;
        }
    }
    ensure!(arcs >= 60, "only {arcs} arcs");
    for name in ["d5.json", "d5_plain.json", "d5_folded_count.json", "c31.json", "p6_fan.json"] {
        let t = load(name);
        let sides = if name == "c31.json" { vec![Side::Outer, Side::Inner] } else { vec![Side::Outer] };
        for side in sides {
            let rows = if t.is_polygon() { t.n() as usize - 1 } else { 3 * t.n() as usize };
            let l = laurent_frieze(&t, side, rows, 1, 8, ExpandOptions::default()).map_err(err)?;
            let g = integer_frieze(&frieze_quiddity(&t, side).map_err(err)?, rows, 1, 8).map_err(err)?;
            ensure!(specialize_grid(&l).entries == g.entries, "{name}: specialized frieze differs");
        }
    }
    Ok(())
}

fn oracles() -> Check {
    let mut graphs = 0;
    let mut covers = 0;
    for name in ["d5.json", "d5_plain.json", "c31.json", "p5.json", "p6_fan.json"] {
        let t = load(name);
        for (s, e) in short_arcs(&t, 6) {
            let c = t.crossing(s, e).map_err(err)?;
            if c.edge.is_none() {
                let g = TileGraph::snake(&t, &c.triangles, &c.diagonals).map_err(err)?;
                let brute = g.brute_force_matchings();
                let sum = brute.iter().fold(LaurentPoly::zero(t.vars().clone()), |acc, m| &acc + &g.matching_weight(m, false));
                ensure!(sum == g.matching_sum(false), "{name} ({s},{e}): transfer sum differs");
                ensure!(brute.len() == g.perfect_matchings().len(), "{name} ({s},{e}): listing differs");
                graphs += 1;
            }
            let cover = t.polygon_cover(s, e).map_err(err)?;
            if cover.r() <= 4 {
                let mut a = enumerate_bci(&cover);
                let mut b = brute_force_bci(&cover);
                a.sort();
                b.sort();
                ensure!(a == b, "{name} ({s},{e}): BCI enumeration differs");
                covers += 1;
            }
        }
    }
    let t = load("c31.json");
    for k in 1..=2 {
        let g = TileGraph::band(&t, k).map_err(err)?;
        let brute = g.brute_force_matchings();
        ensure!(brute.len() == g.perfect_matchings().len(), "band graph k={k}: listing differs");
        graphs += 1;
    }
    ensure!(graphs > 20 && covers > 20, "{graphs} graphs, {covers} covers");
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("integer frieze regression", integer_regression),
        ("growth coefficients", growth),
        ("Laurent expansion regression", laurent_regression),
        ("bracelet regression", bracelets),
        ("pentagon case", pentagon),
        ("identity property suites", identities),
        ("bijection and lattice", bijection_and_lattice),
        ("engine cross-equivalence", engines),
        ("oracle equivalence", oracles),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("PASS {}: {name} ({secs:.2}s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {}: {name} ({secs:.2}s): {msg}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
