//! Snake and band graphs, perfect matchings, and cluster expansions.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::bci;
use crate::laurent::LaurentPoly;
use crate::surface::{ArcValue, Surface, SurfaceError, Tri, Triangulation, Vertex, Weights};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpansionError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error("graph construction failed: {0}")]
    Graph(String),
    #[error("engines disagree: {0}")]
    Disagree(String),
    #[error("{0}")]
    Bci(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Engine {
    #[default]
    Matching,
    TPath,
    Both,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BraceletEngine {
    #[default]
    Band,
    Chebyshev,
    Both,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ExpandOptions {
    pub engine: Engine,
    pub keep_boundary: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphVertex {
    pub at: (i64, i64),
    pub strip: Vertex,
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphEdge {
    pub a: usize,
    pub b: usize,
    pub var: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tile {
    pub at: (i64, i64),
    /// Variable index of the crossed arc.
    pub diagonal: usize,
    /// Corners SW, SE, NE, NW.
    pub corners: [usize; 4],
    /// Side edges S, E, N, W.
    pub sides: [usize; 4],
}

/// A planar snake graph, or a band graph after gluing its ends.
#[derive(Clone, Debug, Serialize)]
pub struct TileGraph {
    pub vertices: Vec<GraphVertex>,
    pub edges: Vec<GraphEdge>,
    pub tiles: Vec<Tile>,
    #[serde(skip)]
    pub vars: Arc<Vec<String>>,
    #[serde(skip)]
    pub weights: Weights,
    pub band: bool,
}

fn seg_eq(a: (Vertex, Vertex), b: (Vertex, Vertex)) -> bool {
    (a.0 == b.0 && a.1 == b.1) || (a.0 == b.1 && a.1 == b.0)
}

fn rotate_to(t: &Tri, v: Vertex) -> Tri {
    let k = t.iter().position(|&x| x == v).unwrap();
    [t[k], t[(k + 1) % 3], t[(k + 2) % 3]]
}

fn third_side(t: &Tri, e: (Vertex, Vertex), f: (Vertex, Vertex)) -> Option<(Vertex, Vertex)> {
    (0..3)
        .map(|k| (t[k], t[(k + 1) % 3]))
        .find(|&s| !seg_eq(s, e) && !seg_eq(s, f))
}

impl TileGraph {
    /// Snake graph of crossed triangles `Δ_0..Δ_d` and arcs `e_1..e_d`.
    pub fn snake(tri: &Triangulation, triangles: &[Tri], diagonals: &[(Vertex, Vertex)]) -> Result<Self, ExpansionError> {
        let d = diagonals.len();
        if triangles.len() != d + 1 {
            return Err(ExpansionError::Graph("need one more triangle than crossings".into()));
        }
        let mut g = TileGraph {
            vertices: vec![],
            edges: vec![],
            tiles: vec![],
            vars: tri.vars().clone(),
            weights: tri.weights(),
            band: false,
        };
        let mut vmap: HashMap<(i64, i64), usize> = HashMap::new();
        let mut emap: HashMap<((i64, i64), (i64, i64)), usize> = HashMap::new();
        let id = |x: Vertex, y: Vertex| {
            tri.edge_id(x, y)
                .ok_or_else(|| ExpansionError::Graph(format!("{}-{} is not an edge", x.name(), y.name())))
        };
        let mut pos = (0i64, 0i64);
        for j in 1..=d {
            let (p, q) = diagonals[j - 1];
            let prev = &triangles[j - 1];
            let next = &triangles[j];
            let c = *prev.iter().find(|&&v| v != p && v != q).ok_or_else(|| ExpansionError::Graph("degenerate tile".into()))?;
            let dd = *next.iter().find(|&&v| v != p && v != q).ok_or_else(|| ExpansionError::Graph("degenerate tile".into()))?;
            let rc = rotate_to(prev, c);
            let (x, y) = (rc[1], rc[2]);
            let (se, nw) = if j % 2 == 1 { (x, y) } else { (y, x) };
            let strip = [c, se, dd, nw];
            let pts = [pos, (pos.0 + 1, pos.1), (pos.0 + 1, pos.1 + 1), (pos.0, pos.1 + 1)];
            let mut corners = [0usize; 4];
            for k in 0..4 {
                corners[k] = match vmap.get(&pts[k]) {
                    Some(&v) => {
                        if g.vertices[v].strip != strip[k] {
                            return Err(ExpansionError::Graph(format!("tile {j} does not glue")));
                        }
                        v
                    }
                    None => {
                        g.vertices.push(GraphVertex { at: pts[k], strip: strip[k] });
                        vmap.insert(pts[k], g.vertices.len() - 1);
                        g.vertices.len() - 1
                    }
                };
            }
            let mut sides = [0usize; 4];
            for k in 0..4 {
                let (a, b) = (k, (k + 1) % 4);
                let var = id(strip[a], strip[b])?;
                let key = if pts[a] < pts[b] { (pts[a], pts[b]) } else { (pts[b], pts[a]) };
                sides[k] = match emap.get(&key) {
                    Some(&e) => {
                        if g.edges[e].var != var {
                            return Err(ExpansionError::Graph(format!("tile {j} edge labels disagree")));
                        }
                        e
                    }
                    None => {
                        g.edges.push(GraphEdge { a: corners[a], b: corners[b], var });
                        emap.insert(key, g.edges.len() - 1);
                        g.edges.len() - 1
                    }
                };
            }
            g.tiles.push(Tile { at: pos, diagonal: id(p, q)?, corners, sides });
            if j < d {
                let third = third_side(next, (p, q), diagonals[j])
                    .ok_or_else(|| ExpansionError::Graph("triangle has no free side".into()))?;
                if seg_eq(third, (strip[2], strip[3])) {
                    pos = (pos.0, pos.1 + 1);
                } else if seg_eq(third, (strip[1], strip[2])) {
                    pos = (pos.0 + 1, pos.1);
                } else {
                    return Err(ExpansionError::Graph(format!("tile {} has no gluing side", j + 1)));
                }
            }
        }
        Ok(g)
    }

    /// Band graph of the k-bracelet of an annulus.
    pub fn band(tri: &Triangulation, k: u32) -> Result<Self, ExpansionError> {
        let bc = tri.bracelet_crossing(k)?;
        let mut g = Self::snake(tri, &bc.triangles, &bc.diagonals)?;
        let d = bc.diagonals.len();
        let b0 = (tri.shift(bc.diagonals[bc.period - 1].0, -1), tri.shift(bc.diagonals[bc.period - 1].1, -1));
        let third0 = third_side(&bc.triangles[0], b0, bc.diagonals[0])
            .ok_or_else(|| ExpansionError::Graph("first triangle has no free side".into()))?;
        let k = k as i64;
        let third_d = (tri.shift(third0.0, k), tri.shift(third0.1, k));
        let seg = |g: &TileGraph, e: usize| (g.vertices[g.edges[e].a].strip, g.vertices[g.edges[e].b].strip);
        let first = g.tiles[0].clone();
        let last = g.tiles[d - 1].clone();
        let e1 = [first.sides[0], first.sides[3]]
            .into_iter()
            .find(|&e| seg_eq(seg(&g, e), third0))
            .ok_or_else(|| ExpansionError::Graph("first tile has no gluing side".into()))?;
        let e2 = [last.sides[1], last.sides[2]]
            .into_iter()
            .find(|&e| seg_eq(seg(&g, e), third_d))
            .ok_or_else(|| ExpansionError::Graph("last tile has no gluing side".into()))?;
        let (a1, b1) = (g.edges[e1].a, g.edges[e1].b);
        let (a2, b2) = (g.edges[e2].a, g.edges[e2].b);
        let img = |v: usize| tri.shift(g.vertices[v].strip, k);
        let pairs = if img(a1) == g.vertices[a2].strip && img(b1) == g.vertices[b2].strip {
            [(a1, a2), (b1, b2)]
        } else if img(a1) == g.vertices[b2].strip && img(b1) == g.vertices[a2].strip {
            [(a1, b2), (b1, a2)]
        } else {
            return Err(ExpansionError::Graph("gluing sides do not match".into()));
        };
        // merge vertices of the last tile into those of the first
        let mut remap: Vec<usize> = (0..g.vertices.len()).collect();
        for (keep, drop) in pairs {
            remap[drop] = keep;
        }
        let mut new_index = vec![usize::MAX; g.vertices.len()];
        let mut verts = vec![];
        for v in 0..g.vertices.len() {
            if remap[v] == v {
                new_index[v] = verts.len();
                verts.push(g.vertices[v].clone());
            }
        }
        for v in 0..g.vertices.len() {
            new_index[v] = new_index[remap[v]];
        }
        let mut edge_index = vec![usize::MAX; g.edges.len()];
        let mut edges = vec![];
        for (i, e) in g.edges.iter().enumerate() {
            if i == e2 {
                continue;
            }
            edge_index[i] = edges.len();
            edges.push(GraphEdge { a: new_index[e.a], b: new_index[e.b], var: e.var });
        }
        edge_index[e2] = edge_index[e1];
        for t in g.tiles.iter_mut() {
            for c in t.corners.iter_mut() {
                *c = new_index[*c];
            }
            for s in t.sides.iter_mut() {
                *s = edge_index[*s];
            }
        }
        g.vertices = verts;
        g.edges = edges;
        g.band = true;
        Ok(g)
    }

    pub fn edge_poly(&self, e: usize, keep_boundary: bool) -> LaurentPoly {
        self.weights.poly(self.edges[e].var, keep_boundary)
    }

    pub fn crossing_monomial(&self) -> LaurentPoly {
        let mut m = LaurentPoly::one(self.vars.clone());
        for t in &self.tiles {
            m = &m * &self.weights.poly(t.diagonal, true);
        }
        m
    }

    pub fn matching_weight(&self, matching: &[usize], keep_boundary: bool) -> LaurentPoly {
        let mut w = LaurentPoly::one(self.vars.clone());
        for &e in matching {
            w = &w * &self.edge_poly(e, keep_boundary);
        }
        w
    }

    /// A band matching is good when some tile uses two of its sides.
    pub fn is_good(&self, matching: &[usize]) -> bool {
        self.tiles.iter().any(|t| t.sides.iter().filter(|s| matching.contains(s)).count() >= 2)
    }

    fn last_use(&self) -> Vec<Option<usize>> {
        let mut last = vec![None; self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            last[e.a] = Some(i);
            last[e.b] = Some(i);
        }
        last
    }

    /// All perfect matchings as sorted edge-index lists.
    pub fn perfect_matchings(&self) -> Vec<Vec<usize>> {
        let last = self.last_use();
        if last.iter().any(|l| l.is_none()) {
            return vec![];
        }
        let mut dies: Vec<Vec<usize>> = vec![vec![]; self.edges.len()];
        for (v, l) in last.iter().enumerate() {
            dies[l.unwrap()].push(v);
        }
        let mut out = vec![];
        let mut matched = vec![false; self.vertices.len()];
        let mut chosen = vec![];
        self.dfs(0, &dies, &mut matched, &mut chosen, &mut out);
        out
    }

    fn dfs(&self, i: usize, dies: &[Vec<usize>], matched: &mut Vec<bool>, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == self.edges.len() {
            out.push(chosen.clone());
            return;
        }
        let e = &self.edges[i];
        if !matched[e.a] && !matched[e.b] && e.a != e.b {
            matched[e.a] = true;
            matched[e.b] = true;
            chosen.push(i);
            if dies[i].iter().all(|&v| matched[v]) {
                self.dfs(i + 1, dies, matched, chosen, out);
            }
            chosen.pop();
            matched[e.a] = false;
            matched[e.b] = false;
        }
        if dies[i].iter().all(|&v| matched[v]) {
            self.dfs(i + 1, dies, matched, chosen, out);
        }
    }

    /// Sum of matching weights by transfer over the edge order.
    pub fn matching_sum(&self, keep_boundary: bool) -> LaurentPoly {
        let last = self.last_use();
        if last.iter().any(|l| l.is_none()) {
            return LaurentPoly::zero(self.vars.clone());
        }
        let last: Vec<usize> = last.into_iter().map(|l| l.unwrap()).collect();
        let weights: Vec<LaurentPoly> = (0..self.edges.len()).map(|e| self.edge_poly(e, keep_boundary)).collect();
        let mut memo: HashMap<(usize, Vec<usize>), LaurentPoly> = HashMap::new();
        self.transfer(0, vec![], &last, &weights, &mut memo)
    }

    fn transfer(
        &self,
        i: usize,
        state: Vec<usize>,
        last: &[usize],
        weights: &[LaurentPoly],
        memo: &mut HashMap<(usize, Vec<usize>), LaurentPoly>,
    ) -> LaurentPoly {
        if i == self.edges.len() {
            return LaurentPoly::one(self.vars.clone());
        }
        if let Some(v) = memo.get(&(i, state.clone())) {
            return v.clone();
        }
        let dead_ok = |st: &[usize]| (0..self.vertices.len()).filter(|&v| last[v] == i).all(|v| st.contains(&v));
        let trim = |st: Vec<usize>| -> Vec<usize> { st.into_iter().filter(|&v| last[v] > i).collect() };
        let mut total = LaurentPoly::zero(self.vars.clone());
        let e = &self.edges[i];
        if e.a != e.b && !state.contains(&e.a) && !state.contains(&e.b) {
            let mut st = state.clone();
            st.push(e.a);
            st.push(e.b);
            st.sort_unstable();
            if dead_ok(&st) {
                let rest = self.transfer(i + 1, trim(st), last, weights, memo);
                total = &total + &(&rest * &weights[i]);
            }
        }
        if dead_ok(&state) {
            let rest = self.transfer(i + 1, trim(state.clone()), last, weights, memo);
            total = &total + &rest;
        }
        memo.insert((i, state), total.clone());
        total
    }

    /// Perfect matchings by testing every edge subset of the right size.
    pub fn brute_force_matchings(&self) -> Vec<Vec<usize>> {
        let v = self.vertices.len();
        let e = self.edges.len();
        assert!(e <= 24, "brute force is for small graphs");
        let mut out = vec![];
        if v % 2 == 1 {
            return out;
        }
        for mask in 0u32..(1u32 << e) {
            if mask.count_ones() as usize != v / 2 {
                continue;
            }
            let mut seen = vec![false; v];
            let mut ok = true;
            for i in 0..e {
                if mask >> i & 1 == 1 {
                    let ed = &self.edges[i];
                    if seen[ed.a] || seen[ed.b] {
                        ok = false;
                        break;
                    }
                    seen[ed.a] = true;
                    seen[ed.b] = true;
                }
            }
            if ok {
                out.push((0..e).filter(|i| mask >> i & 1 == 1).collect());
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let label = |v: usize| self.vars[v].clone();
        serde_json::json!({
            "band": self.band,
            "tiles": self.tiles.iter().enumerate().map(|(i, t)| serde_json::json!({
                "tile": i + 1,
                "at": [t.at.0, t.at.1],
                "diagonal": label(t.diagonal),
                "S": label(self.edges[t.sides[0]].var),
                "E": label(self.edges[t.sides[1]].var),
                "N": label(self.edges[t.sides[2]].var),
                "W": label(self.edges[t.sides[3]].var),
            })).collect::<Vec<_>>(),
            "vertices": self.vertices.iter().map(|v| serde_json::json!({
                "at": [v.at.0, v.at.1], "strip": v.strip.name()
            })).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| serde_json::json!({
                "a": e.a, "b": e.b, "label": label(e.var)
            })).collect::<Vec<_>>(),
        })
    }
}

fn variable(tri: &Triangulation, id: usize, keep_boundary: bool) -> LaurentPoly {
    tri.weights().poly(id, keep_boundary)
}

/// Expansion of the lower strip segment from `s` to `t`.
pub fn laurent_of_lift(tri: &Triangulation, s: i64, t: i64, opts: ExpandOptions) -> Result<LaurentPoly, ExpansionError> {
    if s == t {
        return Ok(LaurentPoly::zero(tri.vars().clone()));
    }
    if tri.is_polygon() && t - s == tri.n() {
        return Ok(LaurentPoly::zero(tri.vars().clone()));
    }
    let c = tri.crossing(s, t)?;
    if let Some(id) = c.edge {
        return Ok(variable(tri, id, opts.keep_boundary));
    }
    let by_matching = || -> Result<LaurentPoly, ExpansionError> {
        let g = TileGraph::snake(tri, &c.triangles, &c.diagonals)?;
        g.matching_sum(opts.keep_boundary).monomial_quotient(&g.crossing_monomial()).map_err(|e| ExpansionError::Graph(e.to_string()))
    };
    let by_tpath = || -> Result<LaurentPoly, ExpansionError> {
        let cover = tri.polygon_cover(s, t)?;
        bci::expand_via_bci(&cover, opts.keep_boundary).map_err(|e| ExpansionError::Bci(e.to_string()))
    };
    match opts.engine {
        Engine::Matching => by_matching(),
        Engine::TPath => by_tpath(),
        Engine::Both => {
            let a = by_matching()?;
            let b = by_tpath()?;
            if a != b {
                return Err(ExpansionError::Disagree(format!(
                    "matching gives {}, T-paths give {}",
                    a.canonical_text(),
                    b.canonical_text()
                )));
            }
            Ok(a)
        }
    }
}

/// Expansion of an arc-level value, including the formal tokens.
pub fn laurent_of_value(tri: &Triangulation, v: ArcValue, opts: ExpandOptions) -> Result<LaurentPoly, ExpansionError> {
    match v {
        ArcValue::Zero => Ok(LaurentPoly::zero(tri.vars().clone())),
        ArcValue::Lift(s, t) => laurent_of_lift(tri, s, t, opts),
        ArcValue::Negated(s, t) => Ok(-laurent_of_lift(tri, s, t, opts)?),
    }
}

/// Expansion of the k-bracelet around the puncture or inner boundary.
pub fn laurent_of_bracelet(tri: &Triangulation, k: u32, engine: BraceletEngine) -> Result<LaurentPoly, ExpansionError> {
    let vars = tri.vars().clone();
    match tri.surface() {
        Surface::Polygon { .. } => {
            return Err(ExpansionError::Surface(SurfaceError::Unsupported("a polygon has no bracelets".into())))
        }
        Surface::PuncturedDisk { .. } => {
            return Ok(LaurentPoly::constant(vars, 2));
        }
        Surface::Annulus { .. } => {}
    }
    if k == 0 {
        return Ok(LaurentPoly::constant(vars, 2));
    }
    let band = |k: u32| -> Result<LaurentPoly, ExpansionError> {
        let g = TileGraph::band(tri, k)?;
        let mut sum = LaurentPoly::zero(vars.clone());
        for m in g.perfect_matchings() {
            if g.is_good(&m) {
                sum = &sum + &g.matching_weight(&m, false);
            }
        }
        sum.monomial_quotient(&g.crossing_monomial()).map_err(|e| ExpansionError::Graph(e.to_string()))
    };
    match engine {
        BraceletEngine::Band => band(k),
        BraceletEngine::Chebyshev => Ok(band(1)?.chebyshev(k)),
        BraceletEngine::Both => {
            let a = band(k)?;
            let b = band(1)?.chebyshev(k);
            if a != b {
                return Err(ExpansionError::Disagree(format!(
                    "band graph gives {}, Chebyshev gives {}",
                    a.canonical_text(),
                    b.canonical_text()
                )));
            }
            Ok(a)
        }
    }
}

/// Integer value with every variable set to 1.
pub fn specialized(p: &LaurentPoly) -> BigInt {
    p.specialize_all()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{ArcDef, ArcKind, Side};

    fn per(f: i64, t: i64) -> ArcKind {
        ArcKind::Peripheral { from: f, to: t, side: Side::Outer }
    }

    fn d5_folded() -> Triangulation {
        let a = |l: &str, k| ArcDef { label: l.into(), kind: k };
        Triangulation::new(
            Surface::PuncturedDisk { n: 5 },
            vec![
                a("x0", per(4, 6)),
                a("x1", ArcKind::Radius { at: 1 }),
                a("x2", per(1, 3)),
                a("x3", per(1, 4)),
                a("x4", ArcKind::EllLoop { at: 1, radius: "x1".into() }),
            ],
        )
        .unwrap()
    }

    fn c31() -> Triangulation {
        let a = |l: &str, k| ArcDef { label: l.into(), kind: k };
        Triangulation::new(
            Surface::Annulus { n: 3, m: 1 },
            vec![
                a("x0", per(1, 3)),
                a("x1", ArcKind::Bridge { outer: 1, inner: 1 }),
                a("x2", ArcKind::Bridge { outer: 1, inner: 2 }),
                a("x3", ArcKind::Bridge { outer: 3, inner: 2 }),
            ],
        )
        .unwrap()
    }

    #[test]
    fn worked_snake_tiles() {
        let t = d5_folded();
        let c = t.crossing(5, 14).unwrap();
        let g = TileGraph::snake(&t, &c.triangles, &c.diagonals).unwrap();
        let side = |i: usize, k: usize| t.label(g.edges[g.tiles[i].sides[k]].var).to_string();
        assert_eq!([side(0, 0), side(0, 1), side(0, 2), side(0, 3)], ["b5", "x4", "x3", "b4"]);
        assert_eq!([side(1, 0), side(1, 1), side(1, 2), side(1, 3)], ["x3", "x1", "x1", "x0"]);
        assert_eq!(g.tiles[1].at, (0, 1));
        assert_eq!(g.tiles[2].at, (1, 1));
    }

    #[test]
    fn worked_expansion() {
        let t = d5_folded();
        let x = laurent_of_lift(&t, 5, 14, ExpandOptions::default()).unwrap();
        let num = LaurentPoly::parse_text("x0*x1*x4 + 2*x1*x3*x4 + 2*x0^2 + 4*x0*x3 + 2*x3^2", Some(t.vars())).unwrap();
        let den = LaurentPoly::parse_text("x0*x1*x4", Some(t.vars())).unwrap();
        assert_eq!(x, num.monomial_quotient(&den).unwrap());
    }

    #[test]
    fn transfer_matches_listing_and_brute_force() {
        let t = d5_folded();
        let c = t.crossing(5, 14).unwrap();
        let g = TileGraph::snake(&t, &c.triangles, &c.diagonals).unwrap();
        let listed = g.perfect_matchings();
        let mut brute = g.brute_force_matchings();
        brute.sort();
        let mut l2 = listed.clone();
        l2.sort();
        assert_eq!(l2, brute);
        assert_eq!(listed.len(), 11);
        let mut sum = LaurentPoly::zero(t.vars().clone());
        for m in &listed {
            sum = &sum + &g.matching_weight(m, true);
        }
        assert_eq!(sum, g.matching_sum(true));
    }

    #[test]
    fn annulus_bracelets() {
        let t = c31();
        let b1 = laurent_of_bracelet(&t, 1, BraceletEngine::Band).unwrap();
        assert_eq!(b1.specialize_all(), BigInt::from(4));
        let b2 = laurent_of_bracelet(&t, 2, BraceletEngine::Both).unwrap();
        let num = LaurentPoly::parse_text(
            "x1^4*x3^2 + x2^4*x3^2 + 2*x0*x1^3*x3 + 2*x0*x1*x2^2*x3 + x0^2*x1^2 + 2*x1^2*x2*x3 + 2*x2^3*x3 + 2*x0*x1*x2 + x2^2",
            Some(t.vars()),
        )
        .unwrap();
        let den = LaurentPoly::parse_text("x1^2*x2^2*x3^2", Some(t.vars())).unwrap();
        assert_eq!(b2, num.monomial_quotient(&den).unwrap());
    }

    #[test]
    fn disk_bracelet_is_two() {
        let t = d5_folded();
        assert_eq!(laurent_of_bracelet(&t, 3, BraceletEngine::Band).unwrap().as_constant(), Some(BigInt::from(2)));
    }
}
