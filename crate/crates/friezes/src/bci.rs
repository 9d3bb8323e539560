//! BCI tuples, trails, reduced T-paths and the BCI lattice of a cover.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::laurent::LaurentPoly;
use crate::surface::{Cover, Tri, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BciError {
    #[error("not a reduced T-path: {0}")]
    NotTPath(String),
    #[error("path does not separate the cover consistently: {0}")]
    Inconsistent(String),
    #[error("invalid BCI tuple: {0}")]
    BadTuple(String),
}

/// Entry `i` is the index (into `Δ_0..Δ_d`) of the triangle matched to `R_{i+1}`.
pub type Bci = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TPath {
    pub vertices: Vec<Vertex>,
}

impl TPath {
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn steps(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn reversed(&self) -> TPath {
        let mut v = self.vertices.clone();
        v.reverse();
        TPath { vertices: v }
    }

    pub fn labels(&self, cover: &Cover) -> Vec<String> {
        self.steps()
            .map(|(a, b)| cover.edge_between(a, b).map_or("?".to_string(), |id| cover.label(id).to_string()))
            .collect()
    }
}

pub fn is_valid_bci(cover: &Cover, b: &[usize]) -> bool {
    if b.len() != cover.r() {
        return false;
    }
    let distinct: BTreeSet<usize> = b.iter().copied().collect();
    distinct.len() == b.len() && b.iter().zip(&cover.fans).all(|(&t, &(lo, hi))| lo <= t && t <= hi)
}

/// All BCI tuples in lexicographic order.
pub fn enumerate_bci(cover: &Cover) -> Vec<Bci> {
    let mut out = vec![];
    let mut cur = vec![];
    fn go(cover: &Cover, i: usize, cur: &mut Vec<usize>, out: &mut Vec<Bci>) {
        if i == cover.r() {
            out.push(cur.clone());
            return;
        }
        let (lo, hi) = cover.fans[i];
        for t in lo..=hi {
            if cur.contains(&t) {
                continue;
            }
            cur.push(t);
            go(cover, i + 1, cur, out);
            cur.pop();
        }
    }
    go(cover, 0, &mut cur, &mut out);
    out
}

/// BCI tuples by checking every assignment of crossed triangles.
pub fn brute_force_bci(cover: &Cover) -> Vec<Bci> {
    let r = cover.r();
    let nt = cover.triangles.len();
    let mut out = vec![];
    let total = nt.pow(r as u32);
    for code in 0..total {
        let mut c = code;
        let mut b = vec![];
        for _ in 0..r {
            b.push(c % nt);
            c /= nt;
        }
        b.reverse();
        let incident = b.iter().enumerate().all(|(i, &t)| cover.triangles[t].contains(&cover.right[i]));
        let distinct = b.iter().collect::<BTreeSet<_>>().len() == r;
        if incident && distinct {
            out.push(b);
        }
    }
    out
}

/// BCI tuples of the unreduced cover, with uncrossed triangles below the arc.
pub fn brute_force_unreduced(cover: &Cover) -> Vec<Vec<Tri>> {
    let mut tris: Vec<Tri> = cover.triangles.clone();
    tris.extend(cover.forced.iter().map(|&(_, t)| t));
    let verts = &cover.unreduced_right;
    let mut out = vec![];
    let mut cur: Vec<usize> = vec![];
    fn go(tris: &[Tri], verts: &[Vertex], cur: &mut Vec<usize>, out: &mut Vec<Vec<Tri>>) {
        let i = cur.len();
        if i == verts.len() {
            out.push(cur.iter().map(|&k| tris[k]).collect());
            return;
        }
        for k in 0..tris.len() {
            if tris[k].contains(&verts[i]) && !cur.contains(&k) {
                cur.push(k);
                go(tris, verts, cur, out);
                cur.pop();
            }
        }
    }
    go(&tris, verts, &mut cur, &mut out);
    out
}

fn left_of(t: &Tri, x: Vertex, y: Vertex) -> bool {
    (0..3).any(|k| t[k] == x && t[(k + 1) % 3] == y)
}

/// Cover boundary edges as `(x, y, triangle, on_right_chain)`, directed
/// counterclockwise around the cover.
fn boundary_edges(cover: &Cover) -> Vec<(Vertex, Vertex, usize, bool)> {
    let mut out = vec![];
    let mut chain = vec![cover.s];
    chain.extend(cover.right.iter().copied());
    chain.push(cover.t);
    let on_right = |x: Vertex, y: Vertex| chain.windows(2).any(|w| w[0] == x && w[1] == y);
    for (i, t) in cover.triangles.iter().enumerate() {
        for k in 0..3 {
            let (x, y) = (t[k], t[(k + 1) % 3]);
            if cover.diagonal_index(x, y).is_none() {
                out.push((x, y, i, on_right(x, y)));
            }
        }
    }
    out
}

/// Directed separating edges of a tuple: matched triangles and the region
/// below the right chain lie to the right.
fn separating_edges(cover: &Cover, b: &[usize]) -> Vec<(Vertex, Vertex)> {
    let matched: BTreeSet<usize> = b.iter().copied().collect();
    let mut out = vec![];
    for j in 1..=cover.d() {
        let (m0, m1) = (matched.contains(&(j - 1)), matched.contains(&j));
        if m0 == m1 {
            continue;
        }
        let (x, y) = cover.diagonals[j - 1];
        let unmatched = if m0 { &cover.triangles[j] } else { &cover.triangles[j - 1] };
        out.push(if left_of(unmatched, x, y) { (x, y) } else { (y, x) });
    }
    for (x, y, i, right) in boundary_edges(cover) {
        let m = matched.contains(&i);
        if right && !m {
            out.push((x, y));
        } else if !right && m {
            out.push((y, x));
        }
    }
    out
}

/// Walks through every separating edge once, keeping even steps on crossed
/// arcs in increasing order.
fn walk(
    cover: &Cover,
    edges: &[(Vertex, Vertex)],
    used: &mut Vec<bool>,
    path: &mut Vec<Vertex>,
    last: usize,
    found: &mut Vec<Vec<Vertex>>,
) {
    let v = *path.last().unwrap();
    if used.iter().all(|&u| u) {
        if v == cover.t {
            found.push(path.clone());
        }
        return;
    }
    let even = path.len().is_multiple_of(2);
    for k in 0..edges.len() {
        if used[k] || edges[k].0 != v {
            continue;
        }
        let w = edges[k].1;
        let mut nlast = last;
        if even {
            match cover.diagonal_index(v, w) {
                Some(j) if j > last => nlast = j,
                _ => continue,
            }
        }
        used[k] = true;
        path.push(w);
        walk(cover, edges, used, path, nlast, found);
        path.pop();
        used[k] = false;
    }
}

/// The BCI trail of a tuple.
pub fn trail(cover: &Cover, b: &[usize]) -> Result<TPath, BciError> {
    if cover.edge.is_some() {
        return Ok(TPath { vertices: vec![cover.s, cover.t] });
    }
    if !is_valid_bci(cover, b) {
        return Err(BciError::BadTuple(format!("{b:?}")));
    }
    let edges = separating_edges(cover, b);
    let mut used = vec![false; edges.len()];
    let mut path = vec![cover.s];
    let mut found = vec![];
    walk(cover, &edges, &mut used, &mut path, 0, &mut found);
    debug_assert!(found.len() <= 1, "trail of {b:?} is ambiguous");
    let path = found
        .into_iter()
        .next()
        .ok_or_else(|| BciError::Inconsistent(format!("separating edges of {b:?} admit no T-path")))?;
    Ok(TPath { vertices: path })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TPathReport {
    /// Pass/fail of axioms T1..T6 in order.
    pub axioms: [bool; 6],
    pub notes: Vec<String>,
}

impl TPathReport {
    pub fn ok(&self) -> bool {
        self.axioms.iter().all(|&a| a)
    }
}

/// Check a vertex walk against the reduced T-path axioms.
pub fn validate_tpath(cover: &Cover, a: &TPath) -> TPathReport {
    let mut r = TPathReport { axioms: [true; 6], notes: vec![] };
    let v = &a.vertices;
    if v.first() != Some(&cover.s) || v.last() != Some(&cover.t) {
        r.axioms[0] = false;
        r.notes.push("T1: walk must run from s to t".into());
    }
    let mut ids = vec![];
    for (x, y) in a.steps() {
        match cover.edge_between(x, y) {
            Some(_) => ids.push((x.min(y), x.max(y))),
            None => {
                r.axioms[1] = false;
                r.notes.push(format!("T2: {}-{} is not a cover edge", x.name(), y.name()));
            }
        }
    }
    if ids.iter().collect::<BTreeSet<_>>().len() != ids.len() {
        r.axioms[2] = false;
        r.notes.push("T3: an edge is used twice".into());
    }
    if a.len().is_multiple_of(2) {
        r.axioms[3] = false;
        r.notes.push("T4: length is even".into());
    }
    let mut prev = 0;
    for (k, (x, y)) in a.steps().enumerate() {
        if k % 2 == 1 {
            match cover.diagonal_index(x, y) {
                Some(j) => {
                    if j <= prev {
                        r.axioms[5] = false;
                        r.notes.push(format!("T6: crossing {j} follows crossing {prev}"));
                    }
                    prev = j;
                }
                None => {
                    r.axioms[4] = false;
                    r.notes.push(format!("T5: step {} does not cross the arc", k + 1));
                }
            }
        }
    }
    r
}

/// Reduced T-paths by depth-first search over the axioms.
pub fn enumerate_tpaths(cover: &Cover) -> Vec<TPath> {
    if cover.edge.is_some() {
        return vec![TPath { vertices: vec![cover.s, cover.t] }];
    }
    let mut out = vec![];
    let mut path = vec![cover.s];
    let mut used: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    fn go(cover: &Cover, path: &mut Vec<Vertex>, used: &mut BTreeSet<(Vertex, Vertex)>, last: usize, out: &mut Vec<TPath>) {
        let v = *path.last().unwrap();
        let step = path.len();
        if v == cover.t && step.is_multiple_of(2) {
            out.push(TPath { vertices: path.clone() });
            return;
        }
        for &(a, b, _) in &cover.edges {
            let w = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            let key = (v.min(w), v.max(w));
            if used.contains(&key) {
                continue;
            }
            let mut nlast = last;
            if step.is_multiple_of(2) {
                match cover.diagonal_index(v, w) {
                    Some(j) if j > last => nlast = j,
                    _ => continue,
                }
            }
            used.insert(key);
            path.push(w);
            go(cover, path, used, nlast, out);
            path.pop();
            used.remove(&key);
        }
    }
    go(cover, &mut path, &mut used, 0, &mut out);
    out.sort();
    out.dedup();
    out
}

/// The BCI tuple of triangles to the right of a reduced T-path.
pub fn triangles_of(cover: &Cover, a: &TPath) -> Result<Bci, BciError> {
    let rep = validate_tpath(cover, a);
    if !rep.ok() {
        return Err(BciError::NotTPath(rep.notes.join("; ")));
    }
    if cover.edge.is_some() {
        return Ok(vec![]);
    }
    let traversed: BTreeSet<(Vertex, Vertex)> = a.steps().collect();
    let crossed = |x: Vertex, y: Vertex| traversed.contains(&(x, y)) || traversed.contains(&(y, x));
    let nt = cover.triangles.len();
    let mut status: Vec<Option<bool>> = vec![None; nt];
    let set = |i: usize, m: bool, status: &mut Vec<Option<bool>>| -> Result<(), BciError> {
        match status[i] {
            Some(s) if s != m => Err(BciError::Inconsistent(format!("triangle {i} is on both sides"))),
            _ => {
                status[i] = Some(m);
                Ok(())
            }
        }
    };
    for (x, y, i, right) in boundary_edges(cover) {
        let matched = if crossed(x, y) {
            let forward = traversed.contains(&(x, y));
            if forward != right {
                return Err(BciError::Inconsistent(format!("boundary edge {}-{} traversed backwards", x.name(), y.name())));
            }
            !right
        } else {
            right
        };
        set(i, matched, &mut status)?;
    }
    for j in 1..=cover.d() {
        let (x, y) = cover.diagonals[j - 1];
        let (s0, s1) = (status[j - 1].unwrap(), status[j].unwrap());
        if crossed(x, y) {
            let dir = if traversed.contains(&(x, y)) { (x, y) } else { (y, x) };
            let unmatched = if left_of(&cover.triangles[j - 1], dir.0, dir.1) { j - 1 } else { j };
            if s0 == s1 || status[unmatched] != Some(false) {
                return Err(BciError::Inconsistent(format!("crossing {j} does not separate matched from unmatched")));
            }
        } else if s0 != s1 {
            return Err(BciError::Inconsistent(format!("crossing {j} separates but is not traversed")));
        }
    }
    let mut free: BTreeSet<usize> = (0..nt).filter(|&i| status[i] == Some(true)).collect();
    let mut b = vec![];
    for &(lo, hi) in &cover.fans {
        let t = *free
            .range(lo..=hi)
            .next()
            .ok_or_else(|| BciError::Inconsistent("a right vertex has no matched triangle".into()))?;
        free.remove(&t);
        b.push(t);
    }
    if !free.is_empty() {
        return Err(BciError::Inconsistent("matched triangles outnumber right vertices".into()));
    }
    Ok(b)
}

/// Laurent weight of a T-path: odd steps over even steps.
pub fn tpath_weight(cover: &Cover, a: &TPath, keep_boundary: bool) -> LaurentPoly {
    let mut num = LaurentPoly::one(cover.vars.clone());
    let mut den = LaurentPoly::one(cover.vars.clone());
    for (k, (x, y)) in a.steps().enumerate() {
        let p = cover.edge_poly(cover.edge_between(x, y).unwrap(), keep_boundary);
        if k % 2 == 0 {
            num = &num * &p;
        } else {
            den = &den * &p;
        }
    }
    num.monomial_quotient(&den).unwrap()
}

/// Sum of trail weights over all BCI tuples.
pub fn expand_via_bci(cover: &Cover, keep_boundary: bool) -> Result<LaurentPoly, BciError> {
    let mut sum = LaurentPoly::zero(cover.vars.clone());
    for b in enumerate_bci(cover) {
        let p = trail(cover, &b)?;
        sum = &sum + &tpath_weight(cover, &p, keep_boundary);
    }
    Ok(sum)
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeEdge {
    pub from: usize,
    pub to: usize,
    /// Index of the twisted right vertex, 0-based.
    pub right: usize,
}

#[derive(Clone, Debug)]
pub struct BciLattice {
    pub nodes: Vec<Bci>,
    /// Position of each entry within its fan.
    pub positions: Vec<Vec<usize>>,
    pub edges: Vec<LatticeEdge>,
    pub heights: Vec<LaurentPoly>,
    pub ranks: Vec<usize>,
    pub min: usize,
    pub max: usize,
}

/// Lattice of BCI tuples under single twists.
pub fn bci_lattice(cover: &Cover) -> BciLattice {
    let nodes = enumerate_bci(cover);
    let index: HashMap<Bci, usize> = nodes.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
    let positions: Vec<Vec<usize>> =
        nodes.iter().map(|b| b.iter().zip(&cover.fans).map(|(&t, &(lo, _))| t - lo).collect()).collect();
    let mut edges = vec![];
    for (i, b) in nodes.iter().enumerate() {
        for r in 0..b.len() {
            let mut up = b.clone();
            up[r] += 1;
            if let Some(&j) = index.get(&up) {
                edges.push(LatticeEdge { from: i, to: j, right: r });
            }
        }
    }
    let heights: Vec<LaurentPoly> = nodes
        .iter()
        .map(|b| {
            let mut h = LaurentPoly::one(cover.vars.clone());
            for (&t, &(lo, _)) in b.iter().zip(&cover.fans) {
                for j in lo + 1..=t {
                    let (x, y) = cover.diagonals[j - 1];
                    h = &h * &LaurentPoly::var_index(cover.vars.clone(), cover.edge_between(x, y).unwrap(), 1);
                }
            }
            h
        })
        .collect();
    let ranks: Vec<usize> = positions.iter().map(|p| p.iter().sum()).collect();
    let first: Bci = cover.fans.iter().map(|f| f.0).collect();
    let last: Bci = cover.fans.iter().map(|f| f.1).collect();
    BciLattice {
        min: index.get(&first).copied().unwrap_or(0),
        max: index.get(&last).copied().unwrap_or(0),
        nodes,
        positions,
        edges,
        heights,
        ranks,
    }
}

fn tuple_name(b: &[usize]) -> String {
    let parts: Vec<String> = b.iter().map(|t| format!("Δ{t}")).collect();
    format!("({})", parts.join(","))
}

impl BciLattice {
    pub fn to_dot(&self, cover: &Cover) -> String {
        let mut s = String::from("digraph bci {\n  rankdir=BT;\n");
        for (i, b) in self.nodes.iter().enumerate() {
            s.push_str(&format!("  n{i} [label=\"{}\"];\n", tuple_name(b)));
        }
        for e in &self.edges {
            s.push_str(&format!("  n{} -> n{} [label=\"R{}\"];\n", e.from, e.to, cover.unreduced_index(e.right)));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self, cover: &Cover) -> serde_json::Value {
        serde_json::json!({
            "nodes": self.nodes.iter().enumerate().map(|(i, b)| serde_json::json!({
                "tuple": b,
                "rank": self.ranks[i],
                "height": self.heights[i].canonical_text(),
            })).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| serde_json::json!({
                "from": e.from, "to": e.to, "twist": format!("R{}", cover.unreduced_index(e.right))
            })).collect::<Vec<_>>(),
            "min": self.min,
            "max": self.max,
        })
    }
}

/// Arrows `(a, b)` of the crossing poset, meaning `a < b`.
pub fn poset_q(cover: &Cover) -> Vec<(usize, usize)> {
    let mut arrows = vec![];
    for k in 1..cover.d() {
        let t = &cover.triangles[k];
        let side = |e: (Vertex, Vertex)| {
            (0..3).find(|&i| {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                (a == e.0 && b == e.1) || (a == e.1 && b == e.0)
            })
        };
        let (p, q) = (side(cover.diagonals[k - 1]).unwrap(), side(cover.diagonals[k]).unwrap());
        if q == (p + 1) % 3 {
            arrows.push((k, k + 1));
        } else {
            arrows.push((k + 1, k));
        }
    }
    arrows
}

/// Order ideals of a poset on `1..=d` given by cover arrows.
pub fn order_ideals(d: usize, arrows: &[(usize, usize)]) -> Vec<BTreeSet<usize>> {
    let mut out = vec![];
    for mask in 0u64..(1u64 << d) {
        let has = |x: usize| mask >> (x - 1) & 1 == 1;
        if arrows.iter().all(|&(a, b)| !has(b) || has(a)) {
            out.push((1..=d).filter(|&x| has(x)).collect());
        }
    }
    out
}

pub fn poset_dot(d: usize, arrows: &[(usize, usize)]) -> String {
    let mut s = String::from("digraph q {\n");
    for k in 1..=d {
        s.push_str(&format!("  {k};\n"));
    }
    for &(a, b) in arrows {
        s.push_str(&format!("  {a} -> {b};\n"));
    }
    s.push_str("}\n");
    s
}

/// Crossing indices under the height monomial of a tuple.
pub fn height_support(cover: &Cover, b: &[usize]) -> BTreeSet<usize> {
    b.iter().zip(&cover.fans).flat_map(|(&t, &(lo, _))| lo + 1..=t).collect()
}

/// Check that tuples map bijectively onto order ideals, preserving rank and
/// turning twists into single-element additions.
pub fn check_isomorphism(cover: &Cover, lattice: &BciLattice) -> Result<(), String> {
    let arrows = poset_q(cover);
    let ideals: BTreeSet<BTreeSet<usize>> = order_ideals(cover.d(), &arrows).into_iter().collect();
    let mut images = BTreeSet::new();
    for (i, b) in lattice.nodes.iter().enumerate() {
        let s = height_support(cover, b);
        if s.len() != lattice.ranks[i] {
            return Err(format!("tuple {b:?} has rank {} but support {s:?}", lattice.ranks[i]));
        }
        if !ideals.contains(&s) {
            return Err(format!("support {s:?} of {b:?} is not an order ideal"));
        }
        if !images.insert(s) {
            return Err(format!("two tuples share a support ({b:?})"));
        }
    }
    if images.len() != ideals.len() {
        return Err(format!("{} tuples but {} order ideals", images.len(), ideals.len()));
    }
    for e in &lattice.edges {
        let a = height_support(cover, &lattice.nodes[e.from]);
        let b = height_support(cover, &lattice.nodes[e.to]);
        if !(a.is_subset(&b) && b.len() == a.len() + 1) {
            return Err(format!("twist {} -> {} is not a covering relation", e.from, e.to));
        }
    }
    Ok(())
}

/// Check that `trail` and `triangles_of` are mutually inverse on a cover.
/// Returns the number of tuples.
pub fn check_bijection(cover: &Cover) -> Result<usize, String> {
    let tuples = enumerate_bci(cover);
    for b in &tuples {
        let p = trail(cover, b).map_err(|e| format!("trail of {b:?}: {e}"))?;
        let report = validate_tpath(cover, &p);
        if !report.ok() {
            return Err(format!("trail of {b:?} breaks T-path axioms: {:?}", report.notes));
        }
        let back = triangles_of(cover, &p).map_err(|e| format!("triangles of trail {b:?}: {e}"))?;
        if &back != b {
            return Err(format!("{b:?} maps back to {back:?}"));
        }
    }
    let paths = enumerate_tpaths(cover);
    if paths.len() != tuples.len() {
        return Err(format!("{} tuples but {} T-paths", tuples.len(), paths.len()));
    }
    for p in &paths {
        let b = triangles_of(cover, p).map_err(|e| format!("triangles of {:?}: {e}", p.labels(cover)))?;
        if trail(cover, &b).ok().as_ref() != Some(p) {
            return Err(format!("T-path {:?} does not round-trip", p.labels(cover)));
        }
    }
    Ok(tuples.len())
}
