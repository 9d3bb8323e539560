//! Triangulated marked surfaces realized in a universal-cover strip.
//!
//! The designated boundary is the horizontal lower line with marked points
//! at integer positions increasing to the right. The puncture of a disk is a
//! single vertex above the line; the inner boundary of an annulus is a
//! second line of integer positions above. Deck transformations shift lower
//! positions by `n` and upper positions by `m`.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::LaurentPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("invalid surface: {0}")]
    BadSurface(String),
    #[error("arc `{label}`: {msg}")]
    BadArc { label: String, msg: String },
    #[error("expected {expected} arcs for a maximal triangulation, found {found}")]
    ArcCount { expected: usize, found: usize },
    #[error("arcs `{0}` and `{1}` cross")]
    Crossing(String, String),
    #[error("arcs `{0}` and `{1}` are the same arc")]
    Duplicate(String, String),
    #[error("arcs do not cut the surface into triangles ({0})")]
    NotTriangulated(String),
    #[error("malformed triangulation document: {0}")]
    Json(String),
    #[error("unknown arc label `{0}`")]
    UnknownLabel(String),
    #[error("cannot flip `{label}`: {msg}")]
    Flip { label: String, msg: String },
    #[error("out of range: {0}")]
    Range(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Surface {
    Polygon { n: usize },
    PuncturedDisk { n: usize },
    Annulus { n: usize, m: usize },
}

impl Surface {
    fn validate(&self) -> Result<(), SurfaceError> {
        match *self {
            Surface::Polygon { n } if n < 4 => {
                Err(SurfaceError::BadSurface(format!("polygon needs at least 4 vertices, got {n}")))
            }
            Surface::PuncturedDisk { n } if n < 2 => Err(SurfaceError::BadSurface(
                "a once-punctured monogon has no triangulation".into(),
            )),
            Surface::Annulus { n, m } if n == 0 || m == 0 => Err(SurfaceError::BadSurface(
                "each boundary component needs a marked point".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Marked points on the designated (lower) boundary.
    pub fn n(&self) -> usize {
        match *self {
            Surface::Polygon { n } | Surface::PuncturedDisk { n } | Surface::Annulus { n, .. } => n,
        }
    }

    fn arc_count(&self) -> usize {
        match *self {
            Surface::Polygon { n } => n - 3,
            Surface::PuncturedDisk { n } => n,
            Surface::Annulus { n, m } => n + m,
        }
    }

    fn triangle_count(&self) -> usize {
        match *self {
            Surface::Polygon { n } => n - 2,
            Surface::PuncturedDisk { n } => n,
            Surface::Annulus { n, m } => n + m,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    #[default]
    Outer,
    Inner,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArcKind {
    Peripheral {
        from: i64,
        to: i64,
        #[serde(default, skip_serializing_if = "is_outer")]
        side: Side,
    },
    Radius {
        at: i64,
    },
    Bridge {
        outer: i64,
        inner: i64,
    },
    EllLoop {
        at: i64,
        radius: String,
    },
}

fn is_outer(s: &Side) -> bool {
    *s == Side::Outer
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcDef {
    pub label: String,
    #[serde(flatten)]
    pub kind: ArcKind,
}

#[derive(Serialize, Deserialize)]
struct TriangulationDoc {
    surface: Surface,
    arcs: Vec<ArcDef>,
}

/// A vertex of the strip.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Vertex {
    Low(i64),
    Up(i64),
    Puncture,
}

impl Vertex {
    pub fn low(&self) -> Option<i64> {
        match *self {
            Vertex::Low(p) => Some(p),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Vertex::Low(p) => p.to_string(),
            Vertex::Up(u) => format!("u{u}"),
            Vertex::Puncture => "P".into(),
        }
    }
}

pub type Tri = [Vertex; 3];

/// Monomial weights of edges in expansions. An ell-loop's variable stands
/// for the partner of its radius, so the loop itself weighs `x_loop * x_radius`.
#[derive(Clone, Debug)]
pub struct Weights {
    pub vars: Arc<Vec<String>>,
    pub boundary: Vec<bool>,
    pub partner: Vec<Option<usize>>,
}

impl Weights {
    pub fn poly(&self, id: usize, keep_boundary: bool) -> LaurentPoly {
        if self.boundary[id] && !keep_boundary {
            return LaurentPoly::one(self.vars.clone());
        }
        let x = LaurentPoly::var_index(self.vars.clone(), id, 1);
        match self.partner[id] {
            Some(r) => &x * &LaurentPoly::var_index(self.vars.clone(), r, 1),
            None => x,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EdgeInfo {
    pub label: String,
    pub boundary: bool,
    pub ends: (Vertex, Vertex),
}

/// A validated ideal triangulation with its strip realization.
#[derive(Clone, Debug)]
pub struct Triangulation {
    surface: Surface,
    arcs: Vec<ArcDef>,
    edges: Vec<EdgeInfo>,
    vars: Arc<Vec<String>>,
    lookup: HashMap<(Vertex, Vertex), usize>,
    low_adj: Vec<Vec<(Vertex, usize)>>,
    up_adj: Vec<Vec<(Vertex, usize)>>,
    radii: Vec<(i64, usize)>,
    triangles: Vec<Tri>,
    /// Lower line and upper line labels, kept when the strip is reflected.
    outer_labels: Vec<String>,
    inner_labels: Vec<String>,
}

type Window = Option<(i64, i64)>;

impl Triangulation {
    pub fn from_json(doc: &str) -> Result<Self, SurfaceError> {
        let d: TriangulationDoc =
            serde_json::from_str(doc).map_err(|e| SurfaceError::Json(e.to_string()))?;
        Self::new(d.surface, d.arcs)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(TriangulationDoc { surface: self.surface, arcs: self.arcs.clone() })
            .unwrap()
    }

    pub fn new(surface: Surface, arcs: Vec<ArcDef>) -> Result<Self, SurfaceError> {
        surface.validate()?;
        let n = surface.n();
        let outer = (1..=n).map(|p| format!("b{p}")).collect();
        let inner = match surface {
            Surface::Annulus { m, .. } => (1..=m).map(|u| format!("B{u}")).collect(),
            _ => vec![],
        };
        Self::with_boundary_labels(surface, arcs, outer, inner)
    }

    fn with_boundary_labels(
        surface: Surface,
        arcs: Vec<ArcDef>,
        outer_labels: Vec<String>,
        inner_labels: Vec<String>,
    ) -> Result<Self, SurfaceError> {
        surface.validate()?;
        if arcs.len() != surface.arc_count() {
            return Err(SurfaceError::ArcCount { expected: surface.arc_count(), found: arcs.len() });
        }
        let n = surface.n() as i64;
        let m = match surface {
            Surface::Annulus { m, .. } => m as i64,
            _ => 1,
        };
        let polygon = matches!(surface, Surface::Polygon { .. });

        let mut edges = Vec::new();
        for (idx, a) in arcs.iter().enumerate() {
            if a.label.is_empty()
                || !a.label.chars().next().unwrap().is_ascii_alphabetic()
                || !a.label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(SurfaceError::BadArc {
                    label: a.label.clone(),
                    msg: "labels must be identifiers".into(),
                });
            }
            if arcs[..idx].iter().any(|b| b.label == a.label) {
                return Err(SurfaceError::BadArc { label: a.label.clone(), msg: "duplicate label".into() });
            }
            let ends = arc_ends(&surface, a, &arcs)?;
            edges.push(EdgeInfo { label: a.label.clone(), boundary: false, ends });
        }
        for (p, l) in outer_labels.iter().enumerate() {
            let p = p as i64 + 1;
            edges.push(EdgeInfo { label: l.clone(), boundary: true, ends: (Vertex::Low(p), Vertex::Low(p + 1)) });
        }
        for (u, l) in inner_labels.iter().enumerate() {
            let u = u as i64 + 1;
            edges.push(EdgeInfo { label: l.clone(), boundary: true, ends: (Vertex::Up(u), Vertex::Up(u + 1)) });
        }
        let mut names: Vec<String> = edges.iter().map(|e| e.label.clone()).collect();
        for i in 0..names.len() {
            if names[..i].contains(&names[i]) {
                return Err(SurfaceError::BadArc {
                    label: names[i].clone(),
                    msg: "label collides with a boundary label".into(),
                });
            }
        }
        let vars = Arc::new(std::mem::take(&mut names));

        let mut t = Triangulation {
            surface,
            arcs,
            edges,
            vars,
            lookup: HashMap::new(),
            low_adj: vec![vec![]; n as usize],
            up_adj: vec![vec![]; m as usize],
            radii: vec![],
            triangles: vec![],
            outer_labels,
            inner_labels,
        };

        for id in 0..t.edges.len() {
            let (x, y) = t.edges[id].ends;
            let key = t.normalize(x, y).ok_or_else(|| SurfaceError::BadArc {
                label: t.edges[id].label.clone(),
                msg: "degenerate arc".into(),
            })?;
            if let Some(&other) = t.lookup.get(&key) {
                return Err(SurfaceError::Duplicate(t.edges[other].label.clone(), t.edges[id].label.clone()));
            }
            t.lookup.insert(key, id);
            t.edges[id].ends = key;
        }

        // non-crossing
        let narcs = t.arcs.len();
        for i in 0..narcs {
            for j in i..narcs {
                if t.orbits_cross(i, j) {
                    return Err(SurfaceError::Crossing(t.edges[i].label.clone(), t.edges[j].label.clone()));
                }
            }
        }

        // adjacency templates
        for id in 0..t.edges.len() {
            let (x, y) = t.edges[id].ends;
            if polygon {
                let (a, b) = (x.low().unwrap(), y.low().unwrap());
                t.low_adj[(a - 1) as usize].push((Vertex::Low(b), id));
                t.low_adj[(a - 1) as usize].push((Vertex::Low(b - n), id));
                t.low_adj[(b - 1) as usize].push((Vertex::Low(a), id));
                t.low_adj[(b - 1) as usize].push((Vertex::Low(a + n), id));
                continue;
            }
            for (e, o) in [(x, y), (y, x)] {
                match e {
                    Vertex::Low(p) => {
                        let r = (p - 1).rem_euclid(n) + 1;
                        let s = (r - p) / n;
                        let w = t.shift(o, s);
                        t.low_adj[(r - 1) as usize].push((w, id));
                    }
                    Vertex::Up(u) => {
                        let r = (u - 1).rem_euclid(m) + 1;
                        let s = (r - u) / m;
                        let w = t.shift(o, s);
                        t.up_adj[(r - 1) as usize].push((w, id));
                    }
                    Vertex::Puncture => {
                        let p = o.low().unwrap();
                        t.radii.push(((p - 1).rem_euclid(n) + 1, id));
                    }
                }
            }
        }

        // triangles
        let win = t.fundamental_window();
        let mut tris = BTreeSet::new();
        for id in 0..t.edges.len() {
            let (x, y) = t.edges[id].ends;
            for (a, b) in [(x, y), (y, x)] {
                let Some(w) = t.pred(b, a, win) else { continue };
                let closes = t.pred(w, b, win) == Some(a) && t.pred(a, w, win) == Some(b);
                if !closes {
                    return Err(SurfaceError::NotTriangulated(format!(
                        "face beside `{}` is not a triangle",
                        t.edges[id].label
                    )));
                }
                tris.insert(t.normalize_tri([a, b, w]));
            }
        }
        t.triangles = tris.into_iter().collect();
        if t.triangles.len() != surface.triangle_count() {
            return Err(SurfaceError::NotTriangulated(format!(
                "found {} triangles, expected {}",
                t.triangles.len(),
                surface.triangle_count()
            )));
        }
        Ok(t)
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn arcs(&self) -> &[ArcDef] {
        &self.arcs
    }

    pub fn edges(&self) -> &[EdgeInfo] {
        &self.edges
    }

    /// Variable table: arc labels, then boundary labels.
    pub fn vars(&self) -> &Arc<Vec<String>> {
        &self.vars
    }

    pub fn weights(&self) -> Weights {
        let partner = (0..self.edges.len())
            .map(|i| match self.arcs.get(i).map(|a| &a.kind) {
                Some(ArcKind::EllLoop { radius, .. }) => self.arc_index(radius),
                _ => None,
            })
            .collect();
        Weights {
            vars: self.vars.clone(),
            boundary: self.edges.iter().map(|e| e.boundary).collect(),
            partner,
        }
    }

    pub fn boundary_labels(&self) -> Vec<&str> {
        self.edges.iter().filter(|e| e.boundary).map(|e| e.label.as_str()).collect()
    }

    /// Fundamental triangles, counterclockwise.
    pub fn triangles(&self) -> &[Tri] {
        &self.triangles
    }

    pub fn is_polygon(&self) -> bool {
        matches!(self.surface, Surface::Polygon { .. })
    }

    pub fn n(&self) -> i64 {
        self.surface.n() as i64
    }

    fn m(&self) -> i64 {
        match self.surface {
            Surface::Annulus { m, .. } => m as i64,
            _ => 1,
        }
    }

    fn fundamental_window(&self) -> Window {
        self.is_polygon().then(|| (1, self.n()))
    }

    /// The window a polygon arc starting at `s` lives in.
    pub fn window_at(&self, s: i64) -> Window {
        self.is_polygon().then(|| (s, s + self.n() - 1))
    }

    pub fn shift(&self, v: Vertex, t: i64) -> Vertex {
        match v {
            Vertex::Low(p) => Vertex::Low(p + t * self.n()),
            Vertex::Up(u) => Vertex::Up(u + t * self.m()),
            Vertex::Puncture => Vertex::Puncture,
        }
    }

    fn normalize(&self, x: Vertex, y: Vertex) -> Option<(Vertex, Vertex)> {
        if x == y {
            return None;
        }
        let n = self.n();
        if self.is_polygon() {
            let (a, b) = (x.low()?, y.low()?);
            if (a - b).abs() >= n {
                return None;
            }
            let ra = (a - 1).rem_euclid(n) + 1;
            let rb = (b - 1).rem_euclid(n) + 1;
            if ra == rb {
                return None;
            }
            return Some((Vertex::Low(ra.min(rb)), Vertex::Low(ra.max(rb))));
        }
        let lows: Vec<i64> = [x, y].iter().filter_map(|v| v.low()).collect();
        let t = if let Some(&p) = lows.iter().min() {
            (p - 1).div_euclid(n)
        } else {
            let u = [x, y]
                .iter()
                .filter_map(|v| match v {
                    Vertex::Up(u) => Some(*u),
                    _ => None,
                })
                .min()?;
            (u - 1).div_euclid(self.m())
        };
        let (a, b) = (self.shift(x, -t), self.shift(y, -t));
        Some((a.min(b), a.max(b)))
    }

    /// Edge id of the strip segment between `x` and `y`, if it is a lifted arc
    /// or boundary edge.
    pub fn edge_id(&self, x: Vertex, y: Vertex) -> Option<usize> {
        self.normalize(x, y).and_then(|k| self.lookup.get(&k).copied())
    }

    pub fn label(&self, id: usize) -> &str {
        &self.edges[id].label
    }

    pub fn arc_index(&self, label: &str) -> Option<usize> {
        self.arcs.iter().position(|a| a.label == label)
    }

    fn normalize_tri(&self, t: Tri) -> Tri {
        let lows: Vec<i64> = t.iter().filter_map(|v| v.low()).collect();
        let s = if self.is_polygon() {
            0
        } else if let Some(&p) = lows.iter().min() {
            (p - 1).div_euclid(self.n())
        } else {
            let u = t
                .iter()
                .filter_map(|v| match v {
                    Vertex::Up(u) => Some(*u),
                    _ => None,
                })
                .min()
                .unwrap();
            (u - 1).div_euclid(self.m())
        };
        let t = [self.shift(t[0], -s), self.shift(t[1], -s), self.shift(t[2], -s)];
        let k = (0..3).min_by_key(|&i| t[i]).unwrap();
        [t[k], t[(k + 1) % 3], t[(k + 2) % 3]]
    }

    fn orbits_cross(&self, i: usize, j: usize) -> bool {
        let (a, b) = self.edges[i].ends;
        let (c, d) = self.edges[j].ends;
        if self.is_polygon() {
            let (a, b, c, d) = (a.low().unwrap(), b.low().unwrap(), c.low().unwrap(), d.low().unwrap());
            return (a < c && c < b && b < d) || (c < a && a < d && d < b);
        }
        let reach = 4 + self.span(i).max(self.span(j)) / self.n().min(self.m()).max(1);
        for t in -reach..=reach {
            if i == j && t == 0 {
                continue;
            }
            if strip_cross((a, b), (self.shift(c, t), self.shift(d, t))) {
                return true;
            }
        }
        false
    }

    fn span(&self, i: usize) -> i64 {
        let (a, b) = self.edges[i].ends;
        let pos = |v: Vertex| match v {
            Vertex::Low(p) | Vertex::Up(p) => p,
            Vertex::Puncture => 0,
        };
        (pos(a) - pos(b)).abs()
    }

    /// Strip neighbours of a non-puncture vertex.
    pub fn neighbors(&self, v: Vertex, win: Window) -> Vec<(Vertex, usize)> {
        let n = self.n();
        let m = self.m();
        let mut out = match v {
            Vertex::Low(p) => {
                let r = (p - 1).rem_euclid(n) + 1;
                let s = (p - r) / n;
                self.low_adj[(r - 1) as usize]
                    .iter()
                    .map(|&(w, id)| (if self.is_polygon() { shift_low(w, s * n) } else { self.shift(w, s) }, id))
                    .collect::<Vec<_>>()
            }
            Vertex::Up(u) => {
                let r = (u - 1).rem_euclid(m) + 1;
                let s = (u - r) / m;
                self.up_adj[(r - 1) as usize].iter().map(|&(w, id)| (self.shift(w, s), id)).collect()
            }
            Vertex::Puncture => panic!("puncture neighbourhoods are infinite"),
        };
        if let Some((lo, hi)) = win {
            out.retain(|(w, _)| w.low().is_some_and(|q| lo <= q && q <= hi));
        }
        out
    }

    /// Neighbour of `v` immediately clockwise of `u`; the third vertex of
    /// the triangle to the left of `u -> v`.
    pub fn pred(&self, v: Vertex, u: Vertex, win: Window) -> Option<Vertex> {
        if v == Vertex::Puncture {
            let p = u.low()?;
            let n = self.n();
            return self
                .radii
                .iter()
                .map(|&(a, _)| a + n * (p - 1 - a).div_euclid(n))
                .max()
                .map(Vertex::Low);
        }
        let ku = ccw_key(v, u);
        self.neighbors(v, win)
            .into_iter()
            .filter(|&(w, _)| ccw_key(v, w) < ku)
            .max_by_key(|&(w, _)| ccw_key(v, w))
            .map(|(w, _)| w)
    }

    /// Triangle on the left of the directed edge `x -> y`, counterclockwise
    /// starting at `x`.
    pub fn tri_left(&self, x: Vertex, y: Vertex, win: Window) -> Option<Tri> {
        let w = self.pred(y, x, win)?;
        Some([x, y, w])
    }

    pub fn is_self_folded(&self, t: &Tri) -> bool {
        let ids: Vec<Option<usize>> = (0..3).map(|k| self.edge_id(t[k], t[(k + 1) % 3])).collect();
        ids[0] == ids[1] || ids[1] == ids[2] || ids[0] == ids[2]
    }

    /// Triangle-corner counts at lower marked points 1..n.
    pub fn quiddity(&self) -> Vec<u64> {
        let n = self.n();
        let mut q = vec![0u64; n as usize];
        for t in &self.triangles {
            for v in t {
                if let Vertex::Low(p) = v {
                    q[((p - 1).rem_euclid(n)) as usize] += 1;
                }
            }
        }
        q
    }

    /// Quiddity read from the chosen boundary.
    pub fn quiddity_on(&self, side: Side) -> Result<Vec<u64>, SurfaceError> {
        match side {
            Side::Outer => Ok(self.quiddity()),
            Side::Inner => Ok(self.reflected()?.quiddity()),
        }
    }

    /// Signed adjacency matrix over arcs, in declaration order.
    pub fn signed_adjacency(&self) -> Vec<Vec<i64>> {
        let d = self.arcs.len();
        let mut pi: Vec<usize> = (0..d).collect();
        for t in &self.triangles {
            if self.is_self_folded(t) {
                let ids: Vec<usize> =
                    (0..3).map(|k| self.edge_id(t[k], t[(k + 1) % 3]).unwrap()).collect();
                let (radius, ell) = if ids[0] == ids[1] {
                    (ids[0], ids[2])
                } else if ids[1] == ids[2] {
                    (ids[1], ids[0])
                } else {
                    (ids[0], ids[1])
                };
                pi[radius] = ell;
            }
        }
        let mut b = vec![vec![0i64; d]; d];
        for t in &self.triangles {
            if self.is_self_folded(t) {
                continue;
            }
            let sides: Vec<usize> =
                (0..3).map(|k| self.edge_id(t[k], t[(k + 1) % 3]).unwrap()).collect();
            for p in 0..d {
                for q in 0..d {
                    for x in 0..3 {
                        if sides[x] != pi[p] {
                            continue;
                        }
                        if sides[(x + 1) % 3] == pi[q] {
                            b[p][q] += 1;
                        }
                        if sides[(x + 2) % 3] == pi[q] {
                            b[p][q] -= 1;
                        }
                    }
                }
            }
        }
        b
    }

    /// Replace an arc by the other diagonal of its quadrilateral.
    pub fn flip(&self, label: &str) -> Result<Self, SurfaceError> {
        let id = self.edges.iter().position(|e| e.label == label).ok_or_else(|| SurfaceError::UnknownLabel(label.into()))?;
        if self.edges[id].boundary {
            return Err(SurfaceError::Flip { label: label.into(), msg: "boundary edges cannot be flipped".into() });
        }
        let win = self.fundamental_window();
        let (x, y) = self.edges[id].ends;
        let t1 = self.tri_left(x, y, win).unwrap();
        let t2 = self.tri_left(y, x, win).unwrap();
        if self.is_self_folded(&self.normalize_tri(t1)) || self.is_self_folded(&self.normalize_tri(t2)) {
            return Err(SurfaceError::Flip {
                label: label.into(),
                msg: "arc belongs to a self-folded triangle".into(),
            });
        }
        let (w, z) = (t1[2], t2[2]);
        let kind = self.kind_of(w, z)?;
        let mut arcs = self.arcs.clone();
        arcs[id].kind = kind;
        // an ell-loop created by the flip names its radius
        if let ArcKind::Peripheral { from, to, side: Side::Outer } = arcs[id].kind {
            if matches!(self.surface, Surface::PuncturedDisk { .. }) && to - from == self.n() {
                let r = self.radius_label_at(from).ok_or_else(|| SurfaceError::Flip {
                    label: label.into(),
                    msg: "loop without radius".into(),
                })?;
                arcs[id].kind = ArcKind::EllLoop { at: from, radius: r };
            }
        }
        Self::with_boundary_labels(self.surface, arcs, self.outer_labels.clone(), self.inner_labels.clone())
    }

    fn inner_period(&self) -> i64 {
        match self.surface {
            Surface::Annulus { m, .. } => m as i64,
            _ => 1,
        }
    }

    fn radius_label_at(&self, p: i64) -> Option<String> {
        let n = self.n();
        self.radii
            .iter()
            .find(|(a, _)| (a - p).rem_euclid(n) == 0)
            .map(|&(_, id)| self.edges[id].label.clone())
    }

    fn kind_of(&self, w: Vertex, z: Vertex) -> Result<ArcKind, SurfaceError> {
        let (a, b) = (w.min(z), w.max(z));
        Ok(match (a, b) {
            (Vertex::Low(p), Vertex::Low(q)) => {
                if self.is_polygon() {
                    let n = self.n();
                    let (rp, rq) = ((p - 1).rem_euclid(n) + 1, (q - 1).rem_euclid(n) + 1);
                    ArcKind::Peripheral { from: rp.min(rq), to: rp.max(rq), side: Side::Outer }
                } else {
                    let t = (p - 1).div_euclid(self.n());
                    ArcKind::Peripheral { from: p - t * self.n(), to: q - t * self.n(), side: Side::Outer }
                }
            }
            (Vertex::Low(p), Vertex::Up(u)) => {
                let t = (p - 1).div_euclid(self.n());
                ArcKind::Bridge { outer: p - t * self.n(), inner: u - t * self.inner_period() }
            }
            (Vertex::Low(p), Vertex::Puncture) => ArcKind::Radius { at: p },
            (Vertex::Up(u), Vertex::Up(v)) => {
                let m = self.inner_period();
                let t = (u - 1).div_euclid(m);
                ArcKind::Peripheral { from: u - t * m, to: v - t * m, side: Side::Inner }
            }
            _ => return Err(SurfaceError::Unsupported("unexpected flip result".into())),
        })
    }

    /// The same annulus with the inner boundary drawn below: positions are
    /// reflected, so inner point `u` becomes lower position `m + 1 - u`.
    pub fn reflected(&self) -> Result<Self, SurfaceError> {
        let Surface::Annulus { n, m } = self.surface else {
            return Err(SurfaceError::Unsupported("only annuli have an inner boundary".into()));
        };
        let (ni, mi) = (n as i64, m as i64);
        let arcs = self
            .arcs
            .iter()
            .map(|a| {
                let kind = match a.kind {
                    ArcKind::Bridge { outer, inner } => ArcKind::Bridge { outer: mi + 1 - inner, inner: ni + 1 - outer },
                    ArcKind::Peripheral { from, to, side: Side::Outer } => {
                        ArcKind::Peripheral { from: ni + 1 - to, to: ni + 1 - from, side: Side::Inner }
                    }
                    ArcKind::Peripheral { from, to, side: Side::Inner } => {
                        ArcKind::Peripheral { from: mi + 1 - to, to: mi + 1 - from, side: Side::Outer }
                    }
                    ref k => k.clone(),
                };
                ArcDef { label: a.label.clone(), kind }
            })
            .collect();
        // lower edge (p, p+1) was upper edge (m - p, m + 1 - p)
        let outer = (1..=mi).map(|p| self.inner_labels[((mi - p - 1).rem_euclid(mi)) as usize].clone()).collect();
        let inner = (1..=ni).map(|u| self.outer_labels[((ni - u - 1).rem_euclid(ni)) as usize].clone()).collect();
        Self::with_boundary_labels(Surface::Annulus { n: m, m: n }, arcs, outer, inner)
    }

    /// Crossed arcs and triangles of the lower strip segment from `s` to `t`.
    pub fn crossing(&self, s: i64, t: i64) -> Result<Crossing, SurfaceError> {
        if t <= s {
            return Err(SurfaceError::Range(format!("lift ({s},{t}) must have s < t")));
        }
        if self.is_polygon() && t - s >= self.n() {
            return Err(SurfaceError::Range(format!("polygon arc ({s},{t}) wraps past its start")));
        }
        let win = self.window_at(s);
        let (sv, tv) = (Vertex::Low(s), Vertex::Low(t));
        if let Some(id) = self.edge_id(sv, tv) {
            return Ok(Crossing { s: sv, t: tv, triangles: vec![], diagonals: vec![], edge: Some(id), window: win });
        }
        let key = (0u8, t);
        let lo = self
            .neighbors(sv, win)
            .into_iter()
            .filter(|&(w, _)| ccw_key(sv, w) < key)
            .max_by_key(|&(w, _)| ccw_key(sv, w))
            .map(|(w, _)| w)
            .ok_or_else(|| SurfaceError::Range("no triangle at start".into()))?;
        let mut cur = self.tri_left(sv, lo, win).unwrap();
        let mut triangles = vec![cur];
        let mut diagonals = vec![];
        let mut entry: Option<(Vertex, Vertex)> = None;
        let seg = (sv, tv);
        while !cur.contains(&tv) {
            let mut next = None;
            for k in 0..3 {
                let (x, y) = (cur[k], cur[(k + 1) % 3]);
                if entry.is_some_and(|(a, b)| (a == x && b == y) || (a == y && b == x)) {
                    continue;
                }
                if strip_cross(seg, (x, y)) {
                    next = Some((x, y));
                    break;
                }
            }
            let (x, y) = next.ok_or_else(|| SurfaceError::NotTriangulated("crossing walk stalled".into()))?;
            let right = if x.low().is_some_and(|p| s < p && p < t) { x } else { y };
            let left = if right == x { y } else { x };
            diagonals.push((right, left));
            let nt = self.tri_left(y, x, win).unwrap();
            let k = nt.iter().position(|&v| v == y).unwrap();
            cur = [nt[k], nt[(k + 1) % 3], nt[(k + 2) % 3]];
            triangles.push(cur);
            entry = Some((x, y));
            if triangles.len() > 100_000 {
                return Err(SurfaceError::NotTriangulated("crossing walk does not terminate".into()));
            }
        }
        Ok(Crossing { s: sv, t: tv, triangles, diagonals, edge: None, window: win })
    }

    /// Crossing data of the k-bracelet around the core of an annulus.
    pub fn bracelet_crossing(&self, k: u32) -> Result<BraceletCrossing, SurfaceError> {
        if !matches!(self.surface, Surface::Annulus { .. }) {
            return Err(SurfaceError::Unsupported("band graphs need an annulus".into()));
        }
        if k == 0 {
            return Err(SurfaceError::Range("bracelets wrap at least once".into()));
        }
        let mut bridges: Vec<(i64, i64)> = self
            .edges
            .iter()
            .filter_map(|e| match e.ends {
                (Vertex::Low(o), Vertex::Up(u)) => Some((o, u)),
                _ => None,
            })
            .collect();
        bridges.sort();
        let q = bridges.len() as i64;
        let at = |j: i64| -> (Vertex, Vertex) {
            let t = (j - 1).div_euclid(q);
            let (o, u) = bridges[((j - 1).rem_euclid(q)) as usize];
            (self.shift(Vertex::Low(o), t), self.shift(Vertex::Up(u), t))
        };
        let d = k as i64 * q;
        let mut triangles = vec![];
        let mut diagonals = vec![];
        for j in 0..=d {
            let (o, u) = at(j);
            let tri = self.tri_left(u, o, None).unwrap();
            let (o2, u2) = at(j + 1);
            if !(tri.contains(&o2) && tri.contains(&u2)) {
                return Err(SurfaceError::NotTriangulated("bridges are not consecutive".into()));
            }
            // rotate so the triangle starts at a vertex not on the incoming bridge
            let r = tri.iter().position(|v| *v != o && *v != u).unwrap();
            triangles.push([tri[r], tri[(r + 1) % 3], tri[(r + 2) % 3]]);
            if j >= 1 {
                diagonals.push((o, u));
            }
        }
        Ok(BraceletCrossing { triangles, diagonals, k, period: q as usize })
    }

    /// Polygon cover of the lower segment from `s` to `t`.
    pub fn polygon_cover(&self, s: i64, t: i64) -> Result<Cover, SurfaceError> {
        let c = self.crossing(s, t)?;
        Cover::build(self, &c)
    }
}

fn shift_low(v: Vertex, by: i64) -> Vertex {
    match v {
        Vertex::Low(p) => Vertex::Low(p + by),
        other => other,
    }
}

/// Counterclockwise rank of neighbour `w` around `v`.
pub fn ccw_key(v: Vertex, w: Vertex) -> (u8, i64) {
    match (v, w) {
        (Vertex::Low(p), Vertex::Low(q)) if q > p => (0, q),
        (Vertex::Low(_), Vertex::Up(u)) => (1, -u),
        (Vertex::Low(_), Vertex::Puncture) => (1, 0),
        (Vertex::Low(_), Vertex::Low(q)) => (2, q),
        (Vertex::Up(u), Vertex::Up(q)) if q < u => (0, -q),
        (Vertex::Up(_), Vertex::Low(o)) => (1, o),
        (Vertex::Up(_), Vertex::Up(q)) => (2, -q),
        (Vertex::Puncture, Vertex::Low(o)) => (1, o),
        _ => (3, 0),
    }
}

/// Whether two strip segments cross in their interiors.
pub fn strip_cross(e: (Vertex, Vertex), f: (Vertex, Vertex)) -> bool {
    use Vertex::*;
    let norm = |(a, b): (Vertex, Vertex)| if a <= b { (a, b) } else { (b, a) };
    let (e, f) = (norm(e), norm(f));
    let inter = |a: i64, b: i64, c: i64, d: i64| (a < c && c < b && b < d) || (c < a && a < d && d < b);
    match (e, f) {
        ((Low(a), Low(b)), (Low(c), Low(d))) => inter(a.min(b), a.max(b), c.min(d), c.max(d)),
        ((Low(a), Low(b)), (Low(p), Up(_) | Puncture)) | ((Low(p), Up(_) | Puncture), (Low(a), Low(b))) => {
            a.min(b) < p && p < a.max(b)
        }
        ((Low(o), Up(u)), (Low(o2), Up(u2))) => (o < o2 && u > u2) || (o > o2 && u < u2),
        ((Low(_), Up(u)), (Up(a), Up(b))) | ((Up(a), Up(b)), (Low(_), Up(u))) => a.min(b) < u && u < a.max(b),
        ((Up(a), Up(b)), (Up(c), Up(d))) => inter(a.min(b), a.max(b), c.min(d), c.max(d)),
        _ => false,
    }
}

fn arc_ends(surface: &Surface, a: &ArcDef, all: &[ArcDef]) -> Result<(Vertex, Vertex), SurfaceError> {
    let bad = |msg: &str| SurfaceError::BadArc { label: a.label.clone(), msg: msg.to_string() };
    let n = surface.n() as i64;
    match (surface, &a.kind) {
        (Surface::Polygon { .. }, ArcKind::Peripheral { from, to, side: Side::Outer }) => {
            let (f, t) = (*from, *to);
            if !(1 <= f && f < t && t <= n) {
                return Err(bad("polygon diagonals need 1 <= from < to <= n"));
            }
            if t - f < 2 || (f == 1 && t == n) {
                return Err(bad("a boundary edge is not a diagonal"));
            }
            Ok((Vertex::Low(f), Vertex::Low(t)))
        }
        (Surface::Polygon { .. }, _) => Err(bad("polygons only have diagonals")),
        (Surface::PuncturedDisk { .. }, ArcKind::Peripheral { from, to, side: Side::Outer }) => {
            let w = to - from;
            if w == n {
                return Err(bad("a loop enclosing the puncture must be given as ell_loop"));
            }
            if !(2..n).contains(&w) {
                return Err(bad("peripheral arcs need 2 <= to - from < n"));
            }
            Ok((Vertex::Low(*from), Vertex::Low(*to)))
        }
        (Surface::PuncturedDisk { .. }, ArcKind::Radius { at }) => Ok((Vertex::Low(*at), Vertex::Puncture)),
        (Surface::PuncturedDisk { .. }, ArcKind::EllLoop { at, radius }) => {
            let r = all.iter().find(|b| &b.label == radius).ok_or_else(|| bad("ell_loop names an unknown radius"))?;
            match r.kind {
                ArcKind::Radius { at: ra } if (ra - at).rem_euclid(n) == 0 => {}
                _ => return Err(bad("ell_loop radius must be a radius at the same point")),
            }
            Ok((Vertex::Low(*at), Vertex::Low(at + n)))
        }
        (Surface::Annulus { n, m }, ArcKind::Peripheral { from, to, side }) => {
            let per = if *side == Side::Outer { *n } else { *m } as i64;
            let w = to - from;
            if !(2..=per).contains(&w) {
                return Err(bad("peripheral arcs need 2 <= to - from <= boundary size"));
            }
            Ok(match side {
                Side::Outer => (Vertex::Low(*from), Vertex::Low(*to)),
                Side::Inner => (Vertex::Up(*from), Vertex::Up(*to)),
            })
        }
        (Surface::Annulus { .. }, ArcKind::Bridge { outer, inner }) => Ok((Vertex::Low(*outer), Vertex::Up(*inner))),
        (Surface::Annulus { .. }, _) => Err(bad("annulus arcs are peripheral or bridges")),
        (Surface::PuncturedDisk { .. }, _) => Err(bad("inner boundary arcs need an annulus")),
    }
}

/// A generalized peripheral arc on the designated boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArcSpec {
    pub i: i64,
    pub j: i64,
    pub k: u32,
}

/// Value-level result of forming arcs, allowing the formal tokens.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcValue {
    /// The lower lift `(s, t)`.
    Lift(i64, i64),
    /// The empty arc, value 0.
    Zero,
    /// A kinked curve: the negated value of the lift.
    Negated(i64, i64),
}

impl ArcSpec {
    pub fn new(i: i64, j: i64, k: u32, n: i64) -> Result<Self, SurfaceError> {
        if !(1..=n).contains(&i) || !(1..=n).contains(&j) {
            return Err(SurfaceError::Range(format!("endpoints must lie in 1..={n}")));
        }
        if k == 0 {
            return Err(SurfaceError::Range("level must be at least 1".into()));
        }
        Ok(ArcSpec { i, j, k })
    }

    pub fn lift(&self, n: i64) -> (i64, i64) {
        let k = self.k as i64;
        if self.i < self.j {
            (self.i, self.j + (k - 1) * n)
        } else {
            (self.i, self.j + k * n)
        }
    }

    pub fn value(&self, n: i64) -> ArcValue {
        let (s, t) = self.lift(n);
        if s == t {
            ArcValue::Zero
        } else {
            ArcValue::Lift(s, t)
        }
    }

    /// The complementary arc; `None` stands for the empty arc.
    pub fn complement(&self) -> Option<ArcSpec> {
        if self.i == self.j {
            (self.k > 1).then(|| ArcSpec { i: self.i, j: self.j, k: self.k - 1 })
        } else {
            Some(ArcSpec { i: self.j, j: self.i, k: self.k })
        }
    }

    /// Value of the complement of this arc at signed level `level`:
    /// levels `<= 0` are the formal kinked tokens.
    pub fn complement_at_level(i: i64, j: i64, level: i64, n: i64) -> ArcValue {
        if level >= 1 {
            match (ArcSpec { i, j, k: level as u32 }).complement() {
                Some(c) => c.value(n),
                None => ArcValue::Zero,
            }
        } else {
            let r = -level;
            let (s, t) = ArcSpec { i, j, k: (r + 1) as u32 }.lift(n);
            if s == t {
                ArcValue::Zero
            } else {
                ArcValue::Negated(s, t)
            }
        }
    }
}

/// Crossed triangles `Δ_0..Δ_d` and diagonals `e_1..e_d` of a lower segment.
#[derive(Clone, Debug)]
pub struct Crossing {
    pub s: Vertex,
    pub t: Vertex,
    pub triangles: Vec<Tri>,
    /// `(right endpoint, left endpoint)` of each crossed arc lift.
    pub diagonals: Vec<(Vertex, Vertex)>,
    /// Set when the segment is itself an edge of the triangulation.
    pub edge: Option<usize>,
    pub window: Window,
}

impl Crossing {
    pub fn word(&self, tri: &Triangulation) -> Vec<String> {
        self.diagonals.iter().map(|&(a, b)| tri.label(tri.edge_id(a, b).unwrap()).to_string()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct BraceletCrossing {
    pub triangles: Vec<Tri>,
    pub diagonals: Vec<(Vertex, Vertex)>,
    pub k: u32,
    pub period: usize,
}

impl BraceletCrossing {
    pub fn word(&self, tri: &Triangulation) -> Vec<String> {
        self.diagonals.iter().map(|&(a, b)| tri.label(tri.edge_id(a, b).unwrap()).to_string()).collect()
    }
}

/// The finite polygon cover of an arc, reduced to its crossed triangles.
#[derive(Clone, Debug, Serialize)]
pub struct Cover {
    pub s: Vertex,
    pub t: Vertex,
    /// `R_1..R_r`.
    pub right: Vec<Vertex>,
    /// `L_1..L_l`.
    pub left: Vec<Vertex>,
    /// `Δ_0..Δ_d`, counterclockwise.
    pub triangles: Vec<Tri>,
    /// `e_1..e_d` as `(right end, left end)`.
    pub diagonals: Vec<(Vertex, Vertex)>,
    /// Inclusive triangle-index range of each fan.
    pub fans: Vec<(usize, usize)>,
    /// Every cover edge with its variable index.
    pub edges: Vec<(Vertex, Vertex, usize)>,
    /// Lower positions strictly between the endpoints.
    pub unreduced_right: Vec<Vertex>,
    /// Forced matches removed by reduction, in removal order.
    pub forced: Vec<(Vertex, Tri)>,
    /// Set when the arc is an edge of the triangulation.
    pub edge: Option<usize>,
    #[serde(skip)]
    pub vars: Arc<Vec<String>>,
    #[serde(skip)]
    pub weights: Weights,
}

impl Cover {
    fn build(tri: &Triangulation, c: &Crossing) -> Result<Cover, SurfaceError> {
        let (s, t) = (c.s.low().unwrap(), c.t.low().unwrap());
        let weights = tri.weights();
        let unreduced_right: Vec<Vertex> = (s + 1..t).map(Vertex::Low).collect();
        if let Some(id) = c.edge {
            return Ok(Cover {
                s: c.s,
                t: c.t,
                right: vec![],
                left: vec![],
                triangles: vec![],
                diagonals: vec![],
                fans: vec![],
                edges: vec![(c.s, c.t, id)],
                unreduced_right,
                forced: vec![],
                edge: Some(id),
                vars: tri.vars.clone(),
                weights,
            });
        }
        let diag_set: BTreeSet<(Vertex, Vertex)> =
            c.diagonals.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        // counterclockwise boundary of the union
        let mut next: HashMap<Vertex, Vertex> = HashMap::new();
        let mut edges = Vec::new();
        for tr in &c.triangles {
            for k in 0..3 {
                let (x, y) = (tr[k], tr[(k + 1) % 3]);
                let key = (x.min(y), x.max(y));
                if diag_set.contains(&key) {
                    continue;
                }
                if next.insert(x, y).is_some() {
                    return Err(SurfaceError::NotTriangulated("cover is not a polygon".into()));
                }
                edges.push((x, y, tri.edge_id(x, y).unwrap()));
            }
        }
        for &(a, b) in &c.diagonals {
            edges.push((a, b, tri.edge_id(a, b).unwrap()));
        }
        let mut cycle = vec![c.s];
        let mut v = c.s;
        loop {
            v = *next.get(&v).ok_or_else(|| SurfaceError::NotTriangulated("open cover boundary".into()))?;
            if v == c.s {
                break;
            }
            if cycle.contains(&v) {
                return Err(SurfaceError::NotTriangulated("cover boundary repeats a vertex".into()));
            }
            cycle.push(v);
        }
        let tpos = cycle.iter().position(|&x| x == c.t).unwrap();
        let right: Vec<Vertex> = cycle[1..tpos].to_vec();
        let mut left: Vec<Vertex> = cycle[tpos + 1..].to_vec();
        left.reverse();
        for r in &right {
            if !r.low().is_some_and(|p| s < p && p < t) {
                return Err(SurfaceError::NotTriangulated("right side leaves the arc's span".into()));
            }
        }
        let mut fans = Vec::new();
        for r in &right {
            let idx: Vec<usize> =
                (0..c.triangles.len()).filter(|&i| c.triangles[i].contains(r)).collect();
            let (a, b) = (idx[0], *idx.last().unwrap());
            if b - a + 1 != idx.len() || idx.len() < 2 {
                return Err(SurfaceError::NotTriangulated("fan is not contiguous".into()));
            }
            fans.push((a, b));
        }

        // triangles below the arc that it does not cross
        let crossed: BTreeSet<Tri> = c.triangles.iter().map(canon_tri).collect();
        let mut below: Vec<Tri> = Vec::new();
        let mut seen: BTreeSet<Tri> = BTreeSet::new();
        let mut queue: VecDeque<Tri> = VecDeque::new();
        for p in s..t {
            if let Some(tr) = tri.tri_left(Vertex::Low(p), Vertex::Low(p + 1), c.window) {
                queue.push_back(tr);
            }
        }
        while let Some(tr) = queue.pop_front() {
            let key = canon_tri(&tr);
            if crossed.contains(&key) || !seen.insert(key) {
                continue;
            }
            below.push(key);
            for k in 0..3 {
                let (x, y) = (tr[k], tr[(k + 1) % 3]);
                if let Some(o) = tri.tri_left(y, x, c.window) {
                    queue.push_back(o);
                }
            }
            if below.len() > 100_000 {
                return Err(SurfaceError::NotTriangulated("region below arc is unbounded".into()));
            }
        }
        // peel forced matches
        let mut pool: Vec<Tri> = below.clone();
        let mut free: Vec<Vertex> = unreduced_right.clone();
        let mut forced = Vec::new();
        while !pool.is_empty() {
            let mut progress = false;
            for i in 0..free.len() {
                let v = free[i];
                let incident_crossed = c.triangles.iter().filter(|tr| tr.contains(&v)).count();
                let inc: Vec<usize> = (0..pool.len()).filter(|&k| pool[k].contains(&v)).collect();
                if inc.len() == 1 && incident_crossed == 0 {
                    forced.push((v, pool[inc[0]]));
                    pool.remove(inc[0]);
                    free.remove(i);
                    progress = true;
                    break;
                }
            }
            if !progress {
                return Err(SurfaceError::NotTriangulated("forced-match reduction stalled".into()));
            }
        }
        if free != right {
            return Err(SurfaceError::NotTriangulated("reduction left unexpected vertices".into()));
        }
        Ok(Cover {
            s: c.s,
            t: c.t,
            right,
            left,
            triangles: c.triangles.clone(),
            diagonals: c.diagonals.clone(),
            fans,
            edges,
            unreduced_right,
            forced,
            edge: None,
            vars: tri.vars.clone(),
            weights,
        })
    }

    pub fn d(&self) -> usize {
        self.diagonals.len()
    }

    pub fn r(&self) -> usize {
        self.right.len()
    }

    /// Variable index of the cover edge between `x` and `y`.
    pub fn edge_between(&self, x: Vertex, y: Vertex) -> Option<usize> {
        self.edges
            .iter()
            .find(|&&(a, b, _)| (a == x && b == y) || (a == y && b == x))
            .map(|&(_, _, id)| id)
    }

    /// 1-based index of a diagonal `{x, y}` among `e_1..e_d`.
    pub fn diagonal_index(&self, x: Vertex, y: Vertex) -> Option<usize> {
        self.diagonals
            .iter()
            .position(|&(a, b)| (a == x && b == y) || (a == y && b == x))
            .map(|i| i + 1)
    }

    /// Position of `R_i` among the lower points strictly inside the arc.
    pub fn unreduced_index(&self, i: usize) -> usize {
        self.unreduced_right.iter().position(|&v| v == self.right[i]).unwrap() + 1
    }

    pub fn label(&self, id: usize) -> &str {
        &self.vars[id]
    }

    /// Weight of one edge; boundary edges become 1 unless kept.
    pub fn edge_poly(&self, id: usize, keep_boundary: bool) -> LaurentPoly {
        self.weights.poly(id, keep_boundary)
    }
}

pub fn canon_tri(t: &Tri) -> Tri {
    let k = (0..3).min_by_key(|&i| t[i]).unwrap();
    [t[k], t[(k + 1) % 3], t[(k + 2) % 3]]
}
