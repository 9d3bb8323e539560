//! Integer and Laurent frieze windows, growth coefficients and identity checks.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::expansion::{laurent_of_bracelet, laurent_of_lift, laurent_of_value, BraceletEngine, ExpandOptions, ExpansionError};
use crate::laurent::LaurentPoly;
use crate::surface::{ArcSpec, ArcValue, Side, Surface, SurfaceError, Triangulation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FriezeError {
    #[error("quiddity sequence must be non-empty and positive")]
    BadQuiddity,
    #[error("entry ({i},{j}) is not an integer")]
    NotExact { i: i64, j: i64 },
    #[error("entry ({i},{j}) is not positive")]
    NotPositive { i: i64, j: i64 },
    #[error("window too small: {0}")]
    Window(String),
    #[error("growth coefficient s_{k} depends on the column")]
    ColumnDependent { k: usize },
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// Values a frieze can hold.
pub trait Entry: Clone + PartialEq {
    fn times(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn is_unit(&self) -> bool;
    fn text(&self) -> String;
}

impl Entry for BigInt {
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn is_unit(&self) -> bool {
        self.is_one()
    }
    fn text(&self) -> String {
        self.to_string()
    }
}

impl Entry for LaurentPoly {
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn is_unit(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }
    fn text(&self) -> String {
        self.canonical_text()
    }
}

/// Frieze entries `F_{i,j}` on a window of columns `i` and rows `j - i`.
#[derive(Clone, Debug)]
pub struct FriezeGrid<V> {
    pub n: i64,
    pub first: i64,
    pub cols: usize,
    pub rows: usize,
    pub entries: BTreeMap<(i64, i64), V>,
}

impl<V: Entry> FriezeGrid<V> {
    pub fn get(&self, i: i64, j: i64) -> Option<&V> {
        self.entries.get(&(i, j))
    }

    /// Row `r` across the window's columns.
    pub fn row(&self, r: usize) -> Vec<&V> {
        (self.first..self.first + self.cols as i64).filter_map(|i| self.get(i, i + r as i64)).collect()
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        for r in 0..=self.rows {
            let row: Vec<String> = self.row(r).iter().map(|v| v.text()).collect();
            s.push_str(&row.join("\t"));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "period": self.n,
            "first_column": self.first,
            "columns": self.cols,
            "rows": self.rows,
            "entries": self.entries.iter().map(|(&(i, j), v)| serde_json::json!({
                "i": i, "j": j, "value": v.text()
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_latex(&self) -> String {
        let mut s = format!("\\begin{{array}}{{{}}}\n", "c".repeat(self.cols));
        for r in 0..=self.rows {
            let row: Vec<String> = self.row(r).iter().map(|v| v.text()).collect();
            s.push_str(&row.join(" & "));
            s.push_str(" \\\\\n");
        }
        s.push_str("\\end{array}\n");
        s
    }
}

/// Period table of an integer frieze: `table[r][i mod n] = F_{i,i+r}`.
fn integer_table(q: &[BigInt], rows: usize) -> Result<Vec<Vec<BigInt>>, FriezeError> {
    let n = q.len();
    if n == 0 || q.iter().any(|a| !a.is_positive()) {
        return Err(FriezeError::BadQuiddity);
    }
    let mut t = vec![vec![BigInt::zero(); n], vec![BigInt::one(); n]];
    if rows >= 2 {
        t.push((0..n).map(|i| q[(i + 1) % n].clone()).collect());
    }
    for r in 3..=rows {
        let mut row = Vec::with_capacity(n);
        for i in 0..n {
            let a = &t[r - 1][i];
            let b = &t[r - 1][(i + 1) % n];
            let c = &t[r - 2][(i + 1) % n];
            let num = a * b - BigInt::one();
            if c.is_zero() || !(&num % c).is_zero() {
                return Err(FriezeError::NotExact { i: i as i64, j: (i + r) as i64 });
            }
            let v = num / c;
            if !v.is_positive() {
                return Err(FriezeError::NotPositive { i: i as i64, j: (i + r) as i64 });
            }
            row.push(v);
        }
        t.push(row);
    }
    Ok(t)
}

/// Integer frieze with `F_{0,2} = q[0]`, rows `0..=rows`, columns
/// `first..first + cols`.
pub fn integer_frieze(q: &[BigInt], rows: usize, first: i64, cols: usize) -> Result<FriezeGrid<BigInt>, FriezeError> {
    // q[0] sits at F_{0,2}, i.e. the second row is the quiddity shifted by one
    let n = q.len() as i64;
    let shifted: Vec<BigInt> = (0..q.len()).map(|i| q[(i + q.len() - 1) % q.len()].clone()).collect();
    let table = integer_table(&shifted, rows)?;
    let mut entries = BTreeMap::new();
    for i in first..first + cols as i64 {
        for r in 0..=rows {
            entries.insert((i, i + r as i64), table[r][i.rem_euclid(n) as usize].clone());
        }
    }
    Ok(FriezeGrid { n, first, cols, rows, entries })
}

/// Laurent frieze of a boundary: `F_{i,j}` is the expansion of the lower
/// segment from `i` to `j`.
pub fn laurent_frieze(
    t: &Triangulation,
    side: Side,
    rows: usize,
    first: i64,
    cols: usize,
    opts: ExpandOptions,
) -> Result<FriezeGrid<LaurentPoly>, FriezeError> {
    let reflected;
    let t = match side {
        Side::Outer => t,
        Side::Inner => {
            reflected = t.reflected()?;
            &reflected
        }
    };
    let n = t.n();
    if t.is_polygon() && rows as i64 > n {
        return Err(FriezeError::Window(format!("a polygon frieze has {n} nontrivial rows")));
    }
    let mut memo: HashMap<(i64, i64), LaurentPoly> = HashMap::new();
    let mut entries = BTreeMap::new();
    for i in first..first + cols as i64 {
        for r in 0..=rows as i64 {
            let key = ((i - 1).rem_euclid(n) + 1, r);
            let v = match memo.get(&key) {
                Some(v) => v.clone(),
                None => {
                    let v = laurent_of_lift(t, key.0, key.0 + r, opts)?;
                    memo.insert(key, v.clone());
                    v
                }
            };
            entries.insert((i, i + r), v);
        }
    }
    Ok(FriezeGrid { n, first, cols, rows, entries })
}

pub fn specialize_grid(g: &FriezeGrid<LaurentPoly>) -> FriezeGrid<BigInt> {
    FriezeGrid {
        n: g.n,
        first: g.first,
        cols: g.cols,
        rows: g.rows,
        entries: g.entries.iter().map(|(&k, v)| (k, v.specialize_all())).collect(),
    }
}

/// `s_0..s_k` read from a grid, checked across all columns.
pub fn growth_coefficients<V: Entry>(g: &FriezeGrid<V>, k: usize, two: V) -> Result<Vec<V>, FriezeError> {
    let mut s = vec![two];
    for level in 1..=k {
        let span = 1 + level as i64 * g.n;
        let mut value: Option<V> = None;
        for i in g.first..g.first + g.cols as i64 - 1 {
            let (Some(a), Some(b)) = (g.get(i, i + span), g.get(i + 1, i + span - 1)) else {
                return Err(FriezeError::Window(format!("s_{level} needs row {span}")));
            };
            let d = a.minus(b);
            match &value {
                None => value = Some(d),
                Some(v) if *v != d => return Err(FriezeError::ColumnDependent { k: level }),
                _ => {}
            }
        }
        s.push(value.ok_or_else(|| FriezeError::Window("need at least two columns".into()))?);
    }
    Ok(s)
}

/// `T_k(x)` over the integers: `T_0 = 2`, `T_1 = x`.
pub fn chebyshev_apply(k: u32, x: &BigInt) -> BigInt {
    let (mut a, mut b) = (BigInt::from(2), x.clone());
    if k == 0 {
        return a;
    }
    for _ in 1..k {
        let c = x * &b - &a;
        a = b;
        b = c;
    }
    b
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl Report {
    pub fn new(name: &str) -> Self {
        Report { name: name.into(), ..Default::default() }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, pass: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !pass {
            self.failures.push(what());
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.checked += other.checked;
        self.failures.extend(other.failures.into_iter().map(|f| format!("{}: {f}", other.name)));
    }
}

/// Check `F_{i,j} F_{i+1,j+1} - F_{i+1,j} F_{i,j+1} = 1` on every complete diamond.
pub fn verify_diamond<V: Entry>(g: &FriezeGrid<V>) -> Report {
    let mut r = Report::new("diamond");
    for (&(i, j), a) in &g.entries {
        if j < i + 1 {
            continue;
        }
        let (Some(b), Some(c), Some(d)) = (g.get(i + 1, j + 1), g.get(i + 1, j), g.get(i, j + 1)) else {
            continue;
        };
        let v = a.times(b).minus(&c.times(d));
        r.check(v.is_unit(), || format!("diamond at ({i},{j}) gives {}", v.text()));
    }
    r
}

fn bracelet(t: &Triangulation, k: i64) -> Result<LaurentPoly, FriezeError> {
    Ok(laurent_of_bracelet(t, k as u32, BraceletEngine::Band)?)
}

fn arc(t: &Triangulation, i: i64, j: i64, k: u32, opts: ExpandOptions) -> Result<LaurentPoly, FriezeError> {
    Ok(laurent_of_value(t, ArcSpec { i, j, k }.value(t.n()), opts)?)
}

fn complement_value(t: &Triangulation, i: i64, j: i64, level: i64, opts: ExpandOptions) -> Result<LaurentPoly, FriezeError> {
    Ok(laurent_of_value(t, ArcSpec::complement_at_level(i, j, level, t.n()), opts)?)
}

fn check_bracelets(t: &Triangulation) -> Result<(), FriezeError> {
    if matches!(t.surface(), Surface::Polygon { .. }) {
        return Err(SurfaceError::Unsupported("polygons have no bracelets".into()).into());
    }
    Ok(())
}

/// `x(γ_k) = x(γ_m) x(Brac_{k-m}) + x(γ^C_{k-2m+1})`, with kinked complements
/// at non-positive levels.
pub fn verify_progression(t: &Triangulation, i: i64, j: i64, k: u32, m: u32, opts: ExpandOptions) -> Result<Report, FriezeError> {
    check_bracelets(t)?;
    ArcSpec::new(i, j, k, t.n())?;
    if k < 2 || m < 1 || m >= k {
        return Err(SurfaceError::Range(format!("need k >= 2 and 1 <= m < k, got k={k}, m={m}")).into());
    }
    let mut r = Report::new("progression");
    let lhs = arc(t, i, j, k, opts)?;
    let level = k as i64 - 2 * m as i64 + 1;
    let rhs = &(&arc(t, i, j, m, opts)? * &bracelet(t, (k - m) as i64)?) + &complement_value(t, i, j, level, opts)?;
    r.check(lhs == rhs, || {
        format!(
            "γ_{k}({i},{j}) with m={m}: {} != {}; {}",
            lhs.canonical_text(),
            rhs.canonical_text(),
            lhs.first_difference(&rhs).unwrap_or_default()
        )
    });
    Ok(r)
}

#[derive(Clone, Debug)]
pub struct ComplementDifferences {
    pub c: Vec<LaurentPoly>,
    pub s: Vec<LaurentPoly>,
    pub report: Report,
}

/// `c_k = x(γ_k) - x(γ_k^C)` with the recurrence and closed form checked.
pub fn complement_differences(t: &Triangulation, i: i64, j: i64, kmax: u32, opts: ExpandOptions) -> Result<ComplementDifferences, FriezeError> {
    check_bracelets(t)?;
    ArcSpec::new(i, j, 1, t.n())?;
    let mut c = vec![];
    for k in 1..=kmax {
        let g = ArcSpec { i, j, k };
        let comp = match g.complement() {
            Some(h) => laurent_of_value(t, h.value(t.n()), opts)?,
            None => LaurentPoly::zero(t.vars().clone()),
        };
        c.push(&arc(t, i, j, k, opts)? - &comp);
    }
    let s: Vec<LaurentPoly> = (0..kmax as i64).map(|k| bracelet(t, k)).collect::<Result<_, _>>()?;
    let mut r = Report::new("complement differences");
    let cc = |k: usize| if k == 0 { c[0].clone() } else { c[k - 1].clone() };
    for k in 2..=kmax as usize {
        let rec = &(&(&s[k - 1] - &s[k - 2]) * &cc(1)) + &cc(k - 2);
        r.check(cc(k) == rec, || format!("recurrence at k={k}: {} != {}", cc(k).canonical_text(), rec.canonical_text()));
    }
    for k in 1..=kmax as usize {
        let mut sum = LaurentPoly::one(t.vars().clone());
        let range = if k % 2 == 0 { 0..k } else { 1..k };
        for idx in range {
            let odd = idx % 2 == 1;
            let sign_positive = if k % 2 == 0 { odd } else { !odd };
            sum = if sign_positive { &sum + &s[idx] } else { &sum - &s[idx] };
        }
        let closed = &cc(1) * &sum;
        r.check(cc(k) == closed, || format!("closed form at k={k}: {} != {}", cc(k).canonical_text(), closed.canonical_text()));
    }
    if i == j {
        let x1 = arc(t, i, j, 1, opts)?;
        r.check(c[0] == x1, || "c_1 differs from x(γ_1) for i = j".into());
    }
    Ok(ComplementDifferences { c, s, report: r })
}

/// `x(γ_k) - x(γ_{k-1}) = x(γ_1) + x(γ_1^C)` on a punctured disk.
pub fn verify_arithmetic(t: &Triangulation, i: i64, j: i64, kmax: u32, opts: ExpandOptions) -> Result<Report, FriezeError> {
    if !matches!(t.surface(), Surface::PuncturedDisk { .. }) {
        return Err(SurfaceError::Unsupported("arithmetic friezes come from punctured disks".into()).into());
    }
    ArcSpec::new(i, j, 1, t.n())?;
    let mut r = Report::new("arithmetic");
    let g1 = ArcSpec { i, j, k: 1 };
    let c1 = match g1.complement() {
        Some(h) => laurent_of_value(t, h.value(t.n()), opts)?,
        None => LaurentPoly::zero(t.vars().clone()),
    };
    let diff = &arc(t, i, j, 1, opts)? + &c1;
    for k in 2..=kmax {
        let d = &arc(t, i, j, k, opts)? - &arc(t, i, j, k - 1, opts)?;
        r.check(d == diff, || {
            format!(
                "difference at k={k}: {} != {}; {}",
                d.canonical_text(),
                diff.canonical_text(),
                d.first_difference(&diff).unwrap_or_default()
            )
        });
    }
    Ok(r)
}

/// Common differences along diagonals `F_{i, j + t n}` for `t = 0..=steps`.
pub fn verify_n_arithmetic(g: &FriezeGrid<BigInt>, steps: usize) -> Report {
    let mut r = Report::new("n-arithmetic");
    for (&(i, j), a) in &g.entries {
        if j <= i {
            continue;
        }
        let vals: Vec<&BigInt> = (0..=steps as i64).map_while(|t| g.get(i, j + t * g.n)).collect();
        if vals.len() < 3 {
            continue;
        }
        let d = vals[1] - a;
        for w in vals.windows(2) {
            let e = w[1] - w[0];
            r.check(e == d, || format!("diagonal from ({i},{j}) is not arithmetic"));
        }
    }
    r
}

/// Common difference along the diagonal starting at `F_{i,j}`.
pub fn diagonal_difference(g: &FriezeGrid<BigInt>, i: i64, j: i64) -> Option<BigInt> {
    Some(g.get(i, j + g.n)? - g.get(i, j)?)
}

/// Parse a comma-separated quiddity sequence.
pub fn parse_quiddity(s: &str) -> Result<Vec<BigInt>, FriezeError> {
    let q: Vec<BigInt> = s
        .split(',')
        .map(|p| p.trim().parse::<BigInt>().map_err(|_| FriezeError::BadQuiddity))
        .collect::<Result<_, _>>()?;
    if q.is_empty() || q.iter().any(|a| !a.is_positive()) {
        return Err(FriezeError::BadQuiddity);
    }
    Ok(q)
}

pub fn laurent_growth(t: &Triangulation, kmax: usize, side: Side, opts: ExpandOptions) -> Result<Vec<LaurentPoly>, FriezeError> {
    check_bracelets(t)?;
    let n = match side {
        Side::Outer => t.n(),
        Side::Inner => t.reflected()?.n(),
    } as usize;
    let g = laurent_frieze(t, side, 1 + kmax * n, 1, n + 1, opts)?;
    growth_coefficients(&g, kmax, LaurentPoly::constant(t.vars().clone(), 2))
}

/// Quiddity of a boundary as frieze input, `F_{i,i+2}` at `q[i mod n]`.
pub fn frieze_quiddity(t: &Triangulation, side: Side) -> Result<Vec<BigInt>, FriezeError> {
    Ok(t.quiddity_on(side)?.into_iter().map(BigInt::from).collect())
}

pub fn value_of(t: &Triangulation, v: ArcValue, opts: ExpandOptions) -> Result<LaurentPoly, FriezeError> {
    Ok(laurent_of_value(t, v, opts)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn row(g: &FriezeGrid<BigInt>, r: usize) -> Vec<i64> {
        g.row(r).iter().map(|v| i64::try_from(*v).unwrap()).collect()
    }

    #[test]
    fn pentagon_rows() {
        let g = integer_frieze(&q(&[4, 1, 2, 3, 2]), 5, 0, 5).unwrap();
        assert_eq!(row(&g, 2), vec![4, 1, 2, 3, 2]);
        assert_eq!(row(&g, 3), vec![3, 1, 5, 5, 7]);
        assert_eq!(row(&g, 4), vec![2, 2, 8, 17, 5]);
        assert_eq!(row(&g, 5), vec![3, 3, 27, 12, 3]);
    }

    #[test]
    fn forced_zero() {
        assert!(matches!(integer_frieze(&q(&[1, 1]), 4, 0, 2), Err(FriezeError::NotPositive { .. })));
        assert_eq!(parse_quiddity("1,0"), Err(FriezeError::BadQuiddity));
    }

    #[test]
    fn chebyshev_integers() {
        assert_eq!(chebyshev_apply(0, &BigInt::from(3)), BigInt::from(2));
        assert_eq!(chebyshev_apply(2, &BigInt::from(3)), BigInt::from(7));
        assert_eq!(chebyshev_apply(3, &BigInt::from(3)), BigInt::from(18));
    }

    #[test]
    fn perturbed_diamonds() {
        let mut g = integer_frieze(&q(&[4, 1, 2, 3, 2]), 6, 0, 10).unwrap();
        assert!(verify_diamond(&g).ok());
        *g.entries.get_mut(&(4, 7)).unwrap() += 1;
        let r = verify_diamond(&g);
        assert!(!r.ok() && r.failures.len() <= 4);
    }
}
