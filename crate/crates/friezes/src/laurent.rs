//! Sparse multivariate Laurent polynomials with big-integer coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("divisor is not a single monomial")]
    NotMonomial,
    #[error("coefficient {coeff} is not divisible by {divisor}")]
    InexactDivision { coeff: BigInt, divisor: BigInt },
    #[error("duplicate variable name `{0}`")]
    DuplicateVar(String),
    #[error("unknown variable `{0}`")]
    UnknownVar(String),
    #[error("exponent vector has length {got}, expected {expected}")]
    BadArity { got: usize, expected: usize },
}

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponent(pub Vec<i32>);

impl Exponent {
    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug)]
pub struct LaurentPoly {
    vars: Arc<Vec<String>>,
    terms: BTreeMap<Exponent, BigInt>,
}

impl LaurentPoly {
    pub fn zero(vars: Arc<Vec<String>>) -> Self {
        LaurentPoly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: Arc<Vec<String>>, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(vars);
        let c = c.into();
        if !c.is_zero() {
            let n = p.vars.len();
            p.terms.insert(Exponent(vec![0; n]), c);
        }
        p
    }

    pub fn one(vars: Arc<Vec<String>>) -> Self {
        Self::constant(vars, 1)
    }

    /// Variable `name` raised to the first power.
    pub fn var(vars: Arc<Vec<String>>, name: &str) -> Result<Self, LaurentError> {
        let idx = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| LaurentError::UnknownVar(name.to_string()))?;
        Ok(Self::var_index(vars, idx, 1))
    }

    pub fn var_index(vars: Arc<Vec<String>>, idx: usize, power: i32) -> Self {
        let mut e = vec![0; vars.len()];
        e[idx] = power;
        Self::monomial(vars, Exponent(e), BigInt::one())
    }

    pub fn monomial(vars: Arc<Vec<String>>, exp: Exponent, coeff: BigInt) -> Self {
        assert_eq!(exp.0.len(), vars.len(), "exponent arity");
        let mut p = Self::zero(vars);
        if !coeff.is_zero() {
            p.terms.insert(exp, coeff);
        }
        p
    }

    pub fn from_terms(
        vars: Vec<String>,
        terms: impl IntoIterator<Item = (Vec<i32>, BigInt)>,
    ) -> Result<Self, LaurentError> {
        let vars = Arc::new(check_vars(vars)?);
        let mut p = Self::zero(vars.clone());
        for (e, c) in terms {
            if e.len() != vars.len() {
                return Err(LaurentError::BadArity { got: e.len(), expected: vars.len() });
            }
            p.add_term(Exponent(e), c);
        }
        Ok(p)
    }

    pub fn vars(&self) -> &Arc<Vec<String>> {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The integer value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.0.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Single-term view: exponent and coefficient.
    pub fn as_monomial(&self) -> Option<(&Exponent, &BigInt)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn add_term(&mut self, e: Exponent, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Re-express over `vars`, which must contain every variable used here.
    pub fn with_vars(&self, vars: &Arc<Vec<String>>) -> Result<Self, LaurentError> {
        if Arc::ptr_eq(&self.vars, vars) || self.vars == *vars {
            return Ok(LaurentPoly { vars: vars.clone(), terms: self.terms.clone() });
        }
        let map: Vec<Option<usize>> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v))
            .collect();
        let mut out = Self::zero(vars.clone());
        for (e, c) in &self.terms {
            let mut ne = vec![0; vars.len()];
            for (i, &x) in e.0.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => ne[j] = x,
                    None => return Err(LaurentError::UnknownVar(self.vars[i].clone())),
                }
            }
            out.add_term(Exponent(ne), c.clone());
        }
        Ok(out)
    }

    fn union_vars(a: &Arc<Vec<String>>, b: &Arc<Vec<String>>) -> Arc<Vec<String>> {
        if Arc::ptr_eq(a, b) || a == b {
            return a.clone();
        }
        let mut v: Vec<String> = a.as_ref().clone();
        for name in b.iter() {
            if !v.contains(name) {
                v.push(name.clone());
            }
        }
        Arc::new(v)
    }

    /// Bring both operands onto a common variable table (name alignment).
    pub fn align(&self, other: &Self) -> (Self, Self) {
        let u = Self::union_vars(&self.vars, &other.vars);
        (
            self.with_vars(&u).expect("union contains all vars"),
            other.with_vars(&u).expect("union contains all vars"),
        )
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        let mut out = Self::zero(self.vars.clone());
        if k.is_zero() {
            return out;
        }
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), c * k);
        }
        out
    }

    fn add_impl(&self, other: &Self, sign: bool) -> Self {
        let (a, b);
        let (lhs, rhs) = if Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars {
            (self, other)
        } else {
            let (x, y) = self.align(other);
            a = x;
            b = y;
            (&a, &b)
        };
        let mut out = lhs.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), if sign { c.clone() } else { -c.clone() });
        }
        out
    }

    fn mul_impl(&self, other: &Self) -> Self {
        let (a, b);
        let (lhs, rhs) = if Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars {
            (self, other)
        } else {
            let (x, y) = self.align(other);
            a = x;
            b = y;
            (&a, &b)
        };
        let mut out = Self::zero(lhs.vars.clone());
        for (e1, c1) in &lhs.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<i32> = e1.0.iter().zip(&e2.0).map(|(x, y)| x + y).collect();
                out.add_term(Exponent(e), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.vars.clone());
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Divide by a single monomial; coefficients must divide exactly.
    pub fn monomial_quotient(&self, m: &LaurentPoly) -> Result<Self, LaurentError> {
        let (p, m) = self.align(m);
        let (me, mc) = m.as_monomial().ok_or(LaurentError::NotMonomial)?;
        let mut out = Self::zero(p.vars.clone());
        for (e, c) in &p.terms {
            if !(c % mc).is_zero() {
                return Err(LaurentError::InexactDivision { coeff: c.clone(), divisor: mc.clone() });
            }
            let ne: Vec<i32> = e.0.iter().zip(&me.0).map(|(x, y)| x - y).collect();
            out.add_term(Exponent(ne), c / mc);
        }
        Ok(out)
    }

    /// Substitute 1 for every variable named in `names`.
    pub fn specialize_ones(&self, names: &[&str]) -> Self {
        let mask: Vec<bool> = self.vars.iter().map(|v| names.contains(&v.as_str())).collect();
        let mut out = Self::zero(self.vars.clone());
        for (e, c) in &self.terms {
            let ne: Vec<i32> =
                e.0.iter().zip(&mask).map(|(&x, &m)| if m { 0 } else { x }).collect();
            out.add_term(Exponent(ne), c.clone());
        }
        out
    }

    /// Substitute 1 for every variable: the coefficient sum.
    pub fn specialize_all(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Value of the Chebyshev polynomial T_k at `self` (T_0 = 2, T_1 = x).
    pub fn chebyshev(&self, k: u32) -> Self {
        let mut prev = Self::constant(self.vars.clone(), 2);
        if k == 0 {
            return prev;
        }
        let mut cur = self.clone();
        for _ in 1..k {
            let next = &(self * &cur) - &prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    pub fn canonical_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (n, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if n == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &x) in e.0.iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(self.vars[i].clone()),
                    _ => factors.push(format!("{}^{}", self.vars[i], x)),
                }
            }
            if factors.is_empty() {
                out.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    out.push_str(&abs.to_string());
                    out.push('*');
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }

    /// Parse `coeff*var^exp*...` terms joined by `+`/`-`.
    ///
    /// Variables are taken from `vars` when given; otherwise they are
    /// declared in order of first appearance.
    pub fn parse_text(s: &str, vars: Option<&[String]>) -> Result<Self, LaurentError> {
        let mut p = Parser { s: s.as_bytes(), pos: 0, vars: vars.map(|v| v.to_vec()), seen: vec![] };
        let raw = p.parse()?;
        let names = match p.vars {
            Some(v) => check_vars(v)?,
            None => p.seen,
        };
        let vars = Arc::new(names);
        let mut out = Self::zero(vars.clone());
        for (factors, c) in raw {
            let mut e = vec![0; vars.len()];
            for (name, x) in factors {
                let i = vars.iter().position(|v| *v == name).unwrap();
                e[i] += x;
            }
            out.add_term(Exponent(e), c);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<JsonTerm> = self
            .terms
            .iter()
            .map(|(e, c)| JsonTerm { coeff: c.to_string(), exp: e.0.clone() })
            .collect();
        serde_json::to_value(JsonPoly { vars: self.vars.as_ref().clone(), terms }).unwrap()
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, LaurentError> {
        let jp: JsonPoly = serde_json::from_value(v.clone())
            .map_err(|e| LaurentError::Parse { pos: 0, msg: e.to_string() })?;
        let mut terms = Vec::new();
        for t in jp.terms {
            let c: BigInt = t
                .coeff
                .parse()
                .map_err(|_| LaurentError::Parse { pos: 0, msg: format!("bad coefficient {}", t.coeff) })?;
            terms.push((t.exp, c));
        }
        Self::from_terms(jp.vars, terms)
    }

    /// Total degree of a monomial; None otherwise.
    pub fn monomial_degree(&self) -> Option<i64> {
        self.as_monomial().map(|(e, _)| e.degree())
    }

    /// First term where `self` and `other` disagree, for diff reports.
    pub fn first_difference(&self, other: &Self) -> Option<String> {
        let (a, b) = self.align(other);
        let mut keys: Vec<&Exponent> = a.terms.keys().chain(b.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        let zero = BigInt::zero();
        for k in keys {
            let x = a.terms.get(k).unwrap_or(&zero);
            let y = b.terms.get(k).unwrap_or(&zero);
            if x != y {
                let m = LaurentPoly::monomial(a.vars.clone(), k.clone(), BigInt::one());
                return Some(format!("coefficient of {}: {} vs {}", m.canonical_text(), x, y));
            }
        }
        None
    }
}

fn check_vars(vars: Vec<String>) -> Result<Vec<String>, LaurentError> {
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(LaurentError::DuplicateVar(v.clone()));
        }
    }
    Ok(vars)
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    coeff: String,
    exp: Vec<i32>,
}

#[derive(Serialize, Deserialize)]
struct JsonPoly {
    vars: Vec<String>,
    terms: Vec<JsonTerm>,
}

type RawTerm = (Vec<(String, i32)>, BigInt);

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    vars: Option<Vec<String>>,
    seen: Vec<String>,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, LaurentError> {
        Err(LaurentError::Parse { pos: self.pos, msg: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn parse(&mut self) -> Result<Vec<RawTerm>, LaurentError> {
        let mut out = Vec::new();
        self.skip_ws();
        if self.peek().is_none() {
            return self.err("empty input");
        }
        let mut first = true;
        loop {
            self.skip_ws();
            let mut neg = false;
            match self.peek() {
                Some(b'+') if !first => self.pos += 1,
                Some(b'-') => {
                    neg = true;
                    self.pos += 1
                }
                None => break,
                _ if first => {}
                _ => return self.err("expected `+` or `-`"),
            }
            first = false;
            self.skip_ws();
            let (factors, mut c) = self.term()?;
            if neg {
                c = -c;
            }
            out.push((factors, c));
            self.skip_ws();
            if self.peek().is_none() {
                break;
            }
        }
        Ok(out)
    }

    fn integer(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.s[start..self.pos]).ok()?.parse().ok()
    }

    fn ident(&mut self) -> Option<String> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.pos += 1,
            _ => return None,
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == b'_' {
                self.pos += 1;
            } else {
                break;
            }
        }
        Some(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }

    fn term(&mut self) -> Result<RawTerm, LaurentError> {
        let mut coeff = BigInt::one();
        let mut factors = Vec::new();
        let mut expect_factor = true;
        while expect_factor {
            self.skip_ws();
            if let Some(n) = self.integer() {
                coeff *= n;
            } else if let Some(name) = self.ident() {
                match &self.vars {
                    Some(v) if !v.contains(&name) => {
                        return Err(LaurentError::UnknownVar(name));
                    }
                    Some(_) => {}
                    None => {
                        if !self.seen.contains(&name) {
                            self.seen.push(name.clone());
                        }
                    }
                }
                self.skip_ws();
                let mut x = 1i32;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.skip_ws();
                    let neg = if self.peek() == Some(b'-') {
                        self.pos += 1;
                        true
                    } else {
                        false
                    };
                    let Some(n) = self.integer() else {
                        return self.err("expected exponent");
                    };
                    let Ok(v) = i32::try_from(n) else {
                        return self.err("exponent out of range");
                    };
                    x = if neg { -v } else { v };
                }
                factors.push((name, x));
            } else {
                return self.err("expected number or variable");
            }
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                expect_factor = false;
            }
        }
        Ok((factors, coeff))
    }
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars {
            return self.terms == other.terms;
        }
        let (a, b) = self.align(other);
        a.terms == b.terms
    }
}

impl Eq for LaurentPoly {}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_text())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a> $tr<&'a LaurentPoly> for &'a LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: &'a LaurentPoly) -> LaurentPoly {
                $body(self, rhs)
            }
        }
        impl $tr<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                $body(&self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a: &LaurentPoly, b: &LaurentPoly| a.add_impl(b, true));
binop!(Sub, sub, |a: &LaurentPoly, b: &LaurentPoly| a.add_impl(b, false));
binop!(Mul, mul, |a: &LaurentPoly, b: &LaurentPoly| a.mul_impl(b));

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(&BigInt::from(-1))
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        (&self).neg()
    }
}
