//! Sparse multivariate Laurent polynomials with integer coefficients.
//!
//! Exponents live on the half-integer lattice and are stored doubled, so
//! `y^{1/2}` is the pair `(y, 1)` and `x^-2` is `(x, -4)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Prefix reserved for coefficient-class variables.
pub const COEFF_PREFIX: &str = "y_";

/// Variable name. Cheap to clone; ordered lexicographically by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

/// Variable class: weight (x-type) or coefficient (y-type).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarClass {
    Weight,
    Coefficient,
}

impl Var {
    pub fn new(name: &str) -> Result<Self> {
        if is_valid_name(name) {
            Ok(Var(Arc::from(name)))
        } else {
            Err(Error::Input(format!("malformed variable name {name:?}")))
        }
    }

    /// The coefficient partner `y_<arc>` of a weight variable.
    pub fn coefficient_of(arc: &Var) -> Var {
        Var(Arc::from(format!("{COEFF_PREFIX}{}", arc.as_str()).as_str()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn class(&self) -> VarClass {
        if self.0.starts_with(COEFF_PREFIX) {
            VarClass::Coefficient
        } else {
            VarClass::Weight
        }
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Exponent vector: sorted by variable, no zero entries, values doubled.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exps(Vec<(Var, i64)>);

impl Exps {
    pub fn one() -> Self {
        Exps(Vec::new())
    }

    /// Build from (variable, doubled exponent) pairs, merging repeats.
    pub fn from_doubled<I: IntoIterator<Item = (Var, i64)>>(pairs: I) -> Self {
        let mut map: BTreeMap<Var, i64> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_insert(0) += e;
        }
        Exps(map.into_iter().filter(|(_, e)| *e != 0).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, i64)> {
        self.0.iter().map(|(v, e)| (v, *e))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Doubled exponent of `v` (0 if absent).
    pub fn get(&self, v: &Var) -> i64 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn total_doubled(&self) -> i64 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Exps) -> Exps {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Exps(out)
    }

    pub fn inv(&self) -> Exps {
        Exps(self.0.iter().map(|(v, e)| (v.clone(), -e)).collect())
    }

    pub fn scale(&self, k: i64) -> Exps {
        if k == 0 {
            return Exps::one();
        }
        Exps(self.0.iter().map(|(v, e)| (v.clone(), e * k)).collect())
    }

    /// Graded-lex comparison: larger total degree first, then larger
    /// exponent on the lexicographically first differing variable.
    pub fn graded_lex_cmp(&self, other: &Exps) -> Ordering {
        other
            .total_doubled()
            .cmp(&self.total_doubled())
            .then_with(|| {
                let (a, b) = (&self.0, &other.0);
                let (mut i, mut j) = (0, 0);
                loop {
                    let (va, ea) = match a.get(i) {
                        Some((v, e)) => (Some(v), *e),
                        None => (None, 0),
                    };
                    let (vb, eb) = match b.get(j) {
                        Some((v, e)) => (Some(v), *e),
                        None => (None, 0),
                    };
                    let (x, y) = match (va, vb) {
                        (None, None) => return Ordering::Equal,
                        (Some(_), None) => {
                            i += 1;
                            (ea, 0)
                        }
                        (None, Some(_)) => {
                            j += 1;
                            (0, eb)
                        }
                        (Some(p), Some(q)) => match p.cmp(q) {
                            Ordering::Less => {
                                i += 1;
                                (ea, 0)
                            }
                            Ordering::Greater => {
                                j += 1;
                                (0, eb)
                            }
                            Ordering::Equal => {
                                i += 1;
                                j += 1;
                                (ea, eb)
                            }
                        },
                    };
                    if x != y {
                        return y.cmp(&x);
                    }
                }
            })
    }
}

/// A single signed term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: BigInt,
    pub exps: Exps,
}

impl Monomial {
    pub fn new(coeff: BigInt, exps: Exps) -> Self {
        Monomial { coeff, exps }
    }

    pub fn unit(exps: Exps) -> Self {
        Monomial { coeff: BigInt::one(), exps }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial { coeff: &self.coeff * &other.coeff, exps: self.exps.mul(&other.exps) }
    }

    pub fn to_poly(&self) -> LaurentPoly {
        LaurentPoly::from_terms([(self.exps.clone(), self.coeff.clone())])
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

/// Exact Laurent polynomial in canonical form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<Exps, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::from_terms([(Exps::one(), c.into())])
    }

    /// Variable to the first power; panics on a malformed name.
    pub fn var(name: &str) -> Self {
        Self::var_of(&Var::new(name).expect("valid variable name"))
    }

    pub fn var_of(v: &Var) -> Self {
        Self::from_terms([(Exps(vec![(v.clone(), 2)]), BigInt::one())])
    }

    /// Single term with integer exponents.
    pub fn mono(coeff: impl Into<BigInt>, exps: &[(&str, i64)]) -> Result<Self> {
        let doubled: Vec<(&str, i64)> = exps.iter().map(|(v, e)| (*v, 2 * e)).collect();
        Self::mono_doubled(coeff, &doubled)
    }

    /// Single term with doubled exponents (`1` means one half).
    pub fn mono_doubled(coeff: impl Into<BigInt>, exps: &[(&str, i64)]) -> Result<Self> {
        let mut pairs = Vec::with_capacity(exps.len());
        for (v, e) in exps {
            pairs.push((Var::new(v)?, *e));
        }
        Ok(Self::from_terms([(Exps::from_doubled(pairs), coeff.into())]))
    }

    pub fn from_monomial(exps: Exps) -> Self {
        Self::from_terms([(exps, BigInt::one())])
    }

    pub fn from_terms<I: IntoIterator<Item = (Exps, BigInt)>>(it: I) -> Self {
        let mut p = LaurentPoly::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exps, c: BigInt) {
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

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &BigInt)> {
        self.terms.iter()
    }

    /// Terms in graded-lex order (the rendering order).
    pub fn sorted_terms(&self) -> Vec<Monomial> {
        let mut v: Vec<Monomial> =
            self.terms.iter().map(|(e, c)| Monomial::new(c.clone(), e.clone())).collect();
        v.sort_by(|a, b| a.exps.graded_lex_cmp(&b.exps));
        v
    }

    pub fn as_monomial(&self) -> Option<Monomial> {
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            Some(Monomial::new(c.clone(), e.clone()))
        } else {
            None
        }
    }

    /// Variables occurring anywhere, sorted.
    pub fn variables(&self) -> Vec<Var> {
        let mut vs: Vec<Var> =
            self.terms.keys().flat_map(|e| e.iter().map(|(v, _)| v.clone())).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn all_positive(&self) -> bool {
        self.terms.values().all(|c| c.is_positive())
    }

    pub fn all_negative(&self) -> bool {
        self.terms.values().all(|c| c.is_negative())
    }

    /// Sum of coefficients.
    pub fn coefficient_sum(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn mul_monomial(&self, m: &Monomial) -> LaurentPoly {
        LaurentPoly::from_terms(
            self.terms.iter().map(|(e, c)| (e.mul(&m.exps), c * &m.coeff)),
        )
    }

    /// Multiply by the inverse of a unit monomial (coefficient ±1).
    pub fn div_unit(&self, m: &Monomial) -> Result<LaurentPoly> {
        if !(m.coeff == BigInt::one() || m.coeff == -BigInt::one()) {
            return Err(Error::Domain(format!("{m} is not a unit")));
        }
        Ok(self.mul_monomial(&Monomial::new(m.coeff.clone(), m.exps.inv())))
    }

    /// Inverse of a unit polynomial (single term with coefficient ±1).
    pub fn unit_inverse(&self) -> Result<LaurentPoly> {
        let m = self
            .as_monomial()
            .ok_or_else(|| Error::Domain(format!("{self} is not a unit")))?;
        LaurentPoly::one().div_unit(&m)
    }

    pub fn pow(&self, k: u32) -> LaurentPoly {
        let mut acc = LaurentPoly::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Rewrite every exponent of the selected variables as `k` times itself.
    pub fn scale_exponents(&self, k: i64, pick: impl Fn(&Var) -> bool) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms.iter().map(|(e, c)| {
            let ne = Exps::from_doubled(
                e.iter().map(|(v, x)| (v.clone(), if pick(v) { x * k } else { x })),
            );
            (ne, c.clone())
        }))
    }

    /// Substitute polynomials for variables.
    ///
    /// Negative or half-integer powers require the substituted value to be a
    /// single monomial (a unit for negative powers, a perfect square for halves).
    pub fn specialize(&self, assignments: &BTreeMap<Var, LaurentPoly>) -> Result<LaurentPoly> {
        if assignments.is_empty() {
            return Ok(self.clone());
        }
        let mut out = LaurentPoly::zero();
        for (e, c) in &self.terms {
            let mut term = LaurentPoly::constant(c.clone());
            let mut rest = Vec::new();
            for (v, x) in e.iter() {
                match assignments.get(v) {
                    None => rest.push((v.clone(), x)),
                    Some(val) => term = &term * &power_doubled(val, x, v)?,
                }
            }
            term = term.mul_monomial(&Monomial::unit(Exps(rest)));
            out = &out + &term;
        }
        Ok(out)
    }

    /// Convenience: set the given variables to 1.
    pub fn set_to_one<'a, I: IntoIterator<Item = &'a Var>>(&self, vars: I) -> LaurentPoly {
        let keep: Vec<&Var> = vars.into_iter().collect();
        LaurentPoly::from_terms(self.terms.iter().map(|(e, c)| {
            let ne = Exps::from_doubled(
                e.iter().filter(|(v, _)| !keep.contains(v)).map(|(v, x)| (v.clone(), x)),
            );
            (ne, c.clone())
        }))
    }

    /// Set every coefficient-class variable to 1.
    pub fn set_coefficients_to_one(&self) -> LaurentPoly {
        let ys: Vec<Var> =
            self.variables().into_iter().filter(|v| v.class() == VarClass::Coefficient).collect();
        self.set_to_one(ys.iter())
    }

    pub fn canonical_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, m) in self.sorted_terms().iter().enumerate() {
            let neg = m.coeff.is_negative();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let abs = m.coeff.abs();
            let factors: Vec<String> = m.exps.iter().map(|(v, e)| render_factor(v, e)).collect();
            if factors.is_empty() {
                s.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    s.push_str(&abs.to_string());
                    s.push('*');
                }
                s.push_str(&factors.join("*"));
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<LaurentPoly> {
        Parser::new(text).parse_poly()
    }
}

fn power_doubled(val: &LaurentPoly, x: i64, v: &Var) -> Result<LaurentPoly> {
    if x % 2 == 0 && x > 0 {
        return Ok(val.pow((x / 2) as u32));
    }
    let m = val.as_monomial().ok_or_else(|| {
        Error::Domain(format!("cannot raise non-monomial value of {v} to power {}", half_str(x)))
    })?;
    if x < 0 && !(m.coeff == BigInt::one() || m.coeff == -BigInt::one()) {
        return Err(Error::Domain(format!("value of {v} is not a unit")));
    }
    if x % 2 == 0 {
        // Negative integer power of a unit monomial.
        let k = (-x / 2) as u32;
        return LaurentPoly::one().div_unit(&m).map(|inv| inv.pow(k));
    }
    // Half-integer power: needs coefficient 1 and even doubled exponents.
    if !m.coeff.is_one() || m.exps.iter().any(|(_, e)| e % 2 != 0) {
        return Err(Error::Domain(format!("value of {v} has no exact square root")));
    }
    let root = Exps::from_doubled(m.exps.iter().map(|(w, e)| (w.clone(), e / 2)));
    Ok(LaurentPoly::from_monomial(root.scale(x)))
}

fn half_str(x: i64) -> String {
    if x % 2 == 0 {
        (x / 2).to_string()
    } else {
        format!("{x}/2")
    }
}

fn render_factor(v: &Var, e: i64) -> String {
    if e == 2 {
        v.to_string()
    } else if e % 2 == 0 {
        format!("{v}^{}", e / 2)
    } else {
        format!("{v}^{{{e}/2}}")
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_string())
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.canonical_string())
    }
}

impl Serialize for Var {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for LaurentPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LaurentPoly::parse(s)
    }
}

impl From<i64> for LaurentPoly {
    fn from(c: i64) -> Self {
        LaurentPoly::constant(c)
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (e, c) in &small.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1.mul(e2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a LaurentPoly> for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: &LaurentPoly) -> LaurentPoly {
                (&self).$m(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { src: text.as_bytes(), pos: 0 }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: 1, col: self.pos + 1, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", b as char)))
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn small_int(&mut self) -> Result<i64> {
        let neg = self.eat(b'-');
        let v = self.int()?;
        let v: i64 = v.try_into().map_err(|_| self.err("exponent out of range"))?;
        Ok(if neg { -v } else { v })
    }

    fn parse_poly(&mut self) -> Result<LaurentPoly> {
        let mut acc = LaurentPoly::zero();
        let mut neg = self.eat(b'-');
        loop {
            let t = self.term()?;
            acc = if neg { &acc - &t } else { &acc + &t };
            if self.eat(b'+') {
                neg = false;
            } else if self.eat(b'-') {
                neg = true;
            } else {
                break;
            }
        }
        if self.peek().is_some() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<LaurentPoly> {
        let mut coeff = BigInt::one();
        let mut pairs = Vec::new();
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => coeff *= self.int()?,
                Some(c) if c.is_ascii_alphabetic() => {
                    let start = self.pos;
                    while self.pos < self.src.len()
                        && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                    {
                        self.pos += 1;
                    }
                    let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    let v = Var::new(name)?;
                    let e = if self.eat(b'^') {
                        if self.eat(b'{') {
                            let num = self.small_int()?;
                            let e = if self.eat(b'/') {
                                let den = self.int()?;
                                if den != BigInt::from(2) {
                                    return Err(self.err("only halves are supported"));
                                }
                                num
                            } else {
                                2 * num
                            };
                            self.expect(b'}')?;
                            e
                        } else {
                            2 * self.small_int()?
                        }
                    } else {
                        2
                    };
                    pairs.push((v, e));
                }
                _ => return Err(self.err("expected term")),
            }
            if !self.eat(b'*') {
                break;
            }
        }
        Ok(LaurentPoly::from_terms([(Exps::from_doubled(pairs), coeff)]))
    }
}
