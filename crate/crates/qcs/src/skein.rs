//! Skein, square and mutation identities checked as exact Laurent equalities.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::Serialize;

use crate::curvespec::{
    perr, reflect_signed, tokenize, CurveSpec, Kind, LaminationSigns, SpecFile, Tok, Turn,
};
use crate::error::{Error, Result};
use crate::laurent::{Exps, LaurentPoly, Var};
use crate::mpath::{chi, Mode};
use crate::snakeband::{build_graph, matching_enumerator};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    /// χ of a named curve, raised to a power.
    Curve { name: String, pow: u32 },
    /// χ of the doubled traversal of a one-sided curve.
    Double { name: String },
    /// A plain variable such as a boundary arc.
    Var { var: Var, pow: i64 },
    Mono(LaurentPoly),
    Const(#[serde(serialize_with = "display")] BigInt),
}

fn display<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TermSign {
    Plus,
    Minus,
    Unknown,
}

impl TermSign {
    fn as_str(self) -> &'static str {
        match self {
            TermSign::Plus => "+",
            TermSign::Minus => "-",
            TermSign::Unknown => "?",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Term {
    pub sign: TermSign,
    pub factors: Vec<Factor>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentitySpec {
    pub name: String,
    pub mode: Mode,
    pub lhs: Vec<Factor>,
    pub rhs: Vec<Term>,
}

/// Either a curve of the file or a bare variable (`@name`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Ref {
    Curve(String),
    Var(Var),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MutationSpec {
    pub name: String,
    pub case: u8,
    pub symbols: BTreeMap<String, Ref>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub label: String,
    pub holds: bool,
    pub lhs: LaurentPoly,
    pub rhs: LaurentPoly,
}

impl Check {
    fn new(label: impl Into<String>, lhs: LaurentPoly, rhs: LaurentPoly) -> Check {
        Check { label: label.into(), holds: lhs == rhs, lhs, rhs }
    }

    pub fn residual(&self) -> LaurentPoly {
        &self.lhs - &self.rhs
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub name: String,
    pub holds: bool,
    pub checks: Vec<Check>,
    /// Witness for the `?` terms, in order of appearance.
    pub resolved_signs: Vec<String>,
}

impl Report {
    fn from_checks(name: &str, checks: Vec<Check>, resolved_signs: Vec<String>) -> Report {
        Report { name: name.to_string(), holds: checks.iter().all(|c| c.holds), checks, resolved_signs }
    }

    pub fn render(&self) -> String {
        let mut s = format!("{}: {}\n", self.name, if self.holds { "holds" } else { "FAILS" });
        for c in &self.checks {
            let _ = writeln!(s, "  [{}] {}", if c.holds { "ok" } else { "fail" }, c.label);
            let _ = writeln!(s, "    lhs = {}", c.lhs);
            let _ = writeln!(s, "    rhs = {}", c.rhs);
            if !c.holds {
                let _ = writeln!(s, "    residual = {}", c.residual());
            }
        }
        if !self.resolved_signs.is_empty() {
            let _ = writeln!(s, "  signs = {}", self.resolved_signs.join(" "));
        }
        s
    }
}

// ---------------------------------------------------------------- parsing

fn parse_factor(ln: usize, toks: &[Tok], k: &mut usize) -> Result<Factor> {
    let t = &toks[*k];
    *k += 1;
    let text = t.text;
    if text == "const" {
        let n = toks.get(*k).ok_or_else(|| perr(ln, t.col, "const needs an integer"))?;
        *k += 1;
        let v: BigInt = n.text.parse().map_err(|_| perr(ln, n.col, "malformed integer"))?;
        return Ok(Factor::Const(v));
    }
    if let Ok(v) = text.parse::<BigInt>() {
        return Ok(Factor::Const(v));
    }
    if let Some(inner) = text.strip_prefix("mono(").and_then(|r| r.strip_suffix(')')) {
        let p = LaurentPoly::parse(inner).map_err(|e| perr(ln, t.col, format!("bad monomial: {e}")))?;
        if p.as_monomial().is_none() {
            return Err(perr(ln, t.col, "mono(...) must hold a single term"));
        }
        return Ok(Factor::Mono(p));
    }
    if let Some(inner) = text.strip_prefix("double(").and_then(|r| r.strip_suffix(')')) {
        if !crate::laurent::is_valid_name(inner) {
            return Err(perr(ln, t.col, "malformed curve name"));
        }
        return Ok(Factor::Double { name: inner.to_string() });
    }
    let (base, pow) = match text.split_once('^') {
        Some((b, p)) => (b, Some((p, t.col + b.len() + 1))),
        None => (text, None),
    };
    if let Some(name) = base.strip_prefix('@') {
        let var = Var::new(name).map_err(|_| perr(ln, t.col, "malformed variable"))?;
        let pow = match pow {
            Some((p, c)) => p.parse::<i64>().map_err(|_| perr(ln, c, "malformed exponent"))?,
            None => 1,
        };
        return Ok(Factor::Var { var, pow });
    }
    if !crate::laurent::is_valid_name(base) {
        return Err(perr(ln, t.col, format!("malformed factor {text:?}")));
    }
    let pow = match pow {
        Some((p, c)) => match p.parse::<u32>() {
            Ok(n @ 1..=2) => n,
            _ => return Err(perr(ln, c, "curve exponent must be 1 or 2")),
        },
        None => 1,
    };
    Ok(Factor::Curve { name: base.to_string(), pow })
}

fn parse_product(ln: usize, toks: &[Tok], k: &mut usize, stop_at_sign: bool) -> Result<Vec<Factor>> {
    let mut out = Vec::new();
    loop {
        if *k >= toks.len() || (stop_at_sign && matches!(toks[*k].text, "+" | "-" | "?")) {
            break;
        }
        if !out.is_empty() {
            if toks[*k].text != "*" {
                return Err(perr(ln, toks[*k].col, "expected '*' between factors"));
            }
            *k += 1;
            if *k >= toks.len() {
                return Err(perr(ln, toks[*k - 1].col, "dangling '*'"));
            }
        }
        out.push(parse_factor(ln, toks, k)?);
    }
    Ok(out)
}

pub(crate) fn parse_identity_block(
    lines: &[&str],
    mut i: usize,
    ln0: usize,
    head: &[Tok],
) -> Result<(IdentitySpec, usize)> {
    if head.len() < 2 || head.len() > 3 {
        return Err(perr(ln0, head[0].col, "expected: identity <name> [mode=<standard|sqrt|y1>]"));
    }
    let name = head[1].text.to_string();
    let mut mode = Mode::Standard;
    if let Some(t) = head.get(2) {
        let m = t.text.strip_prefix("mode=").ok_or_else(|| perr(ln0, t.col, "expected mode=..."))?;
        mode = m.parse().map_err(|_| perr(ln0, t.col, format!("unknown mode {m:?}")))?;
    }
    let mut id = IdentitySpec { name, mode, lhs: Vec::new(), rhs: Vec::new() };
    loop {
        if i >= lines.len() {
            return Err(perr(ln0, 1, "identity block not terminated by end"));
        }
        let ln = i + 1;
        let toks = tokenize(lines[i]);
        i += 1;
        let Some(h) = toks.first() else { continue };
        match h.text {
            "end" => break,
            "lhs" => {
                let mut k = 1;
                id.lhs = parse_product(ln, &toks, &mut k, false)?;
                if id.lhs.is_empty() {
                    return Err(perr(ln, h.col, "empty lhs"));
                }
            }
            "rhs" => {
                let mut k = 1;
                while k < toks.len() {
                    let st = &toks[k];
                    let sign = match st.text {
                        "+" => TermSign::Plus,
                        "-" => TermSign::Minus,
                        "?" => TermSign::Unknown,
                        _ => return Err(perr(ln, st.col, "term must start with +, - or ?")),
                    };
                    k += 1;
                    let factors = parse_product(ln, &toks, &mut k, true)?;
                    if factors.is_empty() {
                        return Err(perr(ln, st.col, "empty term"));
                    }
                    id.rhs.push(Term { sign, factors });
                }
            }
            other => return Err(perr(ln, h.col, format!("unexpected {other:?} inside identity"))),
        }
    }
    if id.lhs.is_empty() {
        return Err(Error::validation_at(ln0, "identity without lhs"));
    }
    Ok((id, i))
}

fn parse_ref(ln: usize, t: &Tok, v: &str) -> Result<Ref> {
    if let Some(name) = v.strip_prefix('@') {
        Var::new(name).map(Ref::Var).map_err(|_| perr(ln, t.col, "malformed variable"))
    } else if crate::laurent::is_valid_name(v) {
        Ok(Ref::Curve(v.to_string()))
    } else {
        Err(perr(ln, t.col, format!("malformed reference {v:?}")))
    }
}

pub(crate) fn parse_mutation_line(ln: usize, toks: &[Tok]) -> Result<MutationSpec> {
    if toks.len() < 3 {
        return Err(perr(ln, toks[0].col, "expected: mutation <name> case=<1..4> <sym>=<ref> ..."));
    }
    let name = toks[1].text.to_string();
    let case = toks[2]
        .text
        .strip_prefix("case=")
        .and_then(|c| c.parse::<u8>().ok())
        .filter(|c| (1..=4).contains(c))
        .ok_or_else(|| perr(ln, toks[2].col, "case must be 1, 2, 3 or 4"))?;
    let mut symbols = BTreeMap::new();
    for t in &toks[3..] {
        let (k, v) = t.text.split_once('=').ok_or_else(|| perr(ln, t.col, "expected <sym>=<ref>"))?;
        if !matches!(k, "t" | "tp" | "a" | "b" | "c" | "d" | "e") {
            return Err(perr(ln, t.col, format!("unknown symbol {k:?}")));
        }
        symbols.insert(k.to_string(), parse_ref(ln, t, v)?);
    }
    Ok(MutationSpec { name, case, symbols })
}

pub(crate) fn check_references(file: &SpecFile) -> Result<()> {
    let known = |n: &str| file.curves.iter().any(|c| c.name == n);
    for id in &file.identities {
        let all = id.lhs.iter().chain(id.rhs.iter().flat_map(|t| t.factors.iter()));
        for f in all {
            match f {
                Factor::Curve { name, .. } if !known(name) => {
                    return Err(Error::validation(format!("identity {} references unknown curve {name}", id.name)))
                }
                Factor::Double { name } => match file.curves.iter().find(|c| &c.name == name) {
                    None => {
                        return Err(Error::validation(format!(
                            "identity {} references unknown curve {name}",
                            id.name
                        )))
                    }
                    Some(c) if c.kind != Kind::Onesided => {
                        return Err(Error::validation(format!("double({name}) needs a one-sided curve")))
                    }
                    _ => {}
                },
                _ => {}
            }
        }
    }
    for m in &file.mutations {
        for r in m.symbols.values() {
            if let Ref::Curve(n) = r {
                if !known(n) {
                    return Err(Error::validation(format!("mutation {} references unknown curve {n}", m.name)));
                }
            }
        }
    }
    Ok(())
}

fn render_factor(f: &Factor) -> String {
    match f {
        Factor::Curve { name, pow: 1 } => name.clone(),
        Factor::Curve { name, pow } => format!("{name}^{pow}"),
        Factor::Double { name } => format!("double({name})"),
        Factor::Var { var, pow: 1 } => format!("@{var}"),
        Factor::Var { var, pow } => format!("@{var}^{pow}"),
        Factor::Mono(p) => format!("mono({})", p.canonical_string().replace(' ', "")),
        Factor::Const(c) => format!("const {c}"),
    }
}

fn render_product(fs: &[Factor]) -> String {
    fs.iter().map(render_factor).collect::<Vec<_>>().join(" * ")
}

pub fn render_identity(id: &IdentitySpec) -> String {
    let mut s = format!("identity {} mode={}\n", id.name, id.mode.as_str());
    let _ = writeln!(s, "  lhs {}", render_product(&id.lhs));
    for t in &id.rhs {
        let _ = writeln!(s, "  rhs {} {}", t.sign.as_str(), render_product(&t.factors));
    }
    s.push_str("end\n");
    s
}

pub fn render_mutation(m: &MutationSpec) -> String {
    let mut s = format!("mutation {} case={}", m.name, m.case);
    for (k, r) in &m.symbols {
        match r {
            Ref::Curve(n) => {
                let _ = write!(s, " {k}={n}");
            }
            Ref::Var(v) => {
                let _ = write!(s, " {k}=@{v}");
            }
        }
    }
    s.push('\n');
    s
}

// ------------------------------------------------------------- evaluation

/// Loop obtained by traversing a one-sided curve twice: the second pass is
/// the mirror image with every crossing sign flipped.
pub fn double_cover(alpha: &CurveSpec, signs: &LaminationSigns) -> Result<CurveSpec> {
    if alpha.kind != Kind::Onesided {
        return Err(Error::Domain(format!("curve {} is not one-sided", alpha.name)));
    }
    let mut first = alpha.clone();
    for (j, c) in first.crossings.iter_mut().enumerate() {
        if let Turn::Close(r) = c.turn {
            c.turn = Turn::Next(r);
        }
        c.sign = Some(alpha.sign_at(j, signs)?);
    }
    let second = reflect_signed(alpha, signs)?;
    let mut crossings = first.crossings;
    crossings.extend(second.crossings);
    Ok(CurveSpec {
        name: format!("{}_sq", alpha.name),
        kind: Kind::Loop,
        crossings,
        initial: None,
        fin: None,
    })
}

fn half_y_product(spec: &CurveSpec) -> LaurentPoly {
    LaurentPoly::from_monomial(Exps::from_doubled(
        spec.crossings.iter().map(|c| (Var::coefficient_of(&c.arc), 1)),
    ))
}

/// χ of a closed curve or arc from its (band) graph, in the requested mode.
pub fn chi_via_graph(spec: &CurveSpec, signs: &LaminationSigns, mode: Mode) -> Result<LaurentPoly> {
    let g = build_graph(spec)?;
    let e = matching_enumerator(&g, signs)?;
    match mode {
        Mode::Standard => Ok(e),
        Mode::Y1 => Ok(e.set_coefficients_to_one()),
        Mode::Sqrt => e.div_unit(&half_y_product(spec).as_monomial().unwrap()),
    }
}

pub struct Evaluator<'a> {
    file: &'a SpecFile,
    mode: Mode,
    cache: BTreeMap<(String, bool), LaurentPoly>,
}

impl<'a> Evaluator<'a> {
    pub fn new(file: &'a SpecFile, mode: Mode) -> Self {
        Evaluator { file, mode, cache: BTreeMap::new() }
    }

    fn finish(&self, p: LaurentPoly) -> LaurentPoly {
        let p = p.set_to_one(self.file.units.iter());
        if self.mode == Mode::Y1 {
            p.set_coefficients_to_one()
        } else {
            p
        }
    }

    pub fn curve(&mut self, name: &str, doubled: bool) -> Result<LaurentPoly> {
        let key = (name.to_string(), doubled);
        if let Some(p) = self.cache.get(&key) {
            return Ok(p.clone());
        }
        let spec = self.file.curve(name)?;
        let v = if doubled {
            chi(&double_cover(spec, &self.file.signs)?, &self.file.signs, self.mode)?
        } else {
            chi(spec, &self.file.signs, self.mode)?
        };
        let v = self.finish(v);
        self.cache.insert(key, v.clone());
        Ok(v)
    }

    pub fn factor(&mut self, f: &Factor) -> Result<LaurentPoly> {
        Ok(match f {
            Factor::Curve { name, pow } => self.curve(name, false)?.pow(*pow),
            Factor::Double { name } => self.curve(name, true)?,
            Factor::Var { var, pow } => {
                let base = LaurentPoly::var_of(var);
                let p = if *pow >= 0 { base.pow(*pow as u32) } else { base.unit_inverse()?.pow((-pow) as u32) };
                self.finish(p)
            }
            Factor::Mono(p) => self.finish(p.clone()),
            Factor::Const(c) => LaurentPoly::constant(c.clone()),
        })
    }

    pub fn product(&mut self, fs: &[Factor]) -> Result<LaurentPoly> {
        let mut acc = LaurentPoly::one();
        for f in fs {
            acc = &acc * &self.factor(f)?;
        }
        Ok(acc)
    }

    pub fn reference(&mut self, r: &Ref) -> Result<LaurentPoly> {
        match r {
            Ref::Curve(n) => self.curve(n, false),
            Ref::Var(v) => Ok(self.finish(LaurentPoly::var_of(v))),
        }
    }
}

const MAX_UNKNOWN_SIGNS: usize = 16;

pub fn verify_identity(id: &IdentitySpec, file: &SpecFile) -> Result<Report> {
    let mut ev = Evaluator::new(file, id.mode);
    let lhs = ev.product(&id.lhs)?;
    let mut terms = Vec::with_capacity(id.rhs.len());
    for t in &id.rhs {
        terms.push(ev.product(&t.factors)?);
    }
    let unknown: Vec<usize> = (0..id.rhs.len()).filter(|&k| id.rhs[k].sign == TermSign::Unknown).collect();
    if unknown.len() > MAX_UNKNOWN_SIGNS {
        return Err(Error::validation(format!("identity {} has too many '?' terms", id.name)));
    }
    let sum_for = |mask: u32| -> LaurentPoly {
        let mut acc = LaurentPoly::zero();
        for (k, (t, p)) in id.rhs.iter().zip(&terms).enumerate() {
            let neg = match t.sign {
                TermSign::Plus => false,
                TermSign::Minus => true,
                TermSign::Unknown => mask & (1 << unknown.iter().position(|&u| u == k).unwrap()) != 0,
            };
            acc = if neg { &acc - p } else { &acc + p };
        }
        acc
    };
    let witness = |mask: u32| -> Vec<String> {
        (0..unknown.len()).map(|b| if mask & (1 << b) != 0 { "-" } else { "+" }.to_string()).collect()
    };
    for mask in 0..(1u32 << unknown.len()) {
        let rhs = sum_for(mask);
        if rhs == lhs {
            return Ok(Report::from_checks(&id.name, vec![Check::new("lhs = rhs", lhs, rhs)], witness(mask)));
        }
    }
    let rhs = sum_for(0);
    Ok(Report::from_checks(&id.name, vec![Check::new("lhs = rhs", lhs, rhs)], Vec::new()))
}

/// (χ̄_α)² = χ̄_{α²} − 2, both sides from the engine; χ̄_{α²} is taken from
/// the doubled loop's path and cross-checked against its band graph.
pub fn verify_square_relation(alpha: &CurveSpec, signs: &LaminationSigns, mode: Mode) -> Result<Report> {
    let doubled = double_cover(alpha, signs)?;
    let a = chi(alpha, signs, mode)?;
    let sq_path = chi(&doubled, signs, mode)?;
    let sq_band = chi_via_graph(&doubled, signs, mode)?;
    let two = LaurentPoly::constant(2);
    let checks = vec![
        Check::new("chi(alpha)^2 = chi(alpha^2) - 2", a.pow(2), &sq_path - &two),
        Check::new("alpha^2: path = band graph", sq_path, sq_band),
    ];
    Ok(Report::from_checks(&format!("square {}", alpha.name), checks, Vec::new()))
}

fn need<'b>(m: &'b MutationSpec, k: &str) -> Result<&'b Ref> {
    m.symbols
        .get(k)
        .ok_or_else(|| Error::validation(format!("mutation {} is missing an expansion for {k}", m.name)))
}

/// Check a quasi-mutation relation at y = 1.
pub fn verify_mutation(m: &MutationSpec, file: &SpecFile) -> Result<Report> {
    let mut ev = Evaluator::new(file, Mode::Y1);
    let mut get = |k: &str| -> Result<LaurentPoly> {
        let r = need(m, k)?.clone();
        ev.reference(&r)
    };
    let t = get("t")?;
    let tp = get("tp")?;
    let ttp = &t * &tp;
    let mut checks = Vec::new();
    match m.case {
        1 => {
            let (a, b, c, d) = (get("a")?, get("b")?, get("c")?, get("d")?);
            checks.push(Check::new("t*tp = a*c + b*d", ttp, &a * &c + &b * &d));
        }
        2 | 3 => {
            let a = get("a")?;
            checks.push(Check::new("t*tp = a", ttp, a));
        }
        4 => {
            let (a, b, d) = (get("a")?, get("b")?, get("d")?);
            let s = &a + &b;
            let d2 = d.pow(2);
            checks.push(Check::new("t*tp = (a+b)^2 + d^2*a*b", ttp.clone(), &s.pow(2) + &(&d2 * &(&a * &b))));
            let has = |k: &str| m.symbols.contains_key(k);
            if has("c") {
                let c = get("c")?;
                checks.push(Check::new("t*tp = a^2 + b^2 + a*b*c", ttp, &(&a.pow(2) + &b.pow(2)) + &(&(&a * &b) * &c)));
                checks.push(Check::new("c = 2 + d^2", c.clone(), &LaurentPoly::constant(2) + &d2));
                if has("e") {
                    let e = get("e")?;
                    checks.push(Check::new(
                        "c*e = 2*e + a*d + b*d",
                        &c * &e,
                        &(&LaurentPoly::constant(2) * &e) + &(&s * &d),
                    ));
                }
            }
            if has("e") {
                let e = get("e")?;
                checks.push(Check::new("e*d^2 = a*d + b*d", &e * &d2, &s * &d));
            }
        }
        _ => return Err(Error::validation(format!("unknown mutation case {}", m.case))),
    }
    Ok(Report::from_checks(&m.name, checks, Vec::new()))
}
